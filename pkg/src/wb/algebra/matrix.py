"""Dense exact matrices over a field.

Entries are field elements supporting ``+ - * /`` (``FieldElement`` or
``fractions.Fraction``).  Rank and determinant use fraction-free (Bareiss)
elimination; the adjugate is computed from cofactors of the elimination
so that ``inverse = adjugate / det`` is available in the explicit form used
by the left-inverse construction.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence


class SingularMatrixError(ArithmeticError):
    pass


class ExactMatrix:
    def __init__(self, rows: Sequence[Sequence], zero, one):
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.ncols for r in self.rows):
            raise ValueError("ragged matrix")
        self.zero = zero
        self.one = one

    # construction -----------------------------------------------------
    @classmethod
    def over(cls, K, rows: Sequence[Sequence]) -> ExactMatrix:
        """Build a matrix over a rational function field K, coercing entries."""
        return cls([[K(x) for x in r] for r in rows], K.zero(), K.one())

    @classmethod
    def rational(cls, rows: Sequence[Sequence]) -> ExactMatrix:
        return cls([[Fraction(x) for x in r] for r in rows], Fraction(0), Fraction(1))

    @classmethod
    def identity(cls, n: int, zero, one) -> ExactMatrix:
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)], zero, one)

    def like(self, rows) -> ExactMatrix:
        return ExactMatrix(rows, self.zero, self.one)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactMatrix) and self.rows == other.rows

    def __repr__(self) -> str:
        return "ExactMatrix([" + ", ".join("[" + ", ".join(map(str, r)) + "]"
                                           for r in self.rows) + "])"

    def transpose(self) -> ExactMatrix:
        return self.like([[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int] | None = None) -> ExactMatrix:
        cols = range(self.ncols) if cols is None else cols
        return self.like([[self.rows[i][j] for j in cols] for i in rows])

    def column(self, j: int) -> list:
        return [r[j] for r in self.rows]

    def map(self, fn: Callable) -> ExactMatrix:
        return self.like([[fn(x) for x in r] for r in self.rows])

    def __matmul__(self, other) -> ExactMatrix:
        if isinstance(other, ExactMatrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = [other.column(j) for j in range(other.ncols)]
            return self.like([[_dot(r, c, self.zero) for c in cols] for r in self.rows])
        vec = list(other)
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        return [_dot(r, vec, self.zero) for r in self.rows]

    def is_identity(self) -> bool:
        return self.nrows == self.ncols and all(
            self.rows[i][j] == (self.one if i == j else self.zero)
            for i in range(self.nrows) for j in range(self.ncols))

    # elimination ------------------------------------------------------
    def _bareiss(self) -> tuple[list[list], list[int], int]:
        """Fraction-free row echelon form.

        Returns (reduced rows, pivot columns, sign of the row permutation).
        """
        m = [list(r) for r in self.rows]
        prev = self.one
        pivots: list[int] = []
        sign = 1
        r = 0
        for c in range(self.ncols):
            piv = next((i for i in range(r, self.nrows) if m[i][c] != self.zero), None)
            if piv is None:
                continue
            if piv != r:
                m[r], m[piv] = m[piv], m[r]
                sign = -sign
            for i in range(r + 1, self.nrows):
                for j in range(c + 1, self.ncols):
                    m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) / prev
                m[i][c] = self.zero
            prev = m[r][c]
            pivots.append(c)
            r += 1
            if r == self.nrows:
                break
        return m, pivots, sign

    def rank(self) -> int:
        return len(self._bareiss()[1])

    def det(self):
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        if self.nrows == 0:
            return self.one
        m, pivots, sign = self._bareiss()
        if len(pivots) < self.nrows:
            return self.zero
        d = m[-1][-1]
        return d if sign == 1 else -d

    def inverse(self) -> ExactMatrix:
        """Gauss-Jordan inverse."""
        n = self.nrows
        if n != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        aug = [list(r) + [self.one if i == j else self.zero for j in range(n)]
               for i, r in enumerate(self.rows)]
        for c in range(n):
            piv = next((i for i in range(c, n) if aug[i][c] != self.zero), None)
            if piv is None:
                raise SingularMatrixError("matrix is singular")
            aug[c], aug[piv] = aug[piv], aug[c]
            inv = self.one / aug[c][c]
            aug[c] = [x * inv for x in aug[c]]
            for i in range(n):
                if i != c and aug[i][c] != self.zero:
                    f = aug[i][c]
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
        return self.like([r[n:] for r in aug])

    def adjugate(self) -> ExactMatrix:
        """adj(A) with A·adj(A) = det(A)·I; computed as det·A^{-1} when invertible."""
        d = self.det()
        if d == self.zero:
            return self.adjugate_by_cofactors()
        return self.inverse().map(lambda x: x * d)

    def adjugate_by_cofactors(self) -> ExactMatrix:
        """Adjugate straight from the cofactor definition (independent route)."""
        n = self.nrows
        if n != self.ncols:
            raise ValueError("adjugate of a non-square matrix")
        if n == 1:
            return self.like([[self.one]])
        out = [[self.zero] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = self.submatrix([r for r in range(n) if r != j],
                                       [c for c in range(n) if c != i])
                c = minor.det()
                out[i][j] = c if (i + j) % 2 == 0 else -c
        return self.like(out)


def _dot(a, b, zero):
    s = zero
    for x, y in zip(a, b):
        if x != zero and y != zero:
            s = s + x * y
    return s
