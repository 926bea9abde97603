"""Hand-written corpus for the valued-field normal-form classifier and the
closed-term normalizer.  Shared by the unit tests and the acceptance gate.

Classification rows: (formula, n, accepted, shapes or offending node).
Normalization rows: (sentence, expected rendering or the exception type).
"""

from wb.deltaprime import NotClosedError

CLASSIFY = [
    # shape 1 combinations
    ("(or (= x:K 0K) (not (= (mul x:K y:K) 0K)))", 1, True, [1, 1]),
    ("(and (= (add x:K 1K) 0K) (not (= x:K y:K)))", 0, True, [1, 1]),
    ("(= (lam_1_1 x:K y:K) 0K)", 0, True, [1]),
    # shape 2
    ("(exists z:k (= (mulk z:k (ac x:K)) (ac y:K)))", 1, True, [2]),
    ("(= (ac (mul x:K y:K)) (mulk (ac x:K) (ac y:K)))", 0, True, [2]),
    ("(exists z:k (exists w:k (= (addk (mulk z:k z:k) (mulk w:k w:k)) (ac x:K))))", 1, True, [2]),
    # shape 3
    ("(exists g:G (leG (v x:K) g:G))", 1, True, [3]),
    ("(ltG (v x:K) (addG (v y:K) (v y:K)))", 0, True, [3]),
    # mixed combinations, implications and negations pushed through
    ("(or (= x:K 0K) (exists g:G (ltG (v x:K) (addG g:G g:G))))", 1, True, [1, 3]),
    ("(implies (= x:K 0K) (= (ac y:K) 1k))", 0, True, [1, 2]),
    ("(not (and (= x:K 0K) (leG (v x:K) 0G)))", 0, True, [1, 3]),
    # rejections
    ("(exists z:K (= (mul z:K z:K) x:K))", 1, False, "(exists z:K (= (mul z z) x:K))"),
    ("(forall g:G (exists h:G (leG (v x:K) (addG g:G h:G))))", 1, False,
     "(forall g:G (exists h:G (leG (v x:K) (addG g h))))"),
    ("(= (res x:K) 0k)", 1, False, "(= (res x:K) 0k)"),
    ("(or (= x:K 0K) (exists z:k (forall w:k (= z:k (mulk w:k (ac x:K))))))", 1, False,
     "(exists z:k (forall w:k (= z (mulk w (ac x:K)))))"),
]

NORMALIZE = [
    ("(= (add 1K 1K) 0K)", "(= (addk 1k 1k) 0k)"),
    ("(= (lam_1_1 1K 1K) 0K)", "top"),
    ("(exists g:G (leG g:G 0G))", "(exists g:G (leG g 0G))"),
    ("(and (= (add 1K 1K) 0K) (not (= 1K 0K)))", "(and (= (addk 1k 1k) 0k) (not (= 1k 0k)))"),
    ("(= x:K 0K)", NotClosedError),
]
