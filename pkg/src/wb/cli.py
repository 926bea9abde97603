"""The ``wb`` command line: one subcommand per library operation, JSON on stdout.

Exit status 0 on success, 1 on a domain error (bad formula, failed premise,
...), 2 on a usage error.  Every document carries ``"schema": 1``.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import deltaprime, interp, lam, models, nip, randgen, valued
from .algebra.gf import prime_power
from .algebra.ratfunc import function_field
from .logic import parser as fparser
from .logic import prenex
from .logic.syntax import Signature, Var, builtin_signature, free_vars, size, term_vars

SCHEMA = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# input helpers


def _text(arg: str) -> str:
    """The argument itself, or the contents of the file it names."""
    if arg and len(arg) < 4096 and os.path.isfile(arg):
        return Path(arg).read_text()
    return arg


def _signature(name: str) -> Signature:
    if name.endswith(".json"):
        return Signature.from_json(json.loads(Path(name).read_text()))
    try:
        return builtin_signature(name)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None


def _formula(text: str, sig: Signature):
    return fparser.parse_formula(_text(text).strip(), sig)


def _field(p: int, names: str):
    try:
        ok = p > 1 and prime_power(p) is not None
    except ValueError:
        ok = False
    if not ok:
        raise UsageError(f"--p must be a prime power, got {p}")
    vs = tuple(v.strip() for v in names.split(",") if v.strip())
    return function_field(p, vs)


def _elements(K, text: str | None) -> list:
    if text is None or not text.strip():
        return []
    return [K(x.strip()) for x in text.split(";") if x.strip()]


def _range(text: str) -> list:
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError:
        raise UsageError(f"range must look like 0..30, got {text!r}") from None
    if hi < lo:
        raise UsageError("range is empty")
    return list(range(lo, hi + 1))


def _vectors(text: str) -> list:
    try:
        return [[Fraction(c.strip()) for c in part.split(",")] for part in text.split(";")]
    except ValueError:
        raise UsageError(f"bad vector list {text!r}") from None


def _split(args, f):
    xs, ys = nip.parse_split(args.split)
    return nip.split_variables(f, xs, ys)


def _tuples_arg(S, vs, text: str) -> list:
    out = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        toks = [t.strip() for t in part.split(",")]
        if len(toks) != len(vs):
            raise UsageError(f"tuple {part!r} must have {len(vs)} entries")
        out.append(tuple(S.element(v.sort, int(t) if t.lstrip("-").isdigit() else t)
                         for v, t in zip(vs, toks)))
    return out


def _assignment(S, f, text: str | None) -> dict:
    env = {}
    if not text:
        return env
    fv = {v.name: v for v in free_vars(f)}
    for part in text.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise UsageError(f"assignment must look like x=2, got {part!r}")
        name, val = (s.strip() for s in part.split("=", 1))
        v = fv.get(name.split(":")[0])
        if v is None:
            continue
        env[v.key] = S.element(v.sort, int(val) if val.lstrip("-").isdigit() else val)
    return env


# ---------------------------------------------------------------------------
# logic commands


def cmd_parse(args):
    sig = _signature(args.sig)
    f = _formula(args.formula, sig)
    return {"formula": fparser.render(f), "free": sorted(v.key for v in free_vars(f)), "size": size(f)}


def cmd_prenex(args):
    sig = _signature(args.sig)
    f = _formula(args.formula, sig)
    g = prenex.to_prenex(f)
    return {"prenex": fparser.render(g), "class": prenex.classify_fragment(g).to_json(),
            "qr": prenex.quantifier_rank(g)}


def cmd_qr(args):
    f = _formula(args.formula, _signature(args.sig))
    return {"qr": prenex.quantifier_rank(f)}


def cmd_fragment(args):
    f = _formula(args.formula, _signature(args.sig))
    g = f if prenex.is_prenex(f) or args.no_prenex else prenex.to_prenex(f)
    out = {"class": prenex.classify_fragment(g, args.measure).to_json(), "prenex_input": prenex.is_prenex(f)}
    if args.kind:
        if args.n is None:
            raise UsageError("--kind needs --n")
        out["member"] = prenex.in_class(g, args.kind, args.n, args.exact, args.measure)
    return out


def _instance(args):
    spec = args.interp
    if spec.endswith(".json"):
        I = interp.Interpretation.from_json(json.loads(Path(spec).read_text()))
        if not (args.src and args.dst and args.map):
            raise UsageError("an interpretation file needs --src, --dst and --map")
        A, B = models.load_structure(args.src), models.load_structure(args.dst)
        phi = interp.load_map(args.map, I, A, B)
        params = I.param_values
        return interp.Instance(I, A, B, phi, params)
    inst = interp.builtin_instance(spec)
    if args.src:
        inst.A = models.load_structure(args.src)
    if args.dst:
        inst.B = models.load_structure(args.dst)
    if args.map:
        inst.phi = interp.load_map(args.map, inst.I, inst.A, inst.B)
    return inst


def cmd_translate(args):
    I = interp.load_interpretation(args.interp)
    if args.term:
        t = fparser.parse_term(_text(args.term).strip(), I.source, expected=I.home_sort)
        psi = interp.translate_term(I, t, args.mode)
        return {"translation": fparser.render(psi), "kind": "term",
                "variables": {x.key: [v.key for v in vs] for x, vs in interp.translation_variables(I, t).items()},
                "result": [f"y_{i + 1}:{s}" for i, s in enumerate(I.coord_sorts)],
                "params": [v.key for v in I.params],
                "class": prenex.classify_fragment(prenex.to_prenex(psi)).to_json()}
    if not args.formula:
        raise UsageError("translate needs --formula or --term")
    f = _formula(args.formula, I.source)
    psi = interp.translate_formula(I, f, args.mode, args.strategy)
    return {"translation": fparser.render(psi), "kind": "formula", "mode": args.mode,
            "strategy": args.strategy,
            "variables": {x.key: [v.key for v in vs] for x, vs in interp.translation_variables(I, f).items()},
            "params": [v.key for v in I.params],
            "source_class": str(interp.source_class(f)),
            "class": prenex.classify_fragment(prenex.to_prenex(psi)).to_json()}


def _corpus_formulas(spec: str, sig: Signature, seed: int) -> list:
    if spec.startswith("random:"):
        parts = spec.split(":")
        try:
            count = int(parts[1])
            qr = int(parts[2]) if len(parts) > 2 else 3
        except (IndexError, ValueError):
            raise UsageError("random corpus must look like random:N or random:N:QR") from None
        rng = randgen.make_rng(seed)
        home = sig.sorts[0]
        free = [Var("x", home), Var("y", home)]
        return [randgen.random_formula(rng, sig, free, qr, size=8) for _ in range(count)]
    text = _text(spec)
    return [fparser.parse_formula(line, sig) for line in text.splitlines()
            if line.strip() and not line.lstrip().startswith(";")]


def cmd_verify_interp(args):
    inst = _instance(args)
    if args.corrupt:
        inst = interp.Instance(interp.corrupt_function(inst.I, args.corrupt), inst.A, inst.B, inst.phi,
                               inst.param_values)
    if args.params:
        inst.param_values = tuple(int(x) for x in args.params.split(","))
    corpus = _corpus_formulas(args.corpus, inst.I.source, args.seed) if args.corpus else []
    report = interp.verify_interpretation(inst, corpus)
    report["corpus_size"] = len(corpus)
    report["_exit"] = 0 if report["ok"] else 1
    return report


def cmd_eval(args):
    S = models.load_structure(args.structure)
    if args.term:
        t = fparser.parse_term(_text(args.term).strip(), S.signature)
        env = {}
        for part in (args.assign or "").split(","):
            if "=" in part:
                name, val = (s.strip() for s in part.split("=", 1))
                for v in term_vars(t):
                    if v.name == name:
                        env[v.key] = S.element(v.sort, int(val) if val.isdigit() else val)
        x = models.eval_term(S, t, env)
        return {"value": x, "label": S.label(t.sort, x)}
    if not args.formula:
        raise UsageError("eval needs --formula or --term")
    f = _formula(args.formula, S.signature)
    env = _assignment(S, f, args.assign)
    if args.free is not None:
        names = [n.strip() for n in args.free.split(",") if n.strip()]
        fv = {v.name: v for v in free_vars(f)}
        missing = [n for n in names if n not in fv]
        if missing:
            raise nip.SplitError(f"variables {missing} are not free in the formula")
        free = tuple(fv[n] for n in names)
        params = {k: v for k, v in env.items() if k not in {x.key for x in free}}
        out = models.define_set(S, f, params, free)
        return {"set": sorted(list(t) for t in out), "count": len(out)}
    return {"value": models.eval_formula(S, f, env)}


# ---------------------------------------------------------------------------
# lambda commands


def cmd_lambda(args):
    K = _field(args.p, args.vars)
    a = K(args.a)
    if args.b is None:
        lc = lam.ambient_lambda(a)
        names = list(K.names)
    else:
        b = _elements(K, args.b)
        lc = lam.lambda_coords(a, b, K)
        names = [f"b{i + 1}" for i in range(len(b))]
    return {"defined": lc.defined, "coords": lc.as_dict(names),
            "reconstructs": lc.reconstruct() == a if lc.defined else None}


def cmd_pindep(args):
    K = _field(args.p, args.vars)
    b = _elements(K, args.elements)
    r = lam.is_p_independent(b, K)
    d = lam.is_p_independent_direct(b, K)
    j = lam.is_p_independent_jacobian(b, K)
    return {"independent": r, "direct": d, "jacobian": j, "agree": r == d == j}


def cmd_lrewrite(args):
    K = _field(args.p, args.vars)
    seq = [[K(x.strip()) for x in part.split(",")] for part in args.seq.split(";") if part.strip()]
    params = [K(x.strip()) for x in (args.params or "").split(",") if x.strip()]
    data = lam.support_sequence(seq, params, K)
    N, m = len(seq[0]), len(params)
    T = lam.term_field(K.q, N, m)
    fs = [T(x.strip()) for x in args.terms.split(";") if x.strip()]
    n = data.l if args.n is None else args.n
    if n >= len(seq):
        raise UsageError(f"index {n} is outside the sequence")
    res = lam.lambda_rewrite(fs, data, n)
    names = [f"f{i}" for i in range(1, len(fs))]
    return {"support": data.report(), "n": n, "coords": res.coords.as_dict(names),
            "direct": res.direct.as_dict(names), "agree": res.agree, "mu": [i + 1 for i in res.mu],
            "basis": [str(x) for x in res.basis]}


def cmd_lclose(args):
    K = _field(args.p, args.vars)
    rep = lam.lambda_closure(_elements(K, args.gens), K(args.b), args.max_iter, K)
    return {"generators": [str(g) for g in rep.generators], "added": [str(g) for g in rep.added],
            "iterations": rep.iterations, "stabilized": rep.stabilized, "inconclusive": rep.inconclusive}


def cmd_lclosed(args):
    K = _field(args.p, args.vars)
    rep = lam.is_lambda_closed(_elements(K, args.gens), K, args.degree)
    return {"closed": rep.closed, "witness": rep.witness, "checked": rep.checked}


# ---------------------------------------------------------------------------
# valued commands


def _sequence(args):
    slopes = _vectors(args.slopes)
    intercepts = _vectors(args.intercepts) if args.intercepts else [[0] * len(slopes[0]) for _ in slopes]
    k = len(slopes[0])
    names = args.vars or ("t" if k == 1 else ",".join(f"t{i + 1}" for i in range(k)))
    K = _field(args.p, names)
    if K.nvars != k:
        raise UsageError(f"value vectors have length {k} but the field has {K.nvars} variables")
    coeffs = _elements(K, args.coeffs) if args.coeffs else [K.one() for _ in slopes]
    N = args.N if args.N is not None else len(slopes)
    if not (len(slopes) == len(intercepts) == len(coeffs) == N):
        raise UsageError("--N, --slopes, --intercepts and --coeffs disagree on N")
    return K, valued.AffineValueSequence(intercepts, slopes, coeffs, K)


def cmd_dominant(args):
    K, s = _sequence(args)
    P = valued.parse_polynomial(args.poly, K, s.N)
    res = valued.dominant_monomial(P, s)
    rng_ = _range(args.range)
    checked = [i for i in rng_ if i >= res.i_star]
    oracle = valued.dominance_oracle(P, s, checked)
    agree = all(valued.predict(res, s, i) == o for i, o in zip(checked, oracle))
    below = [i for i in rng_ if i < res.i_star]
    differs = [i for i, o in zip(below, valued.dominance_oracle(P, s, below))
               if valued.predict(res, s, i) != o]
    out = res.to_json()
    out.update({"oracle_agreement": agree, "checked": len(checked), "differs_below_threshold": differs,
                "q": valued.residue_monomial_str(res.alpha, res.r)})
    return out


def cmd_acv_check(args):
    K, s = _sequence(args)
    polys = [valued.parse_polynomial(x.strip(), K, s.N) for x in args.polys.split(";") if x.strip()]
    rep = valued.acv_instance_check(s, polys, _range(args.range))
    rep["_exit"] = 0 if rep["satisfied"] or not rep["premise"] else 1
    return rep


def cmd_deltaprime(args):
    f = _formula(args.formula, _signature(args.sig))
    return deltaprime.delta_prime_classify(f, args.n).to_json()


def cmd_normalize_closed(args):
    f = _formula(args.formula, _signature(args.sig))
    g = deltaprime.normalize_closed_terms(f)
    return {"formula": fparser.render(g)}


# ---------------------------------------------------------------------------
# NIP commands


def _nip_input(args):
    S = models.load_structure(args.structure)
    f = _formula(args.formula, S.signature)
    xs, ys = _split(args, f)
    if getattr(args, "dual", False):
        xs, ys = ys, xs
    return S, f, xs, ys


def cmd_vc(args):
    S, f, xs, ys = _nip_input(args)
    T = nip.trace_family(S, f, xs, ys)
    a, b = nip.vc_dimension(T), nip.vc_dimension_by_shattered_sets(T)
    out = {"vc": a, "vc_shattered_sets": b, "agree": a == b, "ground": len(T.ground),
           "members": len(T.members)}
    if args.family:
        out["family"] = T.to_json()
    return out


def cmd_ip_search(args):
    S, f, xs, ys = _nip_input(args)
    w = nip.ip_witness_search(S, f, xs, ys, args.k)
    return {"k": args.k, "found": w is not None, "witness": w.to_json() if w else None}


def cmd_alt(args):
    if args.trace is not None:
        trace = [t.strip().lower() in ("1", "t", "true") for t in args.trace.split(",") if t.strip()]
        return {"alternation": nip.alternation_number(trace), "length": len(trace)}
    if not (args.structure and args.formula and args.split and args.sequence):
        raise UsageError("alt needs --trace, or --structure, --formula, --split and --sequence")
    S, f, xs, ys = _nip_input(args)
    seq = _tuples_arg(S, xs, args.sequence)
    if args.param:
        (d,) = _tuples_arg(S, ys, args.param)
        data = nip.alternation_along(S, f, xs, ys, seq, d)
        return {"alternation": nip.alternation_number(data.trace), "trace": data.trace,
                "param": list(d), "length": len(seq)}
    best, d = nip.max_alternation(S, f, xs, ys, seq)
    return {"alternation": best, "param": list(d) if d is not None else None, "length": len(seq),
            "maximal": True}


def cmd_baldwin_saxl(args):
    S = models.load_structure(args.structure)
    f = _formula(args.formula, S.signature)
    xs, ys = _split(args, f)
    if len(xs) != 1:
        raise UsageError("the group variable part of the split must be a single variable")
    try:
        sort, op, ident = (x.strip() for x in args.group.split(","))
    except ValueError:
        raise UsageError("--group must look like SORT,OP,IDENTITY") from None
    group = nip.GroupSpec(sort, op, ident)
    if args.params:
        params = _tuples_arg(S, ys, args.params)
    else:
        params = list(itertools.product(*(S.carrier(v.sort) for v in ys)))
    rep = nip.baldwin_saxl_check(S, group, f, xs[0], ys, params, args.n)
    return rep.to_json()


# ---------------------------------------------------------------------------
# corpus runner


def _lookup(doc, path: str):
    cur = doc
    for part in path.split("."):
        if isinstance(cur, list):
            cur = cur[int(part)]
        else:
            cur = cur[part]
    return cur


def _run_case(path: Path) -> dict:
    name = path.stem
    try:
        case = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        return {"case": name, "ok": False, "problems": [f"unreadable case: {exc}"]}
    if "argv" not in case or "expect" not in case:
        return {"case": name, "ok": False, "problems": ["missing argv or expect"]}
    code, doc = dispatch(case["argv"])
    problems = []
    want_code = case.get("exit", 0)
    if code != want_code:
        problems.append(f"exit {code}, expected {want_code}")
    for key, want in case["expect"].items():
        try:
            got = _lookup(doc, key)
        except (KeyError, IndexError, ValueError, TypeError):
            problems.append(f"missing key {key}")
            continue
        if got != want:
            problems.append(f"{key}: got {got!r}, expected {want!r}")
    return {"case": name, "ok": not problems, "problems": problems}


def run_corpus(directory: str, suite: str | None = None) -> dict:
    root = Path(directory)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus directory {directory} does not exist")
    if suite:
        root = root / suite
        if not root.is_dir():
            raise FileNotFoundError(f"suite {suite} not found in {directory}")
    files = sorted(root.rglob("*.json"))
    with ThreadPoolExecutor(max_workers=4) as pool:
        results = list(pool.map(_run_case, files))
    failed = [r["case"] for r in results if not r["ok"]]
    return {"total": len(results), "passed": len(results) - len(failed), "failed": failed,
            "cases": results}


def cmd_corpus(args):
    rep = run_corpus(args.dir, args.suite)
    rep["_exit"] = 0 if not rep["failed"] else 1
    return rep


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wb", description="Formulas, interpretations, lambda-functions, valuations and NIP checks.")
    p.add_argument("--seed", type=int, default=None, help="random seed (WB_SEED overrides the default)")
    p.add_argument("--output", help="also write the JSON report to this file")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        return sp

    for name, fn, help_ in [("parse", cmd_parse, "parse and print a formula"),
                            ("prenex", cmd_prenex, "prenex normal form"),
                            ("qr", cmd_qr, "quantifier rank")]:
        sp = add(name, fn, help_)
        sp.add_argument("--formula", required=True)
        sp.add_argument("--sig", default="ring")

    sp = add("fragment", cmd_fragment, "classify into QF / E(n) / A(n)")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--sig", default="ring")
    sp.add_argument("--measure", choices=["blocks", "depth"], default="blocks")
    sp.add_argument("--kind", choices=["E", "A"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--exact", action="store_true")
    sp.add_argument("--no-prenex", action="store_true", help="classify the input as given")

    sp = add("translate", cmd_translate, "translate a formula or term through an interpretation")
    sp.add_argument("--interp", required=True)
    sp.add_argument("--formula")
    sp.add_argument("--term")
    sp.add_argument("--mode", choices=list(interp.MODES), default=interp.EXISTENTIAL)
    sp.add_argument("--strategy", choices=list(interp.STRATEGIES), default="fixed")

    sp = add("verify-interp", cmd_verify_interp, "check an interpretation on finite structures")
    sp.add_argument("--interp", required=True)
    sp.add_argument("--src")
    sp.add_argument("--dst")
    sp.add_argument("--map")
    sp.add_argument("--corpus", help="formula file (one per line) or random:N[:QR]")
    sp.add_argument("--params", help="comma-separated parameter values")
    sp.add_argument("--corrupt", help="corrupt the definition of this function (negative control)")

    sp = add("eval", cmd_eval, "evaluate a formula or term in a finite structure")
    sp.add_argument("--structure", required=True)
    sp.add_argument("--formula")
    sp.add_argument("--term")
    sp.add_argument("--assign")
    sp.add_argument("--free", help="comma-separated variables: print the defined set instead")

    def field_args(sp):
        sp.add_argument("--p", type=int, required=True, help="characteristic or field size q")
        sp.add_argument("--vars", default="t", help="comma-separated field variables")

    sp = add("lambda", cmd_lambda, "lambda-coordinates of a in the basis given by b")
    field_args(sp)
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", help="semicolon-separated tuple; default: the field variables")

    sp = add("pindep", cmd_pindep, "p-independence by three methods")
    field_args(sp)
    sp.add_argument("--elements", required=True)

    sp = add("lrewrite", cmd_lrewrite, "lambda-rewriting through the support basis")
    field_args(sp)
    sp.add_argument("--seq", required=True, help="tuples separated by ';', entries by ','")
    sp.add_argument("--params", default="")
    sp.add_argument("--terms", required=True, help="f0;f1;... in X1..XN, Y1..Ym")
    sp.add_argument("--n", type=int)

    sp = add("lclose", cmd_lclose, "lambda-closure of F(b)")
    field_args(sp)
    sp.add_argument("--gens", default="")
    sp.add_argument("--b", required=True)
    sp.add_argument("--max-iter", type=int, default=5)

    sp = add("lclosed", cmd_lclosed, "is the subfield lambda-closed")
    field_args(sp)
    sp.add_argument("--gens", default="")
    sp.add_argument("--degree", type=int)

    def seq_args(sp):
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--N", type=int)
        sp.add_argument("--slopes", required=True, help="vectors separated by ';'")
        sp.add_argument("--intercepts")
        sp.add_argument("--coeffs")
        sp.add_argument("--vars")
        sp.add_argument("--range", default="0..30")

    sp = add("dominant", cmd_dominant, "dominant monomial along an affine value sequence")
    seq_args(sp)
    sp.add_argument("--poly", required=True)

    sp = add("acv-check", cmd_acv_check, "check the value/ac condition on polynomials")
    seq_args(sp)
    sp.add_argument("--polys", required=True, help="polynomials separated by ';'")

    sp = add("deltaprime", cmd_deltaprime, "normal-form classification in the valued-field language")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--sig", default="valued-field")

    sp = add("normalize-closed", cmd_normalize_closed, "rewrite closed home-field atoms of a sentence")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--sig", default="valued-field")

    def nip_args(sp, required=True):
        sp.add_argument("--structure", required=required)
        sp.add_argument("--formula", required=required)
        sp.add_argument("--split", required=required, help="x1,x2|y1,y2")

    sp = add("vc", cmd_vc, "VC dimension of the trace family")
    nip_args(sp)
    sp.add_argument("--dual", action="store_true")
    sp.add_argument("--family", action="store_true", help="include the trace family")

    sp = add("ip-search", cmd_ip_search, "search for k shattered points")
    nip_args(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--dual", action="store_true")

    sp = add("alt", cmd_alt, "alternation number")
    nip_args(sp, required=False)
    sp.add_argument("--trace")
    sp.add_argument("--sequence")
    sp.add_argument("--param")

    sp = add("baldwin-saxl", cmd_baldwin_saxl, "intersections of a definable family of subgroups")
    nip_args(sp)
    sp.add_argument("--group", required=True, help="SORT,OP,IDENTITY")
    sp.add_argument("--params")
    sp.add_argument("--n", type=int, required=True)

    sp = add("corpus", cmd_corpus, "run a directory of expectation cases")
    sp.add_argument("--dir", required=True)
    sp.add_argument("--suite")
    return p


_DOMAIN_ERRORS = (ValueError, KeyError, ZeroDivisionError, FileNotFoundError, OSError, TypeError)


def dispatch(argv) -> tuple[int, dict]:
    """Run one command; returns (exit status, JSON document)."""
    argv = list(argv)
    doc = {"schema": SCHEMA}
    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required")
        doc["command"] = args.command
        seed = args.seed if args.seed is not None else randgen.seed_from_env()
        args.seed = seed
        doc["seed"] = seed
        for knob in ("n", "k", "max_iter"):
            val = getattr(args, knob, None)
            if val is not None and val < 0:
                raise UsageError(f"--{knob.replace('_', '-')} must be non-negative")
        result = args.func(args)
    except UsageError as exc:
        doc["error"] = {"type": "usage", "message": str(exc)}
        return 2, doc
    except _DOMAIN_ERRORS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        doc["error"] = {"type": type(exc).__name__, "message": str(msg)}
        return 1, doc
    code = result.pop("_exit", 0) if isinstance(result, dict) else 0
    doc.update(result)
    if getattr(args, "output", None):
        Path(args.output).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return code, doc


def main(argv=None) -> int:
    code, doc = dispatch(sys.argv[1:] if argv is None else argv)
    print(json.dumps(doc, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
