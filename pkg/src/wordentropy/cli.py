"""Command-line front end.

Exit codes: 0 success or check passed, 1 check failed, 2 input error,
3 resource cap reached. Every JSON report carries the invocation
parameters under ``"params"``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import avoidance, cayley, entropy, presentations, random_groups
from .errors import NonConvergence, NotTranslationApparent, PreconditionError, ResourceLimitExceeded
from .fileformats import (
    InputError,
    format_presentation,
    parse_rational,
    read_presentation,
    read_weights,
)
from .words import Presentation, WeightVector, format_word

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {(k if isinstance(k, str) else _key(k)): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, WeightVector):
        return [str(v) for v in obj.per_generator]
    if hasattr(obj, "item") and callable(obj.item):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def _key(k):
    if isinstance(k, tuple) and all(isinstance(x, int) for x in k):
        try:
            return format_word(k)
        except ValueError:
            return ",".join(map(str, k))
    return str(k)


def _word_text(w, m):
    return format_word(w) if m <= 26 else ",".join(map(str, w))


def _emit(report: dict, args, out=None):
    out = out or sys.stdout
    report = {"params": _params(args), **report}
    if getattr(args, "format", "json") == "text":
        for k, v in report.items():
            out.write(f"{k}: {_jsonable(v)}\n")
    else:
        json.dump(_jsonable(report), out, indent=2, sort_keys=False)
        out.write("\n")


def _params(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func" and not callable(v)}


def _weights(spec: Optional[str], m: int) -> WeightVector:
    if spec is None or spec == "uniform":
        return WeightVector.uniform(m)
    if spec == "ones":
        return WeightVector.ones(m)
    if os.path.exists(spec):
        return read_weights(spec, m)
    try:
        ws = tuple(parse_rational(tok) for tok in spec.split(","))
    except InputError:
        raise InputError(f"--weights: {spec!r} is neither a file, 'uniform', 'ones' nor a rational list") from None
    if len(ws) != m or any(v <= 0 for v in ws):
        raise InputError(f"--weights needs {m} positive rationals")
    return WeightVector(ws)


def _lam(text: str) -> Fraction:
    lam = parse_rational(text)
    if not 0 < lam < 1:
        raise InputError(f"lambda must lie in (0, 1), got {lam}")
    return lam


# ------------------------------------------------------------- commands


def cmd_check(args) -> int:
    p = read_presentation(args.presentation)
    lam = _lam(args.lam)
    if args.condition == "cprime":
        res = presentations.check_c_prime(p.symmetrize(), lam)
        report = {"condition": f"C'({lam})", "holds": res.holds,
                  "witness": None if res.witness is None else
                  {"piece": _word_text(res.witness[0], p.m), "relator": _word_text(res.witness[1], p.m)}}
        ok = res.holds
    elif args.condition == "even":
        ev = presentations.check_even_distribution(p.symmetrize(), lam)
        report = {"condition": "even distribution", "holds": ev.holds,
                  "run": ev.run, "halfwin": ev.halfwin, "freqwin": ev.freqwin, "witness": ev.witness}
        ok = ev.holds
    else:
        rep = presentations.check_translation_apparent(p, lam)
        cp = rep.c_prime
        report = {
            "condition": f"{lam}-translation-apparent",
            "holds": rep.holds,
            "causes": rep.causes,
            "symmetrized_by_check": rep.symmetrized_by_check,
            "cyclically_reduced": rep.cyclically_reduced,
            "c_prime": None if cp is None else {
                "holds": cp.holds,
                "witness": None if cp.witness is None else
                {"piece": _word_text(cp.witness[0], p.m), "relator": _word_text(cp.witness[1], p.m)}},
            "even_distribution": None if rep.even is None else {
                "run": rep.even.run, "halfwin": rep.even.halfwin, "freqwin": rep.even.freqwin,
                "witness": rep.even.witness},
        }
        ok = rep.holds
    if not p.relators:
        report["note"] = "no relators: every condition holds vacuously"
    _emit(report, args)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_entropy_free(args) -> int:
    w = _weights(args.weights, args.m)
    h = entropy.free_entropy(w, args.m)
    if args.format == "text":
        print(f"{h:.12f}")
    else:
        _emit({"weights": w, "h": h, "method": "free_closed_form"}, args)
    return EXIT_OK


def cmd_entropy_bounds(args) -> int:
    p = read_presentation(args.presentation)
    w = _weights(args.weights, p.m)
    lam = _lam(args.lam)
    try:
        est = entropy.entropy_bounds(p, lam, w, require=not args.force)
    except NotTranslationApparent as exc:
        _emit({"error": str(exc)}, args)
        return EXIT_FAIL
    _emit({"h_lo": est.h_lo, "h_hi": est.h_hi, "gap": est.gap, "methods": est.methods,
           "hypotheses": est.hypotheses, "rationalization": est.rationalization}, args)
    return EXIT_OK


def cmd_entropy_ball(args) -> int:
    p = read_presentation(args.presentation)
    w = _weights(args.weights, p.m)
    R = parse_rational(args.radius)
    prof = cayley.ball_profile(p, w, R, args.node_limit)
    counts, total = {}, 0
    for d in sorted(prof):
        total += prof[d]
        counts[str(d)] = total
    growth = {k: (math.log(v) / float(Fraction(k)) if Fraction(k) > 0 else None) for k, v in counts.items()}
    _emit({"ball_count": total, "cumulative": counts, "log_ratio": growth,
           "equality": cayley.ElementStore(p).reason}, args)
    return EXIT_OK


def cmd_count(args) -> int:
    if args.presentation:
        p = read_presentation(args.presentation)
        F = avoidance.build_forbidden_set(p, _lam(args.lam))
        m = p.m
    else:
        m = args.m
        F = avoidance.make_forbidden_set(m, avoidance.inverse_pairs(m))
    w = _weights(args.weights or "ones", m)
    if not w.integral:
        raise InputError("count needs integer weights")
    series = avoidance.count_avoiding(F, w, args.n_max, mode=args.mode)
    _emit({"patterns": len(F), "f": series.f, "g": series.g}, args)
    return EXIT_OK


def cmd_growth(args) -> int:
    p = read_presentation(args.presentation) if args.presentation else Presentation(args.m, ())
    lam = _lam(args.lam)
    w = _weights(args.weights or "ones", p.m)
    if not w.integral:
        raise InputError("growth needs integer weights")
    report = {"M0": math.exp(entropy.free_entropy(w)),
              "p_root": avoidance.p_largest_root(p, lam, w)}
    if not args.no_automaton:
        F = avoidance.build_forbidden_set(p, lam)
        report["automaton_growth"] = avoidance.growth_rate(F, w)
        report["automaton_patterns"] = len(F)
    _emit(report, args)
    return EXIT_OK


def cmd_minimize(args) -> int:
    try:
        res = entropy.minimize_entropy(entropy.free_entropy, args.m, args.tol, max_iter=args.max_iter)
    except NonConvergence as exc:
        _emit({"error": str(exc), "w": exc.result.w.tolist()}, args)
        return EXIT_RESOURCE
    _emit({"w": res.w.tolist(), "w_rational": res.weight_vector(), "h": res.value,
           "iterations": res.iterations, "converged": res.converged}, args)
    return EXIT_OK


def cmd_sample_word(args) -> int:
    rng = random_groups.stream(args.seed, args.ell, 0)
    f = random_groups.sample_cyclically_reduced_word if args.cyclic else random_groups.sample_reduced_word
    word = f(args.m, args.ell, rng)
    if args.format == "text":
        print(_word_text(word, args.m))
    else:
        _emit({"word": _word_text(word, args.m)}, args)
    return EXIT_OK


def cmd_sample_presentation(args) -> int:
    d = parse_rational(args.density) if args.density is not None else Fraction(0)
    try:
        params = random_groups.DensityModelParams(args.m, args.ell, d, args.count, args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    n, bumped = random_groups.relator_count(params)
    p = random_groups.sample_presentation(params)
    text = (f"# sample presentation m={args.m} ell={args.ell} density={d} count={n}"
            f"{' (raised from 0)' if bumped else ''} seed={args.seed}\n") + format_presentation(p)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        sys.stderr.write(f"wrote {n} relators to {args.output}\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_experiment(args) -> int:
    ells = [int(x) for x in args.ells.split(",")]
    report = random_groups.genericity_experiment(args.m, ells, _lam(args.lam), args.trials,
                                                 args.seed, args.threads)
    text = report.to_csv()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        _emit({"csv": args.output, "rows": len(report.rows)}, args)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_demo_nonstrict(args) -> int:
    results = cayley.nonstrict_convexity_demo()
    h = entropy.free_entropy(WeightVector((Fraction(1, 16), Fraction(1, 16))).normalize())
    rows = [{"t": r.t, "weights": list(r.weights), "elements": r.elements,
             "all_distances_equal_two_generator_metric": r.all_equal,
             "mismatches": [[_word_text(x, 2), d] for x, d in r.mismatches]} for r in results]
    ok = all(r.all_equal for r in results)
    _emit({"segment": rows, "conclusion": "metrics coincide along the segment; entropy is constant "
           "there and not strictly convex" if ok else "distance mismatch",
           "entropy_two_generator": h}, args)
    return EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wordentropy", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=["json", "text"], default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=["json", "text"], default=argparse.SUPPRESS)
        return p

    p = common(sub.add_parser("check", help="translation-apparent, C'(lambda) or even-distribution check"))
    p.add_argument("--presentation", required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--condition", choices=["translation", "cprime", "even"], default="translation")
    p.set_defaults(func=cmd_check)

    ent = sub.add_parser("entropy", help="entropy computations").add_subparsers(dest="which", required=True)
    p = common(ent.add_parser("free", help="free-group entropy"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--weights", default="uniform")
    p.set_defaults(func=cmd_entropy_free)
    p = common(ent.add_parser("bounds", help="sandwich bounds for a translation-apparent presentation"))
    p.add_argument("--presentation", required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--weights", default="uniform")
    p.add_argument("--force", action="store_true", help="compute even if the check fails")
    p.set_defaults(func=cmd_entropy_bounds)
    p = common(ent.add_parser("ball", help="exact weighted ball counts"))
    p.add_argument("--presentation", required=True)
    p.add_argument("--weights", default="ones")
    p.add_argument("--radius", required=True)
    p.add_argument("--node-limit", type=int, default=cayley.DEFAULT_NODE_LIMIT)
    p.set_defaults(func=cmd_entropy_ball)

    p = common(sub.add_parser("count", help="avoidance series f(n), g(n)"))
    p.add_argument("--presentation")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--lambda", dest="lam", default="1/16")
    p.add_argument("--weights")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--mode", choices=["automaton", "brute_force"], default="automaton")
    p.set_defaults(func=cmd_count)

    p = common(sub.add_parser("growth", help="p-root and automaton growth rate"))
    p.add_argument("--presentation")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--lambda", dest="lam", default="1/16")
    p.add_argument("--weights")
    p.add_argument("--no-automaton", action="store_true")
    p.set_defaults(func=cmd_growth)

    p = common(sub.add_parser("minimize", help="minimize the free entropy over normalized weights"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=5000)
    p.set_defaults(func=cmd_minimize)

    sam = sub.add_parser("sample", help="random words and presentations").add_subparsers(dest="what", required=True)
    p = common(sam.add_parser("word"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--cyclic", action="store_true")
    p.set_defaults(func=cmd_sample_word)
    p = common(sam.add_parser("presentation"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--density")
    p.add_argument("--count", type=int, help="relator count (density 0 only)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_sample_presentation)

    p = common(sub.add_parser("experiment", help="genericity harness, CSV output"))
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--ells", default="160,320,640,1280")
    p.add_argument("--lambda", dest="lam", default="1/16")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--output")
    p.set_defaults(func=cmd_experiment)

    demo = sub.add_parser("demo", help="worked examples").add_subparsers(dest="name", required=True)
    p = common(demo.add_parser("nonstrict", help="non-strict convexity on a redundant generating set"))
    p.set_defaults(func=cmd_demo_nonstrict)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except ResourceLimitExceeded as exc:
        sys.stderr.write(f"resource cap: {exc}\n")
        return EXIT_RESOURCE
    except (InputError, PreconditionError, ValueError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
