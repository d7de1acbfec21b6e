"""Command-line entry point: ``lacuna <subcommand> ...``.

Exit status: 0 on success, 1 when a check or certificate fails, 2 on usage
errors. Rationals cross the boundary as "p/q" strings.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import numpy as np

from . import coloring, dyadic, lll, sequences, survivor, theta_oracle, vdc
from .errors import LacunaError
from .rational import format_rational, parse_rational

log = logging.getLogger("lacuna")


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    def __init__(self, payload):
        self.payload = payload
        super().__init__("check failed")


@dataclass
class RunConfig:
    subcommand: str
    output: Optional[str] = None
    fmt: str = "json"
    threads: int = 1
    options: dict = field(default_factory=dict)


# argument helpers ---------------------------------------------------------------


def _rational(text):
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational p/q: {text!r}") from exc


def _int_list(text) -> List[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from exc


def _window(text):
    try:
        a, b = text.split(":")
        a, b = int(a), int(b)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"window must be a:b, got {text!r}") from exc
    if b < a:
        raise argparse.ArgumentTypeError("window a:b needs a <= b")
    return a, b


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _sequence(args) -> sequences.LacunarySequence:
    if getattr(args, "s_file", None):
        return sequences.LacunarySequence.from_json(_load_json(args.s_file))
    terms = getattr(args, "terms", None) or getattr(args, "s", None)
    if terms:
        return sequences.validate(terms, getattr(args, "epsilon", None))
    if getattr(args, "epsilon", None) is not None and getattr(args, "count", None):
        return sequences.generate_geometric(args.epsilon, args.count, getattr(args, "start", 1) or 1)
    raise UsageError("give a sequence via --s-file, --terms/--s, or --epsilon with --count")


def _spectrum(args) -> List[int]:
    if getattr(args, "h_file", None):
        data = _load_json(args.h_file)
        if isinstance(data, dict):
            data = data.get("H", data.get("terms"))
        return [int(h) for h in data]
    if getattr(args, "h", None) is not None:
        return args.h
    raise UsageError("give a spectrum via --h or --h-file")


def _certify(cert: survivor.ThetaCertificate, terms) -> None:
    """Independent re-check of a certificate before it is emitted."""
    if not terms:
        return
    prof = theta_oracle.min_dist(cert.theta, terms)
    if prof.min_value != cert.value:
        raise CheckFailed({"error": "oracle disagrees with certificate",
                           "oracle": format_rational(prof.min_value)})
    if cert.delta is not None and prof.min_value < cert.delta:
        raise CheckFailed({"error": "certificate value below delta"})


# subcommands ----------------------------------------------------------------------


def cmd_gen(args):
    return sequences.generate_geometric(args.epsilon, args.count, args.start).to_json()


def cmd_validate(args):
    seq = _sequence(args)
    out = {"valid": True, "length": len(seq), "doubling_span": seq.doubling_span,
           "epsilon": format_rational(seq.epsilon) if seq.epsilon is not None else None}
    if seq.epsilon is not None:
        out["span_bound"] = sequences.span_bound(seq.epsilon)
        out["split_K"] = sequences.split_count(seq.epsilon)
    return out


def cmd_find_theta(args):
    terms = list(_sequence(args).terms)
    if args.grid:
        theta, value = theta_oracle.grid_refine(terms, args.grid)
        method = f"grid:{args.grid}"
    else:
        theta, value = theta_oracle.optimal_theta(terms)
        method = "exact"
    prof = theta_oracle.min_dist(theta, terms)
    if prof.min_value != value:
        raise CheckFailed({"error": "profile disagrees with search"})
    out = prof.to_json()
    out["method"] = method
    return out


def _params(args, seq):
    M = args.M if args.M is not None else max(seq.doubling_span, 4)
    kwargs = {}
    if args.c0 is not None:
        kwargs["c0"] = args.c0
    if args.C1 is not None:
        kwargs["C1"] = args.C1
    return lll.make_params(M, **kwargs)


def cmd_survivor(args):
    seq = _sequence(args)
    n = args.n if args.n is not None else len(seq)
    params = _params(args, seq)
    state = survivor.run(seq, params, n, max_term=args.max_term)
    cert = survivor.extract_theta(state)
    _certify(cert, seq.terms[:n])
    out = cert.to_json()
    out["params"] = params.to_json()
    if args.history:
        out["history"] = [
            {"j": r.j, "n": r.n, "level": r.level, "measure": format_rational(r.measure_after),
             "window_ratio": format_rational(r.window_ratio)} for r in state.history
        ]
    hyp = lll.verify_one_sided_hypothesis(state.window_ratios(), params.h, params.x)
    out["hypothesis"] = hyp.to_json()
    if not hyp:
        raise CheckFailed(out)
    return out


def cmd_warmup(args):
    seq = _sequence(args)
    cert, chain = survivor.warmup_nested(seq.terms, args.n)
    _certify(cert, seq.terms[: cert.n])
    out = cert.to_json()
    out["chain"] = [[format_rational(a), format_rational(b)] for a, b in chain]
    return out


def cmd_pipeline(args):
    cert, summary, _ = survivor.pipeline(args.epsilon, args.count, max_term=args.max_term)
    seq = sequences.generate_geometric(args.epsilon, args.count)
    _certify(cert, seq.terms[: cert.n])
    out = cert.to_json()
    out["summary"] = summary
    return out


def cmd_color(args):
    col = coloring.color_from_theta(args.theta, args.delta, args.window)
    if args.format == "csv":
        return col.to_csv()
    return {"theta": format_rational(col.theta), "k": col.k, "used": col.used(),
            "window": list(col.window), "colors": col.colors.tolist()}


def _read_coloring_csv(path) -> coloring.Coloring:
    with open(path) as fh:
        rows = [(int(r["n"]), int(r["color"])) for r in csv.DictReader(fh)]
    rows.sort()
    ns = [n for n, _ in rows]
    if ns != list(range(ns[0], ns[0] + len(ns))):
        raise UsageError("coloring CSV must cover a contiguous window")
    colors = np.array([c for _, c in rows], dtype=np.int64)
    return coloring.Coloring(ns[0], colors, int(colors.max()) + 1)


def cmd_verify_color(args):
    seq_terms = list(_sequence(args).terms)
    if args.csv:
        col = _read_coloring_csv(args.csv)
        window = args.window or col.window
    else:
        if args.theta is None or args.delta is None or args.window is None:
            raise UsageError("verify-color needs --csv or all of --theta, --delta, --window")
        col = coloring.color_from_theta(args.theta, args.delta, args.window)
        window = args.window
    graph = coloring.DistanceGraphWindow.of(seq_terms, window)
    bad = coloring.verify_proper(col, graph)
    out = {"proper": bad is None, "violation": list(bad) if bad else None,
           "colors": col.k, "used": col.used(), "window": list(window)}
    if bad:
        raise CheckFailed(out)
    return out


def cmd_chromatic(args):
    s = list(_sequence(args).terms)
    chi = coloring.chromatic_exact(coloring.DistanceGraphWindow.of(s, args.window), cap=args.cap)
    if args.format == "json":
        return {"S": s, "window": list(args.window), "chromatic_number": chi}
    return f"{chi}\n"


def cmd_gamma(args):
    return vdc.gamma_lp(_spectrum(args), args.grid).to_json()


def cmd_delta(args):
    return vdc.delta_dp(_spectrum(args), args.period).to_json()


def cmd_check_ruzsa(args):
    if args.random:
        rng = random.Random(args.seed)
        cases = []
        for _ in range(args.random):
            H = [h for h in range(1, args.max_h + 1) if rng.random() < 0.5] or [rng.randint(1, args.max_h)]
            cases.append(H)
    else:
        cases = [_spectrum(args)]
    reports = [vdc.check_ruzsa(H, args.period, args.grid).to_json() for H in cases]
    out = {"seed": args.seed if args.random else None, "cases": reports,
           "passed": all(r["passed"] for r in reports)}
    if not out["passed"]:
        raise CheckFailed(out)
    return out


def cmd_corollary41(args):
    seq = _sequence(args)
    n = args.n if args.n is not None else len(seq)
    params = lll.make_params(max(seq.prefix(n).doubling_span, 4))
    state = survivor.run(seq, params, n, max_term=args.max_term)
    cert = survivor.extract_theta(state)
    _certify(cert, seq.terms[:n])
    rep = vdc.corollary_check(seq, cert, args.grid)
    out = rep.to_json()
    out["theta"] = format_rational(cert.theta)
    if not rep:
        raise CheckFailed(out)
    return out


def cmd_report(args):
    rows = []
    for eps in args.epsilons:
        cert, summary, _ = survivor.pipeline(eps, args.count, max_term=args.max_term)
        k = sequences.split_count(eps)
        ref = summary["reference_rows"]
        rows.append({
            "epsilon": format_rational(eps), "epsilon_float": float(eps), "M": summary["M"],
            "delta": summary["delta"], "delta_float": float(parse_rational(summary["delta"])),
            "value": summary["value"], "value_float": summary["value_float"],
            "colors": summary["colors"], "warmup_colors_4^K": 4**k,
            "eps_over_log": ref["this_construction(eps/|log eps|)"],
            "katznelson_formula": ref["katznelson(eps^2/|log eps|)"],
            "de_mathan_pollington_formula": ref["de_mathan_pollington(eps^4/|log eps|)"],
        })
    if args.format in ("csv", "table"):
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n",
                           delimiter="," if args.format == "csv" else "\t")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    return {"count": args.count, "rows": rows}


# parser --------------------------------------------------------------------------------


def _add_seq_args(p, counts=True):
    p.add_argument("--s-file", help="sequence JSON {\"epsilon\": \"p/q\"|null, \"terms\": [...]}")
    p.add_argument("--terms", "--s", dest="terms", type=_int_list, help="comma-separated terms")
    p.add_argument("--epsilon", type=_rational)
    if counts:
        p.add_argument("--count", type=int)
        p.add_argument("--start", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lacuna", description=__doc__.splitlines()[0])
    parser.add_argument("--output", "-o", help="write result to this path instead of stdout")
    parser.add_argument("--threads", type=int, default=1, help="parallelism cap (results do not depend on it)")
    parser.add_argument("--verbose", "-v", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gen", help="generate a geometric lacunary sequence")
    p.add_argument("--epsilon", type=_rational, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--start", type=int, default=1)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("validate", help="validate a sequence and report its doubling span")
    _add_seq_args(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("find-theta", help="exact or grid maximiser of min_j ||n_j theta||")
    _add_seq_args(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", default=True)
    g.add_argument("--grid", type=int)
    p.set_defaults(func=cmd_find_theta)

    for name, func, text in (("survivor", cmd_survivor, "run the dyadic sieve and emit a certificate"),
                             ("corollary41", cmd_corollary41, "Bohr-class density vs gamma bracket")):
        p = sub.add_parser(name, help=text)
        _add_seq_args(p)
        p.add_argument("--n", type=int, help="truncation length")
        p.add_argument("--max-term", type=int, default=survivor.DEFAULT_MAX_TERM)
        if name == "survivor":
            p.add_argument("--M", type=int)
            p.add_argument("--c0", type=_rational)
            p.add_argument("--C1", type=int)
            p.add_argument("--history", action="store_true")
        else:
            p.add_argument("--grid", type=int)
        p.set_defaults(func=func)

    p = sub.add_parser("warmup", help="nested middle halves for ratio > 4")
    _add_seq_args(p)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_warmup)

    p = sub.add_parser("pipeline", help="generate, sieve and certify for a given epsilon")
    p.add_argument("--epsilon", type=_rational, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--max-term", type=int, default=survivor.DEFAULT_MAX_TERM)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("color", help="coloring from a rotation number")
    p.add_argument("--theta", type=_rational, required=True)
    p.add_argument("--delta", type=_rational, required=True)
    p.add_argument("--window", type=_window, required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("verify-color", help="exhaustive properness check on a window")
    _add_seq_args(p)
    p.add_argument("--theta", type=_rational)
    p.add_argument("--delta", type=_rational)
    p.add_argument("--window", type=_window)
    p.add_argument("--csv", help="coloring CSV with columns n,color")
    p.set_defaults(func=cmd_verify_color)

    p = sub.add_parser("chromatic", help="exact chromatic number of a finite window")
    _add_seq_args(p)
    p.add_argument("--window", type=_window, required=True)
    p.add_argument("--cap", type=int, default=coloring.DEFAULT_CHROMATIC_CAP)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_chromatic)

    p = sub.add_parser("gamma", help="LP bracket for gamma(H)")
    p.add_argument("--h", type=_int_list)
    p.add_argument("--h-file")
    p.add_argument("--grid", type=int, required=True)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("delta", help="largest H-avoiding residue set mod N")
    p.add_argument("--h", type=_int_list)
    p.add_argument("--h-file")
    p.add_argument("--period", type=int, required=True)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("check-ruzsa", help="check delta(H) <= gamma(H)")
    p.add_argument("--h", type=_int_list)
    p.add_argument("--h-file")
    p.add_argument("--period", type=int, default=120)
    p.add_argument("--grid", type=int, default=1024)
    p.add_argument("--random", type=int, default=0, help="number of random spectra instead of --h")
    p.add_argument("--max-h", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check_ruzsa)

    p = sub.add_parser("report", help="comparison table / CSV of delta against reference formulas")
    p.add_argument("--epsilons", type=lambda t: [_rational(x) for x in t.split(",")],
                   default=[Fraction(1, 5), Fraction(1, 8), Fraction(1, 16)])
    p.add_argument("--count", type=int, default=60)
    p.add_argument("--max-term", type=int, default=survivor.DEFAULT_MAX_TERM)
    p.add_argument("--format", choices=["json", "csv", "table"], default="csv")
    p.set_defaults(func=cmd_report)
    return parser


def _emit(result, path):
    text = result if isinstance(result, str) else json.dumps(result, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        result = args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except CheckFailed as exc:
        _emit(exc.payload, args.output)
        return 1
    except (LacunaError, AssertionError, ValueError) as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 1
    _emit(result, args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
