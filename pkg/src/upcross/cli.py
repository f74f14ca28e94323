"""Command-line front end.

Exit codes: 0 success, 1 violated precondition, 2 unparsable input,
3 a checked property failed.  Every report echoes the parameters (including an
``argv`` that reproduces it); worker counts and output paths are left out of
the echo because they must not change the output.
"""
import argparse
import csv
import io
import json
import re
import sys
from fractions import Fraction

import numpy as np

from . import cumsum, lemma
from .cover import enumerate_bad_cylinders, format_cover, cover_bound, cover_measure
from .errors import ParseError, UpcrossError
from .measures import load_measure
from .orbit import (
    ENUMERATION_LIMIT,
    Observable,
    birkhoff_averages,
    exact_expected_upcrossings,
    load_observable,
    sample_counts,
    summarize_counts,
)
from .oscillation import adversarial_string, factor_oscillations, read_binary_string
from .rational import format_rational, parse_rational
from .sequences import (
    BoundedSequence,
    Gap,
    count_downcrossings,
    count_upcrossings,
    load_sequence,
    running_averages,
)

EXIT_OK, EXIT_PRECONDITION, EXIT_PARSE, EXIT_VIOLATION = 0, 1, 2, 3


def _fmt(q):
    return format_rational(q)


def _rational_arg(text):
    try:
        return parse_rational(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _gap(args):
    if args.gap is None:
        raise UpcrossError("--gap ALPHA BETA is required")
    return Gap(*args.gap)


def _observable(spec):
    if spec == "first-bit":
        return Observable.first_bit()
    if spec.startswith("indicator:"):
        return Observable.indicator(spec.split(":", 1)[1])
    if spec.startswith("constant:"):
        return Observable.constant(parse_rational(spec.split(":", 1)[1]))
    return load_observable(spec)


def _echo(args, positional=()):
    """Parameter record plus the argv that regenerates the report."""
    params, argv = {}, [args.command, *positional]
    for key in args._echo_keys:
        value = getattr(args, key)
        if value is None or value is False:
            continue
        flag = "--" + key.replace("_", "-")
        if value is True:
            params[key] = True
            argv.append(flag)
        elif isinstance(value, (list, tuple)):
            items = [_fmt(v) if isinstance(v, Fraction) else str(v) for v in value]
            params[key] = items
            argv += [flag, *items]
        else:
            item = _fmt(value) if isinstance(value, Fraction) else str(value)
            params[key] = value if isinstance(value, int) else item
            argv += [flag, item]
    for name in positional:
        params.setdefault("inputs", []).append(name)
    params["argv"] = argv
    return params


def _csv_text(params, header, rows, trailer=None):
    buf = io.StringIO()
    buf.write("# params: " + json.dumps(params, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if trailer is not None:
        buf.write("# " + trailer + "\n")
    return buf.getvalue()


def _json_text(doc):
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _emit(args, text, summary=None):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        if summary is not None:
            print(json.dumps(summary, sort_keys=True))
    else:
        sys.stdout.write(text)


# --- analyze ---------------------------------------------------------------------

def cmd_analyze(args):
    gap = _gap(args)
    terms = load_sequence(args.sequence)
    if not terms:
        raise UpcrossError("sequence is empty")
    if args.bound is None:
        seq = BoundedSequence.with_tight_bound(terms)
    else:
        seq = BoundedSequence(terms, args.bound)
    n = args.n if args.n is not None else len(seq)
    if n < 1 or n > len(seq):
        raise UpcrossError(f"--n must lie in 1..{len(seq)}, got {n}")

    up = count_upcrossings(seq, gap, n)
    down = count_downcrossings(seq, gap, n)
    cs = cumsum.cumulative_sum(seq, gap, n)
    upper = cumsum.cumsum_upper_bound(seq, gap, n)
    three = cumsum.upcrossings_vs_family_size(seq, gap, n)
    checks = {
        "nonnegative": cs.value >= 0,
        "upper_bound": upper.holds,
        "three_points": three.holds,
        "up_down_difference": abs(up.count - down.count) <= 1,
    }
    result = {
        "n": n,
        "A": _fmt(seq.bound),
        "averages": [_fmt(v) for v in running_averages(seq)[:n]],
        "upcrossings": up.count,
        "upcrossing_witnesses": [list(p) for p in up.witnesses],
        "downcrossings": down.count,
        "cumulative_sum": _fmt(cs.value),
        "family": [list(p) for p in cs.family.intervals],
        "family_size": cs.family_size,
        "upper_bound": _fmt(upper.bound),
    }
    if gap.alpha >= 0:
        gain = cumsum.elevation_gain(seq, n)
        result["elevation_gain"] = _fmt(gain)
        checks["elevation_gain"] = cs.value <= gain
    if n + 1 <= len(seq):
        step = cumsum.potential_step(seq, gap, n)
        result["potential_step"] = {
            "delta": _fmt(step.delta),
            "s": step.s,
            "lower_bound": _fmt(step.lower_bound),
        }
        checks["potential_step"] = step.holds
    result["checks"] = checks

    params = _echo(args, [args.sequence])
    if args.format == "json":
        text = _json_text({"command": "analyze", "params": params, "result": result})
    else:
        rows = []
        for key, value in result.items():
            if key == "checks":
                rows += [[f"check.{k}", str(v).lower()] for k, v in value.items()]
            else:
                rows.append([key, json.dumps(value, sort_keys=True) if isinstance(value, (list, dict)) else value])
        text = _csv_text(params, ["key", "value"], rows)
    _emit(args, text, {"command": "analyze", "upcrossings": up.count,
                       "all_checks_hold": all(checks.values())})
    return EXIT_OK if all(checks.values()) else EXIT_VIOLATION


# --- lemma-verify ------------------------------------------------------------------

LEMMA_HEADER = ["seed", "n", "N", "alpha", "beta", "A",
                "average_num", "average_den", "bound_num", "bound_den", "holds"]


def _lemma_row(row):
    return [row.seed, row.n, row.N, _fmt(row.gap.alpha), _fmt(row.gap.beta), _fmt(row.A),
            row.average.numerator, row.average.denominator,
            row.bound.numerator, row.bound.denominator, str(row.holds).lower()]


def cmd_lemma_verify(args):
    if (args.n is None) != (args.N is None):
        raise UpcrossError("--n and --N must be given together")
    if args.n is not None and args.N < args.n and not args.force:
        raise UpcrossError(f"the bound is only claimed for N >= n (got n={args.n}, N={args.N}); use --force")
    if args.campaign in ("random", "both") and args.seed is None:
        raise UpcrossError("the random campaign requires --seed")
    c = args.constant_c if args.constant_c is not None else lemma.DEFAULT_C
    gaps = (_gap(args),) if args.gap else lemma.DEFAULT_GAPS
    windows = [(args.n, args.N)] if args.n is not None else None

    def rows():
        if args.campaign in ("exhaustive", "both"):
            if windows and windows[0][0] + windows[0][1] - 1 > args.max_length:
                raise UpcrossError("--n/--N windows do not fit in --max-length terms")
            yield from lemma.exhaustive_campaign(
                values=range(-args.values, args.values + 1), max_length=args.max_length,
                gaps=gaps, constant_c=c, windows=windows, workers=args.workers)
        if args.campaign in ("random", "both"):
            yield from lemma.random_campaign(args.seed, args.trials, c, args.n, args.N,
                                             workers=args.workers)

    out_rows, violation = [], None
    for row in rows():
        out_rows.append(row)
        if not row.holds:
            violation = {
                "seed": row.seed, "n": row.n, "N": row.N,
                "alpha": _fmt(row.gap.alpha), "beta": _fmt(row.gap.beta), "A": _fmt(row.A),
                "terms": [_fmt(t) for t in row.witness],
                "average": _fmt(row.average), "bound": _fmt(row.bound),
            }
            break
    params = _echo(args)
    if args.format == "json":
        doc = {"command": "lemma-verify", "params": params,
               "rows": [dict(zip(LEMMA_HEADER, _lemma_row(r))) for r in out_rows],
               "violation": violation}
        text = _json_text(doc)
    else:
        trailer = None if violation is None else "violation: " + json.dumps(violation, sort_keys=True)
        text = _csv_text(params, LEMMA_HEADER, [_lemma_row(r) for r in out_rows], trailer)
    worst = max((r.average * r.gap.width / (r.A + r.gap.magnitude) for r in out_rows), default=Fraction(0))
    _emit(args, text, {"command": "lemma-verify", "instances": len(out_rows),
                       "all_hold": violation is None, "worst_ratio": _fmt(worst)})
    return EXIT_OK if violation is None else EXIT_VIOLATION


# --- oscillate -----------------------------------------------------------------------

def cmd_oscillate(args):
    lo, hi = args.gap if args.gap else (Fraction(2, 5), Fraction(3, 5))
    if args.adversarial is not None:
        x = adversarial_string(args.adversarial, lo, hi)
    elif args.bits:
        with open(args.bits, encoding="utf-8") as fh:
            x = read_binary_string(fh.read())
    else:
        raise UpcrossError("give a binary string file or --adversarial K")
    if args.n is None:
        raise UpcrossError("--n is required")
    counts = factor_oscillations(x, args.n, lo, hi, workers=args.workers)
    average = Fraction(int(counts.sum()), len(counts))
    c = args.constant_c if args.constant_c is not None else lemma.DEFAULT_C
    bound = c * (1 + lo + hi) / (hi - lo)
    summary = {
        "command": "oscillate",
        "length": len(x),
        "n": args.n,
        "factor_count": len(counts),
        "average": _fmt(average),
        "max_oscillations": int(counts.max()),
        "lemma_bound": _fmt(bound),
        "lemma_applies": len(counts) >= args.n,
        "within_bound": average <= bound,
        "within_1000": average <= 1000,
    }
    params = _echo(args, [] if args.adversarial is not None else [args.bits])
    if args.format == "json":
        text = _json_text({"params": params, "summary": summary,
                           "oscillations": [int(c) for c in counts]})
    else:
        text = _csv_text(params, ["factor_start", "oscillations"],
                         ([i + 1, int(c)] for i, c in enumerate(counts)))
    _emit(args, text, summary)
    violated = summary["lemma_applies"] and not summary["within_bound"]
    return EXIT_VIOLATION if violated else EXIT_OK


# --- orbit ---------------------------------------------------------------------------

def cmd_orbit(args):
    gap = _gap(args)
    if args.observable is None:
        raise UpcrossError("--observable is required")
    if args.n is None:
        raise UpcrossError("--n is required")
    f = _observable(args.observable)
    n = args.n
    measure = None
    if args.prefix:
        with open(args.prefix, encoding="utf-8") as fh:
            prefix = str(read_binary_string(fh.read()))
    elif args.measure:
        if args.seed is None:
            raise UpcrossError("sampling a prefix from --measure requires --seed")
        measure = load_measure(args.measure)
        rng = np.random.default_rng(np.random.SeedSequence([args.seed, 0]))
        prefix = "".join(map(str, measure.sample(rng, n + f.window - 1, 1)[0]))
    else:
        raise UpcrossError("give --prefix FILE or --measure FILE")
    orbit = birkhoff_averages(prefix, f, n)
    seq = BoundedSequence(orbit.orbit, f.bound)
    crossings = [count_upcrossings(seq, gap, j).count for j in range(1, n + 1)]

    header = ["horizon", "value", "average", "upcrossings"]
    columns = [list(range(1, n + 1)), [_fmt(v) for v in orbit.orbit],
               [_fmt(v) for v in orbit.values], crossings]
    summary = {"command": "orbit", "n": n, "final_average": _fmt(orbit.values[-1]),
               "upcrossings": crossings[-1], "prefix": prefix}
    if measure is not None and args.exact_limit and n + f.window - 1 <= min(args.exact_limit, ENUMERATION_LIMIT):
        exact = [exact_expected_upcrossings(measure, f, gap, j) for j in range(1, n + 1)]
        header.append("exact_expected")
        columns.append([_fmt(e) for e in exact])
        summary["exact_expected"] = _fmt(exact[-1])
    if measure is not None and args.trials:
        counts = sample_counts(measure, f, gap, n, args.trials, args.seed, workers=args.workers)
        estimates = [summarize_counts(counts[:, j]) for j in range(n)]
        header += ["mc_estimate", "mc_stderr"]
        columns += [[repr(e.estimate) for e in estimates], [repr(e.stderr) for e in estimates]]
        summary["mc_estimate"] = estimates[-1].estimate
        summary["mc_stderr"] = estimates[-1].stderr
    rows = [list(r) for r in zip(*columns)]
    params = _echo(args)
    if args.format == "json":
        text = _json_text({"params": params, "summary": summary,
                           "rows": [dict(zip(header, r)) for r in rows]})
    else:
        text = _csv_text(params, header, rows)
    _emit(args, text, summary)
    return EXIT_OK


# --- cover ---------------------------------------------------------------------------

def cmd_cover(args):
    gap = _gap(args)
    if args.observable is None or args.m is None or args.depth is None:
        raise UpcrossError("--observable, --m and --depth are required")
    f = _observable(args.observable)
    measures = [load_measure(path) for path in (args.measure or [])]
    cover = enumerate_bad_cylinders(f, gap, args.m, args.depth, workers=args.workers)
    c = args.constant_c if args.constant_c is not None else lemma.DEFAULT_C
    bound = cover_bound(f, gap, args.m, c)
    values = [cover_measure(cover, mu) for mu in measures]
    summary = {
        "command": "cover",
        "params": _echo(args),
        "strings": len(cover.strings),
        "bound": _fmt(bound),
        "measures": {path: _fmt(v) for path, v in zip(args.measure or [], values)},
        "holds": all(v <= bound for v in values),
    }
    text = format_cover(cover)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(json.dumps(summary, sort_keys=True))
    else:
        sys.stdout.write(text)
    return EXIT_OK if summary["holds"] else EXIT_VIOLATION


# --- parser ----------------------------------------------------------------------------

def _common(p, *, n=False, N=False, m=False, depth=False, trials=False, seed=False, c=False):
    keys = []
    p.add_argument("--gap", nargs=2, type=_rational_arg, metavar=("ALPHA", "BETA"))
    keys.append("gap")
    for flag, enabled, kind in (("n", n, int), ("N", N, int), ("m", m, int),
                                ("depth", depth, int), ("trials", trials, int), ("seed", seed, int)):
        if enabled:
            p.add_argument(f"--{flag}", dest=flag, type=kind, default=None)
            keys.append(flag)
    if c:
        p.add_argument("--constant-c", type=_rational_arg)
        keys.append("constant_c")
    p.add_argument("--out", help="output file (stdout when omitted)")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--workers", type=int, default=1, help="threads; never changes the output")
    keys.append("format")
    return keys


class _Parser(argparse.ArgumentParser):
    """Treats negative fractions such as ``-1/2`` as values, not options."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(r"^-\d+(/\d+)?$|^-\d*\.\d+$")


def build_parser():
    parser = _Parser(prog="upcross", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="upcrossings, cumulative sum and inequality checks for one sequence")
    p.add_argument("sequence")
    keys = _common(p, n=True)
    p.add_argument("--bound", type=_rational_arg, help="certified bound A (default: max |a_i|)")
    p.set_defaults(func=cmd_analyze, _echo_keys=keys + ["bound"])

    p = sub.add_parser("lemma-verify", help="window-average campaigns against the uniform bound")
    keys = _common(p, n=True, N=True, trials=True, seed=True, c=True)
    p.add_argument("--campaign", choices=("exhaustive", "random", "both"), default="exhaustive")
    p.add_argument("--max-length", type=int, default=8)
    p.add_argument("--values", type=int, default=2, help="exhaustive entries range over -V..V")
    p.add_argument("--force", action="store_true", help="allow N < n")
    p.set_defaults(func=cmd_lemma_verify, trials=10000,
                   _echo_keys=keys + ["campaign", "max_length", "values", "force"])

    p = sub.add_parser("oscillate", help="oscillation numbers of every length-n factor")
    p.add_argument("bits", nargs="?")
    keys = _common(p, n=True, c=True)
    p.add_argument("--adversarial", type=int, metavar="K", help="use the generated K-oscillation string")
    p.set_defaults(func=cmd_oscillate, format="csv", _echo_keys=keys + ["adversarial"])

    p = sub.add_parser("orbit", help="Birkhoff averages and expected crossings")
    keys = _common(p, n=True, trials=True, seed=True)
    p.add_argument("--observable", help="JSON file, or first-bit / indicator:WORD / constant:Q")
    p.add_argument("--prefix", help="binary string file")
    p.add_argument("--measure", help="measure JSON file (samples the prefix)")
    p.add_argument("--exact-limit", type=int, default=16, help="max cylinder length for exact sums")
    p.set_defaults(func=cmd_orbit, format="csv",
                   _echo_keys=keys + ["observable", "prefix", "measure", "exact_limit"])

    p = sub.add_parser("cover", help="enumerate the cylinder cover of the >= m upcrossings event")
    keys = _common(p, m=True, depth=True, c=True)
    p.add_argument("--observable")
    p.add_argument("--measure", action="append", help="measure JSON file (repeatable)")
    p.set_defaults(func=cmd_cover, _echo_keys=keys + ["observable", "measure"])
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (UpcrossError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
