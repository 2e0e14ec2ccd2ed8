"""Command-line front end.

Exit codes: 0 success, 1 verification found violations, 2 malformed input,
3 a value outside the mathematical domain or the attainable range.
Entropy values given on the command line (``--h``) and all printed values
are in the units selected by ``--base``.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Optional

import numpy as np

from . import diagram2, diagram3, exports, oracle
from .entropy import BASES, EntropyValue, Order, ProbVector, renyi_entropy
from .errors import ConsistencyError, DomainError, EntropyRangeError

OK, VIOLATIONS, BAD_INPUT, OUT_OF_RANGE = 0, 1, 2, 3


class InputError(Exception):
    """Malformed command-line input (exit code 2)."""


def _floats(text: str, what: str) -> list:
    out = []
    for i, tok in enumerate(str(text).split(",")):
        try:
            out.append(float(tok))
        except ValueError:
            raise InputError(f"{what}: entry {i} ({tok.strip()!r}) is not a number") from None
    return out


def parse_orders(text: str) -> list:
    out = []
    for i, tok in enumerate(str(text).split(",")):
        try:
            out.append(Order.parse(tok))
        except DomainError:
            raise InputError(f"--orders: entry {i} ({tok.strip()!r}) is not an order (number, or 'inf')") from None
    return out


def _increasing(orders, what="--orders"):
    if any(a.value >= b.value for a, b in zip(orders, orders[1:])):
        raise InputError(f"{what} must be strictly increasing, got {','.join(map(str, orders))}")


def _read_dists(path: str) -> list:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"--dist-file: cannot read {path!r}: {e.strerror}") from None
    rows = []
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rows.append([float(x) for x in line.split(",")])
        except ValueError:
            if not rows and line_no == 1:
                continue  # header row
            raise InputError(f"--dist-file: line {line_no} is not a list of numbers") from None
    if not rows:
        raise InputError(f"--dist-file: {path!r} holds no distribution")
    return rows


def _emit(text: str, out: Optional[str]):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_entropy(args) -> int:
    if (args.dist is None) == (args.dist_file is None):
        raise InputError("give exactly one of --dist and --dist-file")
    raw = [_floats(args.dist, "--dist")] if args.dist is not None else _read_dists(args.dist_file)
    orders = parse_orders(args.orders)
    dists = []
    for i, row in enumerate(raw):
        try:
            dists.append(ProbVector(row))
        except DomainError as e:
            raise InputError(f"distribution {i}: {e}") from None
    records = []
    for i, p in enumerate(dists):
        for a in orders:
            value = renyi_entropy(p, a).to(args.base)
            records.append({"row": i, "order": str(a), "value": float(value), "base": args.base})
    if args.format == "json":
        _emit(exports.dumps({"kind": "entropy", "values": records}), args.out)
    else:
        rows = [[r["row"], r["order"], r["value"], r["base"]] for r in records]
        _emit(exports.csv_text(["row", "order", "value", "base"], rows), args.out)
    return OK


def cmd_bound(args) -> int:
    orders = parse_orders(args.orders)
    _increasing(orders)
    h = [float(x) for x in exports.from_base(_floats(args.h, "--h"), args.base)] \
        if args.base != "e" else _floats(args.h, "--h")
    if len(orders) not in (2, 3):
        raise InputError(f"--orders needs 2 or 3 orders, got {len(orders)}")
    if len(h) != len(orders) - 1:
        raise InputError(f"--h needs {len(orders) - 1} value(s) for {len(orders)} orders, got {len(h)}")
    if any(math.isnan(x) for x in h):
        raise InputError("--h values must be numbers")
    if len(orders) == 2:
        q = diagram2.BoundQuery2(orders[0], orders[1], h[0], args.n)
        result = diagram2.upper_bound(q) if args.side == "upper" else diagram2.lower_bound(q)
    else:
        q = diagram3.BoundQuery3(orders[0], orders[1], orders[2], h[0], h[1], args.n)
        if args.side == "upper":
            if args.n is None:
                raise DomainError("the three-order upper bound depends on n; pass --n")
            result = diagram3.upper_bound3(q)
        else:
            result = diagram3.lower_bound3(q)
    shown = [float(EntropyValue(x).to(args.base)) for x in h]
    doc = exports.bound_record(result, args.side, orders, shown, args.n, args.base)
    if args.format == "json":
        _emit(exports.dumps(doc), args.out)
    else:
        _emit(exports.csv_text(*exports.bound_rows(doc)), args.out)
    return OK


def cmd_curve(args) -> int:
    orders = parse_orders(args.orders)
    if len(orders) != 2:
        raise InputError(f"curve needs 2 orders, got {len(orders)}")
    _increasing(orders)
    curve = diagram2.boundary_curve(orders[0], orders[1], args.n, args.samples)
    if args.format == "svg":
        _emit(exports.curve_svg(curve, orders, args.n, args.base), args.out)
    elif args.format == "json":
        _emit(exports.dumps(exports.curve_json(curve, orders, args.n, args.base)), args.out)
    else:
        _emit(exports.csv_text(*exports.curve_rows(curve, args.base)), args.out)
    return OK


def cmd_surface(args) -> int:
    orders = parse_orders(args.orders)
    if len(orders) != 3:
        raise InputError(f"surface needs 3 orders, got {len(orders)}")
    _increasing(orders)
    if args.format == "svg":
        raise DomainError("surfaces have no SVG rendering; use --format csv or json")
    kinds = ("lower", "upper") if args.kind == "both" else (args.kind,)
    surfaces = [diagram3.surface_mesh(*orders, args.n, k, args.resolution) for k in kinds]
    if args.format == "json":
        _emit(exports.dumps(exports.surface_json(surfaces, orders, args.n, args.base)), args.out)
    else:
        _emit(exports.csv_text(*exports.surface_rows(surfaces, args.base)), args.out)
    return OK


def _violation_record(v: oracle.Violation, base: str) -> dict:
    conv = 1.0 if base == "e" else 1.0 / math.log(BASES[base])
    return {"kind": v.kind, "bound": v.bound * conv, "observed": v.observed * conv,
            "excess": v.excess * conv, "probs": v.dist.probs.tolist()}


def cmd_verify(args) -> int:
    orders = parse_orders(args.orders)
    if len(orders) not in (2, 3):
        raise InputError(f"verify needs 2 or 3 orders, got {len(orders)}")
    _increasing(orders)
    try:
        cfg = oracle.SampleConfig(args.n, args.count, args.seed, args.mode, args.resolution)
    except DomainError as e:
        raise InputError(str(e)) from None
    tol = args.tolerance
    samples, mult = cfg, None
    if cfg.mode == "lattice":
        # Entropies are permutation invariant, so one sorted point per class suffices.
        samples, mult = oracle.lattice_classes(args.n, args.resolution)
    if len(orders) == 2:
        report = oracle.check_bounds2(samples, orders[0], orders[1], args.n, tol)
    else:
        report = oracle.check_bounds3(samples, *orders, args.n, tol)
    if mult is not None:
        report.total_checked = int(mult.sum())
    doc = {
        "kind": "verify",
        "orders": [str(a) for a in orders],
        "n": args.n,
        "mode": cfg.mode,
        "seed": cfg.seed,
        "count": cfg.size,
        "tolerance": tol,
        "base": args.base,
        "total_checked": report.total_checked,
        "violations": [_violation_record(v, args.base) for v in report.violations],
    }
    agreement = None
    if cfg.mode == "lattice":
        agreement = oracle.compare_envelope(samples, orders, args.n, args.bin_width, mult)
        doc["bin_width"] = args.bin_width
        doc["envelope_tolerance"] = args.envelope_tolerance
        doc["envelope"] = [
            {"center": list(b.center), "count": b.count,
             "empirical_min": b.empirical_min, "analytic_min": b.analytic_min,
             "empirical_max": b.empirical_max, "analytic_max": b.analytic_max}
            for b in agreement.bins
        ]
        doc["envelope_worst"] = {"upper": agreement.worst("upper"), "lower": agreement.worst("lower")}
    if args.format == "json":
        _emit(exports.dumps(doc), args.out)
    elif agreement is not None:
        dims = len(orders) - 1
        header = [f"center{i + 1}" for i in range(dims)] + [
            "count", "empirical_min", "analytic_min", "empirical_max", "analytic_max"]
        conv = (lambda x: x) if args.base == "e" else (lambda x: x / math.log(BASES[args.base]))
        rows = [[*(conv(c) for c in b.center), b.count, conv(b.empirical_min), conv(b.analytic_min),
                 conv(b.empirical_max), conv(b.analytic_max)] for b in agreement.bins]
        _emit(exports.csv_text(header, rows), args.out)
    else:
        rows = [[r["kind"], r["bound"], r["observed"], r["excess"], ";".join(exports.fmt(p) for p in r["probs"])]
                for r in doc["violations"]]
        _emit(exports.csv_text(["kind", "bound", "observed", "excess", "probs"], rows), args.out)
    summary = f"checked {report.total_checked} distributions, {len(report.violations)} violation(s)"
    if agreement is not None:
        summary += (f"; envelope worst gap upper {agreement.worst('upper'):.3g}, "
                    f"lower {agreement.worst('lower'):.3g} (tolerance {args.envelope_tolerance:g})")
    print(summary, file=sys.stderr)
    return OK if report.ok else VIOLATIONS


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="renyi-range", description="Rényi entropies and their joint ranges.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, formats=("csv", "json")):
        sp.add_argument("--format", choices=formats, default=formats[0])
        sp.add_argument("--out", default=None, help="output file (default: standard output)")
        sp.add_argument("--base", choices=sorted(BASES), default="e", help="logarithm base of all entropy values")

    sp = sub.add_parser("entropy", help="Rényi entropies of a distribution")
    sp.add_argument("--dist", help="comma-separated probabilities")
    sp.add_argument("--dist-file", help="CSV file, one distribution per line")
    sp.add_argument("--orders", required=True, help="comma-separated orders; 0, 1 and inf allowed")
    common(sp)
    sp.set_defaults(func=cmd_entropy)

    sp = sub.add_parser("bound", help="tight bound on the last order's entropy")
    sp.add_argument("--orders", required=True)
    sp.add_argument("--h", required=True, help="entropy values of all but the last order")
    sp.add_argument("--n", type=int, default=None, help="alphabet size (omit for unbounded)")
    sp.add_argument("--side", choices=("upper", "lower"), required=True)
    common(sp, ("json", "csv"))
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("curve", help="boundary of the two-order range")
    sp.add_argument("--orders", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=64, help="samples per segment")
    common(sp, ("csv", "json", "svg"))
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("surface", help="boundary surfaces of the three-order range")
    sp.add_argument("--orders", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--resolution", type=int, default=16, help="grid points per simplex edge")
    sp.add_argument("--kind", choices=("lower", "upper", "both"), default="both")
    common(sp, ("csv", "json", "svg"))
    sp.set_defaults(func=cmd_surface)

    sp = sub.add_parser("verify", help="check the bounds against sampled distributions")
    sp.add_argument("--orders", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--mode", choices=("mc", "monte-carlo", "lattice"), default="mc")
    sp.add_argument("--count", type=int, default=100000)
    sp.add_argument("--resolution", type=int, default=100, help="lattice denominator R")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tolerance", type=float, default=oracle.MC_TOLERANCE)
    sp.add_argument("--bin-width", type=float, default=0.01)
    sp.add_argument("--envelope-tolerance", type=float, default=oracle.LATTICE_TOLERANCE)
    common(sp)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD_INPUT
    except EntropyRangeError as e:
        msg = f"error: {e}"
        if e.interval is not None:
            lo, hi = e.interval
            msg += f"\nvalid interval (nats): [{lo!r}, {hi!r}]"
        print(msg, file=sys.stderr)
        return OUT_OF_RANGE
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return OUT_OF_RANGE
    except ConsistencyError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return VIOLATIONS
    except SystemExit as e:  # --help
        return int(e.code or 0)


if __name__ == "__main__":
    sys.exit(main())
