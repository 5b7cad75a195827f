"""Command-line front end.

System literals::

    rotation:<alpha>      circle rotation by alpha
    skew:<d>:<alpha>      (theta_1 + alpha, theta_2 + theta_1, ..., theta_d + theta_{d-1})
    morse                 shift on the two-sided Morse subshift

``alpha`` is ``sqrt2-1``, ``golden``, a hex word ``0x...``, a decimal or ``p/q``.
Torus points are slash-separated coordinates (hex words or decimals), e.g.
``0.25/0x8000000000000000``.  Morse points use ``omega``, ``eta``,
``flip(e)``, ``shift(k, e)`` and ``periodic(01...)``.  Neighborhoods are
``<point>~<radius>``: an open ball for torus systems, the cylinder of
coordinates ``|i| <= r`` around the point for ``morse``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import __version__
from .analysis import (
    Ball,
    Cylinder,
    divergence_profile,
    rp_witness_search,
    sensitivity_set,
)
from .analysis.rp import verify_rp_witness
from .dyadic import format_dyadic, parse_fraction, round_to_bits
from .errors import InternalConsistencyError, ResourceLimitError, SensilabError, UsageError
from .experiments import REGISTRY, run_experiment
from .families import Caps, WindowSet, classify_window, longest_block
from .report import encode_value, write_atomic
from .systems import MorseSystem, TorusSystem, parse_system
from .systems.symbolic import symbolic_window

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3
_VERDICT_EXIT = {"pass": EXIT_PASS, "fail": EXIT_FAIL, "inconclusive": EXIT_INCONCLUSIVE}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common() -> argparse.ArgumentParser:
    p = _Parser(add_help=False, allow_abbrev=False)
    g = p.add_argument_group("global options")
    g.add_argument("--bits", type=int, choices=(32, 64, 128), default=64, help="precision W of circle words")
    g.add_argument("--window", "-n", type=int, default=4096, help="time window N")
    g.add_argument("--delta", default="1/4", help="separation threshold (rounded to a multiple of 2^-W)")
    g.add_argument("--grid", type=int, default=8, help="samples per dimension (torus) or sample count (morse)")
    g.add_argument("--radius", type=int, default=64, help="symbolic metric scan radius")
    g.add_argument("--ip-cap", type=int, default=Caps.ip_length, help="largest finite IP length searched")
    g.add_argument("--diff-cap", type=int, default=Caps.diff_length, help="largest difference base searched")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="write the report here (atomically) instead of stdout")
    g.add_argument("--format", choices=("json", "csv"), help="report encoding (default json; csv for orbit)")
    g.add_argument("--no-timing", action="store_true", help="emit runtime_ms as null for reproducible output")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    p = _Parser(
        prog="sensilab",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        allow_abbrev=False,
    )
    p.add_argument("--version", action="version", version=f"sensilab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("analyze-set", parents=[common], help="family profile of a finite set <elems@N>")
    s.add_argument("set")

    s = sub.add_parser("orbit", parents=[common], help="orbit as CSV (coordinates or symbols)")
    s.add_argument("system")
    s.add_argument("point")
    s.add_argument("--start", type=int, default=0)

    s = sub.add_parser("diverge", parents=[common], help="divergence profile of a pair")
    s.add_argument("system")
    s.add_argument("x")
    s.add_argument("y")
    s.add_argument("--back", type=int, default=0, help="also scan times -back .. -1")

    s = sub.add_parser("sense", parents=[common], help="sampled sensitivity set of a neighborhood")
    s.add_argument("system")
    s.add_argument("nbhd", metavar="U")

    s = sub.add_parser("rp-search", parents=[common], help="regional proximality witness search (torus)")
    s.add_argument("system")
    s.add_argument("x")
    s.add_argument("y")
    s.add_argument("--order", "-d", type=int, default=2)
    s.add_argument("--bound", type=int, default=16, help="scan n in [-bound, bound]^d")

    s = sub.add_parser("verify", parents=[common], help="run a registered experiment ('all' runs every one)")
    s.add_argument("experiment")
    s.add_argument("--param", action="append", default=[], metavar="K=V")

    sub.add_parser("list", parents=[common], help="list registered experiments")
    return p


# ----------------------------------------------------------------- helpers


def _delta(args) -> tuple[Fraction, str]:
    raw = parse_fraction(args.delta)
    if raw <= 0:
        raise UsageError("--delta must be positive")
    d = round_to_bits(raw, args.bits)
    if d <= 0:
        raise UsageError(f"--delta rounds to 0 at {args.bits} bits")
    return d, args.delta


def _system(args):
    return parse_system(args.system, args.bits, args.radius)


def _neighborhood(system, text: str):
    point, sep, r = text.rpartition("~")
    if not sep:
        raise UsageError("neighborhood must be <point>~<radius>", len(text), text)
    try:
        if isinstance(system, MorseSystem):
            return Cylinder.around(system.parse_point(point), int(r))
        return Ball(system.parse_point(point), parse_fraction(r))
    except UsageError as exc:
        if exc.position is not None:
            raise
        raise UsageError(str(exc), len(point) + 1, text) from None
    except ValueError:
        raise UsageError("bad radius", len(point) + 1, text) from None


def _csv_rows(payload: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "value"])
    for k, v in payload.items():
        w.writerow([k, v if isinstance(v, str) else json.dumps(v)])
    return buf.getvalue()


def _emit(args, text: str) -> None:
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _emit_payload(args, payload: dict) -> None:
    payload = encode_value(payload)
    text = json.dumps(payload, indent=2) + "\n" if args.format == "json" else _csv_rows(payload)
    _emit(args, text)


# ------------------------------------------------------------- subcommands


def cmd_analyze_set(args) -> int:
    s = WindowSet.parse(args.set)
    profile = classify_window(s, Caps(ip_length=args.ip_cap, diff_length=args.diff_cap))
    if not profile.validate():
        raise InternalConsistencyError("profile witnesses failed validation")
    _emit_payload(args, profile.to_json())
    return EXIT_PASS


def cmd_orbit(args) -> int:
    system = _system(args)
    x = system.parse_point(args.point)
    n = args.window
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(system, TorusSystem):
        words = system.orbit(x, n, args.start)
        w.writerow(["t"] + [f"x{i + 1}" for i in range(system.d)])
        digits = system.bits // 4
        for t, row in zip(range(args.start, args.start + n), words):
            w.writerow([t] + [f"0x{int(v):0{digits}x}" for v in row])
    else:
        syms = symbolic_window(x, args.start, n)
        w.writerow(["t", "symbol"])
        for t, s in zip(range(args.start, args.start + n), syms):
            w.writerow([t, int(s)])
    text = buf.getvalue()
    if args.format == "json":
        rows = list(csv.reader(io.StringIO(text)))
        text = json.dumps({"columns": rows[0], "rows": rows[1:]}, indent=2) + "\n"
    _emit(args, text)
    return EXIT_PASS


def cmd_diverge(args) -> int:
    system = _system(args)
    delta, raw = _delta(args)
    x, y = system.parse_point(args.x), system.parse_point(args.y)
    prof = divergence_profile(system, x, y, delta, args.window, back=args.back)
    payload = {"system": args.system, "delta_requested": raw, **prof.to_json()}
    _emit_payload(args, payload)
    return EXIT_INCONCLUSIVE if prof.ambiguity_count else EXIT_PASS


def cmd_sense(args) -> int:
    system = _system(args)
    delta, raw = _delta(args)
    U = _neighborhood(system, args.nbhd)
    s = sensitivity_set(system, U, delta, args.window, args.grid)
    block = longest_block(s)
    if not block.validate(s):
        raise InternalConsistencyError("block witness failed validation")
    payload = {
        "system": args.system,
        "neighborhood": args.nbhd,
        "delta": format_dyadic(delta),
        "delta_requested": raw,
        "grid": args.grid,
        "sensitivity_set": str(s),
        "cardinality": len(s),
        "block": block,
    }
    _emit_payload(args, payload)
    return EXIT_PASS


def cmd_rp_search(args) -> int:
    system = _system(args)
    delta, raw = _delta(args)
    res = rp_witness_search(system, args.x, args.y, args.order, delta, args.bound, args.grid)
    payload = {
        "system": args.system,
        "order": args.order,
        "delta": format_dyadic(delta),
        "delta_requested": raw,
        "status": res.status,
        "pairs_scanned": res.pairs_scanned,
    }
    if res.witness is not None:
        w = res.witness
        if not verify_rp_witness(system, args.x, args.y, w, delta):
            raise InternalConsistencyError("rp witness failed re-verification")
        payload["witness"] = {
            "x": str(w.x),
            "y": str(w.y),
            "n": list(w.n),
            "combinations": [{"epsilon": list(e), "time": t} for e, t in w.combos],
        }
    _emit_payload(args, payload)
    return EXIT_PASS if res.status == "found" else EXIT_INCONCLUSIVE


def _parse_params(items) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError("--param expects k=v", len(item), item)
        out[key.strip()] = value.strip()
    return out


def cmd_verify(args) -> int:
    params = _parse_params(args.param)
    timing = not args.no_timing
    if args.experiment == "all":
        if params:
            raise UsageError("--param cannot be combined with 'all'")
        reports = [run_experiment(name, seed=args.seed) for name in sorted(REGISTRY)]
        if args.format == "json":
            text = json.dumps([r.to_dict(timing) for r in reports], indent=2) + "\n"
        else:
            text = "".join(r.to_csv(timing) for r in reports)
        _emit(args, text)
        for r in reports:
            print(f"{r.experiment}: {r.verdict}", file=sys.stderr)
        return max(_VERDICT_EXIT[r.verdict] for r in reports)
    report = run_experiment(args.experiment, params, seed=args.seed)
    _emit(args, report.to_json(timing) if args.format == "json" else report.to_csv(timing))
    print(f"{report.experiment}: {report.verdict}", file=sys.stderr)
    return _VERDICT_EXIT[report.verdict]


def cmd_list(args) -> int:
    for name in sorted(REGISTRY):
        exp = REGISTRY[name]
        defaults = " ".join(f"{k}={encode_value(v)}" for k, v in exp.defaults.items())
        print(f"{name}\t{exp.summary}\t{defaults}")
    return EXIT_PASS


COMMANDS = {
    "analyze-set": cmd_analyze_set,
    "orbit": cmd_orbit,
    "diverge": cmd_diverge,
    "sense": cmd_sense,
    "rp-search": cmd_rp_search,
    "verify": cmd_verify,
    "list": cmd_list,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.format is None:
            args.format = "csv" if args.command == "orbit" else "json"
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except InternalConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except SensilabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
