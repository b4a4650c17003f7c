"""Command-line front end: sweeps, optimization, Wigner fields, Monte Carlo and design numbers.

Every subcommand writes CSV (17 significant digits, ``\\n`` line ends) or
JSON to ``--out`` or stdout. Options may also come from a ``key=value``
file passed with ``--config``; command-line flags take precedence.

Exit codes: 0 success, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import physical
from .dicke import coherent_state
from .exceptions import DomainError, SpinSqueezeError
from .interferometer import MZISpec, default_workers, monte_carlo, write_shots_csv
from .metrology import meas_metrics, none_metrics, oat_metrics, optimize_chi
from .squeezers import MeasConfig, OATConfig, kraus_apply, oat_apply
from .wigner import SphereGrid, wigner_function

EXIT_USAGE = 2
EXIT_NUMERICAL = 3

METRIC_COLUMNS = ["N", "chi", "kind", "delta_phi_w", "delta_phi_f", "xi2", "fisher", "sql", "heisenberg"]
KINDS = ("none", "interaction", "measurement")
DEFAULT_CHI_RANGE = "1e-3:1:25"


class UsageError(Exception):
    pass


# ---- argument parsing helpers ----


def _int_list(text: str) -> List[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("N values must be positive integers")
    return values


def _float_list(text: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _log_range(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected lo:hi:count, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:count, got {text!r}") from None
    if not (0 < lo <= hi and math.isfinite(hi)) or count < 1:
        raise argparse.ArgumentTypeError("need 0 < lo <= hi and count >= 1")
    if count == 1:
        return [lo]
    return np.geomspace(lo, hi, count).tolist()


def _n_range(text: str) -> List[int]:
    return sorted(set(int(round(v)) for v in _log_range(text)))


def _bracket(text: str):
    values = _float_list(text.replace(":", ","))
    if len(values) != 2 or not 0 < values[0] < values[1]:
        raise argparse.ArgumentTypeError("bracket must be lo:hi with 0 < lo < hi")
    return tuple(values)


def _add_common(p: argparse.ArgumentParser, fmt_default: str = "csv"):
    p.add_argument("--config", metavar="FILE", help="key=value file with option defaults")
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=fmt_default, help="output format (default: %(default)s)")
    p.add_argument(
        "--workers",
        type=int,
        default=None,
        help="worker threads (default: $SPINSQUEEZE_WORKERS or 1); output does not depend on it",
    )


def _add_n(p, default="40"):
    p.add_argument("--n", type=_int_list, default=_int_list(default), help="batch sizes, comma-separated (default: %(default)s)")
    p.add_argument("--n-range", type=_n_range, metavar="LO:HI:COUNT", help="log-spaced batch sizes; overrides --n")


def _add_chi(p, default: Optional[str]):
    p.add_argument(
        "--chi",
        type=_float_list,
        default=None if default is None else _float_list(default),
        help=f"squeezing strengths, comma-separated (default: {default or DEFAULT_CHI_RANGE + ' log-spaced'})",
    )
    p.add_argument("--chi-range", type=_log_range, metavar="LO:HI:COUNT", help="log-spaced strengths; overrides --chi")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinsqueeze",
        description="Spin-squeezed electron interferometry: metrics, sweeps and simulations.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-chi", help="metrics over a range of squeezing strengths")
    _add_n(p, "20,200,2000")
    _add_chi(p, None)
    p.add_argument("--kind", choices=KINDS, default="interaction")
    _add_common(p)

    p = sub.add_parser("sweep-n", help="metrics over batch sizes at fixed strengths")
    _add_n(p, "10,20,50,100,200,500,1000,2000")
    _add_chi(p, "0.268,0.065,0.015")
    p.add_argument("--kind", choices=KINDS, default="interaction")
    _add_common(p)

    p = sub.add_parser("optimal-chi", help="strength minimizing delta_phi_w for each N")
    _add_n(p, "40")
    p.add_argument("--kind", choices=KINDS[1:], default="interaction")
    p.add_argument("--bracket", type=_bracket, metavar="LO:HI", help="search bracket (default depends on kind)")
    _add_common(p)

    p = sub.add_parser("wigner", help="Wigner function of the squeezed state on a sphere grid")
    p.add_argument("--n", type=int, default=20)
    _add_chi(p, "0")
    p.add_argument("--kind", choices=KINDS, default="interaction")
    p.add_argument("--h", type=float, default=None, help="measurement result (default: N/2)")
    p.add_argument("--n-theta", type=int, default=61)
    p.add_argument("--n-phi", type=int, default=120)
    _add_common(p)

    p = sub.add_parser("montecarlo", help="simulate shots and compare with the predicted uncertainty")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--kind", choices=KINDS, default="none")
    p.add_argument("--chi", type=float, default=0.0)
    p.add_argument("--phi", type=float, default=0.01, help="true phase in radians")
    p.add_argument("--shots", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shots-csv", metavar="PATH", help="also write the shot stream as CSV")
    _add_common(p, fmt_default="json")

    p = sub.add_parser("design", help="hardware numbers for one operating point")
    p.add_argument("--energy-kev", type=float, default=100.0)
    p.add_argument("--d-over-r", type=float, default=10.0)
    p.add_argument("--current-na", type=float, default=1.0)
    p.add_argument("--dose", type=float, default=20.0, help="electrons per square angstrom")
    p.add_argument("--pixel-angstrom", type=float, default=1.0)
    p.add_argument("--length-m", type=float, default=1.0)
    p.add_argument("--radius-m", type=float, default=1e-6)
    _add_common(p, fmt_default="json")
    return parser


def _read_config(path: str) -> List[str]:
    """Turn ``key=value`` lines into ``--key value`` arguments."""
    args = []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    for number, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{number}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        args += ["--" + key.replace("_", "-"), value]
    return args


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        # config values first so that explicit flags win
        extra = _read_config(args.config)
        args = parser.parse_args([argv[0]] + extra + list(argv[1:]))
    return args


# ---- output ----


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return "" if value is None else str(value)


def _render(rows: List[dict], columns: List[str], fmt: str) -> str:
    if fmt == "json":
        payload = [{c: row[c] for c in columns} for row in rows]
        return json.dumps(payload, indent=2) + "\n"
    out = io.StringIO()
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(_fmt(row[c]) for c in columns) + "\n")
    return out.getvalue()


def _emit(text: str, path: Optional[str]):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _map(fn: Callable, items: list, workers: Optional[int]) -> list:
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise UsageError("--workers must be >= 1")
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---- subcommands ----


def _metrics(kind: str, n: int, chi: float):
    if kind == "none" or chi == 0:
        return replace(none_metrics(n, chi), squeezer_kind=kind)
    if kind == "interaction":
        return oat_metrics(n, chi)
    return meas_metrics(n, chi)


def _strengths(args) -> List[float]:
    """``--chi-range`` wins over ``--chi``; sweep-chi falls back to a default range."""
    if args.chi_range is not None:
        chis = args.chi_range
    elif args.chi is not None:
        chis = args.chi
    else:
        chis = _log_range(DEFAULT_CHI_RANGE)
    if any(c < 0 for c in chis):
        raise UsageError("squeezing strengths must be >= 0")
    return sorted(set(float(c) for c in chis))


def cmd_sweep(args) -> str:
    ns = args.n_range or args.n
    points = sorted(set((int(n), c) for n in ns for c in _strengths(args)))
    results = _map(lambda pt: _metrics(args.kind, *pt), points, args.workers)
    rows = [
        {
            "N": r.n_electrons,
            "chi": r.chi,
            "kind": r.squeezer_kind,
            "delta_phi_w": r.delta_phi_w,
            "delta_phi_f": r.delta_phi_f,
            "xi2": r.xi2,
            "fisher": r.fisher,
            "sql": r.sql,
            "heisenberg": r.heisenberg,
        }
        for r in results
    ]
    return _render(rows, METRIC_COLUMNS, args.format)


def cmd_optimal_chi(args) -> str:
    ns = sorted(set(args.n_range or args.n))
    reports = _map(lambda n: optimize_chi(n, args.kind, bracket=args.bracket), ns, args.workers)
    columns = ["N", "kind", "chi_opt", "delta_phi_w_min", "evaluations", "bracket_lo", "bracket_hi"]
    rows = [
        {
            "N": r.n_electrons,
            "kind": r.kind,
            "chi_opt": r.chi_opt,
            "delta_phi_w_min": r.delta_phi_w_min,
            "evaluations": r.evaluations,
            "bracket_lo": float(r.bracket[0]),
            "bracket_hi": float(r.bracket[1]),
        }
        for r in reports
    ]
    return _render(rows, columns, args.format)


def _squeezed_state(kind: str, n: int, chi: float, h: float):
    state = coherent_state(n)
    if kind == "none" or chi == 0:
        return state
    if kind == "interaction":
        return oat_apply(state, OATConfig(chi))
    return kraus_apply(state, MeasConfig(chi), h).post_state


def cmd_wigner(args) -> str:
    chis = _strengths(args)
    h = args.n / 2 if args.h is None else args.h
    grid = SphereGrid.uniform(args.n_theta, args.n_phi)
    columns = ["chi", "theta", "phi", "W"]
    rows = []
    for chi in chis:
        field = wigner_function(_squeezed_state(args.kind, args.n, chi, h), grid)
        for i, theta in enumerate(grid.theta):
            for j, phi in enumerate(grid.phi):
                rows.append({"chi": chi, "theta": float(theta), "phi": float(phi), "W": float(field[i, j])})
    return _render(rows, columns, args.format)


def cmd_montecarlo(args) -> str:
    if args.kind == "none" or args.chi == 0:
        squeezer = None
    elif args.kind == "interaction":
        squeezer = OATConfig(args.chi)
    else:
        squeezer = MeasConfig(args.chi)
    spec = MZISpec(args.n, squeezer, args.phi)
    result = monte_carlo(spec, args.shots, seed=args.seed, workers=args.workers)
    predicted = _metrics(spec.kind, args.n, args.chi if squeezer is not None else 0.0)
    summary = {
        "N": args.n,
        "kind": spec.kind,
        "chi": args.chi if squeezer is not None else 0.0,
        "phi": args.phi,
        "shots": args.shots,
        "seed": args.seed,
        "rms_error": result.rms_error,
        "bias": result.bias,
        "stderr": result.stderr,
        "predicted_delta_phi_w": predicted.delta_phi_w,
    }
    if args.shots_csv:
        with open(args.shots_csv, "w", encoding="utf-8", newline="") as fh:
            write_shots_csv(result, fh)
    if args.format == "json":
        return json.dumps(summary, indent=2) + "\n"
    return _render([summary], list(summary), "csv")


def cmd_design(args) -> str:
    try:
        values = physical.design_summary(
            energy_kev=args.energy_kev,
            d_over_r=args.d_over_r,
            current_na=args.current_na,
            dose_per_a2=args.dose,
            pixel_angstrom=args.pixel_angstrom,
            length_m=args.length_m,
            radius_m=args.radius_m,
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        return json.dumps(values, indent=2) + "\n"
    return _render([{"quantity": k, "value": v} for k, v in values.items()], ["quantity", "value"], "csv")


COMMANDS = {
    "sweep-chi": cmd_sweep,
    "sweep-n": cmd_sweep,
    "optimal-chi": cmd_optimal_chi,
    "wigner": cmd_wigner,
    "montecarlo": cmd_montecarlo,
    "design": cmd_design,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"spinsqueeze: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        text = COMMANDS[args.command](args)
    except (UsageError, DomainError) as exc:
        print(f"spinsqueeze: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpinSqueezeError as exc:
        print(f"spinsqueeze: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit(text, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
