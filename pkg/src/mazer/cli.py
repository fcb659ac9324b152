"""Command-line front end.

    mazer sweep --config FILE [--out CSV] [--mode exact|slow|fast|averaged|oracle]
    mazer figure fig2|fig3 [--out CSV]
    mazer point N U S [--oracle] [--json]
    mazer extrema N

Exit status: 0 success, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from mazer.model import SystemParams, dressed_eigensystem
from mazer.oracle import OracleConfig, SingularMatchingError, max_amplitude_difference, solve_coupled_channels
from mazer.scattering import (
    channel_amplitudes,
    channel_probabilities,
    fast_limit_probabilities,
    slow_limit_transmission,
    transmission_extrema,
)
from mazer.sweep import (
    CSV_COLUMNS,
    MODES,
    MODE_ALIASES,
    SweepConfig,
    SweepSpecError,
    figure,
    format_value,
    run_sweep,
    write_csv,
)

EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _s_range(text: str) -> tuple[float, float, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected START,STOP,POINTS")
    return float(parts[0]), float(parts[1]), int(parts[2])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mazer", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="evaluate a (N, u, s) grid from a config file")
    p.add_argument("--config", required=True, help="flat key = value file")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--mode", choices=sorted(set(MODES) | set(MODE_ALIASES)))
    p.add_argument("--n-values", type=_ints, help="comma-separated atom counts")
    p.add_argument("--u", type=_floats, help="comma-separated momentum ratios chi/kappa")
    p.add_argument("--s-range", type=_s_range, help="START,STOP,POINTS for kappa*L")

    p = sub.add_parser("figure", help="data for the transmission curve figures")
    p.add_argument("which", choices=("fig2", "fig3"))
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = sub.add_parser("point", help="full report for a single (N, u, s)")
    p.add_argument("n", type=int)
    p.add_argument("u", type=float)
    p.add_argument("s", type=float)
    p.add_argument("--oracle", action="store_true", help="also run the coupled-channel solver")
    p.add_argument("--json", action="store_true", help="emit one flat JSON object")

    p = sub.add_parser("extrema", help="slow-atom resonance extrema of P_T(1)")
    p.add_argument("n", type=int)
    return parser


def point_report(n: int, u: float, s: float, oracle: bool = False) -> dict:
    params = SystemParams(n, u, s)
    probs = channel_probabilities(channel_amplitudes(params))
    report = {"n_atoms": n, "u": params.u, "s": params.s}
    for name in CSV_COLUMNS[3:12]:
        report[name] = getattr(probs, name)
    report["unitarity_residual"] = abs(probs.p1 + probs.pj + probs.p0 - 1.0)

    lam = dressed_eigensystem(params).eigenvalues
    report.update(lambda_plus=float(lam[0]), lambda_zero=float(lam[1]), lambda_minus=float(lam[2]))
    report["slow_limit_p_t1"] = float(slow_limit_transmission(params))
    fp1, fpj, fp0 = fast_limit_probabilities(params)
    report.update(fast_limit_p1=float(fp1), fast_limit_pj=float(fpj), fast_limit_p0=float(fp0))
    if n > 1:
        pmax, pmin = transmission_extrema(n)
    else:
        pmax = pmin = None
    report.update(extrema_p_max=pmax, extrema_p_min=pmin)

    if oracle:
        amps = solve_coupled_channels(params, OracleConfig())
        oprobs = channel_probabilities(amps)
        report["oracle_max_amplitude_diff"] = max_amplitude_difference(amps, channel_amplitudes(params))
        report["oracle_unitarity_residual"] = abs(oprobs.p1 + oprobs.pj + oprobs.p0 - 1.0)
    return report


def _format_report(report: dict) -> str:
    width = max(len(k) for k in report)
    lines = []
    for key, value in report.items():
        text = "n/a" if value is None else format_value(value)
        lines.append(f"{key:<{width}}  {text}")
    return "\n".join(lines)


def _emit_csv(records, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            write_csv(records, fh)
    else:
        write_csv(records, sys.stdout)


def _run(args) -> int:
    if args.command == "sweep":
        config = SweepConfig.from_file(args.config)
        spec = config.to_spec(mode=args.mode, n_values=args.n_values, u=args.u, s_range=args.s_range)
        _emit_csv(run_sweep(spec), args.out)
    elif args.command == "figure":
        _emit_csv(figure(args.which), args.out)
    elif args.command == "point":
        report = point_report(args.n, args.u, args.s, oracle=args.oracle)
        if args.json:
            print(json.dumps(report))
        else:
            print(_format_report(report))
    elif args.command == "extrema":
        pmax, pmin = transmission_extrema(args.n)
        print(f"p_max  {format_value(pmax)}")
        print(f"p_min  {format_value(pmin)}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except SingularMatchingError as exc:
        print(f"mazer: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (SweepSpecError, ValueError, TypeError, OSError) as exc:
        print(f"mazer: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
