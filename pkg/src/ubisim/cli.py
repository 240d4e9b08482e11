"""Command line interface: batch scenario runs, synthesis, and the service.

Exit codes: 0 success, 1 configuration error, 2 data validation error,
3 infeasible budget neutrality. Diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import InfeasibleNeutrality, IngestionError, SimulationError
from .figures import render_figures
from .microdata import load_population, save_population, synth_generate
from .money import parse_brl
from .pipeline import run_simulation
from .presets import load_baseline_policy, load_scheme, load_synth_spec
from .report import fmt_percent, serialize_report

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_INFEASIBLE = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; this CLI reserves 2 for data errors.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ubisim", description=__doc__)
    parser.add_argument("--version", action="version", version=f"ubisim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run one scheme and write the report files")
    _add_data_source(sim)
    sim.add_argument("--baseline", metavar="JSON", help="baseline policy config path")
    sim.add_argument(
        "--scheme",
        required=True,
        metavar="NAME|JSON",
        help="preset name (scheme1/scheme2/scheme3) or scheme spec path",
    )
    sim.add_argument("--poverty-line", metavar="BRL", help="override the scheme poverty line")
    sim.add_argument("--out", default="./out", metavar="DIR", help="report output directory")
    sim.add_argument("--format", choices=("csv", "json"), default="csv")
    sim.add_argument(
        "--no-figures", action="store_true", help="skip rendering decile charts to PNG"
    )

    synth = sub.add_parser("synth", help="generate a synthetic population file")
    synth.add_argument("--households", type=int, metavar="N")
    synth.add_argument("--seed", type=int, metavar="S")
    synth.add_argument("--synth-spec", metavar="JSON", help="full synthesis spec path")
    synth.add_argument("--out", required=True, metavar="CSV", help="destination file")

    serve = sub.add_parser("serve", help="run the what-if HTTP service")
    _add_data_source(serve)
    serve.add_argument("--baseline", metavar="JSON", help="baseline policy config path")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _add_data_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", metavar="CSV", help="microdata file")
    p.add_argument("--synth-households", type=int, metavar="N")
    p.add_argument("--seed", type=int, metavar="S")
    p.add_argument("--synth-spec", metavar="JSON", help="synthesis spec path")


def _population_from_args(args) -> "Population":
    synth_requested = args.synth_households is not None or args.synth_spec is not None
    if bool(args.data) == synth_requested:
        raise _ConfigError("exactly one data source: --data or --synth-households/--seed")
    if args.data:
        population = load_population(args.data)
    else:
        spec = load_synth_spec(
            args.synth_spec, n_households=args.synth_households, seed=args.seed
        )
        population = synth_generate(spec)
    s = population.summary
    print(
        f"population: {s.persons} persons in {s.households} households, "
        f"total weight {s.total_weight:.2f} ({population.provenance})",
        file=sys.stderr,
    )
    return population


class _ConfigError(Exception):
    pass


def _cmd_simulate(args) -> int:
    population = _population_from_args(args)
    policy = load_baseline_policy(args.baseline) if args.baseline else None
    scheme = load_scheme(args.scheme)
    line = parse_brl(args.poverty_line) if args.poverty_line else None

    run = run_simulation(population, scheme, policy=policy, poverty_line=line)
    written = serialize_report(run.report, args.format, args.out)
    if not args.no_figures:
        written += render_figures(run.report, args.out)

    poverty = run.report.poverty
    solver = run.report.manifest["solver"]
    print(f"scheme {run.scheme.name}: solved rate {fmt_percent(100 * solver['rate'])}%")
    if solver["lower_rate"] is not None:
        print(f"  reduced rate {fmt_percent(100 * solver['lower_rate'])}%")
    print(
        f"  poverty {fmt_percent(100 * poverty.headcount_baseline['all'])}% -> "
        f"{fmt_percent(100 * poverty.headcount_reform['all'])}%  "
        f"gini {poverty.gini_baseline:.3f} -> {poverty.gini_reform:.3f}"
    )
    print(f"  residual {solver['residual_cents_per_year'] / 100:.4f} BRL/year")
    for path in written:
        print(f"  wrote {path}")
    return EXIT_OK


def _cmd_synth(args) -> int:
    spec = load_synth_spec(args.synth_spec, n_households=args.households, seed=args.seed)
    population = synth_generate(spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_population(population, out)
    s = population.summary
    print(
        f"wrote {out}: {s.persons} persons in {s.households} households, "
        f"total weight {s.total_weight:.2f}"
    )
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    population = _population_from_args(args)
    policy = load_baseline_policy(args.baseline) if args.baseline else None
    app = create_app(population, policy)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors already printed by the parser
        return int(exc.code or 0)
    handler = {"simulate": _cmd_simulate, "synth": _cmd_synth, "serve": _cmd_serve}[args.command]
    try:
        return handler(args)
    except IngestionError as exc:
        print(f"ubisim: data validation error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InfeasibleNeutrality as exc:
        print(
            f"ubisim: infeasible neutrality: {exc} "
            f"(shortfall {exc.shortfall_cents_per_year / 100:.2f} BRL/year)",
            file=sys.stderr,
        )
        return EXIT_INFEASIBLE
    except (_ConfigError, SimulationError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"ubisim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
