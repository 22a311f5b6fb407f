"""Command-line entry point: run scenarios, sweeps and the figure experiments."""

from __future__ import annotations

import argparse
import os
import sys

from .cia import Strategy
from .config import parse_config
from .errors import ConfigurationError, MeshcastError
from .harness import SweepSpec, run_scenario, run_sweep, result_table_csv
from .topology import dump_topology_csv, generate_topology

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_IO = 3

FIGURE_SWEEPS = (
    ("fig_nodes.csv", "n_nodes", "sweep_nodes"),
    ("fig_density.csv", "density", "sweep_density"),
    ("fig_interfaces.csv", "n_interfaces", "sweep_interfaces"),
    ("fig_pcover.csv", "p_cover_min", "sweep_pcover"),
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meshcast",
        description="Local broadcast simulation in multi-channel multi-interface mesh networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, out_required: bool = False) -> None:
        p.add_argument("--config", required=True, help="path to a key=value config file")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config key")
        p.add_argument("--seed", type=int, default=None, help="override the base seed")
        p.add_argument("--out", required=out_required, default=None,
                       help="output directory for CSV files")

    p_run = sub.add_parser("run", help="run one scenario and report aggregated metrics")
    common(p_run)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter across all strategies")
    common(p_sweep)
    p_sweep.add_argument("--param", required=True,
                         choices=("n_nodes", "density", "n_interfaces", "p_cover_min"))
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated sweep values, strictly increasing")
    p_sweep.add_argument("--jobs", type=int, default=1)

    p_fig = sub.add_parser("figures", help="run the four figure sweeps and write their CSVs")
    common(p_fig, out_required=True)
    p_fig.add_argument("--jobs", type=int, default=1)

    p_dump = sub.add_parser("dump-topology", help="write a generated topology as CSV")
    common(p_dump, out_required=True)
    return parser


def _write_lines(path: str, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _cmd_run(args) -> int:
    parsed = parse_config(args.config, args.overrides, args.seed)
    result = run_scenario(parsed.scenario)
    lines = [
        "strategy,overhead_mean,overhead_ci,jain_mean,jain_ci,reps",
        f"{parsed.scenario.strategy.value},{result.overhead_mean!r},{result.overhead_ci!r},"
        f"{result.jain_mean!r},{result.jain_ci!r},{result.replications}",
    ]
    print("\n".join(lines))
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
        _write_lines(os.path.join(args.out, "result.csv"), lines)
    return EXIT_OK


def _parse_values(param: str, raw: str):
    caster = int if param in ("n_nodes", "n_interfaces") else float
    try:
        return tuple(caster(p.strip()) for p in raw.split(",") if p.strip())
    except ValueError:
        raise ConfigurationError(f"malformed --values {raw!r}") from None


def _cmd_sweep(args) -> int:
    parsed = parse_config(args.config, args.overrides, args.seed)
    spec = SweepSpec(
        parameter=args.param,
        values=_parse_values(args.param, args.values),
        strategies=tuple(Strategy),
    )
    table = run_sweep(spec, parsed.scenario, jobs=args.jobs)
    lines = result_table_csv(table)
    for value, strategy, message in table.errors:
        print(f"warning: cell ({value}, {strategy.value}) failed: {message}", file=sys.stderr)
    print("\n".join(lines))
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
        _write_lines(os.path.join(args.out, "sweep.csv"), lines)
    return EXIT_OK


def _cmd_figures(args) -> int:
    parsed = parse_config(args.config, args.overrides, args.seed)
    os.makedirs(args.out, exist_ok=True)
    for filename, parameter, grid_key in FIGURE_SWEEPS:
        spec = SweepSpec(
            parameter=parameter,
            values=parsed.grids[grid_key],
            strategies=tuple(Strategy),
        )
        table = run_sweep(spec, parsed.scenario, jobs=args.jobs)
        for value, strategy, message in table.errors:
            print(
                f"warning: {filename}: cell ({value}, {strategy.value}) failed: {message}",
                file=sys.stderr,
            )
        _write_lines(os.path.join(args.out, filename), result_table_csv(table))
    return EXIT_OK


def _cmd_dump_topology(args) -> int:
    parsed = parse_config(args.config, args.overrides, args.seed)
    cfg = parsed.scenario
    topo = generate_topology(
        cfg.n_nodes, cfg.density, cfg.per_model, cfg.p_p_max, seed=cfg.base_seed
    )
    node_rows, link_rows = dump_topology_csv(topo)
    os.makedirs(args.out, exist_ok=True)
    _write_lines(os.path.join(args.out, "nodes.csv"), node_rows)
    _write_lines(os.path.join(args.out, "links.csv"), link_rows)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "figures": _cmd_figures,
        "dump-topology": _cmd_dump_topology,
    }
    try:
        return handlers[args.command](args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        if getattr(exc, "filename", None) == getattr(args, "config", None):
            print(f"configuration error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except MeshcastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
