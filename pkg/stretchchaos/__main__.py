"""
Command line: ``stretchchaos <command> ...``.

Commands:
    verify MODEL      conditions, stretching and chaos certificate for a model
    entropy FILE      Perron eigenvalue and entropy of a 0/1 or adjacency matrix
    orbit MODEL       periodic points for itineraries
    itinerary MODEL   symbols visited by an orbit
    cutcheck MASK     discrete cutting property of a PBM mask
    scan duffing      (rq, rs) grid of crossing counts

Model parameters are given as ``--name value`` after the model, e.g.
``verify olg2d --mu 80 --b 2 --beta 1.3 --K 6``.

Exit codes: 0 pass, 2 boundary, 1 fail, 3 inconclusive, 64 usage, 65 bad input file.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .config import RunConfig, load_config, load_params_file
from .errors import ConfigError, MaskParseError, MatrixParseError, StretchChaosError
from .exporters import CSVExporter, GnuplotExporter, JSONExporter
from .flows import DuffingParams, duffing_scan, duffing_setup
from .geometry import GridMask, grid_cut_check, grid_spanning_continuum
from .orbits import ORBIT_CSV_HEADER
from .pipelines import (
    EXIT_FAIL,
    EXIT_PASS,
    PIPELINES,
    grid_setting,
    itinerary_run,
    membership_setting,
    orbit_search,
    run_pipeline,
)
from .symdyn import (
    SymbolMatrix,
    conjugacy_labels,
    count_admissible_words,
    edge_subshift,
    is_irreducible,
    perron_eigenvalue,
)
from .utils import setup_logging

logger = logging.getLogger(__name__)

EXIT_USAGE = 64
EXIT_DATA = 65

#: flags that expand into several model parameters
GROUPED_FLAGS = {"abcd": ("a", "b", "c", "d")}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so usage errors get exit code 64."""

    def error(self, message):
        raise UsageError(message)


def _value(text: str) -> Any:
    if "," in text:
        return [float(part) for part in text.split(",") if part]
    try:
        return float(text)
    except ValueError:
        return text


def parse_model_flags(extra: Sequence[str]) -> Dict[str, Any]:
    """``--mu 80 --abcd 1,1,1,1 --auto-times`` -> ``{"mu": 80.0, "a": 1.0, ..., "auto_times": True}``."""
    overrides: Dict[str, Any] = {}
    items = list(extra)
    i = 0
    while i < len(items):
        token = items[i]
        if not token.startswith("--") or len(token) < 3:
            raise UsageError(f"unexpected argument {token!r}")
        name, _, inline = token[2:].partition("=")
        name = name.replace("-", "_")
        if inline:
            value = _value(inline)
            i += 1
        elif i + 1 < len(items) and not items[i + 1].startswith("--"):
            value = _value(items[i + 1])
            i += 2
        elif name.startswith("no_"):
            name, value = name[3:], False
            i += 1
        else:
            value = True
            i += 1
        if name in GROUPED_FLAGS:
            keys = GROUPED_FLAGS[name]
            if not isinstance(value, list) or len(value) != len(keys):
                raise UsageError(f"--{name} expects {len(keys)} comma-separated numbers")
            overrides.update(zip(keys, value))
        else:
            overrides[name] = value
    return overrides


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="YAML configuration file")
    parser.add_argument("--params", type=Path, help="flat 'model <name>' / 'key = value' parameter file")
    parser.add_argument("-o", "--output-dir", help="directory for reports and plot data")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--n-paths", type=int)
    parser.add_argument("--n-samples", type=int)
    parser.add_argument("--tol", type=float, help="stretch tolerance (default: rectangle scale)")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--log-file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stretchchaos", allow_abbrev=False,
                     description="Verify stretching-along-paths chaos for planar maps and switched systems")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    verify = sub.add_parser("verify", allow_abbrev=False, help="full pipeline for one model")
    verify.add_argument("model", choices=sorted(PIPELINES))
    verify.add_argument("--max-period", type=int)
    verify.add_argument("--no-plots", action="store_true", help="skip CSV plot data and gnuplot script")
    _common(verify)

    entropy = sub.add_parser("entropy", allow_abbrev=False, help="entropy of a matrix file")
    entropy.add_argument("matrix", type=Path)
    entropy.add_argument("--adjacency", action="store_true", help="treat entries as edge multiplicities")
    entropy.add_argument("--max-word", type=int, default=12)
    entropy.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    entropy.add_argument("--log-file")

    orbit = sub.add_parser("orbit", allow_abbrev=False, help="periodic points for itineraries")
    orbit.add_argument("model")
    orbit.add_argument("--itinerary", help="cyclic word such as 011; default: all primitive words")
    orbit.add_argument("--max-period", type=int)
    _common(orbit)

    itin = sub.add_parser("itinerary", allow_abbrev=False, help="symbols visited by an orbit")
    itin.add_argument("model")
    itin.add_argument("--x0", type=float, required=True)
    itin.add_argument("--y0", type=float, default=0.5, help="ignored by interval maps")
    itin.add_argument("--n", type=int, default=20)
    _common(itin)

    cut = sub.add_parser("cutcheck", allow_abbrev=False, help="discrete cutting property of a PBM mask")
    cut.add_argument("mask", type=Path)
    cut.add_argument("--direction", choices=["left_right", "down_up"], default="left_right")
    cut.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    cut.add_argument("--log-file")

    scan = sub.add_parser("scan", allow_abbrev=False, help="switching-time scan")
    scan.add_argument("system", choices=["duffing"])
    _common(scan)
    return parser


def _run_config(args: argparse.Namespace, model: str,
                overrides: Dict[str, Any]) -> Tuple[RunConfig, Dict[str, Any]]:
    config = load_config(args.config)
    if args.params:
        for name, values in load_params_file(args.params).items():
            config["models"].setdefault(name, {}).update(values)
    if getattr(args, "max_period", None) is not None:
        overrides["max_period"] = args.max_period
    run = RunConfig.build(config, args.command, model, overrides,
                          n_paths=args.n_paths, n_samples=args.n_samples, seed=args.seed,
                          tol=args.tol, output_dir=args.output_dir)
    return run, config


def _write_json(run: RunConfig, payload: Dict[str, Any], name: str = "report") -> Path:
    return JSONExporter(payload, Path(run.output_dir), name, run.command, run.to_dict()).export()


def _write_plots(run: RunConfig, plots: Dict[str, Tuple[Tuple[str, ...], List[tuple]]]) -> None:
    out = Path(run.output_dir)
    layers = []
    for name, (header, rows) in sorted(plots.items()):
        path = CSVExporter(header, rows, out, name).export()
        style = "lines" if name.startswith(("boundary", "trajectory", "test_path")) else "points pt 7 ps 0.3"
        layers.append((path.name, "2:3", name.replace("_", " "), style))
    if layers:
        GnuplotExporter(layers, out, "plot", title=f"{run.model}").export()


# --------------------------------------------------------------------------- #
# Commands
# --------------------------------------------------------------------------- #
def cmd_verify(args: argparse.Namespace, extra: Sequence[str]) -> int:
    run, config = _run_config(args, args.model, parse_model_flags(extra))
    outcome = run_pipeline(run)
    _write_json(run, outcome.to_dict())
    if outcome.certificate is not None and outcome.certificate.orbits:
        CSVExporter(ORBIT_CSV_HEADER, outcome.certificate.orbit_rows(), Path(run.output_dir), "orbits").export()
    if not args.no_plots and config["output"].get("plots", True):
        _write_plots(run, outcome.plots)
    print(f"{run.model}: {outcome.status}")
    return outcome.exit_code


def cmd_entropy(args: argparse.Namespace, extra: Sequence[str]) -> int:
    if extra:
        raise UsageError(f"unexpected arguments {list(extra)}")
    kind = "adjacency" if args.adjacency else "transition"
    matrix = SymbolMatrix.read(args.matrix, kind=kind)
    report: Dict[str, Any] = {"matrix": matrix.entries.tolist(), "kind": kind}
    if args.adjacency:
        matrix, edges = edge_subshift(matrix)
        report["edge_matrix"] = matrix.entries.tolist()
        report["edge_labels"] = list(matrix.labels)
        report["conjugacy"] = conjugacy_labels(edges)
    perron = perron_eigenvalue(matrix)
    report.update(perron.to_dict())
    report["irreducible"] = is_irreducible(matrix)
    report["word_counts"] = {str(n): count_admissible_words(matrix, n) for n in range(1, args.max_word + 1)}
    settings = {"matrix": str(args.matrix), "kind": kind, "max_word": args.max_word}
    print(JSONExporter(report, name="entropy", command="entropy", config=settings).render(), end="")
    return EXIT_PASS


def cmd_orbit(args: argparse.Namespace, extra: Sequence[str]) -> int:
    run, _ = _run_config(args, args.model, parse_model_flags(extra))
    result = orbit_search(run, args.itinerary)
    out = Path(run.output_dir)
    CSVExporter(ORBIT_CSV_HEADER, [o.to_row() for o in result["orbits"]], out, "orbits").export()
    _write_json(run, result, "orbits")
    for orbit in result["orbits"]:
        print(",".join(str(v) for v in orbit.to_row()))
    return EXIT_PASS if result["all_verified"] else EXIT_FAIL


def cmd_itinerary(args: argparse.Namespace, extra: Sequence[str]) -> int:
    run, _ = _run_config(args, args.model, parse_model_flags(extra))
    result = itinerary_run(run, (args.x0, args.y0), args.n)
    print(result)
    return EXIT_PASS if result.ok else EXIT_FAIL


def cmd_cutcheck(args: argparse.Namespace, extra: Sequence[str]) -> int:
    if extra:
        raise UsageError(f"unexpected arguments {list(extra)}")
    mask = GridMask.read_pbm(args.mask)
    cuts = grid_cut_check(mask, args.direction)
    if cuts and args.direction == "left_right":
        continuum = grid_spanning_continuum(mask)
        logger.info("spanning continuum with %d cells", 0 if continuum is None else continuum.count)
    print("CUTS" if cuts else "DOES NOT CUT")
    return EXIT_PASS


def cmd_scan(args: argparse.Namespace, extra: Sequence[str]) -> int:
    run, _ = _run_config(args, args.system, parse_model_flags(extra))
    p = run.params
    params = DuffingParams.from_mapping({k: p[k] for k in ("k", "q", "s") if k in p})
    rel_tol = float(run.tolerances.get("flow_rtol", 1e-10))
    abs_tol = float(run.tolerances.get("flow_atol", 1e-12))
    setup = duffing_setup(params, grid_setting(p, "eq_levels", (2.0, 2.5)),
                          grid_setting(p, "es_levels", (0.1, 1.9)), rel_tol, abs_tol)
    grid = duffing_scan(setup=setup, rq_values=grid_setting(p, "rq_grid", (150.0, 200.0, 250.0, 300.0)),
                        rs_values=grid_setting(p, "rs_grid", (1.2, 1.6, 2.0)), m=int(p.get("m", 2)),
                        n_paths=int(p.get("scan_paths", 8)), n_samples=run.n_samples, seed=run.seed,
                        tol=run.tolerances.get("stretch"), rel_tol=rel_tol, abs_tol=abs_tol,
                        membership=membership_setting(run))
    _write_json(run, grid, "scan")
    print(f"accepted pairs: {grid['accepted']}")
    return EXIT_PASS if grid["accepted"] else EXIT_FAIL


COMMANDS = {
    "verify": cmd_verify,
    "entropy": cmd_entropy,
    "orbit": cmd_orbit,
    "itinerary": cmd_itinerary,
    "cutcheck": cmd_cutcheck,
    "scan": cmd_scan,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    setup_logging(args.log_level, args.log_file)
    try:
        return COMMANDS[args.command](args, extra)
    except (UsageError, ConfigError) as exc:
        logger.error("usage error: %s", exc)
        return EXIT_USAGE
    except (MatrixParseError, MaskParseError) as exc:
        logger.error("cannot parse input: %s", exc)
        return EXIT_DATA
    except StretchChaosError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_FAIL


def cli_entry() -> None:
    sys.exit(main())


def verify_entry() -> None:
    sys.exit(main(["verify", *sys.argv[1:]]))


def entropy_entry() -> None:
    sys.exit(main(["entropy", *sys.argv[1:]]))


if __name__ == "__main__":
    cli_entry()
