"""Command-line entry point: ``ipcmap {stats,network,mst,layout,export,replicate}``."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, PipelineConfig, load_config
from .corpus import EmptyCorpus, InvalidRange, UnknownFormat, UnreadableFile
from .pipeline import EmptyGraph, run_export, run_layout, run_mst, run_network, run_stats
from .replicate import run_replicate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_EMPTY = 4
EXIT_MISMATCH = 5

log = logging.getLogger("ipcmap")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="TOML config file")
    common.add_argument("--input", help="corpus file")
    common.add_argument("--input-format", dest="input_format", choices=("canonical-csv", "canonical-jsonl", "patentscope-csv"))
    common.add_argument("--applicant-pattern", dest="applicant_patterns", action="append",
                        help="applicant substring (repeatable; replaces the configured list)")
    common.add_argument("--all-applicants", action="store_true", help="disable applicant filtering")
    common.add_argument("--from-year", dest="from_year", type=int)
    common.add_argument("--to-year", dest="to_year", type=int)
    common.add_argument("--level", choices=("section", "class", "subclass", "group"))
    common.add_argument("--min-occurrence", dest="min_occurrence", type=int)
    common.add_argument("--jaccard-threshold", dest="jaccard_threshold", type=float)
    common.add_argument("--resolution", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--use-weights", dest="use_weights", action="store_const", const=True)
    common.add_argument("--layout-iterations", dest="layout_iterations", type=int)
    common.add_argument("--layout-gravity", dest="layout_gravity", type=float)
    common.add_argument("--layout-scaling", dest="layout_scaling", type=float)
    common.add_argument("--layout-seed", dest="layout_seed", type=int)
    common.add_argument("-o", "--output-dir", dest="output_dir")
    common.add_argument("--format", dest="formats", action="append",
                        choices=("graphml", "gexf", "dot", "csv-edgelist"), help="export format (repeatable)")
    common.add_argument("--label-min-occurrence", dest="label_min_occurrence", type=int)
    common.add_argument("--prolific-threshold", dest="prolific_threshold", type=int)
    common.add_argument("--top-k", dest="top_k", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="ipcmap", description="IPC code co-occurrence maps from patent records.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("stats", parents=[common], help="corpus counts by year, applicant and office")
    sub.add_parser("network", parents=[common], help="modularity and MST networks with metrics, exports and SVG")
    sub.add_parser("mst", parents=[common], help="minimum spanning forest only")
    sub.add_parser("layout", parents=[common], help="ForceAtlas2 positions")
    sub.add_parser("export", parents=[common], help="graph files and SVG maps")
    rep = sub.add_parser("replicate", parents=[common], help="compare against published counts")
    rep.add_argument("--expected", help="expected-values manifest (JSON); defaults to the bundled one")
    return p


_NOT_CONFIG = {"command", "config", "verbose", "all_applicants"}


def build_config(args: argparse.Namespace) -> PipelineConfig:
    overrides = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}
    if args.all_applicants:
        overrides["applicant_patterns"] = []
    return load_config(args.config, overrides)


COMMANDS = {
    "stats": run_stats,
    "network": run_network,
    "mst": run_mst,
    "layout": run_layout,
    "export": run_export,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = build_config(args)
        if not config.input:
            raise ConfigError("no input file given (use --input or 'input' in the config file)")
        if args.command == "replicate":
            checks = run_replicate(config)
            failed = [c for c in checks if not c.passed]
            for c in checks:
                print(f"{'PASS' if c.passed else 'FAIL'} {c.item}: expected {c.expected!r}, got {c.actual!r}")
            print(f"{len(checks) - len(failed)}/{len(checks)} checks passed; report in {config.output_dir}")
            return EXIT_MISMATCH if failed else EXIT_OK
        COMMANDS[args.command](config)
        print(f"{args.command}: outputs written to {config.output_dir}")
        return EXIT_OK
    except (ConfigError, UnknownFormat, InvalidRange) as exc:
        print(f"ipcmap: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (UnreadableFile, OSError) as exc:
        print(f"ipcmap: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (EmptyCorpus, EmptyGraph) as exc:
        print(f"ipcmap: empty result: {exc}", file=sys.stderr)
        return EXIT_EMPTY


if __name__ == "__main__":
    sys.exit(main())
