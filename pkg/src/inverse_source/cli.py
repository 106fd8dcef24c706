"""Command-line entry point.

    inverse-source run     [--config FILE] [overrides...]
    inverse-source compare [--config FILE] [--epsilons 0,0.9] [overrides...]

Exit status: 0 success, 1 configuration error, 2 solver or oracle failure
(including a reconstruction that fails forward verification).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .experiment import (
    ConfigError,
    ExperimentConfig,
    ExperimentError,
    compare_energy,
    load_config,
    run_experiment,
)

EXIT_OK, EXIT_CONFIG, EXIT_FAILURE = 0, 1, 2

log = logging.getLogger("inverse_source")


class _Parser(argparse.ArgumentParser):
    """Argument errors are configuration errors: exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file with section headers")
    p.add_argument("--operator", choices=["involution", "dirichlet_laplacian"])
    p.add_argument("--epsilon", type=float, help="involution strength, |epsilon| < 1")
    p.add_argument("--alpha", type=float, help="fractional order in (0, 1]")
    p.add_argument("--horizon", type=float, dest="T", help="final time T")
    p.add_argument("--modes", dest="truncations", help="comma-separated truncations, e.g. 7,10,20")
    p.add_argument("--snapshots", dest="snapshot_times", help="comma-separated snapshot times")
    p.add_argument("--space-n", type=int, dest="space_N", help="interior nodes of the oracle grid")
    p.add_argument("--time-m", type=int, dest="time_M", help="time steps of the oracle")
    p.add_argument("--tolerance", type=float, help="verification tolerance")
    p.add_argument("--out", dest="output_dir", help="output directory")
    p.add_argument("--plots", dest="emit_plots", action="store_const", const=True, help="write SVG plots")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="inverse-source", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    run = sub.add_parser("run", help="reconstruct u and f for each truncation")
    _add_common(run)
    cmp_ = sub.add_parser("compare", help="compare cooling energy across epsilon values")
    _add_common(cmp_)
    cmp_.add_argument("--epsilons", help="comma-separated epsilon values")
    return parser


_OVERRIDES = (
    "operator", "epsilon", "alpha", "T", "truncations", "snapshot_times",
    "space_N", "time_M", "tolerance", "output_dir", "emit_plots", "epsilons",
)


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {k: getattr(args, k, None) for k in _OVERRIDES}
    if args.config:
        return load_config(args.config, **overrides)
    return ExperimentConfig().with_overrides(**overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = config_from_args(args)
        if args.command == "run":
            result = run_experiment(config)
            failed = [r for r in result["verification"] if not r["passed"]]
        else:
            result = compare_energy(config)
            failed = [r for r in result["rows"] if not r["passed"]]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ExperimentError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_FAILURE

    if args.command == "run":
        for r in result["verification"]:
            status = "ok" if r["passed"] else "FAILED"
            print(f"l={r['l']:<4d} eps={r['epsilon']:<6g} terminal error {r['terminal_error']:.3e}  {status}")
        print(f"wrote {len(result['files'])} files + manifest to {config.output_dir}")
    else:
        print(json.dumps({k: v for k, v in result.items() if k != "rows"}))
        for r in result["rows"]:
            print(f"eps={r['epsilon']:<6g} |f|={r['f_norm']:.6g}  terminal error {r['terminal_error']:.3e}")
    for r in failed:
        print(f"verification failed at l={r['l']}, epsilon={r['epsilon']:g}", file=sys.stderr)
    return EXIT_FAILURE if failed else EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
