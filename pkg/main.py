"""Command line front end: spectra, peak reports and verification runs."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from amplitudes import ProcessKind
from config_loader import RunConfig, apply_overrides, parse_config, read_raw_config, threads_from_env
from covariance import COVARIANCE_CHECKS, VerificationReport, check_oracle_equivalence
from errors import ConfigError, DomainError, VerificationFailure
from peaks_report import format_table, read_spectrum_csv, report, write_plot_script, write_spectrum_csv
from spectrum import integral_mass_spectrum

LOGGER = logging.getLogger("mspec")

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DOMAIN = 4

SUBCOMMANDS = ("spectrum", "peaks", "verify", "oracle")

# CLI flag -> configuration key
FLAG_KEYS = {
    "process": "process",
    "out": "output_path",
    "threads": "threads",
    "seed": "seed",
    "trials": "trials",
    "min_prominence": "min_prominence",
    "reference_mass": "reference_mass",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mspec",
        description="Integral mass spectra of tree-level two-body processes.",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", type=Path, help="YAML file with listing parameters")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a configuration key (repeatable)",
    )
    parser.add_argument("--process", choices=[kind.value for kind in ProcessKind])
    parser.add_argument("--out", help="spectrum CSV path")
    parser.add_argument("--threads", type=int, help="worker threads, 0 = all cores")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--trials", type=int)
    parser.add_argument("--min-prominence", type=float)
    parser.add_argument("--reference-mass", type=float)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """File values, then ``--set`` overrides, then dedicated flags."""
    if args.config is not None:
        raw: dict[str, Any] = read_raw_config(args.config)
        base_dir = args.config.parent
    else:
        raw = {}
        base_dir = Path.cwd()

    if "threads" not in raw:
        env_threads = threads_from_env(default=-1)
        if env_threads >= 0:
            raw["threads"] = env_threads

    raw = apply_overrides(raw, args.overrides)
    for flag, key in FLAG_KEYS.items():
        value = getattr(args, flag)
        if value is not None:
            raw[key] = value
    return parse_config(raw, base_dir)


def run_spectrum(config: RunConfig, logger: logging.Logger) -> int:
    spec = config.process_spec()
    curve = integral_mass_spectrum(spec, config.quadrature, logger, workers=config.worker_count())
    peak_report = report(curve, config.min_prominence, config.reference_mass)

    write_spectrum_csv(config.output_path, curve, peak_report)
    script = write_plot_script(
        config.output_path,
        title=f"{spec.process.value} integral mass spectrum",
        mass_symbol=spec.candidate_mass_symbol,
    )
    logger.info("Spectrum written to %s (plot script %s)", config.output_path, script)
    print(format_table(peak_report))
    return EXIT_OK


def run_peaks(config: RunConfig, logger: logging.Logger) -> int:
    curve = read_spectrum_csv(config.output_path)
    logger.info("Loaded %d bins from %s", len(curve.masses), config.output_path)
    print(format_table(report(curve, config.min_prominence, config.reference_mass)))
    return EXIT_OK


def _run_reports(checks: Sequence[tuple[str, Any]], logger: logging.Logger) -> int:
    status = EXIT_OK
    for name, check in checks:
        try:
            result: VerificationReport = check()
        except VerificationFailure as exc:
            logger.error("%s", exc)
            result = exc.report
            status = EXIT_VERIFICATION
        verdict = "ok" if result.passed else "FAILED"
        print(
            f"{name:<22} trials={result.trials:<6} max_residual={result.max_residual:.3e} "
            f"tolerance={result.tolerance:.1e} {verdict}"
        )
    return status


def run_verify(config: RunConfig, logger: logging.Logger) -> int:
    logger.info("Running covariance checks: %d trials, seed %d", config.trials, config.seed)
    checks = [
        (check.__name__.removeprefix("check_"), lambda check=check: check(config.trials, config.seed))
        for check in COVARIANCE_CHECKS
    ]
    return _run_reports(checks, logger)


def run_oracle(config: RunConfig, logger: logging.Logger) -> int:
    logger.info("Comparing closed-form and spinor-sum amplitudes: %d trials, seed %d", config.trials, config.seed)
    checks = []
    for kind in ProcessKind:
        spec = config.process_spec(kind)
        checks.append(
            (
                f"oracle {kind.value}",
                lambda spec=spec: check_oracle_equivalence(spec, config.trials, config.seed),
            )
        )
    return _run_reports(checks, logger)


RUNNERS = {
    "spectrum": run_spectrum,
    "peaks": run_peaks,
    "verify": run_verify,
    "oracle": run_oracle,
}


def run(subcommand: str, config: RunConfig, logger: logging.Logger = LOGGER) -> int:
    return RUNNERS[subcommand](config, logger)


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run the subcommand and map failures to exit codes."""
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)

    try:
        config = resolve_config(args)
        return run(args.subcommand, config)
    except ConfigError as exc:
        LOGGER.error("Invalid configuration: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        LOGGER.error("I/O error: %s", exc)
        return EXIT_IO
    except DomainError as exc:
        LOGGER.error("Numerical domain error: %s", exc)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
