"""Command-line entry point: ``endqt run|export-chain|selftest``."""

from __future__ import annotations

import json
import logging
import sys
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Any

from absl import app, flags

from config import settings
from scenarios.artifacts import RunDirectory, load_snapshot
from scenarios.errors import InvalidConfig
from scenarios.runner import run_scenario
from scenarios.slices import slice_key

from .config import ConfigParseError, read_config, resolve_config
from .selftest import run_selftest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
COMMANDS = ("run", "export-chain", "selftest")

FLAGS = flags.FLAGS
flags.DEFINE_string("scenario", None, "Scenario: toy-sdc, wigners-friend, interferometer or epr-bell.")
flags.DEFINE_string("config", None, "JSON scenario config file.")
flags.DEFINE_integer("seed", None, "Master seed; overrides the config file.")
flags.DEFINE_integer("trials", None, "Number of trials; overrides the config file.")
flags.DEFINE_string("out", settings.OUTPUT_DIR, "Root directory for run directories.")
flags.DEFINE_bool("isolated", None, "Run with the lab isolated from the outside chain.")
flags.DEFINE_bool("open", None, "Run with the lab chain-connected.")
flags.mark_bool_flags_as_mutual_exclusive(["isolated", "open"])
flags.DEFINE_bool("d3", None, "Place detector D3 in the interferometer's upper arm.")
flags.DEFINE_enum("mode", None, ["prob", "det-chancy", "det-hv"], "Toy-SDC chance mode.")
flags.DEFINE_bool("json", False, "Print a machine-readable summary.")
flags.DEFINE_multi_string("set", [], "Config override key=value (dotted keys allowed).")
flags.DEFINE_bool("inject_bs_sign_error", False, "Flip the beam-splitter reflection phase.")
flags.DEFINE_float("t", None, "Time slice for export-chain.")


def _emit(payload: Mapping[str, Any], as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
        return
    for key, value in payload.items():
        print(f"{key}: {value}")


def cmd_run(
    scenario: str | None,
    config_path: str | None = None,
    overrides: Iterable[str] = (),
    flag_values: Mapping[str, Any] | None = None,
    out: str | Path = settings.OUTPUT_DIR,
    as_json: bool = False,
) -> int:
    """Resolve the config, write the manifest, run, write artifacts; 0 iff every expectation passes."""
    try:
        tree = read_config(config_path) if config_path else {}
        values = dict(flag_values or {})
        if scenario is not None:
            values["scenario"] = scenario
        config = resolve_config(tree, overrides, values)
    except ConfigParseError as exc:
        logger.error("Config error: %s", exc)
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidConfig as exc:
        logger.error("Invalid config: %s", exc)
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_USAGE

    run_dir = RunDirectory(out, config)
    run_dir.write_manifest(config_path)
    try:
        report = run_scenario(config)
    except InvalidConfig as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    run_dir.write_report(report)

    failures = [item.name for item in report.failures()]
    _emit(
        {
            "scenario": config.scenario.value,
            "seed": config.seed,
            "trials": config.trials,
            "run_dir": str(run_dir.path),
            "passed": report.passed,
            "failures": failures,
        },
        as_json,
    )
    return EXIT_OK if not failures else EXIT_FAILED


def cmd_export_chain(run_dir: str | Path, t: float) -> int:
    dot = load_snapshot(run_dir, slice_key(t))
    if dot is None:
        print(f"no chain snapshot at t={slice_key(t)} in {run_dir}", file=sys.stderr)
        return EXIT_FAILED
    print(dot, end="" if dot.endswith("\n") else "\n")
    return EXIT_OK


def cmd_selftest(
    trials: int = settings.SELFTEST_TRIALS,
    seed: int = settings.DEFAULT_SEED,
    inject_bs_sign_error: bool = False,
    as_json: bool = False,
) -> int:
    summary = run_selftest(trials=trials, seed=seed, inject_bs_sign_error=inject_bs_sign_error)
    if as_json:
        print(summary.model_dump_json(indent=2))
    else:
        for result in summary.results:
            print(f"{'ok  ' if result.passed else 'FAIL'} {result.name} {' '.join(result.failures)}")
    return EXIT_OK if summary.passed else EXIT_FAILED


def _lab_open() -> bool | None:
    if FLAGS.isolated:
        return False
    if FLAGS.open:
        return True
    return None


def main(argv: list[str]) -> int:
    logging.basicConfig(level=settings.LOG_LEVEL)
    args = argv[1:]
    if not args or args[0] not in COMMANDS:
        print(f"usage: endqt {{{'|'.join(COMMANDS)}}} [args] [flags]", file=sys.stderr)
        return EXIT_USAGE
    command, rest = args[0], args[1:]

    if command == "run":
        scenario = rest[0] if rest else FLAGS.scenario
        flag_values = {
            "seed": FLAGS.seed,
            "trials": FLAGS.trials,
            "mode": FLAGS.mode,
            "d3_present": FLAGS.d3,
            "lab_open": _lab_open(),
            "inject_bs_sign_error": True if FLAGS.inject_bs_sign_error else None,
        }
        return cmd_run(scenario, FLAGS.config, FLAGS.set, flag_values, FLAGS.out, FLAGS.json)

    if command == "export-chain":
        if not rest:
            print("usage: endqt export-chain <run_dir> [t]", file=sys.stderr)
            return EXIT_USAGE
        try:
            t = float(rest[1]) if len(rest) > 1 else FLAGS.t
        except ValueError:
            print(f"time slice {rest[1]!r} is not a number", file=sys.stderr)
            return EXIT_USAGE
        if t is None:
            print("export-chain needs a time slice", file=sys.stderr)
            return EXIT_USAGE
        return cmd_export_chain(rest[0], t)

    return cmd_selftest(
        trials=FLAGS.trials or settings.SELFTEST_TRIALS,
        seed=FLAGS.seed if FLAGS.seed is not None else settings.DEFAULT_SEED,
        inject_bs_sign_error=FLAGS.inject_bs_sign_error,
        as_json=FLAGS.json,
    )


def run() -> None:
    app.run(main)


__all__ = ["cmd_export_chain", "cmd_run", "cmd_selftest", "main", "run"]


if __name__ == "__main__":
    run()
