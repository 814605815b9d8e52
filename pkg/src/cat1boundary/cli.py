"""Command line: ``cat1boundary run`` and ``cat1boundary scene``.

Exit status: 0 when the suite passes, 1 when it fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

from .boundary import parse_space
from .scene import SceneError, emit_scene
from .suites import SUITES, SuiteError, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CONFIG_KEYS = ("space", "suite", "samples", "seed", "report", "format", "workers")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    space: str = "tree:3"
    suite: str = "ptolemy"
    samples: int = 1000
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    report: str | None = None
    format: str = "json"
    workers: int = 1

    def validate(self):
        try:
            parse_space(self.space)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if self.suite not in SUITES:
            raise UsageError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.samples < 1:
            raise UsageError("samples must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be a 64-bit unsigned integer")
        if self.format not in ("json", "csv"):
            raise UsageError("format must be json or csv")
        if self.workers < 1:
            raise UsageError("workers must be at least 1")
        for name, tol in self.tolerances.items():
            if name not in SUITES:
                raise UsageError(f"tolerance override for unknown suite {name!r}")
            if tol < 0:
                raise UsageError("tolerances must be nonnegative")
        return self

    def tolerance(self):
        return self.tolerances.get(self.suite)


def _set(cfg: RunConfig, key: str, value: str):
    try:
        if key.startswith("tol."):
            cfg.tolerances[key[4:]] = float(value)
        elif key in ("samples", "seed", "workers"):
            setattr(cfg, key, int(value))
        elif key in CONFIG_KEYS:
            setattr(cfg, key, value)
        else:
            raise UsageError(f"unknown config key {key!r}")
    except ValueError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"bad value for {key}: {value!r}") from exc


def read_config(path: str, cfg: RunConfig) -> RunConfig:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        _set(cfg, key, value)
    return cfg


def _split_tol_flags(argv):
    """Pull ``--tol.NAME VALUE`` / ``--tol.NAME=VALUE`` out of argv."""
    rest, tols = [], {}
    it = iter(argv)
    for arg in it:
        if arg.startswith("--tol."):
            key, eq, value = arg[2:].partition("=")
            if not eq:
                value = next(it, None)
                if value is None:
                    raise UsageError(f"{arg} needs a value")
            tols[key] = value
        else:
            rest.append(arg)
    return rest, tols


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cat1boundary",
        description="Seeded checks of boundary cross-ratio geometry for "
                    "hyperbolic spaces and trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a verification suite",
                         epilog="Tolerance overrides: --tol.SUITE VALUE. "
                                f"Suites: {', '.join(SUITES)}.")
    run.add_argument("--config", help="key = value file; flags override it")
    run.add_argument("--space", help="rh:N, ch:N, hh:N, oh:2 or tree:Q")
    run.add_argument("--suite")
    run.add_argument("--samples", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--report", help="write the report here (default: stdout)")
    run.add_argument("--format", choices=("json", "csv"))
    run.add_argument("--workers", type=int)

    scene = sub.add_parser("scene", help="emit plot data for a scenario")
    scene.add_argument("--space", default="rh:2")
    scene.add_argument("--scenario", required=True,
                       help="JSON scenario file, or fig2 / fig4")
    scene.add_argument("--out", help="output file (default: stdout)")
    return parser


def config_from_args(args, tol_flags) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        read_config(args.config, cfg)
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    for key, value in tol_flags.items():
        _set(cfg, key, value)
    return cfg.validate()


def cmd_run(cfg: RunConfig) -> int:
    try:
        rep = run_suite(cfg.suite, cfg.space, cfg.samples, cfg.seed,
                        tolerance=cfg.tolerance(), workers=cfg.workers)
    except SuiteError as exc:
        raise UsageError(str(exc)) from exc
    text = rep.to_json() if cfg.format == "json" else rep.to_csv()
    if cfg.report:
        with open(cfg.report, "w") as fh:
            fh.write(text)
        print(rep.summary())
    else:
        sys.stdout.write(text)
        print(rep.summary(), file=sys.stderr)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv, tol_flags = _split_tol_flags(argv)
        args = parser.parse_args(argv)
        if args.command == "run":
            return cmd_run(config_from_args(args, tol_flags))
        if tol_flags:
            raise UsageError("--tol.* applies to run only")
        text = emit_scene(args.space, args.scenario, args.out)
        if not args.out:
            sys.stdout.write(text)
        return EXIT_PASS
    except (UsageError, SceneError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse
        return EXIT_USAGE if exc.code else EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
