"""Command line: ``python main.py <subcommand> [options]``.

Exit codes: 0 success, 1 failed checks or a run error, 2 usage or
configuration error. Everything a command writes goes under its output
directory.
"""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from pydantic import BaseModel, ConfigDict, ValidationError

from app.data import build_benchmark, export_dataset
from app.train import (
    StudyResult,
    run_ablation,
    run_design_study,
    run_dg,
    run_msda,
    run_msda_study,
    seed_list,
    write_manifest,
    write_run_csv,
    write_summary_csv,
)
from app.types import (
    ConfigurationError,
    MethodVariant,
    ProtocolMode,
    RunResult,
    SteamError,
    SubCommand,
    TrainConfig,
    echo_config,
    load_config,
)

from .config import get_settings
from .logging_config import configure_logging, logger
from .verify import log_report, verify_suite, write_report

DEFAULT_OUTPUT_DIR = Path("runs")


class CliCommand(BaseModel):
    """A parsed command line."""

    model_config = ConfigDict(frozen=True)

    subcommand: SubCommand
    config_path: Optional[Path] = None
    output_dir: Optional[Path] = None
    seed: Optional[int] = None
    variant: Optional[MethodVariant] = None

    @property
    def run_dir(self) -> Path:
        return self.output_dir or DEFAULT_OUTPUT_DIR / self.subcommand.value


class _Once(argparse.Action):
    """Store the value, refusing a second occurrence of the flag."""

    def __call__(
        self,
        parser: argparse.ArgumentParser,
        namespace: argparse.Namespace,
        values: Any,
        option_string: Optional[str] = None,
    ) -> None:
        seen = getattr(namespace, "_seen", set())
        if self.dest in seen:
            parser.error(f"{option_string} given more than once")
        seen.add(self.dest)
        namespace._seen = seen
        setattr(namespace, self.dest, values)


_HELP = {
    SubCommand.TRAIN: "leave-one-domain-out (or msda, per config) runs of one variant",
    SubCommand.ABLATION: "vanilla / vanilla-style / vanilla-semantic / steam over all seeds",
    SubCommand.DESIGN_STUDY: "steam against its three design alternatives",
    SubCommand.MSDA: "multi-source adaptation with an unlabeled target, next to paired dg runs",
    SubCommand.GEN_DATA: "export the synthetic benchmark as CSV",
    SubCommand.VERIFY: "gradient, oracle, closed-form and mechanism checks",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steam", description="Style and semantic memory banks for domain generalization.")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for sub in SubCommand:
        p = subparsers.add_parser(sub.value, help=_HELP[sub])
        p.add_argument("--output-dir", type=Path, action=_Once, help="run directory (default runs/<subcommand>)")
        if sub is SubCommand.VERIFY:
            continue
        p.add_argument("--config", dest="config_path", type=Path, action=_Once, help="flat key=value config file")
        p.add_argument("--seed", type=int, action=_Once, help="override the config seed")
        p.add_argument(
            "--variant",
            action=_Once,
            choices=[v.value for v in MethodVariant],
            help="override the config variant",
        )
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> CliCommand:
    """Parse ``argv``; usage errors exit with status 2."""
    namespace = build_parser().parse_args(argv)
    values = {k: v for k, v in vars(namespace).items() if not k.startswith("_") and v is not None}
    return CliCommand(**values)


def _resolve_config(command: CliCommand) -> TrainConfig:
    config = load_config(command.config_path)
    updates: dict[str, Any] = {}
    if command.seed is not None:
        updates["seed"] = command.seed
    if command.variant is not None:
        updates["variant"] = command.variant
    if command.subcommand is SubCommand.MSDA:
        updates["mode"] = ProtocolMode.MSDA
    if not updates:
        return config
    try:
        return TrainConfig.model_validate({**config.model_dump(), **updates})
    except ValidationError as e:
        first = e.errors()[0]
        key = str(first["loc"][0]) if first.get("loc") else None
        raise ConfigurationError(str(first.get("msg")), key=key) from None


def _write_run_dir(
    run_dir: Path,
    config: TrainConfig,
    runs: list[RunResult],
    variants: Sequence[MethodVariant],
    extra: Optional[dict[str, Any]] = None,
) -> None:
    echo_config(config, run_dir / "config.txt")
    write_run_csv(runs, run_dir / "runs.csv")
    write_summary_csv(runs, run_dir / "summary.csv", variants)
    write_manifest(
        run_dir / "manifest.json",
        config,
        seeds=seed_list(config),
        version=get_settings().app_version,
        extra=extra,
    )


def _train(command: CliCommand, config: TrainConfig) -> int:
    run_dir = command.run_dir
    run = run_msda if config.mode is ProtocolMode.MSDA else run_dg
    runs: list[RunResult] = []
    for seed in seed_list(config):
        runs.extend(run(config.model_copy(update={"seed": seed}), checkpoint_dir=run_dir / "checkpoints"))
    _write_run_dir(run_dir, config, runs, (config.variant,), {"subcommand": command.subcommand.value})
    return 0


def _study(runner: Callable[..., StudyResult]) -> Callable[[CliCommand, TrainConfig], int]:
    def handle(command: CliCommand, config: TrainConfig) -> int:
        run_dir = command.run_dir
        study = runner(config, workers=get_settings().workers, checkpoint_dir=run_dir / "checkpoints")
        _write_run_dir(
            run_dir,
            config,
            study.runs,
            study.variants,
            {"subcommand": command.subcommand.value, "study": study.name, "checks": study.checks},
        )
        for name, check in study.checks.items():
            logger.info("study check", extra={"study": study.name, "check": name, "value": check})
        return 0

    return handle


def _gen_data(command: CliCommand, config: TrainConfig) -> int:
    run_dir = command.run_dir
    dataset = build_benchmark(config)
    export_dataset(dataset, run_dir / "dataset.csv")
    echo_config(config, run_dir / "config.txt")
    write_manifest(
        run_dir / "manifest.json",
        config,
        seeds=[config.seed],
        version=get_settings().app_version,
        extra={"subcommand": command.subcommand.value, "samples": len(dataset)},
    )
    return 0


_HANDLERS: dict[SubCommand, Callable[[CliCommand, TrainConfig], int]] = {
    SubCommand.TRAIN: _train,
    SubCommand.ABLATION: _study(run_ablation),
    SubCommand.DESIGN_STUDY: _study(run_design_study),
    SubCommand.MSDA: _study(run_msda_study),
    SubCommand.GEN_DATA: _gen_data,
}


def _verify(command: CliCommand) -> int:
    report = verify_suite()
    log_report(report)
    if command.output_dir is not None:
        write_report(report, command.output_dir / "verify.json")
    return report.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    try:
        command = parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        if command.subcommand is SubCommand.VERIFY:
            status = _verify(command)
        else:
            status = _HANDLERS[command.subcommand](command, _resolve_config(command))
            logger.info("run directory written", extra={"output_dir": str(command.run_dir)})
    except ConfigurationError as e:
        logger.error("configuration error: %s", e)
        return 2
    except SteamError:
        logger.exception("run failed", extra={"subcommand": command.subcommand.value})
        return 1
    logger.info("done", extra={"subcommand": command.subcommand.value, "status": status})
    return status
