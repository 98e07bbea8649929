"""Command-line front end: ``csystems {check,close,quotient,suite-all}``."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from .checker import (
    FIXTURES,
    SuiteReport,
    reports_json,
    suite_all,
    suite_c0_c,
    suite_congruence,
    suite_prop_pullback,
    suite_subsystem,
)
from .congruence import relation_from_json
from .instances import Fragment, FragmentConfig, from_config
from .subsystems import SubsystemSeed

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    instance: str | None = None
    max_len: int | None = None
    point_cap: int = 8
    hom_cap: int = 4096
    rng_seed: int = 0
    format: str = "text"
    out: str | None = None

    def fragment_config(self, default_len: int = 3) -> FragmentConfig:
        max_len = default_len if self.max_len is None else self.max_len
        try:
            return FragmentConfig.from_json(
                {"max_len": max_len, "point_cap": self.point_cap, "hom_cap": self.hom_cap, "rng_seed": self.rng_seed}
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from exc


def _load_json(path: str | None, what: str) -> Any:
    if path is None:
        raise UsageError(f"{what} file is required")
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {what} file {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} file {path} is not valid JSON: {exc}") from exc


def _instance(cfg: CliConfig):
    data = _load_json(cfg.instance, "instance")
    try:
        return from_config(data)
    except ValueError as exc:
        raise UsageError(f"bad instance config: {exc}") from exc


def _exit_code(reports: Sequence[SuiteReport]) -> int:
    return EXIT_OK if reports and all(r.passed for r in reports) else EXIT_FAIL


def render_text(reports: Sequence[SuiteReport], artifacts: dict | None = None) -> str:
    lines = []
    for rep in reports:
        t = rep.totals
        lines.append(f"== {rep.suite}: {t['pass']} pass, {t['fail']} fail, {t['skipped']} skipped")
        for c in rep.checks:
            lines.append(f"  {c.status.upper():7} {c.name} ({c.cases} cases)")
            for stat, value in sorted(c.stats.items()):
                if stat.startswith("undecided") or stat == "out_of_window":
                    lines.append(f"          {stat}: {value}")
            for cx in c.counterexamples:
                lines.append(f"    counterexample [{cx['condition']}]")
                for key in ("inputs", "expected", "actual"):
                    lines.append(f"      {key}: {json.dumps(cx[key], sort_keys=True)}")
    for name, value in (artifacts or {}).items():
        lines.append(f"== {name}")
        lines.append(json.dumps(value, indent=2, sort_keys=True))
    return "\n".join(lines) + "\n"


def _emit(cfg: CliConfig, reports: Sequence[SuiteReport], artifacts: dict | None = None) -> int:
    if cfg.format == "json":
        body = json.loads(reports_json(reports))
        if artifacts:
            body["artifacts"] = artifacts
        text = json.dumps(body, indent=2, sort_keys=True) + "\n"
    else:
        text = render_text(reports, artifacts)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return _exit_code(reports)


def cmd_check(cfg: CliConfig) -> int:
    cs = _instance(cfg)
    fragment = Fragment(cs, cfg.fragment_config())
    reports = [suite_c0_c(cs, fragment), suite_prop_pullback(cs, fragment)]
    return _emit(cfg, reports)


def cmd_close(cfg: CliConfig, seed_path: str) -> int:
    cs = _instance(cfg)
    fragment = Fragment(cs, cfg.fragment_config())
    try:
        seed = SubsystemSeed.from_json(cs, _load_json(seed_path, "seed"))
    except ValueError as exc:
        raise UsageError(f"bad seed: {exc}") from exc
    report = suite_subsystem(cs, fragment, seed)
    return _emit(cfg, [report], {"window": report.artifacts["window"]})


def cmd_quotient(cfg: CliConfig, relation_path: str) -> int:
    cs = _instance(cfg)
    fragment = Fragment(cs, cfg.fragment_config())
    try:
        pairs = relation_from_json(cs, _load_json(relation_path, "relation"))
    except ValueError as exc:
        raise UsageError(f"bad relation: {exc}") from exc
    report = suite_congruence(cs, fragment, pairs)
    artifacts = {k: report.artifacts[k] for k in ("relation", "quotient") if k in report.artifacts}
    return _emit(cfg, [report], artifacts)


def cmd_suite_all(cfg: CliConfig) -> int:
    if cfg.instance is not None:
        fixtures = [{"name": Path(cfg.instance).stem, "instance": _load_json(cfg.instance, "instance"), "max_len": 3}]
        try:
            from_config(fixtures[0]["instance"])
        except ValueError as exc:
            raise UsageError(f"bad instance config: {exc}") from exc
    else:
        fixtures = FIXTURES
    if cfg.max_len is not None:
        fixtures = [dict(fx, max_len=cfg.max_len) for fx in fixtures]
    return _emit(cfg, suite_all(cfg.fragment_config(), fixtures))


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    common.add_argument("--instance", metavar="PATH", default=S, help="instance config JSON")
    common.add_argument("--max-len", type=int, metavar="N", default=S, help="window length (default 3)")
    common.add_argument("--point-cap", type=int, metavar="N", default=S, help="largest object kept (default 8)")
    common.add_argument("--hom-cap", type=int, metavar="N", default=S, help="hom-set sampling cap (default 4096)")
    common.add_argument("--rng-seed", type=int, metavar="N", default=S, help="sampling seed (default 0)")
    common.add_argument("--format", choices=("json", "text"), default=S, help="output format (default text)")
    common.add_argument("--out", metavar="PATH", default=S, help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="csystems", parents=[common], description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="C0/C axioms and the pullback equivalence")
    close = sub.add_parser("close", parents=[common], help="close a subsystem seed and run the lemma suite")
    close.add_argument("seed", metavar="SEED")
    quot = sub.add_parser("quotient", parents=[common], help="congruence pipeline and quotient dump")
    quot.add_argument("relation", metavar="REL")
    sub.add_parser("suite-all", parents=[common], help="every suite on every shipped fixture")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = vars(_parser().parse_args(argv))
    command = args.pop("command")
    cfg = CliConfig(**{k: v for k, v in args.items() if k in CliConfig.__dataclass_fields__})
    try:
        if command == "check":
            return cmd_check(cfg)
        if command == "close":
            return cmd_close(cfg, args["seed"])
        if command == "quotient":
            return cmd_quotient(cfg, args["relation"])
        return cmd_suite_all(cfg)
    except UsageError as exc:
        print(f"csystems: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
