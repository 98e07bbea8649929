"""Named suites bundling the kernel, subsystem and congruence checks."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .congruence import (
    LengthMismatch,
    QuotientError,
    build_quotient,
    check_isomorphic,
    check_proj_section_identity,
    check_tilde_ob_quotient,
    cong_close,
    context_collapse,
    extend_to_mor,
    kernel_relation,
    regular_congruence,
    roundtrip_injectivity,
)
from .instances import Fragment, FragmentConfig, from_config
from .kernel import (
    FAIL,
    PASS,
    SKIPPED,
    CheckReport,
    CSystem,
    Recorder,
    WindowOverflow,
    check_all_pullbacks,
    check_c0_axioms,
    check_s_axioms,
    check_sf_from_pullback,
    op_delta,
    sort_key,
)
from .subsystems import (
    SubsystemSeed,
    check_closed,
    check_determination,
    check_roundtrip,
    close_window,
    verify_subsystem_lemmas,
)


@dataclass
class SuiteReport:
    suite: str
    checks: list[CheckReport] = field(default_factory=list)
    wall_time: float = 0.0
    artifacts: dict[str, Any] = field(default_factory=dict)

    @property
    def totals(self) -> dict[str, int]:
        out = {PASS: 0, FAIL: 0, SKIPPED: 0}
        for c in self.checks:
            out[c.status] += 1
        return out

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.status == PASS for c in self.checks)

    @property
    def failed(self) -> bool:
        return any(c.status == FAIL for c in self.checks)

    def to_json(self, timing: bool = False) -> dict:
        # wall time is left out by default so that reports are reproducible byte for byte
        out = {
            "suite": self.suite,
            "checks": [c.to_json() for c in self.checks],
            "totals": self.totals,
        }
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out


@dataclass
class Suite:
    """A suite to run: which instance, which fragment, which checks."""

    name: str
    kind: str
    instance: dict
    fragment: FragmentConfig
    params: dict = field(default_factory=dict)

    def run(self) -> SuiteReport:
        cs = from_config(self.instance)
        fragment = Fragment(cs, self.fragment)
        runner = SUITE_KINDS[self.kind]
        report = runner(cs, fragment, **self.params)
        report.suite = self.name
        return report


def _timed(name: str, body: Callable[[SuiteReport], None]) -> SuiteReport:
    report = SuiteReport(name)
    start = time.perf_counter()
    body(report)
    report.wall_time = time.perf_counter() - start
    return report


def suite_c0_c(cs: CSystem, fragment) -> SuiteReport:
    def body(r):
        r.checks += [check_c0_axioms(cs, fragment), check_s_axioms(cs, fragment)]

    return _timed("c0_c", body)


def suite_prop_pullback(cs: CSystem, fragment) -> SuiteReport:
    def body(r):
        r.checks += [check_all_pullbacks(cs, fragment), check_sf_from_pullback(cs, fragment)]

    return _timed("prop_pullback", body)


def companion_seed(cs: CSystem, seed: SubsystemSeed, L: int) -> SubsystemSeed:
    """A seed presenting the same subsystem: objects X replaced by δ(X) where it fits."""
    objects, sections = [], list(seed.sections)
    for X in seed.objects:
        if 0 < X.length and X.length + 1 <= L:
            sections.append(op_delta(cs, X))
        else:
            objects.append(X)
    return SubsystemSeed(objects, sections)


def suite_subsystem(
    cs: CSystem, fragment, seed: SubsystemSeed | None = None, L: int | None = None,
    second: SubsystemSeed | None = None,
) -> SuiteReport:
    seed = seed or SubsystemSeed()
    L = fragment.max_len if L is None else L
    second = second or companion_seed(cs, seed, L)

    def body(r):
        window = close_window(cs, seed, L)
        other = close_window(cs, second, L)
        r.artifacts["window"] = window.to_json(cs)
        r.checks += [
            check_closed(cs, window.B, window.Bt, L),
            verify_subsystem_lemmas(cs, window, fragment),
            check_roundtrip(cs, window, fragment),
            check_determination(cs, window, other, fragment),
        ]

    return _timed("subsystem", body)


def _failed_step(name: str, cs: CSystem, condition: str, inputs: Any, expected: Any, actual: Any) -> CheckReport:
    rec = Recorder(name, cs)
    rec.cases += 1
    rec.fail(condition, inputs, expected, actual)
    return rec.report()


def suite_congruence(
    cs: CSystem, fragment, seed_pairs: Sequence[tuple] = (),
    target: CSystem | None = None, maps: tuple | None = None,
) -> SuiteReport:
    """The whole pipeline from a relation seed to the quotient and back.

    Steps after a failing prerequisite are not run: their preconditions are
    exactly what failed.
    """

    def body(r):
        rec = Recorder("cong_close", cs)
        try:
            ob, sect = cong_close(cs, seed_pairs, fragment)
        except LengthMismatch as exc:
            r.checks.append(_failed_step("cong_close", cs, "prop_2_length", exc.pair, "equal lengths", "different lengths"))
            return
        for a, b in seed_pairs:
            rec.holds("seed_in_closure", (a, b), lambda: (ob if a in ob else sect).same(a, b))
        rec.flag("escapes", ob.notes["escapes"])
        rec.flag("ob_classes_merged", len(ob.nontrivial()))
        rec.flag("sect_classes_merged", len(sect.nontrivial()))
        rec.note("fixpoint_rounds", ob.notes["rounds"])
        rec.holds("fixpoint_reached", (), lambda: True)
        r.checks.append(rec.report())

        try:
            rel, prop, definition = regular_congruence(cs, ob, sect, fragment)
        except WindowOverflow as exc:
            r.checks.append(_skipped("extend_to_mor", cs, str(exc)))
            return
        r.checks += [prop, definition, check_proj_section_identity(cs, fragment)]
        r.artifacts["relation"] = rel.to_json(cs)
        if not (prop.passed and definition.passed):
            return
        try:
            quotient = build_quotient(cs, rel, fragment)
        except QuotientError as exc:
            r.checks.append(exc.report)
            return
        r.checks.append(quotient.report)
        qfrag = Fragment(quotient, fragment.config)
        for check in (check_c0_axioms, check_s_axioms):
            qr = check(quotient, qfrag)
            qr.name = f"quotient_{qr.name}"
            r.checks.append(qr)
        r.checks.append(check_tilde_ob_quotient(cs, rel, fragment, quotient))
        r.checks.append(roundtrip_injectivity(cs, rel, fragment))
        if target is not None:
            tfrag = Fragment(target, fragment.config)
            r.checks.append(check_isomorphic(quotient, target, tfrag, *maps))
        r.artifacts["quotient"] = quotient.to_json()
        r.artifacts["quotient_object"] = quotient

    return _timed("congruence", body)


def _skipped(name: str, cs: CSystem, reason: str) -> CheckReport:
    rec = Recorder(name, cs)
    rec.undecidable(reason)
    return rec.report()


# -- fixtures -------------------------------------------------------------------

FIXTURES: list[dict] = [
    {"name": "unit", "instance": {"kind": "unit"}, "max_len": 4},
    {"name": "context_2", "instance": {"kind": "context", "base_sizes": [2]}, "max_len": 3},
    {"name": "context_2_2", "instance": {"kind": "context", "base_sizes": [2, 2]}, "max_len": 2},
    {"name": "universe_1_2", "instance": {"kind": "universe", "els": [1, 2]}, "max_len": 2},
]


def default_seeds(cs: CSystem, fragment, L: int) -> list[tuple[str, SubsystemSeed]]:
    """Six deterministic seeds: empty, two objects, two sections and a mixed one."""
    objects = [X for X in fragment.objects if 0 < X.length <= L]
    sections = sorted((s for s in fragment.sections() if s.target.length <= L), key=sort_key)
    seeds = [("empty", SubsystemSeed())]
    if objects:
        seeds.append(("first_object", SubsystemSeed([objects[0]])))
        top = [X for X in objects if X.length == min(2, L)]
        seeds.append(("last_object", SubsystemSeed([top[-1]])))
    if sections:
        seeds.append(("first_section", SubsystemSeed([], [sections[0]])))
        seeds.append(("last_section", SubsystemSeed([], [sections[-1]])))
    if objects and sections:
        seeds.append(("mixed", SubsystemSeed([objects[-1]], [sections[len(sections) // 2]])))
    return seeds


def congruence_window(cs: CSystem, config: FragmentConfig) -> int:
    """Largest window whose auxiliary level survives the point cap."""
    L = config.max_len
    while L > 0:
        aux = Fragment(cs, FragmentConfig(L + 1, config.point_cap, config.hom_cap, config.rng_seed, config.case_cap))
        if not aux.dropped_objects:
            break
        L -= 1
    return L


def fixture_suites(fixture: dict, config: FragmentConfig | None = None) -> list[SuiteReport]:
    """Every suite for one fixture; ``config.max_len`` of None means the fixture's own."""
    cs = from_config(fixture["instance"])
    base = config or FragmentConfig()
    cfg = FragmentConfig(fixture["max_len"], base.point_cap, base.hom_cap, base.rng_seed, base.case_cap)
    fragment = Fragment(cs, cfg)
    name = fixture["name"]
    reports = []
    for kind, run in (("c0_c", suite_c0_c), ("prop_pullback", suite_prop_pullback)):
        rep = run(cs, fragment)
        rep.suite = f"{name}/{kind}"
        reports.append(rep)
    for label, seed in default_seeds(cs, fragment, cfg.max_len):
        rep = suite_subsystem(cs, fragment, seed)
        rep.suite = f"{name}/subsystem/{label}"
        reports.append(rep)

    L = congruence_window(cs, cfg)
    cfrag = fragment if L == cfg.max_len else Fragment(cs, FragmentConfig(L, cfg.point_cap, cfg.hom_cap, cfg.rng_seed, cfg.case_cap))
    rep = suite_congruence(cs, cfrag)
    rep.suite = f"{name}/congruence/discrete"
    reports.append(rep)
    if fixture["instance"] == {"kind": "context", "base_sizes": [2, 2]}:
        from .instances import build_context

        small = build_context([2])
        maps = context_collapse(cs, small)
        rep = suite_congruence(cs, cfrag, kernel_relation(cs, cfrag, *maps), small, maps)
        rep.suite = f"{name}/congruence/collapse"
        reports.append(rep)
    for rep in reports:
        rep.artifacts.pop("quotient_object", None)
    return reports


def suite_all(config: FragmentConfig | None = None, fixtures: Sequence[dict] = FIXTURES) -> list[SuiteReport]:
    reports = []
    for fixture in fixtures:
        reports += fixture_suites(fixture, config)
    return reports


def reports_json(reports: Sequence[SuiteReport], timing: bool = False) -> str:
    totals = {PASS: 0, FAIL: 0, SKIPPED: 0}
    for rep in reports:
        for k, v in rep.totals.items():
            totals[k] += v
    body = {"suites": [r.to_json(timing) for r in reports], "totals": totals}
    return json.dumps(body, indent=2, sort_keys=True)


SUITE_KINDS: dict[str, Callable[..., SuiteReport]] = {
    "c0_c": suite_c0_c,
    "prop_pullback": suite_prop_pullback,
    "subsystem": suite_subsystem,
    "congruence": suite_congruence,
}
