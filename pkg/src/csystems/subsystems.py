"""C-subsystems presented by pairs (B, B~) of objects and sections.

Every nontrivial subsystem is infinite: delta(X) lives over an object one
longer than X.  Closures are therefore computed inside a length window
``l <= L``; anything a closure step produces above the window goes on the
frontier and is not used further.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from itertools import count
from typing import Any, Iterable

from .kernel import (
    CheckReport,
    CSystem,
    DomainError,
    Mor,
    Ob,
    Recorder,
    Section,
    WindowOverflow,
    as_section,
    ft_iter,
    ft_mor,
    level_offset,
    op_delta,
    op_St,
    op_Tt,
    proj_iter,
    sect_pull,
)


@dataclass
class SubsystemSeed:
    objects: list[Ob] = field(default_factory=list)
    sections: list[Section] = field(default_factory=list)

    @classmethod
    def from_json(cls, cs: CSystem, data: Any) -> "SubsystemSeed":
        if not isinstance(data, dict):
            raise ValueError("seed must be an object with 'objects' and 'sections'")
        unknown = set(data) - {"objects", "sections"}
        if unknown:
            raise ValueError(f"unknown seed fields: {sorted(unknown)}")
        objects = [cs.decode_ob(enc) for enc in data.get("objects", [])]
        try:
            sections = [as_section(cs, cs.decode_mor(enc)) for enc in data.get("sections", [])]
        except DomainError as exc:
            raise ValueError(str(exc)) from exc
        return cls(objects, sections)

    def to_json(self, cs: CSystem) -> dict:
        return {
            "objects": [cs.encode_ob(X) for X in self.objects],
            "sections": [cs.encode_mor(s.mor) for s in self.sections],
        }


@dataclass
class SubsystemWindow:
    B: frozenset[Ob]
    Bt: frozenset[Section]
    L: int
    frontier: list = field(default_factory=list)
    saturated_within_window: bool = True

    def to_json(self, cs: CSystem) -> dict:
        return {
            "L": self.L,
            "B": [cs.encode_ob(X) for X in sorted(self.B, key=Ob.sort_key)],
            "B_tilde": [cs.encode_mor(s.mor) for s in sorted(self.Bt, key=Section.sort_key)],
            "frontier": [cs.describe(e) for e in self.frontier],
            "saturated_within_window": self.saturated_within_window,
        }


def _tt(cs: CSystem, Y: Ob, r: Section) -> Section | None:
    if Y.length == 0 or level_offset(cs, Y, r.target) is None:
        return None
    return op_Tt(cs, Y, r)


def _st(cs: CSystem, s: Section, r: Section) -> Section | None:
    i = r.target.length - s.target.length
    if i < 1 or ft_iter(cs, r.target, i) != s.target:
        return None
    return op_St(cs, s, r)


def close_window(
    cs: CSystem, seed: SubsystemSeed, L: int, budget: int | None = None, margin: int | None = None
) -> SubsystemWindow:
    """Smallest (B, B~) containing the seed and closed under the six
    conditions, restricted to length <= L.

    Saturation runs in a larger internal window ``L + margin`` (default
    margin L) because deriving an object of length L may pass through
    longer sections: T(Y, X) is the boundary of T~(Y, delta(X)).  The result
    is cut down to L; the elements found at length L + 1 form the frontier.

    The worklist is processed by (length, kind, canonical key).  Each new
    element is combined with every element already processed, so each
    pair is tried once.
    """
    H = L + (L if margin is None else margin)
    B: set[Ob] = set()
    Bt: set[Section] = set()
    heap: list = []
    tick = count()
    done_obs: list[Ob] = []
    done_secs: list[Section] = []

    def add_ob(X: Ob) -> None:
        if X.length <= H and X not in B:
            B.add(X)
            heapq.heappush(heap, (X.length, 0, X.sort_key(), next(tick), X))

    def add_sec(s: Section | None) -> None:
        if s is not None and s.target.length <= H and s not in Bt:
            Bt.add(s)
            heapq.heappush(heap, (s.target.length, 1, s.sort_key(), next(tick), s))

    add_ob(cs.pt())
    for X in seed.objects:
        add_ob(X)
    for s in seed.sections:
        add_sec(s)

    saturated = True
    while heap:
        if budget is not None and len(done_obs) + len(done_secs) >= budget:
            saturated = False
            break
        *_, e = heapq.heappop(heap)
        if isinstance(e, Ob):
            add_ob(cs.ft(e))
            if e.length > 0:
                add_sec(op_delta(cs, e))
            for r in done_secs:
                add_sec(_tt(cs, e, r))
            done_obs.append(e)
        else:
            add_ob(e.target)
            for Y in done_obs:
                add_sec(_tt(cs, Y, e))
            add_sec(_st(cs, e, e))
            for r in done_secs:
                add_sec(_st(cs, e, r))
                add_sec(_st(cs, r, e))
            done_secs.append(e)

    frontier = [X for X in B if X.length == L + 1] + [s for s in Bt if s.target.length == L + 1]
    ordered = sorted(frontier, key=lambda e: (isinstance(e, Section), e.sort_key()))
    inner_B = frozenset(X for X in B if X.length <= L)
    inner_Bt = frozenset(s for s in Bt if s.target.length <= L)
    return SubsystemWindow(inner_B, inner_Bt, L, ordered, saturated)


def check_closed(cs: CSystem, B: Iterable[Ob], Bt: Iterable[Section], L: int) -> CheckReport:
    B = set(B)
    Bt = set(Bt)
    rec = Recorder("subsystem_closed", cs)
    obs = sorted(B, key=Ob.sort_key)
    secs = sorted(Bt, key=Section.sort_key)

    def inside(condition: str, inputs, result, pool) -> None:
        if result is None:
            return
        length = result.length if isinstance(result, Ob) else result.target.length
        if length > L:
            rec.note("beyond_window")
            return
        rec.holds(condition, inputs, lambda: result in pool)

    rec.holds("cond1_pt", (), lambda: cs.pt() in B)
    for X in obs:
        rec.holds("window", (X,), lambda: X.length <= L)
        inside("cond2_ft", (X,), cs.ft(X), B)
        if X.length > 0:
            inside("cond6_delta", (X,), op_delta(cs, X), Bt)
    for s in secs:
        rec.holds("window", (s,), lambda: s.target.length <= L)
        inside("cond3_partial", (s,), s.target, B)
    for Y in obs:
        for r in secs:
            inside("cond4_T_tilde", (Y, r), _tt(cs, Y, r), Bt)
    for s in secs:
        for r in secs:
            inside("cond5_S_tilde", (s, r), _st(cs, s, r), Bt)
    return rec.report()


def mor_member(cs: CSystem, f: Mor, B, Bt, L: int) -> bool:
    """Membership in the morphisms induced by (B, B~), by recursion on l(target).

    ``Y -> pt`` is a member iff ``Y`` is in B; otherwise ``f: Y -> X`` is a
    member iff ``X`` is in B, ``s_f`` is in B~ and ``ft(f)`` is a member.
    Raises :class:`WindowOverflow` when an answer needs elements above L.
    """
    while True:
        X = f.target
        if X.length == 0:
            if f.source.length > L:
                raise WindowOverflow(f"source of {f!r} is above the window")
            return f.source in B
        if X.length > L:
            raise WindowOverflow(f"target of {f!r} is above the window")
        if X not in B:
            return False
        if f.source.length + 1 > L:
            raise WindowOverflow(f"s_f of {f!r} lies above the window")
        if Section(cs.sf(f)) not in Bt:
            return False
        f = ft_mor(cs, f)


def _decidable_member(cs, f, window) -> bool | None:
    try:
        return mor_member(cs, f, window.B, window.Bt, window.L)
    except WindowOverflow:
        return None


def member_morphisms(cs: CSystem, window: SubsystemWindow, fragment) -> list[Mor]:
    objs = [X for X in fragment.objects if X in window.B]
    return [
        f
        for Y in objs
        for X in objs
        for f in fragment.hom(Y, X)
        if _decidable_member(cs, f, window)
    ]


def verify_subsystem_lemmas(cs: CSystem, window: SubsystemWindow, fragment) -> CheckReport:
    """The lemmas showing that the induced morphisms form a C-subsystem.

    Conditions are named after the lemma they test: projections,
    section_pullback, composition, q_closure and pullback_in_subsystem.
    """
    rec = Recorder("subsystem_lemmas", cs)
    B, Bt, L = window.B, window.Bt, window.L

    def member(f: Mor) -> bool:
        return mor_member(cs, f, B, Bt, L)

    members = member_morphisms(cs, window, fragment)
    rec.flag("members", len(members))
    by_target: dict[Ob, list[Mor]] = {}
    by_source: dict[Ob, list[Mor]] = {}
    for f in members:
        by_target.setdefault(f.target, []).append(f)
        by_source.setdefault(f.source, []).append(f)
    obs = sorted(B, key=Ob.sort_key)

    for X in obs:
        for i in range(X.length + 1):
            rec.holds("lemma_projections", (X, i), lambda: member(proj_iter(cs, X, i)))

    for r in sorted(Bt, key=Section.sort_key):
        Xr = r.target
        for i in range(1, Xr.length + 1):
            for f in fragment.pick(("lemma_sp", r, i), by_target.get(ft_iter(cs, Xr, i), [])):
                def pulled():
                    s = sect_pull(cs, f, r, i)
                    if s.target.length > L:
                        raise WindowOverflow("pulled-back section above the window")
                    return s in Bt
                rec.holds("lemma_section_pullback", (f, r, i), pulled)

    for Y in obs:
        for Z in obs:
            for X in obs:
                into = [g for g in by_source.get(Z, []) if g.target == Y]
                out = [f for f in by_source.get(Y, []) if f.target == X]
                for g, f in fragment.tuples(("lemma_comp", Z, Y, X), into, out):
                    rec.holds("lemma_composition", (g, f), lambda: member(cs.comp(g, f)))

    for X in obs:
        if X.length == 0:
            continue
        pX = cs.ft(X)
        for f in fragment.pick(("lemma_q", X), by_target.get(pX, [])):
            def q_closed():
                W = cs.star(f, X)
                if W.length > L:
                    raise WindowOverflow("f*X above the window")
                return W in B and member(cs.q(f, X))
            rec.holds("lemma_q_closure", (f, X), q_closed)

            W = cs.star(f, X)
            if W.length > L:
                continue
            qf, pW = cs.q(f, X), cs.p(W)
            for Z in obs:
                for g in fragment.pick(("lemma_pb", f, X, Z), fragment.hom(Z, W)):
                    legs = (_decidable_member(cs, cs.comp(g, pW), window), _decidable_member(cs, cs.comp(g, qf), window))
                    if legs != (True, True):
                        continue
                    rec.holds("lemma_pullback_in_subsystem", (g, f, X), lambda: member(g))
    return rec.report()


def check_roundtrip(cs: CSystem, window: SubsystemWindow, fragment) -> CheckReport:
    """(Ob, Ob~) of the induced sub-pre-category is exactly (B, B~)."""
    rec = Recorder("subsystem_roundtrip", cs)
    for X in fragment.objects:
        if X.length > window.L:
            continue
        rec.expect("objects", (X,), lambda: (X in window.B, mor_member(cs, cs.ident(X), window.B, window.Bt, window.L)))
    for s in fragment.sections():
        if s.target.length > window.L:
            continue
        rec.expect("sections", (s,), lambda: (s in window.Bt, mor_member(cs, s.mor, window.B, window.Bt, window.L)))
        rec.expect("section_sf_fixpoint", (s,), lambda: (s.mor, cs.sf(s.mor)))
    return rec.report()


def check_determination(cs: CSystem, w1: SubsystemWindow, w2: SubsystemWindow, fragment) -> CheckReport:
    """Windows with the same (B, B~) induce the same morphisms; windows with
    the same B~ have the same B strictly between length 0 and L."""
    rec = Recorder("subsystem_determination", cs)
    L = min(w1.L, w2.L)
    same_sections = w1.Bt == w2.Bt
    same_objects = w1.B == w2.B
    rec.flag("hypothesis_same_B", same_objects)
    rec.flag("hypothesis_same_B_tilde", same_sections)
    if same_sections and same_objects:
        for Y in fragment.objects:
            for X in fragment.objects:
                for f in fragment.pick(("det", Y, X), fragment.hom(Y, X)):
                    rec.expect(
                        "same_morphisms", (f,),
                        lambda: (_decidable_member(cs, f, w1), _decidable_member(cs, f, w2)),
                    )
    if same_sections:
        for X in sorted(w1.B | w2.B, key=Ob.sort_key):
            if not 0 < X.length < L:
                continue
            rec.expect("same_objects_above_0", (X,), lambda: (X in w1.B, X in w2.B))

            def recovered():
                d = op_delta(cs, X)
                return (True, X), (d in w1.Bt, cs.ft(d.target))

            rec.expect("object_from_delta", (X,), recovered)
    if not same_sections:
        rec.undecidable("windows differ on B_tilde")
    return rec.report()
