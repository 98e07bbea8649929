"""Regular congruences on a windowed fragment and the quotients they induce.

A congruence is presented by a pair of partitions: ``ob`` on objects and
``sect`` on sections.  Both live on the *auxiliary* fragment, one length
above the working window, because the sections ``s_f`` of morphisms between
window objects sit there.  The morphism partition ``mor`` is derived from
them and covers every listed morphism of the window itself.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

from .kernel import (
    CSystem,
    CheckReport,
    DomainError,
    Mor,
    Ob,
    Recorder,
    Section,
    WindowOverflow,
    as_section,
    ft_iter,
    ft_mor,
    nested_projection_section,
    op_delta,
    op_S,
    op_St,
    op_T,
    op_Tt,
    proj_iter,
    sort_key,
)


class LengthMismatch(ValueError):
    """A seed pair relates elements of different lengths."""

    def __init__(self, pair: tuple):
        super().__init__(f"seed pair relates elements of different lengths: {pair!r}")
        self.pair = pair


class QuotientError(ValueError):
    """The induced quotient operations depend on the choice of representative."""

    def __init__(self, report: CheckReport):
        super().__init__(f"quotient is not well defined ({len(report.counterexamples)} counterexamples)")
        self.report = report


# -- partitions -------------------------------------------------------------


class Partition:
    """Union-find over a fixed element set; the root of a class is its least element."""

    def __init__(self, elements: Iterable[Any]):
        self._parent: dict[Any, Any] = {}
        self._members: dict[Any, list] = {}
        for e in sorted(set(elements), key=sort_key):
            self._parent[e] = e
            self._members[e] = [e]
        self.notes: dict[str, Any] = {}

    def __contains__(self, x: Any) -> bool:
        return x in self._parent

    def __len__(self) -> int:
        return len(self._parent)

    @property
    def elements(self) -> list:
        return list(self._parent)

    def find(self, x: Any) -> Any:
        parent = self._parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: Any, b: Any) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if sort_key(rb) < sort_key(ra):
            ra, rb = rb, ra
        self._parent[rb] = ra
        merged = self._members.pop(rb)
        self._members[ra] = sorted(self._members[ra] + merged, key=sort_key)
        return True

    def same(self, a: Any, b: Any) -> bool:
        return self.find(a) == self.find(b)

    def members(self, x: Any) -> list:
        return self._members[self.find(x)]

    def classes(self) -> list[list]:
        return [self._members[r] for r in sorted(self._members, key=sort_key)]

    def blocks(self) -> frozenset:
        return frozenset(frozenset(c) for c in self._members.values())

    def restrict(self, elements: Iterable[Any]) -> "Partition":
        keep = [e for e in elements if e in self._parent]
        out = type(self)(keep)
        by_root: dict[Any, Any] = {}
        for e in out.elements:
            r = self.find(e)
            if r in by_root:
                out.union(by_root[r], e)
            else:
                by_root[r] = e
        return out

    def copy(self) -> "Partition":
        out = type(self)(self._parent)
        for cls in self.classes():
            for e in cls[1:]:
                out.union(cls[0], e)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.blocks() == other.blocks()

    __hash__ = None  # mutable

    def nontrivial(self) -> list[list]:
        return [c for c in self.classes() if len(c) > 1]


class ObPartition(Partition):
    pass


class SectPartition(Partition):
    pass


class MorPartition(Partition):
    pass


# -- the seven operations of the characterization ------------------------------


@dataclass
class OperationTable:
    """Every defined instance of ft, ∂, T, T~, S, S~, δ with inputs in a fragment."""

    instances: list[tuple[str, tuple, Any]]
    escapes: dict[str, int]


def _descendants(cs: CSystem, objects: Sequence[Ob]) -> dict[Ob, list[Ob]]:
    """ft^i(X) = A, i >= 1, indexed by A."""
    below: dict[Ob, list[Ob]] = defaultdict(list)
    for X in objects:
        for i in range(1, X.length + 1):
            below[ft_iter(cs, X, i)].append(X)
    return below


def operation_table(cs: CSystem, aux) -> OperationTable:
    objects = aux.objects
    obset = set(objects)
    sections = aux.sections()
    secset = set(sections)
    by_target: dict[Ob, list[Section]] = defaultdict(list)
    for s in sections:
        by_target[s.target].append(s)
    below = _descendants(cs, objects)
    instances: list[tuple[str, tuple, Any]] = []
    escapes: dict[str, int] = defaultdict(int)

    def add(name: str, inputs: tuple, out: Any) -> None:
        if out in (obset if isinstance(out, Ob) else secset):
            instances.append((name, inputs, out))
        else:
            escapes[name] += 1

    for X in objects:
        if X.length > 0:
            add("ft", (X,), cs.ft(X))
            add("delta", (X,), op_delta(cs, X))
    for s in sections:
        add("partial", (s,), s.target)
    for Y in objects:
        if Y.length == 0:
            continue
        for X in below[cs.ft(Y)]:
            add("T", (Y, X), op_T(cs, Y, X))
            for r in by_target[X]:
                add("T_tilde", (Y, r), op_Tt(cs, Y, r))
    for s in sections:
        for X in below[s.target]:
            add("S", (s, X), op_S(cs, s, X))
            for r in by_target[X]:
                add("S_tilde", (s, r), op_St(cs, s, r))
    return OperationTable(instances, dict(sorted(escapes.items())))


def _finder(ob: Partition, sect: Partition) -> Callable[[Any], Any]:
    def find(x):
        return ob.find(x) if isinstance(x, Ob) else sect.find(x)

    return find


def _check_seed(pair: tuple) -> None:
    a, b = pair
    if isinstance(a, Ob) and isinstance(b, Ob):
        if a.length != b.length:
            raise LengthMismatch(pair)
    elif isinstance(a, Section) and isinstance(b, Section):
        if a.target.length != b.target.length:
            raise LengthMismatch(pair)
    else:
        raise ValueError(f"a seed pair must relate two objects or two sections: {pair!r}")


def cong_close(cs: CSystem, seed_pairs: Iterable[tuple], fragment) -> tuple[ObPartition, SectPartition]:
    """The least partitions containing the seeds and compatible with the seven operations.

    Saturation runs over the auxiliary fragment.  Operation instances whose
    output is outside it cannot force merges; their counts are left in
    ``ob.notes["escapes"]``.
    """
    aux = fragment.extended()
    ob = ObPartition(aux.objects)
    sect = SectPartition(aux.sections())
    seeds = list(seed_pairs)
    for pair in seeds:
        _check_seed(pair)
    for a, b in seeds:
        part = ob if isinstance(a, Ob) else sect
        if a not in part or b not in part:
            raise WindowOverflow(f"seed pair {(a, b)!r} is outside the fragment")
        part.union(a, b)

    table = operation_table(cs, aux)
    find = _finder(ob, sect)
    rounds = 0
    changed = True
    while changed:
        changed = False
        rounds += 1
        seen: dict[tuple, Any] = {}
        for name, inputs, out in table.instances:
            key = (name, tuple(find(x) for x in inputs))
            prev = seen.setdefault(key, out)
            if prev is not out:
                part = ob if isinstance(out, Ob) else sect
                changed |= part.union(prev, out)
    ob.notes["escapes"] = table.escapes
    ob.notes["rounds"] = rounds
    return ob, sect


def check_prop_conditions(cs: CSystem, ob: ObPartition, sect: SectPartition, fragment) -> CheckReport:
    """The four conditions characterizing pairs (∼, ≃) that come from regular congruences."""
    rec = Recorder("prop_conditions", cs)
    aux = fragment.extended()
    table = operation_table(cs, aux)
    find = _finder(ob, sect)

    # 1: compatibility with the seven operations
    first: dict[tuple, tuple] = {}
    for name, inputs, out in table.instances:
        key = (name, tuple(find(x) for x in inputs))
        if key not in first:
            first[key] = (inputs, out)
            continue
        other_inputs, other_out = first[key]
        rec.expect(
            f"prop_1_compat_{name}", (other_inputs, inputs),
            lambda: (find(other_out), find(out)),
        )
    # 2: length
    for X in ob.elements:
        rec.expect("prop_2_length", (X, ob.find(X)), lambda: (ob.find(X).length, X.length))
    for s in sect.elements:
        rec.expect("prop_2_boundary", (s, sect.find(s)), lambda: (ob.find(s.target), ob.find(sect.find(s).target)))
    # 3: an X_F over every F related to ft(X)
    for X in ob.elements:
        if X.length == 0:
            continue
        for F in ob.members(cs.ft(X)):
            rec.holds("prop_3_object_lifting", (X, F), lambda: any(cs.ft(Y) == F for Y in ob.members(X)))
    # 4: a section s' of every X' related to ∂(s)
    for s in sect.elements:
        for X in ob.members(s.target):
            rec.holds("prop_4_section_lifting", (s, X), lambda: any(t.target == X for t in sect.members(s)))

    rec.flag("escapes", table.escapes)
    rec.flag("fragment_truncated", aux.truncated)
    return rec.report()


# -- the induced relation on morphisms --------------------------------------


def extend_to_mor(
    cs: CSystem, ob: ObPartition, sect: SectPartition, fragment, literal: bool = False
) -> MorPartition:
    """∼_Mor by induction on the length of the target.

    ``f: X -> pt`` and ``f': X' -> pt`` are related iff X ∼ X'; otherwise
    f ∼ f' iff ft(f) ∼ ft(f'), s_f ≃ s_f' and the targets are related.  The
    target clause is needed because ``f = s_f . q(ft f, target)`` and
    different targets can have the same pullback along ft(f); ``literal=True``
    drops it, which is wrong for such instances.  Raises WindowOverflow when
    an ``s_f`` is not among the auxiliary sections.
    """
    domain = fragment.morphisms()
    memo: dict[Mor, Hashable] = {}

    def signature(f: Mor) -> Hashable:
        sig = memo.get(f)
        if sig is None:
            if f.target.length == 0:
                sig = ("pt", ob.find(f.source))
            else:
                s = Section(cs.sf(f))
                if s not in sect:
                    raise WindowOverflow(f"s_f of {f!r} is outside the auxiliary fragment")
                sig = (signature(ft_mor(cs, f)), sect.find(s))
                if not literal:
                    sig += (ob.find(f.target),)
            memo[f] = sig
        return sig

    mor = MorPartition(domain)
    first: dict[Hashable, Mor] = {}
    for f in domain:
        g = first.setdefault(signature(f), f)
        if g is not f:
            mor.union(g, f)
    return mor


def _window_objects(fragment) -> list[Ob]:
    return fragment.objects


def check_congruence_def(cs: CSystem, ob: ObPartition, mor: MorPartition, fragment) -> CheckReport:
    """Compatibility with all nine operations, length, object lifting and morphism lifting."""
    rec = Recorder("congruence_def", cs)
    objects = _window_objects(fragment)
    obs_in = set(objects)

    def cls(x):
        if isinstance(x, Ob):
            return ob.find(x) if x in ob else None
        return mor.find(x) if x in mor else None

    seen: dict[tuple, tuple] = {}

    def compat(name: str, inputs: tuple, thunk: Callable[[], Any]) -> None:
        try:
            out = thunk()
        except WindowOverflow:
            rec.note("out_of_window")
            return
        if cls(out) is None:
            rec.note("out_of_window")
            return
        key = (name, tuple(cls(x) for x in inputs))
        if key not in seen:
            seen[key] = (inputs, out)
            return
        other_inputs, other_out = seen[key]
        rec.expect(f"def_1_compat_{name}", (other_inputs, inputs), lambda: (cls(other_out), cls(out)))

    # 1: compatibility
    for c in mor.classes():
        f0 = c[0]
        for f in c[1:]:
            rec.expect("def_1_compat_source", (f0, f), lambda: (cls(f0.source), cls(f.source)))
            rec.expect("def_1_compat_target", (f0, f), lambda: (cls(f0.target), cls(f.target)))
    for X in objects:
        compat("id", (X,), lambda: cs.ident(X))
        if X.length > 0:
            compat("ft", (X,), lambda: cs.ft(X))
            compat("p", (X,), lambda: cs.p(X))
    for f in mor.elements:
        if f.target.length > 0:
            compat("sf", (f,), lambda: cs.sf(f))
            compat("ft_mor", (f,), lambda: ft_mor(cs, f))
    for A in objects:
        for B in objects:
            for C in objects:
                pairs = fragment.tuples(("cong_comp", A, B, C), fragment.hom(A, B), fragment.hom(B, C))
                for f, g in pairs:
                    compat("comp", (f, g), lambda: cs.comp(f, g))
    for X in objects:
        if X.length == 0:
            continue
        base = cs.ft(X)
        for Y in objects:
            for f in fragment.pick(("cong_star", X, Y), fragment.hom(Y, base)):
                compat("star", (f, X), lambda: cs.star(f, X))
                compat("q", (f, X), lambda: cs.q(f, X))

    # 2: length
    for X in objects:
        rec.expect("def_2_length", (X, ob.find(X)), lambda: (ob.find(X).length, X.length))

    # 3: object lifting inside the window
    for X in objects:
        if X.length == 0:
            continue
        for F in ob.members(cs.ft(X)):
            if F not in obs_in:
                continue
            rec.holds("def_3_object_lifting", (X, F), lambda: any(cs.ft(Y) == F for Y in ob.members(X)))

    # 4: morphism lifting
    truncated = set(fragment.truncated_homs)
    for c in mor.classes():
        present = {(f.source, f.target) for f in c}
        f0 = c[0]
        for Y in ob.members(f0.source):
            for X in ob.members(f0.target):
                if Y not in obs_in or X not in obs_in:
                    continue
                if (Y, X) in present:
                    rec.holds("def_4_morphism_lifting", (f0, Y, X), lambda: True)
                elif (Y, X) in truncated:
                    rec.undecidable("lifting_into_sampled_hom")
                else:
                    rec.holds("def_4_morphism_lifting", (f0, Y, X), lambda: False)

    rec.flag("fragment_truncated", fragment.truncated)
    return rec.report()


def proj_section_identity(cs: CSystem, X: Ob, i: int) -> bool:
    """Whether s of the i-fold projection equals the nested T~/δ expression."""
    nested = nested_projection_section(cs, X, i)
    return cs.sf(proj_iter(cs, X, i)) == nested.mor


def check_proj_section_identity(cs: CSystem, fragment) -> CheckReport:
    rec = Recorder("proj_section_identity", cs)
    for X in fragment.objects:
        for i in range(1, X.length):
            rec.expect(
                "proj_section_identity", (X, i),
                lambda: (cs.sf(proj_iter(cs, X, i)), nested_projection_section(cs, X, i).mor),
            )
    rec.flag("fragment_truncated", fragment.truncated)
    return rec.report()


# -- the windowed regular congruence ---------------------------------------------


@dataclass
class RegularCongruenceWindow:
    ob: ObPartition
    sect: SectPartition
    mor: MorPartition
    fragment: Any
    condition_status: dict[str, str] = field(default_factory=dict)

    def to_json(self, cs: CSystem) -> dict:
        return {
            "ob_classes": [[cs.encode_ob(X) for X in c] for c in self.ob.nontrivial()],
            "sect_classes": [[cs.encode_mor(s.mor) for s in c] for c in self.sect.nontrivial()],
            "mor_classes": len(self.mor.classes()),
            "condition_status": dict(sorted(self.condition_status.items())),
        }


def regular_congruence(
    cs: CSystem, ob: ObPartition, sect: SectPartition, fragment
) -> tuple[RegularCongruenceWindow, CheckReport, CheckReport]:
    """Extend (ob, sect) to morphisms and run both condition checks."""
    prop = check_prop_conditions(cs, ob, sect, fragment)
    mor = extend_to_mor(cs, ob, sect, fragment)
    definition = check_congruence_def(cs, ob, mor, fragment)
    status = {"prop_conditions": prop.status, "congruence_def": definition.status}
    return RegularCongruenceWindow(ob, sect, mor, fragment, status), prop, definition


def relation_from_json(cs: CSystem, data: Any) -> list[tuple]:
    """Seed pairs from ``{"ob_pairs": [[a, b], ...], "sect_pairs": [[s, t], ...]}``."""
    if not isinstance(data, dict) or not set(data) <= {"ob_pairs", "sect_pairs"}:
        raise ValueError("a relation is an object with keys 'ob_pairs' and 'sect_pairs'")
    pairs: list[tuple] = []
    for item in data.get("ob_pairs", []):
        if not isinstance(item, list) or len(item) != 2:
            raise ValueError(f"object pair must be a two-element list: {item!r}")
        pairs.append((cs.decode_ob(item[0]), cs.decode_ob(item[1])))
    for item in data.get("sect_pairs", []):
        if not isinstance(item, list) or len(item) != 2:
            raise ValueError(f"section pair must be a two-element list: {item!r}")
        try:
            pairs.append(tuple(as_section(cs, cs.decode_mor(m)) for m in item))
        except DomainError as exc:
            raise ValueError(str(exc)) from exc
    return pairs


def relation_to_json(cs: CSystem, pairs: Iterable[tuple]) -> dict:
    ob_pairs, sect_pairs = [], []
    for a, b in pairs:
        if isinstance(a, Ob):
            ob_pairs.append([cs.encode_ob(a), cs.encode_ob(b)])
        else:
            sect_pairs.append([cs.encode_mor(a.mor), cs.encode_mor(b.mor)])
    return {"ob_pairs": ob_pairs, "sect_pairs": sect_pairs}


# -- quotients -------------------------------------------------------------------


class QuotientCS(CSystem):
    """CC/R restricted to the window.

    Objects are the classes of window objects and morphisms the classes of
    listed window morphisms.  Each operation is computed on representatives,
    lifting the second argument where needed; results outside the window
    raise :class:`WindowOverflow`.
    """

    kind = "quotient"

    def __init__(self, base: CSystem, rel: RegularCongruenceWindow):
        self.base = base
        self.rel = rel
        self.window = rel.fragment.max_len
        ob, mor = rel.ob, rel.mor
        self._qob: dict[Ob, Ob] = {}
        self._rep_ob: dict[Ob, Ob] = {}
        self._ob_members: dict[Ob, list[Ob]] = defaultdict(list)
        for X in rel.fragment.objects:
            r = ob.find(X)
            Q = Ob(r.key, r.length)
            self._qob[X] = Q
            self._rep_ob.setdefault(Q, X)
            self._ob_members[Q].append(X)
        self._qmor: dict[Mor, Mor] = {}
        self._rep_mor: dict[Mor, Mor] = {}
        self._by_source: dict[Mor, dict[Ob, list[Mor]]] = {}
        self._hom: dict[tuple[Ob, Ob], list[Mor]] = defaultdict(list)
        for c in mor.classes():
            rep = c[0]
            Q = Mor(self._qob[rep.source], self._qob[rep.target], rep.key)
            index: dict[Ob, list[Mor]] = defaultdict(list)
            for f in c:
                self._qmor[f] = Q
                index[f.source].append(f)
            self._rep_mor[Q] = rep
            self._by_source[Q] = index
            self._hom[(Q.source, Q.target)].append(Q)
        self._comp_cache: dict[tuple[Mor, Mor], Mor] = {}

    # projection from the base
    def project_ob(self, X: Ob) -> Ob:
        try:
            return self._qob[X]
        except KeyError:
            raise WindowOverflow(f"{X!r} is outside the window") from None

    def project_mor(self, f: Mor) -> Mor:
        try:
            return self._qmor[f]
        except KeyError:
            raise WindowOverflow(f"{f!r} is outside the window") from None

    def rep_ob(self, Q: Ob) -> Ob:
        return self._rep_ob[Q]

    def rep_mor(self, Q: Mor) -> Mor:
        return self._rep_mor[Q]

    def _lift_ob_over(self, QX: Ob, base: Ob) -> Ob:
        for X in self._ob_members[QX]:
            if self.base.ft(X) == base:
                return X
        raise DomainError(f"no member of {QX!r} lies over {base!r}")

    def _lift_mor_from(self, Qg: Mor, source: Ob) -> Mor:
        found = self._by_source[Qg].get(source)
        if not found:
            raise DomainError(f"no member of {Qg!r} starts at {source!r}")
        return found[0]

    def pt(self):
        return self._qob[self.base.pt()]

    def _ft(self, X):
        return self.project_ob(self.base.ft(self.rep_ob(X)))

    def _p(self, X):
        return self.project_mor(self.base.p(self.rep_ob(X)))

    def _ident(self, X):
        return self.project_mor(self.base.ident(self.rep_ob(X)))

    def _star(self, f, X):
        g = self.rep_mor(f)
        return self.project_ob(self.base.star(g, self._lift_ob_over(X, g.target)))

    def _q(self, f, X):
        g = self.rep_mor(f)
        return self.project_mor(self.base.q(g, self._lift_ob_over(X, g.target)))

    def _comp(self, f, g):
        out = self._comp_cache.get((f, g))
        if out is None:
            a = self.rep_mor(f)
            out = self._comp_cache[(f, g)] = self.project_mor(self.base.comp(a, self._lift_mor_from(g, a.target)))
        return out

    def _sf(self, f):
        return self.project_mor(self.base.sf(self.rep_mor(f)))

    def objects(self, max_len, point_cap=None):
        return iter(sorted((Q for Q in self._rep_ob if Q.length <= max_len), key=sort_key))

    def hom_size(self, Y, X):
        return len(self._hom.get((Y, X), ()))

    def morphism_at(self, Y, X, index):
        return self._hom[(Y, X)][index]

    def morphisms(self, Y, X):
        return iter(self._hom.get((Y, X), ()))

    def encode_ob(self, X):
        return self.base.encode_ob(self.rep_ob(X))

    def decode_ob(self, data):
        X = self.base.decode_ob(data)
        if X not in self._qob:
            raise ValueError(f"{data!r} is outside the quotient window")
        return self._qob[X]

    def encode_mor(self, f):
        return self.base.encode_mor(self.rep_mor(f))

    def decode_mor(self, data):
        f = self.base.decode_mor(data)
        if f not in self._qmor:
            raise ValueError(f"{data!r} is outside the quotient window")
        return self._qmor[f]

    def _make_mor(self, Y, X, table):
        return self.project_mor(self.base._make_mor(self.rep_ob(Y), self.rep_ob(X), table))

    def config(self):
        return {"kind": "quotient", "base": self.base.config(), "window": self.window}

    def to_json(self) -> dict:
        """Class representatives and the induced ft / p tables."""
        base = self.base
        obs = sorted(self._rep_ob, key=sort_key)
        return {
            "base": base.config(),
            "window": self.window,
            "objects": [
                {
                    "rep": self.encode_ob(Q),
                    "members": [base.encode_ob(X) for X in self._ob_members[Q]],
                    "ft": self.encode_ob(self.ft(Q)),
                }
                for Q in obs
            ],
            "morphism_classes": len(self._rep_mor),
            "hom_sizes": [
                [self.encode_ob(Y), self.encode_ob(X), len(self._hom.get((Y, X), ()))]
                for Y in obs
                for X in obs
            ],
        }


def _verify_quotient(cs: CSystem, quotient: QuotientCS, fragment) -> CheckReport:
    """The projection commutes with every operation, whatever member is used."""
    rec = Recorder("quotient_well_defined", cs)
    Q = quotient
    objects = fragment.objects

    for (Y, X), homs in Q._hom.items():
        keys = [f.key for f in homs]
        rec.expect("distinct_class_labels", (Q.rep_ob(Y), Q.rep_ob(X)), lambda: (len(keys), len(set(keys))))
    for X in objects:
        QX = Q.project_ob(X)
        rec.expect("hom_ident", (X,), lambda: (Q.project_mor(cs.ident(X)), Q.ident(QX)))
        if X.length == 0:
            continue
        rec.expect("hom_ft", (X,), lambda: (Q.project_ob(cs.ft(X)), Q.ft(QX)))
        rec.expect("hom_p", (X,), lambda: (Q.project_mor(cs.p(X)), Q.p(QX)))
        base = cs.ft(X)
        for Y in objects:
            for f in fragment.hom(Y, base):
                Qf = Q.project_mor(f)
                rec.expect("hom_star", (f, X), lambda: (Q.project_ob(cs.star(f, X)), Q.star(Qf, QX)))
                rec.expect("hom_q", (f, X), lambda: (Q.project_mor(cs.q(f, X)), Q.q(Qf, QX)))
    for f in Q.rel.mor.elements:
        if f.target.length == 0:
            continue
        rec.expect("hom_sf", (f,), lambda: (Q.project_mor(cs.sf(f)), Q.sf(Q.project_mor(f))))
    for A in objects:
        for B in objects:
            for C in objects:
                pairs = fragment.tuples(("quot_comp", A, B, C), fragment.hom(A, B), fragment.hom(B, C))
                for f, g in pairs:
                    rec.expect(
                        "hom_comp", (f, g),
                        lambda: (Q.project_mor(cs.comp(f, g)), Q.comp(Q.project_mor(f), Q.project_mor(g))),
                    )
    rec.flag("fragment_truncated", fragment.truncated)
    return rec.report()


def build_quotient(cs: CSystem, rel: RegularCongruenceWindow, fragment=None) -> QuotientCS:
    """The quotient CC/R on the window; raises QuotientError if representatives matter."""
    fragment = fragment or rel.fragment
    quotient = QuotientCS(cs, rel)
    report = _verify_quotient(cs, quotient, fragment)
    quotient.report = report
    if not report.passed:
        raise QuotientError(report)
    return quotient


def check_tilde_ob_quotient(cs: CSystem, rel: RegularCongruenceWindow, fragment, quotient: QuotientCS | None = None) -> CheckReport:
    """Sections of the quotient are exactly the ≃-classes of sections."""
    rec = Recorder("tilde_ob_quotient", cs)
    Q = quotient or build_quotient(cs, rel, fragment)
    qfrag = _quotient_fragment(Q, fragment)

    q_sections = qfrag.sections()
    for t in q_sections:
        t0 = Q.rep_mor(t.mor)

        def witness():
            w = cs.sf(t0)
            as_section(cs, w)
            return t.mor, Q.project_mor(w)

        rec.expect("section_witness", (t0,), witness)

    window_sections = [s for s in rel.sect.elements if s.target.length <= fragment.max_len]
    classes = {rel.sect.find(s) for s in window_sections}
    rec.expect("section_count", (), lambda: (len(classes), len(q_sections)))

    image: dict[Mor, Section] = {}
    q_set = set(q_sections)
    for s in window_sections:
        def lands():
            t = Q.project_mor(s.mor)
            return True, Section(t) in q_set

        rec.expect("projection_is_section", (s,), lands)
        t = Q.project_mor(s.mor)
        prev = image.setdefault(t, rel.sect.find(s))
        rec.expect("injective_on_classes", (s,), lambda: (prev, rel.sect.find(s)))
    rec.flag("fragment_truncated", fragment.truncated)
    return rec.report()


def _quotient_fragment(quotient: QuotientCS, fragment):
    from .instances import Fragment

    return Fragment(quotient, fragment.config)


def roundtrip_injectivity(cs: CSystem, rel: RegularCongruenceWindow, fragment) -> CheckReport:
    """(ob, sect) and ∼_Mor determine each other on the window."""
    rec = Recorder("roundtrip_injectivity", cs)
    window_sections = [s for s in rel.sect.elements if s.target.length <= fragment.max_len]
    as_mor = {s.mor: s for s in window_sections if s.mor in rel.mor}

    restricted = rel.mor.restrict(as_mor)
    via_mor = {frozenset(as_mor[m] for m in block) for block in restricted.blocks()}
    direct = rel.sect.restrict(as_mor.values()).blocks()
    rec.expect("restriction_equals_sect", (), lambda: (len(direct), len(via_mor)))
    rec.holds("restriction_equals_sect_blocks", (), lambda: via_mor == set(direct))

    # rebuild ≃ from the morphism relation below the top and the given ≃ above it
    rebuilt = SectPartition(rel.sect.elements)
    for block in via_mor:
        items = sorted(block, key=sort_key)
        for s in items[1:]:
            rebuilt.union(items[0], s)
    for c in rel.sect.classes():
        top = [s for s in c if s.target.length > fragment.max_len]
        for s in top[1:]:
            rebuilt.union(top[0], s)
    again = extend_to_mor(cs, rel.ob, rebuilt, fragment)
    rec.holds("rebuilt_mor_equals_mor", (), lambda: again == rel.mor)
    rec.note("classes_compared", len(rel.mor.classes()))
    return rec.report()


# -- kernels of homomorphisms and isomorphism checks ---------------------------


def kernel_pairs(elements: Iterable[Any], image: Callable[[Any], Hashable]) -> list[tuple]:
    """Seed pairs chaining together the elements with equal image."""
    first: dict[Hashable, Any] = {}
    pairs = []
    for e in sorted(elements, key=sort_key):
        key = image(e)
        if key in first:
            pairs.append((first[key], e))
        else:
            first[key] = e
    return pairs


def context_collapse(source: CSystem, target: CSystem, type_map: Sequence[int] | None = None):
    """The homomorphism between context instances renaming base types.

    Every type ``t`` of the source goes to ``type_map[t]`` (default: 0); the
    sizes must agree so that point tables carry over unchanged.
    """
    src, tgt = list(source.base_sizes), list(target.base_sizes)
    type_map = [0] * len(src) if type_map is None else list(type_map)
    if len(type_map) != len(src) or any(src[t] != tgt[u] for t, u in enumerate(type_map)):
        raise ValueError("the type map must preserve base sizes")

    def map_ob(X: Ob) -> Ob:
        return target.decode_ob([type_map[t] for t in X.key])

    def map_mor(f: Mor) -> Mor:
        return Mor(map_ob(f.source), map_ob(f.target), f.key)

    return map_ob, map_mor


def kernel_relation(cs: CSystem, fragment, map_ob, map_mor) -> list[tuple]:
    """Seed pairs for the kernel of a homomorphism on the auxiliary fragment."""
    aux = fragment.extended()
    pairs = kernel_pairs(aux.objects, map_ob)
    pairs += kernel_pairs(aux.sections(), lambda s: map_mor(s.mor))
    return pairs


def check_isomorphic(quotient: QuotientCS, target: CSystem, target_fragment, map_ob, map_mor) -> CheckReport:
    """The quotient agrees with ``target`` under the relabeling induced by a homomorphism."""
    rec = Recorder("quotient_isomorphism", quotient)
    Q = quotient
    q_obs = list(Q.objects(Q.window))

    def phi_ob(QX):
        return map_ob(Q.rep_ob(QX))

    def phi_mor(Qf):
        return map_mor(Q.rep_mor(Qf))

    images = [phi_ob(QX) for QX in q_obs]
    rec.expect("object_bijection", (), lambda: (sorted(target_fragment.objects, key=sort_key), sorted(images, key=sort_key)))
    rec.expect("object_injective", (), lambda: (len(images), len(set(images))))
    for QY in q_obs:
        for QX in q_obs:
            homs = [phi_mor(f) for f in Q.morphisms(QY, QX)]
            rec.expect(
                "hom_bijection", (QY, QX),
                lambda: (sorted(target_fragment.hom(phi_ob(QY), phi_ob(QX)), key=sort_key), sorted(homs, key=sort_key)),
            )
    for QX in q_obs:
        rec.expect("iso_ident", (QX,), lambda: (target.ident(phi_ob(QX)), phi_mor(Q.ident(QX))))
        if QX.length == 0:
            continue
        rec.expect("iso_ft", (QX,), lambda: (target.ft(phi_ob(QX)), phi_ob(Q.ft(QX))))
        rec.expect("iso_p", (QX,), lambda: (target.p(phi_ob(QX)), phi_mor(Q.p(QX))))
        for QY in q_obs:
            for f in Q.morphisms(QY, Q.ft(QX)):
                rec.expect("iso_star", (f, QX), lambda: (target.star(phi_mor(f), phi_ob(QX)), phi_ob(Q.star(f, QX))))
                rec.expect("iso_q", (f, QX), lambda: (target.q(phi_mor(f), phi_ob(QX)), phi_mor(Q.q(f, QX))))
    for QY in q_obs:
        for QX in q_obs:
            if QX.length == 0:
                continue
            for f in Q.morphisms(QY, QX):
                rec.expect("iso_sf", (f,), lambda: (target.sf(phi_mor(f)), phi_mor(Q.sf(f))))
    for A in q_obs:
        for B in q_obs:
            for C in q_obs:
                pairs = target_fragment.tuples(("iso_comp", A, B, C), list(Q.morphisms(A, B)), list(Q.morphisms(B, C)))
                for f, g in pairs:
                    rec.expect("iso_comp", (f, g), lambda: (target.comp(phi_mor(f), phi_mor(g)), phi_mor(Q.comp(f, g))))
    return rec.report()
