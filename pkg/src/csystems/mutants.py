"""Deliberately broken instances, each differing from a sound one in one table.

They exist so that the test-suite can show every check is able to fail.
"""
from __future__ import annotations

from .instances import ContextCS
from .kernel import Mor


class PermutedQ(ContextCS):
    """q(f, X) with its first and last table entries swapped."""

    def _q(self, f, X):
        g = super()._q(f, X)
        t = list(g.key)
        if len(t) >= 2:
            t[0], t[-1] = t[-1], t[0]
        return Mor(g.source, g.target, tuple(t))


class MutatedSf(ContextCS):
    """s_f sends the first point into the fiber over the wrong base point."""

    def _sf(self, f):
        s = super()._sf(f)
        lay = self.layout(s.target)
        t = list(s.key)
        if t and len(lay.fibers) > 1:
            b = self._p(s.target).key[t[0]]
            nb = (b + 1) % len(lay.fibers)
            t[0] = lay.offsets[nb] + (t[0] - lay.offsets[b]) % lay.fibers[nb]
        return Mor(s.source, s.target, tuple(t))


class WrongStar(ContextCS):
    """f*(X) carries the next base type instead of the last type of X."""

    def _star(self, f, X):
        return self._ob(f.source.key + ((X.key[-1] + 1) % len(self.base_sizes),))


class CorruptComp(ContextCS):
    """Composites land one point off whenever the target has two points or more."""

    def _comp(self, f, g):
        h = super()._comp(f, g)
        n = self.point_count(h.target)
        if n < 2 or not h.key:
            return h
        return Mor(h.source, h.target, ((h.key[0] + 1) % n,) + h.key[1:])


class DoubledFiber(ContextCS):
    """Base change along a non-identity doubles a one-point fiber.

    The canonical squares still commute, but fillers into ``f*(X)`` are no
    longer unique, so these squares are not pullbacks.
    """

    def _big(self, f, X):
        return X.key[-1] == 0 and f != self._ident(f.target)

    def _star(self, f, X):
        if self._big(f, X):
            return self._ob(f.source.key + (1,))
        return super()._star(f, X)

    def _q(self, f, X):
        if not self._big(f, X):
            return super()._q(f, X)
        lay = self.layout(X)
        W = self._star(f, X)
        table = tuple(lay.offsets[b] for b in f.key for _ in range(2))
        return Mor(W, X, table)


MUTANTS = {
    "permuted_q": (PermutedQ, [2]),
    "mutated_sf": (MutatedSf, [2]),
    "wrong_star": (WrongStar, [2, 2]),
    "corrupt_comp": (CorruptComp, [2]),
    "doubled_fiber": (DoubledFiber, [1, 2]),
}


def build_mutant(name: str) -> ContextCS:
    try:
        cls, sizes = MUTANTS[name]
    except KeyError:
        raise ValueError(f"unknown mutation {name!r}; known: {sorted(MUTANTS)}") from None
    cs = cls(sizes)
    cs.mutation = name
    cs.config = lambda: {"kind": "mutant", "mutation": name}
    return cs


# -- mutations of windows, relations and quotients -----------------------------
#
# Each returns the reports of the suites that should catch it.


def _collapse_setup():
    from .congruence import cong_close, context_collapse, kernel_relation, regular_congruence
    from .instances import Fragment, FragmentConfig, build_context

    big, small = build_context([2, 2]), build_context([2])
    fragment = Fragment(big, FragmentConfig(2))
    ob, sect = cong_close(big, kernel_relation(big, fragment, *context_collapse(big, small)), fragment)
    rel, _, _ = regular_congruence(big, ob, sect, fragment)
    return big, fragment, rel


def dropped_section():
    """A closed window with one element of B~ removed."""
    from dataclasses import replace

    from .instances import Fragment, FragmentConfig, build_context
    from .subsystems import SubsystemSeed, check_closed, check_roundtrip, close_window, verify_subsystem_lemmas

    cs = build_context([2])
    fragment = Fragment(cs, FragmentConfig(3))
    window = close_window(cs, SubsystemSeed([cs.decode_ob([0])]), 3)
    victim = min(window.Bt, key=lambda s: s.sort_key())
    broken = replace(window, Bt=window.Bt - {victim})
    return [
        check_closed(cs, broken.B, broken.Bt, broken.L),
        verify_subsystem_lemmas(cs, broken, fragment),
        check_roundtrip(cs, broken, fragment),
    ]


def merged_without_sf():
    """Two morphisms pt -> (0) merged although their s_f are not."""
    from .congruence import check_congruence_def, cong_close, extend_to_mor
    from .instances import Fragment, FragmentConfig, build_context

    cs = build_context([2, 2])
    fragment = Fragment(cs, FragmentConfig(2))
    ob, sect = cong_close(cs, [], fragment)
    mor = extend_to_mor(cs, ob, sect, fragment)
    f, g = fragment.hom(cs.pt(), cs.decode_ob([0]))[:2]
    mor.union(f, g)
    return [check_congruence_def(cs, ob, mor, fragment)]


def split_identity():
    """The collapse relation on morphisms with one identity taken out of its class."""
    from .congruence import MorPartition, check_congruence_def

    cs, fragment, rel = _collapse_setup()
    victim = cs.ident(cs.decode_ob([1]))
    mor = MorPartition(rel.mor.elements)
    for c in rel.mor.classes():
        rest = [f for f in c if f != victim]
        for f in rest[1:]:
            mor.union(rest[0], f)
    return [check_congruence_def(cs, rel.ob, mor, fragment)]


def corrupted_quotient():
    """The collapse quotient with one entry of its p table pointing at another class."""
    from .checker import Fragment
    from .congruence import build_quotient, check_tilde_ob_quotient
    from .kernel import check_c0_axioms

    cs, fragment, rel = _collapse_setup()
    quotient = build_quotient(cs, rel, fragment)
    QX = quotient.project_ob(cs.decode_ob([0, 0]))
    good = quotient.p(QX)
    wrong = next(f for f in quotient.morphisms(good.source, good.target) if f != good)
    original = quotient._p
    quotient._p = lambda X: wrong if X == QX else original(X)
    return [
        check_tilde_ob_quotient(cs, rel, fragment, quotient),
        check_c0_axioms(quotient, Fragment(quotient, fragment.config)),
    ]


STRUCTURE_MUTATIONS = {
    "dropped_section": dropped_section,
    "merged_without_sf": merged_without_sf,
    "split_identity": split_identity,
    "corrupted_quotient": corrupted_quotient,
}
