"""Axiom checks over an enumerated fragment.

A fragment (see :mod:`csystems.instances`) supplies the objects, the hom
lists (complete or sampled, flagged either way) and a deterministic sampler
for quantifier groups whose product is larger than ``case_cap``.
"""
from __future__ import annotations

from itertools import islice

from .handles import Mor, Ob
from .ops import ft_mor, solve_pullback
from .report import CheckReport, Recorder
from .system import CSystem


def _positive(fragment) -> list[Ob]:
    return [X for X in fragment.objects if X.length > 0]


def _fragment_stats(rec: Recorder, fragment) -> None:
    rec.flag("fragment_truncated", fragment.truncated)


def check_c0_axioms(cs: CSystem, fragment) -> CheckReport:
    rec = Recorder("c0_axioms", cs)
    objects = fragment.objects
    pt = cs.pt()

    # pre-category: unit laws and associativity
    for Y in objects:
        for X in objects:
            for f in fragment.pick(("unit", Y, X), fragment.hom(Y, X)):
                rec.expect("unit_left", (f,), lambda: (f, cs.comp(cs.ident(Y), f)))
                rec.expect("unit_right", (f,), lambda: (f, cs.comp(f, cs.ident(X))))
    for A in objects:
        for B in objects:
            for C in objects:
                for D in objects:
                    triples = fragment.tuples(
                        ("assoc", A, B, C, D),
                        fragment.hom(A, B), fragment.hom(B, C), fragment.hom(C, D),
                    )
                    for f, g, h in triples:
                        rec.expect(
                            "associativity", (f, g, h),
                            lambda: (cs.comp(cs.comp(f, g), h), cs.comp(f, cs.comp(g, h))),
                        )

    # conditions 1-4
    for X in objects:
        rec.holds("c0_1_length_zero_is_pt", (X,), lambda: (X.length == 0) == (X == pt))
        if X.length > 0:
            rec.expect("c0_2_length_of_ft", (X,), lambda: (X.length - 1, cs.ft(X).length))
        rec.expect("c0_4_pt_final", (X,), lambda: (1, cs.hom_size(X, pt)))
    rec.expect("c0_3_ft_pt", (pt,), lambda: (pt, cs.ft(pt)))

    for X in _positive(fragment):
        base = cs.ft(X)
        # condition 5: the canonical square
        for Y in objects:
            for f in fragment.pick(("c0_5", X, Y), fragment.hom(Y, base)):
                _check_square(rec, cs, f, X)
        # condition 6: identity base change
        idb = cs.ident(base)
        rec.expect("c0_6_id_star", (X,), lambda: (X, cs.star(idb, X)))
        rec.expect("c0_6_id_q", (X,), lambda: (cs.ident(X), cs.q(idb, X)))
        # condition 7: functoriality
        for Y in objects:
            for Z in objects:
                pairs = fragment.tuples(("c0_7", X, Y, Z), fragment.hom(Z, Y), fragment.hom(Y, base))
                for g, f in pairs:
                    rec.expect(
                        "c0_7_star_functorial", (g, f, X),
                        lambda: (cs.star(g, cs.star(f, X)), cs.star(cs.comp(g, f), X)),
                    )
                    rec.expect(
                        "c0_7_q_functorial", (g, f, X),
                        lambda: (cs.comp(cs.q(g, cs.star(f, X)), cs.q(f, X)), cs.q(cs.comp(g, f), X)),
                    )
    _fragment_stats(rec, fragment)
    return rec.report()


def _check_square(rec: Recorder, cs: CSystem, f: Mor, X: Ob) -> None:
    Y = f.source

    def shape():
        W = cs.star(f, X)
        qq = cs.q(f, X)
        return (True, Y, W, X), (W.length > 0, cs.ft(W), qq.source, qq.target)

    rec.expect("c0_5_square_shape", (f, X), shape)

    def commutes():
        W = cs.star(f, X)
        return cs.comp(cs.p(W), f), cs.comp(cs.q(f, X), cs.p(X))

    rec.expect("c0_5_square_commutes", (f, X), commutes)


def check_s_axioms(cs: CSystem, fragment) -> CheckReport:
    rec = Recorder("s_axioms", cs)
    objects = fragment.objects
    for X in _positive(fragment):
        for Y in objects:
            for f in fragment.pick(("s", X, Y), fragment.hom(Y, X)):
                _check_sf(rec, cs, f)

    # condition 4: s_f is stable under re-indexing X = g*(U)
    for U in _positive(fragment):
        base = cs.ft(U)
        for W in objects:
            if W.length + 1 > fragment.max_len:
                continue
            for g in fragment.pick(("s_4_g", U, W), fragment.hom(W, base)):
                X = cs.star(g, U)
                qg = cs.q(g, U)
                for Y in objects:
                    for f in fragment.pick(("s_4_f", U, W, g, Y), fragment.hom(Y, X)):
                        rec.expect(
                            "s_4_reindexing", (f, g, U),
                            lambda: (cs.sf(f), cs.sf(cs.comp(f, qg))),
                        )

    for s in fragment.sections():
        m = s.mor
        rec.expect("section_sf_fixpoint", (m,), lambda: (m, cs.sf(m)))
        rec.expect("section_ft_is_id", (m,), lambda: (cs.ident(m.source), ft_mor(cs, m)))
    _fragment_stats(rec, fragment)
    return rec.report()


def _check_sf(rec: Recorder, cs: CSystem, f: Mor) -> None:
    X = f.target
    Y = f.source

    def typing():
        s = cs.sf(f)
        return (Y, cs.star(ft_mor(cs, f), X)), (s.source, s.target)

    if not rec.expect("s_1_typing", (f,), typing):
        return

    def section_law():
        s = cs.sf(f)
        return cs.ident(Y), cs.comp(s, cs.p(s.target))

    rec.expect("s_2_section", (f,), section_law)
    rec.expect(
        "s_3_factorization", (f,),
        lambda: (f, cs.comp(cs.sf(f), cs.q(ft_mor(cs, f), X))),
    )


def check_pullback_universal(cs: CSystem, f: Mor, X: Ob, fragment, recorder: Recorder | None = None) -> CheckReport:
    """Existence and uniqueness of fillers for the canonical square of (f, X).

    For every Z and every commuting cone ``(g1: Z -> Y, g2: Z -> X)`` the
    filler returned by :func:`solve_pullback` must satisfy both equations
    and must be the only solution in ``Mor(Z, f*X)``, found by a complete
    search of that hom-set.
    """
    rec = recorder or Recorder("pullback_universal", cs)
    Y = f.source
    W = cs.star(f, X)
    qf = cs.q(f, X)
    pW = cs.p(W)
    # at most about case_cap cones per square, spread over every Z
    per_z = max(1, fragment.case_cap // len(fragment.objects))
    for Z in fragment.objects:
        g2s = fragment.pick(("pb_g2", f, X, Z), fragment.hom(Z, X), per_z)
        per_g2 = max(1, per_z // max(1, len(g2s)))
        for g2 in g2s:
            target = ft_mor(cs, g2)
            g1s = list(islice(cs.solve(Z, Y, [(f, target)]), 4 * per_g2))
            for g1 in fragment.pick(("pb_g1", f, X, g2), g1s, per_g2):
                _check_cone(rec, cs, f, X, W, qf, pW, g1, g2)
    if recorder is None:
        _fragment_stats(rec, fragment)
    return rec.report()


def _check_cone(rec, cs, f, X, W, qf, pW, g1, g2) -> None:
    inputs = (f, X, g1, g2)
    fillers = list(islice(cs.solve(g1.source, W, [(pW, g1), (qf, g2)]), 2))
    if not rec.expect("pullback_filler_unique", inputs, lambda: (1, len(fillers))):
        return

    def existence():
        g = solve_pullback(cs, g1, g2, f)
        return (g1, g2), (ft_mor(cs, g), cs.comp(g, qf))

    if rec.expect("pullback_filler_equations", inputs, existence):
        rec.expect("pullback_filler_formula", inputs, lambda: (fillers[0], solve_pullback(cs, g1, g2, f)))


def canonical_squares(cs: CSystem, fragment):
    for X in _positive(fragment):
        base = cs.ft(X)
        for Y in fragment.objects:
            for f in fragment.hom(Y, base):
                yield f, X


def check_all_pullbacks(cs: CSystem, fragment) -> CheckReport:
    rec = Recorder("pullback_universal", cs)
    squares = 0
    for f, X in canonical_squares(cs, fragment):
        squares += 1
        check_pullback_universal(cs, f, X, fragment, rec)
    rec.note("squares", squares)
    _fragment_stats(rec, fragment)
    return rec.report()


def check_sf_from_pullback(cs: CSystem, fragment) -> CheckReport:
    """s_f reconstructed from the universal property equals the instance's s_f."""
    rec = Recorder("sf_from_pullback", cs)
    for X in _positive(fragment):
        for Y in fragment.objects:
            for f in fragment.pick(("sf_pb", X, Y), fragment.hom(Y, X)):
                def thunk():
                    g = ft_mor(cs, f)
                    W = cs.star(g, X)
                    sols = list(islice(cs.solve(Y, W, [(cs.p(W), cs.ident(Y)), (cs.q(g, X), f)]), 2))
                    return [cs.sf(f)], sols

                rec.expect("sf_equals_pullback_section", (f,), thunk)
    _fragment_stats(rec, fragment)
    return rec.report()
