"""Derived and iterated operations, and the eight operations on (Ob, Õb).

Everything here is generic over :class:`CSystem`: an instance supplies only
l, ft, p, f*X, q, composition, identities and s_f.
"""
from __future__ import annotations

from .handles import DomainError, Mor, Ob, Section
from .system import CSystem


def ft_iter(cs: CSystem, X: Ob, i: int) -> Ob:
    for _ in range(i):
        X = cs.ft(X)
    return X


def ft_mor(cs: CSystem, f: Mor) -> Mor:
    """``ft(f) = f . p_X`` for ``f: Y -> X``; undefined when l(X) = 0."""
    if f.target.length == 0:
        raise DomainError("ft of a morphism into pt is undefined")
    return cs.comp(f, cs.p(f.target))


def proj_iter(cs: CSystem, X: Ob, i: int) -> Mor:
    """The composite projection ``p_{X,i}: X -> ft^i(X)``."""
    if i < 0 or X.length < i:
        raise DomainError(f"p_(X,{i}) undefined for l(X) = {X.length}")
    f = cs.ident(X)
    Z = X
    for _ in range(i):
        f = cs.comp(f, cs.p(Z))
        Z = cs.ft(Z)
    return f


def pullback_iter(cs: CSystem, f: Mor, X: Ob, i: int) -> tuple[Ob, Mor]:
    """``(f*(X, i), q(f, X, i))`` for ``f: Y -> ft^i(X)``.

    Unfolds ``f*(X, k+1) = q(f, ft X, k)*(X)`` and
    ``q(f, X, k+1) = q(q(f, ft X, k), X)`` from the bottom of the tower.
    """
    if i < 0 or X.length < i:
        raise DomainError(f"f*(X,{i}) undefined for l(X) = {X.length}")
    tower = [X]
    for _ in range(i):
        tower.append(cs.ft(tower[-1]))
    if f.target != tower[-1]:
        raise DomainError(f"target of {f!r} is not ft^{i}(X)")
    obj, g = f.source, f
    for Xk in reversed(tower[:-1]):
        obj, g = cs.star(g, Xk), cs.q(g, Xk)
    return obj, g


def star_iter(cs: CSystem, f: Mor, X: Ob, i: int) -> Ob:
    return pullback_iter(cs, f, X, i)[0]


def q_iter(cs: CSystem, f: Mor, X: Ob, i: int) -> Mor:
    return pullback_iter(cs, f, X, i)[1]


def as_section(cs: CSystem, s: Mor) -> Section:
    X = s.target
    if X.length == 0:
        raise DomainError("sections live over objects of positive length")
    if s.source != cs.ft(X):
        raise DomainError(f"{s!r} does not start at ft of its target")
    if cs.comp(s, cs.p(X)) != cs.ident(s.source):
        raise DomainError(f"{s!r} is not a section of p_X")
    return Section(s)


def sect_pull(cs: CSystem, f: Mor, s: Section, i: int) -> Section:
    """``f*(s, i): f*(ft X, i-1) -> f*(X, i)`` for a section s of ``p_X``.

    Computed as ``s_h`` with ``h = q(f, ft X, i-1) . s``: then ``ft(h)`` is
    ``q(f, ft X, i-1)`` and the two equations characterizing the pulled-back
    section are conditions 2 and 3 on ``s_h``.
    """
    X = s.target
    if i < 1 or X.length < i:
        raise DomainError(f"f*(s,{i}) undefined for l(X) = {X.length}")
    h = cs.comp(q_iter(cs, f, cs.ft(X), i - 1), s.mor)
    return Section(cs.sf(h))


def level_offset(cs: CSystem, Y: Ob, X: Ob) -> int | None:
    """The unique i with ``1 <= i <= l(X)`` and ``ft^i(X) = ft(Y)``, if any."""
    base = cs.ft(Y)
    i = X.length - base.length
    if 1 <= i <= X.length and ft_iter(cs, X, i) == base:
        return i
    return None


def _substitution_offset(cs: CSystem, s: Section, X: Ob) -> int:
    Y = s.target
    i = X.length - Y.length
    if i < 1 or ft_iter(cs, X, i) != Y:
        raise DomainError("no i >= 1 with ft^i(X) equal to the section's target")
    return i


def op_pt(cs: CSystem) -> Ob:
    return cs.pt()


def op_ft(cs: CSystem, X: Ob) -> Ob:
    return cs.ft(X)


def op_partial(cs: CSystem, s: Section) -> Ob:
    return s.target


def op_T(cs: CSystem, Y: Ob, X: Ob) -> Ob:
    """Weakening: pull X back along ``p_Y``."""
    if Y.length == 0:
        raise DomainError("T(Y, X) needs l(Y) > 0")
    i = level_offset(cs, Y, X)
    if i is None:
        raise DomainError("T(Y, X) needs ft(Y) = ft^i(X) for some i >= 1")
    return star_iter(cs, cs.p(Y), X, i)


def op_Tt(cs: CSystem, Y: Ob, r: Section) -> Section:
    if Y.length == 0:
        raise DomainError("T~(Y, r) needs l(Y) > 0")
    i = level_offset(cs, Y, r.target)
    if i is None:
        raise DomainError("T~(Y, r) needs ft(Y) = ft^i(d(r)) for some i >= 1")
    return sect_pull(cs, cs.p(Y), r, i)


def op_S(cs: CSystem, s: Section, X: Ob) -> Ob:
    """Substitution: pull X back along the section s."""
    return star_iter(cs, s.mor, X, _substitution_offset(cs, s, X))


def op_St(cs: CSystem, s: Section, r: Section) -> Section:
    return sect_pull(cs, s.mor, r, _substitution_offset(cs, s, r.target))


def op_delta(cs: CSystem, X: Ob) -> Section:
    """The diagonal ``s_{Id_X}: X -> p_X^*(X)``."""
    if X.length == 0:
        raise DomainError("delta(X) needs l(X) > 0")
    return Section(cs.sf(cs.ident(X)))


def solve_pullback(cs: CSystem, g1: Mor, g2: Mor, f: Mor) -> Mor:
    """The filler ``g = s_{g2} . q(g1, f*X)`` of the canonical square of (f, X).

    ``g1: Z -> Y``, ``g2: Z -> X`` and ``f: Y -> ft(X)`` with
    ``g1 . f = ft(g2)``; the result ``g: Z -> f*X`` satisfies ``ft(g) = g1``
    and ``g . q(f, X) = g2``.
    """
    X = g2.target
    if X.length == 0:
        raise DomainError("the canonical square needs l(X) > 0")
    if f.target != cs.ft(X) or g1.target != f.source or g1.source != g2.source:
        raise DomainError("g1, g2, f do not form a cone over the canonical square")
    if cs.comp(g1, f) != ft_mor(cs, g2):
        raise DomainError("g1 . f != ft(g2): the cone does not commute")
    return cs.comp(cs.sf(g2), cs.q(g1, cs.star(f, X)))


def nested_projection_section(cs: CSystem, X: Ob, i: int) -> Section:
    """``T~(X, T~(ft X, ..., T~(ft^{i-1} X, delta(ft^i X))...))``."""
    if not 1 <= i < X.length:
        raise DomainError(f"need 1 <= i < l(X), got i={i}, l(X)={X.length}")
    tower = [X]
    for _ in range(i):
        tower.append(cs.ft(tower[-1]))
    section = op_delta(cs, tower[i])
    for Y in reversed(tower[:i]):
        section = op_Tt(cs, Y, section)
    return section
