"""The abstract C-system interface.

Concrete instances implement the underscored primitives (``_ft``, ``_p``,
``_star``, ``_q``, ``_comp``, ``_ident``, ``_sf``) plus enumeration; the
public methods here check every side condition first and raise
:class:`DomainError` when one fails.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, Iterator, Sequence

from .handles import DomainError, Mor, Ob, Section

Constraint = tuple[Mor, Mor]


class CSystem(ABC):
    kind = "abstract"

    # -- structure -------------------------------------------------------

    def length(self, X: Ob) -> int:
        return X.length

    @abstractmethod
    def pt(self) -> Ob: ...

    def ft(self, X: Ob) -> Ob:
        if X.length == 0:
            return X
        return self._ft(X)

    def p(self, X: Ob) -> Mor:
        if X.length == 0:
            return self.ident(X)
        return self._p(X)

    def star(self, f: Mor, X: Ob) -> Ob:
        self._check_square(f, X)
        return self._star(f, X)

    def q(self, f: Mor, X: Ob) -> Mor:
        self._check_square(f, X)
        return self._q(f, X)

    def comp(self, f: Mor, g: Mor) -> Mor:
        """``f`` followed by ``g``."""
        if f.target != g.source:
            raise DomainError(f"cannot compose {f!r} with {g!r}: target/source mismatch")
        return self._comp(f, g)

    def ident(self, X: Ob) -> Mor:
        return self._ident(X)

    def sf(self, f: Mor) -> Mor:
        if f.target.length == 0:
            raise DomainError("s_f is undefined for morphisms into pt")
        return self._sf(f)

    def obj_eq(self, X: Ob, Y: Ob) -> bool:
        return X == Y

    def mor_eq(self, f: Mor, g: Mor) -> bool:
        return f == g

    def _check_square(self, f: Mor, X: Ob) -> None:
        if X.length == 0:
            raise DomainError("base change needs l(X) > 0")
        if f.target != self.ft(X):
            raise DomainError(f"target of {f!r} is not ft({X!r})")

    @abstractmethod
    def _ft(self, X: Ob) -> Ob: ...

    @abstractmethod
    def _p(self, X: Ob) -> Mor: ...

    @abstractmethod
    def _star(self, f: Mor, X: Ob) -> Ob: ...

    @abstractmethod
    def _q(self, f: Mor, X: Ob) -> Mor: ...

    @abstractmethod
    def _comp(self, f: Mor, g: Mor) -> Mor: ...

    @abstractmethod
    def _ident(self, X: Ob) -> Mor: ...

    @abstractmethod
    def _sf(self, f: Mor) -> Mor: ...

    # -- enumeration -----------------------------------------------------

    @abstractmethod
    def objects(self, max_len: int) -> Iterator[Ob]:
        """All objects of length <= max_len, by length then canonical key."""

    @abstractmethod
    def hom_size(self, Y: Ob, X: Ob) -> int: ...

    @abstractmethod
    def morphism_at(self, Y: Ob, X: Ob, index: int) -> Mor:
        """The ``index``-th morphism of ``Mor(Y, X)`` in canonical order."""

    def morphisms(self, Y: Ob, X: Ob) -> Iterator[Mor]:
        for i in range(self.hom_size(Y, X)):
            yield self.morphism_at(Y, X, i)

    def solve(self, Z: Ob, W: Ob, constraints: Sequence[Constraint]) -> Iterator[Mor]:
        """Every ``g: Z -> W`` with ``comp(g, h) == k`` for each ``(h, k)``.

        The search is complete over ``Mor(Z, W)``; subclasses override it
        with something smarter than generate-and-test.
        """
        for g in self.morphisms(Z, W):
            if all(self.comp(g, h) == k for h, k in constraints):
                yield g

    def sections(self, X: Ob) -> Iterator[Section]:
        if X.length == 0:
            return
        base = self.ft(X)
        for s in self.solve(base, X, [(self.p(X), self.ident(base))]):
            yield Section(s)

    def point_count(self, X: Ob) -> int | None:
        """Number of points of X, or None when the instance has no points."""
        return None

    def points(self, X: Ob) -> Sequence[tuple]:
        raise NotImplementedError(f"{self.kind} instances have no point semantics")

    # -- encodings -------------------------------------------------------

    @abstractmethod
    def encode_ob(self, X: Ob) -> Any: ...

    @abstractmethod
    def decode_ob(self, data: Any) -> Ob: ...

    def encode_mor(self, f: Mor) -> dict:
        return {
            "source": self.encode_ob(f.source),
            "target": self.encode_ob(f.target),
            "table": self._encode_table(f),
        }

    def _encode_table(self, f: Mor) -> list:
        return list(f.key)

    def decode_mor(self, data: dict) -> Mor:
        try:
            Y = self.decode_ob(data["source"])
            X = self.decode_ob(data["target"])
            table = tuple(data["table"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed morphism encoding: {data!r}") from exc
        return self._make_mor(Y, X, table)

    @abstractmethod
    def _make_mor(self, Y: Ob, X: Ob, table: tuple) -> Mor: ...

    def describe(self, element: Any) -> Any:
        """JSON-ready decoded form of a handle, section or tuple of them."""
        if isinstance(element, Ob):
            return self.encode_ob(element)
        if isinstance(element, Mor):
            return self.encode_mor(element)
        if isinstance(element, Section):
            return {"section": self.encode_mor(element.mor)}
        if isinstance(element, (tuple, list)):
            return [self.describe(e) for e in element]
        if isinstance(element, dict):
            return {k: self.describe(v) for k, v in element.items()}
        return element

    @abstractmethod
    def config(self) -> dict: ...

