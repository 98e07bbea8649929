"""Interned handles for objects, morphisms and sections.

Handles compare structurally on their canonical key, so two handles built
from the same encoding are equal even when they are distinct Python
objects.  Instances intern them anyway, which makes the common equality
test an identity check.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Hashable


class DomainError(ValueError):
    """A partial operation was applied outside its domain of definition."""


class WindowOverflow(RuntimeError):
    """A computation needed an element outside the enumerated window."""


class Ob:
    __slots__ = ("key", "length", "_hash")

    def __init__(self, key: Hashable, length: int):
        self.key = key
        self.length = length
        self._hash = hash((length, key))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Ob):
            return NotImplemented
        return self._hash == other._hash and self.length == other.length and self.key == other.key

    def __hash__(self) -> int:
        return self._hash

    def sort_key(self) -> tuple:
        return (self.length, self.key)

    def __repr__(self) -> str:
        return f"Ob({self.key!r}, l={self.length})"


class Mor:
    """A morphism ``source -> target``.

    Composition is diagrammatic throughout the package: ``comp(f, g)`` is
    "first f, then g" and needs ``f.target == g.source``.
    """

    __slots__ = ("source", "target", "key", "_hash")

    def __init__(self, source: Ob, target: Ob, key: Hashable):
        self.source = source
        self.target = target
        self.key = key
        self._hash = None

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Mor):
            return NotImplemented
        return self.key == other.key and self.source == other.source and self.target == other.target

    def __hash__(self) -> int:
        # lazy: most morphisms built during a check are compared, never hashed
        if self._hash is None:
            self._hash = hash((self.source, self.target, self.key))
        return self._hash

    def sort_key(self) -> tuple:
        return (self.source.sort_key(), self.target.sort_key(), self.key)

    def __repr__(self) -> str:
        return f"Mor({self.source.key!r} -> {self.target.key!r}, {self.key!r})"


@dataclass(frozen=True)
class Section:
    """An element of the set of sections ``s: ft(X) -> X`` of ``p_X``.

    Construct through :func:`csystems.kernel.as_section`, which checks the
    witness ``s . p_X = Id``.
    """

    mor: Mor

    @property
    def target(self) -> Ob:
        return self.mor.target

    @property
    def base(self) -> Ob:
        return self.mor.source

    def sort_key(self) -> tuple:
        return self.mor.sort_key()

    def __repr__(self) -> str:
        return f"Section({self.mor!r})"


def sort_key(element: Any) -> tuple:
    return element.sort_key()
