"""Concrete C-systems and bounded fragments of them.

``UnitCS`` has one object per length and one morphism per hom-set.
``ContextCS`` and ``UniverseCS`` are set-valued models: an object of length
n is a telescope whose points are n-tuples, and ``Mor(Y, X)`` is the set of
all functions ``points(Y) -> points(X)``, stored as index tables.  In both,
the points of an object are listed parent-major, so the index of
``(x, e)`` is ``offset[index(x)] + e``.
"""
from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import asdict, dataclass, fields
from itertools import product
from typing import Any, Iterator, Sequence

from .kernel import CSystem, Mor, Ob, Section, WindowOverflow


class UnitCS(CSystem):
    kind = "unit"

    def __init__(self):
        self._obs: dict[int, Ob] = {}

    def _ob(self, n: int) -> Ob:
        X = self._obs.get(n)
        if X is None:
            X = self._obs[n] = Ob(n, n)
        return X

    def _mor(self, Y: Ob, X: Ob) -> Mor:
        return Mor(Y, X, ())

    def pt(self) -> Ob:
        return self._ob(0)

    def _ft(self, X):
        return self._ob(X.length - 1)

    def _p(self, X):
        return self._mor(X, self._ft(X))

    def _star(self, f, X):
        return self._ob(f.source.length + 1)

    def _q(self, f, X):
        return self._mor(self._star(f, X), X)

    def _comp(self, f, g):
        return self._mor(f.source, g.target)

    def _ident(self, X):
        return self._mor(X, X)

    def _sf(self, f):
        return self._mor(f.source, self._ob(f.source.length + 1))

    def objects(self, max_len: int, point_cap: int | None = None) -> Iterator[Ob]:
        return (self._ob(n) for n in range(max_len + 1))

    def hom_size(self, Y, X) -> int:
        return 1

    def morphism_at(self, Y, X, index):
        if index != 0:
            raise IndexError(index)
        return self._mor(Y, X)

    def encode_ob(self, X):
        return X.length

    def decode_ob(self, data):
        if not isinstance(data, int) or isinstance(data, bool) or data < 0:
            raise ValueError(f"unit objects encode as natural numbers, got {data!r}")
        return self._ob(data)

    def _encode_table(self, f):
        return []

    def _make_mor(self, Y, X, table):
        if table:
            raise ValueError("unit morphisms have an empty table")
        return self._mor(Y, X)

    def config(self) -> dict:
        return {"kind": "unit"}


class _Layout:
    """Fiber sizes over the parent's points and the matching index offsets."""

    __slots__ = ("fibers", "offsets", "size")

    def __init__(self, fibers: Sequence[int]):
        self.fibers = tuple(fibers)
        offsets = []
        total = 0
        for n in self.fibers:
            offsets.append(total)
            total += n
        self.offsets = tuple(offsets)
        self.size = total


class FamilyCS(CSystem):
    """Shared machinery for the set-valued instances.

    Objects are keyed by a tuple of layers with ``ft`` dropping the last
    layer; subclasses say how large the fiber of the last layer is over
    each parent point and how a layer is re-indexed along a morphism.
    """

    def __init__(self):
        self._obs: dict[tuple, Ob] = {}
        self._layouts: dict[tuple, _Layout] = {}
        self._points: dict[tuple, tuple] = {}
        self._proj: dict[tuple, Mor] = {}

    # subclass hooks
    def _fibers(self, X: Ob) -> Sequence[int]:
        raise NotImplementedError

    def _reindex(self, f: Mor, X: Ob) -> Any:
        """The last layer of ``f*X``."""
        raise NotImplementedError

    def _ob(self, key: tuple) -> Ob:
        X = self._obs.get(key)
        if X is None:
            X = self._obs[key] = Ob(key, len(key))
        return X

    def layout(self, X: Ob) -> _Layout:
        lay = self._layouts.get(X.key)
        if lay is None:
            lay = self._layouts[X.key] = _Layout((1,) if X.length == 0 else self._fibers(X))
        return lay

    def point_count(self, X: Ob) -> int:
        return self.layout(X).size

    def points(self, X: Ob) -> tuple:
        pts = self._points.get(X.key)
        if pts is None:
            if X.length == 0:
                pts = ((),)
            else:
                parent = self.points(self._ft(X))
                fibers = self.layout(X).fibers
                pts = tuple(x + (e,) for x, n in zip(parent, fibers) for e in range(n))
            self._points[X.key] = pts
        return pts

    def pt(self) -> Ob:
        return self._ob(())

    def _ft(self, X):
        return self._ob(X.key[:-1])

    def _p(self, X):
        f = self._proj.get(X.key)
        if f is None:
            fibers = self.layout(X).fibers
            table = tuple(b for b, n in enumerate(fibers) for _ in range(n))
            f = self._proj[X.key] = Mor(X, self._ft(X), table)
        return f

    def _star(self, f, X):
        return self._ob(f.source.key + (self._reindex(f, X),))

    def _q(self, f, X):
        lay = self.layout(X)
        table = tuple(lay.offsets[b] + e for b in f.key for e in range(lay.fibers[b]))
        return Mor(self._star(f, X), X, table)

    def _comp(self, f, g):
        gt = g.key
        return Mor(f.source, g.target, tuple(gt[i] for i in f.key))

    def _ident(self, X):
        return Mor(X, X, tuple(range(self.point_count(X))))

    def _sf(self, f):
        X = f.target
        lay = self.layout(X)
        down = self._p(X).key
        base = tuple(down[a] for a in f.key)
        T = self._star(Mor(f.source, self._ft(X), base), X)
        table = []
        offset = 0
        for a, b in zip(f.key, base):
            table.append(offset + a - lay.offsets[b])
            offset += lay.fibers[b]
        return Mor(f.source, T, tuple(table))

    def hom_size(self, Y, X) -> int:
        return self.point_count(X) ** self.point_count(Y)

    def morphism_at(self, Y, X, index):
        n, m = self.point_count(X), self.point_count(Y)
        if not 0 <= index < n ** m:
            raise IndexError(index)
        digits = []
        for _ in range(m):
            index, d = divmod(index, n)
            digits.append(d)
        return Mor(Y, X, tuple(reversed(digits)))

    def morphisms(self, Y, X):
        for table in product(range(self.point_count(X)), repeat=self.point_count(Y)):
            yield Mor(Y, X, table)

    def solve(self, Z, W, constraints):
        # constraints are pointwise, so the solutions are a product of per-point candidates
        candidates = [range(self.point_count(W))] * self.point_count(Z)
        for h, k in constraints:
            candidates = [
                [w for w in cands if h.key[w] == k.key[z]] for z, cands in enumerate(candidates)
            ]
        for table in product(*candidates):
            yield Mor(Z, W, table)

    def _make_mor(self, Y, X, table):
        n = self.point_count(X)
        if len(table) != self.point_count(Y) or not all(isinstance(t, int) and 0 <= t < n for t in table):
            raise ValueError(f"table {list(table)!r} is not a function between the point sets")
        return Mor(Y, X, tuple(table))

    def render_mor(self, f: Mor) -> list[str]:
        src, tgt = self.points(f.source), self.points(f.target)
        return [f"{src[i]} -> {tgt[j]}" for i, j in enumerate(f.key)]


class ContextCS(FamilyCS):
    """Contexts over finite base sets ``T_1..T_k``: objects are index tuples."""

    kind = "context"

    def __init__(self, base_sizes: Sequence[int]):
        super().__init__()
        self.base_sizes = tuple(base_sizes)

    def _fibers(self, X):
        n = self.base_sizes[X.key[-1]]
        return (n,) * self.point_count(self._ft(X))

    def _reindex(self, f, X):
        return X.key[-1]

    def objects(self, max_len, point_cap=None):
        for n in range(max_len + 1):
            for key in product(range(len(self.base_sizes)), repeat=n):
                yield self._ob(key)

    def encode_ob(self, X):
        return list(X.key)

    def decode_ob(self, data):
        k = len(self.base_sizes)
        if not isinstance(data, list) or not all(isinstance(t, int) and not isinstance(t, bool) and 0 <= t < k for t in data):
            raise ValueError(f"context objects encode as lists of base-type indices < {k}, got {data!r}")
        return self._ob(tuple(data))

    def config(self):
        return {"kind": "context", "base_sizes": list(self.base_sizes)}


class UniverseCS(FamilyCS):
    """Telescopes of families valued in a finite universe of codes.

    An object of length n+1 is its parent plus a layer: a tuple of codes,
    one per parent point.  The fiber over a parent point is ``El(code)``,
    of size ``els[code]``.
    """

    kind = "universe"

    def __init__(self, els: Sequence[int]):
        super().__init__()
        self.els = tuple(els)

    def _fibers(self, X):
        return tuple(self.els[c] for c in X.key[-1])

    def _reindex(self, f, X):
        layer = X.key[-1]
        return tuple(layer[b] for b in f.key)

    def objects(self, max_len, point_cap=None):
        level = [self.pt()]
        yield from level
        for _ in range(max_len):
            nxt = []
            for X in level:
                n = self.point_count(X)
                if point_cap is not None and n > point_cap:
                    continue
                for layer in product(range(len(self.els)), repeat=n):
                    nxt.append(self._ob(X.key + (layer,)))
            nxt.sort(key=Ob.sort_key)
            yield from nxt
            level = nxt

    def encode_ob(self, X):
        return [list(layer) for layer in X.key]

    def decode_ob(self, data):
        if not isinstance(data, list):
            raise ValueError(f"universe objects encode as lists of layers, got {data!r}")
        X = self.pt()
        for layer in data:
            ok = isinstance(layer, list) and len(layer) == self.point_count(X) and all(
                isinstance(c, int) and not isinstance(c, bool) and 0 <= c < len(self.els) for c in layer
            )
            if not ok:
                raise ValueError(f"bad layer {layer!r} over {self.encode_ob(X)!r}")
            X = self._ob(X.key + (tuple(layer),))
        return X

    def config(self):
        return {"kind": "universe", "els": list(self.els)}


def build_unit() -> UnitCS:
    return UnitCS()


def build_context(base_sizes: Sequence[int]) -> ContextCS:
    sizes = list(base_sizes)
    if not sizes or not all(isinstance(n, int) and not isinstance(n, bool) and n > 0 for n in sizes):
        raise ValueError("base_sizes must be a nonempty list of positive integers")
    return ContextCS(sizes)


def build_universe(els: Sequence[int]) -> UniverseCS:
    sizes = list(els)
    if not sizes or not all(isinstance(n, int) and not isinstance(n, bool) and n >= 0 for n in sizes):
        raise ValueError("els must be a nonempty list of natural numbers")
    if not any(sizes):
        raise ValueError("at least one code needs a nonempty El")
    return UniverseCS(sizes)


def from_config(data: Any) -> CSystem:
    if not isinstance(data, dict) or "kind" not in data:
        raise ValueError("instance config must be an object with a 'kind' field")
    kind = data["kind"]
    if kind == "unit":
        return build_unit()
    if kind == "context":
        return build_context(data.get("base_sizes", []))
    if kind == "universe":
        return build_universe(data.get("els", []))
    if kind == "mutant":
        from .mutants import build_mutant

        return build_mutant(data.get("mutation"))
    raise ValueError(f"unknown instance kind {kind!r}")


# -- fragments ---------------------------------------------------------------


@dataclass(frozen=True)
class FragmentConfig:
    max_len: int = 3
    point_cap: int = 8
    hom_cap: int = 4096
    rng_seed: int = 0
    # tuples examined per quantifier group before sampling kicks in
    case_cap: int = 64

    @classmethod
    def from_json(cls, data: dict) -> "FragmentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown fragment config fields: {sorted(unknown)}")
        values = {}
        for name, value in data.items():
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValueError(f"fragment config field {name!r} must be a natural number")
            values[name] = value
        cfg = cls(**values)
        if cfg.hom_cap <= 0 or cfg.case_cap <= 0:
            raise ValueError("budgets must be positive")
        return cfg

    def to_json(self) -> dict:
        return asdict(self)


class Fragment:
    """The objects of length <= max_len and the hom lists between them.

    A hom-set larger than ``hom_cap`` is replaced by a deterministic sample of
    ``hom_cap`` morphisms; objects with more than ``point_cap`` points are
    left out together with everything above them.  Both are recorded in
    :attr:`truncated`.
    """

    def __init__(self, cs: CSystem, config: FragmentConfig):
        self.cs = cs
        self.config = config
        objects = []
        dropped = 0
        excluded: set[Ob] = set()
        for X in cs.objects(config.max_len, config.point_cap):
            n = cs.point_count(X)
            if (X.length > 0 and cs.ft(X) in excluded) or (n is not None and n > config.point_cap):
                excluded.add(X)
                dropped += 1
                continue
            objects.append(X)
        self.objects: list[Ob] = objects
        self.dropped_objects = dropped
        self.truncated_homs = []
        for Y in objects:
            for X in objects:
                try:
                    if cs.hom_size(Y, X) > config.hom_cap:
                        self.truncated_homs.append((Y, X))
                except WindowOverflow:
                    pass
        self._homs: dict[tuple[Ob, Ob], list[Mor]] = {}
        self._sections: dict[Ob, list[Section]] = {}
        self._extended: Fragment | None = None

    @property
    def max_len(self) -> int:
        return self.config.max_len

    @property
    def case_cap(self) -> int:
        return self.config.case_cap

    @property
    def truncated(self) -> bool:
        return bool(self.dropped_objects or self.truncated_homs)

    def _rng(self, tag: Any) -> random.Random:
        return random.Random(f"{self.config.rng_seed}|{tag!r}")

    def extended(self) -> "Fragment":
        """The same fragment one length higher; holds the auxiliary level."""
        if self._extended is None:
            cfg = self.config
            self._extended = Fragment(
                self.cs, FragmentConfig(cfg.max_len + 1, cfg.point_cap, cfg.hom_cap, cfg.rng_seed, cfg.case_cap)
            )
        return self._extended

    def hom(self, Y: Ob, X: Ob) -> list[Mor]:
        """The listed part of Mor(Y, X); empty when the instance cannot see it."""
        homs = self._homs.get((Y, X))
        if homs is None:
            try:
                size = self.cs.hom_size(Y, X)
            except WindowOverflow:
                size = None
            if size is None:
                homs = []
            elif size <= self.config.hom_cap:
                homs = list(self.cs.morphisms(Y, X))
            else:
                picks = sorted(self._rng(("hom", Y.key, X.key)).sample(range(size), self.config.hom_cap))
                homs = [self.cs.morphism_at(Y, X, i) for i in picks]
            self._homs[(Y, X)] = homs
        return homs

    def sections_of(self, X: Ob) -> list[Section]:
        secs = self._sections.get(X)
        if secs is None:
            try:
                secs = list(self.cs.sections(X))
            except WindowOverflow:
                secs = []
            self._sections[X] = secs
        return secs

    def sections(self) -> list[Section]:
        return [s for X in self.objects if X.length > 0 for s in self.sections_of(X)]

    def morphisms(self, max_source_len: int | None = None) -> list[Mor]:
        return [
            f
            for Y in self.objects
            if max_source_len is None or Y.length <= max_source_len
            for X in self.objects
            for f in self.hom(Y, X)
        ]

    def pick(self, tag: Any, seq: Sequence, k: int | None = None) -> list:
        k = self.config.case_cap if k is None else k
        if len(seq) <= k:
            return list(seq)
        picks = sorted(self._rng(("pick", tag)).sample(range(len(seq)), k))
        return [seq[i] for i in picks]

    def tuples(self, tag: Any, *seqs: Sequence) -> list[tuple]:
        total = math.prod(len(s) for s in seqs)
        if total <= self.config.case_cap:
            return list(product(*seqs))
        out = []
        for flat in sorted(self._rng(("tuples", tag)).sample(range(total), self.config.case_cap)):
            digits = []
            for s in reversed(seqs):
                flat, d = divmod(flat, len(s))
                digits.append(s[d])
            out.append(tuple(reversed(digits)))
        return out

    def digest(self) -> str:
        h = hashlib.sha256()
        for Y in self.objects:
            for X in self.objects:
                for f in self.hom(Y, X):
                    h.update(repr((Y.key, X.key, f.key)).encode())
        return h.hexdigest()

    def to_json(self) -> dict:
        cs = self.cs
        return {
            "instance": cs.config(),
            "config": self.config.to_json(),
            "objects": [cs.encode_ob(X) for X in self.objects],
            "dropped_objects": self.dropped_objects,
            "truncated_homs": [[cs.encode_ob(Y), cs.encode_ob(X)] for Y, X in self.truncated_homs],
            "hom_sizes": [
                [cs.encode_ob(Y), cs.encode_ob(X), self._size_or_none(Y, X), len(self.hom(Y, X))]
                for Y in self.objects
                for X in self.objects
            ],
            "sections": len(self.sections()),
            "digest": self.digest(),
        }

    def _size_or_none(self, Y: Ob, X: Ob) -> int | None:
        try:
            return self.cs.hom_size(Y, X)
        except WindowOverflow:
            return None

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def enumerate_fragment(
    cs: CSystem,
    max_len: int = 3,
    point_cap: int = 8,
    hom_cap: int = 4096,
    rng_seed: int = 0,
    case_cap: int = 64,
) -> Fragment:
    if hom_cap <= 0 or case_cap <= 0:
        raise ValueError("budgets must be positive")
    return Fragment(cs, FragmentConfig(max_len, point_cap, hom_cap, rng_seed, case_cap))
