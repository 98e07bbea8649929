"""Brute-force models used as oracles.

Everything here is recomputed from first principles: points are explicit
tuples, morphisms are explicit point maps, and nothing goes through the
offset tables of the instances under test.
"""
from itertools import product


def context_points(sizes, key):
    return list(product(*[range(sizes[t]) for t in key]))


def universe_points(els, key):
    pts = [()]
    for layer in key:
        pts = [x + (e,) for x, code in zip(pts, layer) for e in range(els[code])]
    return pts


class PointModel:
    """Set-level semantics of a context or universe instance."""

    def __init__(self, cs):
        self.cs = cs
        if cs.kind == "context":
            self._points = lambda key: context_points(cs.base_sizes, key)
        else:
            self._points = lambda key: universe_points(cs.els, key)

    def points(self, key):
        return self._points(key)

    def apply(self, f):
        """f as a dict from source points to target points."""
        src, tgt = self.points(f.source.key), self.points(f.target.key)
        return {src[i]: tgt[j] for i, j in enumerate(f.key)}

    def star_key(self, f, X):
        fmap = self.apply(f)
        if self.cs.kind == "context":
            return f.source.key + (X.key[-1],)
        base_pts = self.points(X.key[:-1])
        layer = X.key[-1]
        return f.source.key + (tuple(layer[base_pts.index(fmap[y])] for y in self.points(f.source.key)),)

    def q_table(self, f, X):
        fmap = self.apply(f)
        W = self.star_key(f, X)
        tgt = self.points(X.key)
        return tuple(tgt.index(fmap[w[:-1]] + (w[-1],)) for w in self.points(W))

    def p_table(self, X):
        base = self.points(X.key[:-1])
        return tuple(base.index(x[:-1]) for x in self.points(X.key))

    def comp_table(self, f, g):
        fm, gm = self.apply(f), self.apply(g)
        tgt = self.points(g.target.key)
        return tuple(tgt.index(gm[fm[y]]) for y in self.points(f.source.key))

    def sf(self, f):
        """(key of the target, table) of s_f: y -> (y, last coordinate of f(y))."""
        fm = self.apply(f)
        X = f.target
        ftf = {y: x[:-1] for y, x in fm.items()}
        if self.cs.kind == "context":
            T = f.source.key + (X.key[-1],)
        else:
            base_pts = self.points(X.key[:-1])
            T = f.source.key + (tuple(X.key[-1][base_pts.index(ftf[y])] for y in self.points(f.source.key)),)
        tgt = self.points(T)
        return T, tuple(tgt.index(y + (fm[y][-1],)) for y in self.points(f.source.key))

    def is_set_pullback(self, f, X):
        """(p, q): f*X -> Y x_{ft X} X is a bijection onto the fiber product."""
        fm = self.apply(f)
        W = self.star_key(f, X)
        Wp = self.points(W)
        q = self.q_table(f, X)
        Xp = self.points(X.key)
        legs = {(w[:-1], Xp[q[i]]) for i, w in enumerate(Wp)}
        fiber = {(y, x) for y in self.points(f.source.key) for x in Xp if fm[y] == x[:-1]}
        return len(legs) == len(Wp) and legs == fiber


def telescope_count(els, max_len):
    """Objects of length <= max_len of a universe instance."""
    level = [()]
    total = 1
    for _ in range(max_len):
        nxt = []
        for key in level:
            n = len(universe_points(els, key))
            nxt += [key + (layer,) for layer in product(range(len(els)), repeat=n)]
        level = nxt
        total += len(level)
    return total


def naive_congruence(instances, seeds, elements):
    """Least equivalence containing seeds and closed under the operation instances.

    Works on explicit pair sets: repeatedly close under reflexivity,
    symmetry, transitivity, and "related inputs give related outputs".
    """
    rel = {(e, e) for e in elements} | set(seeds) | {(b, a) for a, b in seeds}
    by_name = {}
    for name, inputs, out in instances:
        by_name.setdefault(name, []).append((inputs, out))
    while True:
        size = len(rel)
        changed = True
        while changed:
            changed = False
            succ = {}
            for a, b in rel:
                succ.setdefault(a, set()).add(b)
            for a, bs in succ.items():
                for b in list(bs):
                    for c in succ.get(b, ()):
                        if (a, c) not in rel:
                            rel.add((a, c))
                            rel.add((c, a))
                            changed = True
        for items in by_name.values():
            for i1, o1 in items:
                for i2, o2 in items:
                    if (o1, o2) not in rel and all((a, b) in rel for a, b in zip(i1, i2)):
                        rel.add((o1, o2))
                        rel.add((o2, o1))
        if len(rel) == size:
            return rel
