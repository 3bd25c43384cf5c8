"""Uniform-cost search in weighted Cayley graphs.

Group elements are identified by a representative word. Two words name the
same element iff Dehn's algorithm reduces ``y z^-1`` to the empty word,
which is sound under C'(1/6) (surface groups included). Two cheap filters
avoid most of those calls:

* words with different images in the abelianization are different, so
  candidates are bucketed by a canonical coset of the relator lattice;
* a nonempty freely reduced word of length at most ``l_min / 2`` is never
  trivial (Greendlinger), so short differences are settled by free reduction.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import PreconditionError, ResourceLimitExceeded
from .presentations import dehn_reduce, dehn_validity
from .words import Presentation, WeightVector, Word, as_fraction, free_reduce, invert

__all__ = [
    "ElementStore",
    "abelian_key",
    "relator_lattice",
    "ball_count",
    "ball_profile",
    "power_distance",
    "distance",
    "free_group_distances",
    "nonstrict_convexity_demo",
]

DEFAULT_NODE_LIMIT = 5_000_000


def relator_lattice(p: Presentation) -> list[list[int]]:
    """Echelon basis (positive pivots) of the exponent-sum vectors of the relators."""
    rows = []
    for r in p.relators:
        v = [0] * p.m
        for x in r:
            v[abs(x) - 1] += 1 if x > 0 else -1
        rows.append(v)
    basis = []
    col = 0
    while rows and col < p.m:
        nz = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        # Euclid on column col until a single row carries it
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            new = [piv]
            for r in nz[1:]:
                q = r[col] // piv[col]
                r = [a - q * b for a, b in zip(r, piv)]
                (new if r[col] != 0 else rest).append(r)
            nz = new
        if nz:
            piv = nz[0]
            if piv[col] < 0:
                piv = [-a for a in piv]
            basis.append(piv)
        rows = [r for r in rest if any(r)]
        col += 1
    return basis


def abelian_key(word: Sequence[int], m: int, lattice: list[list[int]]) -> tuple[int, ...]:
    """Canonical representative of the exponent-sum vector modulo the relator lattice."""
    v = [0] * m
    for x in word:
        v[abs(x) - 1] += 1 if x > 0 else -1
    for row in lattice:
        c = next(i for i, a in enumerate(row) if a)
        q = v[c] // row[c]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return tuple(v)


class ElementStore:
    """Distinct group elements seen so far, each with one representative word."""

    def __init__(self, p: Presentation):
        reason = dehn_validity(p)
        if reason is None:
            raise PreconditionError(
                "ball search needs a free, C'(1/6) or surface presentation")
        self.reason = reason
        self.p = p.symmetrize() if p.relators else p
        self.free = not p.relators
        self.half = p.min_relator_length / 2 if p.relators else math.inf
        self.lattice = relator_lattice(p)
        self.by_word: dict[Word, int] = {}
        self.reps: list[Word] = []
        self.buckets: dict[tuple, dict[int, list[int]]] = {}
        self.dehn_calls = 0

    def __len__(self):
        return len(self.reps)

    def find(self, y: Word) -> Optional[int]:
        hit = self.by_word.get(y)
        if hit is not None or self.free:
            return hit
        bucket = self.buckets.get(abelian_key(y, self.p.m, self.lattice))
        if not bucket:
            return None
        for length, members in bucket.items():
            if len(y) + length <= self.half:
                continue
            for idx in members:
                d = free_reduce(y + invert(self.reps[idx]))
                if len(d) <= self.half:
                    continue
                self.dehn_calls += 1
                if not dehn_reduce(d, self.p):
                    self.by_word[y] = idx
                    return idx
        return None

    def same(self, y: Word, z: Word) -> bool:
        d = free_reduce(y + invert(z))
        if not d:
            return True
        if self.free or len(d) <= self.half:
            return False
        self.dehn_calls += 1
        return not dehn_reduce(d, self.p)

    def add(self, y: Word) -> int:
        idx = len(self.reps)
        self.reps.append(y)
        self.by_word[y] = idx
        if not self.free:
            key = abelian_key(y, self.p.m, self.lattice)
            self.buckets.setdefault(key, {}).setdefault(len(y), []).append(idx)
        return idx


def _integer_weights(w: WeightVector) -> tuple[list[int], int]:
    D = math.lcm(*(v.denominator for v in w.per_generator))
    return [int(v * D) for v in w.per_generator], D


def _letters(m: int) -> list[int]:
    return [x for i in range(1, m + 1) for x in (i, -i)]


def _search(p: Presentation, w: WeightVector, radius: Fraction, node_limit: int):
    """Dijkstra from the identity; yields (distance, representative) in settle order.

    Ties are broken by the lexicographic order of representative words.
    """
    if w.m != p.m:
        raise ValueError(f"weights for {w.m} generators, presentation has {p.m}")
    iw, D = _integer_weights(w)
    limit = radius * D
    store = ElementStore(p)
    letters = _letters(p.m)
    dist: dict[int, int] = {}
    settled = set()
    start = store.add(())
    dist[start] = 0
    heap = [(0, (), start)]
    while heap:
        d, word, idx = heapq.heappop(heap)
        if idx in settled or d != dist[idx]:
            continue
        settled.add(idx)
        yield Fraction(d, D), word, store
        for x in letters:
            nd = d + iw[abs(x) - 1]
            if nd > limit:
                continue
            y = word[:-1] if word and word[-1] == -x else word + (x,)
            j = store.find(y)
            if j is None:
                if len(store) >= node_limit:
                    raise ResourceLimitExceeded(f"node limit {node_limit} reached")
                j = store.add(y)
            if j in settled:
                continue
            if j not in dist or nd < dist[j]:
                dist[j] = nd
                heapq.heappush(heap, (nd, y, j))


def ball_profile(p: Presentation, w, R, node_limit: int = DEFAULT_NODE_LIMIT) -> dict[Fraction, int]:
    """Number of elements at each exact distance <= R (sphere sizes)."""
    w = w if isinstance(w, WeightVector) else WeightVector(tuple(w))
    out: dict[Fraction, int] = {}
    for d, _, _ in _search(p, w, as_fraction(R), node_limit):
        out[d] = out.get(d, 0) + 1
    return out


def ball_count(p: Presentation, w, R, node_limit: int = DEFAULT_NODE_LIMIT) -> int:
    """Exact |B_w(R)| for the closed ball about the identity."""
    return sum(ball_profile(p, w, R, node_limit).values())


def distance(p: Presentation, w, x: Sequence[int], node_limit: int = DEFAULT_NODE_LIMIT) -> Fraction:
    """``d_w(e, x)`` by uniform-cost search, stopped at the weighted length of x."""
    w = w if isinstance(w, WeightVector) else WeightVector(tuple(w))
    target = free_reduce(x)
    if any(a == 0 or abs(a) > p.m for a in target):
        raise ValueError(f"word {target} leaves the alphabet")
    bound = sum((w.of(a) for a in target), Fraction(0))
    for d, word, store in _search(p, w, bound, node_limit):
        if store.same(word, target):
            return d
    raise RuntimeError(f"{target} not reached within its own length")


def power_distance(p: Presentation, w, s: int, n_max: int,
                   node_limit: int = DEFAULT_NODE_LIMIT) -> list[Fraction]:
    """``[d_w(e, s^n) for n = 1..n_max]`` by targeted uniform-cost search."""
    if s == 0 or abs(s) > p.m:
        raise ValueError(f"letter {s} outside the alphabet")
    return [distance(p, w, (s,) * n, node_limit) for n in range(1, n_max + 1)]


# ------------------------------------------------- redundant generating sets


def free_group_distances(gens: Sequence[tuple[Sequence[int], Fraction]], radius) -> dict[Word, Fraction]:
    """Weighted word metric on a free group for an arbitrary finite generating set.

    ``gens`` lists (word, weight) pairs; inverses are added automatically.
    Elements are their freely reduced words, so equality is exact.
    """
    steps = []
    for g, wt in gens:
        g = free_reduce(g)
        wt = as_fraction(wt)
        steps.append((g, wt))
        steps.append((invert(g), wt))
    radius = as_fraction(radius)
    dist: dict[Word, Fraction] = {(): Fraction(0)}
    done: dict[Word, Fraction] = {}
    heap = [(Fraction(0), ())]
    while heap:
        d, x = heapq.heappop(heap)
        if x in done or d != dist[x]:
            continue
        done[x] = d
        for g, wt in steps:
            nd = d + wt
            if nd > radius:
                continue
            y = free_reduce(x + g)
            if y not in done and (y not in dist or nd < dist[y]):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return done


@dataclass
class NonstrictDemoResult:
    t: Fraction
    weights: tuple[Fraction, ...]
    elements: int
    all_equal: bool
    mismatches: list


def nonstrict_convexity_demo(ts=(Fraction(0), Fraction(1, 2), Fraction(1))) -> list[NonstrictDemoResult]:
    """Distinct normalized weights on {a, b, a^2, b^2} that induce one metric.

    With w_t = (1-t) w0 + t w1 every element x of the radius-1/2 ball has
    d_{w_t}(e, x) = |x|/16, the metric of the weight 1/16 on a and b, so
    the entropy is constant along the segment and not strictly convex.
    """
    w0 = (Fraction(1, 16), Fraction(1, 16), Fraction(3, 16), Fraction(3, 16))
    w1 = (Fraction(1, 16), Fraction(1, 16), Fraction(1, 8), Fraction(1, 4))
    gens = [(1,), (2,), (1, 1), (2, 2)]
    out = []
    for t in ts:
        t = as_fraction(t)
        wt = tuple((1 - t) * a + t * b for a, b in zip(w0, w1))
        d = free_group_distances(list(zip(gens, wt)), Fraction(1, 2))
        bad = [(x, dx) for x, dx in d.items() if dx != Fraction(len(x), 16)]
        out.append(NonstrictDemoResult(t, wt, len(d), not bad, bad[:10]))
    return out
