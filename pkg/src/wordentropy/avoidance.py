"""Counting words that avoid a forbidden set.

Three views of the same language:

* an Aho-Corasick automaton whose live states track the longest suffix
  that is still a proper prefix of a pattern; exact counts by big-integer
  DP over (state, weight) and growth rates by a spectral bisection;
* the Myers linear system for the generating functions, solved at a point;
* the polynomial ``p(z)`` built from the relator prefixes ``U_r``, whose
  real roots bound the growth of lambda-reduced words from below.

Weights here are positive integers. Callers with rational weights rescale
first (see :mod:`wordentropy.entropy`).
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

import mpmath
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .words import (
    Presentation,
    WeightVector,
    Word,
    as_fraction,
    ceil_fraction,
)

__all__ = [
    "ForbiddenSet",
    "AvoidanceAutomaton",
    "GrowthSeries",
    "CorrelationPolynomial",
    "PPolynomial",
    "inverse_pairs",
    "make_forbidden_set",
    "build_forbidden_set",
    "count_avoiding",
    "correlation_polynomial",
    "myers_system",
    "myers_solve_at",
    "prefix_groups",
    "p_polynomial",
    "p_eval",
    "p_largest_root",
    "growth_rate",
]


def inverse_pairs(m: int) -> list[Word]:
    out = []
    for i in range(1, m + 1):
        out += [(i, -i), (-i, i)]
    return out


@dataclass(frozen=True)
class ForbiddenSet:
    m: int
    patterns: tuple[Word, ...]
    reduced_set: bool = False

    def __len__(self):
        return len(self.patterns)


def _reduce_patterns(patterns: set[Word]) -> tuple[Word, ...]:
    """Drop every pattern that contains a different pattern as a subword."""
    by_len = defaultdict(set)
    for u in patterns:
        by_len[len(u)].add(u)
    lengths = sorted(by_len)
    keep = []
    for u in patterns:
        hit = any(u[i:i + t] in by_len[t]
                  for t in lengths if t < len(u)
                  for i in range(len(u) - t + 1))
        if not hit:
            keep.append(u)
    return tuple(sorted(keep))


def make_forbidden_set(m: int, patterns: Iterable[Sequence[int]]) -> ForbiddenSet:
    """Deduplicate and reduce an arbitrary pattern collection."""
    pats = set()
    for u in patterns:
        u = tuple(int(x) for x in u)
        if not u:
            raise ValueError("forbidden patterns must be nonempty")
        if any(x == 0 or abs(x) > m for x in u):
            raise ValueError(f"pattern {u} leaves the alphabet of size {m}")
        pats.add(u)
    return ForbiddenSet(m, _reduce_patterns(pats), True)


def build_forbidden_set(p: Presentation, lam) -> ForbiddenSet:
    """Inverse pairs plus the prefix ``U_r`` of length ceil(lam*|r|) of each r in R*."""
    lam = as_fraction(lam)
    sym = p.symmetrize()
    pats = set(inverse_pairs(p.m))
    for _, _, u in sym.cyclic_windows(lambda n: ceil_fraction(lam * n)):
        pats.add(u)
    return make_forbidden_set(p.m, pats)


def _letter_index(x: int, m: int) -> int:
    return x - 1 if x > 0 else m - x - 1


class AvoidanceAutomaton:
    """Aho-Corasick automaton restricted to its live (pattern-free) states.

    ``delta[q, i]`` is the live state reached from ``q`` on the letter with
    index ``i`` (letters ``1..m`` then ``-1..-m``), or ``-1`` when that
    letter completes a forbidden pattern. State 0 is the empty suffix.
    """

    def __init__(self, F: ForbiddenSet, w: WeightVector | Sequence[int] | None = None):
        if not F.reduced_set:
            F = make_forbidden_set(F.m, F.patterns)
        self.F = F
        self.m = m = F.m
        k = 2 * m
        goto: list[dict[int, int]] = [{}]
        terminal = [False]
        for u in F.patterns:
            q = 0
            for x in u:
                i = _letter_index(x, m)
                nxt = goto[q].get(i)
                if nxt is None:
                    nxt = len(goto)
                    goto[q][i] = nxt
                    goto.append({})
                    terminal.append(False)
                q = nxt
            terminal[q] = True

        n = len(goto)
        full = np.zeros((n, k), dtype=np.int64)
        fail = [0] * n
        queue = deque()
        for i in range(k):
            if i in goto[0]:
                full[0, i] = goto[0][i]
                queue.append(goto[0][i])
            else:
                full[0, i] = 0
        while queue:
            q = queue.popleft()
            terminal[q] = terminal[q] or terminal[fail[q]]
            for i in range(k):
                nxt = goto[q].get(i)
                if nxt is None:
                    full[q, i] = full[fail[q], i]
                else:
                    fail[nxt] = full[fail[q], i]
                    full[q, i] = nxt
                    queue.append(nxt)

        dead = np.array(terminal)
        live = np.flatnonzero(~dead)
        renumber = -np.ones(n, dtype=np.int64)
        renumber[live] = np.arange(len(live))
        self.delta = renumber[full[live]]
        self.n_states = len(live)
        self.weights = None if w is None else self._letter_weights(w)

    def _letter_weights(self, w) -> np.ndarray:
        if isinstance(w, WeightVector):
            w = w.integers()
        w = tuple(int(v) for v in w)
        if len(w) != self.m or any(v < 1 for v in w):
            raise ValueError(f"need {self.m} positive integer weights, got {w}")
        return np.array(w + w, dtype=np.int64)

    def accepts(self, word: Sequence[int]) -> bool:
        q = 0
        for x in word:
            q = self.delta[q, _letter_index(x, self.m)]
            if q < 0:
                return False
        return True

    def transfer(self, z: float, weights=None) -> csr_matrix:
        """Sparse ``A(z)`` with ``A[q, q'] = sum z^-w(letter)`` over live edges."""
        wts = self.weights if weights is None else self._letter_weights(weights)
        rows, cols = np.nonzero(self.delta >= 0)
        vals = np.power(float(z), -wts[cols].astype(float))
        return csr_matrix((vals, (rows, self.delta[rows, cols])),
                          shape=(self.n_states, self.n_states))


@dataclass
class GrowthSeries:
    """``f[n]`` words of weight exactly n, ``g[n]`` words of weight at most n."""

    f: list[int]
    g: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.g:
            self.g = list(itertools.accumulate(self.f))


def _count_automaton(F: ForbiddenSet, wts: tuple[int, ...], n_max: int) -> list[int]:
    aut = AvoidanceAutomaton(F, wts)
    S = aut.n_states
    layers = [np.zeros(S, dtype=object) for _ in range(n_max + 1)]
    layers[0][0] = 1
    lw = aut.weights
    edges = []
    for i in range(2 * F.m):
        src = np.flatnonzero(aut.delta[:, i] >= 0)
        edges.append((int(lw[i]), src, aut.delta[src, i]))
    f = []
    for n in range(n_max + 1):
        cur = layers[n]
        f.append(int(cur.sum()))
        for wt, src, dst in edges:
            if n + wt <= n_max:
                np.add.at(layers[n + wt], dst, cur[src])
        layers[n] = None
    return f


def _count_brute(F: ForbiddenSet, wts: tuple[int, ...], n_max: int) -> list[int]:
    # depth-first enumeration; a word is pruned as soon as a suffix is forbidden
    pats = set(F.patterns)
    lengths = sorted({len(u) for u in pats})
    letters = [x for i in range(1, F.m + 1) for x in (i, -i)]
    f = [0] * (n_max + 1)

    def grow(word: list[int], weight: int):
        f[weight] += 1
        for x in letters:
            wt = weight + wts[abs(x) - 1]
            if wt > n_max:
                continue
            word.append(x)
            if not any(len(word) >= t and tuple(word[-t:]) in pats for t in lengths):
                grow(word, wt)
            word.pop()

    grow([], 0)
    return f


def count_avoiding(F: ForbiddenSet, w, n_max: int, mode: str = "automaton") -> GrowthSeries:
    """Exact counts of pattern-free words by total weight, up to ``n_max``."""
    if isinstance(w, WeightVector):
        if not w.integral:
            raise ValueError(f"count_avoiding needs integer weights, got {w}")
        wts = w.integers()
    else:
        wts = tuple(w)
        if any(not float(v).is_integer() or v < 1 for v in wts):
            raise ValueError(f"count_avoiding needs positive integer weights, got {wts}")
        wts = tuple(int(v) for v in wts)
    if not F.reduced_set:
        raise ValueError("forbidden set must be reduced first")
    if mode == "automaton":
        return GrowthSeries(_count_automaton(F, wts, n_max))
    if mode == "brute_force":
        return GrowthSeries(_count_brute(F, wts, n_max))
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class CorrelationPolynomial:
    """Sparse polynomial ``sum coeffs[j] * z^j`` over the weighted overlaps."""

    coeffs: dict[int, int]

    def __call__(self, z):
        return sum(c * z ** j for j, c in self.coeffs.items())

    def __bool__(self):
        return bool(self.coeffs)


def correlation_polynomial(W1: Sequence[int], W2: Sequence[int], w) -> CorrelationPolynomial:
    """Weights of the words v that end W1 and begin W2 (v nonempty)."""
    W1, W2 = tuple(W1), tuple(W2)
    wts = w.integers() if isinstance(w, WeightVector) else tuple(w)
    coeffs: dict[int, int] = {}
    for k in range(1, min(len(W1), len(W2)) + 1):
        if W1[-k:] == W2[:k]:
            j = sum(wts[abs(x) - 1] for x in W2[:k])
            coeffs[j] = coeffs.get(j, 0) + 1
    return CorrelationPolynomial(coeffs)


def myers_system(F: ForbiddenSet, w, z: float) -> tuple[np.ndarray, np.ndarray]:
    """Matrix and right-hand side of the linear system for F(z), F_1(z), ..., F_k(z)."""
    wts = w.integers() if isinstance(w, WeightVector) else tuple(w)
    k = len(F.patterns)
    A = np.zeros((k + 1, k + 1))
    b = np.zeros(k + 1)
    A[0, 0] = 1 - 2 * sum(z ** -float(v) for v in wts)
    A[0, 1:] = 1
    b[0] = 1
    for i, Wi in enumerate(F.patterns):
        A[i + 1, 0] = 1
        for l, Wl in enumerate(F.patterns):
            c = correlation_polynomial(Wl, Wi, wts)
            if c:
                A[i + 1, l + 1] = -c(float(z))
    return A, b


def myers_solve_at(F: ForbiddenSet, w, z: float, *, check_growth: bool = True) -> dict:
    """Solve the Myers system at a point z beyond the growth rate.

    Returns ``{"F": F(z), "F_W": {pattern: F_W(z)}, "residual": max relative residual}``.
    """
    if z <= 1:
        raise ValueError(f"z must exceed 1, got {z}")
    if check_growth:
        M = growth_rate(F, w)
        if z <= M:
            raise ValueError(f"z={z} is not beyond the growth rate {M}")
    A, b = myers_system(F, w, z)
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"Myers system is singular at z={z}") from exc
    scale = np.abs(A) @ np.abs(x) + np.abs(b)
    residual = float(np.max(np.abs(A @ x - b) / np.where(scale > 0, scale, 1)))
    return {"F": float(x[0]), "F_W": dict(zip(F.patterns, x[1:].tolist())), "residual": residual}


# ---------------------------------------------------------------- growth rate


def _scc_blocks(A: csr_matrix) -> list[np.ndarray]:
    """State sets of strongly connected components that carry a cycle."""
    ncomp, labels = connected_components(A, directed=True, connection="strong")
    blocks = []
    diag = A.diagonal()
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        if len(idx) > 1 or diag[idx[0]] > 0:
            blocks.append(idx)
    return blocks


def _rho_vs_one(A: csr_matrix, x: np.ndarray, max_iter: int = 20000) -> tuple[int, np.ndarray, float]:
    """Sign of rho(A) - 1 for an irreducible nonnegative block.

    Power iteration on A + I (aperiodic); Collatz-Wielandt ratios of A
    bracket rho and stop the loop as soon as the bracket excludes 1.
    """
    for _ in range(max_iter):
        y = A @ x
        ratio = y / x
        lo, hi = ratio.min(), ratio.max()
        if lo > 1:
            return 1, x, lo
        if hi < 1:
            return -1, x, hi
        if hi - lo < 1e-13:
            est = 0.5 * (lo + hi)
            return (1 if est > 1 else -1 if est < 1 else 0), x, est
        x = y + x
        x = x / x.max()
    est = 0.5 * (lo + hi)
    return (1 if est > 1 else -1), x, est


class _GrowthProblem:
    def __init__(self, aut: AvoidanceAutomaton):
        self.aut = aut
        A1 = aut.transfer(1.0)
        self.blocks = _scc_blocks(A1)
        self.starts = [np.ones(len(b)) for b in self.blocks]

    def sign(self, z: float) -> int:
        """Sign of rho(A(z)) - 1, the maximum over cyclic components."""
        A = self.aut.transfer(z)
        best = -1
        for k, idx in enumerate(self.blocks):
            sub = A[idx][:, idx]
            s, x, _ = _rho_vs_one(sub, self.starts[k])
            self.starts[k] = x
            if s > 0:
                return 1
            best = max(best, s)
        return best


def growth_rate(F: ForbiddenSet, w, tol: float = 1e-10) -> float:
    """Exponential growth rate M of pattern-free words by weight.

    M is the z >= 1 where the spectral radius of the weighted transfer
    operator A(z) crosses 1; returns 1.0 for subexponential languages.
    """
    aut = AvoidanceAutomaton(F, w)
    prob = _GrowthProblem(aut)
    if not prob.blocks or prob.sign(1.0) <= 0:
        return 1.0
    lo, hi = 1.0, float(2 * F.m)
    while prob.sign(hi) > 0:
        hi *= 2
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if prob.sign(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ------------------------------------------------------------------ p(z)


def prefix_groups(p: Presentation, lam, w) -> tuple[dict[tuple[Fraction, Fraction], int], dict]:
    """Group the distinct prefixes ``U_r`` by (weight of last letter, |U_r|_w).

    Returns the grouped counts and a summary with ``l`` (shortest U_r),
    ``j`` (largest |R_{lam,s}|) and the per-letter set sizes. Prefixes are
    hashed as byte strings so relators of length ~10^4 stay cheap.
    """
    lam = as_fraction(lam)
    sym = p.symmetrize()
    if not isinstance(w, WeightVector):
        w = WeightVector(tuple(w))
    D = math.lcm(*(v.denominator for v in w.per_generator))
    ints = [int(v * D) for v in w.per_generator]
    longest = max((len(r) for r in sym.relators), default=0)
    # exact prefix sums; fall back to Python ints when int64 could overflow
    big = max(ints) * 2 * max(longest, 1) >= 2**62
    iw = np.array(ints, dtype=object if big else np.int64)
    seen = set()
    groups: dict[tuple[Fraction, Fraction], int] = defaultdict(int)
    per_letter: dict[int, int] = defaultdict(int)
    shortest = None
    for c, r in enumerate(sym.relators):
        n = len(r)
        t = ceil_fraction(lam * n)
        arr = np.array(r + r, dtype=np.int32)
        cum = np.concatenate([[0], np.cumsum(iw[np.abs(arr) - 1])])
        for s in range(sym.periods[c]):
            key = arr[s:s + t].tobytes()
            if key in seen:
                continue
            seen.add(key)
            last = int(arr[s + t - 1])
            per_letter[last] += 1
            groups[(w.of(last), Fraction(int(cum[s + t] - cum[s]), D))] += 1
            shortest = t if shortest is None else min(shortest, t)
    info = {
        "l": shortest,
        "j": max(per_letter.values(), default=0),
        "per_letter": dict(sorted(per_letter.items())),
        "n_prefixes": len(seen),
    }
    return dict(groups), info


@dataclass(frozen=True)
class PPolynomial:
    """``p`` written in the log variable t = ln z.

    ``p(t) = 1 - sum_s 1/(e^{w_s t}+1) + sum_{(a,b)} c_ab e^{a t}/(e^{a t}+1) e^{-b t}``
    where ``letter_weights`` lists w(s) for the 2m letters and ``tail`` maps
    (a, b) = (w(s), |u|_w) to multiplicities.
    """

    letter_weights: tuple[Fraction, ...]
    tail: tuple[tuple[Fraction, Fraction, int], ...]

    @cached_property
    def free_root(self) -> "mpmath.mpf":
        """Root t0 of the relator-free part; e^{t0} is M0."""
        return _free_root(self.letter_weights, self.dps)

    @cached_property
    def dps(self) -> int:
        # q(M0) can be as small as M0^(-max |u|_w); carry enough digits to see it
        t0 = _free_root_float([float(v) for v in self.letter_weights])
        bmax = max((float(b) for _, b, _ in self.tail), default=0.0)
        return int(math.ceil(bmax * t0 / math.log(10))) + 40

    def free_part(self, t):
        with mpmath.workdps(self.dps):
            t = mpmath.mpf(t)
            return 1 - sum(1 / (mpmath.exp(mpmath.mpf(a.numerator) / a.denominator * t) + 1)
                           for a in self.letter_weights)

    def __call__(self, t):
        """Evaluate at the log variable t (so at z = e^t)."""
        with mpmath.workdps(self.dps):
            t = mpmath.mpf(t)
            val = self.free_part(t)
            for a, b, c in self.tail:
                ea = mpmath.exp(_mpq(a) * t)
                val += c * ea / (ea + 1) * mpmath.exp(-_mpq(b) * t)
            return val


def _mpq(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def _free_root_float(weights: Sequence[float]) -> float:
    lo, hi = 1e-9, len(weights) * math.log(max(len(weights) - 1, 2)) / min(weights) + 1
    while hi - lo > 1e-12 * hi:
        mid = 0.5 * (lo + hi)
        if sum(0.5 * (1 - math.tanh(a * mid / 2)) for a in weights) > 1:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _free_root(weights: tuple[Fraction, ...], dps: int):
    # sum_s 1/(e^{w_s t} + 1) = 1 is strictly decreasing in t; polish the float root
    with mpmath.workdps(dps):
        f = lambda t: 1 - sum(1 / (mpmath.exp(_mpq(a) * t) + 1) for a in weights)
        t = _free_root_float([float(a) for a in weights])
        lo, hi = mpmath.mpf(t) * (1 - 1e-9), mpmath.mpf(t) * (1 + 1e-9)
        assert f(lo) < 0 < f(hi)
        return mpmath.findroot(f, (lo, hi), solver="anderson")


def p_polynomial(p: Presentation, lam, w) -> PPolynomial:
    if not isinstance(w, WeightVector):
        w = WeightVector(tuple(w))
    groups, _ = prefix_groups(p, lam, w) if p.relators else ({}, None)
    letters = tuple(w.per_generator) * 2
    tail = tuple(sorted((a, b, c) for (a, b), c in groups.items()))
    return PPolynomial(letters, tail)


def _integral(w) -> WeightVector:
    if not isinstance(w, WeightVector):
        w = WeightVector(tuple(w))
    if not w.integral:
        raise ValueError(f"integer weights required, got {w}")
    return w


def p_eval(p: Presentation, lam, w, z) -> float:
    """Value of p at z > 1 for integer weights."""
    w = _integral(w)
    if z <= 1:
        raise ValueError(f"z must exceed 1, got {z}")
    P = p_polynomial(p, lam, w)
    with mpmath.workdps(P.dps):
        return float(P(mpmath.log(mpmath.mpf(z))))


def p_root_log(P: PPolynomial, grid: int = 64, rtol: float = 1e-10):
    """Largest real root of P in the log variable, searched over (0, t0].

    Returns ``(t_root, status)``; t_root is the lower end of the final
    bracket (or t0 itself when P(t0) vanishes at working precision), and
    ``None`` when no sign change is seen on the grid.
    """
    with mpmath.workdps(P.dps):
        t0 = P.free_root
        v0 = P(t0)
        if abs(v0) < mpmath.mpf(10) ** (-(P.dps - 15)):
            return t0, "root at M0"
        ts = [t0 * k / grid for k in range(1, grid + 1)]
        vals = [P(t) for t in ts]
        signs = [0 if v == 0 else (1 if v > 0 else -1) for v in vals]
        for k in range(grid - 1, 0, -1):
            if signs[k] == 0:
                return ts[k], "grid point"
            if signs[k] != signs[k - 1]:
                lo, hi, slo = ts[k - 1], ts[k], signs[k - 1]
                # in t, a width rtol gives relative error rtol in z
                while hi - lo > mpmath.mpf(rtol) / 4:
                    mid = (lo + hi) / 2
                    v = P(mid)
                    if v == 0:
                        return mid, "exact"
                    if (v > 0) == (slo > 0):
                        lo = mid
                    else:
                        hi = mid
                return lo, "bisection"
        return None, "no sign change"


def p_largest_root(p: Presentation, lam, w) -> Optional[float]:
    """Largest real root of p in (1, M0]; a lower bound for the growth rate."""
    w = _integral(w)
    P = p_polynomial(p, lam, w)
    t, _ = p_root_log(P)
    if t is None:
        return None
    with mpmath.workdps(P.dps):
        return float(mpmath.exp(t))
