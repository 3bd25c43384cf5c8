"""Small cancellation checks, even distribution, lambda-reduced words and Dehn's algorithm.

Every function that walks ``R*`` takes a symmetrized :class:`Presentation`
(see :meth:`Presentation.symmetrize`). Thresholds involving ``lambda`` are
compared in exact rational arithmetic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .words import (
    Presentation,
    Word,
    as_fraction,
    ceil_fraction,
    count_vector,
    free_reduce,
    invert,
    is_reduced,
)

__all__ = [
    "PieceReport",
    "CPrimeResult",
    "EvenDistributionReport",
    "TranslationApparentReport",
    "Certificate",
    "max_piece_length",
    "check_c_prime",
    "check_even_distribution",
    "check_translation_apparent",
    "is_lambda_reduced",
    "lambda_forbidden_factors",
    "dehn_reduce",
    "represents_identity",
    "dehn_validity",
    "surface_presentation",
    "surface_geodesic_certificate",
]


def _lcp(a: Sequence[int], b: Sequence[int]) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def _check_lambda(lam) -> Fraction:
    lam = as_fraction(lam)
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    return lam


@dataclass(frozen=True)
class PieceReport:
    """Longest piece of a symmetrized presentation.

    ``witness`` is ``(piece, r, r2)`` with ``r != r2`` both in R* and both
    starting with ``piece``; ``None`` when R* has fewer than two words.
    ``per_relator_max`` maps each class representative to the longest piece
    contained (cyclically) in it.
    """

    max_piece_length: int
    witness: Optional[tuple[Word, Word, Word]]
    per_relator_max: dict[Word, int]
    # longest piece that is a prefix of each R* word, keyed by (class, shift)
    prefix_piece: dict[tuple[int, int], int] = field(repr=False, default_factory=dict)


@lru_cache(maxsize=64)
def max_piece_length(p: Presentation) -> PieceReport:
    """Longest common prefix over ordered pairs of distinct words of R*.

    R* is sorted by a K-letter prefix key; adjacent entries then realise
    every maximal common prefix. K doubles until no adjacent pair shares a
    full key, at which point the adjacent LCPs are exact.
    """
    if not p.symmetrized:
        raise ValueError("max_piece_length needs a symmetrized presentation")
    entries = list(p.iter_rstar())
    if len(entries) < 2:
        per = {r: 0 for r in p.relators}
        return PieceReport(0, None, per, {e: 0 for e in entries})
    max_len = max(len(r) for r in p.relators)
    K = 32
    while True:
        k = min(K, max_len)
        keyed = sorted(
            (p.doubled[c][s : s + min(k, len(p.relators[c]))], c, s) for c, s in entries
        )
        adjacent = [_lcp(keyed[i][0], keyed[i + 1][0]) for i in range(len(keyed) - 1)]
        if k >= max_len or max(adjacent) < k:
            break
        K *= 2

    best = max(adjacent)
    at = adjacent.index(best)
    _, c1, s1 = keyed[at]
    _, c2, s2 = keyed[at + 1]
    r1, r2 = p.rstar_word(c1, s1), p.rstar_word(c2, s2)
    witness = (r1[:best], r1, r2)

    prefix_piece = {}
    per_class = [0] * len(p.relators)
    for i, (_, c, s) in enumerate(keyed):
        left = adjacent[i - 1] if i > 0 else 0
        right = adjacent[i] if i < len(adjacent) else 0
        v = max(left, right)
        prefix_piece[(c, s)] = v
        per_class[c] = max(per_class[c], v)
    per = {p.relators[c]: v for c, v in enumerate(per_class)}
    return PieceReport(best, witness, per, prefix_piece)


def _alpha_key(r: Word) -> tuple:
    return tuple((abs(x), x < 0) for x in r)


@dataclass(frozen=True)
class CPrimeResult:
    holds: bool
    witness: Optional[tuple[Word, Word]] = None  # (piece, relator containing it)

    def __bool__(self):
        return self.holds


def check_c_prime(p: Presentation, lam) -> CPrimeResult:
    """C'(lambda): every piece inside r is strictly shorter than lambda*|r|."""
    lam = _check_lambda(lam)
    report = max_piece_length(p)
    # report the violation with the largest ratio |u|/|r|
    worst = None
    num, den = lam.numerator, lam.denominator
    lengths = [len(r) for r in p.relators]
    for (c, s), length in report.prefix_piece.items():
        n = lengths[c]
        if length * den >= num * n:
            # ties go to the first relator in the order a < A < b < B < ...
            key = (-Fraction(length, n), _alpha_key(p.rstar_word(c, s)))
            if worst is None or key < worst[0]:
                worst = (key, c, s, length)
    if worst is not None:
        _, c, s, length = worst
        r = p.rstar_word(c, s)
        return CPrimeResult(False, (r[:length], r))
    return CPrimeResult(True)


@dataclass
class EvenDistributionReport:
    """Per-class outcome of the three even-distribution conditions.

    ``per_relator[rep] = {"run": bool, "halfwin": bool, "freqwin": bool}``.
    ``witness`` describes the first violation found: the class
    representative, the cyclic offset, the offending subword and the
    generator counts that break the inequality.
    """

    lam: Fraction
    per_relator: dict[Word, dict[str, bool]]
    witness: Optional[dict] = None

    @property
    def run(self) -> bool:
        return all(v["run"] for v in self.per_relator.values())

    @property
    def halfwin(self) -> bool:
        return all(v["halfwin"] for v in self.per_relator.values())

    @property
    def freqwin(self) -> bool:
        return all(v["freqwin"] for v in self.per_relator.values())

    @property
    def holds(self) -> bool:
        return self.run and self.halfwin and self.freqwin

    def __bool__(self):
        return self.holds


def _cyclic_runs(r: Word) -> list[tuple[int, int]]:
    """Maximal runs ``(start, length)`` of a cyclic word; one run if constant."""
    n = len(r)
    if all(x == r[0] for x in r):
        return [(0, n)]
    start = next(i for i in range(n) if r[i] != r[i - 1])
    runs = []
    i = start
    while True:
        j = i
        length = 0
        while r[j % n] == r[i % n] and length < n:
            j += 1
            length += 1
        runs.append((i % n, length))
        i = j
        if i % n == start:
            break
    return runs


def _window_counts(doubled: np.ndarray, n: int, width: int, m: int) -> np.ndarray:
    """Counts of each generator in the ``n`` cyclic windows of given width."""
    gens = np.abs(doubled) - 1
    onehot = np.zeros((len(doubled) + 1, m), dtype=np.int64)
    onehot[np.arange(1, len(doubled) + 1), gens] = 1
    cum = np.cumsum(onehot, axis=0)
    starts = np.arange(n)
    return cum[starts + width] - cum[starts]


def even_distribution_of_word(r: Word, m: int, lam: Fraction) -> tuple[dict[str, bool], Optional[dict]]:
    """Check the three conditions on every cyclic subword of ``r``.

    Rotations of r (and, by symmetry of the counts, of r^-1) are exactly
    the words whose linear subwords these cyclic windows enumerate.
    """
    n = len(r)
    out = {"run": True, "halfwin": True, "freqwin": True}
    witness = None

    for start, length in _cyclic_runs(r):
        if not Fraction(length) < lam * n:
            out["run"] = False
            witness = witness or {"condition": "run", "relator": r, "start": start,
                                  "subword": (r[start],) * length, "run_length": length}
            break

    total = count_vector(r, m)
    doubled = np.array(r + r, dtype=np.int64)
    width = ceil_fraction(4 * lam * n)
    if width <= n:
        counts = _window_counts(doubled, n, width, m)
        bad = np.argwhere(~(2 * counts < total[None, :]))
        if len(bad):
            start, gen = (int(v) for v in bad[0])
            out["halfwin"] = False
            witness = witness or {"condition": "halfwin", "relator": r, "start": start,
                                  "subword": tuple(int(v) for v in doubled[start:start + width]),
                                  "generator": gen + 1, "count": int(counts[start, gen]),
                                  "relator_count": int(total[gen])}

    width = ceil_fraction(lam * n)
    counts = _window_counts(doubled, n, width, m)
    bad = np.argwhere(~(8 * m * counts > width))
    if len(bad):
        start, gen = (int(v) for v in bad[0])
        out["freqwin"] = False
        witness = witness or {"condition": "freqwin", "relator": r, "start": start,
                              "subword": tuple(int(v) for v in doubled[start:start + width]),
                              "generator": gen + 1, "count": int(counts[start, gen])}
    return out, witness


def check_even_distribution(p: Presentation, lam) -> EvenDistributionReport:
    """Run, half-window and frequency-window conditions for every r in R*."""
    lam = _check_lambda(lam)
    if not p.symmetrized:
        raise ValueError("check_even_distribution needs a symmetrized presentation")
    per = {}
    witness = None
    for r in p.relators:
        res, wit = even_distribution_of_word(r, p.m, lam)
        per[r] = res
        witness = witness or wit
    return EvenDistributionReport(lam, per, witness)


@dataclass
class TranslationApparentReport:
    holds: bool
    lam: Fraction
    symmetrized_by_check: bool
    cyclically_reduced: bool
    c_prime: Optional[CPrimeResult]
    even: Optional[EvenDistributionReport]
    causes: list[str]

    def __bool__(self):
        return self.holds


def check_translation_apparent(p: Presentation, lam) -> TranslationApparentReport:
    """Symmetrize if needed, then C'(lambda) plus the even-distribution conditions."""
    lam = _check_lambda(lam)
    causes = []
    if not p.all_cyclically_reduced:
        return TranslationApparentReport(False, lam, False, False, None, None,
                                         ["relators not cyclically reduced"])
    sym = p.symmetrize()
    cp = check_c_prime(sym, lam)
    if not cp:
        causes.append(f"C'({lam}) fails")
    ev = check_even_distribution(sym, lam)
    for name in ("run", "halfwin", "freqwin"):
        if not getattr(ev, name):
            causes.append(f"even distribution ({name}) fails")
    return TranslationApparentReport(not causes, lam, not p.symmetrized, True, cp, ev, causes)


@lru_cache(maxsize=64)
def lambda_forbidden_factors(p: Presentation, lam: Fraction) -> dict[int, frozenset[Word]]:
    """Length ``ceil(lam*|r|)`` subwords of relators, grouped by length."""
    lam = _check_lambda(lam)
    if not p.symmetrized:
        raise ValueError("needs a symmetrized presentation")
    groups: dict[int, set[Word]] = {}
    for c, s, u in p.cyclic_windows(lambda n: ceil_fraction(lam * n)):
        groups.setdefault(len(u), set()).add(u)
    return {t: frozenset(v) for t, v in groups.items()}


def is_lambda_reduced(x: Sequence[int], p: Presentation, lam) -> bool:
    """True iff no subword of x of length ceil(lam*|r|) is a subword of r in R*."""
    x = tuple(x)
    if not is_reduced(x):
        raise ValueError(f"{x} is not reduced")
    groups = lambda_forbidden_factors(p, _check_lambda(lam))
    for t, factors in groups.items():
        for i in range(len(x) - t + 1):
            if x[i:i + t] in factors:
                return False
    return True


@lru_cache(maxsize=32)
def _dehn_index(p: Presentation) -> dict[int, dict[Word, list[tuple[int, int]]]]:
    # R* words keyed by their first |r|//2 + 1 letters: any usable match starts so
    if not p.symmetrized:
        raise ValueError("dehn_reduce needs a symmetrized presentation")
    index: dict[int, dict[Word, list[tuple[int, int]]]] = {}
    for c, s, key in p.cyclic_windows(lambda n: n // 2 + 1):
        index.setdefault(len(key), {}).setdefault(key, []).append((c, s))
    return dict(sorted(index.items()))


def dehn_reduce(x: Sequence[int], p: Presentation) -> Word:
    """Dehn's algorithm: replace more than half of a relator by the rest of it.

    At each step the leftmost position with a usable match is rewritten,
    using the longest match there (ties go to the lexicographically least
    relator). Correct as a word-problem solver under C'(1/6) and for the
    standard surface-group presentations.
    """
    w = free_reduce(x)
    if not p.relators:
        return w
    index = _dehn_index(p)
    shortest_key = min(index)
    while len(w) >= shortest_key:
        hit = None
        for i in range(len(w) - shortest_key + 1):
            best_len, best_r = 0, None
            for h, table in index.items():
                if i + h > len(w):
                    break
                for c, s in table.get(w[i:i + h], ()):
                    r = p.rstar_word(c, s)
                    k = h + _lcp(w[i + h:], r[h:])
                    if k > best_len or (k == best_len and best_r is not None and r < best_r):
                        best_len, best_r = k, r
            if best_r is not None:
                hit = (i, best_len, best_r)
                break
        if hit is None:
            break
        i, k, r = hit
        w = free_reduce(w[:i] + invert(r[k:]) + w[i + k:])
    return w


def represents_identity(x: Sequence[int], p: Presentation) -> bool:
    return not dehn_reduce(x, p)


def surface_presentation(g: int) -> Presentation:
    """``<a1, b1, ..., ag, bg | [a1, b1] ... [ag, bg]>`` with a_i = 2i-1, b_i = 2i."""
    if g < 2:
        raise ValueError(f"genus must be at least 2, got {g}")
    r = []
    for i in range(1, g + 1):
        a, b = 2 * i - 1, 2 * i
        r += [a, b, -a, -b]
    return Presentation(2 * g, (tuple(r),))


def dehn_validity(p: Presentation) -> Optional[str]:
    """Why Dehn's algorithm decides the word problem for p, or ``None``."""
    if not p.relators:
        return "free"
    sym = p.symmetrize()
    if check_c_prime(sym, Fraction(1, 6)):
        return "C'(1/6)"
    if p.m % 2 == 0 and p.m >= 4 and sym == surface_presentation(p.m // 2).symmetrize():
        return "surface"
    return None


class Certificate(enum.Enum):
    CERTIFIED_GEODESIC = "certified_geodesic"
    UNKNOWN = "unknown"


def surface_geodesic_certificate(x: Sequence[int], g: int) -> Certificate:
    """Sufficient test that x is a geodesic in the genus-g surface group.

    Certified when x avoids every length 2g-2 subword of the cyclic
    permutations of the relator and its inverse; otherwise nothing is claimed.
    """
    x = tuple(x)
    if not is_reduced(x):
        raise ValueError(f"{x} is not reduced")
    sym = surface_presentation(g).symmetrize()
    t = 2 * g - 2
    factors = {u for _, _, u in sym.cyclic_windows(lambda n: t)}
    if any(x[i:i + t] in factors for i in range(len(x) - t + 1)):
        return Certificate.UNKNOWN
    return Certificate.CERTIFIED_GEODESIC
