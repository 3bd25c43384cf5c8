"""Gromov density model: sampling, Markov chain constants and the genericity harness.

Randomness comes from numpy's Philox counter-based generator. Stream
``(seed, ell, index)`` is ``Philox(SeedSequence([seed, ell, index]))``, so
any single relator or trial can be regenerated in isolation and results
do not depend on thread scheduling.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from sympy import integer_nthroot

from .presentations import check_c_prime, even_distribution_of_word
from .words import Presentation, Word, as_fraction, ceil_fraction

__all__ = [
    "DensityModelParams",
    "GenericityRow",
    "GenericityReport",
    "stream",
    "sample_reduced_word",
    "sample_cyclically_reduced_word",
    "sample_presentation",
    "relator_count",
    "chain_matrix",
    "chain_spectral",
    "model_constants",
    "C_m",
    "d_m",
    "cyclically_reduced_count",
    "chernoff_bound",
    "pooled_union_bound",
    "genericity_experiment",
    "CSV_HEADER",
]

CSV_HEADER = ["m", "ell", "lambda", "trials", "fail_run", "fail_halfwin",
              "fail_freqwin", "fail_smallcanc", "rate_pooled", "bound_pooled"]


def stream(seed: int, *keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, keys)])))


def _to_letter(i: int) -> int:
    # index 2k is a_{k+1}, index 2k+1 its inverse, so inverse(i) = i ^ 1
    return (i >> 1) + 1 if i % 2 == 0 else -((i >> 1) + 1)


def sample_reduced_word(m: int, ell: int, rng: np.random.Generator) -> Word:
    """Uniform reduced word: uniform first letter, then uniform non-backtracking steps."""
    if ell < 1:
        raise ValueError(f"length must be positive, got {ell}")
    k = 2 * m
    first = int(rng.integers(k))
    steps = rng.integers(1, k, size=ell - 1)
    out = [first]
    x = first
    for d in steps.tolist():
        x = ((x ^ 1) + d) % k
        out.append(x)
    return tuple(_to_letter(i) for i in out)


def sample_cyclically_reduced_word(m: int, ell: int, rng: np.random.Generator) -> Word:
    """Rejection sampling from uniform reduced words."""
    while True:
        w = sample_reduced_word(m, ell, rng)
        if ell == 1 or w[0] != -w[-1]:
            return w


@dataclass(frozen=True)
class DensityModelParams:
    m: int
    ell: int
    d: Fraction = Fraction(0)
    relator_count_override: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "d", as_fraction(self.d))
        if self.m < 2:
            raise ValueError(f"need m >= 2, got {self.m}")
        if self.ell < 1:
            raise ValueError(f"need ell >= 1, got {self.ell}")
        if not 0 <= self.d < 1:
            raise ValueError(f"density must lie in [0, 1), got {self.d}")
        if self.relator_count_override is not None and self.d != 0:
            raise ValueError("a relator count override is only allowed at density 0")


def relator_count(params: DensityModelParams) -> tuple[int, bool]:
    """``floor((2m-1)^(d*ell))`` in exact integers, and whether it was bumped to 1.

    With d = p/q the count is the integer q-th root of (2m-1)^(p*ell).
    """
    if params.relator_count_override is not None:
        return params.relator_count_override, False
    d = params.d
    if d == 0:
        return 1, False
    root, _ = integer_nthroot((2 * params.m - 1) ** (d.numerator * params.ell), d.denominator)
    root = int(root)
    if root == 0:
        return 1, True
    return root, False


def sample_presentation(params: DensityModelParams) -> Presentation:
    """Relators drawn with replacement; relator i uses stream (seed, ell, i)."""
    n, _ = relator_count(params)
    rels = tuple(
        sample_cyclically_reduced_word(params.m, params.ell, stream(params.seed, params.ell, i))
        for i in range(n)
    )
    return Presentation(params.m, rels)


# --------------------------------------------------------------- the chain


def chain_matrix(m: int) -> np.ndarray:
    """Non-backtracking letter chain on a_1..a_m, a_1^-1..a_m^-1."""
    k = 2 * m
    M = np.full((k, k), 1.0 / (k - 1))
    for i in range(m):
        M[i, m + i] = 0.0
        M[m + i, i] = 0.0
    return M


def _cheeger_bruteforce(m: int) -> Fraction:
    k = 2 * m
    p = Fraction(1, k - 1)
    best = None
    for size in range(1, m + 1):
        for S in itertools.combinations(range(k), size):
            inside = set(S)
            flow = Fraction(0)
            for x in S:
                inv = (x + m) % k
                for y in range(k):
                    if y not in inside and y != inv:
                        flow += Fraction(1, k) * p
            ratio = flow / Fraction(size, k)
            best = ratio if best is None else min(best, ratio)
    return best


def chain_spectral(m: int) -> dict:
    """Spectrum, spectral gap and Cheeger constant of the letter chain."""
    if not 2 <= m <= 6:
        raise ValueError(f"chain_spectral supports 2 <= m <= 6, got {m}")
    M = chain_matrix(m)
    # M is symmetric, so eigvalsh is exact up to rounding
    eig = np.sort(np.linalg.eigvalsh(M))[::-1]
    beta1 = float(eig[1])
    phi = _cheeger_bruteforce(m)
    return {
        "matrix": M,
        "eigenvalues": eig,
        "beta1": beta1,
        "epsilon": 1.0 - beta1,
        "phi": phi,
        "phi_lower_bound": Fraction(m - 1, 2 * m - 1),
        "epsilon_lower_bound": Fraction((m - 1) ** 2, 2 * (2 * m - 1) ** 2),
        "cheeger_epsilon_bound": phi ** 2 / 2,
    }


def C_m(m: int) -> Fraction:
    return Fraction((m - 1) ** 2, 384 * m ** 2 * (2 * m - 1) ** 2)


def d_m(m: int) -> float:
    return float(C_m(m)) / (16 * math.log(2 * m - 1))


def cyclically_reduced_count(m: int, ell: int) -> int:
    return (2 * m - 1) ** ell + m + (-1) ** ell * (m - 1)


def chernoff_bound(delta: float, n: int, m: int = 2, eps_choice: str = "paper") -> float:
    """``2 exp(-eps delta^2 n / 12 + 1)`` with eps the paper's bound or the exact gap."""
    if eps_choice == "paper":
        eps = float(Fraction((m - 1) ** 2, 2 * (2 * m - 1) ** 2))
    elif eps_choice == "exact":
        eps = 1.0 - 1.0 / (2 * m - 1)
    else:
        raise ValueError(f"unknown eps_choice {eps_choice!r}")
    return 2 * math.exp(-eps * delta ** 2 * n / 12 + 1)


def model_constants(m: int) -> dict:
    return {
        "C_m": C_m(m),
        "d_m": d_m(m),
        "cyclically_reduced_count": lambda ell: cyclically_reduced_count(m, ell),
        "chernoff_bound": lambda delta, n, eps_choice="paper": chernoff_bound(delta, n, m, eps_choice),
    }


def pooled_union_bound(m: int, ell: int, constant: Optional[float] = None) -> float:
    """Union bound on a cyclically reduced word having a bad rotation (lambda = 1/16).

    Sums the three reduced-word bounds (runs, half-windows, frequency
    windows), then counts rotations of r and r^-1 against the exact number
    of cyclically reduced words. ``constant`` replaces C_m (e.g. by the
    value implied by the exact spectral gap).
    """
    C = float(C_m(m)) if constant is None else constant
    q = math.ceil(ell / 16)
    run = 2 * m * ell / (2 * m - 1) ** q
    half = ell * (2 * m * math.exp(-C * math.ceil(ell / 4) + 1) + 2 * m * math.exp(-C * ell + 1))
    freq = 2 * m * ell * math.exp(-C / 16 * ell)
    # reduced words over cyclically reduced words, without forming (2m-1)^ell
    k = 2 * m - 1
    tail = (m + (-1) ** ell * (m - 1)) * math.exp(-ell * math.log(k))
    ratio = (2 * m / k) / (1 + tail)
    return 2 * ell * ratio * (run + half + freq)


@dataclass
class GenericityRow:
    m: int
    ell: int
    lam: Fraction
    trials: int
    fail_run: int
    fail_halfwin: int
    fail_freqwin: int
    fail_smallcanc: int
    fail_pooled: int
    bound_pooled: Optional[float]
    bound_pooled_exact_gap: Optional[float]

    @property
    def rate_pooled(self) -> Fraction:
        return Fraction(self.fail_pooled, self.trials)

    def csv_row(self) -> list:
        return [self.m, self.ell, str(self.lam), self.trials, self.fail_run, self.fail_halfwin,
                self.fail_freqwin, self.fail_smallcanc, f"{float(self.rate_pooled):.6g}",
                "" if self.bound_pooled is None else f"{self.bound_pooled:.6g}"]


@dataclass
class GenericityReport:
    m: int
    lam: Fraction
    trials: int
    seed: int
    rows: list[GenericityRow] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow(row.csv_row())
        return buf.getvalue()


def _trial(m: int, ell: int, lam: Fraction, seed: int, idx: int) -> tuple[int, int, int, int]:
    r = sample_cyclically_reduced_word(m, ell, stream(seed, ell, idx))
    # cyclic windows of r cover every rotation; r^-1 has the same counts and runs
    res, _ = even_distribution_of_word(r, m, lam)
    rng = stream(seed, ell, idx, 1)
    pair = Presentation(m, (sample_cyclically_reduced_word(m, ell, rng),
                            sample_cyclically_reduced_word(m, ell, rng)))
    try:
        sc_fail = not check_c_prime(pair.symmetrize(), lam)
    except ValueError:
        sc_fail = True
    return (int(not res["run"]), int(not res["halfwin"]), int(not res["freqwin"]), int(sc_fail),
            int(not all(res.values())))


def genericity_experiment(m: int, ells: Sequence[int], lam=Fraction(1, 16), trials: int = 200,
                          seed: int = 0, threads: int = 1) -> GenericityReport:
    """Failure counts of the even-distribution and C'(lam) conditions per length."""
    lam = as_fraction(lam)
    if trials < 1:
        raise ValueError("trials must be positive")
    report = GenericityReport(m, lam, trials, seed)
    for ell in ells:
        args = [(m, ell, lam, seed, i) for i in range(trials)]
        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                results = list(pool.map(lambda a: _trial(*a), args))
        else:
            results = [_trial(*a) for a in args]
        sums = [sum(col) for col in zip(*results)]
        bound = exact = math.inf
        if lam == Fraction(1, 16):
            # the union bound is derived for lambda = 1/16 only
            bound = pooled_union_bound(m, ell)
            eps = 1.0 - 1.0 / (2 * m - 1)
            exact = pooled_union_bound(m, ell, constant=eps / (192 * m ** 2))
        report.rows.append(GenericityRow(
            m, ell, lam, trials, *sums,
            bound_pooled=bound if bound < 1 else None,
            bound_pooled_exact_gap=exact if exact < 1 else None,
        ))
    return report
