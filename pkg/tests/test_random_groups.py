import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import chisquare

from wordentropy.presentations import even_distribution_of_word
from wordentropy.random_groups import (
    CSV_HEADER,
    C_m,
    DensityModelParams,
    chain_spectral,
    chernoff_bound,
    cyclically_reduced_count,
    d_m,
    genericity_experiment,
    model_constants,
    pooled_union_bound,
    relator_count,
    sample_cyclically_reduced_word,
    sample_presentation,
    sample_reduced_word,
    stream,
)
from wordentropy.words import is_cyclically_reduced, is_reduced

LAM = Fraction(1, 16)
LETTERS2 = [1, -1, 2, -2]


def all_words(m, n):
    return list(itertools.product([x for i in range(1, m + 1) for x in (i, -i)], repeat=n))


def int_root_floor(N, q):
    lo, hi = 0, 1
    while hi ** q <= N:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        lo, hi = (mid, hi) if mid ** q <= N else (lo, mid)
    return lo


# ----------------------------------------------------------------- sampling


def test_single_letters_uniform():
    rng = stream(11, 1)
    counts = Counter(sample_reduced_word(2, 1, rng)[0] for _ in range(100_000))
    assert chisquare([counts[x] for x in LETTERS2]).pvalue > 1e-3


def test_reduced_words_uniform():
    rng = stream(12, 3)
    counts = Counter(sample_reduced_word(2, 3, rng) for _ in range(100_000))
    reduced = [w for w in all_words(2, 3) if is_reduced(w)]
    assert len(reduced) == 36 and set(counts) == set(reduced)
    assert chisquare([counts[w] for w in reduced]).pvalue > 1e-3


def test_cyclically_reduced_words_uniform():
    rng = stream(13, 3)
    draws = [sample_reduced_word(2, 3, rng) for _ in range(100_000)]
    accepted = [w for w in draws if w[0] != -w[-1]]
    assert abs(len(accepted) / len(draws) - 28 / 36) < 0.01
    cyc = [w for w in all_words(2, 3) if is_cyclically_reduced(w)]
    assert len(cyc) == 28
    counts = Counter(sample_cyclically_reduced_word(2, 3, rng) for _ in range(100_000))
    assert set(counts) == set(cyc)
    assert chisquare([counts[w] for w in cyc]).pvalue > 1e-3


@pytest.mark.property
@given(st.integers(2, 4), st.integers(1, 60), st.integers(0, 2**63 - 1))
def test_samples_are_reduced(m, ell, seed):
    w = sample_cyclically_reduced_word(m, ell, stream(seed, ell))
    assert len(w) == ell and is_cyclically_reduced(w)
    assert all(1 <= abs(x) <= m for x in w)


def test_presentation_examples():
    assert len(sample_presentation(DensityModelParams(2, 100, Fraction(1, 20), seed=7)).relators) == 243
    p = sample_presentation(DensityModelParams(2, 64, 0, 2, seed=1))
    assert len(p.relators) == 2
    assert all(len(r) == 64 and is_cyclically_reduced(r) for r in p.relators)


def test_params_validation():
    with pytest.raises(ValueError):
        DensityModelParams(2, 10, Fraction(1, 4), relator_count_override=3)
    with pytest.raises(ValueError):
        DensityModelParams(2, 10, Fraction(1))
    with pytest.raises(ValueError):
        DensityModelParams(1, 10)


def test_count_never_zero():
    # (2m-1)^(d ell) >= 1, so the floor is never 0 and the bump never fires
    n, bumped = relator_count(DensityModelParams(2, 1, Fraction(1, 100)))
    assert (n, bumped) == (1, False)
    assert relator_count(DensityModelParams(2, 5, 0)) == (1, False)


@pytest.mark.property
@given(st.integers(2, 5), st.integers(1, 400), st.fractions(0, Fraction(59, 60), max_denominator=60))
def test_relator_count_exact(m, ell, d):
    n, _ = relator_count(DensityModelParams(m, ell, d))
    expected = int_root_floor((2 * m - 1) ** (d.numerator * ell), d.denominator)
    assert n == max(expected, 1)


@pytest.mark.property
@given(st.integers(0, 2**63 - 1), st.integers(8, 80), st.integers(1, 4))
def test_sampling_deterministic(seed, ell, k):
    params = DensityModelParams(2, ell, 0, k, seed)
    assert sample_presentation(params) == sample_presentation(params)
    # relator i depends only on (seed, ell, i)
    more = sample_presentation(DensityModelParams(2, ell, 0, k + 1, seed))
    assert more.relators[:k] == sample_presentation(params).relators


# ------------------------------------------------------------------- chain


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_chain_spectrum(m):
    spec = chain_spectral(m)
    M = spec["matrix"]
    assert np.allclose(M.sum(axis=1), 1)
    assert abs(spec["beta1"] - 1 / (2 * m - 1)) < 1e-9
    assert spec["epsilon"] >= spec["epsilon_lower_bound"]
    assert spec["phi"] >= spec["phi_lower_bound"]


def test_chain_examples():
    assert abs(chain_spectral(2)["beta1"] - 1 / 3) < 1e-12
    assert abs(chain_spectral(2)["epsilon"] - 2 / 3) < 1e-12
    assert chain_spectral(2)["epsilon_lower_bound"] == Fraction(1, 18)
    assert abs(chain_spectral(3)["beta1"] - 1 / 5) < 1e-12
    assert chain_spectral(2)["phi"] >= Fraction(1, 3)


@pytest.mark.property
@given(st.integers(2, 6))
def test_spectral_gap_beats_printed_bound(m):
    spec = chain_spectral(m)
    assert spec["epsilon"] >= (m - 1) ** 2 / (2 * (2 * m - 1) ** 2)


def test_model_constants():
    assert C_m(2) == Fraction(1, 13824)
    assert 242994 <= 1 / d_m(2) <= 242996
    consts = model_constants(2)
    assert consts["cyclically_reduced_count"](3) == 28
    for ell in range(1, 11):
        brute = sum(is_cyclically_reduced(w) for w in all_words(2, ell))
        assert cyclically_reduced_count(2, ell) == brute
    assert chernoff_bound(0.1, 10**6, 2, "exact") < chernoff_bound(0.1, 10**6, 2, "paper")
    with pytest.raises(ValueError):
        chernoff_bound(0.1, 10, 2, "other")


# --------------------------------------------------------------- experiment


def test_fixed_words():
    ok, _ = even_distribution_of_word((1, 2) * 80, 2, LAM)
    assert all(ok.values())
    bad, wit = even_distribution_of_word((1,) * 20 + (2, 1) * 70, 2, LAM)
    assert not bad["run"] and wit["condition"] == "run"


def test_experiment_csv():
    rep = genericity_experiment(2, [40, 80], LAM, 10, seed=3)
    lines = rep.to_csv().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 3
    for row in rep.rows:
        assert row.rate_pooled == Fraction(row.fail_pooled, 10)


@pytest.mark.property
@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 3]))
def test_experiment_deterministic_across_threads(seed, threads):
    a = genericity_experiment(2, [32], LAM, 6, seed=seed, threads=1)
    b = genericity_experiment(2, [32], LAM, 6, seed=seed, threads=threads)
    assert a.to_csv() == b.to_csv()


@pytest.mark.property
@given(st.integers(0, 2**32 - 1), st.sampled_from([160, 320, 640, 10**7]))
def test_failure_rate_below_informative_bound(seed, ell):
    # the bound only becomes informative (< 1) at lengths far beyond sampling reach
    bound = pooled_union_bound(2, ell)
    if bound < 1:
        assert ell >= 10**6
        return
    rep = genericity_experiment(2, [ell], LAM, 2, seed=seed)
    assert rep.rows[0].bound_pooled is None
