from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from wordentropy.presentations import (
    Certificate,
    check_c_prime,
    check_even_distribution,
    check_translation_apparent,
    dehn_reduce,
    dehn_validity,
    is_lambda_reduced,
    max_piece_length,
    represents_identity,
    surface_geodesic_certificate,
    surface_presentation,
)
from wordentropy.random_groups import sample_reduced_word, stream
from wordentropy.words import Presentation, cyclic_reduce, free_reduce, invert, parse_word

from conftest import few_relator

W = parse_word


def sym(m, *rels):
    return Presentation(m, tuple(W(r) if isinstance(r, str) else r for r in rels)).symmetrize()


def brute_max_piece(p):
    """Longest common prefix over all ordered pairs of distinct R* words."""
    rs = p.rstar()
    best = 0
    for i, a in enumerate(rs):
        for b in rs[i + 1:]:
            k = 0
            while k < min(len(a), len(b)) and a[k] == b[k]:
                k += 1
            best = max(best, k)
    return best


def small_presentations():
    rel = st.lists(st.sampled_from([1, -1, 2, -2]), min_size=2, max_size=14).map(
        lambda r: cyclic_reduce(free_reduce(tuple(r)))).filter(lambda r: len(r) >= 2)
    return st.lists(rel, min_size=1, max_size=4).map(lambda rs: Presentation(2, tuple(rs)).symmetrize())


def random_c16():
    """Seeded few-relator presentations, kept when C'(1/6) holds."""
    return st.builds(lambda ell, k, seed: few_relator(ell, k, seed),
                     st.integers(24, 60), st.integers(1, 2), st.integers(0, 10**6))


# ------------------------------------------------------------------ pieces


def test_piece_examples(genus2):
    assert max_piece_length(sym(2, "aaaaaaab")).max_piece_length == 6
    assert max_piece_length(genus2.symmetrize()).max_piece_length == 1
    assert max_piece_length(sym(2, "ab")).max_piece_length == 0


def test_piece_witness_is_valid():
    rep = max_piece_length(sym(2, "aaaaaaab", "abab"))
    piece, r1, r2 = rep.witness
    assert r1 != r2 and r1[:len(piece)] == piece == r2[:len(piece)]


def test_c_prime_examples(genus2):
    res = check_c_prime(sym(2, "aaaaaaab"), Fraction(1, 6))
    assert not res
    piece, r = res.witness
    assert piece == (1,) * 6 and len(r) == 8
    g = genus2.symmetrize()
    assert check_c_prime(g, Fraction(1, 6))
    res = check_c_prime(g, Fraction(1, 16))
    assert not res and len(res.witness[0]) == 1


def test_lambda_must_be_in_unit_interval(genus2):
    with pytest.raises(ValueError):
        check_c_prime(genus2.symmetrize(), Fraction(1))


@pytest.mark.property
@given(small_presentations())
def test_max_piece_matches_brute_force(p):
    assert max_piece_length(p).max_piece_length == brute_max_piece(p)


@pytest.mark.property
@given(small_presentations(), st.fractions(Fraction(1, 20), Fraction(19, 20)),
       st.fractions(Fraction(1, 20), Fraction(19, 20)))
def test_c_prime_monotone_in_lambda(p, a, b):
    lo, hi = min(a, b), max(a, b)
    assume(0 < lo < hi < 1)
    if check_c_prime(p, lo):
        assert check_c_prime(p, hi)


@pytest.mark.property
@given(small_presentations(), st.sampled_from([Fraction(1, 6), Fraction(1, 4), Fraction(1, 2)]))
def test_c_prime_witness_reproducible(p, lam):
    res = check_c_prime(p, lam)
    if not res:
        piece, r = res.witness
        assert r in set(p.rstar()) and r[:len(piece)] == piece
        assert len(piece) >= lam * len(r)
        assert any(o != r and o[:len(piece)] == piece for o in p.rstar())


# ------------------------------------------------------ even distribution


def test_even_distribution_examples():
    rep = check_even_distribution(sym(2, "aaaabbbb"), Fraction(1, 4))
    assert not rep.run
    rep = check_even_distribution(sym(2, "abababab"), Fraction(1, 4))
    assert rep.run and not rep.halfwin
    rep = check_even_distribution(sym(2, (1, 2) * 80), Fraction(1, 16))
    assert rep.run and rep.halfwin and rep.freqwin


def test_even_distribution_witness():
    rep = check_even_distribution(sym(2, (1,) * 20 + (2, 1) * 70), Fraction(1, 16))
    assert not rep.run
    assert rep.witness["condition"] == "run" and rep.witness["run_length"] >= 10


def test_translation_apparent_examples(genus2, free2, apparent640):
    rep = check_translation_apparent(genus2, Fraction(1, 16))
    assert not rep and "C'(1/16) fails" in rep.causes
    assert check_translation_apparent(free2, Fraction(1, 16))
    rep = check_translation_apparent(apparent640, Fraction(1, 16))
    assert rep and rep.symmetrized_by_check


def test_translation_apparent_frequency_over_seeds():
    hits = sum(bool(check_translation_apparent(few_relator(640, 2, s), Fraction(1, 16)))
               for s in range(10))
    assert hits >= 8


def test_unreduced_relators_are_reported():
    rep = check_translation_apparent(Presentation(2, ((1, 2, -1),)), Fraction(1, 16))
    assert not rep and not rep.cyclically_reduced


# ---------------------------------------------------------- lambda-reduced


def test_lambda_reduced_examples():
    p = sym(2, (1, 2) * 8)
    lam = Fraction(1, 4)
    assert not is_lambda_reduced(W("abab"), p, lam)
    assert is_lambda_reduced(W("abA"), p, lam)
    assert is_lambda_reduced(W("aaaa"), p, lam)


@pytest.mark.property
@given(st.integers(0, 10**6), st.integers(1, 40), st.sampled_from([1, -1, 2, -2]))
def test_powers_are_lambda_reduced_when_runs_are_short(seed, n, s):
    p = few_relator(160, 1, seed).symmetrize()
    lam = Fraction(1, 16)
    assume(check_even_distribution(p, lam).run)
    assert is_lambda_reduced((s,) * n, p, lam)


# ------------------------------------------------------------------- Dehn


def test_dehn_examples(genus2):
    g = genus2.symmetrize()
    assert dehn_reduce(W("abABcdCD"), g) == ()
    assert dehn_reduce(W("abABcdC"), g) == W("d")
    assert dehn_reduce(W("ab"), g) == W("ab")


def test_dehn_validity(genus2, free2):
    assert dehn_validity(free2) == "free"
    assert dehn_validity(genus2) in ("C'(1/6)", "surface")
    assert dehn_validity(Presentation(2, (W("aaaaaaab"),))) is None


def test_surface_examples():
    assert surface_presentation(2).relators == (W("abABcdCD"),)
    assert surface_geodesic_certificate(W("aaaa"), 2) is Certificate.CERTIFIED_GEODESIC
    assert surface_geodesic_certificate(W("ab"), 2) is Certificate.UNKNOWN


def test_surface_conjugated_relator_is_identity(genus2):
    g = genus2.symmetrize()
    x = W("ba") + W("abABcdCD") + W("AB")
    assert represents_identity(x, g)
    assert not represents_identity(W("abAB"), g)


@pytest.mark.property
@given(random_c16())
def test_every_relator_dehn_reduces_to_identity(p):
    s = p.symmetrize()
    assume(check_c_prime(s, Fraction(1, 6)))
    for c, k in list(s.iter_rstar())[:64]:
        assert dehn_reduce(s.rstar_word(c, k), s) == ()


@pytest.mark.property
@given(random_c16(), st.integers(0, 10**6))
def test_short_words_are_nontrivial(p, seed):
    s = p.symmetrize()
    assume(check_c_prime(s, Fraction(1, 6)))
    rng = stream(seed, 7)
    n = int(rng.integers(1, max(2, s.min_relator_length // 2)))
    x = sample_reduced_word(2, n, rng)
    assert len(x) < s.min_relator_length / 2
    assert dehn_reduce(x, s) != ()


@pytest.mark.property
@given(random_c16(), st.integers(0, 10**6))
def test_conjugates_of_relators_are_trivial(p, seed):
    s = p.symmetrize()
    assume(check_c_prime(s, Fraction(1, 6)))
    rng = stream(seed, 8)
    u = sample_reduced_word(2, int(rng.integers(1, 8)), rng)
    r = s.relators[int(rng.integers(len(s.relators)))]
    assert represents_identity(u + r + invert(u), s)
