from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wordentropy.fileformats import (
    InputError,
    format_presentation,
    format_weights,
    parse_presentation,
    parse_rational,
    parse_weights,
)
from wordentropy.words import Presentation, WeightVector


def presentations():
    def build(m, rels, numeric):
        return Presentation(m, tuple(rels)), numeric

    return st.integers(1, 30).flatmap(lambda m: st.builds(
        build,
        st.just(m),
        st.lists(st.lists(st.integers(1, m).flatmap(lambda i: st.sampled_from([i, -i])),
                          min_size=1, max_size=12).map(tuple), max_size=5),
        st.booleans() if m <= 26 else st.just(True),
    ))


def test_parse_rational():
    assert parse_rational("1/16") == Fraction(1, 16)
    assert parse_rational(" 3 ") == 3
    for bad in ["1/0", "0.5", "a/b", "1/-2", ""]:
        with pytest.raises(InputError):
            parse_rational(bad)


def test_parse_presentation_with_comments():
    text = "# genus two\nm 4\n\nabABcdCD  # the relator\n"
    p = parse_presentation(text)
    assert p.m == 4 and p.relators == ((1, 2, -1, -2, 3, 4, -3, -4),)
    assert format_presentation(p) == "m 4\nabABcdCD\n"


def test_numeric_format():
    p = parse_presentation("m! 30\n1,-30,2\n")
    assert p.relators == ((1, -30, 2),)
    assert format_presentation(p) == "m! 30\n1,-30,2\n"


@pytest.mark.parametrize("text", ["abAB\n", "m x\n", "m 2\nacA\n", "m 2\na1\n", "m! 2\n1,,2\n", ""])
def test_malformed_presentations(text):
    with pytest.raises(InputError):
        parse_presentation(text)


def test_weights_roundtrip():
    w = WeightVector((Fraction(1, 8), Fraction(3, 8)))
    assert parse_weights(format_weights(w), 2) == w
    assert parse_weights('{"m": 2, "weights": ["1", 2], "normalized": false}') == WeightVector((1, 2))


@pytest.mark.parametrize("text", [
    "not json",
    '{"m": 2}',
    '{"m": 3, "weights": ["1", "1"]}',
    '{"m": 2, "weights": ["1", "-1"]}',
    '{"m": 2, "weights": ["1/2", "1/2"], "normalized": true}',
])
def test_malformed_weights(text):
    with pytest.raises(InputError):
        parse_weights(text)


@pytest.mark.property
@given(presentations())
def test_presentation_roundtrip_is_byte_identical(case):
    p, numeric = case
    text = format_presentation(p, numeric=numeric)
    assert parse_presentation(text) == p
    assert format_presentation(parse_presentation(text), numeric=numeric) == text
