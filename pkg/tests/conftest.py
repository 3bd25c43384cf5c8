from fractions import Fraction

import pytest
from hypothesis import settings

from wordentropy.presentations import surface_presentation
from wordentropy.random_groups import DensityModelParams, sample_presentation, stream
from wordentropy.words import Presentation, WeightVector

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

LAM = Fraction(1, 16)

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def few_relator(ell: int, count: int, seed: int = 0, m: int = 2) -> Presentation:
    return sample_presentation(DensityModelParams(m, ell, 0, count, seed))


def ordering_weights(seed: int) -> WeightVector:
    return WeightVector(tuple(int(v) for v in stream(seed, 999).integers(1, 5, size=2)))


@pytest.fixture(scope="session")
def genus2():
    return surface_presentation(2)


@pytest.fixture(scope="session")
def free2():
    return Presentation(2, ())


@pytest.fixture(scope="session")
def apparent640():
    """Two relators of length 640, seed 0: translation-apparent at lambda = 1/16."""
    return few_relator(640, 2, 0)


@pytest.fixture(scope="session")
def apparent10240():
    return few_relator(10240, 1, 0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
