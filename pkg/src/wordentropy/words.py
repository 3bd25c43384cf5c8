"""Letters, words, weights and presentations.

A letter is a nonzero signed integer: ``i`` stands for the generator
``a_i`` and ``-i`` for its inverse. A word is a tuple of letters. All
operations here are pure and return new tuples.

The short text form maps ``a``..``z`` to ``1``..``26`` and ``A``..``Z`` to
the inverses, so ``parse_word("abAB")`` is the commutator ``(1, 2, -1, -2)``.
"""

from __future__ import annotations

import math
import string
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

Word = tuple[int, ...]
Rational = Union[int, Fraction, str]

__all__ = [
    "Word",
    "WeightVector",
    "Presentation",
    "parse_word",
    "format_word",
    "free_reduce",
    "invert",
    "cyclic_reduce",
    "is_reduced",
    "is_cyclically_reduced",
    "rotations",
    "min_rotation",
    "primitive_period",
    "symmetrize",
    "weighted_length",
    "letter_counts",
    "count_vector",
]


def parse_word(text: str) -> Word:
    """Parse the letter form (``a``..``z`` generators, ``A``..``Z`` inverses)."""
    letters = []
    for ch in text:
        if ch in string.ascii_lowercase:
            letters.append(ord(ch) - ord("a") + 1)
        elif ch in string.ascii_uppercase:
            letters.append(-(ord(ch) - ord("A") + 1))
        elif ch.isspace():
            continue
        else:
            raise ValueError(f"invalid letter {ch!r} in {text!r}")
    return tuple(letters)


def format_word(word: Sequence[int]) -> str:
    """Inverse of :func:`parse_word`; only for alphabets of size <= 26."""
    out = []
    for x in word:
        if x == 0 or abs(x) > 26:
            raise ValueError(f"letter {x} has no text form")
        base = string.ascii_lowercase if x > 0 else string.ascii_uppercase
        out.append(base[abs(x) - 1])
    return "".join(out)


def free_reduce(word: Sequence[int]) -> Word:
    """Delete adjacent inverse pairs until none remain.

    >>> free_reduce((1, -1, 2))
    (2,)
    >>> free_reduce((1, 2, -2, -1))
    ()
    """
    stack: list[int] = []
    for x in word:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def invert(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


def is_reduced(word: Sequence[int]) -> bool:
    return all(word[i] != -word[i + 1] for i in range(len(word) - 1))


def is_cyclically_reduced(word: Sequence[int]) -> bool:
    if not is_reduced(word):
        return False
    return len(word) <= 1 or word[0] != -word[-1]


def cyclic_reduce(word: Sequence[int]) -> Word:
    """Free-reduce, then strip matching first/last inverse pairs."""
    w = free_reduce(word)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return w[i : j + 1]


def rotations(word: Sequence[int]) -> Iterator[Word]:
    w = tuple(word)
    for i in range(len(w)):
        yield w[i:] + w[:i]


def _least_rotation_index(w: Sequence[int]) -> int:
    # two-pointer minimum-expression scan, linear time
    n = len(w)
    i, j, k = 0, 1, 0
    while i < n and j < n and k < n:
        a = w[(i + k) % n]
        b = w[(j + k) % n]
        if a == b:
            k += 1
            continue
        if a > b:
            i += k + 1
        else:
            j += k + 1
        if i == j:
            j += 1
        k = 0
    return min(i, j)


def min_rotation(word: Sequence[int]) -> Word:
    """Lexicographically least cyclic rotation (integer order on letters)."""
    w = tuple(word)
    if not w:
        return w
    i = _least_rotation_index(w)
    return w[i:] + w[:i]


def primitive_period(word: Sequence[int]) -> int:
    """Smallest ``p`` with ``word`` equal to its own rotation by ``p``."""
    w = tuple(word)
    n = len(w)
    for p in range(1, n + 1):
        if n % p == 0 and w[p:] + w[:p] == w:
            return p
    return n


def symmetrize(relators: Iterable[Sequence[int]]) -> frozenset[Word]:
    """All cyclic permutations of the relators and of their inverses.

    Raises ``ValueError`` for an empty or non-cyclically-reduced relator.
    """
    out: set[Word] = set()
    for r in relators:
        r = tuple(r)
        if not r or not is_cyclically_reduced(r):
            raise ValueError(f"relator {r} is not a nonempty cyclically reduced word")
        out.update(rotations(r))
        out.update(rotations(invert(r)))
    return frozenset(out)


def letter_counts(word: Iterable[int]) -> dict[int, int]:
    """Occurrences of each generator, a and a^-1 pooled."""
    return dict(Counter(abs(x) for x in word))


def count_vector(word: Iterable[int], m: int) -> np.ndarray:
    counts = np.zeros(m, dtype=np.int64)
    for x in word:
        counts[abs(x) - 1] += 1
    return counts


def _to_fraction(x: Rational | float) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


@dataclass(frozen=True)
class WeightVector:
    """Symmetric positive weights, one exact rational per generator.

    ``per_generator[i]`` is ``w(a_{i+1}) = w(a_{i+1}^{-1})``.
    """

    per_generator: tuple[Fraction, ...]

    def __post_init__(self):
        values = tuple(_to_fraction(x) for x in self.per_generator)
        if not values:
            raise ValueError("need at least one generator")
        if any(v <= 0 for v in values):
            raise ValueError(f"weights must be positive, got {values}")
        object.__setattr__(self, "per_generator", values)

    @classmethod
    def uniform(cls, m: int) -> "WeightVector":
        """The uniform normalized weight, 1/(2m) on every letter."""
        return cls((Fraction(1, 2 * m),) * m)

    @classmethod
    def ones(cls, m: int) -> "WeightVector":
        return cls((Fraction(1),) * m)

    @classmethod
    def from_floats(cls, values: Iterable[float], max_denominator: int = 10**6) -> "WeightVector":
        return cls(tuple(Fraction(float(v)).limit_denominator(max_denominator) for v in values))

    @property
    def m(self) -> int:
        return len(self.per_generator)

    @property
    def total(self) -> Fraction:
        """Sum over the symmetric generating set, ``2 * sum(per_generator)``."""
        return 2 * sum(self.per_generator)

    @property
    def normalized(self) -> bool:
        return self.total == 1

    @property
    def integral(self) -> bool:
        return all(v.denominator == 1 for v in self.per_generator)

    @property
    def w_min(self) -> Fraction:
        return min(self.per_generator)

    @property
    def w_max(self) -> Fraction:
        return max(self.per_generator)

    def of(self, letter: int) -> Fraction:
        return self.per_generator[abs(letter) - 1]

    def scaled(self, alpha: Rational) -> "WeightVector":
        a = _to_fraction(alpha)
        return WeightVector(tuple(a * v for v in self.per_generator))

    def normalize(self) -> "WeightVector":
        return self.scaled(1 / self.total)

    def integers(self) -> tuple[int, ...]:
        if not self.integral:
            raise ValueError(f"weights {self} are not integral")
        return tuple(int(v) for v in self.per_generator)

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.per_generator])

    def __array__(self, dtype=None, copy=None):
        return self.as_array().astype(dtype) if dtype is not None else self.as_array()

    def __str__(self) -> str:
        return "(" + ", ".join(str(v) for v in self.per_generator) + ")"


def weighted_length(word: Iterable[int], w: WeightVector | Sequence) -> Fraction:
    """Total weight ``|u|_w`` of a word."""
    if not isinstance(w, WeightVector):
        w = WeightVector(tuple(w))
    return sum((w.of(x) for x in word), Fraction(0))


@dataclass(frozen=True)
class Presentation:
    """Alphabet size plus a finite relator set.

    A symmetrized presentation (built with :meth:`symmetrize`) keeps one
    canonical representative per cyclic conjugacy class of ``R*``: the
    least rotation of every relator and of its inverse. ``R*`` itself is
    every rotation of those representatives and is produced lazily, which
    keeps relators of length ~10^4 cheap.
    """

    m: int
    relators: tuple[Word, ...] = ()
    symmetrized: bool = False
    _periods: tuple[int, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"alphabet size must be positive, got {self.m}")
        rels = tuple(tuple(int(x) for x in r) for r in self.relators)
        for r in rels:
            for x in r:
                if x == 0 or abs(x) > self.m:
                    raise ValueError(f"letter {x} outside alphabet of size {self.m}")
        object.__setattr__(self, "relators", rels)
        if self.symmetrized:
            for r in rels:
                if not r or not is_cyclically_reduced(r) or min_rotation(r) != r:
                    raise ValueError("symmetrized relators must be canonical cyclically reduced words")
            if set(rels) != {min_rotation(invert(r)) for r in rels}:
                raise ValueError("symmetrized relator classes must be closed under inversion")
            if len(self._periods) != len(rels):
                object.__setattr__(self, "_periods", tuple(primitive_period(r) for r in rels))

    @property
    def all_cyclically_reduced(self) -> bool:
        return all(r and is_cyclically_reduced(r) for r in self.relators)

    def symmetrize(self) -> "Presentation":
        """Return the symmetrized presentation (class representatives of R*)."""
        if self.symmetrized:
            return self
        if not self.all_cyclically_reduced:
            raise ValueError("symmetrization needs nonempty cyclically reduced relators")
        classes = set()
        for r in self.relators:
            classes.add(min_rotation(r))
            classes.add(min_rotation(invert(r)))
        return Presentation(self.m, tuple(sorted(classes)), symmetrized=True)

    @property
    def periods(self) -> tuple[int, ...]:
        """Number of distinct rotations of each class representative."""
        self._require_symmetrized()
        return self._periods

    def _require_symmetrized(self):
        if not self.symmetrized:
            raise ValueError("presentation is not symmetrized; call .symmetrize() first")

    @property
    def rstar_size(self) -> int:
        return sum(self.periods)

    def iter_rstar(self) -> Iterator[tuple[int, int]]:
        """Yield ``(class_index, shift)`` for every distinct word of R*."""
        for c, p in enumerate(self.periods):
            for shift in range(p):
                yield c, shift

    def rstar_word(self, c: int, shift: int) -> Word:
        r = self.relators[c]
        return r[shift:] + r[:shift]

    def rstar(self) -> list[Word]:
        """All of R*, sorted lexicographically. Materializes every word."""
        return sorted(self.rstar_word(c, s) for c, s in self.iter_rstar())

    @property
    def min_relator_length(self) -> int:
        return min((len(r) for r in self.relators), default=0)

    @cached_property
    def doubled(self) -> tuple[Word, ...]:
        """Each class representative written twice, for cyclic windows."""
        return tuple(r + r for r in self.relators)

    def cyclic_windows(self, length_of) -> Iterator[tuple[int, int, Word]]:
        """Yield ``(class, shift, window)`` for the prefix of each R* word.

        ``length_of(n)`` gives the window length for a relator of length n.
        """
        for c, p in enumerate(self.periods):
            dd = self.doubled[c]
            t = length_of(len(self.relators[c]))
            for shift in range(p):
                yield c, shift, dd[shift : shift + t]

    def __str__(self) -> str:
        if self.m <= 26:
            body = ", ".join(format_word(r) for r in self.relators)
        else:
            body = ", ".join(str(list(r)) for r in self.relators)
        tag = "*" if self.symmetrized else ""
        return f"<{self.m} | {body}>{tag}"


def ceil_fraction(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def as_fraction(x) -> Fraction:
    return _to_fraction(x)


def lcm_of_denominators(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v.denominator)
    return out
