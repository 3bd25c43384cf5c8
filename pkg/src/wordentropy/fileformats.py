"""Text formats for presentations, weights and rationals.

Presentation files::

    # comment
    m 2
    abAB
    aabbAB

``m! <int>`` switches to comma-separated signed integers per relator, for
alphabets beyond 26 letters. Weight files are JSON objects
``{"m": 2, "weights": ["1/4", "1/4"], "normalized": true}``.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .words import Presentation, WeightVector, format_word, parse_word

__all__ = [
    "InputError",
    "parse_rational",
    "parse_presentation",
    "format_presentation",
    "read_presentation",
    "parse_weights",
    "format_weights",
    "read_weights",
]

_RATIONAL = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


class InputError(ValueError):
    """Malformed user input (exit code 2 in the CLI)."""


def parse_rational(text: str) -> Fraction:
    """Parse ``p`` or ``p/q`` exactly; anything else is an InputError."""
    if not isinstance(text, str):
        raise InputError(f"expected a rational string, got {text!r}")
    match = _RATIONAL.match(text)
    if not match:
        raise InputError(f"malformed rational {text!r}")
    num, den = match.groups()
    if den is not None and int(den) == 0:
        raise InputError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def parse_presentation(text: str) -> Presentation:
    m = None
    numeric = False
    relators = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] not in ("m", "m!"):
                raise InputError(f"line {lineno}: expected header 'm <int>' or 'm! <int>'")
            numeric = parts[0] == "m!"
            try:
                m = int(parts[1])
            except ValueError:
                raise InputError(f"line {lineno}: bad alphabet size {parts[1]!r}") from None
            if m < 1:
                raise InputError(f"line {lineno}: alphabet size must be positive")
            continue
        try:
            if numeric:
                word = tuple(int(tok) for tok in line.split(","))
            else:
                word = parse_word(line)
        except ValueError as exc:
            raise InputError(f"line {lineno}: {exc}") from None
        if not word:
            raise InputError(f"line {lineno}: empty relator")
        bad = [x for x in word if x == 0 or abs(x) > m]
        if bad:
            raise InputError(f"line {lineno}: letter {bad[0]} outside alphabet of size {m}")
        relators.append(word)
    if m is None:
        raise InputError("missing 'm <int>' header")
    return Presentation(m, tuple(relators))


def format_presentation(p: Presentation, numeric: bool | None = None) -> str:
    """Canonical text; ``parse_presentation`` inverts it byte for byte."""
    if numeric is None:
        numeric = p.m > 26
    lines = [f"m! {p.m}" if numeric else f"m {p.m}"]
    for r in p.relators:
        lines.append(",".join(str(x) for x in r) if numeric else format_word(r))
    return "\n".join(lines) + "\n"


def read_presentation(path: str) -> Presentation:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_presentation(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def parse_weights(text: str, m: int | None = None) -> WeightVector:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"weights file is not JSON: {exc}") from None
    if not isinstance(obj, dict) or "weights" not in obj:
        raise InputError("weights JSON needs a 'weights' list")
    values = obj["weights"]
    if not isinstance(values, list) or not values:
        raise InputError("'weights' must be a nonempty list")
    ws = tuple(parse_rational(v) if isinstance(v, str) else parse_rational(str(v)) for v in values)
    if any(v <= 0 for v in ws):
        raise InputError("weights must be positive")
    w = WeightVector(ws)
    declared = obj.get("m", w.m)
    if declared != w.m or (m is not None and m != w.m):
        raise InputError(f"weights give {w.m} generators, expected {m if m is not None else declared}")
    if obj.get("normalized") and not w.normalized:
        raise InputError("weights marked normalized but 2*sum != 1")
    return w


def format_weights(w: WeightVector) -> str:
    return json.dumps({"m": w.m, "weights": [str(v) for v in w.per_generator],
                       "normalized": w.normalized})


def read_weights(path: str, m: int | None = None) -> WeightVector:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_weights(fh.read(), m)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
