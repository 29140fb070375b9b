"""Spell spoken number words (one .. ninety-nine) as digits.

Sufficient for paragraph and page counts at desk scale; ASR output mostly
spells small numbers as words.
"""

from __future__ import annotations

import re

_UNITS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9,
}
_TEENS = {
    "ten": 10, "eleven": 11, "twelve": 12, "thirteen": 13, "fourteen": 14,
    "fifteen": 15, "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19,
}
_TENS = {
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50,
    "sixty": 60, "seventy": 70, "eighty": 80, "ninety": 90,
}

_COMPOUND_RE = re.compile(
    r"\b(" + "|".join(_TENS) + r")[\s-](" + "|".join(_UNITS) + r")\b",
    re.IGNORECASE,
)
_SINGLE_RE = re.compile(
    r"\b(" + "|".join(list(_UNITS) + list(_TEENS) + list(_TENS)) + r")\b",
    re.IGNORECASE,
)


def normalize_numbers(text: str) -> str:
    """Replace number words with digits: "twenty three" / "twenty-three" -> "23"."""
    def compound(m: re.Match) -> str:
        return str(_TENS[m.group(1).lower()] + _UNITS[m.group(2).lower()])

    def single(m: re.Match) -> str:
        word = m.group(1).lower()
        return str(_UNITS.get(word) or _TEENS.get(word) or _TENS[word])

    return _SINGLE_RE.sub(single, _COMPOUND_RE.sub(compound, text))
