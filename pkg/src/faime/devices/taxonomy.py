"""Device taxonomy grid: six categories with lettered subcategories.

Category 1 has two subcategories, categories 2 through 6 have three,
for exactly 17 valid codes. A device may carry several codes.
"""

from __future__ import annotations

from dataclasses import dataclass


class InvalidCode(Exception):
    """A taxonomy code is outside the grid."""


_GRID: dict[int, str] = {1: "ab", 2: "abc", 3: "abc", 4: "abc", 5: "abc", 6: "abc"}

CATEGORY_NAMES: dict[int, str] = {
    1: "Musical instruments",
    2: "Music processors",
    3: "Music generators",
    4: "Music recommendation devices",
    5: "Music-related feedback systems",
    6: "Educational aids",
}

SUBCATEGORY_NAMES: dict[str, str] = {
    "1a": "AI assisted instruments",
    "1b": "Augmented instruments",
    "2a": "Instrumental modifiers",
    "2b": "Voice modifiers",
    "2c": "General sound processors",
    "3a": "Instrumental",
    "3b": "Voice",
    "3c": "Combined",
    "4a": "Ambient aware recommendation",
    "4b": "User aware recommendation",
    "4c": "Combined",
    "5a": "Personal feedback",
    "5b": "Ambient feedback",
    "5c": "Combined",
    "6a": "Music education",
    "6b": "General educational support",
    "6c": "Rehabilitation",
}


@dataclass(frozen=True, slots=True, order=True)
class TaxonomyCode:
    category: int
    sub: str

    def __post_init__(self):
        if self.category not in _GRID or self.sub not in _GRID[self.category]:
            raise InvalidCode(f"no such taxonomy code: {self.category}{self.sub}")

    def __str__(self) -> str:
        return f"{self.category}{self.sub}"

    @property
    def label(self) -> str:
        return SUBCATEGORY_NAMES[str(self)]

    @property
    def category_label(self) -> str:
        return CATEGORY_NAMES[self.category]


def validate_taxonomy(code: str) -> TaxonomyCode:
    """Parse a "<digit><letter>" code against the grid.

    Raises InvalidCode for anything outside the 17 valid codes.
    """
    if not isinstance(code, str) or len(code) != 2 or not code[0].isdigit():
        raise InvalidCode(f"taxonomy codes are one digit plus one letter, got {code!r}")
    return TaxonomyCode(category=int(code[0]), sub=code[1])


def all_codes() -> tuple[TaxonomyCode, ...]:
    """Every valid code, in grid order."""
    return tuple(TaxonomyCode(cat, sub) for cat in sorted(_GRID) for sub in _GRID[cat])


__all__ = [
    "InvalidCode",
    "TaxonomyCode",
    "CATEGORY_NAMES",
    "SUBCATEGORY_NAMES",
    "validate_taxonomy",
    "all_codes",
]
