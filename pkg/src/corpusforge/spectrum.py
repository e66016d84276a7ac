"""Five-level community-involvement classifier.

A project profile codes four dimensions (initiative, design, operations,
governance) as E (externally led), S (shared/co-shaped), or C
(community-led), plus a consultation-only flag for projects where the
community is consulted but contributes neither data nor labor.

The levels:

    1  Community consulted
    2  Community engaged, externally led
    3  Community-led operations, externally designed
    4  Community-led with co-shaped design
    5  Fully community-initiated and governed

The classification rule is the minimal ordered rule consistent with the
published mapping of prior projects; profiles outside the usual stacked
pattern (e.g. community-led initiative with external design) are
extrapolations of the same rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .domain import PlatformError


class InvalidProfileError(PlatformError):
    code = "invalid_profile"


class Code(str, Enum):
    EXTERNAL = "E"
    SHARED = "S"
    COMMUNITY = "C"


LEVEL_LABELS = {
    1: "Community consulted",
    2: "Community engaged, externally led",
    3: "Community-led operations, externally designed",
    4: "Community-led with co-shaped design",
    5: "Fully community-initiated and governed",
}


@dataclass(frozen=True)
class InvolvementProfile:
    initiative: Code
    design: Code
    operations: Code
    governance: Code
    consultation_only: bool = False

    def __post_init__(self) -> None:
        if self.consultation_only and not all(
            c is Code.EXTERNAL for c in (self.initiative, self.design, self.operations, self.governance)
        ):
            raise InvalidProfileError(
                "a consultation-only project cannot have shared or community-led dimensions"
            )

    @classmethod
    def from_codes(cls, codes: str, consultation_only: bool = False) -> "InvolvementProfile":
        """Parse a 4-letter I/D/O/G string such as "EECS" (case-insensitive)."""
        codes = codes.strip().upper()
        if len(codes) != 4 or any(c not in "ESC" for c in codes):
            raise InvalidProfileError(
                f"profile must be 4 letters from E/S/C (initiative, design, operations, governance), got {codes!r}"
            )
        return cls(
            initiative=Code(codes[0]),
            design=Code(codes[1]),
            operations=Code(codes[2]),
            governance=Code(codes[3]),
            consultation_only=consultation_only,
        )

    def codes(self) -> str:
        return "".join(c.value for c in (self.initiative, self.design, self.operations, self.governance))


@dataclass(frozen=True)
class InvolvementLevel:
    level: int
    label: str


def classify(profile: InvolvementProfile) -> InvolvementLevel:
    """Deterministic ordered rule over the four dimension codes."""
    if all(
        c is Code.COMMUNITY
        for c in (profile.initiative, profile.design, profile.operations, profile.governance)
    ):
        level = 5
    elif profile.design in (Code.SHARED, Code.COMMUNITY):
        level = 4
    elif profile.design is Code.EXTERNAL and profile.operations is Code.COMMUNITY:
        level = 3
    elif profile.consultation_only:
        level = 1
    else:
        level = 2
    return InvolvementLevel(level=level, label=LEVEL_LABELS[level])


def classify_codes(codes: str, consultation_only: bool = False) -> InvolvementLevel:
    return classify(InvolvementProfile.from_codes(codes, consultation_only))
