"""IPC symbols: parsing, canonical rendering and hierarchical truncation.

IPC codes look like ``A63F 13/55``: section ``A``, class ``63``, subclass
``F``, main group ``13`` and subgroup ``55``. A subgroup of ``00`` marks a
main group. Main groups and subgroups share the :attr:`IpcLevel.GROUP`
granularity.
"""

from __future__ import annotations

import enum
import functools
import re
from dataclasses import dataclass

__all__ = [
    "IpcLevel",
    "IpcCode",
    "MalformedCode",
    "LevelUnavailable",
    "parse_ipc_code",
    "format_ipc_code",
    "truncate_to_level",
    "level_of",
]


class MalformedCode(ValueError):
    """Raised when a text cannot be read as an IPC symbol."""


class LevelUnavailable(ValueError):
    """Raised when a code is asked for a level deeper than it carries."""


class IpcLevel(enum.IntEnum):
    SECTION = 0
    CLASS = 1
    SUBCLASS = 2
    GROUP = 3

    @classmethod
    def parse(cls, value: str | IpcLevel) -> IpcLevel:
        if isinstance(value, IpcLevel):
            return value
        try:
            return cls[str(value).strip().upper()]
        except KeyError:
            raise ValueError(f"unknown IPC level {value!r}") from None


@functools.total_ordering
@dataclass(frozen=True, eq=True)
class IpcCode:
    """A parsed IPC symbol.

    ``group_minor_text`` keeps the subgroup digits as written, so ``13/5``
    and ``13/50`` stay distinct codes. Main groups are always stored as
    ``"00"``. Codes order by their canonical text.
    """

    section: str
    class_digits: str | None = None
    subclass: str | None = None
    group_major: int | None = None
    group_minor_text: str | None = None

    @property
    def group_minor(self) -> int | None:
        if self.group_minor_text is None:
            return None
        return int(self.group_minor_text)

    @property
    def is_main_group(self) -> bool:
        return self.group_minor_text == "00"

    @property
    def level(self) -> IpcLevel:
        return level_of(self)

    @functools.cached_property
    def canonical_text(self) -> str:
        return format_ipc_code(self, level_of(self))

    def __str__(self) -> str:
        return self.canonical_text

    def __hash__(self) -> int:
        # Equal codes share their text, and str hashes are cached.
        return hash(self.canonical_text)

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, IpcCode):
            return NotImplemented
        return self.canonical_text < other.canonical_text


# Optional trailing edition marker as in Patentscope exports: "A63F 13/55 (2014.01)".
_EDITION = re.compile(r"\s*\(\s*\d{4}\.\d{2}\s*\)\s*$")
_CODE = re.compile(
    r"""^
    (?P<section>[A-Z])
    (?:(?P<cls>\d{2})
      (?:(?P<subclass>[A-Z])
        (?:\s*(?P<major>\d{1,4})\s*/\s*(?P<minor>\d{1,6}))?
      )?
    )?
    $""",
    re.VERBOSE,
)


@functools.lru_cache(maxsize=65536)
def parse_ipc_code(text: str) -> IpcCode:
    """Parse ``"A63F 13/55"``, ``"a63f13/55"``, ``"A63F"`` or ``"A63"``."""
    if not isinstance(text, str):
        raise MalformedCode(f"IPC code must be a string, got {type(text).__name__}")
    cleaned = _EDITION.sub("", text.strip()).upper()
    if not cleaned:
        raise MalformedCode("empty IPC code")
    m = _CODE.match(cleaned)
    if m is None:
        raise MalformedCode(f"malformed IPC code {text!r}")
    if m["section"] not in "ABCDEFGH":
        raise MalformedCode(f"invalid IPC section {m['section']!r} in {text!r}")
    major = minor = None
    if m["major"] is not None:
        major = int(m["major"])
        if major < 1:
            raise MalformedCode(f"main group out of range in {text!r}")
        minor = m["minor"]
        if int(minor) == 0:
            minor = "00"
    return IpcCode(m["section"], m["cls"], m["subclass"], major, minor)


def level_of(code: IpcCode) -> IpcLevel:
    if code.group_major is not None:
        return IpcLevel.GROUP
    if code.subclass is not None:
        return IpcLevel.SUBCLASS
    if code.class_digits is not None:
        return IpcLevel.CLASS
    return IpcLevel.SECTION


def truncate_to_level(code: IpcCode, level: IpcLevel) -> IpcCode:
    """Return the ancestor of ``code`` at ``level`` (identity at its own level)."""
    level = IpcLevel(level)
    if level > level_of(code):
        raise LevelUnavailable(f"{code} has no {level.name.lower()} component")
    if level == IpcLevel.GROUP:
        return code
    return IpcCode(
        code.section,
        code.class_digits if level >= IpcLevel.CLASS else None,
        code.subclass if level >= IpcLevel.SUBCLASS else None,
    )


def format_ipc_code(code: IpcCode, level: IpcLevel) -> str:
    level = IpcLevel(level)
    if level > level_of(code):
        raise LevelUnavailable(f"code has no {level.name.lower()} component")
    text = code.section
    if level >= IpcLevel.CLASS:
        text += code.class_digits
    if level >= IpcLevel.SUBCLASS:
        text += code.subclass
    if level == IpcLevel.GROUP:
        text += f" {code.group_major}/{code.group_minor_text}"
    return text
