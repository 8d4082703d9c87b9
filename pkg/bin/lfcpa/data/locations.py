"""Data classes for named memory locations: the roots (variables and
allocation sites), the segments that select fields and array elements, the
access paths built from them, and the symbolic members of the target
universe."""

from dataclasses import dataclass
from enum import Enum
import re
from typing import Self


HEAP_ROOT_RE = re.compile(r'^o(\d+)$')
OFFSET_RE = re.compile(r'^-?\d+$')

BOTTOM_TEXT = '⊥'
BOTTOM_ASCII = 'bot'


@dataclass(frozen=True, order=True)
class Var:
    """A program variable used as the root of a path."""

    name: str
    "The declared identifier"

    def __str__(self: Self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class HeapSite:
    """The abstract heap cell created by the `malloc` at a statement."""

    label: int
    "Label of the allocating statement"

    def __str__(self: Self) -> str:
        return f'o{self.label}'


type Root = Var | HeapSite
"""Type alias for the two kinds of path roots."""


@dataclass(frozen=True)
class Field:
    """Selection of a structure field."""

    name: str
    "The field identifier"

    def __str__(self: Self) -> str:
        return self.name


@dataclass(frozen=True)
class Offset:
    """Selection of an array element by its (unscaled) index."""

    value: int
    "The element index"

    def __str__(self: Self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class BottomOffset:
    """An array element whose index is not known at compile time. Reads
    through it see any element; kills through it remove nothing."""

    def __str__(self: Self) -> str:
        return BOTTOM_TEXT


BOTTOM = BottomOffset()
"""The single `BottomOffset` instance; also the value of an index expression
that cannot be evaluated at compile time."""

type Segment = Field | Offset | BottomOffset
"""Type alias for path segments."""


@dataclass(frozen=True)
class AccessPath:
    """A bounded compile-time name for a memory location."""

    root: Root
    "The variable or allocation site the path starts from"
    segments: tuple[Segment, ...] = ()
    "Field and element selections applied to the root, outermost first"

    def __str__(self: Self) -> str:
        return '.'.join([str(self.root), *map(str, self.segments)])

    def __lt__(self: Self, other: Self) -> bool:
        return str(self) < str(other)

    @property
    def last(self: Self) -> Segment | None:
        """The final segment, or `None` for a bare root."""

        return self.segments[-1] if self.segments else None

    @property
    def parent(self: Self) -> Self | None:
        """The path with its final segment removed."""

        if not self.segments:
            return None

        return AccessPath(self.root, self.segments[:-1])

    def extend(self: Self, *segments: Segment) -> Self:
        """Return a new path with `segments` appended. No type checks are
        made here; see `lfcpa.locations.append` for the typed version."""

        return AccessPath(self.root, self.segments + segments)

    def with_last(self: Self, segment: Segment) -> Self:
        """Return a copy of the path whose final segment is `segment`."""

        return AccessPath(self.root, self.segments[:-1] + (segment,))

    def has_bottom(self: Self) -> bool:
        """True if any segment is a `BottomOffset`."""

        return any(isinstance(s, BottomOffset) for s in self.segments)


class Special(Enum):
    """The symbolic members of the location and target universes."""

    UNKNOWN = '?'
    "No information: the pointee of an uninitialized pointer"
    EVERYWHERE = 'T−{?}'
    "Every named location (the universe without `?`)"
    ANYTHING = 'T'
    "Every target, `?` included"

    def __str__(self: Self) -> str:
        return self.value

    def __lt__(self: Self, other: object) -> bool:
        return str(self) < str(other)


UNKNOWN = Special.UNKNOWN
EVERYWHERE = Special.EVERYWHERE
ANYTHING = Special.ANYTHING

ASCII_NAMES = {
    UNKNOWN: '?',
    EVERYWHERE: 'T-{?}',
    ANYTHING: 'T',
}

type Location = AccessPath | Special
"""A member of an l-value, liveness or pair-source set: a path, or
`EVERYWHERE`."""

type Target = AccessPath | Special
"""A pointee: a path, `UNKNOWN`, or `ANYTHING`."""


def render(item: Location | Target, ascii_only: bool = False) -> str:
    """The canonical textual form of a location or target. This text is also
    the sort key for every deterministic listing."""

    if isinstance(item, Special):
        return ASCII_NAMES[item] if ascii_only else item.value

    text = str(item)
    if ascii_only:
        text = text.replace(BOTTOM_TEXT, BOTTOM_ASCII)

    return text


def sort_key(item: Location | Target) -> str:
    """Sorting key shared by all output."""

    return render(item)


def parse_location(text: str) -> Location | Target:
    """Turn a rendered location back into its object. Accepts both the
    Unicode and the ASCII spellings.

    Raises:
        ValueError: If `text` is empty or has an empty segment
    """

    text = text.strip()
    for special in Special:
        if text in (special.value, ASCII_NAMES[special]):
            return special

    if not text:
        raise ValueError('Cannot parse an empty location')

    root_text, *rest = text.split('.')
    m = HEAP_ROOT_RE.fullmatch(root_text)
    root: Root = HeapSite(int(m.group(1))) if m else Var(root_text)

    segments: list[Segment] = []
    for part in rest:
        if not part:
            raise ValueError(f"Empty segment in location '{text}'")
        if part in (BOTTOM_TEXT, BOTTOM_ASCII):
            segments.append(BOTTOM)
        elif OFFSET_RE.fullmatch(part):
            segments.append(Offset(int(part)))
        else:
            segments.append(Field(part))

    return AccessPath(root, tuple(segments))
