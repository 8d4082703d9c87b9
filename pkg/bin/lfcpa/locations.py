"""Classification predicates over named locations, the overlap relation used
for ⊥ offsets, and the construction of paths with union collapsing."""

from collections.abc import Iterable
import logging

from lfcpa.data.ir import PtrAssign, Malloc, Statement
from lfcpa.data.locations import (
    AccessPath, BOTTOM, BottomOffset, EVERYWHERE, HeapSite, Location, Offset,
    Segment
)
from lfcpa.data.types import AggregateType, TypeTable
from lfcpa.errors import AnalysisError

_logger = logging.getLogger(__name__)

ELEMENT = (Offset, BottomOffset)


def is_pointer(path: AccessPath, types: TypeTable) -> bool:
    """True iff the location holds a pointer (membership in S).

    Raises:
        ValueError: If the path cannot be typed ("unknown location type")
    """

    return types.is_pointer_type(types.type_of(path))


def holds_pointers(path: AccessPath, types: TypeTable) -> bool:
    """True iff the location is a pointer or an aggregate with pointer
    cells. Untypable paths answer False."""

    ctype = types.try_type_of(path)
    return ctype is not None and types.contains_pointer(ctype)


def is_heap(path: AccessPath) -> bool:
    """True iff the path is rooted at an allocation site."""

    return isinstance(path.root, HeapSite)


def is_union(path: AccessPath, types: TypeTable) -> bool:
    """True iff the location's type is a union.

    Raises:
        ValueError: If the path cannot be typed
    """

    ctype = types.type_of(path)
    return isinstance(ctype, AggregateType) and ctype.is_union


def is_approx(path: Location, types: TypeTable) -> bool:
    """True iff the name may stand for more than one concrete cell: heap
    cells, paths with a ⊥ offset, unions, and `EVERYWHERE`."""

    if not isinstance(path, AccessPath):
        return True
    if is_heap(path) or path.has_bottom():
        return True

    ctype = types.try_type_of(path)
    return isinstance(ctype, AggregateType) and ctype.is_union


def overlaps(p: AccessPath, q: AccessPath) -> bool:
    """True iff the two names may denote the same cell: same root, same
    length, and position-wise agreement where ⊥ matches any offset."""

    if p.root != q.root or len(p.segments) != len(q.segments):
        return False

    for a, b in zip(p.segments, q.segments):
        if a == b:
            continue
        if (isinstance(a, ELEMENT) and isinstance(b, ELEMENT) and
                BOTTOM in (a, b)):
            continue
        return False

    return True


def covered(path: Location, live: Iterable[Location]) -> bool:
    """Liveness membership: True iff `path` overlaps some member of `live`.
    `EVERYWHERE` on either side matches anything."""

    for other in live:
        if other is EVERYWHERE or path is EVERYWHERE:
            return True
        if isinstance(path, AccessPath) and isinstance(other, AccessPath):
            if overlaps(path, other):
                return True

    return False


def get_heap_loc(stmt: Statement) -> AccessPath:
    """The abstract heap cell named after the `malloc` statement `stmt`.

    Raises:
        AnalysisError: If `stmt` does not allocate
    """

    if not isinstance(stmt, PtrAssign) or not isinstance(stmt.rhs, Malloc):
        raise AnalysisError(
            f'statement {stmt.label} is not an allocation site')

    return AccessPath(HeapSite(stmt.label))


def append(
    path: AccessPath, segment: Segment, types: TypeTable
) -> AccessPath | None:
    """Extend `path` by `segment`, collapsing unions: a union location is
    returned unchanged. Answers `None` when the extension cannot be typed
    (a field selected from a non-struct, an element from a non-array)."""

    ctype = types.try_type_of(path)
    if isinstance(ctype, AggregateType) and ctype.is_union:
        return path

    extended = path.extend(segment)
    if ctype is None or types.try_type_of(extended) is None:
        _logger.debug('dropping untypable path %s', extended)
        return None

    return extended
