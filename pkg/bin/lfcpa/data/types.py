"""Data classes describing the types of the analyzed program, and the type
table that resolves every named location to its layout."""

from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from typing import Self

from lfcpa.data.locations import (
    AccessPath, BottomOffset, Field, HeapSite, Offset, Var
)


@dataclass(frozen=True)
class ScalarType:
    """A non-pointer scalar (`int`, `char`, ...)."""

    name: str
    "The type keyword"

    def __str__(self: Self) -> str:
        return self.name


@dataclass(frozen=True)
class PointerType:
    """A pointer to `pointee`."""

    pointee: 'CType'
    "The type pointed to"

    def __str__(self: Self) -> str:
        return f'{self.pointee} *'


@dataclass(frozen=True)
class ArrayType:
    """One array dimension. Multi-dimensional arrays nest."""

    element: 'CType'
    "The element type"
    extent: int
    "Number of elements"

    def __str__(self: Self) -> str:
        dims = ''
        inner: CType = self
        while isinstance(inner, ArrayType):
            dims += f'[{inner.extent}]'
            inner = inner.element

        return f'{inner}{dims}'


@dataclass(frozen=True)
class AggregateType:
    """A reference (by tag) to a struct or union layout in the type table.
    Anonymous aggregates receive generated tags."""

    tag: str
    "The struct/union tag"
    is_union: bool = False
    "True for unions"

    def __str__(self: Self) -> str:
        return f"{'union' if self.is_union else 'struct'} {self.tag}"


type CType = ScalarType | PointerType | ArrayType | AggregateType
"""Type alias for every type the mini-language can express."""

INT = ScalarType('int')
CHAR = ScalarType('char')
VOID = ScalarType('void')


@dataclass(frozen=True)
class FieldDecl:
    """A member of a struct or union."""

    name: str
    "The member name"
    ctype: CType
    "The member type"


@dataclass(frozen=True)
class Aggregate:
    """The layout of a struct or union."""

    tag: str
    "The struct/union tag"
    is_union: bool
    "True for unions"
    fields: tuple[FieldDecl, ...]
    "Members in declaration order"

    def member(self: Self, name: str) -> FieldDecl | None:
        """Look up a member by name."""

        for f in self.fields:
            if f.name == name:
                return f

        return None


@dataclass(frozen=True)
class TypeTable:
    """Resolves variables, heap sites and access paths to types.

    A table created by the type checker holds the aggregates and the global
    variables. The CFG builder derives a scoped table for each procedure that
    adds the locals and the heap cell type of each allocation site."""

    aggregates: Mapping[str, Aggregate] = field(default_factory=dict)
    "Struct and union layouts, by tag"
    variables: Mapping[str, CType] = field(default_factory=dict)
    "Variables in scope, by name"
    heap: Mapping[int, CType] = field(default_factory=dict)
    "Heap cell types, by allocation-site label"

    def scoped(
        self: Self, variables: Mapping[str, CType],
        heap: Mapping[int, CType] | None = None
    ) -> Self:
        """Return a table that also knows `variables` and `heap`."""

        return TypeTable(
            self.aggregates,
            {**self.variables, **variables},
            {**self.heap, **(heap or {})},
        )

    def aggregate(self: Self, ctype: AggregateType) -> Aggregate:
        """Return the layout for an aggregate type reference.

        Raises:
            ValueError: If the tag was never defined
        """

        try:
            return self.aggregates[ctype.tag]
        except KeyError as e:
            raise ValueError(f'incomplete type {ctype}') from e

    def root_type(self: Self, path: AccessPath) -> CType:
        """Return the type of the path's root."""

        root = path.root
        if isinstance(root, Var) and root.name in self.variables:
            return self.variables[root.name]
        if isinstance(root, HeapSite) and root.label in self.heap:
            return self.heap[root.label]

        raise ValueError(f'unknown location type: {path}')

    def type_of(self: Self, path: AccessPath) -> CType:
        """Resolve the type of the location named by `path`.

        Raises:
            ValueError: If the path does not denote a typed location
        """

        current = self.root_type(path)
        for segment in path.segments:
            if isinstance(segment, Field):
                if (not isinstance(current, AggregateType) or
                        current.is_union):
                    raise ValueError(f'unknown location type: {path}')
                member = self.aggregate(current).member(segment.name)
                if member is None:
                    raise ValueError(f'unknown location type: {path}')
                current = member.ctype
            elif isinstance(segment, (Offset, BottomOffset)):
                if not isinstance(current, ArrayType):
                    raise ValueError(f'unknown location type: {path}')
                current = current.element

        return current

    def try_type_of(self: Self, path: AccessPath) -> CType | None:
        """Like `type_of`, but answer `None` for untypable paths."""

        try:
            return self.type_of(path)
        except ValueError:
            return None

    def contains_pointer(self: Self, ctype: CType) -> bool:
        """True if a value of `ctype` holds at least one pointer without
        going through an indirection."""

        return self._contains_pointer(ctype, frozenset())

    def _contains_pointer(self: Self, ctype: CType, seen: frozenset) -> bool:
        if isinstance(ctype, PointerType):
            return True
        if isinstance(ctype, ArrayType):
            return self._contains_pointer(ctype.element, seen)
        if isinstance(ctype, AggregateType):
            if ctype.tag in seen or ctype.tag not in self.aggregates:
                return False
            inner = seen | {ctype.tag}
            return any(self._contains_pointer(f.ctype, inner)
                       for f in self.aggregates[ctype.tag].fields)

        return False

    def is_pointer_type(self: Self, ctype: CType) -> bool:
        """True for pointer types and for unions with a pointer member
        (a union is a single collapsed cell)."""

        if isinstance(ctype, PointerType):
            return True

        return (isinstance(ctype, AggregateType) and ctype.is_union and
                self.contains_pointer(ctype))

    def field_kinds(self: Self, tag: str) -> dict[str, str]:
        """Classify each member of an aggregate as a pointer field ('pF') or
        a non-pointer field ('npF')."""

        return {
            f.name: 'pF' if isinstance(f.ctype, PointerType) else 'npF'
            for f in self.aggregates[tag].fields
        }

    def element_extent(self: Self, path: AccessPath) -> int | None:
        """The extent of the array whose element `path` names, if any."""

        parent = path.parent
        if parent is None:
            return None

        ctype = self.try_type_of(parent)
        return ctype.extent if isinstance(ctype, ArrayType) else None

    def pointer_cells(self: Self, path: AccessPath) -> tuple[AccessPath, ...]:
        """Enumerate the pointer locations inside the location `path`
        (the location itself, if it is a pointer). Array elements are
        enumerated by index; a union is one cell.

        Raises:
            ValueError: If the path does not denote a typed location
        """

        return tuple(self._cells(path, self.type_of(path)))

    def _cells(self: Self, path: AccessPath, ctype: CType) -> Iterator[
            AccessPath]:
        if self.is_pointer_type(ctype):
            yield path
        elif isinstance(ctype, ArrayType):
            for index in range(ctype.extent):
                yield from self._cells(path.extend(Offset(index)),
                                       ctype.element)
        elif isinstance(ctype, AggregateType) and not ctype.is_union:
            for member in self.aggregate(ctype).fields:
                yield from self._cells(path.extend(Field(member.name)),
                                       member.ctype)

    def cell_count(self: Self, ctype: CType) -> int:
        """The number of pointer locations a value of `ctype` holds, as
        `pointer_cells` would enumerate them."""

        if self.is_pointer_type(ctype):
            return 1
        if isinstance(ctype, ArrayType):
            return ctype.extent * self.cell_count(ctype.element)
        if isinstance(ctype, AggregateType) and not ctype.is_union:
            return sum(self.cell_count(member.ctype)
                       for member in self.aggregate(ctype).fields)

        return 0

    @cached_property
    def pointer_location_count(self: Self) -> int:
        """The size of `pointer_locations`, computed without enumerating
        it."""

        roots = [AccessPath(Var(name)) for name in self.variables]
        roots += [AccessPath(HeapSite(label)) for label in self.heap]

        return sum(self.cell_count(self.type_of(root)) for root in roots)

    @cached_property
    def pointer_locations(self: Self) -> frozenset[AccessPath]:
        """Every pointer location derivable from the variables and heap
        sites in scope: the finite set S used for kills through unknown
        pointers and for the all-live baseline."""

        roots = [AccessPath(Var(name)) for name in self.variables]
        roots += [AccessPath(HeapSite(label)) for label in self.heap]

        cells: set[AccessPath] = set()
        for root in roots:
            cells.update(self.pointer_cells(root))

        return frozenset(cells)
