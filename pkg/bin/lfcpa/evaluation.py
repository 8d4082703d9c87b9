"""Evaluation of pointer expressions over a points-to relation.

`lval` gives the locations an expression may name, `rval` the values it may
have, `deref` the pointers read to find the location, and `ref` every
pointer read to evaluate the expression. `must` gives the relation used for
strong updates. Results may contain `EVERYWHERE` (any location) and
`ANYTHING` (any value) when pointer arithmetic leaves the known names."""

from collections.abc import Iterable
from dataclasses import dataclass
import logging
from typing import Protocol, Self

from lfcpa.data.ir import (
    AddrOf, AddrOfPlus, ArrowField, BinOp, Deref, DotField, Index,
    IndexExpr, IntLit, IntVar, Malloc, Neg, Plus, PointerExpr, Statement,
    VarRef
)
from lfcpa.data.locations import (
    ANYTHING, AccessPath, BOTTOM, BottomOffset, EVERYWHERE, Field, Location,
    Offset, Target, UNKNOWN, Var
)
from lfcpa.data.relations import PointsToRelation
from lfcpa.data.types import TypeTable
from lfcpa.locations import (
    ELEMENT, append, get_heap_loc, holds_pointers, is_approx
)

_logger = logging.getLogger(__name__)

type ConstValue = int | BottomOffset
"""An integer, or `BOTTOM` when the expression is not a compile-time
constant."""


def const_eval(expr: IndexExpr) -> ConstValue:
    """Fold an integer expression built from literals; any variable makes
    the result `BOTTOM`."""

    match expr:
        case IntLit(value=value):
            return value
        case IntVar():
            return BOTTOM
        case Neg(operand=operand):
            value = const_eval(operand)
            return BOTTOM if value is BOTTOM else -value
        case BinOp(op=op, left=left, right=right):
            a, b = const_eval(left), const_eval(right)
            if a is BOTTOM or b is BOTTOM:
                return BOTTOM
            match op:
                case '+':
                    return a + b
                case '-':
                    return a - b
                case '*':
                    return a * b

    raise ValueError(f'not an index expression: {expr!r}')


def _as_segment(value: ConstValue) -> Offset | BottomOffset:
    return BOTTOM if value is BOTTOM else Offset(value)


def _as_location(target: Target) -> Location | None:
    """A target used as a location: `ANYTHING` becomes `EVERYWHERE`, `?` is
    dropped."""

    if target is ANYTHING:
        return EVERYWHERE
    if target is UNKNOWN:
        return None

    return target


def _as_target(location: Location) -> Target:
    return ANYTHING if location is EVERYWHERE else location


def is_pointer_cell(location: Location, types: TypeTable) -> bool:
    """Membership in S for possibly untypable names; `EVERYWHERE` counts."""

    if location is EVERYWHERE:
        return True

    ctype = types.try_type_of(location)
    return ctype is not None and types.is_pointer_type(ctype)


class Environment(Protocol):
    """Anything that answers `A{σ}`."""

    def image(self, source: Location) -> frozenset[Target]:
        ...


@dataclass(frozen=True)
class MustRelation:
    """The must relation of a points-to relation, computed on demand. A
    source that points nowhere known (no pointee, or only `?`) must point to
    any target; one that points to a single non-approximate location must
    point to it; approximate sources must point to nothing."""

    relation: PointsToRelation
    types: TypeTable

    def image(self: Self, source: Location) -> frozenset[Target]:
        """`Must(A){σ}`"""

        if source is EVERYWHERE:
            return frozenset({ANYTHING})
        if is_approx(source, self.types):
            return frozenset()

        targets = self.relation.image(source)
        if not targets or targets == {UNKNOWN}:
            return frozenset({ANYTHING})
        if len(targets) == 1:
            (target,) = targets
            if (isinstance(target, AccessPath) and
                    not is_approx(target, self.types)):
                return targets

        return frozenset()

    def materialize(self: Self, sources: Iterable[Location]) -> (
            PointsToRelation):
        """The rows of `sources` as a relation; symbolic rows keep
        `ANYTHING` as their target."""

        return PointsToRelation.of(
            (s, t) for s in sources for t in self.image(s))


def must(relation: PointsToRelation, types: TypeTable) -> MustRelation:
    """`Must(A)`"""

    return MustRelation(relation, types)


class Evaluator:
    """Evaluates pointer expressions against one environment.

    `stmt` is the statement being analyzed; it names the allocation site
    when a `malloc` is evaluated."""

    def __init__(
        self: Self, env: Environment, types: TypeTable,
        stmt: Statement | None = None
    ) -> None:
        self.env = env
        self.types = types
        self.stmt = stmt

    def _append(self: Self, bases: Iterable[Location], segment) -> (
            frozenset[Location]):
        result: set[Location] = set()
        for base in bases:
            if base is EVERYWHERE:
                result.add(EVERYWHERE)
                continue
            path = append(base, segment, self.types)
            if path is not None:
                result.add(path)

        return frozenset(result)

    def _targets_as_locations(self: Self, targets: Iterable[Target]) -> (
            frozenset[Location]):
        return frozenset(loc for t in targets
                         if (loc := _as_location(t)) is not None)

    def lval(self: Self, expr: PointerExpr) -> frozenset[Location]:
        """The locations `expr` may name; empty for expressions without an
        l-value."""

        match expr:
            case VarRef(name=name):
                return frozenset({AccessPath(Var(name))})
            case DotField(base=base, member=member):
                return self._append(self.lval(base), Field(member))
            case ArrowField(base=base, member=member):
                return self._append(
                    self._targets_as_locations(self.rval(base)),
                    Field(member))
            case Deref(base=base):
                return self._targets_as_locations(self.rval(base))
            case Index(base=base, index=index):
                return self._append(self.lval(base),
                                    _as_segment(const_eval(index)))

        return frozenset()

    def shift(self: Self, values: Iterable[Target], offset: IndexExpr) -> (
            frozenset[Target]):
        """Pointer arithmetic on a set of values: every value must name an
        array element, otherwise the result is `ANYTHING`. Offsets that
        leave the enclosing array become `⊥`."""

        values = frozenset(values)
        if not values:
            return frozenset()

        amount = const_eval(offset)
        shifted: set[Target] = set()
        for value in values:
            if not isinstance(value, AccessPath) or not isinstance(
                    value.last, ELEMENT):
                return frozenset({ANYTHING})

            last = value.last
            if BOTTOM in (last, amount):
                shifted.add(value.with_last(BOTTOM))
                continue

            index = last.value + amount
            extent = self.types.element_extent(value)
            if extent is not None and not 0 <= index < extent:
                _logger.debug('offset %d of %s is outside [0, %d); '
                              'widening to ⊥', index, value, extent)
                shifted.add(value.with_last(BOTTOM))
            else:
                shifted.add(value.with_last(Offset(index)))

        return frozenset(shifted)

    def rval(self: Self, expr: PointerExpr) -> frozenset[Target]:
        """The values `expr` may have."""

        match expr:
            case AddrOf(base=base):
                return frozenset(map(_as_target, self.lval(base)))
            case Malloc():
                return frozenset({get_heap_loc(self.stmt)})
            case Plus(base=base, offset=offset):
                return self.shift(self.rval(base), offset)
            case AddrOfPlus(base=base, offset=offset):
                return self.shift(map(_as_target, self.lval(base)), offset)

        locations = self.lval(expr)
        if EVERYWHERE in locations:
            return frozenset({ANYTHING})

        values: set[Target] = set()
        for loc in locations:
            if is_pointer_cell(loc, self.types):
                values |= self.env.image(loc)

        return frozenset(values)

    def deref(self: Self, expr: PointerExpr) -> frozenset[Location]:
        """The pointers read to find the location of `expr`."""

        match expr:
            case DotField(base=base) | Index(base=base) | Plus(base=base):
                return self.deref(base)
            case ArrowField(base=base) | Deref(base=base):
                return self.lval(base) | self.deref(base)
            case AddrOfPlus(base=base):
                return self.deref(base)

        return frozenset()

    def ref(self: Self, expr: PointerExpr) -> frozenset[Location]:
        """Every pointer read to evaluate `expr`. Aggregates read as a
        whole are included as such; `extract` spells out their cells."""

        match expr:
            case AddrOf(base=base) | AddrOfPlus(base=base):
                return self.deref(base)
            case Plus(base=base):
                return self.ref(base)
            case Malloc():
                return frozenset()

        read = {loc for loc in self.lval(expr)
                if loc is EVERYWHERE or holds_pointers(loc, self.types)}
        return self.deref(expr) | read


def lval(
    expr: PointerExpr, env: Environment, types: TypeTable,
    stmt: Statement | None = None
) -> frozenset[Location]:
    """Module-level form of `Evaluator.lval`."""

    return Evaluator(env, types, stmt).lval(expr)


def rval(
    expr: PointerExpr, env: Environment, types: TypeTable,
    stmt: Statement | None = None
) -> frozenset[Target]:
    """Module-level form of `Evaluator.rval`."""

    return Evaluator(env, types, stmt).rval(expr)


def deref(
    expr: PointerExpr, env: Environment, types: TypeTable
) -> frozenset[Location]:
    """Module-level form of `Evaluator.deref`."""

    return Evaluator(env, types).deref(expr)


def ref(
    expr: PointerExpr, env: Environment, types: TypeTable
) -> frozenset[Location]:
    """Module-level form of `Evaluator.ref`."""

    return Evaluator(env, types).ref(expr)
