"""A concrete interpreter for analyzed procedures, and the soundness check
that compares its traces against analysis results.

Only pointer cells are modelled. Integer variables used in index
expressions read their value from `inputs` (default 0), a union object is a
single cell, and each `malloc` creates a fresh heap instance that abstracts
to the allocation site's name. Branches follow a script of decisions."""

from collections import Counter
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
import logging
from typing import Self

from lfcpa.cfg import Cfg
from lfcpa.data.ir import (
    AddrOf, AddrOfPlus, ArrowField, BinOp, Deref, DotField, END_ID, Index,
    IndexExpr, IntLit, IntVar, Malloc, Neg, Plus, PointerExpr, PtrAssign,
    START_ID, Statement, Use, VarRef
)
from lfcpa.data.locations import (
    ANYTHING, AccessPath, EVERYWHERE, Field, HeapSite, Offset, Target,
    UNKNOWN, Var
)
from lfcpa.data.results import AnalysisResult
from lfcpa.data.types import AggregateType, ArrayType, CType, TypeTable
from lfcpa.errors import AnalysisError
from lfcpa.locations import covered, overlaps

_logger = logging.getLogger(__name__)

DEFAULT_FUEL = 1000
BRANCH_ORIGINS = ('if', 'while')


@dataclass(frozen=True, order=True)
class HeapInstance:
    """One dynamically allocated object."""

    site: int
    "Label of the allocating statement"
    serial: int
    "1-based allocation count at that site"

    def __str__(self: Self) -> str:
        return f'o{self.site}#{self.serial}'


@dataclass(frozen=True)
class Cell:
    """A concrete memory cell: a variable or heap instance and constant
    selections into it."""

    root: Var | HeapInstance
    segments: tuple[Field | Offset, ...] = ()

    def __str__(self: Self) -> str:
        return '.'.join([str(self.root), *map(str, self.segments)])

    def extend(self: Self, segment: Field | Offset) -> Self:
        return Cell(self.root, self.segments + (segment,))

    def abstract(self: Self) -> AccessPath:
        """The named location standing for this cell."""

        root = self.root
        if isinstance(root, HeapInstance):
            return AccessPath(HeapSite(root.site), self.segments)

        return AccessPath(root, self.segments)


type Value = Cell | None
"""A pointer value; `None` is an uninitialized pointer."""


class Halt(Exception):
    """Stops a run at an operation with undefined behavior."""


@dataclass(frozen=True)
class TracePoint:
    """The memory before a node executes, and the cells that are live
    there."""

    node: int
    state: Mapping[Cell, Value]
    allocated: frozenset[HeapInstance] = frozenset()
    live: frozenset[Cell] = frozenset()

    def abstract_state(self: Self) -> dict[str, str]:
        """The state with cells and values shown as named locations."""

        return {str(c.abstract()): abstract_value(v)
                for c, v in sorted(self.state.items(), key=lambda i: str(i[0]))}


@dataclass(frozen=True)
class Trace:
    """The observed execution of one procedure."""

    procedure: str
    points: tuple[TracePoint, ...] = ()
    final_state: Mapping[Cell, Value] = field(default_factory=dict)
    halted: str | None = None
    "Why the run stopped early, if it did"
    exhausted: bool = False
    "True if the run ran out of fuel"

    @property
    def body(self: Self) -> tuple[TracePoint, ...]:
        """The points at statement nodes."""

        return tuple(p for p in self.points if p.node != START_ID)

    def abstract_final_state(self: Self) -> dict[str, str]:
        """The final state with cells and values shown as named
        locations."""

        return TracePoint(END_ID, self.final_state).abstract_state()


def abstract_value(value: Value) -> str:
    """Render a pointer value as its named location, `?` if
    uninitialized."""

    return str(UNKNOWN) if value is None else str(value.abstract())


@dataclass
class _Step:
    node: int
    state: dict[Cell, Value]
    allocated: frozenset[HeapInstance]
    address_reads: list[Cell] = field(default_factory=list)
    value_reads: list[Cell] = field(default_factory=list)
    write: Cell | None = None
    completed: bool = False


class Interpreter:
    """Runs one procedure."""

    def __init__(
        self: Self, cfg: Cfg, types: TypeTable, branches: Iterable[bool] = (),
        inputs: Mapping[str, int] | None = None
    ) -> None:
        self.cfg = cfg
        self.types = types
        self.branches: Iterator[bool] = iter(branches)
        self.inputs = dict(inputs or {})
        self.memory: dict[Cell, Value] = {}
        self.serials: Counter[int] = Counter()
        self.allocated: set[HeapInstance] = set()
        self.reads: list[Cell] = []

    # Memory

    def typed(self: Self, cell: Cell) -> CType:
        ctype = self.types.try_type_of(cell.abstract())
        if ctype is None:
            raise Halt(f'ill-typed access to {cell}')

        return ctype

    def read(self: Self, cell: Cell) -> Value:
        self.reads.append(cell)
        return self.memory.get(cell)

    def select(self: Self, base: Cell, segment: Field | Offset) -> Cell:
        """The member or element `segment` of `base`; unions are one
        cell."""

        ctype = self.typed(base)
        if isinstance(ctype, AggregateType) and ctype.is_union:
            return base
        if isinstance(segment, Offset):
            if not isinstance(ctype, ArrayType):
                raise Halt(f'element of non-array {base}')
            if not 0 <= segment.value < ctype.extent:
                raise Halt(f'index {segment.value} out of bounds for {base}')

        cell = base.extend(segment)
        self.typed(cell)
        return cell

    def pointee(self: Self, value: Value, expr: PointerExpr) -> Cell:
        if value is None:
            raise Halt(f"dereference of uninitialized pointer '{expr}'")

        return value

    def shift(self: Self, address: Cell, amount: int) -> Cell:
        """Pointer arithmetic within one array."""

        last = address.segments[-1] if address.segments else None
        if not isinstance(last, Offset):
            raise Halt(f'pointer arithmetic on non-element {address}')

        parent = Cell(address.root, address.segments[:-1])
        return self.select(parent, Offset(last.value + amount))

    # Expressions

    def index(self: Self, expr: IndexExpr) -> int:
        match expr:
            case IntLit(value=value):
                return value
            case IntVar(name=name):
                return self.inputs.get(name, 0)
            case Neg(operand=operand):
                return -self.index(operand)
            case BinOp(op='+', left=left, right=right):
                return self.index(left) + self.index(right)
            case BinOp(op='-', left=left, right=right):
                return self.index(left) - self.index(right)
            case BinOp(op='*', left=left, right=right):
                return self.index(left) * self.index(right)

        raise Halt(f'cannot evaluate {expr}')

    def lval(self: Self, expr: PointerExpr) -> Cell:
        match expr:
            case VarRef(name=name):
                return Cell(Var(name))
            case DotField(base=base, member=member):
                return self.select(self.lval(base), Field(member))
            case ArrowField(base=base, member=member):
                target = self.pointee(self.rval(base), base)
                return self.select(target, Field(member))
            case Deref(base=base):
                return self.pointee(self.rval(base), base)
            case Index(base=base, index=index):
                return self.select(self.lval(base), Offset(self.index(index)))

        raise Halt(f"'{expr}' has no location")

    def rval(self: Self, expr: PointerExpr) -> Value:
        match expr:
            case AddrOf(base=base):
                return self.lval(base)
            case AddrOfPlus(base=base, offset=offset):
                return self.shift(self.lval(base), self.index(offset))
            case Plus(base=base, offset=offset):
                start = self.pointee(self.rval(base), base)
                return self.shift(start, self.index(offset))
            case Malloc():
                raise Halt('malloc outside an assignment')

        cell = self.lval(expr)
        if not self.types.is_pointer_type(self.typed(cell)):
            raise Halt(f"'{expr}' is not a pointer")

        return self.read(cell)

    def allocate(self: Self, site: int) -> Cell:
        self.serials[site] += 1
        instance = HeapInstance(site, self.serials[site])
        self.allocated.add(instance)

        return Cell(instance)

    def use(self: Self, expr: PointerExpr) -> None:
        """Read what evaluating `expr` reads."""

        match expr:
            case AddrOf() | AddrOfPlus() | Plus():
                self.rval(expr)
                return
            case Malloc():
                return

        cell = self.lval(expr)
        ctype = self.typed(cell)
        if self.types.is_pointer_type(ctype):
            self.read(cell)
        elif self.types.contains_pointer(ctype):
            for path in self.types.pointer_cells(cell.abstract()):
                self.read(Cell(cell.root, path.segments))

    # Statements

    def execute(self: Self, step: _Step, stmt: Statement) -> None:
        match stmt:
            case PtrAssign(lhs=lhs, rhs=rhs):
                self.reads = step.address_reads
                target = self.lval(lhs)
                self.reads = step.value_reads
                if isinstance(rhs, Malloc):
                    value = self.allocate(stmt.label)
                else:
                    value = self.rval(rhs)
                self.memory[target] = value
                step.write = target
            case Use(exprs=exprs):
                self.reads = step.address_reads
                for expr in exprs:
                    self.use(expr)

        step.completed = True

    def next_node(self: Self, node: int, stmt: Statement) -> int:
        successors = self.cfg.successors(node)
        if (isinstance(stmt, Use) and stmt.origin in BRANCH_ORIGINS and
                len(successors) > 1):
            return self.cfg.branch_target(node, next(self.branches, False))

        return successors[0]

    def run(self: Self, fuel: int) -> Trace:
        steps: list[_Step] = []
        halted = None
        exhausted = False
        node = START_ID

        while node != END_ID:
            if len(steps) >= fuel:
                exhausted = True
                break

            stmt = self.cfg.statement(node)
            step = _Step(node, dict(self.memory), frozenset(self.allocated))
            steps.append(step)
            try:
                self.execute(step, stmt)
            except Halt as h:
                halted = str(h)
                _logger.debug('%s halted at node %d: %s', self.cfg.name,
                              node, halted)
                break

            node = self.next_node(node, stmt)

        return Trace(self.cfg.name, tuple(_liveness(steps)),
                     dict(self.memory), halted, exhausted)


def _liveness(steps: list[_Step]) -> Iterator[TracePoint]:
    """Attach the strongly live cells to each step, walking backwards. A
    value read for an assignment counts only if the assigned cell is live
    afterwards; reads of an unfinished step do not count."""

    live: set[Cell] = set()
    points: list[TracePoint] = []
    for step in reversed(steps):
        if step.completed:
            written_live = step.write is not None and step.write in live
            if step.write is not None:
                live.discard(step.write)
            live.update(step.address_reads)
            if written_live or step.write is None:
                live.update(step.value_reads)
        points.append(TracePoint(step.node, step.state, step.allocated,
                                 frozenset(live)))

    return reversed(points)


def run(
    cfg: Cfg, types: TypeTable | None = None, fuel: int = DEFAULT_FUEL,
    branches: Iterable[bool] = (), inputs: Mapping[str, int] | None = None
) -> Trace:
    """Execute a procedure from its start for at most `fuel` nodes.

    Args:
        cfg: The procedure's CFG
        types: The type table; defaults to the CFG's scoped table
        fuel: Maximum number of nodes executed
        branches: Decisions for the conditions met, in order; `False` once
            exhausted
        inputs: Values of integer variables used in index expressions
    """

    return Interpreter(cfg, types or cfg.types, branches, inputs).run(fuel)


@dataclass(frozen=True)
class Violation:
    """A concrete fact the analysis result does not cover."""

    node: int
    kind: str
    "Either 'liveness' or 'pointsto'"
    location: str
    detail: str

    def __str__(self: Self) -> str:
        return f'node {self.node}: {self.kind} {self.location}: {self.detail}'


def _pair_covers(source, target, cell: AccessPath, value: Target) -> bool:
    if source is not EVERYWHERE and not (
            isinstance(source, AccessPath) and overlaps(source, cell)):
        return False
    if target is ANYTHING or target == value:
        return True

    return (isinstance(target, AccessPath) and isinstance(value, AccessPath)
            and overlaps(target, value))


def check_soundness(trace: Trace, result: AnalysisResult) -> list[Violation]:
    """Check every live cell of every trace point against the analysis:
    its name must be in Lin, and its value must be covered by Ain.

    Raises:
        AnalysisError: If the trace and the result are for different
            procedures
    """

    if trace.procedure != result.procedure:
        raise AnalysisError(
            f'trace of {trace.procedure} checked against result of '
            f'{result.procedure}')

    violations: list[Violation] = []
    for point in trace.points:
        node = result.nodes[point.node]
        for cell in sorted(point.live, key=str):
            if (isinstance(cell.root, HeapInstance) and
                    cell.root not in point.allocated):
                continue

            name = cell.abstract()
            if not covered(name, node.lin):
                violations.append(Violation(
                    point.node, 'liveness', str(name), 'not in Lin'))

            value = point.state.get(cell)
            target = UNKNOWN if value is None else value.abstract()
            if not any(_pair_covers(s, t, name, target) for s, t in node.ain):
                violations.append(Violation(
                    point.node, 'pointsto', str(name),
                    f'({name},{target}) not covered by Ain'))

    return violations
