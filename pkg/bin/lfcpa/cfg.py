"""Control-flow graphs of typed procedures, and the two normalizations the
analysis assumes: structure assignments are expanded into member-wise
assignments, and address-of operators only occur at the top of an
expression.

A CFG is a `networkx.DiGraph` whose nodes are statement labels. Every node
carries its statement in the `stmt` attribute; the two edges leaving a
condition node carry `branch=True` (then/loop body) and `branch=False`."""

from collections.abc import Iterator
from dataclasses import replace
import logging
from typing import Self

import networkx as nx  # pyright: ignore[reportMissingImports]

from lfcpa.data.ir import (
    AddrOf, AddrOfPlus, ArrowField, Assign, Deref, DotField, END_ID, End, If,
    Index, IntLit, LOCATION_FORMS, Malloc, Node, Other, Plus, PointerExpr,
    Program, PtrAssign, Return, START_ID, Start, Statement, Use, While
)
from lfcpa.data.types import (
    AggregateType, ArrayType, CType, INT, PointerType, TypeTable
)
from lfcpa.errors import TypeCheckError
from lfcpa.parser import parse
from lfcpa.typecheck import typecheck

_logger = logging.getLogger(__name__)

type Exit = tuple[int, bool | None]
"""A dangling edge: source node and the branch it leaves by."""


class Cfg:
    """The control-flow graph of one procedure."""

    def __init__(
        self: Self, name: str, graph: nx.DiGraph, types: TypeTable
    ) -> None:
        self.name = name
        "The procedure name"
        self.graph = graph
        "Labelled nodes holding statements"
        self.types = types
        "Type table scoped to the procedure's locals and allocation sites"

    start = START_ID
    end = END_ID

    def __len__(self: Self) -> int:
        return self.graph.number_of_nodes()

    def __contains__(self: Self, node: object) -> bool:
        return node in self.graph

    def statement(self: Self, node: int) -> Statement:
        """The statement at `node`."""

        return self.graph.nodes[node]['stmt']

    def order(self: Self) -> list[int]:
        """Node ids in report order: start, statements by label, end."""

        labels = sorted(n for n in self.graph if n not in (START_ID, END_ID))
        return [START_ID, *labels, END_ID]

    def statements(self: Self) -> Iterator[tuple[int, Statement]]:
        """(id, statement) pairs in report order."""

        for node in self.order():
            yield node, self.statement(node)

    def successors(self: Self, node: int) -> list[int]:
        """Successors of `node`; for conditions the `True` branch comes
        first."""

        edges = self.graph.out_edges(node, data='branch')
        return [v for _, v, _ in sorted(edges, key=lambda e: e[2] is False)]

    def predecessors(self: Self, node: int) -> list[int]:
        """Predecessors of `node`, sorted by id."""

        return sorted(self.graph.predecessors(node))

    def branch_target(self: Self, node: int, taken: bool) -> int:
        """The successor reached from `node` when the branch decision is
        `taken`. Nodes with a single successor ignore the decision."""

        succs = self.successors(node)
        if len(succs) == 1:
            return succs[0]

        for _, v, branch in self.graph.out_edges(node, data='branch'):
            if branch is taken:
                return v

        raise KeyError(f'node {node} has no {taken} branch')

    def postorder(self: Self) -> list[int]:
        """Depth-first postorder from start; the backward worklist order."""

        return list(nx.dfs_postorder_nodes(self.graph, START_ID))

    def reverse_postorder(self: Self) -> list[int]:
        """The forward worklist order."""

        return self.postorder()[::-1]

    @property
    def heap_sites(self: Self) -> list[int]:
        """Labels of the allocation statements."""

        return sorted(self.types.heap)


# Normalization

def _check_types(lhs_type: CType | None, rhs_type: CType | None,
                 stmt: Assign) -> None:
    if lhs_type != rhs_type:
        raise TypeCheckError(
            f"incompatible types in '{stmt}': {lhs_type} and {rhs_type}")


def closure_expand(stmt: Assign | PtrAssign, types: TypeTable) -> tuple[
        Statement, ...]:
    """Expand an assignment between aggregates into one assignment per
    member, recursively. Arrays expand element-wise, a union with a pointer
    member is assigned as one pointer cell, and non-pointer scalars become
    `Other` statements. Members appear in declaration order.

    Raises:
        TypeCheckError: When the two sides have different types
    """

    if isinstance(stmt, PtrAssign):
        return (stmt,)

    lhs, rhs = stmt.lhs, stmt.rhs
    _check_types(lhs.ctype, rhs.ctype, stmt)
    ctype = lhs.ctype

    if isinstance(ctype, PointerType) or (
            ctype is not None and types.is_pointer_type(ctype)):
        return (PtrAssign(lhs, rhs),)

    expanded: list[Statement] = []
    match ctype:
        case ArrayType(element=element, extent=extent):
            for i in range(extent):
                expanded.extend(closure_expand(Assign(
                    Index(lhs, IntLit(i, INT), element),
                    Index(rhs, IntLit(i, INT), element)), types))
        case AggregateType(is_union=False):
            for member in types.aggregate(ctype).fields:
                expanded.extend(closure_expand(Assign(
                    DotField(lhs, member.name, member.ctype),
                    DotField(rhs, member.name, member.ctype)), types))
        case _:
            expanded.append(Other(str(stmt)))

    return tuple(expanded)


def _nested_address(expr: PointerExpr, top: bool) -> bool:
    """True if an address form appears below the top of `expr`, other than
    `&β + e` directly under an indirection."""

    match expr:
        case AddrOf(base=base):
            return not top or _nested_address(base, False)
        case AddrOfPlus(base=base):
            return not top or _nested_address(base, False)
        case Malloc():
            return not top
        case Deref(base=AddrOfPlus(base=base)) | ArrowField(
                base=AddrOfPlus(base=base)):
            return _nested_address(base, False)
        case DotField(base=base) | ArrowField(base=base) | Deref(
                base=base) | Index(base=base) | Plus(base=base):
            return _nested_address(base, False)

    return False


def _verify(stmt: Statement) -> None:
    """Check the address-form invariants of a normalized statement."""

    match stmt:
        case PtrAssign(lhs=lhs, rhs=rhs):
            if not isinstance(lhs, LOCATION_FORMS):
                raise TypeCheckError(f"'{lhs}' has no l-value")
            if _nested_address(lhs, False) or _nested_address(rhs, True):
                raise TypeCheckError(f"nested address-of in '{stmt}'")
        case Use(exprs=exprs):
            for expr in exprs:
                if _nested_address(expr, True):
                    raise TypeCheckError(f"nested address-of in '{stmt}'")


def _normalize_body(
    body: tuple[Node, ...], types: TypeTable
) -> tuple[Node, ...]:
    out: list[Node] = []
    for node in body:
        match node:
            case Assign():
                expanded = closure_expand(node, types)
                pointers = [s for s in expanded if isinstance(s, PtrAssign)]
                out.extend(pointers or [Other(str(node))])
            case If(condition=c, then_body=t, else_body=e):
                _verify(c)
                out.append(If(c, _normalize_body(t, types),
                              _normalize_body(e, types)))
            case While(condition=c, body=b):
                _verify(c)
                out.append(While(c, _normalize_body(b, types)))
            case Return(value=v):
                _verify(v)
                out.append(node)
            case _:
                _verify(node)
                out.append(node)

    return tuple(out)


def normalize(program: Program, types: TypeTable) -> Program:
    """Expand every structure assignment and verify that address forms only
    occur at the top of expressions. A member-wise expansion keeps its
    pointer assignments; an aggregate without pointers becomes a single
    `Other`. Normalizing a normalized program returns an equal program.

    Raises:
        TypeCheckError: On mismatched assignment types or a nested
            address-of
    """

    procedures = []
    for proc in program.procedures:
        scoped = types.scoped(proc.local_vars)
        procedures.append(replace(proc, body=_normalize_body(proc.body,
                                                             scoped)))

    return Program(tuple(procedures))


# Construction

class _Builder:
    """Lays out the statements of one procedure as graph nodes."""

    def __init__(self: Self, first_label: int) -> None:
        self.graph = nx.DiGraph()
        self.next_label = first_label
        self.heap: dict[int, CType] = {}
        self.add(Start())
        self.add(End())

    def add(self: Self, stmt: Statement) -> int:
        label = stmt.label
        if label in self.graph:
            raise TypeCheckError(f'duplicate label {label}')
        self.graph.add_node(label, stmt=stmt)

        return label

    def connect(self: Self, exits: list[Exit], target: int) -> None:
        for source, branch in exits:
            if self.graph.has_edge(source, target):
                # Both branches lead to the same node
                self.graph.edges[source, target]['branch'] = None
            else:
                self.graph.add_edge(source, target, branch=branch)

    def statement(self: Self, stmt: Statement, exits: list[Exit]) -> int:
        """Label `stmt`, add it after `exits` and return its id."""

        if not exits:
            raise TypeCheckError(f"unreachable statement '{stmt}'")

        stmt = replace(stmt, label=self.next_label)
        self.next_label += 1
        if isinstance(stmt, PtrAssign) and isinstance(stmt.rhs, Malloc):
            self.heap[stmt.label] = stmt.rhs.cell_type

        node = self.add(stmt)
        self.connect(exits, node)

        return node

    def body(self: Self, nodes: tuple[Node, ...],
             exits: list[Exit]) -> list[Exit]:
        for item in nodes:
            match item:
                case If(condition=cond, then_body=then, else_body=other):
                    c = self.statement(cond, exits)
                    exits = (self.body(then, [(c, True)]) +
                             self.body(other, [(c, False)]))
                case While(condition=cond, body=loop):
                    c = self.statement(cond, exits)
                    self.connect(self.body(loop, [(c, True)]), c)
                    exits = [(c, False)]
                case Return(value=value):
                    node = self.statement(value, exits)
                    self.connect([(node, None)], END_ID)
                    exits = []
                case Assign():
                    raise TypeCheckError(
                        f"aggregate assignment '{item}' was not normalized")
                case _:
                    exits = [(self.statement(item, exits), None)]

        return exits


def build_cfg(
    program: Program, types: TypeTable
) -> dict[str, Cfg]:
    """Build one CFG per procedure. Statements are labelled 1, 2, ... in
    source order across the whole program; conditions of `if`/`while` and
    returns are `Use` nodes of their own.

    Raises:
        TypeCheckError: On unreachable statements, duplicate labels or
            unnormalized aggregate assignments
    """

    cfgs: dict[str, Cfg] = {}
    label = 1
    for proc in program.procedures:
        builder = _Builder(label)
        builder.connect(builder.body(proc.body, [(START_ID, None)]), END_ID)
        label = builder.next_label

        graph = builder.graph
        reachable = nx.descendants(graph, START_ID) | {START_ID}
        unreachable = set(graph) - reachable
        if unreachable:
            node = min(unreachable, key=lambda n: (n == END_ID, n))
            raise TypeCheckError(
                f"unreachable statement '{graph.nodes[node]['stmt']}' in "
                f'{proc.name}')

        cfg = Cfg(proc.name, graph, types.scoped(proc.local_vars,
                                                 builder.heap))
        _logger.debug('built CFG for %s: %d nodes, %d edges, heap sites %s',
                      proc.name, graph.number_of_nodes(),
                      graph.number_of_edges(), cfg.heap_sites)
        cfgs[proc.name] = cfg

    return cfgs


def load_program(text: str) -> dict[str, Cfg]:
    """Parse, type check, normalize and build the CFGs of `text`."""

    types, program = typecheck(parse(text))
    return build_cfg(normalize(program, types), types)
