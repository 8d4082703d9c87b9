"""A direct implementation of liveness-based points-to analysis for programs
whose pointers are all scalar variables. Locations are plain variable names
and `?` is the unknown pointee. It shares no evaluation code with the
general engine and serves as the reference it must agree with on such
programs."""

from collections.abc import Mapping
from dataclasses import dataclass
import logging
from typing import Self

from lfcpa.cfg import Cfg
from lfcpa.data.ir import (
    AddrOf, Deref, END_ID, End, Other, PtrAssign, START_ID, Start, Statement,
    Use, VarRef
)
from lfcpa.data.types import PointerType

_logger = logging.getLogger(__name__)

UNKNOWN_NAME = '?'

type Pairs = frozenset[tuple[str, str]]
"""Type alias for a points-to relation over names."""


@dataclass(frozen=True)
class ScalarStmt:
    """A statement reduced to its kind and the variables it mentions."""

    kind: str
    "One of 'addr', 'copy', 'load', 'store', 'use' or 'other'"
    lhs: str | None = None
    rhs: str | None = None
    used: tuple[str, ...] = ()


@dataclass(frozen=True)
class ScalarValues:
    """Lin, Lout, Ain and Aout of one node."""

    lin: frozenset[str]
    lout: frozenset[str]
    ain: Pairs
    aout: Pairs


def classify(stmt: Statement) -> ScalarStmt:
    """Reduce an IR statement to its scalar form.

    Raises:
        ValueError: For statements that involve more than scalar pointers
    """

    match stmt:
        case PtrAssign(lhs=VarRef(name=x), rhs=AddrOf(base=VarRef(name=a))):
            return ScalarStmt('addr', x, a)
        case PtrAssign(lhs=VarRef(name=x), rhs=VarRef(name=y)):
            return ScalarStmt('copy', x, y)
        case PtrAssign(lhs=VarRef(name=x), rhs=Deref(base=VarRef(name=y))):
            return ScalarStmt('load', x, y)
        case PtrAssign(lhs=Deref(base=VarRef(name=x)), rhs=VarRef(name=y)):
            return ScalarStmt('store', x, y)
        case Use(exprs=exprs) if all(isinstance(e, VarRef) for e in exprs):
            return ScalarStmt('use', used=tuple(e.name for e in exprs))
        case Other() | Start() | End():
            return ScalarStmt('other')

    raise ValueError(f"'{stmt}' is not a scalar pointer statement")


def image(pairs: Pairs, x: str) -> frozenset[str]:
    """`A{x}`"""

    return frozenset(t for s, t in pairs if s == x)


class ScalarAnalysis:
    """Round-robin solution of the four equations over variable names."""

    def __init__(self: Self, cfg: Cfg) -> None:
        self.cfg = cfg
        self.stmts = {n: classify(s) for n, s in cfg.statements()}
        self.variables = frozenset(cfg.types.variables)
        self.pointers = frozenset(
            name for name, ctype in cfg.types.variables.items()
            if isinstance(ctype, PointerType))

    def must(self: Self, pairs: Pairs, x: str) -> frozenset[str]:
        """`Must(A){x}`: every variable when `x` points nowhere known, its
        single pointee when there is one, nothing otherwise."""

        targets = image(pairs, x)
        if not targets or targets == {UNKNOWN_NAME}:
            return self.variables
        if len(targets) == 1 and UNKNOWN_NAME not in targets:
            return targets

        return frozenset()

    def extractors(self: Self, node: int, ain: Pairs,
                   lout: frozenset[str]) -> tuple[frozenset[str], ...]:
        """(Def, Kill, Ref, Pointee) of a node."""

        stmt = self.stmts[node]
        empty: frozenset[str] = frozenset()
        x, y = stmt.lhs, stmt.rhs
        match stmt.kind:
            case 'addr':
                return {x}, {x}, empty, {y}
            case 'copy':
                ref = {y} if x in lout else empty
                return {x}, {x}, ref, image(ain, y)
            case 'load':
                targets = image(ain, y) & self.pointers
                ref = {y} | targets if x in lout else empty
                pointee = frozenset().union(
                    *(image(ain, t) for t in targets))
                return {x}, {x}, ref, pointee
            case 'store':
                defs = image(ain, x) & self.pointers
                ref = {x, y} if defs & lout else {x}
                return (defs, self.must(ain, x) & self.pointers, ref,
                        image(ain, y))
            case 'use':
                return empty, empty, frozenset(stmt.used), empty

        return empty, empty, empty, empty

    def run(self: Self) -> dict[int, ScalarValues]:
        """Iterate over all nodes until nothing changes."""

        nodes = self.cfg.order()
        lin = {n: frozenset() for n in nodes}
        lout = {n: frozenset() for n in nodes}
        ain: dict[int, Pairs] = {n: frozenset() for n in nodes}
        aout: dict[int, Pairs] = {n: frozenset() for n in nodes}

        sweeps = 0
        changed = True
        while changed:
            changed = False
            sweeps += 1
            for n in nodes:
                new_lout = frozenset() if n == END_ID else frozenset().union(
                    *(lin[s] for s in self.cfg.successors(n)))
                _, kill, ref, _ = self.extractors(n, ain[n], new_lout)
                new_lin = (new_lout - kill) | ref

                if n == START_ID:
                    new_ain = frozenset((p, UNKNOWN_NAME) for p in new_lin)
                else:
                    joined = frozenset().union(
                        *(aout[p] for p in self.cfg.predecessors(n)))
                    new_ain = frozenset(
                        (s, t) for s, t in joined if s in new_lin)

                defs, kill, _, pointee = self.extractors(n, new_ain,
                                                         new_lout)
                kept = {(s, t) for s, t in new_ain if s not in kill}
                generated = {(d, t) for d in defs for t in pointee}
                new_aout = frozenset(
                    (s, t) for s, t in kept | generated if s in new_lout)

                if (new_lin, new_lout, new_ain, new_aout) != (
                        lin[n], lout[n], ain[n], aout[n]):
                    changed = True
                    lin[n], lout[n] = new_lin, new_lout
                    ain[n], aout[n] = new_ain, new_aout

        _logger.debug('scalar analysis of %s stable after %d sweeps',
                      self.cfg.name, sweeps)
        return {n: ScalarValues(lin[n], lout[n], ain[n], aout[n])
                for n in nodes}


def analyze_scalar(cfg: Cfg) -> Mapping[int, ScalarValues]:
    """Run the scalar analysis on one procedure.

    Raises:
        ValueError: If the procedure has non-scalar pointer statements
    """

    return ScalarAnalysis(cfg).run()
