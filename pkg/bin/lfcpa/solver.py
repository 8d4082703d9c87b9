"""The coupled liveness / points-to fixpoint.

Each round runs a backward liveness phase to its fixpoint and then a forward
points-to phase to its fixpoint; rounds repeat until one changes nothing.
Liveness reads the points-to values of the previous phase (through Kill and
Ref) and points-to reads liveness (through restriction), so the two refine
each other. The baseline mode fixes every liveness set to all pointer
locations and runs only the points-to phase."""

from collections import deque
from collections.abc import Iterable
import logging
from typing import Self

from lfcpa.cfg import Cfg
from lfcpa.data.ir import END_ID, START_ID
from lfcpa.data.locations import UNKNOWN
from lfcpa.data.relations import (
    EMPTY_LIVENESS, LivenessSet, PointsToRelation
)
from lfcpa.data.results import (
    AnalysisResult, AnalysisStats, ExtractorResult, NodeResult, Snapshot
)
from lfcpa.data.types import TypeTable
from lfcpa.errors import AnalysisError
from lfcpa.extract import extract
from lfcpa.locations import covered

_logger = logging.getLogger(__name__)

MODES = ('lfcpa', 'baseline')
ORDERS = ('rpo', 'reversed')

# Multiplier on the lattice-height estimate used by the iteration guard
GUARD_FACTOR = 4


def restrict(relation: PointsToRelation, live: Iterable) -> PointsToRelation:
    """`A|L`: the pairs of `relation` whose source overlaps a member of
    `live`."""

    return relation.restrict(live)


class _Solver:
    """Mutable state of one fixpoint computation."""

    def __init__(
        self: Self, cfg: Cfg, types: TypeTable, mode: str, order: str,
        trace: bool
    ) -> None:
        self.cfg = cfg
        self.types = types
        self.mode = mode
        self.trace = trace

        nodes = cfg.order()
        self.lin: dict[int, LivenessSet] = dict.fromkeys(nodes,
                                                         EMPTY_LIVENESS)
        self.lout: dict[int, LivenessSet] = dict.fromkeys(nodes,
                                                          EMPTY_LIVENESS)
        self.ain = {n: PointsToRelation() for n in nodes}
        self.aout = {n: PointsToRelation() for n in nodes}

        self.backward = cfg.postorder()
        self.forward = cfg.reverse_postorder()
        if order == 'reversed':
            self.backward.reverse()
            self.forward.reverse()

        self.liveness_steps = 0
        self.pointsto_steps = 0
        self.snapshots: list[Snapshot] = []

        pointers = types.pointer_location_count + len(types.heap) + 2
        self.limit = GUARD_FACTOR * len(nodes) * (
            pointers + pointers * pointers)

        if mode == 'baseline':
            everything = frozenset(types.pointer_locations)
            for n in nodes:
                self.lin[n] = everything
                self.lout[n] = everything

    def guard(self: Self) -> None:
        if self.liveness_steps + self.pointsto_steps > self.limit:
            raise AnalysisError(
                f'no fixpoint for {self.cfg.name} after {self.limit} '
                'node evaluations')

    def extractors(self: Self, node: int) -> ExtractorResult:
        return extract(self.cfg.statement(node), self.ain[node],
                       self.lout[node], self.types)

    # Equations

    def lout_of(self: Self, node: int) -> LivenessSet:
        if node == END_ID:
            return EMPTY_LIVENESS

        live: set = set()
        for succ in self.cfg.successors(node):
            live |= self.lin[succ]

        return frozenset(live)

    def lin_of(self: Self, node: int) -> LivenessSet:
        ext = self.extractors(node)
        return (self.lout[node] - ext.kills) | ext.refs

    def ain_of(self: Self, node: int) -> PointsToRelation:
        if node == START_ID:
            return PointsToRelation.product(self.lin[node], (UNKNOWN,))

        joined = PointsToRelation()
        for pred in self.cfg.predecessors(node):
            joined |= self.aout[pred]

        return joined.restrict(self.lin[node])

    def aout_of(self: Self, node: int) -> PointsToRelation:
        ext = self.extractors(node)
        generated = PointsToRelation.product(ext.defs, ext.pointees)
        return (self.ain[node].without_sources(ext.kills) |
                generated).restrict(self.lout[node])

    # Phases

    def liveness_phase(self: Self) -> bool:
        """Run the backward phase to its fixpoint; True if anything
        changed."""

        changed = False
        work = deque(self.backward)
        queued = set(work)
        while work:
            node = work.popleft()
            queued.discard(node)
            self.liveness_steps += 1
            self.guard()

            lout = self.lout[node] | self.lout_of(node)
            if lout != self.lout[node]:
                self.lout[node] = lout
                changed = True
            lin = self.lin[node] | self.lin_of(node)
            if lin != self.lin[node]:
                self.lin[node] = lin
                changed = True
                for pred in self.cfg.predecessors(node):
                    if pred not in queued:
                        work.append(pred)
                        queued.add(pred)

        return changed

    def pointsto_phase(self: Self) -> bool:
        """Run the forward phase to its fixpoint; True if anything
        changed."""

        changed = False
        work = deque(self.forward)
        queued = set(work)
        while work:
            node = work.popleft()
            queued.discard(node)
            self.pointsto_steps += 1
            self.guard()

            ain = self.ain[node] | self.ain_of(node)
            if ain != self.ain[node]:
                self.ain[node] = ain
                changed = True
            aout = self.aout[node] | self.aout_of(node)
            if aout != self.aout[node]:
                self.aout[node] = aout
                changed = True
                for succ in self.cfg.successors(node):
                    if succ not in queued:
                        work.append(succ)
                        queued.add(succ)

        return changed

    def snapshot(self: Self, round_number: int, phase: str) -> None:
        if self.trace:
            self.snapshots.append(Snapshot(
                round_number, phase, dict(self.lin), dict(self.lout),
                dict(self.ain), dict(self.aout)))

    def run(self: Self) -> AnalysisResult:
        rounds = 0
        while True:
            rounds += 1
            changed = False
            if self.mode == 'lfcpa':
                changed |= self.liveness_phase()
                self.snapshot(rounds, 'liveness')
            changed |= self.pointsto_phase()
            self.snapshot(rounds, 'pointsto')
            _logger.debug('%s round %d: %d liveness and %d points-to steps '
                          'so far%s', self.cfg.name, rounds,
                          self.liveness_steps, self.pointsto_steps,
                          '' if changed else ' (stable)')
            if not changed:
                break

        nodes = {
            n: NodeResult(n, self.cfg.statement(n), self.lin[n],
                          self.lout[n], self.ain[n], self.aout[n],
                          self.extractors(n))
            for n in self.cfg.order()
        }
        stats = AnalysisStats(rounds, self.liveness_steps,
                              self.pointsto_steps)
        _logger.info('%s (%s): fixpoint after %d rounds, %d node '
                     'evaluations', self.cfg.name, self.mode, rounds,
                     stats.steps)

        return AnalysisResult(self.cfg.name, self.mode, nodes, stats,
                              tuple(self.snapshots))


def solve(
    cfg: Cfg, types: TypeTable | None = None, mode: str = 'lfcpa', *,
    order: str = 'rpo', trace: bool = False
) -> AnalysisResult:
    """Compute the fixpoint of one procedure.

    Args:
        cfg: The procedure's CFG
        types: The type table; defaults to the CFG's scoped table
        mode: 'lfcpa', or 'baseline' for all pointers live everywhere
        order: Worklist order, 'rpo' or 'reversed'; results do not depend
            on it
        trace: Keep a snapshot of every node after each phase

    Raises:
        ValueError: On an unknown mode or order
        AnalysisError: When the iteration guard trips
    """

    if mode not in MODES:
        raise ValueError(f"Unknown mode '{mode}'")
    if order not in ORDERS:
        raise ValueError(f"Unknown worklist order '{order}'")

    return _Solver(cfg, types or cfg.types, mode, order, trace).run()


def verify_fixpoint(
    cfg: Cfg, result: AnalysisResult, types: TypeTable | None = None
) -> list[str]:
    """Re-apply every equation to `result` and list the values it does not
    already contain, together with violations of the restriction
    invariants. Values are joined with their previous contents while
    solving, so an empty list means `result` is closed under every
    equation."""

    solver = _Solver(cfg, types or cfg.types, result.mode, 'rpo', False)
    for n, node in result.nodes.items():
        solver.lin[n], solver.lout[n] = node.lin, node.lout
        solver.ain[n], solver.aout[n] = node.ain, node.aout

    problems: list[str] = []

    def check(node: int, name: str, stored, recomputed) -> None:
        if not recomputed <= stored:
            problems.append(f'node {node}: {name} is not stable')

    for n, node in result.nodes.items():
        if result.mode == 'lfcpa':
            check(n, 'Lout', node.lout, solver.lout_of(n))
            check(n, 'Lin', node.lin, solver.lin_of(n))
        check(n, 'Ain', node.ain, solver.ain_of(n))
        check(n, 'Aout', node.aout, solver.aout_of(n))

        if not all(covered(s, node.lin) for s in node.ain.sources()):
            problems.append(f'node {n}: Ain has a source outside Lin')
        if not all(covered(s, node.lout) for s in node.aout.sources()):
            problems.append(f'node {n}: Aout has a source outside Lout')

    return problems
