"""Data classes for analysis results: the extractor values of a statement,
the per-node fixpoint values, iteration snapshots and statistics."""

from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Self

from lfcpa.data.ir import Statement
from lfcpa.data.locations import Location, Target
from lfcpa.data.relations import (
    EMPTY_LIVENESS, LivenessSet, PointsToRelation
)


@dataclass(frozen=True)
class ExtractorResult:
    """Def, Kill, Ref and Pointee of one statement."""

    defs: frozenset[Location] = frozenset()
    "Locations possibly written"
    kills: frozenset[Location] = frozenset()
    "Locations definitely overwritten (never approximate names)"
    refs: frozenset[Location] = frozenset()
    "Pointer locations read"
    pointees: frozenset[Target] = frozenset()
    "Values possibly assigned"


EMPTY_EXTRACTORS = ExtractorResult()


@dataclass(frozen=True)
class NodeResult:
    """The fixpoint values at one CFG node."""

    node: int
    "The node id"
    stmt: Statement
    "The statement at the node"
    lin: LivenessSet = EMPTY_LIVENESS
    lout: LivenessSet = EMPTY_LIVENESS
    ain: PointsToRelation = field(default_factory=PointsToRelation)
    aout: PointsToRelation = field(default_factory=PointsToRelation)
    extractors: ExtractorResult = EMPTY_EXTRACTORS
    "Extractor values computed from `ain` and `lout`"


@dataclass(frozen=True)
class Snapshot:
    """The state of every node after one solver phase."""

    round: int
    "1-based round number"
    phase: str
    "Either 'liveness' or 'pointsto'"
    lin: Mapping[int, LivenessSet]
    lout: Mapping[int, LivenessSet]
    ain: Mapping[int, PointsToRelation]
    aout: Mapping[int, PointsToRelation]


@dataclass(frozen=True)
class AnalysisStats:
    """Iteration counts of one solver run."""

    rounds: int = 0
    "Liveness-then-points-to rounds, including the final no-op round"
    liveness_steps: int = 0
    "Node evaluations in the liveness phases"
    pointsto_steps: int = 0
    "Node evaluations in the points-to phases"

    @property
    def steps(self: Self) -> int:
        """All node evaluations."""

        return self.liveness_steps + self.pointsto_steps


@dataclass(frozen=True)
class AnalysisResult:
    """The fixpoint of one procedure."""

    procedure: str
    "The procedure name"
    mode: str
    "Either 'lfcpa' or 'baseline'"
    nodes: Mapping[int, NodeResult]
    "Results by node id, in report order"
    stats: AnalysisStats = AnalysisStats()
    snapshots: tuple[Snapshot, ...] = ()
    "Per-phase snapshots, when requested"

    def __getitem__(self: Self, node: int) -> NodeResult:
        return self.nodes[node]

    def __iter__(self):
        return iter(self.nodes.values())

    def pair_count(self: Self, node: int) -> int:
        """Number of pairs in the node's `ain` and `aout` together."""

        result = self.nodes[node]
        return len(result.ain) + len(result.aout)
