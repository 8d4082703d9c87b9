"""The points-to relation (pairs of pointer location and pointee) and the
helpers used for liveness sets.

A pair source may be `EVERYWHERE` (every pointer) and a pair target may be
`ANYTHING` (every target); such rows stand for the full universe without
enumerating it."""

from collections import defaultdict
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from functools import cached_property
from typing import Self

from lfcpa.data.locations import (
    ANYTHING, AccessPath, EVERYWHERE, Location, Target, render, sort_key
)
from lfcpa.locations import covered, overlaps


type Pair = tuple[Location, Target]
"""Type alias for one member of a points-to relation."""

type LivenessSet = frozenset[Location]
"""Type alias for Lin/Lout values: pointer locations, possibly including
`EVERYWHERE`."""

EMPTY_LIVENESS: LivenessSet = frozenset()


def pair_key(pair: Pair) -> tuple[str, str]:
    """Sort key for pairs."""

    return sort_key(pair[0]), sort_key(pair[1])


@dataclass(frozen=True)
class PointsToRelation:
    """An immutable set of (source, target) pairs."""

    pairs: frozenset[Pair] = field(default_factory=frozenset)
    "The members of the relation"

    @classmethod
    def of(cls: type[Self], pairs: Iterable[Pair]) -> Self:
        """Build a relation from any iterable of pairs."""

        return cls(frozenset(pairs))

    @classmethod
    def product(
        cls: type[Self], sources: Iterable[Location],
        targets: Iterable[Target]
    ) -> Self:
        """The cross product `sources` × `targets`."""

        targets = tuple(targets)
        return cls(frozenset((s, t) for s in sources for t in targets))

    def __iter__(self: Self) -> Iterator[Pair]:
        return iter(sorted(self.pairs, key=pair_key))

    def __len__(self: Self) -> int:
        return len(self.pairs)

    def __contains__(self: Self, pair: object) -> bool:
        return pair in self.pairs

    def __or__(self: Self, other: Self) -> Self:
        return PointsToRelation(self.pairs | other.pairs)

    def __le__(self: Self, other: Self) -> bool:
        return self.pairs <= other.pairs

    @cached_property
    def _by_root(self: Self) -> dict[object, list[Pair]]:
        """Pairs indexed by the root of their source."""

        index: dict[object, list[Pair]] = defaultdict(list)
        for pair in self.pairs:
            source = pair[0]
            index[source.root if isinstance(source, AccessPath)
                  else source].append(pair)

        return index

    def sources(self: Self) -> frozenset[Location]:
        """Every source that has at least one pair."""

        return frozenset(s for s, _ in self.pairs)

    def image(self: Self, source: Location) -> frozenset[Target]:
        """The targets of `source`: `A{σ}`. Stored sources are matched by
        overlap, so a pair for `q.⊥` answers a lookup of `q.3`; rows for
        `EVERYWHERE` answer every lookup, and looking up `EVERYWHERE` itself
        yields `ANYTHING`."""

        if source is EVERYWHERE:
            return frozenset({ANYTHING})

        found = {t for _, t in self._by_root.get(EVERYWHERE, ())}
        for src, tgt in self._by_root.get(source.root, ()):
            if overlaps(src, source):
                found.add(tgt)

        return frozenset(found)

    def without_sources(self: Self, kill: Iterable[Location]) -> Self:
        """Remove every pair whose source is structurally equal to a member
        of `kill` (the `Kill × T` subtraction)."""

        kill = frozenset(kill)
        if not kill:
            return self

        return PointsToRelation(
            frozenset(p for p in self.pairs if p[0] not in kill))

    def restrict(self: Self, live: Iterable[Location]) -> Self:
        """Keep the pairs whose source overlaps a live location. Rows for
        `EVERYWHERE` are spelled out over the (finite) live set unless
        `EVERYWHERE` is itself live."""

        live = frozenset(live)
        if EVERYWHERE in live:
            return self
        if not live:
            return PointsToRelation()

        kept: set[Pair] = set()
        for src, tgt in self.pairs:
            if src is EVERYWHERE:
                kept.update((loc, tgt) for loc in live)
            elif covered(src, live):
                kept.add((src, tgt))

        return PointsToRelation(frozenset(kept))

    def render(self: Self, ascii_only: bool = False) -> list[tuple[str, str]]:
        """The pairs as sorted rendered strings."""

        return [(render(s, ascii_only), render(t, ascii_only))
                for s, t in self]


def render_set(
    items: Iterable[Location | Target], ascii_only: bool = False
) -> list[str]:
    """Render and sort a set of locations or targets."""

    return sorted(render(i, ascii_only) for i in items)
