"""The extractor functions of a statement: Def, Kill, Ref and Pointee."""

from collections.abc import Iterable
import logging

from lfcpa.data.ir import PtrAssign, Statement, Use
from lfcpa.data.locations import EVERYWHERE, Location
from lfcpa.data.relations import LivenessSet, PointsToRelation
from lfcpa.data.results import EMPTY_EXTRACTORS, ExtractorResult
from lfcpa.data.types import TypeTable
from lfcpa.evaluation import Evaluator, MustRelation, is_pointer_cell
from lfcpa.locations import covered, is_approx

_logger = logging.getLogger(__name__)


def pointer_cells(
    locations: Iterable[Location], types: TypeTable
) -> frozenset[Location]:
    """Spell out aggregates into the pointer cells they contain; pointers and
    `EVERYWHERE` are kept as they are."""

    cells: set[Location] = set()
    for loc in locations:
        if is_pointer_cell(loc, types):
            cells.add(loc)
            continue
        try:
            cells.update(types.pointer_cells(loc))
        except ValueError:
            _logger.debug('ignoring untypable read of %s', loc)

    return frozenset(cells)


def kill_set(
    locations: Iterable[Location], types: TypeTable
) -> frozenset[Location]:
    """The strongly updatable members of `locations`. `EVERYWHERE` stands
    for every non-approximate pointer location in scope."""

    locations = frozenset(locations)
    if EVERYWHERE in locations:
        locations = types.pointer_locations

    return frozenset(loc for loc in locations
                     if is_pointer_cell(loc, types) and
                     not is_approx(loc, types))


def extract(
    stmt: Statement, relation: PointsToRelation, lout: LivenessSet,
    types: TypeTable
) -> ExtractorResult:
    """Compute the extractors of `stmt` from its `Ain` and `Lout`.

    The right-hand side of a pointer assignment is only read when some
    location it may define is live afterwards.
    """

    match stmt:
        case PtrAssign(lhs=lhs, rhs=rhs):
            ev = Evaluator(relation, types, stmt)
            defs = frozenset(loc for loc in ev.lval(lhs)
                             if is_pointer_cell(loc, types))
            kills = kill_set(
                Evaluator(MustRelation(relation, types), types,
                          stmt).lval(lhs), types)

            refs = ev.deref(lhs)
            if any(covered(loc, lout) for loc in defs):
                refs |= ev.ref(rhs)

            return ExtractorResult(defs, kills, pointer_cells(refs, types),
                                   ev.rval(rhs))

        case Use(exprs=exprs):
            ev = Evaluator(relation, types, stmt)
            refs: set[Location] = set()
            for expr in exprs:
                refs |= ev.ref(expr)

            return ExtractorResult(refs=pointer_cells(refs, types))

    return EMPTY_EXTRACTORS
