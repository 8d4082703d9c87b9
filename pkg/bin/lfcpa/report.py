"""Rendering of analysis results as text tables and JSON-ready documents.
Every set is sorted by the canonical rendering of its members, so output is
identical from run to run."""

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any, Self

from lfcpa.data.locations import Location, Target
from lfcpa.data.relations import PointsToRelation, render_set
from lfcpa.data.results import AnalysisResult, NodeResult, Snapshot
from lfcpa.oracle import Cell, Trace, Value, Violation

EMPTY_SET = '∅'
EMPTY_SET_ASCII = '{}'

COLUMNS = {
    'liveness': ('lin', 'lout'),
    'pointsto': ('ain', 'aout'),
    'extractors': ('def', 'kill', 'ref', 'pointee'),
}


def format_set(
    items: Iterable[Location | Target], ascii_only: bool = False
) -> str:
    """`{a, b}`, or the empty-set sign."""

    rendered = render_set(items, ascii_only)
    if not rendered:
        return EMPTY_SET_ASCII if ascii_only else EMPTY_SET

    return '{' + ', '.join(rendered) + '}'


def format_pairs(relation: PointsToRelation, ascii_only: bool = False) -> str:
    """`{(s,t), ...}`, or the empty-set sign."""

    if not relation:
        return EMPTY_SET_ASCII if ascii_only else EMPTY_SET

    pairs = (f'({s},{t})' for s, t in relation.render(ascii_only))
    return '{' + ', '.join(pairs) + '}'


def cell_text(node: NodeResult, column: str, ascii_only: bool) -> str:
    """The text of one table cell."""

    ext = node.extractors
    match column:
        case 'lin':
            return format_set(node.lin, ascii_only)
        case 'lout':
            return format_set(node.lout, ascii_only)
        case 'ain':
            return format_pairs(node.ain, ascii_only)
        case 'aout':
            return format_pairs(node.aout, ascii_only)
        case 'def':
            return format_set(ext.defs, ascii_only)
        case 'kill':
            return format_set(ext.kills, ascii_only)
        case 'ref':
            return format_set(ext.refs, ascii_only)
        case 'pointee':
            return format_set(ext.pointees, ascii_only)

    raise ValueError(f"Unknown column '{column}'")


def table(header: Sequence[str], rows: Iterable[Sequence[str]]) -> list[str]:
    """Lay out rows in left-aligned columns separated by two spaces."""

    rows = [list(map(str, r)) for r in rows]
    widths = [len(h) for h in header]
    for row in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]

    def line(cells: Sequence[str]) -> str:
        return '  '.join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    return [line(header), line(['-' * w for w in widths]),
            *(line(r) for r in rows)]


def result_columns(dumps: Iterable[str]) -> list[str]:
    """The table columns selected by `dumps`."""

    columns: list[str] = []
    for dump in dumps:
        columns.extend(COLUMNS.get(dump, ()))

    return columns


def result_table(
    result: AnalysisResult, dumps: Iterable[str], ascii_only: bool = False
) -> list[str]:
    """The per-node table of one result, with a heading line."""

    columns = result_columns(dumps)
    lines = [f'procedure {result.procedure} ({result.mode})']
    if not columns:
        return lines

    rows = ([str(n.node), str(n.stmt),
             *(cell_text(n, c, ascii_only) for c in columns)]
            for n in result)
    return lines + table(['id', 'stmt', *columns], rows)


def snapshot_lines(
    snapshot: Snapshot, order: Sequence[int], ascii_only: bool = False
) -> list[str]:
    """One phase snapshot as a table."""

    if snapshot.phase == 'liveness':
        header = ['id', 'lin', 'lout']
        rows = ([str(n), format_set(snapshot.lin[n], ascii_only),
                 format_set(snapshot.lout[n], ascii_only)] for n in order)
    else:
        header = ['id', 'ain', 'aout']
        rows = ([str(n), format_pairs(snapshot.ain[n], ascii_only),
                 format_pairs(snapshot.aout[n], ascii_only)] for n in order)

    return [f'round {snapshot.round} {snapshot.phase}', *table(header, rows)]


@dataclass(frozen=True)
class ModeDelta:
    """Pair counts of one node under both modes."""

    node: int
    lfcpa: int
    baseline: int

    @property
    def baseline_larger(self: Self) -> bool:
        """True if the baseline holds strictly more pairs."""

        return self.baseline > self.lfcpa


def compare_modes(
    lfcpa: AnalysisResult, baseline: AnalysisResult
) -> list[ModeDelta]:
    """Per-node pair counts (Ain plus Aout) of the two modes.

    Raises:
        ValueError: If the results are for different procedures
    """

    if lfcpa.procedure != baseline.procedure:
        raise ValueError(f'Cannot compare {lfcpa.procedure} with '
                         f'{baseline.procedure}')

    return [ModeDelta(n, lfcpa.pair_count(n), baseline.pair_count(n))
            for n in lfcpa.nodes]


def comparison_lines(deltas: Sequence[ModeDelta]) -> list[str]:
    """The mode comparison as a table with a summary line."""

    rows = ([str(d.node), str(d.lfcpa), str(d.baseline),
             '*' if d.baseline_larger else ''] for d in deltas)
    larger = sum(d.baseline_larger for d in deltas)

    return ['pairs per node (ain + aout)',
            *table(['id', 'lfcpa', 'baseline', 'more'], rows),
            f'baseline holds more pairs at {larger} node(s)']


def trace_lines(trace: Trace, violations: Sequence[Violation]) -> list[str]:
    """A concrete trace and its soundness check."""

    lines = [f'trace of {trace.procedure}']
    for point in trace.points:
        state = ', '.join(f'{c} -> {v}'
                          for c, v in concrete_state(point.state).items())
        live = ', '.join(sorted(str(c.abstract()) for c in point.live))
        lines.append(f'  node {point.node}: state {{{state}}} '
                     f'live {{{live}}}')

    if trace.halted:
        lines.append(f'  halted: {trace.halted}')
    if trace.exhausted:
        lines.append('  stopped: out of fuel')

    lines.append(f'soundness: {len(violations)} violation(s)')
    lines.extend(f'  {v}' for v in violations)
    return lines


# JSON documents

def node_document(node: NodeResult, ascii_only: bool = False) -> dict:
    """One node as a JSON object."""

    ext = node.extractors
    return {
        'id': node.node,
        'stmt': str(node.stmt),
        'lin': render_set(node.lin, ascii_only),
        'lout': render_set(node.lout, ascii_only),
        'ain': [list(p) for p in node.ain.render(ascii_only)],
        'aout': [list(p) for p in node.aout.render(ascii_only)],
        'def': render_set(ext.defs, ascii_only),
        'kill': render_set(ext.kills, ascii_only),
        'ref': render_set(ext.refs, ascii_only),
        'pointee': render_set(ext.pointees, ascii_only),
    }


def result_document(
    result: AnalysisResult, ascii_only: bool = False
) -> dict[str, Any]:
    """One result as a JSON object."""

    document: dict[str, Any] = {
        'procedure': result.procedure,
        'mode': result.mode,
        'nodes': [node_document(n, ascii_only) for n in result],
        'stats': {
            'rounds': result.stats.rounds,
            'liveness_steps': result.stats.liveness_steps,
            'pointsto_steps': result.stats.pointsto_steps,
        },
    }
    if result.snapshots:
        document['snapshots'] = [
            {
                'round': s.round,
                'phase': s.phase,
                'nodes': [
                    {
                        'id': n,
                        'lin': render_set(s.lin[n], ascii_only),
                        'lout': render_set(s.lout[n], ascii_only),
                        'ain': [list(p) for p in s.ain[n].render(ascii_only)],
                        'aout': [list(p)
                                 for p in s.aout[n].render(ascii_only)],
                    }
                    for n in result.nodes
                ],
            }
            for s in result.snapshots
        ]

    return document


def trace_document(
    trace: Trace, violations: Sequence[Violation]
) -> dict[str, Any]:
    """A trace and its soundness check as a JSON object."""

    return {
        'procedure': trace.procedure,
        'halted': trace.halted,
        'exhausted': trace.exhausted,
        'points': [
            {
                'node': p.node,
                'state': concrete_state(p.state),
                'live': sorted(str(c.abstract()) for c in p.live),
            }
            for p in trace.points
        ],
        'final_state': concrete_state(trace.final_state),
        'violations': [str(v) for v in violations],
    }


def concrete_state(state: Mapping[Cell, Value]) -> dict[str, str]:
    """Concrete cells and values as sorted text; `?` marks an
    uninitialized pointer."""

    return {str(c): '?' if v is None else str(v)
            for c, v in sorted(state.items(), key=lambda i: str(i[0]))}
