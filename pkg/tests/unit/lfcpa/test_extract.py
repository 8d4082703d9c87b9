# pylint: disable=missing-function-docstring, missing-class-docstring, invalid-name, no-member, import-error, line-too-long

"""Unit tests for lfcpa.extract module."""

from lfcpa.data.ir import Other  # pyright: ignore[reportMissingImports]
from lfcpa.data.locations import EVERYWHERE  # pyright: ignore[reportMissingImports]
from lfcpa.data.relations import PointsToRelation  # pyright: ignore[reportMissingImports]
from lfcpa.data.results import EMPTY_EXTRACTORS  # pyright: ignore[reportMissingImports]
from lfcpa.extract import extract, kill_set, pointer_cells  # pyright: ignore[reportMissingImports]

import pytest  # pyright: ignore[reportMissingImports]

from tests.helpers import (
    HEAP_RELATION, expressions, fixture_text, load_cfg, names, paths,
    relation
)

STORE_PROGRAM = '''\
int main() {
    int a;
    int *p, *q;
    int **pp;

    *pp = p;
}
'''

# Node: (Ain, Lout) at the fixpoint of the heap struct program
HEAP_STATES = {
    1: (relation(('o1.g.f', '?')), paths('a', 'o1.g.f')),
    2: (relation(('a', 'o1'), ('o1.g.f', '?')), paths('y', 'o1.g.f')),
    3: (relation(('y', 'o1.g'), ('o1.g.f', '?')), paths('b.f', 'o1.g.f')),
    4: (relation(('b.f', 'o1.g'), ('o1.g.f', '?')),
        paths('x', 'b.f', 'o1.g.f')),
    5: (HEAP_RELATION.restrict(paths('x', 'b.f', 'o1.g.f')), paths()),
}

# Node: (def, kill, ref, pointee)
HEAP_EXTRACTORS = {
    1: ({'a'}, {'a'}, set(), {'o1'}),
    2: ({'y'}, {'y'}, {'a'}, {'o1.g'}),
    3: ({'b.f'}, {'b.f'}, {'y'}, {'o1.g'}),
    4: ({'x'}, {'x'}, set(), {'b'}),
    5: (set(), set(), {'x', 'b.f', 'o1.g.f'}, set()),
}


def extracted(cfg, node, ain, lout):
    result = extract(cfg.statement(node), ain, lout, cfg.types)
    return (names(result.defs), names(result.kills), names(result.refs),
            names(result.pointees))


class TestHeapStructExtractors:
    """Extractors of every statement of the heap struct program."""

    @pytest.mark.solver
    @pytest.mark.parametrize('node', list(HEAP_EXTRACTORS))
    def test_statement(self, heap_struct_cfg, node):
        ain, lout = HEAP_STATES[node]

        assert extracted(heap_struct_cfg, node, ain, lout) == (
            HEAP_EXTRACTORS[node])

    @pytest.mark.solver
    def test_dead_assignment_reads_only_the_address(self, heap_struct_cfg):
        ain, _ = HEAP_STATES[3]

        assert extracted(heap_struct_cfg, 3, ain, paths('o1.g.f')) == (
            {'b.f'}, {'b.f'}, set(), {'o1.g'})

    @pytest.mark.solver
    def test_dead_address_of_reads_nothing(self, heap_struct_cfg):
        ain, _ = HEAP_STATES[2]

        assert extracted(heap_struct_cfg, 2, ain, paths())[2] == set()

    @pytest.mark.solver
    def test_fixed_nodes(self, heap_struct_cfg):
        for node in (0, -1):
            result = extract(heap_struct_cfg.statement(node), HEAP_RELATION,
                             paths('x'), heap_struct_cfg.types)
            assert result == EMPTY_EXTRACTORS

    @pytest.mark.solver
    def test_other_statement(self, heap_struct_cfg):
        result = extract(Other(), HEAP_RELATION, paths('x'),
                         heap_struct_cfg.types)

        assert result == EMPTY_EXTRACTORS


class TestIndirectStores:
    """Stores through pointers with zero, one or several targets."""

    @pytest.fixture
    def store_cfg(self):
        return load_cfg(STORE_PROGRAM)

    @pytest.mark.solver
    def test_unknown_target_kills_every_pointer(self, store_cfg):
        ain = relation(('pp', '?'))

        assert extracted(store_cfg, 1, ain, paths('p', 'q')) == (
            set(), {'p', 'q', 'pp'}, {'pp'}, set())

    @pytest.mark.solver
    def test_single_target_is_a_strong_update(self, store_cfg):
        ain = relation(('pp', 'q'), ('p', 'a'))

        assert extracted(store_cfg, 1, ain, paths('q')) == (
            {'q'}, {'q'}, {'pp', 'p'}, {'a'})

    @pytest.mark.solver
    def test_several_targets_kill_nothing(self, store_cfg):
        ain = relation(('pp', 'q'), ('pp', 'p'), ('p', 'a'))

        assert extracted(store_cfg, 1, ain, paths('p')) == (
            {'p', 'q'}, set(), {'pp', 'p'}, {'a'})


class TestAggregateReads:
    """Reads of whole aggregates are spelled out into their cells."""

    @pytest.mark.solver
    def test_use_of_struct(self):
        source = fixture_text('heap_struct.mc').replace(
            '    return x->f->f;\n', '    use(*a);\n')
        cfg = load_cfg(source)
        result = extract(cfg.statement(5), HEAP_RELATION, paths(), cfg.types)

        assert names(result.refs) == {'a', 'o1.g.f'}

    @pytest.mark.solver
    def test_use_joins_every_expression(self):
        source = fixture_text('heap_struct.mc').replace(
            '    return x->f->f;\n', '    use(x, y->f);\n')
        cfg = load_cfg(source)
        result = extract(cfg.statement(5), HEAP_RELATION, paths(), cfg.types)

        assert names(result.refs) == {'x', 'y', 'o1.g.f'}


class TestHelpers:
    """Tests for pointer_cells and kill_set."""

    @pytest.mark.solver
    def test_pointer_cells(self, heap_struct_cfg):
        found = pointer_cells(paths('b', 'x', 'zz') | {EVERYWHERE},
                              heap_struct_cfg.types)

        assert found == paths('b.f', 'x') | {EVERYWHERE}

    @pytest.mark.solver
    def test_kill_set_expands_everywhere(self, heap_struct_cfg):
        assert kill_set([EVERYWHERE], heap_struct_cfg.types) == paths(
            'a', 'x', 'y', 'b.f')

    @pytest.mark.solver
    def test_kill_set_drops_approximate_names(self):
        _, types = expressions(fixture_text('array_arith.mc'), 's')

        assert kill_set(paths('q.⊥', 'q.3', 'p'), types) == paths('q.3')

    @pytest.mark.solver
    def test_empty_relation(self, heap_struct_cfg):
        result = extract(heap_struct_cfg.statement(5), PointsToRelation(),
                         paths(), heap_struct_cfg.types)

        assert names(result.refs) == {'x'}
