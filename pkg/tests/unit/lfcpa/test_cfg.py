# pylint: disable=missing-function-docstring, missing-class-docstring, invalid-name, no-member, import-error, line-too-long

"""Unit tests for lfcpa.cfg module."""

from lfcpa.cfg import closure_expand, load_program, normalize  # pyright: ignore[reportMissingImports]
from lfcpa.data.ir import (  # pyright: ignore[reportMissingImports]
    AddrOf, Malloc, Other, Procedure, Program, PtrAssign, Use, VarRef
)
from lfcpa.data.types import TypeTable  # pyright: ignore[reportMissingImports]
from lfcpa.errors import TypeCheckError  # pyright: ignore[reportMissingImports]
from lfcpa.parser import parse  # pyright: ignore[reportMissingImports]
from lfcpa.typecheck import typecheck  # pyright: ignore[reportMissingImports]

import pytest  # pyright: ignore[reportMissingImports]

from tests.helpers import fixture_text, load_cfg

PAIR_PROGRAM = '''\
struct pair { int *a; int n; int *b[2]; };

int main() {
    struct pair x, y;
    x = y;
}
'''


@pytest.fixture
def loop_cfg():
    return load_cfg(fixture_text('loop_list.mc'))


class TestCfgShape:
    """Tests for the layout of the graph."""

    @pytest.mark.cfg
    def test_straight_line(self, heap_struct_cfg):
        cfg = heap_struct_cfg

        assert len(cfg) == 7
        assert cfg.order() == [0, 1, 2, 3, 4, 5, -1]
        assert [cfg.successors(n) for n in cfg.order()[:-1]] == [
            [1], [2], [3], [4], [5], [-1]]
        assert cfg.predecessors(-1) == [5]

    @pytest.mark.cfg
    def test_statements_in_report_order(self, heap_struct_cfg):
        texts = [str(s) for _, s in heap_struct_cfg.statements()]

        assert texts == ['start', 'a = malloc(sizeof(struct A))',
                         'y = &a->g', 'b.f = y', 'x = &b',
                         'return x->f->f', 'end']

    @pytest.mark.cfg
    def test_allocation_sites(self, heap_struct_cfg):
        assert heap_struct_cfg.heap_sites == [1]
        assert isinstance(heap_struct_cfg.statement(1).rhs, Malloc)

    @pytest.mark.cfg
    def test_empty_procedure(self, empty_cfg):
        assert empty_cfg.order() == [0, -1]
        assert empty_cfg.successors(0) == [-1]
        assert 0 in empty_cfg
        assert 1 not in empty_cfg

    @pytest.mark.cfg
    def test_loop(self, loop_cfg):
        assert isinstance(loop_cfg.statement(7), Use)
        assert loop_cfg.statement(7).origin == 'while'
        assert loop_cfg.successors(7) == [8, 10]
        assert loop_cfg.successors(9) == [7]
        assert loop_cfg.predecessors(7) == [6, 9]
        assert loop_cfg.heap_sites == [1, 3]

    @pytest.mark.cfg
    def test_branch_target(self, loop_cfg):
        assert loop_cfg.branch_target(7, True) == 8
        assert loop_cfg.branch_target(7, False) == 10
        assert loop_cfg.branch_target(6, False) == 7

    @pytest.mark.cfg
    def test_return_goes_to_end(self, loop_cfg):
        assert loop_cfg.successors(10) == [-1]
        assert str(loop_cfg.statement(10)) == 'return'

    @pytest.mark.cfg
    def test_if_without_else_joins(self):
        cfg = load_cfg('int main() { int *p; if (p) { other; } use(p); }')

        assert cfg.successors(1) == [2, 3]
        assert cfg.predecessors(3) == [1, 2]

    @pytest.mark.cfg
    def test_worklist_orders(self, loop_cfg):
        postorder = loop_cfg.postorder()

        assert postorder[-1] == 0
        assert loop_cfg.reverse_postorder() == postorder[::-1]
        assert sorted(postorder) == sorted(loop_cfg.order())

    @pytest.mark.cfg
    def test_labels_continue_across_procedures(self):
        cfgs = load_program('int f() { other; } '
                            'int main() { other; other; }')

        assert list(cfgs) == ['f', 'main']
        assert cfgs['f'].order() == [0, 1, -1]
        assert cfgs['main'].order() == [0, 2, 3, -1]

    @pytest.mark.cfg
    def test_scoped_types(self, heap_struct_cfg):
        assert set(heap_struct_cfg.types.variables) == {'a', 'x', 'y', 'b'}
        assert list(heap_struct_cfg.types.heap) == [1]

    @pytest.mark.cfg
    def test_unreachable_statement(self):
        with pytest.raises(TypeCheckError, match='unreachable statement'):
            load_cfg('int main() { int *p; return p; use(p); }')


class TestNormalize:
    """Tests for structure expansion and address-form checks."""

    @pytest.mark.cfg
    def test_closure_expand_member_wise(self):
        types, program = typecheck(parse(PAIR_PROGRAM))
        proc = program.procedures[0]
        expanded = closure_expand(proc.body[0],
                                  types.scoped(proc.local_vars))

        assert [str(s) for s in expanded] == [
            'x.a = y.a', 'x.n = y.n', 'x.b[0] = y.b[0]', 'x.b[1] = y.b[1]']
        assert isinstance(expanded[1], Other)
        assert all(isinstance(s, PtrAssign)
                   for i, s in enumerate(expanded) if i != 1)

    @pytest.mark.cfg
    def test_closure_expand_keeps_pointer_assignments(self):
        stmt = PtrAssign(VarRef('x'), AddrOf(VarRef('b')))

        assert closure_expand(stmt, TypeTable()) == (stmt,)

    @pytest.mark.cfg
    def test_cfg_keeps_only_pointer_members(self):
        cfg = load_cfg(PAIR_PROGRAM)

        assert [str(s) for _, s in cfg.statements()][1:-1] == [
            'x.a = y.a', 'x.b[0] = y.b[0]', 'x.b[1] = y.b[1]']

    @pytest.mark.cfg
    def test_pointer_free_assignment_is_one_statement(self):
        cfg = load_cfg('struct q { int n; int m; }; '
                       'int main() { struct q x, y; x = y; }')

        assert cfg.order() == [0, 1, -1]
        assert isinstance(cfg.statement(1), Other)
        assert str(cfg.statement(1)) == 'x = y'

    @pytest.mark.cfg
    def test_union_is_copied_as_one_cell(self):
        cfg = load_cfg('union u { int *p; int n; }; '
                       'int main() { union u x, y; x = y; }')

        assert [str(s) for _, s in cfg.statements()][1:-1] == ['x = y']
        assert isinstance(cfg.statement(1), PtrAssign)

    @pytest.mark.cfg
    def test_idempotent(self):
        types, program = typecheck(parse(PAIR_PROGRAM))
        once = normalize(program, types)

        assert normalize(once, types) == once

    @pytest.mark.cfg
    def test_nested_address_is_rejected(self):
        stmt = PtrAssign(VarRef('p'), AddrOf(AddrOf(VarRef('b'))))
        program = Program((Procedure('main', {}, (stmt,)),))

        with pytest.raises(TypeCheckError, match='nested address-of'):
            normalize(program, TypeTable())

    @pytest.mark.cfg
    def test_address_under_indirection_is_accepted(self):
        cfg = load_cfg(fixture_text('array_arith.mc'))

        assert str(cfg.statement(4)) == (
            'use(*(*t + 5), *(s + 5), *(&q[3] + 5), q[8])')
