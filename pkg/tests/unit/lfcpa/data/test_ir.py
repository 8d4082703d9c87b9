# pylint: disable=missing-function-docstring, missing-class-docstring, invalid-name, no-member, import-error, line-too-long

"""Unit tests for lfcpa.data.ir module."""

from lfcpa.data.ir import (  # pyright: ignore[reportMissingImports]
    AddrOf, BinOp, Deref, End, IntLit, Malloc, Neg, Other, Plus, PtrAssign,
    Start, Use, VarRef
)
from lfcpa.data.types import AggregateType, INT  # pyright: ignore[reportMissingImports]

import pytest  # pyright: ignore[reportMissingImports]

from tests.helpers import expressions, fixture_text


class TestExpressionText:
    """Tests for printing expressions."""

    @pytest.mark.unit
    def test_lowered_arithmetic_prints_like_the_source(self):
        exprs, _ = expressions(fixture_text('array_arith.mc'),
                               '*(*t + 5)', '*(s + 5)', '*(&q[3] + 5)',
                               'q[8]', 's + 5')

        assert [str(e) for e in exprs] == [
            '*(*t + 5)', '*(s + 5)', '*(&q[3] + 5)', 'q[8]', 's + 5']

    @pytest.mark.unit
    def test_field_chains(self):
        source = fixture_text('heap_struct.mc').replace(
            '    return x->f->f;\n', '')
        exprs, _ = expressions(source, 'x->f->f', '&a->g', 'b.f')

        assert [str(e) for e in exprs] == ['x->f->f', '&a->g', 'b.f']

    @pytest.mark.unit
    def test_negative_offset(self):
        assert str(Plus(VarRef('s'), Neg(IntLit(2)))) == 's - 2'

    @pytest.mark.unit
    def test_index_precedence(self):
        expr = BinOp('*', BinOp('+', IntLit(1), IntLit(2)), IntLit(3))

        assert str(expr) == '(1 + 2) * 3'

    @pytest.mark.unit
    def test_malloc(self):
        assert str(Malloc(AggregateType('A'))) == (
            'malloc(sizeof(struct A))')

    @pytest.mark.unit
    def test_type_is_not_part_of_equality(self):
        assert VarRef('x', INT) == VarRef('x')
        assert Deref(VarRef('p')) == Deref(VarRef('p', INT), INT)


class TestStatementText:
    """Tests for printing statements."""

    @pytest.mark.unit
    def test_assignment(self):
        assert str(PtrAssign(VarRef('x'), AddrOf(VarRef('b')), 4)) == 'x = &b'

    @pytest.mark.unit
    @pytest.mark.parametrize('origin,expected', [
        ('use', 'use(p, q)'),
        ('if', 'if (p, q)'),
        ('while', 'while (p, q)'),
        ('return', 'return p, q'),
    ])
    def test_use_origins(self, origin, expected):
        stmt = Use((VarRef('p'), VarRef('q')), origin=origin)

        assert str(stmt) == expected

    @pytest.mark.unit
    def test_bare_return(self):
        assert str(Use(origin='return')) == 'return'

    @pytest.mark.unit
    def test_display_text_overrides(self):
        assert str(Use((VarRef('n'),), text='n->n = 1')) == 'n->n = 1'

    @pytest.mark.unit
    def test_fixed_nodes(self):
        assert str(Start()) == 'start'
        assert str(End()) == 'end'
        assert str(Other()) == 'other'
        assert Start().label == 0
        assert End().label == -1
