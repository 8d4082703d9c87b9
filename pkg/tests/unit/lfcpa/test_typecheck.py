# pylint: disable=missing-function-docstring, missing-class-docstring, invalid-name, no-member, import-error, line-too-long

"""Unit tests for lfcpa.typecheck module."""

from lfcpa.data.ir import (  # pyright: ignore[reportMissingImports]
    Assign, If, Other, PtrAssign, Return, Use, While
)
from lfcpa.data.types import (  # pyright: ignore[reportMissingImports]
    AggregateType, ArrayType, INT, PointerType
)
from lfcpa.errors import TypeCheckError  # pyright: ignore[reportMissingImports]
from lfcpa.parser import parse  # pyright: ignore[reportMissingImports]
from lfcpa.typecheck import typecheck  # pyright: ignore[reportMissingImports]

import pytest  # pyright: ignore[reportMissingImports]

from tests.helpers import fixture_text


def check(text):
    return typecheck(parse(text))


def main_body(text):
    _, program = check(text)
    return program.procedures[-1].body


def lowered(decls, code):
    """The text of the last lowered statement of `code`."""
    return str(main_body(f'int main() {{ {decls} {code} }}')[-1])


class TestDeclarations:
    """Tests for building the type table."""

    @pytest.mark.frontend
    def test_typedef_structs(self):
        types, program = check(fixture_text('heap_struct.mc'))
        local_vars = program.procedures[0].local_vars

        assert set(types.aggregates) == {'A', 'B'}
        assert local_vars['a'] == PointerType(AggregateType('A'))
        assert local_vars['b'] == AggregateType('B')

    @pytest.mark.frontend
    def test_globals_and_arrays(self):
        types, _ = check(fixture_text('nested_arrays.mc'))

        assert types.variables['a'] == ArrayType(
            ArrayType(AggregateType('s3'), 10), 20)

    @pytest.mark.frontend
    def test_anonymous_union(self):
        types, _ = check(fixture_text('unions.mc'))
        union = types.variables['a']

        assert isinstance(union, AggregateType)
        assert union.is_union
        assert types.variables['c'] == ArrayType(PointerType(union), 10)

    @pytest.mark.frontend
    def test_procedure_locals(self):
        _, program = check('int f(int *a) { int n; other; }')

        assert program.procedures[0].local_vars == {
            'a': PointerType(INT), 'n': INT}


class TestLowering:
    """Tests for lowering expressions and statements."""

    @pytest.mark.frontend
    def test_array_decays_to_first_element(self):
        assert lowered('int *q[10]; int **s;', 's = q;') == 's = &q[0]'

    @pytest.mark.frontend
    def test_pointer_subscript(self):
        assert lowered('int **s; int *r;', 'r = s[2];') == 'r = *(s + 2)'

    @pytest.mark.frontend
    def test_deref_of_address_folds(self):
        assert lowered('int *b, *r;', 'r = *(&b);') == 'r = b'

    @pytest.mark.frontend
    def test_address_of_deref_folds(self):
        assert lowered('int **s, **t;', 's = &*t;') == 's = t'

    @pytest.mark.frontend
    def test_arrow_on_address(self):
        assert lowered('struct B { struct B *f; } b; struct B *p;',
                       'p = (&b)->f;') == 'p = b.f'

    @pytest.mark.frontend
    def test_address_plus(self):
        assert lowered('int *q[10]; int **s;', 's = &q[3] + 5;') == (
            's = &q[3] + 5')

    @pytest.mark.frontend
    def test_subtraction_negates(self):
        assert lowered('int **s, **t;', 's = t - 2;') == 's = t - 2'

    @pytest.mark.frontend
    def test_malloc_cell_type_from_target(self):
        stmt = main_body('struct n { int *v; }; int main() { struct n *p; '
                         'p = malloc(sizeof(struct n)); }')[-1]

        assert isinstance(stmt, PtrAssign)
        assert stmt.rhs.cell_type == AggregateType('n')

    @pytest.mark.frontend
    def test_untyped_malloc_uses_the_target_type(self):
        stmt = main_body('int main() { int **p; p = malloc(8); }')[-1]

        assert stmt.rhs.cell_type == PointerType(INT)

    @pytest.mark.frontend
    def test_aggregate_assignment(self):
        body = main_body('struct B { struct B *f; }; '
                         'int main() { struct B b, c; b = c; }')

        assert isinstance(body[-1], Assign)

    @pytest.mark.frontend
    def test_integer_assignment_without_reads(self):
        body = main_body('int main() { int i; i = i + 1; }')

        assert isinstance(body[-1], Other)

    @pytest.mark.frontend
    def test_integer_assignment_through_pointer(self):
        body = main_body('struct n { int k; }; '
                         'int main() { struct n *p; p->k = 1; }')

        assert isinstance(body[-1], Use)
        assert str(body[-1]) == 'p->k = 1'

    @pytest.mark.frontend
    def test_scalar_uses_are_not_reads(self):
        body = main_body('int main() { int i; int *p; use(i, p); }')

        assert [str(e) for e in body[-1].exprs] == ['p']

    @pytest.mark.frontend
    def test_condition_reads_both_sides(self):
        body = main_body('int main() { int *p, *q; if (p == q) other; }')

        assert isinstance(body[-1], If)
        assert [str(e) for e in body[-1].condition.exprs] == ['p', 'q']
        assert body[-1].condition.origin == 'if'

    @pytest.mark.frontend
    def test_condition_pointer_arithmetic(self):
        body = main_body('struct n { int k; }; int main() { int *q[4]; '
                         'struct n *m; if (q + 1) other; '
                         'while (m->k + 1) other; }')

        assert [str(e) for e in body[0].condition.exprs] == ['&q[0] + 1']
        assert [str(e) for e in body[1].condition.exprs] == ['m->k']

    @pytest.mark.frontend
    def test_loops_and_returns(self):
        body = main_body('int main() { int *p; while (!p) other; '
                         'return p; }')

        assert isinstance(body[0], While)
        assert isinstance(body[1], Return)
        assert str(body[1].value) == 'return p'


class TestErrors:
    """Tests for rejected programs."""

    @pytest.mark.frontend
    @pytest.mark.parametrize('text,message', [
        ('int main() { int *p; p = &z; }', "undeclared identifier 'z'"),
        ('int main() { int a; int *p; p = *a; }',
         "dereferencing non-pointer 'a'"),
        ('struct B { struct B *f; }; int main() { struct B b; '
         'struct B *p; p = b.q; }', "no field 'q' in struct B"),
        ('int main() { int *o1; }', "'o1' is reserved for allocation sites"),
        ('int main() { int *p; int *p; }', "duplicate declaration of 'p'"),
        ('int main() { struct Z z; }', 'incomplete type struct Z'),
        ('int main() { int *p; char *c; p = c; }',
         'incompatible pointer types'),
        ('int main() { int *q[3]; int *r[3]; q = r; }',
         "array 'q' cannot be assigned"),
        ('int main() { int *p, *q; p = p + q; }',
         'arithmetic between two pointers'),
        ('int main() { int *p, *q; if (p + q) { other; } }',
         'arithmetic between two pointers'),
        ('int main() { int *p, *q; use(p + q); }',
         'arithmetic between two pointers'),
        ('int main() { int *p; while (p * 2) other; }',
         'invalid pointer arithmetic'),
        ('int main() { int *p; p = (int *) p; }',
         'casts are only supported around malloc'),
        ('int main() { other; } int main() { other; }',
         "duplicate procedure 'main'"),
        ('int main() { unknown_t x; }', 'expected'),
    ])
    def test_rejected(self, text, message):
        with pytest.raises((TypeCheckError, ValueError), match=message):
            check(text)

    @pytest.mark.frontend
    def test_error_position(self):
        with pytest.raises(TypeCheckError) as excinfo:
            check('int main() {\n  int *p;\n  p = &z;\n}')

        assert excinfo.value.line == 3
        assert str(excinfo.value).startswith('line 3, column ')
