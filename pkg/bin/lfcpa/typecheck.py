"""Type checking of parsed programs, and lowering of the syntax tree into the
typed, structured IR. Lowering applies the C identities the analysis relies
on: `*(&β)` is `β`, `(&β)->f` is `β.f`, `&*p` is `p`, an array used as a
pointer value is `&a[0]`, and `p[e]` on a pointer is `*(p + e)`."""

from collections.abc import Iterable
import logging
import re
from typing import Self

from lfcpa.data.ir import (
    AddrOf, AddrOfPlus, ArrowField, Assign, BinOp, Deref, DotField, If,
    Index, IndexExpr, IntLit, IntVar, LOCATION_FORMS, Malloc, Neg, Node,
    Other, PointerExpr, Plus, Procedure, Program, PtrAssign, Return, Use,
    VarRef, While
)
from lfcpa.data.syntax import (
    AggregateSpec, AssignStmt, Binary, Block, Call, CallStmt, Cast,
    Declaration, Declarator, Expr, IfStmt, Member, Name, NamedType, Number,
    OtherStmt, Position, ProcedureDef, ReturnStmt, SizeOf, SourceProgram,
    Subscript, TypeName, TypeSpec, Unary, UseStmt, WhileStmt
)
from lfcpa.data.types import (
    Aggregate, AggregateType, ArrayType, CType, FieldDecl, INT, PointerType,
    ScalarType, TypeTable, VOID
)
from lfcpa.errors import TypeCheckError
from lfcpa.lexer import SCALAR_KEYWORDS

_logger = logging.getLogger(__name__)

# Allocation-site names look like this; variables may not.
RESERVED_NAME_RE = re.compile(r'^o\d+$')

CONDITION_OPERATORS = frozenset({'==', '!=', '<', '<=', '>', '>=', '&&', '||'})

type Value = PointerExpr | IndexExpr
"""Type alias for any lowered expression."""


def is_pointer_valued(expr: Value) -> bool:
    """True when the expression can be used as a pointer value (pointers,
    and arrays through decay)."""

    return isinstance(expr.ctype, (PointerType, ArrayType))


class Declarations:
    """Builds the aggregate layouts, typedefs and variables of a program."""

    def __init__(self: Self) -> None:
        self.aggregates: dict[str, Aggregate] = {}
        self.typedefs: dict[str, CType] = {}
        self.globals: dict[str, CType] = {}
        self.anonymous = 0

    def resolve_spec(self: Self, spec: TypeSpec) -> CType:
        """Resolve a type specifier, defining any aggregate it carries."""

        if isinstance(spec, NamedType):
            if spec.name in SCALAR_KEYWORDS:
                return ScalarType(spec.name)
            if spec.name in self.typedefs:
                return self.typedefs[spec.name]
            raise TypeCheckError(f"unknown type '{spec.name}'",
                                 spec.pos.line, spec.pos.column)

        return self.resolve_aggregate(spec)

    def resolve_aggregate(self: Self, spec: AggregateSpec) -> AggregateType:
        """Resolve (and, with a body, define) a struct or union."""

        is_union = spec.kind == 'union'
        if spec.tag is None:
            self.anonymous += 1
            tag = f'<anonymous {spec.kind} {self.anonymous}>'
        else:
            tag = spec.tag

        existing = self.aggregates.get(tag)
        if existing is not None and existing.is_union != is_union:
            raise TypeCheckError(f"'{tag}' is not a {spec.kind}",
                                 spec.pos.line, spec.pos.column)

        ctype = AggregateType(tag, is_union)
        if spec.members is None:
            return ctype
        if existing is not None:
            raise TypeCheckError(f"redefinition of {ctype}",
                                 spec.pos.line, spec.pos.column)

        members: list[FieldDecl] = []
        names: set[str] = set()
        for decl in spec.members:
            base = self.resolve_spec(decl.spec)
            for d in decl.declarators:
                if d.name in names:
                    raise TypeCheckError(
                        f"duplicate member '{d.name}' in {ctype}",
                        d.pos.line, d.pos.column)
                names.add(d.name)
                member_type = self.apply_declarator(base, d)
                self.require_complete(member_type, d.pos)
                members.append(FieldDecl(d.name, member_type))

        self.aggregates[tag] = Aggregate(tag, is_union, tuple(members))
        return ctype

    @staticmethod
    def apply_declarator(base: CType, d: Declarator) -> CType:
        """Wrap `base` in the pointers and array dimensions of `d`."""

        ctype = base
        for _ in range(d.pointers):
            ctype = PointerType(ctype)
        for extent in reversed(d.dims):
            if extent <= 0:
                raise TypeCheckError(f"array '{d.name}' has extent {extent}",
                                     d.pos.line, d.pos.column)
            ctype = ArrayType(ctype, extent)

        return ctype

    def require_complete(self: Self, ctype: CType, pos: Position) -> None:
        """Reject values of undefined aggregates and of `void`."""

        while isinstance(ctype, ArrayType):
            ctype = ctype.element
        if isinstance(ctype, AggregateType) and (
                ctype.tag not in self.aggregates):
            raise TypeCheckError(f'incomplete type {ctype}',
                                 pos.line, pos.column)
        if ctype == VOID:
            raise TypeCheckError('variable of type void',
                                 pos.line, pos.column)

    def declare(
        self: Self, decl: Declaration, scope: dict[str, CType]
    ) -> None:
        """Add the variables (or typedef names) of `decl` to `scope`."""

        base = self.resolve_spec(decl.spec)
        for d in decl.declarators:
            ctype = self.apply_declarator(base, d)
            if decl.typedef:
                self.typedefs[d.name] = ctype
                continue
            if RESERVED_NAME_RE.fullmatch(d.name):
                raise TypeCheckError(
                    f"'{d.name}' is reserved for allocation sites",
                    d.pos.line, d.pos.column)
            if d.name in scope:
                raise TypeCheckError(f"duplicate declaration of '{d.name}'",
                                     d.pos.line, d.pos.column)
            self.require_complete(ctype, d.pos)
            scope[d.name] = ctype

    def resolve_type_name(self: Self, type_name: TypeName) -> CType:
        """Resolve a cast or sizeof type."""

        ctype = self.resolve_spec(type_name.spec)
        for _ in range(type_name.pointers):
            ctype = PointerType(ctype)

        return ctype

    def table(self: Self) -> TypeTable:
        """The global type table."""

        return TypeTable(dict(self.aggregates), dict(self.globals))


class Lowering:
    """Lowers the statements and expressions of one procedure."""

    def __init__(self: Self, decls: Declarations, name: str) -> None:
        self.decls = decls
        self.name = name
        self.local_vars: dict[str, CType] = {}

    @staticmethod
    def fail(message: str, pos: Position) -> TypeCheckError:
        """Build an error at `pos`."""

        return TypeCheckError(message, pos.line, pos.column)

    def lookup(self: Self, name: Name) -> CType:
        """The type of a variable in scope."""

        if name.ident in self.local_vars:
            return self.local_vars[name.ident]
        if name.ident in self.decls.globals:
            return self.decls.globals[name.ident]

        raise self.fail(f"undeclared identifier '{name.ident}'", name.pos)

    def aggregate_of(self: Self, ctype: CType, pos: Position) -> Aggregate:
        """The layout of an aggregate type, or an error."""

        if not isinstance(ctype, AggregateType):
            raise self.fail(f'member access on non-aggregate type {ctype}',
                            pos)

        return self.decls.table().aggregate(ctype)

    # Expressions

    def decay(self: Self, expr: Value) -> Value:
        """An array used as a pointer value denotes its first element's
        address."""

        if isinstance(expr.ctype, ArrayType) and isinstance(
                expr, LOCATION_FORMS):
            element = expr.ctype.element
            first = Index(expr, IntLit(0, INT), element)
            return AddrOf(first, PointerType(element))

        return expr

    def to_index(self: Self, expr: Value, pos: Position) -> IndexExpr:
        """Check that `expr` is integer arithmetic over literals and
        variables."""

        match expr:
            case IntLit() | IntVar() | Neg() | BinOp():
                return expr
            case VarRef(name=name, ctype=ScalarType() as ctype):
                return IntVar(name, ctype)

        raise self.fail(
            'index expressions may only use integer literals and variables',
            pos)

    def pointer_plus(
        self: Self, base: Value, offset: IndexExpr, pos: Position
    ) -> PointerExpr:
        """Build `base + offset` for a pointer-valued base."""

        match base:
            case AddrOf(base=inner):
                return AddrOfPlus(inner, offset, base.ctype)
            case AddrOfPlus(base=inner, offset=first):
                return AddrOfPlus(inner, BinOp('+', first, offset, INT),
                                  base.ctype)
            case Malloc():
                raise self.fail('arithmetic on malloc is not supported', pos)

        return Plus(base, offset, base.ctype)

    def lower(self: Self, expr: Expr) -> Value:
        """Lower a source expression to a typed IR expression."""

        match expr:
            case Name():
                return VarRef(expr.ident, self.lookup(expr))
            case Number(value=value):
                return IntLit(value, INT)
            case Member():
                return self.lower_member(expr)
            case Subscript():
                return self.lower_subscript(expr)
            case Unary(op='*'):
                return self.lower_deref(expr)
            case Unary(op='&'):
                return self.lower_address(expr)
            case Unary(op='-', operand=operand):
                return Neg(self.to_index(self.lower(operand), expr.pos), INT)
            case Binary(op='+' | '-' | '*'):
                return self.lower_arithmetic(expr)
            case Cast(type_name=type_name, operand=Call(func='malloc')):
                cell = self.decls.resolve_type_name(type_name)
                if not isinstance(cell, PointerType):
                    raise self.fail('malloc must be cast to a pointer type',
                                    expr.pos)
                inner = self.lower_malloc(expr.operand)
                return Malloc(inner.cell_type or cell.pointee, cell)
            case Cast():
                raise self.fail('casts are only supported around malloc',
                                expr.pos)
            case Call(func='malloc'):
                return self.lower_malloc(expr)
            case Call(func=func):
                raise self.fail(f"call to '{func}' is only allowed as a "
                                'statement', expr.pos)
            case SizeOf():
                raise self.fail('sizeof is only supported inside malloc',
                                expr.pos)

        raise self.fail(f"operator in '{expr}' is only allowed in conditions",
                        getattr(expr, 'pos', Position()))

    def lower_malloc(self: Self, call: Call) -> Malloc:
        """`malloc(sizeof(T))`; other arguments leave the cell type to the
        assignment."""

        if len(call.args) == 1 and isinstance(call.args[0], SizeOf):
            cell = self.decls.resolve_type_name(call.args[0].type_name)
            self.decls.require_complete(cell, call.pos)
            return Malloc(cell, PointerType(cell))
        if len(call.args) != 1:
            raise self.fail('malloc takes exactly one argument', call.pos)

        return Malloc(None, PointerType(VOID))

    def lower_member(self: Self, expr: Member) -> PointerExpr:
        """`β.f` and `β->f`."""

        base = self.lower(expr.base)
        if expr.arrow:
            base = self.decay(base)
            if not isinstance(base.ctype, PointerType):
                raise self.fail(f"'->' applied to non-pointer '{expr.base}'",
                                expr.pos)
            agg = self.aggregate_of(base.ctype.pointee, expr.pos)
        else:
            if not isinstance(base, LOCATION_FORMS):
                raise self.fail(f"'.' applied to non-lvalue '{expr.base}'",
                                expr.pos)
            agg = self.aggregate_of(base.ctype, expr.pos)

        member = agg.member(expr.name)
        if member is None:
            kind = 'union' if agg.is_union else 'struct'
            raise self.fail(f"no field '{expr.name}' in {kind} {agg.tag}",
                            expr.pos)

        if not expr.arrow:
            return DotField(base, expr.name, member.ctype)
        if isinstance(base, AddrOf):
            return DotField(base.base, expr.name, member.ctype)
        if isinstance(base, Malloc):
            raise self.fail('malloc result cannot be dereferenced', expr.pos)

        return ArrowField(base, expr.name, member.ctype)

    def lower_subscript(self: Self, expr: Subscript) -> PointerExpr:
        """`β[e]`: element selection on arrays, `*(β + e)` on pointers."""

        base = self.lower(expr.base)
        index = self.to_index(self.lower(expr.index), expr.pos)

        if isinstance(base.ctype, ArrayType) and isinstance(
                base, LOCATION_FORMS):
            return Index(base, index, base.ctype.element)
        if isinstance(base.ctype, PointerType):
            return self.indirect(self.pointer_plus(base, index, expr.pos),
                                 expr.pos)

        raise self.fail(f"'{expr.base}' is neither an array nor a pointer",
                        expr.pos)

    def indirect(self: Self, pointer: Value, pos: Position) -> PointerExpr:
        """`*pointer`, folding `*(&β)` to `β`."""

        pointer = self.decay(pointer)
        if not isinstance(pointer.ctype, PointerType):
            raise self.fail(f"dereferencing non-pointer '{pointer}'", pos)
        if pointer.ctype.pointee == VOID:
            raise self.fail(f"dereferencing void pointer '{pointer}'", pos)
        if isinstance(pointer, AddrOf):
            return pointer.base
        if isinstance(pointer, Malloc):
            raise self.fail('malloc result cannot be dereferenced', pos)

        return Deref(pointer, pointer.ctype.pointee)

    def lower_deref(self: Self, expr: Unary) -> PointerExpr:
        """`*β`"""

        return self.indirect(self.lower(expr.operand), expr.pos)

    def lower_address(self: Self, expr: Unary) -> PointerExpr:
        """`&β`, folding `&*p` to `p`."""

        operand = self.lower(expr.operand)
        if isinstance(operand, Deref):
            return operand.base
        if not isinstance(operand, LOCATION_FORMS):
            raise self.fail(f"'&' applied to non-lvalue '{expr.operand}'",
                            expr.pos)

        return AddrOf(operand, PointerType(operand.ctype))

    def lower_arithmetic(self: Self, expr: Binary) -> Value:
        """`+`, `-` and `*` over integers, and pointer arithmetic."""

        left = self.lower(expr.left)
        right = self.lower(expr.right)
        left_ptr = is_pointer_valued(left)
        right_ptr = is_pointer_valued(right)

        if left_ptr and right_ptr:
            raise self.fail('arithmetic between two pointers is not '
                            'supported', expr.pos)
        if left_ptr and expr.op in '+-':
            offset = self.to_index(right, expr.pos)
            if expr.op == '-':
                offset = Neg(offset, INT)
            return self.pointer_plus(self.decay(left), offset, expr.pos)
        if right_ptr and expr.op == '+':
            return self.pointer_plus(self.decay(right),
                                     self.to_index(left, expr.pos), expr.pos)
        if left_ptr or right_ptr:
            raise self.fail(f"invalid pointer arithmetic '{expr}'", expr.pos)

        return BinOp(expr.op, self.to_index(left, expr.pos),
                     self.to_index(right, expr.pos), INT)

    def involves_pointer(self: Self, expr: Expr) -> bool:
        """True if an operand of arithmetic `expr` is pointer-valued."""

        match expr:
            case Number():
                return False
            case Binary(op=op) if op in CONDITION_OPERATORS:
                return False
            case Binary(left=left, right=right):
                return (self.involves_pointer(left) or
                        self.involves_pointer(right))
            case Unary(op='!'):
                return False
            case Unary(op='-', operand=operand):
                return self.involves_pointer(operand)

        return is_pointer_valued(self.lower(expr))

    def reads(self: Self, expr: Expr | None) -> list[PointerExpr]:
        """The pointer expressions whose evaluation reads memory in a
        condition, a `use`, a return value or an integer assignment.

        Raises:
            TypeCheckError: On arithmetic the IR cannot express, such as
                the sum of two pointers
        """

        match expr:
            case None | Number():
                return []
            case Binary(op=op) if (
                    op in '+-*' and self.involves_pointer(expr)):
                return [self.decay(self.lower(expr))]
            case Binary(op=op, left=left, right=right) if (
                    op in CONDITION_OPERATORS or op in '+-*'):
                return self.reads(left) + self.reads(right)
            case Unary(op='!' | '-', operand=operand):
                return self.reads(operand)

        lowered = self.decay(self.lower(expr))
        match lowered:
            case IntLit() | IntVar() | Neg() | BinOp() | Malloc():
                return []
            case VarRef(ctype=ScalarType()):
                return []

        return [lowered]

    # Statements

    def pointer_assignment(
        self: Self, lhs: PointerExpr, rhs: Value, pos: Position
    ) -> PtrAssign:
        """Check and build a pointer assignment."""

        rhs = self.decay(rhs)
        if isinstance(rhs, Malloc) and rhs.cell_type is None:
            cell = lhs.ctype.pointee
            if cell == VOID:
                raise self.fail('cannot infer the type allocated by malloc',
                                pos)
            self.decls.require_complete(cell, pos)
            rhs = Malloc(cell, lhs.ctype)
        if not isinstance(rhs.ctype, PointerType):
            raise self.fail(f"assigning non-pointer '{rhs}' to pointer "
                            f"'{lhs}'", pos)
        if not isinstance(rhs, Malloc) and VOID not in (
                lhs.ctype.pointee, rhs.ctype.pointee) and (
                lhs.ctype != rhs.ctype):
            raise self.fail(f'incompatible pointer types {lhs.ctype} and '
                            f'{rhs.ctype}', pos)

        return PtrAssign(lhs, rhs)

    def assignment(self: Self, stmt: AssignStmt) -> Node:
        """Lower `lhs = rhs` according to the type of the left side."""

        lhs = self.lower(stmt.lhs)
        if not isinstance(lhs, LOCATION_FORMS):
            raise self.fail(f"'{stmt.lhs}' is not assignable", stmt.pos)

        match lhs.ctype:
            case PointerType():
                return self.pointer_assignment(lhs, self.lower(stmt.rhs),
                                               stmt.pos)
            case ArrayType():
                raise self.fail(f"array '{stmt.lhs}' cannot be assigned",
                                stmt.pos)
            case AggregateType():
                rhs = self.lower(stmt.rhs)
                if not isinstance(rhs, LOCATION_FORMS) or (
                        rhs.ctype != lhs.ctype):
                    raise self.fail(f'incompatible types {lhs.ctype} and '
                                    f'{rhs.ctype}', stmt.pos)
                return Assign(lhs, rhs)

        text = f'{stmt.lhs} = {stmt.rhs}'
        reads = self.reads(stmt.rhs)
        if not isinstance(lhs, VarRef):
            reads.insert(0, lhs)
        if not reads:
            return Other(text)

        return Use(tuple(reads), text=text)

    def statements(self: Self, items: Iterable) -> tuple[Node, ...]:
        """Lower a sequence of block items."""

        nodes: list[Node] = []
        for item in items:
            match item:
                case Declaration():
                    if item.typedef:
                        raise self.fail('typedef inside a procedure',
                                        item.pos)
                    self.decls.declare(item, self.local_vars)
                case AssignStmt():
                    nodes.append(self.assignment(item))
                case UseStmt(args=args):
                    reads = [r for a in args for r in self.reads(a)]
                    nodes.append(Use(tuple(reads)))
                case OtherStmt():
                    nodes.append(Other())
                case CallStmt(call=call):
                    if call.func == 'malloc':
                        raise self.fail('the result of malloc must be '
                                        'assigned', item.pos)
                    arguments = [r for a in call.args for r in self.reads(a)]
                    _logger.debug("call '%s' is treated as other; it reads %s",
                                  call, [str(r) for r in arguments])
                    nodes.append(Other(f'{call}'))
                case IfStmt(cond=cond, then=then, otherwise=otherwise):
                    condition = Use(tuple(self.reads(cond)), origin='if')
                    else_body = () if otherwise is None else (
                        self.statements(otherwise.items))
                    nodes.append(If(condition, self.statements(then.items),
                                    else_body))
                case WhileStmt(cond=cond, body=body):
                    condition = Use(tuple(self.reads(cond)), origin='while')
                    nodes.append(While(condition,
                                       self.statements(body.items)))
                case ReturnStmt(value=value):
                    nodes.append(Return(Use(tuple(self.reads(value)),
                                            origin='return')))
                case Block(items=inner):
                    nodes.extend(self.statements(inner))

        return tuple(nodes)

    def procedure(self: Self, proc: ProcedureDef) -> Procedure:
        """Lower a whole procedure."""

        for param in proc.params:
            self.decls.declare(param, self.local_vars)
        body = self.statements(proc.body.items)

        _logger.debug('procedure %s: %d locals, %d top-level statements',
                      proc.name, len(self.local_vars), len(body))
        return Procedure(proc.name, dict(self.local_vars), body)


def typecheck(program: SourceProgram) -> tuple[TypeTable, Program]:
    """Check a parsed program and lower it to the typed IR.

    Returns:
        The global type table and the typed program

    Raises:
        TypeCheckError: On undeclared identifiers, unknown fields,
            dereferenced non-pointers, misused arrays and other type errors
    """

    decls = Declarations()
    procedures: list[Procedure] = []
    names: set[str] = set()

    for item in program.items:
        if isinstance(item, Declaration):
            decls.declare(item, decls.globals)
            continue

        if item.name in names:
            raise TypeCheckError(f"duplicate procedure '{item.name}'",
                                 item.pos.line, item.pos.column)
        names.add(item.name)
        procedures.append(Lowering(decls, item.name).procedure(item))

    return decls.table(), Program(tuple(procedures))
