"""The analyzed program representation: integer index expressions, pointer
expressions, labelled statements, and the structured (pre-CFG) typed
program produced by the type checker.

Every expression node may carry its static type in `ctype`; the type does not
take part in equality, so expressions built by hand in tests compare equal to
typed ones."""

from dataclasses import dataclass, field
from typing import Self

from lfcpa.data.types import CType


START_ID = 0
END_ID = -1

# Printing precedence levels
POSTFIX = 4
UNARY = 3
MULTIPLICATIVE = 2
ADDITIVE = 1


# Index expressions (integer arithmetic)

@dataclass(frozen=True)
class IntLit:
    """An integer literal."""

    value: int
    "The literal's value"
    ctype: CType | None = field(default=None, compare=False, repr=False)

    def __str__(self: Self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class IntVar:
    """An integer variable; never constant at compile time."""

    name: str
    "The variable name"
    ctype: CType | None = field(default=None, compare=False, repr=False)

    def __str__(self: Self) -> str:
        return self.name


@dataclass(frozen=True)
class Neg:
    """Arithmetic negation."""

    operand: 'IndexExpr'
    ctype: CType | None = field(default=None, compare=False, repr=False)

    def __str__(self: Self) -> str:
        return f'-{wrap(self.operand, UNARY)}'


@dataclass(frozen=True)
class BinOp:
    """`left op right` for op in `+`, `-`, `*`."""

    op: str
    left: 'IndexExpr'
    right: 'IndexExpr'
    ctype: CType | None = field(default=None, compare=False, repr=False)

    def __str__(self: Self) -> str:
        level = precedence(self)
        return (f'{wrap(self.left, level)} {self.op} '
                f'{wrap(self.right, level + 1)}')


type IndexExpr = IntLit | IntVar | Neg | BinOp
"""Type alias for integer expressions."""


# Pointer expressions

@dataclass(frozen=True)
class VarRef:
    """A variable used as a location."""

    name: str
    ctype: CType | None = field(default=None, compare=False, repr=False)

    def __str__(self: Self) -> str:
        return self.name


@dataclass(frozen=True)
class DotField:
    """`base.field`"""

    base: 'PointerExpr'
    member: str
    ctype: CType | None = field(default=None, compare=False, repr=False)

    def __str__(self: Self) -> str:
        return f'{wrap(self.base, POSTFIX)}.{self.member}'


@dataclass(frozen=True)
class ArrowField:
    """`base->field`"""

    base: 'PointerExpr'
    member: str
    ctype: CType | None = field(default=None, compare=False, repr=False)

    def __str__(self: Self) -> str:
        return f'{wrap(self.base, POSTFIX)}->{self.member}'


@dataclass(frozen=True)
class Deref:
    """`*base`"""

    base: 'PointerExpr'
    ctype: CType | None = field(default=None, compare=False, repr=False)

    def __str__(self: Self) -> str:
        return f'*{wrap(self.base, UNARY)}'


@dataclass(frozen=True)
class Index:
    """`base[index]` on an array-typed base."""

    base: 'PointerExpr'
    index: IndexExpr
    ctype: CType | None = field(default=None, compare=False, repr=False)

    def __str__(self: Self) -> str:
        return f'{wrap(self.base, POSTFIX)}[{self.index}]'


@dataclass(frozen=True)
class Plus:
    """Pointer arithmetic `base + offset` (subtraction negates the
    offset)."""

    base: 'PointerExpr'
    offset: IndexExpr
    ctype: CType | None = field(default=None, compare=False, repr=False)

    def __str__(self: Self) -> str:
        return f'{wrap(self.base, ADDITIVE)} {additive_tail(self.offset)}'


@dataclass(frozen=True)
class AddrOf:
    """`&base`; only at the top of an expression."""

    base: 'PointerExpr'
    ctype: CType | None = field(default=None, compare=False, repr=False)

    def __str__(self: Self) -> str:
        return f'&{wrap(self.base, UNARY)}'


@dataclass(frozen=True)
class AddrOfPlus:
    """`&base + offset`; at the top of an expression or directly under an
    indirection."""

    base: 'PointerExpr'
    offset: IndexExpr
    ctype: CType | None = field(default=None, compare=False, repr=False)

    def __str__(self: Self) -> str:
        return f'&{wrap(self.base, UNARY)} {additive_tail(self.offset)}'


@dataclass(frozen=True)
class Malloc:
    """`malloc(sizeof(cell_type))`; always the whole right-hand side."""

    cell_type: CType | None = None
    "Type of the allocated cell"
    ctype: CType | None = field(default=None, compare=False, repr=False)

    def __str__(self: Self) -> str:
        return f'malloc(sizeof({self.cell_type}))'


type LocationExpr = VarRef | DotField | ArrowField | Deref | Index | Plus
"""The β forms: expressions that may have an l-value."""

type PointerExpr = LocationExpr | AddrOf | AddrOfPlus | Malloc
"""The α forms."""

LOCATION_FORMS = (VarRef, DotField, ArrowField, Deref, Index)
ADDRESS_FORMS = (AddrOf, AddrOfPlus, Malloc)


def precedence(expr: PointerExpr | IndexExpr) -> int:
    """The printing precedence of an expression node."""

    match expr:
        case Plus() | AddrOfPlus():
            return ADDITIVE
        case BinOp(op='*'):
            return MULTIPLICATIVE
        case BinOp():
            return ADDITIVE
        case Deref() | AddrOf() | Neg():
            return UNARY
        case _:
            return POSTFIX


def wrap(expr: PointerExpr | IndexExpr, level: int) -> str:
    """Render `expr`, parenthesized when it binds looser than `level`."""

    text = str(expr)
    return f'({text})' if precedence(expr) < level else text


def additive_tail(offset: IndexExpr) -> str:
    """Render `+ offset`, or `- x` for a negated offset."""

    if isinstance(offset, Neg):
        return f'- {wrap(offset.operand, MULTIPLICATIVE)}'

    return f'+ {wrap(offset, MULTIPLICATIVE)}'


# Statements

@dataclass(frozen=True)
class PtrAssign:
    """`lhs = rhs` between pointer-typed sides."""

    lhs: LocationExpr
    rhs: PointerExpr
    label: int = 0
    "The CFG node id"

    def __str__(self: Self) -> str:
        return f'{self.lhs} = {self.rhs}'


@dataclass(frozen=True)
class Use:
    """A read of the pointers needed to evaluate `exprs` (uses, conditions
    and returns)."""

    exprs: tuple[PointerExpr, ...] = ()
    label: int = 0
    "The CFG node id"
    origin: str = 'use'
    "Which source construct produced the node: use, if, while or return"
    text: str | None = field(default=None, compare=False)
    "Display text overriding the generated form"

    def __str__(self: Self) -> str:
        if self.text is not None:
            return self.text
        inner = ', '.join(map(str, self.exprs))
        match self.origin:
            case 'return':
                return f'return {inner}'.rstrip()
            case 'if' | 'while':
                return f'{self.origin} ({inner})'
            case _:
                return f'use({inner})'


@dataclass(frozen=True)
class Other:
    """A statement without pointer effects."""

    text: str = 'other'
    "How the statement is displayed"
    label: int = 0
    "The CFG node id"

    def __str__(self: Self) -> str:
        return self.text


@dataclass(frozen=True)
class Start:
    """The entry node of a procedure."""

    label: int = START_ID

    def __str__(self: Self) -> str:
        return 'start'


@dataclass(frozen=True)
class End:
    """The exit node of a procedure."""

    label: int = END_ID

    def __str__(self: Self) -> str:
        return 'end'


type Statement = PtrAssign | Use | Other | Start | End
"""Type alias for the statements held by CFG nodes."""


# Structured program (typed AST)

@dataclass(frozen=True)
class Assign:
    """An aggregate assignment, removed by normalization."""

    lhs: LocationExpr
    rhs: LocationExpr

    def __str__(self: Self) -> str:
        return f'{self.lhs} = {self.rhs}'


@dataclass(frozen=True)
class If:
    """A two-way branch."""

    condition: Use
    then_body: tuple['Node', ...] = ()
    else_body: tuple['Node', ...] = ()


@dataclass(frozen=True)
class While:
    """A loop with the condition evaluated before every iteration."""

    condition: Use
    body: tuple['Node', ...] = ()


@dataclass(frozen=True)
class Return:
    """Evaluate `value` (a Use) and leave the procedure."""

    value: Use


type Node = PtrAssign | Use | Other | Assign | If | While | Return
"""Type alias for the members of a structured procedure body."""


@dataclass(frozen=True)
class Procedure:
    """A typed procedure."""

    name: str
    "The procedure name"
    local_vars: dict[str, CType] = field(default_factory=dict, hash=False)
    "Parameters and locals, by name"
    body: tuple[Node, ...] = ()
    "The statements of the procedure"


@dataclass(frozen=True)
class Program:
    """A typed program: every procedure of one source file."""

    procedures: tuple[Procedure, ...] = ()
