"""The source-level syntax tree produced by the parser, and the printer
that turns it back into text. Positions never take part in equality, so a
re-parsed printout compares equal to the original tree."""

from dataclasses import dataclass, field
from typing import Self


@dataclass(frozen=True)
class Position:
    """A 1-based source position."""

    line: int = 0
    column: int = 0


NOWHERE = Position()


def _pos() -> Position:
    return field(default=NOWHERE, compare=False, repr=False)


# Types

@dataclass(frozen=True)
class NamedType:
    """A scalar keyword or a typedef name."""

    name: str
    pos: Position = _pos()

    def __str__(self: Self) -> str:
        return self.name


@dataclass(frozen=True)
class AggregateSpec:
    """`struct`/`union`, optionally tagged, optionally with a member list."""

    kind: str
    "Either 'struct' or 'union'"
    tag: str | None = None
    members: tuple['Declaration', ...] | None = None
    "`None` for a bare reference (`struct B`)"
    pos: Position = _pos()

    def __str__(self: Self) -> str:
        head = self.kind if self.tag is None else f'{self.kind} {self.tag}'
        if self.members is None:
            return head

        body = ' '.join(f'{m};' for m in self.members)
        return f'{head} {{ {body} }}'


type TypeSpec = NamedType | AggregateSpec
"""Type alias for type specifiers."""


@dataclass(frozen=True)
class Declarator:
    """A declared name with its pointer depth and array dimensions."""

    name: str
    pointers: int = 0
    dims: tuple[int, ...] = ()
    pos: Position = _pos()

    def __str__(self: Self) -> str:
        dims = ''.join(f'[{d}]' for d in self.dims)
        return f"{'*' * self.pointers}{self.name}{dims}"


@dataclass(frozen=True)
class Declaration:
    """`spec d1, d2, ...`, or a typedef of the same shape."""

    spec: TypeSpec
    declarators: tuple[Declarator, ...] = ()
    typedef: bool = False
    pos: Position = _pos()

    def __str__(self: Self) -> str:
        text = str(self.spec)
        if self.declarators:
            text += ' ' + ', '.join(map(str, self.declarators))

        return f'typedef {text}' if self.typedef else text


@dataclass(frozen=True)
class TypeName:
    """An abstract type, as written in casts and `sizeof`."""

    spec: TypeSpec
    pointers: int = 0
    pos: Position = _pos()

    def __str__(self: Self) -> str:
        stars = ' ' + '*' * self.pointers if self.pointers else ''
        return f'{self.spec}{stars}'


# Expressions

@dataclass(frozen=True)
class Name:
    """An identifier."""

    ident: str
    pos: Position = _pos()

    def __str__(self: Self) -> str:
        return self.ident


@dataclass(frozen=True)
class Number:
    """A non-negative integer literal."""

    value: int
    pos: Position = _pos()

    def __str__(self: Self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Member:
    """`base.name` or `base->name`."""

    base: 'Expr'
    name: str
    arrow: bool = False
    pos: Position = _pos()

    def __str__(self: Self) -> str:
        op = '->' if self.arrow else '.'
        return f'{atom(self.base)}{op}{self.name}'


@dataclass(frozen=True)
class Subscript:
    """`base[index]`"""

    base: 'Expr'
    index: 'Expr'
    pos: Position = _pos()

    def __str__(self: Self) -> str:
        return f'{atom(self.base)}[{self.index}]'


@dataclass(frozen=True)
class Unary:
    """Prefix `*`, `&`, `-` or `!`."""

    op: str
    operand: 'Expr'
    pos: Position = _pos()

    def __str__(self: Self) -> str:
        return f'{self.op}{atom(self.operand)}'


@dataclass(frozen=True)
class Binary:
    """An infix operation."""

    op: str
    left: 'Expr'
    right: 'Expr'
    pos: Position = _pos()

    def __str__(self: Self) -> str:
        return f'({self.left} {self.op} {self.right})'


@dataclass(frozen=True)
class Cast:
    """`(type) operand`"""

    type_name: TypeName
    operand: 'Expr'
    pos: Position = _pos()

    def __str__(self: Self) -> str:
        return f'({self.type_name}) {atom(self.operand)}'


@dataclass(frozen=True)
class SizeOf:
    """`sizeof(type)`"""

    type_name: TypeName
    pos: Position = _pos()

    def __str__(self: Self) -> str:
        return f'sizeof({self.type_name})'


@dataclass(frozen=True)
class Call:
    """`func(args)`"""

    func: str
    args: tuple['Expr', ...] = ()
    pos: Position = _pos()

    def __str__(self: Self) -> str:
        return f"{self.func}({', '.join(map(str, self.args))})"


type Expr = (Name | Number | Member | Subscript | Unary | Binary | Cast |
             SizeOf | Call)
"""Type alias for source expressions."""

ATOMS = (Name, Number, Member, Subscript, Call, SizeOf)


def atom(expr: Expr) -> str:
    """Render an operand of a postfix or prefix operator."""

    return str(expr) if isinstance(expr, ATOMS) else f'({expr})'


# Statements

@dataclass(frozen=True)
class AssignStmt:
    """`lhs = rhs;`"""

    lhs: Expr
    rhs: Expr
    pos: Position = _pos()


@dataclass(frozen=True)
class UseStmt:
    """`use(e1, e2, ...);`"""

    args: tuple[Expr, ...] = ()
    pos: Position = _pos()


@dataclass(frozen=True)
class OtherStmt:
    """`other;`"""

    pos: Position = _pos()


@dataclass(frozen=True)
class CallStmt:
    """A call used as a statement."""

    call: Call
    pos: Position = _pos()


@dataclass(frozen=True)
class IfStmt:
    """`if (cond) then else otherwise`"""

    cond: Expr
    then: 'Block'
    otherwise: 'Block | None' = None
    pos: Position = _pos()


@dataclass(frozen=True)
class WhileStmt:
    """`while (cond) body`"""

    cond: Expr
    body: 'Block'
    pos: Position = _pos()


@dataclass(frozen=True)
class ReturnStmt:
    """`return value;`"""

    value: Expr | None = None
    pos: Position = _pos()


@dataclass(frozen=True)
class Block:
    """A braced sequence of declarations and statements."""

    items: tuple['Declaration | Stmt', ...] = ()
    pos: Position = _pos()


type Stmt = (AssignStmt | UseStmt | OtherStmt | CallStmt | IfStmt |
             WhileStmt | ReturnStmt | Block)
"""Type alias for source statements."""


@dataclass(frozen=True)
class ProcedureDef:
    """A procedure definition."""

    return_type: TypeName
    name: str
    params: tuple[Declaration, ...] = ()
    body: Block = Block()
    pos: Position = _pos()


@dataclass(frozen=True)
class SourceProgram:
    """A whole source file: global declarations and procedures, in
    order."""

    items: tuple[Declaration | ProcedureDef, ...] = ()

    @property
    def procedures(self: Self) -> tuple[ProcedureDef, ...]:
        """Just the procedure definitions."""

        return tuple(i for i in self.items if isinstance(i, ProcedureDef))


INDENT = '    '


def _statement_lines(item: 'Declaration | Stmt', depth: int) -> list[str]:
    pad = INDENT * depth
    match item:
        case Declaration():
            return [f'{pad}{item};']
        case AssignStmt(lhs=lhs, rhs=rhs):
            return [f'{pad}{lhs} = {rhs};']
        case UseStmt(args=args):
            return [f"{pad}use({', '.join(map(str, args))});"]
        case OtherStmt():
            return [f'{pad}other;']
        case CallStmt(call=call):
            return [f'{pad}{call};']
        case ReturnStmt(value=None):
            return [f'{pad}return;']
        case ReturnStmt(value=value):
            return [f'{pad}return {value};']
        case IfStmt(cond=cond, then=then, otherwise=otherwise):
            lines = [f'{pad}if ({cond}) {{', *_block_lines(then, depth + 1)]
            if otherwise is not None:
                lines += [f'{pad}}} else {{',
                          *_block_lines(otherwise, depth + 1)]
            return lines + [f'{pad}}}']
        case WhileStmt(cond=cond, body=body):
            return [f'{pad}while ({cond}) {{',
                    *_block_lines(body, depth + 1), f'{pad}}}']
        case Block():
            return [f'{pad}{{', *_block_lines(item, depth + 1), f'{pad}}}']

    raise ValueError(f'Cannot print {item!r}')


def _block_lines(block: Block, depth: int) -> list[str]:
    lines: list[str] = []
    for item in block.items:
        lines.extend(_statement_lines(item, depth))

    return lines


def unparse(program: SourceProgram) -> str:
    """Print a syntax tree as mini-language source text."""

    lines: list[str] = []
    for item in program.items:
        if isinstance(item, Declaration):
            lines.append(f'{item};')
            continue

        params = ', '.join(map(str, item.params))
        lines.append(f'{item.return_type} {item.name}({params}) {{')
        lines.extend(_block_lines(item.body, 1))
        lines.append('}')

    return '\n'.join(lines) + '\n'
