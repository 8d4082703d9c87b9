"""Recursive-descent parser for the C-like mini-language. Expressions follow
C's precedences and associativities; typedef names are tracked while
parsing so that declarations and expressions can be told apart."""

from collections import deque
from typing import Self

from lfcpa.data.syntax import (
    AggregateSpec, AssignStmt, Binary, Block, Call, CallStmt, Cast,
    Declaration, Declarator, Expr, IfStmt, Member, Name, NamedType, Number,
    OtherStmt, Position, ProcedureDef, ReturnStmt, SizeOf, SourceProgram,
    Stmt, Subscript, TypeName, TypeSpec, Unary, UseStmt, WhileStmt
)
from lfcpa.errors import ParseError
from lfcpa.json_io import ReadableSource, read_content
from lfcpa.lexer import SCALAR_KEYWORDS, Token, tokenize

# Binary operators, loosest first. All are left-associative.
BINARY_LEVELS = (
    ('||',),
    ('&&',),
    ('==', '!='),
    ('<', '<=', '>', '>='),
    ('+', '-'),
    ('*',),
)
PREFIX_OPERATORS = ('*', '&', '-', '!')

# Constants
MAX_NESTING_DEPTH = 100


def position(tok: Token) -> Position:
    """The source position of a token."""

    return Position(tok.line, tok.column)


class Parser:
    """Holds the token queue and the typedef names seen so far."""

    def __init__(self: Self, tokens: deque[Token]) -> None:
        self.tokens = tokens
        self.typedefs: set[str] = set()
        self.depth = 0

    # Token plumbing

    def peek(self: Self, ahead: int = 0) -> Token:
        """Look at a token without consuming it."""

        if ahead < len(self.tokens):
            return self.tokens[ahead]

        return self.tokens[-1]

    def advance(self: Self) -> Token:
        """Consume one token (the final 'eof' token is never consumed)."""

        tok = self.tokens[0]
        if tok.kind != 'eof':
            self.tokens.popleft()

        return tok

    def accept(self: Self, text: str) -> Token | None:
        """Consume the next token if it is spelled `text`."""

        if self.peek().is_a(text):
            return self.advance()

        return None

    def expect(self: Self, text: str) -> Token:
        """Consume a token spelled `text` or fail."""

        tok = self.accept(text)
        if tok is None:
            raise self.error(f"expected '{text}'")

        return tok

    def expect_ident(self: Self) -> Token:
        """Consume an identifier or fail."""

        tok = self.peek()
        if tok.kind != 'ident':
            raise self.error('expected an identifier')

        return self.advance()

    def error(self: Self, message: str, tok: Token | None = None) -> ParseError:
        """Build a `ParseError` at `tok` (default: the next token)."""

        tok = tok or self.peek()
        found = 'end of input' if tok.kind == 'eof' else f"'{tok.text}'"
        return ParseError(f'{message}, found {found}', tok.line, tok.column)

    def nest(self: Self) -> None:
        """Track recursion depth."""

        self.depth += 1
        if self.depth > MAX_NESTING_DEPTH:
            raise self.error('maximum nesting depth exceeded')

    def at_type_start(self: Self, ahead: int = 0) -> bool:
        """True if a type specifier starts `ahead` tokens from here."""

        tok = self.peek(ahead)
        if tok.kind == 'keyword':
            return tok.text in SCALAR_KEYWORDS or tok.text in (
                'struct', 'union', 'typedef')

        return tok.kind == 'ident' and tok.text in self.typedefs

    # Declarations

    def program(self: Self) -> SourceProgram:
        """program := (declaration | procedure)* eof"""

        items: list[Declaration | ProcedureDef] = []
        while self.peek().kind != 'eof':
            if not self.at_type_start():
                raise self.error('expected a declaration or a procedure')
            items.append(self.external())

        return SourceProgram(tuple(items))

    def external(self: Self) -> Declaration | ProcedureDef:
        """A top-level declaration, typedef or procedure definition."""

        start = self.peek()
        typedef = self.accept('typedef') is not None
        spec = self.type_spec()
        if self.accept(';'):
            return Declaration(spec, (), typedef, position(start))

        first = self.declarator()
        if not typedef and not first.dims and self.peek().is_a('('):
            return self.procedure(spec, first, start)

        declarators = [first]
        while self.accept(','):
            declarators.append(self.declarator())
        self.expect(';')

        if typedef:
            self.typedefs.update(d.name for d in declarators)

        return Declaration(spec, tuple(declarators), typedef, position(start))

    def procedure(
        self: Self, spec: TypeSpec, head: Declarator, start: Token
    ) -> ProcedureDef:
        """The parameter list and body of a procedure."""

        self.expect('(')
        params: list[Declaration] = []
        if self.peek().is_a('void') and self.peek(1).is_a(')'):
            self.advance()
        elif not self.peek().is_a(')'):
            while True:
                param_start = self.peek()
                param_spec = self.type_spec()
                params.append(Declaration(param_spec, (self.declarator(),),
                                          pos=position(param_start)))
                if not self.accept(','):
                    break
        self.expect(')')

        body = self.block()
        return ProcedureDef(TypeName(spec, head.pointers), head.name,
                            tuple(params), body, position(start))

    def type_spec(self: Self) -> TypeSpec:
        """A scalar keyword, a struct/union specifier or a typedef name."""

        tok = self.peek()
        if tok.kind == 'keyword' and tok.text in SCALAR_KEYWORDS:
            self.advance()
            return NamedType(tok.text, position(tok))

        if tok.is_a('struct') or tok.is_a('union'):
            self.advance()
            tag = None
            if self.peek().kind == 'ident':
                tag = self.advance().text
            members = None
            if self.accept('{'):
                members = self.member_list()
            if tag is None and members is None:
                raise self.error(f'expected a tag or a body after {tok.text}')
            return AggregateSpec(tok.text, tag, members, position(tok))

        if tok.kind == 'ident' and tok.text in self.typedefs:
            self.advance()
            return NamedType(tok.text, position(tok))

        raise self.error('expected a type')

    def member_list(self: Self) -> tuple[Declaration, ...]:
        """Members of a struct/union body, after the opening brace."""

        self.nest()
        members: list[Declaration] = []
        while not self.accept('}'):
            start = self.peek()
            spec = self.type_spec()
            declarators = [self.declarator()]
            while self.accept(','):
                declarators.append(self.declarator())
            self.expect(';')
            members.append(Declaration(spec, tuple(declarators),
                                       pos=position(start)))
        self.depth -= 1

        return tuple(members)

    def declarator(self: Self) -> Declarator:
        """declarator := '*'* ident ('[' number ']')*"""

        start = self.peek()
        pointers = 0
        while self.accept('*'):
            pointers += 1
        name = self.expect_ident().text

        dims: list[int] = []
        while self.accept('['):
            tok = self.peek()
            if tok.kind != 'number':
                raise self.error('expected an array extent')
            self.advance()
            dims.append(int(tok.text))
            self.expect(']')

        return Declarator(name, pointers, tuple(dims), position(start))

    def type_name(self: Self) -> TypeName:
        """A type specifier followed by pointer stars."""

        start = self.peek()
        spec = self.type_spec()
        pointers = 0
        while self.accept('*'):
            pointers += 1

        return TypeName(spec, pointers, position(start))

    # Statements

    def block(self: Self) -> Block:
        """block := '{' (declaration | statement)* '}'"""

        start = self.expect('{')
        self.nest()
        items: list[Declaration | Stmt] = []
        while not self.accept('}'):
            if self.peek().kind == 'eof':
                raise self.error("expected '}'")
            if self.at_type_start() and not self.peek().is_a('typedef'):
                items.append(self.local_declaration())
            else:
                items.append(self.statement())
        self.depth -= 1

        return Block(tuple(items), position(start))

    def local_declaration(self: Self) -> Declaration:
        """A variable declaration inside a procedure."""

        start = self.peek()
        spec = self.type_spec()
        declarators = [self.declarator()]
        while self.accept(','):
            declarators.append(self.declarator())
        self.expect(';')

        return Declaration(spec, tuple(declarators), pos=position(start))

    def body(self: Self) -> Block:
        """A block, or a single statement wrapped as one."""

        if self.peek().is_a('{'):
            return self.block()

        start = self.peek()
        return Block((self.statement(),), position(start))

    def statement(self: Self) -> Stmt:
        """One statement."""

        tok = self.peek()
        pos = position(tok)

        if tok.is_a('if'):
            self.advance()
            self.expect('(')
            cond = self.expression()
            self.expect(')')
            then = self.body()
            otherwise = self.body() if self.accept('else') else None
            return IfStmt(cond, then, otherwise, pos)

        if tok.is_a('while'):
            self.advance()
            self.expect('(')
            cond = self.expression()
            self.expect(')')
            return WhileStmt(cond, self.body(), pos)

        if tok.is_a('return'):
            self.advance()
            value = None if self.peek().is_a(';') else self.expression()
            self.expect(';')
            return ReturnStmt(value, pos)

        if tok.is_a('use'):
            self.advance()
            self.expect('(')
            args = () if self.peek().is_a(')') else self.arguments()
            self.expect(')')
            self.expect(';')
            return UseStmt(args, pos)

        if tok.is_a('other') or tok.is_a(';'):
            if tok.is_a('other'):
                self.advance()
            self.expect(';')
            return OtherStmt(pos)

        if tok.is_a('{'):
            return self.block()

        target = self.expression()
        if self.accept('='):
            value = self.expression()
            self.expect(';')
            return AssignStmt(target, value, pos)
        if isinstance(target, Call):
            self.expect(';')
            return CallStmt(target, pos)

        raise self.error('expected an assignment or a call', tok)

    # Expressions

    def arguments(self: Self) -> tuple[Expr, ...]:
        """A comma-separated, non-empty expression list."""

        args = [self.expression()]
        while self.accept(','):
            args.append(self.expression())

        return tuple(args)

    def expression(self: Self, level: int = 0) -> Expr:
        """Binary expressions by precedence climbing."""

        if level == len(BINARY_LEVELS):
            return self.unary()

        left = self.expression(level + 1)
        while (self.peek().kind == 'punct' and
               self.peek().text in BINARY_LEVELS[level]):
            op = self.advance()
            right = self.expression(level + 1)
            left = Binary(op.text, left, right, position(op))

        return left

    def unary(self: Self) -> Expr:
        """Prefix operators, casts and sizeof."""

        tok = self.peek()
        self.nest()
        try:
            if tok.kind == 'punct' and tok.text in PREFIX_OPERATORS:
                self.advance()
                return Unary(tok.text, self.unary(), position(tok))

            if tok.is_a('(') and self.at_type_start(1):
                self.advance()
                type_name = self.type_name()
                self.expect(')')
                return Cast(type_name, self.unary(), position(tok))

            if tok.is_a('sizeof'):
                self.advance()
                self.expect('(')
                type_name = self.type_name()
                self.expect(')')
                return SizeOf(type_name, position(tok))

            return self.postfix()
        finally:
            self.depth -= 1

    def postfix(self: Self) -> Expr:
        """Member selection, subscripts and calls."""

        expr = self.primary()
        while True:
            tok = self.peek()
            if tok.is_a('->') or tok.is_a('.'):
                self.advance()
                name = self.expect_ident().text
                expr = Member(expr, name, tok.text == '->', position(tok))
            elif tok.is_a('['):
                self.advance()
                index = self.expression()
                self.expect(']')
                expr = Subscript(expr, index, position(tok))
            elif tok.is_a('(') and isinstance(expr, Name):
                self.advance()
                args = () if self.peek().is_a(')') else self.arguments()
                self.expect(')')
                expr = Call(expr.ident, args, expr.pos)
            else:
                return expr

    def primary(self: Self) -> Expr:
        """Identifiers, literals and parenthesized expressions."""

        tok = self.peek()
        if tok.kind == 'ident':
            self.advance()
            return Name(tok.text, position(tok))
        if tok.kind == 'number':
            self.advance()
            return Number(int(tok.text), position(tok))
        if self.accept('('):
            expr = self.expression()
            self.expect(')')
            return expr

        raise self.error('expected an expression')


def parse(text: str) -> SourceProgram:
    """Parse mini-language source text.

    Raises:
        ParseError: On any lexical or syntax error, with line and column
    """

    return Parser(tokenize(text)).program()


def parse_file(file: ReadableSource) -> SourceProgram:
    """Read and parse a program from a file name or an open file. Names
    ending in `.gz` are read as compressed text."""

    return parse(read_content(file))
