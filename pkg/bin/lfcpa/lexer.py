"""Split mini-language source text into tokens. A single pre-compiled
pattern with named groups does the work; comments and whitespace are
dropped while line and column numbers are tracked."""

from collections import deque
from dataclasses import dataclass
import re
from typing import Self

from lfcpa.errors import ParseError

# Pre-compiled token pattern. Order matters: longer punctuators first.
TOKEN_RE = re.compile(r'''
    (?P<newline>\n)
  | (?P<space>[ \t\r\f\v]+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<number>\d+)
  | (?P<ident>[A-Za-z_]\w*)
  | (?P<punct>->|==|!=|<=|>=|&&|\|\||[-+*&!<>=.,;:()\[\]{}])
''', re.VERBOSE | re.DOTALL)

KEYWORDS = frozenset({
    'struct', 'union', 'typedef', 'sizeof', 'use', 'other', 'if', 'else',
    'while', 'return', 'int', 'char', 'void', 'long', 'short',
})

SCALAR_KEYWORDS = frozenset({'int', 'char', 'void', 'long', 'short'})


@dataclass(frozen=True)
class Token:
    """One lexical token."""

    kind: str
    "One of 'ident', 'number', 'keyword', 'punct' or 'eof'"
    text: str
    "The source text of the token"
    line: int
    "1-based line"
    column: int
    "1-based column"

    def is_a(self: Self, text: str) -> bool:
        """True for a keyword or punctuator spelled `text`."""

        return self.kind in ('keyword', 'punct') and self.text == text


def tokenize(text: str) -> deque[Token]:
    """Turn `text` into a queue of tokens ending with an 'eof' token.

    Raises:
        ParseError: On a character that starts no token, or an unterminated
            block comment
    """

    tokens: deque[Token] = deque()
    line, line_start, pos = 1, 0, 0

    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        column = pos - line_start + 1
        if m is None:
            if text.startswith('/*', pos):
                raise ParseError('unterminated comment', line, column)
            raise ParseError(f"unexpected character '{text[pos]}'",
                             line, column)

        kind = m.lastgroup
        value = m.group()
        if kind == 'ident' and value in KEYWORDS:
            kind = 'keyword'

        if kind in ('ident', 'keyword', 'number', 'punct'):
            tokens.append(Token(kind, value, line, column))

        # Keep line accounting right for newlines inside block comments
        newlines = value.count('\n')
        if newlines:
            line += newlines
            line_start = m.start() + value.rfind('\n') + 1
        pos = m.end()

    tokens.append(Token('eof', '', line, pos - line_start + 1))
    return tokens
