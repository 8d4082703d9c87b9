"""Seeded generators of random, type-correct programs: scalar programs whose
pointers are all plain variables, and mixed programs over structs, arrays,
heap cells and unions. Each program comes with a branch script for the
interpreter."""

from dataclasses import dataclass
import logging
import os
import random
from typing import Callable, Self

_logger = logging.getLogger(__name__)

SEED_VARIABLE = 'ANALYZE_SEED'
DEFAULT_SEED = 1
DEFAULT_STATEMENTS = 20
MAX_DEPTH = 2

SCALAR_DECLARATIONS = '''\
int main() {
    int a, b, c;
    int *p, *q, *r;
    int **pp, **qq;
'''

MIXED_DECLARATIONS = '''\
struct node { struct node *next; int *val; int n; };
struct pair { int *first; int *second; };
union cell { int *ip; struct node *np; };

int main() {
    int a, b, i;
    int *p, *q;
    int *arr[4];
    int **pp;
    struct node s, t, *n, *m;
    struct pair pr, pr2;
    union cell u;
'''

MIXED_PROLOGUE = ('p = &a;', 'q = &b;', 'n = &s;', 'm = &t;', 'pp = &p;')


def seed_from_env(default: int = DEFAULT_SEED) -> int:
    """The seed in `ANALYZE_SEED`, or `default`.

    Raises:
        ValueError: If the variable is set but not an integer
    """

    value = os.environ.get(SEED_VARIABLE)
    if value is None or not value.strip():
        return default

    try:
        return int(value)
    except ValueError as e:
        raise ValueError(
            f"{SEED_VARIABLE} must be an integer, not '{value}'") from e


@dataclass(frozen=True)
class GeneratedProgram:
    """A generated source text and a branch script to run it with."""

    source: str
    branches: tuple[bool, ...]
    seed: int
    kind: str


class _Generator:
    """Emits statements until the budget is spent."""

    def __init__(
        self: Self, rng: random.Random,
        simple: list[Callable[[random.Random], str]],
        conditions: list[str], budget: int
    ) -> None:
        self.rng = rng
        self.simple = simple
        self.conditions = conditions
        self.budget = budget
        self.lines: list[str] = []

    def emit(self: Self, text: str, depth: int) -> None:
        self.lines.append('    ' * (depth + 1) + text)

    def block(self: Self, depth: int, length: int) -> None:
        for _ in range(length):
            if self.budget <= 0:
                return
            self.budget -= 1

            roll = self.rng.random()
            if depth < MAX_DEPTH and roll < 0.12:
                self.emit(f'if ({self.rng.choice(self.conditions)}) {{',
                          depth)
                self.block(depth + 1, self.rng.randint(1, 3))
                if self.rng.random() < 0.5:
                    self.emit('} else {', depth)
                    self.block(depth + 1, self.rng.randint(1, 3))
                self.emit('}', depth)
            elif depth < MAX_DEPTH and roll < 0.2:
                self.emit(f'while ({self.rng.choice(self.conditions)}) {{',
                          depth)
                self.block(depth + 1, self.rng.randint(1, 3))
                self.emit('}', depth)
            else:
                self.emit(self.rng.choice(self.simple)(self.rng), depth)


def _pick(*options: str) -> Callable[[random.Random], str]:
    return lambda rng: rng.choice(options)


SCALAR_STATEMENTS = [
    _pick('p = &a;', 'p = &b;', 'q = &b;', 'q = &c;', 'r = &a;', 'r = &c;'),
    _pick('pp = &p;', 'pp = &q;', 'qq = &r;', 'qq = &p;'),
    _pick('p = q;', 'q = r;', 'r = p;', 'pp = qq;', 'qq = pp;'),
    _pick('p = *pp;', 'q = *qq;', 'r = *pp;'),
    _pick('*pp = p;', '*pp = r;', '*qq = q;'),
    _pick('use(p);', 'use(q);', 'use(r);', 'use(pp);', 'use(qq);'),
    _pick('other;'),
]

SCALAR_CONDITIONS = ['p', 'q', 'pp', 'qq']

MIXED_STATEMENTS = [
    _pick('p = &a;', 'q = &b;', 'p = q;', 'q = p;'),
    lambda rng: f'arr[{rng.randrange(4)}] = {rng.choice("pq")};',
    lambda rng: f'{rng.choice("pq")} = arr[{rng.randrange(4)}];',
    _pick('arr[i] = q;', 'p = arr[i];', 'pp = &arr[i];'),
    lambda rng: f'pp = &arr[{rng.randrange(4)}];',
    _pick('pp = &p;', 'pp = pp + 1;', 'p = *pp;', '*pp = q;', 'p = *(pp + 1);'),
    _pick('n = &s;', 'n = &t;', 'm = n;', 'n = m;',
          'n = (struct node *) malloc(sizeof(struct node));',
          'm = malloc(sizeof(struct node));'),
    _pick('n->next = m;', 'm = n->next;', 'n->val = p;', 'p = n->val;',
          's.next = n;', 'n = s.next;', 'm->next = n->next;'),
    _pick('pr.first = p;', 'pr.second = q;', 'pr2 = pr;', 'q = pr2.first;',
          's = t;', 't.val = &b;'),
    _pick('u.ip = p;', 'p = u.ip;', 'u.np = n;', 'm = u.np;'),
    _pick('use(p);', 'use(n->val);', 'use(*pp);', 'use(n, m);',
          'n->n = 1;', 'other;', 'i = i + 1;'),
]

MIXED_CONDITIONS = ['p', 'n', 'm', 'n->next', 'p == q', '*pp']


def _finish(lines: list[str], rng: random.Random, ret: list[str]) -> str:
    if rng.random() < 0.5:
        lines.append(f'    return {rng.choice(ret)};')
    lines.append('}')

    return '\n'.join(lines) + '\n'


def generate_scalar(
    seed: int | None = None, statements: int = DEFAULT_STATEMENTS
) -> GeneratedProgram:
    """A random program over scalar pointer variables."""

    seed = seed_from_env() if seed is None else seed
    rng = random.Random(seed)
    gen = _Generator(rng, SCALAR_STATEMENTS, SCALAR_CONDITIONS, statements)
    gen.block(0, statements)

    source = _finish([SCALAR_DECLARATIONS.rstrip('\n'), *gen.lines], rng,
                     ['p', 'q', 'r'])
    branches = tuple(rng.random() < 0.5 for _ in range(2 * statements))
    _logger.debug('generated scalar program with seed %d', seed)

    return GeneratedProgram(source, branches, seed, 'scalar')


def generate_mixed(
    seed: int | None = None, statements: int = DEFAULT_STATEMENTS
) -> GeneratedProgram:
    """A random program over structs, arrays, heap cells and unions."""

    seed = seed_from_env() if seed is None else seed
    rng = random.Random(seed)
    gen = _Generator(rng, MIXED_STATEMENTS, MIXED_CONDITIONS, statements)
    for text in MIXED_PROLOGUE:
        gen.emit(text, 0)
    gen.block(0, statements)

    source = _finish([MIXED_DECLARATIONS.rstrip('\n'), *gen.lines], rng,
                     ['p', 'n->val', 'm'])
    branches = tuple(rng.random() < 0.6 for _ in range(3 * statements))
    _logger.debug('generated mixed program with seed %d', seed)

    return GeneratedProgram(source, branches, seed, 'mixed')


GENERATORS = {'scalar': generate_scalar, 'mixed': generate_mixed}
