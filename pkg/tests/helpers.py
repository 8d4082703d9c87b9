"""Test utilities and helper functions for the LFCPA tools tests."""

import os
from pathlib import Path
import sys

# Add the bin directory to Python path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'bin'))

# pylint: disable=wrong-import-position
from lfcpa.cfg import Cfg, load_program  # noqa: E402  # pyright: ignore[reportMissingImports]
from lfcpa.data.ir import Use  # noqa: E402  # pyright: ignore[reportMissingImports]
from lfcpa.data.locations import parse_location  # noqa: E402  # pyright: ignore[reportMissingImports]
from lfcpa.data.relations import PointsToRelation  # noqa: E402  # pyright: ignore[reportMissingImports]

FIXTURES = Path(__file__).parent / 'fixtures'


def fixture_text(name: str) -> str:
    """The content of a file under `tests/fixtures`."""
    return (FIXTURES / name).read_text(encoding='utf8')


def P(text: str):
    """A location or target from its rendering."""
    return parse_location(text)


def paths(*texts: str) -> frozenset:
    """A set of locations from their renderings."""
    return frozenset(P(t) for t in texts)


def relation(*pairs: tuple[str, str]) -> PointsToRelation:
    """A points-to relation from rendered pairs."""
    return PointsToRelation.of((P(s), P(t)) for s, t in pairs)


def rendered(rel: PointsToRelation) -> set[tuple[str, str]]:
    """A relation as a set of rendered pairs."""
    return set(rel.render())


def names(items) -> set[str]:
    """A set of locations or targets as their renderings."""
    return {str(i) for i in items}


def load_cfg(source: str, procedure: str = 'main') -> Cfg:
    """Build the CFG of one procedure of `source`."""
    return load_program(source)[procedure]


def use_statements(cfg: Cfg) -> list[Use]:
    """The `use(...)` statements of a CFG in label order."""
    return [s for _, s in cfg.statements()
            if isinstance(s, Use) and s.origin == 'use']


def with_uses(source: str, *texts: str) -> str:
    """Insert one `use(...)` per expression before the final closing brace
    of `source`."""
    body, _, _ = source.rstrip().rpartition('}')
    lines = ''.join(f'    use({t});\n' for t in texts)
    return f'{body}{lines}}}\n'


def expressions(source: str, *texts: str):
    """Type-checked pointer expressions in the scope of the last procedure
    of `source`, with that procedure's type table."""
    cfgs = load_program(with_uses(source, *texts))
    cfg = list(cfgs.values())[-1]
    uses = use_statements(cfg)[-len(texts):]
    return [u.exprs[0] for u in uses], cfg.types


HEAP_RELATION = relation(
    ('a', 'o1'), ('y', 'o1.g'), ('x', 'b'), ('b.f', 'o1.g'), ('o1.g.f', '?'))
