"""Shared pytest fixtures and configuration for the LFCPA tools tests."""

import os
from pathlib import Path
import sys
import tempfile
from typing import Callable, Generator

import pytest  # pyright: ignore[reportMissingImports]

# Add the bin directory to the Python path for imports
bin_path = os.path.join(os.path.dirname(__file__), '..', 'bin')
if bin_path not in sys.path:
    sys.path.insert(0, bin_path)

# pylint: disable=wrong-import-position
from tests.helpers import (  # noqa: E402
    FIXTURES, HEAP_RELATION, load_cfg, fixture_text
)


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def fixtures_dir() -> Path:
    """The directory holding the sample programs."""
    return FIXTURES


@pytest.fixture
def program_text() -> Callable[[str], str]:
    """Read a sample program by file name."""
    return fixture_text


@pytest.fixture
def heap_struct_source() -> str:
    """The heap-allocated struct program."""
    return fixture_text('heap_struct.mc')


@pytest.fixture
def heap_struct_cfg():
    """The CFG of the heap-allocated struct program."""
    return load_cfg(fixture_text('heap_struct.mc'))


@pytest.fixture
def empty_cfg():
    """The CFG of a procedure without statements."""
    return load_cfg(fixture_text('empty.mc'))


@pytest.fixture
def heap_relation():
    """The points-to relation holding after the last assignment of the
    heap-allocated struct program."""
    return HEAP_RELATION


@pytest.fixture
def mock_config_file(temp_dir: Path) -> Path:
    """A configuration file overriding some defaults."""
    path = temp_dir / 'lfcpa-tools.toml'
    path.write_text('''\
log_level = "INFO"
ascii = true

[analyze]
mode = "both"
format = "json"
dump = ["extractors"]

[solver]
order = "reversed"

[oracle]
fuel = 50

[corpus]
statements = 7
seed = 42

[unrelated]
key = 1
''', encoding='utf8')
    return path
