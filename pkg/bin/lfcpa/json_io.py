"""Input/output for the analyzer: reading program sources and branch
scripts, and writing JSON reports. File names ending in `.gz` are read and
written as gzip-compressed text; open file handles are used as they are."""

from collections.abc import Iterator
from contextlib import contextmanager
import gzip as GZ
from io import StringIO, TextIOWrapper
import json as JS
import re
from typing import Any, TextIO

from lfcpa.data.locations import AccessPath, Special, render
from lfcpa.errors import ParseError


type ReadableSource = str | TextIO | TextIOWrapper | StringIO
"""Type alias for any source that can be read as text, including file names and
file-like objects."""

type WritableSource = str | TextIO | TextIOWrapper | StringIO
"""Type alias for any destination that can be written as text, including file
names and file-like objects."""

HANDLE_TYPES = (TextIO, TextIOWrapper, StringIO)

# Branch scripts in plain-text form: one decision per token
BRANCH_TOKEN_RE = re.compile(r'[^\s,]+')
TRUE_WORDS = frozenset({'1', 't', 'true', 'y', 'yes'})
FALSE_WORDS = frozenset({'0', 'f', 'false', 'n', 'no'})


class BasicEncoder(JS.JSONEncoder):
    """JSON encoder for analysis data. Sets become sorted lists (sorted by
    the canonical rendering for locations), locations and targets become
    their rendering, and other objects become their `dict`."""

    def default(self, o):
        """Default handler for anything that is an object."""

        if isinstance(o, (AccessPath, Special)):
            return render(o)

        if isinstance(o, (set, frozenset)):
            # Locations sort by rendering; anything else by value
            if all(isinstance(i, (AccessPath, Special)) for i in o):
                return sorted(render(i) for i in o)
            return sorted(o)

        return o.__dict__


def _check_name(file: Any) -> str:
    """Validate a file-name argument."""

    if not isinstance(file, str):
        raise ValueError(
            "File parameter must be a string path or file-like object"
        )
    if not file.strip():
        raise ValueError("File path cannot be empty or whitespace")

    return file


@contextmanager
def _open_text(file: str, mode: str, **gzip_args: Any) -> Iterator[TextIO]:
    """Open `file` as text, compressed when its name ends in `.gz`."""

    if file.lower().endswith('.gz'):
        with GZ.open(file, mode + 't', encoding='utf8', **gzip_args) as fh:
            yield fh
    else:
        with open(file, mode, encoding='utf8') as fh:
            yield fh


def _not_text(what: str, error: UnicodeDecodeError) -> ParseError:
    return ParseError(
        f'{what} is not UTF-8 text: byte 0x{error.object[error.start]:02x} '
        f'at offset {error.start}')


def read_content(file: ReadableSource) -> str:
    """Read the whole content of `file`, a path or an open handle.

    Args:
        file: A file path (string) or an open file-like object

    Returns:
        The content of the file as a string

    Raises:
        FileNotFoundError: If the specified file does not exist
        PermissionError: If permission is denied to read the file
        OSError: If other I/O errors occur
        ValueError: If file parameter is not a valid type
        ParseError: If the content is not UTF-8 text
    """

    if isinstance(file, HANDLE_TYPES):
        # Read from the caller's handle without closing it
        try:
            return file.read()
        except UnicodeDecodeError as e:
            raise _not_text('input', e) from e

    name = _check_name(file)
    try:
        with _open_text(name, 'r') as fh:
            return fh.read()
    except UnicodeDecodeError as e:
        raise _not_text(f"'{name}'", e) from e
    except FileNotFoundError as exc:
        raise FileNotFoundError(f"The file '{name}' was not found") from exc
    except PermissionError as exc:
        raise PermissionError(
            f"Permission denied when trying to read '{name}'") from exc
    except OSError as e:
        raise OSError(f"I/O error when reading '{name}': {e}") from e


def read_plain_json(file: ReadableSource) -> Any:
    """Read and decode JSON content from `file`."""

    return JS.loads(read_content(file))


def parse_branch_script(text: str) -> list[bool]:
    """Decode a branch script: either a JSON array of booleans/integers, or
    whitespace/comma separated words such as `1 0 true no`.

    Raises:
        ValueError: On a word that is not a recognizable decision
    """

    stripped = text.strip()
    if stripped.startswith('['):
        try:
            values = JS.loads(stripped)
        except JS.JSONDecodeError as e:
            raise ValueError(f'Malformed branch script: {e}') from e
        return [bool(v) for v in values]

    decisions: list[bool] = []
    for number, word in enumerate(BRANCH_TOKEN_RE.findall(stripped), 1):
        lowered = word.lower()
        if lowered in TRUE_WORDS:
            decisions.append(True)
        elif lowered in FALSE_WORDS:
            decisions.append(False)
        else:
            raise ValueError(
                f"Unrecognized branch decision '{word}' at position {number}")

    return decisions


def read_branch_script(file: ReadableSource) -> list[bool]:
    """Read a branch script from a path or an open handle."""

    return parse_branch_script(read_content(file))


def write_json_data(
    data: Any, file: WritableSource, *,
    json: dict[str, Any] | None = None, gzip: dict[str, Any] | None = None
) -> None:
    """Write `data` as JSON, gzip-compressed for `.gz` file names.

    Args:
        data: The data structure to write as JSON
        file: A file path (string) or an open file-like object
        json: Optional JSON encoder arguments (e.g., indent, sort_keys)
        gzip: Optional gzip compression arguments (e.g., compresslevel)

    Raises:
        FileNotFoundError: If the specified file path cannot be created
        PermissionError: If permission is denied to write the file
        OSError: If other I/O errors occur
        ValueError: If file parameter is not a valid type
    """

    json_args: dict[str, Any] = {
        'cls': BasicEncoder,
        'ensure_ascii': False,
    }
    if json is not None:
        json_args |= json

    if isinstance(file, HANDLE_TYPES):
        # Write to the caller's handle without closing it
        JS.dump(data, file, **json_args)
        return

    name = _check_name(file)
    gzip_args: dict[str, Any] = {}
    if name.lower().endswith('.gz'):
        gzip_args = {'compresslevel': 9} | (gzip or {})

    try:
        with _open_text(name, 'w', **gzip_args) as fh:
            JS.dump(data, fh, **json_args)
    except FileNotFoundError as exc:
        raise FileNotFoundError(f"Could not create file '{name}'") from exc
    except PermissionError as exc:
        raise PermissionError(
            f"Permission denied when trying to write '{name}'") from exc
    except OSError as e:
        raise OSError(f"I/O error when writing '{name}': {e}") from e


def write_content(text: str, file: WritableSource) -> None:
    """Write `text` to a path (gzip-compressed for `.gz` names) or an open
    handle.

    Raises:
        PermissionError: If permission is denied to write the file
        OSError: If other I/O errors occur
        ValueError: If file parameter is not a valid type
    """

    if isinstance(file, HANDLE_TYPES):
        file.write(text)
        return

    name = _check_name(file)
    try:
        with _open_text(name, 'w') as fh:
            fh.write(text)
    except PermissionError as exc:
        raise PermissionError(
            f"Permission denied when trying to write '{name}'") from exc
    except OSError as e:
        raise OSError(f"I/O error when writing '{name}': {e}") from e
