# pylint: disable=missing-function-docstring, missing-class-docstring, invalid-name, no-member, import-error, line-too-long

"""Unit tests for lfcpa.json_io module."""

import gzip
import json
import re
from io import StringIO

from lfcpa.data.locations import ANYTHING, EVERYWHERE  # pyright: ignore[reportMissingImports]
from lfcpa.errors import ParseError  # pyright: ignore[reportMissingImports]
from lfcpa.json_io import (  # pyright: ignore[reportMissingImports]
    BasicEncoder, parse_branch_script, read_branch_script, read_content,
    read_plain_json, write_content, write_json_data
)

import pytest  # pyright: ignore[reportMissingImports]

from tests.helpers import P


class TestBasicEncoder:
    """Tests for the BasicEncoder class."""

    @pytest.mark.io
    def test_basic_encoder_handles_sets(self):
        """Test that plain sets become sorted lists."""
        assert BasicEncoder().default({3, 1, 2}) == [1, 2, 3]

    @pytest.mark.io
    def test_basic_encoder_handles_locations(self):
        """Test that locations and targets become their rendering."""
        encoder = BasicEncoder()

        assert encoder.default(P('o1.g.f')) == 'o1.g.f'
        assert encoder.default(EVERYWHERE) == 'T−{?}'
        assert encoder.default(frozenset({P('y'), P('b.f'), ANYTHING})) == [
            'T', 'b.f', 'y']

    @pytest.mark.io
    def test_basic_encoder_handles_objects_with_dict(self):
        """Test that other objects become their __dict__."""

        class Sample:
            def __init__(self):
                self.node = 4

        assert BasicEncoder().default(Sample()) == {'node': 4}


class TestReadContent:
    """Tests for read_content() and read_plain_json()."""

    @pytest.mark.io
    def test_read_content_from_file_handle(self):
        """Test reading from an open handle."""
        assert read_content(StringIO('int main() { }')) == 'int main() { }'

    @pytest.mark.io
    def test_read_content_from_plain_file(self, temp_dir):
        """Test reading a plain file."""
        path = temp_dir / 'prog.mc'
        path.write_text('int main() { other; }\n', encoding='utf8')

        assert read_content(str(path)) == 'int main() { other; }\n'

    @pytest.mark.io
    def test_read_content_from_gzip_file(self, temp_dir):
        """Test reading a compressed file."""
        path = temp_dir / 'prog.mc.gz'
        with gzip.open(path, 'wt', encoding='utf8') as fh:
            fh.write('// ⊥\n')

        assert read_content(str(path)) == '// ⊥\n'

    @pytest.mark.io
    def test_read_content_missing_file(self, temp_dir):
        """Test the message for a missing file."""
        name = str(temp_dir / 'absent.mc')

        with pytest.raises(FileNotFoundError,
                           match=re.escape(f"The file '{name}' was not found")):
            read_content(name)

    @pytest.mark.io
    def test_read_content_not_utf8(self, temp_dir):
        """Test that undecodable bytes become a ParseError."""
        path = temp_dir / 'binary.mc'
        path.write_bytes(b'\xff\xfe')

        with pytest.raises(ParseError,
                           match='not UTF-8 text: byte 0xff at offset 0'):
            read_content(str(path))

    @pytest.mark.io
    @pytest.mark.parametrize('file, message', [
        ('   ', 'cannot be empty'),
        (42, 'must be a string path'),
    ])
    def test_read_content_bad_argument(self, file, message):
        """Test rejection of unusable file arguments."""
        with pytest.raises(ValueError, match=message):
            read_content(file)

    @pytest.mark.io
    def test_read_plain_json(self):
        """Test decoding JSON from a handle."""
        assert read_plain_json(StringIO('{"a": [1, 2]}')) == {'a': [1, 2]}


class TestBranchScripts:
    """Tests for branch script parsing."""

    @pytest.mark.io
    @pytest.mark.parametrize('text, expected', [
        ('1 1 1 0', [True, True, True, False]),
        ('true,no\nYes  f', [True, False, True, False]),
        ('[1, 0, true, false]', [True, False, True, False]),
        ('', []),
        ('  \n', []),
    ])
    def test_parse(self, text, expected):
        """Test the accepted spellings."""
        assert parse_branch_script(text) == expected

    @pytest.mark.io
    def test_unknown_word(self):
        """Test that the position of a bad word is reported."""
        with pytest.raises(ValueError, match="'maybe' at position 3"):
            parse_branch_script('1 0 maybe')

    @pytest.mark.io
    def test_malformed_json(self):
        """Test a broken JSON array."""
        with pytest.raises(ValueError, match='Malformed branch script'):
            parse_branch_script('[1, 0')

    @pytest.mark.io
    def test_read_fixture(self, fixtures_dir):
        """Test reading the script shipped with the loop program."""
        script = read_branch_script(str(fixtures_dir / 'loop_list.branches'))

        assert script == [True, True, True, False]


class TestWriting:
    """Tests for write_json_data() and write_content()."""

    @pytest.mark.io
    def test_write_json_data_to_plain_file(self, temp_dir):
        """Test writing JSON with non-ASCII text kept as is."""
        path = temp_dir / 'out.json'

        write_json_data({'lin': ['q.⊥']}, str(path))

        text = path.read_text(encoding='utf8')
        assert 'q.⊥' in text
        assert json.loads(text) == {'lin': ['q.⊥']}

    @pytest.mark.io
    def test_write_json_data_to_compressed_file(self, temp_dir):
        """Test writing compressed JSON."""
        path = temp_dir / 'out.json.gz'

        write_json_data([1, 2], str(path))

        with gzip.open(path, 'rt', encoding='utf8') as fh:
            assert json.load(fh) == [1, 2]

    @pytest.mark.io
    def test_write_json_data_to_file_handle(self):
        """Test writing to a handle with encoder options."""
        out = StringIO()

        write_json_data({'b': 1, 'a': frozenset({P('x')})}, out,
                        json={'sort_keys': True})

        assert out.getvalue() == '{"a": ["x"], "b": 1}'

    @pytest.mark.io
    def test_write_json_data_missing_directory(self, temp_dir):
        """Test the message for an uncreatable file."""
        name = str(temp_dir / 'no' / 'such' / 'out.json')

        with pytest.raises(FileNotFoundError, match='Could not create file'):
            write_json_data({}, name)

    @pytest.mark.io
    def test_write_content(self, temp_dir):
        """Test writing text to files and handles."""
        plain, packed = temp_dir / 'out.txt', temp_dir / 'out.txt.gz'
        out = StringIO()

        write_content('id  stmt\n', str(plain))
        write_content('id  stmt\n', str(packed))
        write_content('id  stmt\n', out)

        assert plain.read_text(encoding='utf8') == 'id  stmt\n'
        assert read_content(str(packed)) == 'id  stmt\n'
        assert out.getvalue() == 'id  stmt\n'
