# pylint: disable=missing-function-docstring, missing-class-docstring, invalid-name, no-member, import-error, line-too-long

"""Unit tests for lfcpa.config module."""

from dataclasses import replace
from pathlib import Path

from lfcpa.cli import build_parser  # pyright: ignore[reportMissingImports]
from lfcpa.config import (  # pyright: ignore[reportMissingImports]
    CONFIG_VARIABLE, DEFAULT_CONFIG, RunConfig, config_path, read_config,
    split_dumps
)
from lfcpa.corpus import SEED_VARIABLE  # pyright: ignore[reportMissingImports]

import pytest  # pyright: ignore[reportMissingImports]


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    monkeypatch.delenv(CONFIG_VARIABLE, raising=False)
    monkeypatch.delenv(SEED_VARIABLE, raising=False)


def arguments(*argv: str):
    return build_parser().parse_args(list(argv))


class TestConfigFile:
    """Tests for locating and reading the configuration file."""

    @pytest.mark.unit
    def test_explicit_path_wins(self, monkeypatch):
        monkeypatch.setenv(CONFIG_VARIABLE, '/elsewhere.toml')

        assert config_path('mine.toml') == Path('mine.toml')

    @pytest.mark.unit
    def test_environment_path(self, monkeypatch):
        monkeypatch.setenv(CONFIG_VARIABLE, '/elsewhere.toml')

        assert config_path() == Path('/elsewhere.toml')

    @pytest.mark.unit
    def test_default_path(self):
        assert config_path() == DEFAULT_CONFIG
        assert DEFAULT_CONFIG.name == 'lfcpa-tools.toml'

    @pytest.mark.unit
    def test_shipped_file_matches_defaults(self):
        assert RunConfig.from_table(read_config(DEFAULT_CONFIG)) == RunConfig()

    @pytest.mark.unit
    def test_no_file(self):
        assert read_config(None) == {}

    @pytest.mark.unit
    def test_missing_file(self, temp_dir):
        with pytest.raises(FileNotFoundError, match='was not found'):
            read_config(temp_dir / 'absent.toml')

    @pytest.mark.unit
    def test_invalid_file(self, temp_dir):
        path = temp_dir / 'bad.toml'
        path.write_text('mode = = 1\n', encoding='utf8')

        with pytest.raises(ValueError, match='Invalid configuration file'):
            read_config(path)


class TestSplitDumps:
    """Tests for split_dumps()."""

    @pytest.mark.unit
    @pytest.mark.parametrize('values, expected', [
        ('liveness', ('liveness',)),
        (['liveness,pointsto'], ('liveness', 'pointsto')),
        (['trace', 'Liveness, trace'], ('trace', 'liveness')),
        ([' , '], ()),
    ])
    def test_split(self, values, expected):
        assert split_dumps(values) == expected


class TestRunConfig:
    """Tests for the RunConfig class."""

    @pytest.mark.unit
    def test_defaults(self):
        config = RunConfig()

        assert config.mode == 'lfcpa'
        assert config.dumps == ('liveness', 'pointsto')
        assert config.format == 'text'
        assert config.order == 'rpo'
        assert config.fuel == 1000
        assert config.modes == ('lfcpa',)

    @pytest.mark.unit
    def test_from_table(self, mock_config_file):
        config = RunConfig.from_table(read_config(mock_config_file))

        assert config.log_level == 'INFO'
        assert config.ascii
        assert config.mode == 'both'
        assert config.modes == ('lfcpa', 'baseline')
        assert config.format == 'json'
        assert config.dumps == ('extractors',)
        assert config.order == 'reversed'
        assert config.fuel == 50
        assert config.statements == 7
        assert config.seed == 42
        assert config.extra == {'unrelated': {'key': 1}}

    @pytest.mark.unit
    def test_flags_override_file(self, mock_config_file):
        config = RunConfig.from_arguments(arguments(
            'prog.mc', '--config', str(mock_config_file), '--mode', 'lfcpa',
            '--dump', 'liveness', '--dump', 'trace', '-vv'))

        assert config.input == 'prog.mc'
        assert config.mode == 'lfcpa'
        assert config.dumps == ('liveness', 'trace')
        assert config.format == 'json'
        assert config.log_level == 'DEBUG'

    @pytest.mark.unit
    def test_switches(self):
        config = RunConfig.from_arguments(arguments(
            'prog.mc', '--ascii', '--trace-fixpoint', '-v'))

        assert config.ascii
        assert config.trace_fixpoint
        assert config.log_level == 'INFO'

    @pytest.mark.unit
    def test_seed_from_environment(self, monkeypatch, mock_config_file):
        monkeypatch.setenv(SEED_VARIABLE, '99')
        config = RunConfig.from_arguments(arguments(
            '--generate', 'mixed', '--config', str(mock_config_file)))

        assert config.seed == 99
        assert config.generate == 'mixed'

    @pytest.mark.unit
    def test_config_from_environment(self, monkeypatch, mock_config_file):
        monkeypatch.setenv(CONFIG_VARIABLE, str(mock_config_file))
        config = RunConfig.from_arguments(arguments('prog.mc'))

        assert config.fuel == 50

    @pytest.mark.unit
    @pytest.mark.parametrize('changes, message', [
        ({'input': None}, 'An input file is required'),
        ({'mode': 'fast'}, "Unknown mode 'fast'"),
        ({'format': 'xml'}, "Unknown format 'xml'"),
        ({'dumps': ()}, 'At least one dump must be selected'),
        ({'dumps': ('liveness', 'graph')}, "Unknown dump 'graph'"),
        ({'order': 'random'}, "Unknown worklist order 'random'"),
        ({'log_level': 'LOUD'}, "Unknown log level 'LOUD'"),
        ({'fuel': 0}, 'fuel must be positive'),
        ({'generate': 'huge'}, "Unknown program kind 'huge'"),
    ])
    def test_validate(self, changes, message):
        config = replace(RunConfig(input='prog.mc'), **changes)

        with pytest.raises(ValueError, match=message):
            config.validate()

    @pytest.mark.unit
    def test_bad_dump_flag(self):
        with pytest.raises(ValueError, match="Unknown dump 'everything'"):
            RunConfig.from_arguments(arguments('prog.mc', '--dump',
                                               'everything'))
