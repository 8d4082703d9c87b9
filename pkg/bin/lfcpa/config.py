"""Run configuration for the analyzer: defaults, the TOML configuration file
and command-line flags, merged in that order."""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace
import logging
import os
from pathlib import Path
import tomllib
from typing import Any, Self

from lfcpa.corpus import DEFAULT_STATEMENTS, SEED_VARIABLE, seed_from_env
from lfcpa.oracle import DEFAULT_FUEL
from lfcpa.solver import ORDERS

_logger = logging.getLogger(__name__)

CONFIG_VARIABLE = 'LFCPA_CONFIG'
DEFAULT_CONFIG = Path(__file__).resolve().parents[2] / 'config' / (
    'lfcpa-tools.toml')

RUN_MODES = ('lfcpa', 'baseline', 'both')
FORMATS = ('text', 'json')
DUMPS = ('liveness', 'pointsto', 'extractors', 'trace')
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


def config_path(explicit: str | None = None) -> Path | None:
    """The configuration file to read: `explicit`, then `LFCPA_CONFIG`, then
    the default file if it exists."""

    if explicit:
        return Path(explicit)
    if os.environ.get(CONFIG_VARIABLE):
        return Path(os.environ[CONFIG_VARIABLE])

    return DEFAULT_CONFIG if DEFAULT_CONFIG.is_file() else None


def read_config(path: Path | None) -> dict[str, Any]:
    """Load a TOML configuration file; `None` gives an empty table.

    Raises:
        OSError: If the file cannot be read
        ValueError: If the file is not valid TOML
    """

    if path is None:
        return {}

    try:
        with open(path, 'rb') as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as e:
        raise ValueError(f"Invalid configuration file '{path}': {e}") from e
    except FileNotFoundError as exc:
        raise FileNotFoundError(
            f"The configuration file '{path}' was not found") from exc

    _logger.debug('read configuration from %s', path)
    return data


def split_dumps(values: Sequence[str] | str) -> tuple[str, ...]:
    """Flatten repeated and comma-separated dump selections, keeping the
    first occurrence of each."""

    if isinstance(values, str):
        values = [values]

    dumps: list[str] = []
    for value in values:
        for item in value.split(','):
            item = item.strip().lower()
            if item and item not in dumps:
                dumps.append(item)

    return tuple(dumps)


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation of `analyze` needs."""

    input: str | None = None
    "Program file; `None` when generating"
    mode: str = 'lfcpa'
    dumps: tuple[str, ...] = ('liveness', 'pointsto')
    format: str = 'text'
    branches: str | None = None
    "Branch script file for traces"
    trace_fixpoint: bool = False
    output: str | None = None
    procedure: str | None = None
    "Analyze only this procedure"
    ascii: bool = False
    log_level: str = 'WARNING'
    order: str = 'rpo'
    fuel: int = DEFAULT_FUEL
    generate: str | None = None
    "Print a generated program of this kind instead of analyzing"
    statements: int = DEFAULT_STATEMENTS
    seed: int = 1
    extra: Mapping[str, Any] = field(default_factory=dict, compare=False)
    "Unrecognized configuration keys"

    @classmethod
    def from_table(cls: type[Self], table: Mapping[str, Any]) -> Self:
        """Build a configuration from a parsed TOML table."""

        analyze = table.get('analyze', {})
        known = {'log_level', 'ascii', 'analyze', 'solver', 'oracle',
                 'corpus'}
        config = cls(
            mode=analyze.get('mode', cls.mode),
            dumps=split_dumps(analyze.get('dump', list(cls.dumps))),
            format=analyze.get('format', cls.format),
            ascii=bool(table.get('ascii', cls.ascii)),
            log_level=str(table.get('log_level', cls.log_level)).upper(),
            order=table.get('solver', {}).get('order', cls.order),
            fuel=int(table.get('oracle', {}).get('fuel', cls.fuel)),
            statements=int(table.get('corpus', {}).get(
                'statements', cls.statements)),
            seed=int(table.get('corpus', {}).get('seed', cls.seed)),
            extra={k: v for k, v in table.items() if k not in known},
        )
        if config.extra:
            _logger.info('ignoring configuration keys %s',
                         ', '.join(sorted(config.extra)))

        return config

    @classmethod
    def from_arguments(cls: type[Self], args: Any) -> Self:
        """Merge the configuration file selected by `args.config` with the
        parsed command-line flags, and validate the result.

        Raises:
            ValueError: On invalid values
            OSError: If the configuration file cannot be read
        """

        config = cls.from_table(read_config(config_path(args.config)))
        if os.environ.get(SEED_VARIABLE):
            config = replace(config, seed=seed_from_env(config.seed))

        flags = {
            'input': args.input,
            'mode': args.mode,
            'format': args.format,
            'branches': args.branches,
            'output': args.output,
            'procedure': args.procedure,
            'generate': args.generate,
        }
        changes = {k: v for k, v in flags.items() if v is not None}
        if args.dump:
            changes['dumps'] = split_dumps(args.dump)
        if args.ascii:
            changes['ascii'] = True
        if args.trace_fixpoint:
            changes['trace_fixpoint'] = True
        if args.verbose:
            changes['log_level'] = 'INFO' if args.verbose == 1 else 'DEBUG'

        config = replace(config, **changes)
        config.validate()
        return config

    def validate(self: Self) -> None:
        """Reject inconsistent settings.

        Raises:
            ValueError: Naming the offending setting
        """

        if self.input is None and self.generate is None:
            raise ValueError('An input file is required')
        if self.mode not in RUN_MODES:
            raise ValueError(f"Unknown mode '{self.mode}'")
        if self.format not in FORMATS:
            raise ValueError(f"Unknown format '{self.format}'")
        if not self.dumps:
            raise ValueError('At least one dump must be selected')
        for dump in self.dumps:
            if dump not in DUMPS:
                raise ValueError(f"Unknown dump '{dump}'")
        if self.order not in ORDERS:
            raise ValueError(f"Unknown worklist order '{self.order}'")
        if self.log_level not in LOG_LEVELS:
            raise ValueError(f"Unknown log level '{self.log_level}'")
        if self.fuel <= 0:
            raise ValueError('fuel must be positive')
        if self.generate is not None and self.generate not in (
                'scalar', 'mixed'):
            raise ValueError(f"Unknown program kind '{self.generate}'")

    @property
    def modes(self: Self) -> tuple[str, ...]:
        """The solver modes to run."""

        return ('lfcpa', 'baseline') if self.mode == 'both' else (self.mode,)
