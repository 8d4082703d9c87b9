"""The `analyze` command: parse a program, run the analysis on each of its
procedures and print the selected tables.

Exit status is 0 on success, 1 for errors in the analyzed program or its
input files, and 2 for failures of the analyzer itself."""

import argparse
import logging
import sys
from typing import Any, Sequence

from lfcpa import __version__
from lfcpa.cfg import Cfg, load_program
from lfcpa.config import DUMPS, FORMATS, RUN_MODES, RunConfig
from lfcpa.corpus import GENERATORS
from lfcpa.data.results import AnalysisResult
from lfcpa.errors import (
    AnalysisError, ParseError, ProgramError, TypeCheckError
)
from lfcpa.json_io import (
    read_branch_script, read_content, write_content, write_json_data
)
from lfcpa.oracle import check_soundness, run
from lfcpa.report import (
    compare_modes, comparison_lines, result_document, result_table,
    snapshot_lines, trace_document, trace_lines
)
from lfcpa.solver import solve, verify_fixpoint

_logger = logging.getLogger(__name__)

LOG_FORMAT = '%(levelname)s %(name)s: %(message)s'

EXIT_OK = 0
EXIT_PROGRAM_ERROR = 1
EXIT_INTERNAL_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    """The command-line syntax."""

    parser = argparse.ArgumentParser(
        prog='analyze',
        description='Liveness-based flow-sensitive points-to analysis.')
    parser.add_argument('input', nargs='?',
                        help='program file (.gz accepted)')
    parser.add_argument('--dump', action='append', metavar='LIST',
                        help='what to show, comma separated: '
                        f"{', '.join(DUMPS)} (repeatable)")
    parser.add_argument('--format', choices=FORMATS,
                        help='output format')
    parser.add_argument('--mode', choices=RUN_MODES,
                        help='analysis to run')
    parser.add_argument('--branches', metavar='FILE',
                        help='branch script for --dump=trace')
    parser.add_argument('--trace-fixpoint', action='store_true',
                        help='show per-phase snapshots and verify the '
                        'fixpoint')
    parser.add_argument('--procedure', metavar='NAME',
                        help='analyze only this procedure')
    parser.add_argument('-o', '--output', metavar='FILE',
                        help='write the report to FILE (.gz compresses)')
    parser.add_argument('--ascii', action='store_true',
                        help='use ASCII spellings of special symbols')
    parser.add_argument('--config', metavar='FILE',
                        help='configuration file')
    parser.add_argument('--generate', choices=tuple(GENERATORS),
                        help='print a random program instead of analyzing')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='more logging (repeat for debug output)')
    parser.add_argument('--version', action='version',
                        version=f'%(prog)s {__version__}')

    return parser


def select_procedures(
    cfgs: dict[str, Cfg], name: str | None
) -> list[Cfg]:
    """The CFGs to analyze, in source order.

    Raises:
        TypeCheckError: If `name` is not a procedure of the program
    """

    if name is None:
        return list(cfgs.values())
    if name not in cfgs:
        raise TypeCheckError(f"no procedure named '{name}'")

    return [cfgs[name]]


def analyze(config: RunConfig) -> tuple[list[str], list[dict[str, Any]]]:
    """Run everything `config` asks for; returns the text lines and the
    JSON documents of the report."""

    cfgs = load_program(read_content(config.input))
    branches: list[bool] = []
    if config.branches:
        try:
            branches = read_branch_script(config.branches)
        except ValueError as e:
            raise ParseError(f'{config.branches}: {e}') from e

    lines: list[str] = []
    documents: list[dict[str, Any]] = []
    for cfg in select_procedures(cfgs, config.procedure):
        results: list[AnalysisResult] = []
        docs: list[dict[str, Any]] = []
        for mode in config.modes:
            result = solve(cfg, cfg.types, mode, order=config.order,
                           trace=config.trace_fixpoint)
            results.append(result)
            doc = result_document(result, config.ascii)
            docs.append(doc)

            lines.extend(result_table(result, config.dumps, config.ascii))
            lines.append('')
            if config.trace_fixpoint:
                for snapshot in result.snapshots:
                    lines.extend(snapshot_lines(snapshot, cfg.order(),
                                                config.ascii))
                    lines.append('')
                problems = verify_fixpoint(cfg, result)
                doc['fixpoint'] = problems
                lines.extend(problems or ['fixpoint verified'])
                lines.append('')

        if len(results) == 2:
            deltas = compare_modes(*results)
            docs[0]['comparison'] = [
                {'id': d.node, 'lfcpa': d.lfcpa, 'baseline': d.baseline}
                for d in deltas]
            lines.extend(comparison_lines(deltas))
            lines.append('')

        if 'trace' in config.dumps:
            trace = run(cfg, cfg.types, config.fuel, branches)
            violations = check_soundness(trace, results[0])
            docs[0]['trace'] = trace_document(trace, violations)
            lines.extend(trace_lines(trace, violations))
            lines.append('')

        documents.extend(docs)

    return lines, documents


def emit(config: RunConfig, lines: list[str],
         documents: list[dict[str, Any]]) -> None:
    """Write the report to the output file or standard output."""

    destination = config.output or sys.stdout
    if config.format == 'json':
        write_json_data(documents, destination, json={'indent': 2})
        if destination is sys.stdout:
            sys.stdout.write('\n')
    else:
        write_content('\n'.join(lines).rstrip('\n') + '\n', destination)


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the `analyze` command; returns the exit status."""

    logging.basicConfig(level=logging.WARNING, format=LOG_FORMAT,
                        stream=sys.stderr)
    args = build_parser().parse_args(argv)

    try:
        config = RunConfig.from_arguments(args)
    except (ValueError, OSError) as e:
        _logger.error('%s', e)
        return EXIT_PROGRAM_ERROR
    logging.getLogger().setLevel(config.log_level)

    try:
        if config.generate is not None:
            program = GENERATORS[config.generate](config.seed,
                                                  config.statements)
            write_content(program.source, config.output or sys.stdout)
            return EXIT_OK

        lines, documents = analyze(config)
        emit(config, lines, documents)
    except ProgramError as e:
        _logger.error('%s: %s', config.input, e)
        return EXIT_PROGRAM_ERROR
    except OSError as e:
        _logger.error('%s', e)
        return EXIT_PROGRAM_ERROR
    except AnalysisError as e:
        _logger.error('internal error: %s', e)
        return EXIT_INTERNAL_ERROR
    except Exception:  # pylint: disable=broad-exception-caught
        _logger.exception('unexpected failure')
        return EXIT_INTERNAL_ERROR

    return EXIT_OK
