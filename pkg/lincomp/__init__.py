"""lincomp: linear models of computation over intervals, signed measures and dataflow images."""

import argparse
import logging
import sys
import time
from typing import Optional, Sequence, TextIO

from lincomp.config import LincompConfig
from lincomp.dataflow import commands as dataflow_commands
from lincomp.interval import commands as interval_commands
from lincomp.measure import commands as measure_commands
from lincomp.metric import commands as metric_commands
from lincomp.sample import commands as sample_commands
from lincomp.utils.logging_utils import configure_structured_logging
from lincomp.utils.responses import ExitStatus, error_response

logger = logging.getLogger('lincomp')

COMMAND_MODULES = (interval_commands, metric_commands, measure_commands, sample_commands, dataflow_commands)


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f'{self.prog}: {message}')


def _protect_expression(argv: list) -> list:
    # Expressions such as `-[1,2]` or `~[1,2]` must not be read as options.
    if argv and argv[0] == 'interval' and len(argv) > 1 and argv[1] not in ('-h', '--help', '--'):
        return ['interval', '--'] + argv[1:]
    return argv


class LincompCli:
    def __init__(self):
        self.parser = _ArgumentParser(prog='lincomp', description=__doc__)
        subparsers = self.parser.add_subparsers(dest='command', metavar='COMMAND')
        subparsers.required = True
        for module in COMMAND_MODULES:
            module.register(subparsers)

    def main(self, argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
        out = out or sys.stdout
        err = err or sys.stderr
        argv = _protect_expression(list(sys.argv[1:] if argv is None else argv))

        LincompConfig.reload()
        configure_structured_logging(logger, level=LincompConfig.LOG_LEVEL, json_lines=LincompConfig.LOG_JSON)

        started = time.perf_counter()
        try:
            args = self.parser.parse_args(argv)
        except UsageError as exc:
            return error_response(str(exc), status=ExitStatus.USAGE_ERROR, err=err)
        except SystemExit as exc:
            return int(exc.code or 0)

        exit_code = args.handler(args, out, err)
        logger.info(
            'command_processed',
            extra={
                'command': args.command,
                'exit_code': exit_code,
                'latency_ms': int((time.perf_counter() - started) * 1000),
            },
        )
        return exit_code


def create_cli() -> LincompCli:
    """Factory for the command-line front end."""
    return LincompCli()
