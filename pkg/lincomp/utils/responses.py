"""Command output helpers and stable exit codes."""

import sys
from enum import IntEnum
from typing import Optional, TextIO


class ExitStatus(IntEnum):
    SUCCESS = 0
    DOMAIN_ERROR = 1
    USAGE_ERROR = 2
    ACCEPTANCE_FAILURE = 3


def success_response(out: TextIO, text: str = '', status: ExitStatus = ExitStatus.SUCCESS) -> int:
    if text:
        out.write(text if text.endswith('\n') else text + '\n')
    return int(status)


def error_response(message: str = 'Error', status: ExitStatus = ExitStatus.DOMAIN_ERROR,
                   err: Optional[TextIO] = None) -> int:
    err = err or sys.stderr
    err.write(f'error: {message}\n')
    return int(status)
