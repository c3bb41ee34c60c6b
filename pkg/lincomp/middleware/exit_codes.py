"""Map domain exceptions raised by command handlers to exit codes."""

import logging
from functools import wraps

from lincomp.errors import LincompError, MalformedInput, ParseError
from lincomp.utils.responses import ExitStatus, error_response

logger = logging.getLogger(__name__)

USAGE_ERRORS = (ParseError, MalformedInput)


def _log_context(args, exc: LincompError) -> dict:
    context = exc.to_dict()
    # 'message' is reserved on LogRecord
    context['reason'] = context.pop('message')
    context['command'] = getattr(args, 'command', '')
    return context


def handles_domain_errors(fn):
    """Wrap a handler(args, out, err) so it always returns an exit code."""

    @wraps(fn)
    def wrapper(args, out, err):
        try:
            return fn(args, out, err)
        except USAGE_ERRORS as exc:
            logger.info('command_rejected', extra=_log_context(args, exc))
            return error_response(exc.message, status=ExitStatus.USAGE_ERROR, err=err)
        except LincompError as exc:
            logger.info('command_failed', extra=_log_context(args, exc))
            return error_response(exc.message, status=ExitStatus.DOMAIN_ERROR, err=err)
        except FileNotFoundError as exc:
            logger.info('command_rejected', extra={'command': args.command, 'missing': exc.filename})
            return error_response(f'no such file: {exc.filename}', status=ExitStatus.USAGE_ERROR, err=err)
        except OSError as exc:
            logger.info('command_rejected', extra={'command': args.command, 'path': exc.filename,
                                                   'reason': exc.strerror})
            return error_response(f'cannot access {exc.filename}: {exc.strerror}',
                                  status=ExitStatus.USAGE_ERROR, err=err)

    return wrapper
