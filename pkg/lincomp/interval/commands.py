"""`interval` subcommand: evaluate an interval expression."""

from lincomp.interval.expression import evaluate
from lincomp.middleware.exit_codes import handles_domain_errors
from lincomp.utils.responses import success_response
from lincomp.utils.validators import format_pii


@handles_domain_errors
def cmd_interval(args, out, err):
    result = evaluate(' '.join(args.expr))
    return success_response(out, format_pii(result))


def register(subparsers):
    parser = subparsers.add_parser(
        'interval',
        help='evaluate an interval expression',
        description='Evaluate e.g. "~[1,3] + [1,3]"; `-` is the true minus, `~` the weak minus, '
                    'functions: gji(x,A,B), meet_i, join_i, meet_m, join_m.',
    )
    parser.add_argument('expr', nargs='+', help='expression (several words are joined with spaces)')
    parser.set_defaults(handler=cmd_interval)
    return parser
