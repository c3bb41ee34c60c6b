"""`metric` subcommand: l, p and the PII-valued pair for two intervals."""

from lincomp.middleware.exit_codes import handles_domain_errors
from lincomp.services.pii_metrics import relaxed_distance
from lincomp.utils.responses import success_response
from lincomp.utils.validators import format_number, format_pii, parse_pii


@handles_domain_errors
def cmd_metric(args, out, err):
    pair = relaxed_distance(parse_pii(args.x), parse_pii(args.y))
    line = f'l={format_number(pair.lower)} p={format_number(pair.upper)} pair={format_pii(pair.as_pii)}'
    return success_response(out, line)


def register(subparsers):
    parser = subparsers.add_parser('metric', help='relaxed distance between two intervals')
    parser.add_argument('x', help='first interval, e.g. [0,2]')
    parser.add_argument('y', help='second interval, e.g. [1,1]')
    parser.set_defaults(handler=cmd_metric)
    return parser
