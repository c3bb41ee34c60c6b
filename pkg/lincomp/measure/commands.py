"""`measure` subcommand: apply, Hahn-Jordan, norms and program distances on CSV files."""

from pathlib import Path

from lincomp.errors import MalformedInput
from lincomp.middleware.exit_codes import handles_domain_errors
from lincomp.services.signed_measure import (
    apply,
    branch_operator,
    hahn_jordan,
    is_stochastic,
    op_norm,
    program_distance,
    tv_norm,
)
from lincomp.services.storage_service import StorageService
from lincomp.utils.responses import success_response
from lincomp.utils.validators import format_number

ACTIONS = ('apply', 'hj', 'norm', 'dist', 'opnorm', 'stochastic', 'branch')

REQUIRED_FILES = {
    'apply': ('op', 'measure'),
    'hj': ('measure',),
    'norm': ('measure',),
    'dist': ('op', 'op2'),
    'opnorm': ('op',),
    'stochastic': ('op',),
    'branch': ('op', 'op2', 'alpha'),
}


def _require(args):
    missing = [name for name in REQUIRED_FILES[args.action] if getattr(args, name) is None]
    if missing:
        raise MalformedInput(f'{args.action} needs --' + ', --'.join(missing))


@handles_domain_errors
def cmd_measure(args, out, err):
    _require(args)
    storage = StorageService()
    action = args.action

    if action == 'apply':
        result = apply(storage.read_operator(args.op), storage.read_measure(args.measure))
        return success_response(out, storage.measure_to_csv(result))

    if action == 'hj':
        parts = hahn_jordan(storage.read_measure(args.measure))
        if args.out_prefix:
            storage.write_measure(Path(f'{args.out_prefix}positive.csv'), parts.positive)
            storage.write_measure(Path(f'{args.out_prefix}negative.csv'), parts.negative)
        text = storage.measure_to_csv(parts.positive) + '\n' + storage.measure_to_csv(parts.negative)
        return success_response(out, text)

    if action == 'norm':
        return success_response(out, format_number(tv_norm(storage.read_measure(args.measure))))

    if action == 'dist':
        distance = program_distance(storage.read_operator(args.op), storage.read_operator(args.op2))
        return success_response(out, format_number(distance))

    if action == 'opnorm':
        return success_response(out, format_number(op_norm(storage.read_operator(args.op))))

    if action == 'stochastic':
        return success_response(out, 'true' if is_stochastic(storage.read_operator(args.op)) else 'false')

    combined = branch_operator(args.alpha, storage.read_operator(args.op), storage.read_operator(args.op2))
    if args.out_prefix:
        storage.write_operator(Path(f'{args.out_prefix}branch.csv'), combined)
    return success_response(out, storage.operator_to_csv(combined))


def register(subparsers):
    parser = subparsers.add_parser('measure', help='signed measures and linear operators (CSV)')
    parser.add_argument('action', choices=ACTIONS)
    parser.add_argument('--op', help='operator CSV (header row of input atoms, one row per output atom)')
    parser.add_argument('--op2', help='second operator CSV for dist/branch')
    parser.add_argument('--measure', help='measure CSV with header atom,weight')
    parser.add_argument('--alpha', type=float, help='branch probability for the branch action')
    parser.add_argument('--out-prefix', help='hj: also write <prefix>positive.csv and <prefix>negative.csv; '
                        'branch: also write <prefix>branch.csv')
    parser.set_defaults(handler=cmd_measure)
    return parser
