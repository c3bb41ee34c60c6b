"""`sample` subcommand: stream a sampler spec and print its signed histogram."""

import logging

from lincomp.config import LincompConfig
from lincomp.middleware.exit_codes import handles_domain_errors
from lincomp.services.signed_sampler import estimate, exact_semantics, push_through, spec_from_json
from lincomp.services.storage_service import StorageService
from lincomp.utils.responses import ExitStatus, error_response, success_response

logger = logging.getLogger(__name__)


@handles_domain_errors
def cmd_sample(args, out, err):
    storage = StorageService()
    spec = spec_from_json(storage.read_json(args.spec))
    seed = LincompConfig.DEFAULT_SEED if args.seed is None else args.seed
    n = LincompConfig.DEFAULT_SAMPLES if args.n is None else args.n

    if args.push:
        pushed = push_through(storage.read_operator(args.push), spec)
        exact = pushed.exact_semantics()
        report = pushed.estimate(seed, n, mixture=args.mixture)
    else:
        exact = exact_semantics(spec)
        report = estimate(spec, seed, n, mixture=args.mixture)

    atoms = set(exact) | set(report.counts)
    out.write(storage.histogram_to_csv(report.counts, report.estimate, atoms))

    tv_error = report.tv_error(exact)
    logger.info('sample_estimated', extra={'seed': seed, 'n': n, 'mixture': args.mixture,
                                           'tv_error': tv_error, 'tv_error_bound': report.tv_error_bound})
    if tv_error > report.tv_error_bound:
        return error_response(f'tv error {tv_error:.6g} exceeds bound {report.tv_error_bound:.6g}',
                              status=ExitStatus.ACCEPTANCE_FAILURE, err=err)
    return success_response(out)


def register(subparsers):
    parser = subparsers.add_parser('sample', help='run a signed sampler and print its histogram')
    parser.add_argument('spec', help='sampler spec JSON ({"leaf": ...} or {"combo": [...]})')
    parser.add_argument('--seed', type=int, help='stream seed (default LINCOMP_DEFAULT_SEED)')
    parser.add_argument('--n', type=int, help='number of samples (default LINCOMP_DEFAULT_SAMPLES)')
    parser.add_argument('--mixture', action='store_true', help='pick children at random instead of round-robin')
    parser.add_argument('--push', metavar='OP_CSV', help='push samples through a signed kernel operator')
    parser.set_defaults(handler=cmd_sample)
    return parser
