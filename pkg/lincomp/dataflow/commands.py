"""`dataflow` subcommand: run a program descriptor, write PGM frames and a trace CSV."""

import logging
from pathlib import Path

import numpy as np

from lincomp.config import LincompConfig
from lincomp.errors import MalformedInput
from lincomp.middleware.exit_codes import handles_domain_errors
from lincomp.services.dataflow_matrix import morph_from_json, morph_run, program_from_json, run
from lincomp.services.storage_service import StorageService
from lincomp.utils.responses import success_response
from lincomp.utils.validators import parse_number

logger = logging.getLogger(__name__)


def parse_range(text: str):
    """`HI` means [-HI, HI]; `LO,HI` is taken as given."""
    parts = [part.strip() for part in text.split(',')]
    if len(parts) == 1:
        hi = float(parse_number(parts[0]))
        return -hi, hi
    if len(parts) == 2:
        return float(parse_number(parts[0])), float(parse_number(parts[1]))
    raise MalformedInput(f'render range must be HI or LO,HI, got {text!r}')


def _externals(payload, ticks: int):
    externals = payload.get('externals')
    if externals is None or isinstance(externals, dict):
        return externals
    if not isinstance(externals, list) or not all(isinstance(item, dict) for item in externals):
        raise MalformedInput('externals must be an object or a list of per-tick objects')
    if len(externals) < ticks:
        raise MalformedInput(f'externals list covers {len(externals)} ticks, need {ticks}')
    return externals


@handles_domain_errors
def cmd_dataflow(args, out, err):
    storage = StorageService()
    payload = storage.read_json(args.program)
    prog = program_from_json(payload)
    initial = payload.get('initial')
    workers = args.workers or LincompConfig.DATAFLOW_WORKERS

    if args.morph:
        schedule = morph_from_json(storage.read_json(args.morph), prog)
        ticks = schedule.ticks
        trace = morph_run(prog, schedule, initial, _externals(payload, ticks), workers=workers)
    else:
        if args.ticks is None:
            raise MalformedInput('--ticks is required unless --morph supplies a tick count')
        ticks = args.ticks
        trace = run(prog, initial, _externals(payload, ticks), ticks=ticks, workers=workers)

    if args.range:
        lo, hi = parse_range(args.range)
    else:
        lo, hi = -LincompConfig.RENDER_RANGE, LincompConfig.RENDER_RANGE
    out_dir = Path(args.out_dir)
    frames = storage.write_frames(out_dir, trace, lo, hi)
    trace_path = storage.write_trace(Path(args.trace) if args.trace else out_dir / 'trace.csv', trace)

    peak = max((float(np.abs(state).max()) for state in trace if state.size), default=0.0)
    logger.info('dataflow_run', extra={'ticks': ticks, 'templates': len(prog.templates), 'workers': workers,
                                       'morph': bool(args.morph), 'frames': len(frames)})
    return success_response(out, f'ticks={ticks} frames={len(frames)} trace={trace_path} max_abs={peak!r}')


def register(subparsers):
    parser = subparsers.add_parser('dataflow', help='run a dataflow matrix program and render frames')
    parser.add_argument('program', help='program JSON with templates, W, image_size and optional initial/externals')
    parser.add_argument('--ticks', type=int, help='number of ticks to run')
    parser.add_argument('--out-dir', required=True, help='directory for frame_NNNNN.pgm files')
    parser.add_argument('--morph', help='morph JSON with W_end, ticks and optional W_start')
    parser.add_argument('--trace', help='trace CSV path (default <out-dir>/trace.csv)')
    parser.add_argument('--range', help='render range as HI or LO,HI (default LINCOMP_RENDER_RANGE)')
    parser.add_argument('--workers', type=int, help='threads for the general phase (default LINCOMP_DATAFLOW_WORKERS)')
    parser.set_defaults(handler=cmd_dataflow)
    return parser
