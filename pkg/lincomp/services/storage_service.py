"""CSV, JSON and PGM reading/writing for measures, operators, specs and traces."""

import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from lincomp.errors import MalformedInput, ParseError
from lincomp.services.dataflow_matrix import frame_for_state, render_pgm, trace_to_rows
from lincomp.services.signed_measure import LinearOp, SignedMeasure
from lincomp.utils.validators import format_number, parse_number, validate_atom

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

MEASURE_HEADER = ['atom', 'weight']
TRACE_HEADER = ['tick', 'template', 'point', 'value']
HISTOGRAM_HEADER = ['atom', 'pos_count', 'neg_count', 'estimate']


def _finite_number(token: str, where: str):
    try:
        value = parse_number(token)
    except ParseError as exc:
        raise MalformedInput(f'{where}: {exc.message}') from exc
    if isinstance(value, float) and math.isinf(value):
        raise MalformedInput(f'{where}: weights must be finite')
    return value


def _rows(text: str) -> list:
    return [row for row in csv.reader(io.StringIO(text)) if row and any(cell.strip() for cell in row)]


class StorageService:
    """Text formats are written so the matching reader gets back the same text."""

    # --- measures ---

    def measure_to_csv(self, mu: SignedMeasure) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(MEASURE_HEADER)
        for atom in mu.support:
            writer.writerow([atom, format_number(mu[atom])])
        return buffer.getvalue()

    def measure_from_csv(self, text: str) -> SignedMeasure:
        rows = _rows(text)
        if not rows or [cell.strip() for cell in rows[0]] != MEASURE_HEADER:
            raise MalformedInput('measure CSV must start with the header "atom,weight"')
        weights = {}
        for line, row in enumerate(rows[1:], start=2):
            if len(row) != 2:
                raise MalformedInput(f'line {line}: expected atom,weight')
            atom = validate_atom(row[0])
            if atom in weights:
                raise MalformedInput(f'line {line}: duplicate atom {atom!r}')
            weights[atom] = _finite_number(row[1], f'line {line}')
        return SignedMeasure(weights)

    def read_measure(self, path: PathLike) -> SignedMeasure:
        return self.measure_from_csv(Path(path).read_text(encoding='utf-8'))

    def write_measure(self, path: PathLike, mu: SignedMeasure) -> Path:
        path = Path(path)
        path.write_text(self.measure_to_csv(mu), encoding='utf-8')
        return path

    # --- operators ---

    def operator_to_csv(self, op: LinearOp) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow([''] + list(op.inputs))
        for out_atom, row in zip(op.outputs, op.matrix):
            writer.writerow([out_atom] + [format_number(float(value)) for value in row])
        return buffer.getvalue()

    def operator_from_csv(self, text: str) -> LinearOp:
        rows = _rows(text)
        if not rows or rows[0][0].strip():
            raise MalformedInput('operator CSV must start with a header row whose first cell is empty')
        inputs = [validate_atom(cell) for cell in rows[0][1:]]
        outputs, matrix = [], []
        for line, row in enumerate(rows[1:], start=2):
            if len(row) != len(inputs) + 1:
                raise MalformedInput(f'line {line}: expected {len(inputs) + 1} cells')
            outputs.append(validate_atom(row[0]))
            matrix.append([float(_finite_number(cell, f'line {line}')) for cell in row[1:]])
        if len(set(inputs)) != len(inputs) or len(set(outputs)) != len(outputs):
            raise MalformedInput('operator CSV repeats an atom id')
        return LinearOp(tuple(inputs), tuple(outputs), np.array(matrix, dtype=float).reshape(len(outputs), len(inputs)))

    def read_operator(self, path: PathLike) -> LinearOp:
        return self.operator_from_csv(Path(path).read_text(encoding='utf-8'))

    def write_operator(self, path: PathLike, op: LinearOp) -> Path:
        path = Path(path)
        path.write_text(self.operator_to_csv(op), encoding='utf-8')
        return path

    # --- JSON descriptors ---

    def read_json(self, path: PathLike):
        try:
            return json.loads(Path(path).read_text(encoding='utf-8'))
        except json.JSONDecodeError as exc:
            raise MalformedInput(f'{path}: invalid JSON ({exc.msg} at line {exc.lineno})') from exc

    # --- sampler histograms ---

    def histogram_to_csv(self, counts: dict, estimate: SignedMeasure, atoms: Iterable[str]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(HISTOGRAM_HEADER)
        for atom in sorted(atoms):
            pos, neg = counts.get(atom, (0, 0))
            writer.writerow([atom, pos, neg, repr(float(estimate.weight(atom)))])
        return buffer.getvalue()

    def histogram_from_csv(self, text: str) -> dict:
        rows = _rows(text)
        if not rows or [cell.strip() for cell in rows[0]] != HISTOGRAM_HEADER:
            raise MalformedInput('histogram CSV must start with "atom,pos_count,neg_count,estimate"')
        try:
            return {row[0]: (int(row[1]), int(row[2]), float(row[3])) for row in rows[1:]}
        except (IndexError, ValueError) as exc:
            raise MalformedInput(f'invalid histogram row: {exc}') from exc

    # --- dataflow traces and frames ---

    def trace_to_csv(self, trace: Sequence[np.ndarray]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(TRACE_HEADER)
        for tick, template, point, value in trace_to_rows(trace):
            writer.writerow([tick, template, point, repr(value)])
        return buffer.getvalue()

    def trace_from_csv(self, text: str) -> list:
        rows = _rows(text)
        if not rows or [cell.strip() for cell in rows[0]] != TRACE_HEADER:
            raise MalformedInput('trace CSV must start with "tick,template,point,value"')
        try:
            entries = [(int(r[0]), int(r[1]), int(r[2]), float(r[3])) for r in rows[1:]]
        except (IndexError, ValueError) as exc:
            raise MalformedInput(f'invalid trace row: {exc}') from exc
        if not entries:
            return []
        ticks = max(e[0] for e in entries) + 1
        templates = max(e[1] for e in entries) + 1
        points = max(e[2] for e in entries) + 1
        trace = np.zeros((ticks, templates, points))
        for tick, template, point, value in entries:
            trace[tick, template, point] = value
        return list(trace)

    def write_frames(self, out_dir: PathLike, trace: Sequence[np.ndarray], lo: float, hi: float) -> list:
        """One P5 file per tick, named frame_<zero-padded tick>.pgm."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        digits = max(5, len(str(len(trace) - 1)))
        paths = []
        for tick, state in enumerate(trace):
            path = out_dir / f'frame_{tick:0{digits}d}.pgm'
            path.write_bytes(render_pgm(frame_for_state(state), lo, hi))
            paths.append(path)
        logger.debug('frames_written', extra={'count': len(paths), 'out_dir': str(out_dir)})
        return paths

    def write_trace(self, path: PathLike, trace: Sequence[np.ndarray]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.trace_to_csv(trace), encoding='utf-8')
        return path
