"""Generalized images and dataflow programs encoded by real weight matrices.

A program is a list of template instances plus a matrix W with one row per
template input slot and one column per template output. Every tick runs a
linear phase (slot inputs = W @ latched outputs) followed by a general
phase (each template computes its new output from its inputs).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from numbers import Real
from typing import Callable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from lincomp.errors import (
    AsymmetricMask,
    BadRange,
    LincompError,
    MalformedInput,
    MissingExternalInput,
    NotLipschitz,
    ShapeMismatch,
    SizeMismatch,
)
from lincomp.utils.validators import validate_required_fields

logger = logging.getLogger(__name__)

MID_GRAY = 128


# --- generalized images ---

@dataclass(frozen=True, eq=False)
class GeneralizedImage:
    values: np.ndarray
    shape: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)
        if self.shape is not None:
            height, width = self.shape
            if height * width != values.size:
                raise SizeMismatch('image shape does not cover all points',
                                   details={'shape': [height, width], 'size': int(values.size)})
            object.__setattr__(self, 'shape', (int(height), int(width)))

    @property
    def size(self) -> int:
        return int(self.values.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GeneralizedImage):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        return f'GeneralizedImage({self.values.tolist()})'


ImageLike = Union[GeneralizedImage, Sequence[float], np.ndarray]


def as_image(image: ImageLike) -> GeneralizedImage:
    if isinstance(image, GeneralizedImage):
        return image
    try:
        values = np.asarray(image, dtype=float)
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f'image values must be numbers: {exc}') from exc
    return GeneralizedImage(values)


def image_lincomb(coeffs: Sequence[Real], images: Sequence[ImageLike]) -> GeneralizedImage:
    """Point-wise linear combination sum_i c_i * image_i."""
    if not images or len(coeffs) != len(images):
        raise SizeMismatch('need one coefficient per image and at least one image')
    images = [as_image(image) for image in images]
    size = images[0].size
    if any(image.size != size for image in images):
        raise SizeMismatch('images have different point counts', details={'sizes': [i.size for i in images]})
    values = np.zeros(size)
    for coeff, image in zip(coeffs, images):
        values = values + float(coeff) * image.values
    return GeneralizedImage(values, images[0].shape)


def _mirror_indices(size: int, axis: Real, mask: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    doubled = Fraction(axis).limit_denominator(1_000_000) * 2
    if doubled.denominator != 1:
        raise AsymmetricMask('reflection axis must be an integer or half-integer index', details={'axis': axis})
    index = np.array(sorted(set(int(i) for i in mask)), dtype=np.int64)
    mirror = int(doubled) - index
    if index.size and (index.min() < 0 or index.max() >= size):
        raise AsymmetricMask('mask points fall outside the image', details={'size': size})
    if set(mirror.tolist()) != set(index.tolist()):
        raise AsymmetricMask('mask is not symmetric about the axis', details={'axis': axis})
    return index, mirror


def _reflect_values(values: np.ndarray, index: np.ndarray, mirror: np.ndarray) -> np.ndarray:
    out = values.copy()
    out[index] = values[mirror]
    return out


def reflect_image(image: ImageLike, axis: Real, mask: Sequence[int]) -> GeneralizedImage:
    """Mirror the values inside mask across axis; points outside stay put."""
    image = as_image(image)
    index, mirror = _mirror_indices(image.size, axis, mask)
    return GeneralizedImage(_reflect_values(image.values, index, mirror), image.shape)


def _gray_levels(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    scaled = np.floor((values - lo) / (hi - lo) * 256.0)
    return np.clip(scaled, 0, 255).astype(np.uint8)


def render_pgm(image: Union[ImageLike, np.ndarray], lo: Optional[float] = None,
               hi: Optional[float] = None) -> bytes:
    """Binary PGM (P5); [lo, hi] maps linearly onto 0..255 and zero lands on 128."""
    if hi is None:
        from lincomp.config import LincompConfig
        hi = LincompConfig.RENDER_RANGE if lo is None else -lo
    if lo is None:
        lo = -hi
    if not lo < hi:
        raise BadRange('render range needs lo < hi', details={'lo': lo, 'hi': hi})

    if isinstance(image, np.ndarray) and image.ndim == 2:
        pixels = image.astype(float)
    else:
        image = as_image(image)
        height, width = image.shape or (1, image.size)
        pixels = image.values.reshape(height, width)

    height, width = pixels.shape
    header = f'P5\n{width} {height}\n255\n'.encode('ascii')
    return header + _gray_levels(pixels, float(lo), float(hi)).tobytes()


# --- templates ---

class TemplateKind(Enum):
    DELAY = 'delay'
    CONST = 'const'
    TANH = 'tanh'
    SIN = 'sin'
    PRODUCT = 'product'
    SHIFT = 'shift'
    REFLECT = 'reflect'
    EXTERNAL_INPUT = 'external'


_ARITY = {
    TemplateKind.DELAY: 1,
    TemplateKind.CONST: 0,
    TemplateKind.TANH: 1,
    TemplateKind.SIN: 1,
    TemplateKind.PRODUCT: 2,
    TemplateKind.SHIFT: 1,
    TemplateKind.REFLECT: 1,
    TemplateKind.EXTERNAL_INPUT: 0,
}

# Point-wise Lipschitz constants; Product has none.
_LIPSCHITZ = {
    TemplateKind.DELAY: 1.0,
    TemplateKind.CONST: 0.0,
    TemplateKind.TANH: 1.0,
    TemplateKind.SIN: 1.0,
    TemplateKind.SHIFT: 1.0,
    TemplateKind.REFLECT: 1.0,
    TemplateKind.EXTERNAL_INPUT: 0.0,
}

LINEAR_KINDS = frozenset({TemplateKind.DELAY, TemplateKind.SHIFT, TemplateKind.REFLECT})


@dataclass(frozen=True)
class TemplateInstance:
    kind: TemplateKind
    value: float = 0.0
    k: int = 0
    axis: float = 0.0
    mask: Tuple[int, ...] = ()
    name: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'kind', TemplateKind(self.kind))
        object.__setattr__(self, 'mask', tuple(int(i) for i in self.mask))
        if self.kind is TemplateKind.EXTERNAL_INPUT and not self.name:
            raise LincompError('external input templates need a name')

    @property
    def arity(self) -> int:
        return _ARITY[self.kind]

    @property
    def lipschitz(self) -> Optional[float]:
        return _LIPSCHITZ.get(self.kind)

    @property
    def is_linear(self) -> bool:
        return self.kind in LINEAR_KINDS or (self.kind is TemplateKind.CONST and self.value == 0)

    def to_json(self) -> dict:
        payload = {'kind': self.kind.value}
        if self.kind is TemplateKind.CONST:
            payload['value'] = self.value
        elif self.kind is TemplateKind.SHIFT:
            payload['k'] = self.k
        elif self.kind is TemplateKind.REFLECT:
            payload['axis'] = self.axis
            payload['mask'] = list(self.mask)
        elif self.kind is TemplateKind.EXTERNAL_INPUT:
            payload['name'] = self.name
        return payload


def delay() -> TemplateInstance:
    return TemplateInstance(TemplateKind.DELAY)


def const(value: float) -> TemplateInstance:
    return TemplateInstance(TemplateKind.CONST, value=float(value))


def pointwise_tanh() -> TemplateInstance:
    return TemplateInstance(TemplateKind.TANH)


def pointwise_sin() -> TemplateInstance:
    return TemplateInstance(TemplateKind.SIN)


def product() -> TemplateInstance:
    return TemplateInstance(TemplateKind.PRODUCT)


def shift(k: int) -> TemplateInstance:
    return TemplateInstance(TemplateKind.SHIFT, k=int(k))


def reflect(axis: float, mask: Sequence[int]) -> TemplateInstance:
    return TemplateInstance(TemplateKind.REFLECT, axis=float(axis), mask=tuple(mask))


def external_input(name: str) -> TemplateInstance:
    return TemplateInstance(TemplateKind.EXTERNAL_INPUT, name=name)


# --- programs ---

@dataclass(frozen=True, eq=False)
class DataflowProgram:
    templates: Tuple[TemplateInstance, ...]
    weights: np.ndarray
    image_size: int
    _mirrors: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        templates = tuple(self.templates)
        weights = np.array(self.weights, dtype=float)
        slots = sum(t.arity for t in templates)
        if slots == 0 and weights.size == 0:
            weights = np.zeros((0, len(templates)))
        if weights.shape != (slots, len(templates)):
            raise ShapeMismatch('W must have one row per input slot and one column per template',
                                details={'expected': [slots, len(templates)], 'got': list(weights.shape)})
        if self.image_size < 1:
            raise SizeMismatch('image size must be positive')
        weights.setflags(write=False)
        object.__setattr__(self, 'templates', templates)
        object.__setattr__(self, 'weights', weights)
        mirrors = {}
        for index, template in enumerate(templates):
            if template.kind is TemplateKind.REFLECT:
                mirrors[index] = _mirror_indices(self.image_size, template.axis, template.mask)
        object.__setattr__(self, '_mirrors', mirrors)

    @property
    def slot_offsets(self) -> Tuple[int, ...]:
        offsets, total = [], 0
        for template in self.templates:
            offsets.append(total)
            total += template.arity
        return tuple(offsets)

    @property
    def is_linear(self) -> bool:
        return all(t.is_linear for t in self.templates)

    def with_weights(self, weights: np.ndarray) -> 'DataflowProgram':
        return DataflowProgram(self.templates, weights, self.image_size)

    def to_json(self) -> dict:
        return {
            'image_size': self.image_size,
            'templates': [t.to_json() for t in self.templates],
            'W': self.weights.tolist(),
        }


@dataclass(frozen=True, eq=False)
class MorphSchedule:
    w_start: np.ndarray
    w_end: np.ndarray
    ticks: int
    ramp: Optional[Callable[[int], float]] = None

    def __post_init__(self):
        w_start = np.array(self.w_start, dtype=float)
        w_end = np.array(self.w_end, dtype=float)
        if w_start.shape != w_end.shape:
            raise ShapeMismatch('W_start and W_end differ in shape',
                                details={'start': list(w_start.shape), 'end': list(w_end.shape)})
        if self.ticks < 1:
            raise LincompError('morph schedule needs at least one tick')
        object.__setattr__(self, 'w_start', w_start)
        object.__setattr__(self, 'w_end', w_end)

    def lam(self, tick: int) -> float:
        if self.ramp is not None:
            return float(self.ramp(tick))
        return tick / self.ticks

    def weights_at(self, tick: int) -> np.ndarray:
        lam = self.lam(tick)
        if not 0.0 <= lam <= 1.0:
            raise LincompError('ramp value outside [0, 1]', details={'tick': tick, 'lambda': lam})
        if lam == 0.0 or np.array_equal(self.w_start, self.w_end):
            return self.w_start
        if lam == 1.0:
            return self.w_end
        return (1.0 - lam) * self.w_start + lam * self.w_end


def zero_state(prog: DataflowProgram) -> np.ndarray:
    return np.zeros((len(prog.templates), prog.image_size))


def as_state(prog: DataflowProgram, state) -> np.ndarray:
    """Accept an array or a list of images, one per template."""
    if state is None:
        return zero_state(prog)
    if not isinstance(state, np.ndarray):
        if not isinstance(state, (list, tuple)):
            raise MalformedInput('state must be a list of images, one per template')
        images = [as_image(image).values for image in state]
        if len({image.size for image in images}) > 1:
            raise SizeMismatch('state images have different point counts',
                               details={'sizes': [int(image.size) for image in images]})
        state = np.array(images, dtype=float) if images else np.zeros((0, prog.image_size))
    if state.shape != (len(prog.templates), prog.image_size):
        raise SizeMismatch('state needs one image per template',
                           details={'expected': [len(prog.templates), prog.image_size], 'got': list(state.shape)})
    return np.array(state, dtype=float)


def project_state(state: np.ndarray, count: int) -> np.ndarray:
    return state[:count]


Externals = Union[Mapping[str, ImageLike], Sequence[Mapping[str, ImageLike]], Callable[[int], Mapping]]


def _externals_at(externals, tick: int) -> Mapping:
    if externals is None:
        return {}
    if callable(externals):
        return externals(tick)
    if isinstance(externals, Mapping):
        return externals
    if tick > len(externals):
        raise MissingExternalInput(f'no external images supplied for tick {tick}',
                                   details={'tick': tick, 'supplied': len(externals)})
    return externals[tick - 1]


def _template_output(prog: DataflowProgram, index: int, inputs: np.ndarray, offset: int,
                     external: Mapping) -> np.ndarray:
    template = prog.templates[index]
    kind = template.kind
    if kind is TemplateKind.CONST:
        return np.full(prog.image_size, template.value)
    if kind is TemplateKind.EXTERNAL_INPUT:
        if template.name not in external:
            raise MissingExternalInput(f'no image supplied for external input {template.name!r}')
        values = as_image(external[template.name]).values
        if values.size != prog.image_size:
            raise SizeMismatch(f'external input {template.name!r} has the wrong point count')
        return values.copy()
    first = inputs[offset]
    if kind is TemplateKind.DELAY:
        return first.copy()
    if kind is TemplateKind.TANH:
        return np.tanh(first)
    if kind is TemplateKind.SIN:
        return np.sin(first)
    if kind is TemplateKind.PRODUCT:
        return first * inputs[offset + 1]
    if kind is TemplateKind.SHIFT:
        return np.roll(first, template.k)
    if kind is TemplateKind.REFLECT:
        index_arr, mirror = prog._mirrors[index]
        return _reflect_values(first, index_arr, mirror)
    raise LincompError(f'unknown template kind {kind}')


def _linear_phase(weights: np.ndarray, state: np.ndarray) -> np.ndarray:
    """Slot inputs W @ state, accumulated template by template in index order.

    The fixed order makes results bit-identical across machines and thread
    counts, and zero columns appended by grafting add exact zeros.
    """
    inputs = np.zeros((weights.shape[0], state.shape[1]))
    for k in range(weights.shape[1]):
        inputs += weights[:, k:k + 1] * state[k]
    return inputs


def step(prog: DataflowProgram, state, external: Optional[Mapping] = None,
         weights: Optional[np.ndarray] = None, workers: int = 1) -> np.ndarray:
    """One synchronous tick: linear phase then general phase."""
    state = as_state(prog, state)
    external = external or {}
    weights = prog.weights if weights is None else np.asarray(weights, dtype=float)
    if weights.shape != prog.weights.shape:
        raise ShapeMismatch('weights do not match the program', details={'got': list(weights.shape)})

    for template in prog.templates:
        if template.kind is TemplateKind.EXTERNAL_INPUT and template.name not in external:
            raise MissingExternalInput(f'no image supplied for external input {template.name!r}')

    inputs = _linear_phase(weights, state)
    offsets = prog.slot_offsets

    def compute(index: int) -> np.ndarray:
        return _template_output(prog, index, inputs, offsets[index], external)

    indices = range(len(prog.templates))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(compute, indices))
    else:
        outputs = [compute(index) for index in indices]
    if not outputs:
        return zero_state(prog)
    return np.stack(outputs)


def run(prog: DataflowProgram, initial=None, externals: Externals = None, ticks: int = 0,
        workers: int = 1) -> list:
    """Trace of ticks + 1 states starting from the initial state."""
    if ticks < 0:
        raise LincompError('tick count must be nonnegative')
    state = as_state(prog, initial)
    trace = [state]
    for tick in range(1, ticks + 1):
        state = step(prog, state, _externals_at(externals, tick), workers=workers)
        trace.append(state)
    return trace


def morph_run(prog: DataflowProgram, schedule: MorphSchedule, initial=None,
              externals: Externals = None, workers: int = 1) -> list:
    """Run while the weights move from W_start to W_end; step t uses W(lambda(t))."""
    if schedule.w_start.shape != prog.weights.shape:
        raise ShapeMismatch('morph schedule does not match the program',
                            details={'program': list(prog.weights.shape), 'schedule': list(schedule.w_start.shape)})
    state = as_state(prog, initial)
    trace = [state]
    for tick in range(1, schedule.ticks + 1):
        state = step(prog, state, _externals_at(externals, tick), weights=schedule.weights_at(tick),
                     workers=workers)
        trace.append(state)
    logger.debug('morph_run_finished', extra={'ticks': schedule.ticks, 'templates': len(prog.templates)})
    return trace


# --- almost continuous transformation ---

def graft_template(prog: DataflowProgram, template: TemplateInstance) -> DataflowProgram:
    """Append a template wired in with zero weights; existing streams are unaffected."""
    rows, cols = prog.weights.shape
    weights = np.zeros((rows + template.arity, cols + 1))
    weights[:rows, :cols] = prog.weights
    return DataflowProgram(prog.templates + (template,), weights, prog.image_size)


def ramp_weight(prog: DataflowProgram, row: int, col: int, target: float, ticks: int) -> MorphSchedule:
    w_end = np.array(prog.weights)
    w_end[row, col] = target
    return MorphSchedule(prog.weights, w_end, ticks)


def program_lipschitz(prog: DataflowProgram) -> float:
    constants = [t.lipschitz for t in prog.templates]
    if any(c is None for c in constants):
        raise NotLipschitz('programs with Product templates have no global Lipschitz bound')
    return max(constants, default=0.0)


def _row_sum_norm(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    return float(np.abs(matrix).sum(axis=1).max())


def continuity_bound(prog: DataflowProgram, weights_a: Sequence[np.ndarray], weights_b: Sequence[np.ndarray],
                     trace_a: Sequence[np.ndarray]) -> np.ndarray:
    """Per-tick bound on max |state_a - state_b| for two runs from the same start.

    weights_a[t-1] / weights_b[t-1] are the matrices used by step t and
    trace_a is the run under weights_a. With e_0 = 0,
    e_t <= L * (|W_b|_inf * e_{t-1} + |W_a - W_b|_inf * max|state_a(t-1)|).
    """
    lipschitz = program_lipschitz(prog)
    if len(weights_a) != len(weights_b) or len(trace_a) != len(weights_a) + 1:
        raise ShapeMismatch('need one weight matrix per step and one more state than steps')
    bounds = [0.0]
    for t, (wa, wb) in enumerate(zip(weights_a, weights_b)):
        scale_ref = float(np.abs(trace_a[t]).max()) if trace_a[t].size else 0.0
        drift = _row_sum_norm(np.asarray(wa) - np.asarray(wb))
        bounds.append(lipschitz * (_row_sum_norm(np.asarray(wb)) * bounds[-1] + drift * scale_ref))
    return np.array(bounds)


def max_deviation(trace_a: Sequence[np.ndarray], trace_b: Sequence[np.ndarray]) -> np.ndarray:
    return np.array([float(np.abs(a - b).max()) if a.size else 0.0 for a, b in zip(trace_a, trace_b)])


# --- rendering and serialisation helpers ---

def frame_for_state(state: np.ndarray) -> np.ndarray:
    """All template images of one tick stacked as rows of a single frame."""
    return np.atleast_2d(state)


def trace_to_rows(trace: Sequence[np.ndarray]):
    for tick, state in enumerate(trace):
        for template_index, values in enumerate(state):
            for point, value in enumerate(values):
                yield tick, template_index, point, float(value)


def template_from_json(payload: dict) -> TemplateInstance:
    if not isinstance(payload, dict):
        raise MalformedInput(f'template entry must be a JSON object, got {payload!r}')
    ok, missing = validate_required_fields(payload, ['kind'])
    if not ok:
        raise MalformedInput(f'template is missing required field: {missing}')
    try:
        kind = TemplateKind(payload['kind'])
    except ValueError as exc:
        raise MalformedInput(f'unknown template kind {payload["kind"]!r}') from exc
    required = {
        TemplateKind.CONST: ['value'],
        TemplateKind.SHIFT: ['k'],
        TemplateKind.REFLECT: ['axis', 'mask'],
        TemplateKind.EXTERNAL_INPUT: ['name'],
    }.get(kind, [])
    ok, missing = validate_required_fields(payload, required)
    if not ok:
        raise MalformedInput(f'{kind.value} template is missing required field: {missing}')
    try:
        return TemplateInstance(
            kind,
            value=float(payload.get('value', 0.0)),
            k=int(payload.get('k', 0)),
            axis=float(payload.get('axis', 0.0)),
            mask=tuple(payload.get('mask', ())),
            name=str(payload.get('name', '')),
        )
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f'invalid {kind.value} template: {exc}') from exc


def program_from_json(payload: dict) -> DataflowProgram:
    if not isinstance(payload, dict):
        raise MalformedInput('program descriptor must be a JSON object')
    ok, missing = validate_required_fields(payload, ['templates', 'W', 'image_size'])
    if not ok:
        raise MalformedInput(f'program descriptor is missing required field: {missing}')
    if not isinstance(payload['templates'], list):
        raise MalformedInput('templates must be a list of template objects')
    templates = tuple(template_from_json(item) for item in payload['templates'])
    try:
        weights = np.array(payload['W'], dtype=float)
        image_size = int(payload['image_size'])
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f'invalid program descriptor: {exc}') from exc
    return DataflowProgram(templates, weights, image_size)


def morph_from_json(payload: dict, prog: DataflowProgram) -> MorphSchedule:
    if not isinstance(payload, dict):
        raise MalformedInput('morph descriptor must be a JSON object')
    ok, missing = validate_required_fields(payload, ['W_end', 'ticks'])
    if not ok:
        raise MalformedInput(f'morph descriptor is missing required field: {missing}')
    try:
        w_start = np.array(payload.get('W_start', prog.weights), dtype=float)
        w_end = np.array(payload['W_end'], dtype=float)
        ticks = int(payload['ticks'])
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f'invalid morph descriptor: {exc}') from exc
    return MorphSchedule(w_start, w_end, ticks)
