"""Signed two-channel samplers closed under linear combination.

A sampler spec is a tree: leaves draw atoms from a probability distribution,
combos run their children side by side at rates proportional to the
coefficients and flip the sign of samples coming through negative ones.
Counting positive minus negative samples estimates the signed measure
sum_i c_i * [[child_i]].

Random draws come from counter-based Philox generators keyed by
(seed, role, path-in-tree), so a child's stream does not depend on its
siblings.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from numbers import Real
from typing import Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from lincomp.config import LincompConfig
from lincomp.errors import AlphaOutOfRange, AtomMismatch, ColumnMassNotOne, LincompError, MalformedInput
from lincomp.services.signed_measure import (
    LinearOp,
    SignedMeasure,
    apply,
    point_mass,
    scale,
    total_mass,
    tv_distance,
)

logger = logging.getLogger(__name__)

_BLOCK = 4096
_ROLE_LEAF = 0
_ROLE_SCHEDULE = 1
_ROLE_KERNEL = 2


@dataclass(frozen=True)
class SignedSample:
    atom: str
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise LincompError(f'sample sign must be +1 or -1, got {self.sign}')


@dataclass(frozen=True)
class Leaf:
    distribution: SignedMeasure

    def __post_init__(self):
        dist = self.distribution
        if not isinstance(dist, SignedMeasure):
            dist = SignedMeasure(dist)
            object.__setattr__(self, 'distribution', dist)
        if not dist:
            raise LincompError('leaf distribution is empty')
        if any(weight < 0 for weight in dist.values()):
            raise LincompError('leaf distribution has negative weights')
        if abs(float(total_mass(dist)) - 1.0) > LincompConfig.COLUMN_MASS_TOL:
            raise LincompError('leaf distribution must have mass 1', details={'mass': float(total_mass(dist))})


@dataclass(frozen=True)
class Combo:
    children: Tuple[Tuple[Real, 'SamplerSpec'], ...]

    def __post_init__(self):
        children = tuple((coeff, child) for coeff, child in self.children)
        if not children:
            raise LincompError('combo needs at least one child')
        for coeff, child in children:
            if coeff == 0:
                raise LincompError('combo coefficients must be nonzero')
            if not isinstance(child, (Leaf, Combo)):
                raise LincompError(f'combo child must be a sampler spec, got {type(child).__name__}')
        object.__setattr__(self, 'children', children)


SamplerSpec = Union[Leaf, Combo]


@dataclass(frozen=True)
class EstimationReport:
    estimate: SignedMeasure
    n: int
    target_mass: float
    tv_error_bound: float
    counts: dict = field(default_factory=dict, compare=False)

    def tv_error(self, exact: SignedMeasure) -> float:
        return float(tv_distance(self.estimate, exact))

    def within_bound(self, exact: SignedMeasure) -> bool:
        return self.tv_error(exact) <= self.tv_error_bound


# --- constructors ---

def leaf(distribution) -> Leaf:
    return Leaf(SignedMeasure(distribution))


def point_leaf(atom: str) -> Leaf:
    return Leaf(point_mass(atom))


def combo(*children: Tuple[Real, SamplerSpec]) -> Combo:
    return Combo(tuple(children))


def branch_sampler(alpha: Real, p: SamplerSpec, q: SamplerSpec) -> Combo:
    """Sampler for `if random < alpha then P else Q`."""
    if not 0 < alpha < 1:
        raise AlphaOutOfRange(f'alpha must lie strictly between 0 and 1, got {alpha}')
    return Combo(((alpha, p), (1 - alpha, q)))


# --- semantics ---

def exact_semantics(spec: SamplerSpec) -> SignedMeasure:
    if isinstance(spec, Leaf):
        return spec.distribution
    result = SignedMeasure()
    for coeff, child in spec.children:
        result = result + scale(coeff, exact_semantics(child))
    return result


def spec_mass(spec: SamplerSpec) -> float:
    """Sum over leaves of |product of path coefficients|."""
    if isinstance(spec, Leaf):
        return 1.0
    return sum(abs(float(coeff)) * spec_mass(child) for coeff, child in spec.children)


def spec_atoms(spec: SamplerSpec) -> set:
    if isinstance(spec, Leaf):
        return set(spec.distribution)
    atoms = set()
    for _, child in spec.children:
        atoms |= spec_atoms(child)
    return atoms


def error_bound(target_mass: float, atom_count: int, n: int) -> float:
    return 4.0 * target_mass * math.sqrt(atom_count / n)


# --- streaming ---

def _generator(seed: int, role: int, path: Tuple[int, ...]) -> np.random.Generator:
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(role,) + tuple(path))
    return np.random.Generator(np.random.Philox(sequence))


class _LeafNode:
    def __init__(self, spec: Leaf, seed: int, path: Tuple[int, ...]):
        self.atoms = spec.distribution.support
        weights = np.array([float(spec.distribution[atom]) for atom in self.atoms])
        self.cdf = np.cumsum(weights / weights.sum())
        self.cdf[-1] = 1.0
        self.rng = _generator(seed, _ROLE_LEAF, path)
        self.buffer = []

    def draw(self) -> Tuple[str, int]:
        if not self.buffer:
            picks = np.searchsorted(self.cdf, self.rng.random(_BLOCK), side='right')
            self.buffer = [self.atoms[i] for i in picks[::-1]]
        return self.buffer.pop(), 1


class _ComboNode:
    def __init__(self, spec: Combo, seed: int, path: Tuple[int, ...], mixture: bool):
        self.children = [_build_node(child, seed, path + (i,), mixture) for i, (_, child) in enumerate(spec.children)]
        self.signs = [1 if coeff > 0 else -1 for coeff, _ in spec.children]
        rates = [abs(float(coeff)) * spec_mass(child) for coeff, child in spec.children]
        total = sum(rates)
        self.shares = [rate / total for rate in rates]
        self.credits = [0.0] * len(rates)
        self.mixture = mixture
        if mixture:
            self.cdf = np.cumsum(self.shares)
            self.cdf[-1] = 1.0
            self.rng = _generator(seed, _ROLE_SCHEDULE, path)
            self.buffer = []

    def _next_child(self) -> int:
        if self.mixture:
            if not self.buffer:
                picks = np.searchsorted(self.cdf, self.rng.random(_BLOCK), side='right')
                self.buffer = picks[::-1].tolist()
            return self.buffer.pop()
        # Smooth weighted round robin: largest accumulated credit wins, ties to the lowest index.
        credits = self.credits
        best = 0
        for i, share in enumerate(self.shares):
            credits[i] += share
            if credits[i] > credits[best]:
                best = i
        credits[best] -= 1.0
        return best

    def draw(self) -> Tuple[str, int]:
        index = self._next_child()
        atom, sign = self.children[index].draw()
        return atom, sign * self.signs[index]


def _build_node(spec: SamplerSpec, seed: int, path: Tuple[int, ...], mixture: bool):
    if isinstance(spec, Leaf):
        return _LeafNode(spec, seed, path)
    return _ComboNode(spec, seed, path, mixture)


def _check_stream_args(seed: int, n: int):
    if n < 1:
        raise LincompError('sample count must be at least 1', details={'n': n})
    if seed < 0:
        raise LincompError('seed must be nonnegative', details={'seed': seed})


def _raw_stream(spec: SamplerSpec, seed: int, n: int, mixture: bool) -> Iterator[Tuple[str, int]]:
    root = _build_node(spec, seed, (), mixture)
    for _ in range(n):
        yield root.draw()


def stream(spec: SamplerSpec, seed: int, n: int, mixture: bool = False) -> Iterator[SignedSample]:
    """Deterministic stream of n signed samples; one consumer per iterator."""
    _check_stream_args(seed, n)
    for atom, sign in _raw_stream(spec, seed, n, mixture):
        yield SignedSample(atom, sign)


def _report(raw: Iterator[Tuple[str, int]], n: int, mass: float, atom_count: int) -> EstimationReport:
    positive = defaultdict(int)
    negative = defaultdict(int)
    for atom, sign in raw:
        if sign > 0:
            positive[atom] += 1
        else:
            negative[atom] += 1
    atoms = sorted(set(positive) | set(negative))
    estimate = SignedMeasure({atom: mass * (positive[atom] - negative[atom]) / n for atom in atoms})
    counts = {atom: (positive[atom], negative[atom]) for atom in atoms}
    bound = error_bound(mass, atom_count, n)
    logger.debug('estimate_computed', extra={'n': n, 'target_mass': mass, 'tv_error_bound': bound})
    return EstimationReport(estimate=estimate, n=n, target_mass=mass, tv_error_bound=bound, counts=counts)


def estimate(spec: SamplerSpec, seed: int, n: int, mixture: bool = False) -> EstimationReport:
    _check_stream_args(seed, n)
    return _report(_raw_stream(spec, seed, n, mixture), n, spec_mass(spec), len(spec_atoms(spec)))


# --- pushing samples through a signed kernel ---

class PushedSampler:
    """Stream transformer: each sample moves along |m[out][in]| and picks up sign(m)."""

    def __init__(self, op: LinearOp, spec: SamplerSpec, tol: Optional[float] = None):
        tol = LincompConfig.COLUMN_MASS_TOL if tol is None else tol
        column_mass = np.abs(op.matrix).sum(axis=0)
        bad = [atom for atom, mass in zip(op.inputs, column_mass) if abs(mass - 1.0) > tol]
        if bad:
            raise ColumnMassNotOne('every column of |op| must sum to 1', details={'columns': bad})
        stray = sorted(spec_atoms(spec) - set(op.inputs))
        if stray:
            raise AtomMismatch('sampler emits atoms outside the operator inputs', details={'atoms': stray})
        self.op = op
        self.spec = spec
        self._column = {atom: j for j, atom in enumerate(op.inputs)}
        self._cdfs = []
        for j in range(len(op.inputs)):
            cdf = np.cumsum(np.abs(op.matrix[:, j]))
            cdf[-1] = max(cdf[-1], 1.0)
            self._cdfs.append(cdf)
        self._signs = np.where(op.matrix < 0, -1, 1)

    def exact_semantics(self) -> SignedMeasure:
        return apply(self.op, exact_semantics(self.spec))

    def _raw_stream(self, seed: int, n: int, mixture: bool) -> Iterator[Tuple[str, int]]:
        rng = _generator(seed, _ROLE_KERNEL, ())
        uniforms = []
        for atom, sign in _raw_stream(self.spec, seed, n, mixture):
            if not uniforms:
                uniforms = rng.random(_BLOCK)[::-1].tolist()
            j = self._column[atom]
            i = int(np.searchsorted(self._cdfs[j], uniforms.pop(), side='right'))
            yield self.op.outputs[i], sign * int(self._signs[i, j])

    def stream(self, seed: int, n: int, mixture: bool = False) -> Iterator[SignedSample]:
        _check_stream_args(seed, n)
        for atom, sign in self._raw_stream(seed, n, mixture):
            yield SignedSample(atom, sign)

    def estimate(self, seed: int, n: int, mixture: bool = False) -> EstimationReport:
        _check_stream_args(seed, n)
        return _report(self._raw_stream(seed, n, mixture), n, spec_mass(self.spec), len(self.op.outputs))


def push_through(op: LinearOp, spec: SamplerSpec) -> PushedSampler:
    return PushedSampler(op, spec)


# --- JSON descriptors ---

def spec_from_json(payload) -> SamplerSpec:
    """Read {"leaf": {atom: w}} / {"combo": [[c, spec], ...]} into a spec."""
    if not isinstance(payload, dict) or len(payload) != 1:
        raise MalformedInput('sampler spec must be an object with a single "leaf" or "combo" key')
    kind, body = next(iter(payload.items()))
    try:
        if kind == 'leaf':
            if not isinstance(body, dict):
                raise MalformedInput('leaf body must map atoms to weights')
            return leaf({str(atom): float(weight) for atom, weight in body.items()})
        if kind == 'combo':
            if not isinstance(body, list):
                raise MalformedInput('combo body must be a list of [coefficient, spec] pairs')
            children = []
            for entry in body:
                if not isinstance(entry, (list, tuple)) or len(entry) != 2:
                    raise MalformedInput('combo entries must be [coefficient, spec] pairs')
                children.append((float(entry[0]), spec_from_json(entry[1])))
            return Combo(tuple(children))
    except MalformedInput:
        raise
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f'invalid sampler spec: {exc}') from exc
    raise MalformedInput(f'unknown sampler spec kind: {kind!r}')


def spec_to_json(spec: SamplerSpec) -> dict:
    if isinstance(spec, Leaf):
        return {'leaf': {atom: float(spec.distribution[atom]) for atom in spec.distribution.support}}
    return {'combo': [[float(coeff), spec_to_json(child)] for coeff, child in spec.children]}


def signed_samples(samples: Sequence[SignedSample]) -> SignedMeasure:
    """Unscaled signed histogram of a finite sample list."""
    counts = defaultdict(int)
    for sample in samples:
        counts[sample.atom] += sample.sign
    return SignedMeasure(dict(counts))
