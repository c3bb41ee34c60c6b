"""Finite-support signed measures and linear operators as program denotations.

Measures are columns; an operator's matrix is indexed m[out][in], so the
columns of a stochastic operator are its transition distributions.
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass
from numbers import Real
from typing import Optional, Sequence

import numpy as np

from lincomp.errors import AlphaOutOfRange, AtomMismatch, LincompError

logger = logging.getLogger(__name__)

Atom = str


class SignedMeasure(Mapping):
    """Immutable atom -> weight map in canonical form (no stored zeros)."""

    __slots__ = ('_weights',)

    def __init__(self, weights: Optional[Mapping] = None):
        canonical = {}
        for atom, weight in (weights or {}).items():
            if not isinstance(atom, str):
                raise LincompError(f'atom ids must be strings, got {atom!r}')
            if weight != 0:
                canonical[atom] = weight
        self._weights = canonical

    def __getitem__(self, atom: Atom) -> Real:
        return self._weights[atom]

    def __iter__(self):
        return iter(self._weights)

    def __len__(self) -> int:
        return len(self._weights)

    def __hash__(self):
        return hash(frozenset(self._weights.items()))

    def __repr__(self) -> str:
        body = ', '.join(f'{atom}: {weight}' for atom, weight in sorted(self._weights.items()))
        return f'SignedMeasure({{{body}}})'

    def weight(self, atom: Atom) -> Real:
        return self._weights.get(atom, 0)

    @property
    def support(self) -> tuple:
        return tuple(sorted(self._weights))

    def __add__(self, other: 'SignedMeasure') -> 'SignedMeasure':
        return add(self, other)

    def __sub__(self, other: 'SignedMeasure') -> 'SignedMeasure':
        return sub(self, other)

    def __neg__(self) -> 'SignedMeasure':
        return negate(self)

    def __mul__(self, c: Real) -> 'SignedMeasure':
        return scale(c, self)

    __rmul__ = __mul__


ZERO_MEASURE = SignedMeasure()


@dataclass(frozen=True)
class JordanPair:
    positive: SignedMeasure
    negative: SignedMeasure


def point_mass(atom: Atom, weight: Real = 1) -> SignedMeasure:
    return SignedMeasure({atom: weight})


def _union(*measures: SignedMeasure) -> list:
    atoms = set()
    for measure in measures:
        atoms.update(measure)
    return sorted(atoms)


def _pointwise(fn, mu: SignedMeasure, nu: SignedMeasure) -> SignedMeasure:
    return SignedMeasure({atom: fn(mu.weight(atom), nu.weight(atom)) for atom in _union(mu, nu)})


# --- vector lattice ---

def add(mu: SignedMeasure, nu: SignedMeasure) -> SignedMeasure:
    return _pointwise(lambda u, v: u + v, mu, nu)


def scale(c: Real, mu: SignedMeasure) -> SignedMeasure:
    return SignedMeasure({atom: c * weight for atom, weight in mu.items()})


def negate(mu: SignedMeasure) -> SignedMeasure:
    return SignedMeasure({atom: -weight for atom, weight in mu.items()})


def sub(mu: SignedMeasure, nu: SignedMeasure) -> SignedMeasure:
    return _pointwise(lambda u, v: u - v, mu, nu)


def meet(mu: SignedMeasure, nu: SignedMeasure) -> SignedMeasure:
    return _pointwise(min, mu, nu)


def join(mu: SignedMeasure, nu: SignedMeasure) -> SignedMeasure:
    return _pointwise(max, mu, nu)


def is_positive(mu: SignedMeasure) -> bool:
    return all(weight >= 0 for weight in mu.values())


def material_leq(nu: SignedMeasure, mu: SignedMeasure) -> bool:
    """nu <= mu iff mu - nu is a positive measure."""
    return is_positive(sub(mu, nu))


def total_mass(mu: SignedMeasure) -> Real:
    return sum(mu.values(), 0)


def tv_norm(mu: SignedMeasure) -> Real:
    return sum((abs(weight) for weight in mu.values()), 0)


def tv_distance(mu: SignedMeasure, nu: SignedMeasure) -> Real:
    return tv_norm(sub(mu, nu))


def hahn_jordan(mu: SignedMeasure) -> JordanPair:
    """mu+ = mu v 0 and mu- = mu ^ 0; they sum to mu with disjoint supports."""
    return JordanPair(positive=join(mu, ZERO_MEASURE), negative=meet(mu, ZERO_MEASURE))


# --- knowledge order (the bilattice pattern) ---

def info_leq(nu: SignedMeasure, mu: SignedMeasure) -> bool:
    """Both Jordan parts of nu are dominated in magnitude by those of mu."""
    nu_parts, mu_parts = hahn_jordan(nu), hahn_jordan(mu)
    return (material_leq(nu_parts.positive, mu_parts.positive)
            and material_leq(mu_parts.negative, nu_parts.negative))


def info_join(nu: SignedMeasure, mu: SignedMeasure) -> SignedMeasure:
    nu_parts, mu_parts = hahn_jordan(nu), hahn_jordan(mu)
    positive = join(nu_parts.positive, mu_parts.positive)
    negative = meet(nu_parts.negative, mu_parts.negative)
    return add(positive, negative)


# --- operators ---

@dataclass(frozen=True, eq=False)
class LinearOp:
    inputs: tuple
    outputs: tuple
    matrix: np.ndarray

    def __post_init__(self):
        inputs, outputs = tuple(self.inputs), tuple(self.outputs)
        matrix = np.array(self.matrix, dtype=float)
        if matrix.size != len(outputs) * len(inputs):
            raise AtomMismatch('matrix size does not match atom lists')
        matrix = matrix.reshape(len(outputs), len(inputs))
        if len(set(inputs)) != len(inputs) or len(set(outputs)) != len(outputs):
            raise AtomMismatch('atom ids must be unique within a space')
        matrix.setflags(write=False)
        object.__setattr__(self, 'inputs', inputs)
        object.__setattr__(self, 'outputs', outputs)
        object.__setattr__(self, 'matrix', matrix)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearOp):
            return NotImplemented
        return (self.inputs == other.inputs and self.outputs == other.outputs
                and np.array_equal(self.matrix, other.matrix))

    def __repr__(self) -> str:
        return f'LinearOp(inputs={self.inputs}, outputs={self.outputs}, matrix={self.matrix.tolist()})'

    def entry(self, out_atom: Atom, in_atom: Atom) -> float:
        return float(self.matrix[self.outputs.index(out_atom), self.inputs.index(in_atom)])


def identity(atoms: Sequence[Atom]) -> LinearOp:
    return LinearOp(tuple(atoms), tuple(atoms), np.eye(len(atoms)))


def from_rows(inputs: Sequence[Atom], outputs: Sequence[Atom], rows) -> LinearOp:
    matrix = np.asarray(rows, dtype=float)
    if matrix.shape != (len(outputs), len(inputs)):
        raise AtomMismatch('matrix shape does not match atom lists',
                           details={'shape': list(matrix.shape), 'outputs': len(outputs), 'inputs': len(inputs)})
    return LinearOp(tuple(inputs), tuple(outputs), matrix)


def _require_same_spaces(ops: Sequence[LinearOp]):
    first = ops[0]
    for op in ops[1:]:
        if op.inputs != first.inputs or op.outputs != first.outputs:
            raise AtomMismatch('operators act between different atom lists')


def lincomb(coeffs: Sequence[Real], ops: Sequence[LinearOp]) -> LinearOp:
    if not ops or len(coeffs) != len(ops):
        raise LincompError('lincomb needs matching non-empty coefficient and operator lists')
    _require_same_spaces(ops)
    matrix = sum(float(c) * op.matrix for c, op in zip(coeffs, ops))
    return LinearOp(ops[0].inputs, ops[0].outputs, matrix)


def op_sub(op1: LinearOp, op2: LinearOp) -> LinearOp:
    return lincomb([1, -1], [op1, op2])


def apply(op: LinearOp, mu: SignedMeasure) -> SignedMeasure:
    stray = [atom for atom in mu if atom not in op.inputs]
    if stray:
        raise AtomMismatch('measure has atoms outside the operator inputs', details={'atoms': stray})
    vector = np.array([float(mu.weight(atom)) for atom in op.inputs])
    image = op.matrix @ vector if op.inputs else np.zeros(len(op.outputs))
    return SignedMeasure({atom: float(value) for atom, value in zip(op.outputs, image)})


def compose(op2: LinearOp, op1: LinearOp) -> LinearOp:
    """Run op1 then op2."""
    if op1.outputs != op2.inputs:
        raise AtomMismatch('op1 outputs must equal op2 inputs',
                           details={'op1_outputs': list(op1.outputs), 'op2_inputs': list(op2.inputs)})
    return LinearOp(op1.inputs, op2.outputs, op2.matrix @ op1.matrix)


def _column_norms(op: LinearOp) -> np.ndarray:
    return np.abs(op.matrix).sum(axis=0)


def op_norm(op: LinearOp) -> float:
    """Norm induced by tv_norm: the largest absolute column sum."""
    if not op.inputs:
        return 0.0
    return float(_column_norms(op).max())


def norm_witness(op: LinearOp) -> Atom:
    """An input atom whose point mass attains op_norm."""
    if not op.inputs:
        raise AtomMismatch('operator has no input atoms')
    return op.inputs[int(np.argmax(_column_norms(op)))]


def program_distance(op1: LinearOp, op2: LinearOp) -> float:
    return op_norm(op_sub(op1, op2))


def branch_operator(alpha: Real, p: LinearOp, q: LinearOp) -> LinearOp:
    """Denotation of `if random < alpha then P else Q`."""
    if not 0 < alpha < 1:
        raise AlphaOutOfRange(f'alpha must lie strictly between 0 and 1, got {alpha}')
    return lincomb([alpha, 1 - alpha], [p, q])


def is_stochastic(op: LinearOp, tol: Optional[float] = None) -> bool:
    if tol is None:
        from lincomp.config import LincompConfig
        tol = LincompConfig.STOCHASTIC_TOL
    if np.any(op.matrix < 0):
        return False
    return bool(np.all(np.abs(op.matrix.sum(axis=0) - 1.0) <= tol))

