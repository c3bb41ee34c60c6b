"""Partially inconsistent interval numbers: orders, arithmetic and involutions.

A PII is a pair [a, b] of extended reals with no ordering constraint. When
a <= b it is a segment, when b < a it is a pseudosegment. Endpoints may be
ints, Fractions or floats; use Fractions when exact algebra matters.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Real
from typing import Optional, Sequence, Union

from lincomp.errors import EmptySequence, InfinityClash, LincompError, OutOfConfinement

logger = logging.getLogger(__name__)

ExtReal = Union[int, Fraction, float]

INF = math.inf


def is_infinite(value: ExtReal) -> bool:
    return isinstance(value, float) and math.isinf(value)


def ext_add(u: ExtReal, v: ExtReal) -> ExtReal:
    """Add two extended reals; (+inf) + (-inf) is refused."""
    if is_infinite(u) and is_infinite(v) and u != v:
        raise InfinityClash('opposite infinities in one component', details={'left': u, 'right': v})
    return u + v


def ext_scale(c: Real, u: ExtReal) -> ExtReal:
    if is_infinite(u) and c == 0:
        raise InfinityClash('zero times an infinite endpoint', details={'endpoint': u})
    return c * u


@dataclass(frozen=True)
class PII:
    a: ExtReal
    b: ExtReal

    @property
    def is_segment(self) -> bool:
        return self.a <= self.b

    @property
    def is_pseudosegment(self) -> bool:
        return self.b < self.a

    @property
    def is_point(self) -> bool:
        return self.a == self.b

    @property
    def is_finite(self) -> bool:
        return not (is_infinite(self.a) or is_infinite(self.b))

    def __add__(self, other: 'PII') -> 'PII':
        return add(self, other)

    def __sub__(self, other: 'PII') -> 'PII':
        return sub(self, other)

    def __neg__(self) -> 'PII':
        return true_minus(self)

    def __invert__(self) -> 'PII':
        return weak_minus(self)

    def __mul__(self, c: Real) -> 'PII':
        return scale(c, self)

    __rmul__ = __mul__

    def __str__(self) -> str:
        from lincomp.utils.validators import format_pii
        return format_pii(self)


ZERO = PII(0, 0)


class StepKind(Enum):
    MONOTONIC = 'Monotonic'
    INVOLUTION = 'Involution'
    BOTH = 'Both'
    NEITHER = 'Neither'


class FourValued(Enum):
    FALSE = 'f'
    TRUE = 't'
    BOTTOM = 'bottom'
    TOP = 'top'


_FOUR_VALUED_EMBEDDING = {
    FourValued.FALSE: PII(0, 0),
    FourValued.TRUE: PII(1, 1),
    FourValued.BOTTOM: PII(0, 1),
    FourValued.TOP: PII(1, 0),
}


# --- group and vector-space structure ---

def add(x: PII, y: PII) -> PII:
    return PII(ext_add(x.a, y.a), ext_add(x.b, y.b))


def true_minus(x: PII) -> PII:
    """Group inverse [a,b] -> [-a,-b]; anti-monotone for the informational order."""
    return PII(-x.a, -x.b)


def weak_minus(x: PII) -> PII:
    """Monotone minus [a,b] -> [-b,-a]; x + weak_minus(x) only approximates zero."""
    return PII(-x.b, -x.a)


def sub(x: PII, y: PII) -> PII:
    return add(x, true_minus(y))


def scale(c: Real, x: PII) -> PII:
    return PII(ext_scale(c, x.a), ext_scale(c, x.b))


# --- the two orders ---

def info_leq(x: PII, y: PII) -> bool:
    """Informational order: reverse inclusion, x.a <= y.a and y.b <= x.b."""
    return x.a <= y.a and y.b <= x.b


def material_leq(x: PII, y: PII) -> bool:
    return x.a <= y.a and x.b <= y.b


def info_meet(x: PII, y: PII) -> PII:
    return PII(min(x.a, y.a), max(x.b, y.b))


def info_join(x: PII, y: PII) -> PII:
    return PII(max(x.a, y.a), min(x.b, y.b))


def material_meet(x: PII, y: PII) -> PII:
    return PII(min(x.a, y.a), min(x.b, y.b))


def material_join(x: PII, y: PII) -> PII:
    return PII(max(x.a, y.a), max(x.b, y.b))


# --- confinement and the Ginsberg involution ---

def is_confined(x: PII, lower: ExtReal, upper: ExtReal) -> bool:
    return lower <= x.a <= upper and lower <= x.b <= upper


def confine(x: PII, lower: ExtReal, upper: ExtReal) -> PII:
    """Clamp both endpoints into [lower, upper]."""
    if upper < lower:
        raise LincompError('confinement bounds must satisfy lower <= upper', details={'lower': lower, 'upper': upper})
    return PII(min(max(x.a, lower), upper), min(max(x.b, lower), upper))


def ginsberg_involution(x: PII, lower: ExtReal, upper: ExtReal) -> PII:
    """Map [a,b] to [A+B-b, A+B-a] inside the bilattice confined to [A,B]."""
    if is_infinite(lower) or is_infinite(upper) or upper < lower:
        raise OutOfConfinement('confinement bounds must be finite with A <= B', details={'A': lower, 'B': upper})
    if not is_confined(x, lower, upper):
        raise OutOfConfinement(f'{x} is not confined to [{lower},{upper}]', details={'A': lower, 'B': upper})
    pivot = lower + upper
    return PII(pivot - x.b, pivot - x.a)


def embed_four_valued(value: FourValued) -> PII:
    return _FOUR_VALUED_EMBEDDING[FourValued(value)]


def from_four_valued(x: PII) -> FourValued:
    for value, image in _FOUR_VALUED_EMBEDDING.items():
        if image == x:
            return value
    raise LincompError(f'{x} is not one of the four embedded truth values')


def four_valued_negation(value: FourValued) -> FourValued:
    """Negation swaps t and f and fixes bottom and top."""
    return from_four_valued(ginsberg_involution(embed_four_valued(value), 0, 1))


# --- monotonic sequences with involutive steps ---

def classify_step(x: PII, y: PII) -> StepKind:
    monotonic = info_leq(x, y)
    involution = y.a == x.b and y.b == x.a
    if monotonic and involution:
        return StepKind.BOTH
    if monotonic:
        return StepKind.MONOTONIC
    if involution:
        return StepKind.INVOLUTION
    return StepKind.NEITHER


@dataclass(frozen=True)
class SequenceReport:
    valid: bool
    limit: Optional[PII] = None
    diagonal: bool = False
    reduced_length: int = 0


def _spread(values: list) -> ExtReal:
    low, high = min(values), max(values)
    if low == high:
        return 0
    if is_infinite(low) or is_infinite(high):
        return INF
    return high - low


def cancel_involution_pairs(seq: Sequence[PII]) -> list:
    """Collapse every x, swap(x), x run to x (points are left alone)."""
    reduced = []
    for item in seq:
        reduced.append(item)
        while len(reduced) >= 3:
            x, s, y = reduced[-3], reduced[-2], reduced[-1]
            if x == y and not x.is_point and s.a == x.b and s.b == x.a:
                del reduced[-2:]
            else:
                break
    return reduced


def check_sequence(seq: Sequence[PII], tol: float, window: Optional[int] = None) -> SequenceReport:
    """Validate a monotonic sequence with involutive steps and look for its limit.

    The limit is the last element of the reduced sequence when its final
    `window` elements agree within `tol` in both components.
    """
    if not seq:
        raise EmptySequence('sequence must contain at least one element')
    if tol <= 0:
        raise LincompError('tolerance must be positive', details={'tol': tol})
    if window is None:
        from lincomp.config import LincompConfig
        window = LincompConfig.SEQUENCE_WINDOW
    if window < 1:
        raise LincompError('window must be at least 1', details={'window': window})

    for index, (x, y) in enumerate(zip(seq, seq[1:])):
        if classify_step(x, y) is StepKind.NEITHER:
            logger.debug('sequence_rejected', extra={'step': index})
            return SequenceReport(valid=False)

    reduced = cancel_involution_pairs(seq)
    if len(reduced) < window:
        return SequenceReport(valid=True, reduced_length=len(reduced))

    tail = reduced[-window:]
    if _spread([item.a for item in tail]) > tol or _spread([item.b for item in tail]) > tol:
        return SequenceReport(valid=True, reduced_length=len(reduced))

    limit = tail[-1]
    diagonal = limit.is_point or _spread([limit.a, limit.b]) <= 2 * tol
    return SequenceReport(valid=True, limit=limit, diagonal=diagonal, reduced_length=len(reduced))
