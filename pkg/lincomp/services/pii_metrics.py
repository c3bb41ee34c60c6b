"""Partial metric p, signed lower distance l and their PII-valued pairing."""

from dataclasses import dataclass
from numbers import Real

from lincomp.errors import LincompError, NonFiniteEndpoint
from lincomp.services.pii_core import PII


@dataclass(frozen=True)
class DistancePair:
    lower: Real
    upper: Real

    @property
    def as_pii(self) -> PII:
        return PII(self.lower, self.upper)


def _require_finite(*items: PII):
    for x in items:
        if not x.is_finite:
            raise NonFiniteEndpoint(f'distance needs finite endpoints, got {x}')


def swap(x: PII) -> PII:
    """Exchange the endpoints; conjugates l into p and back."""
    return PII(x.b, x.a)


def partial_metric(x: PII, y: PII) -> Real:
    _require_finite(x, y)
    return max(x.b, y.b) - min(x.a, y.a)


def lower_distance(x: PII, y: PII) -> Real:
    _require_finite(x, y)
    return max(x.a, y.a) - min(x.b, y.b)


def relaxed_distance(x: PII, y: PII) -> DistancePair:
    return DistancePair(lower=lower_distance(x, y), upper=partial_metric(x, y))


def self_distance(x: PII) -> PII:
    """[a-b, b-a]; a pseudosegment for pseudosegments."""
    return relaxed_distance(x, x).as_pii


def standard_relaxed_distance(x: PII, y: PII) -> DistancePair:
    """Classical interval relaxed metric: gap (or 0 when overlapping) up to p."""
    if not (x.is_segment and y.is_segment):
        raise LincompError('standard relaxed distance is defined on segments only')
    return DistancePair(lower=max(0, lower_distance(x, y)), upper=partial_metric(x, y))
