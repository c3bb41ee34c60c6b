"""Pairs of open rays, signed characteristic functions and signed length.

[a,b] corresponds to the d-frame element <(-inf,a), (b,+inf)>. Segments are
the consistent (non-overlapping) pairs, pseudosegments the total ones.
"""

from dataclasses import dataclass
from numbers import Real
from typing import Optional

import numpy as np

from lincomp.errors import LincompError, NonFiniteEndpoint
from lincomp.services.pii_core import PII, ExtReal


@dataclass(frozen=True)
class RayPair:
    lower_ray_end: ExtReal
    upper_ray_start: ExtReal


def to_ray_pair(x: PII) -> RayPair:
    return RayPair(lower_ray_end=x.a, upper_ray_start=x.b)


def from_ray_pair(r: RayPair) -> PII:
    return PII(r.lower_ray_end, r.upper_ray_start)


def is_consistent(r: RayPair) -> bool:
    return r.lower_ray_end <= r.upper_ray_start


def is_total(r: RayPair) -> bool:
    return r.upper_ray_start < r.lower_ray_end


def lower_ray_subset(r: RayPair, s: RayPair) -> bool:
    """(-inf, r) is contained in (-inf, s)."""
    return r.lower_ray_end <= s.lower_ray_end


def upper_ray_subset(r: RayPair, s: RayPair) -> bool:
    """(r, +inf) is contained in (s, +inf)."""
    return s.upper_ray_start <= r.upper_ray_start


def ray_info_leq(r: RayPair, s: RayPair) -> bool:
    """Informational order carried over: both rays of r sit inside those of s."""
    return lower_ray_subset(r, s) and upper_ray_subset(r, s)


def char_value(x: PII, t: Real) -> int:
    """Signed membership of t: 1 on a closed segment, -1 inside an open pseudosegment."""
    if x.is_segment:
        return 1 if x.a <= t <= x.b else 0
    return -1 if x.b < t < x.a else 0


def char_by_rays(x: PII, t: Real) -> int:
    """1 minus the indicators of both rays; overlap is subtracted twice."""
    return 1 - int(t < x.a) - int(t > x.b)


def char_function(x: PII, grid: np.ndarray) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    a, b = float(x.a), float(x.b)
    if x.is_segment:
        return ((grid >= a) & (grid <= b)).astype(np.int8)
    return -((grid > b) & (grid < a)).astype(np.int8)


def signed_length(x: PII) -> Real:
    if not x.is_finite:
        raise NonFiniteEndpoint(f'signed length needs finite endpoints, got {x}')
    return x.b - x.a


def integrate_char(x: PII, lo: Optional[float] = None, hi: Optional[float] = None,
                   cells: int = 1_000_000) -> float:
    """Midpoint-rule integral of char_value over [lo, hi] (default: the bounding box)."""
    if not x.is_finite:
        raise NonFiniteEndpoint(f'cannot integrate over {x}')
    lo = float(min(x.a, x.b)) if lo is None else float(lo)
    hi = float(max(x.a, x.b)) if hi is None else float(hi)
    if hi < lo or cells < 1:
        raise LincompError('integration needs lo <= hi and at least one cell')
    if hi == lo:
        return 0.0
    width = (hi - lo) / cells
    midpoints = lo + (np.arange(cells) + 0.5) * width
    return float(np.sum(char_function(x, midpoints), dtype=np.float64) * width)
