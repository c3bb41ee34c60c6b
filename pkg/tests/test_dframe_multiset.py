"""Ray-pair correspondence, signed characteristic functions and negative length."""

import numpy as np
import pytest

from lincomp.errors import NonFiniteEndpoint
from lincomp.services.dframe_multiset import (
    RayPair,
    char_by_rays,
    char_function,
    char_value,
    from_ray_pair,
    integrate_char,
    is_consistent,
    is_total,
    ray_info_leq,
    signed_length,
    to_ray_pair,
)
from lincomp.services.pii_core import INF, PII, info_leq
from lincomp.services.pii_metrics import partial_metric


def test_ray_pair_examples():
    assert to_ray_pair(PII(1, 3)) == RayPair(1, 3)
    assert to_ray_pair(PII(-INF, INF)) == RayPair(-INF, INF)
    assert is_consistent(to_ray_pair(PII(1, 3)))
    assert is_total(to_ray_pair(PII(3, 1)))
    assert is_consistent(to_ray_pair(PII(2, 2)))
    assert not is_total(to_ray_pair(PII(2, 2)))


def test_round_trip_including_infinite_endpoints(random_pii, rng):
    choices = [-INF, INF]
    for _ in range(10_000):
        x = random_pii()
        if rng.random() < 0.2:
            x = PII(choices[int(rng.integers(2))], x.b)
        if rng.random() < 0.2:
            x = PII(x.a, choices[int(rng.integers(2))])
        assert from_ray_pair(to_ray_pair(x)) == x


def test_order_transport(random_pii):
    for _ in range(5_000):
        x, y = random_pii(4), random_pii(4)
        assert info_leq(x, y) == ray_info_leq(to_ray_pair(x), to_ray_pair(y))


def test_char_value_examples():
    assert char_value(PII(1, 3), 2) == 1
    assert char_value(PII(3, 1), 2) == -1
    assert char_value(PII(3, 1), 3) == 0
    assert char_value(PII(2, 2), 2) == 1


def test_char_value_matches_double_subtraction(random_pii):
    grid = np.linspace(-25, 25, 401)
    for _ in range(200):
        x = random_pii()
        values = char_function(x, grid)
        for t, value in zip(grid, values):
            if t == x.a or t == x.b:
                continue
            assert value == char_by_rays(x, t) == char_value(x, t)


def test_signed_length_examples():
    assert signed_length(PII(1, 3)) == 2
    assert signed_length(PII(3, 1)) == -2
    assert signed_length(PII(5, 5)) == 0
    with pytest.raises(NonFiniteEndpoint):
        signed_length(PII(0, INF))


def test_signed_length_equals_self_distance(random_pii):
    for _ in range(10_000):
        x = random_pii()
        assert signed_length(x) == partial_metric(x, x)


@pytest.mark.parametrize('x', [PII(1, 3), PII(3, 1), PII(-2.5, 4), PII(7, -1.25)])
def test_quadrature_matches_signed_length(x):
    assert abs(integrate_char(x) - float(signed_length(x))) <= 1e-6
    assert abs(integrate_char(x, -10, 10) - float(signed_length(x))) <= 1e-4
