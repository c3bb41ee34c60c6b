"""Two-channel signed samplers: determinism, fairness, unbiasedness and kernels."""

import itertools

import numpy as np
import pytest

from lincomp.errors import AlphaOutOfRange, AtomMismatch, ColumnMassNotOne, LincompError, MalformedInput
from lincomp.services.signed_measure import SignedMeasure, apply, branch_operator, from_rows, identity, tv_norm
from lincomp.services.signed_sampler import (
    Combo,
    _ComboNode,
    branch_sampler,
    combo,
    error_bound,
    estimate,
    exact_semantics,
    leaf,
    point_leaf,
    push_through,
    signed_samples,
    spec_from_json,
    spec_mass,
    spec_to_json,
    stream,
)

DELTA_A, DELTA_B = point_leaf('a'), point_leaf('b')
TWO_MINUS_THREE = combo((2, DELTA_A), (-3, DELTA_B))
SPREAD = leaf({'a': 0.2, 'b': 0.3, 'c': 0.5})


def test_exact_semantics_examples():
    assert exact_semantics(DELTA_A) == SignedMeasure({'a': 1})
    assert exact_semantics(TWO_MINUS_THREE) == SignedMeasure({'a': 2, 'b': -3})
    assert exact_semantics(combo((0.5, SPREAD), (0.5, SPREAD))) == exact_semantics(SPREAD)


def test_stream_examples():
    samples = list(stream(DELTA_A, seed=1, n=3))
    assert [(s.atom, s.sign) for s in samples] == [('a', 1)] * 3
    pair = [(s.atom, s.sign) for s in stream(combo((1, DELTA_A), (-1, DELTA_B)), seed=1, n=4)]
    assert sorted(pair) == [('a', 1), ('a', 1), ('b', -1), ('b', -1)]
    assert pair[0] != pair[1]
    assert all(s.sign == -1 for s in stream(combo((-2, DELTA_A)), seed=3, n=50))


def test_stream_is_deterministic():
    spec = combo((2, SPREAD), (-1, leaf({'b': 0.5, 'd': 0.5})))
    for mixture in (False, True):
        first = list(stream(spec, seed=42, n=5_000, mixture=mixture))
        second = list(stream(spec, seed=42, n=5_000, mixture=mixture))
        assert first == second
    assert list(stream(SPREAD, seed=1, n=200)) != list(stream(SPREAD, seed=2, n=200))


def test_sibling_streams_do_not_depend_on_each_other():
    # Leaf draws for child 0 come from their own keyed generator.
    left = combo((1, SPREAD), (1, DELTA_B))
    right = combo((1, SPREAD), (1, leaf({'x': 0.5, 'y': 0.5})))
    picks_left = [s.atom for s in stream(left, seed=9, n=400)][0::2]
    picks_right = [s.atom for s in stream(right, seed=9, n=400)][0::2]
    assert picks_left == picks_right


def test_stride_fairness():
    coefficients = [3, -1, 0.5, 2]
    spec = Combo(tuple((c, point_leaf(f'c{i}')) for i, c in enumerate(coefficients)))
    node = _ComboNode(spec, seed=0, path=(), mixture=False)
    total = sum(abs(c) for c in coefficients)
    counts = [0] * len(coefficients)
    for n in range(1, 5_001):
        counts[node._next_child()] += 1
        for i, c in enumerate(coefficients):
            assert abs(counts[i] - n * abs(c) / total) <= len(coefficients)


def test_estimate_examples():
    report = estimate(DELTA_A, seed=5, n=1_000)
    assert report.estimate == SignedMeasure({'a': 1.0})
    assert report.target_mass == 1.0
    assert report.tv_error_bound == error_bound(1.0, 1, 1_000)


def test_linear_combination_within_bound_over_many_seeds():
    exact = SignedMeasure({'a': 2, 'b': -3})
    assert spec_mass(TWO_MINUS_THREE) == 5
    for seed in range(30):
        report = estimate(TWO_MINUS_THREE, seed=seed, n=100_000)
        assert report.within_bound(exact)


def test_cancellation_spec_estimates_near_zero():
    spec = combo((1, SPREAD), (-1, SPREAD))
    assert exact_semantics(spec) == SignedMeasure()
    report = estimate(spec, seed=11, n=100_000)
    assert tv_norm(report.estimate) <= report.tv_error_bound


@pytest.mark.parametrize('mixture', [False, True])
def test_estimates_are_unbiased_across_seeds(mixture):
    spec = combo((2, SPREAD), (-1, leaf({'b': 0.5, 'd': 0.5})))
    exact = exact_semantics(spec)
    runs = [estimate(spec, seed=seed, n=100_000, mixture=mixture).estimate for seed in range(30)]
    for atom in ('a', 'b', 'c', 'd'):
        values = np.array([float(run.weight(atom)) for run in runs])
        standard_error = max(values.std(ddof=1) / np.sqrt(len(values)), 1e-12)
        assert abs(values.mean() - float(exact.weight(atom))) <= 3 * standard_error


def test_nested_combo_is_scheduled_by_child_mass():
    spec = combo((1, combo((1, DELTA_A), (1, DELTA_B))), (1, point_leaf('c')))
    assert spec_mass(spec) == 3
    assert exact_semantics(spec) == SignedMeasure({'a': 1, 'b': 1, 'c': 1})
    report = estimate(spec, seed=2, n=3_000)
    for atom in ('a', 'b', 'c'):
        assert report.estimate.weight(atom) == pytest.approx(1.0, abs=1e-12)


def test_branch_sampler_matches_branch_operator():
    spec = branch_sampler(0.25, DELTA_A, DELTA_B)
    assert exact_semantics(branch_sampler(0.5, DELTA_A, DELTA_B)) == SignedMeasure({'a': 0.5, 'b': 0.5})
    assert exact_semantics(branch_sampler(0.3, SPREAD, SPREAD)) == pytest.approx(exact_semantics(SPREAD))
    ab = ('a', 'b')
    operator = branch_operator(0.25, identity(ab), from_rows(ab, ab, [[0, 1], [1, 0]]))
    assert exact_semantics(spec) == apply(operator, SignedMeasure({'a': 1}))
    report = estimate(spec, seed=4, n=100_000, mixture=True)
    assert report.within_bound(exact_semantics(spec))
    with pytest.raises(AlphaOutOfRange):
        branch_sampler(0, DELTA_A, DELTA_B)


def test_push_through_examples():
    ab = ('a', 'b')
    swap2 = from_rows(ab, ab, [[0, 1], [1, 0]])
    assert {(s.atom, s.sign) for s in push_through(swap2, DELTA_A).stream(seed=0, n=100)} == {('b', 1)}
    rotation = from_rows(ab, ab, [[0, -1], [1, 0]])
    pushed = push_through(rotation, DELTA_B)
    assert {(s.atom, s.sign) for s in pushed.stream(seed=0, n=100)} == {('a', -1)}
    assert pushed.estimate(seed=0, n=100).estimate == SignedMeasure({'a': -1.0})
    unchanged = push_through(identity(('a', 'b', 'c')), SPREAD)
    assert list(unchanged.stream(seed=6, n=300)) == list(stream(SPREAD, seed=6, n=300))


@pytest.mark.parametrize('rows', [
    [[0.5, -0.25, 0.0], [-0.5, 0.25, 1.0], [0.0, 0.5, 0.0]],
    [[-1.0, 0.0, 0.3], [0.0, -1.0, -0.3], [0.0, 0.0, 0.4]],
    [[0.2, 0.2, -0.2], [0.3, -0.3, 0.3], [-0.5, 0.5, 0.5]],
])
def test_push_through_agrees_with_apply(rows):
    atoms = ('a', 'b', 'c')
    op = from_rows(atoms, atoms, rows)
    spec = combo((1.5, SPREAD), (-0.5, leaf({'a': 0.5, 'c': 0.5})))
    pushed = push_through(op, spec)
    exact = apply(op, exact_semantics(spec))
    assert pushed.exact_semantics() == exact
    report = pushed.estimate(seed=17, n=100_000)
    assert report.within_bound(exact)


def test_push_through_preconditions():
    ab = ('a', 'b')
    with pytest.raises(ColumnMassNotOne):
        push_through(from_rows(ab, ab, [[0.5, 0], [0, 1]]), DELTA_A)
    with pytest.raises(AtomMismatch):
        push_through(identity(ab), point_leaf('z'))


def test_invalid_specs_are_rejected():
    with pytest.raises(LincompError):
        leaf({'a': 0.5})
    with pytest.raises(LincompError):
        leaf({'a': 1.5, 'b': -0.5})
    with pytest.raises(LincompError):
        combo((0, DELTA_A))
    with pytest.raises(LincompError):
        list(stream(DELTA_A, seed=0, n=0))


def test_spec_json_descriptors():
    payload = {'combo': [[2, {'leaf': {'a': 1}}], [-3, {'leaf': {'b': 1}}]]}
    spec = spec_from_json(payload)
    assert exact_semantics(spec) == SignedMeasure({'a': 2, 'b': -3})
    assert spec_from_json(spec_to_json(spec)) == spec
    for bad in ({}, {'leaf': [1]}, {'combo': [[1]]}, {'tree': {}}, {'leaf': {'a': 'x'}}):
        with pytest.raises(MalformedInput):
            spec_from_json(bad)


def test_signed_samples_histogram():
    samples = list(itertools.islice(stream(TWO_MINUS_THREE, seed=0, n=10), 10))
    histogram = signed_samples(samples)
    assert histogram == SignedMeasure({'a': 4, 'b': -6})
