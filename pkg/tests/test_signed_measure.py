"""Signed measures, Hahn-Jordan decomposition and operators as program denotations."""

from fractions import Fraction

import numpy as np
import pytest

from lincomp.errors import AlphaOutOfRange, AtomMismatch
from lincomp.services.signed_measure import (
    ZERO_MEASURE,
    SignedMeasure,
    add,
    apply,
    branch_operator,
    compose,
    from_rows,
    hahn_jordan,
    identity,
    info_join,
    info_leq,
    is_positive,
    is_stochastic,
    lincomb,
    material_leq,
    meet,
    negate,
    norm_witness,
    op_norm,
    point_mass,
    program_distance,
    scale,
    total_mass,
    tv_norm,
)

AB = ('a', 'b')
SWAP2 = from_rows(AB, AB, [[0, 1], [1, 0]])
HALVES = from_rows(AB, AB, [[0.5, 0.5], [0.5, 0.5]])


@pytest.fixture
def random_measure(rng):
    atoms = [f'x{i}' for i in range(16)]

    def make(size: int = 16) -> SignedMeasure:
        chosen = rng.choice(atoms, size=int(rng.integers(0, size + 1)), replace=False)
        return SignedMeasure({str(atom): Fraction(int(rng.integers(-40, 41)), int(rng.integers(1, 9)))
                              for atom in chosen})

    return make


def _random_operator(rng, size: int = 8):
    atoms = [f'x{i}' for i in range(size)]
    return from_rows(atoms, atoms, rng.normal(size=(size, size)))


def _random_stochastic(rng, size: int = 4):
    matrix = rng.random((size, size))
    atoms = [f'x{i}' for i in range(size)]
    return from_rows(atoms, atoms, matrix / matrix.sum(axis=0))


def test_vector_space_examples():
    assert add(SignedMeasure({'a': 1}), SignedMeasure({'a': -1})) == ZERO_MEASURE
    assert scale(2, SignedMeasure({'a': 1, 'b': Fraction(-1, 2)})) == SignedMeasure({'a': 2, 'b': -1})
    assert add(SignedMeasure({'a': 2}), SignedMeasure({'b': 3})) == SignedMeasure({'a': 2, 'b': 3})


def test_vector_space_axioms_are_exact(random_measure):
    for _ in range(1_000):
        mu, nu, rho = random_measure(), random_measure(), random_measure()
        c, d = Fraction(3, 7), Fraction(-5, 2)
        assert (mu + nu) + rho == mu + (nu + rho)
        assert mu + nu == nu + mu
        assert mu + ZERO_MEASURE == mu
        assert mu + negate(mu) == ZERO_MEASURE
        assert scale(c, mu + nu) == scale(c, mu) + scale(c, nu)
        assert scale(c + d, mu) == scale(c, mu) + scale(d, mu)


def test_material_order_examples():
    assert material_leq(SignedMeasure({'a': 1}), SignedMeasure({'a': 2}))
    assert not material_leq(SignedMeasure({'a': 1, 'b': 1}), SignedMeasure({'a': 2}))
    mu = SignedMeasure({'a': 2, 'b': -3})
    assert material_leq(mu, mu)


def test_material_meet_is_lower_bound():
    mu = SignedMeasure({'a': 1, 'b': -2})
    nu = SignedMeasure({'a': -1, 'b': 3})
    low = meet(mu, nu)
    assert low == SignedMeasure({'a': -1, 'b': -2})
    assert material_leq(low, mu) and material_leq(low, nu)


def test_hahn_jordan_examples():
    parts = hahn_jordan(SignedMeasure({'a': 2, 'b': -3}))
    assert parts.positive == SignedMeasure({'a': 2})
    assert parts.negative == SignedMeasure({'b': -3})
    assert hahn_jordan(SignedMeasure({'a': 1})).negative == ZERO_MEASURE
    empty = hahn_jordan(ZERO_MEASURE)
    assert empty.positive == ZERO_MEASURE and empty.negative == ZERO_MEASURE


def test_hahn_jordan_is_exact_disjoint_and_minimal(random_measure):
    for _ in range(10_000):
        mu = random_measure()
        parts = hahn_jordan(mu)
        assert parts.positive + parts.negative == mu
        assert not set(parts.positive) & set(parts.negative)
        assert is_positive(parts.positive)
        assert is_positive(negate(parts.negative))
        slack = SignedMeasure({atom: abs(weight) for atom, weight in random_measure(4).items()})
        other_positive, other_negative = parts.positive + slack, parts.negative - slack
        assert other_positive + other_negative == mu
        assert material_leq(parts.positive, other_positive)


def test_knowledge_order_examples(random_measure):
    mu = SignedMeasure({'a': 2, 'b': -3})
    parts = hahn_jordan(mu)
    assert info_join(parts.positive, parts.negative) == mu
    assert info_leq(SignedMeasure({'a': 1, 'b': -1}), SignedMeasure({'a': 2, 'b': -2}))
    for _ in range(500):
        nu = random_measure()
        assert info_leq(ZERO_MEASURE, nu)
        p = hahn_jordan(nu)
        assert info_join(p.positive, p.negative) == nu


def test_tv_norm_examples_and_axioms(random_measure):
    assert tv_norm(SignedMeasure({'a': 2, 'b': -3})) == 5
    assert tv_norm(ZERO_MEASURE) == 0
    for _ in range(1_000):
        mu, nu = random_measure(), random_measure()
        assert tv_norm(mu + nu) <= tv_norm(mu) + tv_norm(nu)
        assert tv_norm(scale(Fraction(-7, 3), mu)) == Fraction(7, 3) * tv_norm(mu)


def test_apply_examples():
    mu = SignedMeasure({'a': 2, 'b': -3})
    assert apply(identity(AB), mu) == mu
    assert apply(SWAP2, SignedMeasure({'a': 1})) == SignedMeasure({'b': 1})
    assert apply(HALVES, mu) == SignedMeasure({'a': -0.5, 'b': -0.5})
    with pytest.raises(AtomMismatch):
        apply(SWAP2, SignedMeasure({'c': 1}))


def test_entry_reads_output_row_and_input_column():
    op = from_rows(('a', 'b'), ('x', 'y', 'z'), [[0.5, 0], [0.5, -1], [0, 2]])
    assert op.entry('y', 'b') == -1.0
    assert op.entry('z', 'b') == 2.0
    assert apply(op, point_mass('a')).weight('x') == op.entry('x', 'a')
    with pytest.raises(ValueError):
        op.entry('a', 'x')


def test_compose_matches_sequential_application(rng):
    for _ in range(100):
        first, second = _random_operator(rng, 4), _random_operator(rng, 4)
        mu = SignedMeasure({f'x{i}': float(w) for i, w in enumerate(rng.normal(size=4))})
        expected = apply(second, apply(first, mu))
        actual = apply(compose(second, first), mu)
        for atom in expected.keys() | actual.keys():
            assert actual.weight(atom) == pytest.approx(expected.weight(atom), abs=1e-12)


def test_op_norm_examples():
    assert op_norm(identity(['a', 'b', 'c'])) == 1
    assert op_norm(HALVES) == 1
    assert op_norm(from_rows(AB, AB, np.zeros((2, 2)))) == 0


def test_operator_norm_bounds_and_witness(rng):
    for _ in range(200):
        op = _random_operator(rng)
        mu = SignedMeasure({f'x{i}': float(w) for i, w in enumerate(rng.normal(size=8))})
        assert tv_norm(apply(op, mu)) <= op_norm(op) * tv_norm(mu) + 1e-9
        witness = norm_witness(op)
        assert tv_norm(apply(op, point_mass(witness))) == pytest.approx(op_norm(op))


def test_program_distance_is_a_metric(rng):
    assert program_distance(SWAP2, SWAP2) == 0
    assert program_distance(identity(AB), SWAP2) == 2
    for _ in range(1_000):
        a, b, c = (_random_operator(rng) for _ in range(3))
        assert program_distance(a, b) == pytest.approx(program_distance(b, a))
        assert program_distance(a, c) <= program_distance(a, b) + program_distance(b, c) + 1e-9
        assert program_distance(a, a) == 0


def test_branch_operator_examples():
    assert branch_operator(0.5, identity(AB), SWAP2) == HALVES
    assert branch_operator(0.25, SWAP2, SWAP2) == SWAP2
    mu = SignedMeasure({'a': 1, 'b': -2})
    mixed = apply(branch_operator(0.25, identity(AB), SWAP2), mu)
    expected = add(scale(0.25, apply(identity(AB), mu)), scale(0.75, apply(SWAP2, mu)))
    assert mixed == expected
    with pytest.raises(AlphaOutOfRange):
        branch_operator(1, identity(AB), SWAP2)


def test_stochastic_operators(rng):
    assert is_stochastic(identity(AB))
    assert not is_stochastic(from_rows(AB, AB, [[1, 0], [1, 1]]))
    for _ in range(100):
        p, q = _random_stochastic(rng), _random_stochastic(rng)
        assert is_stochastic(branch_operator(0.3, p, q))
        weights = rng.random(4)
        mu = SignedMeasure({f'x{i}': float(w) for i, w in enumerate(weights / weights.sum())})
        image = apply(p, mu)
        assert is_positive(image)
        assert total_mass(image) == pytest.approx(1.0)


def test_lincomb_requires_matching_spaces():
    other = identity(['a', 'c'])
    with pytest.raises(AtomMismatch):
        lincomb([1, 1], [SWAP2, other])
