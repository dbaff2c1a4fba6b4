import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from chaincert.chain import (
    StationaryDistribution,
    chain_from_matrix,
    check_detailed_balance,
    check_ergodicity,
    make_reversible_chain,
    pi_norm,
    stationary_distribution,
    validate_transition_matrix,
    weighted_inner_product,
)
from chaincert.errors import (
    ColumnSumOff,
    DimensionMismatch,
    NegativeEntry,
    NonFiniteEntry,
    NonSquare,
    NotErgodic,
    NotReversible,
    SingularSystem,
)
from chaincert.generators import ChainSpec, build
from oracles import power_iteration_pi

ROTATION = [[0, 0, 1], [1, 0, 0], [0, 1, 0]]


def sd(*values):
    return StationaryDistribution(np.array(values, dtype=float))


class TestValidate:
    def test_valid(self):
        P = validate_transition_matrix([[1.0, 0.5], [0.0, 0.5]])
        assert P.n == 2
        np.testing.assert_array_equal(P.entries.sum(axis=0), [1.0, 1.0])

    def test_column_sum_off(self):
        with pytest.raises(ColumnSumOff) as info:
            validate_transition_matrix([[0.9, 0.2], [0.2, 0.8]])
        assert info.value.j == 0
        assert info.value.total == pytest.approx(1.1)

    def test_negative_entry(self):
        with pytest.raises(NegativeEntry) as info:
            validate_transition_matrix([[1.1, 0.0], [-0.1, 1.0]])
        assert (info.value.i, info.value.j) == (1, 0)

    @pytest.mark.parametrize("raw", [[[0.5, 0.5]], [], [[[1.0]]], [1.0]])
    def test_non_square(self, raw):
        with pytest.raises(NonSquare):
            validate_transition_matrix(raw)

    def test_nan(self):
        with pytest.raises(NonFiniteEntry):
            validate_transition_matrix([[np.nan, 0.5], [1.0, 0.5]])

    def test_renormalizes_within_tolerance(self):
        P = validate_transition_matrix([[0.5 + 4e-10, 0.5], [0.5, 0.5]])
        assert P.entries[:, 0].sum() == pytest.approx(1.0, abs=1e-15)

    def test_immutable(self):
        P = validate_transition_matrix([[1.0]])
        with pytest.raises(ValueError):
            P.entries[0, 0] = 0.5


class TestErgodicity:
    def test_identity_is_reducible(self):
        assert not check_ergodicity(validate_transition_matrix(np.eye(2))).irreducible

    def test_two_cycle(self):
        r = check_ergodicity(validate_transition_matrix([[0, 1], [1, 0]]))
        assert r.irreducible and r.period == 2 and not r.aperiodic

    def test_self_loops_make_aperiodic(self):
        r = check_ergodicity(validate_transition_matrix([[0.9, 0.1], [0.1, 0.9]]))
        assert r.irreducible and r.aperiodic and r.period == 1

    def test_rotation_period_three(self):
        r = check_ergodicity(validate_transition_matrix(ROTATION))
        assert r.irreducible and r.period == 3

    def test_one_way_is_reducible(self):
        # 0 -> 1 but never back
        r = check_ergodicity(validate_transition_matrix([[0.5, 0.0], [0.5, 1.0]]))
        assert not r.irreducible

    def test_single_state(self):
        r = check_ergodicity(validate_transition_matrix([[1.0]]))
        assert r.ergodic


class TestStationary:
    def test_two_state_closed_form(self):
        P = validate_transition_matrix([[0.8, 0.1], [0.2, 0.9]])
        pi = stationary_distribution(P, check_ergodicity(P)).pi
        np.testing.assert_allclose(pi, [1 / 3, 2 / 3], atol=1e-12)
        np.testing.assert_allclose(pi, power_iteration_pi(P.entries), atol=1e-9)

    def test_uniform_chain(self):
        P = validate_transition_matrix(np.full((5, 5), 0.2))
        np.testing.assert_allclose(stationary_distribution(P, check_ergodicity(P)).pi, 0.2, atol=1e-12)

    def test_lazy_k4(self, lazy_k4):
        P = lazy_k4.P
        np.testing.assert_allclose(stationary_distribution(P, check_ergodicity(P)).pi, 0.25, atol=1e-12)

    def test_not_ergodic(self):
        P = validate_transition_matrix([[0, 1], [1, 0]])
        with pytest.raises(NotErgodic):
            stationary_distribution(P, check_ergodicity(P))

    def test_agrees_with_power_iteration(self, small_corpus):
        for _, chain, _, _ in small_corpus:
            P = chain.P
            pi = stationary_distribution(P, check_ergodicity(P)).pi
            np.testing.assert_allclose(pi, power_iteration_pi(P.entries), atol=1e-9)
            assert np.max(np.abs(P.entries @ pi - pi)) <= 1e-9


class TestDetailedBalance:
    def test_symmetric_uniform(self):
        P = validate_transition_matrix([[0.5, 0.25, 0.25], [0.25, 0.5, 0.25], [0.25, 0.25, 0.5]])
        assert check_detailed_balance(P, sd(1 / 3, 1 / 3, 1 / 3)) == 0.0

    def test_rotation(self):
        v = check_detailed_balance(validate_transition_matrix(ROTATION), sd(1 / 3, 1 / 3, 1 / 3))
        assert v == pytest.approx(1 / 3, abs=1e-15)

    def test_rotation_rejected_as_not_reversible(self):
        with pytest.raises(NotReversible) as info:
            chain_from_matrix(ROTATION)
        assert info.value.violation == pytest.approx(1 / 3)

    @pytest.mark.parametrize("spec", [
        ChainSpec("walk_on_graph", edges=((0, 1, 2.0), (1, 2, 0.5), (0, 2, 1.0), (2, 3, 3.0), (3, 3, 1.0))),
        ChainSpec("metropolis", target=(1.0, 2.0, 3.0, 4.0), alpha=0.0),
        ChainSpec("random_reversible", n=9, density=0.4, seed=3),
    ])
    def test_generator_chains_balanced(self, spec):
        chain = build(spec)
        assert check_detailed_balance(chain.P, chain.pi) <= 1e-12

    def test_corrupted_pi_rejected(self, two_state):
        bad = sd(0.6, 0.4)
        with pytest.raises(SingularSystem, match="not stationary"):
            make_reversible_chain(two_state.P, bad)


class TestInnerProduct:
    def test_ones(self):
        pi = sd(0.2, 0.3, 0.5)
        assert weighted_inner_product(np.ones(3), np.ones(3), pi) == pytest.approx(1.0)

    def test_disjoint_support(self):
        assert weighted_inner_product([1, 0], [0, 1], sd(0.4, 0.6)) == 0.0

    def test_single_term(self):
        assert weighted_inner_product([2, 0], [3, 0], sd(1 / 3, 2 / 3)) == pytest.approx(2.0)

    def test_norm(self):
        assert pi_norm([2, 0], sd(0.25, 0.75)) == pytest.approx(1.0)

    def test_mismatch(self):
        with pytest.raises(DimensionMismatch):
            weighted_inner_product([1, 2, 3], [1, 2], sd(0.5, 0.5))

    @settings(max_examples=200, deadline=None)
    @given(
        st.integers(1, 8).flatmap(lambda n: st.tuples(*[arrays(float, n, elements=st.floats(-10, 10))] * 3,
                                                       arrays(float, n, elements=st.floats(0.01, 1)))),
        st.floats(-5, 5),
    )
    def test_symmetric_bilinear(self, vectors, alpha):
        f, g, h, w = vectors
        pi = StationaryDistribution(w / w.sum())
        ip = lambda a, b: weighted_inner_product(a, b, pi)  # noqa: E731
        assert ip(f, g) == pytest.approx(ip(g, f), abs=1e-12)
        assert ip(alpha * f + h, g) == pytest.approx(alpha * ip(f, g) + ip(h, g), abs=1e-10)


def test_column_stochastic_means_ones_is_eigenvector(small_corpus):
    for _, chain, _, _ in small_corpus:
        np.testing.assert_allclose(chain.matrix.T @ np.ones(chain.n), 1.0, atol=1e-9)
        assert np.all(chain.matrix >= 0)


def test_single_state_chain_accepted():
    chain = chain_from_matrix([[1.0]])
    assert chain.n == 1 and chain.weights[0] == 1.0
