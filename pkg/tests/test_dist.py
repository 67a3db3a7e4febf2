import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from props import THREE_PRED_SHAPES, systems
from pidkit.dist import (DistributionError, JointDistribution, coinformation, coinformation_bounds_check,
                         conditional_mutual_information, entropy, local_coinformation, local_surprisal_delta,
                         make_source, marginalize, mutual_information, sign, source_label,
                         specific_information)
from pidkit.systems import get_example


class TestValidation:
    def test_rejects_negative(self):
        with pytest.raises(DistributionError):
            JointDistribution([[0.5, 0.6], [-0.1, 0.0]])

    def test_rejects_bad_sum(self):
        with pytest.raises(DistributionError, match="sum to 0.9"):
            JointDistribution([0.4, 0.5])

    def test_rejects_nan(self):
        with pytest.raises(DistributionError):
            JointDistribution([np.nan, 1.0])

    def test_rejects_scalar(self):
        with pytest.raises(DistributionError):
            JointDistribution(1.0)

    def test_sum_tolerance(self):
        JointDistribution([0.5, 0.5 + 5e-10])

    def test_table_is_read_only(self):
        d = JointDistribution([0.5, 0.5])
        with pytest.raises(ValueError):
            d.probs[0] = 1.0

    def test_label_count(self):
        with pytest.raises(DistributionError):
            JointDistribution([0.5, 0.5], labels=["a", "b"])


def test_default_labels_and_axes():
    d = JointDistribution(np.full((2, 2, 2), 1 / 8), target_index=0)
    assert d.labels == ("s", "x1", "x2")
    assert d.predictor_axes == (1, 2)
    assert d.source_axes({2}) == (2,)
    with pytest.raises(DistributionError):
        d.source_axes({3})


def test_from_outcomes_and_uniform():
    d = JointDistribution.uniform([(0, 0, 0), (1, 1, 1)])
    assert d.cardinalities == (2, 2, 2)
    assert d.support() == [(0, 0, 0), (1, 1, 1)]
    e = JointDistribution.from_outcomes({(0, 2): 0.25, (1, 0): 0.75})
    assert e.cardinalities == (2, 3)
    assert e.prob_of((1, 0), [0]) == 0.75


def test_no_target():
    d = JointDistribution([0.5, 0.5], target_index=None)
    with pytest.raises(DistributionError):
        d.require_target()
    assert d.n_predictors == 1


def test_marginalize_keeps_order_and_target():
    d = get_example("and")
    m = marginalize(d, [2, 0])
    assert m.cardinalities == (2, 2)
    assert m.target_index == 1
    assert m.labels == ("x1", "s")
    assert marginalize(d, [0, 1]).target_index is None


def test_make_source():
    assert make_source([2, 1, 2]) == frozenset({1, 2})
    assert source_label({2, 1}) == "{12}"
    with pytest.raises(DistributionError):
        make_source([])
    with pytest.raises(DistributionError):
        make_source([0])


def test_sign_deadzone():
    assert list(sign([1e-13, -1e-13, 1e-11, -2.0, 0.0])) == [0, 0, 1, -1, 0]


@given(systems())
def test_entropy_and_mi_match_oracle(d):
    pmf = oracles.as_dict(d.probs)
    assert abs(entropy(d) - oracles.entropy(pmf, range(d.ndim))) <= 1e-12
    assert abs(mutual_information(d, {0}, {2}) - oracles.mi(pmf, {0}, {2})) <= 1e-12
    assert abs(mutual_information(d, {0, 1}, {2}) - oracles.mi(pmf, {0, 1}, {2})) <= 1e-12


@given(systems())
def test_chain_rule(d):
    lhs = mutual_information(d, {0, 1}, {2})
    rhs = mutual_information(d, {0}, {2}) + conditional_mutual_information(d, {1}, {2}, {0})
    assert math.isclose(lhs, rhs, abs_tol=1e-12)


@given(systems(), st.data())
def test_local_quantities_match_oracle(d, data):
    pmf = oracles.as_dict(d.probs)
    outcome = data.draw(st.sampled_from(d.support()))
    want = oracles.local_h(pmf, {0}, outcome) + oracles.local_h(pmf, {2}, outcome) \
        - oracles.local_h(pmf, {0, 2}, outcome)
    assert abs(local_surprisal_delta(d, {1}, outcome) - want) <= 1e-12
    groups = [{0}, {1}, {2}]
    want_c = sum((-1) ** (len(c) + 1) * oracles.local_h(pmf, set().union(*c), outcome)
                 for k in (1, 2, 3) for c in combinations(groups, k))
    assert abs(local_coinformation(d, groups, outcome) - want_c) <= 1e-12


@given(systems(THREE_PRED_SHAPES))
def test_coinformation_four_groups(d):
    pmf = oracles.as_dict(d.probs)
    groups = [{0}, {1}, {2}, {3}]
    want = -sum((-1) ** len(c) * oracles.entropy(pmf, set().union(*c))
                for k in range(1, 5) for c in combinations(groups, k))
    assert abs(coinformation(d, groups) - want) <= 1e-12


@given(systems())
def test_specific_information_matches_oracle(d):
    pmf = oracles.as_dict(d.probs)
    ps = d.probs.sum(axis=(0, 1))
    for sv in np.nonzero(ps)[0]:
        got = specific_information(d, {1, 2}, int(sv))
        assert abs(got - oracles.specific_info(pmf, {0, 1}, 2, int(sv))) <= 1e-12
    # averaging specific information over the target recovers the MI
    avg = sum(ps[s] * specific_information(d, {1}, s) for s in np.nonzero(ps)[0])
    assert abs(avg - mutual_information(d, {0}, {2})) <= 1e-12


def test_coinformation_examples():
    assert abs(coinformation(get_example("rdn"), [{0}, {1}, {2}]) - 1) <= 1e-12
    assert abs(coinformation(get_example("xor"), [{0}, {1}, {2}]) + 1) <= 1e-12


def test_bounds_are_attained():
    xor = coinformation_bounds_check(get_example("xor"))
    assert xor.holds and abs(xor.interaction_information - 1) <= 1e-12 and abs(xor.upper_margin) <= 1e-12
    rdn = coinformation_bounds_check(get_example("rdn"))
    assert rdn.holds and abs(rdn.interaction_information + 1) <= 1e-12 and abs(rdn.lower_margin) <= 1e-12


def test_coinformation_group_errors():
    d = get_example("and")
    with pytest.raises(DistributionError):
        coinformation(d, [])
    with pytest.raises(DistributionError):
        coinformation(d, [{0}, set()])
