import numpy as np
import pytest

from pidkit.dist import DistributionError, JointDistribution
from pidkit.game import StakeGameSpec, best_response, run_stake_game
from pidkit.systems import get_example


def test_reducedor_rewards():
    res = run_stake_game(StakeGameSpec(get_example("reducedor"), setter=1))
    assert res.rewards[1] == pytest.approx(1.0, abs=1e-15)
    assert res.rewards[2] == pytest.approx(0.75, abs=1e-15)
    assert res.gap == pytest.approx(0.25, abs=1e-15)


def test_setter_two_mirrors_setter_one():
    d = get_example("reducedor")
    r1 = run_stake_game(StakeGameSpec(d, setter=1))
    r2 = run_stake_game(StakeGameSpec(d, setter=2))
    assert r2.gap == pytest.approx(r1.gap, abs=1e-15)


def test_broja_optimum_equalises_rewards():
    for setter in (1, 2):
        res = run_stake_game(StakeGameSpec(get_example("reducedor-broja"), setter=setter))
        assert abs(res.gap) <= 1e-12


def test_ties_go_to_lower_action():
    assert best_response(get_example("xor"), 1) == (0, 0)
    assert best_response(get_example("rdn"), 2) == (0, 1)


def test_constant_stake_gives_accuracy():
    spec = StakeGameSpec(get_example("and"), stake=lambda x: 1.0)
    assert run_stake_game(spec).rewards == {1: pytest.approx(0.75), 2: pytest.approx(0.75)}


def test_target_axis_first():
    d = get_example("reducedor")
    moved = JointDistribution(np.moveaxis(d.probs, 2, 0), target_index=0)
    assert run_stake_game(StakeGameSpec(moved)).rewards == run_stake_game(StakeGameSpec(d)).rewards


def test_validation():
    with pytest.raises(DistributionError):
        StakeGameSpec(get_example("sum"))
    with pytest.raises(DistributionError):
        StakeGameSpec(get_example("giantbit"))
    with pytest.raises(DistributionError):
        StakeGameSpec(get_example("and"), setter=3)
