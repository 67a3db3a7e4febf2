"""Two-agent stake game on a binary two-predictor system.

Each agent sees one predictor and guesses the target. One agent (the stake
setter) scales both agents' payoffs by ``c(x_setter)``. An agent's strategy is
the posterior-mode guess given its own observation, ties going to the lower
action; expected rewards are enumerated exactly under the joint distribution.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dist import DistributionError, JointDistribution


def default_stake(x: int) -> float:
    return 1.0 + x


@dataclass(frozen=True)
class StakeGameSpec:
    distribution: JointDistribution
    setter: int = 1
    stake: Callable[[int], float] = field(default=default_stake)

    def __post_init__(self):
        d = self.distribution
        if d.n_predictors != 2 or d.target_index is None:
            raise DistributionError("the stake game needs two predictors and a target")
        if any(k > 2 for k in d.cardinalities):
            raise DistributionError("the stake game is defined for binary variables")
        if self.setter not in (1, 2):
            raise DistributionError("the stake setter must be agent 1 or 2")


@dataclass
class StakeGameResult:
    setter: int
    strategies: dict[int, tuple[int, ...]]
    rewards: dict[int, float]

    @property
    def gap(self) -> float:
        """Setter's expected reward minus the other agent's."""
        other = 2 if self.setter == 1 else 1
        return self.rewards[self.setter] - self.rewards[other]


def best_response(d: JointDistribution, agent: int) -> tuple[int, ...]:
    """Posterior-mode action for each value of the agent's predictor (ties -> lower)."""
    s = d.require_target()
    ax = d.source_axes({agent})[0]
    joint = d.marginal_keepdims({ax, s})
    table = np.squeeze(joint, axis=tuple(a for a in range(d.ndim) if a not in (ax, s)))
    if ax > s:
        table = table.T
    # argmax returns the first maximiser, i.e. the lower action on ties
    return tuple(int(np.argmax(row)) for row in table)


def run_stake_game(spec: StakeGameSpec) -> StakeGameResult:
    d = spec.distribution
    s = d.require_target()
    axes = d.predictor_axes
    strategies = {i: best_response(d, i) for i in (1, 2)}
    rewards = {1: 0.0, 2: 0.0}
    for outcome in d.support():
        p = d.probs[outcome]
        weight = p * spec.stake(outcome[axes[spec.setter - 1]])
        for i in (1, 2):
            if strategies[i][outcome[axes[i - 1]]] == outcome[s]:
                rewards[i] += weight
    return StakeGameResult(spec.setter, strategies, rewards)
