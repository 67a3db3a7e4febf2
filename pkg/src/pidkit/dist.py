"""Exact discrete joint distributions and pointwise/expected information measures.

All quantities are in bits. Pointwise quantities are only ever evaluated on
cells with positive probability; expectations use the 0 log 0 = 0 convention.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

SUM_TOL = 1e-9
SIGN_DEADZONE = 1e-12


class DistributionError(ValueError):
    """Raised for invalid distributions or invalid queries against them."""


def make_source(members: Iterable[int]) -> frozenset[int]:
    """Return a source (nonempty set of 1-based predictor indices)."""
    src = frozenset(int(m) for m in members)
    if not src:
        raise DistributionError("a source must contain at least one predictor")
    if min(src) < 1:
        raise DistributionError(f"predictor indices are 1-based, got {sorted(src)}")
    return src


def source_label(source: Iterable[int]) -> str:
    return "{" + "".join(str(i) for i in sorted(source)) + "}"


def sign(x, deadzone: float = SIGN_DEADZONE):
    """Sign with a dead zone: values with ``|x| < deadzone`` map to 0."""
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) < deadzone, 0, np.sign(x)).astype(int)


class JointDistribution:
    """Dense probability table over finite variables with one designated target.

    Parameters
    ----------
    probs : array_like
        Non-negative table indexed by the joint outcome tuple. Entries must sum
        to 1 within ``1e-9``.
    target_index : int or None
        Axis of the target variable ``S``. ``None`` means the table carries no
        target (e.g. a predictor-only marginal). Defaults to the last axis.
    labels : sequence of str, optional
        Display names for the axes. Defaults to ``x1 .. xn`` for predictors
        and ``s`` for the target.
    """

    __slots__ = ("_p", "_target", "_labels", "_cache")

    def __init__(self, probs, target_index: Optional[int] = -1, labels: Optional[Sequence[str]] = None):
        p = np.array(probs, dtype=np.float64)
        if p.ndim == 0:
            raise DistributionError("a distribution needs at least one axis")
        if any(k < 1 for k in p.shape):
            raise DistributionError(f"every cardinality must be >= 1, got {p.shape}")
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise DistributionError("probabilities must be finite and non-negative")
        total = p.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise DistributionError(f"probabilities sum to {float(total)!r}, not 1")
        p.setflags(write=False)
        if target_index is not None:
            target_index = int(target_index) % p.ndim
        self._p = p
        self._target = target_index
        if labels is None:
            labels = []
            k = 0
            for ax in range(p.ndim):
                if ax == target_index:
                    labels.append("s")
                else:
                    k += 1
                    labels.append(f"x{k}")
        if len(labels) != p.ndim:
            raise DistributionError("one label per axis is required")
        self._labels = tuple(labels)
        self._cache: dict[frozenset, np.ndarray] = {}

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_outcomes(cls, outcomes, cards: Optional[Sequence[int]] = None,
                      target_index: Optional[int] = -1, labels=None) -> "JointDistribution":
        """Build from a mapping (or iterable of pairs) ``outcome tuple -> p``.

        Omitted outcomes have probability zero. Cardinalities default to one
        more than the largest value seen on each axis.
        """
        items = list(outcomes.items() if hasattr(outcomes, "items") else outcomes)
        if not items:
            raise DistributionError("no outcomes given")
        width = len(items[0][0])
        if cards is None:
            cards = [max(o[ax] for o, _ in items) + 1 for ax in range(width)]
        table = np.zeros(tuple(cards))
        for outcome, prob in items:
            if len(outcome) != width:
                raise DistributionError(f"outcome {outcome} has the wrong length")
            table[tuple(outcome)] += prob
        return cls(table, target_index=target_index, labels=labels)

    @classmethod
    def uniform(cls, outcomes, cards=None, target_index=-1, labels=None) -> "JointDistribution":
        """Equiprobable distribution over the listed outcome tuples."""
        outcomes = list(outcomes)
        w = 1.0 / len(outcomes)
        return cls.from_outcomes([(o, w) for o in outcomes], cards, target_index, labels)

    # -- basic properties -----------------------------------------------------

    @property
    def probs(self) -> np.ndarray:
        return self._p

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return self._p.shape

    @property
    def ndim(self) -> int:
        return self._p.ndim

    @property
    def target_index(self) -> Optional[int]:
        return self._target

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def predictor_axes(self) -> tuple[int, ...]:
        return tuple(ax for ax in range(self.ndim) if ax != self._target)

    @property
    def n_predictors(self) -> int:
        return len(self.predictor_axes)

    def require_target(self) -> int:
        if self._target is None:
            raise DistributionError("distribution has no target axis")
        return self._target

    def source_axes(self, source: Iterable[int]) -> tuple[int, ...]:
        """Map 1-based predictor indices to table axes."""
        pred = self.predictor_axes
        out = []
        for i in sorted(source):
            if not 1 <= i <= len(pred):
                raise DistributionError(f"predictor index {i} outside 1..{len(pred)}")
            out.append(pred[i - 1])
        return tuple(out)

    def support(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in idx) for idx in np.argwhere(self._p > 0)]

    def __repr__(self) -> str:
        return f"JointDistribution(cards={self.cardinalities}, target={self._target}, support={len(self.support())})"

    # -- marginals ------------------------------------------------------------

    def _axes(self, axes: Iterable[int]) -> frozenset:
        axes = [int(a) for a in axes]
        if any(not -self.ndim <= a < self.ndim for a in axes):
            raise DistributionError(f"axes {sorted(axes)} out of range for {self.ndim} axes")
        return frozenset(a % self.ndim for a in axes)

    def marginal_keepdims(self, axes: Iterable[int]) -> np.ndarray:
        """Marginal over ``axes`` with dropped axes kept at size 1 (cached)."""
        key = self._axes(axes)
        hit = self._cache.get(key)
        if hit is None:
            drop = tuple(a for a in range(self.ndim) if a not in key)
            hit = self._p.sum(axis=drop, keepdims=True) if drop else self._p
            if drop:
                hit.setflags(write=False)
            self._cache[key] = hit
        return hit

    def surprisal(self, axes: Iterable[int]) -> np.ndarray:
        """Pointwise ``-log2 p(a)`` broadcast to the full table (inf off support)."""
        m = self.marginal_keepdims(axes)
        with np.errstate(divide="ignore"):
            return np.broadcast_to(-np.log2(m), self._p.shape)

    def prob_of(self, outcome: Sequence[int], axes: Iterable[int]) -> float:
        axes = sorted(self._axes(axes))
        m = self.marginal_keepdims(axes)
        idx = tuple(outcome[a] if a in axes else 0 for a in range(self.ndim))
        return float(m[idx])


def marginalize(d: JointDistribution, keep: Iterable[int]) -> JointDistribution:
    """Sum out every axis not in ``keep``; kept axes stay in their original order."""
    keep = sorted(set(int(a) % d.ndim for a in keep))
    if not keep:
        raise DistributionError("marginalize needs a nonempty set of axes to keep")
    drop = tuple(a for a in range(d.ndim) if a not in keep)
    table = d.probs.sum(axis=drop) if drop else d.probs
    target = keep.index(d.target_index) if d.target_index in keep else None
    return JointDistribution(table, target_index=target, labels=[d.labels[a] for a in keep])


def _entropy_of_table(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def entropy(d: JointDistribution, axes: Optional[Iterable[int]] = None) -> float:
    """Shannon entropy in bits of the whole table, or of the marginal on ``axes``."""
    if axes is None:
        return _entropy_of_table(d.probs)
    return _entropy_of_table(d.marginal_keepdims(axes))


def mutual_information(d: JointDistribution, a: Iterable[int], b: Iterable[int]) -> float:
    """``I(A;B) = H(A) + H(B) - H(A,B)`` for disjoint axis sets."""
    a, b = set(a), set(b)
    if not a or not b:
        raise DistributionError("mutual information needs two nonempty axis sets")
    if a & b:
        raise DistributionError(f"axis sets overlap: {sorted(a & b)}")
    return entropy(d, a) + entropy(d, b) - entropy(d, a | b)


def conditional_mutual_information(d: JointDistribution, a, b, given) -> float:
    a, b, given = set(a), set(b), set(given)
    return (entropy(d, a | given) + entropy(d, b | given)
            - entropy(d, a | b | given) - entropy(d, given))


def local_surprisal_delta_table(d: JointDistribution, axes: Iterable[int]) -> np.ndarray:
    """``Delta_s h(a) = log2 p(s|a) - log2 p(s)`` over the full table (nan off support)."""
    s = d.require_target()
    axes = set(axes)
    with np.errstate(invalid="ignore"):
        val = d.surprisal(axes) + d.surprisal({s}) - d.surprisal(axes | {s})
    return np.where(d.probs > 0, val, np.nan)


def local_surprisal_delta(d: JointDistribution, source: Iterable[int], outcome: Sequence[int]) -> float:
    """Change in surprisal of the target value when the source value is observed.

    ``source`` holds 1-based predictor indices; ``outcome`` is a full joint
    outcome tuple. Negative values are local misinformation.
    """
    s = d.require_target()
    axes = d.source_axes(source)
    p_a = d.prob_of(outcome, axes)
    p_s = d.prob_of(outcome, [s])
    if p_a <= 0 or p_s <= 0:
        raise DistributionError(f"zero marginal probability for outcome {tuple(outcome)}")
    p_as = d.prob_of(outcome, set(axes) | {s})
    if p_as <= 0:
        return float("-inf")
    return float(np.log2(p_as) - np.log2(p_a) - np.log2(p_s))


def _check_groups(groups) -> list[frozenset]:
    groups = [frozenset(g) for g in groups]
    if len(groups) < 2:
        raise DistributionError("co-information needs at least two groups")
    if any(not g for g in groups):
        raise DistributionError("groups must be nonempty")
    return groups


def local_coinformation_table(d: JointDistribution, groups) -> np.ndarray:
    """Local co-information as an alternating sum of pointwise entropies.

    ``c = sum_k (-1)^(k+1) sum_{|T|=k} h(union of T)`` over subsets ``T`` of
    the groups. Groups may overlap (their union is then taken variable-wise).
    Returns a full-shape array with nan off the support.
    """
    groups = _check_groups(groups)
    total = np.zeros(d.probs.shape)
    support = d.probs > 0
    for k in range(1, len(groups) + 1):
        sgn = 1.0 if k % 2 else -1.0
        for combo in combinations(groups, k):
            h = d.surprisal(frozenset().union(*combo))
            total = total + sgn * np.where(support, h, 0.0)
    return np.where(support, total, np.nan)


def local_coinformation(d: JointDistribution, groups, outcome: Sequence[int]) -> float:
    if d.probs[tuple(outcome)] <= 0:
        raise DistributionError(f"outcome {tuple(outcome)} has zero probability")
    return float(local_coinformation_table(d, groups)[tuple(outcome)])


def coinformation(d: JointDistribution, groups) -> float:
    """Co-information of disjoint axis groups (positive = net redundancy).

    Computed from marginal entropies; equals mutual information for two groups
    and the expectation of :func:`local_coinformation` in general.
    """
    groups = _check_groups(groups)
    for g1, g2 in combinations(groups, 2):
        if g1 & g2:
            raise DistributionError("co-information groups must be disjoint")
    if len(groups) == 2:
        return mutual_information(d, groups[0], groups[1])
    total = 0.0
    for k in range(1, len(groups) + 1):
        sgn = 1.0 if k % 2 else -1.0
        for combo in combinations(groups, k):
            total += sgn * entropy(d, frozenset().union(*combo))
    return total


def specific_information(d: JointDistribution, source: Iterable[int], s_value: int) -> float:
    """Average reduction in surprisal of target value ``s_value`` from a source.

    ``sum_a p(a|s) [log2 1/p(s) - log2 1/p(s|a)]``
    """
    s = d.require_target()
    axes = set(d.source_axes(source))
    p_s = d.marginal_keepdims({s})
    p_s_val = float(p_s.reshape(-1)[s_value])
    if p_s_val <= 0:
        raise DistributionError(f"target value {s_value} has zero probability")
    joint = d.marginal_keepdims(axes | {s})
    p_a = d.marginal_keepdims(axes)
    slicer = [slice(None)] * d.ndim
    slicer[s] = slice(s_value, s_value + 1)
    p_as = joint[tuple(slicer)]
    p_a = np.broadcast_to(p_a, joint.shape)[tuple(slicer)]
    mask = p_as > 0
    pa_given_s = p_as[mask] / p_s_val
    ps_given_a = p_as[mask] / p_a[mask]
    return float(np.sum(pa_given_s * (np.log2(ps_given_a) - np.log2(p_s_val))))


@dataclass(frozen=True)
class BoundsReport:
    """Three-variable interaction-information bounds diagnostic (all in bits)."""

    interaction_information: float
    lower_bound: float
    upper_bound: float
    holds: bool
    lower_margin: float = field(default=0.0)
    upper_margin: float = field(default=0.0)


def coinformation_bounds_check(d: JointDistribution, groups=None, tol: float = 1e-12) -> BoundsReport:
    """Check ``-min[I(S;X), I(S;Y), I(X;Y)] <= I(X;Y;S) <= min[conditional MIs]``.

    ``I(X;Y;S)`` here is interaction information (the negated co-information
    for three variables), so +1 bit for XOR and -1 bit for RDN.
    """
    if groups is None:
        if d.n_predictors != 2 or d.target_index is None:
            raise DistributionError("default grouping needs two predictors and a target")
        x, y = d.predictor_axes
        groups = ({x}, {y}, {d.target_index})
    x, y, s = (set(g) for g in groups)
    ii = -coinformation(d, [x, y, s])
    lower = -min(mutual_information(d, s, x), mutual_information(d, s, y), mutual_information(d, x, y))
    upper = min(conditional_mutual_information(d, s, x, y),
                conditional_mutual_information(d, s, y, x),
                conditional_mutual_information(d, x, y, s))
    holds = lower - tol <= ii <= upper + tol
    return BoundsReport(ii, lower, upper, holds, ii - lower, upper - ii)


@dataclass
class LocalTermTable:
    """Pointwise terms of a common-change-in-surprisal evaluation.

    One row per support cell of the evaluation distribution. Each row holds the
    change in surprisal for every source and for their union, the local
    co-information, and the sign-filtered common change.
    """

    labels: tuple[str, ...]
    sources: tuple[frozenset, ...]
    outcomes: list[tuple[int, ...]]
    prob: np.ndarray
    source_deltas: np.ndarray
    joint_delta: np.ndarray
    coinfo: np.ndarray
    common: np.ndarray
    report: object = None

    def __len__(self) -> int:
        return len(self.outcomes)

    @property
    def value(self) -> float:
        return float(np.dot(self.prob, self.common))

    def row(self, outcome: Sequence[int]) -> dict:
        i = self.outcomes.index(tuple(outcome))
        return {
            "outcome": self.outcomes[i],
            "p": float(self.prob[i]),
            "source_deltas": [float(v) for v in self.source_deltas[i]],
            "joint_delta": float(self.joint_delta[i]),
            "coinfo": float(self.coinfo[i]),
            "common": float(self.common[i]),
        }

    def rows(self) -> list[dict]:
        return [self.row(o) for o in self.outcomes]

    def columns(self) -> list[str]:
        cols = [f"dh({''.join(str(i) for i in sorted(src))})" for src in self.sources]
        return ["outcome", "p"] + cols + ["dh(joint)", "c", "dh_com"]
