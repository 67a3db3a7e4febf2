"""Redundancy measures and the lattice-wide PID pipeline."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .dist import (DistributionError, JointDistribution, LocalTermTable,
                   local_coinformation_table, local_surprisal_delta_table, make_source,
                   marginalize, mutual_information, sign, specific_information)
from .lattice import Antichain, PIDResult, build_lattice, moebius_inversion
from .optim import (ConstraintSet, SolverError, SolverOptions, SolverReport,
                    broja_minimize_joint_mi, maxent_under_marginals)

log = logging.getLogger(__name__)

NodeLike = Union[Antichain, str, Iterable[Iterable[int]]]


class MeasureChoice(str, enum.Enum):
    ICCS_GAME = "iccs_game"
    ICCS_DECISION = "iccs_decision"
    IMIN = "imin"
    BROJA = "broja"
    MMI = "mmi"

    @classmethod
    def parse(cls, measure: str, variant: str = "game") -> "MeasureChoice":
        """Map CLI-style ``(measure, variant)`` pairs, e.g. ``("iccs", "decision")``."""
        measure = measure.lower()
        if measure == "iccs":
            if variant not in ("game", "decision"):
                raise ValueError(f"unknown iccs variant {variant!r}")
            return cls(f"iccs_{variant}")
        return cls(measure)

    @property
    def label(self) -> str:
        return {"iccs_game": "Iccs", "iccs_decision": "Iccs(ind)", "imin": "Imin",
                "broja": "Ibroja", "mmi": "Immi"}[self.value]


def _as_antichain(node: NodeLike) -> Antichain:
    if isinstance(node, Antichain):
        return node
    if isinstance(node, str):
        return Antichain.parse(node)
    return Antichain(node)


def _restrict(reference: JointDistribution, node: Antichain):
    """Marginalise to the node's predictors plus the target; renumber sources."""
    members = sorted(node.members())
    axes = reference.source_axes(members)
    s = reference.require_target()
    sub = marginalize(reference, list(axes) + [s])
    # marginalize keeps axis order, so member k (sorted) becomes predictor k+1
    order = {m: k + 1 for k, m in enumerate(members)}
    sources = tuple(frozenset(order[i] for i in src) for src in node.sources)
    return sub, sources


def evaluation_distribution(reference: JointDistribution, sources: Sequence[frozenset],
                            variant: str = "game", opts: SolverOptions = SolverOptions()
                            ) -> tuple[JointDistribution, SolverReport]:
    """Maximum-entropy distribution used to evaluate the common change in surprisal.

    Every source-target marginal is preserved. The ``"game"`` variant also
    preserves the joint marginal of all predictors in the sources; the
    ``"decision"`` variant keeps only the source-target pairs.
    """
    s = reference.require_target()
    sets = [set(reference.source_axes(src)) | {s} for src in sources]
    if variant == "game":
        sets.append(set(reference.source_axes(frozenset().union(*sources))))
    elif variant != "decision":
        raise ValueError(f"unknown variant {variant!r}")
    return maxent_under_marginals(ConstraintSet(reference, sets), opts)


def local_terms(q: JointDistribution, sources: Sequence[frozenset]) -> LocalTermTable:
    """Pointwise change-in-surprisal terms of ``q`` for the given sources.

    ``common`` holds the local co-information on rows where every source
    change, the joint change and the co-information share a strict sign,
    and 0 elsewhere.
    """
    s = q.require_target()
    sources = tuple(make_source(src) for src in sources)
    src_axes = [set(q.source_axes(src)) for src in sources]
    joint_axes = set().union(*src_axes)
    support = q.probs > 0
    idx = np.nonzero(support)
    deltas = np.stack([local_surprisal_delta_table(q, ax)[idx] for ax in src_axes], axis=1)
    joint = local_surprisal_delta_table(q, joint_axes)[idx]
    coinfo = local_coinformation_table(q, src_axes + [{s}])[idx]
    signs = np.column_stack([sign(deltas), sign(joint), sign(coinfo)])
    agree = (signs[:, 0] != 0) & np.all(signs == signs[:, :1], axis=1)
    common = np.where(agree, coinfo, 0.0)
    outcomes = [tuple(int(v) for v in row) for row in np.argwhere(support)]
    return LocalTermTable(q.labels, sources, outcomes, q.probs[idx], deltas, joint, coinfo, common)


def iccs(reference: JointDistribution, node: NodeLike, variant: str = "game",
         opts: SolverOptions = SolverOptions()) -> tuple[float, LocalTermTable]:
    """Redundancy as the expected common change in surprisal.

    Parameters
    ----------
    reference : JointDistribution
    node : Antichain, str or iterable of sources
        Sources are 1-based predictor indices of ``reference``.
    variant : {"game", "decision"}
        Constraint set of the maximum-entropy evaluation distribution.

    Returns
    -------
    value : float
        Redundancy in bits (may be negative).
    table : LocalTermTable
        Pointwise terms on the evaluation distribution. Its ``report``
        attribute holds the maxent solver report. Sources in the table are
        renumbered over the predictors the node touches.
    """
    node = _as_antichain(node)
    sub, sources = _restrict(reference, node)
    q, report = evaluation_distribution(sub, sources, variant, opts)
    table = local_terms(q, sources)
    table.report = report
    return table.value, table


def imin(reference: JointDistribution, node: NodeLike) -> float:
    """Expected minimum specific information over the node's sources."""
    node = _as_antichain(node)
    s = reference.require_target()
    ps = reference.marginal_keepdims({s}).reshape(-1)
    total = 0.0
    for sv, p in enumerate(ps):
        if p > 0:
            total += p * min(specific_information(reference, src, sv) for src in node.sources)
    return float(total)


def immi(reference: JointDistribution, node: NodeLike) -> float:
    """Smallest mutual information between the target and a single source."""
    node = _as_antichain(node)
    s = reference.require_target()
    return min(mutual_information(reference, reference.source_axes(src), {s}) for src in node.sources)


def broja_redundancy(reference: JointDistribution, opts: SolverOptions = SolverOptions()
                     ) -> tuple[float, JointDistribution, SolverReport]:
    """Maximised co-information ``I(S;X1) + I(S;X2) - min_Q I_Q(S;X1,X2)``.

    Returns the redundancy, the optimising distribution and the solver report.
    """
    q, report = broja_minimize_joint_mi(reference, opts)
    s = reference.require_target()
    x1, x2 = reference.predictor_axes
    red = (mutual_information(reference, {x1}, {s}) + mutual_information(reference, {x2}, {s})
           - report.objective)
    return float(red), q, report


def _self_redundancy(reference: JointDistribution, node: Antichain) -> float:
    (src,) = node.sources
    return mutual_information(reference, reference.source_axes(src), {reference.require_target()})


def pid(reference: JointDistribution, measure: Union[MeasureChoice, str] = MeasureChoice.ICCS_GAME,
        opts: SolverOptions = SolverOptions(), strict: bool = True) -> PIDResult:
    """Full partial information decomposition of ``reference``.

    Singleton nodes take the plain mutual information; other nodes use the
    chosen redundancy measure. With ``strict`` a non-converged solver raises
    :class:`SolverError` (the partial result is attached as ``error.result``).
    """
    measure = MeasureChoice(measure)
    n = reference.n_predictors
    reference.require_target()
    if measure is MeasureChoice.BROJA and n != 2:
        raise DistributionError("the broja measure needs exactly two predictors")
    if not 1 <= n <= 3 and measure in (MeasureChoice.ICCS_GAME, MeasureChoice.ICCS_DECISION):
        raise DistributionError(f"iccs PIDs support 1..3 predictors, got {n}")
    lattice = build_lattice(n)
    icap: dict[Antichain, float] = {}
    reports: dict[Antichain, object] = {}
    tables: dict[Antichain, LocalTermTable] = {}
    for node in lattice.nodes:
        if len(node.sources) == 1:
            icap[node] = _self_redundancy(reference, node)
        elif measure in (MeasureChoice.ICCS_GAME, MeasureChoice.ICCS_DECISION):
            variant = "game" if measure is MeasureChoice.ICCS_GAME else "decision"
            icap[node], tables[node] = iccs(reference, node, variant, opts)
            reports[node] = tables[node].report
            violations = continuity_check(tables[node])
            if violations:
                log.warning("node %s: %d local continuity violations", node.label, len(violations))
        elif measure is MeasureChoice.IMIN:
            icap[node] = imin(reference, node)
        elif measure is MeasureChoice.MMI:
            icap[node] = immi(reference, node)
        else:
            icap[node], _, reports[node] = broja_redundancy(reference, opts)
    atoms = moebius_inversion(lattice, icap)
    result = PIDResult(lattice, measure.value, icap, atoms, reports, tables)
    failed = [a.label for a, r in reports.items() if isinstance(r, SolverReport) and not r.converged]
    if failed and strict:
        err = SolverError(f"solver did not converge for node(s) {', '.join(failed)}", reports[lattice.node(failed[0])])
        err.result = result
        raise err
    return result


def target_specific_coinfo(reference: JointDistribution, sources: Sequence[Iterable[int]] = ({1}, {2})) -> float:
    """``sum_s p(s) max[I(S=s;A1) + I(S=s;A2) - I(S=s;A1,A2), 0]``."""
    a1, a2 = _two_sources(reference, sources)
    s = reference.require_target()
    ps = reference.marginal_keepdims({s}).reshape(-1)
    total = 0.0
    for sv, p in enumerate(ps):
        if p > 0:
            co = (specific_information(reference, a1, sv) + specific_information(reference, a2, sv)
                  - specific_information(reference, a1 | a2, sv))
            total += p * max(co, 0.0)
    return float(total)


def _source_specific_table(d: JointDistribution, axes: set) -> np.ndarray:
    """``I(S; A=a)`` (KL of p(s|a) from p(s)) broadcast over the table."""
    s = d.require_target()
    pas = d.marginal_keepdims(axes | {s})
    pa = d.marginal_keepdims(axes)
    ps = d.marginal_keepdims({s})
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(pas > 0, (pas / pa) * (np.log2(pas) - np.log2(pa) - np.log2(ps)), 0.0)
    return np.broadcast_to(terms.sum(axis=s, keepdims=True), d.probs.shape)


def source_specific_coinfo(reference: JointDistribution, sources: Sequence[Iterable[int]] = ({1}, {2})) -> float:
    """``sum_{a1,a2} p(a1,a2) max[I(S;A1=a1) + I(S;A2=a2) - I(S;A1=a1,A2=a2), 0]``."""
    a1, a2 = _two_sources(reference, sources)
    ax1, ax2 = set(reference.source_axes(a1)), set(reference.source_axes(a2))
    co = (_source_specific_table(reference, ax1) + _source_specific_table(reference, ax2)
          - _source_specific_table(reference, ax1 | ax2))
    # co is constant along the target axis; weight each predictor cell once
    pa = reference.marginal_keepdims(ax1 | ax2)
    co_a = np.take(co, [0], axis=reference.require_target())
    return float(np.sum(np.where(pa > 0, pa * np.maximum(co_a, 0.0), 0.0)))


def _two_sources(reference: JointDistribution, sources) -> tuple[frozenset, frozenset]:
    if reference.n_predictors != 2:
        raise DistributionError("specific co-information is defined here for two predictors")
    srcs = [make_source(s) for s in sources]
    if len(srcs) != 2:
        raise DistributionError("exactly two sources are required")
    return srcs[0], srcs[1]


@dataclass(frozen=True)
class ContinuityViolation:
    outcome: tuple
    coinfo: float
    smallest_source_delta: float


def continuity_check(table: LocalTermTable, tol: float = 1e-12) -> list[ContinuityViolation]:
    """Rows where the sign-consistent overlap exceeds the smallest local information.

    On rows where every source change, the joint change and the local
    co-information share a sign, the magnitude of the co-information should
    not exceed the smallest source change. Equality (full overlap, as in a
    copied bit) is allowed.
    """
    out = []
    for i, outcome in enumerate(table.outcomes):
        if table.common[i] == 0.0:
            continue
        smallest = float(np.min(np.abs(table.source_deltas[i])))
        if abs(table.coinfo[i]) > smallest + tol:
            out.append(ContinuityViolation(outcome, float(table.coinfo[i]), smallest))
    return out
