"""Constrained optimisation over joint distributions.

Two engines share the same marginal-constraint machinery:

* :func:`maxent_under_marginals` -- maximum-entropy distribution matching a set
  of marginals of a reference, by iterative proportional fitting (IPF).
* :func:`broja_minimize_joint_mi` -- minimum of ``I(S; X1, X2)`` over all
  distributions sharing both predictor-target marginals with the reference,
  by a log-barrier Newton method on the affine feasible set.

Both solvers first find the largest support compatible with the constraints
(a few LPs), so zeros implied by the linear constraints are frozen up front
and IPF only ever sees a problem with a strictly positive solution.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from scipy import sparse
from scipy.linalg import null_space
from scipy.optimize import linprog

from .dist import DistributionError, JointDistribution

log = logging.getLogger(__name__)

LN2 = np.log(2.0)


class SolverError(RuntimeError):
    """Raised by callers that require convergence; carries the solver report."""

    def __init__(self, message: str, report: Optional["SolverReport"] = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class SolverOptions:
    tolerance: float = 1e-10
    max_iterations: int = 100_000
    verbose: bool = False

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not self.max_iterations > 0:
            raise ValueError("max_iterations must be positive")


@dataclass
class SolverReport:
    """Convergence record. ``residual`` is the max L1 marginal mismatch."""

    solver: str
    iterations: int
    residual: float
    objective: float
    converged: bool
    gap: Optional[float] = None
    history: list[float] = field(default_factory=list, repr=False)
    message: str = ""


@dataclass(frozen=True)
class ConstraintSet:
    """Axis sets whose marginals must agree with ``reference``."""

    reference: JointDistribution
    axis_sets: tuple[frozenset, ...]

    def __init__(self, reference: JointDistribution, axis_sets: Iterable[Iterable[int]]):
        sets = []
        for axes in axis_sets:
            axes = frozenset(int(a) for a in axes)
            if not axes:
                raise DistributionError("constraint axis sets must be nonempty")
            if any(not 0 <= a < reference.ndim for a in axes):
                raise DistributionError(f"constraint axes {sorted(axes)} out of range")
            if axes not in sets:
                sets.append(axes)
        if not sets:
            raise DistributionError("at least one constraint is required")
        # canonical order keeps the solve independent of how constraints were listed
        sets.sort(key=lambda a: (len(a), sorted(a)))
        object.__setattr__(self, "reference", reference)
        object.__setattr__(self, "axis_sets", tuple(sets))

    def targets(self) -> list[tuple[tuple[int, ...], np.ndarray]]:
        out = []
        for axes in self.axis_sets:
            drop = tuple(a for a in range(self.reference.ndim) if a not in axes)
            out.append((drop, self.reference.marginal_keepdims(axes)))
        return out

    def residual(self, q: np.ndarray) -> float:
        return _residual(q, self.targets())


def _residual(q: np.ndarray, targets) -> float:
    worst = 0.0
    for drop, target in targets:
        cur = q.sum(axis=drop, keepdims=True) if drop else q
        worst = max(worst, float(np.abs(cur - target).sum()))
    return worst


def _zero_marginal_mask(shape, targets) -> np.ndarray:
    mask = np.ones(shape, dtype=bool)
    for _, target in targets:
        mask &= np.broadcast_to(target > 0, shape)
    return mask


def _constraint_matrix(shape, targets, cells: np.ndarray):
    """Sparse marginalisation operator restricted to ``cells`` (flat indices)."""
    coords = np.unravel_index(cells, shape)
    rows, cols, rhs = [], [], []
    offset = 0
    for drop, target in targets:
        kept = [ax for ax in range(len(shape)) if ax not in drop]
        tshape = [shape[ax] for ax in kept]
        local = np.ravel_multi_index([coords[ax] for ax in kept], tshape) if kept else np.zeros(len(cells), int)
        used = np.unique(local)
        remap = {int(u): i for i, u in enumerate(used)}
        rows.extend(offset + remap[int(r)] for r in local)
        cols.extend(range(len(cells)))
        flat_target = target.reshape(-1)
        rhs.extend(flat_target[used])
        offset += len(used)
    a = sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(offset, len(cells)))
    return a, np.asarray(rhs)


_HIGHS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


def feasible_support(shape, targets, candidates: Optional[np.ndarray] = None,
                     threshold: float = 1e-9) -> np.ndarray:
    """Largest set of cells that can be positive in some feasible distribution.

    Repeatedly solves ``max sum_{unknown} q`` over the constraint polytope;
    each optimal vertex reveals at least one new positive cell until the
    optimum is zero. The union of the vertex supports is the support of the
    relative interior of the feasible face, which is where the maximum-entropy
    point lives.
    """
    if candidates is None:
        candidates = _zero_marginal_mask(shape, targets)
    cells = np.flatnonzero(candidates)
    if len(cells) == 0:
        raise DistributionError("constraints admit no distribution")
    a, b = _constraint_matrix(shape, targets, cells)
    known = np.zeros(len(cells), dtype=bool)
    while not known.all():
        res = linprog(-(~known).astype(float), A_eq=a, b_eq=b, bounds=(0, None),
                      method="highs", options=_HIGHS)
        if res.status != 0:
            log.warning("support LP failed (%s); using the zero-marginal mask", res.message)
            return candidates.copy()
        found = (res.x > threshold) & ~known
        if not found.any():
            break
        known |= res.x > threshold
    mask = np.zeros(int(np.prod(shape)), dtype=bool)
    mask[cells[known]] = True
    return mask.reshape(shape)


def _ipf(q: np.ndarray, targets, tol: float, max_iter: int) -> tuple[np.ndarray, int, float]:
    q = q.copy()
    resid = _residual(q, targets)
    it = 0
    while resid > tol and it < max_iter:
        it += 1
        for drop, target in targets:
            cur = q.sum(axis=drop, keepdims=True) if drop else q
            ratio = np.divide(target, cur, out=np.zeros_like(cur), where=cur > 0)
            q *= ratio
        resid = _residual(q, targets)
    return q, it, resid


def _dual_newton(q: np.ndarray, support: np.ndarray, targets, tol: float, max_iter: int
                 ) -> tuple[np.ndarray, int, float]:
    """Finish a maxent fit by Newton's method on the log-linear dual.

    IPF iterates stay in the family ``log q = A^T theta`` on the support, so
    ``theta`` is recovered by least squares and
    ``L(theta) = sum exp(A^T theta) - b . theta`` is minimised with damped
    Newton steps (quadratic convergence where IPF crawls).
    """
    shape = q.shape
    cells = np.flatnonzero(support)
    a, b = _constraint_matrix(shape, targets, cells)
    a = a.toarray()
    theta = np.linalg.lstsq(a.T, np.log(q.reshape(-1)[cells]), rcond=None)[0]
    resid = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        qc = np.exp(a.T @ theta)
        grad = a @ qc - b
        resid = float(np.abs(grad).max())
        if resid <= tol * 1e-2:
            break
        hess = (a * qc) @ a.T
        step = -np.linalg.lstsq(hess, grad, rcond=None)[0]
        base = qc.sum() - b @ theta
        slope = grad @ step
        lam = 1.0
        while lam > 1e-12:
            cand = theta + lam * step
            if np.exp(a.T @ cand).sum() - b @ cand <= base + 0.25 * lam * slope:
                break
            lam *= 0.5
        theta = cand
    out = np.zeros(int(np.prod(shape)))
    out[cells] = np.exp(a.T @ theta)
    out = out.reshape(shape)
    return out, it, _residual(out, targets)


def _entropy_bits(q: np.ndarray) -> float:
    nz = q[q > 0]
    return float(-(nz * np.log2(nz)).sum())


def _fit_on_support(support, targets, tol, max_iter, ipf_sweeps=200):
    """Maximum-entropy fit on a fixed support: IPF, then dual Newton if IPF stalls."""
    q, it, resid = _ipf(support / support.sum(), targets, tol, min(ipf_sweeps, max_iter))
    if resid > tol and max_iter > it:
        q_n, it_n, resid_n = _dual_newton(q, support, targets, tol, 200)
        if resid_n <= resid:
            q, resid = q_n, resid_n
            it += it_n
        if resid > tol and max_iter > it:
            q, it_i, resid = _ipf(q, targets, tol, max_iter - it)
            it += it_i
    return q, it, resid


def maxent_under_marginals(constraints: ConstraintSet, opts: SolverOptions = SolverOptions()
                           ) -> tuple[JointDistribution, SolverReport]:
    """Entropy-maximising distribution matching every constrained marginal.

    IPF from the uniform distribution on the feasible support, handing over
    to Newton's method on the log-linear dual when IPF stalls on tiny cells.
    Returns the distribution (labels and target axis copied from the
    reference) and a report; non-convergence is reported, not raised.
    """
    ref = constraints.reference
    targets = constraints.targets()
    shape = ref.cardinalities
    support = feasible_support(shape, targets)
    q, it, resid = _fit_on_support(support, targets, opts.tolerance, opts.max_iterations)
    q = q / q.sum()
    converged = resid <= opts.tolerance
    report = SolverReport("maxent-ipf", it, resid, _entropy_bits(q), converged)
    if not converged:
        log.warning("maxent IPF stopped after %d sweeps with residual %.3g", it, resid)
    elif opts.verbose:
        log.info("maxent IPF converged in %d sweeps (residual %.3g)", it, resid)
    return JointDistribution(q, target_index=ref.target_index, labels=ref.labels), report


def _joint_mi_parts(q: np.ndarray, x_axes: tuple[int, ...], s_axis: int) -> float:
    """``I(S; X)`` in bits."""
    qx = q.sum(axis=s_axis, keepdims=True)
    qs = q.sum(axis=x_axes, keepdims=True)
    pos = q > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(pos, q * (np.log(q) - np.log(qx) - np.log(qs)), 0.0)
    return float(terms.sum()) / LN2


class _ReducedProblem:
    """``-H(S|X)`` in nats on the affine feasible set ``q = q0 + N z`` over support cells."""

    def __init__(self, shape, cells, targets, x_axes, s_axis):
        self.shape = shape
        self.cells = cells
        a, _ = _constraint_matrix(shape, targets, cells)
        self.null = null_space(a.toarray())
        coords = np.unravel_index(cells, shape)
        xshape = [shape[ax] for ax in x_axes]
        xidx = np.ravel_multi_index([coords[ax] for ax in x_axes], xshape)
        _, self.xcol = np.unique(xidx, return_inverse=True)
        self.ncol = int(self.xcol.max()) + 1

    def qx(self, q):
        return np.bincount(self.xcol, weights=q, minlength=self.ncol)

    def value(self, q):
        qx = self.qx(q)
        pos = q > 0
        f = np.sum(q[pos] * np.log(q[pos]))
        posx = qx > 0
        return f - np.sum(qx[posx] * np.log(qx[posx]))

    def grad_hess(self, q, mask=None):
        """Gradient and Hessian, optionally restricted to the cells in ``mask``."""
        qx = self.qx(q)
        col = self.xcol if mask is None else self.xcol[mask]
        qm = q if mask is None else q[mask]
        g = np.log(qm) - np.log(qx[col])
        h = np.diag(1.0 / qm)
        h -= np.where(col[:, None] == col[None, :], 1.0 / qx[col][:, None], 0.0)
        return g, h


def _newton_direction(nmat, grad, hess):
    hz = nmat.T @ hess @ nmat
    gz = nmat.T @ grad
    dz = -np.linalg.lstsq(hz, gz, rcond=None)[0]
    return nmat @ dz, float(-gz @ dz)


def _max_step(q, dq, frac=0.99):
    neg = dq < 0
    if not neg.any():
        return 1.0
    return min(1.0, frac * float(np.min(-q[neg] / dq[neg])))


def _barrier_solve(prob: _ReducedProblem, q, gap_tol, max_iter):
    """Log-barrier path following. Returns (q, newton steps, duality-gap bound)."""
    m = len(q)
    t = 1.0
    steps = 0
    while True:
        for _ in range(100):
            if steps >= max_iter:
                return q, steps, m / t, False
            g, h = prob.grad_hess(q)
            grad = t * g - 1.0 / q
            hess = t * h + np.diag(1.0 / q ** 2)
            dq, dec = _newton_direction(prob.null, grad, hess)
            if dec / 2 <= 1e-9:
                break
            step = _max_step(q, dq)
            phi = t * prob.value(q) - np.sum(np.log(q))
            while step > 1e-16:
                cand = q + step * dq
                if np.all(cand > 0):
                    phi_c = t * prob.value(cand) - np.sum(np.log(cand))
                    if phi_c <= phi - 0.25 * step * dec:
                        break
                step *= 0.5
            steps += 1
            if step <= 1e-16:
                break
            q = cand
        if m / t <= gap_tol:
            return q, steps, m / t, True
        t *= 50.0


def _face_polish(prob: _ReducedProblem, q, threshold=1e-7, max_iter=100):
    """Set vanishing cells to zero and run plain Newton on the remaining face.

    Returns ``None`` when no cell vanishes or the face holds no feasible point.
    """
    face = q > threshold * q.max()
    off = ~face
    if face.all():
        return None
    z = np.linalg.lstsq(prob.null[off], -q[off], rcond=None)[0]
    sub = q + prob.null @ z
    if np.abs(sub[off]).max() > 1e-12 or np.any(sub[face] <= 0):
        return None
    sub[off] = 0.0
    nmat = (prob.null @ null_space(prob.null[off]))[face]
    if nmat.shape[1] == 0:
        return sub
    for _ in range(max_iter):
        g, h = prob.grad_hess(sub, face)
        dq, dec = _newton_direction(nmat, g, h)
        if dec <= 1e-28:
            break
        step = _max_step(sub[face], dq, frac=0.999)
        base = prob.value(sub)
        cand = sub.copy()
        while step > 1e-16:
            cand[face] = sub[face] + step * dq
            if prob.value(cand) <= base:
                break
            step *= 0.5
        sub = cand
    return sub


def broja_minimize_joint_mi(reference: JointDistribution, opts: SolverOptions = SolverOptions(),
                            gap_tol: float = 1e-11) -> tuple[JointDistribution, SolverReport]:
    """Minimise ``I_Q(S; X1, X2)`` over ``Q`` with ``Q(Xi,S) = P(Xi,S)``.

    The feasible set is an affine slice of the simplex. Starting from the
    maximum-entropy feasible point, a log-barrier Newton method in null-space
    coordinates tracks the central path until the duality-gap bound ``m/t``
    drops below ``gap_tol`` (``m`` support cells). Cells that vanish along the
    path are then set exactly to zero and the objective re-minimised on that
    face; the polished point is kept only if it is feasible and no worse.
    Accepted steps never increase the barrier objective.
    """
    if reference.n_predictors != 2:
        raise DistributionError("the broja optimisation is defined for exactly two predictors")
    s = reference.require_target()
    x_axes = tuple(reference.predictor_axes)
    cset = ConstraintSet(reference, [{x_axes[0], s}, {x_axes[1], s}])
    targets = cset.targets()
    shape = reference.cardinalities
    support = feasible_support(shape, targets)
    start, _, _ = _fit_on_support(support, targets, opts.tolerance * 1e-2, opts.max_iterations)
    cells = np.flatnonzero(support)
    prob = _ReducedProblem(shape, cells, targets, x_axes, s)
    q = start.reshape(-1)[cells]
    history = [prob.value(q) / LN2]
    converged = True
    steps = 0
    gap = 0.0
    if prob.null.shape[1] > 0:
        q, steps, gap, converged = _barrier_solve(prob, q, gap_tol, opts.max_iterations)
        history.append(prob.value(q) / LN2)
        polished = _face_polish(prob, q)
        if polished is not None:
            full = np.zeros(int(np.prod(shape)))
            full[cells] = polished
            if (_residual(full.reshape(shape), targets) <= opts.tolerance
                    and prob.value(polished) <= prob.value(q) + 1e-14):
                q = polished
                history.append(prob.value(q) / LN2)
    full = np.zeros(int(np.prod(shape)))
    full[cells] = np.clip(q, 0.0, None)
    full = full.reshape(shape) / full.sum()
    resid = _residual(full, targets)
    f = _joint_mi_parts(full, x_axes, s)
    converged = converged and resid <= opts.tolerance
    report = SolverReport("broja-barrier-newton", steps, resid, f, converged, gap / LN2, history)
    if not converged:
        log.warning("broja solver stopped after %d Newton steps (gap %.3g, residual %.3g)", steps, gap, resid)
    elif opts.verbose:
        log.info("broja solver: %d Newton steps, gap %.3g bits", steps, gap / LN2)
    return JointDistribution(full, target_index=reference.target_index, labels=reference.labels), report
