"""PIDs of unit-variance trivariate Gaussian systems ``(X1, X2, S)``.

The minimum-MI measure is closed form. The common change in surprisal is
estimated by Monte Carlo: the evaluation distribution is the Gaussian itself
(it already maximises entropy given its second moments) and every pointwise
term comes from closed-form conditional Gaussian densities.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .dist import sign
from .lattice import PIDResult, build_lattice, moebius_inversion

log = logging.getLogger(__name__)

EIG_TOL = 1e-12


class GaussianError(ValueError):
    pass


def gaussian_mi(r: float) -> float:
    """Mutual information in bits between two unit Gaussians with correlation ``r``."""
    r = float(r)
    if not abs(r) < 1:
        raise GaussianError(f"|r| must be < 1 for finite information, got {r}")
    return -0.5 * np.log2(1.0 - r * r)


@dataclass(frozen=True)
class GaussianSystem:
    """Correlations ``a = Corr(X1,S)``, ``c = Corr(X2,S)``, ``b = Corr(X1,X2)``."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if not -1.0 <= v <= 1.0:
                raise GaussianError(f"correlation {name}={v} outside [-1, 1]")
        if np.linalg.eigvalsh(self.covariance).min() < -EIG_TOL:
            raise GaussianError(f"correlations (a={self.a}, b={self.b}, c={self.c}) are not positive semidefinite")

    @property
    def covariance(self) -> np.ndarray:
        """Covariance of ``(X1, X2, S)``."""
        a, b, c = self.a, self.b, self.c
        return np.array([[1.0, b, a], [b, 1.0, c], [a, c, 1.0]])

    @property
    def nondegenerate(self) -> bool:
        return bool(np.linalg.eigvalsh(self.covariance).min() > EIG_TOL)

    def joint_regression(self) -> tuple[np.ndarray, float]:
        """Coefficients of ``E[S | X1, X2]`` and the residual variance."""
        sxx = self.covariance[:2, :2]
        r = np.array([self.a, self.c])
        beta = np.linalg.solve(sxx, r)
        return beta, float(1.0 - r @ beta)

    def mi(self) -> tuple[float, float, float]:
        """``I(S;X1)``, ``I(S;X2)`` and ``I(S;X1,X2)`` in bits."""
        if not self.nondegenerate:
            raise GaussianError("joint information is infinite for a degenerate system")
        _, resid = self.joint_regression()
        return gaussian_mi(self.a), gaussian_mi(self.c), -0.5 * np.log2(resid)


@dataclass(frozen=True)
class MCOptions:
    sample_count: int = 1_000_000
    seed: int = 0
    report_stderr: bool = True

    def __post_init__(self):
        if self.sample_count <= 0:
            raise ValueError("sample_count must be positive")


def gaussian_immi_pid(sys: GaussianSystem) -> PIDResult:
    """Closed-form PID with redundancy ``min(I(S;X1), I(S;X2))``."""
    i1, i2, i12 = sys.mi()
    lat = build_lattice(2)
    icap = {lat.node("{1}{2}"): min(i1, i2), lat.node("{1}"): i1, lat.node("{2}"): i2, lat.node("{12}"): i12}
    return PIDResult(lat, "mmi", icap, moebius_inversion(lat, icap))


def _log2_normal_ratio(s, mean, var):
    """``log2 N(s; mean, var) - log2 N(s; 0, 1)``."""
    return (-0.5 * np.log(var) - 0.5 * (s - mean) ** 2 / var + 0.5 * s ** 2) / np.log(2.0)


def pointwise_terms(sys: GaussianSystem, samples: np.ndarray) -> dict[str, np.ndarray]:
    """Local informations, co-information and common change for ``(x1, x2, s)`` rows."""
    x1, x2, s = samples[:, 0], samples[:, 1], samples[:, 2]
    beta, resid = sys.joint_regression()
    i1 = _log2_normal_ratio(s, sys.a * x1, 1.0 - sys.a ** 2)
    i2 = _log2_normal_ratio(s, sys.c * x2, 1.0 - sys.c ** 2)
    i12 = _log2_normal_ratio(s, beta[0] * x1 + beta[1] * x2, resid)
    co = i1 + i2 - i12
    signs = np.stack([sign(i1), sign(i2), sign(i12), sign(co)])
    agree = (signs[0] != 0) & np.all(signs == signs[0], axis=0)
    return {"i1": i1, "i2": i2, "i12": i12, "coinfo": co, "common": np.where(agree, co, 0.0)}


def draw(sys: GaussianSystem, mc: MCOptions, stream: int = 0) -> np.ndarray:
    """``mc.sample_count`` rows of ``(x1, x2, s)`` from the stream ``(seed, stream)``."""
    rng = np.random.default_rng(np.random.SeedSequence([mc.seed, stream]))
    chol = np.linalg.cholesky(sys.covariance)
    return rng.standard_normal((mc.sample_count, 3)) @ chol.T


def gaussian_iccs_pid(sys: GaussianSystem, mc: MCOptions = MCOptions(), stream: int = 0) -> PIDResult:
    """Monte-Carlo common-change-in-surprisal PID with per-atom standard errors.

    Per sample, the redundancy is the filtered common change and the other
    atoms follow from the pointwise informations, so every atom (and the
    atom sum, which is the pointwise joint information) gets a standard
    error ``std / sqrt(N)``. Singleton and top-node redundancies are the MC
    means of the unfiltered pointwise informations on the same samples.
    """
    if not sys.nondegenerate:
        raise GaussianError("the iccs estimator needs a nondegenerate covariance")
    t = pointwise_terms(sys, draw(sys, mc, stream))
    per_sample = {
        "{1}{2}": t["common"],
        "{1}": t["i1"] - t["common"],
        "{2}": t["i2"] - t["common"],
        "{12}": t["i12"] - t["i1"] - t["i2"] + t["common"],
    }
    lat = build_lattice(2)
    n = mc.sample_count
    atoms = {lat.node(k): float(v.mean()) for k, v in per_sample.items()}
    icap = {lat.node("{1}{2}"): atoms[lat.node("{1}{2}")], lat.node("{1}"): float(t["i1"].mean()),
            lat.node("{2}"): float(t["i2"].mean()), lat.node("{12}"): float(t["i12"].mean())}
    stderr = None
    if mc.report_stderr:
        stderr = {lat.node(k): float(v.std(ddof=1) / np.sqrt(n)) if n > 1 else float("nan")
                  for k, v in per_sample.items()}
        stderr["total"] = float(t["i12"].std(ddof=1) / np.sqrt(n)) if n > 1 else float("nan")
    return PIDResult(lat, "iccs_game", icap, moebius_inversion(lat, icap), stderr=stderr)


@dataclass
class SweepRow:
    b: float
    immi: dict[str, float]
    iccs: dict[str, float]
    iccs_se: dict[str, float] = field(default_factory=dict)
    joint_mi: float = float("nan")


ATOM_LABELS = ("{1}{2}", "{1}", "{2}", "{12}")


def feasible_b_range(a: float, c: float) -> tuple[float, float]:
    """Closed interval of ``b`` giving a positive semidefinite correlation matrix."""
    half = np.sqrt(max((1 - a * a) * (1 - c * c), 0.0))
    return a * c - half, a * c + half


def gaussian_sweep(a: float, c: float, b_grid: Iterable[float], mc: MCOptions = MCOptions()) -> list[SweepRow]:
    """Both PIDs at every feasible ``b``; infeasible or degenerate points are skipped.

    Grid point ``k`` uses random stream ``(mc.seed, k)``, so a point's estimate
    does not depend on which other points are in the sweep.
    """
    rows = []
    for k, b in enumerate(b_grid):
        try:
            sys = GaussianSystem(a, float(b), c)
            if not sys.nondegenerate:
                raise GaussianError("degenerate covariance")
        except GaussianError as exc:
            log.warning("skipping b=%g: %s", b, exc)
            continue
        mm = gaussian_immi_pid(sys)
        cc = gaussian_iccs_pid(sys, mc, stream=k)
        se = {} if cc.stderr is None else {lbl: cc.stderr[cc.lattice.node(lbl)] for lbl in ATOM_LABELS}
        rows.append(SweepRow(float(b), {lbl: mm[lbl] for lbl in ATOM_LABELS},
                             {lbl: cc[lbl] for lbl in ATOM_LABELS}, se, sys.mi()[2]))
    return rows
