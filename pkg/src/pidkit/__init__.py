"""Partial information decomposition of discrete and Gaussian systems."""
from .dist import (DistributionError, JointDistribution, coinformation, entropy, local_coinformation,
                   local_surprisal_delta, marginalize, mutual_information, specific_information)
from .gaussian import GaussianSystem, MCOptions, gaussian_iccs_pid, gaussian_immi_pid, gaussian_mi, gaussian_sweep
from .lattice import Antichain, PIDResult, RedundancyLattice, build_lattice, moebius_inversion
from .measures import MeasureChoice, broja_redundancy, iccs, imin, immi, pid
from .optim import ConstraintSet, SolverError, SolverOptions, SolverReport, broja_minimize_joint_mi, maxent_under_marginals
from .systems import get_example, example_names

__version__ = "0.1.0"

__all__ = [
    "Antichain", "ConstraintSet", "DistributionError", "GaussianSystem", "JointDistribution", "MCOptions",
    "MeasureChoice", "PIDResult", "RedundancyLattice", "SolverError", "SolverOptions", "SolverReport",
    "broja_minimize_joint_mi", "broja_redundancy", "build_lattice", "coinformation", "entropy",
    "example_names", "gaussian_iccs_pid", "gaussian_immi_pid", "gaussian_mi", "gaussian_sweep",
    "get_example", "iccs", "imin", "immi", "local_coinformation", "local_surprisal_delta", "marginalize",
    "maxent_under_marginals", "moebius_inversion", "mutual_information", "pid", "specific_information",
]
