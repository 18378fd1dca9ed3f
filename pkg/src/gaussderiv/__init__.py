"""Recursive algorithms for multivariate Gaussian density derivatives.

Core contents:

* :mod:`gaussderiv.indexing` -- base-``d`` tuple/multi-index arithmetic;
* :mod:`gaussderiv.symmetrizer` -- exact sparse symmetrizer matrices;
* :mod:`gaussderiv.symvec` -- symmetrize ``d**r`` vectors matrix-free;
* :mod:`gaussderiv.hermite` -- vector Hermite polynomials and density
  derivatives (direct, full-recursive and unique-coordinate methods);
* :mod:`gaussderiv.moments` -- raw vector moments of a multivariate normal;
* :mod:`gaussderiv.quadform` -- moments/cumulants of quadratic forms;
* :mod:`gaussderiv.kde` -- Gaussian-kernel V-statistics and bandwidth
  selection criteria;
* :mod:`gaussderiv.bench` -- correctness-gated timing comparisons.

The FastAPI front end lives in :mod:`gaussderiv.service`; the ``gaussderiv``
console script is a thin client for it.
"""

__version__ = "0.1.0"

from .caps import CapExceededError
from .hermite import GaussianParams, ScaleMatrix, gaussian_derivative
from .indexing import linear_index, tuple_index, unique_count, unique_ordering
from .kde import cv_criterion, eta, pi_criterion, scv_criterion, select_bandwidth, vstat_q
from .moments import moment_vector, scalar_moment
from .quadform import kappa_joint, kappa_single, nu_joint, nu_single
from .symmetrizer import commutation, symmetrizer_direct, symmetrizer_recursive, t_matrix
from .symvec import symv_direct, symv_recursive

__all__ = [
    "__version__",
    "CapExceededError",
    "GaussianParams",
    "ScaleMatrix",
    "gaussian_derivative",
    "linear_index",
    "tuple_index",
    "unique_count",
    "unique_ordering",
    "cv_criterion",
    "eta",
    "pi_criterion",
    "scv_criterion",
    "select_bandwidth",
    "vstat_q",
    "moment_vector",
    "scalar_moment",
    "kappa_joint",
    "kappa_single",
    "nu_joint",
    "nu_single",
    "commutation",
    "symmetrizer_direct",
    "symmetrizer_recursive",
    "t_matrix",
    "symv_direct",
    "symv_recursive",
]
