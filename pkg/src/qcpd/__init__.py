"""Quaternion multilinear algebra and the quaternion canonical polyadic decomposition."""
from .errors import *  # noqa: F401,F403
from .quaternion import Quaternion, PolarForm, CayleyDickson  # noqa: F401
from .qmatrix import QMatrix, AdjointKind  # noqa: F401
from .qtensor import QTensor  # noqa: F401
from .models import CpdFactors, TuckerModel, ScalingTriple, cpd_reconstruct  # noqa: F401
from .solvers import SolverConfig, qals, cals  # noqa: F401

__version__ = "0.1.0"
