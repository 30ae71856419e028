"""Symbolic/numeric Riemannian curvature toolkit.

Chart-level geometry from symbolic metrics, pointwise tensor algebra,
generalized curvature tensors (quasi-conformal, pseudo-projective, W2),
weak-Ricci-symmetry diagnostics, curvature classification, and a seeded
verification harness for the associated identity chains.
"""

__version__ = "0.1.0"

from .chart import CurvatureBundle, MetricField
from .errors import CurvError
from .expr import Expression, parse
from .gencurv import GenCurvParams
from .harness import TrialConfig
from .tensor import Metric, Tensor04

__all__ = [
    "__version__", "CurvatureBundle", "MetricField", "CurvError",
    "Expression", "parse", "GenCurvParams", "TrialConfig", "Metric",
    "Tensor04",
]
