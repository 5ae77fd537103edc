"""Gaussian-comparison bounds for spectral statistics of random matrices.

Submodules
----------
core          matrix containers, extreme eigenvalues, dilation
gaussian      Gaussian series models and their statistics
ensembles     independent-sum random matrix models with Gaussian proxies
bounds        closed-form comparison bounds
tracemgf      trace-exponential diagnostics
montecarlo    reproducible Monte-Carlo estimation and verdicts
applications  parameter calculators and end-to-end experiments
"""

from . import applications, bounds, core, ensembles, gaussian, montecarlo, tracemgf
from .bounds import BoundInputs, BoundReport
from .core import RectMatrix, SymMatrix
from .ensembles import SummandEnsemble
from .gaussian import GaussianModel, GaussianStats
from .montecarlo import MCConfig, MCResult
from .rng import RngStream

__version__ = "0.1.0"

__all__ = [
    "applications",
    "bounds",
    "core",
    "ensembles",
    "gaussian",
    "montecarlo",
    "tracemgf",
    "BoundInputs",
    "BoundReport",
    "GaussianModel",
    "GaussianStats",
    "MCConfig",
    "MCResult",
    "RectMatrix",
    "RngStream",
    "SummandEnsemble",
    "SymMatrix",
]
