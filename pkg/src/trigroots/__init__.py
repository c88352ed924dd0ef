"""Monte Carlo laboratory for the real roots of random trigonometric polynomials."""

__version__ = "0.1.0"

from .ensembles import EnsembleSpec, SeedSpec, sample_coeffs, sample_poly
from .rootcount import CertifiedCount, count_certified, count_fast, count_screened, refine_root
from .trigpoly import TrigPoly, derivative, eval_grid, evaluate, l2_norm_sq, sup_bounds

__all__ = [
    "CertifiedCount",
    "EnsembleSpec",
    "SeedSpec",
    "TrigPoly",
    "count_certified",
    "count_fast",
    "count_screened",
    "derivative",
    "eval_grid",
    "evaluate",
    "l2_norm_sq",
    "refine_root",
    "sample_coeffs",
    "sample_poly",
    "sup_bounds",
]
