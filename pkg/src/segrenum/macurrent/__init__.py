"""Numerical Monge-Ampere masses and Lelong numbers of regularized ``log|f|``."""

from .checks import (ExodusResult, InvarianceResult, NoChargeResult, bounded_no_charge_check,
                     exodus_demo, perturbation_invariance_check, polydisk_mass, tube_mass)
from .lelong import LelongEstimate, TracePoint, extrapolate, lelong_estimate, lelong_estimates
from .potential import HessianSample, Perturbation, Potential, hessian, ma_density, ma_density_batch
from .quadrature import (BallSampler, MassResult, QuadratureConfig, ball_mass, ball_masses,
                         ball_volume_complex, vanishing_strata)

__all__ = [
    "BallSampler", "ExodusResult", "HessianSample", "InvarianceResult", "LelongEstimate", "MassResult",
    "NoChargeResult", "Perturbation", "Potential", "QuadratureConfig", "TracePoint", "ball_mass",
    "ball_masses", "ball_volume_complex", "bounded_no_charge_check", "exodus_demo", "extrapolate",
    "hessian", "lelong_estimate", "lelong_estimates", "ma_density", "ma_density_batch",
    "perturbation_invariance_check", "polydisk_mass", "tube_mass", "vanishing_strata",
]
