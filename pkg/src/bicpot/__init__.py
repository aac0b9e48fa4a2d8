"""Generalized oscillating potentials with bound states in the continuum.

A numpy library that constructs radial potentials of the von Neumann-Wigner
family from the coupling profile a/r^beta, evaluates the associated bound
state chi = sin(kr)/k * exp(a * int_0^r sin^2(kz) z^{-beta} dz) at positive
energy E = k^2, and verifies the one-to-one correspondence between the
potential's decay law and the wave function's decay law by independent
quadrature, closed-form special functions, Numerov integration, and envelope
fitting.
"""

from .asymptotics import (
    DecayClassification,
    EnvelopeFit,
    MomentResult,
    classify,
    fit_envelope,
    norm_and_moments,
)
from .model import (
    GridSpec,
    ModelParams,
    SampledFunction,
    chi,
    chi0,
    chi_derivatives,
    log_derivative,
    modulating_function,
    modulation_integral,
    phi,
    potential,
    potential_from_logderivative,
    sample,
)
from .ode import ShootingResult, numerov_integrate, verify_eigenfunction
from .quadrature import QuadConfig, integrate_generic, integrate_modulation
from .specfun import (
    EULER_GAMMA,
    EvalConfig,
    cosine_integral,
    gamma_real,
    lower_incomplete_gamma,
    pochhammer,
)

__version__ = "0.1.0"

__all__ = [
    "DecayClassification",
    "EnvelopeFit",
    "MomentResult",
    "classify",
    "fit_envelope",
    "norm_and_moments",
    "GridSpec",
    "ModelParams",
    "SampledFunction",
    "chi",
    "chi0",
    "chi_derivatives",
    "log_derivative",
    "modulating_function",
    "modulation_integral",
    "phi",
    "potential",
    "potential_from_logderivative",
    "sample",
    "ShootingResult",
    "numerov_integrate",
    "verify_eigenfunction",
    "QuadConfig",
    "integrate_generic",
    "integrate_modulation",
    "EULER_GAMMA",
    "EvalConfig",
    "cosine_integral",
    "gamma_real",
    "lower_incomplete_gamma",
    "pochhammer",
    "__version__",
]
