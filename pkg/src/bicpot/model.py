"""Construction of oscillating potentials holding a bound state at E = k^2.

Everything is in reduced units 2m/hbar^2 = 1, so the radial equation reads
chi'' + (k^2 - V) chi = 0 and energies are squared wavenumbers.  The pipeline:

    phi(r) = a / r^beta                      (decay profile of the coupling)
    C(r)   = phi(r) sin^2(kr)                (log-derivative f'/f; the sin^2
                                              factor cancels the ctg poles)
    V(r)   = C^2 + C' + 2k ctg(kr) C
           = a^2 sin^4(kr)/r^{2 beta}
             - a beta sin^2(kr)/r^{1+beta}
             + 2 a k sin(2kr)/r^beta         (explicit, node-safe form)
    f(r)   = A exp( a * I(r) ),   I(r) = int_0^r sin^2(kz) z^{-beta} dz
    chi(r) = sin(kr)/k * f(r)

I(r) has two evaluation paths: adaptive quadrature (the oracle) and closed
forms -- elementary for beta = 0, cosine integral for beta = 1, and the
incomplete gamma of imaginary argument for 0 < beta < 1:

    I(r) = r^eps/(2 eps) - Re[ gamma(eps, 2ikr) / (2ik)^eps ] / 2,  eps = 1-beta

where conjugate symmetry makes the gamma bracket real, so a single
special-function call suffices.
"""

from dataclasses import dataclass

import numpy as np

from . import quadrature, specfun
from .specfun import EULER_GAMMA

__all__ = [
    "ModelParams",
    "GridSpec",
    "SampledFunction",
    "SingularPointError",
    "NodeProximityError",
    "UnsupportedPathError",
    "ModulationOverflowError",
    "NODE_GUARD_FACTOR",
    "chi0",
    "phi",
    "log_derivative",
    "log_derivative_prime",
    "potential",
    "potential_from_logderivative",
    "modulation_integral",
    "modulating_function",
    "chi",
    "chi_derivatives",
    "sample",
]

# Width of the refused window around sin(kr) nodes, as a fraction of pi/k.
# The ctg pole cancellation in the explicit potential is algebraic, so the
# guard only protects the factored C^2 + C' + 2k ctg C evaluation path.
NODE_GUARD_FACTOR = 1e-6

# exp argument beyond which modulating-function growth is reported instead of
# silently returning inf (float64 overflows at ~709.8).
_EXP_OVERFLOW = 700.0

_PATHS = ("closed_form", "quadrature")


class SingularPointError(ValueError):
    """Evaluation requested at a point where the quantity is singular."""


class NodeProximityError(ValueError):
    """Factored potential form refused within the node guard window."""


class UnsupportedPathError(ValueError):
    """The requested evaluation path does not cover these parameters."""


class ModulationOverflowError(OverflowError):
    """f = A exp(a I) grew past float range (a > 0 at large r)."""


@dataclass(frozen=True)
class ModelParams:
    """Potential/wave-function family parameters (reduced units).

    k : embedded-level wavenumber, E = k^2 > 0.
    a : coupling strength, units length^{beta-1}; sign free (a < 0 decays).
    beta : decay exponent of phi = a/r^beta; [0, 3) keeps I integrable at 0.
    A : normalization of f; pure scale, never enters the potential.
    """

    k: float
    a: float
    beta: float
    A: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.k) and self.k > 0.0):
            raise ValueError("k must be positive and finite")
        if not np.isfinite(self.a):
            raise ValueError("a must be finite")
        if not (np.isfinite(self.beta) and 0.0 <= self.beta < 3.0):
            raise ValueError("beta must lie in [0, 3)")
        if not (np.isfinite(self.A) and self.A > 0.0):
            raise ValueError("A must be positive and finite")


@dataclass(frozen=True)
class GridSpec:
    """Uniform radial grid [r_min, r_max] with n_points nodes."""

    r_min: float
    r_max: float
    n_points: int

    def __post_init__(self):
        if not (np.isfinite(self.r_min) and self.r_min >= 0.0):
            raise ValueError("r_min must be finite and nonnegative")
        if not (np.isfinite(self.r_max) and self.r_max > self.r_min):
            raise ValueError("r_max must exceed r_min")
        if self.n_points < 2:
            raise ValueError("need at least 2 grid points")

    @property
    def spacing(self):
        return (self.r_max - self.r_min) / (self.n_points - 1)

    def points(self):
        return np.linspace(self.r_min, self.r_max, self.n_points)

    def near_node_mask(self, k, delta=None):
        """Boolean mask of grid points within delta of a sin(kr) node."""
        if delta is None:
            delta = NODE_GUARD_FACTOR * np.pi / k
        r = self.points()
        return np.abs(r - np.round(r * k / np.pi) * np.pi / k) < delta


@dataclass
class SampledFunction:
    """Values of one labelled quantity on a grid."""

    grid: GridSpec
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_points,):
            raise ValueError("values length must equal grid n_points")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sampled values must be finite")


def _as_radius(r, allow_zero=True):
    ra = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(ra)):
        raise ValueError("radius must be finite")
    if np.any(ra < 0.0):
        raise ValueError("radius must be nonnegative")
    if not allow_zero and np.any(ra == 0.0):
        raise SingularPointError("quantity is singular at r = 0")
    return ra


def _scalar_like(r, out):
    return float(out) if np.ndim(r) == 0 else out


def chi0(k, r):
    """Free reference solution sin(kr)/k; satisfies chi0(0) = 0."""
    ra = _as_radius(r)
    return _scalar_like(r, np.sin(k * ra) / k)


def phi(p, r):
    """Coupling profile a / r^beta."""
    ra = _as_radius(r, allow_zero=(p.beta == 0.0))
    return _scalar_like(r, p.a * ra ** (-p.beta) if p.beta != 0.0 else p.a * np.ones_like(ra))


def log_derivative(p, r):
    """C(r) = phi(r) sin^2(kr) = f'/f; limit 0 at r = 0 for beta < 2."""
    ra = np.asarray(r, dtype=float)
    if np.any(ra == 0.0) and p.beta >= 2.0:
        raise SingularPointError("log-derivative limit at r = 0 exists only for beta < 2")
    ra = _as_radius(r)
    s = np.sin(p.k * ra)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(ra > 0.0, p.a * ra ** (-p.beta) * s * s, 0.0)
    return _scalar_like(r, out)


def log_derivative_prime(p, r):
    """C'(r) = phi' sin^2(kr) + k phi sin(2kr), with phi' = -a beta r^{-beta-1}."""
    ra = _as_radius(r, allow_zero=False)
    s = np.sin(p.k * ra)
    phip = -p.a * p.beta * ra ** (-p.beta - 1.0)
    return _scalar_like(
        r, phip * s * s + p.k * p.a * ra ** (-p.beta) * np.sin(2.0 * p.k * ra)
    )


def potential(p, r):
    """Explicit potential, valid at nodes (every term vanishes there).

    V = a^2 sin^4(kr)/r^{2b} - a b sin^2(kr)/r^{1+b} + 2 a k sin(2kr)/r^b.

    The r -> 0 limit is 0 for beta < 1 and 3 a k^2 at beta = 1 (the last two
    terms go like r^{1-beta}); for beta > 1 the origin is singular.
    """
    ra = np.asarray(r, dtype=float)
    if np.any(ra == 0.0) and p.beta > 1.0:
        raise SingularPointError("potential is singular at r = 0 for beta > 1")
    ra = _as_radius(r)
    a, b, k = p.a, p.beta, p.k
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.sin(k * ra)
        s2 = s * s
        v = (
            a * a * s2 * s2 * ra ** (-2.0 * b)
            - a * b * s2 * ra ** (-1.0 - b)
            + 2.0 * a * k * np.sin(2.0 * k * ra) * ra ** (-b)
        )
    limit = 3.0 * a * k * k if b == 1.0 else 0.0
    out = np.where(ra > 0.0, v, limit)
    return _scalar_like(r, out)


def potential_from_logderivative(C, Cprime, k, r):
    """Potential from the log-derivative: C^2 + C' + 2k ctg(kr) C.

    This is the general construction entry point (any C, not just the
    power-law family).  It evaluates ctg(kr) as a separate factor and is
    therefore refused within the node guard window; use potential() there.
    """
    ra = np.asarray(r, dtype=float)
    delta = NODE_GUARD_FACTOR * np.pi / k
    off = np.abs(ra - np.round(ra * k / np.pi) * np.pi / k)
    if np.any(off < delta):
        raise NodeProximityError(
            "ctg(kr) factorisation refused within "
            f"{delta:.3e} of a sin(kr) node; evaluate the explicit form instead"
        )
    C = np.asarray(C, dtype=float)
    Cprime = np.asarray(Cprime, dtype=float)
    out = C * C + Cprime + 2.0 * k * (np.cos(k * ra) / np.sin(k * ra)) * C
    return _scalar_like(r, out)


def _modulation_closed_form(p, ra, eval_cfg):
    k, b = p.k, p.beta
    if b == 0.0:
        return 0.5 * ra - np.sin(2.0 * k * ra) / (4.0 * k)
    if b == 1.0:
        out = np.zeros_like(ra)
        pos = ra > 0.0
        if np.any(pos):
            u = ra[pos]
            ci = specfun.cosine_integral(2.0 * k * u, eval_cfg)
            out[pos] = 0.5 * (np.log(k * u) - ci + EULER_GAMMA + np.log(2.0))
        return out
    eps = 1.0 - b
    x = 2.0j * k * ra
    g = specfun.lower_incomplete_gamma(eps, x, eval_cfg)
    scale = (2.0j * k) ** eps
    bracket = np.real(np.asarray(g) / scale)
    return ra ** eps / (2.0 * eps) - 0.5 * bracket


def modulation_integral(p, r, path="closed_form", quad_cfg=None, eval_cfg=None):
    """I(r) = int_0^r sin^2(kz) z^{-beta} dz by either evaluation path.

    closed_form dispatch (beta in [0, 1] only):
        beta = 0 : r/2 - sin(2kr)/(4k)
        beta = 1 : (ln(kr) - Ci(2kr) + euler_gamma + ln 2)/2
        else     : r^eps/(2 eps) - Re[gamma(eps, 2ikr)/(2ik)^eps]/2, eps = 1-beta

    quadrature goes through the adaptive oracle (any beta < 3).  Array input
    on the quadrature path is evaluated cumulatively after sorting.
    """
    if path not in _PATHS:
        raise UnsupportedPathError(f"unknown path {path!r}; expected one of {_PATHS}")
    ra = _as_radius(r)

    if path == "closed_form":
        if not 0.0 <= p.beta <= 1.0:
            raise UnsupportedPathError(
                f"closed form covers beta in [0, 1]; got beta = {p.beta:g}"
            )
        out = _modulation_closed_form(
            p, np.atleast_1d(ra), eval_cfg or specfun.DEFAULT_EVAL_CONFIG
        ).reshape(np.shape(ra))
        if not np.all(np.isfinite(out)):
            raise ArithmeticError("closed-form modulation integral overflowed")
        return _scalar_like(r, out)

    cfg = quad_cfg or quadrature.DEFAULT_QUAD_CONFIG
    if np.ndim(ra) == 0:
        return quadrature.integrate_modulation(p.k, p.beta, float(ra), cfg)
    flat = ra.ravel()
    order = np.argsort(flat, kind="stable")
    srt, inv = np.unique(flat[order], return_inverse=True)
    vals = quadrature.integrate_modulation_cumulative(p.k, p.beta, srt, cfg)
    out = np.empty_like(flat)
    out[order] = vals[inv]
    return out.reshape(ra.shape)


def modulating_function(p, r, path="closed_form", quad_cfg=None, eval_cfg=None):
    """f(r) = A exp(a I(r)); f(0) = A exactly.  Growth past float range raises."""
    i_val = modulation_integral(p, r, path, quad_cfg, eval_cfg)
    arg = p.a * np.asarray(i_val)
    if np.any(arg > _EXP_OVERFLOW):
        raise ModulationOverflowError(
            "modulating function grows past float range "
            f"(a I reached {float(np.max(arg)):.3g}); a > 0 gives unbounded f"
        )
    return _scalar_like(r, p.A * np.exp(arg))


def chi(p, r, path="closed_form", quad_cfg=None, eval_cfg=None):
    """chi(r) = sin(kr)/k * f(r); the candidate bound state at E = k^2."""
    return _scalar_like(
        r, chi0(p.k, r) * modulating_function(p, r, path, quad_cfg, eval_cfg)
    )


def chi_derivatives(p, r, path="closed_form", quad_cfg=None, eval_cfg=None):
    """(chi, chi', chi'') at r > 0, all analytic in C and C'.

    chi'  = f (chi0' + C chi0)
    chi'' = f ((C' + C^2) chi0 + 2 C chi0' - k^2 chi0)

    No finite differencing anywhere; the only integral is I(r) inside f.
    """
    ra = _as_radius(r, allow_zero=False)
    f = np.asarray(modulating_function(p, ra, path, quad_cfg, eval_cfg))
    c = np.asarray(log_derivative(p, ra))
    cp = np.asarray(log_derivative_prime(p, ra))
    x0 = np.sin(p.k * ra) / p.k
    x0p = np.cos(p.k * ra)
    val = f * x0
    der = f * (x0p + c * x0)
    dder = f * ((cp + c * c) * x0 + 2.0 * c * x0p - p.k * p.k * x0)
    if np.ndim(r) == 0:
        return float(val), float(der), float(dder)
    return val, der, dder


_QUANTITIES = ("V", "f", "chi", "C", "residual")


def sample(p, g, quantity, path="closed_form", quad_cfg=None, eval_cfg=None):
    """Vectorized evaluation of one quantity on a grid -> SampledFunction.

    quantity: "V", "f", "chi", "C", or "residual".  The residual is the
    normalized Schroedinger defect |chi'' + (k^2 - V) chi| / max(k^2|chi|,
    |chi''|) and requires r_min > 0.
    """
    if quantity not in _QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}; expected one of {_QUANTITIES}")
    r = g.points()
    try:
        if quantity == "V":
            vals = potential(p, r)
        elif quantity == "f":
            vals = modulating_function(p, r, path, quad_cfg, eval_cfg)
        elif quantity == "chi":
            vals = chi(p, r, path, quad_cfg, eval_cfg)
        elif quantity == "C":
            vals = log_derivative(p, r)
        else:
            c, cpr, cdd = chi_derivatives(p, r, path, quad_cfg, eval_cfg)
            v = potential(p, r)
            num = np.abs(cdd + (p.k * p.k - v) * c)
            den = np.maximum(np.maximum(p.k * p.k * np.abs(c), np.abs(cdd)), 1e-300)
            vals = num / den
    except (SingularPointError, UnsupportedPathError, ModulationOverflowError) as exc:
        # Singularities on an ascending grid always sit at index 0.
        bad = f" (grid index 0, r = {r[0]:g})" if isinstance(exc, SingularPointError) else ""
        raise type(exc)(f"{exc}{bad}") from exc
    return SampledFunction(grid=g, values=np.asarray(vals, dtype=float), label=quantity)
