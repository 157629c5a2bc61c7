"""Spectral theory of the radial Laplacian.

Eigenfunctions, the eigenvalue curve lambda(rho), the spectral density on
the period [0, 2*pi/h], and the forward/inverse spherical transform pair
for radial grid functions, plus a truncated-matrix probe of the spectrum.

Evaluation notes.  The terminating series defining the spherical function
phi_rho(q^(2n)) cancels catastrophically in fixed precision once n is
moderate (individual terms reach size ~ q^(-n(n-1)) while the value decays
like q^n), so the reference evaluator switches to adaptive multiprecision
arithmetic.  Transform machinery instead evaluates phi columns through
the eigen-recurrence seeded at the disc centre, which is numerically
stable on the continuous spectrum; the two routes are cross-checked in
the test suite.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath
import numpy as np
import scipy.linalg

from .context import QContext
from .discalg import GridFunction
from .errors import DomainError, PoleError, QuadratureError
from .qspecial import qgamma, qpochhammer
from .uqsl2 import stencil_coefficients


def lambda_rho(rho: complex, ctx: QContext) -> complex:
    """Eigenvalue -(1 - q^(1+2i rho))(1 - q^(1-2i rho)) / (1-q^2)^2.

    Real and inside [-1/(1-q)^2, -1/(1+q)^2] for real rho.
    """
    q = ctx.q
    a = cmath.exp((1 + 2j * rho) * math.log(q))
    b = cmath.exp((1 - 2j * rho) * math.log(q))
    val = -(1.0 - a) * (1.0 - b) / (1.0 - ctx.q2) ** 2
    if abs(complex(rho).imag) == 0.0:
        return complex(val.real)
    return val


def _phi_digits(n: int, q: float) -> int:
    """Working precision for the terminating spherical series at grid n.

    The largest intermediate term is of order q^(-n(n-1)); summing to a
    q^n-sized value costs that many digits.
    """
    return 30 + int(n * (n + 1) * math.log10(1.0 / q)) + 10


def phi_rho(rho: complex, n: int, ctx: QContext) -> complex:
    """Spherical function phi_rho at the grid point y = q^(2n).

    Terminating series of n+1 terms

        sum_k (q^(-2n); q^2)_k (q^(1+2i rho); q^2)_k (q^(1-2i rho); q^2)_k
              / ((q^2; q^2)_k)^2 * q^(2k),

    normalized by phi_rho(1) = 1.  Evaluated in double precision for
    small n and in multiprecision above (see module docstring).
    """
    if n < 0:
        raise DomainError("grid index must be nonnegative")
    q = ctx.q
    if n <= 3:
        return _phi_series_double(rho, n, q)
    digits = _phi_digits(n, q)
    with mpmath.workdps(digits):
        qm = mpmath.mpf(q)
        q2 = qm * qm
        w = mpmath.exp(2j * mpmath.mpc(rho) * mpmath.log(qm))
        a1 = qm * w        # q^(1+2i rho)
        a2 = qm / w        # q^(1-2i rho)
        total = mpmath.mpc(1)
        term = mpmath.mpc(1)
        for k in range(n):
            # factor (1 - q^(2(k-n))) built with an integer exponent so the
            # terminating zero at k = n is exact
            f_top = (1 - q2 ** (k - n)) * (1 - a1 * q2**k) * (1 - a2 * q2**k)
            f_bot = (1 - q2 ** (k + 1)) ** 2
            term *= f_top / f_bot * q2
            total += term
        return complex(total)


def _phi_series_double(rho: complex, n: int, q: float) -> complex:
    q2 = q * q
    w = cmath.exp(2j * complex(rho) * math.log(q))
    a1, a2 = q * w, q / w
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    for k in range(n):
        f_top = (1.0 - q2 ** (k - n)) * (1.0 - a1 * q2**k) * (1.0 - a2 * q2**k)
        f_bot = (1.0 - q2 ** (k + 1)) ** 2
        term *= f_top / f_bot * q2
        total += term
    if abs(complex(rho).imag) == 0.0:
        return complex(total.real)
    return total


def phi_column(rho: float, npoints: int, ctx: QContext) -> np.ndarray:
    """phi_rho on grid rows 0..npoints-1 via the eigen-recurrence.

    Stable evaluation used by the transform machinery: seed phi(1) = 1,
    step with the three-term stencil at eigenvalue lambda(rho).  On the
    continuous spectrum both solutions share the q^n envelope, so forward
    stepping does not amplify.  Cross-checked against phi_rho in tests.
    """
    lam = lambda_rho(rho, ctx)
    up, diag, down = stencil_coefficients(ctx, npoints)
    out = np.zeros(npoints, dtype=complex)
    out[0] = 1.0
    if npoints == 1:
        return out
    out[1] = (lam - diag[0]) * out[0] / down[0]
    for n in range(1, npoints - 1):
        out[n + 1] = ((lam - diag[n]) * out[n] - up[n] * out[n - 1]) / down[n]
    return out


def phi_matrix(
    rhos: np.ndarray, npoints: int, ctx: QContext, cache_key=None
) -> np.ndarray:
    """Matrix phi[rho_j, n] for all quadrature nodes at once."""
    if cache_key is not None:
        hit = _PHI_CACHE.get((ctx.q, cache_key, npoints))
        if hit is not None:
            return hit
    lam = np.array([lambda_rho(r, ctx) for r in rhos], dtype=complex)
    up, diag, down = stencil_coefficients(ctx, npoints)
    out = np.zeros((len(rhos), npoints), dtype=complex)
    out[:, 0] = 1.0
    if npoints > 1:
        out[:, 1] = (lam - diag[0]) / down[0]
        for n in range(1, npoints - 1):
            out[:, n + 1] = ((lam - diag[n]) * out[:, n] - up[n] * out[:, n - 1]) / down[n]
    if cache_key is not None:
        _PHI_CACHE[(ctx.q, cache_key, npoints)] = out
    return out


def psi_rho(rho: complex, n: int, ctx: QContext) -> complex:
    """Second solution y^(1/2 - i rho) * 2Phi1 at y = q^(2n).

    Series coefficients (q^(1-2i rho); q^2)_k^2 /
    ((q^(2-4i rho); q^2)_k (q^2; q^2)_k) q^(2k) y^k; the prefactor is
    exp((1/2 - i rho) * 2n ln q).  Defined away from rho in (1/2i) N,
    where a denominator factor vanishes (PoleError).
    """
    q = ctx.q
    q2 = ctx.q2
    lnq = math.log(q)
    rho = complex(rho)
    b = cmath.exp((1 - 2j * rho) * lnq)       # q^(1-2i rho)
    c = cmath.exp((2 - 4j * rho) * lnq)       # q^(2-4i rho)
    y = q2**n
    prefactor = cmath.exp((0.5 - 1j * rho) * 2 * n * lnq)
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    k = 0
    while True:
        den = (1.0 - c * q2**k) * (1.0 - q2 ** (k + 1))
        if abs(den) < 1e-13:
            raise PoleError(f"psi_rho parameter pole at rho={rho}")
        term *= (1.0 - b * q2**k) ** 2 / den * q2 * y
        total += term
        k += 1
        ratio = abs(q2 * y)
        if abs(term) * ratio / (1 - ratio) < ctx.series_tol:
            break
        if k > 100_000:
            raise DomainError("psi_rho series did not converge")
    return prefactor * total


def c_coefficient(rho: complex, ctx: QContext) -> complex:
    """Harmonic-analysis c-coefficient Gamma_{q^2}(2 i rho) / Gamma_{q^2}(1/2 + i rho)^2.

    Connects phi_rho to the pair psi_{+rho}, psi_{-rho}:
    phi = c(rho) psi_rho + c(-rho) psi_{-rho}.
    """
    q2 = ctx.q2
    return qgamma(2j * rho, q2) / qgamma(0.5 + 1j * rho, q2) ** 2


def sigma_density(rho: float, ctx: QContext) -> float:
    """Density of the spectral (Plancherel) measure on [0, 2*pi/h].

    (1/4pi) (h/(1-q^2)) |Gamma_{q^2}(1/2 - i rho)^2 / Gamma_{q^2}(-2 i rho)|^2
    evaluated through the pole-free product quotient

        Gamma^2(1/2 - i rho) / Gamma(-2 i rho)
            = (q^2; q^2)_inf (q^(-4 i rho); q^2)_inf / (q^(1-2 i rho); q^2)_inf^2,

    which vanishes smoothly at the period endpoints.
    """
    period = ctx.rho_period()
    if rho <= 0.0 or rho >= period:
        return 0.0
    q = ctx.q
    q2 = ctx.q2
    lnq = math.log(q)
    half = (
        qpochhammer(q2, q2, math.inf)
        * qpochhammer(cmath.exp(-4j * rho * lnq), q2, math.inf)
        / qpochhammer(cmath.exp((1 - 2j * rho) * lnq), q2, math.inf) ** 2
    )
    dens = (half * half.conjugate()).real
    return ctx.h / (4.0 * math.pi * (1.0 - q2)) * dens


_DENSITY_CACHE: dict[tuple, np.ndarray] = {}
_PHI_CACHE: dict[tuple, np.ndarray] = {}


def _density_vector(rhos: np.ndarray, ctx: QContext, cache_key=None) -> np.ndarray:
    """Vectorized density evaluation; cached per (q, node set)."""
    if cache_key is not None:
        hit = _DENSITY_CACHE.get((ctx.q, cache_key))
        if hit is not None:
            return hit
    q2 = ctx.q2
    lnq = math.log(ctx.q)
    w = np.exp(-4j * np.asarray(rhos) * lnq)      # q^(-4 i rho)
    b = np.exp((1 - 2j * np.asarray(rhos)) * lnq)  # q^(1-2 i rho)
    prod_w = np.ones_like(w)
    prod_b = np.ones_like(b)
    const = 1.0
    fac = 1.0
    k = 0
    while fac > 1e-18 and k < 10_000:
        qk = q2**k
        prod_w *= 1.0 - w * qk
        prod_b *= 1.0 - b * qk
        const *= 1.0 - q2 ** (k + 1)
        fac = q2 ** (k + 1)
        k += 1
    half = const * prod_w / prod_b**2
    dens = (half * np.conj(half)).real * ctx.h / (4.0 * math.pi * (1.0 - q2))
    period = ctx.rho_period()
    dens[(np.asarray(rhos) <= 0.0) | (np.asarray(rhos) >= period)] = 0.0
    dens = np.maximum(dens, 0.0)
    if cache_key is not None:
        _DENSITY_CACHE[(ctx.q, cache_key)] = dens
    return dens


@dataclass
class SpectralFunction:
    """Transform values on equispaced nodes of the spectral period.

    Transforms of grid functions keep a reference to their source so
    refinement can re-evaluate exactly; quadrature then never relies on
    interpolation, which would smear the rounding of the large
    near-midpoint values of deep transforms over the whole period.
    """

    nodes: np.ndarray
    values: np.ndarray
    rule: str = "trapezoid-periodic"
    source: "GridFunction | None" = None

    @property
    def node_count(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class PlancherelDensity:
    """The spectral measure as a callable density on [0, 2*pi/h]."""

    ctx: QContext

    @property
    def normalization(self) -> float:
        return self.ctx.h / (4.0 * math.pi * (1.0 - self.ctx.q2))

    def __call__(self, rho: float) -> float:
        return sigma_density(rho, self.ctx)


def _nodes(count: int, ctx: QContext) -> np.ndarray:
    period = ctx.rho_period()
    return period * np.arange(count) / count


def transform_forward(
    g: GridFunction, ctx: QContext, node_count: int = 1024
) -> SpectralFunction:
    """Spherical transform of a finite radial grid function.

    hat f(rho) = integral_0^1 phi_rho(y) f(y) y^(-2) d_{q^2} y
               = (1-q^2) sum_m phi_rho(q^(2m)) f(q^(2m)) q^(-2m),

    an exact finite sum, evaluated on equispaced nodes.
    """
    if not g.finite_support:
        raise DomainError("spherical transform requires finite support")
    rhos = _nodes(node_count, ctx)
    npoints = len(g.values)
    phi = phi_matrix(rhos, npoints, ctx, cache_key=node_count)
    w = ctx.weights(npoints)
    vals = (1.0 - ctx.q2) * phi @ (g.values * w)
    return SpectralFunction(rhos, vals, source=g)


def forward_at(
    g: GridFunction, rhos: np.ndarray, ctx: QContext, cache_key=None
) -> np.ndarray:
    """Forward transform evaluated at arbitrary nodes."""
    npoints = len(g.values)
    phi = phi_matrix(np.asarray(rhos, dtype=float), npoints, ctx, cache_key=cache_key)
    w = ctx.weights(npoints)
    return (1.0 - ctx.q2) * phi @ (g.values * w)


def transform_inverse(
    F,
    ctx: QContext,
    npoints: int | None = None,
    start_nodes: int = 64,
    max_nodes: int = 8192,
    quad_abs_tol: float = 1e-11,
    quad_rel_tol: float = 1e-12,
) -> GridFunction:
    """Inverse spherical transform by periodic-trapezoid quadrature.

    f(q^(2n)) = integral_0^{2 pi/h} phi_rho(q^(2n)) F(rho) dsigma(rho).

    F is either a SpectralFunction sampled on equispaced nodes or a
    callable rho -> value.  The integrand is periodic and analytic in
    rho, so the node count is doubled until outputs move by less than
    max(quad_abs_tol, quad_rel_tol * scale, rounding floor); failure to
    settle raises QuadratureError with diagnostics.  Spectral functions
    carrying their source grid function are re-evaluated exactly at the
    refined nodes; others are refined by trigonometric interpolation.
    """
    if npoints is None:
        npoints = ctx.npoints
    period = ctx.rho_period()

    if isinstance(F, SpectralFunction):
        base = F.node_count
        if F.source is not None:
            src = F.source
            fvals_for = lambda rhos: forward_at(src, rhos, ctx, cache_key=len(rhos))
        else:
            fvals_for = lambda rhos: _resample(F, rhos)
        start_nodes = max(start_nodes, base)
    else:
        fvals_for = lambda rhos: np.array([F(r) for r in rhos], dtype=complex)

    prev = None
    count = start_nodes
    while count <= max_nodes:
        rhos = _nodes(count, ctx)
        fv = fvals_for(rhos)
        dens = _density_vector(rhos, ctx, cache_key=count)
        phi = phi_matrix(rhos, npoints, ctx, cache_key=count)
        out = (period / count) * (phi.T @ (fv * dens))
        # rounding floor of the quadrature sums: spectral values of deep
        # deltas reach q^(-2n) sizes and the summation noise accumulates
        # like sqrt(count); differences below this are indistinguishable
        # from rounding (the integrands here are entire and periodic, so
        # the discretization error collapses far faster than this floor)
        floor = (
            32.0
            * np.finfo(float).eps
            * period
            * math.sqrt(count)
            * float(np.mean(np.abs(fv * dens)))
        )
        if prev is not None:
            diff = float(np.max(np.abs(out - prev)))
            scale = float(np.max(np.abs(out)))
            if diff <= max(quad_abs_tol, quad_rel_tol * scale, floor):
                return GridFunction(out, finite_support=False)
        prev = out
        count *= 2
    raise QuadratureError(
        f"inverse transform did not settle below tol by {max_nodes} nodes "
        f"(last change {diff:.3e})"
    )


def _resample(F: SpectralFunction, rhos: np.ndarray) -> np.ndarray:
    """Values of a sourceless spectral function at a refined node set.

    Trigonometric interpolation, exact for band-limited data such as the
    transforms of finite functions (which are trigonometric polynomials
    of degree bounded by the support).
    """
    n = F.node_count
    if len(rhos) == n:
        return F.values
    # trigonometric interpolation via FFT zero-padding
    m = len(rhos)
    if m % n:
        raise QuadratureError("resampling requires node counts in ratio 2^k")
    spec = np.fft.fft(F.values)
    padded = np.zeros(m, dtype=complex)
    half = n // 2
    padded[:half] = spec[:half]
    padded[-half:] = spec[-half:]
    if n % 2 == 0:
        # split the shared Nyquist coefficient symmetrically
        padded[half] = spec[half] / 2.0
        padded[m - half] = spec[half] / 2.0
    return np.fft.ifft(padded) * (m / n)


def spectrum_probe(dim: int, ctx: QContext) -> tuple[float, float]:
    """Extreme eigenvalues of the symmetrized dim x dim truncation.

    The radial operator is symmetric under the weight q^(-2n); conjugating
    by diag(q^(-n)) gives a real symmetric tridiagonal matrix whose
    spectrum sits inside [-1/(1-q)^2, -1/(1+q)^2] and fills it as dim
    grows.
    """
    if dim < 2:
        raise DomainError("spectrum probe needs dim >= 2")
    up, diag, down = stencil_coefficients(ctx, dim)
    d = diag.real.copy()
    e = ctx.q * down.real[: dim - 1]
    vals = scipy.linalg.eigvalsh_tridiagonal(d, e)
    return float(vals[0]), float(vals[-1])
