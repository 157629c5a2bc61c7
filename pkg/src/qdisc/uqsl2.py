"""Quantum symmetry of the disc algebra.

Covariant generator actions (K, K^-1, E, F) on elements in normal form,
the Casimir element, the invariant Laplacian defined through it, its
radial part as an explicit three-term difference stencil, and invariance
residuals for elements and kernels.

Sector structure: K scales sector n by q^(2n) exactly, E raises the
sector index by one, F lowers it.  The difference formulas reference
the neighbour grid point with cofactors that vanish exactly where the
reference would leave the grid, so all actions stay well defined on
stored arrays.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .context import QContext
from .discalg import DiscElement, GridFunction, _shift
from .errors import DomainError

GENERATORS = ("K", "Kinv", "E", "F")

# counit on the generators
EPSILON = {"K": 1.0, "Kinv": 1.0, "E": 0.0, "F": 0.0}


def act(label: str, f: DiscElement, ctx: QContext | None = None) -> DiscElement:
    """Covariant action of a generator on an element in normal form.

    K/Kinv scale each sector; E maps sector j to j+1 and F to j-1 via the
    first-order difference formulas of the module structure:

        E(z^j f(y))    = -q^(1/2)/(1-q^2) z^(j+1) (f(y) - q^(2j) f(q^2 y))
        E(f(y) z*^j)   = -q^(1/2)/(1-q^2) ((y - q^(-2j)) f(y)
                          + (1-y) f(q^(-2) y)) z*^(j-1),  j >= 1
        F(z^j f(y))    = -q^(5/2)/(1-q^2) z^(j-1) ((y - q^(-2j)) f(y)
                          + (1-y) f(q^(-2) y)),           j >= 1
        F(f(y) z*^j)   = -q^(5/2)/(1-q^2) (f(y) - q^(2j) f(q^2 y)) z*^(j+1)

    In particular F z = q^(1/2), E z = -q^(1/2) z^2, E z* = q^(-3/2) and
    F z* = -q^(5/2) z*^2 (the sign/power forced by the defining relations).
    """
    ctx = ctx or f.ctx
    q = ctx.q
    if label == "K":
        return DiscElement(
            {m: GridFunction(q ** (2 * m) * g.values, g.finite_support)
             for m, g in f.sectors.items()},
            ctx,
        )
    if label == "Kinv":
        return DiscElement(
            {m: GridFunction(q ** (-2 * m) * g.values, g.finite_support)
             for m, g in f.sectors.items()},
            ctx,
        )
    yg = ctx.ygrid()
    out: dict[int, np.ndarray] = {}
    fin: dict[int, bool] = {}

    def add(m, vals, finite):
        if m in out:
            out[m] = out[m] + vals
            fin[m] = fin[m] and finite
        else:
            out[m] = vals
            fin[m] = finite

    if label == "E":
        alpha = -(q**0.5) / (1.0 - ctx.q2)
        for m, g in f.sectors.items():
            if m >= 0:
                vals = alpha * (g.values - q ** (2 * m) * _shift(g.values, 1))
                add(m + 1, vals, g.finite_support)
            else:
                j = -m
                vals = alpha * (
                    (yg - q ** (-2 * j)) * g.values
                    + (1.0 - yg) * _shift(g.values, -1)
                )
                add(m + 1, vals, g.finite_support)
    elif label == "F":
        beta = -(q**2.5) / (1.0 - ctx.q2)
        for m, g in f.sectors.items():
            if m >= 1:
                vals = beta * (
                    (yg - q ** (-2 * m)) * g.values
                    + (1.0 - yg) * _shift(g.values, -1)
                )
                add(m - 1, vals, g.finite_support)
            else:
                j = -m
                vals = beta * (g.values - q ** (2 * j) * _shift(g.values, 1))
                add(m - 1, vals, g.finite_support)
    else:
        raise DomainError(f"unknown generator {label!r}")
    return DiscElement(
        {m: GridFunction(v, fin[m]) for m, v in out.items()}, ctx
    )


def act_word(labels: Iterable[str], f: DiscElement, ctx: QContext | None = None) -> DiscElement:
    """Compose generator actions right to left: act_word("EF", f) = E(F(f))."""
    ctx = ctx or f.ctx
    out = f
    for lab in reversed(list(labels)):
        out = act(lab, out, ctx)
    return out


def casimir_apply(f: DiscElement, ctx: QContext | None = None) -> DiscElement:
    """Casimir action FE + (q^-1 K^-1 + q K - q - q^-1) / (q^-1 - q)^2."""
    ctx = ctx or f.ctx
    q = ctx.q
    fe = act("F", act("E", f, ctx), ctx)
    denom = (1.0 / q - q) ** 2
    kpart = (
        act("Kinv", f, ctx).scaled(1.0 / q)
        + act("K", f, ctx).scaled(q)
        + f.scaled(-(q + 1.0 / q))
    ).scaled(1.0 / denom)
    return fe + kpart


def laplacian_apply(f: DiscElement, ctx: QContext | None = None) -> DiscElement:
    """Invariant Laplacian: q^-1 times the Casimir action.

    Preserves each sector.  On the radial sector it coincides with the
    explicit three-term stencil of radial_laplacian.
    """
    ctx = ctx or f.ctx
    return casimir_apply(f, ctx).scaled(1.0 / ctx.q)


def stencil_coefficients(ctx: QContext, npoints: int | None = None):
    """Three-term coefficients of the radial Laplacian on the grid.

    Row n couples f at indices n-1, n, n+1:

        up(n)   = q^2 (1 - q^(2n)) / (1-q^2)^2          (zero at n = 0)
        diag(n) = -(q^2 (1 - q^(2n)) + 1 - q^(2n+2)) / (1-q^2)^2
        down(n) = (1 - q^(2n+2)) / (1-q^2)^2
    """
    if npoints is None:
        npoints = ctx.npoints
    yg = ctx.ygrid(npoints)
    denom = (1.0 - ctx.q2) ** 2
    up = ctx.q2 * (1.0 - yg) / denom
    down = (1.0 - ctx.q2 * yg) / denom
    diag = -(ctx.q2 * (1.0 - yg) + (1.0 - ctx.q2 * yg)) / denom
    return up, diag, down


def radial_laplacian(g: GridFunction | np.ndarray, ctx: QContext) -> GridFunction:
    """Radial part of the Laplacian: the composition q^-1 y^2 D (1-qy) D.

    D is the symmetric q-difference (f(t/q) - f(qt)) / (t/q - qt); the
    first D lands on the half grid q^(2n+1), the multiplier (1-qy) acts
    there, and the second D returns to the grid.  At n = 0 the would-be
    off-grid reference carries coefficient zero, so the operator closes
    on the grid.
    """
    vals = g.values if isinstance(g, GridFunction) else np.asarray(g, dtype=complex)
    finite = g.finite_support if isinstance(g, GridFunction) else True
    up, diag, down = stencil_coefficients(ctx, len(vals))
    out = up * _shift(vals, -1) + diag * vals + down * _shift(vals, 1)
    return GridFunction(out, finite)


def radial_laplacian_matrix(ctx: QContext, dim: int) -> np.ndarray:
    """Dense dim x dim truncation of the radial stencil."""
    up, diag, down = stencil_coefficients(ctx, dim)
    m = np.zeros((dim, dim))
    for n in range(dim):
        m[n, n] = diag[n].real
        if n > 0:
            m[n, n - 1] = up[n].real
        if n + 1 < dim:
            m[n, n + 1] = down[n].real
    return m


def sector_rotate(f: DiscElement, angle: float) -> DiscElement:
    """One-parameter rotation: sector m picks up the phase e^(i m angle).

    Test helper exposing the circle action whose eigenspaces are the
    sectors; commutes with the Laplacian.
    """
    return DiscElement(
        {
            m: GridFunction(np.exp(1j * m * angle) * g.values, g.finite_support)
            for m, g in f.sectors.items()
        },
        f.ctx,
    )


def _sup_norm(f: DiscElement, margin: int) -> float:
    """Sup norm over grid rows, dropping the top `margin` rows of any
    non-finite sector (difference formulas read one row past the horizon
    there, so the last row is not meaningful for such functions)."""
    worst = 0.0
    for g in f.sectors.values():
        vals = g.values if g.finite_support or margin == 0 else g.values[:-margin]
        if len(vals):
            worst = max(worst, float(np.max(np.abs(vals))))
    return worst


def invariance_residual(v, ctx: QContext | None = None) -> float:
    """Deviation of v from invariance under the symmetry.

    For an element: max over xi in {E, F, K-1} of the sup norm of
    xi(v) - eps(xi) v, normalized by the element's magnitude.  Rows past
    the horizon reach of non-finite sectors are excluded.

    Kernels provide their own leg-wise action; this dispatches on type.
    """
    from .green import Kernel, kernel_invariance_residual  # cycle-free at call time

    if isinstance(v, Kernel):
        return kernel_invariance_residual(v, ctx or v.ctx)
    ctx = ctx or v.ctx
    worst = 0.0
    scale = max(1.0, v.max_abs())
    for lab in ("E", "F"):
        worst = max(worst, _sup_norm(act(lab, v, ctx), 1) / scale)
    kdev = act("K", v, ctx) - v
    worst = max(worst, _sup_norm(kdev, 1) / scale)
    return worst
