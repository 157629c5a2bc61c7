"""Function algebra of the quantum unit disc.

Elements are stored in normal form: a sector-indexed family of grid
functions,

    f  =  sum_{m>0} z^m psi_m(y)  +  psi_0(y)  +  sum_{m>0} psi_{-m}(y) z*^m,

with each psi living on the grid y = q^(2n).  The generator relation
z* z = q^2 z z* + (1 - q^2) drives the normal-ordered product: powers of
z and z* commute past grid functions via the argument shifts
phi(y) -> phi(q^{-+2} y), and z*^k z^k / z^k z*^k contract to explicit
polynomial grid functions.

A truncated weighted-shift matrix representation serves as an independent
oracle for products, the involution, and the invariant integral.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .context import QContext
from .errors import CapacityError, DomainError, RangeError


def _shift(values: np.ndarray, s: int) -> np.ndarray:
    """Grid function of the scaled argument: result[n] = values[n + s].

    Out-of-range reads are zero-filled.  Every place this is used with a
    negative s, the zero-filled rows carry exactly vanishing cofactors.
    """
    if s == 0:
        return values.copy()
    out = np.zeros_like(values)
    if s > 0:
        if s < len(values):
            out[:-s] = values[s:]
    else:
        out[-s:] = values[:s]
    return out


class GridFunction:
    """Function on the grid q^(2Z+), stored densely up to the horizon."""

    __slots__ = ("values", "finite_support")

    def __init__(self, values, finite_support: bool = True):
        self.values = np.asarray(values, dtype=complex)
        self.finite_support = bool(finite_support)

    @classmethod
    def zeros(cls, npoints: int) -> "GridFunction":
        return cls(np.zeros(npoints, dtype=complex))

    @classmethod
    def delta(cls, n: int, npoints: int) -> "GridFunction":
        v = np.zeros(npoints, dtype=complex)
        v[n] = 1.0
        return cls(v)

    def __len__(self) -> int:
        return len(self.values)

    def shifted(self, s: int) -> "GridFunction":
        return GridFunction(_shift(self.values, s), self.finite_support)

    def conj(self) -> "GridFunction":
        return GridFunction(np.conj(self.values), self.finite_support)

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if len(self.values) else 0.0


@dataclass
class DiscElement:
    """Sector-indexed normal form of an algebra element.

    sectors[m] holds psi_m; m > 0 means z^m psi_m(y), m < 0 means
    psi_m(y) z*^|m|.  Elements are treated as immutable values; all
    operations return new instances.
    """

    sectors: dict[int, GridFunction]
    ctx: QContext

    def __post_init__(self):
        self.sectors = {
            m: g for m, g in self.sectors.items() if not g.is_zero()
        }

    @property
    def finite(self) -> bool:
        return all(g.finite_support for g in self.sectors.values())

    def sector(self, m: int) -> GridFunction:
        g = self.sectors.get(m)
        if g is None:
            return GridFunction.zeros(self.ctx.npoints)
        return g

    def sector_range(self) -> tuple[int, int]:
        if not self.sectors:
            return (0, 0)
        keys = self.sectors.keys()
        return (min(keys), max(keys))

    def max_abs(self) -> float:
        return max((g.max_abs() for g in self.sectors.values()), default=0.0)

    def __add__(self, other: "DiscElement") -> "DiscElement":
        out: dict[int, GridFunction] = {}
        for m in set(self.sectors) | set(other.sectors):
            a, b = self.sector(m), other.sector(m)
            out[m] = GridFunction(
                a.values + b.values, a.finite_support and b.finite_support
            )
        return DiscElement(out, self.ctx)

    def __sub__(self, other: "DiscElement") -> "DiscElement":
        return self + other.scaled(-1.0)

    def scaled(self, c: complex) -> "DiscElement":
        return DiscElement(
            {
                m: GridFunction(c * g.values, g.finite_support)
                for m, g in self.sectors.items()
            },
            self.ctx,
        )

    def conj_sector_values(self) -> "DiscElement":
        return DiscElement(
            {m: g.conj() for m, g in self.sectors.items()}, self.ctx
        )

    def max_abs_diff(self, other: "DiscElement") -> float:
        d = 0.0
        for m in set(self.sectors) | set(other.sectors):
            d = max(
                d,
                float(
                    np.max(np.abs(self.sector(m).values - other.sector(m).values))
                ),
            )
        return d

    # --- constructors -------------------------------------------------

    @classmethod
    def zero(cls, ctx: QContext) -> "DiscElement":
        return cls({}, ctx)

    @classmethod
    def one(cls, ctx: QContext) -> "DiscElement":
        return cls({0: GridFunction(np.ones(ctx.npoints, dtype=complex), False)}, ctx)

    @classmethod
    def generator_z(cls, ctx: QContext) -> "DiscElement":
        return cls({1: GridFunction(np.ones(ctx.npoints, dtype=complex), False)}, ctx)

    @classmethod
    def generator_zstar(cls, ctx: QContext) -> "DiscElement":
        return cls({-1: GridFunction(np.ones(ctx.npoints, dtype=complex), False)}, ctx)

    @classmethod
    def radial_y(cls, ctx: QContext) -> "DiscElement":
        return cls({0: GridFunction(ctx.ygrid().astype(complex), False)}, ctx)

    @classmethod
    def from_sector(cls, m: int, values, ctx: QContext, finite: bool = True) -> "DiscElement":
        return cls({m: GridFunction(values, finite)}, ctx)


def delta_fn(n: int, ctx: QContext) -> DiscElement:
    """Radial indicator of the grid point q^(2n) (n = 0 gives f_0)."""
    if not 0 <= n <= ctx.grid_horizon:
        raise RangeError(f"grid index {n} outside 0..{ctx.grid_horizon}")
    return DiscElement({0: GridFunction.delta(n, ctx.npoints)}, ctx)


def _poch_down(d: int, ctx: QContext, npoints: int) -> np.ndarray:
    """P_d[n] = prod_{s=0}^{d-1} (1 - q^{2(n-s)}); exactly zero for n < d.

    This is the grid function of z^d z*^d.
    """
    out = np.zeros(npoints, dtype=complex)
    if d == 0:
        out[:] = 1.0
        return out
    yg = ctx.ygrid(npoints)
    for n in range(d, npoints):
        p = 1.0
        for s in range(n - d + 1, n + 1):
            p *= 1.0 - yg[s]
        out[n] = p
    return out


def _poch_up(d: int, ctx: QContext, npoints: int) -> np.ndarray:
    """Q_d[n] = prod_{s=1}^{d} (1 - q^{2(n+s)}); the grid function of z*^d z^d."""
    yg = np.power(ctx.q2, np.arange(npoints + d, dtype=float))
    out = np.ones(npoints, dtype=complex)
    for n in range(npoints):
        p = 1.0
        for s in range(1, d + 1):
            p *= 1.0 - yg[n + s]
        out[n] = p
    return out


def _mul_terms(
    m1: int, psi: GridFunction, m2: int, phi: GridFunction, ctx: QContext
) -> tuple[int, GridFunction]:
    """Normal form of the product of two single-sector terms."""
    npoints = ctx.npoints
    # a factor of finite support confines the product's support
    finite = psi.finite_support or phi.finite_support
    if m1 >= 0 and m2 >= 0:
        # z^a psi(y) z^b phi(y) = z^(a+b) psi(q^(2b) y) phi(y)
        g = _shift(psi.values, m2) * phi.values
        return m1 + m2, GridFunction(g, finite)
    if m1 < 0 and m2 < 0:
        # psi(y) z*^a phi(y) z*^b = psi(y) phi(q^(2a) y) z*^(a+b)
        a = -m1
        g = psi.values * _shift(phi.values, a)
        return m1 + m2, GridFunction(g, finite)
    if m1 >= 0 and m2 < 0:
        # z^a chi(y) z*^b with chi = psi * phi: contract d = min(a, b)
        # pairs, leaving the argument of chi shifted up and the
        # contraction polynomial P_d.
        a, b = m1, -m2
        d = min(a, b)
        chi = psi.values * phi.values
        g = _shift(chi, -d) * _poch_down(d, ctx, npoints)
        if finite and d > 0 and np.any(np.abs(chi[npoints - d:]) > 0):
            raise CapacityError(
                "product support would pass the grid horizon; raise grid_horizon"
            )
        return m1 + m2, GridFunction(g, finite)
    # m1 < 0 <= m2: psi(y) z*^a z^b phi(y)
    a, b = -m1, m2
    d = min(a, b)
    qup = _poch_up(d, ctx, npoints)
    if b >= a:
        g = _shift(psi.values * qup, b - a) * phi.values
    else:
        g = psi.values * _shift(qup * phi.values, a - b)
    return m1 + m2, GridFunction(g, finite)


def normal_mul(f: DiscElement, g: DiscElement, ctx: QContext | None = None) -> DiscElement:
    """Product of two elements in normal form."""
    ctx = ctx or f.ctx
    acc: dict[int, np.ndarray] = {}
    fin: dict[int, bool] = {}
    for m1, psi in f.sectors.items():
        for m2, phi in g.sectors.items():
            m, term = _mul_terms(m1, psi, m2, phi, ctx)
            if m in acc:
                acc[m] = acc[m] + term.values
                fin[m] = fin[m] and term.finite_support
            else:
                acc[m] = term.values
                fin[m] = term.finite_support
    return DiscElement(
        {m: GridFunction(v, fin[m]) for m, v in acc.items()}, ctx
    )


def star(f: DiscElement) -> DiscElement:
    """Involution: sector m maps to sector -m with conjugated values."""
    return DiscElement(
        {-m: g.conj() for m, g in f.sectors.items()}, f.ctx
    )


def inv_integral(f: DiscElement, ctx: QContext | None = None) -> complex:
    """Invariant integral (1-q^2) sum_m psi_0(q^(2m)) q^(-2m).

    Only the radial sector contributes; integrals of nonzero-sector terms
    vanish identically.  Requires a finite element.
    """
    ctx = ctx or f.ctx
    if not f.finite:
        raise DomainError("invariant integral requires a finite element")
    g = f.sectors.get(0)
    if g is None:
        return 0.0 + 0.0j
    w = ctx.weights(len(g.values))
    return (1.0 - ctx.q2) * complex(np.sum(g.values * w))


def integral_scale(f: DiscElement, ctx: QContext | None = None) -> float:
    """Absolute-mass scale of the invariant integral (for relative residuals)."""
    ctx = ctx or f.ctx
    s = 0.0
    for g in f.sectors.values():
        w = ctx.weights(len(g.values))
        s += float(np.sum(np.abs(g.values) * w))
    return (1.0 - ctx.q2) * s


def inner(f: DiscElement, g: DiscElement, ctx: QContext | None = None) -> complex:
    """Sesquilinear pairing integral(g* f); positive definite on finite elements."""
    ctx = ctx or f.ctx
    return inv_integral(normal_mul(star(g), f, ctx), ctx)


# --- faithful weighted-shift representation ---------------------------


@dataclass
class RepMatrix:
    """Truncated matrix of an element in the weighted-shift representation."""

    dim: int
    entries: np.ndarray


def _rep_z(dim: int, ctx: QContext) -> np.ndarray:
    """z e_k = sqrt(1 - q^(2(k+1))) e_{k+1}; y = 1 - z z* is diagonal q^(2k)."""
    m = np.zeros((dim, dim), dtype=complex)
    for k in range(dim - 1):
        m[k + 1, k] = np.sqrt(1.0 - ctx.q2 ** (k + 1))
    return m


def rep_matrix(f: DiscElement, dim: int, ctx: QContext | None = None) -> RepMatrix:
    """Matrix of f on the first dim basis vectors of the representation."""
    ctx = ctx or f.ctx
    if dim < 1:
        raise DomainError("representation dimension must be positive")
    z = _rep_z(dim, ctx)
    zs = z.conj().T
    diag_y = np.power(ctx.q2, np.arange(dim, dtype=float))
    out = np.zeros((dim, dim), dtype=complex)
    for m, g in f.sectors.items():
        vals = np.zeros(dim, dtype=complex)
        take = min(dim, len(g.values))
        vals[:take] = g.values[:take]
        dmat = np.diag(vals)
        if m == 0:
            out += dmat
        elif m > 0:
            out += np.linalg.matrix_power(z, m) @ dmat
        else:
            out += dmat @ np.linalg.matrix_power(zs, -m)
    return RepMatrix(dim, out)


# --- JSON serialization (consumed by the CLI) -------------------------


def element_to_json_dict(f: DiscElement) -> dict:
    """Schema: {q, sectors: [{m, values: [[n, re, im], ...]}, ...]}."""
    sectors = []
    for m in sorted(f.sectors):
        vals = f.sectors[m].values
        rows = [
            [int(n), float(v.real), float(v.imag)]
            for n, v in enumerate(vals)
            if v != 0
        ]
        sectors.append({"m": int(m), "values": rows})
    return {"q": f.ctx.q, "sectors": sectors}


def element_from_json_dict(doc: dict, ctx: QContext) -> DiscElement:
    sectors: dict[int, GridFunction] = {}
    for entry in doc.get("sectors", []):
        v = np.zeros(ctx.npoints, dtype=complex)
        for n, re, im in entry["values"]:
            if not 0 <= int(n) <= ctx.grid_horizon:
                raise RangeError(f"serialized grid index {n} beyond horizon")
            v[int(n)] = re + 1j * im
        sectors[int(entry["m"])] = GridFunction(v)
    return DiscElement(sectors, ctx)


def save_element(f: DiscElement, path) -> None:
    with open(path, "w") as fh:
        json.dump(element_to_json_dict(f), fh, indent=1)


def load_element(path, ctx: QContext) -> DiscElement:
    with open(path) as fh:
        return element_from_json_dict(json.load(fh), ctx)
