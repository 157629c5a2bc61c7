"""Deformation-parameter context shared by every module.

All radial objects live on the geometric grid y = q^(2n), n = 0..grid_horizon.
The context bundles q, the log-scale h = ln(1/q^2), truncation horizons and
the series tolerance, and precomputes the grid arrays everything else uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

# Series bounds degrade as q -> 1; enforced range keeps double precision honest.
Q_MIN = 0.05
Q_MAX = 0.995


@dataclass(frozen=True)
class QContext:
    """Deformation parameter q plus shared truncation settings.

    Attributes:
        q: deformation parameter, strictly inside (0, 1); validated to
           [0.05, 0.995].
        series_tol: absolute tail bound at which truncated series stop.
        grid_horizon: largest grid index N_max; grid points are q^(2n),
           n = 0..N_max.
        trunc_terms: term budget for the kernel coefficient series.
    """

    q: float
    series_tol: float = 1e-14
    grid_horizon: int = 64
    trunc_terms: int = 200
    h: float = field(init=False)

    def __post_init__(self):
        if not (Q_MIN <= self.q <= Q_MAX):
            raise DomainError(
                f"q={self.q} outside the supported range [{Q_MIN}, {Q_MAX}]"
            )
        if self.series_tol <= 0:
            raise DomainError("series_tol must be positive")
        if self.grid_horizon < 0 or self.trunc_terms < 0:
            raise DomainError("grid_horizon and trunc_terms must be nonnegative")
        object.__setattr__(self, "h", -2.0 * math.log(self.q))

    @property
    def q2(self) -> float:
        return self.q * self.q

    @property
    def npoints(self) -> int:
        """Number of stored grid points (grid_horizon + 1)."""
        return self.grid_horizon + 1

    def ygrid(self, npoints: int | None = None) -> np.ndarray:
        """Grid values q^(2n) for n = 0..npoints-1 (q^0 is exactly 1.0)."""
        if npoints is None:
            npoints = self.npoints
        return np.power(self.q2, np.arange(npoints, dtype=float))

    def weights(self, npoints: int | None = None) -> np.ndarray:
        """Integration weights q^(-2n) of the invariant integral."""
        if npoints is None:
            npoints = self.npoints
        return np.power(1.0 / self.q2, np.arange(npoints, dtype=float))

    def rho_period(self) -> float:
        """Period 2*pi/h of the spectral parameter."""
        return 2.0 * math.pi / self.h
