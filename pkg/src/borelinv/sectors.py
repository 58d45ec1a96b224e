"""Sector geometry: S_delta, the truncated sectors L_{R,delta} and sample grids."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParamError


@dataclass(frozen=True)
class SectorSpec:
    """Sector ``{z : |arg z| < delta*pi/2, r_min <= |z| <= r_max}`` in the plane.

    ``opening_delta`` must lie in (0, 2) so that the sector embeds in C.
    ``r_max`` may be ``math.inf`` for unbounded sectors; sampling grids then
    need an explicit radial cap.
    """

    opening_delta: float
    r_min: float = 0.0
    r_max: float = math.inf

    def __post_init__(self):
        if not 0.0 < self.opening_delta < 2.0:
            raise ParamError(f"opening_delta must lie in (0, 2), got {self.opening_delta}")
        if self.r_min < 0.0:
            raise ParamError(f"r_min must be nonnegative, got {self.r_min}")
        if not self.r_min < self.r_max:
            raise ParamError(f"need r_min < r_max, got {self.r_min} >= {self.r_max}")

    @property
    def half_angle(self) -> float:
        return self.opening_delta * math.pi / 2.0

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        return (np.abs(np.angle(z)) < self.half_angle) & (r >= self.r_min) & (r <= self.r_max) & (r > 0)

    def grid(self, n_radii: int = 200, n_angles: int = 65, r_cap: float | None = None) -> np.ndarray:
        """Log-uniform radii times uniform angles over the closed sector.

        Returns an ``(n_radii, n_angles)`` complex array. Angles include both
        edges ``+-half_angle``; the closure is the set the bounds are claimed on.
        """
        r_lo = self.r_min
        r_hi = self.r_max if math.isfinite(self.r_max) else r_cap
        if r_hi is None:
            raise ParamError("unbounded sector needs r_cap to build a grid")
        if r_lo <= 0.0:
            raise ParamError("grid needs r_min > 0 (log-uniform radii)")
        radii = np.geomspace(r_lo, r_hi, n_radii)
        angles = np.linspace(-self.half_angle, self.half_angle, n_angles)
        return radii[:, None] * np.exp(1j * angles)[None, :]

    def describe(self, n_radii: int, n_angles: int) -> dict:
        return {
            "opening_delta": self.opening_delta,
            "r_min": self.r_min,
            "r_max": self.r_max if math.isfinite(self.r_max) else "inf",
            "n_radii": n_radii,
            "n_angles": n_angles,
            "radii": "log-uniform",
            "angles": "uniform, edges included",
        }
