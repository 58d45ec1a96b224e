"""The kernel ``e(z) = z exp(-a g(z+1))`` built from Lambert W, and its bound fits.

``g(z) = W(b Log z)^(-1/(sigma-1)) * Log(z)^(sigma/(sigma-1))`` with principal
logarithms and powers throughout.  The constants ``a`` and ``b`` are fixed by
``tau`` and ``sigma``; see :func:`constants`.

The fitting helpers follow the same recipe everywhere: the K-type constants
come from the explicit choices the existence arguments make (times a small
safety factor), and the C-type constants are the extremal ratio over a
sample grid. A fit therefore certifies its inequality on every grid point by
construction; the grid itself is recorded with the result.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError, FitError, ParamError
from .lambert_w import w_principal
from .sectors import SectorSpec
from .weight_sequences import WeightSequence, check_dc

__all__ = [
    "KernelParams",
    "BoundFit",
    "constants",
    "g_complex",
    "kernel_e",
    "log_kernel_e",
    "g_real",
    "g_real_derivative",
    "g_real_monotonicity_probe",
    "sector_bound_fit",
    "sandwich_fit",
    "flatness_fit",
]

SAFETY = 1.05


def constants(tau: float, sigma: float) -> tuple[float, float]:
    """``a = ((s-1)/(tau s))^(1/(s-1))`` and ``b = e^((s-1)/s) (s-1)/(tau s)``."""
    if not tau > 0:
        raise ParamError(f"tau must be positive, got {tau}")
    if not sigma > 1:
        raise ParamError(f"sigma must exceed 1, got {sigma}")
    q = (sigma - 1.0) / (tau * sigma)
    return q ** (1.0 / (sigma - 1.0)), math.exp((sigma - 1.0) / sigma) * q


@dataclass(frozen=True)
class KernelParams:
    """``(tau, sigma)`` with the derived constants always recomputed on access."""

    tau: float
    sigma: float

    def __post_init__(self):
        constants(self.tau, self.sigma)

    @property
    def a(self) -> float:
        return constants(self.tau, self.sigma)[0]

    @property
    def b(self) -> float:
        return constants(self.tau, self.sigma)[1]

    @property
    def certified(self) -> bool:
        """Whether the two-sided moment and flatness bounds apply (1 < sigma < 2)."""
        return 1.0 < self.sigma < 2.0


def _log1p(z: np.ndarray) -> np.ndarray:
    # Kahan's trick: exact for the rounding committed in forming 1 + z.
    u = 1.0 + z
    d = u - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(u) * (z / d)
    return np.where(d == 0.0, z, out)


def _g_of_log(L: np.ndarray, params: KernelParams) -> np.ndarray:
    # g as a function of L = Log(x); L must avoid (-inf, 0].
    s = params.sigma
    w = w_principal(params.b * L)
    return np.exp(s / (s - 1.0) * np.log(L) - np.log(w) / (s - 1.0))


def _as_complex(z):
    scalar = np.ndim(z) == 0
    return scalar, np.atleast_1d(np.asarray(z, dtype=complex))


def g_complex(params: KernelParams, z):
    """``g(z)``; needs ``z`` off ``(-inf, 1]`` on the real axis."""
    scalar, za = _as_complex(z)
    if np.any((za.imag == 0.0) & (za.real <= 1.0)):
        raise DomainError("g needs z outside (-inf, 1] (Log z and b Log z must avoid the cut)")
    out = _g_of_log(np.log(za), params)
    return complex(out[0]) if scalar else out


def log_kernel_e(params: KernelParams, z):
    """Principal ``log e(z) = Log z - a g(z+1)``; finite where ``e`` underflows."""
    scalar, za = _as_complex(z)
    if np.any((za.imag == 0.0) & (za.real <= 0.0)):
        raise DomainError("the kernel is defined on C minus (-inf, 0]")
    out = np.log(za) - params.a * _g_of_log(_log1p(za), params)
    return complex(out[0]) if scalar else out


def kernel_e(params: KernelParams, z):
    """``e(z) = z exp(-a g(z+1))``, holomorphic on C minus ``(-inf, 0]``."""
    scalar, za = _as_complex(z)
    if np.any((za.imag == 0.0) & (za.real <= 0.0)):
        raise DomainError("the kernel is defined on C minus (-inf, 0]")
    out = za * np.exp(-params.a * _g_of_log(_log1p(za), params))
    return complex(out[0]) if scalar else out


def _real_log1p_or_log(x: np.ndarray, shifted: bool) -> np.ndarray:
    return np.log1p(x) if shifted else np.log(x)


def g_real(params: KernelParams, x, shifted: bool = False):
    """``g`` on ``(1, inf)`` in real arithmetic; ``shifted=True`` gives ``g(x+1)`` for ``x > 0``."""
    xa = np.asarray(x, dtype=float)
    L = _real_log1p_or_log(xa, shifted)
    if np.any(~(L > 0)):
        raise DomainError("g_real needs x > 1 (or x > 0 when shifted)")
    s = params.sigma
    w = w_principal(params.b * L).real
    out = np.exp(s / (s - 1.0) * np.log(L) - np.log(w) / (s - 1.0))
    return float(out) if out.ndim == 0 else out


def g_real_derivative(params: KernelParams, x):
    """Closed form ``g'(x) = W^{-1/(s-1)} ln^{1/(s-1)}(x) (s - 1/(W+1)) / ((s-1) x)``.

    ``W`` is evaluated at ``b ln x``.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 1.0)):
        raise DomainError("g' is evaluated on (1, inf)")
    s = params.sigma
    L = np.log(xa)
    w = w_principal(params.b * L).real
    out = np.exp((np.log(L) - np.log(w)) / (s - 1.0)) * (s - 1.0 / (w + 1.0)) / ((s - 1.0) * xa)
    return float(out) if out.ndim == 0 else out


def g_real_monotonicity_probe(params: KernelParams, x_grid):
    """``(min g' over the grid, g' at the last grid point)``."""
    x = np.asarray(x_grid, dtype=float)
    d = g_real_derivative(params, x)
    return float(np.min(d)), float(d[-1])


# -- bound fits -------------------------------------------------------------

@dataclass
class BoundFit:
    """Fitted constants of a two-sided bound, with the grid they certify.

    ``max_residual`` is the largest value of ``log(lhs) - log(rhs)`` over the
    grid for the fitted inequalities; it is ``<= 0`` up to rounding.
    """

    kind: str
    constants: dict
    grid: dict
    max_residual: float
    params: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"


def _check_sector(sector: SectorSpec) -> None:
    if not sector.opening_delta < 2.0:
        raise ParamError("bounds are only claimed on proper subsectors (delta < 2)")
    if not (sector.r_min > 0 and math.isfinite(sector.r_max)):
        raise ParamError("fit grids need 0 < r_min < r_max < inf")


def _extremal(log_ratio: np.ndarray, which: str, name: str) -> float:
    if not np.all(np.isfinite(log_ratio)):
        raise FitError(f"non-finite ratio while fitting {name}")
    value = float(np.max(log_ratio) if which == "max" else np.min(log_ratio))
    C = math.exp(value)
    if not (0.0 < C < math.inf):
        raise FitError(f"{name} = {C} does not certify the grid")
    return value


def _lower_K(sector: SectorSpec) -> float:
    return SAFETY * math.exp(math.pi * sector.opening_delta / 2.0)


def _upper_H(params: KernelParams) -> float:
    return SAFETY * math.exp(1.0 / params.b)


def sector_bound_fit(params: KernelParams, sector: SectorSpec, n_radii: int = 200,
                     n_angles: int = 65) -> BoundFit:
    """Fit ``C1 e(K1|z|) <= |e(z)| <= C2 e(K2|z|)`` on a sector grid.

    ``K1 = 1.05 e^{pi delta/2}``: comparing with a larger radius bounds
    ``|e|`` from below. ``K2 = 1/H`` with ``H = 1.05 e^{1/b}`` bounds it from
    above. ``C1``, ``C2`` are the extremal ratios over the grid.
    """
    _check_sector(sector)
    z = sector.grid(n_radii, n_angles).ravel()
    r = np.abs(z)
    log_abs_e = log_kernel_e(params, z).real
    K1 = _lower_K(sector)
    K2 = 1.0 / _upper_H(params)
    upper = log_abs_e - log_kernel_e(params, K2 * r).real
    lower = log_abs_e - log_kernel_e(params, K1 * r).real
    logC2 = _extremal(upper, "max", "C2")
    logC1 = _extremal(lower, "min", "C1")
    residual = max(float(np.max(upper - logC2)), float(np.max(logC1 - lower)))
    return BoundFit(
        kind="sector",
        constants={"C1": math.exp(logC1), "K1": K1, "C2": math.exp(logC2), "K2": K2},
        grid=sector.describe(n_radii, n_angles),
        max_residual=residual,
        params={"tau": params.tau, "sigma": params.sigma},
    )


def sandwich_fit(params: KernelParams, x_grid=None, seq: WeightSequence | None = None) -> BoundFit:
    """Fit ``A exp(a g(x)) <= exp(T(x)) <= A~ exp(a g(x))`` on points of ``(1, inf)``.

    Defaults to 500 log-spaced points of ``(1, 1e6)``. ``argmin_x`` records
    where the lower constant is attained; a minimum sitting at the right end
    of the grid means the interval is not yet fixed.
    """
    if x_grid is None:
        x_grid = np.geomspace(1.0, 1e6, 501)[1:]
    x = np.asarray(x_grid, dtype=float)
    seq = seq or WeightSequence(params.tau, params.sigma)
    log_ratio = seq.associated_T(x) - params.a * g_real(params, x)
    if not np.all(np.isfinite(log_ratio)):
        raise FitError("non-finite ratio while fitting A, A~")
    lo, hi = float(np.min(log_ratio)), float(np.max(log_ratio))
    # A can underflow a double (the ratio drifts to 0), so the logs are primary.
    return BoundFit(
        kind="sandwich",
        constants={"A": math.exp(lo), "A_tilde": math.exp(hi), "log_A": lo,
                   "log_A_tilde": hi, "argmin_x": float(x[np.argmin(log_ratio)])},
        grid={"x_min": float(x.min()), "x_max": float(x.max()), "n": int(x.size),
              "spacing": "log-uniform"},
        max_residual=0.0,
        params={"tau": params.tau, "sigma": params.sigma},
    )


def flatness_fit(params: KernelParams, sector: SectorSpec, n_radii: int = 200,
                 n_angles: int = 65, seq: WeightSequence | None = None,
                 dc_horizon: int = 200) -> BoundFit:
    """Fit ``C3 exp(-T(|z|/K3)) <= |e(z)| <= C4 exp(-T(|z|/K4))`` on a sector grid.

    The K's are chained from the sector fit: ``K4 = max(1, D) H`` with ``D``
    the derivation-closedness constant at ``dc_horizon`` and ``H`` the upper
    sector constant, ``K3 = 1/K1`` with ``K1`` the lower one. Only for
    ``1 < sigma < 2``.
    The lower constant ``C3`` necessarily scales like ``r_min`` since the kernel
    vanishes at the origin while ``T`` does not.
    """
    if not params.certified:
        raise ParamError("flatness bounds need 1 < sigma < 2")
    _check_sector(sector)
    seq = seq or WeightSequence(params.tau, params.sigma)
    D = check_dc(seq.log_values(dc_horizon))["D"]
    K4 = max(1.0, D) * _upper_H(params)
    K3 = 1.0 / _lower_K(sector)
    z = sector.grid(n_radii, n_angles).ravel()
    r = np.abs(z)
    log_abs_e = log_kernel_e(params, z).real
    upper = log_abs_e + seq.associated_T(r / K4)
    lower = log_abs_e + seq.associated_T(r / K3)
    logC4 = _extremal(upper, "max", "C4")
    logC3 = _extremal(lower, "min", "C3")
    residual = max(float(np.max(upper - logC4)), float(np.max(logC3 - lower)))
    return BoundFit(
        kind="flatness",
        constants={"C3": math.exp(logC3), "K3": K3, "C4": math.exp(logC4), "K4": K4,
                   "dc_constant": D},
        grid=sector.describe(n_radii, n_angles),
        max_residual=residual,
        params={"tau": params.tau, "sigma": params.sigma},
    )
