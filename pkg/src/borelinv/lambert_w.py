"""Principal branch W of the Lambert function, ``W(z) exp(W(z)) = z``.

Evaluation follows the usual recipe: a regime-dependent seed (Maclaurin
series near 0, branch-point series near -1/e, asymptotic logs for large
``|z|``, a log1p-based seed in between) polished by Halley steps.  Arrays
are handled elementwise with numpy; :func:`w_principal_mp` is the same
iteration in mpmath arithmetic for the high-precision paths.

The cut ``(-inf, -1/e]`` is closed on the real axis: real inputs there raise
:class:`BranchCutError`, while complex inputs next to it follow the side
given by the sign of the imaginary part.
"""
from __future__ import annotations

import math

import mpmath
import numpy as np

from .errors import BranchCutError, ConvergenceError
from .sectors import SectorSpec

__all__ = [
    "w_principal",
    "w_principal_mp",
    "w_derivative",
    "reconstruct_from_w",
    "in_principal_image",
    "image_region_predicate",
    "slow_variation_probe",
]

INV_E = math.exp(-1.0)
HALLEY_RTOL = 1e-14
HALLEY_BUDGET = 50
_EPS = np.finfo(float).eps


def _check_cut(z: np.ndarray) -> None:
    on_cut = (z.imag == 0.0) & (z.real <= -INV_E)
    if np.any(on_cut):
        bad = z[on_cut].real
        raise BranchCutError(
            f"W is not defined on the real half-line (-inf, -1/e]; got {bad[:5].tolist()}"
        )


def _seed(z: np.ndarray) -> np.ndarray:
    w = np.empty_like(z)
    az = np.abs(z)
    near_branch = np.abs(z + INV_E) < 0.3
    small = (az < 0.3) & ~near_branch
    # Close to the cut the log1p seed falls into a neighbouring branch's
    # basin; the asymptotic seed stays on W_0 there.
    large = ((az > 3.0) | (np.abs(np.angle(z)) > 2.5)) & ~near_branch & ~small
    middle = ~(near_branch | small | large)

    if near_branch.any():
        p = np.sqrt(2.0 * (math.e * z[near_branch] + 1.0))
        w[near_branch] = -1.0 + p - p * p / 3.0 + (11.0 / 72.0) * p ** 3
    if small.any():
        zs = z[small]
        w[small] = zs - zs * zs + 1.5 * zs ** 3
    if large.any():
        l1 = np.log(z[large])
        l2 = np.log(l1)
        w[large] = l1 - l2 + l2 / l1
    if middle.any():
        lp = np.log1p(z[middle])
        w[middle] = lp * (1.0 - np.log1p(lp) / (2.0 + lp))
    return w


def _halley(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    # Iterate on r = w - z*exp(-w); avoids overflow of exp(w) for large |z|.
    active = np.ones(z.shape, dtype=bool)
    for _ in range(HALLEY_BUDGET):
        if not active.any():
            break
        wa = w[active]
        za = z[active]
        r = wa - za * np.exp(-wa)
        w1 = wa + 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            dw = r / (w1 - (wa + 2.0) * r / (2.0 * w1))
        dw = np.where(np.isfinite(dw), dw, 0.0)
        wa = wa - dw
        w[active] = wa
        residual = np.abs(wa * np.exp(wa) - za)
        done = (np.abs(dw) <= HALLEY_RTOL * np.abs(wa)) | (residual <= 4.0 * _EPS * np.abs(za))
        idx = np.flatnonzero(active)
        active[idx[done]] = False
    if active.any():
        za = z[active]
        wa = w[active]
        residual = np.abs(wa * np.exp(wa) - za)
        if np.any(~(residual <= 1e-13 * (1.0 + np.abs(za)))):
            raise ConvergenceError(
                f"Halley iteration for W did not converge at z={za[:3].tolist()}"
            )
    return w


def w_principal(z):
    """Principal Lambert W at ``z`` (scalar or array-like).

    Returns a complex scalar for scalar input and a complex ndarray otherwise.
    """
    scalar = np.ndim(z) == 0
    za = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_cut(za)
    flat = za.ravel()
    w = _halley(flat, _seed(flat))
    w = w.reshape(za.shape)
    return complex(w[0]) if scalar else w


def w_derivative(z):
    """``W'(z) = exp(-W(z)) / (1 + W(z))``."""
    w = w_principal(z)
    return np.exp(-w) / (1.0 + w)


def w_principal_mp(z, seed=None):
    """Principal W in mpmath arithmetic at the current ``mpmath.mp.dps``.

    Same seed regimes and Halley step as :func:`w_principal`; the stopping
    rule tracks the working precision. A ``seed`` (typically the double
    precision value) skips the regime choice and saves most iterations.
    """
    z = mpmath.mpmathify(z)
    if mpmath.im(z) == 0 and mpmath.re(z) <= -mpmath.exp(-1):
        raise BranchCutError(f"W is not defined on (-inf, -1/e]; got {z}")
    if z == 0:
        return mpmath.mpc(0)
    z = mpmath.mpc(z)
    zc = complex(z)
    if seed is not None:
        w = mpmath.mpc(seed)
    elif abs(zc + INV_E) < 0.3:
        p = mpmath.sqrt(2 * (mpmath.e * z + 1))
        w = -1 + p - p ** 2 / 3 + mpmath.mpf(11) / 72 * p ** 3
    elif abs(zc) < 0.3:
        w = z - z ** 2 + mpmath.mpf(3) / 2 * z ** 3
    elif abs(zc) > 3.0 or abs(np.angle(zc)) > 2.5:
        l1 = mpmath.log(z)
        l2 = mpmath.log(l1)
        w = l1 - l2 + l2 / l1
    else:
        lp = mpmath.log(1 + z)
        w = lp * (1 - mpmath.log(1 + lp) / (2 + lp))
    tol = mpmath.mpf(10) ** (-mpmath.mp.dps + 3)
    for _ in range(HALLEY_BUDGET + mpmath.mp.dps // 10):
        r = w - z * mpmath.exp(-w)
        w1 = w + 1
        dw = r / (w1 - (w + 2) * r / (2 * w1))
        w -= dw
        if abs(dw) <= tol * abs(w):
            return w
    raise ConvergenceError(f"mp Halley iteration for W did not converge at z={z}")


def reconstruct_from_w(w):
    """Rebuild ``z`` from ``W(z) = beta1 + i*beta2`` by splitting the defining identity.

    ``Re z = e^{b1}(b1 cos b2 - b2 sin b2)``, ``Im z = e^{b1}(b2 cos b2 + b1 sin b2)``.
    """
    w = np.asarray(w, dtype=complex)
    b1, b2 = w.real, w.imag
    scale = np.exp(b1)
    re = scale * (b1 * np.cos(b2) - b2 * np.sin(b2))
    im = scale * (b2 * np.cos(b2) + b1 * np.sin(b2))
    return re + 1j * im


def in_principal_image(w) -> np.ndarray:
    """True where ``w`` lies in ``W(C minus the cut)``.

    The region is bounded by ``{-t cot t + i t : -pi < t < pi}``; on the real
    line it is ``w > -1``.
    """
    w = np.asarray(w, dtype=complex)
    xi, eta = w.real, w.imag
    inside = np.abs(eta) < math.pi
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = np.where(eta == 0.0, -1.0, -eta / np.tan(eta))
    return inside & (xi > bound)


def image_region_predicate(w, R: float):
    """``exp(Re w) * |w| >= R``; the image of ``L_{R,alpha}`` under W lies in this set."""
    w = np.asarray(w, dtype=complex)
    out = np.exp(w.real) * np.abs(w) >= R
    return bool(out) if out.ndim == 0 else out


def slow_variation_probe(sector: SectorSpec, n_radii: int = 200, n_angles: int = 65,
                         r_cap: float | None = None) -> float:
    """Grid maximum of ``|z W'(z) / W(z)| = |1 / (1 + W(z))|`` over the sector."""
    if sector.r_min <= 0.0:
        raise ValueError("slow_variation_probe needs r_min > 0")
    if r_cap is None:
        r_cap = sector.r_min * 1e6
    z = sector.grid(n_radii, n_angles, r_cap=r_cap)
    w = w_principal(z.ravel())
    return float(np.max(np.abs(1.0 / (1.0 + w))))
