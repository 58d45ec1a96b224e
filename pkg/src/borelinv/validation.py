"""Input checks shared by the estimator, the series loader and the CLI."""
from __future__ import annotations

import numpy as np

from .errors import DomainError, ParamError


def check_tau_sigma(tau, sigma, certified: bool = False) -> tuple[float, float]:
    tau, sigma = float(tau), float(sigma)
    if not (np.isfinite(tau) and tau > 0):
        raise ParamError(f"tau must be a positive finite number, got {tau}")
    if not (np.isfinite(sigma) and sigma > 1):
        raise ParamError(f"sigma must exceed 1, got {sigma}")
    if certified and not sigma < 2:
        raise ParamError(f"this operation needs 1 < sigma < 2, got sigma={sigma}")
    return tau, sigma


def check_coefficients(coefficients) -> np.ndarray:
    """1-d finite complex array; accepts complex numbers or ``[re, im]`` pairs."""
    arr = np.asarray(coefficients)
    if arr.ndim == 2 and arr.shape[1] == 2 and not np.iscomplexobj(arr):
        arr = arr[:, 0] + 1j * arr[:, 1]
    arr = np.asarray(arr, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise ParamError("coefficients must be a nonempty 1-d sequence")
    if not np.all(np.isfinite(arr)):
        raise ParamError("coefficients must be finite")
    return arr


def check_points_off_cut(z) -> np.ndarray:
    """Complex array of evaluation points, none on ``(-inf, 0]``."""
    za = np.atleast_1d(np.asarray(z, dtype=complex))
    if not np.all(np.isfinite(za)):
        raise DomainError("evaluation points must be finite")
    if np.any((za.imag == 0.0) & (za.real <= 0.0)):
        raise DomainError("evaluation points must avoid the cut (-inf, 0]")
    return za
