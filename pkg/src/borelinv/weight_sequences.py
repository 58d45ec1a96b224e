"""The rapid-growth sequences ``M_p = p**(tau * p**sigma)`` and finite-horizon checks.

Everything is kept in natural-log scale: ``M_p`` already overflows a double
near ``p = 25`` for ``tau = 1, sigma = 2``.  The checkers accept any positive
sequence given by its logs and return evidence at an explicit horizon; they
never claim anything about the infinite sequence.
"""
from __future__ import annotations

import json
import math
import threading

import numpy as np

from .errors import ParamError

__all__ = [
    "WeightSequence",
    "check_lc",
    "check_dc",
    "check_mg_witness",
    "gamma_index_estimate",
    "sequence_report",
]

# Consecutive decreasing terms required before the sup/inf scan may stop.
_DECREASING_RUN = 20


class WeightSequence:
    """``M^{tau,sigma}`` with a memoized, append-only table of ``log M_p``.

    Parameters
    ----------
    tau : float
        Positive scale of the exponent.
    sigma : float
        Growth exponent, ``sigma > 1``.
    horizon : int
        Indices ``0..horizon`` are tabulated eagerly; later requests extend
        the table under a lock.
    """

    def __init__(self, tau: float, sigma: float, horizon: int = 200):
        if not tau > 0:
            raise ParamError(f"tau must be positive, got {tau}")
        if not sigma > 1:
            raise ParamError(f"sigma must exceed 1, got {sigma}")
        self.tau = float(tau)
        self.sigma = float(sigma)
        self._lock = threading.Lock()
        self._log_values = np.zeros(0)
        self._extend(int(horizon))

    def __repr__(self):
        return f"WeightSequence(tau={self.tau!r}, sigma={self.sigma!r}, horizon={self.horizon})"

    @property
    def horizon(self) -> int:
        return len(self._log_values) - 1

    def _formula(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.tau * p ** self.sigma * np.log(p)
        return np.where(p <= 1, 0.0, out)

    def _extend(self, horizon: int) -> None:
        with self._lock:
            n = len(self._log_values)
            if horizon < n:
                return
            new = self._formula(np.arange(n, horizon + 1))
            table = np.concatenate([self._log_values, new])
            table.setflags(write=False)
            self._log_values = table

    def log_m(self, p):
        """``log M_p``; 0 for ``p`` in {0, 1}."""
        p_arr = np.asarray(p)
        if np.any(p_arr < 0):
            raise ParamError("index p must be nonnegative")
        top = int(np.max(p_arr)) if p_arr.size else 0
        if top > self.horizon:
            self._extend(max(top, 2 * self.horizon))
        out = self._log_values[p_arr.astype(int)]
        return float(out) if out.ndim == 0 else out

    def log_values(self, horizon: int | None = None) -> np.ndarray:
        """Read-only view of ``log M_0 .. log M_horizon``."""
        horizon = self.horizon if horizon is None else int(horizon)
        if horizon > self.horizon:
            self._extend(horizon)
        return self._log_values[: horizon + 1]

    # -- associated and auxiliary functions ---------------------------------

    def _term(self, p: np.ndarray, log_t, log_h: float) -> np.ndarray:
        # per-index term of the sup: p**sigma ln h + p ln t - log M_p
        return p ** self.sigma * log_h + np.multiply.outer(log_t, p) - self._formula(p)

    def _cutoff(self, log_t_max: float, log_h: float) -> int:
        """Index past which every term is certified to decrease.

        The p-derivative of the term is ``ln t + p^{s-1}(s ln h - tau(s ln p + 1))``.
        Its own derivative is negative once ``tau ln p > ln h``; from then on a
        negative slope can never turn positive again.
        """
        s, tau = self.sigma, self.tau
        p_concave = max(2, math.ceil(math.exp(max(log_h, 0.0) / tau)) + 1)
        p = p_concave
        while True:
            slope = log_t_max + p ** (s - 1) * (s * log_h - tau * (s * math.log(p) + 1.0))
            if slope < 0:
                return p + _DECREASING_RUN
            p *= 2

    def associated_T(self, t, h: float = 1.0):
        """``T_{tau,sigma,h}(t) = sup_{p>=1} ln+(h^{p^sigma} t^p / M_p)``; ``T(0) = 0``."""
        if not h > 0:
            raise ParamError(f"h must be positive, got {h}")
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0) or np.any(np.isnan(t_arr)):
            raise ParamError("associated_T needs t >= 0")
        out = np.zeros(t_arr.shape)
        pos = t_arr > 0
        if np.any(pos):
            log_t = np.log(t_arr[pos])
            log_h = math.log(h)
            p_max = self._cutoff(float(np.max(log_t)), log_h)
            p = np.arange(1, p_max + 1, dtype=float)
            best = np.max(self._term(p, log_t, log_h), axis=-1)
            out[pos] = np.maximum(best, 0.0)
        return float(out) if out.ndim == 0 else out

    def auxiliary_h(self, t):
        """``h(t) = exp(-T(1/t)) = inf_{p>=0} M_p t^p``; ``h(0) = 0``."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0):
            raise ParamError("auxiliary_h needs t >= 0")
        out = np.zeros(t_arr.shape)
        pos = t_arr > 0
        if np.any(pos):
            out[pos] = np.exp(-self.associated_T(1.0 / t_arr[pos]))
        return float(out) if out.ndim == 0 else out


# -- finite-horizon property checkers ---------------------------------------

def _as_log_sequence(log_values, horizon) -> np.ndarray:
    seq = np.asarray(log_values, dtype=float)
    if seq.ndim != 1 or seq.size == 0:
        raise ParamError("need a nonempty 1-d sequence of log-values")
    if not np.all(np.isfinite(seq)):
        raise ParamError("log-values must be finite (all M_p > 0)")
    if seq[0] != 0.0:
        raise ParamError(f"need M_0 = 1 (log-value 0), got log M_0 = {seq[0]}")
    if horizon is not None:
        if horizon + 1 > seq.size:
            raise ParamError(f"horizon {horizon} exceeds the {seq.size} values supplied")
        seq = seq[: horizon + 1]
    return seq


def check_lc(log_values, horizon=None, rtol: float = 1e-12):
    """Log-convexity ``M_p^2 <= M_{p-1} M_{p+1}`` up to ``horizon``.

    Returns ``(ok, first_violation)`` where ``first_violation`` is the
    smallest failing ``p`` or ``None``.
    """
    L = _as_log_sequence(log_values, horizon)
    if L.size < 3:
        return True, None
    second = L[:-2] + L[2:] - 2.0 * L[1:-1]
    slack = rtol * np.maximum(1.0, np.abs(L[1:-1]))
    bad = np.flatnonzero(second < -slack)
    if bad.size:
        return False, int(bad[0] + 1)
    return True, None


def check_dc(log_values, horizon=None) -> dict:
    """Smallest ``D`` with ``M_{p+1} <= D^{p+1} M_p`` for ``p < horizon``.

    Returns ``{"D", "log_D", "argmax", "log_profile"}``; the profile holds
    ``log (M_{p+1}/M_p)^{1/(p+1)}`` per ``p`` so stabilization (or its
    absence) is visible. ``D`` is ``inf`` when it overflows a double.
    """
    L = _as_log_sequence(log_values, horizon)
    if L.size < 2:
        raise ParamError("check_dc needs at least two values")
    p = np.arange(L.size - 1)
    log_ratio = (L[1:] - L[:-1]) / (p + 1)
    k = int(np.argmax(log_ratio))
    with np.errstate(over="ignore"):
        D = float(np.exp(log_ratio[k]))
    return {"D": D, "log_D": float(log_ratio[k]), "argmax": k, "log_profile": log_ratio}


def check_mg_witness(log_values, horizon=None) -> np.ndarray:
    """``log max_{p+q=n} (M_{p+q}/(M_p M_q))^{1/n}`` for ``n = 1..horizon``.

    Moderate growth holds iff this stays bounded; a profile increasing
    without bound is the observable failure. Log scale, since the ratio
    itself overflows for ``sigma >= 2`` at modest horizons.
    """
    L = _as_log_sequence(log_values, horizon)
    n_top = L.size - 1
    out = np.empty(n_top)
    for n in range(1, n_top + 1):
        p = np.arange(0, n + 1)
        out[n - 1] = np.max(L[n] - L[p] - L[n - p]) / n
    return out


def gamma_index_estimate(log_values, gamma_grid, horizon=None) -> dict:
    """Almost-increasing defect of ``c_p = M_{p+1} / (M_p (p+1)^gamma)``.

    For each ``gamma`` returns ``max_{p <= q <= horizon} c_p / c_q`` (1 when the
    sequence is increasing). Needs ``log M_0 .. log M_{horizon+1}``.
    """
    L = _as_log_sequence(log_values, None)
    if horizon is None:
        horizon = L.size - 2
    if horizon + 2 > L.size:
        raise ParamError(f"horizon {horizon} needs {horizon + 2} values, got {L.size}")
    p = np.arange(horizon + 1)
    log_quot = L[1 : horizon + 2] - L[: horizon + 1]
    result = {}
    for gamma in np.atleast_1d(gamma_grid):
        c = log_quot - gamma * np.log(p + 1.0)
        suffix_min = np.minimum.accumulate(c[::-1])[::-1]
        result[float(gamma)] = float(np.exp(np.max(c - suffix_min)))
    return result


def sequence_report(seq: WeightSequence, horizon: int = 50,
                    gamma_grid=(1.0, 2.0, 4.0, 8.0)) -> dict:
    """JSON-ready summary ``{"tau", "sigma", "horizon", "checks": {...}}``."""
    L = seq.log_values(horizon + 1)
    lc_ok, lc_bad = check_lc(L, horizon)
    dc = check_dc(L, horizon)
    mg = check_mg_witness(L, horizon)
    checks = {
        "lc": {"holds": lc_ok, "first_violation": lc_bad},
        "dc": {"log_D": dc["log_D"], "argmax": dc["argmax"]},
        "mg_witness": {"log_max": float(mg.max()), "log_last": float(mg[-1])},
        "gamma_defect": {repr(k): v for k, v in gamma_index_estimate(L, gamma_grid, horizon).items()},
    }
    return {"tau": seq.tau, "sigma": seq.sigma, "horizon": horizon, "checks": checks}


def dumps_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
