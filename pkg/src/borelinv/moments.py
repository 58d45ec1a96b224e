"""Moments ``m(p) = int_0^inf t^p exp(-a g(t+1)) dt`` of the kernel, in log space.

After ``t = e^u`` the log-integrand is

    psi(u) = (p+1) u - a g(e^u + 1),

which is concave: ``a g'(x) (x-1)`` is a product of increasing positive
factors.  So the peak is the unique zero of ``psi'``, and both tails beyond
the quadrature window are bounded by the tangent line at the window edge
(on the left, even more simply, by dropping the ``-a g`` term).
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ParamError, QuadratureError
from .errors import MomentTableGap
from .kernel import KernelParams, _g_of_log
from .lambert_w import w_principal
from .quadrature import QuadratureConfig, gauss_kronrod
from .weight_sequences import WeightSequence

__all__ = [
    "moment",
    "moment_crosscheck",
    "MomentTable",
    "MomentBoundFit",
    "moment_bound_fit",
    "monotone_tail",
]

_LN10 = math.log(10.0)


def _psi(params: KernelParams, p: int, u: np.ndarray) -> np.ndarray:
    # L = ln(e^u + 1) without overflow for large u or loss for very negative u.
    L = np.logaddexp(0.0, u)
    return (p + 1) * u - params.a * _g_of_log(L, params).real


def _dpsi(params: KernelParams, p: float, u: float) -> float:
    # psi'(u) = (p+1) - a g'(x) (x - 1) with x = e^u + 1, g' in closed form.
    s = params.sigma
    L = float(np.logaddexp(0.0, u))
    W = w_principal(params.b * L).real
    # (x - 1)/x = e^u/(e^u + 1) = exp(u - L)
    gx = math.exp((math.log(L) - math.log(W)) / (s - 1.0)) * (s - 1.0 / (W + 1.0)) / (s - 1.0)
    return (p + 1) - params.a * gx * math.exp(u - L)


def _peak(params: KernelParams, p: int) -> float:
    """Zero of ``psi'`` by bisection; ``psi'`` decreases from ``p+1`` to ``-inf``."""
    lo, hi = -1.0, 1.0
    while _dpsi(params, p, lo) <= 0.0:
        lo *= 2.0
    while _dpsi(params, p, hi) >= 0.0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _dpsi(params, p, mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


def _window_edge(params, p, u_peak, psi_peak, drop, direction) -> float:
    step = 1.0
    while True:
        u = u_peak + direction * step
        if _psi(params, p, np.array([u]))[0] - psi_peak < -drop:
            return u
        step *= 2.0
        if step > 1e6:
            raise QuadratureError("log-integrand does not fall off; is sigma > 1?")


def moment(params: KernelParams, p: int, config: QuadratureConfig = QuadratureConfig()):
    """``(log m(p), relative error estimate)``.

    The error estimate adds the Gauss-Kronrod discrepancy to both certified
    tail bounds; since it is relative it is also an absolute error in ``log m``.
    """
    if p < 0 or int(p) != p:
        raise ParamError(f"moment index must be a nonnegative integer, got {p}")
    p = int(p)
    u_peak = _peak(params, p)
    psi_peak = float(_psi(params, p, np.array([u_peak]))[0])
    drop = config.tail_decades * _LN10
    u_lo = _window_edge(params, p, u_peak, psi_peak, drop, -1.0)
    u_hi = _window_edge(params, p, u_peak, psi_peak, drop, +1.0)

    def f(u):
        return np.exp(_psi(params, p, u) - psi_peak)

    breaks = u_peak + np.array([-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0])
    value, err = gauss_kronrod(f, u_lo, u_hi, config, breakpoints=breaks)
    value = float(value.real) if np.iscomplexobj(value) else float(value)

    # Left: psi(u) <= (p+1) u since g >= 0. Right: tangent line of a concave psi.
    left_tail = math.exp((p + 1) * u_lo - psi_peak) / (p + 1)
    slope = _dpsi(params, p, u_hi)
    if not slope < 0.0:
        raise QuadratureError("right window edge is not past the peak")
    right_tail = math.exp(_psi(params, p, np.array([u_hi]))[0] - psi_peak) / (-slope)
    rel_err = (float(err) + left_tail + right_tail) / value
    if rel_err > config.rel_tol:
        raise QuadratureError(f"moment p={p}: relative error {rel_err:.3g} above {config.rel_tol:.3g}")
    return psi_peak + math.log(value), rel_err


def moment_crosscheck(params: KernelParams, p: int, rel_tol: float = 1e-12) -> float:
    """``log m(p)`` by an independent route, for cross-checks only.

    Integrates in ``t`` itself with QUADPACK and the Lambert W of scipy; the
    peak is located by Brent's method. Shares no code with :func:`moment`.
    """
    from scipy.integrate import quad
    from scipy.optimize import minimize_scalar
    from scipy.special import lambertw

    a, b, s = params.a, params.b, params.sigma

    def log_integrand(t):
        L = math.log1p(t)
        W = lambertw(b * L).real
        return p * math.log(t) - a * L ** (s / (s - 1.0)) * W ** (-1.0 / (s - 1.0))

    # Scale by the peak of t * integrand (the integrand itself peaks at 0 when p = 0).
    res = minimize_scalar(lambda v: -(v + log_integrand(math.exp(v))), bounds=(-30.0, 300.0),
                          method="bounded", options={"xatol": 1e-10})
    t_peak = math.exp(res.x)
    top = log_integrand(t_peak)

    def scaled(t):
        if t <= 0:
            return 1.0 if p == 0 else 0.0
        return math.exp(max(log_integrand(t) - top, -745.0))

    parts = [(0.0, t_peak)]
    edge = t_peak
    while log_integrand(edge * 2.0) - top > -100.0:
        parts.append((edge, edge * 2.0))
        edge *= 2.0
    # Beyond the last doubling the integrand is below e^-100 of the peak and
    # keeps falling at least geometrically per doubling, so it is dropped.
    total = math.fsum(quad(scaled, lo, hi, epsabs=0.0, epsrel=rel_tol, limit=500)[0]
                      for lo, hi in parts)
    return top + math.log(total)


@dataclass
class MomentTable:
    """``p -> (log m(p), relative error)`` for ``p = 0 .. p_max``."""

    params: KernelParams
    log_m: np.ndarray
    err: np.ndarray
    config: QuadratureConfig = field(default_factory=QuadratureConfig)

    @property
    def p_max(self) -> int:
        return len(self.log_m) - 1

    @classmethod
    def build(cls, params: KernelParams, p_max: int,
              config: QuadratureConfig = QuadratureConfig(), n_jobs: int = 1) -> "MomentTable":
        """Compute all moments up to ``p_max``; rows are assembled in ``p`` order."""
        ps = range(int(p_max) + 1)
        if n_jobs > 1:
            with ThreadPoolExecutor(max_workers=n_jobs) as pool:
                rows = list(pool.map(lambda p: moment(params, p, config), ps))
        else:
            rows = [moment(params, p, config) for p in ps]
        log_m = np.array([r[0] for r in rows])
        err = np.array([r[1] for r in rows])
        return cls(params, log_m, err, config)

    def entry(self, p: int):
        if not 0 <= p <= self.p_max:
            raise MomentTableGap(f"moment table covers p <= {self.p_max}, asked for {p}")
        return float(self.log_m[p]), float(self.err[p])

    def is_log_convex(self) -> bool:
        """``log m(p-1) + log m(p+1) >= 2 log m(p)`` on every interior row."""
        L = self.log_m
        return bool(np.all(L[:-2] + L[2:] - 2.0 * L[1:-1] >= 0.0))

    def r_profile(self, seq: WeightSequence | None = None) -> np.ndarray:
        """``r_p = (log m(p) - log M_p)/p`` for ``p >= 1``."""
        seq = seq or WeightSequence(self.params.tau, self.params.sigma)
        p = np.arange(1, self.p_max + 1)
        return (self.log_m[1:] - seq.log_m(p)) / p

    def rows(self, seq: WeightSequence | None = None):
        r = np.concatenate([[math.nan], self.r_profile(seq)])
        for p in range(self.p_max + 1):
            yield p, float(self.log_m[p]), float(self.err[p]), (None if p == 0 else float(r[p]))

    def to_dict(self) -> dict:
        return {
            "tau": self.params.tau,
            "sigma": self.params.sigma,
            "p_max": self.p_max,
            "quadrature": {"rel_tol": self.config.rel_tol, "abs_tol": self.config.abs_tol,
                           "max_subdivisions": self.config.max_subdivisions,
                           "tail_decades": self.config.tail_decades},
            "entries": [{"p": p, "log_m": lm, "err": e, "r_p": r} for p, lm, e, r in self.rows()],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "log_m", "err", "r_p"])
        for p, lm, e, r in self.rows():
            w.writerow([p, repr(lm), repr(e), "" if r is None else repr(r)])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


@dataclass
class MomentBoundFit:
    B1: float
    B2: float
    log_B1: float
    log_B2: float
    profile: np.ndarray
    log_m0: float

    def spread(self) -> float:
        return self.log_B2 - self.log_B1

    def to_dict(self) -> dict:
        return {"B1": self.B1, "B2": self.B2, "log_B1": self.log_B1, "log_B2": self.log_B2,
                "spread": self.spread(), "log_m0": self.log_m0,
                "profile": [float(v) for v in self.profile]}


def moment_bound_fit(table: MomentTable, seq: WeightSequence | None = None) -> MomentBoundFit:
    """Fit ``B1^p M_p <= m(p) <= B2^p M_p`` over ``1 <= p <= p_max``.

    ``p = 0`` has no p-th root and is reported separately as ``log m(0)``.
    """
    params = table.params
    if not params.certified:
        raise ParamError(
            f"two-sided moment bounds are only claimed for 1 < sigma < 2 (got sigma={params.sigma}); "
            "the sigma >= 2 variant with p^sigma-power constants is out of scope"
        )
    if seq is not None and (seq.tau, seq.sigma) != (params.tau, params.sigma):
        raise ParamError("moment table and weight sequence disagree on (tau, sigma)")
    if table.p_max < 1:
        raise ParamError("need moments up to at least p = 1")
    r = table.r_profile(seq)
    lo, hi = float(r.min()), float(r.max())
    return MomentBoundFit(math.exp(lo), math.exp(hi), lo, hi, r, float(table.log_m[0]))


def monotone_tail(profile, window: int = 20) -> int:
    """+1 / -1 if the last ``window`` entries strictly increase / decrease, else 0."""
    tail = np.diff(np.asarray(profile, dtype=float)[-window:])
    if tail.size and np.all(tail > 0):
        return 1
    if tail.size and np.all(tail < 0):
        return -1
    return 0
