"""Right inverse of the asymptotic Borel map: formal Borel transform, then a
truncated Laplace-like transform with the Lambert-W kernel.

Given ``c_0 .. c_P`` the pipeline is

    gamma_p = c_p / m(p),   G(u) = sum gamma_p u^p,
    f(z) = int_0^R0 e(u/z) G(u) du/u = (1/z) int_0^R0 exp(-a g(1 + u/z)) G(u) du.

:func:`remainder_scan` measures ``|f(z) - sum_{p<N} c_p z^p|`` against the
growth ``(d D1)^N M_N |z|^N`` and :func:`borel_roundtrip` recovers the ``c_p``
from ``f`` alone by Cauchy integrals in multiprecision.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from mpmath.calculus.quadrature import GaussLegendre

from .errors import MomentTableGap, ParamError
from .kernel import KernelParams, _g_of_log, _log1p, sector_bound_fit
from .lambert_w import w_principal, w_principal_mp
from .moments import MomentTable, moment_bound_fit
from .quadrature import QuadratureConfig, gauss_kronrod
from .sectors import SectorSpec
from .validation import check_coefficients, check_points_off_cut, check_tau_sigma
from .weight_sequences import WeightSequence

__all__ = [
    "certify_growth",
    "FormalSeries",
    "BorelSeries",
    "borel_series",
    "ExtensionConfig",
    "Extension",
    "prepare",
    "extend",
    "RemainderReport",
    "remainder_scan",
    "RoundtripReport",
    "borel_roundtrip",
]

_EPS = np.finfo(float).eps


# -- growth certificates ----------------------------------------------------

def _leading_rate(log_abs: np.ndarray, log_w: np.ndarray) -> tuple[float, int | None]:
    """Smallest ``log D`` for which the first nonzero term dominates all others.

    Term ``p`` is weighted as ``|c_p| / (D^p w_p)``; returns ``(log D, p0)``
    with ``p0`` the first nonzero index (``None`` for the zero sequence).
    """
    nz = np.flatnonzero(np.isfinite(log_abs))
    if nz.size == 0:
        return 0.0, None
    p0 = int(nz[0])
    later = nz[nz > p0]
    if later.size == 0:
        return 0.0, p0
    rel = (log_abs[later] - log_w[later]) - (log_abs[p0] - log_w[p0])
    return float(np.max(rel / (later - p0))), p0


def _log_abs(values) -> np.ndarray:
    a = np.abs(np.asarray(values, dtype=complex))
    with np.errstate(divide="ignore"):
        return np.where(a > 0, np.log(a), -np.inf)


def _certificate(log_abs, log_w, D_grid=None) -> tuple[float, float]:
    log_D, p0 = _leading_rate(log_abs, log_w)
    if p0 is None:
        return 0.0, 1.0
    if D_grid is not None:
        grid = np.sort(np.asarray(D_grid, dtype=float))
        if grid.size == 0 or np.any(grid <= 0):
            raise ParamError("D_grid must hold positive values")
        ok = grid[np.log(grid) >= log_D - 1e-12]
        log_D = float(np.log(ok[0] if ok.size else grid[-1]))
    p = np.arange(log_abs.size)
    with np.errstate(invalid="ignore"):
        terms = log_abs - p * log_D - log_w
    log_C = float(np.max(terms[np.isfinite(terms)]))
    lim = math.log(np.finfo(float).max)
    if not (abs(log_C) < lim and abs(log_D) < lim):
        raise ParamError("growth constants leave the double range; rescale the coefficients")
    return math.exp(log_C), math.exp(log_D)


def certify_growth(coefficients, seq: WeightSequence, D_grid=None) -> tuple[float, float]:
    """``(C1, D1)`` with ``|c_p| <= C1 D1^p M_p`` for every stored ``p``.

    ``D1`` is the smallest value for which the first nonzero coefficient
    attains ``C(D) = max_p |c_p| / (D^p M_p)``, so ``C1`` is set by that
    coefficient alone; this is invariant under rescaling the series. With
    ``D_grid`` the smallest grid value at or above that rate is used (the
    largest grid value if none is). The zero series gets ``(0, 1)``.
    """
    c = check_coefficients(coefficients)
    log_w = seq.log_m(np.arange(c.size))
    return _certificate(_log_abs(c), np.asarray(log_w, dtype=float), D_grid)


class FormalSeries:
    """Leading segment ``c_0 .. c_P`` of a series in the class of ``M^{tau,sigma}``.

    The growth certificate ``(C1, D1)`` is computed on construction.
    """

    def __init__(self, tau: float, sigma: float, coefficients, D_grid=None):
        self.tau, self.sigma = check_tau_sigma(tau, sigma)
        c = check_coefficients(coefficients).copy()
        c.setflags(write=False)
        self.coefficients = c
        self.weights = WeightSequence(self.tau, self.sigma, horizon=max(c.size, 2))
        self.C1, self.D1 = certify_growth(c, self.weights, D_grid)
        self._check_certificate()

    def _check_certificate(self) -> None:
        if self.C1 == 0.0:
            return
        p = np.arange(self.coefficients.size)
        bound = math.log(self.C1) + p * math.log(self.D1) + self.weights.log_m(p)
        excess = _log_abs(self.coefficients) - bound
        if np.any(excess > 1e-12 * np.maximum(1.0, np.abs(bound))):
            raise ParamError("growth certificate does not cover the coefficients")

    def __len__(self) -> int:
        return self.coefficients.size

    def __repr__(self):
        return (f"FormalSeries(tau={self.tau!r}, sigma={self.sigma!r}, "
                f"terms={len(self)}, C1={self.C1!r}, D1={self.D1!r})")

    @property
    def params(self) -> KernelParams:
        return KernelParams(self.tau, self.sigma)

    def scaled(self, factor: complex) -> "FormalSeries":
        return FormalSeries(self.tau, self.sigma, factor * self.coefficients)

    def to_dict(self) -> dict:
        return {"tau": self.tau, "sigma": self.sigma,
                "coefficients": [[float(v.real), float(v.imag)] for v in self.coefficients]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict, D_grid=None) -> "FormalSeries":
        try:
            return cls(data["tau"], data["sigma"], data["coefficients"], D_grid)
        except KeyError as exc:
            raise ParamError(f"series input is missing the field {exc}") from None

    @classmethod
    def from_json(cls, text: str, D_grid=None) -> "FormalSeries":
        return cls.from_dict(json.loads(text), D_grid)

    @classmethod
    def moment_series(cls, table: MomentTable, p_max: int) -> "FormalSeries":
        """``c_p = m(p)`` for ``p <= p_max``, read from a moment table."""
        if p_max > table.p_max:
            raise MomentTableGap(f"moment table covers p <= {table.p_max}, asked for {p_max}")
        return cls(table.params.tau, table.params.sigma, np.exp(table.log_m[: p_max + 1]))


# -- formal Borel transform -------------------------------------------------

@dataclass
class BorelSeries:
    """``gamma_p = c_p / m(p)`` with measured ``|gamma_p| <= C2 D2^p``."""

    gamma: np.ndarray
    C2: float
    D2: float


def borel_series(series: FormalSeries, table: MomentTable) -> BorelSeries:
    """Divide by the moments; ``(C2, D2)`` use the same leading-term rule as
    :func:`certify_growth` with unit weights."""
    if (table.params.tau, table.params.sigma) != (series.tau, series.sigma):
        raise ParamError("moment table and series disagree on (tau, sigma)")
    P = len(series) - 1
    if P > table.p_max:
        raise MomentTableGap(f"moment table covers p <= {table.p_max}, series needs p <= {P}")
    log_m = table.log_m[: P + 1]
    gamma = series.coefficients * np.exp(-log_m)
    C2, D2 = _certificate(_log_abs(gamma), np.zeros(P + 1))
    return BorelSeries(gamma, C2, D2)


# -- the extension operator -------------------------------------------------

@dataclass(frozen=True)
class ExtensionConfig:
    """``R0`` defaults to ``(1 - epsilon)/D2``; ``borel_truncation`` to the whole series."""

    epsilon: float = 0.5
    R0: float | None = None
    borel_truncation: int | None = None
    quadrature: QuadratureConfig = field(
        default_factory=lambda: QuadratureConfig(rel_tol=1e-13, max_subdivisions=4000))

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ParamError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.R0 is not None and not self.R0 > 0:
            raise ParamError(f"R0 must be positive, got {self.R0}")
        if self.borel_truncation is not None and self.borel_truncation < 0:
            raise ParamError("borel_truncation must be nonnegative")


@dataclass
class Extension:
    """Everything ``f`` depends on, frozen after :func:`prepare`."""

    series: FormalSeries
    table: MomentTable
    borel: BorelSeries
    R0: float
    K: int
    config: ExtensionConfig
    tail_bound: float

    @property
    def params(self) -> KernelParams:
        return self.series.params

    @property
    def gamma(self) -> np.ndarray:
        return self.borel.gamma[: self.K + 1]

    def _integrand(self, z: complex):
        params, gamma = self.params, self.gamma
        a = params.a

        def f(u):
            L = _log1p(u / z)
            kern = np.exp(-a * _g_of_log(L, params))
            return kern * np.polynomial.polynomial.polyval(u, gamma) / z

        return f

    def evaluate(self, z: complex) -> tuple[complex, float]:
        """``(f(z), quadrature error estimate)`` for one point off the cut."""
        z = complex(check_points_off_cut(z)[0])
        r = abs(z)
        k_lo = -6
        k_hi = max(k_lo, math.ceil(math.log2(self.R0 / r)))
        breaks = r * 2.0 ** np.arange(k_lo, k_hi + 1)
        value, err = gauss_kronrod(self._integrand(z), 0.0, self.R0, self.config.quadrature,
                                   breakpoints=breaks[breaks < self.R0])
        return complex(value), float(err)

    def __call__(self, z):
        za = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.array([self.evaluate(v)[0] for v in za.ravel()]).reshape(za.shape)
        return complex(out[0]) if np.ndim(z) == 0 else out


def prepare(series: FormalSeries, config: ExtensionConfig = ExtensionConfig(),
            table: MomentTable | None = None) -> Extension:
    """Fix ``gamma``, ``R0`` and the Borel truncation for ``series``."""
    if not series.params.certified:
        raise ParamError("the extension operator is built for 1 < sigma < 2")
    P = len(series) - 1
    if table is None:
        table = MomentTable.build(series.params, max(P, 1))
    borel = borel_series(series, table)
    limit = (1.0 - config.epsilon) / borel.D2
    R0 = limit if config.R0 is None else config.R0
    if R0 > limit * (1.0 + 1e-12):
        raise ParamError(f"R0 = {R0} exceeds (1 - epsilon)/D2 = {limit}")
    K = P if config.borel_truncation is None else int(config.borel_truncation)
    if K > P:
        raise ParamError(f"borel_truncation {K} exceeds the {P + 1} stored coefficients")
    q = borel.D2 * R0
    # What a continuation of gamma obeying |gamma_p| <= C2 D2^p could add past K on [0, R0].
    tail = borel.C2 * q ** (K + 1) / (1.0 - q)
    return Extension(series, table, borel, R0, K, config, tail)


def extend(series: FormalSeries, config: ExtensionConfig, z, table: MomentTable | None = None):
    """``f(z)`` for one point or an array of points off the cut."""
    return prepare(series, config, table)(z)


# -- remainder certification ------------------------------------------------

def _partial_sums(coefficients: np.ndarray, z: complex, N_max: int):
    """``(S_N, rounding bound)`` for ``N = 0..N_max``, compensated per component."""
    terms = coefficients[:N_max] * z ** np.arange(N_max)
    sums, bounds = [], []
    for N in range(N_max + 1):
        t = terms[:N]
        sums.append(complex(math.fsum(t.real), math.fsum(t.imag)))
        bounds.append(4.0 * _EPS * float(np.sum(np.abs(t))))
    return sums, bounds


def _remainder(f: complex, partial: complex) -> float:
    return abs(complex(math.fsum([f.real, -partial.real]), math.fsum([f.imag, -partial.imag])))


@dataclass
class RemainderReport:
    """Remainders ``|f(z) - sum_{p<N} c_p z^p|`` on a grid, normalized by
    ``(d D1)^N M_N |z|^N``.

    ``c`` is the fitted constant in ``remainder <= c C1 (d D1)^N M_N |z|^N``;
    ``c_times_C1`` is the bound's actual prefactor (it scales with the series,
    ``c`` does not).
    """

    sector: dict
    params: dict
    certificate: dict
    borel: dict
    R0: float
    d: float
    d_parts: dict
    rows: list
    c: float
    c_times_C1: float
    sup_ratio: dict
    flagged: int

    def nth_root_profile(self) -> dict:
        """``N -> sup_z ratio^(1/N)`` for ``N >= 1`` with a positive sup."""
        return {N: v ** (1.0 / N) for N, v in self.sup_ratio.items() if N >= 1 and v > 0}

    def root_variation(self, N_range) -> float:
        """``max/min - 1`` of the N-th root profile over ``N_range``."""
        prof = self.nth_root_profile()
        vals = [prof[N] for N in N_range if N in prof]
        if len(vals) < 2:
            return 0.0
        return max(vals) / min(vals) - 1.0

    def to_dict(self) -> dict:
        return {
            "sector": self.sector, "params": self.params, "certificate": self.certificate,
            "borel": self.borel, "R0": self.R0, "d": self.d, "d_parts": self.d_parts,
            "c": self.c, "c_times_C1": self.c_times_C1,
            "sup_ratio": {str(k): v for k, v in self.sup_ratio.items()},
            "flagged": self.flagged, "rows": self.rows,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "re_z", "im_z", "abs_z", "remainder", "ratio", "flagged"])
        for r in self.rows:
            w.writerow([r["N"], repr(r["re_z"]), repr(r["im_z"]), repr(r["abs_z"]),
                        repr(r["remainder"]), repr(r["ratio"]), int(r["flagged"])])
        return buf.getvalue()


def proof_guided_d(ext: Extension, sector: SectorSpec) -> tuple[float, dict]:
    """``d = (2B/K6) max(d1, d2)`` from measured stand-ins.

    ``B`` is the upper moment constant, ``K6`` the upper sector constant,
    ``d1 = D2/D1`` and ``d2 = D2/((1-eps) D1)``, each floored at 1.
    """
    B = moment_bound_fit(ext.table).B2
    K6 = sector_bound_fit(ext.params, sector).constants["K2"]
    D1 = ext.series.D1
    d1 = max(1.0, ext.borel.D2 / D1)
    d2 = max(1.0, ext.borel.D2 / ((1.0 - ext.config.epsilon) * D1))
    d = 2.0 * B / K6 * max(d1, d2)
    return d, {"B": B, "K6": K6, "d1": d1, "d2": d2}


def remainder_scan(series: FormalSeries, config: ExtensionConfig, sector: SectorSpec,
                   N_max: int, z_grid=None, table: MomentTable | None = None,
                   extension: Extension | None = None) -> RemainderReport:
    """Remainders for ``N = 0..N_max`` on ``z_grid`` (default: 8 radii x 5 angles).

    Entries whose rounding plus quadrature error exceeds ``1e-3`` of the
    remainder are flagged; their ratio is still certified at the computed value.
    """
    if N_max > len(series):
        raise ParamError(f"N_max = {N_max} exceeds the {len(series)} stored coefficients")
    ext = extension or prepare(series, config, table)
    if z_grid is None:
        z_grid = sector.grid(8, 5)
    z = check_points_off_cut(np.ravel(z_grid))
    d, parts = proof_guided_d(ext, sector)
    log_dD1 = math.log(d * series.D1)
    log_M = np.asarray(series.weights.log_m(np.arange(N_max + 1)), dtype=float)

    rows = []
    for zi in sorted(z, key=lambda v: (abs(v), np.angle(v))):
        f, qerr = ext.evaluate(complex(zi))
        sums, rbounds = _partial_sums(series.coefficients, complex(zi), N_max)
        for N in range(N_max + 1):
            rem = _remainder(f, sums[N])
            log_scale = N * log_dD1 + log_M[N] + N * math.log(abs(zi))
            ratio = rem * math.exp(-log_scale) if rem > 0 else 0.0
            err = qerr + rbounds[N] + 4.0 * _EPS * abs(f)
            rows.append({"N": N, "re_z": float(zi.real), "im_z": float(zi.imag),
                         "abs_z": float(abs(zi)), "remainder": rem, "ratio": ratio,
                         "flagged": bool(err > 1e-3 * rem)})
    rows.sort(key=lambda r: (r["N"], r["abs_z"], math.atan2(r["im_z"], r["re_z"])))
    sup_ratio = {N: max(r["ratio"] for r in rows if r["N"] == N) for N in range(N_max + 1)}
    top = max(sup_ratio.values())
    c = top / series.C1 if series.C1 > 0 else 0.0
    return RemainderReport(
        sector=sector.describe(*np.shape(np.atleast_2d(z_grid))),
        params={"tau": series.tau, "sigma": series.sigma},
        certificate={"C1": series.C1, "D1": series.D1},
        borel={"C2": ext.borel.C2, "D2": ext.borel.D2, "K": ext.K, "tail_bound": ext.tail_bound},
        R0=ext.R0, d=d, d_parts=parts, rows=rows, c=c, c_times_C1=top,
        sup_ratio=sup_ratio, flagged=sum(r["flagged"] for r in rows),
    )


# -- Borel round trip -------------------------------------------------------

@dataclass
class RoundtripReport:
    """Recovered Taylor coefficients at the origin versus the input ``c_p``."""

    x: float
    radius_fraction: float
    n_points: int
    dps: int
    entries: list

    def max_rel_error(self) -> float:
        return max(e["rel_error"] for e in self.entries)

    def to_dict(self) -> dict:
        return {"x": self.x, "radius_fraction": self.radius_fraction,
                "n_points": self.n_points, "dps": self.dps, "entries": self.entries}


class _MpExtension:
    """``f`` in mpmath arithmetic, by fixed Gauss-Legendre panels in ``u``."""

    def __init__(self, ext: Extension, dps: int, degree: int = 5):
        self.ext = ext
        self.dps = dps
        self.nodes = GaussLegendre(mpmath.mp).calc_nodes(degree, mpmath.mp.prec)
        p = ext.params
        self.a, self.b, self.s = mpmath.mpf(p.a), mpmath.mpf(p.b), mpmath.mpf(p.sigma)
        self.gamma = [mpmath.mpc(complex(v)) for v in ext.gamma]
        self.R0 = mpmath.mpf(ext.R0)
        self.log_b = mpmath.log(self.b)

    def _G(self, u):
        acc = mpmath.mpc(0)
        for g in reversed(self.gamma):
            acc = acc * u + g
        return acc

    def _panel(self, lo, hi, zeta):
        half, mid = (hi - lo) / 2, (hi + lo) / 2
        us = [mid + half * x for x, _ in self.nodes]
        bL = [self.b * mpmath.log1p(u / zeta) for u in us]
        seeds = w_principal(np.array([complex(v) for v in bL]))
        # g = L^{s/(s-1)} W^{-1/(s-1)} = L exp((W - log b)/(s-1)), using W e^W = bL.
        inv = 1 / (self.s - 1)
        total = mpmath.mpc(0)
        peak = mpmath.mpf(0)
        for (_, w), u, v, seed in zip(self.nodes, us, bL, seeds):
            W = w_principal_mp(v, seed=seed)
            g = v / self.b * mpmath.exp((W - self.log_b) * inv)
            val = mpmath.exp(-self.a * g) * self._G(u)
            total += w * val
            peak = max(peak, abs(val))
        return half * total, peak

    def __call__(self, zeta, scale):
        """``f(zeta)``; ``scale`` sets the panel layout (shared along one circle)."""
        zeta = mpmath.mpc(zeta)
        cut = mpmath.mpf(10) ** (-self.dps - 10)
        lo = mpmath.mpf(0)
        hi = min(self.R0, mpmath.mpf(scale) / 16)
        total = mpmath.mpc(0)
        first_peak = None
        while lo < self.R0:
            part, peak = self._panel(lo, hi, zeta)
            total += part
            first_peak = peak if first_peak is None else max(first_peak, peak)
            if peak < cut * first_peak and hi > 64 * scale:
                break
            lo, hi = hi, min(self.R0, 2 * hi)
        return total / zeta


def borel_roundtrip(series: FormalSeries, config: ExtensionConfig = ExtensionConfig(),
                    p_max: int = 5, x: float = 1e-6, radius_fraction: float = 0.5,
                    n_points: int = 32, dps: int = 40, table: MomentTable | None = None,
                    extension: Extension | None = None) -> RoundtripReport:
    """Recover ``c_0 .. c_{p_max}`` from ``f`` alone.

    ``f^{(p)}(x)/p!`` is a trapezoidal Cauchy integral on the circle of radius
    ``radius_fraction * x`` about ``x`` (inside ``|arg z| <= asin(radius_fraction)``);
    it equals ``c_p + O(x)``, so two centers ``x`` and ``x/2`` are combined by
    Richardson extrapolation. ``f`` is evaluated at ``dps`` digits because the
    estimate divides by ``(radius)^p``.
    """
    if p_max > len(series) - 1:
        raise ParamError(f"p_max = {p_max} exceeds the series length")
    if not 0 < radius_fraction < 1:
        raise ParamError("radius_fraction must lie in (0, 1)")
    ext = extension or prepare(series, config, table)
    with mpmath.workdps(dps):
        fmp = _MpExtension(ext, dps)
        estimates = []
        for center in (mpmath.mpf(x), mpmath.mpf(x) / 2):
            rho = center * mpmath.mpf(radius_fraction)
            acc = [mpmath.mpc(0)] * (p_max + 1)
            for j in range(n_points):
                w = mpmath.expjpi(mpmath.mpf(2 * j) / n_points)
                fv = fmp(center + rho * w, center)
                for p in range(p_max + 1):
                    acc[p] += fv * (rho * w) ** (-p)
            estimates.append([v / n_points for v in acc])
        entries = []
        for p in range(p_max + 1):
            e1, e2 = estimates[0][p], estimates[1][p]
            rec = 2 * e2 - e1
            target = complex(series.coefficients[p])
            err = abs(complex(rec) - target) if abs(target) == 0 else float(abs(rec - mpmath.mpc(target)))
            rel = err / abs(target) if abs(target) > 0 else err
            entries.append({"p": p, "target": [target.real, target.imag],
                            "recovered": [float(mpmath.re(rec)), float(mpmath.im(rec))],
                            "estimate_x": [float(mpmath.re(e1)), float(mpmath.im(e1))],
                            "estimate_x_half": [float(mpmath.re(e2)), float(mpmath.im(e2))],
                            "abs_error": float(err), "rel_error": float(rel)})
    return RoundtripReport(float(x), float(radius_fraction), int(n_points), int(dps), entries)
