"""scikit-learn style front end for the extension operator.

``fit`` takes the coefficients ``c_0 .. c_P`` of a formal series (a 1-d
array, or an ``(P+1, 2)`` array of real/imaginary pairs) and ``predict``
evaluates the extended function at points off ``(-inf, 0]``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .extension import (
    ExtensionConfig,
    FormalSeries,
    borel_roundtrip,
    prepare,
    remainder_scan,
)
from .kernel import KernelParams
from .moments import MomentTable
from .quadrature import QuadratureConfig
from .validation import check_coefficients, check_points_off_cut, check_tau_sigma


class BorelLaplaceExtension(BaseEstimator):
    """Holomorphic function with a prescribed asymptotic expansion.

    Parameters
    ----------
    tau, sigma : float
        Parameters of the weight sequence ``M_p = p^(tau p^sigma)``; ``1 < sigma < 2``.
    epsilon : float
        ``R0 = (1 - epsilon)/D2`` unless ``R0`` is given.
    R0 : float or None
        Upper limit of the truncated Laplace-like integral.
    borel_truncation : int or None
        Highest Borel coefficient used; defaults to all of them.
    rel_tol : float
        Relative tolerance of the quadrature defining ``f``.
    D_grid : array-like or None
        Candidate geometric rates for the growth certificate.

    Attributes
    ----------
    series_ : FormalSeries
    table_ : MomentTable
    extension_ : Extension
    C1_, D1_ : float
        Growth certificate ``|c_p| <= C1 D1^p M_p``.
    C2_, D2_ : float
        Measured geometric bound of the Borel coefficients.
    R0_ : float
    n_coefficients_ : int
    """

    def __init__(self, tau=1.0, sigma=1.5, epsilon=0.5, R0=None, borel_truncation=None,
                 rel_tol=1e-13, D_grid=None):
        self.tau = tau
        self.sigma = sigma
        self.epsilon = epsilon
        self.R0 = R0
        self.borel_truncation = borel_truncation
        self.rel_tol = rel_tol
        self.D_grid = D_grid

    def _config(self) -> ExtensionConfig:
        return ExtensionConfig(
            epsilon=self.epsilon, R0=self.R0, borel_truncation=self.borel_truncation,
            quadrature=QuadratureConfig(rel_tol=self.rel_tol, max_subdivisions=4000),
        )

    def fit(self, X, y=None, table: MomentTable | None = None):
        """Certify the coefficients, divide by the moments and fix ``R0``.

        ``table`` may supply precomputed moments covering ``p <= P``.
        """
        tau, sigma = check_tau_sigma(self.tau, self.sigma, certified=True)
        c = check_coefficients(X)
        self.series_ = FormalSeries(tau, sigma, c, self.D_grid)
        self.table_ = table if table is not None else MomentTable.build(
            KernelParams(tau, sigma), max(c.size - 1, 1))
        self.extension_ = prepare(self.series_, self._config(), self.table_)
        self.C1_, self.D1_ = self.series_.C1, self.series_.D1
        self.C2_, self.D2_ = self.extension_.borel.C2, self.extension_.borel.D2
        self.R0_ = self.extension_.R0
        self.n_coefficients_ = c.size
        return self

    def predict(self, X):
        """``f`` at each point of ``X`` (complex, any shape)."""
        check_is_fitted(self, "extension_")
        z = np.asarray(X, dtype=complex)
        check_points_off_cut(z)
        return np.asarray(self.extension_(z.ravel()), dtype=complex).reshape(z.shape)

    def remainder_scan(self, sector, N_max, z_grid=None):
        check_is_fitted(self, "extension_")
        return remainder_scan(self.series_, self._config(), sector, N_max, z_grid,
                              extension=self.extension_)

    def borel_roundtrip(self, p_max=5, **kwargs):
        check_is_fitted(self, "extension_")
        return borel_roundtrip(self.series_, self._config(), p_max,
                               extension=self.extension_, **kwargs)
