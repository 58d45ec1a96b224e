import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from borelinv import BorelLaplaceExtension, DomainError, ParamError, SectorSpec


def test_params_roundtrip_and_clone():
    est = BorelLaplaceExtension(sigma=1.25, epsilon=0.3)
    assert est.get_params()["sigma"] == 1.25
    twin = clone(est).set_params(tau=2.0)
    assert twin.tau == 2.0 and est.tau == 1.0


def test_fit_predict(table15):
    c = np.exp(table15.log_m[:9])
    est = BorelLaplaceExtension().fit(c, table=table15)
    assert est.n_coefficients_ == 9 and est.D2_ == pytest.approx(1.0)
    assert est.R0_ == pytest.approx(0.5)
    z = np.array([[0.1, 0.2 + 0.1j], [0.05j + 0.01, 0.3]])
    out = est.predict(z)
    assert out.shape == z.shape
    assert out[0, 0] == pytest.approx(est.extension_(0.1), rel=1e-15)


def test_pairs_input(table15):
    c = np.exp(table15.log_m[:4])
    pairs = np.stack([c, np.zeros_like(c)], axis=1)
    a = BorelLaplaceExtension().fit(pairs, table=table15).predict([0.2])
    b = BorelLaplaceExtension().fit(c, table=table15).predict([0.2])
    assert a[0] == b[0]


def test_errors():
    with pytest.raises(NotFittedError):
        BorelLaplaceExtension().predict([0.1])
    with pytest.raises(ParamError):
        BorelLaplaceExtension(sigma=2.5).fit([1.0, 1.0])
    with pytest.raises(ParamError):
        BorelLaplaceExtension().fit([])
    est = BorelLaplaceExtension().fit([1.0, 2.0])
    with pytest.raises(DomainError):
        est.predict([-0.5])


def test_scan_method(table15):
    est = BorelLaplaceExtension().fit(np.exp(table15.log_m[:13]), table=table15)
    rep = est.remainder_scan(SectorSpec(1.0, 1e-3, 1.0), 6)
    assert rep.flagged == 0
