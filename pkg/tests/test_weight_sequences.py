import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from borelinv import ParamError, WeightSequence, check_dc, check_lc, check_mg_witness
from borelinv.weight_sequences import gamma_index_estimate, sequence_report


def brute_T(tau, sigma, t, p_max=3000):
    best = 0.0
    for p in range(1, p_max + 1):
        best = max(best, p * math.log(t) - tau * p**sigma * math.log(p))
    return best


def test_log_values_match_formula():
    seq = WeightSequence(0.7, 1.3)
    p = np.arange(2, 400)
    assert np.allclose(seq.log_m(p), 0.7 * p**1.3 * np.log(p), rtol=1e-14)
    assert seq.log_m(0) == 0.0 and seq.log_m(1) == 0.0


def test_horizon_grows_on_demand():
    seq = WeightSequence(1.0, 1.5, horizon=10)
    assert seq.log_m(500) == pytest.approx(500**1.5 * math.log(500), rel=1e-14)


def test_rejects_bad_parameters():
    with pytest.raises(ParamError):
        WeightSequence(-1.0, 1.5)
    with pytest.raises(ParamError):
        WeightSequence(1.0, 1.0)
    with pytest.raises(ParamError):
        WeightSequence(1.0, 1.5).log_m(-1)


@pytest.mark.parametrize("sigma", [1.25, 1.5, 1.75, 2.5])
@pytest.mark.parametrize("t", [0.5, 1.0, 3.0, 50.0, 1e4])
def test_associated_T_matches_brute_force(sigma, t):
    assert WeightSequence(1.0, sigma).associated_T(t) == pytest.approx(brute_T(1.0, sigma, t), abs=1e-12)


def test_auxiliary_h_is_inf_over_p():
    seq = WeightSequence(1.0, 1.5)
    for t in [1e-3, 0.05, 0.3, 1.0, 2.0]:
        brute = min(seq.log_m(p) + p * math.log(t) for p in range(0, 2000))
        assert seq.auxiliary_h(t) == pytest.approx(math.exp(brute), rel=1e-12)
    assert seq.auxiliary_h(0.0) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(1.05, 3.0))
def test_lc_dc_and_moderate_growth_failure(tau, sigma):
    L = WeightSequence(tau, sigma).log_values(80)
    assert check_lc(L) == (True, None)
    dc = check_dc(L)
    assert math.isfinite(dc["log_D"])
    assert dc["log_D"] == dc["log_profile"].max() == dc["log_profile"][dc["argmax"]]
    mg = check_mg_witness(L)
    assert np.all(np.diff(mg[10:]) > 0)


def test_check_lc_flags_first_violation():
    L = np.array([0.0, 0.0, 1.0, 1.5, 4.0])
    assert check_lc(L) == (False, 2)


def test_checkers_reject_bad_inputs():
    with pytest.raises(ParamError):
        check_lc([0.1, 0.2, 0.3])
    with pytest.raises(ParamError):
        check_dc([0.0, math.inf])
    with pytest.raises(ParamError):
        check_dc([0.0, 1.0], horizon=5)


def test_gamma_defect_grows_with_gamma():
    L = WeightSequence(1.0, 1.5).log_values(101)
    defects = gamma_index_estimate(L, [1.0, 4.0, 16.0], horizon=100)
    assert defects[1.0] == 1.0
    assert 1.0 <= defects[4.0] <= defects[16.0]


def test_sequence_report_is_json_ready():
    import json

    report = sequence_report(WeightSequence(1.0, 1.5), 30)
    assert json.loads(json.dumps(report))["checks"]["lc"]["holds"] is True
