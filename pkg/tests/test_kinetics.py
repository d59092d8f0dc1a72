import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfcell import DomainError
from halfcell.echem import (
    MaterialParams,
    bv_graphite,
    dmu_dc,
    exchange_counter,
    f_pre,
    f_pre_deriv,
    ocp,
    stripping_current,
)


@pytest.fixture(scope="module")
def params():
    return MaterialParams()


# --- chemical potential slope ------------------------------------------------

def test_dmu_dc_reference_value(params):
    # frozen from mpmath: R*T/c = 8.3145 * 298.15 / 1000
    assert dmu_dc(1000.0, params) == pytest.approx(2.478968175, rel=1e-10)


def test_dmu_dc_vanishes_at_minus_one():
    p = MaterialParams(dlnf_dlnc=-1.0)
    assert dmu_dc(500.0, p) == 0.0


def test_dmu_dc_inverse_scaling(params):
    assert dmu_dc(2000.0, params) == pytest.approx(0.5 * dmu_dc(1000.0, params))


def test_dmu_dc_rejects_nonpositive(params):
    with pytest.raises(DomainError):
        dmu_dc(0.0, params)
    with pytest.raises(DomainError):
        dmu_dc(-3.0, params)


@given(st.floats(min_value=1.0, max_value=1e6))
def test_dmu_dc_constant_product(c_el):
    p = MaterialParams()
    prod = dmu_dc(c_el, p) * c_el
    assert prod == pytest.approx(p.constants.R * p.temperature, rel=1e-12)


# --- open-circuit potential --------------------------------------------------

def test_ocp_at_knots(params):
    for soc, v in params.ocp_table:
        assert ocp(soc * params.c_gr_max, params) == pytest.approx(v)


def test_ocp_midpoint_is_mean(params):
    (s0, v0), (s1, v1) = params.ocp_table[3], params.ocp_table[4]
    mid = 0.5 * (s0 + s1) * params.c_gr_max
    assert ocp(mid, params) == pytest.approx(0.5 * (v0 + v1))


def test_ocp_clamps_outside_table(params):
    assert ocp(1.5 * params.c_gr_max, params) == params.ocp_table[-1][1]
    assert ocp(0.0, params) == params.ocp_table[0][1]


def test_ocp_monotone_decreasing(params):
    c = np.linspace(0.0, params.c_gr_max, 400)
    v = ocp(c, params)
    assert np.all(np.diff(v) <= 1e-15)


# --- Butler-Volmer graphite --------------------------------------------------

def flat_ocp_params(**kw):
    return MaterialParams(ocp_table=((0.0, 0.0), (1.0, 0.0)), **kw)


def test_bv_zero_overpotential_zero_current():
    p = flat_ocp_params()
    assert bv_graphite(1000.0, 1000.0, 0.1, 0.1, p) == 0.0


def test_bv_odd_in_overpotential():
    p = flat_ocp_params()
    for eta in np.linspace(-0.3, 0.3, 13):
        i_pos = bv_graphite(500.0, 800.0, eta, 0.0, p)
        i_neg = bv_graphite(500.0, 800.0, -eta, 0.0, p)
        assert i_pos == pytest.approx(-i_neg, rel=1e-12, abs=1e-300)


def test_bv_spot_value_vs_scalar_oracle():
    # frozen from mpmath: 2*sinh(96485.33*0.05 / (2*8.3145*298.15))
    p = flat_ocp_params(i00_grel=1.0, c_gr_max=30000.0)
    i = bv_graphite(1.0, 1.0, 0.05, 0.0, p)
    assert i == pytest.approx(2.2680412666023585, rel=1e-12)


def test_bv_rejects_nonpositive_concentration():
    p = flat_ocp_params()
    with pytest.raises(DomainError):
        bv_graphite(0.0, 1000.0, 0.1, 0.0, p)
    with pytest.raises(DomainError):
        bv_graphite(1000.0, -1.0, 0.1, 0.0, p)


def test_bv_strictly_increasing_in_eta():
    p = flat_ocp_params()
    etas = np.linspace(-0.3, 0.3, 41)
    i = bv_graphite(500.0, 800.0, etas, 0.0, p)
    assert np.all(np.diff(i) > 0)


# --- counter electrode exchange ----------------------------------------------

def test_exchange_zero_at_equal_potentials(params):
    assert exchange_counter(0.2, 0.2, params) == 0.0


def test_exchange_odd(params):
    i1 = exchange_counter(0.05, 0.0, params)
    i2 = exchange_counter(-0.05, 0.0, params)
    assert i1 == pytest.approx(-i2, rel=1e-12)


def test_exchange_spot_value(params):
    # frozen from mpmath: 2*20*sinh(96485.33*0.03/(2*8.3145*298.15))
    assert exchange_counter(0.03, 0.0, params) == pytest.approx(24.702376156555641, rel=1e-12)


# --- regularization factor ---------------------------------------------------

def test_f_pre_identities():
    nc = 3.7e-15
    assert f_pre(0.0, nc) == 0.0
    assert f_pre(nc, nc) == pytest.approx(0.5, rel=1e-15)
    assert f_pre(2.0 * nc, nc) == pytest.approx(16.0 / 17.0, rel=1e-15)


@given(st.floats(min_value=0.0, max_value=1e3))
def test_f_pre_range(n_rel):
    assert 0.0 <= f_pre(n_rel * 1e-15, 1e-15) < 1.0


def test_f_pre_strictly_increasing():
    nc = 1.0
    n = np.linspace(0.0, 10.0, 500)
    v = f_pre(n, nc)
    assert np.all(np.diff(v) > 0)


def test_f_pre_deriv_matches_finite_difference():
    nc = 2.0e-15
    for n in (0.3e-15, 1.0e-15, 2.0e-15, 8.0e-15):
        eps = 1e-6 * n
        fd = (f_pre(n + eps, nc) - f_pre(n - eps, nc)) / (2 * eps)
        assert f_pre_deriv(n, nc) == pytest.approx(fd, rel=1e-6)


# --- stripping / plating -----------------------------------------------------

def test_stripping_zero_at_saturated_inventory(params):
    nc = 1e-15
    i = stripping_current(1000.0, 0.0, 0.0, 1e-3, nc, params)   # f_pre ~ 1, eta = 0
    assert i == pytest.approx(0.0, abs=1e-12 * params.i00_plel * np.sqrt(1000.0))


def test_stripping_suppressed_without_inventory(params):
    nc = 1e-15
    for eta in (-0.1, 0.0, 0.1, 0.3):
        i = stripping_current(1000.0, eta, 0.0, 0.0, nc, params)
        assert i < 0.0   # only the plating branch survives


def test_stripping_spot_value(params):
    # frozen from mpmath at n = n_const (f_pre = 1/2), eta = 0.01 V, c_el = 1000
    nc = 5.0e-15
    i = stripping_current(1000.0, 0.01, 0.0, nc, nc, params)
    assert i == pytest.approx(-2.0466908437888227, rel=1e-12)


def test_stripping_rejects_nonpositive_concentration(params):
    with pytest.raises(DomainError):
        stripping_current(0.0, 0.1, 0.0, 1e-15, 1e-15, params)


def test_stripping_monotone_in_eta(params):
    etas = np.linspace(-0.2, 0.2, 31)
    i = stripping_current(1000.0, etas, 0.0, 4e-15, 1e-15, params)
    assert np.all(np.diff(i) > 0)


def test_stripping_odd_when_fpre_is_one(params):
    # f_pre -> 1 limit realized by n >> n_const
    nc = 1e-18
    for eta in np.linspace(-0.25, 0.25, 11):
        ip = stripping_current(1000.0, eta, 0.0, 1.0, nc, params)
        im = stripping_current(1000.0, -eta, 0.0, 1.0, nc, params)
        assert ip == pytest.approx(-im, rel=1e-12, abs=1e-300)


def test_n_const_conversion(params):
    face = (1.5e-6) ** 2
    expected = 76900.0 * 0.48e-9 * face
    assert params.n_const(face) == pytest.approx(expected, rel=1e-12)
