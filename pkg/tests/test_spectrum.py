import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dicketherm.matsubara import PoleProximityError
from dicketherm.operators import ModelParams
from dicketherm.spectrum import (
    SpectrumResult,
    collective_modes,
    dispersion_residual,
    goldstone_residual,
)
from dicketherm.thermo import critical_beta

P_RWA = ModelParams(1.0, 1.0, g1=1.2)
P_CR = ModelParams(2.0, 1.0, g2=2.0)


def _quadratic_coefficients(params, beta):
    t = math.tanh(beta * params.Omega / 4.0)
    w0, W = params.omega0, params.Omega
    g1, g2 = params.g1, params.g2
    b = w0**2 + W**2 + 2.0 * t * (g1**2 - g2**2)
    c = (
        w0**2 * W**2
        - 2.0 * t * w0 * W * (g1**2 + g2**2)
        + t**2 * (g1**2 - g2**2) ** 2
    )
    return b, c


def test_dispersion_residual_free_case_is_one():
    p = ModelParams(1.0, 1.0)
    assert dispersion_residual(0.7, p, 2.0) == pytest.approx(1.0, abs=1e-14)


def test_dispersion_residual_rejects_bad_arguments():
    with pytest.raises(ValueError):
        dispersion_residual(-0.5, P_RWA, 2.0)
    with pytest.raises(ValueError):
        dispersion_residual(0.5, P_RWA, 0.0)


def test_dispersion_residual_pole_guard():
    with pytest.raises(PoleProximityError):
        dispersion_residual(P_RWA.Omega, P_RWA, 2.0)


def test_residual_vanishes_on_critical_roots():
    beta_c = critical_beta(P_RWA)
    assert abs(dispersion_residual(1e-8, P_RWA, beta_c)) < 1e-10
    b, _ = _quadratic_coefficients(P_RWA, beta_c)
    assert abs(dispersion_residual(math.sqrt(b), P_RWA, beta_c)) < 1e-10


def test_residual_matches_rational_form():
    # off criticality the residual equals (E^4 - B E^2 + C) over the
    # product of pole factors
    p = ModelParams(1.3, 0.8, g1=0.7, g2=0.4)
    beta = 1.7
    b, c = _quadratic_coefficients(p, beta)
    for e in (0.3, 0.77, 1.9, 2.6):
        x = e * e
        expected = (x * x - b * x + c) / ((p.omega0**2 - x) * (p.Omega**2 - x))
        assert dispersion_residual(e, p, beta) == pytest.approx(expected, rel=1e-10)


def test_zero_frequency_residual_product_formula():
    p = ModelParams(1.1, 0.9, g1=0.5, g2=0.3)
    beta = 2.4
    t = math.tanh(beta * p.Omega / 4.0)
    u = t / (p.omega0 * p.Omega)
    expected = (1.0 - (p.g1 + p.g2) ** 2 * u) * (1.0 - (p.g1 - p.g2) ** 2 * u)
    assert dispersion_residual(1e-9, p, beta) == pytest.approx(expected, rel=1e-6)


@settings(max_examples=30, deadline=None)
@given(
    omega0=st.floats(min_value=0.6, max_value=1.8),
    g1=st.floats(min_value=0.0, max_value=1.5),
    g2=st.floats(min_value=0.0, max_value=1.5),
    beta=st.floats(min_value=0.4, max_value=6.0),
    e=st.floats(min_value=2.2, max_value=5.0),
)
def test_factored_and_expanded_forms_agree(omega0, g1, g2, beta, e):
    # evaluation points above both poles, so neither form is singular
    p = ModelParams(omega0, 2.0, g1=g1, g2=g2)
    b, c = _quadratic_coefficients(p, beta)
    x = e * e
    expanded = (x * x - b * x + c) / ((p.omega0**2 - x) * (p.Omega**2 - x))
    assert dispersion_residual(e, p, beta) == pytest.approx(
        expanded, rel=1e-9, abs=1e-12
    )


def test_goldstone_residual_vanishes_at_transition():
    assert abs(goldstone_residual(P_RWA)) < 1e-10
    assert abs(goldstone_residual(P_CR)) < 1e-10


def test_goldstone_residual_rejects_subcritical():
    with pytest.raises(ValueError):
        goldstone_residual(ModelParams(1.0, 1.0, g1=0.5))


def test_collective_modes_anchor_rwa():
    beta_c = critical_beta(P_RWA)
    result = collective_modes(P_RWA, beta_c)
    assert isinstance(result, SpectrumResult)
    assert result.at_critical
    assert result.roots == pytest.approx((0.0, 2.0), abs=1e-9)
    assert result.labels == ("goldstone", "mode")
    assert result.multiplicities == (1, 1)
    assert all(abs(r) < 1e-9 for r in result.residuals)


def test_collective_modes_anchor_counterrotating():
    beta_c = critical_beta(P_CR)
    result = collective_modes(P_CR, beta_c)
    assert result.roots == pytest.approx((0.0, 1.0), abs=1e-9)
    assert result.labels == ("goldstone", "pole-degenerate")
    assert result.multiplicities == (1, 1)


def test_critical_gapped_mode_closed_form():
    # for g1 = g2 on resonance the gapped branch sits at Omega * sqrt(2)
    p = ModelParams(1.0, 1.0, g1=0.8, g2=0.8)
    result = collective_modes(p, critical_beta(p))
    assert result.roots[-1] == pytest.approx(math.sqrt(2.0), abs=1e-9)
    # general closed form sqrt(B) at criticality
    for q in (P_RWA, P_CR, ModelParams(0.7, 1.4, g1=0.9, g2=0.5)):
        beta_c = critical_beta(q)
        b, c = _quadratic_coefficients(q, beta_c)
        assert abs(c) < 1e-9
        res = collective_modes(q, beta_c)
        assert res.roots[-1] == pytest.approx(math.sqrt(b), abs=1e-8)


def test_degenerate_root_multiplicity():
    # pure counter-rotating coupling on resonance: both branches collapse
    # onto the zero root at the transition
    p = ModelParams(1.0, 1.0, g2=1.0 + 1e-9)
    beta_c = critical_beta(p)
    result = collective_modes(p, beta_c)
    assert result.roots == pytest.approx((0.0,), abs=1e-6)
    assert result.multiplicities == (2,)
    assert result.labels == ("goldstone",)


def test_rootless_scan_reports_messages():
    result = collective_modes(ModelParams(1.0, 1.0, g2=2.0), 5.0)
    assert result.roots == ()
    assert not result.at_critical
    assert any("no sign change" in m for m in result.messages)


def test_roots_sorted_and_inside_brackets():
    p = ModelParams(1.3, 0.8, g1=0.7, g2=0.4)
    result = collective_modes(p, 1.7)
    assert list(result.roots) == sorted(result.roots)
    assert len(set(np.round(result.roots, 9))) == len(result.roots)
    for root, (lo, hi) in zip(result.roots, result.brackets):
        assert lo < root < hi
    assert all(abs(r) < 1e-9 for r in result.residuals)


def test_off_critical_flag_and_goldstone_absence():
    beta_c = critical_beta(P_RWA)
    result = collective_modes(P_RWA, 0.7 * beta_c)
    assert not result.at_critical
    assert "goldstone" not in result.labels
    assert all(r > 1e-6 for r in result.roots)


def test_collective_modes_rejects_free_model():
    with pytest.raises(ValueError):
        collective_modes(ModelParams(1.0, 1.0), 2.0)
