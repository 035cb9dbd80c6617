import math

import pytest
from hypothesis import given, strategies as st

from frontlab.errors import RegimeError
from frontlab.model import (
    ModelParams,
    Regime,
    SignSource,
    SignValue,
    classify_regime,
    decay_rates_formula,
    fisher_speed,
    guo_lin_sign,
    huang_linear_condition,
    kanon_bounds,
    linear_speed,
    llw_linear_condition,
)

pos = st.floats(0.05, 10.0)
gt1 = st.floats(1.01, 10.0)


@pytest.mark.parametrize(
    "a,b,regime",
    [(0.5, 2, Regime.MONOSTABLE), (1.0, 2, Regime.DEGENERATE), (2, 2, Regime.BISTABLE), (2, 1, Regime.OUT_OF_SCOPE), (0.5, 0.5, Regime.OUT_OF_SCOPE)],
)
def test_classify_regime(a, b, regime):
    assert classify_regime(ModelParams(a, b)) is regime


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_params_must_be_positive(bad):
    with pytest.raises(ValueError):
        ModelParams(bad, 2.0)
    with pytest.raises(ValueError):
        ModelParams(1.0, 2.0, d=bad)


def test_linear_speed_values_and_domain():
    assert linear_speed(1.0) == 0.0
    assert linear_speed(0.75) == pytest.approx(1.0)
    assert linear_speed(1e-12) == pytest.approx(2.0)
    with pytest.raises(RegimeError):
        linear_speed(1.5)
    with pytest.raises(RegimeError):
        linear_speed(0.0)


def test_fisher_and_kanon():
    assert fisher_speed(4, 1) == pytest.approx(4.0)
    assert kanon_bounds(ModelParams(2, 3, r=1, d=4)) == (pytest.approx(-4.0), 2.0)
    with pytest.raises(RegimeError):
        kanon_bounds(ModelParams(0.5, 2))


def test_guo_lin_clauses():
    assert guo_lin_sign(ModelParams(2, 3)).value is SignValue.POSITIVE
    assert guo_lin_sign(ModelParams(3, 2)).value is SignValue.NEGATIVE
    assert guo_lin_sign(ModelParams(2, 2)).value is SignValue.ZERO
    # r > d: positive once b >= r^2 a / d^2
    assert guo_lin_sign(ModelParams(1.2, 4.8, r=2, d=1)).value is SignValue.POSITIVE
    assert guo_lin_sign(ModelParams(1.2, 4.7, r=2, d=1)).value is SignValue.UNKNOWN
    # r < d: negative once a >= d^2 b / r^2
    assert guo_lin_sign(ModelParams(4.8, 1.2, r=1, d=2)).value is SignValue.NEGATIVE
    assert guo_lin_sign(ModelParams(4.7, 1.2, r=1, d=2)).value is SignValue.UNKNOWN
    assert guo_lin_sign(ModelParams(2, 3)).source is SignSource.CLOSED_FORM


@given(a=gt1, b=gt1, r=pos, d=pos)
def test_guo_lin_equal_rates_antisymmetric(a, b, r, d):
    # with r = d the clause is sign(b - a), antisymmetric under a <-> b
    s1 = guo_lin_sign(ModelParams(a, b, r, r)).value
    s2 = guo_lin_sign(ModelParams(b, a, r, r)).value
    flip = {SignValue.POSITIVE: SignValue.NEGATIVE, SignValue.NEGATIVE: SignValue.POSITIVE, SignValue.ZERO: SignValue.ZERO}
    assert s2 is flip[s1]


def test_linear_selection_conditions():
    # LLW: holds at (a=0.5, b=1.5, r=0.2, d=1): 0.2*(0.75-1) < 0 <= 0.5
    assert llw_linear_condition(ModelParams(0.5, 1.5, 0.2, 1.0))
    assert not llw_linear_condition(ModelParams(0.5, 1.5, 0.2, 2.5))
    assert not llw_linear_condition(ModelParams(0.9, 10, 1, 1))
    # Huang at d=1 reduces to (1 - a + r)/(r b) >= a
    assert huang_linear_condition(ModelParams(0.5, 1.5, 1.0, 1.0)) == ((0.5 + 1) / 1.5 >= 0.5)
    assert not huang_linear_condition(ModelParams(0.99, 2, 1, 1))


@given(a=st.floats(0.05, 0.99), b=gt1, r=pos, d=st.floats(0.05, 1.99))
def test_huang_matches_llw_below_d2(a, b, r, d):
    # for d < 2 the second term of the max is negative, and both reduce to r a b <= (2-d)(1-a) + r
    p = ModelParams(a, b, r, d)
    lhs, rhs = r * (a * b - 1), (2 - d) * (1 - a)
    if abs(lhs - rhs) > 1e-9:
        assert llw_linear_condition(p) == huang_linear_condition(p)


def test_huang_extends_past_d2():
    p = ModelParams(0.2, 1.2, 1.0, 2.5)
    assert not llw_linear_condition(p)
    assert huang_linear_condition(p) == ((-0.5 * 0.8 + 1) / 1.2 >= max(0.2, 0.5 / 3))


def test_decay_rates_resonance_at_zero_speed():
    rates = decay_rates_formula(ModelParams(2, 2), 0.0)
    for v in (rates.sigma_u_plus, rates.sigma_v_plus, rates.mu_u_plus, rates.mu_v_plus):
        assert v == pytest.approx(1.0)
    assert rates.resonance_flag and rates.resonance_plus and rates.resonance_minus


@given(a=gt1, b=gt1, r=pos, d=pos, c=st.floats(-3, 3))
def test_decay_rates_solve_characteristic_equations(a, b, r, d, c):
    k = decay_rates_formula(ModelParams(a, b, r, d), c)
    s, sv, mu, mv = k.sigma_u_plus, k.sigma_v_plus, k.mu_u_plus, k.mu_v_plus
    assert min(s, sv, mu, mv) > 0
    assert s * s - c * s + 1 - a == pytest.approx(0, abs=1e-8 * (1 + s * s))
    assert d * sv * sv - c * sv - r == pytest.approx(0, abs=1e-8 * (1 + d * sv * sv))
    assert mu * mu + c * mu - 1 == pytest.approx(0, abs=1e-8 * (1 + mu * mu))
    assert d * mv * mv + c * mv - r * (b - 1) == pytest.approx(0, abs=1e-8 * (1 + d * mv * mv))
    assert k.one_minus_v_plus == min(s, sv) and k.one_minus_u_minus == min(mu, mv)


def test_decay_rates_require_bistable():
    with pytest.raises(RegimeError):
        decay_rates_formula(ModelParams(1.0, 2.0), 0.5)
