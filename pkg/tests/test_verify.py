
import numpy as np
import pytest
from hypothesis import given, strategies as st

from frontlab.errors import ConstructionError, RegimeError
from frontlab.model import ModelParams
from frontlab.simulator import Grid1D, SimState
from frontlab.verify import (
    CORNERS,
    BarrierRate,
    ComparisonConfig,
    SupersolutionParams,
    barrier,
    comparison_test,
    degenerate_positivity,
    large_a_barrier_check,
    order_gaps,
    random_ordered_pair,
    supersolution_audit,
)

QUICK = ComparisonConfig(grid=Grid1D(-30.0, 30.0, 241), t_end=5.0, sample_every=25)


def test_random_pairs_are_ordered():
    rng = np.random.default_rng(1)
    for _ in range(10):
        hi, lo = random_ordered_pair(QUICK.grid, rng)
        assert np.all(hi.u >= lo.u) and np.all(hi.v <= lo.v)
        for s in (hi, lo):
            assert s.u.min() >= 0 and s.u.max() <= 1 and s.v.min() >= 0 and s.v.max() <= 1


def test_identical_pairs_keep_zero_gap():
    rep = comparison_test(ModelParams(2, 3), n_pairs=3, cfg=QUICK, identical=True)
    assert rep.min_gap == 0.0 and rep.passed


def test_comparison_holds_quick():
    rep = comparison_test(ModelParams(1.5, 1.5, 2.0, 0.5), n_pairs=4, cfg=QUICK, seed=3)
    assert rep.passed
    assert rep.samples_per_pair == 500 // 25 + 1


def test_equilibria_pair_gap():
    n = QUICK.grid.n
    upper = SimState(0.0, np.ones(n), np.zeros(n))
    lower = SimState(0.0, np.zeros(n), np.ones(n))
    gap, _ = order_gaps(ModelParams(2, 3), upper, lower, QUICK)
    assert gap.min_u_gap == pytest.approx(1.0) and gap.min_v_gap == pytest.approx(1.0)


def test_degenerate_requires_b_above_one():
    with pytest.raises(RegimeError):
        degenerate_positivity(1.0)


def test_degenerate_positive_small(small_cfg):
    est = degenerate_positivity(1.5, cfg=small_cfg)
    assert est.value - 2 * est.stderr > 0


def _params(**over):
    kw = dict(
        delta_star=0.05, c_1=0.55, c_2=0.65, xi_1=9.0, xi_2=-9.5, delta_1=0.09, delta_2=0.01, delta_3=1.0,
        delta_4=1.5, delta_5=0.5, delta_6=0.01, delta_7=0.25, lambda_1=1.2, lambda_2=4.0, lambda_3=0.4,
        eps_1=1e-2, eta_1=1e-5,
    )
    kw.update(over)
    return SupersolutionParams.matched(**kw)


@given(
    xi_1=st.floats(5, 20),
    delta_1=st.floats(0.01, 0.3),
    delta_3=st.floats(0.2, 2.0),
    gap=st.floats(0.1, 2.0),
    lambda_1=st.floats(0.5, 3.0),
    eps_1=st.floats(1e-4, 1e-1),
)
def test_matched_amplitudes_are_continuous(xi_1, delta_1, delta_3, gap, lambda_1, eps_1):
    sp = _params(xi_1=xi_1, xi_2=-xi_1, delta_1=delta_1, delta_3=delta_3, delta_4=delta_3 + gap,
                 lambda_1=lambda_1, eps_1=eps_1, eta_1=1e-3 * eps_1)
    for name, x in sp.joints.items():
        k = "ABCD".index(name) + 1
        ru_r, rv_r = sp.segment_R(k, x)
        ru_l, rv_l = sp.segment_R(k + 1, x)
        scale = max(abs(ru_r), abs(rv_r), 1e-300)
        assert abs(ru_r - ru_l) <= 1e-10 * max(scale, 1.0)
        assert abs(rv_r - rv_l) <= 1e-10 * max(scale, 1.0)
    assert sp.eps_3 > 0


def test_construction_errors():
    with pytest.raises(ConstructionError):
        _params(delta_4=0.9)  # delta_3 >= delta_4
    with pytest.raises(ConstructionError):
        _params(delta_1=0.0)
    with pytest.raises(ConstructionError):
        _params(xi_2=7.2)  # empty segment 3


def test_corner_table_covers_all_joints():
    assert set(CORNERS) == {f"alpha_{i}" for i in range(1, 7)}
    assert {j for _, j, _, _ in CORNERS.values()} == {"A", "B", "C", "D"}


@given(lam=st.floats(0.1, 20), R=st.floats(0.5, 10))
def test_barrier_equals_one_at_ends(lam, R):
    ends = barrier(np.array([-2 * R, 2 * R]), lam, R)
    assert np.allclose(ends, 1.0, atol=1e-12)
    mid = barrier(np.linspace(-2 * R, 2 * R, 101), lam, R)
    assert mid.min() > 0 and mid.max() <= 1 + 1e-15


def test_barrier_corrected_passes_and_literal_fails():
    rep = large_a_barrier_check(100, 0.25, 5)
    assert rep.passed and rep.lam == pytest.approx(np.sqrt(24))
    lit = large_a_barrier_check(100, 0.25, 5, rate="literal")
    assert not lit.passed and lit.max_lhs > 0
    low = large_a_barrier_check(1, 0.01, 5)
    assert not low.passed and low.note and low.rate is BarrierRate.CORRECTED


def test_barrier_fd_identity_second_order():
    coarse = large_a_barrier_check(100, 0.25, 5, n_nodes=1001)
    fine = large_a_barrier_check(100, 0.25, 5, n_nodes=2001)
    assert 3.5 < coarse.fd_identity_error / fine.fd_identity_error < 4.5


def test_barrier_rejects_bad_inputs():
    with pytest.raises(ValueError):
        large_a_barrier_check(100, 1.5, 5)
    with pytest.raises(ValueError):
        large_a_barrier_check(100, 0.25, 5, n_nodes=3)


@pytest.mark.slow
def test_supersolution_found_and_sound(supersolution_search):
    res = supersolution_search
    assert res.found and res.report.passed
    sp = res.params
    rep2 = supersolution_audit(sp, res.base_profile, ModelParams(0.99, 2.0), 0.01, refine=2)
    assert rep2.passed


@pytest.mark.slow
def test_delta_5_flip_breaks_alpha_4(supersolution_search):
    res = supersolution_search
    sp = res.params.rematched(delta_5=0.5 / res.params.lambda_2, delta_7=0.25 / res.params.lambda_2)
    rep = supersolution_audit(sp, res.base_profile, ModelParams(0.99, 2.0), 0.01)
    assert rep.failed_corners == {"alpha_4"}


def test_audit_needs_matching_target(supersolution_search):
    res = supersolution_search
    with pytest.raises(ValueError):
        supersolution_audit(res.params, res.base_profile, ModelParams(0.9, 2.0), 0.01)
