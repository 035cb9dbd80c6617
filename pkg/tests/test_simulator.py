import numpy as np
import pytest
from hypothesis import given, strategies as st

from frontlab.errors import GeometryError, StabilityError
from frontlab.model import ModelParams
from frontlab.simulator import (
    Field,
    Grid1D,
    InitKind,
    Scheme,
    SchemeConfig,
    SimState,
    Stepper,
    front_position,
    init_front_data,
    reaction_lipschitz,
    run,
    smooth_bump,
    smooth_step,
)

G = Grid1D(-50.0, 50.0, 401)


def test_grid_geometry():
    g = Grid1D.from_spacing(-200, 200, 0.25)
    assert g.n == 1601 and g.dx == pytest.approx(0.25)
    assert g.refined().dx == pytest.approx(0.125)
    assert not g.x.flags.writeable
    with pytest.raises(GeometryError):
        Grid1D(1.0, 0.0, 10)
    with pytest.raises(GeometryError):
        Grid1D(0.0, 1.0, 3)


def test_smooth_profiles():
    x = np.linspace(-5, 5, 1001)
    s = smooth_step(x, 1.0, 2.0)
    assert s[0] == 1.0 and s[-1] == 0.0
    assert np.all(np.diff(s) <= 0)
    assert smooth_step(np.array([1.0]), 1.0, 2.0)[0] == pytest.approx(0.5)
    b = smooth_bump(x, 0.0, 4.0, 1.0)
    assert b[500] == 1.0 and b[0] == 0.0
    assert smooth_bump(np.array([2.0, -2.0]), 0.0, 4.0, 1.0) == pytest.approx([0.5, 0.5])


def test_init_data_kinds():
    s = init_front_data(G, InitKind.COMPACT_INVASION, 10.0)
    assert np.all(s.v == 1.0) and s.u.max() == 1.0
    assert front_position(s, Field.U, 0.5, G) == pytest.approx(G.x_min + 15.0, abs=1e-9)
    h = init_front_data(G, "half_line_interface")
    assert np.allclose(h.u + h.v, 1.0)
    assert front_position(h, Field.U, 0.5, G) == pytest.approx(0.0, abs=1e-9)
    assert front_position(h, Field.V, 0.5, G) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(GeometryError):
        init_front_data(G, InitKind.COMPACT_INVASION, 30.0)


def test_stability_bounds():
    p = ModelParams(2, 2, r=1, d=4)
    with pytest.raises(StabilityError):
        Stepper(p, SchemeConfig(0.01), Grid1D(-50, 50, 401))
    cfg = SchemeConfig.stable_for(p, G, 0.01)
    assert cfg.dt < 0.01
    Stepper(p, cfg, G)
    # the semi-implicit scheme only carries the reaction bound
    semi = SchemeConfig.stable_for(p, G, 0.05, Scheme.SEMI_IMPLICIT)
    assert semi.dt == pytest.approx(min(0.05, 0.25 / reaction_lipschitz(p)))


@pytest.mark.parametrize("u0,v0", [(1.0, 0.0), (0.0, 1.0), (0.0, 0.0)])
@pytest.mark.parametrize("scheme", list(Scheme))
def test_equilibria_are_fixed(u0, v0, scheme):
    p = ModelParams(1.5, 2.0, 0.7, 1.3)
    st_ = Stepper(p, SchemeConfig.stable_for(p, G, 0.01, scheme), G)
    s = SimState(0.0, np.full(G.n, u0), np.full(G.n, v0))
    for _ in range(20):
        s = st_(s)
    # the banded solve reproduces constants only to roundoff
    tol = 0.0 if scheme is Scheme.EXPLICIT_EULER else 1e-13
    assert np.max(np.abs(s.u - u0)) <= tol and np.max(np.abs(s.v - v0)) <= tol


@given(
    a=st.floats(0.1, 6), b=st.floats(0.1, 6), r=st.floats(0.2, 3), d=st.floats(0.2, 3),
    seed=st.integers(0, 2**31 - 1),
)
def test_invariant_rectangle(a, b, r, d, seed):
    p = ModelParams(a, b, r, d)
    g = Grid1D(-10, 10, 81)
    rng = np.random.default_rng(seed)
    s = SimState(0.0, rng.uniform(0, 1, g.n), rng.uniform(0, 1, g.n))
    st_ = Stepper(p, SchemeConfig.stable_for(p, g, 0.05), g)
    for _ in range(50):
        s = st_(s)
        assert s.u.min() >= 0 and s.u.max() <= 1 and s.v.min() >= 0 and s.v.max() <= 1


def test_mirror_symmetry_preserved():
    p = ModelParams(2, 3)
    s = SimState(0.0, smooth_bump(G.x, 0.0, 10.0, 2.0), 1 - smooth_bump(G.x, 0.0, 6.0, 2.0))
    st_ = Stepper(p, SchemeConfig(0.01), G)
    for _ in range(300):
        s = st_(s)
    assert np.allclose(s.u, s.u[::-1], atol=1e-13) and np.allclose(s.v, s.v[::-1], atol=1e-13)


def test_semi_implicit_agrees_with_explicit():
    p = ModelParams(2.0, 3.0)
    s0 = init_front_data(G, InitKind.HALF_LINE_INTERFACE)
    a, _ = run(s0, p, SchemeConfig(0.005), G, 10.0)
    b, _ = run(s0, p, SchemeConfig(0.005, Scheme.SEMI_IMPLICIT), G, 10.0)
    assert np.max(np.abs(a.u - b.u)) < 5e-3


def test_front_position_interpolates_and_handles_absence():
    s = SimState(0.0, np.where(G.x < 3.1, 1.0, 0.0), np.zeros(G.n))
    # nodes at 3.0 (u=1) and 3.25 (u=0): linear crossing at 3.125
    assert front_position(s, Field.U, 0.5, G) == pytest.approx(3.125)
    assert front_position(SimState(0, np.zeros(G.n), np.zeros(G.n)), Field.U, 0.5, G) is None
    assert front_position(SimState(0, np.ones(G.n), np.ones(G.n)), Field.U, 0.5, G) is None
    assert front_position(SimState(0, np.ones(G.n), np.ones(G.n)), Field.V, 0.5, G) is None
    with pytest.raises(ValueError):
        front_position(s, Field.U, 1.0, G)


def test_run_sampling_schedule_and_snapshots():
    p = ModelParams(2, 3)
    s0 = init_front_data(G, InitKind.HALF_LINE_INTERFACE)
    s, tr = run(s0, p, SchemeConfig(0.01), G, 1.05, sample_every=20, snapshot_times=(0.5,), snapshot_every=50)
    assert s.t == pytest.approx(1.05)
    assert tr.t[0] == 0 and tr.t[-1] == pytest.approx(1.05)
    assert np.allclose(np.diff(tr.t[:-1]), 0.2)
    assert [sn.t for sn in tr.snapshots] == pytest.approx([0.5, 1.0])
    assert len(tr.samples) == len(tr)


def test_run_stops_on_extinction():
    p = ModelParams(2, 2)
    s0 = init_front_data(G, InitKind.COMPACT_INVASION, 10.0)
    s, tr = run(s0, p, SchemeConfig(0.01), G, 100.0, sample_every=50, extinction_threshold=0.01)
    assert s.u.max() < 0.01 and s.t < 100.0
    assert np.isnan(tr.pos_u[-1])


def test_run_stops_near_boundary():
    p = ModelParams(0.5, 2)
    s0 = init_front_data(G, InitKind.COMPACT_INVASION, 10.0)
    s, tr = run(s0, p, SchemeConfig(0.01), G, 200.0, sample_every=25, stop_margin=5.0)
    assert s.t < 200.0
    # whichever interface reached the margin first triggered the stop
    assert max(tr.pos_u[-2], tr.pos_v[-2]) < G.x_max - 5.0 <= max(tr.pos_u[-1], tr.pos_v[-1])


def test_overshoot_is_an_error():
    p = ModelParams(2, 2)
    st_ = Stepper(p, SchemeConfig(0.01), G)
    with pytest.raises(StabilityError):
        st_(SimState(0.0, np.full(G.n, 1.5), np.zeros(G.n)))
