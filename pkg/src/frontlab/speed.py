"""Speed estimation from simulated fronts, and the experiments built on it."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.stats import linregress

from .errors import BracketError, ExtinctionError, RegimeError, VerificationError, WindowError
from .model import (
    ModelParams,
    Regime,
    Sign,
    SignValue,
    classify_regime,
    guo_lin_sign,
    linear_speed,
)
from .simulator import (
    FrontTrace,
    Grid1D,
    InitKind,
    Scheme,
    SchemeConfig,
    SimState,
    init_front_data,
    run,
    smooth_bump,
    smooth_step,
    RAMP_CELLS,
)

MIN_SAMPLES = 8
EXTINCTION_LEVEL = 0.01


class Method(str, Enum):
    INVASION_FRONT = "invasion_front"
    INTERFACE_DRIFT = "interface_drift"


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to turn a parameter set into a simulated front.

    ``dt`` is an upper bound when ``auto_dt`` is set; it is lowered to the
    stability limit for stiff parameters instead of raising.
    """

    grid: Grid1D = Grid1D()
    dt: float = 0.01
    scheme: Scheme = Scheme.EXPLICIT_EULER
    t_end: float = 200.0
    sample_every: int = 50
    width: float = 10.0
    level: float = 0.5
    boundary_margin: float = 20.0
    discard_fraction: float = 0.5
    auto_dt: bool = True

    def scheme_for(self, p: ModelParams) -> SchemeConfig:
        if self.auto_dt:
            return SchemeConfig.stable_for(p, self.grid, self.dt, Scheme(self.scheme))
        cfg = SchemeConfig(self.dt, Scheme(self.scheme))
        cfg.check(p, self.grid)
        return cfg

    def with_(self, **changes) -> "RunConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class SpeedEstimate:
    value: float
    stderr: float
    window: tuple[float, float]
    method: Method
    samples_used: int
    v_value: Optional[float] = None
    v_stderr: Optional[float] = None
    flags: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "window": list(self.window),
            "method": self.method.value,
            "samples_used": self.samples_used,
            "v_value": self.v_value,
            "v_stderr": self.v_stderr,
            "flags": list(self.flags),
        }


def _slope(t: np.ndarray, pos: np.ndarray) -> tuple[float, float]:
    fit = linregress(t, pos)
    return float(fit.slope), float(fit.stderr)


def fit_front_speed(
    trace: FrontTrace,
    method: Method,
    grid: Optional[Grid1D] = None,
    boundary_margin: float = 0.0,
    discard_fraction: float = 0.5,
) -> SpeedEstimate:
    """Least-squares slope of the u-interface over the trailing part of a trace.

    Samples whose u-interface is absent, or closer than ``boundary_margin`` to
    either end of ``grid``, are dropped before the transient is discarded.
    """
    t = np.asarray(trace.t, dtype=float)
    pu = np.asarray(trace.pos_u, dtype=float)
    pv = np.asarray(trace.pos_v, dtype=float)
    ok = np.isfinite(pu)
    if grid is not None and boundary_margin > 0:
        ok &= (pu > grid.x_min + boundary_margin) & (pu < grid.x_max - boundary_margin)
    idx = np.flatnonzero(ok)
    if idx.size:
        # keep the first contiguous stretch that stays inside the measurement zone
        breaks = np.flatnonzero(np.diff(idx) != 1)
        if breaks.size:
            idx = idx[: breaks[0] + 1]
    start = int(math.floor(discard_fraction * idx.size))
    idx = idx[start:]
    if idx.size < MIN_SAMPLES:
        raise WindowError(f"only {idx.size} usable samples after discarding the transient (need {MIN_SAMPLES})")
    value, stderr = _slope(t[idx], pu[idx])
    flags = []
    v_value = v_stderr = None
    vi = idx[np.isfinite(pv[idx])]
    if vi.size >= MIN_SAMPLES:
        v_value, v_stderr = _slope(t[vi], pv[vi])
        if abs(v_value - value) > 3 * max(stderr, v_stderr, 1e-12):
            flags.append("uv_slopes_disagree")
    else:
        flags.append("v_front_missing")
    return SpeedEstimate(
        value=value,
        stderr=stderr,
        window=(float(t[idx[0]]), float(t[idx[-1]])),
        method=method,
        samples_used=int(idx.size),
        v_value=v_value,
        v_stderr=v_stderr,
        flags=tuple(flags),
    )


def _simulate(p: ModelParams, cfg: RunConfig, s0: SimState, **kw) -> tuple[SimState, FrontTrace]:
    return run(
        s0,
        p,
        cfg.scheme_for(p),
        cfg.grid,
        cfg.t_end,
        sample_every=cfg.sample_every,
        level=cfg.level,
        stop_margin=cfg.boundary_margin,
        **kw,
    )


def estimate_spreading_speed(p: ModelParams, cfg: RunConfig = RunConfig()) -> SpeedEstimate:
    """Spreading speed of u from compactly supported data invading v = 1."""
    s0 = init_front_data(cfg.grid, InitKind.COMPACT_INVASION, cfg.width)
    state, trace = _simulate(p, cfg, s0, extinction_threshold=EXTINCTION_LEVEL)
    if state.u.max() < EXTINCTION_LEVEL:
        raise ExtinctionError(
            f"u went extinct by t={state.t:.4g} (sup u={state.u.max():.2e}); the wave speed is likely negative"
        )
    return fit_front_speed(trace, Method.INVASION_FRONT, cfg.grid, cfg.boundary_margin, cfg.discard_fraction)


def estimate_wave_speed_signed(
    p: ModelParams, cfg: RunConfig = RunConfig(), snapshot_times: Sequence[float] = ()
) -> SpeedEstimate:
    """Signed drift speed of the u = 1/2 interface from complementary step data."""
    est, _ = wave_run(p, cfg, snapshot_times)
    return est


def wave_run(
    p: ModelParams,
    cfg: RunConfig = RunConfig(),
    snapshot_times: Sequence[float] = (),
    snapshot_every: Optional[int] = None,
) -> tuple[SpeedEstimate, FrontTrace]:
    """Interface-drift run returning the estimate and the raw trace (with snapshots)."""
    if classify_regime(p) not in (Regime.BISTABLE, Regime.DEGENERATE):
        raise RegimeError(f"interface-drift speed needs a bistable or degenerate system, got {p}")
    s0 = init_front_data(cfg.grid, InitKind.HALF_LINE_INTERFACE, cfg.width)
    _, trace = _simulate(p, cfg, s0, snapshot_times=snapshot_times, snapshot_every=snapshot_every)
    est = fit_front_speed(trace, Method.INTERFACE_DRIFT, cfg.grid, cfg.boundary_margin, cfg.discard_fraction)
    return est, trace


def scalar_front_speed(species: str, p: ModelParams, cfg: RunConfig = RunConfig()) -> SpeedEstimate:
    """Front speed of one species with the other absent (pure KPP dynamics).

    ``species="v"`` starts from u = 0 and a v step; ``species="u"`` from v = 0
    and a compact u bump.  The tracked interface is the species' own.
    """
    grid = cfg.grid
    x = grid.x
    ramp = RAMP_CELLS * grid.dx
    if species == "v":
        u0 = np.zeros_like(x)
        v0 = smooth_step(x, grid.x_min + cfg.width, ramp)
        field_of = "v"
    elif species == "u":
        u0 = smooth_bump(x, grid.x_min + cfg.width, cfg.width, ramp)
        v0 = np.zeros_like(x)
        field_of = "u"
    else:
        raise ValueError(f"species must be 'u' or 'v', got {species!r}")
    _, trace = _simulate(p, cfg, SimState(0.0, u0, v0))
    if field_of == "v":
        # the v-interface plays the role of the tracked front
        trace = FrontTrace(trace.t, trace.pos_v, trace.pos_v, trace.snapshots)
    return fit_front_speed(trace, Method.INVASION_FRONT, grid, cfg.boundary_margin, cfg.discard_fraction)


def _signed_verdict(
    p: ModelParams, cfg: RunConfig, zero_band: float, closed_form: bool = True
) -> tuple[Sign, Optional[SpeedEstimate]]:
    if classify_regime(p) is not Regime.BISTABLE:
        raise RegimeError(f"sign classification is for the bistable regime, got {p}")
    if closed_form:
        sign = guo_lin_sign(p)
        if sign.value is not SignValue.UNKNOWN:
            return sign, None
    est = estimate_wave_speed_signed(p, cfg)
    return Sign.from_number(est.value, zero_band), est


def sign_of_wave_speed(p: ModelParams, cfg: RunConfig = RunConfig(), zero_band: float = 0.02) -> Sign:
    """Closed-form sign when a Guo-Lin clause applies, otherwise a simulated one."""
    return _signed_verdict(p, cfg, zero_band)[0]


@dataclass
class ThresholdResult:
    a_star: float
    bracket: tuple[float, float]
    evaluations: list[tuple[float, Sign, Optional[SpeedEstimate]]]
    zero_hit: bool = False

    def as_dict(self) -> dict:
        return {
            "a_star": self.a_star,
            "bracket": list(self.bracket),
            "zero_hit": self.zero_hit,
            "evaluations": [
                {
                    "a": a,
                    "sign": s.value.value,
                    "source": s.source.value,
                    "estimate": None if e is None else e.as_dict(),
                }
                for a, s, e in self.evaluations
            ],
        }


def check_nonincreasing(points: Sequence[tuple[float, SpeedEstimate]], k: float = 2.0) -> list[tuple[float, float]]:
    """Adjacent pairs (a_i, a_{i+1}) whose speeds increase by more than k combined stderrs."""
    pts = sorted(points, key=lambda q: q[0])
    bad = []
    for (a0, e0), (a1, e1) in zip(pts, pts[1:]):
        if e1.value - e0.value > k * (e0.stderr + e1.stderr):
            bad.append((a0, a1))
    return bad


def find_sign_threshold(
    b: float,
    r: float,
    d: float,
    a_bracket: tuple[float, float],
    cfg: RunConfig = RunConfig(),
    tol_a: float = 0.02,
    zero_band: float = 0.02,
    closed_form: bool = True,
    max_iter: int = 60,
) -> ThresholdResult:
    """Bisect on a for the change of sign of the bistable wave speed."""
    lo, hi = map(float, a_bracket)
    if not 1 < lo < hi:
        raise BracketError(f"bracket must satisfy 1 < a_lo < a_hi, got {a_bracket}")
    evaluations: list[tuple[float, Sign, Optional[SpeedEstimate]]] = []

    def evaluate(a: float) -> SignValue:
        sign, est = _signed_verdict(ModelParams(a, b, r, d), cfg, zero_band, closed_form)
        evaluations.append((a, sign, est))
        return sign.value

    s_lo, s_hi = evaluate(lo), evaluate(hi)
    if s_lo is not SignValue.POSITIVE or s_hi is not SignValue.NEGATIVE:
        raise BracketError(f"need a positive speed at a={lo} and a negative one at a={hi}; got {s_lo.value}, {s_hi.value}")
    zero_hit = False
    a_star = 0.5 * (lo + hi)
    for _ in range(max_iter):
        if hi - lo < tol_a:
            break
        mid = 0.5 * (lo + hi)
        s = evaluate(mid)
        if s is SignValue.ZERO:
            a_star, zero_hit = mid, True
            break
        if s is SignValue.POSITIVE:
            lo = mid
        else:
            hi = mid
        a_star = 0.5 * (lo + hi)
    numeric = [(a, e) for a, _, e in evaluations if e is not None]
    bad = check_nonincreasing(numeric)
    if bad:
        raise VerificationError(f"speed estimates increase with a beyond 2 stderr on {bad}")
    return ThresholdResult(a_star, (lo, hi), evaluations, zero_hit)


def _scan_point(job: tuple[ModelParams, RunConfig]) -> tuple[float, list[tuple[Method, SpeedEstimate]]]:
    p, cfg = job
    out = []
    if p.a <= 1:
        out.append((Method.INVASION_FRONT, estimate_spreading_speed(p, cfg)))
    if p.a >= 1:
        out.append((Method.INTERFACE_DRIFT, estimate_wave_speed_signed(p, cfg)))
    return p.a, out


def parallel_map(fn: Callable, items: Iterable, workers: int = 1) -> list:
    """Order-preserving map over a bounded process pool (serial when workers <= 1)."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass
class ScanResult:
    points: list[tuple[float, SpeedEstimate]]
    jumps: list[float]
    max_jump: float
    monotone_violations: list[tuple[float, float]]
    at_one: Optional[dict] = None
    all_estimates: list[tuple[float, Method, SpeedEstimate]] = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        return not self.monotone_violations


def continuity_scan(
    b: float,
    r: float,
    d: float,
    a_list: Sequence[float],
    cfg: RunConfig = RunConfig(),
    workers: int = 1,
) -> ScanResult:
    """Speed estimates across a, invasion fronts for a <= 1 and interface drift for a >= 1."""
    a_list = [float(a) for a in a_list]
    if not a_list:
        raise ValueError("a_list is empty")
    if any(a1 <= a0 for a0, a1 in zip(a_list, a_list[1:])):
        raise ValueError("a_list must be strictly increasing")
    jobs = [(ModelParams(a, b, r, d), cfg) for a in a_list]
    results = sorted(parallel_map(_scan_point, jobs, workers), key=lambda q: q[0])
    points, all_est, at_one = [], [], None
    for a, ests in results:
        for m, e in ests:
            all_est.append((a, m, e))
        points.append((a, ests[0][1]))
        if len(ests) == 2:
            e1, e2 = ests[0][1], ests[1][1]
            diff = abs(e1.value - e2.value)
            tol = 3 * (e1.stderr + e2.stderr)
            at_one = {
                "invasion_front": e1.value,
                "interface_drift": e2.value,
                "difference": diff,
                "tolerance": tol,
                "agree": diff <= tol,
            }
    jumps = [abs(e1.value - e0.value) for (_, e0), (_, e1) in zip(points, points[1:])]
    return ScanResult(
        points=points,
        jumps=jumps,
        max_jump=max(jumps) if jumps else 0.0,
        monotone_violations=check_nonincreasing(points),
        at_one=at_one,
        all_estimates=all_est,
    )


class Selection(str, Enum):
    LINEAR = "linear"
    NONLINEAR = "nonlinear"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SelectionVerdict:
    verdict: Selection
    c_est: SpeedEstimate
    c_lin: float
    margin: float

    def as_dict(self) -> dict:
        return {"verdict": self.verdict.value, "c_est": self.c_est.as_dict(), "c_lin": self.c_lin, "margin": self.margin}


def selection_verdict(c_est: SpeedEstimate, c_lin: float, margin_threshold: float = 0.03) -> SelectionVerdict:
    margin = c_est.value - c_lin
    if margin > margin_threshold + 2 * c_est.stderr:
        verdict = Selection.NONLINEAR
    elif abs(margin) <= margin_threshold:
        verdict = Selection.LINEAR
    else:
        verdict = Selection.INCONCLUSIVE
    return SelectionVerdict(verdict, c_est, c_lin, margin)


def selection_classifier(
    p: ModelParams, cfg: RunConfig = RunConfig(), margin_threshold: float = 0.03
) -> SelectionVerdict:
    """Linear vs nonlinear selection of the minimal speed, by comparing with 2 sqrt(1-a)."""
    if classify_regime(p) not in (Regime.MONOSTABLE, Regime.DEGENERATE):
        raise RegimeError(f"selection is defined for monostable or degenerate systems, got {p}")
    return selection_verdict(estimate_spreading_speed(p, cfg), linear_speed(p.a), margin_threshold)
