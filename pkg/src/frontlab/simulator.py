"""Finite-difference solver for the competition-diffusion system on a truncated line.

Second-order central differences, zero-flux (mirror) boundaries, and either
explicit Euler or implicit diffusion with explicit reaction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import solve_banded

from .errors import GeometryError, StabilityError
from .model import ModelParams

OVERSHOOT_TOL = 1e-12
RAMP_CELLS = 10  # cosine ramp spans 2 * 5 cells


class InitKind(str, Enum):
    COMPACT_INVASION = "compact_invasion"
    HALF_LINE_INTERFACE = "half_line_interface"


class Scheme(str, Enum):
    EXPLICIT_EULER = "explicit_euler"
    SEMI_IMPLICIT = "semi_implicit_diffusion"


class Field(str, Enum):
    U = "u"
    V = "v"


@dataclass(frozen=True)
class Grid1D:
    """Uniform node-centred grid; ``n`` counts nodes including both ends."""

    x_min: float = -200.0
    x_max: float = 200.0
    n: int = 1601

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise GeometryError(f"need x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if int(self.n) != self.n or self.n < 8:
            raise GeometryError(f"need at least 8 nodes, got n={self.n}")

    @classmethod
    def from_spacing(cls, x_min: float, x_max: float, dx: float) -> "Grid1D":
        n = int(round((x_max - x_min) / dx)) + 1
        return cls(x_min, x_max, n)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @cached_property
    def x(self) -> np.ndarray:
        x = np.linspace(self.x_min, self.x_max, self.n)
        x.setflags(write=False)
        return x

    def refined(self) -> "Grid1D":
        """Same interval with the spacing halved."""
        return Grid1D(self.x_min, self.x_max, 2 * self.n - 1)


def reaction_lipschitz(p: ModelParams) -> float:
    """Lipschitz bound of the reaction terms on [0, 1]^2."""
    return max(1 + 2 + p.a, p.r * (1 + 2 + p.b))


@dataclass(frozen=True)
class SchemeConfig:
    dt: float = 0.01
    scheme: Scheme = Scheme.EXPLICIT_EULER
    bc: str = "neumann"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.bc != "neumann":
            raise ValueError(f"only zero-flux ('neumann') boundaries are supported, got {self.bc!r}")
        object.__setattr__(self, "scheme", Scheme(self.scheme))

    def max_stable_dt(self, p: ModelParams, grid: Grid1D) -> float:
        lip = reaction_lipschitz(p)
        limit = 0.25 / lip
        if self.scheme is Scheme.EXPLICIT_EULER:
            # keeps every Euler update a nonnegative combination, so [0,1]^2 stays invariant
            limit = min(limit, 1.0 / (2 * max(1.0, p.d) / grid.dx**2 + lip))
        return limit

    def check(self, p: ModelParams, grid: Grid1D) -> None:
        limit = self.max_stable_dt(p, grid)
        if self.dt > limit * (1 + 1e-12):
            raise StabilityError(
                f"dt={self.dt} exceeds the stability bound {limit:.6g} for {self.scheme.value} "
                f"(dx={grid.dx:.6g}, d={p.d}, L_reac={reaction_lipschitz(p):.6g})"
            )

    @classmethod
    def stable_for(
        cls,
        p: ModelParams,
        grid: Grid1D,
        dt_max: float = 0.01,
        scheme: Scheme = Scheme.EXPLICIT_EULER,
    ) -> "SchemeConfig":
        """Largest dt <= dt_max that satisfies the stability bounds."""
        probe = cls(dt=dt_max, scheme=scheme)
        return cls(dt=min(dt_max, probe.max_stable_dt(p, grid)), scheme=scheme)


@dataclass
class SimState:
    t: float
    u: np.ndarray
    v: np.ndarray

    def copy(self) -> "SimState":
        return SimState(self.t, self.u.copy(), self.v.copy())


@dataclass
class FrontTrace:
    """Sampled interface positions; NaN marks an absent crossing."""

    t: np.ndarray
    pos_u: np.ndarray
    pos_v: np.ndarray
    snapshots: list[SimState] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def samples(self) -> list[tuple[float, Optional[float], Optional[float]]]:
        def opt(x):
            return None if math.isnan(x) else float(x)

        return [(float(t), opt(pu), opt(pv)) for t, pu, pv in zip(self.t, self.pos_u, self.pos_v)]


def smooth_step(x: np.ndarray, x0: float, ramp: float) -> np.ndarray:
    """1 left of x0, 0 right of it, joined by a cosine ramp of total width ``ramp``."""
    s = (x - x0) / ramp
    out = 0.5 * (1.0 - np.sin(np.pi * np.clip(s, -0.5, 0.5)))
    return out


def smooth_bump(x: np.ndarray, center: float, width: float, ramp: float) -> np.ndarray:
    """Plateau of height 1 whose level-1/2 crossings sit at center +- width/2."""
    return smooth_step(np.abs(x - center), width / 2, ramp)


def init_front_data(grid: Grid1D, kind: InitKind | str, width: float = 10.0) -> SimState:
    """Initial data for invasion (compact u, v = 1) or interface (u, v complementary steps) runs."""
    kind = InitKind(kind)
    if not width < grid.length / 4:
        raise GeometryError(f"width={width} must be below a quarter of the domain ({grid.length / 4})")
    ramp = RAMP_CELLS * grid.dx
    x = grid.x
    if kind is InitKind.COMPACT_INVASION:
        if width < ramp:
            raise GeometryError(f"width={width} is narrower than the smoothing ramp {ramp}")
        u = smooth_bump(x, grid.x_min + width, width, ramp)
        v = np.ones_like(x)
    else:
        if not (grid.x_min + ramp < 0 < grid.x_max - ramp):
            raise GeometryError("the interface at x=0 must lie inside the domain")
        u = smooth_step(x, 0.0, ramp)
        v = 1.0 - u
    return SimState(0.0, u, v)


class Stepper:
    """Preallocated time stepper for one (params, scheme, grid) combination."""

    def __init__(self, p: ModelParams, cfg: SchemeConfig, grid: Grid1D, check: bool = True):
        if check:
            cfg.check(p, grid)
        self.p, self.cfg, self.grid = p, cfg, grid
        n = grid.n
        self._lu = np.empty(n)
        self._lv = np.empty(n)
        self._ku = cfg.dt / grid.dx**2
        self._kv = p.d * cfg.dt / grid.dx**2
        if cfg.scheme is Scheme.SEMI_IMPLICIT:
            self._ab_u = self._banded(self._ku, n)
            self._ab_v = self._banded(self._kv, n)

    @staticmethod
    def _banded(k: float, n: int) -> np.ndarray:
        # I - k * L with the mirror stencil at both ends
        ab = np.zeros((3, n))
        ab[1, :] = 1 + 2 * k
        ab[0, 1:] = -k
        ab[2, :-1] = -k
        ab[0, 1] = -2 * k
        ab[2, -2] = -2 * k
        return ab

    @staticmethod
    def _laplacian(w: np.ndarray, out: np.ndarray) -> np.ndarray:
        out[1:-1] = w[2:] - 2.0 * w[1:-1] + w[:-2]
        out[0] = 2.0 * (w[1] - w[0])
        out[-1] = 2.0 * (w[-2] - w[-1])
        return out

    def __call__(self, s: SimState) -> SimState:
        p, dt = self.p, self.cfg.dt
        u, v = s.u, s.v
        fu = u * (1.0 - u - p.a * v)
        fv = p.r * v * (1.0 - v - p.b * u)
        if self.cfg.scheme is Scheme.EXPLICIT_EULER:
            un = u + self._ku * self._laplacian(u, self._lu) + dt * fu
            vn = v + self._kv * self._laplacian(v, self._lv) + dt * fv
        else:
            un = solve_banded((1, 1), self._ab_u, u + dt * fu, check_finite=False)
            vn = solve_banded((1, 1), self._ab_v, v + dt * fv, check_finite=False)
        for name, w in (("u", un), ("v", vn)):
            lo, hi = w.min(), w.max()
            if lo < -OVERSHOOT_TOL or hi > 1 + OVERSHOOT_TOL or not (math.isfinite(lo) and math.isfinite(hi)):
                raise StabilityError(f"{name} left [0,1] at t={s.t + dt:.6g}: range [{lo:.3e}, {hi:.3e}]")
            if lo < 0 or hi > 1:
                np.clip(w, 0.0, 1.0, out=w)
        return SimState(s.t + dt, un, vn)


def step(s: SimState, p: ModelParams, cfg: SchemeConfig, grid: Grid1D) -> SimState:
    return Stepper(p, cfg, grid)(s)


def _interp_crossing(x: np.ndarray, w: np.ndarray, i: int, level: float) -> float:
    # crossing strictly between nodes i and i+1
    w0, w1 = w[i], w[i + 1]
    if w0 == w1:
        return float(x[i])
    return float(x[i] + (w0 - level) / (w0 - w1) * (x[i + 1] - x[i]))


def front_position(s: SimState, field: Field | str, level: float, grid: Grid1D) -> Optional[float]:
    """Interface position of ``u`` (rightmost node at/above level) or ``v`` (first crossing from x_max)."""
    if not 0 < level < 1:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    field = Field(field)
    x = grid.x
    if field is Field.U:
        idx = np.flatnonzero(s.u >= level)
        if idx.size == 0 or idx[-1] == grid.n - 1:
            return None
        return _interp_crossing(x, s.u, int(idx[-1]), level)
    above = s.v >= level
    idx = np.flatnonzero(above != above[-1])
    if idx.size == 0:
        return None
    return _interp_crossing(x, s.v, int(idx[-1]), level)


def run(
    s0: SimState,
    p: ModelParams,
    cfg: SchemeConfig,
    grid: Grid1D,
    t_end: float,
    sample_every: int = 100,
    level: float = 0.5,
    snapshot_times: Sequence[float] = (),
    extinction_threshold: Optional[float] = None,
    stop_margin: Optional[float] = None,
    snapshot_every: Optional[int] = None,
) -> tuple[SimState, FrontTrace]:
    """Advance ``s0`` to ``t_end`` recording u- and v-interface positions.

    The run stops early once sup(u) drops below ``extinction_threshold``, or
    once a recorded interface comes within ``stop_margin`` of either boundary
    after having been inside that zone.  Snapshots past an early stop are lost.
    ``snapshot_every`` additionally stores the state every that many steps.
    """
    if t_end < s0.t:
        raise ValueError(f"t_end={t_end} precedes the initial time {s0.t}")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    stepper = Stepper(p, cfg, grid)
    n_steps = int(round((t_end - s0.t) / cfg.dt))
    snap_steps = {}
    for ts in snapshot_times:
        k = int(round((ts - s0.t) / cfg.dt))
        if not 0 <= k <= n_steps:
            raise ValueError(f"snapshot time {ts} outside the run [{s0.t}, {t_end}]")
        snap_steps.setdefault(k, None)

    ts, pu, pv, snaps = [], [], [], []

    def record(state: SimState) -> None:
        ts.append(state.t)
        pos = front_position(state, Field.U, level, grid)
        pu.append(np.nan if pos is None else pos)
        pos = front_position(state, Field.V, level, grid)
        pv.append(np.nan if pos is None else pos)

    lo_ok = grid.x_min + (stop_margin or 0.0)
    hi_ok = grid.x_max - (stop_margin or 0.0)

    def inside(pos: float) -> bool:
        return not math.isnan(pos) and lo_ok < pos < hi_ok

    s = s0.copy()
    record(s)
    was_inside = [inside(pu[-1]), inside(pv[-1])]
    if 0 in snap_steps:
        snaps.append(s.copy())
    k = 0
    for k in range(1, n_steps + 1):
        s = stepper(s)
        if k in snap_steps or (snapshot_every and k % snapshot_every == 0):
            snaps.append(s.copy())
        if k % sample_every == 0 or k == n_steps:
            record(s)
            if extinction_threshold is not None and s.u.max() < extinction_threshold:
                break
            if stop_margin is not None:
                now = [inside(pu[-1]), inside(pv[-1])]
                # a vanished interface (nan) is not a boundary exit
                left = [w and not n and not math.isnan(x) for w, n, x in zip(was_inside, now, (pu[-1], pv[-1]))]
                if any(left):
                    break
                was_inside = [w or n for w, n in zip(was_inside, now)]
    return s, FrontTrace(np.asarray(ts), np.asarray(pu), np.asarray(pv), snaps)
