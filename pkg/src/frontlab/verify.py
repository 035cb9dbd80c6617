"""Numerical audits of structural results for the competition system.

* ``comparison_test``: order preservation between ordered pairs of solutions.
* ``degenerate_positivity``: the spreading speed at a = 1 is positive.
* ``supersolution_audit``: checks the piecewise super-solution built from a
  near-degenerate bistable wave (five-segment perturbation (R_u, R_v)).
* ``large_a_barrier_check``: the cosh-type barrier used for large a.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from itertools import product
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConstructionError, RegimeError, VerificationError
from .model import ModelParams, mu_u_plus, mu_v_plus, sigma_u_plus
from .simulator import Grid1D, SchemeConfig, SimState, Stepper, smooth_bump
from .speed import RunConfig, SpeedEstimate, estimate_spreading_speed, parallel_map
from .twprofile import WaveProfile, converged_profile

ORDER_TOL = 1e-8
JOINT_TOL = 1e-10
REL_TOL = 1e-6
STEP5_TOL = 1e-8
TAIL_FLOOR = 1e-12


# ---------------------------------------------------------------- comparison


@dataclass(frozen=True)
class ComparisonConfig:
    grid: Grid1D = Grid1D(-50.0, 50.0, 401)
    dt: float = 0.01
    t_end: float = 20.0
    sample_every: int = 50


@dataclass
class PairGap:
    min_u_gap: float
    min_v_gap: float

    @property
    def min_gap(self) -> float:
        return min(self.min_u_gap, self.min_v_gap)


@dataclass
class ComparisonReport:
    pairs: list[PairGap]
    samples_per_pair: int
    tol: float = ORDER_TOL

    @property
    def min_u_gap(self) -> float:
        return min(g.min_u_gap for g in self.pairs)

    @property
    def min_v_gap(self) -> float:
        return min(g.min_v_gap for g in self.pairs)

    @property
    def min_gap(self) -> float:
        return min(self.min_u_gap, self.min_v_gap)

    @property
    def passed(self) -> bool:
        return self.min_gap >= -self.tol

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "n_pairs": len(self.pairs),
            "samples_per_pair": self.samples_per_pair,
            "min_u_gap": self.min_u_gap,
            "min_v_gap": self.min_v_gap,
            "min_gap": self.min_gap,
            "tol": self.tol,
        }


def random_ordered_pair(grid: Grid1D, rng: np.random.Generator) -> tuple[SimState, SimState]:
    """A pair (upper, lower) with u_upper >= u_lower and v_upper <= v_lower.

    "upper" is the (u up, v down) member in the competitive order.
    """
    x, L = grid.x, grid.length
    ramp = 4 * grid.dx

    def bump() -> np.ndarray:
        width = rng.uniform(0.05, 0.4) * L
        center = rng.uniform(grid.x_min + width / 2, grid.x_max - width / 2)
        return rng.uniform(0.1, 1.0) * smooth_bump(x, center, width, ramp)

    u_lo = bump()
    u_hi = np.minimum(1.0, u_lo + bump())
    v_hi = 1.0 - bump()
    v_lo = np.maximum(0.0, v_hi - bump())
    return SimState(0.0, u_hi, v_lo), SimState(0.0, u_lo, v_hi)


def order_gaps(
    p: ModelParams, upper: SimState, lower: SimState, cfg: ComparisonConfig = ComparisonConfig()
) -> tuple[PairGap, int]:
    """Evolve both members in lockstep and return the smallest order gaps seen."""
    grid = cfg.grid
    scheme = SchemeConfig.stable_for(p, grid, cfg.dt)
    stepper = Stepper(p, scheme, grid)
    n_steps = int(round(cfg.t_end / scheme.dt))
    gu, gv = math.inf, math.inf
    samples = 0
    hi, lo = upper.copy(), lower.copy()
    for k in range(n_steps + 1):
        if k % cfg.sample_every == 0 or k == n_steps:
            gu = min(gu, float(np.min(hi.u - lo.u)))
            gv = min(gv, float(np.min(lo.v - hi.v)))
            samples += 1
        if k < n_steps:
            hi, lo = stepper(hi), stepper(lo)
    return PairGap(gu, gv), samples


def comparison_test(
    p: ModelParams,
    n_pairs: int = 20,
    cfg: ComparisonConfig = ComparisonConfig(),
    seed: int = 0,
    identical: bool = False,
) -> ComparisonReport:
    """Evolve ``n_pairs`` random ordered initial pairs and record the worst order gap.

    ``identical=True`` uses the same state for both members, which must keep
    both gaps at exactly zero.
    """
    if n_pairs < 1:
        raise ValueError("n_pairs must be at least 1")
    rng = np.random.default_rng(seed)
    gaps, samples = [], 0
    for _ in range(n_pairs):
        upper, lower = random_ordered_pair(cfg.grid, rng)
        if identical:
            lower = upper.copy()
        g, samples = order_gaps(p, upper, lower, cfg)
        gaps.append(g)
    return ComparisonReport(gaps, samples)


# ------------------------------------------------------------ degenerate case


def degenerate_positivity(b: float, r: float = 1.0, d: float = 1.0, cfg: RunConfig = RunConfig()) -> SpeedEstimate:
    """Spreading speed at a = 1; raises VerificationError unless it is positive beyond 2 stderr."""
    if not b > 1:
        raise RegimeError(f"the degenerate case needs b > 1, got b={b}")
    est = estimate_spreading_speed(ModelParams(1.0, b, r, d), cfg)
    if not est.value - 2 * est.stderr > 0:
        raise VerificationError(
            f"spreading speed at a=1 is not positive: {est.value:.6g} +- {est.stderr:.3g} (b={b}, r={r}, d={d})"
        )
    return est


# ------------------------------------------------------------ super-solution


@dataclass(frozen=True)
class SupersolutionParams:
    """Joint positions, widths, rates and amplitudes of the piecewise (R_u, R_v).

    Segments, right to left, with A = xi_1+delta_1, B = xi_1-delta_4,
    C = xi_2+delta_5, D = xi_2-delta_7:

    1. xi >= A:      (eps_1 (xi-xi_1) e^{-lambda_1 xi},  eta_1 (xi-xi_1) e^{-lambda_1 xi})
    2. B <= xi <= A: (eps_2 sin(delta_2 (xi-xi_1+delta_3)), eta_2 e^{lambda_2 xi})
    3. C <= xi <= B: (-eps_3, eta_2 e^{lambda_2 xi})
    4. D <= xi <= C: (-eps_4 e^{lambda_3 xi}, eta_3 sin(delta_6 (xi-xi_2)))
    5. xi <= D:      (-eps_4 e^{lambda_3 xi}, -eta_4 e^{lambda_3 xi})
    """

    delta_star: float
    c_1: float
    c_2: float
    xi_1: float
    xi_2: float
    delta_1: float
    delta_2: float
    delta_3: float
    delta_4: float
    delta_5: float
    delta_6: float
    delta_7: float
    lambda_1: float
    lambda_2: float
    lambda_3: float
    eps_1: float
    eps_2: float
    eps_3: float
    eps_4: float
    eta_1: float
    eta_2: float
    eta_3: float
    eta_4: float

    @classmethod
    def matched(
        cls,
        *,
        delta_star: float,
        c_1: float,
        c_2: float,
        xi_1: float,
        xi_2: float,
        delta_1: float,
        delta_2: float,
        delta_3: float,
        delta_4: float,
        delta_5: float,
        delta_6: float,
        delta_7: float,
        lambda_1: float,
        lambda_2: float,
        lambda_3: float,
        eps_1: float,
        eta_1: float,
    ) -> "SupersolutionParams":
        """Fill eps_2..eps_4, eta_2..eta_4 so that R_u and R_v are continuous at every joint."""
        widths = dict(delta_1=delta_1, delta_2=delta_2, delta_3=delta_3, delta_4=delta_4,
                      delta_5=delta_5, delta_6=delta_6, delta_7=delta_7)
        bad = [k for k, v in widths.items() if not v > 0]
        if bad or not (eps_1 > 0 and eta_1 > 0):
            raise ConstructionError(f"widths and leading amplitudes must be positive (offending: {bad})")
        A, C, D = xi_1 + delta_1, xi_2 + delta_5, xi_2 - delta_7
        if not xi_1 - delta_4 > C:
            raise ConstructionError("segment 3 is empty: need xi_1 - delta_4 > xi_2 + delta_5")
        s12 = math.sin(delta_2 * (delta_1 + delta_3))
        if not s12 > 0:
            raise ConstructionError("sin(delta_2 (delta_1 + delta_3)) must be positive to match R_u at xi_1 + delta_1")
        if not delta_3 < delta_4:
            raise ConstructionError("R_u must change sign inside segment 2: need delta_3 < delta_4")
        s3 = math.sin(delta_2 * (delta_4 - delta_3))
        s56 = math.sin(delta_5 * delta_6)
        if not (s3 > 0 and s56 > 0):
            raise ConstructionError("a matching sine is not positive; shrink delta_2 or delta_6")
        eps_2 = eps_1 * delta_1 * math.exp(-lambda_1 * A) / s12
        eta_2 = eta_1 * delta_1 * math.exp(-(lambda_1 + lambda_2) * A)
        # continuity at B gives R_u(B) = -eps_3, i.e. eps_3 = -R_u(B)
        eps_3 = eps_2 * s3
        eps_4 = eps_3 / math.exp(lambda_3 * C)
        eta_3 = eta_2 * math.exp(lambda_2 * C) / s56
        eta_4 = eta_3 * math.sin(delta_6 * delta_7) / math.exp(lambda_3 * D)
        if not eta_4 > 0:
            raise ConstructionError("eta_4 must be positive; need delta_6 delta_7 < pi")
        out = cls(delta_star, c_1, c_2, xi_1, xi_2, delta_1, delta_2, delta_3, delta_4, delta_5, delta_6, delta_7,
                  lambda_1, lambda_2, lambda_3, eps_1, eps_2, eps_3, eps_4, eta_1, eta_2, eta_3, eta_4)
        if not all(math.isfinite(v) for v in asdict(out).values()):
            raise ConstructionError("amplitude matching over- or underflowed; reduce the joint spacing or the rates")
        return out

    def rematched(self, **changes) -> "SupersolutionParams":
        """Copy with some free parameters changed and amplitudes re-matched."""
        free = {f.name: getattr(self, f.name) for f in fields(self) if f.name not in _DERIVED}
        free.update(changes)
        return SupersolutionParams.matched(**free)

    @property
    def joints(self) -> dict[str, float]:
        return {
            "A": self.xi_1 + self.delta_1,
            "B": self.xi_1 - self.delta_4,
            "C": self.xi_2 + self.delta_5,
            "D": self.xi_2 - self.delta_7,
        }

    def segment_bounds(self, k: int) -> tuple[float, float]:
        j = self.joints
        return {
            1: (j["A"], math.inf),
            2: (j["B"], j["A"]),
            3: (j["C"], j["B"]),
            4: (j["D"], j["C"]),
            5: (-math.inf, j["D"]),
        }[k]

    def segment_R(self, k: int, xi: np.ndarray | float) -> tuple[np.ndarray, np.ndarray]:
        """(R_u, R_v) from the formula of segment k, for any xi."""
        xi = np.asarray(xi, dtype=float)
        if k == 1:
            e = (xi - self.xi_1) * np.exp(-self.lambda_1 * xi)
            return self.eps_1 * e, self.eta_1 * e
        if k in (2, 3):
            rv = self.eta_2 * np.exp(self.lambda_2 * xi)
            if k == 2:
                return self.eps_2 * np.sin(self.delta_2 * (xi - self.xi_1 + self.delta_3)), rv
            return np.full_like(xi, -self.eps_3), rv
        ru = -self.eps_4 * np.exp(self.lambda_3 * xi)
        if k == 4:
            return ru, self.eta_3 * np.sin(self.delta_6 * (xi - self.xi_2))
        if k == 5:
            return ru, -self.eta_4 * np.exp(self.lambda_3 * xi)
        raise ValueError(f"segment index must be 1..5, got {k}")

    def segment_dR(self, k: int, xi: float) -> tuple[float, float]:
        """Exact first derivatives of (R_u, R_v) on segment k."""
        if k == 1:
            e = math.exp(-self.lambda_1 * xi) * (1 - self.lambda_1 * (xi - self.xi_1))
            return self.eps_1 * e, self.eta_1 * e
        if k in (2, 3):
            dv = self.lambda_2 * self.eta_2 * math.exp(self.lambda_2 * xi)
            if k == 2:
                return self.eps_2 * self.delta_2 * math.cos(self.delta_2 * (xi - self.xi_1 + self.delta_3)), dv
            return 0.0, dv
        du = -self.lambda_3 * self.eps_4 * math.exp(self.lambda_3 * xi)
        if k == 4:
            return du, self.eta_3 * self.delta_6 * math.cos(self.delta_6 * (xi - self.xi_2))
        if k == 5:
            return du, -self.lambda_3 * self.eta_4 * math.exp(self.lambda_3 * xi)
        raise ValueError(f"segment index must be 1..5, got {k}")

    def R(self, xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        xi = np.asarray(xi, dtype=float)
        ru, rv = np.empty_like(xi), np.empty_like(xi)
        for k in range(1, 6):
            lo, hi = self.segment_bounds(k)
            m = (xi >= lo) & (xi <= hi)
            ru[m], rv[m] = self.segment_R(k, xi[m])
        return ru, rv

    def constraints(self, a_base: float, b: float, r: float, d: float) -> dict[str, bool]:
        """The stated parameter constraints, evaluated individually."""
        mu = min(mu_u_plus(self.c_1), mu_v_plus(self.c_1, b, r, d))
        return {
            "delta_1 < 1/(lambda_1+lambda_2)": 0 < self.delta_1 < 1 / (self.lambda_1 + self.lambda_2),
            "delta_5 > 1/lambda_2": self.delta_5 > 1 / self.lambda_2,
            "0 < lambda_3 < min(mu_u+, mu_v+)": 0 < self.lambda_3 < mu,
            "lambda_1 > sigma_u+": self.lambda_1 > sigma_u_plus(self.c_1, a_base),
            "c_1 < c_2": self.c_1 < self.c_2,
            "delta_3 < delta_4": self.delta_3 < self.delta_4,
            "delta_7 <= delta_5": self.delta_7 <= self.delta_5,
        }

    def as_dict(self) -> dict:
        return asdict(self)


_DERIVED = {"eps_2", "eps_3", "eps_4", "eta_2", "eta_3", "eta_4"}

# corner name -> (field index, joint, segment right of the joint, segment left of it)
CORNERS = {
    "alpha_1": (0, "A", 1, 2),
    "alpha_2": (1, "A", 1, 2),
    "alpha_3": (0, "B", 2, 3),
    "alpha_4": (1, "C", 3, 4),
    "alpha_5": (0, "C", 3, 4),
    "alpha_6": (1, "D", 4, 5),
}
JOINT_SEGMENTS = {"A": (1, 2), "B": (2, 3), "C": (3, 4), "D": (4, 5)}


@dataclass
class SegmentCheck:
    n_nodes: int
    n1_max: float
    n2_min: float
    tol_n1: float
    tol_n2: float

    @property
    def passed(self) -> bool:
        return self.n1_max <= self.tol_n1 and self.n2_min >= -self.tol_n2


@dataclass
class AuditReport:
    joint_continuity: dict[str, float]
    corner_signs: dict[str, bool]
    corner_jumps: dict[str, float]
    segment_inequalities: dict[int, SegmentCheck]
    step5_proximity: float
    window: tuple[float, float]
    constraints: dict[str, bool] = field(default_factory=dict)
    spacing: float = math.nan

    @property
    def joints_ok(self) -> bool:
        return all(v <= JOINT_TOL for v in self.joint_continuity.values())

    @property
    def corners_ok(self) -> bool:
        return all(self.corner_signs.values())

    @property
    def segments_ok(self) -> bool:
        return all(s.passed for s in self.segment_inequalities.values())

    @property
    def passed(self) -> bool:
        return self.joints_ok and self.corners_ok and self.segments_ok and self.step5_proximity <= STEP5_TOL

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def failed_corners(self) -> set[str]:
        return {k for k, ok in self.corner_signs.items() if not ok}

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "joint_continuity": self.joint_continuity,
            "corner_signs": self.corner_signs,
            "corner_jumps": self.corner_jumps,
            "segment_inequalities": {str(k): {**asdict(s), "passed": s.passed} for k, s in self.segment_inequalities.items()},
            "step5_proximity": self.step5_proximity,
            "window": list(self.window),
            "spacing": self.spacing,
            "constraints": self.constraints,
        }


def audit_window(w: WaveProfile, floor: float = TAIL_FLOOR) -> tuple[float, float]:
    """xi range where both tails are above roundoff: U_0 >= floor on the right, V_0 >= floor on the left."""
    right = np.flatnonzero(w.U >= floor)
    left = np.flatnonzero(w.V >= floor)
    return float(w.xi[left[0]]), float(w.xi[right[-1]])


def _fd(f: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # rows of f are (xi-h, xi, xi+h)
    return f[1], (f[2] - f[0]) / (2 * h), (f[2] - 2 * f[1] + f[0]) / h**2


def _truncated(raw: np.ndarray, bound: float, upper: bool) -> tuple[np.ndarray, np.ndarray]:
    """Apply min(raw, 1) or max(raw, 0) and flag stencils that straddle the switch."""
    hit = raw >= bound if upper else raw <= bound
    straddle = hit.any(axis=0) & ~hit.all(axis=0)
    return np.where(hit, bound, raw), straddle


def supersolution_audit(
    sp: SupersolutionParams,
    base_profile: WaveProfile,
    p_target: ModelParams,
    delta_0: float,
    refine: int = 1,
    m_1: Optional[float] = None,
) -> AuditReport:
    """Check continuity, corner directions and N_1 <= 0, N_2 >= 0 for (U_0 - R_u, V_0 + R_v).

    The profile is interpolated with a cubic spline and sampled at spacing
    ``dxi / refine``. Upper and lower functions are truncated at 1 and 0.
    Stencils crossing a joint or a truncation switch are skipped; joints are
    covered by the exact one-sided derivative checks.
    """
    if not 0 < delta_0 < 1:
        raise ValueError(f"delta_0 must lie in (0, 1), got {delta_0}")
    if abs(p_target.a - (1 - delta_0)) > 1e-12:
        raise ValueError(f"target system must have a = 1 - delta_0 = {1 - delta_0}, got {p_target.a}")
    b, r, d = p_target.b, p_target.r, p_target.d
    coef = 1 - delta_0
    joints = sp.joints

    jc = {}
    for name, (kr, kl) in JOINT_SEGMENTS.items():
        ur, vr = sp.segment_R(kr, joints[name])
        ul, vl = sp.segment_R(kl, joints[name])
        jc[f"{name}:R_u"] = float(abs(ur - ul))
        jc[f"{name}:R_v"] = float(abs(vr - vl))
    signs, jumps = {}, {}
    for name, (comp, joint, kr, kl) in CORNERS.items():
        jump = sp.segment_dR(kr, joints[joint])[comp] - sp.segment_dR(kl, joints[joint])[comp]
        jumps[name] = float(jump)
        signs[name] = bool(jump > 0)

    lo, hi = audit_window(base_profile)
    if m_1 is not None:
        if -m_1 < lo:
            raise ConstructionError(f"-M_1 = {-m_1} lies outside the profile window starting at {lo}")
        lo = -m_1
    h = base_profile.dxi / refine
    if not (lo + 2 * h < joints["D"] and joints["A"] + 2 * h < hi):
        raise ConstructionError(f"joints [{joints['D']:.3g}, {joints['A']:.3g}] do not fit inside the window [{lo:.3g}, {hi:.3g}]")
    su = CubicSpline(base_profile.xi, base_profile.U)
    sv = CubicSpline(base_profile.xi, base_profile.V)
    xi = lo + h * np.arange(int(math.floor((hi - lo) / h + 1e-9)) + 1)

    segs = {}
    for k in range(1, 6):
        a_, b_ = sp.segment_bounds(k)
        m = (xi - h >= a_ - 1e-12) & (xi + h <= b_ + 1e-12) & (xi - h >= lo - 1e-12) & (xi + h <= hi + 1e-12)
        nodes = xi[m]
        if nodes.size == 0:
            segs[k] = SegmentCheck(0, -math.inf, math.inf, 0.0, 0.0)
            continue
        st = np.stack([nodes - h, nodes, nodes + h])
        ru, rv = sp.segment_R(k, st)
        ub, ustr = _truncated(su(st) - ru, 1.0, upper=True)
        vb, vstr = _truncated(sv(st) + rv, 0.0, upper=False)
        keep = ~(ustr | vstr)
        U, dU, d2U = (q[keep] for q in _fd(ub, h))
        V, dV, d2V = (q[keep] for q in _fd(vb, h))
        if U.size == 0:
            segs[k] = SegmentCheck(0, -math.inf, math.inf, 0.0, 0.0)
            continue
        reac_u = U * (1 - U - coef * V)
        reac_v = r * V * (1 - V - b * U)
        n1 = d2U + sp.c_2 * dU + reac_u
        n2 = d * d2V + sp.c_2 * dV + reac_v
        scale_1 = float(np.max(np.maximum.reduce([np.abs(d2U), np.abs(sp.c_2 * dU), np.abs(reac_u)])))
        scale_2 = float(np.max(np.maximum.reduce([np.abs(d * d2V), np.abs(sp.c_2 * dV), np.abs(reac_v)])))
        segs[k] = SegmentCheck(int(U.size), float(n1.max()), float(n2.min()), REL_TOL * scale_1, REL_TOL * scale_2)

    # far left: the truncated pair must already sit at (1, 0)
    ru, rv = sp.segment_R(5, lo)
    u_end = min(float(su(lo)) - float(ru), 1.0)
    v_end = max(float(sv(lo)) + float(rv), 0.0)
    prox = max(1 - u_end, v_end)

    return AuditReport(
        joint_continuity=jc,
        corner_signs=signs,
        corner_jumps=jumps,
        segment_inequalities=segs,
        step5_proximity=prox,
        window=(lo, hi),
        constraints=sp.constraints(1 + sp.delta_star, b, r, d),
        spacing=h,
    )


def tail_band(w: WaveProfile, rho: float = 0.02) -> float:
    """Smallest M_0 with U_0 < rho, V_0 > 1-rho for xi >= M_0 and the mirror statement for xi <= -M_0."""
    bad_right = (w.U >= rho) | (w.V <= 1 - rho)
    bad_left = (w.V >= rho) | (w.U <= 1 - rho)
    right = float(w.xi[np.flatnonzero(bad_right)[-1]]) + w.dxi
    left = float(w.xi[np.flatnonzero(bad_left)[0]]) - w.dxi
    return max(right, -left, 0.0)


@dataclass(frozen=True)
class SearchBox:
    """Candidate values; candidates are visited in lexicographic order of the tuples."""

    dc: tuple[float, ...] = (0.1, 0.15, 0.2, 0.3, 0.5)
    joint_offset: tuple[float, ...] = (1.0, 3.0, 6.0)
    eps_1: tuple[float, ...] = (1e-2, 1e-3, 1e-4)
    lambda_1_factor: tuple[float, ...] = (1.5, 2.0, 3.0)
    rho: float = 0.02
    eta_ratio: float = 1e-3
    lambda_2: float = 4.0
    delta_5: float = 0.5
    delta_1_fraction: float = 0.5
    delta_2: float = 0.01
    delta_3: float = 1.0
    delta_4_gap: float = 0.5
    delta_6: float = 0.01
    delta_7_fraction: float = 0.5
    lambda_3_fraction: float = 0.5

    def candidates(self):
        return product(self.dc, self.joint_offset, self.eps_1, self.lambda_1_factor)


def build_candidate(
    w: WaveProfile, p_base: ModelParams, delta_star: float, box: SearchBox, choice: tuple[float, float, float, float]
) -> SupersolutionParams:
    dc, offset, eps_1, lam_factor = choice
    c_1 = w.c
    c_2 = c_1 + dc
    m_0 = tail_band(w, box.rho)
    lambda_1 = max(lam_factor * sigma_u_plus(c_1, p_base.a), c_2)
    lambda_2 = box.lambda_2
    lambda_3 = box.lambda_3_fraction * min(mu_u_plus(c_1), mu_v_plus(c_1, p_base.b, p_base.r, p_base.d))
    return SupersolutionParams.matched(
        delta_star=delta_star,
        c_1=c_1,
        c_2=c_2,
        xi_1=m_0 + offset,
        xi_2=-(m_0 + offset) - box.delta_5,
        delta_1=box.delta_1_fraction / (lambda_1 + lambda_2),
        delta_2=box.delta_2,
        delta_3=box.delta_3,
        delta_4=box.delta_3 + box.delta_4_gap,
        delta_5=box.delta_5,
        delta_6=box.delta_6,
        delta_7=box.delta_7_fraction * box.delta_5,
        lambda_1=lambda_1,
        lambda_2=lambda_2,
        lambda_3=lambda_3,
        eps_1=eps_1,
        eta_1=box.eta_ratio * eps_1,
    )


@dataclass
class SearchResult:
    params: Optional[SupersolutionParams]
    report: Optional[AuditReport]
    choice: Optional[tuple]
    tried: int
    base_profile: WaveProfile
    base_speed: SpeedEstimate
    failures: list[str] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.params is not None

    def as_dict(self) -> dict:
        return {
            "found": self.found,
            "tried": self.tried,
            "choice": list(self.choice) if self.choice else None,
            "c_1": self.base_profile.c,
            "c_1_stderr": self.base_speed.stderr,
            "params": self.params.as_dict() if self.params else None,
            "report": self.report.as_dict() if self.report else None,
        }


def _audit_choice(job) -> tuple[Optional[SupersolutionParams], Optional[AuditReport], str]:
    w, p_base, p_target, delta_star, delta_0, box, choice = job
    try:
        sp = build_candidate(w, p_base, delta_star, box, choice)
        rep = supersolution_audit(sp, w, p_target, delta_0)
    except ConstructionError as exc:
        return None, None, str(exc)
    return sp, rep, rep.verdict


def search_supersolution(
    b: float = 2.0,
    r: float = 1.0,
    d: float = 1.0,
    delta_star: float = 0.05,
    delta_0: float = 0.01,
    cfg: RunConfig = RunConfig(),
    box: SearchBox = SearchBox(),
    workers: int = 1,
    base: Optional[tuple[WaveProfile, SpeedEstimate]] = None,
) -> SearchResult:
    """Audit candidates in lexicographic order and return the first that passes."""
    p_base = ModelParams(1 + delta_star, b, r, d)
    p_target = ModelParams(1 - delta_0, b, r, d)
    w, est = base if base is not None else converged_profile(p_base, cfg)
    choices = list(box.candidates())
    jobs = [(w, p_base, p_target, delta_star, delta_0, box, c) for c in choices]
    failures = []
    if workers > 1:
        results = parallel_map(_audit_choice, jobs, workers)
    else:
        results = (_audit_choice(j) for j in jobs)
    for i, (sp, rep, status) in enumerate(results):
        if rep is not None and rep.passed:
            return SearchResult(sp, rep, choices[i], i + 1, w, est, failures)
        failures.append(f"{choices[i]}: {status}")
    return SearchResult(None, None, None, len(choices), w, est, failures)


# ---------------------------------------------------------------- barrier


class BarrierRate(str, Enum):
    CORRECTED = "corrected"
    LITERAL = "literal"


@dataclass
class BarrierReport:
    a: float
    eps: float
    R: float
    rate: BarrierRate
    lam: float
    boundary_error: float
    range_ok: bool
    max_lhs: float
    worst_xi: float
    fd_identity_error: float
    dxi: float
    note: str = ""
    tol: float = 1e-10

    @property
    def inequality_ok(self) -> bool:
        return self.max_lhs <= self.tol

    @property
    def min_margin(self) -> float:
        return -self.max_lhs

    @property
    def passed(self) -> bool:
        return self.boundary_error <= 1e-12 and self.range_ok and self.inequality_ok

    def as_dict(self) -> dict:
        out = asdict(self)
        out["rate"] = self.rate.value
        out.update(passed=self.passed, inequality_ok=self.inequality_ok, min_margin=self.min_margin)
        return out


def barrier(xi: np.ndarray, lam: float, R: float) -> np.ndarray:
    """(e^{-lam(xi+2R)} + e^{lam(xi-2R)}) / (1 + e^{-4 lam R}) on [-2R, 2R]; equals 1 at both ends."""
    return (np.exp(-lam * (xi + 2 * R)) + np.exp(lam * (xi - 2 * R))) / (1 + np.exp(-4 * lam * R))


def large_a_barrier_check(
    a: float, eps: float, R: float, n_nodes: int = 2001, rate: BarrierRate | str = BarrierRate.CORRECTED
) -> BarrierReport:
    """Evaluate  U'' + U(1-U) - a eps U <= 0  for the cosh barrier at every node.

    With U'' = lam^2 U the left side is U (lam^2 + 1 - a eps - U). The literal
    rate lam = sqrt(a eps) leaves U (1 - U) >= 0, so it can never hold inside;
    the corrected rate lam = sqrt(a eps - 1) leaves -U^2 <= 0, which needs
    a eps > 1. When no corrected rate exists the literal one is evaluated.
    """
    if not (a > 0 and 0 < eps < 1 and R > 0):
        raise ValueError(f"need a > 0, 0 < eps < 1, R > 0; got a={a}, eps={eps}, R={R}")
    if n_nodes < 5:
        raise ValueError("n_nodes must be at least 5")
    rate = BarrierRate(rate)
    note = ""
    if rate is BarrierRate.CORRECTED and a * eps > 1:
        lam = math.sqrt(a * eps - 1)
    else:
        lam = math.sqrt(a * eps)
        if rate is BarrierRate.CORRECTED:
            note = "a*eps <= 1: no real corrected rate, literal rate evaluated"
    xi = np.linspace(-2 * R, 2 * R, n_nodes)
    h = xi[1] - xi[0]
    U = barrier(xi, lam, R)
    boundary = max(abs(U[0] - 1), abs(U[-1] - 1))
    range_ok = bool(np.all((U >= 0) & (U <= 1 + 1e-15)))
    lhs = lam**2 * U + U * (1 - U) - a * eps * U
    inner = lhs[1:-1]
    j = int(np.argmax(inner))
    fd = (U[2:] - 2 * U[1:-1] + U[:-2]) / h**2
    fd_err = float(np.max(np.abs(fd - lam**2 * U[1:-1])))
    return BarrierReport(a, eps, R, rate, lam, float(boundary), range_ok, float(inner[j]), float(xi[1 + j]), fd_err, float(h), note)
