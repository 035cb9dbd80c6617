"""Acceptance criteria at desk scale: domain [-200, 200], dx = 0.25, dt = 0.01, t_end = 200.

Every criterion prints one line ``ACCEPTANCE <k> PASS|FAIL: <detail>``.
Run ``python3 tests/test_acceptance.py`` to print the lines without pytest.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
import pytest

from frontlab.model import ModelParams, SignValue, classify_regime, Regime, guo_lin_sign, kanon_bounds
from frontlab.simulator import Grid1D
from frontlab.speed import (
    RunConfig,
    check_nonincreasing,
    continuity_scan,
    estimate_spreading_speed,
    estimate_wave_speed_signed,
    find_sign_threshold,
    scalar_front_speed,
)
from frontlab.twprofile import End, TailField, converged_profile, fit_decay_rates, profile_invariants
from frontlab.verify import comparison_test, large_a_barrier_check, search_supersolution, supersolution_audit

DESK = RunConfig()
FINE = RunConfig(grid=Grid1D.from_spacing(-200.0, 200.0, 0.125))

# criterion 2: four points per Guo-Lin branch family, nonzero closed-form sign
SIGN_POINTS = [
    (2, 3, 1, 1), (3, 2, 1, 1), (1.5, 4, 1, 1), (4, 1.5, 1, 1), (1.2, 1.5, 1, 1), (1.5, 1.2, 1, 1),
    (1.2, 5, 2, 1), (1.5, 6.5, 2, 1), (1.3, 3, 1.5, 1),
    (5, 1.2, 1, 2), (6.5, 1.5, 1, 2), (3, 1.3, 1, 1.5),
]
PROFILE_POINTS = [(2.0, 3.0), (3.0, 2.0), (2.0, 2.0)]
MODEL_B2 = dict(b=2.0, r=1.0, d=1.0)


def emit(k: int, passed: bool, detail: str) -> None:
    print(f"ACCEPTANCE {k} {'PASS' if passed else 'FAIL'}: {detail}")


@lru_cache(maxsize=None)
def profile(a: float, b: float, fine: bool = False):
    return converged_profile(ModelParams(a, b), FINE if fine else DESK)


@lru_cache(maxsize=None)
def supersolution():
    return search_supersolution(delta_star=0.05, delta_0=0.01, **MODEL_B2)


# ----------------------------------------------------------------- criteria


def criterion_1():
    est = estimate_wave_speed_signed(ModelParams(2.0, 2.0))
    return abs(est.value) <= 0.02, f"c(2,2) = {est.value:.3g} (|c| <= 0.02)"


def criterion_2():
    bad, lines = [], []
    for a, b, r, d in SIGN_POINTS:
        p = ModelParams(a, b, r, d)
        want = guo_lin_sign(p).value
        assert want in (SignValue.POSITIVE, SignValue.NEGATIVE), p
        est = estimate_wave_speed_signed(p)
        got = SignValue.POSITIVE if est.value > 0 else SignValue.NEGATIVE
        ok = got is want and abs(est.value) > 2 * est.stderr
        lines.append(f"{(a, b, r, d)}: {est.value:+.4f}")
        if not ok:
            bad.append((a, b, r, d))
    return not bad, f"{len(SIGN_POINTS) - len(bad)}/{len(SIGN_POINTS)} signs match; " + ", ".join(lines)


def criterion_3():
    errs = []
    for r, d in [(1, 1), (4, 1), (1, 4)]:
        est = scalar_front_speed("v", ModelParams(2.0, 2.0, r, d))
        target = 2 * math.sqrt(d * r)
        errs.append((r, d, est.value, (est.value - target) / target))
    ok = all(abs(e) <= 0.05 for *_, e in errs)
    return ok, "; ".join(f"(r,d)=({r},{d}) c={c:.4f} err={e:+.2%}" for r, d, c, e in errs)


def criterion_4():
    est = scalar_front_speed("u", ModelParams(2.0, 2.0))
    err = (est.value - 2.0) / 2.0
    return abs(err) <= 0.05, f"c = {est.value:.4f}, err {err:+.2%} vs 2"


def random_bistable_points(n: int = 20, seed: int = 7):
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < n:
        a, b = rng.uniform(1.05, 4.0, 2)
        r, d = rng.uniform(0.5, 2.0, 2)
        p = ModelParams(float(a), float(b), float(r), float(d))
        if classify_regime(p) is Regime.BISTABLE:
            pts.append(p)
    return pts


def criterion_5():
    worst, outside = math.inf, []
    for p in random_bistable_points():
        est = estimate_wave_speed_signed(p)
        lo, hi = kanon_bounds(p)
        slack = min(est.value - (lo - 0.05), (hi + 0.05) - est.value)
        worst = min(worst, slack)
        if slack < 0:
            outside.append((p.a, p.b, p.r, p.d, est.value))
    return not outside, f"20 points, smallest slack to the widened bounds {worst:.4f}; outside: {outside}"


A_SCAN = [round(0.6 + 0.1 * i, 10) for i in range(9)]


@lru_cache(maxsize=None)
def scan():
    return continuity_scan(a_list=A_SCAN, **MODEL_B2)


def criterion_6():
    res = scan()
    bad = check_nonincreasing(res.points)
    at_one = dict(res.points)[1.0]
    positive = at_one.value - 2 * at_one.stderr > 0
    ok = not bad and res.max_jump <= 0.1 and positive
    values = ", ".join(f"{a:g}:{e.value:.4f}" for a, e in res.points)
    return ok, (
        f"nonincreasing={not bad}, max jump {res.max_jump:.4f} (limit 0.1), "
        f"c(1) - 2se = {at_one.value - 2 * at_one.stderr:.4f}; {values}"
    )


def criterion_7():
    r2 = find_sign_threshold(2.0, 1.0, 1.0, (1.5, 2.5))
    r3 = find_sign_threshold(3.0, 1.0, 1.0, (2.0, 4.5))
    ok = 1.95 <= r2.a_star <= 2.05 and 2.9 <= r3.a_star <= 3.1
    return ok, f"a*(b=2) = {r2.a_star:.4f}, a*(b=3) = {r3.a_star:.4f}"


def criterion_8():
    margins = {}
    for a in (0.999, 0.99, 0.95):
        est = estimate_spreading_speed(ModelParams(a, **MODEL_B2))
        margins[a] = est.value - 2 * math.sqrt(1 - a) - 0.02 - 2 * est.stderr
    best = max(margins, key=margins.get)
    return margins[best] > 0, f"largest margin {margins[best]:.4f} at a={best}; " + ", ".join(
        f"a={a}: {m:+.4f}" for a, m in margins.items()
    )


def criterion_9():
    w, _ = profile(2.0, 3.0)
    fits = {(f.end, f.field): f for f in fit_decay_rates(w, ModelParams(2.0, 3.0))}
    fu = fits[(End.PLUS_INFINITY, TailField.U)]
    fv = fits[(End.MINUS_INFINITY, TailField.V)]
    ok = all(f.relative_error <= 0.10 and f.r_squared >= 0.98 for f in (fu, fv))
    return ok, (
        f"U rate {fu.rate:.4f} vs {fu.expected:.4f} ({fu.relative_error:.2%}, r2 {fu.r_squared:.5f}); "
        f"V rate {fv.rate:.4f} vs {fv.expected:.4f} ({fv.relative_error:.2%}, r2 {fv.r_squared:.5f})"
    )


def criterion_10():
    parts, ok = [], True
    for a, b in PROFILE_POINTS:
        w, _ = profile(a, b)
        wf, _ = profile(a, b, fine=True)
        inv = profile_invariants(w).passed and profile_invariants(wf).passed
        good = inv and w.residual_norm < 0.02 and wf.residual_norm < 0.011
        ok &= good
        parts.append(f"({a:g},{b:g}) invariants={inv} residual {w.residual_norm:.2e} -> {wf.residual_norm:.2e}")
    return ok, "; ".join(parts)


def criterion_11():
    rep = comparison_test(ModelParams(2.0, 3.0), n_pairs=20, seed=0)
    return rep.min_gap >= -1e-8, f"min gap {rep.min_gap:.3g} over 20 pairs x {rep.samples_per_pair} samples"


def criterion_12():
    good = large_a_barrier_check(100, 0.25, 5)
    bad = large_a_barrier_check(1, 0.01, 5)
    half = large_a_barrier_check(100, 0.25, 5, n_nodes=1001)
    ratio = half.fd_identity_error / good.fd_identity_error
    ok = good.passed and not bad.passed and 3.5 < ratio < 4.5
    return ok, (
        f"(100,.25,5) passed={good.passed} margin {good.min_margin:.3g}; (1,.01,5) passed={bad.passed}; "
        f"FD identity error {good.fd_identity_error:.2e} at dxi={good.dxi:g}, ratio under halving {ratio:.2f}"
    )


def criterion_13():
    res = supersolution()
    if not res.found:
        return False, f"no passing candidate among {res.tried}"
    sp = res.params
    lam_sum = sp.lambda_1 + sp.lambda_2
    flipped = sp.rematched(delta_1=1.5 / lam_sum)  # violates delta_1 < 1/(lambda_1 + lambda_2) only
    target = ModelParams(0.99, **MODEL_B2)
    rep = supersolution_audit(flipped, res.base_profile, target, 0.01)
    corners = rep.failed_corners
    ok = res.report.passed and corners and corners <= {"alpha_1", "alpha_2"} and "alpha_2" in corners
    return bool(ok), f"found after {res.tried} candidates {res.choice}; delta_1 flip fails {sorted(corners)}"


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 14)}


@pytest.mark.slow
@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_acceptance(k, capsys):
    passed, detail = CRITERIA[k]()
    with capsys.disabled():
        print()
        emit(k, passed, detail)
    assert passed, detail


if __name__ == "__main__":
    for k, fn in CRITERIA.items():
        try:
            emit(k, *fn())
        except Exception as exc:  # report and continue
            emit(k, False, f"{type(exc).__name__}: {exc}")
