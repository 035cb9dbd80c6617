"""Parameters, regime classification and closed-form results for the
Lotka-Volterra competition-diffusion system

    u_t = u_xx + u (1 - u - a v)
    v_t = d v_xx + r v (1 - v - b u)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import RegimeError


class Regime(str, Enum):
    MONOSTABLE = "monostable"
    DEGENERATE = "degenerate"
    BISTABLE = "bistable"
    OUT_OF_SCOPE = "out_of_scope"


@dataclass(frozen=True)
class ModelParams:
    """The four PDE coefficients. All must be strictly positive."""

    a: float
    b: float
    r: float = 1.0
    d: float = 1.0

    def __post_init__(self):
        for name in ("a", "b", "r", "d"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")

    @property
    def regime(self) -> Regime:
        return classify_regime(self)

    def with_a(self, a: float) -> "ModelParams":
        return ModelParams(a, self.b, self.r, self.d)

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "r": self.r, "d": self.d}


def classify_regime(p: ModelParams) -> Regime:
    # a == 1 is an exact test on purpose; near-degenerate callers pass a explicitly.
    if p.b <= 1:
        return Regime.OUT_OF_SCOPE
    if p.a == 1:
        return Regime.DEGENERATE
    if p.a > 1:
        return Regime.BISTABLE
    return Regime.MONOSTABLE


def _require_bistable(p: ModelParams, what: str) -> None:
    if classify_regime(p) is not Regime.BISTABLE:
        raise RegimeError(f"{what} is only defined in the bistable regime (a>1, b>1); got {p}")


def linear_speed(a: float) -> float:
    """Spreading speed of the linearisation at the unstable state (0, 1)."""
    if not 0 < a <= 1:
        raise RegimeError(f"linear speed requires 0 < a <= 1 (state (0,1) is stable for a > 1); got a={a}")
    return 2.0 * math.sqrt(1.0 - a)


def fisher_speed(r: float, d: float) -> float:
    """KPP speed of ``v_t = d v_xx + r v (1 - v)``."""
    if r <= 0 or d <= 0:
        raise ValueError("r and d must be positive")
    return 2.0 * math.sqrt(d * r)


def kanon_bounds(p: ModelParams) -> tuple[float, float]:
    """Interval known to contain the bistable wave speed."""
    _require_bistable(p, "the wave-speed bound")
    return -fisher_speed(p.r, p.d), 2.0


class SignValue(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    ZERO = "zero"
    UNKNOWN = "unknown"


class SignSource(str, Enum):
    CLOSED_FORM = "closed_form"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class Sign:
    value: SignValue
    source: SignSource

    @classmethod
    def from_number(cls, x: float, zero_band: float) -> "Sign":
        if abs(x) <= zero_band:
            return cls(SignValue.ZERO, SignSource.NUMERIC)
        return cls(SignValue.POSITIVE if x > 0 else SignValue.NEGATIVE, SignSource.NUMERIC)


def guo_lin_sign(p: ModelParams) -> Sign:
    """Explicit sufficient conditions for the sign of the bistable wave speed.

    r == d: sign(b - a).  r > d: positive if b >= r^2 a / d^2.
    r < d: negative if a >= d^2 b / r^2.  Anything else is ``UNKNOWN``.
    """
    _require_bistable(p, "the Guo-Lin sign test")
    a, b, r, d = p.a, p.b, p.r, p.d
    unknown = Sign(SignValue.UNKNOWN, SignSource.CLOSED_FORM)
    if r == d:
        if b > a:
            return Sign(SignValue.POSITIVE, SignSource.CLOSED_FORM)
        if a == b:
            return Sign(SignValue.ZERO, SignSource.CLOSED_FORM)
        return Sign(SignValue.NEGATIVE, SignSource.CLOSED_FORM)
    if r > d:
        if b >= r * r * a / (d * d):
            return Sign(SignValue.POSITIVE, SignSource.CLOSED_FORM)
        return unknown
    if a >= d * d * b / (r * r):
        return Sign(SignValue.NEGATIVE, SignSource.CLOSED_FORM)
    return unknown


def llw_linear_condition(p: ModelParams) -> bool:
    """Lewis-Li-Weinberger sufficient condition for linear selection (monostable)."""
    return 0 < p.d < 2 and p.r * (p.a * p.b - 1) <= (2 - p.d) * (1 - p.a)


def huang_linear_condition(p: ModelParams) -> bool:
    """Huang's improved sufficient condition for linear selection (monostable)."""
    a, b, r, d = p.a, p.b, p.r, p.d
    if d == 1:
        second = -math.inf  # (d-2)/(2|d-1|) -> -inf as d -> 1
    else:
        second = (d - 2) / (2 * abs(d - 1))
    return ((2 - d) * (1 - a) + r) / (r * b) >= max(a, second)


@dataclass(frozen=True)
class DecayRates:
    """Exponential tail rates of a bistable wave with speed c.

    sigma_*: decay of U and 1-V as xi -> +inf; mu_*: decay of V and 1-U as xi -> -inf.
    """

    c: float
    sigma_u_plus: float
    sigma_v_plus: float
    mu_u_plus: float
    mu_v_plus: float
    resonance_flag: bool
    resonance_plus: bool = False
    resonance_minus: bool = False

    @property
    def one_minus_v_plus(self) -> float:
        """Rate governing 1-V at +inf: the slower of sigma_u+ and sigma_v+."""
        return min(self.sigma_u_plus, self.sigma_v_plus)

    @property
    def one_minus_u_minus(self) -> float:
        """Rate governing 1-U at -inf: the slower of mu_u+ and mu_v+."""
        return min(self.mu_u_plus, self.mu_v_plus)


def _close(x: float, y: float, rtol: float) -> bool:
    return abs(x - y) <= rtol * max(abs(x), abs(y), 1e-300)


def sigma_u_plus(c: float, a: float) -> float:
    return (c + math.sqrt(c * c + 4.0 * (a - 1.0))) / 2.0


def sigma_v_plus(c: float, r: float, d: float) -> float:
    return (c + math.sqrt(c * c + 4.0 * r * d)) / (2.0 * d)


def mu_u_plus(c: float) -> float:
    return (-c + math.sqrt(c * c + 4.0)) / 2.0


def mu_v_plus(c: float, b: float, r: float, d: float) -> float:
    return (-c + math.sqrt(c * c + 4.0 * r * d * (b - 1.0))) / (2.0 * d)


def decay_rates_formula(p: ModelParams, c: float, rtol: float = 1e-9) -> DecayRates:
    _require_bistable(p, "the tail decay rates")
    su = sigma_u_plus(c, p.a)
    sv = sigma_v_plus(c, p.r, p.d)
    mu = mu_u_plus(c)
    mv = mu_v_plus(c, p.b, p.r, p.d)
    res_plus = _close(su, sv, rtol)
    res_minus = _close(mu, mv, rtol)
    return DecayRates(
        c=c,
        sigma_u_plus=su,
        sigma_v_plus=sv,
        mu_u_plus=mu,
        mu_v_plus=mv,
        resonance_flag=res_plus or res_minus,
        resonance_plus=res_plus,
        resonance_minus=res_minus,
    )
