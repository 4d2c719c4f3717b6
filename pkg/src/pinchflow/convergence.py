"""Constants behind the decay estimate: the g(alpha) maximisation, the (k, l)
feasibility system, the K_1 window check, and Riccati comparison solutions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import AlphaOutOfWindow, DomainError, NegativeDiscriminant, ValidationError

__all__ = [
    "critical_x",
    "AlphaWindow",
    "g_alpha",
    "g_alpha_d1",
    "g_alpha_d2",
    "maximize_g",
    "djokovic_f",
    "djokovic_check",
    "KLParams",
    "Infeasible",
    "select_kl",
    "lambda_hat",
    "verify_pinch_window",
    "RiccatiParams",
    "riccati_solution",
    "riccati_limit",
    "riccati_envelope",
    "riccati_printed_lower_branch",
    "G0_TRUNCATED",
]

G0_TRUNCATED = 0.141446
NONSTRICT_SLACK = 1e-12


def critical_x():
    """x* = sqrt((sqrt(21) - 3)/2), the positive root of x^4 + 3x^2 - 3."""
    return math.sqrt((math.sqrt(21.0) - 3.0) / 2.0)


X_STAR = critical_x()


@dataclass(frozen=True)
class AlphaWindow:
    alpha: float
    x_star: float = X_STAR

    def __post_init__(self):
        _check_alpha(self.alpha)


def _check_alpha(alpha):
    if not X_STAR < alpha < math.pi / 2:
        raise AlphaOutOfWindow(f"alpha must lie in ({X_STAR}, pi/2), got {alpha}")


def g_alpha(alpha):
    """g(alpha) = alpha ln(alpha/x*) / tan(alpha)."""
    _check_alpha(alpha)
    return alpha * math.log(alpha / X_STAR) / math.tan(alpha)


def g_alpha_d1(alpha):
    _check_alpha(alpha)
    L = math.log(alpha / X_STAR)
    s, c = math.sin(alpha), math.cos(alpha)
    return ((L + 1.0) * s * c - alpha * L) / (s * s)


def g_alpha_d2(alpha):
    _check_alpha(alpha)
    L = math.log(alpha / X_STAR)
    s, c = math.sin(alpha), math.cos(alpha)
    return (s * s * c / alpha + 2.0 * alpha * c * L - 2.0 * s - 2.0 * s * L) / s**3


def maximize_g(bracket_tol=1e-12, newton_steps=5):
    """Unique interior maximiser of g: Brent's method on g' then Newton polish."""
    lo, hi = X_STAR + 1e-9, math.pi / 2 - 1e-9
    if not (g_alpha_d1(lo) > 0 > g_alpha_d1(hi)):  # pragma: no cover - analytic fact
        raise ArithmeticError("g' does not change sign on the window")
    alpha = brentq(g_alpha_d1, lo, hi, xtol=bracket_tol)
    for _ in range(newton_steps):
        d1 = g_alpha_d1(alpha)
        if abs(d1) <= 1e-12:
            break
        alpha -= d1 / g_alpha_d2(alpha)
    if not g_alpha_d2(alpha) < 0:  # pragma: no cover
        raise ArithmeticError("critical point of g is not a maximum")
    return alpha, g_alpha(alpha)


def djokovic_f(alpha):
    """f(alpha) = (tan alpha - alpha)/alpha^3."""
    return (math.tan(alpha) - alpha) / alpha**3


def djokovic_check(x, alpha):
    """tan x > x + x^3/3 and tan x < x + f(alpha) x^3 for 0 < x < alpha < pi/2."""
    if not 0 < x < alpha < math.pi / 2:
        raise DomainError("need 0 < x < alpha < pi/2")
    f = djokovic_f(alpha)
    t = math.tan(x)
    lower = t - x - x**3 / 3.0
    upper = x + f * x**3 - t
    return {"lower_ok": lower > 0, "upper_ok": upper > 0, "f_alpha": f,
            "lower_margin": lower, "upper_margin": upper}


@dataclass(frozen=True)
class KLParams:
    k: float
    l: float
    log_k: float
    Lam: float
    delta: float
    n: int
    alpha: float
    l_interval: tuple
    k_interval_log: tuple
    margins: dict

    @property
    def feasible(self):
        # the non-strict inequalities hold with equality on a degenerate
        # l-interval, where round-off leaves margins of order -1e-14
        strict = ("log_width", "upper_half_pi", "ordered")
        return all(v > 0 if key in strict else v >= -NONSTRICT_SLACK for key, v in self.margins.items())


@dataclass(frozen=True)
class Infeasible:
    reason: str
    l_interval: tuple

    feasible = False


def _tau(Lam):
    return Lam + 1.0 / Lam


def _log_half_tau(Lam):
    return math.log1p((Lam - 1.0) ** 2 / (2.0 * Lam))


def kl_margins(log_k, l, Lam, delta, n):
    """Margins of the three feasibility inequalities (positive = satisfied)."""
    lht = _log_half_tau(Lam)
    nl = n * l
    kappa2 = math.exp(log_k - nl * math.log(2.0))  # k 2^-nl
    kappa_tau = math.exp(log_k - nl * math.log(_tau(Lam)))  # k tau^-nl
    return {
        "log_width": math.log(math.pi / 2) - math.log(X_STAR) - nl * lht,
        "tan_slope": l * delta / 10.0 - math.tan(kappa2) / kappa2,
        "upper_half_pi": math.pi / 2 - kappa2,
        "ordered": kappa2 - kappa_tau,
        "lower_x_star": kappa_tau - X_STAR,
    }


def select_kl(Lam, delta, n, alpha=None):
    """Midpoint choice of (k, l) satisfying the feasibility system, or Infeasible."""
    if alpha is None:
        alpha = maximize_g()[0]
    _check_alpha(alpha)
    if not Lam > 1:
        raise ValidationError("select_kl needs Lambda > 1")
    if not delta > 0:
        return Infeasible("delta must be positive", (math.nan, math.nan))
    lht = _log_half_tau(Lam)
    l_max = math.log(alpha / X_STAR) / (n * lht)
    l_min = (10.0 / delta) * (1.0 + djokovic_f(alpha) * alpha**2)
    if l_min > l_max * (1.0 + 1e-12):
        return Infeasible("l-interval empty: ln(tau/2) exceeds delta g(alpha)/(10 n)", (l_min, l_max))
    l_max = max(l_max, l_min)
    l = 0.5 * (l_min + l_max)
    nl = n * l
    log_lo = math.log(X_STAR) + nl * math.log(_tau(Lam))
    log_hi = math.log(alpha) + nl * math.log(2.0)
    # midpoint of [e^log_lo, e^log_hi] computed in logs
    log_k = log_hi + math.log(0.5 * (1.0 + math.exp(log_lo - log_hi)))
    k = math.exp(log_k) if log_k < 700 else math.inf
    margins = kl_margins(log_k, l, Lam, delta, n)
    return KLParams(k, l, log_k, Lam, delta, n, alpha, (l_min, l_max), (log_lo, log_hi), margins)


def lambda_hat(delta, n, truncated=False):
    """Pinching bound from delta: Lambda_hat with ln((L + 1/L)/2) = delta g0/(10 n)."""
    if delta < 0 or n < 1:
        raise ValidationError("need delta >= 0 and n >= 1")
    g0 = G0_TRUNCATED if truncated else maximize_g()[1]
    x = g0 * delta / (10.0 * n)
    return math.exp(x) + math.sqrt(math.expm1(2.0 * x))


def verify_pinch_window(k, l=None, Lam=None, delta=None, n=None, samples=10_000, log_k=None):
    """Grid check of (l-1)/(l x) < tan x < l delta x / 10 with x = k (*Omega)^l, and K_1."""
    if isinstance(k, KLParams):
        kl = k
        k, l, Lam, delta, n, log_k = kl.k, kl.l, kl.Lam, kl.delta, kl.n, kl.log_k
    if log_k is None:
        log_k = math.log(k)
    omega = np.linspace(_tau(Lam) ** -n, 2.0**-n, samples)
    x = np.exp(log_k + l * np.log(omega))
    lower = (l - 1.0) / (l * x) < np.tan(x)
    upper = np.tan(x) < l * delta * x / 10.0
    inside = x < math.pi / 2
    k1_values = 10.0 * np.sin(x) - l * delta * x * np.cos(x)
    K1 = float(np.max(k1_values))
    ok = bool(np.all(lower & upper & inside)) and K1 < 0
    return {"window_ok": ok, "K1": K1, "lower_violations": int(np.sum(~lower)),
            "upper_violations": int(np.sum(~(upper & inside))), "x_range": (float(x[0]), float(x[-1]))}


# ---------------------------------------------------------------------------
# Riccati comparison


@dataclass(frozen=True)
class RiccatiParams:
    """dy/dt = K3 y^2 + K1 y + K4, or dy/dt = K1 y^2 when ``simple``."""

    K1: float
    y0: float
    K3: float = 0.0
    K4: float = 0.0
    simple: bool = False

    def __post_init__(self):
        if self.simple:
            return
        if not self.K3 < 0:
            raise ValidationError("the general branch needs K3 < 0")
        if self.discriminant < 0:
            raise NegativeDiscriminant("K1^2 - 4 K3 K4 < 0")

    @property
    def discriminant(self):
        return self.K1**2 - 4.0 * self.K3 * self.K4

    @property
    def stable_root(self):
        return (-self.K1 - math.sqrt(self.discriminant)) / (2.0 * self.K3)

    @property
    def vertex(self):
        return -self.K1 / (2.0 * self.K3)

    def branch(self):
        if self.simple:
            return "simple"
        y_plus = self.stable_root
        if self.y0 > y_plus:
            return "above"
        if self.y0 == y_plus:
            return "at_root"
        return "below"


def riccati_solution(p, t):
    """Exact solution at time t >= 0."""
    if t < 0:
        raise ValidationError("t must be nonnegative")
    if p.simple:
        return p.y0 / (1.0 - p.y0 * p.K1 * t)
    sqd = math.sqrt(p.discriminant)
    y_plus = p.stable_root
    u0 = p.y0 - y_plus
    if u0 == 0:
        return y_plus
    if sqd == 0:
        return y_plus + u0 / (1.0 - p.K3 * u0 * t)
    if u0 > 0:
        # the displayed form with K5 = ln rho, written with exp(-sqrt(D) t) for stability
        rho = (2 * p.K3 * p.y0 + p.K1 - sqd) / (2 * p.K3 * p.y0 + p.K1 + sqd)
        e = math.exp(-sqd * t) / rho  # 1/E with E = rho exp(sqrt(D) t)
        return ((p.K1 + sqd) - (p.K1 - sqd) * e) / (-2.0 * p.K3 * (1.0 - e))
    # below the stable root: Bernoulli form in u = y - y_plus
    decay = math.exp(-sqd * t)
    c = p.K3 * u0 / sqd
    return y_plus + u0 * decay / (1.0 - c * (1.0 - decay))


def riccati_limit(p):
    """Long-time value of the solution."""
    if p.simple:
        if p.y0 == 0 or p.K1 < 0:
            return 0.0
        return math.inf
    return p.stable_root


def riccati_envelope(p):
    """Uniform bound L: the stable root when y0 is at or above the vertex, the vertex below it.

    Below the vertex this value is *not* an upper bound for the true
    solution, which rises to the stable root.
    """
    if p.y0 >= p.vertex:
        return p.stable_root
    return p.vertex


def riccati_printed_lower_branch(p, t):
    """Closed-form candidate for y0 below the stable root, kept for comparison; it does not solve the ODE."""
    D = p.discriminant
    K5 = math.log(-p.y0**2 - p.K1 * p.y0 / p.K3 - p.K4 / p.K3)
    rad = -math.exp(math.sqrt(D) * t + K5) + D / (4.0 * p.K3**2)
    sign = 1.0 if p.y0 >= p.vertex else -1.0
    return p.vertex + sign * math.sqrt(max(rad, 0.0))
