"""Graphical mean curvature flow of torus maps, its monitors, and the Riccati comparison."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .convergence import Infeasible, KLParams, verify_pinch_window
from .errors import EmptySeries, InfeasibleKL, NonGraphical, UnstableStep, ValidationError
from .torus import TorusMap

__all__ = ["FlowConfig", "FlowRecord", "FlowSeries", "monitors", "monitor_fields", "flow_step",
           "run_flow", "compare_to_riccati"]

GRAPHICAL_FLOOR = 1e-3
MONOTONE_TOL = 1e-6
PINCH_TOL = 1e-4
DET_DRIFT_LIMIT = 1e-3


@dataclass(frozen=True)
class FlowConfig:
    dt_factor: float = 0.2
    t_end: float = 1.0
    order: int = 2
    record_every: int = 100
    stop_II2: float = 0.0
    keep_fields: bool = False
    backend: str | None = None

    def __post_init__(self):
        if not 0 < self.dt_factor <= 0.25:
            raise UnstableStep(f"dt_factor must lie in (0, 0.25], got {self.dt_factor}")
        if not self.t_end > 0:
            raise ValidationError("t_end must be positive")
        if self.order not in (2, 4):
            raise ValidationError("stencil order must be 2 or 4")
        if self.record_every < 1:
            raise ValidationError("record_every must be >= 1")


@dataclass(frozen=True)
class FlowRecord:
    t: float
    min_star_omega: float
    max_star_omega: float
    max_lambda: float
    max_II2: float
    det_drift: float

    COLUMNS = ("t", "min_star_omega", "max_star_omega", "max_lambda", "max_II2", "det_drift")

    def row(self):
        return tuple(getattr(self, c) for c in self.COLUMNS)


@dataclass
class FlowSeries:
    records: list
    flags: dict = field(default_factory=dict)
    fields: list = field(default_factory=list)  # (star_omega, II2) per record when kept
    label: str = ""
    steps: int = 0
    dt: float = 0.0

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records])


def monitor_fields(tmap, order=2, backend=None):
    """Pointwise (*Omega, lambda_max, |II|^2, |det Du - 1|) arrays."""
    return _kernels.fields(tmap.w, tmap.B, tmap.h, order, backend)


def _record(t, star, lam, ii2, drift):
    return FlowRecord(float(t), float(star.min()), float(star.max()), float(lam.max()),
                      float(ii2.max()), float(drift.max()))


def monitors(tmap, order=2, backend=None, t=0.0):
    """FlowRecord of the current map, derivatives by the centred stencil."""
    return _record(t, *monitor_fields(tmap, order, backend))


def flow_step(tmap, dt, order=2, backend=None):
    """One explicit RK2 (Heun) step of dw/dt = g^{ij}(Du) d_ij w."""
    if dt > 0.25 * tmap.h**2 * (1 + 1e-12):
        raise UnstableStep(f"dt={dt} exceeds 0.25 dx^2 = {0.25 * tmap.h ** 2}")
    return tmap.copy(_heun(tmap.w, tmap.B, tmap.h, dt, order, backend))


def _heun(w, B, h, dt, order, backend):
    k1 = _kernels.rhs(w, B, h, order, backend)
    k2 = _kernels.rhs(w + dt * k1, B, h, order, backend)
    return w + (0.5 * dt) * (k1 + k2)


def run_flow(tmap, config):
    """Integrate to t_end (or until max|II|^2 < stop_II2), recording every record_every steps."""
    h = tmap.h
    dt = config.dt_factor * h * h
    nsteps = int(math.ceil(config.t_end / dt - 1e-9))
    w = tmap.w.copy()
    B = tmap.B
    series = FlowSeries([], label=tmap.label, dt=dt)

    def observe(t, w):
        star, lam, ii2, drift = _kernels.fields(w, B, h, config.order, config.backend)
        if not np.all(np.isfinite(star)) or not np.all(np.isfinite(ii2)):
            raise UnstableStep(f"non-finite state at t={t}")
        rec = _record(t, star, lam, ii2, drift)
        if rec.min_star_omega < GRAPHICAL_FLOOR:
            raise NonGraphical(f"min *Omega = {rec.min_star_omega} at t={t}")
        series.records.append(rec)
        if config.keep_fields:
            series.fields.append((star.copy(), ii2.copy()))
        return rec

    rec = observe(0.0, w)
    step = 0
    while step < nsteps and not (config.stop_II2 > 0 and rec.max_II2 < config.stop_II2):
        chunk = min(config.record_every - step % config.record_every, nsteps - step)
        full = chunk if step + chunk < nsteps else chunk - 1
        if full:
            w = _kernels.advance(w, B, h, dt, full, config.order, config.backend)
        step += full
        if step == nsteps - 1:
            # last step lands exactly on t_end
            w = _heun(w, B, h, config.t_end - step * dt, config.order, config.backend)
            step += 1
        t = step * dt if step < nsteps else config.t_end
        rec = observe(t, w)
    series.steps = step
    series.flags = _flags(series.records)
    series.final_map = tmap.copy(w)
    return series


def _flags(records):
    mins = np.array([r.min_star_omega for r in records])
    lams = np.array([r.max_lambda for r in records])
    drops = np.diff(mins)
    return {
        "monotonicity_violations": int(np.sum(drops < -MONOTONE_TOL)),
        "worst_min_star_omega_drift": float(drops.min()) if drops.size else 0.0,
        "pinching_violations": int(np.sum(lams > lams[0] + PINCH_TOL)),
        "max_lambda_excess": float(np.max(lams - lams[0])),
        "max_det_drift": float(max(r.det_drift for r in records)),
        "det_drift_ok": bool(max(r.det_drift for r in records) <= DET_DRIFT_LIMIT),
    }


def compare_to_riccati(series, k, l=None, delta=None, n=1, K1=None, log_k=None):
    """Check g_t = max |II|^2 / sin(k *Omega^l) against y(t) = y0/(1 - y0 K1 t).

    ``k`` may be a KLParams from select_kl.  K1 defaults to the grid maximum
    from verify_pinch_window at the run's measured initial pinch.
    """
    if not series.records:
        raise EmptySeries("empty series")
    if not series.fields:
        raise ValidationError("the run must keep pointwise fields (FlowConfig.keep_fields=True)")
    Lam = series.records[0].max_lambda
    if isinstance(k, Infeasible):
        raise InfeasibleKL(f"no feasible (k, l): {k.reason}")
    if isinstance(k, KLParams):
        kl = k
        if not kl.feasible:
            raise InfeasibleKL("the supplied (k, l) is not feasible")
        k, l, delta, n, log_k = kl.k, kl.l, kl.delta, kl.n, kl.log_k
    if log_k is None:
        if not k > 0:
            raise InfeasibleKL("k must be positive")
        log_k = math.log(k)
    window = verify_pinch_window(k, l, max(Lam, 1.0 + 1e-12), delta, n, log_k=log_k)
    if K1 is None:
        if not window["window_ok"]:
            raise InfeasibleKL("the window check fails for the measured initial pinch")
        K1 = window["K1"]
    g = []
    for star, ii2 in series.fields:
        x = np.exp(log_k + l * np.log(star))
        g.append(float(np.max(ii2 / np.sin(x))))
    g = np.array(g)
    t = series.column("t")
    y0 = g[0]
    denom = 1.0 - y0 * K1 * t
    with np.errstate(divide="ignore"):
        y = np.where(denom > 0, y0 / np.where(denom > 0, denom, 1.0), np.inf)
    margin = y - g
    vacuous = bool(K1 >= 0)
    holds = bool(np.all(g <= y * (1.0 + 1e-12)))
    later = margin[1:] if margin.size > 1 else margin
    return {
        "K1": float(K1),
        "y0": float(y0),
        "t": t.tolist(),
        "g": g.tolist(),
        "envelope": y.tolist(),
        "bound_holds": holds and not vacuous,
        "bound_vacuous": vacuous,
        "worst_margin": float(np.min(later)),
        "worst_relative_margin": _relative(later, y[1:]) if margin.size > 1 else 0.0,
        "measured_Lambda": float(Lam),
    }


def _relative(margin, y):
    scale = np.where(np.isfinite(y) & (y > 0), y, 1.0)
    return float(np.min(margin / scale))
