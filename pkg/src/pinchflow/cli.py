"""Command-line front end: ``pinchflow {constants,curvature,appendix,simulate,sweep}``.

Every command takes ``--out PATH`` (stdout when omitted), ``--format
{csv,json,svg}`` (otherwise inferred from the suffix of ``--out``) and
``--config FILE``, a flat JSON object whose keys are option names; flags on
the command line override it.

Exit codes: 0 success, 1 invalid input (including usage errors), 2 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import __version__, _accel
from .errors import NumericalFailure, PinchflowError, ValidationError
from .svg import PlotSpec, Series, render_plot

__all__ = ["RunRecord", "main", "run_command", "parse_grid", "format_number", "write_csv"]

RESERVED = ("config", "version", "wall_time", "warnings")
DEFAULT_FORMAT = {"constants": "csv", "curvature": "json", "appendix": "json", "simulate": "csv", "sweep": "csv"}
THREADS_ENV = "PINCHFLOW_THREADS"


class UsageError(ValidationError):
    pass


# ---------------------------------------------------------------------------
# serialisation helpers


def jsonable(value):
    """Plain JSON-compatible copy: tuples become lists, non-finite floats become strings."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return jsonable(dataclasses.asdict(value))
    if value is None or isinstance(value, str):
        return value
    raise TypeError(f"cannot serialise {type(value).__name__}")


@dataclasses.dataclass
class RunRecord:
    """Config echo, tool version, wall time, payload and warnings of one run.

    The JSON form is flat: the four metadata keys sit beside the payload keys.
    """

    config: dict
    result: dict
    warnings: list = dataclasses.field(default_factory=list)
    version: str = __version__
    wall_time: float = 0.0

    def __post_init__(self):
        self.config = jsonable(self.config)
        self.result = jsonable(self.result)
        self.warnings = [str(w) for w in self.warnings]
        clash = set(self.result) & set(RESERVED)
        if clash:
            raise ValidationError(f"payload keys clash with metadata: {sorted(clash)}")

    def to_json(self):
        body = {"config": self.config, "version": self.version, "wall_time": self.wall_time,
                "warnings": self.warnings}
        body.update(self.result)
        return json.dumps(body, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        body = json.loads(text)
        if not isinstance(body, dict) or any(k not in body for k in RESERVED):
            raise ValidationError("not a run record")
        meta = {k: body.pop(k) for k in RESERVED}
        return cls(meta["config"], body, meta["warnings"], meta["version"], meta["wall_time"])


def format_number(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def config_comment(config):
    return f"# pinchflow {__version__} config: {json.dumps(jsonable(config), sort_keys=True)}"


def write_csv(fh, header, rows, config):
    """CSV with a leading config comment, 17 significant digits and LF line ends."""
    fh.write(config_comment(config) + "\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_number(v) for v in row])


def parse_grid(text):
    """'a:b:step' (inclusive) or a comma-separated list of numbers."""
    text = str(text).strip()
    try:
        if ":" in text:
            a, b, s = (float(x) for x in text.split(":"))
            if not s > 0 or b < a:
                raise ValidationError(f"bad grid {text!r}: need step > 0 and end >= start")
            count = int(math.floor((b - a) / s + 1e-9)) + 1
            return [a + k * s for k in range(count)]
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad grid {text!r}: {exc}") from None
    if not values:
        raise ValidationError("empty grid")
    return values


def _int_list(text):
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"expected a comma-separated list of integers, got {text!r}") from None


# ---------------------------------------------------------------------------
# commands: each returns (payload, table, plot, warnings) where table is
# (header, rows) for CSV and plot is (series list, PlotSpec) for SVG.


def cmd_constants(a):
    from .pinching import constants_report

    pairing = {"symplectic": "symplectic", "free": "free"}[a.mode]
    grid = parse_grid(a.Lambda_grid)
    rep = constants_report(a.N, grid, a.symmetry, pairing, a.grid_per_axis, a.refine_iters,
                           probe=a.probe)
    rows = [(r.Lambda, r.value) for r in rep["rows"]]
    warnings = []
    for (l0, d0), (l1, d1) in zip(rows, rows[1:]):
        if d1 > d0 + 1e-12:
            warnings.append(f"delta_Lambda increased from {d0} at {l0} to {d1} at {l1}")
    L0 = rep["lambda0"]
    payload = {
        "N": a.N, "mode": a.mode, "symmetry": a.symmetry,
        "rows": [{"Lambda": r.Lambda, "delta_Lambda": r.value, "argmin": list(r.argmin)} for r in rep["rows"]],
        "lambda0": {"value": L0.value, "unbounded": L0.unbounded, "bracket": list(L0.bracket),
                    "degenerate": L0.degenerate},
        "lambda1": {str(n): v for n, v in rep["lambda1"].items()},
    }
    if L0.degenerate:
        warnings.append("delta_Lambda is not positive at Lambda = 1; Lambda_0 is degenerate")
    plot = ([Series("delta_Lambda", [r[0] for r in rows], [r[1] for r in rows])],
            PlotSpec(f"pinching constant, N={a.N}", "Lambda", "delta_Lambda"))
    return payload, (("Lambda", "delta_Lambda"), rows), plot, warnings


SPACES = {"grassmann": "GrassmannI", "skew": "SkewII", "sym": "SymIII", "quadric": "QuadricIV"}


def cmd_curvature(a):
    from . import curvature as cv

    kind = SPACES[a.space]
    space = cv.SpaceKind(kind, a.n, a.m if kind == "GrassmannI" else None)
    d = space.dim
    if d > 12:
        raise ValidationError(f"complex dimension {d} is too large for a full component table (max 12)")
    labels = [".".join(str(x) for x in c) for c in space.coords]
    rows = []
    for p in range(d):
        for q in range(d):
            for r in range(d):
                for s in range(d):
                    v = cv.pullback_component(space, p, q, r, s)
                    if v:
                        rows.append((labels[p], labels[q], labels[r], labels[s], v))
    gap = [[cv.curvature_gap(space, i, j) for j in range(1, d + 1)] for i in range(1, d + 1)]
    rng = np.random.default_rng(a.seed)
    samples = rng.standard_normal((a.samples, d)) + 1j * rng.standard_normal((a.samples, d))
    H = cv._holomorphic_sectional_batch(space, samples)
    cond = cv.condition_report(space, a.condition_samples, a.seed)
    warnings = []
    if not cond["A_ok"]:
        warnings.append("condition (A) frame table varies under isotropy frames")
    payload = {
        "space": str(space),
        "complex_dim": d,
        "coordinates": labels,
        "components": [{"a": p, "b_bar": q, "c": r, "d_bar": s, "value": v} for p, q, r, s, v in rows],
        "gap_matrix": gap,
        "gap_is_4delta": all(gap[i][j] == (4 if i == j else 0) for i in range(d) for j in range(d)),
        "holomorphic_sectional_sampled": {"min": float(H.min()), "max": float(H.max()), "samples": a.samples},
        "conditions": cond,
    }
    table = (("a", "b_bar", "c", "d_bar", "value"), [(p, q, r, s, float(v)) for p, q, r, s, v in rows])
    order = np.sort(H)
    plot = ([Series("sorted H samples", np.arange(order.size), order)],
            PlotSpec(f"holomorphic sectional curvature on {space}", "sample rank", "H"))
    return payload, table, plot, warnings


def cmd_appendix(a):
    from .convergence import G0_TRUNCATED, X_STAR, AlphaWindow, g_alpha, maximize_g

    alpha0, g0 = maximize_g()
    AlphaWindow(alpha0)
    payload = {
        "alpha0": alpha0,
        "g0": g0,
        "x_star": X_STAR,
        "x_star_quartic_residual": X_STAR**4 + 3 * X_STAR**2 - 3,
        "g0_truncated": G0_TRUNCATED,
    }
    rows = [(k, payload[k]) for k in ("alpha0", "g0", "x_star")]
    xs = np.linspace(X_STAR + 1e-6, math.pi / 2 - 1e-6, 200)
    plot = ([Series("g(alpha)", xs, [g_alpha(x) for x in xs])],
            PlotSpec("g(alpha) = alpha ln(alpha/x*) / tan(alpha)", "alpha", "g"))
    return payload, (("name", "value"), rows), plot, []


def _build_map(a):
    from .torus import make_map, read_map

    if a.grid_file:
        return read_map(a.grid_file)
    kind = {"shears": "composed_shears", "composed_shears": "composed_shears",
            "identity": "identity", "linear": "linear"}.get(a.kind)
    if kind is None:
        raise ValidationError(f"unknown map kind {a.kind!r}")
    A = None
    if kind == "linear":
        vals = _int_list(a.A)
        if len(vals) != 4:
            raise ValidationError("--A takes four integers a11,a12,a21,a22")
        A = np.array(vals).reshape(2, 2)
    return make_map(kind, a.L, a.eps, a.harmonics, A)


def _flow_config(a, keep_fields):
    from .flow import FlowConfig

    backend = None if a.backend == "auto" else a.backend
    return FlowConfig(a.dt_factor, a.t_end, a.order, a.record_every, a.stop_II2, keep_fields, backend)


def _riccati(series, delta=None):
    from .convergence import select_kl
    from .flow import compare_to_riccati
    from .pinching import delta_Lambda

    Lam = max(series.records[0].max_lambda, 1.0)
    if delta is None:
        delta = delta_Lambda(Lam, 1)
    if Lam <= 1.0 + 1e-12:
        return None, "initial map is unpinched (Lambda = 1); Riccati comparison skipped"
    kl = select_kl(Lam, delta, 1)
    if not kl.feasible:
        reason = getattr(kl, "reason", "a feasibility margin is not positive")
        return None, f"no feasible (k, l) for measured Lambda = {Lam}: {reason}"
    rep = compare_to_riccati(series, kl)
    rep["k_log"], rep["l"], rep["delta"] = kl.log_k, kl.l, delta
    return rep, None


def cmd_simulate(a):
    from .flow import FlowRecord, run_flow
    from .torus import write_map

    tmap = _build_map(a)
    series = run_flow(tmap, _flow_config(a, keep_fields=a.riccati))
    warnings = []
    fl = series.flags
    if fl["monotonicity_violations"]:
        warnings.append(f"min *Omega dropped by more than tolerance at {fl['monotonicity_violations']} records")
    if fl["pinching_violations"]:
        warnings.append(f"max lambda exceeded its initial value at {fl['pinching_violations']} records")
    if not fl["det_drift_ok"]:
        warnings.append(f"det drift {fl['max_det_drift']} exceeds the validity threshold")
    payload = {
        "map": series.label,
        "backend": _accel.backend_name() if a.backend == "auto" else a.backend,
        "steps": series.steps,
        "dt": series.dt,
        "records": [dataclasses.asdict(r) for r in series.records],
        "flags": fl,
    }
    rows = [r.row() for r in series.records]
    t = [r[0] for r in rows]
    plot_series = [Series("max |II|^2", t, [r.max_II2 for r in series.records])]
    if a.riccati:
        rep, note = _riccati(series, a.delta)
        payload["riccati"] = rep
        if note:
            warnings.append(note)
        elif not rep["bound_holds"]:
            warnings.append("the measured g-series is not dominated by the Riccati envelope")
        if rep:
            plot_series = [Series("g_t measured", rep["t"], rep["g"]),
                           Series("Riccati envelope y(t)", rep["t"], rep["envelope"], dashed=True)]
    if a.save_map:
        write_map(a.save_map, series.final_map)
    # a log axis needs something positive; an exact fixed point plots as flat lines
    log_y = any(v > 0 for s in plot_series for v in s.y if math.isfinite(v))
    plot = (plot_series, PlotSpec(f"flow of {series.label}", "t", "value", log_y=log_y))
    return payload, (FlowRecord.COLUMNS, rows), plot, warnings


SWEEP_COLUMNS = ("eps", "harmonics", "L", "status", "steps", "max_II2_initial", "max_II2_final",
                 "decay_ratio", "min_star_omega_initial", "min_star_omega_final", "max_lambda_initial",
                 "max_lambda_excess", "max_det_drift", "monotonicity_violations", "pinching_violations")


def _sweep_cell(a, eps, harmonics, L):
    from .flow import run_flow
    from .torus import make_map

    try:
        tmap = make_map("composed_shears", L, eps, harmonics)
        s = run_flow(tmap, _flow_config(a, keep_fields=False))
    except NumericalFailure as exc:
        nan = math.nan
        return (eps, harmonics, L, type(exc).__name__, 0) + (nan,) * 8 + (0, 0)
    first, last, fl = s.records[0], s.records[-1], s.flags
    ratio = last.max_II2 / first.max_II2 if first.max_II2 > 0 else math.nan
    return (eps, harmonics, L, "ok", s.steps, first.max_II2, last.max_II2, ratio,
            first.min_star_omega, last.min_star_omega, first.max_lambda, fl["max_lambda_excess"],
            fl["max_det_drift"], fl["monotonicity_violations"], fl["pinching_violations"])


def worker_count(cells):
    cap = os.environ.get(THREADS_ENV)
    limit = os.cpu_count() or 1
    if cap:
        try:
            limit = int(cap)
        except ValueError:
            raise ValidationError(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
        if limit < 1:
            raise ValidationError(f"{THREADS_ENV} must be >= 1")
    return max(1, min(limit, cells))


def cmd_sweep(a):
    eps_values = parse_grid(a.eps_list)
    harmonics = _int_list(a.harmonics_list)
    sizes = _int_list(a.L_list)
    cells = [(e, h, L) for e in eps_values for h in harmonics for L in sizes]
    if not cells:
        raise ValidationError("the sweep has no cells")
    from .torus import make_map

    for e, h, L in cells:  # validate every cell before spending time on any
        make_map("composed_shears", L, e, h)
    with ThreadPoolExecutor(max_workers=worker_count(len(cells))) as pool:
        rows = list(pool.map(lambda c: _sweep_cell(a, *c), cells))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    failed = [r for r in rows if r[3] != "ok"]
    warnings = [f"cell eps={r[0]} harmonics={r[1]} L={r[2]} failed: {r[3]}" for r in failed]
    payload = {"cells": [dict(zip(SWEEP_COLUMNS, r)) for r in rows], "failed": len(failed)}
    series = []
    for L in sorted(set(sizes)):
        for h in sorted(set(harmonics)):
            pts = [(r[0], r[7]) for r in rows if r[2] == L and r[1] == h and r[3] == "ok"]
            if pts:
                series.append(Series(f"L={L}, harmonics={h}", [p[0] for p in pts], [p[1] for p in pts]))
    plot = (series, PlotSpec("decay of max |II|^2 over the run", "eps", "final / initial", log_y=True))
    return payload, (SWEEP_COLUMNS, rows), plot, warnings


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="pinchflow", description="Curvature, pinching constants and torus-map flow runs.")
    p.add_argument("--version", action="version", version=f"pinchflow {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(sp):
        sp.add_argument("--out", default=None, help="output path (stdout if omitted)")
        sp.add_argument("--format", choices=("csv", "json", "svg"), default=None)
        sp.add_argument("--config", default=None, help="flat JSON file of option defaults")

    c = sub.add_parser("constants", help="pinching constant delta_Lambda and Lambda_0")
    c.add_argument("--N", type=int, default=1)
    c.add_argument("--mode", choices=("symplectic", "free"), default="symplectic",
                   help="pairing of the singular values")
    c.add_argument("--symmetry", choices=("full_symmetric", "unconstrained"), default="full_symmetric")
    c.add_argument("--Lambda-grid", dest="Lambda_grid", default="1:4:0.5")
    c.add_argument("--grid-per-axis", dest="grid_per_axis", type=int, default=9)
    c.add_argument("--refine-iters", dest="refine_iters", type=int, default=400)
    c.add_argument("--probe", type=float, default=10.0)
    common(c)

    v = sub.add_parser("curvature", help="curvature components and conditions of a symmetric space")
    v.add_argument("--space", choices=tuple(SPACES), default="grassmann")
    v.add_argument("--n", type=int, default=2)
    v.add_argument("--m", type=int, default=2)
    v.add_argument("--samples", type=int, default=10_000)
    v.add_argument("--condition-samples", dest="condition_samples", type=int, default=20)
    v.add_argument("--seed", type=int, default=0)
    common(v)

    ap = sub.add_parser("appendix", help="alpha_0, g(alpha_0) and x*")
    common(ap)

    def flow_opts(sp):
        sp.add_argument("--t-end", dest="t_end", type=float, default=1.0)
        sp.add_argument("--order", type=int, choices=(2, 4), default=2)
        sp.add_argument("--dt-factor", dest="dt_factor", type=float, default=0.2)
        sp.add_argument("--record-every", dest="record_every", type=int, default=100)
        sp.add_argument("--stop-II2", dest="stop_II2", type=float, default=0.0)
        sp.add_argument("--backend", choices=("auto", "numba", "numpy"), default="auto")

    s = sub.add_parser("simulate", help="graphical mean curvature flow of a torus map")
    s.add_argument("--kind", default="shears", help="identity, linear or shears")
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--harmonics", type=int, default=1)
    s.add_argument("--A", default="1,1,0,1", help="integer matrix a11,a12,a21,a22 for --kind linear")
    s.add_argument("--L", type=int, default=64)
    s.add_argument("--grid-file", dest="grid_file", default=None)
    s.add_argument("--save-map", dest="save_map", default=None)
    s.add_argument("--riccati", action="store_true", help="compare against the Riccati envelope")
    s.add_argument("--delta", type=float, default=None, help="pinching constant for the comparison")
    flow_opts(s)
    common(s)

    w = sub.add_parser("sweep", help="composed-shear runs over a parameter grid, in parallel")
    w.add_argument("--eps-list", dest="eps_list", default="0.05,0.1")
    w.add_argument("--harmonics-list", dest="harmonics_list", default="1")
    w.add_argument("--L-list", dest="L_list", default="32")
    flow_opts(w)
    common(w)
    return p, sub.choices


def _load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ValidationError("config must be a JSON object")
    for k, v in data.items():
        if isinstance(v, (dict, list)) or v is None:
            raise ValidationError(f"config field {k!r} must be a string or number")
    return {k.replace("-", "_"): v for k, v in data.items()}


def _config_path(argv):
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def parse_args(argv):
    parser, subs = build_parser()
    first = parser.parse_args(argv)
    path = _config_path(argv)
    if path is None:
        return first
    cfg = _load_config(path)
    sp = subs[first.command]
    actions = {a.dest: a for a in sp._actions}
    defaults = {}
    for key, value in cfg.items():
        if key == "command":
            if value != first.command:
                raise ValidationError(f"config is for {value!r}, not {first.command!r}")
            continue
        if key not in actions or key in ("help", "config"):
            raise ValidationError(f"unknown config field {key!r} for {first.command}")
        act = actions[key]
        if isinstance(act, argparse._StoreTrueAction):
            defaults[key] = str(value).strip().lower() in ("1", "true", "yes", "on")
        else:
            # string defaults go through the option's type conversion and choices check
            defaults[key] = str(value) if not isinstance(value, str) else value
            if act.choices is not None:
                conv = act.type(defaults[key]) if act.type else defaults[key]
                if conv not in act.choices:
                    raise ValidationError(f"config field {key!r}: {value!r} not in {list(act.choices)}")
    sp.set_defaults(**defaults)
    return parser.parse_args(argv)


COMMANDS = {"constants": cmd_constants, "curvature": cmd_curvature, "appendix": cmd_appendix,
            "simulate": cmd_simulate, "sweep": cmd_sweep}


def _resolve_format(a):
    if a.format:
        return a.format
    if a.out:
        ext = os.path.splitext(a.out)[1].lower().lstrip(".")
        if ext in ("csv", "json", "svg"):
            return ext
    return DEFAULT_FORMAT[a.command]


def _config_echo(a, fmt):
    cfg = {k: v for k, v in vars(a).items() if k not in ("format",)}
    cfg["format"] = fmt
    return cfg


def run_command(argv, stdout=None):
    """Parse, dispatch and emit; return the exit code (errors are printed, not raised)."""
    stdout = stdout if stdout is not None else sys.stdout
    try:
        a = parse_args(list(argv))
        fmt = _resolve_format(a)
        config = _config_echo(a, fmt)
        start = time.perf_counter()
        payload, table, plot, warnings = COMMANDS[a.command](a)
        elapsed = time.perf_counter() - start
        if fmt == "csv":
            buf = io.StringIO(newline="")
            write_csv(buf, table[0], table[1], config)
            text = buf.getvalue()
        elif fmt == "json":
            text = RunRecord(config, payload, warnings, __version__, elapsed).to_json()
        else:
            series, spec = plot
            spec = dataclasses.replace(spec, metadata=config_comment(config)[2:])
            text = render_plot(series, spec)
        if a.out:
            with open(a.out, "w", newline="\n", encoding="utf-8") as fh:
                fh.write(text)
        else:
            stdout.write(text)
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)
        failed = payload.get("failed", 0) if isinstance(payload, dict) else 0
        return 2 if failed else 0
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalFailure as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except PinchflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None):
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
