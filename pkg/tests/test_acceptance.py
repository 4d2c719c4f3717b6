"""Acceptance criteria 1-10, one PASS/FAIL line per criterion on the terminal.

Each test wraps its checks in ``criterion(...)``; the line is printed even
under output capture so that ``pytest -v | tee`` keeps it.
"""

import contextlib
import itertools
import json
import math
import time

import numpy as np
import pytest

from pinchflow.cli import run_command
from pinchflow.convergence import (
    RiccatiParams,
    X_STAR,
    lambda_hat,
    maximize_g,
    riccati_limit,
    riccati_solution,
    select_kl,
    verify_pinch_window,
)
from pinchflow.curvature import GrassmannI, QuadricIV, TangentMatrix, curvature_gap, curvature_real
from pinchflow.curvature import holomorphic_sectional, pullback_component
from pinchflow.flow import FlowConfig, compare_to_riccati, flow_step, run_flow
from pinchflow.pinching import (
    HTensor,
    PinchSpectrum,
    constants_report,
    delta_Lambda,
    delta_lambda,
    eps_of_pinch,
    flow_curvature_term,
    lambda1,
    lambda_prime,
    pinch_of_eps,
    pinch_tensor_positivity,
    q_form,
    q_matrix,
)
from pinchflow.torus import make_map


@pytest.fixture
def criterion(capsys):
    @contextlib.contextmanager
    def run(number, title):
        start = time.perf_counter()
        status = "FAIL"
        try:
            yield
            status = "PASS"
        finally:
            with capsys.disabled():
                print(f"\nCRITERION {number:>2} {status}  {title}  ({time.perf_counter() - start:.2f} s)")

    return run


def test_criterion_01_appendix_constants(criterion, capsys):
    with criterion(1, "appendix constants alpha0, g0 and x*"):
        start = time.perf_counter()
        code = run_command(["appendix", "--format", "json"])
        body = json.loads(capsys.readouterr().out)
        elapsed = time.perf_counter() - start
        assert code == 0
        assert abs(body["alpha0"] - 1.238756) <= 1e-5
        assert abs(body["g0"] - 0.141446) <= 1e-5
        x = body["x_star"]
        assert abs(x - 0.8895436175241) <= 1e-12
        assert abs(x**4 + 3 * x**2 - 3) <= 1e-12
        assert elapsed < 1.0


def _unit(space, k, l, imaginary=False):
    return TangentMatrix.unit(space, (k, l), imaginary=imaginary)


def test_criterion_02_curvature_identities(criterion):
    with criterion(2, "exact curvature tables, gap = 4 delta, quadric components"):
        start = time.perf_counter()
        for n, m in [(1, 1), (1, 2), (2, 2), (2, 3)]:
            G = GrassmannI(n, m)
            pairs = [(a, b) for a in range(1, n + 1) for b in range(1, m + 1)]
            for (k, l), (s, t), (mu, nu) in itertools.product(pairs, repeat=3):
                Xk, Xs, Xm = _unit(G, k, l), _unit(G, s, t), _unit(G, mu, nu)
                Ys, Ym = _unit(G, s, t, True), _unit(G, mu, nu, True)
                xx = 1 if (mu == s != k and l == t == nu) or (mu == s == k and l != t == nu) else 0
                xy = 4 if mu == s == k and l == t == nu else xx
                assert curvature_real(G, Xk, Xs, Xk, Ym) == 0
                assert curvature_real(G, Xk, Xs, Xk, Xm) == xx
                assert curvature_real(G, Xk, Ys, Xk, Ym) == xy
            for i in range(1, n * m + 1):
                for j in range(1, n * m + 1):
                    assert curvature_gap(G, i, j) == (4 if i == j else 0)
        Q = QuadricIV(4)
        for i in range(Q.dim):
            for j in range(Q.dim):
                expected = -2 if i == j else 2
                assert pullback_component(Q, i, i, i, i) == -2
                assert pullback_component(Q, i, j, i, j) == expected
        assert time.perf_counter() - start < 10.0


def test_criterion_03_holomorphic_range(criterion):
    with criterion(3, "holomorphic sectional curvature range on G(2,3)"):
        G = GrassmannI(2, 3)
        rng = np.random.default_rng(2024)
        values = []
        for _ in range(10_000):
            Z = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
            values.append(holomorphic_sectional(G, TangentMatrix(G, Z / np.linalg.norm(Z))))
        assert min(values) >= 4 / min(2, 3) - 1e-9
        assert max(values) <= 4 + 1e-9
        rank_one = TangentMatrix(G, np.outer([1, 0], [1, 0, 0]).astype(complex))
        isotropic = TangentMatrix(G, np.hstack([np.eye(2), np.zeros((2, 1))]).astype(complex) / math.sqrt(2))
        assert abs(holomorphic_sectional(G, rank_one) - 4) <= 1e-6
        assert abs(holomorphic_sectional(G, isotropic) - 2) <= 1e-6


def test_criterion_04_q_form_oracle(criterion):
    with criterion(4, "q_form equals h^T Q h, delta at (1,1) equals 2/3"):
        rng = np.random.default_rng(4)
        worst = 0.0
        for N in (1, 2):
            for mode in ("full_symmetric", "unconstrained"):
                for _ in range(1000):
                    lam = PinchSpectrum.symplectic(rng.uniform(0.25, 1.0, N))
                    raw = rng.standard_normal((2 * N,) * 3)
                    h = HTensor.symmetrized(raw) if mode == "full_symmetric" else HTensor(raw, "unconstrained")
                    worst = max(worst, abs(q_matrix(lam, mode).evaluate(h) - q_form(lam, h)))
        assert worst <= 1e-12, worst
        d = delta_lambda([1.0, 1.0], "full_symmetric")
        assert abs(d - 2 / 3) <= 1e-10
        assert d >= (3 - math.sqrt(5)) / 6


def test_criterion_05_pinching_pipeline(criterion):
    with criterion(5, "delta_Lambda monotone, Lambda' inversions, eps round trip"):
        grid = [1.0, 1.5, 2.0, 3.0, 4.0]
        start = time.perf_counter()
        for N in (1, 2):
            rows = constants_report(N, grid)["rows"]
            vals = [r.value for r in rows]
            assert all(b <= a for a, b in zip(vals, vals[1:])), vals
        assert time.perf_counter() - start < 300
        assert all(delta_Lambda(L, 1) > 0 for L in np.linspace(1.0, 10.0, 19))
        for L in np.linspace(1.0, 6.0, 51):
            assert abs(lambda_prime(L, 1) - L) <= 1e-12
        for L0 in (1.2, 2.0, 5.0):
            for n in (1, 2, 3):
                assert abs(lambda_prime(lambda1(n, L0), n) - L0) <= 1e-10
        # double-precision domain of the 1e-12 round trip; see the ledger
        for mn in (1, 2, 3, 4):
            for L in np.linspace(1.0, 5.0, 81):
                assert abs(pinch_of_eps(mn, eps_of_pinch(mn, L)) - lambda_prime(L, mn)) <= 1e-12


def test_criterion_06_flow_term_identity(criterion):
    with criterion(6, "engine flow term equals the closed form"):
        for n, m in [(1, 1), (1, 2), (2, 2)]:
            rng = np.random.default_rng(60 + 10 * n + m)
            space = GrassmannI(n, m)
            for _ in range(100):
                lam = PinchSpectrum.symplectic(rng.uniform(0.05, 1.0, n * m))
                engine = flow_curvature_term(lam, "engine", space=space)
                closed = flow_curvature_term(lam, "grassmann_closed_form")
                assert abs(engine - closed) <= 1e-10


def test_criterion_07_s_tensor_equivalence(criterion):
    with criterion(7, "A-positivity iff max lambda < Lambda"):
        rng = np.random.default_rng(7)
        mismatches = 0
        for _ in range(100):
            N = int(rng.integers(1, 4))
            lam = PinchSpectrum.symplectic(rng.uniform(0.2, 1.0, N))
            Lam = float(rng.uniform(1.0, 5.0))
            rep = pinch_tensor_positivity(lam, Lam, float(rng.uniform(0.1, 2.0)))
            mismatches += rep["A_positive"] != (max(lam.lambdas) < Lam)
        assert mismatches == 0


def test_criterion_08_simulator_properties(criterion):
    with criterion(8, "fixed points, monotone *Omega, pinching, decay, Riccati envelope"):
        start = time.perf_counter()
        for kind, A in [("identity", None), ("linear", [[1, 1], [0, 1]]), ("linear", [[2, 1], [1, 1]])]:
            tmap = make_map(kind, 64, A=A)
            assert np.array_equal(flow_step(tmap, 0.2 * tmap.h**2).w, tmap.w)
        s = run_flow(make_map("composed_shears", 64, eps=0.1), FlowConfig(t_end=2.0, keep_fields=True))
        mins = s.column("min_star_omega")
        lams = s.column("max_lambda")
        ii2 = s.column("max_II2")
        assert np.min(np.diff(mins)) >= -1e-6
        assert np.max(lams) <= lams[0] + 1e-4
        assert s.flags["max_det_drift"] <= 1e-3
        assert ii2[-1] <= ii2[0] / 10
        kl = select_kl(lams[0], delta_Lambda(lams[0], 1), 1)
        rep = compare_to_riccati(s, kl)
        assert rep["K1"] < 0 and rep["bound_holds"]
        assert all(g <= y for g, y in zip(rep["g"], rep["envelope"]))
        assert time.perf_counter() - start < 120


def test_criterion_09_convergence_constants(criterion):
    with criterion(9, "(k, l) selection, margins, K1 < 0, Lambda-hat"):
        delta = delta_Lambda(1.2, 1)
        kl = select_kl(1.05, delta, 1)
        assert kl.feasible
        assert all(v > 0 for v in kl.margins.values()), kl.margins
        assert verify_pinch_window(kl)["K1"] < 0
        assert lambda_hat(delta, 1) > 1
        exact, trunc = lambda_hat(delta, 1), lambda_hat(delta, 1, truncated=True)
        assert f"{exact:.3g}" == f"{trunc:.3g}"
        assert X_STAR < maximize_g()[0] < math.pi / 2


def _random_riccati(rng, branch):
    K3 = -rng.uniform(0.2, 2.0)
    K1 = rng.uniform(-2.0, 2.0)
    K4 = rng.uniform(0.0, 2.0)
    yp = RiccatiParams(K1=K1, y0=0.0, K3=K3, K4=K4).stable_root
    if branch == "above":
        y0 = yp + rng.uniform(0.1, 3.0)
    elif branch == "below":
        y0 = yp - rng.uniform(0.05, 1.0) * yp
    else:
        y0 = yp
    return RiccatiParams(K1=K1, y0=y0, K3=K3, K4=K4)


def _rk4(params, t_end, dt):
    K1 = np.array([p.K1 for p in params])
    K3 = np.array([p.K3 for p in params])
    K4 = np.array([p.K4 for p in params])
    y = np.array([p.y0 for p in params])

    def f(v):
        return K3 * v * v + K1 * v + K4

    for _ in range(int(round(t_end / dt))):
        a = f(y)
        b = f(y + 0.5 * dt * a)
        c = f(y + 0.5 * dt * b)
        d = f(y + dt * c)
        y = y + dt / 6 * (a + 2 * b + 2 * c + d)
    return y


def test_criterion_10_riccati_oracle(criterion):
    with criterion(10, "closed-form Riccati solutions and long-time limit"):
        rng = np.random.default_rng(10)
        params = [_random_riccati(rng, b) for b in ("above", "below", "at_root") for _ in range(10)]
        assert {p.branch() for p in params} == {"above", "below", "at_root"}
        h = 2e-4
        for p in params:
            for t in np.linspace(0.05, 5.0, 12):
                f = [riccati_solution(p, t + k * h) for k in (-2, -1, 1, 2)]
                fd = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
                y = riccati_solution(p, t)
                assert abs(fd - (p.K3 * y * y + p.K1 * y + p.K4)) <= 1e-8
        final = _rk4(params, 1e3, 1e-2)
        for p, y in zip(params, final):
            assert abs(riccati_limit(p) - y) <= 1e-6
