import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pinchflow.curvature import (
    ComplexIndexQuad,
    GrassmannI,
    QuadricIV,
    SkewII,
    SpaceKind,
    SymIII,
    TangentMatrix,
    condition_report,
    curvature_component,
    curvature_gap,
    curvature_real,
    frame_vector,
    h_normalizations,
    hol_sect_general,
    holomorphic_sectional,
    metric_real,
    pullback_component,
)
from pinchflow.errors import (
    IndexOutOfRange,
    ShapeMismatch,
    StructureViolation,
    UnsupportedPoint,
    ValidationError,
    ZeroVector,
)


def X(space, k, l):
    return TangentMatrix.unit(space, (k, l))


def Y(space, k, l):
    return TangentMatrix.unit(space, (k, l), imaginary=True)


def q(*slots, bars=(False, True, False, True)):
    return ComplexIndexQuad(slots, bars)


# --- spaces and tangent matrices -------------------------------------------


@pytest.mark.parametrize("kind,n,m", [("GrassmannI", 0, 1), ("GrassmannI", 1, 0), ("SkewII", 1, None),
                                      ("SymIII", 1, None), ("QuadricIV", 2, None), ("Bogus", 2, None)])
def test_space_domain_checks(kind, n, m):
    with pytest.raises(ValidationError):
        SpaceKind(kind, n, m)


def test_space_dimensions():
    assert GrassmannI(2, 3).dim == 6
    assert SkewII(3).dim == 3
    assert SymIII(3).dim == 6
    assert QuadricIV(4).dim == 4


def test_tangent_shape_and_structure():
    with pytest.raises(ShapeMismatch):
        TangentMatrix(GrassmannI(2, 2), np.zeros((2, 3), dtype=int))
    with pytest.raises(StructureViolation):
        TangentMatrix(SkewII(2), np.array([[0, 1], [1, 0]]))
    with pytest.raises(StructureViolation):
        TangentMatrix(SymIII(2), np.array([[0, 1], [0, 0]]))
    TangentMatrix(SkewII(2), np.array([[0, 1], [-1, 0]]))
    # imported data gets a 1e-12 tolerance
    TangentMatrix.imported(SymIII(2), np.array([[1, 2 + 1e-14], [2, 0]]))
    with pytest.raises(StructureViolation):
        TangentMatrix.imported(SymIII(2), np.array([[1, 2 + 1e-9], [2, 0]]))


# --- components ---------------------------------------------------------------


def test_component_examples():
    assert curvature_component(GrassmannI(1, 1), q((1, 1), (1, 1), (1, 1), (1, 1))) == -1
    assert curvature_component(GrassmannI(2, 1), q((1, 1), (1, 1), (2, 1), (2, 1))) == Fraction(-1, 2)
    Q = QuadricIV(3)
    assert curvature_component(Q, q(1, 1, 1, 1)) == -2
    assert curvature_component(Q, q(1, 2, 1, 2)) == 2
    assert curvature_component(Q, q(1, 1, 2, 2)) == -2


def test_component_type_rule_and_errors():
    G = GrassmannI(2, 2)
    assert curvature_component(G, q((1, 1), (1, 1), (1, 1), (1, 1), bars=(False, False, True, True))) == 0
    with pytest.raises(IndexOutOfRange):
        curvature_component(G, q((3, 1), (1, 1), (1, 1), (1, 1)))
    with pytest.raises(StructureViolation):
        curvature_component(SkewII(3), q((2, 1), (1, 2), (1, 2), (1, 2)))
    with pytest.raises(StructureViolation):
        curvature_component(SymIII(3), q((2, 1), (1, 2), (1, 2), (1, 2)))


def _all_quads(space):
    coords = space.coords
    return itertools.product(coords, repeat=4)


@pytest.mark.parametrize("space", [GrassmannI(2, 2), GrassmannI(1, 3), SkewII(3), SymIII(2), QuadricIV(3)])
def test_component_value_sets_and_symmetries(space):
    allowed = {Fraction(0), Fraction(-4), Fraction(-2), Fraction(2)} if space.kind == "QuadricIV" else \
        {Fraction(0), Fraction(-1, 2), Fraction(-1)}
    for a, b, c, d in _all_quads(space):
        v = curvature_component(space, q(a, b, c, d))
        assert v in allowed
        assert v == curvature_component(space, q(c, d, a, b))
        assert v == curvature_component(space, q(a, d, c, b))
        assert v == -curvature_component(space, q(a, d, b, c, bars=(False, True, True, False)))
        # conjugate pattern, R real
        assert v == curvature_component(space, q(b, a, d, c, bars=(True, False, True, False)))


def test_pullback_vs_literal_restriction():
    S = SymIII(3)
    diag = [a for a, c in enumerate(S.coords) if c[0] == c[1]]
    for a, b, c, d in itertools.product(diag, repeat=4):
        quad = q(*(S.coords[x] for x in (a, b, c, d)))
        assert pullback_component(S, a, b, c, d) == curvature_component(S, quad)
    # off-diagonal coordinates: the pull-back metric counts both matrix entries
    off = S.coords.index((1, 2))
    assert curvature_component(S, q((1, 2), (1, 2), (1, 2), (1, 2))) == -1
    assert pullback_component(S, off, off, off, off) == -2
    K = SkewII(3)
    assert curvature_component(K, q((1, 2), (1, 2), (1, 2), (1, 2))) == -1
    assert pullback_component(K, 0, 0, 0, 0) == -2


# --- real contractions ---------------------------------------------------------


@pytest.mark.parametrize("n,m", [(1, 1), (1, 2), (2, 2), (2, 3)])
def test_curvature_tables_exact(n, m):
    sp = GrassmannI(n, m)
    pairs = [(a, b) for a in range(1, n + 1) for b in range(1, m + 1)]
    for (k, l), (s, t), (mu, nu) in itertools.product(pairs, repeat=3):
        xx = 1 if (mu == s != k and l == t == nu) or (mu == s == k and l != t == nu) else 0
        xy = xx or (4 if mu == s == k and l == t == nu else 0)
        assert curvature_real(sp, X(sp, k, l), X(sp, s, t), X(sp, k, l), Y(sp, mu, nu)) == 0
        assert curvature_real(sp, X(sp, k, l), X(sp, s, t), X(sp, k, l), X(sp, mu, nu)) == xx
        assert curvature_real(sp, X(sp, k, l), Y(sp, s, t), X(sp, k, l), Y(sp, mu, nu)) == xy
    for (k, l), (s, t) in itertools.product(pairs, repeat=2):
        K_ST = curvature_real(sp, X(sp, k, l), Y(sp, s, t), X(sp, k, l), Y(sp, s, t))
        K_SS = curvature_real(sp, X(sp, k, l), X(sp, s, t), X(sp, k, l), X(sp, s, t))
        same_row, same_col = k == s, l == t
        assert K_ST == (4 if same_row and same_col else 1 if same_row != same_col else 0)
        assert K_SS == (0 if same_row and same_col else 1 if same_row != same_col else 0)


def test_curvature_real_examples():
    G = GrassmannI(2, 2)
    assert curvature_real(G, X(G, 1, 1), Y(G, 1, 1), X(G, 1, 1), Y(G, 1, 1)) == 4
    assert curvature_real(G, X(G, 1, 1), X(G, 1, 2), X(G, 1, 1), X(G, 1, 2)) == 1
    with pytest.raises(ShapeMismatch):
        curvature_real(G, X(G, 1, 1), X(G, 1, 1), X(G, 1, 1), X(GrassmannI(2, 3), 1, 1))


def test_curvature_real_float_matches_exact():
    G = GrassmannI(2, 3)
    rng = np.random.default_rng(3)
    ints = [rng.integers(-3, 4, size=(2, 2, 3)) for _ in range(4)]
    exact = [TangentMatrix(G, a[0], a[1]) for a in ints]
    floats = [TangentMatrix(G, a[0] + 1j * a[1]) for a in ints]
    assert float(curvature_real(G, *exact)) == pytest.approx(curvature_real(G, *floats), abs=1e-12)


def test_metric_examples():
    G = GrassmannI(2, 3)
    assert metric_real(G, None, X(G, 1, 1), X(G, 1, 1)) == 1
    assert metric_real(G, None, X(G, 1, 1), X(G, 1, 2)) == 0
    assert metric_real(G, None, Y(G, 1, 1), Y(G, 1, 1)) == 1
    # the general-Z formula reduces to the origin value at Z=0
    assert metric_real(G, np.zeros((2, 3)), Y(G, 1, 1), Y(G, 1, 1)) == pytest.approx(1.0, abs=1e-15)


def test_metric_general_point_positive():
    G = GrassmannI(2, 2)
    rng = np.random.default_rng(0)
    Z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    T = TangentMatrix(G, rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    assert metric_real(G, Z, T, T) > 0
    Q = QuadricIV(3)
    Tq = TangentMatrix(Q, np.array([1.0, 0.5j, 0.0]))
    assert metric_real(Q, np.array([0.3, 0.1j, 0.2]), Tq, Tq) > 0


# --- holomorphic sectional curvature ------------------------------------------


def test_holomorphic_examples():
    G = GrassmannI(2, 3)
    assert holomorphic_sectional(G, X(G, 1, 1)) == 4
    G2 = GrassmannI(2, 2)
    iso = TangentMatrix(G2, np.eye(2) / math.sqrt(2))
    assert holomorphic_sectional(G2, iso) == pytest.approx(2.0, abs=1e-12)
    T = TangentMatrix(G, np.array([[1, 2, 0], [0, -1, 3]]), np.array([[0, 1, 1], [2, 0, 0]]))
    assert holomorphic_sectional(G, T) == holomorphic_sectional(G, T.scaled(3))
    with pytest.raises(ZeroVector):
        holomorphic_sectional(G, TangentMatrix(G, np.zeros((2, 3), dtype=int)))


def test_displayed_formulas_are_half_of_intrinsic():
    S = SymIII(2)
    e11 = X(S, 1, 1)
    assert hol_sect_general(S, None, e11) == pytest.approx(2.0)
    Q = QuadricIV(3)
    assert hol_sect_general(Q, None, TangentMatrix(Q, np.array([1.0, 0, 0]))) == pytest.approx(1.0)
    iso = TangentMatrix(Q, np.array([1.0, 1j, 0]) / math.sqrt(2))
    assert hol_sect_general(Q, None, iso) == pytest.approx(2.0)
    for space, T in [(GrassmannI(2, 3), X(GrassmannI(2, 3), 1, 1)), (Q, iso)]:
        h = h_normalizations(space, T)
        assert h["intrinsic"] == pytest.approx(2.0 * h["displayed"], abs=1e-12)
    with pytest.raises(UnsupportedPoint):
        hol_sect_general(Q, np.array([0.1, 0, 0]), iso)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_holomorphic_range_grassmann(n, m, seed):
    G = GrassmannI(n, m)
    rng = np.random.default_rng(seed)
    T = TangentMatrix(G, rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m)))
    H = holomorphic_sectional(G, T)
    assert 4.0 / min(n, m) - 1e-9 <= H <= 4.0 + 1e-9


# --- gap and conditions ---------------------------------------------------------


@pytest.mark.parametrize("n,m", [(1, 1), (1, 2), (2, 2), (2, 3)])
def test_gap_is_four_delta(n, m):
    G = GrassmannI(n, m)
    for i in range(1, n * m + 1):
        for j in range(1, n * m + 1):
            assert curvature_gap(G, i, j) == (4 if i == j else 0)


def test_gap_examples_and_range():
    G = GrassmannI(2, 3)
    assert curvature_gap(G, 4, 4) == 4
    assert curvature_gap(G, 1, 5) == 0
    assert curvature_gap(GrassmannI(1, 1), 1, 1) == 4
    with pytest.raises(IndexOutOfRange):
        curvature_gap(G, 0, 1)
    with pytest.raises(IndexOutOfRange):
        curvature_gap(G, 1, 7)


@pytest.mark.parametrize("space", [GrassmannI(2, 2), GrassmannI(1, 3), SkewII(3), SymIII(2), QuadricIV(3)])
def test_lemma_gap_identity(space):
    """R(dx^s, dy^r, dx^s, dy^r) - R(dx^s, dx^r, dx^s, dx^r) = -4 Re R(r, s_bar, r, s_bar)."""
    d = space.dim
    for r in range(d):
        for s in range(d):
            xs, xr, yr = frame_vector(space, s), frame_vector(space, r), frame_vector(space, r, True)
            lhs = curvature_real(space, xs, yr, xs, yr) - curvature_real(space, xs, xr, xs, xr)
            assert lhs == -4 * pullback_component(space, r, s, r, s)


def test_condition_report_examples():
    rep = condition_report(GrassmannI(2, 2), 5, seed=11)
    assert rep["A_ok"] and rep["B_ok"]
    assert rep["C_lower_bound"] == 2
    assert condition_report(QuadricIV(3), 3, seed=1)["B_ok"] is False
    sym = condition_report(SymIII(2), 5, seed=2)
    assert sym["A_ok"] and sym["B_ok"]
    with pytest.raises(ValidationError):
        condition_report(GrassmannI(1, 1), 0, seed=0)


def test_condition_a_needs_isotropy_frames():
    """A generic unitary frame moves the table of a rank-2 Grassmannian; isotropy frames do not."""
    rep = condition_report(GrassmannI(2, 2), 5, seed=4)
    assert rep["A_deviation"] <= 1e-10
    assert rep["A_general_unitary_deviation"] > 0.1
