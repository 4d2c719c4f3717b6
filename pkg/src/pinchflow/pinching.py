"""The quadratic form Q(lambda, h), its minimum over pinched spectra, and closed-form constants."""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize

from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    EpsOutOfRange,
    InvalidPinch,
    InvalidXi,
    ValidationError,
)

__all__ = [
    "PinchSpectrum",
    "HTensor",
    "QMatrix",
    "q_form",
    "q_matrix",
    "delta_lambda",
    "smallest_eigenpair",
    "delta_Lambda",
    "delta_Lambda_detail",
    "lambda0",
    "Lambda0Estimate",
    "lambda1",
    "lambda_prime",
    "eps_of_pinch",
    "pinch_of_eps",
    "star_omega_threshold",
    "pinch_tensor_positivity",
    "flow_curvature_term",
    "constants_report",
]

MODES = ("full_symmetric", "unconstrained")
PAIRINGS = ("symplectic", "free")
ZERO_TOL = 1e-10


@dataclass(frozen=True)
class PinchSpectrum:
    lambdas: tuple
    pairing_mode: str = "symplectic"

    def __post_init__(self):
        lam = tuple(float(x) for x in np.asarray(self.lambdas, dtype=float).ravel())
        object.__setattr__(self, "lambdas", lam)
        if self.pairing_mode not in PAIRINGS:
            raise ValidationError(f"pairing_mode must be one of {PAIRINGS}")
        if len(lam) == 0 or len(lam) % 2:
            raise DimensionMismatch("a spectrum needs an even, nonzero number of values")
        if min(lam) <= 0:
            raise ValidationError("singular values must be positive")
        if self.pairing_mode == "symplectic":
            for a, b in zip(lam[0::2], lam[1::2]):
                if abs(a * b - 1.0) > 1e-12 or a > 1.0 + 1e-15 or b < 1.0 - 1e-15:
                    raise ValidationError("symplectic spectra pair as lambda_{2i-1} = 1/lambda_{2i} <= 1")

    @classmethod
    def symplectic(cls, xs):
        """Spectrum (x_1, 1/x_1, x_2, 1/x_2, ...) from values x_i in (0, 1]."""
        lam = []
        for x in np.atleast_1d(xs):
            lam += [float(x), 1.0 / float(x)]
        return cls(tuple(lam), "symplectic")

    @property
    def N(self):
        return len(self.lambdas) // 2

    def array(self):
        return np.array(self.lambdas)


def _lam_array(lam):
    if isinstance(lam, PinchSpectrum):
        return lam.array()
    arr = np.asarray(lam)
    if arr.dtype != object:
        arr = arr.astype(float)
    if arr.ndim != 1 or arr.size == 0 or arr.size % 2:
        raise DimensionMismatch("lambda must be a vector of even length 2N")
    return arr


@dataclass
class HTensor:
    """Second-fundamental-form coefficients h_ijk on a (2N)^3 grid."""

    values: np.ndarray
    symmetry_mode: str = "full_symmetric"

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 3 or len(set(v.shape)) != 1:
            raise DimensionMismatch("h must be a cubic 3-index array")
        if self.symmetry_mode not in MODES:
            raise ValidationError(f"symmetry_mode must be one of {MODES}")
        if self.symmetry_mode == "full_symmetric":
            for perm in itertools.permutations(range(3)):
                if np.any(v != v.transpose(perm)):
                    raise ValidationError("full_symmetric h must be invariant under index permutations")
        self.values = v

    @classmethod
    def symmetrized(cls, raw):
        """Average over the six index permutations (exact for Fraction arrays)."""
        raw = np.asarray(raw)
        total = sum(raw.transpose(p) for p in itertools.permutations(range(3)))
        avg = total * Fraction(1, 6) if raw.dtype == object else total / 6.0
        # float sums depend on the order of the terms; copy each entry from its
        # sorted-index representative so the symmetry is exact
        canon = np.sort(np.indices(raw.shape), axis=0)
        return cls(avg[tuple(canon)], "full_symmetric")

    def norm2(self):
        return (self.values * self.values).sum()


def _partner(i):
    """0-based index of i' = i + (-1)^(i+1) in 1-based numbering."""
    return i + 1 if i % 2 == 0 else i - 1


def q_form(lam, h):
    """Q(lambda, h) = sum h^2 - 2 sum_k sum_{i<j} (-1)^(i+j) l_i l_j (h_i'ik h_j'jk - h_i'jk h_j'ik)."""
    lam = _lam_array(lam)
    hv = h.values if isinstance(h, HTensor) else np.asarray(h)
    d = lam.size
    if hv.shape != (d, d, d):
        raise DimensionMismatch(f"h must have shape {(d, d, d)} for {d // 2} pairs")
    if hv.dtype == object or lam.dtype == object:
        return _q_form_exact(lam, hv)
    p = np.array([_partner(i) for i in range(d)])
    A = hv[p]  # A[i, j, k] = h[i', j, k]
    diag = A[np.arange(d), np.arange(d)]  # diag[i, k] = h[i', i, k]
    t1 = diag @ diag.T
    t2 = np.einsum("ijk,jik->ij", A, A)
    sign = np.array([[(-1.0) ** (i + j) for j in range(d)] for i in range(d)])
    coef = sign * np.outer(lam, lam)
    upper = np.triu(np.ones((d, d)), 1)
    return float(np.sum(hv * hv) - 2.0 * np.sum(upper * coef * (t1 - t2)))


def _q_form_exact(lam, hv):
    d = lam.size
    total = sum((x * x for x in hv.flat), Fraction(0))
    cross = Fraction(0)
    for k in range(d):
        for i in range(d):
            for j in range(i + 1, d):
                ip, jp = _partner(i), _partner(j)
                term = hv[ip, i, k] * hv[jp, j, k] - hv[ip, j, k] * hv[jp, i, k]
                if term:
                    cross += (-1) ** (i + j) * lam[i] * lam[j] * term
    return total - 2 * cross


@functools.lru_cache(maxsize=None)
def _pair_blocks(d):
    """Matrices B_ij with h^T B_ij h = h_i'ik h_j'jk - h_i'jk h_j'ik summed over k, i<j."""
    D = d**3
    idx = lambda i, j, k: (i * d + j) * d + k
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    blocks = np.zeros((len(pairs), D, D))
    for n, (i, j) in enumerate(pairs):
        ip, jp = _partner(i), _partner(j)
        B = blocks[n]
        for k in range(d):
            a, b = idx(ip, i, k), idx(jp, j, k)
            B[a, b] += 0.5
            B[b, a] += 0.5
            a, b = idx(ip, j, k), idx(jp, i, k)
            B[a, b] -= 0.5
            B[b, a] -= 0.5
    return pairs, blocks


@functools.lru_cache(maxsize=None)
def symmetric_basis(d):
    """Orthonormal basis (columns) of fully symmetric 3-tensors in R^(d^3)."""
    cols = []
    for t in itertools.combinations_with_replacement(range(d), 3):
        perms = set(itertools.permutations(t))
        v = np.zeros(d**3)
        for i, j, k in perms:
            v[(i * d + j) * d + k] = 1.0 / math.sqrt(len(perms))
        cols.append(v)
    return np.array(cols).T


@functools.lru_cache(maxsize=None)
def _mode_blocks(d, mode):
    pairs, blocks = _pair_blocks(d)
    if mode == "full_symmetric":
        P = symmetric_basis(d)
        blocks = np.einsum("ai,nab,bj->nij", P, blocks, P, optimize=True)
    return pairs, blocks


@dataclass
class QMatrix:
    matrix: np.ndarray
    mode: str
    d: int

    @property
    def dim(self):
        return self.matrix.shape[0]

    def coefficients(self, h):
        """Coordinates of h in the matrix's basis."""
        hv = (h.values if isinstance(h, HTensor) else np.asarray(h, dtype=float)).ravel()
        if self.mode == "full_symmetric":
            return symmetric_basis(self.d).T @ hv
        return hv

    def evaluate(self, h):
        c = self.coefficients(h)
        return float(c @ self.matrix @ c)


def _check_mode(mode, N):
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}")
    if mode == "unconstrained" and N > 4:
        raise DimensionTooLarge("unconstrained mode supports N <= 4 (dimension 512)")
    if mode == "full_symmetric" and N > 6:
        raise DimensionTooLarge("full_symmetric mode supports N <= 6")


def q_matrix(lam, mode="full_symmetric"):
    """Symmetric matrix of Q in the unconstrained or symmetric-tensor basis."""
    lam = _lam_array(lam).astype(float)
    d = lam.size
    _check_mode(mode, d // 2)
    pairs, blocks = _mode_blocks(d, mode)
    coef = np.array([-2.0 * (-1.0) ** (i + j) * lam[i] * lam[j] for i, j in pairs])
    M = np.eye(blocks.shape[1]) + np.tensordot(coef, blocks, axes=1)
    M = 0.5 * (M + M.T)
    return QMatrix(M, mode, d)


def smallest_eigenpair(lam, mode="full_symmetric"):
    """(value, vector, is_zero) of the smallest eigenvalue; |value| < 1e-10 is snapped to 0."""
    Q = q_matrix(lam, mode)
    w, v = np.linalg.eigh(Q.matrix)
    value = float(w[0])
    is_zero = abs(value) < ZERO_TOL
    return (0.0 if is_zero else value), v[:, 0], is_zero


def delta_lambda(lam, mode="full_symmetric"):
    """Smallest eigenvalue of Q at lambda (the infimum of Q over unit h)."""
    Q = q_matrix(lam, mode)
    value = float(np.linalg.eigvalsh(Q.matrix)[0])
    return 0.0 if abs(value) < ZERO_TOL else value


@dataclass
class DeltaEstimate:
    Lambda: float
    value: float
    argmin: tuple
    grid_step: float
    evaluations: int

    def __float__(self):
        return self.value


def _spectrum_from_params(x, Lam, pairing):
    lo = 1.0 / Lam
    if pairing == "symplectic":
        x = np.clip(x, lo, 1.0)
        out = np.empty(2 * x.size)
        out[0::2], out[1::2] = x, 1.0 / x
        return out
    return np.clip(x, lo, Lam)


def delta_Lambda_detail(Lam, N, mode="full_symmetric", pairing="symplectic",
                        grid_per_axis=9, refine_iters=400, seeds=()):
    """Grid scan plus Nelder-Mead estimate of inf delta_lambda over the pinched box.

    ``seeds`` are extra parameter points (inside the box) evaluated before
    refinement, used to carry minima forward along an increasing Lambda grid.
    """
    if Lam < 1:
        raise InvalidPinch(f"Lambda must be >= 1, got {Lam}")
    if pairing not in PAIRINGS:
        raise ValidationError(f"pairing must be one of {PAIRINGS}")
    _check_mode(mode, N)
    lo = 1.0 / Lam
    if pairing == "symplectic":
        nparam, hi = N, 1.0
    else:
        nparam, hi = 2 * N, Lam
    f = lambda x: delta_lambda(_spectrum_from_params(np.asarray(x, dtype=float), Lam, pairing), mode)
    if Lam == 1:
        x0 = np.ones(nparam)
        return DeltaEstimate(1.0, f(x0), tuple(_spectrum_from_params(x0, 1.0, pairing)), 0.0, 1)
    axis = np.linspace(lo, hi, grid_per_axis)
    best_x, best_v, count = None, math.inf, 0
    candidates = itertools.chain(itertools.product(axis, repeat=nparam), seeds)
    for x in candidates:
        x = np.clip(np.asarray(x, dtype=float), lo, hi)
        v = f(x)
        count += 1
        if v < best_v:
            best_x, best_v = x, v
    res = minimize(f, best_x, method="Nelder-Mead",
                   options={"maxiter": refine_iters, "xatol": 1e-9, "fatol": 1e-12,
                            "initial_simplex": _box_simplex(best_x, lo, hi, (hi - lo) / (grid_per_axis - 1))})
    count += res.nfev
    x_ref = np.clip(res.x, lo, hi)
    v_ref = f(x_ref)
    if v_ref < best_v:
        best_x, best_v = x_ref, v_ref
    return DeltaEstimate(float(Lam), best_v, tuple(_spectrum_from_params(best_x, Lam, pairing)),
                         (hi - lo) / (grid_per_axis - 1), count)


def _box_simplex(x, lo, hi, step):
    pts = [x]
    for i in range(x.size):
        y = x.copy()
        y[i] = y[i] + step / 2 if y[i] + step / 2 <= hi else y[i] - step / 2
        pts.append(np.clip(y, lo, hi))
    return np.array(pts)


def delta_Lambda(Lam, N, mode="full_symmetric", pairing="symplectic", grid_per_axis=9, refine_iters=400, seeds=()):
    """delta_Lambda = inf { delta_lambda : 1/Lambda <= lambda_i <= Lambda } (estimate)."""
    return delta_Lambda_detail(Lam, N, mode, pairing, grid_per_axis, refine_iters, seeds).value


def _params_of(spectrum, pairing):
    lam = np.asarray(spectrum)
    return lam[0::2] if pairing == "symplectic" else lam


@dataclass
class Lambda0Estimate:
    value: float
    unbounded: bool
    bracket: tuple
    degenerate: bool = False

    def __float__(self):
        return self.value


def lambda0(N, mode="full_symmetric", pairing="symplectic", probe=10.0, bisect_tol=1e-3, **kw):
    """Lambda_0(N) = sup { Lambda >= 1 : delta_Lambda > 0 }.

    Returns ``value = inf`` with ``unbounded=True`` when delta stays positive
    at the probe.  If delta is already non-positive at Lambda = 1 the set is
    empty and ``degenerate=True`` is set with value 1.
    """
    if probe <= 1:
        raise InvalidPinch("the probe must exceed 1")
    d_probe = delta_Lambda(probe, N, mode, pairing, **kw)
    if d_probe > 0:
        return Lambda0Estimate(math.inf, True, (probe, math.inf))
    if delta_Lambda(1.0, N, mode, pairing, **kw) <= 0:
        return Lambda0Estimate(1.0, False, (1.0, 1.0), degenerate=True)
    lo, hi = 1.0, float(probe)
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        if delta_Lambda(mid, N, mode, pairing, **kw) > 0:
            lo = mid
        else:
            hi = mid
    return Lambda0Estimate(0.5 * (lo + hi), False, (lo, hi))


# ---------------------------------------------------------------------------
# closed-form chains


def _check_pinch(Lam):
    if not Lam >= 1:
        raise InvalidPinch(f"Lambda must be >= 1, got {Lam}")


def _log_half_tau(Lam):
    """ln((Lambda + 1/Lambda)/2), accurate near Lambda = 1."""
    return math.log1p((Lam - 1.0) ** 2 / (2.0 * Lam))


def lambda_prime(Lam, n):
    """[(Lambda + 1/Lambda)/2]^n + sqrt([(Lambda + 1/Lambda)/2]^(2n) - 1)."""
    _check_pinch(Lam)
    if n < 1:
        raise ValidationError("n must be >= 1")
    if math.isinf(Lam):
        return math.inf
    t = n * _log_half_tau(Lam)
    return math.exp(t) + math.sqrt(math.expm1(2.0 * t))


def lambda1(n, Lam0):
    """b^(1/n) + sqrt(b^(2/n) - 1) with b = (Lambda0 + 1/Lambda0)/2; infinity maps to infinity."""
    Lam0 = float(Lam0)
    if math.isinf(Lam0):
        return math.inf
    _check_pinch(Lam0)
    t = _log_half_tau(Lam0) / n
    return math.exp(t) + math.sqrt(math.expm1(2.0 * t))


def eps_of_pinch(mn, Lam):
    """2^-mn - (Lambda + 1/Lambda)^-mn."""
    _check_pinch(Lam)
    return -(2.0**-mn) * math.expm1(-mn * _log_half_tau(Lam))


def pinch_of_eps(mn, eps):
    """r + sqrt(r^2 - 1) with r = 2^-mn / (2^-mn - eps)."""
    base = 2.0**-mn
    if not 0 <= eps < base:
        raise EpsOutOfRange(f"eps must lie in [0, 2^-{mn}), got {eps}")
    rm1 = eps / (base - eps)
    r = 1.0 + rm1
    return r + math.sqrt(rm1 * (r + 1.0))


def star_omega_threshold(Lam, mn):
    """2^(1-mn) * Lambda / (Lambda^2 + 1)."""
    _check_pinch(Lam)
    return 2.0 ** (1 - mn) * Lam / (Lam * Lam + 1.0)


def pinch_tensor_positivity(lam, Lam, Xi):
    """Matrix of S(e^k, e^l) on the adapted frame and the positivity of its A block."""
    if not Xi > 0:
        raise InvalidXi("Xi must be positive")
    lam = _lam_array(lam).astype(float)
    d = lam.size
    scale = Lam ** (2.0 + Xi) * np.sqrt(np.outer(1 + lam**2, 1 + lam**2))
    eye = np.eye(d)
    A = (Lam**2 - np.outer(lam, lam)) * eye / scale
    partner = np.zeros((d, d))
    for j in range(d):
        partner[_partner(j), j] = (-1.0) ** j  # (-1)^(j+1) with 1-based j
    B = (Lam**2 + np.outer(lam, lam)) * partner / scale
    S = np.block([[A, B], [B.T, A.copy()]])
    diag = np.diag(A)
    a_positive = bool(np.all(diag > 0))
    predicate = bool(np.min(Lam**2 - lam**2) > 0)
    return {"S_matrix": S, "A_positive": a_positive, "predicate": predicate, "consistent": a_positive == predicate}


def flow_curvature_term(lam, source="grassmann_closed_form", c=None, space=None):
    """Curvature contribution to the evolution of *Omega.

    ``source`` is ``"grassmann_closed_form"``, ``"flat"`` (needs ``c``) or
    ``"engine"`` (needs ``space``, a Grassmannian with 2nm = len(lambda)).
    """
    lam = _lam_array(lam).astype(float)
    if source == "grassmann_closed_form":
        even = lam[1::2]
        return float(4.0 * np.sum(((even**2 - 1.0) / (1.0 + even**2)) ** 2))
    if source == "flat":
        if c is None:
            raise ValidationError("the flat source needs a curvature constant c")
        odd = lam[0::2]
        return float(c * np.sum((1.0 - odd**2) ** 2 / (1.0 + odd**2) ** 2))
    if source == "engine":
        from .curvature import real_tensor

        if space is None:
            raise ValidationError("the engine source needs a space")
        if 2 * space.dim != lam.size:
            raise DimensionMismatch(f"{space} needs a spectrum of length {2 * space.dim}")
        R = real_tensor(space)
        # normalise the coordinate frame so it is orthonormal
        from .curvature import _hermitian_scale

        h = np.repeat(np.diag(_hermitian_scale(space)).astype(float), 2)
        Rn = R / np.sqrt(np.einsum("p,q,r,s->pqrs", h, h, h, h))
        d = lam.size
        total = 0.0
        for k in range(d):
            for i in range(d):
                if i == k:
                    continue
                Rikik = Rn[i, k, i, k]
                total += lam[i] * (Rikik - lam[k] ** 2 * Rikik) / ((1 + lam[k] ** 2) * (lam[i] + lam[_partner(i)]))
        return float(total)
    raise ValidationError(f"unknown source {source!r}")


def constants_report(N, Lambda_grid, mode="full_symmetric", pairing="symplectic",
                     grid_per_axis=9, refine_iters=400, probe=10.0, bisect_tol=1e-3, n_values=(1, 2, 3)):
    """delta_Lambda along an increasing grid, Lambda_0, and the Lambda_1 / Lambda' tables.

    Minimisers found at smaller Lambda are fed forward as seeds, which is
    legitimate because the pinched boxes are nested.
    """
    grid = sorted(float(x) for x in Lambda_grid)
    rows = []
    seeds = []
    for Lam in grid:
        est = delta_Lambda_detail(Lam, N, mode, pairing, grid_per_axis, refine_iters, tuple(seeds))
        seeds.append(tuple(_params_of(est.argmin, pairing)))
        rows.append(est)
    L0 = lambda0(N, mode, pairing, probe, bisect_tol, grid_per_axis=grid_per_axis, refine_iters=refine_iters)
    return {
        "N": N,
        "mode": mode,
        "pairing": pairing,
        "rows": rows,
        "lambda0": L0,
        "lambda1": {n: lambda1(n, L0.value) for n in n_values},
        "lambda_prime": {(Lam, n): lambda_prime(Lam, n) for Lam in grid for n in n_values},
    }
