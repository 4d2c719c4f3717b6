"""Curvature of the classical compact Hermitian symmetric spaces at a chart origin.

Conventions
-----------
Each space carries holomorphic coordinates ``Z^a`` centred at the origin:

* ``GrassmannI(n, m)``: all entries of an ``n x m`` matrix, flattened row-major.
* ``SkewII(n)``: entries ``(k, l)`` with ``k < l`` of a skew ``n x n`` matrix.
* ``SymIII(n)``: entries ``(k, l)`` with ``k <= l`` of a symmetric ``n x n`` matrix.
* ``QuadricIV(n)``: the ``n`` entries of a row vector.

The complex components ``R(a, b_bar, c, d_bar)`` are fourth derivatives of
half the log of the Kaehler potential.  Real vectors expand as
``d/dX = d/dZ + d/dZbar`` and ``d/dY = i (d/dZ - d/dZbar)``; the real tensor
is obtained once per space by multilinear expansion and stored as an
integer array holding twice its values, so contractions with rational
inputs stay exact.

SkewII and SymIII are totally geodesic in ``GrassmannI(n, n)``.  Their
geometric curvature is the pull-back of the Grassmann components along the
embedding ``d/dZ^(kl) -> E_kl -/+ E_lk``.  The literal "restriction" values
(the Grassmann delta formula read at the sub-space index pairs) are what
:func:`curvature_component` returns; :func:`pullback_component` gives the
geometric ones.  They agree on diagonal index pairs only.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import (
    IndexOutOfRange,
    ShapeMismatch,
    StructureViolation,
    UnsupportedPoint,
    ValidationError,
    ZeroVector,
)

__all__ = [
    "SpaceKind",
    "GrassmannI",
    "SkewII",
    "SymIII",
    "QuadricIV",
    "TangentMatrix",
    "ComplexIndexQuad",
    "curvature_component",
    "pullback_component",
    "curvature_real",
    "metric_real",
    "holomorphic_sectional",
    "hol_sect_general",
    "h_normalizations",
    "curvature_gap",
    "condition_report",
    "real_tensor",
    "frame_vector",
]

KINDS = ("GrassmannI", "SkewII", "SymIII", "QuadricIV")


@dataclass(frozen=True)
class SpaceKind:
    kind: str
    n: int
    m: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown space kind {self.kind!r}")
        if not isinstance(self.n, int) or (self.m is not None and not isinstance(self.m, int)):
            raise ValidationError("space dimensions must be integers")
        minimum = {"GrassmannI": 1, "SkewII": 2, "SymIII": 2, "QuadricIV": 3}[self.kind]
        if self.n < minimum:
            raise ValidationError(f"{self.kind} requires n >= {minimum}, got {self.n}")
        if self.kind == "GrassmannI":
            if self.m is None or self.m < 1:
                raise ValidationError("GrassmannI requires m >= 1")
        elif self.m is not None:
            raise ValidationError(f"{self.kind} takes a single size parameter")

    def __str__(self):
        if self.kind == "GrassmannI":
            return f"GrassmannI({self.n},{self.m})"
        return f"{self.kind}({self.n})"

    @property
    def shape(self):
        if self.kind == "GrassmannI":
            return (self.n, self.m)
        if self.kind == "QuadricIV":
            return (self.n,)
        return (self.n, self.n)

    @property
    def coords(self):
        """Index labels (1-based) of the holomorphic coordinates, in order."""
        return _coords(self)

    @property
    def dim(self):
        """Complex dimension."""
        return len(self.coords)


def GrassmannI(n, m):
    return SpaceKind("GrassmannI", n, m)


def SkewII(n):
    return SpaceKind("SkewII", n)


def SymIII(n):
    return SpaceKind("SymIII", n)


def QuadricIV(n):
    return SpaceKind("QuadricIV", n)


@functools.lru_cache(maxsize=None)
def _coords(space):
    n = space.n
    if space.kind == "GrassmannI":
        return tuple((i, a) for i in range(1, n + 1) for a in range(1, space.m + 1))
    if space.kind == "SkewII":
        return tuple((i, a) for i in range(1, n + 1) for a in range(i + 1, n + 1))
    if space.kind == "SymIII":
        return tuple((i, a) for i in range(1, n + 1) for a in range(i, n + 1))
    return tuple((i,) for i in range(1, n + 1))


# ---------------------------------------------------------------------------
# Tangent vectors


def _is_exact_scalar(x):
    return isinstance(x, (Rational, int, np.integer)) and not isinstance(x, bool)


def _to_exact(arr):
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        if isinstance(x, np.integer):
            x = int(x)
        if not _is_exact_scalar(x):
            raise ValidationError(f"entry {x!r} is not an exact rational")
        out[idx] = Fraction(x)
    return out


class TangentMatrix:
    """A real tangent vector ``sum Re(T^kl) d/dX^kl + Im(T^kl) d/dY^kl``.

    ``re`` may be a complex float array, in which case ``im`` must be
    omitted.  For exact arithmetic pass integer or ``Fraction`` arrays as
    ``re`` and (optionally) ``im``.  ``strict`` selects exact structural
    checks; imported data is checked to 1e-12 instead.
    """

    def __init__(self, space, re, im=None, *, strict=True):
        self.space = space
        re = np.asarray(re)
        im_arr = None if im is None else np.asarray(im)
        exact = re.dtype == object or np.issubdtype(re.dtype, np.integer)
        if im_arr is not None:
            exact = exact and (im_arr.dtype == object or np.issubdtype(im_arr.dtype, np.integer))
        if exact:
            self.re = _to_exact(re)
            self.im = _to_exact(im_arr) if im_arr is not None else _to_exact(np.zeros(re.shape, dtype=int))
        else:
            z = re.astype(complex)
            if im_arr is not None:
                z = z + 1j * im_arr.astype(float)
            self.re = z.real.astype(float)
            self.im = z.imag.astype(float)
        self.exact = exact
        if self.re.shape != space.shape or self.im.shape != space.shape:
            raise ShapeMismatch(f"{space} expects shape {space.shape}, got {self.re.shape}")
        self._check_structure(strict)

    @classmethod
    def imported(cls, space, entries):
        """Float data read from outside; structure checked to 1e-12."""
        return cls(space, np.asarray(entries, dtype=complex), strict=False)

    @classmethod
    def unit(cls, space, index, imaginary=False):
        """Exact matrix of the coordinate vector d/dX^index (or d/dY^index)."""
        re = np.zeros(space.shape, dtype=int)
        im = np.zeros(space.shape, dtype=int)
        target = im if imaginary else re
        _place_unit(space, index, target)
        return cls(space, re, im)

    def _check_structure(self, strict):
        kind = self.space.kind
        if kind not in ("SkewII", "SymIII"):
            return
        sign = -1 if kind == "SkewII" else 1
        for part in (self.re, self.im):
            diff = part - sign * part.T
            if self.exact:
                bad = any(x != 0 for x in diff.flat)
            else:
                scale = max(1.0, float(np.max(np.abs(part)))) if part.size else 1.0
                tol = 0.0 if strict else 1e-12 * scale
                bad = float(np.max(np.abs(diff))) > tol
            if bad:
                word = "skew-symmetric" if sign < 0 else "symmetric"
                raise StructureViolation(f"{self.space} needs a {word} matrix")

    def complex_array(self):
        return self.re.astype(float) + 1j * self.im.astype(float)

    def times_i(self):
        """The tangent matrix of J T, i.e. i*T."""
        out = TangentMatrix.__new__(TangentMatrix)
        out.space, out.exact = self.space, self.exact
        out.re, out.im = -self.im, self.re.copy()
        return out

    def scaled(self, c):
        out = TangentMatrix.__new__(TangentMatrix)
        out.space, out.exact = self.space, self.exact and _is_exact_scalar(c)
        if out.exact:
            c = Fraction(c)
            out.re, out.im = self.re * c, self.im * c
        else:
            out.re = self.re.astype(float) * float(c)
            out.im = self.im.astype(float) * float(c)
        return out

    def real_coords(self):
        """Interleaved real coordinates (Re T^1, Im T^1, Re T^2, ...)."""
        space = self.space
        dtype = object if self.exact else float
        x = np.zeros(2 * space.dim, dtype=dtype)
        if self.exact:
            x[:] = Fraction(0)
        for a, idx in enumerate(space.coords):
            pos = tuple(i - 1 for i in idx)
            x[2 * a] = self.re[pos]
            x[2 * a + 1] = self.im[pos]
        return x

    def __repr__(self):
        return f"TangentMatrix({self.space}, {self.complex_array()!r})"


def _place_unit(space, index, target):
    index = tuple(index) if not isinstance(index, int) else (index,)
    if index not in space.coords:
        raise IndexOutOfRange(f"{index} is not a coordinate index of {space}")
    pos = tuple(i - 1 for i in index)
    target[pos] = 1
    if space.kind == "SkewII":
        target[pos[::-1]] = -1
    elif space.kind == "SymIII":
        target[pos[::-1]] = 1


def frame_vector(space, a, imaginary=False):
    """Exact tangent matrix of the a-th (0-based) coordinate direction."""
    return TangentMatrix.unit(space, space.coords[a], imaginary)


# ---------------------------------------------------------------------------
# Complex components


@dataclass(frozen=True)
class ComplexIndexQuad:
    """Four coordinate slots with a bar tag each (True = antiholomorphic)."""

    slots: tuple
    bars: tuple = (False, True, False, True)

    def __post_init__(self):
        if len(self.slots) != 4 or len(self.bars) != 4:
            raise ValidationError("a component needs four slots and four bar tags")
        object.__setattr__(self, "slots", tuple(tuple(s) if not isinstance(s, int) else (s,) for s in self.slots))
        object.__setattr__(self, "bars", tuple(bool(b) for b in self.bars))


def _grassmann_delta(a, b, c, d):
    """Twice the delta formula with a=(i,al), b=(j,be), c=(k,ga), d=(h,de)."""
    (i, al), (j, be), (k, ga), (h, de) = a, b, c, d
    first = i == j and k == h and al == de and be == ga
    second = i == h and k == j and al == be and ga == de
    return -(int(first) + int(second))


def _quadric_delta(a, b, c, d):
    (i,), (j,), (k,), (l,) = a, b, c, d
    return 4 * (int(i == k and j == l) - int(i == j and k == l) - int(i == l and j == k))


def _check_slot(space, slot):
    if space.kind == "QuadricIV":
        if len(slot) != 1:
            raise IndexOutOfRange(f"{space} components take single indices")
        if not 1 <= slot[0] <= space.n:
            raise IndexOutOfRange(f"index {slot[0]} outside 1..{space.n}")
        return
    if len(slot) != 2:
        raise IndexOutOfRange(f"{space} components take index pairs")
    i, a = slot
    m = space.m if space.kind == "GrassmannI" else space.n
    if not (1 <= i <= space.n and 1 <= a <= m):
        raise IndexOutOfRange(f"index pair {slot} out of range for {space}")
    if space.kind == "SkewII" and not i < a:
        raise StructureViolation(f"{space} components need i < alpha, got {slot}")
    if space.kind == "SymIII" and not i <= a:
        raise StructureViolation(f"{space} components need i <= alpha, got {slot}")


def _reorder(bars):
    """Permutation bringing a mixed bar pattern to (h, a, h, a) and its sign."""
    patterns = {
        (False, True, False, True): ((0, 1, 2, 3), 1),
        (False, True, True, False): ((0, 1, 3, 2), -1),
        (True, False, False, True): ((1, 0, 2, 3), -1),
        (True, False, True, False): ((1, 0, 3, 2), 1),
    }
    return patterns.get(tuple(bars))


def curvature_component(space, quad):
    """Exact component value (a ``Fraction``) of the curvature tensor at Z=0.

    Patterns that are not of type (2,2) in each pair vanish.  For SkewII and
    SymIII this is the literal restriction of the Grassmann formula to the
    sub-space index pairs.
    """
    for slot in quad.slots:
        _check_slot(space, slot)
    hit = _reorder(quad.bars)
    if hit is None:
        return Fraction(0)
    perm, sign = hit
    a, b, c, d = (quad.slots[p] for p in perm)
    if space.kind == "QuadricIV":
        twice = _quadric_delta(a, b, c, d)
    else:
        twice = _grassmann_delta(a, b, c, d)
    # components are real, so the conjugate pattern has the same value
    return Fraction(sign * twice, 2)


@functools.lru_cache(maxsize=None)
def _embedding(space):
    """Real (parent_dim x dim) matrix of the coordinate embedding, and parent."""
    coords = space.coords
    if space.kind in ("GrassmannI", "QuadricIV"):
        return np.eye(len(coords), dtype=np.int64), space
    parent = GrassmannI(space.n, space.n)
    pidx = {c: p for p, c in enumerate(parent.coords)}
    emb = np.zeros((parent.dim, len(coords)), dtype=np.int64)
    sign = -1 if space.kind == "SkewII" else 1
    for a, (k, l) in enumerate(coords):
        emb[pidx[(k, l)], a] = 1
        if k != l:
            emb[pidx[(l, k)], a] = sign
    return emb, parent


@functools.lru_cache(maxsize=None)
def _component_tensor(space):
    """Integer array C2[a,b,c,d] = 2 R(a, b_bar, c, d_bar) in own coordinates."""
    if space.kind == "QuadricIV":
        coords = space.coords
        fn = _quadric_delta
    else:
        emb, parent = _embedding(space)
        coords = parent.coords
        fn = _grassmann_delta
    d = len(coords)
    c2 = np.zeros((d, d, d, d), dtype=np.int64)
    for p, q, r, s in itertools.product(range(d), repeat=4):
        c2[p, q, r, s] = fn(coords[p], coords[q], coords[r], coords[s])
    if space.kind in ("SkewII", "SymIII"):
        c2 = np.einsum("ABCD,Aa,Bb,Cc,Dd->abcd", c2, emb, emb, emb, emb, optimize=True)
    c2.setflags(write=False)
    return c2


def pullback_component(space, a, b, c, d):
    """Exact R(a, b_bar, c, d_bar) of the space's own metric (0-based coordinates)."""
    dim = space.dim
    for x in (a, b, c, d):
        if not 0 <= x < dim:
            raise IndexOutOfRange(f"coordinate {x} outside 0..{dim - 1}")
    return Fraction(int(_component_tensor(space)[a, b, c, d]), 2)


@functools.lru_cache(maxsize=None)
def _hermitian_scale(space):
    """Integer matrix h_ab of the Hermitian metric at Z=0 in own coordinates."""
    emb, _ = _embedding(space)
    h = emb.T @ emb
    if space.kind == "QuadricIV":
        h = 2 * h
    h.setflags(write=False)
    return h


@functools.lru_cache(maxsize=None)
def _real_tensor2(space):
    """Twice the real curvature tensor on the interleaved basis (X^1, Y^1, X^2, ...)."""
    c2 = _component_tensor(space).astype(complex)
    d = space.dim
    hol = np.zeros((2 * d, d), dtype=complex)
    for a in range(d):
        hol[2 * a, a] = 1.0
        hol[2 * a + 1, a] = 1j
    anti = hol.conj()
    t1 = np.einsum("abcd,pa,qb,rc,sd->pqrs", c2, hol, anti, hol, anti, optimize=True)
    full = t1 - t1.transpose(0, 1, 3, 2) - t1.transpose(1, 0, 2, 3) + t1.transpose(1, 0, 3, 2)
    if np.max(np.abs(full.imag)) > 1e-9:  # pragma: no cover - algebraic guarantee
        raise ArithmeticError("real curvature tensor picked up an imaginary part")
    r2 = np.rint(full.real).astype(np.int64)
    r2.setflags(write=False)
    return r2


def real_tensor(space):
    """Float copy of the real curvature tensor on the interleaved real basis."""
    return _real_tensor2(space) / 2.0


@functools.lru_cache(maxsize=None)
def _real_metric2(space):
    h = _hermitian_scale(space)
    d = space.dim
    g = np.zeros((2 * d, 2 * d), dtype=np.int64)
    g[0::2, 0::2] = h
    g[1::2, 1::2] = h
    return g


def _check_vectors(space, vecs):
    for t in vecs:
        if not isinstance(t, TangentMatrix):
            raise ShapeMismatch("expected TangentMatrix arguments")
        if t.space != space:
            raise ShapeMismatch(f"tangent matrix for {t.space} used on {space}")


def _contract_exact(r2, xs):
    supports = [np.flatnonzero([v != 0 for v in x]) for x in xs]
    total = Fraction(0)
    for p in supports[0]:
        for q in supports[1]:
            w = xs[0][p] * xs[1][q]
            for r in supports[2]:
                w3 = w * xs[2][r]
                for s in supports[3]:
                    v = r2[p, q, r, s]
                    if v:
                        total += v * w3 * xs[3][s]
    return total / 2


def curvature_real(space, t1, t2, t3, t4):
    """R(T1, T2, T3, T4) at the chart origin.

    Exact (``Fraction``) when all four tangent matrices are exact, float otherwise.
    """
    vecs = (t1, t2, t3, t4)
    _check_vectors(space, vecs)
    xs = [t.real_coords() for t in vecs]
    r2 = _real_tensor2(space)
    if all(t.exact for t in vecs):
        return _contract_exact(r2, xs)
    xs = [np.asarray(x, dtype=float) for x in xs]
    return float(np.einsum("pqrs,p,q,r,s->", r2, *xs, optimize=True)) / 2.0


def _metric_origin(space, t1, t2):
    x1, x2 = t1.real_coords(), t2.real_coords()
    g2 = _real_metric2(space)
    if t1.exact and t2.exact:
        return sum((int(g2[p, q]) * x1[p] * x2[q] for p, q in zip(*np.nonzero(g2))), Fraction(0))
    return float(np.asarray(x1, dtype=float) @ g2 @ np.asarray(x2, dtype=float))


def metric_real(space, Z, t1, t2):
    """Riemannian metric g = Re h at the chart point Z.

    For the matrix spaces this is ``Re Tr[(I+Z Z*)^-1 T1 (I+Z* Z)^-1 T2*]``
    evaluated on the full matrices; for the quadric the Hessian of
    ``ln(1 + |Z Z'|^2 + 2 Z Z*)``.  At ``Z=None`` (the origin) the value is
    exact for exact inputs.
    """
    _check_vectors(space, (t1, t2))
    if Z is None:
        return _metric_origin(space, t1, t2)
    Z = np.asarray(Z, dtype=complex)
    if Z.shape != space.shape:
        raise ShapeMismatch(f"chart point must have shape {space.shape}")
    a, b = t1.complex_array(), t2.complex_array()
    if space.kind == "QuadricIV":
        return float(np.real(a @ _quadric_hermitian(Z) @ b.conj()))
    zs = Z.conj().T
    left = np.linalg.inv(np.eye(Z.shape[0]) + Z @ zs)
    right = np.linalg.inv(np.eye(Z.shape[1]) + zs @ Z)
    return float(np.real(np.trace(left @ a @ right @ b.conj().T)))


def _quadric_hermitian(Z):
    """h_{i jbar} = F_{i jbar}/F - F_i F_jbar / F^2 for F = 1 + |ZZ'|^2 + 2 Z Z*."""
    s = np.sum(Z * Z)
    F = 1.0 + abs(s) ** 2 + 2.0 * np.sum(np.abs(Z) ** 2)
    Fi = 2.0 * Z * np.conj(s) + 2.0 * np.conj(Z)
    Fij = 4.0 * np.outer(Z, Z.conj()) + 2.0 * np.eye(len(Z))
    return Fij / F - np.outer(Fi, Fi.conj()) / F**2


def holomorphic_sectional(space, t):
    """H(T) = R(T, JT, T, JT) / g(T, T)^2 at the chart origin."""
    _check_vectors(space, (t,))
    g = _metric_origin(space, t, t)
    if g == 0:
        raise ZeroVector("holomorphic sectional curvature of the zero vector")
    jt = t.times_i()
    return curvature_real(space, t, jt, t, jt) / (g * g)


def _holomorphic_sectional_batch(space, coords):
    """H for a batch of complex own-coordinate vectors (B x dim), floats."""
    coords = np.atleast_2d(coords)
    x = np.empty((coords.shape[0], 2 * space.dim))
    x[:, 0::2], x[:, 1::2] = coords.real, coords.imag
    jx = np.empty_like(x)
    jx[:, 0::2], jx[:, 1::2] = -coords.imag, coords.real
    r = real_tensor(space)
    num = np.einsum("pqrs,bp,bq,br,bs->b", r, x, jx, x, jx, optimize=True)
    g = np.einsum("bp,pq,bq->b", x, _real_metric2(space).astype(float), x)
    return num / g**2


def hol_sect_general(space, Z, t):
    """The displayed trace-ratio formulas H_I, H_II, H_III at Z and H_IV at Z=0.

    These carry a prefactor that makes them exactly half of
    :func:`holomorphic_sectional` at the origin.
    """
    _check_vectors(space, (t,))
    T = t.complex_array()
    if not np.any(T):
        raise ZeroVector("holomorphic sectional curvature of the zero vector")
    if space.kind == "QuadricIV":
        if Z is not None and np.any(np.asarray(Z)):
            raise UnsupportedPoint("the quadric formula is only available at Z=0")
        tt = float(np.real(T @ T.conj()))
        return (2.0 * tt**2 - abs(T @ T) ** 2) / tt**2
    Z = np.zeros(space.shape, dtype=complex) if Z is None else np.asarray(Z, dtype=complex)
    if Z.shape != space.shape:
        raise ShapeMismatch(f"chart point must have shape {space.shape}")
    if space.kind == "GrassmannI":
        zb, tb = Z.conj().T, T.conj().T
        left = np.linalg.inv(np.eye(space.n) + Z @ zb)
        right = np.linalg.inv(np.eye(space.m) + zb @ Z)
    else:
        sign = -1.0 if space.kind == "SkewII" else 1.0
        zb, tb = Z.conj(), T.conj()
        left = np.linalg.inv(np.eye(space.n) + sign * Z @ zb)
        right = np.linalg.inv(np.eye(space.n) + sign * zb @ Z)
    M = left @ T @ right @ tb
    return float(np.real(2.0 * np.trace(M @ M) / np.trace(M) ** 2))


def h_normalizations(space, t):
    """Both normalizations side by side: intrinsic H and the displayed formula."""
    return {"intrinsic": float(holomorphic_sectional(space, t)), "displayed": hol_sect_general(space, None, t)}


def curvature_gap(space, i, j):
    """R(e_i, f_j, e_i, f_j) - R(e_i, e_j, e_i, e_j) with e_k = d/dx^k, f_k = d/dy^k (1-based)."""
    d = space.dim
    if not (1 <= i <= d and 1 <= j <= d):
        raise IndexOutOfRange(f"frame indices must lie in 1..{d}")
    ei = frame_vector(space, i - 1)
    ej = frame_vector(space, j - 1)
    fj = frame_vector(space, j - 1, imaginary=True)
    return curvature_real(space, ei, fj, ei, fj) - curvature_real(space, ei, ej, ei, ej)


# ---------------------------------------------------------------------------
# Conditions (A), (B), (C)


def _random_unitary(rng, k):
    q, r = np.linalg.qr(rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _isotropy_frame(space, rng):
    """Unitary frame obtained by moving the coordinate frame with an isotropy element.

    Returns complex own-coordinate vectors of the images of d/dZ^a (rows).
    """
    d = space.dim
    rows = []
    if space.kind == "GrassmannI":
        R, S = _random_unitary(rng, space.n), _random_unitary(rng, space.m)
        act = lambda T: R @ T @ S
    elif space.kind in ("SkewII", "SymIII"):
        U = _random_unitary(rng, space.n)
        act = lambda T: U @ T @ U.T
    else:
        q, r = np.linalg.qr(rng.standard_normal((space.n, space.n)))
        O = q * np.sign(np.diag(r))
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
        act = lambda T: phase * (O @ T)
    for a in range(d):
        T = frame_vector(space, a).complex_array()
        rows.append(_own_coords(space, act(T)))
    frame = np.array(rows)
    # normalise each vector by the metric so the frame stays unitary
    h = _hermitian_scale(space).astype(float)
    norms = np.sqrt(np.real(np.einsum("ba,ac,bc->b", frame, h, frame.conj())))
    return frame / norms[:, None]


def _own_coords(space, T):
    return np.array([T[tuple(i - 1 for i in idx)] for idx in space.coords])


def _frame_table(space, frame):
    """Matrix K[i,k] = R(a_i, a_k, a_i, a_k) over the real frame (a_1, Ja_1, ...)."""
    d = space.dim
    x = np.empty((2 * d, 2 * d))
    for a in range(d):
        v = frame[a]
        x[2 * a, 0::2], x[2 * a, 1::2] = v.real, v.imag
        x[2 * a + 1, 0::2], x[2 * a + 1, 1::2] = -v.imag, v.real
    r = real_tensor(space)
    return np.einsum("pqrs,ip,kq,ir,ks->ik", r, x, x, x, x, optimize=True)


def _standard_frame(space):
    h = np.diag(_hermitian_scale(space)).astype(float)
    return np.diag(1.0 / np.sqrt(h)).astype(complex)


def condition_report(space, sample_count, seed):
    """Check the three curvature conditions on a space.

    (A) frame invariance under isotropy-generated unitary frames;
    (B) non-positivity of Re R(r, s_bar, r, s_bar) over coordinate components;
    (C) positive holomorphic sectional curvature (sampled minimum, plus the
    analytic 4/min(n, m) for Grassmannians).
    """
    if sample_count < 1:
        raise ValidationError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    base = _frame_table(space, _standard_frame(space))
    deviation = 0.0
    general = 0.0
    d = space.dim
    for _ in range(sample_count):
        table = _frame_table(space, _isotropy_frame(space, rng))
        deviation = max(deviation, float(np.max(np.abs(table - base))))
        # a frame from the full unitary group, for comparison only
        U = _random_unitary(rng, d) / np.sqrt(np.diag(_hermitian_scale(space)).astype(float))[None, :]
        general = max(general, float(np.max(np.abs(_frame_table(space, U) - base))))
    c2 = _component_tensor(space)
    worst_b = max(Fraction(int(c2[r, s, r, s]), 2) for r in range(d) for s in range(d))
    samples = rng.standard_normal((sample_count, d)) + 1j * rng.standard_normal((sample_count, d))
    h_values = _holomorphic_sectional_batch(space, samples)
    sample_min = float(np.min(h_values))
    if space.kind == "GrassmannI":
        lower = 4.0 / min(space.n, space.m)
    else:
        lower = sample_min
    return {
        "space": str(space),
        "A_ok": deviation <= 1e-10,
        "A_deviation": deviation,
        "A_general_unitary_deviation": general,
        "B_ok": worst_b <= 0,
        "B_max_component": worst_b,
        "C_ok": lower > 0 and sample_min > 0,
        "C_lower_bound": lower,
        "C_sample_min": sample_min,
    }
