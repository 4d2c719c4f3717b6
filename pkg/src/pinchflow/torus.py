"""Area-preserving maps of the flat 2-torus sampled on an L x L grid."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotUnimodular, ValidationError

__all__ = ["TorusMap", "make_map", "read_map", "write_map"]


@dataclass
class TorusMap:
    """u(x) = B x + w(x) on [0,1)^2 with periodic w of shape (2, L, L).

    ``w[c, i, j]`` is component c at the grid point (i/L, j/L).  The
    displacement v(x) = u(x) - x equals (B - I) x + w(x); for the maps built
    here B is either the identity or an integer matrix (the affine part).
    ``jacobian_exact`` holds the analytic Jacobian on the grid when the
    generator provides one, shape (2, 2, L, L).
    """

    L: int
    w: np.ndarray
    B: np.ndarray = field(default_factory=lambda: np.eye(2))
    jacobian_exact: np.ndarray | None = None
    label: str = "custom"

    def __post_init__(self):
        L = self.L
        if not (isinstance(L, (int, np.integer)) and L >= 32 and (L & (L - 1)) == 0):
            raise ValidationError(f"grid size must be a power of two >= 32, got {L}")
        self.w = np.ascontiguousarray(self.w, dtype=float)
        if self.w.shape != (2, L, L):
            raise ValidationError(f"displacement must have shape (2, {L}, {L})")
        self.B = np.asarray(self.B, dtype=float).reshape(2, 2)

    @property
    def h(self):
        return 1.0 / self.L

    @property
    def is_affine(self):
        return not np.any(self.w)

    def copy(self, w=None):
        return TorusMap(self.L, self.w.copy() if w is None else w, self.B.copy(), None, self.label)

    def exact_det_error(self):
        """max |det Du - 1| from the analytic Jacobian (None if unavailable)."""
        if self.jacobian_exact is None:
            return None
        J = self.jacobian_exact
        return float(np.max(np.abs(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0] - 1.0)))


def _grid(L):
    x = np.arange(L) / L
    return np.meshgrid(x, x, indexing="ij")


def _trig(harmonics, phase):
    """f(s) = (1/H) sum_h sin(2 pi h s + phase h)/(2 pi h), so max |f'| <= 1."""
    hs = np.arange(1, harmonics + 1)

    def f(s):
        s = np.asarray(s)[..., None]
        return np.sum(np.sin(2 * np.pi * hs * s + phase * hs) / (2 * np.pi * hs), axis=-1) / harmonics

    def df(s):
        s = np.asarray(s)[..., None]
        return np.sum(np.cos(2 * np.pi * hs * s + phase * hs), axis=-1) / harmonics

    return f, df


def make_map(kind, L, eps=0.0, harmonics=1, A=None):
    """Build a test map.

    ``kind`` is ``"identity"``, ``"linear"`` (needs integer ``A`` with det 1)
    or ``"composed_shears"``: phi = s2 o s1 with s1(x, y) = (x, y + eps f(x))
    and s2(x, y) = (x + eps g(y), y).
    """
    X, Y = _grid(L)
    if kind == "identity":
        J = np.zeros((2, 2, L, L))
        J[0, 0] = J[1, 1] = 1.0
        return TorusMap(L, np.zeros((2, L, L)), np.eye(2), J, "identity")
    if kind == "linear":
        A = np.asarray(A)
        if A.shape != (2, 2) or not np.all(np.asarray(A, dtype=float) == np.round(np.asarray(A, dtype=float))):
            raise NotUnimodular("A must be an integer 2x2 matrix")
        A = A.astype(int)
        if int(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]) != 1:
            raise NotUnimodular(f"det A must be 1, got {A}")
        J = np.broadcast_to(A.astype(float)[:, :, None, None], (2, 2, L, L)).copy()
        return TorusMap(L, np.zeros((2, L, L)), A.astype(float), J, f"linear{A.tolist()}")
    if kind == "composed_shears":
        if eps < 0:
            raise ValidationError("eps must be nonnegative")
        if harmonics < 1:
            raise ValidationError("harmonics must be >= 1")
        f, df = _trig(harmonics, 0.0)
        g, dg = _trig(harmonics, 1.0)
        Yp = Y + eps * f(X)
        w = np.stack([eps * g(Yp), eps * f(X)])
        fx, gy = df(X), dg(Yp)
        J = np.empty((2, 2, L, L))
        J[0, 0] = 1.0 + eps * eps * gy * fx
        J[0, 1] = eps * gy
        J[1, 0] = eps * fx
        J[1, 1] = 1.0
        return TorusMap(L, w, np.eye(2), J, f"composed_shears(eps={eps!r},harmonics={harmonics})")
    raise ValidationError(f"unknown map kind {kind!r}")


def write_map(path, tmap):
    """Plain-text grid file: 'L <int>', optional 'A a11 a12 a21 a22', then 'i j v1 v2' rows."""
    lines = [f"L {tmap.L}"]
    if not np.array_equal(tmap.B, np.eye(2)):
        lines.append("A " + " ".join(f"{x:.17g}" for x in tmap.B.ravel()))
    for i in range(tmap.L):
        for j in range(tmap.L):
            lines.append(f"{i} {j} {tmap.w[0, i, j]:.17g} {tmap.w[1, i, j]:.17g}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_map(path):
    with open(path) as fh:
        rows = [ln.split() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not rows or rows[0][0] != "L" or len(rows[0]) != 2:
        raise ValidationError("grid file must start with 'L <int>'")
    L = int(rows[0][1])
    B = np.eye(2)
    body = rows[1:]
    if body and body[0][0] == "A":
        B = np.array([float(x) for x in body[0][1:5]]).reshape(2, 2)
        body = body[1:]
    if len(body) != L * L:
        raise ValidationError(f"expected {L * L} grid rows, found {len(body)}")
    w = np.zeros((2, L, L))
    seen = np.zeros((L, L), dtype=bool)
    for parts in body:
        if len(parts) != 4:
            raise ValidationError("grid rows must read 'i j v1 v2'")
        i, j = int(parts[0]), int(parts[1])
        if not (0 <= i < L and 0 <= j < L) or seen[i, j]:
            raise ValidationError(f"bad or repeated grid index ({i}, {j})")
        seen[i, j] = True
        w[0, i, j], w[1, i, j] = float(parts[2]), float(parts[3])
    return TorusMap(L, w, B, None, f"file:{path}")
