"""Stencil kernels for graphical mean curvature flow on the flat 2-torus.

State: periodic displacement ``w`` of shape (2, L, L), indexed [component,
x-index, y-index], plus a constant 2x2 matrix ``B`` so that u(x) = B x + w(x).
Both backends compute the same quantities point by point:

* ``rhs``:      g^{ij}(Du) d_ij w with g = I + Du^T Du,
* ``fields``:   *Omega, largest singular value, |II|^2, |det Du - 1|.

The numba versions are plain loops over precomputed wrapped neighbour
indices, and ``advance`` runs many Heun steps inside one compiled call; the
numpy versions use ``np.roll``.  ``PINCHFLOW_DISABLE_NUMBA=1`` selects numpy.
"""

import numpy as np

from . import _accel

D1 = {
    2: (np.array([-1, 1]), np.array([-0.5, 0.5])),
    4: (np.array([-2, -1, 1, 2]), np.array([1.0, -8.0, 8.0, -1.0]) / 12.0),
}
D2 = {
    2: (np.array([-1, 0, 1]), np.array([1.0, -2.0, 1.0])),
    4: (np.array([-2, -1, 0, 1, 2]), np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0),
}


def _stencils(order):
    if order not in D1:
        raise ValueError("stencil order must be 2 or 4")
    o1, c1 = D1[order]
    o2, c2 = D2[order]
    return o1.astype(np.int64), c1, o2.astype(np.int64), c2


# ---------------------------------------------------------------------------
# numpy backend


def _np_derivs(w, h, order):
    o1, c1, o2, c2 = _stencils(order)
    wx = sum(c * np.roll(w, -o, axis=1) for o, c in zip(o1, c1)) / h
    wy = sum(c * np.roll(w, -o, axis=2) for o, c in zip(o1, c1)) / h
    wxx = sum(c * np.roll(w, -o, axis=1) for o, c in zip(o2, c2)) / h**2
    wyy = sum(c * np.roll(w, -o, axis=2) for o, c in zip(o2, c2)) / h**2
    wxy = sum(c * np.roll(wx, -o, axis=2) for o, c in zip(o1, c1)) / h
    return wx, wy, wxx, wyy, wxy


def _np_metric(B, wx, wy):
    p = B[0, 0] + wx[0]
    q = B[0, 1] + wy[0]
    r = B[1, 0] + wx[1]
    s = B[1, 1] + wy[1]
    g11 = 1.0 + p * p + r * r
    g12 = p * q + r * s
    g22 = 1.0 + q * q + s * s
    det = g11 * g22 - g12 * g12
    return p, q, r, s, g11, g12, g22, det


def rhs_numpy(w, B, h, order):
    wx, wy, wxx, wyy, wxy = _np_derivs(w, h, order)
    p, q, r, s, g11, g12, g22, det = _np_metric(B, wx, wy)
    i11, i12, i22 = g22 / det, -g12 / det, g11 / det
    return i11 * wxx + 2.0 * i12 * wxy + i22 * wyy


def fields_numpy(w, B, h, order):
    wx, wy, wxx, wyy, wxy = _np_derivs(w, h, order)
    p, q, r, s, g11, g12, g22, det = _np_metric(B, wx, wy)
    star = 1.0 / np.sqrt(det)
    jac = p * s - q * r
    t = p * p + q * q + r * r + s * s
    disc = np.sqrt(np.maximum(t * t - 4.0 * jac * jac, 0.0))
    lam_max = np.sqrt(0.5 * (t + disc))
    ginv = np.array([[g22, -g12], [-g12, g11]]) / det
    A = np.array([[wxx, wxy], [wxy, wyy]])  # A[i, j, c]
    tangent = np.array([[p, r], [q, s]])  # tangent[a, c] = d_a u^c
    P = np.einsum("ijc...,ac...->ija...", A, tangent)
    inner = np.einsum("ijc...,klc...->ijkl...", A, A) - np.einsum(
        "ija...,ab...,klb...->ijkl...", P, ginv, P)
    ii2 = np.einsum("ik...,jl...,ijkl...->...", ginv, ginv, inner)
    return star, lam_max, ii2, np.abs(jac - 1.0)


# ---------------------------------------------------------------------------
# numba backend

if _accel.NUMBA_IMPORTABLE:
    from numba import njit

    @njit(cache=True, nogil=True)
    def _point(w, h, n1, c1, n2, c2, i, j):
        """First and second differences of both components at (i, j).

        ``n1[a, i]`` / ``n2[a, i]`` hold the wrapped neighbour indices of the
        first- and second-derivative stencils.
        """
        wx0 = wx1 = wy0 = wy1 = 0.0
        for a in range(c1.size):
            ip = n1[a, i]
            jp = n1[a, j]
            wx0 += c1[a] * w[0, ip, j]
            wx1 += c1[a] * w[1, ip, j]
            wy0 += c1[a] * w[0, i, jp]
            wy1 += c1[a] * w[1, i, jp]
        wxx0 = wxx1 = wyy0 = wyy1 = 0.0
        for a in range(c2.size):
            ip = n2[a, i]
            jp = n2[a, j]
            wxx0 += c2[a] * w[0, ip, j]
            wxx1 += c2[a] * w[1, ip, j]
            wyy0 += c2[a] * w[0, i, jp]
            wyy1 += c2[a] * w[1, i, jp]
        wxy0 = wxy1 = 0.0
        for b in range(c1.size):
            jp = n1[b, j]
            s0 = s1 = 0.0
            for a in range(c1.size):
                ip = n1[a, i]
                s0 += c1[a] * w[0, ip, jp]
                s1 += c1[a] * w[1, ip, jp]
            wxy0 += c1[b] * s0
            wxy1 += c1[b] * s1
        h2 = h * h
        return (wx0 / h, wx1 / h, wy0 / h, wy1 / h, wxx0 / h2, wxx1 / h2,
                wyy0 / h2, wyy1 / h2, wxy0 / h2, wxy1 / h2)

    @njit(cache=True, nogil=True)
    def _rhs_numba(w, B, h, n1, c1, n2, c2, out):
        L = w.shape[1]
        for i in range(L):
            for j in range(L):
                (wx0, wx1, wy0, wy1, wxx0, wxx1, wyy0, wyy1, wxy0, wxy1) = _point(
                    w, h, n1, c1, n2, c2, i, j)
                p = B[0, 0] + wx0
                q = B[0, 1] + wy0
                r = B[1, 0] + wx1
                s = B[1, 1] + wy1
                g11 = 1.0 + p * p + r * r
                g12 = p * q + r * s
                g22 = 1.0 + q * q + s * s
                det = g11 * g22 - g12 * g12
                i11 = g22 / det
                i12 = -g12 / det
                i22 = g11 / det
                out[0, i, j] = i11 * wxx0 + 2.0 * i12 * wxy0 + i22 * wyy0
                out[1, i, j] = i11 * wxx1 + 2.0 * i12 * wxy1 + i22 * wyy1
        return out

    @njit(cache=True, nogil=True)
    def _rhs2_numba(w, B, h, out):
        # order-2 stencil written out; the generic loop above is ~5x slower
        L = w.shape[1]
        ih = 0.5 / h
        ih2 = 1.0 / (h * h)
        for i in range(L):
            im = i - 1 if i > 0 else L - 1
            ip = i + 1 if i < L - 1 else 0
            for j in range(L):
                jm = j - 1 if j > 0 else L - 1
                jp = j + 1 if j < L - 1 else 0
                a0 = w[0, i, j]
                a1 = w[1, i, j]
                wx0 = (w[0, ip, j] - w[0, im, j]) * ih
                wx1 = (w[1, ip, j] - w[1, im, j]) * ih
                wy0 = (w[0, i, jp] - w[0, i, jm]) * ih
                wy1 = (w[1, i, jp] - w[1, i, jm]) * ih
                wxx0 = (w[0, ip, j] - 2.0 * a0 + w[0, im, j]) * ih2
                wxx1 = (w[1, ip, j] - 2.0 * a1 + w[1, im, j]) * ih2
                wyy0 = (w[0, i, jp] - 2.0 * a0 + w[0, i, jm]) * ih2
                wyy1 = (w[1, i, jp] - 2.0 * a1 + w[1, i, jm]) * ih2
                wxy0 = (w[0, ip, jp] - w[0, im, jp] - w[0, ip, jm] + w[0, im, jm]) * ih * ih
                wxy1 = (w[1, ip, jp] - w[1, im, jp] - w[1, ip, jm] + w[1, im, jm]) * ih * ih
                p = B[0, 0] + wx0
                q = B[0, 1] + wy0
                r = B[1, 0] + wx1
                s = B[1, 1] + wy1
                g11 = 1.0 + p * p + r * r
                g12 = p * q + r * s
                g22 = 1.0 + q * q + s * s
                det = g11 * g22 - g12 * g12
                out[0, i, j] = (g22 * wxx0 - 2.0 * g12 * wxy0 + g11 * wyy0) / det
                out[1, i, j] = (g22 * wxx1 - 2.0 * g12 * wxy1 + g11 * wyy1) / det
        return out

    @njit(cache=True, nogil=True)
    def _rhs_any(w, B, h, n1, c1, n2, c2, out):
        if c1.size == 2:
            return _rhs2_numba(w, B, h, out)
        return _rhs_numba(w, B, h, n1, c1, n2, c2, out)

    @njit(cache=True, nogil=True)
    def _advance_numba(w, B, h, dt, nsteps, n1, c1, n2, c2):
        """nsteps Heun steps in place."""
        k1 = np.empty_like(w)
        k2 = np.empty_like(w)
        tmp = np.empty_like(w)
        half = 0.5 * dt
        for _ in range(nsteps):
            _rhs_any(w, B, h, n1, c1, n2, c2, k1)
            for c in range(2):
                for i in range(w.shape[1]):
                    for j in range(w.shape[2]):
                        tmp[c, i, j] = w[c, i, j] + dt * k1[c, i, j]
            _rhs_any(tmp, B, h, n1, c1, n2, c2, k2)
            for c in range(2):
                for i in range(w.shape[1]):
                    for j in range(w.shape[2]):
                        w[c, i, j] = w[c, i, j] + half * (k1[c, i, j] + k2[c, i, j])
        return w

    @njit(cache=True, nogil=True)
    def _fields_numba(w, B, h, n1, c1, n2, c2, star, lam, ii2, drift):
        L = w.shape[1]
        A = np.empty((2, 2, 2))
        T = np.empty((2, 2))
        G = np.empty((2, 2))
        P = np.empty((2, 2, 2))
        for i in range(L):
            for j in range(L):
                (wx0, wx1, wy0, wy1, wxx0, wxx1, wyy0, wyy1, wxy0, wxy1) = _point(
                    w, h, n1, c1, n2, c2, i, j)
                p = B[0, 0] + wx0
                q = B[0, 1] + wy0
                r = B[1, 0] + wx1
                s = B[1, 1] + wy1
                g11 = 1.0 + p * p + r * r
                g12 = p * q + r * s
                g22 = 1.0 + q * q + s * s
                det = g11 * g22 - g12 * g12
                star[i, j] = 1.0 / np.sqrt(det)
                jac = p * s - q * r
                t = p * p + q * q + r * r + s * s
                disc = t * t - 4.0 * jac * jac
                if disc < 0.0:
                    disc = 0.0
                lam[i, j] = np.sqrt(0.5 * (t + np.sqrt(disc)))
                drift[i, j] = abs(jac - 1.0)
                G[0, 0] = g22 / det
                G[0, 1] = -g12 / det
                G[1, 0] = -g12 / det
                G[1, 1] = g11 / det
                A[0, 0, 0] = wxx0
                A[0, 0, 1] = wxx1
                A[0, 1, 0] = wxy0
                A[0, 1, 1] = wxy1
                A[1, 0, 0] = wxy0
                A[1, 0, 1] = wxy1
                A[1, 1, 0] = wyy0
                A[1, 1, 1] = wyy1
                T[0, 0] = p
                T[0, 1] = r
                T[1, 0] = q
                T[1, 1] = s
                for a in range(2):
                    for b in range(2):
                        for c in range(2):
                            P[a, b, c] = A[a, b, 0] * T[c, 0] + A[a, b, 1] * T[c, 1]
                total = 0.0
                for a in range(2):
                    for b in range(2):
                        for c in range(2):
                            for d in range(2):
                                inner = A[a, b, 0] * A[c, d, 0] + A[a, b, 1] * A[c, d, 1]
                                for e in range(2):
                                    for f in range(2):
                                        inner -= P[a, b, e] * G[e, f] * P[c, d, f]
                                total += G[a, c] * G[b, d] * inner
                ii2[i, j] = total


def _tables(order, L):
    o1, c1, o2, c2 = _stencils(order)
    idx = np.arange(L)
    n1 = np.array([(idx + o) % L for o in o1], dtype=np.int64)
    n2 = np.array([(idx + o) % L for o in o2], dtype=np.int64)
    return n1, c1, n2, c2


def _use_numba(backend):
    if backend is None:
        return _accel.USE_NUMBA
    if backend == "numba":
        if not _accel.NUMBA_IMPORTABLE:
            raise RuntimeError("numba backend requested but numba is not importable")
        return True
    if backend == "numpy":
        return False
    raise ValueError(f"unknown backend {backend!r}")


def rhs(w, B, h, order, backend=None):
    """Right-hand side of the graphical flow for the periodic displacement."""
    if _use_numba(backend):
        out = np.empty_like(w)
        return _rhs_any(w, np.ascontiguousarray(B, dtype=float), float(h), *_tables(order, w.shape[1]), out)
    return rhs_numpy(w, B, h, order)


def fields(w, B, h, order, backend=None):
    """Pointwise (*Omega, largest singular value, |II|^2, |det Du - 1|)."""
    if _use_numba(backend):
        shape = w.shape[1:]
        star, lam, ii2, drift = (np.empty(shape) for _ in range(4))
        _fields_numba(w, np.ascontiguousarray(B, dtype=float), float(h), *_tables(order, w.shape[1]),
                      star, lam, ii2, drift)
        return star, lam, ii2, drift
    return fields_numpy(w, B, h, order)


def advance(w, B, h, dt, nsteps, order, backend=None):
    """Return the state after ``nsteps`` explicit Heun steps (input left untouched)."""
    w = np.array(w, dtype=float, copy=True)
    if _use_numba(backend):
        return _advance_numba(w, np.ascontiguousarray(B, dtype=float), float(h), float(dt), int(nsteps),
                              *_tables(order, w.shape[1]))
    for _ in range(nsteps):
        k1 = rhs_numpy(w, B, h, order)
        k2 = rhs_numpy(w + dt * k1, B, h, order)
        w = w + (0.5 * dt) * (k1 + k2)
    return w
