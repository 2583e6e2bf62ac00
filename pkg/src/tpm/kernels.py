"""Hot numeric kernels: farthest point sampling, kNN selection, Chamfer
distance, and SVM dual coordinate-descent sweeps.

Each kernel exists twice: a loop-style version compiled with numba's
``@njit`` and a vectorized pure-numpy fallback. The active family is picked
at import time; set ``TPM_NUMBA=0`` to force the numpy path (or if numba is
not importable the fallback is used automatically). Both paths produce
identical index decisions: distances are accumulated coordinate-by-
coordinate in float64 and every argmin/argmax tie breaks to the lowest
index. ``benchmarks/bench_kernels.py`` times one against the other.
"""

from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("TPM_NUMBA", "1").strip().lower()
_want_numba = _env not in ("0", "false", "off", "no")

if _want_numba:
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _HAVE_NUMBA = False
else:
    _HAVE_NUMBA = False


def using_numba() -> bool:
    """True when the compiled kernel family is active."""
    return _HAVE_NUMBA


# ---------------------------------------------------------------------------
# farthest point sampling


def fps_np(points: np.ndarray, k: int, first: int) -> np.ndarray:
    """Greedy max-min selection of k indices; ties go to the lowest index."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    out = np.empty(k, dtype=np.int64)
    out[0] = first
    d = np.sum((pts - pts[first]) ** 2, axis=1)
    for i in range(1, k):
        nxt = int(np.argmax(d))
        out[i] = nxt
        d = np.minimum(d, np.sum((pts - pts[nxt]) ** 2, axis=1))
    return out


def _fps_loop(pts, k, first):
    n = pts.shape[0]
    out = np.empty(k, dtype=np.int64)
    d = np.empty(n, dtype=np.float64)
    out[0] = first
    for j in range(n):
        dx = pts[j, 0] - pts[first, 0]
        dy = pts[j, 1] - pts[first, 1]
        dz = pts[j, 2] - pts[first, 2]
        d[j] = dx * dx + dy * dy + dz * dz
    for i in range(1, k):
        best = 0
        bd = d[0]
        for j in range(1, n):
            if d[j] > bd:
                bd = d[j]
                best = j
        out[i] = best
        for j in range(n):
            dx = pts[j, 0] - pts[best, 0]
            dy = pts[j, 1] - pts[best, 1]
            dz = pts[j, 2] - pts[best, 2]
            dj = dx * dx + dy * dy + dz * dz
            if dj < d[j]:
                d[j] = dj
    return out


# ---------------------------------------------------------------------------
# k nearest neighbours per center


def knn_np(points: np.ndarray, center_indices: np.ndarray, patch_size: int) -> np.ndarray:
    """Indices of the patch_size nearest points per center, distance then
    lowest-index order."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    out = np.empty((len(center_indices), patch_size), dtype=np.int64)
    for g, ci in enumerate(center_indices):
        d = np.sum((pts - pts[ci]) ** 2, axis=1)
        out[g] = np.argsort(d, kind="stable")[:patch_size]
    return out


def _knn_loop(pts, center_indices, patch_size):
    n = pts.shape[0]
    g_count = center_indices.shape[0]
    out = np.empty((g_count, patch_size), dtype=np.int64)
    d = np.empty(n, dtype=np.float64)
    taken = np.empty(n, dtype=np.bool_)
    for g in range(g_count):
        ci = center_indices[g]
        for j in range(n):
            dx = pts[j, 0] - pts[ci, 0]
            dy = pts[j, 1] - pts[ci, 1]
            dz = pts[j, 2] - pts[ci, 2]
            d[j] = dx * dx + dy * dy + dz * dz
            taken[j] = False
        for s in range(patch_size):
            best = -1
            bd = np.inf
            for j in range(n):
                if not taken[j] and d[j] < bd:
                    bd = d[j]
                    best = j
            out[g, s] = best
            taken[best] = True
    return out


# ---------------------------------------------------------------------------
# batched Chamfer distance between paired point sets
#
# For a pair (A, B): CD = mean_i min_j |a_i-b_j|^2 + mean_j min_i |a_i-b_j|^2.
# The forward pass records both argmin maps so the backward pass can route
# gradients without recomputing distances.


def chamfer_forward_np(a: np.ndarray, b: np.ndarray):
    n, sa = a.shape[0], a.shape[1]
    sb = b.shape[1]
    losses = np.empty(n, dtype=np.float64)
    arg_ab = np.empty((n, sa), dtype=np.int64)
    arg_ba = np.empty((n, sb), dtype=np.int64)
    # chunked so the (chunk, Sa, Sb, 3) intermediate stays small
    chunk = max(1, int(4_000_000 // max(1, sa * sb * 3)))
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        diff = a[lo:hi, :, None, :] - b[lo:hi, None, :, :]
        d2 = (diff * diff).sum(axis=-1)
        i_ab = d2.argmin(axis=2)
        i_ba = d2.argmin(axis=1)
        arg_ab[lo:hi] = i_ab
        arg_ba[lo:hi] = i_ba
        m_ab = np.take_along_axis(d2, i_ab[:, :, None], axis=2)[:, :, 0]
        m_ba = np.take_along_axis(d2, i_ba[:, None, :], axis=1)[:, 0, :]
        losses[lo:hi] = m_ab.mean(axis=1) + m_ba.mean(axis=1)
    return losses, arg_ab, arg_ba


def _chamfer_forward_loop(a, b):
    n, sa = a.shape[0], a.shape[1]
    sb = b.shape[1]
    losses = np.empty(n, dtype=np.float64)
    arg_ab = np.empty((n, sa), dtype=np.int64)
    arg_ba = np.empty((n, sb), dtype=np.int64)
    min_ba = np.empty(sb, dtype=np.float64)
    for p in range(n):
        for j in range(sb):
            min_ba[j] = np.inf
            arg_ba[p, j] = 0
        acc_ab = 0.0
        for i in range(sa):
            bi = 0
            bd = np.inf
            for j in range(sb):
                dx = a[p, i, 0] - b[p, j, 0]
                dy = a[p, i, 1] - b[p, j, 1]
                dz = a[p, i, 2] - b[p, j, 2]
                d2 = dx * dx + dy * dy + dz * dz
                if d2 < bd:
                    bd = d2
                    bi = j
                if d2 < min_ba[j]:
                    min_ba[j] = d2
                    arg_ba[p, j] = i
            arg_ab[p, i] = bi
            acc_ab += bd
        acc_ba = 0.0
        for j in range(sb):
            acc_ba += min_ba[j]
        losses[p] = acc_ab / sa + acc_ba / sb
    return losses, arg_ab, arg_ba


def chamfer_backward_np(a, b, arg_ab, arg_ba, g_per):
    n, sa = a.shape[0], a.shape[1]
    sb = b.shape[1]
    ga = np.zeros_like(a)
    gb = np.zeros_like(b)
    rows = np.arange(n)[:, None]
    coef_ab = (g_per * (2.0 / sa))[:, None, None]
    b_near = np.take_along_axis(b, arg_ab[:, :, None], axis=1)
    d_ab = (a - b_near) * coef_ab
    ga += d_ab
    np.add.at(gb, (rows, arg_ab), -d_ab)
    coef_ba = (g_per * (2.0 / sb))[:, None, None]
    a_near = np.take_along_axis(a, arg_ba[:, :, None], axis=1)
    d_ba = (a_near - b) * coef_ba
    np.add.at(ga, (rows, arg_ba), d_ba)
    gb -= d_ba
    return ga, gb


def _chamfer_backward_loop(a, b, arg_ab, arg_ba, g_per):
    n, sa = a.shape[0], a.shape[1]
    sb = b.shape[1]
    ga = np.zeros_like(a)
    gb = np.zeros_like(b)
    for p in range(n):
        ca = g_per[p] * (2.0 / sa)
        for i in range(sa):
            j = arg_ab[p, i]
            for c in range(3):
                d = (a[p, i, c] - b[p, j, c]) * ca
                ga[p, i, c] += d
                gb[p, j, c] -= d
        cb = g_per[p] * (2.0 / sb)
        for j in range(sb):
            i = arg_ba[p, j]
            for c in range(3):
                d = (a[p, i, c] - b[p, j, c]) * cb
                ga[p, i, c] += d
                gb[p, j, c] -= d
    return ga, gb


# ---------------------------------------------------------------------------
# linear SVM: one dual coordinate-descent sweep (L1 hinge, L2 regularizer)
#
# Solves min_w 0.5|w|^2 + cbox * sum_i hinge(y_i w.x_i) through its dual;
# alpha and w are updated in place, visiting samples in the given order.


def svm_cd_sweep_np(x, y, alpha, w, qdiag, cbox, order):
    for t in range(order.shape[0]):
        i = order[t]
        g = y[i] * float(w @ x[i]) - 1.0
        a_old = alpha[i]
        a_new = a_old - g / qdiag[i]
        if a_new < 0.0:
            a_new = 0.0
        elif a_new > cbox:
            a_new = cbox
        if a_new != a_old:
            w += (a_new - a_old) * y[i] * x[i]
            alpha[i] = a_new


def _svm_cd_sweep_loop(x, y, alpha, w, qdiag, cbox, order):
    n_feat = x.shape[1]
    for t in range(order.shape[0]):
        i = order[t]
        g = 0.0
        for k in range(n_feat):
            g += w[k] * x[i, k]
        g = g * y[i] - 1.0
        a_old = alpha[i]
        a_new = a_old - g / qdiag[i]
        if a_new < 0.0:
            a_new = 0.0
        elif a_new > cbox:
            a_new = cbox
        if a_new != a_old:
            step = (a_new - a_old) * y[i]
            for k in range(n_feat):
                w[k] += step * x[i, k]
            alpha[i] = a_new


# ---------------------------------------------------------------------------
# dispatch

if _HAVE_NUMBA:
    _fps_loop_c = njit(cache=True)(_fps_loop)
    _knn_loop_c = njit(cache=True)(_knn_loop)
    _chamfer_forward_c = njit(cache=True)(_chamfer_forward_loop)
    _chamfer_backward_c = njit(cache=True)(_chamfer_backward_loop)
    _svm_cd_sweep_c = njit(cache=True)(_svm_cd_sweep_loop)

    def fps_nb(points, k, first):
        return _fps_loop_c(np.ascontiguousarray(points, dtype=np.float64), k, first)

    def knn_nb(points, center_indices, patch_size):
        return _knn_loop_c(
            np.ascontiguousarray(points, dtype=np.float64),
            np.ascontiguousarray(center_indices, dtype=np.int64),
            patch_size,
        )

    def chamfer_forward_nb(a, b):
        return _chamfer_forward_c(np.ascontiguousarray(a), np.ascontiguousarray(b))

    def chamfer_backward_nb(a, b, arg_ab, arg_ba, g_per):
        return _chamfer_backward_c(
            np.ascontiguousarray(a), np.ascontiguousarray(b), arg_ab, arg_ba, g_per
        )

    def svm_cd_sweep_nb(x, y, alpha, w, qdiag, cbox, order):
        _svm_cd_sweep_c(x, y, alpha, w, qdiag, cbox, order)

    fps_indices = fps_nb
    knn_indices = knn_nb
    chamfer_forward = chamfer_forward_nb
    chamfer_backward = chamfer_backward_nb
    svm_cd_sweep = svm_cd_sweep_nb
else:
    fps_indices = fps_np
    knn_indices = knn_np
    chamfer_forward = chamfer_forward_np
    chamfer_backward = chamfer_backward_np
    svm_cd_sweep = svm_cd_sweep_np
