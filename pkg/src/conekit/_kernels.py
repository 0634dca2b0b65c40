"""Hot inner loop of the product/low-Schmidt-rank expectation minimizer.

The kernel alternates two constrained eigen-solves over the tensor factors
of v = sum_t x_t (x) y_t.  It is written in numba-compilable numpy and
compiled with @njit when available; set CONEKIT_NO_NUMBA=1 to force the
pure-numpy path.  benchmarks/bench_seesaw.py compares the two.
"""

import os

import numpy as np


def prepare_layouts(w: np.ndarray, m: int, n: int):
    """Pre-permuted copies of w consumed by the kernel's 2-d contractions.

    wx[j, (i*m+i2)*n+l] = W[(i,j),(i2,l)] feeds the x-step, and
    wy[i, (j*n+l)*m+i2] = W[(i,j),(i2,l)] feeds the y-step.
    """
    w4 = w.reshape(m, n, m, n)
    wx = np.ascontiguousarray(w4.transpose(1, 0, 2, 3)).reshape(n, m * m * n)
    wy = np.ascontiguousarray(w4.transpose(0, 1, 3, 2)).reshape(m, n * n * m)
    return wx, wy


def _seesaw_minimize_impl(m, n, k, wx, wy, y0, iters, ftol):
    """Minimize v* W v over unit v = sum_{t<k} x_t (x) y_t.

    With the k-column frame y held orthonormal, the optimal stacked x is the
    bottom eigenvector of a (k*m) Hermitian contraction of W, and symmetrically
    for y; each half-step minimizes over a superset of the current iterate, so
    the value is nonincreasing.  Returns (value, x_frame, y_frame) with
    v = sum_t x[:, t] (x) y[:, t] of unit norm.
    """
    q0, _ = np.linalg.qr(np.ascontiguousarray(y0))
    y_frame = np.ascontiguousarray(q0)
    x_pair = np.zeros((m, k), dtype=np.complex128)
    y_pair = np.zeros((n, k), dtype=np.complex128)
    val = np.inf
    prev = np.inf
    for _ in range(iters):
        # x-step: contract both sides of W with the orthonormal y frame.
        a1 = np.ascontiguousarray(y_frame.conj().T) @ wx
        a2 = np.ascontiguousarray(a1).reshape(k * m * m, n) @ y_frame
        h = np.empty((k * m, k * m), dtype=np.complex128)
        for t in range(k):
            for i in range(m):
                for s in range(k):
                    for i2 in range(m):
                        h[t * m + i, s * m + i2] = a2[(t * m + i) * m + i2, s]
        h = (h + np.ascontiguousarray(h.conj().T)) * 0.5
        evals, evecs = np.linalg.eigh(h)
        xflat = evecs[:, 0]
        for t in range(k):
            for i in range(m):
                x_pair[i, t] = xflat[t * m + i]
        qx, _ = np.linalg.qr(np.ascontiguousarray(x_pair))
        x_frame = np.ascontiguousarray(qx)

        # y-step: same contraction with the roles of the factors swapped.
        b1 = np.ascontiguousarray(x_frame.conj().T) @ wy
        b2 = np.ascontiguousarray(b1).reshape(k * n * n, m) @ x_frame
        h2 = np.empty((k * n, k * n), dtype=np.complex128)
        for t in range(k):
            for j in range(n):
                for s in range(k):
                    for l in range(n):
                        h2[t * n + j, s * n + l] = b2[(t * n + j) * n + l, s]
        h2 = (h2 + np.ascontiguousarray(h2.conj().T)) * 0.5
        evals2, evecs2 = np.linalg.eigh(h2)
        val = evals2[0]
        yflat = evecs2[:, 0]
        for t in range(k):
            for j in range(n):
                y_pair[j, t] = yflat[t * n + j]
        x_pair = x_frame.copy()
        y_frame, _ = np.linalg.qr(np.ascontiguousarray(y_pair))
        y_frame = np.ascontiguousarray(y_frame)
        if prev - val < ftol * (1.0 + abs(val)):
            break
        prev = val
    return val, x_pair, y_pair


seesaw_minimize_numpy = _seesaw_minimize_impl

_DISABLED = os.environ.get("CONEKIT_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}
try:
    if _DISABLED:
        raise ImportError("numba disabled via CONEKIT_NO_NUMBA")
    from numba import njit

    seesaw_minimize_numba = njit(cache=True)(_seesaw_minimize_impl)
    NUMBA_ENABLED = True
except ImportError:
    seesaw_minimize_numba = None
    NUMBA_ENABLED = False

seesaw_minimize = seesaw_minimize_numba if NUMBA_ENABLED else seesaw_minimize_numpy


def backend_name() -> str:
    """Active kernel backend, "numba" or "numpy"."""
    return "numba" if NUMBA_ENABLED else "numpy"
