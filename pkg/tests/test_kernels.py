import os
import subprocess
import sys

import numpy as np
import pytest

from conekit import _kernels
from conekit.bipartite import BipartiteDims
from conekit.sampling import ginibre

from conftest import hermitian


def expectation(w, m, n, x, y):
    v = (x @ y.T).reshape(m * n)
    v = v / np.linalg.norm(v)
    return float(np.real(np.vdot(v, w @ v)))


class TestLayouts:
    def test_contractions_match_einsum(self, dims, rng):
        m, n = dims.m, dims.n
        w = hermitian(rng, dims.total)
        wx, wy = _kernels.prepare_layouts(w, m, n)
        w4 = w.reshape(m, n, m, n)
        k = dims.d
        y = np.linalg.qr(ginibre(rng, n, k))[0]
        x = np.linalg.qr(ginibre(rng, m, k))[0]
        # x-step contraction
        got = (np.ascontiguousarray(y.conj().T) @ wx).reshape(k * m * m, n) @ y
        want = np.einsum("jt,ijkl,ls->tiks", y.conj(), w4, y).reshape(k * m * m, k)
        assert np.allclose(got, want)
        # y-step contraction
        got = (np.ascontiguousarray(x.conj().T) @ wy).reshape(k * n * n, m) @ x
        want = np.einsum("it,ijkl,ks->tjls", x.conj(), w4, x).reshape(k * n * n, k)
        assert np.allclose(got, want)


class TestKernel:
    def test_value_is_attained_and_bounded(self, dims, rng):
        m, n = dims.m, dims.n
        w = hermitian(rng, dims.total)
        wx, wy = _kernels.prepare_layouts(w, m, n)
        lam_min = np.linalg.eigvalsh(w)[0]
        for k in range(1, dims.d + 1):
            y0 = np.ascontiguousarray(ginibre(rng, n, k))
            val, x, y = _kernels.seesaw_minimize_numpy(m, n, k, wx, wy, y0, 100, 1e-13)
            assert abs(val - expectation(w, m, n, x, y)) <= 1e-10
            assert val >= lam_min - 1e-10

    def test_full_rank_reaches_ground_state(self, dims, rng):
        m, n = dims.m, dims.n
        w = hermitian(rng, dims.total)
        wx, wy = _kernels.prepare_layouts(w, m, n)
        y0 = np.ascontiguousarray(ginibre(rng, n, dims.d))
        val, _, _ = _kernels.seesaw_minimize_numpy(m, n, dims.d, wx, wy, y0, 100, 1e-13)
        assert abs(val - np.linalg.eigvalsh(w)[0]) <= 1e-9

    @pytest.mark.skipif(not _kernels.NUMBA_ENABLED, reason="numba disabled")
    def test_backends_agree(self, dims, rng):
        m, n = dims.m, dims.n
        for k in range(1, dims.d + 1):
            w = hermitian(rng, dims.total)
            wx, wy = _kernels.prepare_layouts(w, m, n)
            y0 = np.ascontiguousarray(ginibre(rng, n, k))
            val_np, x_np, y_np = _kernels.seesaw_minimize_numpy(
                m, n, k, wx, wy, y0, 80, 1e-13
            )
            val_nb, x_nb, y_nb = _kernels.seesaw_minimize_numba(
                m, n, k, wx, wy, y0, 80, 1e-13
            )
            assert abs(val_np - val_nb) <= 1e-10
            # The minimizing vectors may differ by phase/rotation; compare
            # the projectors they span.
            v_np = (x_np @ y_np.T).reshape(dims.total)
            v_nb = (x_nb @ y_nb.T).reshape(dims.total)
            v_np /= np.linalg.norm(v_np)
            v_nb /= np.linalg.norm(v_nb)
            overlap = abs(np.vdot(v_np, v_nb))
            assert overlap >= 1.0 - 1e-8


class TestEnvFlag:
    def test_no_numba_env_selects_numpy(self):
        code = (
            "import conekit._kernels as k;"
            "print(k.backend_name(), k.seesaw_minimize is k.seesaw_minimize_numpy)"
        )
        env = dict(os.environ, CONEKIT_NO_NUMBA="1")
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        assert out.stdout.split() == ["numpy", "True"]

    def test_default_backend_reported(self):
        assert _kernels.backend_name() in {"numba", "numpy"}
