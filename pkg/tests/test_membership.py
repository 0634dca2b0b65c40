import numpy as np
import pytest

from conekit import (
    BipartiteDims,
    HermiticityError,
    PreconditionError,
    SeesawConfig,
    Verdict,
    basis_vec,
    is_block_positive_heuristic,
    is_ppt,
    is_psd,
    is_separable_decidable,
    kron,
    max_entangled_vector,
    min_product_expectation,
    min_sr_k_expectation,
    partial_transpose,
    product_vec,
    sr,
    swap_operator,
    witness_conjugation,
)
from conekit.sampling import (
    random_ppt,
    random_product_vector,
    random_psd,
    random_unit_vector,
    random_vector_with_sr,
)

from conftest import hermitian

FAST_CFG = SeesawConfig(seed=11, restarts=4, iters_per_restart=60)


def bell_projector():
    b = max_entangled_vector(BipartiteDims(2, 2))
    return np.outer(b, b.conj())


class TestPsd:
    def test_identity(self, dims):
        report = is_psd(np.eye(dims.total), dims)
        assert report.verdict is Verdict.IN
        assert np.isclose(report.min_eig, 1.0)

    def test_explicit_negative_direction(self):
        d = BipartiteDims(2, 2)
        x = kron(np.diag([1.0, -1.0]), np.eye(2))
        report = is_psd(x, d)
        assert report.verdict is Verdict.OUT
        vec = report.certificate["vector"]
        assert np.real(np.vdot(vec, x @ vec)) < -report.tol

    def test_bell_projector_boundary(self):
        d = BipartiteDims(2, 2)
        report = is_psd(bell_projector(), d)
        assert report.verdict is Verdict.IN
        assert abs(report.min_eig) <= 1e-12

    def test_rejects_non_hermitian(self, dims, rng):
        x = rng.standard_normal((dims.total, dims.total)) * 1.0
        x[0, -1] += 5.0  # large asymmetric entry
        with pytest.raises(HermiticityError):
            is_psd(x, dims)


class TestPpt:
    def test_identity(self, dims):
        assert is_ppt(np.eye(dims.total), dims).verdict is Verdict.IN

    def test_bell_projector(self):
        d = BipartiteDims(2, 2)
        report = is_ppt(bell_projector(), d)
        assert report.verdict is Verdict.OUT
        assert np.isclose(report.min_eig, -0.5)
        assert report.certificate["side"] == "partial_transpose"

    def test_product_state(self, dims, rng):
        u = random_unit_vector(rng, dims.m)
        v = random_unit_vector(rng, dims.n)
        x = kron(np.outer(u, u.conj()), np.outer(v, v.conj()))
        assert is_ppt(x, dims).verdict is Verdict.IN

    def test_out_certificate_reevaluates(self, dims, rng):
        for _ in range(50):
            x = random_psd(rng, dims.total)
            report = is_ppt(x, dims)
            if report.verdict is Verdict.IN:
                continue
            side = report.certificate["side"]
            target = x if side == "matrix" else partial_transpose(x, dims)
            vec = report.certificate["vector"]
            value = float(np.real(np.vdot(vec, target @ vec)))
            assert value < -report.tol
            assert abs(value - report.certificate["eigenvalue"]) <= 10 * report.tol


class TestSeparableDecidable:
    def test_product_state_in(self, dims, rng):
        u = random_unit_vector(rng, dims.m)
        v = random_unit_vector(rng, dims.n)
        x = kron(np.outer(u, u.conj()), np.outer(v, v.conj()))
        assert is_separable_decidable(x, dims).verdict is Verdict.IN

    def test_bell_out(self):
        d = BipartiteDims(2, 2)
        assert is_separable_decidable(bell_projector(), d).verdict is Verdict.OUT

    def test_rank_one_entangled_3x3(self, rng):
        d = BipartiteDims(3, 3)
        w = random_vector_with_sr(rng, d, 2)
        report = is_separable_decidable(np.outer(w, w.conj()), d)
        assert report.verdict is Verdict.OUT
        assert report.certificate["sr"] == 2

    def test_rejects_non_psd(self, dims):
        x = np.diag([1.0] * (dims.total - 1) + [-1.0])
        with pytest.raises(PreconditionError):
            is_separable_decidable(x, dims)

    def test_full_rank_ppt_3x3_indeterminate(self, rng):
        d = BipartiteDims(3, 3)
        x = random_ppt(rng, d)
        assert is_separable_decidable(x, d).verdict is Verdict.INDETERMINATE

    @pytest.mark.parametrize("m,n", [(2, 2), (2, 3)])
    def test_agrees_with_ppt_in_decidable_region(self, m, n, rng):
        d = BipartiteDims(m, n)
        for _ in range(500):
            x = random_psd(rng, d.total)
            assert is_separable_decidable(x, d).verdict is is_ppt(x, d).verdict

    def test_rank_one_rule(self, rng):
        d = BipartiteDims(3, 3)
        for trial in range(500):
            if trial % 2 == 0:
                w = random_product_vector(rng, d)
            else:
                w = random_vector_with_sr(rng, d, int(rng.integers(2, d.d + 1)))
            verdict = is_separable_decidable(np.outer(w, w.conj()), d).verdict
            expected = Verdict.IN if sr(w, d) == 1 else Verdict.OUT
            assert verdict is expected

    def test_separable_implies_ppt(self, dims, rng):
        for _ in range(100):
            x = random_psd(rng, dims.total)
            if is_separable_decidable(x, dims).verdict is Verdict.IN:
                assert is_ppt(x, dims).verdict is Verdict.IN


class TestMinProductExpectation:
    def test_identity(self, dims):
        value, _, _ = min_product_expectation(np.eye(dims.total), dims, FAST_CFG)
        assert abs(value - 1.0) <= 1e-9

    def test_swap_closed_form(self):
        # (z (x) y)* F (z (x) y) = |<z, y>|^2, minimized at 0 by any
        # orthogonal pair.
        d = BipartiteDims(2, 2)
        value, z, y = min_product_expectation(swap_operator(d), d, FAST_CFG)
        assert abs(value) <= 1e-9
        assert abs(abs(np.vdot(z, y)) ** 2 - value) <= 1e-9

    def test_gamma_bell_grid_oracle(self):
        d = BipartiteDims(2, 2)
        w = partial_transpose(bell_projector(), d)
        grid_min = np.inf
        thetas = np.linspace(0, np.pi / 2, 10)
        phis = np.linspace(0, 2 * np.pi, 10, endpoint=False)
        for t1 in thetas:
            for p1 in phis:
                z = np.array([np.cos(t1), np.exp(1j * p1) * np.sin(t1)])
                for t2 in thetas:
                    for p2 in phis:
                        y = np.array([np.cos(t2), np.exp(1j * p2) * np.sin(t2)])
                        p = product_vec(z, y)
                        grid_min = min(grid_min, float(np.real(np.vdot(p, w @ p))))
        value, _, _ = min_product_expectation(w, d, FAST_CFG)
        assert value <= grid_min + 1e-9
        assert value >= -1e-9

    def test_value_is_attained_by_returned_pair(self, dims, rng):
        w = hermitian(rng, dims.total)
        value, z, y = min_product_expectation(w, dims, FAST_CFG)
        p = product_vec(z, y)
        assert abs(np.real(np.vdot(p, w @ p)) - value) <= 1e-9


class TestMinSrKExpectation:
    def test_unconstrained_is_min_eigenvalue(self, dims, rng):
        for _ in range(20):
            w = hermitian(rng, dims.total)
            value, _ = min_sr_k_expectation(w, dims, dims.d, FAST_CFG)
            assert abs(value - np.linalg.eigvalsh(w)[0]) <= 1e-9

    def test_k1_matches_product_minimizer(self, dims, rng):
        w = hermitian(rng, dims.total)
        v1, _ = min_sr_k_expectation(w, dims, 1, FAST_CFG)
        v2, _, _ = min_product_expectation(w, dims, FAST_CFG)
        assert abs(v1 - v2) <= 1e-12

    def test_swap_k2_reaches_singlet(self):
        d = BipartiteDims(2, 2)
        value, vec = min_sr_k_expectation(swap_operator(d), d, 2, FAST_CFG)
        assert abs(value + 1.0) <= 1e-9
        assert sr(vec, d) == 2

    def test_monotone_in_k(self, dims, rng):
        for _ in range(100):
            w = hermitian(rng, dims.total)
            values = [
                min_sr_k_expectation(w, dims, k, FAST_CFG)[0]
                for k in range(1, dims.d + 1)
            ]
            for lo, hi in zip(values[1:], values[:-1]):
                assert lo <= hi + 1e-9

    def test_minimizer_respects_rank_bound(self, dims, rng):
        w = hermitian(rng, dims.total)
        for k in range(1, dims.d + 1):
            _, vec = min_sr_k_expectation(w, dims, k, FAST_CFG)
            assert sr(vec, dims) <= k

    def test_k_out_of_range(self, dims):
        with pytest.raises(PreconditionError):
            min_sr_k_expectation(np.eye(dims.total), dims, dims.d + 1, FAST_CFG)

    def test_beats_random_sampling_oracle(self, dims, rng):
        # The optimizer value must undercut every randomly sampled feasible
        # vector and never undercut the unconstrained minimum.
        for k in range(1, dims.d + 1):
            w = hermitian(rng, dims.total)
            value, _ = min_sr_k_expectation(w, dims, k, FAST_CFG)
            sampled = min(
                float(np.real(np.vdot(v, w @ v)))
                for v in (random_vector_with_sr(rng, dims, k) for _ in range(2000))
            )
            assert value <= sampled + 1e-9
            assert value >= np.linalg.eigvalsh(w)[0] - 1e-9


class TestBlockPositiveHeuristic:
    def test_psd_in(self, dims, rng):
        report = is_block_positive_heuristic(random_psd(rng, dims.total), dims, FAST_CFG)
        assert report.verdict is Verdict.IN

    def test_swap_indeterminate(self):
        d = BipartiteDims(2, 2)
        report = is_block_positive_heuristic(swap_operator(d), d, FAST_CFG)
        assert report.verdict is Verdict.INDETERMINATE
        assert np.isclose(report.min_eig, -1.0)
        assert abs(report.certificate["heuristic_min"]) <= 1e-9

    def test_conjugated_swap_out_with_certificate(self):
        # Rotating the singlet onto a product direction exposes the negative
        # expectation to the product optimizer.
        d = BipartiteDims(2, 2)
        f = swap_operator(d)
        singlet = np.linalg.eigh(f)[1][:, 0]
        conjugated, _ = witness_conjugation(
            f, singlet, basis_vec(2, 0), basis_vec(2, 0), d
        )
        report = is_block_positive_heuristic(conjugated, d, FAST_CFG)
        assert report.verdict is Verdict.OUT
        z, y = report.certificate["z"], report.certificate["y"]
        p = product_vec(z, y)
        value = float(np.real(np.vdot(p, conjugated @ p)))
        assert value < -report.tol
        assert abs(value - report.certificate["expectation"]) <= 10 * report.tol


class TestSeesawConfig:
    def test_rejects_bad_values(self):
        with pytest.raises(PreconditionError):
            SeesawConfig(seed=-1)
        with pytest.raises(PreconditionError):
            SeesawConfig(seed=0, restarts=0)
        with pytest.raises(PreconditionError):
            SeesawConfig(seed=0, tol=2.0)
