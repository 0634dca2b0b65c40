import numpy as np
import pytest

from conekit import (
    BipartiteDims,
    PreconditionError,
    Verdict,
    is_ppt,
    probe_intermediate,
    rerun_trial,
    run_suite,
    suite_cone_collapse_pplus,
    suite_lemma_srank,
    suite_local_stability,
    suite_ppt_collapse,
    suite_ppt_stability,
    suite_strict_enlargement,
    suite_witness_not_cstar,
    validate,
)
from conekit.matio import canonical_dumps
from conekit.sampling import random_ppt
from conekit.suites import structured_exact_family

SEED = 20240817


class TestSuitesPass:
    def test_srank(self, dims):
        report = suite_lemma_srank(dims, 100, SEED)
        assert report.passes == report.trials == 100
        assert not report.failures

    def test_strict_enlargement(self, dims):
        report = suite_strict_enlargement(dims, SEED)
        assert report.passes == report.trials

    def test_cone_collapse(self, dims):
        report = suite_cone_collapse_pplus(dims, 40, SEED)
        assert report.passes == report.trials
        assert report.max_residual <= 1e-9

    @pytest.mark.parametrize("m,n", [(2, 2), (2, 3)])
    def test_local_stability(self, m, n):
        report = suite_local_stability(BipartiteDims(m, n), 60, SEED)
        assert report.passes == report.trials

    def test_local_stability_rejects_undecidable_dims(self):
        with pytest.raises(PreconditionError):
            suite_local_stability(BipartiteDims(3, 3), 10, SEED)

    def test_witness_not_cstar(self, dims):
        report = suite_witness_not_cstar(dims, SEED)
        assert report.passes == report.trials
        # The PSD control case has no negative eigenvector and is recorded
        # as not applicable rather than silently passing.
        assert report.extra == {"not_applicable_trials": [2]}

    def test_ppt_stability(self, dims):
        report = suite_ppt_stability(dims, 60, SEED)
        assert report.passes == report.trials

    def test_ppt_stability_with_extra_inputs(self, rng):
        d = BipartiteDims(3, 3)
        extras = [random_ppt(rng, d) for _ in range(2)]
        report = suite_ppt_stability(d, 30, SEED, extra_inputs=extras)
        assert report.passes == report.trials

    def test_ppt_stability_rejects_non_ppt_extras(self):
        d = BipartiteDims(2, 2)
        from conekit import max_entangled_vector

        b = max_entangled_vector(d)
        with pytest.raises(PreconditionError):
            suite_ppt_stability(d, 5, SEED, extra_inputs=[np.outer(b, b.conj())])

    def test_ppt_collapse(self, dims):
        report = suite_ppt_collapse(dims, 40, SEED)
        assert report.passes == report.trials
        assert report.max_residual <= 1e-10


class TestProbe:
    def test_k1_consistent_with_stability(self, dims):
        report = probe_intermediate(dims, 1, 60, SEED)
        assert report.extra["non_ppt_outputs"] == 0
        assert report.extra["verdict"] == "exploratory"

    def test_k_d_consistent_with_collapse(self, dims):
        report = probe_intermediate(dims, dims.d, 60, SEED)
        assert report.extra["non_ppt_outputs"] > 0
        assert report.extra["most_negative_gamma_eigenvalue"] < 0

    def test_intermediate_k_records_tallies(self):
        d = BipartiteDims(3, 3)
        report = probe_intermediate(d, 2, 40, SEED)
        assert report.extra["ppt_outputs"] + report.extra["non_ppt_outputs"] == 40
        assert report.passes == report.trials  # exploratory: tallies never fail

    def test_structured_family_certifies_bound(self, dims):
        gen = np.random.default_rng(3)
        for k in range(1, dims.d + 1):
            fam = structured_exact_family(gen, dims, k)
            assert fam.osr_bound == k
            assert validate(fam).verdict is Verdict.IN


class TestDeterminism:
    @pytest.mark.parametrize(
        "runner",
        [
            lambda d: suite_lemma_srank(d, 40, SEED),
            lambda d: suite_strict_enlargement(d, SEED),
            lambda d: suite_cone_collapse_pplus(d, 20, SEED),
            lambda d: suite_witness_not_cstar(d, SEED),
            lambda d: suite_ppt_stability(d, 20, SEED),
            lambda d: suite_ppt_collapse(d, 20, SEED),
            lambda d: probe_intermediate(d, d.d, 20, SEED),
        ],
        ids=[
            "srank",
            "strict-enlargement",
            "cone-collapse",
            "witness-not-cstar",
            "ppt-stability",
            "ppt-collapse",
            "probe",
        ],
    )
    def test_reports_reproduce_bytewise(self, runner):
        d = BipartiteDims(2, 3)
        first = canonical_dumps(runner(d).to_obj(include_wall_time=False))
        second = canonical_dumps(runner(d).to_obj(include_wall_time=False))
        assert first == second

    def test_wall_time_excluded_not_equal_requirement(self):
        d = BipartiteDims(2, 2)
        report = suite_lemma_srank(d, 10, SEED)
        obj = report.to_obj(include_wall_time=True)
        assert "wall_time" in obj
        assert "wall_time" not in report.to_obj(include_wall_time=False)


class TestRerun:
    def test_trials_rerun_identically(self, dims):
        for suite_id, kwargs in [
            ("srank", {}),
            ("cone-collapse", {}),
            ("ppt-stability", {}),
            ("ppt-collapse", {}),
        ]:
            for t in range(5):
                ok1, res1, _ = rerun_trial(suite_id, dims, SEED, t, **kwargs)
                ok2, res2, _ = rerun_trial(suite_id, dims, SEED, t, **kwargs)
                assert ok1 == ok2
                assert res1 == res2

    def test_failure_payloads_rerun_to_same_residual(self):
        # A deliberately coarse rank tolerance undercounts ranks by
        # macroscopic singular-value ratios, manufacturing deterministic
        # counterexamples-at-that-tolerance.
        d = BipartiteDims(3, 3)
        report = suite_lemma_srank(d, 80, 1, tol=0.7)
        assert report.failures, "expected rank undercounts at tol=0.7"
        for payload in report.failures:
            seed, trial = payload["seed"]
            _, residual, _ = rerun_trial("srank", d, seed, trial, tol=0.7)
            assert abs(residual - payload["residual"]) <= 1e-12

    def test_probe_rerun_needs_k(self):
        d = BipartiteDims(2, 2)
        with pytest.raises(PreconditionError):
            rerun_trial("probe-intermediate", d, SEED, 0)

    def test_unknown_suite(self, dims):
        with pytest.raises(PreconditionError):
            rerun_trial("nope", dims, SEED, 0)


class TestDispatcher:
    def test_run_suite_routes_all_ids(self):
        d = BipartiteDims(2, 2)
        for suite_id in (
            "srank",
            "strict-enlargement",
            "cone-collapse",
            "local-stability",
            "witness-not-cstar",
            "ppt-stability",
            "ppt-collapse",
        ):
            report = run_suite(suite_id, d, seed=SEED, trials=6)
            assert report.suite_id == suite_id
            assert not report.failures
        report = run_suite("probe-intermediate", d, seed=SEED, trials=6, k=1)
        assert report.extra["non_ppt_outputs"] == 0

    def test_probe_requires_k(self):
        with pytest.raises(PreconditionError):
            run_suite("probe-intermediate", BipartiteDims(2, 2), seed=SEED, trials=5)

    def test_unknown_suite(self):
        with pytest.raises(PreconditionError):
            run_suite("made-up", BipartiteDims(2, 2), seed=SEED)

    def test_report_passes_plus_failures_is_trials(self, dims):
        report = suite_ppt_stability(dims, 15, SEED, tol=1e-16)
        assert report.passes + len(report.failures) == report.trials


class TestExtraInputsFlow:
    def test_extras_substituted_into_trials(self, rng):
        d = BipartiteDims(2, 2)
        extras = [np.eye(4) / 4.0]
        assert is_ppt(extras[0], d).verdict is Verdict.IN
        report = suite_ppt_stability(d, 10, SEED, extra_inputs=extras)
        assert report.passes == report.trials
