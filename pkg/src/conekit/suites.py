"""Seeded randomized verification suites, one per constructive theorem.

Each suite runs independent trials, derives one generator per trial from
(seed, trial index), and collects counterexample payloads that re-run
deterministically.  Reports serialize byte-identically for identical
configurations, wall time aside.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .bipartite import (
    DEFAULT_TOL,
    BipartiteDims,
    as_matrix,
    basis_vec,
    complete_orthonormal_basis,
    kron,
    lift_product_to_target,
    max_entangled_vector,
    osr,
    partial_transpose,
    product_vec,
    sr,
    swap_operator,
)
from .errors import PreconditionError
from .kraus import (
    ConicCombination,
    KrausFamily,
    Locality,
    Mode,
    apply,
    collapse_construction,
    conic_scale,
    random_family,
    validate,
    witness_conjugation,
)
from .membership import Verdict, is_ppt, is_separable_decidable
from .sampling import (
    ginibre,
    haar_unitary,
    random_ppt,
    random_product_vector,
    random_psd,
    random_separable,
    random_unit_vector,
    random_vector_with_sr,
    random_operator_with_osr,
)

RESIDUAL_BOUND_TIGHT = 1e-10
RESIDUAL_BOUND = 1e-9


@dataclass
class SuiteReport:
    """Persistent outcome of one suite run."""

    suite_id: str
    dims: BipartiteDims
    trials: int
    passes: int
    failures: list = field(default_factory=list)
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    max_residual: float = 0.0
    wall_time: float = 0.0
    extra: dict | None = None

    def to_obj(self, include_wall_time: bool = True) -> dict:
        obj = {
            "suite_id": self.suite_id,
            "m": self.dims.m,
            "n": self.dims.n,
            "trials": self.trials,
            "passes": self.passes,
            "failures": self.failures,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "max_residual": self.max_residual,
        }
        if self.extra is not None:
            obj["extra"] = self.extra
        if include_wall_time:
            obj["wall_time"] = self.wall_time
        return obj


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def _derived_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**63 - 1))


def _run(suite_id, dims, trials, seed, tolerances, trial_fn) -> SuiteReport:
    start = time.perf_counter()
    failures = []
    passes = 0
    max_residual = 0.0
    not_applicable = []
    for t in range(trials):
        ok, residual, info = trial_fn(t)
        max_residual = max(max_residual, residual)
        if ok:
            passes += 1
            if info and info.get("not_applicable"):
                not_applicable.append(t)
        else:
            payload = {"trial": t, "seed": [seed, t], "residual": residual}
            if info:
                payload["info"] = info
            failures.append(payload)
    return SuiteReport(
        suite_id=suite_id,
        dims=dims,
        trials=trials,
        passes=passes,
        failures=failures,
        seed=seed,
        tolerances=tolerances,
        max_residual=max_residual,
        wall_time=time.perf_counter() - start,
        extra={"not_applicable_trials": not_applicable} if not_applicable else None,
    )


# ---------------------------------------------------------------------------
# Schmidt rank sub-multiplicativity: SR(Av) <= OSR(A) * SR(v)


def _trial_srank(dims, seed, t, tol):
    rng = _trial_rng(seed, t)
    k = int(rng.integers(1, dims.d + 1))
    r = int(rng.integers(1, dims.d + 1))
    a = random_operator_with_osr(rng, dims, k)
    v = random_vector_with_sr(rng, dims, r)
    av = a @ v
    if np.linalg.norm(av) < 1e-12:
        return True, 0.0, {"degenerate": True}
    osr_a = osr(a, dims, tol)
    sr_v = sr(v, dims, tol)
    sr_av = sr(av, dims, tol)
    ok = sr_av <= osr_a * sr_v
    if sr_v == 1:
        ok = ok and sr_av <= k
    gap = float(max(0, sr_av - osr_a * sr_v))
    info = {"planted_k": k, "planted_r": r, "osr_a": osr_a, "sr_v": sr_v, "sr_av": sr_av}
    return ok, gap, None if ok else info


def suite_lemma_srank(
    dims: BipartiteDims, trials: int, seed: int, tol: float = DEFAULT_TOL
) -> SuiteReport:
    """Random operators with planted OSR against vectors with planted SR."""
    return _run(
        "srank",
        dims,
        trials,
        seed,
        {"tol": tol},
        lambda t: _trial_srank(dims, seed, t, tol),
    )


# ---------------------------------------------------------------------------
# Strict enlargement: a single unitary carries a product state out of the
# separable cone.

STRICT_ENLARGEMENT_CASES = 6


def _trial_strict_enlargement(dims, seed, t, tol):
    rng = _trial_rng(seed, t)
    if t == 0:
        target = max_entangled_vector(dims)
    elif t == STRICT_ENLARGEMENT_CASES - 1:
        target = random_product_vector(rng, dims)  # control: stays separable
    else:
        rank = int(rng.integers(2, dims.d + 1))
        target = random_vector_with_sr(rng, dims, rank)
    u = random_unit_vector(rng, dims.m)
    v = random_unit_vector(rng, dims.n)
    x0 = kron(np.outer(u, u.conj()), np.outer(v, v.conj()))
    unitary = lift_product_to_target(u, v, target, dims)
    # The coefficient is the adjoint: A* X0 A = U X0 U* = (target)(target)*.
    family = KrausFamily(dims, [unitary.conj().T], Mode.EXACT)
    if validate(family).verdict is not Verdict.IN:
        return False, np.inf, {"stage": "family_validation"}
    image = apply(family, [x0])
    projector_residual = float(np.linalg.norm(image - np.outer(target, target.conj())))
    rank = sr(target, dims, tol)
    report = is_separable_decidable(image, dims, tol)
    expected = Verdict.IN if rank == 1 else Verdict.OUT
    ok = report.verdict is expected and projector_residual <= RESIDUAL_BOUND
    info = {"sr_target": rank, "verdict": report.verdict.value}
    return ok, projector_residual, None if ok else info


def suite_strict_enlargement(
    dims: BipartiteDims, seed: int, tol: float = DEFAULT_TOL
) -> SuiteReport:
    """Unitary images of product projectors leave the separable cone."""
    return _run(
        "strict-enlargement",
        dims,
        STRICT_ENLARGEMENT_CASES,
        seed,
        {"tol": tol, "residual_bound": RESIDUAL_BOUND},
        lambda t: _trial_strict_enlargement(dims, seed, t, tol),
    )


# ---------------------------------------------------------------------------
# Conic recombination: every PSD matrix is a nonnegative combination of
# unitary-lifted product projectors.


def _trial_cone_collapse(dims, seed, t, tol):
    rng = _trial_rng(seed, t)
    total = dims.total
    if t == 0:
        y = np.eye(total, dtype=np.complex128)
    elif t == 1:
        y = np.zeros((total, total), dtype=np.complex128)  # boundary: empty combination
    elif t % 5 == 2:
        # Rank-deficient draws exercise the dropped-eigenvalue path.
        rank = int(rng.integers(1, total))
        g = ginibre(rng, total, rank)
        y = (g @ g.conj().T) * rng.uniform(0.5, 2.0)
    else:
        y = random_psd(rng, total) * rng.uniform(0.5, 2.0)
    u = random_unit_vector(rng, dims.m)
    v = random_unit_vector(rng, dims.n)
    x0 = kron(np.outer(u, u.conj()), np.outer(v, v.conj()))
    evals, evecs = np.linalg.eigh((y + y.conj().T) / 2.0)
    weights = []
    terms = []
    for j in range(total):
        if evals[j] <= 1e-12:
            continue
        unitary = lift_product_to_target(u, v, evecs[:, j], dims)
        weights.append(float(evals[j]))
        terms.append(unitary @ x0 @ unitary.conj().T)
    rebuilt = conic_scale(ConicCombination(dims, np.asarray(weights), terms))
    residual = float(np.linalg.norm(rebuilt - y))
    ok = residual <= RESIDUAL_BOUND
    return ok, residual, None if ok else {"terms": len(terms)}


def suite_cone_collapse_pplus(
    dims: BipartiteDims, trials: int, seed: int, tol: float = DEFAULT_TOL
) -> SuiteReport:
    """Spectral decompositions recombine from lifted product projectors."""
    return _run(
        "cone-collapse",
        dims,
        trials,
        seed,
        {"tol": tol, "residual_bound": RESIDUAL_BOUND},
        lambda t: _trial_cone_collapse(dims, seed, t, tol),
    )


# ---------------------------------------------------------------------------
# Local stability: local exact families preserve separability (checked in
# the decidable region mn <= 6).


def _trial_local_stability(dims, seed, t, tol):
    rng = _trial_rng(seed, t)
    if t == 0:
        ops = [kron(haar_unitary(rng, dims.m), haar_unitary(rng, dims.n))]
        family = KrausFamily(dims, ops, Mode.EXACT, osr_bound=1, locality=Locality.LOCAL)
    else:
        count = int(rng.integers(2, 5))
        family = random_family(dims, count, 1, Mode.EXACT, _derived_seed(rng))
    inputs = [random_separable(rng, dims) for _ in family.ops]
    out = apply(family, inputs)
    report = is_separable_decidable(out, dims, tol)
    residual = float(max(0.0, -report.min_eig))
    ok = report.verdict is Verdict.IN
    return ok, residual, None if ok else {"verdict": report.verdict.value}


def suite_local_stability(
    dims: BipartiteDims, trials: int, seed: int, tol: float = DEFAULT_TOL
) -> SuiteReport:
    """Local exact combinations of separable inputs stay separable."""
    if dims.total > 6:
        raise PreconditionError(
            "separability is only decidable for mn <= 6; use 2x2 or 2x3"
        )
    return _run(
        "local-stability",
        dims,
        trials,
        seed,
        {"tol": tol},
        lambda t: _trial_local_stability(dims, seed, t, tol),
    )


# ---------------------------------------------------------------------------
# Witness instability: conjugating a witness by the right unitary exposes a
# product vector with negative expectation.

WITNESS_CASES = 6


def _trial_witness_not_cstar(dims, seed, t, tol):
    rng = _trial_rng(seed, t)
    if t == 0 and dims.m == dims.n:
        witness = swap_operator(dims)
    elif t == 1:
        bell = max_entangled_vector(dims)
        witness = partial_transpose(np.outer(bell, bell.conj()), dims)
    elif t == 2:
        # PSD control: no negative eigenvector exists, so the construction
        # does not apply and the case records as not applicable.
        psd = random_psd(rng, dims.total)
        if np.linalg.eigvalsh(psd)[0] >= -tol:
            return True, 0.0, {"not_applicable": True}
        return False, np.inf, {"stage": "psd_control"}
    else:
        rank = int(rng.integers(2, dims.d + 1))
        w_vec = random_vector_with_sr(rng, dims, rank)
        witness = partial_transpose(np.outer(w_vec, w_vec.conj()), dims)
    evals, evecs = np.linalg.eigh(witness)
    lam_min = float(evals[0])
    z = evecs[:, 0]
    u = random_unit_vector(rng, dims.m)
    v = random_unit_vector(rng, dims.n)
    conjugated, p = witness_conjugation(witness, z, u, v, dims, tol)
    value = float(np.real(np.vdot(p, conjugated @ p)))
    residual = abs(value - lam_min)
    ok = residual <= RESIDUAL_BOUND_TIGHT and value < -tol
    info = {"expectation": value, "min_eig": lam_min}
    return ok, residual, None if ok else info


def suite_witness_not_cstar(
    dims: BipartiteDims, seed: int, tol: float = DEFAULT_TOL
) -> SuiteReport:
    """Conjugated witnesses take negative product expectations."""
    return _run(
        "witness-not-cstar",
        dims,
        WITNESS_CASES,
        seed,
        {"tol": tol, "residual_bound": RESIDUAL_BOUND_TIGHT},
        lambda t: _trial_witness_not_cstar(dims, seed, t, tol),
    )


# ---------------------------------------------------------------------------
# PPT stability under product-coefficient families.


def _trial_ppt_stability(dims, seed, t, tol, extra_inputs=None):
    rng = _trial_rng(seed, t)
    if t == 0:
        family = KrausFamily(
            dims,
            [np.eye(dims.total, dtype=np.complex128)],
            Mode.EXACT,
            osr_bound=1,
            locality=Locality.LOCAL,
        )
    else:
        count = int(rng.integers(1, 5))
        family = random_family(dims, count, 1, Mode.EXACT, _derived_seed(rng))
    inputs = [random_ppt(rng, dims) for _ in family.ops]
    used_extras = 0
    if extra_inputs:
        used_extras = min(len(extra_inputs), len(inputs))
        for i in range(used_extras):
            inputs[i] = as_matrix(dims, extra_inputs[i])
    out = apply(family, inputs)
    report = is_ppt(out, dims, tol)
    residual = float(max(0.0, -report.min_eig))
    ok = report.verdict is Verdict.IN
    info = {"ops": len(family.ops), "extra_inputs_used": used_extras}
    return ok, residual, None if ok else info


def suite_ppt_stability(
    dims: BipartiteDims,
    trials: int,
    seed: int,
    tol: float = DEFAULT_TOL,
    extra_inputs: list | None = None,
) -> SuiteReport:
    """Product-coefficient exact families keep PPT inputs PPT.

    Optional extra inputs (e.g. bound-entangled states loaded from files)
    are checked for PPT membership and then substituted into the sampled
    input slots of every trial.
    """
    if extra_inputs:
        for x in extra_inputs:
            if is_ppt(x, dims, tol).verdict is not Verdict.IN:
                raise PreconditionError("extra inputs must be PPT")
    return _run(
        "ppt-stability",
        dims,
        trials,
        seed,
        {"tol": tol},
        lambda t: _trial_ppt_stability(dims, seed, t, tol, extra_inputs),
    )


# ---------------------------------------------------------------------------
# Full collapse: the rank-one scheme reaches every pure state from PPT inputs.


def _trial_ppt_collapse(dims, seed, t, tol):
    rng = _trial_rng(seed, t)
    total = dims.total
    if t == 0:
        v = max_entangled_vector(dims)
    elif t == 1:
        v = product_vec(basis_vec(dims.m, 0), basis_vec(dims.n, 0))  # degenerate control
    else:
        v = random_unit_vector(rng, total)
    family, inputs = collapse_construction(v, dims)
    s = sum(a.conj().T @ a for a in family.ops)
    norm_residual = float(np.linalg.norm(s - np.eye(total)))
    out = apply(family, inputs)
    out_residual = float(np.linalg.norm(out - np.outer(v, v.conj())))
    ranks = [0 if np.linalg.norm(a) == 0.0 else osr(a, dims) for a in family.ops]
    inputs_ppt = all(
        np.linalg.norm(x) == 0.0 or is_ppt(x, dims, tol).verdict is Verdict.IN
        for x in inputs
    )
    residual = max(norm_residual, out_residual)
    ok = (
        norm_residual <= RESIDUAL_BOUND_TIGHT
        and out_residual <= RESIDUAL_BOUND_TIGHT
        and max(ranks) <= dims.d
        and inputs_ppt
    )
    info = {"norm_residual": norm_residual, "out_residual": out_residual, "max_osr": max(ranks)}
    return ok, residual, None if ok else info


def suite_ppt_collapse(
    dims: BipartiteDims, trials: int, seed: int, tol: float = DEFAULT_TOL
) -> SuiteReport:
    """Collapse construction residuals, OSR bounds, and PPT input checks."""
    return _run(
        "ppt-collapse",
        dims,
        trials,
        seed,
        {"tol": tol, "residual_bound": RESIDUAL_BOUND_TIGHT},
        lambda t: _trial_ppt_collapse(dims, seed, t, tol),
    )


# ---------------------------------------------------------------------------
# Exploratory probe of the intermediate hulls between PPT and PSD.


def structured_exact_family(
    rng: np.random.Generator, dims: BipartiteDims, k: int, tol: float = DEFAULT_TOL
) -> KrausFamily:
    """Exact family whose every coefficient has certified OSR at most k.

    A Schmidt-aligned orthonormal basis of the composite space is built so
    that each basis vector has Schmidt rank at most k (products off the
    planted block, rotated combinations inside it); each coefficient is a
    rank-one map from a basis vector onto a random product vector, so the
    family resolves the identity with per-operator OSR = SR(basis vector).
    """
    m, n, total = dims.m, dims.n, dims.total
    ul = haar_unitary(rng, m)
    ur = haar_unitary(rng, n)
    coeffs = rng.uniform(0.3, 1.0, size=k).astype(np.complex128)
    coeffs /= np.linalg.norm(coeffs)
    rotation = complete_orthonormal_basis(coeffs)
    basis = []
    for s in range(k):
        w = np.zeros(total, dtype=np.complex128)
        for i in range(k):
            w += rotation[i, s] * product_vec(ul[:, i], ur[:, i])
        basis.append(w)
    for i in range(m):
        for j in range(n):
            if i == j and i < k:
                continue
            basis.append(product_vec(ul[:, i], ur[:, j]))
    ops = [
        np.outer(random_product_vector(rng, dims), b.conj()) for b in basis
    ]
    return KrausFamily(dims, ops, Mode.EXACT, osr_bound=k)


def _trial_probe(dims, seed, t, tol, k):
    rng = _trial_rng(seed, t)
    family = structured_exact_family(rng, dims, k)
    inputs = []
    for i in range(len(family.ops)):
        x = random_ppt(rng, dims)
        # Spread input scales so both balanced and concentrated combinations
        # are explored; the first slot feeds the entangled basis vector.
        scale = rng.uniform(1.0, 2.0 * dims.total) if i == 0 else rng.uniform(0.5, 2.0)
        inputs.append(scale * x)
    out = apply(family, inputs)
    gamma_min = float(np.linalg.eigvalsh(partial_transpose(out, dims))[0])
    is_out_ppt = gamma_min >= -tol
    info = {"gamma_min_eig": gamma_min, "ppt": is_out_ppt}
    return True, 0.0, info


def probe_intermediate(
    dims: BipartiteDims, k: int, trials: int, seed: int, tol: float = DEFAULT_TOL
) -> SuiteReport:
    """Tally how often OSR-k exact combinations of PPT inputs escape PPT.

    Exploratory only: non-PPT outputs are recorded as evidence with their
    partial-transpose eigenvalue, never as failures, and the report carries
    no theorem verdict.
    """
    if not (1 <= k <= dims.d):
        raise PreconditionError(f"k must lie in [1, {dims.d}], got {k}")
    start = time.perf_counter()
    ppt_count = 0
    non_ppt = []
    most_negative = 0.0
    for t in range(trials):
        _, _, info = _trial_probe(dims, seed, t, tol, k)
        if info["ppt"]:
            ppt_count += 1
        else:
            non_ppt.append({"trial": t, "seed": [seed, t], "gamma_min_eig": info["gamma_min_eig"]})
            most_negative = min(most_negative, info["gamma_min_eig"])
    report = SuiteReport(
        suite_id="probe-intermediate",
        dims=dims,
        trials=trials,
        passes=trials,
        failures=[],
        seed=seed,
        tolerances={"tol": tol, "k": k},
        max_residual=0.0,
        wall_time=time.perf_counter() - start,
        extra={
            "verdict": "exploratory",
            "k": k,
            "ppt_outputs": ppt_count,
            "non_ppt_outputs": len(non_ppt),
            "most_negative_gamma_eigenvalue": most_negative,
            "evidence": non_ppt,
        },
    )
    return report


# ---------------------------------------------------------------------------
# Registry: re-run a single trial of any suite from its embedded seed.

_TRIALS = {
    "srank": _trial_srank,
    "strict-enlargement": _trial_strict_enlargement,
    "cone-collapse": _trial_cone_collapse,
    "local-stability": _trial_local_stability,
    "witness-not-cstar": _trial_witness_not_cstar,
    "ppt-stability": _trial_ppt_stability,
    "ppt-collapse": _trial_ppt_collapse,
}

SUITE_IDS = tuple(_TRIALS) + ("probe-intermediate",)


def rerun_trial(
    suite_id: str,
    dims: BipartiteDims,
    seed: int,
    trial: int,
    tol: float = DEFAULT_TOL,
    k: int | None = None,
    extra_inputs: list | None = None,
):
    """Re-execute one trial from its embedded seed; returns (ok, residual, info)."""
    if suite_id == "probe-intermediate":
        if k is None:
            raise PreconditionError("probe-intermediate needs k")
        return _trial_probe(dims, seed, trial, tol, k)
    if suite_id == "ppt-stability":
        return _trial_ppt_stability(dims, seed, trial, tol, extra_inputs)
    if suite_id not in _TRIALS:
        raise PreconditionError(f"unknown suite {suite_id!r}")
    return _TRIALS[suite_id](dims, seed, trial, tol)


def run_suite(
    suite_id: str,
    dims: BipartiteDims,
    seed: int,
    trials: int | None = None,
    tol: float = DEFAULT_TOL,
    k: int | None = None,
    extra_inputs: list | None = None,
) -> SuiteReport:
    """Dispatch a suite by identifier (the CLI front door)."""
    default_trials = 500
    if suite_id == "srank":
        return suite_lemma_srank(dims, trials or 1000, seed, tol)
    if suite_id == "strict-enlargement":
        return suite_strict_enlargement(dims, seed, tol)
    if suite_id == "cone-collapse":
        return suite_cone_collapse_pplus(dims, trials or 200, seed, tol)
    if suite_id == "local-stability":
        return suite_local_stability(dims, trials or default_trials, seed, tol)
    if suite_id == "witness-not-cstar":
        return suite_witness_not_cstar(dims, seed, tol)
    if suite_id == "ppt-stability":
        return suite_ppt_stability(dims, trials or default_trials, seed, tol, extra_inputs)
    if suite_id == "ppt-collapse":
        return suite_ppt_collapse(dims, trials or 200, seed, tol)
    if suite_id == "probe-intermediate":
        if k is None:
            raise PreconditionError("probe-intermediate needs k")
        return probe_intermediate(dims, k, trials or 200, seed, tol)
    raise PreconditionError(f"unknown suite {suite_id!r}; known: {', '.join(SUITE_IDS)}")
