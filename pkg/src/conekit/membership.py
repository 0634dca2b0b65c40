"""Membership predicates and certificates for the bipartite positivity cones.

Verdicts are three-valued.  "Out" always carries an independently checkable
certificate (an eigenpair, a product pair, or a low-rank range vector);
"In" is only claimed where it is sound: PSD/PPT spectra, the Peres-Horodecki
region mn <= 6 for separability, and the PSD sufficient condition for
block-positivity.  Everything the see-saw heuristic cannot certify is
reported Indeterminate.
"""

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bipartite import DEFAULT_TOL, BipartiteDims, as_matrix, partial_transpose, sr
from .errors import HermiticityError, PreconditionError
from .sampling import ginibre


class Verdict(str, enum.Enum):
    IN = "in"
    OUT = "out"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class MembershipReport:
    """Outcome of a cone membership test."""

    verdict: Verdict
    min_eig: float
    tol: float
    certificate: dict | None = None


@dataclass(frozen=True)
class SeesawConfig:
    """Knobs for the randomized alternating minimizer; the seed is mandatory."""

    seed: int
    restarts: int = 32
    iters_per_restart: int = 200
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.seed < 0:
            raise PreconditionError("seed must be a nonnegative 64-bit integer")
        if self.restarts < 1 or self.iters_per_restart < 1:
            raise PreconditionError("restarts and iters_per_restart must be >= 1")
        if not (0.0 < self.tol < 1.0):
            raise PreconditionError("tol must lie in (0, 1)")


def hermitian_part(x, dims: BipartiteDims, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Symmetrized copy of x; rejects matrices that are not nearly Hermitian.

    Asymmetry up to 100*tol (relative to the Frobenius norm) is absorbed as
    serialization round-off.
    """
    x = as_matrix(dims, x)
    asym = np.linalg.norm(x - x.conj().T)
    if asym > 100.0 * tol * max(np.linalg.norm(x), 1.0):
        raise HermiticityError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
    return (x + x.conj().T) / 2.0


def is_psd(x, dims: BipartiteDims, tol: float = DEFAULT_TOL) -> MembershipReport:
    """PSD test by extremal eigenvalue, with the eigenpair as certificate."""
    h = hermitian_part(x, dims, tol)
    evals, evecs = np.linalg.eigh(h)
    lam = float(evals[0])
    cert = {"kind": "eigenpair", "eigenvalue": lam, "vector": evecs[:, 0].copy()}
    verdict = Verdict.IN if lam >= -tol else Verdict.OUT
    return MembershipReport(verdict=verdict, min_eig=lam, tol=tol, certificate=cert)


def is_ppt(x, dims: BipartiteDims, tol: float = DEFAULT_TOL) -> MembershipReport:
    """PPT test: both the matrix and its partial transpose must be PSD."""
    direct = is_psd(x, dims, tol)
    transposed = is_psd(partial_transpose(as_matrix(dims, x), dims), dims, tol)
    min_eig = min(direct.min_eig, transposed.min_eig)
    if direct.verdict is Verdict.IN and transposed.verdict is Verdict.IN:
        cert = {
            "kind": "ppt",
            "min_eig_matrix": direct.min_eig,
            "min_eig_partial_transpose": transposed.min_eig,
        }
        return MembershipReport(Verdict.IN, min_eig, tol, cert)
    side, failing = (
        ("matrix", direct) if direct.verdict is Verdict.OUT else ("partial_transpose", transposed)
    )
    cert = dict(failing.certificate, kind="ppt_side", side=side)
    return MembershipReport(Verdict.OUT, min_eig, tol, cert)


def is_separable_decidable(
    x, dims: BipartiteDims, tol: float = DEFAULT_TOL
) -> MembershipReport:
    """Separability in the regimes where it is decidable.

    For mn <= 6 the PPT criterion is exact.  Beyond that, rank-one matrices
    are decided through the Schmidt rank of their range vector, a failed PPT
    test is a sound rejection, and everything else is Indeterminate.
    """
    h = hermitian_part(x, dims, tol)
    evals, evecs = np.linalg.eigh(h)
    if evals[0] < -tol:
        raise PreconditionError(f"input is not PSD (min eigenvalue {evals[0]:.3e})")

    ppt = is_ppt(h, dims, tol)
    if dims.total <= 6:
        cert = dict(ppt.certificate, decided_by="ppt_criterion")
        return MembershipReport(ppt.verdict, ppt.min_eig, tol, cert)

    lam_max = float(evals[-1])
    numeric_rank = int(np.count_nonzero(evals >= tol * lam_max)) if lam_max > 0 else 0
    if numeric_rank == 1:
        vec = evecs[:, -1].copy()
        rank = sr(vec, dims, tol)
        cert = {"kind": "range_vector", "vector": vec, "sr": rank}
        verdict = Verdict.IN if rank == 1 else Verdict.OUT
        return MembershipReport(verdict, float(evals[0]), tol, cert)
    if ppt.verdict is Verdict.OUT:
        return MembershipReport(Verdict.OUT, ppt.min_eig, tol, ppt.certificate)
    return MembershipReport(Verdict.INDETERMINATE, float(evals[0]), tol, None)


def _deterministic_init(w: np.ndarray, dims: BipartiteDims, level: int) -> np.ndarray:
    """Right frame spanned by the top factors of the ground-state eigenvector."""
    _, evecs = np.linalg.eigh(w)
    ground = evecs[:, 0].reshape(dims.m, dims.n)
    _, _, vh = np.linalg.svd(ground)
    return np.ascontiguousarray(vh[:level, :].T)


def _frame_from_vector(v: np.ndarray, dims: BipartiteDims, level: int) -> np.ndarray:
    _, _, vh = np.linalg.svd(v.reshape(dims.m, dims.n))
    return np.ascontiguousarray(vh[:level, :].T)


def _optimize_level(w, wx, wy, dims, level, cfg, warm_v):
    m, n = dims.m, dims.n
    inits = [_deterministic_init(w, dims, level)]
    if warm_v is not None:
        inits.append(_frame_from_vector(warm_v, dims, level))
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, level, r])
        inits.append(np.ascontiguousarray(ginibre(rng, n, level)))
    best_val = np.inf
    best_pair = None
    for y0 in inits:
        val, x, y = _kernels.seesaw_minimize(
            m, n, level, wx, wy, y0, cfg.iters_per_restart, 1e-13
        )
        if val < best_val:
            best_val = val
            best_pair = (x, y)
    x, y = best_pair
    v = (x @ y.T).reshape(dims.total)
    v = v / np.linalg.norm(v)
    value = float(np.real(np.vdot(v, w @ v)))
    return value, v, x, y


def min_sr_k_expectation(w, dims: BipartiteDims, k: int, cfg: SeesawConfig):
    """Heuristic minimum of v* w v over unit v of Schmidt rank at most k.

    Levels 1..k are optimized in turn and each level warm-starts from the
    previous minimizer, so the value is nonincreasing in k by construction;
    at k = d the alternation contains an unconstrained eigen-step and returns
    the exact bottom eigenvalue.  The value is always an upper bound on the
    true constrained minimum.
    """
    if not (1 <= k <= dims.d):
        raise PreconditionError(f"k must lie in [1, {dims.d}], got {k}")
    h = hermitian_part(w, dims, cfg.tol)
    wx, wy = _kernels.prepare_layouts(h, dims.m, dims.n)
    value, v = np.inf, None
    for level in range(1, k + 1):
        value, v, _, _ = _optimize_level(h, wx, wy, dims, level, cfg, v)
    return value, v


def min_product_expectation(w, dims: BipartiteDims, cfg: SeesawConfig):
    """Heuristic minimum of (z (x) y)* w (z (x) y) over unit z, y.

    Identical to min_sr_k_expectation at k = 1, but returns the factor pair.
    """
    h = hermitian_part(w, dims, cfg.tol)
    wx, wy = _kernels.prepare_layouts(h, dims.m, dims.n)
    value, _, x, y = _optimize_level(h, wx, wy, dims, 1, cfg, None)
    z = x[:, 0] / np.linalg.norm(x[:, 0])
    yv = y[:, 0] / np.linalg.norm(y[:, 0])
    return value, z, yv


def is_block_positive_heuristic(
    w, dims: BipartiteDims, cfg: SeesawConfig
) -> MembershipReport:
    """Sound rejection / sound PSD acceptance for the block-positive cone.

    A product pair with negative expectation is a certificate of exclusion.
    Acceptance is only claimed through the PSD sufficient condition; a
    see-saw that merely fails to find a violator yields Indeterminate, since
    the product optimization is nonconvex.
    """
    h = hermitian_part(w, dims, cfg.tol)
    lam_min = float(np.linalg.eigvalsh(h)[0])
    if lam_min >= -cfg.tol:
        cert = {"kind": "psd_sufficient", "min_eig": lam_min}
        return MembershipReport(Verdict.IN, lam_min, cfg.tol, cert)
    value, z, y = min_product_expectation(h, dims, cfg)
    if value < -cfg.tol:
        cert = {
            "kind": "product_pair",
            "expectation": value,
            "z": z,
            "y": y,
            "seed": cfg.seed,
        }
        return MembershipReport(Verdict.OUT, lam_min, cfg.tol, cert)
    cert = {"kind": "seesaw_no_violation", "heuristic_min": value, "seed": cfg.seed}
    return MembershipReport(Verdict.INDETERMINATE, lam_min, cfg.tol, cert)
