"""Dense complex linear algebra on a bipartite space C^m (x) C^n.

The index convention is row-major throughout: the product basis vector
e_i (x) f_j lives at flat index i*n + j, which is exactly numpy's reshape
order for an (m, n) array.  Every reshuffle (partial transpose,
realignment) is derived from that single convention.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimError, NormError, ZeroInputError

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class BipartiteDims:
    """Dimension pair (m, n) of the two tensor factors."""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise DimError(f"factor dimensions must be >= 1, got ({self.m}, {self.n})")

    @property
    def d(self) -> int:
        """min(m, n), the maximal Schmidt rank."""
        return min(self.m, self.n)

    @property
    def total(self) -> int:
        """Total dimension m*n of the composite space."""
        return self.m * self.n


def as_vector(dims: BipartiteDims, v) -> np.ndarray:
    """Coerce to a complex vector of length dims.total."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.shape != (dims.total,):
        raise DimError(f"expected vector of length {dims.total}, got shape {arr.shape}")
    return arr


def as_matrix(dims: BipartiteDims, x) -> np.ndarray:
    """Coerce to a complex square matrix of side dims.total."""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.shape != (dims.total, dims.total):
        raise DimError(
            f"expected {dims.total}x{dims.total} matrix, got shape {arr.shape}"
        )
    return arr


def kron(a, b) -> np.ndarray:
    """Kronecker product of two square matrices, row-major index pairing."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimError(f"first factor must be square, got shape {a.shape}")
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise DimError(f"second factor must be square, got shape {b.shape}")
    return np.kron(a, b)


def product_vec(u, v) -> np.ndarray:
    """The simple tensor u (x) v as a flat vector."""
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    if u.ndim != 1 or v.ndim != 1:
        raise DimError("product_vec expects two 1-d vectors")
    return np.kron(u, v)


def basis_vec(dim: int, i: int) -> np.ndarray:
    """Standard basis vector e_i of C^dim."""
    e = np.zeros(dim, dtype=np.complex128)
    e[i] = 1.0
    return e


def max_entangled_vector(dims: BipartiteDims) -> np.ndarray:
    """Unit vector sum_i e_i (x) f_i / sqrt(d); Schmidt rank d."""
    v = np.zeros(dims.total, dtype=np.complex128)
    for i in range(dims.d):
        v[i * dims.n + i] = 1.0
    return v / np.sqrt(dims.d)


def swap_operator(dims: BipartiteDims) -> np.ndarray:
    """Flip operator F(x (x) y) = y (x) x; requires m == n."""
    if dims.m != dims.n:
        raise DimError("swap operator needs equal factor dimensions")
    m = dims.m
    f = np.zeros((m * m, m * m), dtype=np.complex128)
    for i in range(m):
        for j in range(m):
            f[i * m + j, j * m + i] = 1.0
    return f


def partial_transpose(x, dims: BipartiteDims) -> np.ndarray:
    """Transpose of the second tensor factor (block-wise n x n transpose)."""
    x = as_matrix(dims, x)
    m, n = dims.m, dims.n
    return (
        x.reshape(m, n, m, n).transpose(0, 3, 2, 1).reshape(dims.total, dims.total)
    )


def realign(a, dims: BipartiteDims) -> np.ndarray:
    """Reshuffle an (mn x mn) operator into the (m^2 x n^2) realignment matrix.

    Row index is the first-factor pair (i, k), column index the second-factor
    pair (j, l); a tensor product R (x) S realigns to the rank-one matrix
    vec(R) vec(S)^T, so the singular values of the realignment are exactly
    the operator Schmidt coefficients.
    """
    a = as_matrix(dims, a)
    m, n = dims.m, dims.n
    return a.reshape(m, n, m, n).transpose(0, 2, 1, 3).reshape(m * m, n * n)


def _rank_from_singulars(s: np.ndarray, tol: float) -> int:
    # Conservative: values at the cutoff count as nonzero.
    return int(np.count_nonzero(s >= tol * s[0]))


def _check_tol(tol: float):
    if not (0.0 < tol < 1.0):
        raise ValueError(f"tol must lie in (0, 1), got {tol}")


@dataclass(frozen=True)
class SchmidtDecomp:
    """SVD data of a bipartite vector: v = sum_i coeffs[i] left[i] (x) right[i]."""

    dims: BipartiteDims
    coeffs: np.ndarray  # nonincreasing, length d
    left: np.ndarray  # (d, m), orthonormal rows
    right: np.ndarray  # (d, n), orthonormal rows
    rank: int
    tol: float

    def reconstruct(self) -> np.ndarray:
        """Rebuild the vector from all stored triplets."""
        return np.einsum("t,ti,tj->ij", self.coeffs, self.left, self.right).reshape(
            self.dims.total
        )


@dataclass(frozen=True)
class OpSchmidtDecomp:
    """Realignment SVD of an operator: a = sum_i coeffs[i] left[i] (x) right[i]."""

    dims: BipartiteDims
    coeffs: np.ndarray  # nonincreasing, length min(m^2, n^2)
    left: np.ndarray  # (r, m, m), orthonormal in the Frobenius inner product
    right: np.ndarray  # (r, n, n), orthonormal in the Frobenius inner product
    rank: int
    tol: float

    def reconstruct(self) -> np.ndarray:
        """Rebuild the operator from all stored triplets."""
        total = self.dims.total
        out = np.zeros((total, total), dtype=np.complex128)
        for c, r, s in zip(self.coeffs, self.left, self.right):
            out += c * np.kron(r, s)
        return out


def schmidt_decompose(v, dims: BipartiteDims, tol: float = DEFAULT_TOL) -> SchmidtDecomp:
    """Schmidt decomposition of a bipartite vector via SVD of its (m, n) reshape."""
    _check_tol(tol)
    v = as_vector(dims, v)
    if np.linalg.norm(v) == 0.0:
        raise ZeroInputError("cannot Schmidt-decompose the zero vector")
    coeff_matrix = v.reshape(dims.m, dims.n)
    u, s, vh = np.linalg.svd(coeff_matrix, full_matrices=False)
    return SchmidtDecomp(
        dims=dims,
        coeffs=s,
        left=np.ascontiguousarray(u.T),
        right=np.ascontiguousarray(vh),
        rank=_rank_from_singulars(s, tol),
        tol=tol,
    )


def op_schmidt_decompose(
    a, dims: BipartiteDims, tol: float = DEFAULT_TOL
) -> OpSchmidtDecomp:
    """Operator Schmidt decomposition via SVD of the realignment matrix."""
    _check_tol(tol)
    a = as_matrix(dims, a)
    if np.linalg.norm(a) == 0.0:
        raise ZeroInputError("cannot decompose the zero operator")
    u, s, vh = np.linalg.svd(realign(a, dims), full_matrices=False)
    m, n = dims.m, dims.n
    r = s.shape[0]
    return OpSchmidtDecomp(
        dims=dims,
        coeffs=s,
        left=np.ascontiguousarray(u.T).reshape(r, m, m),
        right=np.ascontiguousarray(vh).reshape(r, n, n),
        rank=_rank_from_singulars(s, tol),
        tol=tol,
    )


def sr(v, dims: BipartiteDims, tol: float = DEFAULT_TOL) -> int:
    """Schmidt rank of a vector."""
    return schmidt_decompose(v, dims, tol).rank


def osr(a, dims: BipartiteDims, tol: float = DEFAULT_TOL) -> int:
    """Operator Schmidt rank of an operator."""
    return op_schmidt_decompose(a, dims, tol).rank


def complete_orthonormal_basis(x: np.ndarray) -> np.ndarray:
    """Unitary whose first column is exactly x (unit), built deterministically.

    Standard basis vectors are Gram-Schmidt'd against the running basis and
    kept while independent; a second orthonormalization pass suppresses
    rounding drift without disturbing the leading column.
    """
    dim = x.shape[0]
    cols = [x]
    # Any partial orthonormal set leaves a standard vector with residual
    # norm at least 1/sqrt(dim), so this threshold never starves the basis.
    keep = 0.5 / np.sqrt(dim)
    for i in range(dim):
        if len(cols) == dim:
            break
        y = basis_vec(dim, i)
        for b in cols:
            y = y - b * np.vdot(b, y)
        nrm = np.linalg.norm(y)
        if nrm > keep:
            cols.append(y / nrm)
    basis = np.empty((dim, dim), dtype=np.complex128)
    for j, y in enumerate(cols):
        for jj in range(j):
            y = y - basis[:, jj] * np.vdot(basis[:, jj], y)
        basis[:, j] = y / np.linalg.norm(y)
    return basis


def lift_product_to_target(
    u, v, w, dims: BipartiteDims, norm_tol: float = DEFAULT_TOL
) -> np.ndarray:
    """Unitary U with U(u (x) v) = w, for unit u, v, w.

    Both u (x) v and w are completed to orthonormal bases and the bases are
    paired column by column, so the image of the product vector is exact up
    to rounding.
    """
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    w = as_vector(dims, w)
    if u.shape != (dims.m,) or v.shape != (dims.n,):
        raise DimError("u must live in C^m and v in C^n")
    for name, vec in (("u", u), ("v", v), ("w", w)):
        if abs(np.linalg.norm(vec) - 1.0) > norm_tol:
            raise NormError(f"{name} must be a unit vector")
    source = product_vec(u, v)
    source = source / np.linalg.norm(source)
    target = w / np.linalg.norm(w)
    b_source = complete_orthonormal_basis(source)
    b_target = complete_orthonormal_basis(target)
    return b_target @ b_source.conj().T
