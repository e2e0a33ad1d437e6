"""Dense linear algebra for small symmetric matrices.

The eigensolver is a cyclic Jacobi method vectorized over a stack of
matrices: every rotation (p, q) is applied to all matrices of the stack at
once, and matrices that have already converged receive the identity rotation
(c = 1, s = 0), which leaves their entries bit-for-bit unchanged. A matrix
therefore gets exactly the same result whether it is decomposed alone or as
part of a batch.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

MIN_ORDER = 2
MAX_ORDER = 64

# convergence: max off-diagonal |entry| <= OFF_DIAG_TOL * ||S||_F
OFF_DIAG_TOL = 1e-14
MAX_SWEEPS = 100
SYMMETRY_TOL = 1e-12
SIGN_TOL = 1e-12
# relative gap (w.r.t. ||S||_F) below which eigenvalues count as repeated
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs of a symmetric matrix.

    ``eigenvectors[:, i]`` is paired with ``eigenvalues[i]``; eigenvalues are
    ascending (repeated eigenvalues within ``DEGENERACY_TOL`` keep their
    pairing after the lexicographic tie ordering).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __iter__(self):
        yield self.eigenvalues
        yield self.eigenvectors


def check_sym_matrix(S, name="S"):
    """Validate a single symmetric matrix or a stack of them (last two axes)."""
    S = np.asarray(S, dtype=np.float64)
    if S.ndim < 2 or S.shape[-1] != S.shape[-2]:
        raise DomainError(f"{name} must be square, got shape {S.shape}")
    order = S.shape[-1]
    if not MIN_ORDER <= order <= MAX_ORDER:
        raise DomainError(f"{name} order must be in [{MIN_ORDER}, {MAX_ORDER}], got {order}")
    if not np.all(np.isfinite(S)):
        raise DomainError(f"{name} contains NaN or Inf")
    scale = np.max(np.abs(S), axis=(-2, -1), keepdims=True)
    asym = np.max(np.abs(S - np.swapaxes(S, -1, -2)), axis=(-2, -1), keepdims=True)
    if np.any(asym > SYMMETRY_TOL * scale):
        raise DomainError(f"{name} is not symmetric")
    return S


def _pairs(order):
    return [(p, q) for p in range(order - 1) for q in range(p + 1, order)]


def _jacobi_batch(S):
    A = S.copy()
    n_mat, order, _ = A.shape
    V = np.broadcast_to(np.eye(order), A.shape).copy()
    fro = np.sqrt(np.sum(A * A, axis=(1, 2)))
    tol = OFF_DIAG_TOL * fro
    offmask = ~np.eye(order, dtype=bool)
    active = np.ones(n_mat, dtype=bool)
    pairs = _pairs(order)

    for _ in range(MAX_SWEEPS):
        off = np.max(np.abs(A[:, offmask]), axis=1)
        active &= off > tol
        if not active.any():
            break
        for p, q in pairs:
            apq = A[:, p, q]
            rot = active & (apq != 0.0)
            if not rot.any():
                continue
            app = A[:, p, p]
            aqq = A[:, q, q]
            with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
                theta = (aqq - app) / (2.0 * np.where(rot, apq, 1.0))
                t = np.copysign(1.0, theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(rot, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            new_pp = app - t * apq
            new_qq = aqq + t * apq

            cc = c[:, None]
            ss = s[:, None]
            col_p = A[:, :, p].copy()
            col_q = A[:, :, q].copy()
            A[:, :, p] = cc * col_p - ss * col_q
            A[:, :, q] = ss * col_p + cc * col_q
            row_p = A[:, p, :].copy()
            row_q = A[:, q, :].copy()
            A[:, p, :] = cc * row_p - ss * row_q
            A[:, q, :] = ss * row_p + cc * row_q
            A[:, p, p] = np.where(rot, new_pp, A[:, p, p])
            A[:, q, q] = np.where(rot, new_qq, A[:, q, q])
            A[:, p, q] = np.where(rot, 0.0, A[:, p, q])
            A[:, q, p] = A[:, p, q]

            vp = V[:, :, p].copy()
            vq = V[:, :, q].copy()
            V[:, :, p] = cc * vp - ss * vq
            V[:, :, q] = ss * vp + cc * vq

    return np.diagonal(A, axis1=1, axis2=2).copy(), V, fro


def _normalize_signs(V):
    # first component with magnitude > SIGN_TOL made positive, per column
    big = np.abs(V) > SIGN_TOL
    first = np.argmax(big, axis=-2)
    lead = np.take_along_axis(V, first[..., None, :], axis=-2)[..., 0, :]
    flip = np.where(lead < 0, -1.0, 1.0)
    return V * flip[..., None, :]


def _order_degenerate(vals, V, fro):
    """Order columns of near-equal eigenvalues lexicographically by entries."""
    tol = DEGENERACY_TOL * fro
    close = np.diff(vals, axis=1) <= tol[:, None]
    for b in np.flatnonzero(close.any(axis=1)):
        order = list(range(vals.shape[1]))
        i = 0
        n = vals.shape[1]
        while i < n:
            j = i
            while j + 1 < n and close[b, j]:
                j += 1
            if j > i:
                block = list(range(i, j + 1))
                block.sort(key=lambda col: tuple(V[b, :, col]))
                order[i : j + 1] = block
            i = j + 1
        vals[b] = vals[b, order]
        V[b] = V[b][:, order]
    return vals, V


def eigen_sym_batch(S):
    """Eigen-decompose a stack of symmetric matrices.

    Parameters
    ----------
    S : array-like, shape (n_matrices, l, l)

    Returns
    -------
    eigenvalues : ndarray, shape (n_matrices, l)
        Ascending per matrix.
    eigenvectors : ndarray, shape (n_matrices, l, l)
        Orthonormal columns, sign-normalized.
    """
    S = check_sym_matrix(S)
    if S.ndim != 3:
        raise DomainError(f"expected a stack of matrices, got shape {S.shape}")
    if S.shape[0] == 0:
        order = S.shape[1]
        return np.empty((0, order)), np.empty((0, order, order))
    vals, V, fro = _jacobi_batch(S)
    idx = np.argsort(vals, axis=1, kind="stable")
    vals = np.take_along_axis(vals, idx, axis=1)
    V = np.take_along_axis(V, idx[:, None, :], axis=2)
    V = _normalize_signs(V)
    return _order_degenerate(vals, V, fro)


def eigen_sym(S):
    """Eigen-decomposition of one symmetric matrix by cyclic Jacobi rotations.

    >>> vals, vecs = eigen_sym([[2.0, 1.0], [1.0, 2.0]])
    >>> vals.round(12).tolist()
    [1.0, 3.0]
    """
    S = check_sym_matrix(S)
    if S.ndim != 2:
        raise DomainError(f"expected a single matrix, got shape {S.shape}")
    vals, vecs = eigen_sym_batch(S[None])
    return EigenDecomposition(vals[0], vecs[0])


def gram(A):
    """``A.T @ A`` for one matrix ``(r, l)`` or a stack ``(..., r, l)``.

    Rows are accumulated in a fixed order and the upper triangle is mirrored,
    so the result is exactly symmetric and bit-reproducible.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim < 2:
        raise DomainError(f"gram expects a matrix, got shape {A.shape}")
    r, order = A.shape[-2:]
    if r < 1 or order < MIN_ORDER:
        raise DomainError(f"gram needs r >= 1 and l >= {MIN_ORDER}, got {A.shape[-2:]}")
    if not np.all(np.isfinite(A)):
        raise DomainError("gram input contains NaN or Inf")
    S = np.zeros(A.shape[:-2] + (order, order))
    for i in range(r):
        row = A[..., i, :]
        S += row[..., :, None] * row[..., None, :]
    upper = np.triu(S)
    return upper + np.swapaxes(np.triu(S, 1), -1, -2)


def mat_mul(S, V):
    """``S @ V`` with a fixed summation order.

    ``S`` may be ``(l, l)`` or a stack ``(..., l, l)``; ``V`` is ``(l, p)``
    (or stacked with matching leading axes).
    """
    S = np.asarray(S, dtype=np.float64)
    V = np.asarray(V, dtype=np.float64)
    if S.ndim < 2 or V.ndim < 2 or S.shape[-1] != V.shape[-2]:
        raise DomainError(f"cannot multiply shapes {S.shape} and {V.shape}")
    out_shape = np.broadcast_shapes(S.shape[:-2], V.shape[:-2]) + (S.shape[-2], V.shape[-1])
    out = np.zeros(out_shape)
    for k in range(S.shape[-1]):
        out += S[..., :, k, None] * V[..., None, k, :]
    return out
