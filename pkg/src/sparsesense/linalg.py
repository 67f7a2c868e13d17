"""Dense linear-algebra kernels: truncated SVD, pivoted QR, pseudoinverse,
and the two proximal operators (entrywise soft threshold, singular value
threshold) used by the low-rank/sparse solver.

SVD and pseudoinverse are backed by LAPACK through numpy; factors are
post-processed with a fixed sign convention (largest-magnitude entry of
each left singular vector positive) so repeated runs produce identical
factors.  Pivoted QR is implemented directly so the column tie-break rule
is fully specified rather than platform-dependent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, DegenerateInputError, ValidationError

#: relative norm gap below which two pivot candidates count as tied
PIVOT_TIE_RTOL = 1e-12

#: default relative cutoff for small singular values in the pseudoinverse
DEFAULT_RCOND = 1e-12


def validate_matrix(A, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float64 array; raise ValidationError otherwise."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got shape {A.shape}")
    if A.size == 0:
        raise ValidationError(f"{name} must be non-empty")
    if not np.all(np.isfinite(A)):
        raise ValidationError(f"{name} contains non-finite entries")
    return A


@dataclass(frozen=True)
class SvdFactors:
    """Top-k singular triplets: U (m,k), singular_values (k,), V (n,k)."""

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.singular_values) @ self.V.T


def _fix_signs(U: np.ndarray, Vt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Largest-magnitude entry of each U column forced positive; the matching
    # V row is flipped with it so the product is unchanged.
    for j in range(U.shape[1]):
        i = int(np.argmax(np.abs(U[:, j])))
        if U[i, j] < 0:
            U[:, j] = -U[:, j]
            Vt[j, :] = -Vt[j, :]
    return U, Vt


def svd_compact(A: np.ndarray) -> SvdFactors:
    """Full economy-size SVD with the deterministic sign convention."""
    A = validate_matrix(A)
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    U, Vt = _fix_signs(U.copy(), Vt.copy())
    return SvdFactors(U=U, singular_values=s, V=Vt.T)


def svd_truncated(A, r: int) -> SvdFactors:
    """Top-r singular triplets of A."""
    A = validate_matrix(A)
    if not 1 <= r <= min(A.shape):
        raise BoundsError(f"rank {r} outside [1, {min(A.shape)}]")
    f = svd_compact(A)
    return SvdFactors(U=f.U[:, :r].copy(),
                      singular_values=f.singular_values[:r].copy(),
                      V=f.V[:, :r].copy())


def soft_threshold(x, tau: float):
    """Entrywise shrink-toward-zero: sgn(x) * max(|x| - tau, 0)."""
    if tau < 0:
        raise ValidationError("threshold must be nonnegative")
    x = np.asarray(x, dtype=np.float64)
    out = np.sign(x) * np.maximum(np.abs(x) - tau, 0.0)
    return float(out) if out.ndim == 0 else out


def singular_value_threshold(A, tau: float) -> np.ndarray:
    """Shrink the singular values of A by tau (proximal step of the nuclear norm)."""
    if tau < 0:
        raise ValidationError("threshold must be nonnegative")
    A = validate_matrix(A)
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    s = np.maximum(s - tau, 0.0)
    return (U * s) @ Vt


def qr_column_pivot(A) -> tuple[np.ndarray, np.ndarray]:
    """Householder QR with greedy column pivoting (Businger-Golub).

    Returns (pivot_indices, r_diagonal): the full column permutation in
    selection order and the diagonal of R.  Ties in the residual column
    norms (within PIVOT_TIE_RTOL relative) resolve to the lowest index so
    the permutation is identical across platforms.
    """
    A = validate_matrix(A)
    R = A.copy()
    m, n = R.shape
    steps = min(m, n)
    perm = np.arange(n)
    norms2 = np.sum(R * R, axis=0)
    if not np.any(norms2 > 0):
        raise DegenerateInputError("all-zero matrix has no pivot order")
    orig2 = norms2.copy()
    rdiag = np.zeros(steps)
    for k in range(n):
        tail = norms2[k:]
        best = float(tail.max())
        if best <= 0:
            break
        # lowest index among near-ties
        tied = np.nonzero(tail >= best * (1.0 - PIVOT_TIE_RTOL))[0]
        j = k + int(tied[0])
        if j != k:
            R[:, [k, j]] = R[:, [j, k]]
            perm[[k, j]] = perm[[j, k]]
            norms2[[k, j]] = norms2[[j, k]]
            orig2[[k, j]] = orig2[[j, k]]
        if k >= steps:
            continue
        # Householder reflector on column k below the diagonal
        x = R[k:, k]
        alpha = np.linalg.norm(x)
        if alpha > 0:
            if x[0] > 0:
                alpha = -alpha
            v = x.copy()
            v[0] -= alpha
            vnorm2 = v @ v
            if vnorm2 > 0:
                w = (R[k:, k:].T @ v) * (2.0 / vnorm2)
                R[k:, k:] -= np.outer(v, w)
            R[k, k] = alpha
            R[k + 1:, k] = 0.0
        rdiag[k] = R[k, k]
        if k + 1 < n:
            # norm downdate with recomputation when cancellation bites
            norms2[k + 1:] -= R[k, k + 1:] ** 2
            small = norms2[k + 1:] < 1e-12 * orig2[k + 1:]
            if np.any(small):
                idx = k + 1 + np.nonzero(small)[0]
                norms2[idx] = np.sum(R[k + 1:, idx] ** 2, axis=0)
    return perm, rdiag


def pseudoinverse(A, rcond: float = DEFAULT_RCOND) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD; singular values below
    rcond * sigma_max are treated as zero."""
    A = validate_matrix(A)
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if s[0] == 0:
        raise DegenerateInputError("all-zero matrix has no pseudoinverse")
    cutoff = rcond * s[0]
    inv = np.where(s > cutoff, 1.0 / np.where(s > cutoff, s, 1.0), 0.0)
    return (Vt.T * inv) @ U.T
