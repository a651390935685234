"""Truncated Fock-space operators and superoperator construction.

Operators are plain complex ``numpy`` matrices on a truncated Fock space (or a
tensor product of such spaces).  Superoperators act on column-stacked density
matrices: ``vec(rho)`` stacks the columns of ``rho``, so that
``vec(A @ rho @ B) == kron(B.T, A) @ vec(rho)``.  That convention is fixed
here and used everywhere else in the package.

All Hilbert-space dimensions in scope are small (<= 16), so everything is
dense.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    InvalidDimensionError,
    InvalidHamiltonianError,
    InvalidOperatorError,
    NumericalFailureError,
    ShapeError,
)

# Physicality tolerances shared by every solver in the package.  Steady-state
# solves at large two-phonon damping are stiff; PSD violations below TOL_PSD
# are truncation noise, not solver failure.
TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = 1e-8


def annihilation(dim: int) -> np.ndarray:
    """Bosonic annihilation operator on a ``dim``-level truncated Fock space.

    Matrix elements ``<n-1|a|n> = sqrt(n)``; the creation operator is the
    conjugate transpose.

    Parameters
    ----------
    dim : int
        Number of Fock levels kept, at least 2.
    """
    if not isinstance(dim, (int, np.integer)) or dim < 2:
        raise InvalidDimensionError(f"need an integer dimension >= 2, got {dim!r}")
    a = np.zeros((dim, dim), dtype=complex)
    for n in range(1, dim):
        a[n - 1, n] = np.sqrt(n)
    return a


def number_op(dim: int) -> np.ndarray:
    """Number operator ``a^dag a = diag(0, 1, ..., dim-1)``."""
    a = annihilation(dim)
    return a.conj().T @ a


def sigma_minus() -> np.ndarray:
    """Spin lowering operator ``|0><1|`` on a two-level space."""
    return annihilation(2)


def tensor(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kronecker product with ``A`` acting on the first tensor factor."""
    return np.kron(np.asarray(A), np.asarray(B))


def _require_square(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidOperatorError(f"operator must be square, got shape {M.shape}")
    return M


def dissipator(L: np.ndarray) -> np.ndarray:
    """Superoperator for ``rho -> 2 L rho L^dag - L^dag L rho - rho L^dag L``.

    No rate prefactor is applied; callers scale by their rates.
    """
    L = _require_square(L)
    d = L.shape[0]
    eye = np.eye(d, dtype=complex)
    LdL = L.conj().T @ L
    return 2.0 * np.kron(L.conj(), L) - np.kron(eye, LdL) - np.kron(LdL.T, eye)


def hamiltonian_part(H: np.ndarray) -> np.ndarray:
    """Superoperator for the coherent part ``rho -> -i (H rho - rho H)``.

    ``H`` must be Hermitian to within ``TOL_HERM`` (relative to its largest
    entry).
    """
    H = _require_square(H)
    scale = max(1.0, np.abs(H).max())
    if np.abs(H - H.conj().T).max() > TOL_HERM * scale:
        raise InvalidHamiltonianError("Hamiltonian is not Hermitian within tolerance")
    d = H.shape[0]
    eye = np.eye(d, dtype=complex)
    return -1j * (np.kron(eye, H) - np.kron(H.T, eye))


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a ``d x d`` matrix into a length ``d**2`` vector."""
    rho = _require_square(rho)
    return rho.flatten(order="F")


def devectorize(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vectorize`; the length must be a perfect square."""
    v = np.asarray(v, dtype=complex).ravel()
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise ShapeError(f"vector length {v.size} is not a perfect square")
    return v.reshape((d, d), order="F")


def trace_vector(dim: int) -> np.ndarray:
    """Row vector ``vec(I)^T`` such that ``trace_vector @ vec(rho) = tr(rho)``."""
    return vectorize(np.eye(dim, dtype=complex))


def check_density_matrix(
    rho: np.ndarray,
    tol_herm: float = TOL_HERM,
    tol_trace: float = TOL_TRACE,
    tol_psd: float = TOL_PSD,
) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity of a density matrix.

    Returns the input (as a complex array) on success and raises
    :class:`NumericalFailureError` on any violation.
    """
    rho = _require_square(rho)
    if np.abs(rho - rho.conj().T).max() > tol_herm:
        raise NumericalFailureError("density matrix is not Hermitian within tolerance")
    if abs(np.trace(rho) - 1.0) > tol_trace:
        raise NumericalFailureError(f"trace {np.trace(rho)} deviates from 1")
    lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if lo < -tol_psd:
        raise NumericalFailureError(f"smallest eigenvalue {lo} below -{tol_psd}")
    return rho
