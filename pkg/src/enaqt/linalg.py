"""Dense complex linear-algebra primitives shared by all other modules.

Units convention: energies in cm^-1, times in fs. The phase accumulated by a
level of energy E over time t is 2*pi*c * E[cm^-1] * t[fs] with
c = 2.99792458e-5 cm/fs, i.e. an effective hbar of ~5308.84 cm^-1 fs.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DimensionMismatchError,
    NotHermitianError,
    NotPositiveError,
    TraceOutOfToleranceError,
)

SPEED_OF_LIGHT_CM_FS = 2.99792458e-5
"""Speed of light in cm/fs."""

HBAR_CM1_FS = 1.0 / (2.0 * np.pi * SPEED_OF_LIGHT_CM_FS)
"""Effective hbar in cm^-1 fs (~5308.84): phase = E*dt/HBAR_CM1_FS."""

KB_CM1_PER_K = 0.6950348004
"""Boltzmann constant in cm^-1 per kelvin (k_B / (h c))."""


def herm_defect(m: np.ndarray) -> float:
    """Max-norm distance of `m` from its own adjoint."""
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def eigh(m: np.ndarray, herm_tol: float = 1e-10):
    """Eigendecomposition of a hermitian matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues ascending and
    eigenvectors as orthonormal columns. Raises NotHermitianError if the
    input deviates from hermiticity by more than `herm_tol` (max norm).
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    defect = herm_defect(m)
    if defect > herm_tol:
        raise NotHermitianError(
            f"matrix is not hermitian: max |m - m^dag| = {defect:.3e} > {herm_tol:.1e}"
        )
    w, v = np.linalg.eigh(m)
    return w, v


def evolution_unitary(h: np.ndarray, dt: float, hbar: float = HBAR_CM1_FS) -> np.ndarray:
    """exp(-i*h*dt/hbar) for hermitian h, via eigendecomposition.

    Diagonalizing instead of scaling-and-squaring guarantees the result is
    unitary up to eigensolver error, which the step maps rely on.
    """
    w, v = eigh(h)
    phases = np.exp(-1j * w * (dt / hbar))
    return (v * phases) @ v.conj().T


def partial_trace(rho: np.ndarray, dims: tuple[int, int], keep: str) -> np.ndarray:
    """Partial trace of an operator on A (x) B.

    `dims` is (dim_A, dim_B); `keep` is "A" or "B". The kept factor's trace
    equals the input trace.
    """
    rho = np.asarray(rho, dtype=complex)
    da, db = int(dims[0]), int(dims[1])
    if rho.ndim != 2 or rho.shape != (da * db, da * db):
        raise DimensionMismatchError(
            f"operator shape {rho.shape} does not match dims {da}x{db}"
        )
    r = rho.reshape(da, db, da, db)
    if keep == "A":
        return np.einsum("ajbj->ab", r)
    if keep == "B":
        return np.einsum("iaib->ab", r)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def frob_dist(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius distance sqrt(sum |a_ij - b_ij|^2)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def validate_density(
    m: np.ndarray,
    trace_tol: float = 1e-9,
    psd_tol: float = 1e-8,
    herm_tol: float = 1e-12,
) -> np.ndarray:
    """Check that `m` is a valid density matrix and return it as complex ndarray.

    Raises NotHermitianError / TraceOutOfToleranceError / NotPositiveError
    with the measured violation in the message.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"density matrix must be square, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NotHermitianError("density matrix contains non-finite entries")
    defect = herm_defect(m)
    if defect > herm_tol:
        raise NotHermitianError(
            f"density matrix not hermitian: max |rho - rho^dag| = {defect:.3e} > {herm_tol:.1e}"
        )
    tr = np.trace(m).real
    if abs(tr - 1.0) > trace_tol:
        raise TraceOutOfToleranceError(
            f"trace = {tr!r} deviates from 1 by {abs(tr - 1.0):.3e} > {trace_tol:.1e}"
        )
    min_eig = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())
    if min_eig < -psd_tol:
        raise NotPositiveError(
            f"minimum eigenvalue {min_eig:.3e} below -{psd_tol:.1e}"
        )
    return m
