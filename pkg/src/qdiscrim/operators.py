"""Complex Hermitian linear algebra for small dense matrices.

Everything downstream (Bloch geometry, solvers, certificates, generators)
is built on the types and operations here: validated Hermitian and density
operators, a cyclic Jacobi eigensolver, trace norm, positivity tests,
purification and partial trace.

Matrices are stored as immutable ``numpy`` arrays of ``complex128``.
Dimensions in scope are small (<= 64), so the Jacobi solver's robustness
matters more than asymptotic speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError

HERMITICITY_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
NORM_TOL = 1e-10
MAX_DIM = 64

_JACOBI_OFFDIAG_TOL = 1e-14
_JACOBI_MAX_SWEEPS = 100


def _as_matrix(operator) -> np.ndarray:
    """Raw complex matrix of an operator, accepting wrappers or arrays."""
    if isinstance(operator, (HermitianOperator, DensityOperator)):
        return operator.matrix
    return np.asarray(operator, dtype=complex)


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=complex)
    out.setflags(write=False)
    return out


def _frozen_real(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A dim x dim complex matrix equal to its conjugate transpose.

    The constructor symmetrizes (H + H†)/2 when the asymmetry is below
    1e-12 in max norm and rejects anything worse, so silent drift away
    from Hermiticity cannot accumulate.
    """

    matrix: np.ndarray

    def __init__(self, matrix) -> None:
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if not (1 <= m.shape[0] <= MAX_DIM):
            raise ValueError(f"dimension {m.shape[0]} outside supported range 1..{MAX_DIM}")
        if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
            raise ValueError("matrix entries must be finite")
        asym = np.max(np.abs(m - m.conj().T))
        if asym > HERMITICITY_TOL:
            raise ValueError(f"matrix is not Hermitian: asymmetry {asym:.3e} > {HERMITICITY_TOL}")
        object.__setattr__(self, "matrix", _frozen((m + m.conj().T) / 2.0))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A quantum state: Hermitian, positive semidefinite, unit trace."""

    op: HermitianOperator

    def __init__(self, op) -> None:
        if not isinstance(op, HermitianOperator):
            op = HermitianOperator(op)
        tr = op.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density operator must have trace 1, got {tr!r}")
        smallest = float(_eigvalsh(op.matrix)[-1])
        if smallest < -PSD_TOL:
            raise ValueError(f"density operator has negative eigenvalue {smallest:.3e}")
        object.__setattr__(self, "op", op)

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix

    @property
    def dim(self) -> int:
        return self.op.dim


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues (descending) and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True, eq=False)
class PureBipartiteState:
    """A unit vector on a dimA x dimB product space, A-major ordering."""

    dim_a: int
    dim_b: int
    amplitudes: np.ndarray

    def __init__(self, dim_a: int, dim_b: int, amplitudes) -> None:
        if dim_a < 1 or dim_b < 1:
            raise ValueError("subsystem dimensions must be positive")
        amp = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amp.size != dim_a * dim_b:
            raise ValueError(f"expected {dim_a * dim_b} amplitudes, got {amp.size}")
        if not np.all(np.isfinite(amp.real)) or not np.all(np.isfinite(amp.imag)):
            raise ValueError("amplitudes must be finite")
        norm = float(np.linalg.norm(amp))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"amplitudes must have unit norm, got {norm!r}")
        object.__setattr__(self, "dim_a", int(dim_a))
        object.__setattr__(self, "dim_b", int(dim_b))
        object.__setattr__(self, "amplitudes", _frozen(amp))


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Zero a[p, q] with a unitary plane rotation, updating a and v in place."""
    beta = a[p, q]
    mag = abs(beta)
    if mag == 0.0:
        return
    phase = beta / mag
    theta = 0.5 * math.atan2(2.0 * mag, (a[p, p] - a[q, q]).real)
    c = math.cos(theta)
    s = math.sin(theta)

    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p + s * np.conj(phase) * col_q
    a[:, q] = -s * phase * col_p + c * col_q

    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p + s * phase * row_q
    a[q, :] = -s * np.conj(phase) * row_p + c * row_q
    a[p, q] = 0.0
    a[q, p] = 0.0

    col_p = v[:, p].copy()
    col_q = v[:, q].copy()
    v[:, p] = c * col_p + s * np.conj(phase) * col_q
    v[:, q] = -s * phase * col_p + c * col_q


def _offdiag_norm(a: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2)))


def _fix_phases(v: np.ndarray) -> np.ndarray:
    """Make the first non-negligible component of each column real positive."""
    out = v.copy()
    d = out.shape[0]
    for j in range(d):
        col = out[:, j]
        idx = int(np.argmax(np.abs(col) > 1e-8))
        pivot = col[idx]
        if abs(pivot) > 0:
            out[:, j] = col * (np.conj(pivot) / abs(pivot))
    return out


def _eigh(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Returns eigenvalues sorted descending and the matching eigenvector
    columns, with a deterministic phase convention. Raises
    ConvergenceError after 100 sweeps, which signals pathological input
    for the matrix sizes in scope.
    """
    a = np.array(matrix, dtype=complex)
    d = a.shape[0]
    v = np.eye(d, dtype=complex)
    if d > 1:
        tol = _JACOBI_OFFDIAG_TOL * max(1.0, float(np.linalg.norm(a)))
        for _ in range(_JACOBI_MAX_SWEEPS):
            if _offdiag_norm(a) <= tol:
                break
            for p in range(d - 1):
                for q in range(p + 1, d):
                    if abs(a[p, q]) > tol / (d * d):
                        _jacobi_rotate(a, v, p, q)
        else:
            raise ConvergenceError(
                f"Jacobi sweeps did not converge after {_JACOBI_MAX_SWEEPS} iterations"
            )
    values = np.diag(a).real.copy()
    order = np.argsort(-values, kind="stable")
    return values[order], _fix_phases(v[:, order])


def _eigvalsh(matrix: np.ndarray) -> np.ndarray:
    return _eigh(matrix)[0]


def hermitian_eigen(operator) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian operator.

    Deterministic for a fixed input: eigenvalues come out descending and
    each eigenvector's first non-negligible component is real positive.
    """
    values, vectors = _eigh(_as_matrix(operator))
    return SpectralDecomposition(_frozen_real(values), _frozen(vectors))


def trace_norm(operator) -> float:
    """Sum of absolute eigenvalues; equals trace(H) for PSD H."""
    return float(np.sum(np.abs(_eigvalsh(_as_matrix(operator)))))


def is_psd(operator, tol: float = PSD_TOL) -> bool:
    """True when the smallest eigenvalue is at least -tol."""
    if tol < 0:
        raise ValueError("tolerance must be non-negative")
    return float(_eigvalsh(_as_matrix(operator))[-1]) >= -tol


def negative_part(operator) -> np.ndarray:
    """PSD matrix built from the negative eigenspace: sum of -lambda v v†."""
    values, vectors = _eigh(_as_matrix(operator))
    neg = np.minimum(values, 0.0)
    return (vectors * (-neg)) @ vectors.conj().T


def nonnegative_eigenprojector(operator) -> np.ndarray:
    """Orthogonal projector onto the span of eigenvectors with lambda >= 0."""
    values, vectors = _eigh(_as_matrix(operator))
    keep = vectors[:, values >= 0.0]
    return keep @ keep.conj().T


def purify(rho: DensityOperator) -> PureBipartiteState:
    """Pure state on A tensor B whose partial trace over A recovers rho.

    Built in the eigenbasis with amplitudes sqrt(lambda_i) and zero
    phases: psi = sum_i sqrt(lambda_i) |i>_A |v_i>_B.
    """
    values, vectors = _eigh(rho.matrix)
    d = rho.dim
    weights = np.sqrt(np.maximum(values, 0.0))
    amp = np.zeros((d, d), dtype=complex)
    for i in range(d):
        amp[i, :] = weights[i] * vectors[:, i]
    amp = amp.reshape(-1)
    amp = amp / np.linalg.norm(amp)
    return PureBipartiteState(d, d, amp)


def partial_trace(state: PureBipartiteState, subsystem: str) -> HermitianOperator:
    """Reduced operator of a pure bipartite state, tracing out A or B."""
    psi = state.amplitudes.reshape(state.dim_a, state.dim_b)
    if subsystem == "A":
        reduced = psi.T @ psi.conj()
    elif subsystem == "B":
        reduced = psi @ psi.conj().T
    else:
        raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    return HermitianOperator(reduced)
