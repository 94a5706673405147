"""Dense complex linear algebra substrate.

Everything downstream works with square complex matrices (numpy arrays of
dtype complex128) and frames, i.e. matrices with orthonormal columns that
identify a subspace together with the isometry onto it.  Compressions are
frame conjugations ``Q* A Q``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, NoConvergence, NotHermitian, NotPSD


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerances used throughout the library."""

    eig_residual: float = 1e-10
    frame_orth: float = 1e-10
    realization: float = 1e-8
    equality: float = 1e-12

    def __post_init__(self):
        for name in ("eig_residual", "frame_orth", "realization", "equality"):
            if getattr(self, name) <= 0:
                raise ValueError(f"tolerance {name} must be strictly positive")


DEFAULT_TOL = Tolerances()


def as_matrix(a, *, square: bool = False) -> np.ndarray:
    """Coerce to a validated complex128 matrix (finite entries only)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d array, got shape {m.shape}")
    if m.size and not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ValueError("matrix has non-finite entries")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def herm_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def rotated_herm_part(a: np.ndarray, theta: float) -> np.ndarray:
    """Hermitian part of ``exp(-i theta) A``, the support-direction operator."""
    w = np.exp(-1j * theta)
    return 0.5 * (w * a + np.conj(w) * a.conj().T)


def norm_upper_bound(a: np.ndarray) -> float:
    """Cheap upper bound for the spectral norm (used for margins and shifts)."""
    if a.size == 0:
        return 0.0
    one = np.abs(a).sum(axis=0).max()
    inf = np.abs(a).sum(axis=1).max()
    fro = np.linalg.norm(a)
    return float(min(np.sqrt(one * inf), fro))


def operator_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


@dataclass(frozen=True)
class Frame:
    """Orthonormal column system spanning a subspace of C^ambient_dim."""

    columns: np.ndarray

    def __post_init__(self):
        q = as_matrix(self.columns)
        object.__setattr__(self, "columns", q)
        n, r = q.shape
        if r > n:
            raise DimensionMismatch(f"frame rank {r} exceeds ambient dim {n}")

    @property
    def ambient_dim(self) -> int:
        return self.columns.shape[0]

    @property
    def rank(self) -> int:
        return self.columns.shape[1]

    def orthonormality_defect(self) -> float:
        q = self.columns
        if q.shape[1] == 0:
            return 0.0
        g = q.conj().T @ q
        return float(np.linalg.norm(g - np.eye(q.shape[1]), 2))

    def validate(self, tol: Tolerances = DEFAULT_TOL) -> "Frame":
        defect = self.orthonormality_defect()
        if defect > tol.frame_orth:
            raise ValueError(f"frame columns not orthonormal: defect {defect:.3e}")
        return self

    @staticmethod
    def identity(n: int) -> "Frame":
        return Frame(np.eye(n, dtype=np.complex128))

    @staticmethod
    def from_columns(cols, tol: Tolerances = DEFAULT_TOL) -> "Frame":
        return Frame(as_matrix(cols)).validate(tol)


def hermitian_eig(h, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, Frame]:
    """Full eigendecomposition of a Hermitian matrix.

    Returns eigenvalues in ascending order and the full-rank frame of
    eigenvectors.  Raises NotHermitian when the input fails the symmetry
    precondition and NoConvergence if the LAPACK solver gives up.
    """
    m = as_matrix(h, square=True)
    scale = 1.0 + norm_upper_bound(m)
    if np.linalg.norm(m - m.conj().T, 2) > tol.equality * scale:
        raise NotHermitian("matrix is not Hermitian within the equality tolerance")
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(f"eigensolver failed: {exc}") from exc
    return w, Frame(v)


def psd_sqrt(p, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Hermitian PSD square root, clamping small negative eigenvalues to 0."""
    m = as_matrix(p, square=True)
    scale = 1.0 + norm_upper_bound(m)
    w, v = hermitian_eig(m, tol)
    if m.shape[0] and w[0] < -100.0 * tol.eig_residual * scale:
        raise NotPSD(f"minimum eigenvalue {w[0]:.3e} is too negative")
    w = np.clip(w, 0.0, None)
    q = v.columns
    return (q * np.sqrt(w)) @ q.conj().T


def orthonormal_complement(f: Frame) -> Frame:
    """Orthonormal basis of the orthogonal complement of a frame's span."""
    n, r = f.columns.shape
    if r == 0:
        return Frame.identity(n)
    if r == n:
        return Frame(np.zeros((n, 0), dtype=np.complex128))
    # Householder QR of the frame: trailing columns of Q span the complement.
    q, _ = np.linalg.qr(f.columns, mode="complete")
    comp = q[:, r:]
    # Re-project for hygiene; the QR complement is orthogonal to the frame
    # itself only up to rounding when the input frame is slightly off.
    comp = comp - f.columns @ (f.columns.conj().T @ comp)
    comp, _ = np.linalg.qr(comp)
    return Frame(comp)


def compress(a, e: Frame) -> np.ndarray:
    """Compression E* A E of an operator to the subspace carried by a frame."""
    m = as_matrix(a, square=True)
    if m.shape[0] != e.ambient_dim:
        raise DimensionMismatch(
            f"operator dim {m.shape[0]} does not match frame ambient dim {e.ambient_dim}"
        )
    q = e.columns
    return q.conj().T @ m @ q


# Below this size LAPACK's full Hermitian solver beats the subset drivers,
# whose fixed setup cost dominates small problems on common BLAS builds.
_SUBSET_CROSSOVER = 450


def top_eigpair(h: np.ndarray) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and a matching unit eigenvector of a Hermitian matrix."""
    n = h.shape[0]
    if n <= _SUBSET_CROSSOVER:
        w, v = np.linalg.eigh(h)
        return float(w[-1]), v[:, -1]
    w, v = sla.eigh(h, subset_by_index=(n - 1, n - 1), check_finite=False)
    return float(w[0]), v[:, 0]


def extreme_eigpairs(h: np.ndarray) -> tuple[float, np.ndarray, float, np.ndarray]:
    """Both spectral ends of a Hermitian matrix: (top value, top vector, bottom value, bottom vector)."""
    n = h.shape[0]
    if n <= 2 * _SUBSET_CROSSOVER:
        w, v = np.linalg.eigh(h)
        return float(w[-1]), v[:, -1], float(w[0]), v[:, 0]
    wt, vt = sla.eigh(h, subset_by_index=(n - 1, n - 1), check_finite=False)
    wb, vb = sla.eigh(h, subset_by_index=(0, 0), check_finite=False)
    return float(wt[0]), vt[:, 0], float(wb[0]), vb[:, 0]
