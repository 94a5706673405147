"""Unitary and normal dilations of strict contractions.

A contraction Y dilates into a unitary on the doubled space with corner
blocks Y and Y* and defect blocks (I - YY*)^(1/2), (I - Y*Y)^(1/2); scaling
that unitary by the norm of the original operator gives a normal dilation
whose top-left corner recovers the operator exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MarginLost, NotStrictContraction
from .linalg import DEFAULT_TOL, Frame, Tolerances, as_matrix


@dataclass(frozen=True)
class DilationResult:
    """Unitary dilation U, its normal rescaling N, and the original dimension."""

    unitary: np.ndarray
    normal: np.ndarray
    original_dim: int

    def validate(self, tol: Tolerances = DEFAULT_TOL) -> "DilationResult":
        u, n = self.unitary, self.normal
        d2 = u.shape[0]
        if np.linalg.norm(u.conj().T @ u - np.eye(d2), 2) > 1e-10:
            raise ValueError("dilation is not unitary")
        if np.linalg.norm(n.conj().T @ n - n @ n.conj().T, 2) > 1e-10:
            raise ValueError("scaled dilation is not normal")
        return self


def halmos_dilation(x, rho: float = 0.9, tol: Tolerances = DEFAULT_TOL) -> DilationResult:
    """Dilate a strict contraction (||X|| < rho < 1) into a unitary.

    The defect blocks are assembled from one shared SVD of Y = X / ||X||, so
    the intertwining identities between the blocks hold to rounding and the
    result is unitary to machine precision.  X = 0 dilates into the identity
    by convention.
    """
    m = as_matrix(x, square=True)
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie strictly between 0 and 1")
    d = m.shape[0]
    norm_x = float(np.linalg.norm(m, 2)) if d else 0.0
    if norm_x >= rho:
        raise NotStrictContraction(f"||X|| = {norm_x:.6f} is not below rho = {rho}")
    if norm_x == 0.0:
        u = np.eye(2 * d, dtype=complex)
        return DilationResult(unitary=u, normal=np.zeros_like(u), original_dim=d)
    y = m / norm_x
    p, sigma, qh = np.linalg.svd(y)
    defect = np.sqrt(np.clip(1.0 - sigma**2, 0.0, None))
    q = qh.conj().T
    d_y = (q * defect) @ qh                 # (I - Y*Y)^(1/2)
    d_ystar = (p * defect) @ p.conj().T     # (I - YY*)^(1/2)
    u = np.block([[y, -d_ystar], [d_y, y.conj().T]])
    return DilationResult(unitary=u, normal=norm_x * u, original_dim=d)


def isometry_realize(
    a,
    x,
    rho: float = 0.9,
    *,
    n_angles: int = 64,
    tol: Tolerances = DEFAULT_TOL,
) -> Frame:
    """Isometry V with V* A V = X, for hosts whose range certifiably
    contains the disc of radius rho.

    Dilates X into a normal operator, realizes the dilation's eigenvalues as
    a diagonal compression of the host, and rotates back; the first block of
    columns then compresses the host exactly onto X.
    """
    from .numrange import contains_disc
    from .pinching import realize_contraction_compression

    host = as_matrix(a, square=True)
    m = as_matrix(x, square=True)
    norm_x = float(np.linalg.norm(m, 2)) if m.size else 0.0
    if norm_x >= rho:
        raise NotStrictContraction(f"||X|| = {norm_x:.6f} is not below rho = {rho}")
    cert = contains_disc(host, rho, n_angles=n_angles, refine=False, tol=tol)
    if not cert.holds:
        raise MarginLost(
            f"host disc certificate failed at radius {rho} (margin {cert.margin:.3e})"
        )
    return realize_contraction_compression(host, m, rho, tol=tol)
