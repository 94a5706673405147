"""Model operator factory and finite essential-numerical-range surrogates.

The essential numerical range of an operator is approximated at finite
scale by compressing a host matrix to the complement of a growing prefix of
the standard basis and intersecting the sampled ranges of the compressions.
The factory builds the standard hosts (truncated shifts, weighted shifts,
diagonal and block-diagonal models, or matrices loaded from files).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import BadSpec, SystemNotConverging
from .linalg import (
    DEFAULT_TOL,
    Frame,
    Tolerances,
    as_matrix,
    norm_upper_bound,
    orthonormal_complement,
    rotated_herm_part,
    top_eigpair,
)
from .numrange import RangeHull
from .serialize import load_json, matrix_from_json

HOST_KINDS = (
    "truncated_unilateral_shift",
    "truncated_bilateral_shift",
    "weighted_shift",
    "diagonal",
    "direct_sum",
    "matrix_file",
)


@dataclass(frozen=True)
class HostSpec:
    """Declarative description of a host operator."""

    kind: str
    dim: int
    scale: float = 1.0
    weights: tuple = ()
    values: tuple = ()
    children: tuple = ()
    path: str | None = None

    @staticmethod
    def from_dict(obj) -> "HostSpec":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise BadSpec("host spec must be an object with a 'kind' field")
        kind = obj["kind"]
        children = tuple(HostSpec.from_dict(c) for c in obj.get("children", []))
        dim = obj.get("dim")
        if dim is None and kind == "direct_sum":
            dim = sum(c.dim for c in children)
        if dim is None:
            raise BadSpec(f"host spec of kind '{kind}' needs a 'dim' field")

        def as_complex_tuple(xs):
            out = []
            for x in xs:
                if isinstance(x, (list, tuple)):
                    out.append(complex(x[0], x[1]))
                else:
                    out.append(complex(x))
            return tuple(out)

        return HostSpec(
            kind=kind,
            dim=int(dim),
            scale=float(obj.get("scale", 1.0)),
            weights=as_complex_tuple(obj.get("weights", [])),
            values=as_complex_tuple(obj.get("values", [])),
            children=children,
            path=obj.get("path"),
        )


def build_host(spec: HostSpec) -> np.ndarray:
    """Construct the host matrix described by a spec.

    The truncated unilateral shift carries ones on the first superdiagonal;
    the bilateral model closes the shift cyclically.
    """
    if spec.kind not in HOST_KINDS:
        raise BadSpec(f"unknown host kind '{spec.kind}'")
    if spec.dim <= 0:
        raise BadSpec("host dim must be positive")
    if spec.scale <= 0:
        raise BadSpec("host scale must be strictly positive")
    n = spec.dim
    if spec.kind == "truncated_unilateral_shift":
        a = np.diag(np.ones(n - 1, dtype=complex), 1)
    elif spec.kind == "truncated_bilateral_shift":
        a = np.diag(np.ones(n - 1, dtype=complex), 1)
        if n > 1:
            a[n - 1, 0] = 1.0
    elif spec.kind == "weighted_shift":
        if len(spec.weights) != n - 1:
            raise BadSpec(f"weighted shift of dim {n} needs {n - 1} weights")
        a = np.diag(np.asarray(spec.weights, dtype=complex), 1)
    elif spec.kind == "diagonal":
        if len(spec.values) != n:
            raise BadSpec(f"diagonal host of dim {n} needs {n} values")
        a = np.diag(np.asarray(spec.values, dtype=complex))
    elif spec.kind == "direct_sum":
        if not spec.children:
            raise BadSpec("direct_sum host needs children")
        blocks = [build_host(c) for c in spec.children]
        a = sla.block_diag(*blocks).astype(complex)
        if a.shape[0] != n:
            raise BadSpec(f"direct_sum children dims sum to {a.shape[0]}, spec says {n}")
    else:  # matrix_file
        if not spec.path:
            raise BadSpec("matrix_file host needs a path")
        if not os.path.exists(spec.path):
            raise FileNotFoundError(spec.path)
        a = as_matrix(matrix_from_json(load_json(spec.path)), square=True)
        if a.shape[0] != n:
            raise BadSpec(f"file matrix dim {a.shape[0]} does not match spec dim {n}")
    return spec.scale * a


@dataclass(frozen=True)
class EssRangeEstimate:
    """Per-removal hulls of prefix-complement compressions and their envelope.

    ``intersection_support[k]`` is the minimum over removals of the sampled
    support value at angle ``thetas[k]``.
    """

    removals: list[int]
    hulls: list[RangeHull]
    thetas: np.ndarray
    intersection_support: np.ndarray

    def min_intersection_support(self) -> float:
        return float(np.min(self.intersection_support))


def _chain_supports(m_full: np.ndarray, max_removal: int, scale: float):
    """Top eigenpairs of all trailing principal submatrices of a Hermitian matrix.

    Removal k keeps coordinates k..n-1.  Reversing coordinates turns every
    trailing block into a leading block, so a single Cholesky factor of
    sigma*I - M (sigma safely above the top eigenvalue, which bounds all
    compressions by interlacing) yields shift-inverted iterations for every
    level at triangular-solve cost.  Residuals are certified at every level;
    any level that stalls falls back to LAPACK.
    """
    n = m_full.shape[0]
    w0, v0 = top_eigpair(m_full)
    supports = [w0]
    vectors = [v0]
    if max_removal == 0:
        return supports, vectors
    res_tol = 1e-11 * scale
    chain = None
    if n >= 64:
        sigma = w0 + max(1e-9, 1e-12 * scale)
        m_rev = np.ascontiguousarray(m_full[::-1, ::-1])
        shifted = sigma * np.eye(n) - m_rev
        try:
            low = sla.cholesky(shifted, lower=True, check_finite=False)
            chain = (sigma, m_rev, low)
        except np.linalg.LinAlgError:
            chain = None
    v_rev = v0[::-1].copy()
    for k in range(1, max_removal + 1):
        m = n - k
        found = False
        if chain is not None:
            _, m_rev, low = chain
            x = v_rev[:m].copy()
            nx = np.linalg.norm(x)
            if nx > 1e-8:
                x /= nx
                best_res = np.inf
                for _ in range(60):
                    b = np.zeros(n, dtype=complex)
                    b[:m] = x
                    y = sla.solve_triangular(low, b, lower=True, check_finite=False)
                    y[m:] = 0.0
                    y = sla.solve_triangular(
                        low, y, lower=True, trans="C", check_finite=False
                    )
                    y = y[:m]
                    y /= np.linalg.norm(y)
                    hy = m_rev[:m, :m] @ y
                    lam = float(np.vdot(y, hy).real)
                    res = float(np.linalg.norm(hy - lam * y))
                    x = y
                    if res < res_tol:
                        supports.append(lam)
                        v_rev = x
                        vectors.append(x[::-1].copy())
                        found = True
                        break
                    if res > 0.9 * best_res:
                        break
                    best_res = min(best_res, res)
        if not found:
            w, v = top_eigpair(m_full[k:, k:])
            supports.append(w)
            vectors.append(v)
            v_rev = v[::-1].copy()
    return supports, vectors


def essential_range_estimate(
    spec: HostSpec,
    max_removal: int,
    n_angles: int,
    tol: Tolerances = DEFAULT_TOL,
) -> EssRangeEstimate:
    """Hulls of the host compressed to complements of standard-basis prefixes.

    For n = 0..max_removal the host is compressed to the span of the last
    dim - n standard basis vectors and its range boundary is sampled; the
    intersection support is the pointwise minimum over removals.
    """
    a = build_host(spec)
    n = a.shape[0]
    if max_removal < 0 or max_removal >= n / 2:
        raise BadSpec("max_removal must satisfy 0 <= max_removal < dim/2")
    if n_angles < 8:
        raise ValueError("n_angles must be at least 8")
    thetas = 2.0 * np.pi * np.arange(n_angles) / n_angles
    scale = 1.0 + norm_upper_bound(a)
    removals = list(range(max_removal + 1))
    per_removal_supports = [np.empty(n_angles) for _ in removals]
    per_removal_points = [np.empty(n_angles, dtype=complex) for _ in removals]
    per_removal_vectors = [
        np.empty((n - r, n_angles), dtype=complex) for r in removals
    ]
    for k, theta in enumerate(thetas):
        m_full = rotated_herm_part(a, float(theta))
        supports, vectors = _chain_supports(m_full, max_removal, scale)
        for r in removals:
            v = vectors[r]
            block = a[r:, r:]
            per_removal_supports[r][k] = supports[r]
            per_removal_vectors[r][:, k] = v
            per_removal_points[r][k] = np.vdot(v, block @ v)
    hulls = [
        RangeHull(
            thetas=thetas,
            supports=per_removal_supports[r],
            points=per_removal_points[r],
            vectors=per_removal_vectors[r],
        )
        for r in removals
    ]
    intersection = np.min(np.vstack([h.supports for h in hulls]), axis=0)
    return EssRangeEstimate(
        removals=removals,
        hulls=hulls,
        thetas=thetas,
        intersection_support=intersection,
    )


def limit_diagonal_basis(
    a,
    system: Frame,
    value: complex,
    tol: Tolerances = DEFAULT_TOL,
) -> Frame:
    """Complete an orthonormal system with converging diagonal values to a
    full basis whose blocks are Parker-equalized.

    Block j joins one complement vector with the system vectors indexed
    2^(j-1) <= k < 2^j (1-based) and is rotated so that every diagonal value
    inside the block equals the block trace mean; trailing blocks therefore
    inherit diagonal values approaching the limit.  A full-rank system is
    returned unchanged.
    """
    from .pinching import parker_equalize

    m = as_matrix(a, square=True)
    n = m.shape[0]
    if system.ambient_dim != n:
        raise BadSpec("system ambient dim does not match the operator")
    rank = system.rank
    if rank == n:
        return system
    if rank == 0:
        raise BadSpec("system must contain at least one vector")
    xs = system.columns
    diag_vals = np.einsum("ij,ij->j", xs.conj(), m @ xs)
    quarter = max(1, math.ceil(rank / 4))
    drift = np.max(np.abs(diag_vals[-quarter:] - complex(value)))
    if drift > 0.1:
        raise SystemNotConverging(
            f"trailing diagonal values stray {drift:.3f} from the limit"
        )
    ys = orthonormal_complement(system).columns
    blocks: list[np.ndarray] = []
    x_pos = 0
    y_pos = 0
    j = 1
    while x_pos < rank:
        width = 2 ** (j - 1)
        cols = []
        if y_pos < ys.shape[1]:
            cols.append(ys[:, y_pos : y_pos + 1])
            y_pos += 1
        cols.append(xs[:, x_pos : x_pos + width])
        x_pos += min(width, rank - x_pos)
        blocks.append(np.column_stack(cols))
        j += 1
    if y_pos < ys.shape[1]:
        blocks.append(ys[:, y_pos:])
    out_cols = []
    for q in blocks:
        c = q.conj().T @ m @ q
        _, u = parker_equalize(c, tol)
        out_cols.append(q @ u.conj().T)
    return Frame(np.column_stack(out_cols)).validate(tol)
