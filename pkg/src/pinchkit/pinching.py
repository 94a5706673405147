"""Walsh block equalization, Parker diagonals, and pinching synthesis.

The synthesis machinery realizes prescribed strict contractions as
compressions of a host operator whose numerical range certifiably contains
a disc.  Scalar targets come from direct value realization, general targets
from a normal dilation plus greedy diagonal realization, and the faithful
route additionally splits each target through a Walsh conjugation so that
the extracted subspace provably overlaps a designated test vector
(the mass bound).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    BadBlockCount,
    DimensionMismatch,
    HostTooSmall,
    MarginLost,
    NoConvergence,
    NotNormal,
    NotStrictContraction,
    SizeMismatch,
    TooLarge,
    ValueOutsideRange,
)
from .dilation import halmos_dilation
from .linalg import (
    DEFAULT_TOL,
    Frame,
    Tolerances,
    as_matrix,
    norm_upper_bound,
    orthonormal_complement,
)
from .numrange import (
    _two_by_two_solve,
    adaptive_hull,
    contains_disc,
    realize_value,
)

# Seed of the deterministic test-vector sequence used by faithful-mode mass
# bookkeeping; fixed so certificates are reproducible run to run.
DEFAULT_MASS_SEED = 7


# ---------------------------------------------------------------------------
# Walsh matrices and block equalization


@dataclass(frozen=True)
class WalshPlan:
    """Constants of the block-splitting decomposition at one Walsh level.

    With the default construction m = 2^level - 2 and n = 1, so that
    2^level = m + 2n, alpha = 2^level / (2^level - 2), beta = 2^level, and
    epsilon = 2^(-level/2) is the guaranteed mass of the selected block.
    """

    level: int
    m: int
    n: int
    alpha: float
    beta: float
    epsilon: float

    @staticmethod
    def default_construction(level: int) -> "WalshPlan":
        if level < 2:
            raise ValueError("walsh level must be at least 2")
        two_l = 2**level
        return WalshPlan(
            level=level,
            m=two_l - 2,
            n=1,
            alpha=two_l / (two_l - 2),
            beta=float(two_l),
            epsilon=2.0 ** (-level / 2.0),
        )

    def validate(self) -> "WalshPlan":
        if 2**self.level != self.m + 2 * self.n:
            raise ValueError("walsh plan constants violate 2^level = m + 2n")
        if self.epsilon != 2.0 ** (-self.level / 2.0):
            raise ValueError("walsh plan epsilon must equal 2^(-level/2)")
        return self


def walsh_matrix(k: int) -> np.ndarray:
    """Recursively built real orthogonal matrix with entries +-2^(-k/2).

    V_1 = (1/sqrt 2) [[1, 1], [-1, 1]] and each level doubles by
    V_k = (1/sqrt 2) [[V, V], [-V, V]].  The sign pattern is built in exact
    integer arithmetic and scaled once at the end.
    """
    if k < 1:
        raise ValueError("walsh level must be a positive integer")
    if k > 16:
        raise TooLarge("walsh levels above 16 are not supported")
    signs = np.array([[1, 1], [-1, 1]], dtype=np.int64)
    for _ in range(k - 1):
        signs = np.block([[signs, signs], [-signs, signs]])
    return signs.astype(np.complex128) * (2.0 ** (-0.5 * k))


def equalize_blocks(blocks) -> tuple[np.ndarray, np.ndarray]:
    """Conjugate a block-diagonal matrix so every diagonal block becomes the
    block mean.

    The conjugator is W = V_k (tensor) I for 2^k equally sized blocks;
    returns (W diag(blocks) W*, W).
    """
    mats = [as_matrix(b, square=True) for b in blocks]
    count = len(mats)
    if count == 0 or count & (count - 1):
        raise BadBlockCount(f"block count {count} is not a power of two")
    d = mats[0].shape[0]
    if any(m.shape[0] != d for m in mats):
        raise SizeMismatch("blocks must share one square size")
    if count == 1:
        return mats[0].copy(), np.eye(d, dtype=complex)
    k = count.bit_length() - 1
    big = sla.block_diag(*mats).astype(complex)
    w = np.kron(walsh_matrix(k), np.eye(d, dtype=complex))
    return w @ big @ w.conj().T, w


# ---------------------------------------------------------------------------
# Parker equalization


def _two_by_two_range_contains(c: np.ndarray, z: complex, slack: float) -> bool:
    """Elliptical range membership for a 2x2 matrix.

    The range is the ellipse with foci at the eigenvalues and major axis
    sqrt(|c_offdiag|^2 + |l1 - l2|^2) where |c_offdiag|^2 is the residual
    Frobenius mass above the eigenvalues.
    """
    tr = c[0, 0] + c[1, 1]
    disc = np.sqrt(complex(tr * tr / 4.0 - (c[0, 0] * c[1, 1] - c[0, 1] * c[1, 0])))
    l1, l2 = tr / 2.0 + disc, tr / 2.0 - disc
    resid = max(
        0.0,
        float(np.sum(np.abs(c) ** 2)) - abs(l1) ** 2 - abs(l2) ** 2,
    )
    major = math.sqrt(resid + abs(l1 - l2) ** 2)
    return abs(z - l1) + abs(z - l2) <= major + slack


def parker_equalize(a, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Unitary conjugation making every diagonal entry equal trace / dim.

    Repeatedly picks the worst-deviation diagonal entry and a partner
    (starting from the least-deviating one), then applies a plane rotation
    in their two coordinates whose first new basis vector realizes the mean
    exactly; each exact correction settles one entry for good, so a clean
    sweep finishes in at most dim - 1 rotations.  When no pair's 2x2 range
    reaches the mean (possible for diagonal inputs), a partial move toward
    the mean reshapes the off-diagonal structure first.  Returns (B, U) with
    B = U A U*.
    """
    m = as_matrix(a, square=True)
    n = m.shape[0]
    b = m.copy()
    basis = np.eye(n, dtype=complex)  # columns are the new basis vectors
    if n == 0:
        return b, basis.conj().T
    mean = complex(np.trace(b) / n)
    scale = 1.0 + norm_upper_bound(b)
    settle = 1e-12 * scale
    max_rotations = max(16, n * n)

    def apply_plane(i: int, j: int, g: np.ndarray) -> None:
        # New basis vectors in the (i, j) plane: g and its unit complement.
        comp = np.array([-np.conj(g[1]), np.conj(g[0])], dtype=complex)
        p = np.column_stack([g, comp])
        b[:, [i, j]] = b[:, [i, j]] @ p
        b[[i, j], :] = p.conj().T @ b[[i, j], :]
        basis[:, [i, j]] = basis[:, [i, j]] @ p

    rotations = 0
    while True:
        dev = np.abs(np.diag(b) - mean)
        unsettled = np.flatnonzero(dev > settle)
        if len(unsettled) == 0:
            break
        if len(unsettled) == 1:
            # The trace pins the last entry; residue here is rounding debris.
            if dev[unsettled[0]] <= 1000.0 * settle:
                break
            unsettled = np.argsort(dev)[-2:]
        if rotations >= max_rotations:
            raise NoConvergence(
                f"diagonal equalization did not settle in {max_rotations} rotations"
            )
        order_desc = unsettled[np.argsort(-dev[unsettled], kind="stable")]
        order_asc = unsettled[np.argsort(dev[unsettled], kind="stable")]
        done = False
        for i in order_desc:
            for j in order_asc:
                if i == j:
                    continue
                c2 = np.array([[b[i, i], b[i, j]], [b[j, i], b[j, j]]])
                if not _two_by_two_range_contains(c2, mean, settle):
                    continue
                g, err = _two_by_two_solve(c2, mean, settle)
                if err > settle:
                    continue
                apply_plane(int(i), int(j), g)
                rotations += 1
                done = True
                break
            if done:
                break
        if not done:
            # Partial move: push the worst entry along the segment toward the
            # mean inside the best partner's 2x2 range.
            i = int(order_desc[0])
            j = int(order_asc[0]) if int(order_asc[0]) != i else int(order_asc[1])
            zi, zj = b[i, i], b[j, j]
            seg = zj - zi
            if abs(seg) < settle:
                raise NoConvergence("degenerate pair blocks diagonal equalization")
            s = ((mean - zi) * np.conj(seg)).real / abs(seg) ** 2
            s = min(1.0, max(0.0, s))
            target = zi + 0.5 * max(s, 0.5) * seg
            c2 = np.array([[b[i, i], b[i, j]], [b[j, i], b[j, j]]])
            g, err = _two_by_two_solve(c2, target, 1e-10 * scale)
            if err > 1e-8 * scale:
                raise NoConvergence("partial equalization move failed")
            apply_plane(i, j, g)
            rotations += 1
    return b, basis.conj().T


# ---------------------------------------------------------------------------
# level selection


def choose_walsh_level(norm_x: float, rho: float) -> WalshPlan:
    """Smallest level l >= 2 with (2^l / (2^l - 2)) * norm_x strictly below rho."""
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie strictly between 0 and 1")
    if norm_x < 0:
        raise ValueError("norm_x must be non-negative")
    if norm_x >= rho:
        raise NotStrictContraction(f"norm {norm_x} is not below rho = {rho}")
    level = 2
    while (2**level / (2**level - 2)) * norm_x >= rho:
        level += 1
        if level > 16:
            raise TooLarge("no walsh level of at most 16 reaches the margin")
    return WalshPlan.default_construction(level)


# ---------------------------------------------------------------------------
# sequential extraction engine


class _Extraction:
    """Deflation bookkeeping for sequential realizations inside one host.

    Every realized vector e consumes span{e, Be, B*e} of the current
    compression B, which is exactly what keeps all cross terms between
    realized vectors (and everything extracted later) identically zero.
    """

    def __init__(
        self,
        host: np.ndarray,
        rho: float,
        tol: Tolerances,
        *,
        work_start: int = 8,
        work_cap: int = 32,
        recheck_angles: int = 8,
    ):
        self.host = host
        self.n = host.shape[0]
        self.rho = rho
        self.tol = tol
        self.work_start = work_start
        self.work_cap = work_cap
        self.recheck_angles = recheck_angles
        self.frame: np.ndarray | None = None  # None: active space is everything
        self.b = host

    @property
    def active_dim(self) -> int:
        return self.b.shape[0]

    def to_host(self, x: np.ndarray) -> np.ndarray:
        return x if self.frame is None else self.frame @ x

    def project(self, h: np.ndarray) -> np.ndarray:
        return h if self.frame is None else self.frame.conj().T @ h

    def certify(self, target_index: int | None) -> None:
        cert = contains_disc(
            self.b, self.rho, n_angles=self.recheck_angles, refine=False, tol=self.tol
        )
        if not cert.holds:
            where = "at entry" if target_index is None else f"after target {target_index}"
            raise MarginLost(
                f"disc certificate of radius {self.rho} lost {where} "
                f"(margin {cert.margin:.3e})",
                target_index=target_index,
            )

    def realize(self, value: complex) -> np.ndarray:
        """Realize one value in the active compression and consume its triple."""
        margin = max(1e-6 * (1.0 + norm_upper_bound(self.b)), self.tol.realization)
        hull = adaptive_hull(
            self.b,
            value,
            margin=margin,
            start=self.work_start,
            cap=self.work_cap,
            tol=self.tol,
        )
        x = realize_value(self.b, value, hull=hull, margin=margin, tol=self.tol)
        e_host = self.to_host(x)
        self._consume(x)
        return e_host

    def _consume(self, x: np.ndarray) -> None:
        m = self.active_dim
        raw = [x, self.b @ x, self.b.conj().T @ x]
        cols: list[np.ndarray] = []
        for v in raw:
            w = v.astype(complex, copy=True)
            for c in cols:
                w -= c * np.vdot(c, w)
            nw = np.linalg.norm(w)
            if nw > 1e-10:
                cols.append(w / nw)
        span = np.column_stack(cols) if cols else np.zeros((m, 0), dtype=complex)
        comp = orthonormal_complement(Frame(span)).columns
        self.frame = comp if self.frame is None else self.frame @ comp
        self.b = comp.conj().T @ self.b @ comp


def _require_budget(active_dim: int, needed: int, reserve: int, what: str) -> None:
    if needed + reserve > active_dim:
        raise HostTooSmall(
            f"{what} needs about {needed} host dimensions plus a reserve of "
            f"{reserve}, but only {active_dim} are available"
        )


def realize_diagonal_compression(
    a,
    values,
    rho: float,
    *,
    tol: Tolerances = DEFAULT_TOL,
    reserve: int = 8,
    work_angles: int = 8,
    recheck_angles: int = 8,
) -> Frame:
    """Frame E with E* A E equal to diag(values) within the realization
    tolerance.

    Greedy construction: realize each value in the current compression, then
    pass to the orthogonal complement of the realized vector together with
    its image and coimage, which zeroes all off-diagonal entries exactly.
    The disc certificate is re-verified after every deflation.
    """
    host = as_matrix(a, square=True)
    vals = np.asarray(values, dtype=complex).ravel()
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie strictly between 0 and 1")
    if len(vals) and np.max(np.abs(vals)) >= rho:
        raise ValueOutsideRange("every diagonal value must have modulus below rho")
    if len(vals) == 0:
        return Frame(np.zeros((host.shape[0], 0), dtype=complex))
    _require_budget(host.shape[0], 3 * len(vals), reserve, "diagonal realization")
    state = _Extraction(
        host, rho, tol, work_start=work_angles, recheck_angles=recheck_angles
    )
    state.certify(None)
    cols = []
    for k, value in enumerate(vals):
        cols.append(state.realize(complex(value)))
        state.certify(k)
    e = Frame(np.column_stack(cols))
    resid = np.linalg.norm(compressed_residual(host, e, np.diag(vals)), 2)
    if resid > tol.realization:
        raise NoConvergence(f"diagonal realization residual {resid:.3e} too large")
    return e


def compressed_residual(host: np.ndarray, e: Frame, target: np.ndarray) -> np.ndarray:
    q = e.columns
    return q.conj().T @ host @ q - target


def _contraction_realize_on(
    state: _Extraction, x: np.ndarray, tol: Tolerances
) -> Frame:
    """Realize a strict contraction as a compression inside the live state."""
    d = x.shape[0]
    scale = 1.0 + norm_upper_bound(x)
    off = x - np.diag(np.diag(x))
    if not off.size or np.max(np.abs(off)) <= tol.equality * scale:
        cols = [state.realize(complex(v)) for v in np.diag(x)]
        return Frame(np.column_stack(cols)) if cols else Frame(np.zeros((state.n, 0), dtype=complex))
    dil = halmos_dilation(x, rho=state.rho, tol=tol)
    t, w = sla.schur(dil.normal, output="complex")
    mu = np.diag(t)
    cols = [state.realize(complex(v)) for v in mu]
    g = np.column_stack(cols)
    rotated = g @ w.conj().T
    return Frame(rotated[:, :d])


def realize_contraction_compression(
    a,
    x,
    rho: float,
    *,
    tol: Tolerances = DEFAULT_TOL,
    reserve: int = 8,
    work_angles: int = 8,
    recheck_angles: int = 8,
) -> Frame:
    """Frame E with E* A E equal to the strict contraction X.

    Diagonal targets reduce to the greedy diagonal realization; anything
    else is scaled into a unitary dilation, whose normal rescaling is
    diagonalized and realized, and the first block of the rotated frame
    compresses the host exactly onto X.
    """
    host = as_matrix(a, square=True)
    m = as_matrix(x, square=True)
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie strictly between 0 and 1")
    norm_x = float(np.linalg.norm(m, 2)) if m.size else 0.0
    if norm_x >= rho:
        raise NotStrictContraction(f"||X|| = {norm_x:.6f} is not below rho = {rho}")
    d = m.shape[0]
    if d == 0:
        return Frame(np.zeros((host.shape[0], 0), dtype=complex))
    scale = 1.0 + norm_upper_bound(m)
    off = m - np.diag(np.diag(m))
    per_dim = 3 * d if np.max(np.abs(off), initial=0.0) <= tol.equality * scale else 6 * d
    _require_budget(host.shape[0], per_dim, reserve, "contraction realization")
    state = _Extraction(
        host, rho, tol, work_start=work_angles, recheck_angles=recheck_angles
    )
    state.certify(None)
    e = _contraction_realize_on(state, m, tol)
    resid = np.linalg.norm(compressed_residual(host, e, m), 2)
    if resid > tol.realization:
        raise NoConvergence(f"contraction realization residual {resid:.3e} too large")
    return e


# ---------------------------------------------------------------------------
# faithful route with mass bounds


def _mass_realize_on(
    state: _Extraction,
    x: np.ndarray,
    h_host: np.ndarray,
    rho: float,
    tol: Tolerances,
    reserve: int,
) -> tuple[Frame, WalshPlan, float, np.ndarray]:
    """Walsh-split realization guaranteeing overlap with a test vector.

    Builds the block family (the test-vector block first, with all later
    block vectors chosen at diagonal value zero), solves the splitting
    identity X = (1/2^l)(B_0 + sum X_j) with equal compensating blocks
    X_j = (2^l X - B_0) / (2^l - 1), realizes each X_j, and combines the
    blocks through the Walsh signs.  Every combined block compresses the
    host onto X, and the one containing the test direction carries mass
    exactly 2^(-l/2).
    """
    d = x.shape[0]
    if d == 0:
        raise DimensionMismatch("mass realization needs a non-empty target")
    norm_x = float(np.linalg.norm(x, 2))
    if norm_x >= rho:
        raise NotStrictContraction(f"||X|| = {norm_x:.6f} is not below rho = {rho}")
    # Test-vector block: the projected test direction plus zero-value vectors.
    y = state.project(h_host)
    ny = float(np.linalg.norm(y))
    if ny < 1e-8:
        raise ValueError("test vector has no component in the active subspace")
    y = y / ny
    f0_host = state.to_host(y)
    state._consume(y)
    zero_cols = [state.realize(0.0) for _ in range(d - 1)]
    q0 = Frame(np.column_stack([f0_host] + zero_cols))
    b0 = q0.columns.conj().T @ state.host @ q0.columns
    level = choose_walsh_level(norm_x, rho).level
    while True:
        two_l = 2**level
        xj = (two_l * x - b0) / (two_l - 1)
        if float(np.linalg.norm(xj, 2)) < rho:
            break
        level += 1
        if level > 16:
            raise TooLarge("no walsh level of at most 16 fits the splitting margin")
    two_l = 2**level
    per_block = 6 * d  # compensating blocks are generally non-diagonal
    _require_budget(state.active_dim, (two_l - 1) * per_block, reserve, "mass realization")
    blocks = [q0]
    for _ in range(two_l - 1):
        blocks.append(_contraction_realize_on(state, xj, tol))
    v = walsh_matrix(level).real
    candidates = []
    masses = []
    for j in range(two_l):
        cols = sum(v[j, a] * blocks[a].columns for a in range(two_l))
        candidates.append(Frame(cols))
        masses.append(float(np.linalg.norm(cols.conj().T @ f0_host)))
    best = int(np.argmax(masses))
    plan = WalshPlan.default_construction(level)
    return candidates[best], plan, masses[best], f0_host


def realize_with_mass(
    a,
    x,
    h,
    rho: float,
    gamma: float | None = None,
    *,
    tol: Tolerances = DEFAULT_TOL,
    reserve: int = 8,
    work_angles: int = 8,
    recheck_angles: int = 8,
) -> tuple[Frame, WalshPlan, float]:
    """Frame E with E* A E = X and guaranteed mass ||E* h|| >= 2^(-l/2) - tol.

    The level l is the smallest one for which both the scaled-target
    criterion and the splitting identity leave strict margin below rho;
    it depends only on ||X||, rho, and the norm bound gamma of the host.
    """
    host = as_matrix(a, square=True)
    m = as_matrix(x, square=True)
    hv = np.asarray(h, dtype=complex).ravel()
    if hv.shape[0] != host.shape[0]:
        raise DimensionMismatch("test vector length does not match the host")
    nh = float(np.linalg.norm(hv))
    if abs(nh - 1.0) > 1e-8:
        raise ValueError("test vector must have unit norm")
    if gamma is None:
        gamma = norm_upper_bound(host)
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie strictly between 0 and 1")
    state = _Extraction(
        host, rho, tol, work_start=work_angles, recheck_angles=recheck_angles
    )
    state.certify(None)
    e, plan, mass, _ = _mass_realize_on(state, m, hv, rho, tol, reserve)
    resid = np.linalg.norm(compressed_residual(host, e, m), 2)
    if resid > tol.realization:
        raise NoConvergence(f"mass realization residual {resid:.3e} too large")
    return e, plan, mass


# ---------------------------------------------------------------------------
# pinching certificates


@dataclass(frozen=True)
class PinchingCertificate:
    """Frames and residual evidence for one pinching synthesis.

    ``mass_bounds`` holds one entry per target: None for fast-mode targets,
    or (epsilon_claimed, mass_measured) in faithful mode.  ``coverage`` is
    the fraction of the host dimension spanned by all frames together.
    """

    frames: list[Frame]
    residuals: list[float]
    orthogonality: float
    coverage: float
    mass_bounds: list[tuple[float, float] | None]

    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    def validate(self, tol: Tolerances = DEFAULT_TOL) -> "PinchingCertificate":
        if self.orthogonality > tol.frame_orth:
            raise ValueError(f"frames are not mutually orthogonal: {self.orthogonality:.3e}")
        if self.coverage > 1.0 + 1e-12:
            raise ValueError("coverage exceeds the host dimension")
        for f in self.frames:
            f.validate(tol)
        return self


def _certificate(
    host: np.ndarray,
    targets: list[np.ndarray],
    frames: list[Frame],
    mass_bounds: list[tuple[float, float] | None],
) -> PinchingCertificate:
    residuals = [
        float(np.linalg.norm(compressed_residual(host, e, t), 2))
        for e, t in zip(frames, targets)
    ]
    orth = 0.0
    for i in range(len(frames)):
        for j in range(i + 1, len(frames)):
            if frames[i].rank and frames[j].rank:
                orth = max(
                    orth,
                    float(
                        np.linalg.norm(
                            frames[i].columns.conj().T @ frames[j].columns, 2
                        )
                    ),
                )
    coverage = sum(f.rank for f in frames) / host.shape[0] if host.shape[0] else 0.0
    return PinchingCertificate(
        frames=frames,
        residuals=residuals,
        orthogonality=orth,
        coverage=float(coverage),
        mass_bounds=mass_bounds,
    )


def _prepare_targets(targets) -> list[np.ndarray]:
    return [as_matrix(t, square=True) for t in targets]


def pinch(
    a,
    targets,
    rho: float,
    mode: str = "fast",
    *,
    gamma: float | None = None,
    tol: Tolerances = DEFAULT_TOL,
    reserve: int = 32,
    work_angles: int = 8,
    recheck_angles: int = 8,
    mass_seed: int = DEFAULT_MASS_SEED,
) -> PinchingCertificate:
    """Extract mutually orthogonal frames realizing every target as a
    compression of one host.

    Fast mode routes each target through the normal dilation; faithful mode
    uses the Walsh splitting and records a mass bound against a seeded
    deterministic sequence of test vectors.  After each extraction the host
    is deflated to the orthogonal complement and the disc certificate is
    re-verified; failure aborts with the index of the offending target.
    """
    host = as_matrix(a, square=True)
    if mode not in ("fast", "faithful"):
        raise ValueError("mode must be 'fast' or 'faithful'")
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie strictly between 0 and 1")
    mats = _prepare_targets(targets)
    if not mats:
        return PinchingCertificate(
            frames=[], residuals=[], orthogonality=0.0, coverage=0.0, mass_bounds=[]
        )
    if gamma is None:
        gamma = norm_upper_bound(host)
    needed = 0
    for j, m in enumerate(mats):
        norm_x = float(np.linalg.norm(m, 2)) if m.size else 0.0
        if norm_x >= rho:
            raise NotStrictContraction(
                f"target {j} has norm {norm_x:.6f}, not below rho = {rho}"
            )
        d = m.shape[0]
        if mode == "fast":
            off = m - np.diag(np.diag(m))
            diag_like = not off.size or np.max(np.abs(off)) <= tol.equality
            needed += 3 * d if diag_like else 6 * d
        else:
            level = choose_walsh_level(norm_x, rho).level
            while (2**level * norm_x + gamma) / (2**level - 1) >= rho and level <= 16:
                level += 1
            needed += 3 * d + (2**level - 1) * 6 * d
    _require_budget(host.shape[0], needed, reserve, f"pinching {len(mats)} targets")
    state = _Extraction(
        host, rho, tol, work_start=work_angles, recheck_angles=recheck_angles
    )
    state.certify(None)
    rng = np.random.default_rng(mass_seed)
    frames: list[Frame] = []
    mass_bounds: list[tuple[float, float] | None] = []
    for j, m in enumerate(mats):
        if mode == "fast":
            frames.append(_contraction_realize_on(state, m, tol))
            mass_bounds.append(None)
        else:
            h = _next_test_vector(rng, state)
            e, plan, mass, _ = _mass_realize_on(state, m, h, rho, tol, reserve)
            frames.append(e)
            mass_bounds.append((plan.epsilon, mass))
        state.certify(j)
    return _certificate(host, mats, frames, mass_bounds)


def _next_test_vector(rng: np.random.Generator, state: _Extraction) -> np.ndarray:
    """Next member of the test-vector sequence with usable active component."""
    for _ in range(64):
        raw = rng.standard_normal(state.n) + 1j * rng.standard_normal(state.n)
        h = raw / np.linalg.norm(raw)
        if np.linalg.norm(state.project(h)) >= 1e-8:
            return h
    raise NoConvergence("no test vector overlaps the active subspace")


def pinch_normal(
    a,
    targets,
    rho: float,
    *,
    strict_margin: float = 1e-6,
    tol: Tolerances = DEFAULT_TOL,
    reserve: int = 32,
    work_angles: int = 8,
    recheck_angles: int = 8,
) -> PinchingCertificate:
    """Pinching synthesis for normal targets via direct diagonalization.

    Each target is unitarily diagonalized (no dilation step) and its
    eigenvalues realized greedily; eigenvalues must stay strictly inside
    the certified disc by the stated margin.
    """
    host = as_matrix(a, square=True)
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie strictly between 0 and 1")
    mats = _prepare_targets(targets)
    if not mats:
        return PinchingCertificate(
            frames=[], residuals=[], orthogonality=0.0, coverage=0.0, mass_bounds=[]
        )
    spectra = []
    rotations = []
    for j, m in enumerate(mats):
        defect = float(np.linalg.norm(m.conj().T @ m - m @ m.conj().T, 2))
        if defect > 1e-9:
            raise NotNormal(f"target {j} is not normal (defect {defect:.3e})")
        t, w = sla.schur(m, output="complex")
        mu = np.diag(t)
        if len(mu) and np.max(np.abs(mu)) >= rho - strict_margin:
            raise ValueOutsideRange(
                f"target {j} has eigenvalues outside radius {rho - strict_margin}"
            )
        spectra.append(mu)
        rotations.append(w)
    _require_budget(
        host.shape[0], sum(3 * m.shape[0] for m in mats), reserve, "normal pinching"
    )
    state = _Extraction(
        host, rho, tol, work_start=work_angles, recheck_angles=recheck_angles
    )
    state.certify(None)
    frames: list[Frame] = []
    for j, (mu, w) in enumerate(zip(spectra, rotations)):
        cols = [state.realize(complex(v)) for v in mu]
        g = (
            np.column_stack(cols)
            if cols
            else np.zeros((state.n, 0), dtype=complex)
        )
        frames.append(Frame(g @ w.conj().T))
        state.certify(j)
    return _certificate(host, mats, frames, [None] * len(mats))
