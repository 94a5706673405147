"""Numerical range computation and value realization.

The numerical range W(A) is the set of values <h, A h> over unit vectors h;
it is convex, and its support function at angle theta is the top eigenvalue
of the Hermitian part of exp(-i theta) A.  This module samples boundaries,
certifies disc containment, realizes interior values by explicit unit
vectors, checks Schur-Horn diagonal feasibility, and builds the rank-p
perturbation that pulls prescribed targets into the range.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    DimensionMismatch,
    LengthMismatch,
    NoConvergence,
    ValueOutsideRange,
)
from .linalg import (
    DEFAULT_TOL,
    Frame,
    Tolerances,
    as_matrix,
    extreme_eigpairs,
    norm_upper_bound,
    rotated_herm_part,
    top_eigpair,
)

_TINY = 1e-14


@dataclass(frozen=True)
class RangeHull:
    """Sampled boundary of a numerical range.

    Parallel arrays: ``thetas`` (support angles), ``supports`` (support
    values), ``points`` (attained boundary values <v, A v>), and ``vectors``
    whose k-th column is the achieving unit vector for sample k.
    """

    thetas: np.ndarray
    supports: np.ndarray
    points: np.ndarray
    vectors: np.ndarray

    @property
    def ambient_dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def sample_count(self) -> int:
        return len(self.thetas)

    def support_at(self, theta: float) -> float:
        k = int(np.argmin(np.abs(np.angle(np.exp(1j * (self.thetas - theta)))) ))
        return float(self.supports[k])

    def polygon(self) -> tuple[np.ndarray, np.ndarray]:
        """De-duplicated boundary points in counterclockwise order.

        Returns the vertex values and, for each vertex, the index of a hull
        sample attaining it (so the achieving vector can be recovered).
        """
        pts = self.points
        if len(pts) == 0:
            return pts.copy(), np.zeros(0, dtype=int)
        scale = 1.0 + np.max(np.abs(pts))
        order = np.argsort(np.angle(pts - pts.mean() + 0j), kind="stable")
        verts: list[complex] = []
        idx: list[int] = []
        for k in order:
            z = pts[k]
            if all(abs(z - w) > 1e-12 * scale for w in verts):
                verts.append(z)
                idx.append(int(k))
        return np.asarray(verts, dtype=complex), np.asarray(idx, dtype=int)

    def convexity_defect(self) -> float:
        """Worst normalized inward cross product of the vertex polygon (>= -tol means convex)."""
        verts, _ = self.polygon()
        m = len(verts)
        if m <= 2:
            return 0.0
        worst = 0.0
        for i in range(m):
            a, b, c = verts[i - 1], verts[i], verts[(i + 1) % m]
            e1, e2 = b - a, c - b
            denom = max(abs(e1) * abs(e2), _TINY)
            cross = (e1.real * e2.imag - e1.imag * e2.real) / denom
            worst = min(worst, cross)
        return float(worst)

    def validate(self, tol: Tolerances = DEFAULT_TOL) -> "RangeHull":
        norms = np.linalg.norm(self.vectors, axis=0)
        if len(norms) and np.max(np.abs(norms - 1.0)) > 1e-10:
            raise ValueError("hull sample vectors are not unit vectors")
        recon = np.real(np.exp(-1j * self.thetas) * self.points)
        if len(recon) and np.max(np.abs(recon - self.supports)) > 1e-10 * (
            1.0 + np.max(np.abs(self.supports))
        ):
            raise ValueError("support values inconsistent with boundary points")
        if self.convexity_defect() < -1e-8:
            raise ValueError("boundary polygon is not convex")
        return self


@dataclass(frozen=True)
class DiscCertificate:
    """Signed evidence that the origin-centred disc sits inside the sampled range."""

    radius: float
    margin: float
    min_support_theta: float

    @property
    def holds(self) -> bool:
        return self.margin > 0.0


def support_point(a, theta: float, tol: Tolerances = DEFAULT_TOL):
    """Support value, attained boundary point, and achieving unit vector at one angle."""
    m = as_matrix(a, square=True)
    h = rotated_herm_part(m, theta)
    w, v = top_eigpair(h)
    point = complex(np.vdot(v, m @ v))
    return w, point, v


def numerical_range_hull(a, n_angles: int, tol: Tolerances = DEFAULT_TOL) -> RangeHull:
    """Sample the boundary of W(A) at n_angles uniform support directions.

    Antipodal angles share one Hermitian eigenproblem (the bottom eigenpair
    at theta is the top eigenpair at theta + pi), so even n_angles costs
    n_angles / 2 eigendecompositions.
    """
    m = as_matrix(a, square=True)
    if n_angles < 8:
        raise ValueError("n_angles must be at least 8")
    n = m.shape[0]
    thetas = 2.0 * np.pi * np.arange(n_angles) / n_angles
    supports = np.empty(n_angles)
    points = np.empty(n_angles, dtype=complex)
    vectors = np.empty((n, n_angles), dtype=complex)

    def put(k: int, w: float, v: np.ndarray) -> None:
        supports[k] = w
        vectors[:, k] = v
        points[k] = np.vdot(v, m @ v)

    if n_angles % 2 == 0:
        half = n_angles // 2
        for k in range(half):
            h = rotated_herm_part(m, thetas[k])
            wt, vt, wb, vb = extreme_eigpairs(h)
            put(k, wt, vt)
            put(k + half, -wb, vb)
    else:
        for k in range(n_angles):
            h = rotated_herm_part(m, thetas[k])
            w, v = top_eigpair(h)
            put(k, w, v)
    return RangeHull(thetas=thetas, supports=supports, points=points, vectors=vectors)


def _top_support_value(m: np.ndarray, theta: float) -> float:
    h = rotated_herm_part(m, theta)
    n = h.shape[0]
    if n <= 192:
        return float(np.linalg.eigvalsh(h)[-1])
    w = sla.eigh(h, subset_by_index=(n - 1, n - 1), eigvals_only=True, check_finite=False)
    return float(w[0])


def contains_disc(
    a,
    radius: float,
    n_angles: int = 720,
    *,
    refine: bool = True,
    tol: Tolerances = DEFAULT_TOL,
) -> DiscCertificate:
    """Certify (by sampled support minima) that the closed disc of the given
    radius is contained in W(A).  A positive margin certifies containment up
    to the sampling resolution; a negative margin is a valid answer."""
    m = as_matrix(a, square=True)
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if n_angles < 8:
        raise ValueError("n_angles must be at least 8")
    thetas = 2.0 * np.pi * np.arange(n_angles) / n_angles
    supports = np.empty(n_angles)
    if n_angles % 2 == 0:
        half = n_angles // 2
        for k in range(half):
            w = np.linalg.eigvalsh(rotated_herm_part(m, thetas[k]))
            supports[k] = w[-1]
            supports[k + half] = -w[0]
    else:
        for k in range(n_angles):
            supports[k] = _top_support_value(m, thetas[k])
    k_min = int(np.argmin(supports))
    best_theta = float(thetas[k_min])
    best_support = float(supports[k_min])
    if refine:
        # One golden-section pass around the sampled minimizer.
        delta = 2.0 * np.pi / n_angles
        lo, hi = best_theta - delta, best_theta + delta
        inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
        x1 = hi - inv_phi * (hi - lo)
        x2 = lo + inv_phi * (hi - lo)
        f1 = _top_support_value(m, x1)
        f2 = _top_support_value(m, x2)
        for _ in range(24):
            if f1 <= f2:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - inv_phi * (hi - lo)
                f1 = _top_support_value(m, x1)
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + inv_phi * (hi - lo)
                f2 = _top_support_value(m, x2)
        for x, f in ((x1, f1), (x2, f2)):
            if f < best_support:
                best_support, best_theta = f, x % (2.0 * np.pi)
    return DiscCertificate(
        radius=float(radius),
        margin=best_support - float(radius),
        min_support_theta=best_theta,
    )


# ---------------------------------------------------------------------------
# value realization


def _two_by_two_value(c: np.ndarray, t: float, phi: float) -> complex:
    co, si = math.cos(t), math.sin(t)
    psi = cmath.exp(1j * phi) * c[0, 1] + cmath.exp(-1j * phi) * c[1, 0]
    return co * co * c[0, 0] + si * si * c[1, 1] + co * si * psi


def _two_by_two_seed(c: np.ndarray, target: complex) -> tuple[float, float]:
    """Analytic (t, phi) seed hitting targets on the segment between the
    diagonal values of a 2x2 compression exactly; off-segment components are
    left to the Newton polish."""
    delta = c[1, 1] - c[0, 0]
    if abs(delta) <= _TINY * (1.0 + abs(c[0, 0])):
        w = target - c[0, 0]
        if abs(w) <= _TINY:
            return 0.0, 0.0
        wd = w / abs(w)
        beta = c[0, 1] * np.conj(wd)
        gamma = c[1, 0] * np.conj(wd)
        d = beta - np.conj(gamma)
        phi = -cmath.phase(d) if abs(d) > _TINY else 0.0
        r = (cmath.exp(1j * phi) * beta + cmath.exp(-1j * phi) * gamma).real
        if r < 0:
            phi += math.pi
            r = -r
        if r <= _TINY:
            return math.pi / 4.0, 0.0
        return 0.5 * math.asin(min(1.0, 2.0 * abs(w) / r)), phi
    s = ((target - c[0, 0]) * np.conj(delta)).real / abs(delta) ** 2
    s = min(1.0, max(0.0, s))
    beta = c[0, 1] / delta
    gamma = c[1, 0] / delta
    d = beta - np.conj(gamma)
    phi = -cmath.phase(d) if abs(d) > _TINY else 0.0
    r = (cmath.exp(1j * phi) * beta + cmath.exp(-1j * phi) * gamma).real
    # Solve (1 - cos u)/2 + (r/2) sin u = s on [0, pi].
    big = math.hypot(r, 1.0)
    zeta = math.atan2(-1.0, r)
    base = math.asin(max(-1.0, min(1.0, (2.0 * s - 1.0) / big)))
    best_u, best_err = 0.0, float("inf")
    for u in (base - zeta, math.pi - base - zeta):
        for shift in (-2.0 * math.pi, 0.0, 2.0 * math.pi):
            uu = u + shift
            if -1e-9 <= uu <= math.pi + 1e-9:
                err = abs((1.0 - math.cos(uu)) / 2.0 + (r / 2.0) * math.sin(uu) - s)
                if err < best_err:
                    best_u, best_err = uu, err
    return 0.5 * min(math.pi, max(0.0, best_u)), phi


def _two_by_two_solve(
    c: np.ndarray, target: complex, accept_tol: float
) -> tuple[np.ndarray, float]:
    """Unit g in C^2 with <g, C g> close to the target.

    Seeds analytically, then Newton-refines the two-parameter family
    g(t, phi) = (cos t, e^{i phi} sin t).  Returns (g, residual).
    """
    scale = 1.0 + float(np.max(np.abs(c))) + abs(target)

    def newton(t: float, phi: float) -> tuple[float, float, float]:
        best = (t, phi, abs(_two_by_two_value(c, t, phi) - target))
        stall = 0
        for _ in range(60):
            val = _two_by_two_value(c, t, phi)
            g = val - target
            err = abs(g)
            if err < best[2]:
                best = (t, phi, err)
                stall = 0
            else:
                stall += 1
            if err <= 1e-14 * scale or stall > 6:
                break
            co2, si2 = math.cos(2 * t), math.sin(2 * t)
            psi = cmath.exp(1j * phi) * c[0, 1] + cmath.exp(-1j * phi) * c[1, 0]
            dpsi = 1j * (cmath.exp(1j * phi) * c[0, 1] - cmath.exp(-1j * phi) * c[1, 0])
            dv_dt = si2 * (c[1, 1] - c[0, 0]) + co2 * psi
            dv_dphi = 0.5 * si2 * dpsi
            jac = np.array(
                [[dv_dt.real, dv_dphi.real], [dv_dt.imag, dv_dphi.imag]]
            )
            rhs = -np.array([g.real, g.imag])
            step, *_ = np.linalg.lstsq(jac, rhs, rcond=None)
            norm = float(np.hypot(step[0], step[1]))
            if norm > 0.7:
                step *= 0.7 / norm
            t += float(step[0])
            phi += float(step[1])
        return best

    t0, phi0 = _two_by_two_seed(c, target)
    t, phi, err = newton(t0, phi0)
    if err > accept_tol:
        # Coarse grid fallback, then polish the best cell.
        ts = np.linspace(0.0, math.pi / 2.0, 25)
        phis = np.linspace(0.0, 2.0 * math.pi, 49, endpoint=False)
        for tg in ts:
            for pg in phis:
                e = abs(_two_by_two_value(c, tg, pg) - target)
                if e < err:
                    t, phi, err = tg, pg, e
        t, phi, err = newton(t, phi)
    g = np.array([math.cos(t), cmath.exp(1j * phi) * math.sin(t)], dtype=complex)
    return g, err


def realize_in_span(
    a: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    target: complex,
    accept_tol: float,
) -> np.ndarray:
    """Unit vector h in span{x, y} with <h, A h> within accept_tol of target."""
    u1 = x / np.linalg.norm(x)
    w = y - u1 * np.vdot(u1, y)
    nw = np.linalg.norm(w)
    if nw < 1e-12:
        val = complex(np.vdot(u1, a @ u1))
        if abs(val - target) <= accept_tol:
            return u1
        raise NoConvergence("degenerate span cannot reach the target value")
    u2 = w / nw
    basis = np.column_stack([u1, u2])
    c = basis.conj().T @ a @ basis
    g, err = _two_by_two_solve(c, target, accept_tol)
    if err > accept_tol:
        raise NoConvergence(
            f"two-dimensional realization stalled at residual {err:.3e}"
        )
    h = basis @ g
    return h / np.linalg.norm(h)


def _polygon_inner_distance(z: complex, verts: np.ndarray) -> float:
    """Signed distance from z to the polygon boundary (positive inside)."""
    m = len(verts)
    dist = float("inf")
    for i in range(m):
        a, b = verts[i], verts[(i + 1) % m]
        e = b - a
        le = abs(e)
        if le < _TINY:
            continue
        cross = (e.real * (z - a).imag - e.imag * (z - a).real) / le
        dist = min(dist, cross)
    return dist


def _line_polygon_chord(
    verts: np.ndarray, idx: np.ndarray, z: complex, horizontal: bool
) -> tuple[tuple[complex, int, int], tuple[complex, int, int]] | None:
    """Intersect the horizontal (or vertical) line through z with the polygon.

    Returns ((point, i, j), (point, i, j)) for the two boundary crossings on
    either side of z, where i, j are hull sample indices of the crossed
    edge's endpoints, or None if the chord degenerates.
    """
    m = len(verts)

    def coord(p: complex) -> float:
        return p.imag if horizontal else p.real

    def along(p: complex) -> float:
        return p.real if horizontal else p.imag

    level = coord(z)
    crossings: list[tuple[complex, int, int]] = []
    for i in range(m):
        a, b = verts[i], verts[(i + 1) % m]
        ca, cb = coord(a) - level, coord(b) - level
        if abs(ca) < _TINY and abs(cb) < _TINY:
            crossings.append((a, idx[i], idx[i]))
            crossings.append((b, idx[(i + 1) % m], idx[(i + 1) % m]))
            continue
        if ca * cb > 0:
            continue
        if abs(ca - cb) < _TINY:
            continue
        t = ca / (ca - cb)
        if t < -1e-12 or t > 1 + 1e-12:
            continue
        p = a + (b - a) * min(1.0, max(0.0, t))
        crossings.append((p, idx[i], idx[(i + 1) % m]))
    left = [c for c in crossings if along(c[0]) < along(z)]
    right = [c for c in crossings if along(c[0]) >= along(z)]
    if not left or not right:
        return None
    pl = min(left, key=lambda c: along(c[0]))
    pr = max(right, key=lambda c: along(c[0]))
    if abs(pl[0] - pr[0]) < 1e-8:
        return None
    return pl, pr


def _segment_geometry(points: np.ndarray) -> tuple[complex, complex, float]:
    """Centroid, unit direction, and max transverse spread of a point cloud."""
    centre = points.mean()
    rel = points - centre
    cov = np.array(
        [
            [np.sum(rel.real * rel.real), np.sum(rel.real * rel.imag)],
            [np.sum(rel.real * rel.imag), np.sum(rel.imag * rel.imag)],
        ]
    )
    w, v = np.linalg.eigh(cov)
    direction = complex(v[0, 1], v[1, 1])
    direction /= abs(direction)
    transverse = float(np.max(np.abs((rel * np.conj(direction)).imag))) if len(rel) else 0.0
    return centre, direction, transverse


def realize_value(
    a,
    value: complex,
    *,
    hull: RangeHull | None = None,
    n_angles: int = 64,
    margin: float | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> np.ndarray:
    """Unit vector h with <h, A h> within the realization tolerance of value.

    The value must be interior to the sampled hull with the stated margin
    (default 1e-6 * (1 + ||A||)).  A chord of the hull polygon through the
    value is located (horizontal line first, vertical fallback for short
    chords), its endpoints are realized inside their edges' 2-d spans, and
    the final vector comes from a Newton search over mixing angle and
    relative phase in the span of the two chord-endpoint vectors.
    """
    m = as_matrix(a, square=True)
    value = complex(value)
    scale = 1.0 + norm_upper_bound(m)
    if margin is None:
        margin = 1e-6 * scale
    margin = max(margin, tol.realization)
    if hull is None:
        hull = numerical_range_hull(m, n_angles, tol)
    verts, idx = hull.polygon()
    edge_tol = tol.realization

    if len(verts) == 1 or (len(verts) and np.max(np.abs(verts - verts[0])) < 1e-12 * scale):
        if abs(value - verts[0]) <= edge_tol:
            return hull.vectors[:, idx[0]]
        raise ValueOutsideRange("range degenerates to a point away from the value")

    centre, direction, transverse = _segment_geometry(verts)
    if transverse <= 1e-9 * scale:
        # Collinear boundary: treat the hull as a segment.
        coords = ((verts - centre) * np.conj(direction)).real
        perp = abs(((value - centre) * np.conj(direction)).imag)
        if perp > edge_tol:
            raise ValueOutsideRange("value lies off the segment-shaped range")
        lo_k, hi_k = int(np.argmin(coords)), int(np.argmax(coords))
        s = ((value - centre) * np.conj(direction)).real
        if s < coords[lo_k] + margin or s > coords[hi_k] - margin:
            raise ValueOutsideRange("value too close to the segment endpoints")
        x = hull.vectors[:, idx[lo_k]]
        y = hull.vectors[:, idx[hi_k]]
        return realize_in_span(m, x, y, value, tol.realization)

    if _polygon_inner_distance(value, verts) < margin:
        raise ValueOutsideRange(
            f"value {value:.6g} not interior to the sampled hull with margin {margin:.3e}"
        )

    chord = _line_polygon_chord(verts, idx, value, horizontal=True)
    if chord is None:
        chord = _line_polygon_chord(verts, idx, value, horizontal=False)
    if chord is None:
        raise NoConvergence("no usable chord through the value was found")
    (p_l, i_l, j_l), (p_r, i_r, j_r) = chord

    def edge_vector(point: complex, i: int, j: int) -> np.ndarray:
        if i == j:
            return hull.vectors[:, i]
        return realize_in_span(
            m, hull.vectors[:, i], hull.vectors[:, j], point, max(1e-10 * scale, 1e-13)
        )

    x = edge_vector(p_l, i_l, j_l)
    y = edge_vector(p_r, i_r, j_r)
    return realize_in_span(m, x, y, value, tol.realization)


def adaptive_hull(
    a,
    value: complex,
    *,
    margin: float,
    start: int = 8,
    cap: int = 32,
    tol: Tolerances = DEFAULT_TOL,
) -> RangeHull:
    """Smallest uniform support sweep whose polygon contains value with margin.

    Doubles the direction count (reusing earlier samples) until the sampled
    polygon surrounds the value or the cap is hit.  The sampled polygon is an
    inner approximation of W(A), so acceptance here is sound.
    """
    m = as_matrix(a, square=True)
    cache: dict[float, tuple[float, complex, np.ndarray]] = {}
    n_angles = max(8, start)
    while True:
        thetas = 2.0 * np.pi * np.arange(n_angles) / n_angles
        half = n_angles // 2
        for k in range(half):
            t = float(thetas[k])
            if t in cache:
                continue
            h = rotated_herm_part(m, t)
            wt, vt, wb, vb = extreme_eigpairs(h)
            cache[t] = (wt, complex(np.vdot(vt, m @ vt)), vt)
            cache[float(thetas[k + half])] = (-wb, complex(np.vdot(vb, m @ vb)), vb)
        supports = np.array([cache[float(t)][0] for t in thetas])
        points = np.array([cache[float(t)][1] for t in thetas])
        vectors = np.column_stack([cache[float(t)][2] for t in thetas])
        hull = RangeHull(thetas=thetas, supports=supports, points=points, vectors=vectors)
        verts, _ = hull.polygon()
        if len(verts) >= 3:
            centre, _, transverse = _segment_geometry(verts)
            if transverse > 1e-9 and _polygon_inner_distance(value, verts) >= margin:
                return hull
        else:
            # Degenerate ranges never improve with more angles.
            return hull
        if n_angles >= cap:
            return hull
        n_angles *= 2


# ---------------------------------------------------------------------------
# Schur-Horn feasibility


@dataclass(frozen=True)
class SchurHornResult:
    """Outcome of the majorization test.

    ``witness`` is None when feasible, the 1-based length of the first
    violated sorted prefix, or len(spectrum) for a total-sum mismatch.
    """

    feasible: bool
    witness: int | None
    spectrum_sum: float
    diagonal_sum: float


def schur_horn_feasible(spectrum, diagonal, *, tol: float = 1e-9) -> SchurHornResult:
    """Decide whether the diagonal is majorized by the spectrum.

    Exactly the feasibility condition for a real vector to be the diagonal
    of a Hermitian matrix with the prescribed spectrum: sorted prefix sums
    dominated and total sums equal.
    """
    s = np.asarray(spectrum, dtype=float)
    d = np.asarray(diagonal, dtype=float)
    if s.ndim != 1 or d.ndim != 1 or len(s) != len(d):
        raise LengthMismatch("spectrum and diagonal must be equal-length vectors")
    n = len(s)
    s_sum, d_sum = float(np.sum(s)), float(np.sum(d))
    if n == 0:
        return SchurHornResult(True, None, s_sum, d_sum)
    if abs(d_sum - s_sum) > tol:
        return SchurHornResult(False, n, s_sum, d_sum)
    s_sorted = np.sort(s)[::-1]
    d_sorted = np.sort(d)[::-1]
    s_prefix = np.cumsum(s_sorted)
    d_prefix = np.cumsum(d_sorted)
    for k in range(n - 1):
        if d_prefix[k] > s_prefix[k] + tol:
            return SchurHornResult(False, k + 1, s_sum, d_sum)
    return SchurHornResult(True, None, s_sum, d_sum)


def schur_horn_witness_search(
    spectrum,
    diagonal,
    *,
    restarts: int = 6,
    sweeps: int = 80,
    seed: int = 0,
) -> tuple[float, np.ndarray]:
    """Brute-force witness search for the majorization test.

    Conjugates diag(spectrum) by random unitaries and keeps the best
    entrywise diagonal match, polishing each start with plane rotations that
    optimally redistribute one diagonal pair at a time.  Returns the best
    distance ||diag(U L U*) - d||_2 and the best conjugating unitary.
    """
    s = np.asarray(spectrum, dtype=float)
    d = np.asarray(diagonal, dtype=float)
    if len(s) != len(d):
        raise LengthMismatch("spectrum and diagonal must be equal-length vectors")
    n = len(s)
    if n == 0:
        return 0.0, np.zeros((0, 0), dtype=complex)
    rng = np.random.default_rng(seed)
    best_dist = float("inf")
    best_u = np.eye(n, dtype=complex)
    for _ in range(restarts):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        u, _ = np.linalg.qr(g)
        mat = (u * s) @ u.conj().T
        for _ in range(sweeps):
            moved = 0.0
            for i in range(n):
                for j in range(i + 1, n):
                    a_ii = mat[i, i].real
                    c_jj = mat[j, j].real
                    b = mat[i, j]
                    mid = 0.5 * (a_ii + c_jj)
                    rad = math.hypot(0.5 * (a_ii - c_jj), abs(b))
                    want = 0.5 * (d[i] - d[j] + a_ii + c_jj)
                    want = min(mid + rad, max(mid - rad, want))
                    if abs(want - a_ii) <= 1e-15 * (1.0 + abs(a_ii)) or rad < _TINY:
                        continue
                    phi = cmath.phase(b) if abs(b) > _TINY else 0.0
                    zeta = math.atan2(0.5 * (a_ii - c_jj), abs(b))
                    u_ang = math.asin(max(-1.0, min(1.0, (want - mid) / rad))) - zeta
                    t = 0.5 * u_ang
                    co, si = math.cos(t), math.sin(t)
                    ph = cmath.exp(1j * phi)
                    gi = co * mat[i, :] + si * ph * mat[j, :]
                    gj = -si * np.conj(ph) * mat[i, :] + co * mat[j, :]
                    mat[i, :], mat[j, :] = gi, gj
                    ci = co * mat[:, i] + si * np.conj(ph) * mat[:, j]
                    cj = -si * ph * mat[:, i] + co * mat[:, j]
                    mat[:, i], mat[:, j] = ci, cj
                    ui = co * u[i, :] + si * ph * u[j, :]
                    uj = -si * np.conj(ph) * u[i, :] + co * u[j, :]
                    u[i, :], u[j, :] = ui, uj
                    moved += abs(want - a_ii)
            if moved < 1e-14:
                break
        dist = float(np.linalg.norm(np.real(np.diag(mat)) - d))
        if dist < best_dist:
            best_dist = dist
            best_u = u.copy()
    return best_dist, best_u


def perturb_to_cover(a, frame: Frame, targets) -> np.ndarray:
    """Finite-rank normal perturbation placing each target on the diagonal.

    R = sum_j (t_j - <f_j, A f_j>) f_j f_j*, so every target is a diagonal
    value of A + R in the frame's orthonormal system and ||R|| is the largest
    needed shift.
    """
    m = as_matrix(a, square=True)
    t = np.asarray(targets, dtype=complex)
    if t.ndim != 1 or frame.rank != len(t):
        raise DimensionMismatch("need exactly one target per frame column")
    if frame.ambient_dim != m.shape[0]:
        raise DimensionMismatch("frame ambient dim does not match the operator")
    q = frame.columns
    current = np.einsum("ij,ij->j", q.conj(), m @ q)
    return (q * (t - current)) @ q.conj().T
