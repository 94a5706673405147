"""Property-check suites behind the CLI `check` verb and the acceptance tests.

Each criterion function returns (passed, detail).  Oracles are independent
of the code paths they check: analytic eigenvalue formulas for shift hosts,
direct multiplication for conjugations, and a random-conjugation witness
search for the majorization test.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import dilation, essrange, numrange, pinching
from .linalg import Frame


def shift_host(n: int, scale: float = 1.0) -> np.ndarray:
    return scale * np.diag(np.ones(n - 1, dtype=complex), 1)


def random_matrix(rng: np.random.Generator, d: int) -> np.ndarray:
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def random_contraction(rng: np.random.Generator, d: int, norm: float) -> np.ndarray:
    g = random_matrix(rng, d)
    return g * (norm / np.linalg.norm(g, 2))


def check_walsh_suite() -> tuple[bool, str]:
    """Criterion 1: Walsh orthogonality for k = 1..8 and exact block equalization."""
    worst_orth = 0.0
    for k in range(1, 9):
        v = pinching.walsh_matrix(k)
        worst_orth = max(
            worst_orth, float(np.linalg.norm(v @ v.T - np.eye(2**k), 2))
        )
    if worst_orth > 1e-12:
        return False, f"walsh orthogonality defect {worst_orth:.3e} > 1e-12"
    rng = np.random.default_rng(101)
    worst_mean = 0.0
    for k in range(1, 6):
        blocks = [random_matrix(rng, 4) for _ in range(2**k)]
        conj, _ = pinching.equalize_blocks(blocks)
        mean = sum(blocks) / 2**k
        for j in range(2**k):
            blk = conj[4 * j : 4 * (j + 1), 4 * j : 4 * (j + 1)]
            worst_mean = max(worst_mean, float(np.max(np.abs(blk - mean))))
    if worst_mean > 1e-10:
        return False, f"equalized diagonal block deviates {worst_mean:.3e} > 1e-10"
    return True, (
        f"orthogonality defect {worst_orth:.1e}, block-mean deviation {worst_mean:.1e}"
    )


def check_parker_suite() -> tuple[bool, str]:
    """Criterion 2: 50 random 64x64 matrices equalize to Tr/64 with spectra intact."""
    rng = np.random.default_rng(202)
    worst_diag = 0.0
    worst_eig = 0.0
    for _ in range(50):
        a = random_matrix(rng, 64)
        b, u = pinching.parker_equalize(a)
        mean = np.trace(a) / 64.0
        worst_diag = max(worst_diag, float(np.max(np.abs(np.diag(b) - mean))))
        ev_a = np.sort_complex(np.linalg.eigvals(a))
        ev_b = np.sort_complex(np.linalg.eigvals(b))
        worst_eig = max(worst_eig, float(np.max(np.abs(ev_a - ev_b))))
    if worst_diag > 1e-9:
        return False, f"diagonal deviation {worst_diag:.3e} > 1e-9"
    if worst_eig > 1e-8:
        return False, f"eigenvalue drift {worst_eig:.3e} > 1e-8"
    return True, f"diagonal deviation {worst_diag:.1e}, eigenvalue drift {worst_eig:.1e}"


def check_dilation_suite() -> tuple[bool, str]:
    """Criterion 3: 200 random strict contractions dilate unitarily and normally."""
    rng = np.random.default_rng(303)
    worst_u = worst_block = worst_norm = 0.0
    for i in range(200):
        d = 1 + i % 8
        x = (
            np.zeros((d, d), dtype=complex)
            if i % 25 == 0
            else random_contraction(rng, d, rng.uniform(0.02, 0.88))
        )
        res = dilation.halmos_dilation(x, 0.9)
        u, nmat = res.unitary, res.normal
        worst_u = max(worst_u, float(np.linalg.norm(u.conj().T @ u - np.eye(2 * d), 2)))
        worst_block = max(worst_block, float(np.linalg.norm(nmat[:d, :d] - x, 2)))
        worst_norm = max(
            worst_norm,
            float(np.linalg.norm(nmat.conj().T @ nmat - nmat @ nmat.conj().T, 2)),
        )
    if worst_u > 1e-10:
        return False, f"unitarity defect {worst_u:.3e} > 1e-10"
    if worst_block > 1e-12:
        return False, f"corner block error {worst_block:.3e} > 1e-12"
    if worst_norm > 1e-10:
        return False, f"normality defect {worst_norm:.3e} > 1e-10"
    return True, (
        f"unitarity {worst_u:.1e}, corner {worst_block:.1e}, normality {worst_norm:.1e}"
    )


def check_shift_numerical_radius() -> tuple[bool, str]:
    """Criterion 4: max support of truncated shifts matches the tridiagonal oracle."""
    worst = 0.0
    for n in (3, 10, 100):
        a = shift_host(n)
        hull = numrange.numerical_range_hull(a, 360)
        computed = float(np.max(hull.supports))
        # Oracle: eigenvalues of the real part, a tridiagonal matrix whose
        # spectrum is cos(k pi / (n+1)) in closed form.
        tridiag = 0.5 * (a + a.conj().T)
        oracle = float(np.linalg.eigvalsh(tridiag)[-1])
        closed_form = math.cos(math.pi / (n + 1))
        if abs(oracle - closed_form) > 1e-12:
            return False, f"oracle self-check failed at dim {n}"
        worst = max(worst, abs(computed - oracle))
    if worst > 1e-6:
        return False, f"numerical radius error {worst:.3e} > 1e-6"
    return True, f"worst radius error {worst:.1e} over dims 3, 10, 100"


def check_value_realization() -> tuple[bool, str]:
    """Criterion 5: 500 realizations of strict convex combinations of boundary points."""
    rng = np.random.default_rng(505)
    worst_norm = 0.0
    worst_resid = 0.0
    done = 0
    attempts = 0
    while done < 500:
        attempts += 1
        if attempts > 3000:
            return False, f"exhausted retries after {done} realizations"
        d = 2 + (done % 11)
        a = random_matrix(rng, d)
        hull = numrange.numerical_range_hull(a, 64)
        ks = rng.choice(hull.sample_count, size=3, replace=False)
        w = rng.uniform(0.15, 1.0, size=3)
        w /= w.sum()
        value = complex(np.sum(w * hull.points[ks]))
        try:
            h = numrange.realize_value(a, value, hull=hull)
        except numrange.ValueOutsideRange:
            continue  # combination landed too close to the boundary; redraw
        worst_norm = max(worst_norm, abs(float(np.linalg.norm(h)) - 1.0))
        worst_resid = max(worst_resid, abs(complex(np.vdot(h, a @ h)) - value))
        done += 1
    if worst_norm > 1e-12:
        return False, f"vector norm error {worst_norm:.3e} > 1e-12"
    if worst_resid > 1e-8:
        return False, f"realization residual {worst_resid:.3e} > 1e-8"
    return True, f"norm error {worst_norm:.1e}, residual {worst_resid:.1e} over 500 cases"


def check_isometry_realization() -> tuple[bool, str]:
    """Criterion 6: 50 targets of dim <= 4 realized inside shift(128) at rho = 0.9."""
    rng = np.random.default_rng(606)
    host = shift_host(128)
    worst_resid = 0.0
    worst_orth = 0.0
    for i in range(50):
        d = 1 + i % 4
        x = random_contraction(rng, d, rng.uniform(0.1, 0.8))
        v = dilation.isometry_realize(host, x, 0.9, n_angles=32)
        q = v.columns
        worst_resid = max(
            worst_resid, float(np.linalg.norm(q.conj().T @ host @ q - x, 2))
        )
        worst_orth = max(worst_orth, v.orthonormality_defect())
    if worst_resid > 1e-8:
        return False, f"compression residual {worst_resid:.3e} > 1e-8"
    if worst_orth > 1e-10:
        return False, f"isometry defect {worst_orth:.3e} > 1e-10"
    return True, f"residual {worst_resid:.1e}, isometry defect {worst_orth:.1e}"


def _theorem1_targets(rng: np.random.Generator) -> list[np.ndarray]:
    ang = np.pi / 3
    rot = 0.5 * np.array(
        [[math.cos(ang), -math.sin(ang)], [math.sin(ang), math.cos(ang)]],
        dtype=complex,
    )
    jordan = 0.4 * np.diag(np.ones(2, dtype=complex), 1)
    return [
        np.array([[0.3]], dtype=complex),
        rot,
        jordan,
        random_contraction(rng, 4, 0.6),
        random_contraction(rng, 6, 0.7),
        random_contraction(rng, 8, 0.8),
    ]


def check_pinch_fast() -> tuple[bool, str]:
    """Criterion 7: six targets on shift(512), fast mode, with the stacked check."""
    rng = np.random.default_rng(707)
    host = shift_host(512)
    targets = _theorem1_targets(rng)
    cert = pinching.pinch(host, targets, 0.9, mode="fast")
    if cert.orthogonality > 1e-10:
        return False, f"frame orthogonality {cert.orthogonality:.3e} > 1e-10"
    if cert.max_residual() > 1e-7:
        return False, f"block residual {cert.max_residual():.3e} > 1e-7"
    stacked = Frame(np.column_stack([f.columns for f in cert.frames]))
    big = stacked.columns.conj().T @ host @ stacked.columns
    pos = 0
    worst_block = 0.0
    for t in targets:
        d = t.shape[0]
        worst_block = max(
            worst_block,
            float(np.linalg.norm(big[pos : pos + d, pos : pos + d] - t, 2)),
        )
        pos += d
    if worst_block > 1e-7:
        return False, f"stacked diagonal block error {worst_block:.3e} > 1e-7"
    return True, (
        f"max residual {cert.max_residual():.1e}, orthogonality "
        f"{cert.orthogonality:.1e}, stacked block error {worst_block:.1e}"
    )


def check_pinch_mass() -> tuple[bool, str]:
    """Criterion 8: faithful mode on shift(512) meets the 2^(-l/2) mass bound."""
    rng = np.random.default_rng(808)
    host = shift_host(512)
    targets = [
        np.array([[0.3]], dtype=complex),
        random_contraction(rng, 2, 0.35),
        np.diag([0.2, 0.2]).astype(complex),
    ]
    cert = pinching.pinch(host, targets, 0.8, mode="faithful", gamma=1.0)
    if cert.orthogonality > 1e-10:
        return False, f"frame orthogonality {cert.orthogonality:.3e} > 1e-10"
    if cert.max_residual() > 1e-7:
        return False, f"block residual {cert.max_residual():.3e} > 1e-7"
    margins = []
    for mb in cert.mass_bounds:
        if mb is None:
            return False, "faithful mode left a target without a mass bound"
        claimed, measured = mb
        margins.append(measured - claimed)
        if measured < claimed - 1e-8:
            return False, f"mass {measured:.6f} below claimed {claimed:.6f} - 1e-8"
    return True, (
        f"max residual {cert.max_residual():.1e}, worst mass slack {min(margins):.2e}"
    )


def check_essential_range_surrogate() -> tuple[bool, str]:
    """Criterion 9: shift(1000) removals 0..50 hit cos(pi/951); doubling improves."""
    spec = essrange.HostSpec(kind="truncated_unilateral_shift", dim=1000)
    est = essrange.essential_range_estimate(spec, 50, 8)
    oracle = math.cos(math.pi / 951)
    err = float(np.max(np.abs(est.intersection_support - oracle)))
    if err > 1e-9:
        return False, f"intersection support error {err:.3e} > 1e-9"
    spec2 = essrange.HostSpec(kind="truncated_unilateral_shift", dim=2000)
    est2 = essrange.essential_range_estimate(spec2, 50, 8)
    lo, hi = est.min_intersection_support(), est2.min_intersection_support()
    if not (lo < hi < 1.0):
        return False, f"doubling did not increase the estimate toward 1 ({lo} vs {hi})"
    return True, f"error {err:.1e} at dim 1000; doubling moves {lo:.8f} -> {hi:.8f}"


def check_schur_horn_diagnostic() -> tuple[bool, str]:
    """Criterion 10: majorization test versus the random-conjugation witness search."""
    rng = np.random.default_rng(1010)
    for n in range(1, 5):
        for trial in range(12):
            lam = np.sort(rng.uniform(-1.0, 1.0, size=n))[::-1]
            g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            u, _ = np.linalg.qr(g)
            d = np.real(np.diag((u * lam) @ u.conj().T))
            res = numrange.schur_horn_feasible(lam, d)
            if not res.feasible:
                return False, f"feasible case misclassified at n={n}, trial {trial}"
            dist, _ = numrange.schur_horn_witness_search(
                lam, d, restarts=6, seed=trial
            )
            if dist > 1e-6:
                return False, f"witness search stalled at {dist:.3e} for n={n}"
            if n >= 2:
                # Engineered infeasible case: inflate the largest entry past
                # the top eigenvalue while preserving the total sum.
                excess = (lam[0] - np.max(d)) + 0.1
                bad = d.copy()
                i_max, i_min = int(np.argmax(d)), int(np.argmin(d))
                bad[i_max] += excess
                bad[i_min] -= excess
                res_bad = numrange.schur_horn_feasible(lam, bad)
                if res_bad.feasible or res_bad.witness is None:
                    return False, f"infeasible case accepted at n={n}"
                k = res_bad.witness
                viol = np.sum(np.sort(bad)[::-1][:k]) - np.sum(np.sort(lam)[::-1][:k])
                if k < n and viol <= 0:
                    return False, f"witness prefix {k} does not actually violate"
                dist_bad, _ = numrange.schur_horn_witness_search(
                    lam, bad, restarts=4, seed=trial
                )
                if k < n:
                    # Any reachable diagonal keeps prefix sums dominated, so
                    # the search can never get closer than the prefix excess.
                    bound = viol / math.sqrt(k)
                    if dist_bad < bound - 1e-9:
                        return False, (
                            f"search beat the majorization distance bound: "
                            f"{dist_bad:.3e} < {bound:.3e}"
                        )
    spectrum = [1.0, 1.0, 0.0, 0.0]
    diag_seq = [1.0 - 1.0 / n**2 for n in range(1, 5)]
    res = numrange.schur_horn_feasible(spectrum, diag_seq)
    if res.feasible or res.witness != 4:
        return False, "halving-projection counterexample not rejected by sum mismatch"
    if abs(res.diagonal_sum - 2.576389) > 1e-6 or abs(res.spectrum_sum - 2.0) > 1e-12:
        return False, (
            f"counterexample sums {res.diagonal_sum} vs {res.spectrum_sum} unexpected"
        )
    return True, (
        f"search agreement on dims 1..4; counterexample rejected with sums "
        f"{res.diagonal_sum:.6f} vs {res.spectrum_sum:.0f}"
    )


def check_pinch_normal() -> tuple[bool, str]:
    """Criterion 11: three normal targets on shift(128) via direct diagonalization."""
    rng = np.random.default_rng(1111)
    g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    w, _ = np.linalg.qr(g)
    rotated_normal = w @ np.diag([0.8, -0.3j]) @ w.conj().T
    targets = [
        np.diag([0.5j, -0.5]).astype(complex),
        np.array([[0.3]], dtype=complex),
        rotated_normal,
    ]
    cert = pinching.pinch_normal(shift_host(128), targets, 0.9)
    if cert.max_residual() > 1e-8:
        return False, f"block residual {cert.max_residual():.3e} > 1e-8"
    if cert.orthogonality > 1e-10:
        return False, f"frame orthogonality {cert.orthogonality:.3e} > 1e-10"
    return True, (
        f"max residual {cert.max_residual():.1e}, orthogonality {cert.orthogonality:.1e}"
    )


@dataclass(frozen=True)
class CheckResult:
    criterion: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (
            f"[{tag}] criterion {self.criterion:2d} ({self.name}): "
            f"{self.detail} [{self.seconds:.1f}s]"
        )


CRITERIA = {
    1: ("walsh", check_walsh_suite),
    2: ("parker", check_parker_suite),
    3: ("dilation", check_dilation_suite),
    4: ("shift numerical radius", check_shift_numerical_radius),
    5: ("value realization", check_value_realization),
    6: ("isometry realization", check_isometry_realization),
    7: ("pinch fast", check_pinch_fast),
    8: ("pinch mass bound", check_pinch_mass),
    9: ("essential range surrogate", check_essential_range_surrogate),
    10: ("schur-horn diagnostic", check_schur_horn_diagnostic),
    11: ("pinch normal", check_pinch_normal),
}

SUITES = {
    "walsh": (1,),
    "parker": (2,),
    "dilation": (3, 6),
    "numrange": (4, 5, 9, 10),
    "pinch": (7, 8, 11),
    "all": tuple(range(1, 12)),
}


def run_criterion(k: int) -> CheckResult:
    name, fn = CRITERIA[k]
    t0 = time.perf_counter()
    passed, detail = fn()
    dt = time.perf_counter() - t0
    return CheckResult(criterion=k, name=name, passed=passed, detail=detail, seconds=dt)


def run_suite(suite: str) -> list[CheckResult]:
    if suite not in SUITES:
        raise KeyError(f"unknown suite '{suite}'; choose from {sorted(SUITES)}")
    return [run_criterion(k) for k in SUITES[suite]]
