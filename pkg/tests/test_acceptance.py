"""Acceptance criteria, one PASS/FAIL line each (``pytest -m acceptance -s``)."""

import math
import time

import numpy as np
import pytest

import oracles
from conftest import module
from dshift.angles import (
    bgm_formula,
    gap_cosine,
    graded_cosine,
    min_gap,
    minimal_division,
    rayleigh_cosine,
    stable_division,
)
from dshift.essnorm import certify_decomposition, commutator_blocks, decay_fit, linear_pieces, schatten_partial
from dshift.perp import arbitrate_guo_wang, commutator_formula_check, projections_commute
from dshift.poly import HomogPoly, enumerate_monomials, parse_poly
from dshift.slices import SubspaceSlice, tensor

pytestmark = pytest.mark.acceptance

# Regression constants from the dense eigendecomposition oracle (tests/oracles.py).
REFINED_DELTA = 1 / 3
DEGRADING_DISTANCE_RATIO = (1 - 0.7071067811865476) / (1 - 0.9627197244)


def test_criterion_1_coordinate_cosine(coordinate_family, verdict):
    start = time.perf_counter()
    reports = {m: graded_cosine(coordinate_family, range(1, 13), m, workers=1) for m in ("bgm", "rayleigh", "gap")}
    elapsed = time.perf_counter() - start
    maxima = {m: r.max_cosine for m, r in reports.items()}
    lambdas = [row.lambda_min for row in reports["bgm"].rows]
    ok = (
        all(abs(v - 0.5) < 1e-9 for v in maxima.values())
        and all(abs(lam - 1.0) < 1e-9 for lam in lambdas)
        and elapsed < 10
    )
    detail = ", ".join(f"{m}={v:.12f}" for m, v in maxima.items())
    assert verdict("criterion 1", ok, f"max cosine {detail}; lambda_min=1 at all degrees; {elapsed:.2f}s")


@pytest.mark.xfail(strict=True, reason="the alternating-projection product vanishes on this family")
def test_criterion_1_borwein_reading(coordinate_family, verdict):
    value = graded_cosine(coordinate_family, range(1, 13), "borwein").max_cosine
    assert verdict("criterion 1 (borwein product)", abs(value - 0.5) < 1e-9, f"max product norm {value:.3g}, expected 0.5")


def test_criterion_2_degrading_pair(degrading_pair, refined_family, verdict):
    cos = graded_cosine(degrading_pair, range(2, 11)).cosines()
    increasing = bool(np.all(np.diff(cos) > 0))
    ratio = (1 - cos[1]) / (1 - cos[-1])
    consts = np.array(stable_division(degrading_pair, range(2, 13)).constants())
    growing = bool(np.all(np.diff(consts) > 0)) and consts[-1] > 10 * consts[1]
    refined = graded_cosine(refined_family, range(4, 11)).max_cosine
    delta = 1 - refined
    ok = (
        increasing
        and ratio >= 3
        and abs(ratio - DEGRADING_DISTANCE_RATIO) < 1e-6
        and growing
        and delta > 0.01
        and abs(delta - REFINED_DELTA) < 1e-9
    )
    detail = (
        f"cosine increasing={increasing}, 1-c shrinks x{ratio:.2f} (deg 3->10), "
        f"C_k {consts[0]:.3g}->{consts[-1]:.4g}, refined delta={delta:.6f}"
    )
    assert verdict("criterion 2", ok, detail)


def _random_homog(rng, d, k):
    monos = enumerate_monomials(d, k)
    coeffs = rng.normal(size=len(monos)) + 1j * rng.normal(size=len(monos))
    return HomogPoly(d, k, dict(zip(monos, coeffs.tolist())))


def test_criterion_3_guo_wang_arbitration(verdict):
    rng = np.random.default_rng(7)
    battery = [
        ("z1, z1", parse_poly("z1", dim=1), parse_poly("z1", dim=1)),
        ("z1z2, z2^2", parse_poly("z1*z2", dim=2), parse_poly("z2^2", dim=2)),
        ("z1^2+z2z3, z2^2", parse_poly("z1^2 + z2*z3", dim=3), parse_poly("z2^2", dim=3)),
        ("random dense (2,3)", _random_homog(rng, 3, 2), _random_homog(rng, 3, 3)),
        ("random dense (3,1)", _random_homog(rng, 3, 3), _random_homog(rng, 3, 1)),
    ]
    parts, ok = [], True
    for name, p, q in battery:
        arb = arbitrate_guo_wang(p, q, 8, 1e-10)
        corrected, paper = arb.checks["corrected"].residual, arb.checks["paper"].residual
        comm = commutator_formula_check(p, q, 8, arb.winner or "corrected").residual
        good = arb.winner == "corrected" and corrected < 1e-10 and paper >= 1e-10 and comm < 1e-9
        ok &= good
        parts.append(f"{name}: winner={arb.winner} res={corrected:.1e} (paper {paper:.2g}) comm={comm:.1e}")
    assert verdict("criterion 3", ok, "; ".join(parts))


def test_criterion_4_perpendicularity_battery(verdict):
    battery = {
        "monomial": [module(3, "z1^2"), module(3, "z1*z2"), module(3, "z3^3")],
        "disjoint": [module(4, "z1^2 + z2^2", "z1*z2"), module(4, "z3*z4 - z3^2")],
        "orthogonal-linear": linear_pieces([[1, 1, 0], [1, -1, 0], [0, 0, 1]]),
    }
    parts, ok = [], True
    for name, fam in battery.items():
        cert = projections_commute(fam, range(1, 11))
        ok &= cert.verdict == "perpendicular" and cert.max_commutator < 1e-10
        parts.append(f"{name} {cert.verdict} ({cert.max_commutator:.1e})")
    r = 1 / math.sqrt(2)
    tilted = linear_pieces([[1, 0], [r, r]])
    cert = projections_commute(tilted, range(1, 11))
    ok &= cert.verdict == "not-perpendicular" and cert.witness is not None and cert.witness.norm > 1e-9
    parts.append(f"tilted pair {cert.verdict}, witness at degree {cert.witness.degree} with norm {cert.witness.norm:.3f}")
    assert verdict("criterion 4", ok, "; ".join(parts))


def test_criterion_5_cross_formulation(verdict):
    worst_gap = worst_const = 0.0
    count = 0
    for seed in range(150):
        rng = np.random.default_rng(seed)
        D, n = int(rng.integers(2, 31)), int(rng.integers(2, 5))
        bases = oracles.random_family(rng, D, n)
        slices = [SubspaceSlice(1, 1, 1, B) for B in bases]
        c = bgm_formula(slices)
        worst_gap = max(worst_gap, abs(c - rayleigh_cosine(slices)), abs(c - gap_cosine(slices)))
        if c < 0.999:
            C = 1 / min_gap(slices)
            sv = np.linalg.svd(np.hstack(bases), compute_uv=False)
            C_svd = 1 / np.min(sv[sv**2 > 1e-12] ** 2)
            worst_const = max(worst_const, abs(C - 1 / ((n - 1) * (1 - c))) / C, abs(C - C_svd) / C)
        count += 1
    ok = count >= 100 and worst_gap < 1e-8 and worst_const < 1e-6
    detail = f"{count} families, max |bgm-rayleigh| {worst_gap:.1e}, max rel C error {worst_const:.1e}"
    assert verdict("criterion 5", ok, detail)


def test_criterion_6_minimal_split(verdict):
    w = minimal_division([module(2, "z1"), module(2, "z2")], parse_poly("z1*z2"))
    halves = [complex(part.coefficient_vectors()[(1, 1)][0]) for part in w.parts]
    ok = abs(w.ratio - 0.5) < 1e-10 and all(abs(h - 0.5) < 1e-10 for h in halves)
    assert verdict("criterion 6", ok, f"parts {halves[0].real:.12f} z1z2, {halves[1].real:.12f} z1z2, ratio {w.ratio:.15f}")


def _dense_z1_commutator(K):
    """Dense M_1 P - P M_1 for <z1> in two variables on degrees 0..K+1, from monomial weights."""
    sizes = [k + 1 for k in range(K + 2)]
    offs = np.concatenate([[0], np.cumsum(sizes)])
    M = np.zeros((offs[-1], offs[-1]))
    P = np.zeros_like(M)
    for k in range(K + 2):
        for j, a in enumerate(oracles.monomials(2, k)):
            P[offs[k] + j, offs[k] + j] = float(a[0] >= 1)
            if k <= K:
                b = (a[0] + 1, a[1])
                row = offs[k + 1] + oracles.monomials(2, k + 1).index(b)
                M[row, offs[k] + j] = math.sqrt(float(oracles.weight(b) / oracles.weight(a)))
    return M @ P - P @ M, offs


def test_criterion_7_essnorm_principal(verdict):
    K = 40
    m = module(2, "z1")
    blocks = commutator_blocks(m, 1, range(0, K + 1))
    norms = [float(np.linalg.norm(B, 2)) for B in blocks]
    slope = decay_fit(norms, range(0, K + 1)).slope
    inc = np.diff(np.concatenate([[0.0], schatten_partial(blocks, 3)]))
    tail = inc[len(inc) // 2:]
    decreasing = bool(np.all(np.diff(tail) < 0))
    dense, offs = _dense_z1_commutator(K)
    err = max(
        float(np.max(np.abs(B - dense[offs[k + 1]:offs[k + 2], offs[k]:offs[k + 1]]))) for k, B in enumerate(blocks)
    )
    ok = slope < 0 and decreasing and err < 1e-12
    assert verdict("criterion 7", ok, f"slope {slope:.3f}, tail increments decreasing={decreasing}, dense mismatch {err:.1e}")


def test_criterion_8_certification(verdict):
    families = {
        "monomial": [module(3, "z1^2"), module(3, "z1*z2"), module(3, "z3^2")],
        "orthogonal-linear": linear_pieces([[1, 1, 0], [1, -1, 0], [0, 0, 1]]),
        "disjoint two-variable": [module(4, "z1^2 + z2^2", "z1*z2"), module(4, "z3^3 - z4^3")],
        "closing example": [module(4, "z1^2 + z1*z2 + z2^2"), module(4, "z3^2 + z3*z4 + z4^2")],
        "tensored rank 2": [tensor(module(2, "z1^2"), [[1, 0]]), tensor(module(2, "z2"), [[1, 1]])],
    }
    start = time.perf_counter()
    parts, ok = [], True
    for name, pieces in families.items():
        cert = certify_decomposition(pieces, range(1, 11), 0.05)
        ok &= cert.verdict == "certified-at-cutoff"
        parts.append(f"{name} {cert.verdict} (gap {cert.min_gap:.4f})")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 120
    assert verdict("criterion 8", ok, "; ".join(parts) + f"; {elapsed:.1f}s")
