"""Essential-normality diagnostics and the decomposition certificate.

Everything here is finite: commutator blocks are computed up to a degree
cutoff, Schatten sums are partial sums, and decay is summarized by a
log-log fit.  No convergence claim is ever made; the ``consistent`` flag
on a report is a reporting heuristic only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._parallel import map_degrees
from .angles import AngleReport, graded_cosine
from .groebner import buchberger
from .perp import PerpCertificate, projections_commute
from .poly import HomogPoly
from .slices import (
    RANK_TOL,
    GradedSubmodule,
    degree_slice,
    orthonormalize,
    projection,
    same_subspace,
    shift_block,
    tensor,
)

SLOPE_THRESHOLD = -0.25


def _check_contiguous(degrees: Sequence[int]) -> list[int]:
    degrees = list(degrees)
    if not degrees:
        raise ValueError("degree range is empty")
    if degrees != list(range(degrees[0], degrees[0] + len(degrees))):
        raise ValueError("degrees must be contiguous and ascending")
    if degrees[0] < 0:
        raise ValueError("degrees must be non-negative")
    return degrees


def commutator_blocks(
    module: GradedSubmodule,
    i: int,
    degrees: Sequence[int],
    rank_tol: float = RANK_TOL,
    workers: int | None = None,
) -> list[np.ndarray]:
    """Blocks ``B_k = M_i P_{N_k} - P_{N_{k+1}} M_i`` from degree ``k`` to ``k+1``.

    ``i`` is the 1-based variable index.
    """
    degrees = _check_contiguous(degrees)
    d, r = module.dim, module.rank
    slices = {k: degree_slice(module, k, rank_tol) for k in range(degrees[0], degrees[-1] + 2)}

    def one(k: int) -> np.ndarray:
        M = shift_block(d, r, i, k).matrix
        return M @ projection(slices[k]) - projection(slices[k + 1]) @ M

    return map_degrees(one, degrees, workers)


def schatten_partial(blocks: Sequence[np.ndarray], p: float) -> np.ndarray:
    """Cumulative ``sum_{k <= K} sum_j sigma_j(B_k)^{2p}``; ``p = inf`` gives the running max norm."""
    if not p > 0:
        raise ValueError("p must be positive")
    out, acc = [], 0.0
    for B in blocks:
        s = np.linalg.svd(B, compute_uv=False) if B.size else np.zeros(0)
        if np.isinf(p):
            acc = max(acc, float(s[0]) if s.size else 0.0)
        else:
            acc += float(np.sum(s ** (2 * p)))
        out.append(acc)
    return np.array(out)


@dataclass
class SelfCommutatorBlock:
    degree: int
    blocks: dict[tuple[int, int], np.ndarray] = field(repr=False)

    @property
    def norm(self) -> float:
        return max((float(np.linalg.norm(B, 2)) if B.size else 0.0 for B in self.blocks.values()), default=0.0)


def restricted_tuple_selfcommutators(
    module: GradedSubmodule,
    degrees: Sequence[int],
    rank_tol: float = RANK_TOL,
) -> list[SelfCommutatorBlock]:
    """Degree-``k`` blocks of ``S_i^* S_j - S_j S_i^*`` in the slice bases.

    ``S_i`` at degree ``k`` is ``P_{N_{k+1}} M_i P_{N_k}`` written as the
    matrix ``B_{k+1}^* M_i B_k`` between orthonormal slice bases.
    """
    degrees = _check_contiguous(degrees)
    d, r = module.dim, module.rank
    lo, hi = max(degrees[0] - 1, 0), degrees[-1] + 1
    bases = {k: degree_slice(module, k, rank_tol).basis for k in range(lo, hi + 1)}

    def S(i: int, k: int) -> np.ndarray:
        return bases[k + 1].conj().T @ shift_block(d, r, i, k).matrix @ bases[k]

    out = []
    for k in degrees:
        blocks = {}
        for i in range(1, d + 1):
            for j in range(1, d + 1):
                A = S(i, k).conj().T @ S(j, k)
                if k >= 1:
                    A = A - S(j, k - 1) @ S(i, k - 1).conj().T
                blocks[(i, j)] = A
        out.append(SelfCommutatorBlock(k, blocks))
    return out


@dataclass
class DecayFit:
    slope: float
    intercept: float
    residual: float
    points: int

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "residual": self.residual, "points": self.points}


def decay_fit(values: Sequence[float], degrees: Sequence[int] | None = None) -> DecayFit:
    """Least-squares slope of ``log value`` against ``log k`` over the tail half.

    Only entries with ``k > 0`` and a nonzero value are used; ``residual`` is
    the RMS misfit of the fitted line.
    """
    values = np.asarray(values, dtype=float)
    ks = np.arange(1, len(values) + 1) if degrees is None else np.asarray(list(degrees), dtype=float)
    if len(ks) != len(values):
        raise ValueError("values and degrees differ in length")
    keep = (ks > 0) & (values > 0)
    if keep.sum() < 5:
        raise ValueError("insufficient data: need at least 5 nonzero entries")
    x, y = np.log(ks[keep]), np.log(values[keep])
    half = len(x) // 2
    x, y = x[half:], y[half:]
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return DecayFit(float(slope), float(intercept), residual, len(x))


def _tail_decreasing(increments: np.ndarray) -> bool:
    tail = increments[len(increments) // 2:]
    return len(tail) >= 2 and bool(np.all(np.diff(tail) < 0))


@dataclass
class VariableDiagnostics:
    variable: int
    norms: list[float]
    singular_values: list[list[float]]
    partial_sums: list[float]
    fit: DecayFit | None
    increments_decreasing: bool

    def to_dict(self) -> dict:
        return {
            "variable": self.variable,
            "norms": self.norms,
            "partial_sums": self.partial_sums,
            "fit": self.fit.to_dict() if self.fit else None,
            "increments_decreasing": self.increments_decreasing,
        }


@dataclass
class EssNormReport:
    degrees: list[int]
    p: float
    variables: list[VariableDiagnostics]
    selfcommutator_norms: list[float]
    consistent: bool
    warnings: list[str] = field(default_factory=list)

    def per_degree(self) -> list[dict]:
        rows = []
        for idx, k in enumerate(self.degrees):
            row = {"degree": k, "selfcommutator_norm": self.selfcommutator_norms[idx]}
            for v in self.variables:
                row[f"norm_z{v.variable}"] = v.norms[idx]
                row[f"partial_sum_z{v.variable}"] = v.partial_sums[idx]
            rows.append(row)
        return rows

    def to_dict(self) -> dict:
        return {
            "per_degree": self.per_degree(),
            "summary": {
                "p": self.p,
                "variables": [v.to_dict() for v in self.variables],
                "consistent_with_p_essential_normality": self.consistent,
                "heuristic": f"slope < {SLOPE_THRESHOLD} and decreasing tail increments",
            },
        }


def essnorm_report(
    module: GradedSubmodule,
    degrees: Sequence[int],
    p: float | None = None,
    rank_tol: float = RANK_TOL,
    workers: int | None = None,
) -> EssNormReport:
    """Commutator-block norms, Schatten-``2p`` partial sums and decay fits for each variable.

    ``p`` defaults to ``d + 1``.
    """
    degrees = _check_contiguous(degrees)
    p = float(module.dim + 1) if p is None else float(p)
    warnings: list[str] = []
    variables = []
    for i in range(1, module.dim + 1):
        blocks = commutator_blocks(module, i, degrees, rank_tol, workers)
        svals = [np.linalg.svd(B, compute_uv=False) if B.size else np.zeros(0) for B in blocks]
        norms = [float(s[0]) if s.size else 0.0 for s in svals]
        sums = schatten_partial(blocks, p)
        try:
            fit = decay_fit(norms, degrees)
        except ValueError as exc:
            fit = None
            warnings.append(f"z{i}: {exc}")
        increments = np.diff(np.concatenate([[0.0], sums])) if not np.isinf(p) else np.zeros(0)
        variables.append(VariableDiagnostics(i, norms, [s.tolist() for s in svals], sums.tolist(), fit, _tail_decreasing(increments)))
    selfcomm = [b.norm for b in restricted_tuple_selfcommutators(module, degrees, rank_tol)]
    active = [v for v in variables if any(n > 0 for n in v.norms)]
    consistent = all(v.fit is not None and v.fit.slope < SLOPE_THRESHOLD and v.increments_decreasing for v in active)
    return EssNormReport(degrees, p, variables, selfcomm, consistent, warnings)


# ---------------------------------------------------------------------------
# piece classification and the decomposition certificate

def _scalar_generators(module: GradedSubmodule) -> list[HomogPoly] | None:
    if module.rank != 1:
        return None
    out = []
    for g in module.nonzero_generators:
        part = g.single_part()
        if part is None:
            return None
        p, (c,) = part
        out.append(p.scale(c))
    return out


def _classify_scalar(gens: list[HomogPoly]) -> str | None:
    if all(g.is_monomial() for g in gens):
        return "monomial"
    if all(g.degree == 1 for g in gens):
        return "linear"
    if len(gens) == 1:
        return "single-homogeneous"
    support: set[int] = set()
    for g in buchberger(gens):
        support |= g.support()
    if len(support) <= 2:
        return "two-variable"
    return None


def _tensor_factor(module: GradedSubmodule, degrees: Sequence[int], rank_tol: float):
    """Rank-1 module ``N`` and vectors spanning ``V`` with ``module = N (x) V``, if such exist."""
    polys, vectors = [], []
    for g in module.nonzero_generators:
        part = g.single_part()
        if part is None:
            return None
        p, v = part
        polys.append(p)
        vectors.append(v)
    inner = GradedSubmodule.from_polys(polys, label=module.label)
    V = orthonormalize(np.array([[complex(x) for x in v] for v in vectors]).T, rank_tol)
    candidate = tensor(inner, V.T.tolist())
    for k in degrees:
        if not same_subspace(degree_slice(module, k, rank_tol), degree_slice(candidate, k, rank_tol)):
            return None
    return inner, V


def classify_piece(module: GradedSubmodule, degrees: Sequence[int] = range(0, 6), rank_tol: float = RANK_TOL) -> str | None:
    """Structural class of a piece, or ``None`` when no rule applies.

    Classes: ``single-homogeneous``, ``linear``, ``monomial``,
    ``two-variable`` (the reduced Groebner basis uses at most two
    variables) and ``tensor:<class>`` for ``N (x) V`` with ``N`` of rank 1
    in one of the other classes.  The tensor factorization is confirmed on
    ``degrees``.
    """
    gens = _scalar_generators(module)
    if gens is not None:
        return _classify_scalar(gens)
    factor = _tensor_factor(module, degrees, rank_tol)
    if factor is None:
        return None
    inner_class = _classify_scalar(_scalar_generators(factor[0]))
    return None if inner_class is None else f"tensor:{inner_class}"


@dataclass
class DecompCertificate:
    verdict: str
    pieces: list[tuple[str, str | None]]
    min_gap: float | None
    delta: float
    angles: AngleReport | None
    perpendicularity: PerpCertificate | None
    reasons: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "pieces": [{"label": lab, "class": cls} for lab, cls in self.pieces],
            "min_gap": self.min_gap,
            "delta": self.delta,
            "reasons": self.reasons,
            "angles": self.angles.to_dict() if self.angles else None,
            "perpendicularity": self.perpendicularity.to_dict() if self.perpendicularity else None,
        }


def certify_decomposition(
    pieces: Sequence[GradedSubmodule],
    degrees: Sequence[int],
    delta: float = 0.05,
    rank_tol: float = RANK_TOL,
    workers: int | None = None,
) -> DecompCertificate:
    """Certify a sum of classified pieces at a degree cutoff.

    The verdict is ``certified-at-cutoff`` when every piece is classified
    and the smallest eigenvalue of ``sum_i P_i`` on the join stays at or
    above ``delta`` on every swept degree; otherwise ``unclassified-piece``
    or ``gap-too-small``.  Angle and perpendicularity data are attached as
    evidence.
    """
    if not pieces:
        raise ValueError("need at least one piece")
    degrees = list(degrees)
    if not degrees:
        raise ValueError("degree range is empty")
    labels = [m.label or f"N{idx + 1}" for idx, m in enumerate(pieces)]
    classes = [classify_piece(m, degrees, rank_tol) for m in pieces]
    angles = perp = None
    gap: float | None = 1.0
    if len(pieces) >= 2:
        angles = graded_cosine(pieces, degrees, "bgm", rank_tol, workers)
        gap = angles.min_gap
        perp = projections_commute(pieces, degrees, rank_tol=rank_tol, workers=workers)
    reasons = [f"piece {lab} matches no structural rule" for lab, cls in zip(labels, classes) if cls is None]
    if reasons:
        verdict = "unclassified-piece"
    elif gap is not None and gap < delta:
        verdict = "gap-too-small"
        worst = min((r for r in angles.rows if r.lambda_min is not None), key=lambda r: r.lambda_min)
        reasons.append(f"lambda_min {gap:.6g} < delta {delta:g} at degree {worst.degree}")
    else:
        verdict = "certified-at-cutoff"
    return DecompCertificate(verdict, list(zip(labels, classes)), gap, delta, angles, perp, reasons)


def linear_pieces(vectors: Sequence[Sequence[complex]]) -> list[GradedSubmodule]:
    """One principal submodule per linear form ``sum_i c_i z_i``."""
    out = []
    for idx, c in enumerate(vectors):
        d = len(c)
        terms = {tuple(int(i == j) for j in range(d)): x for i, x in enumerate(c) if x != 0}
        out.append(GradedSubmodule.from_polys([HomogPoly.from_terms(d, terms)], label=f"L{idx + 1}"))
    return out
