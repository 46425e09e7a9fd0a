"""Cosines between families of graded submodules, computed degree by degree.

All submodules here are graded, so every projection is block diagonal over
degrees and a global cosine is the supremum of the per-degree cosines.  The
functions below only ever see finitely many degrees and report the sweep;
they never claim the supremum over all degrees.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._parallel import map_degrees
from .poly import HomogPoly, VectorPoly, as_vector
from .slices import (
    RANK_TOL,
    GradedSubmodule,
    SubspaceSlice,
    coordinates,
    degree_slice,
    from_coordinates,
    join,
    meet,
    orthonormalize,
    projection,
    same_subspace,
)

EIG_FLOOR = 1e-12
METHODS = ("bgm", "rayleigh", "gap", "borwein", "friedrichs")
METHOD_TAGS = {
    "bgm": "bgm-formula",
    "rayleigh": "rayleigh",
    "gap": "eigen-gap",
    "borwein": "borwein",
    "friedrichs": "friedrichs-pair",
}


def _opnorm(A: np.ndarray) -> float:
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def family_slices(modules: Sequence[GradedSubmodule], k: int, rank_tol: float = RANK_TOL) -> list[SubspaceSlice]:
    return [degree_slice(m, k, rank_tol) for m in modules]


def join_of(slices: Sequence[SubspaceSlice], rank_tol: float = RANK_TOL) -> SubspaceSlice:
    return join(slices[0], *slices[1:], rank_tol=rank_tol)


def gap_spectrum(slices: Sequence[SubspaceSlice], join_slice: SubspaceSlice | None = None) -> np.ndarray:
    """Eigenvalues of ``sum_i P_i`` restricted to the join, ascending."""
    J = (join_slice or join_of(slices)).basis
    if J.shape[1] == 0:
        return np.zeros(0)
    S = sum(projection(s) for s in slices)
    H = J.conj().T @ S @ J
    return np.linalg.eigvalsh((H + H.conj().T) / 2)


def min_gap(slices: Sequence[SubspaceSlice], join_slice: SubspaceSlice | None = None, floor: float = EIG_FLOOR) -> float | None:
    """Smallest eigenvalue above ``floor`` of ``sum_i P_i`` on the join (``None`` if the join is 0)."""
    ev = gap_spectrum(slices, join_slice)
    ev = ev[ev > floor]
    return float(ev[0]) if ev.size else None


def friedrichs_pair(s: SubspaceSlice, t: SubspaceSlice, rank_tol: float = RANK_TOL) -> float:
    """Friedrichs cosine ``||P_s P_t - P_{s meet t}||``."""
    if s.rank == 0 or t.rank == 0:
        return 0.0
    m = meet(s, t, rank_tol=rank_tol)
    return _opnorm(projection(s) @ projection(t) - projection(m))


def bgm_formula(slices: Sequence[SubspaceSlice], join_slice: SubspaceSlice | None = None, rank_tol: float = RANK_TOL) -> float:
    """``n/(n-1) ||(1/n) sum P_i - P_N|| - 1/(n-1)``, returned raw (may be negative)."""
    n = len(slices)
    if n < 2:
        raise ValueError("cosine undefined for a single submodule")
    lattice_join = join_of(slices, rank_tol)
    if join_slice is None:
        join_slice = lattice_join
    elif not same_subspace(join_slice, lattice_join):
        raise ValueError("the supplied join is not the span of the slices")
    avg = sum(projection(s) for s in slices) / n
    return n / (n - 1) * _opnorm(avg - projection(join_slice)) - 1 / (n - 1)


def rayleigh_cosine(slices: Sequence[SubspaceSlice], rank_tol: float = RANK_TOL) -> float:
    """Largest value of ``(1/(n-1)) sum_{i != j} <x_i, x_j> / sum ||x_i||^2``
    over ``x_i`` in ``N_i^perp`` within the join.

    The quadratic form is assembled as a block matrix on the direct sum of
    the ranges ``ran Q_i`` (zero diagonal blocks) and its top eigenvalue is
    taken directly.
    """
    n = len(slices)
    if n < 2:
        raise ValueError("cosine undefined for a single submodule")
    J = join_of(slices, rank_tol).basis
    bases = []
    for s in slices:
        # J has orthonormal columns, so an absolute cutoff separates noise from range
        W = orthonormalize(J - s.basis @ (s.basis.conj().T @ J), atol=rank_tol)
        bases.append(W)
    sizes = [W.shape[1] for W in bases]
    total = sum(sizes)
    if total == 0:
        return 0.0
    A = np.zeros((total, total), dtype=complex)
    offsets = np.cumsum([0] + sizes)
    for i in range(n):
        for j in range(n):
            if i == j or sizes[i] == 0 or sizes[j] == 0:
                continue
            A[offsets[i]:offsets[i + 1], offsets[j]:offsets[j + 1]] = bases[i].conj().T @ bases[j]
    lam = float(np.linalg.eigvalsh((A + A.conj().T) / 2)[-1])
    return lam / (n - 1)


def borwein_product(slices: Sequence[SubspaceSlice], rank_tol: float = RANK_TOL) -> float:
    """``||P_{N_1^perp} ... P_{N_n^perp} P_N||`` with the product in the given order."""
    if not slices:
        raise ValueError("need at least one slice")
    J = join_of(slices, rank_tol)
    X = projection(J)
    D = X.shape[0]
    for s in reversed(slices):
        X = (np.eye(D) - projection(s)) @ X
    return _opnorm(X)


def gap_cosine(slices: Sequence[SubspaceSlice], rank_tol: float = RANK_TOL) -> float:
    """Cosine from the spectral gap: ``1 - lambda_min / (n - 1)``."""
    n = len(slices)
    if n < 2:
        raise ValueError("cosine undefined for a single submodule")
    ev = gap_spectrum(slices, join_of(slices, rank_tol))
    if ev.size == 0:
        return -1 / (n - 1)
    return 1 - float(ev[0]) / (n - 1)


def cosine(slices: Sequence[SubspaceSlice], method: str = "bgm", rank_tol: float = RANK_TOL) -> float:
    if method == "bgm":
        return bgm_formula(slices, rank_tol=rank_tol)
    if method == "rayleigh":
        return rayleigh_cosine(slices, rank_tol)
    if method == "gap":
        return gap_cosine(slices, rank_tol)
    if method == "borwein":
        return borwein_product(slices, rank_tol)
    if method == "friedrichs":
        if len(slices) != 2:
            raise ValueError("the Friedrichs cosine needs exactly two submodules")
        return friedrichs_pair(slices[0], slices[1], rank_tol)
    raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


# ---------------------------------------------------------------------------
# degree sweeps

@dataclass
class DegreeAngle:
    degree: int
    cosine: float
    lambda_min: float | None
    ranks: tuple[int, ...]
    join_rank: int
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "cosine": self.cosine,
            "lambda_min": self.lambda_min,
            "join_rank": self.join_rank,
            "ranks": list(self.ranks),
            "flags": list(self.flags),
        }


@dataclass
class AngleReport:
    method: str
    rows: list[DegreeAngle]
    max_cosine: float
    argmax_degree: int | None
    trend: str
    min_gap: float | None

    @property
    def tag(self) -> str:
        return METHOD_TAGS[self.method]

    def cosines(self) -> np.ndarray:
        return np.array([r.cosine for r in self.rows])

    def to_dict(self) -> dict:
        return {
            "per_degree": [r.to_dict() for r in self.rows],
            "summary": {
                "method": self.tag,
                "max_cosine": self.max_cosine,
                "argmax_degree": self.argmax_degree,
                "trend": self.trend,
                "min_lambda": self.min_gap,
            },
        }


def _trend(values: Sequence[float], tol: float = 1e-9) -> str:
    if len(values) < 2:
        return "constant"
    diffs = np.diff(values)
    if np.all(np.abs(diffs) <= tol):
        return "constant"
    if np.all(diffs > tol):
        return "increasing"
    if np.all(diffs < -tol):
        return "decreasing"
    if np.all(diffs >= -tol):
        return "non-decreasing"
    if np.all(diffs <= tol):
        return "non-increasing"
    return "mixed"


def _check_family(modules: Sequence[GradedSubmodule]) -> None:
    if len(modules) < 2:
        raise ValueError("need at least two submodules")
    d, r = modules[0].dim, modules[0].rank
    for m in modules:
        if (m.dim, m.rank) != (d, r):
            raise ValueError("all submodules must share d and r")


def degree_angle(modules: Sequence[GradedSubmodule], k: int, method: str = "bgm", rank_tol: float = RANK_TOL) -> DegreeAngle:
    slices = family_slices(modules, k, rank_tol)
    J = join_of(slices, rank_tol)
    ranks = tuple(s.rank for s in slices)
    if J.rank == 0:
        return DegreeAngle(k, 0.0, None, ranks, 0, ("empty-join",))
    flags = []
    value = cosine(slices, method, rank_tol)
    if method in ("bgm", "gap") and value < -1e-12:
        flags.append("degenerate")
    return DegreeAngle(k, value, min_gap(slices, J), ranks, J.rank, tuple(flags))


def graded_cosine(
    modules: Sequence[GradedSubmodule],
    degrees: Sequence[int],
    method: str = "bgm",
    rank_tol: float = RANK_TOL,
    workers: int | None = None,
) -> AngleReport:
    """Per-degree cosine of a family over a degree sweep.

    Degrees whose join is zero report cosine 0 and carry the flag
    ``empty-join``.  ``lambda_min`` is the smallest eigenvalue of
    ``sum_i P_i`` on the join slice.
    """
    _check_family(modules)
    degrees = list(degrees)
    if not degrees:
        raise ValueError("degree range is empty")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    rows = map_degrees(lambda k: degree_angle(modules, k, method, rank_tol), degrees, workers)
    live = [r for r in rows if r.join_rank > 0]
    if live:
        max_cos = max(r.cosine for r in live)
        # first degree reaching the maximum, ignoring rounding-level differences
        argmax = next(r.degree for r in live if r.cosine >= max_cos - 1e-12)
        gaps = [r.lambda_min for r in live if r.lambda_min is not None]
        gap = min(gaps) if gaps else None
    else:
        max_cos, argmax, gap = 0.0, None, None
    return AngleReport(method, rows, max_cos, argmax, _trend([r.cosine for r in live]), gap)


@dataclass
class PairwiseReduction:
    holds: bool
    delta: float
    max_pair_cosine: float
    per_degree: list[tuple[int, list[float]]]
    note: str = "pair cosines below 1 imply the family cosine is below 1; the converse is not claimed"

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "delta": self.delta,
            "max_pair_cosine": self.max_pair_cosine,
            "per_degree": [{"degree": k, "pair_cosines": v} for k, v in self.per_degree],
            "note": self.note,
        }


def pairwise_reduction_check(
    modules: Sequence[GradedSubmodule],
    degrees: Sequence[int],
    delta: float = 0.05,
    rank_tol: float = RANK_TOL,
    workers: int | None = None,
) -> PairwiseReduction:
    """Friedrichs cosine of each running join ``N_1 v ... v N_{k-1}`` against ``N_k``.

    ``holds`` is true when every pair cosine stays at or below ``1 - delta``
    across the sweep.
    """
    _check_family(modules)

    def one(k: int) -> tuple[int, list[float]]:
        slices = family_slices(modules, k, rank_tol)
        running = slices[0]
        values = []
        for s in slices[1:]:
            values.append(friedrichs_pair(running, s, rank_tol))
            running = join(running, s, rank_tol=rank_tol)
        return k, values

    per_degree = map_degrees(one, list(degrees), workers)
    worst = max((max(v) for _, v in per_degree if v), default=0.0)
    return PairwiseReduction(worst <= 1 - delta, delta, worst, per_degree)


# ---------------------------------------------------------------------------
# stable division

class NotInJoinError(ValueError):
    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"target does not lie in the join (relative residual {residual:.3e})")


@dataclass
class DivisionWitness:
    target: VectorPoly
    parts: list[VectorPoly]
    ratio: float
    residual: float

    def to_dict(self) -> dict:
        from .poly import format_poly

        def fmt(v: VectorPoly) -> list:
            return [[format_poly(p), [complex(x) for x in vec]] for p, vec in v.parts]

        return {
            "target": fmt(self.target),
            "ratio": self.ratio,
            "residual": self.residual,
            "parts": [fmt(p) for p in self.parts],
        }


@dataclass
class StableDivReport:
    rows: list[dict]
    sup_constant: float | None
    witness: DivisionWitness | None = None

    def constants(self) -> list[float | None]:
        return [r["constant"] for r in self.rows]

    def to_dict(self) -> dict:
        return {
            "per_degree": self.rows,
            "summary": {
                "sup_constant": self.sup_constant,
                "witness": self.witness.to_dict() if self.witness else None,
            },
        }


def minimal_division(modules: Sequence[GradedSubmodule], target: HomogPoly | VectorPoly, rank_tol: float = RANK_TOL, member_tol: float = 1e-8) -> DivisionWitness:
    """Minimal-norm ``p = p_1 + ... + p_n`` with ``p_i`` in ``N_i``.

    Uses the minimum-norm least-squares solution of the stacked slice-basis
    map; because each basis is orthonormal, ``||p_i||`` equals the norm of
    its coefficient block.
    """
    target = as_vector(target)
    k = target.degree
    x = coordinates(target)
    xnorm = float(np.linalg.norm(x))
    if xnorm == 0:
        raise ValueError("target is zero")
    slices = family_slices(modules, k, rank_tol)
    T = np.hstack([s.basis for s in slices])
    if T.shape[1] == 0:
        raise NotInJoinError(1.0)
    c, *_ = np.linalg.lstsq(T, x, rcond=rank_tol)
    residual = float(np.linalg.norm(x - T @ c)) / xnorm
    if residual > member_tol:
        raise NotInJoinError(residual)
    parts, sq = [], 0.0
    offset = 0
    for s in slices:
        ci = c[offset:offset + s.rank]
        offset += s.rank
        y = s.basis @ ci
        sq += float(np.vdot(y, y).real)
        parts.append(from_coordinates(np.where(np.abs(y) > 1e-15, y, 0), target.dim, target.rank, k))
    return DivisionWitness(target, parts, sq / xnorm**2, residual)


def stable_division(
    modules: Sequence[GradedSubmodule],
    degrees: Sequence[int],
    target: HomogPoly | VectorPoly | None = None,
    rank_tol: float = RANK_TOL,
    workers: int | None = None,
) -> StableDivReport:
    """Per-degree stable-division constants ``C_k = 1 / lambda_min``.

    ``lambda_min`` is the smallest nonzero eigenvalue of ``sum_i P_i`` on
    the join slice, i.e. ``||S^{-1}||^{-2}`` for the summation map ``S``.
    """
    if not modules:
        raise ValueError("need at least one submodule")

    def one(k: int) -> dict:
        slices = family_slices(modules, k, rank_tol)
        J = join_of(slices, rank_tol)
        lam = min_gap(slices, J)
        return {
            "degree": k,
            "constant": None if lam is None else 1.0 / lam,
            "lambda_min": lam,
            "join_rank": J.rank,
        }

    rows = map_degrees(one, list(degrees), workers)
    consts = [r["constant"] for r in rows if r["constant"] is not None]
    witness = minimal_division(modules, target, rank_tol) if target is not None else None
    return StableDivReport(rows, max(consts) if consts else None, witness)
