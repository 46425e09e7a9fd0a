"""Perpendicularity of families of submodules.

A family is perpendicular when its orthogonal projections pairwise commute.
Besides the direct test this module carries the sufficient criteria built on
frame operators ``sum_j M_{p_j} M_{p_j}^*`` and the Guo-Wang expansion of
``M_p^* M_q``, plus the cheap syntactic rules (linear, monomial, disjoint
variables, derivative and gradient orthogonality).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from ._parallel import map_degrees
from .poly import (
    HomogPoly,
    MultiIndex,
    VectorPoly,
    da_inner,
    da_norm,
    enumerate_monomials,
    multiply_adjoint,
    partial,
)
from .slices import (
    RANK_TOL,
    GradedSubmodule,
    coordinates,
    degree_slice,
    from_coordinates,
    multiplication_block,
    orthonormalize,
    projection,
)

COMM_TOL = 1e-10
HYSTERESIS = 10.0
VARIANTS = ("paper", "corrected")


@dataclass
class Witness:
    degree: int
    pair: tuple[int, int]
    norm: float
    vector: VectorPoly

    def to_dict(self) -> dict:
        from .poly import format_poly

        return {
            "degree": self.degree,
            "pair": list(self.pair),
            "norm": self.norm,
            "vector": [[format_poly(p), [complex(x) for x in v]] for p, v in self.vector.parts],
        }


@dataclass
class PerpCertificate:
    """Outcome of a perpendicularity check.

    ``per_degree`` holds the largest commutator norm seen at each degree
    (empty for purely syntactic criteria).
    """

    verdict: str
    criterion: str
    per_degree: list[tuple[int, float]] = field(default_factory=list)
    witness: Witness | None = None
    tol: float = COMM_TOL
    notes: tuple[str, ...] = ()

    @property
    def max_commutator(self) -> float:
        return max((v for _, v in self.per_degree), default=0.0)

    @property
    def is_perpendicular(self) -> bool:
        return self.verdict == "perpendicular"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "criterion": self.criterion,
            "tolerance": self.tol,
            "per_degree": [{"degree": k, "max_commutator": v} for k, v in self.per_degree],
            "max_commutator": self.max_commutator,
            "witness": self.witness.to_dict() if self.witness else None,
            "notes": list(self.notes),
        }


def _verdict(norm: float, tol: float) -> str:
    if norm < tol:
        return "perpendicular"
    if norm > HYSTERESIS * tol:
        return "not-perpendicular"
    return "inconclusive"


def _commutator_sweep(blocks_at, count: int, degrees: Sequence[int], workers: int | None):
    """Per degree, the largest ``||A_i A_j - A_j A_i||`` and its top singular pair."""

    def one(k: int):
        mats = blocks_at(k)
        best = (0.0, (0, 1), None)
        for i, j in combinations(range(count), 2):
            C = mats[i] @ mats[j] - mats[j] @ mats[i]
            if C.size == 0:
                continue
            _, s, vh = np.linalg.svd(C)
            if s[0] > best[0]:
                best = (float(s[0]), (i, j), vh[0].conj())
        return k, best

    return map_degrees(one, list(degrees), workers)


def projections_commute(
    modules: Sequence[GradedSubmodule],
    degrees: Sequence[int],
    tol: float = COMM_TOL,
    rank_tol: float = RANK_TOL,
    workers: int | None = None,
) -> PerpCertificate:
    """Definitive check (up to the degree cutoff): do the projections commute?"""
    if len(modules) < 2:
        raise ValueError("need at least two submodules")
    d, r = modules[0].dim, modules[0].rank
    rows = _commutator_sweep(
        lambda k: [projection(degree_slice(m, k, rank_tol)) for m in modules], len(modules), degrees, workers
    )
    per_degree = [(k, b[0]) for k, b in rows]
    worst_k, worst = max(rows, key=lambda kb: kb[1][0])
    verdict = _verdict(worst[0], tol)
    witness = None
    if verdict == "not-perpendicular":
        witness = Witness(worst_k, worst[1], worst[0], from_coordinates(worst[2], d, r, worst_k))
    return PerpCertificate(verdict, "projections", per_degree, witness, tol)


def _frame_block(gens: Sequence[HomogPoly], k: int) -> np.ndarray:
    d = gens[0].dim
    D = math.comb(k + d - 1, d - 1)
    G = np.zeros((D, D), dtype=complex)
    for p in gens:
        if p.degree <= k:
            B = multiplication_block(p, k - p.degree)
            G += B @ B.conj().T
    return G


def _as_scalar_family(family) -> list[HomogPoly]:
    if isinstance(family, GradedSubmodule):
        if family.rank != 1:
            raise ValueError("the frame-operator criterion is stated for rank-1 modules")
        out = []
        for g in family.nonzero_generators:
            part = g.single_part()
            if part is None:
                raise ValueError("rank-1 generator expected")
            p, (c,) = part
            out.append(p.scale(c))
        return out
    return [p for p in family if not p.is_zero()]


def frame_operators_commute(
    families: Sequence,
    degrees: Sequence[int],
    tol: float = COMM_TOL,
    workers: int | None = None,
) -> PerpCertificate:
    """Sufficient test: pairwise commuting ``G_i = sum_j M_{p_ij} M_{p_ij}^*``.

    A pass certifies perpendicularity; a failure is only ``inconclusive``.
    ``families`` holds rank-1 modules or lists of generators.
    """
    gens = [_as_scalar_family(f) for f in families]
    if len(gens) < 2:
        raise ValueError("need at least two families")
    rows = _commutator_sweep(lambda k: [_frame_block(g, k) for g in gens], len(gens), degrees, workers)
    per_degree = [(k, b[0]) for k, b in rows]
    worst = max(v for _, v in per_degree)
    verdict = "perpendicular" if worst < tol else "inconclusive"
    return PerpCertificate(verdict, "frame-operators", per_degree, None, tol)


# ---------------------------------------------------------------------------
# Guo-Wang expansion

def _fact(n: int) -> int | None:
    return math.factorial(n) if n >= 0 else None


@dataclass(frozen=True)
class BracketFn:
    """Scalar ``[f(N)]`` attached to one term of the Guo-Wang expansion.

    ``kind='guo-wang'`` is ``K!(K+m-n)! / ((K+m)!(K-n +/- |alpha|)!)`` at the
    output degree ``K``; ``kind='commutator'`` is
    ``(K-m)!(K-n)! / (K!(K-m-n +/- |alpha|)!)``.  ``variant='paper'`` takes
    the minus sign, ``'corrected'`` the plus sign.  Any factorial of a
    negative integer makes the value 0.
    """

    m: int
    n: int
    alpha_deg: int
    variant: str = "corrected"
    kind: str = "guo-wang"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.kind not in ("guo-wang", "commutator"):
            raise ValueError(f"unknown bracket kind {self.kind!r}")

    def __call__(self, K: int) -> Fraction:
        m, n = self.m, self.n
        a = self.alpha_deg if self.variant == "corrected" else -self.alpha_deg
        if self.kind == "guo-wang":
            num = (_fact(K), _fact(K + m - n))
            den = (_fact(K + m), _fact(K - n + a))
        else:
            num = (_fact(K - m), _fact(K - n))
            den = (_fact(K), _fact(K - m - n + a))
        if None in num or None in den:
            return Fraction(0)
        return Fraction(num[0] * num[1], den[0] * den[1])


def _alphas(d: int, top: int):
    for j in range(top + 1):
        yield from enumerate_monomials(d, j)


def guo_wang_apply(p: HomogPoly, q: HomogPoly, f: HomogPoly, variant: str = "corrected") -> HomogPoly:
    """Right-hand side of the Guo-Wang expansion of ``M_p^* M_q`` applied to ``f``.

    Result has degree ``deg f - deg p + deg q`` (zero polynomial of degree 0
    when that would be negative).
    """
    if not (p.dim == q.dim == f.dim):
        raise ValueError("p, q and f must share the number of variables")
    m, n, d = p.degree, q.degree, p.dim
    K = f.degree - m + n
    out = HomogPoly.zero(d, max(K, 0))
    if K < 0:
        return out
    for alpha in _alphas(d, min(m, n)):
        dp, dq = partial(p, alpha), partial(q, alpha)
        if dp.is_zero() or dq.is_zero():
            continue
        c = BracketFn(m, n, alpha.degree, variant)(K)
        if c == 0:
            continue
        inner = multiply_adjoint(dp, f)
        if inner.is_zero():
            continue
        out = out + (dq * inner).scale(c / alpha.factorial())
    return out


def _basis_polys(d: int, k: int) -> list[HomogPoly]:
    D = math.comb(k + d - 1, d - 1)
    return [from_coordinates(np.eye(D)[:, j], d, 1, k).single_part()[0] for j in range(D)]


@dataclass
class IdentityCheck:
    variant: str
    residual: float
    lhs_norm: float
    per_degree: list[tuple[int, float]]

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "residual": self.residual,
            "lhs_norm": self.lhs_norm,
            "per_degree": [{"degree": k, "residual": v} for k, v in self.per_degree],
        }


def verify_guo_wang(p: HomogPoly, q: HomogPoly, max_degree: int, variant: str = "corrected") -> IdentityCheck:
    """Compare the expansion against ``(block of M_p)^* (block of M_q)``.

    Every normalized monomial ``f`` of degree ``k`` with
    ``0 <= k + deg q - deg p`` and ``k + deg q <= max_degree`` is tested.
    """
    m, n, d = p.degree, q.degree, p.dim
    if max_degree < m + n:
        raise ValueError(f"max_degree must be at least deg p + deg q = {m + n}")
    rows, lhs_norm = [], 0.0
    for k in range(0, max_degree - n + 1):
        K = k + n - m
        if K < 0:
            continue
        lhs = multiplication_block(p, K).conj().T @ multiplication_block(q, k)
        lhs_norm = max(lhs_norm, float(np.linalg.norm(lhs, 2)) if lhs.size else 0.0)
        err = 0.0
        for j, f in enumerate(_basis_polys(d, k)):
            rhs = coordinates(guo_wang_apply(p, q, f, variant))
            err = max(err, float(np.linalg.norm(lhs[:, j] - rhs)))
        rows.append((k, err))
    return IdentityCheck(variant, max(e for _, e in rows), lhs_norm, rows)


def _commutator_rhs(p: HomogPoly, q: HomogPoly, f: HomogPoly, variant: str) -> HomogPoly:
    m, n, d, K = p.degree, q.degree, p.dim, f.degree
    out = HomogPoly.zero(d, K)
    for alpha in _alphas(d, min(m, n)):
        if alpha.degree == 0:
            continue
        dp, dq = partial(p, alpha), partial(q, alpha)
        if dp.is_zero() or dq.is_zero():
            continue
        c = BracketFn(m, n, alpha.degree, variant, kind="commutator")(K)
        if c == 0:
            continue
        t1 = p * (dq * multiply_adjoint(dp, multiply_adjoint(q, f)))
        t2 = q * (dp * multiply_adjoint(dq, multiply_adjoint(p, f)))
        diff = t1 - t2
        if diff.is_zero():
            continue
        out = out + diff.scale(c / alpha.factorial())
    return out


def _gram(p: HomogPoly, K: int) -> np.ndarray:
    """Block of ``M_p M_p^*`` on degree ``K``."""
    d = p.dim
    if K < p.degree:
        D = math.comb(K + d - 1, d - 1)
        return np.zeros((D, D), dtype=complex)
    B = multiplication_block(p, K - p.degree)
    return B @ B.conj().T


def commutator_formula_check(p: HomogPoly, q: HomogPoly, max_degree: int, variant: str = "corrected") -> IdentityCheck:
    """Check the expansion of ``[M_p M_p^*, M_q M_q^*]`` degree by degree."""
    d = p.dim
    rows, lhs_norm = [], 0.0
    for K in range(0, max_degree + 1):
        Gp, Gq = _gram(p, K), _gram(q, K)
        lhs = Gp @ Gq - Gq @ Gp
        lhs_norm = max(lhs_norm, float(np.linalg.norm(lhs, 2)))
        err = 0.0
        for j, f in enumerate(_basis_polys(d, K)):
            rhs = coordinates(_commutator_rhs(p, q, f, variant))
            err = max(err, float(np.linalg.norm(lhs[:, j] - rhs)))
        rows.append((K, err))
    return IdentityCheck(variant, max(e for _, e in rows), lhs_norm, rows)


@dataclass
class Arbitration:
    winner: str | None
    checks: dict[str, IdentityCheck]
    threshold: float

    def to_dict(self) -> dict:
        return {
            "winner": self.winner,
            "threshold": self.threshold,
            "variants": {v: c.to_dict() for v, c in self.checks.items()},
        }


def arbitrate_guo_wang(p: HomogPoly, q: HomogPoly, max_degree: int, threshold: float = 1e-10) -> Arbitration:
    """Run both bracket variants; the winner is the unique one under ``threshold``.

    When both pass (the expansion has no ``alpha != 0`` terms with a
    distinguishing bracket) or neither does, ``winner`` is ``None``.
    """
    checks = {v: verify_guo_wang(p, q, max_degree, v) for v in VARIANTS}
    passing = [v for v, c in checks.items() if c.residual < threshold]
    return Arbitration(passing[0] if len(passing) == 1 else None, checks, threshold)


# ---------------------------------------------------------------------------
# pairwise commutation of frame operators

def _colinear(p: HomogPoly, q: HomogPoly, tol: float) -> bool:
    return abs(abs(da_inner(p, q)) - da_norm(p) * da_norm(q)) <= tol * max(1.0, da_norm(p) * da_norm(q))


@dataclass
class PairCommutation:
    commute: bool | None
    direct_norm: float
    per_alpha_selfadjoint: bool
    linear_rule: bool | None
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "commute": self.commute,
            "direct_norm": self.direct_norm,
            "per_alpha_selfadjoint": self.per_alpha_selfadjoint,
            "linear_rule": self.linear_rule,
            "notes": list(self.notes),
        }


def _term_block(p: HomogPoly, q: HomogPoly, alpha: MultiIndex, K: int) -> np.ndarray | None:
    """Block on degree ``K`` of ``M_p M_{d^a q} M_{d^a p}^* M_q^*``."""
    m, n = p.degree, q.degree
    low = K - m - n + alpha.degree
    if low < 0 or K < n:
        return None
    dp, dq = partial(p, alpha), partial(q, alpha)
    return (
        multiplication_block(p, K - m)
        @ multiplication_block(dq, low)
        @ multiplication_block(dp, low).conj().T
        @ multiplication_block(q, K - n).conj().T
    )


def pair_commutes(p: HomogPoly, q: HomogPoly, degrees: Sequence[int], tol: float = COMM_TOL) -> PairCommutation:
    """Do ``M_p M_p^*`` and ``M_q M_q^*`` commute on the swept degrees?

    Three tiers are evaluated: the direct commutator (decides the answer up to
    the cutoff), per-``alpha`` self-adjointness of the expansion terms (a
    sufficient condition), and for two linear polynomials the rule
    "colinear or orthogonal".
    """
    direct = 0.0
    selfadj = True
    alphas = [a for a in _alphas(p.dim, min(p.degree, q.degree)) if a.degree > 0
              and not partial(p, a).is_zero() and not partial(q, a).is_zero()]
    for K in degrees:
        Gp, Gq = _gram(p, K), _gram(q, K)
        C = Gp @ Gq - Gq @ Gp
        direct = max(direct, float(np.linalg.norm(C, 2)))
        for a in alphas:
            T = _term_block(p, q, a, K)
            if T is not None and np.linalg.norm(T - T.conj().T, 2) >= tol:
                selfadj = False
    linear = None
    if p.degree == 1 and q.degree == 1:
        linear = _colinear(p, q, tol) or abs(da_inner(p, q)) <= tol
    if direct < tol:
        commute = True
    elif direct > HYSTERESIS * tol:
        commute = False
    else:
        commute = None
    notes = []
    if linear is not None and commute is not None and linear != commute:
        notes.append("linear rule disagrees with the direct commutator")
    if selfadj and commute is False:
        notes.append("per-alpha terms self-adjoint yet the commutator is nonzero")
    return PairCommutation(commute, direct, selfadj, linear, tuple(notes))


# ---------------------------------------------------------------------------
# syntactic criteria

def _families(families) -> list[list[HomogPoly]]:
    return [_as_scalar_family(f) for f in families]


def _pairwise(values: list, test) -> dict[tuple[int, int], bool]:
    return {(i, j): test(values[i], values[j]) for i, j in combinations(range(len(values)), 2)}


def derivative_orthogonality(families: Sequence, tol: float = COMM_TOL) -> dict[tuple[int, int], bool]:
    """Are the linear partials ``d^a p`` (``|a| = deg p - 1``) of different families orthogonal?"""
    sets = []
    for fam in _families(families):
        linear = []
        for p in fam:
            if p.degree < 1:
                raise ValueError("constant generators have no linear partials")
            for a in enumerate_monomials(p.dim, p.degree - 1):
                dp = partial(p, a)
                if not dp.is_zero():
                    linear.append(dp)
        sets.append(linear)

    def orth(A, B):
        return all(abs(da_inner(x, y)) <= tol * max(1.0, da_norm(x) * da_norm(y)) for x in A for y in B)

    return _pairwise(sets, orth)


def gradient_span(p: HomogPoly) -> np.ndarray:
    """Orthonormal basis of ``span{grad p(z)}`` in ``C^d``.

    Row ``beta`` of the coefficient matrix holds the coefficient of ``z^beta``
    in each of ``d_1 p, ..., d_d p``; the span of the gradient values is the
    span of these rows.
    """
    d = p.dim
    rows: dict[MultiIndex, np.ndarray] = {}
    for i in range(d):
        for beta, c in partial(p, MultiIndex.unit(d, i)).terms.items():
            rows.setdefault(beta, np.zeros(d, dtype=complex))[i] = c
    if not rows:
        return np.zeros((d, 0), dtype=complex)
    return orthonormalize(np.array(list(rows.values())).T)


def gradient_orthogonality(families: Sequence, tol: float = COMM_TOL) -> dict[tuple[int, int], bool]:
    """Are the gradient ranges of different families mutually orthogonal in ``C^d``?"""
    spans = []
    for fam in _families(families):
        mats = [gradient_span(p) for p in fam]
        spans.append(orthonormalize(np.hstack(mats)) if mats else None)

    def orth(A, B):
        if A is None or B is None or A.size == 0 or B.size == 0:
            return True
        return float(np.linalg.norm(A.conj().T @ B, 2)) <= tol

    return _pairwise(spans, orth)


def _variable_sets(family: list[HomogPoly]) -> frozenset[int]:
    out: set[int] = set()
    for p in family:
        out |= p.support()
    return frozenset(out)


def syntactic_criterion(families: Sequence, tol: float = COMM_TOL) -> str | None:
    """Name of a syntactic rule that certifies perpendicularity, if any applies.

    The rules assume rank-1 families with one generator each for the linear
    and monomial cases, where the frame operators are the projections'
    building blocks.
    """
    fams = _families(families)
    if any(len(f) != 1 for f in fams):
        supports = [_variable_sets(f) for f in fams]
        if all(not (a & b) for a, b in combinations(supports, 2)):
            return "disjoint-vars"
        return None
    gens = [f[0] for f in fams]
    if all(g.is_monomial() for g in gens):
        return "monomial-rule"
    if all(g.degree == 1 for g in gens):
        ok = all(_colinear(a, b, tol) or abs(da_inner(a, b)) <= tol for a, b in combinations(gens, 2))
        return "linear-rule" if ok else None
    supports = [g.support() for g in gens]
    if all(not (a & b) for a, b in combinations(supports, 2)):
        return "disjoint-vars"
    return None


def certify_perpendicular(
    modules: Sequence[GradedSubmodule],
    degrees: Sequence[int],
    tol: float = COMM_TOL,
    rank_tol: float = RANK_TOL,
    workers: int | None = None,
) -> PerpCertificate:
    """Auto-selected perpendicularity certificate.

    The direct projection test always runs; when it certifies and the family
    also matches a syntactic rule, the rule is named as the criterion and the
    projection sweep is kept as numeric evidence.
    """
    cert = projections_commute(modules, degrees, tol, rank_tol, workers)
    if not cert.is_perpendicular or any(m.rank != 1 for m in modules):
        return cert
    rule = syntactic_criterion(modules, tol)
    if rule is None:
        return cert
    return PerpCertificate(cert.verdict, rule, cert.per_degree, None, tol, ("confirmed by commuting projections",))
