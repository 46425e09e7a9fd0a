"""Degree slices of graded submodules of ``rH_d^2``.

The degree-``k`` part of ``rH_d^2`` is realised as ``C^{D_k}`` with
``D_k = r * C(k+d-1, d-1)``, using the orthonormal basis
``e_alpha (x) e_j`` where ``e_alpha = sqrt(|alpha|!/alpha!) z^alpha``.
Monomials run in graded-lex order (``z_1^k`` first) and the vector index
``j`` varies fastest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .poly import (
    HomogPoly,
    MultiIndex,
    Number,
    VectorPoly,
    as_vector,
    enumerate_monomials,
    monomial_positions,
    normalizing_factor,
)

RANK_TOL = 1e-10


def ambient_dim(d: int, r: int, k: int) -> int:
    return r * math.comb(k + d - 1, d - 1) if k >= 0 else 0


@dataclass(frozen=True, eq=False)
class GradedSubmodule:
    """Submodule of ``rH_d^2`` generated by homogeneous vector polynomials."""

    dim: int
    rank: int
    generators: tuple[VectorPoly, ...]
    label: str = ""

    def __post_init__(self):
        gens = tuple(as_vector(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens or all(g.is_zero() for g in gens):
            raise ValueError("a submodule needs at least one nonzero generator")
        for g in gens:
            if g.dim != self.dim:
                raise ValueError(f"generator in {g.dim} variables, module has {self.dim}")
            if g.rank != self.rank:
                raise ValueError(f"generator of rank {g.rank}, module has rank {self.rank}")

    @classmethod
    def from_polys(cls, polys: Iterable[HomogPoly], label: str = "") -> "GradedSubmodule":
        polys = list(polys)
        return cls(polys[0].dim, 1, tuple(VectorPoly.from_poly(p) for p in polys), label)

    @property
    def nonzero_generators(self) -> list[VectorPoly]:
        return [g for g in self.generators if not g.is_zero()]

    @property
    def min_degree(self) -> int:
        return min(g.degree for g in self.nonzero_generators)

    def __repr__(self) -> str:
        return f"GradedSubmodule({self.label or '?'}: d={self.dim}, r={self.rank}, {len(self.generators)} generators)"


@dataclass(frozen=True, eq=False)
class SubspaceSlice:
    """Orthonormal basis (columns) of a subspace of the degree-``k`` slice."""

    degree: int
    dim: int
    vector_rank: int
    basis: np.ndarray = field(repr=False)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def is_empty(self) -> bool:
        return self.rank == 0

    def projection(self) -> np.ndarray:
        return projection(self)


@dataclass(frozen=True)
class ShiftBlock:
    """Matrix of ``M_{z_i}`` from degree ``k`` to degree ``k+1`` (``i`` 1-based)."""

    variable: int
    degree: int
    matrix: np.ndarray = field(repr=False)


# ---------------------------------------------------------------------------
# coordinates

def coordinates(p: HomogPoly | VectorPoly, r: int | None = None) -> np.ndarray:
    """Coordinates of a homogeneous element in the normalized slice basis."""
    v = as_vector(p)
    if r is not None and v.rank != r:
        raise ValueError(f"rank {v.rank} element, expected rank {r}")
    d, r, k = v.dim, v.rank, v.degree
    pos = monomial_positions(d, k)
    x = np.zeros(ambient_dim(d, r, k), dtype=complex)
    for alpha, vec in v.coefficient_vectors().items():
        s = normalizing_factor(alpha)
        base = pos[alpha] * r
        for j, c in enumerate(vec):
            x[base + j] = complex(c) * s
    return x


def from_coordinates(x: np.ndarray, d: int, r: int, k: int) -> VectorPoly:
    """Inverse of :func:`coordinates`; entries that are exactly zero are dropped."""
    monos = enumerate_monomials(d, k)
    x = np.asarray(x)
    if x.shape != (len(monos) * r,):
        raise ValueError("coordinate vector has the wrong length")
    parts = []
    for j in range(r):
        terms = {}
        for idx, alpha in enumerate(monos):
            c = x[idx * r + j]
            if c != 0:
                terms[alpha] = complex(c) / normalizing_factor(alpha)
        unit = tuple(1 if t == j else 0 for t in range(r))
        parts.append((HomogPoly(d, k, terms), unit))
    return VectorPoly(parts, rank=r)


def orthonormalize(A: np.ndarray, rank_tol: float = RANK_TOL, atol: float | None = None) -> np.ndarray:
    """Orthonormal basis of ``range(A)``.

    Singular values below ``rank_tol * sigma_max`` count as zero, or below
    ``atol`` when given (use this when ``A`` is a residual that may be pure
    rounding noise).
    """
    A = np.asarray(A, dtype=complex)
    if A.size == 0 or A.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(A, full_matrices=False)
    if s[0] == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    cutoff = atol if atol is not None else rank_tol * s[0]
    return u[:, s > cutoff]


def null_space(A: np.ndarray, rank_tol: float = RANK_TOL, atol: float | None = None) -> np.ndarray:
    """Orthonormal basis of ``ker(A)``."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    cutoff = atol if atol is not None else rank_tol * max(s[0] if s.size else 0.0, 1.0)
    r = int(np.sum(s > cutoff))
    return vh[r:].conj().T


# ---------------------------------------------------------------------------
# slices

def generator_matrix(module: GradedSubmodule, k: int) -> np.ndarray:
    """Columns are the coordinates of ``z^beta g`` spanning the degree-``k`` slice."""
    d, r = module.dim, module.rank
    D = ambient_dim(d, r, k)
    cols = []
    pos = monomial_positions(d, k)
    for g in module.nonzero_generators:
        m = g.degree
        if m > k:
            continue
        coeffs = g.coefficient_vectors()
        for beta in enumerate_monomials(d, k - m):
            col = np.zeros(D, dtype=complex)
            for alpha, vec in coeffs.items():
                gamma = alpha.plus(beta)
                base = pos[gamma] * r
                s = normalizing_factor(gamma)
                for j, c in enumerate(vec):
                    if c != 0:
                        col[base + j] += complex(c) * s
            cols.append(col)
    if not cols:
        return np.zeros((D, 0), dtype=complex)
    return np.column_stack(cols)


def degree_slice(module: GradedSubmodule, k: int, rank_tol: float = RANK_TOL) -> SubspaceSlice:
    """Degree-``k`` component ``N_k`` of the submodule as an orthonormal basis."""
    if k < 0:
        raise ValueError("degree must be non-negative")
    basis = orthonormalize(generator_matrix(module, k), rank_tol)
    return SubspaceSlice(k, module.dim, module.rank, basis)


def full_slice(d: int, r: int, k: int) -> SubspaceSlice:
    return SubspaceSlice(k, d, r, np.eye(ambient_dim(d, r, k), dtype=complex))


def empty_slice(d: int, r: int, k: int) -> SubspaceSlice:
    return SubspaceSlice(k, d, r, np.zeros((ambient_dim(d, r, k), 0), dtype=complex))


def span_slice(vectors: Sequence[HomogPoly | VectorPoly], k: int | None = None, rank_tol: float = RANK_TOL) -> SubspaceSlice:
    """Slice spanned by explicit homogeneous elements of one degree."""
    vecs = [as_vector(v) for v in vectors]
    if not vecs:
        raise ValueError("need at least one vector")
    d, r = vecs[0].dim, vecs[0].rank
    k = vecs[0].degree if k is None else k
    cols = [coordinates(v) for v in vecs if not v.is_zero()]
    if any(v.degree != k for v in vecs if not v.is_zero()):
        raise ValueError("all vectors must have the slice degree")
    A = np.column_stack(cols) if cols else np.zeros((ambient_dim(d, r, k), 0))
    return SubspaceSlice(k, d, r, orthonormalize(A, rank_tol))


def projection(s: SubspaceSlice) -> np.ndarray:
    """Orthogonal projection ``B B^*`` onto the slice."""
    B = s.basis
    return B @ B.conj().T


def _same_ambient(s: SubspaceSlice, t: SubspaceSlice) -> None:
    if s.degree != t.degree:
        raise ValueError(f"degree mismatch: {s.degree} vs {t.degree}")
    if s.ambient_dim != t.ambient_dim:
        raise ValueError(f"ambient mismatch: {s.ambient_dim} vs {t.ambient_dim}")


def _like(s: SubspaceSlice, basis: np.ndarray) -> SubspaceSlice:
    return SubspaceSlice(s.degree, s.dim, s.vector_rank, basis)


def join(s: SubspaceSlice, *others: SubspaceSlice, rank_tol: float = RANK_TOL) -> SubspaceSlice:
    """Span of the union."""
    for t in others:
        _same_ambient(s, t)
    return _like(s, orthonormalize(np.hstack([s.basis] + [t.basis for t in others]), rank_tol))


def complement(s: SubspaceSlice, rank_tol: float = RANK_TOL) -> SubspaceSlice:
    """Orthogonal complement in the full degree slice."""
    if s.rank == 0:
        return _like(s, np.eye(s.ambient_dim, dtype=complex))
    return _like(s, null_space(s.basis.conj().T, rank_tol))


def meet(s: SubspaceSlice, *others: SubspaceSlice, rank_tol: float = RANK_TOL) -> SubspaceSlice:
    """Intersection, as the common kernel of the complementary projections."""
    result = s
    for t in others:
        _same_ambient(s, t)
        if result.rank == 0 or t.rank == 0:
            result = _like(s, np.zeros((s.ambient_dim, 0), dtype=complex))
            continue
        # x = B_s a lies in t iff (I - P_t) B_s a = 0
        residual = result.basis - t.basis @ (t.basis.conj().T @ result.basis)
        coeffs = null_space(residual, atol=rank_tol)
        result = _like(s, orthonormalize(result.basis @ coeffs, rank_tol))
    return result


def complement_within(s: SubspaceSlice, ambient: SubspaceSlice | None = None, rank_tol: float = RANK_TOL) -> SubspaceSlice:
    """``ambient`` intersected with the orthogonal complement of ``s``."""
    comp = complement(s, rank_tol)
    if ambient is None:
        return comp
    return meet(ambient, comp, rank_tol=rank_tol)


def same_subspace(s: SubspaceSlice, t: SubspaceSlice, tol: float = 1e-8) -> bool:
    _same_ambient(s, t)
    if s.rank != t.rank:
        return False
    return float(np.linalg.norm(projection(s) - projection(t), 2)) <= tol


# ---------------------------------------------------------------------------
# shift and multiplication operators

def shift_block(d: int, r: int, i: int, k: int) -> ShiftBlock:
    """``M_{z_i}`` from degree ``k`` to ``k+1``: ``e_alpha -> sqrt((alpha_i+1)/(k+1)) e_{alpha+e_i}``."""
    if not 1 <= i <= d:
        raise ValueError(f"variable index {i} outside 1..{d}")
    src = enumerate_monomials(d, k)
    dst = monomial_positions(d, k + 1)
    M = np.zeros((ambient_dim(d, r, k + 1), ambient_dim(d, r, k)))
    unit = MultiIndex.unit(d, i - 1)
    for col, alpha in enumerate(src):
        row = dst[alpha.plus(unit)]
        w = math.sqrt((alpha[i - 1] + 1) / (k + 1))
        for j in range(r):
            M[row * r + j, col * r + j] = w
    return ShiftBlock(i, k, M)


def multiplication_block(p: HomogPoly, k: int, r: int = 1) -> np.ndarray:
    """Matrix of ``M_p (x) I_r`` from degree ``k`` to degree ``k + deg p``."""
    d, m = p.dim, p.degree
    src = enumerate_monomials(d, k)
    dst = monomial_positions(d, k + m)
    M = np.zeros((ambient_dim(d, r, k + m), ambient_dim(d, r, k)), dtype=complex)
    for col, beta in enumerate(src):
        inv = 1.0 / normalizing_factor(beta)
        for alpha, c in p.terms.items():
            gamma = alpha.plus(beta)
            val = complex(c) * normalizing_factor(gamma) * inv
            row = dst[gamma]
            for j in range(r):
                M[row * r + j, col * r + j] += val
    return M


def tensor(module: GradedSubmodule, vectors: Sequence[Sequence[Number]], label: str | None = None) -> GradedSubmodule:
    """``N (x) V`` for a rank-1 module ``N`` and ``V = span(vectors)`` in ``C^r``."""
    if module.rank != 1:
        raise ValueError("tensor expects a rank-1 module")
    V = np.array([[complex(x) for x in v] for v in vectors], dtype=complex).T
    if V.size == 0:
        raise ValueError("the subspace of C^r is zero")
    basis = orthonormalize(V)
    if basis.shape[1] == 0:
        raise ValueError("the subspace of C^r is zero")
    r = basis.shape[0]
    gens = []
    for g in module.nonzero_generators:
        p = g.parts[0][0] if len(g.parts) == 1 else _scalar_part(g)
        for col in basis.T:
            gens.append(VectorPoly([(p, tuple(_clean(c) for c in col))], rank=r))
    if label is None:
        label = f"{module.label}(x)V" if module.label else ""
    name = label
    return GradedSubmodule(module.dim, r, tuple(gens), name)


def _scalar_part(g: VectorPoly) -> HomogPoly:
    coeffs = g.coefficient_vectors()
    return HomogPoly(g.dim, g.degree, {a: v[0] for a, v in coeffs.items()})


def _clean(c: complex) -> Number:
    c = complex(c)
    return c.real if c.imag == 0 else c
