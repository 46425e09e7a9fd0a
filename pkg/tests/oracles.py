"""Independent reference computations for the test suite.

These rebuild the objects under test from sympy expressions and the
defining inner product ``<z^a, z^b> = delta_ab a!/|a|!`` without touching the
package's slice or operator code.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import sympy as sp


def symbols(d: int):
    return sp.symbols(f"z1:{d + 1}")


def monomials(d: int, k: int) -> list[tuple[int, ...]]:
    return sorted((a for a in itertools.product(range(k + 1), repeat=d) if sum(a) == k), reverse=True)


def weight(alpha) -> sp.Rational:
    return sp.Rational(math.prod(math.factorial(a) for a in alpha), math.factorial(sum(alpha)))


def terms(expr, d: int) -> dict[tuple[int, ...], complex]:
    poly = sp.Poly(sp.expand(expr), *symbols(d))
    return {a: c for a, c in poly.terms() if c != 0}


def inner(f, g, d: int):
    """Exact inner product of two sympy polynomials (linear in ``f``)."""
    tf, tg = terms(f, d), terms(g, d)
    return sp.nsimplify(sum(c * sp.conjugate(tg[a]) * weight(a) for a, c in tf.items() if a in tg))


def vector(expr, d: int, k: int, rank: int = 1, slot: int = 0) -> np.ndarray:
    """Coordinates of ``expr (x) e_slot`` in the normalized slice basis."""
    idx = {a: i for i, a in enumerate(monomials(d, k))}
    v = np.zeros(len(idx) * rank, dtype=complex)
    for a, c in terms(expr, d).items():
        v[idx[a] * rank + slot] = complex(c) * math.sqrt(float(weight(a)))
    return v


def basis_poly(alpha):
    z = symbols(len(alpha))
    return sp.sqrt(sp.Rational(1) / weight(alpha)) * sp.prod([zi**e for zi, e in zip(z, alpha)])


def operator_matrix(expr_times, d: int, k_in: int, k_out: int) -> np.ndarray:
    """Matrix of ``f -> expr_times(f)`` via inner products with the normalized basis."""
    src, dst = monomials(d, k_in), monomials(d, k_out)
    M = np.zeros((len(dst), len(src)), dtype=complex)
    for j, a in enumerate(src):
        image = expr_times(basis_poly(a))
        for i, b in enumerate(dst):
            M[i, j] = complex(inner(image, basis_poly(b), d))
    return M


def multiplication_matrix(p, d: int, k: int) -> np.ndarray:
    m = sp.Poly(p, *symbols(d)).total_degree()
    return operator_matrix(lambda f: sp.expand(p * f), d, k, k + m)


def orth(A: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    if A.size == 0 or A.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(A, full_matrices=False)
    if s[0] == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    return u[:, s > tol * s[0]]


def slice_basis(gens, d: int, k: int, rank: int = 1, vectors=None) -> np.ndarray:
    """Orthonormal basis of the degree-``k`` part of the module generated by ``gens``.

    ``vectors[i]`` is the ``C^rank`` vector attached to ``gens[i]``.
    """
    z = symbols(d)
    vectors = vectors or [[1]] * len(gens)
    cols = []
    for g, vec in zip(gens, vectors):
        m = sp.Poly(g, *z).total_degree()
        if m > k:
            continue
        for b in monomials(d, k - m):
            shifted = sp.expand(g * sp.prod([zi**e for zi, e in zip(z, b)]))
            col = sum(complex(c) * vector(shifted, d, k, rank, j) for j, c in enumerate(vec))
            cols.append(col)
    D = len(monomials(d, k)) * rank
    if not cols:
        return np.zeros((D, 0), dtype=complex)
    return orth(np.array(cols).T)


def cosine_and_gap(families, d: int, k: int) -> tuple[float, float]:
    """``(1 - lambda_min/(n-1), lambda_min)`` from a dense eigendecomposition."""
    Bs = [slice_basis(f, d, k) for f in families]
    J = orth(np.hstack(Bs))
    S = sum(B @ B.conj().T for B in Bs)
    ev = np.linalg.eigvalsh(J.conj().T @ S @ J)
    n = len(families)
    return 1 - ev[0] / (n - 1), ev[0]


def random_family(rng: np.random.Generator, D: int, n: int, max_rank: int | None = None) -> list[np.ndarray]:
    """``n`` random subspaces of ``C^D`` (orthonormal bases), some of them overlapping."""
    max_rank = max_rank or max(1, D // 2)
    out = []
    shared = rng.normal(size=(D, 1)) + 1j * rng.normal(size=(D, 1))
    for _ in range(n):
        r = int(rng.integers(1, max_rank + 1))
        A = rng.normal(size=(D, r)) + 1j * rng.normal(size=(D, r))
        if rng.random() < 0.3:
            A[:, 0] = shared[:, 0]
        out.append(orth(A))
    return out
