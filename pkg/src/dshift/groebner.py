"""Buchberger's algorithm for small homogeneous ideals.

Coefficients are converted to exact Gaussian rationals before any
elimination (floats convert exactly through ``Fraction``), so cancellation in
S-polynomials is never approximate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .poly import HomogPoly, MultiIndex, Number


class _QI:
    """Exact element of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re: Fraction, im: Fraction = Fraction(0)):
        self.re = re
        self.im = im

    @classmethod
    def of(cls, c: Number) -> "_QI":
        if isinstance(c, complex):
            return cls(Fraction(c.real), Fraction(c.imag))
        return cls(Fraction(c))

    def __add__(self, o):
        return _QI(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return _QI(self.re - o.re, self.im - o.im)

    def __mul__(self, o):
        return _QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __truediv__(self, o):
        den = o.re * o.re + o.im * o.im
        return _QI((self.re * o.re + self.im * o.im) / den, (self.im * o.re - self.re * o.im) / den)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def value(self) -> Number:
        if self.im == 0:
            return self.re.numerator if self.re.denominator == 1 else self.re
        return complex(float(self.re), float(self.im))


@dataclass(frozen=True)
class MonomialOrder:
    """Monomial order ``kind`` in {'grlex', 'lex'} on permuted variables.

    ``priority`` lists 0-based variable indices from most to least
    significant; ``None`` means ``z1 > z2 > ... > zd``.
    """

    kind: str = "grlex"
    priority: tuple[int, ...] | None = None

    def __post_init__(self):
        aliases = {"graded-lex": "grlex", "grlex": "grlex", "lex": "lex"}
        if self.kind not in aliases:
            raise ValueError(f"unknown monomial order {self.kind!r}")
        object.__setattr__(self, "kind", aliases[self.kind])
        if self.priority is not None:
            object.__setattr__(self, "priority", tuple(self.priority))
            if sorted(self.priority) != list(range(len(self.priority))):
                raise ValueError("priority must be a permutation of 0..d-1")

    def key(self, alpha: Sequence[int]) -> tuple:
        perm = self.priority or range(len(alpha))
        if self.priority is not None and len(self.priority) != len(alpha):
            raise ValueError("priority length does not match the number of variables")
        lexkey = tuple(alpha[j] for j in perm)
        if self.kind == "lex":
            return lexkey
        return (sum(alpha),) + lexkey


_Poly = dict  # MultiIndex -> _QI


def _lead(f: _Poly, order: MonomialOrder) -> MultiIndex:
    return max(f, key=order.key)


def _sub_scaled(f: _Poly, g: _Poly, c: _QI, shift: MultiIndex) -> _Poly:
    out = dict(f)
    for a, v in g.items():
        key = a.plus(shift)
        nv = out.get(key, _QI(Fraction(0))) - c * v
        if nv:
            out[key] = nv
        else:
            out.pop(key, None)
    return out


def _monic(f: _Poly, order: MonomialOrder) -> _Poly:
    lc = f[_lead(f, order)]
    return {a: v / lc for a, v in f.items()}


def _reduce(f: _Poly, basis: list[_Poly], order: MonomialOrder) -> _Poly:
    remainder: _Poly = {}
    f = dict(f)
    leads = [(_lead(g, order), g) for g in basis]
    while f:
        lm = _lead(f, order)
        for glm, g in leads:
            shift = lm.minus(glm)
            if shift is not None:
                f = _sub_scaled(f, g, f[lm] / g[glm], shift)
                break
        else:
            remainder[lm] = f.pop(lm)
    return remainder


def _spoly(f: _Poly, g: _Poly, order: MonomialOrder) -> _Poly:
    a, b = _lead(f, order), _lead(g, order)
    lcm = MultiIndex(max(x, y) for x, y in zip(a, b))
    left = {m.plus(lcm.minus(a)): v / f[a] for m, v in f.items()}
    return _sub_scaled(left, g, _QI(Fraction(1)) / g[b], lcm.minus(b))


def _to_internal(p: HomogPoly) -> _Poly:
    return {a: _QI.of(c) for a, c in p.terms.items()}


def _to_poly(f: _Poly, dim: int) -> HomogPoly:
    return HomogPoly.from_terms(dim, {a: v.value() for a, v in f.items()})


def reduce_poly(f: HomogPoly, basis: Sequence[HomogPoly], order: MonomialOrder = MonomialOrder()) -> HomogPoly:
    """Remainder of ``f`` on multivariate division by ``basis``."""
    internal = [_to_internal(g) for g in basis if not g.is_zero()]
    r = _reduce(_to_internal(f), internal, order)
    if not r:
        return HomogPoly.zero(f.dim, f.degree)
    return _to_poly(r, f.dim)


def buchberger(generators: Sequence[HomogPoly], order: MonomialOrder = MonomialOrder()) -> list[HomogPoly]:
    """Reduced Groebner basis of the ideal generated by ``generators``.

    Elements are monic and sorted by increasing leading monomial.
    """
    gens = [g for g in generators if not g.is_zero()]
    if not gens:
        return []
    dim = gens[0].dim
    if any(g.dim != dim for g in gens):
        raise ValueError("generators must share the number of variables")
    G = [_monic(_to_internal(g), order) for g in gens]
    pairs = list(combinations(range(len(G)), 2))
    while pairs:
        # normal selection strategy: smallest lcm first, ties broken by index
        def lcm_key(pair):
            a, b = _lead(G[pair[0]], order), _lead(G[pair[1]], order)
            return (order.key(tuple(max(x, y) for x, y in zip(a, b))), pair)

        pairs.sort(key=lcm_key)
        i, j = pairs.pop(0)
        a, b = _lead(G[i], order), _lead(G[j], order)
        if all(x == 0 or y == 0 for x, y in zip(a, b)):
            continue  # coprime leading monomials reduce to zero
        r = _reduce(_spoly(G[i], G[j], order), G, order)
        if r:
            G.append(_monic(r, order))
            pairs.extend((t, len(G) - 1) for t in range(len(G) - 1))

    # minimal basis: drop elements whose leading monomial is divisible by another's
    minimal: list[_Poly] = []
    for idx, g in enumerate(G):
        lm = _lead(g, order)
        redundant = False
        for jdx, h in enumerate(G):
            if jdx == idx:
                continue
            hm = _lead(h, order)
            if hm.divides(lm) and (hm != lm or jdx < idx):
                redundant = True
                break
        if not redundant:
            minimal.append(g)

    reduced = []
    for idx, g in enumerate(minimal):
        others = [h for jdx, h in enumerate(minimal) if jdx != idx]
        lm = _lead(g, order)
        tail = {a: v for a, v in g.items() if a != lm}
        rest = _reduce(tail, others, order) if tail else {}
        rest[lm] = g[lm]
        reduced.append(rest)
    reduced.sort(key=lambda f: order.key(_lead(f, order)))
    return [_to_poly(f, dim) for f in reduced]


def is_groebner_basis(basis: Sequence[HomogPoly], order: MonomialOrder = MonomialOrder()) -> bool:
    """Buchberger's criterion: every S-polynomial reduces to zero."""
    G = [_to_internal(g) for g in basis if not g.is_zero()]
    return all(not _reduce(_spoly(f, g, order), G, order) for f, g in combinations(G, 2))


def leading_monomial(p: HomogPoly, order: MonomialOrder = MonomialOrder()) -> MultiIndex:
    if p.is_zero():
        raise ValueError("the zero polynomial has no leading monomial")
    return max(p.terms, key=order.key)
