"""Homogeneous polynomials in ``d`` complex variables.

Polynomials are sparse maps from multi-indices to coefficients.  Arithmetic
here is exact whenever the coefficients are (``int`` and ``Fraction`` stay
rational); floating point only enters through ``float``/``complex`` inputs.
The Drury-Arveson inner product uses the exact weights ``alpha!/|alpha|!``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

Number = Union[int, Fraction, float, complex]


class MultiIndex(tuple):
    """Exponent vector ``alpha`` in ``N_0^d``; ``degree`` is ``|alpha|``."""

    def __new__(cls, exponents: Iterable[int]):
        exps = tuple(int(e) for e in exponents)
        if not exps:
            raise ValueError("a multi-index needs at least one variable")
        if any(e < 0 for e in exps):
            raise ValueError(f"negative exponent in {exps}")
        obj = super().__new__(cls, exps)
        obj._degree = sum(exps)
        return obj

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def dim(self) -> int:
        return len(self)

    @classmethod
    def zero(cls, d: int) -> "MultiIndex":
        return cls((0,) * d)

    @classmethod
    def unit(cls, d: int, i: int) -> "MultiIndex":
        """Exponent of ``z_{i+1}`` (``i`` is 0-based)."""
        exps = [0] * d
        exps[i] = 1
        return cls(exps)

    def plus(self, other: Sequence[int]) -> "MultiIndex":
        return MultiIndex(a + b for a, b in zip(self, other))

    def minus(self, other: Sequence[int]) -> "MultiIndex | None":
        """``self - other``, or ``None`` when some exponent would go negative."""
        diff = [a - b for a, b in zip(self, other)]
        if any(x < 0 for x in diff):
            return None
        return MultiIndex(diff)

    def divides(self, other: Sequence[int]) -> bool:
        return all(a <= b for a, b in zip(self, other))

    def factorial(self) -> int:
        return math.prod(math.factorial(a) for a in self)

    def __repr__(self) -> str:
        return f"MultiIndex({tuple(self)})"


def _compositions(d: int, k: int):
    if d == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for rest in _compositions(d - 1, k - first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def enumerate_monomials(d: int, k: int) -> tuple[MultiIndex, ...]:
    """All ``alpha`` with ``|alpha| = k`` in graded-lex order, ``z_1^k`` first.

    The length is ``C(k+d-1, d-1)``.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    if k < 0:
        raise ValueError("degree must be non-negative")
    return tuple(MultiIndex(c) for c in _compositions(d, k))


@lru_cache(maxsize=None)
def monomial_positions(d: int, k: int) -> Mapping[MultiIndex, int]:
    return MappingProxyType({a: i for i, a in enumerate(enumerate_monomials(d, k))})


@lru_cache(maxsize=None)
def da_weight(alpha: MultiIndex) -> Fraction:
    """``alpha!/|alpha|!``, the squared norm of ``z^alpha``."""
    alpha = MultiIndex(alpha)
    return Fraction(alpha.factorial(), math.factorial(alpha.degree))


@lru_cache(maxsize=None)
def normalizing_factor(alpha: MultiIndex) -> float:
    """``sqrt(alpha!/|alpha|!)``: coordinate of ``z^alpha`` along ``e_alpha``."""
    w = da_weight(alpha)
    return math.sqrt(w.numerator) / math.sqrt(w.denominator)


def _conj(c: Number) -> Number:
    return c.conjugate()


def _falling(n: int, k: int) -> int:
    return math.perm(n, k) if 0 <= k <= n else 0


class HomogPoly:
    """Homogeneous polynomial of a fixed degree in ``dim`` variables.

    Zero coefficients are never stored, so the zero polynomial is an empty
    term map that still carries its degree.
    """

    __slots__ = ("dim", "degree", "_terms")

    def __init__(self, dim: int, degree: int, terms: Mapping[Sequence[int], Number] | None = None):
        if dim < 1:
            raise ValueError("dim must be at least 1")
        if degree < 0:
            raise ValueError("degree must be non-negative")
        clean: dict[MultiIndex, Number] = {}
        for alpha, c in (terms or {}).items():
            alpha = MultiIndex(alpha)
            if alpha.dim != dim:
                raise ValueError(f"multi-index {tuple(alpha)} does not have {dim} entries")
            if alpha.degree != degree:
                raise ValueError(f"term {tuple(alpha)} has degree {alpha.degree}, expected {degree}")
            if c != 0:
                clean[alpha] = c
        self.dim = dim
        self.degree = degree
        self._terms = clean

    @classmethod
    def zero(cls, dim: int, degree: int = 0) -> "HomogPoly":
        return cls(dim, degree)

    @classmethod
    def monomial(cls, alpha: Sequence[int], coeff: Number = 1) -> "HomogPoly":
        alpha = MultiIndex(alpha)
        return cls(alpha.dim, alpha.degree, {alpha: coeff})

    @classmethod
    def variable(cls, dim: int, i: int) -> "HomogPoly":
        """The coordinate ``z_i`` (1-based ``i``)."""
        if not 1 <= i <= dim:
            raise ValueError(f"variable z{i} outside z1..z{dim}")
        return cls.monomial(MultiIndex.unit(dim, i - 1))

    @classmethod
    def from_terms(cls, dim: int, terms: Mapping[Sequence[int], Number]) -> "HomogPoly":
        """Build from a term map, inferring the degree."""
        nonzero = {MultiIndex(a): c for a, c in terms.items() if c != 0}
        degrees = sorted({a.degree for a in nonzero})
        if len(degrees) > 1:
            raise ValueError(f"non-homogeneous: degrees {degrees[0]} and {degrees[1]}")
        return cls(dim, degrees[0] if degrees else 0, nonzero)

    @property
    def terms(self) -> Mapping[MultiIndex, Number]:
        return MappingProxyType(self._terms)

    def coefficient(self, alpha: Sequence[int]) -> Number:
        return self._terms.get(MultiIndex(alpha), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def support(self) -> frozenset[int]:
        """0-based indices of the variables that occur."""
        return frozenset(i for alpha in self._terms for i, e in enumerate(alpha) if e)

    def _check(self, other: "HomogPoly") -> None:
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "HomogPoly") -> "HomogPoly":
        if not isinstance(other, HomogPoly):
            return NotImplemented
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.degree != other.degree:
            raise ValueError(f"non-homogeneous: degrees {self.degree} and {other.degree}")
        terms = dict(self._terms)
        for a, c in other._terms.items():
            terms[a] = terms.get(a, 0) + c
        return HomogPoly(self.dim, self.degree, terms)

    def __neg__(self) -> "HomogPoly":
        return self.scale(-1)

    def __sub__(self, other: "HomogPoly") -> "HomogPoly":
        if not isinstance(other, HomogPoly):
            return NotImplemented
        return self + (-other)

    def scale(self, c: Number) -> "HomogPoly":
        return HomogPoly(self.dim, self.degree, {a: c * v for a, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, HomogPoly):
            return multiply_poly(self, other)
        if isinstance(other, (int, Fraction, float, complex)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, float, complex)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomogPoly):
            return NotImplemented
        if self.dim != other.dim:
            return False
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        return f"HomogPoly({format_poly(self)!r}, dim={self.dim}, degree={self.degree})"


class VectorPoly:
    """Element ``sum_l p_l (x) xi_l`` of ``rP_d`` with every ``p_l`` of one degree."""

    __slots__ = ("rank", "parts")

    def __init__(self, parts: Iterable[tuple[HomogPoly, Sequence[Number]]], rank: int | None = None):
        parts = tuple((p, tuple(v)) for p, v in parts)
        if not parts:
            raise ValueError("a vector polynomial needs at least one part")
        if rank is None:
            rank = len(parts[0][1])
        if rank < 1:
            raise ValueError("rank must be at least 1")
        dim = parts[0][0].dim
        nonzero_degrees = {p.degree for p, _ in parts if not p.is_zero()}
        if len(nonzero_degrees) > 1:
            a, b = sorted(nonzero_degrees)[:2]
            raise ValueError(f"non-homogeneous: degrees {a} and {b}")
        for p, v in parts:
            if p.dim != dim:
                raise ValueError("all parts must share the number of variables")
            if len(v) != rank:
                raise ValueError(f"vector of length {len(v)} in a rank-{rank} polynomial")
        self.rank = rank
        self.parts = parts

    @classmethod
    def from_poly(cls, p: HomogPoly, vector: Sequence[Number] | None = None, rank: int = 1) -> "VectorPoly":
        if vector is None:
            vector = (1,) + (0,) * (rank - 1)
        return cls([(p, vector)], rank=len(vector))

    @property
    def dim(self) -> int:
        return self.parts[0][0].dim

    @property
    def degree(self) -> int:
        for p, _ in self.parts:
            if not p.is_zero():
                return p.degree
        return self.parts[0][0].degree

    def coefficient_vectors(self) -> dict[MultiIndex, tuple[Number, ...]]:
        """Combined coefficient ``a_alpha`` in ``C^r`` for every monomial."""
        out: dict[MultiIndex, list[Number]] = {}
        for p, v in self.parts:
            for a, c in p.terms.items():
                acc = out.setdefault(a, [0] * self.rank)
                for j, x in enumerate(v):
                    if x != 0:
                        acc[j] = acc[j] + c * x
        return {a: tuple(v) for a, v in out.items() if any(x != 0 for x in v)}

    def is_zero(self) -> bool:
        return not self.coefficient_vectors()

    def scale(self, c: Number) -> "VectorPoly":
        return VectorPoly([(p.scale(c), v) for p, v in self.parts], rank=self.rank)

    def __add__(self, other: "VectorPoly") -> "VectorPoly":
        if not isinstance(other, VectorPoly):
            return NotImplemented
        if other.rank != self.rank or other.dim != self.dim:
            raise ValueError("rank or dimension mismatch")
        return VectorPoly(self.parts + other.parts, rank=self.rank)

    def __sub__(self, other: "VectorPoly") -> "VectorPoly":
        return self + other.scale(-1)

    def times(self, q: HomogPoly) -> "VectorPoly":
        """Module action ``q * self``."""
        return VectorPoly([(multiply_poly(q, p), v) for p, v in self.parts], rank=self.rank)

    def single_part(self) -> tuple[HomogPoly, tuple[Number, ...]] | None:
        return self.parts[0] if len(self.parts) == 1 else None

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorPoly):
            return NotImplemented
        return (self.rank, self.dim) == (other.rank, other.dim) and (
            self.coefficient_vectors() == other.coefficient_vectors()
        )

    def __hash__(self) -> int:
        return hash((self.rank, self.dim, frozenset(self.coefficient_vectors().items())))

    def __repr__(self) -> str:
        body = " + ".join(f"({format_poly(p)}) (x) {list(v)}" for p, v in self.parts)
        return f"VectorPoly({body}, rank={self.rank})"


def as_vector(p: HomogPoly | VectorPoly) -> VectorPoly:
    return p if isinstance(p, VectorPoly) else VectorPoly.from_poly(p)


def da_inner(p: HomogPoly | VectorPoly, q: HomogPoly | VectorPoly) -> Number:
    """Drury-Arveson inner product, linear in ``p`` and conjugate-linear in ``q``."""
    p, q = as_vector(p), as_vector(q)
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    if p.rank != q.rank:
        raise ValueError(f"rank mismatch: {p.rank} vs {q.rank}")
    a, b = p.coefficient_vectors(), q.coefficient_vectors()
    total: Number = 0
    for alpha, va in a.items():
        vb = b.get(alpha)
        if vb is None:
            continue
        dot = sum(x * _conj(y) for x, y in zip(va, vb))
        if dot != 0:
            total += da_weight(alpha) * dot
    return total


def da_norm(p: HomogPoly | VectorPoly) -> float:
    return math.sqrt(abs(complex(da_inner(p, p)).real))


def multiply(p: HomogPoly, m: Sequence[int]) -> HomogPoly:
    """``z^m * p``."""
    m = MultiIndex(m)
    if m.dim != p.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {m.dim}")
    return HomogPoly(p.dim, p.degree + m.degree, {a.plus(m): c for a, c in p.terms.items()})


def multiply_poly(p: HomogPoly, q: HomogPoly) -> HomogPoly:
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    terms: dict[MultiIndex, Number] = {}
    for a, c in p.terms.items():
        for b, e in q.terms.items():
            key = a.plus(b)
            terms[key] = terms.get(key, 0) + c * e
    return HomogPoly(p.dim, p.degree + q.degree, terms)


def partial(p: HomogPoly, alpha: Sequence[int]) -> HomogPoly:
    """``d^alpha p`` with falling-factorial coefficients."""
    alpha = MultiIndex(alpha)
    if alpha.dim != p.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {alpha.dim}")
    terms: dict[MultiIndex, Number] = {}
    for beta, c in p.terms.items():
        rest = beta.minus(alpha)
        if rest is None:
            continue
        factor = math.prod(_falling(b, a) for b, a in zip(beta, alpha))
        terms[rest] = c * factor
    return HomogPoly(p.dim, max(p.degree - alpha.degree, 0), terms)


def multiply_adjoint(g: HomogPoly, f: HomogPoly) -> HomogPoly:
    """``M_g^* f`` computed from ``M_{z_i}^* = (N+1)^{-1} d_i``.

    For a monomial ``z^beta`` this gives ``M^* f = (k-|beta|)!/k! * d^beta f``
    where ``k = deg f``.
    """
    if g.dim != f.dim:
        raise ValueError(f"dimension mismatch: {g.dim} vs {f.dim}")
    out_degree = f.degree - g.degree
    if out_degree < 0 or g.is_zero() or f.is_zero():
        return HomogPoly.zero(f.dim, max(out_degree, 0))
    scale = Fraction(math.factorial(out_degree), math.factorial(f.degree))
    terms: dict[MultiIndex, Number] = {}
    for beta, c in g.terms.items():
        for a, v in partial(f, beta).terms.items():
            terms[a] = terms.get(a, 0) + _conj(c) * v
    return HomogPoly(f.dim, out_degree, {a: scale * v for a, v in terms.items()})


def gram_schmidt_da(polys: Sequence[HomogPoly | VectorPoly], tol: float = 1e-10) -> list:
    """Orthonormalize in the Drury-Arveson inner product.

    Modified Gram-Schmidt; a vector whose residual norm falls below ``tol``
    times its original norm is treated as dependent and dropped.  The output
    keeps the input type (``HomogPoly`` stays ``HomogPoly``).
    """
    if not polys:
        return []
    scalar = all(isinstance(p, HomogPoly) for p in polys)
    vecs = [as_vector(p) for p in polys]
    dims = {(v.dim, v.rank) for v in vecs}
    if len(dims) > 1:
        raise ValueError("all inputs must share dimension and rank")
    basis: list[VectorPoly] = []
    for v in vecs:
        norm0 = da_norm(v)
        if norm0 == 0:
            continue
        w = v
        for e in basis:
            w = w - e.scale(complex(da_inner(w, e)))
        norm = da_norm(w)
        if norm <= tol * norm0:
            continue
        basis.append(_collapse(w.scale(1 / norm)))
    if scalar:
        return [_to_scalar(b) for b in basis]
    return basis


def _collapse(v: VectorPoly) -> VectorPoly:
    """Rewrite as one part per standard basis vector (keeps sizes bounded)."""
    coeffs = v.coefficient_vectors()
    parts = []
    for j in range(v.rank):
        terms = {a: c[j] for a, c in coeffs.items() if c[j] != 0}
        if terms:
            unit = tuple(1 if t == j else 0 for t in range(v.rank))
            parts.append((HomogPoly(v.dim, v.degree, terms), unit))
    if not parts:
        parts = [(HomogPoly.zero(v.dim, v.degree), (0,) * v.rank)]
    return VectorPoly(parts, rank=v.rank)


def _to_scalar(v: VectorPoly) -> HomogPoly:
    return HomogPoly(v.dim, v.degree, {a: c[0] for a, c in v.coefficient_vectors().items()})


# ---------------------------------------------------------------------------
# string grammar

class PolySyntaxError(ValueError):
    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        self.message = message
        super().__init__(message if pos is None else f"{message} (at column {pos + 1})")


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<var>z\d+)"
    r"|(?P<imag>i)"
    r"|(?P<op>[-+*^()/])"
    r")"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise PolySyntaxError(f"unexpected character {text[col]!r}", col)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


def _number(s: str) -> int | float:
    return int(s) if s.isdigit() else float(s)


class _PolyParser:
    def __init__(self, text: str, dim: int | None):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.dim = dim

    def peek(self, offset: int = 0):
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else (None, None, len(self.text))

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind or "token"
            found = "end of input" if tok[0] is None else repr(tok[1])
            raise PolySyntaxError(f"expected {want}, found {found}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> list[tuple[Number, dict[int, int], int]]:
        if not self.tokens:
            raise PolySyntaxError("empty polynomial", 0)
        terms = []
        sign = 1
        if self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
        terms.append(self.term(sign))
        while self.peek()[0] is not None:
            tok = self.peek()
            if tok[1] not in ("+", "-"):
                raise PolySyntaxError(f"expected '+' or '-', found {tok[1]!r}", tok[2])
            self.i += 1
            terms.append(self.term(-1 if tok[1] == "-" else 1))
        return terms

    def term(self, sign: int):
        coeff: Number = sign
        exps: dict[int, int] = {}
        start = self.peek()[2]
        last = self.factor(exps)
        if last[0] == "coef":
            coeff = coeff * last[1]
        while True:
            tok = self.peek()
            if tok[1] == "*":
                self.i += 1
                nxt = self.factor(exps)
            elif tok[0] == "var" and last[0] == "coef":
                nxt = self.factor(exps)
            elif tok[0] == "var" and last[0] == "var":
                raise PolySyntaxError("'*' required between variables", tok[2])
            elif tok[0] in ("num", "imag") or tok[1] == "(":
                raise PolySyntaxError("'*' required before a coefficient", tok[2])
            else:
                break
            if nxt[0] == "coef":
                coeff = coeff * nxt[1]
            last = nxt
        return coeff, exps, start

    def factor(self, exps: dict[int, int]):
        kind, value, pos = self.peek()
        if kind == "var":
            self.i += 1
            j = int(value[1:])
            if j < 1 or (self.dim is not None and j > self.dim):
                bound = f"z1..z{self.dim}" if self.dim else "z1.."
                raise PolySyntaxError(f"unknown variable {value} (expected {bound})", pos)
            e = 1
            if self.peek()[1] == "^":
                self.i += 1
                tok = self.peek()
                if tok[0] != "num" or not tok[1].isdigit():
                    raise PolySyntaxError("exponent must be a non-negative integer", tok[2])
                self.i += 1
                e = int(tok[1])
            exps[j] = exps.get(j, 0) + e
            return ("var", j)
        return ("coef", self.coefficient())

    def coefficient(self) -> Number:
        kind, value, pos = self.peek()
        if kind == "num":
            self.i += 1
            x = _number(value)
            if self.peek()[0] == "imag":
                self.i += 1
                return complex(0, x)
            return x
        if kind == "imag":
            self.i += 1
            return 1j
        if value == "(":
            self.i += 1
            c = self.paren_coefficient()
            self.take("op", ")")
            return c
        found = "end of input" if kind is None else repr(value)
        raise PolySyntaxError(f"expected a coefficient or variable, found {found}", pos)

    def signed(self) -> int | float:
        sign = 1
        if self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
        return sign * _number(self.take("num")[1])

    def paren_coefficient(self) -> Number:
        if self.peek()[0] == "imag":
            self.i += 1
            return 1j
        re_part = self.signed()
        nxt = self.peek()
        if nxt[0] == "imag":
            self.i += 1
            return complex(0, re_part)
        if nxt[1] == "/":
            self.i += 1
            den = self.take("num")[1]
            if not (isinstance(re_part, int) and den.isdigit()):
                raise PolySyntaxError("rational coefficients need integer parts", nxt[2])
            if int(den) == 0:
                raise PolySyntaxError("division by zero", nxt[2])
            return Fraction(re_part, int(den))
        if nxt[1] in ("+", "-"):
            self.i += 1
            im = 1.0 if self.peek()[0] == "imag" else _number(self.take("num")[1])
            self.take("imag")
            return complex(re_part, im if nxt[1] == "+" else -im)
        return re_part


def parse_poly(text: str, dim: int | None = None) -> HomogPoly:
    """Parse e.g. ``"z1^2 + (0+1i)*z2*z3"`` into a homogeneous polynomial.

    ``dim`` defaults to the largest variable index that occurs.  Raises
    :class:`PolySyntaxError` on malformed or non-homogeneous input.
    """
    raw = _PolyParser(text, dim).parse()
    if dim is None:
        dim = max((j for _, exps, _ in raw for j in exps), default=1)
    terms: dict[MultiIndex, Number] = {}
    first_degree: int | None = None
    for coeff, exps, pos in raw:
        alpha = [0] * dim
        for j, e in exps.items():
            alpha[j - 1] += e
        key = MultiIndex(alpha)
        if coeff == 0:
            continue
        if first_degree is None:
            first_degree = key.degree
        elif key.degree != first_degree:
            raise PolySyntaxError(f"non-homogeneous: degrees {first_degree} and {key.degree}", pos)
        terms[key] = terms.get(key, 0) + coeff
    return HomogPoly(dim, first_degree or 0, terms)


def _format_real(x) -> str:
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"({x.numerator}/{x.denominator})"
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("non-finite coefficient")
        return repr(x)
    return str(x)


def _format_coeff(c: Number) -> tuple[str, str]:
    """Return (sign, magnitude text); magnitude is '' for a unit coefficient."""
    if isinstance(c, complex):
        if c.imag == 0:
            c = c.real
        else:
            re_s = repr(c.real)
            op = "-" if math.copysign(1.0, c.imag) < 0 else "+"
            return "+", f"({re_s}{op}{abs(c.imag)!r}i)"
    if isinstance(c, Fraction) and c.denominator == 1:
        c = c.numerator
    sign = "-" if c < 0 else "+"
    mag = -c if c < 0 else c
    if isinstance(mag, int) and mag == 1:
        return sign, ""
    return sign, _format_real(mag)


def format_poly(p: HomogPoly) -> str:
    """Inverse of :func:`parse_poly` (exact for int, Fraction, float, complex)."""
    if p.is_zero():
        return "0"
    pieces = []
    for alpha in sorted(p.terms, reverse=True):
        sign, mag = _format_coeff(p.terms[alpha])
        vars_ = [f"z{j + 1}" if e == 1 else f"z{j + 1}^{e}" for j, e in enumerate(alpha) if e]
        factors = ([mag] if mag else []) + vars_
        body = "*".join(factors) if factors else "1"
        pieces.append((sign, body))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out
