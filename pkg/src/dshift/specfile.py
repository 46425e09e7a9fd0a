"""Text format describing a family of graded submodules.

Example::

    # three coordinate submodules
    vars=3 rank=1
    [A] gen="z1"
    [B] gen="z2"; [C] gen="z3"

Statements end at ``;`` or a newline and ``#`` starts a comment.  A header
``vars=<d> rank=<r>`` comes first (``rank`` defaults to 1).  ``[NAME]`` opens
a module block and each ``gen="<poly>"`` adds a generator, optionally
followed by ``⊗`` (or ``@``) and a vector ``e<j>`` or ``(c1, ..., cr)`` with
constant components such as ``2``, ``-1/2`` or ``(1+2i)``.  A vector is
required when ``r > 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .poly import HomogPoly, Number, PolySyntaxError, VectorPoly, format_poly, parse_poly
from .slices import GradedSubmodule


class SpecError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


Generator = tuple[HomogPoly, tuple[Number, ...]]


@dataclass
class ModuleSpecFile:
    dim: int
    rank: int
    modules: dict[str, list[Generator]] = field(default_factory=dict)

    @property
    def names(self) -> list[str]:
        return list(self.modules)

    def submodule(self, name: str) -> GradedSubmodule:
        if name not in self.modules:
            raise KeyError(f"no module named {name!r}")
        gens = tuple(VectorPoly([(p, v)], rank=self.rank) for p, v in self.modules[name])
        return GradedSubmodule(self.dim, self.rank, gens, name)

    def submodules(self, names: list[str] | None = None) -> list[GradedSubmodule]:
        return [self.submodule(n) for n in (names or self.names)]


_HEADER = re.compile(r"(vars|rank)\s*=\s*(\S+)")
_BLOCK = re.compile(r"\[\s*([A-Za-z_][\w.-]*)\s*\]")
_GEN = re.compile(r'gen\s*=\s*"([^"]*)"')
_TENSOR = re.compile(r"\s*(⊗|@)\s*")


def _statements(text: str):
    """Yield ``(line, column, statement)`` with comments removed."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        in_quote = False
        start = 0
        for idx, ch in enumerate(raw + ";"):
            if ch == '"':
                in_quote = not in_quote
            elif not in_quote and ch == "#":
                yield lineno, start + 1, raw[start:idx]
                break
            elif not in_quote and ch == ";":
                yield lineno, start + 1, raw[start:idx]
                start = idx + 1
        if in_quote:
            raise SpecError("unterminated string", lineno, raw.index('"') + 1)


_RATIONAL = re.compile(r"\s*([+-]?\d+)\s*/\s*(\d+)\s*")


def _scalar(text: str, dim: int, line: int, col: int) -> Number:
    if (m := _RATIONAL.fullmatch(text)) and int(m.group(2)) != 0:
        return Fraction(int(m.group(1)), int(m.group(2)))
    try:
        p = parse_poly(text, dim=dim)
    except PolySyntaxError as exc:
        raise SpecError(f"bad vector component {text.strip()!r}: {exc.message}", line, col) from None
    if p.degree != 0:
        raise SpecError(f"vector component {text.strip()!r} is not a constant", line, col)
    return p.coefficient((0,) * dim)


def _vector(text: str, dim: int, rank: int, line: int, col: int) -> tuple[Number, ...]:
    text = text.strip()
    m = re.fullmatch(r"e(\d+)", text)
    if m:
        j = int(m.group(1))
        if not 1 <= j <= rank:
            raise SpecError(f"vector e{j} outside e1..e{rank}", line, col)
        return tuple(int(i == j - 1) for i in range(rank))
    if not (text.startswith("(") and text.endswith(")")):
        raise SpecError(f"expected e<j> or (c1, ..., c{rank}), got {text!r}", line, col)
    parts = _split_components(text[1:-1])
    if len(parts) != rank:
        raise SpecError(f"vector length mismatch: got {len(parts)} components, rank is {rank}", line, col)
    return tuple(_scalar(p, dim, line, col) for p in parts)


def _split_components(body: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def parse_generator(text: str, dim: int, rank: int, line: int = 1, col: int = 1) -> Generator:
    """Parse ``<poly>`` or ``<poly> ⊗ <vector>`` (no quotes)."""
    m = _TENSOR.search(text)
    poly_text, vec_text = (text, None) if m is None else (text[: m.start()], text[m.end():])
    try:
        p = parse_poly(poly_text, dim=dim)
    except PolySyntaxError as exc:
        raise SpecError(exc.message, line, col + (exc.pos or 0)) from None
    if vec_text is None:
        if rank != 1:
            raise SpecError(f"a vector is required when rank is {rank}", line, col)
        return p, (1,)
    return p, _vector(vec_text, dim, rank, line, col + (m.end() if m else 0))


def parse_spec(text: str) -> ModuleSpecFile:
    """Parse a module spec; raises :class:`SpecError` with line and column on any problem."""
    dim = rank = None
    modules: dict[str, list[Generator]] = {}
    current: str | None = None
    for line, col, stmt in _statements(text):
        pos = 0
        while pos < len(stmt):
            if stmt[pos].isspace():
                pos += 1
                continue
            c = col + pos
            if (m := _HEADER.match(stmt, pos)):
                if modules:
                    raise SpecError("header must precede module blocks", line, c)
                key, val = m.groups()
                if not val.isdigit() or int(val) < 1:
                    raise SpecError(f"{key} must be a positive integer, got {val!r}", line, c)
                if key == "vars":
                    dim = int(val)
                else:
                    rank = int(val)
                pos = m.end()
            elif (m := _BLOCK.match(stmt, pos)):
                if dim is None:
                    raise SpecError("missing header vars=<d>", line, c)
                current = m.group(1)
                if current in modules:
                    raise SpecError(f"duplicate module {current!r}", line, c)
                modules[current] = []
                pos = m.end()
            elif (m := _GEN.match(stmt, pos)):
                if current is None:
                    raise SpecError("generator outside a module block", line, c)
                rest = stmt[m.end():]
                vec = None
                if (t := _TENSOR.match(rest)):
                    vec = rest[t.end():].strip()
                    end = len(stmt)
                else:
                    end = m.end()
                body = m.group(1) if vec is None else f"{m.group(1)} ⊗ {vec}"
                p, v = parse_generator(body, dim, rank or 1, line, c + m.start(1) - pos)
                if p.is_zero():
                    raise SpecError("zero generator", line, c)
                modules[current].append((p, v))
                pos = end
            else:
                raise SpecError(f"unexpected input {stmt[pos:].strip()!r}", line, c)
    if dim is None:
        raise SpecError("missing header vars=<d>", 1, 1)
    if not modules:
        raise SpecError("no module blocks", 1, 1)
    for name, gens in modules.items():
        if not gens:
            raise SpecError(f"module {name!r} has no generators", 1, 1)
    return ModuleSpecFile(dim, rank or 1, modules)


def _format_scalar(c: Number) -> str:
    if isinstance(c, Fraction) and c.denominator == 1:
        c = c.numerator
    if isinstance(c, int):
        return str(c)
    if isinstance(c, Fraction):
        return f"({c.numerator}/{c.denominator})"
    if isinstance(c, complex):
        return f"({c.real!r}{'+' if c.imag >= 0 else '-'}{abs(c.imag)!r}i)"
    return repr(float(c))


def format_spec(spec: ModuleSpecFile) -> str:
    lines = [f"vars={spec.dim} rank={spec.rank}"]
    for name, gens in spec.modules.items():
        lines.append(f"[{name}]")
        for p, v in gens:
            if spec.rank == 1 and v == (1,):
                lines.append(f'gen="{format_poly(p)}"')
            else:
                lines.append(f'gen="{format_poly(p)}" ⊗ ({", ".join(_format_scalar(c) for c in v)})')
    return "\n".join(lines) + "\n"
