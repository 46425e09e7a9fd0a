"""Command-line front end: ``dshift <command> --spec FILE --degrees A:B``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from . import __version__
from ._parallel import worker_count
from .angles import METHOD_TAGS, graded_cosine, stable_division
from .essnorm import certify_decomposition, essnorm_report
from .perp import VARIANTS, arbitrate_guo_wang, certify_perpendicular, commutator_formula_check, verify_guo_wang
from .poly import PolySyntaxError, VectorPoly, parse_poly
from .report import dumps, to_csv
from .slices import GradedSubmodule, ambient_dim
from .specfile import ModuleSpecFile, SpecError, parse_generator, parse_spec

COMMANDS = ("cosine", "perp", "gw-verify", "stable-div", "essnorm", "certify")
MEMORY_CAP = 20000


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    degrees: tuple[int, int] = (1, 8)
    method: str = "bgm"
    variant: str = "both"
    rank_tol: float = 1e-10
    comm_tol: float = 1e-10
    delta: float = 0.05
    schatten_p: float | None = None
    output: str = "json"
    parallel: int = 1
    modules: list[str] | None = None
    p: str | None = None
    q: str | None = None
    max_degree: int = 8
    target: str | None = None
    memory_cap: int = MEMORY_CAP

    def __post_init__(self):
        lo, hi = self.degrees
        if lo < 0 or hi < lo:
            raise UsageError(f"degree range {lo}:{hi} is empty")
        for name in ("rank_tol", "comm_tol", "delta"):
            if not getattr(self, name) > 0:
                raise UsageError(f"{name} must be positive")
        if self.method not in METHOD_TAGS:
            raise UsageError(f"unknown method {self.method!r}")
        if self.variant not in VARIANTS + ("both",):
            raise UsageError(f"unknown variant {self.variant!r}")

    @property
    def degree_range(self) -> range:
        return range(self.degrees[0], self.degrees[1] + 1)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["degrees"] = list(self.degrees)
        out["parallel"] = worker_count(self.parallel)
        return out


def parse_degrees(text: str) -> tuple[int, int]:
    try:
        if ":" in text:
            a, b = text.split(":", 1)
            return int(a), int(b)
        k = int(text)
        return k, k
    except ValueError:
        raise UsageError(f"degrees must look like A:B, got {text!r}") from None


def _guard(d: int, r: int, top: int, cap: int) -> None:
    for k in range(top + 1):
        D = ambient_dim(d, r, k)
        if D > cap:
            raise UsageError(f"degree {k} exceeds the memory guard: ambient dimension {D} > {cap}")


def _modules(spec: ModuleSpecFile, config: RunConfig) -> list[GradedSubmodule]:
    try:
        return spec.submodules(config.modules)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _sum_module(mods: list[GradedSubmodule]) -> GradedSubmodule:
    if len(mods) == 1:
        return mods[0]
    gens = tuple(g for m in mods for g in m.generators)
    return GradedSubmodule(mods[0].dim, mods[0].rank, gens, "+".join(m.label for m in mods))


def _poly_arg(text: str | None, flag: str, dim: int | None):
    if text is None:
        raise UsageError(f"{flag} is required")
    try:
        return parse_poly(text, dim=dim)
    except PolySyntaxError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def run(command: str, spec: ModuleSpecFile | None, config: RunConfig) -> dict:
    """Execute one command and return the report document."""
    if command not in COMMANDS:
        raise UsageError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
    warnings: list[str] = []
    workers = config.parallel
    degrees = config.degree_range
    doc: dict = {"command": command, "config": config.to_dict()}

    if command == "gw-verify":
        if spec is not None:
            p, q = _poly_arg(config.p, "--p", spec.dim), _poly_arg(config.q, "--q", spec.dim)
        else:
            p, q = _poly_arg(config.p, "--p", None), _poly_arg(config.q, "--q", None)
            dim = max(p.dim, q.dim)
            if p.dim != q.dim:
                p, q = _poly_arg(config.p, "--p", dim), _poly_arg(config.q, "--q", dim)
        dim = p.dim
        _guard(dim, 1, config.max_degree, config.memory_cap)
        variants = VARIANTS if config.variant == "both" else (config.variant,)
        if config.variant == "both":
            arb = arbitrate_guo_wang(p, q, config.max_degree)
            checks, winner = arb.checks, arb.winner
            if winner is None:
                warnings.append("no unique winning variant: both or neither pass")
        else:
            checks = {config.variant: verify_guo_wang(p, q, config.max_degree, config.variant)}
            winner = None
        comm = {v: commutator_formula_check(p, q, config.max_degree, v) for v in variants}
        rows = []
        for v in variants:
            for k, res in checks[v].per_degree:
                rows.append({"degree": k, "variant": v, "residual": res})
        doc["per_degree"] = rows
        doc["summary"] = {
            "winner": winner,
            "residual": {v: checks[v].residual for v in variants},
            "lhs_norm": max(c.lhs_norm for c in checks.values()),
            "commutator_residual": {v: comm[v].residual for v in variants},
        }
    else:
        if spec is None:
            raise UsageError("--spec is required")
        mods = _modules(spec, config)
        top = config.degrees[1] + (1 if command == "essnorm" else 0)
        _guard(spec.dim, spec.rank, top, config.memory_cap)
        if command == "cosine":
            if len(mods) < 2:
                raise UsageError("cosine needs at least two modules")
            rep = graded_cosine(mods, degrees, config.method, config.rank_tol, workers)
            doc.update(rep.to_dict())
            for r in rep.rows:
                if r.flags:
                    warnings.append(f"degree {r.degree}: {', '.join(r.flags)}")
        elif command == "perp":
            cert = certify_perpendicular(mods, degrees, config.comm_tol, config.rank_tol, workers)
            d = cert.to_dict()
            doc["per_degree"] = d.pop("per_degree")
            doc["summary"] = d
        elif command == "stable-div":
            target = None
            if config.target:
                try:
                    p, v = parse_generator(config.target, spec.dim, spec.rank)
                except SpecError as exc:
                    raise UsageError(f"--target: {exc.message}") from None
                target = VectorPoly([(p, v)], rank=spec.rank)
                _guard(spec.dim, spec.rank, target.degree, config.memory_cap)
            rep = stable_division(mods, degrees, target, config.rank_tol, workers)
            doc.update(rep.to_dict())
        elif command == "essnorm":
            module = _sum_module(mods)
            rep = essnorm_report(module, degrees, config.schatten_p, config.rank_tol, workers)
            doc.update(rep.to_dict())
            warnings.extend(rep.warnings)
        elif command == "certify":
            cert = certify_decomposition(mods, degrees, config.delta, config.rank_tol, workers)
            d = cert.to_dict()
            angles = d.pop("angles")
            doc["per_degree"] = angles["per_degree"] if angles else []
            doc["summary"] = d
            if angles:
                doc["summary"]["angles"] = angles["summary"]
    doc.setdefault("per_degree", [])
    doc.setdefault("summary", {})
    doc["warnings"] = warnings
    doc["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return doc


def render_text(doc: dict) -> str:
    lines = [f"command: {doc['command']}"]
    for row in doc["per_degree"]:
        lines.append("  " + "  ".join(f"{k}={_short(v)}" for k, v in row.items() if not isinstance(v, (list, dict))))
    for k, v in doc["summary"].items():
        if not isinstance(v, (list, dict)):
            lines.append(f"{k}: {_short(v)}")
        elif isinstance(v, dict) and all(not isinstance(x, (list, dict)) for x in v.values()):
            lines.append(f"{k}: " + ", ".join(f"{a}={_short(b)}" for a, b in v.items()))
    for w in doc["warnings"]:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(doc)
    if fmt == "csv":
        rows = doc["per_degree"]
        if doc["command"] == "cosine":
            method = doc["summary"].get("method")
            rows = [dict(r, method=method) for r in rows]
            return to_csv(rows, ["degree", "cosine", "lambda_min", "join_rank", "method"])
        return to_csv(rows)
    if fmt == "text":
        return render_text(doc)
    raise UsageError(f"unknown format {fmt!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dshift", description="Angles, perpendicularity and essential-normality diagnostics for graded submodules of the Drury-Arveson space.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", type=Path, help="module spec file")
    common.add_argument("--degrees", default="1:8", help="inclusive degree range A:B (default 1:8)")
    common.add_argument("--module", action="append", dest="modules", help="restrict to the named module (repeatable)")
    common.add_argument("--format", default="json", choices=("json", "csv", "text"))
    common.add_argument("--rank-tol", type=float, default=1e-10)
    common.add_argument("--tol", type=float, default=1e-10, help="commutator tolerance")
    common.add_argument("--delta", type=float, default=0.05)
    common.add_argument("--parallel", type=int, default=1, help="worker threads (DSHIFT_THREADS overrides)")
    common.add_argument("--memory-cap", type=int, default=MEMORY_CAP, help="largest ambient slice dimension allowed")
    common.add_argument("--output", "-o", type=Path, help="write the report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("cosine", parents=[common], help="per-degree cosine of a family")
    s.add_argument("--method", default="bgm", choices=tuple(METHOD_TAGS))
    sub.add_parser("perp", parents=[common], help="perpendicularity certificate")
    s = sub.add_parser("gw-verify", parents=[common], help="check the Guo-Wang expansion for a pair p, q")
    s.add_argument("--p", required=True, help="polynomial p")
    s.add_argument("--q", required=True, help="polynomial q")
    s.add_argument("--variant", default="both", choices=VARIANTS + ("both",))
    s.add_argument("--max-degree", type=int, default=8)
    s = sub.add_parser("stable-div", parents=[common], help="stable-division constants and a minimal split")
    s.add_argument("--target", help='element to split, e.g. "z1*z2" or "z1 ⊗ e2"')
    s = sub.add_parser("essnorm", parents=[common], help="commutator blocks and Schatten partial sums")
    s.add_argument("--p", type=float, dest="schatten_p", help="Schatten exponent p (sums use 2p; default d+1)")
    sub.add_parser("certify", parents=[common], help="decomposition certificate")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = RunConfig(
            degrees=parse_degrees(args.degrees),
            method=getattr(args, "method", "bgm"),
            variant=getattr(args, "variant", "both"),
            rank_tol=args.rank_tol,
            comm_tol=args.tol,
            delta=args.delta,
            schatten_p=getattr(args, "schatten_p", None),
            output=args.format,
            parallel=args.parallel,
            modules=args.modules,
            p=getattr(args, "p", None),
            q=getattr(args, "q", None),
            max_degree=getattr(args, "max_degree", 8),
            target=getattr(args, "target", None),
            memory_cap=args.memory_cap,
        )
        spec = None
        if args.spec is not None:
            spec = parse_spec(args.spec.read_text(encoding="utf-8"))
        doc = run(args.command, spec, config)
        text = render(doc, config.output)
    except (UsageError, SpecError, OSError) as exc:
        print(f"dshift: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, MemoryError) as exc:
        print(f"dshift: computation failed: {exc}", file=sys.stderr)
        return 1
    if args.output is not None:
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
