"""Shipped proof corpus: manifest, staged verification, and audits.

The corpus is three source files checked in order (the path-algebra
prelude, the maps between the product of circles and the torus, and the
equivalence proof) plus a suite of deliberately ill-typed files that the
checker must reject with the annotated category.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .core import (
    App,
    Context,
    GlobalRef,
    Id,
    Lam,
    Pair,
    Pi,
    Prim,
    Proj1,
    Proj2,
    Refl,
    Sigma,
    Term,
)
from .diagnostics import CheckError, Diagnostic
from .kernel import Checker, DeclReport, base_context
from .surface import Resolver, parse_file

REPO_ROOT = Path(__file__).resolve().parents[2]
CORPUS_DIR = REPO_ROOT / "corpus"
NEGATIVE_DIR = REPO_ROOT / "tests" / "negative"
MANIFEST_PATH = CORPUS_DIR / "manifest"

PRELUDE = CORPUS_DIR / "prelude.hott"
TORUS_MAPS = CORPUS_DIR / "torus_maps.hott"
TORUS_EQUIV = CORPUS_DIR / "torus_equiv.hott"

PRELUDE_REQUIRED = (
    "inv-inv",
    "concat-inv-r",
    "concat-inv-l",
    "inv-concat",
    "concat-assoc",
    "concat-refl-l",
    "concat-refl-r",
    "transport-compose",
    "ap-inv",
    "ap-concat-lemma",
    "Homotopy",
    "nat",
    "isEquiv",
    "Equiv",
    "I",
    "I-inv",
    "I-inv-I",
    "I-I-inv",
    "proj-eq",
    "pair-eq",
    "proj-pair-eq",
    "pair-proj-eq",
    "hap",
    "funext",
    "hap-funext",
    "funext-hap",
    "S1-is-1type",
)

MAPS_REQUIRED = (
    "f",
    "beta-f",
    "H",
    "T1",
    "gamma-path",
    "diagram-1",
    "F-arrow",
    "F",
    "beta-star",
    "mu",
    "nu",
    "G",
    "beta-G-p",
    "beta-G-q",
    "Phi",
    "diagram-2",
)

EQUIV_REQUIRED = (
    "T2-lemma",
    "epsilon",
    "delta-path",
    "eta-path",
    "transport-pi",
    "loop-coherence",
    "T3",
    "kappa-p",
    "kappa-q",
    "zeta",
    "step1-lemma",
    "step2-lemma",
    "step3-lemma",
    "rect-A",
    "rect-B",
    "rect-C",
    "rect-D1",
    "rect-D2",
    "rect-E",
    "GF-id",
    "FG-id",
    "torus-equiv",
)

ALLOWED_POSTULATES = frozenset({"funext", "hap-funext", "funext-hap", "S1-is-1type"})


@dataclass
class ManifestEntry:
    path: str
    expect: str  # "accept" or "reject"
    category: Optional[str] = None
    names: list[tuple[str, str]] = field(default_factory=list)
    evals: list[tuple[str, str]] = field(default_factory=list)


def load_manifest(path: Path = MANIFEST_PATH) -> list[ManifestEntry]:
    entries: list[ManifestEntry] = []
    current: Optional[ManifestEntry] = None
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("file "):
            parts = line.split()
            if parts[2] == "accept":
                current = ManifestEntry(parts[1], "accept")
            else:
                current = ManifestEntry(parts[1], "reject", category=parts[3])
            entries.append(current)
        elif line.startswith("name ") and current is not None:
            name, _, ty = line[len("name ") :].partition(" : ")
            current.names.append((name.strip(), ty.strip()))
        elif line.startswith("eval ") and current is not None:
            expr, _, nf = line[len("eval ") :].partition(" ==> ")
            current.evals.append((expr.strip(), nf.strip()))
        else:
            raise ValueError(f"malformed manifest line: {raw!r}")
    return entries


@dataclass
class StageReport:
    stage: str
    ok: bool
    reports: list[DeclReport] = field(default_factory=list)
    problems: list[str] = field(default_factory=list)

    def failures(self) -> list[DeclReport]:
        return [r for r in self.reports if r.status != "ok"]


def run_file(checker: Checker, path: Path, resolver: Optional[Resolver] = None) -> list[DeclReport]:
    decls = parse_file(path.read_text(), str(path))
    resolver = resolver or Resolver(checker.ctx.globals)
    return [checker.check_declaration(d, resolver) for d in decls]


def _check_stage(
    checker: Checker,
    stage: str,
    path: Path,
    required: tuple[str, ...],
) -> StageReport:
    report = StageReport(stage, True)
    try:
        report.reports = run_file(checker, path)
    except CheckError as err:
        report.ok = False
        report.problems.append(err.diagnostic.render())
        return report
    for r in report.failures():
        report.ok = False
        msg = r.diagnostic.render() if r.diagnostic else "unknown failure"
        report.problems.append(f"{r.name}: {msg}")
    exported = set(checker.ctx.globals)
    for name in required:
        if name not in exported:
            report.ok = False
            report.problems.append(f"missing required export {name!r}")
    return report


def verify_prelude(checker: Optional[Checker] = None) -> StageReport:
    checker = checker or Checker()
    report = _check_stage(checker, "prelude", PRELUDE, PRELUDE_REQUIRED)
    accepted = sum(1 for r in report.reports if r.status == "ok" and r.kind in ("def", "postulate"))
    if accepted < 25:
        report.ok = False
        report.problems.append(f"prelude exports only {accepted} declarations (< 25)")
    return report


def verify_maps(checker: Checker) -> StageReport:
    return _check_stage(checker, "maps", TORUS_MAPS, MAPS_REQUIRED)


def verify_equivalence(checker: Checker) -> StageReport:
    return _check_stage(checker, "equivalence", TORUS_EQUIV, EQUIV_REQUIRED)


def verify_all(step_budget: int = 10_000_000) -> tuple[Checker, list[StageReport]]:
    checker = Checker(ctx=base_context(step_budget))
    stages = [verify_prelude(checker)]
    if stages[-1].ok:
        stages.append(verify_maps(checker))
    if stages[-1].ok:
        stages.append(verify_equivalence(checker))
    return checker, stages


def expected_category(path: Path) -> str:
    first = path.read_text().splitlines()[0].strip()
    prefix = "-- expect:"
    if not first.startswith(prefix):
        raise ValueError(f"{path} lacks an '-- expect: <category>' annotation")
    return first[len(prefix) :].strip()


def run_negative_suite(paths: Optional[list[Path]] = None) -> StageReport:
    if paths is None:
        paths = sorted(NEGATIVE_DIR.glob("*.hott"))
    report = StageReport("negative", True)
    for path in paths:
        want = expected_category(path)
        checker = Checker()
        prelude_reports = run_file(checker, PRELUDE)
        if any(r.status != "ok" for r in prelude_reports):
            report.ok = False
            report.problems.append(f"{path.name}: prelude failed to load")
            continue
        try:
            reports = run_file(checker, path)
        except CheckError as err:
            reports = [
                DeclReport(kind="file", name=path.name, status="fail", diagnostic=err.diagnostic)
            ]
        bad = [r for r in reports if r.status != "ok"]
        if not bad:
            report.ok = False
            report.problems.append(f"{path.name}: accepted but must be rejected")
            continue
        got = bad[0].diagnostic.category if bad[0].diagnostic else "???"
        if got != want:
            report.ok = False
            report.problems.append(f"{path.name}: rejected with {got!r}, annotated {want!r}")
        report.reports.extend(reports)
    return report


# --- dependency walk ---------------------------------------------------------


def _globals_in(t: Term, acc: set[str]) -> None:
    match t:
        case GlobalRef(n):
            acc.add(n)
        case Pi(_, a, b, _) | Sigma(_, a, b):
            _globals_in(a, acc)
            _globals_in(b, acc)
        case App(a, b, _) | Pair(a, b):
            _globals_in(a, acc)
            _globals_in(b, acc)
        case Lam(_, a) | Proj1(a) | Proj2(a) | Refl(a):
            _globals_in(a, acc)
        case Id(a, b, c):
            _globals_in(a, acc)
            _globals_in(b, acc)
            _globals_in(c, acc)
        case Prim(_, args):
            for a in args:
                _globals_in(a, acc)
        case _:
            pass


def walk_dependencies(ctx: Context, root: str) -> set[str]:
    """Names reachable from `root` through elaborated types and bodies."""
    seen: set[str] = set()
    frontier = [root]
    while frontier:
        name = frontier.pop()
        if name in seen:
            continue
        seen.add(name)
        entry = ctx.globals.get(name)
        if entry is None:
            continue
        refs: set[str] = set()
        _globals_in(entry.type_term, refs)
        if entry.body_term is not None:
            _globals_in(entry.body_term, refs)
        frontier.extend(refs - seen)
    return seen


def postulates_reached(ctx: Context, root: str) -> set[str]:
    deps = walk_dependencies(ctx, root)
    return {n for n in deps if n in ctx.globals and ctx.globals[n].is_postulate}
