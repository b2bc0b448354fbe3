"""Command-line driver: `pathcheck check` and `pathcheck eval`.

Reports go to stdout, diagnostics to stderr; exit 0 on success, 1 on any
check failure, 2 on usage errors. Identical invocations produce identical
output bytes, so json-lines records pin their duration field to zero.
"""

from __future__ import annotations

import argparse
import json
import sys
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .corpus import PRELUDE
from .diagnostics import CheckError
from .kernel import Checker, DeclReport, Elaborator, base_context
from .printer import show_term
from .semantics import normalize
from .surface import Parser, Resolver, tokenize

_STACK_BYTES = 512 * 1024 * 1024


@dataclass
class RunConfig:
    command: str
    paths: list[Path] = field(default_factory=list)
    expression: Optional[str] = None
    step_budget: int = 10_000_000
    prelude: bool = True
    report_format: str = "text"
    trace: bool = False


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pathcheck", description="proof checker")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("check", "eval"):
        p = sub.add_parser(name)
        p.add_argument("paths", nargs="*", type=Path)
        p.add_argument("--step-budget", type=int, default=10_000_000)
        p.add_argument("--no-prelude", action="store_true")
        p.add_argument("--format", choices=["text", "json-lines"], default="text")
        p.add_argument("--trace", action="store_true")
        if name == "eval":
            p.add_argument("-e", "--expression", default=None)
    return ap


def parse_args(argv: list[str]) -> RunConfig:
    ns = build_arg_parser().parse_args(argv)
    return RunConfig(
        command=ns.command,
        paths=list(ns.paths),
        expression=getattr(ns, "expression", None),
        step_budget=ns.step_budget,
        prelude=not ns.no_prelude,
        report_format=ns.format,
        trace=ns.trace,
    )


def _input_paths(cfg: RunConfig) -> list[Path]:
    paths = list(cfg.paths)
    if cfg.prelude and PRELUDE.exists():
        resolved = [p.resolve() for p in paths]
        if PRELUDE.resolve() not in resolved:
            paths.insert(0, PRELUDE)
    return paths


def _emit_report(cfg: RunConfig, r: DeclReport, out) -> None:
    if cfg.report_format == "json-lines":
        record = {"name": r.name, "status": r.status, "type": r.type_str, "duration-ms": 0}
        if r.value_str is not None:
            record["value"] = r.value_str
        if r.diagnostic is not None:
            record["category"] = r.diagnostic.category
        out.write(json.dumps(record) + "\n")
        return
    if r.status != "ok":
        out.write(f"FAIL {r.name}\n")
    elif r.kind == "eval":
        out.write(f"OK {r.name} ==> {r.value_str}\n")
    else:
        out.write(f"OK {r.name} : {r.type_str}\n")


def _load_files(cfg: RunConfig, checker: Checker, out, err) -> int:
    """Check every input file in order; returns the number of failures."""
    failures = 0
    for path in _input_paths(cfg):
        try:
            text = path.read_text()
        except OSError as exc:
            raise _Usage(f"cannot read {path}: {exc.strerror}")
        try:
            decls = Parser(tokenize(text, str(path))).parse_module()
        except CheckError as e:
            err.write(e.diagnostic.render() + "\n")
            failures += 1
            continue
        resolver = Resolver(checker.ctx.globals)
        for decl in decls:
            report = checker.check_declaration(decl, resolver)
            _emit_report(cfg, report, out)
            if report.status != "ok":
                failures += 1
                if report.diagnostic is not None:
                    err.write(report.diagnostic.render() + "\n")
            if cfg.trace:
                err.write(f"trace: {report.kind} {report.name}: {report.status}\n")
    return failures


class _Usage(Exception):
    pass


def cmd_check(cfg: RunConfig, out, err) -> int:
    if not cfg.paths:
        raise _Usage("check requires at least one input path")
    checker = Checker(ctx=base_context(cfg.step_budget), trace=cfg.trace)
    failures = _load_files(cfg, checker, out, err)
    return 1 if failures else 0


def cmd_eval(cfg: RunConfig, out, err) -> int:
    if cfg.expression is None:
        raise _Usage("eval requires an expression (-e EXPR)")
    checker = Checker(ctx=base_context(cfg.step_budget), trace=cfg.trace)
    failures = _load_files(cfg, checker, out, err)
    if failures:
        return 1
    try:
        parser = Parser(tokenize(cfg.expression, "<expression>"))
        sexpr = parser.parse_term()
        if not parser.at("EOF"):
            parser.fail("end of expression")
        resolver = Resolver(checker.ctx.globals)
        term = resolver.expr(sexpr, [])
        ctx = checker.ctx.fresh_metas()
        for hid, loc in resolver.hole_locs.items():
            ctx.metas.register(hid, 0, loc)
        elab = Elaborator(ctx)
        term2, ty = elab.infer(ctx, term)
        term2, ty = elab.insert_implicits(ctx, term2, ty)
        term2 = elab.finish(ctx, term2)
        nf = normalize(ctx, term2, ty)
        out.write(show_term(nf, avoid=set(ctx.globals)) + "\n")
    except CheckError as e:
        err.write(e.diagnostic.render() + "\n")
        return 1
    return 0


def _run(cfg: RunConfig, out, err) -> int:
    try:
        if cfg.command == "check":
            return cmd_check(cfg, out, err)
        return cmd_eval(cfg, out, err)
    except _Usage as u:
        err.write(f"usage: {u}\n")
        return 2
    except CheckError as e:
        err.write(e.diagnostic.render() + "\n")
        return 1


def run_cli(argv: list[str], out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        cfg = parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    result: dict[str, int] = {}

    def work() -> None:
        result["code"] = _run(cfg, out, err)

    threading.stack_size(_STACK_BYTES)
    thread = threading.Thread(target=work)
    thread.start()
    thread.join()
    return result.get("code", 1)


def main() -> None:
    raise SystemExit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
