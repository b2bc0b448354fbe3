"""Bidirectional type checker and declaration elaborator.

`infer` synthesizes, `check` verifies against an expected value; primitives
are typed by walking their signature telescopes, creating holes for the
implicit slots and solving them by first-order unification inside the
conversion check. Every primitive signature is elaborated under the empty
context when the base context is first built, which doubles as a startup
self-check of the whole table.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .core import (
    App,
    Budget,
    Context,
    GlobalEntry,
    GlobalRef,
    Hole,
    Id,
    InternalError,
    Lam,
    Pair,
    Pi,
    Prim,
    Proj1,
    Proj2,
    Refl,
    Sigma,
    Term,
    Universe,
    Var,
    shift,
    subst,
)
from .diagnostics import CheckError, Diagnostic, Loc
from .printer import show_term
from .prims import PRIM_SPECS
from .semantics import (
    VFlex,
    VPi,
    VSigma,
    VType,
    Value,
    apply_closure,
    conv,
    eval_term,
    fresh_var,
    head_shape,
    normalize,
    proj1_value,
    quote,
    whnf_unfold,
)
from .surface import Parser, ResolvedDecl, Resolver, SurfaceDecl, tokenize

_prim_sig_values: Optional[dict[str, Value]] = None
_prim_sig_terms: dict[str, Term] = {}
_prim_check_values: dict[str, Value] = {}


def _hole_term(depth: int, meta_id: int) -> Term:
    t: Term = Hole(meta_id)
    for i in range(depth - 1, -1, -1):
        t = App(t, Var(i))
    return t


def _fresh_implicit(ctx: Context, loc: Optional[Loc]) -> Term:
    entry = ctx.metas.fresh(ctx.depth, loc)
    return _hole_term(ctx.depth, entry.id)


def _hole_head(t: Term) -> Optional[int]:
    while isinstance(t, App):
        t = t.fn
    return t.id if isinstance(t, Hole) else None


def _local_names(ctx: Context) -> list[str]:
    return [n for n, _ in ctx.locals]


def _render(ctx: Context, v: Value) -> str:
    t = quote(ctx, ctx.depth, v)
    return show_term(t, _local_names(ctx), set(ctx.globals))


def _build_prim(op: str, args: tuple[Term, ...]) -> Term:
    if op == "refl":
        return Refl(args[0])
    return Prim(op, args)


class Elaborator:
    """Checking state for one declaration: context, holes, and source spot."""

    def __init__(self, ctx: Context, loc: Optional[Loc] = None):
        self.ctx = ctx
        self.loc = loc
        self.hole_locs: dict[int, Loc] = {}

    def _diag(
        self,
        category: str,
        message: str,
        expected: Optional[str] = None,
        actual: Optional[str] = None,
    ) -> CheckError:
        return CheckError(Diagnostic(category, self.loc, message, expected, actual))

    def _mismatch(self, ctx: Context, expected: Value, actual: Value, message: str) -> CheckError:
        category = (
            "type-mismatch"
            if head_shape(ctx, expected) != head_shape(ctx, actual)
            else "not-convertible"
        )
        return self._diag(
            category, message, expected=_render(ctx, expected), actual=_render(ctx, actual)
        )

    # --- inference ---

    def infer(self, ctx: Context, t: Term) -> tuple[Term, Value]:
        match t:
            case Var(i):
                return t, ctx.local_type(i)
            case Universe():
                return t, VType()
            case GlobalRef(name):
                entry = ctx.globals.get(name)
                if entry is None:
                    raise self._diag("scope", f"unbound identifier {name!r}")
                return t, entry.type_value
            case Pi(n, dom, cod, imp):
                dom2 = self.check(ctx, dom, VType())
                ctx2 = ctx.push(n, eval_term(ctx, ctx.env, dom2))
                cod2 = self.check(ctx2, cod, VType())
                return Pi(n, dom2, cod2, imp), VType()
            case Sigma(n, fst, snd):
                fst2 = self.check(ctx, fst, VType())
                ctx2 = ctx.push(n, eval_term(ctx, ctx.env, fst2))
                snd2 = self.check(ctx2, snd, VType())
                return Sigma(n, fst2, snd2), VType()
            case Lam(_, _):
                raise self._diag(
                    "type-mismatch",
                    "cannot infer the type of a bare function; add an annotation",
                )
            case App(f, a, imp):
                f2, fty = self.infer(ctx, f)
                fty_w = whnf_unfold(ctx, fty)
                if not imp:
                    while isinstance(fty_w, VPi) and fty_w.implicit:
                        m = _fresh_implicit(ctx, self.loc)
                        f2 = App(f2, m, True)
                        fty_w = whnf_unfold(
                            ctx,
                            apply_closure(ctx, fty_w.codomain, eval_term(ctx, ctx.env, m)),
                        )
                if not isinstance(fty_w, VPi):
                    raise self._diag(
                        "type-mismatch",
                        "applied a term that is not a function",
                        expected="a function type",
                        actual=_render(ctx, fty_w),
                    )
                if fty_w.implicit != imp:
                    raise self._diag(
                        "type-mismatch",
                        "implicit application does not match the function type",
                    )
                a2 = self.check(ctx, a, fty_w.domain)
                rty = apply_closure(ctx, fty_w.codomain, eval_term(ctx, ctx.env, a2))
                return App(f2, a2, imp), rty
            case Pair(a, b):
                a2, aty = self.infer(ctx, a)
                b2, bty = self.infer(ctx, b)
                return Pair(a2, b2), VSigma("_", aty, Closure_const(ctx, bty))
            case Proj1(p):
                p2, pty = self.infer(ctx, p)
                pty_w = whnf_unfold(ctx, pty)
                if not isinstance(pty_w, VSigma):
                    raise self._diag(
                        "type-mismatch",
                        "first projection of a non-pair",
                        expected="a pair type",
                        actual=_render(ctx, pty_w),
                    )
                return Proj1(p2), pty_w.first
            case Proj2(p):
                p2, pty = self.infer(ctx, p)
                pty_w = whnf_unfold(ctx, pty)
                if not isinstance(pty_w, VSigma):
                    raise self._diag(
                        "type-mismatch",
                        "second projection of a non-pair",
                        expected="a pair type",
                        actual=_render(ctx, pty_w),
                    )
                fst = proj1_value(ctx, eval_term(ctx, ctx.env, p2))
                return Proj2(p2), apply_closure(ctx, pty_w.second, fst)
            case Id(ty, a, b):
                ty2 = self.check(ctx, ty, VType())
                tv = eval_term(ctx, ctx.env, ty2)
                a2 = self.check(ctx, a, tv)
                b2 = self.check(ctx, b, tv)
                return Id(ty2, a2, b2), VType()
            case Refl(a):
                return self.infer_prim(ctx, "refl", (a,))
            case Prim(op, args):
                return self.infer_prim(ctx, op, args)
            case Hole(_):
                raise self._diag(
                    "unsolved-hole", "cannot infer the type of a hole; add an annotation"
                )
            case _:
                raise InternalError(f"cannot infer {type(t).__name__}")

    def infer_prim(self, ctx: Context, op: str, args: tuple) -> tuple[Term, Value]:
        spec = PRIM_SPECS[op]
        if spec.check_slots:
            slots = spec.check_slots
            order = spec.check_order
            sig = prim_check_values()[op]
        else:
            slots = spec.slots
            order = tuple(range(len(spec.stored_slots)))
            sig = prim_signature_values()[op]
        if len(args) != len(order):
            raise InternalError(f"{op!r} node has {len(args)} arguments, expected {len(order)}")
        out_args: list[Optional[Term]] = [None] * len(args)
        i = 0
        for slot in slots:
            sig_w = whnf_unfold(ctx, sig)
            if not isinstance(sig_w, VPi):
                raise InternalError(f"signature of {op!r} ran out of arguments")
            if slot.stored:
                idx = order[i]
                i += 1
                a2 = self.check(ctx, args[idx], sig_w.domain)
                out_args[idx] = a2
                av = eval_term(ctx, ctx.env, a2)
            else:
                m = _fresh_implicit(ctx, self.loc)
                av = eval_term(ctx, ctx.env, m)
            sig = apply_closure(ctx, sig_w.codomain, av)
        return _build_prim(op, tuple(out_args)), sig

    def insert_implicits(self, ctx: Context, t: Term, ty: Value) -> tuple[Term, Value]:
        while True:
            ty_w = whnf_unfold(ctx, ty)
            if isinstance(ty_w, VPi) and ty_w.implicit:
                m = _fresh_implicit(ctx, self.loc)
                t = App(t, m, True)
                ty = apply_closure(ctx, ty_w.codomain, eval_term(ctx, ctx.env, m))
            else:
                return t, ty

    # --- checking ---

    def check(self, ctx: Context, t: Term, expected: Value) -> Term:
        expected_w = whnf_unfold(ctx, expected)
        match t:
            case Lam(n, body):
                if isinstance(expected_w, VPi):
                    ctx2 = ctx.push(n, expected_w.domain)
                    body2 = self.check(
                        ctx2,
                        body,
                        apply_closure(ctx, expected_w.codomain, fresh_var(ctx.depth)),
                    )
                    return Lam(n, body2)
                if isinstance(expected_w, VFlex):
                    raise self._diag(
                        "type-mismatch",
                        "cannot check a function against an unsolved type; annotate",
                    )
                raise self._diag(
                    "type-mismatch",
                    "a function cannot have this type",
                    expected=_render(ctx, expected_w),
                    actual="a function",
                )
            case Pair(a, b):
                if isinstance(expected_w, VSigma):
                    a2 = self.check(ctx, a, expected_w.first)
                    b2 = self.check(
                        ctx,
                        b,
                        apply_closure(ctx, expected_w.second, eval_term(ctx, ctx.env, a2)),
                    )
                    return Pair(a2, b2)
                if not isinstance(expected_w, VFlex):
                    raise self._diag(
                        "type-mismatch",
                        "a pair cannot have this type",
                        expected=_render(ctx, expected_w),
                        actual="a pair",
                    )
        if _hole_head(t) is not None:
            # The hole's value is pinned down later by unification; nothing
            # to verify yet.
            return t
        t2, ty = self.infer(ctx, t)
        if not (isinstance(expected_w, VPi) and expected_w.implicit):
            t2, ty = self.insert_implicits(ctx, t2, ty)
        if conv(ctx, ty, expected):
            return t2
        raise self._mismatch(ctx, expected, ty, "the term does not have the expected type")

    # --- finishing a declaration ---

    def zonk(self, ctx: Context, t: Term, unsolved: set[int]) -> Term:
        match t:
            case Hole(m):
                entry = ctx.metas.entries.get(m)
                if entry is None or entry.solution is None:
                    unsolved.add(m)
                    return t
                sol = quote(ctx, 0, entry.solution, None, unfold=False)
                return self.zonk(ctx, sol, unsolved)
            case App(f, a, imp):
                f2 = self.zonk(ctx, f, unsolved)
                a2 = self.zonk(ctx, a, unsolved)
                if isinstance(f2, Lam) and isinstance(a2, Var):
                    return subst(f2.body, a2)
                return App(f2, a2, imp)
            case Lam(n, body):
                return Lam(n, self.zonk(ctx, body, unsolved))
            case Pi(n, dom, cod, imp):
                return Pi(n, self.zonk(ctx, dom, unsolved), self.zonk(ctx, cod, unsolved), imp)
            case Sigma(n, fst, snd):
                return Sigma(n, self.zonk(ctx, fst, unsolved), self.zonk(ctx, snd, unsolved))
            case Pair(a, b):
                return Pair(self.zonk(ctx, a, unsolved), self.zonk(ctx, b, unsolved))
            case Proj1(p):
                return Proj1(self.zonk(ctx, p, unsolved))
            case Proj2(p):
                return Proj2(self.zonk(ctx, p, unsolved))
            case Id(ty, a, b):
                return Id(
                    self.zonk(ctx, ty, unsolved),
                    self.zonk(ctx, a, unsolved),
                    self.zonk(ctx, b, unsolved),
                )
            case Refl(a):
                return Refl(self.zonk(ctx, a, unsolved))
            case Prim(op, args):
                return Prim(op, tuple(self.zonk(ctx, a, unsolved) for a in args))
            case _:
                return t

    def finish(self, ctx: Context, t: Term) -> Term:
        unsolved: set[int] = set()
        out = self.zonk(ctx, t, unsolved)
        if unsolved:
            spots = []
            for m in sorted(unsolved):
                entry = ctx.metas.entries.get(m)
                where = entry.location if entry and entry.location else self.loc
                spots.append(f"?{m} at {where}" if where else f"?{m}")
            raise self._diag(
                "unsolved-hole", "unsolved holes remain: " + ", ".join(spots)
            )
        return out


def Closure_const(ctx: Context, v: Value):
    """Closure returning `v` regardless of its argument."""
    from .semantics import Closure

    return Closure((v,), Var(1))


def solve_hole(ctx: Context, hole_id: int, candidate: Value, loc: Optional[Loc] = None) -> None:
    """Record a solution for a hole, rejecting conflicting re-solutions."""
    entry = ctx.metas.register(hole_id, ctx.depth, loc)
    if entry.solution is None:
        entry.solution = candidate
        return
    if not conv(ctx, entry.solution, candidate):
        raise CheckError(
            Diagnostic(
                "not-convertible",
                loc,
                f"hole ?{hole_id} has two incompatible solutions",
                expected=_render(ctx, entry.solution),
                actual=_render(ctx, candidate),
            )
        )


# --- primitive signature bootstrap ------------------------------------------


def _elaborate_closed_type(boot: Context, src: str, what: str) -> tuple[Term, Value]:
    parser = Parser(tokenize(src, what))
    sexpr = parser.parse_term()
    if not parser.at("EOF"):
        raise InternalError(f"trailing input in {what}")
    term = Resolver({}).expr(sexpr, [])
    ctx = boot.fresh_metas()
    elab = Elaborator(ctx)
    checked = elab.finish(ctx, elab.check(ctx, term, VType()))
    return checked, eval_term(ctx, (), checked)


def prim_signature_values() -> dict[str, Value]:
    """Elaborate every primitive signature once, under the empty context."""
    global _prim_sig_values
    if _prim_sig_values is not None:
        return _prim_sig_values
    _prim_sig_values = {}
    boot = Context(globals={}, budget=Budget(10_000_000))
    for op, spec in PRIM_SPECS.items():
        checked, value = _elaborate_closed_type(boot, spec.signature_src, f"<signature {op}>")
        _prim_sig_terms[op] = checked
        _prim_sig_values[op] = value
        if spec.check_src:
            _, cvalue = _elaborate_closed_type(boot, spec.check_src, f"<signature {op} check>")
            _prim_check_values[op] = cvalue
    return _prim_sig_values


def prim_check_values() -> dict[str, Value]:
    prim_signature_values()
    return _prim_check_values


def prim_signature_terms() -> dict[str, Term]:
    prim_signature_values()
    return dict(_prim_sig_terms)


def base_context(step_budget: int = 10_000_000) -> Context:
    """Fresh context with the primitive table verified and no globals."""
    prim_signature_values()
    return Context(globals={}, budget=Budget(step_budget))


# --- declarations -------------------------------------------------------------


@dataclass
class DeclReport:
    kind: str
    name: str
    status: str  # ok | fail
    type_str: Optional[str] = None
    value_str: Optional[str] = None
    diagnostic: Optional[Diagnostic] = None
    duration_ms: int = 0
    loc: Optional[Loc] = None


@dataclass
class Checker:
    """Sequential declaration checker holding the growing global environment."""

    ctx: Context = field(default_factory=base_context)
    trace: bool = False

    def check_module(self, decls: list[SurfaceDecl], resolver: Optional[Resolver] = None) -> list[DeclReport]:
        resolver = resolver or Resolver(self.ctx.globals)
        return [self.check_declaration(d, resolver) for d in decls]

    def check_declaration(self, decl: SurfaceDecl, resolver: Optional[Resolver] = None) -> DeclReport:
        resolver = resolver or Resolver(self.ctx.globals)
        start = time.monotonic()
        name = decl.name or decl.kind
        try:
            rd = resolver.resolve(decl)
            report = self._run_decl(rd)
        except CheckError as err:
            report = DeclReport(
                kind=decl.kind,
                name=name,
                status="fail",
                diagnostic=err.diagnostic,
                loc=decl.loc,
            )
        report.duration_ms = int((time.monotonic() - start) * 1000)
        return report

    def _printed(self, t: Term) -> str:
        return show_term(t, avoid=set(self.ctx.globals))

    def _run_decl(self, rd: ResolvedDecl) -> DeclReport:
        ctx = self.ctx.fresh_metas()
        for hid, loc in rd.hole_locs.items():
            ctx.metas.register(hid, 0, loc)
        elab = Elaborator(ctx, rd.loc)
        if rd.kind in ("def", "postulate"):
            if rd.name in ctx.globals:
                raise CheckError(
                    Diagnostic("scope", rd.loc, f"duplicate global name {rd.name!r}")
                )
        if rd.kind == "def":
            ty = elab.check(ctx, rd.type_term, VType())
            ty_v = eval_term(ctx, (), ty)
            body = elab.check(ctx, rd.body_term, ty_v)
            ty = elab.finish(ctx, ty)
            body = elab.finish(ctx, body)
            entry = GlobalEntry(rd.name, eval_term(ctx, (), ty), ty, body)
            self.ctx.define_global(entry)
            return DeclReport("def", rd.name, "ok", self._printed(ty), loc=rd.loc)
        if rd.kind == "postulate":
            ty = elab.check(ctx, rd.type_term, VType())
            ty = elab.finish(ctx, ty)
            entry = GlobalEntry(rd.name, eval_term(ctx, (), ty), ty, None)
            self.ctx.define_global(entry)
            return DeclReport("postulate", rd.name, "ok", self._printed(ty), loc=rd.loc)
        if rd.kind == "check":
            ty = elab.check(ctx, rd.type_term, VType())
            ty_v = eval_term(ctx, (), ty)
            body = elab.check(ctx, rd.body_term, ty_v)
            ty = elab.finish(ctx, ty)
            elab.finish(ctx, body)
            return DeclReport(
                "check", self._printed(rd.body_term), "ok", self._printed(ty), loc=rd.loc
            )
        if rd.kind == "eval":
            body, bty = elab.infer(ctx, rd.body_term)
            body, bty = elab.insert_implicits(ctx, body, bty)
            body = elab.finish(ctx, body)
            nf = normalize(ctx, body, bty)
            return DeclReport(
                "eval",
                self._printed(rd.body_term),
                "ok",
                self._printed(quote(ctx, 0, bty)),
                value_str=self._printed(nf),
                loc=rd.loc,
            )
        raise InternalError(f"unknown declaration kind {rd.kind!r}")
