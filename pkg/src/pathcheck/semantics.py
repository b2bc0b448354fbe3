"""Normalization by evaluation and the conversion judgment.

Terms evaluate into a semantic domain (closures for binders, spines for
stuck eliminations); quoting reads values back as beta-normal terms,
eta-long for Pi and Sigma wherever a type is supplied. Conversion compares
values structurally with on-the-fly eta; defined globals stay glued to
their unfolding and are only expanded when a spine comparison fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .core import (
    App,
    Context,
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
)


class Value:
    pass


@dataclass(frozen=True)
class Closure:
    env: tuple
    body: Term


@dataclass(frozen=True)
class VType(Value):
    pass


@dataclass(frozen=True)
class VPi(Value):
    name: str
    domain: Value
    codomain: Closure
    implicit: bool = False


@dataclass(frozen=True)
class VLam(Value):
    name: str
    body: Closure


@dataclass(frozen=True)
class VSigma(Value):
    name: str
    first: Value
    second: Closure


@dataclass(frozen=True)
class VPair(Value):
    fst: Value
    snd: Value


@dataclass(frozen=True)
class VId(Value):
    type: Value
    lhs: Value
    rhs: Value


@dataclass(frozen=True)
class VRefl(Value):
    point: Value


@dataclass(frozen=True)
class HVar:
    level: int


@dataclass(frozen=True)
class HPost:
    name: str


@dataclass(frozen=True)
class HPrim:
    op: str
    args: tuple


@dataclass(frozen=True)
class EApp:
    arg: Value
    implicit: bool = False


@dataclass(frozen=True)
class EProj1:
    pass


@dataclass(frozen=True)
class EProj2:
    pass


@dataclass(frozen=True)
class VRigid(Value):
    """Neutral value: variable, postulate, or stuck primitive, plus eliminations."""

    head: object
    spine: tuple = ()


@dataclass(frozen=True)
class VFlex(Value):
    """Occurrence of an unsolved elaboration hole."""

    meta: int
    spine: tuple = ()


class Lazy:
    """Memoized thunk; forcing counts as one delta step."""

    __slots__ = ("fn", "value", "forced")

    def __init__(self, fn: Callable[[], Value]):
        self.fn = fn
        self.value: Optional[Value] = None
        self.forced = False

    def force(self) -> Value:
        if not self.forced:
            self.value = self.fn()
            self.forced = True
            self.fn = None  # type: ignore[assignment]
        return self.value  # type: ignore[return-value]


@dataclass(frozen=True)
class VTop(Value):
    """Defined global kept in spine form, glued to its lazy unfolding."""

    name: str
    spine: tuple
    unfolded: Lazy


_REFLEXIVE_CELL_OPS = {
    "concat",
    "inv",
    "transport",
    "ap",
    "apd",
    "ap-concat",
    "ct-cong",
    "transport-concat",
    "J",
}


def force(ctx: Context, v: Value) -> Value:
    """Chase solved holes until the value's head is informative."""
    while isinstance(v, VFlex):
        entry = ctx.metas.entries.get(v.meta)
        if entry is None or entry.solution is None:
            return v
        ctx.budget.spend()
        v = _apply_spine(ctx, entry.solution, v.spine)
    return v


def _apply_spine(ctx: Context, v: Value, spine: tuple) -> Value:
    for e in spine:
        match e:
            case EApp(arg, imp):
                v = apply_value(ctx, v, arg, imp)
            case EProj1():
                v = proj1_value(ctx, v)
            case EProj2():
                v = proj2_value(ctx, v)
    return v


def apply_closure(ctx: Context, cl: Closure, v: Value) -> Value:
    ctx.budget.spend()
    return eval_term(ctx, (v,) + cl.env, cl.body)


def apply_value(ctx: Context, f: Value, a: Value, implicit: bool = False) -> Value:
    f = force(ctx, f)
    match f:
        case VLam(_, body):
            return apply_closure(ctx, body, a)
        case VRigid(head, spine):
            return VRigid(head, spine + (EApp(a, implicit),))
        case VFlex(m, spine):
            return VFlex(m, spine + (EApp(a, implicit),))
        case VTop(name, spine, unf):
            return VTop(
                name,
                spine + (EApp(a, implicit),),
                Lazy(lambda: apply_value(ctx, unf.force(), a, implicit)),
            )
        case _:
            raise InternalError(f"application of non-function value {type(f).__name__}")


def proj1_value(ctx: Context, v: Value) -> Value:
    v = force(ctx, v)
    match v:
        case VPair(fst, _):
            ctx.budget.spend()
            return fst
        case VRigid(head, spine):
            return VRigid(head, spine + (EProj1(),))
        case VFlex(m, spine):
            return VFlex(m, spine + (EProj1(),))
        case VTop(name, spine, unf):
            return VTop(name, spine + (EProj1(),), Lazy(lambda: proj1_value(ctx, unf.force())))
        case _:
            raise InternalError("first projection of a non-pair value")


def proj2_value(ctx: Context, v: Value) -> Value:
    v = force(ctx, v)
    match v:
        case VPair(_, snd):
            ctx.budget.spend()
            return snd
        case VRigid(head, spine):
            return VRigid(head, spine + (EProj2(),))
        case VFlex(m, spine):
            return VFlex(m, spine + (EProj2(),))
        case VTop(name, spine, unf):
            return VTop(name, spine + (EProj2(),), Lazy(lambda: proj2_value(ctx, unf.force())))
        case _:
            raise InternalError("second projection of a non-pair value")


def global_value(ctx: Context, name: str) -> Value:
    entry = ctx.globals.get(name)
    if entry is None:
        raise InternalError(f"unknown global {name!r}")
    if entry.is_postulate:
        return VRigid(HPost(name), ())
    if entry.cached_value is None:
        body = entry.body_term
        entry.cached_value = VTop(name, (), Lazy(lambda: _delta(ctx, body)))
    return entry.cached_value


def _delta(ctx: Context, body: Term) -> Value:
    ctx.budget.spend()
    return eval_term(ctx, (), body)


def _is_const(ctx: Context, v: Value, op: str) -> bool:
    v = whnf_unfold(ctx, v)
    return isinstance(v, VRigid) and v.spine == () and isinstance(v.head, HPrim) and v.head.op == op


def _as_refl(ctx: Context, v: Value) -> Optional[VRefl]:
    """The value as a canonical identity path, unfolding globals if needed."""
    v = whnf_unfold(ctx, v)
    return v if isinstance(v, VRefl) else None


def prim_value(ctx: Context, op: str, args: tuple) -> Value:
    """Apply a primitive's computation rule if its principal arguments permit."""
    reduced = _prim_reduce(ctx, op, args)
    if reduced is not None:
        ctx.budget.spend()
        return reduced
    return VRigid(HPrim(op, args), ())


def _prim_reduce(ctx: Context, op: str, args: tuple) -> Optional[Value]:
    match op:
        case "J":
            _, d, _, _, p = args
            p = _as_refl(ctx, p)
            if p is not None:
                return apply_value(ctx, d, p.point)
        case "transport":
            _, p, u = args
            if _as_refl(ctx, p) is not None:
                return u
        case "ap" | "apd":
            f, p = args
            p = _as_refl(ctx, p)
            if p is not None:
                return VRefl(apply_value(ctx, f, p.point))
        case "concat":
            p, q = args
            p = _as_refl(ctx, p)
            if p is not None and _as_refl(ctx, q) is not None:
                return p
        case "inv":
            (p,) = args
            p = _as_refl(ctx, p)
            if p is not None:
                return p
        case "ap-concat":
            f, p, q = args
            p = _as_refl(ctx, p)
            if p is not None and _as_refl(ctx, q) is not None:
                return VRefl(VRefl(apply_value(ctx, f, p.point)))
        case "ct-cong":
            be, ga = args
            be = _as_refl(ctx, be)
            ga = _as_refl(ctx, ga)
            if be is not None and ga is not None:
                return VRefl(prim_value(ctx, "concat", (be.point, ga.point)))
        case "transport-concat":
            _, p, q, u = args
            if _as_refl(ctx, p) is not None and _as_refl(ctx, q) is not None:
                return VRefl(u)
        case "S1-rec" | "S1-ind":
            if _is_const(ctx, args[3], "base"):
                return args[1]
        case "T2-rec" | "T2-ind":
            if _is_const(ctx, args[5], "Tb"):
                return args[1]
    return None


def eval_term(ctx: Context, env: tuple, t: Term) -> Value:
    match t:
        case Var(i):
            if i >= len(env):
                raise InternalError(f"Var({i}) escapes environment of size {len(env)}")
            return env[i]
        case Universe():
            return VType()
        case Pi(n, dom, cod, imp):
            return VPi(n, eval_term(ctx, env, dom), Closure(env, cod), imp)
        case Lam(n, body):
            return VLam(n, Closure(env, body))
        case App(f, a, imp):
            return apply_value(ctx, eval_term(ctx, env, f), eval_term(ctx, env, a), imp)
        case Sigma(n, fst, snd):
            return VSigma(n, eval_term(ctx, env, fst), Closure(env, snd))
        case Pair(a, b):
            return VPair(eval_term(ctx, env, a), eval_term(ctx, env, b))
        case Proj1(p):
            return proj1_value(ctx, eval_term(ctx, env, p))
        case Proj2(p):
            return proj2_value(ctx, eval_term(ctx, env, p))
        case Id(ty, a, b):
            return VId(eval_term(ctx, env, ty), eval_term(ctx, env, a), eval_term(ctx, env, b))
        case Refl(a):
            return VRefl(eval_term(ctx, env, a))
        case GlobalRef(n):
            return global_value(ctx, n)
        case Hole(m):
            # Holes are bare meta references; the resolver applies them to
            # their scope variables explicitly, so no context is added here.
            entry = ctx.metas.entries.get(m)
            if entry is not None and entry.solution is not None:
                return entry.solution
            return VFlex(m, ())
        case Prim(op, args):
            return prim_value(ctx, op, tuple(eval_term(ctx, env, a) for a in args))
        case _:
            raise InternalError(f"cannot evaluate {type(t).__name__}")


def fresh_var(level: int) -> Value:
    return VRigid(HVar(level), ())


def whnf_unfold(ctx: Context, v: Value) -> Value:
    """Force holes and unfold glued globals until the head shape is visible."""
    v = force(ctx, v)
    while isinstance(v, VTop):
        ctx.budget.spend()
        v = force(ctx, v.unfolded.force())
    return v


# --- quoting ---------------------------------------------------------------


def quote(
    ctx: Context,
    depth: int,
    v: Value,
    ty: Optional[Value] = None,
    unfold: bool = True,
) -> Term:
    """Read a value back as a term; eta-expands when `ty` exposes Pi or Sigma.

    With unfold=False, defined globals stay in spine form instead of being
    delta-expanded (used for hole solutions and elaborated output).
    """
    if ty is not None:
        ty = whnf_unfold(ctx, ty)
        if isinstance(ty, VPi):
            var = fresh_var(depth)
            body = apply_value(ctx, v, var, ty.implicit)
            return Lam(
                ty.name,
                quote(ctx, depth + 1, body, apply_closure(ctx, ty.codomain, var), unfold),
            )
        if isinstance(ty, VSigma):
            fst = proj1_value(ctx, v)
            snd = proj2_value(ctx, v)
            return Pair(
                quote(ctx, depth, fst, ty.first, unfold),
                quote(ctx, depth, snd, apply_closure(ctx, ty.second, fst), unfold),
            )
    v = force(ctx, v)
    match v:
        case VType():
            return Universe()
        case VPi(n, dom, cod, imp):
            var = fresh_var(depth)
            return Pi(
                n,
                quote(ctx, depth, dom, None, unfold),
                quote(ctx, depth + 1, apply_closure(ctx, cod, var), None, unfold),
                imp,
            )
        case VLam(n, body):
            var = fresh_var(depth)
            return Lam(n, quote(ctx, depth + 1, apply_closure(ctx, body, var), None, unfold))
        case VSigma(n, fst, snd):
            var = fresh_var(depth)
            return Sigma(
                n,
                quote(ctx, depth, fst, None, unfold),
                quote(ctx, depth + 1, apply_closure(ctx, snd, var), None, unfold),
            )
        case VPair(a, b):
            return Pair(quote(ctx, depth, a, None, unfold), quote(ctx, depth, b, None, unfold))
        case VId(t, a, b):
            return Id(
                quote(ctx, depth, t, None, unfold),
                quote(ctx, depth, a, None, unfold),
                quote(ctx, depth, b, None, unfold),
            )
        case VRefl(a):
            return Refl(quote(ctx, depth, a, None, unfold))
        case VTop(name, spine, unf):
            if unfold:
                return quote(ctx, depth, unf.force(), None, unfold)
            return _quote_spine(ctx, depth, GlobalRef(name), spine, unfold)
        case VRigid(head, spine):
            return _quote_spine(ctx, depth, _quote_head(ctx, depth, head, unfold), spine, unfold)
        case VFlex(m, spine):
            return _quote_spine(ctx, depth, Hole(m), spine, unfold)
        case _:
            raise InternalError(f"cannot quote {type(v).__name__}")


def _quote_head(ctx: Context, depth: int, head, unfold: bool) -> Term:
    match head:
        case HVar(level):
            if level >= depth:
                raise InternalError(f"level {level} escapes depth {depth}")
            return Var(depth - 1 - level)
        case HPost(name):
            return GlobalRef(name)
        case HPrim(op, args):
            return Prim(op, tuple(quote(ctx, depth, a, None, unfold) for a in args))
        case _:
            raise InternalError("unknown neutral head")


def _quote_spine(ctx: Context, depth: int, acc: Term, spine: tuple, unfold: bool) -> Term:
    for e in spine:
        match e:
            case EApp(arg, imp):
                acc = App(acc, quote(ctx, depth, arg, None, unfold), imp)
            case EProj1():
                acc = Proj1(acc)
            case EProj2():
                acc = Proj2(acc)
    return acc


def normalize(ctx: Context, t: Term, ty: Optional[Value] = None) -> Term:
    return quote(ctx, ctx.depth, eval_term(ctx, ctx.env, t), ty)


# --- hole solving ----------------------------------------------------------


class _SolutionFailure(Exception):
    pass


def _pattern_levels(ctx: Context, spine: tuple) -> Optional[list[int]]:
    """Spine levels if the spine is applications of distinct rigid variables."""
    levels: list[int] = []
    for e in spine:
        if not isinstance(e, EApp):
            return None
        arg = force(ctx, e.arg)
        if not (isinstance(arg, VRigid) and isinstance(arg.head, HVar) and arg.spine == ()):
            return None
        if arg.head.level in levels:
            return None
        levels.append(arg.head.level)
    return levels


def _hole_spine(t: Term) -> Optional[tuple[int, list[Term]]]:
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    if isinstance(t, Hole):
        args.reverse()
        return t.id, args
    return None


class _Renamer:
    """Rewrites a quoted right-hand side into a hole's own scope.

    Out-of-scope variables are fatal unless they only occur in the spine of
    another unsolved hole, in which case that hole is pruned to the smaller
    scope first.
    """

    def __init__(self, ctx: Context, meta: int, mapping: dict[int, int]):
        self.ctx = ctx
        self.meta = meta
        self.mapping = mapping

    def _prune(self, hole_id: int, args: list[Term], cutoff: int) -> Optional[Term]:
        entry = self.ctx.metas.entries.get(hole_id)
        if entry is None or entry.solution is not None:
            return None
        kept: list[int] = []
        for j, a in enumerate(args):
            if not isinstance(a, Var):
                return None
            if a.index < cutoff or (a.index - cutoff) in self.mapping:
                kept.append(j)
        if len(kept) == len(args):
            return None  # nothing to prune; normal path applies
        fresh = self.ctx.metas.fresh(len(kept), entry.location)
        k = len(args)
        body: Term = Hole(fresh.id)
        for j in kept:
            body = App(body, Var(k - 1 - j))
        for _ in range(k):
            body = Lam("x", body)
        entry.solution = eval_term(self.ctx, (), body)
        out: Term = Hole(fresh.id)
        for j in kept:
            out = App(out, self.run(args[j], cutoff))
        return out

    def run(self, t: Term, cutoff: int = 0) -> Term:
        hs = _hole_spine(t)
        if hs is not None and isinstance(t, App):
            hole_id, args = hs
            if hole_id == self.meta:
                raise _SolutionFailure("occurs check failed")
            pruned = self._prune(hole_id, args, cutoff)
            if pruned is not None:
                return pruned
        match t:
            case Var(i):
                if i < cutoff:
                    return t
                outer = i - cutoff
                if outer not in self.mapping:
                    raise _SolutionFailure("solution escapes the hole's scope")
                return Var(self.mapping[outer] + cutoff)
            case Hole(m):
                if m == self.meta:
                    raise _SolutionFailure("occurs check failed")
                return t
            case Pi(name, dom, cod, imp):
                return Pi(name, self.run(dom, cutoff), self.run(cod, cutoff + 1), imp)
            case Lam(name, body):
                return Lam(name, self.run(body, cutoff + 1))
            case Sigma(name, fst, snd):
                return Sigma(name, self.run(fst, cutoff), self.run(snd, cutoff + 1))
            case App(f, a, imp):
                return App(self.run(f, cutoff), self.run(a, cutoff), imp)
            case Pair(a, b):
                return Pair(self.run(a, cutoff), self.run(b, cutoff))
            case Proj1(p):
                return Proj1(self.run(p, cutoff))
            case Proj2(p):
                return Proj2(self.run(p, cutoff))
            case Id(ty, a, b):
                return Id(self.run(ty, cutoff), self.run(a, cutoff), self.run(b, cutoff))
            case Refl(a):
                return Refl(self.run(a, cutoff))
            case Prim(op, args):
                return Prim(op, tuple(self.run(a, cutoff) for a in args))
            case _:
                return t


def eta_expand_projected(ctx: Context, v: VFlex) -> bool:
    """Split a hole that is being projected into a pair of fresh holes.

    Sound because a projection only ever applies at a pair type; makes
    `?m.1 = rhs` solvable by the first-order rule afterwards.
    """
    k = 0
    seen_proj = False
    for e in v.spine:
        if isinstance(e, EApp) and not seen_proj:
            k += 1
        elif isinstance(e, (EProj1, EProj2)):
            seen_proj = True
    if not seen_proj:
        return False
    entry = ctx.metas.entries.get(v.meta)
    if entry is None or entry.solution is not None:
        return False
    m1 = ctx.metas.fresh(k, entry.location)
    m2 = ctx.metas.fresh(k, entry.location)
    fst: Term = Hole(m1.id)
    snd: Term = Hole(m2.id)
    for i in range(k - 1, -1, -1):
        fst = App(fst, Var(i))
        snd = App(snd, Var(i))
    body: Term = Pair(fst, snd)
    for _ in range(k):
        body = Lam("x", body)
    entry.solution = eval_term(ctx, (), body)
    return True


def try_solve(ctx: Context, meta: int, spine: tuple, rhs: Value, depth: int) -> bool:
    """First-order hole assignment; lambda-closes over a spine of distinct variables."""
    levels = _pattern_levels(ctx, spine)
    if levels is None:
        return False
    entry = ctx.metas.entries.get(meta)
    if entry is None:
        return False
    try:
        body = quote(ctx, depth, rhs, None, unfold=False)
        mapping = {depth - 1 - lvl: len(levels) - 1 - j for j, lvl in enumerate(levels)}
        body = _Renamer(ctx, meta, mapping).run(body)
    except (_SolutionFailure, InternalError):
        return False
    for _ in range(len(levels)):
        body = Lam("x", body)
    entry.solution = eval_term(ctx, (), body)
    return True


# --- conversion ------------------------------------------------------------


def conv(ctx: Context, a: Value, b: Value, ty: Optional[Value] = None) -> bool:
    """Definitional equality at an optional type (used for top-level eta)."""
    depth = ctx.depth
    if ty is not None:
        ty_w = whnf_unfold(ctx, ty)
        if isinstance(ty_w, VPi):
            var = fresh_var(depth)
            ctx2 = ctx.push(ty_w.name, ty_w.domain)
            return conv(
                ctx2,
                apply_value(ctx, a, var, ty_w.implicit),
                apply_value(ctx, b, var, ty_w.implicit),
                apply_closure(ctx, ty_w.codomain, var),
            )
        if isinstance(ty_w, VSigma):
            fa = proj1_value(ctx, a)
            fb = proj1_value(ctx, b)
            return conv(ctx, fa, fb, ty_w.first) and conv(
                ctx, proj2_value(ctx, a), proj2_value(ctx, b), apply_closure(ctx, ty_w.second, fa)
            )
    return _conv(ctx, depth, a, b, solve=True)


def _conv_spine(ctx: Context, depth: int, sp1: tuple, sp2: tuple, solve: bool) -> bool:
    if len(sp1) != len(sp2):
        return False
    for e1, e2 in zip(sp1, sp2):
        match e1, e2:
            case EApp(a1, _), EApp(a2, _):
                if not _conv(ctx, depth, a1, a2, solve):
                    return False
            case EProj1(), EProj1():
                pass
            case EProj2(), EProj2():
                pass
            case _:
                return False
    return True


def _conv_head(ctx: Context, depth: int, h1, h2, solve: bool) -> bool:
    match h1, h2:
        case HVar(l1), HVar(l2):
            return l1 == l2
        case HPost(n1), HPost(n2):
            return n1 == n2
        case HPrim(op1, args1), HPrim(op2, args2):
            return (
                op1 == op2
                and len(args1) == len(args2)
                and all(_conv(ctx, depth, a1, a2, solve) for a1, a2 in zip(args1, args2))
            )
        case _:
            return False


def _conv(ctx: Context, depth: int, a: Value, b: Value, solve: bool) -> bool:
    a = force(ctx, a)
    b = force(ctx, b)
    if a is b:
        return True

    if isinstance(a, VFlex) or isinstance(b, VFlex):
        if isinstance(a, VFlex) and isinstance(b, VFlex) and a.meta == b.meta:
            return _conv_spine(ctx, depth, a.spine, b.spine, solve)
        if not solve:
            return False
        if isinstance(a, VFlex) and eta_expand_projected(ctx, a):
            return _conv(ctx, depth, a, b, solve)
        if isinstance(b, VFlex) and eta_expand_projected(ctx, b):
            return _conv(ctx, depth, a, b, solve)
        if isinstance(a, VFlex) and try_solve(ctx, a.meta, a.spine, b, depth):
            return True
        if isinstance(b, VFlex) and try_solve(ctx, b.meta, b.spine, a, depth):
            return True
        return False

    if isinstance(a, VTop) and isinstance(b, VTop):
        if a.name == b.name and _conv_spine(ctx, depth, a.spine, b.spine, solve=False):
            return True
        return _conv(ctx, depth, a.unfolded.force(), b.unfolded.force(), solve)
    if isinstance(a, VTop):
        return _conv(ctx, depth, a.unfolded.force(), b, solve)
    if isinstance(b, VTop):
        return _conv(ctx, depth, a, b.unfolded.force(), solve)

    match a, b:
        case VType(), VType():
            return True
        case VPi(_, dom1, cod1, imp1), VPi(_, dom2, cod2, imp2):
            if imp1 != imp2 or not _conv(ctx, depth, dom1, dom2, solve):
                return False
            var = fresh_var(depth)
            return _conv(
                ctx,
                depth + 1,
                apply_closure(ctx, cod1, var),
                apply_closure(ctx, cod2, var),
                solve,
            )
        case VSigma(_, fst1, snd1), VSigma(_, fst2, snd2):
            if not _conv(ctx, depth, fst1, fst2, solve):
                return False
            var = fresh_var(depth)
            return _conv(
                ctx,
                depth + 1,
                apply_closure(ctx, snd1, var),
                apply_closure(ctx, snd2, var),
                solve,
            )
        case VLam(_, body1), VLam(_, body2):
            var = fresh_var(depth)
            return _conv(
                ctx,
                depth + 1,
                apply_closure(ctx, body1, var),
                apply_closure(ctx, body2, var),
                solve,
            )
        case VLam(_, body), _:
            var = fresh_var(depth)
            return _conv(
                ctx,
                depth + 1,
                apply_closure(ctx, body, var),
                apply_value(ctx, b, var),
                solve,
            )
        case _, VLam(_, body):
            var = fresh_var(depth)
            return _conv(
                ctx,
                depth + 1,
                apply_value(ctx, a, var),
                apply_closure(ctx, body, var),
                solve,
            )
        case VPair(a1, a2), VPair(b1, b2):
            return _conv(ctx, depth, a1, b1, solve) and _conv(ctx, depth, a2, b2, solve)
        case VPair(a1, a2), _:
            return _conv(ctx, depth, a1, proj1_value(ctx, b), solve) and _conv(
                ctx, depth, a2, proj2_value(ctx, b), solve
            )
        case _, VPair(b1, b2):
            return _conv(ctx, depth, proj1_value(ctx, a), b1, solve) and _conv(
                ctx, depth, proj2_value(ctx, a), b2, solve
            )
        case VId(t1, l1, r1), VId(t2, l2, r2):
            return (
                _conv(ctx, depth, t1, t2, solve)
                and _conv(ctx, depth, l1, l2, solve)
                and _conv(ctx, depth, r1, r2, solve)
            )
        case VRefl(p1), VRefl(p2):
            return _conv(ctx, depth, p1, p2, solve)
        case VRigid(h1, sp1), VRigid(h2, sp2):
            return _conv_head(ctx, depth, h1, h2, solve) and _conv_spine(
                ctx, depth, sp1, sp2, solve
            )
        case _:
            return False


def head_shape(ctx: Context, v: Value) -> tuple:
    """Coarse head tag used to tell type-mismatch from not-convertible."""
    v = whnf_unfold(ctx, v)
    match v:
        case VType():
            return ("Type",)
        case VPi(_, _, _, imp):
            return ("Pi", imp)
        case VSigma(_, _, _):
            return ("Sigma",)
        case VId(_, _, _):
            return ("Id",)
        case VRigid(HPrim(op, _), ()):
            return ("prim", op)
        case _:
            return ("value",)
