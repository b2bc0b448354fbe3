"""Core term language: de Bruijn syntax, substitution, contexts.

Terms are immutable; all binders are de Bruijn indices and surface names
survive only as printing hints. Everything downstream (evaluation, the
kernel, the printer) consumes these types.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional


class InternalError(Exception):
    """Invariant violation inside the checker itself (not a user error)."""


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    index: int


@dataclass(frozen=True)
class Universe(Term):
    pass


@dataclass(frozen=True)
class Pi(Term):
    name: str
    domain: Term
    codomain: Term
    implicit: bool = False


@dataclass(frozen=True)
class Lam(Term):
    name: str
    body: Term


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term
    implicit: bool = False


@dataclass(frozen=True)
class Sigma(Term):
    name: str
    first: Term
    second: Term


@dataclass(frozen=True)
class Pair(Term):
    fst: Term
    snd: Term


@dataclass(frozen=True)
class Proj1(Term):
    pair: Term


@dataclass(frozen=True)
class Proj2(Term):
    pair: Term


@dataclass(frozen=True)
class Id(Term):
    type: Term
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Refl(Term):
    point: Term


@dataclass(frozen=True)
class GlobalRef(Term):
    name: str


@dataclass(frozen=True)
class Hole(Term):
    """Surface-only placeholder; elaborated terms never contain one."""

    id: int


@dataclass(frozen=True)
class Prim(Term):
    """Built-in operator applied to its stored arguments.

    Covers the identity eliminator, the path operators, and both
    higher inductive types. Argument counts per op live in prims.py;
    none of the arguments bind variables.
    """

    op: str
    args: tuple[Term, ...]


def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Displace free Var indices >= cutoff by `by`; bound structure unchanged."""
    match t:
        case Var(i):
            if i < cutoff:
                return t
            if i + by < 0:
                raise InternalError(f"shift produced negative index from Var({i})")
            return Var(i + by)
        case Pi(n, dom, cod, imp):
            return Pi(n, shift(dom, by, cutoff), shift(cod, by, cutoff + 1), imp)
        case Lam(n, body):
            return Lam(n, shift(body, by, cutoff + 1))
        case App(f, a, imp):
            return App(shift(f, by, cutoff), shift(a, by, cutoff), imp)
        case Sigma(n, fst, snd):
            return Sigma(n, shift(fst, by, cutoff), shift(snd, by, cutoff + 1))
        case Pair(a, b):
            return Pair(shift(a, by, cutoff), shift(b, by, cutoff))
        case Proj1(p):
            return Proj1(shift(p, by, cutoff))
        case Proj2(p):
            return Proj2(shift(p, by, cutoff))
        case Id(ty, a, b):
            return Id(shift(ty, by, cutoff), shift(a, by, cutoff), shift(b, by, cutoff))
        case Refl(a):
            return Refl(shift(a, by, cutoff))
        case Prim(op, args):
            return Prim(op, tuple(shift(a, by, cutoff) for a in args))
        case _:
            return t


def subst(t: Term, replacement: Term, index: int = 0) -> Term:
    """Capture-avoiding substitution of `replacement` for Var(index).

    Free variables above `index` are renormalized downward.
    """
    match t:
        case Var(i):
            if i == index:
                return replacement
            return Var(i - 1) if i > index else t
        case Pi(n, dom, cod, imp):
            return Pi(
                n,
                subst(dom, replacement, index),
                subst(cod, shift(replacement, 1), index + 1),
                imp,
            )
        case Lam(n, body):
            return Lam(n, subst(body, shift(replacement, 1), index + 1))
        case App(f, a, imp):
            return App(subst(f, replacement, index), subst(a, replacement, index), imp)
        case Sigma(n, fst, snd):
            return Sigma(
                n,
                subst(fst, replacement, index),
                subst(snd, shift(replacement, 1), index + 1),
            )
        case Pair(a, b):
            return Pair(subst(a, replacement, index), subst(b, replacement, index))
        case Proj1(p):
            return Proj1(subst(p, replacement, index))
        case Proj2(p):
            return Proj2(subst(p, replacement, index))
        case Id(ty, a, b):
            return Id(
                subst(ty, replacement, index),
                subst(a, replacement, index),
                subst(b, replacement, index),
            )
        case Refl(a):
            return Refl(subst(a, replacement, index))
        case Prim(op, args):
            return Prim(op, tuple(subst(a, replacement, index) for a in args))
        case _:
            return t


@dataclass
class Budget:
    """Mutable reduction-step allowance shared by one checking run."""

    limit: int
    used: int = 0

    def spend(self) -> None:
        self.used += 1
        if self.used > self.limit:
            from .diagnostics import StepBudgetExceeded

            raise StepBudgetExceeded(self.limit)

    def reset(self) -> None:
        self.used = 0


@dataclass
class MetaEntry:
    """One elaboration hole: its scope size, type, solution, and origin."""

    id: int
    n_locals: int
    type_value: Any = None
    solution: Any = None
    location: Any = None


@dataclass
class MetaStore:
    entries: dict[int, MetaEntry] = field(default_factory=dict)
    next_id: int = 0

    def fresh(self, n_locals: int, location: Any = None) -> MetaEntry:
        e = MetaEntry(self.next_id, n_locals, location=location)
        self.next_id += 1
        self.entries[e.id] = e
        return e

    def register(self, hole_id: int, n_locals: int, location: Any = None) -> MetaEntry:
        if hole_id in self.entries:
            return self.entries[hole_id]
        e = MetaEntry(hole_id, n_locals, location=location)
        self.next_id = max(self.next_id, hole_id + 1)
        self.entries[hole_id] = e
        return e

    def unsolved(self) -> list[MetaEntry]:
        return [e for e in self.entries.values() if e.solution is None]


@dataclass
class GlobalEntry:
    """A checked top-level name: type value, and a definition unless postulated."""

    name: str
    type_value: Any
    type_term: Term
    body_term: Optional[Term] = None
    cached_value: Any = None

    @property
    def is_postulate(self) -> bool:
        return self.body_term is None


@dataclass
class Context:
    """Telescope of typed local bindings plus the global environment.

    Immutable by convention: extending operations return new contexts
    sharing globals, the meta store, and the step budget.
    """

    globals: dict[str, GlobalEntry] = field(default_factory=dict)
    locals: tuple[tuple[str, Any], ...] = ()
    env: tuple = ()  # evaluation environment mirroring `locals`
    metas: MetaStore = field(default_factory=MetaStore)
    budget: Budget = field(default_factory=lambda: Budget(10_000_000))

    @property
    def depth(self) -> int:
        return len(self.locals)

    def push(self, name: str, type_value: Any) -> "Context":
        from .semantics import VRigid, HVar

        v = VRigid(HVar(self.depth), ())
        return Context(
            globals=self.globals,
            locals=self.locals + ((name, type_value),),
            env=(v,) + self.env,
            metas=self.metas,
            budget=self.budget,
        )

    def push_value(self, name: str, type_value: Any, value: Any) -> "Context":
        return Context(
            globals=self.globals,
            locals=self.locals + ((name, type_value),),
            env=(value,) + self.env,
            metas=self.metas,
            budget=self.budget,
        )

    def local_type(self, index: int) -> Any:
        if index >= self.depth:
            raise InternalError(f"Var({index}) out of scope at depth {self.depth}")
        return self.locals[self.depth - 1 - index][1]

    def local_name(self, index: int) -> str:
        return self.locals[self.depth - 1 - index][0]

    def define_global(self, entry: GlobalEntry) -> None:
        if entry.name in self.globals:
            raise InternalError(f"duplicate global {entry.name!r}")
        self.globals[entry.name] = entry

    def fresh_metas(self) -> "Context":
        return Context(
            globals=self.globals,
            locals=self.locals,
            env=self.env,
            metas=MetaStore(),
            budget=self.budget,
        )
