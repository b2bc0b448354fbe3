"""Pretty-printer for core terms; output re-parses to an alpha-equal term."""

from __future__ import annotations

from typing import Iterable

from .core import (
    App,
    GlobalRef,
    Hole,
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
    Universe,
    Var,
)
from .prims import PRIM_SPECS
from .surface import RESERVED

_TERM, _EQ, _APP, _ATOM = 0, 1, 2, 3


def _uses_var(t: Term, idx: int) -> bool:
    match t:
        case Var(i):
            return i == idx
        case Pi(_, dom, cod, _):
            return _uses_var(dom, idx) or _uses_var(cod, idx + 1)
        case Lam(_, body):
            return _uses_var(body, idx + 1)
        case Sigma(_, fst, snd):
            return _uses_var(fst, idx) or _uses_var(snd, idx + 1)
        case App(f, a, _):
            return _uses_var(f, idx) or _uses_var(a, idx)
        case Pair(a, b):
            return _uses_var(a, idx) or _uses_var(b, idx)
        case Proj1(p) | Proj2(p):
            return _uses_var(p, idx)
        case Id(ty, a, b):
            return _uses_var(ty, idx) or _uses_var(a, idx) or _uses_var(b, idx)
        case Refl(a):
            return _uses_var(a, idx)
        case Prim(_, args):
            return any(_uses_var(a, idx) for a in args)
        case _:
            return False


class Printer:
    def __init__(self, names: Iterable[str] = (), avoid: Iterable[str] = ()):
        self.names = list(names)
        self.avoid = set(avoid) | RESERVED

    def _fresh(self, hint: str) -> str:
        if not hint or hint == "_":
            hint = "x"
        name = hint
        while name in self.avoid or name in self.names:
            name += "'"
        return name

    def show(self, t: Term, level: int = _TERM) -> str:
        s, lv = self._show(t)
        if lv < level:
            return f"({s})"
        return s

    def _binder(self, hint: str) -> str:
        name = self._fresh(hint)
        self.names.append(name)
        return name

    def _show(self, t: Term) -> tuple[str, int]:
        match t:
            case Var(i):
                if i >= len(self.names):
                    return f"x?{i - len(self.names)}", _ATOM
                return self.names[len(self.names) - 1 - i], _ATOM
            case Universe():
                return "Type", _ATOM
            case GlobalRef(n):
                return n, _ATOM
            case Hole(_):
                return "_", _ATOM
            case Pi(hint, dom, cod, imp):
                if not imp and not _uses_var(cod, 0):
                    dom_s = self.show(dom, _EQ)
                    self.names.append("_")
                    try:
                        cod_s = self.show(cod, _TERM)
                    finally:
                        self.names.pop()
                    return f"{dom_s} -> {cod_s}", _TERM
                dom_s = self.show(dom, _TERM)
                name = self._binder(hint)
                try:
                    cod_s = self.show(cod, _TERM)
                finally:
                    self.names.pop()
                open_, close = ("{", "}") if imp else ("(", ")")
                return f"{open_}{name} : {dom_s}{close} -> {cod_s}", _TERM
            case Lam(hint, body):
                name = self._binder(hint)
                try:
                    body_s = self.show(body, _TERM)
                finally:
                    self.names.pop()
                return f"fun {name} => {body_s}", _TERM
            case Sigma(hint, fst, snd):
                fst_s = self.show(fst, _TERM)
                name = self._binder(hint)
                try:
                    snd_s = self.show(snd, _TERM)
                finally:
                    self.names.pop()
                return f"Sig ({name} : {fst_s}) , {snd_s}", _TERM
            case App(f, a, imp):
                f_s = self.show(f, _APP)
                if imp:
                    return f"{f_s} {{{self.show(a, _TERM)}}}", _APP
                return f"{f_s} {self.show(a, _ATOM)}", _APP
            case Pair(a, b):
                return f"({self.show(a, _TERM)}, {self.show(b, _TERM)})", _ATOM
            case Proj1(p):
                return f"{self.show(p, _ATOM)}.1", _ATOM
            case Proj2(p):
                return f"{self.show(p, _ATOM)}.2", _ATOM
            case Id(ty, a, b):
                return (
                    f"{self.show(a, _APP)} = {self.show(b, _APP)} in {self.show(ty, _APP)}",
                    _EQ,
                )
            case Refl(a):
                return f"refl {self.show(a, _ATOM)}", _APP
            case Prim(op, args):
                if not args:
                    return op, _ATOM
                spec = PRIM_SPECS[op]
                parts = [op]
                for slot, arg in zip(spec.stored_slots, args):
                    if slot.implicit:
                        parts.append(f"{{{self.show(arg, _TERM)}}}")
                    else:
                        parts.append(self.show(arg, _ATOM))
                return " ".join(parts), _APP
            case _:
                raise AssertionError(f"cannot print {type(t).__name__}")


def show_term(t: Term, names: Iterable[str] = (), avoid: Iterable[str] = ()) -> str:
    return Printer(names, avoid).show(t)
