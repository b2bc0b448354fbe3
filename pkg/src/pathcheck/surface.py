"""Surface language: lexing, parsing, and scope resolution into core terms.

The textual format is line-comment `--`, UTF-8, with declarations
`def`, `postulate`, `check`, and `eval`. Resolution turns identifiers into
de Bruijn variables, global references, or built-in operator nodes, and
`_` into holes applied to every binder in scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

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
    shift,
)
from .diagnostics import CheckError, Diagnostic, Loc
from .prims import PRIM_SPECS, PrimSpec, is_prim

STRUCTURAL_KEYWORDS = {"def", "postulate", "check", "eval", "fun", "Sig", "in", "Type"}
RESERVED = STRUCTURAL_KEYWORDS | set(PRIM_SPECS)

_APP_STOPPERS = {"in", "def", "postulate", "check", "eval", "fun", "Sig"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    loc: Loc


def _ident_continue(text: str, i: int) -> bool:
    c = text[i]
    if c.isalnum() or c in "_'":
        return True
    if c == "-" and i + 1 < len(text) and (text[i + 1].isalnum() or text[i + 1] in "_'"):
        return True
    return False


def tokenize(text: str, filename: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)

    def loc() -> Loc:
        return Loc(filename, line, col)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            advance(1)
            continue
        if c == "-" and i + 1 < n and text[i + 1] == "-":
            while i < n and text[i] != "\n":
                advance(1)
            continue
        start = loc()
        if c.isalpha():
            j = i
            while j < n and _ident_continue(text, j):
                j += 1
            word = text[i:j]
            advance(j - i)
            tokens.append(Token("IDENT", word, start))
            continue
        if c == "-" and i + 1 < n and text[i + 1] == ">":
            advance(2)
            tokens.append(Token("ARROW", "->", start))
            continue
        if c == "=" and i + 1 < n and text[i + 1] == ">":
            advance(2)
            tokens.append(Token("DARROW", "=>", start))
            continue
        if c == ":" and i + 1 < n and text[i + 1] == "=":
            advance(2)
            tokens.append(Token("COLONEQ", ":=", start))
            continue
        if c == ".":
            if i + 1 < n and text[i + 1] in "12":
                kind = "DOT1" if text[i + 1] == "1" else "DOT2"
                advance(2)
                tokens.append(Token(kind, text[i : i + 2], start))
                continue
            raise CheckError(Diagnostic("lex", start, "expected '.1' or '.2' after '.'"))
        simple = {
            "(": "LPAREN",
            ")": "RPAREN",
            "{": "LBRACE",
            "}": "RBRACE",
            ":": "COLON",
            ",": "COMMA",
            "=": "EQ",
            "_": "UNDERSCORE",
        }
        if c in simple:
            advance(1)
            tokens.append(Token(simple[c], c, start))
            continue
        raise CheckError(Diagnostic("lex", start, f"illegal character {c!r}"))
    tokens.append(Token("EOF", "", loc()))
    return tokens


# --- surface expressions -----------------------------------------------------


@dataclass(frozen=True)
class SExpr:
    loc: Loc


@dataclass(frozen=True)
class SVar(SExpr):
    name: str


@dataclass(frozen=True)
class SType(SExpr):
    pass


@dataclass(frozen=True)
class SHole(SExpr):
    pass


@dataclass(frozen=True)
class SPi(SExpr):
    name: str
    domain: SExpr
    codomain: SExpr
    implicit: bool


@dataclass(frozen=True)
class SLam(SExpr):
    name: str
    body: SExpr


@dataclass(frozen=True)
class SApp(SExpr):
    fn: SExpr
    arg: SExpr
    implicit: bool


@dataclass(frozen=True)
class SSigma(SExpr):
    name: str
    first: SExpr
    second: SExpr


@dataclass(frozen=True)
class SPair(SExpr):
    fst: SExpr
    snd: SExpr


@dataclass(frozen=True)
class SProj1(SExpr):
    expr: SExpr


@dataclass(frozen=True)
class SProj2(SExpr):
    expr: SExpr


@dataclass(frozen=True)
class SEq(SExpr):
    lhs: SExpr
    rhs: SExpr
    type: Optional[SExpr]


@dataclass(frozen=True)
class SurfaceDecl:
    kind: str  # def | postulate | check | eval
    name: Optional[str]
    binders: tuple  # of (name, SExpr, implicit)
    type_expr: Optional[SExpr]
    body_expr: Optional[SExpr]
    loc: Loc


class _Backtrack(Exception):
    pass


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.committed = True

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def at_word(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "IDENT" and t.text == word

    def fail(self, expected: str):
        t = self.peek()
        found = t.text if t.kind != "EOF" else "end of input"
        if not self.committed:
            raise _Backtrack()
        raise CheckError(Diagnostic("parse", t.loc, f"expected {expected}, found {found!r}"))

    def expect(self, kind: str, what: str) -> Token:
        if not self.at(kind):
            self.fail(what)
        return self.advance()

    def ident(self, what: str = "an identifier") -> Token:
        t = self.peek()
        if t.kind != "IDENT":
            self.fail(what)
        return self.advance()

    # --- declarations ---

    def parse_module(self) -> list[SurfaceDecl]:
        decls = []
        while not self.at("EOF"):
            decls.append(self.parse_decl())
        return decls

    def parse_decl(self) -> SurfaceDecl:
        t = self.peek()
        if self.at_word("def"):
            loc = self.advance().loc
            name = self.ident("a definition name").text
            binders = self.parse_binder_groups()
            self.expect("COLON", "':'")
            ty = self.parse_term()
            self.expect("COLONEQ", "':='")
            body = self.parse_term()
            return SurfaceDecl("def", name, tuple(binders), ty, body, loc)
        if self.at_word("postulate"):
            loc = self.advance().loc
            name = self.ident("a postulate name").text
            self.expect("COLON", "':'")
            ty = self.parse_term()
            return SurfaceDecl("postulate", name, (), ty, None, loc)
        if self.at_word("check"):
            loc = self.advance().loc
            body = self.parse_term()
            self.expect("COLON", "':'")
            ty = self.parse_term()
            return SurfaceDecl("check", None, (), ty, body, loc)
        if self.at_word("eval"):
            loc = self.advance().loc
            body = self.parse_term()
            return SurfaceDecl("eval", None, (), None, body, loc)
        self.fail("'def', 'postulate', 'check', or 'eval'")
        raise AssertionError

    def parse_binder_groups(self) -> list[tuple[str, SExpr, bool]]:
        binders: list[tuple[str, SExpr, bool]] = []
        while self.at("LPAREN") or self.at("LBRACE"):
            binders.extend(self.parse_binder_group())
        return binders

    def parse_binder_group(self) -> list[tuple[str, SExpr, bool]]:
        implicit = self.at("LBRACE")
        close = "RBRACE" if implicit else "RPAREN"
        self.advance()
        names = [self.ident("a binder name").text]
        while self.peek().kind == "IDENT" and not self.at("COLON"):
            names.append(self.ident().text)
        self.expect("COLON", "':' in binder")
        ty = self.parse_term()
        self.expect(close, "'}'" if implicit else "')'")
        return [(n, ty, implicit) for n in names]

    # --- terms ---

    def parse_term(self) -> SExpr:
        if self.at_word("fun"):
            loc = self.advance().loc
            names = [self.ident("a parameter name").text]
            while self.peek().kind == "IDENT" and not self.at("DARROW"):
                names.append(self.ident().text)
            self.expect("DARROW", "'=>'")
            body = self.parse_term()
            for n in reversed(names):
                body = SLam(loc, n, body)
            return body
        if self.at_word("Sig"):
            loc = self.advance().loc
            self.expect("LPAREN", "'(' after 'Sig'")
            name = self.ident("a binder name").text
            self.expect("COLON", "':'")
            fst = self.parse_term()
            self.expect("RPAREN", "')'")
            self.expect("COMMA", "','")
            snd = self.parse_term()
            return SSigma(loc, name, fst, snd)
        if self.at("LPAREN") or self.at("LBRACE"):
            saved = self.pos
            saved_commit = self.committed
            self.committed = False
            try:
                binders = self.parse_binder_group()
                while self.at("LPAREN") or self.at("LBRACE"):
                    binders.extend(self.parse_binder_group())
                if not self.at("ARROW"):
                    raise _Backtrack()
                self.committed = saved_commit
                loc = self.advance().loc
                cod = self.parse_term()
                for n, ty, imp in reversed(binders):
                    cod = SPi(loc, n, ty, cod, imp)
                return cod
            except _Backtrack:
                self.pos = saved
                self.committed = saved_commit
        return self.parse_arrow()

    def parse_arrow(self) -> SExpr:
        lhs = self.parse_eq()
        if self.at("ARROW"):
            loc = self.advance().loc
            rhs = self.parse_term()
            return SPi(loc, "_", lhs, rhs, False)
        return lhs

    def parse_eq(self) -> SExpr:
        lhs = self.parse_app()
        if self.at("EQ"):
            loc = self.advance().loc
            rhs = self.parse_app()
            ty = None
            if self.at_word("in"):
                self.advance()
                ty = self.parse_app()
            return SEq(loc, lhs, rhs, ty)
        return lhs

    def _at_atom_start(self) -> bool:
        t = self.peek()
        if t.kind in ("UNDERSCORE", "LPAREN"):
            return True
        if t.kind == "IDENT":
            return t.text not in _APP_STOPPERS
        return False

    def parse_app(self) -> SExpr:
        fn = self.parse_proj()
        while True:
            if self._at_atom_start():
                arg = self.parse_proj()
                fn = SApp(arg.loc, fn, arg, False)
            elif self.at("LBRACE"):
                loc = self.advance().loc
                arg = self.parse_term()
                self.expect("RBRACE", "'}'")
                fn = SApp(loc, fn, arg, True)
            else:
                return fn

    def parse_proj(self) -> SExpr:
        e = self.parse_atom()
        while self.at("DOT1") or self.at("DOT2"):
            t = self.advance()
            e = SProj1(t.loc, e) if t.kind == "DOT1" else SProj2(t.loc, e)
        return e

    def parse_atom(self) -> SExpr:
        t = self.peek()
        if t.kind == "IDENT":
            if t.text in _APP_STOPPERS:
                self.fail("a term")
            self.advance()
            if t.text == "Type":
                return SType(t.loc)
            return SVar(t.loc, t.text)
        if t.kind == "UNDERSCORE":
            self.advance()
            return SHole(t.loc)
        if t.kind == "LPAREN":
            self.advance()
            inner = self.parse_term()
            if self.at("COMMA"):
                self.advance()
                snd = self.parse_term()
                self.expect("RPAREN", "')'")
                return SPair(t.loc, inner, snd)
            self.expect("RPAREN", "')'")
            return inner
        self.fail("a term")
        raise AssertionError


def parse_module(tokens: list[Token]) -> list[SurfaceDecl]:
    return Parser(tokens).parse_module()


def parse_file(text: str, filename: str = "<input>") -> list[SurfaceDecl]:
    return parse_module(tokenize(text, filename))


# --- scope resolution --------------------------------------------------------


@dataclass
class ResolvedDecl:
    kind: str
    name: Optional[str]
    type_term: Optional[Term]
    body_term: Optional[Term]
    loc: Loc
    hole_locs: dict[int, Loc] = field(default_factory=dict)


class Resolver:
    """Maps parsed declarations to core terms with holes."""

    def __init__(self, global_names):
        self.global_names = global_names
        self.next_hole = 0
        self.hole_locs: dict[int, Loc] = {}

    def _hole(self, loc: Loc, depth: int) -> Term:
        hid = self.next_hole
        self.next_hole += 1
        self.hole_locs[hid] = loc
        t: Term = Hole(hid)
        for i in range(depth - 1, -1, -1):
            t = App(t, Var(i))
        return t

    def _check_binder_name(self, name: str, loc: Loc) -> None:
        if name in RESERVED:
            raise CheckError(Diagnostic("scope", loc, f"{name!r} is a reserved name"))

    def resolve(self, decl: SurfaceDecl) -> ResolvedDecl:
        self.hole_locs = {}
        scope: list[str] = []
        if decl.kind in ("def", "postulate") and decl.name in RESERVED:
            raise CheckError(
                Diagnostic("scope", decl.loc, f"{decl.name!r} is a reserved name")
            )
        rbinders = []
        for name, ty, imp in decl.binders:
            self._check_binder_name(name, decl.loc)
            rbinders.append((name, self.expr(ty, scope), imp))
            scope.append(name)
        type_term = None
        if decl.type_expr is not None:
            type_term = self.expr(decl.type_expr, scope)
            for name, rty, imp in reversed(rbinders):
                type_term = Pi(name, rty, type_term, imp)
        body_term = None
        if decl.body_expr is not None:
            body_term = self.expr(decl.body_expr, scope)
            for name, _, _ in reversed(rbinders):
                body_term = Lam(name, body_term)
        return ResolvedDecl(
            decl.kind, decl.name, type_term, body_term, decl.loc, dict(self.hole_locs)
        )

    def expr(self, e: SExpr, scope: list[str]) -> Term:
        match e:
            case SVar(loc, name):
                return self._name(name, loc, scope, [])
            case SApp(_, _, _, _):
                spine = []
                head = e
                while isinstance(head, SApp):
                    spine.append((head.arg, head.implicit, head.arg.loc))
                    head = head.fn
                spine.reverse()
                args = [(self.expr(a, scope), imp, loc) for a, imp, loc in spine]
                if isinstance(head, SVar) and head.name not in scope:
                    if is_prim(head.name):
                        return self._apply_prim(
                            PRIM_SPECS[head.name], args, scope, head.loc
                        )
                t = self.expr(head, scope)
                for a, imp, _ in args:
                    t = App(t, a, imp)
                return t
            case SLam(_, name, body):
                self._check_binder_name(name, e.loc)
                scope.append(name)
                try:
                    return Lam(name, self.expr(body, scope))
                finally:
                    scope.pop()
            case SPi(_, name, dom, cod, imp):
                if name != "_":
                    self._check_binder_name(name, e.loc)
                rdom = self.expr(dom, scope)
                scope.append(name)
                try:
                    return Pi(name, rdom, self.expr(cod, scope), imp)
                finally:
                    scope.pop()
            case SSigma(_, name, fst, snd):
                self._check_binder_name(name, e.loc)
                rfst = self.expr(fst, scope)
                scope.append(name)
                try:
                    return Sigma(name, rfst, self.expr(snd, scope))
                finally:
                    scope.pop()
            case SPair(_, a, b):
                return Pair(self.expr(a, scope), self.expr(b, scope))
            case SProj1(_, inner):
                return Proj1(self.expr(inner, scope))
            case SProj2(_, inner):
                return Proj2(self.expr(inner, scope))
            case SEq(loc, lhs, rhs, ty):
                rty = self.expr(ty, scope) if ty is not None else self._hole(loc, len(scope))
                return Id(rty, self.expr(lhs, scope), self.expr(rhs, scope))
            case SHole(loc):
                return self._hole(loc, len(scope))
            case SType(_):
                return Universe()
            case _:
                raise AssertionError(f"unhandled surface node {e!r}")

    def _name(self, name: str, loc: Loc, scope: list[str], args) -> Term:
        for k in range(len(scope) - 1, -1, -1):
            if scope[k] == name:
                return Var(len(scope) - 1 - k)
        if is_prim(name):
            return self._apply_prim(PRIM_SPECS[name], args, scope, loc)
        if name in self.global_names:
            return GlobalRef(name)
        raise CheckError(Diagnostic("scope", loc, f"unbound identifier {name!r}"))

    def _apply_prim(self, spec: PrimSpec, args, scope: list[str], loc: Loc) -> Term:
        consumed: list = []
        lam_names: list[str] = []
        i = 0
        for slot in spec.slots:
            if slot.implicit:
                if i < len(args) and args[i][1]:
                    if not slot.stored:
                        raise CheckError(
                            Diagnostic(
                                "scope",
                                args[i][2],
                                f"{spec.op!r} does not accept an implicit argument here",
                            )
                        )
                    consumed.append(("arg", args[i][0]))
                    i += 1
                elif slot.stored:
                    consumed.append(("hole", loc))
                else:
                    consumed.append(None)
            else:
                if i < len(args):
                    if args[i][1]:
                        raise CheckError(
                            Diagnostic(
                                "scope",
                                args[i][2],
                                f"unexpected implicit argument to {spec.op!r}",
                            )
                        )
                    consumed.append(("arg", args[i][0]))
                    i += 1
                else:
                    consumed.append(("var", len(lam_names)))
                    lam_names.append(slot.name)
        k = len(lam_names)
        node_args: list[Term] = []
        ext_depth = len(scope) + k
        for c in consumed:
            if c is None:
                continue
            if c[0] == "arg":
                node_args.append(shift(c[1], k) if k else c[1])
            elif c[0] == "hole":
                node_args.append(self._hole(c[1], ext_depth))
            else:
                node_args.append(Var(k - 1 - c[1]))
        if spec.op == "refl":
            t: Term = Refl(node_args[0])
        else:
            t = Prim(spec.op, tuple(node_args))
        for name in reversed(lam_names):
            t = Lam(name, t)
        for a, imp, _ in args[i:]:
            t = App(t, a, imp)
        return t
