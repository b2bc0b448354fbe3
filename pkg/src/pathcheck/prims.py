"""Built-in operator table: signatures and argument slots.

Each primitive keyword carries a closed surface-syntax signature that the
kernel elaborates (and thereby self-checks) at startup, plus a slot list
saying which telescope arguments are implicit and which are stored in the
elaborated Prim node. Stored slots are exactly the explicit ones, except
the identity eliminator also stores its two (implicit) endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Slot:
    name: str
    implicit: bool = False
    stored: bool = True


@dataclass(frozen=True)
class PrimSpec:
    op: str
    signature_src: str
    slots: tuple[Slot, ...]
    # Permuted signature used only while type-checking a node, for operators
    # whose canonical argument order would check a binder-heavy argument
    # before the argument that determines its type. `check_order` lists the
    # node-argument index consumed by each stored slot of the permuted form.
    check_src: str = ""
    check_slots: tuple[Slot, ...] = ()
    check_order: tuple[int, ...] = ()

    @property
    def stored_slots(self) -> tuple[Slot, ...]:
        return tuple(s for s in self.slots if s.stored)

    @property
    def arity(self) -> int:
        return len(self.stored_slots)


def _imp(name: str) -> Slot:
    return Slot(name, implicit=True, stored=False)


def _exp(name: str) -> Slot:
    return Slot(name, implicit=False, stored=True)


_TORUS_REC_TEL = (
    "(C : Type) (b : C) (p : b = b in C) (q : b = b in C) "
    "(t : concat p q = concat q p in (b = b in C))"
)

_TORUS_IND_TEL = (
    "(E : T2 -> Type) (b : E Tb) "
    "(p : transport E Tp b = b in E Tb) "
    "(q : transport E Tq b = b in E Tb) "
    "(t : concat (inv (ap (fun a => transport E a b) Tt)) "
    "(concat (concat (transport-concat E Tp Tq b) (ap (transport E Tq) p)) q) "
    "= concat (concat (transport-concat E Tq Tp b) (ap (transport E Tp) q)) p "
    "in (transport E (concat Tq Tp) b = b in E Tb))"
)

PRIM_SPECS: dict[str, PrimSpec] = {}


def _register(op: str, signature_src: str, slots: tuple[Slot, ...]) -> None:
    PRIM_SPECS[op] = PrimSpec(op, signature_src, slots)


_register(
    "refl",
    "{A : Type} (a : A) -> a = a in A",
    (_imp("A"), _exp("a")),
)
_register(
    "concat",
    "{A : Type} {x y z : A} (p : x = y in A) (q : y = z in A) -> x = z in A",
    (_imp("A"), _imp("x"), _imp("y"), _imp("z"), _exp("p"), _exp("q")),
)
_register(
    "inv",
    "{A : Type} {x y : A} (p : x = y in A) -> y = x in A",
    (_imp("A"), _imp("x"), _imp("y"), _exp("p")),
)
_register(
    "transport",
    "{A : Type} (P : A -> Type) {x y : A} (p : x = y in A) (u : P x) -> P y",
    (_imp("A"), _exp("P"), _imp("x"), _imp("y"), _exp("p"), _exp("u")),
)
_register(
    "ap",
    "{A B : Type} (f : A -> B) {x y : A} (p : x = y in A) -> f x = f y in B",
    (_imp("A"), _imp("B"), _exp("f"), _imp("x"), _imp("y"), _exp("p")),
)
_register(
    "apd",
    "{A : Type} {B : A -> Type} (f : (x : A) -> B x) {x y : A} (p : x = y in A)"
    " -> transport B p (f x) = f y in B y",
    (_imp("A"), _imp("B"), _exp("f"), _imp("x"), _imp("y"), _exp("p")),
)
_register(
    "ap-concat",
    "{A B : Type} (f : A -> B) {x y z : A} (p : x = y in A) (q : y = z in A)"
    " -> ap f (concat p q) = concat (ap f p) (ap f q) in (f x = f z in B)",
    (_imp("A"), _imp("B"), _exp("f"), _imp("x"), _imp("y"), _imp("z"), _exp("p"), _exp("q")),
)
_register(
    "ct-cong",
    "{A : Type} {x y z : A} {p1 p2 : x = y in A} {q1 q2 : y = z in A}"
    " (be : p1 = p2 in (x = y in A)) (ga : q1 = q2 in (y = z in A))"
    " -> concat p1 q1 = concat p2 q2 in (x = z in A)",
    (
        _imp("A"),
        _imp("x"),
        _imp("y"),
        _imp("z"),
        _imp("p1"),
        _imp("p2"),
        _imp("q1"),
        _imp("q2"),
        _exp("be"),
        _exp("ga"),
    ),
)
_register(
    "transport-concat",
    "{A : Type} (P : A -> Type) {x y z : A} (p : x = y in A) (q : y = z in A) (u : P x)"
    " -> transport P (concat p q) u = transport P q (transport P p u) in P z",
    (_imp("A"), _exp("P"), _imp("x"), _imp("y"), _imp("z"), _exp("p"), _exp("q"), _exp("u")),
)
PRIM_SPECS["J"] = PrimSpec(
    "J",
    "{A : Type} (E : (x : A) -> (y : A) -> (x = y in A) -> Type)"
    " (d : (x : A) -> E x x (refl x)) {a b : A} (p : a = b in A) -> E a b p",
    (
        _imp("A"),
        _exp("E"),
        _exp("d"),
        Slot("a", implicit=True, stored=True),
        Slot("b", implicit=True, stored=True),
        _exp("p"),
    ),
    check_src="{A : Type} {a b : A} (p : a = b in A)"
    " (E : (x : A) -> (y : A) -> (x = y in A) -> Type)"
    " (d : (x : A) -> E x x (refl x)) -> E a b p",
    check_slots=(
        _imp("A"),
        Slot("a", implicit=True, stored=True),
        Slot("b", implicit=True, stored=True),
        _exp("p"),
        _exp("E"),
        _exp("d"),
    ),
    check_order=(2, 3, 4, 0, 1),
)
_register("S1", "Type", ())
_register("base", "S1", ())
_register("loop", "base = base in S1", ())
_register(
    "S1-rec",
    "(C : Type) (b : C) (l : b = b in C) (c : S1) -> C",
    (_exp("C"), _exp("b"), _exp("l"), _exp("c")),
)
_register(
    "S1-rec-beta",
    "(C : Type) (b : C) (l : b = b in C) -> ap (S1-rec C b l) loop = l in (b = b in C)",
    (_exp("C"), _exp("b"), _exp("l")),
)
_register(
    "S1-ind",
    "(E : S1 -> Type) (b : E base) (l : transport E loop b = b in E base) (c : S1) -> E c",
    (_exp("E"), _exp("b"), _exp("l"), _exp("c")),
)
_register(
    "S1-ind-beta",
    "(E : S1 -> Type) (b : E base) (l : transport E loop b = b in E base)"
    " -> apd (S1-ind E b l) loop = l in (transport E loop b = b in E base)",
    (_exp("E"), _exp("b"), _exp("l")),
)
_register("T2", "Type", ())
_register("Tb", "T2", ())
_register("Tp", "Tb = Tb in T2", ())
_register("Tq", "Tb = Tb in T2", ())
_register("Tt", "concat Tp Tq = concat Tq Tp in (Tb = Tb in T2)", ())
_register(
    "T2-rec",
    f"{_TORUS_REC_TEL} (c : T2) -> C",
    (_exp("C"), _exp("b"), _exp("p"), _exp("q"), _exp("t"), _exp("c")),
)
_register(
    "T2-rec-beta-p",
    f"{_TORUS_REC_TEL} -> ap (T2-rec C b p q t) Tp = p in (b = b in C)",
    (_exp("C"), _exp("b"), _exp("p"), _exp("q"), _exp("t")),
)
_register(
    "T2-rec-beta-q",
    f"{_TORUS_REC_TEL} -> ap (T2-rec C b p q t) Tq = q in (b = b in C)",
    (_exp("C"), _exp("b"), _exp("p"), _exp("q"), _exp("t")),
)
_register(
    "T2-rec-beta-t",
    f"{_TORUS_REC_TEL} -> "
    "concat (concat (ap-concat (T2-rec C b p q t) Tp Tq)"
    " (ct-cong (T2-rec-beta-p C b p q t) (T2-rec-beta-q C b p q t))) t"
    " = concat (concat (ap (fun r => ap (T2-rec C b p q t) r) Tt)"
    " (ap-concat (T2-rec C b p q t) Tq Tp))"
    " (ct-cong (T2-rec-beta-q C b p q t) (T2-rec-beta-p C b p q t))"
    " in (ap (T2-rec C b p q t) (concat Tp Tq) = concat q p in (b = b in C))",
    (_exp("C"), _exp("b"), _exp("p"), _exp("q"), _exp("t")),
)
_register(
    "T2-ind",
    f"{_TORUS_IND_TEL} (c : T2) -> E c",
    (_exp("E"), _exp("b"), _exp("p"), _exp("q"), _exp("t"), _exp("c")),
)
_register(
    "T2-ind-beta-p",
    f"{_TORUS_IND_TEL} -> apd (T2-ind E b p q t) Tp = p in (transport E Tp b = b in E Tb)",
    (_exp("E"), _exp("b"), _exp("p"), _exp("q"), _exp("t")),
)
_register(
    "T2-ind-beta-q",
    f"{_TORUS_IND_TEL} -> apd (T2-ind E b p q t) Tq = q in (transport E Tq b = b in E Tb)",
    (_exp("E"), _exp("b"), _exp("p"), _exp("q"), _exp("t")),
)


def is_prim(name: str) -> bool:
    return name in PRIM_SPECS
