"""Terms, HyLL propositions, substitution, derived connectives and polarization.

Binders are nameless.  Term binders (``ForallT``/``ExistsT``) and world binders
(``Here``/``ForallW``/``ExistsW``) keep separate de Bruijn counters, so a
``TVar(0)`` always refers to the nearest enclosing *term* binder and a
``WBound(0)`` to the nearest enclosing *world* binder.  The ``hint`` fields only
steer the pretty printer and never take part in equality.

Polarized propositions reuse the same node types plus the two shifts
:class:`Up` (positive to negative) and :class:`Down` (negative to positive).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Tuple

from .worlds import (Domain, NormWorld, Sym, WBound, WComp, WId, WLit, WorldExpr, WRateOf,
                     WVar, denormalize, normalize, print_world)


# ---------------------------------------------------------------------------
# Terms


class Term:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class TVar(Term):
    index: int

    def __str__(self):
        return f"^{self.index}"


@dataclass(frozen=True, slots=True)
class Fn(Term):
    sym: str
    args: Tuple[Term, ...] = ()

    def __str__(self):
        if not self.args:
            return self.sym
        return f"{self.sym}({', '.join(map(str, self.args))})"


def const(name: str) -> Fn:
    return Fn(name)


# ---------------------------------------------------------------------------
# Propositions


class Prop:
    __slots__ = ()

    def __str__(self):
        return show(self)


@dataclass(frozen=True, slots=True)
class Atom(Prop):
    pred: str
    args: Tuple[Term, ...] = ()
    pos: bool = False


@dataclass(frozen=True, slots=True)
class Tensor(Prop):
    left: Prop
    right: Prop


@dataclass(frozen=True, slots=True)
class One(Prop):
    pass


@dataclass(frozen=True, slots=True)
class Limp(Prop):
    left: Prop
    right: Prop


@dataclass(frozen=True, slots=True)
class With(Prop):
    left: Prop
    right: Prop


@dataclass(frozen=True, slots=True)
class Top(Prop):
    pass


@dataclass(frozen=True, slots=True)
class Plus(Prop):
    left: Prop
    right: Prop


@dataclass(frozen=True, slots=True)
class Zero(Prop):
    pass


@dataclass(frozen=True, slots=True)
class Bang(Prop):
    body: Prop


@dataclass(frozen=True, slots=True)
class ForallT(Prop):
    body: Prop
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True, slots=True)
class ExistsT(Prop):
    body: Prop
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True, slots=True)
class At(Prop):
    body: Prop
    world: WorldExpr


@dataclass(frozen=True, slots=True)
class Here(Prop):
    """Localization ``dn u. A``: binds the world the proposition is judged at."""
    body: Prop
    hint: str = field(default="u", compare=False)


@dataclass(frozen=True, slots=True)
class ForallW(Prop):
    body: Prop
    hint: str = field(default="u", compare=False)


@dataclass(frozen=True, slots=True)
class ExistsW(Prop):
    body: Prop
    hint: str = field(default="u", compare=False)


@dataclass(frozen=True, slots=True)
class Up(Prop):
    """Shift a positive proposition into the negative class."""
    body: Prop


@dataclass(frozen=True, slots=True)
class Down(Prop):
    """Shift a negative proposition into the positive class."""
    body: Prop


@dataclass(frozen=True, slots=True)
class Judgement:
    prop: Prop
    world: WorldExpr

    def __str__(self):
        return f"{show(self.prop)} @ {print_world(self.world)}"


BINARY = (Tensor, Limp, With, Plus)
TERM_BINDERS = (ForallT, ExistsT)
WORLD_BINDERS = (Here, ForallW, ExistsW)
UNARY = (Bang, Up, Down)


# ---------------------------------------------------------------------------
# Generic traversal


def _map_term(t: Term, f: Callable[[TVar, int], Term], depth: int) -> Term:
    if isinstance(t, TVar):
        return f(t, depth)
    if not t.args:
        return t
    return Fn(t.sym, tuple(_map_term(a, f, depth) for a in t.args))


def _map_world(e: WorldExpr, fw, ft, tdepth: int, wdepth: int) -> WorldExpr:
    if isinstance(e, WComp):
        return WComp(_map_world(e.left, fw, ft, tdepth, wdepth),
                     _map_world(e.right, fw, ft, tdepth, wdepth))
    if isinstance(e, WRateOf) and ft is not None:
        return WRateOf(_map_term(e.term, ft, tdepth))
    if fw is not None:
        return fw(e, wdepth)
    return e


def transform(A: Prop, ft=None, fw=None, tdepth: int = 0, wdepth: int = 0) -> Prop:
    """Rebuild ``A`` applying ``ft(TVar, depth)`` to term variables and
    ``fw(world_leaf, depth)`` to world leaves, tracking binder depths."""
    def go(A, td, wd):
        if isinstance(A, Atom):
            if ft is None or not A.args:
                return A
            return Atom(A.pred, tuple(_map_term(a, ft, td) for a in A.args), A.pos)
        if isinstance(A, BINARY):
            return type(A)(go(A.left, td, wd), go(A.right, td, wd))
        if isinstance(A, UNARY):
            return type(A)(go(A.body, td, wd))
        if isinstance(A, TERM_BINDERS):
            return type(A)(go(A.body, td + 1, wd), A.hint)
        if isinstance(A, WORLD_BINDERS):
            return type(A)(go(A.body, td, wd + 1), A.hint)
        if isinstance(A, At):
            return At(go(A.body, td, wd), _map_world(A.world, fw, ft, td, wd))
        return A
    return go(A, tdepth, wdepth)


# ---------------------------------------------------------------------------
# Shifting and substitution


def shift_term(t: Term, by: int, cutoff: int = 0) -> Term:
    return _map_term(t, lambda v, d: TVar(v.index + by) if v.index >= cutoff + d else v, 0)


def shift_world(e: WorldExpr, by: int, cutoff: int = 0) -> WorldExpr:
    def fw(x, d):
        if isinstance(x, WBound) and x.index >= cutoff + d:
            return WBound(x.index + by)
        return x
    return _map_world(e, fw, None, 0, 0)


def subst_term(A: Prop, tau: Term, index: int = 0) -> Prop:
    """Replace term variable ``index`` by ``tau`` (capture-free), closing the gap."""
    def ft(v, d):
        k = index + d
        if v.index == k:
            return shift_term(tau, d)
        if v.index > k:
            return TVar(v.index - 1)
        return v
    return transform(A, ft=ft)


def subst_world(A: Prop, e: WorldExpr, index: int = 0) -> Prop:
    """Replace world variable ``index`` by ``e`` (capture-free), closing the gap."""
    def fw(x, d):
        if isinstance(x, WBound):
            k = index + d
            if x.index == k:
                return shift_world(e, d)
            if x.index > k:
                return WBound(x.index - 1)
        return x
    return transform(A, fw=fw)


def instantiate(binder: Prop, tau) -> Prop:
    """Open a quantifier or localization with a term or world."""
    if isinstance(binder, TERM_BINDERS):
        return subst_term(binder.body, tau)
    if isinstance(binder, WORLD_BINDERS):
        return subst_world(binder.body, tau)
    raise TypeError(f"not a binder: {binder!r}")


def abstract_term(A: Prop, sym: str) -> Prop:
    """Turn the constant ``sym`` into the term variable bound by a new binder."""
    def go_t(t, d):
        if isinstance(t, TVar):
            return TVar(t.index + 1) if t.index >= d else t
        if t.sym == sym and not t.args:
            return TVar(d)
        return Fn(t.sym, tuple(go_t(a, d) for a in t.args)) if t.args else t

    def go(A, td):
        if isinstance(A, Atom):
            return Atom(A.pred, tuple(go_t(a, td) for a in A.args), A.pos) if A.args else A
        if isinstance(A, BINARY):
            return type(A)(go(A.left, td), go(A.right, td))
        if isinstance(A, UNARY):
            return type(A)(go(A.body, td))
        if isinstance(A, TERM_BINDERS):
            return type(A)(go(A.body, td + 1), A.hint)
        if isinstance(A, WORLD_BINDERS):
            return type(A)(go(A.body, td), A.hint)
        if isinstance(A, At):
            return At(go(A.body, td), _abs_world_terms(A.world, go_t, td))
        return A
    return go(A, 0)


def _abs_world_terms(e, go_t, td):
    if isinstance(e, WComp):
        return WComp(_abs_world_terms(e.left, go_t, td), _abs_world_terms(e.right, go_t, td))
    if isinstance(e, WRateOf):
        return WRateOf(go_t(e.term, td))
    return e


def abstract_world(A: Prop, name: str) -> Prop:
    """Turn the free world variable ``name`` into the index of a new world binder."""
    def fw(x, d):
        if isinstance(x, WBound):
            return WBound(x.index + 1) if x.index >= d else x
        if isinstance(x, WVar) and x.name == name:
            return WBound(d)
        return x
    return transform(A, fw=fw)


def abstract_world_expr(e: WorldExpr, name: str, depth: int = 0) -> WorldExpr:
    def fw(x, d):
        if isinstance(x, WBound):
            return WBound(x.index + 1) if x.index >= depth else x
        if isinstance(x, WVar) and x.name == name:
            return WBound(depth)
        return x
    return _map_world(e, fw, None, 0, 0)


# ---------------------------------------------------------------------------
# Free symbols


def term_symbols(t: Term, out: set):
    if isinstance(t, Fn):
        out.add(t.sym)
        for a in t.args:
            term_symbols(a, out)


def _world_names(e, out_w, out_t):
    if isinstance(e, WVar):
        out_w.add(e.name)
    elif isinstance(e, WComp):
        _world_names(e.left, out_w, out_t)
        _world_names(e.right, out_w, out_t)
    elif isinstance(e, WRateOf):
        term_symbols(e.term, out_t)


def symbols(A: Prop, terms: Optional[set] = None, worlds: Optional[set] = None):
    """Collect function symbols and free world-variable names occurring in ``A``."""
    terms = set() if terms is None else terms
    worlds = set() if worlds is None else worlds
    stack = [A]
    while stack:
        A = stack.pop()
        if isinstance(A, Atom):
            for a in A.args:
                term_symbols(a, terms)
        elif isinstance(A, BINARY):
            stack += (A.left, A.right)
        elif isinstance(A, (UNARY, TERM_BINDERS, WORLD_BINDERS)):
            stack.append(A.body)
        elif isinstance(A, At):
            _world_names(A.world, worlds, terms)
            stack.append(A.body)
    return terms, worlds


def judgement_symbols(js, terms=None, worlds=None):
    terms = set() if terms is None else terms
    worlds = set() if worlds is None else worlds
    for j in js:
        symbols(j.prop, terms, worlds)
        _world_names(j.world, worlds, terms)
    return terms, worlds


def ground_subterms(A: Prop, out: set):
    """Closed subterms of atom arguments (the witness universe for term quantifiers)."""
    def go_t(t):
        if isinstance(t, Fn) and _closed_term(t):
            out.add(t)
        if isinstance(t, Fn):
            for a in t.args:
                go_t(a)
    stack = [A]
    while stack:
        A = stack.pop()
        if isinstance(A, Atom):
            for a in A.args:
                go_t(a)
        elif isinstance(A, BINARY):
            stack += (A.left, A.right)
        elif isinstance(A, (UNARY, TERM_BINDERS, WORLD_BINDERS)):
            stack.append(A.body)
        elif isinstance(A, At):
            stack.append(A.body)
    return out


def _closed_term(t):
    if isinstance(t, TVar):
        return False
    return all(_closed_term(a) for a in t.args)


def world_exprs(A: Prop, out: list, tdepth: int = 0, wdepth: int = 0):
    """World expressions labelling ``at`` nodes, with the binder depth they sit under."""
    if isinstance(A, At):
        out.append((A.world, tdepth, wdepth))
        world_exprs(A.body, out, tdepth, wdepth)
    elif isinstance(A, BINARY):
        world_exprs(A.left, out, tdepth, wdepth)
        world_exprs(A.right, out, tdepth, wdepth)
    elif isinstance(A, UNARY):
        world_exprs(A.body, out, tdepth, wdepth)
    elif isinstance(A, TERM_BINDERS):
        world_exprs(A.body, out, tdepth + 1, wdepth)
    elif isinstance(A, WORLD_BINDERS):
        world_exprs(A.body, out, tdepth, wdepth + 1)
    return out


def size(A: Prop) -> int:
    if isinstance(A, BINARY):
        return 1 + size(A.left) + size(A.right)
    if isinstance(A, (UNARY, TERM_BINDERS, WORLD_BINDERS, At)):
        return 1 + size(A.body)
    return 1


def is_pure(A: Prop) -> bool:
    """No hybrid connective and no world quantifier."""
    if isinstance(A, (At, Here, ForallW, ExistsW)):
        return False
    if isinstance(A, BINARY):
        return is_pure(A.left) and is_pure(A.right)
    if isinstance(A, (UNARY, TERM_BINDERS)):
        return is_pure(A.body)
    return True


def well_formed(A: Prop, tdepth: int = 0, wdepth: int = 0) -> bool:
    """Every bound index refers to an enclosing binder of its own kind."""
    ok = True

    def ft(v, d):
        nonlocal ok
        if v.index >= d:
            ok = False
        return v

    def fw(x, d):
        nonlocal ok
        if isinstance(x, WBound) and x.index >= d:
            ok = False
        return x
    transform(A, ft=ft, fw=fw, tdepth=tdepth, wdepth=wdepth)
    return ok


# ---------------------------------------------------------------------------
# Canonical forms: worlds compared by monoid value


def canon_world(e: WorldExpr, domain: Domain) -> WorldExpr:
    bound = {}

    def hide(x):
        if isinstance(x, WBound):
            bound[f"^{x.index}"] = x
            return WVar(f"^{x.index}")
        if isinstance(x, WComp):
            return WComp(hide(x.left), hide(x.right))
        return x

    if domain is Domain.UNIT:
        return WId()
    n = normalize(hide(e), domain)
    out = denormalize(n)
    if bound:
        out = _map_world(out, lambda x, d: bound.get(x.name, x) if isinstance(x, WVar) else x,
                         None, 0, 0)
    return out


@lru_cache(maxsize=200_000)
def canon(A: Prop, domain: Domain) -> Prop:
    return _canon(A, domain)


def _canon(A, domain):
    if isinstance(A, At):
        return At(_canon(A.body, domain), canon_world(A.world, domain))
    if isinstance(A, BINARY):
        return type(A)(_canon(A.left, domain), _canon(A.right, domain))
    if isinstance(A, UNARY):
        return type(A)(_canon(A.body, domain))
    if isinstance(A, (TERM_BINDERS + WORLD_BINDERS)):
        return type(A)(_canon(A.body, domain), A.hint)
    return A


def norm_of(e: WorldExpr, domain: Domain) -> NormWorld:
    return normalize(e, domain)


@lru_cache(maxsize=200_000)
def jkey(j: Judgement, domain: Domain):
    """Equality key for judgements: alpha-equality plus world evaluation."""
    return (canon(j.prop, domain), normalize(j.world, domain))


# ---------------------------------------------------------------------------
# Derived connectives


def box(A: Prop) -> Prop:
    """``dn u. fa w. (A at u . w)``; ``A`` must not mention the new binders."""
    A = _lift_worlds(A, 2)
    return Here(ForallW(At(A, WComp(WBound(1), WBound(0))), "w"), "u")


def dia(A: Prop) -> Prop:
    A = _lift_worlds(A, 2)
    return Here(ExistsW(At(A, WComp(WBound(1), WBound(0))), "w"), "u")


def rho(v: WorldExpr, A: Prop) -> Prop:
    """Delay: ``dn u. (A at u . v)``."""
    return Here(At(_lift_worlds(A, 1), WComp(WBound(0), shift_world(v, 1))), "u")


def bangbang(A: Prop) -> Prop:
    """True at every world: ``fa u. (A at u)``."""
    return ForallW(At(_lift_worlds(A, 1), WBound(0)), "u")


def iff(P: Prop, Q: Prop) -> Prop:
    """``P o-o Q`` for positive ``P``, ``Q``: ``(P -o up Q) & (Q -o up P)``."""
    return With(Limp(P, Up(Q)), Limp(Q, Up(P)))


def imp(A: Prop, B: Prop) -> Prop:
    """Intuitionistic implication via Girard's embedding."""
    return Limp(Bang(A), B)


def _lift_worlds(A, by):
    def fw(x, d):
        if isinstance(x, WBound) and x.index >= d:
            return WBound(x.index + by)
        return x
    return transform(A, fw=fw)


DERIVED = {"box": box, "dia": dia, "rho": rho, "bangbang": bangbang, "iff": iff, "imp": imp}


def derived(kind: str, *args) -> Prop:
    return DERIVED[kind](*args)


# ---------------------------------------------------------------------------
# Polarity


_POSITIVE = (Tensor, One, Plus, Zero, Bang, ExistsT, ExistsW, Down)
_NEGATIVE = (With, Top, Limp, ForallT, ForallW, Up)


def is_positive(A: Prop) -> bool:
    """Polarity of a polarized proposition; hybrid connectives are parasitic."""
    while isinstance(A, (At, Here)):
        A = A.body
    if isinstance(A, Atom):
        return A.pos
    if isinstance(A, _POSITIVE):
        return True
    if isinstance(A, _NEGATIVE):
        return False
    raise TypeError(f"not a proposition: {A!r}")


def polarize(A: Prop, bias: str = "negative") -> Prop:
    """Insert the minimal shifts making ``A`` well-polarized with the given polarity."""
    want_pos = bias == "positive"
    P = _pol(A, want_pos)
    if is_positive(P) != want_pos:
        P = Down(P) if want_pos else Up(P)
    return P


def _as(A, want_pos):
    P = _pol(A, want_pos)
    if is_positive(P) == want_pos:
        return P
    return Down(P) if want_pos else Up(P)


def _pol(A: Prop, want_pos: bool) -> Prop:
    if isinstance(A, (Atom, One, Zero, Top)):
        return A
    if isinstance(A, (Tensor, Plus)):
        return type(A)(_as(A.left, True), _as(A.right, True))
    if isinstance(A, With):
        return With(_as(A.left, False), _as(A.right, False))
    if isinstance(A, Limp):
        return Limp(_as(A.left, True), _as(A.right, False))
    if isinstance(A, Bang):
        return Bang(_as(A.body, False))
    if isinstance(A, (ExistsT, ExistsW)):
        return type(A)(_as(A.body, True), A.hint)
    if isinstance(A, (ForallT, ForallW)):
        return type(A)(_as(A.body, False), A.hint)
    if isinstance(A, Here):
        return Here(_pol(A.body, want_pos), A.hint)
    if isinstance(A, At):
        return At(_pol(A.body, want_pos), A.world)
    if isinstance(A, (Up, Down)):
        return _pol(A.body, want_pos)
    raise TypeError(f"not a proposition: {A!r}")


def erase_polarity(P: Prop) -> Prop:
    if isinstance(P, (Up, Down)):
        return erase_polarity(P.body)
    if isinstance(P, BINARY):
        return type(P)(erase_polarity(P.left), erase_polarity(P.right))
    if isinstance(P, Bang):
        return Bang(erase_polarity(P.body))
    if isinstance(P, (TERM_BINDERS + WORLD_BINDERS)):
        return type(P)(erase_polarity(P.body), P.hint)
    if isinstance(P, At):
        return At(erase_polarity(P.body), P.world)
    return P


def well_polarized(P: Prop) -> bool:
    """Every connective's operands have the polarity the connective demands."""
    def need(Q, pos):
        return is_positive(Q) == pos and well_polarized(Q)
    if isinstance(P, (Atom, One, Zero, Top)):
        return True
    if isinstance(P, (Tensor, Plus)):
        return need(P.left, True) and need(P.right, True)
    if isinstance(P, With):
        return need(P.left, False) and need(P.right, False)
    if isinstance(P, Limp):
        return need(P.left, True) and need(P.right, False)
    if isinstance(P, Bang):
        return need(P.body, False)
    if isinstance(P, (ExistsT, ExistsW)):
        return need(P.body, True)
    if isinstance(P, (ForallT, ForallW)):
        return need(P.body, False)
    if isinstance(P, (Here, At)):
        return well_polarized(P.body)
    if isinstance(P, Up):
        return need(P.body, True)
    if isinstance(P, Down):
        return need(P.body, False)
    return False


# ---------------------------------------------------------------------------
# Pretty printing (concrete grammar)

# precedence: quantifiers 0 < -o 1 < & 2 < + 3 < * 4 < prefix 5
_BIN = {Limp: ("-o", 1), With: ("&", 2), Plus: ("+", 3), Tensor: ("*", 4)}


def show_term(t: Term, tnames=()) -> str:
    if isinstance(t, TVar):
        return tnames[-1 - t.index] if t.index < len(tnames) else f"^{t.index}"
    if not t.args:
        return t.sym
    return f"{t.sym}({', '.join(show_term(a, tnames) for a in t.args)})"


def show(A: Prop, tnames=(), wnames=(), unicode_shifts: bool = True) -> str:
    used_t, used_w = symbols(A)
    return _show(A, list(tnames), list(wnames), 0, used_t | used_w, unicode_shifts)


def _fresh(hint, taken):
    base = hint.rstrip("0123456789'") or "x"
    if base not in taken:
        return base
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def _show(A, tn, wn, prec, used, uni):
    def paren(s, p):
        return f"({s})" if p < prec else s

    if isinstance(A, Atom):
        if not A.args:
            return A.pred
        return f"{A.pred}({', '.join(show_term(a, tn) for a in A.args)})"
    if isinstance(A, One):
        return "1"
    if isinstance(A, Zero):
        return "0"
    if isinstance(A, Top):
        return "top"
    if isinstance(A, Bang):
        return "!" + _show(A.body, tn, wn, 5, used, uni)
    if isinstance(A, (Up, Down)):
        sym = ("↑" if isinstance(A, Up) else "↓") if uni else ("up" if isinstance(A, Up) else "down")
        return f"{sym}" + "{" + _show(A.body, tn, wn, 0, used, uni) + "}"
    if isinstance(A, At):
        return f"({_show(A.body, tn, wn, 0, used, uni)} at {print_world(A.world, wn, lambda t: show_term(t, tn))})"
    if type(A) in _BIN:
        op, p = _BIN[type(A)]
        # all binary connectives are right-associative
        lhs = _show(A.left, tn, wn, p + 1, used, uni)
        rhs = _show(A.right, tn, wn, p, used, uni)
        return paren(f"{lhs} {op} {rhs}", p)
    if isinstance(A, TERM_BINDERS):
        name = _fresh(A.hint, used | set(tn) | set(wn))
        kw = "fa" if isinstance(A, ForallT) else "ex"
        return paren(f"{kw} {name}. {_show(A.body, tn + [name], wn, 0, used, uni)}", 0)
    if isinstance(A, WORLD_BINDERS):
        name = _fresh(A.hint, used | set(tn) | set(wn))
        kw = {Here: "dn", ForallW: "faw", ExistsW: "exw"}[type(A)]
        return paren(f"{kw} {name}. {_show(A.body, tn, wn + [name], 0, used, uni)}", 0)
    raise TypeError(f"not a proposition: {A!r}")
