"""Constraint domains: monoids of worlds.

Three instances are provided:

* ``unit``      -- the trivial monoid, which makes HyLL collapse to plain ILL;
* ``temporal``  -- nonnegative rationals under addition;
* ``rates``     -- finite lists of positive rationals under concatenation.

Concrete worlds are :class:`World` values.  Worlds that occur inside
propositions are :class:`WorldExpr` trees, which may mention named variables
(eigen-parameters) and de Bruijn bound indices.  Closed expressions evaluate to
a :class:`World`; expressions over free names are compared through a symbolic
normal form (:func:`normalize`), which is exact for the free monoid (rates) and
the free commutative monoid (temporal).
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Optional, Union


class Domain(str, enum.Enum):
    UNIT = "unit"
    TEMPORAL = "temporal"
    RATES = "rates"


class WorldError(Exception):
    """Raised on cross-domain composition or malformed world payloads."""


def to_rational(x: Union[int, str, Fraction]) -> Fraction:
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError) as e:
        raise WorldError(f"not a rational: {x!r}") from e


def fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class World:
    domain: Domain
    value: Any = None

    def __post_init__(self):
        d = self.domain
        if d is Domain.UNIT:
            if self.value is not None:
                raise WorldError("unit worlds carry no payload")
        elif d is Domain.TEMPORAL:
            v = to_rational(self.value)
            if v < 0:
                raise WorldError(f"temporal world must be >= 0, got {v}")
            object.__setattr__(self, "value", v)
        elif d is Domain.RATES:
            v = tuple(to_rational(x) for x in self.value)
            if any(x <= 0 for x in v):
                raise WorldError(f"rates must be positive, got {list(map(str, v))}")
            object.__setattr__(self, "value", v)
        else:  # pragma: no cover
            raise WorldError(f"unknown domain {d!r}")

    def __str__(self):
        if self.domain is Domain.UNIT:
            return "id"
        if self.domain is Domain.TEMPORAL:
            return fmt_rational(self.value)
        return "[" + ", ".join(fmt_rational(q) for q in self.value) + "]"


def rid(domain: Domain) -> World:
    if domain is Domain.UNIT:
        return World(domain)
    if domain is Domain.TEMPORAL:
        return World(domain, 0)
    return World(domain, ())


def _same(u: World, v: World):
    if u.domain is not v.domain:
        raise WorldError(
            f"cross-domain composition: {u.domain.value} world {u} with {v.domain.value} world {v}")


def compose(u: World, v: World) -> World:
    _same(u, v)
    if u.domain is Domain.UNIT:
        return u
    if u.domain is Domain.TEMPORAL:
        return World(u.domain, u.value + v.value)
    return World(u.domain, u.value + v.value)


def reaches(u: World, w: World) -> Optional[World]:
    """The residual ``v`` with ``u . v == w``, or None when ``w`` is not reachable."""
    _same(u, w)
    if u.domain is Domain.UNIT:
        return u
    if u.domain is Domain.TEMPORAL:
        return World(u.domain, w.value - u.value) if w.value >= u.value else None
    n = len(u.value)
    if w.value[:n] == u.value:
        return World(u.domain, w.value[n:])
    return None


# ---------------------------------------------------------------------------
# World expressions


class WorldExpr:
    __slots__ = ()

    def __matmul__(self, other):  # pragma: no cover - convenience only
        return WComp(self, other)


@dataclass(frozen=True)
class WLit(WorldExpr):
    world: World


@dataclass(frozen=True)
class WVar(WorldExpr):
    name: str


@dataclass(frozen=True)
class WBound(WorldExpr):
    index: int


@dataclass(frozen=True)
class WComp(WorldExpr):
    left: WorldExpr
    right: WorldExpr


@dataclass(frozen=True)
class WId(WorldExpr):
    pass


@dataclass(frozen=True)
class WRateOf(WorldExpr):
    """The singleton rate world named by a rational literal *term*.

    Lets one binder carry a rate both as a term argument and as a world label.
    """
    term: Any


def rate_literal(term) -> Optional[Fraction]:
    """The rational a nullary term symbol denotes, if it is a numeral."""
    if getattr(term, "args", None) != ():
        return None
    sym = getattr(term, "sym", None)
    if not isinstance(sym, str) or not sym or not (sym[0].isdigit()):
        return None
    try:
        q = Fraction(sym)
    except (ValueError, ZeroDivisionError):
        return None
    return q if q > 0 else None


def wcompose(*es: WorldExpr) -> WorldExpr:
    out = None
    for e in es:
        out = e if out is None else WComp(out, e)
    return WId() if out is None else out


def lit(domain: Domain, value=None) -> WLit:
    return WLit(World(domain, value))


class UnboundWorldVariable(WorldError):
    pass


def eval_world(e: WorldExpr, env: Mapping[str, World], domain: Domain) -> World:
    if isinstance(e, WId):
        return rid(domain)
    if isinstance(e, WLit):
        if e.world.domain is not domain:
            raise WorldError(f"literal {e.world} is not in the {domain.value} domain")
        return e.world
    if isinstance(e, WVar):
        try:
            return env[e.name]
        except KeyError:
            raise UnboundWorldVariable(f"unbound world variable {e.name!r}") from None
    if isinstance(e, WComp):
        return compose(eval_world(e.left, env, domain), eval_world(e.right, env, domain))
    if isinstance(e, WRateOf):
        q = rate_literal(e.term)
        if q is None:
            raise WorldError(f"term {e.term} does not denote a rate")
        return _rate_world(domain, q)
    raise WorldError(f"cannot evaluate open world expression {e!r}")


def _rate_world(domain: Domain, q: Fraction) -> World:
    if domain is Domain.RATES:
        return World(domain, (q,))
    if domain is Domain.TEMPORAL:
        return World(domain, q)
    return rid(domain)


def world_vars(e: WorldExpr) -> set:
    if isinstance(e, WVar):
        return {e.name}
    if isinstance(e, WComp):
        return world_vars(e.left) | world_vars(e.right)
    return set()


def match_world(pattern: WorldExpr, target: World, env: Mapping[str, World],
                domain: Domain) -> Optional[dict]:
    """Extend ``env`` so that ``pattern`` evaluates to ``target``.

    Unbound variables may occur only as the rightmost factor of the pattern;
    the solution is then the residual of the bound prefix, which is unique.
    """
    env = dict(env)
    factors = _flatten(pattern)
    free = [i for i, f in enumerate(factors) if isinstance(f, WVar) and f.name not in env]
    if not free:
        try:
            return env if eval_world(pattern, env, domain) == target else None
        except UnboundWorldVariable:  # pragma: no cover
            return None
    if len(free) > 1 or free[0] != len(factors) - 1:
        raise WorldError("only a single rightmost unbound variable can be solved for")
    name = factors[-1].name
    prefix = eval_world(wcompose(*factors[:-1]), env, domain)
    v = reaches(prefix, target)
    if v is None:
        return None
    env[name] = v
    return env


def _flatten(e: WorldExpr) -> list:
    if isinstance(e, WComp):
        return _flatten(e.left) + _flatten(e.right)
    if isinstance(e, WId):
        return []
    return [e]


# ---------------------------------------------------------------------------
# Symbolic normal forms, used where worlds mention eigen-parameters.

@dataclass(frozen=True, order=True)
class Sym:
    name: str


@dataclass(frozen=True)
class NormWorld:
    """Canonical value of a world expression over free names.

    unit: ``items == ()``.  temporal: ``(offset, sorted names)``.
    rates: a sequence mixing rationals and :class:`Sym` factors.
    """
    domain: Domain
    items: tuple = ()
    offset: Fraction = field(default=Fraction(0))

    @property
    def is_closed(self):
        return not any(isinstance(x, Sym) for x in self.items)

    def __str__(self):
        return print_world(denormalize(self))


def normalize(e: WorldExpr, domain: Domain) -> NormWorld:
    if domain is Domain.UNIT:
        _check_closed(e)
        return NormWorld(domain)
    items = []
    for f in _flatten(e):
        if isinstance(f, WLit):
            if f.world.domain is not domain:
                raise WorldError(f"literal {f.world} is not in the {domain.value} domain")
            items.extend([f.world.value] if domain is Domain.TEMPORAL else f.world.value)
        elif isinstance(f, WVar):
            items.append(Sym(f.name))
        elif isinstance(f, WRateOf):
            q = rate_literal(f.term)
            items.append(q if q is not None else Sym(f"rate({f.term})"))
        elif isinstance(f, WBound):
            raise WorldError("cannot normalize a world with a bound index")
        else:  # pragma: no cover
            raise WorldError(f"bad world factor {f!r}")
    if domain is Domain.TEMPORAL:
        off = sum((x for x in items if not isinstance(x, Sym)), Fraction(0))
        syms = tuple(sorted(x for x in items if isinstance(x, Sym)))
        return NormWorld(domain, syms, off)
    return NormWorld(domain, tuple(items))


def _check_closed(e):
    if isinstance(e, WBound):
        raise WorldError("cannot normalize a world with a bound index")
    if isinstance(e, WComp):
        _check_closed(e.left)
        _check_closed(e.right)


def norm_compose(a: NormWorld, b: NormWorld) -> NormWorld:
    if a.domain is not b.domain:
        raise WorldError("cross-domain composition")
    if a.domain is Domain.UNIT:
        return a
    if a.domain is Domain.TEMPORAL:
        return NormWorld(a.domain, tuple(sorted(a.items + b.items)), a.offset + b.offset)
    return NormWorld(a.domain, a.items + b.items)


def norm_residual(u: NormWorld, w: NormWorld) -> Optional[NormWorld]:
    """Symbolic residual: the ``v`` with ``u . v == w`` for every instance of the names."""
    if u.domain is Domain.UNIT:
        return u
    if u.domain is Domain.TEMPORAL:
        cu, cw = Counter(u.items), Counter(w.items)
        if cu - cw or w.offset < u.offset:
            return None
        return NormWorld(u.domain, tuple(sorted((cw - cu).elements())), w.offset - u.offset)
    n = len(u.items)
    if w.items[:n] == u.items:
        return NormWorld(u.domain, w.items[n:])
    return None


def denormalize(n: NormWorld) -> WorldExpr:
    d = n.domain
    if d is Domain.UNIT:
        return WId()
    if d is Domain.TEMPORAL:
        parts = [WVar(s.name) for s in n.items]
        if n.offset or not parts:
            parts = [WLit(World(d, n.offset))] + parts
        return wcompose(*parts)
    parts, run = [], []
    for x in n.items:
        if isinstance(x, Sym):
            if run:
                parts.append(WLit(World(d, tuple(run))))
                run = []
            parts.append(WVar(x.name))
        else:
            run.append(x)
    if run or not parts:
        parts.append(WLit(World(d, tuple(run))))
    return wcompose(*parts)


def print_world(e: WorldExpr, names=None, term=str) -> str:
    """Concrete syntax: ``id``, ``3/2``, ``[2, 3/4]``, ``u . v``.  ``term``
    renders the channel inside ``rate(...)``."""
    if isinstance(e, WId):
        return "id"
    if isinstance(e, WLit):
        return str(e.world)
    if isinstance(e, WVar):
        return e.name
    if isinstance(e, WBound):
        if names is not None and e.index < len(names):
            return names[-1 - e.index]
        return f"^{e.index}"
    if isinstance(e, WRateOf):
        return f"rate({term(e.term)})"
    if isinstance(e, WComp):
        return f"{print_world(e.left, names, term)} . {print_world(e.right, names, term)}"
    raise WorldError(f"bad world expression {e!r}")
