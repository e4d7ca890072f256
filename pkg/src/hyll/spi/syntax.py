"""Stochastic pi-calculus processes in locally nameless form.

Channel binders (``Nu`` and ``In``, plus definition parameters) are de Bruijn
indices (:class:`Bound`); free channels are :class:`Name` values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional, Tuple, Union

from ..worlds import fmt_rational


class SpiError(Exception):
    pass


@dataclass(frozen=True, order=True)
class Name:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class Bound:
    index: int

    def __str__(self):
        return f"^{self.index}"


Chan = Union[Name, Bound]


class Process:
    __slots__ = ()

    def __str__(self):
        return show(self)


@dataclass(frozen=True)
class Nil(Process):
    pass


@dataclass(frozen=True)
class Par(Process):
    left: Process
    right: Process


@dataclass(frozen=True)
class Nu(Process):
    rate: Fraction
    body: Process
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Call(Process):
    name: str
    args: Tuple[Chan, ...] = ()


class Sum(Process):
    __slots__ = ()


@dataclass(frozen=True)
class Out(Sum):
    chan: Chan
    msg: Chan
    cont: Process


@dataclass(frozen=True)
class In(Sum):
    chan: Chan
    body: Process
    hint: str = field(default="y", compare=False)


@dataclass(frozen=True)
class Tau(Sum):
    rate: Fraction
    cont: Process


@dataclass(frozen=True)
class Choice(Sum):
    left: Sum
    right: Sum


@dataclass(frozen=True)
class Def:
    name: str
    params: Tuple[str, ...]
    body: Process  # under len(params) binders; the last parameter is Bound(0)

    @property
    def arity(self):
        return len(self.params)


Env = Dict[str, Def]


def rate(q) -> Fraction:
    q = Fraction(q)
    if q <= 0:
        raise SpiError(f"rates must be positive, got {fmt_rational(q)}")
    return q


def par(*ps: Process) -> Process:
    ps = [p for p in ps]
    if not ps:
        return Nil()
    out = ps[0]
    for p in ps[1:]:
        out = Par(out, p)
    return out


def choice(*ms: Sum) -> Sum:
    out = ms[0]
    for m in ms[1:]:
        out = Choice(out, m)
    return out


# ---------------------------------------------------------------------------
# Binder plumbing


def map_chans(P: Process, f: Callable[[Chan, int], Chan], depth: int = 0) -> Process:
    def c(x, d):
        return f(x, d)

    def go(P, d):
        if isinstance(P, Nil):
            return P
        if isinstance(P, Par):
            return Par(go(P.left, d), go(P.right, d))
        if isinstance(P, Nu):
            return Nu(P.rate, go(P.body, d + 1), P.hint)
        if isinstance(P, Call):
            return Call(P.name, tuple(c(a, d) for a in P.args))
        if isinstance(P, Out):
            return Out(c(P.chan, d), c(P.msg, d), go(P.cont, d))
        if isinstance(P, In):
            return In(c(P.chan, d), go(P.body, d + 1), P.hint)
        if isinstance(P, Tau):
            return Tau(P.rate, go(P.cont, d))
        if isinstance(P, Choice):
            return Choice(go(P.left, d), go(P.right, d))
        raise SpiError(f"not a process: {P!r}")
    return go(P, depth)


def open_binder(body: Process, name: str) -> Process:
    """Instantiate the outermost bound channel of ``body`` with ``name``."""
    def f(x, d):
        if isinstance(x, Bound):
            if x.index == d:
                return Name(name)
            if x.index > d:
                return Bound(x.index - 1)
        return x
    return map_chans(body, f)


def close_binder(P: Process, name: str) -> Process:
    """Abstract the free channel ``name`` into a new outermost binder."""
    def f(x, d):
        if isinstance(x, Bound):
            return Bound(x.index + 1) if x.index >= d else x
        if x.name == name:
            return Bound(d)
        return x
    return map_chans(P, f)


def instantiate_def(d: Def, args) -> Process:
    if len(args) != d.arity:
        raise SpiError(f"{d.name} expects {d.arity} arguments, got {len(args)}")
    body = d.body
    for a in args:
        body = open_binder(body, a.name if isinstance(a, Name) else a)
    return body


def free_names(P: Process) -> set:
    out = set()

    def f(x, d):
        if isinstance(x, Name):
            out.add(x.name)
        return x
    map_chans(P, f)
    return out


def is_closed(P: Process, depth: int = 0) -> bool:
    ok = True

    def f(x, d):
        nonlocal ok
        if isinstance(x, Bound) and x.index >= d:
            ok = False
        return x
    map_chans(P, f, depth)
    return ok


def summands(M: Sum) -> List[Sum]:
    if isinstance(M, Choice):
        return summands(M.left) + summands(M.right)
    return [M]


def summand_paths(M: Sum, path=()) -> Iterator[Tuple[Tuple[int, ...], Sum]]:
    """Each prefix of a sum with its path of choices (1 = left, 2 = right)."""
    if isinstance(M, Choice):
        yield from summand_paths(M.left, path + (1,))
        yield from summand_paths(M.right, path + (2,))
    else:
        yield path, M


def calls(P: Process) -> set:
    out = set()

    def go(P):
        if isinstance(P, (Par, Choice)):
            go(P.left)
            go(P.right)
        elif isinstance(P, Nu):
            go(P.body)
        elif isinstance(P, Call):
            out.add(P.name)
        elif isinstance(P, Out):
            go(P.cont)
        elif isinstance(P, In):
            go(P.body)
        elif isinstance(P, Tau):
            go(P.cont)
    go(P)
    return out


def unguarded_calls(P: Process) -> set:
    """Calls not under an action prefix."""
    if isinstance(P, Par):
        return unguarded_calls(P.left) | unguarded_calls(P.right)
    if isinstance(P, Nu):
        return unguarded_calls(P.body)
    if isinstance(P, Call):
        return {P.name}
    return set()


def check_env(env: Env):
    """Arity and guardedness of every definition."""
    for d in env.values():
        bad = unguarded_calls(d.body)
        if bad:
            raise SpiError(f"definition {d.name}: unguarded call to {', '.join(sorted(bad))}")
        _check_calls(d.body, env, f"definition {d.name}")
        if not is_closed(d.body, d.arity):
            raise SpiError(f"definition {d.name} has an unbound channel")


def _check_calls(P, env, where):
    def go(P):
        if isinstance(P, (Par, Choice)):
            go(P.left)
            go(P.right)
        elif isinstance(P, Nu):
            go(P.body)
        elif isinstance(P, Call):
            d = env.get(P.name)
            if d is None:
                raise SpiError(f"{where}: unknown definition {P.name!r}")
            if d.arity != len(P.args):
                raise SpiError(f"{where}: {P.name} expects {d.arity} arguments, "
                               f"got {len(P.args)}")
        elif isinstance(P, Out):
            go(P.cont)
        elif isinstance(P, In):
            go(P.body)
        elif isinstance(P, Tau):
            go(P.cont)
    go(P)


def check_process(P: Process, env: Env, where="process"):
    if not is_closed(P):
        raise SpiError(f"{where} has an unbound channel")
    _check_calls(P, env, where)


# ---------------------------------------------------------------------------
# Printing


def _pick(hint, taken):
    base = hint or "x"
    if base not in taken:
        return base
    n = 1
    while f"{base}{n}" in taken:
        n += 1
    return f"{base}{n}"


def show(P: Process, names=(), taken=None) -> str:
    taken = set(free_names(P)) if taken is None else taken
    return _show(P, list(names), taken, 0)


# precedence: new 0 < | 1 < + 2 < prefix 3
def _show(P, names, taken, prec) -> str:
    def ch(x):
        if isinstance(x, Bound):
            return names[-1 - x.index]
        return x.name

    def wrap(s, p):
        return f"({s})" if prec > p else s

    if isinstance(P, Nil):
        return "0"
    if isinstance(P, Call):
        return f"{P.name}({', '.join(ch(a) for a in P.args)})"
    if isinstance(P, Nu):
        n = _pick(P.hint, taken | set(names))
        body = _show(P.body, names + [n], taken, 0)
        return wrap(f"new({fmt_rational(P.rate)}) {n} in {body}", 0)
    if isinstance(P, Par):
        return wrap(f"{_show(P.left, names, taken, 1)} | {_show(P.right, names, taken, 2)}", 1)
    if isinstance(P, Choice):
        return wrap(f"{_show(P.left, names, taken, 2)} + {_show(P.right, names, taken, 3)}", 2)
    if isinstance(P, Out):
        return f"{ch(P.chan)}!({ch(P.msg)}).{_show(P.cont, names, taken, 3)}"
    if isinstance(P, In):
        n = _pick(P.hint, taken | set(names))
        return f"{ch(P.chan)}?({n}).{_show(P.body, names + [n], taken, 3)}"
    if isinstance(P, Tau):
        return f"tau({fmt_rational(P.rate)}).{_show(P.cont, names, taken, 3)}"
    raise SpiError(f"not a process: {P!r}")


def show_def(d: Def) -> str:
    return f"def {d.name}({', '.join(d.params)}) = {show(d.body, d.params)}"
