"""Structural congruence by normalisation and matching.

Both sides are flattened: restrictions are pulled out onto placeholder
channels, parallel composition becomes a multiset of sums and calls, nils
vanish and unused restrictions are dropped.  Two flattened processes are
congruent when a rate-preserving bijection between their placeholders makes
the component multisets equal, where sums compare as sets of prefixes
(absorption) and continuations compare recursively.  Calls are unfolded only
when the direct comparison fails.
"""
from __future__ import annotations

import itertools
from typing import Dict, Iterator, List, Tuple

from .syntax import (Call, Env, In, Name, Nil, Nu, Out, Par, Process, SpiError, Sum, Tau,
                     free_names, instantiate_def, open_binder, summands)

_counter = itertools.count()
Mapping = Tuple[Dict[str, str], Dict[str, str]]


def _placeholder(tag):
    return f"?{tag}{next(_counter)}"


class _Matcher:
    def __init__(self, env: Env, max_unfold: int):
        self.env = env
        self.rates: Dict[str, object] = {}
        self.max_unfold = max_unfold
        self.active = set()

    def flatten(self, P: Process, comps: List[Process]):
        if isinstance(P, Nil):
            return
        if isinstance(P, Par):
            self.flatten(P.left, comps)
            self.flatten(P.right, comps)
        elif isinstance(P, Nu):
            x = _placeholder("v")
            self.rates[x] = P.rate
            self.flatten(open_binder(P.body, x), comps)
        else:
            comps.append(P)

    def unfold(self, comps):
        out = []
        for c in comps:
            if isinstance(c, Call):
                d = self.env.get(c.name)
                if d is None:
                    raise SpiError(f"unknown definition {c.name!r}")
                self.flatten(instantiate_def(d, [a.name for a in c.args]), out)
            else:
                out.append(c)
        return out

    # -- names
    def chan(self, x, y, m: Mapping) -> Iterator[Mapping]:
        a, b = x.name, y.name
        pa, pb = a.startswith("?v"), b.startswith("?v")
        if not pa and not pb:
            if a == b:
                yield m
            return
        if pa != pb:
            return
        fwd, bwd = m
        if a in fwd or b in bwd:
            if fwd.get(a) == b:
                yield m
            return
        if self.rates[a] != self.rates[b]:
            return
        yield ({**fwd, a: b}, {**bwd, b: a})

    # -- processes
    def procs(self, P, Q, m: Mapping, depth: int) -> Iterator[Mapping]:
        A, B = [], []
        self.flatten(P, A)
        self.flatten(Q, B)
        yield from self.comps(A, B, m, depth)
        if depth < self.max_unfold and any(isinstance(c, Call) for c in A + B):
            key = (P, Q)
            if key in self.active:
                return
            self.active.add(key)
            try:
                yield from self.comps(self.unfold(A), self.unfold(B), m, depth + 1)
            finally:
                self.active.discard(key)

    def comps(self, A, B, m, depth) -> Iterator[Mapping]:
        if len(A) != len(B):
            return
        if not A:
            yield m
            return
        a, rest = A[0], A[1:]
        seen = set()
        for j, b in enumerate(B):
            if b in seen:
                continue
            seen.add(b)
            for m2 in self.comp(a, b, m, depth):
                yield from self.comps(rest, B[:j] + B[j + 1:], m2, depth)

    def comp(self, a, b, m, depth) -> Iterator[Mapping]:
        if isinstance(a, Call) and isinstance(b, Call):
            if a.name == b.name and len(a.args) == len(b.args):
                yield from self.chans(a.args, b.args, m)
        elif isinstance(a, Sum) and isinstance(b, Sum):
            yield from self.sums(summands(a), summands(b), m, depth)

    def chans(self, xs, ys, m):
        if not xs:
            yield m
            return
        for m2 in self.chan(xs[0], ys[0], m):
            yield from self.chans(xs[1:], ys[1:], m2)

    def sums(self, SA, SB, m, depth) -> Iterator[Mapping]:
        def cover(src, dst, flip, m):
            # every element of src has a partner in dst
            if not src:
                yield m
                return
            for t in dst:
                pairs = self.prefix(t, src[0], m, depth) if flip else self.prefix(src[0], t, m, depth)
                for m2 in pairs:
                    yield from cover(src[1:], dst, flip, m2)
        for m1 in cover(SA, SB, False, m):
            yield from cover(SB, SA, True, m1)

    def prefix(self, a, b, m, depth) -> Iterator[Mapping]:
        if isinstance(a, Out) and isinstance(b, Out):
            for m1 in self.chan(a.chan, b.chan, m):
                for m2 in self.chan(a.msg, b.msg, m1):
                    yield from self.procs(a.cont, b.cont, m2, depth)
        elif isinstance(a, In) and isinstance(b, In):
            y = _placeholder("r")
            for m1 in self.chan(a.chan, b.chan, m):
                yield from self.procs(open_binder(a.body, y), open_binder(b.body, y), m1, depth)
        elif isinstance(a, Tau) and isinstance(b, Tau):
            if a.rate == b.rate:
                yield from self.procs(a.cont, b.cont, m, depth)


def congruent(env: Env, P: Process, Q: Process, max_unfold: int = None) -> bool:
    """Decide structural congruence of two closed processes."""
    if max_unfold is None:
        max_unfold = 2 * len(env) + 2
    for side in (P, Q):
        _known(env, side)
    return next(_Matcher(env, max_unfold).procs(P, Q, ({}, {}), 0), None) is not None


def _known(env, P):
    from .syntax import calls
    for n in calls(P):
        if n not in env:
            raise SpiError(f"unknown definition {n!r}")


__all__ = ["congruent"]
