"""Operational semantics on configurations.

A configuration is a rate table plus a multiset of top-level sums: every
restriction has been opened onto a fresh rated channel and every top-level
call unfolded.  Fresh channels are ``#0``, ``#1``, ... (the smallest index not
already in the table), the same rule the focused prover uses for eigen
terms, so a configuration and its canonical sequent agree on names.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from ..worlds import fmt_rational
from .syntax import (Call, Choice, Env, In, Name, Nil, Nu, Out, Par, Process, SpiError, Sum, Tau,
                     close_binder, free_names, instantiate_def, open_binder, par, summand_paths)


def fresh_channel(rates) -> str:
    n = 0
    while f"#{n}" in rates:
        n += 1
    return f"#{n}"


@dataclass(frozen=True)
class Event:
    kind: str  # "internal" or "sync"
    rate: Fraction
    channel: Optional[str] = None
    message: Optional[str] = None

    def __str__(self):
        if self.kind == "internal":
            return f"internal({fmt_rational(self.rate)})"
        return f"sync({self.channel}, {fmt_rational(self.rate)}, {self.message})"


@dataclass(frozen=True)
class Config:
    rates: Tuple[Tuple[str, Fraction], ...]
    comps: Tuple[Sum, ...]

    @property
    def table(self) -> Dict[str, Fraction]:
        return dict(self.rates)

    def process(self, keep=()) -> Process:
        """Back to a process, restricting every channel not in ``keep``."""
        body = par(*self.comps)
        used = free_names(body)
        for x, r in reversed(self.rates):
            if x not in keep and x in used:
                body = Nu(r, close_binder(body, x), "c")
        return body


@dataclass(frozen=True)
class Unfold:
    call: Call


@dataclass(frozen=True)
class Transition:
    """One reaction.  ``first`` is the output (or tau) participant and
    ``second`` the input participant, each as (component index, choice path)."""
    event: Event
    source: Config
    target: Config
    first: Tuple[int, Tuple[int, ...]]
    second: Optional[Tuple[int, Tuple[int, ...]]]
    unfolds: Tuple[Call, ...] = ()


class _Builder:
    def __init__(self, env: Env, rates):
        self.env = env
        self.rates = dict(rates)
        self.comps: List[Process] = []

    def open(self, P: Process):
        if isinstance(P, Nil):
            return
        if isinstance(P, Par):
            self.open(P.left)
            self.open(P.right)
        elif isinstance(P, Nu):
            x = fresh_channel(self.rates)
            self.rates[x] = P.rate
            self.open(open_binder(P.body, x))
        elif isinstance(P, (Sum, Call)):
            self.comps.append(P)
        else:
            raise SpiError(f"not a process: {P!r}")

    def unfold_calls(self) -> Tuple[Call, ...]:
        done = []
        while True:
            k = next((i for i, c in enumerate(self.comps) if isinstance(c, Call)), None)
            if k is None:
                return tuple(done)
            c = self.comps.pop(k)
            d = self.env.get(c.name)
            if d is None:
                raise SpiError(f"unknown definition {c.name!r}")
            done.append(c)
            self.open(instantiate_def(d, [a.name for a in c.args]))

    def config(self) -> Config:
        return Config(tuple(self.rates.items()), tuple(self.comps))


def initial_config(env: Env, rates, P: Process) -> Tuple[Config, Tuple[Call, ...]]:
    b = _Builder(env, rates)
    b.open(P)
    unfolds = b.unfold_calls()
    cfg = b.config()
    check_rated(cfg)
    return cfg, unfolds


def check_rated(cfg: Config):
    table = cfg.table
    for c in cfg.comps:
        for x in sorted(free_names(c)):
            if x not in table:
                raise SpiError(f"channel {x!r} has no rate")


def _successor(env, cfg, removed, conts) -> Tuple[Config, Tuple[Call, ...]]:
    b = _Builder(env, cfg.rates)
    b.comps = [c for i, c in enumerate(cfg.comps) if i not in removed]
    for P in conts:
        b.open(P)
    unfolds = b.unfold_calls()
    return b.config(), unfolds


def transitions(env: Env, cfg: Config) -> List[Transition]:
    """Every single-step reaction; internal ones first, then synchronizations
    ordered by channel name and participant indices."""
    table = cfg.table
    out: List[Transition] = []
    for i, M in enumerate(cfg.comps):
        for path, s in summand_paths(M):
            if isinstance(s, Tau):
                tgt, unf = _successor(env, cfg, {i}, [s.cont])
                out.append(Transition(Event("internal", s.rate), cfg, tgt, (i, path), None, unf))
    syncs = []
    for i, M in enumerate(cfg.comps):
        for pi, s in summand_paths(M):
            if not isinstance(s, Out):
                continue
            for j, N in enumerate(cfg.comps):
                if j == i:
                    continue
                for pj, t in summand_paths(N):
                    if isinstance(t, In) and t.chan == s.chan:
                        syncs.append((s.chan.name, i, pi, j, pj, s, t))
    syncs.sort(key=lambda e: e[:5])
    for x, i, pi, j, pj, s, t in syncs:
        if x not in table:
            raise SpiError(f"channel {x!r} has no rate")
        tgt, unf = _successor(env, cfg, {i, j}, [s.cont, open_binder(t.body, s.msg.name)])
        out.append(Transition(Event("sync", table[x], x, s.msg.name), cfg, tgt,
                              (i, pi), (j, pj), unf))
    return out


def step(env: Env, rates, P: Process) -> List[Tuple[Event, Process]]:
    """Successors of a closed process, each restricted back over channels
    that were not in the original table."""
    cfg, _ = initial_config(env, rates, P)
    keep = set(dict(rates))
    return [(t.event, t.target.process(keep)) for t in transitions(env, cfg)]


def find_transition(env: Env, cfg: Config, event: Event) -> Transition:
    for t in transitions(env, cfg):
        if t.event == event:
            return t
    raise SpiError(f"event {event} is not enabled")


__all__ = ["Config", "Event", "Transition", "fresh_channel", "initial_config", "transitions",
           "step", "find_transition", "check_rated"]
