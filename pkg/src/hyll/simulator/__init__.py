"""Stochastic execution of Spi configurations as a race of exponential clocks.

Each reaction the stepper offers is an enabled action.  A synchronization is
one action per (output, input) pair on the channel, each at the channel's
inherent rate, so a channel's total propensity scales with the number of
pairs it can form.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

try:
    from . import _race as _kernel
except ImportError:  # no compiled extension
    from . import _race_py as _kernel

from . import _race_py
from ..spi.step import Config, Event, Transition, initial_config, transitions
from ..spi.syntax import Env, Process
from ..spi.trace import Trace, state_of

BACKEND = _kernel.BACKEND
race_once = _kernel.race_once
race_batch = _kernel.race_batch
seed_state = _kernel.seed_state


def stream_seed(seed: int, run: int) -> int:
    """Seed of the ``run``-th replication, from SplitMix64 over the base seed."""
    return _race_py.splitmix64((seed + run * _race_py.GOLDEN) & _race_py.MASK)


@dataclass(frozen=True)
class EnabledAction:
    transition: Transition

    @property
    def kind(self) -> str:
        return self.transition.event.kind

    @property
    def propensity(self) -> Fraction:
        return self.transition.event.rate

    @property
    def channel(self):
        return self.transition.event.channel

    @property
    def output_index(self):
        return self.transition.first

    @property
    def input_index(self):
        return self.transition.second


def enabled(env: Env, cfg: Config) -> List[EnabledAction]:
    return [EnabledAction(t) for t in transitions(env, cfg)]


def race(actions: List[EnabledAction], state: int):
    """(chosen index, delay, next state); ``None`` for an empty list."""
    if not actions:
        return None
    return race_once([float(a.propensity) for a in actions], state)


@dataclass
class SimConfig:
    seed: int = 0
    max_steps: int = 100
    stop_time: Optional[float] = None
    certify: bool = False

    def __post_init__(self):
        if self.max_steps < 0:
            raise ValueError("max_steps must be >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class SimResult:
    trace: Trace
    delays: List[float]
    total_time: float
    certified: Optional[object] = None
    final: Optional[Config] = None
    reason: str = ""


def simulate(env: Env, rates: Dict[str, Fraction], P: Process, cfg: SimConfig) -> SimResult:
    conf, _ = initial_config(env, rates, P)
    state = seed_state(cfg.seed)
    events, states, delays = [], [], []
    clock = 0.0
    reason = "max steps"
    for _ in range(cfg.max_steps):
        acts = enabled(env, conf)
        if not acts:
            reason = "deadlock"
            break
        i, delay, state = race(acts, state)
        if cfg.stop_time is not None and clock + delay > cfg.stop_time:
            reason = "stop time"
            break
        t = acts[i].transition
        clock += delay
        events.append(t.event)
        states.append(state_of(t.target))
        delays.append(delay)
        conf = t.target
    trace = Trace(P, events, dict(rates), states)
    res = SimResult(trace, delays, sum(delays), None, conf, reason)
    if cfg.certify:
        res.certified = certify(env, trace)
    return res


def certify(env: Env, trace: Trace):
    """Build the derivation for ``trace`` and run the focused checker on it."""
    from ..focusing.calculus import check_focused
    from ..kernel.proof import CheckReport
    from ..spi.adequacy import trace_to_derivation
    from ..spi.syntax import SpiError
    try:
        cert = trace_to_derivation(env, trace)
    except SpiError as e:
        return CheckReport(False, (), "", str(e))
    return check_focused(cert.proof)


@dataclass
class Replications:
    runs: List[SimResult]
    frequencies: Counter = field(default_factory=Counter)


def simulate_runs(env: Env, rates, P: Process, cfg: SimConfig, runs: int) -> Replications:
    out = []
    freq = Counter()
    for k in range(runs):
        c = SimConfig(stream_seed(cfg.seed, k), cfg.max_steps, cfg.stop_time, cfg.certify)
        r = simulate(env, rates, P, c)
        out.append(r)
        freq.update(str(e) for e in r.trace.events)
    return Replications(out, freq)


__all__ = ["BACKEND", "EnabledAction", "Replications", "SimConfig", "SimResult", "certify",
           "enabled", "race", "race_batch", "race_once", "seed_state", "simulate",
           "simulate_runs", "stream_seed"]
