"""Traces: an initial process and the events it performs, with replay and a
versioned text format."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from ..parse import ParseError
from ..worlds import fmt_rational, to_rational, WorldError
from .congruence import congruent
from .parse import parse_process
from .step import Config, Event, Transition, initial_config, transitions
from .syntax import Call, Env, Process, SpiError, par, show

HEADER = "spi-trace 1"


class TraceError(SpiError):
    pass


@dataclass
class Trace:
    initial: Process
    events: List[Event]
    rates: Dict[str, Fraction] = field(default_factory=dict)
    # optional successor states (free names for opened channels), used to
    # disambiguate events with several matching reactions
    states: Optional[List[Process]] = None

    def worlds(self) -> List[Tuple[Fraction, ...]]:
        """Accumulated rate list after each event."""
        out, acc = [], ()
        for e in self.events:
            acc = acc + (e.rate,)
            out.append(acc)
        return out

    def prefix(self, k: int) -> "Trace":
        return Trace(self.initial, self.events[:k], dict(self.rates),
                     None if self.states is None else self.states[:k])


@dataclass
class Replay:
    start: Config
    unfolds: Tuple[Call, ...]
    steps: List[Transition]

    @property
    def final(self) -> Config:
        return self.steps[-1].target if self.steps else self.start


def state_of(cfg: Config) -> Process:
    return par(*cfg.comps)


def replay(env: Env, trace: Trace) -> Replay:
    start, unfolds = initial_config(env, trace.rates, trace.initial)
    cfg, steps = start, []
    for k, ev in enumerate(trace.events):
        cands = [t for t in transitions(env, cfg) if t.event == ev]
        if trace.states is not None and k < len(trace.states):
            want = trace.states[k]
            cands = [t for t in cands if congruent(env, state_of(t.target), want)]
        if not cands:
            raise TraceError(f"step {k + 1}: event {ev} is not enabled in {show(state_of(cfg))}")
        steps.append(cands[0])
        cfg = cands[0].target
    return Replay(start, unfolds, steps)


# ---------------------------------------------------------------------------
# Text format


def _event_doc(e: Event, world, state: Optional[Process]) -> dict:
    d = {"kind": e.kind}
    if e.kind == "sync":
        d["channel"], d["message"] = e.channel, e.message
    d["rate"] = fmt_rational(e.rate)
    d["world"] = "[" + ", ".join(fmt_rational(q) for q in world) + "]"
    if state is not None:
        d["state"] = show(state)
    return d


def dump_trace(t: Trace, delays: Optional[List[float]] = None) -> str:
    doc = {"initial": show(t.initial),
           "rates": {x: fmt_rational(r) for x, r in t.rates.items()},
           "events": []}
    for k, (e, w) in enumerate(zip(t.events, t.worlds())):
        d = _event_doc(e, w, t.states[k] if t.states else None)
        if delays is not None:
            d["delay"] = delays[k]
        doc["events"].append(d)
    return HEADER + "\n" + json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


def _parse_world(text: str) -> Tuple[Fraction, ...]:
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise TraceError(f"bad world {text!r}")
    inner = s[1:-1].strip()
    return tuple(to_rational(x.strip()) for x in inner.split(",")) if inner else ()


def load_trace(text: str) -> Tuple[Trace, List[Optional[Tuple[Fraction, ...]]]]:
    """Parse a trace file; also returns the recorded world of each event so
    callers can check them against the rates."""
    head, _, body = text.partition("\n")
    if head.strip() != HEADER:
        raise TraceError(f"expected header {HEADER!r}, found {head.strip()!r}")
    try:
        doc = json.loads(body)
        initial = parse_process(doc["initial"])
        rates = {x: to_rational(r) for x, r in doc.get("rates", {}).items()}
        events, worlds, states = [], [], []
        for k, d in enumerate(doc["events"]):
            kind = d["kind"]
            r = to_rational(d["rate"])
            if kind == "internal":
                events.append(Event("internal", r))
            elif kind == "sync":
                events.append(Event("sync", r, d["channel"], d["message"]))
            else:
                raise TraceError(f"event {k + 1}: unknown kind {kind!r}")
            worlds.append(_parse_world(d["world"]) if "world" in d else None)
            states.append(parse_process(d["state"]) if "state" in d else None)
    except (json.JSONDecodeError, KeyError, TypeError, WorldError) as e:
        raise TraceError(f"bad trace body: {e}") from None
    except ParseError as e:
        raise TraceError(f"bad process in trace: {e}") from None
    st = states if states and all(s is not None for s in states) else None
    return Trace(initial, events, rates, st), worlds


def check_worlds(t: Trace, recorded) -> Optional[str]:
    """First mismatch between recorded worlds and accumulated rates."""
    for k, (want, got) in enumerate(zip(t.worlds(), recorded)):
        if got is not None and tuple(got) != tuple(want):
            fmt = lambda w: "[" + ", ".join(fmt_rational(q) for q in w) + "]"
            return (f"event {k + 1}: recorded world {fmt(got)} but rid . "
                    f"{' . '.join(fmt_rational(q) for q in want)} = {fmt(want)}")
    return None


def same_events(a: Trace, b: Trace, ordered: bool = True) -> bool:
    """Event-wise comparison; ``ordered=False`` compares as multisets, which
    ignores the interleaving of independent reactions."""
    if ordered:
        return list(a.events) == list(b.events)
    return Counter(a.events) == Counter(b.events)


__all__ = ["Trace", "Replay", "TraceError", "replay", "dump_trace", "load_trace", "state_of",
           "check_worlds", "same_events", "HEADER"]
