"""Sample processes and a round-trip harness for trace certification."""
from __future__ import annotations

import random
from typing import Dict, List, Optional

from .congruence import congruent
from .parse import SpiProgram, parse_spi
from .step import initial_config, transitions
from .trace import Trace, state_of

PROGRAMS: Dict[str, str] = {
    "fig4": """\
channel x : 4
channel a : 1
run x!(a).tau(2).0 | x?(y).y!(y).0
""",
    "osc": """\
def X() = tau(1).Y()
def Y() = tau(3).X()
run X()
""",
    "nu": """\
channel x : 2
run new(3) z in (x!(z).z?(w).0 | x?(k).k!(k).0)
""",
    "choice": """\
channel x : 1
channel y : 2
run x!(x).0 + y!(y).0 | x?(u).tau(5).0 | y?(v).0
""",
    "rec": """\
channel c : 1
def P(u) = u!(u).P(u)
def C(u) = u?(m).new(2) n in tau(1).C(u)
run P(c) | C(c)
""",
    "relay": """\
channel a : 1
channel b : 3
channel m : 1/2
run a!(m).0 | a?(z).b!(z).0 | b?(w).w!(w).0 | m?(q).0
""",
    "race": """\
channel x : 2
channel y : 3
run x!(x).0 | x?(u).0 | y!(y).0 | y?(v).0 | tau(1/2).0
""",
    "server": """\
channel req : 1
def S(r) = r?(k).(k!(k).0 | S(r))
run S(req) | new(2) c in (req!(c).c?(z).0) | new(5) d in (req!(d).d?(z).0)
""",
    "mixed": """\
channel x : 1
run tau(2).x!(x).0 + x?(u).tau(1).0 | x!(x).0 + tau(3).0
""",
}


def program(name: str) -> SpiProgram:
    return parse_spi(PROGRAMS[name])


def random_trace(prog: SpiProgram, rng: random.Random, length: int) -> Trace:
    """Uniformly chosen reactions, recording successor states."""
    cfg, _ = initial_config(prog.env, prog.rates, prog.run)
    events, states = [], []
    for _ in range(length):
        ts = transitions(prog.env, cfg)
        if not ts:
            break
        t = rng.choice(ts)
        events.append(t.event)
        states.append(state_of(t.target))
        cfg = t.target
    return Trace(prog.run, events, dict(prog.rates), states)


def roundtrip_failures(prog: SpiProgram, trace: Trace) -> List[str]:
    """Certify ``trace`` and read it back; empty when every check holds.

    Checked: the focused checker accepts the derivation; extraction returns
    the same events and congruent states; each lock world is the product of
    the rates so far; every frontier prefix extracts a prefix of the events.
    """
    from ..focusing.calculus import check_focused
    from ..worlds import WComp, normalize
    from .adequacy import analyse, cut_at, spine, trace_to_derivation
    from .encode import RATES, RID, rate_world

    bad = []
    cert = trace_to_derivation(prog.env, trace)
    rep = check_focused(cert.proof)
    if not rep.ok:
        return [f"derivation rejected: {rep}"]
    a = analyse(cert.proof)
    if a.trace.events != trace.events:
        bad.append(f"extracted {[str(e) for e in a.trace.events]}")
    if not a.complete:
        bad.append("extracted derivation is partial")
    for k, (st, step) in enumerate(zip(a.trace.states or [], cert.replay.steps)):
        if not congruent(prog.env, st, state_of(step.target)):
            bad.append(f"state {k + 1} differs")
    w = RID
    for k, (lock, ev) in enumerate(zip(a.locks[1:], trace.events)):
        w = WComp(w, rate_world(ev.rate))
        if normalize(lock, RATES) != normalize(w, RATES):
            bad.append(f"lock world after event {k + 1}")
    for k in range(len(spine(cert.proof))):
        pre = analyse(cut_at(cert.proof, k)).trace.events
        if pre != trace.events[:len(pre)]:
            bad.append(f"prefix {k} extracts {[str(e) for e in pre]}")
    return bad
