"""Built-in suites behind ``hyll selftest``; each yields (name, ok, detail)."""
from __future__ import annotations

import random
from typing import Iterator, List, Tuple

Result = Tuple[str, bool, str]


def kernel() -> Iterator[Result]:
    from .kernel import check_proof
    from .kernel.meta import cut_eliminate, identity_expand
    from .parse import parse_prop
    from .worlds import Domain, lit
    w = lit(Domain.RATES, (2,))
    for src in ("a * b -o c", "!(a & b) + 1", "dn u. faw v. (a at u.v)", "exw u. (a * top at u)"):
        A = parse_prop(src, Domain.RATES)
        p = identity_expand(A, w)
        rep = check_proof(p)
        yield f"kernel: identity on {src}", rep.ok, "" if rep.ok else str(rep)
        q = cut_eliminate(p)
        ok = check_proof(q).ok and q.conclusion == p.conclusion
        yield f"kernel: cut-free copy of identity on {src}", ok, ""


def focusing() -> Iterator[Result]:
    from .corpus import CORPUS
    from .focusing import SearchBudget, prove_unfocused
    from .kernel import Sequent, check_proof
    from .parse import parse_goal
    for e in CORPUS:
        g = parse_goal(e.text, e.domain)
        s = Sequent(tuple(g.gamma), tuple(g.delta), g.goal, g.domain)
        p = prove_unfocused(s, SearchBudget(max_decisions=8, world_witness_hints=tuple(g.hints)))
        found = p is not None
        ok = found == e.provable and (not found or check_proof(p).ok)
        yield f"focusing: {e.name}", ok, "" if ok else f"expected provable={e.provable}"


def adequacy(traces_per_program: int = 3, seed: int = 2024) -> Iterator[Result]:
    from .spi.examples import PROGRAMS, program, random_trace, roundtrip_failures
    rng = random.Random(seed)
    for name in PROGRAMS:
        prog = program(name)
        for k in range(traces_per_program):
            t = random_trace(prog, rng, 6)
            try:
                bad = roundtrip_failures(prog, t)
            except Exception as exc:  # report, don't abort the suite
                bad = [f"{type(exc).__name__}: {exc}"]
            yield f"adequacy: {name} #{k} ({len(t.events)} events)", not bad, "; ".join(bad)


def simulator() -> Iterator[Result]:
    from . import simulator as sim
    from .simulator import _race_py
    from .spi.examples import program
    s0 = sim.seed_state(1)
    a = sim.race_batch([2.0, 3.0], 1000, s0)
    b = _race_py.race_batch([2.0, 3.0], 1000, s0)
    yield f"simulator: {sim.BACKEND} kernel agrees with the Python one", a == b, ""
    prog = program("fig4")
    r = sim.simulate(prog.env, prog.rates, prog.run, sim.SimConfig(seed=5, certify=True))
    yield "simulator: fig4 run certifies", bool(r.certified), str(r.certified)


SUITES = {"kernel": kernel, "focusing": focusing, "adequacy": adequacy, "simulator": simulator}


def run(suite: str = "all") -> List[Result]:
    names = list(SUITES) if suite == "all" else [suite]
    out = []
    for n in names:
        out.extend(SUITES[n]())
    return out
