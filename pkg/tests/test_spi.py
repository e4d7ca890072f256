import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from hyll.focusing import SearchBudget, check_focused, erase, search
from hyll.focusing.calculus import active
from hyll.kernel import check_proof
from hyll.spi.adequacy import (AdequacyError, analyse, derivation_to_trace, phase_log,
                               trace_to_derivation)
from hyll.spi.congruence import congruent
from hyll.spi.encode import (ACT, DT, INTER, RATES, RID, canonical_context, canonical_sequent,
                             congruence_sequent, encode_env, encode_proc, encode_sum)
from hyll.spi.examples import PROGRAMS, program, random_trace, roundtrip_failures
from hyll.spi.parse import parse_process, parse_spi, print_spi
from hyll.spi.step import Event, step
from hyll.spi.syntax import Nil, SpiError
from hyll.spi.trace import (Trace, TraceError, check_worlds, dump_trace, load_trace, replay,
                            same_events)
from hyll.syntax import (At, Atom, Bang, Down, ExistsT, Fn, ForallT, Judgement, Limp, One,
                         Tensor, TVar, Up, With, erase_polarity, is_positive, polarize)
from hyll.worlds import lit

DATA = Path(__file__).parent / "data"


def proc(text):
    return parse_process(text)


def sync(x, r, m):
    return Event("sync", Fraction(r), x, m)


def internal(r):
    return Event("internal", Fraction(r))


# -- syntax


@pytest.mark.parametrize("name", ["fig4.spi", "server.spi"])
def test_golden_program_roundtrip(name):
    text = (DATA / name).read_text()
    assert print_spi(parse_spi(text)) == text


@pytest.mark.parametrize("name", sorted(PROGRAMS))
def test_print_parse_idempotent(name):
    once = print_spi(program(name))
    assert print_spi(parse_spi(once)) == once


def test_unguarded_recursion_rejected():
    with pytest.raises(Exception):
        parse_spi("def X() = X()\nrun X()\n")


def test_nonpositive_rate_rejected():
    with pytest.raises(Exception):
        parse_spi("channel x : 0\nrun 0\n")


# -- congruence


CONGRUENT = [
    ("x!(m).0 | 0", "x!(m).0"),
    ("x!(m).0 | y!(n).0", "y!(n).0 | x!(m).0"),
    ("(x!(m).0 | y!(n).0) | tau(1).0", "x!(m).0 | (y!(n).0 | tau(1).0)"),
    ("x!(m).0 + y!(n).0", "y!(n).0 + x!(m).0"),
    ("tau(2).0 + tau(2).0", "tau(2).0"),
    ("new(3) z in new(2) w in z!(w).0", "new(2) w in new(3) z in z!(w).0"),
    ("x!(m).0 | new(3) z in z!(z).0", "new(3) z in (x!(m).0 | z!(z).0)"),
    ("X(c)", "c!(c).X(c)"),
    ("x?(y).(y!(y).0 | 0)", "x?(y).y!(y).0"),
]

DISTINCT = [
    ("x!(m).y!(n).0", "y!(n).x!(m).0"),
    ("x!(m).0 + y!(n).0", "x!(m).0"),
    ("x!(m).0", "y!(n).0"),
    ("x!(m).0 | x!(m).0", "x!(m).0"),
    ("tau(1).0", "tau(2).0"),
    ("x?(y).y!(y).0", "x?(y).x!(y).0"),
]

ENV = parse_spi("def X(u) = u!(u).X(u)\nrun 0\n").env


@pytest.mark.parametrize("P,Q", CONGRUENT)
def test_congruent_pairs(P, Q):
    assert congruent(ENV, proc(P), proc(Q))
    assert congruent(ENV, proc(Q), proc(P))


@pytest.mark.parametrize("P,Q", DISTINCT)
def test_distinct_pairs(P, Q):
    assert not congruent(ENV, proc(P), proc(Q))


def test_garbage_restriction():
    assert congruent({}, proc("new(3) z in 0"), Nil())


def test_congruence_unknown_definition():
    with pytest.raises(SpiError):
        congruent({}, proc("Y(c)"), Nil())


def _provable(seq, fuel=8):
    fp = search(seq, SearchBudget(max_decisions=fuel))
    if fp is not None:
        assert check_focused(fp).ok
        assert check_proof(erase(fp)).ok
    return fp is not None


@pytest.mark.parametrize("P,Q", CONGRUENT)
def test_congruence_is_mutual_entailment(P, Q):
    p, q = proc(P), proc(Q)
    assert _provable(congruence_sequent(ENV, p, q))
    assert _provable(congruence_sequent(ENV, q, p))


@pytest.mark.parametrize("P,Q", DISTINCT)
def test_distinct_not_mutual(P, Q):
    p, q = proc(P), proc(Q)
    assert not (_provable(congruence_sequent(ENV, p, q)) and _provable(congruence_sequent(ENV, q, p)))


def test_garbage_restriction_one_way_only():
    # the rate assumption of an unused restriction cannot be produced from nothing
    p, q = proc("new(3) z in 0"), Nil()
    assert _provable(congruence_sequent({}, p, q))
    assert not _provable(congruence_sequent({}, q, p))


def test_output_swap_unprovable():
    p, q = proc("x!(m).y!(n).0"), proc("y!(n).x!(m).0")
    assert not _provable(congruence_sequent({}, p, q))
    assert not _provable(congruence_sequent({}, q, p))


def test_sum_needs_guard_token():
    hyp = Judgement(encode_proc(proc("x!(m).0 + y!(n).0")), RID)
    goal = Judgement(Tensor(Atom("out", (Fn("x"), Fn("m")), True), One()), RID)
    assert not _provable(active((), (), [hyp], goal, RATES))
    assert _provable(active((), (), [hyp, Judgement(DT, RID)], goal, RATES))


# -- stepping


def test_step_tau():
    [(e, Q)] = step({}, {}, proc("tau(2).0"))
    assert e == internal(2) and congruent({}, Q, Nil())


def test_step_fig4():
    prog = program("fig4")
    [(e, Q)] = step(prog.env, prog.rates, prog.run)
    assert e == sync("x", 4, "a")
    assert congruent(prog.env, Q, proc("tau(2).0 | a!(a).0"))


def test_step_nil():
    assert step({}, {}, Nil()) == []


def test_step_missing_rate():
    with pytest.raises(SpiError):
        step({}, {}, proc("x!(x).0 | x?(y).0"))


def test_restricted_rate_used():
    [(e, _)] = step({}, {}, proc("new(5) z in (z!(z).0 | z?(y).0)"))
    assert e.kind == "sync" and e.rate == 5


def test_choice_discards_other_summands():
    prog = program("choice")
    evs = {str(e): Q for e, Q in step(prog.env, prog.rates, prog.run)}
    assert set(evs) == {"sync(x, 1, x)", "sync(y, 2, y)"}
    assert congruent(prog.env, evs["sync(y, 2, y)"], proc("x?(u).tau(5).0"))


# -- encoding


def test_encode_nil_par():
    assert encode_proc(Nil()) == One()
    P, Q = proc("x!(m).0"), proc("tau(1).0")
    assert encode_proc(proc("x!(m).0 | tau(1).0")) == Tensor(encode_proc(P), encode_proc(Q))


def test_encode_nu_shape():
    A = encode_proc(proc("new(3) z in z!(z).0"))
    assert isinstance(A, ExistsT) and isinstance(A.body, Tensor)
    assert A.body.left == Bang(At(Atom("rt", (TVar(0),)), lit(RATES, (3,))))


def test_encode_prefixes():
    out = Atom("out", (Fn("x"), Fn("m")), True)
    assert encode_sum(proc("x!(m).0")) == Up(Tensor(out, One()))
    tau = Atom("tau", (Fn("2"),), True)
    assert encode_sum(proc("tau(2).0")) == Up(Tensor(tau, One()))
    inp = Atom("in", (Fn("x"), TVar(0)), True)
    assert encode_sum(proc("x?(y).0")) == ForallT(Up(Tensor(inp, One())), "y")
    assert encode_sum(proc("x!(m).0 + tau(2).0")) == With(Up(Tensor(out, One())), Up(Tensor(tau, One())))


def test_outputs_stay_sequential():
    A = encode_proc(proc("x!(m).y!(n).0"))
    assert isinstance(A, Down) and isinstance(A.body, Limp) and A.body.left == DT
    inner = A.body.right.body.right
    assert isinstance(inner, Down) and inner.body.left == DT


def test_encode_env():
    assert encode_env({}) == []
    env = parse_spi("def X() = tau(1).X()\ndef Y(a, b) = a!(b).0\nrun 0\n").env
    js = encode_env(env)
    assert len(js) == 2 and all(j.world == RID for j in js)
    assert not is_positive(js[1].prop)


def test_interaction_theory_polarity():
    assert not is_positive(INTER)
    plain = erase_polarity(INTER)
    assert erase_polarity(polarize(plain, "negative")) == plain


def test_canonical_context_fig4():
    ctx, _ = canonical_context(proc("x!(a).0 | x?(y).y!(y).0"), {"x": 4, "a": 1})
    assert [j.prop.left for j in ctx] == [DT, DT]
    assert ctx[0].prop.right == encode_sum(proc("x!(a).0"))


def test_canonical_context_nu_and_nil():
    assert canonical_context(Nil())[0] == []
    ctx, table = canonical_context(proc("new(3) z in z!(z).0"), {})
    assert len(ctx) == 1 and list(table.values()) == [3]


def test_canonical_sequent_shape():
    prog = program("fig4")
    seq, table = canonical_sequent(prog.env, prog.rates, prog.run, Nil())
    assert seq.neutral
    assert Judgement(INTER, RID) in seq.gamma
    assert Judgement(Up(ACT), RID) in seq.delta
    assert seq.goal.prop == Tensor(At(One(), RID), ACT)
    assert table == {"x": 4, "a": 1}


def test_canonical_sequent_unrated():
    with pytest.raises(SpiError):
        canonical_sequent({}, {}, proc("x!(x).0"), Nil())


def test_inter_copies_must_match():
    prog = program("fig4")
    t = Trace(prog.run, [sync("x", 4, "a")], dict(prog.rates))
    assert check_focused(trace_to_derivation(prog.env, t, inter_copies=1).proof).ok
    with pytest.raises(AdequacyError):
        trace_to_derivation(prog.env, t, inter_copies=2)


# -- traces


def test_empty_trace_right_focus():
    prog = program("fig4")
    c = trace_to_derivation(prog.env, Trace(prog.run, [], dict(prog.rates)))
    assert check_focused(c.proof).ok
    assert phase_log(c.proof) == ["close"]


def test_fig4_phase_log():
    prog = program("fig4")
    c = trace_to_derivation(prog.env, Trace(prog.run, [sync("x", 4, "a")], dict(prog.rates)))
    want = (DATA / "fig4.phases").read_text().splitlines()
    assert phase_log(c.proof) == want


def test_tau_then_sync():
    prog = parse_spi("channel x : 3\nrun tau(2).x!(x).0 | x?(y).0\n")
    t = Trace(prog.run, [internal(2), sync("x", 3, "x")], dict(prog.rates))
    c = trace_to_derivation(prog.env, t)
    assert check_focused(c.proof).ok
    a = analyse(c.proof)
    assert a.trace.events == t.events
    assert a.trace.worlds()[-1] == (2, 3)


def test_non_replaying_trace():
    prog = program("fig4")
    with pytest.raises(SpiError):
        trace_to_derivation(prog.env, Trace(prog.run, [internal(2)], dict(prog.rates)))


def test_trace_dump_load():
    prog = program("fig4")
    t = random_trace(prog, random.Random(3), 4)
    text = dump_trace(t)
    back, worlds = load_trace(text)
    assert back.events == t.events and worlds == t.worlds()
    assert dump_trace(back) == text
    assert check_worlds(back, worlds) is None


def test_tampered_world_detected():
    prog = program("fig4")
    t = Trace(prog.run, [sync("x", 4, "a")], dict(prog.rates))
    bad = dump_trace(t).replace('"world": "[4]"', '"world": "[5]"')
    back, worlds = load_trace(bad)
    assert "event 1" in check_worlds(back, worlds)


def test_trace_header_required():
    with pytest.raises(TraceError):
        load_trace('{"events": []}')


def test_same_events_modes():
    prog = program("race")
    a = Trace(prog.run, [sync("x", 2, "x"), sync("y", 3, "y")], dict(prog.rates))
    b = Trace(prog.run, [sync("y", 3, "y"), sync("x", 2, "x")], dict(prog.rates))
    assert not same_events(a, b)
    assert same_events(a, b, ordered=False)
    assert len(replay(prog.env, b).steps) == 2


@pytest.mark.parametrize("name", sorted(PROGRAMS))
def test_roundtrip_each_program(name):
    prog = program(name)
    rng = random.Random(name)
    for _ in range(2):
        t = random_trace(prog, rng, 6)
        assert roundtrip_failures(prog, t) == []


@settings(max_examples=15, deadline=None)
@given(name=st.sampled_from(sorted(PROGRAMS)), seed=st.integers(0, 2**32 - 1),
       length=st.integers(0, 4))
def test_roundtrip_random(name, seed, length):
    prog = program(name)
    t = random_trace(prog, random.Random(seed), length)
    cert = trace_to_derivation(prog.env, t)
    assert derivation_to_trace(cert.proof).events == t.events
