"""Encoding of processes, environments and the interaction theory into
polarized HyLL over the rates domain, plus canonical contexts and sequents."""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from ..focusing.calculus import FSeq, active, neutral
from ..syntax import (At, Atom, Bang, Down, ExistsT, Fn, ForallT, Judgement, Limp, One, Tensor,
                      TVar, Up, With, bangbang, iff, rho, shift_term)
from ..worlds import Domain, WComp, WRateOf, WorldExpr, fmt_rational, lit
from .step import _Builder
from .syntax import (Bound, Call, Choice, Env, In, Name, Nil, Nu, Out, Par, Process, SpiError, Sum,
                     Tau, free_names)

RATES = Domain.RATES
RID = lit(RATES, ())
RESERVED = {"dt", "out", "in", "tau", "act", "rt"}

DT = Atom("dt", (), True)
ACT = Atom("act", (), True)


def rate_world(r) -> WorldExpr:
    return lit(RATES, (Fraction(r),))


def numeral(r) -> Fn:
    return Fn(fmt_rational(Fraction(r)))


def chan_term(c, shift=0):
    if isinstance(c, Bound):
        return TVar(c.index + shift)
    return Fn(c.name)


def rt(x) -> Atom:
    return Atom("rt", (x,), False)


def encode_proc(P: Process):
    """Positive encoding of a process."""
    if isinstance(P, Nil):
        return One()
    if isinstance(P, Par):
        return Tensor(encode_proc(P.left), encode_proc(P.right))
    if isinstance(P, Nu):
        return ExistsT(Tensor(Bang(At(rt(TVar(0)), rate_world(P.rate))), encode_proc(P.body)),
                       P.hint)
    if isinstance(P, Call):
        if P.name in RESERVED:
            raise SpiError(f"definition name {P.name!r} clashes with the encoding's atoms")
        return Atom(P.name, tuple(chan_term(a) for a in P.args), True)
    if isinstance(P, Sum):
        return Down(guarded(P))
    raise SpiError(f"not a process: {P!r}")


def guarded(M: Sum):
    """``dt -o [M]``, the form a sum takes in the linear context."""
    return Limp(DT, encode_sum(M))


def encode_sum(M: Sum):
    """Negative encoding of a sum."""
    if isinstance(M, Out):
        return Up(Tensor(Atom("out", (chan_term(M.chan), chan_term(M.msg)), True),
                         encode_proc(M.cont)))
    if isinstance(M, In):
        return ForallT(Up(Tensor(Atom("in", (chan_term(M.chan, 1), TVar(0)), True),
                                 encode_proc(M.body))), M.hint)
    if isinstance(M, Tau):
        return Up(Tensor(Atom("tau", (numeral(M.rate),), True), encode_proc(M.cont)))
    if isinstance(M, Choice):
        return With(encode_sum(M.left), encode_sum(M.right))
    raise SpiError(f"not a sum: {M!r}")


def definition_prop(d):
    if d.name in RESERVED:
        raise SpiError(f"definition name {d.name!r} clashes with the encoding's atoms")
    n = d.arity
    head = Atom(d.name, tuple(TVar(n - 1 - i) for i in range(n)), True)
    body = iff(head, encode_proc(d.body))
    for p in reversed(d.params):
        body = ForallT(body, p)
    return bangbang(body)


def encode_env(env: Env) -> List[Judgement]:
    return [Judgement(definition_prop(d), RID) for d in env.values()]


def _int_clause():
    tau = Atom("tau", (TVar(0),), True)
    return Tensor(At(DT, RID),
                  Down(ForallT(Limp(At(tau, RID), rho(WRateOf(TVar(0)), Up(ACT))), "r")))


def _syn_clause():
    x, r, m = TVar(2), TVar(1), TVar(0)
    both = Tensor(Atom("out", (x, m), True), Atom("in", (x, m), True))
    body = Limp(At(both, RID),
                Limp(Down(At(rt(x), WRateOf(r))), rho(WRateOf(r), Up(ACT))))
    return Tensor(At(Tensor(DT, DT), RID),
                  Down(ForallT(ForallT(ForallT(body, "m"), "r"), "x")))


INT = _int_clause()
SYN = _syn_clause()
INTER = bangbang(Limp(ACT, With(Up(INT), Up(SYN))))
# the quantified bodies the cleanup focus works on
INT_CLEANUP = INT.right.body
SYN_CLEANUP = SYN.right.body


def interaction_theory() -> Judgement:
    return Judgement(INTER, RID)


def rate_judgement(x: str, r) -> Judgement:
    return Judgement(rt(Fn(x)), rate_world(r))


def canonical_context(P: Process, rates=None, env=None) -> Tuple[List[Judgement], Dict[str, Fraction]]:
    """The canonical context of ``P`` at ``rid`` and the rate table extended
    with the channels its restrictions open."""
    b = _Builder(env or {}, rates or {})
    b.open(P)
    return [Judgement(can(c), RID) for c in b.comps], b.rates


def can(c):
    if isinstance(c, Call):
        return Up(encode_proc(c))
    return guarded(c)


def canonical_goal(Q: Process, t: WorldExpr) -> Judgement:
    return Judgement(Tensor(At(encode_proc(Q), RID), ACT), t)


def canonical_sequent(env: Env, rates, P: Process, Q: Process, s: WorldExpr = RID,
                      t: WorldExpr = RID, inter_copies: Optional[int] = None,
                      ) -> Tuple[FSeq, Dict[str, Fraction]]:
    """The canonical neutral sequent for ``P`` (lock at ``s``) reaching ``Q``
    (lock at ``t``), with the rate table after opening ``P``.

    By default the interaction theory is unrestricted, so traces of any
    length fit.  ``inter_copies=n`` puts n linear copies in the linear
    context instead, bounding derivations to at most n steps.
    """
    delta, table = canonical_context(P, rates, env)
    for x in sorted(free_names(P) | free_names(Q)):
        if x not in table:
            raise SpiError(f"channel {x!r} has no rate")
    gamma = encode_env(env) + [rate_judgement(x, r) for x, r in table.items()]
    linear = [Judgement(Up(ACT), s)] + delta
    if inter_copies is None:
        gamma.append(interaction_theory())
    else:
        if inter_copies < 0:
            raise SpiError("inter_copies must be >= 0")
        linear += [interaction_theory()] * inter_copies
    seq = neutral(gamma, linear, canonical_goal(Q, t), RATES)
    return seq, table


def congruence_sequent(env: Env, P: Process, Q: Process) -> FSeq:
    """``env @ rid ; proc P @ rid ==> proc Q @ rid``: no lock, no
    interaction theory, so only the ambient structure can be used."""
    gamma = encode_env(env)
    return active(gamma, (), [Judgement(encode_proc(P), RID)], Judgement(encode_proc(Q), RID), RATES)


__all__ = ["congruence_sequent", "encode_proc", "encode_sum", "encode_env", "interaction_theory", "canonical_context",
           "canonical_sequent", "canonical_goal", "rate_judgement", "guarded", "definition_prop",
           "INTER", "INT", "SYN", "ACT", "DT", "RID", "numeral", "rate_world"]
