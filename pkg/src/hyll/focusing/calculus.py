"""Focused sequents and proofs, their checker, and erasure to the unfocused kernel."""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

from ..kernel.proof import (CheckReport, KernelError, Proof, RuleError, Sequent, closed_term,
                            closed_world, mremove, param_value, gamma_has)
from ..syntax import (At, Atom, Bang, Down, ExistsT, ExistsW, Fn, ForallT, ForallW, Here,
                      Judgement, Limp, One, Plus, Tensor, Top, Up, With, Zero, erase_polarity,
                      instantiate, is_positive, jkey, judgement_symbols)
from ..worlds import Domain, WorldExpr

ACTIVE, LEFT, RIGHT = "active", "left", "right"

LEFT_FOCUS_RULES = ("li", "upL", "withL", "limpL", "allL", "dnLF", "atLF")
RIGHT_FOCUS_RULES = ("ri", "downR", "tensR", "plusR", "exR", "bangR", "dnRF", "atRF", "oneR")
ACTIVE_LEFT_RULES = ("tensL", "oneL", "plusL", "zeroL", "dnLA", "atLA", "exL", "bangL", "downL",
                     "lp")
ACTIVE_RIGHT_RULES = ("withR", "topR", "limpR", "dnRA", "atRA", "allR", "upR", "rp")
DECISIONS = ("lf", "cplf", "rf")
FOCUSED_RULES = (LEFT_FOCUS_RULES + RIGHT_FOCUS_RULES + ACTIVE_LEFT_RULES + ACTIVE_RIGHT_RULES
                 + DECISIONS)


@dataclass(frozen=True)
class FSeq:
    """A focused sequent.

    ``active``: ``G; D; omega ==> goal`` (goal negative: active, positive: stable);
    ``left``:   ``G; D; [focus] ==> goal``;
    ``right``:  ``G; D ==> [focus]``.
    A neutral sequent is active with empty ``omega`` and a positive goal.
    """
    form: str
    gamma: Tuple[Judgement, ...]
    delta: Tuple[Judgement, ...]
    omega: Tuple[Judgement, ...] = ()
    focus: Optional[Judgement] = None
    goal: Optional[Judgement] = None
    domain: Domain = Domain.RATES

    def __post_init__(self):
        for f in ("gamma", "delta", "omega"):
            object.__setattr__(self, f, tuple(getattr(self, f)))

    @property
    def neutral(self) -> bool:
        return self.form == ACTIVE and not self.omega and is_positive(self.goal.prop)

    def key(self):
        d = self.domain

        def ms(js):
            return frozenset(Counter(jkey(j, d) for j in js).items())
        return (self.form, frozenset(jkey(j, d) for j in self.gamma), ms(self.delta),
                ms(self.omega), None if self.focus is None else jkey(self.focus, d),
                None if self.goal is None else jkey(self.goal, d))

    def same(self, other: "FSeq") -> bool:
        return self.domain is other.domain and self.key() == other.key()

    def judgements(self):
        out = list(self.gamma) + list(self.delta) + list(self.omega)
        out += [j for j in (self.focus, self.goal) if j is not None]
        return out

    def names(self):
        return judgement_symbols(self.judgements())

    def __str__(self):
        from ..parse import print_judgement as pj, print_judgements as pjs
        g, d = pjs(self.gamma), pjs(self.delta)
        if self.form == RIGHT:
            return f"{g} ; {d} ==> [{pj(self.focus)}]"
        if self.form == LEFT:
            return f"{g} ; {d} ; [{pj(self.focus)}] ==> {pj(self.goal)}"
        return f"{g} ; {d} ; {pjs(self.omega)} ==> {pj(self.goal)}"


def active(gamma, delta, omega, goal, domain) -> FSeq:
    return FSeq(ACTIVE, tuple(gamma), tuple(delta), tuple(omega), None, goal, domain)


def neutral(gamma, delta, goal, domain) -> FSeq:
    return active(gamma, delta, (), goal, domain)


def left(gamma, delta, focus, goal, domain) -> FSeq:
    return FSeq(LEFT, tuple(gamma), tuple(delta), (), focus, goal, domain)


def right(gamma, delta, focus, domain) -> FSeq:
    return FSeq(RIGHT, tuple(gamma), tuple(delta), (), focus, None, domain)


@dataclass(frozen=True)
class FocProof:
    rule: str
    conclusion: FSeq
    premises: Tuple["FocProof", ...] = ()
    principal: Optional[Judgement] = None
    split: Tuple[Judgement, ...] = ()
    choice: int = 0
    inst: object = None
    param: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))
        object.__setattr__(self, "split", tuple(self.split))

    def nodes(self):
        stack = [self]
        while stack:
            p = stack.pop()
            yield p
            stack.extend(reversed(p.premises))

    def count(self, *rules) -> int:
        return sum(1 for p in self.nodes() if p.rule in rules)

    def decisions(self) -> int:
        """Largest number of focusing decisions along any branch."""
        here = 1 if self.rule in DECISIONS else 0
        return here + max((q.decisions() for q in self.premises), default=0)


def is_bare_up_pos(A) -> bool:
    return isinstance(A, Up) and isinstance(A.body, Atom) and A.body.pos


def is_bare_down_neg(A) -> bool:
    return isinstance(A, Down) and isinstance(A.body, Atom) and not A.body.pos


# ---------------------------------------------------------------------------
# Local rules


def expected_premises(p: FocProof) -> List[FSeq]:
    s = p.conclusion
    G, D, O, dom = s.gamma, s.delta, s.omega, s.domain
    r = p.rule

    def need(cond, msg):
        if not cond:
            raise RuleError(msg)

    def pick(pool, cls, where):
        j = p.principal
        need(j is not None and isinstance(j.prop, cls), f"{r}: bad principal in {where}")
        rest = mremove(pool, [j], dom)
        need(rest is not None, f"{r}: principal {j} not in {where}")
        return j, rest

    def split_of(pool):
        rest = mremove(pool, p.split, dom)
        need(rest is not None, f"{r}: split is not a sub-multiset of the linear context")
        return list(p.split), rest

    def inst_for(binder):
        tau = p.inst
        if isinstance(binder, (ForallT, ExistsT)):
            need(isinstance(tau, Fn) and closed_term(tau), f"{r}: needs a closed term")
        else:
            need(isinstance(tau, WorldExpr) and closed_world(tau), f"{r}: needs a closed world")
        return instantiate(binder, tau)

    def fresh(binder):
        need(bool(p.param), f"{r}: missing eigen-parameter")
        t, w = s.names()
        need(p.param not in t and p.param not in w, f"{r}: eigen-parameter {p.param!r} not fresh")
        return instantiate(binder, param_value(binder, p.param))

    if s.form == LEFT:
        need(r in LEFT_FOCUS_RULES, f"{r} does not apply under left focus")
        F, Q = s.focus, s.goal
        A, u = F.prop, F.world
        need(is_positive(Q.prop), "left-focus goal must be positive")
        if r == "li":
            need(isinstance(A, Atom) and not A.pos, "li needs a negative atom in focus")
            need(not D, "li needs an empty linear context")
            need(isinstance(Q.prop, Down) and
                 jkey(Judgement(Q.prop.body, Q.world), dom) == jkey(F, dom),
                 "li: goal does not match the focused atom")
            return []
        if r == "upL":
            need(isinstance(A, Up), "upL needs a shifted positive in focus")
            return [active(G, D, [Judgement(A.body, u)], Q, dom)]
        if r == "withL":
            need(isinstance(A, With) and p.choice in (1, 2), "withL needs & and a choice")
            return [left(G, D, Judgement(A.left if p.choice == 1 else A.right, u), Q, dom)]
        if r == "limpL":
            need(isinstance(A, Limp), "limpL needs -o in focus")
            a, b = split_of(D)
            return [right(G, a, Judgement(A.left, u), dom),
                    left(G, b, Judgement(A.right, u), Q, dom)]
        if r == "allL":
            need(isinstance(A, (ForallT, ForallW)), "allL needs a universal in focus")
            return [left(G, D, Judgement(inst_for(A), u), Q, dom)]
        if r == "dnLF":
            need(isinstance(A, Here), "dnLF needs dn in focus")
            return [left(G, D, Judgement(instantiate(A, u), u), Q, dom)]
        if r == "atLF":
            need(isinstance(A, At), "atLF needs at in focus")
            return [left(G, D, Judgement(A.body, A.world), Q, dom)]

    if s.form == RIGHT:
        need(r in RIGHT_FOCUS_RULES, f"{r} does not apply under right focus")
        A, w = s.focus.prop, s.focus.world
        if r == "ri":
            need(isinstance(A, Atom) and A.pos, "ri needs a positive atom in focus")
            need(len(D) == 1 and jkey(D[0], dom) == jkey(Judgement(Up(A), w), dom),
                 "ri: linear context must be exactly the shifted atom")
            return []
        if r == "downR":
            need(isinstance(A, Down), "downR needs a shifted negative in focus")
            return [active(G, D, (), Judgement(A.body, w), dom)]
        if r == "tensR":
            need(isinstance(A, Tensor), "tensR needs * in focus")
            a, b = split_of(D)
            return [right(G, a, Judgement(A.left, w), dom), right(G, b, Judgement(A.right, w), dom)]
        if r == "plusR":
            need(isinstance(A, Plus) and p.choice in (1, 2), "plusR needs + and a choice")
            return [right(G, D, Judgement(A.left if p.choice == 1 else A.right, w), dom)]
        if r == "exR":
            need(isinstance(A, (ExistsT, ExistsW)), "exR needs an existential in focus")
            return [right(G, D, Judgement(inst_for(A), w), dom)]
        if r == "bangR":
            need(isinstance(A, Bang) and not D, "bangR needs ! and an empty linear context")
            return [active(G, (), (), Judgement(A.body, w), dom)]
        if r == "dnRF":
            need(isinstance(A, Here), "dnRF needs dn in focus")
            return [right(G, D, Judgement(instantiate(A, w), w), dom)]
        if r == "atRF":
            need(isinstance(A, At), "atRF needs at in focus")
            return [right(G, D, Judgement(A.body, A.world), dom)]
        if r == "oneR":
            need(isinstance(A, One) and not D, "oneR needs 1 and an empty linear context")
            return []

    need(s.form == ACTIVE, f"unknown sequent form {s.form!r}")
    C, w = s.goal.prop, s.goal.world

    if r in DECISIONS:
        need(s.neutral, f"{r} applies only to neutral sequents")
        if r == "lf":
            j = p.principal
            need(j is not None and not is_bare_up_pos(j.prop),
                 "lf may not focus on a shifted positive atom")
            rest = mremove(D, [j], dom)
            need(rest is not None, f"lf: {j} is not in the linear context")
            return [left(G, rest, j, s.goal, dom)]
        if r == "cplf":
            j = p.principal
            need(j is not None and gamma_has(G, j, dom),
                 "cplf: principal is not in the unrestricted context")
            return [left(G, D, j, s.goal, dom)]
        need(not is_bare_down_neg(C), "rf may not focus on a shifted negative atom")
        return [right(G, D, s.goal, dom)]

    if r in ACTIVE_RIGHT_RULES:
        need(not is_positive(C), f"{r} needs a negative goal")
        if r == "withR":
            need(isinstance(C, With), "withR needs &")
            return [active(G, D, O, Judgement(C.left, w), dom),
                    active(G, D, O, Judgement(C.right, w), dom)]
        if r == "topR":
            need(isinstance(C, Top), "topR needs top")
            return []
        if r == "limpR":
            need(isinstance(C, Limp), "limpR needs -o")
            return [active(G, D, O + (Judgement(C.left, w),), Judgement(C.right, w), dom)]
        if r == "dnRA":
            need(isinstance(C, Here), "dnRA needs dn")
            return [active(G, D, O, Judgement(instantiate(C, w), w), dom)]
        if r == "atRA":
            need(isinstance(C, At), "atRA needs at")
            return [active(G, D, O, Judgement(C.body, C.world), dom)]
        if r == "allR":
            need(isinstance(C, (ForallT, ForallW)), "allR needs a universal")
            return [active(G, D, O, Judgement(fresh(C), w), dom)]
        if r == "upR":
            need(isinstance(C, Up), "upR needs a shifted positive")
            return [active(G, D, O, Judgement(C.body, w), dom)]
        if r == "rp":
            need(isinstance(C, Atom) and not C.pos, "rp needs a negative atom")
            return [active(G, D, O, Judgement(Down(C), w), dom)]

    if r in ACTIVE_LEFT_RULES:
        cls = {"tensL": Tensor, "oneL": One, "plusL": Plus, "zeroL": Zero, "dnLA": Here,
               "atLA": At, "exL": (ExistsT, ExistsW), "bangL": Bang, "downL": Down,
               "lp": Atom}[r]
        j, rest = pick(O, cls, "the active context")
        A, u = j.prop, j.world
        need(is_positive(A), f"{r}: principal must be positive")
        if r == "tensL":
            return [active(G, D, [Judgement(A.left, u), Judgement(A.right, u)] + rest, s.goal, dom)]
        if r == "oneL":
            return [active(G, D, rest, s.goal, dom)]
        if r == "plusL":
            return [active(G, D, [Judgement(A.left, u)] + rest, s.goal, dom),
                    active(G, D, [Judgement(A.right, u)] + rest, s.goal, dom)]
        if r == "zeroL":
            return []
        if r == "dnLA":
            return [active(G, D, [Judgement(instantiate(A, u), u)] + rest, s.goal, dom)]
        if r == "atLA":
            return [active(G, D, [Judgement(A.body, A.world)] + rest, s.goal, dom)]
        if r == "exL":
            return [active(G, D, [Judgement(fresh(A), u)] + rest, s.goal, dom)]
        if r == "bangL":
            return [active(G + (Judgement(A.body, u),), D, rest, s.goal, dom)]
        if r == "downL":
            return [active(G, D + (Judgement(A.body, u),), rest, s.goal, dom)]
        if r == "lp":
            return [active(G, D + (Judgement(Up(A), u),), rest, s.goal, dom)]
    raise RuleError(f"rule {r!r} does not apply to an {s.form} sequent")


def check_focused(p: FocProof) -> CheckReport:
    stack = [(p, ())]
    while stack:
        node, path = stack.pop()
        try:
            _check_sequent(node.conclusion)
            want = expected_premises(node)
        except KernelError as e:
            return CheckReport(False, path, node.rule, str(e))
        except Exception as e:
            return CheckReport(False, path, node.rule, f"{type(e).__name__}: {e}")
        if len(want) != len(node.premises):
            return CheckReport(False, path, node.rule,
                               f"expected {len(want)} premises, found {len(node.premises)}")
        for i, (s, q) in enumerate(zip(want, node.premises)):
            if not s.same(q.conclusion):
                return CheckReport(False, path + (i,), q.rule,
                                   f"premise {i} is {q.conclusion}, expected {s}")
            stack.append((q, path + (i,)))
    return CheckReport(True)


def _check_sequent(s: FSeq):
    for j in s.judgements():
        if not closed_world(j.world):
            raise RuleError(f"judgement {j} has an open world")
    for j in itertools.chain(s.gamma, s.delta):
        if is_positive(j.prop):
            raise RuleError(f"context judgement {j} must be negative")
    for j in s.omega:
        if not is_positive(j.prop):
            raise RuleError(f"active judgement {j} must be positive")
    if s.form == LEFT and is_positive(s.focus.prop):
        raise RuleError("left focus must be negative")
    if s.form == RIGHT and not is_positive(s.focus.prop):
        raise RuleError("right focus must be positive")


# ---------------------------------------------------------------------------
# Erasure


def erase_judgement(j: Judgement) -> Judgement:
    return Judgement(erase_polarity(j.prop), j.world)


def erase_sequent(s: FSeq) -> Sequent:
    e = erase_judgement
    G = tuple(map(e, s.gamma))
    D = tuple(map(e, s.delta)) + tuple(map(e, s.omega))
    if s.form == LEFT:
        return Sequent(G, D + (e(s.focus),), e(s.goal), s.domain)
    if s.form == RIGHT:
        return Sequent(G, D, e(s.focus), s.domain)
    return Sequent(G, D, e(s.goal), s.domain)


_PASS = {"upL", "downR", "upR", "rp", "lp", "downL", "lf", "rf"}
_KERNEL = {"li": "init", "ri": "init", "cplf": "copy", "dnLF": "dnL", "atLF": "atL",
           "dnRF": "dnR", "atRF": "atR", "dnLA": "dnL", "atLA": "atL", "dnRA": "dnR",
           "atRA": "atR"}


def erase(p: FocProof) -> Proof:
    """Forget the focusing structure; the result checks in the unfocused kernel."""
    conc = erase_sequent(p.conclusion)
    if p.rule in _PASS:
        (q,) = p.premises
        inner = erase(q)
        return replace(inner, conclusion=conc)
    rule = _KERNEL.get(p.rule, p.rule)
    s = p.conclusion
    principal = p.principal
    if s.form == LEFT:
        principal = s.focus
    e = erase_judgement
    return Proof(rule, conc, tuple(erase(q) for q in p.premises),
                 principal=None if principal is None or rule == "init" else e(principal),
                 split=tuple(map(e, p.split)), choice=p.choice, inst=p.inst, param=p.param)
