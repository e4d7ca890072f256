"""Sequents, proof objects and the checker for the unfocused HyLL calculus."""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, List, Optional, Sequence, Tuple

from ..syntax import (At, Atom, Bang, ExistsT, ExistsW, Fn, ForallT, ForallW, Here, Judgement,
                      Limp, One, Plus, Prop, Tensor, Term, Top, With, Zero, instantiate, jkey,
                      judgement_symbols, well_formed)
from ..worlds import Domain, WorldExpr, WVar, WBound, WComp, WRateOf

RULES = (
    "init", "copy", "tensR", "tensL", "oneR", "oneL", "limpR", "limpL", "topR", "zeroL",
    "withR", "withL", "plusR", "plusL", "allR", "allL", "exR", "exL", "bangR", "bangL",
    "atR", "atL", "dnR", "dnL", "cut",
)


class KernelError(Exception):
    pass


class RuleError(KernelError):
    """A proof node does not match its rule."""


@dataclass(frozen=True)
class Sequent:
    gamma: Tuple[Judgement, ...]
    delta: Tuple[Judgement, ...]
    goal: Judgement
    domain: Domain = Domain.RATES

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(self.gamma))
        object.__setattr__(self, "delta", tuple(self.delta))

    def key(self):
        d = self.domain
        return (frozenset(jkey(j, d) for j in self.gamma),
                frozenset(Counter(jkey(j, d) for j in self.delta).items()),
                jkey(self.goal, d))

    def same(self, other: "Sequent") -> bool:
        return self.domain is other.domain and self.key() == other.key()

    def names(self):
        return judgement_symbols(itertools.chain(self.gamma, self.delta, (self.goal,)))

    def __str__(self):
        from ..parse import print_judgements, print_judgement
        return f"{print_judgements(self.gamma)} ; {print_judgements(self.delta)} ==> " \
               f"{print_judgement(self.goal)}"


@dataclass(frozen=True)
class Proof:
    """One node of a derivation.

    Witnesses: ``principal`` (the hypothesis a left rule or copy acts on),
    ``split`` (the part of the linear context sent to the first premise of a
    multiplicative rule), ``choice`` (1 or 2 for the additive rules), ``inst``
    (term or world for the instantiating quantifier rules), ``param`` (the fresh
    name for the eigenvariable rules), ``cut`` and ``cut_kind`` for cut nodes.
    """
    rule: str
    conclusion: Sequent
    premises: Tuple["Proof", ...] = ()
    principal: Optional[Judgement] = None
    split: Tuple[Judgement, ...] = ()
    choice: int = 0
    inst: object = None
    param: Optional[str] = None
    cut: Optional[Judgement] = None
    cut_kind: int = 0

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))
        object.__setattr__(self, "split", tuple(self.split))

    def nodes(self):
        stack = [self]
        while stack:
            p = stack.pop()
            yield p
            stack.extend(p.premises)

    def count(self, rule: str) -> int:
        return sum(1 for p in self.nodes() if p.rule == rule)

    def height(self) -> int:
        return 1 + max((q.height() for q in self.premises), default=0)


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    path: Tuple[int, ...] = ()
    rule: Optional[str] = None
    reason: Optional[str] = None

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "ok"
        where = "root" if not self.path else "root/" + "/".join(map(str, self.path))
        return f"failure at {where} [{self.rule}]: {self.reason}"


# ---------------------------------------------------------------------------
# Multiset helpers


def mremove(delta: Sequence[Judgement], items: Iterable[Judgement], domain: Domain):
    """``delta`` minus ``items`` as multisets (by judgement key), or None."""
    rest = list(delta)
    keys = [jkey(j, domain) for j in rest]
    for it in items:
        k = jkey(it, domain)
        try:
            i = keys.index(k)
        except ValueError:
            return None
        del rest[i]
        del keys[i]
    return rest


def gamma_has(gamma, j, domain):
    k = jkey(j, domain)
    return any(jkey(g, domain) == k for g in gamma)


def closed_term(t) -> bool:
    if isinstance(t, Fn):
        return all(closed_term(a) for a in t.args)
    return False


def closed_world(e) -> bool:
    if isinstance(e, WBound):
        return False
    if isinstance(e, WComp):
        return closed_world(e.left) and closed_world(e.right)
    if isinstance(e, WRateOf):
        return closed_term(e.term)
    return isinstance(e, WorldExpr)


def _cname(cls):
    return " or ".join(c.__name__ for c in cls) if isinstance(cls, tuple) else cls.__name__


def param_value(binder: Prop, name: str):
    return Fn(name) if isinstance(binder, (ForallT, ExistsT)) else WVar(name)


# ---------------------------------------------------------------------------
# Local rule semantics


def expected_premises(p: Proof) -> List[Sequent]:
    """Premise sequents the rule of ``p`` demands; raises RuleError on mismatch."""
    s = p.conclusion
    G, D, goal, dom = s.gamma, s.delta, s.goal, s.domain
    C, w = goal.prop, goal.world
    r = p.rule

    def seq(gamma=G, delta=D, g=goal):
        return Sequent(tuple(gamma), tuple(delta), g, dom)

    def take_principal(cls):
        j = p.principal
        if j is None or not isinstance(j.prop, cls):
            raise RuleError(f"principal must be a {_cname(cls)} judgement")
        rest = mremove(D, [j], dom)
        if rest is None:
            raise RuleError(f"principal {j} is not in the linear context")
        return j, rest

    def goal_is(cls):
        if not isinstance(C, cls):
            raise RuleError(f"goal must be a {_cname(cls)}")

    def split_of(rest):
        other = mremove(rest, p.split, dom)
        if other is None:
            raise RuleError("split is not a sub-multiset of the linear context")
        return list(p.split), other

    def fresh(binder):
        name = p.param
        if not name:
            raise RuleError("missing eigen-parameter")
        terms, worlds = s.names()
        if name in terms or name in worlds:
            raise RuleError(f"eigen-parameter {name!r} is not fresh")
        return param_value(binder, name)

    def inst_for(binder):
        tau = p.inst
        if isinstance(binder, (ForallT, ExistsT)):
            if not isinstance(tau, Fn) or not closed_term(tau):
                raise RuleError("term quantifier needs a closed term witness")
        elif not isinstance(tau, WorldExpr) or not closed_world(tau):
            raise RuleError("world quantifier needs a closed world witness")
        return tau

    if r == "init":
        if len(D) != 1:
            raise RuleError(f"init needs exactly one linear hypothesis, found {len(D)}")
        if not isinstance(C, Atom):
            raise RuleError("init goal must be atomic")
        if jkey(D[0], dom) != jkey(goal, dom):
            raise RuleError(f"hypothesis {D[0]} does not match goal {goal}")
        return []
    if r == "copy":
        j = p.principal
        if j is None or not gamma_has(G, j, dom):
            raise RuleError("copied judgement is not in the unrestricted context")
        return [seq(delta=list(D) + [j])]
    if r == "tensR":
        goal_is(Tensor)
        left, right = split_of(D)
        return [seq(delta=left, g=Judgement(C.left, w)), seq(delta=right, g=Judgement(C.right, w))]
    if r == "tensL":
        j, rest = take_principal(Tensor)
        return [seq(delta=rest + [Judgement(j.prop.left, j.world), Judgement(j.prop.right, j.world)])]
    if r == "oneR":
        goal_is(One)
        if D:
            raise RuleError("1R needs an empty linear context")
        return []
    if r == "oneL":
        _, rest = take_principal(One)
        return [seq(delta=rest)]
    if r == "limpR":
        goal_is(Limp)
        return [seq(delta=list(D) + [Judgement(C.left, w)], g=Judgement(C.right, w))]
    if r == "limpL":
        j, rest = take_principal(Limp)
        left, right = split_of(rest)
        u = j.world
        return [seq(delta=left, g=Judgement(j.prop.left, u)),
                seq(delta=right + [Judgement(j.prop.right, u)])]
    if r == "topR":
        goal_is(Top)
        return []
    if r == "zeroL":
        take_principal(Zero)
        return []
    if r == "withR":
        goal_is(With)
        return [seq(g=Judgement(C.left, w)), seq(g=Judgement(C.right, w))]
    if r == "withL":
        j, rest = take_principal(With)
        if p.choice not in (1, 2):
            raise RuleError("&L needs choice 1 or 2")
        part = j.prop.left if p.choice == 1 else j.prop.right
        return [seq(delta=rest + [Judgement(part, j.world)])]
    if r == "plusR":
        goal_is(Plus)
        if p.choice not in (1, 2):
            raise RuleError("+R needs choice 1 or 2")
        return [seq(g=Judgement(C.left if p.choice == 1 else C.right, w))]
    if r == "plusL":
        j, rest = take_principal(Plus)
        return [seq(delta=rest + [Judgement(j.prop.left, j.world)]),
                seq(delta=rest + [Judgement(j.prop.right, j.world)])]
    if r == "allR":
        goal_is((ForallT, ForallW))
        return [seq(g=Judgement(instantiate(C, fresh(C)), w))]
    if r == "allL":
        j, rest = take_principal((ForallT, ForallW))
        return [seq(delta=rest + [Judgement(instantiate(j.prop, inst_for(j.prop)), j.world)])]
    if r == "exR":
        goal_is((ExistsT, ExistsW))
        return [seq(g=Judgement(instantiate(C, inst_for(C)), w))]
    if r == "exL":
        j, rest = take_principal((ExistsT, ExistsW))
        return [seq(delta=rest + [Judgement(instantiate(j.prop, fresh(j.prop)), j.world)])]
    if r == "bangR":
        goal_is(Bang)
        if D:
            raise RuleError("!R needs an empty linear context")
        return [seq(g=Judgement(C.body, w))]
    if r == "bangL":
        j, rest = take_principal(Bang)
        return [seq(gamma=list(G) + [Judgement(j.prop.body, j.world)], delta=rest)]
    if r == "atR":
        goal_is(At)
        return [seq(g=Judgement(C.body, C.world))]
    if r == "atL":
        j, rest = take_principal(At)
        return [seq(delta=rest + [Judgement(j.prop.body, j.prop.world)])]
    if r == "dnR":
        goal_is(Here)
        return [seq(g=Judgement(instantiate(C, w), w))]
    if r == "dnL":
        j, rest = take_principal(Here)
        return [seq(delta=rest + [Judgement(instantiate(j.prop, j.world), j.world)])]
    if r == "cut":
        J = p.cut
        if J is None:
            raise RuleError("cut needs a cut judgement")
        if p.cut_kind == 1:
            left, right = split_of(D)
            return [seq(delta=left, g=J), seq(delta=right + [J])]
        if p.cut_kind == 2:
            return [seq(delta=[], g=J), seq(gamma=list(G) + [J])]
        raise RuleError("cut kind must be 1 or 2")
    raise RuleError(f"unknown rule {r!r}")


def check_proof(p: Proof, allow_cut: bool = False) -> CheckReport:
    stack = [(p, ())]
    while stack:
        node, path = stack.pop()
        if node.rule == "cut" and not allow_cut:
            return CheckReport(False, path, "cut", "cut nodes need the with-cut flag")
        try:
            _check_closed(node.conclusion)
            want = expected_premises(node)
        except KernelError as e:
            return CheckReport(False, path, node.rule, str(e))
        except Exception as e:  # malformed witnesses must not escape as crashes
            return CheckReport(False, path, node.rule, f"{type(e).__name__}: {e}")
        if len(want) != len(node.premises):
            return CheckReport(False, path, node.rule,
                               f"expected {len(want)} premises, found {len(node.premises)}")
        for i, (s, q) in enumerate(zip(want, node.premises)):
            if q.conclusion.domain is not s.domain or not s.same(q.conclusion):
                return CheckReport(False, path + (i,), q.rule,
                                   f"premise {i} proves {q.conclusion}, expected {s}")
            stack.append((q, path + (i,)))
    return CheckReport(True)


def _check_closed(s: Sequent):
    for j in itertools.chain(s.gamma, s.delta, (s.goal,)):
        if not well_formed(j.prop) or not closed_world(j.world):
            raise RuleError(f"judgement {j} is not closed")


# ---------------------------------------------------------------------------
# Invertible rules


INVERTIBLE_RIGHT = {"withR": With, "topR": Top, "limpR": Limp, "allR": (ForallT, ForallW),
                    "dnR": Here, "atR": At}
INVERTIBLE_LEFT = {"tensL": Tensor, "oneL": One, "plusL": Plus, "zeroL": Zero,
                   "exL": (ExistsT, ExistsW), "bangL": Bang, "dnL": Here, "atL": At}

_fresh_counter = itertools.count()


def fresh_param(taken=()) -> str:
    while True:
        name = f"_p{next(_fresh_counter)}"
        if name not in taken:
            return name


def invert(rule: str, s: Sequent) -> List[Sequent]:
    """Premises of an invertible rule applied to ``s`` (first matching principal)."""
    if rule in INVERTIBLE_RIGHT:
        if not isinstance(s.goal.prop, INVERTIBLE_RIGHT[rule]):
            raise KernelError(f"{rule}: goal {s.goal} has no such principal formula")
        node = Proof(rule, s)
        if rule == "allR":
            node = replace(node, param=fresh_param(set().union(*s.names())))
        return expected_premises(node)
    if rule in INVERTIBLE_LEFT:
        cls = INVERTIBLE_LEFT[rule]
        for j in s.delta:
            if isinstance(j.prop, cls):
                node = Proof(rule, s, principal=j)
                if rule == "exL":
                    node = replace(node, param=fresh_param(set().union(*s.names())))
                return expected_premises(node)
        raise KernelError(f"{rule}: no principal formula in the linear context")
    raise KernelError(f"{rule} is not an invertible rule")
