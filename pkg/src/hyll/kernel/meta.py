"""Executable metatheory: identity expansion, weakening, contraction, cut elimination."""
from __future__ import annotations

from dataclasses import replace
from typing import Iterable

from ..syntax import (At, Atom, Bang, ExistsT, ExistsW, Fn, ForallT, ForallW, Here, Judgement,
                      Limp, One, Plus, Tensor, Top, With, Zero, abstract_term, abstract_world,
                      instantiate, jkey, subst_term, subst_world, term_symbols)
from ..worlds import Domain, WComp, WorldExpr, WRateOf, WVar, WId
from .proof import Proof, Sequent, fresh_param, mremove, param_value

# ---------------------------------------------------------------------------
# Identity


def identity_expand(A, w: WorldExpr, domain: Domain = Domain.RATES, gamma=()) -> Proof:
    """Cut-free proof of ``gamma; A @ w ==> A @ w``."""
    gamma = tuple(gamma)
    j = Judgement(A, w)

    def node(rule, delta, goal, premises=(), **kw):
        return Proof(rule, Sequent(gamma, tuple(delta), goal, domain), tuple(premises), **kw)

    if isinstance(A, Atom):
        return node("init", [j], j)
    if isinstance(A, Tensor):
        l, r = Judgement(A.left, w), Judgement(A.right, w)
        inner = node("tensR", [l, r], j,
                     [identity_expand(A.left, w, domain, gamma),
                      identity_expand(A.right, w, domain, gamma)], split=(l,))
        return node("tensL", [j], j, [inner], principal=j)
    if isinstance(A, One):
        return node("oneL", [j], j, [node("oneR", [], j)], principal=j)
    if isinstance(A, Limp):
        a, b = Judgement(A.left, w), Judgement(A.right, w)
        inner = node("limpL", [j, a], b,
                     [identity_expand(A.left, w, domain, gamma),
                      identity_expand(A.right, w, domain, gamma)], principal=j, split=(a,))
        return node("limpR", [j], j, [inner])
    if isinstance(A, With):
        sides = []
        for i, part in ((1, A.left), (2, A.right)):
            pj = Judgement(part, w)
            sides.append(node("withL", [j], pj, [identity_expand(part, w, domain, gamma)],
                              principal=j, choice=i))
        return node("withR", [j], j, sides)
    if isinstance(A, Top):
        return node("topR", [j], j)
    if isinstance(A, Zero):
        return node("zeroL", [j], j, principal=j)
    if isinstance(A, Plus):
        sides = []
        for i, part in ((1, A.left), (2, A.right)):
            pj = Judgement(part, w)
            sides.append(node("plusR", [pj], j, [identity_expand(part, w, domain, gamma)],
                              choice=i))
        return node("plusL", [j], j, sides, principal=j)
    if isinstance(A, Bang):
        b = Judgement(A.body, w)
        g2 = gamma + (b,)
        inner = Proof("copy", Sequent(g2, (), b, domain),
                      (identity_expand(A.body, w, domain, g2),), principal=b)
        right = Proof("bangR", Sequent(g2, (), j, domain), (inner,))
        return node("bangL", [j], j, [right], principal=j)
    if isinstance(A, (ForallT, ForallW, ExistsT, ExistsW)):
        taken = _names(gamma, [j])
        a = fresh_param(taken)
        val = param_value(A, a)
        opened = Judgement(instantiate(A, val), w)
        sub = identity_expand(opened.prop, w, domain, gamma)
        if isinstance(A, (ForallT, ForallW)):
            inner = node("allL", [j], opened, [sub], principal=j, inst=val)
            return node("allR", [j], j, [inner], param=a)
        inner = node("exR", [opened], j, [sub], inst=val)
        return node("exL", [j], j, [inner], principal=j, param=a)
    if isinstance(A, At):
        b = Judgement(A.body, A.world)
        inner = node("atR", [b], j, [identity_expand(A.body, A.world, domain, gamma)])
        return node("atL", [j], j, [inner], principal=j)
    if isinstance(A, Here):
        b = Judgement(instantiate(A, w), w)
        inner = node("dnR", [b], j, [identity_expand(b.prop, w, domain, gamma)])
        return node("dnL", [j], j, [inner], principal=j)
    raise TypeError(f"cannot expand {A!r}")


def _names(*groups):
    out = set()
    from ..syntax import judgement_symbols
    for g in groups:
        t, w = judgement_symbols(g)
        out |= t | w
    return out


# ---------------------------------------------------------------------------
# Generic proof rewriting


def map_judgements(p: Proof, fj, fi=lambda x: x, fparam=lambda x: x) -> Proof:
    """Rebuild ``p`` applying ``fj`` to every judgement, ``fi`` to instances."""
    s = p.conclusion
    return replace(
        p,
        conclusion=Sequent(tuple(map(fj, s.gamma)), tuple(map(fj, s.delta)), fj(s.goal), s.domain),
        premises=tuple(map_judgements(q, fj, fi, fparam) for q in p.premises),
        principal=None if p.principal is None else fj(p.principal),
        split=tuple(map(fj, p.split)),
        inst=None if p.inst is None else fi(p.inst),
        param=None if p.param is None else fparam(p.param),
        cut=None if p.cut is None else fj(p.cut),
    )


def _replace_term(t, name, val):
    if isinstance(t, Fn):
        if t.sym == name and not t.args:
            return val
        return Fn(t.sym, tuple(_replace_term(a, name, val) for a in t.args)) if t.args else t
    return t


def _replace_world(e, name, val, term_val=None):
    if isinstance(e, WVar) and e.name == name:
        return val if val is not None else e
    if isinstance(e, WComp):
        return WComp(_replace_world(e.left, name, val, term_val),
                     _replace_world(e.right, name, val, term_val))
    if isinstance(e, WRateOf) and term_val is not None:
        return WRateOf(_replace_term(e.term, name, term_val))
    return e


def subst_param(p: Proof, name: str, val) -> Proof:
    """Replace the eigen-parameter ``name`` by a term or world throughout ``p``."""
    if isinstance(val, WorldExpr):
        def fj(j):
            return Judgement(subst_world(abstract_world(j.prop, name), val),
                             _replace_world(j.world, name, val))
        fi = (lambda x: _replace_world(x, name, val) if isinstance(x, WorldExpr) else x)
    else:
        def fj(j):
            return Judgement(subst_term(abstract_term(j.prop, name), val),
                             _replace_world(j.world, name, None, val))
        fi = (lambda x: _replace_term(x, name, val) if not isinstance(x, WorldExpr)
              else _replace_world(x, name, None, val))
    return map_judgements(p, fj, fi)


def params(p: Proof) -> set:
    return {q.param for q in p.nodes() if q.param}


def freshen(p: Proof, avoid: set) -> Proof:
    """Rename eigen-parameters of ``p`` that clash with ``avoid``.

    Renaming is local to the subtree an eigen node binds its parameter in.
    """
    avoid = set(avoid)
    if not avoid & params(p):
        return p

    def go(q: Proof) -> Proof:
        prem = q.premises
        param = q.param
        if param in avoid:
            b = fresh_param(avoid | params(q))
            prem = tuple(_rename_in_values(r, param, b) for r in prem)
            param = b
        return replace(q, param=param, premises=tuple(go(r) for r in prem))
    return go(p)


def _rename_in_values(p, a, b):
    # a parameter is either a term constant or a world variable; renaming both is harmless
    q = subst_param(p, a, WVar(b))
    q = subst_param(q, a, Fn(b))
    return map_judgements(q, lambda j: j, fparam=lambda x: b if x == a else x)


def conclusion_names(p: Proof) -> set:
    s = p.conclusion
    return _names(s.gamma, s.delta, [s.goal])


# ---------------------------------------------------------------------------
# Weakening and contraction


def weaken(p: Proof, extra: Iterable[Judgement]) -> Proof:
    extra = tuple(extra)
    if not extra:
        return p
    p = freshen(p, _names(extra))
    return _add_gamma(p, extra)


def _add_gamma(p: Proof, extra) -> Proof:
    s = p.conclusion
    have = {jkey(g, s.domain) for g in s.gamma}
    add = []
    for j in extra:
        k = jkey(j, s.domain)
        if k not in have:
            have.add(k)
            add.append(j)
    if not add:
        return p
    return replace(p, conclusion=replace(s, gamma=s.gamma + tuple(add)),
                   premises=tuple(_add_gamma(q, add) for q in p.premises))


def contract(p: Proof, j: Judgement) -> Proof:
    """Merge duplicate occurrences of ``j`` in every unrestricted context of ``p``."""
    def go(q: Proof) -> Proof:
        s = q.conclusion
        k = jkey(j, s.domain)
        seen, gamma = False, []
        for g in s.gamma:
            if jkey(g, s.domain) == k:
                if seen:
                    continue
                seen = True
            gamma.append(g)
        return replace(q, conclusion=replace(s, gamma=tuple(gamma)),
                       premises=tuple(go(r) for r in q.premises))
    return go(p)


def duplicate(p: Proof, j: Judgement) -> Proof:
    """Inverse of :func:`contract` for testing: add a second copy of ``j`` everywhere."""
    def go(q: Proof) -> Proof:
        s = q.conclusion
        return replace(q, conclusion=replace(s, gamma=s.gamma + (j,)),
                       premises=tuple(go(r) for r in q.premises))
    return go(p)


# ---------------------------------------------------------------------------
# Cut elimination

LEFT_RULES = {"tensL", "oneL", "limpL", "zeroL", "withL", "plusL", "allL", "exL", "bangL",
              "atL", "dnL", "copy"}


def cut_eliminate(p: Proof) -> Proof:
    prem = tuple(cut_eliminate(q) for q in p.premises)
    if p.rule != "cut":
        return replace(p, premises=prem)
    d, e = prem
    out = _cut1(d, e, p.cut) if p.cut_kind == 1 else _cut2(d, e, p.cut)
    return replace_conclusion(out, p.conclusion)


def _union(a, b, domain):
    out = list(a)
    have = {jkey(g, domain) for g in a}
    for g in b:
        if jkey(g, domain) not in have:
            have.add(jkey(g, domain))
            out.append(g)
    return tuple(out)


def _same_key(a, b, domain):
    return jkey(a, domain) == jkey(b, domain)


def _cut1(d: Proof, e: Proof, J: Judgement) -> Proof:
    """Cut-free proof of ``G; D1, D2 ==> C`` from ``d: G; D1 ==> J`` and ``e: G; D2, J ==> C``."""
    dom = d.conclusion.domain
    gamma = _union(d.conclusion.gamma, e.conclusion.gamma, dom)
    d = weaken(d, gamma)
    e = weaken(e, gamma)
    rest = mremove(e.conclusion.delta, [J], dom)
    target = Sequent(gamma, d.conclusion.delta + tuple(rest), e.conclusion.goal, dom)

    if d.rule == "init":
        return replace_conclusion(e, target)
    if e.rule == "init":
        return replace_conclusion(d, target)
    if d.rule in LEFT_RULES:
        return _commute_left(d, e, J, target)
    if e.principal is not None and e.rule != "copy" and _same_key(e.principal, J, dom):
        return _principal(d, e, J, target)
    return _commute_right(d, e, J, target)


def replace_conclusion(p: Proof, s: Sequent) -> Proof:
    """Swap in an equivalent conclusion (same keys) at the root."""
    assert p.conclusion.same(s), f"{p.conclusion} vs {s}"
    return replace(p, conclusion=s)


def _commute_left(d: Proof, e: Proof, J, target: Sequent) -> Proof:
    dom = target.domain
    if d.param is not None:
        avoid = conclusion_names(e)
        if d.param in avoid:
            d = freshen(d, avoid)
    new_prem = []
    for q in d.premises:
        if q is not _minor(d):
            new_prem.append(_cut1(q, e, J))
        else:
            new_prem.append(weaken(q, target.gamma))
    return replace(d, conclusion=target, premises=tuple(new_prem))


def _minor(d: Proof):
    """The premise of a left rule that proves a subformula rather than the goal."""
    return d.premises[0] if d.rule == "limpL" else None


def _commute_right(d: Proof, e: Proof, J, target: Sequent) -> Proof:
    dom = target.domain
    if e.param is not None:
        avoid = conclusion_names(d)
        if e.param in avoid:
            e = freshen(e, avoid)
    d_delta = d.conclusion.delta
    r = e.rule
    if r in ("topR", "zeroL"):
        return replace(e, conclusion=target, premises=())
    if r in ("tensR", "limpL"):
        if mremove(e.split, [J], dom) is not None:
            first = _cut1(d, e.premises[0], J)
            split = tuple(mremove(e.split, [J], dom)) + d_delta
            return replace(e, conclusion=target, split=split,
                           premises=(first, weaken(e.premises[1], target.gamma)))
        second = _cut1(d, e.premises[1], J)
        return replace(e, conclusion=target,
                       premises=(weaken(e.premises[0], target.gamma), second))
    new_prem = tuple(_cut1(d, q, J) for q in e.premises)
    return replace(e, conclusion=target, premises=new_prem)


def _principal(d: Proof, e: Proof, J, target: Sequent) -> Proof:
    """``d`` ends in the right rule for ``J``; ``e`` ends in its left rule on ``J``."""
    dom = target.domain
    A = J.prop
    r = e.rule
    if d.rule != _RIGHT_FOR.get(r):
        return _commute_right(d, e, J, target)
    G = target.gamma
    d1 = d.conclusion.delta
    if r == "tensL":
        (dp1, dp2), (ep,) = d.premises, e.premises
        a, b = Judgement(A.left, J.world), Judgement(A.right, J.world)
        inner = _cut1(dp2, ep, b)  # G; D2 + a + [d's right part] ==> C
        return _cut1(dp1, inner, a)
    if r == "oneL":
        return replace_conclusion(weaken(e.premises[0], G), target)
    if r == "limpL":
        (dp,), (e1, e2) = d.premises, e.premises
        a, b = Judgement(A.left, J.world), Judgement(A.right, J.world)
        step = _cut1(e1, dp, a)  # split ++ d1 ==> b
        return _cut1(step, e2, b)
    if r == "withL":
        dp = d.premises[e.choice - 1]
        return _cut1(dp, e.premises[0], _opened(e))
    if r == "plusL":
        return _cut1(d.premises[0], e.premises[d.choice - 1], _opened(d, goal=True))
    if r == "allL":
        dp = subst_param(d.premises[0], d.param, e.inst)
        return _cut1(dp, e.premises[0], _opened(e))
    if r == "exL":
        ep = subst_param(e.premises[0], e.param, d.inst)
        return _cut1(d.premises[0], ep, _opened(d, goal=True))
    if r == "bangL":
        b = Judgement(A.body, J.world)
        res = _cut2(d.premises[0], e.premises[0], b)
        return replace_conclusion(res, target)
    if r in ("atL", "dnL"):
        return _cut1(d.premises[0], e.premises[0], _opened(e))
    raise AssertionError(r)


_RIGHT_FOR = {"tensL": "tensR", "oneL": "oneR", "limpL": "limpR", "withL": "withR",
              "plusL": "plusR", "allL": "allR", "exL": "exR", "bangL": "bangR",
              "atL": "atR", "dnL": "dnR"}


def _opened(p: Proof, goal=False) -> Judgement:
    """The judgement the single-subformula rule at ``p`` introduces into its premise."""
    q = p.premises[0].conclusion
    if goal:
        return q.goal
    s = p.conclusion
    added = mremove(q.delta, mremove(s.delta, [p.principal], s.domain), s.domain)
    return added[0]


def _cut2(d: Proof, e: Proof, J: Judgement) -> Proof:
    """From ``d: G; . ==> J`` and ``e: G, J; D ==> C`` build a proof of ``G; D ==> C``."""
    dom = d.conclusion.domain
    k = jkey(J, dom)

    def strip(s: Sequent) -> Sequent:
        return replace(s, gamma=tuple(g for g in s.gamma if jkey(g, dom) != k))

    def go(q: Proof) -> Proof:
        if q.rule == "bangL" and _same_key(q.principal, Judgement(Bang(J.prop), J.world), dom):
            # the subtree re-introduces J on its own
            return replace(q, conclusion=strip(q.conclusion))
        if q.rule == "copy" and jkey(q.principal, dom) == k:
            inner = go(q.premises[0])
            dd = weaken(d, inner.conclusion.gamma)
            dd = freshen(dd, conclusion_names(inner))
            return replace_conclusion(_cut1(dd, inner, q.principal), strip(q.conclusion))
        return replace(q, conclusion=strip(q.conclusion), premises=tuple(go(r) for r in q.premises))

    if any(jkey(g, dom) == k for g in d.conclusion.gamma):
        return e
    d = freshen(d, params(e))
    return go(e)
