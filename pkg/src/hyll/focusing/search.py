"""Fuel-bounded focused proof search.

Iterative deepening on the number of focusing decisions along a branch.  Active
phases are deterministic: the goal is decomposed first, then the active context
leftmost first.  Focused phases branch on the focus choice, additive choices,
witnesses, and on how the linear context is shared, which is threaded lazily:
right-focus phases return the part of the context they did not use.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

from ..kernel.proof import Sequent, mremove, param_value
from ..syntax import (At, Atom, Bang, Down, ExistsT, ExistsW, Fn, ForallT, ForallW, Here,
                      Judgement, Limp, One, Plus, Tensor, Top, Up, With, Zero, ground_subterms,
                      instantiate, is_positive, jkey, judgement_symbols, polarize, world_exprs)
from ..worlds import (Domain, NormWorld, WBound, WComp, WId, WLit, WorldExpr, WRateOf, WVar,
                      denormalize, fmt_rational, norm_residual, normalize, rid)
from .calculus import (FocProof, FSeq, active, erase, is_bare_down_neg, is_bare_up_pos, left,
                       neutral, right)

DEFAULT_FUEL = 8
HOLE = "hole"


def default_fuel() -> int:
    try:
        return int(os.environ.get("HYLL_FUEL_DEFAULT", DEFAULT_FUEL))
    except ValueError:
        return DEFAULT_FUEL


@dataclass(frozen=True)
class SearchBudget:
    max_decisions: int = DEFAULT_FUEL
    max_depth: int = 400
    world_witness_hints: Tuple[WorldExpr, ...] = ()
    max_copies: Optional[int] = None
    max_blur: int = 12

    def __post_init__(self):
        if self.max_decisions < 0 or self.max_depth <= 0:
            raise ValueError("budgets must be positive")


class Guide:
    """Hooks that reorder or restrict the choices the engine makes.

    Each hook receives the sequent at hand and the default candidates, and
    returns the candidates to try, in order.
    """

    def decisions(self, seq: FSeq, options: list) -> list:
        return options

    def terms(self, seq: FSeq, binder, options: list) -> list:
        return options

    def worlds(self, seq: FSeq, binder, options: list) -> list:
        return options

    def choices(self, seq: FSeq, options: list) -> list:
        return options

    def blur(self, seq: FSeq, options):
        """Order the (used, rest) splits tried when a right focus blurs."""
        return options

    def stop(self, seq: FSeq) -> bool:
        """Leave this neutral sequent open (a ``hole`` leaf) instead of searching."""
        return False


class _Exhausted(Exception):
    pass


DUMMY_TERM = Fn("c")


class Engine:
    def __init__(self, domain: Domain, budget: SearchBudget, guide: Optional[Guide] = None,
                 omega_lifo: bool = False):
        self.domain = domain
        # decompose the active zone from its end instead of its front; any
        # order reaches the same neutral frontier
        self.omega_lifo = omega_lifo
        self.budget = budget
        self.guide = guide or Guide()
        self.failed = {}
        self.nodes = 0

    # -- helpers ------------------------------------------------------------
    def k(self, j):
        return jkey(j, self.domain)

    def fresh(self, seq: FSeq, binder) -> str:
        t, w = seq.names()
        world = not isinstance(binder, (ForallT, ExistsT))
        for n in itertools.count():
            name = f"#w{n}" if world else f"#{n}"
            if name not in t and name not in w:
                return name

    def term_candidates(self, seq: FSeq, binder) -> list:
        out = set()
        for j in seq.judgements():
            ground_subterms(j.prop, out)
        for q in self._rate_literals(seq):
            out.add(Fn(fmt_rational(q)))
        opts = sorted(out, key=lambda t: (len(str(t)), str(t))) or [DUMMY_TERM]
        return self.guide.terms(seq, binder, opts)

    def _rate_literals(self, seq):
        qs = set()
        if self.domain is not Domain.RATES:
            return qs
        for j in seq.judgements():
            for e in [j.world] + [w for w, _, _ in world_exprs(j.prop, [])]:
                for f in _factors(e):
                    if isinstance(f, WLit):
                        qs.update(f.world.value)
        return qs

    def world_candidates(self, seq: FSeq, binder) -> list:
        norms = {}

        def add(nw: NormWorld):
            norms.setdefault(nw, denormalize(nw))

        targets = []
        for j in seq.judgements():
            targets.append(j.world)
            for e, td, wd in world_exprs(j.prop, []):
                if _closed(e):
                    targets.append(e)
        targets += list(self.budget.world_witness_hints)
        tnorms = []
        for e in targets:
            try:
                tnorms.append(normalize(e, self.domain))
            except Exception:
                continue
        add(normalize(WId(), self.domain))
        for n in tnorms:
            add(n)
        # residuals u with prefix . u == target for patterns "prefix . bound"
        for e, td, wd in world_exprs(binder.body, [], 0, 0):
            fs = _factors(e)
            if fs and isinstance(fs[-1], WBound) and fs[-1].index == wd and \
                    all(_closed(f) for f in fs[:-1]):
                try:
                    pre = normalize(_compose(fs[:-1]), self.domain)
                except Exception:
                    continue
                for t in tnorms:
                    res = norm_residual(pre, t)
                    if res is not None:
                        add(res)
        opts = list(norms.values())
        return self.guide.worlds(seq, binder, opts)

    def witnesses(self, seq, binder):
        if isinstance(binder, (ForallT, ExistsT)):
            return self.term_candidates(seq, binder)
        return self.world_candidates(seq, binder)

    def tick(self, depth):
        self.nodes += 1
        if depth > self.budget.max_depth:
            raise _Exhausted()

    # -- neutral sequents ---------------------------------------------------
    def neutral(self, G, D, Q, dec, depth, copies) -> Optional[FocProof]:
        self.tick(depth)
        seq = neutral(G, D, Q, self.domain)
        if self.guide.stop(seq):
            return FocProof(HOLE, seq)
        if dec <= 0:
            return None
        key = seq.key()
        if self.failed.get(key, -1) >= dec:
            return None
        options = []
        if not is_bare_down_neg(Q.prop):
            options.append(("rf", None))
        seen = set()
        for j in D:
            k = self.k(j)
            if k in seen or is_bare_up_pos(j.prop):
                continue
            seen.add(k)
            options.append(("lf", j))
        for j in G:
            if self.budget.max_copies is not None and copies.get(self.k(j), 0) >= \
                    self.budget.max_copies:
                continue
            options.append(("cplf", j))
        options = self.guide.decisions(seq, options)
        for rule, j in options:
            if rule == "rf":
                for p, rest in self.right(G, D, Q, dec - 1, depth + 1, copies):
                    if not rest:
                        return FocProof("rf", seq, (p,))
            elif rule == "lf":
                rest = mremove(D, [j], self.domain)
                for p in self.left(G, rest, j, Q, dec - 1, depth + 1, copies):
                    return FocProof("lf", seq, (p,), principal=j)
            else:
                c2 = dict(copies)
                c2[self.k(j)] = c2.get(self.k(j), 0) + 1
                for p in self.left(G, D, j, Q, dec - 1, depth + 1, c2):
                    return FocProof("cplf", seq, (p,), principal=j)
        self.failed[key] = max(dec, self.failed.get(key, -1))
        return None

    # -- active phase -------------------------------------------------------
    def active(self, G, D, O, C, dec, depth, copies) -> Optional[FocProof]:
        self.tick(depth)
        dom = self.domain
        seq = active(G, D, O, C, dom)
        A, w = C.prop, C.world
        O = list(O)

        def go(rule, prems, **kw):
            subs = []
            for s in prems:
                q = self.active(s.gamma, s.delta, s.omega, s.goal, dec, depth + 1, copies)
                if q is None:
                    return None
                subs.append(q)
            return FocProof(rule, seq, tuple(subs), **kw)

        def a(omega=O, goal=C, gamma=G, delta=D):
            return active(gamma, delta, omega, goal, dom)

        if not is_positive(A):
            if isinstance(A, With):
                return go("withR", [a(goal=Judgement(A.left, w)), a(goal=Judgement(A.right, w))])
            if isinstance(A, Top):
                return FocProof("topR", seq)
            if isinstance(A, Limp):
                return go("limpR", [a(omega=O + [Judgement(A.left, w)], goal=Judgement(A.right, w))])
            if isinstance(A, Here):
                return go("dnRA", [a(goal=Judgement(instantiate(A, w), w))])
            if isinstance(A, At):
                return go("atRA", [a(goal=Judgement(A.body, A.world))])
            if isinstance(A, (ForallT, ForallW)):
                name = self.fresh(seq, A)
                return go("allR", [a(goal=Judgement(instantiate(A, param_value(A, name)), w))],
                          param=name)
            if isinstance(A, Up):
                return go("upR", [a(goal=Judgement(A.body, w))])
            if isinstance(A, Atom):
                return go("rp", [a(goal=Judgement(Down(A), w))])
            raise TypeError(f"unexpected goal {A!r}")
        if O:
            if self.omega_lifo:
                j, rest = O[-1], O[:-1]
            else:
                j, rest = O[0], O[1:]
            P, u = j.prop, j.world
            if isinstance(P, Tensor):
                return go("tensL", [a(omega=[Judgement(P.left, u), Judgement(P.right, u)] + rest)],
                          principal=j)
            if isinstance(P, One):
                return go("oneL", [a(omega=rest)], principal=j)
            if isinstance(P, Plus):
                return go("plusL", [a(omega=[Judgement(P.left, u)] + rest),
                                    a(omega=[Judgement(P.right, u)] + rest)], principal=j)
            if isinstance(P, Zero):
                return FocProof("zeroL", seq, principal=j)
            if isinstance(P, Here):
                return go("dnLA", [a(omega=[Judgement(instantiate(P, u), u)] + rest)], principal=j)
            if isinstance(P, At):
                return go("atLA", [a(omega=[Judgement(P.body, P.world)] + rest)], principal=j)
            if isinstance(P, (ExistsT, ExistsW)):
                name = self.fresh(seq, P)
                opened = Judgement(instantiate(P, param_value(P, name)), u)
                return go("exL", [a(omega=[opened] + rest)], principal=j, param=name)
            if isinstance(P, Bang):
                return go("bangL", [a(omega=rest, gamma=tuple(G) + (Judgement(P.body, u),))],
                          principal=j)
            if isinstance(P, Down):
                return go("downL", [a(omega=rest, delta=tuple(D) + (Judgement(P.body, u),))],
                          principal=j)
            if isinstance(P, Atom):
                return go("lp", [a(omega=rest, delta=tuple(D) + (Judgement(Up(P), u),))],
                          principal=j)
            raise TypeError(f"unexpected active judgement {P!r}")
        q = self.neutral(tuple(G), tuple(D), C, dec, depth, copies)
        return q

    # -- left focus: consumes all of D --------------------------------------
    def left(self, G, D, F, Q, dec, depth, copies) -> Iterator[FocProof]:
        self.tick(depth)
        dom = self.domain
        seq = left(G, D, F, Q, dom)
        A, u = F.prop, F.world
        if isinstance(A, Atom):
            if not A.pos and not D and isinstance(Q.prop, Down) and \
                    self.k(Judgement(Q.prop.body, Q.world)) == self.k(F):
                yield FocProof("li", seq)
            return
        if isinstance(A, Up):
            p = self.active(G, D, [Judgement(A.body, u)], Q, dec, depth + 1, copies)
            if p is not None:
                yield FocProof("upL", seq, (p,))
            return
        if isinstance(A, With):
            for i in self.guide.choices(seq, [1, 2]):
                part = A.left if i == 1 else A.right
                for p in self.left(G, D, Judgement(part, u), Q, dec, depth + 1, copies):
                    yield FocProof("withL", seq, (p,), choice=i)
            return
        if isinstance(A, Limp):
            for pa, rest in self.right(G, D, Judgement(A.left, u), dec, depth + 1, copies):
                used = mremove(D, rest, dom)
                for pb in self.left(G, rest, Judgement(A.right, u), Q, dec, depth + 1, copies):
                    yield FocProof("limpL", seq, (pa, pb), split=tuple(used))
            return
        if isinstance(A, (ForallT, ForallW)):
            for tau in self.witnesses(seq, A):
                sub = Judgement(instantiate(A, tau), u)
                for p in self.left(G, D, sub, Q, dec, depth + 1, copies):
                    yield FocProof("allL", seq, (p,), inst=tau)
            return
        if isinstance(A, Here):
            for p in self.left(G, D, Judgement(instantiate(A, u), u), Q, dec, depth + 1, copies):
                yield FocProof("dnLF", seq, (p,))
            return
        if isinstance(A, At):
            for p in self.left(G, D, Judgement(A.body, A.world), Q, dec, depth + 1, copies):
                yield FocProof("atLF", seq, (p,))
            return
        # Top has no left rule

    # -- right focus: yields (proof, unused part of D) ----------------------
    def right(self, G, D, F, dec, depth, copies) -> Iterator[Tuple[FocProof, list]]:
        self.tick(depth)
        dom = self.domain
        A, w = F.prop, F.world
        D = list(D)

        def mk(rule, used, prems=(), **kw):
            return FocProof(rule, right(G, used, F, dom), tuple(prems), **kw)

        if isinstance(A, Atom):
            want = self.k(Judgement(Up(A), w))
            for i, j in enumerate(D):
                if self.k(j) == want:
                    yield mk("ri", [j]), D[:i] + D[i + 1:]
                    return
            return
        if isinstance(A, One):
            yield mk("oneR", []), D
            return
        if isinstance(A, Tensor):
            for p1, r1 in self.right(G, D, Judgement(A.left, w), dec, depth + 1, copies):
                for p2, r2 in self.right(G, r1, Judgement(A.right, w), dec, depth + 1, copies):
                    used1 = mremove(D, r1, dom)
                    used = mremove(D, r2, dom)
                    yield mk("tensR", used, (p1, p2), split=tuple(used1)), r2
            return
        if isinstance(A, Plus):
            for i in self.guide.choices(right(G, D, F, dom), [1, 2]):
                part = A.left if i == 1 else A.right
                for p, r in self.right(G, D, Judgement(part, w), dec, depth + 1, copies):
                    yield mk("plusR", mremove(D, r, dom), (p,), choice=i), r
            return
        if isinstance(A, Zero):
            return
        if isinstance(A, Bang):
            p = self.active(G, (), (), Judgement(A.body, w), dec, depth + 1, copies)
            if p is not None:
                yield mk("bangR", [], (p,)), D
            return
        if isinstance(A, (ExistsT, ExistsW)):
            for tau in self.witnesses(right(G, D, F, dom), A):
                sub = Judgement(instantiate(A, tau), w)
                for p, r in self.right(G, D, sub, dec, depth + 1, copies):
                    yield mk("exR", mremove(D, r, dom), (p,), inst=tau), r
            return
        if isinstance(A, Here):
            for p, r in self.right(G, D, Judgement(instantiate(A, w), w), dec, depth + 1, copies):
                yield mk("dnRF", mremove(D, r, dom), (p,)), r
            return
        if isinstance(A, At):
            for p, r in self.right(G, D, Judgement(A.body, A.world), dec, depth + 1, copies):
                yield mk("atRF", mremove(D, r, dom), (p,)), r
            return
        if isinstance(A, Down):
            N = Judgement(A.body, w)
            for used, rest in self.guide.blur(right(G, D, F, dom), self._subsets(D)):
                p = self.active(G, used, (), N, dec, depth + 1, copies)
                if p is not None:
                    yield mk("downR", used, (p,)), rest
            return
        raise TypeError(f"unexpected right focus {A!r}")

    def _subsets(self, D):
        """Sub-multisets of ``D`` (by judgement key), smallest first."""
        n = len(D)
        keys = [self.k(j) for j in D]
        limit = min(n, self.budget.max_blur)
        for size in range(0, limit + 1):
            seen = set()
            for idx in itertools.combinations(range(n), size):
                sig = tuple(sorted(map(repr, (keys[i] for i in idx))))
                if sig in seen:
                    continue
                seen.add(sig)
                chosen = set(idx)
                yield [D[i] for i in idx], [D[i] for i in range(n) if i not in chosen]


def _factors(e):
    if isinstance(e, WComp):
        return _factors(e.left) + _factors(e.right)
    if isinstance(e, WId):
        return []
    return [e]


def _closed(e) -> bool:
    return all(not isinstance(f, WBound) for f in _factors(e)) and \
        not any(isinstance(f, WRateOf) and not isinstance(f.term, Fn) for f in _factors(e))


def _compose(fs):
    out = WId()
    for f in fs:
        out = f if isinstance(out, WId) else WComp(out, f)
    return out


# ---------------------------------------------------------------------------
# Entry points


@dataclass
class SearchResult:
    proof: Optional[FocProof]
    decisions: int
    nodes: int
    exhausted: bool = False


def search(goal: FSeq, budget: SearchBudget = SearchBudget(), guide: Optional[Guide] = None,
           ) -> Optional[FocProof]:
    return search_ex(goal, budget, guide).proof


def search_ex(goal: FSeq, budget: SearchBudget = SearchBudget(),
              guide: Optional[Guide] = None) -> SearchResult:
    """Search for a focused proof of an active or neutral sequent."""
    eng = Engine(goal.domain, budget, guide)
    exhausted = False
    for d in range(1, budget.max_decisions + 1):
        try:
            p = eng.active(goal.gamma, goal.delta, goal.omega, goal.goal, d, 0, {})
        except _Exhausted:
            exhausted = True
            p = None
        if p is not None:
            return SearchResult(p, d, eng.nodes)
    if budget.max_decisions == 0:
        try:
            p = eng.active(goal.gamma, goal.delta, goal.omega, goal.goal, 0, 0, {})
        except _Exhausted:
            p = None
        if p is not None:
            return SearchResult(p, 0, eng.nodes)
    return SearchResult(None, budget.max_decisions, eng.nodes, exhausted)


def polarized_goal(s: Sequent) -> FSeq:
    """Unrestricted and goal judgements made negative, linear ones positive.

    The linear hypotheses start in the active zone, as in the completeness
    statement; the unrestricted ones go straight to the unrestricted zone,
    which is where ``!L`` would put them.
    """
    neg = [Judgement(polarize(j.prop, "negative"), j.world) for j in s.gamma]
    pos = [Judgement(polarize(j.prop, "positive"), j.world) for j in s.delta]
    goal = Judgement(polarize(s.goal.prop, "negative"), s.goal.world)
    return active(neg, (), pos, goal, s.domain)


def prove_unfocused(s: Sequent, budget: SearchBudget = SearchBudget(),
                    guide: Optional[Guide] = None):
    """Search via focusing and erase; the returned kernel proof concludes ``s``."""
    fp = search(polarized_goal(s), budget, guide)
    if fp is None:
        return None
    from dataclasses import replace
    p = erase(fp)
    return replace(p, conclusion=s)
