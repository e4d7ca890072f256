"""Traces to focused derivations over canonical sequents and back.

A derivation over a canonical sequent is a chain of *blocks*, each a short
run of focusing decisions between neutral sequents whose goal is the
canonical goal (the *spine*):

* an event block focuses on ``inter``, picks the internal or synchronous
  branch, unlocks the participating sums with ``dt`` tokens and ends with the
  cleanup focus that advances the lock world by the event's rate;
* an unfold block copies a definition from the unrestricted context and
  swaps a top-level call for its body, leaving the lock alone;
* the final ``rf`` block matches what is left against the goal.

Construction drives the focused engine one decision at a time: a guide forces
the decision and its witnesses and stops at the next spine sequent, leaving a
hole that the next block fills.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from ..focusing.calculus import DECISIONS, FocProof, FSeq, check_focused
from ..focusing.search import HOLE, Engine, Guide, SearchBudget
from ..syntax import (At, Atom, Down, ExistsT, Fn, ForallT, ForallW, Judgement, Limp, One, Tensor,
                      TVar, Up, With, instantiate, jkey)
from ..worlds import (Domain, NormWorld, WComp, WLit, WorldExpr, denormalize, fmt_rational, lit,
                      norm_residual, normalize, rate_literal, wcompose)
from .encode import (ACT, DT, INTER, INT_CLEANUP, RATES, RID, SYN_CLEANUP, canonical_sequent,
                     definition_prop, encode_proc, encode_sum, guarded, numeral)
from .step import Config, Event, Transition
from .syntax import (Bound, Call, Choice, Env, In, Name, Nil, Nu, Out, Par, Process, SpiError, Sum,
                     Tau, close_binder, par)
from .trace import Replay, Trace, TraceError, replay, state_of


class AdequacyError(SpiError):
    pass


def _k(j):
    return jkey(j, RATES)


# ---------------------------------------------------------------------------
# One scripted block


@dataclass
class Move:
    """A single spine decision with the witnesses and choices it must use."""
    label: str
    rule: str  # "lf", "cplf" or "rf"
    principal: Optional[Judgement]
    terms: Dict[object, object] = field(default_factory=dict)
    worlds: Dict[object, object] = field(default_factory=dict)
    choices: Dict[object, int] = field(default_factory=dict)
    exact_blur: bool = False  # blur onto the identical linear hypothesis when there is one
    rates_only: bool = False  # inside the block, copy only rate hypotheses


class _Script(Guide):
    def __init__(self, start: FSeq, goal_key, move: Move, stop_at_spine: bool = True):
        self.start_key = start.key()
        self.goal_key = goal_key
        self.move = move
        self.stop_at_spine = stop_at_spine

    def stop(self, seq):
        return (self.stop_at_spine and _k(seq.goal) == self.goal_key
                and seq.key() != self.start_key)

    def decisions(self, seq, options):
        if seq.key() != self.start_key:
            if self.move.rates_only:
                return [(r, j) for r, j in options if r != "cplf" or _is_rate(j.prop)]
            return options
        m = self.move
        for rule, j in options:
            if rule == m.rule and (m.principal is None or _k(j) == _k(m.principal)):
                return [(rule, j)]
        raise AdequacyError(f"{m.label}: no {m.rule} decision available in {seq}")

    def terms(self, seq, binder, options):
        w = self.move.terms.get(binder)
        return options if w is None else [w]

    def worlds(self, seq, binder, options):
        w = self.move.worlds.get(binder)
        return options if w is None else [w]

    def blur(self, seq, options):
        if not self.move.exact_blur:
            return options
        want = _k(Judgement(seq.focus.prop.body, seq.focus.world))
        for i, j in enumerate(seq.delta):
            if _k(j) == want:
                return iter([([j], list(seq.delta[:i] + seq.delta[i + 1:]))])
        return options

    def choices(self, seq, options):
        if seq.focus is None:
            return options
        c = self.move.choices.get(seq.focus.prop)
        return options if c is None else [c]


def _is_rate(A) -> bool:
    while isinstance(A, At):
        A = A.body
    return isinstance(A, Atom) and A.pred == "rt"


def _holes(p: FocProof):
    return [q for q in p.nodes() if q.rule == HOLE]


def _plug(p: FocProof, sub: FocProof) -> FocProof:
    if p.rule == HOLE:
        return sub
    return replace(p, premises=tuple(_plug(q, sub) for q in p.premises))


def _run(seq: FSeq, goal_key, move: Move, budget: SearchBudget, final=False) -> FocProof:
    guide = _Script(seq, goal_key, move, stop_at_spine=not final)
    eng = Engine(RATES, budget, guide)
    top = budget.max_decisions if final else 4
    for d in range(1, top + 1):
        p = eng.neutral(seq.gamma, seq.delta, seq.goal, d, 0, {})
        if p is not None:
            return p
    raise AdequacyError(f"{move.label}: block not derivable within {top} decisions")


# ---------------------------------------------------------------------------
# Moves for the stepper's transitions


def _chain(binder, witnesses, table):
    """Record forced witnesses for a run of nested quantifiers."""
    for w in witnesses:
        table[binder] = w
        binder = instantiate(binder, w)
        while isinstance(binder, At):
            binder = binder.body
    return binder


def _sum_move(label, M: Sum, path, message=None) -> Move:
    mv = Move(label, "lf", Judgement(guarded(M), RID))
    node = encode_sum(M)
    for c in path:
        mv.choices[node] = c
        node = node.left if c == 1 else node.right
    if message is not None:
        mv.terms[node] = Fn(message)
    return mv


def _lock(s: WorldExpr, rates) -> WorldExpr:
    if not rates:
        return s
    tail = lit(RATES, tuple(rates))
    return tail if _is_rid(s) else WComp(s, tail)


def _is_rid(s):
    return isinstance(s, WLit) and s.world.value == ()


def _inter_move(label, world, branch, linear=False) -> Move:
    mv = Move(label, "lf" if linear else "cplf", Judgement(INTER, RID))
    mv.worlds[INTER] = world
    body = instantiate(INTER, world).body  # act -o (up int & up syn)
    mv.choices[body.right] = branch
    return mv


def unfold_move(env: Env, c: Call) -> Move:
    d = env[c.name]
    prop = definition_prop(d)
    mv = Move(f"unfold {c.name}", "cplf", Judgement(prop, RID))
    mv.worlds[prop] = RID
    inner = instantiate(prop, RID).body
    last = _chain(inner, [Fn(a.name) for a in c.args], mv.terms)
    mv.choices[last] = 1
    return mv


def transition_moves(t: Transition, lock: WorldExpr, linear=False) -> List[Move]:
    comps = t.source.comps
    i, pi = t.first
    ev = t.event
    if ev.kind == "internal":
        cm = Move("cleanup", "lf", Judgement(INT_CLEANUP, lock))
        _chain(INT_CLEANUP, [numeral(ev.rate)], cm.terms)
        return [_inter_move("focus inter", lock, 1, linear),
                _sum_move("unlock tau", comps[i], pi), cm]
    j, pj = t.second
    cm = Move("cleanup", "lf", Judgement(SYN_CLEANUP, lock))
    _chain(SYN_CLEANUP, [Fn(ev.channel), numeral(ev.rate), Fn(ev.message)], cm.terms)
    return [_inter_move("focus inter", lock, 2, linear),
            _sum_move("unlock output", comps[i], pi),
            _sum_move("unlock input", comps[j], pj, ev.message), cm]


def close_move(rp: Replay) -> Move:
    """Final right focus; the restricted channels of the goal are
    instantiated with the names the trace opened for them."""
    mv = Move("close", "rf", None, exact_blur=True, rates_only=True)
    keep = set(rp.start.table)
    used = set().union(*[_names(c) for c in rp.final.comps]) if rp.final.comps else set()
    node = encode_proc(final_goal(rp))
    for x, _ in rp.final.rates:
        if x in keep or x not in used:
            continue
        mv.terms[node] = Fn(x)
        node = instantiate(node, Fn(x)).right
    return mv


def _names(c):
    from .syntax import free_names
    return free_names(c)


# ---------------------------------------------------------------------------
# Trace -> derivation


@dataclass
class Certified:
    proof: FocProof
    sequent: FSeq
    replay: Replay
    goal: Process
    lock: WorldExpr


def final_goal(rp: Replay) -> Process:
    """The last configuration, restricting channels opened after the start."""
    return rp.final.process(keep=set(rp.start.table))


def trace_to_derivation(env: Env, trace: Trace, s: WorldExpr = RID,
                        budget: Optional[SearchBudget] = None,
                        inter_copies: Optional[int] = None) -> Certified:
    """With ``inter_copies`` the interaction theory is linear and must be
    used up, so the count has to equal the number of events."""
    if inter_copies is not None and inter_copies != len(trace.events):
        raise AdequacyError(f"{inter_copies} linear copies of inter cannot all be used "
                            f"by a trace of {len(trace.events)} events")
    linear = inter_copies is not None
    rp = replay(env, trace)
    Q = final_goal(rp)
    rates_so_far = [e.rate for e in trace.events]
    t = _lock(s, rates_so_far)
    seq, table = canonical_sequent(env, trace.rates, trace.initial, Q, s, t, inter_copies)
    if table != rp.start.table:
        raise AdequacyError("canonical context and stepper disagree on opened channels")
    goal_key = _k(seq.goal)
    budget = budget or SearchBudget(max_decisions=12 + 4 * _depth(Q))

    moves: List[Move] = [unfold_move(env, c) for c in rp.unfolds]
    for k, tr in enumerate(rp.steps):
        moves += transition_moves(tr, _lock(s, rates_so_far[:k]), linear)
        moves += [unfold_move(env, c) for c in tr.unfolds]

    pieces, cur = [], seq
    for mv in moves:
        p = _run(cur, goal_key, mv, budget)
        hs = _holes(p)
        if len(hs) != 1:
            raise AdequacyError(f"{mv.label}: expected one open spine sequent, found {len(hs)}")
        pieces.append(p)
        cur = hs[0].conclusion
    pieces.append(_run(cur, goal_key, close_move(rp), budget, final=True))
    proof = pieces[-1]
    for p in reversed(pieces[:-1]):
        proof = _plug(p, proof)
    return Certified(proof, seq, rp, Q, t)


def _depth(P: Process) -> int:
    if isinstance(P, (Par, Choice)):
        return max(_depth(P.left), _depth(P.right))
    if isinstance(P, Nu):
        return _depth(P.body)
    if isinstance(P, (Out, Tau)):
        return 1 + _depth(P.cont)
    if isinstance(P, In):
        return 1 + _depth(P.body)
    return 0


# ---------------------------------------------------------------------------
# Decoding linear hypotheses back into processes

_SPI_ATOMS = {"dt", "out", "in", "tau", "act", "rt"}


def _chan(t):
    if isinstance(t, TVar):
        return Bound(t.index)
    if isinstance(t, Fn) and not t.args:
        return Name(t.sym)
    raise AdequacyError(f"not a channel: {t}")


def _unshift(c):
    if isinstance(c, Bound):
        if c.index == 0:
            raise AdequacyError("input channel captured by its own binder")
        return Bound(c.index - 1)
    return c


def decode_proc(A) -> Process:
    if isinstance(A, One):
        return Nil()
    if isinstance(A, Tensor):
        return Par(decode_proc(A.left), decode_proc(A.right))
    if isinstance(A, ExistsT) and isinstance(A.body, Tensor):
        g = A.body.left
        try:
            at = g.body
            (r,) = at.world.world.value
            assert at.body.pred == "rt" and at.body.args == (TVar(0),)
        except (AttributeError, AssertionError, ValueError, TypeError):
            raise AdequacyError(f"not an encoded restriction: {A}") from None
        return Nu(r, decode_proc(A.body.right), A.hint)
    if isinstance(A, Atom) and A.pos and A.pred not in _SPI_ATOMS:
        return Call(A.pred, tuple(_chan(t) for t in A.args))
    if isinstance(A, Down) and isinstance(A.body, Limp) and A.body.left == DT:
        return decode_sum(A.body.right)
    raise AdequacyError(f"not an encoded process: {A}")


def _prefix_body(A, pred):
    if isinstance(A, Up) and isinstance(A.body, Tensor) and isinstance(A.body.left, Atom) \
            and A.body.left.pred == pred:
        return A.body.left, A.body.right
    return None


def decode_sum(A) -> Sum:
    if isinstance(A, With):
        return Choice(decode_sum(A.left), decode_sum(A.right))
    hit = _prefix_body(A, "out")
    if hit:
        atom, cont = hit
        x, m = atom.args
        return Out(_chan(x), _chan(m), decode_proc(cont))
    hit = _prefix_body(A, "tau")
    if hit:
        atom, cont = hit
        q = rate_literal(atom.args[0])
        if q is None:
            raise AdequacyError(f"tau without a rate: {atom}")
        return Tau(q, decode_proc(cont))
    if isinstance(A, ForallT):
        hit = _prefix_body(A.body, "in")
        if hit and hit[0].args[1] == TVar(0):
            return In(_unshift(_chan(hit[0].args[0])), decode_proc(hit[1]), A.hint)
    raise AdequacyError(f"not an encoded sum: {A}")


def decode_component(j: Judgement) -> Process:
    A = j.prop
    if isinstance(A, Limp) and A.left == DT:
        return decode_sum(A.right)
    if isinstance(A, Up) and isinstance(A.body, Atom):
        return decode_proc(A.body)
    raise AdequacyError(f"not a canonical linear hypothesis: {A}")


# ---------------------------------------------------------------------------
# Derivation -> trace


@dataclass
class Analysis:
    trace: Trace
    phases: List[str]
    locks: List[WorldExpr]       # lock world at the start of each event block, then the last
    complete: bool               # closed by the final right focus


def _is_lock(j):
    return j.prop == Up(ACT)


def _split_delta(seq: FSeq):
    locks = [j for j in seq.delta if _is_lock(j)]
    if len(locks) != 1:
        raise AdequacyError(f"expected exactly one lock in the linear context, found {len(locks)}")
    inter = _k(Judgement(INTER, RID))
    comps = [j for j in seq.delta if not _is_lock(j) and _k(j) != inter]
    return locks[0].world, comps


def _state(seq: FSeq) -> Process:
    _, comps = _split_delta(seq)
    return par(*[decode_component(j) for j in comps])


def _show_world(w):
    from ..worlds import print_world
    return print_world(denormalize(normalize(w, RATES)))


def _spine_key(p: FocProof):
    return _k(p.conclusion.goal)


def _next_spine(node: FocProof, goal_key) -> Optional[FocProof]:
    stack = list(reversed(node.premises))
    while stack:
        q = stack.pop()
        c = q.conclusion
        if (q.rule in DECISIONS or q.rule == HOLE) and c.form == "active" and not c.omega \
                and _k(c.goal) == goal_key:
            return q
        stack.extend(reversed(q.premises))
    return None


def _block_nodes(node: FocProof, goal_key):
    """Nodes of a block, pre-order, stopping at the next spine sequent."""
    out, stack = [], list(reversed(node.premises))
    while stack:
        q = stack.pop()
        c = q.conclusion
        if (q.rule in DECISIONS or q.rule == HOLE) and c.form == "active" and not c.omega \
                and _k(c.goal) == goal_key:
            continue
        out.append(q)
        stack.extend(reversed(q.premises))
    return out


def _unlocked_atom(node: FocProof, goal_key) -> Atom:
    for q in _block_nodes(node, goal_key):
        if q.rule == "upL":
            body = q.conclusion.focus.prop.body
            if isinstance(body, Tensor) and isinstance(body.left, Atom):
                return body.left
    raise AdequacyError("sum focus does not release an action")


def _insts(node: FocProof, goal_key):
    return [q.inst for q in _block_nodes(node, goal_key) if q.rule == "allL"]


def _rt(seq: FSeq) -> Dict[str, Fraction]:
    out = {}
    for j in seq.gamma:
        A, w = j.prop, j.world
        if isinstance(A, At):
            A, w = A.body, A.world
        if isinstance(A, Atom) and A.pred == "rt" and not A.pos and isinstance(w, WLit) \
                and len(w.world.value) == 1 and isinstance(A.args[0], Fn):
            out[A.args[0].sym] = w.world.value[0]
    return out


def analyse(p: FocProof) -> Analysis:
    """Read the blocks of a (possibly partial) derivation over a canonical
    sequent.  Partial derivations may end in ``hole`` leaves."""
    root = p.conclusion
    goal = root.goal.prop
    if not (root.form == "active" and not root.omega and isinstance(goal, Tensor)
            and goal.right == ACT and isinstance(goal.left, At)):
        raise AdequacyError("conclusion is not a canonical sequent")
    goal_key = _k(root.goal)
    inter_key = _k(Judgement(INTER, RID))
    lock, _ = _split_delta(root)
    initial = _state(root)
    rates = _rt(root)
    events, states, phases, locks = [], [], [], [lock]
    node, complete = p, False

    def finish_state(seq):
        if events and len(states) < len(events):
            states.append(_state(seq))

    while True:
        if node.rule == HOLE:
            finish_state(node.conclusion)
            break
        if node.rule == "rf":
            finish_state(node.conclusion)
            phases.append("close")
            complete = True
            break
        linear_inter = node.rule == "lf" and _k(node.principal) == inter_key
        if node.rule != "cplf" and not linear_inter:
            raise AdequacyError(f"spine decision {node.rule} outside an interaction block")
        if _k(node.principal) != inter_key:
            A = node.principal.prop
            inner = A.body.body if isinstance(A, ForallW) and isinstance(A.body, At) else None
            while isinstance(inner, ForallT):
                inner = inner.body
            if not (isinstance(inner, With) and isinstance(inner.left, Limp)
                    and isinstance(inner.left.left, Atom)):
                raise AdequacyError("copied hypothesis is neither inter nor a definition")
            args = [str(t) for t in _insts(node, goal_key) if not isinstance(t, WorldExpr)]
            phases.append(f"unfold {inner.left.left.pred}({', '.join(args)})")
            nxt = _next_spine(node, goal_key)
            if nxt is None:
                raise AdequacyError("unfold block does not return to the spine")
            node = nxt
            continue
        # an interaction block
        finish_state(node.conclusion)
        withs = [q for q in _block_nodes(node, goal_key) if q.rule == "withL"]
        if not withs:
            raise AdequacyError("inter focus selects no branch")
        branch = "int" if withs[0].choice == 1 else "syn"
        here = lock
        phases.append(f"focus inter at {_show_world(here)}")
        phases.append(f"select {branch}")
        seq_nodes = []
        cur = node
        for _ in range(3 if branch == "syn" else 2):
            cur = _next_spine(cur, goal_key)
            if cur is None:
                raise AdequacyError("interaction block ends early")
            if cur.rule == HOLE:
                break
            seq_nodes.append(cur)
        if len(seq_nodes) < (3 if branch == "syn" else 2):
            break  # cut inside the block
        after = _next_spine(seq_nodes[-1], goal_key)
        if after is None:
            raise AdequacyError("cleanup does not return to the spine")
        new_lock, _ = _split_delta(after.conclusion)
        res = norm_residual(normalize(here, RATES), normalize(new_lock, RATES))
        if res is None or len(res.items) != 1 or not isinstance(res.items[0], Fraction):
            raise AdequacyError("cleanup does not advance the lock by one rate")
        (r,) = res.items
        cleanup = seq_nodes[-1]
        ws = _insts(cleanup, goal_key)
        if branch == "int":
            act = _unlocked_atom(seq_nodes[0], goal_key)
            if act.pred != "tau" or rate_literal(act.args[0]) != r:
                raise AdequacyError("internal action and lock advance disagree")
            phases.append(f"unlock tau {fmt_rational(r)}")
            events.append(Event("internal", r))
        else:
            out = _unlocked_atom(seq_nodes[0], goal_key)
            inp = _unlocked_atom(seq_nodes[1], goal_key)
            wit = [t for t in _insts(seq_nodes[1], goal_key) if not isinstance(t, WorldExpr)]
            if out.pred != "out" or inp.pred != "in" or out.args != inp.args:
                raise AdequacyError("output and input do not match")
            x, m = (str(a) for a in out.args)
            phases.append(f"unlock output {x} {m}")
            phases.append(f"unlock input {x} witness {', '.join(map(str, wit))}")
            if len(ws) != 3 or rate_literal(ws[1]) != r:
                raise AdequacyError("cleanup rate and lock advance disagree")
            events.append(Event("sync", r, x, m))
        phases.append(f"cleanup to {_show_world(new_lock)}")
        lock = new_lock
        locks.append(lock)
        node = after
    tr = Trace(initial, events, rates, states if len(states) == len(events) else None)
    return Analysis(tr, phases, locks, complete)


def derivation_to_trace(p: FocProof) -> Trace:
    return analyse(p).trace


def phase_log(p: FocProof) -> List[str]:
    return analyse(p).phases


def spine(p: FocProof) -> List[FocProof]:
    """Spine sequents of a derivation, in order."""
    goal_key = _k(p.conclusion.goal)
    out, node = [], p
    while node is not None:
        out.append(node)
        node = _next_spine(node, goal_key)
    return out


def cut_at(p: FocProof, k: int) -> FocProof:
    """The prefix of ``p`` that stops at its ``k``-th spine sequent, left open."""
    target = spine(p)[k]

    def go(q):
        if q is target:
            return FocProof(HOLE, q.conclusion)
        return replace(q, premises=tuple(go(c) for c in q.premises))
    return go(p)


__all__ = ["AdequacyError", "Analysis", "Certified", "analyse", "cut_at", "decode_component",
           "decode_proc", "decode_sum", "derivation_to_trace", "final_goal", "phase_log", "spine",
           "trace_to_derivation"]
