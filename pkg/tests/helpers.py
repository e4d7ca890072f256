"""Small builders shared by the tests."""
from hyll.focusing import SearchBudget, prove_unfocused
from hyll.kernel import Proof, Sequent
from hyll.parse import parse_goal
from hyll.worlds import Domain


def sequent(text: str, domain: Domain = Domain.RATES) -> Sequent:
    g = parse_goal(text, domain)
    return Sequent(tuple(g.gamma), tuple(g.delta), g.goal, g.domain)


def prove(text: str, domain: Domain = Domain.RATES, fuel: int = 8):
    return prove_unfocused(sequent(text, domain), SearchBudget(max_decisions=fuel))


def cut(p: Proof, q: Proof) -> Proof:
    """Linear cut of ``p`` (proving J) into ``q`` (using one copy of J)."""
    J = p.conclusion.goal
    s = q.conclusion
    rest = list(s.delta)
    rest.remove(J)
    conc = Sequent(s.gamma, tuple(p.conclusion.delta) + tuple(rest), s.goal, s.domain)
    return Proof("cut", conc, (p, q), cut=J, cut_kind=1, split=tuple(p.conclusion.delta))


def ucut(p: Proof, q: Proof) -> Proof:
    """Unrestricted cut: ``p`` proves J from no linear hypotheses, ``q`` has J in Γ."""
    J = p.conclusion.goal
    s = q.conclusion
    gamma = tuple(g for g in s.gamma if g != J)
    conc = Sequent(gamma, s.delta, s.goal, s.domain)
    return Proof("cut", conc, (p, q), cut=J, cut_kind=2)
