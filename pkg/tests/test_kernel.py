from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from hyll.kernel import (KernelError, Proof, Sequent, check_proof, contract, cut_eliminate,
                         duplicate, identity_expand, invert, weaken)
from hyll.kernel.cert import CertificateError, dump_proof, load_proof
from hyll.parse import parse_judgement, parse_prop
from hyll.syntax import Atom, Judgement, Limp, Tensor
from hyll.worlds import Domain, WVar, lit

import named as N
from helpers import cut, prove, sequent, ucut

R = Domain.RATES
p = Atom("p", ())
u, v = WVar("u"), WVar("v")


def rules(proof):
    return {n.rule for n in proof.nodes()}


def cuts(proof):
    return sum(n.rule == "cut" for n in proof.nodes())


# -- checking


def test_init_ok():
    s = Sequent((Judgement(Atom("q", ()), u),), (Judgement(p, u),), Judgement(p, u), R)
    assert check_proof(Proof("init", s)).ok


def test_top_with_any_context():
    s = sequent("a @ id, b * c @ [2] ==> top @ id")
    assert check_proof(Proof("topR", s)).ok


def test_init_world_mismatch_fails_at_root():
    s = Sequent((), (Judgement(p, v),), Judgement(p, u), R)
    rep = check_proof(Proof("init", s))
    assert not rep.ok and rep.path == () and rep.rule == "init"


def test_bad_split_reported_not_raised():
    good = prove("a, b ==> a * b @ id")
    bad = replace(good, split=())
    rep = check_proof(bad)
    assert not rep.ok


def test_cut_needs_flag():
    c = cut(identity_expand(p, u), identity_expand(p, u))
    assert not check_proof(c).ok
    assert check_proof(c, allow_cut=True).ok


# -- identity


def test_identity_atom_is_init():
    assert identity_expand(p, u).rule == "init"


def test_identity_tensor():
    pr = identity_expand(parse_prop("p * q"), u)
    assert {"tensR", "tensL"} <= rules(pr) and check_proof(pr).ok


def test_identity_down():
    pr = identity_expand(parse_prop("dn w. (p at w)"), u)
    assert {"dnL", "dnR", "atL", "atR"} <= rules(pr) and check_proof(pr).ok


@settings(max_examples=150, deadline=None)
@given(A=N.props(depth=5), w=N.worlds(set()))
def test_identity_checks(A, w):
    P = N.plain(A)
    pr = identity_expand(P, N.world_to_nameless(w, ()))
    assert check_proof(pr).ok
    assert cuts(pr) == 0


# -- weakening and contraction


def test_weaken_init():
    pr = weaken(identity_expand(p, u), [Judgement(Atom("r", ()), u)])
    assert check_proof(pr).ok and len(pr.conclusion.gamma) == 1


def test_weaken_limp_left():
    pr = prove("a -o b, a ==> b @ id")
    assert "limpL" in rules(pr)
    extra = [parse_judgement("fa x. q(x) @ [3]")]
    assert check_proof(weaken(pr, extra)).ok


def test_weaken_nothing_is_identity():
    pr = prove("a * b ==> b * a @ id")
    assert weaken(pr, []) == pr


def test_weaken_avoids_parameter_clash():
    pr = prove("ex x. q(x) ==> ex y. q(y) @ id")
    name = next(n.param for n in pr.nodes() if n.param)
    clash = [Judgement(Atom("q", (N.S.Fn(name),)), u)]
    assert check_proof(weaken(pr, clash)).ok


@pytest.mark.parametrize("text,j", [
    ("!a ==> a * a @ id", "c @ id"),
    ("a -o a @ id ; a @ id ==> a @ id", "a -o a @ id"),
    ("(a at [2]) * (b at [2]) ==> ((a * b) at [2]) @ id", "p @ [1]"),
])
def test_duplicate_then_contract(text, j):
    pr = prove(text)
    J = parse_judgement(j)
    doubled = duplicate(duplicate(pr, J), J) if J not in pr.conclusion.gamma else duplicate(pr, J)
    assert check_proof(doubled).ok
    back = contract(doubled, J)
    assert check_proof(back).ok
    assert sum(g == J for g in back.conclusion.gamma) == 1


# -- cut elimination


def _eliminates(c):
    assert check_proof(c, allow_cut=True).ok
    e = cut_eliminate(c)
    rep = check_proof(e)
    assert rep.ok, rep
    assert e.conclusion == c.conclusion
    assert cuts(e) == 0
    return e


def test_cut_against_identity_collapses():
    pr = prove("a * b ==> b * a @ id")
    J = pr.conclusion.goal
    _eliminates(cut(pr, identity_expand(J.prop, J.world)))
    H = pr.conclusion.delta[0]
    _eliminates(cut(identity_expand(H.prop, H.world), pr))


def test_cut_on_tensor_principal():
    left = prove("a, b ==> a * b @ id")
    right = prove("a * b ==> b * a @ id")
    assert left.rule == "tensR" and right.rule == "tensL"
    _eliminates(cut(left, right))


def test_unrestricted_cut_against_copy():
    J = parse_judgement("a -o a @ id")
    inner = weaken(identity_expand(J.prop, J.world), [J])
    s = inner.conclusion
    pr = Proof("copy", Sequent(s.gamma, (), s.goal, s.domain), (inner,), principal=J)
    assert check_proof(pr).ok
    _eliminates(ucut(prove("==> a -o a @ id"), pr))


@pytest.mark.parametrize("there,back", [
    ("(a * b) -o c ==> a -o b -o c @ id", "a -o b -o c ==> (a * b) -o c @ id"),
    ("a * (b + c) ==> (a * b) + (a * c) @ id", "(a * b) + (a * c) ==> a * (b + c) @ id"),
    ("((a * b) at [2]) ==> (a at [2]) * (b at [2]) @ id",
     "(a at [2]) * (b at [2]) ==> ((a * b) at [2]) @ id"),
    ("dn u. ((a at u) & (b at u)) @ k ==> (dn u. (a at u)) & (dn u. (b at u)) @ k",
     "(dn u. (a at u)) & (dn u. (b at u)) @ k ==> dn u. ((a at u) & (b at u)) @ k"),
    ("(dn u. faw v. (a at u.v)) @ k ==> (dn u. faw v. (a at u.v)) @ k",
     "(dn u. faw v. (a at u.v)) @ k ==> a @ k"),
])
def test_cut_chains(there, back):
    _eliminates(cut(prove(there), prove(back)))


@settings(max_examples=60, deadline=None)
@given(A=N.props(depth=3))
def test_cut_of_identities(A):
    P = N.plain(A)
    w = lit(R, (2,))
    _eliminates(cut(identity_expand(P, w), identity_expand(P, w)))


def test_nested_cuts():
    a = prove("a * b ==> b * a @ id")
    b = prove("b * a ==> a * b @ id")
    inner = cut(a, b)
    outer = cut(inner, prove("a * b ==> b * a @ id"))
    _eliminates(outer)


# -- inversion


def test_invert_limp_right():
    (prem,) = invert("limpR", sequent("==> a -o b @ [2]"))
    assert [str(j) for j in prem.delta] == [str(parse_judgement("a @ [2]"))]
    assert prem.goal == parse_judgement("b @ [2]")


def test_invert_tensor_left():
    (prem,) = invert("tensL", sequent("a * b ==> c @ id"))
    assert len(prem.delta) == 2


def test_invert_zero_left_closes():
    assert invert("zeroL", sequent("0 ==> c @ id")) == []


def test_invert_missing_principal():
    with pytest.raises(KernelError):
        invert("tensL", sequent("a ==> a @ id"))


# -- certificates


def test_certificate_roundtrip():
    pr = prove("a * (b + c) ==> (a * b) + (a * c) @ id")
    text = dump_proof(pr)
    assert load_proof(text) == pr
    assert dump_proof(load_proof(text)) == text


@settings(max_examples=60, deadline=None)
@given(A=N.props(depth=4))
def test_certificate_roundtrip_random(A):
    pr = identity_expand(N.plain(A), lit(R, (1, 2)))
    text = dump_proof(pr)
    assert dump_proof(load_proof(text)) == text
    assert check_proof(load_proof(text)).ok


def test_certificate_header_required():
    with pytest.raises(CertificateError):
        load_proof("{}")
