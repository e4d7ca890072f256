import pytest
from hypothesis import given, settings, strategies as st

from hyll import syntax as S
from hyll.parse import ParseError, parse_prop, parse_world
from hyll.syntax import (At, Atom, Bang, Down, Fn, ForallW, Here, Limp, One, Tensor, TVar, Up,
                         erase_polarity, instantiate, polarize, show, subst_term, subst_world,
                         well_formed, well_polarized)
from hyll.worlds import Domain, WBound, WComp, WVar, lit

import named as N

R = Domain.RATES
p, q = Atom("p", ()), Atom("q", ())
a = Atom("a", (), True)


def reassoc(A):
    """Left-associate world compositions so differently nested but equal
    expressions compare equal."""
    def flat(e):
        return flat(e.left) + flat(e.right) if isinstance(e, WComp) else [e]

    def left(fs):
        out = fs[0]
        for f in fs[1:]:
            out = WComp(out, f)
        return out

    return _reassoc(A, flat, left)


def _reassoc(A, flat, left):
    if isinstance(A, At):
        return At(_reassoc(A.body, flat, left), left(flat(A.world)))
    if isinstance(A, S.BINARY):
        return type(A)(_reassoc(A.left, flat, left), _reassoc(A.right, flat, left))
    if isinstance(A, S.UNARY):
        return type(A)(_reassoc(A.body, flat, left))
    if isinstance(A, S.TERM_BINDERS + S.WORLD_BINDERS):
        return type(A)(_reassoc(A.body, flat, left), A.hint)
    return A


# -- substitution


def test_subst_atom():
    assert subst_term(Atom("p", (TVar(0),)), Fn("c")) == Atom("p", (Fn("c"),))


def test_subst_without_occurrence_is_identity():
    A = Tensor(p, Atom("q", (Fn("c"),)))
    assert subst_term(A, Fn("d")) == A
    assert subst_world(At(p, lit(R, (2,))), lit(R, (3,))) == At(p, lit(R, (2,)))


def test_subst_world_at():
    assert subst_world(At(p, WBound(0)), WVar("w")) == At(p, WVar("w"))


def test_down_instantiation():
    assert instantiate(Here(At(p, WBound(0))), WVar("v")) == At(p, WVar("v"))


@settings(max_examples=300, deadline=None)
@given(data=st.data())
def test_term_subst_matches_named_oracle(data):
    outer = ("o1", "o2")
    A = data.draw(N.props(frozenset(outer) | {"x"}))
    tau = data.draw(N.terms(set(outer)))
    want = N.to_nameless(N.subst_term_named(A, "x", tau), outer)
    got = subst_term(N.to_nameless(A, outer + ("x",)), N.term_to_nameless(tau, outer))
    assert got == want


@settings(max_examples=300, deadline=None)
@given(data=st.data())
def test_world_subst_matches_named_oracle(data):
    outer = ("w1", "w2")
    A = data.draw(N.props(wvars=frozenset(outer) | {"u"}))
    w = data.draw(N.worlds(set(outer)))
    want = N.to_nameless(N.subst_world_named(A, "u", w), (), outer)
    got = subst_world(N.to_nameless(A, (), outer + ("u",)), N.world_to_nameless(w, outer))
    assert reassoc(got) == reassoc(want)


@settings(max_examples=100, deadline=None)
@given(data=st.data())
def test_substitutions_commute(data):
    A = data.draw(N.props(frozenset({"x", "y"})))
    s, t = data.draw(N.terms(set())), data.draw(N.terms(set()))
    body = N.to_nameless(A, ("x", "y"))
    s_, t_ = N.term_to_nameless(s, ()), N.term_to_nameless(t, ())
    # y is index 0, x index 1: closing y then x versus x then y
    one = subst_term(subst_term(body, t_, 0), s_, 0)
    two = subst_term(subst_term(body, s_, 1), t_, 0)
    assert one == two
    assert well_formed(one)


# -- derived connectives


def test_rho_expands():
    v = lit(R, (2,))
    assert S.rho(v, p) == Here(At(p, WComp(WBound(0), v)))


def test_imp_is_bang_limp():
    assert S.imp(p, q) == Limp(Bang(p), q)


def test_box_and_dia_shapes():
    box = S.box(p)
    assert isinstance(box, Here) and isinstance(box.body, S.ForallW)
    dia = S.dia(p)
    assert isinstance(dia, Here) and isinstance(dia.body, S.ExistsW)


def test_bangbang():
    assert S.bangbang(p) == ForallW(At(p, WBound(0)))


# -- polarity


def test_polarize_examples():
    assert polarize(a, "negative") == Up(a)
    assert polarize(Tensor(a, Atom("b", (), True)), "negative") == Up(Tensor(a, Atom("b", (), True)))
    assert polarize(p, "positive") == Down(p)


@settings(max_examples=300, deadline=None)
@given(A=N.props(), bias=st.sampled_from(["negative", "positive"]))
def test_erase_polarize_identity(A, bias):
    P = N.to_nameless(A)
    P = erase_polarity(P)  # the generator may include shifts
    Q = polarize(P, bias)
    assert well_polarized(Q)
    assert S.is_positive(Q) == (bias == "positive")
    assert erase_polarity(Q) == P


# -- concrete syntax


def test_precedence():
    assert parse_prop("a * b + c & d -o e") == parse_prop("((a * b) + c) & d -o e")
    assert parse_prop("a -o b -o c") == Limp(Atom("a", ()), Limp(Atom("b", ()), Atom("c", ())))
    assert parse_prop("!a * b") == Tensor(Bang(Atom("a", ())), Atom("b", ()))


def test_quantifier_extends_right():
    A = parse_prop("fa x. p(x) * q")
    assert isinstance(A, S.ForallT) and isinstance(A.body, Tensor)


def test_malformed_world_reports_column():
    with pytest.raises(ParseError) as e:
        parse_world("u .")
    assert e.value.col == 3


def test_unknown_connective():
    with pytest.raises(ParseError):
        parse_prop("a ^ b")


@settings(max_examples=400, deadline=None)
@given(A=N.props(), uni=st.booleans())
def test_parse_print_roundtrip(A, uni):
    P = N.to_nameless(A)
    text = show(P, unicode_shifts=uni)
    assert parse_prop(text, R, positive=N.POS_PREDS) == P
