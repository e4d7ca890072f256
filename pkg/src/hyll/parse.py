"""Concrete syntax for worlds, propositions, judgements and goal files.

Grammar (loosest binding first)::

    prop   ::= ('fa'|'ex'|'faw'|'exw'|'dn') NAME '.' prop
             | with '-o' prop            (right associative)
    with   ::= plus '&' with | plus
    plus   ::= tens '+' plus | tens
    tens   ::= pre '*' tens | pre
    pre    ::= '!' pre | '1' | '0' | 'top' | NAME ['(' terms ')'] | '(' prop ['at' world] ')'
    world  ::= factor ('.' factor)*
    factor ::= 'id' | NUM | '[' NUM, ... ']' | NAME | 'rate' '(' term ')'

A goal file holds optional directives followed by a sequent::

    % comment
    domain rates
    positive p, q
    hint [2]
    G1 @ w, ... ; D1 @ w, ... ==> C @ w
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import List, Optional

from .syntax import (Atom, Bang, Down, ExistsT, ExistsW, Fn, ForallT, ForallW, Here, Judgement,
                     Limp, One, Plus, Prop, Tensor, Top, TVar, Up, With, Zero, At, show, show_term)
from .worlds import (Domain, WBound, WComp, WId, WLit, WorldExpr, WRateOf, WVar, World,
                     WorldError, print_world, to_rational)


class ParseError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.msg, self.line, self.col = msg, line, col


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>%[^\n]*)
  | (?P<arrow>==>)
  | (?P<limp>-o\b)
  | (?P<num>\d+(?:/\d+|\.\d+)?)
  | (?P<name>[A-Za-z_#][A-Za-z0-9_#']*)
  | (?P<sym>[*+&!()\[\],.@;{}|?=:↑↓])
""", re.X)


@dataclass
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Tok]:
    out, pos, line, lstart = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - lstart + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            lstart = m.end()
        elif kind not in ("ws", "comment"):
            val = m.group()
            out.append(Tok(val if kind in ("sym", "arrow", "limp") else kind, val, line, pos - lstart + 1))
        pos = m.end()
    out.append(Tok("eof", "", line, pos - lstart + 1))
    return out


class Parser:
    """Recursive-descent parser over a token list; reused by the Spi front end."""

    QUANTS = {"fa": ForallT, "ex": ExistsT, "faw": ForallW, "exw": ExistsW, "dn": Here}

    def __init__(self, text: str, domain: Domain = Domain.RATES, positive=()):
        self.toks = tokenize(text)
        self.i = 0
        self.domain = domain
        self.positive = set(positive)

    # -- token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k=1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *kinds) -> bool:
        t = self.tok
        return t.kind in kinds or (t.kind == "name" and t.text in kinds)

    def next(self) -> Tok:
        t = self.tok
        self.i += 1
        return t

    def expect(self, kind, what=None) -> Tok:
        if not self.at(kind):
            self.error(f"expected {what or kind!r}, found {self.tok.text or 'end of input'!r}")
        return self.next()

    def error(self, msg, tok=None):
        t = tok or self.tok
        raise ParseError(msg, t.line, t.col)

    # -- terms
    def term(self, tnames) -> object:
        t = self.tok
        if t.kind == "num":
            self.next()
            try:
                q = to_rational(t.text)
            except WorldError:
                self.error(f"bad numeral {t.text!r}", t)
            from .worlds import fmt_rational
            return Fn(fmt_rational(q))
        name = self.expect("name", "term").text
        if name in tnames:
            if self.at("("):
                self.error(f"bound variable {name!r} applied to arguments")
            return TVar(list(tnames)[::-1].index(name))
        args = ()
        if self.at("("):
            self.next()
            args = tuple(self._list(lambda: self.term(tnames), ")"))
        return Fn(name, args)

    def _list(self, item, close):
        out = []
        if self.at(close):
            self.next()
            return out
        while True:
            out.append(item())
            if self.at(","):
                self.next()
                continue
            self.expect(close)
            return out

    # -- worlds
    def world(self, wnames=(), tnames=()) -> WorldExpr:
        e = self.wfactor(wnames, tnames)
        while self.at("."):
            dot = self.next()
            if not self.at("name", "num", "[", "id"):
                self.error("expected a world after '.'", self.tok if self.tok.kind != "eof" else dot)
            e = WComp(e, self.wfactor(wnames, tnames))
        return e

    def wfactor(self, wnames, tnames) -> WorldExpr:
        t = self.tok
        try:
            if t.kind == "name" and t.text == "id":
                self.next()
                return WId()
            if t.kind == "num":
                self.next()
                q = to_rational(t.text)
                if self.domain is Domain.RATES:
                    return WLit(World(self.domain, (q,)))
                if self.domain is Domain.TEMPORAL:
                    return WLit(World(self.domain, q))
                self.error("numeric worlds are not allowed in the unit domain", t)
            if t.kind == "[":
                self.next()
                qs = self._list(lambda: to_rational(self.expect("num", "rate").text), "]")
                if self.domain is not Domain.RATES:
                    self.error("rate lists need the rates domain", t)
                return WLit(World(self.domain, tuple(qs)))
        except WorldError as e:
            self.error(str(e), t)
        if t.kind == "name" and t.text == "rate" and self.peek().kind == "(":
            self.next()
            self.next()
            term = self.term(list(tnames))
            self.expect(")")
            return WRateOf(term)
        if t.kind == "name":
            self.next()
            if t.text in wnames:
                return WBound(list(wnames)[::-1].index(t.text))
            return WVar(t.text)
        self.error(f"expected a world, found {t.text or 'end of input'!r}")

    # -- propositions
    def prop(self, tn=(), wn=()) -> Prop:
        tn, wn = list(tn), list(wn)
        if self.tok.kind == "name" and self.tok.text in self.QUANTS and self.peek().kind == "name":
            kw = self.next().text
            name = self.expect("name", "binder name").text
            self.expect(".")
            cls = self.QUANTS[kw]
            if cls in (ForallT, ExistsT):
                return cls(self.prop(tn + [name], wn), name)
            return cls(self.prop(tn, wn + [name]), name)
        return self._binary(0, tn, wn)

    _LEVELS = [("-o", Limp), ("&", With), ("+", Plus), ("*", Tensor)]

    def _binary(self, level, tn, wn):
        if level == len(self._LEVELS):
            return self.pre(tn, wn)
        kind, cls = self._LEVELS[level]
        lhs = self._binary(level + 1, tn, wn)
        if self.at(kind):
            self.next()
            if self.tok.kind == "name" and self.tok.text in self.QUANTS and self.peek().kind == "name":
                rhs = self.prop(tn, wn)
            else:
                rhs = self._binary(level, tn, wn)
            return cls(lhs, rhs)
        return lhs

    def pre(self, tn, wn) -> Prop:
        t = self.tok
        if t.kind == "!":
            self.next()
            return Bang(self.pre(tn, wn))
        if t.kind == "num" and t.text in ("0", "1"):
            self.next()
            return One() if t.text == "1" else Zero()
        if t.kind in ("↑", "↓") or (t.kind == "name" and t.text in ("up", "down")
                                    and self.peek().kind == "{"):
            self.next()
            self.expect("{")
            body = self.prop(tn, wn)
            self.expect("}")
            return Up(body) if t.text in ("↑", "up") else Down(body)
        if t.kind == "(":
            self.next()
            body = self.prop(tn, wn)
            if self.at("at"):
                self.next()
                w = self.world(wn, tn)
                self.expect(")")
                return At(body, w)
            self.expect(")")
            return body
        if t.kind == "name":
            if t.text in self.QUANTS:
                self.error(f"binder {t.text!r} needs a variable name")
            if t.text == "top":
                self.next()
                return Top()
            self.next()
            args = ()
            if self.at("("):
                self.next()
                args = tuple(self._list(lambda: self.term(tn), ")"))
            return Atom(t.text, args, t.text in self.positive)
        self.error(f"unexpected {t.text or 'end of input'!r} in proposition")

    def judgement(self) -> Judgement:
        A = self.prop()
        w = WId()
        if self.at("@"):
            self.next()
            w = self.world()
        return Judgement(A, w)

    def judgements(self, stops) -> List[Judgement]:
        if self.at("."):
            self.next()
            return []
        out = []
        if self.at(*stops):
            return out
        while True:
            out.append(self.judgement())
            if self.at(","):
                self.next()
                continue
            return out

    def done(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected trailing input {self.tok.text!r}")


def parse_world(text: str, domain: Domain = Domain.RATES) -> WorldExpr:
    p = Parser(text, domain)
    e = p.world()
    p.done()
    return e


def parse_prop(text: str, domain: Domain = Domain.RATES, positive=()) -> Prop:
    p = Parser(text, domain, positive)
    A = p.prop()
    p.done()
    return A


def parse_judgement(text: str, domain: Domain = Domain.RATES, positive=()) -> Judgement:
    p = Parser(text, domain, positive)
    j = p.judgement()
    p.done()
    return j


@dataclass
class Goal:
    """A parsed goal file."""
    gamma: List[Judgement]
    delta: List[Judgement]
    goal: Judgement
    domain: Domain = Domain.RATES
    positive: List[str] = field(default_factory=list)
    hints: List[WorldExpr] = field(default_factory=list)


_DIRECTIVE = re.compile(r"^\s*(domain|positive|hint)\b(.*)$")


def parse_goal(text: str, domain: Optional[Domain] = None) -> Goal:
    lines = text.split("\n")
    dom, positive, hint_src, body_start = None, [], [], 0
    for n, line in enumerate(lines):
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            body_start = n + 1
            continue
        m = _DIRECTIVE.match(line)
        if not m:
            break
        body_start = n + 1
        key, rest = m.group(1), m.group(2).strip()
        if key == "domain":
            try:
                dom = Domain(rest)
            except ValueError:
                raise ParseError(f"unknown domain {rest!r}", n + 1, line.index(rest) + 1) from None
        elif key == "positive":
            positive += [s.strip() for s in rest.split(",") if s.strip()]
        else:
            hint_src.append((n, rest))
    dom = domain or dom or Domain.RATES
    body = "\n" * body_start + "\n".join(lines[body_start:])
    p = Parser(body, dom, positive)
    first = p.judgements(("==>", ";"))
    if p.at(";"):
        p.next()
        gamma, delta = first, p.judgements(("==>",))
        p.expect("==>")
        goal = p.judgement()
    elif p.at("==>"):
        p.next()
        gamma, delta = [], first
        goal = p.judgement()
    else:
        if len(first) != 1:
            p.error("expected '==>'")
        gamma, delta, goal = [], [], first[0]
    p.done()
    hints = []
    for n, src in hint_src:
        hp = Parser("\n" * n + src, dom)
        hints.append(hp.world())
        hp.done()
    return Goal(gamma, delta, goal, dom, positive, hints)


def print_judgement(j: Judgement) -> str:
    return f"{show(j.prop, unicode_shifts=False)} @ {print_world(j.world)}"


def print_judgements(js) -> str:
    return ", ".join(print_judgement(j) for j in js) if js else "."


def print_goal(g: Goal) -> str:
    out = [f"domain {g.domain.value}"]
    if g.positive:
        out.append("positive " + ", ".join(g.positive))
    for h in g.hints:
        out.append(f"hint {print_world(h)}")
    out.append(f"{print_judgements(g.gamma)} ; {print_judgements(g.delta)} ==> "
               f"{print_judgement(g.goal)}")
    return "\n".join(out) + "\n"


__all__ = ["ParseError", "Parser", "Goal", "parse_world", "parse_prop", "parse_judgement",
           "parse_goal", "print_judgement", "print_judgements", "print_goal", "show_term"]
