"""Reader and printer for ``.spi`` process files.

::

    file    ::= decl*
    decl    ::= 'channel' NAME ':' RATE
              | 'def' NAME '(' [NAME {',' NAME}] ')' '=' proc
              | 'run' proc
    proc    ::= 'new' '(' RATE ')' NAME 'in' proc | par
    par     ::= choice {'|' choice}
    choice  ::= prefix {'+' prefix}
    prefix  ::= NAME '!' '(' NAME ')' '.' prefix
              | NAME '?' '(' NAME ')' '.' prefix
              | 'tau' '(' RATE ')' '.' prefix
              | atom
    atom    ::= '0' | 'new' ... (extends to the right) | NAME '(' [NAME {',' NAME}] ')' | '(' proc ')'
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from ..parse import ParseError, Parser
from ..worlds import WorldError, fmt_rational, to_rational
from .syntax import (Bound, Call, Choice, Def, In, Name, Nil, Nu, Out, Par, Process, SpiError,
                     Sum, Tau, check_env, check_process, show, show_def)

KEYWORDS = {"new", "in", "tau", "def", "run", "channel"}


@dataclass
class SpiProgram:
    rates: Dict[str, Fraction] = field(default_factory=dict)
    env: Dict[str, Def] = field(default_factory=dict)
    run: Optional[Process] = None


class SpiParser(Parser):
    def rate(self) -> Fraction:
        t = self.expect("num", "rate")
        try:
            q = to_rational(t.text)
        except WorldError:
            self.error(f"bad rate {t.text!r}", t)
        if q <= 0:
            self.error("rates must be positive", t)
        return q

    def ident(self, what="name") -> str:
        t = self.expect("name", what)
        if t.text in KEYWORDS:
            self.error(f"keyword {t.text!r} used as a {what}", t)
        return t.text

    def chan(self, names):
        n = self.ident("channel")
        if n in names:
            return Bound(names[::-1].index(n))
        return Name(n)

    def proc(self, names) -> Process:
        if self.at("new"):
            self.next()
            self.expect("(")
            r = self.rate()
            self.expect(")")
            x = self.ident("channel")
            self.expect("in")
            return Nu(r, self.proc(names + [x]), x)
        out = self.choice(names)
        while self.at("|"):
            self.next()
            out = Par(out, self.choice(names))
        return out

    def choice(self, names) -> Process:
        first = self.tok
        out = self.prefix(names)
        while self.at("+"):
            op = self.next()
            rhs = self.prefix(names)
            if not isinstance(out, Sum) or not isinstance(rhs, Sum):
                self.error("choice needs action prefixes on both sides", op if isinstance(out, Sum) else first)
            out = Choice(out, rhs)
        return out

    def prefix(self, names) -> Process:
        if self.at("tau") and self.peek().kind == "(":
            self.next()
            self.expect("(")
            r = self.rate()
            self.expect(")")
            self.expect(".")
            return Tau(r, self.prefix(names))
        if self.tok.kind == "name" and self.peek().kind in ("!", "?"):
            x = self.chan(names)
            op = self.next().kind
            self.expect("(")
            if op == "!":
                m = self.chan(names)
                self.expect(")")
                self.expect(".")
                return Out(x, m, self.prefix(names))
            y = self.ident("channel")
            self.expect(")")
            self.expect(".")
            return In(x, self.prefix(names + [y]), y)
        return self.atom(names)

    def atom(self, names) -> Process:
        t = self.tok
        if t.kind == "num":
            if t.text != "0":
                self.error(f"expected a process, found {t.text!r}")
            self.next()
            return Nil()
        if t.kind == "(":
            self.next()
            p = self.proc(names)
            self.expect(")")
            return p
        if self.at("new"):
            return self.proc(names)
        if t.kind == "name" and t.text not in KEYWORDS:
            self.next()
            self.expect("(", "'(' after definition name")
            args = tuple(self._list(lambda: self.chan(names), ")"))
            return Call(t.text, args)
        self.error(f"expected a process, found {t.text or 'end of input'!r}")

    def program(self) -> SpiProgram:
        prog = SpiProgram()
        while self.tok.kind != "eof":
            t = self.tok
            if self.at("channel"):
                self.next()
                x = self.ident("channel")
                self.expect(":")
                if x in prog.rates:
                    self.error(f"channel {x!r} declared twice", t)
                prog.rates[x] = self.rate()
            elif self.at("def"):
                self.next()
                n = self.ident("definition name")
                self.expect("(")
                params = self._list(lambda: self.ident("parameter"), ")")
                self.expect("=")
                if n in prog.env:
                    self.error(f"definition {n!r} given twice", t)
                prog.env[n] = Def(n, tuple(params), self.proc(list(params)))
            elif self.at("run"):
                self.next()
                if prog.run is not None:
                    self.error("more than one 'run'", t)
                prog.run = self.proc([])
            else:
                self.error(f"expected 'channel', 'def' or 'run', found {t.text!r}")
        return prog


def parse_process(text: str) -> Process:
    p = SpiParser(text)
    out = p.proc([])
    p.done()
    return out


def parse_spi(text: str, validate: bool = True) -> SpiProgram:
    prog = SpiParser(text).program()
    if validate:
        check_env(prog.env)
        if prog.run is not None:
            check_process(prog.run, prog.env, "run")
    return prog


def print_spi(prog: SpiProgram) -> str:
    lines = [f"channel {x} : {fmt_rational(r)}" for x, r in prog.rates.items()]
    lines += [show_def(d) for d in prog.env.values()]
    if prog.run is not None:
        lines.append(f"run {show(prog.run)}")
    return "\n".join(lines) + "\n"


__all__ = ["SpiProgram", "SpiParser", "parse_process", "parse_spi", "print_spi", "ParseError",
           "SpiError"]
