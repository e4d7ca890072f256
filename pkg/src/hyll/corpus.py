"""Curated goal corpus shared by ``hyll selftest`` and the test suite.

Each entry is ``(name, domain, goal text, provable)``.  ``dia`` and ``box``
are spelled out with ``dn``/``exw``/``faw`` since they are defined
connectives, not primitives.
"""
from __future__ import annotations

from typing import List, NamedTuple

from .worlds import Domain

DIA = "(dn u. exw w. (a at u.w))"
BOX_DIA = f"(dn u. faw v. ({DIA} at u.v))"


class Entry(NamedTuple):
    name: str
    domain: Domain
    text: str
    provable: bool = True


U, T, R = Domain.UNIT, Domain.TEMPORAL, Domain.RATES

CORPUS: List[Entry] = [
    Entry("s5", U, f"{DIA} @ k ==> {BOX_DIA} @ k"),
    Entry("s5-rates", R, f"{DIA} @ k ==> {BOX_DIA} @ k", provable=False),
    Entry("t-axiom", R, "(dn u. faw v. (a at u.v)) @ k ==> a @ k"),
    Entry("rho-intro", R, "a @ [2] ==> (dn u. (a at u.[2])) @ id"),
    Entry("rho-elim", R, "(dn u. (a at u.[2])) @ id ==> a @ [2]"),
    Entry("down-swap", R, "dn u. dn v. (a at u) ==> dn v. dn u. (a at v) @ id"),
    Entry("down-here", T, "dn u. (a at u) ==> a @ id"),
    Entry("at-tensor", R, "((a * b) at [2]) ==> (a at [2]) * (b at [2]) @ id"),
    Entry("at-tensor-back", R, "(a at [2]) * (b at [2]) ==> ((a * b) at [2]) @ id"),
    Entry("at-with", T, "((a & b) at 3) ==> (a at 3) & (b at 3) @ id"),
    *[Entry(f"down-commutes-{name}{suffix}", R, text)
      for name, op in (("tensor", "*"), ("with", "&"), ("plus", "+"), ("limp", "-o"))
      for suffix, text in (
          ("", f"dn u. ((a at u) {op} (b at u)) @ k ==> (dn u. (a at u)) {op} (dn u. (b at u)) @ k"),
          ("-back", f"(dn u. (a at u)) {op} (dn u. (b at u)) @ k ==> dn u. ((a at u) {op} (b at u)) @ k"))],
    Entry("box-one", R, "==> (dn u. faw w. (1 at u.w)) @ [3]"),
    Entry("tensor-comm", R, "a * b ==> b * a @ id"),
    Entry("tensor-assoc", R, "(a * b) * c ==> a * (b * c) @ id"),
    Entry("tensor-unit", U, "a * 1 ==> a @ id"),
    Entry("with-comm", R, "a & b ==> b & a @ id"),
    Entry("plus-comm", R, "a + b ==> b + a @ id"),
    Entry("distrib", R, "a * (b + c) ==> (a * b) + (a * c) @ id"),
    Entry("distrib-back", R, "(a * b) + (a * c) ==> a * (b + c) @ id"),
    Entry("curry", R, "(a * b) -o c ==> a -o b -o c @ id"),
    Entry("uncurry", R, "a -o b -o c ==> (a * b) -o c @ id"),
    Entry("bang-dup", R, "!a ==> a * a @ id"),
    Entry("absurd", R, "==> 0 @ id", provable=False),
    Entry("no-weaken", R, "a * b ==> a @ id", provable=False),
]


def provable_entries() -> List[Entry]:
    return [e for e in CORPUS if e.provable]
