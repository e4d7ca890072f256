"""Textual proof certificates: a version header line followed by JSON."""
from __future__ import annotations

import json
from typing import Iterable

from ..parse import ParseError, Parser, print_judgement
from ..syntax import Atom, Judgement, show_term
from ..worlds import Domain, WorldExpr, print_world
from .proof import Proof, Sequent

HEADER = "hyll-proof 1"


class CertificateError(Exception):
    pass


def positive_preds(js: Iterable[Judgement]) -> list:
    out = set()

    def walk(A):
        if isinstance(A, Atom):
            if A.pos:
                out.add(A.pred)
            return
        for f in ("left", "right", "body"):
            sub = getattr(A, f, None)
            if sub is not None:
                walk(sub)
    for j in js:
        walk(j.prop)
    return sorted(out)


def _judgements_of(p: Proof):
    for q in p.nodes():
        s = q.conclusion
        yield from s.gamma
        yield from s.delta
        yield s.goal


def _node(p: Proof) -> dict:
    s = p.conclusion
    d = {"rule": p.rule,
         "gamma": [print_judgement(j) for j in s.gamma],
         "delta": [print_judgement(j) for j in s.delta],
         "goal": print_judgement(s.goal)}
    if p.principal is not None:
        d["principal"] = print_judgement(p.principal)
    if p.split or p.rule in ("tensR", "limpL") or (p.rule == "cut" and p.cut_kind == 1):
        d["split"] = [print_judgement(j) for j in p.split]
    if p.choice:
        d["choice"] = p.choice
    if p.inst is not None:
        d["inst"] = ({"world": print_world(p.inst)} if isinstance(p.inst, WorldExpr)
                     else {"term": show_term(p.inst)})
    if p.param is not None:
        d["param"] = p.param
    if p.cut is not None:
        d["cut"] = print_judgement(p.cut)
        d["cut_kind"] = p.cut_kind
    d["premises"] = [_node(q) for q in p.premises]
    return d


def dump_proof(p: Proof) -> str:
    doc = {"domain": p.conclusion.domain.value,
           "positive": positive_preds(_judgements_of(p)),
           "proof": _node(p)}
    return HEADER + "\n" + json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


class _Reader:
    def __init__(self, domain, positive):
        self.domain, self.positive = domain, tuple(positive)

    def parser(self, text):
        return Parser(text, self.domain, self.positive)

    def judgement(self, text):
        p = self.parser(text)
        j = p.judgement()
        p.done()
        return j

    def node(self, d) -> Proof:
        try:
            j = self.judgement
            inst = None
            if "inst" in d:
                spec = d["inst"]
                if "world" in spec:
                    p = self.parser(spec["world"])
                    inst = p.world()
                else:
                    p = self.parser(spec["term"])
                    inst = p.term([])
                p.done()
            return Proof(
                rule=d["rule"],
                conclusion=Sequent(tuple(map(j, d["gamma"])), tuple(map(j, d["delta"])),
                                   j(d["goal"]), self.domain),
                premises=tuple(self.node(q) for q in d.get("premises", [])),
                principal=j(d["principal"]) if "principal" in d else None,
                split=tuple(map(j, d.get("split", []))),
                choice=int(d.get("choice", 0)),
                inst=inst,
                param=d.get("param"),
                cut=j(d["cut"]) if "cut" in d else None,
                cut_kind=int(d.get("cut_kind", 0)),
            )
        except (KeyError, TypeError) as e:
            raise CertificateError(f"malformed proof node: {e}") from None


def load_proof(text: str) -> Proof:
    head, _, body = text.partition("\n")
    if head.strip() != HEADER:
        raise CertificateError(f"expected header {HEADER!r}, found {head.strip()!r}")
    try:
        doc = json.loads(body)
        domain = Domain(doc["domain"])
    except (json.JSONDecodeError, KeyError, ValueError) as e:
        raise CertificateError(f"bad certificate body: {e}") from None
    return _Reader(domain, doc.get("positive", ())).node(doc["proof"])


__all__ = ["HEADER", "CertificateError", "dump_proof", "load_proof", "ParseError"]
