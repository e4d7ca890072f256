"""Command-line entry points ``hyll`` and ``spi``.

Exit status: 0 success, 1 logical failure (no proof within budget, failed
check, trace that does not certify), 2 usage or parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import List, Optional

from .parse import ParseError, parse_goal, parse_world, print_judgement
from .worlds import Domain, WorldError, fmt_rational

OK, FAIL, USAGE = 0, 1, 2


class _Out:
    def __init__(self, fmt: str):
        self.fmt = fmt
        self.doc = {}

    def text(self, line: str = ""):
        if self.fmt == "text":
            print(line)

    def set(self, **kw):
        self.doc.update(kw)

    def finish(self, status: int) -> int:
        if self.fmt == "structured":
            self.doc.setdefault("status", status)
            print(json.dumps(self.doc, indent=1, default=str))
        return status


def _err(msg: str, path: Optional[str] = None):
    where = f"{path}: " if path else ""
    print(f"error: {where}{msg}", file=sys.stderr)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")


def _size(p) -> int:
    return sum(1 for _ in p.nodes())


def _phases(fp, depth=0, out=None):
    """Focused proof as one line per phase: a decision, then the rules it runs
    until the next decision or leaf."""
    from .parse import print_judgement
    out = [] if out is None else out
    rules, node = [], fp
    while True:
        rules.append(node.rule)
        if node.rule in ("lf", "cplf", "rf") and len(rules) > 1:
            rules.pop()
            break
        if len(node.premises) != 1:
            break
        node = node.premises[0]
    head, rest = rules[0], " ".join(rules[1:])
    if head not in ("lf", "cplf", "rf"):
        head, rest = "active", " ".join(rules)
    if head in ("lf", "cplf") and fp.principal is not None:
        head = f"{head} {print_judgement(fp.principal)}"
    out.append("  " * depth + (f"{head}: {rest}" if rest else head))
    if node.rule in ("lf", "cplf", "rf") and node is not fp:
        _phases(node, depth, out)
    else:
        for q in node.premises:
            _phases(q, depth + 1, out)
    return out


def _add_format(p):
    p.add_argument("--format", choices=("text", "structured"), default="text",
                   help="human-readable text or JSON")


# ---------------------------------------------------------------------------
# hyll


def cmd_check(args, out: _Out) -> int:
    from .kernel import check_proof
    from .kernel.cert import CertificateError, load_proof
    try:
        proof = load_proof(_read(args.file))
    except (ParseError, CertificateError) as e:
        _err(str(e), args.file)
        return USAGE
    rep = check_proof(proof, allow_cut=args.allow_cut)
    out.set(ok=rep.ok, nodes=_size(proof), path=list(rep.path), rule=rep.rule, reason=rep.reason)
    if rep.ok:
        out.text(f"ok: {_size(proof)} rules, height {proof.height()}")
        return OK
    out.text(f"check failed at {'/'.join(map(str, rep.path)) or 'root'} ({rep.rule}): {rep.reason}")
    return FAIL


def cmd_prove(args, out: _Out) -> int:
    from .focusing import SearchBudget, search_ex, polarized_goal, erase
    from .kernel import Sequent, check_proof
    from .kernel.cert import dump_proof
    try:
        domain = Domain(args.domain) if args.domain else None
        goal = parse_goal(_read(args.file), domain)
        hints = list(goal.hints) + [parse_world(w, goal.domain) for w in args.witness]
    except (ParseError, WorldError) as e:
        _err(str(e), args.file)
        return USAGE
    from .focusing.search import default_fuel
    fuel = args.fuel if args.fuel is not None else default_fuel()
    seq = Sequent(tuple(goal.gamma), tuple(goal.delta), goal.goal, goal.domain)
    t0 = time.perf_counter()
    res = search_ex(polarized_goal(seq),
                    SearchBudget(max_decisions=fuel, world_witness_hints=tuple(hints)))
    dt = time.perf_counter() - t0
    out.set(found=res.proof is not None, decisions=res.decisions, nodes=res.nodes,
            seconds=round(dt, 4), domain=goal.domain.value)
    if res.proof is None:
        out.text(f"budget exhausted: no proof within {fuel} decisions ({res.nodes} nodes)")
        return FAIL
    from dataclasses import replace
    proof = replace(erase(res.proof), conclusion=seq)
    rep = check_proof(proof)
    if not rep.ok:  # would be a bug in erasure; report rather than hide
        out.text(f"internal error: erased proof fails to check: {rep.reason}")
        out.set(check=rep.reason)
        return FAIL
    cert = dump_proof(proof)
    if args.out:
        _write(args.out, cert)
    out.set(certificate=args.out or cert)
    out.text(f"proved with {res.decisions} decisions, {_size(proof)} rules ({dt:.3f}s)")
    listing = _phases(res.proof)
    out.set(phases=listing)
    for line in listing:
        out.text("  " + line)
    if not args.out:
        out.text(cert.rstrip("\n"))
    return OK


def cmd_selftest(args, out: _Out) -> int:
    from . import selftest
    results = selftest.run(args.suite)
    bad = [r for r in results if not r[1]]
    for name, ok, detail in results:
        out.text(f"{'PASS' if ok else 'FAIL'} {name}{': ' + detail if detail else ''}")
    out.set(results=[{"name": n, "ok": o, "detail": d} for n, o, d in results])
    return FAIL if bad else OK


def hyll_parser():
    ap = argparse.ArgumentParser(prog="hyll", description="HyLL proof kernel and prover")
    sub = ap.add_subparsers(dest="cmd", required=True)
    p = sub.add_parser("check", help="check a proof certificate")
    p.add_argument("file")
    p.add_argument("--allow-cut", action="store_true")
    _add_format(p)
    p = sub.add_parser("prove", help="search for a proof of a goal file")
    p.add_argument("file")
    p.add_argument("--domain", choices=[d.value for d in Domain])
    p.add_argument("--fuel", type=int, help="max focusing decisions per branch")
    p.add_argument("--witness", action="append", default=[], metavar="WORLD",
                   help="extra world witness candidate (repeatable)")
    p.add_argument("--out", help="write the certificate here")
    _add_format(p)
    p = sub.add_parser("selftest", help="run a built-in suite")
    p.add_argument("suite", nargs="?", default="all",
                   choices=("all", "kernel", "focusing", "adequacy", "simulator"))
    _add_format(p)
    return ap


def hyll_main(argv: Optional[List[str]] = None) -> int:
    return _dispatch(hyll_parser(), argv, {"check": cmd_check, "prove": cmd_prove,
                                           "selftest": cmd_selftest})


# ---------------------------------------------------------------------------
# spi


def _load_spi(path):
    from .spi import parse_spi
    prog = parse_spi(_read(path))
    if prog.run is None:
        raise ParseError("file has no 'run' process", 0, 0)
    return prog


def cmd_step(args, out: _Out) -> int:
    from .spi.step import initial_config, transitions
    from .spi.syntax import show
    from .spi.trace import state_of
    prog = _load_spi(args.file)
    cfg, _ = initial_config(prog.env, prog.rates, prog.run)
    steps = []
    for k in range(args.count):
        ts = transitions(prog.env, cfg)
        out.text(f"state {k}: {show(state_of(cfg))}")
        if not ts:
            out.text("  no enabled reactions")
            break
        for i, t in enumerate(ts):
            out.text(f"  [{i}] {t.event} -> {show(state_of(t.target))}")
        steps.append({"state": show(state_of(cfg)),
                      "enabled": [{"event": str(t.event), "target": show(state_of(t.target))}
                                  for t in ts]})
        cfg = ts[0].target
    out.set(steps=steps)
    return OK


def cmd_encode(args, out: _Out) -> int:
    from .spi.encode import canonical_sequent, encode_env, encode_proc, interaction_theory
    from .syntax import show as pshow
    prog = _load_spi(args.file)
    env = [print_judgement(j) for j in encode_env(prog.env)]
    inter = print_judgement(interaction_theory())
    proc = pshow(encode_proc(prog.run), unicode_shifts=False)
    seq, table = canonical_sequent(prog.env, prog.rates, prog.run, prog.run,
                                   inter_copies=args.inter_copies)
    out.set(environment=env, inter=inter, process=proc, canonical=str(seq),
            rates={x: fmt_rational(r) for x, r in table.items()})
    for line in env:
        out.text(f"env    {line}")
    out.text(f"inter  {inter}")
    out.text(f"proc   {proc}")
    out.text(f"canonical sequent:\n  {seq}")
    return OK


def cmd_certify(args, out: _Out) -> int:
    from .focusing.calculus import check_focused
    from .spi.adequacy import phase_log, trace_to_derivation
    from .spi.syntax import SpiError
    from .spi.trace import TraceError, check_worlds, load_trace
    prog = _load_spi(args.file)
    try:
        trace, worlds = load_trace(_read(args.trace))
    except TraceError as e:
        _err(str(e), args.trace)
        return USAGE
    bad = next((f"channel {x}: trace says rate {fmt_rational(r)}, program says "
                f"{fmt_rational(prog.rates[x])}" for x, r in trace.rates.items()
                if x in prog.rates and prog.rates[x] != r), None)
    trace.rates = {**trace.rates, **prog.rates}
    bad = bad or check_worlds(trace, worlds)
    if bad:
        out.text(f"not certified: {bad}")
        out.set(ok=False, reason=bad)
        return FAIL
    try:
        cert = trace_to_derivation(prog.env, trace, inter_copies=args.inter_copies)
    except SpiError as e:
        out.text(f"not certified: {e}")
        out.set(ok=False, reason=str(e))
        return FAIL
    rep = check_focused(cert.proof)
    out.set(ok=rep.ok, events=len(trace.events), nodes=sum(1 for _ in cert.proof.nodes()),
            reason=rep.reason)
    if not rep.ok:
        out.text(f"not certified: derivation fails at {rep.path} ({rep.rule}): {rep.reason}")
        return FAIL
    out.text(f"certified: {len(trace.events)} events, "
             f"{sum(1 for _ in cert.proof.nodes())} focused rules")
    if args.phases:
        for ph in phase_log(cert.proof):
            out.text(f"  {ph}")
        out.set(phases=phase_log(cert.proof))
    if args.emit:
        from .focusing.calculus import erase
        from .kernel.cert import dump_proof
        _write(args.emit, dump_proof(erase(cert.proof)))
    return OK


def cmd_simulate(args, out: _Out) -> int:
    from .simulator import SimConfig, simulate, simulate_runs
    from .spi.trace import dump_trace
    prog = _load_spi(args.file)
    cfg = SimConfig(args.seed, args.steps, args.stop_time, args.certify)
    if args.runs:
        reps = simulate_runs(prog.env, prog.rates, prog.run, cfg, args.runs)
        failed = 0
        for k, r in enumerate(reps.runs):
            if args.out:
                _write(f"{args.out}.{k}", dump_trace(r.trace, r.delays))
            if cfg.certify and not r.certified:
                failed += 1
        total = sum(reps.frequencies.values()) or 1
        out.text(f"{args.runs} runs, {total} events")
        for ev, n in sorted(reps.frequencies.items(), key=lambda e: (-e[1], e[0])):
            out.text(f"  {n:8d}  {n / total:8.4f}  {ev}")
        out.set(runs=args.runs, frequencies=dict(reps.frequencies),
                mean_time=sum(r.total_time for r in reps.runs) / args.runs,
                certified_failures=failed if cfg.certify else None)
        return FAIL if failed else OK
    r = simulate(prog.env, prog.rates, prog.run, cfg)
    text = dump_trace(r.trace, r.delays)
    if args.out:
        _write(args.out, text)
    out.text(f"{len(r.trace.events)} events in {r.total_time:.6g} time units ({r.reason})")
    for e, d in zip(r.trace.events, r.delays):
        out.text(f"  +{d:.6g}  {e}")
    out.set(events=[str(e) for e in r.trace.events], delays=r.delays, total_time=r.total_time,
            stopped=r.reason)
    if cfg.certify:
        ok = bool(r.certified)
        out.text(f"certified: {ok}" + ("" if ok else f" ({r.certified.reason})"))
        out.set(certified=ok)
        if not ok:
            return FAIL
    if not args.out:
        out.text(text.rstrip("\n"))
    return OK


def spi_parser():
    ap = argparse.ArgumentParser(prog="spi", description="stochastic pi-calculus tools")
    sub = ap.add_subparsers(dest="cmd", required=True)
    p = sub.add_parser("step", help="show enabled reactions, following the first")
    p.add_argument("file")
    p.add_argument("--count", type=int, default=1)
    _add_format(p)
    p = sub.add_parser("encode", help="print the HyLL encoding")
    p.add_argument("file")
    p.add_argument("--inter-copies", type=int, metavar="N",
                   help="N linear copies of inter instead of one unrestricted copy")
    _add_format(p)
    p = sub.add_parser("certify", help="check a trace by building its derivation")
    p.add_argument("file")
    p.add_argument("trace")
    p.add_argument("--phases", action="store_true", help="print the derivation's phase log")
    p.add_argument("--emit", metavar="PATH", help="write the erased kernel certificate")
    p.add_argument("--inter-copies", type=int, metavar="N",
                   help="certify with N linear copies of inter (N = number of events)")
    _add_format(p)
    p = sub.add_parser("simulate", help="stochastic simulation")
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--stop-time", type=float)
    p.add_argument("--certify", action="store_true")
    p.add_argument("--runs", type=int, default=0, help="replications (per-run traces to OUT.k)")
    p.add_argument("--out", help="trace file")
    _add_format(p)
    return ap


def spi_main(argv: Optional[List[str]] = None) -> int:
    return _dispatch(spi_parser(), argv, {"step": cmd_step, "encode": cmd_encode,
                                          "certify": cmd_certify, "simulate": cmd_simulate})


def _dispatch(ap, argv, table) -> int:
    from .spi.syntax import SpiError
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    out = _Out(args.format)
    try:
        status = table[args.cmd](args, out)
    except (ParseError, WorldError) as e:
        _err(str(e), getattr(args, "file", None))
        return USAGE
    except SpiError as e:
        _err(str(e), getattr(args, "file", None))
        return USAGE
    except (OSError, ValueError) as e:
        _err(str(e))
        return USAGE
    return out.finish(status)


def main():  # pragma: no cover
    sys.exit(hyll_main())


if __name__ == "__main__":  # pragma: no cover
    main()
