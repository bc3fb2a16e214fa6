"""Command line front end.

Every command prints one JSON record (machine-readable run report) followed
by a short human summary.  Exit codes for `reach`: 0 reachable,
1 unreachable, 2 unknown / out of budget, 3 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import classify as cls
from . import formats, gadgets, marked, oracle, regsets, separator, wqo
from .model import Configuration, Mpda, MpdaError, Witness, replay


class CliError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e}") from None


def _load_mpda(path: str) -> Mpda:
    return formats.parse_mpda(_read(path))


def _endpoint(spec: str, m: Mpda):
    """A reachability endpoint: '@file.regset' or an inline configuration."""
    if spec.startswith("@"):
        return formats.parse_regset(_read(spec[1:]), m)
    return formats.parse_configuration(spec, m)


def _report(record: dict, summary: str) -> None:
    print(json.dumps(record, sort_keys=True))
    print(summary)


# ----------------------------------------------------------------- classify

def cmd_classify(args) -> int:
    m = _load_mpda(args.machine)
    wk = cls.is_weak(m)
    sn = cls.is_strongly_normed(m)
    record = {
        "command": "classify",
        "weak": wk.weak,
        "strongly_normed": sn.strongly_normed,
    }
    lines = []
    if wk.weak:
        lines.append("weak: yes (state order: " + " >= ".join(wk.order or ()) + ")")
        record["state_order"] = list(wk.order or ())
    else:
        lines.append("weak: no (cycle: " + " -> ".join(wk.cycle or ()) + ")")
        record["cycle"] = list(wk.cycle or ())
    if sn.strongly_normed:
        lines.append("strongly normed: yes")
    else:
        q, sym = sn.failure  # type: ignore[misc]
        lines.append(f"strongly normed: no ({sym.name} cannot be erased in state {q})")
        record["strong_norm_failure"] = [q, sym.name]
    if wk.weak:
        nm = cls.is_normed(m)
        record["normed"] = nm.normed
        if nm.normed:
            lines.append("normed: yes")
        else:
            q, sym = nm.failure  # type: ignore[misc]
            lines.append(f"normed: no ({sym.name} stuck in state {q})")
            record["norm_failure"] = [q, sym.name]
    else:
        record["normed"] = None
        lines.append("normed: not checked (machine is not weak)")
    _report(record, "\n".join(lines))
    return 0


# -------------------------------------------------------------------- reach

def _pick_method(m: Mpda, src, tgt) -> str:
    weak = cls.is_weak(m).weak
    strongly = cls.is_strongly_normed(m).strongly_normed
    if strongly and weak:
        return "marked"
    if weak and isinstance(tgt, Configuration):
        return "wqo"
    if strongly:
        return "separator"
    return "oracle"


def cmd_reach(args) -> int:
    m = _load_mpda(args.machine)
    src = _endpoint(args.src, m)
    tgt = _endpoint(args.to, m)
    method = args.method
    if method == "auto":
        method = _pick_method(m, src, tgt)
    started = time.perf_counter()
    witness: Witness | None = None
    extra: dict = {}
    if method == "oracle":
        if not isinstance(src, Configuration):
            raise CliError("the oracle needs a single source configuration (use --method marked or separator)")
        budget = oracle.OracleBudget(
            max_config_size=args.max_size if args.max_size is not None else src.size + 6,
            max_explored=args.max_explored,
        )
        if isinstance(tgt, Configuration):
            verdict = oracle.reach_config(m, src, tgt, budget)
        else:
            verdict = oracle.reach_regset(m, src, tgt, budget)
        status = {"reachable": "reachable", "unreachable-complete": "unreachable", "unreachable-budget": "unknown"}[verdict.status]
        witness = verdict.witness
        extra = {"explored": verdict.explored, "truncated": verdict.truncated}
    elif method == "marked":
        if isinstance(src, Configuration) and isinstance(tgt, Configuration):
            res = marked.decide_marked(m, src, tgt)
            status = "reachable" if res.reachable else "unreachable"
            if res.reachable:
                witness = marked.reconstruct(m, src, res)
            extra = {"size_bound": res.size_bound}
        else:
            L = src if not isinstance(src, Configuration) else regsets.singleton(m, src)
            K = tgt if not isinstance(tgt, Configuration) else regsets.singleton(m, tgt)
            rr = marked.decide_regreg(m, L, K, src_cap=args.src_cap, tgt_cap=args.tgt_cap)
            status = "reachable" if rr.reachable else "unreachable"
            witness = rr.witness
            extra = {"src_cap": rr.src_cap, "tgt_cap": rr.tgt_cap}
    elif method == "wqo":
        if not isinstance(tgt, Configuration):
            raise CliError("--method wqo needs a single target configuration")
        if isinstance(src, Configuration):
            status = "reachable" if wqo.decide_wqo(m, src, tgt) else "unreachable"
        else:
            res = wqo.decide_reg_to_one(m, src, tgt, src_cap=args.src_cap)
            status = "reachable" if res.reachable else "unreachable"
            extra = {"src_cap": res.src_cap}
            if res.source is not None:
                extra["source"] = str(res.source)
    elif method == "separator":
        L = src if not isinstance(src, Configuration) else regsets.singleton(m, src)
        K = tgt if not isinstance(tgt, Configuration) else regsets.singleton(m, tgt)
        sres = separator.decide_separator(m, L, K)
        status = {"reachable": "reachable", "unreachable": "unreachable", "unknown": "unknown"}[sres.status]
        witness = sres.witness
        if sres.certificate is not None and args.certificate:
            Path(args.certificate).write_text(formats.serialize_regset(sres.certificate.separator))
            extra["certificate_file"] = args.certificate
    else:
        raise CliError(f"unknown method {method!r}")
    elapsed = time.perf_counter() - started
    record = {
        "command": "reach",
        "method": method,
        "status": status,
        "wall_time": round(elapsed, 4),
        **extra,
    }
    summary = f"{status} (method {method}, {elapsed:.2f}s)"
    if witness is not None:
        record["witness_length"] = len(witness.steps)
        summary += f"; witness of length {len(witness.steps)}"
        if args.witness:
            Path(args.witness).write_text(formats.serialize_witness(witness))
            record["witness_file"] = args.witness
    _report(record, summary)
    return {"reachable": 0, "unreachable": 1, "unknown": 2}[status]


# ---------------------------------------------------------------------- gen

def cmd_gen(args) -> int:
    fam = args.family
    if fam == "anbncn":
        inst = gadgets.anbncn()
    elif fam.startswith("expo:"):
        inst = gadgets.expo(int(fam.split(":", 1)[1]))
    elif fam == "nonreg-forward":
        inst = gadgets.nonreg_forward()
    elif fam == "cfg-intersection":
        if not args.grammar1 or not args.grammar2:
            raise CliError("cfg-intersection needs --grammar1 and --grammar2")
        g1 = gadgets.parse_grammar(_read(args.grammar1))
        g2 = gadgets.parse_grammar(_read(args.grammar2))
        inst = gadgets.cfg_intersection(g1, g2)
    elif fam == "comm-free":
        if not args.spec:
            raise CliError("comm-free needs --spec")
        inst = _comm_free_from_spec(_read(args.spec))
    else:
        raise CliError(f"unknown family {fam!r} (try anbncn, expo:N, nonreg-forward, cfg-intersection, comm-free)")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "machine.mpda").write_text(formats.serialize_mpda(inst.mpda))
    (out / "source.cfg").write_text(formats.serialize_configuration(inst.source) + "\n")
    (out / "target.regset").write_text(formats.serialize_regset(inst.target))
    _report(
        {"command": "gen", "family": inst.name, "out": str(out)},
        f"wrote machine.mpda, source.cfg, target.regset for {inst.name} to {out}",
    )
    return 0


def _comm_free_from_spec(text: str) -> gadgets.GadgetInstance:
    """Spec lines: 'source: n1 ... nk', 'target: n1 ... nk' and counter rules
    'rule i : a1 ... ak' (consume one token of counter i, add aj to counter j)."""
    source = target = None
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("source:"):
            source = tuple(int(x) for x in line.split(":", 1)[1].split())
        elif line.startswith("target:"):
            target = tuple(int(x) for x in line.split(":", 1)[1].split())
        elif line.startswith("rule"):
            head, _, body = line.partition(":")
            rules.append((int(head.split()[1]), tuple(int(x) for x in body.split())))
        else:
            raise CliError(f"counter spec line {lineno}: unrecognized line")
    if source is None or target is None:
        raise CliError("counter spec needs 'source:' and 'target:' lines")
    return gadgets.comm_free_counters(tuple(rules), source, target)


# ------------------------------------------------------------------- regset

def cmd_regset(args) -> int:
    m = _load_mpda(args.machine)
    op = args.op

    def load(path: str):
        return formats.parse_regset(_read(path), m)

    if op == "member":
        L = load(args.args[0])
        c = formats.parse_configuration(args.args[1], m)
        res = regsets.member(L, c)
        _report({"command": "regset", "op": op, "member": res}, "member" if res else "not a member")
        return 0
    if op in ("union", "intersect"):
        L, M = load(args.args[0]), load(args.args[1])
        R = regsets.union(L, M) if op == "union" else regsets.intersect(L, M)
        text = formats.serialize_regset(R)
        if args.out:
            Path(args.out).write_text(text)
            _report({"command": "regset", "op": op, "out": args.out}, f"wrote {args.out}")
        else:
            print(text, end="")
        return 0
    if op == "complement":
        R = regsets.complement(load(args.args[0]), m, budget=args.budget)
        text = formats.serialize_regset(R)
        if args.out:
            Path(args.out).write_text(text)
            _report({"command": "regset", "op": op, "out": args.out}, f"wrote {args.out}")
        else:
            print(text, end="")
        return 0
    if op == "is-empty":
        res = regsets.is_empty(load(args.args[0]))
        _report({"command": "regset", "op": op, "empty": res}, "empty" if res else "nonempty")
        return 0
    if op == "is-subset":
        res = regsets.is_subset(load(args.args[0]), load(args.args[1]), budget=args.budget)
        _report({"command": "regset", "op": op, "subset": res}, "subset" if res else "not a subset")
        return 0
    if op == "enumerate":
        L = load(args.args[0])
        max_size = int(args.args[1])
        members = [str(c) for c in regsets.enumerate_members(L, max_size)]
        _report({"command": "regset", "op": op, "members": members}, "\n".join(members) or "(no members)")
        return 0
    raise CliError(f"unknown regset op {op!r}")


# ---------------------------------------------------------------------- pre

def cmd_pre(args) -> int:
    m = _load_mpda(args.machine)
    M = formats.parse_regset(_read(args.set), m)
    R = regsets.pre_image(m, M)
    text = formats.serialize_regset(R)
    if args.out:
        Path(args.out).write_text(text)
        _report({"command": "pre", "out": args.out}, f"wrote {args.out}")
    else:
        print(text, end="")
    return 0


# ------------------------------------------------------------------- shrink

def cmd_shrink(args) -> int:
    m = _load_mpda(args.machine)
    w = formats.parse_witness(_read(args.witness), m)
    L = formats.parse_regset(_read(args.set), m)
    replay(m, w)  # validate before shrinking
    shrunk = oracle.shrink_source(m, w, L)
    record = {
        "command": "shrink",
        "before": str(w.start),
        "after": str(shrunk),
        "removed": w.start.size - shrunk.size,
    }
    _report(record, f"{w.start}  =>  {shrunk}  ({record['removed']} symbols removed)")
    return 0


# --------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mpda", description="multi-pushdown reachability toolkit")
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("classify", help="check weakness and normedness")
    c.add_argument("machine")
    c.set_defaults(fn=cmd_classify)

    r = sub.add_parser("reach", help="decide reachability between endpoints")
    r.add_argument("machine")
    r.add_argument("--from", dest="src", required=True, help="configuration literal or @file.regset")
    r.add_argument("--to", required=True, help="configuration literal or @file.regset")
    r.add_argument("--method", choices=("oracle", "marked", "wqo", "separator", "auto"), default="auto")
    r.add_argument("--max-size", type=int, default=None, help="oracle size cap")
    r.add_argument("--max-explored", type=int, default=100_000)
    r.add_argument("--src-cap", type=int, default=None)
    r.add_argument("--tgt-cap", type=int, default=None)
    r.add_argument("--witness", help="write the witness to this file")
    r.add_argument("--certificate", help="write a separator certificate to this file")
    r.set_defaults(fn=cmd_reach)

    g = sub.add_parser("gen", help="generate a benchmark family instance")
    g.add_argument("family", help="anbncn | expo:N | nonreg-forward | cfg-intersection | comm-free")
    g.add_argument("--out", required=True)
    g.add_argument("--grammar1")
    g.add_argument("--grammar2")
    g.add_argument("--spec")
    g.set_defaults(fn=cmd_gen)

    s = sub.add_parser("regset", help="operations on regular configuration sets")
    s.add_argument("machine")
    s.add_argument("op", choices=("member", "union", "intersect", "complement", "is-empty", "is-subset", "enumerate"))
    s.add_argument("args", nargs="*")
    s.add_argument("--out")
    s.add_argument("--budget", type=int, default=regsets.DEFAULT_DET_BUDGET)
    s.set_defaults(fn=cmd_regset)

    pr = sub.add_parser("pre", help="one-step predecessor set")
    pr.add_argument("machine")
    pr.add_argument("set")
    pr.add_argument("--out")
    pr.set_defaults(fn=cmd_pre)

    sh = sub.add_parser("shrink", help="drop irrelevant source material of a witness")
    sh.add_argument("machine")
    sh.add_argument("--witness", required=True)
    sh.add_argument("--set", required=True, help="regular set the source must stay in")
    sh.set_defaults(fn=cmd_shrink)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, formats.ParseError, MpdaError, cls.NotWeak, cls.NotStronglyNormed,
            regsets.TooLarge, oracle.SourceNotInL, gadgets.BadGrammar, IndexError, ValueError) as e:
        print(json.dumps({"command": args.cmd, "error": str(e)}), file=sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
