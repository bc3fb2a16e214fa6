"""Plain-text formats for machines, configurations, witnesses and regular sets.

All formats share a lexical layer: '#' starts a comment that runs to end of
line, tokens are whitespace-separated, and '{', '}', '(', ')', '|', ':' and
';' are tokens of their own.  Parse errors carry 1-based line numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    Configuration,
    Mpda,
    StackSymbol,
    TransitionRule,
    Witness,
    Word,
    check_token,
    MpdaError,
)
from .regsets import Component, RegSet, StackNfa


class ParseError(Exception):
    def __init__(self, line: int, msg: str):
        self.line = line
        super().__init__(f"line {line}: {msg}")


def _strip_comment(line: str) -> str:
    pos = line.find("#")
    return line if pos < 0 else line[:pos]


_PUNCT = "{}();:"


def _tokenize(text: str) -> list[tuple[str, int]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        for ch in _PUNCT:
            line = line.replace(ch, f" {ch} ")
        for tok in line.split():
            out.append((tok, lineno))
    return out


class _Tokens:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    @property
    def line(self) -> int:
        if self.pos < len(self.toks):
            return self.toks[self.pos][1]
        return self.toks[-1][1] if self.toks else 1

    def peek(self) -> str | None:
        return self.toks[self.pos][0] if self.pos < len(self.toks) else None

    def next(self, what: str = "token") -> str:
        if self.pos >= len(self.toks):
            raise ParseError(self.line, f"unexpected end of input, expected {what}")
        tok, _ = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next(repr(tok))
        if got != tok:
            raise ParseError(self.line, f"expected {tok!r}, got {got!r}")

    def done(self) -> None:
        if self.pos < len(self.toks):
            raise ParseError(self.line, f"trailing input starting at {self.toks[self.pos][0]!r}")


def _ident(ts: _Tokens, what: str) -> str:
    tok = ts.next(what)
    try:
        check_token(tok)
    except MpdaError as e:
        raise ParseError(ts.line, str(e)) from None
    return tok


def _is_arrow(tok: str) -> bool:
    # a rule arrow is '->', optionally carrying an ignored label: '-lbl->'
    return tok == "->" or (tok.startswith("-") and tok.endswith("->") and len(tok) > 3)


# ---------------------------------------------------------------- machines

def parse_mpda(text: str) -> Mpda:
    lines = text.splitlines()
    states: list[str] | None = None
    stack_count: int | None = None
    alphabets: dict[int, list[str]] = {}
    rule_lines: list[tuple[int, list[str]]] = []
    opened = closed = False
    for lineno, raw in enumerate(lines, start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if not opened:
            if line.replace(" ", "") != "mpda{" and line.split() != ["mpda", "{"]:
                raise ParseError(lineno, "expected 'mpda {'")
            opened = True
            continue
        if closed:
            raise ParseError(lineno, "content after closing '}'")
        if line == "}":
            closed = True
            continue
        key, _, rest = line.partition(":")
        key_parts = key.split()
        if key_parts[:1] == ["states"] and len(key_parts) == 1:
            if states is not None:
                raise ParseError(lineno, "duplicate 'states:' line")
            states = rest.split()
            if not states:
                raise ParseError(lineno, "empty state list")
        elif key_parts[:1] == ["stacks"] and len(key_parts) == 1:
            if stack_count is not None:
                raise ParseError(lineno, "duplicate 'stacks:' line")
            try:
                stack_count = int(rest.strip())
            except ValueError:
                raise ParseError(lineno, f"bad stack count {rest.strip()!r}") from None
            if stack_count < 1:
                raise ParseError(lineno, "stack count must be positive")
        elif key_parts[:1] == ["alphabet"]:
            if len(key_parts) != 2:
                raise ParseError(lineno, "expected 'alphabet <index>: ...'")
            try:
                idx = int(key_parts[1])
            except ValueError:
                raise ParseError(lineno, f"bad stack index {key_parts[1]!r}") from None
            if idx in alphabets:
                raise ParseError(lineno, f"duplicate alphabet for stack {idx}")
            alphabets[idx] = rest.split()
        elif line.split()[:1] == ["rule"]:
            rule_lines.append((lineno, line.split()))
        else:
            raise ParseError(lineno, f"unrecognized line {line.split()[0]!r}")
    if not opened:
        raise ParseError(len(lines) or 1, "expected 'mpda {'")
    if not closed:
        raise ParseError(len(lines) or 1, "missing closing '}'")
    if states is None:
        raise ParseError(1, "missing 'states:' line")
    if stack_count is None:
        raise ParseError(1, "missing 'stacks:' line")
    if set(alphabets) != set(range(1, stack_count + 1)):
        raise ParseError(1, f"need alphabets for stacks 1..{stack_count}, got {sorted(alphabets)}")
    try:
        alpha = tuple(
            tuple(StackSymbol(name, i) for name in alphabets[i + 1])
            for i in range(stack_count)
        )
        sym_by_name: dict[str, StackSymbol] = {}
        for stack_syms in alpha:
            for s in stack_syms:
                sym_by_name[s.name] = s

        rules = []
        for lineno, toks in rule_lines:
            rules.append(_parse_rule_tokens(toks, lineno, stack_count, sym_by_name))
        return Mpda(tuple(states), alpha, tuple(rules))
    except MpdaError as e:
        raise ParseError(1, str(e)) from None


def _parse_rule_tokens(
    toks: list[str],
    lineno: int,
    stack_count: int,
    sym_by_name: dict[str, StackSymbol],
) -> TransitionRule:
    # rule <src> <pop> -> <dst> : w1 | w2 | ... | wk
    if len(toks) < 6 or toks[0] != "rule":
        raise ParseError(lineno, "malformed rule line")
    src, pop_name = toks[1], toks[2]
    if not _is_arrow(toks[3]):
        raise ParseError(lineno, f"expected '->', got {toks[3]!r}")
    dst = toks[4]
    if toks[5] != ":":
        raise ParseError(lineno, "expected ':' after target state")
    groups: list[list[str]] = [[]]
    for tok in toks[6:]:
        if tok == "|":
            groups.append([])
        else:
            groups[-1].append(tok)
    if len(groups) != stack_count:
        raise ParseError(lineno, f"rule pushes on {len(groups)} stacks, expected {stack_count}")
    if pop_name not in sym_by_name:
        raise ParseError(lineno, f"unknown symbol {pop_name!r}")
    push: list[Word] = []
    for i, grp in enumerate(groups):
        word = []
        for name in grp:
            if name not in sym_by_name:
                raise ParseError(lineno, f"unknown symbol {name!r}")
            if sym_by_name[name].stack != i:
                raise ParseError(lineno, f"symbol {name!r} pushed on stack {i + 1} but belongs to stack {sym_by_name[name].stack + 1}")
            word.append(sym_by_name[name])
        push.append(tuple(word))
    return TransitionRule(src, sym_by_name[pop_name], dst, tuple(push))


def serialize_mpda(m: Mpda) -> str:
    lines = ["mpda {"]
    lines.append("  states: " + " ".join(m.states))
    lines.append(f"  stacks: {m.stack_count}")
    for i, alpha in enumerate(m.alphabets):
        lines.append(f"  alphabet {i + 1}: " + " ".join(s.name for s in alpha))
    for r in m.rules:
        lines.append("  " + str(r))
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------- configurations

def parse_configuration(text: str, m: Mpda, lineno: int = 1) -> Configuration:
    """Parse a literal like 'q1 : X D |' (one '|' between adjacent stacks)."""
    body = _strip_comment(text).strip()
    state, sep, rest = body.partition(":")
    if not sep:
        raise ParseError(lineno, "expected '<state> : <stacks>'")
    state = state.strip()
    if len(state.split()) != 1:
        raise ParseError(lineno, f"bad state field {state!r}")
    groups = rest.split("|")
    if len(groups) != m.stack_count:
        raise ParseError(lineno, f"configuration has {len(groups)} stacks, expected {m.stack_count}")
    if state not in m.states:
        raise ParseError(lineno, f"unknown state {state!r}")
    stacks: list[Word] = []
    for i, grp in enumerate(groups):
        word = []
        for name in grp.split():
            try:
                sym = m.symbol(name)
            except MpdaError:
                raise ParseError(lineno, f"unknown symbol {name!r}") from None
            if sym.stack != i:
                raise ParseError(lineno, f"symbol {name!r} listed on stack {i + 1} but belongs to stack {sym.stack + 1}")
            word.append(sym)
        stacks.append(tuple(word))
    return Configuration(state, tuple(stacks))


def serialize_configuration(c: Configuration) -> str:
    return str(c)


# ---------------------------------------------------------------- witnesses

def parse_witness(text: str, m: Mpda) -> Witness:
    """A witness file: a configuration literal, then one declared rule per line."""
    start: Configuration | None = None
    steps: list[TransitionRule] = []
    declared = set(m.rules)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if start is None:
            start = parse_configuration(line, m, lineno)
            continue
        toks = line.split()
        sym_by_name = {s.name: s for alpha in m.alphabets for s in alpha}
        rule = _parse_rule_tokens(toks, lineno, m.stack_count, sym_by_name)
        if rule not in declared:
            raise ParseError(lineno, f"rule not declared by the machine: {rule}")
        steps.append(rule)
    if start is None:
        raise ParseError(1, "empty witness file")
    return Witness(start, tuple(steps))


def serialize_witness(w: Witness) -> str:
    lines = [serialize_configuration(w.start)]
    lines.extend(str(r) for r in w.steps)
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------- regular sets

def parse_regset(text: str, m: Mpda) -> RegSet:
    ts = _Tokens(text)
    head = ts.peek()
    if head in ("relaxed", "relaxed-regset"):
        raise ParseError(
            ts.line,
            "relaxed regular sets over the padded product alphabet are not "
            "supported: reachability from them is undecidable; use per-stack "
            "'regset { ... }' blocks",
        )
    ts.expect("regset")
    ts.expect("{")
    components: dict[str, Component] = {}
    while ts.peek() != "}":
        ts.expect("state")
        state = _ident(ts, "state name")
        if state not in m.states:
            raise ParseError(ts.line, f"unknown state {state!r}")
        if state in components:
            raise ParseError(ts.line, f"duplicate component for state {state!r}")
        components[state] = _parse_component(ts, m)
    ts.expect("}")
    ts.done()
    return RegSet(m, components)


def _parse_component(ts: _Tokens, m: Mpda) -> Component:
    ts.expect("{")
    nfas: dict[int, StackNfa] = {}
    accept: set[tuple[str, ...]] = set()
    saw_accept = False
    while ts.peek() != "}":
        tok = ts.next("'nfa' or 'accept'")
        if tok == "nfa":
            idx_tok = ts.next("stack index")
            try:
                idx = int(idx_tok)
            except ValueError:
                raise ParseError(ts.line, f"bad stack index {idx_tok!r}") from None
            if not 1 <= idx <= m.stack_count:
                raise ParseError(ts.line, f"stack index {idx} out of range 1..{m.stack_count}")
            if idx in nfas:
                raise ParseError(ts.line, f"duplicate nfa for stack {idx}")
            nfas[idx] = _parse_nfa(ts, m, idx - 1)
        elif tok == "accept":
            ts.expect(":")
            saw_accept = True
            while ts.peek() == "(":
                ts.expect("(")
                tup = []
                while ts.peek() != ")":
                    tup.append(_ident(ts, "nfa state"))
                ts.expect(")")
                if len(tup) != m.stack_count:
                    raise ParseError(ts.line, f"accepting tuple has {len(tup)} entries, expected {m.stack_count}")
                accept.add(tuple(tup))
        else:
            raise ParseError(ts.line, f"expected 'nfa' or 'accept', got {tok!r}")
    ts.expect("}")
    if set(nfas) != set(range(1, m.stack_count + 1)):
        raise ParseError(ts.line, f"component needs nfas for stacks 1..{m.stack_count}")
    if not saw_accept:
        raise ParseError(ts.line, "component is missing an 'accept:' clause")
    ordered = tuple(nfas[i + 1] for i in range(m.stack_count))
    for tup in accept:
        for i, st in enumerate(tup):
            if st not in ordered[i].states:
                raise ParseError(ts.line, f"accepting tuple uses unknown nfa state {st!r}")
    return Component(ordered, frozenset(accept))


def _parse_nfa(ts: _Tokens, m: Mpda, stack: int) -> StackNfa:
    ts.expect("{")
    states: list[str] | None = None
    initials: list[str] | None = None
    edges: set[tuple[str, StackSymbol, str]] = set()
    while ts.peek() != "}":
        tok = ts.next("'states', 'initial' or 'edge'")
        if tok == "states":
            ts.expect(":")
            states = []
            while ts.peek() not in (";", "}"):
                states.append(_ident(ts, "nfa state"))
        elif tok == "initial":
            ts.expect(":")
            initials = []
            while ts.peek() not in (";", "}"):
                initials.append(_ident(ts, "nfa state"))
        elif tok == "edge":
            src = _ident(ts, "nfa state")
            sym_name = _ident(ts, "symbol")
            dst = _ident(ts, "nfa state")
            try:
                sym = m.symbol(sym_name)
            except MpdaError:
                raise ParseError(ts.line, f"unknown symbol {sym_name!r}") from None
            if sym.stack != stack:
                raise ParseError(ts.line, f"symbol {sym_name!r} belongs to stack {sym.stack + 1}, not {stack + 1}")
            edges.add((src, sym, dst))
        else:
            raise ParseError(ts.line, f"expected 'states', 'initial' or 'edge', got {tok!r}")
        if ts.peek() == ";":
            ts.next()
    ts.expect("}")
    if states is None:
        raise ParseError(ts.line, "nfa is missing a 'states:' clause")
    if initials is None:
        raise ParseError(ts.line, "nfa is missing an 'initial:' clause")
    known = set(states)
    if len(known) != len(states):
        raise ParseError(ts.line, "duplicate nfa state")
    for s in initials:
        if s not in known:
            raise ParseError(ts.line, f"initial state {s!r} not declared")
    for src, _, dst in edges:
        if src not in known or dst not in known:
            raise ParseError(ts.line, "edge uses undeclared nfa state")
    return StackNfa(tuple(states), frozenset(initials), frozenset(edges))


def serialize_regset(L: RegSet) -> str:
    lines = ["regset {"]
    for state in sorted(L.components):
        comp = L.components[state]
        lines.append(f"  state {state} {{")
        for i, nfa in enumerate(comp.nfas):
            parts = ["states: " + " ".join(nfa.states)]
            parts.append("initial: " + " ".join(sorted(nfa.initials)))
            for src, sym, dst in sorted(nfa.edges, key=lambda e: (e[0], e[1].name, e[2])):
                parts.append(f"edge {src} {sym.name} {dst}")
            lines.append(f"    nfa {i + 1} {{ " + " ; ".join(parts) + " }")
        tuples = " ".join("(" + " ".join(t) + ")" for t in sorted(comp.accept))
        lines.append("    accept: " + tuples)
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ marked paths

def serialize_marked_word(word) -> str:
    return " ".join(("~" if ms.marked else "") + ms.base.name for ms in word)
