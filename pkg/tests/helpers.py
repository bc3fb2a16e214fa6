"""Deterministic random instance generators shared by the test modules."""

import random

from mpda.model import Configuration, Mpda, StackSymbol, TransitionRule, Witness, successors
from mpda.regsets import Component, RegSet, StackNfa


def random_weak_mpda(
    rng: random.Random,
    max_states: int = 3,
    stacks: int = 2,
    max_syms: int = 2,
    max_rules: int = 6,
    rhs_cap: int = 2,
    strongly_normed: bool = False,
    size_nonincreasing: bool = False,
) -> Mpda:
    """A random weak machine.  States are totally ordered and rules never go
    upward.  With strongly_normed=True every (state, symbol) pair gets an
    in-state eraser rule first, which caps how many states/symbols fit into
    the rule budget."""
    while True:
        n_states = rng.randint(1, max_states)
        counts = [rng.randint(0, max_syms) for _ in range(stacks)]
        if not any(counts):
            continue
        if strongly_normed and n_states * sum(counts) > max_rules:
            continue
        break
    states = tuple(f"q{i}" for i in range(n_states))
    alphabets = tuple(
        tuple(StackSymbol(f"{chr(ord('A') + i)}{j}", i) for j in range(counts[i]))
        for i in range(stacks)
    )
    symbols = [s for alpha in alphabets for s in alpha]
    rules: list[TransitionRule] = []
    if strongly_normed:
        for q in states:
            for sym in symbols:
                rules.append(TransitionRule(q, sym, q, tuple(() for _ in range(stacks))))
    cap = 1 if size_nonincreasing else rhs_cap
    attempts = 0
    while len(rules) < max_rules and attempts < 40:
        attempts += 1
        si = rng.randrange(n_states)
        di = rng.randrange(si, n_states)  # weak: never upward
        pop = rng.choice(symbols)
        rhs_total = rng.randint(0, cap)
        push: list[list[StackSymbol]] = [[] for _ in range(stacks)]
        for _ in range(rhs_total):
            sym = rng.choice(symbols)
            push[sym.stack].append(sym)
        rule = TransitionRule(states[si], pop, states[di], tuple(tuple(w) for w in push))
        if rule not in rules:
            rules.append(rule)
    return Mpda(states, alphabets, tuple(rules))


def random_configuration(rng: random.Random, m: Mpda, max_size: int, state: str | None = None) -> Configuration:
    if state is None:
        state = rng.choice(m.states)
    total = rng.randint(0, max_size)
    stacks: list[list[StackSymbol]] = [[] for _ in range(m.stack_count)]
    nonempty = [i for i in range(m.stack_count) if m.alphabets[i]]
    for _ in range(total):
        i = rng.choice(nonempty)
        stacks[i].append(rng.choice(m.alphabets[i]))
    return Configuration(state, tuple(tuple(w) for w in stacks))


def random_stack_nfa(rng: random.Random, m: Mpda, stack: int, max_states: int = 2) -> StackNfa:
    n = rng.randint(1, max_states)
    names = tuple(f"n{j}" for j in range(n))
    edges = set()
    for s in names:
        for sym in m.alphabets[stack]:
            for t in names:
                if rng.random() < 0.4:
                    edges.add((s, sym, t))
    k = rng.randint(1, n)
    initials = frozenset(rng.sample(names, k))
    return StackNfa(names, initials, frozenset(edges))


def random_regset(rng: random.Random, m: Mpda, max_nfa_states: int = 2) -> RegSet:
    comps = {}
    for state in m.states:
        if rng.random() < 0.3:
            continue
        nfas = tuple(random_stack_nfa(rng, m, i, max_nfa_states) for i in range(m.stack_count))
        tuples = set()
        for _ in range(rng.randint(1, 3)):
            tuples.add(tuple(rng.choice(nfa.states) for nfa in nfas))
        comps[state] = Component(nfas, frozenset(tuples))
    return RegSet(m, comps)


def random_walk(rng: random.Random, m: Mpda, start: Configuration, max_steps: int) -> Witness:
    steps = []
    cur = start
    for _ in range(max_steps):
        succ = successors(m, cur)
        if not succ:
            break
        rule, cur = rng.choice(succ)
        steps.append(rule)
    return Witness(start, tuple(steps))
