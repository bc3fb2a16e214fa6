"""Structural classification of a machine.

weak            control states admit a partial order that every rule descends
normed          every configuration can be emptied (possibly changing state)
strongly normed every configuration can be emptied without changing state

Strong normedness comes with a cancel table: for each state q and symbol X, a
replayable state-preserving rule sequence that removes a topmost X together
with everything it spawns.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Configuration, Mpda, StackSymbol, TransitionRule, Witness, replay


class NotWeak(Exception):
    pass


class NotStronglyNormed(Exception):
    pass


@dataclass(frozen=True)
class WeaknessResult:
    weak: bool
    # weak: states listed from top to bottom, so every rule goes rightwards
    order: tuple[str, ...] | None
    # not weak: a cycle of states through state-changing rules
    cycle: tuple[str, ...] | None


def is_weak(m: Mpda) -> WeaknessResult:
    """Check that the graph of state-changing rules is acyclic."""
    succ: dict[str, set[str]] = {q: set() for q in m.states}
    for r in m.rules:
        if r.changes_state:
            succ[r.src].add(r.dst)
    indeg = {q: 0 for q in m.states}
    for q, outs in succ.items():
        for t in outs:
            indeg[t] += 1
    order = []
    ready = [q for q in m.states if indeg[q] == 0]
    while ready:
        q = ready.pop(0)
        order.append(q)
        for t in sorted(succ[q]):
            indeg[t] -= 1
            if indeg[t] == 0:
                ready.append(t)
    if len(order) == len(m.states):
        return WeaknessResult(True, tuple(order), None)
    # find a cycle among the leftover states
    leftover = [q for q in m.states if indeg[q] > 0]
    start = leftover[0]
    path = [start]
    seen = {start}
    cur = start
    while True:
        cur = next(t for t in sorted(succ[cur]) if indeg[t] > 0)
        if cur in seen:
            cycle = path[path.index(cur):] + [cur]
            return WeaknessResult(False, None, tuple(cycle))
        seen.add(cur)
        path.append(cur)


CancelTable = dict[tuple[str, StackSymbol], tuple[TransitionRule, ...]]


@dataclass(frozen=True)
class StrongNormResult:
    strongly_normed: bool
    cancel: CancelTable | None
    # not strongly normed: a (state, symbol) pair that cannot be erased in place
    failure: tuple[str, StackSymbol] | None


def is_strongly_normed(m: Mpda) -> StrongNormResult:
    """Least fixpoint of in-state erasability, with witnessing rule choices."""
    chosen: dict[tuple[str, StackSymbol], TransitionRule] = {}
    rounds: dict[tuple[str, StackSymbol], int] = {}
    rnd = 0
    changed = True
    while changed:
        changed = False
        rnd += 1
        for r in m.rules:
            if r.changes_state:
                continue
            key = (r.src, r.pop)
            if key in chosen:
                continue
            if all((r.src, s) in chosen for w in r.push for s in w):
                chosen[key] = r
                rounds[key] = rnd
                changed = True
    for q in m.states:
        for alpha in m.alphabets:
            for sym in alpha:
                if (q, sym) not in chosen:
                    return StrongNormResult(False, None, (q, sym))
    table: CancelTable = {}

    def fragment(key: tuple[str, StackSymbol]) -> tuple[TransitionRule, ...]:
        if key in table:
            return table[key]
        r = chosen[key]
        frag = [r]
        for w in r.push:
            for sym in w:
                frag.extend(fragment((key[0], sym)))
        table[key] = tuple(frag)
        return table[key]

    for key in chosen:
        fragment(key)
    return StrongNormResult(True, table, None)


def cancel_table(m: Mpda) -> CancelTable:
    res = is_strongly_normed(m)
    if not res.strongly_normed:
        q, sym = res.failure  # type: ignore[misc]
        raise NotStronglyNormed(f"symbol {sym.name} cannot be erased in state {q}")
    assert res.cancel is not None
    return res.cancel


def check_cancel_table(m: Mpda, table: CancelTable) -> None:
    """Replay each fragment on a lone symbol and require the empty configuration."""
    for (q, sym), frag in table.items():
        stacks = tuple(
            (sym,) if i == sym.stack else () for i in range(m.stack_count)
        )
        end = replay(m, Witness(Configuration(q, stacks), frag))
        if end != m.empty_configuration(q):
            raise AssertionError(f"cancel fragment for ({q}, {sym.name}) does not erase: ends at {end}")


@dataclass(frozen=True)
class NormResult:
    normed: bool
    failure: tuple[str, StackSymbol] | None


def is_normed(m: Mpda) -> NormResult:
    """A weak machine is normed when every lone symbol can be erased, allowing
    state changes.  Raises NotWeak otherwise."""
    from .wqo import decide_wqo

    wk = is_weak(m)
    if not wk.weak:
        raise NotWeak(f"state cycle: {' -> '.join(wk.cycle or ())}")
    for q in m.states:
        for alpha in m.alphabets:
            for sym in alpha:
                stacks = tuple((sym,) if i == sym.stack else () for i in range(m.stack_count))
                start = Configuration(q, stacks)
                if not any(decide_wqo(m, start, m.empty_configuration(p)) for p in m.states):
                    return NormResult(False, (q, sym))
    return NormResult(True, None)
