"""Reachability for strongly normed weak machines via marked abstraction.

A marked subword of a pushed word is obtained by deleting a set of positions
and marking every earlier position; marks flag symbols that are buried under
deleted material and must themselves disappear later.  Searching over marked
configurations of bounded size is complete because sizes never decrease along
state-preserving marked steps and drop by at most one at state changes.
Deleted symbols are re-inserted as concrete canceling sequences when a
witness is rebuilt.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .classify import (
    CancelTable,
    NotStronglyNormed,
    NotWeak,
    cancel_table,
    is_weak,
)
from .model import (
    Configuration,
    Mpda,
    StackSymbol,
    TransitionRule,
    Witness,
    Word,
    replay,
)


class ReconstructionFailed(Exception):
    pass


@dataclass(frozen=True, order=True)
class MarkedSymbol:
    base: StackSymbol
    marked: bool

    def __str__(self) -> str:
        return ("~" if self.marked else "") + self.base.name


MWord = tuple[MarkedSymbol, ...]


@dataclass(frozen=True)
class MarkedConfiguration:
    state: str
    stacks: tuple[MWord, ...]

    @property
    def size(self) -> int:
        return sum(len(w) for w in self.stacks)

    def __str__(self) -> str:
        return f"{self.state} : " + " | ".join(" ".join(map(str, w)) for w in self.stacks)


@dataclass(frozen=True)
class MarkedSubtransition:
    origin: TransitionRule
    lhs_marked: bool
    pushes: tuple[MWord, ...]

    def __str__(self) -> str:
        lhs = ("~" if self.lhs_marked else "") + self.origin.pop.name
        parts = " | ".join(" ".join(map(str, w)) for w in self.pushes)
        return f"rule {self.origin.src} {lhs} -> {self.origin.dst} : {parts}"


def unmarked(c: Configuration) -> MarkedConfiguration:
    return MarkedConfiguration(
        c.state, tuple(tuple(MarkedSymbol(s, False) for s in w) for w in c.stacks)
    )


def mk_subwords(word: Word, colored: frozenset[int] | None = None) -> set[MWord]:
    """All marked subwords of a pushed word.

    A choice deletes a position set D and picks a prefix that covers every
    position followed by a deleted one; prefix positions outside D come out
    marked, the rest unmarked.  With `colored` given, only D = colored is
    considered (the paper-and-pencil view of one fixed deletion set)."""
    n = len(word)
    out: set[MWord] = set()
    deletions = [colored] if colored is not None else [frozenset(c) for k in range(n + 1) for c in itertools.combinations(range(n), k)]
    for d in deletions:
        min_prefix = (max(d) + 1) if d else 0
        for p in range(min_prefix, n + 1):
            result = tuple(
                MarkedSymbol(word[j], j < p)
                for j in range(n)
                if j not in d
            )
            out.add(result)
    return out


_subtrans_cache: dict[tuple[TransitionRule, bool, int], tuple[MarkedSubtransition, ...]] = {}


def subtransitions_for(rule: TransitionRule, lhs_marked: bool, stack_count: int) -> tuple[MarkedSubtransition, ...]:
    """All marked variants of one rule for a fixed mark on the popped symbol.

    A marked pop forces every push on the popped stack to come out marked;
    a state-preserving variant must push at least one symbol somewhere."""
    key = (rule, lhs_marked, stack_count)
    if key in _subtrans_cache:
        return _subtrans_cache[key]
    per_stack: list[list[MWord]] = []
    for j in range(stack_count):
        options = mk_subwords(rule.push[j])
        if lhs_marked and j == rule.pop.stack:
            options = {w for w in options if all(ms.marked for ms in w)}
        per_stack.append(sorted(options))
    out = []
    for combo in itertools.product(*per_stack):
        if not rule.changes_state and sum(len(w) for w in combo) == 0:
            continue
        out.append(MarkedSubtransition(rule, lhs_marked, tuple(combo)))
    _subtrans_cache[key] = tuple(out)
    return _subtrans_cache[key]


def mk_subtransitions(m: Mpda) -> tuple[MarkedSubtransition, ...]:
    out = []
    for rule in m.rules:
        for lhs_marked in (False, True):
            out.extend(subtransitions_for(rule, lhs_marked, m.stack_count))
    return tuple(out)


def marked_subconfigurations(c: Configuration, max_size: int):
    """Marked subconfigurations of c, of size at most max_size."""
    per_stack = [sorted(mk_subwords(w)) for w in c.stacks]
    for combo in itertools.product(*per_stack):
        if sum(len(w) for w in combo) <= max_size:
            yield MarkedConfiguration(c.state, tuple(combo))


@dataclass(frozen=True)
class MarkedSearchResult:
    reachable: bool
    origin: MarkedConfiguration | None = None
    steps: tuple[MarkedSubtransition, ...] = ()
    size_bound: int = 0

    def marked_trace(self) -> list[MarkedConfiguration]:
        assert self.origin is not None
        out = [self.origin]
        for st in self.steps:
            out.append(apply_subtransition(out[-1], st))
        return out


def apply_subtransition(mc: MarkedConfiguration, st: MarkedSubtransition) -> MarkedConfiguration:
    i = st.origin.pop.stack
    top = mc.stacks[i][0]
    assert mc.state == st.origin.src
    assert top.base == st.origin.pop and top.marked == st.lhs_marked
    stacks = []
    for j, w in enumerate(mc.stacks):
        rest = w[1:] if j == i else w
        stacks.append(st.pushes[j] + rest)
    return MarkedConfiguration(st.origin.dst, tuple(stacks))


def decide_marked(
    m: Mpda,
    s: Configuration,
    t: Configuration,
    check_preconditions: bool = True,
) -> MarkedSearchResult:
    """Exact reachability s -->* t for a strongly normed weak machine.

    Breadth-first search over marked configurations of size at most
    size(t) + |states|, seeded with every marked subconfiguration of s."""
    if check_preconditions:
        wk = is_weak(m)
        if not wk.weak:
            raise NotWeak(f"state cycle: {' -> '.join(wk.cycle or ())}")
        cancel_table(m)  # raises NotStronglyNormed
    bound = t.size + len(m.states)
    target = unmarked(t)
    parent: dict[MarkedConfiguration, tuple[MarkedConfiguration, MarkedSubtransition] | None] = {}
    queue: deque[MarkedConfiguration] = deque()
    for u in marked_subconfigurations(s, bound):
        if u not in parent:
            parent[u] = None
            queue.append(u)
    while queue:
        cur = queue.popleft()
        if cur == target:
            steps: list[MarkedSubtransition] = []
            node = cur
            while parent[node] is not None:
                prev, st = parent[node]  # type: ignore[misc]
                steps.append(st)
                node = prev
            steps.reverse()
            return MarkedSearchResult(True, node, tuple(steps), bound)
        for i, w in enumerate(cur.stacks):
            if not w:
                continue
            top = w[0]
            for rule in m.rules_for(cur.state, top.base):
                for st in subtransitions_for(rule, top.marked, m.stack_count):
                    nxt = apply_subtransition(cur, st)
                    if nxt.size > bound or nxt in parent:
                        continue
                    parent[nxt] = (cur, st)
                    queue.append(nxt)
    return MarkedSearchResult(False, size_bound=bound)


# ------------------------------------------------------------ reconstruction

def _coloring_for(word: Word, target: MWord) -> frozenset[int]:
    """A deletion set under which the marking of `word` yields `target`."""
    n = len(word)
    for k in range(n - len(target) + 1):
        for d in itertools.combinations(range(n), k):
            dset = frozenset(d)
            min_prefix = (max(dset) + 1) if dset else 0
            for p in range(min_prefix, n + 1):
                cand = tuple(MarkedSymbol(word[j], j < p) for j in range(n) if j not in dset)
                if cand == target:
                    return dset
    raise ReconstructionFailed(f"{target} is not a marked subword of {word}")


def reconstruct(
    m: Mpda,
    s: Configuration,
    result: MarkedSearchResult,
    cancel: CancelTable | None = None,
) -> Witness:
    """Expand a marked path from s into a concrete witness.

    Deleted symbols are kept as colored occurrences of the running concrete
    configuration and erased with canceling sequences whenever they surface."""
    if not result.reachable or result.origin is None:
        raise ReconstructionFailed("no marked path to expand")
    if cancel is None:
        cancel = cancel_table(m)
    state = s.state
    stacks: list[list[tuple[StackSymbol, bool]]] = []
    for i, w in enumerate(s.stacks):
        d = _coloring_for(w, result.origin.stacks[i])
        stacks.append([(sym, j in d) for j, sym in enumerate(w)])
    fired: list[TransitionRule] = []

    def run_rule(rule: TransitionRule, push_colored: tuple[frozenset[int], ...]) -> None:
        nonlocal state
        i = rule.pop.stack
        if state != rule.src or not stacks[i] or stacks[i][0][0] != rule.pop:
            raise ReconstructionFailed(f"rule not enabled while expanding: {rule}")
        stacks[i].pop(0)
        for j in range(m.stack_count):
            pushed = [(sym, p in push_colored[j]) for p, sym in enumerate(rule.push[j])]
            stacks[j][:0] = pushed
        state = rule.dst
        fired.append(rule)

    def cancel_top(i: int) -> None:
        sym = stacks[i][0][0]
        none = tuple(frozenset() for _ in range(m.stack_count))
        for rule in cancel[(state, sym)]:
            run_rule(rule, none)

    queue = deque(result.steps)
    guard = 0
    while True:
        guard += 1
        if guard > 10_000_000:
            raise ReconstructionFailed("expansion does not terminate")
        colored_top = next((i for i, w in enumerate(stacks) if w and w[0][1]), None)
        if colored_top is not None:
            cancel_top(colored_top)
            continue
        if not queue:
            break
        st = queue.popleft()
        push_colored = tuple(
            _coloring_for(st.origin.push[j], st.pushes[j]) for j in range(m.stack_count)
        )
        run_rule(st.origin, push_colored)

    end = Configuration(state, tuple(tuple(sym for sym, _ in w) for w in stacks))
    if any(col for w in stacks for _, col in w):
        raise ReconstructionFailed("colored material left buried at the end")
    witness = Witness(s, tuple(fired))
    if replay(m, witness) != end:
        raise ReconstructionFailed("expanded witness does not replay")
    return witness


# ------------------------------------------------------- regular endpoints

@dataclass(frozen=True)
class RegRegResult:
    reachable: bool
    source: Configuration | None
    target: Configuration | None
    witness: Witness | None
    src_cap: int
    tgt_cap: int


def default_tgt_cap(K) -> int:
    n_k = max((len(nfa.states) for comp in K.components.values() for nfa in comp.nfas), default=0)
    max_rhs = max((r.rhs_size for r in K.mpda.rules), default=0)
    return (n_k + 1) ** 2 * (len(K.mpda.states) + max_rhs)


def decide_regreg(
    m: Mpda,
    L,
    K,
    src_cap: int | None = None,
    tgt_cap: int | None = None,
) -> RegRegResult:
    """Reachability between two regular sets for strongly normed weak
    machines, by trying endpoint pairs up to size caps."""
    from .regsets import enumerate_members
    from .wqo import default_src_cap

    wk = is_weak(m)
    if not wk.weak:
        raise NotWeak(f"state cycle: {' -> '.join(wk.cycle or ())}")
    cancel = cancel_table(m)
    tcap = tgt_cap if tgt_cap is not None else default_tgt_cap(K)
    used_scap = 0
    for t in enumerate_members(K, tcap):
        scap = src_cap if src_cap is not None else default_src_cap(L, t)
        used_scap = max(used_scap, scap)
        for s in enumerate_members(L, scap):
            res = decide_marked(m, s, t, check_preconditions=False)
            if res.reachable:
                witness = reconstruct(m, s, res, cancel)
                return RegRegResult(True, s, t, witness, scap, tcap)
    return RegRegResult(False, None, None, None, used_scap, tcap)
