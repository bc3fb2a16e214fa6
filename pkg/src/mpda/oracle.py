"""Explicit breadth-first exploration, used both as a decision procedure on
small instances and as an independent cross-check for the other deciders."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .model import (
    Configuration,
    Mpda,
    OccurrenceId,
    Witness,
    descendant_forest,
    occurrences_of,
    parent_map,
    relevant_occurrences,
    successors,
    trace,
)
from .regsets import RegSet, member


class SourceNotInL(Exception):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_config_size: int
    max_explored: int = 100_000
    max_depth: int | None = None


@dataclass(frozen=True)
class OracleVerdict:
    status: str  # "reachable" | "unreachable-complete" | "unreachable-budget"
    witness: Witness | None = None
    explored: int = 0
    # true when some generated configuration exceeded max_config_size and was
    # not expanded; the search space was truncated at that size
    truncated: bool = field(default=False, compare=False)

    @property
    def reachable(self) -> bool:
        return self.status == "reachable"

    @property
    def complete(self) -> bool:
        return self.status == "unreachable-complete"


def bfs_reach(
    m: Mpda,
    source: Configuration,
    targets: Callable[[Configuration], bool],
    budget: OracleBudget,
) -> OracleVerdict:
    """Breadth-first search from `source`, returning a shortest witness.

    Configurations larger than the size cap are generated and tested against
    the target but never expanded.  The unreachable verdict is "complete"
    when neither the exploration cap nor the depth cap cut a node; the
    `truncated` flag records whether the size cap shaped the search space."""
    if targets(source):
        return OracleVerdict("reachable", Witness(source, ()), explored=1)
    parent: dict[Configuration, tuple[Configuration, object]] = {}
    depth = {source: 0}
    queue = deque([source])
    seen = {source}
    truncated = False
    hard_cut = False

    def witness_to(c: Configuration) -> Witness:
        steps = []
        while c in parent:
            prev, rule = parent[c]
            steps.append(rule)
            c = prev
        steps.reverse()
        return Witness(c, tuple(steps))

    while queue:
        cur = queue.popleft()
        succ = successors(m, cur)
        if cur.size > budget.max_config_size:
            if succ:
                truncated = True
            continue
        if budget.max_depth is not None and depth[cur] >= budget.max_depth:
            if any(nc not in seen for _, nc in succ):
                hard_cut = True
            continue
        for rule, nc in succ:
            if nc in seen:
                continue
            if len(seen) >= budget.max_explored:
                hard_cut = True
                break
            seen.add(nc)
            parent[nc] = (cur, rule)
            depth[nc] = depth[cur] + 1
            if targets(nc):
                return OracleVerdict("reachable", witness_to(nc), explored=len(seen), truncated=truncated)
            queue.append(nc)
        if hard_cut:
            break
    status = "unreachable-budget" if hard_cut else "unreachable-complete"
    return OracleVerdict(status, None, explored=len(seen), truncated=truncated)


def reach_config(m: Mpda, source: Configuration, target: Configuration, budget: OracleBudget) -> OracleVerdict:
    return bfs_reach(m, source, lambda c: c == target, budget)


def reach_regset(m: Mpda, source: Configuration, K: RegSet, budget: OracleBudget) -> OracleVerdict:
    return bfs_reach(m, source, lambda c: member(K, c), budget)


def shortest_path_length(
    m: Mpda,
    source: Configuration,
    target: Configuration,
    budget: OracleBudget,
) -> int | OracleVerdict:
    """Length of a shortest rule sequence from source to target, or the
    (unreachable) verdict."""
    verdict = reach_config(m, source, target, budget)
    if verdict.reachable:
        assert verdict.witness is not None
        return len(verdict.witness.steps)
    return verdict


def is_fully_active(m: Mpda, w: Witness) -> bool:
    """Every occurrence of the start configuration has a descendant that is
    consumed by some step of the witness."""
    forest = descendant_forest(m, w)
    parents = parent_map(forest)
    active_roots: set[OccurrenceId] = set()
    for t, rule in enumerate(w.steps):
        occ = OccurrenceId(t, rule.pop.stack, 0)
        while occ in parents:
            occ = parents[occ]
        active_roots.add(occ)
    return set(occurrences_of(w.start, 0)) <= active_roots


def shrink_source(m: Mpda, w: Witness, L: RegSet) -> Configuration:
    """Remove irrelevant material from the start of a witness while staying
    inside L.

    Positions whose occurrences are irrelevant to the witness can be deleted
    without breaking reachability of the final configuration; deletions are
    chosen by pumping between repeated per-stack NFA state-set labels, and
    membership in L is re-checked after every deletion."""
    if not member(L, w.start):
        raise SourceNotInL(f"{w.start} is not in the given set")
    relevant = relevant_occurrences(m, w)
    comp = L.components[w.start.state]
    stacks: list[list[tuple[object, bool]]] = [
        [(sym, OccurrenceId(0, i, d) in relevant) for d, sym in enumerate(word)]
        for i, word in enumerate(w.start.stacks)
    ]

    def as_config() -> Configuration:
        return Configuration(w.start.state, tuple(tuple(sym for sym, _ in st) for st in stacks))

    changed = True
    while changed:
        changed = False
        for i, st in enumerate(stacks):
            nfa = comp.nfas[i]
            labels = [frozenset(nfa.initials)]
            for sym, _ in st:
                labels.append(nfa.step_set(labels[-1], sym))
            # delete a label-repeating infix made of irrelevant positions only
            done = False
            for a in range(len(st)):
                for b in range(a + 1, len(st) + 1):
                    if labels[a] != labels[b]:
                        continue
                    if any(rel for _, rel in st[a:b]):
                        continue
                    saved = st[a:b]
                    del st[a:b]
                    if member(L, as_config()):
                        changed = True
                    else:
                        st[a:a] = saved  # defensive; label equality should preserve membership
                        continue
                    done = True
                    break
                if done:
                    break
    return as_config()
