"""Unreachability certificates for strongly normed machines.

A regular set M separates L from a backward-closed view of K when it
contains K, misses L, and is closed under one-step predecessors.  The
decider interleaves a positive search (explicit exploration from small
members of L) with two negative strategies: iterating the predecessor
operator on K until it converges, and a canonical enumeration of candidate
separators built from small complete per-stack automata."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .model import Configuration, Mpda, StackSymbol, Witness
from .oracle import OracleBudget, reach_regset
from .regsets import (
    Component,
    RegSet,
    StackNfa,
    TooLarge,
    complement,
    enumerate_members,
    intersect,
    is_empty,
    is_subset,
    member,
    pre_image,
    union,
)


@dataclass(frozen=True)
class CheckFailure:
    reason: str  # "misses-target" | "touches-source" | "not-backward-closed"
    example: Configuration | None


@dataclass
class SeparatorCertificate:
    separator: RegSet

    def verify(self, m: Mpda, L: RegSet, K: RegSet) -> bool:
        return check_separator(m, L, K, self.separator) is None


def check_separator(m: Mpda, L: RegSet, K: RegSet, M: RegSet) -> CheckFailure | None:
    """None when M certifies that no member of L reaches K; otherwise the
    failed condition with a small counterexample where one exists."""
    if not is_subset(K, M):
        bad = next(iter(enumerate_members(intersect(K, complement(M, m)), 4)), None)
        return CheckFailure("misses-target", bad)
    meet = intersect(L, M)
    if not is_empty(meet):
        bad = next(iter(enumerate_members(meet, 4)), None)
        return CheckFailure("touches-source", bad)
    pre = pre_image(m, M)
    if not is_subset(pre, M):
        bad = next(iter(enumerate_members(intersect(pre, complement(M, m)), 4)), None)
        return CheckFailure("not-backward-closed", bad)
    return None


@dataclass(frozen=True)
class FixpointResult:
    converged: bool
    result: RegSet
    rounds: int


def backward_fixpoint(m: Mpda, K: RegSet, max_rounds: int = 6) -> FixpointResult:
    """Iterate M <- M + pre(M) starting from K; converged when a round adds
    nothing new (then M is exactly the set of configurations reaching K)."""
    cur = K
    for rnd in range(1, max_rounds + 1):
        nxt = union(cur, pre_image(m, cur))
        if is_subset(nxt, cur):
            return FixpointResult(True, cur, rnd)
        cur = nxt
    return FixpointResult(False, cur, max_rounds)


# ----------------------------------------------------- candidate enumeration

def _complete_dfas(alphabet: tuple[StackSymbol, ...], n: int) -> Iterator[StackNfa]:
    names = tuple(f"d{i}" for i in range(n))
    keys = [(s, a) for s in names for a in alphabet]
    for targets in itertools.product(range(n), repeat=len(keys)):
        edges = frozenset((s, a, names[t]) for (s, a), t in zip(keys, targets))
        yield StackNfa(names, frozenset({names[0]}), edges)


def _components_of_size(m: Mpda, n: int) -> Iterator[Component | None]:
    yield None  # no component: the state contributes nothing
    names = tuple(f"d{i}" for i in range(n))
    tuples = list(itertools.product(names, repeat=m.stack_count))
    for nfas in itertools.product(*(_complete_dfas(alpha, n) for alpha in m.alphabets)):
        for k in range(1, len(tuples) + 1):
            for accept in itertools.combinations(tuples, k):
                yield Component(tuple(nfas), frozenset(accept))


def candidate_separators(m: Mpda, signature_size: int = 3) -> Iterator[RegSet]:
    """Candidate regular sets in canonical order: growing automaton size,
    then transition tables and accepting tuples lexicographically.
    Candidates that agree on all configurations of size <= signature_size
    with an earlier candidate are skipped."""
    seen_signatures: set[tuple[bool, ...]] = set()
    probe = None
    for n in itertools.count(1):
        for assignment in itertools.product(*( _components_of_size(m, n) for _ in m.states)):
            comps = {q: comp for q, comp in zip(m.states, assignment) if comp is not None}
            cand = RegSet(m, comps)
            if probe is None:
                from .model import all_configurations

                probe = list(all_configurations(m, signature_size))
            sig = tuple(member(cand, c) for c in probe)
            if sig in seen_signatures:
                continue
            seen_signatures.add(sig)
            yield cand


# ----------------------------------------------------------------- decider

@dataclass(frozen=True)
class SeparatorBudget:
    rounds: int = 6
    fixpoint_rounds: int = 6
    candidates_per_round: int = 64
    explored_per_round: int = 2000


@dataclass
class SeparatorResult:
    status: str  # "reachable" | "unreachable" | "unknown"
    witness: Witness | None = None
    certificate: SeparatorCertificate | None = None


def decide_separator(m: Mpda, L: RegSet, K: RegSet, budget: SeparatorBudget | None = None) -> SeparatorResult:
    """Semi-decider for L -->* K on strongly normed machines.

    Interleaves positive rounds (oracle runs from ever-larger members of L
    with growing budgets) with negative rounds (predecessor fixpoint first,
    then canonical candidate separators).  Returns unknown when the budget
    runs out."""
    budget = budget or SeparatorBudget()
    base_size = 1
    for comp in K.components.values():
        base_size = max(base_size, max((len(n.states) for n in comp.nfas), default=1))
    tried_sources: set[Configuration] = set()
    candidates = candidate_separators(m)
    fixpoint_done = False
    for rnd in range(1, budget.rounds + 1):
        # positive: explore from small members of L
        src_cap = rnd + 1
        oracle_budget = OracleBudget(
            max_config_size=src_cap + base_size + rnd,
            max_explored=budget.explored_per_round * rnd,
        )
        for s in enumerate_members(L, src_cap):
            if s in tried_sources:
                continue
            verdict = reach_regset(m, s, K, oracle_budget)
            if verdict.reachable:
                return SeparatorResult("reachable", witness=verdict.witness)
            if verdict.complete and not verdict.truncated:
                tried_sources.add(s)  # settled for good; retry the rest with bigger budgets
        # negative: fixpoint once, then candidate separators
        try:
            if not fixpoint_done:
                fixpoint_done = True
                fp = backward_fixpoint(m, K, budget.fixpoint_rounds)
                if fp.converged and is_empty(intersect(L, fp.result)):
                    return SeparatorResult("unreachable", certificate=SeparatorCertificate(fp.result))
            else:
                for cand in itertools.islice(candidates, budget.candidates_per_round):
                    if check_separator(m, L, K, cand) is None:
                        return SeparatorResult("unreachable", certificate=SeparatorCertificate(cand))
        except TooLarge:
            pass  # negative side stalled; keep trying the positive side
    return SeparatorResult("unknown")
