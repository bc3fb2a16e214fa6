"""Core model of multi-pushdown systems.

A machine has a finite control, k stacks with pairwise-disjoint alphabets,
and rules that pop one symbol from one stack and push a word on every stack.
Stacks are stored top-first: index 0 of a stack word is the top symbol.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple


class MpdaError(Exception):
    pass


class NotEnabled(MpdaError):
    """The rule does not fire at the given configuration."""


class InvalidWitness(MpdaError):
    def __init__(self, index: int, reason: str = ""):
        self.index = index
        super().__init__(f"witness step {index} is not enabled" + (f": {reason}" if reason else ""))


_FORBIDDEN = set(" \t|:#()")


def check_token(tok: str) -> str:
    if not tok or any(ch in _FORBIDDEN for ch in tok) or not tok.isprintable():
        raise MpdaError(f"bad identifier {tok!r}")
    if tok.startswith("~"):
        raise MpdaError(f"identifiers may not start with '~': {tok!r}")
    return tok


@dataclass(frozen=True, order=True)
class StackSymbol:
    """A stack symbol; symbols of different stacks never compare equal."""

    name: str
    stack: int

    def __str__(self) -> str:
        return self.name


Word = tuple[StackSymbol, ...]


@dataclass(frozen=True)
class TransitionRule:
    src: str
    pop: StackSymbol
    dst: str
    push: tuple[Word, ...]

    @property
    def rhs_size(self) -> int:
        return sum(len(w) for w in self.push)

    @property
    def changes_state(self) -> bool:
        return self.src != self.dst

    def __str__(self) -> str:
        parts = " | ".join(" ".join(s.name for s in w) for w in self.push)
        return f"rule {self.src} {self.pop.name} -> {self.dst} : {parts}"


@dataclass(frozen=True)
class Mpda:
    states: tuple[str, ...]
    alphabets: tuple[tuple[StackSymbol, ...], ...]
    rules: tuple[TransitionRule, ...]

    def __post_init__(self):
        if len(self.states) < 1:
            raise MpdaError("at least one state required")
        if len(self.alphabets) < 1:
            raise MpdaError("at least one stack required")
        if len(set(self.states)) != len(self.states):
            raise MpdaError("duplicate state")
        seen: dict[str, StackSymbol] = {}
        for i, alpha in enumerate(self.alphabets):
            for sym in alpha:
                check_token(sym.name)
                if sym.stack != i:
                    raise MpdaError(f"symbol {sym.name} declared on stack {i + 1} but indexed {sym.stack + 1}")
                if sym.name in seen:
                    raise MpdaError(f"symbol {sym.name} declared on two stacks")
                seen[sym.name] = sym
        if not any(self.alphabets):
            raise MpdaError("all stack alphabets are empty")
        for st in self.states:
            check_token(st)
        states = set(self.states)
        symbols = set(seen.values())
        for r in self.rules:
            if r.src not in states or r.dst not in states:
                raise MpdaError(f"rule references undeclared state: {r}")
            if r.pop not in symbols:
                raise MpdaError(f"rule pops undeclared symbol: {r}")
            if len(r.push) != self.stack_count:
                raise MpdaError(f"rule pushes on {len(r.push)} stacks, expected {self.stack_count}: {r}")
            for i, w in enumerate(r.push):
                for sym in w:
                    if sym.stack != i or sym not in symbols:
                        raise MpdaError(f"rule pushes {sym.name} on wrong stack: {r}")
        object.__setattr__(self, "_symbols_by_name", seen)
        by_pop: dict[tuple[str, StackSymbol], list[TransitionRule]] = {}
        for r in self.rules:
            by_pop.setdefault((r.src, r.pop), []).append(r)
        object.__setattr__(self, "_rules_by_pop", by_pop)

    @property
    def stack_count(self) -> int:
        return len(self.alphabets)

    def symbol(self, name: str) -> StackSymbol:
        try:
            return self._symbols_by_name[name]  # type: ignore[attr-defined]
        except KeyError:
            raise MpdaError(f"unknown symbol {name!r}") from None

    def rules_for(self, state: str, pop: StackSymbol) -> tuple[TransitionRule, ...]:
        return tuple(self._rules_by_pop.get((state, pop), ()))  # type: ignore[attr-defined]

    def empty_configuration(self, state: str) -> "Configuration":
        return Configuration(state, tuple(() for _ in range(self.stack_count)))


@dataclass(frozen=True)
class Configuration:
    """Control state plus one word per stack; stacks[i][0] is the top of stack i."""

    state: str
    stacks: tuple[Word, ...]

    @property
    def size(self) -> int:
        return sum(len(w) for w in self.stacks)

    def __str__(self) -> str:
        return f"{self.state} : " + " | ".join(" ".join(s.name for s in w) for w in self.stacks)


@dataclass(frozen=True)
class Witness:
    """A replayable path: a start configuration and the rules fired, in order."""

    start: Configuration
    steps: tuple[TransitionRule, ...]

    def __len__(self) -> int:
        return len(self.steps)


class OccurrenceId(NamedTuple):
    """One symbol occurrence in one configuration of a replayed witness."""

    config_index: int
    stack: int
    depth: int


def step(m: Mpda, c: Configuration, r: TransitionRule) -> Configuration:
    """Fire rule r at c, or raise NotEnabled."""
    if c.state != r.src:
        raise NotEnabled(f"state {c.state} != {r.src}")
    i = r.pop.stack
    if not c.stacks[i] or c.stacks[i][0] != r.pop:
        raise NotEnabled(f"{r.pop.name} is not on top of stack {i + 1}")
    new_stacks = []
    for j, w in enumerate(c.stacks):
        rest = w[1:] if j == i else w
        new_stacks.append(r.push[j] + rest)
    return Configuration(r.dst, tuple(new_stacks))


def enabled(m: Mpda, c: Configuration, r: TransitionRule) -> bool:
    i = r.pop.stack
    return c.state == r.src and bool(c.stacks[i]) and c.stacks[i][0] == r.pop


def successors(m: Mpda, c: Configuration) -> list[tuple[TransitionRule, Configuration]]:
    """All enabled rules with their results, in rule declaration order."""
    out = []
    for r in m.rules:
        if enabled(m, c, r):
            out.append((r, step(m, c, r)))
    return out


def replay(m: Mpda, w: Witness) -> Configuration:
    c = w.start
    for i, r in enumerate(w.steps):
        try:
            c = step(m, c, r)
        except NotEnabled as e:
            raise InvalidWitness(i, str(e)) from None
    return c


def trace(m: Mpda, w: Witness) -> list[Configuration]:
    """All configurations visited by the witness, start included."""
    cs = [w.start]
    for i, r in enumerate(w.steps):
        try:
            cs.append(step(m, cs[-1], r))
        except NotEnabled as e:
            raise InvalidWitness(i, str(e)) from None
    return cs


def occurrences_of(c: Configuration, config_index: int) -> list[OccurrenceId]:
    return [
        OccurrenceId(config_index, i, d)
        for i, w in enumerate(c.stacks)
        for d in range(len(w))
    ]


def descendant_forest(m: Mpda, w: Witness) -> dict[OccurrenceId, tuple[OccurrenceId, ...]]:
    """Parent-to-children map over all symbol occurrences along the witness.

    The occurrence popped at step t parents all fresh occurrences of the next
    configuration; every surviving occurrence parents its shifted copy.
    Roots are exactly the occurrences of the start configuration.
    """
    configs = trace(m, w)
    children: dict[OccurrenceId, list[OccurrenceId]] = {}
    for t, c in enumerate(configs):
        for occ in occurrences_of(c, t):
            children[occ] = []
    for t, r in enumerate(w.steps):
        c = configs[t]
        i = r.pop.stack
        involved = OccurrenceId(t, i, 0)
        for j in range(m.stack_count):
            for d in range(len(r.push[j])):
                children[involved].append(OccurrenceId(t + 1, j, d))
        for j in range(m.stack_count):
            shift = len(r.push[j])
            first = 1 if j == i else 0
            for d in range(first, len(c.stacks[j])):
                children[OccurrenceId(t, j, d)].append(OccurrenceId(t + 1, j, d - first + shift))
    return {occ: tuple(cs) for occ, cs in children.items()}


def parent_map(forest: dict[OccurrenceId, tuple[OccurrenceId, ...]]) -> dict[OccurrenceId, OccurrenceId]:
    return {child: p for p, cs in forest.items() for child in cs}


def involved_occurrences(m: Mpda, w: Witness) -> list[OccurrenceId]:
    """The occurrence consumed by each step, in step order."""
    return [OccurrenceId(t, r.pop.stack, 0) for t, r in enumerate(w.steps)]


def relevant_occurrences(m: Mpda, w: Witness) -> set[OccurrenceId]:
    """Occurrences with a descendant in the final configuration or in a
    state-changing step.  Closed under the ancestor relation by construction."""
    forest = descendant_forest(m, w)
    parents = parent_map(forest)
    final_index = len(w.steps)
    base: list[OccurrenceId] = occurrences_of(trace(m, w)[-1], final_index)
    for t, r in enumerate(w.steps):
        if r.changes_state:
            base.append(OccurrenceId(t, r.pop.stack, 0))
    relevant: set[OccurrenceId] = set()
    todo = list(base)
    while todo:
        occ = todo.pop()
        if occ in relevant:
            continue
        relevant.add(occ)
        if occ in parents:
            todo.append(parents[occ])
    return relevant


def higman_leq(u: Word, v: Word) -> bool:
    """True iff u is a (scattered) subsequence of v."""
    it = iter(v)
    return all(x in it for x in u)


def bf_higman_leq(c1: Configuration, c2: Configuration) -> bool:
    """Bottom-fixed embedding: states equal; per stack, equal bottom symbols
    and the remaining prefixes embed, or both stacks empty."""
    if c1.state != c2.state:
        return False
    for w1, w2 in zip(c1.stacks, c2.stacks):
        if not w1 and not w2:
            continue
        if not w1 or not w2 or w1[-1] != w2[-1]:
            return False
        if not higman_leq(w1[:-1], w2[:-1]):
            return False
    return True


def words_over(alphabet: tuple[StackSymbol, ...], length: int) -> Iterator[Word]:
    yield from itertools.product(alphabet, repeat=length)


def all_configurations(m: Mpda, max_size: int, states: tuple[str, ...] | None = None) -> Iterator[Configuration]:
    """Every configuration of size at most max_size, ordered by
    (state, size, stack words)."""
    if states is None:
        states = tuple(sorted(m.states))
    for state in states:
        for total in range(max_size + 1):
            batch = []
            for lens in _compositions(total, m.stack_count):
                for words in itertools.product(*(words_over(m.alphabets[i], lens[i]) for i in range(m.stack_count))):
                    batch.append(Configuration(state, tuple(words)))
            batch.sort(key=lambda c: tuple(tuple(s.name for s in w) for w in c.stacks))
            yield from batch


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail
