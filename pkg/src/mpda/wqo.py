"""Reachability of a single target in weak machines, via colored exploration.

Configurations carry a color bit per symbol occurrence.  Colored occurrences
stand for material that is irrelevant to the target and may be dropped by the
embedding order; the number of uncolored occurrences stays below
|states| + size(target), which makes the order a well-quasi-order and the
depth-first search finite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .classify import is_weak, NotWeak
from .model import Configuration, Mpda, StackSymbol, TransitionRule

# one colored stack entry: (symbol, colored?)
CSym = tuple[StackSymbol, bool]
CWord = tuple[CSym, ...]


@dataclass(frozen=True)
class ColoredConfiguration:
    state: str
    stacks: tuple[CWord, ...]

    @property
    def uncolored_count(self) -> int:
        return sum(1 for w in self.stacks for _, col in w if not col)

    @property
    def size(self) -> int:
        return sum(len(w) for w in self.stacks)

    def __str__(self) -> str:
        def render(w: CWord) -> str:
            return " ".join(("~" if col else "") + s.name for s, col in w)

        return f"{self.state} : " + " | ".join(render(w) for w in self.stacks)


def color_all(c: Configuration, colored: bool = False) -> ColoredConfiguration:
    return ColoredConfiguration(c.state, tuple(tuple((s, colored) for s in w) for w in c.stacks))


def colored_leq(a: ColoredConfiguration, b: ColoredConfiguration) -> bool:
    """a is b with some colored occurrences removed.  Greedy per-stack check:
    skipped positions of b must be colored, matched positions must agree on
    both symbol and color."""
    if a.state != b.state:
        return False
    for wa, wb in zip(a.stacks, b.stacks):
        i = 0
        for entry in wb:
            if i < len(wa) and entry == wa[i]:
                i += 1
            elif not entry[1]:
                return False
        if i < len(wa):
            return False
    return True


def colored_successors(
    m: Mpda,
    r: ColoredConfiguration,
    uncolored_limit: int | None = None,
    allow_vacuous_empty: bool = False,
) -> list[ColoredConfiguration]:
    """One colored step.

    Popping a colored occurrence pushes everything colored and is only
    allowed for state-preserving rules: the occurrence consumed by a
    state-changing step always carries relevance, so it can never be a
    colored one.  Popping an uncolored occurrence allows any coloring of the
    pushed symbols, except that a state-preserving rule must leave at least
    one push uncolored; in particular a state-preserving rule that pushes
    nothing has no uncolored-pop variant (set allow_vacuous_empty to lift
    this)."""
    out = []
    for i, w in enumerate(r.stacks):
        if not w:
            continue
        top_sym, top_col = w[0]
        for rule in m.rules_for(r.state, top_sym):
            if top_col:
                if rule.changes_state:
                    continue
                pushes = tuple(tuple((s, True) for s in rule.push[j]) for j in range(m.stack_count))
                out.append(_apply(r, rule, i, pushes))
                continue
            positions = [(j, p) for j in range(m.stack_count) for p in range(len(rule.push[j]))]
            for colored_set in _subsets(positions):
                if not rule.changes_state and not allow_vacuous_empty:
                    if len(colored_set) == len(positions):
                        continue  # must keep one push uncolored
                pushes = tuple(
                    tuple((rule.push[j][p], (j, p) in colored_set) for p in range(len(rule.push[j])))
                    for j in range(m.stack_count)
                )
                nxt = _apply(r, rule, i, pushes)
                if uncolored_limit is None or nxt.uncolored_count < uncolored_limit:
                    out.append(nxt)
    # colored-pop variants above bypass the limit check; apply it uniformly
    if uncolored_limit is not None:
        out = [c for c in out if c.uncolored_count < uncolored_limit]
    return out


def _apply(r: ColoredConfiguration, rule: TransitionRule, i: int, pushes: tuple[CWord, ...]) -> ColoredConfiguration:
    stacks = []
    for j, w in enumerate(r.stacks):
        rest = w[1:] if j == i else w
        stacks.append(pushes[j] + rest)
    return ColoredConfiguration(rule.dst, tuple(stacks))


def _subsets(items):
    for k in range(len(items) + 1):
        yield from (frozenset(c) for c in itertools.combinations(items, k))


def source_colorings(s: Configuration, uncolored_limit: int):
    """All colorings of s with fewer than uncolored_limit uncolored symbols."""
    positions = [(i, p) for i, w in enumerate(s.stacks) for p in range(len(w))]
    seen = set()
    max_uncolored = min(len(positions), uncolored_limit - 1)
    for k in range(max_uncolored + 1):
        for keep in itertools.combinations(positions, k):
            kept = set(keep)
            c = ColoredConfiguration(
                s.state,
                tuple(
                    tuple((sym, (i, p) not in kept) for p, sym in enumerate(w))
                    for i, w in enumerate(s.stacks)
                ),
            )
            if c not in seen:
                seen.add(c)
                yield c


def decide_wqo(
    m: Mpda,
    s: Configuration,
    t: Configuration,
    allow_vacuous_empty: bool = False,
) -> bool:
    """Exact reachability s -->* t for a weak machine and a single target.

    Depth-first search over colored configurations; a new node is skipped
    when some already-seen node embeds into it (anything it could contribute
    is then reachable from the smaller node as well)."""
    wk = is_weak(m)
    if not wk.weak:
        raise NotWeak(f"state cycle: {' -> '.join(wk.cycle or ())}")
    limit = len(m.states) + t.size
    target = color_all(t, colored=False)
    seen: list[ColoredConfiguration] = []
    seen_set: set[ColoredConfiguration] = set()

    def subsumed(c: ColoredConfiguration) -> bool:
        return c in seen_set or any(colored_leq(v, c) for v in seen)

    for root in source_colorings(s, limit):
        if subsumed(root):
            continue
        stack = [root]
        while stack:
            cur = stack.pop()
            if cur == target:
                return True
            if cur in seen_set:
                continue
            seen.append(cur)
            seen_set.add(cur)
            for nxt in colored_successors(m, cur, uncolored_limit=limit, allow_vacuous_empty=allow_vacuous_empty):
                if nxt == target:
                    return True
                if not subsumed(nxt):
                    stack.append(nxt)
    return False


@dataclass(frozen=True)
class RegToOneResult:
    reachable: bool
    source: Configuration | None
    src_cap: int


def default_src_cap(L, t: Configuration) -> int:
    """Size bound on candidate sources drawn from a regular set."""
    n_states = len(L.mpda.states)
    n_l = max((len(nfa.states) for comp in L.components.values() for nfa in comp.nfas), default=0)
    return (t.size + n_states) * (n_l + 1) + n_l * L.mpda.stack_count


def decide_reg_to_one(m: Mpda, L, t: Configuration, src_cap: int | None = None) -> RegToOneResult:
    """Reachability of a single target from some member of a regular set,
    by trying candidate sources up to a size cap."""
    from .regsets import enumerate_members

    cap = src_cap if src_cap is not None else default_src_cap(L, t)
    for s in enumerate_members(L, cap):
        if decide_wqo(m, s, t):
            return RegToOneResult(True, s, cap)
    return RegToOneResult(False, None, cap)
