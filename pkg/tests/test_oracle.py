import random

import pytest

from mpda.gadgets import anbncn, expo, nonreg_forward
from mpda.model import Configuration, Witness, replay
from mpda.oracle import (
    OracleBudget,
    SourceNotInL,
    bfs_reach,
    is_fully_active,
    reach_config,
    reach_regset,
    shortest_path_length,
    shrink_source,
)
from mpda.regsets import Component, RegSet, StackNfa, member, singleton, union
from mpda.wqo import decide_wqo

from helpers import random_configuration, random_regset, random_walk, random_weak_mpda


def cfg(m, state, *stacks):
    return Configuration(state, tuple(tuple(m.symbol(n) for n in w.split()) for w in stacks))


class TestBfs:
    def test_reachable_with_shortest_witness(self):
        inst = anbncn()
        v = reach_config(inst.mpda, inst.source, cfg(inst.mpda, "q2", "", ""), OracleBudget(6))
        assert v.reachable
        assert replay(inst.mpda, v.witness) == cfg(inst.mpda, "q2", "", "")
        assert len(v.witness.steps) == 2  # X -> eps, then D -> q2

    def test_unreachable_complete_under_size_cap(self):
        inst = anbncn()
        v = reach_config(inst.mpda, inst.source, cfg(inst.mpda, "q2", "X", ""), OracleBudget(6))
        assert v.status == "unreachable-complete"
        assert v.truncated  # the size cap did cut growing configurations

    def test_source_already_target(self):
        inst = anbncn()
        v = reach_config(inst.mpda, inst.source, inst.source, OracleBudget(6))
        assert v.reachable and len(v.witness.steps) == 0

    def test_explored_budget_gives_unknown(self):
        inst = expo(5)
        tgt = cfg(inst.mpda, "q", "X5")
        v = reach_config(inst.mpda, inst.source, tgt, OracleBudget(max_config_size=40, max_explored=5))
        assert v.status == "unreachable-budget"

    def test_depth_budget(self):
        inst = anbncn()
        v = reach_config(
            inst.mpda, inst.source, cfg(inst.mpda, "q2", "", ""),
            OracleBudget(max_config_size=6, max_depth=1),
        )
        assert v.status == "unreachable-budget"

    def test_regset_target(self):
        inst = anbncn()
        v = reach_regset(inst.mpda, inst.source, inst.target, OracleBudget(6))
        assert v.reachable

    def test_no_truncation_when_sizes_shrink(self):
        # every rule of this walk-down fragment has rhs_size <= 1
        rng = random.Random(3)
        for _ in range(10):
            m = random_weak_mpda(rng, size_nonincreasing=True)
            s = random_configuration(rng, m, 3)
            t = random_configuration(rng, m, 3)
            v = reach_config(m, s, t, OracleBudget(max_config_size=s.size))
            assert not v.truncated
            assert v.status in ("reachable", "unreachable-complete")


class TestShortestPath:
    def test_expo_lengths(self):
        for n, want in ((2, 2), (3, 6), (4, 14)):
            inst = expo(n)
            tgt = cfg(inst.mpda, "q", f"X{n}")
            got = shortest_path_length(inst.mpda, inst.source, tgt, OracleBudget(2 ** n, max_explored=10 ** 6))
            assert got == want

    def test_returns_verdict_when_unreachable(self):
        inst = anbncn()
        got = shortest_path_length(inst.mpda, inst.source, cfg(inst.mpda, "q2", "X", ""), OracleBudget(6))
        assert not isinstance(got, int)
        assert got.status == "unreachable-complete"


class TestFullyActive:
    def test_all_consumed(self):
        inst = anbncn()
        m = inst.mpda
        w = Witness(cfg(m, "q1", "X D", ""), (m.rules[1], m.rules[3]))
        assert is_fully_active(m, w)

    def test_survivor_is_not_active(self):
        inst = anbncn()
        m = inst.mpda
        w = Witness(cfg(m, "q1", "X D", ""), (m.rules[1],))  # D survives untouched
        assert not is_fully_active(m, w)

    def test_descendant_consumption_counts(self):
        # X is popped; the C it pushed earlier is consumed later
        inst = anbncn()
        m = inst.mpda
        w = Witness(cfg(m, "q1", "X D", ""), (m.rules[0], m.rules[1], m.rules[2], m.rules[3], m.rules[4]))
        assert is_fully_active(m, w)


class TestShrink:
    def make_padded_set(self, m):
        """All configurations at q1 whose stack 1 ends in D, stack 2 free."""
        x, b, d, c = m.symbol("X"), m.symbol("B"), m.symbol("D"), m.symbol("C")
        nfa1 = StackNfa(
            ("p", "f"),
            frozenset({"p"}),
            frozenset({("p", x, "p"), ("p", b, "p"), ("p", d, "p"), ("p", d, "f")}),
        )
        nfa2 = StackNfa(("u",), frozenset({"u"}), frozenset({("u", c, "u")}))
        return RegSet(m, {"q1": Component((nfa1, nfa2), frozenset({("f", "u")}))})

    def test_irrelevant_padding_removed(self):
        inst = anbncn()
        m = inst.mpda
        L = self.make_padded_set(m)
        # padded source: the B's and the C are never needed for the final state
        w = Witness(cfg(m, "q1", "X B B D", "C"), (m.rules[1], m.rules[2], m.rules[2], m.rules[3]))
        assert replay(m, w) == cfg(m, "q2", "", "C")
        shrunk = shrink_source(m, w, L)
        assert member(L, shrunk)
        assert shrunk.size < w.start.size
        # the shrunken source still reaches the same final configuration
        v = reach_config(m, shrunk, replay(m, w), OracleBudget(8))
        assert v.reachable

    def test_relevant_material_kept(self):
        inst = anbncn()
        m = inst.mpda
        L = self.make_padded_set(m)
        w = Witness(cfg(m, "q1", "X D", ""), (m.rules[1], m.rules[3]))
        shrunk = shrink_source(m, w, L)
        # X is popped in-state leaving nothing, so it is irrelevant and goes;
        # D drives the state change and must stay
        assert shrunk == cfg(m, "q1", "D", "")
        v = reach_config(m, shrunk, replay(m, w), OracleBudget(6))
        assert v.reachable

    def test_source_not_in_set(self):
        inst = anbncn()
        m = inst.mpda
        L = self.make_padded_set(m)
        w = Witness(cfg(m, "q2", "", "C"), ())
        with pytest.raises(SourceNotInL):
            shrink_source(m, w, L)

    def test_random_yes_instances(self):
        rng = random.Random(42)
        done = 0
        while done < 40:
            m = random_weak_mpda(rng, strongly_normed=True)
            s = random_configuration(rng, m, 4)
            w = random_walk(rng, m, s, 6)
            if not w.steps:
                continue
            L = union(singleton(m, s), random_regset(rng, m))
            shrunk = shrink_source(m, w, L)
            assert member(L, shrunk)
            assert decide_wqo(m, shrunk, replay(m, w))
            done += 1
