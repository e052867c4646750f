from __future__ import annotations

import pytest

from costreach import rprs, saturation
from costreach.nfa import EPS, words_upto


@pytest.fixture(scope="module")
def sat(basic):
    return saturation.saturate(rprs.annotate(basic))


def test_skeleton_shape(basic):
    sk = saturation.skeleton(rprs.annotate(basic))
    # prefix chains for words of length <= 2 on both sides
    assert len([q for q in sk.automaton_1.states if q[0] == "pre"]) == 7
    assert len(sk.shared_states) == 4
    assert sk.automaton_1.eps_count() == 4 and sk.automaton_2.eps_count() == 4


def test_example_system_fixpoint(sat):
    assert sat.passes == 2
    assert (sat.automaton_1.eps_count(), sat.automaton_2.eps_count()) == (74, 127)
    again = sat.automaton_1.snapshot()
    assert saturation.saturation_pass(sat) == 0
    assert sat.automaton_1.snapshot() == again


def test_only_epsilon_transitions_added(basic, sat):
    sk = saturation.skeleton(rprs.annotate(basic))
    letters = lambda n: {t for t in n.transitions() if t[1] is not EPS}  # noqa: E731
    assert letters(sat.automaton_1) == letters(sk.automaton_1)
    assert letters(sat.automaton_2) == letters(sk.automaton_2)
    for p, a, q, _ in sat.automaton_1.transitions():
        if a is EPS and p[0] == "rule":
            assert q in sat.automaton_1.states


def test_single_rule_witness(basic, sat):
    m = sat.monoid
    ws = sat.witnesses(("a",), ())
    assert ((1, None, None),) in ws
    assert all(m.max_entry(w) >= 1 for w in ws)
    assert ((0, None, None),) in sat.witnesses(("b",), ("a",))
    assert sat.witnesses((), ("a",)) == []


def test_witness_soundness_and_completeness(basic, sat):
    aps = rprs.annotate(basic)
    m = aps.monoid
    W = list(words_upto(basic.alphabet, 3))
    for u in W:
        prof = rprs.reachable_profiles(basic, u, 7, 4, aps)
        for v in W:
            if u == v:
                continue
            ws = sat.witnesses(u, v)
            # every path profile is dominated by a witness
            for p in prof.get(v, ()):
                assert any(m.leq(w, p) for w in ws), (u, v, p)
            # every witness is realised by a path at most as expensive
            for w in ws:
                if m.max_entry(w) <= 4:
                    assert any(m.leq(p, w) for p in prof.get(v, ())), (u, v, w)


def test_restricted_saturation_terminates(basic):
    sr = saturation.saturate(rprs.annotate_restricted(basic))
    for _, _, _, vec in sr.automaton_1.transitions():
        assert sr.monoid.max_entry(vec) <= 1


def test_other_systems_terminate(systems_dir):
    for name in ("two_counters.rprs", "pairs.rprs"):
        s = rprs.load_system(str(systems_dir / name))
        sr = saturation.saturate(rprs.annotate(s), max_passes=20)
        assert sr.passes <= 20


def test_dot_export(sat):
    dot = saturation.to_dot(sat)
    assert dot.startswith("digraph") and dot.rstrip().endswith("}")
    assert "q(a,\\\"\\\",i)" in dot or "q(a," in dot
