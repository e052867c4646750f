from __future__ import annotations

import json
import math

import pytest

from costreach import nfa, reach, rprs
from costreach.nfa import from_regex, words_upto


@pytest.fixture(scope="module")
def eng(basic):
    return reach.engine(basic, "full")


def _set(s, rx):
    return from_regex(rx, s.alphabet)


def test_transducer_sizes(eng):
    assert eng.saturation.passes == 2
    assert (eng.exact.automaton.n_states, len(eng.exact.automaton.transitions)) == (266, 3997)
    assert (eng.approx.automaton.n_states, len(eng.approx.automaton.transitions)) == (81, 1330)


# values from the brute-force oracle
@pytest.mark.parametrize(
    "u,v,expected",
    [("aaa", "", 2), ("b", "a", 0), ("", "a", math.inf), ("a", "", 1), ("ab", "b", 1), ("a", "a", 0)],
)
def test_min_cost(basic, u, v, expected):
    assert reach.min_cost(basic, u, v) == expected


def test_strict_loop_cost(basic):
    assert reach.min_cost(basic, "a", "a", strict=True) == 1
    assert reach.min_cost(basic, "", "", strict=True) == math.inf


def test_approx_bracket_sample(basic, eng):
    for u in words_upto(basic.alphabet, 3):
        for v in words_upto(basic.alphabet, 2):
            exact = eng.min_cost(u, v)
            approx = eng.approx_cost(u, v)
            assert approx <= exact <= 2 * approx + 1


def test_identity_transducer():
    T = reach.identity_transducer(("a", "b"))
    assert T.value(("a", "b"), ("a", "b")) == 0
    assert T.value(("a",), ("a", "b")) == math.inf


def test_running_example_bounded(basic):
    ans = reach.bounded_reach(basic, _set(basic, "a*a"), _set(basic, ""))
    assert (ans.bounded, ans.bound) == (True, 2)
    assert json.dumps(ans.to_dict(), separators=(",", ":")) == '{"verdict":"bounded","bound":2}'


@pytest.mark.parametrize("lhs,rhs", [("a", "b a"), ("b", "a")])
def test_rule_removal_unbounded(basic, lhs, rhs):
    s = basic.without(lhs, rhs)
    A = _set(s, "aa*")
    ans = reach.bounded_reach(s, A, _set(s, ""))
    assert not ans.bounded
    assert A.accepts(ans.counterexample)
    assert ans.to_dict()["counterexample"] == "".join(ans.counterexample)


def test_other_removal_stays_bounded(basic):
    s = basic.without("b", "b b")
    assert reach.bounded_reach(s, _set(s, "aa*"), _set(s, "")).bound == 2


def test_no_path_and_empty_source(basic):
    ans = reach.bounded_reach(basic, _set(basic, "b*"), _set(basic, "a"))
    assert not ans.bounded and ans.counterexample == ()
    assert "no path" in ans.reason
    empty = reach.bounded_reach(basic, nfa.empty(basic.alphabet), _set(basic, "a"))
    assert (empty.bounded, empty.bound) == (True, 0)


def test_all_words_and_strict(basic):
    assert reach.bounded_reach(basic, _set(basic, "(a|b)*"), _set(basic, "")).bound == 2
    assert reach.bounded_reach(basic, _set(basic, "aa*"), _set(basic, ""), strict=True).bound == 2


def test_pairs_system(systems_dir):
    s = rprs.load_system(str(systems_dir / "pairs.rprs"))
    assert reach.bounded_reach(s, _set(s, "(xy)*"), _set(s, "")).bound == 1
    assert not reach.bounded_reach(s, _set(s, "x*"), _set(s, "")).bounded


def test_alphabet_mismatch(basic):
    with pytest.raises(ValueError):
        reach.bounded_reach(basic, from_regex("c", ("c",)), _set(basic, ""))
