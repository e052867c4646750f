from __future__ import annotations

import itertools
import json
import random

import pytest
from refimpl import INF, projection_bruteforce, random_automaton, run_value

from costreach import costautomata as ca
from costreach.nfa import from_regex, words_upto

AB = ("a", "b")


def _words(n, sigma=AB):
    return list(words_upto(sigma, n))


def test_block_counter_values():
    A = ca.block_counter()
    assert ca.evaluate_word(A, tuple("aabaaa")) == 3
    assert ca.evaluate_word(A, tuple("bbb")) == 0
    assert ca.evaluate_word(A, ()) == 0
    C = ca.block_counter(reset=None)
    assert ca.evaluate_word(C, tuple("abab")) == 2


def test_evaluate_matches_run_enumeration():
    rng = random.Random(11)
    for _ in range(40):
        A = random_automaton(rng, AB, rng.randint(1, 4), rng.randint(1, 2))
        for w in _words(5):
            assert ca.evaluate_word(A, w) == run_value(A, w), (A.transitions, w)


def test_within_k_and_unaccepted():
    A = ca.b_max(ca.block_counter(), ca.char_automaton(from_regex("a*", AB)))
    assert ca.evaluate_word(A, tuple("ab")) == INF
    assert ca.within_k(A, tuple("aa"), 2)
    assert not ca.within_k(A, tuple("aa"), 1)


def test_min_max_exact():
    X = ca.block_counter()
    Y = ca.block_counter(count="b", reset="a")
    lo, hi = ca.b_min(X, Y), ca.b_max(X, Y)
    for w in _words(6):
        x, y = ca.evaluate_word(X, w), ca.evaluate_word(Y, w)
        assert ca.evaluate_word(lo, w) == min(x, y)
        assert ca.evaluate_word(hi, w) == max(x, y)


def test_constant_and_cases():
    three = ca.constant(AB, 3)
    zero = ca.constant(AB, 0)
    for w in _words(3):
        assert ca.evaluate_word(three, w) == 3
        assert ca.evaluate_word(zero, w) == 0
    L = from_regex("a*", AB)
    f = ca.combine_by_cases(ca.block_counter(), three, L)
    assert ca.evaluate_word(f, tuple("aaaa")) == 4
    assert ca.evaluate_word(f, tuple("ab")) == 3


def test_eps_elimination_and_reduce_preserve_values():
    rng = random.Random(5)
    for _ in range(25):
        A = random_automaton(rng, AB, 3, 1)
        b = ca.Builder(AB, 1)
        for p, a, q, m in A.transitions:
            b.add(p, a, q, m)
        b.add(0, ca.EPS, 1, ((1, None, None),))
        b.add(2, ca.EPS, 0, ((0, None, 0),))
        b.initial = {0}
        b.final = set(A.final)
        E = b.build()
        F = ca.eps_eliminate(E)
        assert not F.has_eps
        R = ca.reduce(F)
        for w in _words(4)[1:]:
            v = ca.evaluate_word(E, w)
            assert ca.evaluate_word(F, w) == v
            assert ca.evaluate_word(R, w) == v
            assert run_value(F, w) == v


def test_value_leq_k_nfa_and_counterexample():
    A = ca.block_counter()
    n2 = ca.value_leq_k_nfa(A, 2)
    for w in _words(6):
        assert n2.accepts(w) == (ca.evaluate_word(A, w) <= 2)
    L = from_regex("(a|b)*", AB)
    ce = ca.within_k_counterexample(L, A, 2)
    assert ce == ("a", "a", "a")
    assert ca.within_k_counterexample(from_regex("(ab)*", AB), A, 1) is None


def test_support_and_trim():
    A = ca.b_max(ca.block_counter(), ca.char_automaton(from_regex("ab*", AB)))
    S = ca.support(A)
    for w in _words(4):
        assert S.accepts(w) == ca.accepts(A, w)
    assert ca.trim(A).n_states <= A.n_states


def test_conv_roundtrip_and_padding():
    words = [("a", "b"), ("b",), ()]
    for al in ("left", "right"):
        cw = ca.conv(words, al)
        assert ca.unconv(cw, 3) == tuple(words)
        assert ca.is_correctly_padded(cw, al)
    assert ca.conv([("a",), ("a", "b")], "right") == ((ca.PAD, "a"), ("a", "b"))
    assert not ca.is_correctly_padded(((ca.PAD, "a"), ("a", ca.PAD)), "left")


@pytest.mark.parametrize("alignment", ["left", "right"])
def test_correct_padding_nfa(alignment):
    nfa = ca.correct_padding_nfa(AB, 2, alignment)
    letters = ca.padded_alphabet(AB, 2)
    for n in range(4):
        for cw in itertools.product(letters, repeat=n):
            assert nfa.accepts(cw) == ca.is_correctly_padded(cw, alignment), cw


@pytest.mark.parametrize("alignment", ["left", "right"])
def test_equality_and_inequality(alignment):
    eq = ca.equality_transducer(AB, alignment)
    ne = ca.inequality_transducer(AB, alignment)
    for u in _words(3):
        for v in _words(3):
            assert eq.value(u, v) == (0 if u == v else INF)
            assert ne.value(u, v) == (INF if u == v else 0), (u, v)


def test_cylindrify_and_reorder():
    L = from_regex("a*", AB)
    T = ca.track_language(L, AB, 1, 3)
    for ws in [((), ("a", "a"), ("b",)), (("b",), ("a", "b"), ())]:
        expected = 0 if L.accepts(ws[1]) else INF
        assert T.value(*ws) == expected
    R = ca.reorder(T, [1, 0, 2])
    assert R.value(("a",), ("b",), ()) == 0
    assert R.value(("b",), ("a",), ()) == INF


def test_projection_exact_and_approx():
    # value(u, v) = longest a-block of v, restricted to |v| >= |u|
    b = ca.Builder(ca.padded_alphabet(AB, 2), 1)
    b.initial = {0}
    b.final = {0}
    for x in AB + (ca.PAD,):
        b.add(0, (x, "a"), 0, ((1, None, None),))
        b.add(0, (x, "b"), 0, ((0, None, 0),))
    T = ca.ResourceTransducer(b.build(), AB, 2, "right")
    P = ca.inf_projection(T, 1)
    E = ca.inf_projection(T, 1, exact=True)
    for u in _words(3):
        truth = projection_bruteforce(T, 1, [u], len(u) + 2)
        assert E.value(u) == truth
        assert truth - P.slack <= P.value(u) <= truth
    with pytest.raises(ca.AutomatonError):
        ca.inf_projection(T, 2)


def test_json_and_dot():
    A = ca.b_max(ca.block_counter(), ca.char_automaton(from_regex("a*b", AB)))
    B = ca.from_json(json.loads(json.dumps(ca.to_json(A))))
    for w in _words(4):
        assert ca.evaluate_word(A, w) == ca.evaluate_word(B, w)
    dot = ca.to_dot(A, "G")
    assert dot.startswith("digraph \"G\" {") and dot.rstrip().endswith("}")
    assert dot.count("->") >= len(A.transitions)


def test_op_words():
    assert ca.ops_to_profile("icicric") == (2, None, 1)
    assert ca.profile_to_opword((1, None, 0)) == "icr"
