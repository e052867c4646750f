from __future__ import annotations

import random

import pytest

from costreach import monoid as M
from costreach.monoid import NA, Antichain


def seq_profile(s):
    return M.profile_of_sequence(s)


@pytest.mark.parametrize(
    "ops,expected",
    [
        ("", (0, NA, NA)),
        ("i", (1, NA, NA)),
        ("iii", (3, NA, NA)),
        ("r", (0, NA, 0)),
        ("iri", (1, NA, 1)),
        ("iriiri", (1, 2, 1)),
        ("rr", (0, 0, 0)),
        ("nnin", (1, NA, NA)),
    ],
)
def test_profile_of_sequence(ops, expected):
    assert seq_profile(ops) == expected


def test_concat_table():
    assert M.concat((2, NA, NA), (3, NA, NA)) == (5, NA, NA)
    assert M.concat((2, NA, NA), (3, NA, 1)) == (5, NA, 1)
    assert M.concat((2, NA, 4), (3, NA, NA)) == (2, NA, 7)
    assert M.concat((2, NA, 4), (3, NA, 1)) == (2, 7, 1)
    assert M.concat((2, 9, 4), (3, 1, 1)) == (2, 9, 1)


def test_neutral_and_rev():
    p = (3, 5, 2)
    assert M.concat(M.NEUTRAL, p) == p == M.concat(p, M.NEUTRAL)
    assert M.rev(p) == (2, 5, 3)
    assert M.rev((4, NA, NA)) == (4, NA, NA)


def test_order_na_incomparable():
    assert M.leq((1, NA, NA), (2, NA, NA))
    assert not M.leq((1, NA, NA), (1, NA, 0))
    assert not M.leq((1, NA, 0), (1, NA, NA))
    assert M.leq((0, NA, 0), (1, NA, 2))


def test_max_entry_and_restrict():
    assert M.max_entry((1, 7, 2)) == 7
    assert M.max_entry((0, NA, NA)) == 0
    assert M.restrict((5, 3, 2)) == (1, 1, 1)
    assert M.restrict((0, NA, 4)) == (0, NA, 1)


def test_profile_to_ops_never_emits_noop():
    rng = random.Random(1)
    for _ in range(300):
        s = "".join(rng.choice("irn") for _ in range(rng.randint(0, 10)))
        p = seq_profile(s)
        ops = M.profile_to_ops(p)
        assert "n" not in ops
        assert seq_profile(ops) == p


def test_invalid_profiles_rejected():
    for bad in [(1, 2, NA), (-1, NA, NA), (1.0, NA, NA), (True, NA, NA), (1, NA)]:
        assert not M.is_valid(bad)
        with pytest.raises(M.ProfileError):
            M.check(bad)


def test_vectors():
    a = ((1, NA, NA), (0, NA, 0))
    b = ((0, NA, 2), (3, NA, NA))
    assert M.vector_concat(a, b) == ((1, NA, 2), (0, NA, 3))
    assert M.vector_rev(M.vector_rev(a)) == a
    assert M.vector_max_entry(b) == 3
    with pytest.raises(ValueError):
        M.vector_concat(a, b[:1])


def test_restricted_monoid_caps():
    m = M.restricted_monoid(1)
    x = m.concat(((3, NA, NA),), ((2, NA, NA),))
    assert x == ((1, NA, NA),)


def test_antichain_keeps_minimal():
    ch = Antichain()
    assert ch.insert(((2, NA, NA),))
    assert not ch.insert(((3, NA, NA),))
    assert ch.insert(((1, NA, NA),))
    assert ch.items() == [((1, NA, NA),)]
    assert ch.insert(((0, NA, 0),))  # incomparable
    assert len(ch) == 2
    assert ch.dominated(((5, NA, 1),))
    assert M.minimal([((2, NA, NA),), ((1, NA, NA),), ((0, NA, 0),)]) == [((0, NA, 0),), ((1, NA, NA),)]
