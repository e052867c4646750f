from __future__ import annotations

import json

import pytest
from refimpl import limitedness_suite

from costreach import costautomata as ca
from costreach import limitedness as L
from costreach.limitedness import OMEGA


def test_abstract_algebra():
    assert L.aconcat((1, None, None), (1, None, None)) == (1, None, None)
    assert L.aconcat((1, None, 0), (1, None, 1)) == (1, 1, 1)
    assert L.stabilize(((1, None, None),)) == ((OMEGA, None, None),)
    assert L.stabilize(((0, None, 0),)) == ((0, 0, 0),)
    assert L.stabilize(((1, None, 0),)) == ((1, 1, 0),)
    assert L.has_omega(((0, OMEGA, 0),))
    assert L.vleq(((0, None, None),), ((1, None, None),))
    assert not L.vleq(((0, None, None),), ((0, None, 0),))


def test_sharp_of_idempotent():
    inc = {0: {0: (((1, None, None),),)}}
    assert L.mul(inc, inc) == inc
    assert L.sharp(inc) == {0: {0: (((OMEGA, None, None),),)}}
    reset = {0: {0: (((0, None, 0),),)}}
    assert L.sharp(reset) == {0: {0: (((0, 0, 0),),)}}


def test_abstract_requires_eps_free():
    with pytest.raises(ValueError):
        L.abstract(ca.constant(("a",), 2))


@pytest.mark.parametrize("name,A,bounded", limitedness_suite(), ids=[x[0] for x in limitedness_suite()])
def test_suite_verdicts(name, A, bounded):
    res = L.closure(A)
    assert res.limited == bounded
    if not bounded:
        fam = L.pumping_family(res, A, [3, 15])
        assert 15 in fam and fam[15][2] >= 15


def test_block_counter_family():
    A = ca.block_counter()
    res = L.closure(A)
    assert not res.limited
    assert res.family_text() == "(a)^n"
    fam = L.pumping_family(res, A, [1, 5, 15])
    assert {t: fam[t][0] for t in fam} == {1: 1, 5: 5, 15: 15}
    data = json.loads(res.to_json())
    assert data["verdict"] == "unbounded"
    assert data["witnesses"][0]["samples"] == [["a"], ["a", "a"]]


def test_is_limited_trivial_cases():
    assert L.is_limited(ca.constant(("a", "b"), 0))
    empty = ca.Builder(("a",), 1).build()
    assert L.is_limited(empty)


def test_closure_limit():
    with pytest.raises(RuntimeError):
        L.closure(ca.b_max(ca.block_counter(), ca.block_counter(count="b", reset="a")), limit=2)
