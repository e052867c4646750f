"""Limitedness of B-automata: is the value bounded over all accepted words?

Runs are abstracted to counter profiles over ``{0, 1, OMEGA}``: 0 means no
increments, 1 boundedly many, OMEGA unboundedly many.  Words act as square
matrices whose entries are antichains of abstract profile vectors.  The
closure of the letter matrices under product and under stabilisation of
idempotents is finite; the value is unbounded iff some closure matrix has
an initial-to-final entry and all such elements carry OMEGA.

Every closure matrix keeps its derivation, from which a pumping family of
words ``w_n`` with growing values can be read off.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from . import costautomata as ca
from .monoid import Antichain

OMEGA = 2

AbstractProfile = Tuple[int, Optional[int], Optional[int]]
AbstractVector = Tuple[AbstractProfile, ...]
Matrix = Dict[int, Dict[int, Tuple[AbstractVector, ...]]]


def _amax(*xs):
    vals = [x for x in xs if x is not None]
    return max(vals) if vals else None


def aconcat(p: AbstractProfile, q: AbstractProfile) -> AbstractProfile:
    # abstract addition 0+x = x, 1+1 = 1, OMEGA absorbing is just max
    pl, pm, pr = p
    ql, qm, qr = q
    if pr is None:
        return (max(pl, ql), qm, qr)
    if qr is None:
        return (pl, pm, max(pr, ql))
    return (pl, _amax(pm, max(pr, ql), qm), qr)


@lru_cache(maxsize=None)
def vconcat(a: AbstractVector, b: AbstractVector) -> AbstractVector:
    return tuple(aconcat(p, q) for p, q in zip(a, b))


def _entry_leq(x, y) -> bool:
    if x is None or y is None:
        return x is y
    return x <= y


def vleq(a: AbstractVector, b: AbstractVector) -> bool:
    return all(_entry_leq(x, y) for p, q in zip(a, b) for x, y in zip(p, q))


def abstract_profile(p) -> AbstractProfile:
    return tuple(None if x is None else min(x, 1) for x in p)  # type: ignore[return-value]


def stabilize(e: AbstractVector) -> AbstractVector:
    """Value of ``e`` iterated unboundedly often (``e`` idempotent)."""
    out = []
    for left, mid, right in e:
        if right is None:
            out.append((OMEGA if left >= 1 else 0, None, None))
        else:
            out.append((left, _amax(mid, max(right, left)), right))
    return tuple(out)


def has_omega(v: AbstractVector) -> bool:
    return any(x == OMEGA for p in v for x in p)


def _chain(items) -> Tuple[AbstractVector, ...]:
    ch = Antichain(vleq)
    for x in items:
        ch.insert(x)
    return tuple(ch.items())


def mul(M: Matrix, N: Matrix) -> Matrix:
    out: Matrix = {}
    for p, row in M.items():
        acc: Dict[int, Antichain] = {}
        for r, xs in row.items():
            nrow = N.get(r)
            if not nrow:
                continue
            for q, ys in nrow.items():
                ch = acc.get(q)
                if ch is None:
                    ch = acc[q] = Antichain(vleq)
                for x in xs:
                    for y in ys:
                        ch.insert(vconcat(x, y))
        if acc:
            out[p] = {q: tuple(ch.items()) for q, ch in acc.items()}
    return out


def _idempotent_power(f: AbstractVector) -> AbstractVector:
    seen = set()
    while True:
        g = vconcat(f, f)
        if g == f:
            return f
        if f in seen:  # pragma: no cover - the finite algebra always arrives
            return f
        seen.add(f)
        f = g


def sharp(M: Matrix) -> Matrix:
    """Stabilisation of an idempotent matrix.

    Every long run of ``M^n`` repeats some state ``r``; its cost is that of
    ``x . f# . y`` with ``x`` in ``M(p,r)``, ``f`` an idempotent loop at
    ``r`` and ``y`` in ``M(r,q)``.  The plain entry ``M(p,q)`` is not kept:
    it only describes short runs.
    """
    loops: Dict[int, List[AbstractVector]] = {}
    for r, row in M.items():
        for f in row.get(r, ()):
            loops.setdefault(r, []).append(stabilize(_idempotent_power(f)))
    out: Matrix = {}
    for p, row in M.items():
        acc: Dict[int, Antichain] = {}
        for r, xs in row.items():
            if r not in loops:
                continue
            mids = [vconcat(x, s) for x in xs for s in loops[r]]
            for q, ys in M.get(r, {}).items():
                ch = acc.get(q)
                if ch is None:
                    ch = acc[q] = Antichain(vleq)
                for m in mids:
                    for y in ys:
                        ch.insert(vconcat(m, y))
        if acc:
            out[p] = {q: tuple(ch.items()) for q, ch in acc.items()}
    return out


def canon(M: Matrix):
    return tuple(sorted((p, tuple(sorted(row.items()))) for p, row in M.items()))


def abstract(A: ca.BAutomaton) -> Dict[str, Matrix]:
    """One generator matrix per letter (``A`` must be epsilon-free)."""
    if A.has_eps:
        raise ValueError("abstract() needs an epsilon-free automaton")
    acc: Dict = {}
    for p, a, q, m in A.transitions:
        v = tuple(abstract_profile(x) for x in m)
        acc.setdefault(a, {}).setdefault(p, {}).setdefault(q, []).append(v)
    out = {}
    for a in A.alphabet:
        rows = acc.get(a, {})
        out[a] = {p: {q: _chain(vs) for q, vs in row.items()} for p, row in rows.items()}
    return out


# -- derivations and pumping words ------------------------------------------------------


@dataclass(frozen=True)
class Derivation:
    kind: str  # "letter" | "prod" | "sharp"
    letter: object = None
    left: int = -1
    right: int = -1

    def text(self, derivs: Sequence["Derivation"]) -> str:
        if self.kind == "letter":
            return ca._letter_text(self.letter)
        if self.kind == "prod":
            return derivs[self.left].text(derivs) + " " + derivs[self.right].text(derivs)
        return "(" + derivs[self.left].text(derivs) + ")^n"


def pump(derivs: Sequence[Derivation], idx: int, n: int) -> Tuple:
    """The word of derivation ``idx`` with every stabilisation repeated ``n`` times."""
    memo: Dict[int, Tuple] = {}

    def go(i: int) -> Tuple:
        if i in memo:
            return memo[i]
        d = derivs[i]
        if d.kind == "letter":
            w = (d.letter,)
        elif d.kind == "prod":
            w = go(d.left) + go(d.right)
        else:
            w = go(d.left) * n
        memo[i] = w
        return w

    return go(idx)


@dataclass
class LimitednessResult:
    limited: bool
    matrices: int
    witnesses: List[int] = field(default_factory=list)
    derivations: List[Derivation] = field(default_factory=list)
    automaton: Optional[ca.BAutomaton] = None

    def pumping_word(self, n: int, which: int = 0) -> Tuple:
        return pump(self.derivations, self.witnesses[which], n)

    def family_text(self, which: int = 0) -> str:
        return self.derivations[self.witnesses[which]].text(self.derivations)

    def to_json(self) -> str:
        data = {
            "verdict": "bounded" if self.limited else "unbounded",
            "matrices": self.matrices,
            "witnesses": [
                {
                    "derivation": self.derivations[i].text(self.derivations),
                    "samples": [
                        [ca._letter_text(a) for a in pump(self.derivations, i, n)] for n in (1, 2)
                    ],
                }
                for i in self.witnesses
            ],
        }
        return json.dumps(data, sort_keys=True)


def _is_witness(M: Matrix, initial, final) -> bool:
    found = False
    for p in initial:
        row = M.get(p)
        if not row:
            continue
        for q in final:
            for v in row.get(q, ()):
                if not has_omega(v):
                    return False
                found = True
    return found


def closure(A: ca.BAutomaton, max_witnesses: int = 1, limit: int = 200000) -> LimitednessResult:
    """Closure under product and stabilisation; stops after ``max_witnesses`` witnesses.

    The automaton is first made epsilon-free with annotations capped at 1,
    which is exactly the information the abstraction keeps.
    """
    A = ca.reduce(ca.eps_eliminate(A, cap=1))
    gens = abstract(A)
    index: Dict = {}
    mats: List[Matrix] = []
    derivs: List[Derivation] = []
    todo: deque = deque()
    witnesses: List[int] = []

    def add(M: Matrix, d: Derivation) -> None:
        key = canon(M)
        if key in index:
            return
        if len(mats) >= limit:
            raise RuntimeError(f"limitedness closure exceeded {limit} matrices")
        index[key] = len(mats)
        mats.append(M)
        derivs.append(d)
        todo.append(len(mats) - 1)

    for a in sorted(gens, key=repr):
        add(gens[a], Derivation("letter", letter=a))
    while todo:
        i = todo.popleft()
        M = mats[i]
        if _is_witness(M, A.initial, A.final):
            witnesses.append(i)
            if len(witnesses) >= max_witnesses:
                break
        for j in range(len(mats)):
            N = mats[j]
            add(mul(M, N), Derivation("prod", left=i, right=j))
            if j != i:
                add(mul(N, M), Derivation("prod", left=j, right=i))
        if canon(mul(M, M)) == canon(M):
            add(sharp(M), Derivation("sharp", left=i))
    return LimitednessResult(not witnesses, len(mats), witnesses, derivs, A)


def is_limited(A: ca.BAutomaton) -> bool:
    """Whether ``sup`` of the value over accepted words is finite."""
    return closure(A).limited


def pumping_family(res: LimitednessResult, A: ca.BAutomaton, targets: Sequence[int], max_n: int = 64):
    """For each target ``t`` a pumped word whose value is at least ``t``.

    Returns ``{t: (n, word, value)}``; targets that no ``n <= max_n`` reaches
    are absent.
    """
    out = {}
    n = 1
    cache: Dict[int, Tuple] = {}
    for t in sorted(targets):
        while n <= max_n:
            if n not in cache:
                w = res.pumping_word(n)
                cache[n] = (w, ca.evaluate_word(A, w))
            w, val = cache[n]
            if val >= t:
                out[t] = (n, w, val)
                break
            n += 1
    return out
