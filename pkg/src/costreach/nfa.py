"""Plain finite automata: the regular sets fed into the cost machinery."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import count, product
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

EPS = None


@dataclass
class Nfa:
    alphabet: Tuple[Hashable, ...]
    initial: Set[Hashable] = field(default_factory=set)
    final: Set[Hashable] = field(default_factory=set)
    delta: Dict[Tuple[Hashable, Hashable], Set[Hashable]] = field(default_factory=dict)
    states: Set[Hashable] = field(default_factory=set)

    def add(self, p, a, q):
        self.states.update((p, q))
        self.delta.setdefault((p, a), set()).add(q)

    def targets(self, p, a) -> Set[Hashable]:
        return self.delta.get((p, a), set())

    def eclose(self, states: Iterable) -> FrozenSet:
        seen = set(states)
        todo = list(seen)
        while todo:
            p = todo.pop()
            for q in self.delta.get((p, EPS), ()):
                if q not in seen:
                    seen.add(q)
                    todo.append(q)
        return frozenset(seen)

    def step(self, current: FrozenSet, a) -> FrozenSet:
        nxt = set()
        for p in current:
            nxt |= self.delta.get((p, a), set())
        return self.eclose(nxt)

    def start(self) -> FrozenSet:
        return self.eclose(self.initial)

    def accepts(self, w: Sequence) -> bool:
        cur = self.start()
        for a in w:
            cur = self.step(cur, a)
            if not cur:
                return False
        return bool(cur & self.final)

    def transitions(self):
        for (p, a), qs in self.delta.items():
            for q in qs:
                yield p, a, q


def from_words(alphabet, words: Iterable[Sequence]) -> Nfa:
    """Trie automaton for a finite language."""
    n = Nfa(tuple(alphabet))
    root = ()
    n.initial = {root}
    n.states.add(root)
    for w in words:
        w = tuple(w)
        for i, a in enumerate(w):
            n.add(w[:i], a, w[: i + 1])
        n.final.add(w)
        n.states.add(w)
    return n


def universal(alphabet) -> Nfa:
    n = Nfa(tuple(alphabet), {0}, {0}, states={0})
    for a in alphabet:
        n.add(0, a, 0)
    return n


def empty(alphabet) -> Nfa:
    return Nfa(tuple(alphabet), {0}, set(), states={0})


# -- regular expressions ----------------------------------------------------------


class RegexError(ValueError):
    pass


class _Thompson:
    """Anchored regex over single-character symbols: | * + ? ( ) and ``.``."""

    def __init__(self, text: str, alphabet: Sequence[str]):
        self.text = text.replace(" ", "")
        if self.text == '""':
            self.text = ""
        self.alphabet = tuple(alphabet)
        self.pos = 0
        self.ids = count()

    def parse(self) -> Nfa:
        n = Nfa(self.alphabet)
        s, f = self._alt(n)
        if self.pos != len(self.text):
            raise RegexError(f"unexpected {self.text[self.pos]!r} at position {self.pos}")
        n.initial, n.final = {s}, {f}
        return n

    def _new(self, n: Nfa):
        q = next(self.ids)
        n.states.add(q)
        return q

    def _peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else None

    def _alt(self, n):
        s, f = self._cat(n)
        if self._peek() != "|":
            return s, f
        s0, f0 = self._new(n), self._new(n)
        n.add(s0, EPS, s)
        n.add(f, EPS, f0)
        while self._peek() == "|":
            self.pos += 1
            s1, f1 = self._cat(n)
            n.add(s0, EPS, s1)
            n.add(f1, EPS, f0)
        return s0, f0

    def _cat(self, n):
        s = f = self._new(n)
        while self._peek() not in (None, "|", ")"):
            s1, f1 = self._post(n)
            n.add(f, EPS, s1)
            f = f1
        return s, f

    def _post(self, n):
        s, f = self._atom(n)
        while self._peek() in ("*", "+", "?"):
            op = self._peek()
            self.pos += 1
            s0, f0 = self._new(n), self._new(n)
            n.add(s0, EPS, s)
            n.add(f, EPS, f0)
            if op in ("*", "?"):
                n.add(s0, EPS, f0)
            if op in ("*", "+"):
                n.add(f, EPS, s)
            s, f = s0, f0
        return s, f

    def _atom(self, n):
        c = self._peek()
        if c is None:
            raise RegexError("unexpected end of expression")
        if c == "(":
            self.pos += 1
            s, f = self._alt(n)
            if self._peek() != ")":
                raise RegexError(f"missing ')' at position {self.pos}")
            self.pos += 1
            return s, f
        if c in "*+?)|":
            raise RegexError(f"unexpected {c!r} at position {self.pos}")
        self.pos += 1
        s, f = self._new(n), self._new(n)
        if c == ".":
            for a in self.alphabet:
                n.add(s, a, f)
        elif c in self.alphabet:
            n.add(s, c, f)
        else:
            raise RegexError(f"symbol {c!r} not in alphabet {self.alphabet}")
        return s, f


def from_regex(text: str, alphabet: Sequence[str]) -> Nfa:
    return _Thompson(text, alphabet).parse()


# -- determinisation and boolean operations -----------------------------------------


def determinize(n: Nfa, alphabet=None) -> Nfa:
    """Complete subset construction; states are frozensets of ``n``'s states."""
    alphabet = tuple(alphabet or n.alphabet)
    d = Nfa(alphabet)
    s0 = n.start()
    d.initial = {s0}
    d.states.add(s0)
    todo = [s0]
    while todo:
        cur = todo.pop()
        if cur & n.final:
            d.final.add(cur)
        for a in alphabet:
            nxt = n.step(cur, a)
            if nxt not in d.states:
                d.states.add(nxt)
                todo.append(nxt)
            d.add(cur, a, nxt)
    return d


def complement(n: Nfa, alphabet=None) -> Nfa:
    d = determinize(n, alphabet)
    d.final = set(d.states) - set(d.final)
    return d


def intersect(a: Nfa, b: Nfa) -> Nfa:
    alphabet = tuple(x for x in a.alphabet if x in set(b.alphabet))
    out = Nfa(alphabet)
    starts = [(p, q) for p in a.start() for q in b.start()]
    out.initial = set(starts)
    out.states.update(starts)
    todo = list(starts)
    while todo:
        p, q = todo.pop()
        if p in a.final and q in b.final:
            out.final.add((p, q))
        for x in alphabet:
            for p2 in a.eclose(a.targets(p, x)):
                for q2 in b.eclose(b.targets(q, x)):
                    t = (p2, q2)
                    if t not in out.states:
                        todo.append(t)
                    out.add((p, q), x, t)
    return out


def union(a: Nfa, b: Nfa) -> Nfa:
    out = Nfa(tuple(dict.fromkeys(a.alphabet + b.alphabet)))
    for tag, n in ((0, a), (1, b)):
        out.states.update((tag, s) for s in n.states)
        out.initial.update((tag, s) for s in n.initial)
        out.final.update((tag, s) for s in n.final)
        for p, x, q in n.transitions():
            out.add((tag, p), x, (tag, q))
    return out


def shortest_word(n: Nfa) -> Optional[Tuple]:
    """A shortest accepted word, or ``None`` when the language is empty."""
    s0 = n.start()
    prev = {s0: None}
    todo = deque([s0])
    while todo:
        cur = todo.popleft()
        if cur & n.final:
            out = []
            while prev[cur] is not None:
                cur, a = prev[cur]
                out.append(a)
            return tuple(reversed(out))
        for a in n.alphabet:
            nxt = n.step(cur, a)
            if nxt and nxt not in prev:
                prev[nxt] = (cur, a)
                todo.append(nxt)
    return None


def is_empty(n: Nfa) -> bool:
    return shortest_word(n) is None


def inclusion_counterexample(a: Nfa, b: Nfa) -> Optional[Tuple]:
    """Shortest word in L(a) \\ L(b), or ``None`` if L(a) is a subset of L(b).

    On-the-fly product of ``a`` with the subset construction of ``b``; product
    states whose ``b``-subset is a superset of an already explored one for the
    same ``a``-state are pruned (antichain pruning).
    """
    start = (a.start(), b.start())
    prev = {start: None}
    explored: Dict[FrozenSet, List[FrozenSet]] = {}
    todo = deque([start])
    while todo:
        sa, sb = cur = todo.popleft()
        if sa & a.final and not (sb & b.final):
            out = []
            while prev[cur] is not None:
                cur, x = prev[cur]
                out.append(x)
            return tuple(reversed(out))
        for x in a.alphabet:
            na = a.step(sa, x)
            if not na:
                continue
            nb = b.step(sb, x)
            nxt = (na, nb)
            if nxt in prev:
                continue
            if any(old <= nb for old in explored.get(na, ())):
                continue
            explored.setdefault(na, []).append(nb)
            prev[nxt] = (cur, x)
            todo.append(nxt)
    return None


def equivalent(a: Nfa, b: Nfa) -> bool:
    return inclusion_counterexample(a, b) is None and inclusion_counterexample(b, a) is None


def words_upto(alphabet: Sequence, n: int):
    for k in range(n + 1):
        yield from product(alphabet, repeat=k)
