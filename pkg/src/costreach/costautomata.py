"""B-automata and synchronous resource transducers.

Transitions carry one counter profile per counter instead of a raw op word.
Every increment is treated as checked (the ``ic`` reading), which makes an op
word and its profile interchangeable: the value of a run is the largest
profile entry of the composed run annotation.  Op words are still accepted
and produced at the I/O boundary (JSON, DOT) via :func:`ops_to_profile` and
:func:`profile_to_opword`.
"""

from __future__ import annotations

import heapq
import json
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels, monoid
from .monoid import Antichain, ProfileVector
from .nfa import EPS, Nfa, complement as nfa_complement, is_empty as nfa_is_empty

INF = math.inf
PAD = "$"

Letter = Hashable
Transition = Tuple[int, Optional[Letter], int, ProfileVector]


class AutomatonError(ValueError):
    pass


@dataclass(eq=False)
class BAutomaton:
    n_states: int
    alphabet: Tuple[Letter, ...]
    initial: frozenset
    final: frozenset
    counters: int
    transitions: Tuple[Transition, ...]
    labels: Optional[Tuple[str, ...]] = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.initial = frozenset(self.initial)
        self.final = frozenset(self.final)
        self.transitions = tuple(self.transitions)

    @property
    def has_eps(self) -> bool:
        return any(a is EPS for _, a, _, _ in self.transitions)

    @property
    def max_increments(self) -> int:
        """Largest number of increments a single transition puts on one counter."""
        return max(
            (sum(x for x in p if x is not None) for *_, vec in self.transitions for p in vec),
            default=0,
        )

    def label(self, q: int) -> str:
        return self.labels[q] if self.labels else str(q)

    def __repr__(self):
        return (
            f"BAutomaton(states={self.n_states}, transitions={len(self.transitions)}, "
            f"counters={self.counters}, letters={len(self.alphabet)})"
        )


class Builder:
    """Incremental construction keyed by arbitrary hashable state names."""

    def __init__(self, alphabet, counters: int):
        self.alphabet = tuple(alphabet)
        self.counters = counters
        self.index: Dict[Hashable, int] = {}
        self.initial: set = set()
        self.final: set = set()
        self.trans: Dict[Tuple[int, Letter, int], Antichain] = {}

    def state(self, key) -> int:
        q = self.index.get(key)
        if q is None:
            q = self.index[key] = len(self.index)
        return q

    def add(self, p, a, q, prof: ProfileVector) -> bool:
        key = (self.state(p), a, self.state(q))
        chain = self.trans.get(key)
        if chain is None:
            chain = self.trans[key] = Antichain()
        return chain.insert(prof)

    def build(self) -> BAutomaton:
        trans = []
        for (p, a, q), chain in self.trans.items():
            for prof in chain:
                trans.append((p, a, q, prof))
        labels = tuple(_fmt_key(k) for k in self.index)
        return BAutomaton(
            len(self.index),
            self.alphabet,
            frozenset(self.state(k) for k in self.initial),
            frozenset(self.state(k) for k in self.final),
            self.counters,
            tuple(trans),
            labels,
        )


def _fmt_key(k) -> str:
    if isinstance(k, tuple):
        return "(" + ",".join(_fmt_key(x) for x in k) + ")"
    return str(k)


def _pad_vec(vec: ProfileVector, before: int, total: int) -> ProfileVector:
    after = total - before - len(vec)
    return (monoid.NEUTRAL,) * before + tuple(vec) + (monoid.NEUTRAL,) * after


# -- op words at the I/O boundary ---------------------------------------------------


def ops_to_profile(ops: str):
    """Profile of an op word over ``i``, ``r``, ``c`` (``ic`` = checked increment)."""
    return monoid.profile_of_sequence(ch for ch in ops if ch != "c")


def profile_to_opword(p) -> str:
    return monoid.profile_to_ops(p).replace("i", "ic")


# -- basic queries ------------------------------------------------------------------


def trim(A: BAutomaton) -> BAutomaton:
    """Drop states that are not both accessible and co-accessible."""
    fwd = defaultdict(set)
    bwd = defaultdict(set)
    for p, _, q, _ in A.transitions:
        fwd[p].add(q)
        bwd[q].add(p)
    acc = _reach(A.initial, fwd)
    coacc = _reach(A.final, bwd)
    keep = sorted(acc & coacc)
    if len(keep) == A.n_states:
        return A
    ren = {q: i for i, q in enumerate(keep)}
    trans = tuple(
        (ren[p], a, ren[q], m) for p, a, q, m in A.transitions if p in ren and q in ren
    )
    labels = tuple(A.label(q) for q in keep) if A.labels else None
    return BAutomaton(
        len(keep),
        A.alphabet,
        frozenset(ren[q] for q in A.initial if q in ren),
        frozenset(ren[q] for q in A.final if q in ren),
        A.counters,
        trans,
        labels,
    )


def _reach(start, edges) -> set:
    seen = set(start)
    todo = list(seen)
    while todo:
        p = todo.pop()
        for q in edges[p]:
            if q not in seen:
                seen.add(q)
                todo.append(q)
    return seen


def support(A: BAutomaton) -> Nfa:
    """The underlying NFA (the domain of the cost function)."""
    n = Nfa(A.alphabet, set(A.initial), set(A.final), states=set(range(A.n_states)))
    for p, a, q, _ in A.transitions:
        n.add(p, a, q)
    return n


def accepts(A: BAutomaton, w: Sequence) -> bool:
    return support(A).accepts(w)


# -- capped simulation -------------------------------------------------------------------


class _Compiled:
    """Integer arrays of an automaton for the simulation kernels."""

    def __init__(self, A: BAutomaton):
        self.A = A
        self.profiles: List[ProfileVector] = []
        pid_of: Dict[ProfileVector, int] = {}
        by_letter: Dict[Letter, List[Tuple[int, int, int]]] = defaultdict(list)
        for p, a, q, m in A.transitions:
            pid = pid_of.get(m)
            if pid is None:
                pid = pid_of[m] = len(self.profiles)
                self.profiles.append(m)
            by_letter[a].append((p, q, pid))
        self.arrays = {}
        for a, rows in by_letter.items():
            arr = np.array(rows, dtype=np.int64).reshape(-1, 3)
            self.arrays[a] = (arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy())
        empty = np.zeros(0, dtype=np.int64)
        self.empty = (empty, empty, empty)
        self.maps: Dict[int, np.ndarray] = {}

    def maps_for(self, k: int) -> np.ndarray:
        m = self.maps.get(k)
        if m is None:
            if not self.profiles:
                m = np.zeros((1, (k + 1) ** self.A.counters), dtype=np.int32)
            else:
                m = _kernels.profile_maps(self.profiles, self.A.counters, k)
            self.maps[k] = m
        return m

    def start(self, k: int) -> np.ndarray:
        F = np.zeros((self.A.n_states, (k + 1) ** self.A.counters), dtype=np.bool_)
        for q in self.A.initial:
            F[q, 0] = True
        return self.close(F, k)

    def close(self, F, k):
        src, dst, pid = self.arrays.get(EPS, self.empty)
        if len(src) == 0:
            return F
        return _kernels.close(F, src, dst, pid, self.maps_for(k))

    def step(self, F, a, k):
        src, dst, pid = self.arrays.get(a, self.empty)
        F = _kernels.step(F, src, dst, pid, self.maps_for(k))
        return self.close(F, k)

    def accepting(self, F) -> bool:
        return any(F[q].any() for q in self.A.final)

    def member(self, w: Sequence, k: int) -> bool:
        F = self.start(k)
        for a in w:
            if not F.any():
                return False
            F = self.step(F, a, k)
        return self.accepting(F)


def _compiled(A: BAutomaton) -> _Compiled:
    c = A._cache.get("compiled")
    if c is None:
        c = A._cache["compiled"] = _Compiled(A)
    return c


def within_k(A: BAutomaton, w: Sequence, k: int) -> bool:
    """Whether the B-value of ``w`` is at most ``k``."""
    return _compiled(A).member(w, k)


def _weight(vec: ProfileVector) -> int:
    return sum(x for p in vec for x in p if x is not None)


def increment_bound(A: BAutomaton, w: Sequence):
    """Least total number of increments over accepting runs (inf if none)."""
    w = tuple(w)
    n = len(w)
    out_eps = defaultdict(list)
    out_let = defaultdict(list)
    for p, a, q, m in A.transitions:
        if a is EPS:
            out_eps[p].append((q, _weight(m)))
        else:
            out_let[(p, a)].append((q, _weight(m)))
    dist = {}
    heap = [(0, 0, q) for q in A.initial]
    heapq.heapify(heap)
    while heap:
        d, i, p = heapq.heappop(heap)
        if (i, p) in dist:
            continue
        dist[(i, p)] = d
        if i == n and p in A.final:
            return d
        for q, c in out_eps[p]:
            if (i, q) not in dist:
                heapq.heappush(heap, (d + c, i, q))
        if i < n:
            for q, c in out_let[(p, w[i])]:
                if (i + 1, q) not in dist:
                    heapq.heappush(heap, (d + c, i + 1, q))
    return INF


def evaluate_word(A: BAutomaton, w: Sequence):
    """Exact B-value: inf over accepting runs of the largest checked value."""
    upper = increment_bound(A, w)
    if upper == INF:
        return INF
    # gallop first: capped valuations grow like (k+1)^counters
    lo, hi = 0, upper
    probe = 0
    while probe < upper:
        if within_k(A, w, probe):
            hi = probe
            break
        lo = probe + 1
        probe = 2 * probe + 1
    if hi > upper:
        hi = upper
    while lo < hi:
        mid = (lo + hi) // 2
        if within_k(A, w, mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def value_leq_k_nfa(A: BAutomaton, k: int) -> Nfa:
    """Plain NFA for ``{w : value(w) <= k}`` over states x capped valuations."""
    comp = _compiled(A)
    maps = comp.maps_for(k)
    radix = (k + 1) ** A.counters
    pid_of = {m: i for i, m in enumerate(comp.profiles)}
    out = Nfa(A.alphabet)
    start = [(q, 0) for q in A.initial]
    out.initial = set(start)
    out.states.update(start)
    by_src = defaultdict(list)
    for p, a, q, m in A.transitions:
        by_src[p].append((a, q, pid_of[m]))
    todo = list(start)
    while todo:
        p, v = todo.pop()
        if p in A.final:
            out.final.add((p, v))
        for a, q, pid in by_src[p]:
            v2 = int(maps[pid, v])
            if v2 < 0:
                continue
            t = (q, v2)
            if t not in out.states:
                todo.append(t)
            out.add((p, v), a, t)
    assert radix > 0
    return out


def within_k_counterexample(L: Nfa, A: BAutomaton, k: int) -> Optional[Tuple]:
    """A word of ``L`` whose value exceeds ``k``, or ``None`` if there is none.

    On-the-fly inclusion check of ``L`` into the capped simulation of ``A``;
    capped frontiers play the role of subset states.  A pair is skipped when
    an explored pair with the same ``L``-state has a smaller frontier.
    """
    comp = _compiled(A)
    final = sorted(A.final)
    start = (L.start(), comp.start(k))
    key0 = (start[0], start[1].tobytes())
    prev = {key0: None}
    explored = defaultdict(list)
    explored[start[0]].append(start[1])
    todo = deque([(key0, start)])
    while todo:
        key, (sl, F) = todo.popleft()
        if sl & L.final and not F[final].any():
            out = []
            while prev[key] is not None:
                key, a = prev[key]
                out.append(a)
            return tuple(reversed(out))
        for a in L.alphabet:
            nl = L.step(sl, a)
            if not nl:
                continue
            nF = comp.step(F, a, k)
            nkey = (nl, nF.tobytes())
            if nkey in prev:
                continue
            if any(not (old & ~nF).any() for old in explored[nl]):
                continue
            explored[nl].append(nF)
            prev[nkey] = (key, a)
            todo.append((nkey, (nl, nF)))
    return None


# -- constructions ---------------------------------------------------------------------


def char_automaton(n: Nfa, alphabet=None) -> BAutomaton:
    """Value 0 on the language of ``n``, infinity elsewhere (one idle counter)."""
    b = Builder(alphabet or n.alphabet, 1)
    neutral = monoid.vector_neutral(1)
    for q in n.states:
        b.state(q)
    b.initial = set(n.initial)
    b.final = set(n.final)
    for p, a, q in n.transitions():
        b.add(p, a, q, neutral)
    return b.build()


def b_min(A: BAutomaton, B: BAutomaton) -> BAutomaton:
    """Disjoint union: value = min(value_A, value_B) exactly."""
    alphabet = tuple(dict.fromkeys(A.alphabet + B.alphabet))
    c = max(A.counters, B.counters)
    b = Builder(alphabet, c)
    for tag, X in ((0, A), (1, B)):
        for q in range(X.n_states):
            b.state((tag, q))
        b.initial |= {(tag, q) for q in X.initial}
        b.final |= {(tag, q) for q in X.final}
        for p, a, q, m in X.transitions:
            b.add((tag, p), a, (tag, q), _pad_vec(m, 0, c))
    out = b.build()
    return out


def b_max(A: BAutomaton, B: BAutomaton) -> BAutomaton:
    """Synchronous product with disjoint counters: value = max exactly."""
    alphabet = tuple(a for a in A.alphabet if a in set(B.alphabet))
    c = A.counters + B.counters
    b = Builder(alphabet, c)
    outA = defaultdict(list)
    outB = defaultdict(list)
    for p, a, q, m in A.transitions:
        outA[p].append((a, q, m))
    for p, a, q, m in B.transitions:
        outB[p].append((a, q, m))
    start = [(p, q) for p in A.initial for q in B.initial]
    b.initial = set(start)
    seen = set(start)
    for s in start:
        b.state(s)
    todo = list(start)
    while todo:
        p, q = todo.pop()
        if p in A.final and q in B.final:
            b.final.add((p, q))
        moves = []
        for a, p2, m in outA[p]:
            if a is EPS:
                moves.append(((p2, q), EPS, _pad_vec(m, 0, c)))
                continue
            for a2, q2, m2 in outB[q]:
                if a2 == a:
                    moves.append(((p2, q2), a, tuple(m) + tuple(m2)))
        for a2, q2, m2 in outB[q]:
            if a2 is EPS:
                moves.append(((p, q2), EPS, _pad_vec(m2, A.counters, c)))
        for t, a, m in moves:
            b.add((p, q), a, t, m)
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return b.build()


def constant(alphabet, value: int = 0) -> BAutomaton:
    """Value ``value`` on every word, the empty word included."""
    b = Builder(alphabet, 1)
    if value == 0:
        b.initial = {0}
        b.final = {0}
        for a in alphabet:
            b.add(0, a, 0, monoid.vector_neutral(1))
        b.state(0)
        return b.build()
    # every accepting run passes the single epsilon-move carrying the increments
    b.initial = {"s"}
    b.final = {"t"}
    b.add("s", EPS, "t", ((value, None, None),))
    for a in alphabet:
        b.add("t", a, "t", monoid.vector_neutral(1))
    return b.build()


def combine_by_cases(f: BAutomaton, g: BAutomaton, L: Nfa) -> BAutomaton:
    """Value ``f(w)`` for ``w`` in ``L`` and ``g(w)`` otherwise."""
    alphabet = tuple(dict.fromkeys(f.alphabet + g.alphabet))
    chi_in = char_automaton(L, alphabet)
    chi_out = char_automaton(nfa_complement(L, alphabet), alphabet)
    return b_max(b_min(f, chi_out), b_min(g, chi_in))


# -- epsilon elimination ---------------------------------------------------------------


def eps_closures(A: BAutomaton, m=None) -> List[Dict[int, Antichain]]:
    """Minimal annotations of epsilon-paths ``p ~> q`` for every source ``p``."""
    concat = m.concat if m is not None else monoid.vector_concat
    eps_out = defaultdict(list)
    for p, a, q, prof in A.transitions:
        if a is EPS:
            eps_out[p].append((q, prof))
    neutral = monoid.vector_neutral(A.counters)
    out = []
    for p in range(A.n_states):
        clos: Dict[int, Antichain] = {p: Antichain(items=[neutral])}
        todo = [(p, neutral)]
        while todo:
            x, cur = todo.pop()
            if not clos[x].__contains__(cur):
                continue  # evicted meanwhile by a smaller annotation
            for y, prof in eps_out[x]:
                nxt = concat(cur, prof)
                chain = clos.setdefault(y, Antichain())
                if chain.insert(nxt):
                    todo.append((y, nxt))
        out.append(clos)
    return out


def eps_eliminate(A: BAutomaton, cap: Optional[int] = None) -> BAutomaton:
    """Equivalent epsilon-free automaton.

    Every letter transition absorbs the epsilon-paths following it; a fresh
    initial state absorbs the leading ones.  Per (source, letter, target) only
    profile-minimal annotations are kept, which leaves the inf-over-runs value
    unchanged on every non-empty word.  The empty word keeps its acceptance;
    its value becomes 0 (there is no transition left to carry a cost).

    With ``cap`` every annotation is cut to entries ``<= cap`` (a monoid
    homomorphism); the result then only preserves what the capped profiles
    see, e.g. the abstraction used by the limitedness check.
    """
    if not A.has_eps:
        return A if cap is None else _capped(A, cap)
    m = monoid.ProfileMonoid(A.counters, cap)
    clos = eps_closures(A, m if cap is not None else None)
    letters = defaultdict(list)
    for p, a, q, e in A.transitions:
        if a is not EPS:
            letters[p].append((a, q, e))
    b = Builder(A.alphabet, A.counters)
    for q in range(A.n_states):
        b.state(q)
    start = "init"
    b.initial = {start}
    b.final = set(A.final)
    for i in A.initial:
        if any(f in clos[i] for f in A.final):
            b.final.add(start)

    def emit(src, lead, p):
        for a, y, e in letters[p]:
            for q, chain in clos[y].items():
                for tail in chain:
                    prof = m.concat(m.normalize(e), tail)
                    if lead is not None:
                        prof = m.concat(lead, prof)
                    b.add(src, a, q, prof)

    for p in range(A.n_states):
        emit(p, None, p)
    for i in A.initial:
        for x, chain in clos[i].items():
            for lead in chain:
                emit(start, lead, x)
    return trim(b.build())


def _capped(A: BAutomaton, cap: int) -> BAutomaton:
    m = monoid.ProfileMonoid(A.counters, cap)
    b = Builder(A.alphabet, A.counters)
    for q in range(A.n_states):
        b.state(q)
    b.initial = set(A.initial)
    b.final = set(A.final)
    for p, a, q, e in A.transitions:
        b.add(p, a, q, m.normalize(e))
    return b.build()


# -- reduction ------------------------------------------------------------------------


def reduce(A: BAutomaton) -> BAutomaton:
    """Trim, then merge forward-bisimilar states (values are preserved exactly)."""
    A = trim(A)
    if A.n_states == 0:
        return A
    block = [1 if q in A.final else 0 for q in range(A.n_states)]
    out = defaultdict(list)
    for p, a, q, m in A.transitions:
        out[p].append((a, m, q))
    n_blocks = len(set(block))
    while True:
        sigs = {}
        new = []
        for q in range(A.n_states):
            sig = (block[q], frozenset((repr(a), m, block[t]) for a, m, t in out[q]))
            new.append(sigs.setdefault(sig, len(sigs)))
        if len(sigs) == n_blocks:
            break
        block, n_blocks = new, len(sigs)
    block = new
    b = Builder(A.alphabet, A.counters)
    for q in range(A.n_states):
        b.state(block[q])
    b.initial = {block[q] for q in A.initial}
    b.final = {block[q] for q in A.final}
    for p, a, q, m in A.transitions:
        b.add(block[p], a, block[q], m)
    return trim(b.build())


# -- padded alphabets and transducers -----------------------------------------------------


def padded_alphabet(sigma: Sequence[str], n: int, include_pad: bool = False):
    letters = [v for v in product(tuple(sigma) + (PAD,), repeat=n)]
    if not include_pad:
        letters = [v for v in letters if any(x != PAD for x in v)]
    return tuple(letters)


def conv(words: Sequence[Sequence[str]], alignment: str = "left") -> Tuple[Tuple[str, ...], ...]:
    words = [tuple(w) for w in words]
    n = max((len(w) for w in words), default=0)
    if alignment == "left":
        cols = [w + (PAD,) * (n - len(w)) for w in words]
    elif alignment == "right":
        cols = [(PAD,) * (n - len(w)) + w for w in words]
    else:
        raise ValueError(f"unknown alignment {alignment!r}")
    return tuple(zip(*cols)) if words else ()


def unconv(cw: Sequence[Sequence[str]], tracks: Optional[int] = None) -> Tuple[Tuple[str, ...], ...]:
    if not cw:
        return tuple(() for _ in range(tracks or 0))
    n = len(cw[0])
    return tuple(tuple(col[i] for col in cw if col[i] != PAD) for i in range(n))


def correct_padding_nfa(sigma: Sequence[str], n: int, alignment: str = "left") -> Nfa:
    """Deterministic automaton for the correctly padded words over n tracks.

    A state is the set of tracks currently padding.  Left-aligned: a track
    that started padding keeps padding.  Right-aligned: a padding track may
    switch to letters but never back.  The all-pad column never occurs.
    """
    letters = padded_alphabet(sigma, n)
    out = Nfa(letters)
    states = [frozenset(s) for s in _subsets(range(n)) if len(s) < n]
    out.states = set(states)
    if alignment == "left":
        out.initial = {frozenset()}
    else:
        out.initial = set(states)
    out.final = set(states)
    for s in states:
        for v in letters:
            pads = frozenset(i for i, x in enumerate(v) if x == PAD)
            if alignment == "left" and s <= pads:
                out.add(s, v, pads)
            if alignment == "right" and pads <= s:
                out.add(s, v, pads)
    if alignment == "right":
        # right-aligned words may start in any padding pattern; keep one start
        start = "start"
        out.states.add(start)
        out.initial = {start}
        out.final.add(start)
        for v in letters:
            pads = frozenset(i for i, x in enumerate(v) if x == PAD)
            out.add(start, v, pads)
    return out


def is_correctly_padded(cw, alignment: str = "left") -> bool:
    if not cw:
        return True
    tracks = unconv(cw)
    return tuple(cw) == conv(tracks, alignment)


def _subsets(xs):
    xs = list(xs)
    for mask in range(1 << len(xs)):
        yield [x for i, x in enumerate(xs) if mask >> i & 1]


@dataclass(eq=False)
class ResourceTransducer:
    """A B-automaton read over conv of a word tuple.

    ``slack`` records the additive tolerance accumulated by approximate
    projections: the computed value ``c`` satisfies ``c <= true <= c + slack``.
    """

    automaton: BAutomaton
    sigma: Tuple[str, ...]
    tracks: int
    alignment: str = "right"
    slack: int = 0

    def value(self, *words):
        if len(words) != self.tracks:
            raise AutomatonError(f"expected {self.tracks} words, got {len(words)}")
        return evaluate_word(self.automaton, conv(words, self.alignment))

    def within(self, k: int, *words) -> bool:
        return within_k(self.automaton, conv(words, self.alignment), k)

    def padding_nfa(self) -> Nfa:
        return correct_padding_nfa(self.sigma, self.tracks, self.alignment)

    def reduced(self) -> "ResourceTransducer":
        return ResourceTransducer(
            reduce(eps_eliminate(self.automaton)), self.sigma, self.tracks, self.alignment, self.slack
        )


def restrict_to_padding(T: ResourceTransducer) -> ResourceTransducer:
    """Force infinity on incorrectly padded inputs (product with the padding DFA)."""
    chi = char_automaton(T.padding_nfa(), padded_alphabet(T.sigma, T.tracks))
    A = b_max(T.automaton, chi)
    # the padding check adds one idle counter; drop it again
    A = _drop_idle_counters(A, T.automaton.counters)
    return ResourceTransducer(trim(A), T.sigma, T.tracks, T.alignment, T.slack)


def compact_counters(A: BAutomaton) -> BAutomaton:
    """Remove counters that no transition touches (at least one is kept)."""
    used = [
        c for c in range(A.counters) if any(m[c] != monoid.NEUTRAL for *_, m in A.transitions)
    ] or [0]
    if len(used) == A.counters:
        return A
    trans = tuple((p, a, q, tuple(m[c] for c in used)) for p, a, q, m in A.transitions)
    return BAutomaton(A.n_states, A.alphabet, A.initial, A.final, len(used), trans, A.labels)


def _drop_idle_counters(A: BAutomaton, keep: int) -> BAutomaton:
    trans = tuple((p, a, q, m[:keep]) for p, a, q, m in A.transitions)
    return BAutomaton(A.n_states, A.alphabet, A.initial, A.final, keep, trans, A.labels)


def cylindrify(T: ResourceTransducer, positions: Sequence[int], tracks: int) -> ResourceTransducer:
    """Place the tracks of ``T`` at ``positions`` among ``tracks`` tracks.

    Other tracks are unconstrained; correct padding of the whole tuple is
    enforced afterwards.
    """
    positions = list(positions)
    if len(positions) != T.tracks or len(set(positions)) != len(positions):
        raise AutomatonError("positions must list each source track once")
    free = [i for i in range(tracks) if i not in positions]
    fill = tuple(T.sigma) + (PAD,)
    letters = padded_alphabet(T.sigma, tracks)
    A = T.automaton
    trans = []
    for p, a, q, m in A.transitions:
        if a is EPS:
            trans.append((p, a, q, m))
            continue
        for extra in product(fill, repeat=len(free)):
            v = [None] * tracks
            for i, x in zip(positions, a):
                v[i] = x
            for i, x in zip(free, extra):
                v[i] = x
            v = tuple(v)
            if all(x == PAD for x in v):
                continue
            trans.append((p, v, q, m))
    B = BAutomaton(A.n_states, letters, A.initial, A.final, A.counters, tuple(trans), A.labels)
    B = _allow_source_pad(B, T, positions, free, fill)
    return restrict_to_padding(ResourceTransducer(B, T.sigma, tracks, T.alignment, T.slack))


def _allow_source_pad(B, T, positions, free, fill):
    """Columns where every source track pads: the source automaton idles there.

    For right alignment those columns precede the source word, for left
    alignment they follow it; the idle phase is modelled with two copies.
    """
    if not free:
        return B
    tracks = len(positions) + len(free)
    pad_cols = []
    for extra in product(fill, repeat=len(free)):
        if all(x == PAD for x in extra):
            continue
        v = [PAD] * tracks
        for i, x in zip(free, extra):
            v[i] = x
        pad_cols.append(tuple(v))
    n = B.n_states
    idle = n  # extra state: reading source-pad columns
    trans = list(B.transitions)
    neutral = monoid.vector_neutral(B.counters)
    if T.alignment == "right":
        for v in pad_cols:
            trans.append((idle, v, idle, neutral))
        for q in B.initial:
            trans.append((idle, EPS, q, neutral))
        initial = set(B.initial) | {idle}
        final = set(B.final)
        if B.initial & B.final:
            final.add(idle)
    else:
        for v in pad_cols:
            trans.append((idle, v, idle, neutral))
        for q in B.final:
            trans.append((q, EPS, idle, neutral))
        initial = set(B.initial)
        final = set(B.final) | {idle}
    labels = (B.labels + ("idle",)) if B.labels else None
    return BAutomaton(n + 1, B.alphabet, initial, final, B.counters, tuple(trans), labels)


def reorder(T: ResourceTransducer, perm: Sequence[int]) -> ResourceTransducer:
    """New track ``i`` is old track ``perm[i]``."""
    A = T.automaton
    trans = tuple(
        (p, a if a is EPS else tuple(a[j] for j in perm), q, m) for p, a, q, m in A.transitions
    )
    letters = padded_alphabet(T.sigma, T.tracks)
    B = BAutomaton(A.n_states, letters, A.initial, A.final, A.counters, trans, A.labels)
    return ResourceTransducer(B, T.sigma, T.tracks, T.alignment, T.slack)


def transducer_min(S: ResourceTransducer, T: ResourceTransducer) -> ResourceTransducer:
    _same_shape(S, T)
    return ResourceTransducer(
        b_min(S.automaton, T.automaton), S.sigma, S.tracks, S.alignment, max(S.slack, T.slack)
    )


def transducer_max(S: ResourceTransducer, T: ResourceTransducer) -> ResourceTransducer:
    _same_shape(S, T)
    return ResourceTransducer(
        b_max(S.automaton, T.automaton), S.sigma, S.tracks, S.alignment, max(S.slack, T.slack)
    )


def _same_shape(S, T):
    if S.tracks != T.tracks or S.alignment != T.alignment or tuple(S.sigma) != tuple(T.sigma):
        raise AutomatonError("transducers differ in tracks, alignment or alphabet")


def char_transducer(n: Nfa, sigma, tracks: int, alignment: str = "right") -> ResourceTransducer:
    """Characteristic transducer of a regular set of convolutions."""
    T = ResourceTransducer(char_automaton(n, padded_alphabet(sigma, tracks)), tuple(sigma), tracks, alignment)
    return restrict_to_padding(T)


def lift(n: Nfa) -> Nfa:
    """The same language over one-track letters ``(a,)``."""
    out = Nfa(tuple((a,) for a in n.alphabet), set(n.initial), set(n.final), states=set(n.states))
    for p, a, q in n.transitions():
        out.add(p, EPS if a is EPS else (a,), q)
    return out


def track_language(L: Nfa, sigma, track: int, tracks: int, alignment: str = "right") -> ResourceTransducer:
    """Value 0 iff component ``track`` lies in ``L`` (other tracks arbitrary)."""
    one = ResourceTransducer(char_automaton(lift(L), padded_alphabet(sigma, 1)), tuple(sigma), 1, alignment)
    return cylindrify(one, [track], tracks)


def equality_transducer(sigma, alignment: str = "right") -> ResourceTransducer:
    b = Builder(padded_alphabet(sigma, 2), 1)
    b.initial = {"q"}
    b.final = {"q"}
    b.state("q")
    for a in sigma:
        b.add("q", (a, a), "q", monoid.vector_neutral(1))
    return ResourceTransducer(b.build(), tuple(sigma), 2, alignment)


def inequality_transducer(sigma, alignment: str = "right") -> ResourceTransducer:
    """Value 0 on pairs of different words, infinity on equal pairs."""
    b = Builder(padded_alphabet(sigma, 2), 1)
    z = monoid.vector_neutral(1)
    if alignment == "left":
        b.initial = {"eq"}
        b.final = {"ne", "l", "r"}
        for a in sigma:
            b.add("eq", (a, a), "eq", z)
            b.add("ne", (a, a), "ne", z)
            b.add("eq", (a, PAD), "l", z)
            b.add("l", (a, PAD), "l", z)
            b.add("eq", (PAD, a), "r", z)
            b.add("r", (PAD, a), "r", z)
            for c in sigma:
                if c != a:
                    b.add("eq", (a, c), "ne", z)
                    b.add("ne", (a, c), "ne", z)
                    b.add("ne", (a, PAD), "l", z)
                    b.add("ne", (PAD, a), "r", z)
            b.add("ne", (a, PAD), "l", z)
            b.add("ne", (PAD, a), "r", z)
    else:
        # padding first: any pad column already makes the lengths differ
        b.initial = {"eq"}
        b.final = {"len", "ne"}
        fill = tuple(sigma) + (PAD,)
        every = [(x, y) for x in fill for y in fill if (x, y) != (PAD, PAD)]
        for a in sigma:
            b.add("eq", (a, PAD), "len", z)
            b.add("eq", (PAD, a), "len", z)
            for c in sigma:
                b.add("eq", (a, c), "eq" if a == c else "ne", z)
                b.add("ne", (a, c), "ne", z)
        for v in every:
            b.add("len", v, "len", z)
    T = ResourceTransducer(trim(b.build()), tuple(sigma), 2, alignment)
    return restrict_to_padding(T)


def inf_projection(T: ResourceTransducer, drop: int, exact: bool = False) -> ResourceTransducer:
    """Infimum over the dropped track (values on bad padding forced to infinity).

    The dropped track is erased from every letter; columns that become the
    all-pad symbol are where the dropped word is longer than the rest.  With
    ``exact=False`` they are removed and :func:`pad_fix` adjusts the initial
    (right alignment) or final (left alignment) states; the value then
    under-approximates the infimum by at most ``states * max_increments``,
    recorded in ``slack``.  With ``exact=True`` those columns become
    epsilon-moves confined to the padding phase, which is exact.
    """
    if T.tracks < 1 or not 0 <= drop < T.tracks:
        raise AutomatonError("dimension underflow")
    T = restrict_to_padding(T)
    A = T.automaton
    n = T.tracks - 1
    if n == 0:
        raise AutomatonError("projecting the last track leaves a constant; use a sentence check")
    letters = padded_alphabet(T.sigma, n)
    main, pads = [], []
    for p, a, q, m in A.transitions:
        if a is EPS:
            main.append((p, EPS, q, m))
            continue
        b = a[:drop] + a[drop + 1 :]
        if all(x == PAD for x in b):
            pads.append((p, q, m))
        else:
            main.append((p, b, q, m))
    if not exact:
        B = BAutomaton(A.n_states, letters, A.initial, A.final, A.counters, tuple(main), A.labels)
        B = pad_fix(B, pads, T.alignment)
        slack = T.slack + A.n_states * A.max_increments
        return ResourceTransducer(trim(B), T.sigma, n, T.alignment, slack)
    # exact: a second copy of the states reads pad columns as epsilon-moves
    N = A.n_states
    trans = list(main)
    if T.alignment == "right":
        # copy N+q: still in the leading padding phase
        for p, q, m in pads:
            trans.append((N + p, EPS, N + q, m))
        for q in range(N):
            trans.append((N + q, EPS, q, monoid.vector_neutral(A.counters)))
        initial = {N + q for q in A.initial}
        final = set(A.final)
    else:
        for p, q, m in pads:
            trans.append((N + p, EPS, N + q, m))
        for q in range(N):
            trans.append((q, EPS, N + q, monoid.vector_neutral(A.counters)))
        initial = set(A.initial)
        final = {N + q for q in A.final}
    labels = (A.labels + tuple("pad:" + x for x in A.labels)) if A.labels else None
    B = BAutomaton(2 * N, letters, initial, final, A.counters, tuple(trans), labels)
    return ResourceTransducer(trim(B), T.sigma, n, T.alignment, T.slack)


def pad_fix(A: BAutomaton, pads, alignment: str) -> BAutomaton:
    """Absorb runs over all-pad columns into the state sets.

    Left alignment: states that reach a final state through pad columns only
    become final.  Right alignment: states reachable from an initial state
    through pad columns only become initial.
    """
    if alignment == "left":
        back = defaultdict(set)
        for p, q, _ in pads:
            back[q].add(p)
        final = _reach(A.final, back)
        return BAutomaton(A.n_states, A.alphabet, A.initial, final, A.counters, A.transitions, A.labels)
    fwd = defaultdict(set)
    for p, q, _ in pads:
        fwd[p].add(q)
    initial = _reach(A.initial, fwd)
    return BAutomaton(A.n_states, A.alphabet, initial, A.final, A.counters, A.transitions, A.labels)


# -- serialisation ------------------------------------------------------------------------


def _letter_json(a):
    if a is EPS:
        return None
    return list(a) if isinstance(a, tuple) else a


def _letter_from_json(a):
    if a is None:
        return EPS
    return tuple(a) if isinstance(a, list) else a


def to_json(A: BAutomaton) -> dict:
    trans = sorted(
        ([p, _letter_json(a), q, [profile_to_opword(x) for x in m]] for p, a, q, m in A.transitions),
        key=json.dumps,
    )
    return {
        "states": A.n_states,
        "labels": list(A.labels) if A.labels else None,
        "alphabet": [_letter_json(a) for a in A.alphabet],
        "initial": sorted(A.initial),
        "final": sorted(A.final),
        "counters": A.counters,
        "transitions": trans,
    }


def from_json(data) -> BAutomaton:
    if isinstance(data, str):
        data = json.loads(data)
    trans = []
    for p, a, q, ops in data["transitions"]:
        if len(ops) != data["counters"]:
            raise AutomatonError(f"transition {p}->{q}: expected {data['counters']} op words")
        trans.append((p, _letter_from_json(a), q, tuple(ops_to_profile(o) for o in ops)))
    labels = tuple(data["labels"]) if data.get("labels") else None
    return BAutomaton(
        data["states"],
        tuple(_letter_from_json(a) for a in data["alphabet"]),
        frozenset(data["initial"]),
        frozenset(data["final"]),
        data["counters"],
        tuple(trans),
        labels,
    )


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def _letter_text(a) -> str:
    if a is EPS:
        return "eps"
    if isinstance(a, tuple):
        return a[0] if len(a) == 1 else "(" + ",".join(a) + ")"
    return str(a)


def to_dot(A: BAutomaton, name: str = "B") -> str:
    lines = [f'digraph "{_dot_escape(name)}" {{', "  rankdir=LR;"]
    for q in range(A.n_states):
        shape = "doublecircle" if q in A.final else "circle"
        lines.append(f'  {q} [label="{_dot_escape(A.label(q))}", shape={shape}];')
    for i, q in enumerate(sorted(A.initial)):
        lines.append(f"  init{i} [shape=point];")
        lines.append(f"  init{i} -> {q};")
    for p, a, q, m in sorted(A.transitions, key=lambda t: (t[0], t[2], repr(t[1]), repr(t[3]))):
        ops = "/".join(profile_to_opword(x) or "-" for x in m)
        label = _dot_escape(f"{_letter_text(a)} : {ops}")
        lines.append(f'  {p} -> {q} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def block_counter(alphabet=("a", "b"), count: str = "a", reset: Optional[str] = "b") -> BAutomaton:
    """One state, one counter: ``count`` increments, ``reset`` resets.

    With the defaults this is the automaton measuring the longest block of
    consecutive ``a``; with ``reset=None`` every other letter is neutral and
    the value is the number of ``count`` letters.
    """
    b = Builder(alphabet, 1)
    b.initial = {0}
    b.final = {0}
    b.state(0)
    for x in alphabet:
        if x == count:
            prof = monoid.INC
        elif x == reset:
            prof = monoid.RESET
        else:
            prof = monoid.NEUTRAL
        b.add(0, x, 0, (prof,))
    return b.build()
