"""Annotated epsilon-NFAs and the two-sided saturation procedure.

Two automata share one state per replacement rule.  Automaton 1 reads the
changed prefix of the source configuration, automaton 2 that of the target;
a pair of runs meeting in the same rule-state witnesses a replacement path.
Saturation adds annotated epsilon-transitions out of rule-states until both
automata also simulate sequences of replacement steps on their own.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .monoid import Antichain, ProfileMonoid, ProfileVector, profile_to_ops
from .nfa import EPS, words_upto
from .rprs import AnnotatedPrs, AnnotatedRule, fmt_word

State = Hashable


@dataclass
class AnnotatedNfa:
    """Epsilon-NFA whose transitions carry monoid elements."""

    alphabet: Tuple[str, ...]
    monoid: ProfileMonoid
    states: List[State] = field(default_factory=list)
    initial: set = field(default_factory=set)
    final: set = field(default_factory=set)
    # (source, letter or EPS) -> target -> antichain of annotations
    delta: Dict[Tuple[State, Optional[str]], Dict[State, Antichain]] = field(default_factory=dict)

    def add_state(self, q: State) -> None:
        if q not in self._index:
            self._index[q] = len(self.states)
            self.states.append(q)

    def __post_init__(self):
        self._index = {q: i for i, q in enumerate(self.states)}

    def add(self, p: State, a, q: State, m: ProfileVector) -> bool:
        """Antichain-insert a transition; returns whether anything changed."""
        self.add_state(p)
        self.add_state(q)
        row = self.delta.setdefault((p, a), {})
        chain = row.get(q)
        if chain is None:
            chain = row[q] = Antichain(self.monoid.leq)
        return chain.insert(m)

    def out(self, p: State, a) -> Dict[State, Antichain]:
        return self.delta.get((p, a), {})

    def transitions(self):
        for (p, a), row in self.delta.items():
            for q, chain in row.items():
                for m in chain:
                    yield p, a, q, m

    def eps_count(self) -> int:
        return sum(len(c) for (p, a), row in self.delta.items() if a is EPS for c in row.values())

    def snapshot(self) -> frozenset:
        return frozenset(self.transitions())

    def copy(self) -> "AnnotatedNfa":
        out = AnnotatedNfa(self.alphabet, self.monoid, list(self.states), set(self.initial), set(self.final))
        out.delta = {k: {q: c.copy() for q, c in row.items()} for k, row in self.delta.items()}
        return out


def _eps_close(nfa: AnnotatedNfa, cur: Dict[State, Antichain]) -> Dict[State, Antichain]:
    concat = nfa.monoid.concat
    todo = [(q, m) for q, chain in cur.items() for m in chain]
    while todo:
        x, m = todo.pop()
        if m not in cur[x]:
            continue  # evicted by a smaller annotation, which is queued itself
        for y, chain in nfa.out(x, EPS).items():
            for e in chain:
                nxt = concat(m, e)
                target = cur.get(y)
                if target is None:
                    target = cur[y] = Antichain(nfa.monoid.leq)
                if target.insert(nxt):
                    todo.append((y, nxt))
    return cur


def min_annotations(nfa: AnnotatedNfa, source: State, word: Sequence[str]) -> Dict[State, Antichain]:
    """Minimal annotations of all runs from ``source`` on ``word``, per end state."""
    concat = nfa.monoid.concat
    cur = _eps_close(nfa, {source: Antichain(nfa.monoid.leq, [nfa.monoid.neutral])})
    for a in word:
        nxt: Dict[State, Antichain] = {}
        for x, chain in cur.items():
            for y, edges in nfa.out(x, a).items():
                for m in chain:
                    for e in edges:
                        nxt.setdefault(y, Antichain(nfa.monoid.leq)).insert(concat(m, e))
        cur = _eps_close(nfa, nxt)
        if not cur:
            break
    return cur


def rule_state(i: int) -> Tuple[str, int]:
    return ("rule", i)


def prefix_state(side: int, v: Sequence[str]) -> Tuple[str, int, Tuple[str, ...]]:
    return ("pre", side, tuple(v))


@dataclass
class SaturationResult:
    automaton_1: AnnotatedNfa
    automaton_2: AnnotatedNfa
    shared_states: Tuple[State, ...]
    rules: Tuple[AnnotatedRule, ...]
    ell: int
    monoid: ProfileMonoid
    passes: int = 0
    _runs: Dict = field(default_factory=dict, repr=False, compare=False)

    def runs(self, side: int, w: Sequence[str]) -> Dict[State, Antichain]:
        """Memoised :func:`min_annotations` from the start state of automaton ``side``."""
        key = (side, tuple(w))
        got = self._runs.get(key)
        if got is None:
            if side == 1:
                got = min_annotations(self.automaton_1, self.start_1, w)
            else:
                got = min_annotations(self.automaton_2, self.start_2, w)
            self._runs[key] = got
        return got

    @property
    def start_1(self) -> State:
        return prefix_state(1, ())

    @property
    def start_2(self) -> State:
        return prefix_state(2, ())

    def rule_of(self, s: State) -> AnnotatedRule:
        return self.rules[s[1]]

    def label(self, q: State) -> str:
        if q[0] == "rule":
            r = self.rules[q[1]]
            ann = "/".join(profile_to_ops(p) or "-" for p in r.annotation)
            return f"q({fmt_word(r.lhs)},{fmt_word(r.rhs)},{ann})"
        return f"q{q[1]},{''.join(q[2]) or 'eps'}"

    def witnesses(self, w1: Sequence[str], w2: Sequence[str]) -> List[ProfileVector]:
        """Minimal combined annotations ``m_l . m_bar . rev(m_r)`` over all run pairs.

        A pair of runs reads ``w1'`` in automaton 1 and ``w2'`` in automaton 2
        (``w1 = w1' x``, ``w2 = w2' x``) and meets in one rule-state.
        """
        w1, w2 = tuple(w1), tuple(w2)
        m = self.monoid
        out = Antichain(m.leq)
        common = 0
        while common < min(len(w1), len(w2)) and w1[len(w1) - 1 - common] == w2[len(w2) - 1 - common]:
            common += 1
        for j in range(common + 1):
            p1 = w1[: len(w1) - j]
            p2 = w2[: len(w2) - j]
            r1 = self.runs(1, p1)
            r2 = self.runs(2, p2)
            for s in self.shared_states:
                if s not in r1 or s not in r2:
                    continue
                bar = self.rule_of(s).annotation
                for ml in r1[s]:
                    for mr in r2[s]:
                        out.insert(m.concat(m.concat(ml, bar), m.rev(mr)))
        return out.items()


def skeleton(aps: AnnotatedPrs) -> SaturationResult:
    """Initial automata: prefix chains plus neutral links into rule-states."""
    m = aps.monoid
    ell = aps.max_side
    sigma = tuple(aps.alphabet)
    a1 = AnnotatedNfa(sigma, m)
    a2 = AnnotatedNfa(sigma, m)
    for side, nfa in ((1, a1), (2, a2)):
        for v in words_upto(sigma, ell):
            nfa.add_state(prefix_state(side, v))
        for v in words_upto(sigma, ell - 1):
            for a in sigma:
                nfa.add(prefix_state(side, v), a, prefix_state(side, v + (a,)), m.neutral)
        nfa.initial = {prefix_state(side, ())}
    shared = []
    for i, r in enumerate(aps.rules):
        s = rule_state(i)
        shared.append(s)
        a1.add(prefix_state(1, r.lhs), EPS, s, m.neutral)
        a2.add(prefix_state(2, r.rhs), EPS, s, m.neutral)
    return SaturationResult(a1, a2, tuple(shared), tuple(aps.rules), ell, m)


def saturation_pass(sr: SaturationResult) -> int:
    """One round over all words of length <= ell; returns the number of inserts."""
    m = sr.monoid
    a1, a2 = sr.automaton_1, sr.automaton_2
    sr._runs.clear()
    shared = set(sr.shared_states)
    inserted = 0
    for w in words_upto(a1.alphabet, sr.ell):
        r1 = min_annotations(a1, sr.start_1, w)
        r2 = min_annotations(a2, sr.start_2, w)
        # a run of automaton 2 into a rule-state lets automaton 1 skip ahead
        for s in sorted(shared & set(r2), key=lambda x: x[1]):
            bar = sr.rule_of(s).annotation
            for mr in r2[s].items():
                head = m.concat(bar, m.rev(mr))
                for q, chain in r1.items():
                    for ml in chain.items():
                        inserted += a1.add(s, EPS, q, m.concat(head, ml))
        r1 = min_annotations(a1, sr.start_1, w)
        for s in sorted(shared & set(r1), key=lambda x: x[1]):
            bar = sr.rule_of(s).annotation
            for ml in r1[s].items():
                head = m.concat(m.rev(bar), m.rev(ml))
                for q, chain in r2.items():
                    for mr in chain.items():
                        inserted += a2.add(s, EPS, q, m.concat(head, mr))
    return inserted


def saturate(aps: AnnotatedPrs, max_passes: Optional[int] = None) -> SaturationResult:
    """Run saturation passes until one inserts nothing."""
    sr = skeleton(aps)
    while True:
        sr.passes += 1
        if saturation_pass(sr) == 0:
            return sr
        if max_passes is not None and sr.passes >= max_passes:
            raise RuntimeError(f"saturation did not stabilise within {max_passes} passes")


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(sr: SaturationResult) -> str:
    """Both automata side by side; shared rule-states appear in each cluster."""
    lines = ["digraph saturation {", "  rankdir=LR;"]
    for side, nfa in ((1, sr.automaton_1), (2, sr.automaton_2)):
        lines.append(f"  subgraph cluster_{side} {{")
        lines.append(f'    label="automaton {side}";')
        ids = {q: f"s{side}_{i}" for i, q in enumerate(nfa.states)}
        for q in nfa.states:
            shape = "box" if q[0] == "rule" else "circle"
            lines.append(f'    {ids[q]} [label="{_dot_escape(sr.label(q))}", shape={shape}];')
        for p, a, q, m in sorted(nfa.transitions(), key=lambda t: (ids[t[0]], ids[t[2]], str(t[1]), repr(t[3]))):
            ann = "/".join(profile_to_ops(x) or "-" for x in m)
            letter = "eps" if a is EPS else a
            lines.append(f'    {ids[p]} -> {ids[q]} [label="{_dot_escape(letter + " : " + ann)}"];')
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
