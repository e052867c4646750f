"""Resource transducers from saturation, exact minimal costs, bounded reachability.

Both transducers read ``conv(u, v)`` right-aligned.  Component 1 runs
automaton 1 on the changed prefix of ``u``, component 2 runs automaton 2 on
that of ``v``; a jump from a common rule-state to ``id`` then checks the
common suffix letter by letter.  A ``wait`` state skips the left padding of
the shorter side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from . import costautomata as ca
from . import monoid
from .costautomata import PAD, Builder, ResourceTransducer
from .monoid import NA, ProfileVector
from .limitedness import closure
from .nfa import EPS, Nfa, determinize, from_regex, inclusion_counterexample
from .rprs import Rprs, annotate, annotate_restricted, word
from .saturation import SaturationResult, saturate

INF = math.inf
WAIT = "wait"
ID = "id"


# -- approximate transducer ---------------------------------------------------------------


def _component_moves(sr: SaturationResult):
    """Per side: state -> list of (letter or EPS, target, annotation)."""
    out = []
    for side, nfa in ((1, sr.automaton_1), (2, sr.automaton_2)):
        moves: Dict = {}
        for p, a, q, m in nfa.transitions():
            moves.setdefault(p, []).append((a, q, m))
        for p in moves:
            moves[p].sort(key=repr)
        out.append(moves)
    return out


def _explore(sr: SaturationResult, counters: int, starts, expand) -> ResourceTransducer:
    """Generic product exploration from ``starts`` using ``expand(state)``."""
    sigma = tuple(sr.automaton_1.alphabet)
    b = Builder(ca.padded_alphabet(sigma, 2), counters)
    b.initial = set(starts)
    b.final = {ID}
    seen = set(starts)
    todo = list(starts)
    for s in starts:
        b.state(s)
    neutral = monoid.vector_neutral(counters)
    while todo:
        st = todo.pop()
        if st == ID:
            for a in sigma:
                b.add(ID, (a, a), ID, neutral)
            continue
        for letter, target, prof in expand(st):
            b.add(st, letter, target, prof)
            if target not in seen:
                seen.add(target)
                todo.append(target)
    A = ca.trim(b.build())
    return ResourceTransducer(A, sigma, 2, "right")


def build_transducer_approx(sr: SaturationResult) -> ResourceTransducer:
    """Two counter copies per counter, one per side; ``T <= cost <= 2T+1``."""
    C = sr.monoid.counters
    moves1, moves2 = _component_moves(sr)
    z = monoid.vector_neutral(C)
    shared = set(sr.shared_states)

    def expand(st):
        p1, p2 = st
        out = []
        if p1 == WAIT:
            out.append((EPS, (sr.start_1, p2), z + z))
        else:
            for a, q, m in moves1.get(p1, ()):
                if a is EPS:
                    out.append((EPS, (q, p2), tuple(m) + z))
        if p2 == WAIT:
            out.append((EPS, (p1, sr.start_2), z + z))
        else:
            for a, q, m in moves2.get(p2, ()):
                if a is EPS:
                    out.append((EPS, (p1, q), z + tuple(m)))
        if p1 != WAIT and p2 != WAIT:
            for a, q1, m1 in moves1.get(p1, ()):
                if a is EPS:
                    continue
                for b2, q2, m2 in moves2.get(p2, ()):
                    if b2 is not EPS:
                        out.append(((a, b2), (q1, q2), tuple(m1) + tuple(m2)))
        elif p1 != WAIT:
            for a, q1, m1 in moves1.get(p1, ()):
                if a is not EPS:
                    out.append(((a, PAD), (q1, WAIT), tuple(m1) + z))
        elif p2 != WAIT:
            for b2, q2, m2 in moves2.get(p2, ()):
                if b2 is not EPS:
                    out.append(((PAD, b2), (WAIT, q2), z + tuple(m2)))
        if p1 == p2 and p1 in shared:
            out.append((EPS, ID, z + z))
        return out

    return _explore(sr, 2 * C, [(WAIT, WAIT)], expand)


# -- exact transducer ------------------------------------------------------------------------

# Per counter mode.  SPLIT: the connecting rule resets this counter, so each
# side keeps its own counter to the end.  Otherwise a pair of flags says per
# side whether its last reset is already behind (AFTER) or still ahead.
SPLIT = "s"
BEFORE, AFTER = "b", "a"
MODES = (SPLIT, (BEFORE, BEFORE), (BEFORE, AFTER), (AFTER, BEFORE), (AFTER, AFTER))


def _side_options(mode, side: int, p) -> List[Tuple[object, tuple, Optional[int]]]:
    """Ways one side's profile ``p`` (one counter) is booked under ``mode``.

    Returns ``(new_mode, own_counter_profile, increments_for_middle)``.
    """
    if mode == SPLIT:
        return [(SPLIT, p, 0)]
    flag = mode[side]
    left, mid, right = p

    def with_flag(f):
        return (f, mode[1]) if side == 0 else (mode[0], f)

    if flag == AFTER:
        if right is not NA:
            return []  # no resets after the last one
        return [(mode, monoid.NEUTRAL, left)]
    out = [(mode, p, 0)]
    if right is not NA:
        # this transition holds the last reset: the prefix up to it stays on
        # the own counter, the trailing increments start the middle block
        out.append((with_flag(AFTER), (left, mid, 0), right))
    return out


def _book(modes, side: int, vec: ProfileVector, C: int):
    """All bookings of one side's profile vector: (new modes, own part, middle part)."""
    per_counter = [_side_options(modes[c], side, vec[c]) for c in range(C)]
    for choice in product(*per_counter):
        new = tuple(x[0] for x in choice)
        own = tuple(x[1] for x in choice)
        middle = tuple(x[2] for x in choice)
        yield new, own, middle


def _inc(n: int):
    return (n, NA, NA)


def build_transducer_exact(sr: SaturationResult) -> ResourceTransducer:
    """Three counters per counter (side 1, side 2, middle); exact for ``u != v``.

    The middle block of ``m_l . m_bar . rev(m_r)`` joins the increments after
    the last reset of both sides with the connecting rule's own increments.
    Each side guesses where its last reset is; from then on its increments
    go to the shared middle counter.  If the connecting rule resets the
    counter, the blocks stay apart and the rule's parts are booked on the
    side counters at the jump.
    """
    C = sr.monoid.counters
    moves1, moves2 = _component_moves(sr)
    shared = set(sr.shared_states)

    def assemble(g1, g2, gm):
        return tuple(g1) + tuple(g2) + tuple(gm)

    z = monoid.vector_neutral(C)

    def middle_of(parts):
        return tuple(_inc(n) for n in parts)

    def expand(st):
        p1, p2, modes = st
        out = []
        if p1 == WAIT:
            out.append((EPS, (sr.start_1, p2, modes), assemble(z, z, z)))
        else:
            for a, q, m in moves1.get(p1, ()):
                if a is EPS:
                    for new, own, mid in _book(modes, 0, m, C):
                        out.append((EPS, (q, p2, new), assemble(own, z, middle_of(mid))))
        if p2 == WAIT:
            out.append((EPS, (p1, sr.start_2, modes), assemble(z, z, z)))
        else:
            for a, q, m in moves2.get(p2, ()):
                if a is EPS:
                    for new, own, mid in _book(modes, 1, m, C):
                        out.append((EPS, (p1, q, new), assemble(z, own, middle_of(mid))))
        if p1 != WAIT and p2 != WAIT:
            for a, q1, m1 in moves1.get(p1, ()):
                if a is EPS:
                    continue
                for new1, own1, mid1 in _book(modes, 0, m1, C):
                    for b2, q2, m2 in moves2.get(p2, ()):
                        if b2 is EPS:
                            continue
                        for new2, own2, mid2 in _book(new1, 1, m2, C):
                            mid = [x + y for x, y in zip(mid1, mid2)]
                            out.append(((a, b2), (q1, q2, new2), assemble(own1, own2, middle_of(mid))))
        elif p1 != WAIT:
            for a, q1, m1 in moves1.get(p1, ()):
                if a is not EPS:
                    for new, own, mid in _book(modes, 0, m1, C):
                        out.append(((a, PAD), (q1, WAIT, new), assemble(own, z, middle_of(mid))))
        elif p2 != WAIT:
            for b2, q2, m2 in moves2.get(p2, ()):
                if b2 is not EPS:
                    for new, own, mid in _book(modes, 1, m2, C):
                        out.append(((PAD, b2), (WAIT, q2, new), assemble(z, own, middle_of(mid))))
        if p1 == p2 and p1 in shared:
            jump = _jump(sr.rule_of(p1).annotation, modes)
            if jump is not None:
                out.append((EPS, ID, jump))
        return out

    starts = [(WAIT, WAIT, modes) for modes in product(MODES, repeat=C)]
    return _explore(sr, 3 * C, starts, expand)


def _jump(bar: ProfileVector, modes) -> Optional[ProfileVector]:
    """Counter operations of the connecting rule, or None if the guess is wrong."""
    g1, g2, gm = [], [], []
    for (left, mid, right), mode in zip(bar, modes):
        if right is NA:
            if mode != (AFTER, AFTER):
                return None
            g1.append(monoid.NEUTRAL)
            g2.append(monoid.NEUTRAL)
            gm.append(_inc(left))
        else:
            if mode != SPLIT:
                return None
            g1.append(_inc(left))
            g2.append(_inc(right))
            gm.append(_inc(mid) if mid is not NA else monoid.NEUTRAL)
    return tuple(g1) + tuple(g2) + tuple(gm)


def identity_transducer(sigma) -> ResourceTransducer:
    """Value 0 on equal pairs (reflexive paths), infinity elsewhere."""
    return ca.equality_transducer(sigma, "right")


# -- cost engine --------------------------------------------------------------------------------


class CostEngine:
    """Saturation and transducers of one system, built lazily and cached."""

    def __init__(self, sys: Rprs, profile: str = "full"):
        self.sys = sys
        self.profile = profile
        self._sr: Optional[SaturationResult] = None
        self._exact: Optional[ResourceTransducer] = None
        self._approx: Optional[ResourceTransducer] = None

    @property
    def saturation(self) -> SaturationResult:
        if self._sr is None:
            aps = annotate(self.sys) if self.profile == "full" else annotate_restricted(self.sys)
            self._sr = saturate(aps)
        return self._sr

    @property
    def exact(self) -> ResourceTransducer:
        if self._exact is None:
            self._exact = build_transducer_exact(self.saturation)
        return self._exact

    @property
    def approx(self) -> ResourceTransducer:
        if self._approx is None:
            self._approx = build_transducer_approx(self.saturation)
        return self._approx

    def min_cost(self, u, v, strict: bool = False):
        u, v = word(u), word(v)
        if u == v:
            return self._loop_cost(u) if strict else 0
        return self.exact.value(u, v)

    def approx_cost(self, u, v):
        """Value of the approximate transducer; reflexive like :meth:`min_cost`."""
        u, v = word(u), word(v)
        return 0 if u == v else self.approx.value(u, v)

    def _loop_cost(self, u):
        """Cheapest path of at least one step from ``u`` back to ``u``."""
        sr = self.saturation
        m = sr.monoid
        best = INF
        for r in sr.rules:
            n = len(r.lhs)
            if u[:n] != r.lhs:
                continue
            d = r.rhs + u[n:]
            tails = [m.neutral] if d == u else sr.witnesses(d, u)
            for t in tails:
                best = min(best, m.max_entry(m.concat(r.annotation, t)))
        return best


@lru_cache(maxsize=32)
def engine(sys: Rprs, profile: str = "full") -> CostEngine:
    return CostEngine(sys, profile)


def min_cost(sys: Rprs, u, v, strict: bool = False):
    """Least ``k`` with ``u ~>_{<=k} v`` (``inf`` if ``v`` is unreachable).

    Reachability is reflexive unless ``strict`` is set, in which case a path
    needs at least one step.
    """
    return engine(sys).min_cost(u, v, strict)


# -- bounded reachability ------------------------------------------------------------------------


@dataclass(frozen=True)
class ReachAnswer:
    bounded: bool
    bound: Optional[int] = None
    counterexample: Optional[Tuple[str, ...]] = None
    reason: str = ""

    @property
    def verdict(self) -> str:
        return "bounded" if self.bounded else "unbounded"

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict}
        if self.bounded:
            out["bound"] = self.bound
        elif self.counterexample is not None:
            out["counterexample"] = "".join(self.counterexample)
        return out


def _unlift(w) -> Tuple[str, ...]:
    return tuple(a[0] for a in w)


def target_costs(T: ResourceTransducer, B: Nfa, strict: bool, exact: bool) -> ResourceTransducer:
    """One-track transducer: ``u -> inf over v in B`` of the two-track value."""
    sigma = T.sigma
    if not strict:
        T = ca.transducer_min(T, identity_transducer(sigma))
    chi = ca.track_language(B, sigma, 1, 2, "right")
    both = ca.transducer_max(T, chi)
    both = ResourceTransducer(ca.compact_counters(both.automaton), sigma, 2, "right", both.slack)
    return ca.inf_projection(both, 1, exact=exact)


def bounded_reach(
    sys: Rprs,
    A: Nfa,
    B: Nfa,
    strict: bool = False,
    profile: str = "restricted",
    max_bound: int = 64,
) -> ReachAnswer:
    """Is there one ``k`` such that every ``u`` in ``A`` reaches ``B`` within ``k``?

    The verdict comes from limitedness of the projected transducer built from
    the ``profile`` saturation; the bound from exact projection of the
    full-profile transducer.
    """
    sigma = tuple(sys.alphabet)
    for n in (A, B):
        if not set(a for a in n.alphabet if a is not EPS) <= set(sigma):
            raise ValueError("language alphabet differs from the system alphabet")
    A1 = ca.lift(A)
    if ca.nfa_is_empty(A1):
        return ReachAnswer(True, 0, reason="empty source set")
    full = engine(sys, "full")
    N_exact = target_costs(full.exact, B, strict, exact=True)
    # domain: every u in A must reach B at all
    dom = ca.support(N_exact.automaton)
    gap = inclusion_counterexample(A1, dom)
    if gap is not None:
        return ReachAnswer(False, None, _unlift(gap), reason="no path to the target set")
    verdict_engine = full if profile == "full" else engine(sys, "restricted")
    N = target_costs(verdict_engine.exact, B, strict, exact=False)
    # epsilon-free on both sides keeps the product small; the value of the
    # empty word may drop to 0, which does not affect boundedness
    chi_A = ca.char_automaton(determinize(A1), N.automaton.alphabet)
    on_A = ca.b_max(ca.eps_eliminate(N.automaton, cap=1), chi_A)
    on_A = ca.compact_counters(on_A)

    res = closure(on_A)
    if not res.limited:
        probe = 2
        bad = ca.within_k_counterexample(A1, N_exact.automaton, probe)
        return ReachAnswer(
            False,
            None,
            _unlift(bad) if bad is not None else None,
            reason=f"unbounded family {res.family_text()}",
        )
    for k in range(max_bound + 1):
        if ca.within_k_counterexample(A1, N_exact.automaton, k) is None:
            return ReachAnswer(True, k)
    raise RuntimeError(f"bounded, but no bound <= {max_bound} was confirmed")


def parse_set(text: str, sigma: Sequence[str]) -> Nfa:
    """Anchored regular expression over single-character symbols."""
    return from_regex(text, sigma)
