"""Resource prefix replacement systems and a brute-force cost oracle."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from . import monoid
from .monoid import ProfileMonoid, ProfileVector
from .nfa import Nfa, from_words

Word = Tuple[str, ...]
OPS = ("i", "r", "n")


class SystemDefinitionError(ValueError):
    """Malformed system definition; carries a line/column position."""

    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"line {line}, col {col}: " if line else ""
        super().__init__(where + msg)


@dataclass(frozen=True)
class Rule:
    lhs: Word
    rhs: Word
    ops: Tuple[str, ...]

    def __str__(self):
        return f"{fmt_word(self.lhs)} -> {fmt_word(self.rhs)} [{' '.join(self.ops)}]"


@dataclass(frozen=True)
class Rprs:
    alphabet: Tuple[str, ...]
    counters: Tuple[str, ...]
    rules: Tuple[Rule, ...]

    def __post_init__(self):
        sigma = set(self.alphabet)
        if len(set(self.counters)) != len(self.counters):
            raise SystemDefinitionError("duplicate counter")
        for r in self.rules:
            if not r.lhs:
                raise SystemDefinitionError(f"rule {r}: empty left-hand side")
            for a in r.lhs + r.rhs:
                if a not in sigma:
                    raise SystemDefinitionError(f"rule {r}: unknown symbol {a!r}")
            if len(r.ops) != len(self.counters):
                raise SystemDefinitionError(f"rule {r}: expected {len(self.counters)} ops, got {len(r.ops)}")
            for op in r.ops:
                if op not in OPS:
                    raise SystemDefinitionError(f"rule {r}: unknown op {op!r}")

    @property
    def max_side(self) -> int:
        return max((max(len(r.lhs), len(r.rhs)) for r in self.rules), default=0)

    def without(self, lhs: Sequence[str], rhs: Sequence[str]) -> "Rprs":
        """Copy with every rule ``lhs -> rhs`` removed (``KeyError`` if there is none)."""
        lhs, rhs = word(lhs), word(rhs)
        rules = tuple(r for r in self.rules if not (r.lhs == lhs and r.rhs == rhs))
        if len(rules) == len(self.rules):
            raise KeyError(f"no rule {fmt_word(lhs)} -> {fmt_word(rhs)}")
        return Rprs(self.alphabet, self.counters, rules)

    def to_text(self) -> str:
        lines = [
            "alphabet: " + " ".join(self.alphabet),
            "counters: " + " ".join(self.counters),
        ]
        lines += [f"rule: {r}" for r in self.rules]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class AnnotatedRule:
    lhs: Word
    rhs: Word
    annotation: ProfileVector


@dataclass(frozen=True)
class AnnotatedPrs:
    alphabet: Tuple[str, ...]
    rules: Tuple[AnnotatedRule, ...]
    monoid: ProfileMonoid = field(compare=False)

    @property
    def max_side(self) -> int:
        return max((max(len(r.lhs), len(r.rhs)) for r in self.rules), default=0)


def fmt_word(w: Sequence[str]) -> str:
    return " ".join(w) if w else '""'


def word(s) -> Word:
    """Coerce ``"aab"``, ``"a a b"`` or a sequence into a word tuple.

    A plain string without spaces is split into characters, which is the
    convenient form for single-character alphabets.
    """
    if isinstance(s, tuple):
        return s
    if isinstance(s, str):
        s = s.strip()
        if s in ("", '""'):
            return ()
        if " " in s:
            return tuple(s.split())
        return tuple(s)
    return tuple(s)


# -- parsing ------------------------------------------------------------------


def _parse_word(text: str, lineno: int, col: int, sigma: Set[str]) -> Word:
    toks = text.split()
    if toks == ['""']:
        return ()
    for t in toks:
        if t not in sigma:
            raise SystemDefinitionError(f"unknown symbol {t!r}", lineno, col + text.find(t) + 1)
    return tuple(toks)


def parse_system(text: str) -> Rprs:
    alphabet: Optional[Tuple[str, ...]] = None
    counters: Optional[Tuple[str, ...]] = None
    rules: List[Rule] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        col = len(key) + 2
        if not sep:
            raise SystemDefinitionError("expected 'key: value'", lineno, 1)
        if key == "alphabet":
            alphabet = tuple(rest.split())
            if len(set(alphabet)) != len(alphabet):
                raise SystemDefinitionError("duplicate symbol in alphabet", lineno, col)
            if not alphabet:
                raise SystemDefinitionError("empty alphabet", lineno, col)
        elif key == "counters":
            counters = tuple(rest.split())
            if len(set(counters)) != len(counters):
                raise SystemDefinitionError("duplicate counter", lineno, col)
        elif key == "rule":
            if alphabet is None or counters is None:
                raise SystemDefinitionError("rule before alphabet/counters declaration", lineno, 1)
            rules.append(_parse_rule(rest, lineno, col, set(alphabet), len(counters)))
        else:
            raise SystemDefinitionError(f"unknown key {key!r}", lineno, 1)
    if alphabet is None:
        raise SystemDefinitionError("missing alphabet declaration")
    if counters is None:
        raise SystemDefinitionError("missing counters declaration")
    return Rprs(alphabet, counters, tuple(rules))


def _parse_rule(text: str, lineno: int, col: int, sigma: Set[str], arity: int) -> Rule:
    if "->" not in text:
        raise SystemDefinitionError("rule needs '->'", lineno, col)
    lhs_txt, rhs_txt = text.split("->", 1)
    if "[" not in rhs_txt or not rhs_txt.rstrip().endswith("]"):
        raise SystemDefinitionError("rule needs an ops bracket '[...]'", lineno, col + len(text))
    rhs_part, ops_part = rhs_txt.rsplit("[", 1)
    ops = tuple(ops_part.rstrip().rstrip("]").split())
    lhs = _parse_word(lhs_txt, lineno, col, sigma)
    if not lhs:
        raise SystemDefinitionError("empty left-hand side", lineno, col)
    rhs = _parse_word(rhs_part, lineno, col + len(lhs_txt) + 2, sigma)
    if len(ops) != arity:
        raise SystemDefinitionError(f"expected {arity} counter ops, got {len(ops)}", lineno, col)
    for op in ops:
        if op not in OPS:
            raise SystemDefinitionError(f"unknown counter op {op!r}", lineno, col)
    return Rule(lhs, rhs, ops)


def load_system(path: str) -> Rprs:
    with open(path) as fh:
        return parse_system(fh.read())


BASIC_TEXT = """\
# one counter over {a, b}
alphabet: a b
counters: c0
rule: a -> "" [i]
rule: a -> b a [r]
rule: b -> b b [r]
rule: b -> a [n]
"""


def example_system() -> Rprs:
    """The four-rule example system over ``{a, b}`` with one counter."""
    return parse_system(BASIC_TEXT)


# -- semantics ------------------------------------------------------------------


def successors(sys: Rprs, c: Sequence[str]) -> Set[Tuple[Word, Tuple[str, ...]]]:
    c = tuple(c)
    out = set()
    for r in sys.rules:
        n = len(r.lhs)
        if c[:n] == r.lhs:
            out.add((r.rhs + c[n:], r.ops))
    return out


def _op_profile(op: str):
    return {"i": monoid.INC, "r": monoid.RESET, "n": monoid.NEUTRAL}[op]


def annotate(sys: Rprs) -> AnnotatedPrs:
    m = monoid.full_monoid(len(sys.counters))
    rules = tuple(
        AnnotatedRule(r.lhs, r.rhs, tuple(_op_profile(op) for op in r.ops)) for r in sys.rules
    )
    return AnnotatedPrs(sys.alphabet, rules, m)


def annotate_restricted(sys: Rprs) -> AnnotatedPrs:
    full = annotate(sys)
    m = monoid.restricted_monoid(len(sys.counters))
    rules = tuple(AnnotatedRule(r.lhs, r.rhs, m.normalize(r.annotation)) for r in full.rules)
    return AnnotatedPrs(sys.alphabet, rules, m)


def path_cost(ops: Iterable[Sequence[str]]) -> int:
    """Maximal value reached by any counter when simulating the op vectors."""
    vals: Optional[List[int]] = None
    best = 0
    for vec in ops:
        if vals is None:
            vals = [0] * len(vec)
        for j, op in enumerate(vec):
            if op == "i":
                vals[j] += 1
                best = max(best, vals[j])
            elif op == "r":
                vals[j] = 0
    return best


# -- brute-force oracle ---------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    kind: str  # "exact" | "infinite" | "unknown"
    value: Optional[int] = None

    def __str__(self):
        return f"Exact({self.value})" if self.kind == "exact" else self.kind.capitalize()


def Exact(k: int) -> OracleResult:
    return OracleResult("exact", k)


INFINITE = OracleResult("infinite")
UNKNOWN = OracleResult("unknown")


def pre_star(sys: Rprs, targets: Iterable[Sequence[str]]) -> Nfa:
    """NFA for all configurations that reach one of ``targets`` (no costs).

    Classic backward saturation for prefix rewriting: whenever the automaton
    reads ``rhs`` from the initial state into ``q``, a fresh chain reading
    ``lhs`` from the initial state into ``q`` is added.  The trie of the
    targets has no transition into its initial state, which keeps the
    construction exact.
    """
    n = from_words(sys.alphabet, (word(t) for t in targets))
    (root,) = n.initial
    changed = True
    while changed:
        changed = False
        for idx, r in enumerate(sys.rules):
            cur = {root}
            for a in r.rhs:
                cur = set().union(*(n.targets(p, a) for p in cur)) if cur else set()
            for q in sorted(cur, key=repr):
                if _reads(n, root, r.lhs, q):
                    continue
                prev = root
                for j, a in enumerate(r.lhs[:-1]):
                    mid = ("pre*", idx, q, j)
                    n.add(prev, a, mid)
                    prev = mid
                n.add(prev, r.lhs[-1], q)
                changed = True
    return n


def _reads(n: Nfa, p, w: Sequence[str], q) -> bool:
    cur = {p}
    for a in w:
        cur = set().union(*(n.targets(x, a) for x in cur)) if cur else set()
    return q in cur


def _reach_within(sys: Rprs, u: Word, v: Word, k: int, len_cap: int, strict: bool) -> bool:
    """BFS over (configuration, counter valuation) with counters capped at ``k``."""
    nc = len(sys.counters)
    start = (u, (0,) * nc, False)
    seen = {start}
    todo = deque([start])
    while todo:
        c, vals, moved = todo.popleft()
        if c == v and (moved or not strict):
            return True
        for d, ops in successors(sys, c):
            if len(d) > len_cap:
                continue
            nv = []
            for x, op in zip(vals, ops):
                if op == "i":
                    x += 1
                    if x > k:
                        break
                elif op == "r":
                    x = 0
                nv.append(x)
            else:
                state = (d, tuple(nv), True)
                if state not in seen:
                    seen.add(state)
                    todo.append(state)
    return False


def oracle_min_cost(
    sys: Rprs, u, v, len_cap: int, cost_cap: int, strict: bool = False
) -> OracleResult:
    """Least ``k`` with ``u ~>_{<=k} v`` found by capped breadth-first search.

    Unreachability (``INFINITE``) is certified by :func:`pre_star`, so it does
    not depend on the caps.  ``UNKNOWN`` means ``v`` is reachable but no path
    within the caps was found.  ``strict`` disables reflexivity (a path needs
    at least one step).
    """
    u, v = word(u), word(v)
    if len_cap < max(len(u), len(v)) or cost_cap < 0:
        raise ValueError("caps must cover the endpoints")
    if u == v and not strict:
        return Exact(0)
    back = pre_star(sys, [v])
    if strict:
        # v must be reached in >= 1 step
        hit = any(back.accepts(d) for d, _ in successors(sys, u))
    else:
        hit = back.accepts(u)
    if not hit:
        return INFINITE
    for k in range(cost_cap + 1):
        if _reach_within(sys, u, v, k, len_cap, strict):
            return Exact(k)
    return UNKNOWN


def reachable_profiles(
    sys: Rprs, u, len_cap: int, entry_cap: int, annotated: Optional[AnnotatedPrs] = None
) -> Dict[Word, Set[ProfileVector]]:
    """All (configuration, path profile vector) pairs from ``u``.

    Profiles with any entry above ``entry_cap`` are pruned; entries never
    shrink below a reached value once exceeded, so the pruning is exact for
    targets whose entries are all ``<= entry_cap``.  The empty path is included.
    """
    aps = annotated or annotate(sys)
    m = aps.monoid
    u = word(u)
    start = (u, m.neutral)
    seen = {start}
    todo = deque([start])
    while todo:
        c, prof = todo.popleft()
        for r in aps.rules:
            n = len(r.lhs)
            if c[:n] != r.lhs:
                continue
            d = r.rhs + c[n:]
            if len(d) > len_cap:
                continue
            p2 = m.concat(prof, r.annotation)
            if m.max_entry(p2) > entry_cap:
                continue
            st = (d, p2)
            if st not in seen:
                seen.add(st)
                todo.append(st)
    out: Dict[Word, Set[ProfileVector]] = {}
    for c, prof in seen:
        out.setdefault(c, set()).add(prof)
    return out


def sample_path(sys: Rprs, u, steps: int, rng) -> List[Tuple[Word, Tuple[str, ...]]]:
    """Random walk of at most ``steps`` rule applications from ``u``."""
    c = word(u)
    path = []
    for _ in range(steps):
        succ = sorted(successors(sys, c))
        if not succ:
            break
        c, ops = succ[rng.randrange(len(succ))]
        path.append((c, ops))
    return path
