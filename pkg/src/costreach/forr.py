"""FO+RR: negation-free first-order logic over resource relations.

A formula's value is the least budget ``k`` for which it holds classically
when every relation is cut down to the tuples of cost ``<= k``.  Equality
costs 0 or infinity, disjunction is ``min``, conjunction ``max``, ``exists``
the infimum and ``forall`` the supremum over the universe.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from . import costautomata as ca
from .costautomata import ResourceTransducer
from .limitedness import closure
from .nfa import Nfa, determinize, inclusion_counterexample, intersect, is_empty, shortest_word, universal
from .reach import engine, identity_transducer

INF = math.inf


class ForrError(ValueError):
    """Malformed formula, structure or query; ``pos`` is a character offset."""

    def __init__(self, msg: str, pos: Optional[int] = None):
        self.pos = pos
        super().__init__(msg if pos is None else f"{msg} (at position {pos})")


# -- syntax -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Equal:
    x: str
    y: str


@dataclass(frozen=True)
class NotEqual:
    x: str
    y: str


@dataclass(frozen=True)
class Atom:
    rel: str
    args: Tuple[str, ...]


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Equal, NotEqual, Atom, Or, And, Exists, Forall]


def free_vars(phi: Formula) -> Tuple[str, ...]:
    """Free variables in order of first occurrence."""
    out: List[str] = []

    def go(f, bound):
        if isinstance(f, (Equal, NotEqual)):
            args: Sequence[str] = (f.x, f.y)
        elif isinstance(f, Atom):
            args = f.args
        elif isinstance(f, (Or, And)):
            go(f.left, bound)
            go(f.right, bound)
            return
        else:
            go(f.body, bound | {f.var})
            return
        for v in args:
            if v not in bound and v not in out:
                out.append(v)

    go(phi, frozenset())
    return tuple(out)


def is_closed(phi: Formula) -> bool:
    return not free_vars(phi)


def to_text(phi: Formula) -> str:
    if isinstance(phi, Equal):
        return f"{phi.x} = {phi.y}"
    if isinstance(phi, NotEqual):
        return f"{phi.x} != {phi.y}"
    if isinstance(phi, Atom):
        return f"{phi.rel}({', '.join(phi.args)})"
    if isinstance(phi, Or):
        return f"({to_text(phi.left)} | {to_text(phi.right)})"
    if isinstance(phi, And):
        return f"({to_text(phi.left)} & {to_text(phi.right)})"
    q = "exists" if isinstance(phi, Exists) else "forall"
    return f"{q} {phi.var}. {to_text(phi.body)}"


_TOKEN = re.compile(r"\s*(?:(?P<op>!=|[()=,.&|!])|(?P<name>[A-Za-z_][A-Za-z0-9_']*))")


def _tokenize(text: str):
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ForrError(f"unexpected character {text[pos]!r}", pos)
        start = m.start("op") if m.group("op") else m.start("name")
        toks.append((m.group("op") or m.group("name"), start))
        pos = m.end()
    toks.append(("", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, expected=None):
        tok, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            raise ForrError(f"expected {expected!r}, got {tok or 'end of input'!r}", pos)
        self.i += 1
        return tok, pos

    def formula(self):
        tok, pos = self.peek()
        if tok in ("forall", "exists"):
            return self.quantified()
        return self.disjunction()

    def quantified(self):
        q, _ = self.take()
        names = []
        while True:
            tok, pos = self.peek()
            if tok == ".":
                self.take()
                break
            if not _is_var(tok):
                raise ForrError(f"expected a variable after {q!r}", pos)
            names.append(self.take()[0])
        if not names:
            raise ForrError(f"{q!r} binds no variable", pos)
        body = self.formula()
        cls = Forall if q == "forall" else Exists
        for v in reversed(names):
            body = cls(v, body)
        return body

    def disjunction(self):
        left = self.conjunction()
        while self.peek()[0] == "|":
            self.take()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.unary()
        while self.peek()[0] == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self):
        tok, pos = self.peek()
        if tok == "!":
            raise ForrError("negation is not part of the logic", pos)
        if tok in ("forall", "exists"):
            return self.quantified()
        if tok == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if not _is_var(tok):
            raise ForrError(f"unexpected {tok or 'end of input'!r}", pos)
        name, _ = self.take()
        nxt, npos = self.peek()
        if nxt == "(":
            self.take()
            args = []
            if self.peek()[0] != ")":
                while True:
                    t, p = self.peek()
                    if not _is_var(t):
                        raise ForrError("expected a variable", p)
                    args.append(self.take()[0])
                    if self.peek()[0] == ",":
                        self.take()
                        continue
                    break
            self.take(")")
            return Atom(name, tuple(args))
        if nxt == "=":
            self.take()
            return Equal(name, self._var())
        if nxt == "!=":
            self.take()
            return NotEqual(name, self._var())
        raise ForrError(f"expected '(', '=' or '!=' after {name!r}", npos)

    def _var(self):
        tok, pos = self.peek()
        if not _is_var(tok):
            raise ForrError("expected a variable", pos)
        return self.take()[0]


def _is_var(tok: str) -> bool:
    return bool(tok) and (tok[0].isalpha() or tok[0] == "_") and tok not in ("forall", "exists")


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    tok, pos = p.peek()
    if tok:
        raise ForrError(f"unexpected {tok!r}", pos)
    return f


# -- finite structures -------------------------------------------------------------------


Value = Union[int, float]


@dataclass
class FiniteResourceStructure:
    universe: Tuple
    relations: Dict[str, Tuple[int, Dict[Tuple, Value]]]

    def value(self, rel: str, args: Tuple) -> Value:
        if rel not in self.relations:
            raise ForrError(f"unknown relation {rel!r}")
        arity, table = self.relations[rel]
        if len(args) != arity:
            raise ForrError(f"relation {rel!r} has arity {arity}, used with {len(args)}")
        return table.get(tuple(args), INF)

    def cut(self, k: int) -> Dict[str, set]:
        """The classical structure: tuples of cost at most ``k``."""
        return {
            name: {t for t, v in table.items() if v <= k} for name, (_, table) in self.relations.items()
        }


def _parse_value(v):
    if v == "inf" or v is None:
        return INF
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise ForrError(f"relation values are naturals or \"inf\", got {v!r}")
    return v


def structure_from_json(data) -> FiniteResourceStructure:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        universe = tuple(data["universe"])
        rels = {}
        for name, spec in data.get("relations", {}).items():
            arity = int(spec["arity"])
            table = {}
            for tup, val in spec.get("entries", []):
                tup = tuple(tup)
                if len(tup) != arity:
                    raise ForrError(f"relation {name!r}: entry {list(tup)} does not have arity {arity}")
                for x in tup:
                    if x not in universe:
                        raise ForrError(f"relation {name!r}: {x!r} is not in the universe")
                table[tup] = _parse_value(val)
            rels[name] = (arity, table)
    except (KeyError, TypeError) as e:
        raise ForrError(f"malformed structure: {e}") from e
    return FiniteResourceStructure(universe, rels)


def structure_to_json(S: FiniteResourceStructure) -> str:
    rels = {}
    for name, (arity, table) in sorted(S.relations.items()):
        entries = [[list(t), "inf" if v == INF else v] for t, v in sorted(table.items(), key=repr)]
        rels[name] = {"arity": arity, "entries": entries}
    return json.dumps({"universe": list(S.universe), "relations": rels}, sort_keys=True)


def eval_explicit(S: FiniteResourceStructure, phi: Formula, I: Optional[Mapping[str, object]] = None) -> Value:
    """Value of ``phi`` under the valuation ``I`` of its free variables."""
    I = dict(I or {})
    for v in free_vars(phi):
        if v not in I:
            raise ForrError(f"unbound variable {v!r}")
    return _ev(S, phi, I)


def _ev(S, f, I):
    if isinstance(f, Equal):
        return 0 if I[f.x] == I[f.y] else INF
    if isinstance(f, NotEqual):
        return 0 if I[f.x] != I[f.y] else INF
    if isinstance(f, Atom):
        return S.value(f.rel, tuple(I[a] for a in f.args))
    if isinstance(f, Or):
        return min(_ev(S, f.left, I), _ev(S, f.right, I))
    if isinstance(f, And):
        return max(_ev(S, f.left, I), _ev(S, f.right, I))
    vals = []
    for e in S.universe:
        J = dict(I)
        J[f.var] = e
        vals.append(_ev(S, f.body, J))
    if isinstance(f, Exists):
        return min(vals, default=INF)
    return max(vals, default=0)


def holds_classically(rels: Mapping[str, set], universe, phi: Formula, I: Mapping[str, object]) -> bool:
    """Plain first-order truth in a structure given by tuple sets."""
    if isinstance(phi, Equal):
        return I[phi.x] == I[phi.y]
    if isinstance(phi, NotEqual):
        return I[phi.x] != I[phi.y]
    if isinstance(phi, Atom):
        return tuple(I[a] for a in phi.args) in rels.get(phi.rel, set())
    if isinstance(phi, Or):
        return holds_classically(rels, universe, phi.left, I) or holds_classically(rels, universe, phi.right, I)
    if isinstance(phi, And):
        return holds_classically(rels, universe, phi.left, I) and holds_classically(rels, universe, phi.right, I)
    test = any if isinstance(phi, Exists) else all
    return test(holds_classically(rels, universe, phi.body, {**I, phi.var: e}) for e in universe)


# -- automatic structures ----------------------------------------------------------------------


@dataclass
class AutomaticResourceStructure:
    sigma: Tuple[str, ...]
    universe: Nfa
    relations: Dict[str, ResourceTransducer]
    alignment: str = "right"

    def __post_init__(self):
        for name, T in self.relations.items():
            if T.alignment != self.alignment:
                raise ForrError(f"relation {name!r} is {T.alignment}-aligned, expected {self.alignment}")

    def arity(self, rel: str) -> int:
        if rel not in self.relations:
            raise ForrError(f"unknown relation {rel!r}")
        return self.relations[rel].tracks

    def universe_track(self, track: int, tracks: int) -> ResourceTransducer:
        return ca.track_language(self.universe, self.sigma, track, tracks, self.alignment)


def unary_relation(n: Nfa, sigma, alignment: str = "right") -> ResourceTransducer:
    """Characteristic relation of a regular set of words."""
    A = ca.char_automaton(ca.lift(n), ca.padded_alphabet(sigma, 1))
    return ResourceTransducer(A, tuple(sigma), 1, alignment)


def _place(T: ResourceTransducer, positions: Sequence[int], tracks: int) -> ResourceTransducer:
    positions = list(positions)
    if tracks == T.tracks and sorted(positions) == list(range(tracks)):
        if positions == list(range(tracks)):
            return T
        perm = [0] * tracks
        for j, p in enumerate(positions):
            perm[p] = j
        return ca.reorder(T, perm)
    return ca.cylindrify(T, positions, tracks)


@dataclass
class Compiled:
    transducer: ResourceTransducer
    variables: Tuple[str, ...]

    @property
    def slack(self) -> int:
        return self.transducer.slack

    def value(self, **valuation):
        return self.transducer.value(*(valuation[v] for v in self.variables))


def _shrink(T: ResourceTransducer) -> ResourceTransducer:
    A = ca.reduce(ca.compact_counters(T.automaton))
    return ResourceTransducer(A, T.sigma, T.tracks, T.alignment, T.slack)


def compile_positive(
    S: AutomaticResourceStructure,
    phi: Formula,
    variables: Optional[Sequence[str]] = None,
    exact: bool = False,
) -> Compiled:
    """Transducer over the free variables of an existential-positive formula.

    Free variables range over the universe (tuples outside get infinity).
    With ``exact=False`` each projection may undershoot by the slack that is
    accumulated on the result; ``exact=True`` keeps values exact.
    """
    fv = free_vars(phi)
    if not fv:
        raise ForrError("formula has no free variables; use decide_sentence")
    variables = tuple(variables) if variables is not None else fv
    if set(variables) != set(fv) or len(variables) != len(fv):
        raise ForrError(f"variables {variables} do not match the free variables {fv}")
    T = _compile(S, phi, variables, exact)
    for i in range(len(variables)):
        T = ca.transducer_max(T, S.universe_track(i, len(variables)))
    return Compiled(_shrink(T), variables)


def _compile(S, f, vs: Tuple[str, ...], exact: bool) -> ResourceTransducer:
    n = len(vs)
    pos = {v: i for i, v in enumerate(vs)}
    if isinstance(f, (Equal, NotEqual)):
        if f.x == f.y:
            base = ca.constant(ca.padded_alphabet(S.sigma, 1), 0)
            if isinstance(f, NotEqual):
                base = ca.BAutomaton(1, base.alphabet, {0}, set(), 1, ())
            one = ResourceTransducer(base, S.sigma, 1, S.alignment)
            return ca.restrict_to_padding(_place(one, [pos[f.x]], n)) if n > 1 else one
        make = ca.equality_transducer if isinstance(f, Equal) else ca.inequality_transducer
        return _place(make(S.sigma, S.alignment), [pos[f.x], pos[f.y]], n)
    if isinstance(f, Atom):
        T = S.relations.get(f.rel)
        if T is None:
            raise ForrError(f"unknown relation {f.rel!r}")
        if T.tracks != len(f.args):
            raise ForrError(f"relation {f.rel!r} has arity {T.tracks}, used with {len(f.args)}")
        if len(set(f.args)) != len(f.args):
            # R(x, x): rename repeats apart and tie them with equalities
            fresh, ties = [], []
            for i, a in enumerate(f.args):
                if a in fresh or a in [b for b, _ in ties]:
                    b = f"{a}#{i}"
                    ties.append((b, a))
                    fresh.append(b)
                else:
                    fresh.append(a)
            g: Formula = Atom(f.rel, tuple(fresh))
            for b, a in ties:
                g = And(g, Equal(a, b))
            for b, _ in ties:
                g = Exists(b, g)
            return _compile(S, g, vs, exact)
        return _place(T, [pos[a] for a in f.args], n)
    if isinstance(f, (Or, And)):
        left = _compile(S, f.left, vs, exact)
        right = _compile(S, f.right, vs, exact)
        comb = ca.transducer_min if isinstance(f, Or) else ca.transducer_max
        return _shrink(comb(left, right))
    if isinstance(f, Forall):
        raise ForrError(
            "universal quantification inside the formula is outside the supported fragment "
            "(only a leading block of 'forall' is decided)"
        )
    # Exists: bind the variable on an extra last track, then project it away
    if f.var not in free_vars(f.body):
        return _compile(S, f.body, vs, exact)
    inner = vs + (f.var,)
    body = _compile(S, f.body, inner, exact)
    body = ca.transducer_max(body, S.universe_track(n, n + 1))
    if n == 0:
        raise ForrError("closed existential subformula; use decide_sentence")
    return _shrink(ca.inf_projection(_shrink(body), n, exact=exact))


# -- sentences ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class SentenceResult:
    finite: bool
    value: Optional[int] = None
    slack: int = 0

    def to_dict(self) -> dict:
        return {"finite": self.finite, "value": self.value if self.finite else "inf"}


def split_prefix(phi: Formula, kind=Forall) -> Tuple[Tuple[str, ...], Formula]:
    out = []
    while isinstance(phi, kind):
        out.append(phi.var)
        phi = phi.body
    return tuple(out), phi


def _contains_forall(f) -> bool:
    if isinstance(f, Forall):
        return True
    if isinstance(f, (Or, And)):
        return _contains_forall(f.left) or _contains_forall(f.right)
    if isinstance(f, Exists):
        return _contains_forall(f.body)
    return False


def decide_sentence(S: AutomaticResourceStructure, phi: Formula, max_bound: int = 64) -> SentenceResult:
    """Value of a closed ``forall* positive`` sentence (``finite=False`` for infinity)."""
    if not is_closed(phi):
        raise ForrError(f"formula has free variables {free_vars(phi)}")
    xs, psi = split_prefix(phi, Forall)
    if _contains_forall(psi):
        raise ForrError("only a leading block of 'forall' is supported")
    if not xs:
        return _existential_sentence(S, psi, max_bound)
    # variables bound twice in the prefix: the inner one wins
    order = tuple(dict.fromkeys(reversed(xs)))[::-1]
    fv = free_vars(psi)
    unused = [x for x in order if x not in fv]
    used = tuple(x for x in order if x in fv)
    if not used:
        val = _existential_sentence(S, psi, max_bound)
        if unused and is_empty(S.universe):
            return SentenceResult(True, 0)
        return val
    dom = ca.support(_domain(S, len(used)).automaton)
    exact = compile_positive(S, psi, used, exact=True).transducer
    gap = _inclusion_gap(dom, exact.automaton)
    if gap:
        return SentenceResult(False)
    approx = compile_positive(S, psi, used, exact=False).transducer
    # epsilon-free factors; only the empty word's value can change, which is
    # irrelevant for boundedness
    chi = ca.char_automaton(determinize(dom), approx.automaton.alphabet)
    on_dom = ca.compact_counters(ca.b_max(ca.eps_eliminate(approx.automaton, cap=1), chi))
    if not closure(on_dom).limited:
        return SentenceResult(False, slack=approx.slack)
    for k in range(max_bound + 1):
        if ca.within_k_counterexample(dom, exact.automaton, k) is None:
            return SentenceResult(True, k, approx.slack)
    raise RuntimeError(f"bounded, but no value <= {max_bound} was confirmed")


def _domain(S: AutomaticResourceStructure, n: int) -> ResourceTransducer:
    T = S.universe_track(0, n)
    for i in range(1, n):
        T = ca.transducer_max(T, S.universe_track(i, n))
    return _shrink(T)


def _inclusion_gap(dom: Nfa, A: ca.BAutomaton) -> bool:
    return inclusion_counterexample(dom, ca.support(A)) is not None


def _existential_sentence(S: AutomaticResourceStructure, psi: Formula, max_bound: int) -> SentenceResult:
    """Closed positive formula without a leading ``forall``."""
    if is_empty(S.universe):
        # every quantifier ranges over nothing
        return SentenceResult(True, 0) if _vacuous(psi) else SentenceResult(False)
    ys, body = split_prefix(psi, Exists)
    if not ys:
        # closed and quantifier-free: only tautological shapes are possible
        raise ForrError("closed formula needs a quantifier")
    var = ys[0]
    rest = body
    for y in reversed(ys[1:]):
        rest = Exists(y, rest)
    if var not in free_vars(rest):
        return _existential_sentence(S, rest, max_bound)
    T = compile_positive(S, rest, (var,), exact=True).transducer
    A = T.automaton
    sup = ca.support(A)
    w = shortest_word(sup)
    if w is None:
        return SentenceResult(False)
    upper = ca.evaluate_word(A, w)
    for k in range(int(upper) + 1):
        if not is_empty(intersect(ca.value_leq_k_nfa(A, k), sup)):
            return SentenceResult(True, k)
    return SentenceResult(True, int(upper))  # pragma: no cover - upper is attained


def _vacuous(f) -> bool:
    if isinstance(f, Forall):
        return True
    if isinstance(f, Exists):
        return False
    if isinstance(f, Or):
        return _vacuous(f.left) or _vacuous(f.right)
    if isinstance(f, And):
        return _vacuous(f.left) and _vacuous(f.right)
    return False


# -- the reachability structure of a system ------------------------------------------------


def system_structure(sys, sets: Optional[Mapping[str, Nfa]] = None, strict: bool = False) -> AutomaticResourceStructure:
    """Universe ``Sigma*``, binary ``Reach`` (minimal cost) and unary regular sets."""
    sigma = tuple(sys.alphabet)
    T = engine(sys).exact
    if not strict:
        T = ca.transducer_min(T, identity_transducer(sigma))
    rels = {"Reach": _shrink(T)}
    for name, n in (sets or {}).items():
        rels[name] = unary_relation(n, sigma)
    return AutomaticResourceStructure(sigma, universal(sigma), rels)
