"""Counter profiles: the annotation monoid used throughout the package.

A counter profile summarises a sequence of counter operations over
``{i, r, n}`` as a triple ``(left, mid, right)``:

* ``left``  -- increments before the first reset,
* ``mid``   -- the longest block of increments between two resets,
* ``right`` -- increments after the last reset.

Entries that do not apply are :data:`NA` (``None``).  Profiles are plain
tuples so they hash, compare and serialise for free.  A profile *vector*
holds one profile per counter of a system.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional, Sequence, Tuple

NA = None

Entry = Optional[int]
Profile = Tuple[int, Entry, Entry]
ProfileVector = Tuple[Profile, ...]

NEUTRAL: Profile = (0, NA, NA)
INC: Profile = (1, NA, NA)
RESET: Profile = (0, NA, 0)

# keeps entries representable in the int32 arrays of the simulation kernels
ENTRY_LIMIT = 2**31 - 1


class ProfileError(ValueError):
    pass


def is_valid(p) -> bool:
    if not isinstance(p, tuple) or len(p) != 3:
        return False
    left, mid, right = p
    if not _is_count(left):
        return False
    if right is NA:
        return mid is NA
    if not _is_count(right):
        return False
    return mid is NA or _is_count(mid)


def _is_count(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool) and 0 <= x <= ENTRY_LIMIT


def check(p) -> Profile:
    if not is_valid(p):
        raise ProfileError(f"not a valid counter profile: {p!r}")
    return p


def _add(x: int, y: int) -> int:
    s = x + y
    if s > ENTRY_LIMIT:
        raise OverflowError(f"profile entry {s} exceeds {ENTRY_LIMIT}")
    return s


def _max(*xs: Entry) -> Entry:
    vals = [x for x in xs if x is not NA]
    return max(vals) if vals else NA


def profile_of_sequence(ops: Iterable[str]) -> Profile:
    """Profile of an operation sequence; ``n`` (and ``c``) are ignored."""
    left = 0
    mid: Entry = NA
    right: Entry = NA
    for op in ops:
        if op == "i":
            if right is NA:
                left += 1
            else:
                right += 1
        elif op == "r":
            if right is not NA and mid is not NA:
                mid = max(mid, right)
            elif right is not NA:
                mid = right
            right = 0
        elif op in ("n", "c"):
            continue
        else:
            raise ProfileError(f"unknown counter operation {op!r}")
    return (left, mid, right)


def concat(p: Profile, q: Profile) -> Profile:
    pl, pm, pr = p
    ql, qm, qr = q
    if pr is NA:
        return (_add(pl, ql), qm, qr)
    if qr is NA:
        return (pl, pm, _add(pr, ql))
    return (pl, _max(pm, _add(pr, ql), qm), qr)


def checked_concat(p: Profile, q: Profile) -> Profile:
    return concat(check(p), check(q))


def rev(p: Profile) -> Profile:
    left, mid, right = p
    if right is NA:
        return p
    return (right, mid, left)


def _entry_leq(x: Entry, y: Entry) -> bool:
    if x is NA or y is NA:
        return x is y
    return x <= y


def leq(p: Profile, q: Profile) -> bool:
    return _entry_leq(p[0], q[0]) and _entry_leq(p[1], q[1]) and _entry_leq(p[2], q[2])


def max_entry(p: Profile) -> int:
    return max(x for x in p if x is not NA)


def profile_to_ops(p: Profile) -> str:
    """Canonical operation word with profile ``p``; never emits ``n``."""
    left, mid, right = p
    out = "i" * left
    if mid is not NA:
        out += "r" + "i" * mid
    if right is not NA:
        out += "r" + "i" * right
    return out


def restrict(p: Profile, cap: int = 1) -> Profile:
    return tuple(x if x is NA else min(x, cap) for x in p)  # type: ignore[return-value]


# -- vectors ---------------------------------------------------------------


def _same_length(a: Sequence, b: Sequence) -> None:
    if len(a) != len(b):
        raise ProfileError(f"profile vectors of different length: {len(a)} != {len(b)}")


def vector_neutral(n: int) -> ProfileVector:
    return (NEUTRAL,) * n


def vector_concat(a: ProfileVector, b: ProfileVector) -> ProfileVector:
    _same_length(a, b)
    return tuple(concat(p, q) for p, q in zip(a, b))


def vector_rev(a: ProfileVector) -> ProfileVector:
    return tuple(rev(p) for p in a)


def vector_leq(a: ProfileVector, b: ProfileVector) -> bool:
    if len(a) != len(b):
        _same_length(a, b)
    # hot path of every antichain operation: flat loop, no helper calls
    for p, q in zip(a, b):
        for x, y in zip(p, q):
            if x is NA or y is NA:
                if x is not y:
                    return False
            elif x > y:
                return False
    return True


def vector_max_entry(a: ProfileVector) -> int:
    return max((max_entry(p) for p in a), default=0)


def vector_of_sequences(seqs: Sequence[Iterable[str]]) -> ProfileVector:
    return tuple(profile_of_sequence(s) for s in seqs)


# -- WPO monoids with involution --------------------------------------------


class ProfileMonoid:
    """Direct product of ``counters`` copies of the counter-profile monoid.

    With ``cap`` set, every entry is clipped to ``cap`` after composition
    (``cap=1`` gives the restricted ``{0, 1, NA}`` profiles).  Saturation and
    the transducer constructions are written against this interface only:
    ``neutral``, ``concat``, ``leq``, ``rev`` (plus ``max_entry`` for costs).
    """

    def __init__(self, counters: int, cap: Optional[int] = None):
        self.counters = counters
        self.cap = cap
        self.neutral: ProfileVector = vector_neutral(counters)

    def __repr__(self):
        return f"ProfileMonoid(counters={self.counters}, cap={self.cap})"

    def normalize(self, a: ProfileVector) -> ProfileVector:
        if self.cap is None:
            return a
        return tuple(restrict(p, self.cap) for p in a)

    def concat(self, a: ProfileVector, b: ProfileVector) -> ProfileVector:
        return self.normalize(vector_concat(a, b))

    def concat_all(self, items: Iterable[ProfileVector]) -> ProfileVector:
        out = self.neutral
        for x in items:
            out = self.concat(out, x)
        return out

    def leq(self, a: ProfileVector, b: ProfileVector) -> bool:
        return vector_leq(a, b)

    def rev(self, a: ProfileVector) -> ProfileVector:
        return vector_rev(a)

    def max_entry(self, a: ProfileVector) -> int:
        return vector_max_entry(a)


def full_monoid(counters: int) -> ProfileMonoid:
    return ProfileMonoid(counters)


def restricted_monoid(counters: int) -> ProfileMonoid:
    return ProfileMonoid(counters, cap=1)


# -- antichains -------------------------------------------------------------


class Antichain:
    """Set of pairwise incomparable elements under ``leq``.

    Kept as a flat list, sorted by a stable key on demand; inserts are
    quadratic in the worst case, which is fine for the sizes handled here.
    """

    __slots__ = ("_items", "_leq", "_sorted")

    def __init__(self, leq_fn=vector_leq, items: Iterable = ()):
        self._leq = leq_fn
        self._items: list = []
        self._sorted = True
        for x in items:
            self.insert(x)

    def insert(self, m) -> bool:
        """Add ``m`` unless some member is ``<= m``; evict members ``> m``.

        Returns whether the antichain changed.
        """
        leq_fn = self._leq
        items = self._items
        for x in items:
            if leq_fn(x, m):
                return False
        if any(leq_fn(m, x) for x in items):
            items = self._items = [x for x in items if not leq_fn(m, x)]
        items.append(m)
        self._sorted = len(items) < 2
        return True

    def _order(self) -> list:
        if not self._sorted:
            self._items.sort(key=_sort_key)
            self._sorted = True
        return self._items

    def dominated(self, m) -> bool:
        return any(self._leq(x, m) for x in self._items)

    def __iter__(self) -> Iterator:
        return iter(list(self._order()))

    def __len__(self):
        return len(self._items)

    def __contains__(self, m):
        return m in self._items

    def __eq__(self, other):
        if isinstance(other, Antichain):
            return self._order() == other._order()
        return NotImplemented

    def __repr__(self):
        return f"Antichain({self._order()!r})"

    def copy(self) -> "Antichain":
        out = Antichain(self._leq)
        out._items = list(self._items)
        out._sorted = self._sorted
        return out

    def items(self) -> list:
        return list(self._order())


def antichain_insert(chain: Antichain, m) -> Tuple[Antichain, bool]:
    """Functional variant of :meth:`Antichain.insert`."""
    out = chain.copy()
    changed = out.insert(m)
    return out, changed


def _sort_key(x):
    # None sorts before numbers; nested tuples are flattened per component
    if isinstance(x, tuple):
        return tuple(_sort_key(y) for y in x)
    return (-1,) if x is None else (x,)


def minimal(elements: Iterable, leq_fn=vector_leq) -> list:
    return Antichain(leq_fn, elements).items()
