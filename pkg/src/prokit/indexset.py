"""Directed preordered index sets with windowed enumeration.

Finite posets are explicit; countable ones are lazy generators. Every
quantifier in the library ranges over a finite window: the elements of rank
at most H, in deterministic order (rank-major, then id). A verdict is
`exact` only when the window provably contains the whole index set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import PreconditionError, UnsupportedQueryError

# Largest window a lazy poset may materialize before we refuse. Mardesic
# windows over an infinite chain grow as 2^(H+1); the guard keeps a typo'd
# horizon from eating the machine.
WINDOW_GUARD = 200_000


def key_token(key):
    """Total-order token for element ids (ints, strings, nested tuples)."""
    if isinstance(key, bool):
        raise TypeError("bool is not a valid element id")
    if isinstance(key, int):
        return (0, key)
    if isinstance(key, str):
        return (1, key)
    if isinstance(key, tuple):
        return (2, tuple(key_token(k) for k in key))
    raise TypeError(f"unsupported element id: {key!r}")


@dataclass(frozen=True)
class IndexElem:
    """One element of an index set: an opaque id plus its enumeration rank."""

    id: object
    rank: int

    def sort_key(self):
        return (self.rank, key_token(self.id))


# ---------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class WitnessTable:
    """Evidence for `holds`: pairs (subject, witness)."""

    entries: tuple

    def get(self, subject):
        for s, w in self.entries:
            if s == subject:
                return w
        return None


@dataclass(frozen=True)
class Counterexample:
    """Evidence for a refutation: the concrete violating data."""

    detail: tuple


@dataclass(frozen=True)
class MissingWitness:
    """A required witness was not found inside the window.

    Not a refutation; `detail` may carry a sample obstruction for diagnosis.
    """

    horizon: int
    detail: tuple = ()


@dataclass(frozen=True)
class Verdict:
    mode: str  # "exact" | "windowed"
    horizon: int
    value: bool  # True = holds
    evidence: object = None

    @property
    def holds(self) -> bool:
        return self.value

    @property
    def inconclusive(self) -> bool:
        """Failed only by exhausting the window, not by counterexample."""
        return (not self.value) and isinstance(self.evidence, MissingWitness)

    @property
    def witness(self):
        """The single witness, for verdicts built around one search."""
        if isinstance(self.evidence, WitnessTable) and len(self.evidence.entries) == 1:
            return self.evidence.entries[0][1]
        return None

    def witness_for(self, subject):
        if isinstance(self.evidence, WitnessTable):
            return self.evidence.get(subject)
        return None


def _mode(poset: "IndexPoset", h: int) -> str:
    return "exact" if poset.exhaustive_at(h) else "windowed"


# ---------------------------------------------------------------------------
# Poset implementations


class IndexPoset:
    """Base class: a preorder with ranked, windowed enumeration."""

    kind = "finite"
    name = "poset"
    antisymmetric = True
    sequence_like = False

    def __init__(self):
        self._wcache: dict[int, tuple] = {}

    def le(self, x: IndexElem, y: IndexElem) -> bool:
        raise NotImplementedError

    def ge(self, x, y) -> bool:
        return self.le(y, x)

    def lt(self, x, y) -> bool:
        return self.le(x, y) and not self.le(y, x)

    def elem(self, id_):
        raise UnsupportedQueryError(f"{self.name}: no id lookup")

    def window(self, h: int) -> tuple:
        if h < 0:
            raise PreconditionError("horizon must be >= 0")
        if h not in self._wcache:
            self._wcache[h] = tuple(self._build_window(h))
        return self._wcache[h]

    def _build_window(self, h: int):
        raise NotImplementedError

    def exhaustive_at(self, h: int) -> bool:
        return False

    @property
    def supports_predecessors(self) -> bool:
        return False

    def predecessors(self, x: IndexElem) -> tuple:
        raise UnsupportedQueryError(f"{self.name}: predecessors unavailable")


class FinitePoset(IndexPoset):
    """Explicit finite preorder. Ranks follow the given element order; the
    relation is closed reflexively and transitively on construction."""

    kind = "finite"

    def __init__(self, ids, pairs, name="finite"):
        super().__init__()
        self.name = name
        ids = list(ids)
        if len(set(ids)) != len(ids):
            raise PreconditionError("duplicate element ids")
        self.elements = tuple(IndexElem(i, r) for r, i in enumerate(ids))
        self._pos = {e.id: e for e in self.elements}
        n = len(ids)
        idx = {i: k for k, i in enumerate(ids)}
        rel = [[False] * n for _ in range(n)]
        for k in range(n):
            rel[k][k] = True
        for lo, hi in pairs:
            if lo not in idx or hi not in idx:
                raise PreconditionError(f"relation mentions unknown id: {lo!r} <= {hi!r}")
            rel[idx[lo]][idx[hi]] = True
        for m in range(n):  # Warshall closure
            rm = rel[m]
            for k in range(n):
                if rel[k][m]:
                    rk = rel[k]
                    for j in range(n):
                        if rm[j]:
                            rk[j] = True
        self._rel = rel
        self._idx = idx
        self.antisymmetric = all(
            not (rel[i][j] and rel[j][i]) for i in range(n) for j in range(n) if i != j
        )
        self.sequence_like = self.antisymmetric and all(
            rel[i][j] for i in range(n) for j in range(i, n)
        )

    def le(self, x, y):
        return self._rel[self._idx[x.id]][self._idx[y.id]]

    def elem(self, id_):
        if id_ not in self._pos:
            raise PreconditionError(f"{self.name}: unknown element id {id_!r}")
        return self._pos[id_]

    def _build_window(self, h):
        return self.elements[: h + 1]

    def exhaustive_at(self, h):
        return h >= len(self.elements) - 1

    @property
    def supports_predecessors(self):
        return True

    def predecessors(self, x):
        return tuple(y for y in self.elements if y.id != x.id and self.le(y, x))

    def maximum(self):
        """The element dominating all others, or None."""
        for m in self.elements:
            if all(self.le(y, m) for y in self.elements):
                return m
        return None


class NatPoset(IndexPoset):
    """The naturals with their usual order, optionally truncated to a finite
    chain [0, limit)."""

    sequence_like = True

    def __init__(self, limit=None):
        super().__init__()
        if limit is not None and limit < 1:
            raise PreconditionError("chain limit must be >= 1")
        self.limit = limit
        self.kind = "finite" if limit is not None else "windowed"
        self.name = "nat" if limit is None else f"chain[{limit}]"

    def le(self, x, y):
        return x.id <= y.id

    def elem(self, id_):
        if not isinstance(id_, int) or id_ < 0:
            raise PreconditionError(f"not a natural: {id_!r}")
        if self.limit is not None and id_ >= self.limit:
            raise PreconditionError(f"{self.name}: {id_} out of range")
        return IndexElem(id_, id_)

    def _build_window(self, h):
        top = h if self.limit is None else min(h, self.limit - 1)
        return (IndexElem(i, i) for i in range(top + 1))

    def exhaustive_at(self, h):
        return self.limit is not None and h >= self.limit - 1

    @property
    def supports_predecessors(self):
        return True

    def predecessors(self, x):
        return tuple(IndexElem(i, i) for i in range(x.id))

    def maximum(self):
        if self.limit is None:
            return None
        return IndexElem(self.limit - 1, self.limit - 1)


class NatSquarePoset(IndexPoset):
    """N x N under the componentwise order; rank of (i, j) is max(i, j), so
    every window is closed under pairwise upper bounds."""

    kind = "windowed"
    name = "nat_square"

    def le(self, x, y):
        return x.id[0] <= y.id[0] and x.id[1] <= y.id[1]

    def elem(self, id_):
        i, j = id_
        return IndexElem((i, j), max(i, j))

    def _build_window(self, h):
        out = [IndexElem((i, j), max(i, j)) for i in range(h + 1) for j in range(h + 1)]
        out.sort(key=IndexElem.sort_key)
        return out

    @property
    def supports_predecessors(self):
        return True

    def predecessors(self, x):
        i, j = x.id
        out = [
            IndexElem((a, b), max(a, b))
            for a in range(i + 1)
            for b in range(j + 1)
            if (a, b) != (i, j)
        ]
        out.sort(key=IndexElem.sort_key)
        return tuple(out)


def _subsets_with_max(base: IndexPoset, members):
    """All nonempty subsets of `members` possessing a maximum, as tuples of
    member elements sorted by rank then id."""
    members = sorted(members, key=IndexElem.sort_key)
    for r in range(1, len(members) + 1):
        for combo in itertools.combinations(members, r):
            if any(all(base.le(x, m) for x in combo) for m in combo):
                yield combo


class MardesicPoset(IndexPoset):
    """Finite nonempty subsets of an antisymmetric poset that possess a
    maximum, ordered by inclusion.

    Over a finite base every element gets a distinct rank, assigned by
    sorting on (cardinality, member ranks). Over a lazy base that ordering
    admits no integer ranks, so rank(b) = max member rank and ties follow
    id order; windows then stay finite and closed under union on chains.
    """

    def __init__(self, base: IndexPoset):
        super().__init__()
        if not base.antisymmetric:
            raise PreconditionError("mardesic requires an antisymmetric index set")
        self.base = base
        self.kind = base.kind
        self.name = f"mardesic({base.name})"
        self._members_of: dict[tuple, tuple] = {}
        self._all = None
        if base.kind == "finite":
            full = base.window(WINDOW_GUARD)
            subs = sorted(
                _subsets_with_max(base, full),
                key=lambda c: (len(c), tuple(m.rank for m in c)),
            )
            elems = []
            for r, combo in enumerate(subs):
                id_ = tuple(m.id for m in combo)
                elems.append(IndexElem(id_, r))
                self._members_of[id_] = combo
            self._all = tuple(elems)

    def le(self, x, y):
        return set(x.id) <= set(y.id)

    def _register(self, combo):
        id_ = tuple(m.id for m in combo)
        if id_ not in self._members_of:
            self._members_of[id_] = tuple(combo)
        return id_

    def elem(self, id_):
        if self._all is not None:
            for e in self._all:
                if e.id == id_:
                    return e
            raise PreconditionError(f"{self.name}: unknown element {id_!r}")
        combo = tuple(sorted((self.base.elem(i) for i in id_), key=IndexElem.sort_key))
        if not any(all(self.base.le(x, m) for x in combo) for m in combo):
            raise PreconditionError(f"{self.name}: {id_!r} has no maximum")
        self._register(combo)
        return IndexElem(tuple(m.id for m in combo), max(m.rank for m in combo))

    def members(self, x: IndexElem) -> tuple:
        if x.id not in self._members_of:
            self.elem(x.id)
        return self._members_of[x.id]

    def max_of(self, x: IndexElem) -> IndexElem:
        """The base element that `x` names: its unique maximum."""
        combo = self.members(x)
        for m in combo:
            if all(self.base.le(y, m) for y in combo):
                return m
        raise PreconditionError(f"{self.name}: {x.id!r} lost its maximum")

    def _build_window(self, h):
        if self._all is not None:
            return self._all[: h + 1]
        members = self.base.window(h)
        if 2 ** len(members) - 1 > WINDOW_GUARD:
            raise UnsupportedQueryError(
                f"{self.name}: window at H={h} would exceed {WINDOW_GUARD} elements; "
                "lower the horizon"
            )
        out = []
        for combo in _subsets_with_max(self.base, members):
            id_ = self._register(combo)
            out.append(IndexElem(id_, max(m.rank for m in combo)))
        out.sort(key=IndexElem.sort_key)
        return out

    def exhaustive_at(self, h):
        return self._all is not None and h >= len(self._all) - 1

    @property
    def supports_predecessors(self):
        return True

    def predecessors(self, x):
        combo = self.members(x)
        out = []
        for r in range(1, len(combo)):
            for sub in itertools.combinations(combo, r):
                if any(all(self.base.le(y, m) for y in sub) for m in sub):
                    id_ = self._register(sub)
                    if self._all is not None:
                        out.append(self.elem(id_))
                    else:
                        out.append(IndexElem(id_, max(m.rank for m in sub)))
        out.sort(key=IndexElem.sort_key)
        return tuple(out)


class SubsetPoset(IndexPoset):
    """A finite, explicitly listed subset of a parent poset. Elements keep
    their parent ids and ranks, so they compare equal across the two."""

    kind = "finite"

    def __init__(self, parent: IndexPoset, members, name=""):
        super().__init__()
        self.parent = parent
        seen = {}
        for m in members:
            seen.setdefault(m.id, m)
        self.elements = tuple(sorted(seen.values(), key=IndexElem.sort_key))
        if not self.elements:
            raise PreconditionError("empty subset")
        self.name = name or f"sub({parent.name})"
        self.antisymmetric = parent.antisymmetric or all(
            not (parent.le(x, y) and parent.le(y, x))
            for x, y in itertools.combinations(self.elements, 2)
        )
        comparable = all(
            parent.le(x, y) or parent.le(y, x)
            for x, y in itertools.combinations(self.elements, 2)
        )
        self.sequence_like = self.antisymmetric and comparable

    def le(self, x, y):
        return self.parent.le(x, y)

    def elem(self, id_):
        for e in self.elements:
            if e.id == id_:
                return e
        raise PreconditionError(f"{self.name}: unknown element {id_!r}")

    def _build_window(self, h):
        return tuple(e for e in self.elements if e.rank <= h)

    def exhaustive_at(self, h):
        return h >= max(e.rank for e in self.elements)

    @property
    def supports_predecessors(self):
        return True

    def predecessors(self, x):
        return tuple(y for y in self.elements if y.id != x.id and self.le(y, x))

    def maximum(self):
        for m in self.elements:
            if all(self.le(y, m) for y in self.elements):
                return m
        return None


class PairPoset(IndexPoset):
    """Pairs (a, b) drawn from two posets, filtered by a membership predicate
    and ordered componentwise. rank = max of the component ranks."""

    def __init__(self, first: IndexPoset, second: IndexPoset, member, name="pairs"):
        super().__init__()
        self.first = first
        self.second = second
        self.member = member
        self.name = name
        self.kind = "finite" if (first.kind == "finite" and second.kind == "finite") else "windowed"
        self.antisymmetric = first.antisymmetric and second.antisymmetric

    def components(self, x: IndexElem):
        a_id, b_id = x.id
        return self.first.elem(a_id), self.second.elem(b_id)

    def le(self, x, y):
        xa, xb = self.components(x)
        ya, yb = self.components(y)
        return self.first.le(xa, ya) and self.second.le(xb, yb)

    def elem(self, id_):
        a_id, b_id = id_
        ea, eb = self.first.elem(a_id), self.second.elem(b_id)
        if not self.member(ea, eb):
            raise PreconditionError(f"{self.name}: {id_!r} not a member")
        return IndexElem((ea.id, eb.id), max(ea.rank, eb.rank))

    def _build_window(self, h):
        out = [
            IndexElem((ea.id, eb.id), max(ea.rank, eb.rank))
            for ea in self.first.window(h)
            for eb in self.second.window(h)
            if self.member(ea, eb)
        ]
        out.sort(key=IndexElem.sort_key)
        return out

    def exhaustive_at(self, h):
        return self.first.exhaustive_at(h) and self.second.exhaustive_at(h)

    @property
    def supports_predecessors(self):
        return True

    def predecessors(self, x):
        return tuple(y for y in self.window(x.rank) if y.id != x.id and self.le(y, x))


# ---------------------------------------------------------------------------
# Operations


def enumerate_window(poset: IndexPoset, h: int) -> list:
    """All elements of rank <= H, rank-major then id. Deterministic."""
    return list(poset.window(h))


def is_directed(poset: IndexPoset, h: int) -> Verdict:
    """Does every pair in the window have an upper bound in the window?"""
    w = poset.window(h)
    mode = _mode(poset, h)
    if poset.sequence_like:
        table = tuple(((x, x), x) for x in w[-1:])  # top bounds everything
        return Verdict(mode, h, True, WitnessTable(table))
    entries = []
    for x, y in itertools.combinations_with_replacement(w, 2):
        for z in w:
            if poset.le(x, z) and poset.le(y, z):
                entries.append(((x, y), z))
                break
        else:
            return Verdict(mode, h, False, Counterexample((x, y)))
    return Verdict(mode, h, True, WitnessTable(tuple(entries)))


def _membership(subset):
    if callable(subset):
        return subset
    ids = {m.id if isinstance(m, IndexElem) else m for m in subset}
    return lambda e: e.id in ids


def is_cofinal(poset: IndexPoset, subset, h: int) -> Verdict:
    """Is every window element dominated by a subset element in the window?"""
    member = _membership(subset)
    w = poset.window(h)
    candidates = [e for e in w if member(e)]
    entries = []
    for x in w:
        for s in candidates:
            if poset.le(x, s):
                entries.append((x, s))
                break
        else:
            return Verdict(_mode(poset, h), h, False, Counterexample((x,)))
    return Verdict(_mode(poset, h), h, True, WitnessTable(tuple(entries)))


def is_cofinite(poset: IndexPoset, h: int) -> Verdict:
    """Does every window element have a finite, enumerable predecessor set?"""
    if not poset.supports_predecessors:
        raise UnsupportedQueryError(f"{poset.name}: predecessors unavailable")
    entries = []
    for x in poset.window(h):
        preds = poset.predecessors(x)
        if preds is None:
            return Verdict(_mode(poset, h), h, False, Counterexample((x,)))
        entries.append((x, len(preds)))
    return Verdict(_mode(poset, h), h, True, WitnessTable(tuple(entries)))


def mardesic(poset: IndexPoset) -> MardesicPoset:
    """The poset of finite nonempty subsets possessing a maximum, ordered by
    inclusion. Requires antisymmetry."""
    return MardesicPoset(poset)


def upper_bound(poset: IndexPoset, a: IndexElem, b: IndexElem, h: int):
    """First window element dominating both, or None."""
    for z in poset.window(h):
        if poset.le(a, z) and poset.le(b, z):
            return z
    return None
