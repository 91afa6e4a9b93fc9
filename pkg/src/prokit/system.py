"""Delay-inverse systems and their object-level reductions.

A system assigns an object to every index element and a bond to every
related pair, contravariantly: bond(a, a') maps the object at a' to the
object at a. Commutativity of composite bonds is only demanded above a
per-index commutation threshold, which this module searches for inside
finite windows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .category import Mor, get_backend
from .errors import InconclusiveError, PreconditionError, ProkitError
from .indexset import (
    Counterexample,
    IndexElem,
    IndexPoset,
    MissingWitness,
    SubsetPoset,
    Verdict,
    WitnessTable,
    is_cofinal,
    is_directed,
    mardesic,
)


@dataclass(frozen=True)
class DelaySystem:
    index: IndexPoset
    backend: str
    object_at: object  # IndexElem -> Obj
    bond_at: object  # (IndexElem, IndexElem) with lo <= hi -> Mor
    name: str = "system"

    @property
    def cat(self):
        return get_backend(self.backend)

    def object(self, a: IndexElem):
        return self.object_at(a)

    def bond(self, lo: IndexElem, hi: IndexElem) -> Mor:
        if not self.index.le(lo, hi):
            raise PreconditionError(
                f"{self.name}: bond({lo.id!r}, {hi.id!r}) requires {lo.id!r} <= {hi.id!r}"
            )
        return self.bond_at(lo, hi)


def payload_composer(system: DelaySystem, h: int):
    """Payload-level composition closure for the system's backend; the hot
    loops avoid Mor allocation entirely."""
    cat = system.cat
    if system.backend == "finset":
        return cat.pcompose
    w = system.index.window(h)
    if not w:
        return lambda gp, fp: cat.pcompose(gp, fp, 2)
    modulus = system.object(w[0]).payload[1]
    return lambda gp, fp: cat.pcompose(gp, fp, modulus)


@dataclass(frozen=True)
class CommutationEntry:
    elem: IndexElem
    verdict: Verdict

    @property
    def witness(self):
        return self.verdict.witness


@dataclass(frozen=True)
class CommutationReport:
    horizon: int
    entries: tuple

    @property
    def all_hold(self) -> bool:
        return all(e.verdict.holds for e in self.entries)

    @property
    def inconclusive(self) -> bool:
        """True when nothing was refuted but some witness fell outside."""
        return (not self.all_hold) and all(
            e.verdict.holds or e.verdict.inconclusive for e in self.entries
        )

    def witness_map(self) -> dict:
        return {e.elem.id: e.witness.id for e in self.entries if e.verdict.holds}

    def first_failure(self):
        for e in self.entries:
            if not e.verdict.holds:
                return e
        return None


def check_wellformed(system: DelaySystem, h: int) -> Verdict:
    """Bond boundaries and identity bonds across the window."""
    idx = system.index
    w = idx.window(h)
    cat = system.cat
    mode = "exact" if idx.exhaustive_at(h) else "windowed"
    try:
        for a in w:
            xa = system.object(a)
            if system.bond(a, a) != cat.identity(xa):
                return Verdict(mode, h, False, Counterexample(("identity-bond", a, a)))
        for hi in w:
            xhi = system.object(hi)
            for lo in w:
                if lo.id == hi.id or not idx.le(lo, hi):
                    continue
                b = system.bond(lo, hi)
                if b.dom != xhi or b.cod != system.object(lo):
                    return Verdict(mode, h, False, Counterexample(("boundary", lo, hi)))
    except ProkitError as exc:
        return Verdict(mode, h, False, Counterexample(("error", str(exc))))
    return Verdict(mode, h, True, WitnessTable(()))


def _bad_primes(system: DelaySystem, a: IndexElem, ups, pc):
    """Elements a' >= a that defeat some pair: there is a'' >= a' with
    bond(a,a') o bond(a',a'') != bond(a,a''). Badness of a pair does not
    depend on the candidate, so one scan serves every candidate."""
    le = system.index.le
    direct = {x.id: system.bond(a, x).payload for x in ups}
    bad = {}
    sample = None
    for ap in ups:
        gp = direct[ap.id]
        for app in ups:
            if app.id == ap.id or not le(ap, app):
                continue
            if pc(gp, system.bond(ap, app).payload) != direct[app.id]:
                bad[ap.id] = app
                if sample is None:
                    sample = (a, ap, app)
                break
    return bad, sample


def min_commutation_index(system: DelaySystem, a: IndexElem, h: int) -> Verdict:
    """Least a* >= a (enumeration order) such that every pair a'' >= a' >= a*
    inside the window commutes with the direct bond from a.

    In windowed mode a candidate whose in-window pair domain is only the
    diagonal is rejected: the window top would otherwise witness anything.
    Exact mode accepts it, because there the domain truly is that small.
    """
    idx = system.index
    w = idx.window(h)
    le = idx.le
    exact = idx.exhaustive_at(h)
    mode = "exact" if exact else "windowed"
    ups = [x for x in w if le(a, x)]
    if not ups:
        return Verdict(mode, h, False, MissingWitness(h, (a,)))
    pc = payload_composer(system, h)
    bad, sample = _bad_primes(system, a, ups, pc)

    def nontrivial_above(c):
        for x in ups:
            if not le(c, x):
                continue
            for y in ups:
                if y.id != x.id and le(x, y):
                    return True
        return False

    refuted = []
    for c in ups:
        live = [ap for ap in ups if ap.id in bad and le(c, ap)]
        if live:
            refuted.append((c, live[0], bad[live[0].id]))
            continue
        if exact or nontrivial_above(c):
            return Verdict(mode, h, True, WitnessTable(((a, c),)))
        refuted.append((c, None, None))
    if exact:
        return Verdict(mode, h, False, Counterexample((a, tuple(refuted))))
    detail = (a, sample) if sample is not None else (a,)
    return Verdict(mode, h, False, MissingWitness(h, detail))


def check_delay(system: DelaySystem, h: int) -> CommutationReport:
    """min_commutation_index for every window element."""
    return CommutationReport(
        h,
        tuple(
            CommutationEntry(a, min_commutation_index(system, a, h))
            for a in system.index.window(h)
        ),
    )


def check_strict(system: DelaySystem, h: int) -> Verdict:
    """Do all window triples a <= a' <= a'' compose on the nose?"""
    idx = system.index
    w = idx.window(h)
    le = idx.le
    mode = "exact" if idx.exhaustive_at(h) else "windowed"
    pc = payload_composer(system, h)
    for a in w:
        direct = {x.id: system.bond(a, x).payload for x in w if le(a, x)}
        for ap in w:
            if not le(a, ap):
                continue
            gp = direct[ap.id]
            for app in w:
                if not le(ap, app):
                    continue
                if pc(gp, system.bond(ap, app).payload) != direct[app.id]:
                    return Verdict(mode, h, False, Counterexample((a, ap, app)))
    return Verdict(mode, h, True, WitnessTable(()))


def _commutation_witness(system: DelaySystem, a: IndexElem, h: int) -> IndexElem:
    v = min_commutation_index(system, a, h)
    if v.holds:
        return v.witness
    if v.inconclusive:
        raise InconclusiveError(
            f"{system.name}: no commutation index for {a.id!r} within H={h}", h
        )
    raise PreconditionError(
        f"{system.name}: delay condition refuted at {a.id!r} within H={h}"
    )


def restrict(system: DelaySystem, members, h: int):
    """Restriction to a cofinal subset, with the isomorphism pair.

    i includes the restriction into the original (identity components);
    j sends each a to the first subset element above its commutation index,
    through the corresponding bond.
    """
    from . import dmorphism as dm

    if isinstance(members, SubsetPoset):
        sub = members
    else:
        sub = SubsetPoset(system.index, members, name=f"{system.index.name}|restrict")
    cof = is_cofinal(system.index, {e.id for e in sub.elements}, h)
    if not cof.holds:
        raise PreconditionError(
            f"{system.name}: subset is not cofinal in window H={h}"
        )
    restricted = DelaySystem(
        index=sub,
        backend=system.backend,
        object_at=system.object_at,
        bond_at=system.bond_at,
        name=f"{system.name}|restricted",
    )
    inclusion = dm.DelayMorphism(
        source=system,
        target=restricted,
        index_map=lambda b: b,
        component=lambda b: system.cat.identity(system.object(b)),
        name="i",
    )
    jmap_cache: dict = {}

    def jmap(a: IndexElem) -> IndexElem:
        # One rank of headroom past the element itself, so that the witness
        # search at the window top can still see a nontrivial pair on lazy
        # indexes. Saturated finite windows are unaffected.
        if a.id not in jmap_cache:
            astar = _commutation_witness(system, a, max(h, a.rank + 1))
            for s in sub.elements:
                if system.index.le(astar, s):
                    jmap_cache[a.id] = s
                    break
            else:
                raise InconclusiveError(
                    f"{system.name}: no subset element above {astar.id!r} within H={h}", h
                )
        return jmap_cache[a.id]

    back = dm.DelayMorphism(
        source=restricted,
        target=system,
        index_map=jmap,
        component=lambda a: system.bond(a, jmap(a)),
        name="j",
    )
    return restricted, inclusion, back


def mardesic_reindex(system: DelaySystem):
    """Reindex over the poset of finite subsets-with-maximum.

    Objects and bonds are pulled back along max, so every piece of the
    output already occurs in the input.
    """
    from . import dmorphism as dm

    big = mardesic(system.index)  # precondition: antisymmetric
    reindexed = DelaySystem(
        index=big,
        backend=system.backend,
        object_at=lambda b: system.object(big.max_of(b)),
        bond_at=lambda b, b2: system.bond(big.max_of(b), big.max_of(b2)),
        name=f"{system.name}|mardesic",
    )
    fwd = dm.DelayMorphism(
        source=system,
        target=reindexed,
        index_map=big.max_of,
        component=lambda b: system.cat.identity(system.object(big.max_of(b))),
        name="f",
    )
    bwd = dm.DelayMorphism(
        source=reindexed,
        target=system,
        index_map=lambda a: big.elem((a.id,)),
        component=lambda a: system.cat.identity(system.object(a)),
        name="g",
    )
    return reindexed, fwd, bwd


def _window_maximum(poset: IndexPoset, h: int):
    w = poset.window(h)
    for m in reversed(w):
        if all(poset.le(x, m) for x in w):
            return m
    return None


def to_sequence(system: DelaySystem, h: int):
    """Reduce a countable directed system to a sequence (or, when the index
    has a maximum, to the rudimentary system on that maximum)."""
    idx = system.index
    direct = is_directed(idx, h)
    if not direct.holds:
        raise PreconditionError(f"{system.name}: index not directed within H={h}")
    if idx.kind == "finite":
        m = _window_maximum(idx, h)
        if m is None:
            raise InconclusiveError(
                f"{system.name}: finite index has no maximum within H={h}", h
            )
        return restrict(system, [m], h)
    w = idx.window(h)
    if not w:
        raise PreconditionError(f"{system.name}: empty window")
    chain = [w[0]]
    for nxt_floor in w[1:]:
        found = None
        for x in w:
            if idx.lt(chain[-1], x) and idx.le(nxt_floor, x):
                found = x
                break
        if found is None:
            break
        chain.append(found)
    cof = is_cofinal(idx, {c.id for c in chain}, h)
    if not cof.holds:
        raise InconclusiveError(
            f"{system.name}: greedy chain stalled below the window top at H={h}", h
        )
    return restrict(system, chain, h)


def commutative_extract(system: DelaySystem, h: int):
    """Iterate minimal commutation indices along a sequence: the next chain
    element is the first one strictly above the current witness. The
    restricted subsystem is strictly commutative on the chain.

    Returns (chain, restricted system, i, j).
    """
    idx = system.index
    if not idx.sequence_like:
        raise PreconditionError(
            f"{system.name}: commutative_extract needs a sequence-like index"
        )
    w = idx.window(h)
    if not w:
        raise PreconditionError(f"{system.name}: empty window")
    chain = [w[0]]
    while True:
        cur = chain[-1]
        if not any(idx.lt(cur, x) for x in w):
            break  # window top: nothing left to certify a step for
        astar = _commutation_witness(system, cur, h)
        nxt = None
        for x in w:
            if idx.lt(astar, x):
                nxt = x
                break
        if nxt is None:
            break
        chain.append(nxt)
    cof = is_cofinal(idx, {c.id for c in chain}, h)
    if not cof.holds:
        raise InconclusiveError(
            f"{system.name}: extracted chain stalled below the window top at H={h}", h
        )
    restricted, inc, back = restrict(system, chain, h)
    return tuple(chain), restricted, inc, back
