"""Delay-morphisms between delay-inverse systems.

A morphism carries an index map running against the bond direction and one
component per target index. All conditions here are the shifted-naturality
kind: equations are only required after composing with deep enough bonds,
and every check returns the witnesses it found.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CompositionError, InconclusiveError, PreconditionError
from .indexset import (
    Counterexample,
    IndexElem,
    IndexPoset,
    MissingWitness,
    PairPoset,
    SubsetPoset,
    Verdict,
    WitnessTable,
    is_cofinite,
)
from .system import (
    DelaySystem,
    _commutation_witness,
    payload_composer,
    to_sequence,
)


@dataclass(frozen=True)
class DelayMorphism:
    source: DelaySystem  # X over A
    target: DelaySystem  # Y over B
    index_map: object  # B-element -> A-element
    component: object  # B-element b -> Mor: X_{f(b)} -> Y_b
    name: str = "m"


def identity_morphism(system: DelaySystem) -> DelayMorphism:
    return DelayMorphism(
        source=system,
        target=system,
        index_map=lambda b: b,
        component=lambda b: system.cat.identity(system.object(b)),
        name=f"1_{system.name}",
    )


def compose(m2: DelayMorphism, m1: DelayMorphism) -> DelayMorphism:
    """m2 after m1; the component at c factors through m2's index map."""
    if m1.target is not m2.source:
        raise CompositionError(
            f"compose({m2.name}, {m1.name}): target of {m1.name} is not source of {m2.name}"
        )
    cat = m1.source.cat

    def comp(c):
        mid = m2.index_map(c)
        return cat.compose(m2.component(c), m1.component(mid))

    return DelayMorphism(
        source=m1.source,
        target=m2.target,
        index_map=lambda c: m1.index_map(m2.index_map(c)),
        component=comp,
        name=f"{m2.name}.{m1.name}",
    )


def _pc(m: DelayMorphism, h: int):
    # source and target share the backend; boundary checks enforce it
    return payload_composer(m.source, h) if m.source.index.window(h) else payload_composer(m.target, h)


def check_delay_morphism(m: DelayMorphism, h: int) -> Verdict:
    """Shifted naturality: for each b, some b* >= b such that every b' >= b*
    admits a >= f(b), f(b') with q_{bb'} f_{b'} p_{f(b')a'} = f_b p_{f(b)a'}
    for all a' >= a inside the window. Witness table maps b to (b*, {b': a})."""
    A, B = m.source.index, m.target.index
    X, Y = m.source, m.target
    wA, wB = A.window(h), B.window(h)
    exact = A.exhaustive_at(h) and B.exhaustive_at(h)
    mode = "exact" if exact else "windowed"
    pc = _pc(m, h)
    entries = []
    for b in wB:
        fb = m.index_map(b)
        fbc = m.component(b).payload
        found = None
        for bstar in wB:
            if not B.le(b, bstar):
                continue
            amap = []
            ok = True
            for bp in wB:
                if not B.le(bstar, bp):
                    continue
                qf = pc(Y.bond(b, bp).payload, m.component(bp).payload)
                fbp = m.index_map(bp)
                got = None
                for a in wA:
                    if not (A.le(fb, a) and A.le(fbp, a)):
                        continue
                    good = True
                    for ap in wA:
                        if not A.le(a, ap):
                            continue
                        if pc(qf, X.bond(fbp, ap).payload) != pc(fbc, X.bond(fb, ap).payload):
                            good = False
                            break
                    if good:
                        got = a
                        break
                if got is None:
                    ok = False
                    break
                amap.append((bp, got))
            if ok:
                found = (bstar, tuple(amap))
                break
        if found is None:
            evidence = Counterexample((b,)) if exact else MissingWitness(h, (b,))
            return Verdict(mode, h, False, evidence)
        entries.append((b, found))
    return Verdict(mode, h, True, WitnessTable(tuple(entries)))


def d_equiv(m1: DelayMorphism, m2: DelayMorphism, h: int) -> Verdict:
    """Do the two morphisms agree after deep enough bonds? For each b the
    witness a_b dominates both index images and every a >= a_b equates the
    composites."""
    if m1.source is not m2.source or m1.target is not m2.target:
        raise PreconditionError("d_equiv needs a shared source and target")
    A = m1.source.index
    B = m1.target.index
    X = m1.source
    wA, wB = A.window(h), B.window(h)
    exact = A.exhaustive_at(h) and B.exhaustive_at(h)
    mode = "exact" if exact else "windowed"
    pc = _pc(m1, h)
    entries = []
    for b in wB:
        f1, f2 = m1.index_map(b), m2.index_map(b)
        c1, c2 = m1.component(b).payload, m2.component(b).payload
        found = None
        refuted = []
        for ab in wA:
            if not (A.le(f1, ab) and A.le(f2, ab)):
                continue
            bad = None
            for a in wA:
                if not A.le(ab, a):
                    continue
                if pc(c1, X.bond(f1, a).payload) != pc(c2, X.bond(f2, a).payload):
                    bad = a
                    break
            if bad is None:
                found = ab
                break
            refuted.append((ab, bad))
        if found is None:
            if exact:
                return Verdict(mode, h, False, Counterexample((b, tuple(refuted))))
            return Verdict(mode, h, False, MissingWitness(h, (b,)))
        entries.append((b, found))
    return Verdict(mode, h, True, WitnessTable(tuple(entries)))


def verify_iso_pair(m: DelayMorphism, w: DelayMorphism, h: int) -> Verdict:
    """Are m and w mutually inverse up to d-equivalence at this horizon?"""
    if m.source is not w.target or m.target is not w.source:
        raise PreconditionError(
            f"verify_iso_pair: {w.name} must run opposite to {m.name} "
            "(same two systems, swapped roles)"
        )
    back = d_equiv(compose(w, m), identity_morphism(m.source), h)
    forth = d_equiv(compose(m, w), identity_morphism(m.target), h)
    value = back.holds and forth.holds
    mode = "exact" if (back.mode == "exact" and forth.mode == "exact") else "windowed"
    return Verdict(mode, h, value, WitnessTable((("w after m", back), ("m after w", forth))))


def make_special(m: DelayMorphism, h: int) -> DelayMorphism:
    """Re-aim a delay-morphism at a monotone index map.

    u(b) bounds f(b), the commutation index of f(b) in the source, and the
    inner witnesses of every predecessor whose tail contains b; the
    predecessor recursion then forces monotonicity. Components are the
    originals shifted through the corresponding bond, so the result is
    d-equivalent to the input with witness f'(b).
    """
    A, B = m.source.index, m.target.index
    X = m.source
    if not B.antisymmetric:
        raise PreconditionError("make_special needs an antisymmetric target index")
    if not B.supports_predecessors:
        raise PreconditionError("make_special needs predecessor enumeration")
    cof = is_cofinite(B, h)
    if not cof.holds:
        raise PreconditionError("make_special needs a cofinite target index")
    chk = check_delay_morphism(m, h)
    if not chk.holds:
        if chk.inconclusive:
            raise InconclusiveError(f"{m.name}: morphism witnesses incomplete at H={h}", h)
        raise PreconditionError(f"{m.name}: not a delay-morphism within H={h}")
    bstar_of = {}
    amap_of = {}
    for b, (bstar, amap) in chk.evidence.entries:
        bstar_of[b.id] = bstar
        amap_of[b.id] = {bp.id: a for bp, a in amap}
    wA, wB = A.window(h), B.window(h)

    def u_of(b: IndexElem) -> IndexElem:
        if b.id not in bstar_of:
            raise InconclusiveError(
                f"{m.name}: {b.id!r} lies outside the specialised window H={h}", h
            )
        needs = [m.index_map(b), _commutation_witness(X, m.index_map(b), h)]
        for p in wB:
            if B.le(p, b) and B.le(bstar_of[p.id], b):
                needs.append(amap_of[p.id][b.id])
        for alpha in wA:
            if all(A.le(n, alpha) for n in needs):
                return alpha
        raise InconclusiveError(f"{m.name}: no bound for u({b.id!r}) within H={h}", h)

    fprime_cache: dict = {}

    def fprime(b: IndexElem) -> IndexElem:
        if b.id in fprime_cache:
            return fprime_cache[b.id]
        needs = [u_of(b)] + [fprime(q) for q in B.predecessors(b)]
        for alpha in wA:
            if all(A.le(n, alpha) for n in needs):
                fprime_cache[b.id] = alpha
                return alpha
        raise InconclusiveError(f"{m.name}: no bound for f'({b.id!r}) within H={h}", h)

    cat = X.cat

    def comp(b):
        return cat.compose(m.component(b), X.bond(m.index_map(b), fprime(b)))

    return DelayMorphism(m.source, m.target, fprime, comp, name=f"{m.name}'")


@dataclass(frozen=True)
class LevelPackage:
    """A morphism levelled over the pair index C: same-index systems, the
    level morphism, and the two restriction morphisms with their square."""

    C: IndexPoset
    xsys: DelaySystem
    ysys: DelaySystem
    level: DelayMorphism
    i: DelayMorphism  # X -> X'
    j: DelayMorphism  # Y -> Y'
    square: object = None  # Verdict for j.m ~ level.i, None when trivial

    @staticmethod
    def from_level(m: DelayMorphism) -> "LevelPackage":
        """Package an already-level morphism without reindexing."""
        if m.source.index is not m.target.index:
            raise PreconditionError("from_level needs both systems over one index")
        return LevelPackage(
            C=m.source.index,
            xsys=m.source,
            ysys=m.target,
            level=m,
            i=identity_morphism(m.source),
            j=identity_morphism(m.target),
        )


def level_reindex(m: DelayMorphism, h: int) -> LevelPackage:
    """Reindex a special morphism over C = pairs (a, b) with f(b) <= a.

    X' and Y' are lazy views of X and Y through the two projections; the
    level morphism's component at (a, b) is f_b shifted from f(b) to a.
    """
    A, B = m.source.index, m.target.index
    X, Y = m.source, m.target
    if not (A.antisymmetric and B.antisymmetric):
        raise PreconditionError("level_reindex needs antisymmetric index sets")
    wB = B.window(h)
    for b in wB:
        for bp in wB:
            if B.le(b, bp) and not A.le(m.index_map(b), m.index_map(bp)):
                raise PreconditionError(
                    f"{m.name}: index map not increasing at ({b.id!r}, {bp.id!r}); "
                    "apply make_special first"
                )
    for poset, label in ((A, "source"), (B, "target")):
        if not is_cofinite(poset, h).holds:
            raise PreconditionError(f"level_reindex needs a cofinite {label} index")

    fmap = m.index_map
    pairs = PairPoset(A, B, lambda ea, eb: A.le(fmap(eb), ea), name="C")

    def xobj(c):
        return X.object(pairs.components(c)[0])

    def xbond(c, c2):
        return X.bond(pairs.components(c)[0], pairs.components(c2)[0])

    def yobj(c):
        return Y.object(pairs.components(c)[1])

    def ybond(c, c2):
        return Y.bond(pairs.components(c)[1], pairs.components(c2)[1])

    xs = DelaySystem(pairs, X.backend, xobj, xbond, name=f"{X.name}|C")
    ys = DelaySystem(pairs, Y.backend, yobj, ybond, name=f"{Y.name}|C")
    cat = X.cat

    def level_comp(c):
        a, b = pairs.components(c)
        return cat.compose(m.component(b), X.bond(fmap(b), a))

    level = DelayMorphism(xs, ys, lambda c: c, level_comp, name=f"{m.name}|level")
    i = DelayMorphism(
        X, xs, lambda c: pairs.components(c)[0],
        lambda c: cat.identity(xobj(c)), name="i",
    )
    j = DelayMorphism(
        Y, ys, lambda c: pairs.components(c)[1],
        lambda c: cat.identity(yobj(c)), name="j",
    )
    square = d_equiv(compose(j, m), compose(level, i), h)
    return LevelPackage(pairs, xs, ys, level, i, j, square)


def _square_threshold(lvl: DelayMorphism, cur: IndexElem, h: int) -> IndexElem:
    """Least c* >= cur with every square (cur, c'), c' >= c*, exact."""
    idx = lvl.source.index
    X, Y = lvl.source, lvl.target
    w = idx.window(h)
    le = idx.le
    pc = _pc(lvl, h)
    fcur = lvl.component(cur).payload
    ups = [x for x in w if le(cur, x)]
    bad = []
    for cp in ups:
        if cp.id == cur.id:
            continue  # diagonal square is an identity equation
        lhs = pc(Y.bond(cur, cp).payload, lvl.component(cp).payload)
        rhs = pc(fcur, X.bond(cur, cp).payload)
        if lhs != rhs:
            bad.append(cp)
    for cand in ups:
        if not any(le(cand, x) for x in bad):
            return cand
    raise InconclusiveError(
        f"{lvl.name}: no exact-square threshold for {cur.id!r} within H={h}", h
    )


@dataclass(frozen=True)
class ExtractResult:
    chain: tuple
    morphism: DelayMorphism  # strict level morphism over the chain
    inverse: object = None  # DelayMorphism when components inverted
    iso: object = None  # Verdict from verify_iso_pair, when inverse exists


def extract_pro_iso(package: LevelPackage, h: int) -> ExtractResult:
    """Extract a strictly commuting level restriction of a level
    delay-isomorphism along a cofinal chain.

    Each step jumps past the maximum of three witnesses at the current
    index: the commutation indices in both systems and the exact-square
    threshold of the level morphism. On the returned chain every
    naturality square commutes exactly. When every chain component is
    invertible the inverse morphism is extracted and the pair verified.
    """
    base_x, base_y, lvl = package.xsys, package.ysys, package.level
    if not base_x.index.sequence_like:
        seq_x, _, _ = to_sequence(base_x, h)
        sub = seq_x.index
        seq_y = DelaySystem(sub, base_y.backend, base_y.object_at, base_y.bond_at,
                            name=f"{base_y.name}|seq")
        lvl = DelayMorphism(seq_x, seq_y, lvl.index_map, lvl.component,
                            name=f"{lvl.name}|seq")
        base_x, base_y = seq_x, seq_y
    idx = base_x.index
    w = idx.window(h)
    if not w:
        raise PreconditionError("extract_pro_iso: empty window")
    chain = [w[0]]
    while True:
        cur = chain[-1]
        if not any(idx.lt(cur, x) for x in w):
            break
        cx = _commutation_witness(base_x, cur, h)
        cy = _commutation_witness(base_y, cur, h)
        ct = _square_threshold(lvl, cur, h)
        floor = max((cx, cy, ct), key=IndexElem.sort_key)
        nxt = None
        for x in w:
            if idx.lt(floor, x):
                nxt = x
                break
        if nxt is None:
            break
        chain.append(nxt)
    top = chain[-1]
    if not all(any(idx.le(x, c) for c in chain) for x in w):
        raise InconclusiveError(
            f"{lvl.name}: extraction chain stalled below the window top at H={h}", h
        )
    sub = SubsetPoset(idx, chain, name=f"{idx.name}|extract")
    xr = DelaySystem(sub, base_x.backend, base_x.object_at, base_x.bond_at,
                     name=f"{base_x.name}|strict")
    yr = DelaySystem(sub, base_y.backend, base_y.object_at, base_y.bond_at,
                     name=f"{base_y.name}|strict")
    comps = {c.id: lvl.component(c) for c in chain}
    mor = DelayMorphism(xr, yr, lambda c: c, lambda c: comps[c.id],
                        name=f"{lvl.name}|strict")
    cat = xr.cat
    inv_comps = {}
    for c in chain:
        inv = cat.invert(comps[c.id])
        if inv is None:
            return ExtractResult(tuple(chain), mor)
        inv_comps[c.id] = inv
    winv = DelayMorphism(yr, xr, lambda c: c, lambda c: inv_comps[c.id],
                         name=f"{lvl.name}|strict-inverse")
    iso = verify_iso_pair(mor, winv, h)
    return ExtractResult(tuple(chain), mor, winv, iso)
