"""Shared generators for the test suite.

Random small posets, strict systems over them, and morphism families with
known equivalence classes.  Everything is seeded through an explicit
random.Random so tests stay reproducible.
"""

import random

from prokit import (
    FINSET,
    MATMOD,
    DelayMorphism,
    DelaySystem,
    FinitePoset,
    is_directed,
)


def random_directed_poset(rng: random.Random, max_n: int = 5) -> FinitePoset:
    """Random antisymmetric directed poset with at most max_n elements.

    Edges only go from smaller to larger integer ids, so antisymmetry is
    automatic.  When a draw is not directed we retry with one slot reserved
    for a forced top element.
    """
    while True:
        n = rng.randint(2, max_n)
        ids = list(range(n))
        pairs = [(i, j) for i in ids for j in ids
                 if i < j and rng.random() < 0.45]
        p = FinitePoset(ids, pairs, name=f"rand{n}")
        if is_directed(p, n).holds:
            return p
        if n < max_n:
            top = n
            return FinitePoset(ids + [top], pairs + [(i, top) for i in ids],
                               name=f"rand{n}+top")
        # n == max_n and not directed: redraw


def chain_poset(n: int, name: str = None) -> FinitePoset:
    return FinitePoset(list(range(n)), [(i, i + 1) for i in range(n - 1)],
                       name=name or f"chain{n}")


def levels_of(poset: FinitePoset) -> dict:
    """Length of the longest chain strictly below each element."""
    elems = poset.window(len(poset.elements))
    lv = {}

    def rec(a):
        if a.id not in lv:
            below = [b for b in elems if b.id != a.id and poset.le(b, a)]
            lv[a.id] = 1 + max((rec(b) for b in below), default=-1)
        return lv[a.id]

    for e in elems:
        rec(e)
    return lv


def random_endo(rng: random.Random, k: int) -> tuple:
    return tuple(rng.randrange(k) for _ in range(k))


def _pow_finset(e: tuple, n: int) -> tuple:
    out = tuple(range(len(e)))
    for _ in range(n):
        out = tuple(e[v] for v in out)
    return out


def _pow_matmod(e, n: int, dim: int, modulus: int):
    out = tuple(tuple(1 if i == j else 0 for j in range(dim))
                for i in range(dim))
    for _ in range(n):
        out = tuple(tuple(sum(e[i][k] * out[k][j] for k in range(dim)) % modulus
                          for j in range(dim)) for i in range(dim))
    return out


def strict_system(poset: FinitePoset, rng: random.Random, backend="finset",
                  points: int = 4, modulus: int = 5,
                  name: str = None) -> DelaySystem:
    """Strict system over any finite poset: one shared carrier, bond(lo, hi)
    a fixed endomorphism raised to the level gap.  Path independence makes
    every triple commute exactly.
    """
    lv = levels_of(poset)
    if backend == "matmod":
        dim = rng.randint(2, points)
        obj = MATMOD.obj(dim, modulus)
        e = tuple(tuple(rng.randrange(modulus) for _ in range(dim))
                  for _ in range(dim))
        powers = {}

        def bond_at(lo, hi):
            n = lv[hi.id] - lv[lo.id]
            if n not in powers:
                powers[n] = _pow_matmod(e, n, dim, modulus)
            return MATMOD.mor(obj, obj, powers[n])
    else:
        k = rng.randint(2, points)
        obj = FINSET.obj(range(k))
        e = random_endo(rng, k)
        powers = {}

        def bond_at(lo, hi):
            n = lv[hi.id] - lv[lo.id]
            if n not in powers:
                powers[n] = _pow_finset(e, n)
            return FINSET.mor(obj, obj, powers[n])

    return DelaySystem(poset, backend, lambda a: obj, bond_at,
                       name=name or f"strict-{poset.name}")


def shift_chain_system(n: int, e: tuple, name: str = None) -> DelaySystem:
    """Strict FinSet system on chain(n) with bond(lo, hi) = e^(hi-lo)."""
    idx = chain_poset(n)
    k = len(e)
    obj = FINSET.obj(range(k))
    powers = {}

    def bond_at(lo, hi):
        d = hi.id - lo.id
        if d not in powers:
            powers[d] = _pow_finset(e, d)
        return FINSET.mor(obj, obj, powers[d])

    return DelaySystem(idx, "finset", lambda a: obj, bond_at,
                       name=name or f"shiftsys{n}")


def shift_morphism(system: DelaySystem, s: int, name: str = None):
    """Endomorphism shifting the index by s (clamped at the top); its
    component is the bond itself, so composites collapse to bond powers.
    All shifts of one system are d-equivalent.
    """
    top = system.index.elements[-1].id

    def fmap(b):
        return system.index.elem(min(b.id + s, top))

    return DelayMorphism(system, system, fmap,
                         lambda b: system.bond(b, fmap(b)),
                         name=name or f"shift{s}")


def const_morphism(system: DelaySystem, v: int, name: str = None):
    """Endomorphism with constant component at a fixed point v of the bond
    endo.  d-equivalent only to other constants at the same point.
    """
    obj = system.object(system.index.elem(0))
    pay = tuple(v for _ in obj.payload)  # finset only

    def comp(b):
        o = system.object(b)
        return FINSET.mor(o, o, pay)

    return DelayMorphism(system, system, lambda b: b, comp,
                         name=name or f"const{v}")


def reindex_pair(rng: random.Random, xlen: int, blen: int, monotone: bool,
                 points: int = 4):
    """Strict chain system X, a thinned copy Y over a shorter chain, and a
    morphism X -> Y whose index map sits above the thinning.  With
    monotone=False the jitter is shuffled so make_special has work to do.
    """
    xchain = chain_poset(xlen, name=f"A{xlen}")
    rngx = random.Random(rng.random())
    xsys = strict_system(xchain, rngx, points=points, name="X")

    bchain = chain_poset(blen, name=f"B{blen}")
    phi_ids = sorted(rng.sample(range(xlen), blen))
    phi = {b: phi_ids[b] for b in range(blen)}

    def yobj(b):
        return xsys.object(xchain.elem(phi[b.id]))

    def ybond(lo, hi):
        return xsys.bond(xchain.elem(phi[lo.id]), xchain.elem(phi[hi.id]))

    ysys = DelaySystem(bchain, xsys.backend, yobj, ybond, name="Y")

    fids = [min(phi[b] + rng.randint(0, 2), xlen - 1) for b in range(blen)]
    if monotone:
        fids.sort()
        fids = [max(f, phi[b]) for b, f in enumerate(fids)]

    def fmap(b):
        return xchain.elem(fids[b.id])

    def comp(b):
        return xsys.bond(xchain.elem(phi[b.id]), fmap(b))

    m = DelayMorphism(xsys, ysys, fmap, comp, name="f")
    return xsys, ysys, m
