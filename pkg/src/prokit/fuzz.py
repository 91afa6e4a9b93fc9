"""Seeded generators with planted answers, and an independent oracle.

The planted sequence hides its commutation profile in one defect family per
perturbed base: every bond strictly below the target carries a parity-keyed
marker at the base, and the pinned adjacency maps absorb markers arriving
from upstream. Only the base ever sees its own marker, so composites
disagree exactly below the target and the minimal commutation index is the
planted value. The oracle re-derives that index with its own composition
code and a different scan order; agreement between the two is evidence, not
an echo.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .category import FINSET, MATMOD
from .dmorphism import DelayMorphism
from .errors import GenerationError
from .indexset import NatPoset
from .system import DelaySystem, check_delay


@dataclass(frozen=True)
class PlantSpec:
    length: int
    seed: int = 0
    backend: str = "finset"
    delay_profile: tuple = None  # None: sampled from the seed
    max_points: int = 6  # finset carrier bound
    max_dim: int = 4  # matmod dimension bound
    modulus: int = 5
    morphism_delay: int = 0  # level-iso plants only


def sample_profile(length: int, rng: random.Random, cap: int = None) -> tuple:
    """A valid delay profile: profile[a] is a (honest) or a target in
    [a+2, cap]. The default cap leaves one index of slack below the top so
    extraction chains can always advance."""
    top = length - 2 if cap is None else cap
    prof = []
    for a in range(length):
        targets = list(range(a + 2, top + 1))
        if targets and rng.random() < 0.6:
            prof.append(rng.choice(targets))
        else:
            prof.append(a)
    return tuple(prof)


def sample_morphism_delay(rng: random.Random, top: int = 8) -> int:
    return rng.choice([0] + list(range(2, top + 1)))


def _check_profile(length: int, profile: tuple):
    if len(profile) != length:
        raise GenerationError("delay profile length must match the sequence length")
    for a, d in enumerate(profile):
        if d == a:
            continue
        if d == a + 1:
            raise GenerationError(
                f"delay target {a}+1 at index {a} is not plantable: "
                "no defective pair fits strictly below it"
            )
        if not a + 2 <= d < length:
            raise GenerationError(f"delay target {d} out of range at index {a}")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


# ---------------------------------------------------------------------------
# Sequence builders. Carriers, adjacency maps and prefix composites are all
# derived lazily from the seed, so the same spec always rebuilds the same
# system and unbounded indexes cost only what the window touches.


def _finset_sequence(idx, seed, size_of, perturbed, name):
    carriers = {}

    def carrier(k):
        if k not in carriers:
            carriers[k] = FINSET.obj(tuple(range(size_of(k))))
        return carriers[k]

    adjs = {}

    def adj(k):
        # X_{k+1} -> X_k, pinning the marker points {0,1,2} to the spine
        if k not in adjs:
            r = random.Random(f"{seed}:adj:{k}")
            adjs[k] = tuple(
                0 if v <= 2 else r.randrange(size_of(k)) for v in range(size_of(k + 1))
            )
        return adjs[k]

    hmemo = {}

    def honest(a, x):
        if (a, a) not in hmemo:
            hmemo[(a, a)] = tuple(range(size_of(a)))
        for y in range(a, x):
            if (a, y + 1) not in hmemo:
                hmemo[(a, y + 1)] = FINSET.pcompose(hmemo[(a, y)], adj(y))
        return hmemo[(a, x)]

    mors = {}

    def bond_at(lo, hi):
        key = (lo.id, hi.id)
        if key not in mors:
            a, x = key
            pay = honest(a, x)
            if x > a and perturbed(a, x):
                j = 1 if x % 2 == 0 else 2  # parity-keyed marker on the spine
                pay = tuple(j if v == 0 else v for v in pay)
            mors[key] = FINSET.mor(carrier(x), carrier(a), pay)
        return mors[key]

    return DelaySystem(idx, "finset", lambda e: carrier(e.id), bond_at, name=name)


def _matmod_sequence(idx, seed, modulus, dim_of, perturbed, name):
    carriers = {}

    def carrier(k):
        if k not in carriers:
            carriers[k] = MATMOD.obj(dim_of(k), modulus)
        return carriers[k]

    adjs = {}

    def adj(k):
        if k not in adjs:
            r = random.Random(f"{seed}:adj:{k}")
            dom_n, cod_n = dim_of(k + 1), dim_of(k)
            cols = [
                tuple(1 if i == 0 else 0 for i in range(cod_n))
                if j <= 2
                else tuple(r.randrange(modulus) for _ in range(cod_n))
                for j in range(dom_n)
            ]
            adjs[k] = tuple(tuple(col[i] for col in cols) for i in range(cod_n))
        return adjs[k]

    hmemo = {}

    def honest(a, x):
        if (a, a) not in hmemo:
            n = dim_of(a)
            hmemo[(a, a)] = tuple(
                tuple(1 if i == j else 0 for j in range(n)) for i in range(n)
            )
        for y in range(a, x):
            if (a, y + 1) not in hmemo:
                hmemo[(a, y + 1)] = MATMOD.pcompose(hmemo[(a, y)], adj(y), modulus)
        return hmemo[(a, x)]

    def mark(pay, x):
        # left-multiply by I + (e_j - e_0) e_0^T: row 0 clears, row j gains it
        j = 1 if x % 2 == 0 else 2
        rows = list(pay)
        r0 = rows[0]
        rows[j] = tuple((u + v) % modulus for u, v in zip(rows[j], r0))
        rows[0] = tuple(0 for _ in r0)
        return tuple(rows)

    mors = {}

    def bond_at(lo, hi):
        key = (lo.id, hi.id)
        if key not in mors:
            a, x = key
            pay = honest(a, x)
            if x > a and perturbed(a, x):
                pay = mark(pay, x)
            mors[key] = MATMOD.mor(carrier(x), carrier(a), pay)
        return mors[key]

    return DelaySystem(idx, "matmod", lambda e: carrier(e.id), bond_at, name=name)


def gen_planted_sequence(spec: PlantSpec):
    """A finite sequence whose minimal commutation index at base a is
    exactly profile[a], at any horizon that sees past the profile.

    Returns (system, profile). Sub-profile horizons are engineered to stay
    inconclusive: below the target every consecutive pair already disagrees,
    and the parity key keeps any candidate refutable inside the window.
    """
    length = spec.length
    if length < 2:
        raise GenerationError("sequence length must be >= 2")
    if spec.delay_profile is None:
        profile = sample_profile(length, random.Random(f"{spec.seed}:profile"))
    else:
        profile = tuple(spec.delay_profile)
    _check_profile(length, profile)
    idx = NatPoset(limit=length)
    srng = random.Random(f"{spec.seed}:sizes")

    def perturbed(a, x):
        return x < profile[a]

    if spec.backend == "finset":
        sizes = [
            srng.randint(3 if profile[k] > k else 2, max(3, spec.max_points))
            for k in range(length)
        ]
        system = _finset_sequence(
            idx, spec.seed, lambda k: sizes[k], perturbed, f"planted[{spec.seed}]"
        )
    elif spec.backend == "matmod":
        dims = [
            srng.randint(3 if profile[k] > k else 1, max(3, spec.max_dim))
            for k in range(length)
        ]
        system = _matmod_sequence(
            idx, spec.seed, spec.modulus, lambda k: dims[k], perturbed,
            f"planted[{spec.seed}]",
        )
    else:
        raise GenerationError(f"unknown backend {spec.backend!r}")
    return system, profile


def gen_strict_sequence(spec: PlantSpec) -> DelaySystem:
    """A strictly commutative finite sequence (the honest profile)."""
    system, _ = gen_planted_sequence(
        replace(spec, delay_profile=tuple(range(spec.length)))
    )
    return system


def gen_adversarial_sequence(spec: PlantSpec) -> DelaySystem:
    """An unbounded sequence with no commutation index at any base: every
    bond above a base carries the base's parity marker, so each candidate
    meets an opposite-parity pair and no finite window settles anything."""
    idx = NatPoset()

    def perturbed(a, x):
        return True

    def size_of(k):
        return random.Random(f"{spec.seed}:size:{k}").randint(3, max(3, spec.max_points))

    def dim_of(k):
        return random.Random(f"{spec.seed}:size:{k}").randint(3, max(3, spec.max_dim))

    if spec.backend == "finset":
        return _finset_sequence(idx, spec.seed, size_of, perturbed,
                                f"adversarial[{spec.seed}]")
    if spec.backend == "matmod":
        return _matmod_sequence(idx, spec.seed, spec.modulus, dim_of, perturbed,
                                f"adversarial[{spec.seed}]")
    raise GenerationError(f"unknown backend {spec.backend!r}")


# ---------------------------------------------------------------------------
# Planted level delay-isomorphisms


def _random_invertible(rng: random.Random, n: int, m: int) -> tuple:
    """Unit lower x unit upper x permutation: invertible for every modulus."""
    lo = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    up = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i):
            lo[i][j] = rng.randrange(m)
            up[j][i] = rng.randrange(m)
    perm = list(range(n))
    rng.shuffle(perm)
    pmat = tuple(tuple(1 if perm[i] == j else 0 for j in range(n)) for i in range(n))
    lu = MATMOD.pcompose(tuple(map(tuple, lo)), tuple(map(tuple, up)), m)
    return MATMOD.pcompose(lu, pmat, m)


def gen_planted_level_iso(spec: PlantSpec):
    """Two strict sequences over one chain plus a level morphism pair (m, w)
    that inverts exactly at every level.

    Naturality squares of m fail exactly on pairs b < b' < morphism_delay,
    so checks of m need depth D while w m and m w are identities on the
    nose. Returns (X, Y, m, w)."""
    length, delay = spec.length, spec.morphism_delay
    if length < 2:
        raise GenerationError("sequence length must be >= 2")
    if delay == 1:
        raise GenerationError(
            "morphism delay 1 is not plantable: no failing square fits below it"
        )
    if not 0 <= delay < length:
        raise GenerationError(f"morphism delay {delay} out of range")
    idx = NatPoset(limit=length)
    rng = random.Random(f"{spec.seed}:iso")
    if spec.backend == "finset":
        obj = FINSET.obj((0, 1, 2, 3))
        s_pay = (0, 1, 0, 1)  # core {0,1} fixed, transients fold onto it
        eps = (0, 1, 3, 2)  # core-fixing involution the core maps absorb
        phis = []
        for _ in range(length):
            p = list(range(4))
            rng.shuffle(p)
            phis.append(tuple(p))
        phinv = []
        for p in phis:
            out = [0] * 4
            for i, v in enumerate(p):
                out[v] = i
            phinv.append(tuple(out))

        def pc(gp, fp):
            return FINSET.pcompose(gp, fp)

        def mk(pay):
            return FINSET.mor(obj, obj, pay)
    elif spec.backend == "matmod":
        if not _is_prime(spec.modulus):
            raise GenerationError("level-iso plants need a prime modulus")
        obj = MATMOD.obj(4, spec.modulus)
        s_pay = ((1, 0, 1, 0), (0, 1, 0, 1), (0, 0, 0, 0), (0, 0, 0, 0))
        eps = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0))
        phis = [_random_invertible(rng, 4, spec.modulus) for _ in range(length)]

        def pc(gp, fp):
            return MATMOD.pcompose(gp, fp, spec.modulus)

        def mk(pay):
            return MATMOD.mor(obj, obj, pay)

        phinv = []
        for p in phis:
            inv = MATMOD.invert(mk(p))
            phinv.append(inv.payload)
    else:
        raise GenerationError(f"unknown backend {spec.backend!r}")

    ident = FINSET.identity(obj) if spec.backend == "finset" else MATMOD.identity(obj)
    powers = {0: ident.payload}

    def spow(k):
        for j in range(1, k + 1):
            if j not in powers:
                powers[j] = pc(s_pay, powers[j - 1])
        return powers[k]

    xb = {}

    def xbond(lo, hi):
        key = (lo.id, hi.id)
        if key not in xb:
            xb[key] = mk(spow(hi.id - lo.id))
        return xb[key]

    yb = {}

    def ybond(lo, hi):
        key = (lo.id, hi.id)
        if key not in yb:
            yb[key] = mk(pc(pc(phis[lo.id], spow(hi.id - lo.id)), phinv[hi.id]))
        return yb[key]

    xsys = DelaySystem(idx, spec.backend, lambda e: obj, xbond, name=f"iso-src[{spec.seed}]")
    ysys = DelaySystem(idx, spec.backend, lambda e: obj, ybond, name=f"iso-dst[{spec.seed}]")
    fcomp = {
        b: mk(pc(phis[b], eps)) if b < delay else mk(phis[b]) for b in range(length)
    }
    wcomp = {
        b: mk(pc(eps, phinv[b])) if b < delay else mk(phinv[b]) for b in range(length)
    }
    fwd = DelayMorphism(xsys, ysys, lambda b: b, lambda b: fcomp[b.id], name="f")
    bwd = DelayMorphism(ysys, xsys, lambda b: b, lambda b: wcomp[b.id], name="f_inv")
    return xsys, ysys, fwd, bwd


# ---------------------------------------------------------------------------
# Independent oracle


def _ocompose_finset(gp, fp):
    out = []
    for v in fp:
        out.append(gp[v])
    return tuple(out)


def _ocompose_matmod(gp, fp, modulus):
    if not fp:
        return tuple(() for _ in gp)
    rows = []
    for grow in gp:
        row = []
        for j in range(len(fp[0])):
            acc = 0
            for k in range(len(fp)):
                acc += grow[k] * fp[k][j]
            row.append(acc % modulus)
        rows.append(tuple(row))
    return tuple(rows)


def oracle_min_commutation(system: DelaySystem, a, h: int):
    """Reference answer for min_commutation_index: ascending candidates,
    refutation probes with a'' descending, own composition code. Returns
    the witness element, or None when the window cannot certify one."""
    idx = system.index
    w = idx.window(h)
    ups = [x for x in w if idx.le(a, x)]
    if not ups:
        return None
    exact = idx.exhaustive_at(h)
    if system.backend == "matmod":
        modulus = system.object(a).payload[1]

        def comp(gp, fp):
            return _ocompose_matmod(gp, fp, modulus)
    else:
        comp = _ocompose_finset
    okmemo = {}

    def pair_ok(ap, app):
        key = (ap.id, app.id)
        if key not in okmemo:
            via = comp(system.bond(a, ap).payload, system.bond(ap, app).payload)
            okmemo[key] = via == system.bond(a, app).payload
        return okmemo[key]

    for cand in ups:
        above = [x for x in ups if idx.le(cand, x)]
        saw_pair = False
        good = True
        for ap in above:
            for app in reversed(above):
                if ap.id == app.id or not idx.le(ap, app):
                    continue
                saw_pair = True
                if not pair_ok(ap, app):
                    good = False
                    break
            if not good:
                break
        if good and (exact or saw_pair):
            return cand
    return None


def run_fuzz(seeds: int, length: int, backend: str, base_seed: int = 0) -> dict:
    """Plant-vs-engine-vs-oracle agreement over a block of seeds. The
    horizon is the full chain, so verdicts are exact."""
    rows = []
    for s in range(seeds):
        spec = PlantSpec(length=length, seed=base_seed + s, backend=backend)
        system, profile = gen_planted_sequence(spec)
        report = check_delay(system, length)
        mismatches = []
        for entry in report.entries:
            ae = entry.elem
            engine = entry.witness.id if entry.verdict.holds else None
            oracle = oracle_min_commutation(system, ae, length)
            oracle = oracle.id if oracle is not None else None
            planted = profile[ae.id]
            if engine != planted or oracle != planted:
                mismatches.append(
                    {"index": ae.id, "engine": engine, "oracle": oracle, "planted": planted}
                )
        rows.append(
            {
                "seed": spec.seed,
                "length": length,
                "backend": backend,
                "planted": list(profile),
                "mismatches": mismatches,
                "ok": not mismatches,
            }
        )
    return {"seeds": seeds, "ok": all(r["ok"] for r in rows), "rows": rows}
