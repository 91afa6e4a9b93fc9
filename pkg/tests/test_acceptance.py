"""Release acceptance suite.

Seven gates, each a single test with a wall-clock budget. Every gate prints
one PASS/FAIL line (run with -s to see them on a green suite). Budgets are
asserted, so a slow machine fails loudly instead of silently degrading.
"""

import itertools
import json
import os
import random
import subprocess
import sys
import time
from contextlib import contextmanager

import corpus_gen
import genutil

from prokit import (
    DelayMorphism,
    LevelPackage,
    check_strict,
    commutative_extract,
    compose,
    d_equiv,
    extract_pro_iso,
    get_backend,
    is_cofinite,
    is_directed,
    level_reindex,
    make_special,
    mardesic_reindex,
    min_commutation_index,
    verify_iso_pair,
)
from prokit.fuzz import (
    PlantSpec,
    gen_planted_level_iso,
    gen_planted_sequence,
    oracle_min_commutation,
    sample_morphism_delay,
)


@contextmanager
def gate(label, budget=None):
    t0 = time.monotonic()
    try:
        yield
    except BaseException:
        print(f"acceptance {label}: FAIL ({time.monotonic() - t0:.1f}s)", flush=True)
        raise
    dt = time.monotonic() - t0
    tail = f"{dt:.1f}s" if budget is None else f"{dt:.1f}s, budget {budget:.0f}s"
    verdict = "PASS" if budget is None or dt < budget else "FAIL"
    print(f"acceptance {label}: {verdict} ({tail})", flush=True)
    assert verdict == "PASS", f"{label}: {dt:.2f}s exceeded the {budget}s budget"


def test_1_planted_oracle_agreement():
    # 200 planted sequences, length 64, carriers of at most 6 points; the
    # engine and the brute-force oracle must name the same commutation index
    # for every element up to 32, and both must hit the planted profile.
    with gate("1 oracle agreement", 20.0):
        h = 64
        for seed in range(200):
            system, profile = gen_planted_sequence(
                PlantSpec(length=64, seed=seed, max_points=6)
            )
            for a in system.index.window(h):
                if a.id > 32:
                    continue
                v = min_commutation_index(system, a, h)
                o = oracle_min_commutation(system, a, h)
                assert v.holds and o is not None, (seed, a.id)
                assert v.witness.id == o.id == profile[a.id], (seed, a.id)


def test_2_countable_chain_extraction():
    # 100 planted seeds: the extracted chain subsystem must be strict under
    # an exhaustive triple scan, and the restriction isomorphism pair must
    # verify exactly at horizon 64.
    with gate("2 chain extraction", 30.0):
        h = 64
        for seed in range(100):
            system, _ = gen_planted_sequence(
                PlantSpec(length=64, seed=seed, max_points=6)
            )
            chain, sub, inc, back = commutative_extract(system, h)
            assert len(chain) >= 2, seed
            sv = check_strict(sub, h)
            assert sv.holds and sv.mode == "exact", seed
            iv = verify_iso_pair(inc, back, h)
            assert iv.holds and iv.mode == "exact", seed


def _brute_subsets_with_max(poset):
    elems = poset.window(len(poset.elements))
    out = []
    for r in range(1, len(elems) + 1):
        for combo in itertools.combinations(elems, r):
            if any(all(poset.le(x, m) for x in combo) for m in combo):
                out.append(tuple(sorted(m.id for m in combo)))
    return out


def test_3_subset_reindexing():
    # 100 random antisymmetric directed posets with at most 5 elements:
    # reindexed element count matches brute-force subset enumeration, the
    # subset poset is directed/cofinite/antisymmetric with exact verdicts,
    # maxima are monotone across every window pair, and the morphism pair
    # is an isomorphism.
    with gate("3 subset reindexing", 10.0):
        rng = random.Random(303)
        h = 31  # 2^5 - 1 subsets at most
        for trial in range(100):
            poset = genutil.random_directed_poset(rng, max_n=5)
            system = genutil.strict_system(poset, rng)
            ysys, fwd, bwd = mardesic_reindex(system)
            M = ysys.index
            w = M.window(h)
            assert M.exhaustive_at(h), trial
            assert len(w) == len(_brute_subsets_with_max(poset)), trial
            assert M.antisymmetric
            dv = is_directed(M, h)
            cv = is_cofinite(M, h)
            assert dv.holds and dv.mode == "exact", trial
            assert cv.holds and cv.mode == "exact", trial
            for x in w:
                for y in w:
                    if M.le(x, y):
                        assert poset.le(M.max_of(x), M.max_of(y)), (trial, x.id, y.id)
            iv = verify_iso_pair(fwd, bwd, h)
            assert iv.holds and iv.mode == "exact", trial


def test_4_morphism_levelling():
    # 50 seeded morphisms between strict chain systems; odd seeds get a
    # non-monotone index map and go through make_special first. The pair
    # index must order componentwise and the reindexing square must close
    # exactly.
    with gate("4 morphism levelling", 10.0):
        h = 8
        for seed in range(50):
            rng = random.Random(1000 + seed)
            monotone = seed % 2 == 0
            xsys, ysys, m = genutil.reindex_pair(rng, xlen=8, blen=3,
                                                 monotone=monotone)
            mm = m if monotone else make_special(m, h)
            pkg = level_reindex(mm, h)
            wc = pkg.C.window(h)
            assert pkg.C.exhaustive_at(h), seed
            for x in wc:
                for y in wc:
                    want = x.id[0] <= y.id[0] and x.id[1] <= y.id[1]
                    assert pkg.C.le(x, y) == want, (seed, x.id, y.id)
            assert pkg.square is not None and pkg.square.holds, seed
            sq = d_equiv(compose(pkg.j, mm), compose(pkg.level, pkg.i), h)
            assert sq.holds and sq.mode == "exact", seed


def test_5_iso_extraction():
    # 50 planted level delay-isomorphisms on length-48 sequences with
    # morphism delay at most 8, four finset plants to each matmod plant.
    # On the extracted chain every naturality square and strict triple must
    # close on the nose, and the extracted morphism with the planted
    # inverse must verify as an iso pair.
    with gate("5 iso extraction", 30.0):
        h = 48
        for seed in range(50):
            backend = "matmod" if seed % 5 == 4 else "finset"
            delay = sample_morphism_delay(random.Random(f"accept5:{seed}"))
            spec = PlantSpec(length=48, seed=seed, backend=backend,
                             morphism_delay=delay)
            xsys, ysys, fwd, bwd = gen_planted_level_iso(spec)
            res = extract_pro_iso(LevelPackage.from_level(fwd), h)
            assert len(res.chain) >= 2, seed
            xr, yr = res.morphism.source, res.morphism.target
            cat = get_backend(xr.backend)
            w = xr.index.window(h)
            for b in w:
                for bp in w:
                    if not xr.index.le(b, bp):
                        continue
                    left = cat.compose(res.morphism.component(b), xr.bond(b, bp))
                    right = cat.compose(yr.bond(b, bp), res.morphism.component(bp))
                    assert left == right, (seed, b.id, bp.id)
            for side in (xr, yr):
                sv = check_strict(side, h)
                assert sv.holds and sv.mode == "exact", (seed, side.name)
            winv = DelayMorphism(yr, xr, lambda c: c, bwd.component, name="winv")
            pv = verify_iso_pair(res.morphism, winv, h)
            assert pv.holds and pv.mode == "exact", seed
            assert res.inverse is not None and res.iso.holds, seed


def test_6_equivalence_laws():
    # Finite chain system with a maximum; the morphism pool splits into one
    # shift class and one class per constant. d-equivalence must be exactly
    # reflexive and symmetric on 500 samples, transitive on 200 triples,
    # and a congruence for composition on 100 composable quadruples.
    with gate("6 equivalence laws", 10.0):
        h = 8
        system = genutil.shift_chain_system(8, (0, 1, 2, 2))
        shifts = [genutil.shift_morphism(system, s) for s in range(8)]
        consts = [genutil.const_morphism(system, v) for v in (0, 1, 2)]
        classes = [shifts, [consts[0]], [consts[1]], [consts[2]]]
        pool = shifts + consts
        rng = random.Random(606)

        def eq(m1, m2):
            v = d_equiv(m1, m2, h)
            assert v.mode == "exact"
            return v.holds

        for _ in range(500):
            m1, m2 = rng.choice(pool), rng.choice(pool)
            assert eq(m1, m1)
            assert eq(m1, m2) == eq(m2, m1)

        premised = 0
        for _ in range(200):
            if rng.random() < 0.7:
                group = rng.choice(classes)
                f, g, k = (rng.choice(group) for _ in range(3))
            else:
                f, g, k = (rng.choice(pool) for _ in range(3))
            if eq(f, g) and eq(g, k):
                premised += 1
                assert eq(f, k)
        assert premised >= 100

        for _ in range(100):
            ga, gb = rng.choice(classes), rng.choice(classes)
            f, fp = rng.choice(ga), rng.choice(ga)
            g, gp = rng.choice(gb), rng.choice(gb)
            assert eq(f, fp) and eq(g, gp)
            assert eq(compose(g, f), compose(gp, fp))


def _run_cli(*args):
    env = {k: v for k, v in os.environ.items() if k != "PROKIT_HORIZON"}
    return subprocess.run([sys.executable, "-m", "prokit", *args],
                          capture_output=True, text=True, env=env)


def test_7_cli_determinism():
    # Every corpus document is a canonical-serialization fixed point, and
    # rerunning a command with identical inputs reproduces the report
    # modulo the timing field.
    with gate("7 cli determinism"):
        built = corpus_gen.build_corpus()
        assert built
        for name, text in built.items():
            path = os.path.join(corpus_gen.CORPUS_DIR, name)
            with open(path, "rb") as fh:
                assert fh.read() == text.encode("ascii"), name
            from prokit.documents import canonical_json
            assert canonical_json(json.loads(text)) == text, name
        planted = os.path.join(corpus_gen.CORPUS_DIR, "planted_nat.json")
        for cmd in (
            ["check", planted],
            ["reduce", planted, "--op", "extract"],
            ["fuzz", "--seeds", "5", "--len", "10", "--backend", "finset"],
        ):
            first = _run_cli(*cmd)
            second = _run_cli(*cmd)
            assert first.returncode == second.returncode, cmd
            r1, r2 = json.loads(first.stdout), json.loads(second.stdout)
            r1.pop("timing"), r2.pop("timing")
            assert r1 == r2, cmd
