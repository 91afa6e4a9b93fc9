"""Concrete category backends: composition, identities, inversion."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from prokit import FINSET, MATMOD, CompositionError, PreconditionError, get_backend
from prokit.category import identity, mor_eq


def rand_finset_mor(rng, dom, cod):
    n = len(cod.payload)
    return FINSET.mor(dom, cod, tuple(rng.randrange(n) for _ in dom.payload))


def rand_matmod_mor(rng, dom, cod):
    m = dom.payload[1]
    rows = tuple(tuple(rng.randrange(m) for _ in range(dom.payload[0]))
                 for _ in range(cod.payload[0]))
    return MATMOD.mor(dom, cod, rows)


# ---------------------------------------------------------------------------
# basics


def test_get_backend():
    assert get_backend("finset") is FINSET
    assert get_backend("matmod") is MATMOD
    with pytest.raises(PreconditionError):
        get_backend("groups")


def test_finset_compose():
    a = FINSET.obj(range(3))
    f = FINSET.mor(a, a, (1, 2, 0))
    g = FINSET.mor(a, a, (0, 0, 1))
    assert FINSET.compose(g, f).payload == (0, 1, 0)


def test_matmod_compose_mod5():
    a = MATMOD.obj(1, 5)
    f = MATMOD.mor(a, a, ((3,),))
    g = MATMOD.mor(a, a, ((2,),))
    assert MATMOD.compose(g, f).payload == ((1,),)  # 2*3 = 6 = 1 mod 5


def test_boundary_mismatch():
    a, b = FINSET.obj(range(2)), FINSET.obj(range(3))
    f = FINSET.mor(a, a, (0, 1))
    g = FINSET.mor(b, b, (0, 1, 2))
    with pytest.raises(CompositionError):
        FINSET.compose(g, f)


def test_backend_mismatch():
    a = FINSET.obj(range(2))
    b = MATMOD.obj(2, 5)
    f = FINSET.mor(a, a, (0, 1))
    g = MATMOD.mor(b, b, ((1, 0), (0, 1)))
    with pytest.raises(CompositionError):
        FINSET.compose(g, f)


def test_finset_mor_validation():
    a = FINSET.obj(range(2))
    with pytest.raises(PreconditionError):
        FINSET.mor(a, a, (0,))  # wrong arity
    with pytest.raises(PreconditionError):
        FINSET.mor(a, a, (0, 5))  # out of range


def test_matmod_mor_validation():
    a = MATMOD.obj(2, 5)
    b = MATMOD.obj(2, 7)
    with pytest.raises(PreconditionError):
        MATMOD.mor(a, b, ((1, 0), (0, 1)))  # modulus mismatch
    with pytest.raises(PreconditionError):
        MATMOD.mor(a, a, ((1, 0),))  # wrong shape
    assert MATMOD.mor(a, a, ((6, 0), (0, -1))).payload == ((1, 0), (0, 4))


def test_duplicate_points_rejected():
    with pytest.raises(PreconditionError):
        FINSET.obj([0, 0, 1])


# ---------------------------------------------------------------------------
# inversion


def test_finset_invert_bijection():
    a = FINSET.obj(range(4))
    f = FINSET.mor(a, a, (2, 0, 3, 1))
    g = FINSET.invert(f)
    assert mor_eq(FINSET, FINSET.compose(g, f), identity(FINSET, a))
    assert FINSET.compose(f, g) == FINSET.identity(a)


def test_finset_invert_non_bijection():
    a = FINSET.obj(range(3))
    assert FINSET.invert(FINSET.mor(a, a, (0, 0, 1))) is None


def test_matmod_invert_prime():
    a = MATMOD.obj(3, 7)
    rng = random.Random(2)
    found = 0
    for _ in range(50):
        f = rand_matmod_mor(rng, a, a)
        g = MATMOD.invert(f)
        if g is None:
            continue
        found += 1
        assert MATMOD.compose(g, f) == MATMOD.identity(a)
        assert MATMOD.compose(f, g) == MATMOD.identity(a)
    assert found > 10  # most random matrices mod 7 are invertible


def test_matmod_invert_singular():
    a = MATMOD.obj(2, 5)
    f = MATMOD.mor(a, a, ((1, 2), (2, 4)))  # rank 1
    assert MATMOD.invert(f) is None


def test_identity_payloads():
    a = FINSET.obj(range(3))
    assert FINSET.identity(a).payload == (0, 1, 2)
    b = MATMOD.obj(2, 3)
    assert MATMOD.identity(b).payload == ((1, 0), (0, 1))


# ---------------------------------------------------------------------------
# laws, sampled heavily


def test_associativity_and_unit_seeded():
    rng = random.Random(9)
    a = FINSET.obj(range(5))
    b = MATMOD.obj(3, 6)  # composite modulus on purpose
    for _ in range(400):
        f, g, h = (rand_finset_mor(rng, a, a) for _ in range(3))
        assert FINSET.compose(h, FINSET.compose(g, f)) == FINSET.compose(FINSET.compose(h, g), f)
        assert FINSET.compose(f, FINSET.identity(a)) == f
        assert FINSET.compose(FINSET.identity(a), f) == f
    for _ in range(200):
        f, g, h = (rand_matmod_mor(rng, b, b) for _ in range(3))
        assert MATMOD.compose(h, MATMOD.compose(g, f)) == MATMOD.compose(MATMOD.compose(h, g), f)
        assert MATMOD.compose(f, MATMOD.identity(b)) == f
        assert MATMOD.compose(MATMOD.identity(b), f) == f


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=3), min_size=4, max_size=4),
       st.lists(st.integers(min_value=0, max_value=3), min_size=4, max_size=4))
def test_pcompose_matches_compose(fp, gp):
    a = FINSET.obj(range(4))
    f, g = FINSET.mor(a, a, fp), FINSET.mor(a, a, gp)
    assert FINSET.compose(g, f).payload == FINSET.pcompose(tuple(gp), tuple(fp))


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 30))
def test_invert_roundtrip_random_permutation(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    a = FINSET.obj(range(n))
    perm = list(range(n))
    rng.shuffle(perm)
    f = FINSET.mor(a, a, tuple(perm))
    g = FINSET.invert(f)
    assert g is not None
    assert FINSET.compose(g, f) == FINSET.identity(a)
