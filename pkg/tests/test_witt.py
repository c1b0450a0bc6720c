import random

import pytest
from hypothesis import given, strategies as st

from conftest import seeds
from wittkit.errors import HandleMismatch, NoFrobeniusLift, NotInImage, NotNMap, NotTMap, UniversalTooLarge
from wittkit.generators import random_map_into, random_poset, random_vector
from wittkit.maps import compose, divisor_mult, fold, fold_many, inclusion, make_map, mult_map
from wittkit.poset import TruncationPoset, divisor_poset, from_set
from wittkit.rings import ZZ, Modular, PolyRing, parse_poly
from wittkit.witt import (
    GhostVector,
    add,
    apply_ghost,
    apply_kind,
    change_ring,
    classical,
    dwork_check,
    frobenius,
    ghost,
    ghost_norm,
    ghost_pull,
    ghost_transfer,
    ghost_vector,
    mul,
    norm,
    norm_n,
    pull,
    restrict,
    transfer,
    unghost,
    universal,
    universal_vector,
    verschiebung,
    witt_vector,
    zero_vector,
)

POLY = PolyRing()
S12 = from_set([1, 2])
S13 = from_set([1, 3])
S1236 = divisor_poset(6)


def P(text):
    return POLY.coerce(text)


def gvec(S, *texts):
    return ghost_vector(S, POLY, [P(t) for t in texts])


def rendered(v):
    return [v.ring.render(x) for x in v.values()]


# --- ghost / unghost / dwork -------------------------------------------------

def test_ghost_symbolic_pair():
    assert rendered(ghost(universal_vector(S12))) == ["a_1", "a_1^2 + 2*a_2"]


def test_ghost_of_zero_is_zero():
    g = ghost(zero_vector(S1236, ZZ))
    assert all(x == 0 for x in g.values())


def test_ghost_of_ones_on_chain():
    assert ghost(witt_vector(divisor_poset(4), ZZ, [1, 1, 1])).values() == [1, 3, 7]


def test_unghost_examples():
    assert unghost(ghost_vector(S12, ZZ, [1, 3])).values() == [1, 1]
    with pytest.raises(NotInImage) as exc:
        unghost(ghost_vector(S12, ZZ, [1, 2]))
    assert exc.value.witness["element"] == 2


def test_dwork_examples():
    assert dwork_check(ghost_vector(S12, ZZ, [1, 3]))
    res = dwork_check(ghost_vector(S12, ZZ, [1, 2]))
    assert not res and (res.prime, res.element) == (2, 2)
    assert dwork_check(ghost_vector(from_set([1]), ZZ, [17]))


def test_dwork_needs_frobenius_lifts():
    with pytest.raises(NoFrobeniusLift):
        dwork_check(ghost_vector(S12, Modular(5), [1, 3]))


# --- ghost-level operations --------------------------------------------------

def test_ghost_pull_examples():
    g = gvec(S1236, "x_1", "x_2", "x_3", "x_6")
    assert rendered(ghost_pull(inclusion(S13, S1236), g)) == ["x_1", "x_3"]
    assert rendered(ghost_pull(mult_map(S13, S1236, 2), g)) == ["x_2", "x_6"]
    d = ghost_pull(fold(S12), gvec(S12, "x_1", "x_2"))
    assert rendered(d) == ["x_1", "x_1", "x_2", "x_2"]


def test_ghost_transfer_examples():
    f = fold(S12)
    g = gvec(f.source, "x_1", "y_1", "x_2", "y_2")
    # source elements are ordered by norm, so the two copies interleave
    assert rendered(ghost_transfer(f, g)) == ["x_1 + y_1", "x_2 + y_2"]
    assert rendered(ghost_transfer(divisor_mult(1, 2), gvec(from_set([1]), "x_1"))) == ["0", "2*x_1"]
    empty = make_map(TruncationPoset({}), S12, {})
    assert ghost_transfer(empty, GhostVector(empty.source, ZZ, {})).values() == [0, 0]


def test_ghost_norm_examples():
    f = fold(S12)
    g = gvec(f.source, "x_1", "y_1", "x_2", "y_2")
    assert rendered(ghost_norm(f, g)) == ["x_1*y_1", "x_2*y_2"]
    out = ghost_norm(mult_map(S13, S1236, 2), gvec(S13, "x_1", "x_3"))
    assert rendered(out) == ["x_1", "x_1^2", "x_3", "x_3^2"]
    empty = make_map(TruncationPoset({}), S12, {})
    assert ghost_norm(empty, GhostVector(empty.source, ZZ, {})).values() == [1, 1]


def test_classical_ghost_norm_formula():
    # y_t = x_{t/g}^g with g = gcd(2, t)
    out = ghost_norm(mult_map(S13, S1236, 2), gvec(S13, "x_1", "x_3"))
    expected = {1: "x_1", 2: "x_1^2", 3: "x_3", 6: "x_3^2"}
    assert {t: POLY.render(out.raw(t)) for t in S1236} == expected


def test_ghost_operations_check_class():
    incl = inclusion(S13, S1236)
    with pytest.raises(NotTMap):
        ghost_transfer(incl, gvec(S13, "x", "y"))
    with pytest.raises(NotNMap):
        ghost_norm(incl, gvec(S13, "x", "y"))


# --- universal formulas ------------------------------------------------------

def test_universal_sum_polynomials():
    f = fold(S12)
    u = universal(f, "transfer")
    src = f.source
    ids = {src.label(s): s for s in src}
    a1, a2 = f"a_{ids['0.1']}", f"a_{ids['0.2']}"
    b1, b2 = f"a_{ids['1.1']}", f"a_{ids['1.2']}"
    assert u.polys[1] == parse_poly(f"{a1} + {b1}")
    assert u.polys[2] == parse_poly(f"{a2} + {b2} - {a1}*{b1}")


def test_universal_product_polynomials():
    f = fold(S12)
    u = universal(f, "norm")
    ids = {f.source.label(s): s for s in f.source}
    a1, a2 = f"a_{ids['0.1']}", f"a_{ids['0.2']}"
    b1, b2 = f"a_{ids['1.1']}", f"a_{ids['1.2']}"
    assert u.polys[1] == parse_poly(f"{a1}*{b1}")
    assert u.polys[2] == parse_poly(f"{a1}^2*{b2} + {a2}*{b1}^2 + 2*{a2}*{b2}")


def test_universal_verschiebung_and_norm_on_point():
    f = divisor_mult(1, 2)
    assert rendered_polys(universal(f, "transfer")) == ["0", "a_1"]
    assert rendered_polys(universal(f, "norm")) == ["a_1", "0"]


def test_universal_norm_along_mult_two():
    u = universal(mult_map(S13, S1236, 2), "norm")
    assert rendered_polys(u) == ["a_1", "0", "a_3", "a_1^3*a_3 + a_3^2"]


def rendered_polys(u):
    return [str(u.polys[e]) for e in u.output_poset.elements]


def test_universal_degree_guard():
    with pytest.raises(UniversalTooLarge):
        universal(fold(divisor_poset(8)), "norm", max_degree=4)


def test_universal_is_memoized():
    f = fold(S12)
    assert universal(f, "transfer") is universal(f, "sum")


# --- Witt-level operations ---------------------------------------------------

def test_add_ones():
    one = witt_vector(S12, ZZ, [1, 1])
    assert add(one, one).values() == [2, 1]


def test_frobenius_symbolic():
    v = universal_vector(S12)
    assert rendered(frobenius(v, 2)) == ["a_1^2 + 2*a_2"]


def test_frobenius_after_verschiebung_is_multiplication():
    v = witt_vector(from_set([1]), POLY, [P("b")])
    assert rendered(frobenius(verschiebung(v, 2), 2)) == ["2*b"]


def test_restrict_drops_coordinates():
    v = witt_vector(divisor_poset(4), POLY, [P("a_1"), P("a_2"), P("a_4")])
    assert rendered(restrict(v, S12)) == ["a_1", "a_2"]


def test_verschiebung_pads():
    v = witt_vector(S12, POLY, [P("b_1"), P("b_2")])
    out = verschiebung(v, 2)
    assert sorted(out.poset.elements) == [1, 2, 4]
    assert rendered(out) == ["0", "b_1", "b_2"]


def test_norm_n_on_point():
    v = witt_vector(from_set([1]), POLY, [P("a")])
    assert rendered(norm_n(v, 2)) == ["a", "0"]


def test_classical_dispatch():
    one = witt_vector(S12, ZZ, [1, 1])
    assert classical("add", one, one) == add(one, one)
    with pytest.raises(ValueError):
        classical("bogus", one)


def test_mixing_rings_is_rejected():
    with pytest.raises(HandleMismatch):
        add(witt_vector(S12, ZZ, [1, 1]), witt_vector(S12, Modular(3), [1, 1]))


def test_modular_arithmetic_uses_universal_polynomials():
    m5 = Modular(5)
    v = witt_vector(S12, m5, [3, 4])
    w = witt_vector(S12, m5, [2, 2])
    lifted = add(witt_vector(S12, ZZ, [3, 4]), witt_vector(S12, ZZ, [2, 2]))
    assert add(v, w) == change_ring(lifted, m5)


# --- properties --------------------------------------------------------------

def _rng_poset(seed, size=6):
    rng = random.Random(seed)
    return rng, random_poset(rng, size, 12)


@given(seeds)
def test_unghost_inverts_ghost(seed):
    rng, S = _rng_poset(seed)
    for v in (random_vector(rng, S, ZZ, 30), universal_vector(S)):
        assert unghost(ghost(v)) == v


@given(seeds)
def test_dwork_agrees_with_unghost(seed):
    rng, S = _rng_poset(seed, 5)
    if rng.random() < 0.4:
        g = ghost(random_vector(rng, S, ZZ, 20))
    else:
        g = GhostVector(S, ZZ, {s: rng.randint(-20, 20) for s in S})
    try:
        unghost(g)
        image = True
    except NotInImage:
        image = False
    assert bool(dwork_check(g)) == image


def _random_pair(seed, kind):
    rng = random.Random(seed)
    for _ in range(20):
        C = random_poset(rng, 4, 12)
        g = random_map_into(rng, C, kind, max_elems=5)
        if g is None or not len(g.source):
            continue
        f = random_map_into(rng, g.source, kind, max_elems=5)
        if f is not None:
            return rng, f, g
    return rng, None, None


@given(seeds, st.sampled_from(["pull", "transfer", "norm"]))
def test_ghost_squares_commute(seed, kind):
    rng, f, _ = _random_pair(seed, "N" if kind == "norm" else "T")
    if f is None:
        return
    start = f.target if kind == "pull" else f.source
    v = random_vector(rng, start, ZZ, 6)
    assert ghost(apply_kind(kind, f, v)) == apply_ghost(kind, f, ghost(v))
    assert apply_kind(kind, f, v) == apply_kind(kind, f, v, via="ghost")


@given(seeds, st.sampled_from(["pull", "transfer", "norm"]))
def test_functoriality(seed, kind):
    rng, f, g = _random_pair(seed, "N" if kind == "norm" else "T")
    if f is None:
        return
    gf = compose(f, g)
    if kind == "pull":
        v = random_vector(rng, g.target, ZZ, 5)
        assert pull(gf, v) == pull(f, pull(g, v))
        gv = ghost(v)
        assert ghost_pull(gf, gv) == ghost_pull(f, ghost_pull(g, gv))
    else:
        v = random_vector(rng, f.source, ZZ, 5)
        op = transfer if kind == "transfer" else norm
        assert op(gf, v) == op(g, op(f, v))
        gv = ghost(v)
        assert apply_ghost(kind, gf, gv) == apply_ghost(kind, g, apply_ghost(kind, f, gv))


@given(seeds, st.sampled_from([2, 3, 4, 6]))
def test_witt_ring_axioms_modular(seed, m):
    rng = random.Random(seed)
    S = random_poset(rng, 4, 8)
    R = Modular(m)
    x, y, z = (random_vector(rng, S, R, m) for _ in range(3))
    zero = zero_vector(S, R)
    assert add(add(x, y), z) == add(x, add(y, z))
    assert add(x, y) == add(y, x)
    assert add(x, zero) == x
    assert mul(x, add(y, z)) == add(mul(x, y), mul(x, z))


@given(seeds)
def test_witt_ring_axioms_integers(seed):
    rng = random.Random(seed)
    S = random_poset(rng, 4, 8)
    x, y, z = (random_vector(rng, S, ZZ, 6) for _ in range(3))
    assert add(add(x, y), z) == add(x, add(y, z))
    assert mul(mul(x, y), z) == mul(x, mul(y, z))
    assert mul(x, add(y, z)) == add(mul(x, y), mul(x, z))


@given(seeds, st.integers(2, 4))
def test_verschiebung_is_additive(seed, n):
    rng = random.Random(seed)
    S = from_set(sorted({d for g in rng.sample(range(1, 7), 2) for d in range(1, g + 1) if g % d == 0}))
    x, y = random_vector(rng, S, ZZ, 10), random_vector(rng, S, ZZ, 10)
    assert verschiebung(add(x, y), n) == add(verschiebung(x, n), verschiebung(y, n))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_frobenius_verschiebung_is_multiplication(n):
    rng = random.Random(n)
    for S in (from_set([1]), from_set([1, 2]), from_set([1, 3])):
        v = random_vector(rng, S, ZZ, 10)
        # n*v as the sum of n copies: transfer along the n-fold fold of the diagonal
        nabla = fold_many(S, n)
        assert frobenius(verschiebung(v, n), n) == transfer(nabla, pull(nabla, v))


@given(seeds, st.sampled_from([2, 3, 4, 6]), st.sampled_from(["pull", "transfer", "norm"]))
def test_ring_change_commutes(seed, m, kind):
    rng, f, _ = _random_pair(seed, "N" if kind == "norm" else "T")
    if f is None:
        return
    start = f.target if kind == "pull" else f.source
    v = random_vector(rng, start, ZZ, 20)
    R = Modular(m)
    assert change_ring(apply_kind(kind, f, v), R) == apply_kind(kind, f, change_ring(v, R))
