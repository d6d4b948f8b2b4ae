import random
from math import gcd, lcm

import pytest
from hypothesis import given, settings, strategies as st

from fgab.exactness import ShortExactSeq, is_exact_at
from fgab.functors import (
    TorSymbol, ext_group, hom_group, induced_ext, induced_hom, induced_tor, resolution, six_term_ext_contra,
    six_term_ext_cov, six_term_mod_n, six_term_tor, tensor_group, tensor_map, tensor_space, tor_group,
    tor_space, tor_symbol_resolve,
)
from fgab.groups import FgGroup, Homomorphism, PreconditionError, direct_sum, is_surjective, preimage

from helpers import (
    abelian_groups_of_order, brute_hom_count, elementary_to_invariant, finite_groups, groups,
    random_group, random_hom, random_ses, ses,
)

G = FgGroup
Z = G(1)


def cyc(n):
    return G.cyclic(n)


def e_times_2() -> ShortExactSeq:
    """``0 -> Z -> Z -> Z/2 -> 0`` with the first map multiplication by 2."""
    return ShortExactSeq(Homomorphism(Z, Z, [[2]]), Homomorphism(Z, cyc(2), [[1]]))


def hom_order(h: Homomorphism) -> int:
    k = 1
    while not (k * h).is_zero():
        k += 1
    return k


# -- resolutions ----------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(groups())
def test_resolution_shape(a):
    r = resolution(a)
    assert r.F.is_free and r.Fprime.is_free
    assert r.F.free_rank == a.ngens and r.Fprime.free_rank == a.torsion_count
    r.sequence()


# -- examples -------------------------------------------------------------------------


def test_hom_examples():
    assert hom_group(cyc(4), cyc(6))[0] == cyc(2)
    b = G(2, (3,))
    assert hom_group(Z, b)[0] == b
    assert hom_group(G(1, (2,)), cyc(4))[0] == G(0, (2, 4))


def test_tensor_examples():
    assert tensor_group(cyc(4), cyc(6)) == cyc(2)
    a = G(1, (5, 10))
    assert tensor_group(Z, a) == a
    assert tensor_group(G(2, (2,)), G(1, (4,))) == G(2, (2, 2, 4, 4))


def test_tor_examples():
    assert tor_group(cyc(4), cyc(6)) == cyc(2)
    assert tor_group(G(3), G(1, (4, 8))).is_trivial
    assert tor_group(cyc(12), cyc(18)) == cyc(6)


def test_ext_examples():
    assert ext_group(cyc(4), cyc(6)) == cyc(2)
    assert ext_group(Z, G(1, (6,))).is_trivial
    assert ext_group(G(1, (2,)), Z) == cyc(2)


def test_hom_basis_realizes_generators():
    a, b = G(1, (2,)), G(1, (4,))
    grp, basis = hom_group(a, b)
    assert len(basis) == grp.ngens
    for h, d in zip(basis, grp.orders):
        if d:
            assert hom_order(h) == d


def test_tensor_map_examples():
    z4 = cyc(4)
    one = Homomorphism.identity(z4)
    assert tensor_map(one, one) == Homomorphism.identity(tensor_group(z4, z4))
    two = Homomorphism.multiplication(z4, 2)
    assert tensor_map(two, one) == Homomorphism.multiplication(tensor_group(z4, z4), 2)
    f = Homomorphism(G(1), z4, [[1]])
    assert tensor_map(f, Homomorphism.zero(z4, cyc(2))).is_zero()


def test_tensor_pure_bilinear():
    sp = tensor_space(cyc(4), cyc(6))
    x, y = cyc(4).element([1]), cyc(6).element([1])
    assert sp.pure(x, y) != sp.group.zero()
    assert (2 * sp.pure(x, y)).is_zero()
    assert sp.pure(x + x, y) == sp.pure(x, y) + sp.pure(x, y)


# -- symbols --------------------------------------------------------------------------


def test_symbol_examples():
    a, b = cyc(4), cyc(6)
    g = tor_symbol_resolve(TorSymbol(2, a.element([2]), b.element([3])), a, b)
    assert g.coords == (1,)
    assert tor_symbol_resolve(TorSymbol(3, a.zero(), b.element([2])), a, b).is_zero()
    z2 = cyc(2)
    assert tor_symbol_resolve(TorSymbol(2, z2.element([1]), z2.element([1])), z2, z2).coords == (1,)
    with pytest.raises(PreconditionError):
        TorSymbol(2, a.element([1]), b.element([3]))


@settings(max_examples=60, deadline=None)
@given(finite_groups(), finite_groups(), st.integers(1, 12), st.integers(0, 2 ** 32))
def test_symbol_rescaling_and_bilinearity(a, b, n, seed):
    rng = random.Random(seed)
    an = [x for x in a.elements() if (n * x).is_zero()]
    bn = [y for y in b.elements() if (n * y).is_zero()]
    sp = tor_space(a, b)
    x, x2, y = rng.choice(an), rng.choice(an), rng.choice(bn)
    assert sp.symbol(n, x + x2, y) == sp.symbol(n, x, y) + sp.symbol(n, x2, y)
    # e_n(a, (m/d) b) = e_{nm/d}(a, b) whenever m b = 0 and d = gcd(n, m)
    m = rng.randint(1, 12)
    bm = [y for y in b.elements() if (m * y).is_zero()]
    y = rng.choice(bm)
    d = gcd(n, m)
    xs = [x for x in a.elements() if ((n * m // d) * x).is_zero() and (n * x).is_zero()]
    x = rng.choice(xs)
    assert sp.symbol(n, x, (m // d) * y) == sp.symbol(n * m // d, x, y)


@settings(max_examples=40, deadline=None)
@given(finite_groups(), finite_groups())
def test_symbols_generate_tor(a, b):
    sp = tor_space(a, b)
    top = lcm(a.exponent, b.exponent)
    symbols = {sp.symbol(n, x, y) for n in range(1, top + 1) if top % n == 0
               for x in a.elements() for y in b.elements()
               if (n * x).is_zero() and (n * y).is_zero()}
    symbols = sorted(symbols, key=lambda x: x.coords)
    onto = Homomorphism.from_images(G(len(symbols)), sp.group, symbols)
    assert is_surjective(onto)


@settings(max_examples=40, deadline=None)
@given(finite_groups(), finite_groups(), st.integers(0, 2 ** 32))
def test_symbol_naturality(a, b, seed):
    rng = random.Random(seed)
    a2, b2 = random_group(rng, allow_free=False), random_group(rng, allow_free=False)
    f, g = random_hom(rng, a, a2), random_hom(rng, b, b2)
    n = rng.randint(1, 12)
    x = rng.choice([x for x in a.elements() if (n * x).is_zero()])
    y = rng.choice([y for y in b.elements() if (n * y).is_zero()])
    lhs = induced_tor(f, g)(tor_space(a, b).symbol(n, x, y))
    assert lhs == tor_space(a2, b2).symbol(n, f(x), g(y))


# -- properties -----------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(groups(), groups())
def test_symmetry(a, b):
    assert tor_group(a, b) == tor_group(b, a)
    assert tensor_group(a, b) == tensor_group(b, a)


@settings(max_examples=60, deadline=None)
@given(groups(), groups())
def test_tor_is_torsion(a, b):
    assert tor_group(a, b).free_rank == 0


@settings(max_examples=40, deadline=None)
@given(finite_groups(2, 4), finite_groups(2, 4), finite_groups(2, 4))
def test_adjunction_cardinality(a, b, v):
    lhs = brute_hom_count(tensor_group(a, b), v)
    rhs = brute_hom_count(a, hom_group(b, v)[0])
    assert lhs == rhs == hom_group(tensor_group(a, b), v)[0].order


@settings(max_examples=60, deadline=None)
@given(finite_groups(), finite_groups())
def test_hom_order_matches_brute_force(a, b):
    assert hom_group(a, b)[0].order == brute_hom_count(a, b)


@settings(max_examples=40, deadline=None)
@given(groups(2), groups(2), groups(2))
def test_additive_functors_split(u, a, c):
    s = direct_sum(a, c).group
    for fn in (tensor_group, tor_group, lambda x, y: hom_group(x, y)[0], ext_group):
        assert fn(u, s) == direct_sum(fn(u, a), fn(u, c)).group
        assert fn(s, u) == direct_sum(fn(a, u), fn(c, u)).group


@settings(max_examples=40, deadline=None)
@given(groups(2), ses())
def test_tensor_right_exact(u, e):
    one = Homomorphism.identity(u)
    uj, uq = tensor_map(one, e.j), tensor_map(one, e.q)
    assert is_exact_at(uj, uq).exact and is_surjective(uq)
    if u.is_free:
        ShortExactSeq(uj, uq)


def test_ext_into_z_is_dual_for_small_groups():
    for n in range(1, 33):
        for pp in abelian_groups_of_order(n):
            a = G(0, elementary_to_invariant(pp))
            assert ext_group(a, Z) == a


def test_cyclic_tables():
    for n in range(1, 31):
        for m in range(1, 31):
            want = cyc(gcd(n, m))
            a, b = cyc(n), cyc(m)
            assert tensor_group(a, b) == tor_group(a, b) == hom_group(a, b)[0] == ext_group(a, b) == want


# -- induced maps ---------------------------------------------------------------------


def test_induced_examples():
    z4 = cyc(4)
    one = Homomorphism.identity(z4)
    assert induced_tor(one, one) == Homomorphism.identity(tor_group(z4, z4))
    assert induced_tor(Homomorphism.multiplication(z4, 2), one) == \
        Homomorphism.multiplication(tor_group(z4, z4), 2)
    for n, b in [(3, cyc(6)), (4, G(1, (2,))), (2, cyc(2))]:
        h = induced_ext(Homomorphism.multiplication(cyc(n), n), Homomorphism.identity(b))
        assert h.is_zero()


@settings(max_examples=40, deadline=None)
@given(groups(2), groups(2), groups(2), st.integers(0, 2 ** 32))
def test_induced_additive(a, a2, b, seed):
    rng = random.Random(seed)
    f0, f1 = random_hom(rng, a, a2), random_hom(rng, a, a2)
    g = Homomorphism.identity(b)
    assert induced_tor(f0 + f1, g) == induced_tor(f0, g) + induced_tor(f1, g)
    assert induced_ext(f0 + f1, g) == induced_ext(f0, g) + induced_ext(f1, g)
    assert induced_hom(f0 + f1, g) == induced_hom(f0, g) + induced_hom(f1, g)
    assert tensor_map(f0 + f1, g) == tensor_map(f0, g) + tensor_map(f1, g)


@settings(max_examples=30, deadline=None)
@given(groups(2), groups(2), groups(2), groups(2), st.integers(0, 2 ** 32))
def test_induced_functorial(a, a2, b, b2, seed):
    rng = random.Random(seed)
    a3, b3 = random_group(rng), random_group(rng)
    f, f2 = random_hom(rng, a, a2), random_hom(rng, a2, a3)
    g, g2 = random_hom(rng, b, b2), random_hom(rng, b2, b3)
    assert tensor_map(f2 @ f, g2 @ g) == tensor_map(f2, g2) @ tensor_map(f, g)
    assert induced_tor(f2 @ f, g2 @ g) == induced_tor(f2, g2) @ induced_tor(f, g)
    # Ext is contravariant in the first slot
    assert induced_ext(f2 @ f, g2 @ g) == induced_ext(f, g2) @ induced_ext(f2, g)


# -- six-term sequences ---------------------------------------------------------------


def test_mod_n_examples():
    s = six_term_mod_n(e_times_2(), 2)
    assert [str(g) for g in s.groups] == ["0", "0", "Z/2", "Z/2", "Z/2", "Z/2"]
    assert s.delta.matrix.entries == ((1,),)
    assert all(g.is_trivial for g in six_term_mod_n(e_times_2(), 1).groups)
    split = ShortExactSeq.split(G(1, (4,)), cyc(6))
    for n in (2, 3, 4):
        assert six_term_mod_n(split, n).delta.is_zero()


def test_tor_examples_six_term():
    s = six_term_tor(cyc(2), e_times_2())
    assert [str(g) for g in s.groups] == ["0", "0", "Z/2", "Z/2", "Z/2", "Z/2"]
    assert s.delta.matrix.entries == ((1,),)
    e = random_ses(random.Random(3))
    free = six_term_tor(G(2), e)
    assert all(g.is_trivial for g in free.groups[:3])
    ShortExactSeq(free.maps[3], free.maps[4])


def test_ext_examples_six_term():
    s = six_term_ext_cov(cyc(4), e_times_2())
    assert [str(g) for g in s.groups] == ["0", "0", "Z/2", "Z/4", "Z/4", "Z/2"]
    assert s.delta(s.groups[2].element([1])).coords == (2,)
    c = six_term_ext_contra(e_times_2(), Z)
    assert [str(g) for g in c.groups] == ["0", "Z", "Z", "Z/2", "0", "0"]
    assert c.maps[1].matrix.entries == ((2,),)
    assert c.delta(Z.element([1])).coords == (1,)
    split = ShortExactSeq.split(cyc(4), G(1, (2,)))
    assert six_term_ext_cov(cyc(2), split).delta.is_zero()
    assert six_term_ext_contra(split, cyc(2)).delta.is_zero()


@settings(max_examples=40, deadline=None)
@given(ses(), groups(2), st.integers(1, 12), st.integers(0, 2 ** 32))
def test_six_term_exact_and_delta_unique(e, u, n, seed):
    builders = [
        lambda rng: six_term_mod_n(e, n, rng),
        lambda rng: six_term_tor(u, e, rng),
        lambda rng: six_term_ext_cov(u, e, rng),
        lambda rng: six_term_ext_contra(e, u, rng),
    ]
    for build in builders:
        s1, s2 = build(random.Random(seed)), build(random.Random(seed + 1))
        assert s1.check() == []
        assert s1.delta == s2.delta


@settings(max_examples=40, deadline=None)
@given(ses(), st.integers(1, 8), st.integers(0, 2 ** 32))
def test_tor_delta_on_symbols(e, n, seed):
    """``delta(e_n(u, c)) = u (x) a`` where ``q(b) = c`` and ``n b = j(a)``."""
    rng = random.Random(seed)
    u = cyc(n)
    s = six_term_tor(u, e)
    tor_c, ten_a = tor_space(u, e.C), tensor_space(u, e.A)
    cs = [e.C.element(c) for c in _small_coords(e.C, rng)]
    for c in cs:
        if not (n * c).is_zero():
            continue
        b = preimage(e.q, c)
        a = preimage(e.j, n * b)
        one = u.element([1]) if u.ngens else u.zero()
        assert s.delta(tor_c.symbol(n, one, c)) == ten_a.pure(one, a)


@settings(max_examples=40, deadline=None)
@given(ses(), st.integers(1, 8), st.integers(0, 2 ** 32))
def test_mod_n_delta_recipe(e, n, seed):
    """``delta(q(b)) = a + nA`` whenever ``n b = j(a)``, checked in ``Tor(Z/n,-)`` and ``Z/n (x) -``."""
    rng = random.Random(seed)
    u = cyc(n)
    s = six_term_tor(u, e)
    tor_c, ten_a = tor_space(u, e.C), tensor_space(u, e.A)
    one = u.element([1]) if u.ngens else u.zero()
    for coords in _small_coords(e.B, rng):
        b = e.B.element(coords)
        a = preimage(e.j, n * b)
        if a is None:
            continue
        assert s.delta(tor_c.symbol(n, one, e.q(b))) == ten_a.pure(one, a)


def _small_coords(g, rng, count=6):
    return [[rng.randint(-6, 6) for _ in range(g.ngens)] for _ in range(count)]
