"""Random generators, hypothesis strategies and brute-force oracles shared by the tests."""

from __future__ import annotations

import itertools
import random
from collections import Counter
from math import gcd

from hypothesis import strategies as st

from fgab.exactness import ShortExactSeq, SnakeInput
from fgab.groups import FgGroup, Homomorphism, factor_through, image, preimage, subgroup_ann


# -- random objects ----------------------------------------------------------------


def random_group(rng: random.Random, max_cyclic: int = 2, max_order: int = 16,
                 allow_free: bool = True, min_cyclic: int = 0) -> FgGroup:
    choices = ([0] if allow_free else []) + list(range(2, max_order + 1))
    return FgGroup.from_orders([rng.choice(choices) for _ in range(rng.randint(min_cyclic, max_cyclic))])


def random_hom(rng: random.Random, a: FgGroup, b: FgGroup, bound: int = 6) -> Homomorphism:
    """A random well-defined homomorphism: generator ``i`` goes into ``B[d_i]``."""
    images = []
    for d in a.orders:
        if d == 0:
            images.append(b.element([rng.randint(-bound, bound) for _ in range(b.ngens)]))
        else:
            _, incl = subgroup_ann(b, d)
            x = incl.domain.element([rng.randint(-bound, bound) for _ in range(incl.domain.ngens)])
            images.append(incl(x))
    return Homomorphism.from_images(a, b, images)


def random_ses(rng: random.Random, max_order: int = 16, allow_free: bool = True) -> ShortExactSeq:
    """``0 -> A -> B -> B/A -> 0`` for a random subgroup ``A`` of a random ``B``.

    Each generator of ``A`` has coordinates ``d * x`` with a shared scale ``d``,
    so entries stay within 6 and proper subgroups are common.
    """
    b = random_group(rng, max_order=max_order, allow_free=allow_free, min_cyclic=1)
    k = rng.choice([0, 1, 1, 2])
    cols = []
    for _ in range(k):
        d = rng.choice([1, 2, 3, 4, 6])
        cols.append([d * rng.randint(-(6 // d), 6 // d) for _ in range(b.ngens)])
    j = Homomorphism(FgGroup.free(k), b, [list(r) for r in zip(*cols)] if k else [[] for _ in range(b.ngens)])
    _, incl = image(j)
    return ShortExactSeq.from_injection(incl)


def random_small_ses(rng: random.Random, max_size: int = 32) -> ShortExactSeq:
    while True:
        e = random_ses(rng, allow_free=False)
        if e.B.order <= max_size:
            return e


def random_snake(rng: random.Random, max_size: int = 32, tries: int = 40) -> SnakeInput:
    """A commuting ladder of short exact sequences of finite groups.

    A random middle map ``g`` is kept when it carries ``j(A)`` into ``j'(A')``.
    Multiplication ladders are mixed in (and used as the fallback) because
    they are the main source of nonzero connecting maps.
    """
    top, bottom = random_small_ses(rng, max_size), random_small_ses(rng, max_size)
    for _ in range(tries if rng.random() < 0.5 else 0):
        g = random_hom(rng, top.B, bottom.B)
        if (bottom.q @ g @ top.j).is_zero():
            f = factor_through(g @ top.j, bottom.j)
            h = Homomorphism.from_images(top.C, bottom.C,
                                         [bottom.q(g(preimage(top.q, c))) for c in top.C.gens()])
            return SnakeInput(top, bottom, f, g, h)
    ex = top.B.exponent
    n = rng.choice([d for d in range(1, ex + 1) if ex % d == 0])
    return SnakeInput(top, top, *(Homomorphism.multiplication(x, n) for x in (top.A, top.B, top.C)))


# -- hypothesis --------------------------------------------------------------------


def groups(max_cyclic: int = 3, max_order: int = 16, allow_free: bool = True):
    orders = st.sampled_from(([0] if allow_free else []) + list(range(2, max_order + 1)))
    return st.lists(orders, max_size=max_cyclic).map(FgGroup.from_orders)


def finite_groups(max_cyclic: int = 2, max_order: int = 12):
    return groups(max_cyclic, max_order, allow_free=False)


@st.composite
def homs(draw, a=None, b=None):
    a = a if a is not None else draw(groups())
    b = b if b is not None else draw(groups())
    seed = draw(st.integers(0, 2 ** 32))
    return random_hom(random.Random(seed), a, b)


@st.composite
def ses(draw):
    return random_ses(random.Random(draw(st.integers(0, 2 ** 32))))


# -- brute force -------------------------------------------------------------------


def cyclic_product(orders):
    """All tuples of ``Z/o_1 x ... x Z/o_k`` (a naive model of a finite group)."""
    return list(itertools.product(*(range(o) for o in orders)))


def order_profile(orders) -> Counter:
    """Counts of element orders in ``Z/o_1 x ... x Z/o_k``; determines a finite abelian group."""
    prof = Counter()
    for x in cyclic_product(orders):
        n = 1
        for xi, o in zip(x, orders):
            c = o // gcd(xi, o)
            n = n * c // gcd(n, c)
        prof[n] += 1
    return prof


def profile_of(g: FgGroup) -> Counter:
    return order_profile(g.invariant_factors)


def brute_hom_count(a: FgGroup, b: FgGroup) -> int:
    """Number of homomorphisms between finite groups, by enumerating generator images."""
    count = 1
    for d in a.invariant_factors:
        count *= sum(1 for x in b.elements() if (d * x).is_zero())
    return count


def elementary_to_invariant(prime_powers) -> tuple[int, ...]:
    """Invariant factors from a multiset of prime powers (textbook regrouping)."""
    by_prime: dict[int, list[int]] = {}
    for q in prime_powers:
        p = next(d for d in range(2, q + 1) if q % d == 0)
        by_prime.setdefault(p, []).append(q)
    width = max((len(v) for v in by_prime.values()), default=0)
    cols = [1] * width
    for qs in by_prime.values():
        qs = sorted(qs, reverse=True)
        for i, q in enumerate(qs):
            cols[i] *= q
    return tuple(sorted(c for c in cols if c > 1))


def partitions(n: int, largest: int | None = None):
    largest = n if largest is None else largest
    if n == 0:
        yield []
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield [k] + rest


def abelian_groups_of_order(n: int):
    """Every abelian group of order ``n`` as a list of prime powers."""
    from sympy import factorint
    per_prime = [[[p ** e for e in part] for part in partitions(k)] for p, k in factorint(n).items()]
    for combo in itertools.product(*per_prime):
        yield [q for part in combo for q in part]


def random_unimodular(rng: random.Random, n: int, steps: int = 6, bound: int = 3):
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-bound, bound)
        for k in range(n):
            m[i][k] += c * m[j][k]
        if rng.random() < 0.3:
            m[i], m[j] = m[j], m[i]
    return m
