"""Acceptance run: one PASS/FAIL line per criterion, each under its time budget.

Run with ``pytest tests/test_acceptance.py`` (the lines appear in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import itertools
import random
import sys
import time
from math import gcd
from pathlib import Path

import pytest
from sympy import primefactors

sys.path.insert(0, str(Path(__file__).parent))
sys.path.insert(0, str(Path(__file__).parent / "golden"))

from fgab.exactness import snake  # noqa: E402
from fgab.extensions import ExtClass, baer_sum, class_to_extension, equivalence_certificate, extension_to_class  # noqa: E402
from fgab.functors import (  # noqa: E402
    ext_group, hom_group, six_term_ext_contra, six_term_ext_cov, six_term_mod_n, six_term_tor, tensor_group,
    tor_group,
)
from fgab.groups import FgGroup, Homomorphism, Presentation, classify, fpk_invariants, is_isomorphism, \
    is_surjective, quotient_by_n  # noqa: E402
from fgab.intmat import IntMatrix  # noqa: E402
from fgab.padic import (  # noqa: E402
    INFINITE_AT_PRECISION, PadicInt, complete, derived_completion, digits, distance_exponent, from_digits,
    invert_unit, mod_pk, unit_decompose,
)
from fgab.towers import Lim1Status, Tail, Tower, lim, reindex  # noqa: E402

from cases import CASES, HERE, run_case  # noqa: E402
from helpers import (  # noqa: E402
    abelian_groups_of_order, elementary_to_invariant, random_group, random_ses, random_snake, random_unimodular,
)
from test_groups import brute_fpk  # noqa: E402
from test_towers import brute_threads, random_finite_endo_tower  # noqa: E402

G = FgGroup
RESULTS: list[str] = []


def cyc(n):
    return G.cyclic(n)


def _matmul(a, b):
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


# -- criteria -------------------------------------------------------------------------


def classification():
    rng = random.Random(1)
    count = 0
    for n in range(1, 65):
        for pp in abelian_groups_of_order(n):
            m = max(len(pp), 1)
            diag = [[pp[i] if i == j and i < len(pp) else int(i == j and i >= len(pp)) for j in range(m)]
                    for i in range(m)]
            rels = _matmul(_matmul(random_unimodular(rng, m), diag), random_unimodular(rng, m))
            got = classify(Presentation(m, IntMatrix.from_rows(rels))).group
            assert got == G(0, elementary_to_invariant(pp)), (pp, got)
            for p in primefactors(n):
                for k in range(1, max(q.bit_length() for q in pp) + 1):
                    f, g = fpk_invariants(got, p, k)
                    assert f == brute_fpk(pp, p, k)
                    assert g == f - brute_fpk(pp, p, k + 1) == pp.count(p ** k)
            count += 1
    return f"{count} groups"


def cyclic_tables():
    for n, m in itertools.product(range(1, 31), repeat=2):
        want = cyc(gcd(n, m))
        a, b = cyc(n), cyc(m)
        assert tensor_group(a, b) == tor_group(a, b) == hom_group(a, b)[0] == ext_group(a, b) == want, (n, m)
    return "900 pairs"


def six_term():
    rng = random.Random(3)
    for _ in range(200):
        e = random_ses(rng)
        u, v = random_group(rng), random_group(rng)
        seqs = [six_term_mod_n(e, rng.randint(1, 12)), six_term_tor(u, e), six_term_ext_cov(u, e),
                six_term_ext_contra(e, v)]
        for s in seqs:
            assert s.check() == [], s.check()
    return "200 sequences x 4 builders"


def snakes():
    rng = random.Random(4)
    nonzero = 0
    for i in range(100):
        d = random_snake(rng)
        s = snake(d, random.Random(2 * i))
        assert snake(d, random.Random(2 * i + 1)).delta == s.delta
        assert s.check() == []
        kf, kg, kh, cf, cg, ch = (g.order for g in s.groups)
        assert kf * kh * cg == kg * cf * ch
        nonzero += not s.delta.is_zero()
    return f"100 snakes ({nonzero} with nonzero connecting map)"


def ext_law():
    for c, a in [(2, 2), (4, 2), (2, 4), (4, 4), (9, 3)]:
        classes = ExtClass.all(cyc(c), cyc(a))
        exts = {x.element: class_to_extension(x) for x in classes}
        for x in classes:
            assert extension_to_class(exts[x.element]) == x
        for x, y in itertools.product(classes, repeat=2):
            s = baer_sum(exts[x.element], exts[y.element])
            assert extension_to_class(s) == x + y
            cert = equivalence_certificate(s, exts[(x + y).element])
            assert cert is not None and is_isomorphism(cert)
    return "5 pairs"


def padic():
    rng = random.Random(6)
    k = 64
    for p in (2, 3, 5):
        mod = p ** k
        done = 0
        while done < 1000:
            x = PadicInt(p, k, rng.randrange(mod))
            if not x.is_unit():
                continue
            assert (x * invert_unit(x)).residue == 1
            done += 1
        for _ in range(1000):
            a, b, c = (PadicInt(p, k, rng.randrange(mod)) for _ in range(3))

            def v(x, y):
                e = distance_exponent(x, y)
                return k + 1 if e is INFINITE_AT_PRECISION else e

            assert v(a, c) >= min(v(a, b), v(b, c))
            assert from_digits(p, digits(a)) == a
            if a.residue:
                e, u = unit_decompose(a)
                assert u.is_unit() and p ** e * u.residue == a.residue
    return "p in {2,3,5}, K=64"


def completion():
    rng = random.Random(7)
    for _ in range(50):
        a = random_group(rng, max_cyclic=3)
        p = rng.choice([2, 3, 5])
        c = complete(a, p)
        for k in range(7):
            assert mod_pk(c, k) == quotient_by_n(a, p ** k)[0]
        l0, l1 = derived_completion(a, p)
        assert l1.is_trivial and l0 == c
        assert l0.is_trivial() == quotient_by_n(a, p)[0].is_trivial
    return "50 groups, k <= 6"


def towers():
    t = Tower([], [], Tail.pcompletion(G(1), 2))
    r = lim(t)
    assert str(r.lim) == "Z_2" and all(is_surjective(t.map(k)) for k in range(1, 8))
    rng = random.Random(8)
    for _ in range(40):
        t = random_finite_endo_tower(rng)
        r = lim(t)
        assert r.ml_certificate.is_ml and r.lim1.status is Lim1Status.ZERO
        assert r.lim.order == len(brute_threads(t.tail.endo))
        for _ in range(10):
            u = sorted(rng.randint(0, t.N + 4) for _ in range(rng.randint(1, 4)))
            u[-1] = max(u[-1], t.N)
            rr = lim(reindex(t, u, rng.randint(1, 3)))
            assert rr.lim == r.lim and rr.lim1.status is r.lim1.status
    return "40 endo towers x 10 reindexings"


def cli_goldens():
    assert len(CASES) >= 25
    for name, case in CASES.items():
        out, err, code = run_case(case)
        assert code == case.get("exit", 0), name
        assert out == (HERE / f"{name}.out").read_text(), name
        assert err == (HERE / f"{name}.err").read_text(), name
    return f"{len(CASES)} transcripts"


CRITERIA = [
    ("1 classification soundness", classification, 10),
    ("2 cyclic functor tables", cyclic_tables, 5),
    ("3 six-term exactness", six_term, 60),
    ("4 snake uniqueness and exactness", snakes, 30),
    ("5 extension group law", ext_law, 30),
    ("6 p-adic arithmetic", padic, 5),
    ("7 completion consistency", completion, 10),
    ("8 tower calculus", towers, 30),
    ("9 CLI golden suite", cli_goldens, 5),
]


def evaluate(name, fn, budget):
    start = time.perf_counter()
    try:
        detail = fn()
        ok = True
    except AssertionError as e:
        detail, ok = f"assertion failed: {e!r}", False
    elapsed = time.perf_counter() - start
    if ok and elapsed >= budget:
        ok, detail = False, f"{detail}; over budget"
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail} [{elapsed:.2f}s / {budget}s]"
    RESULTS.append(line)
    print(line)
    return ok, line


@pytest.mark.parametrize("name,fn,budget", CRITERIA, ids=[c[0].split()[0] for c in CRITERIA])
def test_criterion(name, fn, budget):
    ok, line = evaluate(name, fn, budget)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(*c)[0] for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
