"""Exact sequences: verification, the snake lemma and splittings.

Subgroups are compared by double inclusion through lattice membership, so
every check here is valid for infinite groups as well.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .groups import (
    FgGroup,
    GroupElement,
    Homomorphism,
    PreconditionError,
    cokernel,
    direct_sum,
    factor_through,
    image,
    is_isomorphism,
    kernel,
    preimage,
    sum_maps,
)

WITNESS_ENUMERATION_LIMIT = 4096


class ExactnessError(PreconditionError):
    def __init__(self, message: str, witness: GroupElement | None = None):
        super().__init__(message if witness is None else f"{message} (witness {witness})")
        self.witness = witness


class Verdict(NamedTuple):
    exact: bool
    witness: GroupElement | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.exact


def _span(gens: Sequence[GroupElement], group: FgGroup) -> set[tuple[int, ...]]:
    seen = {group.zero().coords}
    frontier = [group.zero()]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x + g
                if y.coords not in seen:
                    seen.add(y.coords)
                    nxt.append(y)
        frontier = nxt
    return seen


def is_exact_at(f: Homomorphism, g: Homomorphism) -> Verdict:
    """Whether ``image(f) == kernel(g)``.

    On failure the witness lies in exactly one of the two subgroups; for
    small finite groups it is the lexicographically least such element.
    """
    if f.codomain != g.domain:
        raise ValueError(f"codomain {f.codomain} of the first map is not the domain {g.domain}")
    b = g.domain
    bad_composite = next((y for y in f.images() if not g(y).is_zero()), None)
    _, kincl = kernel(g)
    bad_kernel = next((y for y in kincl.images() if preimage(f, y) is None), None)
    if bad_composite is None and bad_kernel is None:
        return Verdict(True)
    reason = "g o f != 0" if bad_composite is not None else "ker(g) not contained in im(f)"
    if b.is_finite and b.order <= WITNESS_ENUMERATION_LIMIT:
        im = _span(f.images(), b)
        for x in b.elements():
            if (x.coords in im) != g(x).is_zero():
                return Verdict(False, x, reason)
    return Verdict(False, bad_composite if bad_composite is not None else bad_kernel, reason)


def injectivity_witness(f: Homomorphism) -> GroupElement | None:
    k, incl = kernel(f)
    return incl.images()[0] if not k.is_trivial else None


def surjectivity_witness(f: Homomorphism) -> GroupElement | None:
    return next((y for y in f.codomain.gens() if preimage(f, y) is None), None)


@dataclass(frozen=True)
class ShortExactSeq:
    """``0 -> A --j--> B --q--> C -> 0``, verified on construction."""

    j: Homomorphism
    q: Homomorphism
    certificate: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.j.codomain != self.q.domain:
            raise ValueError("j and q are not composable")
        w = injectivity_witness(self.j)
        if w is not None:
            raise ExactnessError("j is not injective", w)
        w = surjectivity_witness(self.q)
        if w is not None:
            raise ExactnessError("q is not surjective", w)
        v = is_exact_at(self.j, self.q)
        if not v:
            raise ExactnessError(f"not exact in the middle: {v.reason}", v.witness)
        object.__setattr__(self, "certificate",
                           ("j injective", "q surjective", "im(j) = ker(q)"))

    @property
    def A(self) -> FgGroup:
        return self.j.domain

    @property
    def B(self) -> FgGroup:
        return self.j.codomain

    @property
    def C(self) -> FgGroup:
        return self.q.codomain

    @classmethod
    def from_injection(cls, j: Homomorphism) -> ShortExactSeq:
        _, q = cokernel(j)
        return cls(j, q)

    @classmethod
    def split(cls, a: FgGroup, c: FgGroup) -> ShortExactSeq:
        s = direct_sum(a, c)
        return cls(s.injections[0], s.projections[1])

    def to_json(self) -> dict:
        return {"j": self.j.to_json(), "q": self.q.to_json()}


@dataclass(frozen=True)
class SixTermSequence:
    """``0 -> G0 -> G1 -> G2 --delta--> G3 -> G4 -> G5 -> 0``, verified on construction."""

    groups: tuple[FgGroup, ...]
    maps: tuple[Homomorphism, ...]
    provenance: str = ""

    def __post_init__(self):
        if len(self.groups) != 6 or len(self.maps) != 5:
            raise ValueError("a six-term sequence has six groups and five maps")
        for i, f in enumerate(self.maps):
            if (f.domain, f.codomain) != (self.groups[i], self.groups[i + 1]):
                raise ValueError(f"map {i} does not go from group {i} to group {i + 1}")
        failures = self.check()
        if failures:
            raise ExactnessError(f"{self.provenance}: " + "; ".join(failures))

    def check(self) -> list[str]:
        out = []
        if injectivity_witness(self.maps[0]) is not None:
            out.append("first map not injective")
        for i in range(1, 5):
            v = is_exact_at(self.maps[i - 1], self.maps[i])
            if not v:
                out.append(f"not exact at node {i}: {v.reason}, witness {v.witness}")
        if surjectivity_witness(self.maps[4]) is not None:
            out.append("last map not surjective")
        return out

    @property
    def delta(self) -> Homomorphism:
        return self.maps[2]

    def to_json(self) -> dict:
        return {"provenance": self.provenance, "exact": True,
                "groups": [g.to_json() for g in self.groups],
                "maps": [f.matrix.tolist() for f in self.maps]}


@dataclass(frozen=True)
class SnakeInput:
    top: ShortExactSeq
    bottom: ShortExactSeq
    f: Homomorphism
    g: Homomorphism
    h: Homomorphism

    def __post_init__(self):
        t, b = self.top, self.bottom
        if (self.f.domain, self.f.codomain) != (t.A, b.A) or \
                (self.g.domain, self.g.codomain) != (t.B, b.B) or \
                (self.h.domain, self.h.codomain) != (t.C, b.C):
            raise ValueError("vertical maps do not match the rows")
        if self.g @ t.j != b.j @ self.f:
            raise PreconditionError("left square does not commute")
        if self.h @ t.q != b.q @ self.g:
            raise PreconditionError("right square does not commute")


class SnakeData(NamedTuple):
    sequence: SixTermSequence
    kernels: tuple[Homomorphism, Homomorphism, Homomorphism]
    cokernels: tuple[Homomorphism, Homomorphism, Homomorphism]


def _random_element(a: FgGroup, rng: random.Random) -> GroupElement:
    return a.element([rng.randrange(d) if d else rng.randint(-5, 5) for d in a.orders])


def snake_data(s: SnakeInput, rng: random.Random | None = None) -> SnakeData:
    """The snake sequence with the kernel inclusions and cokernel projections.

    With ``rng`` given, every lift through ``q`` is perturbed by a random
    element of ``j(A)``; the connecting map must not change.
    """
    t, b = s.top, s.bottom
    kf, kg, kh = (kernel(m)[1] for m in (s.f, s.g, s.h))
    cf, cg, ch = (cokernel(m)[1] for m in (s.f, s.g, s.h))

    m1 = factor_through(t.j @ kf, kg)
    m2 = factor_through(t.q @ kg, kh)

    def on_cokernels(top_map: Homomorphism, src: Homomorphism, dst: Homomorphism) -> Homomorphism:
        imgs = [dst(top_map(preimage(src, x))) for x in src.codomain.gens()]
        return Homomorphism.from_images(src.codomain, dst.codomain, imgs)

    m4 = on_cokernels(b.j, cf, cg)
    m5 = on_cokernels(b.q, cg, ch)

    deltas = []
    for c in kh.images():
        lift = preimage(t.q, c)
        if rng is not None:
            lift = lift + t.j(_random_element(t.A, rng))
        a_prime = preimage(b.j, s.g(lift))
        if a_prime is None:
            raise ExactnessError("g(b) does not lie in j'(A')", lift)
        deltas.append(cf(a_prime))
    delta = Homomorphism.from_images(kh.domain, cf.codomain, deltas)

    seq = SixTermSequence(
        (kf.domain, kg.domain, kh.domain, cf.codomain, cg.codomain, ch.codomain),
        (m1, m2, delta, m4, m5), "snake")
    return SnakeData(seq, (kf, kg, kh), (cf, cg, ch))


def snake(s: SnakeInput, rng: random.Random | None = None) -> SixTermSequence:
    """``0 -> ker f -> ker g -> ker h -> cok f -> cok g -> cok h -> 0``."""
    return snake_data(s, rng).sequence


# -- splittings --------------------------------------------------------------


class Splitting(NamedTuple):
    j: Homomorphism
    q: Homomorphism
    r: Homomorphism
    s: Homomorphism


def check_split_identities(sp: Splitting) -> list[str]:
    j, q, r, s = sp
    a, b, c = j.domain, j.codomain, q.codomain
    out = []
    if r @ j != Homomorphism.identity(a):
        out.append("r j != 1")
    if q @ s != Homomorphism.identity(c):
        out.append("q s != 1")
    if not (r @ s).is_zero():
        out.append("r s != 0")
    if not (q @ j).is_zero():
        out.append("q j != 0")
    if j @ r + s @ q != Homomorphism.identity(b):
        out.append("j r + s q != 1")
    return out


def complete_splitting_from_retraction(e: ShortExactSeq, r: Homomorphism) -> Homomorphism:
    """The unique section ``s`` with ``j r + s q = 1`` given a retraction ``r`` of ``j``."""
    if (r.domain, r.codomain) != (e.B, e.A) or r @ e.j != Homomorphism.identity(e.A):
        raise PreconditionError("r is not a retraction of j")
    proj = Homomorphism.identity(e.B) - e.j @ r
    s = Homomorphism.from_images(e.C, e.B, [proj(preimage(e.q, c)) for c in e.C.gens()])
    failures = check_split_identities(Splitting(e.j, e.q, r, s))
    if failures:
        raise ExactnessError("splitting identities fail: " + ", ".join(failures))
    return s


def complete_splitting_from_section(e: ShortExactSeq, s: Homomorphism) -> Homomorphism:
    """The unique retraction ``r`` with ``j r + s q = 1`` given a section ``s`` of ``q``."""
    if (s.domain, s.codomain) != (e.C, e.B) or e.q @ s != Homomorphism.identity(e.C):
        raise PreconditionError("s is not a section of q")
    r = factor_through(Homomorphism.identity(e.B) - s @ e.q, e.j)
    failures = check_split_identities(Splitting(e.j, e.q, r, s))
    if failures:
        raise ExactnessError("splitting identities fail: " + ", ".join(failures))
    return r


class InternalSum(NamedTuple):
    image: Homomorphism
    complement: Homomorphism
    iso: Homomorphism


def split_by_idempotent(e: Homomorphism) -> InternalSum:
    """``B = im(e) + im(1 - e)`` for an idempotent endomorphism ``e``."""
    if e.domain != e.codomain:
        raise PreconditionError("e is not an endomorphism")
    if e @ e != e:
        raise PreconditionError("e is not idempotent")
    one = Homomorphism.identity(e.domain)
    _, i1 = image(e)
    _, i2 = image(one - e)
    total = direct_sum(i1.domain, i2.domain)
    iso = sum_maps([i1, i2], total)
    if not is_isomorphism(iso):
        raise ExactnessError("im(e) + im(1-e) -> B is not an isomorphism")
    return InternalSum(i1, i2, iso)


# -- five lemma --------------------------------------------------------------


class FiveLemmaReport(NamedTuple):
    middle_is_iso: bool
    kernel: FgGroup
    cokernel: FgGroup


def five_lemma_verify(top: Sequence[Homomorphism], bottom: Sequence[Homomorphism],
                      verticals: Sequence[Homomorphism]) -> FiveLemmaReport:
    """Check the hypotheses of the five lemma and then that the middle vertical is an isomorphism."""
    if len(top) != 4 or len(bottom) != 4 or len(verticals) != 5:
        raise ValueError("expected rows of four maps and five verticals")
    for name, row in (("top", top), ("bottom", bottom)):
        for i in range(3):
            v = is_exact_at(row[i], row[i + 1])
            if not v:
                raise PreconditionError(f"{name} row not exact at position {i + 1}: "
                                        f"{v.reason}, witness {v.witness}")
    for i in range(4):
        p, q = verticals[i], verticals[i + 1]
        if (p.domain, p.codomain) != (top[i].domain, bottom[i].domain) or \
                (q.domain, q.codomain) != (top[i].codomain, bottom[i].codomain):
            raise PreconditionError(f"vertical maps do not fit square {i}")
        lhs, rhs = q @ top[i], bottom[i] @ p
        if lhs != rhs:
            bad = next(x for x in top[i].domain.gens() if lhs(x) != rhs(x))
            raise PreconditionError(f"square {i} does not commute at generator {bad}")
    for i in (0, 1, 3, 4):
        if not is_isomorphism(verticals[i]):
            raise PreconditionError(f"vertical map p{i} is not an isomorphism")
    k, _ = kernel(verticals[2])
    c, _ = cokernel(verticals[2])
    if not (k.is_trivial and c.is_trivial):
        raise AssertionError("five lemma violated: middle map has nontrivial kernel or cokernel")
    return FiveLemmaReport(True, k, c)
