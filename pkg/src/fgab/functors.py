"""Hom, tensor, Tor and Ext of finitely generated groups, with induced maps.

Everything is computed from the diagonal free resolution

    0 -> Z^t --diag(d_1..d_t)--> Z^(t+r) -> A -> 0

of a canonical group.  Each functor value is first built as a raw
presentation whose coordinates are indexed lexicographically by
(generator of the first argument, generator of the second argument), then
put in canonical form.  The ``*Space`` classes keep the coordinate changes
so elements can be moved in and out of the canonical form.

``Tor(A, B)`` is the kernel of ``A (x) F' -> A (x) F`` over the resolution of
``B``; a kernel vector ``(a_k)`` stands for ``sum_k e_{b_k}(a_k, 1_k)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .exactness import ShortExactSeq, SixTermSequence, SnakeInput, snake_data
from .groups import (
    Classification,
    FgGroup,
    GroupElement,
    Homomorphism,
    PreconditionError,
    Presentation,
    classify,
    cokernel,
    factor_through,
    inverse,
    kernel,
    preimage,
)
from .intmat import IntMatrix, kron, kernel_lattice, hnf, solve


@dataclass(frozen=True)
class FreeResolution:
    group: FgGroup
    F: FgGroup
    Fprime: FgGroup
    incl: Homomorphism
    proj: Homomorphism

    def sequence(self) -> ShortExactSeq:
        return ShortExactSeq(self.incl, self.proj)


def resolution(a: FgGroup) -> FreeResolution:
    f, fp = FgGroup.free(a.ngens), FgGroup.free(a.torsion_count)
    return FreeResolution(a, f, fp, Homomorphism(fp, f, a.relations()),
                          Homomorphism(f, a, IntMatrix.identity(a.ngens)))


def _power(n: int, b: FgGroup) -> Classification:
    """``B^n`` (equally ``Z^n (x) B`` or ``Hom(Z^n, B)``), block ``i`` holding copy ``i``."""
    return classify(Presentation(n * b.ngens, kron(IntMatrix.identity(n), b.relations())))


def _split_blocks(vec, size: int) -> list[tuple[int, ...]]:
    return [tuple(vec[i:i + size]) for i in range(0, len(vec), size)]


def _lift_chain(f: Homomorphism) -> IntMatrix:
    """The map ``F'_A -> F'_A'`` covering ``f : A -> A'`` on diagonal resolutions."""
    a, b = f.domain, f.codomain
    cols = []
    for k, d in enumerate(a.invariant_factors):
        col = []
        for l in range(b.ngens):
            x = d * f.matrix[l, k]
            if l < b.torsion_count:
                col.append(x // b.invariant_factors[l])
            elif x:
                raise PreconditionError("map does not lift to the resolutions")
        cols.append(col)
    return IntMatrix.from_columns(cols, b.torsion_count)


# -- Hom ---------------------------------------------------------------------


class HomSpace:
    """``Hom(A, B)`` as the kernel of restriction ``B^(ngens A) -> B^(t_A)``."""

    def __init__(self, a: FgGroup, b: FgGroup):
        self.A, self.B = a, b
        self.raw = _power(a.ngens, b)
        self.target = _power(a.torsion_count, b)
        restrict = kron(a.relations().T, IntMatrix.identity(b.ngens))
        self.restriction = self.target.hom_from(self.raw, restrict)
        self.group, self.inclusion = kernel(self.restriction)

    def from_raw(self, vec) -> GroupElement:
        x = preimage(self.inclusion, self.raw.coords(vec))
        if x is None:
            raise PreconditionError("tuple of images does not define a homomorphism")
        return x

    def element_of(self, f: Homomorphism) -> GroupElement:
        if (f.domain, f.codomain) != (self.A, self.B):
            raise ValueError("homomorphism has the wrong domain or codomain")
        return self.from_raw([x for col in f.matrix.columns() for x in col])

    def hom_of(self, x: GroupElement) -> Homomorphism:
        vec = self.raw.raw(self.inclusion(x))
        return Homomorphism.from_images(self.A, self.B, _split_blocks(vec, self.B.ngens))

    def basis(self) -> list[Homomorphism]:
        return [self.hom_of(g) for g in self.group.gens()]


@lru_cache(maxsize=4096)
def hom_space(a: FgGroup, b: FgGroup) -> HomSpace:
    return HomSpace(a, b)


def hom_group(a: FgGroup, b: FgGroup) -> tuple[FgGroup, list[Homomorphism]]:
    """Canonical ``Hom(A, B)`` and homomorphisms realising its generators."""
    h = hom_space(a, b)
    return h.group, h.basis()


# -- tensor ------------------------------------------------------------------


class TensorSpace:
    def __init__(self, a: FgGroup, b: FgGroup):
        self.A, self.B = a, b
        na, nb = a.ngens, b.ngens
        rels = kron(a.relations(), IntMatrix.identity(nb)).hstack(
            kron(IntMatrix.identity(na), b.relations()))
        self.raw = classify(Presentation(na * nb, rels))
        self.group = self.raw.group

    def pure(self, x: GroupElement, y: GroupElement) -> GroupElement:
        """The element ``x (x) y``."""
        if x.parent != self.A or y.parent != self.B:
            raise ValueError("elements do not belong to the tensor factors")
        return self.raw.coords([u * v for u in x.coords for v in y.coords])


@lru_cache(maxsize=4096)
def tensor_space(a: FgGroup, b: FgGroup) -> TensorSpace:
    return TensorSpace(a, b)


def tensor_group(a: FgGroup, b: FgGroup) -> FgGroup:
    return tensor_space(a, b).group


def tensor_map(f: Homomorphism, g: Homomorphism) -> Homomorphism:
    """``f (x) g`` in the canonical bases of the two tensor products."""
    src = tensor_space(f.domain, g.domain)
    dst = tensor_space(f.codomain, g.codomain)
    return dst.raw.hom_from(src.raw, kron(f.matrix, g.matrix))


# -- Tor ---------------------------------------------------------------------


@dataclass(frozen=True)
class TorSymbol:
    """``e_n(a, b)`` for ``a`` in ``A[n]`` and ``b`` in ``B[n]``."""

    n: int
    a: GroupElement
    b: GroupElement

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError("n must be positive")
        if not (self.n * self.a).is_zero() or not (self.n * self.b).is_zero():
            raise PreconditionError(f"e_{self.n} needs elements killed by {self.n}")


class TorSpace:
    def __init__(self, a: FgGroup, b: FgGroup):
        self.A, self.B = a, b
        t = b.torsion_count
        self.t = t
        self.left = classify(Presentation(a.ngens * t, kron(a.relations(), IntMatrix.identity(t))))
        self.right = classify(Presentation(a.ngens * b.ngens,
                                           kron(a.relations(), IntMatrix.identity(b.ngens))))
        one_tensor_incl = kron(IntMatrix.identity(a.ngens), b.relations())
        self.map = self.right.hom_from(self.left, one_tensor_incl)
        self.group, self.inclusion = kernel(self.map)

    def from_components(self, comps: list[GroupElement]) -> GroupElement:
        """The element ``sum_k e_{b_k}(comps[k], 1_k)``."""
        vec = [0] * (self.A.ngens * self.t)
        for k, x in enumerate(comps):
            for i, c in enumerate(x.coords):
                vec[i * self.t + k] = c
        x = preimage(self.inclusion, self.left.coords(vec))
        if x is None:
            raise PreconditionError("components are not annihilated by the orders of B")
        return x

    def components(self, x: GroupElement) -> list[GroupElement]:
        vec = self.left.raw(self.inclusion(x))
        return [self.A.element([vec[i * self.t + k] for i in range(self.A.ngens)])
                for k in range(self.t)]

    def symbol(self, n: int, x: GroupElement, y: GroupElement) -> GroupElement:
        TorSymbol(n, x, y)
        comps = []
        for k, order in enumerate(self.B.invariant_factors):
            g = gcd(order, n)
            v = y.coords[k] // (order // g)
            comps.append((v * (n // g)) * x)
        return self.from_components(comps)


@lru_cache(maxsize=4096)
def tor_space(a: FgGroup, b: FgGroup) -> TorSpace:
    return TorSpace(a, b)


def tor_group(a: FgGroup, b: FgGroup) -> FgGroup:
    return tor_space(a, b).group


def tor_symbol_resolve(s: TorSymbol, a: FgGroup, b: FgGroup) -> GroupElement:
    """Coordinates of ``e_n(a, b)`` in the canonical form of ``Tor(A, B)``."""
    if s.a.parent != a or s.b.parent != b:
        raise ValueError("symbol entries do not belong to A and B")
    return tor_space(a, b).symbol(s.n, s.a, s.b)


def induced_tor(f: Homomorphism, g: Homomorphism) -> Homomorphism:
    """``Tor(f, g) : Tor(A, B) -> Tor(A', B')`` via a chain lift of ``g``."""
    src = tor_space(f.domain, g.domain)
    dst = tor_space(f.codomain, g.codomain)
    raw = kron(f.matrix, _lift_chain(g))
    on_left = dst.left.hom_from(src.left, raw)
    return factor_through(on_left @ src.inclusion, dst.inclusion)


# -- Ext ---------------------------------------------------------------------


class ExtSpace:
    """``Ext(A, B)`` as the cokernel of ``Hom(F, B) -> Hom(F', B)``."""

    def __init__(self, a: FgGroup, b: FgGroup):
        self.A, self.B = a, b
        self.source = _power(a.ngens, b)
        self.target = _power(a.torsion_count, b)
        restrict = kron(a.relations().T, IntMatrix.identity(b.ngens))
        self.restriction = self.target.hom_from(self.source, restrict)
        self.group, self.projection = cokernel(self.restriction)

    def class_of_raw(self, vec) -> GroupElement:
        """Class of the map ``F' -> B`` sending the ``k``-th basis vector to block ``k`` of ``vec``."""
        return self.projection(self.target.coords(vec))

    def class_of_cocycle(self, alpha: Homomorphism) -> GroupElement:
        return self.class_of_raw([x for col in alpha.matrix.columns() for x in col])

    def representative(self, x: GroupElement) -> Homomorphism:
        """A cocycle ``F' -> B`` representing ``x``."""
        vec = self.target.raw(preimage(self.projection, x))
        return Homomorphism.from_images(FgGroup.free(self.A.torsion_count), self.B,
                                        _split_blocks(vec, self.B.ngens))


@lru_cache(maxsize=4096)
def ext_space(a: FgGroup, b: FgGroup) -> ExtSpace:
    return ExtSpace(a, b)


def ext_group(a: FgGroup, b: FgGroup) -> FgGroup:
    return ext_space(a, b).group


def induced_ext(f: Homomorphism, g: Homomorphism) -> Homomorphism:
    """``Ext(f, g) : Ext(A', B) -> Ext(A, B')`` for ``f : A -> A'`` and ``g : B -> B'``."""
    src = ext_space(f.codomain, g.domain)
    dst = ext_space(f.domain, g.codomain)
    raw = kron(_lift_chain(f).T, g.matrix)
    on_cocycles = dst.target.hom_from(src.target, raw)
    imgs = [dst.projection(on_cocycles(preimage(src.projection, x))) for x in src.group.gens()]
    return Homomorphism.from_images(src.group, dst.group, imgs)


def induced_hom(f: Homomorphism, g: Homomorphism) -> Homomorphism:
    """``Hom(f, g) : Hom(A', B) -> Hom(A, B')``, ``phi -> g phi f``."""
    src = hom_space(f.codomain, g.domain)
    dst = hom_space(f.domain, g.codomain)
    imgs = [dst.element_of(g @ src.hom_of(x) @ f) for x in src.group.gens()]
    return Homomorphism.from_images(src.group, dst.group, imgs)


# -- six-term sequences --------------------------------------------------------


def _transport(data, kernel_isos, cokernel_isos, provenance: str) -> SixTermSequence:
    seq = data.sequence
    isos = list(kernel_isos) + list(cokernel_isos)
    groups = tuple(i.codomain for i in isos)
    maps = tuple(isos[k + 1] @ seq.maps[k] @ inverse(isos[k]) for k in range(5))
    return SixTermSequence(groups, maps, provenance)


def _row(top_raw: list[Classification], maps_raw: list[IntMatrix]) -> ShortExactSeq:
    j = top_raw[1].hom_from(top_raw[0], maps_raw[0])
    q = top_raw[2].hom_from(top_raw[1], maps_raw[1])
    return ShortExactSeq(j, q)


def six_term_mod_n(e: ShortExactSeq, n: int, rng: random.Random | None = None) -> SixTermSequence:
    """``0 -> A[n] -> B[n] -> C[n] -> A/n -> B/n -> C/n -> 0``."""
    if n < 1:
        raise PreconditionError("n must be positive")
    s = SnakeInput(e, e, *(Homomorphism.multiplication(x, n) for x in (e.A, e.B, e.C)))
    seq = snake_data(s, rng).sequence
    return SixTermSequence(seq.groups, seq.maps, "mod-n")


def six_term_tor(u: FgGroup, e: ShortExactSeq, rng: random.Random | None = None) -> SixTermSequence:
    """``0 -> Tor(U,A) -> Tor(U,B) -> Tor(U,C) -> U(x)A -> U(x)B -> U(x)C -> 0``."""
    groups = (e.A, e.B, e.C)
    maps = (e.j.matrix, e.q.matrix)
    tu, nu = u.torsion_count, u.ngens
    top_raw = [_power(tu, x) for x in groups]
    bot_raw = [_power(nu, x) for x in groups]
    top = _row(top_raw, [kron(IntMatrix.identity(tu), m) for m in maps])
    bottom = _row(bot_raw, [kron(IntMatrix.identity(nu), m) for m in maps])
    verticals = [b.hom_from(t, kron(u.relations(), IntMatrix.identity(x.ngens)))
                 for t, b, x in zip(top_raw, bot_raw, groups)]
    data = snake_data(SnakeInput(top, bottom, *verticals), rng)

    kernel_isos = []
    for x, raw, incl in zip(groups, top_raw, data.kernels):
        space = tor_space(u, x)
        imgs = []
        for gen in incl.domain.gens():
            blocks = _split_blocks(raw.raw(incl(gen)), x.ngens)
            val = space.group.zero()
            for i, blk in enumerate(blocks):
                val = val + space_symbol(u, x, u.invariant_factors[i], i, blk)
            imgs.append(val)
        kernel_isos.append(Homomorphism.from_images(incl.domain, space.group, imgs))
    cokernel_isos = []
    for x, raw, proj in zip(groups, bot_raw, data.cokernels):
        space = tensor_space(u, x)
        imgs = [space.raw.coords(raw.raw(preimage(proj, gen))) for gen in proj.codomain.gens()]
        cokernel_isos.append(Homomorphism.from_images(proj.codomain, space.group, imgs))
    return _transport(data, kernel_isos, cokernel_isos, "tor")


def space_symbol(u: FgGroup, x: FgGroup, n: int, i: int, coords) -> GroupElement:
    """``e_n(1_i, y)`` in ``Tor(U, X)`` for the ``i``-th generator of ``U``."""
    return tor_space(u, x).symbol(n, u.gens()[i], x.element(coords))


def six_term_ext_cov(u: FgGroup, e: ShortExactSeq, rng: random.Random | None = None) -> SixTermSequence:
    """``0 -> Hom(U,A) -> Hom(U,B) -> Hom(U,C) -> Ext(U,A) -> Ext(U,B) -> Ext(U,C) -> 0``."""
    groups = (e.A, e.B, e.C)
    maps = (e.j.matrix, e.q.matrix)
    tu, nu = u.torsion_count, u.ngens
    top_raw = [_power(nu, x) for x in groups]
    bot_raw = [_power(tu, x) for x in groups]
    top = _row(top_raw, [kron(IntMatrix.identity(nu), m) for m in maps])
    bottom = _row(bot_raw, [kron(IntMatrix.identity(tu), m) for m in maps])
    verticals = [b.hom_from(t, kron(u.relations().T, IntMatrix.identity(x.ngens)))
                 for t, b, x in zip(top_raw, bot_raw, groups)]
    data = snake_data(SnakeInput(top, bottom, *verticals), rng)

    kernel_isos = []
    for x, raw, incl in zip(groups, top_raw, data.kernels):
        space = hom_space(u, x)
        imgs = [space.from_raw(raw.raw(incl(gen))) for gen in incl.domain.gens()]
        kernel_isos.append(Homomorphism.from_images(incl.domain, space.group, imgs))
    cokernel_isos = []
    for x, raw, proj in zip(groups, bot_raw, data.cokernels):
        space = ext_space(u, x)
        imgs = [space.class_of_raw(raw.raw(preimage(proj, gen))) for gen in proj.codomain.gens()]
        cokernel_isos.append(Homomorphism.from_images(proj.codomain, space.group, imgs))
    return _transport(data, kernel_isos, cokernel_isos, "ext-cov")


def six_term_ext_contra(e: ShortExactSeq, v: FgGroup, rng: random.Random | None = None) -> SixTermSequence:
    """``0 -> Hom(C,V) -> Hom(B,V) -> Hom(A,V) -> Ext(C,V) -> Ext(B,V) -> Ext(A,V) -> 0``.

    Built from a horseshoe resolution ``F_A + F_C -> B`` and transported to
    the standard coordinates of each Hom and Ext group.
    """
    a, b, c = e.A, e.B, e.C
    na, nc, mv = a.ngens, c.ngens, v.ngens
    n = na + nc
    lifts = [preimage(e.q, g) for g in c.gens()]
    eps = IntMatrix.from_columns([x.coords for x in e.j.images()] + [x.coords for x in lifts], b.ngens)
    klat = kernel_lattice(eps.hstack(b.relations()))
    gens = IntMatrix.from_rows([r[:n] for r in klat.entries], n).T if klat.rows else IntMatrix.zeros(n, 0)
    kb = hnf(gens.T).basis.T if gens.cols else IntMatrix.zeros(n, 0)
    s = kb.cols

    pa, pc = a.relations(), c.relations()
    incl_a = IntMatrix.identity(n).submatrix(range(n), range(na))
    proj_c = IntMatrix.identity(n).submatrix(range(na, n), range(n))
    prime_in = IntMatrix.from_columns(
        [solve(kb, incl_a.apply(col)) for col in pa.columns()], s)
    prime_out = IntMatrix.from_columns(
        [solve(pc, proj_c.apply(col)) for col in kb.columns()], c.torsion_count)

    def hom_v(k: int) -> Classification:
        return _power(k, v)

    def pre(p: IntMatrix) -> IntMatrix:
        return kron(p.T, IntMatrix.identity(mv))

    top_raw = [hom_v(nc), hom_v(n), hom_v(na)]
    bot_raw = [hom_v(c.torsion_count), hom_v(s), hom_v(a.torsion_count)]
    top = _row(top_raw, [pre(proj_c), pre(incl_a)])
    bottom = _row(bot_raw, [pre(prime_out), pre(prime_in)])
    verticals = [bot.hom_from(t, pre(p)) for t, bot, p in zip(top_raw, bot_raw, (pc, kb, pa))]
    data = snake_data(SnakeInput(top, bottom, *verticals), rng)

    # standard resolution of B mapped into the horseshoe one
    psi = [preimage_raw(eps, b, g.coords)[:n] for g in b.gens()]
    psi_prime = IntMatrix.from_columns(
        [solve(kb, [d * x for x in psi[k]]) for k, d in enumerate(b.invariant_factors)], s)

    def hom_from_horseshoe(vec) -> Homomorphism:
        blocks = _split_blocks(vec, mv)
        imgs = [v.element([sum(x[i] * blk[k] for i, blk in enumerate(blocks)) for k in range(mv)])
                for x in psi]
        return Homomorphism.from_images(b, v, imgs)

    kernel_isos = []
    for slot, (x, raw, incl) in enumerate(zip((c, b, a), top_raw, data.kernels)):
        space = hom_space(x, v)
        if slot == 1:
            imgs = [space.element_of(hom_from_horseshoe(raw.raw(incl(g)))) for g in incl.domain.gens()]
        else:
            imgs = [space.from_raw(raw.raw(incl(g))) for g in incl.domain.gens()]
        kernel_isos.append(Homomorphism.from_images(incl.domain, space.group, imgs))
    cokernel_isos = []
    for slot, (x, raw, proj) in enumerate(zip((c, b, a), bot_raw, data.cokernels)):
        space = ext_space(x, v)
        imgs = []
        for g in proj.codomain.gens():
            vec = raw.raw(preimage(proj, g))
            if slot == 1:
                vec = kron(psi_prime.T, IntMatrix.identity(mv)).apply(vec)
            imgs.append(space.class_of_raw(vec))
        cokernel_isos.append(Homomorphism.from_images(proj.codomain, space.group, imgs))
    return _transport(data, kernel_isos, cokernel_isos, "ext-contra")


def preimage_raw(m: IntMatrix, target: FgGroup, y) -> tuple[int, ...]:
    x = solve(m.hstack(target.relations()), y)
    if x is None:
        raise PreconditionError("element has no preimage")
    return x
