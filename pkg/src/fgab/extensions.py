"""Extensions ``0 -> A -> B -> C -> 0`` and their correspondence with ``Ext(C, A)``.

Middle groups are always canonical.  A class is represented through the
diagonal free resolution ``F' -> F -> C``: the extension attached to a
cocycle ``alpha : F' -> A`` is the pushout of the resolution along ``alpha``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactness import ShortExactSeq
from .functors import ext_space, induced_ext, resolution
from .groups import (
    FgGroup,
    GroupElement,
    Homomorphism,
    PreconditionError,
    cokernel,
    direct_sum,
    factor_through,
    is_isomorphism,
    kernel,
    preimage,
    sum_maps,
    tuple_maps,
)


@dataclass(frozen=True)
class Extension:
    underlying: ShortExactSeq

    @classmethod
    def from_maps(cls, i: Homomorphism, p: Homomorphism) -> Extension:
        return cls(ShortExactSeq(i, p))

    @classmethod
    def split(cls, c: FgGroup, a: FgGroup) -> Extension:
        return cls(ShortExactSeq.split(a, c))

    @property
    def i(self) -> Homomorphism:
        return self.underlying.j

    @property
    def p(self) -> Homomorphism:
        return self.underlying.q

    @property
    def A(self) -> FgGroup:
        return self.underlying.A

    @property
    def B(self) -> FgGroup:
        return self.underlying.B

    @property
    def C(self) -> FgGroup:
        return self.underlying.C

    def to_json(self) -> dict:
        return self.underlying.to_json()


@dataclass(frozen=True)
class ExtClass:
    C: FgGroup
    A: FgGroup
    element: GroupElement

    def __post_init__(self):
        if self.element.parent != ext_space(self.C, self.A).group:
            raise ValueError("element does not lie in Ext(C, A)")

    @classmethod
    def zero(cls, c: FgGroup, a: FgGroup) -> ExtClass:
        return cls(c, a, ext_space(c, a).group.zero())

    @classmethod
    def all(cls, c: FgGroup, a: FgGroup) -> list[ExtClass]:
        return [cls(c, a, x) for x in ext_space(c, a).group.elements()]

    def __add__(self, other: ExtClass) -> ExtClass:
        _same_ends((self.C, self.A), (other.C, other.A))
        return ExtClass(self.C, self.A, self.element + other.element)

    def __neg__(self) -> ExtClass:
        return ExtClass(self.C, self.A, -self.element)


def _same_ends(x, y):
    if x != y:
        raise PreconditionError("extensions have different end groups")


def _descend(pi: Homomorphism, g: Homomorphism) -> Homomorphism:
    """The map ``h`` with ``h pi = g``, assuming ``ker pi`` is killed by ``g``."""
    return Homomorphism.from_images(pi.codomain, g.codomain,
                                    [g(preimage(pi, x)) for x in pi.codomain.gens()])


def pullback(e: Extension, h: Homomorphism) -> Extension:
    """``h^* E`` for ``h : C' -> C``, with middle ``{(b, c') : p(b) = h(c')}``."""
    if h.codomain != e.C:
        raise PreconditionError("h must map into C")
    ds = direct_sum(e.B, h.domain)
    _, incl = kernel(sum_maps([e.p, -h], ds))
    i = factor_through(tuple_maps([e.i, Homomorphism.zero(e.A, h.domain)], ds), incl)
    p = ds.projections[1] @ incl
    return Extension.from_maps(i, p)


def pushout(e: Extension, f: Homomorphism) -> Extension:
    """``f_* E`` for ``f : A -> A'``, with middle ``(A' + B) / {(f a, -i a)}``."""
    if f.domain != e.A:
        raise PreconditionError("f must start at A")
    ds = direct_sum(f.codomain, e.B)
    _, pi = cokernel(tuple_maps([f, -e.i], ds))
    i = pi @ ds.injections[0]
    p = _descend(pi, e.p @ ds.projections[1])
    return Extension.from_maps(i, p)


def baer_sum(e0: Extension, e1: Extension) -> Extension:
    _same_ends((e0.C, e0.A), (e1.C, e1.A))
    ds = direct_sum(e0.B, e1.B)
    _, u = kernel(sum_maps([e0.p, -e1.p], ds))
    v = factor_through(tuple_maps([e0.i, -e1.i], ds), u)
    _, pi = cokernel(v)
    i = pi @ factor_through(tuple_maps([e0.i, Homomorphism.zero(e0.A, e1.B)], ds), u)
    p = _descend(pi, e0.p @ ds.projections[0] @ u)
    return Extension.from_maps(i, p)


def class_to_extension(c: ExtClass) -> Extension:
    alpha = ext_space(c.C, c.A).representative(c.element)
    res = resolution(c.C)
    return pushout(Extension.from_maps(res.incl, res.proj), alpha)


def _lift(e: Extension) -> tuple[Homomorphism, Homomorphism]:
    """A lift ``beta : F -> B`` of the resolution over ``p`` and its restriction ``F' -> A``."""
    res = resolution(e.C)
    beta = Homomorphism.from_images(res.F, e.B, [preimage(e.p, g) for g in e.C.gens()])
    alpha = Homomorphism.from_images(res.Fprime, e.A,
                                     [preimage(e.i, beta(res.incl(x))) for x in res.Fprime.gens()])
    return beta, alpha


def extension_to_class(e: Extension) -> ExtClass:
    _, alpha = _lift(e)
    return ExtClass(e.C, e.A, ext_space(e.C, e.A).class_of_cocycle(alpha))


def equivalence_certificate(e0: Extension, e1: Extension) -> Homomorphism | None:
    """An isomorphism ``g : B0 -> B1`` with ``g i0 = i1`` and ``p1 g = p0``, or ``None``."""
    _same_ends((e0.C, e0.A), (e1.C, e1.A))
    space = ext_space(e0.C, e0.A)
    beta0, alpha0 = _lift(e0)
    beta1, alpha1 = _lift(e1)
    diff = space.target.coords([x for col in (alpha1 - alpha0).matrix.columns() for x in col])
    phi_raw = preimage(space.restriction, diff)
    if phi_raw is None:
        return None
    res = resolution(e0.C)
    phi = Homomorphism.from_images(res.F, e0.A,
                                   [e0.A.element(b) for b in _blocks(space.source.raw(phi_raw), e0.A.ngens)])
    ds = direct_sum(e0.A, res.F)
    s = sum_maps([e0.i, beta0], ds)
    g = _descend(s, sum_maps([e1.i, beta1 - e1.i @ phi], ds))
    if g @ s != sum_maps([e1.i, beta1 - e1.i @ phi], ds):
        raise AssertionError("certificate failed to descend")
    if g @ e0.i != e1.i or e1.p @ g != e0.p or not is_isomorphism(g):
        raise AssertionError("certificate is not an equivalence")
    return g


def _blocks(vec, size):
    return [vec[i:i + size] for i in range(0, len(vec), size)]


def equivalent(e0: Extension, e1: Extension) -> bool:
    _same_ends((e0.C, e0.A), (e1.C, e1.A))
    return extension_to_class(e0) == extension_to_class(e1)


def pullback_class(c: ExtClass, h: Homomorphism) -> ExtClass:
    """``h^*`` on classes through the induced map on Ext."""
    m = induced_ext(h, Homomorphism.identity(c.A))
    return ExtClass(h.domain, c.A, m(c.element))


def pushout_class(c: ExtClass, f: Homomorphism) -> ExtClass:
    m = induced_ext(Homomorphism.identity(c.C), f)
    return ExtClass(c.C, f.codomain, m(c.element))
