"""Finitely generated abelian groups in canonical form, their elements and maps.

A group ``Z/d_1 + ... + Z/d_t + Z^r`` is stored by its free rank and its
invariant factors ``d_1 | d_2 | ... | d_t`` (all ``>= 2``).  Generators are
ordered torsion first, then free.  Homomorphisms act on column vectors:
column ``i`` of the matrix is the image of the ``i``-th domain generator.

Raw groups ``Z^m / (column span of R)`` enter through :class:`Presentation`
and :func:`classify`, which returns the canonical form together with
mutually inverse coordinate changes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd, prod
from typing import Iterator, NamedTuple, Sequence

from sympy import factorint

from .intmat import IntMatrix, block_diagonal, hnf, kernel_lattice, snf, solve


class PreconditionError(ValueError):
    """A mathematical precondition of an operation does not hold."""


class NotWellDefinedError(PreconditionError):
    pass


@dataclass(frozen=True)
class FgGroup:
    free_rank: int = 0
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "invariant_factors", tuple(int(d) for d in self.invariant_factors))
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        ds = self.invariant_factors
        if any(d < 2 for d in ds):
            raise ValueError(f"invariant factors must be >= 2, got {ds}")
        if any(b % a for a, b in zip(ds, ds[1:])):
            raise ValueError(f"invariant factors must form a divisibility chain, got {ds}")

    @classmethod
    def free(cls, rank: int) -> FgGroup:
        return cls(rank, ())

    @classmethod
    def cyclic(cls, n: int) -> FgGroup:
        """``Z/n``; ``n = 0`` gives ``Z`` and ``n = 1`` the trivial group."""
        n = abs(n)
        if n == 0:
            return cls(1, ())
        return cls(0, (n,) if n > 1 else ())

    @classmethod
    def from_orders(cls, orders: Sequence[int]) -> FgGroup:
        """Canonical form of a direct sum of cyclic groups ``Z/n`` (``n = 0`` meaning ``Z``)."""
        return classify(Presentation.diagonal(orders)).group

    @property
    def torsion_count(self) -> int:
        return len(self.invariant_factors)

    @property
    def ngens(self) -> int:
        return self.torsion_count + self.free_rank

    @property
    def orders(self) -> tuple[int, ...]:
        """Order of each generator, with 0 for the free ones."""
        return self.invariant_factors + (0,) * self.free_rank

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.ngens == 0

    @property
    def is_free(self) -> bool:
        return not self.invariant_factors

    @property
    def order(self) -> int | None:
        return prod(self.invariant_factors) if self.is_finite else None

    @property
    def exponent(self) -> int:
        """Least ``n >= 1`` killing the group, or 0 if the group is infinite."""
        if not self.is_finite:
            return 0
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def relations(self) -> IntMatrix:
        """The ``ngens x t`` relation matrix ``diag(d_1..d_t)`` padded with zero rows."""
        return IntMatrix.diagonal(self.invariant_factors, self.ngens, self.torsion_count)

    def presentation(self) -> Presentation:
        return Presentation(self.ngens, self.relations())

    def normalize(self, coords: Sequence[int]) -> tuple[int, ...]:
        if len(coords) != self.ngens:
            raise ValueError(f"expected {self.ngens} coordinates, got {len(coords)}")
        return tuple(c % d if d else c for c, d in zip(coords, self.orders))

    def element(self, coords: Sequence[int]) -> GroupElement:
        return GroupElement(self, tuple(coords))

    def zero(self) -> GroupElement:
        return GroupElement(self, (0,) * self.ngens)

    def gens(self) -> list[GroupElement]:
        n = self.ngens
        return [GroupElement(self, tuple(int(i == j) for j in range(n))) for i in range(n)]

    def elements(self) -> Iterator[GroupElement]:
        """All elements in lexicographic order of normal-form coordinates (finite groups only)."""
        if not self.is_finite:
            raise PreconditionError(f"{self} is infinite")
        for coords in itertools.product(*(range(d) for d in self.invariant_factors)):
            yield GroupElement(self, coords)

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.invariant_factors]
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"rank": self.free_rank, "factors": list(self.invariant_factors)}


TRIVIAL = FgGroup()


@dataclass(frozen=True)
class GroupElement:
    parent: FgGroup
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", self.parent.normalize(self.coords))

    def __add__(self, other: GroupElement) -> GroupElement:
        self._check(other)
        return GroupElement(self.parent, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: GroupElement) -> GroupElement:
        self._check(other)
        return GroupElement(self.parent, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> GroupElement:
        return GroupElement(self.parent, tuple(-a for a in self.coords))

    def __rmul__(self, k: int) -> GroupElement:
        return GroupElement(self.parent, tuple(k * a for a in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def order(self) -> int:
        """Additive order, 0 for elements of infinite order."""
        n = 1
        for c, d in zip(self.coords, self.parent.orders):
            if c == 0:
                continue
            if d == 0:
                return 0
            n = n * (d // gcd(c, d)) // gcd(n, d // gcd(c, d))
        return n

    def _check(self, other: GroupElement):
        if other.parent != self.parent:
            raise ValueError(f"elements of different groups {self.parent} and {other.parent}")

    def __str__(self) -> str:
        return "(" + ", ".join(map(str, self.coords)) + ")"


@dataclass(frozen=True)
class Homomorphism:
    domain: FgGroup
    codomain: FgGroup
    matrix: IntMatrix

    def __post_init__(self):
        m = self.matrix
        if not isinstance(m, IntMatrix):
            m = IntMatrix.from_rows(m, self.domain.ngens)
        if (m.rows, m.cols) != (self.codomain.ngens, self.domain.ngens):
            raise ValueError(f"matrix shape {m.rows}x{m.cols} does not fit "
                             f"{self.domain} -> {self.codomain}")
        cols = [self.codomain.normalize(c) for c in m.columns()]
        for d, col in zip(self.domain.invariant_factors, cols):
            if any(x for x in self.codomain.normalize(tuple(d * c for c in col))):
                raise NotWellDefinedError(
                    f"generator of order {d} sent to {col}, which is not killed by {d}")
        object.__setattr__(self, "matrix", IntMatrix.from_columns(cols, m.rows))

    @classmethod
    def from_images(cls, domain: FgGroup, codomain: FgGroup, images: Sequence) -> Homomorphism:
        cols = [x.coords if isinstance(x, GroupElement) else tuple(x) for x in images]
        return cls(domain, codomain, IntMatrix.from_columns(cols, codomain.ngens))

    @classmethod
    def identity(cls, a: FgGroup) -> Homomorphism:
        return cls(a, a, IntMatrix.identity(a.ngens))

    @classmethod
    def zero(cls, a: FgGroup, b: FgGroup) -> Homomorphism:
        return cls(a, b, IntMatrix.zeros(b.ngens, a.ngens))

    @classmethod
    def multiplication(cls, a: FgGroup, n: int) -> Homomorphism:
        return cls(a, a, IntMatrix.identity(a.ngens).scale(n))

    def __call__(self, x: GroupElement) -> GroupElement:
        if x.parent != self.domain:
            raise ValueError(f"{x} is not an element of {self.domain}")
        return GroupElement(self.codomain, self.matrix.apply(x.coords))

    def __matmul__(self, other: Homomorphism) -> Homomorphism:
        """``g @ f`` is the composite ``g o f``."""
        if other.codomain != self.domain:
            raise ValueError(f"cannot compose {other.domain}->{other.codomain} "
                             f"with {self.domain}->{self.codomain}")
        return Homomorphism(other.domain, self.codomain, self.matrix @ other.matrix)

    def __add__(self, other: Homomorphism) -> Homomorphism:
        self._check(other)
        return Homomorphism(self.domain, self.codomain, self.matrix + other.matrix)

    def __sub__(self, other: Homomorphism) -> Homomorphism:
        self._check(other)
        return Homomorphism(self.domain, self.codomain, self.matrix - other.matrix)

    def __neg__(self) -> Homomorphism:
        return Homomorphism(self.domain, self.codomain, -self.matrix)

    def __rmul__(self, k: int) -> Homomorphism:
        return Homomorphism(self.domain, self.codomain, self.matrix.scale(k))

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def images(self) -> list[GroupElement]:
        return [GroupElement(self.codomain, c) for c in self.matrix.columns()]

    def _check(self, other: Homomorphism):
        if (other.domain, other.codomain) != (self.domain, self.codomain):
            raise ValueError("homomorphisms have different domain or codomain")

    def to_json(self) -> dict:
        return {"domain": self.domain.to_json(), "codomain": self.codomain.to_json(),
                "matrix": self.matrix.tolist()}


def hom_compose(g: Homomorphism, f: Homomorphism) -> Homomorphism:
    return g @ f


def hom_add(f: Homomorphism, g: Homomorphism) -> Homomorphism:
    return f + g


def hom_eval(f: Homomorphism, x: GroupElement) -> GroupElement:
    return f(x)


# -- presentations ---------------------------------------------------------


@dataclass(frozen=True)
class Presentation:
    """``Z^generators`` modulo the span of the columns of ``relations``."""

    generators: int
    relations: IntMatrix

    def __post_init__(self):
        if self.relations.rows != self.generators:
            raise ValueError("relation matrix must have one row per generator")

    @classmethod
    def diagonal(cls, orders: Sequence[int]) -> Presentation:
        rels = [o for o in orders]
        return cls(len(rels), IntMatrix.diagonal(rels))


class Classification(NamedTuple):
    """Canonical form of a presentation with its coordinate isomorphisms.

    ``to_canonical`` maps raw coordinates to canonical ones and
    ``from_canonical`` sends canonical generators to raw representatives;
    ``to_canonical @ from_canonical`` is the identity.
    """

    group: FgGroup
    to_canonical: IntMatrix
    from_canonical: IntMatrix

    def coords(self, raw: Sequence[int]) -> GroupElement:
        return GroupElement(self.group, self.to_canonical.apply(raw))

    def raw(self, x: GroupElement) -> tuple[int, ...]:
        return self.from_canonical.apply(x.coords)

    def verify(self, p: Presentation) -> bool:
        """Check that the two coordinate changes are mutually inverse isomorphisms."""
        n = self.group.ngens
        back = self.to_canonical @ self.from_canonical
        if any(self.group.normalize(c) != self.group.normalize(e)
               for c, e in zip(back.columns(), IntMatrix.identity(n).columns())):
            return False
        round_trip = self.from_canonical @ self.to_canonical - IntMatrix.identity(p.generators)
        if any(solve(p.relations, c) is None for c in round_trip.columns()):
            return False
        return all(self.group.normalize(self.to_canonical.apply(r)) == (0,) * n
                   for r in p.relations.columns())

    def hom_from(self, source: Classification, raw_matrix: IntMatrix) -> Homomorphism:
        """The map ``source.group -> self.group`` induced by a raw matrix."""
        return Homomorphism(source.group, self.group,
                            self.to_canonical @ raw_matrix @ source.from_canonical)


def classify(p: Presentation) -> Classification:
    """Canonical form of ``Z^m / relations`` via the Smith normal form."""
    m = p.generators
    s = snf(p.relations)
    diag = [s.D[i, i] if i < p.relations.cols else 0 for i in range(m)]
    torsion = [i for i in range(m) if diag[i] > 1]
    free = [i for i in range(m) if diag[i] == 0]
    keep = torsion + free
    group = FgGroup(len(free), tuple(diag[i] for i in torsion))
    to = s.U.submatrix(keep, range(m))
    frm = s.U_inv.submatrix(range(m), keep)
    return Classification(group, to, frm)


class Subquotient(NamedTuple):
    """``X / Y`` for lattices ``Y <= X <= Z^N`` given by spanning columns."""

    classification: Classification
    basis: IntMatrix

    @property
    def group(self) -> FgGroup:
        return self.classification.group

    @property
    def inclusion(self) -> IntMatrix:
        """Raw ``Z^N`` representatives of the canonical generators, as columns."""
        return self.basis @ self.classification.from_canonical

    def coords(self, y: Sequence[int]) -> GroupElement | None:
        c = solve(self.basis, y)
        if c is None:
            return None
        return self.classification.coords(c)


def subquotient(gens: IntMatrix, rels: IntMatrix) -> Subquotient:
    basis = hnf(gens.T).basis.T if gens.cols else IntMatrix.zeros(gens.rows, 0)
    cols = []
    for r in rels.columns():
        c = solve(basis, r)
        if c is None:
            raise ValueError("relation lattice is not contained in the generating lattice")
        cols.append(c)
    rel = IntMatrix.from_columns(cols, basis.cols)
    return Subquotient(classify(Presentation(basis.cols, rel)), basis)


# -- kernels, images, cokernels ----------------------------------------------


def preimage(f: Homomorphism, y: GroupElement) -> GroupElement | None:
    """Some ``x`` with ``f(x) == y``; deterministic, ``None`` if ``y`` is not in the image."""
    if y.parent != f.codomain:
        raise ValueError(f"{y} is not an element of {f.codomain}")
    big = f.matrix.hstack(f.codomain.relations())
    x = solve(big, y.coords)
    if x is None:
        return None
    return GroupElement(f.domain, x[:f.domain.ngens])


def kernel(f: Homomorphism) -> tuple[FgGroup, Homomorphism]:
    """``(K, inclusion K -> domain)``."""
    sq = kernel_subquotient(f)
    incl = Homomorphism(sq.group, f.domain, sq.inclusion)
    return sq.group, incl


def kernel_subquotient(f: Homomorphism) -> Subquotient:
    a, b = f.domain, f.codomain
    k = kernel_lattice(f.matrix.hstack(b.relations()))
    gens = IntMatrix.from_rows([r[:a.ngens] for r in k.entries], a.ngens).T if k.rows else \
        IntMatrix.zeros(a.ngens, 0)
    return subquotient(gens.hstack(a.relations()), a.relations())


def image_subquotient(f: Homomorphism) -> Subquotient:
    rels = f.codomain.relations()
    return subquotient(f.matrix.hstack(rels), rels)


def image(f: Homomorphism) -> tuple[FgGroup, Homomorphism]:
    """``(I, inclusion I -> codomain)``."""
    sq = image_subquotient(f)
    return sq.group, Homomorphism(sq.group, f.codomain, sq.inclusion)


def cokernel_classification(f: Homomorphism) -> Classification:
    b = f.codomain
    return classify(Presentation(b.ngens, b.relations().hstack(f.matrix)))


def cokernel(f: Homomorphism) -> tuple[FgGroup, Homomorphism]:
    """``(Q, projection codomain -> Q)``."""
    c = cokernel_classification(f)
    return c.group, Homomorphism(f.codomain, c.group, c.to_canonical)


def is_injective(f: Homomorphism) -> bool:
    return kernel(f)[0].is_trivial


def is_surjective(f: Homomorphism) -> bool:
    return all(preimage(f, g) is not None for g in f.codomain.gens())


def is_isomorphism(f: Homomorphism) -> bool:
    return is_surjective(f) and is_injective(f)


def inverse(f: Homomorphism) -> Homomorphism:
    if not is_isomorphism(f):
        raise PreconditionError("map is not an isomorphism")
    return Homomorphism.from_images(f.codomain, f.domain, [preimage(f, g) for g in f.codomain.gens()])


def factor_through(g: Homomorphism, j: Homomorphism) -> Homomorphism:
    """The map ``h`` with ``j @ h == g``, for injective ``j`` whose image contains that of ``g``.

    For non-injective ``j`` a lift is attempted generator by generator, which
    raises :class:`NotWellDefinedError` if the choices do not assemble.
    """
    if g.codomain != j.codomain:
        raise ValueError("maps must share a codomain")
    images = []
    for y in g.images():
        x = preimage(j, y)
        if x is None:
            raise PreconditionError(f"{y} does not lie in the image")
        images.append(x)
    return Homomorphism.from_images(g.domain, j.domain, images)


def contains_subgroup(big: Homomorphism, small: Homomorphism) -> bool:
    """Whether the image of ``small`` lies in the image of ``big`` (same codomain)."""
    return all(preimage(big, y) is not None for y in small.images())


# -- constructions -----------------------------------------------------------


class DirectSum(NamedTuple):
    group: FgGroup
    injections: tuple[Homomorphism, ...]
    projections: tuple[Homomorphism, ...]


def direct_sum(*groups: FgGroup) -> DirectSum:
    """Canonical form of ``A_1 + ... + A_k`` with injections and projections."""
    c = classify(Presentation(sum(g.ngens for g in groups),
                              block_diagonal(*(g.relations() for g in groups))))
    injections, projections = [], []
    offset = 0
    total = sum(g.ngens for g in groups)
    for g in groups:
        emb = IntMatrix.from_columns(
            [tuple(int(r == offset + i) for r in range(total)) for i in range(g.ngens)], total)
        proj = emb.T
        injections.append(Homomorphism(g, c.group, c.to_canonical @ emb))
        projections.append(Homomorphism(c.group, g, proj @ c.from_canonical))
        offset += g.ngens
    return DirectSum(c.group, tuple(injections), tuple(projections))


def sum_maps(maps: Sequence[Homomorphism], source: DirectSum) -> Homomorphism:
    """The map ``source.group -> B`` restricting to ``maps[i]`` on the ``i``-th summand."""
    return _sum(f @ p for f, p in zip(maps, source.projections))


def tuple_maps(maps: Sequence[Homomorphism], target: DirectSum) -> Homomorphism:
    """The map ``A -> target.group`` whose ``i``-th component is ``maps[i]``."""
    return _sum(i @ f for f, i in zip(maps, target.injections))


def _sum(maps) -> Homomorphism:
    maps = list(maps)
    out = maps[0]
    for f in maps[1:]:
        out = out + f
    return out


def subgroup_ann(a: FgGroup, n: int) -> tuple[FgGroup, Homomorphism]:
    """``A[n] = {x : n x = 0}`` with its inclusion."""
    if n < 1:
        raise PreconditionError("n must be positive")
    return kernel(Homomorphism.multiplication(a, n))


def quotient_by_n(a: FgGroup, n: int) -> tuple[FgGroup, Homomorphism]:
    """``A / nA`` with its projection."""
    if n < 1:
        raise PreconditionError("n must be positive")
    return cokernel(Homomorphism.multiplication(a, n))


def torsion_part(a: FgGroup) -> tuple[FgGroup, Homomorphism]:
    t = FgGroup(0, a.invariant_factors)
    incl = IntMatrix.identity(a.ngens).submatrix(range(a.ngens), range(a.torsion_count))
    return t, Homomorphism(t, a, incl)


def primary_decomposition(a: FgGroup) -> dict[int, list[int]]:
    """``{p: sorted exponents e}`` with ``tors(A) = sum of Z/p^e``."""
    out: dict[int, list[int]] = {}
    for d in a.invariant_factors:
        for p, e in factorint(d).items():
            out.setdefault(int(p), []).append(int(e))
    return {p: sorted(es) for p, es in sorted(out.items())}


def from_primary(decomposition: dict[int, Sequence[int]], free_rank: int = 0) -> FgGroup:
    orders = [p ** e for p, es in decomposition.items() for e in es]
    return FgGroup.from_orders(orders + [0] * free_rank)


def crt_idempotents(moduli: Sequence[int]) -> list[int]:
    """Integers ``e_i`` summing to 1 with ``e_i = 1 mod n_i`` and ``e_i = 0 mod n/n_i``.

    All but the last are least nonnegative residues mod ``n``; the last one
    absorbs the correction that makes the sum exactly 1.
    """
    moduli = [int(x) for x in moduli]
    if not moduli or any(x < 1 for x in moduli):
        raise PreconditionError("moduli must be positive integers")
    for x, y in itertools.combinations(moduli, 2):
        if gcd(x, y) != 1:
            raise PreconditionError(f"moduli {x} and {y} are not coprime")
    n = prod(moduli)
    es = []
    for ni in moduli[:-1]:
        rest = n // ni
        es.append(0 if ni == 1 else rest * pow(rest % ni, -1, ni) % n)
    es.append(1 - sum(es))
    return es


def fpk_invariants(a: FgGroup, p: int, k: int) -> tuple[int, int]:
    """``(f_p^k(A), g_p^k(A))`` where ``p^f = |{x in p^(k-1) A : p x = 0}|``."""
    if k < 1:
        raise PreconditionError("k must be positive")
    return _fpk(a, p, k), _fpk(a, p, k) - _fpk(a, p, k + 1)


def _fpk(a: FgGroup, p: int, k: int) -> int:
    _, incl = image(Homomorphism.multiplication(a, p ** (k - 1)))
    f, _ = kernel(p * incl)
    order, v = f.order, 0
    while order > 1:
        order //= p
        v += 1
    return v
