"""Localization, truncated p-adic integers and p-completion of f.g. groups."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from sympy import isprime

from .exactness import ShortExactSeq
from .groups import (
    FgGroup,
    Homomorphism,
    PreconditionError,
    cokernel,
    factor_through,
    kernel,
    primary_decomposition,
    from_primary,
    quotient_by_n,
)


def _check_prime(p: int):
    if not isinstance(p, int) or not isprime(p):
        raise PreconditionError(f"{p} is not a prime")


# -- p-adic integers -----------------------------------------------------------


class Valuation(enum.Enum):
    INFINITE_AT_PRECISION = "infinite-at-precision"


INFINITE_AT_PRECISION = Valuation.INFINITE_AT_PRECISION


@dataclass(frozen=True)
class PadicInt:
    """A p-adic integer known modulo ``p^precision``."""

    p: int
    precision: int
    residue: int

    def __post_init__(self):
        _check_prime(self.p)
        if self.precision < 1:
            raise PreconditionError("precision must be at least 1")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    @classmethod
    def of(cls, n: int, p: int, precision: int) -> PadicInt:
        return cls(p, precision, n)

    @property
    def modulus(self) -> int:
        return self.p ** self.precision

    def truncate(self, k: int) -> PadicInt:
        if not 1 <= k <= self.precision:
            raise PreconditionError("can only truncate to a lower positive precision")
        return PadicInt(self.p, k, self.residue)

    def _common(self, other: PadicInt | int) -> tuple[int, int]:
        if isinstance(other, int):
            return self.precision, other
        if other.p != self.p:
            raise PreconditionError(f"prime mismatch: {self.p} vs {other.p}")
        return min(self.precision, other.precision), other.residue

    def __add__(self, other):
        k, r = self._common(other)
        return PadicInt(self.p, k, self.residue + r)

    __radd__ = __add__

    def __sub__(self, other):
        k, r = self._common(other)
        return PadicInt(self.p, k, self.residue - r)

    def __rsub__(self, other):
        k, r = self._common(other)
        return PadicInt(self.p, k, r - self.residue)

    def __mul__(self, other):
        k, r = self._common(other)
        return PadicInt(self.p, k, self.residue * r)

    __rmul__ = __mul__

    def __neg__(self):
        return PadicInt(self.p, self.precision, -self.residue)

    def is_unit(self) -> bool:
        return self.residue % self.p != 0

    def __str__(self) -> str:
        return f"{self.residue} mod {self.p}^{self.precision}"


def valuation(x: PadicInt) -> int | Valuation:
    if x.residue == 0:
        return INFINITE_AT_PRECISION
    r, e = x.residue, 0
    while r % x.p == 0:
        r //= x.p
        e += 1
    return e


def distance_exponent(x: PadicInt, y: PadicInt) -> int | Valuation:
    """``v(x - y)``; the distance is ``p`` to the minus this."""
    return valuation(x - y)


def digits(x: PadicInt) -> list[int]:
    out, r = [], x.residue
    for _ in range(x.precision):
        r, d = divmod(r, x.p)
        out.append(d)
    return out


def from_digits(p: int, ds: Sequence[int]) -> PadicInt:
    if not ds:
        raise PreconditionError("need at least one digit")
    if any(not 0 <= d < p for d in ds):
        raise PreconditionError(f"digits must lie in [0, {p})")
    return PadicInt(p, len(ds), sum(d * p ** i for i, d in enumerate(ds)))


def unit_decompose(x: PadicInt) -> tuple[int, PadicInt]:
    """``x = p^e u`` with ``u`` a unit known to precision ``K - e``."""
    e = valuation(x)
    if e is INFINITE_AT_PRECISION:
        raise PreconditionError("zero has no unit decomposition")
    return e, PadicInt(x.p, x.precision - e, x.residue // x.p ** e)


def invert_unit(x: PadicInt) -> PadicInt:
    """Inverse of a unit by Newton iteration ``y <- y (2 - x y)``, doubling precision each step."""
    if not x.is_unit():
        raise PreconditionError(f"{x} is not a unit")
    p, target = x.p, x.precision
    y, k = pow(x.residue % p, -1, p), 1
    while k < target:
        k = min(2 * k, target)
        m = p ** k
        y = y * (2 - x.residue * y) % m
    return PadicInt(p, target, y)


# -- localization ----------------------------------------------------------------


@dataclass(frozen=True)
class PrimeSet:
    """A set of primes: finite, or cofinite when ``complement`` is set."""

    primes: frozenset[int] = frozenset()
    complement: bool = False

    def __post_init__(self):
        for q in self.primes:
            _check_prime(q)

    @classmethod
    def of(cls, primes: Iterable[int]) -> PrimeSet:
        return cls(frozenset(primes))

    @classmethod
    def all_except(cls, primes: Iterable[int]) -> PrimeSet:
        return cls(frozenset(primes), True)

    def __contains__(self, q: int) -> bool:
        return (q in self.primes) != self.complement

    def __str__(self) -> str:
        if self.complement:
            return "ALL" if not self.primes else "all primes except " + ",".join(map(str, sorted(self.primes)))
        return "{" + ",".join(map(str, sorted(self.primes))) + "}"


ALL = PrimeSet(frozenset(), True)


@dataclass(frozen=True)
class LocalizedGroup:
    inverted: PrimeSet
    rank: int
    torsion: FgGroup

    def is_trivial(self) -> bool:
        return self.rank == 0 and self.torsion.is_trivial

    def __str__(self) -> str:
        parts = [] if self.torsion.is_trivial else [str(self.torsion)]
        if self.rank:
            parts.append(_local_ring(self.inverted))
            if self.rank > 1:
                parts[-1] += f"^{self.rank}"
        return " + ".join(parts) or "0"

    def to_json(self) -> dict:
        return {"inverted": str(self.inverted), "rank": self.rank, "torsion": self.torsion.to_json()}


def _local_ring(s: PrimeSet) -> str:
    ps = ",".join(map(str, sorted(s.primes)))
    if s.complement:
        return f"Z_({ps})" if ps else "Q"
    if not ps:
        return "Z"
    return f"Z[1/{ps}]" if len(s.primes) == 1 else f"Z[1/{{{ps}}}]"


def localize(a: FgGroup, s: PrimeSet) -> LocalizedGroup:
    kept = {q: ks for q, ks in primary_decomposition(a).items() if q not in s}
    return LocalizedGroup(s, a.free_rank, from_primary(kept))


def localize_local(a: LocalizedGroup, s: PrimeSet) -> LocalizedGroup:
    """Localize an already localized group further; ``A[S^-1][S^-1] = A[S^-1]``."""
    both = _union(a.inverted, s)
    return LocalizedGroup(both, a.rank, localize(a.torsion, both).torsion)


def _union(x: PrimeSet, y: PrimeSet) -> PrimeSet:
    if not x.complement and not y.complement:
        return PrimeSet(x.primes | y.primes)
    if x.complement and y.complement:
        return PrimeSet(x.primes & y.primes, True)
    fin, cof = (x, y) if y.complement else (y, x)
    return PrimeSet(cof.primes - fin.primes, True)


def homology(f: Homomorphism, g: Homomorphism) -> FgGroup:
    """``ker g / im f`` for composable ``f, g`` with ``g f = 0``."""
    if not (g @ f).is_zero():
        raise PreconditionError("composite is not zero")
    _, k = kernel(g)
    h, _ = cokernel(factor_through(f, k))
    return h


def localized_exactness_defects(e: ShortExactSeq, s: PrimeSet) -> list[LocalizedGroup]:
    """Localized homology at the three nodes of ``0 -> A -> B -> C -> 0``.

    Localization is exact, so each entry is ``H[S^-1]`` for the homology ``H``
    of the original sequence; all entries vanish for a short exact input.
    """
    zero_in = Homomorphism.zero(FgGroup(), e.A)
    zero_out = Homomorphism.zero(e.C, FgGroup())
    return [localize(homology(f, g), s) for f, g in
            ((zero_in, e.j), (e.j, e.q), (e.q, zero_out))]


# -- completion ------------------------------------------------------------------


@dataclass(frozen=True)
class CompletedGroup:
    """``Z_p^zp_rank + finite_part`` with ``finite_part`` a finite p-group."""

    p: int
    zp_rank: int
    finite_part: FgGroup

    def __post_init__(self):
        _check_prime(self.p)
        fp = self.finite_part
        if fp.free_rank or any(set(primary_decomposition(FgGroup.cyclic(d))) != {self.p}
                               for d in fp.invariant_factors):
            raise PreconditionError("finite part must be a finite p-group")

    def is_trivial(self) -> bool:
        return self.zp_rank == 0 and self.finite_part.is_trivial

    def __str__(self) -> str:
        parts = [] if self.finite_part.is_trivial else [str(self.finite_part)]
        if self.zp_rank:
            parts.append(f"Z_{self.p}" + (f"^{self.zp_rank}" if self.zp_rank > 1 else ""))
        return " + ".join(parts) or "0"

    def to_json(self) -> dict:
        return {"p": self.p, "zp_rank": self.zp_rank, "finite_part": self.finite_part.to_json()}


def complete(a: FgGroup, p: int) -> CompletedGroup:
    _check_prime(p)
    part = primary_decomposition(a).get(p, [])
    return CompletedGroup(p, a.free_rank, from_primary({p: part} if part else {}))


def mod_pk(g: CompletedGroup, k: int) -> FgGroup:
    if k < 0:
        raise PreconditionError("k must be non-negative")
    pk = g.p ** k
    finite, _ = quotient_by_n(g.finite_part, pk)
    return FgGroup.from_orders([pk] * g.zp_rank + list(finite.invariant_factors))


def derived_completion(a: FgGroup, p: int) -> tuple[CompletedGroup, FgGroup]:
    """``(L0 A, L1 A)``; a f.g. group has bounded p-torsion so ``L1 A = 0``."""
    return complete(a, p), FgGroup()


def completed_exactness_defects(e: ShortExactSeq, p: int) -> list[CompletedGroup]:
    """Completed homology at the three nodes; zero for a short exact input."""
    zero_in = Homomorphism.zero(FgGroup(), e.A)
    zero_out = Homomorphism.zero(e.C, FgGroup())
    return [complete(homology(f, g), p) for f, g in
            ((zero_in, e.j), (e.j, e.q), (e.q, zero_out))]
