"""Elements and distinguished sets of F = Q_p((t_2))...((t_n)).

Elements are finite sums of monomials c * t_2^a_2 ... t_n^a_n with rational
coefficients read inside Q_p.  Only the additive coset structure is modelled:
a distinguished set is alpha + p^i1 t_2^i2 ... t_n^in O_F where O_F is the
rank-n ring of integers.

Membership in O_F is decided term by term: for a monomial with exponent vector
a, look at the rightmost nonzero entry of a.  If it is negative the term is
not integral, if it is positive the term is free, and if a == 0 the
coefficient must lie in Z_p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .index_core import (
    BallIds,
    BaseKind,
    MultiIndex,
    SetOps,
    StructureDescriptor,
)

Exps = tuple[int, ...]


class ShapeMismatch(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldShape:
    p: int
    n: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.n < 2:
            raise ValueError("dimension n must be >= 2")

    @property
    def width(self) -> int:
        """Number of t-variables, n - 1."""
        return self.n - 1

    def zero_exps(self) -> Exps:
        return (0,) * self.width


def vp(q, p: int):
    """p-adic valuation of a rational number; ``math.inf`` for zero."""
    q = Fraction(q)
    if q == 0:
        return math.inf
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def reduce_mod(c, p: int, i: int) -> Fraction:
    """Canonical representative of c modulo p^i Z_p.

    The representative is sum_{v <= k < i} d_k p^k with digits in [0, p):
    the p-adic expansion of c truncated below exponent i.
    """
    c = Fraction(c)
    v = vp(c, p)
    if v >= i:
        return Fraction(0)
    s = max(0, -v)
    scaled = c * p**s  # p-integral now
    mod = p ** (i + s)
    r = (scaled.numerator * pow(scaled.denominator, -1, mod)) % mod
    return Fraction(r, p**s)


def _rightmost_sign(d: Exps) -> int:
    for x in reversed(d):
        if x:
            return 1 if x > 0 else -1
    return 0


def _exps_key(e: Exps):
    return tuple(reversed(e))


@dataclass(frozen=True)
class FieldElement:
    shape: FieldShape
    terms: tuple[tuple[Exps, Fraction], ...] = ()

    @classmethod
    def make(cls, shape: FieldShape, terms: Mapping[Exps, object] | Iterable = ()) -> "FieldElement":
        acc: dict[Exps, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for e, c in items:
            e = tuple(int(x) for x in e)
            if len(e) != shape.width:
                raise ShapeMismatch(f"exponent {e} has wrong length for n={shape.n}")
            acc[e] = acc.get(e, Fraction(0)) + Fraction(c)
        kept = sorted(((e, c) for e, c in acc.items() if c != 0), key=lambda t: _exps_key(t[0]))
        return cls(shape, tuple(kept))

    @classmethod
    def zero(cls, shape: FieldShape) -> "FieldElement":
        return cls(shape, ())

    @classmethod
    def constant(cls, shape: FieldShape, c) -> "FieldElement":
        return cls.make(shape, {shape.zero_exps(): c})

    @classmethod
    def monomial(cls, shape: FieldShape, c, exps: Iterable[int]) -> "FieldElement":
        return cls.make(shape, {tuple(exps): c})

    def as_dict(self) -> dict[Exps, Fraction]:
        return dict(self.terms)

    def coefficient(self, e: Exps) -> Fraction:
        return self.as_dict().get(tuple(e), Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def _same(self, other: "FieldElement"):
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} vs {other.shape}")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._same(other)
        return FieldElement.make(self.shape, list(self.terms) + list(other.terms))

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.shape, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return self + (-other)

    def scale(self, c) -> "FieldElement":
        return FieldElement.make(self.shape, [(e, Fraction(c) * x) for e, x in self.terms])

    def shift(self, i1: int, exps: Iterable[int]) -> "FieldElement":
        """Multiply by the monomial p^i1 t^exps."""
        exps = tuple(exps)
        f = Fraction(self.shape.p) ** i1
        return FieldElement.make(
            self.shape, [(tuple(a + b for a, b in zip(e, exps)), c * f) for e, c in self.terms]
        )

    def exponents(self) -> list[Exps]:
        return [e for e, _ in self.terms]

    def to_json(self) -> list:
        return [[c.numerator, c.denominator, list(e)] for e, c in self.terms]

    @classmethod
    def from_json(cls, shape: FieldShape, data) -> "FieldElement":
        return cls.make(shape, [(tuple(e), Fraction(num, den)) for num, den, e in data])

    def __str__(self) -> str:
        from .parse import format_element

        return format_element(self)


@dataclass(frozen=True)
class IdealIndex:
    """The fractional ideal p^i1 t_2^i2 ... t_n^in O_F."""

    i1: int
    tail: MultiIndex

    def __post_init__(self):
        object.__setattr__(self, "tail", MultiIndex(self.tail))

    def to_pair(self):
        return (self.i1, tuple(self.tail))


def ideal_contains(I: IdealIndex, J: IdealIndex) -> bool:
    """Decide J O_F within I O_F; this is a total order on ideals."""
    if len(I.tail) != len(J.tail):
        raise ShapeMismatch("ideals of different dimension")
    d = tuple(b - a for a, b in zip(I.tail, J.tail))
    s = _rightmost_sign(d)
    if s:
        return s > 0
    return J.i1 >= I.i1


def _integral_term(e: Exps, c: Fraction, p: int) -> bool:
    s = _rightmost_sign(e)
    if s:
        return s > 0
    return vp(c, p) >= 0


def in_integers(x: FieldElement) -> bool:
    """x in O_F."""
    return all(_integral_term(e, c, x.shape.p) for e, c in x.terms)


@dataclass(frozen=True)
class DistinguishedSet:
    shape: FieldShape
    translate: FieldElement
    ideal: IdealIndex

    def __post_init__(self):
        if self.translate.shape != self.shape:
            raise ShapeMismatch("translate lives in another field")
        if len(self.ideal.tail) != self.shape.width:
            raise ShapeMismatch(f"ideal tail must have {self.shape.width} entries")

    @property
    def i1(self) -> int:
        return self.ideal.i1

    @property
    def tail(self) -> MultiIndex:
        return self.ideal.tail

    def translated(self, g: FieldElement) -> "DistinguishedSet":
        return canonicalize(DistinguishedSet(self.shape, self.translate + g, self.ideal))

    def to_json(self) -> dict:
        return {"alpha": self.translate.to_json(), "i1": self.i1, "tail": list(self.tail)}

    @classmethod
    def from_json(cls, shape: FieldShape, data) -> "DistinguishedSet":
        return dset(shape, FieldElement.from_json(shape, data["alpha"]), data["i1"], data["tail"])

    def __str__(self) -> str:
        from .parse import format_dset

        return format_dset(self)


def dset(shape: FieldShape, alpha, i1: int, tail) -> DistinguishedSet:
    """Canonical distinguished set alpha + p^i1 t^tail O_F.

    ``alpha`` may be a FieldElement, a rational (constant term) or a mapping
    from exponent tuples to coefficients.
    """
    if not isinstance(alpha, FieldElement):
        if isinstance(alpha, Mapping):
            alpha = FieldElement.make(shape, alpha)
        else:
            alpha = FieldElement.constant(shape, alpha)
    if isinstance(tail, int):
        tail = (tail,)
    return canonicalize(DistinguishedSet(shape, alpha, IdealIndex(int(i1), MultiIndex(tail))))


def ring_of_integers(shape: FieldShape) -> DistinguishedSet:
    return dset(shape, 0, 0, shape.zero_exps())


def member(x: FieldElement, D: DistinguishedSet) -> bool:
    if x.shape != D.shape:
        raise ShapeMismatch("element and set live in different fields")
    y = x - D.translate
    tail = D.tail
    p = D.shape.p
    for e, c in y.terms:
        d = tuple(a - b for a, b in zip(e, tail))
        s = _rightmost_sign(d)
        if s < 0:
            return False
        if s == 0 and vp(c, p) < D.i1:
            return False
    return True


def canonicalize(D: DistinguishedSet) -> DistinguishedSet:
    """Reduce the translate modulo the ideal so equal sets compare equal."""
    p, tail, i1 = D.shape.p, D.tail, D.i1
    kept = []
    for e, c in D.translate.terms:
        d = tuple(a - b for a, b in zip(e, tail))
        s = _rightmost_sign(d)
        if s > 0:
            continue
        if s == 0:
            # coefficient of the monomial p^i1 t^tail lives modulo p^i1 Z_p
            c = reduce_mod(c, p, i1)
            if c == 0:
                continue
        kept.append((e, c))
    return DistinguishedSet(D.shape, FieldElement(D.shape, tuple(kept)), D.ideal)


def intersect(D1: DistinguishedSet, D2: DistinguishedSet) -> DistinguishedSet | None:
    """Intersection of two distinguished sets: ``None`` (empty) or the finer one."""
    if D1.shape != D2.shape:
        raise ShapeMismatch("sets live in different fields")
    if ideal_contains(D1.ideal, D2.ideal):
        fine, coarse = D2, D1
    else:
        fine, coarse = D1, D2
    if member(fine.translate, coarse):
        return canonicalize(fine)
    return None


def subset(D1: DistinguishedSet, D2: DistinguishedSet) -> bool:
    """D1 within D2."""
    return ideal_contains(D2.ideal, D1.ideal) and member(D1.translate, D2)


def level(D: DistinguishedSet) -> MultiIndex:
    return MultiIndex(D.tail)


def coset_reps(D: DistinguishedSet, m: int = 1) -> list[DistinguishedSet]:
    """The p^m cosets of p^(i1+m) t^tail O_F partitioning D."""
    if m < 1:
        raise ValueError("m must be >= 1")
    shape = D.shape
    out = []
    for c in range(shape.p**m):
        shift = FieldElement.monomial(shape, Fraction(shape.p) ** D.i1 * c, D.tail)
        out.append(
            canonicalize(
                DistinguishedSet(shape, D.translate + shift, IdealIndex(D.i1 + m, D.tail))
            )
        )
    return out


def parent(D: DistinguishedSet, m: int = 1) -> DistinguishedSet:
    """The coset of p^(i1-m) t^tail O_F containing D."""
    return canonicalize(DistinguishedSet(D.shape, D.translate, IdealIndex(D.i1 - m, D.tail)))


# --------------------------------------------------------------------------
# induced structure on the base field Q_p


@dataclass(frozen=True)
class InducedHandle:
    kind: str  # "zero" | "ball" | "all"
    i: int = 0

    def __str__(self) -> str:
        return {"zero": "0", "all": "Q_p"}.get(self.kind, f"p^{self.i} Z_p")


class _InducedOps(SetOps):
    def equal(self, a, b):
        return a == b

    def intersect(self, a, b):
        if a.kind == "zero" or b.kind == "zero":
            return InducedHandle("zero")
        if a.kind == "all":
            return b
        if b.kind == "all":
            return a
        return InducedHandle("ball", max(a.i, b.i))

    def union(self, a, b):
        if a.kind == "all" or b.kind == "all":
            return InducedHandle("all")
        if a.kind == "zero":
            return b
        if b.kind == "zero":
            return a
        return InducedHandle("ball", min(a.i, b.i))

    def contains_identity(self, h):
        return True

    def is_whole(self, h):
        return h.kind == "all"

    def is_identity(self, h):
        return h.kind == "zero"

    def level(self, h, U):
        # Ball(i) sits in H_{U,j} exactly for j <= 0; zero and all have no maximum.
        if h.kind == "ball":
            return MultiIndex((0,))
        return None

    def to_json(self, h):
        return {"kind": h.kind, "i": h.i} if h.kind == "ball" else {"kind": h.kind}


def induced_base_structure(shape: FieldShape) -> StructureDescriptor:
    """Intersections of the elevation-1 field structure with Q_p inside Q_p((t))."""
    if shape.n != 2:
        raise ValueError("the induced base structure is defined for n = 2")

    def construct(a, g):
        j = g[0]
        if j > 0:
            return InducedHandle("zero")
        if j < 0:
            return InducedHandle("all")
        return InducedHandle("ball", int(a))

    return StructureDescriptor(
        elevation=1,
        kind=BaseKind.INDUCED_BASE_FIELD,
        construct=construct,
        set_ops=_InducedOps(),
        nbhd_ops=BallIds(),
        params=(("p", shape.p),),
        nbhd_type="padic_ball",
        handle_type="qp_subset",
    )
