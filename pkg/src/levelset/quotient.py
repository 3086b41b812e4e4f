"""Finite quotient model of F used as a brute-force oracle.

The model is the finite set of elements whose terms sit in a box of
t-exponents and whose coefficients are digit sums sum_{i_lo <= k < i_hi} c_k p^k.
Sets are compared through the subsets of model points they contain.

Membership here is computed independently of :mod:`levelset.hlf`: integrality
follows the residue-map definition literally (split off the last variable,
require no negative powers, recurse into the constant part, and finally ask
for a denominator prime to p).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .hlf import DistinguishedSet, FieldElement, FieldShape


class UnsafeQuery(ValueError):
    """The queried set is not faithfully represented by the model windows."""


def _integral(terms: dict, width: int, p: int) -> bool:
    if width == 0:
        c = terms.get((), Fraction(0))
        return Fraction(c).denominator % p != 0
    const: dict = {}
    for e, c in terms.items():
        if c == 0:
            continue
        k = e[-1]
        if k < 0:
            return False
        if k == 0:
            const[e[:-1]] = const.get(e[:-1], Fraction(0)) + c
    return _integral(const, width - 1, p)


def _oracle_member_dist(x: dict, D: DistinguishedSet) -> bool:
    p = D.shape.p
    diff = dict(x)
    for e, c in D.translate.terms:
        diff[e] = diff.get(e, Fraction(0)) - c
    scale = Fraction(p) ** (-D.i1)
    shifted = {
        tuple(a - b for a, b in zip(e, D.tail)): c * scale for e, c in diff.items() if c != 0
    }
    return _integral(shifted, D.shape.width, p)


def _oracle_member_rank1(x: dict, g: FieldElement, j: int) -> bool:
    diff = dict(x)
    for e, c in g.terms:
        diff[e] = diff.get(e, Fraction(0)) - c
    return all(e[0] >= j for e, c in diff.items() if c != 0)


@dataclass
class QuotientModel:
    shape: FieldShape
    t_window: tuple[tuple[int, int], ...]
    i_lo: int
    i_hi: int
    _points: list = field(default_factory=list, repr=False)
    _masks: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self._points)

    @property
    def boxes(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(lo, hi + 1) for lo, hi in self.t_window)))

    def points(self) -> list[FieldElement]:
        return [FieldElement.make(self.shape, pt) for pt in self._points]

    def point(self, k: int) -> FieldElement:
        return FieldElement.make(self.shape, self._points[k])

    # -- safety --------------------------------------------------------------

    def representable(self, c) -> bool:
        c = Fraction(c)
        p = self.shape.p
        if c < 0 or c >= Fraction(p) ** self.i_hi:
            return False
        return (c * Fraction(p) ** (-self.i_lo)).denominator == 1

    def _check_translate(self, g: FieldElement):
        for e, c in g.terms:
            if any(not lo <= a <= hi for a, (lo, hi) in zip(e, self.t_window)):
                raise UnsafeQuery(f"translate term at exponent {e} lies outside the t-window")
            if not self.representable(c):
                raise UnsafeQuery(f"coefficient {c} is not a model digit string")

    def check_dist(self, D: DistinguishedSet):
        if D.shape != self.shape:
            raise UnsafeQuery("shape mismatch")
        # at i1 == i_hi the model cannot separate p^i t^g O from t^(g+1) O
        if not self.i_lo <= D.i1 < self.i_hi:
            raise UnsafeQuery(f"p-exponent {D.i1} outside [{self.i_lo}, {self.i_hi})")
        for a, (lo, hi) in zip(D.tail, self.t_window):
            if not lo <= a <= hi:
                raise UnsafeQuery(f"t-exponent {tuple(D.tail)} outside the t-window")
        self._check_translate(D.translate)

    def check_set(self, S):
        from . import setalg as sa

        basics = list(sa.basic_sets(S))
        rank_js = {b.j for b in basics if not isinstance(b, DistinguishedSet)}
        for b in basics:
            if isinstance(b, DistinguishedSet):
                self.check_dist(b)
                # t^j OO and p^i_lo t^j O differ only at coefficients below p^i_lo
                if b.i1 == self.i_lo and b.tail[0] in rank_js:
                    raise UnsafeQuery("distinguished set at the bottom digit shares a rank-one index")
            else:
                # at j == lo a rank-one coset would fill the whole model
                if not self.t_window[0][0] < b.j <= self.t_window[0][1]:
                    raise UnsafeQuery(f"rank-one index {b.j} outside the t-window")
                self._check_translate(b.translate)

    # -- membership ----------------------------------------------------------

    def member_model(self, x: FieldElement, D: DistinguishedSet) -> bool:
        return _oracle_member_dist(x.as_dict(), D)

    def dist_mask(self, D: DistinguishedSet, check: bool = True) -> int:
        if check:
            self.check_dist(D)
        key = ("d", D)
        if key not in self._masks:
            m = 0
            for k, pt in enumerate(self._points):
                if _oracle_member_dist(pt, D):
                    m |= 1 << k
            self._masks[key] = m
        return self._masks[key]

    def mask(self, S, check: bool = True) -> int:
        """Bitmask of model points lying in a symbolic set."""
        from . import setalg as sa

        if check:
            self.check_set(S)
        if isinstance(S, DistinguishedSet):
            return self.dist_mask(S, check=False)
        if isinstance(S, sa.Empty):
            return 0
        if isinstance(S, sa.Dist):
            return self.dist_mask(S.d, check=False)
        if isinstance(S, sa.RankOne):
            key = ("r", S)
            if key not in self._masks:
                m = 0
                for k, pt in enumerate(self._points):
                    if _oracle_member_rank1(pt, S.translate, S.j):
                        m |= 1 << k
                self._masks[key] = m
            return self._masks[key]
        if isinstance(S, sa.Union):
            m = 0
            for s in S.members:
                m |= self.mask(s, check=False)
            return m
        if isinstance(S, sa.Diff):
            m = self.mask(S.base, check=False)
            for h in S.holes:
                m &= ~self.mask(h, check=False)
            return m
        raise TypeError(f"not a set: {S!r}")

    def full_mask(self) -> int:
        return (1 << len(self._points)) - 1

    def elements_of(self, mask: int) -> list[FieldElement]:
        return [self.point(k) for k in range(len(self._points)) if mask >> k & 1]

    def equal_model(self, S, T) -> bool:
        return self.mask(S) == self.mask(T)


def _normalize_window(shape: FieldShape, t_window) -> tuple[tuple[int, int], ...]:
    t_window = list(t_window)
    if shape.width == 1 and len(t_window) == 2 and all(isinstance(x, int) for x in t_window):
        t_window = [tuple(t_window)]
    out = tuple((int(lo), int(hi)) for lo, hi in t_window)
    if len(out) != shape.width:
        raise ValueError(f"t_window needs {shape.width} coordinate ranges")
    if any(lo > hi for lo, hi in out):
        raise ValueError("empty t_window")
    return out


def build_quotient_model(
    shape: FieldShape, t_window: Iterable, i_lo: int, i_hi: int, max_size: int = 2_000_000
) -> QuotientModel:
    """Enumerate every model element.

    ``t_window`` is a list of inclusive (lo, hi) ranges, one per t-variable
    (a bare (lo, hi) pair is accepted when n == 2).  Coefficients range over
    digit strings with exponents in [i_lo, i_hi).
    """
    if i_hi <= i_lo:
        raise ValueError("p-exponent window is empty")
    win = _normalize_window(shape, t_window)
    boxes = list(itertools.product(*(range(lo, hi + 1) for lo, hi in win)))
    p = shape.p
    ncoef = p ** (i_hi - i_lo)
    total = ncoef ** len(boxes)
    if total > max_size:
        raise ValueError(f"quotient model would have {total} points")
    unit = Fraction(p) ** i_lo
    pts = []
    for digits in itertools.product(range(ncoef), repeat=len(boxes)):
        pts.append({e: unit * d for e, d in zip(boxes, digits) if d})
    return QuotientModel(shape, win, i_lo, i_hi, pts)
