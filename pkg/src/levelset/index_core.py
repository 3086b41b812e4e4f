"""Multi-indices, abstract level structures and finite-window axiom checks.

A level structure is described by a :class:`StructureDescriptor`: an elevation,
a constructor ``(neighbourhood id, MultiIndex) -> handle`` and two small
operation tables, one for the handles (set algebra and levels) and one for the
neighbourhood identifiers of the base.  Everything here is base-agnostic; the
concrete structures live in :mod:`levelset.structures`, :mod:`levelset.hlf`
and :mod:`levelset.zlevels`.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Sequence


class ElevationMismatch(ValueError):
    pass


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class MultiIndex(tuple):
    """An element of Z^e, ordered lexicographically from the right.

    The last component is the most significant one. Equality is plain tuple
    equality; the order comparisons refuse to compare different elevations.
    """

    def __new__(cls, components: Iterable[int] = ()):
        if isinstance(components, int):
            components = (components,)
        return super().__new__(cls, (int(c) for c in components))

    @property
    def e(self) -> int:
        return len(self)

    def key(self) -> tuple[int, ...]:
        return tuple(reversed(self))

    def _other_key(self, other) -> tuple[int, ...]:
        if len(other) != len(self):
            raise ElevationMismatch(f"cannot compare {self!r} with {other!r}")
        return tuple(reversed(other))

    def __lt__(self, other):
        if not isinstance(other, tuple):
            return NotImplemented
        return self.key() < self._other_key(other)

    def __le__(self, other):
        if not isinstance(other, tuple):
            return NotImplemented
        return self.key() <= self._other_key(other)

    def __gt__(self, other):
        if not isinstance(other, tuple):
            return NotImplemented
        return self.key() > self._other_key(other)

    def __ge__(self, other):
        if not isinstance(other, tuple):
            return NotImplemented
        return self.key() >= self._other_key(other)

    def __eq__(self, other):
        return tuple.__eq__(self, other)

    def __ne__(self, other):
        return tuple.__ne__(self, other)

    __hash__ = tuple.__hash__

    def __add__(self, other):
        return MultiIndex(tuple(self) + tuple(other))

    def __repr__(self) -> str:
        return f"MultiIndex({tuple(self)!r})"


def rightlex_cmp(a: Sequence[int], b: Sequence[int]) -> Ordering:
    if len(a) != len(b):
        raise ElevationMismatch(f"elevations differ: {len(a)} vs {len(b)}")
    for x, y in zip(reversed(a), reversed(b)):
        if x != y:
            return Ordering.LESS if x < y else Ordering.GREATER
    return Ordering.EQUAL


def rightlex_min(indices: Iterable[Sequence[int]]) -> MultiIndex:
    return MultiIndex(min(indices, key=lambda g: tuple(reversed(g))))


def rightlex_max(indices: Iterable[Sequence[int]]) -> MultiIndex:
    return MultiIndex(max(indices, key=lambda g: tuple(reversed(g))))


class _Top:
    """Sentinel above every multi-index: "contained in G_{U,delta} for all delta"."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "TOP"


TOP = _Top()


def level_min(a, b):
    """Right-lex minimum where ``TOP`` is the top element and ``None`` absorbs."""
    if a is None or b is None:
        return None
    if a is TOP:
        return b
    if b is TOP:
        return a
    return a if a <= b else b


# --------------------------------------------------------------------------
# descriptors


class BaseKind(str, enum.Enum):
    PADIC_BALLS = "field"
    PADIC_SELF = "padic_self"
    FIELD_OVER_FIELD = "field_over_field"
    SINGLETON = "zstride"
    PRODUCT = "product"
    INFLATED = "inflate"
    STACKED = "stack"
    INDUCED_BASE_FIELD = "induced"


class SetOps:
    """Exact set operations on the handles produced by a constructor.

    ``level`` is the level of a handle as a subset of the group (``None`` when
    it does not exist).  ``containment_level`` is the literal
    max{delta : h subset G_{U,delta}}; it may be ``TOP`` or ``None``.
    """

    def equal(self, a, b) -> bool:
        raise NotImplementedError

    def intersect(self, a, b):
        raise NotImplementedError

    def union(self, a, b):
        raise NotImplementedError

    def subset(self, a, b) -> bool:
        return self.equal(self.intersect(a, b), a)

    def contains_identity(self, h) -> bool:
        raise NotImplementedError

    def is_whole(self, h) -> bool:
        return False

    def is_identity(self, h) -> bool:
        return False

    def level(self, h, U):
        raise NotImplementedError

    def containment_level(self, h, U):
        return self.level(h, U)

    def widened(self, width: int) -> "SetOps":
        raise NotImplementedError(f"{type(self).__name__} cannot be stacked")

    def to_json(self, h) -> Any:
        return repr(h)


class NbhdOps:
    """Neighbourhood identifiers of the base: inclusion, union, intersection."""

    def subset(self, V, U) -> bool:
        raise NotImplementedError

    def union(self, U, V):
        raise NotImplementedError

    def intersection(self, U, V):
        raise NotImplementedError

    def to_json(self, U) -> Any:
        return U


class BallIds(NbhdOps):
    """Integers ``a`` standing for p^a Z_p, or any chain ordered the same way."""

    def subset(self, V, U) -> bool:
        return V >= U

    def union(self, U, V):
        return min(U, V)

    def intersection(self, U, V):
        return max(U, V)


class SingletonIds(NbhdOps):
    def subset(self, V, U) -> bool:
        return True

    def union(self, U, V):
        return U

    def intersection(self, U, V):
        return U


@dataclass(frozen=True)
class StructureDescriptor:
    elevation: int
    kind: BaseKind
    construct: Callable[[Any, MultiIndex], Any] = field(compare=False)
    set_ops: SetOps = field(compare=False)
    nbhd_ops: NbhdOps = field(compare=False)
    params: tuple = ()
    parts: tuple = ()
    nbhd_type: str = ""
    handle_type: str = ""

    def __call__(self, U, gamma) -> Any:
        gamma = MultiIndex(gamma)
        if gamma.e != self.elevation:
            raise ElevationMismatch(
                f"index {tuple(gamma)} has elevation {gamma.e}, structure has {self.elevation}"
            )
        return self.construct(U, gamma)

    def param(self, name: str, default=None):
        return dict(self.params).get(name, default)

    def to_json(self) -> dict:
        d: dict[str, Any] = {"kind": self.kind.value}
        d.update(dict(self.params))
        if self.kind is BaseKind.PRODUCT:
            d["factors"] = [s.to_json() for s in self.parts]
        elif self.kind is BaseKind.INFLATED:
            d["inner"] = self.parts[0].to_json()
        elif self.kind is BaseKind.STACKED:
            d["upper"] = self.parts[0].to_json()
            d["lower"] = self.parts[1].to_json()
        return d


@dataclass(frozen=True)
class IndexWindow:
    neighborhood_indices: tuple
    gamma_lo: MultiIndex
    gamma_hi: MultiIndex

    def __post_init__(self):
        object.__setattr__(self, "neighborhood_indices", tuple(self.neighborhood_indices))
        object.__setattr__(self, "gamma_lo", MultiIndex(self.gamma_lo))
        object.__setattr__(self, "gamma_hi", MultiIndex(self.gamma_hi))
        if not self.neighborhood_indices:
            raise ValueError("window needs at least one neighbourhood")
        if self.gamma_lo.e != self.gamma_hi.e:
            raise ElevationMismatch("window bounds have different elevations")
        if any(a > b for a, b in zip(self.gamma_lo, self.gamma_hi)):
            raise ValueError("gamma_lo must be <= gamma_hi componentwise")

    @property
    def elevation(self) -> int:
        return self.gamma_lo.e

    def indices(self) -> list[MultiIndex]:
        """All indices of the box, sorted increasingly in right-lex order."""
        ranges = [range(a, b + 1) for a, b in zip(self.gamma_lo, self.gamma_hi)]
        out = [MultiIndex(c) for c in itertools.product(*ranges)]
        return sorted(out, key=MultiIndex.key)

    def to_json(self, nbhd_ops: NbhdOps | None = None) -> dict:
        enc = nbhd_ops.to_json if nbhd_ops else (lambda u: u)
        return {
            "U": [enc(u) for u in self.neighborhood_indices],
            "lo": list(self.gamma_lo),
            "hi": list(self.gamma_hi),
        }


class AxiomMode(str, enum.Enum):
    STRICT = "strict"
    COMPATIBLE = "compatible"


@dataclass(frozen=True)
class Counterexample:
    condition: str  # "1", "2", "3", "4", "rigidity"
    witness: tuple  # (U, V, gamma, delta)
    lhs: Any
    rhs: Any
    note: str = ""


@dataclass(frozen=True)
class AxiomReport:
    mode: AxiomMode | None
    window: IndexWindow
    counterexamples: tuple[Counterexample, ...] = ()
    checked: int = 0

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def has(self, condition: str, witness: tuple) -> bool:
        return any(c.condition == condition and c.witness == witness for c in self.counterexamples)

    def to_json(self, s: StructureDescriptor) -> dict:
        enc_u = s.nbhd_ops.to_json
        enc_h = s.set_ops.to_json

        def wit(w):
            U, V, g, d = w
            return {
                "U": enc_u(U),
                "V": None if V is None else enc_u(V),
                "gamma": list(g),
                "delta": None if d is None else list(d),
            }

        return {
            "mode": None if self.mode is None else self.mode.value,
            "passed": self.passed,
            "checked": self.checked,
            "window": self.window.to_json(s.nbhd_ops),
            "counterexamples": [
                {
                    "condition": c.condition,
                    "witness": wit(c.witness),
                    "lhs": _enc_level(c.lhs) if c.condition == "rigidity" else enc_h(c.lhs),
                    "rhs": _enc_level(c.rhs) if c.condition == "rigidity" else enc_h(c.rhs),
                    "note": c.note,
                }
                for c in self.counterexamples
            ],
        }


def _enc_level(v):
    if v is None:
        return None
    if v is TOP:
        return "top"
    return list(v)


class NotConstructible(ValueError):
    pass


def _build(s: StructureDescriptor, U, g):
    try:
        return s(U, g)
    except ElevationMismatch:
        raise
    except Exception as exc:  # constructor-specific failure
        raise NotConstructible(f"cannot construct G_{{{U!r},{tuple(g)}}}: {exc}") from exc


def check_axioms(
    s: StructureDescriptor, w: IndexWindow, mode: AxiomMode = AxiomMode.COMPATIBLE
) -> AxiomReport:
    """Check the level-structure conditions (1)-(4) on a finite window.

    In strict mode condition (3) is the literal identity
    G_{V,g} & G_{U,d} == G_{V,d} for V within U and g <= d.  Compatible mode
    asks only for the nesting G_{U,d} within G_{V,g} when g < d and keeps the
    identity for g == d.  A passing report only speaks for the window.
    """
    mode = AxiomMode(mode)
    if w.elevation != s.elevation:
        raise ElevationMismatch("window and structure elevations differ")
    ops, nb = s.set_ops, s.nbhd_ops
    idx = w.indices()
    Us = w.neighborhood_indices
    table = {(U, g): _build(s, U, g) for U in Us for g in idx}
    bad: list[Counterexample] = []
    checked = 0

    for (U, g), h in table.items():
        checked += 2
        if not ops.contains_identity(h):
            bad.append(Counterexample("1", (U, None, g, None), h, "identity"))
        again = _build(s, U, g)
        if not ops.equal(h, again):
            bad.append(Counterexample("2", (U, None, g, None), h, again))

    for U in Us:
        for V in Us:
            if not nb.subset(V, U):
                continue
            for g in idx:
                for d in idx:
                    if g > d:
                        continue
                    checked += 1
                    GVg, GUd, GVd = table[V, g], table[U, d], table[V, d]
                    if mode is AxiomMode.STRICT or g == d:
                        lhs = ops.intersect(GVg, GUd)
                        if not ops.equal(lhs, GVd):
                            bad.append(Counterexample("3", (U, V, g, d), lhs, GVd))
                    elif not ops.subset(GUd, GVg):
                        bad.append(
                            Counterexample("3", (U, V, g, d), GUd, GVg, "nesting G_{U,d} in G_{V,g} fails")
                        )

    for U in Us:
        for V in Us:
            for g in idx:
                checked += 2
                a, b = table[U, g], table[V, g]
                uu = _build(s, nb.union(U, V), g)
                ii = _build(s, nb.intersection(U, V), g)
                lhs = ops.union(a, b)
                if not ops.equal(lhs, uu):
                    bad.append(Counterexample("4", (U, V, g, None), lhs, uu, "union"))
                lhs = ops.intersect(a, b)
                if not ops.equal(lhs, ii):
                    bad.append(Counterexample("4", (U, V, g, None), lhs, ii, "intersection"))

    return AxiomReport(mode, w, tuple(bad), checked)


def check_rigidity(s: StructureDescriptor, w: IndexWindow) -> AxiomReport:
    """lv(G_{U,g}) == g for every window index.

    Degenerate indices (the level exists but differs from the index, or does
    not exist at all) are reported as rigidity counterexamples with a note.
    """
    if w.elevation != s.elevation:
        raise ElevationMismatch("window and structure elevations differ")
    bad = []
    checked = 0
    for U in w.neighborhood_indices:
        for g in w.indices():
            h = _build(s, U, g)
            lv = s.set_ops.level(h, U)
            checked += 1
            if lv is None or lv is TOP or MultiIndex(lv) != g:
                if lv is None or lv is TOP:
                    note = "level does not exist"
                else:
                    note = f"degenerate index: level {tuple(lv)} != {tuple(g)}"
                bad.append(Counterexample("rigidity", (U, None, g, None), lv, g, note))
    return AxiomReport(None, w, tuple(bad), checked)


# --------------------------------------------------------------------------
# constructors


class _ProductOps(SetOps):
    def __init__(self, a: SetOps, b: SetOps):
        self.a, self.b = a, b

    def equal(self, x, y):
        return self.a.equal(x[0], y[0]) and self.b.equal(x[1], y[1])

    def intersect(self, x, y):
        return (self.a.intersect(x[0], y[0]), self.b.intersect(x[1], y[1]))

    def union(self, x, y):
        # only used by condition (4), where the arguments share the index
        # and the componentwise unions are again rectangles
        return (self.a.union(x[0], y[0]), self.b.union(x[1], y[1]))

    def subset(self, x, y):
        return self.a.subset(x[0], y[0]) and self.b.subset(x[1], y[1])

    def contains_identity(self, h):
        return self.a.contains_identity(h[0]) and self.b.contains_identity(h[1])

    def is_identity(self, h):
        return self.a.is_identity(h[0]) and self.b.is_identity(h[1])

    def is_whole(self, h):
        return self.a.is_whole(h[0]) and self.b.is_whole(h[1])

    def level(self, h, U):
        return self.containment_level(h, U)

    def containment_level(self, h, U):
        return level_min(self.a.containment_level(h[0], U[0]), self.b.containment_level(h[1], U[1]))

    def to_json(self, h):
        return [self.a.to_json(h[0]), self.b.to_json(h[1])]


class _ProductIds(NbhdOps):
    def __init__(self, a: NbhdOps, b: NbhdOps):
        self.a, self.b = a, b

    def subset(self, V, U):
        return self.a.subset(V[0], U[0]) and self.b.subset(V[1], U[1])

    def union(self, U, V):
        return (self.a.union(U[0], V[0]), self.b.union(U[1], V[1]))

    def intersection(self, U, V):
        return (self.a.intersection(U[0], V[0]), self.b.intersection(U[1], V[1]))

    def to_json(self, U):
        return [self.a.to_json(U[0]), self.b.to_json(U[1])]


def product(s1: StructureDescriptor, s2: StructureDescriptor) -> StructureDescriptor:
    """(G x H)_{(U,V),g} = G_{U,g} x H_{V,g}; neighbourhood ids are pairs."""
    if s1.elevation != s2.elevation:
        raise ElevationMismatch("product needs equal elevations; inflate one factor first")

    def construct(UV, g):
        U, V = UV
        return (s1(U, g), s2(V, g))

    return StructureDescriptor(
        elevation=s1.elevation,
        kind=BaseKind.PRODUCT,
        construct=construct,
        set_ops=_ProductOps(s1.set_ops, s2.set_ops),
        nbhd_ops=_ProductIds(s1.nbhd_ops, s2.nbhd_ops),
        parts=(s1, s2),
        nbhd_type=f"({s1.nbhd_type},{s2.nbhd_type})",
        handle_type=f"({s1.handle_type},{s2.handle_type})",
    )


@dataclass(frozen=True)
class Inflated:
    tag: str  # "all" | "inner" | "unit"
    inner: Any = None


class _InflatedOps(SetOps):
    def __init__(self, inner: SetOps, pivot: int):
        self.inner = inner
        self.pivot = pivot

    def _norm(self, h: Inflated) -> Inflated:
        if h.tag == "inner":
            if self.inner.is_whole(h.inner):
                return Inflated("all")
            if self.inner.is_identity(h.inner):
                return Inflated("unit")
        return h

    def equal(self, x, y):
        x, y = self._norm(x), self._norm(y)
        if x.tag != y.tag:
            return False
        return x.tag != "inner" or self.inner.equal(x.inner, y.inner)

    def intersect(self, x, y):
        if x.tag == "all":
            return y
        if y.tag == "all":
            return x
        if x.tag == "unit" or y.tag == "unit":
            return Inflated("unit")
        return Inflated("inner", self.inner.intersect(x.inner, y.inner))

    def union(self, x, y):
        if x.tag == "all" or y.tag == "all":
            return Inflated("all")
        if x.tag == "unit":
            return y
        if y.tag == "unit":
            return x
        return Inflated("inner", self.inner.union(x.inner, y.inner))

    def contains_identity(self, h):
        return h.tag != "inner" or self.inner.contains_identity(h.inner)

    def is_whole(self, h):
        return self._norm(h).tag == "all"

    def is_identity(self, h):
        return self._norm(h).tag == "unit"

    def level(self, h, U):
        h = self._norm(h)
        if h.tag != "inner":
            return None
        lv = self.inner.level(h.inner, U)
        if lv is None or lv is TOP:
            return None
        return MultiIndex(lv) + (self.pivot,)

    def containment_level(self, h, U):
        h = self._norm(h)
        if h.tag == "unit":
            return TOP
        if h.tag == "all":
            return None
        lv = self.inner.containment_level(h.inner, U)
        if lv is None or lv is TOP:
            return None
        return MultiIndex(lv) + (self.pivot,)

    def to_json(self, h):
        h = self._norm(h)
        if h.tag == "inner":
            return {"inner": self.inner.to_json(h.inner)}
        return h.tag


def inflate(s: StructureDescriptor, w: int) -> StructureDescriptor:
    """Append a new most significant index component with pivot ``w``.

    (U, (g, j)) maps to the whole group for j < w, to G_{U,g} for j == w and
    to the identity singleton for j > w.
    """
    w = int(w)

    def construct(U, gj):
        g, j = MultiIndex(gj[:-1]), gj[-1]
        if j < w:
            return Inflated("all")
        if j > w:
            return Inflated("unit")
        return Inflated("inner", s(U, g))

    return StructureDescriptor(
        elevation=s.elevation + 1,
        kind=BaseKind.INFLATED,
        construct=construct,
        set_ops=_InflatedOps(s.set_ops, w),
        nbhd_ops=s.nbhd_ops,
        params=(("pivot", w),),
        parts=(s,),
        nbhd_type=s.nbhd_type,
        handle_type=f"inflated({s.handle_type})",
    )


def stack(upper: StructureDescriptor, lower: StructureDescriptor) -> StructureDescriptor:
    """Level ``upper`` (over X) over the base X' of ``lower`` (X over X').

    Indices are (g, d) with g for ``lower`` and d for ``upper``; d is the more
    significant part, so the combined tuple is g followed by d.
    """
    if upper.nbhd_type != lower.handle_type:
        raise ValueError(
            f"upper structure is indexed by {upper.nbhd_type!r}, "
            f"lower structure produces {lower.handle_type!r}"
        )
    e1, e2 = lower.elevation, upper.elevation

    def construct(U, gd):
        g, d = MultiIndex(gd[:e1]), MultiIndex(gd[e1:])
        return upper(lower(U, g), d)

    return StructureDescriptor(
        elevation=e1 + e2,
        kind=BaseKind.STACKED,
        construct=construct,
        set_ops=upper.set_ops.widened(e1 + e2),
        nbhd_ops=lower.nbhd_ops,
        parts=(upper, lower),
        nbhd_type=lower.nbhd_type,
        handle_type=upper.handle_type,
    )


def strictly_decreasing_bounded(n_terms: int) -> Iterator[tuple[MultiIndex, MultiIndex]]:
    """Consecutive pairs of the sequence (-k, 0), k >= 0, in Z^2."""
    for k in range(n_terms):
        yield MultiIndex((-k, 0)), MultiIndex((-(k + 1), 0))


def minimum_of_bounded(seq: Iterable[int], bound: int) -> int:
    """Minimum of a finite sequence of integers bounded below by ``bound``."""
    items = list(seq)
    if not items:
        raise ValueError("empty sequence")
    if any(x < bound for x in items):
        raise ValueError("sequence is not bounded below by the given bound")
    return min(items)
