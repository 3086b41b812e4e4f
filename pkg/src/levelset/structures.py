"""Concrete level structures on fields and their JSON descriptors."""

from __future__ import annotations

from . import hlf
from . import setalg as sa
from .hlf import FieldShape
from .index_core import (
    BallIds,
    BaseKind,
    MultiIndex,
    NbhdOps,
    SetOps,
    StructureDescriptor,
    inflate,
    product,
    stack,
)


class FieldSetOps(SetOps):
    """Symbolic subsets of F; levels report the last ``level_width`` entries."""

    def __init__(self, level_width: int):
        self.level_width = level_width

    def equal(self, a, b):
        return sa.equal(a, b)

    def intersect(self, a, b):
        return sa.intersection(a, b)

    def union(self, a, b):
        return sa.union(a, b)

    def subset(self, a, b):
        return sa.subset(a, b)

    def contains_identity(self, h):
        return sa.member(hlf.FieldElement.zero(h.shape), h)

    def level(self, h, U):
        lv = sa.level(h)
        if not isinstance(lv, sa.HasLevel):
            return None
        return MultiIndex(tuple(lv.level)[len(lv.level) - self.level_width :])

    def widened(self, width: int) -> "FieldSetOps":
        return FieldSetOps(width)

    def to_json(self, h):
        return sa.to_json(h)


def _dist_type(shape: FieldShape) -> str:
    return f"dist(p={shape.p},n={shape.n})"


def field_structure(shape: FieldShape) -> StructureDescriptor:
    """F levelled over Q_p: (p^a Z_p, g) maps to p^a t^g O_F."""

    def construct(a, g):
        return sa.dist(shape, 0, int(a), tuple(g))

    return StructureDescriptor(
        elevation=shape.width,
        kind=BaseKind.PADIC_BALLS,
        construct=construct,
        set_ops=FieldSetOps(shape.width),
        nbhd_ops=BallIds(),
        params=(("n", shape.n), ("p", shape.p)),
        nbhd_type="padic_ball",
        handle_type=_dist_type(shape),
    )


class _BallOps(SetOps):
    # handles are integers a standing for p^a Z_p
    def equal(self, a, b):
        return a == b

    def intersect(self, a, b):
        return max(a, b)

    def union(self, a, b):
        return min(a, b)

    def subset(self, a, b):
        return a >= b

    def contains_identity(self, h):
        return True

    def level(self, h, U):
        return MultiIndex(())


def padic_self(p: int) -> StructureDescriptor:
    """Q_p levelled over itself with elevation 0."""

    def construct(a, g):
        return int(a)

    return StructureDescriptor(
        elevation=0,
        kind=BaseKind.PADIC_SELF,
        construct=construct,
        set_ops=_BallOps(),
        nbhd_ops=BallIds(),
        params=(("p", p),),
        nbhd_type="padic_ball",
        handle_type="padic_ball",
    )


class _DistIds(NbhdOps):
    """Zero-translate distinguished sets of a smaller field used as a base."""

    def subset(self, V, U):
        return sa.subset(V, U)

    def union(self, U, V):
        return sa.union(U, V)

    def intersection(self, U, V):
        return sa.intersection(U, V)

    def to_json(self, U):
        return sa.to_json(U)


def field_over_field(p: int) -> StructureDescriptor:
    """Q_p((t2))((t3)) levelled over Q_p((t2)) with elevation 1.

    The base neighbourhood p^i t2^j O is sent, at index k, to p^i t2^j t3^k O_F.
    """
    small, big = FieldShape(p, 2), FieldShape(p, 3)

    def construct(U, g):
        if not isinstance(U, sa.Dist) or U.shape != small or not U.d.translate.is_zero():
            raise ValueError("base neighbourhoods are p^i t2^j O of Q_p((t2))")
        return sa.dist(big, 0, U.d.i1, (U.d.tail[0], g[0]))

    return StructureDescriptor(
        elevation=1,
        kind=BaseKind.FIELD_OVER_FIELD,
        construct=construct,
        set_ops=FieldSetOps(1),
        nbhd_ops=_DistIds(),
        params=(("p", p),),
        nbhd_type=_dist_type(small),
        handle_type=_dist_type(big),
    )


def stacked_three_dim(p: int) -> StructureDescriptor:
    return stack(field_over_field(p), field_structure(FieldShape(p, 2)))


def descriptor_from_json(data: dict) -> StructureDescriptor:
    kind = data["kind"]
    if kind == BaseKind.PADIC_BALLS.value:
        return field_structure(FieldShape(int(data["p"]), int(data["n"])))
    if kind == BaseKind.PADIC_SELF.value:
        return padic_self(int(data["p"]))
    if kind == BaseKind.FIELD_OVER_FIELD.value:
        return field_over_field(int(data["p"]))
    if kind == BaseKind.INDUCED_BASE_FIELD.value:
        return hlf.induced_base_structure(FieldShape(int(data["p"]), 2))
    if kind == BaseKind.SINGLETON.value:
        from .zlevels import StrideStructure

        return StrideStructure(int(data.get("d", 1))).descriptor()
    if kind == BaseKind.PRODUCT.value:
        a, b = data["factors"]
        return product(descriptor_from_json(a), descriptor_from_json(b))
    if kind == BaseKind.INFLATED.value:
        return inflate(descriptor_from_json(data["inner"]), int(data["pivot"]))
    if kind == BaseKind.STACKED.value:
        return stack(descriptor_from_json(data["upper"]), descriptor_from_json(data["lower"]))
    raise ValueError(f"unknown structure kind {kind!r}")
