import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from levelset import cover, hlf, sampling
from levelset import setalg as sa
from levelset.cover import CoverError, CoverInstance
from levelset.hlf import FieldElement, FieldShape
from levelset.index_core import MultiIndex
from levelset.parse import parse_set
from levelset.sampling import Box

S22 = FieldShape(2, 2)
O = hlf.ring_of_integers(S22)
G0 = MultiIndex((0,))


def fam(*texts, shape=S22):
    return tuple(parse_set(shape, t) for t in texts)


def test_halves_cover():
    rep = cover.covers(CoverInstance(O, G0, fam("[0]+p^1 t^0 O", "[1]+p^1 t^0 O")))
    assert rep.covered and rep.subcover == (0, 1) and rep.depth_used == 1
    assert rep.to_json() == {"verdict": "covered", "subcover": [0, 1], "depth": 1}


def test_three_piece_cover():
    rep = cover.covers(CoverInstance(O, G0, fam("[0]+p^1 t^0 O", "[1]+p^2 t^0 O", "[3]+p^2 t^0 O")))
    assert rep.covered and rep.subcover == (0, 1, 2) and rep.depth_used == 2


def test_single_half_misses_one():
    rep = cover.covers(CoverInstance(O, G0, fam("[0]+p^1 t^0 O")))
    assert not rep.covered
    assert rep.witness == FieldElement.constant(S22, 1)


def test_thin_family_is_flagged():
    family = tuple(sa.dist(S22, c, 0, (1,)) for c in range(3))
    rep = cover.covers(CoverInstance(O, G0, family))
    assert not rep.covered and rep.hypothesis_met is False
    assert hlf.member(rep.witness, O)
    assert not any(sa.member(rep.witness, m) for m in family)


def test_redundant_members_are_pruned():
    rep = cover.covers(CoverInstance(O, G0, fam("[0]+p^1 t^0 O", "[0]+p^0 t^0 O", "[1]+p^1 t^0 O")))
    assert rep.covered and rep.subcover == (1,)


def test_hypothesis_errors():
    with pytest.raises(CoverError):
        cover.covers(CoverInstance(O, MultiIndex((1,)), fam("[0]+p^1 t^0 O")))
    bad = fam("union([1/2] + p^0 t^1 O, [0] + p^0 t^0 O)")
    with pytest.raises(CoverError):
        cover.covers(CoverInstance(O, G0, bad))
    assert not cover.validate_uniform(CoverInstance(O, G0, bad)).passed


def test_instance_json_round_trip():
    inst = CoverInstance(O, G0, fam("[0]+p^1 t^0 O", "union([1]+p^2 t^0 O, [3]+p^2 t^0 O)"))
    assert CoverInstance.from_json(S22, inst.to_json()) == inst


def test_find_subcover_mixed_levels():
    T = hlf.dset(S22, 0, 1, (0,))
    family = fam("[0]+p^0 t^-1 O", "[2]+p^2 t^0 O")
    rep = cover.find_subcover(CoverInstance(T, G0, family))
    assert rep.covered and rep.subcover == (0,)
    with pytest.raises(CoverError):
        cover.find_subcover(CoverInstance(T, G0, fam("[0]+p^0 t^1 O")))


def test_demo_no_subcover_three_dims():
    inst, rep = cover.demo_no_subcover(FieldShape(3, 3), 1, 4)
    assert not rep.covered and inst.gamma == MultiIndex((2, 0))
    assert hlf.member(rep.witness, inst.target)


def test_fip_examples():
    ok = cover.fip_dual(CoverInstance(O, G0, fam("[0]+p^1 t^0 O", "[1]+p^1 t^0 O")))
    assert ok.covered and not ok.fip and ok.total_intersection_empty and ok.holds
    miss = cover.fip_dual(CoverInstance(O, G0, fam("[0]+p^1 t^0 O")))
    assert not miss.covered and miss.fip and not miss.total_intersection_empty and miss.holds


@given(st.integers(0, 10**6))
def test_refining_members_keeps_cover(seed):
    rng = random.Random(seed)
    inst = sampling.rand_cover_instance(rng, S22, Box.square(1, -1, 1, 0, 2), drop=0.0)
    assert cover.covers(inst).covered
    finer = []
    for m in inst.family:
        for c in sa.components(m):
            finer.extend(sa.Dist(d) for d in hlf.coset_reps(sa.outer(c), rng.randint(1, 2)))
    refined = CoverInstance(inst.target, inst.gamma, tuple(finer))
    assert cover.covers(refined).covered


@given(st.integers(0, 10**6))
def test_not_covered_witness_is_valid(seed):
    rng = random.Random(seed)
    inst = sampling.rand_cover_instance(rng, FieldShape(3, 3), Box.square(2, -1, 1, 0, 2), drop=0.4)
    rep = cover.covers(inst)
    if rep.covered:
        assert sa.subset(sa.Dist(inst.target), sa.union(*[inst.family[i] for i in rep.subcover]))
    else:
        assert hlf.member(rep.witness, inst.target)
        assert not any(sa.member(rep.witness, m) for m in inst.family)


def test_product_cover_examples():
    halves = [hlf.dset(S22, c, 1, (0,)) for c in (0, 1)]
    rects = [(sa.Dist(u), sa.Dist(v)) for u in halves for v in halves]
    assert cover.product_covers(O, O, rects).covered
    rep = cover.product_covers(O, O, rects[:3])
    assert not rep.covered
    x, y = rep.witness
    assert not any(sa.member(x, u) and sa.member(y, v) for u, v in rects[:3])
    # an L-shaped family: both projections cover, the product does not
    L = [(sa.Dist(halves[0]), sa.Dist(O)), (sa.Dist(O), sa.Dist(halves[0]))]
    assert cover.projections_cover(O, O, L) == (True, True)
    assert not cover.product_covers(O, O, L).covered


def test_cover_union():
    K1, K2 = hlf.dset(S22, 0, 1, (0,)), hlf.dset(S22, Fraction(1, 2), 0, (1,))
    family = [sa.dist(S22, 0, 2, (0,)), sa.dist(S22, 2, 2, (0,)), sa.Dist(K2)]
    assert cover.cover_union([K1, K2], family).covered
    assert not cover.cover_union([K1, K2], family[:2]).covered
