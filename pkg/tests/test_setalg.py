import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from levelset import hlf, sampling
from levelset import setalg as sa
from levelset.hlf import FieldElement, FieldShape
from levelset.index_core import MultiIndex
from levelset.parse import parse_set
from levelset.quotient import build_quotient_model
from levelset.sampling import Box

S22 = FieldShape(2, 2)
S23 = FieldShape(2, 3)
BOX = Box(((0, 1),), 0, 3)
MODEL = build_quotient_model(S22, [(0, 1)], -1, 4)
O = sa.Dist(hlf.ring_of_integers(S22))


def P(text, shape=S22):
    return parse_set(shape, text)


def rand_set(rng, rank_one=True):
    """Sets whose basics stay strictly inside MODEL's windows."""
    kind = rng.random()
    S = sampling.rand_ddd(rng, S22, BOX, regions=3)
    if rank_one and kind < 0.3:
        g = sampling.rand_element(rng, S22, BOX, 0.3)
        S = sa.union(S, sa.rank_one(S22, g, 1))
    elif rank_one and kind < 0.45:
        S = sa.difference(S, sa.rank_one(S22, sampling.rand_element(rng, S22, BOX, 0.3), 1))
    return S


@pytest.fixture(scope="module")
def samples():
    rng = random.Random(31)
    return [rand_set(rng) for _ in range(150)]


# -- oracle cross-checks ------------------------------------------------------


def test_normalize_preserves_membership(samples):
    for S in samples:
        N = sa.normalize(S)
        assert MODEL.mask(N) == MODEL.mask(S)
        assert sa.normalize(N) == N


def test_equal_and_subset_match_model(samples):
    rng = random.Random(32)
    for k in range(300):
        A = rng.choice(samples)
        B = rng.choice(samples) if k % 3 else sa.union(A, rng.choice(samples))
        ma, mb = MODEL.mask(A), MODEL.mask(B)
        assert sa.equal(A, B) == (ma == mb)
        assert sa.subset(A, B) == (ma & ~mb == 0)
        assert MODEL.mask(sa.intersection(A, B)) == ma & mb
        assert MODEL.mask(sa.difference(A, B)) == ma & ~mb
        assert sa.is_empty(sa.difference(A, B)) == (ma & ~mb == 0)


def test_member_matches_model(samples):
    pts = MODEL.points()
    rng = random.Random(33)
    for S in samples[:40]:
        m = MODEL.mask(S)
        for k in rng.sample(range(len(pts)), 40):
            assert sa.member(pts[k], S) == bool(m >> k & 1)


def test_rank_one_member_examples():
    R = sa.rank_one(S22, 0, 1)
    assert sa.member(FieldElement.monomial(S22, 1, (1,)), R)
    assert not sa.member(FieldElement.constant(S22, 1), R)
    assert sa.member(FieldElement.monomial(S22, Fraction(1, 2), (1,)), R)


# -- levels -------------------------------------------------------------------


def test_level_examples():
    assert sa.level(sa.rank_one(S22, 0, 3)).level == MultiIndex((3,))
    assert sa.level(sa.dist(S22, 0, 4, (-2,))).level == MultiIndex((-2,))
    # 5 + O_F is O_F itself, so this union is not disjoint and normalizes to O_F
    U = P("union([0] + p^3 t^2 O, [5] + p^0 t^0 O)")
    assert sa.equal(U, O) and sa.level(U).level == MultiIndex((0,))
    # a genuinely disjoint pair of levels 2 and 0
    D = P("union([1/2] + p^3 t^2 O, [0] + p^0 t^0 O)")
    assert len(sa.components(D)) == 2 and sa.level(D).level == MultiIndex((0,))
    assert isinstance(sa.level(sa.Empty(S22)), sa.NoDistinguishedSubset)


@given(st.integers(0, 10**6))
def test_level_translation_invariant(seed):
    rng = random.Random(seed)
    S = rand_set(rng)
    g = sampling.rand_element(rng, S22, Box(((-1, 2),), -1, 3))
    assert sa.level(sa.translate(S, g)).to_json() == sa.level(S).to_json()
    assert sa.uniform_level(sa.translate(S, g)).to_json() == sa.uniform_level(S).to_json()


def test_level_is_minimal_on_model(samples):
    # no distinguished set of lower level inside S, and one of the stated level exists
    for S in samples[:60]:
        lv = sa.level(S)
        if lv.level is None:
            continue
        m = MODEL.mask(S)
        lower = [
            hlf.dset(S22, 0, i, (j,)) for i in range(0, 3) for j in range(0, 2) if (j,) < tuple(lv.level)
        ]
        for D in lower:
            for x in MODEL.elements_of(m)[:8]:
                assert not sa.subset(sa.Dist(D.translated(x)), S)


def test_uniform_examples():
    A = P("union([1/2] + p^0 t^1 O, [0] + p^0 t^0 O)")
    assert sa.uniform_level(A) == sa.NonUniform(MultiIndex((0,)))
    assert sa.uniform_level(sa.rank_one(S22, 0, 2)) == sa.Uniform(MultiIndex((2,)))
    halves = P("union([0] + p^1 t^0 O, [1] + p^1 t^0 O)")
    assert sa.uniform_level(halves) == sa.Uniform(MultiIndex((0,)))
    assert sa.equal(halves, O)
    assert isinstance(sa.uniform_level(P("diff([0]+p^0 t^0 O, [0] + t^1 OO)")), sa.Uniform)
    assert isinstance(sa.uniform_level(sa.Empty(S22)), sa.NoDistinguishedSubset)


def test_uniform_witnesses_on_model(samples):
    rng = random.Random(34)
    hits = 0
    for S in samples:
        r = sa.uniform_level(S)
        if not isinstance(r, sa.Uniform):
            continue
        pts = MODEL.elements_of(MODEL.mask(S))
        for x in rng.sample(pts, min(len(pts), 100 // 10)):
            D = sa.uniform_witness(S, x)
            assert D is not None and hlf.member(x, D)
            assert sa.subset(sa.Dist(D), S) and hlf.level(D) == r.level
            hits += 1
    assert hits >= 100


def test_non_uniform_points_have_no_witness(samples):
    found = 0
    for S in samples:
        if isinstance(sa.uniform_level(S), sa.NonUniform):
            pts = sa.non_uniform_points(S)
            assert pts
            for x in pts:
                assert sa.member(x, S)
                assert sa.uniform_witness(S, x) is None
            found += 1
    assert found > 5


def test_refine_to_level(samples):
    for S in samples[:60]:
        r = sa.uniform_level(S)
        if not isinstance(r, sa.Uniform):
            continue
        for bump in (0, 1, 2):
            delta = MultiIndex((r.level[0] + bump,))
            D = sa.refine_to_level(S, delta)
            assert hlf.level(D) == delta and sa.subset(sa.Dist(D), S)


def test_classify():
    assert isinstance(sa.classify(sa.Empty(S22)), sa.TypeS)
    assert isinstance(sa.classify(P("diff([0]+p^0 t^0 O, [0]+p^0 t^0 O)")), sa.TypeS)
    r = sa.classify(P("diff([0]+p^0 t^0 O, [0]+p^1 t^0 O)"))
    assert isinstance(r, sa.HasLevel) and r.level == MultiIndex((0,))


def test_intersection_level_examples():
    r = sa.check_intersection_level(O, P("[3] + p^1 t^0 O"))
    assert (r.level_a, r.level_b, r.level_ab) == ((0,), (0,), (0,)) and r.passed
    r = sa.check_intersection_level(sa.rank_one(S22, 0, 1), O)
    assert (r.level_a, r.level_b, r.level_ab) == ((1,), (0,), (1,)) and r.passed
    with pytest.raises(sa.EmptyIntersection):
        sa.check_intersection_level(P("[0]+p^1 t^0 O"), P("[1]+p^1 t^0 O"))


def test_three_dim_sets():
    A = P("union([0] + p^0 t2^0 t3^0 O, [1*t3^-1] + p^1 t2^2 t3^-1 O)", S23)
    assert sa.level(A).level == MultiIndex((2, -1))
    M = build_quotient_model(S23, [(0, 2), (-1, 0)], 0, 2)
    assert M.mask(sa.normalize(A)) == M.mask(A)


# -- serialization --------------------------------------------------------------


@given(st.integers(0, 10**6))
def test_json_round_trip(seed):
    S = rand_set(random.Random(seed))
    assert sa.from_json(S22, sa.to_json(S)) == S


def test_rank_one_needs_n2():
    with pytest.raises(ValueError):
        sa.rank_one(S23, 0, 1)
