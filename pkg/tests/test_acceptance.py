"""Acceptance gate: one test per criterion, each with its runtime budget.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import io
import itertools
import json
import random
from contextlib import redirect_stderr, redirect_stdout
from fractions import Fraction
from pathlib import Path

from levelset import cli, cover, hlf, measure, sampling, structures, zlevels
from levelset import setalg as sa
from levelset.hlf import FieldElement, FieldShape
from levelset.index_core import (
    AxiomMode,
    IndexWindow,
    MultiIndex,
    check_axioms,
    check_rigidity,
    inflate,
    product,
)
from levelset.measure import MeasureValue
from levelset.quotient import UnsafeQuery, build_quotient_model
from levelset.sampling import Box

GOLDEN = Path(__file__).parent / "golden"


def _rat(rng):
    return Fraction(rng.randint(-30, 30), rng.choice([1, 1, 2, 3, 4, 5, 9, 25]))


def _rand_alpha(rng, shape, lo=-2, hi=2):
    terms = {}
    box = Box.square(shape.width, lo, hi)
    for e in box.exponents():
        if rng.random() < 0.3:
            terms[e] = _rat(rng)
    return FieldElement.make(shape, terms)


# 1 -------------------------------------------------------------------------


def test_c01_measure_formula(criterion):
    rng = random.Random(101)
    with criterion(1, "mu(a + p^i t^g O_F) = p^-i X^g; mu(O_F) = 1", 1.0):
        for _ in range(200):
            shape = FieldShape(rng.choice([2, 3, 5]), rng.choice([2, 3]))
            i1 = rng.randint(-4, 4)
            tail = tuple(rng.randint(-3, 3) for _ in range(shape.width))
            D = hlf.dset(shape, _rand_alpha(rng, shape), i1, tail)
            want = MeasureValue.make(shape.width, {tail: Fraction(shape.p) ** (-i1)})
            assert measure.mu_dist(D) == want
        for p, n in itertools.product([2, 3, 5], [2, 3]):
            shape = FieldShape(p, n)
            one = MeasureValue.make(shape.width, {shape.zero_exps(): 1})
            assert measure.mu_set(sa.Dist(hlf.ring_of_integers(shape))) == one


# 2 -------------------------------------------------------------------------


def test_c02_additivity_and_invariance(criterion):
    rng = random.Random(202)
    with criterion(2, "finite additivity and translation invariance", 5.0):
        for k in range(200):
            shape = FieldShape(rng.choice([2, 3]), rng.choice([2, 3]))
            box = Box.square(shape.width, -1, 1, 0, 3)
            A = sampling.rand_ddd(rng, shape, box)
            B = sampling.rand_ddd(rng, shape, box) if k % 3 else sampling.rand_ddd(rng, shape, box) | A
            lhs = measure.mu(measure.to_ddd(sa.union(A, B))) + measure.mu(measure.to_ddd(sa.intersection(A, B)))
            rhs = measure.mu(measure.to_ddd(A)) + measure.mu(measure.to_ddd(B))
            assert lhs == rhs
        for _ in range(200):
            shape = FieldShape(rng.choice([2, 3]), rng.choice([2, 3]))
            box = Box.square(shape.width, -1, 1, 0, 3)
            A = measure.to_ddd(sampling.rand_ddd(rng, shape, box))
            g = _rand_alpha(rng, shape)
            assert measure.mu(A.translated(g)) == measure.mu(A)


# 3 -------------------------------------------------------------------------


def test_c03_haar_lift(criterion):
    rng = random.Random(303)
    with criterion(3, "mu(t^j pi^-1(U)) = X^j mu_p(U)", 1.0):
        for _ in range(100):
            p = rng.choice([2, 3, 5, 7])
            r = measure.haar_lift_check(p, _rat(rng), rng.randint(-3, 4), rng.randint(-4, 4))
            assert r.holds, r.to_json()


# 4 -------------------------------------------------------------------------


def test_c04_trichotomy(criterion):
    rng = random.Random(404)
    with criterion(4, "intersection trichotomy against the quotient model", 30.0):
        for p, box in ((2, Box(((0, 1),), 0, 3)), (3, Box(((0, 1),), 0, 2))):
            shape = FieldShape(p, 2)
            M = build_quotient_model(shape, box.t_window, box.i_lo, box.i_hi)
            for _ in range(5000):
                a, b = sampling.rand_dset(rng, shape, box), sampling.rand_dset(rng, shape, box)
                r = hlf.intersect(a, b)
                ma, mb = M.dist_mask(a), M.dist_mask(b)
                if r is None:
                    assert ma & mb == 0
                else:
                    assert r in (hlf.canonicalize(a), hlf.canonicalize(b))
                    assert M.dist_mask(r) == ma & mb


# 5 -------------------------------------------------------------------------


def test_c05_axiom_discrepancy(criterion):
    with criterion(5, "strict condition 3 counterexample; compatible mode passes", 1.0):
        s = structures.field_structure(FieldShape(2, 2))
        w = IndexWindow((0, 1), MultiIndex((-1,)), MultiIndex((1,)))
        strict = check_axioms(s, w, AxiomMode.STRICT)
        assert not strict.passed
        assert strict.has("3", (0, 1, MultiIndex((0,)), MultiIndex((1,))))
        assert check_axioms(s, w, AxiomMode.COMPATIBLE).passed


# 6 -------------------------------------------------------------------------


def test_c06_rigidity(criterion):
    with criterion(6, "rigidity of field structures; Z structure has level -1 at g >= 0", 1.0):
        s2 = structures.field_structure(FieldShape(2, 2))
        w2 = IndexWindow((-1, 0, 1), MultiIndex((-2,)), MultiIndex((2,)))
        r2 = check_rigidity(s2, w2)
        assert r2.passed and r2.checked == 15
        s3 = structures.field_structure(FieldShape(3, 3))
        w3 = IndexWindow((-1, 0, 1), MultiIndex((-2, -2)), MultiIndex((2, 2)))
        r3 = check_rigidity(s3, w3)
        assert r3.passed and r3.checked == 75
        z = zlevels.StrideStructure(1).descriptor()
        rz = check_rigidity(z, IndexWindow((zlevels.POINT,), MultiIndex((-4,)), MultiIndex((3,))))
        bad = {tuple(c.witness[2]): c.lhs for c in rz.counterexamples}
        assert set(bad) == {(g,) for g in range(0, 4)}
        assert all(tuple(lv) == (-1,) for lv in bad.values())


# 7 -------------------------------------------------------------------------


def _model_covered(inst, M):
    tm = M.mask(sa.Dist(inst.target))
    acc = 0
    for m in inst.family:
        acc |= M.mask(m)
    return tm & ~acc == 0


def test_c07_cover_engine_vs_oracle(criterion):
    rng = random.Random(707)
    with criterion(7, "cover verdicts against exhaustive quotient enumeration", 30.0):
        seen = set()
        for k in range(100):
            shape = FieldShape(rng.choice([2, 3]), 2 if k % 4 else 3)
            box = Box.square(shape.width, -1, 1, 0, 2)
            inst = sampling.rand_cover_instance(rng, shape, box, depth=3)
            rep = cover.covers(inst)
            M = cover.auto_model(inst)
            assert rep.covered == _model_covered(inst, M)
            seen.add(rep.covered)
            if rep.covered:
                chosen = [inst.family[i] for i in rep.subcover]
                assert sa.subset(sa.Dist(inst.target), sa.union(*chosen))
            else:
                x = rep.witness
                assert hlf.member(x, inst.target)
                assert not any(sa.member(x, m) for m in inst.family)
        assert seen == {True, False}


# 8 -------------------------------------------------------------------------


def test_c08_negative_instances(criterion):
    with criterion(8, "no finite subcover for the disjoint family; A_ab is not uniform", 5.0):
        shape = FieldShape(2, 2)
        for k in range(1, 51):
            inst, rep = cover.demo_no_subcover(shape, 0, k)
            assert not rep.covered
            assert hlf.member(rep.witness, inst.target)
            assert not any(sa.member(rep.witness, m) for m in inst.family)
        A = sa.union(sa.dist(shape, Fraction(1, 2), 0, (1,)), sa.dist(shape, 0, 0, (0,)))
        inst = cover.CoverInstance(hlf.ring_of_integers(shape), MultiIndex((0,)), (A,))
        rep = cover.validate_uniform(inst)
        assert not rep.passed and rep.failing == [0]


# 9 -------------------------------------------------------------------------


def _rand_overlapping(rng, shape, box):
    A = sampling.rand_ddd(rng, shape, box, regions=3)
    comps = sa.components(A)
    while not comps:
        A = sampling.rand_ddd(rng, shape, box, regions=3)
        comps = sa.components(A)
    base = sa.outer(rng.choice(comps))
    pieces = [sa.Dist(sampling.rand_sub_dset(rng, base, 2))]
    if rng.random() < 0.5:
        pieces.append(sa.Dist(sampling.rand_dset(rng, shape, box)))
    return A, sa.union(*pieces)


def test_c09_level_propositions(criterion):
    rng = random.Random(909)
    with criterion(9, "lv(A & B) >= max(lv A, lv B), equality when uniform; levelsize", 30.0):
        done = both = 0
        while done < 500:
            shape = FieldShape(rng.choice([2, 3]), rng.choice([2, 3]))
            box = Box.square(shape.width, -1, 1, 0, 2)
            A, B = _rand_overlapping(rng, shape, box)
            if sa.is_empty(sa.intersection(A, B)):
                continue
            r = sa.check_intersection_level(A, B)
            assert r.passed, r.to_json()
            done += 1
            both += r.uniform_both
        assert both > 50
        checked = spot = 0
        M2 = build_quotient_model(FieldShape(2, 2), [(-1, 1)], 0, 4)
        while checked < 500:
            shape = FieldShape(rng.choice([2, 3]), 2)
            box = Box.square(1, -1, 1, 0, 2)
            A, B = sampling.rand_ddd(rng, shape, box), sampling.rand_ddd(rng, shape, box)
            la, lb = sa.level(A), sa.level(B)
            if la.level is None or lb.level is None or la.level == lb.level:
                continue
            if la.level > lb.level:
                A, B = B, A
            g = sampling.rand_element(rng, shape, box)
            Bg = sa.translate(B, g)
            assert not sa.subset(A, Bg)
            if shape.p == 2:
                try:
                    assert M2.mask(A) & ~M2.mask(Bg) != 0
                    spot += 1
                except UnsafeQuery:
                    pass
            checked += 1
        assert spot > 50


# 10 ------------------------------------------------------------------------


def test_c10_sublevel_and_union(criterion):
    rng = random.Random(1010)
    with criterion(10, "mixed-level subcovers; K1 u K2 covered at min level", 30.0):
        for k in range(100):
            shape = FieldShape(rng.choice([2, 3]), 2 if k % 3 else 3)
            box = Box.square(shape.width, -1, 1, 0, 2)
            inst = sampling.rand_mixed_instance(rng, shape, box)
            rep = cover.find_subcover(inst)
            assert rep.covered
            chosen = [inst.family[i] for i in rep.subcover]
            assert sa.subset(sa.Dist(inst.target), sa.union(*chosen))
        made = 0
        while made < 40:
            shape = FieldShape(rng.choice([2, 3]), 2)
            box = Box.square(1, -1, 1, 0, 2)
            i1 = sampling.rand_cover_instance(rng, shape, box, drop=0.0)
            i2 = sampling.rand_cover_instance(rng, shape, box, drop=0.0)
            g = sampling.rand_element(rng, shape, box)
            t2 = i2.target.translated(g)
            fam2 = tuple(sa.translate(m, g) for m in i2.family)
            assert cover.covers(i1).covered
            assert cover.covers(cover.CoverInstance(t2, i2.gamma, fam2)).covered
            rep = cover.cover_union([i1.target, t2], list(i1.family) + list(fam2))
            assert rep.covered
            made += 1


# 11 ------------------------------------------------------------------------


def _product_oracle(t1, t2, rects):
    M1 = cover.auto_model(cover.CoverInstance(t1, hlf.level(t1), tuple(u for u, _ in rects)))
    M2 = cover.auto_model(cover.CoverInstance(t2, hlf.level(t2), tuple(v for _, v in rects)))
    um = [M1.mask(u) for u, _ in rects]
    vm = [M2.mask(v) for _, v in rects]
    for x in range(M1.size):
        if not M1.mask(sa.Dist(t1)) >> x & 1:
            continue
        need = M2.mask(sa.Dist(t2))
        for a, b in zip(um, vm):
            if a >> x & 1:
                need &= ~b
        if need:
            return False
    return True


def test_c11_products(criterion):
    rng = random.Random(1111)
    with criterion(11, "product rigidity; product covers vs projections", 10.0):
        f2 = structures.field_structure(FieldShape(2, 2))
        f3 = structures.field_structure(FieldShape(3, 2))
        for a, b in ((f2, f2), (f2, f3)):
            s = product(a, b)
            w = IndexWindow(((0, 0), (1, 0), (0, 1)), MultiIndex((-1,)), MultiIndex((1,)))
            assert check_rigidity(s, w).passed
        shape = FieldShape(2, 2)
        box = Box.square(1, 0, 0, 0, 2)
        for k in range(50):
            c1 = sampling.rand_cover_instance(rng, shape, box, depth=2, drop=0.25)
            c2 = sampling.rand_cover_instance(rng, shape, box, depth=2, drop=0.25)
            if k % 2 == 0:
                rects = [(u, v) for u in c1.family for v in c2.family]
                rep = cover.product_covers(c1.target, c2.target, rects)
                assert rep.covered == (cover.covers(c1).covered and cover.covers(c2).covered)
            else:
                rects = [(rng.choice(c1.family), rng.choice(c2.family)) for _ in range(4)]
                rep = cover.product_covers(c1.target, c2.target, rects)
                p1, p2 = cover.projections_cover(c1.target, c2.target, rects)
                if rep.covered:
                    assert p1 and p2
            assert rep.covered == _product_oracle(c1.target, c2.target, rects)


# 12 ------------------------------------------------------------------------


def test_c12_fip_duality(criterion):
    rng = random.Random(1212)
    with criterion(12, "finite-intersection duality", 10.0):
        for k in range(100):
            shape = FieldShape(rng.choice([2, 3]), 2)
            box = Box.square(1, -1, 1, 0, 2)
            inst = sampling.rand_cover_instance(rng, shape, box, depth=2, drop=0.3)
            r = cover.fip_dual(inst)
            assert r.holds, r.to_json()


# 13 ------------------------------------------------------------------------


def test_c13_discrete_levels(criterion):
    with criterion(13, "levels of evens, primes, type L prefixes and twin-prime windows", 10.0):
        s1 = zlevels.StrideStructure(1)
        evens = zlevels.ZWindowSet((0, 100), tuple(range(0, 101, 2)))
        assert zlevels.z_level(s1, evens) == -1 and zlevels.z_uniform(s1, evens)
        primes = zlevels.primes_window(0, 100)
        assert zlevels.z_level(s1, primes) == -2 and not zlevels.z_uniform(s1, primes)
        for m in range(1, 21):
            assert zlevels.z_level(s1, zlevels.typeL_prefix(m)) == -m
        for k in range(5, 1001):
            assert zlevels.twin_level(k, 10_000) == 2
        assert zlevels.twin_level(1, 10) == 3
        assert "3, 5, 7" in zlevels.twin_report(1, 10).note


# 14 ------------------------------------------------------------------------


def _induced_member(h, c: Fraction, p: int) -> bool:
    if h.kind == "zero":
        return c == 0
    if h.kind == "all":
        return True
    return c == 0 or hlf.vp(c, p) >= h.i


def test_c14_induced_inflate_stack(criterion):
    rng = random.Random(1414)
    with criterion(14, "induced table, inflated axioms, stacked 3-D structure", 5.0):
        shape = FieldShape(3, 2)
        s = hlf.induced_base_structure(shape)
        samples = [Fraction(0)] + [_rat(rng) for _ in range(40)] + [Fraction(3) ** k for k in range(-3, 4)]
        kinds = set()
        for i in range(-2, 3):
            for j in range(-2, 3):
                h = s(i, (j,))
                kinds.add(h.kind)
                D = hlf.dset(shape, 0, i, (j,))
                for c in samples:
                    x = FieldElement.constant(shape, c)
                    assert _induced_member(h, c, 3) == hlf.member(x, D)
        assert kinds == {"zero", "ball", "all"}
        base = structures.field_structure(FieldShape(2, 2))
        w = IndexWindow((0, 1), MultiIndex((-1,)), MultiIndex((1,)))
        for pivot in (-1, 0, 1):
            t = inflate(base, pivot)
            wt = IndexWindow((0, 1), MultiIndex((-1,) * t.elevation), MultiIndex((1,) * t.elevation))
            assert check_axioms(t, wt, AxiomMode.COMPATIBLE).passed
        assert check_axioms(base, w, AxiomMode.COMPATIBLE).passed
        st = structures.stacked_three_dim(2)
        bi = structures.field_structure(FieldShape(2, 3))
        for a in (0, 1, 2):
            for g in itertools.product(range(-1, 2), repeat=2):
                g = MultiIndex(g)
                assert sa.equal(st(a, g), bi(a, g))


# 15 ------------------------------------------------------------------------


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli.main(argv)
    return code, out.getvalue()


def test_c15_cli_golden(criterion):
    with criterion(15, "CLI golden files, determinism, exit codes", 10.0):
        cases = sorted(GOLDEN.glob("*.json"))
        assert cases
        names = set()
        for path in cases:
            case = json.loads(path.read_text())
            code, out = _run(case["argv"])
            code2, out2 = _run(case["argv"])
            assert (code, out) == (code2, out2), path.name
            assert code == case["exit"], path.name
            if case["exit"] != 2:
                assert json.loads(out) == case["stdout"], path.name
            names.add(case["argv"][0])
        commands = set(cli.build_parser()._subparsers._group_actions[0].choices)
        assert commands <= names, sorted(commands - names)
