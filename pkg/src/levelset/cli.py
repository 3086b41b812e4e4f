"""levelset command line.

Every subcommand prints one JSON object on stdout (sorted keys).  Exit codes:
0 for a positive or plain computed result, 1 for a computed negative verdict,
2 for usage, parse and hypothesis errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import cover, hlf, measure
from . import setalg as sa
from . import structures, zlevels
from .hlf import FieldShape
from .index_core import (
    AxiomMode,
    IndexWindow,
    MultiIndex,
    check_axioms,
    check_rigidity,
    inflate,
    product,
)
from .parse import ParseError, format_dset, format_set, parse_dset, parse_field, parse_set
from .quotient import UnsafeQuery


class UsageError(ValueError):
    pass


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in str(text).split(",") if x.strip())


def _shape(args) -> FieldShape:
    return parse_field(args.field)


def _json_in(args):
    if getattr(args, "json_in", None):
        with open(args.json_in) as fh:
            return json.load(fh)
    return None


def _set_arg(args, text):
    data = _json_in(args)
    if data is not None and text is None:
        return sa.from_json(_shape(args), data)
    if text is None:
        raise UsageError("a set expression (or --json-in) is required")
    return parse_set(_shape(args), text)


# --------------------------------------------------------------------------
# structures and windows


def _structure(args):
    if args.structure:
        return structures.descriptor_from_json(json.loads(args.structure))
    data = _json_in(args)
    if data and "structure" in data:
        return structures.descriptor_from_json(data["structure"])
    shp = _shape(args)
    return structures.field_structure(shp)


def _decode_nbhd(s, u):
    t = s.nbhd_type
    if t == "padic_ball":
        return int(u)
    if t == "point":
        return zlevels.POINT
    if t.startswith("dist("):
        p = int(t.split("p=")[1].split(",")[0])
        n = int(t.split("n=")[1].rstrip(")"))
        return sa.from_json(FieldShape(p, n), u) if isinstance(u, dict) else sa.dist(
            FieldShape(p, n), 0, *_ints(u)[:1], _ints(u)[1:]
        )
    if t.startswith("("):
        a, b = s.parts
        return (_decode_nbhd(a, u[0]), _decode_nbhd(b, u[1]))
    raise UsageError(f"cannot decode neighbourhoods of type {t!r}")


def _window(args, s) -> IndexWindow:
    data = _json_in(args)
    if data and "window" in data:
        w = data["window"]
        Us, lo, hi = w["U"], w["lo"], w["hi"]
    else:
        fields = dict(part.split("=", 1) for part in args.window.split(";") if part.strip())
        try:
            lo, hi = _ints(fields["lo"]), _ints(fields["hi"])
        except KeyError as exc:
            raise UsageError("window needs lo=... and hi=...") from exc
        raw = fields.get("U", "0")
        Us = [u for u in raw.split("|")] if "|" in raw else raw.split(",")
        if s.nbhd_type.startswith("("):
            Us = [u.split("/") if "/" in u else [u, u] for u in raw.split(",")]
    if len(lo) != s.elevation:
        lo = tuple(lo) * s.elevation if len(lo) == 1 else lo
        hi = tuple(hi) * s.elevation if len(hi) == 1 else hi
    return IndexWindow(tuple(_decode_nbhd(s, u) for u in Us), MultiIndex(lo), MultiIndex(hi))


def _report(s, rep) -> tuple[dict, int]:
    return rep.to_json(s), 0 if rep.passed else 1


# --------------------------------------------------------------------------
# commands


def cmd_axioms(args):
    s = _structure(args)
    return _report(s, check_axioms(s, _window(args, s), AxiomMode(args.mode)))


def cmd_rigidity(args):
    s = _structure(args)
    return _report(s, check_rigidity(s, _window(args, s)))


def cmd_inflate(args):
    s = inflate(_structure(args), args.pivot)
    w = _window(args, s)
    rep = check_axioms(s, w, AxiomMode(args.mode))
    out, code = _report(s, rep)
    out["structure"] = s.to_json()
    return out, code


def cmd_product_check(args):
    a = _structure(args)
    b = structures.descriptor_from_json(json.loads(args.other)) if args.other else a
    s = product(a, b)
    rep = check_rigidity(s, _window(args, s))
    out, code = _report(s, rep)
    out["structure"] = s.to_json()
    return out, code


def cmd_stack(args):
    p = args.p
    stacked = structures.stacked_three_dim(p)
    builtin = structures.field_structure(FieldShape(p, 3))
    lo, hi = _ints(args.lo), _ints(args.hi)
    w = IndexWindow(tuple(_ints(args.U)), MultiIndex(lo), MultiIndex(hi))
    mismatches = []
    for a in w.neighborhood_indices:
        for g in w.indices():
            if not sa.equal(stacked(a, g), builtin(a, g)):
                mismatches.append({"U": a, "index": list(g)})
    rig = check_rigidity(stacked, w)
    out = {
        "agree": not mismatches,
        "checked": len(w.neighborhood_indices) * len(w.indices()),
        "mismatches": mismatches,
        "rigid": rig.passed,
        "structure": stacked.to_json(),
    }
    return out, 0 if out["agree"] and rig.passed else 1


def cmd_induce(args):
    s = hlf.induced_base_structure(FieldShape(args.p, 2))
    rows = []
    for i in range(args.i_lo, args.i_hi + 1):
        for j in range(args.j_lo, args.j_hi + 1):
            h = s(i, (j,))
            lv = s.set_ops.level(h, i)
            rows.append(
                {"i": i, "j": j, "handle": s.set_ops.to_json(h), "level": None if lv is None else list(lv)}
            )
    return {"table": rows}, 0


def cmd_intersect(args):
    shp = _shape(args)
    a, b = parse_dset(shp, args.a), parse_dset(shp, args.b)
    r = hlf.intersect(a, b)
    return {"result": None if r is None else r.to_json(), "text": "empty" if r is None else format_dset(r)}, 0


def cmd_canon(args):
    shp = _shape(args)
    d = parse_dset(shp, args.set)
    return {"canonical": d.to_json(), "text": format_dset(d)}, 0


def cmd_normal(args):
    S = sa.normalize(_set_arg(args, args.set))
    return {"normal": sa.to_json(S), "text": format_set(S)}, 0


def cmd_level(args):
    S = _set_arg(args, args.set)
    return sa.level(S).to_json(), 0


def cmd_uniform(args):
    S = _set_arg(args, args.set)
    r = sa.uniform_level(S)
    return r.to_json(), 0 if isinstance(r, sa.Uniform) else 1


def cmd_classify(args):
    S = _set_arg(args, args.set)
    return sa.classify(S).to_json(), 0


def cmd_measure(args):
    S = _set_arg(args, args.set)
    v = measure.mu_set(S)
    return {"value": v.to_json(), "text": str(v)}, 0


def cmd_ddd(args):
    S = _set_arg(args, args.set)
    return {"regions": measure.to_ddd(S).to_json()}, 0


def _instance(args) -> cover.CoverInstance:
    shp = _shape(args)
    data = _json_in(args)
    if data is not None:
        return cover.CoverInstance.from_json(shp, data)
    if not args.target or not args.family:
        raise UsageError("--target and --family are required (or --json-in)")
    fam = []
    for f in args.family:
        fam.extend(parse_set(shp, x) for x in f.split(";") if x.strip())
    target = parse_dset(shp, args.target)
    gamma = MultiIndex(_ints(args.gamma)) if args.gamma is not None else hlf.level(target)
    return cover.CoverInstance(target, gamma, tuple(fam))


def cmd_cover(args):
    rep = cover.covers(_instance(args))
    return rep.to_json(), 0 if rep.covered else 1


def cmd_subcover(args):
    rep = cover.find_subcover(_instance(args))
    return rep.to_json(), 0 if rep.covered else 1


def cmd_fip(args):
    rep = cover.fip_dual(_instance(args))
    return rep.to_json(), 0 if rep.holds else 1


def cmd_demo(args):
    inst, rep = cover.demo_no_subcover(_shape(args), args.j, args.k)
    return {"instance": inst.to_json(), "report": rep.to_json()}, 0 if rep.covered else 1


def _zset(args) -> zlevels.ZWindowSet:
    if args.members is not None:
        mem = _ints(args.members)
        win = _ints(args.window) if args.window else None
        return zlevels.ZWindowSet.of(mem, win)
    kind = args.set
    if kind.startswith("typeL:"):
        return zlevels.typeL_prefix(int(kind.split(":")[1]))
    a, b = _ints(args.window or "0,100")
    if kind == "evens":
        return zlevels.ZWindowSet((a, b), tuple(x for x in range(a, b + 1) if x % 2 == 0))
    if kind == "primes":
        return zlevels.primes_window(a, b - a)
    raise UsageError(f"unknown set {kind!r}")


def cmd_zlevel(args):
    s = zlevels.StrideStructure(args.d)
    S = _zset(args)
    lv = zlevels.z_level(s, S)
    out = {"d": args.d, "window": list(S.window), "level": lv}
    out["uniform"] = zlevels.z_uniform(s, S) if S.members else None
    return out, 0


def cmd_twin(args):
    return zlevels.twin_report(args.k, args.N).to_json(), 0


def cmd_oracle_check(args):
    from .quotient import build_quotient_model

    shp = _shape(args)
    S, T = parse_set(shp, args.a), parse_set(shp, args.b)
    twin = _ints(args.t_window)
    win = [tuple(twin[2 * k : 2 * k + 2]) for k in range(shp.width)]
    i_lo, i_hi = _ints(args.p_window)
    M = build_quotient_model(shp, win, i_lo, i_hi)
    alg, mod = sa.equal(S, T), M.equal_model(S, T)
    return {"algebra_equal": alg, "model_equal": mod, "agree": alg == mod, "model_size": M.size}, (
        0 if alg == mod else 1
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="levelset", description=__doc__.splitlines()[0])
    ap.add_argument("--pretty", action="store_true", help="indented output (format not stable)")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        sp.add_argument("--field", default="2,2", help="p,n")
        sp.add_argument("--json-in", dest="json_in", default=None)
        sp.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS)
        return sp

    for name, fn, h in [
        ("axioms", cmd_axioms, "check the level-structure conditions on a window"),
        ("rigidity", cmd_rigidity, "check lv(G_{U,g}) == g on a window"),
        ("inflate", cmd_inflate, "inflate a structure and check its axioms"),
        ("product-check", cmd_product_check, "rigidity of a product structure"),
    ]:
        sp = add(name, fn, h)
        sp.add_argument("--structure", default=None, help="descriptor JSON")
        sp.add_argument("--window", default="U=0,1;lo=-1;hi=1", help="'U=a,b;lo=..;hi=..'")
        sp.add_argument("--mode", default="compatible", choices=["strict", "compatible"])
        if name == "inflate":
            sp.add_argument("--pivot", type=int, default=0)
        if name == "product-check":
            sp.add_argument("--other", default=None, help="descriptor JSON of the second factor")

    sp = add("stack", cmd_stack, "stacked 3-D structure against the built-in one")
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--U", default="0,1,2")
    sp.add_argument("--lo", default="-1,-1")
    sp.add_argument("--hi", default="1,1")

    sp = add("induce", cmd_induce, "induced structure on Q_p inside Q_p((t))")
    sp.add_argument("--p", type=int, default=2)
    for k, v in (("i_lo", 0), ("i_hi", 1), ("j_lo", -1), ("j_hi", 1)):
        sp.add_argument("--" + k.replace("_", "-"), dest=k, type=int, default=v)

    sp = add("intersect", cmd_intersect, "intersection of two distinguished sets")
    sp.add_argument("a")
    sp.add_argument("b")
    sp = add("canon", cmd_canon, "canonical form of a distinguished set")
    sp.add_argument("set")
    for name, fn, h in [
        ("normalize", cmd_normal, "disjoint normal form"),
        ("level", cmd_level, "level of a set"),
        ("uniform", cmd_uniform, "uniform level of a set"),
        ("classify", cmd_classify, "type S or level"),
        ("measure", cmd_measure, "measure of a ddd-set"),
        ("ddd", cmd_ddd, "ddd regions of a set"),
    ]:
        sp = add(name, fn, h)
        sp.add_argument("set", nargs="?")

    for name, fn, h in [
        ("cover", cmd_cover, "decide a cover instance"),
        ("subcover", cmd_subcover, "subcover for mixed-level families"),
        ("fip", cmd_fip, "finite-intersection duality on a quotient model"),
    ]:
        sp = add(name, fn, h)
        sp.add_argument("--target")
        sp.add_argument("--gamma", default=None)
        sp.add_argument("--family", action="append", help="set expressions separated by ';'")

    sp = add("demo-no-subcover", cmd_demo, "disjoint family of too high level")
    sp.add_argument("--j", type=int, default=0)
    sp.add_argument("--k", type=int, default=3)

    sp = add("zlevel", cmd_zlevel, "level of a finite subset of Z")
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--members", default=None)
    sp.add_argument("--set", default="primes", help="evens | primes | typeL:m")
    sp.add_argument("--window", default=None, help="a,b")

    sp = add("twin", cmd_twin, "stride-2 level of the primes in [k, k+N]")
    sp.add_argument("--k", type=int, default=5)
    sp.add_argument("--N", type=int, default=10000)

    sp = add("oracle-check", cmd_oracle_check, "set equality: algebra against quotient model")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--t-window", dest="t_window", default="0,1")
    sp.add_argument("--p-window", dest="p_window", default="0,2")
    return ap


def _dump(obj, pretty: bool) -> str:
    if pretty:
        return json.dumps(obj, sort_keys=True, indent=2)
    return json.dumps(obj, sort_keys=True)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    pretty = getattr(args, "pretty", False)
    try:
        out, code = args.fn(args)
    except (ParseError, UsageError, cover.CoverError, measure.NotDDD, UnsafeQuery, ValueError) as exc:
        print(_dump({"error": str(exc), "type": type(exc).__name__}, False), file=sys.stderr)
        return 2
    print(_dump(out, pretty))
    return code


if __name__ == "__main__":
    sys.exit(main())
