"""Text syntax for field elements and symbolic sets.

    element := term (('+' | '-') term)*
    term    := rational ['*' mono] | mono
    mono    := var ['^' int] ('*' var ['^' int])*      var: t (n = 2) or t2 .. tn
    dset    := '[' element ']' '+' ['p^' int] [ideal-t-part] 'O'
    rank1   := '[' element ']' '+' 't^' int 'OO'
    set     := dset | rank1 | 'union(' set, ... ')' | 'diff(' set, set, ... ')' | 'empty'

The printer emits the same syntax and ``parse(format(x)) == x`` for every
canonical x.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .hlf import DistinguishedSet, FieldElement, FieldShape, dset

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*)|(.))")


class ParseError(ValueError):
    def __init__(self, text: str, pos: int, expected: str, found: str | None = None):
        self.text, self.pos, self.expected = text, pos, expected
        self.found = found
        got = "end of input" if found is None else repr(found)
        super().__init__(f"at position {pos}: expected {expected}, found {got}")


@dataclass
class _Tok:
    kind: str  # "int" | "name" | "sym" | "end"
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            out.append(_Tok("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(_Tok("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            out.append(_Tok("sym", m.group(3), m.start(3)))
        pos = m.end()
    out.append(_Tok("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, shape: FieldShape, text: str):
        self.shape, self.text = shape, text
        self.toks = _tokenize(text)
        self.k = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.k]

    def fail(self, expected: str):
        t = self.tok
        raise ParseError(self.text, t.pos, expected, None if t.kind == "end" else t.value)

    def accept(self, kind: str, value: str | None = None) -> _Tok | None:
        t = self.tok
        if t.kind == kind and (value is None or t.value == value):
            self.k += 1
            return t
        return None

    def expect(self, kind: str, value: str | None = None, what: str | None = None) -> _Tok:
        t = self.accept(kind, value)
        if t is None:
            self.fail(what or (repr(value) if value else kind))
        return t

    def end(self):
        if self.tok.kind != "end":
            self.fail("end of input")

    # -- numbers -------------------------------------------------------------

    def signed_int(self) -> int:
        sign = -1 if self.accept("sym", "-") else 1
        if sign == 1:
            self.accept("sym", "+")
        return sign * int(self.expect("int", what="integer").value)

    def rational(self) -> Fraction:
        num = int(self.expect("int", what="number").value)
        if self.accept("sym", "/"):
            den = int(self.expect("int", what="denominator").value)
            if den == 0:
                raise ParseError(self.text, self.toks[self.k - 1].pos, "nonzero denominator", "0")
            return Fraction(num, den)
        return Fraction(num)

    # -- variables -----------------------------------------------------------

    def var_slot(self, name: str) -> int | None:
        w = self.shape.width
        if name == "t" and w == 1:
            return 0
        m = re.fullmatch(r"t(\d+)", name)
        if m:
            k = int(m.group(1))
            if 2 <= k <= self.shape.n:
                return k - 2
        return None

    def is_var(self) -> bool:
        return self.tok.kind == "name" and self.var_slot(self.tok.value) is not None

    def var_power(self, exps: list[int]):
        t = self.expect("name", what="variable")
        slot = self.var_slot(t.value)
        if slot is None:
            raise ParseError(self.text, t.pos, f"a variable of F (n={self.shape.n})", t.value)
        exps[slot] += self.signed_int() if self.accept("sym", "^") else 1

    def mono(self) -> tuple[int, ...]:
        exps = [0] * self.shape.width
        self.var_power(exps)
        while self.tok.kind == "sym" and self.tok.value == "*":
            self.k += 1
            self.var_power(exps)
        return tuple(exps)

    # -- elements ------------------------------------------------------------

    def term(self, sign: int) -> tuple[tuple[int, ...], Fraction]:
        if self.is_var():
            return self.mono(), Fraction(sign)
        if self.tok.kind != "int":
            self.fail("number or variable")
        c = self.rational() * sign
        exps = tuple([0] * self.shape.width)
        if self.accept("sym", "*"):
            exps = self.mono()
        return exps, c

    def element(self) -> FieldElement:
        terms = []
        sign = -1 if self.accept("sym", "-") else 1
        terms.append(self.term(sign))
        while self.tok.kind == "sym" and self.tok.value in "+-":
            sign = 1 if self.tok.value == "+" else -1
            self.k += 1
            terms.append(self.term(sign))
        return FieldElement.make(self.shape, terms)

    # -- sets ----------------------------------------------------------------

    def coset(self):
        from .setalg import Dist, rank_one

        self.expect("sym", "[")
        alpha = self.element()
        self.expect("sym", "]")
        self.expect("sym", "+")
        i1 = 0
        tail = [0] * self.shape.width
        saw_p = False
        if self.tok.kind == "name" and self.tok.value == "p":
            self.k += 1
            self.expect("sym", "^")
            i1 = self.signed_int()
            saw_p = True
        while self.is_var():
            self.var_power(tail)
        t = self.expect("name", what="'O' or 'OO'")
        if t.value == "O":
            return Dist(dset(self.shape, alpha, i1, tuple(tail)))
        if t.value == "OO":
            if saw_p or self.shape.n != 2:
                raise ParseError(self.text, t.pos, "rank-one syntax [g] + t^j OO (n = 2)", t.value)
            return rank_one(self.shape, alpha, tail[0])
        raise ParseError(self.text, t.pos, "'O' or 'OO'", t.value)

    def set_(self):
        from .setalg import Diff, Empty, make_union

        t = self.tok
        if t.kind == "name" and t.value in ("union", "diff"):
            self.k += 1
            self.expect("sym", "(")
            items = [self.set_()]
            while self.accept("sym", ","):
                items.append(self.set_())
            if t.value == "diff" and len(items) < 2:
                self.fail("',' and at least one hole in diff(...)")
            self.expect("sym", ")")
            if t.value == "union":
                return make_union(items)
            return Diff(items[0], tuple(items[1:]))
        if t.kind == "name" and t.value == "empty":
            self.k += 1
            return Empty(self.shape)
        if t.kind == "sym" and t.value == "[":
            return self.coset()
        self.fail("'[', 'union', 'diff' or 'empty'")


def parse_element(shape: FieldShape, text: str) -> FieldElement:
    p = _Parser(shape, text)
    x = p.element()
    p.end()
    return x


def parse_set(shape: FieldShape, text: str):
    p = _Parser(shape, text)
    s = p.set_()
    p.end()
    return s


def parse_dset(shape: FieldShape, text: str) -> DistinguishedSet:
    from .setalg import Dist

    s = parse_set(shape, text)
    if not isinstance(s, Dist):
        raise ParseError(text, 0, "a distinguished set [a] + p^i t^j O", type(s).__name__)
    return s.d


def parse_field(text: str) -> FieldShape:
    try:
        p, n = (int(x) for x in text.split(","))
    except ValueError:
        raise ParseError(text, 0, "p,n") from None
    return FieldShape(p, n)


# --------------------------------------------------------------------------
# printing


def _fmt_q(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _var(shape: FieldShape, k: int) -> str:
    return "t" if shape.width == 1 else f"t{k + 2}"


def format_mono(shape: FieldShape, exps, sep: str = "*", keep_zero: bool = False) -> str:
    parts = []
    for k, a in enumerate(exps):
        if a or keep_zero:
            parts.append(f"{_var(shape, k)}^{a}")
    return sep.join(parts)


def format_element(x: FieldElement) -> str:
    if not x.terms:
        return "0"
    out = []
    for k, (e, c) in enumerate(x.terms):
        neg = c < 0
        body = _fmt_q(abs(c))
        mono = format_mono(x.shape, e)
        if mono:
            body = f"{body}*{mono}"
        if k == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def format_dset(D: DistinguishedSet) -> str:
    ideal = format_mono(D.shape, D.tail, sep=" ", keep_zero=True)
    return f"[{format_element(D.translate)}] + p^{D.i1} {ideal} O"


def format_set(S) -> str:
    from . import setalg as sa

    if isinstance(S, DistinguishedSet):
        return format_dset(S)
    if isinstance(S, sa.Empty):
        return "empty"
    if isinstance(S, sa.Dist):
        return format_dset(S.d)
    if isinstance(S, sa.RankOne):
        return f"[{format_element(S.translate)}] + t^{S.j} OO"
    if isinstance(S, sa.Union):
        return "union(" + ", ".join(format_set(m) for m in S.members) + ")"
    if isinstance(S, sa.Diff):
        return "diff(" + ", ".join(format_set(m) for m in (S.base, *S.holes)) + ")"
    raise TypeError(f"not a symbolic set: {S!r}")
