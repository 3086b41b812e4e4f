"""Discrete level structures on Z over a one-point base.

With stride d the distinguished sets are G_g = {0} for g >= 0 and
G_{-n} = {0, d, ..., (n-1)d}.  The level of a finite set is minus the length
of its longest stride-d chain, and a set made of isolated points has level -1.
All statements about infinite sets are evaluated on explicit windows.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .index_core import TOP, BaseKind, MultiIndex, SetOps, SingletonIds, StructureDescriptor

POINT = "x"


@dataclass(frozen=True)
class ZWindowSet:
    window: tuple[int, int]
    members: tuple[int, ...]

    def __post_init__(self):
        a, b = self.window
        if a > b:
            raise ValueError("window must satisfy a <= b")
        mem = tuple(sorted(set(self.members)))
        if mem and (mem[0] < a or mem[-1] > b):
            raise ValueError("members must lie in the window")
        object.__setattr__(self, "window", (int(a), int(b)))
        object.__setattr__(self, "members", mem)

    @classmethod
    def of(cls, members: Iterable[int], window: tuple[int, int] | None = None) -> "ZWindowSet":
        mem = sorted(set(members))
        if window is None:
            window = (mem[0], mem[-1]) if mem else (0, 0)
        return cls(tuple(window), tuple(mem))

    def shifted(self, c: int) -> "ZWindowSet":
        a, b = self.window
        return ZWindowSet((a + c, b + c), tuple(x + c for x in self.members))

    def to_json(self, d: int = 1) -> dict:
        return {"d": d, "window": list(self.window), "members": list(self.members)}


def z_distinguished(d: int, gamma: int) -> frozenset[int]:
    if d < 1:
        raise ValueError("stride must be >= 1")
    if gamma >= 0:
        return frozenset({0})
    return frozenset(range(0, -gamma * d, d))


def longest_run(members: Iterable[int], d: int) -> int:
    s = set(members)
    best = 0
    for x in s:
        if x - d in s:
            continue
        n = 1
        while x + n * d in s:
            n += 1
        best = max(best, n)
    return best


def chain_lengths(members: Iterable[int], d: int) -> dict[int, int]:
    """Length of the maximal stride-d chain through each member."""
    s = set(members)
    out = {}
    for x in s:
        if x - d in s:
            continue
        chain = [x]
        while chain[-1] + d in s:
            chain.append(chain[-1] + d)
        for y in chain:
            out[y] = len(chain)
    return out


def _level_of(members, d: int) -> int | None:
    members = list(members)
    if not members:
        return None
    return -max(1, longest_run(members, d))


class ZSetOps(SetOps):
    def __init__(self, d: int):
        self.d = d

    def equal(self, a, b):
        return a == b

    def intersect(self, a, b):
        return a & b

    def union(self, a, b):
        return a | b

    def subset(self, a, b):
        return a <= b

    def contains_identity(self, h):
        return 0 in h

    def is_identity(self, h):
        return h == frozenset({0})

    def level(self, h, U):
        lv = _level_of(h, self.d)
        return None if lv is None else MultiIndex((lv,))

    def containment_level(self, h, U):
        if h == frozenset({0}):
            return TOP
        if not h or any(x < 0 or x % self.d for x in h):
            return None
        return MultiIndex((-(max(h) // self.d + 1),))

    def to_json(self, h):
        return sorted(h)


@dataclass(frozen=True)
class StrideStructure:
    d: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("stride must be >= 1")

    def distinguished(self, gamma: int) -> frozenset[int]:
        return z_distinguished(self.d, gamma)

    def descriptor(self) -> StructureDescriptor:
        d = self.d

        def construct(U, g):
            return z_distinguished(d, g[0])

        return StructureDescriptor(
            elevation=1,
            kind=BaseKind.SINGLETON,
            construct=construct,
            set_ops=ZSetOps(d),
            nbhd_ops=SingletonIds(),
            params=(("d", d),),
            nbhd_type="point",
            handle_type="z_subset",
        )


def z_level(s: StrideStructure, S: ZWindowSet) -> int | None:
    """-(longest stride-d chain in S), at least -1; None when S is empty."""
    return _level_of(S.members, s.d)


def z_uniform(s: StrideStructure, S: ZWindowSet) -> bool:
    if not S.members:
        raise ValueError("uniformity needs a nonempty set")
    L = -z_level(s, S)
    if L == 1:
        return True
    return all(n >= L for n in chain_lengths(S.members, s.d).values())


# --------------------------------------------------------------------------
# primes


class _Sieve:
    def __init__(self):
        self.table = bytearray(b"\x00\x00")

    def upto(self, limit: int) -> bytearray:
        if limit >= len(self.table):
            size = max(limit + 1, 2 * len(self.table))
            t = bytearray([1]) * size
            t[0:2] = b"\x00\x00"
            f = 2
            while f * f < size:
                if t[f]:
                    t[f * f :: f] = bytes(len(range(f * f, size, f)))
                f += 1
            self.table = t
        return self.table


_SIEVE = _Sieve()


def primes_window(k: int, N: int) -> ZWindowSet:
    """Primes in [k, k + N]."""
    if N < 1:
        raise ValueError("N must be >= 1")
    hi = k + N
    t = _SIEVE.upto(max(hi, 2))
    lo = max(k, 0)
    return ZWindowSet((k, hi), tuple(x for x in range(lo, hi + 1) if t[x]))


@dataclass(frozen=True)
class TwinReport:
    k: int
    N: int
    neg_level: int | None

    @property
    def note(self) -> str:
        if self.neg_level is None:
            return "no primes in window"
        if self.neg_level == 1:
            return "window too small: no stride-2 pair of primes found"
        if self.neg_level > 2:
            return "window contains a stride-2 chain of length > 2 (the chain 3, 5, 7)"
        return ""

    def to_json(self) -> dict:
        out = {"neg_level": self.neg_level, "window": [self.k, self.k + self.N]}
        if self.note:
            out["note"] = self.note
        return out


def twin_report(k: int, N: int) -> TwinReport:
    lv = z_level(StrideStructure(2), primes_window(k, N))
    return TwinReport(k, N, None if lv is None else -lv)


def twin_level(k: int, N: int) -> int | None:
    return twin_report(k, N).neg_level


def typeL_prefix(m: int) -> ZWindowSet:
    """Chains of lengths 1, 2, ..., m separated by single gaps, from 0."""
    if m < 1:
        raise ValueError("m must be >= 1")
    out, x = [], 0
    for length in range(1, m + 1):
        out.extend(range(x, x + length))
        x += length + 1
    return ZWindowSet((0, out[-1]), tuple(out))


def run_subcover(target: ZWindowSet, family: list[frozenset[int]]) -> list[int] | None:
    """Indices of family members covering the target (greedy, then pruned),
    or None when the whole family misses a point."""
    need = set(target.members)
    covered = set().union(*family)
    if not need <= covered:
        return None
    chosen = []
    left = set(need)
    while left:
        k = max(range(len(family)), key=lambda i: (len(family[i] & left), -i))
        chosen.append(k)
        left -= family[k]
    for k in list(chosen):
        rest = set().union(*(family[i] for i in chosen if i != k))
        if need <= rest:
            chosen.remove(k)
    return sorted(chosen)


# --------------------------------------------------------------------------
# sieve cache files

_MAGIC = b"ZLVSIEVE"


def write_sieve_cache(path: str | Path, start: int, length: int) -> None:
    """Flat bitmap: magic, <Q bit count, <q start, then LSB-first bits where
    bit i says whether start + i is prime."""
    t = _SIEVE.upto(max(start + length, 2))
    bits = bytearray((length + 7) // 8)
    for i in range(length):
        x = start + i
        if x >= 0 and t[x]:
            bits[i >> 3] |= 1 << (i & 7)
    with open(path, "wb") as fh:
        fh.write(_MAGIC + struct.pack("<Qq", length, start) + bytes(bits))


def read_sieve_cache(path: str | Path) -> tuple[int, list[int]]:
    data = Path(path).read_bytes()
    if data[:8] != _MAGIC:
        raise ValueError("not a sieve cache file")
    length, start = struct.unpack_from("<Qq", data, 8)
    bits = data[24:]
    if len(bits) != (length + 7) // 8:
        raise ValueError("truncated sieve cache")
    primes = [start + i for i in range(length) if bits[i >> 3] >> (i & 7) & 1]
    return start, primes
