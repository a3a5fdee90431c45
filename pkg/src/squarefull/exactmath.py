"""Exact integer primitives: integer roots, segmented squarefree sieve,
and enumeration of squarefull (powerful) numbers.

Every squarefull number factors uniquely as n = a^2 * b^3 with b squarefree,
and 1 counts as squarefull (vacuous prime condition).  All boundary decisions
here are made in exact integer arithmetic; Python's arbitrary-precision ints
make widening automatic, so nothing can silently wrap.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass

import numpy as np

#: cache file format version (both CSV and binary carry it in their header)
CACHE_VERSION = 1

#: largest value storable in a binary cache record (3 x 8-byte LE unsigned)
_U64_MAX = 2**64 - 1

#: default ceiling on sieve table size, in entries
DEFAULT_MAX_SIEVE_CELLS = 1 << 28

#: default segment length for the segmented sieve (cache-resident)
DEFAULT_SEGMENT_SIZE = 1 << 20


def isqrt(n: int) -> int:
    """Exact floor square root: the r with r^2 <= n < (r+1)^2."""
    if n < 0:
        raise ValueError("isqrt requires n >= 0")
    return math.isqrt(n)


def icbrt(n: int) -> int:
    """Exact floor cube root: the r with r^3 <= n < (r+1)^3.

    Starts from a float guess, then corrects with exact integer
    comparisons, so the result is proven exact for any n.
    """
    if n < 0:
        raise ValueError("icbrt requires n >= 0")
    if n == 0:
        return 0
    r = int(round(float(n) ** (1.0 / 3.0)))
    if r < 1:
        r = 1
    while r * r * r > n:
        r -= 1
    while (r + 1) ** 3 <= n:
        r += 1
    return r


@dataclass(frozen=True)
class SquarefullRep:
    """One squarefull number as its unique (a, b) pair, n = a^2 * b^3."""

    a: int
    b: int
    n: int

    def __post_init__(self) -> None:
        if self.a < 1 or self.b < 1:
            raise ValueError("a and b must be positive")
        if self.a * self.a * self.b**3 != self.n:
            raise ValueError(f"inconsistent representation: {self.a}^2 * {self.b}^3 != {self.n}")


@dataclass(frozen=True)
class SquarefreeTable:
    """mu^2(b) indicator for every b in [lo, hi]."""

    lo: int
    hi: int
    flags: np.ndarray  # bool, flags[b - lo] == (b squarefree)

    def is_squarefree(self, b: int) -> bool:
        if not (self.lo <= b <= self.hi):
            raise IndexError(f"b={b} outside table range [{self.lo}, {self.hi}]")
        return bool(self.flags[b - self.lo])

    def count(self) -> int:
        return int(np.count_nonzero(self.flags))


def _primes_upto(n: int) -> np.ndarray:
    """Primes <= n by a plain sieve of Eratosthenes."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.nonzero(is_p)[0].astype(np.int64)


def squarefree_sieve(
    lo: int,
    hi: int,
    *,
    max_cells: int = DEFAULT_MAX_SIEVE_CELLS,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
) -> SquarefreeTable:
    """mu^2(b) for all b in [lo, hi], by marking multiples of p^2 segment by segment.

    Memory is O(hi - lo) for the output plus O(sqrt(hi)) for the primes.
    Raises ValueError when the requested table exceeds ``max_cells``.
    """
    if not (1 <= lo <= hi):
        raise ValueError("need 1 <= lo <= hi")
    size = hi - lo + 1
    if size > max_cells:
        raise ValueError(
            f"sieve range of {size} entries exceeds the memory budget of {max_cells}; "
            "raise max_cells or split the range"
        )
    primes = _primes_upto(math.isqrt(hi))
    flags = np.ones(size, dtype=bool)
    for seg_lo in range(lo, hi + 1, segment_size):
        seg_hi = min(seg_lo + segment_size - 1, hi)
        for p in primes:
            p2 = int(p) * int(p)
            start = ((seg_lo + p2 - 1) // p2) * p2
            if start > seg_hi:
                continue
            flags[start - lo : seg_hi - lo + 1 : p2] = False
    return SquarefreeTable(lo=lo, hi=hi, flags=flags)


def squarefree_values(hi: int) -> np.ndarray:
    """All squarefree b in [1, hi] as an int64 array."""
    table = squarefree_sieve(1, hi)
    return np.nonzero(table.flags)[0].astype(np.int64) + 1


def enumerate_squarefull_arrays(lo: int, hi: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All squarefull n in [lo, hi] as arrays (a, b, n) sorted by n.

    Iterates squarefree b <= icbrt(hi), then the full a-run for each b.
    Boundaries are decided by exact floor roots, so the output is exact.
    """
    if not (1 <= lo <= hi):
        raise ValueError("need 1 <= lo <= hi")
    b_max = icbrt(hi)
    table = squarefree_sieve(1, b_max)
    a_chunks: list[np.ndarray] = []
    b_chunks: list[np.ndarray] = []
    n_chunks: list[np.ndarray] = []
    for b in range(1, b_max + 1):
        if not table.flags[b - 1]:
            continue
        b3 = b * b * b
        # smallest a with a^2 b^3 >= lo, i.e. a^2 >= ceil(lo / b^3)
        need = (lo + b3 - 1) // b3
        a_lo = math.isqrt(need - 1) + 1 if need > 0 else 1
        a_hi = math.isqrt(hi // b3)
        if a_hi < a_lo:
            continue
        a = np.arange(a_lo, a_hi + 1, dtype=np.int64)
        a_chunks.append(a)
        b_chunks.append(np.full(a.shape, b, dtype=np.int64))
        n_chunks.append(a * a * b3)
    if not a_chunks:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty.copy(), empty.copy()
    a_all = np.concatenate(a_chunks)
    b_all = np.concatenate(b_chunks)
    n_all = np.concatenate(n_chunks)
    order = np.argsort(n_all, kind="stable")
    return a_all[order], b_all[order], n_all[order]


def enumerate_squarefull(lo: int, hi: int) -> list[SquarefullRep]:
    """All squarefull n in [lo, hi], each once, sorted by n."""
    a, b, n = enumerate_squarefull_arrays(lo, hi)
    return [SquarefullRep(int(ai), int(bi), int(ni)) for ai, bi, ni in zip(a, b, n)]


# ---------------------------------------------------------------------------
# Enumeration cache files.
#
# CSV:    first line "lo,hi,version", then one "a,b,n" line per number.
# Binary: records of 3 x 8-byte little-endian unsigned; the first record is
#         the header (lo, hi, version).
# ---------------------------------------------------------------------------

_REC = struct.Struct("<QQQ")


def write_enumeration_cache(
    path: str,
    lo: int,
    hi: int,
    arrays: tuple[np.ndarray, np.ndarray, np.ndarray],
    fmt: str | None = None,
) -> None:
    """Write an (a, b, n) enumeration for [lo, hi] to ``path``.

    ``fmt``: "csv" or "binary"; defaults from the file suffix (.csv -> CSV).
    """
    a, b, n = arrays
    if fmt is None:
        fmt = "csv" if str(path).endswith(".csv") else "binary"
    if fmt not in ("csv", "binary"):
        raise ValueError(f"unknown cache format {fmt!r}")
    for name, arr_top in (("lo", lo), ("hi", hi)):
        if not (0 <= arr_top <= _U64_MAX):
            raise ValueError(f"{name}={arr_top} does not fit the 8-byte cache record")
    if len(n) and (int(n[-1]) > _U64_MAX):
        raise ValueError("enumeration values exceed the 8-byte cache record")
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([lo, hi, CACHE_VERSION])
            for ai, bi, ni in zip(a, b, n):
                writer.writerow([int(ai), int(bi), int(ni)])
    else:
        with open(path, "wb") as fh:
            fh.write(_REC.pack(lo, hi, CACHE_VERSION))
            for ai, bi, ni in zip(a, b, n):
                fh.write(_REC.pack(int(ai), int(bi), int(ni)))


def read_enumeration_cache(
    path: str, fmt: str | None = None
) -> tuple[int, int, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Read a cache file written by :func:`write_enumeration_cache`.

    Returns (lo, hi, (a, b, n)).  The format is sniffed from the suffix
    unless given explicitly.
    """
    if fmt is None:
        fmt = "csv" if str(path).endswith(".csv") else "binary"
    if fmt == "csv":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            lo, hi, version = (int(v) for v in header)
            rows = [(int(r[0]), int(r[1]), int(r[2])) for r in reader]
        if version != CACHE_VERSION:
            raise ValueError(f"unsupported cache version {version}")
        if rows:
            a, b, n = (np.array(col, dtype=np.int64) for col in zip(*rows))
        else:
            a, b, n = (np.empty(0, dtype=np.int64) for _ in range(3))
        return lo, hi, (a, b, n)
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _REC.size or len(raw) % _REC.size:
        raise ValueError(f"{path} is not a valid binary enumeration cache")
    lo, hi, version = _REC.unpack_from(raw, 0)
    if version != CACHE_VERSION:
        raise ValueError(f"unsupported cache version {version}")
    body = np.frombuffer(raw, dtype="<u8", offset=_REC.size).reshape(-1, 3)
    a = body[:, 0].astype(np.int64)
    b = body[:, 1].astype(np.int64)
    n = body[:, 2].astype(np.int64)
    return int(lo), int(hi), (a, b, n)
