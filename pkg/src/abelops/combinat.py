"""Exact combinatorial primitives.

Conventions used throughout the package:

* An integer partition of n "of length m" is a weakly decreasing tuple of
  non-negative ints, zero-padded to length exactly m.
* A permuted part sequence is any reordering of such a tuple.
* A constrained set split of an index tuple I assigns the elements of I to m
  ordered blocks with prescribed sizes; blocks may be empty.  Blocks are
  sorted tuples.
* An (unordered) set partition of I is a tuple of non-empty disjoint sorted
  blocks covering I, blocks listed by minimum element.

All enumerations are in a fixed deterministic order so downstream symbolic
output is reproducible bit for bit: partitions in reverse-lexicographic
order, permutations in descending lexicographic order, set splits in
lexicographic order of block contents, set partitions in restricted-growth
order.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial, gcd
from typing import NamedTuple


def integer_partitions(n: int, m: int) -> list[tuple[int, ...]]:
    """All partitions of n into at most m parts, zero-padded to length m.

    Reverse-lexicographic order, e.g. (2, 3) -> [(2,0,0), (1,1,0)].
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    out: list[tuple[int, ...]] = []

    def rec(remaining: int, bound: int, acc: list[int]):
        if remaining == 0:
            out.append(tuple(acc) + (0,) * (m - len(acc)))
            return
        if len(acc) == m:
            return
        for part in range(min(bound, remaining), 0, -1):
            rec(remaining - part, part, acc + [part])

    rec(n, n, [])
    return out


def partitions_with_parts_divisible(n: int, m: int) -> list[tuple[int, ...]]:
    """Partitions of n using only parts divisible by m (no zero padding)."""
    if n % m != 0:
        return []
    scaled = integer_partitions(n // m, n // m)
    out = []
    for p in scaled:
        trimmed = tuple(m * x for x in p if x)
        out.append(trimmed)
    return out


def multiset_permutations(parts) -> list[tuple[int, ...]]:
    """All distinct orderings of a sequence, descending lexicographic order."""
    parts = tuple(parts)
    out: list[tuple[int, ...]] = []

    def rec(pool: list[int], acc: list[int]):
        if not pool:
            out.append(tuple(acc))
            return
        seen = set()
        for v in sorted(set(pool), reverse=True):
            if v in seen:
                continue
            seen.add(v)
            rest = list(pool)
            rest.remove(v)
            rec(rest, acc + [v])

    rec(list(parts), [])
    return out


def permutation_count(parts) -> int:
    """m! divided by the product of multiplicity factorials."""
    parts = tuple(parts)
    total = factorial(len(parts))
    for v in set(parts):
        total //= factorial(parts.count(v))
    return total


def z_weight(psi) -> int:
    """Sum over positions k of (k-1) * psi_k, positions counted from 1."""
    return sum(k * v for k, v in enumerate(psi))


def constrained_set_partitions(indices, sizes) -> list[tuple[tuple, ...]]:
    """All splits of `indices` into ordered blocks with the given sizes.

    Blocks may be declared empty (size 0).  The number of splits is the
    multinomial coefficient n! / prod(sizes_k!).
    """
    indices = tuple(indices)
    sizes = tuple(sizes)
    if sum(sizes) != len(indices):
        raise ValueError(f"sizes {sizes} do not sum to |I| = {len(indices)}")
    out: list[tuple[tuple, ...]] = []

    def rec(pool: tuple, k: int, acc: list[tuple]):
        if k == len(sizes):
            out.append(tuple(acc))
            return
        size = sizes[k]
        for block in _combinations(pool, size):
            rest = tuple(x for x in pool if x not in set(block))
            rec(rest, k + 1, acc + [block])

    rec(indices, 0, [])
    return out


def _combinations(pool: tuple, size: int):
    """Sorted-order combinations of positions from an ordered pool."""
    n = len(pool)
    if size == 0:
        yield ()
        return
    idx = list(range(size))
    while True:
        yield tuple(pool[i] for i in idx)
        for i in reversed(range(size)):
            if idx[i] != i + n - size:
                break
        else:
            return
        idx[i] += 1
        for j in range(i + 1, size):
            idx[j] = idx[j - 1] + 1


def all_set_partitions(indices) -> list[tuple[tuple, ...]]:
    """All partitions of `indices` into non-empty unordered blocks.

    Restricted-growth order; the count is the Bell number of |indices|.
    """
    indices = tuple(indices)
    if not indices:
        raise ValueError("index set must be non-empty")
    out: list[tuple[tuple, ...]] = []

    def rec(pos: int, blocks: list[list]):
        if pos == len(indices):
            out.append(tuple(tuple(b) for b in blocks))
            return
        x = indices[pos]
        for b in blocks:
            b.append(x)
            rec(pos + 1, blocks)
            b.pop()
        blocks.append([x])
        rec(pos + 1, blocks)
        blocks.pop()

    rec(0, [])
    return out


def profile_set_partitions(indices, profile) -> list[tuple[tuple, ...]]:
    """Partitions of `indices` into unordered non-empty blocks whose size
    multiset equals `profile`.

    Unlike constrained_set_partitions the blocks are not slotted, so equal
    sized blocks are not distinguished; for profile (3, 3) on six indices
    there are 10 partitions, not 20.
    """
    indices = tuple(indices)
    profile = tuple(sorted((p for p in profile if p), reverse=True))
    if sum(profile) != len(indices):
        raise ValueError("profile does not sum to |I|")
    pos = {x: i for i, x in enumerate(indices)}
    out: list[tuple[tuple, ...]] = []

    def rec(pool: tuple, k: int, prev_min: int, acc: list[tuple]):
        if k == len(profile):
            out.append(tuple(acc))
            return
        size = profile[k]
        # Blocks of equal size are listed with strictly increasing minima.
        floor = prev_min if k > 0 and profile[k - 1] == size else -1
        for block in _combinations(pool, size):
            if pos[block[0]] <= floor:
                continue
            rest = tuple(x for x in pool if x not in set(block))
            rec(rest, k + 1, pos[block[0]], acc + [block])

    rec(indices, 0, -1, [])
    return out


def mobius(blocks, m: int) -> int:
    """(-1)^(m - l) times the product of (|block| - 1)! over the l blocks."""
    ell = len(blocks)
    value = (-1) ** (m - ell)
    for b in blocks:
        value *= factorial(len(b) - 1)
    return value


def multinomial(n: int, parts) -> int:
    total = factorial(n)
    for p in parts:
        total //= factorial(p)
    return total


class GapData(NamedTuple):
    n: int
    s: int
    genus: int
    gaps: tuple[int, ...]      # increasing
    u_weights: tuple[int, ...]  # gaps in decreasing order, u_1 heaviest


@lru_cache(maxsize=None)
def gap_sequence(n: int, s: int) -> GapData:
    """Positive integers not representable as a*n + b*s with a, b >= 0.

    There are exactly (n-1)(s-1)/2 of them; they are the weights of the
    u-variables, assigned in decreasing order.
    """
    if not (2 <= n < s):
        raise ValueError(f"need 2 <= n < s, got ({n}, {s})")
    if gcd(n, s) != 1:
        raise ValueError(f"({n}, {s}) are not coprime")
    genus = (n - 1) * (s - 1) // 2
    limit = n * s  # all gaps lie below (n-1)(s-1) <= ns
    reachable = [False] * (limit + 1)
    for a in range(0, limit // n + 1):
        for b in range(0, (limit - a * n) // s + 1):
            reachable[a * n + b * s] = True
    gaps = tuple(k for k in range(1, limit + 1) if not reachable[k])
    if len(gaps) != genus:
        raise AssertionError("gap count does not match the genus formula")
    return GapData(n, s, genus, gaps, tuple(sorted(gaps, reverse=True)))


def binomial(n: int, k: int) -> int:
    return comb(n, k)
