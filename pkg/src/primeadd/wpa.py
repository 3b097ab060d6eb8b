"""Brute-force detection of weakly / plain / strongly prime-additive numbers.

A representation of ``n`` is a sum of powers ``p**e`` (``e >= 1``) of
distinct primes dividing ``n``. Its smallest size is the length of ``n``.
Searches split the chosen primes into two halves and hash the partial
sums of one half, so each subset costs about the product of half the
power-list sizes.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .arith import factorize

Representation = tuple[tuple[int, int], ...]

CHUNK = 10**4


@lru_cache(maxsize=2)
def _spf_fast(limit: int) -> np.ndarray:
    # smallest prime factor table via a sieve over primes <= sqrt(limit)
    spf = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == p:
            block = spf[p * p::p]
            mask = block == np.arange(p * p, limit + 1, p)
            block[mask] = p
    return spf


def prime_divisors(n: int, spf: np.ndarray | None = None) -> list[int]:
    if spf is None or n >= spf.size:
        return factorize(n).primes
    out = []
    while n > 1:
        p = int(spf[n])
        out.append(p)
        while n % p == 0:
            n //= p
    return out


def _powers(p: int, n: int) -> list[tuple[int, int]]:
    # all (e, p**e) with e >= 1 and p**e < n; exact, so e <= log_p(n)
    out, e, v = [], 1, p
    while v < n:
        out.append((e, v))
        e += 1
        v *= p
    return out


def _half_sums(n: int, primes, pw) -> dict[int, list[tuple[int, ...]]]:
    sums: dict[int, list[tuple[int, ...]]] = {}
    for combo in itertools.product(*(pw[p] for p in primes)):
        s = sum(v for _, v in combo)
        if s < n:
            sums.setdefault(s, []).append(tuple(e for e, _ in combo))
    return sums


def _subset_reps(n: int, primes: tuple[int, ...], pw, first_only=False) -> list[Representation]:
    half = len(primes) // 2
    left, right = primes[:half], primes[half:]
    table = _half_sums(n, left, pw)
    found = []
    for combo in itertools.product(*(pw[p] for p in right)):
        s = sum(v for _, v in combo)
        if s >= n:
            continue
        for les in table.get(n - s, ()):
            exps = les + tuple(e for e, _ in combo)
            found.append(tuple(zip(primes, exps)))
            if first_only:
                return found
    found.sort()
    return found


def find_representations(n: int, primes: list[int] | None = None,
                         max_t: int | None = None) -> list[Representation]:
    """Every representation of ``n`` of size 3..max_t, sorted by size then lexicographically."""
    primes = sorted(primes if primes is not None else factorize(n).primes)
    if len(primes) < 2:
        return []
    pw = {p: _powers(p, n) for p in primes}
    top = len(primes) if max_t is None else min(max_t, len(primes))
    out = []
    for t in range(3, top + 1):
        for subset in itertools.combinations(primes, t):
            out += _subset_reps(n, subset, pw)
    return out


def shortest_representation(n: int, primes: list[int] | None = None) -> Representation | None:
    primes = sorted(primes if primes is not None else factorize(n).primes)
    if len(primes) < 3:
        return None
    pw = {p: _powers(p, n) for p in primes}
    # size t needs distinct primes dividing n, so t <= omega(n)
    for t in range(3, len(primes) + 1):
        best = None
        for subset in itertools.combinations(primes, t):
            reps = _subset_reps(n, subset, pw)
            if reps and (best is None or reps[0] < best):
                best = reps[0]
        if best is not None:
            return best
    return None


def kappa(n: int) -> int | None:
    """Length of ``n``, or None when ``n`` is not weakly prime-additive."""
    rep = shortest_representation(n)
    return None if rep is None else len(rep)


def is_prime_additive(n: int, primes: list[int] | None = None) -> dict[int, int] | None:
    """Exponent map of the lexicographically first representation using all prime divisors."""
    primes = sorted(primes if primes is not None else factorize(n).primes)
    if len(primes) < 2:
        return None
    pw = {p: _powers(p, n) for p in primes}
    reps = _subset_reps(n, tuple(primes), pw)
    return dict(reps[0]) if reps else None


def is_strongly_prime_additive(n: int, primes: list[int] | None = None) -> bool:
    primes = primes if primes is not None else factorize(n).primes
    if len(primes) < 2:
        return False
    total = 0
    for p in primes:
        # the unique a >= 1 with p**a < n <= p**(a+1)
        v = p
        while v * p < n:
            v *= p
        total += v
    return total == n


@dataclass(frozen=True)
class WpaRecord:
    n: int
    representation: Representation
    kappa: int
    weakly_pa: bool
    prime_additive: bool
    strongly_prime_additive: bool
    n_mod_8: int
    divisible_by: int | None = None

    def to_json(self) -> dict:
        d = {
            "n": str(self.n),
            "representation": [[str(p), e] for p, e in self.representation],
            "kappa": self.kappa,
            "flags": {
                "weakly_pa": self.weakly_pa,
                "prime_additive": self.prime_additive,
                "strongly_prime_additive": self.strongly_prime_additive,
            },
            "divisor_class": {"n_mod_8": self.n_mod_8, "div8": self.n_mod_8 == 0},
        }
        if self.divisible_by is not None:
            d["divisor_class"]["filter_m"] = self.divisible_by
        return d


def record_for(n: int, primes: list[int], m: int | None = None) -> WpaRecord | None:
    rep = shortest_representation(n, primes)
    if rep is None:
        return None
    pa = len(rep) == len(primes) or is_prime_additive(n, primes) is not None
    return WpaRecord(n, rep, len(rep), True, pa, is_strongly_prime_additive(n, primes), n % 8, m)


def _scan(lo: int, hi: int, m: int | None, spf: np.ndarray | None = None) -> list[WpaRecord]:
    if spf is None:
        spf = _spf_fast(hi)
    out = []
    step = m or 1
    start = -(-lo // step) * step
    for n in range(start, hi + 1, step):
        primes = prime_divisors(n, spf)
        if len(primes) < 3:
            continue
        rec = record_for(n, primes, m)
        if rec is not None:
            out.append(rec)
    return out


def _scan_job(args):
    return _scan(*args)


def enumerate_wpa(N: int, m: int | None = None, start: int = 2, workers: int = 1,
                  chunk: int = CHUNK, on_chunk=None) -> Iterator[WpaRecord]:
    """All weakly prime-additive ``n`` in ``[start, N]`` (with ``m | n`` if given), ascending.

    ``on_chunk(last_n)`` fires after each completed chunk; the CLI uses it
    to write resume checkpoints.
    """
    ranges = [(lo, min(lo + chunk - 1, N), m) for lo in range(max(start, 2), N + 1, chunk)]
    if workers > 1 and len(ranges) > 1:
        with ProcessPoolExecutor(workers) as pool:
            for (lo, hi, _), recs in zip(ranges, pool.map(_scan_job, ranges)):
                yield from recs
                if on_chunk:
                    on_chunk(hi)
    else:
        spf = _spf_fast(N) if ranges else None
        for lo, hi, _ in ranges:
            yield from _scan(lo, hi, m, spf)
            if on_chunk:
                on_chunk(hi)


def count_shortest(N: int, workers: int = 1) -> tuple[int, float]:
    """Number of ``n <= N`` of length 3, and that count over ``(log N)**3``."""
    count = sum(1 for r in enumerate_wpa(N, workers=workers) if r.kappa == 3)
    return count, count / math.log(N) ** 3


def check_no_shortest_div8(N: int, workers: int = 1) -> tuple[bool, list[WpaRecord]]:
    """No length-3 number below ``N`` should be divisible by 8."""
    exceptions = [r for r in enumerate_wpa(N, m=8, workers=workers) if r.kappa == 3]
    return not exceptions, exceptions
