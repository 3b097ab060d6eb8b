"""Primes in progressions, primitive-root witnesses, and Artin-type densities."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .arith import (
    DEFAULT_RHO_ITERATIONS,
    CongruenceSystem,
    Factorization,
    crt_solve,
    euler_phi,
    factorize,
    is_prime,
    kronecker,
    primality_policy,
)
from .errors import BoundExhausted, InvalidG, NotCoprime, PreconditionViolated

log = logging.getLogger(__name__)

DEFAULT_MAX_CANDIDATES = 10**6
SEGMENT = 1 << 20


# ---------------------------------------------------------------- sieving

@lru_cache(maxsize=8)
def _base_primes(limit: int) -> np.ndarray:
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve)


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    return _base_primes(n).astype(np.int64)


def primes_in_segment(lo: int, hi: int) -> np.ndarray:
    """Primes in ``[lo, hi)`` by sieving with primes up to sqrt(hi)."""
    lo = max(lo, 2)
    if hi <= lo:
        return np.zeros(0, dtype=np.int64)
    mark = np.ones(hi - lo, dtype=bool)
    for p in _base_primes(math.isqrt(hi - 1) + 1):
        p = int(p)
        start = max(p * p, -(-lo // p) * p)
        if start >= hi:
            continue
        mark[start - lo::p] = False
    return np.flatnonzero(mark).astype(np.int64) + lo


def segmented_primes(lo: int, hi: int, segment: int = SEGMENT) -> Iterator[np.ndarray]:
    for start in range(lo, hi, segment):
        yield primes_in_segment(start, min(start + segment, hi))


# ---------------------------------------------------------- progressions

def _combine(a: int, d: int, extra) -> tuple[int, int]:
    if math.gcd(a, d) != 1:
        raise NotCoprime(f"gcd({a}, {d}) != 1: the progression holds at most one prime")
    cons = [(a, d)]
    if extra is not None:
        cons += list(extra.constraints if isinstance(extra, CongruenceSystem) else extra)
    x, mod = crt_solve(cons).solution
    if math.gcd(x, mod) != 1:
        raise NotCoprime(f"combined class {x} mod {mod} is not coprime")
    return x, mod


def _candidates(x: int, mod: int, min_value: int, bound: int, max_candidates: int) -> Iterator[int]:
    n = x + max(0, -(-(min_value - x) // mod)) * mod
    for _ in range(max_candidates):
        if n > bound:
            return
        yield n
        n += mod


def find_prime_in_ap(a: int, d: int, min_value: int = 2, extra=None, bound: int = 10**30,
                     max_candidates: int = DEFAULT_MAX_CANDIDATES) -> int:
    """Smallest prime ``>= min_value`` with ``p = a (mod d)`` and any ``extra`` congruences."""
    x, mod = _combine(a, d, extra)
    for n in _candidates(x, mod, min_value, bound, max_candidates):
        if is_prime(n):
            return n
    raise BoundExhausted(f"no prime = {x} mod {mod} in [{min_value}, {bound}] within the candidate cap",
                         bound=bound)


def is_primitive_root(g: int, p: int, fac: Factorization | None = None) -> bool:
    if p == 2:
        return g % 2 == 1
    if g % p == 0:
        return False
    fac = fac or factorize(p - 1)
    return all(pow(g, (p - 1) // ell, p) != 1 for ell in fac.primes)


# ------------------------------------------------------------ witnesses

@dataclass(frozen=True)
class StarWitness:
    """A prime ``s = a (mod f)`` of which ``g`` is a primitive root."""

    a: int
    f: int
    g: int
    s: int
    order_certificate: Factorization
    power_checks: tuple[tuple[int, int], ...]
    primality_policy: str

    def revalidate(self) -> list[str]:
        """Re-derive every claim from scratch; returns the list of failures."""
        bad = []
        if (self.s - self.a) % self.f:
            bad.append("congruence")
        if not is_prime(self.s):
            bad.append("primality")
        cert = self.order_certificate
        if cert.n != self.s - 1 or not cert.is_valid():
            bad.append("factorization of s-1")
        for ell, _ in cert.factors:
            if pow(self.g, (self.s - 1) // ell, self.s) == 1:
                bad.append(f"g^((s-1)/{ell}) = 1")
        return bad

    def to_json(self) -> dict:
        return {
            "a": str(self.a), "f": str(self.f), "g": str(self.g), "s": str(self.s),
            "s_minus_1_factors": [[str(p), e] for p, e in self.order_certificate.factors],
            "power_checks": [[str(ell), str(v)] for ell, v in self.power_checks],
            "primality_policy": self.primality_policy,
        }


def check_star_hypotheses(a: int, f: int, g: int) -> None:
    if math.gcd(a, f) != 1:
        raise PreconditionViolated(f"gcd(a, f) = gcd({a}, {f}) != 1", clause="(a,f)=1")
    if f % 4:
        raise PreconditionViolated(f"4 does not divide f = {f}", clause="4|f")
    if g % 2 == 0 or not is_prime(g):
        raise PreconditionViolated(f"g = {g} is not an odd prime", clause="g odd prime")
    if f % g:
        raise PreconditionViolated(f"g = {g} does not divide f = {f}", clause="g|f")
    if kronecker(g, a) != -1:
        raise PreconditionViolated(f"kronecker({g}, {a}) = {kronecker(g, a)}, need -1", clause="(g/a)=-1")


def _witness(a, f, g, s, fac) -> StarWitness:
    checks = tuple((ell, pow(g, (s - 1) // ell, s)) for ell in fac.primes)
    return StarWitness(a, f, g, s, fac, checks, primality_policy(s))


def iter_star_witnesses(a: int, f: int, g: int, bound: int = 10**30,
                        max_candidates: int = DEFAULT_MAX_CANDIDATES,
                        factor_iterations: int = DEFAULT_RHO_ITERATIONS) -> Iterator[StarWitness]:
    """All witnesses ``s <= bound`` in increasing order.

    Running out of candidates ends the iteration silently; callers that
    need one witness turn that into ``BoundExhausted``.
    """
    check_star_hypotheses(a, f, g)
    for s in _candidates(a % f, f, 2, bound, max_candidates):
        if not is_prime(s):
            continue
        fac = factorize(s - 1, factor_iterations)
        if is_primitive_root(g, s, fac):
            yield _witness(a, f, g, s, fac)


def find_star_witness(a: int, f: int, g: int, bound: int = 10**30,
                      max_candidates: int = DEFAULT_MAX_CANDIDATES) -> StarWitness:
    for w in iter_star_witnesses(a, f, g, bound, max_candidates):
        return w
    raise BoundExhausted(f"no witness for (a={a}, f={f}, g={g}) up to {bound}; inconclusive", bound=bound)


# -------------------------------------------------------------- density

def _iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 2:
        return n
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def perfect_power_exponent(g: int) -> int:
    """Largest ``h`` such that ``g`` is an ``h``-th power of an integer."""
    n = abs(g)
    best = 1
    for k in range(2, max(n.bit_length(), 2) + 1):
        if g < 0 and k % 2 == 0:
            continue
        r = _iroot(n, k)
        if r > 1 and r**k == n:
            best = k
    return best


def mobius(n: int) -> int:
    fac = factorize(abs(n))
    if any(e > 1 for _, e in fac.factors):
        return 0
    return -1 if len(fac.factors) % 2 else 1


@dataclass(frozen=True)
class ArtinParams:
    a: int
    f: int
    g: int
    h: int
    g1: int
    g2: int
    beta: int
    gamma1: int


@dataclass(frozen=True)
class DensityReport:
    params: ArtinParams
    A_value: float
    delta: float
    truncation_bound: int
    tail_error: float
    corrected: bool

    def to_json(self) -> dict:
        p = self.params
        return {
            "a": str(p.a), "f": str(p.f), "g": str(p.g), "h": p.h, "g1": str(p.g1), "g2": str(p.g2),
            "beta": str(p.beta), "gamma1": str(p.gamma1), "A": self.A_value, "delta": self.delta,
            "truncation": self.truncation_bound, "tail_error": self.tail_error, "corrected": self.corrected,
        }


def artin_params(a: int, f: int, g: int) -> ArtinParams:
    if g == -1 or g == 0 or (g > 0 and math.isqrt(g) ** 2 == g):
        raise InvalidG(f"g = {g} is -1 or a square")
    if math.gcd(a, f) != 1:
        raise NotCoprime(f"gcd({a}, {f}) != 1")
    h = perfect_power_exponent(g)
    g1 = -1 if g < 0 else 1
    g2 = 1
    for p, e in factorize(abs(g)).factors:
        g1 *= p ** (e % 2)
        g2 *= p ** (e // 2)
    beta = g1 // math.gcd(g1, f)
    gamma1 = (-1) ** (((beta - 1) // 2) % 2) * math.gcd(f, g1) if beta % 2 else 1
    return ArtinParams(a, f, g, h, g1, g2, beta, gamma1)


def _log_euler_tail(truncation: int, exclude) -> float:
    """log of prod over primes p <= truncation outside ``exclude`` of 1 - 1/(p(p-1))."""
    ps = primes_up_to(truncation)
    ps = ps[~np.isin(ps, list(exclude))].astype(np.float64)
    return float(np.sum(np.log1p(-1.0 / (ps * (ps - 1.0)))))


def _prime_divisors(n: int) -> list[int]:
    return factorize(abs(n)).primes if n else []


def artin_density(a: int, f: int, g: int, truncation: int = 10**6) -> DensityReport:
    """Density of primes ``p = a (mod f)`` having ``g`` as a primitive root (GRH-conditional formula)."""
    if truncation < 2:
        raise PreconditionViolated("truncation must be >= 2")
    par = artin_params(a, f, g)
    h = par.h
    if math.gcd(math.gcd(a - 1, f), h) != 1:
        A = 0.0
    else:
        A = 1.0
        for p in _prime_divisors(math.gcd(a - 1, f)):
            A *= 1 - 1 / p
        for p in _prime_divisors(h):
            if f % p:
                A *= 1 - 1 / (p - 1)
        A *= math.exp(_log_euler_tail(truncation, set(_prime_divisors(f)) | set(_prime_divisors(h))))
    g1 = par.g1
    corrected = g1 % 4 == 1 or (g1 % 4 == 2 and f % 8 == 0) or (g1 % 4 == 3 and f % 4 == 0)
    delta = A / euler_phi(f)
    if corrected:
        denom = 1
        for p in _prime_divisors(par.beta):
            denom *= (p - 1) if h % p == 0 else (p * p - p - 1)
        delta *= 1 - kronecker(par.gamma1, a) * mobius(par.beta) / denom
    return DensityReport(par, A, delta, truncation, delta / truncation, corrected)


def corollary_density(a: int, f: int, g: int, truncation: int = 10**6) -> DensityReport:
    """Special case ``beta = h = 1``, ``gamma1 = g``: density ``2 A / phi(f)``, always positive."""
    check_star_hypotheses(a, f, g)
    A = 1.0
    for p in factorize(math.gcd(a - 1, f)).primes:
        A *= 1 - 1 / p
    for p in primes_up_to(truncation).tolist():
        if f % p:
            A *= 1 - 1 / (p * (p - 1))
    delta = 2 * A / euler_phi(f)
    par = ArtinParams(a, f, g, 1, g, 1, 1, g)
    return DensityReport(par, A, delta, truncation, delta / truncation, True)


# ------------------------------------------------------------ counting

def _vpow(base: np.ndarray, exp: np.ndarray, mod: np.ndarray) -> np.ndarray:
    """Elementwise ``base**exp % mod`` for moduli below 2**32."""
    result = np.ones_like(mod)
    b = base % mod
    e = exp.copy()
    while e.any():
        odd = (e & 1).astype(bool)
        result[odd] = result[odd] * b[odd] % mod[odd]
        b = b * b % mod
        e >>= 1
    return result


def primitive_root_mask(g: int, ps: np.ndarray) -> np.ndarray:
    """Boolean mask: is ``g`` a primitive root of each odd prime in ``ps`` (all < 2**32)."""
    ps = ps.astype(np.uint64)
    if ps.size == 0:
        return np.zeros(0, dtype=bool)
    base = (np.int64(g) % ps.astype(np.int64)).astype(np.uint64)
    ok = base != 0
    pm1 = ps - np.uint64(1)
    cof = pm1.copy()
    limit = math.isqrt(int(ps.max())) + 1
    for ell in _base_primes(limit):
        ell = np.uint64(ell)
        hit = cof % ell == 0
        if not hit.any():
            continue
        idx = np.flatnonzero(hit & ok)
        if idx.size:
            v = _vpow(base[idx], pm1[idx] // ell, ps[idx])
            ok[idx[v == 1]] = False
        while hit.any():
            cof[hit] //= ell
            hit = cof % ell == 0
    idx = np.flatnonzero((cof > 1) & ok)
    if idx.size:
        v = _vpow(base[idx], pm1[idx] // cof[idx], ps[idx])
        ok[idx[v == 1]] = False
    return ok


def _count_segment(args) -> tuple[int, int]:
    lo, hi, f, a, g = args
    ps = primes_in_segment(lo, hi)
    if f > 1:
        ps = ps[ps % f == a % f]
    total = int(ps.size)
    count = 0
    if ps.size and ps[0] == 2:
        count += int(g % 2 == 1)
        ps = ps[1:]
    if ps.size:
        if int(ps[-1]) < 1 << 32:
            count += int(primitive_root_mask(g, ps).sum())
        else:
            count += sum(is_primitive_root(g, int(p)) for p in ps)
    return count, total


def count_pi_g(x: int, f: int, a: int, g: int, workers: int = 1,
               segment: int = SEGMENT) -> tuple[int, int]:
    """``(#{p <= x : p = a mod f, g primitive root mod p}, #{p <= x : p = a mod f})``."""
    if math.gcd(a, f) != 1:
        raise NotCoprime(f"gcd({a}, {f}) != 1")
    jobs = [(lo, min(lo + segment, x + 1), f, a, g) for lo in range(2, x + 1, segment)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_count_segment, jobs))
    else:
        parts = [_count_segment(j) for j in jobs]
    return sum(c for c, _ in parts), sum(t for _, t in parts)


def convergence_report(cases, x: int = 10**6, truncation: int = 10**6) -> list[dict]:
    """Compare empirical ``count / pi(x)`` with the density for each ``(a, f, g)``.

    The band ``5 / sqrt(pi(x; f, a))`` is heuristic; misses are logged as
    warnings and never raised.
    """
    pi_x = int(primes_up_to(x).size)
    out = []
    for a, f, g in cases:
        dens = artin_density(a, f, g, truncation).delta
        count, in_class = count_pi_g(x, f, a, g)
        ratio = count / pi_x
        band = 5 / math.sqrt(in_class) if in_class else math.inf
        ok = abs(ratio - dens) < band
        if not ok:
            log.warning("density drift for (a=%d, f=%d, g=%d): ratio %.5f vs delta %.5f (band %.5f)",
                        a, f, g, ratio, dens, band)
        out.append({"a": a, "f": f, "g": g, "count": count, "in_class": in_class, "pi_x": pi_x,
                    "ratio": ratio, "delta": dens, "band": band, "within_band": ok})
    return out
