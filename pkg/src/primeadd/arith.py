"""Exact integer and modular arithmetic.

Everything here is a pure function of its arguments. Integers are Python
ints, so there is no word-size limit anywhere except where a budget is
stated explicitly (factoring, discrete logarithms).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .errors import (
    BoundExceeded,
    BoundExhausted,
    Inconsistent,
    NotCoprime,
    PreconditionViolated,
    UndefinedSymbol,
)

# Strong-pseudoprime bases 2..37 are deterministic far beyond 2^64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
DETERMINISTIC_LIMIT = 1 << 64
PROBABILISTIC_ROUNDS = 64

POLICY_TRIAL = "trial-division"
POLICY_DETERMINISTIC = "miller-rabin-deterministic-2^64"
POLICY_PROBABILISTIC = f"miller-rabin-{PROBABILISTIC_ROUNDS}-rounds-error<=4^-{PROBABILISTIC_ROUNDS}"

DEFAULT_RHO_ITERATIONS = 10**7
TRIAL_CUTOFF = 1000

_SMALL_PRIMES = [p for p in range(2, TRIAL_CUTOFF) if all(p % d for d in range(2, math.isqrt(p) + 1))]


class TwoAdicSplit(NamedTuple):
    k: int
    m1: int


@dataclass(frozen=True)
class Factorization:
    """Prime factorization ``n = prod(p**e)`` with primes in increasing order."""

    n: int
    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionViolated(f"factorization of non-positive {self.n}")
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise PreconditionViolated(f"malformed factor list {self.factors}")
            last = p
            prod *= p**e
        if prod != self.n:
            raise PreconditionViolated(f"factors multiply to {prod}, not {self.n}")

    @classmethod
    def from_dict(cls, n: int, d: dict[int, int]) -> "Factorization":
        return cls(n, tuple(sorted(d.items())))

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    def is_valid(self) -> bool:
        return all(is_prime(p) for p, _ in self.factors)


@dataclass(frozen=True)
class CongruenceSystem:
    constraints: tuple[tuple[int, int], ...]
    solution: tuple[int, int] | None = field(default=None)

    @property
    def residue(self) -> int:
        return self.solution[0]

    @property
    def modulus(self) -> int:
        return self.solution[1]


def v2_split(m: int) -> TwoAdicSplit:
    if m < 1:
        raise PreconditionViolated(f"v2_split needs m >= 1, got {m}")
    k = (m & -m).bit_length() - 1
    return TwoAdicSplit(k, m >> k)


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    """``base**exponent mod modulus`` with the result in ``[0, modulus)``."""
    if modulus < 1:
        raise PreconditionViolated("modulus must be positive")
    if exponent < 0:
        raise PreconditionViolated("negative exponent")
    return pow(base, exponent, modulus)


def _as_factorization(f) -> Factorization:
    return f if isinstance(f, Factorization) else factorize(f)


def euler_phi(f: Factorization | int) -> int:
    result = 1
    for p, e in _as_factorization(f).factors:
        result *= p ** (e - 1) * (p - 1)
    return result


def carmichael_lambda(f: Factorization | int) -> int:
    result = 1
    for p, e in _as_factorization(f).factors:
        if p == 2 and e >= 3:
            t = 1 << (e - 2)
        else:
            t = p ** (e - 1) * (p - 1)
        result = math.lcm(result, t)
    return result


def _miller_rabin(n: int, a: int, d: int, s: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def primality_policy(n: int) -> str:
    """Which test vouches for the primality answer on ``n``."""
    if n < TRIAL_CUTOFF * TRIAL_CUTOFF:
        return POLICY_TRIAL
    if n < DETERMINISTIC_LIMIT:
        return POLICY_DETERMINISTIC
    return POLICY_PROBABILISTIC


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < TRIAL_CUTOFF * TRIAL_CUTOFF:
        return True
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    if n < DETERMINISTIC_LIMIT:
        return all(_miller_rabin(n, a, d, s) for a in _MR_BASES)
    # seeded by n so repeated runs agree
    rng = random.Random(n)
    bases = list(_MR_BASES) + [rng.randrange(41, n - 1) for _ in range(PROBABILISTIC_ROUNDS - len(_MR_BASES))]
    return all(_miller_rabin(n, a, d, s) for a in bases)


def next_prime(n: int) -> int:
    """Smallest prime ``>= n``."""
    if n <= 2:
        return 2
    n |= 1
    while not is_prime(n):
        n += 2
    return n


def _brent_rho(n: int, budget: list[int]) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                steps = min(m, r - k)
                for _ in range(steps):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += steps
            budget[0] -= r
            if budget[0] < 0:
                raise BoundExceeded(f"factoring budget exhausted on {n}")
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int, max_iterations: int = DEFAULT_RHO_ITERATIONS) -> Factorization:
    """Complete factorization: trial division below 1000, Brent-rho above.

    Raises ``BoundExceeded`` once rho has spent ``max_iterations`` steps.
    """
    if n < 1:
        raise PreconditionViolated(f"cannot factor {n}")
    out: dict[int, int] = {}
    m = n
    for p in _SMALL_PRIMES:
        if p * p > m:
            break
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    budget = [max_iterations]
    stack = [m] if m > 1 else []
    while stack:
        x = stack.pop()
        if is_prime(x):
            out[x] = out.get(x, 0) + 1
            continue
        r = math.isqrt(x)
        if r * r == x:
            stack += [r, r]
            continue
        d = _brent_rho(x, budget)
        stack += [d, x // d]
    return Factorization.from_dict(n, out)


def kronecker(a: int, b: int) -> int:
    """Kronecker symbol ``(a/b)`` for any integers except ``a = b = 0``."""
    if a == 0 and b == 0:
        raise UndefinedSymbol("(0/0) is undefined")
    if b == 0:
        return 1 if abs(a) == 1 else 0
    if a % 2 == 0 and b % 2 == 0:
        return 0
    v = (b & -b).bit_length() - 1
    b >>= v
    k = 1
    if v % 2 == 1 and a % 8 in (3, 5):
        k = -1
    if b < 0:
        b = -b
        if a < 0:
            k = -k
    # Jacobi symbol (a/b), b odd positive
    a %= b
    while a:
        while a % 2 == 0:
            a //= 2
            if b % 8 in (3, 5):
                k = -k
        a, b = b, a
        if a % 4 == 3 and b % 4 == 3:
            k = -k
        a %= b
    return k if b == 1 else 0


def crt_solve(constraints: Iterable[Sequence[int]]) -> CongruenceSystem:
    """General CRT: moduli need not be coprime.

    The answer is the canonical residue modulo the lcm. On a clash the
    error names a pair ``(i, j)`` of constraints that already disagree
    modulo ``gcd(m_i, m_j)``.
    """
    cons = tuple((int(r), int(m)) for r, m in constraints)
    if not cons:
        raise PreconditionViolated("empty congruence system")
    x, mod = 0, 1
    for j, (r, m) in enumerate(cons):
        if m < 1:
            raise PreconditionViolated(f"modulus {m} in constraint {j} is not positive")
        r %= m
        g = math.gcd(mod, m)
        if (r - x) % g:
            for i in range(j):
                ri, mi = cons[i]
                if (ri - r) % math.gcd(mi, m):
                    raise Inconsistent(i, j)
            raise Inconsistent(j, j)  # pragma: no cover - pairwise consistency is sufficient
        step = (r - x) // g * pow(mod // g, -1, m // g) if m // g > 1 else 0
        x += mod * (step % (m // g))
        mod = mod // g * m
        x %= mod
    return CongruenceSystem(cons, (x, mod))


def multiplicative_order(g: int, n: int, group_order: Factorization | None = None) -> int:
    """Least ``t >= 1`` with ``g**t = 1 (mod n)``.

    ``n`` is normally an odd prime. For other moduli pass the
    factorization of a multiple of the order (phi(n) works).
    """
    if n == 1:
        return 1
    if math.gcd(g, n) != 1:
        raise NotCoprime(f"gcd({g}, {n}) != 1")
    if group_order is None:
        group_order = factorize(n - 1) if is_prime(n) else factorize(euler_phi(n))
    t = group_order.n
    for p, _ in group_order.factors:
        while t % p == 0 and pow(g, t // p, n) == 1:
            t //= p
    return t


DLOG_TABLE_CAP = 1 << 22
DLOG_LINEAR_LIMIT = 10**6


def _bsgs(g: int, h: int, n: int, order: int, table_cap: int) -> int:
    """Exponent ``x`` in ``[0, order)`` with ``g**x = h`` in a cyclic group of the given order."""
    m = min(math.isqrt(order) + 1, table_cap)
    giant = -(-order // m)
    if giant > 64 * table_cap:
        raise BoundExhausted(f"discrete log in subgroup of order {order} exceeds the memory cap", bound=table_cap)
    table = {}
    e = 1
    for j in range(m):
        table.setdefault(e, j)
        e = e * g % n
    factor = pow(g, -m, n)
    y = h % n
    for i in range(giant):
        j = table.get(y)
        if j is not None:
            return (i * m + j) % order
        y = y * factor % n
    raise ArithmeticError("element not in subgroup")


def discrete_log(g: int, h: int, n: int, group_order: Factorization | None = None,
                 table_cap: int = DLOG_TABLE_CAP) -> int:
    """Smallest ``x >= 0`` with ``g**x = h (mod n)``.

    ``group_order`` must factor the order of ``g`` or a multiple of it
    (``n - 1`` for a prime ``n``). Small groups are scanned linearly;
    otherwise Pohlig-Hellman reduces to prime-order baby-step giant-step.
    """
    h %= n
    if group_order is None:
        group_order = factorize(n - 1)
    order = multiplicative_order(g, n, group_order)
    if order < DLOG_LINEAR_LIMIT:
        e = 1
        for x in range(order):
            if e == h:
                return x
            e = e * g % n
        raise ArithmeticError(f"{h} is not a power of {g} mod {n}")
    residues = []
    for p, _ in factorize(order).factors:
        e = 0
        while order % p ** (e + 1) == 0:
            e += 1
        pe = p**e
        cofactor = order // pe
        gi = pow(g, cofactor, n)
        hi = pow(h, cofactor, n)
        gamma = pow(gi, p ** (e - 1), n)
        x = 0
        for k in range(e):
            hk = pow(pow(gi, -x, n) * hi % n, p ** (e - 1 - k), n)
            dk = _bsgs(gamma, hk, n, p, table_cap)
            x += dk * p**k
        residues.append((x, pe))
    x = crt_solve(residues).residue
    if pow(g, x, n) != h:
        raise ArithmeticError(f"{h} is not a power of {g} mod {n}")
    return x
