import logging
import math
import random

import numpy as np
import pytest
import sympy

from primeadd.arith import is_prime, kronecker
from primeadd.errors import BoundExhausted, InvalidG, NotCoprime, PreconditionViolated
from primeadd.primes import (
    artin_density,
    artin_params,
    check_star_hypotheses,
    convergence_report,
    corollary_density,
    count_pi_g,
    find_prime_in_ap,
    find_star_witness,
    is_primitive_root,
    iter_star_witnesses,
    mobius,
    perfect_power_exponent,
    primes_in_segment,
    primes_up_to,
    primitive_root_mask,
    segmented_primes,
)


def test_sieve_matches_sympy():
    assert primes_up_to(1).tolist() == []
    assert primes_up_to(2).tolist() == [2]
    assert primes_up_to(10**4).tolist() == list(sympy.primerange(2, 10**4 + 1))
    lo, hi = 10**9, 10**9 + 5000
    assert primes_in_segment(lo, hi).tolist() == list(sympy.primerange(lo, hi))
    chunks = np.concatenate(list(segmented_primes(0, 10**5, segment=777)))
    assert chunks.tolist() == list(sympy.primerange(0, 10**5))


def test_find_prime_in_ap_examples():
    assert find_prime_in_ap(1, 24) == 73
    assert find_prime_in_ap(3, 8, extra=[(1, 219)]) == 3067
    with pytest.raises(NotCoprime):
        find_prime_in_ap(2, 4)


def test_find_prime_in_ap_minimality():
    rng = random.Random(5)
    for _ in range(100):
        d = rng.randint(1, 500)
        a = rng.randint(0, d - 1)
        if math.gcd(a, d) != 1:
            continue
        p = find_prime_in_ap(a, d)
        assert is_prime(p) and (p - a) % d == 0
        assert not any(is_prime(n) for n in range(2, p) if (n - a) % d == 0)


def test_find_prime_in_ap_bound():
    with pytest.raises(BoundExhausted):
        find_prime_in_ap(1, 10**6, bound=10**6)
    with pytest.raises(BoundExhausted):
        find_prime_in_ap(1, 24, max_candidates=2)


def test_is_primitive_root_examples():
    assert is_primitive_root(3, 7)
    assert not is_primitive_root(2, 7)
    assert is_primitive_root(5, 2) and is_primitive_root(1, 2)
    for p in sympy.primerange(3, 300):
        for g in range(1, 30):
            assert is_primitive_root(g, p) == (g % p != 0 and sympy.is_primitive_root(g, p))


def test_primitive_root_mask_matches_scalar():
    ps = primes_up_to(200000)[1:]
    for g in (2, 3, 5, 6, 7, 10, -3, 12):
        mask = primitive_root_mask(g, ps)
        sample = np.random.default_rng(g % 97).choice(ps.size, 500, replace=False)
        for i in sample:
            assert mask[i] == is_primitive_root(g % int(ps[i]), int(ps[i]))
    big = np.array([4294967291, 4294967279, 4294967231], dtype=np.int64)
    assert primitive_root_mask(2, big).tolist() == [is_primitive_root(2, int(p)) for p in big]


def test_star_witness_examples():
    w = find_star_witness(7, 12, 3, bound=10**4)
    assert w.s == 7 and w.revalidate() == []
    with pytest.raises(PreconditionViolated) as exc:
        find_star_witness(1, 12, 3, bound=10**4)
    assert exc.value.clause == "(g/a)=-1"


@pytest.mark.parametrize("a, f, g, clause", [
    (2, 12, 3, "(a,f)=1"), (1, 6, 3, "4|f"), (5, 12, 9, "g odd prime"), (1, 20, 3, "g|f"), (13, 12, 3, "(g/a)=-1"),
])
def test_star_hypothesis_clauses(a, f, g, clause):
    with pytest.raises(PreconditionViolated) as exc:
        check_star_hypotheses(a, f, g)
    assert exc.value.clause == clause


def test_star_witnesses_are_minimal_and_revalidate():
    ws = []
    for w in iter_star_witnesses(5, 12, 3, bound=5000):
        ws.append(w.s)
        assert w.revalidate() == []
    brute = [s for s in range(5, 5001, 12) if sympy.isprime(s) and sympy.is_primitive_root(3, s)]
    assert ws == brute


def test_star_witness_tamper_detected():
    from dataclasses import replace
    w = find_star_witness(7, 12, 3)
    assert "congruence" in replace(w, s=w.s + 1).revalidate()
    w2 = find_star_witness(5, 12, 3)
    bad = replace(w2, g=w2.g * w2.g)
    assert bad.revalidate()


def test_artin_params():
    p = artin_params(1, 1, 2)
    assert (p.h, p.g1, p.g2, p.beta, p.gamma1) == (1, 2, 1, 2, 1)
    p = artin_params(1, 4, 12)
    assert (p.h, p.g1, p.g2) == (1, 3, 2)
    assert artin_params(1, 1, 8).h == 3
    assert artin_params(1, 1, -8).h == 3
    assert artin_params(1, 1, -4).h == 1
    with pytest.raises(InvalidG):
        artin_params(1, 1, 9)
    with pytest.raises(InvalidG):
        artin_params(1, 1, -1)


def test_helpers():
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert perfect_power_exponent(64) == 6 and perfect_power_exponent(12) == 1
    assert perfect_power_exponent(-27) == 3 and perfect_power_exponent(-64) == 3


def test_artin_constant():
    r = artin_density(1, 1, 2, 10**6)
    assert abs(r.delta - 0.3739558) < 1e-6
    assert not r.corrected
    assert r.tail_error == pytest.approx(r.delta / 10**6)


def test_density_zero_case():
    # g = 2^3 has h = 3, and gcd(a-1, f, h) = gcd(3, 9, 3) = 3
    r = artin_density(4, 9, 8, 10**4)
    assert r.params.h == 3 and r.A_value == 0 and r.delta == 0


def test_corollary_example_and_truncation_stability():
    c = corollary_density(7, 12, 3)
    a = artin_density(7, 12, 3)
    assert c.delta > 0
    assert abs(c.delta - a.delta) <= 2 * max(a.tail_error, c.tail_error)
    coarse = artin_density(1, 1, 2, 10).delta
    fine = artin_density(1, 1, 2, 10**6).delta
    assert abs(coarse - fine) <= 1 / 10


def _random_star_inputs(rng, n):
    out = []
    while len(out) < n:
        g = rng.choice([3, 5, 7, 11, 13])
        f = 4 * g * rng.randint(1, 12)
        a = rng.randrange(1, f)
        if math.gcd(a, f) == 1 and kronecker(g, a) == -1:
            out.append((a, f, g))
    return out


def test_density_agreement_on_random_inputs():
    rng = random.Random(2024)
    for a, f, g in _random_star_inputs(rng, 50):
        c = corollary_density(a, f, g, 10**5)
        d = artin_density(a, f, g, 10**5)
        assert abs(c.delta - d.delta) <= 2 * max(c.tail_error, d.tail_error), (a, f, g)


def test_count_pi_g_examples():
    assert count_pi_g(20, 4, 3, 2) == (3, 4)
    assert count_pi_g(2, 4, 3, 2) == (0, 0)
    with pytest.raises(NotCoprime):
        count_pi_g(100, 4, 2, 3)


def test_count_pi_g_against_naive():
    for x, f, a, g in [(5000, 1, 0, 2), (5000, 12, 7, 3), (3000, 5, 2, -3), (3000, 8, 3, 10)]:
        ps = [p for p in sympy.primerange(2, x + 1) if f == 1 or p % f == a % f]
        naive = sum(1 for p in ps if g % p and (p == 2 and g % 2 == 1 or p > 2 and sympy.is_primitive_root(g % p, p)))
        assert count_pi_g(x, f, a, g, segment=997) == (naive, len(ps))


def test_count_pi_g_workers_agree():
    assert count_pi_g(300000, 1, 0, 2, workers=2, segment=50000) == count_pi_g(300000, 1, 0, 2)


def test_convergence_report_only_warns(caplog):
    with caplog.at_level(logging.WARNING):
        rows = convergence_report([(1, 1, 2), (7, 12, 3)], x=10**5, truncation=10**5)
    assert len(rows) == 2
    for row in rows:
        assert set(row) >= {"ratio", "delta", "within_band"}
    # a deliberately tiny range must not raise even when far from the band
    convergence_report([(1, 1, 2)], x=30, truncation=10)
