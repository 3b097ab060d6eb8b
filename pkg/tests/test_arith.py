import math

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from primeadd.arith import (
    Factorization,
    carmichael_lambda,
    crt_solve,
    discrete_log,
    euler_phi,
    factorize,
    is_prime,
    kronecker,
    mod_pow,
    multiplicative_order,
    next_prime,
    primality_policy,
    v2_split,
)
from primeadd.errors import (
    BoundExceeded,
    Inconsistent,
    NotCoprime,
    PreconditionViolated,
    UndefinedSymbol,
)


@pytest.mark.parametrize("m, expected", [(8, (3, 1)), (7, (0, 7)), (12, (2, 3)), (1, (0, 1))])
def test_v2_split_examples(m, expected):
    assert tuple(v2_split(m)) == expected


def test_v2_split_rejects_zero():
    with pytest.raises(PreconditionViolated):
        v2_split(0)


@given(st.integers(1, 10**30))
def test_v2_split_reassembles(m):
    k, m1 = v2_split(m)
    assert m1 % 2 == 1 and (1 << k) * m1 == m


def test_mod_pow_examples():
    assert mod_pow(12345, 0, 7) == 1
    assert mod_pow(12345, 1, 7) == 12345 % 7
    assert mod_pow(3, 4, 10) == 1
    assert mod_pow(-3, 3, 7) == (-27) % 7
    with pytest.raises(PreconditionViolated):
        mod_pow(2, 3, 0)


@pytest.mark.parametrize("n, phi", [(1, 1), (24, 8), (7, 6), (2**40, 2**39)])
def test_euler_phi_examples(n, phi):
    assert euler_phi(n) == phi


@given(st.integers(1, 2000))
def test_euler_phi_counts_units(n):
    assert euler_phi(n) == sum(1 for r in range(1, n + 1) if math.gcd(r, n) == 1)


@settings(max_examples=200)
@given(st.integers(2, 3000), st.integers(-10**6, 10**6))
def test_fermat_euler(n, a):
    if math.gcd(a, n) == 1:
        assert mod_pow(a, euler_phi(n), n) == 1
        assert mod_pow(a, carmichael_lambda(n), n) == 1


@given(st.integers(1, 10**4))
def test_carmichael_divides_phi(n):
    assert euler_phi(n) % carmichael_lambda(n) == 0


@pytest.mark.parametrize("n, factors", [(1, {}), (12, {2: 2, 3: 1}), (1315, {5: 1, 263: 1})])
def test_factorize_examples(n, factors):
    assert factorize(n).as_dict() == factors


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10**18))
def test_factorize_matches_sympy(n):
    f = factorize(n)
    assert f.as_dict() == sympy.factorint(n)
    assert f.is_valid()


def test_factorize_semiprime_and_budget():
    p, q = 1000000007, 998244353
    assert factorize(p * q).as_dict() == {q: 1, p: 1}
    big = sympy.nextprime(10**20) * sympy.nextprime(10**21)
    with pytest.raises(BoundExceeded):
        factorize(big, max_iterations=10)


def test_factorization_validates():
    with pytest.raises(PreconditionViolated):
        Factorization(12, ((2, 2), (3, 2)))
    with pytest.raises(PreconditionViolated):
        Factorization(12, ((3, 1), (2, 2)))


@pytest.mark.parametrize("n, expected", [(2, True), (2203, True), (1315, False), (1, False), (0, False), (-7, False)])
def test_is_prime_examples(n, expected):
    assert is_prime(n) is expected


def test_is_prime_against_sympy_and_hard_composites():
    for n in range(10**4):
        assert is_prime(n) == sympy.isprime(n)
    # strong pseudoprimes to many small bases
    for n in (3215031751, 3825123056546413051, 318665857834031151167461):
        assert not is_prime(n)
    assert is_prime(2**61 - 1) and is_prime(2**89 - 1) and is_prime(2**127 - 1)
    assert not is_prime((2**61 - 1) * (2**89 - 1))


@settings(max_examples=200)
@given(st.integers(0, 2**80))
def test_is_prime_random_matches_sympy(n):
    assert is_prime(n) == sympy.isprime(n)


def test_primality_policy_tiers():
    assert primality_policy(97) == "trial-division"
    assert "deterministic" in primality_policy(2**40 + 15)
    assert "rounds" in primality_policy(2**70 + 25)


def test_next_prime():
    # smallest prime >= n
    assert next_prime(1) == 2 and next_prime(2) == 2 and next_prime(2202) == 2203


@pytest.mark.parametrize("a, b, expected", [(-2, 3, 1), (-2, 5, -1), (3, 7, -1), (2, 1, 1), (0, 1, 1), (5, 0, 0), (1, 0, 1)])
def test_kronecker_examples(a, b, expected):
    assert kronecker(a, b) == expected


def test_kronecker_undefined_at_zero_zero():
    with pytest.raises(UndefinedSymbol):
        kronecker(0, 0)


def test_kronecker_matches_sympy_jacobi_for_odd_positive():
    for b in range(1, 300, 2):
        for a in range(-150, 150):
            assert kronecker(a, b) == sympy.jacobi_symbol(a, b)


def test_kronecker_negative_lower_argument_convention():
    # (a/-1) is the sign of a, and (0/-1) = 1
    assert kronecker(5, -1) == 1 and kronecker(-5, -1) == -1 and kronecker(0, -1) == 1
    assert kronecker(-3, -7) == kronecker(-3, 7) * kronecker(-3, -1)


def test_crt_examples():
    sol = crt_solve([(0, 1)])
    assert (sol.residue, sol.modulus) == (0, 1)
    with pytest.raises(Inconsistent) as exc:
        crt_solve([(1, 2), (0, 2)])
    assert exc.value.pair == (0, 1)
    sol = crt_solve([(3, 8), (-2, 315)])
    assert (sol.residue, sol.modulus) == (2203, 2520)


def test_crt_names_clashing_pair():
    with pytest.raises(Inconsistent) as exc:
        crt_solve([(1, 3), (2, 5), (1, 7), (0, 10)])
    assert exc.value.pair == (1, 3)


@settings(max_examples=300)
@given(st.lists(st.tuples(st.integers(-50, 50), st.integers(1, 24)), min_size=1, max_size=4))
def test_crt_against_scan(cons):
    lcm = math.lcm(*(m for _, m in cons))
    hits = [x for x in range(lcm) if all((x - r) % m == 0 for r, m in cons)]
    if hits:
        sol = crt_solve(cons)
        assert (sol.residue, sol.modulus) == (hits[0], lcm)
        assert len(hits) == 1
    else:
        with pytest.raises(Inconsistent):
            crt_solve(cons)


@pytest.mark.parametrize("g, n, order", [(1, 7, 1), (3, 7, 6), (2, 7, 3), (2, 2**31 - 1, 31)])
def test_order_examples(g, n, order):
    assert multiplicative_order(g, n) == order


def test_order_not_coprime():
    with pytest.raises(NotCoprime):
        multiplicative_order(7, 7)


def test_order_composite_modulus_and_sympy():
    for n in range(2, 400):
        for g in range(1, min(n, 40)):
            if math.gcd(g, n) == 1:
                assert multiplicative_order(g, n) == sympy.n_order(g, n)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 10**12), st.integers(2, 10**6))
def test_order_divides_p_minus_1(n, g):
    p = next_prime(n)
    if g % p == 0:
        return
    t = multiplicative_order(g, p)
    assert (p - 1) % t == 0 and pow(g, t, p) == 1
    for q in factorize(t).primes:
        assert pow(g, t // q, p) != 1


def test_discrete_log_small_and_large():
    assert discrete_log(3, 6, 7) == 3
    p = 4134061
    assert pow(439, discrete_log(439, p - 2, p), p) == p - 2
    p = 10**15 + 37
    g = sympy.primitive_root(p)
    for h in (2, 12345678901, p - 1):
        x = discrete_log(g, h, p)
        assert pow(g, x, p) == h and 0 <= x < p - 1


def test_discrete_log_not_in_subgroup():
    with pytest.raises(ArithmeticError):
        discrete_log(2, 3, 7)  # 2 generates {1, 2, 4}
