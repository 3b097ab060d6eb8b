"""Certified constructions of ``n = p^a + q^b + r^c + s^d`` divisible by ``p q r s`` (and by ``m``).

``n`` itself is never formed: the exponents run to dozens of digits, so
every divisibility claim is checked as a congruence with modular
exponentiation.

Three families are built:

``len4``
    For any ``m``, four distinct odd primes and exponents with
    ``p q r s m | n``, hence length at most 4.
``exact4``
    ``len4`` applied to ``8m``. Since no length-3 number is divisible by
    8, the length is exactly 4. That lower bound is a citation and is
    recorded as such, not recomputed.
``four-prime``
    Given odd primes ``p, q, r`` with one of them 3 or 5 mod 8, a prime
    ``s`` and exponents with ``p q r s | n``.

The ``len4`` pipeline has two variants. ``literal`` follows the original
residue choices (``r = 3``, ``s = -5 mod 2^k``) and always fails: ``n`` is
6 mod 8, and with ``c = (...)c' + c0`` the mod-``s`` check fails too.
``repaired`` (the default) moves ``r`` to ``-1`` and ``s`` to ``-3 mod
2^k``, and gives ``p^a`` a chosen residue ``u`` mod ``s`` so that
``-(u+1)`` is a square and ``c`` can stay even.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, fields, replace
from typing import Iterator

from .arith import (
    DEFAULT_RHO_ITERATIONS,
    DLOG_TABLE_CAP,
    Factorization,
    crt_solve,
    discrete_log,
    euler_phi,
    factorize,
    is_prime,
    kronecker,
    mod_pow,
    primality_policy,
    v2_split,
)
from .errors import (
    BadExponent,
    BoundExhausted,
    Inconsistent,
    InternalAssertionFailed,
    NoQualifyingRole,
    PreconditionViolated,
    PrimeAddError,
    SearchBoundExhausted,
)
from .primes import StarWitness, find_prime_in_ap, iter_star_witnesses

SCHEMA_VERSION = 1
BOUNDS_ENV = "PRIMEADD_BOUNDS"

KIND_LEN4 = "len4"
KIND_EXACT4 = "exact4"
KIND_FOUR_PRIME = "four-prime"

CITED_LOWER_BOUND = (
    "cited: a shortest (length-3) weakly prime-additive number divisible by m exists "
    "only if 8 does not divide m"
)


@dataclass(frozen=True)
class SearchBounds:
    prime_bound: int = 10**30
    max_candidates: int = 10**6
    max_witnesses: int = 2000
    residue_tries: int = 256
    dlog_table_cap: int = DLOG_TABLE_CAP
    factor_iterations: int = DEFAULT_RHO_ITERATIONS

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 1:
                raise PreconditionViolated(f"bound {f.name} must be positive")

    @classmethod
    def from_env(cls) -> "SearchBounds":
        """Defaults, overridden by the JSON file named in ``$PRIMEADD_BOUNDS`` if set."""
        path = os.environ.get(BOUNDS_ENV)
        if not path:
            return cls()
        with open(path) as fh:
            data = json.load(fh)
        known = {f.name for f in fields(cls)}
        return cls(**{k: int(v) for k, v in data.items() if k in known})


@dataclass(frozen=True)
class ConstructionCertificate:
    kind: str
    variant: str
    m: int | None
    target: int
    primes: dict[str, int]
    exponents: dict[str, int]
    intermediate: dict[str, int]
    free_parameters: dict[str, int]
    prime_conditions: tuple[tuple[str, int, int], ...]
    exponent_families: tuple[tuple[str, int, int], ...]
    witness: StarWitness
    congruence_checks: tuple[tuple[str, int, int], ...]
    kappa_claim: dict = field(default_factory=dict)
    primality_policy: dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(res == 0 for _, _, res in self.congruence_checks)

    def to_json(self) -> dict:
        s = str
        return {
            "schema_version": SCHEMA_VERSION,
            "record": "certificate",
            "kind": self.kind,
            "variant": self.variant,
            "m": None if self.m is None else s(self.m),
            "target": s(self.target),
            "primes": {k: s(v) for k, v in self.primes.items()},
            "exponents": {k: s(v) for k, v in self.exponents.items()},
            "intermediate": {k: s(v) for k, v in self.intermediate.items()},
            "free_parameters": {k: s(v) for k, v in self.free_parameters.items()},
            "prime_conditions": [{"prime": n, "residue": s(r), "modulus": s(md)}
                                 for n, r, md in self.prime_conditions],
            "exponent_families": [{"exponent": n, "residue": s(r), "modulus": s(md)}
                                  for n, r, md in self.exponent_families],
            "witness": self.witness.to_json(),
            "congruence_checks": [{"label": lab, "modulus": s(md), "expected": "0", "residue": s(res)}
                                  for lab, md, res in self.congruence_checks],
            "kappa_claim": self.kappa_claim,
            "primality_policy": self.primality_policy,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ConstructionCertificate":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise PreconditionViolated(f"unsupported schema version {d.get('schema_version')}")
        if d.get("record") != "certificate":
            raise PreconditionViolated(f"not a certificate record: {d.get('record')!r}")
        if any(c.get("expected") != "0" for c in d["congruence_checks"]):
            raise PreconditionViolated("every congruence check must expect residue 0")
        w = d["witness"]
        fac = Factorization.from_dict(int(w["s"]) - 1, {int(p): int(e) for p, e in w["s_minus_1_factors"]})
        witness = StarWitness(int(w["a"]), int(w["f"]), int(w["g"]), int(w["s"]), fac,
                              tuple((int(a), int(b)) for a, b in w["power_checks"]), w["primality_policy"])
        ints = lambda m: {k: int(v) for k, v in m.items()}  # noqa: E731
        return cls(
            kind=d["kind"], variant=d["variant"],
            m=None if d["m"] is None else int(d["m"]), target=int(d["target"]),
            primes=ints(d["primes"]), exponents=ints(d["exponents"]),
            intermediate=ints(d["intermediate"]), free_parameters=ints(d["free_parameters"]),
            prime_conditions=tuple((c["prime"], int(c["residue"]), int(c["modulus"]))
                                   for c in d["prime_conditions"]),
            exponent_families=tuple((c["exponent"], int(c["residue"]), int(c["modulus"]))
                                    for c in d["exponent_families"]),
            witness=witness,
            congruence_checks=tuple((c["label"], int(c["modulus"]), int(c["residue"]))
                                    for c in d["congruence_checks"]),
            kappa_claim=d["kappa_claim"], primality_policy=d["primality_policy"],
        )


def sum_residue(primes: dict[str, int], exponents: dict[str, int], modulus: int) -> int:
    """``(p^a + q^b + r^c + s^d) mod modulus``."""
    total = 0
    for name, exp in zip("pqrs", "abcd"):
        total += mod_pow(primes[name], exponents[exp], modulus)
    return total % modulus


def _checks(primes, exponents, moduli) -> tuple[tuple[str, int, int], ...]:
    return tuple((label, md, sum_residue(primes, exponents, md)) for label, md in moduli)


def _bugcheck(cond: bool, message: str) -> None:
    if not cond:
        raise InternalAssertionFailed(message)


def odd_primes_coprime_to(m: int) -> Iterator[int]:
    p = 3
    while True:
        if m % p and is_prime(p):
            yield p
        p += 2


def _search(step: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except BoundExhausted as exc:
        raise SearchBoundExhausted(f"search bound exhausted at step {step}: {exc}", bound=exc.bound,
                                   step=step) from exc


def _witnesses(step, a, f, g, bounds: SearchBounds) -> Iterator[StarWitness]:
    it = iter_star_witnesses(a, f, g, bounds.prime_bound, bounds.max_candidates, bounds.factor_iterations)
    for i, w in enumerate(it):
        if i >= bounds.max_witnesses:
            break
        yield w
    raise SearchBoundExhausted(f"search bound exhausted at step {step}: no usable witness "
                               f"s = {a} mod {f} with primitive root {g} (inconclusive)", step=step)


def _dlog(r, target, w: StarWitness, bounds: SearchBounds) -> int:
    try:
        return discrete_log(r, target, w.s, w.order_certificate, bounds.dlog_table_cap)
    except BoundExhausted as exc:
        raise SearchBoundExhausted(f"discrete log mod {w.s} exceeds the table cap", step="c0") from exc


def _policies(primes: dict[str, int]) -> dict[str, str]:
    return {k: primality_policy(v) for k, v in primes.items()}


def construct_len4(m: int, p_index: int = 0, a_prime: int = 1, b_prime: int = 1, c_prime: int = 1,
                   bounds: SearchBounds | None = None, variant: str = "repaired",
                   _kind: str = KIND_LEN4, _user_m: int | None = None) -> ConstructionCertificate:
    """Four distinct odd primes and exponents with ``p q r s m | p^a + q^b + r^c + s``."""
    if variant not in ("repaired", "literal"):
        raise PreconditionViolated(f"unknown variant {variant!r}")
    if m < 1:
        raise PreconditionViolated("m must be a positive integer")
    if b_prime < 1 or b_prime % 2 == 0:
        raise PreconditionViolated(f"b' must be a positive odd integer, got {b_prime}", clause="b' odd")
    if a_prime < 1 or c_prime < 1 or p_index < 0:
        raise PreconditionViolated("a' and c' must be positive and p_index nonnegative")
    bounds = bounds or SearchBounds.from_env()
    literal = variant == "literal"

    k, m1 = v2_split(m)
    k = max(k, 3)
    K = 1 << k
    M = K * m1
    phiM = euler_phi(M)
    for i, p in enumerate(odd_primes_coprime_to(m)):
        if i == p_index:
            break
    sb = dict(bound=bounds.prime_bound, max_candidates=bounds.max_candidates)
    q = _search("q", find_prime_in_ap, 1, K * p, extra=[(-1, m1)], **sb)
    r_res = 3 if literal else -1
    r = _search("r", find_prime_in_ap, r_res % K, K, extra=[(1, p * q * m1)], **sb)
    s_res = -5 if literal else -3
    s0 = crt_solve([(s_res, K), (-1, m1), (-2, p * q * r)]).residue
    f = p * q * r * M
    _bugcheck(math.gcd(s0, f) == 1, f"gcd(s0, pqrM) != 1 for s0 = {s0}")
    _bugcheck(kronecker(r, s0) == -1, f"kronecker(r, s0) != -1 for r = {r}, s0 = {s0}")

    skipped = 0
    for w in _witnesses("s", s0, f, r, bounds):
        s = w.s
        if literal:
            c0_target = s - 2
            break
        # q^b = 1 mod s needs the order of q to divide (s-1)/4
        if pow(q, (s - 1) // 4, s) != 1:
            skipped += 1
            continue
        la = (q - 1) * (r - 1) * phiM
        G = math.gcd(la, s - 1)
        base = pow(p, G, s)
        u, j = base, 1
        while j <= bounds.residue_tries and not (u != s - 1 and kronecker(u + 1, s) == 1):
            u, j = u * base % s, j + 1
        if j <= bounds.residue_tries:
            c0_target = (-(u + 1)) % s
            break
        skipped += 1
    c0 = _dlog(r, c0_target, w, bounds)

    if literal:
        a = (q - 1) * (r - 1) * (s - 1) * phiM * a_prime
        b = (r - 1) * (s - 1) // 4 * b_prime
        c = (p - 1) * (q - 1) * (r - 1) * phiM * c_prime + c0
        families = [("a", 0, (q - 1) * (r - 1) * (s - 1) * phiM), ("b", 1, 2),
                    ("c", c0, (p - 1) * (q - 1) * (r - 1) * phiM)]
        extra = {}
    else:
        a_sys = crt_solve([(0, la), (G * j, s - 1)])
        a = (a_sys.residue or a_sys.modulus) + a_sys.modulus * (a_prime - 1)
        b = (r - 1) * (s - 1) // 8 * b_prime
        c = (s - 1) * c_prime + c0
        _bugcheck(c0 % 2 == 0, "c0 is odd although its target is a square")
        families = [("a", 0, la), ("a", G * j, s - 1), ("b", 0, (r - 1) * (s - 1) // 8), ("b", 1, 2),
                    ("c", c0, s - 1), ("c", 0, 2)]
        extra = {"u": u, "j": j, "G": G}
    _bugcheck(b % 2 == 1, f"b = {b} is even")
    families.append(("d", 1, (p - 1) * (q - 1) * (r - 1) * phiM))

    primes = {"p": p, "q": q, "r": r, "s": s}
    exps = {"a": a, "b": b, "c": c, "d": 1}
    checks = _checks(primes, exps, [("p", p), ("q", q), ("r", r), ("s", s), ("m1", m1), ("2^k", K)])
    cert = ConstructionCertificate(
        kind=_kind, variant=variant, m=m if _user_m is None else _user_m, target=M,
        primes=primes, exponents=exps,
        intermediate={"k": k, "m1": m1, "M": M, "f": f, "s0": s0, "c0": c0, "c0_target": c0_target,
                      "skipped_witnesses": skipped, **extra},
        free_parameters={"p_index": p_index, "a_prime": a_prime, "b_prime": b_prime, "c_prime": c_prime,
                         "d": 1},
        prime_conditions=(("q", 1, K * p), ("q", -1 % m1, m1), ("r", r_res % K, K), ("r", 1, p * q * m1),
                          ("s", s_res % K, K), ("s", -1 % m1, m1), ("s", -2 % (p * q * r), p * q * r)),
        exponent_families=tuple(families),
        witness=w,
        congruence_checks=checks,
        kappa_claim={"claim": "at_most_4", "proved_here": True},
        primality_policy=_policies(primes),
    )
    bad = [lab for lab, _, res in checks if res]
    if bad:
        raise InternalAssertionFailed(f"{variant} construction: n is not 0 modulo {', '.join(bad)}",
                                      certificate=cert)
    return cert


def construct_exact_len4(m: int, p_index: int = 0, a_prime: int = 1, b_prime: int = 1, c_prime: int = 1,
                         bounds: SearchBounds | None = None, variant: str = "repaired") -> ConstructionCertificate:
    """Length exactly 4: build for ``8m`` and cite the absence of length-3 multiples of 8."""
    if m < 1:
        raise PreconditionViolated("m must be a positive integer")
    cert = construct_len4(8 * m, p_index, a_prime, b_prime, c_prime, bounds, variant,
                          _kind=KIND_EXACT4, _user_m=m)
    claim = {"claim": "exactly_4", "proved_here": False, "upper_bound": "proved here (four terms)",
             "lower_bound_source": CITED_LOWER_BOUND, "divisor": str(8 * m)}
    return replace(cert, kappa_claim=claim)


def lift_modulus(cert: ConstructionCertificate) -> int:
    """``phi(p q r M)``: any ``d = 1`` modulo this keeps every check intact."""
    p, q, r = (cert.primes[x] for x in "pqr")
    M = cert.intermediate["M"]
    fac = factorize(M).as_dict()
    for x in (p, q, r):
        fac[x] = fac.get(x, 0) + 1
    return euler_phi(Factorization.from_dict(p * q * r * M, fac))


def power_lift_d(cert: ConstructionCertificate, d: int) -> ConstructionCertificate:
    """Replace ``s`` by ``s^d`` for ``d = 1 (mod phi(pqrM))`` and re-run the checks."""
    if cert.kind not in (KIND_LEN4, KIND_EXACT4):
        raise PreconditionViolated(f"lift applies to len4/exact4 certificates, not {cert.kind}")
    L = lift_modulus(cert)
    if d < 1 or d % L != 1 % L:
        raise BadExponent(f"d = {d} is not 1 mod phi(pqrM) = {L}")
    exps = {**cert.exponents, "d": d}
    checks = _checks(cert.primes, exps, [(lab, md) for lab, md, _ in cert.congruence_checks])
    families = tuple(fam for fam in cert.exponent_families if fam[0] != "d") + (("d", 1, L),)
    new = replace(cert, exponents=exps, congruence_checks=checks, exponent_families=families,
                  free_parameters={**cert.free_parameters, "d": d})
    bad = [lab for lab, _, res in checks if res]
    if bad:
        raise InternalAssertionFailed(f"lifted certificate fails modulo {', '.join(bad)}", certificate=new)
    return new


def assign_roles(p: int, q: int, r: int) -> tuple[int, int, int]:
    """Put the smallest prime that is 3 or 5 mod 8 in the last slot; the others ascend."""
    trio = (p, q, r)
    if len(set(trio)) != 3 or any(x % 2 == 0 or not is_prime(x) for x in trio):
        raise PreconditionViolated(f"need three distinct odd primes, got {trio}", clause="distinct odd primes")
    good = [x for x in trio if x % 8 in (3, 5)]
    if not good:
        raise NoQualifyingRole(f"none of {trio} is 3 or 5 mod 8 (residues {[x % 8 for x in trio]})",
                               clause="one prime = 3 or 5 mod 8")
    rr = min(good)
    pp, qq = sorted(x for x in trio if x != rr)
    return pp, qq, rr


def construct_theorem2(p: int, q: int, r: int, a_prime: int = 1, b_prime: int = 1, c_prime: int = 1,
                       d_prime: int = 1, bounds: SearchBounds | None = None) -> ConstructionCertificate:
    """A prime ``s`` and exponents with ``p q r s | p^a + q^b + r^c + s^d``."""
    if min(a_prime, b_prime, c_prime) < 1 or d_prime < 0:
        raise PreconditionViolated("a', b', c' must be positive and d' nonnegative")
    bounds = bounds or SearchBounds.from_env()
    p, q, r = assign_roles(p, q, r)
    pq1 = (p - 1) * (q - 1)
    k, A = v2_split(pq1)
    _bugcheck(A % 2 == 1, "A is even")
    f = 8 * A * p * q * r
    s0 = crt_solve([(3, 8), (-2, A * p * q * r)]).residue
    _bugcheck(kronecker(r, s0) == -1, f"kronecker(r, s0) != -1 for r = {r}, s0 = {s0}")

    skipped = 0
    for w in _witnesses("s", s0, f, r, bounds):
        s = w.s
        c0 = _dlog(r, s - 2, w, bounds)
        _bugcheck(c0 % 2 == 0, f"c0 = {c0} is odd although -2 is a square mod s = 3 mod 8")
        half_gcd = math.gcd((s - 1) // 2, pq1)
        # half_gcd is 3 whenever 3 | A; then c exists only if 3 | c0
        try:
            c_sys = crt_solve([(c0, (s - 1) // 2), (0, pq1)])
        except Inconsistent:
            skipped += 1
            continue
        break
    c = (c_sys.residue or c_sys.modulus) + c_sys.modulus * (c_prime - 1)
    _bugcheck((c - c0) % (s - 1) == 0, "c is not c0 mod s-1")

    a = (q - 1) * (r - 1) * (s - 1) * a_prime
    b = (p - 1) * (r - 1) * (s - 1) * b_prime
    d = (p - 1) * (q - 1) * (r - 1) * d_prime + 1
    primes = {"p": p, "q": q, "r": r, "s": s}
    exps = {"a": a, "b": b, "c": c, "d": d}
    checks = _checks(primes, exps, [("p", p), ("q", q), ("r", r), ("s", s)])
    cert = ConstructionCertificate(
        kind=KIND_FOUR_PRIME, variant="standard", m=None, target=p * q * r * s,
        primes=primes, exponents=exps,
        intermediate={"k": k, "A": A, "f": f, "s0": s0, "c0": c0, "c0_target": s - 2,
                      "half_gcd": half_gcd, "skipped_witnesses": skipped},
        free_parameters={"a_prime": a_prime, "b_prime": b_prime, "c_prime": c_prime, "d_prime": d_prime},
        prime_conditions=(("r", r % 8, 8), ("s", 3, 8), ("s", -2 % (A * p * q * r), A * p * q * r)),
        exponent_families=(("a", 0, (q - 1) * (r - 1) * (s - 1)), ("b", 0, (p - 1) * (r - 1) * (s - 1)),
                           ("c", c0, s - 1), ("c", 0, pq1), ("d", 1, (p - 1) * (q - 1) * (r - 1))),
        witness=w,
        congruence_checks=checks,
        kappa_claim={"claim": "pqrs_divides_sum", "proved_here": True},
        primality_policy=_policies(primes),
    )
    bad = [lab for lab, _, res in checks if res]
    if bad:
        raise InternalAssertionFailed(f"four-prime construction fails modulo {', '.join(bad)}", certificate=cert)
    return cert


@dataclass
class VerificationReport:
    entries: list[tuple[str, bool, str]] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.entries.append((name, bool(ok), detail))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.entries)

    @property
    def failures(self) -> list[str]:
        return [name for name, ok, _ in self.entries if not ok]

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "record": "verification", "all_pass": self.ok,
                "checks": [{"check": n, "pass": ok, "detail": d} for n, ok, d in self.entries]}


def verify_certificate(cert: ConstructionCertificate) -> VerificationReport:
    """Recompute every claim in ``cert`` from its raw numbers. Never raises on a bad certificate."""
    rep = VerificationReport()
    try:
        _verify(cert, rep)
    except (KeyError, TypeError, ValueError, ArithmeticError, StopIteration, PrimeAddError) as exc:
        rep.add("certificate well-formed", False, repr(exc))
    return rep


def _verify(cert: ConstructionCertificate, rep: VerificationReport) -> None:
    P = cert.primes
    names = "pqrs"
    vals = [P.get(x) for x in names]
    rep.add("four primes present", all(isinstance(v, int) for v in vals))
    if not rep.ok:
        return
    rep.add("pairwise distinct", len(set(vals)) == 4)
    for x in names:
        v = P[x]
        rep.add(f"{x} odd prime", v % 2 == 1 and is_prime(v), f"{v} [{primality_policy(v)}]")
    for e in "abcd":
        rep.add(f"{e} positive", cert.exponents.get(e, 0) >= 1)

    w = cert.witness
    s = P["s"]
    rep.add("witness prime is s", w.s == s)
    rep.add("witness base is r", w.g == P["r"])
    rep.add("s = s0 mod f", (s - cert.intermediate["s0"]) % cert.intermediate["f"] == 0)
    fac = w.order_certificate
    fac_ok = fac.n == s - 1 and all(is_prime(ell) for ell in fac.primes)
    rep.add("s-1 factorization", fac_ok)
    for ell in fac.primes:
        rep.add(f"r^((s-1)/{ell}) != 1 mod s", mod_pow(P["r"], (s - 1) // ell, s) != 1)
    c0 = cert.intermediate["c0"]
    rep.add("r^c0 = target mod s", mod_pow(P["r"], c0, s) == cert.intermediate["c0_target"] % s)

    for name, res, md in cert.prime_conditions:
        rep.add(f"{name} = {res} mod {md}", (P[name] - res) % md == 0)
    for name, res, md in cert.exponent_families:
        rep.add(f"{name} = {res} mod {md}", (cert.exponents[name] - res) % md == 0)

    for lab, md, recorded in cert.congruence_checks:
        got = sum_residue(P, cert.exponents, md)
        rep.add(f"n = 0 mod {lab}", got == 0 and recorded == 0, f"modulus {md}, residue {got}")
    if cert.kind in (KIND_LEN4, KIND_EXACT4):
        divisor = cert.m * (8 if cert.kind == KIND_EXACT4 else 1)
        got = sum_residue(P, cert.exponents, divisor)
        rep.add(f"n = 0 mod target {divisor}", got == 0, f"residue {got}")
    _recompute(cert, rep)


def _expected_claim(cert: ConstructionCertificate) -> dict:
    if cert.kind == KIND_LEN4:
        return {"claim": "at_most_4", "proved_here": True}
    if cert.kind == KIND_EXACT4:
        return {"claim": "exactly_4", "proved_here": False, "upper_bound": "proved here (four terms)",
                "lower_bound_source": CITED_LOWER_BOUND, "divisor": str(8 * cert.m)}
    return {"claim": "pqrs_divides_sum", "proved_here": True}


def _recompute(cert: ConstructionCertificate, rep: VerificationReport) -> None:
    """Rebuild derived fields from the free parameters and compare."""
    P, E, I, F = cert.primes, cert.exponents, cert.intermediate, cert.free_parameters
    p, q, r, s = (P[x] for x in "pqrs")
    w = cert.witness
    rep.add("witness power checks recorded", w.power_checks == tuple(
        (ell, mod_pow(w.g, (w.s - 1) // ell, w.s)) for ell in w.order_certificate.primes))
    rep.add("witness progression", (w.a, w.f) == (I["s0"], I["f"]))
    rep.add("primality policies", cert.primality_policy == _policies(P)
            and w.primality_policy == primality_policy(w.s))
    rep.add("kappa claim", cert.kappa_claim == _expected_claim(cert))
    try:
        if cert.kind in (KIND_LEN4, KIND_EXACT4):
            _recompute_len4(cert, rep, p, q, r, s, E, I, F)
        elif cert.kind == KIND_FOUR_PRIME:
            _recompute_four_prime(cert, rep, p, q, r, s, E, I, F)
        else:
            rep.add("known kind", False, cert.kind)
    except (KeyError, ValueError, ZeroDivisionError, StopIteration, PreconditionViolated) as exc:
        rep.add("derived fields recomputable", False, repr(exc))
        return
    # skipped witnesses are exactly the smaller witnesses of the same progression
    earlier = sum(1 for x in iter_star_witnesses(w.a, w.f, w.g, bound=s - 1, max_candidates=s // w.f + 2))
    rep.add("skipped witnesses", earlier == I.get("skipped_witnesses"), f"{earlier} smaller witnesses")


def _recompute_len4(cert, rep, p, q, r, s, E, I, F) -> None:
    divisor = cert.m * (8 if cert.kind == KIND_EXACT4 else 1)
    k, m1 = v2_split(divisor)
    k = max(k, 3)
    M = (1 << k) * m1
    rep.add("k, m1, M from m", (I["k"], I["m1"], I["M"]) == (k, m1, M) and cert.target == M)
    rep.add("f = pqrM", I["f"] == p * q * r * M)
    coprime = odd_primes_coprime_to(divisor)
    rep.add("p from p_index", next(x for i, x in enumerate(coprime) if i == F["p_index"]) == p)
    phiM = euler_phi(M)
    b_prime, c_prime, a_prime = F["b_prime"], F["c_prime"], F["a_prime"]
    K = 1 << k
    literal = cert.variant == "literal"
    r_res, s_res = (3, -5) if literal else (-1, -3)
    rep.add("prime conditions", cert.prime_conditions == (
        ("q", 1, K * p), ("q", -1 % m1, m1), ("r", r_res % K, K), ("r", 1, p * q * m1),
        ("s", s_res % K, K), ("s", -1 % m1, m1), ("s", -2 % (p * q * r), p * q * r)))
    rep.add("check moduli", tuple((lab, md) for lab, md, _ in cert.congruence_checks) == (
        ("p", p), ("q", q), ("r", r), ("s", s), ("m1", m1), ("2^k", K)))
    fams = [x for x in cert.exponent_families if x[0] != "d"]
    dfams = [x for x in cert.exponent_families if x[0] == "d"]
    rep.add("d family", dfams in ([("d", 1, (p - 1) * (q - 1) * (r - 1) * phiM)], [("d", 1, lift_modulus(cert))]))
    if literal:
        a = (q - 1) * (r - 1) * (s - 1) * phiM * a_prime
        b = (r - 1) * (s - 1) // 4 * b_prime
        c = (p - 1) * (q - 1) * (r - 1) * phiM * c_prime + I["c0"]
        rep.add("c0 target", I["c0_target"] == s - 2)
    elif cert.variant == "repaired":
        la = (q - 1) * (r - 1) * phiM
        G, j, u = I["G"], I["j"], I["u"]
        rep.add("G = gcd((q-1)(r-1)phi(M), s-1)", G == math.gcd(la, s - 1))
        rep.add("u = p^(G j) mod s", u == mod_pow(p, G * j, s) and u != s - 1 and kronecker(u + 1, s) == 1)
        rep.add("c0 target", I["c0_target"] == (-(u + 1)) % s)
        sys_ = crt_solve([(0, la), (G * j, s - 1)])
        a = (sys_.residue or sys_.modulus) + sys_.modulus * (a_prime - 1)
        b = (r - 1) * (s - 1) // 8 * b_prime
        c = (s - 1) * c_prime + I["c0"]
        rep.add("exponent families", fams == [
            ("a", 0, la), ("a", G * j, s - 1), ("b", 0, (r - 1) * (s - 1) // 8), ("b", 1, 2),
            ("c", I["c0"], s - 1), ("c", 0, 2)])
    else:
        rep.add("known variant", False, cert.variant)
        return
    if literal:
        rep.add("exponent families", fams == [
            ("a", 0, (q - 1) * (r - 1) * (s - 1) * phiM), ("b", 1, 2), ("c", I["c0"], (p - 1) * (q - 1) * (r - 1) * phiM)])
    rep.add("exponents from free parameters", (E["a"], E["b"], E["c"], E["d"]) == (a, b, c, F["d"]))


def _recompute_four_prime(cert, rep, p, q, r, s, E, I, F) -> None:
    rep.add("role assignment", assign_roles(p, q, r) == (p, q, r))
    pq1 = (p - 1) * (q - 1)
    k, A = v2_split(pq1)
    rep.add("k, A from p, q", (I["k"], I["A"]) == (k, A))
    rep.add("f = 8Apqr", I["f"] == 8 * A * p * q * r)
    rep.add("s0", I["s0"] == crt_solve([(3, 8), (-2, A * p * q * r)]).residue)
    rep.add("c0 target", I["c0_target"] == s - 2)
    rep.add("target = pqrs", cert.target == p * q * r * s and cert.m is None and cert.variant == "standard")
    rep.add("half gcd", I["half_gcd"] == math.gcd((s - 1) // 2, pq1))
    rep.add("prime conditions", cert.prime_conditions == (
        ("r", r % 8, 8), ("s", 3, 8), ("s", -2 % (A * p * q * r), A * p * q * r)))
    rep.add("check moduli", tuple((lab, md) for lab, md, _ in cert.congruence_checks) == (
        ("p", p), ("q", q), ("r", r), ("s", s)))
    rep.add("exponent families", cert.exponent_families == (
        ("a", 0, (q - 1) * (r - 1) * (s - 1)), ("b", 0, (p - 1) * (r - 1) * (s - 1)),
        ("c", I["c0"], s - 1), ("c", 0, pq1), ("d", 1, (p - 1) * (q - 1) * (r - 1))))
    c_sys = crt_solve([(I["c0"], (s - 1) // 2), (0, pq1)])
    c = (c_sys.residue or c_sys.modulus) + c_sys.modulus * (F["c_prime"] - 1)
    expect = ((q - 1) * (r - 1) * (s - 1) * F["a_prime"], (p - 1) * (r - 1) * (s - 1) * F["b_prime"], c,
              (p - 1) * (q - 1) * (r - 1) * F["d_prime"] + 1)
    rep.add("exponents from free parameters", (E["a"], E["b"], E["c"], E["d"]) == expect)


def dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))
