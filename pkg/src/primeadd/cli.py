"""Command-line entry point: ``primeadd <command> [flags]``.

Output is JSON lines: one header record describing the run, then one
record per result. Big integers are decimal strings. Nothing in the
output depends on time or machine, so identical flags give identical bytes.

Exit codes: 0 success, 1 a certificate failed verification, 2 bad input
or unmet hypothesis, 3 search bound exhausted (retry with larger
bounds), 4 a construction fact failed (bug, or a known-broken variant).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .construct import (
    SCHEMA_VERSION,
    ConstructionCertificate,
    SearchBounds,
    construct_exact_len4,
    construct_len4,
    construct_theorem2,
    dumps,
    lift_modulus,
    power_lift_d,
    verify_certificate,
)
from .errors import BoundExhausted, InternalAssertionFailed, PreconditionViolated
from .primes import artin_density, corollary_density, count_pi_g, find_star_witness
from .wpa import check_no_shortest_div8, count_shortest, enumerate_wpa

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_PRECONDITION, EXIT_BOUND, EXIT_INTERNAL = 0, 1, 2, 3, 4

PURPOSE = {
    "construct4": "four odd primes p,q,r,s and exponents with p q r s m | p^a+q^b+r^c+s (length <= 4, any m)",
    "exact4": "the construct4 pipeline for 8m; length exactly 4 because no length-3 number is divisible by 8",
    "theorem2": "a prime s and exponents with p q r s | p^a+q^b+r^c+s^d for odd primes p,q,r, one of them 3 or 5 mod 8",
    "lift": "replace s by s^d for d = 1 mod phi(pqrM) and re-check a construct4/exact4 certificate",
    "star-witness": "smallest prime s = a mod f having the odd prime g | f as primitive root, given (g/a) = -1",
    "density": "conditional density of primes p = a mod f with primitive root g (truncated Euler product)",
    "count-pi": "count primes p <= x, p = a mod f, with g a primitive root mod p",
    "enumerate": "all weakly prime-additive n <= N with their exact length",
    "count-shortest": "number of length-3 weakly prime-additive n <= N and count/(log N)^3",
    "check8": "confirm no length-3 weakly prime-additive n <= N is divisible by 8",
    "verify": "recompute every claim of certificates read from a JSON-lines file",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Usage errors also say what the command computes."""

    def error(self, message):
        self.print_usage(sys.stderr)
        about = f"\n  ({self.prog.split()[-1]}: {self.description})" if self.description else ""
        self.exit(EXIT_PRECONDITION, f"{self.prog}: error: {message}{about}\n")


def _positive(name):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} expects an integer, got {text!r}")
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be positive, got {v}")
        return v
    return conv


def _odd_positive(name):
    def conv(text):
        v = _positive(name)(text)
        if v % 2 == 0:
            raise argparse.ArgumentTypeError(
                f"{name} must be odd, got {v}: b = (r-1)(s-1)b'/8 must be odd so that q^b = -1 mod the odd part of m")
        return v
    return conv


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {v}")
    return v


def _add_bounds(sp):
    g = sp.add_argument_group("search bounds (defaults from $PRIMEADD_BOUNDS, else built in)")
    g.add_argument("--prime-bound", type=_positive("--prime-bound"))
    g.add_argument("--max-candidates", type=_positive("--max-candidates"))
    g.add_argument("--max-witnesses", type=_positive("--max-witnesses"))
    g.add_argument("--dlog-table-cap", type=_positive("--dlog-table-cap"))


def _bounds(args) -> SearchBounds:
    b = SearchBounds.from_env()
    over = {k: getattr(args, k) for k in ("prime_bound", "max_candidates", "max_witnesses", "dlog_table_cap")
            if getattr(args, k, None) is not None}
    return replace(b, **over)


def _construction_flags(sp):
    sp.add_argument("--m", type=_positive("--m"), required=True)
    sp.add_argument("--p-index", type=_nonneg, default=0, help="use the (index+1)-th odd prime coprime to m as p")
    sp.add_argument("--aprime", type=_positive("--aprime"), default=1)
    sp.add_argument("--bprime", type=_odd_positive("--bprime"), default=1, help="must be odd")
    sp.add_argument("--cprime", type=_positive("--cprime"), default=1)
    sp.add_argument("--variant", choices=("repaired", "literal"), default="repaired")
    _add_bounds(sp)


def build_parser() -> argparse.ArgumentParser:
    # output options are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", default=argparse.SUPPRESS, help="write records here instead of stdout")
    common.add_argument("--format", choices=("jsonl", "table"), default=argparse.SUPPRESS)
    common.add_argument("--log-level", default=argparse.SUPPRESS)

    ap = _Parser(prog="primeadd", parents=[common],
                 description="Certified prime-additive constructions, prime searches and enumeration.")
    ap.add_argument("--version", action="version", version=f"primeadd {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name):
        return sub.add_parser(name, help=PURPOSE[name], description=PURPOSE[name], parents=[common])

    _construction_flags(add("construct4"))
    _construction_flags(add("exact4"))

    sp = add("theorem2")
    for flag in ("--p", "--q", "--r"):
        sp.add_argument(flag, type=_positive(flag), required=True)
    sp.add_argument("--aprime", type=_positive("--aprime"), default=1)
    sp.add_argument("--bprime", type=_positive("--bprime"), default=1)
    sp.add_argument("--cprime", type=_positive("--cprime"), default=1)
    sp.add_argument("--dprime", type=_nonneg, default=1)
    _add_bounds(sp)

    sp = add("lift")
    sp.add_argument("--in", dest="infile", required=True)
    grp = sp.add_mutually_exclusive_group(required=True)
    grp.add_argument("--d", type=_positive("--d"))
    grp.add_argument("--d-mult", type=_nonneg, help="use d = 1 + t*phi(pqrM) for this t")

    sp = add("star-witness")
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--f", type=_positive("--f"), required=True)
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--bound", type=_positive("--bound"), default=10**30)
    sp.add_argument("--max-candidates", type=_positive("--max-candidates"), default=10**6)

    sp = add("density")
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--f", type=_positive("--f"), required=True)
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--truncation", type=_positive("--truncation"), default=10**6)
    sp.add_argument("--corollary", action="store_true", help="also evaluate the special-case formula")

    sp = add("count-pi")
    sp.add_argument("--x", type=_positive("--x"), required=True)
    sp.add_argument("--f", type=_positive("--f"), default=1)
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--workers", type=_positive("--workers"), default=1)
    sp.add_argument("--truncation", type=_positive("--truncation"), default=10**6)

    sp = add("enumerate")
    sp.add_argument("--N", type=_positive("--N"), required=True)
    sp.add_argument("--m", type=_positive("--m"))
    sp.add_argument("--workers", type=_positive("--workers"), default=1)
    sp.add_argument("--checkpoint", help="state file holding the last completed n; resumes if present")

    sp = add("count-shortest")
    sp.add_argument("--N", type=_positive("--N"), required=True, action="append")
    sp.add_argument("--workers", type=_positive("--workers"), default=1)

    sp = add("check8")
    sp.add_argument("--N", type=_positive("--N"), required=True)
    sp.add_argument("--workers", type=_positive("--workers"), default=1)

    sp = add("verify")
    sp.add_argument("--in", dest="infile", required=True, action="append")
    return ap


def _certificate_dicts(path):
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rec = json.loads(line)
                if rec.get("record") != "header":
                    yield rec


def read_certificates(path) -> list[ConstructionCertificate]:
    return [ConstructionCertificate.from_json(rec) for rec in _certificate_dicts(path)
            if rec.get("record") == "certificate"]


def _header(args) -> dict:
    skip = {"output", "format", "log_level", "command"}
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}
    return {"schema_version": SCHEMA_VERSION, "record": "header", "tool": f"primeadd {__version__}",
            "command": args.command, "purpose": PURPOSE[args.command],
            "args": {k: _jsonable(v) for k, v in params.items()}}


def _jsonable(v):
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    return str(v) if isinstance(v, int) and not isinstance(v, bool) else v


def _tag(rec: dict, kind: str) -> dict:
    return {"schema_version": SCHEMA_VERSION, "record": kind, **rec}


def _run(args, emit) -> int:
    cmd = args.command
    if cmd in ("construct4", "exact4"):
        fn = construct_len4 if cmd == "construct4" else construct_exact_len4
        cert = fn(args.m, args.p_index, args.aprime, args.bprime, args.cprime, _bounds(args), args.variant)
        emit(cert.to_json())
    elif cmd == "theorem2":
        cert = construct_theorem2(args.p, args.q, args.r, args.aprime, args.bprime, args.cprime,
                                  args.dprime, _bounds(args))
        emit(cert.to_json())
    elif cmd == "lift":
        for cert in read_certificates(args.infile):
            d = args.d if args.d is not None else 1 + args.d_mult * lift_modulus(cert)
            emit(power_lift_d(cert, d).to_json())
    elif cmd == "star-witness":
        w = find_star_witness(args.a, args.f, args.g, args.bound, args.max_candidates)
        emit(_tag(w.to_json(), "star-witness"))
    elif cmd == "density":
        emit(_tag(artin_density(args.a, args.f, args.g, args.truncation).to_json(), "density"))
        if args.corollary:
            emit(_tag(corollary_density(args.a, args.f, args.g, args.truncation).to_json(), "corollary-density"))
    elif cmd == "count-pi":
        count, total = count_pi_g(args.x, args.f, args.a, args.g, workers=args.workers)
        from .primes import primes_up_to
        pi_x = int(primes_up_to(args.x).size)
        rec = {"x": str(args.x), "f": str(args.f), "a": str(args.a), "g": str(args.g), "count": count,
               "in_class": total, "pi_x": pi_x, "ratio": count / pi_x if pi_x else 0.0}
        try:
            rec["delta"] = artin_density(args.a, args.f, args.g, args.truncation).delta
        except PreconditionViolated as exc:
            rec["delta"] = None
            rec["delta_note"] = str(exc)
        emit(_tag(rec, "count-pi"))
    elif cmd == "enumerate":
        start = 2
        ck = Path(args.checkpoint) if args.checkpoint else None
        if ck and ck.exists():
            state = json.loads(ck.read_text())
            if state.get("N") != args.N or state.get("m") != args.m:
                raise UsageError(f"--checkpoint {ck}: saved for N={state.get('N')}, m={state.get('m')}")
            start = state["last_completed"] + 1

        def save(last):
            if ck:
                ck.write_text(json.dumps({"N": args.N, "m": args.m, "last_completed": last}))

        for r in enumerate_wpa(args.N, args.m, start=start, workers=args.workers, on_chunk=save):
            emit(_tag(r.to_json(), "wpa"))
    elif cmd == "count-shortest":
        for N in args.N:
            count, c = count_shortest(N, workers=args.workers)
            emit(_tag({"N": str(N), "count": count, "c_estimate": float(f"{c:.4g}")}, "count-shortest"))
    elif cmd == "check8":
        ok, exc = check_no_shortest_div8(args.N, workers=args.workers)
        if not ok:
            logging.getLogger("primeadd").error("length-3 numbers divisible by 8 found: %s",
                                                [r.n for r in exc])
        emit(_tag({"N": str(args.N), "holds": ok, "exceptions": [r.to_json() for r in exc]}, "check8"))
    elif cmd == "verify":
        status = EXIT_OK
        for path in args.infile:
            for rec in _certificate_dicts(path):
                try:
                    cert = ConstructionCertificate.from_json(rec)
                except (PreconditionViolated, KeyError, TypeError, ValueError) as exc:
                    emit({"schema_version": SCHEMA_VERSION, "record": "verification", "all_pass": False,
                          "checks": [{"check": "parse certificate", "pass": False, "detail": str(exc)}]})
                    status = EXIT_VERIFY_FAILED
                    continue
                report = verify_certificate(cert)
                emit({**report.to_json(), "kind": cert.kind, "primes": {k: str(v) for k, v in cert.primes.items()}})
                if not report.ok:
                    status = EXIT_VERIFY_FAILED
        return status
    return EXIT_OK


def _table(rec: dict) -> str:
    lines = []
    for k, v in rec.items():
        if isinstance(v, dict):
            v = ", ".join(f"{a}={b}" for a, b in v.items())
        elif isinstance(v, list):
            v = "; ".join(json.dumps(x, sort_keys=True) if isinstance(x, dict) else str(x) for x in v)
        lines.append(f"{k:>20}: {v}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, default in (("output", None), ("format", "jsonl"), ("log_level", "WARNING")):
        if not hasattr(args, key):
            setattr(args, key, default)
    logging.basicConfig(level=args.log_level.upper(), stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    # enumerate --checkpoint resumes, so it appends to an existing output file
    mode = "a" if args.command == "enumerate" and getattr(args, "checkpoint", None) \
        and Path(args.checkpoint).exists() else "w"
    out = open(args.output, mode) if args.output else sys.stdout

    def emit(rec):
        out.write(_table(rec) if args.format == "table" else dumps(rec) + "\n")
        out.flush()

    try:
        if mode == "w":
            emit(_header(args))
        return _run(args, emit)
    except UsageError as exc:
        print(f"primeadd {args.command}: error: {exc}\n  ({args.command}: {PURPOSE[args.command]})", file=sys.stderr)
        return EXIT_PRECONDITION
    except PreconditionViolated as exc:
        print(f"primeadd {args.command}: precondition failed: {exc}\n  ({args.command}: {PURPOSE[args.command]})",
              file=sys.stderr)
        return EXIT_PRECONDITION
    except BoundExhausted as exc:
        print(f"primeadd {args.command}: search bound exhausted (inconclusive, retry with larger bounds): {exc}",
              file=sys.stderr)
        return EXIT_BOUND
    except InternalAssertionFailed as exc:
        if exc.certificate is not None:
            emit({**exc.certificate.to_json(), "record": "failed-certificate"})
        print(f"primeadd {args.command}: construction fact violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
