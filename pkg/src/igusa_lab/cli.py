"""Command line: ``igusa-lab {analyze,sum,verify,homogenize}``.

Exit codes: 0 success, 1 a checked identity or exact inequality failed,
2 bad input (parse errors, non-quasi-homogeneous input to homogenize),
3 evaluation budget exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from . import __version__
from .bounds import (check_AB_bounds, check_cone_lemma, check_cone_lemma_on_faces, check_face_E_bounds,
                     check_intersect_and_fg, check_katz_bounds, check_mt2, check_nu_inequality,
                     check_quasinondeg_bound, check_trivlem, critical_dim_estimate, fit_mt1,
                     primes_between, twists_for)
from .catalog import CatalogEntry, CatalogError, load_catalog
from .charsums import E_sum, E_sum_ext, S_sum, S_sum_laurent, T_sum, affine_sum_ext
from .decomp import DEFAULT_V, verify_decomposition
from .homogenize import (NotQuasiHomogeneous, homogenization_chain, verify_nondeg_transport,
                         verify_sigma_invariance, verify_torus_sum_invariance)
from .kernels import BudgetExceeded
from .newton import is_prime, newton_polyhedron
from .poly import ParseError, Polynomial, normalize_constant, parse_polynomial, quasi_weights
from . import report as rep

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
CHECKS = ("df", "df2", "nu", "cone", "ab", "mt1", "katz", "quasinondeg", "dims", "mt2")
DEFAULT_PRIMES = "5..31"
DEFAULT_M = 3
DEFAULT_Q = "4,9,25"


class InputError(ValueError):
    pass


def parse_int_list(text: str) -> list[int]:
    """``"5..31"`` (primes in range), ``"1..3"`` style for m, or ``"5,7,11"``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            a, b = part.split("..", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def parse_primes(text: str) -> list[int]:
    try:
        values = parse_int_list(text)
    except ValueError:
        raise InputError(f"bad prime list {text!r}") from None
    if ".." in text:
        values = [p for p in values if is_prime(p)]
    bad = [p for p in values if not is_prime(p)]
    if bad:
        raise InputError(f"not prime: {bad}")
    return sorted(set(values))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--poly", help="polynomial in x1..xn, e.g. 'x1^2 + x2^3'")
    common.add_argument("--n", type=int, help="number of variables")
    common.add_argument("--catalog", help="'builtin' or a file of 'name | n | poly-text' lines")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--budget", type=int, help="max evaluation points per sum (default 1e9)")
    common.add_argument("--output", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="igusa-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="Newton polyhedron invariants")
    a.add_argument("--primes", default=DEFAULT_PRIMES)

    s = sub.add_parser("sum", parents=[common], help="evaluate one exponential sum")
    s.add_argument("--kind", choices=("S", "T", "E", "Eq", "Aq", "laurent"), default="S")
    s.add_argument("--p", type=int)
    s.add_argument("--q", type=int, help="field size for Eq / Aq")
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--twist", type=int, default=1)
    s.add_argument("--no-histogram", action="store_true")

    v = sub.add_parser("verify", parents=[common], help="decomposition identities and bounds")
    v.add_argument("--check", default="all", help="comma list of " + "|".join(CHECKS) + "|all")
    v.add_argument("--p", type=int, help="single prime (overrides --primes)")
    v.add_argument("--primes", default=DEFAULT_PRIMES)
    v.add_argument("--m", type=int, help="single m (default: 1..3)")
    v.add_argument("--twist", type=int, help="single twist (default: all up to p=31, else sampled)")
    v.add_argument("--q", default=DEFAULT_Q, help="prime powers for finite-field checks")
    v.add_argument("--V", type=int, default=DEFAULT_V, help="cone-sum truncation depth")
    v.add_argument("--cap", type=int, default=20, help="nu cap for the lattice inequality")
    v.add_argument("--dump-terms", action="store_true", help="include every lattice point k")
    v.add_argument("--generators", help="cone generators 'a,b;c,d' for the cone check")
    v.add_argument("--L", help="linear form 'a,b' for the cone check")
    v.add_argument("--sigma", help="sigma for the cone check")
    v.add_argument("--gamma", default="0", help="gamma for the cone check")

    h = sub.add_parser("homogenize", parents=[common], help="homogenization chain")
    h.add_argument("--verify-invariance", action="store_true")
    h.add_argument("--primes", default="3..13")
    return parser


def _entries(args) -> list[CatalogEntry]:
    if args.catalog:
        return load_catalog(args.catalog)
    if args.poly is None or args.n is None:
        raise InputError("--poly and --n are required (or use --catalog)")
    parse_polynomial(args.poly, args.n)
    return [CatalogEntry("cli", args.n, args.poly)]


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("output",)}


# ---------------------------------------------------------------------------


def cmd_analyze(args) -> tuple[list[dict], list[str]]:
    primes = parse_primes(args.primes)
    results = []
    for e in _entries(args):
        f, note = normalize_constant(e.poly)
        d = rep.polyhedron_dict(f, primes)
        d["name"] = e.name
        if note:
            d["notes"] = [note]
        results.append(d)
    return results, []


def cmd_sum(args) -> tuple[list[dict], list[str]]:
    results = []
    for e in _entries(args):
        f = e.poly
        kind = args.kind
        if kind in ("Eq", "Aq"):
            if args.q is None:
                raise InputError("--q is required for Eq / Aq")
            fn = E_sum_ext if kind == "Eq" else affine_sum_ext
            v = fn(f, args.q, u=args.twist, budget=args.budget)
        else:
            if args.p is None:
                raise InputError("--p is required")
            if not is_prime(args.p):
                raise InputError(f"{args.p} is not prime")
            if kind == "S":
                v = S_sum(f, args.p, args.m, args.twist, budget=args.budget)
            elif kind == "T":
                v = T_sum(f, args.p, args.m, args.twist, budget=args.budget)
            elif kind == "E":
                v = E_sum(f, args.p, args.twist, budget=args.budget)
            else:
                v = S_sum_laurent(f, args.p, args.m, args.twist, budget=args.budget)
        d = rep.sum_dict(v, with_histogram=not args.no_histogram)
        d["name"] = e.name
        d["poly"] = str(f)
        results.append(d)
    return results, []


def _twists(args, p: int) -> list[int]:
    return [args.twist] if args.twist is not None else twists_for(p)


def _parse_vectors(text: str) -> list[tuple[int, ...]]:
    return [tuple(int(x) for x in part.split(",")) for part in text.split(";") if part.strip()]


def _verify_one(entry: CatalogEntry, checks: list[str], args) -> tuple[list[dict], list[str]]:
    f, _ = normalize_constant(entry.poly)
    primes = [args.p] if args.p is not None else parse_primes(args.primes)
    if entry.max_prime is not None and args.p is None:
        primes = [p for p in primes if p <= entry.max_prime]
    ms = [args.m] if args.m is not None else list(range(1, DEFAULT_M + 1))
    qs = parse_int_list(args.q) if args.q else []
    results: list[dict] = []
    warnings: list[str] = []
    qh = quasi_weights(f) is not None

    def add(d):
        d.setdefault("name", entry.name)
        d.setdefault("poly", str(f))
        results.append(d)

    def skip(check, why):
        add({"kind": "skipped", "check": check, "status": "not applicable", "reason": why})

    for check in checks:
        if check in ("df", "df2"):
            mode = "local" if check == "df2" else "global"
            for p in primes:
                for m in ms:
                    for u in _twists(args, p):
                        r = verify_decomposition(f, p, m, u, V=args.V, mode=mode,
                                                 dump_terms=args.dump_terms, budget=args.budget)
                        add(rep.decomposition_dict(r, f))
                        if r.verdict == "not applicable at p":
                            break
        elif check == "nu":
            add(rep.bound_dict(check_nu_inequality(f, cap=args.cap), "nu", f))
        elif check == "cone":
            if args.generators:
                if not (args.L and args.sigma):
                    raise InputError("--generators needs --L and --sigma")
                L = _parse_vectors(args.L)[0]
                r = check_cone_lemma(_parse_vectors(args.generators), L, args.sigma, args.gamma)
            else:
                r = check_cone_lemma_on_faces(f, V=args.V)
            add(rep.bound_dict(r, "cone", f))
        elif check == "ab":
            for local in (False, True):
                add(rep.bound_dict(check_AB_bounds(f, primes, ms, local=local, V=args.V), "ab", f))
        elif check == "mt1":
            for mode in ("global", "local"):
                u_grid = [args.twist] if args.twist is not None else None
                add(rep.bound_dict(fit_mt1(f, primes, ms, u_grid, mode=mode, budget=args.budget), "mt1", f))
        elif check == "katz":
            if not qh:
                skip("katz", "not quasi-homogeneous")
                continue
            crit = check_trivlem(f).zero_critical
            r = check_katz_bounds(f, primes, qs, require_critical=crit)
            add(rep.bound_dict(r, "katz", f))
        elif check == "quasinondeg":
            if not qh:
                skip("quasinondeg", "not quasi-homogeneous")
                continue
            add(rep.bound_dict(check_quasinondeg_bound(f, primes, qs), "quasinondeg", f))
            for local in (False, True):
                add(rep.bound_dict(check_face_E_bounds(f, primes, local=local), "quasinondeg", f))
        elif check == "dims":
            dim_primes = [p for p in primes if p >= 5] or primes
            add(rep.dimension_dict(critical_dim_estimate(f, dim_primes), "dims", f))
            if qh:
                v = check_trivlem(f)
                add(rep.trivlem_dict(v, f))
                if v.zero_critical:
                    add(rep.bound_dict(check_intersect_and_fg(f, dim_primes), "dims", f))
        elif check == "mt2":
            if not qh:
                skip("mt2", "not quasi-homogeneous")
                continue
            add(rep.bound_dict(check_mt2(f, primes), "mt2", f))
    for d in results:
        if d.get("status") == "warning":
            warnings.append(f"{entry.name}: {d['check']} constant grew past the trend limit")
    return results, warnings


def cmd_verify(args) -> tuple[list[dict], list[str]]:
    names = [c.strip() for c in args.check.split(",") if c.strip()]
    checks = list(CHECKS) if "all" in names else names
    unknown = [c for c in checks if c not in CHECKS]
    if unknown:
        raise InputError(f"unknown check(s): {unknown}")
    results, warnings = [], []
    for e in _entries(args):
        r, w = _verify_one(e, checks, args)
        results.extend(r)
        warnings.extend(w)
    return results, warnings


def cmd_homogenize(args) -> tuple[list[dict], list[str]]:
    results = []
    for e in _entries(args):
        chain = homogenization_chain(e.poly)
        verdicts = []
        if args.verify_invariance:
            verdicts.append(verify_sigma_invariance(chain))
            for p in parse_primes(args.primes):
                verdicts.append(verify_nondeg_transport(chain, p))
                for u in range(1, p):
                    v = verify_torus_sum_invariance(chain, p, u)
                    v.name = f"torus-sum p={p} u={u}"
                    verdicts.append(v)
        d = rep.chain_dict(chain, verdicts)
        d["name"] = e.name
        results.append(d)
    return results, []


COMMANDS = {"analyze": cmd_analyze, "sum": cmd_sum, "verify": cmd_verify, "homogenize": cmd_homogenize}


def run(argv: Sequence[str] | None = None) -> tuple[int, dict | None]:
    """Parse, dispatch and build the report; returns ``(exit code, report)``."""
    parser = build_parser()
    args = parser.parse_args(argv)
    saved = os.environ.get("IGUSA_LAB_BUDGET")
    if args.budget is not None:
        os.environ["IGUSA_LAB_BUDGET"] = str(args.budget)
    try:
        results, warnings = COMMANDS[args.command](args)
    except (ParseError, InputError, CatalogError, NotQuasiHomogeneous) as exc:
        print(f"igusa-lab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT, None
    except BudgetExceeded as exc:
        print(f"igusa-lab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET, None
    finally:
        if saved is None:
            os.environ.pop("IGUSA_LAB_BUDGET", None)
        else:
            os.environ["IGUSA_LAB_BUDGET"] = saved
    report = rep.envelope(args.command, _config(args), results, warnings)
    text = rep.dumps(report) + "\n" if args.format == "json" else rep.to_text(report)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for w in warnings:
        print(f"igusa-lab: warning: {w}", file=sys.stderr)
    return (EXIT_FAIL if report["status"] == "failed" else EXIT_OK), report


def main(argv: Sequence[str] | None = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
