"""JSON-ready dictionaries for every result type, and their flat text form."""

from __future__ import annotations

import datetime as _dt
import json
import math
from fractions import Fraction
from importlib import resources

import numpy as np

from .bounds import BoundCheckReport, DimensionEstimate, TrivlemVerdict
from .charsums import ExpSumValue, magnitude
from .decomp import DecompositionReport, RationalInterval
from .homogenize import HomogenizationChain, InvarianceVerdict
from .newton import Face, NewtonPolyhedron, nondegenerate_for_prime
from .poly import Polynomial, quasi_weights

SCHEMA_ID = "igusa-lab/report/v1"
HISTOGRAM_LIMIT = 64
VOLATILE_KEYS = ("generated_at",)


def rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def jsonable(obj):
    """Recursively convert to JSON types; rationals become ``"num/den"`` strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, complex):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    if isinstance(obj, RationalInterval):
        return interval_dict(obj)
    if isinstance(obj, Polynomial):
        return str(obj)
    if isinstance(obj, Face):
        return obj.label()
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        seq = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v) for v in seq]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def interval_dict(iv: RationalInterval) -> dict:
    return {"lo": rational(iv.lo), "hi": rational(iv.hi),
            "lo_approx": float(iv.lo), "hi_approx": float(iv.hi)}


def face_dict(P: NewtonPolyhedron, F: Face) -> dict:
    return {
        "id": P.face_id(F),
        "label": F.label(),
        "support_points": sorted(F.support_points, reverse=True),
        "recession_dirs": [j + 1 for j in sorted(F.recession_dirs)],
        "witness": [int(a) for a in F.witness],
        "min_value": int(F.min_value),
        "dim": F.dim,
        "compact": F.compact,
    }


def polyhedron_dict(f: Polynomial, primes=()) -> dict:
    from .newton import newton_polyhedron
    from .bounds import check_trivlem

    P = newton_polyhedron(f)
    w = quasi_weights(f)
    out = {
        "kind": "polyhedron",
        "check": "analyze",
        "status": "info",
        "poly": str(f),
        "n": f.n,
        "support": sorted(P.support, reverse=True),
        "faces": [face_dict(P, F) for F in P.faces],
        "face_count": len(P.faces),
        "sigma": P.sigma,
        "sigma_approx": float(P.sigma),
        "t_star": P.t_star,
        "kappa": P.kappa,
        "F0": P.face_id(P.F0),
        "quasi_weights": None if w is None else {"weights": list(w.weights), "degree": w.degree},
    }
    if w is not None and f.total_degrees() - {0}:
        v = check_trivlem(f)
        out["trivial_alternative"] = {
            "case": v.case,
            "linear_terms": list(v.linear_terms),
            "text": "0 is critical" if v.case == "critical" else "linear term, 0 not critical",
        }
    table = []
    for p in primes:
        certs = nondegenerate_for_prime(f, P.faces, p, compact_only=False)
        by_face = {P.face_id(c.face): c for c in certs}
        compact_ok = all(c.passes for c in certs if c.face.compact)
        all_ok = all(c.passes for c in certs)
        table.append({
            "p": p,
            "compact_faces": compact_ok,
            "all_faces": all_ok,
            "failures": [{"face": fid, "point": list(c.critical_point)}
                         for fid, c in by_face.items() if not c.passes],
        })
    out["nondegeneracy"] = table
    return out


def histogram_dict(v: ExpSumValue, limit: int = HISTOGRAM_LIMIT) -> dict:
    h = v.histogram
    d = {"modulus": h.modulus, "total": h.total, "buckets": h.buckets}
    if h.buckets <= limit:
        d["counts"] = {str(a): c for a, c in sorted(h.as_dict().items())}
    else:
        d["elided"] = True
    return d


def sum_dict(v: ExpSumValue, with_histogram: bool = True) -> dict:
    mag, err = magnitude(v)
    out = {
        "kind": "sum",
        "check": "sum",
        "status": "info",
        "sum_kind": v.kind,
        "params": dict(sorted(v.params.items())),
        "normalization": v.normalization,
        "value": v.complex_value,
        "abs_error": v.abs_error,
        "magnitude": mag,
        "exact_zero": v.exact_zero,
    }
    if with_histogram:
        out["histogram"] = histogram_dict(v)
    return out


def decomposition_dict(r: DecompositionReport, poly: Polynomial) -> dict:
    check = "df2" if r.mode == "local" else "df"
    status = {"verified": "pass", "failed": "fail"}.get(r.verdict, "not applicable")
    terms = []
    for t in r.terms:
        d = {"face": t.face_id, "label": t.label, "compact": t.compact,
             "A": interval_dict(t.A), "B": interval_dict(t.B)}
        if t.E is not None:
            d["E"] = {"value": t.E.complex_value, "abs_error": t.E.abs_error,
                      "exact_zero": t.E.exact_zero}
        if t.k_points is not None:
            d["k_points"] = [list(k) for k in t.k_points]
        terms.append(d)
    out = {
        "kind": "decomposition",
        "check": check,
        "status": status,
        "poly": str(poly),
        "p": r.p, "m": r.m, "u": r.u, "V": r.V,
        "verdict": r.verdict,
        "d_K": r.d_K,
        "terms": terms,
        "notes": list(r.notes),
    }
    if r.assembled_re is not None:
        out["assembled"] = {"re": interval_dict(r.assembled_re), "im": interval_dict(r.assembled_im)}
    if r.brute is not None:
        out["brute_force"] = {"value": r.brute.complex_value, "abs_error": r.brute.abs_error}
    return out


def bound_dict(r: BoundCheckReport, check: str, poly: Polynomial | None = None) -> dict:
    if r.violations:
        status = "fail"
    elif r.trend_flagged:
        status = "warning"
    else:
        status = "pass"
    out = {
        "kind": "bound",
        "check": check,
        "status": status,
        "inequality": r.inequality,
        "grid": r.grid,
        "fitted_c": r.fitted_c,
        "trend": r.trend,
        "margins": r.margins(),
        "violations": list(r.violations),
        "notes": list(r.notes),
        "points": r.points,
    }
    if poly is not None:
        out["poly"] = str(poly)
    return out


def dimension_dict(d: DimensionEstimate, check: str, poly: Polynomial) -> dict:
    return {
        "kind": "dimension",
        "check": check,
        "status": "warning" if d.status == "inconclusive" else "pass",
        "poly": str(poly),
        "counts": d.counts,
        "slope": d.slope,
        "d": d.d,
        "estimate_status": d.status,
        "excluded_primes": d.excluded,
    }


def trivlem_dict(v: TrivlemVerdict, poly: Polynomial) -> dict:
    return {
        "kind": "trivial-alternative",
        "check": "dims",
        "status": "pass" if v.exclusive else "fail",
        "poly": str(poly),
        "case": v.case,
        "zero_critical": v.zero_critical,
        "linear_terms": list(v.linear_terms),
        "exclusive": v.exclusive,
    }


def chain_dict(chain: HomogenizationChain, verdicts: list[InvarianceVerdict] = ()) -> dict:
    from .newton import newton_polyhedron

    stages = []
    for j, g in enumerate(chain.stages):
        st = {"stage": j, "n": g.n, "poly": str(g), "sigma": newton_polyhedron(g).sigma}
        if j:
            s = chain.steps[j - 1]
            st.update(substituted=s.variable, repetition=s.repetition, new_variable=s.new_variable)
        stages.append(st)
    failed = any(not v.holds for v in verdicts)
    return {
        "kind": "chain",
        "check": "homogenize",
        "status": "fail" if failed else "pass",
        "poly": str(chain.start),
        "weights": list(chain.weights.weights),
        "degree": chain.weights.degree,
        "steps": len(chain.steps),
        "final": str(chain.final),
        "final_degrees": sorted(chain.final.total_degrees()),
        "stages": stages,
        "invariance": [{"name": v.name, "holds": v.holds, "per_stage": v.per_stage,
                        "notes": v.notes} for v in verdicts],
    }


def envelope(command: str, config: dict, results: list[dict], warnings: list[str]) -> dict:
    failed = any(r.get("status") == "fail" for r in results)
    return jsonable({
        "schema": SCHEMA_ID,
        "command": command,
        "generated_at": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "config": config,
        "status": "failed" if failed else "ok",
        "warnings": warnings,
        "results": results,
    })


def stable_view(report: dict) -> dict:
    """The report without fields that legitimately differ between runs."""
    return {k: v for k, v in report.items() if k not in VOLATILE_KEYS}


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2)


def flatten(obj, prefix: str = "") -> list[tuple[str, object]]:
    """``(path, scalar)`` pairs covering every leaf of ``obj``."""
    if isinstance(obj, dict):
        if not obj:
            return [(prefix, "{}")]
        out = []
        for k in sorted(obj):
            out.extend(flatten(obj[k], f"{prefix}.{k}" if prefix else str(k)))
        return out
    if isinstance(obj, list):
        if not obj:
            return [(prefix, "[]")]
        out = []
        for i, v in enumerate(obj):
            out.extend(flatten(v, f"{prefix}[{i}]"))
        return out
    return [(prefix, obj)]


def unflatten(pairs: list[tuple[str, object]]):
    """Inverse of :func:`flatten` (used to check the text form is lossless)."""
    import re

    root: dict = {}
    token = re.compile(r"([^.\[\]]+)|\[(\d+)\]")
    for path, value in pairs:
        keys = [m.group(1) if m.group(1) is not None else int(m.group(2)) for m in token.finditer(path)]
        if value == "{}":
            value = {}
        elif value == "[]":
            value = []
        node = root
        for a, b in zip(keys, keys[1:]):
            if isinstance(node, dict):
                node = node.setdefault(a, [] if isinstance(b, int) else {})
            else:
                while len(node) <= a:
                    node.append(None)
                if node[a] is None:
                    node[a] = [] if isinstance(b, int) else {}
                node = node[a]
        last = keys[-1]
        if isinstance(node, dict):
            node[last] = value
        else:
            while len(node) <= last:
                node.append(None)
            node[last] = value
    return root


def to_text(report: dict) -> str:
    return "\n".join(f"{k}: {json.dumps(v)}" for k, v in flatten(report)) + "\n"


def from_text(text: str) -> dict:
    pairs = []
    for line in text.splitlines():
        if not line:
            continue
        k, v = line.split(": ", 1)
        pairs.append((k, json.loads(v)))
    return unflatten(pairs)


def load_schema() -> dict:
    return json.loads(resources.files("igusa_lab").joinpath("report_schema.json").read_text())
