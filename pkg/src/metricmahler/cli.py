"""Command-line interface.

Every subcommand writes one JSON document (or CSV for ``curve --format csv``)
to stdout.  Exit status is 0 on a fully certified result, 1 when some
quantity could only be reported as uncertain and 2 on an error.
"""

from __future__ import annotations

import argparse
import csv
import decimal
import io
import json
import sys
from fractions import Fraction
from typing import List, Optional

import numpy as np

from . import __version__
from .approximations import LogRatio, best_approximations, cf_expand, classify, is_first_kind_best
from .core_numbers import PRECISION_CAP, CertifiedReal
from .errors import (
    AuditFailure,
    BoundExceededError,
    DomainError,
    HypothesisError,
    MetricMahlerError,
    UncertainError,
)
from .golden import (
    DEFAULT_P_CAP,
    GoldenPair,
    conjectured_family,
    find_golden_pair,
    golden_alpha,
    golden_char_transform,
    golden_size_bound,
    gr_conjecture_experiment,
)
from .infimum_sets import (
    _atom_rows,
    characteristic_transformation,
    empirical_minimal_set,
    enumerate_vectors,
    hull_vertices,
    lex_limit_key,
    measure_function,
    mt_profile,
    theorem_main_audit,
    vector_to_factorization,
)
from .measures import (
    MeasureAtom,
    minimize,
    minimize_rows,
    parse_alpha,
    parse_t,
    series_values,
)
from .oracle import ORACLE_BOUND

SCHEMA_VERSION = "1.0"

# exit codes
OK, UNCERTAIN, ERROR = 0, 1, 2

_PRECONDITIONS = {
    HypothesisError: "exponent pair must be an upper or lower best approximation",
    BoundExceededError: "input must lie within the brute-force bound",
    AuditFailure: "optimal factorization parts must satisfy the structural properties",
    DomainError: "arguments must lie in the operation's domain",
}


# ---------------------------------------------------------------------------
# formatting


def _dec(x: Fraction, rounding, digits: int = 40) -> str:
    ctx = decimal.Context(prec=digits, rounding=rounding)
    return str(ctx.divide(decimal.Decimal(x.numerator), decimal.Decimal(x.denominator)))


def _num(x) -> str:
    """15 significant digits."""
    return f"{float(x):.15g}"


def _real(v: CertifiedReal) -> dict:
    return {
        "value": _num(v.midpoint),
        "lower": _dec(v.lower, decimal.ROUND_FLOOR),
        "upper": _dec(v.upper, decimal.ROUND_CEILING),
        "width": "0" if v.is_exact else f"{float(v.width):.3e}",
        "exact": v.is_exact,
    }


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _atoms(ms) -> List[str]:
    return [str(a) for a in ms]


def _pair_list(pairs) -> list:
    return [list(p) for p in pairs]


class _Outcome:
    def __init__(self, result, exact=True, bits=None, uncertain=None):
        self.result = result
        self.exact = exact
        self.bits = bits
        self.uncertain = list(uncertain or [])


# ---------------------------------------------------------------------------
# subcommands


def _cmd_cf(args):
    xi = LogRatio(args.p, args.q)
    try:
        cf = cf_expand(xi, args.terms)
        flags = []
    except UncertainError as exc:
        cf = exc.partial
        flags = [str(exc)]
    return _Outcome({
        "quotients": list(cf.quotients),
        "certified_count": cf.certified_count,
        "convergents": _pair_list(cf.convergents()),
    }, uncertain=flags)


def _cmd_approx(args):
    xi = LogRatio(args.p, args.q)
    rows = []
    for pair in best_approximations(xi, args.max_a, args.max_b):
        c = classify(pair, xi)
        first = is_first_kind_best(pair, xi) if pair[1] >= 1 else None
        rows.append({"pair": list(pair), "classification": c.as_dict(), "first_kind_best": first})
    return _Outcome({"xi": f"log {args.q}/log {args.p}", "count": len(rows), "best_approximations": rows})


def _alpha_info(alpha):
    o = alpha.normalized()
    return {"alpha": str(alpha), "oriented": str(o), "inverted": o != alpha}


def _cmd_chartrans(args):
    T = characteristic_transformation(parse_alpha(args.alpha))
    M = T.matrix()
    return _Outcome({**_alpha_info(T.alpha), "columns": _pair_list(T.pairs),
                     "matrix": [list(map(int, M[0])), list(map(int, M[1]))], "size": T.size})


def _vector_entry(i, x):
    f = vector_to_factorization(x)
    return {
        "id": i,
        "entries": list(x.entries),
        "parts": _pair_list(f.parts),
        "measure_multiset": _atoms(measure_function(x).multiset()),
    }


def _cmd_vectors(args):
    T = characteristic_transformation(parse_alpha(args.alpha))
    V = enumerate_vectors(T)
    return _Outcome({**_alpha_info(T.alpha), "columns": _pair_list(T.pairs), "count": len(V),
                     "vectors": [_vector_entry(i, x) for i, x in enumerate(V)]})


def _cmd_mt(args):
    alpha = parse_alpha(args.alpha)
    t = parse_t(args.t)
    best = minimize(alpha, t, args.method, args.bound)
    if args.method == "oracle":
        argmin = [{"parts": _pair_list(f.parts)} for f in best.argmin]
    else:
        argmin = [{"entries": list(x.entries), "parts": _pair_list(vector_to_factorization(x).parts)}
                  for x in best.argmin]
    return _Outcome({
        **_alpha_info(alpha),
        "t": _frac(t),
        "method": args.method,
        "value": _real(best.value),
        "argmin": argmin,
        "distinct_functions": best.candidate_count,
        "candidates": best.raw_count,
    }, exact=best.value.is_exact, bits=best.precision_bits)


def _series(alpha):
    T = characteristic_transformation(alpha)
    atoms, rows, members = _atom_rows(T)
    V = enumerate_vectors(T)
    info = [{
        "id": i,
        "measure_multiset": _atoms(lex_limit_key(atoms, r)),
        "vectors": [list(V[v].entries) for v in members[i]],
    } for i, r in enumerate(rows)]
    return T, atoms, rows, info


def _curve_rows(alpha, t_min, t_max, samples, keep=None):
    T, atoms, rows, info = _series(alpha)
    keep = list(range(len(rows))) if keep is None else keep
    info = [info[i] for i in keep]
    out = []
    for k in range(samples):
        t = t_min + (t_max - t_min) * Fraction(k, max(samples - 1, 1))
        # the envelope is always m_t over every vector, whatever series are shown
        best = minimize_rows(atoms, rows, t)
        lo, hi = series_values(atoms, rows[keep], t)
        out.append({
            "t": _num(t),
            "envelope_value": _num(best.value.midpoint),
            "active_id": ";".join(str(i) for i in best.indices),
            "values": [_num((a + b) / 2) for a, b in zip(lo, hi)],
            "envelope_width": f"{float(best.value.width):.3e}",
        })
    return T, info, out


def _minimal_ids(alpha, t_max):
    profile = mt_profile(alpha, max(t_max, 16))
    found = {x.entries for x in empirical_minimal_set(alpha, profile=profile)}
    return [i for i, rep in enumerate(profile.representatives) if rep.entries in found]


def _cmd_curve(args):
    alpha = parse_alpha(args.alpha)
    t_min, t_max = parse_t(args.t_min), parse_t(args.t_max)
    if t_max <= t_min:
        raise DomainError("t-max must exceed t-min")
    if args.samples < 2:
        raise DomainError("samples must be at least 2")
    keep = _minimal_ids(alpha, t_max) if args.set == "minimal" else None
    T, info, out = _curve_rows(alpha, t_min, t_max, args.samples, keep)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "envelope_value", "active_id"] + [f"f{s['id']}" for s in info] + ["envelope_width"])
        for r in out:
            w.writerow([r["t"], r["envelope_value"], r["active_id"]] + r["values"] + [r["envelope_width"]])
        return buf.getvalue()
    rows = [{
        "t": float(r["t"]),
        "envelope_value": float(r["envelope_value"]),
        "active_id": r["active_id"],
        "values": [float(v) for v in r["values"]],
        "envelope_width": float(r["envelope_width"]),
    } for r in out]
    return _Outcome({**_alpha_info(alpha), "series": info, "rows": rows}, exact=False, bits=128)


def _profile_payload(profile):
    bps = [{
        "lower": _dec(b.lower, decimal.ROUND_FLOOR, 25),
        "upper": _dec(b.upper, decimal.ROUND_CEILING, 25),
        "t": _num(b.t),
        "width": f"{float(b.width):.3e}",
        "kind": b.kind,
        "before": list(b.before),
        "after": list(b.after),
    } for b in profile.breakpoints]
    segs = [{"start": _num(s.start), "end": _num(s.end), "active": list(s.active)} for s in profile.segments]
    funcs = [{
        "id": i,
        "measure_multiset": _atoms(lex_limit_key(profile.atoms, r)),
        "representative": list(profile.representatives[i].entries),
    } for i, r in enumerate(profile.functions)]
    return {
        "exceptional_count": profile.exceptional_count,
        "uncertain_count": profile.uncertain_count,
        "breakpoints": bps,
        "segments": segs,
        "functions": funcs,
        "t_end": _num(profile.t_end),
        "stabilized": profile.stabilized,
        "limit_minimizer": profile.limit_minimizer,
    }


def _profile_flags(profile):
    flags = [f"uncertain breakpoint in [{_num(b.lower)}, {_num(b.upper)}]"
             for b in profile.breakpoints if b.kind == "uncertain"]
    if not profile.stabilized:
        flags.append("large-t minimiser not reached by the end of the scan")
    return flags


def _cmd_exceptional(args):
    alpha = parse_alpha(args.alpha)
    profile = mt_profile(alpha, parse_t(args.t_max), args.grid)
    return _Outcome({**_alpha_info(alpha), **_profile_payload(profile)}, exact=False, bits=128,
                    uncertain=_profile_flags(profile))


def _cmd_vertices(args):
    T = characteristic_transformation(parse_alpha(args.alpha))
    V = enumerate_vectors(T)
    vert = hull_vertices(V)
    kept = {x.entries for x in vert}
    return _Outcome({
        **_alpha_info(T.alpha),
        "count": len(vert),
        "vertices": [list(x.entries) for x in vert],
        "dropped": [list(x.entries) for x in V if x.entries not in kept],
    })


def _cmd_minimal(args):
    alpha = parse_alpha(args.alpha)
    profile = mt_profile(alpha, parse_t(args.t_max), args.grid)
    found = empirical_minimal_set(alpha, profile=profile)
    return _Outcome({
        **_alpha_info(alpha),
        "label": "EMPIRICAL",
        "minimal_set": [_vector_entry(i, x) for i, x in enumerate(found)],
        "minimality_index_lower_bound": len(found),
        "exceptional_count": profile.exceptional_count,
    }, exact=False, bits=128, uncertain=_profile_flags(profile))


def _cmd_golden(args):
    if args.p is not None or args.q is not None:
        if args.p is None or args.q is None:
            raise DomainError("give both --p and --q to validate an explicit pair")
        gp = GoldenPair(args.n, args.p, args.q)
    else:
        gp = find_golden_pair(args.n, args.p_start, args.p_cap)
    T = golden_char_transform(gp)
    size = golden_size_bound(gp)
    lower, upper = gp.bounds
    result = {
        "n": gp.n,
        "p": gp.p,
        "q": gp.q,
        "bounds": {"lower": list(lower), "upper": list(upper)},
        "alpha": str(golden_alpha(gp)),
        "columns": _pair_list(T.pairs),
        "size_bound": {"vector_count": size.vector_count, "log_count": _num(size.log_count),
                       "bound": _num(size.bound), "holds": size.holds},
        "conjectured_family": [list(v) for v in conjectured_family(T)],
    }
    flags = []
    exact = True
    if args.run:
        rep = gr_conjecture_experiment(max(4, gp.n + gp.n % 2), {gp.n: (gp.p, gp.q)},
                                       parse_t(args.t_max), args.grid, n_min=gp.n)[-1]
        result["experiment"] = rep.as_dict()
        exact = False
        if rep.uncertain_count:
            flags.append(f"{rep.uncertain_count} uncertain breakpoints")
        if rep.error:
            flags.append(rep.error)
    return _Outcome(result, exact=exact, uncertain=flags)


def _cmd_audit(args):
    alpha = parse_alpha(args.alpha)
    report = theorem_main_audit(alpha, parse_t(args.t), args.bound, raise_on_failure=False)
    payload = _audit_payload(report)
    if report.violations:
        raise AuditFailure("; ".join(report.violations), payload)
    return _Outcome(payload, exact=False, bits=128)


def _audit_payload(report):
    return {
        **_alpha_info(report.alpha),
        "t": _frac(report.t),
        "value": _real(report.value),
        "pair_classification": report.pair_classification.as_dict(),
        "argmin": [_pair_list(f.parts) for f in report.factorizations],
        "parts": [{"part": list(p), "classification": c.as_dict()} for p, c in report.parts],
        "violations": list(report.violations),
        "ok": report.ok,
    }


def _cmd_oracle(args):
    alpha = parse_alpha(args.alpha)
    t = parse_t(args.t)
    best = minimize(alpha, t, "oracle", args.bound)
    return _Outcome({
        **_alpha_info(alpha),
        "t": _frac(t),
        "value": _real(best.value),
        "argmin": [_pair_list(f.parts) for f in best.argmin],
        "factorization_count": best.raw_count,
        "distinct_functions": best.candidate_count,
    }, exact=best.value.is_exact, bits=best.precision_bits)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="metricmahler", description="t-metric Mahler measures of p^a/q^b")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        return sp

    def alpha(sp):
        sp.add_argument("--alpha", required=True, help="P^a/Q^b or a plain fraction such as 32/27")

    sp = add("cf", _cmd_cf, "partial quotients of log q / log p")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--terms", type=int, required=True)

    sp = add("approx", _cmd_approx, "best approximations with full classification")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--max-a", type=int, required=True)
    sp.add_argument("--max-b", type=int, required=True)

    alpha(add("chartrans", _cmd_chartrans, "characteristic transformation"))
    alpha(add("vectors", _cmd_vectors, "factorization vectors with measure multisets"))

    sp = add("mt", _cmd_mt, "m_t value and minimisers")
    alpha(sp)
    sp.add_argument("--t", required=True, help="exact decimal or fraction")
    sp.add_argument("--method", choices=["cf", "oracle"], default="cf")
    sp.add_argument("--bound", type=int, default=ORACLE_BOUND)

    sp = add("curve", _cmd_curve, "sampled measure functions and their lower envelope")
    alpha(sp)
    sp.add_argument("--t-min", default="1")
    sp.add_argument("--t-max", default="16")
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--set", choices=["all", "minimal"], default="all",
                    help="series to emit: every distinct measure function, or the empirical minimal set")

    for name, fn, help_ in (("exceptional", _cmd_exceptional, "exceptional points of t -> m_t"),
                            ("minimal", _cmd_minimal, "empirical minimal infimum set")):
        sp = add(name, fn, help_)
        alpha(sp)
        sp.add_argument("--t-max", default="16")
        sp.add_argument("--grid", type=int, default=512)

    alpha(add("vertices", _cmd_vertices, "vertices of the convex hull of the factorization vectors"))

    sp = add("golden", _cmd_golden, "Fibonacci-ratio prime pairs")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p-start", type=int, default=2)
    sp.add_argument("--p-cap", type=int, default=DEFAULT_P_CAP)
    sp.add_argument("--p", type=int, help="validate this pair instead of searching")
    sp.add_argument("--q", type=int)
    sp.add_argument("--run", action="store_true", help="also profile the golden rational")
    sp.add_argument("--t-max", default="16")
    sp.add_argument("--grid", type=int, default=512)

    for name, fn, help_ in (("audit", _cmd_audit, "structural audit of brute-force minimisers"),
                            ("oracle", _cmd_oracle, "brute-force m_t over every factorization")):
        sp = add(name, fn, help_)
        alpha(sp)
        sp.add_argument("--t", required=True)
        sp.add_argument("--bound", type=int, default=ORACLE_BOUND)
    return ap


def _inputs(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}


def _document(command, inputs, **body) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "inputs": inputs}
    doc.update(body)
    return json.dumps(doc, indent=2, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, Fraction):
        return _frac(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not serialisable: {type(obj).__name__}")


def _precondition(exc) -> str:
    for cls, text in _PRECONDITIONS.items():
        if isinstance(exc, cls):
            return text
    return "computation must be certifiable"


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    inputs = _inputs(args)
    try:
        outcome = args.func(args)
    except UncertainError as exc:
        out.write(_document(args.command, inputs, result=None,
                            error={"type": "UncertainError", "precondition": _precondition(exc),
                                   "message": str(exc), "partial": _plain(exc.partial)},
                            certification={"exact": False, "enclosure_bits": PRECISION_CAP,
                                           "uncertain_flags": [str(exc)]}))
        return UNCERTAIN
    except (MetricMahlerError, ValueError) as exc:
        report = getattr(exc, "report", None)
        out.write(_document(args.command, inputs, result=None,
                            error={"type": type(exc).__name__, "precondition": _precondition(exc),
                                   "message": str(exc), "report": report},
                            certification={"exact": False, "enclosure_bits": None, "uncertain_flags": []}))
        return ERROR
    if isinstance(outcome, str):
        out.write(outcome)
        return OK
    out.write(_document(args.command, inputs, result=outcome.result,
                        certification={"exact": outcome.exact, "enclosure_bits": outcome.bits,
                                       "uncertain_flags": outcome.uncertain}))
    return UNCERTAIN if outcome.uncertain else OK


def _plain(obj):
    if obj is None or isinstance(obj, (int, float, str)):
        return obj
    if hasattr(obj, "quotients"):
        return {"quotients": list(obj.quotients), "certified_count": obj.certified_count}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    return str(obj)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
