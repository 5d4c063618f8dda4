"""End-to-end acceptance checks.

Each test prints one ``CRITERION n: PASS|FAIL`` line (visible with or without
``-s``) giving what was checked, the elapsed time and the time limit, and then
asserts.  Tolerances and limits are fixed here, not configurable.
"""

import csv
import io
import json
import time
from fractions import Fraction

import pytest

from metricmahler.approximations import LogRatio, best_approximations, classify, is_first_kind_best
from metricmahler.cli import OK, main
from metricmahler.core_numbers import Ordering, compare_power
from metricmahler.golden import (
    GoldenPair,
    golden_alpha,
    golden_char_transform,
    golden_size_bound,
    find_golden_pair,
    gr_conjecture_experiment,
)
from metricmahler.infimum_sets import (
    characteristic_transformation,
    empirical_minimal_set,
    enumerate_vectors,
    hull_vertices,
    lex_limit_key,
    mt_profile,
    theorem_main_audit,
)
from metricmahler.measures import PrimePowerRational, m_t
from metricmahler.oracle import definitional_classify, oracle_m_t

BREAKPOINT_WIDTH = Fraction(1, 10 ** 9)
SWEEP_T = ["1.1", "1.5", "2", "3", "5", "10"]
SWEEP_PRIMES = [(2, 3), (2, 5), (3, 5)]
CURVE_RTOL = 1e-13

V_32_27 = {(0, 0, 0, 0, 1), (0, 0, 1, 1, 0), (1, 1, 0, 1, 0), (0, 1, 2, 0, 0), (1, 2, 1, 0, 0), (2, 3, 0, 0, 0)}
V_256_243 = {
    (0, 0, 0, 0, 0, 1), (0, 0, 0, 1, 1, 0), (0, 1, 1, 0, 1, 0), (0, 0, 1, 2, 0, 0), (1, 2, 0, 0, 1, 0),
    (0, 1, 2, 1, 0, 0), (1, 1, 0, 2, 0, 0), (1, 2, 1, 1, 0, 0), (0, 2, 3, 0, 0, 0), (2, 3, 0, 1, 0, 0),
    (1, 3, 2, 0, 0, 0), (2, 4, 1, 0, 0, 0), (3, 5, 0, 0, 0, 0),
}
MINIMAL_SETS = {
    "32/27": {(0, 0, 0, 0, 1), (0, 0, 1, 1, 0), (0, 1, 2, 0, 0), (2, 3, 0, 0, 0)},
    "256/243": {(0, 0, 0, 0, 0, 1), (0, 0, 0, 1, 1, 0), (0, 0, 1, 2, 0, 0), (0, 2, 3, 0, 0, 0),
                (3, 5, 0, 0, 0, 0)},
    "31^34/257^21": {
        (0, 0, 0, 0, 0, 0, 0, 0, 1), (0, 0, 0, 0, 0, 0, 1, 1, 0), (0, 0, 0, 0, 0, 1, 2, 0, 0),
        (0, 0, 0, 0, 2, 3, 0, 0, 0), (0, 0, 0, 3, 5, 0, 0, 0, 0), (0, 0, 5, 8, 0, 0, 0, 0, 0),
        (0, 8, 13, 0, 0, 0, 0, 0, 0), (13, 21, 0, 0, 0, 0, 0, 0, 0),
    },
}
EXCEPTIONAL_COUNTS = {"32/27": 3, "256/243": 4, "31^34/257^21": 7}
ALPHAS = {
    "32/27": PrimePowerRational(2, 3, 5, 3),
    "256/243": PrimePowerRational(2, 3, 8, 5),
    "31^34/257^21": PrimePowerRational(31, 257, 34, 21),
}

_profiles = {}


def report(capsys, number, ok, detail, elapsed, limit):
    ok = ok and elapsed < limit
    with capsys.disabled():
        print(f"\nCRITERION {number}: {'PASS' if ok else 'FAIL'} {detail} "
              f"[{elapsed:.2f} s, limit {limit:g} s]")
    assert ok, detail


def cli(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def sweep_alphas():
    for p, q in SWEEP_PRIMES:
        for a, b in best_approximations(LogRatio(p, q), 20, 20):
            if a + b <= 20:
                yield PrimePowerRational(p, q, a, b)


def multisets(profile, vectors):
    atoms = profile.atoms
    index = [atoms.index(a) for a in profile.transform.atoms()]
    keys = set()
    for x in vectors:
        row = [0] * len(atoms)
        for n, w in enumerate(x):
            row[index[n]] += w
        keys.add(lex_limit_key(atoms, row))
    return keys


def profiles():
    if not _profiles:
        for name, alpha in ALPHAS.items():
            t0 = time.perf_counter()
            prof = mt_profile(alpha)
            found = empirical_minimal_set(alpha, profile=prof)
            _profiles[name] = (prof, found, time.perf_counter() - t0)
    return _profiles


def test_criterion_01_cf_expansion(capsys):
    t0 = time.perf_counter()
    code, text = cli("cf", "--p", "2", "--q", "3", "--terms", "12")
    got = json.loads(text)["result"]["quotients"]
    want = [1, 1, 1, 2, 2, 3, 1, 5, 2, 23, 2, 2]
    report(capsys, 1, code == OK and got == want, f"quotients {got}", time.perf_counter() - t0, 1)


def test_criterion_02_best_approximations(capsys):
    t0 = time.perf_counter()
    got = best_approximations(LogRatio(2, 3), 19, 12)
    want = [(1, 0), (1, 1), (2, 1), (3, 2), (5, 3), (8, 5), (11, 7), (19, 12)]
    report(capsys, 2, got == want, f"list {got}", time.perf_counter() - t0, 1)


def test_criterion_03_27_17_dichotomy(capsys):
    t0 = time.perf_counter()
    xi = LogRatio(2, 3)
    upper = classify((27, 17), xi).upper_best
    first = is_first_kind_best((27, 17), xi)
    report(capsys, 3, upper and not first, f"upper_best={upper} first_kind_best={first}",
           time.perf_counter() - t0, 1)


def test_criterion_04_vectors_and_vertices_32_27(capsys):
    t0 = time.perf_counter()
    V = enumerate_vectors(characteristic_transformation(ALPHAS["32/27"]))
    got_v = {x.entries for x in V}
    got_vert = {x.entries for x in hull_vertices(V)}
    ok = got_v == V_32_27 and got_vert == V_32_27 - {(1, 2, 1, 0, 0)}
    report(capsys, 4, ok, f"|V|={len(got_v)} |Vert|={len(got_vert)} dropped={sorted(got_v - got_vert)}",
           time.perf_counter() - t0, 1)


def test_criterion_05_vectors_256_243(capsys):
    t0 = time.perf_counter()
    got = {x.entries for x in enumerate_vectors(characteristic_transformation(ALPHAS["256/243"]))}
    report(capsys, 5, got == V_256_243, f"|V|={len(got)} equal={got == V_256_243}", time.perf_counter() - t0, 5)


def test_criterion_06_exceptional_counts(capsys):
    data = profiles()
    elapsed = sum(v[2] for v in data.values())
    parts, ok = [], True
    for name, (prof, _, _) in data.items():
        widest = max((bp.width for bp in prof.exceptional_points), default=Fraction(0))
        good = (prof.exceptional_count == EXCEPTIONAL_COUNTS[name] and prof.uncertain_count == 0
                and widest <= BREAKPOINT_WIDTH)
        ok &= good
        parts.append(f"{name}: {prof.exceptional_count} (max width {float(widest):.1e})")
    report(capsys, 6, ok, "; ".join(parts), elapsed, 300)


def test_criterion_07_minimal_sets(capsys):
    data = profiles()
    elapsed = sum(v[2] for v in data.values())
    parts, ok = [], True
    for name, (prof, found, _) in data.items():
        want = MINIMAL_SETS[name]
        good = len(found) == len(want) and multisets(prof, [x.entries for x in found]) == multisets(prof, want)
        ok &= good
        parts.append(f"{name}: {len(found)} vectors {'match' if good else 'differ'}")
    report(capsys, 7, ok, "; ".join(parts), elapsed, 300)


def test_criterion_08_golden_pair(capsys):
    t0 = time.perf_counter()
    lower = compare_power(257, 13, 31, 21) is Ordering.GREATER  # 21/13 < log257/log31
    upper = compare_power(257, 21, 31, 34) is Ordering.LESS  # log257/log31 < 34/21
    gp = GoldenPair(8, 31, 257)
    T = golden_char_transform(gp)
    want = [[1, 1, 2, 3, 5, 8, 13, 21, 34], [0, 1, 1, 2, 3, 5, 8, 13, 21]]
    ok = lower and upper and T.matrix().tolist() == want and golden_alpha(gp) == ALPHAS["31^34/257^21"]
    report(capsys, 8, ok, f"window lower={lower} upper={upper} columns={T.size}", time.perf_counter() - t0, 10)


def test_criterion_09_oracle_equivalence(capsys):
    t0 = time.perf_counter()
    checked, violations = 0, []
    for alpha in sweep_alphas():
        for t in SWEEP_T:
            cf_value = m_t(alpha, t, "cf_infimum_set")
            oracle_value, _ = oracle_m_t(alpha, t)
            checked += 1
            if not cf_value.overlaps(oracle_value):
                violations.append((str(alpha), t))
    report(capsys, 9, not violations, f"{checked} (alpha, t) cases, violations {violations}",
           time.perf_counter() - t0, 600)


def test_criterion_10_structure_audits(capsys):
    t0 = time.perf_counter()
    checked, violations = 0, []
    for alpha in sweep_alphas():
        xi = alpha.normalized().xi
        swap = alpha.normalized() != alpha
        for t in SWEEP_T:
            rep = theorem_main_audit(alpha, t, raise_on_failure=False)
            violations += [(str(alpha), t, v) for v in rep.violations]
            for part, c in rep.parts:
                checked += 1
                again = classify((part[1], part[0]) if swap else part, xi)
                if not (again.in_G and (again.in_U2 or again.in_L1)):
                    violations.append((str(alpha), t, part, "not in G∩U2 ∪ G∩L1"))
                if rep.pair_classification.boundary and not again.boundary:
                    violations.append((str(alpha), t, part, "not a boundary point"))
                if rep.pair_classification.best and not again.best:
                    violations.append((str(alpha), t, part, "not a best approximation"))
    report(capsys, 10, not violations, f"{checked} argmin parts audited, violations {violations}",
           time.perf_counter() - t0, 600)


def test_criterion_11_classification_cross_validation(capsys):
    t0 = time.perf_counter()
    violations = []
    checked = 0
    for p, q in SWEEP_PRIMES:
        for xi, inv in ((LogRatio(p, q), LogRatio(q, p)), (LogRatio(q, p), LogRatio(p, q))):
            for a in range(41):
                for b in range(41):
                    if (a, b) == (0, 0):
                        continue
                    checked += 1
                    c = classify((a, b), xi)
                    if definitional_classify((a, b), xi) != c:
                        violations.append((xi.p, xi.q, a, b, "definitional mismatch"))
                    d = classify((b, a), inv)
                    # duality under swapping coordinates and inverting xi
                    if (c.in_U, c.in_U1, c.in_U2) != (d.in_L, d.in_L2, d.in_L1):
                        violations.append((xi.p, xi.q, a, b, "duality"))
                    if (c.in_U1 and not c.in_U2) or (c.in_L2 and not c.in_L1):
                        violations.append((xi.p, xi.q, a, b, "containment"))
                    if xi.value > 1 and c.in_G and c.in_U1 != c.in_U2:
                        violations.append((xi.p, xi.q, a, b, "upper sets differ on G"))
                    if xi.value < 1 and c.in_G and c.in_L1 != c.in_L2:
                        violations.append((xi.p, xi.q, a, b, "lower sets differ on G"))
    report(capsys, 11, not violations, f"{checked} classifications, violations {violations[:5]}",
           time.perf_counter() - t0, 120)


def test_criterion_12_size_bound(capsys):
    t0 = time.perf_counter()
    parts, ok = [], True
    for n in (4, 6, 8):
        sb = golden_size_bound(find_golden_pair(n))
        ok &= sb.holds
        parts.append(f"n={n}: log #V = {sb.log_count:.3f} <= {sb.bound:.3f}")
    report(capsys, 12, ok, "; ".join(parts), time.perf_counter() - t0, 60)


def test_criterion_13_curve(capsys):
    t0 = time.perf_counter()
    code, text = cli("curve", "--alpha", "2^5/3^3")
    rows = list(csv.DictReader(io.StringIO(text)))
    fcols = [k for k in rows[0] if k.startswith("f")]
    ts = [float(r["t"]) for r in rows]
    env = [float(r["envelope_value"]) for r in rows]
    series = [[float(r[k]) for k in fcols] for r in rows]
    problems = []
    for k in range(len(rows) - 1):
        tol = CURVE_RTOL * env[k]
        if env[k + 1] > env[k] + tol:
            problems.append(f"increase at t={ts[k]}")
        # the minimum of continuous functions moves no more than the fastest of them
        step = max(abs(a - b) for a, b in zip(series[k], series[k + 1]))
        if abs(env[k + 1] - env[k]) > step + tol:
            problems.append(f"jump at t={ts[k]}")
    for r, s, e in zip(rows, series, env):
        if abs(e - min(s)) > CURVE_RTOL * e:
            problems.append(f"envelope is not the minimum at t={r['t']}")

    prof = mt_profile(ALPHAS["32/27"])
    expected = []
    for t, r in zip(ts, rows):
        active = tuple(int(i) for i in r["active_id"].split(";"))
        seg = next(s for s in prof.segments if float(s.start) <= t <= float(s.end))
        near = any(abs(float(bp.t) - t) < 1e-6 for bp in prof.breakpoints)
        if not near and active != seg.active:
            problems.append(f"active {active} at t={t}, profile says {seg.active}")
        if not expected or expected[-1] != seg.active:
            expected.append(seg.active)
    collapsed = []
    for r in rows:
        active = tuple(int(i) for i in r["active_id"].split(";"))
        if not collapsed or collapsed[-1] != active:
            collapsed.append(active)
    changes = sum(1 for x, y in zip(collapsed, collapsed[1:]) if not set(x) & set(y))
    if collapsed != expected:
        problems.append(f"active sequence {collapsed} != {expected}")
    if changes != prof.exceptional_count:
        problems.append(f"{changes} disjoint changes on the grid, {prof.exceptional_count} breakpoints")
    ok = code == OK and not problems
    report(capsys, 13, ok, f"{len(rows)} samples, {len(fcols)} series, active sequence {collapsed}, "
           f"problems {problems[:3]}", time.perf_counter() - t0, 10)


@pytest.mark.parametrize("pairs", [None, {8: (31, 257)}], ids=["smallest-pairs", "pair-31-257-n8"])
def test_golden_family_experiment(capsys, pairs):
    t0 = time.perf_counter()
    reports = gr_conjecture_experiment(n_max=8, pairs=pairs)
    elapsed = time.perf_counter() - t0
    by_n = {r.n: r for r in reports}
    with capsys.disabled():
        for r in reports:
            d = r.as_dict()
            print(f"\nEXPERIMENT golden n={r.n} (p, q)=({d['p']}, {d['q']}): exceptional "
                  f"{d['exceptional_count']} (conjectured {d['expected_count']}), family match "
                  f"{d['set_match']}, verdict {d['verdict']}")
        print(f"EXPERIMENT golden total {elapsed:.2f} s (not an acceptance criterion)")
    assert sorted(by_n) == [2, 4, 6, 8]
    assert by_n[4].exceptional_count == 3 and by_n[8].exceptional_count == 7
