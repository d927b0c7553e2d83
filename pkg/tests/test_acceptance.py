"""Acceptance suite: one test per criterion, each printing a PASS line and
enforcing its stated runtime limit.  Run with `pytest tests/test_acceptance.py -v`
(add -s to see the lines as they print).
"""

import json
import random
import time
from fractions import Fraction

from eulerchar.cli import main
from eulerchar.curves import (
    SingularModelError,
    WeierstrassModel,
    b_invariants,
    count_points,
    discriminant,
    integral_model,
    invariants,
    point_order,
    rational_p_torsion_order,
    reduce_model,
)
from eulerchar.curves import CurvePoint, extension_count
from eulerchar.cyclotomic import splitting
from eulerchar.euler import (
    AbelianVarietyInput,
    ExternalArithmetic,
    ReductionFact,
    analyze,
    corank_report,
    tau_p,
)
from eulerchar.finite_fields import fq_create
from eulerchar.tate import (
    base_change_rules,
    base_change_unramified,
    local_field_for,
    tate_algorithm,
)
from eulerchar.valuations import euler_phi, is_prime, vp

E294 = WeierstrassModel.from_rationals([1, 0, 0, -1, -1])
EPRIME = WeierstrassModel.from_rationals([-1, 2, 2, 0, 0])
EJ0 = WeierstrassModel.from_rationals([0, 0, 0, 0, 1])

TABLE_23 = AbelianVarietyInput(
    dimension=2,
    reduction_table=(ReductionFact(2, False, False), ReductionFact(3, False, False)),
)
EXT_FULL = ExternalArithmetic(
    sha_p_order=1,
    selmer_finite=True,
    lambda_torsion_certificate=True,
    torsion_p_override=7,
)


def _report(criterion, started, limit):
    elapsed = time.monotonic() - started
    assert elapsed < limit, f"criterion {criterion} exceeded {limit}s ({elapsed:.1f}s)"
    print(f"[criterion {criterion}] PASS ({elapsed:.2f}s)")


def test_criterion_1_chi_sigma_regression():
    started = time.monotonic()
    report = analyze(E294, 7, 7, TABLE_23, EXT_FULL)
    assert report.chi_sigma_exponent == 3
    assert not report.failed and not report.suppressed
    _report(1, started, 60)


def test_criterion_2_rho_decomposition():
    started = time.monotonic()
    report = analyze(E294, 7, 7, TABLE_23, EXT_FULL)
    assert report.rho.exponent == 0
    assert report.rho.breakdown["torsion"] == -2
    assert report.rho.breakdown["reduction_counts"] == +2
    assert report.rho.breakdown["tamagawa"] == 0
    # N_v = 7 is verified by counting the Tate-reduced model directly
    data7 = tate_algorithm(E294, local_field_for(E294, 7, e=6))
    assert data7.N_v == 7
    assert count_points(data7.reduced_model) == 7
    _report(2, started, 30)


def test_criterion_3_euler_factor_anchors():
    started = time.monotonic()
    report = analyze(E294, 7, 7, TABLE_23, EXT_FULL)
    above2 = [r for r in report.audit if r.place.ell == 2]
    above3 = [r for r in report.audit if r.place.ell == 3]
    assert len(above2) == 2 and len(above3) == 1
    assert all(r.L_at_1 == Fraction(8, 7) for r in above2)
    assert above3[0].L_at_1 == Fraction(729, 728)
    exponents = [-vp(r.L_at_1, 7) for r in report.audit]
    assert exponents == [1, 1, 1]
    assert sum(exponents) == 3
    _report(3, started, 10)


def test_criterion_4_splitting():
    started = time.monotonic()
    sp = splitting(2, 7)
    assert (sp.e, sp.f, sp.g) == (1, 3, 2)
    sp = splitting(7, 7)
    assert (sp.e, sp.f, sp.g) == (6, 1, 1)
    sp = splitting(3, 7)
    assert (sp.e, sp.f, sp.g) == (1, 6, 1)
    # exhaustive e*f*g = phi(m) for all primes ell < 10^3 and m < 10^3
    primes = [ell for ell in range(2, 1000) if is_prime(ell)]
    phis = [euler_phi(m) for m in range(1, 1000)]
    for ell in primes:
        for m in range(1, 1000):
            s = splitting(ell, m)
            assert s.e * s.f * s.g == phis[m - 1]
    _report(4, started, 10)


def test_criterion_5_curve_anchors():
    started = time.monotonic()
    assert invariants(E294).disc == -294
    assert invariants(EPRIME).disc == -(2**7) * 13
    assert point_order(EPRIME, CurvePoint(Fraction(0), Fraction(0)), 12) == 7
    _report(5, started, 10)


def test_criterion_6_second_example_audit():
    started = time.monotonic()
    report = analyze(
        E294,
        7,
        7,
        AbelianVarietyInput(dimension=1, factors=(EPRIME,)),
        EXT_FULL,
        target_chi_sigma_exponent=2,
    )
    assert report.target_chi_sigma_exponent == 2
    above2 = [r for r in report.audit if r.place.ell == 2]
    assert sum(r.contribution for r in above2) == 2
    above13 = [r for r in report.audit if r.place.ell == 13]
    assert len(above13) == 3
    # values recorded from genuine F_169 counts, not pre-asserted: recompute
    # the count independently and check the audit row carries q/N
    n169 = count_points(reduce_model(integral_model(E294), fq_create(13, 2)))
    for row in above13:
        assert row.q_v == 169
        assert row.L_at_1 == Fraction(169, n169)
        assert row.contribution == -vp(Fraction(169, n169), 7)
    # the computed total is reported side by side with the target
    assert report.chi_sigma_exponent == report.chi_cyc_exponent + sum(
        r.contribution for r in report.audit
    )
    _report(6, started, 60)


def test_criterion_7_hypothesis_gates(monkeypatch, capsys):
    started = time.monotonic()
    # p = 3 flips the p >= 5 clause and exits 2
    req = {
        "schema_version": 1,
        "curve": ["1", "0", "0", "-1", "-1"],
        "prime": 3,
        "base_field": 7,
        "abelian_variety": {
            "dimension": 2,
            "reduction_table": [
                {"prime": 2, "potentially_good": False, "good": False},
                {"prime": 3, "potentially_good": False, "good": False},
            ],
        },
        "external": {"selmer_finite": True, "lambda_torsion_certificate": True},
    }
    import io
    import sys

    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(req)))
    code = main(["analyze", "-", "--format", "json"])
    out = capsys.readouterr().out
    assert code == 2
    doc = json.loads(out)
    assert {h["name"]: h["status"] for h in doc["hypotheses"]}["p_prime_at_least_5"] == "FAIL"

    # supersingular at p flips the good-ordinary clause
    rep = analyze(
        EJ0,
        5,
        1,
        AbelianVarietyInput(dimension=1, factors=(EJ0,)),
        ExternalArithmetic(selmer_finite=True, lambda_torsion_certificate=True),
    )
    statuses = {h.name: h.status for h in rep.hypotheses}
    assert statuses["E_good_ordinary_above_p"] == "FAIL"
    assert rep.failed

    # and the good-ordinary check at the ramified place above 7 passes for E
    rep2 = analyze(E294, 7, 7, TABLE_23, EXT_FULL)
    statuses2 = {h.name: h.status for h in rep2.hypotheses}
    assert statuses2["E_good_ordinary_above_p"] == "PASS"
    _report(7, started, 30)


def test_criterion_8_property_suites():
    started = time.monotonic()
    rng = random.Random(2024)

    # (a) Hasse bound on 10^4 point counts
    small_primes = [5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
    hasse_checked = 0
    while hasse_checked < 10_000:
        ell = rng.choice(small_primes)
        f = 2 if (hasse_checked % 10 == 0 and ell <= 13) else 1
        field = fq_create(ell, f)
        model = WeierstrassModel(*(field.from_int(rng.randrange(ell)) for _ in range(5)))
        try:
            n = count_points(model)
        except SingularModelError:
            continue
        q = field.order
        assert (q + 1 - n) ** 2 <= 4 * q
        hasse_checked += 1

    # (b) 1728 * Delta = c4^3 - c6^2 on 10^4 random models
    for _ in range(10_000):
        model = WeierstrassModel.from_rationals([rng.randint(-9, 9) for _ in range(5)])
        b2, b4, b6, b8 = b_invariants(model)
        c4 = b2 * b2 - 24 * b4
        c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
        disc = discriminant(model)
        assert 1728 * disc == c4**3 - c6**2

    # (c) rule-based unramified base change == rerun on 200 cases
    cases = 0
    while cases < 200:
        model = WeierstrassModel.from_rationals([rng.randint(-5, 5) for _ in range(5)])
        ell = rng.choice([5, 7, 11, 13])
        f = rng.choice([2, 3])
        try:
            base = tate_algorithm(model, local_field_for(model, ell))
        except SingularModelError:
            continue
        rules = base_change_rules(base, f)
        rerun = base_change_unramified(base, f)
        assert rerun.potentially_good == rules["potentially_good"]
        for key in ("kodaira", "c_v", "N_v", "reduction_class", "L_at_1"):
            if key in rules:
                assert getattr(rerun, key) == rules[key]
        # (d) c_v <= 4 whenever potentially good, on every output seen here
        for data in (base, rerun):
            if data.potentially_good:
                assert data.c_v <= 4
        cases += 1

    # (e) torsion divides the p-part of good reductions, 10^3 (curve, prime) pairs
    pairs = 0
    while pairs < 1_000:
        model = WeierstrassModel.from_rationals([rng.randint(-2, 2) for _ in range(5)])
        p = rng.choice([5, 5, 5, 7])
        try:
            disc = discriminant(integral_model(model))
        except SingularModelError:
            continue
        if disc == 0:
            continue
        order = rational_p_torsion_order(model, p)
        ell = rng.choice([ell for ell in small_primes if ell != p])
        if disc.numerator % ell == 0:
            continue
        n = count_points(reduce_model(integral_model(model), fq_create(ell, 1)))
        assert n % order == 0
        pairs += 1

    # (f) precision-doubling stability on 50 Tate runs including Q_7(mu_7)
    stability_cases = [(E294, 7, 1, 6), (EPRIME, 7, 1, 6)]
    while len(stability_cases) < 50:
        model = WeierstrassModel.from_rationals([rng.randint(-4, 4) for _ in range(5)])
        try:
            discriminant(model)
            invariants(model)
        except SingularModelError:
            continue
        ell = rng.choice([2, 3, 5, 7, 11, 13])
        f = rng.choice([1, 1, 2])
        stability_cases.append((model, ell, f, 1))
    for model, ell, f, e in stability_cases:
        K = local_field_for(model, ell, f=f, e=e)
        d1 = tate_algorithm(model, K)
        K2 = local_field_for(model, ell, f=f, e=e, precision=2 * K.precision)
        d2 = tate_algorithm(model, K2)
        assert d1.comparable_fields() == d2.comparable_fields()

    _report(8, started, 300)


def test_criterion_9_tau_and_corank():
    started = time.monotonic()
    assert tau_p(E294, 7, 7) == 0
    assert tau_p(EJ0, 5, 1) == 1
    assert tau_p(EJ0, 5, 5) == 4
    # brute-force supersingularity oracle over F_25: count y^2 = x^3 + 1
    F25 = fq_create(5, 2)
    brute = 1
    for x in F25.elements():
        for y in F25.elements():
            if y * y == x * x * x + F25.one():
                brute += 1
    assert brute % 5 == 1  # supersingular at 5
    assert brute == extension_count(count_points(reduce_model(EJ0, fq_create(5, 1))), 5, 2)
    rep = corank_report(6, tau_p(E294, 7, 7), None)
    assert rep.window == (0, 6)
    _report(9, started, 60)
