import json
from dataclasses import replace
from fractions import Fraction

import pytest

from eulerchar.cli import report_to_dict
from eulerchar.curves import TorsionEstimate, WeierstrassModel
from eulerchar.euler import (
    ASSUMED,
    FAIL,
    PASS,
    AbelianVarietyInput,
    ExternalArithmetic,
    ReductionFact,
    analyze,
    check_hypotheses,
    chi_euler,
    compute_M,
    corank_report,
    gamma_kernel_exponent,
    hypotheses_failed,
    local_data_at,
    places_above,
    ramified_places,
    rho_p,
    tau_p,
)
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


def test_compute_M_factor_curve():
    rational, places = compute_M(AbelianVarietyInput(dimension=1, factors=(EPRIME,)), 7)
    assert rational == [2, 13]
    by_ell = {}
    for pl in places:
        by_ell.setdefault(pl.ell, []).append(pl)
    assert len(by_ell[2]) == 2  # two places of F above 2
    assert len(by_ell[13]) == 3  # three places above 13
    rational_e, _ = compute_M(AbelianVarietyInput(dimension=1, factors=(E294,)), 7)
    assert rational_e == [2, 3]


def test_compute_M_everywhere_potentially_good():
    rational, places = compute_M(AbelianVarietyInput(dimension=1, factors=(EJ0,)), 7)
    assert rational == [] and places == []


def test_compute_M_table_precedence():
    rational, _ = compute_M(TABLE_23, 7)
    assert rational == [2, 3]
    with pytest.raises(ValueError):
        compute_M(
            AbelianVarietyInput(
                dimension=1, reduction_table=(ReductionFact(2, False, True),)
            ),
            7,
        )


def test_ramified_places():
    places = ramified_places(AbelianVarietyInput(dimension=1, factors=(EPRIME,)), 7, 7)
    assert sorted({pl.ell for pl in places}) == [2, 7, 13]
    places2 = ramified_places(AbelianVarietyInput(dimension=1, factors=(EJ0,)), 7, 7)
    assert sorted({pl.ell for pl in places2}) == [7]
    both = ramified_places(
        AbelianVarietyInput(dimension=2, factors=(E294, EPRIME)), 7, 7
    )
    assert sorted({pl.ell for pl in both}) == [2, 3, 7, 13]


def test_check_hypotheses_statuses():
    rows = check_hypotheses(E294, TABLE_23, 7, 7, EXT_FULL)
    by_name = {r.name: r for r in rows}
    assert by_name["p_prime_at_least_5"].status == PASS
    # dim = 2: threshold 2*2+1 = 5 and 7 > 5
    assert by_name["sigma_no_p_torsion"].status == PASS
    assert by_name["E_good_ordinary_above_p"].status == PASS
    assert by_name["selmer_finite"].status == ASSUMED
    assert by_name["dual_selmer_lambda_torsion"].status == ASSUMED
    assert not hypotheses_failed(rows)


def test_check_hypotheses_failures():
    rows = check_hypotheses(E294, TABLE_23, 3, 7, EXT_FULL)
    by_name = {r.name: r for r in rows}
    assert by_name["p_prime_at_least_5"].status == FAIL
    assert hypotheses_failed(rows)

    # supersingular at p: y^2 = x^3 + 1 at p = 5
    rows2 = check_hypotheses(
        EJ0, AbelianVarietyInput(dimension=1, factors=(EJ0,)), 5, 1, EXT_FULL
    )
    by_name2 = {r.name: r for r in rows2}
    assert by_name2["E_good_ordinary_above_p"].status == FAIL

    # low p against large dimension without certificate
    rows3 = check_hypotheses(
        E294, AbelianVarietyInput(dimension=3, reduction_table=(ReductionFact(2, False, False),)),
        7, 7, ExternalArithmetic(selmer_finite=True, lambda_torsion_certificate=True,
                                 torsion_p_override=7),
    )
    assert {r.name: r.status for r in rows3}["sigma_no_p_torsion"] == FAIL
    rows4 = check_hypotheses(
        E294, AbelianVarietyInput(dimension=3, reduction_table=(ReductionFact(2, False, False),)),
        7, 7, ExternalArithmetic(selmer_finite=True, lambda_torsion_certificate=True,
                                 torsion_p_override=7, no_p_torsion_certificate=True),
    )
    assert {r.name: r.status for r in rows4}["sigma_no_p_torsion"] == ASSUMED


def _place_rows(model, p, m, primes):
    rows = []
    for ell in primes:
        data = local_data_at(model, ell, m)
        for pl in places_above(ell, m):
            rows.append((pl, data))
    return rows


def test_rho_reference_configuration():
    rows = _place_rows(E294, 7, 7, [2, 3, 7])
    torsion = TorsionEstimate(p=7, lower=7, upper=7, exact=True)
    rho = rho_p(7, rows, torsion, EXT_FULL)
    assert rho.exponent == 0
    assert rho.breakdown == {
        "sha": 0,
        "torsion": -2,
        "tamagawa": 0,
        "reduction_counts": 2,
    }


def test_rho_trivial_and_sha():
    torsion = TorsionEstimate(p=7, lower=1, upper=1, exact=True)
    rho = rho_p(7, [], torsion, ExternalArithmetic(sha_p_order=1))
    assert rho.exponent == 0
    rho2 = rho_p(7, [], torsion, ExternalArithmetic(sha_p_order=7))
    assert rho2.exponent == 1


def test_rho_window_when_not_exact():
    torsion = TorsionEstimate(p=7, lower=1, upper=7, exact=False)
    rho = rho_p(7, [], torsion, ExternalArithmetic())
    assert rho.exponent is None
    assert rho.window == (-2, 0)


def test_rho_override_when_not_exact():
    torsion = TorsionEstimate(p=7, lower=1, upper=7, exact=False)
    rho = rho_p(7, [], torsion, ExternalArithmetic(torsion_p_override=7))
    assert rho.exponent == -2


def test_rho_ignores_euler_factors():
    """rho never reads L_at_1: perturbing every Euler factor changes nothing."""
    rows = _place_rows(E294, 7, 7, [2, 3, 7])
    torsion = TorsionEstimate(p=7, lower=7, upper=7, exact=True)
    before = rho_p(7, rows, torsion, EXT_FULL).exponent
    perturbed = [
        (pl, replace(data, L_at_1=data.L_at_1 * Fraction(7, 3))) for pl, data in rows
    ]
    assert rho_p(7, perturbed, torsion, EXT_FULL).exponent == before


def test_chi_example_one():
    rows = _place_rows(E294, 7, 7, [2, 3, 7])
    torsion = TorsionEstimate(p=7, lower=7, upper=7, exact=True)
    rho = rho_p(7, rows, torsion, EXT_FULL)
    m_rows = [(pl, d) for pl, d in rows if pl.ell in (2, 3)]
    chi_cyc, chi_sigma, audit = chi_euler(7, rho, m_rows, {2: False, 3: False})
    assert chi_cyc == 0
    assert chi_sigma == 3  # 7^3
    assert [row.contribution for row in audit] == [1, 1, 1]
    assert chi_sigma - chi_cyc == sum(r.contribution for r in audit)


def test_chi_empty_bad_set():
    torsion = TorsionEstimate(p=7, lower=1, upper=1, exact=True)
    rho = rho_p(7, [], torsion, ExternalArithmetic())
    chi_cyc, chi_sigma, audit = chi_euler(7, rho, [], {})
    assert chi_cyc == chi_sigma == 0 and audit == []


def test_tau_anchors():
    assert tau_p(E294, 7, 7) == 0
    assert tau_p(EJ0, 5, 1) == 1
    assert tau_p(EJ0, 5, 5) == 4  # unique totally ramified place, e*f = phi(5)
    assert tau_p(E294, 2, 7) == 0  # potentially multiplicative: the zero branch


def test_gamma_kernel_anchors():
    data2 = local_data_at(E294, 2, 7)  # split, c = 1, L = 8/7
    assert gamma_kernel_exponent(data2, False, 7) == 1
    data3 = local_data_at(E294, 3, 7)  # split, c = 1, L = 729/728
    assert gamma_kernel_exponent(data3, False, 7) == 1
    # both potentially good: isomorphism
    data13 = local_data_at(EJ0, 13, 7)
    assert gamma_kernel_exponent(data13, True, 7) == 0
    # A potentially good, E not: |c_v|_p
    assert gamma_kernel_exponent(data2, True, 7) == 0  # c_v = 1
    with pytest.raises(ValueError):
        gamma_kernel_exponent(local_data_at(E294, 7, 7), True, 7)


def test_corank_reports():
    rep = corank_report(6, 0, None)
    assert rep.window == (0, 6)
    assert rep.global_corank is None
    pinned = corank_report(4, 4, None)
    assert pinned.window == (4, 4)
    full = corank_report(1, 1, 48)
    assert (full.global_corank, full.local_corank, full.conjectural_rank) == (48, 0, 48)


def test_analyze_example_one_end_to_end():
    report = analyze(E294, 7, 7, TABLE_23, EXT_FULL)
    assert report.chi_sigma_exponent == 3
    assert report.chi_cyc_exponent == 0
    assert report.rho.exponent == 0
    assert not report.failed and not report.suppressed
    assert report.M_rational == [2, 3]
    assert report.tau == 0
    assert report.coranks.window == (0, 6)


def test_analyze_example_two_audit():
    report = analyze(
        E294,
        7,
        7,
        AbelianVarietyInput(dimension=1, factors=(EPRIME,)),
        EXT_FULL,
        target_chi_sigma_exponent=2,
    )
    assert report.M_rational == [2, 13]
    above2 = [r for r in report.audit if r.place.ell == 2]
    above13 = [r for r in report.audit if r.place.ell == 13]
    assert sum(r.contribution for r in above2) == 2
    assert len(above13) == 3
    for row in above13:
        assert row.q_v == 169
        assert row.L_at_1 == Fraction(169, row.L_at_1.denominator)
        assert row.L_at_1.denominator == 196  # genuine F_169 count
    assert report.target_chi_sigma_exponent == 2


def test_analyze_not_exact_suppression():
    ext = ExternalArithmetic(selmer_finite=True, lambda_torsion_certificate=True)
    report = analyze(E294, 7, 7, TABLE_23, ext)
    assert report.suppressed
    assert report.chi_sigma_exponent is None
    assert report.rho.exponent is None
    assert report.rho.window == (0, 2)
    assert report.suppression_reason["code"] == "TORSION_NOT_EXACT"


def test_report_determinism():
    doc1 = json.dumps(report_to_dict(analyze(E294, 7, 7, TABLE_23, EXT_FULL)), indent=2)
    doc2 = json.dumps(report_to_dict(analyze(E294, 7, 7, TABLE_23, EXT_FULL)), indent=2)
    assert doc1 == doc2
