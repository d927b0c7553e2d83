"""Global quantities of the Euler-characteristic formula: the bad-place set
of the tower, hypothesis audit, the Birch-Swinnerton-Dyer-type invariant
rho_p, the Euler characteristics over the cyclotomic line and over the full
tower, tau_p, local restriction-kernel orders, and corank predictions.

Everything here is exact integer arithmetic on p-adic valuation exponents;
chi values are only ever (base p, exponent) pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curves import (
    TorsionEstimate,
    WeierstrassModel,
    discriminant,
    integral_model,
    invariants,
    torsion_bound_over_F,
)
from .cyclotomic import field_degree, splitting
from .tate import (
    GOOD_ORDINARY,
    LocalReductionData,
    local_field_for,
    pot_supersingular,
    tate_algorithm,
)
from .valuations import PLUS_INFINITY, factorize, is_prime, vp

PASS = "PASS"
FAIL = "FAIL"
ASSUMED = "ASSUMED"


@dataclass(frozen=True)
class ReductionFact:
    """User-supplied reduction behaviour of the abelian variety at a prime."""

    prime: int
    potentially_good: bool
    good: bool


@dataclass(frozen=True)
class AbelianVarietyInput:
    """The variety whose division tower is adjoined: either an explicit
    product of elliptic-curve factors, or a table covering every bad prime."""

    dimension: int
    factors: tuple[WeierstrassModel, ...] = ()
    reduction_table: tuple[ReductionFact, ...] = ()

    def __post_init__(self):
        if self.factors and self.dimension != len(self.factors):
            raise ValueError("dimension must equal the number of factors")
        if not self.factors and not self.reduction_table and self.dimension < 1:
            raise ValueError("abelian variety input is empty")

    def table_fact(self, ell: int) -> ReductionFact | None:
        for fact in self.reduction_table:
            if fact.prime == ell:
                return fact
        return None

    def potentially_good_at(self, ell: int) -> bool:
        """Reduction tables take precedence over factor curves."""
        if self.reduction_table:
            fact = self.table_fact(ell)
            return True if fact is None else fact.potentially_good
        return all(vp(invariants(f).j, ell) >= 0 for f in self.factors)


@dataclass(frozen=True)
class ExternalArithmetic:
    """Certificates the formula consumes but never computes."""

    sha_p_order: int = 1
    selmer_finite: bool = False
    lambda_torsion_certificate: bool = False
    torsion_p_override: int | None = None
    sigma_index_R: int | None = None
    no_p_torsion_certificate: bool = False


@dataclass(frozen=True)
class Place:
    """One place of Q(mu_m), identified by its rational prime and an index
    among the g conjugate places (which all share (e, f))."""

    ell: int
    e: int
    f: int
    index: int
    g: int

    @property
    def label(self) -> str:
        return f"{self.ell}#{self.index}"

    @property
    def q_v(self) -> int:
        return self.ell**self.f


@dataclass(frozen=True)
class HypothesisResult:
    name: str
    status: str
    detail: str


def places_above(ell: int, m: int) -> list[Place]:
    sp = splitting(ell, m)
    return [Place(ell, sp.e, sp.f, i + 1, sp.g) for i in range(sp.g)]


def bad_primes_of_curve(model: WeierstrassModel) -> list[int]:
    """Primes where the given integral model has positive disc valuation."""
    disc = discriminant(integral_model(model))
    return [p for p, _ in factorize(abs(disc.numerator))]


def compute_M(A: AbelianVarietyInput, m: int) -> tuple[list[int], list[Place]]:
    """Rational primes (and the places of Q(mu_m) above them) where the
    abelian variety has bad and not potentially good reduction.

    For factor curves the criterion is v_ell(j) < 0 for some factor; a
    reduction table takes precedence when supplied.
    """
    rational: set[int] = set()
    if A.reduction_table:
        for fact in A.reduction_table:
            if not fact.potentially_good:
                if fact.good:
                    raise ValueError(
                        f"table marks {fact.prime} good but not potentially good"
                    )
                rational.add(fact.prime)
    else:
        if not A.factors:
            raise ValueError("abelian variety has neither factors nor a table")
        for factor in A.factors:
            # v_ell(j) < 0 exactly at the primes of the reduced denominator
            j = invariants(factor).j
            rational.update(q for q, _ in factorize(j.denominator))
    rational_sorted = sorted(rational)
    places = [pl for ell in rational_sorted for pl in places_above(ell, m)]
    return rational_sorted, places


def ramified_places(A: AbelianVarietyInput, p: int, m: int) -> list[Place]:
    """Places of Q(mu_m) ramifying in the division tower: the bad-not-
    potentially-good set together with every place above p."""
    rational, places = compute_M(A, m)
    if p not in rational:
        places = places + places_above(p, m)
    return sorted(places, key=lambda pl: (pl.ell, pl.index))


def local_data_at(
    model: WeierstrassModel, ell: int, m: int, precision: int | None = None
) -> LocalReductionData:
    """Reduction data of the curve at (any of) the places of Q(mu_m) above ell."""
    sp = splitting(ell, m)
    K = local_field_for(model, ell, f=sp.f, e=sp.e, precision=precision)
    return tate_algorithm(model, K)


def check_hypotheses(
    E: WeierstrassModel,
    A: AbelianVarietyInput,
    p: int,
    m: int,
    ext: ExternalArithmetic,
    e_data_at_p: LocalReductionData | None = None,
) -> list[HypothesisResult]:
    """Audit of every clause the Euler-characteristic formula assumes.

    Statuses: PASS (verified), ASSUMED (user certificate), FAIL.  The table
    is always produced; no clause failure aborts the computation.
    """
    rows: list[HypothesisResult] = []

    if is_prime(p) and p >= 5:
        rows.append(HypothesisResult("p_prime_at_least_5", PASS, f"p = {p}"))
    else:
        rows.append(
            HypothesisResult("p_prime_at_least_5", FAIL, f"p = {p} is not a prime >= 5")
        )

    threshold = 2 * A.dimension + 1
    if p > threshold:
        rows.append(
            HypothesisResult(
                "sigma_no_p_torsion",
                PASS,
                f"p = {p} > 2*dim(A) + 1 = {threshold}",
            )
        )
    elif ext.no_p_torsion_certificate:
        rows.append(
            HypothesisResult(
                "sigma_no_p_torsion", ASSUMED, "certified by no_p_torsion_certificate"
            )
        )
    else:
        rows.append(
            HypothesisResult(
                "sigma_no_p_torsion",
                FAIL,
                f"p = {p} <= {threshold} and no certificate supplied",
            )
        )

    if e_data_at_p is None:
        e_data_at_p = local_data_at(E, p, m)
    if e_data_at_p.reduction_class == GOOD_ORDINARY:
        rows.append(
            HypothesisResult(
                "E_good_ordinary_above_p",
                PASS,
                f"class {e_data_at_p.reduction_class}, N_v = {e_data_at_p.N_v}",
            )
        )
    else:
        rows.append(
            HypothesisResult(
                "E_good_ordinary_above_p",
                FAIL,
                f"class {e_data_at_p.reduction_class} at the place above {p}",
            )
        )

    if A.factors:
        bad = []
        for i, factor in enumerate(A.factors):
            data = local_data_at(factor, p, m)
            if data.reduction_class != GOOD_ORDINARY:
                bad.append(f"factor {i + 1}: {data.reduction_class}")
        if bad:
            rows.append(HypothesisResult("A_good_ordinary_above_p", FAIL, "; ".join(bad)))
        else:
            rows.append(
                HypothesisResult(
                    "A_good_ordinary_above_p", PASS, "all factors good ordinary"
                )
            )
    else:
        fact = A.table_fact(p)
        if fact is not None and not fact.good:
            rows.append(
                HypothesisResult(
                    "A_good_ordinary_above_p", FAIL, f"table marks {p} as bad"
                )
            )
        else:
            rows.append(
                HypothesisResult(
                    "A_good_ordinary_above_p",
                    ASSUMED,
                    "reduction table cannot certify ordinariness",
                )
            )

    rows.append(
        HypothesisResult(
            "selmer_finite",
            ASSUMED if ext.selmer_finite else FAIL,
            "user certificate" if ext.selmer_finite else "no certificate supplied",
        )
    )
    rows.append(
        HypothesisResult(
            "dual_selmer_lambda_torsion",
            ASSUMED if ext.lambda_torsion_certificate else FAIL,
            "user certificate" if ext.lambda_torsion_certificate else "no certificate supplied",
        )
    )
    rows.append(
        HypothesisResult(
            "finitely_many_ramified_primes",
            PASS,
            "ramification is confined to bad-not-potentially-good places and p",
        )
    )
    rows.append(
        HypothesisResult(
            "contains_cyclotomic_tower",
            PASS,
            "automatic from the Weil pairing on the division points",
        )
    )
    return rows


def hypotheses_failed(rows: list[HypothesisResult]) -> bool:
    return any(r.status == FAIL for r in rows)


# -- the exponent arithmetic ---------------------------------------------------------


def _vp_int(n: int, p: int) -> int:
    v = vp(Fraction(n), p)
    if v is PLUS_INFINITY:
        raise ValueError("valuation of zero requested")
    return v


@dataclass(frozen=True)
class RhoResult:
    """rho_p = p^exponent, with the audit decomposition of the exponent.

    When the torsion input is not exact the exponent is None and the window
    carries the two exponents obtained from the torsion bracket.
    """

    p: int
    exponent: int | None
    window: tuple[int, int]
    breakdown: dict

    @property
    def exact(self) -> bool:
        return self.exponent is not None


def rho_p(
    p: int,
    place_data: list[tuple[Place, LocalReductionData]],
    torsion: TorsionEstimate,
    ext: ExternalArithmetic,
) -> RhoResult:
    """Exponent k with rho_p = p^k:

    k = vp(sha) - 2 vp(#torsion) + sum_v vp(c_v) + 2 sum_{v|p} vp(N_v).

    Torsion enters through the exact order when the estimate is exact, or
    through the user override certificate; otherwise the result is an
    exponent window and no single value is fabricated.
    """
    sha_exp = _vp_int(ext.sha_p_order, p)
    tamagawa = sum(_vp_int(data.c_v, p) for _, data in place_data)
    counts = 2 * sum(
        _vp_int(data.N_v, p) for _, data in place_data if data.ell == p and data.is_good
    )
    base = sha_exp + tamagawa + counts

    if torsion.exact:
        t_exp = _vp_int(torsion.order, p)
        exact_exp: int | None = base - 2 * t_exp
        window = (exact_exp, exact_exp)
        torsion_term = -2 * t_exp
    elif ext.torsion_p_override is not None:
        t_exp = _vp_int(ext.torsion_p_override, p)
        exact_exp = base - 2 * t_exp
        window = (exact_exp, exact_exp)
        torsion_term = -2 * t_exp
    else:
        lo = base - 2 * _vp_int(torsion.upper, p)
        hi = base - 2 * _vp_int(torsion.lower, p)
        exact_exp = None
        window = (lo, hi)
        torsion_term = None
    breakdown = {
        "sha": sha_exp,
        "torsion": torsion_term,
        "tamagawa": tamagawa,
        "reduction_counts": counts,
    }
    return RhoResult(p=p, exponent=exact_exp, window=window, breakdown=breakdown)


@dataclass(frozen=True)
class AuditRow:
    """Per-place contribution to |prod L_v(E,1)|_p over the bad-tower set."""

    place: Place
    q_v: int
    reduction_class: str
    L_at_1: Fraction
    vp_L: int
    contribution: int  # -vp_L, the exponent this place adds to chi_sigma
    gamma_kernel_exponent: int | None


def chi_euler(
    p: int,
    rho: RhoResult,
    m_place_data: list[tuple[Place, LocalReductionData]],
    a_potentially_good: dict[int, bool] | None = None,
) -> tuple[int | None, int | None, list[AuditRow]]:
    """(chi_cyc exponent, chi_sigma exponent, per-place audit).

    chi_cyc equals the rho exponent; chi_sigma adds -vp(L_v(E,1)) at every
    place of the bad-tower set.  Both are None when rho is not exact.
    """
    rows: list[AuditRow] = []
    total = 0
    for place, data in m_place_data:
        v = vp(data.L_at_1, p)
        if v is PLUS_INFINITY:
            raise AssertionError("Euler factor cannot vanish")
        gamma = None
        if place.ell != p:
            a_pg = False if a_potentially_good is None else a_potentially_good.get(place.ell, False)
            gamma = gamma_kernel_exponent(data, a_pg, p)
        rows.append(
            AuditRow(
                place=place,
                q_v=data.q_v,
                reduction_class=data.reduction_class,
                L_at_1=data.L_at_1,
                vp_L=v,
                contribution=-v,
                gamma_kernel_exponent=gamma,
            )
        )
        total += -v
    if not rho.exact:
        return None, None, rows
    chi_cyc = rho.exponent
    chi_sigma = chi_cyc + total
    return chi_cyc, chi_sigma, rows


def tau_p(E: WeierstrassModel, p: int, m: int) -> int:
    """Sum of local degrees [F_v : Q_p] over places above p where the
    reduction is potentially supersingular; 0 in the potentially
    multiplicative or potentially ordinary cases."""
    j = invariants(E).j
    vj = vp(j, p)
    if vj is not PLUS_INFINITY and vj < 0:
        return 0
    if not pot_supersingular(E, p):
        return 0
    sp = splitting(p, m)
    return sp.g * sp.e * sp.f


def gamma_kernel_exponent(
    e_data: LocalReductionData, a_potentially_good: bool, p: int
) -> int:
    """Exponent k with #ker(gamma_v) = p^k at a place v not dividing p.

    Both potentially good: the restriction map is an isomorphism (k = 0).
    A potentially good, E not: k = vp(c_v).  A not potentially good:
    k = vp(c_v / L_v(E,1)).
    """
    if e_data.ell == p:
        raise ValueError("gamma kernel orders are computed away from p")
    c_exp = _vp_int(e_data.c_v, p)
    if a_potentially_good and e_data.potentially_good:
        return 0
    if a_potentially_good:
        return c_exp
    vL = vp(e_data.L_at_1, p)
    if vL is PLUS_INFINITY:
        raise AssertionError("Euler factor cannot vanish")
    return c_exp - vL


@dataclass(frozen=True)
class CorankReport:
    """Window and (when the tower index is certified) absolute predictions
    for the normalized rank of the dual Selmer module."""

    tau: int
    degree: int
    sigma_index_R: int | None
    global_corank: int | None
    local_corank: int | None
    conjectural_rank: int | None

    @property
    def window(self) -> tuple[int, int]:
        return (self.tau, self.degree)


def corank_report(degree: int, tau: int, sigma_index_R: int | None) -> CorankReport:
    if tau > degree:
        raise AssertionError("tau exceeds the field degree")
    if sigma_index_R is None:
        return CorankReport(tau, degree, None, None, None, None)
    return CorankReport(
        tau,
        degree,
        sigma_index_R,
        sigma_index_R * degree,
        sigma_index_R * (degree - tau),
        sigma_index_R * tau,
    )


# -- full pipeline --------------------------------------------------------------------


@dataclass
class EulerCharReport:
    p: int
    conductor: int
    degree: int
    hypotheses: list[HypothesisResult]
    M_rational: list[int]
    places: list[tuple[Place, LocalReductionData]]
    torsion: TorsionEstimate | None
    torsion_source: str
    rho: RhoResult
    chi_cyc_exponent: int | None
    chi_sigma_exponent: int | None
    audit: list[AuditRow]
    tau: int
    coranks: CorankReport
    target_chi_sigma_exponent: int | None
    suppressed: bool
    suppression_reason: dict | None

    @property
    def failed(self) -> bool:
        return hypotheses_failed(self.hypotheses)


def analyze(
    E: WeierstrassModel,
    p: int,
    m: int,
    A: AbelianVarietyInput,
    ext: ExternalArithmetic,
    samples: int = 20,
    precision: int | None = None,
    target_chi_sigma_exponent: int | None = None,
) -> EulerCharReport:
    """Run the whole pipeline: local data at every relevant place, the
    hypothesis audit, torsion bracketing, rho_p, both Euler-characteristic
    exponents, tau_p and the corank window."""
    if m < 1:
        raise ValueError("conductor must be >= 1")
    if not is_prime(p):
        raise ValueError("p must be prime")
    invariants(E)  # reject singular input with a clear diagnostic

    M_rational, M_places = compute_M(A, m)

    e_bad = bad_primes_of_curve(E)
    relevant = sorted(set(e_bad) | set(M_rational) | {p})
    data_by_ell: dict[int, LocalReductionData] = {}
    for ell in relevant:
        data_by_ell[ell] = local_data_at(E, ell, m, precision=precision)

    place_rows: list[tuple[Place, LocalReductionData]] = []
    for ell in relevant:
        for place in places_above(ell, m):
            place_rows.append((place, data_by_ell[ell]))

    e_data_at_p = data_by_ell[p]
    hypotheses = check_hypotheses(E, A, p, m, ext, e_data_at_p=e_data_at_p)

    if p >= 5:
        torsion = torsion_bound_over_F(
            E, p, m, samples=samples, lower_certificate=ext.torsion_p_override
        )
        torsion_source = "certificate" if ext.torsion_p_override is not None else "computed"
        rho = rho_p(p, place_rows, torsion, ext)
    else:
        # the torsion machinery requires p >= 5; the p >= 5 hypothesis
        # clause has already FAILed, so rho stays undetermined
        torsion = None
        torsion_source = "unavailable"
        base = _vp_int(ext.sha_p_order, p) + sum(
            _vp_int(d.c_v, p) for _, d in place_rows
        ) + 2 * sum(
            _vp_int(d.N_v, p) for _, d in place_rows if d.ell == p and d.is_good
        )
        rho = RhoResult(
            p=p,
            exponent=None,
            window=(base, base),
            breakdown={"sha": _vp_int(ext.sha_p_order, p), "torsion": None,
                       "tamagawa": sum(_vp_int(d.c_v, p) for _, d in place_rows),
                       "reduction_counts": 2 * sum(
                           _vp_int(d.N_v, p)
                           for _, d in place_rows if d.ell == p and d.is_good)},
        )

    m_place_rows = [(pl, data) for pl, data in place_rows if pl.ell in M_rational]
    a_pot_good = {ell: A.potentially_good_at(ell) for ell in relevant}
    chi_cyc, chi_sigma, audit = chi_euler(p, rho, m_place_rows, a_pot_good)

    suppressed = chi_sigma is None
    reason = None
    if suppressed and torsion is None:
        reason = {"code": "TORSION_UNAVAILABLE_FOR_SMALL_P", "p": p}
    elif suppressed:
        reason = {
            "code": "TORSION_NOT_EXACT",
            "lower": torsion.lower,
            "upper": torsion.upper,
            "hint": "supply torsion_p_override or raise samples",
        }

    tau = tau_p(E, p, m)
    coranks = corank_report(field_degree(m), tau, ext.sigma_index_R)

    return EulerCharReport(
        p=p,
        conductor=m,
        degree=field_degree(m),
        hypotheses=hypotheses,
        M_rational=list(M_rational),
        places=place_rows,
        torsion=torsion,
        torsion_source=torsion_source,
        rho=rho,
        chi_cyc_exponent=chi_cyc,
        chi_sigma_exponent=chi_sigma,
        audit=audit,
        tau=tau,
        coranks=coranks,
        target_chi_sigma_exponent=target_chi_sigma_exponent,
        suppressed=suppressed,
        suppression_reason=reason,
    )
