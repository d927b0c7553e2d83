"""Tate's algorithm over the supported local fields, reduction
classification, Tamagawa numbers, local Euler factors at s = 1, unramified
base change, and the potential-supersingularity test.

The algorithm follows the classical step ladder (I0, I_n, II, III, IV,
I0*, I_n*, IV*, III*, II*, rescale) and works for every residue
characteristic.  Residue characteristic 2 needs two non-generic
normalizations, both solved with residue-field square roots: the
coordinate change before the step-6 cubic uses s with s^2 = a2 mod pi and
t = pi * sqrt(a6 / pi^2 mod pi); everything else divides only by units.
Singular points and multiple roots come from closed-form solutions, and
residue-field root counts scan only small fields (larger ones go through
deg gcd(P, x^q - x)), so no step is linear in the residue field size.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curves import (
    COUNT_CAP,
    WeierstrassModel,
    count_points,
    extension_count,
    integral_model,
    invariants,
    model_with_j_invariant,
)
from .finite_fields import FqElement, FqField, fq_create
from .local_fields import LocalElement, LocalField, PrecisionError, make_local_field
from .polynomials import Polynomial, count_roots_in_field
from .valuations import PLUS_INFINITY, vp

GOOD_ORDINARY = "GoodOrdinary"
GOOD_SUPERSINGULAR = "GoodSupersingular"
MULT_SPLIT = "MultSplit"
MULT_NONSPLIT = "MultNonsplit"
ADDITIVE = "Additive"

_DIRECT_COUNT_LIMIT = 500_000


@dataclass(frozen=True)
class KodairaType:
    kind: str  # I0, In, II, III, IV, I0*, In*, IV*, III*, II*
    n: int = 0

    @property
    def symbol(self) -> str:
        if self.kind == "In":
            return f"I{self.n}"
        if self.kind == "In*":
            return f"I{self.n}*"
        return self.kind

    @property
    def is_good(self) -> bool:
        return self.kind == "I0"

    @property
    def is_multiplicative(self) -> bool:
        return self.kind == "In"

    @property
    def is_additive(self) -> bool:
        return not (self.is_good or self.is_multiplicative)


@dataclass(frozen=True)
class LocalReductionData:
    """Per-place output of Tate's algorithm."""

    ell: int
    e: int
    f: int
    kodaira: KodairaType
    c_v: int
    v_min_delta: int
    q_v: int
    reduction_class: str
    potentially_good: bool
    N_v: int | None
    L_at_1: Fraction
    model: WeierstrassModel
    reduced_model: WeierstrassModel | None
    precision_used: int

    @property
    def is_good(self) -> bool:
        return self.kodaira.is_good

    def comparable_fields(self) -> tuple:
        """Everything reported, without the carried models and precision."""
        return (
            self.ell,
            self.e,
            self.f,
            self.kodaira,
            self.c_v,
            self.v_min_delta,
            self.q_v,
            self.reduction_class,
            self.potentially_good,
            self.N_v,
            self.L_at_1,
        )


def default_precision(model: WeierstrassModel, ell: int, e: int) -> int:
    """Working pi-adic precision: Tate inspects valuations only up to
    v(Delta) plus bounded slack."""
    disc = invariants(integral_model(model)).disc
    vd = vp(disc, ell)
    vd = 0 if vd is PLUS_INFINITY else max(vd, 0)
    return e * (vd + 12) + 24


def local_field_for(
    model: WeierstrassModel,
    ell: int,
    f: int = 1,
    e: int = 1,
    precision: int | None = None,
) -> LocalField:
    """The completion at a place with the given residue data, with a
    model-aware default precision.  e = ell - 1 selects the cyclotomic layer
    Q_ell(mu_ell); other tame ramification uses the x^e - ell model."""
    if precision is None:
        precision = default_precision(model, ell, e)
    cyclotomic = e == ell - 1 and e > 1
    return make_local_field(ell, f=f, e=e, precision=precision, cyclotomic=cyclotomic)


# -- residue-field helpers -----------------------------------------------------


def _quadratic_data(A: FqElement, B: FqElement, C: FqElement):
    """(has distinct roots, root count in k, double root) for A X^2 + B X + C."""
    k = A.field
    disc = B * B - 4 * A * C
    if not disc.is_zero():
        return True, count_roots_in_field(Polynomial([C, B, A]), k), None
    if k.characteristic == 2:
        double = k.sqrt(C / A)
    else:
        double = -B / (2 * A)
    return False, 1, double


def _cubic_analysis(a: FqElement, b: FqElement, c: FqElement):
    """Root structure of P = T^3 + a T^2 + b T + c over k.

    Returns ("distinct", count of roots in k), ("double", root) or
    ("triple", root); multiple roots of a cubic are always rational over a
    perfect field.
    """
    k = a.field
    disc = (
        18 * a * b * c - 4 * a * a * a * c + a * a * b * b - 4 * b * b * b - 27 * c * c
    )
    poly = Polynomial([c, b, a, k.one()])
    if not disc.is_zero():
        return "distinct", count_roots_in_field(poly, k)
    # the multiple root is rational and has a closed form in every
    # characteristic: it is the sole root of gcd(P, P')
    p = k.characteristic
    if p == 2:
        # P' = T^2 + b, so the multiple root squares to b; triple iff b = a^2
        if (b - a * a).is_zero():
            kind, r = "triple", a
        else:
            kind, r = "double", k.sqrt(b)
    else:
        hessian = a * a - 3 * b  # (double root - simple root)^2 when disc = 0
        if not hessian.is_zero():
            kind, r = "double", (9 * c - a * b) / (2 * hessian)
        elif p == 3:
            kind, r = "triple", k.char_root(-c)
        else:
            kind, r = "triple", -a / k.from_int(3)
    if not poly.evaluate(r).is_zero():
        raise AssertionError("cubic multiple-root formulas failed")
    return kind, r


def _singular_point(abar: list[FqElement], k: FqField):
    """The unique singular point of a singular reduced Weierstrass cubic,
    by closed-form solution of the two vanishing partial derivatives.

    Characteristic 2 inverts the y-partial directly (square roots are the
    Frobenius inverse there); characteristic 3 solves the x-partial, which
    degenerates to a cube root when its linear coefficient vanishes; odd
    characteristic >= 5 completes the square and locates the multiple root
    of the resulting cubic from its coefficients.
    """
    a1, a2, a3, a4, a6 = abar

    def F(x, y):
        return y * y + (a1 * x + a3) * y - (((x + a2) * x + a4) * x + a6)

    def Fx(x, y):
        return a1 * y - (3 * x * x + 2 * a2 * x + a4)

    p = k.characteristic
    if p == 2:
        if not a1.is_zero():
            x0 = a3 / a1
            y0 = (x0 * x0 + a4) / a1
        else:
            if not a3.is_zero():
                raise AssertionError("nonsingular reduction reached singular search")
            x0 = k.sqrt(a4)
            y0 = k.sqrt(((x0 + a2) * x0 + a4) * x0 + a6)
        if not F(x0, y0).is_zero():
            raise AssertionError("char-2 singular point formulas failed")
        return x0, y0

    inv2 = k.from_int(2).inverse()
    if p == 3:
        # F_x(x, y(x)) = (a1^2 + a2) x + (a1 a3 - a4) along 2y = -(a1 x + a3)
        lead = a1 * a1 + a2
        if not lead.is_zero():
            x0 = (a4 - a1 * a3) / lead
        else:
            # then F(x, y(x)) = -(x^3 + a6 + a3^2); Frobenius gives the cube root
            x0 = k.char_root(-(a6 + a3 * a3))
    else:
        # complete the square: eta^2 = x^3 + (b2/4) x^2 + (b4/2) x + b6/4,
        # and take the multiple root of the right-hand cubic
        inv4 = inv2 * inv2
        c2 = (a1 * a1 + 4 * a2) * inv4
        c1 = (2 * a4 + a1 * a3) * inv2
        c0 = (a3 * a3 + 4 * a6) * inv4
        hessian = c2 * c2 - 3 * c1  # equals (double root - simple root)^2
        if not hessian.is_zero():
            x0 = (9 * c0 - c2 * c1) / (2 * hessian)
        else:
            x0 = -c2 / k.from_int(3)
    y0 = -(a1 * x0 + a3) * inv2
    if not (F(x0, y0).is_zero() and Fx(x0, y0).is_zero()):
        raise AssertionError("singular point formulas failed")
    return x0, y0


# -- coordinate changes over the local field ------------------------------------


def _translate(a: list[LocalElement], r=None, s=None, t=None) -> list[LocalElement]:
    """(x, y) -> (x + r, y + s x + t) on [a1, a2, a3, a4, a6]."""
    K = a[0].field
    zero = K.zero()
    r = zero if r is None else r
    s = zero if s is None else s
    t = zero if t is None else t
    a1, a2, a3, a4, a6 = a
    na1 = a1 + 2 * s
    na2 = a2 - s * a1 + 3 * r - s * s
    na3 = a3 + r * a1 + 2 * t
    na4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t
    na6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1
    return [na1, na2, na3, na4, na6]


def _rescale_by_pi(a: list[LocalElement]) -> list[LocalElement]:
    """u = pi scaling: a_i -> a_i / pi^i."""
    return [
        a[0].shift_pi(-1),
        a[1].shift_pi(-2),
        a[2].shift_pi(-3),
        a[3].shift_pi(-4),
        a[4].shift_pi(-6),
    ]


def _b_locals(a: list[LocalElement]):
    a1, a2, a3, a4, a6 = a
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def _delta_local(a: list[LocalElement]) -> LocalElement:
    b2, b4, b6, b8 = _b_locals(a)
    return (
        -(b2 * b2 * b8)
        - 8 * (b4 * b4 * b4)
        - 27 * (b6 * b6)
        + 9 * (b2 * b4 * b6)
    )


def _res_shift(x: LocalElement, k: int) -> FqElement:
    """Residue of x / pi^k."""
    return x.shift_pi(-k).residue()


# -- the algorithm ----------------------------------------------------------------


def tate_algorithm(model: WeierstrassModel, K: LocalField) -> LocalReductionData:
    """Kodaira type, Tamagawa number, minimal discriminant valuation, and
    (for good reduction) residue point count of a rational model over K.

    Retries with doubled working precision, at most three times, whenever a
    valuation query cannot be certified.
    """
    attempts = 4
    field = K
    for attempt in range(attempts):
        try:
            return _tate_run(model, field)
        except PrecisionError:
            if attempt == attempts - 1:
                raise
            field = make_local_field(
                field.ell,
                f=field.f,
                e=field.e,
                precision=2 * field.precision,
                cyclotomic=field.cyclotomic,
            )
    raise AssertionError("unreachable")


def _tate_run(model: WeierstrassModel, K: LocalField) -> LocalReductionData:
    if not model.is_rational():
        raise ValueError("tate_algorithm expects a model over Q")
    work = integral_model(model)
    inv = invariants(work)  # also rejects singular models
    k = K.residue_field
    q = k.order
    a = K.embed_model(work.coefficients())
    vj = vp(inv.j, K.ell)
    potentially_good = vj is PLUS_INFINITY or vj >= 0

    place = dict(ell=K.ell, e=K.e, f=K.f, q_v=q, model=model, precision_used=K.precision)

    for _round in range(_delta_local(a).valuation() // 12 + 2):
        n = _delta_local(a).valuation()
        if n == 0:
            return _good_data(a, K, place, potentially_good)

        # Step 2: move the singular point to the origin.
        abar = [x.residue() for x in a]
        x0, y0 = _singular_point(abar, k)
        a = _translate(a, r=K.from_residue(x0), t=K.from_residue(y0))
        for idx, least in ((2, 1), (3, 1), (4, 1)):
            if not a[idx].val_at_least(least):
                raise AssertionError("singular translation failed")

        b2, b4, b6, b8 = _b_locals(a)
        if not b2.val_at_least(1):
            # Type I_n, multiplicative.
            split = _tangent_splits(a[0].residue(), a[1].residue())
            c_v = n if split else (2 if n % 2 == 0 else 1)
            if not (vj is not PLUS_INFINITY and vj < 0 and K.e * (-vj) == n):
                raise AssertionError("multiplicative type contradicts v(j)")
            cls = MULT_SPLIT if split else MULT_NONSPLIT
            L = Fraction(q, q - 1) if split else Fraction(q, q + 1)
            return _finish(
                place,
                KodairaType("In", n),
                c_v,
                n,
                cls,
                potentially_good=False,
                N_v=None,
                L=L,
                reduced=None,
            )

        if not a[4].val_at_least(2):
            return _additive(place, KodairaType("II"), 1, n, potentially_good)
        if not b8.val_at_least(3):
            return _additive(place, KodairaType("III"), 2, n, potentially_good)
        if not b6.val_at_least(3):
            quad_roots = count_roots_in_field(
                Polynomial([-_res_shift(a[4], 2), _res_shift(a[2], 1), k.one()]), k
            )
            c_v = 3 if quad_roots else 1
            return _additive(place, KodairaType("IV"), c_v, n, potentially_good)

        a = _normalize_for_cubic(a, K)
        P_a = _res_shift(a[1], 1)
        P_b = _res_shift(a[3], 2)
        P_c = _res_shift(a[4], 3)
        shape, info = _cubic_analysis(P_a, P_b, P_c)

        if shape == "distinct":
            c_v = 1 + info
            return _additive(place, KodairaType("I0*", 0), c_v, n, potentially_good)

        if shape == "double":
            a = _translate(a, r=K.from_residue(info).shift_pi(1))
            return _star_loop(a, K, place, n, potentially_good)

        # triple root
        a = _translate(a, r=K.from_residue(info).shift_pi(1))
        for idx, least in ((1, 2), (3, 3), (4, 4)):
            if not a[idx].val_at_least(least):
                raise AssertionError("triple-root translation failed")
        distinct, roots, double = _quadratic_data(
            k.one(), _res_shift(a[2], 2), -_res_shift(a[4], 4)
        )
        if distinct:
            c_v = 3 if roots else 1
            return _additive(place, KodairaType("IV*"), c_v, n, potentially_good)
        a = _translate(a, t=K.from_residue(double).shift_pi(2))
        if not a[3].val_at_least(4):
            return _additive(place, KodairaType("III*"), 2, n, potentially_good)
        if not a[4].val_at_least(6):
            return _additive(place, KodairaType("II*"), 1, n, potentially_good)
        # Step 11: not minimal, rescale and restart.
        a = _rescale_by_pi(a)

    raise AssertionError("tate loop failed to terminate")


def _tangent_splits(a1bar: FqElement, a2bar: FqElement) -> bool:
    """Does T^2 + a1 T - a2 split over the residue field?

    Explicit root search in residue characteristic 2 and 3, Euler-criterion
    squareness of the discriminant otherwise.
    """
    k = a1bar.field
    if k.characteristic in (2, 3):
        poly = Polynomial([-a2bar, a1bar, k.one()])
        return count_roots_in_field(poly, k) > 0
    from .finite_fields import fq_is_square

    return fq_is_square(a1bar * a1bar + 4 * a2bar)


def _normalize_for_cubic(a: list[LocalElement], K: LocalField) -> list[LocalElement]:
    """Arrange pi | a1, a2; pi^2 | a3, a4; pi^3 | a6 (entry state of the
    step-6 cubic).  Divisions are by units except in residue characteristic
    2, where residue square roots replace them."""
    k = K.residue_field
    if K.ell != 2:
        inv2 = K.embed(Fraction(-1, 2))
        a = _translate(a, s=a[0] * inv2)
        a = _translate(a, t=a[2] * inv2)
    else:
        s = K.from_residue(k.sqrt(a[1].residue()))
        a = _translate(a, s=s)
        t = K.from_residue(k.sqrt(_res_shift(a[4], 2))).shift_pi(1)
        a = _translate(a, t=t)
    checks = ((0, 1), (1, 1), (2, 2), (3, 2), (4, 3))
    for idx, least in checks:
        if not a[idx].val_at_least(least):
            raise AssertionError("step-6 normalization failed")
    return a


def _star_loop(
    a: list[LocalElement], K: LocalField, place: dict, n_delta: int, potentially_good: bool
) -> LocalReductionData:
    """The I_n* subtype ladder (one double root in the step-6 cubic)."""
    k = K.residue_field
    if a[1].valuation() != 1:
        raise AssertionError("I_n* entry expects v(a2) = 1")
    for idx, least in ((3, 3), (4, 4)):
        if not a[idx].val_at_least(least):
            raise AssertionError("I_n* entry valuations missing")
    j = 1
    while j <= n_delta:
        if j % 2 == 1:
            m = (j + 3) // 2
            distinct, roots, double = _quadratic_data(
                k.one(), _res_shift(a[2], m), -_res_shift(a[4], 2 * m)
            )
            if distinct:
                c_v = 4 if roots else 2
                return _additive(
                    place, KodairaType("In*", j), c_v, n_delta, potentially_good
                )
            a = _translate(a, t=K.from_residue(double).shift_pi(m))
        else:
            m = j // 2 + 2
            distinct, roots, double = _quadratic_data(
                _res_shift(a[1], 1), _res_shift(a[3], m), _res_shift(a[4], 2 * m - 1)
            )
            if distinct:
                c_v = 4 if roots else 2
                return _additive(
                    place, KodairaType("In*", j), c_v, n_delta, potentially_good
                )
            a = _translate(a, r=K.from_residue(double).shift_pi(m - 1))
        j += 1
    raise AssertionError("I_n* ladder failed to terminate")


def _finish(place, kodaira, c_v, v_min_delta, cls, potentially_good, N_v, L, reduced):
    data = LocalReductionData(
        ell=place["ell"],
        e=place["e"],
        f=place["f"],
        kodaira=kodaira,
        c_v=c_v,
        v_min_delta=v_min_delta,
        q_v=place["q_v"],
        reduction_class=cls,
        potentially_good=potentially_good,
        N_v=N_v,
        L_at_1=L,
        model=place["model"],
        reduced_model=reduced,
        precision_used=place["precision_used"],
    )
    if data.potentially_good and data.c_v > 4:
        raise AssertionError("potentially good reduction forces c_v <= 4")
    return data


def _additive(place, kodaira, c_v, v_min_delta, potentially_good):
    return _finish(
        place,
        kodaira,
        c_v,
        v_min_delta,
        ADDITIVE,
        potentially_good,
        N_v=None,
        L=Fraction(1),
        reduced=None,
    )


def _good_data(a, K: LocalField, place, potentially_good) -> LocalReductionData:
    k = K.residue_field
    q = k.order
    reduced = WeierstrassModel(*(x.residue() for x in a))
    if q <= _DIRECT_COUNT_LIMIT:
        N = count_points(reduced)
    elif K.e == 1:
        # count over the prime field and extend along the unramified tower
        base = tate_algorithm(place["model"], local_field_for(place["model"], K.ell))
        if not base.is_good:
            raise AssertionError("unramified base change cannot create good reduction")
        N = extension_count(base.N_v, K.ell, K.f)
    else:
        raise ValueError(f"residue field size {q} exceeds enumeration cap {COUNT_CAP}")
    trace = q + 1 - N
    cls = GOOD_SUPERSINGULAR if trace % K.ell == 0 else GOOD_ORDINARY
    return _finish(
        place,
        KodairaType("I0"),
        1,
        0,
        cls,
        potentially_good=potentially_good,
        N_v=N,
        L=Fraction(q, N),
        reduced=reduced,
    )


# -- derived operations -------------------------------------------------------------


def classify_split(model: WeierstrassModel, K: LocalField) -> str:
    """MultSplit or MultNonsplit for a model with multiplicative reduction
    over K; raises ValueError at a non-multiplicative place."""
    data = tate_algorithm(model, K)
    if data.reduction_class not in (MULT_SPLIT, MULT_NONSPLIT):
        raise ValueError("classify_split called at a non-multiplicative place")
    return data.reduction_class


def euler_factor_at_one(data: LocalReductionData) -> Fraction:
    """L_v(E, 1): q/N for good reduction, q/(q-1) split multiplicative,
    q/(q+1) nonsplit multiplicative, 1 additive."""
    if data.reduction_class in (GOOD_ORDINARY, GOOD_SUPERSINGULAR):
        return Fraction(data.q_v, data.N_v)
    if data.reduction_class == MULT_SPLIT:
        return Fraction(data.q_v, data.q_v - 1)
    if data.reduction_class == MULT_NONSPLIT:
        return Fraction(data.q_v, data.q_v + 1)
    return Fraction(1)


def base_change_unramified(data: LocalReductionData, f: int) -> LocalReductionData:
    """Reduction data over the unramified extension of degree f, computed
    authoritatively by rerunning Tate's algorithm over the explicit field."""
    if data.e != 1 or data.f != 1:
        raise ValueError("base_change_unramified starts from data over Q_ell")
    K = local_field_for(data.model, data.ell, f=f, e=1)
    return tate_algorithm(data.model, K)


def base_change_rules(data: LocalReductionData, f: int) -> dict:
    """Textbook fast path for unramified base change, used as a cross-check:
    I_n stays I_n, nonsplit becomes split iff f is even, good reduction
    extends its count along the trace recurrence, potential good reduction
    is preserved.  Additive component groups are deliberately not ruled."""
    if data.e != 1 or data.f != 1:
        raise ValueError("base_change_rules starts from data over Q_ell")
    q = data.ell**f
    out = {"potentially_good": data.potentially_good, "q_v": q}
    if data.is_good:
        N = extension_count(data.N_v, data.ell, f)
        trace = q + 1 - N
        out.update(
            kodaira=data.kodaira,
            c_v=1,
            N_v=N,
            reduction_class=GOOD_SUPERSINGULAR if trace % data.ell == 0 else GOOD_ORDINARY,
            L_at_1=Fraction(q, N),
        )
    elif data.kodaira.is_multiplicative:
        n = data.kodaira.n
        split = data.reduction_class == MULT_SPLIT or f % 2 == 0
        out.update(
            kodaira=data.kodaira,
            c_v=n if split else (2 if n % 2 == 0 else 1),
            N_v=None,
            reduction_class=MULT_SPLIT if split else MULT_NONSPLIT,
            L_at_1=Fraction(q, q - 1) if split else Fraction(q, q + 1),
        )
    return out


def pot_supersingular(model: WeierstrassModel, p: int) -> bool:
    """Is the reduction at p potentially supersingular?

    Requires potential good reduction at p (v_p(j) >= 0); decided by
    counting any curve over F_{p^2} with the reduced j-invariant, since
    supersingularity only depends on j over the algebraic closure.
    """
    inv = invariants(model)
    vj = vp(inv.j, p)
    if vj is not PLUS_INFINITY and vj < 0:
        raise ValueError("potentially multiplicative place has no supersingular type")
    num, den = inv.j.numerator, inv.j.denominator
    jbar = num * pow(den, p - 2, p) % p
    if p <= 3:
        return jbar == 0  # the supersingular locus in characteristic 2 and 3
    field = fq_create(p, 2)
    N = count_points(model_with_j_invariant(field.from_int(jbar)))
    return N % p == 1
