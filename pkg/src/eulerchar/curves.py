"""Weierstrass models: invariants, point arithmetic, point counting over
finite fields, division polynomials, and p-primary torsion bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt, lcm

from .cyclotomic import splitting
from .finite_fields import FqElement, FqField, fq_create
from .polynomials import Polynomial
from .valuations import (
    int_valuation,
    is_prime,
    primes_from,
    rational_sqrt,
    vp,
)

COUNT_CAP = 10**7  # largest field size accepted by direct enumeration


class SingularModelError(ValueError):
    """Raised when a model has vanishing discriminant."""


@dataclass(frozen=True)
class WeierstrassModel:
    """y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6.

    Coefficients are Fractions for curves over Q, or FqElements for
    reductions over a finite field.
    """

    a1: object
    a2: object
    a3: object
    a4: object
    a6: object

    @classmethod
    def from_rationals(cls, coeffs) -> "WeierstrassModel":
        a1, a2, a3, a4, a6 = (Fraction(c) for c in coeffs)
        return cls(a1, a2, a3, a4, a6)

    def coefficients(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def is_rational(self) -> bool:
        return isinstance(self.a1, Fraction)

    def rhs(self, x):
        return ((x + self.a2) * x + self.a4) * x + self.a6

    def y_line(self, x):
        return self.a1 * x + self.a3


def b_invariants(model: WeierstrassModel):
    """(b2, b4, b6, b8) over the model's coefficient domain."""
    a1, a2, a3, a4, a6 = model.coefficients()
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def discriminant(model: WeierstrassModel):
    b2, b4, b6, b8 = b_invariants(model)
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


@dataclass(frozen=True)
class CurveInvariants:
    b2: Fraction
    b4: Fraction
    b6: Fraction
    b8: Fraction
    c4: Fraction
    c6: Fraction
    disc: Fraction
    j: Fraction


def invariants(model: WeierstrassModel) -> CurveInvariants:
    """All standard invariants of a nonsingular rational model.

    Raises SingularModelError when the discriminant vanishes.
    """
    b2, b4, b6, b8 = b_invariants(model)
    c4 = b2 * b2 - 24 * b4
    c6 = -b2**3 + 36 * b2 * b4 - 216 * b6
    disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    if disc == 0:
        raise SingularModelError("discriminant is zero")
    return CurveInvariants(b2, b4, b6, b8, c4, c6, disc, c4**3 / disc)


def transform(model: WeierstrassModel, u, r, s, t) -> WeierstrassModel:
    """Coordinate change x = u^2 x' + r, y = u^3 y' + u^2 s x' + t."""
    a1, a2, a3, a4, a6 = model.coefficients()
    u2 = u * u
    u3 = u2 * u
    na1 = (a1 + 2 * s) / u
    na2 = (a2 - s * a1 + 3 * r - s * s) / u2
    na3 = (a3 + r * a1 + 2 * t) / u3
    na4 = (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / (u2 * u2)
    na6 = (a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1) / (u3 * u3)
    return WeierstrassModel(na1, na2, na3, na4, na6)


def integral_model(model: WeierstrassModel) -> WeierstrassModel:
    """Scale a rational model to integral a-invariants (u = 1/d scaling)."""
    d = lcm(*[c.denominator for c in model.coefficients()])
    if d == 1:
        return model
    return transform(model, Fraction(1, d), 0, 0, 0)


def reduce_model(model: WeierstrassModel, field: FqField) -> WeierstrassModel:
    """Reduce an integral rational model modulo the field characteristic."""
    p = field.characteristic

    def red(c: Fraction) -> FqElement:
        if c.denominator % p == 0:
            raise ValueError(f"coefficient {c} is not integral at {p}")
        return field.from_int(c.numerator) * field.from_int(c.denominator).inverse()

    return WeierstrassModel(*(red(c) for c in model.coefficients()))


# -- points ---------------------------------------------------------------------


@dataclass(frozen=True)
class CurvePoint:
    """Affine point (x, y) or the point at infinity (x = y = None)."""

    x: object = None
    y: object = None

    @classmethod
    def infinity(cls) -> "CurvePoint":
        return cls(None, None)

    @property
    def is_infinity(self) -> bool:
        return self.x is None


def is_on_curve(model: WeierstrassModel, point: CurvePoint) -> bool:
    if point.is_infinity:
        return True
    x, y = point.x, point.y
    return y * y + model.y_line(x) * y == model.rhs(x)


def negate_point(model: WeierstrassModel, point: CurvePoint) -> CurvePoint:
    if point.is_infinity:
        return point
    return CurvePoint(point.x, -point.y - model.y_line(point.x))


def add_points(model: WeierstrassModel, p1: CurvePoint, p2: CurvePoint) -> CurvePoint:
    """Chord-tangent addition; exact over Q and over finite fields."""
    if p1.is_infinity:
        return p2
    if p2.is_infinity:
        return p1
    a1, a2, a3, a4, a6 = model.coefficients()
    x1, y1, x2, y2 = p1.x, p1.y, p2.x, p2.y
    if x1 == x2:
        if y2 == -y1 - a1 * x1 - a3:
            return CurvePoint.infinity()
        denom = 2 * y1 + a1 * x1 + a3
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / denom
        nu = (-(x1**3) + a4 * x1 + 2 * a6 - a3 * y1) / denom
    else:
        lam = (y2 - y1) / (x2 - x1)
        nu = y1 - lam * x1
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return CurvePoint(x3, y3)


def scalar_mul(model: WeierstrassModel, n: int, point: CurvePoint) -> CurvePoint:
    if n < 0:
        return scalar_mul(model, -n, negate_point(model, point))
    acc = CurvePoint.infinity()
    base = point
    while n:
        if n & 1:
            acc = add_points(model, acc, base)
        base = add_points(model, base, base)
        n >>= 1
    return acc


def point_order(model: WeierstrassModel, point: CurvePoint, bound: int) -> int | None:
    """Smallest n <= bound with n*P = infinity, or None if there is none.

    Raises ValueError when the point does not satisfy the curve equation.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if not is_on_curve(model, point):
        raise ValueError("point is not on the curve")
    acc = point
    for n in range(1, bound + 1):
        if acc.is_infinity:
            return n
        acc = add_points(model, acc, point)
    return None


# -- point counting --------------------------------------------------------------


def count_points(model: WeierstrassModel) -> int:
    """#E(F_q) including infinity, by enumerating x-fibers.

    Odd characteristic resolves each fiber by completing the square in y;
    characteristic 2 solves the Artin-Schreier fiber z^2 + z = w via the
    absolute trace.  Requires q <= COUNT_CAP and a nonsingular model.
    """
    field = model.a1.field
    q = field.order
    if q > COUNT_CAP:
        raise ValueError(f"field size {q} exceeds enumeration cap {COUNT_CAP}")
    if discriminant(model).is_zero():
        raise SingularModelError("cannot count points on a singular model")
    if field.characteristic == 2:
        return _count_char2(model, field)
    if field.degree == 1:
        return _count_prime_field(model, field)
    return _count_generic_odd(model, field)


def _count_char2(model: WeierstrassModel, field: FqField) -> int:
    count = 1
    for x in field.elements():
        b = model.y_line(x)
        c = model.rhs(x)
        if b.is_zero():
            count += 1  # unique square root in characteristic 2
        else:
            w = c / (b * b)
            if field.absolute_trace(w) == 0:
                count += 2
    return count


def _count_prime_field(model: WeierstrassModel, field: FqField) -> int:
    p = field.order
    a1, a2, a3, a4, a6 = (c.coords[0] for c in model.coefficients())
    inv4 = pow(4, p - 2, p)
    use_table = p <= 300_000
    square_table = None
    if use_table:
        square_table = bytearray(p)
        for b in range(p):
            square_table[b * b % p] = 1
    count = 1
    for x in range(p):
        h = (a1 * x + a3) % p
        g = (((x + a2) * x + a4) * x + a6) % p
        d = (g + h * h * inv4) % p
        if d == 0:
            count += 1
        elif use_table:
            count += 2 * square_table[d]
        elif pow(d, (p - 1) // 2, p) == 1:
            count += 2
    return count


def _count_generic_odd(model: WeierstrassModel, field: FqField) -> int:
    squares = field.squares()
    inv4 = field.from_int(4).inverse()
    count = 1
    for x in field.elements():
        h = model.y_line(x)
        d = model.rhs(x) + h * h * inv4
        if d.is_zero():
            count += 1
        elif d in squares:
            count += 2
    return count


def extension_count(n1: int, q: int, k: int) -> int:
    """#E(F_{q^k}) from #E(F_q), via the Frobenius trace recurrence.

    With a = q + 1 - n1 the traces satisfy a_j = a*a_{j-1} - q*a_{j-2},
    a_0 = 2, a_1 = a, and the count over F_{q^k} is q^k + 1 - a_k.
    Rejects n1 outside the Hasse window.
    """
    if k < 1:
        raise ValueError("extension degree must be >= 1")
    a = q + 1 - n1
    if a * a > 4 * q:
        raise ValueError(f"count {n1} violates the Hasse bound for q={q}")
    prev, cur = 2, a
    for _ in range(k - 1):
        prev, cur = cur, a * cur - q * prev
    return q**k + 1 - cur


def hasse_window(q: int) -> tuple[int, int]:
    root = isqrt(4 * q)
    return q + 1 - root, q + 1 + root


# -- division polynomials ---------------------------------------------------------


@lru_cache(maxsize=None)
def _quadratic_term(model: WeierstrassModel) -> Polynomial:
    """B(x) = psi_2^2 = 4x^3 + b2 x^2 + 2 b4 x + b6."""
    b2, b4, b6, _ = b_invariants(model)
    return Polynomial([b6, 2 * b4, b2, Fraction(4)])


@lru_cache(maxsize=None)
def _g_poly(model: WeierstrassModel, n: int) -> Polynomial:
    """psi_n as a polynomial in x alone; even indices carry psi_n / psi_2."""
    b2, b4, b6, b8 = b_invariants(model)
    if n == 0:
        return Polynomial([Fraction(0)])
    if n in (1, 2):
        return Polynomial([Fraction(1)])
    if n == 3:
        return Polynomial([b8, 3 * b6, 3 * b4, b2, Fraction(3)])
    if n == 4:
        return Polynomial(
            [
                b4 * b8 - b6 * b6,
                b2 * b8 - b4 * b6,
                10 * b8,
                10 * b6,
                5 * b4,
                b2,
                Fraction(2),
            ]
        )
    B = _quadratic_term(model)
    if n % 2 == 1:
        m = (n - 1) // 2
        lhs = _g_poly(model, m + 2) * _g_poly(model, m) ** 3
        rhs = _g_poly(model, m - 1) * _g_poly(model, m + 1) ** 3
        if m % 2 == 0:
            return lhs * (B * B) - rhs
        return lhs - rhs * (B * B)
    m = n // 2
    return _g_poly(model, m) * (
        _g_poly(model, m + 2) * _g_poly(model, m - 1) ** 2
        - _g_poly(model, m - 2) * _g_poly(model, m + 1) ** 2
    )


def division_polynomial(model: WeierstrassModel, n: int) -> Polynomial:
    """psi_n in x for odd n >= 1; degree (n^2 - 1)/2.

    Even indices are not exposed (they carry a factor linear in y).
    """
    if n < 1 or n % 2 == 0:
        raise ValueError("division_polynomial is defined here for odd n >= 1")
    return _g_poly(model, n)


# -- torsion ----------------------------------------------------------------------


def lift_x_to_points(model: WeierstrassModel, x0: Fraction) -> list[CurvePoint]:
    """Rational points on the model with the given x-coordinate."""
    h = model.y_line(x0)
    disc = h * h + 4 * model.rhs(x0)
    root = rational_sqrt(disc)
    if root is None:
        return []
    ys = {(-h + root) / 2, (-h - root) / 2}
    return [CurvePoint(x0, y) for y in sorted(ys)]


def rational_p_torsion_order(model: WeierstrassModel, p: int) -> int:
    """Exact order of the p-primary torsion of E(Q) for a prime p >= 5.

    Rational roots of psi_p are lifted to candidate points and their order
    verified by repeated addition.  Over Q and for p >= 5 the group is
    trivial or cyclic of order p.
    """
    if p < 5 or not is_prime(p):
        raise ValueError("p must be a prime >= 5")
    from .polynomials import rational_roots

    psi = division_polynomial(model, p)
    for x0 in rational_roots(psi):
        for point in lift_x_to_points(model, x0):
            if point_order(model, point, p) == p:
                return p
    return 1


@dataclass(frozen=True)
class TorsionEstimate:
    """Certified bracket lower | #E(F)(p) | upper, both powers of p."""

    p: int
    lower: int
    upper: int
    exact: bool

    @property
    def order(self) -> int:
        if not self.exact:
            raise ValueError("torsion order is not exact")
        return self.lower


def torsion_bound_over_F(
    model: WeierstrassModel,
    p: int,
    m: int,
    samples: int = 20,
    lower_certificate: int | None = None,
) -> TorsionEstimate:
    """Bracket the p-primary torsion of E over Q(mu_m).

    Upper bound: torsion prime to the residue characteristic injects into
    the reduction at good places, so gcd over >= `samples` good rational
    primes ell (ell not dividing p*disc) of the p-part of #E(k_w), with
    k_w = F_{ell^f} read off the splitting of ell in Q(mu_m).  Lower bound:
    the rational p-torsion order, raised by an optional user certificate.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    model = integral_model(model)
    disc = discriminant(model)
    upper_exp = None
    used = 0
    for ell in primes_from(2):
        if ell > 10_000:
            raise RuntimeError(f"could not find {samples} usable primes below 10000")
        if ell == p or vp(disc, ell) != 0:
            continue
        f = splitting(ell, m).f
        n1 = count_points(reduce_model(model, fq_create(ell, 1)))
        nf = extension_count(n1, ell, f)
        e = int_valuation(nf, p)
        upper_exp = e if upper_exp is None else min(upper_exp, e)
        used += 1
        if upper_exp == 0 or used >= samples:
            break  # the gcd is monotone; zero exponent cannot recover
    upper = p**upper_exp
    lower = rational_p_torsion_order(model, p)
    if lower_certificate is not None:
        if lower_certificate < 1 or p ** int_valuation(lower_certificate, p) != lower_certificate:
            raise ValueError("torsion certificate must be a power of p")
        lower = max(lower, lower_certificate)
    if upper % lower != 0:
        raise ValueError(
            f"torsion certificate {lower} contradicts the reduction bound {upper}"
        )
    return TorsionEstimate(p=p, lower=lower, upper=upper, exact=lower == upper)


def model_with_j_invariant(jbar: FqElement) -> WeierstrassModel:
    """Some model over the field of jbar with that j-invariant (char >= 5)."""
    field = jbar.field
    if field.characteristic < 5:
        raise ValueError("construction requires characteristic >= 5")
    if jbar.is_zero():
        return WeierstrassModel(
            field.zero(), field.zero(), field.zero(), field.zero(), field.one()
        )
    if jbar == field.from_int(1728):
        return WeierstrassModel(
            field.zero(), field.zero(), field.zero(), field.one(), field.zero()
        )
    c = (jbar - field.from_int(1728)).inverse()
    return WeierstrassModel(
        field.one(), field.zero(), field.zero(), field.from_int(-36) * c, -c
    )
