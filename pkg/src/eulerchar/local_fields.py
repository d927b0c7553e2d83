"""Truncated exact arithmetic in finite extensions of Q_ell.

A field is W[pi]/(g(pi)) where W is the unramified extension of Z_ell with
residue field F_{ell^f} (modelled as Z_ell[u]/(m(u)) for the deterministic
lift m of the residue-field modulus) and g is Eisenstein of degree e:

  * e = 1: g(x) = x - ell,
  * tame e with gcd(e, ell) = 1: g(x) = x^e - ell,
  * the cyclotomic layer e = ell - 1: g(x) = ((1+x)^ell - 1)/x, so that
    pi corresponds to zeta_ell - 1 and the field is Q_ell(mu_ell).

Elements are stored as e coefficient vectors over W, each vector holding f
integers modulo ell^M, together with a power-of-pi shift and a precision
marker.  No operation ever reports digits beyond the marker; valuation
queries that cannot be certified raise PrecisionError (the
INDISTINGUISHABLE-FROM-ZERO signal), and callers retry at higher precision.

Key identity used throughout: pi^e = ell * U for the precomputed unit
U = -(g_0/ell + g_1/ell x + ... + g_{e-1}/ell x^(e-1)), which lets both
embeddings of Q and exact divisions by powers of pi avoid any inexact step.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, gcd

from .finite_fields import FqElement, FqField, fq_create
from .valuations import int_valuation, is_prime, vp

_BIG = 1 << 62  # stands in for +infinity in tensor-valuation bookkeeping


class PrecisionError(ArithmeticError):
    """All known digits vanish (or a query exceeds known precision)."""


class LocalField:
    """A finite extension of Q_ell with residue field F_{ell^f} and
    ramification index e, at working precision N pi-adic digits."""

    def __init__(self, ell: int, f: int, e: int, precision: int, cyclotomic: bool):
        self.ell = ell
        self.f = f
        self.e = e
        self.precision = precision
        self.cyclotomic = cyclotomic
        self.residue_field: FqField = fq_create(ell, f)
        # store M ell-adic digits per coefficient; slack absorbs carries
        self.M = max(-(-precision // e), 2) + 4
        self.modulus = ell**self.M
        self.tprec_max = e * self.M
        self._m_poly = self.residue_field.modulus  # lifted coefficientwise

        if e == 1:
            g = [-ell, 1]
        elif cyclotomic:
            if e != ell - 1:
                raise ValueError(
                    "cyclotomic ramification supports the first layer only "
                    f"(e = ell - 1); got e={e}, ell={ell}"
                )
            g = [comb(ell, k) for k in range(1, ell + 1)]
        else:
            if gcd(e, ell) != 1:
                raise ValueError(
                    f"wildly ramified non-cyclotomic extension rejected (e={e}, ell={ell})"
                )
            g = [-ell] + [0] * (e - 1) + [1]
        self.eisenstein = tuple(g)

        # x^e = -(g_0 + ... + g_{e-1} x^{e-1}), coefficients as W constants
        self._x_e = tuple(self._w_const(-g[i]) for i in range(e))
        # pi^e = ell * U with U a unit
        self._unit_u = tuple(self._w_const(-(g[i] // ell)) for i in range(e))
        self._monomials = [self._monomial_tensor(r) for r in range(e)]
        self._pi_tensor = self._monomials[1] if e > 1 else self._int_tensor(ell)
        self._pi_pow_cache: dict[int, tuple] = {}
        self._unit_u_inv = self._tensor_inv_unit(self._unit_u)

    # -- W (unramified) coefficient arithmetic --------------------------------

    def _w_const(self, n: int) -> tuple[int, ...]:
        return (n % self.modulus,) + (0,) * (self.f - 1)

    def _w_add(self, a, b):
        mod = self.modulus
        return tuple((x + y) % mod for x, y in zip(a, b))

    def _w_neg(self, a):
        mod = self.modulus
        return tuple(-x % mod for x in a)

    def _w_mul(self, a, b):
        f, mod = self.f, self.modulus
        if f == 1:
            return (a[0] * b[0] % mod,)
        prod = [0] * (2 * f - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] = (prod[i + j] + ai * bj) % mod
        m = self._m_poly
        for k in range(2 * f - 2, f - 1, -1):
            c = prod[k]
            if c:
                prod[k] = 0
                for j in range(f):
                    prod[k - f + j] = (prod[k - f + j] - c * m[j]) % mod
        return tuple(prod[:f])

    def _w_val(self, a) -> int:
        """ell-adic valuation of a W coefficient vector, _BIG when zero mod ell^M."""
        best = _BIG
        for c in a:
            if c:
                v = int_valuation(c, self.ell)
                if v < best:
                    best = v
        return best

    # -- tensor (full ring) arithmetic -----------------------------------------

    def _zero_tensor(self):
        zero_w = (0,) * self.f
        return (zero_w,) * self.e

    def _monomial_tensor(self, r: int):
        rows = [self._w_const(0) for _ in range(self.e)]
        rows[r] = self._w_const(1)
        return tuple(rows)

    def _int_tensor(self, n: int):
        return tuple([self._w_const(n)] + [self._w_const(0) for _ in range(self.e - 1)])

    def _tensor_from_fq(self, a: FqElement):
        rows = [tuple(c % self.modulus for c in a.coords)]
        rows += [self._w_const(0) for _ in range(self.e - 1)]
        return tuple(rows)

    def _tensor_add(self, A, B):
        return tuple(self._w_add(a, b) for a, b in zip(A, B))

    def _tensor_neg(self, A):
        return tuple(self._w_neg(a) for a in A)

    def _tensor_mul(self, A, B):
        e = self.e
        zero_w = (0,) * self.f
        rows = [zero_w] * (2 * e - 1)
        for i, ai in enumerate(A):
            if any(ai):
                for j, bj in enumerate(B):
                    if any(bj):
                        rows[i + j] = self._w_add(rows[i + j], self._w_mul(ai, bj))
        for k in range(2 * e - 2, e - 1, -1):
            c = rows[k]
            if any(c):
                rows[k] = zero_w
                for j in range(e):
                    if any(self._x_e[j]):
                        rows[k - e + j] = self._w_add(
                            rows[k - e + j], self._w_mul(c, self._x_e[j])
                        )
        return tuple(rows[:e])

    def _tensor_pow(self, A, n: int):
        result = self._monomial_tensor(0)
        base = A
        while n:
            if n & 1:
                result = self._tensor_mul(result, base)
            base = self._tensor_mul(base, base)
            n >>= 1
        return result

    def _tensor_val(self, A) -> int:
        """pi-adic valuation of a tensor; _BIG when zero mod ell^M."""
        best = _BIG
        for i, row in enumerate(A):
            wv = self._w_val(row)
            if wv != _BIG:
                v = self.e * wv + i
                if v < best:
                    best = v
        return best

    def _tensor_x_power(self, A, d: int):
        """Multiply a tensor by pi^d (d >= 0) inside the tensor."""
        if d == 0:
            return A
        cached = self._pi_pow_cache.get(d)
        if cached is None:
            cached = self._tensor_pow(self._pi_tensor, d)
            if len(self._pi_pow_cache) < 256:
                self._pi_pow_cache[d] = cached
        return self._tensor_mul(A, cached)

    def _tensor_scale_int(self, A, n: int):
        mod = self.modulus
        return tuple(tuple(c * n % mod for c in row) for row in A)

    def _tensor_sub_from_two(self, A):
        return self._tensor_add(self._int_tensor(2), self._tensor_neg(A))

    def _tensor_inv_unit(self, A):
        """Inverse of a unit tensor (valuation 0) by Newton iteration."""
        res = self._tensor_residue(A)
        if res.is_zero():
            raise PrecisionError("cannot invert an element with zero residue")
        y = self._tensor_from_fq(res.inverse())
        steps, digits = 1, 1
        while digits < self.tprec_max:
            digits *= 2
            steps += 1
        for _ in range(steps):
            y = self._tensor_mul(y, self._tensor_sub_from_two(self._tensor_mul(A, y)))
        return y

    def _tensor_scale_down(self, A, q: int):
        """Divide every integer entry by ell^q (entries must be divisible)."""
        d = self.ell**q
        rows = []
        for row in A:
            new = []
            for c in row:
                if c % d != 0:
                    raise PrecisionError("inexact division by a power of ell")
                new.append(c // d)
            rows.append(tuple(new))
        return tuple(rows)

    def _tensor_extract_unit(self, A, tv: int):
        """Tensor of A / pi^tv, given the certified tensor valuation tv."""
        q, r = divmod(tv, self.e)
        out = A
        if q:
            out = self._tensor_mul(out, self._tensor_pow(self._unit_u_inv, q))
            out = self._tensor_scale_down(out, q)
        if r:
            # divide by pi^r: multiply by pi^(e-r) / (ell * U)
            out = self._tensor_mul(out, self._tensor_pow(self._pi_tensor, self.e - r))
            out = self._tensor_mul(out, self._unit_u_inv)
            out = self._tensor_scale_down(out, 1)
        return out

    def _tensor_residue(self, A) -> FqElement:
        """Residue of a tensor of valuation 0 in F_{ell^f}."""
        return self.residue_field.from_coords([c % self.ell for c in A[0]])

    # -- element constructors ----------------------------------------------------

    def zero(self) -> "LocalElement":
        return LocalElement(self, self._zero_tensor(), 0, self.tprec_max)

    def one(self) -> "LocalElement":
        return LocalElement(self, self._monomial_tensor(0), 0, self.tprec_max)

    def pi(self) -> "LocalElement":
        return LocalElement(self, self._pi_tensor, 0, self.tprec_max)

    def from_residue(self, a: FqElement) -> "LocalElement":
        """The coefficientwise lift of a residue-field element."""
        if a.field is not self.residue_field:
            raise ValueError("residue element belongs to a different field")
        return LocalElement(self, self._tensor_from_fq(a), 0, self.tprec_max)

    def embed(self, x: Fraction | int) -> "LocalElement":
        """Embedding of Q, exact to working precision; val = e * v_ell(x)."""
        x = Fraction(x)
        if x == 0:
            return self.zero()
        k = vp(x, self.ell)
        unit = x / Fraction(self.ell) ** k
        tensor = self._int_tensor(unit.numerator % self.modulus)
        if unit.denominator != 1:
            den = self._int_tensor(unit.denominator % self.modulus)
            tensor = self._tensor_mul(tensor, self._tensor_inv_unit(den))
        if k > 0:
            # ell^k = pi^(e k) U^(-k)
            tensor = self._tensor_mul(tensor, self._tensor_pow(self._unit_u_inv, k))
        elif k < 0:
            tensor = self._tensor_mul(tensor, self._tensor_pow(self._unit_u, -k))
        return LocalElement(self, tensor, self.e * k, self.tprec_max)

    def embed_model(self, coeffs):
        return [self.embed(c) for c in coeffs]

    def __repr__(self):
        kind = "cyclotomic" if self.cyclotomic else ("unramified" if self.e == 1 else "tame")
        return f"LocalField(ell={self.ell}, f={self.f}, e={self.e}, N={self.precision}, {kind})"


class LocalElement:
    """value = pi^shift * tensor, certified modulo pi^(shift + tprec)."""

    __slots__ = ("field", "tensor", "shift", "tprec")

    def __init__(self, field: LocalField, tensor, shift: int, tprec: int):
        self.field = field
        self.tensor = tensor
        self.shift = shift
        self.tprec = min(tprec, field.tprec_max)

    @property
    def abs_prec(self) -> int:
        return self.shift + self.tprec

    def _vbar(self) -> int:
        """A certified lower bound for the tensor valuation."""
        return min(self.field._tensor_val(self.tensor), self.tprec)

    # -- ring operations -------------------------------------------------------

    def _align(self, other: "LocalElement"):
        F = self.field
        s = min(self.shift, other.shift)

        def lowered(x: "LocalElement"):
            d = x.shift - s
            if d == 0:
                return x.tensor, x.tprec
            return F._tensor_x_power(x.tensor, d), min(x.tprec + d, F.tprec_max)

        t1, p1 = lowered(self)
        t2, p2 = lowered(other)
        return s, t1, p1, t2, p2

    def __add__(self, other: "LocalElement") -> "LocalElement":
        F = self.field
        if isinstance(other, int):
            other = F.embed(other)
        if F is not other.field:
            raise ValueError("elements of different local fields")
        s, t1, p1, t2, p2 = self._align(other)
        return LocalElement(F, F._tensor_add(t1, t2), s, min(p1, p2))

    __radd__ = __add__

    def __neg__(self) -> "LocalElement":
        return LocalElement(self.field, self.field._tensor_neg(self.tensor), self.shift, self.tprec)

    def __sub__(self, other) -> "LocalElement":
        if isinstance(other, int):
            other = self.field.embed(other)
        return self + (-other)

    def __rsub__(self, other) -> "LocalElement":
        return (-self) + self.field.embed(other)

    def __mul__(self, other) -> "LocalElement":
        F = self.field
        if isinstance(other, int):
            if other == 0:
                return F.zero()
            extra = F.e * int_valuation(other, F.ell)
            return LocalElement(
                F,
                F._tensor_scale_int(self.tensor, other),
                self.shift,
                min(self.tprec + extra, F.tprec_max),
            )
        if F is not other.field:
            raise ValueError("elements of different local fields")
        v1, v2 = self._vbar(), other._vbar()
        tprec = min(self.tprec + v2, other.tprec + v1, F.tprec_max)
        return LocalElement(
            F, F._tensor_mul(self.tensor, other.tensor), self.shift + other.shift, tprec
        )

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LocalElement":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift_pi(self, k: int) -> "LocalElement":
        """Exact multiplication by pi^k (k of either sign)."""
        if k == 0:
            return self
        e = self.field.e
        q, r = divmod(k, e)  # floor division keeps r in [0, e)
        tensor = self.field._tensor_x_power(self.tensor, r) if r else self.tensor
        return LocalElement(
            self.field,
            tensor,
            self.shift + e * q,
            min(self.tprec + r, self.field.tprec_max),
        )

    def inverse(self) -> "LocalElement":
        F = self.field
        tv = F._tensor_val(self.tensor)
        if tv >= self.tprec:
            raise PrecisionError("cannot invert: indistinguishable from zero")
        unit = F._tensor_extract_unit(self.tensor, tv)
        q, r = divmod(tv, F.e)
        digits_used = q + (1 if r else 0)
        unit_tprec = min(self.tprec - tv, F.e * (F.M - digits_used))
        inv = F._tensor_inv_unit(unit)
        return LocalElement(F, inv, -(self.shift + tv), unit_tprec)

    def __truediv__(self, other) -> "LocalElement":
        if isinstance(other, int):
            other = self.field.embed(other)
        return self * other.inverse()

    # -- valuation and residue ---------------------------------------------------

    def valuation(self) -> int:
        """Certified pi-adic valuation; raises PrecisionError when all known
        digits vanish."""
        tv = self.field._tensor_val(self.tensor)
        if tv >= self.tprec:
            raise PrecisionError(
                f"valuation exceeds known precision ({self.abs_prec} pi-digits)"
            )
        return self.shift + tv

    def val_at_least(self, k: int) -> bool:
        """Certified test v(x) >= k.  Requires k <= known precision."""
        tv = self.field._tensor_val(self.tensor)
        if tv < self.tprec:
            return self.shift + tv >= k
        if k <= self.abs_prec:
            return True
        raise PrecisionError(f"cannot certify v(x) >= {k} at precision {self.abs_prec}")

    def is_zero_to_precision(self) -> bool:
        return self.field._tensor_val(self.tensor) >= self.tprec

    def unit_residue(self) -> FqElement:
        """Residue of x * pi^(-v(x))."""
        F = self.field
        tv = F._tensor_val(self.tensor)
        if tv >= self.tprec:
            raise PrecisionError("indistinguishable from zero")
        unit = F._tensor_extract_unit(self.tensor, tv)
        return F._tensor_residue(unit)

    def residue(self) -> FqElement:
        """Residue in F_{ell^f} of an integral element."""
        F = self.field
        if self.is_zero_to_precision():
            if self.abs_prec >= 1:
                return F.residue_field.zero()
            raise PrecisionError("residue unknown at this precision")
        v = self.valuation()
        if v < 0:
            raise ValueError("residue of a non-integral element")
        if v > 0:
            return F.residue_field.zero()
        return self.unit_residue()

    def expansion(self, count: int | None = None) -> list[FqElement]:
        """First pi-adic digits as residue-field representatives."""
        F = self.field
        if count is None:
            count = max(0, min(self.abs_prec, 12))
        out = []
        x = self
        for _ in range(count):
            if x.is_zero_to_precision() or x.valuation() > 0:
                out.append(F.residue_field.zero())
            else:
                if x.valuation() < 0:
                    raise ValueError("expansion of a non-integral element")
                d = x.unit_residue()
                out.append(d)
                x = x - F.from_residue(d)
            x = x.shift_pi(-1)
        return out

    def __repr__(self):
        try:
            v = self.valuation()
            return f"LocalElement(val={v}, prec={self.abs_prec})"
        except PrecisionError:
            return f"LocalElement(O(pi^{self.abs_prec}))"


def make_local_field(
    ell: int,
    f: int = 1,
    e: int = 1,
    precision: int | None = None,
    cyclotomic: bool = False,
) -> LocalField:
    """Deterministic local field object.

    For e > 1 either gcd(e, ell) = 1 (tame, defined by x^e - ell) or the
    cyclotomic flag selects the first layer Q_ell(mu_ell) with e = ell - 1.
    Wildly ramified non-cyclotomic requests are rejected.
    """
    if not is_prime(ell):
        raise ValueError(f"residue characteristic must be prime, got {ell}")
    if f < 1 or e < 1:
        raise ValueError("degrees must be >= 1")
    if precision is None:
        precision = 24 * e
    if precision < 2 * e:
        raise ValueError("precision too small to be useful")
    return LocalField(ell, f, e, precision, cyclotomic and e > 1)


def local_val_residue(x: LocalElement) -> tuple[int, FqElement]:
    """(pi-adic valuation, residue of x * pi^(-val)); exact for valuations
    below the element's precision, otherwise raises PrecisionError."""
    v = x.valuation()
    return v, x.unit_residue()
