"""Finite fields F_q with q = ell**f, built as F_ell[u]/(modulus).

The modulus is pinned deterministically: the first monic irreducible
polynomial of degree f in increasing integer encoding sum(c_i * ell**i),
so every run produces bit-identical field models.  For f = 1 the modulus
is u itself.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .valuations import is_prime


class FqElement:
    """Element of an FqField, stored as f coefficients in {0, ..., ell-1}."""

    __slots__ = ("field", "coords")

    def __init__(self, field: "FqField", coords: tuple[int, ...]):
        self.field = field
        self.coords = coords

    def _check(self, other: "FqElement"):
        if self.field is not other.field:
            raise ValueError("elements belong to different fields")

    def __add__(self, other):
        self._check(other)
        p = self.field.characteristic
        return FqElement(self.field, tuple((a + b) % p for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        p = self.field.characteristic
        return FqElement(self.field, tuple((a - b) % p for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        p = self.field.characteristic
        return FqElement(self.field, tuple(-a % p for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, int):
            p = self.field.characteristic
            return FqElement(self.field, tuple(a * other % p for a in self.coords))
        self._check(other)
        return FqElement(self.field, self.field._mul(self.coords, other.coords))

    __rmul__ = __mul__

    def __pow__(self, n: int):
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

    def inverse(self) -> "FqElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return self ** (self.field.order - 2)

    def __truediv__(self, other):
        return self * other.inverse()

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coords)

    def __eq__(self, other):
        return (
            isinstance(other, FqElement)
            and self.field is other.field
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return f"Fq({self.field.characteristic}^{self.field.degree}){list(self.coords)}"


class FqField:
    """Finite field with ell**f elements.

    Arithmetic is polynomial arithmetic modulo (modulus, ell); the modulus
    is verified irreducible at construction by trial division against every
    monic polynomial of degree <= f/2.
    """

    def __init__(self, ell: int, f: int, modulus: tuple[int, ...]):
        self.characteristic = ell
        self.degree = f
        self.order = ell**f
        self.modulus = modulus  # length f+1, monic, low-to-high degree
        self._square_set: frozenset | None = None

    # -- construction helpers -------------------------------------------------

    def zero(self) -> FqElement:
        return FqElement(self, (0,) * self.degree)

    def one(self) -> FqElement:
        return self.from_int(1)

    def from_int(self, n: int) -> FqElement:
        coords = [0] * self.degree
        coords[0] = n % self.characteristic
        return FqElement(self, tuple(coords))

    def from_coords(self, coords) -> FqElement:
        p = self.characteristic
        c = [x % p for x in coords]
        if len(c) > self.degree:
            raise ValueError("too many coordinates")
        c += [0] * (self.degree - len(c))
        return FqElement(self, tuple(c))

    def generator(self) -> FqElement:
        """The class of u (only meaningful for f > 1)."""
        coords = [0] * self.degree
        if self.degree > 1:
            coords[1] = 1
        else:
            coords[0] = 1
        return FqElement(self, tuple(coords))

    def elements(self):
        """Iterate over all q elements, in deterministic coordinate order."""
        p = self.characteristic
        for coords in itertools.product(range(p), repeat=self.degree):
            yield FqElement(self, coords)

    # -- core arithmetic -------------------------------------------------------

    def _mul(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        p, f = self.characteristic, self.degree
        if f == 1:
            return (a[0] * b[0] % p,)
        prod = [0] * (2 * f - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] = (prod[i + j] + ai * bj) % p
        # reduce modulo the monic modulus
        for k in range(2 * f - 2, f - 1, -1):
            c = prod[k]
            if c:
                prod[k] = 0
                for j in range(f):
                    prod[k - f + j] = (prod[k - f + j] - c * self.modulus[j]) % p
        return tuple(prod[:f])

    def absolute_trace(self, a: FqElement) -> int:
        """Trace down to the prime field, returned as an integer in [0, ell)."""
        acc = self.zero()
        x = a
        for _ in range(self.degree):
            acc = acc + x
            x = x**self.characteristic
        if any(c != 0 for c in acc.coords[1:]):
            raise AssertionError("trace left the prime field")
        return acc.coords[0]

    def sqrt(self, a: FqElement) -> FqElement | None:
        """A square root of a, or None if a is not a square.

        In characteristic 2 the Frobenius is bijective so the root always
        exists and equals a**(q/2).
        """
        if self.characteristic == 2:
            return a ** (self.order // 2)
        if a.is_zero():
            return self.zero()
        if not fq_is_square(a):
            return None
        # fields here are small; scanning is simple and deterministic
        for b in self.elements():
            if b * b == a:
                return b
        raise AssertionError("unreachable: square has a root")

    def char_root(self, a: FqElement) -> FqElement:
        """The unique ell-th root (inverse Frobenius), a**(q/ell)."""
        return a ** (self.order // self.characteristic)

    def squares(self) -> frozenset:
        if self._square_set is None:
            self._square_set = frozenset(b * b for b in self.elements())
        return self._square_set

    def __repr__(self):
        return f"FqField({self.characteristic}^{self.degree})"


def _poly_divmod_mod_p(num: list[int], den: list[int], p: int):
    """Quotient/remainder of dense integer polys over F_p; den is monic."""
    num = [c % p for c in num]
    dd = len(den) - 1
    q = [0] * max(1, len(num) - dd)
    for k in range(len(num) - 1 - dd, -1, -1):
        c = num[k + dd] % p
        if c:
            q[k] = c
            for j in range(dd + 1):
                num[k + j] = (num[k + j] - c * den[j]) % p
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return q, num


def _poly_gcd_mod_p(a: list[int], b: list[int], p: int) -> list[int]:
    """Monic gcd of dense integer polynomials over F_p."""

    def strip(x):
        x = [c % p for c in x]
        while len(x) > 1 and x[-1] == 0:
            x.pop()
        return x

    a, b = strip(a), strip(b)
    while b != [0]:
        lead_inv = pow(b[-1], p - 2, p)
        monic = [c * lead_inv % p for c in b]
        _, r = _poly_divmod_mod_p(a, monic, p)
        a, b = monic, strip(r)
    return a


def _poly_mulmod_mod_p(a, b, modulus, p):
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    _, rem = _poly_divmod_mod_p(prod, modulus, p)
    return rem


def _x_powmod_mod_p(exponent: int, modulus: list[int], p: int) -> list[int]:
    acc = [1]
    base = [0, 1]
    while exponent:
        if exponent & 1:
            acc = _poly_mulmod_mod_p(acc, base, modulus, p)
        base = _poly_mulmod_mod_p(base, base, modulus, p)
        exponent >>= 1
    return acc


def _is_irreducible_mod_p(poly: tuple[int, ...], p: int) -> bool:
    """Irreducibility over F_p: trial division for small degrees, the
    Rabin criterion (Frobenius fixed-point test) for larger ones."""
    f = len(poly) - 1
    if f == 1:
        return True
    if poly[0] == 0:  # divisible by u
        return False
    if f <= 8:
        for d in range(1, f // 2 + 1):
            for tail in itertools.product(range(p), repeat=d):
                den = list(tail) + [1]
                _, rem = _poly_divmod_mod_p(list(poly), den, p)
                if rem == [0]:
                    return False
        return True
    from .valuations import factorize

    modulus = list(poly)

    def frobenius_minus_x(k: int) -> list[int]:
        h = list(_x_powmod_mod_p(p**k, modulus, p))
        while len(h) < 2:
            h.append(0)
        h[1] = (h[1] - 1) % p
        while len(h) > 1 and h[-1] == 0:
            h.pop()
        return h

    for t, _ in factorize(f):
        if _poly_gcd_mod_p(modulus, frobenius_minus_x(f // t), p) != [1]:
            return False
    return frobenius_minus_x(f) == [0]


@lru_cache(maxsize=None)
def fq_create(ell: int, f: int) -> FqField:
    """The finite field with ell**f elements, with deterministic modulus.

    The modulus is the first monic irreducible of degree f when monic
    polynomials are enumerated by increasing integer encoding
    sum(c_i * ell**i) of their non-leading coefficients.
    Raises ValueError for composite ell or f < 1.
    """
    if not is_prime(ell):
        raise ValueError(f"characteristic must be prime, got {ell}")
    if f < 1:
        raise ValueError(f"degree must be >= 1, got {f}")
    if f == 1:
        return FqField(ell, 1, (0, 1))  # modulus u
    for code in range(ell**f):
        coeffs = []
        c = code
        for _ in range(f):
            coeffs.append(c % ell)
            c //= ell
        candidate = tuple(coeffs) + (1,)
        if _is_irreducible_mod_p(candidate, ell):
            return FqField(ell, f, candidate)
    raise AssertionError("unreachable: irreducibles of every degree exist")


def fq_is_square(a: FqElement) -> bool:
    """True when a is a square in its field.

    Zero counts as a square.  For odd characteristic this is the Euler
    criterion a**((q-1)/2) == 1; in characteristic 2 every element is a
    square (explicit root via Frobenius).
    """
    if a.is_zero():
        return True
    field = a.field
    if field.characteristic == 2:
        r = field.sqrt(a)
        return r * r == a
    return a ** ((field.order - 1) // 2) == field.one()
