"""Exact scalar arithmetic in cyclotomic extensions Q(zeta_m) of the rationals.

A scalar is a vector of phi(m) rationals, the coordinates of an element of
Q[x]/(Phi_m(x)) in the power basis 1, zeta, ..., zeta^(phi(m)-1).  m = 1
gives plain rationals.  All operations are exact; there is no floating
point anywhere in this package.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import PreconditionError


def _poly_divide_exact(num: list[int], den: list[int]) -> list[int]:
    # Exact division of integer polynomials, ascending coefficients, den monic.
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + dd]
        out[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    if any(num[:dd]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Integer coefficients of the m-th cyclotomic polynomial, ascending."""
    if m < 1:
        raise PreconditionError("cyclotomic index must be positive")
    if m == 1:
        return (-1, 1)
    poly = [-1] + [0] * (m - 1) + [1]  # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            poly = _poly_divide_exact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _reduction_rows(m: int) -> tuple[tuple[int, ...], ...]:
    # Row r = coordinates of zeta^(deg+r) in the power basis, r = 0..deg-2.
    phi = cyclotomic_polynomial(m)
    deg = len(phi) - 1
    rows: list[tuple[int, ...]] = []
    cur = [-c for c in phi[:deg]]  # zeta^deg, phi monic
    rows.append(tuple(cur))
    for _ in range(deg - 2):
        shifted = [0] + cur[:-1]
        lead = cur[-1]
        if lead:
            top = rows[0]
            shifted = [s + lead * t for s, t in zip(shifted, top)]
        cur = shifted
        rows.append(tuple(cur))
    return tuple(rows)


def _phi_degree(m: int) -> int:
    return len(cyclotomic_polynomial(m)) - 1


@dataclass(frozen=True)
class Scalar:
    """An exact element of Q(zeta_m)."""

    m: int
    coeffs: tuple[Fraction, ...]

    # -- constructors ------------------------------------------------------

    @staticmethod
    def rational(value, m: int = 1) -> "Scalar":
        fr = Fraction(value)
        deg = _phi_degree(m)
        return Scalar(m, (fr,) + (Fraction(0),) * (deg - 1))

    @staticmethod
    def zero(m: int = 1) -> "Scalar":
        return Scalar.rational(0, m)

    @staticmethod
    def one(m: int = 1) -> "Scalar":
        return Scalar.rational(1, m)

    @staticmethod
    def zeta(m: int) -> "Scalar":
        """The primitive m-th root of unity generating the field."""
        deg = _phi_degree(m)
        if deg == 1:
            # m = 1 or 2: zeta is rational (1 or -1).
            return Scalar.rational(1 if m == 1 else -1, m)
        coeffs = [Fraction(0)] * deg
        coeffs[1] = Fraction(1)
        return Scalar(m, tuple(coeffs))

    @staticmethod
    def root_of_unity(m: int, n: int, power: int = 1) -> "Scalar":
        """e^(2*pi*i/n) ** power inside Q(zeta_m); requires n | m."""
        if n < 1 or m % n:
            raise PreconditionError(
                f"cyclotomic index {m} is not a multiple of {n}")
        return Scalar.zeta(m) ** ((m // n) * (power % n))

    # -- helpers -----------------------------------------------------------

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.m != self.m:
                raise PreconditionError(
                    f"mixed cyclotomic field indices {self.m} and {other.m}")
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar.rational(other, self.m)
        return NotImplemented  # type: ignore[return-value]

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    @property
    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and not any(self.coeffs[1:])

    @property
    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise PreconditionError("scalar is not rational")
        return self.coeffs[0]

    def lift(self, m: int) -> "Scalar":
        """Embed into Q(zeta_m); only rational values may change field."""
        if m == self.m:
            return self
        if not self.is_rational:
            raise PreconditionError(
                "only rational scalars embed across field indices")
        return Scalar.rational(self.coeffs[0], m)

    def sort_key(self):
        return self.coeffs

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar(self.m, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.m, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar(self.m, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        deg = len(a)
        if deg == 1:
            return Scalar(self.m, (a[0] * b[0],))
        conv = [Fraction(0)] * (2 * deg - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        conv[i + j] += ai * bj
        rows = _reduction_rows(self.m)
        out = conv[:deg]
        for r, c in enumerate(conv[deg:]):
            if c:
                row = rows[r]
                for k in range(deg):
                    if row[k]:
                        out[k] += c * row[k]
        return Scalar(self.m, tuple(out))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero scalar")
        if self.is_rational:
            return Scalar.rational(1 / self.coeffs[0], self.m)
        # Extended Euclid in Q[x] against Phi_m.
        phi = [Fraction(c) for c in cyclotomic_polynomial(self.m)]
        a = list(self.coeffs)
        r0, r1 = phi, a
        s0, s1 = [Fraction(0)], [Fraction(1)]

        def trim(p):
            while p and not p[-1]:
                p.pop()
            return p

        r0, r1 = trim(r0), trim(r1)
        while len(r1) > 1:
            q, rem = _qdivmod(r0, r1)
            r0, r1 = r1, trim(rem)
            s0, s1 = s1, trim(_qsub(s0, _qmul(q, s1)))
            if not r1:
                raise ArithmeticError("non-invertible element")  # impossible: field
        c = r1[0]
        inv = [x / c for x in s1]
        deg = len(self.coeffs)
        inv = inv[:deg] + [Fraction(0)] * max(0, deg - len(inv))
        return Scalar(self.m, tuple(inv))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.is_zero:
            raise ZeroDivisionError("scalar division by zero")
        if o.is_rational:
            return Scalar(self.m, tuple(a / o.coeffs[0] for a in self.coeffs))
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __pow__(self, n: int) -> "Scalar":
        if n < 0:
            return self.inverse() ** (-n)
        result = Scalar.one(self.m)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self) -> bool:
        return not self.is_zero

    def __repr__(self) -> str:
        if self.is_rational:
            return str(self.coeffs[0])
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                power = "z" if i == 1 else f"z^{i}"
                parts.append(f"{c}*{power}" if c != 1 else power)
        return "(" + " + ".join(parts) + f")@{self.m}"


def _qdivmod(a: list[Fraction], b: list[Fraction]):
    a = list(a)
    db = len(b) - 1
    q = [Fraction(0)] * max(1, len(a) - db)
    while len(a) - 1 >= db and any(a):
        da = len(a) - 1
        if not a[-1]:
            a.pop()
            continue
        c = a[-1] / b[-1]
        q[da - db] = c
        for j in range(db + 1):
            a[da - db + j] -= c * b[j]
        a.pop()
    return q, a


def _qmul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] += ai * bj
    return out


def _qsub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


def rat(value, m: int = 1) -> Scalar:
    """Shorthand for Scalar.rational."""
    return Scalar.rational(value, m)
