"""Exact polynomials: multivariate in the times t1..tM, univariate in z.

Poly is the untruncated polynomial ring over Scalar used for closed-form
data (kernel functions, tau polynomials).  ZPoly is the univariate ring in
the spectral variable z housing the polynomials f, g, h.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import PreconditionError
from .scalars import Scalar


def _merge(terms: dict, key, value: Scalar):
    cur = terms.get(key)
    new = value if cur is None else cur + value
    if new.is_zero:
        terms.pop(key, None)
    else:
        terms[key] = new


@dataclass(frozen=True)
class Poly:
    """Multivariate polynomial over Q(zeta_m); variable i stands for t_(i+1)."""

    nvars: int
    m: int
    terms: tuple  # sorted tuple of (exponent tuple, Scalar)

    @staticmethod
    def make(nvars: int, m: int, terms: dict) -> "Poly":
        items = tuple(sorted((e, c) for e, c in terms.items() if not c.is_zero))
        return Poly(nvars, m, items)

    @staticmethod
    def zero(nvars: int, m: int = 1) -> "Poly":
        return Poly(nvars, m, ())

    @staticmethod
    def const(value: Scalar, nvars: int) -> "Poly":
        if value.is_zero:
            return Poly.zero(nvars, value.m)
        return Poly(nvars, value.m, (((0,) * nvars, value),))

    @staticmethod
    def variable(i: int, nvars: int, m: int = 1) -> "Poly":
        e = tuple(1 if j == i else 0 for j in range(nvars))
        return Poly(nvars, m, ((e, Scalar.one(m)),))

    def _check(self, other: "Poly"):
        if self.nvars != other.nvars or self.m != other.m:
            raise PreconditionError("mismatched polynomial rings")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> Scalar:
        zero_e = (0,) * self.nvars
        for e, c in self.terms:
            if e == zero_e:
                return c
        return Scalar.zero(self.m)

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        d = dict(self.terms)
        for e, c in other.terms:
            _merge(d, e, c)
        return Poly.make(self.nvars, self.m, d)

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, self.m, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        d: dict = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                _merge(d, e, c1 * c2)
        return Poly.make(self.nvars, self.m, d)

    def scale(self, c: Scalar) -> "Poly":
        if c.is_zero:
            return Poly.zero(self.nvars, self.m)
        return Poly(self.nvars, self.m, tuple((e, k * c) for e, k in self.terms))

    def __pow__(self, n: int) -> "Poly":
        result = Poly.const(Scalar.one(self.m), self.nvars)
        for _ in range(n):
            result = result * self
        return result

    def diff(self, var: int) -> "Poly":
        d: dict = {}
        for e, c in self.terms:
            if e[var]:
                e2 = tuple(x - 1 if i == var else x for i, x in enumerate(e))
                _merge(d, e2, c * e[var])
        return Poly.make(self.nvars, self.m, d)

    def restrict_to_first(self) -> "Poly":
        """Set t2 = t3 = ... = 0, keeping only the x = t1 dependence."""
        d: dict = {}
        for e, c in self.terms:
            if not any(e[1:]):
                _merge(d, e, c)
        return Poly.make(self.nvars, self.m, d)

    def translate_first(self, a: Scalar) -> "Poly":
        """Substitute t1 -> t1 + a, exactly."""
        if a.is_zero:
            return self
        d: dict = {}
        for e, c in self.terms:
            k = e[0]
            for j in range(k + 1):
                e2 = (j,) + e[1:]
                _merge(d, e2, c * (Scalar.rational(comb(k, j), self.m) * a ** (k - j)))
        return Poly.make(self.nvars, self.m, d)

    def eval_first(self, x0: Scalar) -> Scalar:
        """Value at t1 = x0, t2 = ... = 0."""
        acc = Scalar.zero(self.m)
        for e, c in self.terms:
            if any(e[1:]):
                continue
            acc = acc + c * x0 ** e[0]
        return acc

    def weighted_degree(self) -> int:
        """Max of sum (i+1)*e_i over terms; 0 for the zero polynomial."""
        best = 0
        for e, _ in self.terms:
            best = max(best, sum((i + 1) * x for i, x in enumerate(e)))
        return best

    def uses_only_first(self) -> bool:
        return all(not any(e[1:]) for e, _ in self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            mono = "*".join(f"t{i+1}^{x}" if x > 1 else f"t{i+1}"
                            for i, x in enumerate(e) if x)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)


@dataclass(frozen=True)
class ZPoly:
    """Univariate polynomial in z over Q(zeta_m)."""

    m: int
    coeffs: tuple  # sorted tuple of (degree, Scalar), degrees >= 0

    @staticmethod
    def make(m: int, coeffs: dict) -> "ZPoly":
        items = tuple(sorted((d, c) for d, c in coeffs.items() if not c.is_zero))
        if any(d < 0 for d, _ in items):
            raise PreconditionError("negative degree in polynomial")
        return ZPoly(m, items)

    @staticmethod
    def zero(m: int = 1) -> "ZPoly":
        return ZPoly(m, ())

    @staticmethod
    def const(value: Scalar) -> "ZPoly":
        return ZPoly.make(value.m, {0: value})

    @staticmethod
    def one(m: int = 1) -> "ZPoly":
        return ZPoly.const(Scalar.one(m))

    @staticmethod
    def z_power(n: int, m: int = 1) -> "ZPoly":
        return ZPoly.make(m, {n: Scalar.one(m)})

    @staticmethod
    def from_scalars(coeffs: list[Scalar]) -> "ZPoly":
        """Ascending coefficient list."""
        if not coeffs:
            raise PreconditionError("empty coefficient list")
        return ZPoly.make(coeffs[0].m, {i: c for i, c in enumerate(coeffs)})

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        if not self.coeffs:
            raise PreconditionError("degree of the zero polynomial")
        return self.coeffs[-1][0]

    @property
    def leading(self) -> Scalar:
        return self.coeffs[-1][1]

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.leading.is_one

    def coeff(self, d: int) -> Scalar:
        for dd, c in self.coeffs:
            if dd == d:
                return c
        return Scalar.zero(self.m)

    def __add__(self, other: "ZPoly") -> "ZPoly":
        d = dict(self.coeffs)
        for deg, c in other.coeffs:
            _merge(d, deg, c)
        return ZPoly.make(self.m, d)

    def __neg__(self) -> "ZPoly":
        return ZPoly(self.m, tuple((d, -c) for d, c in self.coeffs))

    def __sub__(self, other: "ZPoly") -> "ZPoly":
        return self + (-other)

    def __mul__(self, other: "ZPoly") -> "ZPoly":
        d: dict = {}
        for d1, c1 in self.coeffs:
            for d2, c2 in other.coeffs:
                _merge(d, d1 + d2, c1 * c2)
        return ZPoly.make(self.m, d)

    def scale(self, c: Scalar) -> "ZPoly":
        if c.is_zero:
            return ZPoly.zero(self.m)
        return ZPoly(self.m, tuple((d, k * c) for d, k in self.coeffs))

    def __pow__(self, n: int) -> "ZPoly":
        out = ZPoly.one(self.m)
        for _ in range(n):
            out = out * self
        return out

    def divmod(self, other: "ZPoly") -> tuple["ZPoly", "ZPoly"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = dict(self.coeffs)
        q: dict = {}
        dd, lead = other.degree, other.leading
        while rem:
            da = max(rem)
            if da < dd:
                break
            c = rem[da] / lead
            q[da - dd] = c
            for d2, c2 in other.coeffs:
                _merge(rem, da - dd + d2, -(c * c2))
        return ZPoly.make(self.m, q), ZPoly.make(self.m, rem)

    def divides(self, other: "ZPoly") -> bool:
        return other.divmod(self)[1].is_zero

    def compose_z_power(self, n: int) -> "ZPoly":
        """Substitute z -> z^n."""
        return ZPoly(self.m, tuple((d * n, c) for d, c in self.coeffs))

    def eval(self, x: Scalar) -> Scalar:
        acc = Scalar.zero(self.m)
        for d, c in self.coeffs:
            acc = acc + c * x ** d
        return acc

    def derivative(self) -> "ZPoly":
        d: dict = {}
        for deg, c in self.coeffs:
            if deg:
                _merge(d, deg - 1, c * deg)
        return ZPoly.make(self.m, d)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for d, c in reversed(self.coeffs):
            if d == 0:
                parts.append(f"{c}")
            else:
                zp = "z" if d == 1 else f"z^{d}"
                parts.append(zp if c.is_one else f"{c}*{zp}")
        return " + ".join(parts)
