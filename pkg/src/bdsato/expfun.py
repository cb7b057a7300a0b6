"""Exponential polynomials, point-supported conditions, and kernel bases.

Two exact function classes share the machinery:

* ExpPoly: finite sums of e^(mu*x) * p(x), the closed forms of kernel
  functions and operator coefficient data in the space variable x.
* TFunction: their deformations along all times, sums of
  e^(sum_k t_k s_k) * p(t) indexed by frequency multisets {mu_1, mu_2, ...}
  with s_k = sum_i mu_i^k.  Products merge multisets, which keeps the class
  a ring; restricting t2 = t3 = ... = 0 collapses a multiset to its sum and
  recovers an ExpPoly.

Conditions are finite linear combinations of evaluations d_z^j at points
lambda_i; applied to a wave function they produce the kernel functions of
the transformation, both as closed forms in x and as deformations in t.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionError
from .linalg import det_ring
from .polynomials import Poly, ZPoly
from .scalars import Scalar
from .series import LaurentTail, TruncOrders, TruncatedSeries


def _merge_term(terms: dict, key, poly: Poly):
    cur = terms.get(key)
    new = poly if cur is None else cur + poly
    if new.is_zero:
        terms.pop(key, None)
    else:
        terms[key] = new


@dataclass(frozen=True, eq=False)
class ExpPoly:
    """Finite sum of e^(mu*x) * p(x) with mu and coefficients in Q(zeta_m)."""

    nvars: int
    m: int
    terms: dict  # Scalar frequency -> Poly (x = t1 only by convention)

    @staticmethod
    def make(nvars: int, m: int, terms: dict) -> "ExpPoly":
        return ExpPoly(nvars, m, {f: p for f, p in terms.items() if not p.is_zero})

    @staticmethod
    def zero(nvars: int, m: int = 1) -> "ExpPoly":
        return ExpPoly(nvars, m, {})

    @staticmethod
    def const(value: Scalar, nvars: int) -> "ExpPoly":
        return ExpPoly.make(nvars, value.m,
                            {Scalar.zero(value.m): Poly.const(value, nvars)})

    @staticmethod
    def one(nvars: int, m: int = 1) -> "ExpPoly":
        return ExpPoly.const(Scalar.one(m), nvars)

    @staticmethod
    def exponential(mu: Scalar, nvars: int) -> "ExpPoly":
        return ExpPoly(nvars, mu.m, {mu: Poly.const(Scalar.one(mu.m), nvars)})

    @staticmethod
    def from_poly(p: Poly) -> "ExpPoly":
        return ExpPoly.make(p.nvars, p.m, {Scalar.zero(p.m): p})

    def _check(self, other: "ExpPoly"):
        if self.nvars != other.nvars or self.m != other.m:
            raise PreconditionError("mismatched exponential-polynomial rings")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        self._check(other)
        d = dict(self.terms)
        for f, p in other.terms.items():
            _merge_term(d, f, p)
        return ExpPoly(self.nvars, self.m, d)

    def __neg__(self) -> "ExpPoly":
        return ExpPoly(self.nvars, self.m, {f: -p for f, p in self.terms.items()})

    def __sub__(self, other: "ExpPoly") -> "ExpPoly":
        return self + (-other)

    def __mul__(self, other: "ExpPoly") -> "ExpPoly":
        self._check(other)
        d: dict = {}
        for f1, p1 in self.terms.items():
            for f2, p2 in other.terms.items():
                _merge_term(d, f1 + f2, p1 * p2)
        return ExpPoly(self.nvars, self.m, d)

    def scale(self, c: Scalar) -> "ExpPoly":
        if c.is_zero:
            return ExpPoly.zero(self.nvars, self.m)
        return ExpPoly(self.nvars, self.m,
                       {f: p.scale(c) for f, p in self.terms.items()})

    def mul_poly(self, p: Poly) -> "ExpPoly":
        d = {f: q * p for f, q in self.terms.items()}
        return ExpPoly.make(self.nvars, self.m, d)

    def xdiff(self, n: int = 1) -> "ExpPoly":
        out = self
        for _ in range(n):
            d: dict = {}
            for f, p in out.terms.items():
                _merge_term(d, f, p.scale(f) + p.diff(0))
            out = ExpPoly(self.nvars, self.m, d)
        return out

    def attach_frequency(self, lam: Scalar) -> "ExpPoly":
        """Multiply by e^(lam*x)."""
        d: dict = {}
        for f, p in self.terms.items():
            _merge_term(d, f + lam, p)
        return ExpPoly(self.nvars, self.m, d)

    def translate(self, a: Scalar) -> "ExpPoly":
        """x -> x + a; exact only for frequency-free (polynomial) data."""
        if a.is_zero:
            return self
        if any(not f.is_zero for f in self.terms):
            raise PreconditionError(
                "translation of exponential terms leaves the coefficient field")
        return ExpPoly.make(self.nvars, self.m,
                            {f: p.translate_first(a) for f, p in self.terms.items()})

    def eval0(self) -> Scalar:
        """Value at x = 0."""
        acc = Scalar.zero(self.m)
        for p in self.terms.values():
            acc = acc + p.eval_first(Scalar.zero(self.m))
        return acc

    def vanishes_at(self, x0: Scalar) -> bool:
        """Exact zero test of the value at rational/cyclotomic x0.

        For x0 != 0 the values e^(mu*x0) over distinct mu are linearly
        independent over the coefficient field, so the sum vanishes iff
        every polynomial part does.
        """
        if x0.is_zero:
            return self.eval0().is_zero
        return all(p.eval_first(x0).is_zero for p in self.terms.values())

    def to_x_series(self, orders: TruncOrders) -> TruncatedSeries:
        """Expand as a series in x = t1 about 0 (other times set to zero)."""
        acc = TruncatedSeries.zero(orders, self.m)
        t1 = TruncatedSeries.time_var(1, orders, self.m)
        for f, p in self.terms.items():
            expf = t1.scale(f).exp()
            ps = TruncatedSeries.from_poly(p.restrict_to_first(), orders)
            acc = acc + expf * ps
        return acc

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: item[0].sort_key())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return (self.nvars, self.m, self.terms) == (other.nvars, other.m, other.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for f, p in self.sorted_terms():
            if f.is_zero:
                parts.append(f"({p})")
            else:
                parts.append(f"e^({f}x)*({p})")
        return " + ".join(parts)


def _multiset_union(a: tuple, b: tuple) -> tuple:
    return tuple(sorted(a + b, key=lambda s: s.sort_key()))


@dataclass(frozen=True, eq=False)
class TFunction:
    """Finite sum of e^(sum_k t_k * powersum_k(F)) * p(t) over multisets F.

    The all-times deformation of an ExpPoly: restricting to t = (x, 0, ...)
    collapses each multiset to its plain sum of frequencies.
    """

    nvars: int
    m: int
    terms: dict  # tuple of Scalars (sorted, zeros omitted) -> Poly

    @staticmethod
    def make(nvars: int, m: int, terms: dict) -> "TFunction":
        return TFunction(nvars, m, {f: p for f, p in terms.items() if not p.is_zero})

    @staticmethod
    def zero(nvars: int, m: int = 1) -> "TFunction":
        return TFunction(nvars, m, {})

    @staticmethod
    def const(value: Scalar, nvars: int) -> "TFunction":
        return TFunction.make(nvars, value.m, {(): Poly.const(value, nvars)})

    @staticmethod
    def one(nvars: int, m: int = 1) -> "TFunction":
        return TFunction.const(Scalar.one(m), nvars)

    @staticmethod
    def from_poly(p: Poly) -> "TFunction":
        return TFunction.make(p.nvars, p.m, {(): p})

    @staticmethod
    def exponential(mu: Scalar, nvars: int) -> "TFunction":
        key = () if mu.is_zero else (mu,)
        return TFunction(nvars, mu.m, {key: Poly.const(Scalar.one(mu.m), nvars)})

    def _check(self, other: "TFunction"):
        if self.nvars != other.nvars or self.m != other.m:
            raise PreconditionError("mismatched deformation rings")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "TFunction") -> "TFunction":
        self._check(other)
        d = dict(self.terms)
        for f, p in other.terms.items():
            _merge_term(d, f, p)
        return TFunction(self.nvars, self.m, d)

    def __neg__(self) -> "TFunction":
        return TFunction(self.nvars, self.m,
                         {f: -p for f, p in self.terms.items()})

    def __sub__(self, other: "TFunction") -> "TFunction":
        return self + (-other)

    def __mul__(self, other: "TFunction") -> "TFunction":
        self._check(other)
        d: dict = {}
        for f1, p1 in self.terms.items():
            for f2, p2 in other.terms.items():
                _merge_term(d, _multiset_union(f1, f2), p1 * p2)
        return TFunction(self.nvars, self.m, d)

    def scale(self, c: Scalar) -> "TFunction":
        if c.is_zero:
            return TFunction.zero(self.nvars, self.m)
        return TFunction(self.nvars, self.m,
                         {f: p.scale(c) for f, p in self.terms.items()})

    def mul_poly(self, p: Poly) -> "TFunction":
        return TFunction.make(self.nvars, self.m,
                              {f: q * p for f, q in self.terms.items()})

    def xdiff(self, n: int = 1) -> "TFunction":
        """d/dt1; the frequency sum acts as the exponential rate."""
        out = self
        for _ in range(n):
            d: dict = {}
            for f, p in out.terms.items():
                rate = Scalar.zero(self.m)
                for mu in f:
                    rate = rate + mu
                _merge_term(d, f, p.scale(rate) + p.diff(0))
            out = TFunction(self.nvars, self.m, d)
        return out

    def attach_frequency(self, lam: Scalar) -> "TFunction":
        if lam.is_zero:
            return self
        d: dict = {}
        for f, p in self.terms.items():
            _merge_term(d, _multiset_union(f, (lam,)), p)
        return TFunction(self.nvars, self.m, d)

    def translate_first(self, a: Scalar) -> "TFunction":
        """t1 -> t1 + a, exact only for frequency-free data."""
        if a.is_zero:
            return self
        if any(f for f in self.terms):
            raise PreconditionError(
                "translation of exponential terms leaves the coefficient field")
        return TFunction.make(self.nvars, self.m,
                              {f: p.translate_first(a) for f, p in self.terms.items()})

    def eval0(self) -> Scalar:
        acc = Scalar.zero(self.m)
        for p in self.terms.values():
            acc = acc + p.constant_term()
        return acc

    def restrict(self) -> ExpPoly:
        """Set t2 = t3 = ... = 0, collapsing multisets to frequency sums."""
        d: dict = {}
        for f, p in self.terms.items():
            mu = Scalar.zero(self.m)
            for s in f:
                mu = mu + s
            _merge_term(d, mu, p.restrict_to_first())
        return ExpPoly(self.nvars, self.m, d)

    def to_series(self, orders: TruncOrders) -> TruncatedSeries:
        """Expand e^(sum t_k s_k) * p(t) to the truncation orders."""
        acc = TruncatedSeries.zero(orders, self.m)
        for f, p in self.terms.items():
            linear = TruncatedSeries.zero(orders, self.m)
            for k in range(1, orders.t_var_count + 1):
                s_k = Scalar.zero(self.m)
                for mu in f:
                    s_k = s_k + mu ** k
                if not s_k.is_zero:
                    linear = linear + TruncatedSeries.time_var(k, orders, self.m).scale(s_k)
            acc = acc + linear.exp() * TruncatedSeries.from_poly(p, orders)
        return acc

    def sorted_terms(self):
        return sorted(self.terms.items(),
                      key=lambda item: (len(item[0]),
                                        tuple(s.sort_key() for s in item[0])))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TFunction):
            return NotImplemented
        return (self.nvars, self.m, self.terms) == (other.nvars, other.m, other.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for f, p in self.sorted_terms():
            if not f:
                parts.append(f"({p})")
            else:
                freqs = ",".join(str(s) for s in f)
                parts.append(f"E[{freqs}]*({p})")
        return " + ".join(parts)


def wronskian(fns: list, one=None):
    """Wronski determinant with rows d/dx^r; empty input gives 1.

    Works for ExpPoly, TFunction, and the operator-coefficient fractions:
    anything with xdiff, +, * and unary -.
    """
    if not fns:
        if one is None:
            raise PreconditionError("empty Wronskian needs an explicit unit")
        return one
    rows = [list(fns)]
    for _ in range(len(fns) - 1):
        rows.append([f.xdiff() for f in rows[-1]])
    zero = fns[0] - fns[0]
    return det_ring(rows, zero)


@dataclass(frozen=True)
class Condition:
    """A point-supported functional sum_i sum_j alpha_ij d_z^j at z = lambda_i."""

    points: tuple  # ((Scalar lambda, (Scalar alpha_0, ...)), ...)

    def __post_init__(self):
        if not any(any(not a.is_zero for a in alphas) for _, alphas in self.points):
            raise PreconditionError("condition must have a nonzero weight")

    @staticmethod
    def point_eval(lam: Scalar, order: int = 0) -> "Condition":
        """The functional d_z^order at z = lam."""
        alphas = tuple(Scalar.zero(lam.m) for _ in range(order)) + (Scalar.one(lam.m),)
        return Condition(((lam, alphas),))

    @staticmethod
    def combination(parts: list) -> "Condition":
        """parts: list of (lambda, [alpha_0, alpha_1, ...])."""
        return Condition(tuple((lam, tuple(alphas)) for lam, alphas in parts))

    def max_order(self) -> int:
        return max(len(alphas) - 1 for _, alphas in self.points)


@dataclass(frozen=True, eq=False)
class ExpTail:
    """Finite z-Laurent polynomial with coefficients in an exact function ring."""

    nvars: int
    m: int
    coeffs: dict  # int z power -> ExpPoly | TFunction

    @staticmethod
    def make(nvars: int, m: int, coeffs: dict) -> "ExpTail":
        return ExpTail(nvars, m, {j: c for j, c in coeffs.items() if not c.is_zero})

    @staticmethod
    def from_coeff(c, power: int = 0) -> "ExpTail":
        return ExpTail.make(c.nvars, c.m, {power: c})

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self):
        return sorted(self.coeffs)

    def coeff(self, j: int):
        return self.coeffs.get(j)

    def __add__(self, other: "ExpTail") -> "ExpTail":
        d = dict(self.coeffs)
        for j, c in other.coeffs.items():
            cur = d.get(j)
            new = c if cur is None else cur + c
            if new.is_zero:
                d.pop(j, None)
            else:
                d[j] = new
        return ExpTail(self.nvars, self.m, d)

    def __neg__(self) -> "ExpTail":
        return ExpTail(self.nvars, self.m, {j: -c for j, c in self.coeffs.items()})

    def __sub__(self, other: "ExpTail") -> "ExpTail":
        return self + (-other)

    def __mul__(self, other: "ExpTail") -> "ExpTail":
        d: dict = {}
        for j1, c1 in self.coeffs.items():
            for j2, c2 in other.coeffs.items():
                j = j1 + j2
                prod = c1 * c2
                if prod.is_zero:
                    continue
                cur = d.get(j)
                new = prod if cur is None else cur + prod
                if new.is_zero:
                    d.pop(j, None)
                else:
                    d[j] = new
        return ExpTail(self.nvars, self.m, d)

    def scale_coeff(self, c) -> "ExpTail":
        return ExpTail.make(self.nvars, self.m,
                            {j: q * c for j, q in self.coeffs.items()})

    def scale(self, c: Scalar) -> "ExpTail":
        return ExpTail.make(self.nvars, self.m,
                            {j: q.scale(c) for j, q in self.coeffs.items()})

    def zshift(self, n: int) -> "ExpTail":
        return ExpTail(self.nvars, self.m,
                       {j + n: c for j, c in self.coeffs.items()})

    def zderiv(self) -> "ExpTail":
        d: dict = {}
        for j, c in self.coeffs.items():
            if j:
                d[j - 1] = c.scale(Scalar.rational(j, self.m))
        return ExpTail.make(self.nvars, self.m, d)

    def xdiff(self) -> "ExpTail":
        return ExpTail.make(self.nvars, self.m,
                            {j: c.xdiff() for j, c in self.coeffs.items()})

    def shifted_xdiff(self) -> "ExpTail":
        """d/dx through the wave prefactor: T -> z*T + dT/dx."""
        return self.zshift(1) + self.xdiff()

    def eval_z(self, lam: Scalar):
        """Exact evaluation at z = lam (lam = 0 needs a pole-free tail)."""
        acc = None
        if lam.is_zero:
            if any(j < 0 for j in self.coeffs):
                raise PreconditionError(
                    "wave function not defined at condition point")
            return self.coeffs.get(0)
        inv = lam.inverse()
        for j, c in self.coeffs.items():
            factor = lam ** j if j >= 0 else inv ** (-j)
            term = c.scale(factor)
            acc = term if acc is None else acc + term
        return acc

    def mul_zpoly(self, zp: ZPoly) -> "ExpTail":
        acc = ExpTail(self.nvars, self.m, {})
        for d, c in zp.coeffs:
            acc = acc + self.zshift(d).scale(c)
        return acc

    def to_laurent(self, orders: TruncOrders) -> LaurentTail:
        """Expand every coefficient to a truncated series."""
        d = {}
        for j, c in self.coeffs.items():
            s = c.to_series(orders) if isinstance(c, TFunction) else c.to_x_series(orders)
            if not s.is_zero:
                d[j] = s
        return LaurentTail.make(orders, self.m, d, None)

    def restrict(self) -> "ExpTail":
        return ExpTail.make(self.nvars, self.m,
                            {j: c.restrict() for j, c in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExpTail):
            return NotImplemented
        return (self.nvars, self.m, self.coeffs) == (other.nvars, other.m, other.coeffs)


@dataclass(frozen=True)
class WavePresentation:
    """Exact closed form of a wave function: e^(xi(t,z)) * num / (den_t * den_z).

    num is an ExpTail with TFunction coefficients, den_t is z-independent,
    den_z is a polynomial in z (the accumulated Wronskian denominators and
    the divisor g of earlier transformations).
    """

    orders: TruncOrders
    m: int
    num: ExpTail          # TFunction coefficients
    den_t: TFunction
    den_z: ZPoly
    x0: Scalar

    @staticmethod
    def vacuum(orders: TruncOrders, m: int = 1) -> "WavePresentation":
        one = TFunction.one(orders.t_var_count, m)
        return WavePresentation(orders, m, ExpTail.from_coeff(one),
                                one, ZPoly.one(m), Scalar.zero(m))


def _xi_prime(orders: TruncOrders, m: int, nvars: int) -> ExpTail:
    # d/dz of xi(t, z) = sum_k t_k z^k within the finite variable model
    coeffs = {}
    for k in range(1, orders.t_var_count + 1):
        poly = Poly.variable(k - 1, nvars, m).scale(Scalar.rational(k, m))
        coeffs[k - 1] = TFunction.from_poly(poly)
    return ExpTail.make(nvars, m, coeffs)


def _xi_prime_x(orders: TruncOrders, m: int, nvars: int) -> ExpTail:
    # restriction of xi': d/dz of x*z is the constant (in z) coefficient x
    return ExpTail.from_coeff(ExpPoly.from_poly(Poly.variable(0, nvars, m)))


def _derivative_numerators(num: ExpTail, den_z: ZPoly, xi_prime: ExpTail,
                           top_order: int, const_nvars: int, m: int) -> list:
    """B_j with d_z^j (e^xi num / den_z) = e^xi B_j / den_z^(j+1)."""
    out = [num]
    g_tail = ExpTail.make(num.nvars, m,
                          {d: _tail_const_like(num, c) for d, c in den_z.coeffs})
    gp = den_z.derivative()
    gp_tail = ExpTail.make(num.nvars, m,
                           {d: _tail_const_like(num, c) for d, c in gp.coeffs})
    for j in range(top_order):
        b = out[-1]
        step = (xi_prime * b + b.zderiv()) * g_tail
        if not gp_tail.is_zero:
            step = step - (b * gp_tail).scale(Scalar.rational(j + 1, m))
        out.append(step)
    return out


def _tail_const_like(num: ExpTail, c: Scalar):
    sample = next(iter(num.coeffs.values()), None)
    if sample is None or isinstance(sample, TFunction):
        return TFunction.const(c, num.nvars)
    return ExpPoly.const(c, num.nvars)


@dataclass(frozen=True)
class KernelFunction:
    """A kernel function of P: closed form in x and its deformation in t."""

    x_num: ExpPoly
    x_den: ExpPoly
    t_num: TFunction
    t_den: TFunction


def apply_condition(cond: Condition, wave: WavePresentation) -> KernelFunction:
    """Evaluate <c, Psi(.,z)> for a point-supported condition.

    The x-only and all-times routes are computed independently; the
    restriction of the t route to (x, 0, 0, ...) must reproduce the x route,
    which is a tested invariant rather than a construction.
    """
    orders, m = wave.orders, wave.m
    nvars = orders.t_var_count
    top = cond.max_order()

    xi_t = _xi_prime(orders, m, nvars)
    bs_t = _derivative_numerators(wave.num, wave.den_z, xi_t, top, nvars, m)
    num_x_tail = wave.num.restrict()
    xi_x = _xi_prime_x(orders, m, nvars)
    bs_x = _derivative_numerators(num_x_tail, wave.den_z, xi_x, top, nvars, m)

    t_acc = TFunction.zero(nvars, m)
    x_acc = ExpPoly.zero(nvars, m)
    for lam, alphas in cond.points:
        g_at = wave.den_z.eval(lam)
        if g_at.is_zero:
            raise PreconditionError(
                "wave function not defined at condition point")
        g_inv = g_at.inverse()
        for j, alpha in enumerate(alphas):
            if alpha.is_zero:
                continue
            factor = alpha * g_inv ** (j + 1)
            bt = bs_t[j].eval_z(lam)
            if bt is not None:
                t_acc = t_acc + bt.scale(factor).attach_frequency(lam)
            bx = bs_x[j].eval_z(lam)
            if bx is not None:
                x_acc = x_acc + bx.scale(factor).attach_frequency(lam)
    return KernelFunction(x_num=x_acc, x_den=wave.den_t.restrict(),
                          t_num=t_acc, t_den=wave.den_t)


@dataclass(frozen=True)
class SpectralPoint:
    """A condition point lambda with derivative multiplicity d."""

    lam: Scalar
    multiplicity: int

    def __post_init__(self):
        if self.multiplicity < 1:
            raise PreconditionError("multiplicity must be positive")


def kernel_basis(wave: WavePresentation, points: list, n_reduction: int,
                 x0: Scalar | None = None) -> list:
    """Basis of ker prod (L - lambda_i^N)^(d_i) as evaluations of the wave.

    Returns the d*N functions d_z^k Psi(x, z) at z = eps^j lambda_i in the
    fixed order (point i, then root branch j, then derivative k); a point at
    lambda = 0 contributes the d*N derivatives at 0 instead of a branch grid.
    """
    m = wave.m
    n = n_reduction
    base_x0 = x0 if x0 is not None else wave.x0
    eval_points: list[tuple[Scalar, int]] = []
    seen: list[Scalar] = []
    for pt in points:
        if pt.lam.is_zero:
            branch = [(Scalar.zero(m), pt.multiplicity * n)]
        else:
            branch = []
            for j in range(n):
                mu = Scalar.root_of_unity(m, n, j) * pt.lam
                branch.append((mu, pt.multiplicity))
        for mu, _ in branch:
            if any(mu == s for s in seen):
                raise PreconditionError(
                    "degenerate spectral data: repeated evaluation point")
            seen.append(mu)
        eval_points.extend(branch)

    basis: list[KernelFunction] = []
    for mu, depth in eval_points:
        for k in range(depth):
            basis.append(apply_condition(Condition.point_eval(mu, k), wave))

    wr = wronskian([kf.x_num for kf in basis])
    if wr.vanishes_at(base_x0):
        raise PreconditionError("degenerate spectral data")
    return basis
