"""Ordinary differential operators in x with exact rational-exponential
coefficients, plus the truncated pseudo-differential dressing.

Operator coefficients live in the fraction field of ExpPoly so that the
factorization identities (composition, right division, conjugation) are
exact statements, never order-limited ones.  Truncation enters only when an
operator touches a wave function.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import PreconditionError
from .expfun import ExpPoly, ExpTail
from .linalg import det_ring
from .polynomials import ZPoly
from .scalars import Scalar
from .series import LaurentTail, TruncOrders, TruncatedSeries, WaveFunction


@dataclass(frozen=True, eq=False)
class ExpPolyFraction:
    """Quotient of exponential polynomials; the coefficient field of operators.

    Canonical content: the denominator's leading coefficient (in the sorted
    term order) is one, and a denominator consisting of a single exponential
    term is folded into the numerator's frequencies.
    """

    num: ExpPoly
    den: ExpPoly

    @staticmethod
    def make(num: ExpPoly, den: ExpPoly) -> "ExpPolyFraction":
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        if num.is_zero:
            return ExpPolyFraction(num, ExpPoly.one(num.nvars, num.m))
        if len(den.terms) == 1:
            ((mu, p),) = den.terms.items()
            if len(p.terms) == 1 and not mu.is_zero:
                # e^(mu x) * monomial: strip the exponential part
                num = num.attach_frequency(-mu)
                den = ExpPoly.make(den.nvars, den.m, {Scalar.zero(den.m): p})
        lead = den.sorted_terms()[0][1].terms[0][1]
        if not lead.is_one:
            inv = lead.inverse()
            num = num.scale(inv)
            den = den.scale(inv)
        return ExpPolyFraction(num, den)

    @staticmethod
    def from_exppoly(p: ExpPoly) -> "ExpPolyFraction":
        return ExpPolyFraction.make(p, ExpPoly.one(p.nvars, p.m))

    @staticmethod
    def zero(nvars: int, m: int = 1) -> "ExpPolyFraction":
        return ExpPolyFraction.from_exppoly(ExpPoly.zero(nvars, m))

    @staticmethod
    def one(nvars: int, m: int = 1) -> "ExpPolyFraction":
        return ExpPolyFraction.from_exppoly(ExpPoly.one(nvars, m))

    @staticmethod
    def const(c: Scalar, nvars: int) -> "ExpPolyFraction":
        return ExpPolyFraction.from_exppoly(ExpPoly.const(c, nvars))

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @property
    def m(self) -> int:
        return self.num.m

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __add__(self, other: "ExpPolyFraction") -> "ExpPolyFraction":
        if self.den == other.den:
            return ExpPolyFraction.make(self.num + other.num, self.den)
        return ExpPolyFraction.make(self.num * other.den + other.num * self.den,
                                    self.den * other.den)

    def __neg__(self) -> "ExpPolyFraction":
        return ExpPolyFraction(-self.num, self.den)

    def __sub__(self, other: "ExpPolyFraction") -> "ExpPolyFraction":
        return self + (-other)

    def __mul__(self, other: "ExpPolyFraction") -> "ExpPolyFraction":
        return ExpPolyFraction.make(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "ExpPolyFraction") -> "ExpPolyFraction":
        if other.is_zero:
            raise ZeroDivisionError("division by zero fraction")
        return ExpPolyFraction.make(self.num * other.den, self.den * other.num)

    def scale(self, c: Scalar) -> "ExpPolyFraction":
        return ExpPolyFraction.make(self.num.scale(c), self.den)

    def xdiff(self, n: int = 1) -> "ExpPolyFraction":
        out = self
        for _ in range(n):
            num = out.num.xdiff() * out.den - out.num * out.den.xdiff()
            out = ExpPolyFraction.make(num, out.den * out.den)
        return out

    def translate(self, a: Scalar) -> "ExpPolyFraction":
        return ExpPolyFraction.make(self.num.translate(a), self.den.translate(a))

    def defined_at(self, x0: Scalar) -> bool:
        return not self.den.vanishes_at(x0)

    def is_unit_at(self, x0: Scalar) -> bool:
        return self.defined_at(x0) and not self.num.vanishes_at(x0)

    def try_exppoly(self) -> ExpPoly | None:
        """The value as an ExpPoly when the denominator is a nonzero constant."""
        terms = self.den.terms
        if len(terms) == 1:
            ((mu, p),) = terms.items()
            if mu.is_zero and len(p.terms) == 1 and p.terms[0][0] == (0,) * p.nvars:
                return self.num.scale(p.terms[0][1].inverse())
        return None

    def to_x_series(self, orders: TruncOrders, x0: Scalar | None = None) -> TruncatedSeries:
        """Expand about the base point; needs a denominator unit there."""
        frac = self if x0 is None or x0.is_zero else self.translate(x0)
        den_series = frac.den.to_x_series(orders)
        if den_series.constant_term().is_zero:
            raise PreconditionError(
                "coefficient denominator vanishes at the base point")
        return frac.num.to_x_series(orders) * den_series.invert()

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExpPolyFraction):
            return NotImplemented
        return (self.num * other.den) == (other.num * self.den)

    def __repr__(self) -> str:
        if self.den == ExpPoly.one(self.nvars, self.m):
            return repr(self.num)
        return f"({self.num}) / ({self.den})"


EPF = ExpPolyFraction


@dataclass(frozen=True, eq=False)
class DiffOp:
    """A differential operator sum_i c_i(x) d^i with fraction coefficients."""

    nvars: int
    m: int
    coeffs: tuple  # ascending EPF coefficients, trimmed

    @staticmethod
    def make(nvars: int, m: int, coeffs: list) -> "DiffOp":
        cs = list(coeffs)
        while cs and cs[-1].is_zero:
            cs.pop()
        return DiffOp(nvars, m, tuple(cs))

    @staticmethod
    def identity(nvars: int, m: int = 1) -> "DiffOp":
        return DiffOp(nvars, m, (EPF.one(nvars, m),))

    @staticmethod
    def dx(nvars: int, m: int = 1, order: int = 1) -> "DiffOp":
        coeffs = [EPF.zero(nvars, m)] * order + [EPF.one(nvars, m)]
        return DiffOp(nvars, m, tuple(coeffs))

    @staticmethod
    def from_coeff(c: EPF, order: int = 0) -> "DiffOp":
        coeffs = [EPF.zero(c.nvars, c.m)] * order + [c]
        return DiffOp.make(c.nvars, c.m, coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def order(self) -> int:
        if not self.coeffs:
            raise PreconditionError("order of the zero operator")
        return len(self.coeffs) - 1

    @property
    def leading(self) -> EPF:
        return self.coeffs[-1]

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.leading == EPF.one(self.nvars, self.m)

    def coeff(self, i: int) -> EPF:
        if i < len(self.coeffs):
            return self.coeffs[i]
        return EPF.zero(self.nvars, self.m)

    def __add__(self, other: "DiffOp") -> "DiffOp":
        n = max(len(self.coeffs), len(other.coeffs))
        return DiffOp.make(self.nvars, self.m,
                           [self.coeff(i) + other.coeff(i) for i in range(n)])

    def __neg__(self) -> "DiffOp":
        return DiffOp(self.nvars, self.m, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def scale(self, c: Scalar) -> "DiffOp":
        return DiffOp.make(self.nvars, self.m,
                           [k.scale(c) for k in self.coeffs])

    def scale_fraction(self, c: EPF) -> "DiffOp":
        return DiffOp.make(self.nvars, self.m, [k * c for k in self.coeffs])

    def apply_fraction(self, f: EPF) -> EPF:
        acc = EPF.zero(self.nvars, self.m)
        df = f
        for i, c in enumerate(self.coeffs):
            if i:
                df = df.xdiff()
            if not c.is_zero:
                acc = acc + c * df
        return acc

    def apply(self, f: ExpPoly) -> EPF:
        return self.apply_fraction(EPF.from_exppoly(f))

    def compose(self, other: "DiffOp") -> "DiffOp":
        """Operator composition (self after other), by the Leibniz rule."""
        if self.is_zero or other.is_zero:
            return DiffOp.make(self.nvars, self.m, [])
        out = [EPF.zero(self.nvars, self.m)] * (self.order + other.order + 1)
        for j, b in enumerate(other.coeffs):
            if b.is_zero:
                continue
            derivs = [b]
            for i, a in enumerate(self.coeffs):
                if a.is_zero:
                    continue
                while len(derivs) <= i:
                    derivs.append(derivs[-1].xdiff())
                for s in range(i + 1):
                    c = a * derivs[s]
                    if s:
                        c = c.scale(Scalar.rational(comb(i, s), self.m))
                    out[i - s + j] = out[i - s + j] + c
        return DiffOp.make(self.nvars, self.m, out)

    def power(self, n: int) -> "DiffOp":
        result = DiffOp.identity(self.nvars, self.m)
        for _ in range(n):
            result = result.compose(self)
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return all(self.coeff(i) == other.coeff(i) for i in range(n))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeff(i)
            if c.is_zero:
                continue
            dx = "" if i == 0 else ("D" if i == 1 else f"D^{i}")
            parts.append(f"({c}){dx}" if dx else f"({c})")
        return " + ".join(parts)


def zpoly_of_operator(h: ZPoly, op: DiffOp) -> DiffOp:
    """h(op) for a scalar polynomial h."""
    acc = DiffOp.make(op.nvars, op.m, [])
    power = DiffOp.identity(op.nvars, op.m)
    last = 0
    for d, c in h.coeffs:
        for _ in range(d - last):
            power = power.compose(op)
        last = d
        acc = acc + power.scale(c)
    return acc


def right_divide(lhs: DiffOp, p: DiffOp) -> tuple[DiffOp, DiffOp]:
    """Q, R with lhs = Q compose P + R and ord R < ord P; P monic."""
    if not p.is_monic:
        raise PreconditionError("right division requires a monic divisor")
    q = DiffOp.make(lhs.nvars, lhs.m, [])
    r = lhs
    while not r.is_zero and r.order >= p.order:
        step = DiffOp.from_coeff(r.leading, r.order - p.order)
        q = q + step
        r = r - step.compose(p)
    return q, r


def operator_with_kernel(fns: list, x0: Scalar) -> DiffOp:
    """The monic operator of order n = len(fns) annihilating every f in fns.

    Realized through the Wronskian ratio u -> Wr(f_0..f_{n-1}, u)/Wr(f);
    requires Wr(f)(x0) != 0.
    """
    if not fns:
        raise PreconditionError("empty kernel defines the identity; use DiffOp.identity")
    fracs = [f if isinstance(f, EPF) else EPF.from_exppoly(f) for f in fns]
    nvars, m = fracs[0].nvars, fracs[0].m
    n = len(fracs)
    derivs = [fracs]
    for _ in range(n):
        derivs.append([f.xdiff() for f in derivs[-1]])
    wr = det_ring([derivs[r] for r in range(n)], EPF.zero(nvars, m))
    if wr.is_zero or not wr.is_unit_at(x0):
        raise PreconditionError(
            "vanishing kernel Wronskian at the base point; shift the base point")
    coeffs = []
    for r in range(n + 1):
        rows = [derivs[s] for s in range(n + 1) if s != r]
        minor = det_ring(rows, EPF.zero(nvars, m)) if rows else EPF.one(nvars, m)
        sign = Scalar.rational((-1) ** (n + r), m)
        coeffs.append((minor / wr).scale(sign))
    return DiffOp.make(nvars, m, coeffs)


def conjugate(p: DiffOp, op: DiffOp, kernel: list | None = None) -> DiffOp:
    """P L P^(-1) as a differential operator; needs L(ker P) inside ker P.

    When the kernel functions are supplied the invariance is checked on them
    directly; the zero-remainder condition of the division is the equivalent
    classical criterion and is always enforced.
    """
    if kernel is not None:
        for f in kernel:
            img = op.apply_fraction(f if isinstance(f, EPF) else EPF.from_exppoly(f))
            if not p.apply_fraction(img).is_zero:
                raise PreconditionError("kernel not invariant")
    q, r = right_divide(p.compose(op), p)
    if not r.is_zero:
        raise PreconditionError("kernel not invariant")
    return q


def apply_to_wave(op: DiffOp, psi: WaveFunction, x0: Scalar | None = None) -> WaveFunction:
    """Apply the operator through the exponential prefactor of a wave.

    d/dx acts on e^(xi) T as e^(xi) (z + d/dt1) T; coefficients are expanded
    into truncated series about the base point.
    """
    orders, m = psi.orders, psi.m
    if op.is_zero:
        return WaveFunction(orders, m, LaurentTail.zero(orders, m), psi.den)
    n = op.order
    normalized_den = psi.den == TruncatedSeries.one(orders, m)
    shifts = [psi.num]
    dden = psi.den.diff(1)
    for r in range(n):
        s = shifts[-1].shifted_xdiff()
        if not normalized_den:
            s = s.scale_series(psi.den) - shifts[-1].scale_series(
                dden.scale(Scalar.rational(r + 1, m)))
        shifts.append(s)
    num = LaurentTail.zero(orders, m)
    for r in range(n + 1):
        c = op.coeff(r)
        if c.is_zero:
            continue
        gamma = c.to_x_series(orders, x0)
        term = shifts[r].scale_series(gamma)
        if not normalized_den:
            term = term.scale_series(psi.den ** (n - r))
        num = num + term
    den = psi.den if normalized_den else psi.den ** (n + 1)
    return WaveFunction(orders, m, num, den)


def apply_to_exact_tail(op: DiffOp, tail: ExpTail,
                        den_x: ExpPoly | None = None) -> tuple[ExpTail, ExpPoly]:
    """Apply the operator to an exact wave e^(xz) * tail / den_x symbolically.

    The tail must carry ExpPoly coefficients (an x-only closed form).
    Returns a numerator tail with ExpPoly coefficients and the common
    denominator that divides every coefficient.
    """
    nvars, m = op.nvars, op.m
    one = ExpPoly.one(nvars, m)
    if op.is_zero:
        return ExpTail.make(nvars, m, {}), one
    den_frac = EPF.from_exppoly(den_x) if den_x is not None else EPF.one(nvars, m)
    frac_tail = ExpTail.make(nvars, m, {
        j: EPF.from_exppoly(c) / den_frac for j, c in tail.coeffs.items()})
    shifts = [frac_tail]
    for _ in range(op.order):
        shifts.append(shifts[-1].shifted_xdiff())
    acc = ExpTail.make(nvars, m, {})
    for r in range(op.order + 1):
        c = op.coeff(r)
        if not c.is_zero:
            acc = acc + shifts[r].scale_coeff(c)
    # clear denominators: coefficient j becomes num_j * prod(den_k, k != j)
    items = sorted(acc.coeffs.items())
    dens = [c.den for _, c in items]
    den = one
    for d in dens:
        den = den * d
    cleared = {}
    for idx, (j, c) in enumerate(items):
        cofactor = one
        for k, d in enumerate(dens):
            if k != idx:
                cofactor = cofactor * d
        cleared[j] = c.num * cofactor
    return ExpTail.make(nvars, m, cleared), den


@dataclass(frozen=True, eq=False)
class PseudoDiffOp:
    """Formal series sum_j a_j(t) d^j truncated below a floor order."""

    orders: TruncOrders
    m: int
    terms: dict  # int order -> TruncatedSeries
    floor: int

    @staticmethod
    def make(orders: TruncOrders, m: int, terms: dict, floor: int) -> "PseudoDiffOp":
        return PseudoDiffOp(orders, m,
                            {j: s for j, s in terms.items()
                             if not s.is_zero and j >= floor}, floor)

    @staticmethod
    def identity(orders: TruncOrders, m: int = 1, floor: int = 0) -> "PseudoDiffOp":
        return PseudoDiffOp.make(orders, m, {0: TruncatedSeries.one(orders, m)}, floor)

    @staticmethod
    def dx(orders: TruncOrders, m: int = 1, floor: int = 0) -> "PseudoDiffOp":
        return PseudoDiffOp.make(orders, m, {1: TruncatedSeries.one(orders, m)}, floor)

    def coeff(self, j: int) -> TruncatedSeries:
        return self.terms.get(j, TruncatedSeries.zero(self.orders, self.m))

    def __add__(self, other: "PseudoDiffOp") -> "PseudoDiffOp":
        floor = max(self.floor, other.floor)
        d = dict(self.terms)
        for j, s in other.terms.items():
            cur = d.get(j)
            new = s if cur is None else cur + s
            if new.is_zero:
                d.pop(j, None)
            else:
                d[j] = new
        return PseudoDiffOp.make(self.orders, self.m, d, floor)

    def __neg__(self) -> "PseudoDiffOp":
        return PseudoDiffOp(self.orders, self.m,
                            {j: -s for j, s in self.terms.items()}, self.floor)

    def __sub__(self, other: "PseudoDiffOp") -> "PseudoDiffOp":
        return self + (-other)

    def compose(self, other: "PseudoDiffOp") -> "PseudoDiffOp":
        """Formal composition with the generalized Leibniz rule."""
        floor = max(self.floor, other.floor)
        out: dict = {}
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                db = b
                for s in range(self.orders.t_weight_bound + 1):
                    if s:
                        db = db.diff(1)
                        if db.is_zero:
                            break
                    k = i + j - s
                    if k < floor:
                        break
                    coeff = _gen_binom(i, s, self.m)
                    if coeff.is_zero:
                        continue
                    term = a * db.scale(coeff)
                    if term.is_zero:
                        continue
                    cur = out.get(k)
                    new = term if cur is None else cur + term
                    if new.is_zero:
                        out.pop(k, None)
                    else:
                        out[k] = new
        return PseudoDiffOp.make(self.orders, self.m, out, floor)

    def invert(self) -> "PseudoDiffOp":
        """Inverse of 1 + (strictly lower order); Neumann series to the floor."""
        one = PseudoDiffOp.identity(self.orders, self.m, self.floor)
        a = self - one
        if any(j >= 0 and not s.is_zero for j, s in a.terms.items()):
            raise PreconditionError("inversion requires the form 1 + lower order")
        acc = one
        power = one
        for _ in range(-self.floor + 1):
            power = power.compose(a)
            if not power.terms:
                break
            acc = acc + (-power if (_ % 2 == 0) else power)
        return acc

    def apply_to_tail(self, tail: LaurentTail) -> LaurentTail:
        """Act on e^(xi) * tail; d^j becomes (z + d/dt1)^j, j possibly negative."""
        acc = LaurentTail.zero(self.orders, self.m)
        for j in sorted(self.terms, reverse=True):
            acc = acc + _shifted_power(tail, j).scale_series(self.terms[j])
        return acc

    def __eq__(self, other) -> bool:
        if not isinstance(other, PseudoDiffOp):
            return NotImplemented
        return (self.orders == other.orders and self.m == other.m
                and self.terms == other.terms and self.floor == other.floor)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for j in sorted(self.terms, reverse=True):
            parts.append(f"({self.terms[j]})D^{j}")
        return " + ".join(parts)


def _gen_binom(i: int, s: int, m: int) -> Scalar:
    acc = Fraction(1)
    for r in range(s):
        acc *= Fraction(i - r, r + 1)
    return Scalar.rational(acc, m)


def _shifted_power(tail: LaurentTail, j: int) -> LaurentTail:
    if j == 0:
        return tail
    if j > 0:
        out = tail
        for _ in range(j):
            out = out.shifted_xdiff()
        return out
    out = tail
    for _ in range(-j):
        out = _shifted_inverse(out)
    return out


def _shifted_inverse(tail: LaurentTail) -> LaurentTail:
    # (z + d)^(-1) T = z^(-1) sum_i (-1)^i (d/dt1)^i T z^(-i); the sum is
    # finite because each derivative lowers the weight.
    acc = LaurentTail.zero(tail.orders, tail.m)
    cur = tail
    sign = 1
    for i in range(tail.orders.t_weight_bound + 1):
        if cur.is_zero and i > 0:
            break
        term = cur.zshift(-1 - i)
        acc = acc + (term if sign > 0 else -term)
        sign = -sign
        cur = LaurentTail.make(tail.orders, tail.m,
                               {jj: s.diff(1) for jj, s in cur.coeffs.items()},
                               cur.floor)
    return acc


def dress(psi: WaveFunction) -> tuple[PseudoDiffOp, PseudoDiffOp]:
    """Read the wave operator K off the tail and form P = K dx K^(-1).

    Requires the tail normalized to 1 + O(1/z); the eigenvalue identity
    P Psi = z Psi then holds in every retained coefficient.
    """
    orders, m = psi.orders, psi.m
    tail = psi.tail()
    if tail.coeff(0) != TruncatedSeries.one(orders, m) or \
            any(j > 0 for j in tail.coeffs):
        raise PreconditionError("tail not normalized")
    floor = -orders.z_neg_bound
    terms = {0: TruncatedSeries.one(orders, m)}
    for j in range(1, orders.z_neg_bound + 1):
        a = tail.coeff(-j)
        if not a.is_zero:
            terms[-j] = a
    k = PseudoDiffOp.make(orders, m, terms, floor)
    p = k.compose(PseudoDiffOp.dx(orders, m, floor)).compose(k.invert())
    return k, p
