"""Truncated multivariate series in the KP times and Laurent tails in z.

Series are truncated by *weighted* total degree with weight(t_k) = k, the
natural grading in which t_k and z^k are commensurate.  Zero coefficients
are never stored, so equality of values is equality of representations.

LaurentTail tracks a `floor`: the lowest z index whose coefficient is
guaranteed correct.  floor=None means the tail is complete (no terms were
ever discarded), which is the common case because a weight-D series can
only reach z-depth D under the Miwa shift.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .errors import PreconditionError, TruncationError
from .polynomials import Poly, ZPoly
from .scalars import Scalar


@dataclass(frozen=True)
class TruncOrders:
    """Truncation configuration: weighted t-degree bound, variable count, z depth."""

    t_weight_bound: int
    t_var_count: int
    z_neg_bound: int

    def __post_init__(self):
        if self.t_weight_bound < 0 or self.t_var_count < 1 or self.z_neg_bound < 0:
            raise PreconditionError("invalid truncation orders")

    def weight(self, exps: tuple) -> int:
        return sum((i + 1) * e for i, e in enumerate(exps))

    def deeper(self, dt: int = 0, dz: int = 0) -> "TruncOrders":
        return TruncOrders(self.t_weight_bound + dt, self.t_var_count,
                           self.z_neg_bound + dz)


DEFAULT_ORDERS = TruncOrders(t_weight_bound=8, t_var_count=4, z_neg_bound=6)


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Multivariate series over Q(zeta_m) truncated at weighted degree D."""

    orders: TruncOrders
    m: int
    terms: dict  # exponent tuple -> Scalar, weight <= D, no zeros

    # -- constructors ------------------------------------------------------

    @staticmethod
    def make(orders: TruncOrders, m: int, terms: dict) -> "TruncatedSeries":
        d = {e: c for e, c in terms.items()
             if not c.is_zero and orders.weight(e) <= orders.t_weight_bound}
        return TruncatedSeries(orders, m, d)

    @staticmethod
    def zero(orders: TruncOrders, m: int = 1) -> "TruncatedSeries":
        return TruncatedSeries(orders, m, {})

    @staticmethod
    def const(value: Scalar, orders: TruncOrders) -> "TruncatedSeries":
        return TruncatedSeries.make(orders, value.m,
                                    {(0,) * orders.t_var_count: value})

    @staticmethod
    def one(orders: TruncOrders, m: int = 1) -> "TruncatedSeries":
        return TruncatedSeries.const(Scalar.one(m), orders)

    @staticmethod
    def time_var(k: int, orders: TruncOrders, m: int = 1) -> "TruncatedSeries":
        """The variable t_k (1-based)."""
        if not 1 <= k <= orders.t_var_count:
            raise PreconditionError(f"variable t{k} out of range")
        e = tuple(1 if i == k - 1 else 0 for i in range(orders.t_var_count))
        return TruncatedSeries.make(orders, m, {e: Scalar.one(m)})

    @staticmethod
    def from_poly(p: Poly, orders: TruncOrders) -> "TruncatedSeries":
        if p.nvars != orders.t_var_count:
            raise PreconditionError("variable count mismatch")
        return TruncatedSeries.make(orders, p.m, dict(p.terms))

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "TruncatedSeries"):
        if self.orders != other.orders:
            raise PreconditionError("mismatched truncation orders")
        if self.m != other.m:
            raise PreconditionError("mixed cyclotomic field indices")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> Scalar:
        return self.terms.get((0,) * self.orders.t_var_count, Scalar.zero(self.m))

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        d = dict(self.terms)
        for e, c in other.terms.items():
            cur = d.get(e)
            new = c if cur is None else cur + c
            if new.is_zero:
                d.pop(e, None)
            else:
                d[e] = new
        return TruncatedSeries(self.orders, self.m, d)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(self.orders, self.m,
                               {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        bound = self.orders.t_weight_bound
        weight = self.orders.weight
        d: dict = {}
        items2 = [(e, weight(e), c) for e, c in other.terms.items()]
        for e1, c1 in self.terms.items():
            w1 = weight(e1)
            for e2, w2, c2 in items2:
                if w1 + w2 > bound:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                cur = d.get(e)
                prod = c1 * c2
                new = prod if cur is None else cur + prod
                if new.is_zero:
                    d.pop(e, None)
                else:
                    d[e] = new
        return TruncatedSeries(self.orders, self.m, d)

    def scale(self, c: Scalar) -> "TruncatedSeries":
        if c.is_zero:
            return TruncatedSeries.zero(self.orders, self.m)
        return TruncatedSeries(self.orders, self.m,
                               {e: k * c for e, k in self.terms.items()})

    def __pow__(self, n: int) -> "TruncatedSeries":
        out = TruncatedSeries.one(self.orders, self.m)
        for _ in range(n):
            out = out * self
        return out

    def exp(self) -> "TruncatedSeries":
        """Series exponential; requires zero constant term."""
        if not self.constant_term().is_zero:
            raise PreconditionError("series exponential needs zero constant term")
        out = TruncatedSeries.one(self.orders, self.m)
        power = TruncatedSeries.one(self.orders, self.m)
        for n in range(1, self.orders.t_weight_bound + 1):
            power = power * self
            if power.is_zero:
                break
            out = out + power.scale(Scalar.rational(Fraction(1, factorial(n)), self.m))
        return out

    def invert(self) -> "TruncatedSeries":
        """Multiplicative inverse; requires a unit constant term."""
        c0 = self.constant_term()
        if c0.is_zero:
            raise PreconditionError("non-unit series")
        inv0 = c0.inverse()
        u = TruncatedSeries.one(self.orders, self.m) - self.scale(inv0)
        out = TruncatedSeries.one(self.orders, self.m)
        power = TruncatedSeries.one(self.orders, self.m)
        for _ in range(self.orders.t_weight_bound):
            power = power * u
            if power.is_zero:
                break
            out = out + power
        return out.scale(inv0)

    def diff(self, k: int) -> "TruncatedSeries":
        """d/dt_k (1-based).  Exact only to weight D - k; library code paths
        differentiate exact closed forms instead whenever full depth matters."""
        var = k - 1
        d: dict = {}
        for e, c in self.terms.items():
            if e[var]:
                e2 = tuple(x - 1 if i == var else x for i, x in enumerate(e))
                nc = c * e[var]
                cur = d.get(e2)
                new = nc if cur is None else cur + nc
                if new.is_zero:
                    d.pop(e2, None)
                else:
                    d[e2] = new
        return TruncatedSeries(self.orders, self.m, d)

    def restrict_to_first(self) -> "TruncatedSeries":
        """Set t2 = t3 = ... = 0."""
        return TruncatedSeries(self.orders, self.m,
                               {e: c for e, c in self.terms.items()
                                if not any(e[1:])})

    def truncate(self, orders: TruncOrders) -> "TruncatedSeries":
        """Re-truncate to shallower orders (same variable count)."""
        if orders.t_var_count != self.orders.t_var_count:
            raise PreconditionError("variable count mismatch")
        if orders.t_weight_bound > self.orders.t_weight_bound:
            raise PreconditionError("cannot deepen by truncation")
        return TruncatedSeries.make(orders, self.m, self.terms)

    def coeff(self, exps: tuple) -> Scalar:
        return self.terms.get(tuple(exps), Scalar.zero(self.m))

    def sorted_terms(self):
        return sorted(self.terms.items(),
                      key=lambda item: (self.orders.weight(item[0]), item[0]))

    def first_nonzero(self):
        """Canonically-first nonzero (exps, coefficient), or None."""
        items = self.sorted_terms()
        return items[0] if items else None

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.orders == other.orders and self.m == other.m
                and self.terms == other.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"t{i+1}^{x}" if x > 1 else f"t{i+1}"
                            for i, x in enumerate(e) if x)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)


def _top_bound(coeffs: dict, floor):
    if coeffs:
        return max(coeffs)
    if floor is None:
        return None  # exact zero
    return floor - 1  # nothing stored, anything nonzero hides below floor


def _combine_mul_floor(fa, ta, fb, tb):
    # Reliability floor of a product given floors and top bounds.
    candidates = []
    if fa is not None:
        if tb is None:
            return None  # other factor is exactly zero
        candidates.append(fa + tb)
    if fb is not None:
        if ta is None:
            return None
        candidates.append(fb + ta)
    return max(candidates) if candidates else None


@dataclass(frozen=True, eq=False)
class LaurentTail:
    """Finite z-Laurent expansion with TruncatedSeries coefficients."""

    orders: TruncOrders
    m: int
    coeffs: dict  # z index -> TruncatedSeries (nonzero)
    floor: int | None = None

    @staticmethod
    def make(orders: TruncOrders, m: int, coeffs: dict, floor=None) -> "LaurentTail":
        d = {j: s for j, s in coeffs.items() if not s.is_zero}
        if floor is not None:
            d = {j: s for j, s in d.items() if j >= floor}
        return LaurentTail(orders, m, d, floor)

    @staticmethod
    def zero(orders: TruncOrders, m: int = 1) -> "LaurentTail":
        return LaurentTail(orders, m, {}, None)

    @staticmethod
    def one(orders: TruncOrders, m: int = 1) -> "LaurentTail":
        return LaurentTail(orders, m, {0: TruncatedSeries.one(orders, m)}, None)

    @staticmethod
    def from_series(s: TruncatedSeries, power: int = 0) -> "LaurentTail":
        if s.is_zero:
            return LaurentTail.zero(s.orders, s.m)
        return LaurentTail(s.orders, s.m, {power: s}, None)

    @staticmethod
    def from_zpoly(zp: ZPoly, orders: TruncOrders) -> "LaurentTail":
        return LaurentTail(orders, zp.m,
                           {d: TruncatedSeries.const(c, orders)
                            for d, c in zp.coeffs}, None)

    def _check(self, other: "LaurentTail"):
        if self.orders != other.orders or self.m != other.m:
            raise PreconditionError("mismatched tails")

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, j: int) -> TruncatedSeries:
        return self.coeffs.get(j, TruncatedSeries.zero(self.orders, self.m))

    def top(self) -> int | None:
        return max(self.coeffs) if self.coeffs else None

    def __add__(self, other: "LaurentTail") -> "LaurentTail":
        self._check(other)
        if self.floor is None:
            floor = other.floor
        elif other.floor is None:
            floor = self.floor
        else:
            floor = max(self.floor, other.floor)
        d = dict(self.coeffs)
        for j, s in other.coeffs.items():
            cur = d.get(j)
            new = s if cur is None else cur + s
            if new.is_zero:
                d.pop(j, None)
            else:
                d[j] = new
        return LaurentTail.make(self.orders, self.m, d, floor)

    def __neg__(self) -> "LaurentTail":
        return LaurentTail(self.orders, self.m,
                           {j: -s for j, s in self.coeffs.items()}, self.floor)

    def __sub__(self, other: "LaurentTail") -> "LaurentTail":
        return self + (-other)

    def __mul__(self, other: "LaurentTail") -> "LaurentTail":
        self._check(other)
        floor = _combine_mul_floor(
            self.floor, _top_bound(self.coeffs, self.floor),
            other.floor, _top_bound(other.coeffs, other.floor))
        d: dict = {}
        for j1, s1 in self.coeffs.items():
            for j2, s2 in other.coeffs.items():
                j = j1 + j2
                if floor is not None and j < floor:
                    continue
                prod = s1 * s2
                if prod.is_zero:
                    continue
                cur = d.get(j)
                new = prod if cur is None else cur + prod
                if new.is_zero:
                    d.pop(j, None)
                else:
                    d[j] = new
        return LaurentTail.make(self.orders, self.m, d, floor)

    def scale_series(self, s: TruncatedSeries) -> "LaurentTail":
        return LaurentTail.make(self.orders, self.m,
                                {j: c * s for j, c in self.coeffs.items()},
                                self.floor)

    def scale(self, c: Scalar) -> "LaurentTail":
        return LaurentTail.make(self.orders, self.m,
                                {j: s.scale(c) for j, s in self.coeffs.items()},
                                self.floor)

    def zshift(self, n: int) -> "LaurentTail":
        return LaurentTail(self.orders, self.m,
                           {j + n: s for j, s in self.coeffs.items()},
                           None if self.floor is None else self.floor + n)

    def zderiv(self) -> "LaurentTail":
        d: dict = {}
        for j, s in self.coeffs.items():
            if j:
                d[j - 1] = s.scale(Scalar.rational(j, self.m))
        floor = None if self.floor is None else self.floor - 1
        return LaurentTail.make(self.orders, self.m, d, floor)

    def shifted_xdiff(self) -> "LaurentTail":
        """The action of d/dx through the wave prefactor: T -> z*T + dT/dt1."""
        d: dict = {}
        for j, s in self.coeffs.items():
            d[j + 1] = s
        for j, s in self.coeffs.items():
            ds = s.diff(1)
            if ds.is_zero:
                continue
            cur = d.get(j)
            new = ds if cur is None else cur + ds
            if new.is_zero:
                d.pop(j, None)
            else:
                d[j] = new
        # the z-shift consumes one level of depth
        floor = None if self.floor is None else self.floor + 1
        return LaurentTail.make(self.orders, self.m, d, floor)

    def truncate_floor(self, k: int) -> "LaurentTail":
        dropped = any(j < k for j in self.coeffs)
        d = {j: s for j, s in self.coeffs.items() if j >= k}
        if self.floor is None:
            floor = k if dropped else None
        else:
            floor = max(self.floor, k)
        return LaurentTail(self.orders, self.m, d, floor)

    def truncate(self, orders: TruncOrders) -> "LaurentTail":
        """Re-truncate coefficients to shallower t-orders and z depth -K."""
        d = {j: s.truncate(orders) for j, s in self.coeffs.items()}
        out = LaurentTail.make(orders, self.m, d, self.floor)
        return out.truncate_floor(-orders.z_neg_bound)

    def divide_by_monic(self, g: ZPoly, floor_target: int) -> "LaurentTail":
        """Laurent long division by a monic z-polynomial, down to floor_target."""
        if not g.is_monic:
            raise PreconditionError("division requires a monic polynomial")
        dg = g.degree
        floor = floor_target
        if self.floor is not None:
            floor = max(floor, self.floor - dg)
        rem = dict(self.coeffs)
        out: dict = {}
        stopped = False
        while rem:
            j = max(rem)
            c = rem.pop(j)
            if c.is_zero:
                continue
            i = j - dg
            if i < floor:
                stopped = True
                break
            out[i] = c
            for d2, c2 in g.coeffs:
                if d2 == dg:
                    continue  # the leading term was cancelled by construction
                idx = i + d2
                term = c.scale(c2)
                cur = rem.get(idx)
                new = -term if cur is None else cur - term
                if new.is_zero:
                    rem.pop(idx, None)
                else:
                    rem[idx] = new
        if not stopped and self.floor is None:
            return LaurentTail.make(self.orders, self.m, out, None)
        return LaurentTail.make(self.orders, self.m, out, floor)

    def eval_z(self, lam: Scalar) -> TruncatedSeries:
        """Exact evaluation at z = lam; requires a complete tail."""
        if self.floor is not None:
            raise TruncationError("tail is not complete enough for evaluation")
        acc = TruncatedSeries.zero(self.orders, self.m)
        if lam.is_zero:
            if any(j < 0 for j in self.coeffs):
                raise PreconditionError(
                    "wave function not defined at condition point")
            c0 = self.coeffs.get(0)
            return c0 if c0 is not None else acc
        inv = lam.inverse()
        for j, s in self.coeffs.items():
            factor = lam ** j if j >= 0 else inv ** (-j)
            acc = acc + s.scale(factor)
        return acc

    def restrict_to_first(self) -> "LaurentTail":
        return LaurentTail.make(self.orders, self.m,
                                {j: s.restrict_to_first()
                                 for j, s in self.coeffs.items()}, self.floor)

    def equal_from(self, other: "LaurentTail", lo: int) -> bool:
        self._check(other)
        indices = set(self.coeffs) | set(other.coeffs)
        return all(self.coeff(j) == other.coeff(j)
                   for j in indices if j >= lo)

    def equal_total_weight(self, other: "LaurentTail", bound: int) -> bool:
        """Equality on the region t-weight + |negative z power| <= bound.

        This is the meaningful comparison domain when either side descends
        from a truncated series through the Miwa shift, which trades
        t-weight for z-depth one unit at a time.
        """
        self._check(other)
        weight = self.orders.weight
        for j in set(self.coeffs) | set(other.coeffs):
            w_allow = bound - max(0, -j)
            a, b = self.coeff(j), other.coeff(j)
            for e in set(a.terms) | set(b.terms):
                if weight(e) <= w_allow and a.coeff(e) != b.coeff(e):
                    return False
        return True

    def first_nonzero(self):
        """Canonical leading data (z index, exps, Scalar) or None."""
        for j in sorted(self.coeffs, reverse=True):
            item = self.coeffs[j].first_nonzero()
            if item is not None:
                return (j, item[0], item[1])
        return None

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentTail):
            return NotImplemented
        return (self.orders == other.orders and self.m == other.m
                and self.coeffs == other.coeffs and self.floor == other.floor)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for j in sorted(self.coeffs, reverse=True):
            zp = "1" if j == 0 else ("z" if j == 1 else f"z^{j}")
            parts.append(f"({self.coeffs[j]})*{zp}")
        return " + ".join(parts)


def miwa_shift(tau: TruncatedSeries, floor: int | None = None) -> LaurentTail:
    """Expand tau(t - [1/z]) with [1/z] = (1/z, 1/(2 z^2), 1/(3 z^3), ...).

    The result is complete: a weight-w term of tau reaches z-depth at most w,
    so nothing is ever discarded unless a floor is requested.  For an exact
    polynomial tau the output is exact; when tau is the weight-D truncation
    of an infinite series, the z^(-j) coefficient is meaningful only to
    t-weight D - j (compare with LaurentTail.equal_total_weight).
    """
    orders, m = tau.orders, tau.m
    out: dict = {}
    for e, c in tau.terms.items():
        # expand prod_k (t_k - z^(-k)/k)^(e_k)
        partial = {((0,) * orders.t_var_count, 0): c}
        for var, ek in enumerate(e):
            if not ek:
                continue
            k = var + 1
            base = Fraction(-1, k)
            new: dict = {}
            for (pe, pz), pc in partial.items():
                for a in range(ek + 1):
                    factor = Scalar.rational(Fraction(comb(ek, a)) * base ** a, m)
                    e2 = tuple(x + (ek - a if i == var else 0)
                               for i, x in enumerate(pe))
                    key = (e2, pz - k * a)
                    cur = new.get(key)
                    add = pc * factor
                    val = add if cur is None else cur + add
                    if val.is_zero:
                        new.pop(key, None)
                    else:
                        new[key] = val
            partial = new
        for (pe, pz), pc in partial.items():
            cur = out.setdefault(pz, {})
            prev = cur.get(pe)
            val = pc if prev is None else prev + pc
            if val.is_zero:
                cur.pop(pe, None)
            else:
                cur[pe] = val
    coeffs = {j: TruncatedSeries(orders, m, d) for j, d in out.items() if d}
    tail = LaurentTail.make(orders, m, coeffs, None)
    if floor is not None:
        tail = tail.truncate_floor(floor)
    return tail


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """A wave function e^(sum t_k z^k) * num/den with z-independent den.

    den = 1 in normalized mode; a nontrivial den carries transforms whose
    tau vanishes at the origin, for which every identity is checked in
    cross-multiplied form.
    """

    orders: TruncOrders
    m: int
    num: LaurentTail
    den: TruncatedSeries

    @staticmethod
    def vacuum(orders: TruncOrders, m: int = 1) -> "WaveFunction":
        return WaveFunction(orders, m, LaurentTail.one(orders, m),
                            TruncatedSeries.one(orders, m))

    @staticmethod
    def from_tail(tail: LaurentTail) -> "WaveFunction":
        return WaveFunction(tail.orders, tail.m, tail,
                            TruncatedSeries.one(tail.orders, tail.m))

    @property
    def is_normalized(self) -> bool:
        return self.den == TruncatedSeries.one(self.orders, self.m)

    def normalize(self) -> "WaveFunction":
        if self.is_normalized:
            return self
        if self.den.constant_term().is_zero:
            raise PreconditionError(
                "wave denominator is not a unit; base-point shift required")
        tail = self.num.scale_series(self.den.invert())
        return WaveFunction.from_tail(tail)

    def tail(self) -> LaurentTail:
        return self.normalize().num

    def projective_equal(self, other: "WaveFunction", lo: int) -> bool:
        """Equality of num/den as formal quotients on z indices >= lo."""
        left = self.num * LaurentTail.from_series(other.den)
        right = other.num * LaurentTail.from_series(self.den)
        return left.equal_from(right, lo)

    def truncate(self, orders: TruncOrders) -> "WaveFunction":
        return WaveFunction(orders, self.m, self.num.truncate(orders),
                            self.den.truncate(orders))
