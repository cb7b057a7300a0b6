"""Shared helpers: independent brute-force oracles and small builders."""
from __future__ import annotations

from fractions import Fraction

import pytest

from bdsato.scalars import Scalar, rat
from bdsato.series import TruncOrders, TruncatedSeries


def orders(d=8, m_vars=4, k=6) -> TruncOrders:
    return TruncOrders(t_weight_bound=d, t_var_count=m_vars, z_neg_bound=k)


def mk_series(data: dict, od: TruncOrders, m: int = 1) -> TruncatedSeries:
    """Build a series from {exps: rational} with padding to the var count."""
    terms = {}
    for exps, value in data.items():
        e = tuple(exps) + (0,) * (od.t_var_count - len(exps))
        terms[e] = Scalar.rational(Fraction(value), m)
    return TruncatedSeries.make(od, m, terms)


# -- independent oracles ---------------------------------------------------

def naive_weight(exps) -> int:
    return sum((i + 1) * e for i, e in enumerate(exps))


def naive_mul(a: dict, b: dict, bound: int) -> dict:
    """Brute-force convolution on {exps: Fraction} dicts, weight-truncated."""
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            if naive_weight(e) > bound:
                continue
            out[e] = out.get(e, Fraction(0)) + c1 * c2
    return {e: c for e, c in out.items() if c}


def naive_exp(a: dict, nvars: int, bound: int) -> dict:
    """Brute-force series exponential via Taylor sums of naive powers."""
    from math import factorial
    out = {(0,) * nvars: Fraction(1)}
    power = {(0,) * nvars: Fraction(1)}
    for n in range(1, bound + 1):
        power = naive_mul(power, a, bound)
        for e, c in power.items():
            out[e] = out.get(e, Fraction(0)) + c / factorial(n)
    return {e: c for e, c in out.items() if c}


def series_to_dict(s: TruncatedSeries) -> dict:
    return {e: c.as_fraction() for e, c in s.terms.items()}


@pytest.fixture
def od_desk() -> TruncOrders:
    return orders()
