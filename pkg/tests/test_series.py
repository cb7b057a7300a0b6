from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bdsato.errors import PreconditionError
from bdsato.polynomials import Poly, ZPoly
from bdsato.scalars import Scalar, rat
from bdsato.series import (LaurentTail, TruncOrders, TruncatedSeries,
                           WaveFunction, miwa_shift)

from conftest import mk_series, naive_exp, naive_mul, orders, series_to_dict


def test_mul_difference_of_squares():
    od = orders(d=4, m_vars=2)
    a = mk_series({(0,): 1, (1,): 1}, od)
    b = mk_series({(0,): 1, (1,): -1}, od)
    assert a * b == mk_series({(0,): 1, (2,): -1}, od)


def test_mul_truncates_by_weight():
    od = orders(d=3, m_vars=2)
    t2 = TruncatedSeries.time_var(2, od)
    assert (t2 * t2).is_zero  # weight 4 exceeds the bound


def test_mul_matches_naive_convolution():
    od = orders(d=2, m_vars=2)
    a = {(0, 0): Fraction(1), (1, 0): Fraction(1), (2, 0): Fraction(1, 2)}
    b = {(0, 0): Fraction(1), (1, 0): Fraction(-1), (2, 0): Fraction(1, 2)}
    expected = naive_mul(a, b, od.t_weight_bound)
    got = mk_series(a, od) * mk_series(b, od)
    assert series_to_dict(got) == expected
    assert got == TruncatedSeries.one(od)  # expanding by hand gives exactly 1


def test_exp_of_zero():
    od = orders()
    assert TruncatedSeries.zero(od).exp() == TruncatedSeries.one(od)


def test_exp_golden_single_variable():
    od = orders(d=2, m_vars=1)
    got = mk_series({(1,): 2}, od).exp()
    assert got == mk_series({(0,): 1, (1,): 2, (2,): 2}, od)


def test_exp_two_variables_matches_taylor_oracle():
    od = orders(d=2, m_vars=2)
    a = {(1, 0): Fraction(1), (0, 1): Fraction(1)}
    expected = naive_exp(a, 2, od.t_weight_bound)
    got = mk_series(a, od).exp()
    assert series_to_dict(got) == expected
    assert series_to_dict(got) == {(0, 0): Fraction(1), (1, 0): Fraction(1),
                                   (0, 1): Fraction(1), (2, 0): Fraction(1, 2)}


def test_exp_requires_zero_constant_term():
    od = orders()
    with pytest.raises(PreconditionError):
        TruncatedSeries.one(od).exp()


def test_invert_golden_cases():
    od1 = orders(d=3, m_vars=1)
    assert TruncatedSeries.one(od1).invert() == TruncatedSeries.one(od1)
    geom = mk_series({(0,): 1, (1,): -1}, od1).invert()
    assert geom == mk_series({(0,): 1, (1,): 1, (2,): 1, (3,): 1}, od1)


def test_invert_two_variables_checked_by_product():
    od = orders(d=2, m_vars=2)
    a = mk_series({(0, 0): 1, (1, 0): 1, (0, 1): 1}, od)
    inv = a.invert()
    # solve the recurrence by hand: 1 - t1 - t2 + t1^2
    assert inv == mk_series({(0, 0): 1, (1, 0): -1, (0, 1): -1, (2, 0): 1}, od)
    assert a * inv == TruncatedSeries.one(od)


def test_invert_rejects_nonunit():
    od = orders()
    with pytest.raises(PreconditionError, match="non-unit"):
        TruncatedSeries.time_var(1, od).invert()


def _small_series(od, zero_const=False):
    fr = st.fractions(min_value=-3, max_value=3, max_denominator=4)
    exps = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (3, 0)]
    if zero_const:
        exps = exps[1:]
    return st.lists(fr, min_size=len(exps), max_size=len(exps)).map(
        lambda cs: mk_series(dict(zip(exps, cs)), od))


@settings(max_examples=100, deadline=None)
@given(st.tuples(_small_series(orders(d=5, m_vars=2)),
                 _small_series(orders(d=5, m_vars=2)),
                 _small_series(orders(d=5, m_vars=2))))
def test_ring_axioms_sampled(triple):
    a, b, c = triple
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@settings(max_examples=50, deadline=None)
@given(_small_series(orders(d=5, m_vars=2), zero_const=True))
def test_exp_inverse_contract(a):
    od = orders(d=5, m_vars=2)
    assert a.exp() * (-a).exp() == TruncatedSeries.one(od)


def test_miwa_shift_constants_and_first_components():
    od = orders(d=4, m_vars=3, k=6)
    one = TruncatedSeries.one(od)
    assert miwa_shift(one) == LaurentTail.one(od)

    t1 = TruncatedSeries.time_var(1, od)
    got = miwa_shift(t1)
    assert got.coeff(0) == t1
    assert got.coeff(-1) == mk_series({(0,): -1}, od)

    # paper-anchored component: [1/z] has second entry 1/(2 z^2)
    t2 = TruncatedSeries.time_var(2, od)
    got2 = miwa_shift(t2)
    assert got2.coeff(0) == t2
    assert got2.coeff(-2) == mk_series({(0,): Fraction(-1, 2)}, od)
    assert got2.coeff(-1).is_zero


def _weighted_degree(s: TruncatedSeries) -> int:
    return max((s.orders.weight(e) for e in s.terms), default=0)


@settings(max_examples=40, deadline=None)
@given(_small_series(orders(d=8, m_vars=2)), _small_series(orders(d=8, m_vars=2)))
def test_miwa_shift_is_ring_morphism_on_polynomials(a, b):
    # the product must itself be an exactly represented polynomial
    if _weighted_degree(a) + _weighted_degree(b) > a.orders.t_weight_bound:
        return
    assert miwa_shift(a * b).equal_from(miwa_shift(a) * miwa_shift(b), -100)


def test_truncation_monotonicity():
    od_big = orders(d=7, m_vars=2, k=8)
    od_small = orders(d=5, m_vars=2, k=6)
    a_big = mk_series({(1, 0): 2, (0, 1): 3, (2, 0): 1}, od_big)
    a_small = mk_series({(1, 0): 2, (0, 1): 3, (2, 0): 1}, od_small)
    assert a_big.exp().truncate(od_small) == a_small.exp()
    u_big = TruncatedSeries.one(od_big) + a_big
    u_small = TruncatedSeries.one(od_small) + a_small
    assert u_big.invert().truncate(od_small) == u_small.invert()
    # Miwa shift of a truncated series: agreement in the total-weight region.
    big_tail = miwa_shift(a_big.exp()).truncate(od_small)
    small_tail = miwa_shift(a_small.exp()).truncate(od_small)
    assert big_tail.equal_total_weight(small_tail, od_small.t_weight_bound)
    # for an exactly polynomial tau the deeper run re-truncates bit-exactly
    big_poly = miwa_shift(a_big.truncate(od_small)).truncate(od_small)
    small_poly = miwa_shift(a_small).truncate(od_small)
    assert big_poly == small_poly


def test_laurent_divide_by_monic_roundtrip():
    od = orders(d=4, m_vars=2, k=5)
    g = ZPoly.from_scalars([rat(-2), rat(1)])  # z - 2
    t1 = LaurentTail.from_series(TruncatedSeries.time_var(1, od), 1)
    num = t1 + LaurentTail.one(od)
    quotient = num.divide_by_monic(g, -od.z_neg_bound)
    assert (quotient * LaurentTail.from_zpoly(g, od)).equal_from(num, -od.z_neg_bound + 1)


def test_laurent_divide_exact_case_is_complete():
    od = orders(d=4, m_vars=2, k=5)
    g = ZPoly.from_scalars([rat(-2), rat(1)])
    num = LaurentTail.from_zpoly(g * g, od)
    q = num.divide_by_monic(g, -od.z_neg_bound)
    assert q.floor is None
    assert q == LaurentTail.from_zpoly(g, od)


def test_laurent_eval_z():
    od = orders(d=4, m_vars=2, k=5)
    tail = LaurentTail.one(od) + LaurentTail.from_series(
        TruncatedSeries.const(rat(-2), od), -1)
    val = tail.eval_z(rat(2))
    assert val == TruncatedSeries.zero(od)  # 1 - 2/2 = 0
    with pytest.raises(PreconditionError):
        tail.eval_z(rat(0))


def test_shifted_xdiff_on_vacuum_tail():
    od = orders(d=4, m_vars=2, k=5)
    one = LaurentTail.one(od)
    stepped = one.shifted_xdiff()
    assert stepped == LaurentTail(od, 1, {1: TruncatedSeries.one(od)}, None)


def test_wave_normalize_and_projective_equality():
    od = orders(d=4, m_vars=2, k=5)
    den = mk_series({(0, 0): 2, (1, 0): 1}, od)
    num = LaurentTail.one(od).scale_series(den)
    w = WaveFunction(od, 1, num, den)
    assert w.normalize().tail() == LaurentTail.one(od)
    assert w.projective_equal(WaveFunction.vacuum(od), -od.z_neg_bound)


def test_wave_normalize_rejects_nonunit_denominator():
    od = orders(d=4, m_vars=2, k=5)
    den = TruncatedSeries.time_var(1, od)
    w = WaveFunction(od, 1, LaurentTail.one(od), den)
    with pytest.raises(PreconditionError):
        w.normalize()
