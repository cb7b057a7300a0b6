from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bdsato.errors import PreconditionError
from bdsato.expfun import (Condition, ExpPoly, ExpTail, KernelFunction,
                           SpectralPoint, TFunction, WavePresentation,
                           apply_condition, kernel_basis, wronskian)
from bdsato.polynomials import Poly
from bdsato.scalars import Scalar, rat
from bdsato.series import TruncOrders, TruncatedSeries

from conftest import mk_series, orders


NV = 4


def exp_x(mu, nvars=NV, m=1):
    return ExpPoly.exponential(rat(mu, m), nvars)


def x_poly(nvars=NV, m=1):
    return ExpPoly.from_poly(Poly.variable(0, nvars, m))


def vacuum(od=None, m=1):
    return WavePresentation.vacuum(od or orders(), m)


def test_condition_at_two_gives_plain_exponential():
    kf = apply_condition(Condition.point_eval(rat(2)), vacuum())
    assert kf.x_num == exp_x(2)
    assert kf.x_den == ExpPoly.one(NV)
    assert kf.t_num == TFunction.exponential(rat(2), NV)
    # series check: coefficient of t_k in exp(sum 2^k t_k) is 2^k
    od = orders()
    s = kf.t_num.to_series(od)
    for k in range(1, 5):
        e = tuple(1 if i == k - 1 else 0 for i in range(4))
        assert s.coeff(e) == rat(2 ** k)


def test_condition_first_derivative_at_zero():
    kf = apply_condition(Condition.point_eval(rat(0), 1), vacuum())
    assert kf.x_num == x_poly()
    assert kf.t_num == TFunction.from_poly(Poly.variable(0, NV))


def test_condition_linear_combination():
    c = Condition(((rat(1), (rat(1),)), (rat(-1), (rat(1),))))
    kf = apply_condition(c, vacuum())
    assert kf.x_num == exp_x(1) + exp_x(-1)


def test_condition_linearity_in_weights():
    base = vacuum()
    c1 = Condition(((rat(2), (rat(1), rat(3))),))
    f1 = apply_condition(c1, base)
    a = apply_condition(Condition.point_eval(rat(2), 0), base)
    b = apply_condition(Condition.point_eval(rat(2), 1), base)
    assert f1.x_num == a.x_num + b.x_num.scale(rat(3))
    assert f1.t_num == a.t_num + b.t_num.scale(rat(3))


def test_t_route_restricts_to_x_route():
    base = vacuum()
    for cond in [Condition.point_eval(rat(2)),
                 Condition.point_eval(rat(Fraction(1, 2)), 2),
                 Condition(((rat(1), (rat(1), rat(2))), (rat(-1), (rat(1),)))),
                 Condition.point_eval(rat(0), 3)]:
        kf = apply_condition(cond, base)
        assert kf.t_num.restrict() == kf.x_num
        assert kf.t_den.restrict() == kf.x_den


def test_condition_commutes_with_x_derivative():
    base = vacuum()
    stepped = WavePresentation(base.orders, base.m, base.num.shifted_xdiff(),
                               base.den_t, base.den_z, base.x0)
    for cond in [Condition.point_eval(rat(2), 1),
                 Condition.point_eval(rat(0), 2)]:
        kf = apply_condition(cond, base)
        kf_step = apply_condition(cond, stepped)
        assert kf.x_num.xdiff() == kf_step.x_num
        assert kf.t_num.xdiff() == kf_step.t_num


def test_wronskian_golden_values():
    assert wronskian([exp_x(2)]) == exp_x(2)
    # 2x2 determinant by hand: e^x * (-e^-x) - e^-x * e^x = -2
    got = wronskian([exp_x(1), exp_x(-1)])
    assert got == ExpPoly.const(rat(-2), NV)
    one = ExpPoly.one(NV)
    assert wronskian([one, x_poly()]) == one
    assert wronskian([], one=one) == one


def test_wronskian_alternates_on_repeats():
    f = exp_x(2) + x_poly()
    assert wronskian([f, f]).is_zero


@settings(max_examples=30, deadline=None)
@given(st.fractions(min_value=-2, max_value=2, max_denominator=3),
       st.fractions(min_value=-2, max_value=2, max_denominator=3))
def test_wronskian_multilinearity(a, b):
    f, g, h = exp_x(1), exp_x(-1), x_poly()
    combo = f.scale(rat(a)) + g.scale(rat(b))
    left = wronskian([h, combo])
    right = wronskian([h, f]).scale(rat(a)) + wronskian([h, g]).scale(rat(b))
    assert left == right


def test_tfunction_products_track_multisets():
    e1 = TFunction.exponential(rat(1), NV)
    sq = e1 * e1
    assert sq != TFunction.exponential(rat(2), NV)
    od = orders()
    # exp(xi(t,1))^2 = exp(2 t1 + 2 t2 + ...), not exp(2 t1 + 4 t2 + ...)
    assert sq.to_series(od).coeff((0, 1, 0, 0)) == rat(2)
    assert TFunction.exponential(rat(2), NV).to_series(od).coeff((0, 1, 0, 0)) == rat(4)
    assert sq.restrict() == exp_x(2)


def test_expoly_series_expansion():
    od = orders(d=3, m_vars=2)
    s = exp_x(2, nvars=2).to_x_series(od)
    assert s == mk_series({(0,): 1, (1,): 2, (2,): 2, (3,): Fraction(4, 3)}, od)


def test_vanishing_tests_at_base_points():
    w = wronskian([x_poly()])  # Wr(x) = x vanishes at 0 only
    assert w.vanishes_at(rat(0))
    assert not w.vanishes_at(rat(1))
    s = exp_x(1) - exp_x(-1)   # 2 sinh x
    assert s.vanishes_at(rat(0))
    assert not s.vanishes_at(rat(1))


def test_kernel_basis_single_point():
    basis = kernel_basis(vacuum(), [SpectralPoint(rat(2), 1)], 1)
    assert [kf.x_num for kf in basis] == [exp_x(2)]


def test_kernel_basis_root_branches():
    base = vacuum(m=2)
    basis = kernel_basis(base, [SpectralPoint(rat(1, m=2), 1)], 2)
    assert [kf.x_num for kf in basis] == [exp_x(1, m=2), exp_x(-1, m=2)]


def test_kernel_basis_at_zero_gives_polynomials():
    basis = kernel_basis(vacuum(), [SpectralPoint(rat(0), 2)], 1)
    assert [kf.x_num for kf in basis] == [ExpPoly.one(NV), x_poly()]


def test_kernel_basis_fourth_roots():
    base = vacuum(m=4)
    basis = kernel_basis(base, [SpectralPoint(rat(1, m=4), 1)], 4)
    freqs = [list(kf.x_num.terms)[0] for kf in basis]
    i = Scalar.zeta(4)
    assert freqs == [rat(1, m=4), i, rat(-1, m=4), -i]


def test_kernel_basis_rejects_repeated_points():
    with pytest.raises(PreconditionError, match="degenerate"):
        kernel_basis(vacuum(m=2),
                     [SpectralPoint(rat(1, m=2), 1), SpectralPoint(rat(-1, m=2), 1)], 2)


def test_condition_at_pole_is_rejected():
    od = orders()
    one = TFunction.one(NV)
    num = ExpTail.make(NV, 1, {0: one, -1: TFunction.const(rat(-2), NV)})
    wave = WavePresentation(od, 1, num, one, __import__(
        "bdsato.polynomials", fromlist=["ZPoly"]).ZPoly.one(), rat(0))
    with pytest.raises(PreconditionError, match="not defined"):
        apply_condition(Condition.point_eval(rat(0)), wave)
