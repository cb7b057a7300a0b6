from fractions import Fraction

import pytest

from bdsato.errors import PreconditionError
from bdsato.polynomials import Poly, ZPoly
from bdsato.scalars import Scalar, rat


def P(data, nvars=2, m=1):
    return Poly.make(nvars, m, {tuple(e): rat(Fraction(c), m) for e, c in data.items()})


def test_poly_arithmetic_and_diff():
    x = Poly.variable(0, 2)
    one = Poly.const(rat(1), 2)
    p = (x + one) * (x - one)
    assert p == P({(2, 0): 1, (0, 0): -1})
    assert p.diff(0) == P({(1, 0): 2})
    assert p.diff(1).is_zero


def test_poly_translate_and_eval():
    x = Poly.variable(0, 2)
    p = x * x
    shifted = p.translate_first(rat(1))
    assert shifted == P({(2, 0): 1, (1, 0): 2, (0, 0): 1})
    assert p.eval_first(rat(Fraction(3, 2))) == rat(Fraction(9, 4))


def test_zpoly_divmod_and_divides():
    g = ZPoly.from_scalars([rat(-2), rat(1)])        # z - 2
    h = ZPoly.from_scalars([rat(0), rat(-2), rat(1)])  # z^2 - 2z = z(z-2)
    q, r = h.divmod(g)
    assert r.is_zero and q == ZPoly.from_scalars([rat(0), rat(1)])
    assert g.divides(h)
    assert not ZPoly.from_scalars([rat(1), rat(1)]).divides(h)


def test_zpoly_compose_z_power_and_eval():
    h = ZPoly.from_scalars([rat(-1), rat(1)])  # w - 1
    hn = h.compose_z_power(2)
    assert hn == ZPoly.from_scalars([rat(-1), rat(0), rat(1)])
    assert hn.eval(rat(3)) == rat(8)


def test_zpoly_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        ZPoly.one().divmod(ZPoly.zero())
