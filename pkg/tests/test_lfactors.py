from __future__ import annotations

from fractions import Fraction

import pytest

from localzeta.coeffs import PoleError, RatFunc, get_field
from localzeta.lfactors import (LFactorSpec, const_cv, const_cv_details, dm_normalizer, euler_factor, euler_value,
                                lfactor_bc_pi2, vanish_order_t, zeta_2s)
from localzeta.padic_geometry import PadicParams


def t_poly(F, coeffs):
    return RatFunc(F, [F.coerce(c) for c in coeffs])


def test_euler_factor_examples():
    F = get_field(2, 1)
    assert euler_factor(F, LFactorSpec((1,), 0, 1)) == t_poly(F, [1, -1]).inverse()
    assert euler_value(F, LFactorSpec((F.one,), 3, 0)) == Fraction(8, 7)
    assert zeta_2s(F) == t_poly(F, [1, 0, -1]).inverse()


def test_shift_must_be_half_integral():
    with pytest.raises(ValueError):
        LFactorSpec((1,), Fraction(1, 3))


@pytest.mark.parametrize("q", [2, 3, 5])
def test_dm_normalizer(q):
    F = get_field(q, 1)
    qi = Fraction(1, q)
    assert dm_normalizer(F, 1) == t_poly(F, [1, 0, -qi]).inverse()
    assert dm_normalizer(F, 2) == (t_poly(F, [1, 0, -qi * qi]) * t_poly(F, [1, 0, -qi])).inverse()
    assert dm_normalizer(F, 1).eval_exact(1) == 1 / (1 - qi)


def test_bc_factor_examples():
    assert lfactor_bc_pi2(PadicParams(3, 1, 0)).order_at_one() == -4
    assert lfactor_bc_pi2(PadicParams(3, 4, 1)).order_at_one() == -2
    assert lfactor_bc_pi2(PadicParams(3, 2, 1)).order_at_one() == -2
    F = get_field(2, 2)
    # hand substitution at t = 1/2, c = -1: 4 * (2/3) * (2/3)
    assert lfactor_bc_pi2(PadicParams(2, 2, 1)).eval_exact(Fraction(1, 2)) == Fraction(16, 9)
    assert F is PadicParams(2, 2, 1).field


@pytest.mark.parametrize("N", range(1, 13))
def test_vanish_order_additivity(N):
    for k in range(N):
        P = PadicParams(3, N, k)
        direct = vanish_order_t(P)
        F = P.field
        assembled = zeta_2s(F).order_at_one() - lfactor_bc_pi2(P).order_at_one()
        assert direct == assembled
        assert direct == (3 if k == 0 else 1)


def test_const_cv_hand_composition():
    P = PadicParams(4, 1)
    F = P.field
    # L(1)^2 = (4/3)^2, L_E(3/2) = (8/7)^2, L(3) = 64/63, L_E(1/2) = 2^2
    oracle = Fraction(16, 9) * Fraction(64, 49) / (Fraction(64, 63) * 4)
    assert oracle == Fraction(4, 7)
    assert const_cv(P, [1, 1], [1, 1]) == oracle
    br = const_cv_details(P, [1, 1], [1, 1])
    assert br.factors["L(1)"] == Fraction(4, 3) and br.factors["L_E(1/2)"] == 4


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 9])
def test_const_cv_closed_form(q):
    F = get_field(q, 1)
    u = F.u()
    one = F.one
    qi = F.from_rational(Fraction(1, q))
    expected = ((one - qi ** 3) * (one - u) ** 2) / ((one - qi) ** 2 * (one - u ** 3) ** 2)
    assert const_cv(PadicParams(q, 1), [1, 1], [1, 1]) == expected


def test_const_cv_pole_is_named():
    P = PadicParams(4, 1)
    # 1 - 2 * 4^{-1/2} = 0 makes L_E(1/2) infinite
    with pytest.raises(PoleError, match="L_E\\(1/2\\)"):
        const_cv(P, [2, 1], [1, 1])


@pytest.mark.parametrize("shift", [Fraction(1, 2), 1, Fraction(3, 2), 2])
def test_no_pole_at_one_for_unit_parameters(shift):
    F = get_field(3, 5)
    for k in range(5):
        f = euler_factor(F, LFactorSpec((F.zeta(k),), shift, 1))
        assert f.order_at_one() == 0
    assert euler_factor(F, LFactorSpec((F.one,), 0, 1)).order_at_one() == -1
