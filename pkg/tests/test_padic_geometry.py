from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from localzeta.coeffs import get_field
from localzeta.padic_geometry import CellIndex, PadicParams, cell_measure, delta_exponent, gl2_measure_piecewise


def hnf_coset_count(p: int, m: int) -> int:
    """Left K-cosets in ``K diag(p^m, 1) K`` for prime ``p``.

    Each coset has a unique Hermite representative ``[[p^a, b], [0, p^d]]``
    with ``a + d = m`` and ``0 <= b < p^a``; it lies in the double coset
    exactly when the entries have no common factor ``p``.
    """
    count = 0
    for a in range(m + 1):
        d = m - a
        for b in range(p ** a):
            if math.gcd(math.gcd(p ** a, b), p ** d) == 1:
                count += 1
    return count


def test_delta_examples():
    assert delta_exponent((2, -1)) == 3
    assert delta_exponent((0, 0, 0)) == 0
    assert delta_exponent((5,)) == 5


def test_delta_not_multiplicative():
    g, l = (1, 0), (-1, -1)
    gl = tuple(a + b for a, b in zip(g, l))
    assert delta_exponent(gl) == 1
    assert delta_exponent(g) + delta_exponent(l) == 3


def test_cell_measure_examples():
    assert cell_measure(CellIndex("GL2", m=0), 3) == 1
    assert cell_measure(CellIndex("GL2", m=2), 3) == 12
    assert all(cell_measure(CellIndex("GL1", l=l), 5) == 1 for l in range(-3, 4))


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("m", range(0, 5))
def test_cell_measure_matches_coset_count(p, m):
    assert cell_measure(CellIndex("GL2", m=m), p) == hnf_coset_count(p, m)


@given(st.sampled_from([2, 3, 4, 5, 9]), st.integers(-5, 5), st.integers(-5, 5), st.integers(1, 6),
       st.integers(1, 6))
def test_cell_measure_proportional_to_b_over_a(q, n1, n2, m1, m2):
    assert cell_measure(CellIndex("GL2", n=n1, m=m1), q) == cell_measure(CellIndex("GL2", n=n2, m=m1), q)
    ratio = cell_measure(CellIndex("GL2", m=m1), q) / cell_measure(CellIndex("GL2", m=m2), q)
    assert ratio == Fraction(q) ** (m1 - m2)


def test_measure_piecewise_values():
    F = get_field(3, 1)
    pw = gl2_measure_piecewise(F, 1, 0)
    for m in range(0, 6):
        assert abs(pw.value_numeric((m,), 1.0) - float(cell_measure(CellIndex("GL2", m=m), 3))) < 1e-9
    assert pw.value_numeric((-1,), 1.0) == 0


def test_params_validation():
    with pytest.raises(ValueError):
        PadicParams(6, 1)
    with pytest.raises(ValueError):
        PadicParams(3, 0)
    with pytest.raises(ValueError):
        CellIndex("GL2", m=-1)
    p = PadicParams(3, 4, 5, -1)
    assert (p.c_exp, p.alpha_exp) == (1, 3)
    assert PadicParams(3, 2, 1).c_squared_is_one
