from __future__ import annotations


import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from localzeta.coeffs import RatFunc, get_field
from localzeta.lattice_series import Ineq
from localzeta.lemma_verify import (PIECES, assemble_pieces, check_sim, full_difference, parse_region, prepare,
                                    verify_lemma)
from localzeta.padic_geometry import PadicParams
from localzeta.repcoeff import macdonald_model
from localzeta.schwartz import BALL, SHELL, SchwartzFn
from localzeta.zeta import GridSummand

F3 = get_field(3, 1)


def one_minus_t_power(k: int) -> RatFunc:
    base = RatFunc(F3, [F3.one, -F3.one])
    return base ** k if k >= 0 else base.inverse() ** (-k)


def test_check_sim_examples():
    pole = one_minus_t_power(-1)
    assert not check_sim(pole, 1)
    const = RatFunc.const(F3, 5)
    assert check_sim(const, 1) and not check_sim(const, 0)
    assert check_sim(one_minus_t_power(1) * RatFunc.const(F3, 7), 0)
    assert check_sim(RatFunc.zero(F3), 0)


@given(st.integers(-5, 5), st.integers(-4, 6))
def test_check_sim_coherence(k, m):
    f = one_minus_t_power(k) * RatFunc(F3, [F3.one, F3.from_rational(2)])
    exact_level = check_sim(f, m) and not check_sim(f, m - 1)
    assert exact_level == (f.order_at_one() == 1 - m)


def test_parse_region():
    assert parse_region("l >= L", 2) == [Ineq((0, 0, 1), -2)]
    assert parse_region("l <= -L", 2) == [Ineq((0, 0, -1), -2)]
    assert parse_region("n + 2m < 3", 0) == [Ineq((-1, -2, 0), 2)]
    assert parse_region("m == 1", 0) == [Ineq((0, 1, 0), -1), Ineq((0, -1, 0), 1)]
    assert parse_region("l > n", 0) == [Ineq((-1, 0, 1), -1)]
    for bad in ("l", "l >= x", "l >= "):
        with pytest.raises(ValueError):
            parse_region(bad, 1)


def phis(F):
    return {
        "O3": SchwartzFn.lattice_indicator(F, 3),
        "wO": SchwartzFn.box(F, [(BALL, -1), (BALL, 0), (BALL, 0)]),
        "mixed": SchwartzFn.box(F, [(BALL, -1), (SHELL, 0), (BALL, 0)])
        + SchwartzFn.box(F, [(BALL, 0), (BALL, 1), (SHELL, -1)], 2),
    }


@pytest.mark.parametrize("name", ["O3", "wO", "mixed"])
def test_piece_sum_identity(p3z5, name):
    phi = phis(p3z5.field)[name]
    dm = macdonald_model(p3z5)
    a, b, c = assemble_pieces(phi, dm, p3z5)
    assert a + b + c == full_difference(phi, dm, p3z5)


def test_generic_lattice_example_certifies(p3z5):
    rep = verify_lemma(SchwartzFn.lattice_indicator(p3z5.field, 3), macdonald_model(p3z5), p3z5)
    assert rep.overall
    assert rep.t_value == 1 and rep.lemma_statement
    assert not rep.degenerate_branch


def test_negative_control_fails(p3z5):
    rep = verify_lemma(phis(p3z5.field)["mixed"], macdonald_model(p3z5), p3z5)
    assert rep.negative_control_fails
    assert any(p.order < 0 for p in rep.negative_control)


@pytest.mark.parametrize("extra", [1, 2])
def test_larger_threshold_keeps_verdicts(p3z5, extra):
    phi = phis(p3z5.field)["mixed"]
    dm = macdonald_model(p3z5)
    base = verify_lemma(phi, dm, p3z5)
    big = verify_lemma(phi, dm, p3z5, l1=base.l1 + extra)
    assert [p.verdict for p in big.pieces] == [p.verdict for p in base.pieces]
    assert sum((p.closed_form for p in big.pieces), RatFunc.zero(p3z5.field)) == \
        sum((p.closed_form for p in base.pieces), RatFunc.zero(p3z5.field))
    assert any(x.closed_form != y.closed_form for x, y in zip(big.pieces, base.pieces))


def test_threshold_below_locality_rejected(p3z5):
    phi = SchwartzFn.box(p3z5.field, [(SHELL, 0)] * 3)
    with pytest.raises(ValueError):
        prepare(phi, macdonald_model(p3z5), p3z5, l1=0)


def test_non_ternary_rejected(p3z5):
    with pytest.raises(ValueError):
        prepare(SchwartzFn.lattice_indicator(p3z5.field, 2), macdonald_model(p3z5), p3z5)


# Frozen engine output for c = +-1 with the lattice indicator at q = 3: the outer
# pieces keep a simple pole, the middle piece vanishes identically.
@pytest.mark.parametrize("N,c_exp,t_value,statement", [(1, 0, 3, True), (2, 1, 1, False)])
def test_c_squared_one_frozen(N, c_exp, t_value, statement):
    P = PadicParams(3, N, c_exp)
    rep = verify_lemma(SchwartzFn.lattice_indicator(P.field, 3), macdonald_model(P), P)
    assert rep.degenerate_branch
    assert [p.order for p in rep.pieces] == [-1, "inf", -1]
    assert rep.full_order == -1
    assert rep.t_value == t_value
    assert rep.lemma_statement is statement
    assert rep.piece_sum_identity and rep.negative_control_fails
    assert not rep.overall


def test_subpieces_mode(p3z5):
    rep = verify_lemma(SchwartzFn.lattice_indicator(p3z5.field, 3), macdonald_model(p3z5), p3z5, mode="subpieces")
    ids = [c.claim_id for c in rep.subpieces]
    for wanted in ("(4)", "(5)", "(6)", "(7)", "1.C.ii.c", "2.iii.a", "3.B"):
        assert wanted in ids
    assert len(ids) == len(set(ids))
    assert rep.subpieces_pass and rep.overall
    doc = rep.to_json(with_forms=False)
    assert all("closed_form" not in c for c in doc["subpieces"])
    stated = [c for c in rep.subpieces if c.stated_exact_zero]
    assert stated and all(c.is_identically_zero is not None for c in stated)


def test_unknown_mode(p3z5):
    with pytest.raises(ValueError):
        verify_lemma(SchwartzFn.lattice_indicator(p3z5.field, 3), macdonald_model(p3z5), p3z5, mode="all")


@pytest.mark.parametrize("q", [3, 5])
def test_pieces_match_numeric_truncation(q):
    P = PadicParams(q, 5, 1, 2)
    phi = phis(P.field)["mixed"]
    dm = macdonald_model(P)
    st_ = prepare(phi, dm, P)
    L = st_.l1
    ranges = {1: (L, None), 2: (1 - L, L - 1), 3: (None, -L)}
    t0 = 0.5
    for k, rng in ranges.items():
        exact = st_.region_sum(PIECES[k]).eval(t0)
        approx = GridSummand("doubled", phi, dm, P, 0, "diff", rng).partial_sum(40, t0)
        assert abs(approx - exact) < 1e-9, (k, approx, exact)


@settings(max_examples=10, deadline=None)
@given(st.integers(-1, 1), st.integers(-1, 1), st.sampled_from([BALL, SHELL]))
def test_piece_sum_identity_random_boxes(k1, k3, kind):
    P = PadicParams(2, 4, 1, 1)
    F = P.field
    phi = SchwartzFn.box(F, [(BALL, k1), (kind, 0), (BALL, k3)])
    dm = macdonald_model(P)
    assert sum(assemble_pieces(phi, dm, P), RatFunc.zero(F)) == full_difference(phi, dm, P)
