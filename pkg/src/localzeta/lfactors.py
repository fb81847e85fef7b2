"""Local Euler factors as rational functions of ``t = q^{-s}``.

All places here are split, so the quadratic character is trivial and every
factor over ``E_v = F_v x F_v`` is a product of two factors over ``F_v``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .coeffs import CoeffElement, CoeffField, PoleError, RatFunc
from .padic_geometry import PadicParams


@dataclass(frozen=True)
class LFactorSpec:
    """``prod_i 1/(1 - a_i q^{-shift} t^{power})``, i.e. ``L(power*s + shift, {a_i})``."""

    satake: tuple
    shift: Fraction = Fraction(0)
    power: int = 1
    name: str = ""

    def __post_init__(self):
        sh = Fraction(self.shift)
        if (2 * sh).denominator != 1:
            raise ValueError(f"shift must be a multiple of 1/2, got {sh}")
        if self.power < 0:
            raise ValueError("t power must be >= 0")
        object.__setattr__(self, "shift", sh)
        object.__setattr__(self, "satake", tuple(self.satake))


def _q_power(F: CoeffField, shift: Fraction) -> CoeffElement:
    """``q^{-shift}`` for half-integral ``shift``."""
    return F.mono(0, int(2 * shift))


def euler_factor(F: CoeffField, spec: LFactorSpec) -> RatFunc:
    out = RatFunc.one(F)
    qs = _q_power(F, spec.shift)
    for a in spec.satake:
        beta = F.coerce(a) * qs
        if spec.power == 0:
            d = F.one - beta
            if d.is_zero():
                raise PoleError(f"{spec.name or 'L'}: Satake parameter {a} gives a pole")
            out = out * RatFunc.const(F, d.inverse())
        else:
            out = out * RatFunc.inv_binomial(F, beta, spec.power)
    return out


def euler_value(F: CoeffField, spec: LFactorSpec) -> CoeffElement:
    """Value at ``s = 0`` of ``L(power*s + shift)``, raising a named error at a pole."""
    const = LFactorSpec(spec.satake, spec.shift, 0, spec.name)
    try:
        return euler_factor(F, const).eval_exact(F.zero)
    except PoleError:
        raise PoleError(f"pole in {spec.name or 'L-factor'}") from None


def zeta_2s(F: CoeffField) -> RatFunc:
    """``zeta_v(2s) = 1/(1 - t^2)``."""
    return euler_factor(F, LFactorSpec((F.one,), 0, 2, "zeta(2s)"))


def dm_normalizer(F: CoeffField, m: int, n_dim: int = 0) -> RatFunc:
    """``prod_{r=0}^{m-1} L(2s + m - r)`` with trivial character; ``n_dim`` only enters
    through the character power and is irrelevant at split places."""
    if m < 0:
        raise ValueError("m must be >= 0")
    out = RatFunc.one(F)
    for r in range(m):
        out = out * euler_factor(F, LFactorSpec((F.one,), m - r, 2))
    return out


def doubling_satake(twist: CoeffElement, satake: Sequence[CoeffElement]) -> list[CoeffElement]:
    """Satake parameters of ``pi (x) gamma_W`` over ``E_v = F_v x F_v``: ``{tau a} u {(tau a)^{-1}}``."""
    out = [twist * a for a in satake]
    return out + [x.inverse() for x in out]


def bc_pi2_satake(params: PadicParams) -> list[CoeffElement]:
    """``{1, 1, c, c^{-1}}``."""
    F = params.field
    c = params.c
    return [F.one, F.one, c, c.inverse()]


def lfactor_bc_pi2(params: PadicParams) -> RatFunc:
    """``L_E(s, BC(pi_2) (x) gamma) = (1-t)^{-2} (1-ct)^{-1} (1-c^{-1}t)^{-1}``."""
    return euler_factor(params.field, LFactorSpec(tuple(bc_pi2_satake(params)), 0, 1, "L_E(s)"))


def regularizer(params: PadicParams) -> RatFunc:
    """``zeta_v(2s) / L_E(s, BC(pi_2) (x) gamma)``."""
    return zeta_2s(params.field) / lfactor_bc_pi2(params)


def vanish_order_t(params: PadicParams) -> int:
    """Order at ``s = 0`` of the regularizer."""
    return int(regularizer(params).order_at_one())


def unramified_sigma_satake(params: PadicParams) -> list[CoeffElement]:
    """Satake parameters of ``BC(sigma)`` at a split place: ``{alpha, alpha^{-1}}``."""
    a = params.alpha
    return [a, a.inverse()]


def unramified_gamma_satake(params: PadicParams) -> list[CoeffElement]:
    """Parameters of ``gamma`` at a split place: ``{c, c^{-1}}``."""
    c = params.c
    return [c, c.inverse()]


def _twisted(sigma: Sequence, gamma: Sequence, k: int) -> list:
    """Pointwise ``sigma_i * gamma_i^k`` over the two factors of ``E_v``."""
    if len(sigma) != len(gamma):
        raise ValueError("sigma and gamma Satake lists must have the same length")
    return [s * g ** k for s, g in zip(sigma, gamma)]


@dataclass
class ConstantBreakdown:
    value: CoeffElement
    factors: dict = field(default_factory=dict)


def const_cv_details(params: PadicParams, sigma_satake: Sequence, gamma_satake: Sequence) -> ConstantBreakdown:
    """``L(1)^2 L_E(3/2, BC(sigma) gamma^3) / (L(3) L_E(1/2, BC(sigma) gamma))``."""
    F = params.field
    sigma = [F.coerce(x) for x in sigma_satake]
    gamma = [F.coerce(x) for x in gamma_satake]
    specs = {
        "L(1)": LFactorSpec((F.one,), 1, 0, "L(1)"),
        "L(3)": LFactorSpec((F.one,), 3, 0, "L(3)"),
        "L_E(3/2)": LFactorSpec(tuple(_twisted(sigma, gamma, 3)), Fraction(3, 2), 0, "L_E(3/2)"),
        "L_E(1/2)": LFactorSpec(tuple(_twisted(sigma, gamma, 1)), Fraction(1, 2), 0, "L_E(1/2)"),
    }
    vals = {k: euler_value(F, s) for k, s in specs.items()}
    value = vals["L(1)"] ** 2 * vals["L_E(3/2)"] / (vals["L(3)"] * vals["L_E(1/2)"])
    return ConstantBreakdown(value, vals)


def const_cv(params: PadicParams, sigma_satake: Sequence, gamma_satake: Sequence) -> CoeffElement:
    return const_cv_details(params, sigma_satake, gamma_satake).value
