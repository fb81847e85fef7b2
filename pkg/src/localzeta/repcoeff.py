"""Matrix coefficients on Cartan cells.

* the split Weil representation on functions on ``F^d``:
  ``B(diag(w^{e_1},...,w^{e_d})) = c^{sum e} q^{-sum e / 2} <phi(w^e .), phi>``;
* the spherical coefficient ``d_m`` of the unramified principal series with
  Satake parameters ``(c, c^{-1})`` (Macdonald's formula);
* the characters of GL(1): ``l -> alpha^l``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .coeffs import CoeffElement, CoeffField
from .lattice_series import Ineq, Piecewise, Term, affine
from .padic_geometry import PadicParams
from .schwartz import SchwartzFn, locality_threshold, pair_piecewise, sb_scale_pair


# ---------------------------------------------------------------------------
# Weil representation


def weil_coeff(phi: SchwartzFn, e: Sequence[int], params: PadicParams) -> CoeffElement:
    """``c^{sum e} u^{sum e} * sb_scale_pair(phi, phi, e)``."""
    F = phi.F
    s = sum(e)
    return (params.c ** s) * F.mono(0, s) * sb_scale_pair(phi, phi, e)


def weil_coeff_asym(phi: SchwartzFn, n: int, m: int, l: int, params: PadicParams,
                    l1: int | None = None) -> CoeffElement:
    """Stabilised branch of ``c_{n,m,l}`` for ``|l| >= l1``.

    For ``l >= l1`` the third coordinate of the scaled factor is set to 0;
    for ``l <= -l1`` the third coordinate of the unscaled factor is set to 0
    and the volume factor ``q^{l}`` is pulled out.
    """
    l1 = locality_threshold(phi) if l1 is None else l1
    if abs(l) < l1:
        raise ValueError(f"|l| = {abs(l)} is below the stabilisation threshold {l1}")
    F = phi.F
    s = 2 * n + m + l
    pref = (params.c ** s) * F.mono(0, s)
    if l >= l1:
        pair = sb_scale_pair(phi, phi, (n + m, n, 0), (2,))
    else:
        pair = F.from_rational(Fraction(F.q) ** l) * sb_scale_pair(phi, phi, (n + m, n, 0), (), (2,))
    return pref * pair


def weil_piecewise(phi: SchwartzFn, forms: Sequence[tuple], params: PadicParams, nvars: int) -> Piecewise:
    """Weil coefficient at ``diag(w^{forms(x)})`` as a piecewise function of ``x``."""
    F = phi.F
    total_form = (tuple(sum(f[0][i] for f in forms) for i in range(nvars)), sum(f[1] for f in forms))
    twist = Piecewise.geometric(F, nvars, total_form, (params.c_exp, 1, 0))
    return twist * pair_piecewise(phi, phi, forms, nvars)


# ---------------------------------------------------------------------------
# spherical coefficient


@dataclass(frozen=True)
class SphericalModel:
    """``d_m = u^m (c1 c^m + c2 c^{-m})``, or ``u^m c^m (c1 + c2 m)`` when degenerate.

    ``source`` records where the constants came from.
    """

    c: CoeffElement
    c_exp: int
    c1: CoeffElement
    c2: CoeffElement
    degenerate: bool = False
    source: str = "explicit"

    @property
    def F(self) -> CoeffField:
        return self.c.F

    def dm(self, m: int) -> CoeffElement:
        if m < 0:
            raise ValueError("d_m is defined for m >= 0")
        F = self.F
        um = F.mono(0, m)
        if self.degenerate:
            return um * (self.c ** m) * (self.c1 + self.c2 * m)
        return um * (self.c1 * self.c ** m + self.c2 * self.c ** (-m))

    def piecewise(self, nvars: int, m_var: int) -> Piecewise:
        """``d_m`` on the region ``m >= 0`` as a piecewise function."""
        F = self.F
        e = [0] * nvars
        e[m_var] = 1
        region = [Ineq(tuple(e), 0)]
        form = affine(e)
        if self.degenerate:
            base = Piecewise.geometric(F, nvars, form, (self.c_exp, 1, 0), scalar=self.c1, region=region)
            powers = tuple(e)
            lin = Piecewise.geometric(F, nvars, form, (self.c_exp, 1, 0), scalar=self.c2, region=region)
            lin = Piecewise(F, nvars, [(reg, [Term(t.coef, t.bases, powers, t.conv) for t in ts])
                                       for reg, ts in lin.pieces])
            return base + lin
        return (Piecewise.geometric(F, nvars, form, (self.c_exp, 1, 0), scalar=self.c1, region=region)
                + Piecewise.geometric(F, nvars, form, (-self.c_exp, 1, 0), scalar=self.c2, region=region))

    def describe(self) -> dict:
        return {
            "source": self.source,
            "degenerate_branch": self.degenerate,
            "c1": self.c1.to_json(),
            "c2": self.c2.to_json(),
        }


def macdonald_model(params: PadicParams) -> SphericalModel:
    """Spherical function of the unramified principal series with Satake parameters ``(c, c^{-1})``.

    For ``c^2 != 1``: ``c1 = A/(1 + 1/q)``, ``c2 = A'/(1 + 1/q)`` with
    ``A = (1 - c^{-2}/q)/(1 - c^{-2})`` and ``A'`` the same with ``c -> c^{-1}``.
    For ``c^2 = 1``: ``d_m = u^m c^m (1 + m (1 - 1/q)/(1 + 1/q))``.
    """
    F = params.field
    q = F.q
    c = params.c
    norm = F.from_rational(1 + Fraction(1, q)).inverse()
    if params.c_squared_is_one:
        kappa = F.from_rational((1 - Fraction(1, q)) / (1 + Fraction(1, q)))
        return SphericalModel(c, params.c_exp, F.one, kappa, True, "macdonald")
    qinv = F.from_rational(Fraction(1, q))
    cm2 = c ** -2
    c2 = c ** 2
    A = (F.one - qinv * cm2) / (F.one - cm2)
    Ab = (F.one - qinv * c2) / (F.one - c2)
    return SphericalModel(c, params.c_exp, A * norm, Ab * norm, False, "macdonald")


def explicit_model(params: PadicParams, c1, c2, degenerate: bool = False) -> SphericalModel:
    F = params.field
    return SphericalModel(params.c, params.c_exp, F.coerce(c1), F.coerce(c2), degenerate, "explicit")


def macdonald_dm(params: PadicParams, m: int) -> CoeffElement:
    return macdonald_model(params).dm(m)


def gl2_coeff(model: SphericalModel, n: int, m: int) -> CoeffElement:
    """Spherical coefficient at ``diag(w^{n+m}, w^n)``; the centre acts trivially."""
    return model.dm(m)


# ---------------------------------------------------------------------------
# characters of GL(1)


def char_coeff(params: PadicParams, which: str, l: int) -> CoeffElement:
    """``alpha^l`` (the two characters agree on powers of the uniformizer)."""
    if which not in ("sigma", "mu"):
        raise ValueError(f"unknown character {which!r}")
    return params.alpha ** l


def char_piecewise(params: PadicParams, nvars: int, l_var: int) -> Piecewise:
    e = [0] * nvars
    e[l_var] = 1
    return Piecewise.geometric(params.field, nvars, affine(e), (params.alpha_exp, 0, 0))
