"""Local zeta integrals on split unitary groups as exact rational functions of ``t = q^{-s}``.

The integrals are Cartan-cell sums

* GL(1):  ``sum_l alpha^l B(w^l) Delta^{s+shift}``,
* GL(2):  ``sum_{n, m>=0} vol(m) B(diag(w^{n+m}, w^n)) d_m Delta^{s+shift}``,
* the doubled integral over GL(2) x GL(1) whose height only sees the GL(2)
  variable,

with ``B`` the Weil coefficient and ``Delta = t^{sum |a_i|}`` the doubling height.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .coeffs import CoeffElement, RatFunc
from .lattice_series import ConvergenceRegion, Piecewise, affine, form_ge, form_le
from .lfactors import (LFactorSpec, const_cv_details, doubling_satake, dm_normalizer, euler_factor,
                       euler_value, regularizer)
from .padic_geometry import PadicParams, gl2_measure_piecewise
from .repcoeff import SphericalModel, char_piecewise, macdonald_model, weil_piecewise
from .schwartz import BALL, SCALE, SchwartzFn, pair_1d


class DivergentRegularization(ValueError):
    pass


@dataclass
class ZetaResult:
    closed_form: RatFunc
    convergence: ConvergenceRegion
    normalization_applied: dict = field(default_factory=dict)
    kind: str = ""
    summand: "GridSummand | None" = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "closed_form": self.closed_form.to_json(),
            "convergence": self.convergence.to_json(),
            "order_at_one": _order_json(self.closed_form),
            "normalization_applied": self.normalization_applied,
        }


def _order_json(f: RatFunc):
    k = f.order_at_one()
    return "inf" if k == float("inf") else int(k)


def height_piecewise(F, nvars: int, forms: Sequence[tuple], shift=0) -> Piecewise:
    """``Delta^{s+shift} = (q^{-shift} t)^{sum |form_i(x)|}`` split by the signs of the forms."""
    sh = Fraction(shift)
    if (2 * sh).denominator != 1:
        raise ValueError("height shift must be a multiple of 1/2")
    base = (0, int(2 * sh), 1)
    out = Piecewise(F, nvars, [])
    for signs in product((1, -1), repeat=len(forms)):
        region = []
        coeffs = [0] * nvars
        const = 0
        for sg, (fc, f0) in zip(signs, forms):
            region.append(form_ge((fc, f0), 0) if sg > 0 else form_le((fc, f0), -1))
            coeffs = [a + sg * b for a, b in zip(coeffs, fc)]
            const += sg * f0
        out = out + Piecewise.geometric(F, nvars, (tuple(coeffs), const), base, region=region)
    return out.restrict(())


def _result(pw: Piecewise, kind: str, summand, **norm) -> ZetaResult:
    f = pw.total()
    return ZetaResult(f, f.region, dict(norm), kind, summand)


# ---------------------------------------------------------------------------
# integrals


def _check_dim(phi: SchwartzFn, d: int, what: str) -> None:
    if phi.d != d:
        raise ValueError(f"{what} needs a Schwartz function on F^{d}, got dimension {phi.d}")


def zeta_gl1_piecewise(phi: SchwartzFn, params: PadicParams, s_shift=0) -> Piecewise:
    _check_dim(phi, 1, "zeta_gl1")
    F = params.field
    lf = affine((1,))
    return (weil_piecewise(phi, [lf], params, 1) * char_piecewise(params, 1, 0)
            * height_piecewise(F, 1, [lf], s_shift))


def zeta_gl1(phi: SchwartzFn, params: PadicParams, s_shift=0) -> ZetaResult:
    """``sum_l alpha^l B_phi(w^l) Delta(w^l)^{s+shift}``."""
    pw = zeta_gl1_piecewise(phi, params, s_shift)
    return _result(pw, "gl1", GridSummand("gl1", phi, None, params, s_shift), s_shift=str(Fraction(s_shift)))


def _gl2_forms(nvars: int) -> list[tuple]:
    e_nm = [0] * nvars
    e_n = [0] * nvars
    e_nm[0] = e_nm[1] = 1
    e_n[0] = 1
    return [affine(e_nm), affine(e_n)]


def zeta_gl2_piecewise(phi: SchwartzFn, dm: SphericalModel, params: PadicParams, s_shift=0) -> Piecewise:
    _check_dim(phi, 2, "zeta_gl2")
    F = params.field
    forms = _gl2_forms(2)
    return (gl2_measure_piecewise(F, 2, 1) * dm.piecewise(2, 1) * weil_piecewise(phi, forms, params, 2)
            * height_piecewise(F, 2, forms, s_shift))


def zeta_gl2(phi: SchwartzFn, dm: SphericalModel, params: PadicParams, s_shift=0) -> ZetaResult:
    """``sum_{n, m} vol(m) B_phi(diag(w^{n+m}, w^n)) d_m Delta^{s+shift}`` over ``(n, m)``."""
    pw = zeta_gl2_piecewise(phi, dm, params, s_shift)
    return _result(pw, "gl2", GridSummand("gl2", phi, dm, params, s_shift),
                   s_shift=str(Fraction(s_shift)), spherical=dm.describe())


def doubled_piecewise(phi3: SchwartzFn, dm: SphericalModel, params: PadicParams, s_shift=0,
                      weight: str = "g") -> Piecewise:
    """Summand over ``(n, m, l)`` of the doubled integral.

    ``weight="g"`` uses ``Delta(g)^s = t^{|n+m|+|n|}``; ``weight="gl"`` uses
    ``Delta(gl)^s = t^{|n+m+l|+|n+l|}``.
    """
    _check_dim(phi3, 3, "doubled_Iv")
    F = params.field
    forms = _gl2_forms(3) + [affine((0, 0, 1))]
    if weight == "g":
        hforms = forms[:2]
    elif weight == "gl":
        hforms = [affine((1, 1, 1)), affine((1, 0, 1))]
    else:
        raise ValueError(f"unknown height weight {weight!r}")
    return (gl2_measure_piecewise(F, 3, 1) * dm.piecewise(3, 1) * char_piecewise(params, 3, 2)
            * weil_piecewise(phi3, forms, params, 3) * height_piecewise(F, 3, hforms, s_shift))


def doubled_Iv(phi3: SchwartzFn, dm: SphericalModel, params: PadicParams, s_shift=0) -> ZetaResult:
    """``sum_{n,m,l} alpha^l vol(m) d_m B_phi(diag(w^{n+m}, w^n), w^l) Delta(g)^{s+shift}``."""
    pw = doubled_piecewise(phi3, dm, params, s_shift)
    return _result(pw, "doubled", GridSummand("doubled", phi3, dm, params, s_shift),
                   s_shift=str(Fraction(s_shift)), height="Delta(g)", spherical=dm.describe())


def split_product(phi3: SchwartzFn) -> tuple[SchwartzFn, SchwartzFn] | None:
    """Write ``phi3 = phi12 (x) phi3'`` with a single-box last factor, if possible."""
    F = phi3.F
    if not phi3.terms:
        return None
    lasts = {t.coords[2] for t in phi3.terms}
    if len(lasts) != 1:
        return None
    last = lasts.pop()
    from .schwartz import BoxTerm
    phi12 = SchwartzFn(F, 2, [BoxTerm(t.coords[:2], t.coeff) for t in phi3.terms])
    return phi12, SchwartzFn.box(F, [last])


def factorization_check(phi12: SchwartzFn, phi1: SchwartzFn, dm: SphericalModel, params: PadicParams,
                        s_shift=0) -> dict:
    """Compare the doubled integral of ``phi12 (x) phi1`` with ``Z_gl2(s) * Z_gl1(0)``."""
    phi3 = phi12.tensor(phi1)
    iv = doubled_Iv(phi3, dm, params, s_shift)
    z2 = zeta_gl2(phi12, dm, params, s_shift)
    z1 = zeta_gl1(phi1, params, 0)
    z1_at_0 = z1.closed_form.value_at_one()
    prod_ = z2.closed_form * RatFunc.const(params.field, z1_at_0)
    return {"doubled": iv, "gl2": z2, "gl1": z1, "gl1_at_0": z1_at_0, "product": prod_,
            "equal": iv.closed_form == prod_}


# ---------------------------------------------------------------------------
# unramified identities


def unramified_quotient(params: PadicParams, m: int) -> RatFunc:
    """``L(s + 1/2, pi (x) gamma_W) / d_m(s)`` for the spherical data of rank ``m``."""
    F = params.field
    c = params.c
    if m == 1:
        sat = doubling_satake(c, [params.alpha])
    elif m == 2:
        sat = doubling_satake(c, [c, c.inverse()])
    else:
        raise ValueError("unramified identity is implemented for m in {1, 2}")
    return euler_factor(F, LFactorSpec(tuple(sat), Fraction(1, 2), 1, "L(s+1/2)")) / dm_normalizer(F, m)


# Delta offset making the Siegel-Weil section match the standard normalization
UNRAMIFIED_SHIFT = {1: Fraction(0), 2: Fraction(1, 2)}


def unramified_zeta(params: PadicParams, m: int, dm: SphericalModel | None = None) -> ZetaResult:
    F = params.field
    if m == 1:
        return zeta_gl1(SchwartzFn.lattice_indicator(F, 1), params, UNRAMIFIED_SHIFT[1])
    if m == 2:
        dm = dm or macdonald_model(params)
        return zeta_gl2(SchwartzFn.lattice_indicator(F, 2), dm, params, UNRAMIFIED_SHIFT[2])
    raise ValueError("unramified identity is implemented for m in {1, 2}")


def check_unramified(params: PadicParams, m: int) -> dict:
    z = unramified_zeta(params, m)
    expected = unramified_quotient(params, m)
    return {"zeta": z, "expected": expected, "equal": z.closed_form == expected}


# ---------------------------------------------------------------------------
# regularized local period


@dataclass
class PeriodResult:
    value: CoeffElement | None
    order: int | float
    cv: CoeffElement
    inner_normalization: CoeffElement
    regularized: RatFunc
    integral: ZetaResult
    height: str = "Delta(g)"
    error: str | None = None

    def to_json(self) -> dict:
        return {
            "value": None if self.value is None else self.value.to_json(),
            "order_at_one": "inf" if self.order == float("inf") else int(self.order),
            "c_v": self.cv.to_json(),
            "inner_normalization": self.inner_normalization.to_json(),
            "regularized": self.regularized.to_json(),
            "height": self.height,
            "error": self.error,
        }


def local_period_details(phi3: SchwartzFn, dm: SphericalModel, params: PadicParams,
                         sigma_satake: Sequence, gamma_satake: Sequence, strict: bool = True) -> PeriodResult:
    """``c_v * Z^#-normalization * lim_{s->0} zeta(2s)/L_E(s) * I(s)``.

    The inner GL(1) integral is the Rallis inner product at ``s = 1`` of the
    theta lift of ``sigma``; its normalization is ``L(3) / L_E(3/2, BC(sigma) gamma^3)``.
    """
    F = params.field
    cvd = const_cv_details(params, sigma_satake, gamma_satake)
    inner = cvd.factors["L(3)"] / cvd.factors["L_E(3/2)"]
    iv = doubled_Iv(phi3, dm, params, 0)
    reg = regularizer(params) * iv.closed_form
    order = reg.order_at_one()
    if order < 0:
        if strict:
            raise DivergentRegularization(
                f"divergent regularization: regularized integral has a pole of order {-int(order)} at s = 0")
        return PeriodResult(None, order, cvd.value, inner, reg, iv, error="divergent regularization")
    lead = F.zero if order > 0 else reg.lead_at_one()
    return PeriodResult(cvd.value * inner * lead, order, cvd.value, inner, reg, iv)


def local_period(phi3, dm, params, sigma_satake, gamma_satake) -> CoeffElement:
    return local_period_details(phi3, dm, params, sigma_satake, gamma_satake).value


def local_period_product_path(phi12: SchwartzFn, phi1: SchwartzFn, dm: SphericalModel, params: PadicParams,
                              sigma_satake: Sequence, gamma_satake: Sequence) -> CoeffElement:
    """Same limit assembled as ``L(1)^2/L_E(1/2, BC(sigma) gamma) * Z_gl1(0) * lim zeta/L_E * Z_gl2(s)``."""
    F = params.field
    cvd = const_cv_details(params, sigma_satake, gamma_satake)
    pref = cvd.factors["L(1)"] ** 2 / cvd.factors["L_E(1/2)"]
    z1 = zeta_gl1(phi1, params, 0).closed_form.value_at_one()
    reg = regularizer(params) * zeta_gl2(phi12, dm, params, 0).closed_form
    k = reg.order_at_one()
    if k < 0:
        raise DivergentRegularization("divergent regularization")
    return pref * z1 * (F.zero if k > 0 else reg.lead_at_one())


def unramified_period(params: PadicParams) -> PeriodResult:
    from .lfactors import unramified_gamma_satake, unramified_sigma_satake
    F = params.field
    return local_period_details(SchwartzFn.lattice_indicator(F, 3), macdonald_model(params), params,
                                unramified_sigma_satake(params), unramified_gamma_satake(params))


# ---------------------------------------------------------------------------
# numeric truncation oracle


def _pair_table(phi: SchwartzFn, coord: int, lo: int, hi: int) -> np.ndarray:
    """Numeric 1-d box pairing tables, shape ``(terms, terms, hi-lo+1)``."""
    q = phi.F.q
    T = len(phi.terms)
    out = np.zeros((T, T, hi - lo + 1))
    for i, a in enumerate(phi.terms):
        for j, b in enumerate(phi.terms):
            for e in range(lo, hi + 1):
                out[i, j, e - lo] = float(pair_1d(a.coords[coord], b.coords[coord], e, SCALE, q))
    return out


@dataclass
class GridSummand:
    """Direct numeric evaluation of a zeta summand on a finite window.

    Independent of the exact summation engine: the Weil pairing is a
    product of 1-d intersection volumes, ``d_m`` comes straight from the
    spherical model, and heights are evaluated pointwise.
    """

    kind: str
    phi: SchwartzFn
    dm: SphericalModel | None
    params: PadicParams
    s_shift: object = 0
    weight: str = "g"
    l_range: tuple | None = None  # inclusive bounds on l, None for unbounded

    def partial_sum(self, R: int, t0: complex) -> complex:
        p = self.params
        q = p.q
        c = p.c.embed()
        alpha = p.alpha.embed()
        u = q ** -0.5
        hscale = q ** (-float(Fraction(self.s_shift)))
        coeffs = np.array([[a.coeff.embed() * np.conj(b.coeff.embed()) for b in self.phi.terms]
                           for a in self.phi.terms])
        r = np.arange(-R, R + 1)
        if self.kind == "gl1":
            pair = np.einsum("ij,ije->e", coeffs, _pair_table(self.phi, 0, -R, R))
            terms = (alpha * c * u) ** r * pair * (t0 * hscale) ** np.abs(r)
            return complex(terms.sum())
        ms = np.arange(0, R + 1)
        vol = np.where(ms == 0, 1.0, q ** ms.astype(float) * (1 + 1 / q))
        dmv = np.array([self.dm.dm(int(m)).embed() for m in ms])
        N, M = np.meshgrid(r, ms, indexing="ij")
        t1 = _pair_table(self.phi, 0, -R, 2 * R)  # exponent n + m
        t2 = _pair_table(self.phi, 1, -R, R)
        idx1 = (N + M) + R
        idx2 = N + R
        if self.kind == "gl2":
            pair = np.einsum("ij,ijnm->nm", coeffs, t1[:, :, idx1] * t2[:, :, idx2])
            h = np.abs(N + M) + np.abs(N)
            terms = vol[None, :] * dmv[None, :] * (c * u) ** (2 * N + M) * pair * (t0 * hscale) ** h
            return complex(terms.sum())
        # doubled: axes (n, m, l)
        t3 = _pair_table(self.phi, 2, -R, R)
        P = np.einsum("ij,ijnm,ijl->nml", coeffs, t1[:, :, idx1] * t2[:, :, idx2], t3)
        L = r
        Nn, Mm, Ll = np.meshgrid(r, ms, L, indexing="ij")
        hg = (t0 * hscale) ** (np.abs(Nn + Mm) + np.abs(Nn))
        hgl = (t0 * hscale) ** (np.abs(Nn + Mm + Ll) + np.abs(Nn + Ll))
        h = {"g": hg, "gl": hgl, "diff": hgl - hg}[self.weight]
        terms = (vol[None, :, None] * dmv[None, :, None] * alpha ** Ll * (c * u) ** (2 * Nn + Mm + Ll)
                 * P * h)
        if self.l_range is not None:
            lo, hi = self.l_range
            keep = np.ones(Ll.shape, dtype=bool)
            if lo is not None:
                keep &= Ll >= lo
            if hi is not None:
                keep &= Ll <= hi
            terms = np.where(keep, terms, 0)
        return complex(terms.sum())


def truncation_table(result: ZetaResult, t0: complex = 0.5, radii: Sequence[int] = (10, 20, 40)) -> dict:
    exact = result.closed_form.eval(t0)
    rows = []
    for R in radii:
        ps = result.summand.partial_sum(R, t0)
        rows.append({"R": R, "partial": ps, "error": abs(ps - exact)})
    return {"t0": t0, "exact": exact, "rows": rows,
            "inside_region": result.convergence.contains_t(result.closed_form.F.q, t0)}
