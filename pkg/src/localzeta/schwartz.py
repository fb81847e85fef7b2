"""Schwartz-Bruhat functions built from centred balls and shells, and their scaled pairings.

A box is a product over coordinates of ``w^k O`` (ball) or ``w^k O^x``
(shell).  Under diagonal scaling by powers of the uniformizer these stay
balls and shells, so every pairing reduces to one-dimensional intersection
volumes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .coeffs import CoeffElement, CoeffField
from .lattice_series import FULL, Coef, Ineq, Piecewise, Term, form_eq, form_ge, form_le

BALL, SHELL = "ball", "shell"

# coordinate modes for pairings
SCALE, ZERO_PHI, ZERO_PSI = "scale", "zero_phi", "zero_psi"


@dataclass(frozen=True)
class BoxTerm:
    coords: tuple  # ((kind, k), ...)
    coeff: CoeffElement

    def contains_valuations(self, vals: Sequence[int | None]) -> bool:
        """Whether a point with coordinate valuations ``vals`` (None = 0) lies in the box."""
        for (kind, k), v in zip(self.coords, vals):
            if v is None:
                if kind == SHELL:
                    return False
            elif kind == BALL and v < k:
                return False
            elif kind == SHELL and v != k:
                return False
        return True


@dataclass
class SchwartzFn:
    F: CoeffField
    d: int
    terms: list = field(default_factory=list)

    def __post_init__(self):
        for t in self.terms:
            if len(t.coords) != self.d:
                raise ValueError("box dimension does not match the function's dimension")
            for kind, k in t.coords:
                if kind not in (BALL, SHELL) or not isinstance(k, int):
                    raise ValueError(f"bad box coordinate {(kind, k)!r}")
            if t.coeff.F is not self.F:
                raise ValueError("box coefficient from a different field")

    @classmethod
    def box(cls, F: CoeffField, coords: Sequence[tuple], coeff=1) -> "SchwartzFn":
        return cls(F, len(coords), [BoxTerm(tuple(coords), F.coerce(coeff))])

    @classmethod
    def lattice_indicator(cls, F: CoeffField, d: int, k: int = 0) -> "SchwartzFn":
        """Indicator of ``(w^k O)^d``."""
        return cls.box(F, [(BALL, k)] * d)

    def __add__(self, other: "SchwartzFn") -> "SchwartzFn":
        if other.d != self.d or other.F is not self.F:
            raise ValueError("incompatible Schwartz functions")
        return SchwartzFn(self.F, self.d, self.terms + other.terms)

    def scaled(self, kappa) -> "SchwartzFn":
        kappa = self.F.coerce(kappa)
        return SchwartzFn(self.F, self.d, [BoxTerm(t.coords, t.coeff * kappa) for t in self.terms])

    def tensor(self, other: "SchwartzFn") -> "SchwartzFn":
        return SchwartzFn(self.F, self.d + other.d,
                          [BoxTerm(a.coords + b.coords, a.coeff * b.coeff) for a in self.terms for b in other.terms])

    def value_at(self, vals: Sequence[int | None]) -> CoeffElement:
        out = self.F.zero
        for t in self.terms:
            if t.contains_valuations(vals):
                out = out + t.coeff
        return out

    def is_zero(self) -> bool:
        return not self.terms or all(t.coeff.is_zero() for t in self.terms)


# ---------------------------------------------------------------------------
# one-dimensional measures


def box_volume(kind: str, k: int, q: int) -> Fraction:
    v = Fraction(1, q) ** k if k >= 0 else Fraction(q) ** (-k)
    return v if kind == BALL else v * (1 - Fraction(1, q))


def contains_zero(kind: str) -> bool:
    return kind == BALL


def _intersect(a: tuple, b: tuple) -> tuple | None:
    (ka, ja), (kb, jb) = a, b
    if ka == BALL and kb == BALL:
        return (BALL, max(ja, jb))
    if ka == BALL:
        return b if jb >= ja else None
    if kb == BALL:
        return a if ja >= jb else None
    return a if ja == jb else None


def pair_1d(a: tuple, b: tuple, e: int, mode: str, q: int) -> Fraction:
    """One coordinate of ``int phi_a(w^e x) psi_b(x) dx`` (or a degenerate variant)."""
    if mode == ZERO_PHI:
        return box_volume(*b, q) if contains_zero(a[0]) else Fraction(0)
    if mode == ZERO_PSI:
        return box_volume(*a, q) if contains_zero(b[0]) else Fraction(0)
    # {x : w^e x in w^k S} = w^{k-e} S
    inter = _intersect((a[0], a[1] - e), b)
    return Fraction(0) if inter is None else box_volume(*inter, q)


def _modes(d: int, zero_phi: Sequence[int], zero_psi: Sequence[int]) -> list[str]:
    zp, zs = set(zero_phi), set(zero_psi)
    if zp & zs:
        raise ValueError("a coordinate cannot be zeroed on both sides")
    for i in zp | zs:
        if not 0 <= i < d:
            raise ValueError(f"zero pattern index {i} out of range")
    return [ZERO_PHI if i in zp else ZERO_PSI if i in zs else SCALE for i in range(d)]


def sb_scale_pair(phi: SchwartzFn, psi: SchwartzFn, e: Sequence[int], zero_pattern: Sequence[int] = (),
                  psi_zero_pattern: Sequence[int] = ()) -> CoeffElement:
    """``int phi(w^e x with zero_pattern coordinates set to 0) * conj(psi(x with psi_zero_pattern set to 0)) dx``.

    Coordinates are 0-based.  A coordinate zeroed on one side is integrated
    against the other side only, and its exponent ``e_i`` is ignored.
    """
    if phi.d != psi.d or len(e) != phi.d:
        raise ValueError("dimension mismatch")
    F, q = phi.F, phi.F.q
    modes = _modes(phi.d, zero_pattern, psi_zero_pattern)
    total = F.zero
    for a in phi.terms:
        for b in psi.terms:
            vol = Fraction(1)
            for i in range(phi.d):
                vol *= pair_1d(a.coords[i], b.coords[i], e[i], modes[i], q)
                if vol == 0:
                    break
            if vol:
                total = total + a.coeff * b.coeff.conj() * F.from_rational(vol)
    return total


# ---------------------------------------------------------------------------
# the same pairing as a piecewise function of affine exponent forms


def pair_1d_piecewise(F: CoeffField, nvars: int, a: tuple, b: tuple, form: tuple) -> Piecewise:
    """``e -> vol(w^{-e} A  cap  B)`` for ``e = form(x)``, as a piecewise-geometric function."""
    q = F.q
    (ka, ja), (kb, jb) = a, b
    theta = ja - jb
    unit = 1 - Fraction(1, q)
    coeffs, const = form
    grow = (0, -2, 0)  # q^{e}

    def const_piece(val, region):
        return Piecewise.constant(F, nvars, val, region)

    def grow_piece(scale, region):
        # scale * q^{e}
        return Piecewise.geometric(F, nvars, form, grow, scalar=scale, region=region)

    if ka == BALL and kb == BALL:
        return (const_piece(box_volume(BALL, jb, q), [form_ge(form, theta)])
                + grow_piece(box_volume(BALL, ja, q), [form_le(form, theta - 1)]))
    if ka == BALL:
        return const_piece(box_volume(SHELL, jb, q), [form_ge(form, theta)])
    if kb == BALL:
        return grow_piece(box_volume(BALL, ja, q) * unit, [form_le(form, theta)])
    return const_piece(box_volume(SHELL, jb, q), form_eq(form, theta))


def pair_piecewise(phi: SchwartzFn, psi: SchwartzFn, forms: Sequence[tuple], nvars: int) -> Piecewise:
    """``sb_scale_pair(phi, psi, e)`` with ``e_i = forms[i](x)``, as a piecewise function of ``x``."""
    F = phi.F
    out = Piecewise(F, nvars, [])
    for a in phi.terms:
        for b in psi.terms:
            c = a.coeff * b.coeff.conj()
            if c.is_zero():
                continue
            acc = Piecewise.constant(F, nvars, c)
            for i, form in enumerate(forms):
                acc = acc * pair_1d_piecewise(F, nvars, a.coords[i], b.coords[i], form)
                if not acc.pieces:
                    break
            out = out + acc
    return out


# ---------------------------------------------------------------------------
# stabilisation thresholds


def _thresholds_1d(a: tuple, b: tuple) -> tuple[int, int]:
    """(theta_pos, theta_neg): the 1-d pairing equals its zero_phi limit for
    ``e >= theta_pos`` and ``q^e`` times its zero_psi limit for ``e <= theta_neg``."""
    (ka, ja), (kb, jb) = a, b
    theta = ja - jb
    pos = theta if ka == BALL else theta + 1
    neg = theta if kb == BALL else theta - 1
    return pos, neg


def locality_threshold(phi: SchwartzFn, psi: SchwartzFn | None = None) -> int:
    """Least ``l1 >= 0`` past which scaling any coordinate by ``w^{+-l}`` is
    indistinguishable from zeroing it (on either side) in every box pairing."""
    psi = psi if psi is not None else phi
    l1 = 0
    for a in phi.terms:
        for b in psi.terms:
            for i in range(phi.d):
                pos, neg = _thresholds_1d(a.coords[i], b.coords[i])
                l1 = max(l1, pos, -neg)
    return l1


def certify_threshold(phi: SchwartzFn, l1: int, width: int = 6, psi: SchwartzFn | None = None) -> bool:
    """Check exact stabilisation of every 1-d box pairing on ``[l1, l1+width)`` and its mirror."""
    psi = psi if psi is not None else phi
    q = phi.F.q
    for a in phi.terms:
        for b in psi.terms:
            for i in range(phi.d):
                ca, cb = a.coords[i], b.coords[i]
                lim_pos = pair_1d(ca, cb, 0, ZERO_PHI, q)
                lim_neg = pair_1d(ca, cb, 0, ZERO_PSI, q)
                for e in range(l1, l1 + width):
                    if pair_1d(ca, cb, e, SCALE, q) != lim_pos:
                        return False
                    if pair_1d(ca, cb, -e, SCALE, q) != Fraction(q) ** (-e) * lim_neg:
                        return False
    return True


@dataclass
class AsymptoticTable:
    """Stabilised pairings for a function on ``F^3``.

    Coordinates are ``(x1, x2, x3)`` paired with exponents ``(n+m, n, l)``.
    ``k[(i, j)]`` are the constants ``k^i_j``; ``a1, a2, b1, b2`` are the
    branch pairings as functions of the exponent ``n + m`` of the first
    coordinate.
    """

    phi: SchwartzFn
    l1: int
    k: dict

    def _pair(self, e1: int, zp: Sequence[int], zs: Sequence[int]) -> CoeffElement:
        return sb_scale_pair(self.phi, self.phi, (e1, 0, 0), zp, zs)

    # a_{n,m} = pair((n+m, n, .), third coordinate zeroed on phi)
    def a1(self, e1: int) -> CoeffElement:
        """``a_{n,m}`` for ``n >= l1``."""
        return self._pair(e1, (1, 2), ())

    def a2(self, e1: int) -> CoeffElement:
        """``q^{-n} a_{n,m}`` for ``n <= -l1``."""
        return self._pair(e1, (2,), (1,))

    # b_{n,m} = pair((n+m, n, .), third coordinate zeroed on psi)
    def b1(self, e1: int) -> CoeffElement:
        return self._pair(e1, (1,), (2,))

    def b2(self, e1: int) -> CoeffElement:
        return self._pair(e1, (), (1, 2))


# zero patterns (phi side, psi side) defining k^i_j
_K_PATTERNS = {
    (1, 1): ((0, 1, 2), ()),
    (1, 2): ((1, 2), (0,)),
    (1, 3): ((0, 1), (2,)),
    (1, 4): ((1,), (0, 2)),
    (2, 1): ((0, 2), (1,)),
    (2, 2): ((2,), (0, 1)),
    (2, 3): ((0,), (1, 2)),
    (2, 4): ((), (0, 1, 2)),
}


def sb_asymptotic_constants(phi: SchwartzFn, l1: int | None = None) -> AsymptoticTable:
    if phi.d != 3:
        raise ValueError("asymptotic constants are defined for functions on F^3")
    l1 = locality_threshold(phi) if l1 is None else l1
    k = {key: sb_scale_pair(phi, phi, (0, 0, 0), zp, zs) for key, (zp, zs) in _K_PATTERNS.items()}
    return AsymptoticTable(phi, l1, k)


def k_pattern(i: int, j: int) -> tuple:
    return _K_PATTERNS[(i, j)]
