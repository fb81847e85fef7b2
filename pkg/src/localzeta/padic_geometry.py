"""Cartan-cell bookkeeping for split GL(1) and GL(2).

GL(2) cells are ``K diag(w^{n+m}, w^n) K`` with ``m >= 0``; GL(1) cells are
``w^l O^x``.  Haar measures are normalised by ``vol(K) = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .coeffs import CoeffElement, CoeffField, get_field
from .lattice_series import Ineq, Piecewise, affine


@dataclass(frozen=True)
class PadicParams:
    """Local data: residue size ``q`` and unramified characters given by roots of unity.

    ``c = zeta_N^c_exp`` is the square of the splitting character at the
    uniformizer and ``alpha = zeta_N^alpha_exp`` is the character of U(1)
    at the uniformizer.
    """

    q: int
    N: int
    c_exp: int = 0
    alpha_exp: int = 0

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "c_exp", self.c_exp % self.N)
        object.__setattr__(self, "alpha_exp", self.alpha_exp % self.N)
        get_field(self.q, self.N)  # validates q

    @property
    def field(self) -> CoeffField:
        return get_field(self.q, self.N)

    @property
    def c(self) -> CoeffElement:
        return self.field.zeta(self.c_exp)

    @property
    def alpha(self) -> CoeffElement:
        return self.field.zeta(self.alpha_exp)

    @property
    def c_squared_is_one(self) -> bool:
        return (2 * self.c_exp) % self.N == 0


@dataclass(frozen=True)
class CellIndex:
    group: str  # "GL1" or "GL2"
    l: int = 0
    n: int = 0
    m: int = 0

    def __post_init__(self):
        if self.group not in ("GL1", "GL2"):
            raise ValueError(f"unknown group {self.group!r}")
        if self.m < 0:
            raise ValueError("Cartan exponent m must be >= 0")

    def diagonal(self) -> tuple[int, ...]:
        if self.group == "GL1":
            return (self.l,)
        return (self.n + self.m, self.n)


def delta_exponent(exponents: Sequence[int]) -> int:
    """Exponent of the doubling height: ``Delta = q^{-sum |a_i|} = t^{sum |a_i|}`` at ``s``."""
    return sum(abs(a) for a in exponents)


def cell_measure(idx: CellIndex, q: int) -> Fraction:
    """Haar volume of a Cartan cell with ``vol(K) = 1``."""
    if idx.group == "GL1" or idx.m == 0:
        return Fraction(1)
    return Fraction(q) ** idx.m * (1 + Fraction(1, q))


def gl2_measure_piecewise(F: CoeffField, nvars: int, m_var: int) -> Piecewise:
    """``vol(K diag(w^{n+m}, w^n) K)`` as a piecewise function of the index ``m >= 0``."""
    e = [0] * nvars
    e[m_var] = 1
    m0 = Piecewise.constant(F, nvars, 1, [Ineq(tuple(e), 0), Ineq(tuple(-x for x in e), 0)])
    q = F.q
    pos = Piecewise.geometric(F, nvars, affine(e), (0, -2, 0), scalar=1 + Fraction(1, q),
                              region=[Ineq(tuple(e), -1)])
    return m0 + pos
