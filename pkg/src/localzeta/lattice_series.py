"""Exact summation of piecewise-geometric series over polyhedral lattice regions.

A summand is a finite list of *pieces*.  Each piece is a region of ``Z^d`` cut
out by integer affine inequalities together with a list of terms

    coef(t) * prod_i base_i^{x_i} * prod_i x_i^{p_i}

where every ``base_i`` is a monomial ``zeta^j u^k t^w``.  Variables are
eliminated one at a time: the active lower and upper bounds are split into
cases, and each one-dimensional sum is replaced by its closed form
(Eulerian numerators for geometric rays, Faulhaber polynomials when the ratio
is identically one).  Every infinite ray contributes an exact condition on
``Re(s)``; the intersection of those conditions is recorded on the result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

from .coeffs import CoeffElement, CoeffField, RatFunc, p_add, p_mul_binom


class DivergentSeries(ValueError):
    """A ray sum that converges nowhere, or a region with no common convergence."""


class NonAffineCell(ValueError):
    """A cell whose guards cannot be eliminated with unit coefficients."""


# ---------------------------------------------------------------------------
# monomials zeta^root * u^upow * t^tpow, stored as plain tuples


Mono = tuple  # (root mod N, upow, tpow)

ONE: Mono = (0, 0, 0)


def m_mul(a: Mono, b: Mono, N: int) -> Mono:
    return ((a[0] + b[0]) % N, a[1] + b[1], a[2] + b[2])


def m_pow(a: Mono, k: int, N: int) -> Mono:
    return ((a[0] * k) % N, a[1] * k, a[2] * k)


def m_is_one(a: Mono) -> bool:
    return a[0] == 0 and a[1] == 0 and a[2] == 0


# ---------------------------------------------------------------------------
# convergence regions, as open intervals in sigma = Re(s)


@dataclass(frozen=True)
class ConvergenceRegion:
    """Open interval ``lo < Re(s) < hi`` (``None`` means unbounded).

    In terms of ``|t| = q^{-Re(s)}`` this is ``q^{-hi} < |t| < q^{-lo}``.
    """

    lo: Fraction | None = None
    hi: Fraction | None = None

    def meet(self, other: "ConvergenceRegion") -> "ConvergenceRegion":
        lo = self.lo if other.lo is None else other.lo if self.lo is None else max(self.lo, other.lo)
        hi = self.hi if other.hi is None else other.hi if self.hi is None else min(self.hi, other.hi)
        return ConvergenceRegion(lo, hi)

    def is_empty(self) -> bool:
        return self.lo is not None and self.hi is not None and self.lo >= self.hi

    def abs_t_bounds(self, q: int) -> tuple[float, float]:
        """(lower, upper) bounds on ``|t|``."""
        lower = 0.0 if self.hi is None else float(q) ** (-float(self.hi))
        upper = math.inf if self.lo is None else float(q) ** (-float(self.lo))
        return lower, upper

    def contains_t(self, q: int, t0: complex) -> bool:
        a = abs(t0)
        if a == 0:
            return self.hi is None
        sigma = -math.log(a) / math.log(q)
        return (self.lo is None or sigma > self.lo) and (self.hi is None or sigma < self.hi)

    def to_json(self) -> dict:
        return {
            "re_s_lower": None if self.lo is None else str(self.lo),
            "re_s_upper": None if self.hi is None else str(self.hi),
        }


FULL = ConvergenceRegion()


def ray_condition(r: Mono) -> ConvergenceRegion:
    """Region where ``|zeta^j u^k t^w| < 1``, i.e. ``k/2 + w Re(s) > 0``."""
    _, k, w = r
    if w > 0:
        return ConvergenceRegion(lo=Fraction(-k, 2 * w))
    if w < 0:
        return ConvergenceRegion(hi=Fraction(k, -2 * w))
    if k > 0:
        return FULL
    raise DivergentSeries(f"geometric ray with ratio of modulus >= 1 independent of s (u-power {k})")


# ---------------------------------------------------------------------------
# affine inequalities and regions


@dataclass(frozen=True, order=True)
class Ineq:
    """``sum coeffs[i] * x_i + const >= 0``."""

    coeffs: tuple
    const: int

    def holds(self, x: Sequence[int]) -> bool:
        return sum(c * v for c, v in zip(self.coeffs, x)) + self.const >= 0


def ge(form: Sequence[int], const: int = 0) -> Ineq:
    return Ineq(tuple(form), const)


def form_ge(form: tuple, theta: int) -> Ineq:
    """``form >= theta`` for an affine form ``(coeffs, const)``."""
    return Ineq(tuple(form[0]), form[1] - theta)


def form_le(form: tuple, theta: int) -> Ineq:
    """``form <= theta``."""
    return Ineq(tuple(-c for c in form[0]), theta - form[1])


def form_eq(form: tuple, theta: int) -> list[Ineq]:
    return [form_ge(form, theta), form_le(form, theta)]


def _canon(ineqs: Iterable[Ineq]) -> tuple | None:
    """Tighten, deduplicate and sort; ``None`` if trivially infeasible."""
    best: dict[tuple, int] = {}
    for iq in ineqs:
        cs = iq.coeffs
        g = 0
        for c in cs:
            if c:
                g = math.gcd(g, c)
        if g == 0:
            if iq.const < 0:
                return None
            continue
        const = iq.const
        if g != 1:
            cs = tuple(c // g for c in cs)
            const = const // g  # floor: exact integer tightening
        prev = best.get(cs)
        if prev is None or const < prev:
            best[cs] = const
    for cs, const in best.items():
        neg = tuple(-c for c in cs)
        other = best.get(neg)
        if other is not None and const + other < 0:
            return None
    return tuple(sorted(Ineq(cs, c) for cs, c in best.items()))


@lru_cache(maxsize=200_000)
def _feasible_canon(region: tuple) -> bool:
    if not region:
        return True
    nv = len(region[0].coeffs)
    best_v, best_cost = None, None
    for v in range(nv):
        lo = sum(1 for iq in region if iq.coeffs[v] > 0)
        hi = sum(1 for iq in region if iq.coeffs[v] < 0)
        if lo + hi == 0:
            continue
        cost = lo * hi
        if best_cost is None or cost < best_cost:
            best_v, best_cost = v, cost
    v = best_v
    pos = [iq for iq in region if iq.coeffs[v] > 0]
    neg = [iq for iq in region if iq.coeffs[v] < 0]
    rest = [iq for iq in region if iq.coeffs[v] == 0]
    for a in pos:
        for b in neg:
            ca, cb = a.coeffs[v], -b.coeffs[v]
            rest.append(Ineq(tuple(cb * x + ca * y for x, y in zip(a.coeffs, b.coeffs)),
                             cb * a.const + ca * b.const))
    c = _canon(rest)
    return c is not None and _feasible_canon(c)


def is_feasible(ineqs: Iterable[Ineq]) -> bool:
    """Fourier-Motzkin emptiness test (exact for unit-coefficient systems)."""
    c = _canon(ineqs)
    return c is not None and _feasible_canon(c)


# ---------------------------------------------------------------------------
# coefficients: scalar * t^tpow / prod (1 - beta t^w)^mult


@dataclass(frozen=True)
class Coef:
    scalar: CoeffElement
    tpow: int
    den: tuple  # sorted ((root, upow, w), mult) with w > 0

    def times(self, other: "Coef") -> "Coef":
        if not other.den:
            den = self.den
        elif not self.den:
            den = other.den
        else:
            d = dict(self.den)
            for k, m in other.den:
                d[k] = d.get(k, 0) + m
            den = tuple(sorted(d.items()))
        return Coef(self.scalar * other.scalar, self.tpow + other.tpow, den)


class Term:
    """``coef * prod base_i^{x_i} * prod x_i^{p_i}`` valid on a convergence region."""

    __slots__ = ("coef", "bases", "powers", "conv")

    def __init__(self, coef: Coef, bases: tuple, powers: tuple, conv: ConvergenceRegion = FULL):
        self.coef = coef
        self.bases = bases
        self.powers = powers
        self.conv = conv

    def times(self, other: "Term", N: int) -> "Term":
        return Term(
            self.coef.times(other.coef),
            tuple(m_mul(a, b, N) for a, b in zip(self.bases, other.bases)),
            tuple(a + b for a, b in zip(self.powers, other.powers)),
            self.conv.meet(other.conv),
        )


def term_numeric(F: CoeffField, term: Term, x: Sequence[int], t0: complex) -> complex:
    c = term.coef
    val = c.scalar.embed() * t0 ** c.tpow
    for (root, upow, w), m in c.den:
        val /= (1 - F.mono(root, upow).embed() * t0 ** w) ** m
    for b, p, xi in zip(term.bases, term.powers, x):
        val *= (F.mono(b[0], b[1]).embed() * t0 ** b[2]) ** xi * (xi ** p)
    return val


def scalar_coef(c: CoeffElement, tpow: int = 0) -> Coef:
    return Coef(c, tpow, ())


def mono_term(F: CoeffField, nvars: int, scalar: CoeffElement, bases: Sequence[Mono] | None = None,
              powers: Sequence[int] | None = None, tpow: int = 0) -> Term:
    bases = tuple(bases) if bases is not None else (ONE,) * nvars
    powers = tuple(powers) if powers is not None else (0,) * nvars
    return Term(Coef(scalar, tpow, ()), bases, powers)


# ---------------------------------------------------------------------------
# closed-form building blocks


@lru_cache(maxsize=None)
def eulerian_numerator(k: int) -> tuple[int, ...]:
    """Integer coefficients of ``N_k`` with ``sum_{w>=0} w^k r^w = N_k(r)/(1-r)^{k+1}``."""
    if k == 0:
        return (1,)
    prev = eulerian_numerator(k - 1)
    # N_k = r [N'_{k-1} (1 - r) + k N_{k-1}]
    deriv = [i * c for i, c in enumerate(prev)][1:]
    inner = [0] * (len(prev) + 1)
    for i, c in enumerate(deriv):
        inner[i] += c
        inner[i + 1] -= c
    for i, c in enumerate(prev):
        inner[i] += k * c
    out = [0] + inner
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@lru_cache(maxsize=None)
def faulhaber(p: int) -> tuple[Fraction, ...]:
    """Coefficients of ``S_p(y) = sum_{x=0}^{y-1} x^p`` as a polynomial in ``y``."""
    # interpolate through y = 0..p+1
    n = p + 2
    ys = list(range(n))
    vals = [sum(Fraction(x) ** p if x or p else Fraction(1) for x in range(y)) for y in ys]
    # Solve Vandermonde system exactly
    m = [[Fraction(y) ** j if (y or j) else Fraction(1) for j in range(n)] + [vals[i]] for i, y in enumerate(ys)]
    for c in range(n):
        piv = next(r for r in range(c, n) if m[r][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [v * inv for v in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return tuple(m[i][n] for i in range(n))


def _affine_power(form: tuple, k: int, nvars: int) -> dict:
    """Expand ``(coeffs . x + const)^k`` as ``{exponent tuple: int}``."""
    coeffs, const = form
    out = {(0,) * nvars: 1}
    for _ in range(k):
        nxt: dict = {}
        for exps, c in out.items():
            if const:
                nxt[exps] = nxt.get(exps, 0) + c * const
            for i, a in enumerate(coeffs):
                if a:
                    e2 = exps[:i] + (exps[i] + 1,) + exps[i + 1:]
                    nxt[e2] = nxt.get(e2, 0) + c * a
        out = {e: c for e, c in nxt.items() if c}
    return out


class _Ctx:
    def __init__(self, F: CoeffField, nvars: int):
        self.F = F
        self.N = F.N
        self.nvars = nvars
        self._inv_cache: dict = {}

    def one_minus_inv(self, r: Mono, m: int) -> Coef:
        """``1/(1 - r)^m`` as a :class:`Coef`."""
        root, upow, w = r
        F = self.F
        if w > 0:
            return Coef(F.one, 0, (((root, upow, w), m),))
        if w < 0:
            # 1/(1 - r) = -r^{-1} / (1 - r^{-1})
            inv = ((-root) % self.N, -upow, -w)
            return Coef((-F.mono(inv[0], inv[1])) ** m, -w * m, ((inv, m),))
        key = (root, upow)
        base = self._inv_cache.get(key)
        if base is None:
            base = (F.one - F.mono(root, upow)).inverse()
            self._inv_cache[key] = base
        return Coef(base ** m, 0, ())


def _mono_coef(F: CoeffField, r: Mono, k: int) -> Coef:
    """``r^k`` as a coefficient (t-power kept separately)."""
    N = F.N
    return Coef(F.mono((r[0] * k) % N, r[1] * k), r[2] * k, ())


def _geometric_tail(ctx: _Ctx, term: Term, v: int, start: tuple, r: Mono, p: int, sign: int) -> list[Term]:
    """``sign * sum_{x >= start} x^p r^x`` times the rest of ``term`` (formal closed form)."""
    F, N, nv = ctx.F, ctx.N, ctx.nvars
    out = []
    coeffs, const = start
    shifted_bases = list(term.bases)
    shifted_bases[v] = ONE
    for w in range(nv):
        if coeffs[w]:
            shifted_bases[w] = m_mul(shifted_bases[w], m_pow(r, coeffs[w], N), N)
    shifted_bases = tuple(shifted_bases)
    base_coef = term.coef.times(_mono_coef(F, r, const))
    base_powers = list(term.powers)
    base_powers[v] = 0
    for k in range(p + 1):
        binom = math.comb(p, k)
        num = eulerian_numerator(k)
        den_coef = ctx.one_minus_inv(r, k + 1)
        for exps, c in _affine_power(start, p - k, nv).items():
            powers = tuple(a + b for a, b in zip(base_powers, exps))
            for i, e in enumerate(num):
                if not e:
                    continue
                coef = base_coef.times(den_coef).times(_mono_coef(F, r, i))
                coef = Coef(coef.scalar * (sign * binom * c * e), coef.tpow, coef.den)
                out.append(Term(coef, shifted_bases, powers, term.conv))
    return out


def _neg_form(form: tuple) -> tuple:
    return (tuple(-c for c in form[0]), -form[1])


def _plus(form: tuple, k: int) -> tuple:
    return (form[0], form[1] + k)


def _poly_sum(ctx: _Ctx, term: Term, v: int, lo: tuple, hi: tuple, p: int) -> list[Term]:
    """``sum_{x=lo}^{hi} x^p`` (ratio identically one) times the rest of ``term``."""
    F, nv = ctx.F, ctx.nvars
    poly = faulhaber(p)
    out = []
    base_powers = list(term.powers)
    base_powers[v] = 0
    bases = list(term.bases)
    bases[v] = ONE
    bases = tuple(bases)
    for form, sign in ((_plus(hi, 1), 1), (lo, -1)):
        for j, cj in enumerate(poly):
            if not cj:
                continue
            for exps, c in _affine_power(form, j, nv).items():
                powers = tuple(a + b for a, b in zip(base_powers, exps))
                coef = term.coef
                coef = Coef(coef.scalar * F.from_rational(cj * c * sign), coef.tpow, coef.den)
                out.append(Term(coef, bases, powers, term.conv))
    return out


def _sum_term_over(ctx: _Ctx, term: Term, v: int, lo: tuple | None, hi: tuple | None) -> list[Term]:
    r = term.bases[v]
    p = term.powers[v]
    if m_is_one(r):
        if lo is None or hi is None:
            raise DivergentSeries("sum of a non-decaying term over an infinite ray")
        return _poly_sum(ctx, term, v, lo, hi, p)
    if hi is None:
        cond = ray_condition(r)
        t = Term(term.coef, term.bases, term.powers, term.conv.meet(cond))
        return _geometric_tail(ctx, t, v, lo, r, p, 1)
    if lo is None:
        rinv = m_pow(r, -1, ctx.N)
        cond = ray_condition(rinv)
        bases = list(term.bases)
        bases[v] = rinv
        t = Term(term.coef, tuple(bases), term.powers, term.conv.meet(cond))
        return _geometric_tail(ctx, t, v, _neg_form(hi), rinv, p, -1 if p % 2 else 1)
    return (_geometric_tail(ctx, term, v, lo, r, p, 1)
            + _geometric_tail(ctx, term, v, _plus(hi, 1), r, p, -1))


def _merge(terms: list[Term]) -> list[Term]:
    acc: dict = {}
    for t in terms:
        key = (t.coef.tpow, t.coef.den, t.bases, t.powers)
        prev = acc.get(key)
        if prev is None:
            acc[key] = [t.coef.scalar, t.conv]
        else:
            prev[0] = prev[0] + t.coef.scalar
            prev[1] = prev[1].meet(t.conv)
    out = []
    for (tpow, den, bases, powers), (sc, conv) in acc.items():
        if not sc.is_zero():
            out.append(Term(Coef(sc, tpow, den), bases, powers, conv))
    return out


class Accumulator:
    """Collects fully summed terms grouped by their denominators."""

    def __init__(self, F: CoeffField):
        self.F = F
        self.groups: dict = {}
        self.conv = FULL
        self.count = 0

    def add(self, coef: Coef, conv: ConvergenceRegion) -> None:
        g = self.groups.setdefault(coef.den, {})
        g[coef.tpow] = g.get(coef.tpow, self.F.zero) + coef.scalar
        self.conv = self.conv.meet(conv)
        self.count += 1

    def merge(self, other: "Accumulator") -> None:
        for den, g in other.groups.items():
            mine = self.groups.setdefault(den, {})
            for k, v in g.items():
                mine[k] = mine.get(k, self.F.zero) + v
        self.conv = self.conv.meet(other.conv)
        self.count += other.count

    def to_ratfunc(self) -> RatFunc:
        F = self.F
        if self.conv.is_empty():
            raise DivergentSeries("summands have no common region of convergence")
        groups = {d: {k: v for k, v in g.items() if not v.is_zero()} for d, g in self.groups.items()}
        groups = {d: g for d, g in groups.items() if g}
        if not groups:
            return RatFunc.zero(F).with_region(self.conv)
        lcm: dict = {}
        for den in groups:
            for key, m in den:
                lcm[key] = max(lcm.get(key, 0), m)
        keys = sorted(lcm)
        vmin = min(k for g in groups.values() for k in g)
        betas = {key: F.mono(key[0], key[1]) for key in keys}

        def times_binom(p: list, key, e: int) -> list:
            for _ in range(e):
                p = p_mul_binom(p, betas[key], key[2])
            return p

        def combine(items: list, idx: int) -> list:
            # sum over items of num * prod_{keys[idx:]} binom^{lcm - have}, Horner in each key
            if idx == len(keys):
                out: list = []
                for _, num in items:
                    out = p_add(out, num)
                return out
            key = keys[idx]
            buckets: dict = {}
            for have, num in items:
                buckets.setdefault(have.get(key, 0), []).append((have, num))
            powers = sorted((lcm[key] - e, e) for e in buckets)
            acc: list = []
            for i in range(len(powers) - 1, -1, -1):
                p, e = powers[i]
                if i < len(powers) - 1:
                    acc = times_binom(acc, key, powers[i + 1][0] - p)
                acc = p_add(acc, combine(buckets[e], idx + 1))
            return times_binom(acc, key, powers[0][0])

        items = []
        for den, g in sorted(groups.items(), key=lambda kv: kv[0]):
            top = max(g)
            num = [F.zero] * (top - vmin + 1)
            for k, v in g.items():
                num[k - vmin] = v
            items.append((dict(den), num))
        total = combine(items, 0)
        den_poly = [F.one]
        for key in keys:
            den_poly = times_binom(den_poly, key, lcm[key])
        return RatFunc(F, total, den_poly, vmin, region=self.conv)


# ---------------------------------------------------------------------------
# the elimination driver


def _choose_var(region: tuple, remaining: Sequence[int], terms: list[Term]) -> int:
    best, best_cost = None, None
    for v in remaining:
        lo = sum(1 for iq in region if iq.coeffs[v] > 0)
        hi = sum(1 for iq in region if iq.coeffs[v] < 0)
        cost = (max(lo, 1) * max(hi, 1), -(lo + hi > 0))
        if best_cost is None or cost < best_cost:
            best, best_cost = v, cost
    return best


def _eliminate(ctx: _Ctx, region: tuple, terms: list[Term], remaining: tuple, acc: Accumulator) -> None:
    if not terms:
        return
    if not remaining:
        for t in terms:
            acc.add(t.coef, t.conv)
        return
    v = _choose_var(region, remaining, terms)
    rest_vars = tuple(x for x in remaining if x != v)
    lowers, uppers, others = [], [], []
    for iq in region:
        c = iq.coeffs[v]
        if c == 0:
            others.append(iq)
            continue
        if abs(c) != 1:
            raise NonAffineCell(f"variable {v} has coefficient {c} in a guard")
        rest = tuple(0 if i == v else x for i, x in enumerate(iq.coeffs))
        if c == 1:
            lowers.append((tuple(-x for x in rest), -iq.const))  # x_v >= form
        else:
            uppers.append((rest, iq.const))  # x_v <= form
    nv = ctx.nvars

    def diff(a: tuple, b: tuple, shift: int = 0) -> Ineq:
        """a - b - shift >= 0."""
        return Ineq(tuple(x - y for x, y in zip(a[0], b[0])), a[1] - b[1] - shift)

    if not lowers and not uppers:
        # split the free line at zero
        e = tuple(int(i == v) for i in range(nv))
        for extra in ([Ineq(e, 0)], [Ineq(tuple(-x for x in e), -1)]):
            sub = _canon(list(region) + extra)
            if sub is not None and _feasible_canon(sub):
                _eliminate(ctx, sub, terms, remaining, acc)
        return

    lo_choices = list(range(len(lowers))) or [None]
    hi_choices = list(range(len(uppers))) or [None]
    for i, k in product(lo_choices, hi_choices):
        cons = list(others)
        if i is not None:
            for j in range(len(lowers)):
                if j != i:
                    cons.append(diff(lowers[i], lowers[j], 0 if j > i else 1))
        if k is not None:
            for j in range(len(uppers)):
                if j != k:
                    cons.append(diff(uppers[j], uppers[k], 0 if j > k else 1))
        if i is not None and k is not None:
            cons.append(diff(uppers[k], lowers[i]))
        sub = _canon(cons)
        if sub is None or not _feasible_canon(sub):
            continue
        lo = lowers[i] if i is not None else None
        hi = uppers[k] if k is not None else None
        new_terms: list[Term] = []
        for t in terms:
            new_terms.extend(_sum_term_over(ctx, t, v, lo, hi))
        new_terms = _merge(new_terms)
        _eliminate(ctx, sub, new_terms, rest_vars, acc)


def sum_region(F: CoeffField, nvars: int, region: Iterable[Ineq], terms: Sequence[Term],
               acc: Accumulator | None = None) -> Accumulator:
    """Add ``sum_{x in region} sum(terms)(x)`` to an accumulator."""
    acc = acc if acc is not None else Accumulator(F)
    reg = _canon(region)
    if reg is None or not _feasible_canon(reg):
        return acc
    ctx = _Ctx(F, nvars)
    _eliminate(ctx, reg, _merge(list(terms)), tuple(range(nvars)), acc)
    return acc


# ---------------------------------------------------------------------------
# piecewise summands


@dataclass
class Piecewise:
    """A function on ``Z^nvars`` given as a list of (region, terms) pieces.

    The value at ``x`` is the sum, over pieces whose region contains ``x``, of
    the piece's terms.  Summation is linear in the pieces.
    """

    F: CoeffField
    nvars: int
    pieces: list = field(default_factory=list)

    @classmethod
    def constant(cls, F: CoeffField, nvars: int, c, region: Sequence[Ineq] = ()) -> "Piecewise":
        c = F.coerce(c)
        return cls(F, nvars, [(tuple(region), [mono_term(F, nvars, c)])])

    @classmethod
    def geometric(cls, F: CoeffField, nvars: int, form: tuple, base: Mono, scalar=None,
                  region: Sequence[Ineq] = ()) -> "Piecewise":
        """``scalar * base^{form(x)}`` on ``region``, for an affine form ``(coeffs, const)``."""
        coeffs, const = form
        N = F.N
        bases = tuple(m_pow(base, c, N) for c in coeffs)
        coef = _mono_coef(F, base, const)
        if scalar is not None:
            coef = Coef(coef.scalar * F.coerce(scalar), coef.tpow, ())
        return cls(F, nvars, [(tuple(region), [Term(coef, bases, (0,) * nvars)])])

    def __add__(self, other: "Piecewise") -> "Piecewise":
        return Piecewise(self.F, self.nvars, self.pieces + other.pieces)

    def scale(self, c) -> "Piecewise":
        c = self.F.coerce(c)
        return Piecewise(self.F, self.nvars, [
            (reg, [Term(Coef(t.coef.scalar * c, t.coef.tpow, t.coef.den), t.bases, t.powers, t.conv) for t in ts])
            for reg, ts in self.pieces])

    def __neg__(self) -> "Piecewise":
        return self.scale(-1)

    def __sub__(self, other: "Piecewise") -> "Piecewise":
        return self + (-other)

    def restrict(self, ineqs: Sequence[Ineq]) -> "Piecewise":
        out = []
        for reg, ts in self.pieces:
            r = _canon(list(reg) + list(ineqs))
            if r is not None and _feasible_canon(r):
                out.append((r, ts))
        return Piecewise(self.F, self.nvars, out)

    def __mul__(self, other: "Piecewise") -> "Piecewise":
        N = self.F.N
        out = []
        for r1, t1 in self.pieces:
            for r2, t2 in other.pieces:
                r = _canon(list(r1) + list(r2))
                if r is None or not _feasible_canon(r):
                    continue
                ts = _merge([a.times(b, N) for a in t1 for b in t2])
                if ts:
                    out.append((r, ts))
        return Piecewise(self.F, self.nvars, out)

    def total(self) -> RatFunc:
        """Exact closed form of the sum over all of ``Z^nvars``."""
        acc = Accumulator(self.F)
        for reg, ts in self.pieces:
            sum_region(self.F, self.nvars, reg, ts, acc)
        return acc.to_ratfunc()

    def value_numeric(self, x: Sequence[int], t0: complex) -> complex:
        total = 0j
        for reg, ts in self.pieces:
            if all(iq.holds(x) for iq in reg):
                for t in ts:
                    total += term_numeric(self.F, t, x, t0)
        return total


# ---------------------------------------------------------------------------
# public helpers with a cell-level interface


def geom_closed(F: CoeffField, ratio: tuple[int, int], t_step: int, start: int, direction: int = 1,
                stop: int | None = None) -> RatFunc:
    """Closed form of ``sum_x (zeta^j u^k t^{t_step})^x`` from ``start``.

    ``direction=+1`` sums ``x >= start`` (up to ``stop`` if given),
    ``direction=-1`` sums ``x <= start`` (down to ``stop`` if given).
    ``ratio`` is ``(j, k)``.
    """
    r = (ratio[0] % F.N, ratio[1], t_step)
    if direction == 1:
        region = [Ineq((1,), -start)] + ([Ineq((-1,), stop)] if stop is not None else [])
    elif direction == -1:
        region = [Ineq((-1,), start)] + ([Ineq((1,), -stop)] if stop is not None else [])
    else:
        raise ValueError("direction must be +1 or -1")
    term = Term(Coef(F.one, 0, ()), (r,), (0,))
    return sum_region(F, 1, region, [term]).to_ratfunc()


@dataclass
class CellTermSpec:
    """One summation cell: a box in ``Z^d`` intersected with affine guards.

    The summand is ``coeff_base * prod_i (zeta^{j_i} u^{k_i})^{x_i} *
    t^{w . x + b} * prod_i x_i^{p_i}``.
    """

    dims: list  # per index: (lo, hi) with None for an infinite end
    coeff_base: CoeffElement
    multipliers: list  # per index: (root, upow)
    t_exponent: tuple  # (w vector, b)
    guards: list = field(default_factory=list)  # list[Ineq]
    powers: list | None = None

    def region(self) -> list[Ineq]:
        d = len(self.dims)
        out = list(self.guards)
        for i, (lo, hi) in enumerate(self.dims):
            e = [0] * d
            if lo is not None:
                e[i] = 1
                out.append(Ineq(tuple(e), -lo))
            if hi is not None:
                e = [0] * d
                e[i] = -1
                out.append(Ineq(tuple(e), hi))
        return out

    def term(self) -> Term:
        F = self.coeff_base.F
        w, b = self.t_exponent
        bases = tuple(((j % F.N), k, wi) for (j, k), wi in zip(self.multipliers, w))
        powers = tuple(self.powers) if self.powers is not None else (0,) * len(self.dims)
        return Term(Coef(self.coeff_base, b, ()), bases, powers)


def sum_lattice(cells: Sequence[CellTermSpec], F: CoeffField | None = None) -> RatFunc:
    """Exact sum over a list of cells (cells are summed independently)."""
    if not cells:
        if F is None:
            raise ValueError("empty cell list needs an explicit field")
        return RatFunc.zero(F)
    F = F or cells[0].coeff_base.F
    acc = Accumulator(F)
    for cell in cells:
        sum_region(F, len(cell.dims), cell.region(), [cell.term()], acc)
    return acc.to_ratfunc()


def region_split(nvars: int, region: Sequence[Ineq], abs_forms: Sequence[tuple] = (),
                 thresholds: Sequence[tuple] = ()) -> list[tuple[tuple, tuple]]:
    """Split ``region`` so every listed sign and comparison is constant per cell.

    ``abs_forms`` are affine forms split into ``>= 0`` and ``<= -1``;
    ``thresholds`` are ``(form, theta)`` split into ``< theta``, ``= theta``,
    ``> theta``.  Returns ``(cell_region, labels)`` for nonempty cells only;
    labels are ``+1/-1`` per abs form followed by ``-1/0/+1`` per threshold.
    """
    choices = []
    for f in abs_forms:
        choices.append([(1, [form_ge(f, 0)]), (-1, [form_le(f, -1)])])
    for f, theta in thresholds:
        choices.append([(-1, [form_le(f, theta - 1)]), (0, form_eq(f, theta)), (1, [form_ge(f, theta + 1)])])
    out = []
    for combo in product(*choices):
        ineqs = list(region)
        labels = []
        for lab, iqs in combo:
            labels.append(lab)
            ineqs.extend(iqs)
        c = _canon(ineqs)
        if c is not None and _feasible_canon(c):
            out.append((c, tuple(labels)))
    return out


def affine(coeffs: Sequence[int], const: int = 0) -> tuple:
    return (tuple(coeffs), const)
