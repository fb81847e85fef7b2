"""Exact coefficients and rational functions in ``t = q^{-s}``.

Coefficients live in ``K = Q(zeta_N)[u]/(u^2 - 1/q)``, where ``u`` stands for
``q^{-1/2}``.  When ``sqrt(q)`` already lies in ``Q(zeta_N)`` the generator ``u``
is folded into the cyclotomic part, so ``K`` is always a field.

Rational functions are stored as ``t^val * num(t) / den(t)`` with
``num(0) != 0``, ``den(0) == 1``.  Arithmetic never reduces by a gcd; call
:func:`rf_normalize` when a reduced form is wanted.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence


class FieldMismatch(ValueError):
    pass


class PoleError(ZeroDivisionError):
    """Evaluation at a pole, or inversion of zero."""


# ---------------------------------------------------------------------------
# integer helpers


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, a)`` with ``q = p^a``; raise if ``q`` is not a prime power."""
    if not isinstance(q, int) or q < 2:
        raise ValueError(f"q must be a prime power >= 2, got {q!r}")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    a, r = 0, q
    while r % p == 0:
        r //= p
        a += 1
    if r != 1:
        raise ValueError(f"q must be a prime power, got {q}")
    return p, a


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _int_poly_divexact(num: list[int], den: Sequence[int]) -> list[int]:
    num = list(num)
    dd = len(den) - 1
    assert den[-1] == 1
    out = [0] * (len(num) - dd)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + dd]
        out[k] = c
        if c:
            for i, di in enumerate(den):
                num[k + i] -= c * di
    assert not any(num), "non-exact cyclotomic division"
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, low degree first."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n):
        if d < n:
            num = _int_poly_divexact(num, cyclotomic_poly(d))
    return tuple(num)


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


# ---------------------------------------------------------------------------
# the coefficient field


class CoeffField:
    """The field ``Q(zeta_N)[u]/(u^2 - 1/q)`` with fixed embedding into C.

    The embedding sends ``zeta`` to ``exp(2 pi i / N)`` and ``u`` to
    ``+q^{-1/2}``.
    """

    def __init__(self, q: int, N: int):
        if not isinstance(N, int) or N < 1:
            raise ValueError(f"N must be a positive integer, got {N!r}")
        self.p, self.a = factor_prime_power(q)
        self.q, self.N = q, N
        self.phi = cyclotomic_poly(N)
        self.d = d = len(self.phi) - 1
        # x^k mod Phi_N for 0 <= k < max(2d - 1, N)
        top = max(2 * d - 1, N, 1)
        red: list[tuple[int, ...]] = []
        cur = [0] * d
        cur[0] = 1
        for _ in range(top):
            red.append(tuple(cur))
            # multiply by x
            hi = cur[-1]
            cur = [0] + cur[:-1]
            if hi:
                for i in range(d):
                    cur[i] -= hi * self.phi[i]
        self._red = red
        self._zero_vec = (0,) * d
        self._omega = cmath.exp(2j * math.pi / N)
        self._mono_cache: dict[tuple[int, int], CoeffElement] = {}
        self.u_folded = False
        self._u_base: tuple[tuple[int, ...], int] | None = None
        sq = self._sqrt_q_cyclotomic()
        if sq is not None:
            vec, den = sq  # sqrt(q) = vec/den ; u = sqrt(q)/q
            self._u_base = (vec, den * q)
            self.u_folded = True
            uu = self.u() * self.u()
            if uu != self.from_rational(Fraction(1, q)):
                raise AssertionError("sqrt(q) identification failed")
            if abs(self.u().embed() - q ** -0.5) > 1e-9:
                raise AssertionError("sqrt(q) identification picked wrong sign")
        self.zero = CoeffElement(self, self._zero_vec, self._zero_vec, 1)
        self.one = self.from_rational(1)

    # -- identification of sqrt(q) inside Q(zeta_N) -------------------------
    def _root_vec(self, k: int) -> tuple[int, ...]:
        return self._red[k % self.N]

    def _sqrt_q_cyclotomic(self) -> tuple[tuple[int, ...], int] | None:
        p, a, N, d = self.p, self.a, self.N, self.d
        if a % 2 == 0:
            v = [0] * d
            v[0] = p ** (a // 2)
            return tuple(v), 1
        scale = p ** ((a - 1) // 2)
        if p == 2:
            if N % 8:
                return None
            v = [x + y for x, y in zip(self._root_vec(N // 8), self._root_vec(-N // 8))]
        elif p % 4 == 1:
            if N % p:
                return None
            v = [0] * d
            for j in range(1, p):
                s = _legendre(j, p)
                row = self._root_vec(j * (N // p))
                for i in range(d):
                    v[i] += s * row[i]
        else:
            if N % (4 * p):
                return None
            g = [0] * d
            for j in range(1, p):
                s = _legendre(j, p)
                row = self._root_vec(j * (N // p))
                for i in range(d):
                    g[i] += s * row[i]
            # sqrt(p) = -i * g with i = zeta_N^(N/4)
            v = [-x for x in self._cmul(self._root_vec(N // 4), g)]
        return tuple(x * scale for x in v), 1

    # -- vector arithmetic in Z[zeta_N] -------------------------------------
    def _cmul(self, x: Sequence[int], y: Sequence[int]) -> list[int]:
        d = self.d
        if d == 1:
            return [x[0] * y[0]]
        prod = [0] * (2 * d - 1)
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    if yj:
                        prod[i + j] += xi * yj
        res = prod[:d]
        red = self._red
        for k in range(d, 2 * d - 1):
            c = prod[k]
            if c:
                row = red[k]
                for i in range(d):
                    res[i] += c * row[i]
        return res

    def _cinv(self, x: Sequence[int]) -> tuple[list[int], int]:
        """Inverse of a nonzero element of Z[zeta_N] as (int vector, denominator)."""
        d = self.d
        # columns: x * zeta^j
        cols = []
        for j in range(d):
            e = [0] * d
            e[j] = 1
            cols.append(self._cmul(x, e))
        m = [[Fraction(cols[j][i]) for j in range(d)] + [Fraction(int(i == 0))] for i in range(d)]
        for c in range(d):
            piv = next((r for r in range(c, d) if m[r][c] != 0), None)
            if piv is None:
                raise PoleError("inverse of zero")
            m[c], m[piv] = m[piv], m[c]
            inv = 1 / m[c][c]
            m[c] = [v * inv for v in m[c]]
            for r in range(d):
                if r != c and m[r][c] != 0:
                    f = m[r][c]
                    m[r] = [a - f * b for a, b in zip(m[r], m[c])]
        sol = [m[i][d] for i in range(d)]
        den = 1
        for s in sol:
            den = den * s.denominator // math.gcd(den, s.denominator)
        return [int(s * den) for s in sol], den

    # -- constructors -------------------------------------------------------
    def make(self, a: Sequence[int], b: Sequence[int] | None, den: int = 1) -> "CoeffElement":
        if b is not None and self._u_base is not None and any(b):
            uvec, uden = self._u_base
            bu = self._cmul(b, uvec)
            a = [x * uden + y for x, y in zip(a, bu)]
            den *= uden
            b = None
        if b is None:
            b = self._zero_vec
        if den < 0:
            a = [-x for x in a]
            b = [-x for x in b]
            den = -den
        g = den
        for x in a:
            if x:
                g = math.gcd(g, x)
        for x in b:
            if x:
                g = math.gcd(g, x)
        if g != 1:
            a = [x // g for x in a]
            b = [x // g for x in b]
            den //= g
        return CoeffElement(self, tuple(a), tuple(b), den)

    def from_rational(self, x) -> "CoeffElement":
        x = Fraction(x)
        v = [0] * self.d
        v[0] = x.numerator
        return self.make(v, None, x.denominator)

    def zeta(self, k: int = 1) -> "CoeffElement":
        return self.mono(k, 0)

    def u(self) -> "CoeffElement":
        return self.mono(0, 1)

    def mono(self, root: int, upow: int) -> "CoeffElement":
        """``zeta_N^root * u^upow``."""
        key = (root % self.N, upow)
        hit = self._mono_cache.get(key)
        if hit is not None:
            return hit
        rv = self._red[key[0]]
        half, odd = divmod(upow, 2)
        # u^upow = q^{-half} * u^odd
        num, den = 1, 1
        if half >= 0:
            den = self.q ** half
        else:
            num = self.q ** (-half)
        a = [x * num for x in rv]
        if odd:
            val = self.make(self._zero_vec, a, den)
        else:
            val = self.make(a, None, den)
        self._mono_cache[key] = val
        return val

    def coerce(self, x) -> "CoeffElement":
        if isinstance(x, CoeffElement):
            if x.F is not self:
                raise FieldMismatch("coefficient belongs to a different field")
            return x
        if isinstance(x, (int, Fraction)):
            return self.from_rational(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into the coefficient field")

    def __repr__(self) -> str:
        return f"CoeffField(q={self.q}, N={self.N})"


@lru_cache(maxsize=None)
def get_field(q: int, N: int) -> CoeffField:
    """Shared field instance for ``(q, N)``."""
    return CoeffField(q, N)


class CoeffElement:
    """``(a + b u)/den`` with ``a, b`` integer vectors in the power basis of ``Q(zeta_N)``."""

    __slots__ = ("F", "a", "b", "den", "_h")

    def __init__(self, F: CoeffField, a: tuple[int, ...], b: tuple[int, ...], den: int):
        self.F = F
        self.a = a
        self.b = b
        self.den = den
        self._h = None

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.a) and not any(self.b)

    def is_one(self) -> bool:
        return self.den == 1 and not any(self.b) and self.a[0] == 1 and not any(self.a[1:])

    def _check(self, other) -> "CoeffElement":
        if isinstance(other, CoeffElement):
            if other.F is not self.F:
                raise FieldMismatch("coefficients from different fields")
            return other
        return self.F.coerce(other)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = self._check(other)
        d1, d2 = self.den, o.den
        a = [x * d2 + y * d1 for x, y in zip(self.a, o.a)]
        b = [x * d2 + y * d1 for x, y in zip(self.b, o.b)]
        return self.F.make(a, b, d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return CoeffElement(self.F, tuple(-x for x in self.a), tuple(-x for x in self.b), self.den)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return self.F.zero
            return self.F.make([x * other for x in self.a], [x * other for x in self.b], self.den)
        o = self._check(other)
        F = self.F
        if not any(self.b) and not any(o.b):
            return F.make(F._cmul(self.a, o.a), None, self.den * o.den)
        q = F.q
        A = F._cmul(self.a, o.a)
        B = F._cmul(self.b, o.b)
        C1 = F._cmul(self.a, o.b)
        C2 = F._cmul(self.b, o.a)
        a = [q * x + y for x, y in zip(A, B)]
        b = [q * (x + y) for x, y in zip(C1, C2)]
        return F.make(a, b, q * self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "CoeffElement":
        if self.is_zero():
            raise PoleError("inverse of zero coefficient")
        F = self.F
        if not any(self.b):
            v, den = F._cinv(self.a)
            return F.make([x * self.den for x in v], None, den)
        # (a + b u)^{-1} = (a - b u) q / (q a^2 - b^2)
        q = F.q
        nrm = [q * x - y for x, y in zip(F._cmul(self.a, self.a), F._cmul(self.b, self.b))]
        v, den = F._cinv(nrm)
        a = [x * q * self.den for x in F._cmul(self.a, v)]
        b = [-x * q * self.den for x in F._cmul(self.b, v)]
        return F.make(a, b, den)

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __rtruediv__(self, other):
        return self._check(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = self.F.one, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "CoeffElement":
        """Complex conjugation: ``zeta -> zeta^{-1}``, ``u`` fixed."""
        F = self.F
        d, N = F.d, F.N

        def flip(v):
            out = [0] * d
            for k, c in enumerate(v):
                if c:
                    row = F._red[(N - k) % N]
                    for i in range(d):
                        out[i] += c * row[i]
            return out

        return F.make(flip(self.a), flip(self.b), self.den)

    # -- numerics and identity ---------------------------------------------
    def embed(self) -> complex:
        F = self.F
        w = F._omega
        za = sum(c * w ** k for k, c in enumerate(self.a) if c)
        zb = sum(c * w ** k for k, c in enumerate(self.b) if c)
        return (za + zb * F.q ** -0.5) / self.den

    def key(self) -> tuple:
        return (self.F.q, self.F.N, self.a, self.b, self.den)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.F.from_rational(other)
        if not isinstance(other, CoeffElement):
            return NotImplemented
        return self.F is other.F and self.den == other.den and self.a == other.a and self.b == other.b

    def __hash__(self):
        if self._h is None:
            self._h = hash((self.a, self.b, self.den))
        return self._h

    def to_json(self) -> dict:
        """Exact serialisation: coordinates in the basis ``zeta^k``, ``zeta^k u``."""
        def fr(v):
            return [str(Fraction(x, self.den)) for x in v]
        out = {"zeta": fr(self.a)}
        if any(self.b):
            out["zeta_u"] = fr(self.b)
        return out

    def __repr__(self) -> str:
        terms = []
        for k, c in enumerate(self.a):
            if c:
                terms.append(f"{Fraction(c, self.den)}*z^{k}" if k else f"{Fraction(c, self.den)}")
        for k, c in enumerate(self.b):
            if c:
                terms.append(f"{Fraction(c, self.den)}*z^{k}*u")
        return "(" + (" + ".join(terms) if terms else "0") + ")"


# ---------------------------------------------------------------------------
# dense polynomials over K (lists, low degree first, no trailing zeros)

Poly = list


def p_trim(p: list) -> list:
    while p and p[-1].is_zero():
        p.pop()
    return p


def p_add(x: Sequence, y: Sequence) -> list:
    if len(x) < len(y):
        x, y = y, x
    out = list(x)
    for i, c in enumerate(y):
        out[i] = out[i] + c
    return p_trim(out)


def p_neg(x: Sequence) -> list:
    return [-c for c in x]


def p_scale(x: Sequence, c: CoeffElement) -> list:
    if c.is_zero():
        return []
    return [v * c for v in x]


def p_mul(x: Sequence, y: Sequence) -> list:
    if not x or not y:
        return []
    F = x[0].F
    out = [F.zero] * (len(x) + len(y) - 1)
    for i, a in enumerate(x):
        if a.is_zero():
            continue
        for j, b in enumerate(y):
            if not b.is_zero():
                out[i + j] = out[i + j] + a * b
    return p_trim(out)


def p_mul_binom(x: Sequence, beta: CoeffElement, w: int) -> list:
    """``x * (1 - beta t^w)``."""
    if not x:
        return []
    out = list(x) + [x[0].F.zero] * w
    for i, c in enumerate(x):
        if not c.is_zero():
            out[i + w] = out[i + w] - beta * c
    return p_trim(out)


def p_shift(x: Sequence, k: int) -> list:
    if not x:
        return []
    return [x[0].F.zero] * k + list(x)


def p_eval(x: Sequence, v):
    acc = 0
    for c in reversed(x):
        acc = acc * v + c
    return acc


def p_divmod(x: Sequence, y: Sequence) -> tuple[list, list]:
    if not y:
        raise PoleError("polynomial division by zero")
    x = list(x)
    F = y[0].F
    inv = y[-1].inverse()
    dy = len(y) - 1
    if len(x) <= dy:
        return [], p_trim(x)
    quo = [F.zero] * (len(x) - dy)
    for k in range(len(quo) - 1, -1, -1):
        c = x[k + dy] * inv
        quo[k] = c
        if not c.is_zero():
            for i, b in enumerate(y):
                x[k + i] = x[k + i] - c * b
    return p_trim(quo), p_trim(x[:dy])


def p_monic(x: Sequence) -> list:
    inv = x[-1].inverse()
    return [c * inv for c in x]


def p_gcd(x: Sequence, y: Sequence) -> list:
    a, b = p_trim(list(x)), p_trim(list(y))
    while b:
        _, r = p_divmod(a, b)
        a, b = b, (p_monic(r) if r else [])
    return p_monic(a) if a else []


def p_div_t_minus_one(x: Sequence) -> tuple[list, CoeffElement]:
    """Synthetic division by ``t - 1``; returns (quotient, remainder = x(1))."""
    F = x[0].F
    n = len(x)
    quo = [F.zero] * (n - 1)
    acc = F.zero
    for k in range(n - 1, 0, -1):
        acc = acc + x[k]
        quo[k - 1] = acc
    rem = acc + x[0]
    return p_trim(quo), rem


def p_div_linear(x: Sequence, a) -> tuple[list, CoeffElement]:
    """Synthetic division by ``t - a``; returns (quotient, remainder = x(a))."""
    F = x[0].F
    n = len(x)
    quo = [F.zero] * (n - 1)
    acc = F.zero
    for k in range(n - 1, 0, -1):
        acc = acc * a + x[k]
        quo[k - 1] = acc
    return p_trim(quo), acc * a + x[0]


def p_cancel_at(num: Sequence, den: Sequence, a) -> tuple[list, list]:
    """Strip common factors ``t - a`` from ``num`` and ``den``."""
    num, den = list(num), list(den)
    while len(num) > 1 and len(den) > 1:
        qn, rn = p_div_linear(num, a)
        qd, rd = p_div_linear(den, a)
        if not (rn.is_zero() and rd.is_zero()):
            break
        num, den = qn, qd
    return num, den


def p_order_at_one(x: Sequence) -> tuple[int, list]:
    """(k, y) with ``x = (t - 1)^k y`` and ``y(1) != 0``."""
    k = 0
    cur = list(x)
    while True:
        quo, rem = p_div_t_minus_one(cur)
        if not rem.is_zero():
            return k, cur
        cur = quo
        k += 1


# ---------------------------------------------------------------------------
# rational functions


class RatFunc:
    """``t^val * num(t)/den(t)`` over a :class:`CoeffField`."""

    __slots__ = ("F", "val", "num", "den", "region")

    def __init__(self, F: CoeffField, num: Sequence, den: Sequence | None = None, val: int = 0,
                 region=None, _canonical: bool = False):
        self.F = F
        self.region = region
        num = p_trim([F.coerce(c) for c in num])
        den = [F.one] if den is None else p_trim([F.coerce(c) for c in den])
        if not den:
            raise PoleError("zero denominator")
        if not num:
            self.val, self.num, self.den = 0, [], [F.one]
            return
        if not _canonical:
            while num[0].is_zero():
                num.pop(0)
                val += 1
            while den[0].is_zero():
                den.pop(0)
                val -= 1
            c0 = den[0]
            if not c0.is_one():
                inv = c0.inverse()
                num = [c * inv for c in num]
                den = [c * inv for c in den]
        self.val, self.num, self.den = val, num, den

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, F: CoeffField, c) -> "RatFunc":
        return cls(F, [F.coerce(c)])

    @classmethod
    def monomial(cls, F: CoeffField, c, k: int) -> "RatFunc":
        return cls(F, [F.coerce(c)], val=k)

    @classmethod
    def zero(cls, F: CoeffField) -> "RatFunc":
        return cls(F, [])

    @classmethod
    def one(cls, F: CoeffField) -> "RatFunc":
        return cls(F, [F.one])

    @classmethod
    def inv_binomial(cls, F: CoeffField, beta, w: int) -> "RatFunc":
        """``1/(1 - beta t^w)`` for ``w >= 1``."""
        den = [F.one] + [F.zero] * (w - 1) + [-F.coerce(beta)]
        return cls(F, [F.one], den)

    # -- structure ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def _chk(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            if other.F is not self.F:
                raise FieldMismatch("rational functions over different fields")
            return other
        return RatFunc.const(self.F, other)

    def __add__(self, other):
        o = self._chk(other)
        if self.is_zero():
            return o._with_region(_meet(self.region, o.region))
        if o.is_zero():
            return self._with_region(_meet(self.region, o.region))
        v = min(self.val, o.val)
        if self.den == o.den:
            n = p_add(p_shift(self.num, self.val - v), p_shift(o.num, o.val - v))
            return RatFunc(self.F, n, self.den, v, region=_meet(self.region, o.region))
        n = p_add(p_shift(p_mul(self.num, o.den), self.val - v), p_shift(p_mul(o.num, self.den), o.val - v))
        return RatFunc(self.F, n, p_mul(self.den, o.den), v, region=_meet(self.region, o.region))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.F, p_neg(self.num), self.den, self.val, region=self.region, _canonical=True)

    def __sub__(self, other):
        return self + (-self._chk(other))

    def __rsub__(self, other):
        return self._chk(other) - self

    def __mul__(self, other):
        if isinstance(other, CoeffElement) or isinstance(other, (int, Fraction)):
            c = self.F.coerce(other)
            if c.is_zero():
                return RatFunc.zero(self.F)
            return RatFunc(self.F, p_scale(self.num, c), self.den, self.val, region=self.region, _canonical=True)
        o = self._chk(other)
        if self.is_zero() or o.is_zero():
            return RatFunc.zero(self.F)
        return RatFunc(self.F, p_mul(self.num, o.num), p_mul(self.den, o.den), self.val + o.val,
                       region=_meet(self.region, o.region))

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise PoleError("inverse of the zero rational function")
        return RatFunc(self.F, self.den, self.num, -self.val, region=self.region)

    def __truediv__(self, other):
        return self * self._chk(other).inverse()

    def __rtruediv__(self, other):
        return self._chk(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = RatFunc.one(self.F)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            if isinstance(other, (int, Fraction, CoeffElement)):
                other = RatFunc.const(self.F, other)
            else:
                return NotImplemented
        if other.F is not self.F:
            return False
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        if self.val != other.val:
            return False
        return p_mul(self.num, other.den) == p_mul(other.num, self.den)

    __hash__ = None

    def _with_region(self, region):
        return RatFunc(self.F, self.num, self.den, self.val, region=region, _canonical=True)

    def with_region(self, region) -> "RatFunc":
        return self._with_region(region)

    # -- evaluation ---------------------------------------------------------
    def eval_exact(self, x) -> CoeffElement:
        """Exact value at ``t = x`` for ``x`` in the field (raises at poles)."""
        F = self.F
        x = F.coerce(x)
        if self.is_zero():
            return F.zero
        if x.is_zero():
            if self.val < 0:
                raise PoleError("evaluation at a pole (t = 0)")
            return F.zero if self.val > 0 else self.num[0]
        num, den = p_cancel_at(self.num, self.den, x)
        d = p_eval(den, x)
        if d.is_zero():
            raise PoleError("evaluation at a pole")
        return (x ** self.val) * p_eval(num, x) * d.inverse()

    def eval(self, t0: complex) -> complex:
        """Numeric value at ``t = t0`` under the fixed complex embedding."""
        num_p, den_p = self.num, self.den
        den = sum(c.embed() * t0 ** i for i, c in enumerate(den_p))
        scale = sum(abs(c.embed()) * abs(t0) ** i for i, c in enumerate(den_p))
        if abs(den) <= 1e-9 * scale and complex(t0).imag == 0:
            # possibly a removable singularity at a rational point
            num_p, den_p = p_cancel_at(num_p, den_p, self.F.coerce(Fraction(complex(t0).real)))
            den = sum(c.embed() * t0 ** i for i, c in enumerate(den_p))
        if den == 0:
            raise PoleError("numeric evaluation at a pole")
        num = sum(c.embed() * t0 ** i for i, c in enumerate(num_p))
        return num / den * t0 ** self.val

    def order_at_one(self) -> float | int:
        """Order of vanishing at ``t = 1`` (negative for a pole, ``inf`` for zero)."""
        if self.is_zero():
            return math.inf
        kn, _ = p_order_at_one(self.num)
        kd, _ = p_order_at_one(self.den)
        return kn - kd

    def lead_at_one(self) -> CoeffElement:
        """Leading coefficient ``lim f(t)/(1-t)^k`` at ``t = 1`` where ``k`` is the order."""
        if self.is_zero():
            return self.F.zero
        kn, yn = p_order_at_one(self.num)
        kd, yd = p_order_at_one(self.den)
        val = p_eval(yn, self.F.one) * p_eval(yd, self.F.one).inverse()
        return -val if (kn - kd) % 2 else val

    def value_at_one(self) -> CoeffElement:
        k = self.order_at_one()
        if k < 0:
            raise PoleError("pole at t = 1")
        if k > 0:
            return self.F.zero
        return self.lead_at_one()

    def degree_bound(self) -> int:
        return max(len(self.num), len(self.den))

    def to_json(self) -> dict:
        return {
            "t_shift": self.val,
            "num": [c.to_json() for c in self.num],
            "den": [c.to_json() for c in self.den],
        }

    def __repr__(self) -> str:
        return f"RatFunc(t^{self.val} * {self.num} / {self.den})"


def _meet(r1, r2):
    if r1 is None:
        return r2
    if r2 is None:
        return r1
    return r1.meet(r2)


# ---------------------------------------------------------------------------
# free-function helpers


def rf_normalize(f: RatFunc) -> RatFunc:
    """Reduce ``num/den`` by their gcd; the result has ``den(0) = 1``.

    Idempotent, and equal inputs give identical outputs.
    """
    if f.is_zero():
        return RatFunc.zero(f.F)
    g = p_gcd(f.num, f.den)
    num, r1 = p_divmod(f.num, g)
    den, r2 = p_divmod(f.den, g)
    assert not r1 and not r2
    return RatFunc(f.F, num, den, f.val, region=f.region)


def rf_order_at_one(f: RatFunc):
    return f.order_at_one()


def rf_eval(f: RatFunc, t0: complex) -> complex:
    return f.eval(t0)


def rf_lead(f: RatFunc) -> CoeffElement:
    return f.lead_at_one()


def rf_sum(items: Iterable[RatFunc], F: CoeffField) -> RatFunc:
    out = RatFunc.zero(F)
    for x in items:
        out = out + x
    return out
