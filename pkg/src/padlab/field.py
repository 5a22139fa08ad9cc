"""Capped-precision arithmetic in a finite extension of Q_p.

The field is presented as a tower: an unramified extension U = Q_p[t]/(g)
of degree f, followed by an Eisenstein extension K = U[pi]/(E) of degree e.
Integral elements are stored as e*f integer coordinates over the basis
t^i pi^j (index ``j*f + i``), so the valuation of an integral element is
read off its coordinates: ``v = min(e*v_p(c_ij) + j)``.

A nonzero :class:`PElement` is a pair (valuation, unit part).  The unit part
is known modulo pi^rel, where the relative precision ``rel`` never exceeds
the context cap N.  Exact inputs (integer and rational literals) carry full
relative precision; subtraction with cancellation and division by elements
of positive valuation lower the absolute precision, which each element
records in ``prec``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .errors import (
    ContextMismatch,
    DivideByZero,
    LiteralError,
    NegativeValuationResidue,
    NonPrime,
    NotEisenstein,
    NotIrreducibleModP,
    PrecisionExhausted,
    PrecisionTooSmall,
)

INF = math.inf


def is_prime(n):
    if not isinstance(n, int) or n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def vp(n, p):
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        return INF
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# -- polynomials over F_p, little-endian coefficient lists -------------------

def _fp_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mod(a, g, p):
    a = _fp_trim([c % p for c in a])
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    while len(a) - 1 >= dg:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dg
        for i, gi in enumerate(g):
            a[shift + i] = (a[shift + i] - c * gi) % p
        _fp_trim(a)
    return a


def _fp_mulmod(a, b, g, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return _fp_mod(out, g, p)


def _fp_powmod(a, n, g, p):
    result = [1]
    base = _fp_mod(a, g, p)
    while n:
        if n & 1:
            result = _fp_mulmod(result, base, g, p)
        base = _fp_mulmod(base, base, g, p)
        n >>= 1
    return result


def _fp_gcd(a, b, p):
    a = _fp_trim([c % p for c in a])
    b = _fp_trim([c % p for c in b])
    while b:
        a, b = b, _fp_mod(a, b, p)
    return a


def _prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def irreducible_mod_p(g, p):
    """Rabin's test for a monic polynomial (little-endian integer coefficients)."""
    g = [c % p for c in g]
    f = len(g) - 1
    if f <= 1:
        return f == 1
    x = [0, 1]
    if _fp_powmod(x, p ** f, g, p) != _fp_mod(x, g, p):
        return False
    for r in _prime_factors(f):
        h = _fp_powmod(x, p ** (f // r), g, p)
        h = h + [0] * (2 - len(h))
        h[1] -= 1
        if len(_fp_gcd(h, g, p)) > 1:
            return False
    return True


# -- the context --------------------------------------------------------------

def _as_ucoeff(c, f):
    if isinstance(c, int):
        return (c,) + (0,) * (f - 1)
    c = tuple(int(x) for x in c)
    if len(c) > f:
        raise NotEisenstein(f"coefficient {c} has more than {f} coordinates")
    return c + (0,) * (f - len(c))


def make_context(p, unram=(0, 1), eis=(0, 1), precision=8):
    """Validate a tower description and build its :class:`LocalFieldContext`.

    ``unram`` is the monic defining polynomial of the unramified part, little
    endian.  ``eis`` is the monic Eisenstein polynomial, little endian, each
    coefficient an integer or a list of t-coordinates.  The degree-one
    polynomial ``x`` stands for the trivial Eisenstein step (pi = p).
    """
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime", p=p)
    unram = [int(c) for c in unram]
    if len(unram) < 2 or unram[-1] != 1:
        raise NotIrreducibleModP("unramified polynomial must be monic of degree >= 1")
    if not irreducible_mod_p(unram, p):
        raise NotIrreducibleModP(f"{unram} is reducible mod {p}")
    f = len(unram) - 1
    eis = [_as_ucoeff(c, f) for c in eis]
    if len(eis) < 2 or eis[-1] != _as_ucoeff(1, f):
        raise NotEisenstein("Eisenstein polynomial must be monic of degree >= 1")
    e = len(eis) - 1
    if e == 1 and not any(eis[0]):
        eis[0] = _as_ucoeff(-p, f)
    for j, c in enumerate(eis[:-1]):
        if any(x % p for x in c):
            raise NotEisenstein(f"coefficient {j} is not divisible by p")
    if not any((x // p) % p for x in eis[0]):
        raise NotEisenstein("constant coefficient has valuation > 1")
    if not isinstance(precision, int) or precision < 2 * e:
        raise PrecisionTooSmall(f"precision {precision} < 2*e = {2 * e}")
    return LocalFieldContext(p, tuple(unram), tuple(eis), precision)


class LocalFieldContext:
    """Immutable description of K with precision cap N.  Build via :func:`make_context`."""

    def __init__(self, p, unram, eis, precision):
        self.p = p
        self.unram = tuple(unram)
        self.eis = tuple(tuple(c) for c in eis)
        self.f = len(unram) - 1
        self.e = len(eis) - 1
        self.N = precision
        self.m = self.e * self.f
        self.q_res = p ** self.f
        self._k = -(-2 * precision // self.e) + 2
        self._mod = p ** self._k
        self._nz = self._structure(self._mod)
        self._one = (1,) + (0,) * (self.m - 1)
        self._zero = (0,) * self.m
        self._pi_cache = {0: self._one}
        # pi^e = p * eps with eps a unit
        eps = []
        for c in self.eis[:-1]:
            eps.extend((-x // p) % self._mod for x in c)
        self._eps = tuple(eps)
        self._eps_inv = self._iinv(self._eps)
        self._eps_inv_cache = {0: self._one}

    # identity by tower and precision
    def key(self):
        return (self.p, self.unram, self.eis, self.N)

    def __eq__(self, other):
        return isinstance(other, LocalFieldContext) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"LocalFieldContext(p={self.p}, e={self.e}, f={self.f}, N={self.N})"

    @property
    def degree(self):
        return self.m

    @property
    def v_p(self):
        """Valuation of p in pi-units."""
        return self.e

    def describe(self):
        return {
            "p": self.p, "unram": list(self.unram),
            "eis": [list(c) if self.f > 1 else c[0] for c in self.eis],
            "precision": self.N, "degree": self.m, "ramification": self.e,
            "residue_degree": self.f, "residue_field_size": self.q_res, "v_p": self.e,
        }

    def with_precision(self, precision):
        return make_context(self.p, self.unram, [list(c) for c in self.eis], precision)

    # -- raw tower multiplication, used to build structure constants --
    def _umul(self, a, b, mod):
        f = self.f
        prod = [0] * (2 * f - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        g = self.unram
        for d in range(2 * f - 2, f - 1, -1):
            c = prod[d]
            if c:
                prod[d] = 0
                for i in range(f):
                    prod[d - f + i] -= c * g[i]
        return [x % mod for x in prod[:f]]

    def _kmul_raw(self, x, y, mod):
        e, f = self.e, self.f
        prod = [[0] * f for _ in range(2 * e - 1)]
        for a in range(e):
            for b in range(e):
                t = self._umul(x[a], y[b], mod)
                row = prod[a + b]
                for i in range(f):
                    row[i] += t[i]
        for d in range(2 * e - 2, e - 1, -1):
            c = prod[d]
            if any(c):
                prod[d] = [0] * f
                for j in range(e):
                    t = self._umul(c, self.eis[j], mod)
                    row = prod[d - e + j]
                    for i in range(f):
                        row[i] -= t[i]
        return tuple(x % mod for row in prod[:e] for x in row)

    @lru_cache(maxsize=None)
    def _structure(self, mod):
        """Sparse structure constants: ``nz[a][b]`` lists (c, s) with b_a*b_b = sum s*b_c."""
        e, f, m = self.e, self.f, self.m
        nz = []
        for a in range(m):
            row = []
            for b in range(m):
                xa = [[0] * f for _ in range(e)]
                yb = [[0] * f for _ in range(e)]
                xa[a // f][a % f] = 1
                yb[b // f][b % f] = 1
                prod_ab = self._kmul_raw(xa, yb, mod)
                row.append(tuple((c, s) for c, s in enumerate(prod_ab) if s))
            nz.append(tuple(row))
        return tuple(nz)

    def structure_tensor(self, mod):
        """Dense (m, m, m) structure constants reduced mod ``mod``."""
        nz = self._structure(mod)
        m = self.m
        t = [[[0] * m for _ in range(m)] for _ in range(m)]
        for a in range(m):
            for b in range(m):
                for c, s in nz[a][b]:
                    t[a][b][c] = s
        return t

    # -- integral coordinate arithmetic mod p^_k --
    def _imul(self, x, y, mod=None, nz=None):
        mod = mod or self._mod
        if self.m == 1:
            return ((x[0] * y[0]) % mod,)
        nz = nz or (self._nz if mod == self._mod else self._structure(mod))
        out = [0] * self.m
        for a, xa in enumerate(x):
            if xa:
                row = nz[a]
                for b, yb in enumerate(y):
                    if yb:
                        v = xa * yb
                        for c, s in row[b]:
                            out[c] += v * s
        return tuple(o % mod for o in out)

    def _iadd(self, x, y, mod=None):
        mod = mod or self._mod
        return tuple((a + b) % mod for a, b in zip(x, y))

    def _isub(self, x, y, mod=None):
        mod = mod or self._mod
        return tuple((a - b) % mod for a, b in zip(x, y))

    def _ineg(self, x, mod=None):
        mod = mod or self._mod
        return tuple((-a) % mod for a in x)

    def _ipow(self, x, n, mod=None):
        result = self._one
        base = x
        while n:
            if n & 1:
                result = self._imul(result, base, mod)
            base = self._imul(base, base, mod)
            n >>= 1
        return result

    def _ival(self, x):
        best = INF
        e, f, p = self.e, self.f, self.p
        for idx, c in enumerate(x):
            if c:
                v = e * vp(c, p) + idx // f
                if v < best:
                    best = v
        return best

    @lru_cache(maxsize=None)
    def _moduli(self, r):
        e, f, p = self.e, self.f, self.p
        out = []
        for idx in range(self.m):
            ex = min(-(-(r - idx // f) // e), self._k)
            out.append(p ** ex if ex > 0 else 1)
        return tuple(out)

    def _ireduce(self, x, r):
        """Canonical representative of an integral element modulo pi^r."""
        if r == INF:
            return x
        if r <= 0:
            return self._zero
        return tuple(c % q for c, q in zip(x, self._moduli(r)))

    def _pi_pow(self, s):
        cached = self._pi_cache.get(s)
        if cached is None:
            if self.e > 1:
                pi = tuple(1 if idx == self.f else 0 for idx in range(self.m))
            else:
                pi = tuple((-c) % self._mod for c in self.eis[0])
            cached = self._ipow(pi, s)
            self._pi_cache[s] = cached
        return cached

    def _eps_inv_pow(self, s):
        cached = self._eps_inv_cache.get(s)
        if cached is None:
            cached = self._ipow(self._eps_inv, s)
            self._eps_inv_cache[s] = cached
        return cached

    def _idiv_pi(self, x, s):
        """Exact division of an integral element by pi^s (requires v(x) >= s, s <= N)."""
        if s == 0:
            return x
        c = -(-s // self.e)
        y = x if c * self.e == s else self._imul(x, self._pi_pow(c * self.e - s))
        pc = self.p ** c
        y = tuple(v // pc for v in y)
        return self._imul(y, self._eps_inv_pow(c))

    def _iinv(self, x):
        """Inverse of an integral unit mod p^_k: residue-field inverse, then Newton."""
        w = self._ipow(x, self.q_res - 2)
        two = (2,) + (0,) * (self.m - 1)
        for _ in range(64):
            t = self._imul(x, w)
            if t == self._one:
                return w
            w = self._imul(w, self._isub(two, t))
        raise PrecisionExhausted("unit inverse did not converge")

    # -- element construction --
    def _make(self, shift, x, P):
        """Element pi^shift * x, where integral x is known modulo pi^P (P may be INF)."""
        if P != INF:
            x = self._ireduce(x, P)
        w = self._ival(x)
        if w == INF or w >= P:
            return PElement(self, INF, None, shift + P)
        rel = self.N if P == INF else min(self.N, P - w)
        u = self._ireduce(self._idiv_pi(x, w), rel)
        return PElement(self, shift + w, u, shift + w + rel)

    def zero(self, prec=INF):
        return PElement(self, INF, None, prec)

    def one(self):
        return PElement(self, 0, self._ireduce(self._one, self.N), self.N)

    @property
    def uniformizer(self):
        return PElement(self, 1, self._ireduce(self._one, self.N), 1 + self.N)

    def from_int(self, n):
        if n == 0:
            return self.zero()
        s = vp(n, self.p)
        n1 = n // self.p ** s
        x = (n1 % self._mod,) + (0,) * (self.m - 1)
        if s:
            x = self._imul(x, self._eps_inv_pow(s))
        return self._make(self.e * s, x, INF)

    def from_rational(self, q):
        q = Fraction(q)
        if q.denominator == 1:
            return self.from_int(q.numerator)
        return self.from_int(q.numerator) / self.from_int(q.denominator)

    def from_coords(self, coords, prec=INF):
        """Integral element with the given tower coordinates (t^i pi^j at index j*f+i)."""
        coords = tuple(int(c) % self._mod for c in coords)
        if len(coords) != self.m:
            raise LiteralError(f"expected {self.m} coordinates")
        return self._make(0, coords, prec)

    def element(self, value):
        if isinstance(value, PElement):
            if value.ctx is not self and value.ctx != self:
                raise ContextMismatch("element belongs to a different field")
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a field element")
        if isinstance(value, int):
            return self.from_int(value)
        if isinstance(value, Fraction):
            return self.from_rational(value)
        if isinstance(value, str):
            return parse_element(value, self)
        raise TypeError(f"cannot convert {type(value).__name__} to a field element")

    def coerce(self, x):
        """Move an element from a context with the same tower (any precision) into this one."""
        if x.ctx.key()[:3] != self.key()[:3]:
            raise ContextMismatch("different towers")
        if x.is_zero():
            return self.zero(x.prec)
        rel = min(x.rel, self.N)
        return PElement(self, x.val, self._ireduce(x.unit, rel), x.val + rel)

    # -- residues, sampling --
    def residues(self, nonzero=False):
        """Residue-field representatives as f-tuples in lexicographic order."""
        for d in product(range(self.p), repeat=self.f):
            if nonzero and not any(d):
                continue
            yield d

    def _digit_coords(self, d):
        return tuple(d) + (0,) * (self.m - self.f)

    def coords_from_digits(self, digits):
        """Integral coordinates of sum d_k pi^k (Horner on the pi-digits)."""
        x = self._zero
        for d in reversed(digits):
            x = self._imul(x, self._pi_pow(1)) if any(x) else x
            x = self._iadd(x, self._digit_coords(d))
        return x

    def element_from_digits(self, digits, shift=0, prec=None):
        digits = [tuple(d) if not isinstance(d, int) else (d,) + (0,) * (self.f - 1) for d in digits]
        lead = 0
        while lead < len(digits) and not any(digits[lead]):
            lead += 1
        digits = digits[lead:]
        P = INF if prec is None else prec - shift - lead
        if not digits:
            return self.zero(INF if prec is None else prec)
        return self._make(shift + lead, self.coords_from_digits(digits), P)

    def random_integral(self, rng, min_val=0):
        """Uniform sample of pi^min_val O_K known modulo pi^N."""
        top = self.p ** -(-self.N // self.e)
        x = tuple(rng.randrange(top) for _ in range(self.m))
        if min_val:
            x = self._imul(x, self._pi_pow(min_val))
        return self._make(0, x, self.N)

    def random_unit(self, rng):
        while True:
            x = self.random_integral(rng)
            if not x.is_zero() and x.val == 0:
                return x

    def random_element(self, rng, vmin, vmax):
        u = self.random_unit(rng)
        return PElement(self, rng.randint(vmin, vmax), u.unit, None)._fill_prec()

    def random_unit_coords(self, rng, depth):
        """A random unit given by ``depth`` pi-digits (first digit nonzero)."""
        res = list(self.residues())
        digits = [rng.choice(res[1:])] + [rng.choice(res) for _ in range(depth - 1)]
        return digits


class PElement:
    """Element of K: ``pi^val * unit`` with the unit known modulo pi^(prec - val).

    Zero has ``val == INF``; its ``prec`` is INF for an exact zero and finite
    for a value known only to vanish modulo pi^prec.  Equality is congruence
    modulo the smaller of the two precisions.
    """

    __slots__ = ("ctx", "val", "unit", "prec")

    def __init__(self, ctx, val, unit, prec):
        self.ctx = ctx
        self.val = val
        self.unit = unit
        self.prec = prec

    def _fill_prec(self):
        self.prec = self.val + self.ctx.N
        return self

    # -- basic queries --
    def is_zero(self):
        return self.val == INF

    def is_exact_zero(self):
        return self.val == INF and self.prec == INF

    @property
    def rel(self):
        return self.prec - self.val

    def valuation(self):
        return self.val

    def residue(self):
        if self.val < 0:
            raise NegativeValuationResidue(f"v = {self.val} < 0")
        f = self.ctx.f
        if self.val == INF and self.prec < 1:
            raise PrecisionExhausted("residue not determined at this precision")
        if self.val > 0:
            return 0 if f == 1 else (0,) * f
        r = tuple(c % self.ctx.p for c in self.unit[:f])
        return r[0] if f == 1 else r

    def unit_element(self):
        if self.is_zero():
            raise DivideByZero("zero has no unit part")
        return PElement(self.ctx, 0, self.unit, self.rel)

    def lift(self):
        """Same representative, promoted to full relative precision."""
        if self.is_zero():
            return self.ctx.zero()
        return PElement(self.ctx, self.val, self.unit, self.val + self.ctx.N)

    def with_prec(self, P):
        if P >= self.prec:
            return self
        if self.val >= P:
            return self.ctx.zero(P)
        rel = P - self.val
        return PElement(self.ctx, self.val, self.ctx._ireduce(self.unit, rel), P)

    def integral_coords(self):
        """Tower coordinates of an integral element modulo pi^prec."""
        ctx = self.ctx
        if self.is_zero():
            return ctx._zero
        if self.val < 0:
            raise NegativeValuationResidue("element is not integral")
        return ctx._ireduce(ctx._imul(self.unit, ctx._pi_pow(self.val)), self.prec)

    def to_int(self):
        """Integer representative of an integral element of Q_p (modulo p^prec)."""
        if self.ctx.m != 1:
            raise TypeError("to_int needs K = Q_p")
        return self.integral_coords()[0]

    def digits(self):
        """pi-adic digits of the unit part, little endian, ``rel`` of them."""
        ctx = self.ctx
        if self.is_zero():
            return []
        out = []
        y = self.unit
        f = ctx.f
        for _ in range(self.rel):
            d = tuple(c % ctx.p for c in y[:f])
            out.append(d[0] if f == 1 else d)
            y = ctx._isub(y, ctx._digit_coords(d))
            y = ctx._idiv_pi(y, 1) if any(y) else y
        return out

    def key(self):
        return (self.val, self.unit, self.prec)

    # -- arithmetic --
    def _coerce(self, other):
        if isinstance(other, PElement):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise ContextMismatch("elements from different fields")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.ctx.from_rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ctx = self.ctx
        if self.val == INF or other.val == INF:
            P = min(self.prec, other.prec)
            if self.val == INF and other.val == INF:
                return ctx.zero(P)
            y = other if self.val == INF else self
            return y.with_prec(P)
        t = min(self.val, other.val)
        P = min(self.prec, other.prec)
        if P <= t:
            return ctx.zero(P)
        r = P - t
        acc = [0] * ctx.m
        for z in (self, other):
            d = z.val - t
            if d < r:
                term = z.unit if d == 0 else ctx._imul(z.unit, ctx._pi_pow(d))
                for i, c in enumerate(term):
                    acc[i] += c
        return ctx._make(t, tuple(c % ctx._mod for c in acc), r)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        ctx = self.ctx
        return PElement(ctx, self.val, ctx._ireduce(ctx._ineg(self.unit), self.rel), self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ctx = self.ctx
        if self.val == INF or other.val == INF:
            if self.val == INF and other.val == INF:
                return ctx.zero(self.prec + other.prec)
            z, y = (self, other) if self.val == INF else (other, self)
            return ctx.zero(z.prec + y.val)
        rel = min(self.rel, other.rel)
        u = ctx._ireduce(ctx._imul(self.unit, other.unit), rel)
        v = self.val + other.val
        return PElement(ctx, v, u, v + rel)

    __rmul__ = __mul__

    def inverse(self):
        if self.val == INF:
            if self.prec == INF:
                raise DivideByZero("division by zero")
            raise PrecisionExhausted("divisor is zero at working precision")
        ctx = self.ctx
        rel = self.rel
        return PElement(ctx, -self.val, ctx._ireduce(ctx._iinv(self.unit), rel), -self.val + rel)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        inv = other.inverse()
        if self.val == INF:
            return self.ctx.zero(self.prec + inv.val)
        return self * inv

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        ctx = self.ctx
        if n == 0:
            return ctx.one()
        if self.val == INF:
            if n < 0:
                return self.inverse()
            return ctx.zero(self.prec * n if self.prec > 0 else self.prec)
        base = self if n > 0 else self.inverse()
        n = abs(n)
        u = ctx._ireduce(ctx._ipow(base.unit, n), base.rel)
        v = base.val * n
        return PElement(ctx, v, u, v + base.rel)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return (self - other).is_zero()

    __hash__ = None

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"PElement({format_element(self)})"


# -- literal syntax -----------------------------------------------------------
#
#   element := INT | INT "/" INT | "0" ["~" INT] | digits ["e" SINT] ["~" SINT]
#   digits  := "[" digit { "," digit } "]"
#   digit   := INT { ":" INT }            (f integers, t-coordinates, when f > 1)
#
# A digit list [d0, d1, ...] with shift s denotes pi^s * (d0 + d1 pi + ...).
# "~P" is the absolute precision; it is omitted when the unit part carries
# the full relative precision N.

_LIT_RE = re.compile(
    r"\[(?P<digits>[0-9:,\s]*)\](?:e(?P<shift>-?\d+))?(?:~(?P<prec>-?\d+))?"
)
_INT_RE = re.compile(r"-?\d+(?:/-?\d+)?")
_ZERO_RE = re.compile(r"0~(?P<prec>-?\d+)")


def _fmt_digit(d):
    return str(d) if isinstance(d, int) else ":".join(str(c) for c in d)


def format_element(x):
    if x.is_zero():
        return "0" if x.prec == INF else f"0~{x.prec}"
    ds = x.digits()
    while len(ds) > 1 and (ds[-1] == 0 or (not isinstance(ds[-1], int) and not any(ds[-1]))):
        ds.pop()
    out = "[" + ",".join(_fmt_digit(d) for d in ds) + "]"
    if x.val != 0:
        out += f"e{x.val}"
    if x.rel != x.ctx.N:
        out += f"~{x.prec}"
    return out


def parse_digits(text, ctx):
    digits = []
    body = text.strip()
    if not body:
        return digits
    for part in body.split(","):
        coords = [c.strip() for c in part.split(":")]
        if len(coords) != ctx.f or not all(c.isdigit() for c in coords):
            raise LiteralError(f"digit '{part.strip()}' needs {ctx.f} integer coordinate(s)")
        vals = tuple(int(c) for c in coords)
        if any(v >= ctx.p for v in vals):
            raise LiteralError(f"digit '{part.strip()}' out of range for p = {ctx.p}")
        digits.append(vals)
    return digits


def parse_element(text, ctx):
    """Parse an element literal (integer, rational or digit form) in ``ctx``."""
    s = text.strip()
    m = _LIT_RE.fullmatch(s)
    if m:
        digits = parse_digits(m.group("digits"), ctx)
        shift = int(m.group("shift") or 0)
        prec = int(m.group("prec")) if m.group("prec") is not None else None
        if not digits:
            return ctx.zero(INF if prec is None else prec)
        if prec is None:
            x = ctx.element_from_digits(digits, shift)
        else:
            x = ctx.element_from_digits(digits, shift, prec)
        return x
    m = _ZERO_RE.fullmatch(s)
    if m:
        return ctx.zero(int(m.group("prec")))
    if _INT_RE.fullmatch(s):
        try:
            return ctx.from_rational(Fraction(s))
        except ZeroDivisionError:
            raise DivideByZero(f"literal {s!r} has zero denominator") from None
    raise LiteralError(f"cannot parse element literal {text!r}")


# -- vectors and balls --------------------------------------------------------

class PVector:
    """Ordered tuple of elements of one field; valuation is the coordinate minimum."""

    __slots__ = ("ctx", "coords")

    def __init__(self, coords, ctx=None):
        coords = list(coords)
        if ctx is None:
            if not coords:
                raise ValueError("empty vector needs a context")
            ctx = next(c.ctx for c in coords if isinstance(c, PElement))
        self.ctx = ctx
        self.coords = tuple(ctx.element(c) for c in coords)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def valuation(self):
        return min((c.val for c in self.coords), default=INF)

    @property
    def prec(self):
        return min((c.prec for c in self.coords), default=INF)

    def is_zero(self):
        return all(c.is_zero() for c in self.coords)

    def __add__(self, other):
        return PVector([a + b for a, b in zip(self, other)], self.ctx)

    def __sub__(self, other):
        return PVector([a - b for a, b in zip(self, other)], self.ctx)

    def __neg__(self):
        return PVector([-a for a in self], self.ctx)

    def scale(self, c):
        return PVector([c * a for a in self], self.ctx)

    def lift(self):
        return PVector([a.lift() for a in self], self.ctx)

    def __eq__(self, other):
        return len(self) == len(other) and all(a == b for a, b in zip(self, other))

    __hash__ = None

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"

    def __repr__(self):
        return f"PVector{self}"


class Ball:
    """Closed ball {x : v(x - center) >= radius}."""

    def __init__(self, center, radius):
        if isinstance(center, PElement):
            center = PVector([center])
        self.center = center
        self.radius = radius

    @property
    def ctx(self):
        return self.center.ctx

    def contains(self, x):
        if isinstance(x, PElement):
            x = PVector([x])
        return (x - self.center).valuation() >= self.radius

    def __repr__(self):
        return f"Ball({self.center}, {self.radius})"


def ball_contains(ball, x):
    return ball.contains(x)


def valuation(x):
    return x.valuation()


def residue(x):
    return x.residue()


class ResidueRing:
    """The finite ring O_K / p^k O_K; elements are coordinate tuples over the tower basis."""

    def __init__(self, ctx, k):
        self.ctx = ctx
        self.k = k
        self.mod = ctx.p ** k
        self.m = ctx.m
        self._nz = ctx._structure(self.mod)
        self.zero = (0,) * self.m
        self.one = (1,) + (0,) * (self.m - 1)

    def add(self, x, y):
        mod = self.mod
        return tuple((a + b) % mod for a, b in zip(x, y))

    def sub(self, x, y):
        mod = self.mod
        return tuple((a - b) % mod for a, b in zip(x, y))

    def neg(self, x):
        mod = self.mod
        return tuple((-a) % mod for a in x)

    def mul(self, x, y):
        return self.ctx._imul(x, y, self.mod, self._nz)

    def scale(self, n, x):
        mod = self.mod
        return tuple((n * a) % mod for a in x)

    def pow(self, x, n):
        result, base = self.one, x
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def val(self, x):
        """pi-adic valuation, INF when x vanishes mod p^k."""
        return self.ctx._ival(x)

    def pi_pow(self, s):
        ctx = self.ctx
        if ctx.e > 1:
            pi = tuple(1 if idx == ctx.f else 0 for idx in range(self.m))
        else:
            pi = tuple((-c) % self.mod for c in ctx.eis[0])
        return self.pow(pi, s)

    def from_element(self, x):
        if x.is_zero():
            return self.zero
        if x.val < 0:
            from .errors import NonIntegralCoefficient
            raise NonIntegralCoefficient(f"{x} is not integral")
        return tuple(c % self.mod for c in x.integral_coords())

    def to_element(self, x):
        return self.ctx._make(0, tuple(int(c) for c in x), min(self.ctx.e * self.k, self.ctx.N))

    def random(self, rng, min_val=0):
        x = tuple(rng.randrange(self.mod) for _ in range(self.m))
        if min_val:
            x = self.mul(x, self.pi_pow(min_val))
        return x

    def p_power(self, i):
        """p^i as a ring element."""
        return ((self.ctx.p ** i) % self.mod,) + (0,) * (self.m - 1)
