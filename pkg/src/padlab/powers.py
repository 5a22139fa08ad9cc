"""n-th power classes, coset tables, roots of unity and q-th power maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .errors import NotInDomain, PrecisionExhausted, ZeroInput
from .field import INF, PElement, vp

_TABLES: dict = {}


def _hensel_k(ctx, n):
    """v_pi(n), the valuation lost when dividing by the derivative n*y^(n-1)."""
    return ctx.e * vp(n, ctx.p)


def _unit_digit_lists(ctx, depth):
    """All unit digit lists of the given length, in little-endian lexicographic order."""
    res = list(ctx.residues())
    first = [d for d in res if any(d)]
    for head in first:
        for tail in product(res, repeat=depth - 1):
            yield (head,) + tail


def _power_table(ctx, n):
    """Map (y^n mod pi^M) -> list of unit coordinate tuples y mod pi^M, M = 2k+1."""
    key = (ctx.key(), n)
    tab = _TABLES.get(key)
    if tab is None:
        M = 2 * _hensel_k(ctx, n) + 1
        tab = {}
        for digits in _unit_digit_lists(ctx, M):
            y = ctx._ireduce(ctx.coords_from_digits(digits), M)
            tab.setdefault(ctx._ireduce(ctx._ipow(y, n), M), []).append(y)
        _TABLES[key] = tab
    return tab


def _newton_unit_root(ctx, u, y0, n):
    """Lift an approximate n-th root y0 of the unit u to full relative precision."""
    y = ctx._make(0, y0, INF).lift()
    u = u.lift()
    for _ in range(4 * ctx.N + 8):
        r = y ** n - u
        if r.is_zero():
            return y
        y = (y - r / (n * y ** (n - 1))).lift()
    raise PrecisionExhausted("Newton lift of root did not converge")


def nth_roots_of_unit(u, n):
    """All n-th roots of a unit u (distinct classes), each as a full-precision lift."""
    ctx = u.ctx
    k = _hensel_k(ctx, n)
    M = 2 * k + 1
    if u.rel < M:
        raise PrecisionExhausted(f"need relative precision {M} to decide {n}-th powers")
    cands = _power_table(ctx, n).get(ctx._ireduce(u.unit, M), [])
    seen, roots = set(), []
    for y0 in cands:
        cls = ctx._ireduce(y0, k + 1)
        if cls in seen:
            continue
        seen.add(cls)
        roots.append(_newton_unit_root(ctx, u, y0, n))
    return roots


def _nth_root_full(x, n):
    """(is_power, lifted root or None) with the lexicographically smallest unit part."""
    ctx = x.ctx
    if x.is_zero():
        raise ZeroInput("zero is not in P_n")
    if n == 1:
        return True, x.lift()
    if x.val % n:
        return False, None
    roots = nth_roots_of_unit(x.unit_element(), n)
    if not roots:
        return False, None
    k = _hensel_k(ctx, n)
    rel = min(ctx.N, x.rel - k)
    best = min(roots, key=lambda y: y.with_prec(rel).digits())
    return True, PElement(ctx, x.val // n, best.unit, x.val // n + ctx.N)


def is_nth_power(x, n):
    """Decide x in P_n.  Returns (bool, witness) where witness^n = x at witness precision."""
    ok, y = _nth_root_full(x, n)
    if not ok:
        return False, None
    rel = min(x.ctx.N, x.rel - _hensel_k(x.ctx, n))
    return True, y.with_prec(y.val + rel)


@dataclass(frozen=True)
class PowerCosetTable:
    n: int
    reps: tuple
    modulus: int

    def __len__(self):
        return len(self.reps)


def power_coset_reps(ctx, n):
    """Representatives of K^x / P_n: pi^a * u with a < n and lexicographically minimal units."""
    k = _hensel_k(ctx, n)
    M = 2 * k + 1
    if n == 1:
        return PowerCosetTable(1, (ctx.one(),), M)
    reps = []
    for a in range(n):
        for digits in _unit_digit_lists(ctx, M):
            c = ctx.element_from_digits(list(digits), shift=a)
            if any(is_nth_power(c / r, n)[0] for r in reps if r.val == a):
                continue
            reps.append(c)
    return PowerCosetTable(n, tuple(reps), M)


def classify_coset(x, table):
    """Index i of the unique rep with x / rep in P_n."""
    if x.is_zero():
        raise ZeroInput("zero has no power class")
    for i, r in enumerate(table.reps):
        if (x.val - r.val) % table.n == 0 and is_nth_power(x / r, table.n)[0]:
            return i
    raise PrecisionExhausted("no coset matched; precision too low")


def expected_index(ctx, n):
    """[K^x : P_n] = n * |mu_n(K)| * p^(m * v_p(n))."""
    w = torsion_free_level(ctx)
    from math import gcd
    return n * gcd(n, w) * ctx.p ** (ctx.m * vp(n, ctx.p))


def _cyclotomic_value(c, p, s):
    # Phi_{p^s}(c) = sum_{i<p} c^(i p^(s-1))
    base = c ** (p ** (s - 1))
    acc = c.ctx.zero()
    term = c.ctx.one()
    for _ in range(p):
        acc = acc + term
        term = term * base
    return acc


def _cyclotomic_derivative(c, p, s):
    q = p ** (s - 1)
    acc = c.ctx.zero()
    for i in range(1, p):
        acc = acc + (i * q) * c ** (i * q - 1)
    return acc


def has_primitive_root_of_unity(ctx, p_power_exp):
    """Whether K contains a primitive p^s-th root of unity (s = p_power_exp >= 1)."""
    p, s = ctx.p, p_power_exp
    phi = (p - 1) * p ** (s - 1)
    if ctx.e % phi:
        return False
    # v(Phi'(zeta)) = e (s - 1/(p-1)); a candidate with v(Phi(c)) > 2 v(Phi'(c)) lifts.
    M = 2 * ctx.e * s - (2 * ctx.e) // (p - 1) + 1
    res = list(ctx.residues())
    for tail in product(res, repeat=max(M - 1, 0)):
        c = ctx.element_from_digits([(1,) + (0,) * (ctx.f - 1)] + list(tail))
        dv = _cyclotomic_derivative(c, p, s).val
        if _cyclotomic_value(c, p, s).val > 2 * dv:
            return True
    return False


def torsion_free_level(ctx):
    """|mu(K)| = (q_res - 1) p^s; P_w is torsion-free exactly when w is a multiple of it."""
    s = 0
    while has_primitive_root_of_unity(ctx, s + 1):
        s += 1
    return (ctx.q_res - 1) * ctx.p ** s


@dataclass
class QthPowerMap:
    ctx: object
    q: Fraction
    level: int
    domain_level: int = field(init=False)

    def __post_init__(self):
        self.domain_level = self.level * self.q.denominator

    def __call__(self, x):
        return apply_qpow(self, x)


def build_qth_power_map(ctx, q):
    q = Fraction(q)
    return QthPowerMap(ctx, q, torsion_free_level(ctx))


def apply_qpow(qmap, x):
    """x^q on P_{l*b}: the b-th root of x lying in P_l, raised to a."""
    ctx = x.ctx
    a, b = qmap.q.numerator, qmap.q.denominator
    if x.is_zero():
        raise NotInDomain("zero is outside every P_n")
    ok, y0 = _nth_root_full(x, qmap.domain_level)
    if not ok:
        raise NotInDomain(f"{x} is not in P_{qmap.domain_level}")
    g = y0 ** qmap.level
    rel = min(ctx.N, x.rel - _hensel_k(ctx, b))
    g = g.with_prec(g.val + rel)
    return g ** a
