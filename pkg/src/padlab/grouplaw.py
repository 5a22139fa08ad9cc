"""Truncated power-series group laws on O^d and the finite-level condition checks.

A law is x*y = sum over (I, J) of c_{I,J} x^I y^J with c_{I,J} in O^d and
1 <= |I| + |J| <= D.  Series arithmetic (associativity, inverse, p-th power)
runs in O / p^k with k large enough to resolve the context precision.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .errors import (
    AssociativityFailed,
    IdentityAxiomFailed,
    InverseNotIntegral,
    LawFormatError,
    NonIntegralCoefficient,
    NoProgress,
    PadlabError,
    RescalePreconditionFailed,
    SolverBreakdown,
    TargetOutsideCertifiedBall,
)
from .field import INF, PVector, ResidueRing, make_context, parse_element

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"


# -- sparse multivariate series over a ResidueRing ----------------------------------

def _mono_deg(mono):
    return sum(mono)


def s_add(R, a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = R.add(out[k], v) if k in out else v
    return {k: v for k, v in out.items() if any(v)}


def s_scale(R, c, a):
    out = {}
    for k, v in a.items():
        w = R.mul(c, v)
        if any(w):
            out[k] = w
    return out


def s_mul(R, a, b, D):
    out = {}
    for ka, va in a.items():
        da = _mono_deg(ka)
        for kb, vb in b.items():
            if da + _mono_deg(kb) > D:
                continue
            k = tuple(x + y for x, y in zip(ka, kb))
            w = R.mul(va, vb)
            out[k] = R.add(out[k], w) if k in out else w
    return {k: v for k, v in out.items() if any(v)}


def s_var(R, nv, i):
    e = [0] * nv
    e[i] = 1
    return {tuple(e): R.one}


def s_const(R, nv, c):
    return {(0,) * nv: c} if any(c) else {}


def grlex_key(I, J):
    return (sum(I) + sum(J), tuple(-e for e in tuple(I) + tuple(J)))


# -- verdicts -----------------------------------------------------------------------

@dataclass
class Verdict:
    condition: str
    status: str
    domain: str
    witness: object = None
    details: dict = field(default_factory=dict)

    def to_json(self):
        out = {"condition": self.condition, "status": self.status, "domain": self.domain}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out


def _vstr(v):
    return "inf" if v == INF else v


# -- the law ------------------------------------------------------------------------

class GroupLawSeries:
    """A validated truncated group law with derived inverse and p-th power series."""

    def __init__(self, ctx, d, D, terms, validate=True):
        self.ctx = ctx
        self.d = d
        self.D = D
        self.terms = {}
        for (I, J), c in terms.items():
            I, J = tuple(I), tuple(J)
            if len(I) != d or len(J) != d or len(c) != d:
                raise LawFormatError(f"term {(I, J)} does not match dimension {d}")
            deg = sum(I) + sum(J)
            if deg < 1 or deg > D:
                raise LawFormatError(f"term {(I, J)} has degree {deg} outside 1..{D}")
            c = tuple(ctx.element(x) for x in c)
            for x in c:
                if not x.is_zero() and x.val < 0:
                    raise NonIntegralCoefficient(f"c_{{{list(I)},{list(J)}}} is not integral",
                                                 i=list(I), j=list(J))
            self.terms[(I, J)] = c
        for i in range(d):
            ei = tuple(1 if k == i else 0 for k in range(d))
            z = (0,) * d
            unit = tuple(ctx.one() if k == i else ctx.zero() for k in range(d))
            self.terms.setdefault((ei, z), unit)
            self.terms.setdefault((z, ei), unit)
        self.terms = dict(sorted(self.terms.items(), key=lambda kv: grlex_key(*kv[0])))
        # series ring: resolve at least the context precision
        self.k_series = -(-ctx.N // ctx.e) + 1
        self.R = ResidueRing(ctx, self.k_series)
        self._ring_terms = {}
        self.inverse_series = None
        self.power_series = None
        if validate:
            self._check_identity()
            self._check_associativity()
            self.inverse_series = self._compute_inverse()
            self.power_series = self._compute_power()

    # -- helpers --
    @property
    def p(self):
        return self.ctx.p

    def nonlinear_terms(self):
        return [(k, c) for k, c in self.terms.items() if sum(k[0]) + sum(k[1]) > 1]

    def coeff_valuation(self, key):
        return min(c.val for c in self.terms[key])

    def ring_terms(self, R):
        """Terms as (I, J, coefficient tuple in R) with zero coefficients dropped."""
        cached = self._ring_terms.get(R.k)
        if cached is None:
            cached = []
            for (I, J), c in self.terms.items():
                rc = tuple(R.from_element(x) for x in c)
                if any(any(x) for x in rc):
                    cached.append((I, J, rc))
            self._ring_terms[R.k] = cached
        return cached

    def c_bound_ok(self, upto=None):
        """Whether v(c_{I,J}) >= (|I|+|J|-1) v(p) for all terms of degree <= upto."""
        return self.c_bound_violation(upto) is None

    def c_bound_violation(self, upto=None):
        upto = self.D if upto is None else upto
        e = self.ctx.e
        for (I, J), c in self.terms.items():
            deg = sum(I) + sum(J)
            if deg > upto:
                continue
            v = min(x.val for x in c)
            if v < (deg - 1) * e:
                return (I, J, c, v, (deg - 1) * e)
        return None

    @property
    def domain(self):
        """Evaluation domain: all of O^d when the full coefficient bound holds, else m^d."""
        return "O^d" if self.c_bound_ok() else "m^d"

    @property
    def domain_min_val(self):
        return 0 if self.domain == "O^d" else 1

    # -- series-level computations --
    def _law_series(self, xs, ys, nv):
        """Substitute series xs, ys (lists of d series in nv variables) into the law."""
        R, D, d = self.R, self.D, self.d
        pw_x = [[s_const(R, nv, R.one)] for _ in range(d)]
        pw_y = [[s_const(R, nv, R.one)] for _ in range(d)]

        def power(cache, base, k):
            while len(cache) <= k:
                cache.append(s_mul(R, cache[-1], base, D))
            return cache[k]

        out = [{} for _ in range(d)]
        for I, J, rc in self.ring_terms(R):
            mono = s_const(R, nv, R.one)
            for i in range(d):
                if I[i]:
                    mono = s_mul(R, mono, power(pw_x[i], xs[i], I[i]), D)
                if J[i]:
                    mono = s_mul(R, mono, power(pw_y[i], ys[i], J[i]), D)
            for r in range(d):
                if any(rc[r]):
                    out[r] = s_add(R, out[r], s_scale(R, rc[r], mono))
        return out

    def _check_identity(self):
        for (I, J), c in self.terms.items():
            if (sum(I) == 0) == (sum(J) == 0):
                continue
            pure = I if sum(J) == 0 else J
            if sum(pure) == 1:
                i = pure.index(1)
                ok = all((x == 1) if k == i else x.is_zero() for k, x in enumerate(c))
            else:
                ok = all(x.is_zero() for x in c)
            if not ok:
                raise IdentityAxiomFailed(
                    f"pure term c_{{{list(I)},{list(J)}}} violates x*0 = x, 0*y = y",
                    i=list(I), j=list(J))

    def _check_associativity(self):
        R, d = self.R, self.d
        nv = 3 * d
        X = [s_var(R, nv, i) for i in range(d)]
        Y = [s_var(R, nv, d + i) for i in range(d)]
        Z = [s_var(R, nv, 2 * d + i) for i in range(d)]
        left = self._law_series(self._law_series(X, Y, nv), Z, nv)
        right = self._law_series(X, self._law_series(Y, Z, nv), nv)
        worst = None
        for r in range(d):
            diff = s_add(R, left[r], {k: R.neg(v) for k, v in right[r].items()})
            for mono in diff:
                key = (_mono_deg(mono), mono, r)
                if worst is None or key < worst:
                    worst = key
        if worst is not None:
            raise AssociativityFailed(
                f"(x*y)*z and x*(y*z) differ in degree {worst[0]}",
                degree=worst[0], monomial=list(worst[1]), component=worst[2])

    def _compute_inverse(self):
        R, d, D = self.R, self.d, self.D
        X = [s_var(R, d, i) for i in range(d)]
        nonlin = [(I, J, rc) for I, J, rc in self.ring_terms(R) if sum(I) + sum(J) > 1]
        iota = [{k: R.neg(v) for k, v in X[i].items()} for i in range(d)]
        for _ in range(D):
            saved = self._ring_terms
            self._ring_terms = {R.k: nonlin}
            try:
                N = self._law_series(X, iota, d)
            finally:
                self._ring_terms = saved
            iota = [s_add(R, {k: R.neg(v) for k, v in X[i].items()},
                          {k: R.neg(v) for k, v in N[i].items()}) for i in range(d)]
        # integrality is automatic for integral laws; recheck the converted coefficients
        for comp in iota:
            for v in comp.values():
                if self.R.to_element(v).val < 0:
                    raise InverseNotIntegral("inverse series has a non-integral coefficient")
        return iota

    def _compute_power(self):
        R, d = self.R, self.d
        X = [s_var(R, d, i) for i in range(d)]
        f = X
        for _ in range(self.p - 1):
            f = self._law_series(f, X, d)
        return f

    # -- evaluation on residue rings --
    def eval_ring(self, R, x, y, degree=None):
        """x*y in (O/p^k)^d for coordinate tuples x, y (each a d-tuple of ring elements)."""
        d = self.d
        pwx = [[R.one, x[i]] for i in range(d)]
        pwy = [[R.one, y[i]] for i in range(d)]

        def power(cache, k):
            while len(cache) <= k:
                cache.append(R.mul(cache[-1], cache[1]))
            return cache[k]

        out = [R.zero] * d
        for I, J, rc in self.ring_terms(R):
            if degree is not None and sum(I) + sum(J) > degree:
                continue
            mono = R.one
            for i in range(d):
                if I[i]:
                    mono = R.mul(mono, power(pwx[i], I[i]))
                if J[i]:
                    mono = R.mul(mono, power(pwy[i], J[i]))
            for r in range(d):
                if any(rc[r]):
                    out[r] = R.add(out[r], R.mul(rc[r], mono))
        return tuple(out)

    def eval_series_ring(self, R, series, x):
        """Evaluate d component series (monomial dict, coefficients in self.R) at x in R^d."""
        out = []
        for comp in series:
            acc = R.zero
            for mono, c in comp.items():
                term = tuple(v % R.mod for v in c)
                for i, e in enumerate(mono):
                    if e:
                        term = R.mul(term, R.pow(x[i], e))
                acc = R.add(acc, term)
            out.append(acc)
        return tuple(out)

    def inverse_ring(self, R, x):
        return self.eval_series_ring(R, self.inverse_series, x)

    def power_ring(self, R, x, times=None):
        """x^{*times} (default p) by repeated evaluation of the truncated law."""
        times = self.p if times is None else times
        acc = tuple(R.zero for _ in range(self.d))
        for _ in range(times):
            acc = self.eval_ring(R, acc, x)
        return acc

    def eval_elements(self, x, y):
        """x*y for PVectors, computed in O / p^k at the context precision."""
        R = ResidueRing(self.ctx, self.k_series)
        xr = tuple(R.from_element(c) for c in x)
        yr = tuple(R.from_element(c) for c in y)
        return PVector([R.to_element(c) for c in self.eval_ring(R, xr, yr)], self.ctx)

    def power_elements(self, x):
        R = ResidueRing(self.ctx, self.k_series)
        xr = tuple(R.from_element(c) for c in x)
        return PVector([R.to_element(c) for c in self.power_ring(R, xr)], self.ctx)

    # -- documents --
    def series_json(self, series):
        out = []
        for r, comp in enumerate(series):
            for mono in sorted(comp, key=lambda m: (sum(m), tuple(-e for e in m))):
                out.append({"component": r, "exponent": list(mono),
                            "c": str(self.R.to_element(comp[mono]))})
        return out

    def to_document(self):
        terms = []
        for (I, J), c in self.terms.items():
            terms.append({"i": list(I), "j": list(J), "c": [_digits_json(x) for x in c]})
        return {"field": field_spec(self.ctx), "dimension": self.d, "degree_cap": self.D,
                "terms": terms}

    def to_json_text(self):
        return json.dumps(self.to_document(), sort_keys=True)


def field_spec(ctx):
    eis = [list(c) if ctx.f > 1 else c[0] for c in ctx.eis]
    if ctx.e == 1 and ctx.f == 1 and eis == [-ctx.p, 1]:
        eis = [0, 1]
    return {"p": ctx.p, "unram": list(ctx.unram), "eis": eis, "precision": ctx.N}


def _digits_json(x):
    """Integral element as its little-endian pi-digit strings."""
    if x.is_zero():
        return ["0"]
    coords = x.integral_coords()
    ctx = x.ctx
    y = ctx._make(0, coords, INF) if x.prec == INF else ctx._make(0, coords, x.prec)
    ds = ["0"] * y.val + [d if isinstance(d, int) else ":".join(map(str, d)) for d in y.digits()]
    ds = [str(d) for d in ds]
    while len(ds) > 1 and set(ds[-1].split(":")) == {"0"}:
        ds.pop()
    return ds


def _parse_component(ctx, comp):
    if isinstance(comp, bool):
        raise LawFormatError("boolean coefficient")
    if isinstance(comp, int):
        return ctx.from_int(comp)
    if isinstance(comp, str):
        return parse_element(comp, ctx)
    if isinstance(comp, list):
        digits = []
        for s in comp:
            parts = str(s).split(":")
            if len(parts) != ctx.f or not all(p.strip().isdigit() for p in parts):
                raise LawFormatError(f"bad digit {s!r}")
            vals = tuple(int(p) for p in parts)
            if any(v >= ctx.p for v in vals):
                raise LawFormatError(f"digit {s!r} out of range")
            digits.append(vals)
        return ctx.element_from_digits(digits) if digits else ctx.zero()
    raise LawFormatError(f"unsupported coefficient component {comp!r}")


def context_from_spec(spec):
    return make_context(int(spec["p"]), spec.get("unram", [0, 1]), spec.get("eis", [0, 1]),
                        int(spec.get("precision", 8)))


def load_group_law(document, ctx=None):
    """Build a :class:`GroupLawSeries` from a JSON document (dict or text)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise LawFormatError(f"invalid JSON: {exc}") from None
    try:
        ctx = ctx or context_from_spec(document["field"])
        d = int(document["dimension"])
        D = int(document["degree_cap"])
        raw = document["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise LawFormatError(f"missing or malformed field: {exc}") from None
    terms = {}
    for t in raw:
        key = (tuple(t["i"]), tuple(t["j"]))
        if key in terms:
            raise LawFormatError(f"duplicate term {list(key[0])},{list(key[1])}")
        c = t["c"]
        if not isinstance(c, list) or len(c) != d:
            raise LawFormatError(f"coefficient of {key} must have {d} components")
        terms[key] = tuple(_parse_component(ctx, comp) for comp in c)
    return GroupLawSeries(ctx, d, D, terms)


# -- standard laws ------------------------------------------------------------------

def law_additive(ctx, d=1, D=6):
    return GroupLawSeries(ctx, d, D, {})


def law_multiplicative(ctx, c=1, D=6):
    """x + y + c*x*y in dimension 1."""
    c = ctx.element(c)
    return GroupLawSeries(ctx, 1, D, {((1,), (1,)): (c,)})


def law_heisenberg(ctx, D=6, k=1):
    """Nonabelian 2-dimensional law (x1 + y1 + c x1 y1, x2 + y2 + c x1 y2) with c = p^k.

    This is the affine group {(1 + c a, b)} in coordinates; dropping the c x1 y1
    term breaks associativity in degree 3.  The commutator is divisible by p^k
    only, so k = 1 quotients mod p^2 are nonabelian.
    """
    z, c = ctx.zero(), ctx.from_int(ctx.p ** k)
    return GroupLawSeries(ctx, 2, D, {((1, 0), (1, 0)): (c, z), ((1, 0), (0, 1)): (z, c)})


# -- sampling helpers ---------------------------------------------------------------

def _random_vec(R, d, rng, min_val):
    return tuple(R.random(rng, min_val) for _ in range(d))


def _unit_vec(R, d, i, scale):
    return tuple(scale if k == i else R.zero for k in range(d))


def _vec_val(R, v):
    return min(R.val(x) for x in v)


def _vec_sub(R, a, b):
    return tuple(R.sub(x, y) for x, y in zip(a, b))


def _vec_add(R, a, b):
    return tuple(R.add(x, y) for x, y in zip(a, b))


def _vec_json(R, v):
    return [str(R.to_element(x)) for x in v]


def _deterministic_points(R, d, min_val):
    pk = R.pi_pow(min_val)
    pts = [_unit_vec(R, d, i, pk) for i in range(d)]
    pts.append(tuple(pk for _ in range(d)))
    return pts


def _final(status_if_clean, region_ok):
    if status_if_clean == PASS and not region_ok:
        return INCONCLUSIVE
    return status_if_clean


# -- condition checks ---------------------------------------------------------------

def check_A_n(law, n, samples=256, seed=0):
    """Congruence mod p^n: * and the inverse respect x = y (mod p^n O^d)."""
    R = ResidueRing(law.ctx, n)
    d = law.d
    rng = random.Random(seed)
    mv = law.domain_min_val
    # work one level deeper so that the perturbation p^n * u is nonzero
    Rw = ResidueRing(law.ctx, n + 1)
    for s in range(samples):
        x = _random_vec(Rw, d, rng, mv)
        y = _random_vec(Rw, d, rng, mv)
        delta = tuple(Rw.mul(Rw.p_power(n), Rw.random(rng)) for _ in range(d))
        xd = _vec_add(Rw, x, delta)
        red = lambda v: tuple(tuple(c % R.mod for c in comp) for comp in v)  # noqa: E731
        checks = (
            ("left", law.eval_ring(Rw, xd, y), law.eval_ring(Rw, x, y)),
            ("right", law.eval_ring(Rw, y, xd), law.eval_ring(Rw, y, x)),
            ("inverse", law.inverse_ring(Rw, xd), law.inverse_ring(Rw, x)),
        )
        for kind, a, b in checks:
            if red(a) != red(b):
                return Verdict(f"A_{n}", FAIL, law.domain, {
                    "kind": kind, "x": _vec_json(Rw, x), "y": _vec_json(Rw, y),
                    "delta": _vec_json(Rw, delta)}, {"samples": s + 1, "seed": seed})
    status = _final(PASS, law.domain == "O^d")
    return Verdict(f"A_{n}", status, law.domain, None,
                   {"samples": samples, "seed": seed, "inverse_integral": True})


def check_B_n(law, n, k=0, samples=256, seed=0):
    """x*y = x + y (mod p^n O^d) on the ball p^k O^d."""
    e = law.ctx.e
    sym_fail = None
    for (I, J), c in law.nonlinear_terms():
        v = min(x.val for x in c)
        if v + (sum(I) + sum(J)) * k * e < n * e:
            sym_fail = {"i": list(I), "j": list(J), "valuation": _vstr(v)}
            break
    R = ResidueRing(law.ctx, n)
    d = law.d
    mv = max(k * e, law.domain_min_val)
    rng = random.Random(seed)
    pts = _deterministic_points(R, d, k * e)
    pairs = [(a, b) for a in pts for b in pts]
    while len(pairs) < samples:
        pairs.append((_random_vec(R, d, rng, mv), _random_vec(R, d, rng, mv)))
    in_dom = lambda v: _vec_val(R, v) >= law.domain_min_val  # noqa: E731
    for x, y in pairs[:max(samples, len(pts) ** 2)]:
        if not (in_dom(x) and in_dom(y)):
            continue
        xy = law.eval_ring(R, x, y)
        if xy != _vec_add(R, x, y):
            return Verdict(f"B_{n}", FAIL, law.domain, {
                "x": _vec_json(R, x), "y": _vec_json(R, y), "x*y": _vec_json(R, xy),
                "x+y": _vec_json(R, _vec_add(R, x, y)), "modulus": f"p^{n}"},
                {"ball_k": k, "seed": seed, "symbolic_violation": sym_fail})
    region_ok = k * e >= law.domain_min_val
    if sym_fail is not None:
        return Verdict(f"B_{n}", INCONCLUSIVE, law.domain, None,
                       {"ball_k": k, "seed": seed, "symbolic_violation": sym_fail,
                        "reason": "coefficient bound fails but no sampled pair violates"})
    return Verdict(f"B_{n}", _final(PASS, region_ok), law.domain, None,
                   {"ball_k": k, "samples": samples, "seed": seed})


def check_C_n(law, n, samples=256, seed=0):
    """Coefficient depth v(c_{I,J}) >= (|I|+|J|-1) v(p) up to degree n, plus a truncation check."""
    if n > law.D:
        return Verdict(f"C_{n}", INCONCLUSIVE, law.domain, None,
                       {"reason": f"n exceeds the degree cap {law.D}"})
    bad = law.c_bound_violation(n)
    if bad is not None:
        I, J, c, v, need = bad
        return Verdict(f"C_{n}", FAIL, law.domain, {
            "i": list(I), "j": list(J), "c": [str(x) for x in c],
            "valuation": _vstr(v), "required": need}, {"method": "coefficient inspection"})
    R = ResidueRing(law.ctx, n)
    d = law.d
    rng = random.Random(seed)
    mv = law.domain_min_val
    for s in range(samples):
        x = _random_vec(R, d, rng, mv)
        y = _random_vec(R, d, rng, mv)
        full, trunc = law.eval_ring(R, x, y), law.eval_ring(R, x, y, degree=n)
        if full != trunc:
            return Verdict(f"C_{n}", FAIL, law.domain, {
                "x": _vec_json(R, x), "y": _vec_json(R, y),
                "full": _vec_json(R, full), "truncated": _vec_json(R, trunc)},
                {"method": "truncation sample", "seed": seed})
    return Verdict(f"C_{n}", _final(PASS, law.domain == "O^d"), law.domain, None,
                   {"samples": samples, "seed": seed})


def check_D(law, samples=256, seed=0, ball_k=0):
    """v(f(x) - f(y)) = v(x - y) + v(p) for the p-th power map f on sampled distinct pairs."""
    ctx = law.ctx
    R = ResidueRing(ctx, law.k_series)
    N, e, d = ctx.N, ctx.e, law.d
    mv = max(ball_k * e, law.domain_min_val)
    rng = random.Random(seed)
    zero = tuple(R.zero for _ in range(d))
    pairs = [(pt, zero) for pt in _deterministic_points(R, d, mv)]
    tested = 0
    attempts = 0
    while tested < samples and attempts < 50 * samples:
        attempts += 1
        if pairs:
            x, y = pairs.pop(0)
        else:
            x, y = _random_vec(R, d, rng, mv), _random_vec(R, d, rng, mv)
        dv = _vec_val(R, _vec_sub(R, x, y))
        if dv >= N - e:
            continue
        tested += 1
        fx, fy = law.power_ring(R, x), law.power_ring(R, y)
        lhs = _vec_val(R, _vec_sub(R, fx, fy))
        if lhs != dv + e:
            return Verdict("D", FAIL, law.domain, {
                "x": _vec_json(R, x), "y": _vec_json(R, y),
                "f(x)": _vec_json(R, fx), "f(y)": _vec_json(R, fy),
                "v(f(x)-f(y))": _vstr(lhs), "v(x-y)+v(p)": dv + e},
                {"samples": tested, "seed": seed})
    region_ok = law.domain == "O^d" or ball_k * e >= 1
    return Verdict("D", _final(PASS, region_ok), law.domain, None,
                   {"samples": tested, "seed": seed, "ball_k": ball_k})


def check_E(law, targets=20, seed=0, d_verdict=None):
    """Every sampled target y in p O^d is a p-th power f(x) with x in O^d."""
    from .solvers import local_inverse_solve

    ctx = law.ctx
    if d_verdict is None:
        d_verdict = check_D(law, seed=seed)
    if d_verdict.status != PASS:
        return Verdict("E", INCONCLUSIVE, law.domain, None,
                       {"reason": f"D is {d_verdict.status}"})
    d, e = law.d, ctx.e
    rng = random.Random(seed)
    R = ResidueRing(ctx, law.k_series)
    p_el = ctx.from_int(ctx.p)
    Df = [[p_el if i == j else ctx.zero() for j in range(d)] for i in range(d)]
    zero = PVector([ctx.zero()] * d, ctx)
    tgts = [tuple(R.pi_pow(e) if k == i else R.zero for k in range(d)) for i in range(d)]
    while len(tgts) < targets:
        tgts.append(_random_vec(R, d, rng, e))
    worst = INF
    for t in tgts[:targets]:
        y = PVector([R.to_element(c) for c in t], ctx)
        try:
            res = local_inverse_solve(law.power_elements, zero, Df, y, seed=seed)
        except TargetOutsideCertifiedBall as exc:
            return Verdict("E", FAIL, law.domain, {"target": [str(c) for c in y],
                                                   "reason": str(exc)}, {"seed": seed})
        except (NoProgress, PadlabError) as exc:
            raise SolverBreakdown(f"inverse solver broke down: {exc}",
                                  target=[str(c) for c in y]) from exc
        x = res.solution
        if x.valuation() < 0:
            return Verdict("E", FAIL, law.domain, {"target": [str(c) for c in y],
                                                   "solution": [str(c) for c in x]}, {"seed": seed})
        worst = min(worst, res.residual_valuation)
    return Verdict("E", _final(PASS, law.domain == "O^d"), law.domain, None,
                   {"targets": targets, "seed": seed, "min_residual_valuation": _vstr(worst)})


def check_conditions(law, conditions="ABCDE", n_max=6, ball_k=0, seed=0, samples=256, targets=20):
    """Run the requested checks; returns {"verdicts": [...], "summary": status}."""
    out = []
    conds = [c.strip().upper() for c in conditions.split(",")] if "," in conditions \
        else list(conditions.upper())
    d_verdict = None
    for c in conds:
        if c == "A":
            out += [check_A_n(law, n, samples, seed) for n in range(1, n_max + 1)]
        elif c == "B":
            out += [check_B_n(law, n, ball_k, samples, seed) for n in range(1, n_max + 1)]
        elif c == "C":
            out += [check_C_n(law, n, samples, seed) for n in range(1, min(n_max, law.D) + 1)]
        elif c == "D":
            d_verdict = check_D(law, samples, seed, ball_k)
            out.append(d_verdict)
        elif c == "E":
            out.append(check_E(law, targets, seed, d_verdict))
        else:
            raise LawFormatError(f"unknown condition {c!r}")
    return out


def summarize(verdicts):
    statuses = {v.status for v in verdicts}
    if FAIL in statuses:
        return FAIL
    if INCONCLUSIVE in statuses:
        return INCONCLUSIVE
    return PASS


# -- rescaling ----------------------------------------------------------------------

def rescale_law(law, eps, delta):
    """Coefficients c_{I,J} * rho^(|I|+|J|-1) with rho = p eps^2 / delta."""
    ctx = law.ctx
    eps, delta = ctx.element(eps), ctx.element(delta)
    ve, vd = eps.val, delta.val
    if not (ve >= vd >= 0):
        raise RescalePreconditionFailed(f"need v(eps) >= v(delta) >= 0, got {ve}, {vd}")
    for (I, J), c in law.terms.items():
        deg = sum(I) + sum(J)
        v = min(x.val for x in c)
        if v + deg * ve - vd < 0:
            raise RescalePreconditionFailed(
                f"delta^-1 (eps x * eps y) has a non-integral coefficient at {list(I)},{list(J)}",
                i=list(I), j=list(J))
    rho = ctx.from_int(ctx.p) * eps * eps / delta
    terms = {}
    for (I, J), c in law.terms.items():
        g = sum(I) + sum(J)
        f = rho ** (g - 1)
        terms[(I, J)] = tuple((x * f).lift() if not x.is_zero() else x for x in c)
    new = GroupLawSeries(ctx, law.d, law.D, terms)
    new.rescale_info = {"rho": str(rho), "check_C_D": check_C_n(new, new.D).to_json()}
    return new


__all__ = [
    "GroupLawSeries", "Verdict", "PASS", "FAIL", "INCONCLUSIVE",
    "load_group_law", "law_additive", "law_multiplicative", "law_heisenberg",
    "check_A_n", "check_B_n", "check_C_n", "check_D", "check_E",
    "check_conditions", "summarize", "rescale_law", "field_spec", "context_from_spec",
]
