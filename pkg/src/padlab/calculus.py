"""Strict derivatives, coset derivatives, asymptotic forms and second-order Taylor checks."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

from .errors import (
    CriterionFailed,
    EvaluationFailure,
    ExpansionFailed,
    InconsistentEstimates,
    NoQthPowerMap,
    NotAffine,
    NotInDomain,
    PadlabError,
    PrecisionExhausted,
    RatioNotConverging,
    ZeroDenominatorGerm,
)
from .field import INF, PElement, PVector
from .powers import build_qth_power_map, torsion_free_level
from .solvers import residual_valuation, sample_pairs


def _jv(v):
    return "inf" if v == INF else v


def _call(f, x):
    try:
        return f(x)
    except PadlabError:
        raise
    except Exception as exc:  # black boxes may fail in arbitrary ways
        raise EvaluationFailure(f"evaluation failed: {exc}") from exc


def _vec_fn(f, a):
    """Normalize f to PVector -> PVector; remember whether the caller was scalar."""
    if isinstance(a, PElement):
        ctx = a.ctx

        def g(v):
            y = _call(f, v[0])
            return y if isinstance(y, PVector) else PVector([y], ctx)

        return g, PVector([a], ctx), True

    def g(v):
        y = _call(f, v)
        return y if isinstance(y, PVector) else PVector([y], v.ctx)

    return g, a, False


def _effective(est_deep, agreement, t_gap):
    # error of a difference quotient scales with the step: deepest error >= agreement + gap
    return min(est_deep.prec, agreement + t_gap)


# -- strict derivatives ---------------------------------------------------------

@dataclass
class DerivativeReport:
    point: object
    mu: list
    effective_precision: list
    schedule: tuple
    disagreement: object
    verified_gamma: object = None
    samples: int = 0
    witness: object = None

    def to_json(self):
        return {
            "point": [str(c) for c in self.point],
            "mu": [[str(c) for c in row] for row in self.mu],
            "effective_precision": [[_jv(v) for v in row] for row in self.effective_precision],
            "schedule": list(self.schedule),
            "disagreement": _jv(self.disagreement),
            "verified_gamma": self.verified_gamma,
            "samples": self.samples,
            "witness": self.witness,
        }


def estimate_strict_derivative(f, a, schedule=None):
    """Jacobian estimate from forward difference quotients at two step valuations."""
    g, av, _ = _vec_fn(f, a)
    ctx = av.ctx
    N = ctx.N
    schedule = tuple(sorted(schedule or (max(1, N // 3), max(2, N // 2))))
    if len(schedule) < 2:
        raise InconsistentEstimates("need at least two step valuations")
    fa = g(av)
    n, m = len(av), len(fa)
    cols = {}
    for t in schedule:
        h = ctx.uniformizer ** t
        for i in range(n):
            x = PVector([c + h if j == i else c for j, c in enumerate(av)], ctx)
            cols[(t, i)] = [d / h for d in (g(x) - fa)]
    t_hi, t_lo = schedule[-1], schedule[-2]
    mu = [[None] * n for _ in range(m)]
    eff = [[None] * n for _ in range(m)]
    worst = INF
    for i in range(n):
        for r in range(m):
            deep, shallow = cols[(t_hi, i)][r], cols[(t_lo, i)][r]
            agree = residual_valuation(deep - shallow)
            worst = min(worst, agree)
            e = _effective(deep, agree, t_hi - t_lo)
            mu[r][i] = deep.with_prec(e)
            eff[r][i] = e
    if worst < N // 4:
        raise InconsistentEstimates(f"difference quotients disagree beyond tolerance (v = {worst})",
                                    disagreement=worst)
    return DerivativeReport(av, mu, eff, schedule, worst)


def _apply_matrix(mu, v, ctx):
    return PVector([sum((row[i] * v[i] for i in range(len(v))), ctx.zero()) for row in mu], ctx)


def verify_strict_derivative(f, a, mu, gamma_max, seed=0, n_lattice=64, n_random=64):
    """Largest gamma <= gamma_max for which the valuation criterion holds on some ball.

    For each gamma the ball B_r(a) is shrunk (r = 0, 1, ...) until every sampled
    pair satisfies v(f(x) - f(y) - mu(x - y)) > gamma + v(x - y).
    """
    g, av, _ = _vec_fn(f, a)
    ctx = av.ctx
    if isinstance(mu, PElement):
        mu = [[mu]]
    mu = [[ctx.element(c).lift() for c in row] for row in mu]
    verified = -1
    radius = 0
    last_witness = None
    samples = 0
    for gamma in range(gamma_max + 1):
        ok = False
        first_witness = None
        for r in range(radius, ctx.N - gamma):
            rng = random.Random(seed * 1_000_003 + gamma * 1009 + r)
            witness = None
            for x, y in sample_pairs(ctx, av, r, rng, n_lattice, n_random):
                samples += 1
                dxy = (x - y).valuation()
                lhs = g(x) - g(y) - _apply_matrix(mu, x - y, ctx)
                if all(c.is_zero() for c in lhs):
                    continue
                if lhs.valuation() <= gamma + dxy:
                    witness = {"x": [str(c) for c in x], "y": [str(c) for c in y],
                               "gamma": gamma, "radius": r,
                               "lhs_valuation": lhs.valuation(), "bound": gamma + dxy}
                    break
            if witness is None:
                ok, radius = True, r
                break
            first_witness = first_witness or witness
        if not ok:
            last_witness = first_witness
            break
        verified = gamma
    if verified < gamma_max:
        raise CriterionFailed(f"criterion fails beyond gamma = {verified}",
                              verified_gamma=verified, witness=last_witness)
    return verified


def strict_derivative(f, a, gamma_max=None, seed=0, schedule=None):
    """Estimate then verify; returns a :class:`DerivativeReport` with verified_gamma set."""
    rep = estimate_strict_derivative(f, a, schedule)
    ctx = rep.point.ctx
    gamma_max = ctx.N // 3 if gamma_max is None else gamma_max
    try:
        rep.verified_gamma = verify_strict_derivative(f, a, rep.mu, gamma_max, seed)
    except CriterionFailed as exc:
        rep.verified_gamma = exc.data["verified_gamma"]
        rep.witness = exc.data["witness"]
    rep.samples = 128
    return rep


# -- coset derivatives ------------------------------------------------------------

@dataclass
class CosetDerivative:
    value: PElement
    normalized: PElement
    effective_precision: int
    depths: tuple
    disagreement: object

    def to_json(self):
        return {"value": str(self.value), "normalized": str(self.normalized),
                "effective_precision": _jv(self.effective_precision),
                "depths": list(self.depths), "disagreement": _jv(self.disagreement)}


def _power_q(ctx, z, q, m):
    """z^q for z in P_m; integer q is a plain power, otherwise the torsion-free q-th power map."""
    q = Fraction(q)
    if q.denominator == 1:
        return z ** q.numerator
    qmap = build_qth_power_map(ctx, q)
    if m % qmap.domain_level:
        raise NoQthPowerMap(f"P_{m} has no {q}-th power map (need a multiple of {qmap.domain_level})")
    return qmap(z)


def coset_derivative(f, a, lam, m, q=1, depths=None, fa=None):
    """The (lambda, m, q)-derivative: limit of (f(a+x) - f(a)) / (x/lambda)^q along lambda*P_m.

    ``normalized`` is the value divided by lambda (meaningful for q = 1, where it
    is the ordinary derivative whenever that exists).  ``fa`` overrides f(a), for
    maps that extend continuously to a point outside their formula's domain.
    """
    ctx = a.ctx
    lam = ctx.element(lam)
    q = Fraction(q)
    if q.denominator != 1:
        lvl = torsion_free_level(ctx) * q.denominator
        if m % lvl:
            raise NoQthPowerMap(f"P_{m} has no {q}-th power map (need a multiple of {lvl})")
    if depths is None:
        cands = [lam.val + m * s for s in range(1, ctx.N + 1) if lam.val + m * s <= ctx.N - 1]
        lo = [t for t in cands if t <= max(ctx.N // 3, cands[0] if cands else 0)]
        hi = [t for t in cands if t <= ctx.N // 2]
        if len(cands) < 2:
            raise PrecisionExhausted(f"precision {ctx.N} leaves fewer than two depths in lambda*P_{m}")
        t1 = lo[-1]
        t2 = next((t for t in reversed(hi) if t > t1), None)
        if t2 is None:
            t2 = next(t for t in cands if t > t1)
        depths = (t1, t2)
    fa = _call(f, a) if fa is None else ctx.element(fa)
    ests = []
    for t in depths:
        s, rem = divmod(t - lam.val, m)
        if rem or s < 0:
            raise NotInDomain(f"depth {t} is not a valuation of lambda*P_{m}")
        z = ctx.uniformizer ** (m * s)
        x = lam * z
        ests.append((_call(f, a + x) - fa) / _power_q(ctx, z, q, m))
    shallow, deep = ests[0], ests[-1]
    agree = residual_valuation(deep - shallow)
    if agree < ctx.N // 4 and agree < deep.prec:
        raise InconsistentEstimates(f"coset quotients disagree (v = {agree})", disagreement=agree)
    eff = _effective(deep, agree, depths[-1] - depths[0])
    value = deep.with_prec(eff)
    return CosetDerivative(value, value / lam, eff, tuple(depths), agree)


# -- asymptotic forms ---------------------------------------------------------------

@dataclass
class AsymptoticForm:
    q: Fraction
    gamma0: object
    C: object
    coset: object = "ALL"
    delta: object = None
    zero_flag: bool = False
    kind: str = "exact"
    evidence: dict = field(default_factory=dict)

    def to_json(self):
        cos = self.coset if self.coset == "ALL" else {"lambda": str(self.coset[0]), "m": self.coset[1]}
        return {
            "kind": self.kind, "zero": self.zero_flag,
            "q": None if self.q is None else str(self.q),
            "gamma0": self.gamma0, "C": None if self.C is None else str(self.C),
            "coset": cos, "delta": self.delta, "evidence": self.evidence,
        }


def _order(poly):
    for i, c in enumerate(poly):
        if not c.is_zero():
            return i
    return None


def _dominance_bound(poly, o):
    """Smallest t >= 1 making the degree-o term strictly dominant for every v(x) >= t."""
    best = 1
    vo = poly[o].val
    for k in range(o + 1, len(poly)):
        c = poly[k]
        if c.is_zero():
            continue
        best = max(best, floor(Fraction(vo - c.val, k - o)) + 1)
    return best


def asymptotic_of_rational(num, den):
    """Exact asymptotic form at 0 of num/den from the lowest-order terms (Newton polygon)."""
    og, oh = _order(num), _order(den)
    if oh is None:
        raise ZeroDenominatorGerm("denominator vanishes identically")
    if og is None:
        return [AsymptoticForm(None, None, None, "ALL", None, True)]
    C = num[og] / den[oh]
    delta = max(_dominance_bound(num, og), _dominance_bound(den, oh))
    return [AsymptoticForm(Fraction(og - oh), C.val, C, "ALL", delta, False, "exact")]


def asymptotic_empirical(f, lam, m, t_range, seed=0, slack=None, samples_per_t=3):
    """Fit v(f(x)) = q v(x) + gamma0 on x in lambda*P_m with v(x) in t_range, then estimate C."""
    ctx = lam.ctx if isinstance(lam, PElement) else None
    lam = ctx.element(lam)
    slack = 2 * ctx.e if slack is None else slack
    t_range = sorted(t_range)
    if len(t_range) < 2:
        raise NotAffine("need at least two depths")
    rng = random.Random(seed)
    pts = {}
    for t in t_range:
        s, rem = divmod(t - lam.val, m)
        if rem or s < 0:
            raise NotInDomain(f"no element of lambda*P_{m} has valuation {t}")
        row = []
        for _ in range(samples_per_t):
            u = ctx.random_unit(rng)
            x = lam * (ctx.uniformizer ** s * u) ** m
            row.append((x, _call(f, x)))
        pts[t] = row
    zeros = [y.is_zero() for row in pts.values() for _, y in row]
    if all(zeros):
        return AsymptoticForm(None, None, None, (lam, m), None, True, "estimate",
                              {"t_range": t_range, "samples": len(zeros)})
    if any(zeros):
        raise NotAffine("f vanishes on part of the sample only")
    vals = {}
    for t, row in pts.items():
        vs = {y.val for _, y in row}
        if len(vs) != 1:
            raise NotAffine(f"v(f(x)) is not constant on v(x) = {t}: {sorted(vs)}")
        vals[t] = vs.pop()
    t0, t1 = t_range[0], t_range[1]
    q = Fraction(vals[t1] - vals[t0], t1 - t0)
    for t in t_range:
        if Fraction(vals[t] - vals[t0]) != q * (t - t0):
            raise NotAffine("valuations are not affine in v(x)", valuations={str(k): v for k, v in vals.items()})
    g0 = vals[t0] - q * t0
    if g0.denominator != 1 or q.denominator > m:
        raise NotAffine(f"fit q = {q}, gamma0 = {g0} is not admissible for P_{m}")
    tmax = t_range[-1]

    def xq(x):
        if q.denominator == 1:
            return x ** q.numerator
        qmap = build_qth_power_map(ctx, q)
        try:
            return qmap(x)
        except NotInDomain:
            raise NoQthPowerMap(f"x^{q} is undefined on lambda*P_{m}") from None

    x0, y0 = pts[tmax][0]
    C = y0 / xq(x0)
    conv = {}
    for t, row in pts.items():
        worst = INF
        for x, y in row:
            d = y / (C * xq(x)) - 1
            rv = residual_valuation(d)
            worst = min(worst, rv)
            if not d.is_zero() and d.val < t - slack:
                raise RatioNotConverging(f"ratio off by valuation {d.val} at depth {t}",
                                         x=str(x), depth=t)
        conv[str(t)] = _jv(worst)
    return AsymptoticForm(q, int(g0), C, (lam, m), None, False, "estimate",
                          {"t_range": t_range, "ratio_valuation": conv, "slack": slack,
                           "samples": len(zeros)})


# -- second-order Taylor ---------------------------------------------------------------

@dataclass
class TaylorReport:
    f1: PElement
    f2: PElement
    gains: list
    step: int

    def to_json(self):
        return {"f1": str(self.f1), "f2": str(self.f2), "step_valuation": self.step,
                "gains": [{"k": k, "gain": _jv(g)} for k, g in self.gains]}


def verify_taylor2(f, a, step=None, schedule=None):
    """Central-difference estimates of f'(a), f''(a) and a check of the order-2 remainder."""
    ctx = a.ctx
    N = ctx.N
    s = step if step is not None else max(1, N // 4)
    h = ctx.uniformizer ** s
    fa, fp, fm = _call(f, a), _call(f, a + h), _call(f, a - h)
    f1 = (fp - fm) / (2 * h)
    f2 = (fp - 2 * fa + fm) / (h * h)
    # central differences carry an O(h^2) truncation error on top of rounding
    f1, f2 = f1.with_prec(2 * s), f2.with_prec(2 * s)
    ks = list(schedule or range(1, max(1, -(-N // 4) - 1) + 1))
    gains = []
    prev = -INF
    for k in ks:
        eps = ctx.uniformizer ** k
        R = _call(f, a + eps) - fa - f1 * eps - (f2 / 2) * eps * eps
        gain = INF if R.is_zero() else R.val - 2 * k
        gains.append((k, gain))
        if gain < 1 or (gain <= prev and gain != INF):
            raise ExpansionFailed(f"remainder gain {gain} at v(eps) = {k}", witness_eps=k,
                                  gains=[[kk, _jv(g)] for kk, g in gains])
        prev = gain
    return TaylorReport(f1, f2, gains, s)
