"""Ultrametric solvers: contraction fixed points, Hensel roots, local inversion."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product

from .errors import (
    HypothesisViolated,
    NoProgress,
    NotContracting,
    PadlabError,
    SingularDerivative,
    TargetOutsideCertifiedBall,
)
from .field import INF, Ball, PElement, PVector


def residual_valuation(r):
    """Valuation of a residual, reading a zero-at-precision as its precision."""
    if isinstance(r, PElement):
        return r.prec if r.is_zero() else r.val
    return min(residual_valuation(c) for c in r)


class _Scalar:
    """Adapter so one-variable callables can run through the vector solvers."""

    def __init__(self, f):
        self.f = f

    def __call__(self, v):
        return PVector([self.f(v[0])], v.ctx)


def _vectorize(f, a):
    if isinstance(a, PElement):
        return _Scalar(f), PVector([a]), True
    return f, a, False


def _unvec(x, scalar):
    return x[0] if scalar else x


# -- sampling -----------------------------------------------------------------

def lattice_points(ctx, center, gamma, count):
    """Deterministic points center + pi^gamma * v, v running over residue combinations."""
    d = len(center)
    res = list(ctx.residues())
    pi_g = ctx.uniformizer ** gamma if gamma else ctx.one()
    pts = []
    for combo in product(range(len(res)), repeat=2 * d):
        coords = []
        for i in range(d):
            u = ctx.element_from_digits([res[combo[2 * i]], res[combo[2 * i + 1]]])
            coords.append(center[i] + pi_g * u)
        pts.append(PVector(coords, ctx))
        if len(pts) >= count:
            break
    return pts


def random_point(ctx, center, gamma, rng):
    return PVector([c + ctx.random_integral(rng, gamma) for c in center], ctx)


def sample_pairs(ctx, center, gamma, rng, n_lattice=64, n_random=64):
    """Deterministic lattice pairs first, then uniform random pairs in B_gamma(center)."""
    pts = lattice_points(ctx, center, gamma, 24)
    pairs = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if len(pairs) >= n_lattice:
                break
            pairs.append((pts[i], pts[j]))
    while len(pairs) < n_lattice + n_random:
        x = random_point(ctx, center, gamma, rng)
        y = random_point(ctx, center, gamma, rng)
        if not (x - y).is_zero():
            pairs.append((x, y))
    return pairs


def certify_contraction(f, ball, rng, n_lattice=64, n_random=64):
    """Check v(f(x) - f(y)) > v(x - y) on sampled pairs; returns the first violation or None."""
    ctx = ball.ctx
    for x, y in sample_pairs(ctx, ball.center, ball.radius, rng, n_lattice, n_random):
        dxy = (x - y).valuation()
        if dxy >= min(x.prec, y.prec):
            continue
        dv = residual_valuation(f(x) - f(y))
        if dv <= dxy:
            return {"x": [str(c) for c in x], "y": [str(c) for c in y],
                    "v_dx": dxy, "v_df": dv}
    return None


# -- contraction --------------------------------------------------------------

@dataclass
class SolveResult:
    solution: object
    residual_valuation: int
    iterations: int
    residuals: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_json(self):
        sol = self.solution
        out = {
            "solution": [str(c) for c in sol] if isinstance(sol, PVector) else str(sol),
            "residual_valuation": _jv(self.residual_valuation),
            "iterations": self.iterations,
            "residuals": [_jv(r) for r in self.residuals],
        }
        out.update(self.extra)
        return out


def _jv(v):
    return "inf" if v == INF else v


def contraction_fixed_point(f, ball, seed=0, shift=None, certify=True):
    """Fixed point of a contraction f on ``ball`` by plain iteration.

    With ``shift=c`` this solves f(x) = x - c instead (the fixed point of f + c).
    """
    ctx = ball.ctx
    g = f
    if shift is not None:
        c = shift if isinstance(shift, PVector) else PVector([shift], ctx)
        g = lambda x: f(x) + c  # noqa: E731
    if certify:
        witness = certify_contraction(g, ball, random.Random(seed))
        if witness is not None:
            raise NotContracting("sampled pair is not contracted", witness=witness)
    x = ball.center.lift()
    residuals = []
    prev = -INF
    for it in range(ctx.N + 1):
        fx = g(x)
        r = residual_valuation(fx - x)
        residuals.append(r)
        if r >= ctx.N:
            return SolveResult(fx, r, it, residuals)
        if r <= prev:
            raise NoProgress(f"residual valuation stalled at {r}", residuals=residuals)
        prev = r
        x = fx.lift()
    raise NoProgress("iteration budget exhausted", residuals=residuals)


def fixed_point_scalar(f, center, radius, seed=0, shift=None):
    """One-variable convenience wrapper around :func:`contraction_fixed_point`."""
    ctx = center.ctx
    res = contraction_fixed_point(_Scalar(f), Ball(PVector([center], ctx), radius),
                                  seed=seed, shift=None if shift is None else PVector([shift], ctx))
    res.solution = res.solution[0]
    return res


# -- Hensel roots of monic polynomials ----------------------------------------

def _poly_eval(coeffs, x):
    acc = x.ctx.zero()
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def hensel_root_monic(coeffs):
    """Unique root in m of x^n + a_{n-1}x^{n-1} + ... + a_0 (coeffs = [a_0..a_{n-1}])."""
    if len(coeffs) < 2:
        raise HypothesisViolated("need a_0 and a_1")
    ctx = coeffs[0].ctx
    a = [ctx.element(c) for c in coeffs]
    if not (a[0].is_zero() or a[0].val >= 1):
        raise HypothesisViolated("a_0 must lie in the maximal ideal", coefficient=0)
    if a[1].is_zero() or a[1].val != 0:
        raise HypothesisViolated("a_1 must be a unit", coefficient=1)
    for i, c in enumerate(a[2:], start=2):
        if not c.is_zero() and c.val < 0:
            raise HypothesisViolated(f"a_{i} must be integral", coefficient=i)
    P = a + [ctx.one()]
    dP = [i * P[i] for i in range(1, len(P))]
    r = ctx.zero()
    residuals = []
    for it in range(2 * ctx.N + 2):
        val = _poly_eval(P, r)
        res = residual_valuation(val)
        residuals.append(res)
        if res >= ctx.N or val.is_zero():
            break
        r = (r - val / _poly_eval(dP, r)).lift()
    else:
        raise NoProgress("Newton iteration did not converge", residuals=residuals)
    # uniqueness in m, by counting roots of the reduction mod pi^2
    count = 0
    for d in ctx.residues():
        cand = ctx.element_from_digits([(0,) * ctx.f, d])
        v = residual_valuation(_poly_eval(P, cand))
        if v >= 2:
            count += 1
    root = r.with_prec(min(r.prec, residuals[-1])) if not r.is_zero() else ctx.zero(residuals[-1])
    return SolveResult(root, residuals[-1], len(residuals) - 1, residuals,
                       {"roots_mod_pi2_in_m": count})


# -- linear algebra over K ----------------------------------------------------

def solve_linear(A, b):
    """Solve A x = b by Gaussian elimination, pivoting on the smallest valuation."""
    n = len(A)
    M = [list(row) + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not M[r][col].is_zero() and (piv is None or M[r][col].val < M[piv][col].val):
                piv = r
        if piv is None:
            raise SingularDerivative(f"column {col} has no usable pivot")
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col].inverse()
        for r in range(n):
            if r != col and not M[r][col].is_zero():
                t = M[r][col] * inv
                M[r] = [M[r][k] - t * M[col][k] for k in range(n + 1)]
    return [M[i][n] / M[i][i] for i in range(n)]


def _as_matrix(Df, ctx):
    if isinstance(Df, PElement):
        return [[Df]]
    return [[ctx.element(c) for c in row] for row in Df]


def _det_valuation(A):
    # valuation of the determinant via elimination on a copy
    n = len(A)
    M = [list(r) for r in A]
    total = 0
    for col in range(n):
        piv = min((r for r in range(col, n) if not M[r][col].is_zero()),
                  key=lambda r: M[r][col].val, default=None)
        if piv is None:
            return INF
        M[col], M[piv] = M[piv], M[col]
        total += M[col][col].val
        inv = M[col][col].inverse()
        for r in range(col + 1, n):
            if not M[r][col].is_zero():
                t = M[r][col] * inv
                M[r] = [M[r][k] - t * M[col][k] for k in range(n)]
    return total


def local_inverse_solve(f, a, Df_a, c, seed=0, jacobian=None, radii=None):
    """Find x near ``a`` with f(x) = c.

    The certified ball B_gamma(a) is the largest ball (smallest gamma from the
    schedule 0, v(p), 2v(p), 4v(p), ...) on which h(x) = x - Df_a^{-1}(f(x) - c)
    passes the contraction certificate.  Iteration uses h (chord steps) unless a
    ``jacobian`` callable is supplied, in which case Newton steps are taken.
    """
    f, a, scalar = _vectorize(f, a)
    ctx = a.ctx
    if isinstance(c, PElement):
        c = PVector([c], ctx)
    if jacobian is not None and scalar:
        jf = jacobian
        jacobian = lambda v: [[jf(v[0])]]  # noqa: E731
    A = _as_matrix(Df_a, ctx)
    dv = _det_valuation(A)
    if dv == INF:
        raise SingularDerivative("derivative at the base point is singular")
    solve = lambda rhs: PVector(solve_linear(A, list(rhs)), ctx)  # noqa: E731
    h = lambda x: x - solve(f(x) - c)  # noqa: E731
    step0 = solve(c - f(a))
    e = ctx.e
    radii = radii or [0, e] + [e * 2 ** k for k in range(1, 8)]
    gamma = None
    for g in radii:
        if g >= ctx.N:
            break
        if certify_contraction(h, Ball(a, g), random.Random(seed)) is None:
            gamma = g
            break
    if gamma is None:
        raise TargetOutsideCertifiedBall("no radius passed the contraction certificate")
    if residual_valuation(step0) < gamma:
        raise TargetOutsideCertifiedBall(
            f"target is outside the certified image ball (radius {gamma})",
            radius=gamma, step_valuation=residual_valuation(step0))
    n_eff = ctx.N - dv
    x = x_prev = a.lift()
    residuals = []
    prev = -INF
    for it in range(4 * ctx.N + 4):
        r = residual_valuation(f(x) - c)
        residuals.append(r)
        if r >= ctx.N:
            break
        if r <= prev:
            if prev >= n_eff:
                residuals.pop()
                x = x_prev
                break
            raise NoProgress(f"residual stalled at {r}", residuals=residuals)
        prev, x_prev = r, x
        if jacobian is not None:
            J = _as_matrix(jacobian(x), ctx)
            x = (x - PVector(solve_linear(J, list(f(x) - c)), ctx)).lift()
        else:
            x = h(x).lift()
    sol = _unvec(x, scalar)
    return SolveResult(sol, residuals[-1], len(residuals) - 1, residuals,
                       {"radius": gamma, "effective_precision": n_eff})


__all__ = [
    "SolveResult", "contraction_fixed_point", "fixed_point_scalar", "hensel_root_monic",
    "local_inverse_solve", "solve_linear", "certify_contraction", "sample_pairs",
    "residual_valuation", "PadlabError",
]
