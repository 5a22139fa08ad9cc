from fractions import Fraction

import pytest

from padlab import PVector, make_context
from padlab.calculus import (
    asymptotic_empirical,
    asymptotic_of_rational,
    coset_derivative,
    estimate_strict_derivative,
    strict_derivative,
    verify_strict_derivative,
    verify_taylor2,
)
from padlab.errors import CriterionFailed, ExpansionFailed, NotAffine, ZeroDenominatorGerm
from padlab.powers import build_qth_power_map, power_coset_reps


def test_scalar_derivatives(Q5):
    rep = estimate_strict_derivative(lambda x: x * x, Q5.from_int(3))
    assert rep.mu[0][0].to_int() % 5 ** rep.effective_precision[0][0] == 6
    rep = estimate_strict_derivative(lambda x: x + 5 * x ** 3, Q5.one())
    assert rep.mu[0][0] == Q5.from_int(16).with_prec(rep.effective_precision[0][0])


def test_jacobian(Q5):
    f = lambda v: PVector([v[0] * v[1], v[0] + v[1]], Q5)  # noqa: E731
    a = PVector([Q5.from_int(2), Q5.from_int(7)])
    rep = estimate_strict_derivative(f, a)
    want = [[7, 2], [1, 1]]
    for r in range(2):
        for c in range(2):
            assert rep.mu[r][c] == Q5.from_int(want[r][c]).with_prec(rep.effective_precision[r][c])


def test_verify(Q5):
    a = Q5.from_int(3)
    assert verify_strict_derivative(lambda x: x * x, a, Q5.from_int(6), 2, seed=1) == 2
    with pytest.raises(CriterionFailed) as exc:
        verify_strict_derivative(lambda x: x * x, a, Q5.from_int(7), 2, seed=1)
    assert exc.value.data["witness"] is not None
    assert verify_strict_derivative(lambda x: Q5.from_int(4), a, Q5.zero(), 2, seed=1) == 2


def test_strict_pipeline(Q5):
    rep = strict_derivative(lambda x: x ** 3 - 2 * x, Q5.from_int(2), seed=9)
    assert rep.verified_gamma == Q5.N // 3 and rep.witness is None
    assert rep.to_json()["mu"] == [[str(rep.mu[0][0])]]


def test_coset_derivative_q1(Q5):
    cd = coset_derivative(lambda x: x * x, Q5.from_int(3), Q5.one(), 1)
    assert cd.normalized == Q5.from_int(6).with_prec(cd.normalized.prec)
    cd = coset_derivative(lambda x: 5 * x + x ** 3, Q5.zero(), Q5.one(), 1)
    assert cd.value == Q5.from_int(5).with_prec(cd.value.prec)


def test_coset_independence():
    K = make_context(5, precision=24)
    f = lambda x: x ** 3 + 2 * x  # noqa: E731
    a = K.from_int(2)
    mu = estimate_strict_derivative(f, a).mu[0][0]
    for lam in power_coset_reps(K, 4).reps:
        g = coset_derivative(f, a, lam, 4).normalized
        P = min(g.prec, mu.prec)
        assert g.with_prec(P) == mu.with_prec(P)


def test_coset_derivative_sqrt():
    K = make_context(5, precision=40)
    half = build_qth_power_map(K, Fraction(1, 2))
    cd = coset_derivative(half, K.zero(), K.one(), 8, q=Fraction(1, 2), fa=K.zero())
    assert cd.value == K.one().with_prec(cd.value.prec)


def test_rational_forms(Q5):
    z, o = Q5.zero(), Q5.one()
    (f,) = asymptotic_of_rational([z, z, o], [o, o])
    assert (f.q, f.gamma0, str(f.C), f.delta) == (2, 0, "[1]", 1)
    (f,) = asymptotic_of_rational([z, Q5.from_int(5), z, o], [o])
    assert (f.q, f.gamma0, f.C, f.delta) == (1, 1, Q5.from_int(5), 1)
    (f,) = asymptotic_of_rational([o], [z, o])
    assert f.q == -1
    assert asymptotic_of_rational([z], [o])[0].zero_flag
    with pytest.raises(ZeroDenominatorGerm):
        asymptotic_of_rational([o], [z])


def test_empirical_matches_rational(Q5):
    f = lambda x: x * x / (1 + x)  # noqa: E731
    form = asymptotic_empirical(f, Q5.one(), 1, [2, 3, 4, 5], seed=3)
    assert (form.q, form.gamma0) == (2, 0)
    # the estimate of C is 1/(1+x) at the deepest sample, so it agrees with 1 mod pi^(t_max - slack)
    assert form.C.with_prec(5 - form.evidence["slack"]) == Q5.one().with_prec(3)
    assert asymptotic_empirical(lambda x: Q5.zero(), Q5.one(), 1, [1, 2], seed=0).zero_flag


def test_empirical_sqrt():
    K = make_context(5, precision=40)
    half = build_qth_power_map(K, Fraction(1, 2))
    form = asymptotic_empirical(half, K.one(), 8, [8, 16, 24, 32], seed=1)
    assert form.q == Fraction(1, 2) and form.gamma0 == 0 and form.C == K.one().with_prec(form.C.prec)


def test_not_affine(Q5):
    # v(x + x^2/5) changes slope at v(x) = 1
    with pytest.raises(NotAffine):
        asymptotic_empirical(lambda x: x + x * x / 25, Q5.one(), 1, [1, 2, 3, 4], seed=0)


def test_taylor(Q5):
    rep = verify_taylor2(lambda x: x ** 3, Q5.one())
    assert rep.f1 == Q5.from_int(3).with_prec(rep.f1.prec)
    assert rep.f2 == Q5.from_int(6).with_prec(rep.f2.prec)
    K = make_context(5, precision=16)
    rep = verify_taylor2(lambda x: 1 / (1 + x), K.zero())
    assert rep.f1 == -K.one().with_prec(rep.f1.prec)
    assert all(g >= k for k, g in rep.gains)
    rep = verify_taylor2(lambda x: x * x, K.from_int(2))
    assert all(g == float("inf") or g > 100 for _, g in rep.gains)


def test_taylor_failure(Q5):
    K = make_context(5, precision=16)
    with pytest.raises(ExpansionFailed):
        # |x| has no Taylor expansion at 0, modelled by x -> x * unit flip
        verify_taylor2(lambda x: K.from_int(5) ** (0 if x.is_zero() else min(x.val, 8)), K.zero())
