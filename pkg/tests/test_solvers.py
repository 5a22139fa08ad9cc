import pytest

from padlab import Ball, PVector
from padlab.errors import HypothesisViolated, NotContracting, SingularDerivative
from padlab.solvers import (
    contraction_fixed_point,
    fixed_point_scalar,
    hensel_root_monic,
    local_inverse_solve,
    solve_linear,
)


def test_geometric_fixed_point(Q5):
    res = fixed_point_scalar(lambda x: 5 * x + 1, Q5.zero(), 0, seed=1)
    assert res.solution.digits() == [1] * 8
    assert res.residuals == list(range(9))
    assert res.solution.to_int() % 125 == 31


def test_shifted_fixed_point(Q5):
    # f(x) = x - c with f = 5x + 1 - 1, c = -1  ->  x = -1/4
    res = fixed_point_scalar(lambda x: 5 * x, Q5.zero(), 0, seed=0, shift=Q5.one())
    assert res.solution * 4 == -Q5.one()


def test_not_contracting(Q5):
    with pytest.raises(NotContracting) as exc:
        fixed_point_scalar(lambda x: x * x + 1, Q5.zero(), 0, seed=0)
    assert "witness" in exc.value.data


def test_vector_fixed_point(Q3):
    f = lambda v: PVector([3 * v[1] + 1, 3 * v[0] * v[0] + 2], Q3)  # noqa: E731
    res = contraction_fixed_point(f, Ball(PVector([Q3.zero(), Q3.zero()]), 0), seed=4)
    x = res.solution
    assert (f(x) - x).valuation() >= 8


def test_hensel(Q5):
    res = hensel_root_monic([Q5.from_int(5), Q5.one()])
    r = res.solution
    assert r.to_int() % 25 == 20 and r.to_int() % 125 == 95
    assert res.residuals[-1] >= 8 and res.iterations <= 4
    assert res.extra["roots_mod_pi2_in_m"] == 1
    brute = [x for x in range(125) if (x * x + x + 5) % 125 == 0 and x % 5 == 0]
    assert brute == [95]


def test_hensel_hypotheses(Q5):
    with pytest.raises(HypothesisViolated):
        hensel_root_monic([Q5.one(), Q5.one()])
    with pytest.raises(HypothesisViolated):
        hensel_root_monic([Q5.from_int(5), Q5.from_int(5)])


def test_local_inverse_sqrt(Q5):
    res = local_inverse_solve(lambda x: x * x, Q5.from_int(4), Q5.from_int(8), Q5.from_int(6), seed=2)
    assert res.solution * res.solution == Q5.from_int(6)
    assert res.solution.to_int() % 25 == 9  # the root near 4, not 16
    assert res.extra["radius"] == 1


def test_local_inverse_newton(Q5):
    f = lambda x: x + 5 * x * x  # noqa: E731
    res = local_inverse_solve(f, Q5.zero(), Q5.one(), Q5.from_int(5), seed=0,
                              jacobian=lambda x: 1 + 10 * x)
    assert f(res.solution) == Q5.from_int(5)
    chord = local_inverse_solve(f, Q5.zero(), Q5.one(), Q5.from_int(5), seed=0)
    assert chord.residuals == [1, 3, 5, 7, 9]
    assert all(b > a for a, b in zip(chord.residuals, chord.residuals[1:]))


def test_singular(Q5):
    with pytest.raises(SingularDerivative):
        local_inverse_solve(lambda x: x * x, Q5.zero(), Q5.zero(), Q5.one())


def test_solve_linear(Q5):
    A = [[Q5.from_int(5), Q5.one()], [Q5.one(), Q5.from_int(2)]]
    b = [Q5.from_int(3), Q5.from_int(4)]
    x = solve_linear(A, b)
    assert A[0][0] * x[0] + A[0][1] * x[1] == b[0]
    assert A[1][0] * x[0] + A[1][1] * x[1] == b[1]
