"""Acceptance criteria 1 to 10.

Each criterion is a function returning ``(ok, detail)``.  Under pytest every
criterion prints one ``criterion N: PASS|FAIL`` line (visible with ``-s`` or in
the final summary); run the file directly to get just those ten lines::

    python3 tests/test_acceptance.py
"""

from __future__ import annotations

import io
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from corpus import EXPRESSIONS, MALFORMED, RATIONALS  # noqa: E402
from padlab import PVector, make_context  # noqa: E402
from padlab.calculus import (  # noqa: E402
    asymptotic_empirical, asymptotic_of_rational, coset_derivative, estimate_strict_derivative,
    strict_derivative,
)
from padlab.cli import main as cli_main  # noqa: E402
from padlab.errors import DomainError, ExprSyntaxError  # noqa: E402
from padlab.expr import check_ledger, compile_function, parse, to_rational, to_text  # noqa: E402
from padlab.grouplaw import (  # noqa: E402
    FAIL, PASS, check_A_n, check_B_n, check_C_n, check_D, check_E, law_heisenberg, law_multiplicative,
    rescale_law,
)
from padlab.lazard import lazard_report  # noqa: E402
from padlab.powers import build_qth_power_map, is_nth_power, power_coset_reps  # noqa: E402
from padlab.solvers import fixed_point_scalar, hensel_root_monic  # noqa: E402

LAWS = Path(__file__).resolve().parent.parent / "laws"


def _timed(budget):
    def wrap(fn):
        def run():
            t0 = time.perf_counter()
            ok, detail = fn()
            dt = time.perf_counter() - t0
            if budget is not None and dt >= budget:
                ok, detail = False, f"{detail}; took {dt:.1f}s, budget {budget}s"
            return ok, f"{detail} [{dt:.2f}s]"
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


# -- 1 ------------------------------------------------------------------------------

@_timed(5)
def criterion_1():
    """Arithmetic matches an integer oracle mod p^8."""
    rng = random.Random(1)
    total = bad = 0
    for p in (2, 3, 5):
        K = make_context(p, precision=8)
        M = p ** 8
        for _ in range(3334):
            a = rng.randrange(-10 ** 12, 10 ** 12)
            b = rng.randrange(1, 10 ** 12)
            while b % p == 0:
                b += 1
            x, y = K.from_int(a), K.from_int(b)
            op = rng.randrange(3)
            if op == 0:
                got, want = x + y, (a + b) % M
            elif op == 1:
                got, want = x * y, (a * b) % M
            else:
                got, want = x / y, a * pow(b, -1, M) % M
            val = 0 if got.is_zero() else got.with_prec(8).to_int() % M
            total += 1
            bad += val != want
    return bad == 0, f"{total} operations, {bad} mismatches"


# -- 2 ------------------------------------------------------------------------------

@_timed(None)
def criterion_2():
    """Hensel root of x^2 + x + 5 over Q_5."""
    K = make_context(5, precision=8)
    res = hensel_root_monic([K.from_int(5), K.one()])
    r = res.solution.to_int()
    brute = [x for x in range(125) if (x * x + x + 5) % 125 == 0 and x % 5 == 0]
    ok = (r % 25 == 20 and r % 125 == 95 and brute == [r % 125]
          and res.residual_valuation >= 8 and res.iterations <= 4)
    return ok, f"root mod 125 = {r % 125}, brute force {brute}, residuals {res.residuals}"


# -- 3 ------------------------------------------------------------------------------

@_timed(None)
def criterion_3():
    """Contraction solver for 5x + 1."""
    K = make_context(5, precision=8)
    res = fixed_point_scalar(lambda x: 5 * x + 1, K.zero(), 0, seed=3)
    x = res.solution.to_int()
    rs = res.residuals
    ok = (res.solution.digits() == [1] * 8 and x % 25 == 6 and x % 125 == 31
          and res.iterations <= K.N and all(b > a for a, b in zip(rs, rs[1:])))
    return ok, f"digits {res.solution.digits()}, residuals {rs}"


# -- 4 ------------------------------------------------------------------------------

def _power_oracle(x, n):
    ctx = x.ctx
    p = ctx.p
    if x.val % n:
        return False
    u = (x / ctx.from_int(p) ** x.val).to_int()
    s = 0
    while n % p ** (s + 1) == 0:
        s += 1
    M = p ** (2 * s + 1)  # unit n-th powers are detected mod p^(2 v_p(n) + 1)
    return any(pow(y, n, M) == u % M for y in range(M) if y % p)


@_timed(None)
def criterion_4():
    """Power classes and the q-th power map."""
    rng = random.Random(4)
    mism = checked = 0
    for p in (2, 3, 5):
        K = make_context(p, precision=8)
        for n in (2, 3, 4):
            for i in range(500):
                if i % 2:
                    x = K.random_element(rng, -2, 2) ** n
                else:
                    x = K.random_element(rng, -3, 3)
                got, w = is_nth_power(x, n)
                want = _power_oracle(x, n)
                checked += 1
                if got != want or (got and w ** n != x):
                    mism += 1
    sizes = (len(power_coset_reps(make_context(5, precision=8), 2)),
             len(power_coset_reps(make_context(2, precision=8), 2)))
    K = make_context(5, precision=8)
    half = build_qth_power_map(K, Fraction(1, 2))
    sq_bad = 0
    for _ in range(100):
        y = K.random_element(rng, 0, 1)
        x = y ** 8
        sq_bad += half(x) ** 2 != x
    image = half(K.from_int(5 ** 8))
    ok = mism == 0 and sizes == (4, 8) and sq_bad == 0 and image == K.from_int(5 ** 4)
    return ok, (f"{checked} samples, {mism} oracle mismatches; |Q5*/P2|={sizes[0]}, |Q2*/P2|={sizes[1]}; "
                f"{sq_bad}/100 square-back failures; 5^8 -> {image}")


# -- 5 ------------------------------------------------------------------------------

@_timed(None)
def criterion_5():
    """Rational asymptotics agree with the empirical fit; square-root map exponent 1/2."""
    K = make_context(5, precision=40)
    ts = [4, 8, 12, 16]
    bad = []
    for i, text in enumerate(RATIONALS):
        num, den = to_rational(parse(text), K)
        (sym,) = asymptotic_of_rational(num, den)
        emp = asymptotic_empirical(compile_function(text, K), K.one(), 1, ts, seed=50 + i)
        rel = emp.C / sym.C - 1
        agree = rel.is_zero() or rel.val >= ts[-1] - emp.evidence["slack"]
        if (emp.q, emp.gamma0) != (sym.q, sym.gamma0) or not agree:
            bad.append(text)
    half = build_qth_power_map(K, Fraction(1, 2))
    sq = asymptotic_empirical(half, K.one(), 8, [8, 16, 24, 32], seed=5)
    conv = all(v == "inf" or v >= int(t) - 2 for t, v in sq.evidence["ratio_valuation"].items())
    ok = not bad and sq.q == Fraction(1, 2) and sq.C == K.one().with_prec(sq.C.prec) and conv
    return ok, (f"{len(RATIONALS) - len(bad)}/{len(RATIONALS)} rational forms agree {bad or ''}; "
                f"sqrt map q={sq.q}, C={sq.C}, ratio valuations {sq.evidence['ratio_valuation']}")


# -- 6 ------------------------------------------------------------------------------

def _maps(K):
    """Ten polynomial maps of dimension 1 to 3 with their Jacobians."""
    V = lambda *c: PVector(list(c), K)  # noqa: E731
    return [
        (lambda v: V(v[0] ** 2), lambda v: [[2 * v[0]]], [3]),
        (lambda v: V(v[0] + 5 * v[0] ** 3), lambda v: [[1 + 15 * v[0] ** 2]], [1]),
        (lambda v: V(2 * v[0] ** 3 - 3 * v[0]), lambda v: [[6 * v[0] ** 2 - 3]], [7]),
        (lambda v: V(v[0] * v[1], v[0] + v[1]), lambda v: [[v[1], v[0]], [1, 1]], [2, 9]),
        (lambda v: V(v[0] ** 2 - v[1], 5 * v[1] ** 2), lambda v: [[2 * v[0], -1], [0, 10 * v[1]]], [4, 1]),
        (lambda v: V(v[0] ** 2 * v[1]), lambda v: [[2 * v[0] * v[1], v[0] ** 2]], [3, 2]),
        (lambda v: V(v[0] + v[1] + v[2], v[0] * v[1] * v[2]),
         lambda v: [[1, 1, 1], [v[1] * v[2], v[0] * v[2], v[0] * v[1]]], [1, 2, 3]),
        (lambda v: V(v[0] ** 3, v[1] ** 3, v[2] ** 3),
         lambda v: [[3 * v[0] ** 2, 0, 0], [0, 3 * v[1] ** 2, 0], [0, 0, 3 * v[2] ** 2]], [2, 3, 4]),
        (lambda v: V(v[0] * v[1] - v[2] ** 2, v[2]),
         lambda v: [[v[1], v[0], -2 * v[2]], [0, 0, 1]], [6, 1, 2]),
        (lambda v: V(v[0] ** 4 + v[0]), lambda v: [[4 * v[0] ** 3 + 1]], [11]),
    ]


def _agree(x, y):
    P = min(x.prec, y.prec)
    return (x - y).with_prec(P).is_zero()


POLY_PAIRS = [
    ([0, 1, 1], [1, 2]), ([0, 0, 1], [0, 1, 0, 1]), ([2, 3], [1, 0, 5]), ([0, 1, 0, 1], [0, 0, 1]),
    ([1, 1, 1, 1], [0, 5]), ([3, 0, 2], [1, 1, 1]), ([0, 7], [0, 0, 0, 1]), ([1, 0, 0, 0, 1], [2, 1]),
    ([0, 1, 5], [0, 1, 5]), ([4, 0, 1], [1, 0, 0, 2]),
]


def _poly(c):
    return lambda x: sum((ci * x ** i for i, ci in enumerate(c) if ci), x.ctx.zero())


@_timed(None)
def criterion_6():
    """Strict derivatives, chain rule, coset independence."""
    K = make_context(5, precision=12)
    notes = []
    ok = True
    for idx, (f, J, a) in enumerate(_maps(K)):
        av = PVector([K.from_int(c) for c in a], K)
        rep = strict_derivative(f, av, gamma_max=K.N // 3, seed=60 + idx)
        want = J(av)
        for r, row in enumerate(rep.mu):
            for c, mu in enumerate(row):
                if not _agree(mu, K.element(want[r][c])):
                    ok = False
                    notes.append(f"map {idx} entry {r},{c}")
        if rep.verified_gamma != K.N // 3:
            ok = False
            notes.append(f"map {idx} verified only to {rep.verified_gamma}")
    chain_bad = 0
    for i, (cf, cg) in enumerate(POLY_PAIRS):
        f, g = _poly(cf), _poly(cg)
        a = K.from_int(2 + i)
        df = estimate_strict_derivative(f, a).mu[0][0]
        dg = estimate_strict_derivative(g, f(a)).mu[0][0]
        dgf = estimate_strict_derivative(lambda x: g(f(x)), a).mu[0][0]
        chain_bad += not _agree(dgf, dg * df)
    K24 = make_context(5, precision=24)
    reps = power_coset_reps(K24, 4).reps
    coset_bad = 0
    for i, (cf, _) in enumerate(POLY_PAIRS):
        f = _poly(cf)
        a = K24.from_int(3 + i)
        mu = estimate_strict_derivative(f, a).mu[0][0]
        for lam in reps:
            g = coset_derivative(f, a, lam, 4).normalized
            coset_bad += not _agree(g, mu)
    ok = ok and chain_bad == 0 and coset_bad == 0
    return ok, (f"10 maps verified to gamma={K.N // 3} {notes or ''}; chain rule {10 - chain_bad}/10; "
                f"coset derivatives agree on {10 * len(reps) - coset_bad}/{10 * len(reps)} "
                f"(function, coset) pairs over all {len(reps)} cosets of P_4")


# -- 7 ------------------------------------------------------------------------------

@_timed(30)
def criterion_7():
    """Group-law conditions on L1, L2 and L2 over Q_2."""
    K = make_context(5, precision=8)
    L1 = law_multiplicative(K, 1)
    c2 = check_C_n(L1, 2)
    c2_ok = c2.status == FAIL and c2.witness["i"] == [1] and c2.witness["j"] == [1]
    L2 = rescale_law(L1, 1, 1)
    rho_ok = L2.rescale_info["rho"] == str(K.from_int(5))
    same = L2.to_document() == law_multiplicative(K, 5).to_document()
    an = all(check_A_n(L2, n, seed=7).status == PASS for n in range(1, 7))
    cn = all(check_C_n(L2, n, seed=7).status == PASS for n in range(1, 7))
    b1 = check_B_n(L2, 1, seed=7).status == PASS
    b2 = check_B_n(L2, 2, seed=7)
    b2p = check_B_n(L2, 2, k=1, seed=7).status == PASS
    b2_ok = b2.status == FAIL and b2.witness is not None and b2p
    d5 = check_D(L2, samples=256, seed=7)
    d2 = check_D(law_multiplicative(make_context(2, precision=8), 2), seed=7)
    d2_ok = d2.status == FAIL and d2.witness["x"] == ["[1]"] and d2.witness["y"] in (["0"], ["0~8"])
    e = check_E(L2, targets=20, seed=7, d_verdict=d5)
    e_ok = e.status == PASS and e.details["min_residual_valuation"] >= K.N - 2
    parts = {"C2(L1) fails at c_11": c2_ok, "rho=p": rho_ok, "rescaled is L2": same, "A_1..6": an,
             "C_1..6": cn, "B_1": b1, "B_2 fails on O, passes on pO": b2_ok,
             "D over Q5": d5.status == PASS, "D over Q2 fails at (1,0)": d2_ok, "E over Q5": e_ok}
    failed = [k for k, v in parts.items() if not v]
    return not failed, "all sub-checks hold" if not failed else f"failed: {failed}"


# -- 8 ------------------------------------------------------------------------------

@_timed(60)
def criterion_8():
    """Lazard pipeline on L2/Q_5, L_heis/Q_3 and L2/Q_2."""
    K5, K3, K2 = (make_context(p, precision=8) for p in (5, 3, 2))
    r5 = lazard_report(law_multiplicative(K5, 5), 3, seed=8)
    l5 = r5["levels"]
    l2_ok = (r5["verdict"] == PASS and r5["dimension"] == 1
             and all(lv["congruence_indices"] == [5 ** i for i in range(lv["level"] + 1)] for lv in l5)
             and all(lv["S1"]["index"] == 5 and lv["checks"]["G/S1_abelian"]
                     and lv["checks"]["G/S2_abelian"] and lv["frattini_equals_S1"]
                     and lv["generator_count"] == 1 for lv in l5))
    rh = lazard_report(law_heisenberg(K3), 2, seed=8)
    nonab = any(not lv["abelian"] for lv in rh["levels"])
    s1_ab = all(lv["checks"]["G/S1_abelian"] for lv in rh["levels"])
    heis_ok = rh["verdict"] == PASS and rh["dimension"] == 2 and nonab and s1_ab
    r2 = lazard_report(law_multiplicative(K2, 2), 3, seed=8)
    q2_ok = r2["verdict"] == FAIL and "power_kernel" in r2["failure"]["failed"]
    # coupling p^2 keeps the quotient mod p^2 abelian; reported for comparison only
    rk = lazard_report(law_heisenberg(K3, k=2), 3, seed=8)
    detail = (f"L2/Q5 levels 1-3 {'ok' if l2_ok else 'BAD'}; "
              f"L_heis/Q3 levels 1-2 verdict {rh['verdict']} (failure {rh['failure']}, nonabelian={nonab}); "
              f"L2/Q2 {r2['verdict']} at level {r2['failure'] and r2['failure']['level']}; "
              f"p^2-coupled Heisenberg levels 1-3 {rk['verdict']}, dimension {rk['dimension']}")
    return l2_ok and heis_ok and q2_ok, detail


# -- 9 ------------------------------------------------------------------------------

ENVS = [
    {"x": 6, "y": 7, "z": 3, "w": 2, "v": 11},
    {"x": 5 ** 8, "y": 7, "z": 3, "w": 2, "v": 11},
]


@_timed(None)
def criterion_9():
    """Parser round trip, positioned errors, precision ledger."""
    K = make_context(5, precision=8)
    rt = sum(to_text(parse(e)) == e for e in EXPRESSIONS)
    pos = 0
    for text, where in MALFORMED:
        try:
            parse(text)
        except ExprSyntaxError as exc:
            pos += (exc.data["line"], exc.data["col"]) == where and bool(exc.data["expected"])
    ledger_ok = unevaluated = 0
    for e in EXPRESSIONS:
        for env in ENVS:
            try:
                ok, _, _ = check_ledger(e, env, K)
            except DomainError:
                continue
            ledger_ok += ok
            break
        else:
            unevaluated += 1
    n = len(EXPRESSIONS)
    ok = rt == n == 50 and pos == len(MALFORMED) == 10 and ledger_ok == n and not unevaluated
    return ok, (f"round trip {rt}/{n}; positioned errors {pos}/{len(MALFORMED)}; "
                f"ledger agrees at N+4 on {ledger_ok}/{n}")


# -- 10 -----------------------------------------------------------------------------

SAMPLING_RUNS = [
    ["deriv", "--f", "x^3+x", "--a", "2", "--seed", "10"],
    ["deriv", "--f", "x*y", "--f", "x+y", "--a", "2;9", "--seed", "10"],
    ["asym", "--empirical", "x^2/(1+x)", "--coset", "1,1", "--t", "2,3,4,5", "--seed", "10"],
    ["solve", "fixed-point", "--f", "5*x+1", "--seed", "10"],
    ["solve", "inverse", "--f", "x^2", "--a", "4", "--c", "6", "--seed", "10"],
    ["grouplaw", "check", str(LAWS / "L2_q5.json"), "--n-max", "3", "--seed", "10"],
    ["grouplaw", "check", str(LAWS / "L1_q5.json"), "--n-max", "2", "--seed", "10"],
    ["lazard", str(LAWS / "L2_q5.json"), "--n-max", "2", "--seed", "10"],
    ["lazard", str(LAWS / "L_heis_q3.json"), "--n-max", "2", "--seed", "10"],
]


def _run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli_main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue()


@_timed(None)
def criterion_10():
    """Same seed, same bytes."""
    same = sum(_run_cli(a) == _run_cli(a) for a in SAMPLING_RUNS)
    return same == len(SAMPLING_RUNS), f"{same}/{len(SAMPLING_RUNS)} sampling commands byte-identical"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]

# criterion 8 asks for a PASS on the p-coupled Heisenberg law at level 2, where
# G/S_2 = G is nonabelian; see the decisions ledger
KNOWN_FAILURES = {8}


def report_line(i, ok, detail):
    return f"criterion {i}: {'PASS' if ok else 'FAIL'} - {detail}"


@pytest.mark.parametrize("i", range(1, 11))
def test_criterion(i, capsys):
    if i in KNOWN_FAILURES:
        pytest.xfail("criterion 8 asks for a PASS the Heisenberg quotient cannot give at level 2")
    ok, detail = CRITERIA[i - 1]()
    with capsys.disabled():
        print("\n" + report_line(i, ok, detail))
    assert ok, detail


def test_criterion_8_reported(capsys):
    """Criterion 8 runs in full; its line is printed and its known failure is pinned."""
    ok, detail = criterion_8()
    with capsys.disabled():
        print("\n" + report_line(8, ok, detail))
    assert not ok
    assert "L2/Q5 levels 1-3 ok" in detail and "L2/Q2 FAIL at level 2" in detail


if __name__ == "__main__":
    results = []
    for i, fn in enumerate(CRITERIA, start=1):
        ok, detail = fn()
        results.append(ok)
        print(report_line(i, ok, detail), flush=True)
    sys.exit(0 if all(results) else 1)
