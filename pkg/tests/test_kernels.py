import subprocess
import sys

import numpy as np
import pytest

from padlab import _kernels, make_context
from padlab.field import ResidueRing
from padlab.grouplaw import law_heisenberg, law_multiplicative
from padlab.lazard import FiniteQuotient

BACKENDS = _kernels.backends()


def _law_data(law, n):
    Q = FiniteQuotient(law, n, check_axioms=False)
    return Q, (Q._T, Q.mod) + Q._terms + (Q._maxdeg,)


@pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")
@pytest.mark.parametrize("builder,p,n", [
    (lambda K: law_multiplicative(K, K.p), 5, 3),
    (lambda K: law_heisenberg(K), 3, 3),
    (lambda K: law_multiplicative(K, 3), "ram", 2),
])
def test_backends_agree(builder, p, n):
    K = make_context(3, eis=[3, 0, 1], precision=8) if p == "ram" else make_context(p, precision=8)
    Q, (T, mod, tout, tex, tey, tc, maxdeg) = _law_data(builder(K), n)
    rng = np.random.default_rng(0)
    X = rng.integers(0, mod, (500, Q.d, Q.m)).astype(np.int64)
    Y = rng.integers(0, mod, (500, Q.d, Q.m)).astype(np.int64)
    a = BACKENDS["python"].law_mul_batch(X, Y, T, mod, tout, tex, tey, tc, maxdeg)
    b = BACKENDS["cython"].law_mul_batch(X, Y, T, mod, tout, tex, tey, tc, maxdeg)
    assert np.array_equal(a, b)
    x2, y2 = X[:, 0, :].copy(), Y[:, 0, :].copy()
    assert np.array_equal(BACKENDS["python"].ring_mul_batch(x2, y2, T, mod),
                          BACKENDS["cython"].ring_mul_batch(x2, y2, T, mod))


def test_kernel_matches_series_evaluation(Q5):
    law = law_multiplicative(Q5, 5)
    Q = FiniteQuotient(law, 3, check_axioms=False)
    R = ResidueRing(Q5, 3)
    for a, b in [(3, 7), (124, 99), (25, 50)]:
        want = R.to_element(law.eval_ring(R, (R.from_element(Q5.from_int(a)),),
                                          (R.from_element(Q5.from_int(b)),))[0])
        got = int(Q.mul(a, b))
        assert (want - Q5.from_int(got)).with_prec(3).is_zero()


def test_pure_fallback_selected_by_env():
    code = "import padlab._kernels as k; print(k.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={"PADLAB_PURE": "1", "PATH": ""}, check=True)
    assert out.stdout.strip() == "python"
