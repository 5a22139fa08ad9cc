import json

import pytest

from padlab.errors import AssociativityFailed, LawFormatError, RescalePreconditionFailed
from padlab.grouplaw import (
    FAIL, INCONCLUSIVE, PASS, GroupLawSeries, check_A_n, check_B_n, check_C_n, check_D, check_E,
    check_conditions, law_additive, law_heisenberg, law_multiplicative, load_group_law,
    rescale_law, summarize,
)


@pytest.fixture(scope="module")
def L1(Q5):
    return law_multiplicative(Q5, 1)


@pytest.fixture(scope="module")
def L2(Q5):
    return law_multiplicative(Q5, 5)


def test_series_of_L2(L2):
    # inverse of x under x + y + 5xy is -x/(1+5x) = -x + 5x^2 - 25x^3 + ...
    inv = L2.series_json(L2.inverse_series)
    assert [t["c"] for t in inv[:3]] == ["[4,4,4,4,4,4,4,4]", "[1]e1~8", "[4,4,4,4,4,4]e2~8"]
    assert L2.domain == "O^d"


def test_L1_fails_C2_with_witness(L1):
    v = check_C_n(L1, 2)
    assert v.status == FAIL
    assert v.witness["i"] == [1] and v.witness["j"] == [1] and v.witness["c"] == ["[1]"]
    assert L1.domain == "m^d"


def test_L2_conditions(L2):
    verdicts = check_conditions(L2, "A,C", n_max=6, seed=1)
    assert {v.status for v in verdicts} == {PASS}
    assert check_B_n(L2, 1, seed=1).status == PASS
    b2 = check_B_n(L2, 2, seed=1)
    assert b2.status == FAIL and b2.witness is not None
    assert check_B_n(L2, 2, k=1, seed=1).status == PASS
    assert check_D(L2, seed=1).status == PASS
    e = check_E(L2, seed=1)
    assert e.status == PASS and e.details["min_residual_valuation"] >= L2.ctx.N - 2


def test_D_fails_over_Q2(Q2):
    v = check_D(law_multiplicative(Q2, 2), seed=0)
    assert v.status == FAIL
    assert v.witness["x"] == ["[1]"] and v.witness["f(x)"] == ["[1]e2~8"]
    assert v.witness["v(f(x)-f(y))"] == 2 != v.witness["v(x-y)+v(p)"]


def test_heisenberg(Q3):
    H = law_heisenberg(Q3)
    statuses = {v.condition: v.status for v in check_conditions(H, "A,C,D,E", n_max=3, seed=2)}
    assert set(statuses.values()) == {PASS}
    assert check_B_n(H, 1, seed=2).status == PASS
    assert check_B_n(H, 2, seed=2).status == FAIL
    assert check_B_n(law_heisenberg(Q3, k=2), 2, seed=2).status == PASS


def test_non_associative_law_rejected(Q3):
    z, p = Q3.zero(), Q3.from_int(3)
    with pytest.raises(AssociativityFailed):
        GroupLawSeries(Q3, 2, 6, {((1, 0), (0, 1)): (z, p)})


def test_rescale(L1, Q5):
    R = rescale_law(L1, 1, 1)
    assert R.rescale_info["rho"] == "[1]e1"
    assert R.to_document() == law_multiplicative(Q5, 5).to_document()
    R = rescale_law(L1, 5, 5)
    assert R.to_document()["terms"][-1]["c"] == [["0", "0", "1"]]
    with pytest.raises(RescalePreconditionFailed):
        rescale_law(L1, 1, 5)


def test_document_round_trip(L2, Q3):
    assert load_group_law(L2.to_json_text()).to_document() == L2.to_document()
    H = law_heisenberg(Q3)
    assert load_group_law(json.dumps(H.to_document())).to_document() == H.to_document()
    with pytest.raises(LawFormatError):
        load_group_law("{")
    bad = L2.to_document()
    bad["terms"][0]["c"] = [["9"]]
    with pytest.raises(LawFormatError):
        load_group_law(bad)


def test_additive_and_summary(Q5):
    La = law_additive(Q5, 2)
    vs = check_conditions(La, "ABCDE", n_max=3, seed=0)
    assert summarize(vs) == PASS
    assert summarize([vs[0], type(vs[0])("X", INCONCLUSIVE, "O^d")]) == INCONCLUSIVE


def test_B2_witness_recomputes(L2, Q5):
    w = check_B_n(L2, 2, seed=1).witness
    x, y = (Q5.element(w[k][0]).lift() for k in ("x", "y"))
    prod = L2.eval_elements([x], [y])[0]
    assert (prod - x - y).with_prec(2).val < 2


def test_A_levels(L2):
    assert all(check_A_n(L2, n, seed=3).status == PASS for n in range(1, 7))
