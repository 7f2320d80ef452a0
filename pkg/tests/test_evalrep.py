from collections import Counter

import pytest

from superboson.algebra import CHEVALLEY_RELATIONS, CartanData
from superboson.evalrep import (EvalMatrix, antipode_word, eval_chevalley, eval_vector, pairing,
                                pairing_check, tensor_basis, verify_eval_relations)

DRINFELD = ["1.10", "1.11", "1.12", "1.13", "1.14", "1.15", "1.16"]


def _failures(recs):
    return Counter(r.id.split("[")[0] for r in recs if r.status == "fail")


@pytest.mark.parametrize("dual", [False, True])
def test_all_relations_21(dual):
    cd = CartanData(2, 1)
    recs = verify_eval_relations(cd, list(CHEVALLEY_RELATIONS) + DRINFELD, 2, dual=dual)
    assert len(recs) > 1000
    assert _failures(recs) == Counter()


def test_tensor_product_21():
    cd = CartanData(2, 1)
    recs = verify_eval_relations(cd, list(CHEVALLEY_RELATIONS), 1, coproduct_duals=(False, True))
    assert _failures(recs) == Counter()


@pytest.mark.parametrize("dual", [False, True])
def test_only_quartic_serre_fails_10(dual):
    cd = CartanData(1, 0)
    recs = verify_eval_relations(cd, list(CHEVALLEY_RELATIONS) + DRINFELD, 2, dual=dual)
    assert set(_failures(recs)) == {"1.7"}


def test_level_zero():
    cd = CartanData(1, 0)
    recs = verify_eval_relations(cd, ["level"], 0)
    assert [r.status for r in recs if r.id == "level"] == ["pass"]


@pytest.mark.parametrize("MN", [(1, 0), (2, 1), (1, 2)])
def test_pairing_and_antipode(MN):
    cd = CartanData(*MN)
    for g in ("e", "f", "t"):
        for i in range(cd.size):
            assert pairing_check(cd, (g, i))
    assert pairing_check(cd, (("e", 1), ("f", 1)))
    assert pairing_check(cd, (("e", cd.M + 1), ("f", 0)))


def test_antipode_of_t_tinv():
    cd = CartanData(1, 0)
    assert antipode_word(cd, [("t", 1), ("tinv", 1)]) == EvalMatrix.identity(cd.size)


def test_odd_generators_square_to_zero():
    cd = CartanData(1, 0)
    for i in (0, cd.M + 1):
        for g in "ef":
            m = eval_chevalley(cd, g, i)
            assert (m @ m).is_zero()


def test_pairing_needs_opposite_z_powers():
    a = eval_vector(1, zpowers=[2])
    assert pairing(a, eval_vector(1, zpowers=[-2])).ratq() == 1
    assert pairing(a, eval_vector(1, zpowers=[2])).is_zero()
    assert pairing(a, eval_vector(2, zpowers=[-2])).is_zero()


def test_tensor_basis_size():
    assert len(tensor_basis(CartanData(2, 1), 2)) == 25
