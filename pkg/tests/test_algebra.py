import pytest

from superboson.algebra import (ALL_RELATIONS, CHEVALLEY_RELATIONS, BosonBackend, CartanData,
                                Instance, ScalarOp, chevalley, check_instances,
                                relation_catalogue, serre4_triples, serre_pairs, verify_relation)
from superboson.boson import SpaceSpec, enumerate_space
from superboson.coeff import qpow


@pytest.fixture(scope="module")
def cd():
    return CartanData(1, 0)


@pytest.fixture(scope="module")
def small_vectors():
    return [v for b in enumerate_space(SpaceSpec.F(0), 1) for v in b.vectors()]


def test_cartan_matrix_10(cd):
    assert cd.matrix == ((0, -1, 1), (-1, 2, -1), (1, -1, 0))
    assert [cd.parity(i) for i in range(3)] == [1, 0, 1]
    assert [cd.vector_parity(l) for l in (1, 2, 3)] == [1, 1, 0]


def test_cartan_matrix_21():
    cd = CartanData(2, 1)
    A = cd.matrix
    assert all(A[i][j] == A[j][i] for i in range(5) for j in range(5))
    assert [i for i in range(5) if A[i][i] == 0] == [0, 3]


def test_equal_ranks_rejected():
    with pytest.raises(ValueError):
        CartanData(1, 1)


def test_catalogue_ids_and_filter(cd):
    insts, skipped = relation_catalogue(cd, ["1.14"], 1)
    assert all(i.id.startswith("1.14[") for i in insts)
    ms = {dict(i.params)["m"] for i in insts} | {dict(i.params)["n"] for i in insts}
    assert ms <= {-1, 0, 1}
    assert ("quintic-serre" in [s for s, _ in skipped])
    with pytest.raises(ValueError):
        relation_catalogue(cd, ["9.99"], 1)


def test_no_cubic_drinfeld_serre_for_10(cd):
    insts, skipped = relation_catalogue(cd, ["1.18"], 2)
    assert insts == []
    assert [s for s, _ in skipped if s == "1.18"]


def test_serre_data(cd):
    assert serre_pairs(cd)
    assert serre4_triples(cd)
    assert serre4_triples(CartanData(2, 1))


@pytest.mark.parametrize("rel", [r for r in ALL_RELATIONS if r != "1.7"])
def test_relations_small(cd, small_vectors, rel):
    insts, _ = relation_catalogue(cd, [rel], 1)
    recs = check_instances(insts, small_vectors, cd.system)
    assert [r.id for r in recs if r.status != "pass"] == []


def test_quartic_serre_fails_on_three_nodes(cd, small_vectors):
    # 2 alpha_l + alpha_k + alpha_m is a real root when k and m are adjacent
    insts, _ = relation_catalogue(cd, ["1.7"], 1)
    recs = check_instances(insts, small_vectors, cd.system)
    assert any(r.status == "fail" for r in recs)


def test_level_one(cd, small_vectors):
    bk = BosonBackend(cd)
    assert bk.gamma(1) == qpow(1)
    (inst,), _ = relation_catalogue(cd, ["level"], 0)
    assert inst.id == "level"
    assert check_instances([inst], small_vectors, cd.system)[0].status == "pass"


def test_broken_instance_is_reported(cd, small_vectors):
    t1 = chevalley(cd, "t", 1)
    bad = Instance("fake", (("i", 1),), t1, ScalarOp(1))
    (rec,) = check_instances([bad], small_vectors, cd.system)
    assert rec.status == "fail"
    assert rec.residual.startswith("on ")


def test_verify_relation_wrapper(cd, small_vectors):
    recs = verify_relation(cd, "1.2", small_vectors, 1)
    assert recs and all(r.status == "pass" for r in recs)
    assert set(CHEVALLEY_RELATIONS) < set(ALL_RELATIONS)


def test_k_operators_are_diagonal(cd, small_vectors):
    K = chevalley(cd, "t", 0)
    for v in small_vectors[:5]:
        w = K.apply(v)
        assert set(w.terms) == set(v.terms)
