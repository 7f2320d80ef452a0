from fractions import Fraction

import pytest

from superboson.algebra import CartanData
from superboson.boson import OscMode, OscSystem, SpaceSpec, comm
from superboson.coeff import Coeff, qint
from superboson.intertwiner import (CONVENTIONS, KINDS, DualCartanTables, helper_exchange,
                                    helper_serre, hstar_combination, intertwining_suite,
                                    repair_cocycle, vo_target)


def _finite_cartan(M, N):
    A = CartanData(M, N).matrix
    r = M + N + 1
    return [[A[i][j] for j in range(1, r + 1)] for i in range(1, r + 1)]


@pytest.mark.parametrize("MN", [(1, 0), (2, 0), (0, 1), (2, 1), (3, 1), (1, 2), (1, 3)])
def test_dual_tables_invert_cartan(MN):
    A = _finite_cartan(*MN)
    inv = DualCartanTables(*MN).inverse_matrix()
    r = len(A)
    for i in range(r):
        for j in range(r):
            s = sum(inv[i][k] * A[k][j] for k in range(r))
            assert s == (1 if i == j else 0)


def test_dual_tables_10():
    assert DualCartanTables(1, 0).inverse_matrix() == ((0, -1), (-1, -2))
    with pytest.raises(ValueError):
        DualCartanTables(2, 2)


def _pair(system, A, B, m):
    total = Coeff.scalar(0)
    for s, x in A:
        for t, y in B:
            if s == t:
                total = total + comm(system, OscMode(s, m), OscMode(t, -m)) * Coeff.scalar(x * y)
    return total


@pytest.mark.parametrize("MN", [(1, 0), (2, 1), (1, 2)])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_hstar_is_dual_to_h(MN, m):
    system = OscSystem(*MN)
    r = system.rank
    for i in range(1, r + 1):
        hs = hstar_combination(system, i, m)
        for j in range(1, r + 1):
            val = _pair(system, hs, system.cartan_combination(j, -m), m)
            want = qint(m) * qint(m) * Fraction(1, m) if i == j else 0
            assert val == Coeff.scalar(want)


def test_repair_cocycle_shape():
    system = OscSystem(1, 0)
    assert repair_cocycle(system) == ((system.a(2), Fraction(1)),)


def test_targets():
    tg = vo_target(SpaceSpec.F(1), "phi")
    assert tg
    assert vo_target(SpaceSpec.F(2), "phi") != vo_target(SpaceSpec.F(5), "phi")


@pytest.mark.parametrize("kind", KINDS)
def test_printed_convention_fails(kind):
    recs = intertwining_suite(kind, SpaceSpec.F(1), 1, convention="printed")
    fails = {r.id.split(" ")[0].split(":")[1] for r in recs if r.status == "fail"}
    assert fails == {"e0", "e1", "e2", "f0", "f1", "f2"}


@pytest.mark.parametrize("kind", KINDS)
def test_repaired_convention_passes(kind):
    recs = intertwining_suite(kind, SpaceSpec.F(1), 1, convention="repaired")
    assert [r.id for r in recs if r.status != "pass"] == []
    assert all(r.id.endswith("[repaired]") for r in recs)


def test_unknown_convention():
    with pytest.raises(ValueError):
        intertwining_suite("phi", SpaceSpec.F(1), 0, convention="other")
    assert CONVENTIONS == ("printed", "repaired")


def test_helper_exchange():
    sp = SpaceSpec.F(1)
    assert helper_exchange(sp, 1, 1, convention="printed").status == "fail"
    assert helper_exchange(sp, 1, 1, convention="repaired").status == "pass"


def test_helper_serre_repaired():
    got = {r.id.replace(" [repaired]", ""): r.status for r in helper_serre(SpaceSpec.F(1), 1, convention="repaired")}
    assert got == {
        "helper [[psi1,e1]_q,e1]_q^-1": "pass",
        "helper [psi1,e0]": "fail",
        "helper [psi1,e2]": "pass",
        "helper [psi1,e0]_q^-1": "pass",
    }
