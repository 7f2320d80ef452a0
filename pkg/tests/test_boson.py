from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from superboson.boson import (SYS10, Coeff, EnumerationError, FockBasisState, FockVector, Momentum,
                              OscMode, OscSystem, SpaceSpec, UnsupportedRank, ZeroMode, apply_osc,
                              colored_partition_count, comm, d_eigenvalue, enumerate_space,
                              lattice_bound, rank, raw_point_basis, weight_eigenvalues)
from superboson.coeff import qint


def test_species_layout():
    s = OscSystem(2, 1)
    assert s.n_species == 7
    assert [s.name(k) for k in s.species()] == ["a1", "a2", "a3", "b1", "b2", "c1", "c2"]
    assert [s.metric(k) for k in s.species()] == [1, 1, 1, -1, -1, 1, 1]
    with pytest.raises(IndexError):
        s.b(3)


def test_comm_values():
    s = SYS10
    assert comm(s, OscMode(0, 2), OscMode(0, -2)) == Coeff.scalar(qint(2) * qint(2) / 2)
    assert comm(s, OscMode(2, 1), OscMode(2, -1)) == Coeff.scalar(-1)
    assert comm(s, OscMode(0, 1), OscMode(1, -1)).is_zero()
    assert comm(s, ZeroMode(2), Momentum(2)) == Coeff.scalar(-1)
    assert comm(s, Momentum(0), ZeroMode(0)) == Coeff.scalar(-1)


states = st.builds(
    lambda w, mono: FockBasisState(w, mono),
    st.tuples(*[st.integers(-2, 2)] * 4),
    st.sampled_from([(), ((0, 1, 1),), ((0, 1, 2), (3, 2, 1)), ((2, 1, 1), (2, 3, 1))]),
)


@settings(max_examples=50, deadline=None)
@given(states, st.integers(0, 3), st.integers(1, 3))
def test_oscillator_commutator_on_states(state, s, m):
    v = FockVector.basis(state)
    up, down = OscMode(s, -m), OscMode(s, m)
    lhs = apply_osc(SYS10, down, apply_osc(SYS10, up, v)) - \
        apply_osc(SYS10, up, apply_osc(SYS10, down, v))
    assert lhs == v.scale(comm(SYS10, down, up))


@settings(max_examples=30, deadline=None)
@given(states, st.integers(0, 3))
def test_zero_mode_momentum(state, s):
    # [x_0, e^Q] = g e^Q: the momentum operator shifts the weight
    v = FockVector.basis(state)
    lhs = apply_osc(SYS10, ZeroMode(s), apply_osc(SYS10, Momentum(s), v)) - \
        apply_osc(SYS10, Momentum(s), apply_osc(SYS10, ZeroMode(s), v))
    assert lhs == apply_osc(SYS10, Momentum(s), v).scale(comm(SYS10, ZeroMode(s), Momentum(s)))


def test_vector_arithmetic():
    a = FockVector.basis(FockBasisState((0, 0, 0, 0)), 2)
    b = FockVector.basis(FockBasisState((0, 0, 0, 0), ((0, 1, 1),)))
    assert (a + b) - b == a
    assert not (a - a)
    assert len(a + b) == 2
    assert -(-a) == a


def test_weight_eigenvalues_use_b_metric():
    # |1,0,0,0> is the Lambda_1 vacuum at beta = 0
    assert weight_eigenvalues(SYS10, FockBasisState((1, 0, 0, 0))) == (1, 0)
    assert weight_eigenvalues(SYS10, FockBasisState((1, 1, 1, 0))) == (0, 0)
    with pytest.raises(UnsupportedRank):
        weight_eigenvalues(OscSystem(2, 1), FockBasisState((0,) * 7))


def test_d_counts_level():
    st0 = FockBasisState((0, 0, 0, 0))
    st1 = st0.with_monomial(((0, 2, 1), (3, 1, 1)))
    assert d_eigenvalue(SYS10, st0) - d_eigenvalue(SYS10, st1) == 3


def test_colored_partitions():
    assert [colored_partition_count(n, 1) for n in range(6)] == [1, 1, 2, 3, 5, 7]
    assert [colored_partition_count(n, 3) for n in range(4)] == [1, 3, 9, 22]


def test_lattice_roundtrip():
    for sp in (SpaceSpec.F(0), SpaceSpec.F(Fraction(1, 2), 1), SpaceSpec("10"), SpaceSpec("01", 0, -1)):
        for i in range(-2, 3):
            for j in range(-2, 3):
                assert sp.lattice_point(sp.weight(i, j)) == (i, j)
    with pytest.raises(ValueError):
        SpaceSpec.F(0).lattice_point((Fraction(1, 3), 0, 0, 0))


def test_enumeration_is_graded_and_complete():
    sp = SpaceSpec.F(Fraction(1, 2))
    blocks = enumerate_space(sp, 2)
    assert blocks[0].qdegree == 0
    assert [b.qdegree for b in blocks] == sorted(b.qdegree for b in blocks)
    ground = [b for b in blocks if b.qdegree == 0]
    assert len(ground) == 4
    R, _ = lattice_bound(sp, 2)
    pts = {b.point for b in blocks}
    for i in range(-R - 3, R + 4):
        for j in range(-R - 3, R + 4):
            inside = sp.minus_d(i, j) - sp.minus_d(*blocks[0].point) <= 2
            assert inside == ((i, j) in pts)


def test_enumerated_vectors_are_independent():
    blocks = enumerate_space(SpaceSpec.F(0), 2)
    for b in blocks:
        vecs = b.vectors()
        assert rank(vecs) == len(vecs)


def test_raw_basis_size():
    assert len(raw_point_basis(SYS10, (0, 0, 0, 0), 2)) == 1 + 4 + 14


def test_negative_degree_rejected():
    with pytest.raises(ValueError):
        enumerate_space(SpaceSpec.F(0), -1)
    assert issubclass(EnumerationError, RuntimeError)
