from fractions import Fraction

import pytest

from superboson.boson import SYS10, FockBasisState, FockVector, SpaceSpec, raw_point_basis
from superboson.vertex import (OffsetError, VOFactor, VOSpec, apply_mode, clear_caches, compose,
                               fermion_field, fermion_mode, lowest_exponent, species_field)


def _hw(alpha):
    return FockVector.basis(FockBasisState(SpaceSpec.F(alpha).highest_weight(), ()))


def _raw(weight, level=2):
    return [FockVector.basis(st) for st in raw_point_basis(SYS10, weight, level)]


@pytest.mark.parametrize("alpha,nonzero", [(-2, False), (-1, False), (0, False), (1, True), (2, True)])
def test_eta_zero_on_vacuum(alpha, nonzero):
    assert bool(fermion_mode("eta", 0, _hw(alpha), SYS10)) == nonzero


@pytest.mark.parametrize("r,s", [(0, 0), (1, -1), (-1, 1), (1, 0), (2, -1), (-2, 2)])
def test_fermion_anticommutators(r, s):
    for v in _raw((0, 1, 0, 1)) + _raw((1, 0, 1, -1)):
        ex = fermion_mode("eta", r, fermion_mode("xi", s, v, SYS10), SYS10) + \
            fermion_mode("xi", s, fermion_mode("eta", r, v, SYS10), SYS10)
        assert ex == (v if r + s == 0 else FockVector())
        ee = fermion_mode("eta", r, fermion_mode("eta", s, v, SYS10), SYS10) + \
            fermion_mode("eta", s, fermion_mode("eta", r, v, SYS10), SYS10)
        assert not ee


def test_xi_zero_squares_to_zero():
    for v in _raw((0, 0, 0, 2), 3):
        assert not fermion_mode("xi", 0, fermion_mode("xi", 0, v, SYS10), SYS10)


def test_fractional_charge_has_no_modes():
    with pytest.raises(OffsetError):
        fermion_mode("eta", 0, _hw(Fraction(1, 2)), SYS10)


def test_lowest_exponent_is_a_bound():
    spec = VOSpec((VOFactor(species_field(SYS10, 0, 0), 1),
                   VOFactor(species_field(SYS10, 3, Fraction(1, 2)), -1, Fraction(1))))
    for v in _raw((1, 0, 0, 2), 2):
        (st,) = v.terms
        low = lowest_exponent(spec, SYS10, st)
        for k in range(1, 4):
            assert not apply_mode(spec, -(low - k) - spec.delta, v, SYS10)
        assert any(apply_mode(spec, -(low + k) - spec.delta, v, SYS10) for k in range(6))


def test_bare_spec_needs_system():
    with pytest.raises(ValueError):
        apply_mode(fermion_field(SYS10, "eta"), 0, _hw(1))


def test_compose_order_and_caches():
    eta, xi = fermion_field(SYS10, "eta"), fermion_field(SYS10, "xi")
    v = _hw(1)
    a = compose([(xi, 0), (eta, 0)], v, SYS10)
    assert a == fermion_mode("xi", 0, fermion_mode("eta", 0, v, SYS10), SYS10)
    clear_caches()
    assert compose([(xi, 0), (eta, 0)], v, SYS10) == a


def test_unknown_fermion():
    with pytest.raises(ValueError):
        fermion_field(SYS10, "zeta")
