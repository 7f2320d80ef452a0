"""Exact symbolic engine for the level-one free-boson realization of
U_q(sl-hat(M+1|N+1)).

Modules: :mod:`coeff` (exact scalars), :mod:`boson` (oscillators and Fock
modules), :mod:`vertex` (normal-ordered exponentials), :mod:`algebra`
(currents, Chevalley generators, relation checks), :mod:`evalrep`
(evaluation modules), :mod:`intertwiner` (vertex operators),
:mod:`characters` (q-series) and :mod:`cli`.
"""

__version__ = "0.1.0"

from .coeff import Coeff, RatQ, qint, qpow
from .boson import FockBasisState, FockVector, OscSystem, SpaceSpec, enumerate_space
from .algebra import CartanData, CheckRecord, chevalley, relation_catalogue, verify_relation
from .characters import brute_character, compare, formula_character, projected_character

__all__ = [
    "__version__",
    "Coeff",
    "RatQ",
    "qint",
    "qpow",
    "FockBasisState",
    "FockVector",
    "OscSystem",
    "SpaceSpec",
    "enumerate_space",
    "CartanData",
    "CheckRecord",
    "chevalley",
    "relation_catalogue",
    "verify_relation",
    "brute_character",
    "compare",
    "formula_character",
    "projected_character",
]
