"""Normal-ordered exponentials of free fields and their exact mode action.

A free field of the form

    f(z) = -sum_{n != 0} (sum_s u_s(n) x^s_n) q^{-sigma|n|} / [n] * z^{-n}
           + sum_s r_s Q_s + (sum_s l_s x^s_0) ln z

is a :class:`FieldSpec`; ``u_s(n) = c * q^(e|n|)``.  A :class:`VOSpec` is a
jointly normal-ordered product of ``exp(+-f(q^a z))`` factors times a scalar
prefactor, a power of z and a cocycle ``exp(i pi sum r_s x^s_0)``.  Modes are
read off with ``V(z) = sum_m V_m z^(-m-delta)``.

On a basis state the operator factorizes as

    pref * z^zpow * E_-(z) * e^{Q} * z^{l.x_0} q^{(a l).x_0} * E_+(z) * phase

with every zero-mode factor evaluated on the input state.  ``E_+`` acts by
finitely many contractions and ``E_-`` is expanded only at the level forced
by the requested power of z, so :func:`apply_mode` is exact with no
truncation parameter at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Sequence

from .boson import (FockBasisState, FockVector, OscSystem, _colored_monomials,
                    mono_mul, norm_rational)
from .coeff import Coeff, RatQ, RatQSum, qint, qpow

__all__ = [
    "FieldSpec",
    "VOFactor",
    "VOSpec",
    "VOSum",
    "FieldExpr",
    "OffsetError",
    "species_field",
    "qdiff_expand",
    "apply_mode",
    "compose",
    "lowest_exponent",
    "fermion_field",
    "fermion_mode",
]


class OffsetError(ValueError):
    """The requested mode does not exist on this state (non-integral offset)."""


# ---------------------------------------------------------------------------
# field descriptions


@dataclass(frozen=True)
class FieldSpec:
    """A free field; see the module docstring.

    ``terms`` holds ``(species, c, e)`` with ``u_s(n) = c q^(e|n|)``.
    """

    name: str
    terms: tuple
    sigma: Fraction = Fraction(0)
    momentum: tuple = ()
    log: tuple = ()

    def mode_coefficient(self, s: int, n: int) -> RatQ:
        """Coefficient of x^s_n z^(-n) in the field (n != 0)."""
        out = RatQ.const(0)
        a = abs(n)
        for s2, c, e in self.terms:
            if s2 == s:
                out = out + qpow((Fraction(e) - self.sigma) * a) * Fraction(-c)
        if out.is_zero():
            return out
        return out / qint(n)

    def with_sigma(self, sigma) -> "FieldSpec":
        return FieldSpec(self.name, self.terms, Fraction(sigma), self.momentum, self.log)


def species_field(system: OscSystem, s: int, sigma=0) -> FieldSpec:
    """The single-species field x^s(z; sigma)."""
    return FieldSpec(system.name(s), ((s, 1, Fraction(0)),), Fraction(sigma), ((s, 1),), ((s, 1),))


ZERO_FIELD = FieldSpec("0", ())


@dataclass(frozen=True)
class VOFactor:
    field: FieldSpec
    sign: int = 1
    shift: Fraction = Fraction(0)


@dataclass(frozen=True, eq=True)
class VOSpec:
    """Jointly normal-ordered product of exponentials.

    ``prefactor`` multiplies the whole product, ``zpow`` is an extra power
    of z, ``cocycle`` holds ``(species, r)`` for ``exp(i pi r x^s_0)`` and
    ``delta`` fixes the mode convention ``z^(-m-delta)``.
    """

    factors: tuple
    prefactor: Coeff | None = None
    zpow: Fraction = Fraction(0)
    cocycle: tuple = ()
    delta: int = 1

    def __post_init__(self):
        if self.prefactor is None:
            object.__setattr__(self, "prefactor", Coeff.scalar(1))
        object.__setattr__(self, "zpow", Fraction(self.zpow))
        object.__setattr__(self, "_h", hash((self.factors, self.prefactor, self.zpow,
                                             self.cocycle, self.delta)))

    def __hash__(self):
        return self._h

    def scaled(self, c) -> "VOSpec":
        return VOSpec(self.factors, self.prefactor * Coeff.scalar(c), self.zpow,
                      self.cocycle, self.delta)

    def with_delta(self, delta: int) -> "VOSpec":
        return VOSpec(self.factors, self.prefactor, self.zpow, self.cocycle, delta)

    def shifted_point(self, a) -> "VOSpec":
        """The same operator evaluated at q^a z (prefactor z-power included)."""
        a = Fraction(a)
        pref = self.prefactor * qpow(a * self.zpow)
        facs = tuple(VOFactor(f.field, f.sign, f.shift + a) for f in self.factors)
        return VOSpec(facs, pref, self.zpow, self.cocycle, self.delta)


def _data(spec: VOSpec, system: OscSystem):
    return _spec_data(spec, system)


@lru_cache(maxsize=4096)
def _spec_data(spec: VOSpec, system: OscSystem):
    n = system.n_species
    mom = [Fraction(0)] * n
    log = [Fraction(0)] * n
    qlog = [Fraction(0)] * n
    coc = [Fraction(0)] * n
    active = set()
    for f in spec.factors:
        for s, r in f.field.momentum:
            mom[s] += f.sign * Fraction(r)
        for s, l in f.field.log:
            log[s] += f.sign * Fraction(l)
            qlog[s] += f.sign * Fraction(l) * f.shift
        for s, _, _ in f.field.terms:
            active.add(s)
    for s, r in spec.cocycle:
        coc[s] += Fraction(r)
    metric = [system.metric(s) for s in range(n)]
    return {
        "mom": tuple(norm_rational(x) for x in mom),
        "log": tuple(log),
        "qlog": tuple(qlog),
        "coc": tuple(coc),
        "active": tuple(sorted(active)),
        "metric": tuple(metric),
    }


@lru_cache(maxsize=65536)
def _kappa(spec: VOSpec, s: int, n: int) -> RatQ:
    """Total coefficient of x^s_n z^(-n) in the exponent of ``spec``."""
    out = RatQ.const(0)
    for f in spec.factors:
        c = f.field.mode_coefficient(s, n)
        if c.is_zero():
            continue
        term = c * qpow(-f.shift * n)
        out = out + (term if f.sign > 0 else -term)
    return out


@lru_cache(maxsize=8192)
def _creation(spec: VOSpec, system: OscSystem, L: int) -> tuple:
    """Coefficient of z^L in E_-(z): tuple of (monomial, RatQ)."""
    if L == 0:
        return (((), RatQ.const(1)),)
    active = _data(spec, system)["active"]
    if not active:
        return ()
    out = []
    for mono in _colored_monomials(L, len(active)):
        c = RatQ.const(1)
        real = []
        for col, k, p in mono:
            s = active[col]
            kap = _kappa(spec, s, -k)
            if kap.is_zero():
                c = None
                break
            c = c * kap ** p * Fraction(1, factorial(p))
            real.append((s, k, p))
        if c is not None:
            out.append((tuple(sorted(real)), c))
    return tuple(out)


def _annihilation_options(spec: VOSpec, system: OscSystem, state: FockBasisState):
    """List of (remaining monomial, removed level, RatQ factor)."""
    opts = [((), 0, RatQ.const(1))]
    for s, k, p in state.monomial:
        kap = _kappa(spec, s, k)
        if kap.is_zero():
            opts = [(mono_mul(m, ((s, k, p),)), lev, c) for m, lev, c in opts]
            continue
        unit = kap * (qint(k) * qint(k) * Fraction(system.metric(s), k))
        new = []
        for j in range(p + 1):
            f = unit ** j * comb(p, j)
            rest = ((s, k, p - j),) if p - j else ()
            for m, lev, c in opts:
                new.append((mono_mul(m, rest), lev + j * k, c * f))
        opts = new
    return opts


def _zero_mode_data(spec: VOSpec, system: OscSystem, state: FockBasisState):
    d = _data(spec, system)
    metric = d["metric"]
    eig = [metric[s] * state.weight[s] for s in range(system.n_species)]
    zexp = spec.zpow + sum((l * e for l, e in zip(d["log"], eig)), Fraction(0))
    qexp = sum((l * e for l, e in zip(d["qlog"], eig)), Fraction(0))
    ph = sum((r * e for r, e in zip(d["coc"], eig)), Fraction(0))
    new_weight = tuple(w + m if m else w for w, m in zip(state.weight, d["mom"]))
    scalar = spec.prefactor * Coeff.phase(ph) * qpow(qexp)
    return zexp, scalar, new_weight


def lowest_exponent(spec: VOSpec, system: OscSystem, state: FockBasisState) -> Fraction:
    """A lower bound for the z-exponents of ``spec`` acting on ``state``."""
    zexp, _, _ = _zero_mode_data(spec, system, state)
    removable = 0
    for s, k, p in state.monomial:
        if not _kappa(spec, s, k).is_zero():
            removable += k * p
    return zexp - removable


@lru_cache(maxsize=1 << 17)
def _apply_state(spec: VOSpec, system: OscSystem, T: Fraction, state: FockBasisState) -> FockVector:
    zexp, scalar, new_weight = _zero_mode_data(spec, system, state)
    out = FockVector()
    if not scalar:
        return out
    for rest, removed, c in _annihilation_options(spec, system, state):
        L = T - zexp + removed
        if not isinstance(L, int) and L.denominator != 1:
            raise OffsetError("mode at z^{} incompatible with exponent offset {} on {}".format(
                T, zexp, state.render(system)))
        L = int(L)
        if L < 0:
            continue
        sc = scalar * c
        for mono, cc in _creation(spec, system, L):
            st = FockBasisState(new_weight, mono_mul(rest, mono))
            out.add_term(st, sc * cc)
    return out


@lru_cache(maxsize=1 << 16)
def _weight_data(spec: VOSpec, system: OscSystem, weight: tuple):
    return _zero_mode_data(spec, system, FockBasisState(weight, ()))


@lru_cache(maxsize=1 << 17)
def _annihilation_by_monomial(spec: VOSpec, system: OscSystem, monomial: tuple) -> tuple:
    return tuple(_annihilation_options(spec, system, FockBasisState((), monomial)))


@lru_cache(maxsize=1 << 15)
def _creation_states(spec: VOSpec, system: OscSystem, w: tuple, rest: tuple, L: int) -> tuple:
    return tuple((FockBasisState(w, mono_mul(rest, mono) if rest else mono), cc)
                 for mono, cc in _creation(spec, system, L))


def apply_spec(spec: VOSpec, system: OscSystem, T, v: FockVector, scale=None,
               out: FockVector | None = None) -> FockVector:
    """Coefficient of z^T of ``spec`` applied to ``v`` (times ``scale``).

    Annihilation results from all input states are grouped by (weight,
    remaining monomial, creation level) before the creation part is
    multiplied in, so each creation table is used once per group.
    Phase-free coefficients are handled as bare RatQ values.
    """
    T = norm_rational(T)
    if out is None:
        out = FockVector()
    plain: dict = {}   # key -> RatQ
    phased: dict = {}  # key -> Coeff
    for st, c in v.terms.items():
        zexp, scalar, new_weight = _weight_data(spec, system, st.weight)
        if not scalar:
            continue
        base = c * scalar if scale is None else c * scalar * scale
        offset = T - zexp
        if type(offset) is not int:
            if offset.denominator != 1:
                raise OffsetError("mode at z^{} incompatible with exponent offset {} on {}".format(
                    T, zexp, st.render(system)))
            offset = int(offset)
        bt = base.terms
        r = bt.get(0) if len(bt) == 1 else None
        for rest, removed, a in _annihilation_by_monomial(spec, system, st.monomial):
            L = offset + removed
            if L < 0:
                continue
            key = (new_weight, rest, L)
            if r is not None:
                val = r * a
                old = plain.get(key)
                plain[key] = val if old is None else old + val
            else:
                val = base * a
                old = phased.get(key)
                phased[key] = val if old is None else old + val
    sums: dict = {}
    for (w, rest, L), rq in plain.items():
        if not rq:
            continue
        for st, cc in _creation_states(spec, system, w, rest, L):
            acc = sums.get(st)
            if acc is None:
                acc = sums[st] = RatQSum()
            acc.add_product(rq, cc)
    terms = out.terms
    for st, acc in sums.items():
        old = terms.get(st)
        if old is not None:
            ot = old.terms
            x = ot.get(0) if len(ot) == 1 else None
            if x is None:
                out.add_term(st, Coeff({0: acc.value()}))
                continue
            acc.add(x)
        x = acc.value()
        if x.num:
            terms[st] = Coeff({0: x})
        elif old is not None:
            del terms[st]
    for (w, rest, L), coef in phased.items():
        if not coef:
            continue
        for mono, cc in _creation(spec, system, L):
            out.add_term(FockBasisState(w, mono_mul(rest, mono) if rest else mono), coef * cc)
    return out


# ---------------------------------------------------------------------------
# field expressions


class FieldExpr:
    """A z-dependent operator; subclasses implement the three methods."""

    parity: int = 0

    def coefficient(self, T, v: FockVector) -> FockVector:
        raise NotImplementedError

    def lowest(self, v: FockVector) -> Fraction | None:
        """Lower bound of z-exponents on ``v`` (None for the zero vector)."""
        raise NotImplementedError

    def mode(self, m, v: FockVector) -> FockVector:
        return self.coefficient(-Fraction(m) - self.delta, v)

    delta: int = 1


class VOSum(FieldExpr):
    """Finite sum of (Coeff, VOSpec) sharing one mode convention."""

    def __init__(self, system: OscSystem, terms: Sequence, parity: int = 0,
                 delta: int | None = None, name: str = ""):
        self.system = system
        self.terms = tuple((Coeff.scalar(c), s) for c, s in terms)
        self.parity = parity
        deltas = {s.delta for _, s in self.terms}
        if delta is None:
            delta = deltas.pop() if len(deltas) == 1 else 1
        self.delta = delta
        self.name = name

    def coefficient(self, T, v: FockVector) -> FockVector:
        out = FockVector()
        for c, spec in self.terms:
            apply_spec(spec, self.system, T, v, c, out)
        return out

    def lowest(self, v: FockVector):
        vals = [lowest_exponent(spec, self.system, st)
                for _, spec in self.terms for st in v.terms]
        return min(vals) if vals else None

    def __add__(self, other: "VOSum") -> "VOSum":
        return VOSum(self.system, self.terms + other.terms, self.parity, self.delta, self.name)

    def scaled(self, c) -> "VOSum":
        c = Coeff.scalar(c)
        return VOSum(self.system, [(c * x, s) for x, s in self.terms], self.parity,
                     self.delta, self.name)

    def shifted_point(self, a) -> "VOSum":
        return VOSum(self.system, [(x, s.shifted_point(a)) for x, s in self.terms],
                     self.parity, self.delta, self.name)

    def __repr__(self):
        return "VOSum({}, {} terms)".format(self.name, len(self.terms))


class Scaled(FieldExpr):
    def __init__(self, inner: FieldExpr, c):
        self.inner = inner
        self.c = Coeff.scalar(c)
        self.parity = inner.parity
        self.delta = inner.delta

    def coefficient(self, T, v):
        return self.inner.coefficient(T, v).scale(self.c)

    def lowest(self, v):
        return self.inner.lowest(v)


class SumField(FieldExpr):
    def __init__(self, parts: Sequence[FieldExpr]):
        self.parts = tuple(parts)
        self.parity = parts[0].parity if parts else 0
        self.delta = parts[0].delta if parts else 1

    def coefficient(self, T, v):
        out = FockVector()
        for p in self.parts:
            out.add_scaled(p.coefficient(T, v), Coeff.scalar(1))
        return out

    def lowest(self, v):
        vals = [x for x in (p.lowest(v) for p in self.parts) if x is not None]
        return min(vals) if vals else None


class BracketField(FieldExpr):
    """``[F(z), g]_xi = F(z) g - (-1)^{|F||g|} xi g F(z)`` for an operator g.

    ``g`` needs ``apply(v)`` and ``parity``.
    """

    def __init__(self, field: FieldExpr, op, xi):
        self.field = field
        self.op = op
        self.xi = Coeff.scalar(xi)
        self.parity = (field.parity + op.parity) % 2
        self.delta = field.delta
        self.sign = -1 if (field.parity and op.parity) else 1

    def coefficient(self, T, v):
        out = self.field.coefficient(T, self.op.apply(v))
        out.add_scaled(self.op.apply(self.field.coefficient(T, v)), self.xi * (-self.sign))
        return out

    def lowest(self, v):
        a = self.field.lowest(self.op.apply(v))
        b = self.field.lowest(v)
        vals = [x for x in (a, b) if x is not None]
        return min(vals) if vals else None


# ---------------------------------------------------------------------------
# public helpers


def qdiff_expand(system: OscSystem, field: FieldSpec, sign: int = 1, shift=0,
                 base: Sequence[VOFactor] = (), **kw) -> list:
    """Expand ``:(base) [1d_z exp(sign*field(q^shift z))]:`` into two VOSpecs.

    Returns ``[(Coeff, VOSpec), (Coeff, VOSpec)]`` with point shifts
    ``shift +- 1`` and prefactors ``+-1/((q - q^-1) z)``.
    """
    shift = Fraction(shift)
    inv = Coeff.scalar(RatQ.const(1) / (qpow(1) - qpow(-1)))
    zpow = Fraction(kw.pop("zpow", 0)) - 1
    out = []
    for eps in (1, -1):
        facs = tuple(base) + (VOFactor(field, sign, shift + eps),)
        out.append((inv * eps, VOSpec(facs, zpow=zpow, **kw)))
    return out


def apply_mode(op, m, v: FockVector, system: OscSystem | None = None) -> FockVector:
    """The mode ``op_m`` applied to ``v`` (``op`` a VOSpec or FieldExpr)."""
    if isinstance(op, VOSpec):
        if system is None:
            raise ValueError("a bare VOSpec needs the oscillator system")
        return apply_spec(op, system, -Fraction(m) - op.delta, v)
    return op.mode(m, v)


def compose(ops: Sequence, v: FockVector, system: OscSystem | None = None) -> FockVector:
    """Apply ``[(op, m), ...]`` right to left."""
    for op, m in reversed(list(ops)):
        v = apply_mode(op, m, v, system)
    return v


@lru_cache(maxsize=None)
def fermion_field(system: OscSystem, which: str) -> VOSpec:
    """eta(z) = :exp(c(z;0)): (modes z^(-n-1)) or xi(z) = :exp(-c(z)): (modes z^(-n))."""
    c = species_field(system, system.c(1), 0)
    if which == "eta":
        return VOSpec((VOFactor(c, 1),), delta=1)
    if which == "xi":
        return VOSpec((VOFactor(c, -1),), delta=0)
    raise ValueError("fermion must be 'eta' or 'xi', got {!r}".format(which))


def fermion_mode(which: str, r, v: FockVector, system: OscSystem) -> FockVector:
    """eta_r v or xi_r v; a non-integral c-weight raises :class:`OffsetError`."""
    return apply_mode(fermion_field(system, which), r, v, system)


def clear_caches() -> None:
    _apply_state.cache_clear()
    _weight_data.cache_clear()
    _annihilation_by_monomial.cache_clear()
    _creation.cache_clear()
    _creation_states.cache_clear()
    _kappa.cache_clear()
    _spec_data.cache_clear()
