"""Cartan data, bosonized Drinfeld currents, Chevalley generators and the
relation verifier.

Operators acting on Fock vectors are small trees (:class:`Op`).  Leaves are
current modes, Cartan oscillator combinations and diagonal K factors; nodes
are products, linear combinations and graded q-brackets

    [X, Y]_xi = X Y - (-1)^{|X||Y|} xi Y X.

The level is fixed to one, so the central element gamma acts as q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Callable, Iterable, Sequence

from .boson import (FockBasisState, FockVector, OscSystem, apply_combination,
                    _colored_monomials)
from .coeff import Coeff, RatQ, qint, qpow
from .vertex import (BracketField, FieldExpr, FieldSpec, VOFactor, VOSpec, VOSum,
                     qdiff_expand, species_field)

__all__ = [
    "CartanData",
    "Op",
    "ModeOp",
    "CartanOp",
    "KOp",
    "ScalarOp",
    "Product",
    "LinComb",
    "QBracket",
    "h_field",
    "drinfeld",
    "cartan_mode",
    "psi_mode",
    "chevalley",
    "Instance",
    "Backend",
    "BosonBackend",
    "relation_catalogue",
    "verify_relation",
    "check_instances",
]

Q = qpow(1)
QINV = qpow(-1)
QMINUS = Q - QINV


# ---------------------------------------------------------------------------
# Cartan data


@dataclass(frozen=True)
class CartanData:
    M: int
    N: int

    def __post_init__(self):
        if self.M == self.N:
            raise ValueError("M != N is required")
        if self.M < 0 or self.N < 0:
            raise ValueError("M and N must be non-negative")

    @property
    def size(self) -> int:
        """Number of nodes 0..M+N+1."""
        return self.M + self.N + 2

    @property
    def system(self) -> OscSystem:
        return OscSystem(self.M, self.N)

    def nu(self, i: int) -> int:
        """nu_i for i = 1..M+N+2."""
        if not 1 <= i <= self.M + self.N + 2:
            raise IndexError(i)
        return 1 if i <= self.M + 1 else -1

    def mu(self, i: int) -> int:
        return sum(self.nu(k) for k in range(1, i + 1))

    def _root(self, i: int) -> dict:
        L = self.M + self.N + 2
        if i == 0:
            return {1: -self.nu(1), L: self.nu(L)}
        return {i: self.nu(i), i + 1: -self.nu(i + 1)}

    @property
    def matrix(self) -> tuple:
        n = self.size
        roots = [self._root(i) for i in range(n)]
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                row.append(sum(c * roots[j].get(k, 0) * self.nu(k) for k, c in roots[i].items()))
            rows.append(tuple(row))
        return tuple(rows)

    def a(self, i: int, j: int) -> int:
        return self.matrix[i][j]

    def parity(self, i: int) -> int:
        """Parity of e_i, f_i (and X^{+-,i} for i >= 1)."""
        return 1 if i in (0, self.M + 1) else 0

    def vector_parity(self, l: int) -> int:
        return (self.nu(l) + 1) // 2


# ---------------------------------------------------------------------------
# operators


class Op:
    parity: int = 0
    label: str = "?"
    key = None  # hashable identity for leaves; None for composite nodes

    def apply(self, v: FockVector) -> FockVector:
        raise NotImplementedError

    def __call__(self, v):
        return self.apply(v)

    def __mul__(self, other: "Op") -> "Op":
        return Product((self, other))

    def __repr__(self):
        return self.label


class ModeOp(Op):
    """The mode X_m of a field expression."""

    def __init__(self, field: FieldExpr, m, label: str = ""):
        self.field = field
        self.m = Fraction(m)
        self.parity = field.parity
        self.label = label or "{}_{}".format(getattr(field, "name", "F"), m)
        self.key = ("mode", id(field), self.m)

    def apply(self, v):
        return self.field.mode(self.m, v)


class CartanOp(Op):
    """h^i_m (m != 0) as an oscillator combination."""

    def __init__(self, system: OscSystem, i: int, m: int):
        self.system, self.i, self.m = system, i, m
        self.combo = system.cartan_combination(i, m)
        self.label = "h{}_{}".format(i, m)
        self.key = ("h", system, i, m)

    def apply(self, v):
        out = FockVector()
        for st, c in v.terms.items():
            out.add_scaled(_cartan_on_state(self.system, self.i, self.m, st), c)
        return out


@lru_cache(maxsize=1 << 16)
def _cartan_on_state(system: OscSystem, i: int, m: int, st: FockBasisState) -> FockVector:
    return apply_combination(system, system.cartan_combination(i, m), m, FockVector.basis(st))


@lru_cache(maxsize=1 << 16)
def _k_factor(system: OscSystem, powers: tuple, st: FockBasisState) -> Coeff:
    ex = sum((e * system.h0_eigen(i, st) for i, e in powers), Fraction(0))
    return Coeff.scalar(qpow(ex))


class KOp(Op):
    """Product of (K^i)^{e_i}: multiplies a state by q^{sum e_i h^i_0}."""

    def __init__(self, system: OscSystem, powers: dict, label: str = ""):
        self.system = system
        self.powers = {i: Fraction(e) for i, e in powers.items() if e}
        self.label = label or "K" + str(self.powers)
        self.key = ("K", system, tuple(sorted(self.powers.items())))

    def apply(self, v):
        out = FockVector()
        powers = self.key[2]
        for st, c in v.terms.items():
            out.add_term(st, c * _k_factor(self.system, powers, st))
        return out


class ScalarOp(Op):
    def __init__(self, c, label: str = ""):
        self.c = Coeff.scalar(c)
        self.label = label or "({})".format(self.c.render())

    def apply(self, v):
        return v.scale(self.c)


class Product(Op):
    """Operator product; the rightmost factor acts first."""

    def __init__(self, ops: Sequence[Op]):
        self.ops = tuple(ops)
        self.parity = sum(o.parity for o in self.ops) % 2
        self.label = "*".join(o.label for o in self.ops) or "1"

    def apply(self, v):
        for o in reversed(self.ops):
            if not v:
                return v
            v = o.apply(v)
        return v


class LinComb(Op):
    def __init__(self, terms: Sequence, label: str = ""):
        self.terms = tuple((Coeff.scalar(c), o) for c, o in terms)
        pars = {o.parity for _, o in self.terms}
        self.parity = pars.pop() if len(pars) == 1 else 0
        self.label = label or " + ".join("({})*{}".format(c.render(), o.label) for c, o in self.terms)

    def apply(self, v):
        out = FockVector()
        for c, o in self.terms:
            out.add_scaled(o.apply(v), c)
        return out


class QBracket(Op):
    """[X, Y]_xi = X Y - (-1)^{|X||Y|} xi Y X."""

    def __init__(self, x: Op, y: Op, xi=1):
        self.x, self.y = x, y
        self.xi = Coeff.scalar(xi)
        self.parity = (x.parity + y.parity) % 2
        self.sign = -1 if (x.parity and y.parity) else 1
        self.label = "[{},{}]_{}".format(x.label, y.label, self.xi.render())

    def apply(self, v):
        out = FockVector()
        out.add_scaled(self.x.apply(self.y.apply(v)), Coeff.scalar(1))
        out.add_scaled(self.y.apply(self.x.apply(v)), self.xi * (-self.sign))
        return out


class Identity(Op):
    label = "1"

    def apply(self, v):
        return v


def expand_words(op: Op) -> list:
    """Expand an operator tree into ``[(Coeff, (leaf, ...)), ...]``.

    Words are products of leaves (rightmost acts first); equal words are
    merged.  Scalars are folded into the coefficients.
    """
    acc: dict = {}
    leaves: dict = {}
    for c, word in _expand(op):
        k = tuple(l.key for l in word)
        leaves[k] = word
        acc[k] = acc.get(k, Coeff.scalar(0)) + c
    return [(c, leaves[k]) for k, c in acc.items() if c]


def _expand(op: Op):
    one = Coeff.scalar(1)
    if isinstance(op, ScalarOp):
        return [(op.c, ())] if op.c else []
    if isinstance(op, Identity):
        return [(one, ())]
    if isinstance(op, Product):
        out = [(one, ())]
        for o in op.ops:
            sub = _expand(o)
            out = [(c1 * c2, w1 + w2) for c1, w1 in out for c2, w2 in sub]
        return out
    if isinstance(op, LinComb):
        return [(c * c2, w) for c, o in op.terms for c2, w in _expand(o)]
    if isinstance(op, QBracket):
        xs, ys = _expand(op.x), _expand(op.y)
        f = op.xi * (-op.sign)
        out = [(c1 * c2, w1 + w2) for c1, w1 in xs for c2, w2 in ys]
        out += [(f * c2 * c1, w2 + w1) for c1, w1 in xs for c2, w2 in ys]
        return out
    if op.key is None:
        raise TypeError("cannot expand {!r}".format(op))
    return [(one, (op,))]


class WordEvaluator:
    """Evaluate many words on one basis state, sharing common suffixes."""

    def __init__(self, state: FockBasisState):
        self.base = FockVector.basis(state)
        self.cache: dict = {(): self.base}

    def word(self, word: tuple) -> FockVector:
        k = tuple(l.key for l in word)
        hit = self.cache.get(k)
        if hit is not None:
            return hit
        inner = self.word(word[1:])
        out = word[0].apply(inner) if inner else inner
        self.cache[k] = out
        return out


# ---------------------------------------------------------------------------
# bosonized currents


def h_field(system: OscSystem, i: int, sigma) -> FieldSpec:
    """The field h^i(z; sigma)."""
    z0 = system.cartan_zero(i)
    return FieldSpec("h{}".format(i), system.cartan_terms(i), Fraction(sigma), z0, z0)


_HALF = Fraction(1, 2)


@lru_cache(maxsize=None)
def drinfeld(system: OscSystem, i: int, sign: str) -> VOSum:
    """X^{+,i}(z) or X^{-,i}(z) as a VOSum (mode convention z^{-m-1})."""
    M, N = system.M, system.N
    if not 1 <= i <= M + N + 1:
        raise IndexError("Drinfeld index out of range: {}".format(i))
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    parity = 1 if i == M + 1 else 0
    name = "X{}{}".format(sign, i)
    c = lambda j, sig=0: species_field(system, system.c(j), sig)
    if sign == "+":
        h = VOFactor(h_field(system, i, _HALF), 1)
        if i <= M:
            terms = [(1, VOSpec((h,), cocycle=((system.a(i), 1),)))]
        elif i == M + 1:
            coc = tuple((system.a(k), -1) for k in range(1, M + 1))
            terms = [(1, VOSpec((h, VOFactor(c(1), 1)), cocycle=coc))]
        else:
            j = i - M - 1
            terms = qdiff_expand(system, c(j), -1, 0, base=(h, VOFactor(c(j + 1), 1)))
    else:
        h = VOFactor(h_field(system, i, -_HALF), -1)
        if i <= M:
            terms = [(-1, VOSpec((h,), cocycle=((system.a(i), -1),)))]
        elif i == M + 1:
            coc = tuple((system.a(k), 1) for k in range(1, M + 1))
            terms = qdiff_expand(system, c(1), -1, 0, base=(h,), cocycle=coc)
        else:
            j = i - M - 1
            terms = [(-x, s) for x, s in
                     qdiff_expand(system, c(j + 1), -1, 0, base=(h, VOFactor(c(j), 1)))]
    return VOSum(system, terms, parity=parity, delta=1, name=name)


def cartan_mode(system: OscSystem, i: int, m: int) -> tuple:
    """h^i_m as an explicit oscillator combination ((species, RatQ), ...)."""
    return system.cartan_combination(i, m)


def psi_mode(backend: "Backend", i: int, sign: str, m: int) -> Op:
    """psi^{+-,i}_m from the generating function in terms of K^i and h^i_n."""
    if sign == "+":
        if m < 0:
            return ScalarOp(0, "0")
        K = backend.K(i, 1)
        unit = QMINUS
        lev, direction = m, 1
    else:
        if m > 0:
            return ScalarOp(0, "0")
        K = backend.K(i, -1)
        unit = -QMINUS
        lev, direction = -m, -1
    if lev == 0:
        return K
    terms = []
    for mono in _colored_monomials(lev, 1):
        c = RatQ.const(1)
        ops = []
        for _, n, p in mono:
            c = c * unit ** p * Fraction(1, factorial(p))
            ops.extend([backend.h(i, direction * n)] * p)
        terms.append((c, Product([K] + ops)))
    return LinComb(terms, "psi{}{}_{}".format(sign, i, m))


def X(system: OscSystem, i: int, sign: str, m) -> ModeOp:
    return ModeOp(drinfeld(system, i, sign), m, "X{}{}_{}".format(sign, i, m))


def K(system: OscSystem, i: int, e=1) -> KOp:
    return KOp(system, {i: e}, "K{}^{}".format(i, e))


def chevalley(cd: CartanData, g: str, i: int) -> Op:
    """Chevalley generator ``g`` in {'e','f','t','tinv'} for node i."""
    system = cd.system
    M, N = cd.M, cd.N
    r = M + N + 1
    if not 0 <= i <= r:
        raise IndexError(i)
    if i >= 1:
        if g == "e":
            return X(system, i, "+", 0)
        if g == "f":
            return X(system, i, "-", 0)
        if g == "t":
            return K(system, i, 1)
        if g == "tinv":
            return K(system, i, -1)
        raise ValueError(g)
    if g in ("t", "tinv"):
        s = 1 if g == "t" else -1
        return Product([ScalarOp(Coeff.scalar(qpow(s)), "q^{}".format(s)),
                        KOp(system, {k: -s for k in range(1, r + 1)}, "t0K")])
    if g == "e":
        y: Op = X(system, 1, "-", 1)
        for k in range(2, r + 1):
            y = QBracket(X(system, k, "-", 0), y, QINV if k <= M + 1 else Q)
        pre = ScalarOp((-1) ** (N + 1))
        return Product([pre, y, KOp(system, {k: -1 for k in range(1, r + 1)})])
    if g == "f":
        y = X(system, 1, "+", -1)
        for k in range(2, r + 1):
            y = QBracket(y, X(system, k, "+", 0), Q if k <= M + 1 else QINV)
        return Product([KOp(system, {k: 1 for k in range(1, r + 1)}), y])
    raise ValueError(g)


# ---------------------------------------------------------------------------
# relation catalogue


@dataclass
class Instance:
    """One relation instance: LHS - RHS must vanish."""

    rel: str
    params: tuple
    lhs: Op
    rhs: Op

    @property
    def id(self) -> str:
        if not self.params:
            return self.rel
        return "{}[{}]".format(self.rel, ",".join("{}={}".format(k, v) for k, v in self.params))

    def residual(self, v: FockVector) -> FockVector:
        out = self.lhs.apply(v)
        out = out - self.rhs.apply(v)
        return out


ZERO_OP = ScalarOp(0, "0")

CHEVALLEY_RELATIONS = ("1.2", "1.3", "1.4", "1.5", "1.6", "1.7", "level")
DRINFELD_RELATIONS = ("1.10", "1.11", "1.12", "1.13", "1.14", "1.15", "1.16", "1.17", "1.18")
ALL_RELATIONS = CHEVALLEY_RELATIONS + DRINFELD_RELATIONS


def _br(x, y, xi=1):
    return QBracket(x, y, xi)


def _modes(bound: int, nonzero: bool = False):
    return [m for m in range(-bound, bound + 1) if not (nonzero and m == 0)]


def serre_pairs(cd: CartanData) -> list:
    """(i, j) for the cubic Chevalley Serre relations: j repeated and even."""
    out = []
    for i in range(cd.size):
        for j in range(cd.size):
            if i != j and abs(cd.a(i, j)) == 1 and cd.parity(j) == 0:
                out.append((i, j))
    return out


def serre4_triples(cd: CartanData) -> list:
    L = cd.size
    raw = [(cd.M + 2, cd.M + 1, cd.M), (1, 0, cd.M + cd.N + 1)]
    return [tuple(x % L for x in t) for t in raw]


class Backend:
    """Source of generators for the relation catalogue.

    Subclasses provide Drinfeld modes, Cartan modes, K factors and the
    Chevalley generators as :class:`Op` trees, together with the action
    of the central element (``gamma(e)`` returns gamma^e).
    """

    def __init__(self, cd: CartanData):
        self.cd = cd

    def X(self, i: int, sign: str, m) -> Op:
        raise NotImplementedError

    def h(self, i: int, m: int) -> Op:
        raise NotImplementedError

    def K(self, i: int, e=1) -> Op:
        raise NotImplementedError

    def chev(self, g: str, i: int) -> Op:
        raise NotImplementedError

    def gamma(self, e) -> RatQ:
        raise NotImplementedError

    def psi(self, i: int, sign: str, m: int) -> Op:
        return psi_mode(self, i, sign, m)


class BosonBackend(Backend):
    """Generators acting on the Fock space at level one (gamma = q)."""

    def __init__(self, cd: CartanData):
        super().__init__(cd)
        self.system = cd.system

    def X(self, i, sign, m):
        return X(self.system, i, sign, m)

    def h(self, i, m):
        return CartanOp(self.system, i, m)

    def K(self, i, e=1):
        return K(self.system, i, e)

    def chev(self, g, i):
        return chevalley(self.cd, g, i)

    def gamma(self, e):
        return qpow(e)


def relation_catalogue(cd: CartanData, rels: Iterable[str] | None = None,
                       mode_bound: int = 2, backend: "Backend | None" = None) -> tuple:
    """Return (instances, skipped) where skipped lists (id, reason).

    ``backend`` supplies the generators; the default is the level-one
    bosonization.
    """
    rels = list(rels) if rels else list(ALL_RELATIONS)
    bk = backend if backend is not None else BosonBackend(cd)
    r = cd.M + cd.N + 1
    nodes = range(1, r + 1)
    out: list = []
    skipped: list = []
    B = mode_bound
    for rel in rels:
        if rel == "1.2":
            for i in range(cd.size):
                for j in range(i + 1, cd.size):
                    ti, tj = bk.chev("t", i), bk.chev("t", j)
                    out.append(Instance(rel, (("i", i), ("j", j)), ti * tj, tj * ti))
        elif rel in ("1.3", "1.4"):
            g = "e" if rel == "1.3" else "f"
            s = 1 if rel == "1.3" else -1
            for i in range(cd.size):
                for j in range(cd.size):
                    lhs = Product([bk.chev("t", i), bk.chev(g, j), bk.chev("tinv", i)])
                    rhs = Product([ScalarOp(qpow(s * cd.a(i, j))), bk.chev(g, j)])
                    out.append(Instance(rel, (("i", i), ("j", j)), lhs, rhs))
        elif rel == "1.5":
            for i in range(cd.size):
                for j in range(cd.size):
                    lhs = _br(bk.chev("e", i), bk.chev("f", j))
                    if i == j:
                        rhs = LinComb([(RatQ.const(1) / QMINUS, bk.chev("t", i)),
                                       (-RatQ.const(1) / QMINUS, bk.chev("tinv", i))])
                    else:
                        rhs = ZERO_OP
                    out.append(Instance(rel, (("i", i), ("j", j)), lhs, rhs))
        elif rel == "1.6":
            for i, j in serre_pairs(cd):
                for g in ("e", "f"):
                    gi, gj = bk.chev(g, i), bk.chev(g, j)
                    lhs = _br(gj, _br(gj, gi, QINV), Q)
                    out.append(Instance(rel, (("g", g), ("i", i), ("j", j)), lhs, ZERO_OP))
        elif rel == "1.7":
            for k, l, m in serre4_triples(cd):
                for g in ("e", "f"):
                    gk, gl, gm = (bk.chev(g, x) for x in (k, l, m))
                    lhs = _br(gl, _br(gk, _br(gl, gm, QINV), Q))
                    out.append(Instance(rel, (("g", g), ("k", k), ("l", l), ("m", m)), lhs, ZERO_OP))
        elif rel == "level":
            # t_0 t_1 ... t_r is central and equals gamma
            ts = Product([bk.chev("t", i) for i in range(cd.size)])
            out.append(Instance(rel, (), ts, ScalarOp(bk.gamma(1))))
        elif rel == "1.10":
            # gamma acts as a scalar, so these hold by construction
            g = ScalarOp(bk.gamma(1))
            for i in nodes:
                out.append(Instance(rel, (("K", i),), _br(g, bk.K(i)), ZERO_OP))
                for m in _modes(B, True):
                    out.append(Instance(rel, (("h", i), ("m", m)), _br(g, bk.h(i, m)), ZERO_OP))
                for sg in "+-":
                    for m in _modes(B):
                        out.append(Instance(rel, (("X" + sg, i), ("m", m)), _br(g, bk.X(i, sg, m)),
                                            ZERO_OP))
        elif rel == "1.11":
            for i in nodes:
                for j in nodes:
                    for m in _modes(B, True):
                        for n in _modes(B, True):
                            lhs = _br(bk.h(i, m), bk.h(j, n))
                            if m + n == 0:
                                val = qint(cd.a(i, j) * m) * Fraction(1, m) * (bk.gamma(m) - bk.gamma(-m)) / QMINUS
                                rhs = ScalarOp(val)
                            else:
                                rhs = ZERO_OP
                            out.append(Instance(rel, (("i", i), ("j", j), ("m", m), ("n", n)), lhs, rhs))
                    for m in _modes(B, True):
                        lhs = _br(bk.K(i), bk.h(j, m))
                        out.append(Instance(rel, (("K", i), ("j", j), ("m", m)), lhs, ZERO_OP))
        elif rel == "1.12":
            for i in nodes:
                for j in nodes:
                    for sg in "+-":
                        s = 1 if sg == "+" else -1
                        for m in _modes(B):
                            lhs = Product([bk.K(i), bk.X(j, sg, m)])
                            rhs = Product([ScalarOp(qpow(s * cd.a(i, j))), bk.X(j, sg, m), bk.K(i)])
                            out.append(Instance(rel, (("i", i), ("j", j), ("pm", sg), ("m", m)), lhs, rhs))
        elif rel == "1.13":
            for i in nodes:
                for j in nodes:
                    for sg in "+-":
                        s = 1 if sg == "+" else -1
                        for m in _modes(B, True):
                            for n in _modes(B):
                                lhs = _br(bk.h(i, m), bk.X(j, sg, n))
                                c = qint(cd.a(i, j) * m) * Fraction(s, m) * bk.gamma(Fraction(-s * abs(m), 2))
                                rhs = Product([ScalarOp(c), bk.X(j, sg, n + m)])
                                out.append(Instance(rel, (("i", i), ("j", j), ("pm", sg), ("m", m), ("n", n)), lhs, rhs))
        elif rel == "1.14":
            for i in nodes:
                for j in nodes:
                    for m in _modes(B):
                        for n in _modes(B):
                            lhs = _br(bk.X(i, "+", m), bk.X(j, "-", n))
                            if i == j:
                                rhs = LinComb([
                                    (bk.gamma(Fraction(m - n, 2)) / QMINUS, bk.psi(j, "+", m + n)),
                                    (-bk.gamma(Fraction(n - m, 2)) / QMINUS, bk.psi(j, "-", m + n)),
                                ])
                            else:
                                rhs = ZERO_OP
                            out.append(Instance(rel, (("i", i), ("j", j), ("m", m), ("n", n)), lhs, rhs))
        elif rel == "1.15":
            for i in nodes:
                for j in nodes:
                    if cd.a(i, j) != 0 or j < i:
                        continue
                    for sg in "+-":
                        for m in _modes(B):
                            for n in _modes(B):
                                lhs = _br(bk.X(i, sg, m), bk.X(j, sg, n))
                                out.append(Instance(rel, (("i", i), ("j", j), ("pm", sg), ("m", m), ("n", n)), lhs, ZERO_OP))
        elif rel == "1.16":
            for i in nodes:
                for j in nodes:
                    if cd.a(i, j) == 0:
                        continue
                    for sg in "+-":
                        s = 1 if sg == "+" else -1
                        xi = qpow(s * cd.a(i, j))
                        for m in range(-B, B):
                            for n in range(-B, B):
                                lhs = LinComb([
                                    (1, _br(bk.X(i, sg, m + 1), bk.X(j, sg, n), xi)),
                                    (1, _br(bk.X(j, sg, n + 1), bk.X(i, sg, m), xi)),
                                ])
                                out.append(Instance(rel, (("i", i), ("j", j), ("pm", sg), ("m", m), ("n", n)), lhs, ZERO_OP))
        elif rel == "1.17":
            for i in nodes:
                for j in nodes:
                    if i == j or abs(cd.a(i, j)) != 1 or i == cd.M + 1:
                        continue
                    for sg in "+-":
                        for l in _modes(B):
                            for m in _modes(B):
                                if m < l:
                                    continue
                                for n in _modes(B):
                                    def side(a, b):
                                        return _br(bk.X(i, sg, a),
                                                   _br(bk.X(i, sg, b), bk.X(j, sg, n), QINV), Q)
                                    lhs = LinComb([(1, side(l, m)), (1, side(m, l))])
                                    out.append(Instance(rel, (("i", i), ("j", j), ("pm", sg), ("l", l), ("m", m), ("n", n)), lhs, ZERO_OP))
        elif rel == "1.18":
            M = cd.M
            if M < 1 or M + 2 > r:
                skipped.append(("1.18", "no instances: nodes M and M+2 must both exist"))
                continue
            for sg in "+-":
                for k in _modes(B):
                    for m in _modes(B):
                        if m < k:
                            continue
                        for l in _modes(B):
                            for n in _modes(B):
                                def side(a, b):
                                    inner = _br(bk.X(M + 1, sg, b), bk.X(M, sg, n), QINV)
                                    return _br(bk.X(M + 1, sg, a), _br(bk.X(M + 2, sg, l), inner, Q))
                                lhs = LinComb([(1, side(k, m)), (1, side(m, k))])
                                out.append(Instance(rel, (("pm", sg), ("k", k), ("l", l), ("m", m), ("n", n)), lhs, ZERO_OP))
        else:
            raise ValueError("unknown relation id {!r}".format(rel))
    if cd.M == 0 or cd.N == 0:
        skipped.append(("quintic-serre", "extra fifth-order Serre relations for M=0 or N=0 are not implemented"))
    return out, skipped


# ---------------------------------------------------------------------------
# verification


@dataclass
class CheckRecord:
    id: str
    status: str
    residual: str = ""
    notes: str = ""
    states: int = 0


def _raw_states(vectors: Sequence[FockVector]) -> list:
    seen = {}
    for v in vectors:
        for st in v.terms:
            seen[st] = None
    return sorted(seen)


def verify_batch(insts: Sequence[Instance], vectors: Sequence[FockVector],
                 system: OscSystem | None = None, labels: Sequence[str] | None = None) -> list:
    """Check many instances on the same vectors via word expansion."""
    raw = _raw_states(vectors)
    expanded = []
    for inst in insts:
        w = expand_words(inst.lhs)
        w += [(-c, word) for c, word in expand_words(inst.rhs)]
        expanded.append(w)
    res: list = [dict() for _ in insts]
    for st in raw:
        ev = WordEvaluator(st)
        for idx, words in enumerate(expanded):
            out = FockVector()
            for c, word in words:
                out.add_scaled(ev.word(word), c)
            if out:
                res[idx][st] = out
    records = []
    for inst, r in zip(insts, res):
        records.append(_finish_record(inst, r, vectors, system, labels))
    return records


def _finish_record(inst, res, vectors, system, labels) -> "CheckRecord":
    if not res:
        return CheckRecord(inst.id, "pass", states=len(vectors))
    for idx, v in enumerate(vectors):
        out = FockVector()
        for st, c in v.terms.items():
            r = res.get(st)
            if r is not None:
                out.add_scaled(r, c)
        if out:
            lab = labels[idx] if labels else str(idx)
            shown = out.render(system)
            lines = shown.split("\n")
            if len(lines) > 6:
                shown = "\n".join(lines[:6] + ["... ({} terms)".format(len(lines))])
            return CheckRecord(inst.id, "fail", "on {}:\n{}".format(lab, shown), states=len(vectors))
    return CheckRecord(inst.id, "pass", notes="raw-basis residual cancels on module vectors",
                       states=len(vectors))


def verify_instance(inst: Instance, vectors: Sequence[FockVector], system: OscSystem | None = None,
                    labels: Sequence[str] | None = None) -> CheckRecord:
    """Check LHS - RHS = 0 on each vector.

    The residual is computed once per raw basis state; vector residuals are
    assembled only when some raw residual is nonzero.
    """
    raw = _raw_states(vectors)
    res = {}
    for st in raw:
        r = inst.residual(FockVector.basis(st))
        if r:
            res[st] = r
    if not res:
        return CheckRecord(inst.id, "pass", states=len(vectors))
    for idx, v in enumerate(vectors):
        out = FockVector()
        for st, c in v.terms.items():
            r = res.get(st)
            if r is not None:
                out.add_scaled(r, c)
        if out:
            lab = labels[idx] if labels else str(idx)
            shown = out.render(system)
            lines = shown.split("\n")
            if len(lines) > 6:
                shown = "\n".join(lines[:6] + ["... ({} terms)".format(len(lines))])
            return CheckRecord(inst.id, "fail", "on {}:\n{}".format(lab, shown), states=len(vectors))
    return CheckRecord(inst.id, "pass", notes="raw-basis residual cancels on module vectors",
                       states=len(vectors))


def verify_relation(cd: CartanData, rel: str, vectors: Sequence[FockVector],
                    mode_bound: int = 2, labels=None, backend=None) -> list:
    insts, skipped = relation_catalogue(cd, [rel], mode_bound, backend)
    recs = [verify_instance(i, vectors, cd.system, labels) for i in insts]
    recs += [CheckRecord(s, "skipped", notes=why) for s, why in skipped if s == rel]
    return recs


def check_instances(insts: Sequence[Instance], vectors, system=None, labels=None) -> list:
    return verify_batch(insts, vectors, system, labels)
