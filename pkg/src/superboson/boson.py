"""Free boson oscillators, weight-lattice Fock vacua and the graded basis.

Species are indexed by integers in the order ``a1..a_{M+1}, b1..b_{N+1},
c1..c_{N+1}``.  Each species ``s`` carries a metric sign ``g_s`` (+1 for a
and c, -1 for b) so that

    [x^s_m, x^s_n] = g_s delta_{m+n,0} [m]^2/m,    [x^s_0, Q_s] = g_s.

A weight vector ``|lambda> = exp(sum lambda_s Q_s)|0>`` is therefore an
eigenvector of the zero mode ``x^s_0`` with eigenvalue ``g_s * lambda_s``.

Basis states store the weight coordinates ``lambda_s`` and a creation
monomial as a sorted tuple of ``(species, level, power)`` triples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

from .coeff import Coeff, RatQ, qint, qpow

__all__ = [
    "OscSystem",
    "OscMode",
    "ZeroMode",
    "Momentum",
    "FockBasisState",
    "FockVector",
    "SpaceSpec",
    "LatticeBlock",
    "EnumerationError",
    "UnsupportedRank",
    "comm",
    "apply_osc",
    "apply_combination",
    "d_eigenvalue",
    "weight_eigenvalues",
    "enumerate_space",
    "rank",
]


def norm_rational(x):
    """Fractions with denominator 1 become ints (much cheaper to hash)."""
    x = Fraction(x) if not isinstance(x, int) else x
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


class UnsupportedRank(ValueError):
    """Raised for operations that only exist for (M, N) = (1, 0)."""


class EnumerationError(RuntimeError):
    """The lattice truncation bound could not be established."""


# ---------------------------------------------------------------------------
# species bookkeeping


@dataclass(frozen=True)
class OscSystem:
    """The oscillator content for a given (M, N)."""

    M: int
    N: int

    def __post_init__(self):
        if self.M < 0 or self.N < 0:
            raise ValueError("M and N must be non-negative")

    @property
    def n_species(self) -> int:
        return (self.M + 1) + 2 * (self.N + 1)

    @property
    def rank(self) -> int:
        """Number of Drinfeld nodes, M+N+1."""
        return self.M + self.N + 1

    def a(self, i: int) -> int:
        if not 1 <= i <= self.M + 1:
            raise IndexError("a index out of range: {}".format(i))
        return i - 1

    def b(self, j: int) -> int:
        if not 1 <= j <= self.N + 1:
            raise IndexError("b index out of range: {}".format(j))
        return self.M + j

    def c(self, j: int) -> int:
        if not 1 <= j <= self.N + 1:
            raise IndexError("c index out of range: {}".format(j))
        return self.M + self.N + 1 + j

    def family(self, s: int) -> tuple[str, int]:
        if s <= self.M:
            return "a", s + 1
        if s <= self.M + self.N + 1:
            return "b", s - self.M
        return "c", s - self.M - self.N - 1

    def name(self, s: int) -> str:
        f, i = self.family(s)
        return "{}{}".format(f, i)

    def metric(self, s: int) -> int:
        return -1 if self.family(s)[0] == "b" else 1

    def species(self) -> range:
        return range(self.n_species)

    def vacuum(self, weight: Iterable) -> "FockBasisState":
        w = tuple(norm_rational(x) for x in weight)
        if len(w) != self.n_species:
            raise ValueError("weight needs {} coordinates".format(self.n_species))
        return FockBasisState(w, ())

    def eigen(self, s: int, state: "FockBasisState") -> Fraction:
        """Eigenvalue of the zero mode x^s_0 on ``state``."""
        return self.metric(s) * state.weight[s]

    # Cartan combinations -------------------------------------------------
    def cartan_terms(self, i: int) -> tuple:
        """``h^i_m`` as ``((species, c, e), ...)`` meaning ``sum c q^(e|m|) x^s_m``."""
        M, N = self.M, self.N
        h = Fraction(1, 2)
        if 1 <= i <= M:
            return ((self.a(i), 1, -h), (self.a(i + 1), -1, h))
        if i == M + 1:
            return ((self.a(M + 1), 1, -h), (self.b(1), 1, -h))
        if M + 2 <= i <= M + N + 1:
            j = i - M - 1
            return ((self.b(j), -1, h), (self.b(j + 1), 1, -h))
        raise IndexError("Cartan index out of range: {}".format(i))

    def cartan_combination(self, i: int, m: int) -> tuple:
        """``h^i_m`` (m != 0) as ``((species, RatQ), ...)``."""
        if m == 0:
            raise ValueError("use cartan_zero for m = 0")
        return tuple((s, qpow(e * abs(m)) * c) for s, c, e in self.cartan_terms(i))

    def cartan_zero(self, i: int) -> tuple:
        """``h^i_0`` and ``Q_{h^i}`` as ``((species, coefficient), ...)``.

        The same integer vector describes both the zero-mode combination and
        the momentum combination.
        """
        M, N = self.M, self.N
        if 1 <= i <= M:
            return ((self.a(i), 1), (self.a(i + 1), -1))
        if i == M + 1:
            return ((self.a(M + 1), 1), (self.b(1), 1))
        if M + 2 <= i <= M + N + 1:
            j = i - M - 1
            return ((self.b(j), -1), (self.b(j + 1), 1))
        raise IndexError("Cartan index out of range: {}".format(i))

    def h0_eigen(self, i: int, state: "FockBasisState") -> Fraction:
        return sum((Fraction(c) * self.eigen(s, state) for s, c in self.cartan_zero(i)),
                   Fraction(0))


# ---------------------------------------------------------------------------
# modes


@dataclass(frozen=True)
class OscMode:
    species: int
    n: int

    def __post_init__(self):
        if self.n == 0:
            raise ValueError("oscillator modes have n != 0; use ZeroMode")

    @property
    def creation(self) -> bool:
        return self.n < 0


@dataclass(frozen=True)
class ZeroMode:
    species: int


@dataclass(frozen=True)
class Momentum:
    species: int


def comm(system: OscSystem, x, y) -> Coeff:
    """Central value of the commutator [x, y]."""
    if isinstance(x, OscMode) and isinstance(y, OscMode):
        if x.species != y.species or x.n + y.n != 0:
            return Coeff.scalar(0)
        m = x.n
        return Coeff.scalar(qint(m) * qint(m) * Fraction(system.metric(x.species), m))
    if isinstance(x, ZeroMode) and isinstance(y, Momentum):
        if x.species != y.species:
            return Coeff.scalar(0)
        return Coeff.scalar(system.metric(x.species))
    if isinstance(x, Momentum) and isinstance(y, ZeroMode):
        return -comm(system, y, x)
    return Coeff.scalar(0)


# ---------------------------------------------------------------------------
# states and vectors


class FockBasisState:
    """Weight coordinates plus a canonical creation monomial.

    ``monomial`` is a tuple of ``(species, level, power)`` with level > 0
    meaning the mode ``x^species_{-level}``, sorted species-major.  Instances
    are immutable; the hash is computed once because states are dictionary
    keys everywhere.
    """

    __slots__ = ("weight", "monomial", "_h")

    def __init__(self, weight: tuple, monomial: tuple = ()):
        self.weight = weight
        self.monomial = monomial
        self._h = hash((weight, monomial))

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FockBasisState):
            return NotImplemented
        return (self._h == other._h and self.monomial == other.monomial
                and self.weight == other.weight)

    def _key(self):
        return (self.weight, self.monomial)

    def __lt__(self, other):
        return self._key() < other._key()

    def __le__(self, other):
        return self._key() <= other._key()

    def __gt__(self, other):
        return self._key() > other._key()

    def __ge__(self, other):
        return self._key() >= other._key()

    def __repr__(self):
        return "FockBasisState({!r}, {!r})".format(self.weight, self.monomial)

    def __reduce__(self):
        return (FockBasisState, (self.weight, self.monomial))

    @property
    def level(self) -> int:
        return sum(k * p for _, k, p in self.monomial)

    def power(self, s: int, k: int) -> int:
        for s2, k2, p in self.monomial:
            if s2 == s and k2 == k:
                return p
        return 0

    def with_monomial(self, mono) -> "FockBasisState":
        return FockBasisState(self.weight, mono)

    def shifted(self, shift) -> "FockBasisState":
        w = tuple(norm_rational(a + b) for a, b in zip(self.weight, shift))
        return FockBasisState(w, self.monomial)

    def render(self, system: OscSystem | None = None) -> str:
        head = "|" + ",".join(str(x) for x in self.weight) + ">"
        if not self.monomial:
            return head
        parts = []
        for s, k, p in self.monomial:
            nm = system.name(s) if system is not None else "x{}".format(s)
            parts.append("{}[-{}]^{}".format(nm, k, p))
        return head + " * " + " ".join(parts)


def mono_mul(m1: tuple, m2: tuple) -> tuple:
    """Product of two canonical monomials."""
    if not m1:
        return m2
    if not m2:
        return m1
    d = {}
    for s, k, p in m1:
        d[(s, k)] = p
    for s, k, p in m2:
        d[(s, k)] = d.get((s, k), 0) + p
    return tuple((s, k, p) for (s, k), p in sorted(d.items()))


class FockVector:
    """Finite linear combination of basis states with Coeff coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = terms if terms is not None else {}

    @classmethod
    def basis(cls, state: FockBasisState, c=1) -> "FockVector":
        c = Coeff.scalar(c)
        return cls({state: c} if c else {})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def items(self):
        return self.terms.items()

    def add_term(self, state, c) -> None:
        """In-place accumulation (only for vectors under construction)."""
        if not c:
            return
        old = self.terms.get(state)
        if old is None:
            self.terms[state] = c
        else:
            new = old + c
            if new:
                self.terms[state] = new
            else:
                del self.terms[state]

    def add_scaled(self, other: "FockVector", c) -> None:
        if not c:
            return
        if not isinstance(c, Coeff):
            c = Coeff.scalar(c)
        terms = self.terms
        ct = c.terms
        r = ct.get(0) if len(ct) == 1 else None
        if r is None:
            for st, x in other.terms.items():
                self.add_term(st, x * c)
            return
        one = r.is_one()
        # phase-free scalar: work on the RatQ parts directly where possible
        for st, x in other.terms.items():
            xt = x.terms
            v = xt.get(0) if len(xt) == 1 else None
            if v is None:
                self.add_term(st, x if one else x * c)
                continue
            if not one:
                v = v * r
            old = terms.get(st)
            if old is None:
                terms[st] = Coeff({0: v})
                continue
            ot = old.terms
            w = ot.get(0) if len(ot) == 1 else None
            if w is None:
                self.add_term(st, Coeff({0: v}))
                continue
            w = w + v
            if w.num:
                terms[st] = Coeff({0: w})
            else:
                del terms[st]

    def __add__(self, other: "FockVector") -> "FockVector":
        out = FockVector(dict(self.terms))
        out.add_scaled(other, Coeff.scalar(1))
        return out

    def __sub__(self, other: "FockVector") -> "FockVector":
        out = FockVector(dict(self.terms))
        out.add_scaled(other, Coeff.scalar(-1))
        return out

    def __neg__(self):
        return FockVector({s: -c for s, c in self.terms.items()})

    def scale(self, c) -> "FockVector":
        c = Coeff.scalar(c)
        if not c:
            return FockVector()
        return FockVector({s: x * c for s, x in self.terms.items()})

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, FockVector):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def render(self, system: OscSystem | None = None) -> str:
        if not self.terms:
            return "0"
        return "\n".join("{} : {}".format(s.render(system), c.render())
                         for s, c in self.sorted_items())

    def __repr__(self):
        return "FockVector({} terms)".format(len(self.terms))


def linear_extend(fn, v: FockVector) -> FockVector:
    """Extend a basis-state map ``fn(state) -> FockVector`` linearly."""
    out = FockVector()
    for st, c in v.terms.items():
        out.add_scaled(fn(st), c)
    return out


def apply_osc(system: OscSystem, x, v: FockVector) -> FockVector:
    """Act with a single oscillator, zero mode or momentum operator."""
    if isinstance(x, OscMode):
        s = x.species
        if x.n < 0:
            k = -x.n
            return FockVector({st.with_monomial(mono_mul(st.monomial, ((s, k, 1),))): c
                               for st, c in v.terms.items()})
        k = x.n
        base = qint(k) * qint(k) * Fraction(system.metric(s), k)
        out = FockVector()
        for st, c in v.terms.items():
            p = st.power(s, k)
            if not p:
                continue
            mono = tuple((s2, k2, p2 - 1 if (s2, k2) == (s, k) else p2)
                         for s2, k2, p2 in st.monomial)
            mono = tuple(t for t in mono if t[2])
            out.add_term(st.with_monomial(mono), c * (base * p))
        return out
    if isinstance(x, ZeroMode):
        out = FockVector()
        for st, c in v.terms.items():
            out.add_term(st, c * system.eigen(x.species, st))
        return out
    if isinstance(x, Momentum):
        shift = [0] * system.n_species
        shift[x.species] = 1
        return FockVector({st.shifted(shift): c for st, c in v.terms.items()})
    raise TypeError("not an oscillator: {!r}".format(x))


def apply_combination(system: OscSystem, combo, m: int, v: FockVector) -> FockVector:
    """Apply ``sum_s coef_s x^s_m`` (m != 0) given as ``((s, RatQ), ...)``."""
    out = FockVector()
    for s, coef in combo:
        out.add_scaled(apply_osc(system, OscMode(s, m), v), Coeff.scalar(coef))
    return out


# ---------------------------------------------------------------------------
# grading (rank one case only)

SYS10 = OscSystem(1, 0)


def _require10(system: OscSystem):
    if (system.M, system.N) != (1, 0):
        raise UnsupportedRank("the grading operator is only defined for (M,N) = (1,0)")


def zero_mode_grading(system: OscSystem, weight) -> Fraction:
    """Zero-mode part d_0 of the grading operator on a weight vector."""
    _require10(system)
    e1 = Fraction(weight[0])
    e2 = Fraction(weight[1])
    eb = -Fraction(weight[2])
    ec = Fraction(weight[3])
    return -Fraction(1, 2) * (e1 * e1 + e2 * e2 - eb * eb + ec * (ec + 1) - (e1 + e2 + eb) ** 2)


def d_eigenvalue(system: OscSystem, state: FockBasisState) -> Fraction:
    """Eigenvalue of d: the zero-mode polynomial minus the creation level."""
    return zero_mode_grading(system, state.weight) - state.level


def weight_eigenvalues(system: OscSystem, state: FockBasisState) -> tuple:
    """Eigenvalues (h^1_0, h^2_0) for (M,N) = (1,0)."""
    _require10(system)
    return system.h0_eigen(1, state), system.h0_eigen(2, state)


# ---------------------------------------------------------------------------
# module spaces


@dataclass(frozen=True)
class SpaceSpec:
    """One of the lattice spaces F(alpha;beta), F((1,0);beta), F((0,1);beta).

    ``kind`` is ``"alpha"``, ``"10"`` or ``"01"``.
    """

    kind: str
    alpha: Fraction = Fraction(0)
    beta: Fraction = Fraction(0)

    def __post_init__(self):
        if self.kind not in ("alpha", "10", "01"):
            raise ValueError("unknown space kind {!r}".format(self.kind))
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "beta", Fraction(self.beta))

    @classmethod
    def F(cls, alpha, beta=0) -> "SpaceSpec":
        return cls("alpha", Fraction(alpha), Fraction(beta))

    @property
    def system(self) -> OscSystem:
        return SYS10

    def weight(self, i: int, j: int) -> tuple:
        b, a = self.beta, self.alpha
        if self.kind == "alpha":
            w = (b + i, b - i + j, b - a + j, -a + j)
        elif self.kind == "10":
            w = (b + 1 + i, b - i + j, b + j, j)
        else:
            w = (b + 1 + i, b + 1 - i + j, b + j, j)
        return tuple(norm_rational(x) for x in w)

    def highest_weight(self) -> tuple:
        return self.weight(0, 0)

    def lattice_point(self, weight) -> tuple:
        """Inverse of :meth:`weight`; raises if the weight is off-lattice."""
        w = tuple(Fraction(x) for x in weight)
        i = w[0] - self.weight(0, 0)[0]
        j = w[3] - self.weight(0, 0)[3]
        if i.denominator != 1 or j.denominator != 1 or self.weight(int(i), int(j)) != w:
            raise ValueError("weight {} is not on the lattice of {}".format(w, self.label))
        return int(i), int(j)

    def parity(self, state: FockBasisState) -> int:
        j = state.weight[3] - self.weight(0, 0)[3]
        return int(j) % 2

    def eta_defined(self) -> bool:
        return self.kind != "alpha" or self.alpha.denominator == 1

    @property
    def label(self) -> str:
        if self.kind == "alpha":
            return "F({};{})".format(self.alpha, self.beta)
        if self.kind == "10":
            return "F((1,0);{})".format(self.beta)
        return "F((0,1);{})".format(self.beta)

    def minus_d(self, i: int, j: int) -> Fraction:
        return -zero_mode_grading(SYS10, self.weight(i, j))


@lru_cache(maxsize=None)
def _colored_monomials(level: int, colors: int) -> tuple:
    """All multisets of (color, part) with parts summing to ``level``.

    Each result is a sorted tuple of ``(color, part, multiplicity)``.
    """
    slots = [(c, k) for k in range(1, level + 1) for c in range(colors)]
    slots.sort()
    out = []

    def rec(idx, remaining, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for t in range(idx, len(slots)):
            c, k = slots[t]
            if k > remaining:
                continue
            for mult in range(1, remaining // k + 1):
                acc.append((c, k, mult))
                rec(t + 1, remaining - k * mult, acc)
                acc.pop()

    rec(0, level, [])
    out.sort()
    return tuple(out)


def colored_partition_count(level: int, colors: int = 3) -> int:
    return len(_colored_monomials(level, colors))


GENERATORS = ("h1", "h2", "c")


def _generator_combo(g: int, k: int) -> tuple:
    """Creation operator g_{-k} as ((species, RatQ), ...) on (1,0)."""
    if g == 2:
        return ((3, RatQ.const(1)),)
    return SYS10.cartan_combination(g + 1, -k)


def expand_monomial(vac: FockBasisState, mono: tuple) -> FockVector:
    """Apply a monomial in h1, h2, c creation operators to a vacuum."""
    v = FockVector.basis(vac)
    for g, k, mult in mono:
        combo = _generator_combo(g, k)
        for _ in range(mult):
            v = apply_combination(SYS10, combo, -k, v)
    return v


@dataclass
class LatticeBlock:
    """Basis data for one lattice point of a space."""

    space: SpaceSpec
    point: tuple
    qdegree: Fraction
    weight: tuple
    monomials: list = field(default_factory=list)
    _vectors: list | None = field(default=None, repr=False)

    @property
    def vacuum(self) -> FockBasisState:
        return FockBasisState(self.weight, ())

    @property
    def labels(self) -> list:
        out = []
        for mono in self.monomials:
            if not mono:
                out.append("1")
            else:
                out.append(" ".join("{}[-{}]^{}".format(GENERATORS[g], k, p) for g, k, p in mono))
        return out

    def vectors(self) -> list:
        if self._vectors is None:
            self._vectors = [expand_monomial(self.vacuum, m) for m in self.monomials]
        return self._vectors

    def levels(self) -> list:
        return [sum(k * p for _, k, p in m) for m in self.monomials]


def _quadratic(space: SpaceSpec):
    """Coefficients (A,B,C,D,E,F) of -d_0 = A i^2 + B ij + C j^2 + D i + E j + F."""
    f = space.minus_d
    F_ = f(0, 0)
    A = (f(1, 0) + f(-1, 0)) / 2 - F_
    C = (f(0, 1) + f(0, -1)) / 2 - F_
    D = (f(1, 0) - f(-1, 0)) / 2
    E = (f(0, 1) - f(0, -1)) / 2
    B = f(1, 1) - A - C - D - E - F_
    return A, B, C, D, E, F_


def _edge_min(q, fixed_axis, fixed_val, lo, hi):
    """Exact real minimum of the quadratic on a square edge."""
    A, B, C, D, E, F = q
    if fixed_axis == 0:  # i fixed, j varies: C j^2 + (B i + E) j + ...
        a2, a1, a0 = C, B * fixed_val + E, A * fixed_val ** 2 + D * fixed_val + F
    else:
        a2, a1, a0 = A, B * fixed_val + D, C * fixed_val ** 2 + E * fixed_val + F
    cands = [Fraction(lo), Fraction(hi)]
    if a2 > 0:
        x = -a1 / (2 * a2)
        if lo <= x <= hi:
            cands.append(x)
    return min(a2 * x * x + a1 * x + a0 for x in cands)


def lattice_bound(space: SpaceSpec, cut) -> tuple:
    """Return (R, minimum) so that every point with -d <= min + cut has
    max(|i|,|j|) < R.  The certificate is the exact real minimum of the
    positive-definite quadratic on the square boundary of radius R.
    """
    q = _quadratic(space)
    A, B, C = q[0], q[1], q[2]
    if not (A > 0 and 4 * A * C - B * B > 0):
        raise EnumerationError("grading form is not positive definite on the lattice of "
                               + space.label)
    # global integer minimum: search a window around the real minimizer
    det = 4 * A * C - B * B
    i0 = (B * q[4] - 2 * C * q[3]) / det
    j0 = (B * q[3] - 2 * A * q[4]) / det
    ci, cj = round(i0), round(j0)
    m = min(space.minus_d(i, j) for i in range(ci - 3, ci + 4) for j in range(cj - 3, cj + 4))
    thr = m + Fraction(cut)
    R = max(abs(ci), abs(cj)) + 4
    while True:
        edges = [(0, R, -R, R), (0, -R, -R, R), (1, R, -R, R), (1, -R, -R, R)]
        if all(_edge_min(q, ax, v, lo, hi) > thr for ax, v, lo, hi in edges):
            return R, m
        R += 1
        if R > 10_000:
            raise EnumerationError("lattice bound did not converge")


def enumerate_space(space: SpaceSpec, degree_cut: int, *, max_level: int | None = None) -> list:
    """Graded basis of a lattice space up to relative q-degree ``degree_cut``.

    Returns a list of :class:`LatticeBlock`, one per lattice point whose
    vacuum lies within the cut, ordered by (qdegree, point).  Each block holds
    the monomials in h1, h2, c creation operators of level at most
    ``degree_cut - qdegree`` (or ``max_level`` if smaller).
    """
    if degree_cut < 0:
        raise ValueError("degree_cut must be non-negative")
    R, m = lattice_bound(space, degree_cut)
    blocks = []
    for i in range(-R, R + 1):
        for j in range(-R, R + 1):
            delta = space.minus_d(i, j) - m
            if delta > degree_cut:
                continue
            room = int(Fraction(degree_cut) - delta)
            if max_level is not None:
                room = min(room, max_level)
            monos = []
            for L in range(room + 1):
                monos.extend(_colored_monomials(L, 3))
            blocks.append(LatticeBlock(space, (i, j), delta, space.weight(i, j), monos))
    blocks.sort(key=lambda b: (b.qdegree, b.point))
    return blocks


def ground_minus_d(space: SpaceSpec) -> Fraction:
    return lattice_bound(space, 0)[1]


def raw_point_basis(system: OscSystem, weight, max_level: int) -> list:
    """All raw oscillator basis states at one weight up to a level."""
    vac = system.vacuum(weight)
    out = []
    for L in range(max_level + 1):
        for mono in _colored_monomials(L, system.n_species):
            out.append(vac.with_monomial(mono))
    return out


# ---------------------------------------------------------------------------
# exact rank


def rank(vectors: list) -> int:
    """Exact rank of FockVectors over Q(q^(1/L)) with phase-free coefficients."""
    rows = []
    for v in vectors:
        rows.append({s: c.ratq() for s, c in v.terms.items()})
    r = 0
    pivots: list = []
    reduced: list = []
    for row in rows:
        row = dict(row)
        for piv, prow in zip(pivots, reduced):
            c = row.get(piv)
            if c is None:
                continue
            for s, x in prow.items():
                y = row.get(s)
                val = (y if y is not None else RatQ.const(0)) - c * x
                if val.is_zero():
                    row.pop(s, None)
                else:
                    row[s] = val
        if not row:
            continue
        piv = min(row)
        inv = row[piv].inverse()
        row = {s: x * inv for s, x in row.items()}
        pivots.append(piv)
        reduced.append(row)
        r += 1
    return r
