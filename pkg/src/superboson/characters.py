"""Characters of the sl-hat(2|1) Fock modules.

Series are stored relative to a prefactor ``q^qshift y^yalpha``: a term
``(r, a, b) -> c`` stands for ``c q^(qshift + r) x^a y^(yalpha + b)``.
Only terms with ``r <= D`` are kept.

Brute-force characters trace ``q^{-d} x^{h1_0} y^{h2_0}`` over the basis of
:func:`boson.enumerate_space`.  For the Ker/Coker parts the trace is taken
against the projector ``eta_0 xi_0`` (or ``xi_0 eta_0``).  Both fermions are
built from the c-field alone, so on a graded piece the projector is the
identity on the h-oscillators tensored with its matrix on the c-oscillators.
That matrix is computed exactly with :func:`vertex.fermion_mode`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .boson import (SYS10, EnumerationError, FockBasisState, FockVector, SpaceSpec,
                    _colored_monomials, colored_partition_count, enumerate_space,
                    norm_rational)
from .coeff import RatQ
from .vertex import OffsetError, fermion_mode

__all__ = [
    "CharacterSeries",
    "CompareResult",
    "HighestWeightSolution",
    "FORMULAS",
    "brute_character",
    "projected_character",
    "projector_matrix",
    "formula_character",
    "compare",
    "solve_highest_weights",
    "EtaUndefined",
]


class EtaUndefined(ValueError):
    """eta_0 has no mode expansion on the requested space."""


# ---------------------------------------------------------------------------
# series


@dataclass
class CharacterSeries:
    D: int
    terms: dict = field(default_factory=dict)
    qshift: Fraction = Fraction(0)
    yalpha: Fraction = Fraction(0)
    label: str = ""

    def add(self, key: tuple, c) -> None:
        if key[0] > self.D:
            return
        v = self.terms.get(key, 0) + c
        if v:
            self.terms[key] = v
        else:
            self.terms.pop(key, None)

    def __eq__(self, other):
        if not isinstance(other, CharacterSeries):
            return NotImplemented
        return (self.D, self.terms, self.qshift, self.yalpha) == \
            (other.D, other.terms, other.qshift, other.yalpha)

    def __add__(self, other: "CharacterSeries") -> "CharacterSeries":
        self._check_frame(other)
        out = CharacterSeries(self.D, dict(self.terms), self.qshift, self.yalpha)
        for k, c in other.terms.items():
            out.add(k, c)
        return out

    def __sub__(self, other: "CharacterSeries") -> "CharacterSeries":
        self._check_frame(other)
        out = CharacterSeries(self.D, dict(self.terms), self.qshift, self.yalpha)
        for k, c in other.terms.items():
            out.add(k, -c)
        return out

    def _check_frame(self, other):
        if (self.D, self.qshift, self.yalpha) != (other.D, other.qshift, other.yalpha):
            raise ValueError("series have different cuts or prefactors")

    def truncate(self, D: int) -> "CharacterSeries":
        return CharacterSeries(D, {k: c for k, c in self.terms.items() if k[0] <= D},
                               self.qshift, self.yalpha, self.label)

    def layer(self, r) -> dict:
        return {(a, b): c for (rr, a, b), c in self.terms.items() if rr == r}

    def at_xy1(self) -> dict:
        """Coefficients with x = y = 1, keyed by relative q-exponent."""
        out: dict = {}
        for (r, _, _), c in self.terms.items():
            out[r] = out.get(r, 0) + c
        return out

    def render(self) -> str:
        """One line per term: ``q^(r) x^(a) y^(alpha+(b)) : coeff``."""
        lines = ["# {} D={} prefactor q^({}) y^({})".format(
            self.label or "series", self.D, self.qshift, self.yalpha)]
        for (r, a, b), c in sorted(self.terms.items()):
            lines.append("q^({}) x^({}) y^(alpha+({})) : {}".format(r, a, b, c))
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "CharacterSeries":
        import re
        head = re.compile(r"# (.*) D=(\d+) prefactor q\^\((.+)\) y\^\((.+)\)")
        line = re.compile(r"q\^\((.+)\) x\^\((.+)\) y\^\(alpha\+\((.+)\)\) : (.+)")
        out = None
        for raw in text.splitlines():
            if not raw.strip():
                continue
            m = head.fullmatch(raw)
            if m:
                out = cls(int(m[2]), {}, Fraction(m[3]), Fraction(m[4]), m[1])
                continue
            m = line.fullmatch(raw)
            if m is None or out is None:
                raise ValueError("malformed series line: {!r}".format(raw))
            out.terms[(norm_rational(Fraction(m[1])), int(m[2]), int(m[3]))] = \
                norm_rational(Fraction(m[4]))
        if out is None:
            raise ValueError("empty series text")
        return out


# ---------------------------------------------------------------------------
# brute force


def _check10(space: SpaceSpec):
    if space.beta != 0:
        raise ValueError("characters are computed at beta = 0")


def _weight_exponents(space: SpaceSpec, weight: tuple) -> tuple:
    """(x exponent, y offset) of a vacuum: h1_0 and h2_0 minus the y^alpha flag."""
    st = FockBasisState(weight, ())
    h1 = SYS10.h0_eigen(1, st)
    h2 = SYS10.h0_eigen(2, st)
    ya = space.alpha if space.kind == "alpha" else Fraction(0)
    return int(h1), int(h2 - ya)


def _frame(space: SpaceSpec, D: int, label: str) -> tuple:
    blocks = enumerate_space(space, D)
    ground = min(b.qdegree for b in blocks)
    if ground != 0:
        raise EnumerationError("enumeration did not start at the ground level")
    qshift = space.minus_d(*blocks[0].point)
    ya = space.alpha if space.kind == "alpha" else Fraction(0)
    return blocks, CharacterSeries(D, {}, qshift, ya, label)


def brute_character(space: SpaceSpec, D: int) -> CharacterSeries:
    """Trace of q^{-d} x^{h1_0} y^{h2_0} over the enumerated basis."""
    _check10(space)
    blocks, out = _frame(space, D, "ch " + space.label)
    for b in blocks:
        a, y = _weight_exponents(space, b.weight)
        for L in range(int(D - b.qdegree) + 1):
            out.add((norm_rational(b.qdegree + L), a, y), colored_partition_count(L, 3))
    return out


@lru_cache(maxsize=None)
def projector_matrix(lam_c: Fraction, level: int, part: str = "ker") -> tuple:
    """Matrix of eta_0 xi_0 (``ker``) or xi_0 eta_0 (``coker``) on c-oscillator states.

    Returns ``(basis, rows)`` where ``rows[k]`` maps basis indices to
    coefficients of the image of ``basis[k]``.
    """
    weight = (Fraction(0), Fraction(0), Fraction(0), Fraction(lam_c))
    basis = [FockBasisState(weight, tuple((3, k, p) for _, k, p in mono))
             for mono in _colored_monomials(level, 1)]
    index = {st: n for n, st in enumerate(basis)}
    first, second = ("xi", "eta") if part == "ker" else ("eta", "xi")
    rows = []
    for st in basis:
        v = fermion_mode(second, 0, fermion_mode(first, 0, FockVector.basis(st), SYS10), SYS10)
        row = {}
        for st2, c in v.items():
            if st2 not in index:
                raise ArithmeticError("projector left its graded piece")
            row[index[st2]] = c
        rows.append(row)
    return basis, tuple(rows)


@lru_cache(maxsize=None)
def _c_trace(lam_c: Fraction, level: int, part: str) -> int:
    _, rows = projector_matrix(lam_c, level, part)
    total = None
    for k, row in enumerate(rows):
        c = row.get(k)
        if c is not None:
            total = c if total is None else total + c
    if total is None:
        return 0
    val = total.ratq()
    if not val.is_laurent() or set(val.laurent_terms()) - {0}:
        raise ArithmeticError("projector trace is not a constant: {}".format(val.render()))
    t = val.laurent_terms().get(0, 0)
    if Fraction(t).denominator != 1:
        raise ArithmeticError("projector trace is not an integer: {}".format(t))
    return int(t)


def projected_character(space: SpaceSpec, part: str, D: int) -> CharacterSeries:
    """Character of Ker eta_0 (``part='ker'``) or Coker eta_0 (``'coker'``)."""
    _check10(space)
    part = part.lower()
    if part not in ("ker", "coker"):
        raise ValueError("part must be 'ker' or 'coker'")
    if not space.eta_defined():
        raise EtaUndefined("eta_0 is not defined on " + space.label)
    blocks, out = _frame(space, D, "ch {} {}".format(part.capitalize(), space.label))
    for b in blocks:
        a, y = _weight_exponents(space, b.weight)
        lam_c = b.weight[3]
        for L in range(int(D - b.qdegree) + 1):
            tr = 0
            for k in range(L + 1):
                tc = _c_trace(lam_c, k, part)
                if tc:
                    tr += colored_partition_count(L - k, 2) * tc
            out.add((norm_rational(b.qdegree + L), a, y), tr)
    return out


# ---------------------------------------------------------------------------
# closed forms


FORMULAS = ("fock", "ker", "coker", "coker10")


def _quad(s: int, t: int) -> Fraction:
    return Fraction(2 * s * s - 2 * s * t + t * t + t, 2)


def _lattice_terms(fid: str, alpha: Fraction, D: int):
    """Yield (exponent, x, y offset, sign) of the lattice sums, before 1/prod(1-q^n)^3."""
    B = 2 * D + 2 + int(abs(alpha)) + 1
    shell = []

    def emit(e, a, b, sgn, edge):
        if e <= D:
            if edge:
                shell.append((e, a, b))
            return [(e, a, b, sgn)]
        return []

    out = []
    for s, t in product(range(-B, B + 1), repeat=2):
        Q = _quad(s, t)
        if Q > D:
            continue
        edge_st = B in (abs(s), abs(t))
        if fid == "fock":
            out += emit(Q, 2 * s - t, -s, 1, edge_st)
            continue
        if fid == "coker10":
            al, xa = 0, 1
        else:
            al, xa = int(alpha), 0
        for l in range(B + 1):
            edge = edge_st or l == B
            low = t < al
            if fid == "ker":
                if low and l >= 1:
                    out += emit(Q + Fraction(l * (l - 1), 2) + l * (al - t), 2 * s - t, -s,
                                (-1) ** (l + 1), edge)
                elif not low:
                    out += emit(Q + Fraction(l * (l + 1), 2) - l * (al - t), 2 * s - t, -s,
                                (-1) ** l, edge)
            else:
                if low:
                    out += emit(Q + Fraction(l * (l - 1), 2) + l * (al - t), xa + 2 * s - t, -s,
                                (-1) ** l, edge)
                elif l >= 1:
                    out += emit(Q + Fraction(l * (l + 1), 2) - l * (al - t), xa + 2 * s - t, -s,
                                (-1) ** (l + 1), edge)
    if shell:
        raise EnumerationError("truncation shell is not empty: {}".format(shell[:3]))
    return out


def formula_character(fid: str, alpha, D: int) -> CharacterSeries:
    """Closed-form character to q-degree D.

    ``fid`` is one of :data:`FORMULAS`: the full Fock module F(alpha), the Ker
    and Coker parts of F(alpha) for integer alpha, and ``coker10`` for the
    module built on F((1,0)), which has no alpha.
    """
    alpha = Fraction(alpha)
    if fid not in FORMULAS:
        raise ValueError("unknown formula {!r}".format(fid))
    if fid in ("ker", "coker") and alpha.denominator != 1:
        raise ValueError("formula {} needs an integer alpha".format(fid))
    if fid == "coker10":
        qshift, ya = Fraction(0), Fraction(0)
    else:
        qshift, ya = -alpha * (alpha + 1) / 2, alpha
    out = CharacterSeries(D, {}, norm_rational(qshift), norm_rational(ya), "formula " + fid)
    for e, a, b, sgn in _lattice_terms(fid, alpha, D):
        for L in range(int(D - e) + 1):
            out.add((norm_rational(e + L), a, b), sgn * colored_partition_count(L, 3))
    return out


# ---------------------------------------------------------------------------
# comparison


@dataclass
class CompareResult:
    ok: bool
    monomial: tuple | None
    residual: dict
    window: int
    note: str = ""

    def render_monomial(self) -> str:
        if self.monomial is None:
            return "none"
        r, a, b = self.monomial
        return "q^({}) x^({}) y^({})".format(r, a, b)


def _absolute(S: CharacterSeries) -> dict:
    return {(S.qshift + r, a, S.yalpha + b): c for (r, a, b), c in S.terms.items()}


def compare(A: CharacterSeries, B: CharacterSeries) -> CompareResult:
    """Find the monomial m with A = m * B on the common q-window."""
    if A.D != B.D:
        raise ValueError("series have different degree cuts")
    if not A.terms or not B.terms:
        ok = not A.terms and not B.terms
        return CompareResult(ok, (0, 0, 0) if ok else None, {}, A.D,
                             "" if ok else "one series is empty")
    ra = min(k[0] for k in A.terms)
    rb = min(k[0] for k in B.terms)
    la = sorted(k for k in A.terms if k[0] == ra)
    lb = sorted(k for k in B.terms if k[0] == rb)
    shift_rel = ra - rb
    window = A.D - abs(shift_rel)
    ka, kb = la[0], lb[0]
    mono = (norm_rational(A.qshift + ka[0] - B.qshift - kb[0]), ka[1] - kb[1],
            norm_rational(A.yalpha + ka[2] - B.yalpha - kb[2]))
    absA = _absolute(A)
    lowA = A.qshift + ra
    shifted = {(k[0] + mono[0], k[1] + mono[1], k[2] + mono[2]): c
               for k, c in _absolute(B).items()}
    residual = {}
    for k in set(absA) | set(shifted):
        if k[0] - lowA > window:
            continue
        d = absA.get(k, 0) - shifted.get(k, 0)
        if d:
            residual[k] = d
    ok = not residual
    note = ""
    if not ok:
        first = min(residual)
        note = "first divergence at q^({}) x^({}) y^({})".format(*first)
    return CompareResult(ok, mono, residual, window, note)


# ---------------------------------------------------------------------------
# highest weights


@dataclass
class HighestWeightSolution:
    tag: str
    base: tuple
    directions: dict
    weight: tuple
    points: int = 0

    def render(self) -> str:
        par = ", ".join("{}: {}".format(k, tuple(str(x) for x in v))
                        for k, v in self.directions.items())
        w = ", ".join(_affine_str(c) for c in self.weight)
        return "{}: base {} directions {{{}}} weight ({})".format(
            self.tag, tuple(str(x) for x in self.base), par, w)


def _affine_str(c: tuple) -> str:
    const, lin = c
    if not lin:
        return str(const)
    term = {1: "alpha", -1: "-alpha"}.get(lin, "{}*alpha".format(lin))
    if not const:
        return term
    return "{}{}{}".format(const, "" if term.startswith("-") else "+", term)


_BETA = (Fraction(1), Fraction(1), Fraction(1), Fraction(0))


def _chart(u, v, w, beta=Fraction(0)) -> tuple:
    """Weight with h1 = u, h2 = v, lambda_c = w and lambda_b = beta."""
    return tuple(norm_rational(x) for x in (beta + u + v, beta + v, beta, w))


@lru_cache(maxsize=None)
def _chevalley_ops():
    from .algebra import CartanData, chevalley
    cd = CartanData(1, 0)
    return cd, [chevalley(cd, "e", i) for i in range(3)], [chevalley(cd, "t", i) for i in range(3)]


def _annihilated(weight: tuple) -> bool:
    _, es, _ = _chevalley_ops()
    v = FockVector.basis(FockBasisState(weight, ()))
    for e in es:
        try:
            if e.apply(v):
                return False
        except OffsetError:
            return False
    return True


def _cartan_weight(weight: tuple) -> tuple:
    """(lambda^0, lambda^1, lambda^2) read off from t_i = q^{h_i} on the vacuum."""
    _, _, ts = _chevalley_ops()
    st = FockBasisState(weight, ())
    out = []
    for t in ts:
        v = t.apply(FockVector.basis(st))
        (st2, c), = v.items()
        terms = c.ratq().laurent_terms() if st2 == st else {}
        if len(terms) != 1 or list(terms.values()) != [1]:
            raise ArithmeticError("vacuum is not a t-eigenvector")
        out.append(next(iter(terms)))
    return tuple(out)


def _solve_line(points: list):
    """Largest collinear subset (at least 3 points) as (base, direction, members)."""
    best = None
    for p1, p2 in ((a, b) for n, a in enumerate(points) for b in points[n + 1:]):
        d = tuple(y - x for x, y in zip(p1, p2))
        members = []
        for p in points:
            e = tuple(y - x for x, y in zip(p1, p))
            # p - p1 parallel to d: all 2x2 minors vanish
            if all(e[i] * d[j] == e[j] * d[i] for i in range(3) for j in range(i + 1, 3)):
                members.append(p)
        if len(members) >= 3 and (best is None or len(members) > len(best[2])):
            best = (p1, d, members)
    return best


def solve_highest_weights(grid=None, betas=(Fraction(0), Fraction(-1), Fraction(1, 2))) -> list:
    """Highest weight vacua |lambda> of sl-hat(2|1), found by scanning.

    The weight is scanned in the coordinates (h1, h2, lambda_c) over ``grid``
    (half-integers in [-3, 3] by default).  A point is kept when e_0, e_1 and
    e_2 all annihilate the vacuum; a mode that does not exist on the vacuum
    (non-integral offset) rejects the point.  Every kept point is re-checked
    at each of ``betas``.  The kept points are then split into affine families
    by exact collinearity and each family's (lambda^0, lambda^1, lambda^2) is
    fitted as an affine function of its parameter.
    """
    if grid is None:
        grid = [Fraction(k, 2) for k in range(-6, 7)]
    sols = []
    for u, v, w in product(grid, repeat=3):
        if not _annihilated(_chart(u, v, w)):
            continue
        for b in betas:
            if not _annihilated(_chart(u, v, w, Fraction(b))):
                raise ArithmeticError("highest weight condition depends on beta")
        sols.append((u, v, w))
    families = []
    rest = list(sols)
    while True:
        line = _solve_line(rest)
        if line is None:
            break
        families.append(line)
        rest = [p for p in rest if p not in line[2]]
    families += [(p, None, [p]) for p in rest]
    return [_family(base, d, members) for base, d, members in families]


def _family(base, d, members) -> HighestWeightSolution:
    if d is None:
        lam = _chart(*base)
        weight = tuple((x, 0) for x in _cartan_weight(lam))
        tag = {(0, 1, 0): "Lambda1", (0, 0, 1): "Lambda2"}.get(
            tuple(x for x, _ in weight), "point")
        return HighestWeightSolution(tag, lam, {"beta": _BETA}, weight, 1)
    # parametrize by alpha = -lambda_c, base at lambda_c = 0
    if d[2] == 0:
        raise ArithmeticError("unexpected family direction {}".format(d))
    step = tuple(x / -d[2] for x in d)
    t0 = base[2]
    origin = tuple(x + t0 * y for x, y in zip(base, step))
    lam0 = _chart(*origin)
    lam1 = _chart(*(x + y for x, y in zip(origin, step)))
    dirv = tuple(b - a for a, b in zip(lam0, lam1))
    # remove the beta direction so the first coordinate does not move
    k = dirv[0]
    dirv = tuple(norm_rational(x - k * y) for x, y in zip(dirv, _BETA))
    w0 = _cartan_weight(lam0)
    w1 = _cartan_weight(lam1)
    for p in members:
        a = -p[2]
        wp = _cartan_weight(_chart(*p))
        if any(x + a * (y - x) != z for x, y, z in zip(w0, w1, wp)):
            raise ArithmeticError("Cartan weight is not affine along the family")
    weight = tuple((x, norm_rational(y - x)) for x, y in zip(w0, w1))
    return HighestWeightSolution("generic-alpha", lam0, {"beta": _BETA, "alpha": dirv},
                                 weight, len(members))
