"""Level-zero evaluation modules V_z and V_z^{*a}, the graded Hopf structure
and the duality pairing.

Vectors live in tensor powers of evaluation modules.  A basis key is an
:class:`EvalKey` ``((i_1, ..., i_k), (n_1, ..., n_k))`` standing for
``v_{i_1} z_1^{n_1} (x) ... (x) v_{i_k} z_k^{n_k}``; each tensor factor has
its own formal spectral variable.  Vectors reuse :class:`FockVector` as a
generic sparse container.

Operators acting on one tensor factor obey the Koszul rule: an operator of
parity p on factor k picks up (-1)^{p * (|v_1| + ... + |v_{k-1}|)}.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .algebra import (Backend, CartanData, LinComb, Op, Product, ScalarOp,
                      expand_words)
from .boson import FockVector
from .coeff import Coeff, RatQ, qint, qpow

__all__ = [
    "EvalKey",
    "EvalMatrix",
    "MatrixOp",
    "EvalBackend",
    "CoproductBackend",
    "eval_vector",
    "eval_chevalley",
    "eval_drinfeld",
    "coproduct",
    "coproduct_apply",
    "antipode",
    "pairing",
    "pairing_check",
    "op_matrix",
    "tensor_basis",
    "antipode_word",
    "verify_eval_relations",
]


class EvalKey(tuple):
    """Basis key ((indices), (z powers)) of a tensor of evaluation modules."""

    __slots__ = ()

    def __new__(cls, idx: Sequence[int], zp: Sequence[int]):
        return tuple.__new__(cls, (tuple(idx), tuple(zp)))

    @property
    def idx(self) -> tuple:
        return self[0]

    @property
    def zp(self) -> tuple:
        return self[1]

    def render(self, system=None) -> str:
        parts = []
        for k, (i, n) in enumerate(zip(self[0], self[1])):
            z = "z{}".format(k + 1) if len(self[0]) > 1 else "z"
            parts.append("v{}".format(i) + ("" if n == 0 else " {}^{}".format(z, n)))
        return " (x) ".join(parts)


def eval_vector(*indices: int, zpowers: Sequence[int] | None = None, c=1) -> FockVector:
    """The basis vector v_{i_1} (x) ... with the given z powers (default 0)."""
    zp = tuple(zpowers) if zpowers is not None else (0,) * len(indices)
    if len(zp) != len(indices):
        raise ValueError("one z power per tensor factor is required")
    return FockVector.basis(EvalKey(indices, zp), c)


class EvalMatrix:
    """A sparse (M+N+2)x(M+N+2) matrix with entries Laurent polynomials in z.

    ``entries[(r, c)]`` maps a z exponent to a :class:`Coeff`.  Indices run
    from 1.
    """

    def __init__(self, size: int, entries: dict | None = None, parity: int = 0):
        self.size = size
        self.parity = parity
        self.entries: dict = {}
        for rc, poly in (entries or {}).items():
            clean = {d: Coeff.scalar(c) for d, c in poly.items() if c}
            clean = {d: c for d, c in clean.items() if c}
            if clean:
                self.entries[rc] = clean

    @classmethod
    def unit(cls, size: int, r: int, c: int, coeff=1, zpow: int = 0, parity: int = 0):
        return cls(size, {(r, c): {zpow: coeff}}, parity)

    @classmethod
    def diagonal_qpow(cls, size: int, exps: dict) -> "EvalMatrix":
        """q^{sum_k e_k E_kk}; unlisted diagonal entries are 1."""
        return cls(size, {(k, k): {0: qpow(exps.get(k, 0))} for k in range(1, size + 1)})

    @classmethod
    def identity(cls, size: int) -> "EvalMatrix":
        return cls.diagonal_qpow(size, {})

    def column(self, c: int):
        for (r, cc), poly in self.entries.items():
            if cc == c:
                yield r, poly

    def __add__(self, other: "EvalMatrix") -> "EvalMatrix":
        out = {rc: dict(p) for rc, p in self.entries.items()}
        for rc, poly in other.entries.items():
            tgt = out.setdefault(rc, {})
            for d, c in poly.items():
                tgt[d] = tgt.get(d, Coeff.scalar(0)) + c
        return EvalMatrix(self.size, out, self.parity)

    def scale(self, c) -> "EvalMatrix":
        c = Coeff.scalar(c)
        return EvalMatrix(self.size, {rc: {d: x * c for d, x in p.items()}
                                      for rc, p in self.entries.items()}, self.parity)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other: "EvalMatrix") -> "EvalMatrix":
        out: dict = {}
        for (r, k), p in self.entries.items():
            for (k2, c), p2 in other.entries.items():
                if k != k2:
                    continue
                tgt = out.setdefault((r, c), {})
                for d1, x1 in p.items():
                    for d2, x2 in p2.items():
                        tgt[d1 + d2] = tgt.get(d1 + d2, Coeff.scalar(0)) + x1 * x2
        return EvalMatrix(self.size, out, (self.parity + other.parity) % 2)

    def __eq__(self, other):
        if not isinstance(other, EvalMatrix):
            return NotImplemented
        return self.size == other.size and self.entries == other.entries

    def __hash__(self):
        return hash(tuple(sorted((rc, tuple(sorted(p.items()))) for rc, p in self.entries.items())))

    def is_zero(self) -> bool:
        return not self.entries

    def render(self) -> str:
        if not self.entries:
            return "0"
        lines = []
        for (r, c) in sorted(self.entries):
            poly = self.entries[(r, c)]
            terms = ["({}){}".format(x.render(), "" if d == 0 else " z^{}".format(d))
                     for d, x in sorted(poly.items())]
            lines.append("E[{},{}]: {}".format(r, c, " + ".join(terms)))
        return "\n".join(lines)

    def __repr__(self):
        return "EvalMatrix({})".format(self.render().replace("\n", "; "))


class MatrixOp(Op):
    """An evaluation matrix acting on tensor factor ``factor`` of a vector."""

    def __init__(self, cd: CartanData, mat: EvalMatrix, factor: int = 0, label: str = "",
                 key=None):
        self.cd = cd
        self.mat = mat
        self.factor = factor
        self.parity = mat.parity
        self.label = label or "M"
        self.key = ("mat", factor, key if key is not None else id(mat))
        self._cols: dict = {}
        for (r, c), poly in mat.entries.items():
            self._cols.setdefault(c, []).append((r, tuple(poly.items())))

    def apply(self, v: FockVector) -> FockVector:
        out = FockVector()
        k = self.factor
        vp = self.cd.vector_parity
        for key, coeff in v.terms.items():
            idx, zp = key
            col = self._cols.get(idx[k])
            if not col:
                continue
            if self.parity and sum(vp(i) for i in idx[:k]) % 2:
                coeff = -coeff
            for r, poly in col:
                nidx = idx[:k] + (r,) + idx[k + 1:]
                for d, x in poly:
                    nz = zp[:k] + (zp[k] + d,) + zp[k + 1:]
                    out.add_term(EvalKey(nidx, nz), coeff * x)
        return out


def _check_node(cd: CartanData, i: int, lo: int) -> None:
    if not lo <= i <= cd.M + cd.N + 1:
        raise IndexError("node {} out of range".format(i))


def eval_chevalley(cd: CartanData, g: str, i: int, dual: bool = False) -> EvalMatrix:
    """Chevalley generator ``g`` in {'e','f','t','tinv'} on V_z or V_z^{*a}."""
    _check_node(cd, i, 0)
    L = cd.size
    nu = cd.nu
    par = cd.parity(i) if g in ("e", "f") else 0
    if g in ("t", "tinv"):
        s = 1 if g == "t" else -1
        d = -1 if dual else 1
        if i == 0:
            return EvalMatrix.diagonal_qpow(L, {1: -s * d, L: -s * d})
        return EvalMatrix.diagonal_qpow(L, {i: s * d * nu(i), i + 1: -s * d * nu(i + 1)})
    if g not in ("e", "f"):
        raise ValueError("unknown Chevalley generator {!r}".format(g))
    if not dual:
        if i == 0:
            if g == "e":
                return EvalMatrix.unit(L, L, 1, -1, 1, par)
            return EvalMatrix.unit(L, 1, L, 1, -1, par)
        if g == "e":
            return EvalMatrix.unit(L, i, i + 1, 1, 0, par)
        return EvalMatrix.unit(L, i + 1, i, nu(i), 0, par)
    if i == 0:
        if g == "e":
            return EvalMatrix.unit(L, 1, L, qpow(1), 1, par)
        return EvalMatrix.unit(L, L, 1, qpow(-1), -1, par)
    if g == "e":
        return EvalMatrix.unit(L, i + 1, i, -nu(i) * nu(i + 1) * qpow(-nu(i)), 0, par)
    return EvalMatrix.unit(L, i, i + 1, -nu(i) * qpow(nu(i)), 0, par)


def eval_drinfeld(cd: CartanData, kind: str, i: int, m: int = 0, dual: bool = False) -> EvalMatrix:
    """Drinfeld generator on V_z or V_z^{*a}.

    ``kind`` is one of 'X+', 'X-', 'h' (mode m != 0), 'K' (m is the power
    of K^i, default 1).
    """
    if not 1 <= i <= cd.M + cd.N + 1:
        raise IndexError("node {} out of range".format(i))
    L = cd.size
    nu, mu = cd.nu, cd.mu
    d = -1 if dual else 1
    if kind == "K":
        e = m if m else 1
        return EvalMatrix.diagonal_qpow(L, {i: e * d * nu(i), i + 1: -e * d * nu(i + 1)})
    loop = qpow(d * mu(i) * m)  # (q^{+-mu_i} z)^m without the z
    if kind == "h":
        if m == 0:
            raise ValueError("h^i_0 is not a generator; use K^i")
        pre = qint(m) * Fraction(d, m) * loop
        return EvalMatrix(L, {
            (i, i): {m: pre * nu(i) * qpow(-d * nu(i) * m)},
            (i + 1, i + 1): {m: -pre * nu(i + 1) * qpow(d * nu(i + 1) * m)},
        })
    par = cd.parity(i)
    if kind == "X+":
        if not dual:
            return EvalMatrix.unit(L, i, i + 1, loop, m, par)
        return EvalMatrix.unit(L, i + 1, i, -nu(i) * nu(i + 1) * qpow(-nu(i)) * loop, m, par)
    if kind == "X-":
        if not dual:
            return EvalMatrix.unit(L, i + 1, i, nu(i) * loop, m, par)
        return EvalMatrix.unit(L, i, i + 1, -nu(i) * qpow(nu(i)) * loop, m, par)
    raise ValueError("unknown Drinfeld generator kind {!r}".format(kind))


class EvalBackend(Backend):
    """Generators on one factor of a tensor of evaluation modules (gamma = 1)."""

    def __init__(self, cd: CartanData, dual: bool = False, factor: int = 0):
        super().__init__(cd)
        self.dual = dual
        self.factor = factor
        self._cache: dict = {}

    def _op(self, key, build, label):
        op = self._cache.get(key)
        if op is None:
            op = MatrixOp(self.cd, build(), self.factor, label, key=(self.dual,) + key)
            self._cache[key] = op
        return op

    def X(self, i, sign, m):
        m = int(m)
        return self._op(("X", sign, i, m),
                        lambda: eval_drinfeld(self.cd, "X" + sign, i, m, self.dual),
                        "X{}{}_{}".format(sign, i, m))

    def h(self, i, m):
        return self._op(("h", i, m), lambda: eval_drinfeld(self.cd, "h", i, m, self.dual),
                        "h{}_{}".format(i, m))

    def K(self, i, e=1):
        return self._op(("K", i, e), lambda: eval_drinfeld(self.cd, "K", i, e, self.dual),
                        "K{}^{}".format(i, e))

    def chev(self, g, i):
        return self._op(("c", g, i), lambda: eval_chevalley(self.cd, g, i, self.dual),
                        "{}{}".format(g, i))

    def gamma(self, e):
        return RatQ.const(1)


def coproduct(cd: CartanData, g: str, i: int, duals: tuple = (False, False)) -> Op:
    """Delta(g_i) acting on a two-fold tensor product of evaluation modules."""
    b0 = EvalBackend(cd, duals[0], 0)
    b1 = EvalBackend(cd, duals[1], 1)
    if g == "e":
        return LinComb([(1, b0.chev("e", i)),
                        (1, Product([b0.chev("t", i), b1.chev("e", i)]))],
                       "D(e{})".format(i))
    if g == "f":
        return LinComb([(1, Product([b0.chev("f", i), b1.chev("tinv", i)])),
                        (1, b1.chev("f", i))], "D(f{})".format(i))
    if g in ("t", "tinv"):
        return Product([b0.chev(g, i), b1.chev(g, i)])
    raise ValueError("unknown Chevalley generator {!r}".format(g))


def coproduct_apply(cd: CartanData, g: str, i: int, v: FockVector,
                    duals: tuple = (False, False)) -> FockVector:
    """Apply Delta(g_i) with the graded sign rule to a vector of V (x) W."""
    return coproduct(cd, g, i, duals).apply(v)


class CoproductBackend(Backend):
    """Chevalley generators acting through Delta on V (x) W."""

    def __init__(self, cd: CartanData, duals: tuple = (False, False)):
        super().__init__(cd)
        self.duals = duals
        self._cache: dict = {}

    def chev(self, g, i):
        key = (g, i)
        if key not in self._cache:
            self._cache[key] = coproduct(self.cd, g, i, self.duals)
        return self._cache[key]

    def gamma(self, e):
        return RatQ.const(1)


# ---------------------------------------------------------------------------
# antipode and pairing


def antipode(cd: CartanData, g: str, i: int) -> EvalMatrix:
    """a(g_i) as a matrix on V_z: a(e) = -t^{-1} e, a(f) = -f t, a(t) = t^{-1}."""
    ch = lambda x: eval_chevalley(cd, x, i)
    if g == "e":
        return -(ch("tinv") @ ch("e"))
    if g == "f":
        return -(ch("f") @ ch("t"))
    if g == "t":
        return ch("tinv")
    if g == "tinv":
        return ch("t")
    raise ValueError("unknown Chevalley generator {!r}".format(g))


def _parity(cd: CartanData, g: str, i: int) -> int:
    return cd.parity(i) if g in ("e", "f") else 0


def antipode_word(cd: CartanData, word: Sequence[tuple]) -> EvalMatrix:
    """a(x_1 x_2 ... x_k) via the graded anti-automorphism property.

    ``word`` lists (g, i) pairs, leftmost factor first.
    """
    if not word:
        return EvalMatrix.identity(cd.size)
    if len(word) == 1:
        return antipode(cd, *word[0])
    head, rest = word[0], word[1:]
    p_head = _parity(cd, *head)
    p_rest = sum(_parity(cd, *w) for w in rest) % 2
    out = antipode_word(cd, rest) @ antipode(cd, *head)
    return -out if (p_head and p_rest) else out


def _word_matrix(cd: CartanData, word: Sequence[tuple], dual: bool) -> EvalMatrix:
    out = EvalMatrix.identity(cd.size)
    for g, i in word:
        out = out @ eval_chevalley(cd, g, i, dual)
    return out


def pairing(u: FockVector, w: FockVector) -> Coeff:
    """<u, w> for u in V_z^* and w in V_z: <v*_i z^m, v_j z^n> = d_ij d_{m+n,0}."""
    total = Coeff.scalar(0)
    for ku, cu in u.terms.items():
        for kw, cw in w.terms.items():
            if ku.idx == kw.idx and all(a + b == 0 for a, b in zip(ku.zp, kw.zp)):
                total = total + cu * cw
    return total


def pairing_check(cd: CartanData, x, i: int | None = None, j: int | None = None) -> bool:
    """Check <x v*_i, v_j> = <v*_i, (-1)^{|x||v*_i|} a(x) v_j>.

    ``x`` is a generator name with its node, e.g. ``('e', 1)``, or a tuple
    of such pairs for a product.  Without ``i``/``j`` all pairs are checked;
    all z powers are covered since both sides are Laurent polynomials.
    """
    word = (x,) if isinstance(x[0], str) else tuple(x)
    px = sum(_parity(cd, *w) for w in word) % 2
    D = _word_matrix(cd, word, True)
    A = antipode_word(cd, word)
    L = cd.size
    ii = [i] if i is not None else range(1, L + 1)
    jj = [j] if j is not None else range(1, L + 1)
    for a in ii:
        sign = -1 if (px and cd.vector_parity(a)) else 1
        for b in jj:
            lhs = D.entries.get((b, a), {})
            rhs = {d: c * sign for d, c in A.entries.get((a, b), {}).items()}
            if lhs != rhs:
                return False
    return True


def op_matrix(cd: CartanData, op: Op) -> EvalMatrix:
    """Matrix of a single-factor operator, read off from its columns at z^0."""
    L = cd.size
    entries: dict = {}
    for c in range(1, L + 1):
        out = op.apply(eval_vector(c))
        for key, x in out.terms.items():
            entries.setdefault((key.idx[0], c), {})[key.zp[0]] = x
    return EvalMatrix(L, entries, op.parity)


def tensor_basis(cd: CartanData, factors: int) -> list:
    """All v_{i_1} (x) ... (x) v_{i_k} at z powers zero."""
    from itertools import product as _prod
    L = cd.size
    return [eval_vector(*idx) for idx in _prod(range(1, L + 1), repeat=factors)]


def verify_eval_relations(cd: CartanData, rels: Iterable[str] | None = None, mode_bound: int = 2,
                          dual: bool = False, coproduct_duals: tuple | None = None) -> list:
    """Check relations as exact matrix identities on evaluation modules.

    With ``coproduct_duals`` set, the Chevalley generators act through the
    coproduct on a two-fold tensor product; otherwise on V_z (or V_z^{*a}).
    Returns :class:`CheckRecord` objects in catalogue order.
    """
    from .algebra import CheckRecord, relation_catalogue, verify_batch
    if coproduct_duals is not None:
        backend = CoproductBackend(cd, coproduct_duals)
        vectors = tensor_basis(cd, 2)
    else:
        backend = EvalBackend(cd, dual)
        vectors = tensor_basis(cd, 1)
    insts, skipped = relation_catalogue(cd, rels, mode_bound, backend)
    labels = [next(iter(v.terms)).render() for v in vectors]
    recs = verify_batch(insts, vectors, None, labels)
    recs += [CheckRecord(s, "skipped", notes=why) for s, why in skipped]
    return recs
