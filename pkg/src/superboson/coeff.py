"""Exact scalars: rational functions in q extended by formal phases.

Every structure constant in the bosonized algebra lives in the ring

    Q(q^(1/L)) [p^gamma, gamma in Q] / (p^1 = -1)

where ``p^gamma`` stands for ``exp(i*pi*gamma)``.  Fractional powers of q show
up as soon as a Fock weight is fractional (a factor ``q^lambda`` from a field
evaluated at a shifted point), so :class:`RatQ` carries its own root index L
and always reduces it to the smallest possible value.

Polynomial arithmetic is delegated to FLINT's ``fmpq_poly``.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Rational

import flint

__all__ = [
    "RatQ",
    "RatQSum",
    "Coeff",
    "CoeffError",
    "laurent",
    "qint",
    "qpow",
    "eval_at_q1",
    "as_coeff",
    "phase",
]


_FAST_RATIONAL = (int, Fraction)


def _is_rational(x) -> bool:
    return type(x) in _FAST_RATIONAL or isinstance(x, Rational)


class CoeffError(ArithmeticError):
    """Base error for coefficient arithmetic."""


class ZeroDivision(CoeffError, ZeroDivisionError):
    pass


class NotInvertible(CoeffError):
    pass


class PoleAtOne(CoeffError):
    pass


_P = flint.fmpq_poly
_ONE_POLY = _P([1])
_ZERO_POLY = _P([])


def _lowest(p):
    """Index of the lowest nonzero coefficient of ``p`` (p nonzero)."""
    for k, c in enumerate(p.coeffs()):
        if c != 0:
            return k
    raise ValueError("zero polynomial")


def _inflate(p, k):
    if k == 1:
        return p
    cs = p.coeffs()
    out = [0] * ((len(cs) - 1) * k + 1)
    out[::k] = cs
    return _P(out)


def _deflation(p):
    """Largest d with p in Q[x^d]; 0 for constants."""
    cs = p.coeffs()
    d = 0
    for k, c in enumerate(cs):
        if k and c != 0:
            d = gcd(d, k)
    return d


_LIFTS: dict = {}


class RatQ:
    """An element ``q^(shift/root) * num(t)/den(t)`` with ``t = q^(1/root)``.

    Canonical form: ``num`` and ``den`` coprime, neither divisible by t,
    ``den(0) == 1`` and ``root`` minimal.  Equality is therefore structural.
    """

    __slots__ = ("num", "den", "shift", "root", "_hash")

    def __init__(self, num, den=None, shift=0, root=1, *, _canonical=False):
        if _canonical:
            self.num, self.den, self.shift, self.root = num, den, shift, root
            self._hash = None
            return
        if den is None:
            den = _ONE_POLY
        if den.is_zero():
            raise ZeroDivision("zero denominator")
        self._set(*_normalize(num, den, shift, root))

    def _set(self, num, den, shift, root):
        self.num, self.den, self.shift, self.root = num, den, shift, root
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, c) -> "RatQ":
        c = Fraction(c)
        if c == 0:
            return ZERO
        return cls(_P([flint.fmpq(c.numerator, c.denominator)]), _ONE_POLY, 0, 1, _canonical=True)

    @classmethod
    def qpow(cls, e) -> "RatQ":
        e = Fraction(e)
        return cls(_ONE_POLY, _ONE_POLY, e.numerator, e.denominator, _canonical=True)

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_laurent(self) -> bool:
        return self.den.is_one()

    def is_one(self) -> bool:
        return self.shift == 0 and self.num.is_one() and self.den.is_one()

    # arithmetic ---------------------------------------------------------
    def _lift(self, root):
        if root == self.root:
            return self.num, self.den, self.shift
        key = (id(self), root)
        hit = _LIFTS.get(key)
        if hit is None or hit[0] is not self:
            k = root // self.root
            hit = (self, (_inflate(self.num, k), _inflate(self.den, k), self.shift * k))
            if len(_LIFTS) > 50000:
                _LIFTS.clear()
            _LIFTS[key] = hit
        return hit[1]

    def __add__(self, other):
        if not isinstance(other, RatQ):
            if _is_rational(other):
                other = RatQ.const(other)
            else:
                return NotImplemented
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.root == other.root:
            r = self.root
            n1, d1, s1 = self.num, self.den, self.shift
            n2, d2, s2 = other.num, other.den, other.shift
        else:
            r = self.root * other.root // gcd(self.root, other.root)
            n1, d1, s1 = self._lift(r)
            n2, d2, s2 = other._lift(r)
        if d1.is_one() and d2.is_one():
            if s1 == s2:
                num = n1 + n2
                if num.is_zero():
                    return ZERO
                if num[0] == 0:
                    return _finish_laurent(num, s1, r)
            elif s1 < s2:
                num = n1 + n2.left_shift(s2 - s1)
            else:
                num = n2 + n1.left_shift(s1 - s2)
                s1 = s2
            return _finish_laurent(num, s1, r, stripped=True)
        s = min(s1, s2)
        if s1 > s:
            n1 = n1.left_shift(s1 - s)
        if s2 > s:
            n2 = n2.left_shift(s2 - s)
        if d1 == d2:
            num = n1 + n2
            den = d1
            if num.is_zero():
                return ZERO
            if den.is_one():
                return _finish_laurent(num, s, r)
            return RatQ(num, den, s, r)
        return RatQ(n1 * d2 + n2 * d1, d1 * d2, s, r)

    __radd__ = __add__

    def __neg__(self):
        if self.num.is_zero():
            return self
        return RatQ(-self.num, self.den, self.shift, self.root, _canonical=True)

    def __sub__(self, other):
        if not isinstance(other, RatQ):
            if _is_rational(other):
                other = RatQ.const(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, RatQ):
            if _is_rational(other):
                c = Fraction(other)
                if c == 0:
                    return ZERO
                return RatQ(self.num * flint.fmpq(c.numerator, c.denominator), self.den,
                            self.shift, self.root, _canonical=True)
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        if self.root == other.root:
            r = self.root
            n1, d1, s1 = self.num, self.den, self.shift
            n2, d2, s2 = other.num, other.den, other.shift
        elif other.root == 1 and other.shift == 0 and other.den.is_one() and other.num.degree() == 0:
            return RatQ(self.num * other.num, self.den, self.shift, self.root, _canonical=True)
        elif self.root == 1 and self.shift == 0 and self.den.is_one() and self.num.degree() == 0:
            return RatQ(other.num * self.num, other.den, other.shift, other.root, _canonical=True)
        else:
            r = self.root * other.root // gcd(self.root, other.root)
            n1, d1, s1 = self._lift(r)
            n2, d2, s2 = other._lift(r)
        if d1.is_one() and d2.is_one():
            return _finish_laurent(n1 * n2, s1 + s2, r, stripped=True)
        if not d2.is_one():
            g = n1.gcd(d2)
            if not g.is_one():
                n1, d2 = n1 // g, d2 // g
        if not d1.is_one():
            g = n2.gcd(d1)
            if not g.is_one():
                n2, d1 = n2 // g, d1 // g
        num = n1 * n2
        den = d1 * d2
        c = den.coeffs()[0]
        if c != 1:
            num = num / c
            den = den / c
        return RatQ(num, den, s1 + s2, r, _canonical=True)

    __rmul__ = __mul__

    def inverse(self) -> "RatQ":
        if self.num.is_zero():
            raise ZeroDivision("division by zero in Q(q)")
        return RatQ(self.den, self.num, -self.shift, self.root)

    def __truediv__(self, other):
        if not isinstance(other, RatQ):
            if _is_rational(other):
                other = RatQ.const(other)
            else:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return RatQ.const(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # comparison ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, RatQ):
            if _is_rational(other):
                other = RatQ.const(other)
            else:
                return NotImplemented
        if self.root == other.root:
            return (self.shift == other.shift and self.num == other.num
                    and self.den == other.den)
        r = self.root * other.root // gcd(self.root, other.root)
        return self._lift(r) == other._lift(r)

    def minimal(self) -> "RatQ":
        """The same element with the smallest possible root index."""
        num, den, shift, root = _normalize(self.num, self.den, self.shift, self.root)
        if root == self.root:
            return self
        return RatQ(num, den, shift, root, _canonical=True)

    def __hash__(self):
        if self._hash is None:
            m = self.minimal()
            self._hash = hash((m.shift, m.root, tuple(m.num.coeffs()),
                               tuple(m.den.coeffs())))
        return self._hash

    # inspection ---------------------------------------------------------
    def laurent_terms(self) -> dict:
        """Map exponent -> Fraction; only valid for Laurent elements."""
        if not self.den.is_one():
            raise CoeffError("not a Laurent polynomial")
        return _poly_terms(self.num, self.shift, self.root)

    def eval_at_q1(self) -> Fraction:
        dv = self.den(1)
        if dv == 0:
            raise PoleAtOne("pole at q=1")
        v = self.num(1) / dv
        return Fraction(int(v.p), int(v.q))

    def render(self) -> str:
        return "({})/({})".format(_render_poly(self.num, self.shift, self.root),
                                  _render_poly(self.den, 0, self.root))

    def __repr__(self):
        return "RatQ{}".format(self.render())

    __str__ = render


def _poly_terms(p, shift, root):
    out = {}
    for k, c in enumerate(p.coeffs()):
        if c != 0:
            out[Fraction(shift + k, root)] = Fraction(int(c.p), int(c.q))
    return out


def _render_exp(e: Fraction) -> str:
    if e.denominator == 1:
        return "q^{}".format(e.numerator)
    return "q^({})".format(e)


def _render_poly(p, shift, root) -> str:
    terms = sorted(_poly_terms(p, shift, root).items())
    if not terms:
        return "0"
    parts = []
    for idx, (e, c) in enumerate(terms):
        neg = c < 0
        a = -c if neg else c
        if e == 0:
            body = str(a)
        elif a == 1:
            body = _render_exp(e)
        else:
            body = "{}*{}".format(a, _render_exp(e))
        if idx == 0:
            parts.append("-" + body if neg else body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def _finish_laurent(num, shift, root, stripped=False):
    """Canonicalize a Laurent element (denominator one)."""
    if num.is_zero():
        return ZERO
    if not stripped:
        k = _lowest(num)
        if k:
            num = num.right_shift(k)
            shift += k
    # the root is left as is; equality and hashing reduce it when needed
    return RatQ(num, _ONE_POLY, shift, root, _canonical=True)


def _normalize(num, den, shift, root):
    if num.is_zero():
        return _ZERO_POLY, _ONE_POLY, 0, 1
    k = _lowest(num)
    if k:
        num = num.right_shift(k)
        shift += k
    k = _lowest(den)
    if k:
        den = den.right_shift(k)
        shift -= k
    if not den.is_one():
        g = num.gcd(den)
        if not g.is_one():
            num = num // g
            den = den // g
        c = den.coeffs()[0]
        if c != 1:
            num = num / c
            den = den / c
    if root > 1:
        d = gcd(gcd(root, shift), gcd(_deflation(num), _deflation(den)))
        if d > 1:
            num = _P(num.coeffs()[::d])
            den = _P(den.coeffs()[::d])
            shift //= d
            root //= d
    return num, den, shift, root


ZERO = RatQ(_ZERO_POLY, _ONE_POLY, 0, 1, _canonical=True)
ONE = RatQ(_ONE_POLY, _ONE_POLY, 0, 1, _canonical=True)


class RatQSum:
    """Accumulates products of RatQ values and normalizes once.

    Terms are kept unreduced, bucketed by root and denominator, so a long
    sum costs one gcd per distinct denominator instead of one per term.
    """

    __slots__ = ("_buckets",)

    def __init__(self):
        self._buckets = {}  # root -> list of [den, num, shift]

    def add_product(self, x: RatQ, y: RatQ) -> None:
        if x.root == y.root:
            r = x.root
            n1, d1, s1 = x.num, x.den, x.shift
            n2, d2, s2 = y.num, y.den, y.shift
        else:
            r = x.root * y.root // gcd(x.root, y.root)
            n1, d1, s1 = x._lift(r)
            n2, d2, s2 = y._lift(r)
        if d1.is_one():
            den = d2
        elif d2.is_one():
            den = d1
        else:
            den = d1 * d2
        self._push(r, den, n1 * n2, s1 + s2)

    def add(self, x: RatQ) -> None:
        if x.num.is_zero():
            return
        self._push(x.root, x.den, x.num, x.shift)

    def _push(self, r, den, num, s):
        bucket = self._buckets.get(r)
        if bucket is None:
            self._buckets[r] = [[den, num, s]]
            return
        for b in bucket:
            if b[0] is den or b[0] == den:
                s0 = b[2]
                if s == s0:
                    b[1] = b[1] + num
                elif s > s0:
                    b[1] = b[1] + num.left_shift(s - s0)
                else:
                    b[1] = num + b[1].left_shift(s0 - s)
                    b[2] = s
                return
        bucket.append([den, num, s])

    def value(self) -> RatQ:
        total = ZERO
        for r, bucket in self._buckets.items():
            parts = [b for b in bucket if not b[1].is_zero()]
            if not parts:
                continue
            s = min(b[2] for b in parts)
            D, N = None, None
            for den, num, s0 in parts:
                if s0 > s:
                    num = num.left_shift(s0 - s)
                if D is None:
                    D, N = den, num
                elif den == D:
                    N = N + num
                else:
                    g = D.gcd(den)
                    N = N * (den // g) + num * (D // g)
                    D = D * (den // g)
            if N.is_zero():
                continue
            if D.is_one():
                total = total + _finish_laurent(N, s, r)
            else:
                total = total + RatQ(N, D, s, r)
        return total


def laurent(terms: dict) -> RatQ:
    """Build a Laurent polynomial from ``{exponent: coefficient}``."""
    out = ZERO
    for e, c in terms.items():
        if c:
            out = out + RatQ.qpow(e) * Fraction(c)
    return out


def qpow(e) -> RatQ:
    return RatQ.qpow(e)


_QINT_CACHE: dict = {}


def qint(m: int) -> RatQ:
    """The q-integer [m] = (q^m - q^-m)/(q - q^-1) as a Laurent polynomial."""
    try:
        return _QINT_CACHE[m]
    except KeyError:
        pass
    a = abs(m)
    if a == 0:
        val = ZERO
    else:
        # q^(a-1) + q^(a-3) + ... + q^(1-a): coefficients on even offsets
        cs = [0] * (2 * a - 1)
        cs[::2] = [1] * a
        val = RatQ(_P(cs), _ONE_POLY, 1 - a, 1, _canonical=True)
        if m < 0:
            val = -val
    _QINT_CACHE[m] = val
    return val


def eval_at_q1(x) -> Fraction:
    """Classical limit of an element of Q(q) (or a phase-free Coeff)."""
    if isinstance(x, Coeff):
        x = x.ratq()
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    return x.eval_at_q1()


# ---------------------------------------------------------------------------
# Phases and the full coefficient ring


def _reduce_phase(g: Fraction):
    """Return (sign, gamma') with p^g = sign * p^gamma', 0 <= gamma' < 1."""
    k = g.numerator // g.denominator  # floor
    r = g - k
    return (-1 if k % 2 else 1), (r if r else 0)


_F0 = 0  # phase key for the trivial phase; an int hashes fast


class Coeff:
    """Finite sum of ``p^gamma * RatQ`` with 0 <= gamma < 1.

    Multiplication reduces phases with p^1 = -1.  Only single-term
    elements are invertible.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        self.terms = terms if terms is not None else {}
        self._hash = None

    @classmethod
    def from_ratq(cls, x: RatQ) -> "Coeff":
        if x.is_zero():
            return cls({})
        return cls({_F0: x})

    @classmethod
    def scalar(cls, c) -> "Coeff":
        if isinstance(c, Coeff):
            return c
        if isinstance(c, RatQ):
            return cls.from_ratq(c)
        return cls.from_ratq(RatQ.const(c))

    @classmethod
    def phase(cls, gamma) -> "Coeff":
        sign, g = _reduce_phase(Fraction(gamma))
        return cls({g: RatQ.const(sign)})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def ratq(self) -> RatQ:
        """The RatQ value of a phase-free element."""
        if not self.terms:
            return ZERO
        if len(self.terms) == 1 and _F0 in self.terms:
            return self.terms[_F0]
        raise CoeffError("coefficient carries a nontrivial phase: {}".format(self.render()))

    def is_phase_free(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _F0 in self.terms)

    def __add__(self, other):
        if not isinstance(other, Coeff):
            other = Coeff.scalar(other)
        a, b = self.terms, other.terms
        if not b:
            return self
        if not a:
            return other
        if len(a) == 1 and len(b) == 1:
            x = a.get(_F0)
            y = b.get(_F0)
            if x is not None and y is not None:
                v = x + y
                return Coeff({_F0: v}) if v.num else Coeff({})
        out = dict(self.terms)
        for g, x in other.terms.items():
            y = out.get(g)
            if y is None:
                out[g] = x
            else:
                s = y + x
                if s.is_zero():
                    del out[g]
                else:
                    out[g] = s
        return Coeff(out)

    __radd__ = __add__

    def __neg__(self):
        return Coeff({g: -x for g, x in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Coeff):
            other = Coeff.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return Coeff.scalar(other) - self

    def __mul__(self, other):
        if not isinstance(other, Coeff):
            if isinstance(other, RatQ):
                if other.is_zero():
                    return Coeff({})
                return Coeff({g: x * other for g, x in self.terms.items()})
            if _is_rational(other):
                if other == 0:
                    return Coeff({})
                return Coeff({g: x * other for g, x in self.terms.items()})
            return NotImplemented
        a, b = self.terms, other.terms
        if not a or not b:
            return Coeff({})
        if len(a) == 1 and len(b) == 1:
            (g1, x1), = a.items()
            (g2, x2), = b.items()
            if g1 == 0 and g2 == 0:
                return Coeff({_F0: x1 * x2})
        out: dict = {}
        for g1, x1 in a.items():
            for g2, x2 in b.items():
                g = g1 + g2
                v = x1 * x2
                if g >= 1:
                    g -= 1
                    v = -v
                if not g:
                    g = 0
                y = out.get(g)
                if y is None:
                    out[g] = v
                else:
                    s = y + v
                    if s.is_zero():
                        del out[g]
                    else:
                        out[g] = s
        return Coeff(out)

    __rmul__ = __mul__

    def inverse(self) -> "Coeff":
        if not self.terms:
            raise ZeroDivision("division by zero coefficient")
        if len(self.terms) != 1:
            raise NotInvertible("only single-phase coefficients are invertible: " + self.render())
        (g, x), = self.terms.items()
        inv = x.inverse()
        if g == 0:
            return Coeff({_F0: inv})
        # p^-g = -p^(1-g)
        return Coeff({1 - g: -inv})

    def __truediv__(self, other):
        if not isinstance(other, Coeff):
            other = Coeff.scalar(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Coeff.scalar(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = Coeff.scalar(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Coeff):
            try:
                other = Coeff.scalar(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def normalize(self) -> "Coeff":
        """Re-canonicalize (idempotent; values are always canonical)."""
        out = Coeff({})
        for g, x in self.terms.items():
            out = out + Coeff.phase(g) * x
        return out

    def render(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join("[p^({})] {}".format(g, self.terms[g].render())
                          for g in sorted(self.terms))

    def __repr__(self):
        return "Coeff({})".format(self.render())

    __str__ = render


def as_coeff(x) -> Coeff:
    return Coeff.scalar(x)


def phase(gamma) -> Coeff:
    """The formal unit p^gamma = exp(i*pi*gamma)."""
    return Coeff.phase(gamma)
