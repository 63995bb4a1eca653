"""Exact truncated q/z series over the cyclotomic field Q(zeta_24).

A ``JacobiSeries`` stores finitely many terms ``c * q^n * z^l`` with ``n`` a
rational number whose denominator divides 24 and ``l`` an integer.  Every
coefficient with q-exponent below ``trunc`` is exact; nothing at or beyond
``trunc`` is known.  Internally q-exponents are kept as integers in units of
1/24 so that all bookkeeping is integer arithmetic.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Mapping, Tuple, Union

DEGREE = 8
CONDUCTOR = 24
QUNIT = 24  # internal q-exponents are integers in units of 1/QUNIT
DEFAULT_TRUNC = Fraction(6)
DEFAULT_TOL = 1e-6

_ZETA = cmath.exp(2j * math.pi / CONDUCTOR)
_ZETA_POWERS = [_ZETA**k for k in range(DEGREE)]


class SeriesError(ValueError):
    """Raised for invalid series operations."""


def _reduce_poly(c: list) -> list:
    # x^8 = x^4 - 1 modulo the 24th cyclotomic polynomial x^8 - x^4 + 1
    for k in range(len(c) - 1, DEGREE - 1, -1):
        a = c[k]
        if a:
            c[k - 4] += a
            c[k - 8] -= a
        c[k] = 0
    return c[:DEGREE]


class CycNum:
    """Element of Q(zeta_24) in the power basis 1, zeta, ..., zeta^7.

    Stored as eight integer numerators over a positive common denominator.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, coeffs: Iterable = (0,), den: int = 1):
        vals = list(coeffs)
        if len(vals) > DEGREE:
            vals = _reduce_poly(vals + [0] * (2 * DEGREE - len(vals)))
        vals = vals + [0] * (DEGREE - len(vals))
        if any(not isinstance(v, int) for v in vals):
            fr = [Fraction(v) for v in vals]
            common = 1
            for f in fr:
                common = common * f.denominator // math.gcd(common, f.denominator)
            vals = [int(f * common) for f in fr]
            den = den * common
        if den <= 0:
            if den == 0:
                raise ZeroDivisionError("zero denominator")
            den = -den
            vals = [-v for v in vals]
        g = den
        for v in vals:
            g = math.gcd(g, v)
            if g == 1:
                break
        if g > 1:
            vals = [v // g for v in vals]
            den //= g
        self.num = tuple(vals)
        self.den = den
        self._hash = None

    # constructors -----------------------------------------------------
    @classmethod
    def rational(cls, r) -> "CycNum":
        r = Fraction(r)
        return cls((r.numerator,), r.denominator)

    @classmethod
    def root_of_unity(cls, k: int) -> "CycNum":
        """Return zeta_24^k."""
        k %= CONDUCTOR
        sign = 1
        if k >= 12:
            k -= 12
            sign = -1
        c = [0] * (2 * DEGREE)
        c[k] = sign
        return cls(_reduce_poly(c))

    @classmethod
    def exp_pi_i(cls, r) -> "CycNum":
        """Return exp(pi*i*r) for rational r with 12*r integral."""
        r = Fraction(r)
        k = r * 12
        if k.denominator != 1:
            raise SeriesError("denominator overflow")
        return cls.root_of_unity(int(k))

    @classmethod
    def i(cls) -> "CycNum":
        return cls.root_of_unity(6)

    @classmethod
    def sqrt2(cls) -> "CycNum":
        # zeta^3 + zeta^-3
        return cls.root_of_unity(3) + cls.root_of_unity(21)

    @classmethod
    def sqrt3(cls) -> "CycNum":
        # zeta^2 + zeta^-2
        return cls.root_of_unity(2) + cls.root_of_unity(22)

    # predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise SeriesError("coefficient is not rational")
        return Fraction(self.num[0], self.den)

    def coeffs(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(v, self.den) for v in self.num)

    # arithmetic -------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "CycNum":
        if isinstance(other, CycNum):
            return other
        if isinstance(other, (int, Rational)):
            return CycNum.rational(other)
        return NotImplemented

    def __add__(self, other):
        o = CycNum._coerce(other)
        if o is NotImplemented:
            return o
        if self.den == o.den:
            return CycNum([a + b for a, b in zip(self.num, o.num)], self.den)
        return CycNum(
            [a * o.den + b * self.den for a, b in zip(self.num, o.num)],
            self.den * o.den,
        )

    __radd__ = __add__

    def __neg__(self):
        return CycNum([-a for a in self.num], self.den)

    def __sub__(self, other):
        o = CycNum._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = CycNum._coerce(other)
        if o is NotImplemented:
            return o
        a, b = self.num, o.num
        if not any(b[1:]):
            return CycNum([x * b[0] for x in a], self.den * o.den)
        if not any(a[1:]):
            return CycNum([x * a[0] for x in b], self.den * o.den)
        c = [0] * (2 * DEGREE - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        c[i + j] += x * y
        return CycNum(_reduce_poly(c + [0]), self.den * o.den)

    __rmul__ = __mul__

    def _matrix(self):
        # column j = self * zeta^j in the power basis
        cols = []
        for j in range(DEGREE):
            c = [0] * (2 * DEGREE)
            for i, x in enumerate(self.num):
                c[i + j] += x
            cols.append([Fraction(v, self.den) for v in _reduce_poly(c)])
        return [[cols[j][i] for j in range(DEGREE)] for i in range(DEGREE)]

    def inverse(self) -> "CycNum":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return CycNum((self.den,), self.num[0])
        m = self._matrix()
        rhs = [Fraction(1)] + [Fraction(0)] * (DEGREE - 1)
        aug = [row[:] + [rhs[i]] for i, row in enumerate(m)]
        n = DEGREE
        for col in range(n):
            piv = next(r for r in range(col, n) if aug[r][col] != 0)
            aug[col], aug[piv] = aug[piv], aug[col]
            p = aug[col][col]
            aug[col] = [v / p for v in aug[col]]
            for r in range(n):
                if r != col and aug[r][col] != 0:
                    f = aug[r][col]
                    aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
        return CycNum([aug[r][n] for r in range(n)])

    def __truediv__(self, other):
        o = CycNum._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return CycNum._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = CycNum((1,)), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self) -> "CycNum":
        out = CycNum((0,))
        for k, x in enumerate(self.num):
            if x:
                out = out + CycNum.root_of_unity(-k) * x
        return CycNum(out.num, out.den * self.den)

    # comparison / display --------------------------------------------
    def __eq__(self, other):
        o = CycNum._coerce(other)
        if o is NotImplemented:
            return False
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __complex__(self):
        return sum(x * z for x, z in zip(self.num, _ZETA_POWERS)) / self.den

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        if self.is_rational():
            return f"CycNum({Fraction(self.num[0], self.den)})"
        return f"CycNum({list(self.coeffs())})"

    def to_json(self):
        return [[f.numerator, f.denominator] for f in self.coeffs()]

    @classmethod
    def from_json(cls, data) -> "CycNum":
        return cls([Fraction(n, d) for n, d in data])


ONE = CycNum((1,))
ZERO = CycNum((0,))

Scalar = Union[int, Fraction, CycNum]


def _to_units(x) -> int:
    x = Fraction(x)
    v = x * QUNIT
    if v.denominator != 1:
        raise SeriesError("denominator overflow")
    return int(v)


def _den_of_units(n: int) -> int:
    return QUNIT // math.gcd(n, QUNIT)


class JacobiSeries:
    """Truncated series sum c * q^n * z^l with exact cyclotomic coefficients.

    ``terms`` maps ``(n, l)`` to coefficients where ``n`` is a Fraction.  The
    constructor drops zero coefficients and anything at or beyond ``trunc``.
    """

    __slots__ = ("_t", "_trunc", "_qden")

    def __init__(self, terms: Mapping = None, trunc=DEFAULT_TRUNC, qden: int = 1):
        t = {}
        tr = _to_units(trunc)
        for (n, l), c in (terms or {}).items():
            u = _to_units(n)
            if u >= tr:
                continue
            c = c if isinstance(c, CycNum) else CycNum.rational(c)
            if c.is_zero():
                continue
            key = (u, int(l))
            t[key] = t[key] + c if key in t else c
        t = {k: v for k, v in t.items() if not v.is_zero()}
        self._init(t, tr, qden)

    def _init(self, t: Dict[Tuple[int, int], CycNum], tr: int, qden: int = 1):
        if QUNIT % qden:
            raise SeriesError("denominator overflow")
        d = qden
        for (u, _) in t:
            d = math.lcm(d, _den_of_units(u))
        self._t = t
        self._trunc = tr
        self._qden = d

    @classmethod
    def _raw(cls, t, tr, qden=1) -> "JacobiSeries":
        obj = cls.__new__(cls)
        obj._init({k: v for k, v in t.items() if k[0] < tr and not v.is_zero()}, tr, qden)
        return obj

    # basic constructors ------------------------------------------------
    @classmethod
    def constant(cls, c: Scalar = 1, trunc=DEFAULT_TRUNC) -> "JacobiSeries":
        return cls({(0, 0): c}, trunc)

    @classmethod
    def monomial(cls, qexp=0, zexp: int = 0, c: Scalar = 1, trunc=DEFAULT_TRUNC) -> "JacobiSeries":
        return cls({(Fraction(qexp), zexp): c}, trunc)

    @classmethod
    def from_coefficients(cls, coeffs, step=1, start=0, trunc=None) -> "JacobiSeries":
        """Series sum coeffs[k] q^(start + k*step) with no z-dependence."""
        step, start = Fraction(step), Fraction(start)
        if trunc is None:
            trunc = start + step * len(coeffs)
        return cls({(start + k * step, 0): c for k, c in enumerate(coeffs)}, trunc)

    # properties -------------------------------------------------------
    @property
    def trunc(self) -> Fraction:
        return Fraction(self._trunc, QUNIT)

    @property
    def qden(self) -> int:
        return self._qden

    @property
    def terms(self) -> Dict[Tuple[Fraction, int], CycNum]:
        return {(Fraction(u, QUNIT), l): c for (u, l), c in self._t.items()}

    def items(self):
        """Terms sorted by (q-exponent, z-exponent)."""
        for (u, l) in sorted(self._t):
            yield Fraction(u, QUNIT), l, self._t[(u, l)]

    def coeff(self, qexp, zexp: int = 0) -> CycNum:
        u = _to_units(qexp)
        if u >= self._trunc:
            raise SeriesError("coefficient beyond truncation")
        return self._t.get((u, zexp), ZERO)

    def qcoeff(self, qexp) -> Dict[int, CycNum]:
        """The Laurent polynomial in z multiplying q^qexp."""
        u = _to_units(qexp)
        if u >= self._trunc:
            raise SeriesError("coefficient beyond truncation")
        return {l: c for (v, l), c in self._t.items() if v == u}

    def valuation(self) -> Fraction:
        """Lowest stored q-exponent (trunc if the series is zero)."""
        return Fraction(self._vunits(), QUNIT)

    def _vunits(self) -> int:
        return min((u for u, _ in self._t), default=self._trunc)

    def is_zero(self) -> bool:
        return not self._t

    def __len__(self):
        return len(self._t)

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "JacobiSeries":
        if isinstance(other, JacobiSeries):
            return other
        if isinstance(other, (int, Rational, CycNum)):
            return JacobiSeries._raw({(0, 0): CycNum._coerce(other)}, 10**12)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        tr = min(self._trunc, o._trunc)
        t = {k: v for k, v in self._t.items() if k[0] < tr}
        for k, v in o._t.items():
            if k[0] < tr:
                t[k] = t[k] + v if k in t else v
        return JacobiSeries._raw(t, tr, math.lcm(self._qden, o._qden))

    __radd__ = __add__

    def __neg__(self):
        return JacobiSeries._raw({k: -v for k, v in self._t.items()}, self._trunc, self._qden)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational, CycNum)):
            return self.scale(other)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        tr = min(self._trunc + o._vunits(), o._trunc + self._vunits())
        t: Dict[Tuple[int, int], CycNum] = {}
        bitems = sorted(o._t.items())
        for (u1, l1), c1 in self._t.items():
            for (u2, l2), c2 in bitems:
                u = u1 + u2
                if u >= tr:
                    break
                key = (u, l1 + l2)
                p = c1 * c2
                t[key] = t[key] + p if key in t else p
        return JacobiSeries._raw(t, tr, math.lcm(self._qden, o._qden))

    __rmul__ = __mul__

    def scale(self, c: Scalar) -> "JacobiSeries":
        c = CycNum._coerce(c)
        return JacobiSeries._raw({k: v * c for k, v in self._t.items()}, self._trunc, self._qden)

    def __truediv__(self, other):
        if isinstance(other, (int, Rational, CycNum)):
            return self.scale(CycNum._coerce(other).inverse())
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def inverse(self) -> "JacobiSeries":
        if not self._t:
            raise SeriesError("non-invertible series")
        v = self._vunits()
        lead = [(l, c) for (u, l), c in self._t.items() if u == v]
        if len(lead) != 1:
            raise SeriesError("non-invertible series")
        l0, c0 = lead[0]
        c0inv = c0.inverse()
        # normalized x = self / (c0 q^v z^l0) = 1 + rest, known below trunc - v
        rel = self._trunc - v
        levels: Dict[int, Dict[int, CycNum]] = {}
        for (u, l), c in self._t.items():
            if u > v:
                levels.setdefault(u - v, {})[l - l0] = c * c0inv
        inv: Dict[int, Dict[int, CycNum]] = {0: {0: ONE}}
        steps = sorted(levels)
        step = QUNIT // self._qden
        n = step
        while n < rel:
            acc: Dict[int, CycNum] = {}
            for m in steps:
                if m > n:
                    break
                prev = inv.get(n - m)
                if not prev:
                    continue
                for l1, c1 in levels[m].items():
                    for l2, c2 in prev.items():
                        key = l1 + l2
                        p = c1 * c2
                        acc[key] = acc[key] + p if key in acc else p
            acc = {k: -c for k, c in acc.items() if not c.is_zero()}
            if acc:
                inv[n] = acc
            n += step
        t = {}
        for n, row in inv.items():
            for l, c in row.items():
                t[(n - v, l - l0)] = c * c0inv
        return JacobiSeries._raw(t, rel - v, self._qden)

    def __pow__(self, e: int) -> "JacobiSeries":
        if not isinstance(e, int):
            raise SeriesError("exponent must be an integer")
        if e < 0:
            if e == -1:
                return self.inverse()
            return self.inverse() ** (-e)
        result = JacobiSeries._raw({(0, 0): ONE}, 10**12)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        if result._trunc == 10**12:
            result = JacobiSeries._raw(result._t, self._trunc, self._qden)
        return result

    def qderiv(self) -> "JacobiSeries":
        """Apply q d/dq: multiply each term by its q-exponent."""
        t = {}
        for (u, l), c in self._t.items():
            if u:
                t[(u, l)] = c * Fraction(u, QUNIT)
        return JacobiSeries._raw(t, self._trunc, self._qden)

    # substitutions ----------------------------------------------------
    def shift(self, qexp=0, zexp: int = 0) -> "JacobiSeries":
        """Multiply by q^qexp z^zexp (exact, moves trunc along)."""
        du = _to_units(qexp)
        t = {(u + du, l + zexp): c for (u, l), c in self._t.items()}
        return JacobiSeries._raw(t, self._trunc + du, self._qden)

    def truncate(self, trunc) -> "JacobiSeries":
        tr = _to_units(trunc)
        if tr > self._trunc:
            raise SeriesError("cannot raise truncation")
        return JacobiSeries._raw(self._t, tr, self._qden)

    def with_trunc_at_most(self, trunc) -> "JacobiSeries":
        return self.truncate(min(Fraction(trunc), self.trunc))

    def specialize_z(self, zval: Scalar = 1, zscale: int = 1) -> "JacobiSeries":
        """Set z^(1/zscale) to a root of unity given as a CycNum (or +-1)."""
        zval = CycNum._coerce(zval)
        t: Dict[Tuple[int, int], CycNum] = {}
        powers: Dict[int, CycNum] = {}
        for (u, l), c in self._t.items():
            if l not in powers:
                powers[l] = zval**l
            key = (u, 0)
            p = c * powers[l]
            t[key] = t[key] + p if key in t else p
        return JacobiSeries._raw(t, self._trunc, self._qden)

    def z_flow(self, a: int, qstep, trunc) -> "JacobiSeries":
        """Substitute z -> z^a q^qstep, so z^l q^n becomes z^(a l) q^(n + qstep l).

        Unstored terms can move below the old truncation when qstep*l < 0, so
        the caller supplies the new ``trunc`` from a bound on the z-range.
        """
        du = _to_units(qstep)
        tr = _to_units(trunc)
        t: Dict[Tuple[int, int], CycNum] = {}
        for (u, l), c in self._t.items():
            key = (u + du * l, a * l)
            t[key] = t[key] + c if key in t else c
        return JacobiSeries._raw(t, tr, self._qden)

    def tau_shift(self, k: int = 1) -> "JacobiSeries":
        """Substitute tau -> tau + k, i.e. multiply q^n by exp(2 pi i k n)."""
        t = {}
        for (u, l), c in self._t.items():
            t[(u, l)] = c * CycNum.root_of_unity(u * k)
        return JacobiSeries._raw(t, self._trunc, self._qden)

    def q_rescale(self, r) -> "JacobiSeries":
        """Substitute q -> q^r for positive rational r."""
        r = Fraction(r)
        t = {}
        for (u, l), c in self._t.items():
            nu = u * r
            if nu.denominator != 1:
                raise SeriesError("denominator overflow")
            t[(int(nu), l)] = c
        tr = self._trunc * r
        return JacobiSeries._raw(t, math.ceil(tr), 1)

    def conjugate_coeffs(self) -> "JacobiSeries":
        return JacobiSeries._raw({k: v.conjugate() for k, v in self._t.items()}, self._trunc, self._qden)

    # comparison --------------------------------------------------------
    def agrees_with(self, other: "JacobiSeries", upto=None) -> bool:
        return self.first_mismatch(other, upto) is None

    def first_mismatch(self, other: "JacobiSeries", upto=None):
        """First (q, z, mine, theirs) differing below the common truncation."""
        tr = min(self._trunc, other._trunc)
        if upto is not None:
            tr = min(tr, _to_units(upto))
        keys = sorted(k for k in set(self._t) | set(other._t) if k[0] < tr)
        for k in keys:
            a = self._t.get(k, ZERO)
            b = other._t.get(k, ZERO)
            if a != b:
                return Fraction(k[0], QUNIT), k[1], a, b
        return None

    def __eq__(self, other):
        if not isinstance(other, JacobiSeries):
            return NotImplemented
        return self._trunc == other._trunc and self._t == other._t

    def __hash__(self):
        return hash((self._trunc, frozenset(self._t.items())))

    def __repr__(self):
        parts = []
        for n, l, c in list(self.items())[:8]:
            parts.append(f"{c!r} q^{n} z^{l}")
        more = " + ..." if len(self._t) > 8 else ""
        return f"JacobiSeries({' + '.join(parts) or '0'}{more}; O(q^{self.trunc}))"

    # serialization -----------------------------------------------------
    def to_json(self) -> dict:
        tr = self.trunc
        return {
            "qden": self._qden,
            "trunc": [tr.numerator, tr.denominator],
            "terms": [
                {"q": [n.numerator, n.denominator], "z": l, "c": c.to_json()}
                for n, l, c in self.items()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "JacobiSeries":
        terms = {}
        for term in data["terms"]:
            n = Fraction(*term["q"])
            terms[(n, int(term["z"]))] = CycNum.from_json(term["c"])
        return cls(terms, Fraction(*data["trunc"]), int(data["qden"]))

    # numerics ----------------------------------------------------------
    def evaluate(self, p: "EvalPoint", conjugate_coeffs: bool = False, tol: float = DEFAULT_TOL):
        """Numeric value at p together with a tail bound.

        With ``conjugate_coeffs`` the result is the value of the series at
        (-conj(u), -conj(tau)), which is how antiholomorphic factors are
        evaluated.
        """
        return eval_numeric(self, p, conjugate_coeffs, tol)


class EvalPoint:
    """A point (u, tau) in C x upper half plane."""

    __slots__ = ("u", "tau")

    def __init__(self, u: complex = 0.0, tau: complex = 1j):
        tau = complex(tau)
        if tau.imag <= 0:
            raise SeriesError("tau must lie in the upper half plane")
        self.u = complex(u)
        self.tau = tau

    def __repr__(self):
        return f"EvalPoint(u={self.u}, tau={self.tau})"


def eval_numeric(s: JacobiSeries, p: EvalPoint, conjugate_coeffs: bool = False,
                 tol: float = DEFAULT_TOL, min_im: float = 0.5):
    """Evaluate ``s`` at ``p`` and return (value, tail_bound).

    The tail bound is a geometric majorant: the growth rate of the level
    magnitudes A_n = sum_l |c_{n,l}| |z|^l is read off the upper part of the
    stored range and continued past the truncation.
    """
    if p.tau.imag < min_im:
        raise SeriesError("Im(tau) below the evaluation floor")
    z = cmath.exp(2j * math.pi * p.u)
    q = cmath.exp(2j * math.pi * p.tau)
    absq = abs(q)
    total = 0j
    levels: Dict[int, float] = {}
    for (u, l), c in s._t.items():
        cv = complex(c)
        zl = z**l
        qn = cmath.exp(2j * math.pi * p.tau * u / QUNIT)
        if conjugate_coeffs:
            total += cv * (zl * qn).conjugate()
        else:
            total += cv * zl * qn
        levels[u] = levels.get(u, 0.0) + abs(cv) * abs(zl)
    bound = _tail_bound(levels, s._trunc, s._qden, absq)
    if bound > tol:
        raise SeriesError("insufficient truncation")
    return total, bound


def _tail_bound(levels: Dict[int, float], trunc: int, qden: int, absq: float) -> float:
    # fit A_n <= C g^n on the upper half of the stored levels, then sum
    # C (g|q|)^n over the omitted exponents n = trunc + j/qden, j >= 0
    if not levels:
        return absq ** (trunc / QUNIT)
    keys = sorted(levels)
    mid = keys[0] + (keys[-1] - keys[0]) // 2
    upper = [k for k in keys if k >= mid]
    if len(upper) < 2:
        upper = keys
    growth = 1.0
    for a in upper:
        for b in upper:
            if b > a and levels[a] > 0:
                growth = max(growth, (levels[b] / levels[a]) ** (QUNIT / (b - a)))
    ratio = growth * absq
    if ratio >= 1.0:
        return math.inf
    logc = max(math.log(levels[k]) - math.log(growth) * k / QUNIT for k in upper if levels[k] > 0)
    head = math.exp(logc + math.log(ratio) * trunc / QUNIT)
    return 10.0 * head / (1.0 - ratio ** (1.0 / qden))


# standard series ----------------------------------------------------------

_ETA_SCALES = {Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3)}


def euler_product(r=1, trunc=DEFAULT_TRUNC) -> JacobiSeries:
    """prod_{n>=1} (1 - q^(r n)) through trunc."""
    r = Fraction(r)
    tr = _to_units(trunc)
    step = _to_units(r)
    coeffs = {0: 1}
    n = 1
    while n * step < tr:
        e = n * step
        new = dict(coeffs)
        for k, v in coeffs.items():
            if k + e < tr:
                new[k + e] = new.get(k + e, 0) - v
        coeffs = new
        n += 1
    return JacobiSeries._raw({(k, 0): CycNum((v,)) for k, v in coeffs.items() if v}, tr)


def eta_scaled(r=1, trunc=DEFAULT_TRUNC) -> JacobiSeries:
    """eta(r tau) = q^(r/24) prod (1 - q^(r n)) for r in {1/2, 1, 2, 3}."""
    r = Fraction(r)
    if r not in _ETA_SCALES:
        raise SeriesError("unsupported eta scale")
    lead = r / 24
    return euler_product(r, Fraction(trunc) - lead).shift(lead)


def eta_power(k: int, trunc=DEFAULT_TRUNC, r=1) -> JacobiSeries:
    """eta(r tau)^k for any integer k, exact through trunc."""
    r = Fraction(r)
    lead = r * k / 24
    prod = euler_product(r, Fraction(trunc) - lead)
    if k < 0:
        prod = prod.inverse() ** (-k) if k != -1 else prod.inverse()
    else:
        prod = prod**k
    return prod.shift(lead).with_trunc_at_most(trunc)


def sigma1(n: int) -> int:
    return sum(d for d in range(1, n + 1) if n % d == 0)


def eisenstein_e2(trunc=DEFAULT_TRUNC) -> JacobiSeries:
    """E_2 = 1 - 24 sum sigma_1(n) q^n."""
    trunc = Fraction(trunc)
    terms = {(Fraction(0), 0): 1}
    n = 1
    while n < trunc:
        terms[(Fraction(n), 0)] = -24 * sigma1(n)
        n += 1
    return JacobiSeries(terms, trunc)


def geometric(trunc=DEFAULT_TRUNC) -> JacobiSeries:
    """1 + q + q^2 + ... through trunc."""
    trunc = Fraction(trunc)
    return JacobiSeries({(Fraction(n), 0): 1 for n in range(math.ceil(trunc))}, trunc)
