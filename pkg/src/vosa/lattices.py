"""Positive-definite lattices, cosets, short vectors, theta series and glue.

Lattices are stored by an exact rational Gram matrix in a chosen basis and,
when available, an exact rational embedding of that basis in Euclidean space.
Vectors are handled through their coordinates in the basis, so lattices such
as sqrt(3)Z that have no rational embedding fit the same interface.  Markings
and linear sign characters are linear functionals on those coordinates.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .series import QUNIT, CycNum, JacobiSeries, SeriesError

Vec = Tuple[Fraction, ...]

ZSCALE = 6  # z-exponents of marked theta series are 6 * (lambda . v)


class LatticeError(ValueError):
    """Raised for invalid lattice constructions and operations."""


def _fr_vec(v) -> Vec:
    return tuple(Fraction(x) for x in v)


def _fr_mat(m) -> Tuple[Vec, ...]:
    return tuple(_fr_vec(r) for r in m)


def _matmul(a, b):
    bt = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(r, c)) for c in bt) for r in a)


def _solve_rational(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Optional[Vec]:
    """Solve x A = b for x (A has rows spanning), or None if inconsistent."""
    # work with A^T x^T = b^T
    rows = len(a)
    cols = len(a[0]) if rows else 0
    m = [[Fraction(a[i][j]) for i in range(rows)] + [Fraction(b[j])] for j in range(cols)]
    piv_cols = []
    r = 0
    for c in range(rows):
        p = next((i for i in range(r, cols) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(cols):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [v - f * w for v, w in zip(m[i], m[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, cols):
        if m[i][rows] != 0:
            return None
    x = [Fraction(0)] * rows
    for i, c in enumerate(piv_cols):
        x[c] = m[i][rows]
    return tuple(x)


def _inverse(m: Sequence[Sequence[Fraction]]) -> Tuple[Vec, ...]:
    n = len(m)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        p = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [v * inv for v in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [v - f * w for v, w in zip(aug[i], aug[c])]
    return tuple(tuple(row[n:]) for row in aug)


def _det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(m)
    a = [[Fraction(v) for v in row] for row in m]
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / a[c][c]
                a[i] = [v - f * w for v, w in zip(a[i], a[c])]
    return det


def _integer_basis(gens: Sequence[Sequence[Fraction]]) -> Tuple[Vec, ...]:
    """A Z-basis of the lattice generated by rational vectors (row echelon over Z)."""
    den = 1
    for g in gens:
        for x in g:
            den = math.lcm(den, Fraction(x).denominator)
    rows = [[int(Fraction(x) * den) for x in g] for g in gens]
    dim = len(rows[0])
    basis = []
    col = 0
    while rows and col < dim:
        rows = [r for r in rows if any(r)]
        nz = [r for r in rows if r[col] != 0]
        if not nz:
            col += 1
            continue
        while len([r for r in rows if r[col] != 0]) > 1:
            nz = sorted((r for r in rows if r[col] != 0), key=lambda r: abs(r[col]))
            p = nz[0]
            new = [p]
            for r in rows:
                if r is p:
                    continue
                if r[col] != 0:
                    q = r[col] // p[col]
                    r = [a - q * b for a, b in zip(r, p)]
                new.append(r)
            rows = [r for r in new if any(r)]
        p = next(r for r in rows if r[col] != 0)
        basis.append(p)
        rows = [r for r in rows if r is not p]
        col += 1
    return tuple(tuple(Fraction(x, den) for x in b) for b in basis)


class Lattice:
    """A positive-definite lattice given by Gram matrix and optional embedding."""

    def __init__(self, gram, basis=None, name: str = "", structure=None):
        self.gram = _fr_mat(gram)
        self.basis = _fr_mat(basis) if basis is not None else None
        self.rank = len(self.gram)
        self.name = name
        # coordinate description for the fast theta route: list of
        # (ambient shift, parity-restricted) pieces of Z^n, or None
        self.structure = structure
        if any(self.gram[i][j] != self.gram[j][i] for i in range(self.rank) for j in range(self.rank)):
            raise LatticeError("gram matrix not symmetric")
        if self.rank and np.any(np.linalg.eigvalsh(np.array(self.gram, dtype=float)) <= 0):
            raise LatticeError("gram matrix not positive definite")

    @classmethod
    def from_basis(cls, basis, name: str = "", structure=None) -> "Lattice":
        b = _fr_mat(basis)
        gram = _matmul(b, tuple(zip(*b)))
        return cls(gram, b, name, structure)

    @classmethod
    def from_generators(cls, gens, name: str = "", structure=None) -> "Lattice":
        return cls.from_basis(_integer_basis(_fr_mat(gens)), name, structure)

    @property
    def dim(self) -> int:
        return len(self.basis[0]) if self.basis else self.rank

    def determinant(self) -> Fraction:
        return _det(self.gram)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.gram for x in row)

    def is_even(self) -> bool:
        return self.is_integral() and all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def dual_gram_basis(self) -> Tuple[Vec, ...]:
        """Coordinates of the dual basis vectors."""
        return _inverse(self.gram)

    def inner(self, x: Sequence, y: Sequence) -> Fraction:
        g = self.gram
        return sum(Fraction(x[i]) * g[i][j] * Fraction(y[j]) for i in range(self.rank) for j in range(self.rank))

    def coords(self, v: Sequence) -> Vec:
        """Coordinates of an ambient vector (must lie in the rational span)."""
        if self.basis is None:
            raise LatticeError("lattice has no ambient embedding")
        x = _solve_rational(self.basis, _fr_vec(v))
        if x is None:
            raise LatticeError("vector not in the span of the lattice")
        return x

    def ambient(self, x: Sequence) -> Vec:
        if self.basis is None:
            raise LatticeError("lattice has no ambient embedding")
        return tuple(sum(Fraction(x[i]) * self.basis[i][k] for i in range(self.rank)) for k in range(self.dim))

    def contains(self, v: Sequence) -> bool:
        try:
            x = self.coords(v)
        except LatticeError:
            return False
        return all(c.denominator == 1 for c in x)

    def coset(self, shift=None, ambient: bool = True) -> "Coset":
        if shift is None:
            return Coset(self, (Fraction(0),) * self.rank)
        return Coset(self, self.coords(shift) if ambient and self.basis is not None else _fr_vec(shift))

    def to_json(self) -> dict:
        b = self.basis if self.basis is not None else self.gram
        return {"basis": [[[x.numerator, x.denominator] for x in row] for row in b],
                "shift": [[0, 1]] * self.dim}

    def __repr__(self):
        return f"Lattice({self.name or 'rank ' + str(self.rank)})"


class Coset:
    """The translate L + gamma, with gamma given in lattice coordinates."""

    def __init__(self, lattice: Lattice, shift: Sequence, name: str = ""):
        self.lattice = lattice
        self.shift = _fr_vec(shift)
        self.name = name or (lattice.name if not any(self.shift) else f"{lattice.name}+{list(map(str, self.shift))}")
        if len(self.shift) != lattice.rank:
            raise LatticeError("shift has wrong length")

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def ambient_shift(self) -> Vec:
        return self.lattice.ambient(self.shift)

    def contains(self, v: Sequence) -> bool:
        x = self.lattice.coords(v)
        return all((a - b).denominator == 1 for a, b in zip(x, self.shift))

    def reduced_shift(self) -> Vec:
        return tuple(s - math.floor(s) for s in self.shift)

    def min_norm(self) -> Fraction:
        bound = Fraction(1)
        while True:
            vs = short_vectors(self, bound)
            if vs:
                return min(self.lattice.inner(v, v) for v in vs)
            bound *= 2

    def to_json(self) -> dict:
        b = self.lattice.basis if self.lattice.basis is not None else self.lattice.gram
        sh = self.ambient_shift() if self.lattice.basis is not None else self.shift
        return {"basis": [[[x.numerator, x.denominator] for x in row] for row in b],
                "shift": [[x.numerator, x.denominator] for x in sh]}

    def __repr__(self):
        return f"Coset({self.name})"


class Marking:
    """The z-grade functional lambda -> lambda . v, stored on coordinates."""

    def __init__(self, functional: Sequence):
        self.functional = _fr_vec(functional)

    @classmethod
    def from_ambient(cls, lattice: Lattice, v: Sequence) -> "Marking":
        return cls(tuple(sum(b[k] * Fraction(v[k]) for k in range(len(v))) for b in lattice.basis))

    @classmethod
    def from_coords(cls, lattice: Lattice, vc: Sequence) -> "Marking":
        g = lattice.gram
        return cls(tuple(sum(g[i][j] * Fraction(vc[j]) for j in range(lattice.rank)) for i in range(lattice.rank)))

    def grade(self, x: Sequence) -> Fraction:
        return sum(f * Fraction(c) for f, c in zip(self.functional, x))

    def __repr__(self):
        return f"Marking({[str(f) for f in self.functional]})"


class SignCharacter:
    """A parity character on lattice vectors.

    ``norm``: exp(pi i lambda.lambda), which is (-1)^(lambda.lambda) on integral
    norms.  ``linear``: exp(2 pi i (lambda.w - ref)).  ``trivial``: 1.
    """

    def __init__(self, kind: str = "trivial", functional: Sequence = (), ref=0, sign: int = 1):
        if kind not in ("trivial", "norm", "linear"):
            raise LatticeError(f"unknown sign character {kind!r}")
        self.kind = kind
        self.functional = _fr_vec(functional)
        self.ref = Fraction(ref)
        self.sign = sign

    @classmethod
    def trivial(cls) -> "SignCharacter":
        return cls("trivial")

    @classmethod
    def norm_parity(cls, sign: int = 1) -> "SignCharacter":
        return cls("norm", sign=sign)

    @classmethod
    def linear(cls, functional, ref=0, sign: int = 1) -> "SignCharacter":
        return cls("linear", functional, ref, sign)

    @classmethod
    def linear_ambient(cls, lattice: Lattice, w: Sequence, ref=0, sign: int = 1) -> "SignCharacter":
        return cls.linear(Marking.from_ambient(lattice, w).functional, ref, sign)

    def flipped(self) -> "SignCharacter":
        return SignCharacter(self.kind, self.functional, self.ref, -self.sign)

    def phase_exponent(self, lattice: Lattice, x: Sequence) -> Fraction:
        """Return r with value exp(pi i r) (sign folded in as r += 1)."""
        if self.kind == "trivial":
            r = Fraction(0)
        elif self.kind == "norm":
            r = lattice.inner(x, x)
        else:
            r = 2 * (sum(f * Fraction(c) for f, c in zip(self.functional, x)) - self.ref)
        return r if self.sign == 1 else r + 1

    def value(self, lattice: Lattice, x: Sequence) -> CycNum:
        return CycNum.exp_pi_i(self.phase_exponent(lattice, x))

    def key(self):
        return (self.kind, self.functional, self.ref, self.sign)

    def __repr__(self):
        if self.kind == "linear":
            return f"SignCharacter(linear, {[str(f) for f in self.functional]}, ref={self.ref}, sign={self.sign})"
        return f"SignCharacter({self.kind}, sign={self.sign})"


# constructors --------------------------------------------------------------

def _unit(n: int, i: int) -> Vec:
    return tuple(Fraction(int(k == i)) for k in range(n))


def d_lattice(n: int) -> Lattice:
    """D_n = {x in Z^n : sum x even}."""
    if n < 1:
        raise LatticeError("n must be positive")
    if n == 1:
        return Lattice.from_basis([(Fraction(2),)], "D1", structure=[((Fraction(0),), True)])
    basis = [tuple(Fraction(int(k == i) - int(k == i + 1)) for k in range(n)) for i in range(n - 1)]
    basis.append(tuple(Fraction(int(k in (n - 2, n - 1))) for k in range(n)))
    return Lattice.from_basis(basis, f"D{n}", structure=[((Fraction(0),) * n, True)])


def d_glue_vector(n: int, i: int) -> Vec:
    """The coset representatives [0], [1], [2], [3] of D_n in its dual."""
    h = Fraction(1, 2)
    if i == 0:
        return (Fraction(0),) * n
    if i == 1:
        return (h,) * n
    if i == 2:
        return (Fraction(0),) * (n - 1) + (Fraction(1),)
    if i == 3:
        return (h,) * (n - 1) + (-h,)
    raise LatticeError("glue index must be 0..3")


def d_coset(n: int, i: int) -> Coset:
    lat = d_lattice(n)
    c = Coset(lat, lat.coords(d_glue_vector(n, i)), f"D{n}+[{i}]")
    return c


def d_plus(n: int) -> Lattice:
    """D_n^+ = D_n u (D_n + [1]) for n divisible by 4."""
    if n % 4:
        raise LatticeError("not integral")
    gens = list(d_lattice(n).basis) + [d_glue_vector(n, 1)]
    zero = (Fraction(0),) * n
    return Lattice.from_generators(gens, f"D{n}+", structure=[(zero, True), (d_glue_vector(n, 1), True)])


def z_lattice(n: int) -> Lattice:
    return Lattice.from_basis([_unit(n, i) for i in range(n)], f"Z{n}", structure=[((Fraction(0),) * n, False)])


def scaled_z(n: int, norm, name: str = "") -> Lattice:
    """sqrt(norm) Z^n given by its Gram matrix norm * I."""
    norm = Fraction(norm)
    gram = [[norm if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    return Lattice(gram, None, name or f"sqrt{norm}Z{n}")


def a1_power(n: int) -> Lattice:
    return scaled_z(n, 2, f"A1^{n}")


def sqrt3_z(n: int) -> Lattice:
    return scaled_z(n, 3, f"sqrt3Z^{n}")


def e8_gram() -> Lattice:
    """E8 from its Cartan matrix (Bourbaki numbering)."""
    edges = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)]
    g = [[Fraction(2 if i == j else 0) for j in range(8)] for i in range(8)]
    for a, b in edges:
        g[a][b] = g[b][a] = Fraction(-1)
    return Lattice(g, None, "E8(Cartan)")


def a1_embedding(n: int) -> Lattice:
    """A_1^{2n} inside D_{2n}: generators e_i + e_{n+i} then e_i - e_{n+i}."""
    m = 2 * n
    plus = [tuple(Fraction(int(k == i) + int(k == n + i)) for k in range(m)) for i in range(n)]
    minus = [tuple(Fraction(int(k == i) - int(k == n + i)) for k in range(m)) for i in range(n)]
    return Lattice.from_basis(plus + minus, f"A1^{m}<D{m}")


_SPEC = re.compile(r"^(Z|D|A1\^|sqrt3Z\^?|E)(\d+)(\+)?(?:\+?\[(\d)\])?$")


def make_lattice(spec: str):
    """Build a lattice or coset from a short name.

    Accepted: ``Zn``, ``Dn``, ``Dn+[i]``, ``Dn+`` (n divisible by 4),
    ``A1^n``, ``sqrt3Z^n``, ``E8`` (= D8+).
    """
    s = spec.replace(" ", "")
    m = _SPEC.match(s)
    if not m:
        raise LatticeError(f"unknown lattice spec {spec!r}")
    kind, n, plus, idx = m.group(1), int(m.group(2)), m.group(3), m.group(4)
    if kind == "Z":
        return z_lattice(n)
    if kind == "A1^":
        return a1_power(n)
    if kind.startswith("sqrt3Z"):
        return sqrt3_z(n)
    if kind == "E":
        if n != 8:
            raise LatticeError("only E8 is supported")
        lat = d_plus(8)
        lat.name = "E8"
        return lat
    if idx is not None:
        return d_coset(n, int(idx))
    if plus:
        return d_plus(n)
    return d_lattice(n)


def dn_class(v: Sequence) -> int:
    """Which coset D_n + [i] of D_n^* contains the ambient vector v."""
    v = _fr_vec(v)
    n = len(v)
    if all(x.denominator == 1 for x in v):
        return 0 if sum(v) % 2 == 0 else 2
    if all((2 * x).denominator == 1 and x.denominator == 2 for x in v):
        d = [x - y for x, y in zip(v, d_glue_vector(n, 1))]
        return 1 if sum(d) % 2 == 0 else 3
    raise LatticeError("vector not in the dual of D_n")


# short vectors ---------------------------------------------------------------

def _common_den(vals) -> int:
    d = 1
    for v in vals:
        d = math.lcm(d, Fraction(v).denominator)
    return d


def _enumerate_points(c: Coset, max_norm):
    """Integer offsets x (rows) with (x + shift) of norm <= max_norm.

    Returns (X, norms_scaled, scale) where norms_scaled = norm * scale exactly.
    Fincke-Pohst with widened floating bounds, then an exact integer test.
    """
    lat = c.lattice
    r = lat.rank
    max_norm = Fraction(max_norm)
    gd = _common_den(x for row in lat.gram for x in row)
    gi = np.array([[int(x * gd) for x in row] for row in lat.gram], dtype=object)
    sd = _common_den(c.shift)
    gn = np.array([int(s * sd) for s in c.shift], dtype=object)
    scale = gd * sd * sd
    if max_norm < 0:
        return np.zeros((0, r), dtype=np.int64), np.zeros(0, dtype=object), scale
    gf = np.array(lat.gram, dtype=float)
    q = np.zeros((r, r))
    a = gf.copy()
    for i in range(r):
        q[i, i] = a[i, i]
        for j in range(i + 1, r):
            q[i, j] = a[i, j] / a[i, i]
        for j in range(i + 1, r):
            for k in range(j, r):
                a[j, k] -= q[i, j] * q[i, k] * q[i, i]
                a[k, j] = a[j, k]
    shift = [float(s) for s in c.shift]
    bound = float(max_norm) * (1 + 1e-9) + 1e-9
    qd = [q[i, i] for i in range(r)]
    qrow = [[q[i, j] for j in range(r)] for i in range(r)]
    out: List[Tuple[int, ...]] = []
    y = [0.0] * r
    x = [0] * r

    def rec(i: int, rem: float):
        cen = 0.0
        row = qrow[i]
        for j in range(i + 1, r):
            cen -= row[j] * y[j]
        rad = math.sqrt(max(rem, 0.0) / qd[i]) + 1e-7
        lo = math.ceil(cen - rad - shift[i])
        hi = math.floor(cen + rad - shift[i])
        for k in range(lo, hi + 1):
            yi = k + shift[i]
            d = yi - cen
            nrem = rem - qd[i] * d * d
            if nrem < -1e-7:
                continue
            x[i] = k
            if i == 0:
                out.append(tuple(x))
            else:
                y[i] = yi
                rec(i - 1, nrem)
        y[i] = 0.0

    if r:
        rec(r - 1, bound)
    else:
        out.append(())
    X = np.array(out, dtype=np.int64).reshape(len(out), r)
    Y = X.astype(object) * sd + gn
    norms = np.einsum("ij,jk,ik->i", Y, gi, Y) if len(out) else np.zeros(0, dtype=object)
    keep = norms <= max_norm * scale
    return X[keep], norms[keep], scale


def short_vectors(c: Coset, max_norm, min_norm=None) -> List[Vec]:
    """All coordinate vectors of c with norm <= max_norm (and >= min_norm), sorted."""
    X, norms, scale = _enumerate_points(c, max_norm)
    out = []
    lo = None if min_norm is None else Fraction(min_norm) * scale
    for row, nv in zip(X.tolist(), norms):
        if lo is not None and nv < lo:
            continue
        out.append(tuple(Fraction(k) + s for k, s in zip(row, c.shift)))
    out.sort()
    return out


# theta series ------------------------------------------------------------------

def _grade_units(marking: Optional[Marking], x) -> int:
    if marking is None:
        return 0
    g = marking.grade(x) * ZSCALE
    if g.denominator != 1:
        raise LatticeError("incompatible marking")
    return int(g)


def _theta_enumerate(c: Coset, marking, sign, trunc) -> JacobiSeries:
    lat = c.lattice
    tr = Fraction(trunc)
    X, norms, scale = _enumerate_points(c, 2 * tr)
    terms: Dict[Tuple[int, int], CycNum] = {}
    tr_units = int(tr * QUNIT)
    sd = _common_den(c.shift)
    gn = [int(s * sd) for s in c.shift]
    if marking is not None:
        md = _common_den(marking.functional)
        mi = [int(f * md) for f in marking.functional]
    if sign is not None and sign.kind == "linear":
        wd = _common_den(sign.functional)
        wi = [int(f * wd) for f in sign.functional]
    for row, nv in zip(X.tolist(), norms):
        u = Fraction(int(nv), scale) * QUNIT / 2
        if u >= tr_units:
            continue
        if u.denominator != 1:
            raise SeriesError("denominator overflow")
        yv = [sd * k + g for k, g in zip(row, gn)]
        zl = 0
        if marking is not None:
            zg = Fraction(ZSCALE * sum(m * v for m, v in zip(mi, yv)), md * sd)
            if zg.denominator != 1:
                raise LatticeError("incompatible marking")
            zl = int(zg)
        if sign is None or sign.kind == "trivial":
            r = Fraction(0)
        elif sign.kind == "norm":
            r = Fraction(int(nv), scale)
        else:
            r = 2 * (Fraction(sum(w * v for w, v in zip(wi, yv)), wd * sd) - sign.ref)
        if sign is not None and sign.sign == -1:
            r += 1
        val = CycNum.exp_pi_i(r) if r else CycNum((1,))
        key = (int(u), zl)
        terms[key] = terms[key] + val if key in terms else val
    return JacobiSeries._raw(terms, tr_units)


@lru_cache(maxsize=4096)
def _theta_1d(norm: Fraction, shift: Fraction, mfunc: Fraction, skind: str, sfunc: Fraction,
              alt: bool, trunc: Fraction) -> Optional[JacobiSeries]:
    """sum_k phase * q^(norm (k+s)^2 / 2) z^(6 mfunc (k+s)) over k in Z.

    Phase: exp(pi i norm (k+s)^2) for skind 'norm', exp(2 pi i sfunc (k+s)) for
    'linear', times (-1)^k when alt.  Returns None if a factor leaves the
    coefficient field or the z-grade is fractional (caller falls back).
    """
    terms: Dict[Tuple[int, int], CycNum] = {}
    tr_units = int(trunc * QUNIT)
    # |k + s| <= sqrt(2 trunc / norm)
    rad = math.sqrt(2 * float(trunc) / float(norm)) + 2
    lo = math.floor(-rad - float(shift))
    hi = math.ceil(rad - float(shift))
    for k in range(lo, hi + 1):
        y = k + shift
        e = norm * y * y * QUNIT / 2
        if e >= tr_units:
            continue
        if e.denominator != 1:
            return None
        zg = mfunc * y * ZSCALE
        if zg.denominator != 1:
            return None
        r = Fraction(0)
        if skind == "norm":
            r = norm * y * y
        elif skind == "linear":
            r = 2 * sfunc * y
        if alt and k % 2:
            r += 1
        if (r * 12).denominator != 1:
            return None
        key = (int(e), int(zg))
        val = CycNum.exp_pi_i(r)
        terms[key] = terms[key] + val if key in terms else val
    return JacobiSeries._raw(terms, tr_units)


def _product(factors: List[JacobiSeries], trunc) -> JacobiSeries:
    # multiply smallest-valuation-first, trimming to trunc as we go
    out = JacobiSeries._raw({(0, 0): CycNum((1,))}, int(Fraction(trunc) * QUNIT))
    for f in factors:
        out = out * f
    return out


def _theta_pieces(c: Coset, marking, sign, trunc) -> Optional[JacobiSeries]:
    """Theta through the coordinate description in orthonormal ambient space."""
    lat = c.lattice
    if lat.structure is None or lat.basis is None:
        return None
    n = lat.dim
    if n != lat.rank:
        return None
    gamma = c.ambient_shift()
    # translate functionals on coordinates into ambient functionals
    binv = _inverse(lat.basis)  # ambient = x B, x = ambient B^-1

    def amb(func):
        return tuple(sum(binv[k][i] * func[i] for i in range(n)) for k in range(n))

    mf = amb(marking.functional) if marking is not None else (Fraction(0),) * n
    skind = sign.kind if sign is not None else "trivial"
    sf = amb(sign.functional) if skind == "linear" else (Fraction(0),) * n
    tr = Fraction(trunc)
    total = None
    for base, parity in lat.structure:
        s = tuple(Fraction(a) + Fraction(b) for a, b in zip(base, gamma))
        parts = []
        for alt in ((False, True) if parity else (False,)):
            fs = []
            for k in range(n):
                f = _theta_1d(Fraction(1), s[k], mf[k], skind, sf[k], alt, tr)
                if f is None:
                    return None
                fs.append(f)
            parts.append(_product(fs, tr))
        piece = parts[0] if not parity else (parts[0] + parts[1]).scale(Fraction(1, 2))
        # the parity projection counts y in Z^n + s with sum(y - s) even, where
        # s = base + gamma; lattice cosets need sum(y - base - gamma) even
        total = piece if total is None else total + piece
    if sign is not None:
        const = Fraction(0)
        if skind == "linear":
            const -= 2 * sign.ref
        if sign.sign == -1:
            const += 1
        if const:
            total = total.scale(CycNum.exp_pi_i(const))
    return total


def _theta_diagonal(c: Coset, marking, sign, trunc) -> Optional[JacobiSeries]:
    lat = c.lattice
    g = lat.gram
    r = lat.rank
    if any(g[i][j] != 0 for i in range(r) for j in range(r) if i != j):
        return None
    skind = sign.kind if sign is not None else "trivial"
    mf = marking.functional if marking is not None else (Fraction(0),) * r
    sf = sign.functional if skind == "linear" else (Fraction(0),) * r
    tr = Fraction(trunc)
    fs = []
    for k in range(r):
        f = _theta_1d(g[k][k], c.shift[k], mf[k], skind, sf[k], False, tr)
        if f is None:
            return None
        fs.append(f)
    total = _product(fs, tr)
    if sign is not None:
        const = Fraction(0)
        if skind == "linear":
            const -= 2 * sign.ref
        if sign.sign == -1:
            const += 1
        if const:
            total = total.scale(CycNum.exp_pi_i(const))
    return total


def theta(c: Coset, marking: Optional[Marking] = None, sign: Optional[SignCharacter] = None,
          trunc=6, route: str = "auto") -> JacobiSeries:
    """sum over lambda in c of sign(lambda) q^(lambda.lambda/2) z^(6 lambda.v).

    ``route`` selects 'enumerate' (Fincke-Pohst), 'product' (coordinate-wise
    factorization, available for diagonal Gram matrices and the Z^n / D_n
    family) or 'auto'.
    """
    trunc = Fraction(trunc)
    if route in ("auto", "product"):
        res = _theta_diagonal(c, marking, sign, trunc)
        if res is None:
            res = _theta_pieces(c, marking, sign, trunc)
        if res is not None:
            return res.with_trunc_at_most(trunc)
        if route == "product":
            raise LatticeError("no product route for this coset")
    return _theta_enumerate(c, marking, sign, trunc)


def theta_union(cosets: Iterable[Coset], marking=None, sign=None, trunc=6, route="auto") -> JacobiSeries:
    total = None
    for c in cosets:
        t = theta(c, marking, sign, trunc, route)
        total = t if total is None else total + t
    return total


# glue ------------------------------------------------------------------------

def _frac_mod1(v: Sequence[Fraction]) -> Vec:
    return tuple(x - math.floor(x) for x in v)


def glue_classes(big, sub: Lattice) -> Dict[Vec, Vec]:
    """Map each class of big modulo sub to an ambient representative.

    ``big`` is a Lattice or Coset with an ambient embedding.  Classes are
    keyed by the sub-coordinates of their vectors reduced mod 1.  The class
    group is generated by the images of big's basis vectors, so closure under
    addition from the image of the shift enumerates every class.
    """
    coset = big if isinstance(big, Coset) else big.coset()
    lat = coset.lattice
    if lat.basis is None or sub.basis is None:
        raise LatticeError("glue needs ambient embeddings")
    for b in sub.basis:
        if not lat.contains(b):
            raise LatticeError("not a sublattice")
    gens = []
    for b in lat.basis:
        x = sub.coords(b)
        gens.append((_frac_mod1(x), b))
    start_amb = coset.ambient_shift()
    start = (_frac_mod1(sub.coords(start_amb)), start_amb)
    seen: Dict[Vec, Vec] = {start[0]: start[1]}
    frontier = [start]
    while frontier:
        nxt = []
        for key, rep in frontier:
            for gk, gb in gens:
                k2 = _frac_mod1([a + b for a, b in zip(key, gk)])
                if k2 not in seen:
                    r2 = tuple(a + b for a, b in zip(rep, gb))
                    seen[k2] = r2
                    nxt.append((k2, r2))
        frontier = nxt
    index = math.isqrt(int(sub.determinant() / lat.determinant()))
    if index * index != sub.determinant() / lat.determinant() or len(seen) != index:
        raise LatticeError("glue enumeration inconsistent with index")
    return dict(sorted(seen.items()))


def glue_image(big, sub: Lattice) -> List[Vec]:
    """Labels in sub*/sub (sub-coordinates mod 1) of the classes of big mod sub."""
    return sorted(glue_classes(big, sub))


def labels_to_words(labels: Iterable[Vec], p: int) -> List[Tuple[int, ...]]:
    """Scale mod-1 labels by p to words over F_p (balanced for p = 3)."""
    words = []
    for lab in labels:
        w = []
        for x in lab:
            v = x * p
            if v.denominator != 1:
                raise LatticeError("label not in (1/p)Z")
            v = int(v) % p
            if p == 3 and v == 2:
                v = -1
            w.append(v)
        words.append(tuple(w))
    return sorted(words)


def sublattice_from_vectors(vectors, name: str = "") -> Lattice:
    return Lattice.from_basis(vectors, name)


def orthogonal_sum(a: Lattice, b: Lattice, name: str = "") -> Lattice:
    r = a.rank + b.rank
    g = [[Fraction(0)] * r for _ in range(r)]
    for i in range(a.rank):
        for j in range(a.rank):
            g[i][j] = a.gram[i][j]
    for i in range(b.rank):
        for j in range(b.rank):
            g[a.rank + i][a.rank + j] = b.gram[i][j]
    basis = None
    if a.basis is not None and b.basis is not None:
        da, db = a.dim, b.dim
        basis = [tuple(row) + (Fraction(0),) * db for row in a.basis] + [(Fraction(0),) * da + tuple(row) for row in b.basis]
    return Lattice(g, basis, name or f"{a.name}+{b.name}")


def discriminant_group(lat: Lattice) -> List[Vec]:
    """Coordinates (mod 1) of representatives of L*/L, sorted, zero first."""
    dual = lat.dual_gram_basis()
    start = (Fraction(0),) * lat.rank
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for d in dual:
                w = _frac_mod1([a + b for a, b in zip(v, d)])
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return sorted(seen)
