"""Bulk decompositions of lattice VOSAs under a commuting pair V' x V'', their
partition vectors, and the modular, spectral flow and elliptic genus checks."""

from __future__ import annotations

import cmath
import itertools
import math
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .codes import TernaryCode, find_split_permutation, golay12, golay_lambda_basis, monomial_equivalence
from .lattices import (
    ZSCALE,
    Coset,
    Lattice,
    LatticeError,
    Marking,
    SignCharacter,
    _enumerate_points,
    _inverse,
    a1_embedding,
    a1_power,
    d_coset,
    d_lattice,
    d_plus,
    discriminant_group,
    glue_classes,
    glue_image,
    labels_to_words,
    sqrt3_z,
    theta,
    z_lattice,
)
from .series import QUNIT, CycNum, EvalPoint, JacobiSeries, SeriesError, eta_power, eval_numeric

SECTORS = ("NS-NS", "NS-R", "R-NS", "R-R")
EXAMPLES = ("diagD", "diagA1", "diagVL", "diagF", "torusD", "tetrahedralK3", "golayD12", "gepner16")
DEFAULT_POINTS = (1j, cmath.exp(1j * math.pi / 3), 0.3 + 0.9j)

# the permutation matrices acting on (Z+_NS, Z-_NS, Z+_R, Z-_R)
BOLD_S = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.int64)
BOLD_T = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], dtype=np.int64)
ENTRY_LABELS = ("Z+NS-NS", "Z-NS-NS", "Z+R-R", "Z-R-R")
_ENTRY_SECTORS = (("NS-NS", False), ("NS-NS", True), ("R-R", False), ("R-R", True))

SMATRIX_MAX = 10**4
MULTIPLIERS = {"index": 1 / 3, "printed": 1 / 6}


class BulkError(ValueError):
    pass


# modules ----------------------------------------------------------------------

def _mod1(v) -> Tuple[Fraction, ...]:
    return tuple(Fraction(x) - math.floor(Fraction(x)) for x in v)


class Piece(NamedTuple):
    """One tensor factor V_{L+gamma}: coset, optional marking, parity for ch^-.

    ``parity`` None means norm parity exp(pi i lambda.lambda).
    """

    coset: Coset
    marking: Optional[Marking] = None
    parity: Optional[SignCharacter] = None

    def key(self):
        return (
            self.coset.lattice.gram,
            _mod1(self.coset.shift),
            self.marking.functional if self.marking is not None else (),
            self.parity.key() if self.parity is not None else (),
        )

    @property
    def sign_character(self) -> SignCharacter:
        return self.parity if self.parity is not None else SignCharacter.norm_parity()

    def marking_norm(self) -> Fraction:
        """|v|^2 for the vector v with lambda.v = marking(lambda)."""
        if self.marking is None:
            return Fraction(0)
        f = self.marking.functional
        gi = _inverse(self.coset.lattice.gram)
        r = len(f)
        return sum(f[i] * gi[i][j] * f[j] for i in range(r) for j in range(r))


class Module:
    """A module for V' (or V''): a direct sum of tensor products of pieces."""

    def __init__(self, terms: Sequence[Sequence[Piece]], label: str = ""):
        self.terms = tuple(tuple(t) for t in terms)
        if not self.terms:
            raise BulkError("empty module")
        ranks = {sum(p.coset.rank for p in t) for t in self.terms}
        if len(ranks) != 1:
            raise BulkError("module terms of different rank")
        self.rank = ranks.pop()
        self.label = label
        # tensor factors commute, so pieces are sorted inside each term
        self.key = tuple(sorted(tuple(sorted(p.key() for p in t)) for t in self.terms))

    @classmethod
    def single(cls, pieces: Sequence[Piece], label: str = "") -> "Module":
        return cls([pieces], label)

    def contains_vacuum(self) -> bool:
        return any(all(not any(_mod1(p.coset.shift)) for p in t) for t in self.terms)

    def marking_norm(self) -> Fraction:
        return max(sum(p.marking_norm() for p in t) for t in self.terms)

    def __repr__(self):
        return f"Module({self.label})"


class BulkSummand(NamedTuple):
    left: Module
    right: Module
    sector: str
    sign: int = 1
    word: Optional[Tuple[int, ...]] = None

    @property
    def label(self) -> str:
        return f"({self.left.label}, {self.right.label})"


class Embedding(NamedTuple):
    """Images of the factor lattices in the ambient space of the target.

    Each side is a list of (lattice, rows) with one row per basis vector;
    the rows of all parts are mutually orthogonal.
    """

    left: Tuple[Tuple[Lattice, Tuple[Tuple[Fraction, ...], ...]], ...]
    right: Tuple[Tuple[Lattice, Tuple[Tuple[Fraction, ...], ...]], ...]

    def swapped(self) -> "Embedding":
        return Embedding(self.right, self.left)


class BulkDecomposition:
    def __init__(self, example: str, n: Optional[int], left_vosa: str, right_vosa: str,
                 summands: Sequence[BulkSummand], c: Fraction, bosonic: bool = False, n2: bool = False,
                 embedding: Optional[Embedding] = None, targets: Optional[Dict[str, list]] = None,
                 smatrix_lattices: Sequence[Lattice] = (), validate: bool = True):
        self.example = example
        self.n = n
        self.left_vosa = left_vosa
        self.right_vosa = right_vosa
        self.summands = list(summands)
        self.c = Fraction(c)
        self.bosonic = bosonic
        self.n2 = n2
        self.embedding = embedding
        self.targets = dict(targets or {})
        self.smatrix_lattices = list(smatrix_lattices)
        for s in self.summands:
            if s.sector not in SECTORS:
                raise BulkError(f"unknown sector {s.sector!r}")
        if validate:
            vac = [s for s in self.summands
                   if s.sector == "NS-NS" and s.left.contains_vacuum() and s.right.contains_vacuum()]
            if len(vac) != 1:
                raise BulkError("vacuum summand must appear exactly once")

    def sector(self, name: str) -> List[BulkSummand]:
        return [s for s in self.summands if s.sector == name]

    def swapped(self) -> "BulkDecomposition":
        flip = {"NS-R": "R-NS", "R-NS": "NS-R"}
        sm = [BulkSummand(s.right, s.left, flip.get(s.sector, s.sector), s.sign, s.word) for s in self.summands]
        emb = self.embedding.swapped() if self.embedding is not None else None
        targets = {}
        if self.embedding is not None:
            # swap the two halves of the ambient space along with the labels
            targets = {k: [_swap_coset(c, self.embedding) for c in v] for k, v in self.targets.items()}
            emb = _swap_embedding(self.embedding)
        return BulkDecomposition(self.example, self.n, self.right_vosa, self.left_vosa, sm, self.c,
                                 self.bosonic, self.n2, emb, targets, self.smatrix_lattices)

    def dropped(self, index: int) -> "BulkDecomposition":
        """The same data with one summand removed (a negative control)."""
        sm = [s for i, s in enumerate(self.summands) if i != index]
        return BulkDecomposition(self.example, self.n, self.left_vosa, self.right_vosa, sm, self.c, self.bosonic,
                                 self.n2, self.embedding, self.targets, self.smatrix_lattices, validate=False)

    def with_flipped_parity(self, index: int) -> "BulkDecomposition":
        sm = list(self.summands)
        s = sm[index]
        sm[index] = BulkSummand(s.left, s.right, s.sector, -s.sign, s.word)
        return BulkDecomposition(self.example, self.n, self.left_vosa, self.right_vosa, sm, self.c, self.bosonic,
                                 self.n2, self.embedding, self.targets, self.smatrix_lattices, validate=False)

    def joint_words(self, sector: str = "NS-NS") -> List[Tuple[int, ...]]:
        return [s.word for s in self.sector(sector) if s.word is not None]

    def to_json(self) -> dict:
        return {
            "example": self.example,
            "n": self.n,
            "left_vosa": self.left_vosa,
            "right_vosa": self.right_vosa,
            "c": str(self.c),
            "bosonic": self.bosonic,
            "summands": [{"left": s.left.label, "right": s.right.label, "sector": s.sector,
                          "parity": "+" if s.sign == 1 else "-"} for s in self.summands],
        }

    def __repr__(self):
        return f"BulkDecomposition({self.example}, n={self.n}, {len(self.summands)} summands)"


def _ambient_dim(emb: Embedding) -> int:
    return len(emb.left[0][1][0])


def _half_sizes(emb: Embedding) -> Tuple[List[int], List[int]]:
    """Ambient coordinates touched by the left and right images."""
    def touched(parts):
        return sorted({k for _, rows in parts for r in rows for k, x in enumerate(r) if x})
    return touched(emb.left), touched(emb.right)


def _swap_perm(emb: Embedding) -> List[int]:
    left, right = _half_sizes(emb)
    if len(left) != len(right) or set(left) & set(right):
        raise BulkError("embedding halves are not swappable")
    n = _ambient_dim(emb)
    perm = list(range(n))
    for a, b in zip(left, right):
        perm[a], perm[b] = b, a
    return perm


def _permute_vec(v, perm):
    out = [Fraction(0)] * len(v)
    for i, x in enumerate(v):
        out[perm[i]] = x
    return tuple(out)


def _swap_embedding(emb: Embedding) -> Embedding:
    perm = _swap_perm(emb)
    def move(parts):
        return tuple((lat, tuple(_permute_vec(r, perm) for r in rows)) for lat, rows in parts)
    return Embedding(move(emb.right), move(emb.left))


def _swap_coset(c: Coset, emb: Embedding) -> Coset:
    perm = _swap_perm(emb)
    lat = c.lattice
    basis = [_permute_vec(b, perm) for b in lat.basis]
    nl = Lattice.from_basis(basis, lat.name)
    return nl.coset(_permute_vec(c.ambient_shift(), perm))


# characters of modules ------------------------------------------------------------

_THETA_CACHE: Dict[tuple, JacobiSeries] = {}
_CHAR_CACHE: Dict[tuple, JacobiSeries] = {}


def module_theta(m: Module, trunc, signed: bool = False, marked: bool = True) -> JacobiSeries:
    """Sum over terms of the product of piece theta series."""
    trunc = Fraction(trunc)
    key = (m.key, trunc, signed, marked)
    if key in _THETA_CACHE:
        return _THETA_CACHE[key]
    total = None
    for term in m.terms:
        prod = None
        for p in sorted(term, key=lambda p: p.key()):
            th = theta(p.coset, p.marking if marked else None, p.sign_character if signed else None, trunc)
            prod = th if prod is None else prod * th
        total = prod if total is None else total + prod
    _THETA_CACHE[key] = total
    return total


def module_character(m: Module, minus: bool = False, trunc=6) -> JacobiSeries:
    """ch^+ (minus=False) or ch^- of a module: theta / eta^rank, z marked."""
    trunc = Fraction(trunc)
    key = (m.key, minus, trunc)
    if key in _CHAR_CACHE:
        return _CHAR_CACHE[key]
    big = trunc + Fraction(m.rank, 24)
    th = module_theta(m, big, signed=minus)
    out = (th * eta_power(-m.rank, big)).with_trunc_at_most(trunc)
    _CHAR_CACHE[key] = out
    return out


def clear_caches():
    _THETA_CACHE.clear()
    _CHAR_CACHE.clear()


# constructors ------------------------------------------------------------------

def _place(vec, positions, dim) -> Tuple[Fraction, ...]:
    out = [Fraction(0)] * dim
    for p, x in zip(positions, vec):
        out[p] = Fraction(x)
    return tuple(out)


def _rows(lat: Lattice, positions, dim):
    return tuple(_place(b, positions, dim) for b in lat.basis)


def _transported_parity(coset: Coset, marking: Marking) -> SignCharacter:
    """R-sector parity exp(pi i (lambda^2 - J + v^2/4)) on a flowed coset.

    This is the norm parity of the NS preimage lambda - v/2 under spectral
    flow; lambda^2 must be constant mod 2 on the coset for it to be linear.
    """
    lat = coset.lattice
    x0 = coset.shift
    g = lat.gram
    gx = [sum(g[i][j] * x0[j] for j in range(lat.rank)) for i in range(lat.rank)]
    for i in range(lat.rank):
        if (g[i][i] + 2 * gx[i]) % 2 != 0:
            raise BulkError("norm not constant mod 2 on the R coset")
    f = marking.functional if marking is not None else (Fraction(0),) * lat.rank
    gi = _inverse(g)
    v2 = sum(f[i] * gi[i][j] * f[j] for i in range(lat.rank) for j in range(lat.rank))
    n0 = lat.inner(x0, x0)
    # 2 pi i (w.x - ref) = pi i (lambda^2 - J + v^2/4) with w = -f/2
    return SignCharacter.linear(tuple(-a / 2 for a in f), -(n0 + v2 / 4) / 2)


def _diag_d(n: int) -> BulkDecomposition:
    m = 2 * n
    sm = []
    for i in range(4):
        mod = Module.single([Piece(d_coset(m, i), None, SignCharacter.trivial())], f"D{m}+[{i}]")
        sm.append(BulkSummand(mod, mod, "NS-NS"))
    dim = 4 * n
    lat = d_lattice(m)
    emb = Embedding(((lat, _rows(lat, range(m), dim)),), ((lat, _rows(lat, range(m, dim), dim)),))
    return BulkDecomposition("diagD", n, f"V_D{m}", f"V_D{m}", sm, m, bosonic=True, embedding=emb,
                             targets={"NS-NS": [d_plus(dim).coset()]}, smatrix_lattices=[lat])


def _a1_pieces(bits, parity_trivial=True, marking_first=None, sector="NS"):
    a1 = a1_power(1)
    pieces = []
    for k, b in enumerate(bits):
        mk = marking_first if (k == 0 and marking_first is not None) else None
        c = Coset(a1, (Fraction(b, 2),))
        if parity_trivial:
            par = SignCharacter.trivial()
        elif sector == "R":
            par = _transported_parity(c, mk)
        else:
            par = None
        pieces.append(Piece(c, mk, par))
    return pieces


def _word_label(bits) -> str:
    return "".join(str(b) for b in bits)


def _diag_a1(n: int) -> BulkDecomposition:
    m = 2 * n
    sm = []
    for bits in itertools.product((0, 1), repeat=m):
        mod = Module.single(_a1_pieces(bits), f"A1^{m}+{_word_label(bits)}")
        sm.append(BulkSummand(mod, mod, "NS-NS", word=tuple(bits) * 2))
    dim = 4 * n
    left = tuple(_place([1, 1], (k, m + k), dim) for k in range(m))
    right = tuple(_place([1, -1], (k, m + k), dim) for k in range(m))
    emb = Embedding(((a1_power(m), left),), ((a1_power(m), right),))
    return BulkDecomposition("diagA1", n, f"L1(sl2)^{m}", f"L1(sl2)^{m}", sm, m, bosonic=True, embedding=emb,
                             targets={"NS-NS": [z_lattice(dim).coset()]}, smatrix_lattices=[a1_power(1)])


def vl_lattice(n: int) -> Lattice:
    """L = A1^(2n) u A1^(2n) + (1^(2n)), realized inside Z^(2n)."""
    a = a1_embedding(n)
    glue = tuple(Fraction(1) if k < n else Fraction(0) for k in range(2 * n))
    return Lattice.from_generators(list(a.basis) + [glue], f"L(A1^{2 * n})")


def _vl_module(bits, parity_trivial, marking_first=None, sector="NS") -> Module:
    comp = tuple(1 - b for b in bits)
    terms = [_a1_pieces(bits, parity_trivial, marking_first, sector),
             _a1_pieces(comp, parity_trivial, marking_first, sector)]
    return Module(terms, f"L+{_word_label(bits)}")


def _vl_embedding(n: int) -> Embedding:
    m = 2 * n
    dim = 4 * n
    a = a1_embedding(m)
    return Embedding(((a1_power(m), tuple(a.basis[:m])),), ((a1_power(m), tuple(a.basis[m:])),))


def _vl_words(m: int, odd: bool):
    for bits in itertools.product((0, 1), repeat=m):
        if bits[-1] == 0 and sum(bits) % 2 == (1 if odd else 0):
            yield bits


def _diag_vl(n: int) -> BulkDecomposition:
    if n % 2:
        raise BulkError("diagVL needs n even (n = 3 is tetrahedralK3)")
    m = 2 * n
    sm = []
    for bits in _vl_words(m, False):
        mod = _vl_module(bits, True)
        sm.append(BulkSummand(mod, mod, "NS-NS"))
    return BulkDecomposition("diagVL", n, f"V_L(n={n})", f"V_L(n={n})", sm, m, bosonic=True,
                             embedding=_vl_embedding(n), targets={"NS-NS": [d_plus(4 * n).coset()]},
                             smatrix_lattices=[vl_lattice(n)])


def _tetrahedral() -> BulkDecomposition:
    n, m = 3, 6
    mk = Marking((Fraction(2),))  # J = 2 x_1 on the first A1
    sm = []
    for bits in _vl_words(m, False):
        mod = _vl_module(bits, False, mk, "NS")
        sm.append(BulkSummand(mod, mod, "NS-NS"))
    for bits in _vl_words(m, True):
        mod = _vl_module(bits, False, mk, "R")
        sm.append(BulkSummand(mod, mod, "R-R"))
    d12 = d_plus(12)
    e12 = tuple(Fraction(int(k == 11)) for k in range(12))
    return BulkDecomposition("tetrahedralK3", n, "V_L(A1^6)", "V_L(A1^6)", sm, 6, n2=True,
                             embedding=_vl_embedding(n),
                             targets={"NS-NS": [d12.coset()], "R-R": [d12.coset(e12)]},
                             smatrix_lattices=[vl_lattice(n)])


def _fermion_parity_r(n: int) -> SignCharacter:
    return SignCharacter.linear_ambient(d_lattice(n), (Fraction(1, 2),) * n, ref=Fraction(n, 4))


def _diag_f(n: int) -> BulkDecomposition:
    sm = []
    par_r = _fermion_parity_r(n)
    for a, b in itertools.product((0, 2), repeat=2):
        left = Module.single([Piece(d_coset(n, a))], f"D{n}+[{a}]")
        right = Module.single([Piece(d_coset(n, b))], f"D{n}+[{b}]")
        sm.append(BulkSummand(left, right, "NS-NS"))
    for a, b in itertools.product((1, 3), repeat=2):
        left = Module.single([Piece(d_coset(n, a), None, par_r)], f"D{n}+[{a}]")
        right = Module.single([Piece(d_coset(n, b), None, par_r)], f"D{n}+[{b}]")
        sm.append(BulkSummand(left, right, "R-R"))
    dim = 2 * n
    lat = d_lattice(n)
    emb = Embedding(((lat, _rows(lat, range(n), dim)),), ((lat, _rows(lat, range(n, dim), dim)),))
    zl = z_lattice(dim)
    return BulkDecomposition("diagF", n, f"F({2 * n})", f"F({2 * n})", sm, n, embedding=emb,
                             targets={"NS-NS": [zl.coset()], "R-R": [zl.coset((Fraction(1, 2),) * dim)]},
                             smatrix_lattices=[lat])


def _torus_d(n: int) -> BulkDecomposition:
    m = 2 * n
    zl = z_lattice(n)
    mk = Marking((Fraction(1),) * n)
    ns_f = Piece(zl.coset(), mk)
    rc = zl.coset((Fraction(1, 2),) * n)
    r_f = Piece(rc, mk, _transported_parity(rc, mk))
    sm = []
    for i in range(4):
        # the D part is bosonic: trivial fermion parity in both sectors
        dp = Piece(d_coset(m, i), None, SignCharacter.trivial())
        mod = Module.single([dp, ns_f], f"D{m}+[{i}]xF({m})")
        sm.append(BulkSummand(mod, mod, "NS-NS"))
    for i in range(4):
        dp = Piece(d_coset(m, i), None, SignCharacter.trivial())
        mod = Module.single([dp, r_f], f"D{m}+[{i}]xF({m})tw")
        sm.append(BulkSummand(mod, mod, "R-R"))
    dim = 6 * n
    d = d_lattice(m)
    lpos_d, lpos_f = list(range(0, m)), list(range(m, 3 * n))
    rpos_d, rpos_f = list(range(3 * n, 3 * n + m)), list(range(3 * n + m, dim))
    emb = Embedding(((d, _rows(d, lpos_d, dim)), (zl, _rows(zl, lpos_f, dim))),
                    ((d, _rows(d, rpos_d, dim)), (zl, _rows(zl, rpos_f, dim))))
    big = d_plus(2 * m)
    basis = [_place(b, lpos_d + rpos_d, dim) for b in big.basis]
    basis += [_place([1], [k], dim) for k in lpos_f + rpos_f]
    target = Lattice.from_basis(basis, f"D{2 * m}+ + Z{m}")
    rshift = _place([Fraction(1, 2)] * (2 * n), lpos_f + rpos_f, dim)
    return BulkDecomposition("torusD", n, f"V_D{m} x F({m})", f"V_D{m} x F({m})", sm, 3 * n, n2=True,
                             embedding=emb, targets={"NS-NS": [target.coset()], "R-R": [target.coset(rshift)]},
                             smatrix_lattices=[d, zl])


# ternary examples

def _k_module(x: Sequence[Fraction], sector: str) -> Module:
    k1 = sqrt3_z(1)
    mk = Marking((Fraction(1),))
    pieces = []
    for xi in x:
        c = Coset(k1, (Fraction(xi),))
        par = _transported_parity(c, mk) if sector == "R" else None
        pieces.append(Piece(c, mk, par))
    lab = ",".join(str(Fraction(xi)) for xi in x)
    return Module.single(pieces, f"K+({lab})")


def _ternary_summands(pairs) -> List[BulkSummand]:
    sm = []
    sixth = Fraction(1, 6)
    for w1, w2 in pairs:
        x1 = [Fraction(c, 3) for c in w1]
        x2 = [Fraction(c, 3) for c in w2]
        word = tuple(int(c) for c in w1) + tuple(int(c) for c in w2)
        sm.append(BulkSummand(_k_module(x1, "NS"), _k_module(x2, "NS"), "NS-NS", word=word))
    for w1, w2 in pairs:
        x1 = [Fraction(c, 3) + sixth for c in w1]
        x2 = [Fraction(c, 3) + sixth for c in w2]
        word = tuple(int(c) for c in w1) + tuple(int(c) for c in w2)
        sm.append(BulkSummand(_k_module(x1, "R"), _k_module(x2, "R"), "R-R", word=word))
    return sm


class GolayFrame(NamedTuple):
    """The split copy of the Golay code and the matching K + K inside D12+."""

    code: TernaryCode
    basis: List[Tuple[Fraction, ...]]  # 12 orthogonal norm-3 vectors in D12+
    glue_to_code: Tuple[List[int], List[int]]
    split: List[int]


_FRAME: Optional[GolayFrame] = None


def golay_frame() -> GolayFrame:
    """Fix the embedding of K + K so its glue code is the split Golay code.

    The lambda vectors give some copy of the Golay code as glue; a monomial
    map onto the code of ``codes.golay12`` is found and applied to the
    lambda vectors, then coordinates are reordered so (+^6 -^6) is a word.
    """
    global _FRAME
    if _FRAME is not None:
        return _FRAME
    g = golay12()
    lam = golay_lambda_basis(g)
    glue_words = labels_to_words(glue_image(d_plus(12), Lattice.from_basis(lam)), 3)
    glue = TernaryCode(np.array(glue_words) % 3)
    perm, signs = monomial_equivalence(glue, g, transitive=5)
    nu: List[Optional[Tuple[Fraction, ...]]] = [None] * 12
    for i, (p, s) in enumerate(zip(perm, signs)):
        nu[p] = tuple(s * x for x in lam[i])
    split = find_split_permutation(g)
    basis = [nu[k] for k in split]
    _FRAME = GolayFrame(g.permuted(split), basis, (perm, signs), split)
    return _FRAME


def _golay() -> BulkDecomposition:
    fr = golay_frame()
    pairs = [(w[:6], w[6:]) for w in fr.code.words.tolist()]
    k6 = sqrt3_z(6)
    emb = Embedding(((k6, tuple(fr.basis[:6])),), ((k6, tuple(fr.basis[6:])),))
    d12 = d_plus(12)
    e12 = tuple(Fraction(int(k == 11)) for k in range(12))
    return BulkDecomposition("golayD12", None, "V_K", "V_K", _ternary_summands(pairs), 6, n2=True,
                             embedding=emb, targets={"NS-NS": [d12.coset()], "R-R": [d12.coset(e12)]},
                             smatrix_lattices=[sqrt3_z(1)])


def gepner_u_code() -> List[Tuple[int, ...]]:
    """U = {C in F_3^6 : sum c_i = 0}, balanced representatives."""
    out = []
    for w in itertools.product((0, 1, -1), repeat=6):
        if sum(w) % 3 == 0:
            out.append(w)
    return out


def _balanced(x: int) -> int:
    x %= 3
    return -1 if x == 2 else x


def _gepner() -> BulkDecomposition:
    pairs = []
    for a in (0, 1, -1):
        for c in gepner_u_code():
            pairs.append((tuple(_balanced(ci + a) for ci in c), tuple(_balanced(ci - a) for ci in c)))
    return BulkDecomposition("gepner16", None, "V_K", "V_K", _ternary_summands(pairs), 6, n2=True,
                             smatrix_lattices=[sqrt3_z(1)])


def build_bulk(example: str, n: Optional[int] = None) -> BulkDecomposition:
    """The bulk summand list of a named example."""
    if example not in EXAMPLES:
        raise BulkError(f"unknown example {example!r}")
    if example in ("diagD", "diagA1", "diagVL", "diagF", "torusD"):
        if n is None or n < 1:
            raise BulkError(f"{example} needs a positive n")
    if example == "diagD":
        return _diag_d(n)
    if example == "diagA1":
        return _diag_a1(n)
    if example == "diagVL":
        return _diag_vl(n)
    if example == "diagF":
        return _diag_f(n)
    if example == "torusD":
        return _torus_d(n)
    if example == "tetrahedralK3":
        return _tetrahedral()
    if example == "golayD12":
        return _golay()
    return _gepner()


# decomposition check ----------------------------------------------------------------

def _dense(s: JacobiSeries, units: int) -> np.ndarray:
    out = np.zeros(units, dtype=object)
    for (u, _), c in s._t.items():
        if u < 0:
            raise BulkError("negative exponent in theta series")
        if u < units:
            out[u] += int(c.to_fraction())
    return out


def _side_theta(parts, x_parts, trunc) -> JacobiSeries:
    prod = None
    for (lat, _), x in zip(parts, x_parts):
        th = theta(Coset(lat, x), None, None, trunc)
        prod = th if prod is None else prod * th
    return prod


def _project(parts, v) -> List[Tuple[Fraction, ...]]:
    """Coordinates of the orthogonal projection of v onto each part."""
    out = []
    for lat, rows in parts:
        b = [sum(r[k] * Fraction(v[k]) for k in range(len(v))) for r in rows]
        gi = _inverse(lat.gram)
        out.append(tuple(sum(gi[i][j] * b[j] for j in range(len(b))) for i in range(len(b))))
    return out


def _sub_lattice(emb: Embedding) -> Lattice:
    rows = [r for _, rs in emb.left for r in rs] + [r for _, rs in emb.right for r in rs]
    return Lattice.from_basis(rows, "S'+S''")


def _check_embedding(emb: Embedding):
    for lat, rows in emb.left + emb.right:
        g = [[sum(a * b for a, b in zip(r1, r2)) for r2 in rows] for r1 in rows]
        if tuple(tuple(r) for r in g) != lat.gram:
            raise BulkError("embedding rows do not match the factor Gram matrix")
    allrows = [r for _, rs in emb.left for r in rs]
    for r1 in allrows:
        for _, rs in emb.right:
            for r2 in rs:
                if sum(a * b for a, b in zip(r1, r2)):
                    raise BulkError("left and right images are not orthogonal")


def bigraded_theta_summands(b: BulkDecomposition, sector: str, trunc: Tuple) -> np.ndarray:
    t1, t2 = Fraction(trunc[0]), Fraction(trunc[1])
    n1, n2 = int(t1 * QUNIT), int(t2 * QUNIT)
    acc = np.zeros((n1, n2), dtype=object)
    groups: Dict[tuple, list] = {}
    for s in b.sector(sector):
        k = (s.left.key, s.right.key)
        if k in groups:
            groups[k][2] += 1
        else:
            groups[k] = [s.left, s.right, 1]
    for left, right, mult in groups.values():
        a = _dense(module_theta(left, t1, marked=False), n1)
        c = _dense(module_theta(right, t2, marked=False), n2)
        acc += mult * np.outer(a, c)
    return acc


def bigraded_theta_target(b: BulkDecomposition, target, trunc: Tuple, route: str = "glue") -> np.ndarray:
    """sum over lambda in the target of q'^(lambda'^2/2) q''^(lambda''^2/2)."""
    emb = b.embedding
    if emb is None:
        raise BulkError("no embedding recorded for this example")
    _check_embedding(emb)
    t1, t2 = Fraction(trunc[0]), Fraction(trunc[1])
    n1, n2 = int(t1 * QUNIT), int(t2 * QUNIT)
    acc = np.zeros((n1, n2), dtype=object)
    cosets = target if isinstance(target, (list, tuple)) else [target]
    if route == "glue":
        sub = _sub_lattice(emb)
        for c in cosets:
            for rep in glue_classes(c, sub).values():
                xl = _project(emb.left, rep)
                xr = _project(emb.right, rep)
                a = _dense(_side_theta(emb.left, xl, t1), n1)
                r = _dense(_side_theta(emb.right, xr, t2), n2)
                acc += np.outer(a, r)
        return acc
    if route != "enumerate":
        raise BulkError(f"unknown route {route!r}")
    # direct enumeration of target vectors of norm below 2 (t1 + t2)
    pl = [(np.array(rows, dtype=float), np.linalg.inv(np.array(lat.gram, dtype=float))) for lat, rows in emb.left]
    for c in cosets:
        X, _, _ = _enumerate_points(c, 2 * (t1 + t2))
        if len(X) == 0:
            continue
        lat = c.lattice
        basis = np.array(lat.basis, dtype=float)
        vecs = (np.asarray(X, dtype=float) + np.array(c.shift, dtype=float)) @ basis
        total = np.einsum("ij,ij->i", vecs, vecs)
        left = np.zeros(len(vecs))
        for rows, gi in pl:
            y = vecs @ rows.T
            left += np.einsum("ij,jk,ik->i", y, gi, y)
        ul = np.rint(left * QUNIT / 2).astype(np.int64)
        ur = np.rint((total - left) * QUNIT / 2).astype(np.int64)
        keep = (ul < n1) & (ur < n2)
        for i, j in zip(ul[keep], ur[keep]):
            acc[i, j] += 1
    return acc


def _first_diff(a: np.ndarray, b: np.ndarray):
    diff = np.argwhere(a != b)
    if len(diff) == 0:
        return None
    i, j = (int(x) for x in diff[np.lexsort((diff[:, 1], diff[:, 0]))][0])
    return {"bidegree": [str(Fraction(i, QUNIT)), str(Fraction(j, QUNIT))],
            "summands": int(a[i, j]), "target": int(b[i, j])}


def verify_decomposition(b: BulkDecomposition, target=None, trunc=(3, 3), sector: str = "NS-NS",
                         route: str = "glue") -> dict:
    """Compare the bigraded theta sum of the summands with that of the target."""
    if target is None:
        if sector not in b.targets:
            raise BulkError(f"no {sector} target recorded for {b.example}")
        target = b.targets[sector]
    lhs = bigraded_theta_summands(b, sector, trunc)
    rhs = bigraded_theta_target(b, target, trunc, route)
    mm = _first_diff(lhs, rhs)
    resid = 0 if mm is None else int(np.max(np.abs(lhs - rhs)))
    return {"example": b.example, "check": "verify_decomposition", "sector": sector,
            "trunc": [str(Fraction(t)) for t in trunc], "route": route,
            "residual": float(resid), "pass": mm is None, "first_mismatch": mm}


# partition vectors --------------------------------------------------------------------

class PartitionVector:
    """(Z+_NS, Z-_NS, Z+_R, Z-_R); each entry a list of (left, right, minus, coeff)."""

    def __init__(self, b: BulkDecomposition):
        self.bulk = b
        self.entries: List[List[Tuple[Module, Module, bool, int]]] = []
        for sector, minus in _ENTRY_SECTORS:
            src = "NS-NS" if (b.bosonic and sector == "R-R") else sector
            use_minus = minus and not (b.bosonic and sector == "R-R")
            groups: Dict[tuple, list] = {}
            for s in b.sector(src):
                k = (s.left.key, s.right.key)
                w = s.sign if use_minus else 1
                if k in groups:
                    groups[k][3] += w
                else:
                    groups[k] = [s.left, s.right, use_minus, w]
            self.entries.append([tuple(g) for g in groups.values() if g[3]])

    def evaluate(self, tau: complex, u: complex = 0, trunc=6) -> Tuple[np.ndarray, float]:
        """Numeric values of the four entries at (u, tau) and a tail bound."""
        vals = np.zeros(4, dtype=complex)
        bound = 0.0
        for k, entry in enumerate(self.entries):
            for left, right, minus, coeff in entry:
                lv, lb = _module_value(left, minus, u, tau, trunc, False)
                rv, rb = _module_value(right, minus, u, tau, trunc, True)
                vals[k] += coeff * lv * rv
                bound += abs(coeff) * (abs(lv) * rb + abs(rv) * lb + lb * rb)
        return vals, bound

    def bigraded(self, k: int, trunc=2, tshift: int = 0) -> Dict[Tuple[int, int], JacobiSeries]:
        """Entry k as {(q''-units, z''): left series}, optionally at tau + tshift."""
        return _bigraded(self.entries[k], trunc, tshift=tshift)


_VALUE_CACHE: Dict[tuple, Tuple[complex, float]] = {}


def _module_value(m: Module, minus: bool, u: complex, tau: complex, trunc, conj: bool):
    key = (m.key, minus, complex(u), complex(tau), Fraction(trunc), conj)
    if key in _VALUE_CACHE:
        return _VALUE_CACHE[key]
    ch = module_character(m, minus, trunc)
    # z-exponents carry ZSCALE * J, so evaluate at u / ZSCALE
    val, bound = eval_numeric(ch, EvalPoint(complex(u) / ZSCALE, tau), conjugate_coeffs=conj, tol=math.inf)
    _VALUE_CACHE[key] = (val, bound)
    return val, bound


def _bigraded(entry, trunc, tshift: int = 0, flow: Optional[Fraction] = None,
              zspec_right: bool = False) -> Dict[Tuple[int, int], JacobiSeries]:
    """Expand sum coeff * left (x) right as right-term keyed left series."""
    trunc = Fraction(trunc)
    by_right: Dict[tuple, list] = {}
    for left, right, minus, coeff in entry:
        ch = _char_for(left, minus, trunc, flow)
        if tshift:
            ch = ch.tau_shift(tshift)
        ch = ch.scale(coeff)
        k = (right.key, minus)
        if k in by_right:
            by_right[k][1] = by_right[k][1] + ch
        else:
            by_right[k] = [right, ch]
    out: Dict[Tuple[int, int], JacobiSeries] = {}
    for (rkey, minus), (right, agg) in by_right.items():
        rc = _char_for(right, minus, trunc, flow)
        if zspec_right:
            rc = rc.specialize_z(1)
        for (u, l), c in rc._t.items():
            # antiholomorphic factor at tau'' = -conj(tau) - tshift
            cc = c * CycNum.root_of_unity(-u * tshift) if tshift else c
            key = (u, l)
            term = agg.scale(cc)
            out[key] = out[key] + term if key in out else term
    return {k: v for k, v in out.items() if not v.is_zero()}


def _char_for(m: Module, minus: bool, trunc: Fraction, flow: Optional[Fraction]) -> JacobiSeries:
    if flow is None:
        return module_character(m, minus, trunc)
    return flowed_character(m, minus, trunc, flow)


def _bigraded_diff(x: dict, y: dict):
    """Largest coefficient difference and the first differing term."""
    worst = 0.0
    first = None
    for key in sorted(set(x) | set(y)):
        a = x.get(key)
        b = y.get(key)
        if a is None:
            a = JacobiSeries({}, b.trunc)
        if b is None:
            b = JacobiSeries({}, a.trunc)
        if a.trunc != b.trunc:
            raise BulkError("truncation mismatch in bigraded comparison")
        d = a - b
        for (u, l), c in d._t.items():
            worst = max(worst, abs(complex(c)))
            if first is None:
                first = {"right": [str(Fraction(key[0], QUNIT)), key[1]],
                         "left": [str(Fraction(u, QUNIT)), l], "difference": repr(c)}
    return worst, first


# modularity ----------------------------------------------------------------------------

AUTO_TRUNCS = (6, 8, 10, 12)


def modular_check(b: BulkDecomposition, points=DEFAULT_POINTS, tol: float = 1e-6, trunc=None, u: complex = 0,
                  t_trunc=2, check_s: bool = True, check_t: bool = True, t_power: int = 1,
                  multiplier: str = "index") -> dict:
    """Residuals of S.Z(u/tau, -1/tau) (with multiplier) and T^k.Z(tau+k) against Z.

    ``trunc`` None tries the orders in AUTO_TRUNCS until the tail bound is
    below ``tol``.  ``multiplier`` "index" uses
    exp(-pi i (c/3)(u^2/tau - ubar^2/taubar)), the factor for index c/6 with
    z = exp(2 pi i u); "printed" uses c/6 in place of c/3 and only agrees at
    u = 0.
    """
    if multiplier not in MULTIPLIERS:
        raise BulkError(f"unknown multiplier {multiplier!r}")
    pv = PartitionVector(b)
    report = {"example": b.example, "check": "modular", "points": [], "residual": 0.0, "tail_bound": 0.0,
              "u": [complex(u).real, complex(u).imag], "multiplier": multiplier}
    worst = 0.0
    bound = 0.0
    first = None
    if check_s:
        orders = AUTO_TRUNCS if trunc is None else (trunc,)
        for k, tr in enumerate(orders):
            rows, worst, first, bound = _s_check(pv, b.c, points, u, tr, multiplier)
            if bound <= tol:
                break
            if k == len(orders) - 1:
                raise SeriesError("insufficient truncation")
        report["points"] = rows
        report["trunc"] = str(Fraction(tr))
    if check_t:
        t_res, t_first = _t_check(pv, t_trunc, t_power)
        report["t_residual"] = t_res
        report["t_power"] = t_power
        if t_res > worst:
            worst = t_res
            first = t_first
    report["residual"] = worst
    report["tail_bound"] = bound
    report["pass"] = worst < tol and bound < tol
    report["first_mismatch"] = first if worst >= tol else None
    return report


def _s_check(pv: PartitionVector, c: Fraction, points, u, trunc, multiplier: str):
    rows = []
    worst = 0.0
    first = None
    bound = 0.0
    u = complex(u)
    for tau in points:
        tau = complex(tau)
        z, bz = pv.evaluate(tau, u, trunc)
        zs, bs = pv.evaluate(-1 / tau, u / tau, trunc)
        du = u ** 2 / tau - u.conjugate() ** 2 / tau.conjugate()
        mult = cmath.exp(-1j * math.pi * float(c) * MULTIPLIERS[multiplier] * du)
        diff = np.abs(mult * (BOLD_S @ zs) - z)
        res = float(np.max(diff))
        bnd = bz + abs(mult) * bs
        if res > worst:
            worst = res
            first = {"point": [tau.real, tau.imag], "entry": ENTRY_LABELS[int(np.argmax(diff))]}
        bound = max(bound, bnd)
        rows.append({"tau": [tau.real, tau.imag], "residual": res, "tail_bound": bnd,
                     "values": [[v.real, v.imag] for v in z]})
    return rows, worst, first, bound


def _t_check(pv: PartitionVector, trunc, power: int = 1) -> Tuple[float, Optional[dict]]:
    """Exact comparison of T^k.Z(tau + k) with Z(tau) as bigraded series."""
    worst = 0.0
    first = None
    tk = np.linalg.matrix_power(BOLD_T, power)
    for k in range(4):
        j = int(np.argmax(tk[k]))
        lhs = pv.bigraded(j, trunc, tshift=power)
        rhs = pv.bigraded(k, trunc)
        w, f = _bigraded_diff(lhs, rhs)
        if w > worst:
            worst = w
            first = dict(f, entry=ENTRY_LABELS[k])
    return worst, first


def s_squared_identity() -> bool:
    return bool(np.array_equal(BOLD_S @ BOLD_S, np.eye(4, dtype=np.int64)))


# lattice S-matrices --------------------------------------------------------------------

class SMatrix(NamedTuple):
    labels: List[Tuple[Fraction, ...]]
    matrix: List[List[CycNum]]
    real: bool
    unitary: Optional[bool]

    def numeric(self) -> np.ndarray:
        return np.array([[complex(x) for x in row] for row in self.matrix])

    def to_json(self) -> dict:
        return {"labels": [[str(x) for x in lab] for lab in self.labels],
                "real": self.real, "unitary": self.unitary,
                "matrix": [[[complex(x).real, complex(x).imag] for x in row] for row in self.matrix]}


def _inv_sqrt(n: int) -> CycNum:
    """1/sqrt(n) in Q(zeta_24) for n = 2^a 3^b m^2."""
    k = n
    sq = 1
    f = 2
    while f * f <= k:
        while k % (f * f) == 0:
            k //= f * f
            sq *= f
        f += 1
    if k == 1:
        root = CycNum.rational(1)
    elif k == 2:
        root = CycNum.sqrt2()
    elif k == 3:
        root = CycNum.sqrt3()
    elif k == 6:
        root = CycNum.sqrt2() * CycNum.sqrt3()
    else:
        raise BulkError("normalization leaves the coefficient field")
    return (root * sq).inverse()


def lattice_smatrix(lat: Lattice, check_unitary: bool = True) -> SMatrix:
    """S_{gamma delta} = |L*/L|^(-1/2) exp(-2 pi i gamma.delta) over the discriminant group."""
    if not lat.is_integral():
        raise BulkError("lattice must be integral")
    det = lat.determinant()
    if det > SMATRIX_MAX:
        raise BulkError("discriminant too large")
    labels = discriminant_group(lat)
    size = len(labels)
    if size > SMATRIX_MAX:
        raise BulkError("discriminant too large")
    norm = _inv_sqrt(size)
    mat = []
    for g in labels:
        row = []
        for d in labels:
            row.append(CycNum.exp_pi_i(-2 * lat.inner(g, d)) * norm)
        mat.append(row)
    real = all(x == x.conjugate() for row in mat for x in row)
    unitary = None
    if check_unitary:
        unitary = True
        for i in range(size):
            for j in range(size):
                acc = CycNum.rational(0)
                for k in range(size):
                    acc = acc + mat[i][k] * mat[j][k].conjugate()
                if acc != CycNum.rational(1 if i == j else 0):
                    unitary = False
    return SMatrix(labels, mat, real, unitary)


def weil_real_criterion(lat: Lattice) -> bool:
    """Inner products on the dual in (1/2)Z: the sufficient reality criterion."""
    dual = lat.dual_gram_basis()
    return all((2 * lat.inner(a, b)).denominator == 1 for a in dual for b in dual)


# hypothesis check ----------------------------------------------------------------------

def hypothesis_check(b: BulkDecomposition, trunc=Fraction(3, 2)) -> dict:
    """L0' - L0'' mod 1 on even and odd states of each summand, and S reality.

    Even states must sit in class 0 and odd NS-NS states in class 1/2.  When
    this fails, ``t_order`` is the least k with exp(2 pi i k (L0' - L0''))
    equal to (-1)^(kF) on every state, i.e. Z is invariant under T^k.
    """
    trunc = Fraction(trunc)
    seen: Dict[tuple, dict] = {}
    rows = []
    ok_all = True
    even_all, odd_all = set(), set()
    for s in b.summands:
        key = (s.left.key, s.right.key, s.sector, s.sign)
        if key not in seen:
            seen[key] = _summand_classes(s, trunc, b.bosonic)
        res = seen[key]
        ok_all = ok_all and res["ok"]
        if s.sector == "NS-NS":
            even_all.update(Fraction(x) for x in res["even_classes"])
            odd_all.update(Fraction(x) for x in res["odd_classes"])
        else:
            # T fixes the R-R entries, so every R-R state needs k (L0' - L0'') in Z
            even_all.update(Fraction(x) for x in res["even_classes"] + res["odd_classes"])
        rows.append(dict(res, summand=s.label, sector=s.sector))
    odd_shift = Fraction(0) if b.bosonic else Fraction(1, 2)
    t_order = None
    # odd k swaps the NS entries, even k fixes them

    for k in range(1, QUNIT + 1):
        if all((k * x).denominator == 1 for x in even_all) and \
                all((k * (x - odd_shift)).denominator == 1 for x in odd_all):
            t_order = k
            break
    reality = [lattice_smatrix(lat, check_unitary=False).real for lat in b.smatrix_lattices]
    s_real = all(reality)
    if ok_all and s_real:
        verdict = "potential"
    elif b.n2 and t_order is not None:
        verdict = "quasi-potential"
    else:
        verdict = "fails hypotheses"
    return {"example": b.example, "check": "hypothesis", "congruence": ok_all, "right_s_real": s_real,
            "t_order": t_order, "classification": verdict, "pass": ok_all, "summands": rows,
            "residual": 0.0 if ok_all else 1.0,
            "first_mismatch": next((r for r in rows if not r["ok"]), None)}


def _summand_classes(s: BulkSummand, trunc: Fraction, bosonic: bool) -> dict:
    lp = module_character(s.left, False, trunc).specialize_z(1)
    rp = module_character(s.right, False, trunc).specialize_z(1)
    lm = module_character(s.left, True, trunc).specialize_z(1)
    rm = module_character(s.right, True, trunc).specialize_z(1)
    even, odd = set(), set()
    zero = CycNum.rational(0)
    for (a, _), ca in lp._t.items():
        for (bb, _), cb in rp._t.items():
            plus = ca * cb
            minus = lm._t.get((a, 0), zero) * rm._t.get((bb, 0), zero) * s.sign
            cls = Fraction((a - bb) % QUNIT, QUNIT)
            if not (plus + minus).is_zero():
                even.add(cls)
            if not (plus - minus).is_zero():
                odd.add(cls)
    if s.sector == "R-R" or bosonic:
        ok = even <= {Fraction(0)} and odd <= {Fraction(0)}
    else:
        ok = even <= {Fraction(0)} and odd <= {Fraction(1, 2)}
    return {"even_classes": sorted(str(x) for x in even), "odd_classes": sorted(str(x) for x in odd), "ok": ok}


# spectral flow ---------------------------------------------------------------------------

def _flow_source_trunc(m: Module, trunc: Fraction, c: Fraction) -> Fraction:
    # a source term at level n has |J| <= |v| sqrt(2 (n + rank/24)) and lands at
    # >= n - |v| sqrt(2 (n + rank/24)) / 2 + c/24, increasing once
    # n + rank/24 >= |v|^2 / 8
    v = math.sqrt(float(m.marking_norm()))
    r24 = m.rank / 24
    src = Fraction(trunc)
    while True:
        n = float(src)
        low = n - v * math.sqrt(2 * max(n + r24, 0.0)) / 2 + float(c) / 24
        if low >= float(trunc) + 1e-9 and n + r24 >= v * v / 8:
            return src
        src += Fraction(1, 2)


_FLOW_CACHE: Dict[tuple, JacobiSeries] = {}


def flowed_character(m: Module, minus: bool, trunc, c) -> JacobiSeries:
    """z^(c/6) q^(c/24) ch(u + tau/2, tau) through trunc."""
    trunc = Fraction(trunc)
    c = Fraction(c)
    key = (m.key, minus, trunc, c)
    if key in _FLOW_CACHE:
        return _FLOW_CACHE[key]
    src = _flow_source_trunc(m, trunc, c)
    ch = module_character(m, minus, src)
    pre = c / 24
    zshift = c / 6 * ZSCALE
    if zshift.denominator != 1:
        raise BulkError("spectral flow prefactor off the z-grid")
    # z -> z q^(1/2) moves z^l (l = ZSCALE J) by q^(l / (2 ZSCALE))
    out = ch.z_flow(1, Fraction(1, 2 * ZSCALE), trunc - pre).shift(pre, int(zshift)).with_trunc_at_most(trunc)
    _FLOW_CACHE[key] = out
    return out


def spectral_flow_symmetry_check(b: BulkDecomposition, trunc=3) -> dict:
    """Z^(+-)_RR against the flowed Z^(+-)_NS, termwise as bigraded series."""
    if not b.n2:
        raise BulkError("example carries no N=2 marking")
    pv = PartitionVector(b)
    trunc = Fraction(trunc)
    worst = 0.0
    first = None
    for ns, rr in ((0, 2), (1, 3)):
        flowed = _bigraded(pv.entries[ns], trunc, flow=b.c)
        direct = _bigraded(pv.entries[rr], trunc)
        w, f = _bigraded_diff(flowed, direct)
        if w > worst:
            worst = w
            first = dict(f, entry=ENTRY_LABELS[rr])
    return {"example": b.example, "check": "spectral_flow", "trunc": str(trunc), "residual": worst,
            "pass": worst == 0.0, "first_mismatch": first}


# elliptic genus ---------------------------------------------------------------------------

def elliptic_genus(b: BulkDecomposition, trunc=4) -> JacobiSeries:
    """ch^-[R-R](u, tau, 0, -conj tau): the right factor must reduce to a constant."""
    trunc = Fraction(trunc)
    if b.bosonic or not b.sector("R-R"):
        raise BulkError("no R-R sector")
    pv = PartitionVector(b)
    big = _bigraded(pv.entries[3], trunc, zspec_right=True)
    for (u, _), ser in big.items():
        if u != 0 and not ser.is_zero():
            raise BulkError("not holomorphic")
    return big.get((0, 0), JacobiSeries({}, trunc))


def theta_jacobi(i: int, trunc) -> JacobiSeries:
    """theta_i(tau, z) for i = 1..4 with y^(1/2) stored as z^3 (ZSCALE = 6)."""
    trunc = Fraction(trunc)
    terms = {}
    bound = int(math.isqrt(int(8 * trunc) + 1)) + 3
    for k in range(-bound, bound + 1):
        if i in (1, 2):
            r = Fraction(2 * k + 1, 2)
        else:
            r = Fraction(k)
        e = r * r / 2
        if e >= trunc:
            continue
        if i == 1:
            c = CycNum.exp_pi_i(Fraction(k)) * CycNum.i()
            c = c * -1
        elif i == 4:
            c = CycNum.exp_pi_i(Fraction(k))
        else:
            c = CycNum.rational(1)
        key = (e, int(r * ZSCALE))
        terms[key] = terms[key] + c if key in terms else c
    return JacobiSeries(terms, trunc)


def phi01(trunc=4) -> JacobiSeries:
    """phi_{0,1} = 4 sum_{i=2,3,4} (theta_i(tau,z) / theta_i(tau,0))^2."""
    trunc = Fraction(trunc)
    big = trunc + 1
    total = None
    for i in (2, 3, 4):
        th = theta_jacobi(i, big)
        r = th * th.specialize_z(1).inverse()
        sq = (r * r).scale(4)
        total = sq if total is None else total + sq
    return total.with_trunc_at_most(trunc)


def jacobi_shift_check(e: JacobiSeries, index: int = 1, lambdas=(-2, -1, 1, 2)) -> dict:
    """c(n, r) = c(n + lam r + index lam^2, r + 2 index lam) on stored coefficients."""
    tr = e.trunc
    fails = []
    checked = 0
    coeffs = {(Fraction(u, QUNIT), Fraction(l, ZSCALE)): c for (u, l), c in e._t.items()}
    levels = sorted({n for n, _ in coeffs})
    rs = sorted({r for _, r in coeffs})
    rmax = max((abs(r) for r in rs), default=0) + 4
    for n in levels:
        for r2 in range(-2 * int(rmax), 2 * int(rmax) + 1):
            r = Fraction(r2, 2)
            for lam in lambdas:
                n2 = n + lam * r + index * lam * lam
                r_new = r + 2 * index * lam
                if n2 < 0 or n2 >= tr or n >= tr:
                    continue
                a = coeffs.get((n, r), CycNum.rational(0))
                bb = coeffs.get((n2, r_new), CycNum.rational(0))
                checked += 1
                if a != bb:
                    fails.append([str(n), str(r), lam])
    return {"check": "jacobi_shift", "pass": not fails and checked > 0, "checked": checked,
            "first_mismatch": fails[0] if fails else None}


def genus_report(b: BulkDecomposition, trunc=4, phi_trunc=3) -> dict:
    e = elliptic_genus(b, trunc)
    e0 = e.specialize_z(1)
    const = e0.coeff(0).to_fraction() if e0.coeff(0).is_rational() else None
    constant = all(k[0] == 0 for k in e0._t)
    target = phi01(phi_trunc).scale(Fraction(const, 12)) if const is not None else None
    mm = e.with_trunc_at_most(phi_trunc).first_mismatch(target) if target is not None else "n/a"
    shift = jacobi_shift_check(e)
    ok = constant and mm is None and (shift["pass"] or e.is_zero())
    return {"example": b.example, "check": "elliptic_genus", "E0": str(const), "constant_in_tau": constant,
            "equals_multiple_of_phi01": mm is None, "phi01_multiple": str(Fraction(const, 12)) if const is not None else None,
            "shift_identity": shift["pass"], "pass": ok, "residual": 0.0 if ok else 1.0,
            "series": e.to_json(), "first_mismatch": None if mm is None else str(mm)}
