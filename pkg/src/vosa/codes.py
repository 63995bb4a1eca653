"""Binary D-codes, the ternary Golay code, and marked weight enumerators."""

from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np


class CodeError(ValueError):
    """Raised when a code construction fails its self-check."""


class BinaryCode:
    """A binary linear code given by its full word list."""

    def __init__(self, length: int, words):
        self.length = length
        self.words = sorted({tuple(int(x) % 2 for x in w) for w in words})

    def __len__(self):
        return len(self.words)

    def __contains__(self, w):
        return tuple(int(x) % 2 for x in w) in set(self.words)

    def is_linear(self) -> bool:
        ws = set(self.words)
        zero = (0,) * self.length
        if zero not in ws:
            return False
        return all(tuple((a + b) % 2 for a, b in zip(u, v)) in ws for u in ws for v in ws)

    def generators(self) -> List[Tuple[int, ...]]:
        """A row-reduced basis over F_2."""
        return [tuple(int(x) for x in row) for row in _row_reduce(np.array(self.words or [[0] * self.length]), 2)]

    def to_json(self) -> dict:
        return {"q": 2, "n": self.length, "gens": [list(g) for g in self.generators()]}


def d_code_family(n: int) -> Tuple[BinaryCode, Dict[int, Tuple[int, ...]]]:
    """The glue code of D_{2n} over A_1^{2n} and the four coset words.

    Words satisfy c_i = c_{n+i} and have weight divisible by 4.
    """
    if n < 1:
        raise CodeError("n must be positive")
    words = []
    for half in itertools.product((0, 1), repeat=n):
        w = half + half
        if sum(w) % 4 == 0:
            words.append(w)
    cosets = {
        0: (0,) * (2 * n),
        1: (1,) * n + (0,) * n,
        2: (0,) * (n - 1) + (1,) + (0,) * (n - 1) + (1,),
        3: (1,) * (n - 1) + (0,) * n + (1,),
    }
    return BinaryCode(2 * n, words), cosets


def _row_reduce(m: np.ndarray, p: int) -> np.ndarray:
    m = np.array(m, dtype=np.int64) % p
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i, c] % p), None)
        if piv is None:
            continue
        m[[r, piv]] = m[[piv, r]]
        inv = pow(int(m[r, c]), -1, p)
        m[r] = (m[r] * inv) % p
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] = (m[i] - m[i, c] * m[r]) % p
        r += 1
        if r == rows:
            break
    return m[:r]


class TernaryCode:
    """A ternary linear code from a generator matrix.

    Words are stored with entries in {0, 1, -1} (the balanced representatives).
    """

    def __init__(self, generators, permutation: Optional[Sequence[int]] = None):
        g = _row_reduce(np.asarray(generators), 3)
        self.generators = g
        self.length = g.shape[1]
        self.dimension = g.shape[0]
        self.permutation = list(permutation) if permutation is not None else list(range(self.length))
        self._words = None

    @property
    def words(self) -> np.ndarray:
        if self._words is None:
            coeffs = np.array(list(itertools.product(range(3), repeat=self.dimension)), dtype=np.int64)
            w = (coeffs @ self.generators) % 3
            w[w == 2] = -1
            self._words = w
        return self._words

    def __len__(self):
        return 3**self.dimension

    def __contains__(self, word) -> bool:
        w = np.asarray(word) % 3
        return bool(np.any(np.all(self.words % 3 == w, axis=1)))

    def weight_distribution(self) -> Dict[int, int]:
        return dict(sorted(Counter(int(k) for k in np.count_nonzero(self.words, axis=1)).items()))

    def is_self_orthogonal(self) -> bool:
        g = self.generators
        return not np.any((g @ g.T) % 3)

    def minimum_weight(self) -> int:
        wts = np.count_nonzero(self.words, axis=1)
        return int(wts[wts > 0].min())

    def permuted(self, perm: Sequence[int]) -> "TernaryCode":
        """Code with coordinates reordered: new position i holds old position perm[i]."""
        perm = list(perm)
        composed = [self.permutation[p] for p in perm]
        return TernaryCode(self.generators[:, perm], composed)

    def sign_flipped(self, signs: Sequence[int]) -> "TernaryCode":
        s = np.asarray(signs, dtype=np.int64)
        return TernaryCode((self.generators * s) % 3, self.permutation)

    def to_json(self) -> dict:
        return {"q": 3, "n": self.length, "gens": [[int(x) for x in row] for row in self.generators]}


QUADRATIC_RESIDUES_11 = (1, 3, 4, 5, 9)


def _qr_generator_matrix() -> np.ndarray:
    # cyclic code of length 11 spanned by the shifts of the indicator of the
    # quadratic residues, extended by a coordinate making each word sum to 0
    p = 11
    base = np.zeros(p, dtype=np.int64)
    for r in QUADRATIC_RESIDUES_11:
        base[r] = 1
    rows = [np.roll(base, k) for k in range(p)]
    ext = [np.append(r, (-r.sum()) % 3) for r in rows]
    return np.array(ext) % 3


def golay12() -> TernaryCode:
    """The extended ternary Golay code, sign-normalized so (+^12) is a word."""
    code = TernaryCode(_qr_generator_matrix())
    if code.dimension != 6:
        raise CodeError("golay construction invalid")
    words = code.words
    full = words[np.count_nonzero(words, axis=1) == 12]
    if len(full) == 0:
        raise CodeError("golay construction invalid")
    # flipping coordinates by the signs of a full-weight word maps it to (+^12)
    signs = min(full.tolist())
    code = code.sign_flipped(signs)
    ok = (
        code.dimension == 6
        and code.is_self_orthogonal()
        and code.minimum_weight() == 6
        and (1,) * 12 in code
        and code.weight_distribution() == {0: 1, 6: 264, 9: 440, 12: 24}
    )
    if not ok:
        raise CodeError("golay construction invalid")
    return code


def golay_special_words(g: TernaryCode) -> np.ndarray:
    """The eleven words with first entry +, five further + entries, six -."""
    w = g.words
    mask = (w[:, 0] == 1) & (np.sum(w == 1, axis=1) == 6) & (np.sum(w == -1, axis=1) == 6)
    return w[mask]


def golay_lambda_basis(g: TernaryCode) -> List[List[Fraction]]:
    """Twelve vectors with entries +-1/2 and Gram matrix 3 times the identity.

    Built from the eleven special words plus the all-plus word; entry i of
    lambda is c_i/2.
    """
    special = golay_special_words(g)
    if len(special) != 11:
        raise CodeError("lambda basis invalid")
    rows = [list(r) for r in special.tolist()] + [[1] * g.length]
    basis = [[Fraction(int(x), 2) for x in row] for row in rows]
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            d = sum(x * y for x, y in zip(a, b))
            if d != (3 if i == j else 0):
                raise CodeError("lambda basis invalid")
    return basis


def find_split_permutation(g: TernaryCode) -> List[int]:
    """A coordinate permutation after which (+^6 -^6) is a word.

    Takes a word with six + and six - entries (first entry +) and lists the
    + coordinates before the - coordinates.
    """
    target = (1,) * 6 + (-1,) * 6
    if target in g:
        return list(range(g.length))
    special = golay_special_words(g)
    if len(special) == 0:
        raise CodeError("no balanced word")
    w = special[0]
    plus = [i for i in range(g.length) if w[i] == 1]
    minus = [i for i in range(g.length) if w[i] == -1]
    perm = plus + minus
    if target not in g.permuted(perm):
        raise CodeError("split permutation failed")
    return perm


class MarkedEnumerator:
    """Polynomial in X',Y',Z',X'',Y'',Z'' stored as exponent 6-tuples -> int."""

    VARS = ("X'", "Y'", "Z'", 'X"', 'Y"', 'Z"')

    def __init__(self, coeffs: Dict[Tuple[int, ...], int]):
        self.coeffs = {k: v for k, v in coeffs.items() if v}

    def __getitem__(self, exps) -> int:
        return self.coeffs.get(tuple(exps), 0)

    def __eq__(self, other):
        return isinstance(other, MarkedEnumerator) and self.coeffs == other.coeffs

    def total(self) -> int:
        return sum(self.coeffs.values())

    def evaluate(self, values: Sequence) -> object:
        acc = 0
        for exps, c in self.coeffs.items():
            term = c
            for v, e in zip(values, exps):
                term = term * v**e
            acc = acc + term
        return acc

    def unmarked(self) -> Dict[Tuple[int, int, int], int]:
        """Identify primed and double-primed variables."""
        out: Dict[Tuple[int, int, int], int] = {}
        for e, c in self.coeffs.items():
            k = (e[0] + e[3], e[1] + e[4], e[2] + e[5])
            out[k] = out.get(k, 0) + c
        return out

    def __repr__(self):
        parts = []
        for e, c in sorted(self.coeffs.items(), reverse=True):
            mono = "".join(f"{v}^{k}" for v, k in zip(self.VARS, e) if k)
            parts.append(f"{c}*{mono}")
        return " + ".join(parts)


def _counts(part: np.ndarray) -> Tuple[int, int, int]:
    return (int(np.sum(part == 0)), int(np.sum(part == 1)), int(np.sum(part == -1)))


def weight_enumerator(c: TernaryCode, marking: Optional[int] = None) -> MarkedEnumerator:
    """Complete weight enumerator, marked at split position ``marking``.

    Variable X counts zeros, Y counts + entries and Z counts - entries; the
    primed variables see the coordinates before the split, the double-primed
    ones the rest.  Without a marking all coordinates are primed.
    """
    if marking is not None and 2 * marking != c.length:
        raise CodeError("marking must split the coordinates into equal halves")
    out: Counter = Counter()
    for w in c.words:
        if marking is None:
            key = _counts(w) + (0, 0, 0)
        else:
            key = _counts(w[:marking]) + _counts(w[marking:])
        out[key] += 1
    return MarkedEnumerator(dict(out))


def ternary_dot(a, b) -> int:
    return int(np.dot(np.asarray(a), np.asarray(b)) % 3)


def _encode(rows: np.ndarray) -> np.ndarray:
    if rows.shape[1] == 0:
        return np.zeros(1, dtype=np.int64)
    pw = 3 ** np.arange(rows.shape[1], dtype=np.int64)
    return np.unique((rows % 3) @ pw)


def monomial_equivalence(a: TernaryCode, b: TernaryCode, transitive: int = 0
                         ) -> Tuple[List[int], List[int]]:
    """A coordinate map (perm, signs) carrying code a onto code b.

    A word w of a goes to the word v with v[perm[i]] = signs[i] * w[i].  The
    search is a backtrack on coordinates, pruned by comparing projections.
    With ``transitive = t`` the first t coordinates are pinned to themselves,
    which is legitimate when the automorphism group of b acts t-transitively
    (5 for the Golay code); the first sign is pinned since -1 fixes any code.
    """
    if a.length != b.length or len(a) != len(b):
        raise CodeError("codes have different parameters")
    if a.weight_distribution() != b.weight_distribution():
        raise CodeError("codes are not monomially equivalent")
    n = a.length
    wa, wb = a.words, b.words

    def ok(perm, signs) -> bool:
        k = len(perm)
        left = wa[:, :k] * np.asarray(signs, dtype=np.int64)
        return np.array_equal(_encode(left), _encode(wb[:, perm]))

    def rec(perm, signs):
        k = len(perm)
        if k == n:
            return perm, signs
        targets = [k] if k < transitive else [j for j in range(n) if j not in perm]
        for t in targets:
            for s in ((1,) if k == 0 else (1, -1)):
                p2, s2 = perm + [t], signs + [s]
                if ok(p2, s2):
                    res = rec(p2, s2)
                    if res is not None:
                        return res
        return None

    res = rec([], [])
    if res is None:
        raise CodeError("codes are not monomially equivalent")
    return res


def apply_monomial(words, perm: Sequence[int], signs: Sequence[int]) -> np.ndarray:
    w = np.asarray(words)
    out = np.zeros_like(w)
    for i, (p, s) in enumerate(zip(perm, signs)):
        out[:, p] = s * w[:, i]
    return out
