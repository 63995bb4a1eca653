"""Twelve free fermions b_i, c_i (i = 1..6) on a truncated NS Fock space.

Modes satisfy {b_{i,r}, c_{j,s}} = delta_{ij} delta_{r+s,0}.  States are
bitmasks over creation modes (level r in 1/2 + Z, 0 < r <= cutoff); the bit
order is the canonical ordering of the creation operators.  Composite modes
act exactly on each basis state; only their final output is truncated.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from . import n4
from .series import CycNum

HALF = Fraction(1, 2)
MAX_DIM = 10**6

Vector = Dict[int, Fraction]


class FreeFieldError(ValueError):
    pass


def fock_dimension(cutoff) -> int:
    """Coefficient sum of prod_{r <= cutoff} (1 + x^r)^12 through x^cutoff."""
    n = int(Fraction(cutoff) * 2)
    poly = [0] * (n + 1)
    poly[0] = 1
    for r in range(1, n + 1, 2):
        for _ in range(12):
            for i in range(n, r - 1, -1):
                poly[i] += poly[i - r]
    return sum(poly)


class Gen(NamedTuple):
    """A generating field: kind 'b' or 'c', index 1..6, derivative order."""

    kind: str
    index: int
    deriv: int = 0


def _deriv_factor(d: int, r: Fraction) -> Fraction:
    # (d^d psi)_r = (-1)^d prod_{j<d} (r + 1/2 + j) psi_r
    out = Fraction(1)
    for j in range(d):
        out *= -(r + HALF + j)
    return out


class FockSpace:
    """NS Fock space of F(12) truncated at total level <= cutoff."""

    def __init__(self, cutoff):
        cutoff = Fraction(cutoff)
        if cutoff < 0 or (2 * cutoff).denominator != 1:
            raise FreeFieldError("cutoff must be a non-negative multiple of 1/2")
        dim = fock_dimension(cutoff)
        if dim > MAX_DIM:
            raise FreeFieldError("cutoff too large")
        self.cutoff = cutoff
        self.nlevels = int(cutoff + HALF) if cutoff > 0 else 0
        self._levels: Dict[int, Fraction] = {}
        self.basis: List[int] = sorted(self._enumerate(), key=lambda s: (self.level(s), s))
        self.index = {s: k for k, s in enumerate(self.basis)}
        self._cache: Dict[tuple, Tuple[Vector, bool]] = {}

    # bits: level index L (r = L + 1/2), slot 0..5 for b_1..b_6 and 6..11 for c_1..c_6
    @staticmethod
    def bit(kind: str, i: int, r: Fraction) -> int:
        slot = (i - 1) + (0 if kind == "b" else 6)
        return int(r - HALF) * 12 + slot

    @staticmethod
    def describe_bit(bit: int) -> Tuple[str, int, Fraction]:
        lev, slot = divmod(bit, 12)
        return ("b" if slot < 6 else "c", slot % 6 + 1, Fraction(2 * lev + 1, 2))

    def level(self, state: int) -> Fraction:
        lv = self._levels.get(state)
        if lv is None:
            lv = self._levels[state] = self._level(state)
        return lv

    def _level(self, state: int) -> Fraction:
        tot = Fraction(0)
        b = 0
        while state >> b:
            if (state >> b) & 1:
                tot += Fraction(2 * (b // 12) + 1, 2)
            b += 1
        return tot

    def _enumerate(self):
        bits = list(range(12 * self.nlevels))
        lv = [Fraction(2 * (b // 12) + 1, 2) for b in bits]
        out = []

        def rec(start, state, level):
            out.append(state)
            for b in range(start, len(bits)):
                if level + lv[b] <= self.cutoff:
                    rec(b + 1, state | (1 << b), level + lv[b])

        rec(0, 0, Fraction(0))
        return out

    @property
    def dim(self) -> int:
        return len(self.basis)

    def describe(self, state: int) -> str:
        if state == 0:
            return "|0>"
        ops = []
        b = 0
        while state >> b:
            if (state >> b) & 1:
                k, i, r = self.describe_bit(b)
                ops.append(f"{k}{i}_{-r}")
            b += 1
        return " ".join(ops) + "|0>"

    # elementary modes ----------------------------------------------------

    def apply_mode(self, kind: str, i: int, r: Fraction, state: int):
        """Return (sign, new_state), None for zero, or 'leak' above the cutoff."""
        r = Fraction(r)
        if r < 0:
            if -r > self.cutoff:
                return "leak"
            b = self.bit(kind, i, -r)
            if (state >> b) & 1:
                return None
            sign = -1 if bin(state & ((1 << b) - 1)).count("1") % 2 else 1
            return sign, state | (1 << b)
        if r > self.cutoff:
            return None
        other = "c" if kind == "b" else "b"
        b = self.bit(other, i, r)
        if not (state >> b) & 1:
            return None
        sign = -1 if bin(state & ((1 << b) - 1)).count("1") % 2 else 1
        return sign, state & ~(1 << b)

    def elementary(self, kind: str, i: int, r) -> "ModeMatrix":
        return ModeMatrix.from_action(self, f"{kind}{i}_{r}", lambda s: self._apply_seq([(kind, i, Fraction(r))], s))

    def _apply_seq(self, ops, state: int) -> Tuple[Vector, bool]:
        """Apply ops (leftmost acts last) to a basis state."""
        sign = 1
        for kind, i, r in reversed(ops):
            res = self.apply_mode(kind, i, r, state)
            if res is None:
                return {}, False
            if res == "leak":
                return {}, True
            s, state = res
            sign *= s
        return {state: Fraction(sign)}, False

    # composite modes -----------------------------------------------------

    def composite_action(self, field: "Field", n, state: int) -> Tuple[Vector, bool]:
        key = (field.name, Fraction(n), state)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        out: Vector = {}
        leaked = False
        if self.level(state) - Fraction(n) > self.cutoff:
            # the output level is level - n, outside the truncated space
            self._cache[key] = ({}, True)
            return {}, True
        for coeff, mono in field.terms:
            v, lk = self._monomial_action(mono, Fraction(n), state)
            leaked |= lk
            for s, c in v.items():
                out[s] = out.get(s, 0) + coeff * c
        out = {s: c for s, c in out.items() if c}
        self._cache[key] = (out, leaked)
        return out, leaked

    def _candidates(self, g: Gen, state: int) -> List[Fraction]:
        cands = [-Fraction(2 * L + 1, 2) for L in range(self.nlevels)]
        other = "c" if g.kind == "b" else "b"
        for L in range(self.nlevels):
            r = Fraction(2 * L + 1, 2)
            if (state >> self.bit(other, g.index, r)) & 1:
                cands.append(r)
        return cands

    def _monomial_action(self, mono: Sequence[Gen], n: Fraction, state: int) -> Tuple[Vector, bool]:
        out: Vector = {}
        leaked = False
        k = len(mono)
        if k == 0:
            return ({state: Fraction(1)} if n == 0 else {}), False
        cand = [self._candidates(g, state) for g in mono[:-1]]
        last_set = set(self._candidates(mono[-1], state))
        for head in itertools.product(*cand):
            rl = n - sum(head, Fraction(0))
            if rl not in last_set:
                continue
            rs = list(head) + [rl]
            coeff = Fraction(1)
            for g, r in zip(mono, rs):
                coeff *= _deriv_factor(g.deriv, r)
            if not coeff:
                continue
            # normal order: creators (r < 0) left of annihilators, stable
            ops = [(g.kind, g.index, r) for g, r in zip(mono, rs)]
            perm = [j for j in range(k) if rs[j] < 0] + [j for j in range(k) if rs[j] > 0]
            inv = sum(1 for a in range(k) for b in range(a + 1, k) if perm[a] > perm[b])
            if inv % 2:
                coeff = -coeff
            v, lk = self._apply_seq([ops[j] for j in perm], state)
            leaked |= lk
            for s, c in v.items():
                out[s] = out.get(s, 0) + coeff * c
        return {s: c for s, c in out.items() if c}, leaked

    def composite_mode(self, field: "Field", n) -> "ModeMatrix":
        return ModeMatrix.from_action(self, f"{field.name}_{n}", lambda s: self.composite_action(field, n, s))


class Field(NamedTuple):
    """A normal-ordered polynomial in the generators: [(coeff, (Gen, ...)), ...]."""

    name: str
    terms: tuple
    weight: Fraction


def make_field(name: str, terms, weight=None) -> Field:
    terms = tuple((Fraction(c), tuple(Gen(*g) for g in mono)) for c, mono in terms)
    for _, mono in terms:
        if not 1 <= len(mono) <= 3:
            raise FreeFieldError("unsupported field")
        for g in mono:
            if g.kind not in "bc" or g.index not in range(1, 7) or g.deriv < 0:
                raise FreeFieldError("unsupported field")
    if weight is None:
        weight = sum((HALF + g.deriv for g in terms[0][1]), Fraction(0))
    return Field(name, terms, Fraction(weight))


H = make_field("h", [(1, (("b", 1), ("c", 1))), (1, (("b", 2), ("c", 2)))])
E = make_field("e", [(1, (("b", 1), ("b", 2)))])
F = make_field("f", [(1, (("c", 1), ("c", 2)))])
G_P1 = make_field("G+1", [(1, (("b", 1), ("b", 3), ("b", 5)))])
G_M1 = make_field("G-1", [(1, (("c", 2), ("b", 3), ("b", 5)))])
G_M2 = make_field("G-2", [(1, (("c", 1), ("c", 3), ("c", 5)))])
G_P2 = make_field("G+2", [(1, (("b", 2), ("c", 3), ("c", 5)))])
# T = (1/2) sum_i (:d b_i c_i: - :b_i d c_i:), central charge 6
T = make_field("T", [(Fraction(1, 2), (("b", i, 1), ("c", i))) for i in range(1, 7)]
               + [(Fraction(-1, 2), (("b", i), ("c", i, 1))) for i in range(1, 7)], weight=2)

FIELDS = {f.name: f for f in (H, E, F, G_P1, G_M1, G_M2, G_P2, T)}


class ModeMatrix:
    """Sparse exact matrix on the Fock basis; columns record truncation leaks."""

    def __init__(self, space: FockSpace, label: str, cols: Dict[int, Vector], leaks: set):
        self.space = space
        self.label = label
        self.cols = cols
        self.leaks = leaks

    @classmethod
    def from_action(cls, space: FockSpace, label: str, act) -> "ModeMatrix":
        cols, leaks = {}, set()
        for s in space.basis:
            v, lk = act(s)
            kept = {t: c for t, c in v.items() if t in space.index}
            if lk or len(kept) != len(v):
                leaks.add(s)
            if kept:
                cols[s] = kept
        return cls(space, label, cols, leaks)

    def apply(self, v: Vector) -> Vector:
        out: Vector = {}
        for s, c in v.items():
            for t, d in self.cols.get(s, {}).items():
                out[t] = out.get(t, 0) + c * d
        return {t: c for t, c in out.items() if c}

    def __matmul__(self, o: "ModeMatrix") -> "ModeMatrix":
        cols = {}
        for s, v in o.cols.items():
            w = self.apply(v)
            if w:
                cols[s] = w
        return ModeMatrix(self.space, f"{self.label}*{o.label}", cols, self.leaks | o.leaks)

    def combine(self, o: "ModeMatrix", a=1, b=1) -> "ModeMatrix":
        cols = {}
        for s in set(self.cols) | set(o.cols):
            w = dict((t, a * c) for t, c in self.cols.get(s, {}).items())
            for t, c in o.cols.get(s, {}).items():
                w[t] = w.get(t, 0) + b * c
            w = {t: c for t, c in w.items() if c}
            if w:
                cols[s] = w
        return ModeMatrix(self.space, f"({self.label}|{o.label})", cols, self.leaks | o.leaks)

    def entry(self, row: int, col: int) -> Fraction:
        return self.cols.get(col, {}).get(row, Fraction(0))

    def to_json(self):
        ix = self.space.index
        return {"mode": self.label, "dim": self.space.dim,
                "entries": [[ix[t], ix[s], str(c)] for s, v in sorted(self.cols.items(), key=lambda kv: ix[kv[0]])
                            for t, c in sorted(v.items(), key=lambda kv: ix[kv[0]])]}


def build_fock(cutoff) -> FockSpace:
    return FockSpace(cutoff)


def composite_mode(space: FockSpace, field, n) -> ModeMatrix:
    if isinstance(field, str):
        if field not in FIELDS:
            raise FreeFieldError("unsupported field")
        field = FIELDS[field]
    return space.composite_mode(field, Fraction(n))


# operator expressions on vectors ---------------------------------------------------

class Op(NamedTuple):
    """A free-field realization of a generator: coeff * field mode, or a scalar."""

    coeff: Fraction
    field: Optional[Field]


def _act(space: FockSpace, terms: Iterable[Tuple[Fraction, Optional[Field], Fraction]], v: Vector) -> Tuple[Vector, bool]:
    """Apply sum coeff * field_n (field None means the identity) to v."""
    out: Vector = {}
    leaked = False
    for coeff, field, n in terms:
        if not coeff:
            continue
        for s, c in v.items():
            if field is None:
                out[s] = out.get(s, 0) + coeff * c
                continue
            w, lk = space.composite_action(field, n, s)
            leaked |= lk
            for t, d in w.items():
                if t in space.index:
                    out[t] = out.get(t, 0) + coeff * c * d
                else:
                    leaked = True
    return {t: c for t, c in out.items() if c}, leaked


def _sub(a: Vector, b: Vector, sb=1) -> Vector:
    out = dict(a)
    for t, c in b.items():
        out[t] = out.get(t, 0) - sb * c
    return {t: c for t, c in out.items() if c}


def safe_states(space: FockSpace, depth) -> List[int]:
    """Basis states with level + depth <= cutoff."""
    return [s for s in space.basis if space.level(s) + depth <= space.cutoff]


def _depth(m, n) -> Fraction:
    return max(Fraction(0), -Fraction(m), -Fraction(n), -Fraction(m) - Fraction(n))


def clifford_check(space: FockSpace) -> dict:
    """{b_{i,r}, c_{j,s}} = delta delta and {b,b} = {c,c} = 0 on safe states."""
    modes = [(k, i, Fraction(sg * (2 * L + 1), 2)) for k in "bc" for i in range(1, 7)
             for L in range(space.nlevels) for sg in (1, -1)]
    bad = None
    for x in modes:
        for y in modes:
            depth = _depth(x[2], y[2])
            expect = Fraction(1) if (x[0] != y[0] and x[1] == y[1] and x[2] + y[2] == 0) else Fraction(0)
            for s in safe_states(space, depth):
                a, _ = _seq_vec(space, [x, y], s)
                b, _ = _seq_vec(space, [y, x], s)
                tot = dict(a)
                for t, c in b.items():
                    tot[t] = tot.get(t, 0) + c
                tot = {t: c for t, c in tot.items() if c}
                want = {s: expect} if expect else {}
                if tot != want:
                    bad = (x, y, space.describe(s))
                    break
            if bad:
                break
        if bad:
            break
    return {"check": "clifford", "cutoff": str(space.cutoff), "pass": bad is None, "first_failure": bad}


def _seq_vec(space, ops, s):
    return space._apply_seq(ops, s)


# relation checks ----------------------------------------------------------------------

def _bracket_vec(space, X, Y, v, odd: bool) -> Tuple[Vector, bool]:
    """[X, Y] v (anticommutator when odd), X and Y given as term lists."""
    yv, l1 = _act(space, Y, v)
    xyv, l2 = _act(space, X, yv)
    xv, l3 = _act(space, X, v)
    yxv, l4 = _act(space, Y, xv)
    return _sub(xyv, yxv, -1 if odd else 1), l1 or l2 or l3 or l4


def _mode_terms(real: Dict[str, Tuple[Fraction, Field]], name: str, n) -> list:
    coeff, field = real[name]
    return [(coeff, field, Fraction(n))]


def _ratio_on(space, A: list, B: list, states) -> Optional[Fraction]:
    """The rational r with A v = r B v on the given states (None if none)."""
    r = None
    for s in states:
        a, _ = _act(space, A, {s: Fraction(1)})
        b, _ = _act(space, B, {s: Fraction(1)})
        if not a and not b:
            continue
        if not b or set(a) != set(b):
            return None
        for t in b:
            q = a[t] / b[t]
            if r is None:
                r = q
            elif q != r:
                return None
    return r


def sl2_relations(space: FockSpace, window: int = 1) -> dict:
    """Level-1 sl2 relations for h, e, f; the [e, f] sign is fitted and reported."""
    depth_states = lambda m, n: safe_states(space, _depth(m, n))
    # fit [e_0, f_0] = s h_0 on level-1/2 states
    s = None
    states0 = [st for st in space.basis if space.level(st) <= min(space.cutoff, 1)]
    for st in states0:
        ef, _ = _bracket_vec(space, [(1, E, 0)], [(1, F, 0)], {st: Fraction(1)}, False)
        hv, _ = _act(space, [(1, H, 0)], {st: Fraction(1)})
        if hv:
            t = next(iter(hv))
            s = ef.get(t, Fraction(0)) / hv[t]
            break
    if s is None:
        raise FreeFieldError("cutoff too small to fit the sl2 normalization")
    k = Fraction(1)
    rels = []
    for m in range(-window, window + 1):
        for n in range(-window, window + 1):
            cen = lambda coeff: [(coeff, None, Fraction(0))] if m + n == 0 else []
            rels.append((f"[h_{m},h_{n}]", (H, m), (H, n), cen(2 * m * k)))
            rels.append((f"[h_{m},e_{n}]", (H, m), (E, n), [(2, E, Fraction(m + n))]))
            rels.append((f"[h_{m},f_{n}]", (H, m), (F, n), [(-2, F, Fraction(m + n))]))
            rels.append((f"[e_{m},f_{n}]", (E, m), (F, n), [(s, H, Fraction(m + n))] + cen(s * m * k)))
            rels.append((f"[e_{m},e_{n}]", (E, m), (E, n), []))
            rels.append((f"[f_{m},f_{n}]", (F, m), (F, n), []))
    bad = None
    checked = 0
    for label, (fx, m), (fy, n), rhs in rels:
        for st in depth_states(m, n):
            v = {st: Fraction(1)}
            lhs, lk = _bracket_vec(space, [(1, fx, Fraction(m))], [(1, fy, Fraction(n))], v, False)
            r, lk2 = _act(space, rhs, v)
            checked += 1
            if lhs != r or lk or lk2:
                bad = {"relation": label, "state": space.describe(st), "lhs": _vjson(space, lhs), "rhs": _vjson(space, r)}
                break
        if bad:
            break
    return {"check": "sl2-level-1", "cutoff": str(space.cutoff), "k": k, "ef_sign": s,
            "sign_pattern": {"[h,e]": 2, "[h,f]": -2, "[e,f]": f"{s}*h"},
            "checked": checked, "pass": bad is None, "first_failure": bad}


def _vjson(space, v: Vector):
    return {space.describe(t): str(c) for t, c in sorted(v.items())}


def _primed_generators():
    return {
        "L": lambda n: n4.Lm(n),
        "J": lambda n: n4.Jp(n),
        "J+": lambda n: n4.Jplus(n),
        "J-": lambda n: n4.Jminus(n),
        "G+1": lambda r: n4.Gpm(1, 1, r),
        "G-1": lambda r: n4.Gpm(-1, 1, r),
        "G+2": lambda r: n4.Gpm(1, 2, r),
        "G-2": lambda r: n4.Gpm(-1, 2, r),
    }


def to_primed(term: n4.ModeTerm, k=1) -> Dict[tuple, CycNum]:
    """Rewrite a ModeTerm in the primed basis with c = 6k and k specialized."""
    out: Dict[tuple, CycNum] = {}
    I = CycNum.i()

    def add(key, v):
        out[key] = out.get(key, CycNum.rational(0)) + v

    half = Fraction(1, 2)
    for m, p in term.t.items():
        q = p.at_c6k().specialize(k=k)
        v = q.t.get((0, 0), CycNum.rational(0))
        if set(q.t) - {(0, 0)}:
            raise FreeFieldError("non-constant coefficient")
        if m.kind == "1":
            add(("1", Fraction(0)), v)
        elif m.kind == "L":
            add(("L", m.n), v)
        elif m.kind == "J":
            if m.index == 1:
                add(("J", m.n), v * I * half)
            elif m.index == 2:
                add(("J+", m.n), v * half)
                add(("J-", m.n), -v * half)
            else:
                add(("J+", m.n), v * I * half)
                add(("J-", m.n), v * I * half)
        elif m.kind == "G":
            a = m.index
            if a == 0:
                add(("G-1", m.n), v * half)
                add(("G+2", m.n), v * half)
            elif a == 1:
                add(("G-1", m.n), v * I * half)
                add(("G+2", m.n), -v * I * half)
            elif a == 2:
                add(("G-2", m.n), v * half)
                add(("G+1", m.n), -v * half)
            else:
                add(("G+1", m.n), -v * I * half)
                add(("G-2", m.n), -v * I * half)
    return {key: v for key, v in out.items() if not v.is_zero()}


def fit_n4_realization(space: FockSpace) -> Dict[str, Tuple[Fraction, Field]]:
    """Normalize the free fields against the primed basis.

    J = h and J^+ = e; J^- = s f with s from [J^+_0, J^-_0] = J_0; G^{+,1} is
    taken as :b1b3b5: and the others follow from [J^-_0, G^{+,1}] = G^{-,1},
    {G^{+,1}_{3/2}, G^{-,2}_{-3/2}} on the vacuum and [J^+_0, G^{-,2}] = G^{+,2}.
    """
    if space.cutoff < Fraction(3, 2):
        raise FreeFieldError("cutoff must be at least 3/2")
    sl2 = sl2_relations(space, 0)
    s = sl2["ef_sign"]
    real = {"L": (Fraction(1), T), "J": (Fraction(1), H), "J+": (Fraction(1), E), "J-": (s, F),
            "G+1": (Fraction(1), G_P1)}
    low = [st for st in space.basis if space.level(st) <= 1]
    half = Fraction(1, 2)
    # G^{-,1}_{1/2} = [J^-_0, G^{+,1}_{1/2}]
    lhs_states = low
    A = [(s, F, Fraction(0))]
    B = [(1, G_P1, half)]
    g2 = _fit_commutator(space, A, B, G_M1, half, lhs_states, odd=False)
    real["G-1"] = (g2, G_M1)
    # {G^{+,1}_{3/2}, G^{-,2}_{-3/2}} |0> = required scalar
    req = to_primed(n4.bracket(n4.Gpm(1, 1, Fraction(3, 2)), n4.Gpm(-1, 2, Fraction(-3, 2))))
    scal = req.get(("1", Fraction(0)), CycNum.rational(0)).to_fraction()
    v0 = {0: Fraction(1)}
    got, _ = _bracket_vec(space, [(1, G_P1, Fraction(3, 2))], [(1, G_M2, Fraction(-3, 2))], v0, True)
    base = got.get(0, Fraction(0))
    if not base:
        raise FreeFieldError("free-field G pairing vanishes")
    real["G-2"] = (scal / base, G_M2)
    g4 = _fit_commutator(space, [(1, E, Fraction(0))], [(scal / base, G_M2, half)], G_P2, half, low, odd=False)
    real["G+2"] = (g4, G_P2)
    return real


def _fit_commutator(space, A, B, target: Field, n, states, odd) -> Fraction:
    r = None
    for st in states:
        v = {st: Fraction(1)}
        lhs, _ = _bracket_vec(space, A, B, v, odd)
        t, _ = _act(space, [(1, target, Fraction(n))], v)
        if not lhs and not t:
            continue
        if not t or set(lhs) != set(t):
            raise FreeFieldError(f"{target.name} is not proportional to the bracket")
        for key in t:
            q = lhs[key] / t[key]
            if r is None:
                r = q
            elif r != q:
                raise FreeFieldError(f"{target.name} is not proportional to the bracket")
    if r is None:
        raise FreeFieldError("cutoff too small to fit the normalization")
    return r


def n4_relations(space: FockSpace, window: int = 1, fail_fast: bool = False) -> dict:
    """All brackets of primed generators with |index| <= window at c = 6, k = 1.

    Each family [X, Y] is checked separately; the report lists the families
    that hold and the first failure of each family that does not.  With
    ``fail_fast`` the scan stops at the first failing family.
    """
    real = fit_n4_realization(space)
    gens = _primed_generators()
    idx = {}
    for name in gens:
        if name.startswith("G"):
            idx[name] = [Fraction(2 * j + 1, 2) for j in range(-window, window)]
        else:
            idx[name] = [Fraction(m) for m in range(-window, window + 1)]
    families = {}
    checked = 0
    pairs = list(itertools.combinations_with_replacement(list(gens), 2))
    if fail_fast:
        # the odd-odd families are the likeliest to fail, so try them first
        pairs.sort(key=lambda ab: not (ab[0].startswith("G") and ab[1].startswith("G")))
    for a, b in pairs:
        odd = a.startswith("G") and b.startswith("G")
        bad = None
        for m in idx[a]:
            for n in idx[b]:
                rhs_terms = []
                for (nm, j), v in to_primed(n4.bracket(gens[a](m), gens[b](n))).items():
                    if not v.is_rational():
                        raise FreeFieldError("non-rational structure constant in the primed basis")
                    v = v.to_fraction()
                    if nm == "1":
                        rhs_terms.append((v, None, Fraction(0)))
                    else:
                        c, f = real[nm]
                        rhs_terms.append((v * c, f, j))
                X = [(real[a][0], real[a][1], m)]
                Y = [(real[b][0], real[b][1], n)]
                for st in safe_states(space, _depth(m, n)):
                    v = {st: Fraction(1)}
                    lhs, lk = _bracket_vec(space, X, Y, v, odd)
                    rhs, lk2 = _act(space, rhs_terms, v)
                    checked += 1
                    if lhs != rhs or lk or lk2:
                        bad = {"relation": f"[{a}_{m},{b}_{n}]", "state": space.describe(st),
                               "lhs": _vjson(space, lhs), "rhs": _vjson(space, rhs)}
                        break
                if bad:
                    break
            if bad:
                break
        families[f"[{a},{b}]"] = bad
        if bad and fail_fast:
            break
    failed = {k: v for k, v in families.items() if v is not None}
    c_found = None
    if space.cutoff >= 2:
        l2, _ = _bracket_vec(space, [(1, T, Fraction(2))], [(1, T, Fraction(-2))], {0: Fraction(1)}, False)
        c_found = 2 * l2.get(0, Fraction(0))  # [L_2, L_-2] |0> = (c/2) |0>
    return {
        "check": "n4-c6",
        "cutoff": str(space.cutoff),
        "normalization": {nm: str(c) for nm, (c, _) in real.items()},
        "fields": {nm: f.name for nm, (_, f) in real.items()},
        "c": c_found,
        "k": Fraction(1),
        "checked": checked,
        "families_passed": sorted(k for k, v in families.items() if v is None),
        "families_failed": sorted(failed),
        "pass": not failed,
        "first_failure": next(iter(failed.values())) if failed else None,
    }


def verify_relations(cutoff, relation_set: str, window: int = 1, space: Optional[FockSpace] = None,
                     fail_fast: bool = False) -> dict:
    space = space or build_fock(cutoff)
    if space.cutoff < Fraction(3, 2):
        raise FreeFieldError("cutoff must be at least 3/2")
    if relation_set == "sl2-level-1":
        return sl2_relations(space, window)
    if relation_set == "n4-c6":
        return n4_relations(space, window, fail_fast)
    raise FreeFieldError(f"unknown relation set {relation_set!r}")
