"""Arithmetic behind the c = 12 classification: the NS partition function,
the weight-2 matching that fixes the Killing form, and the dual Coxeter scan."""

from __future__ import annotations

from fractions import Fraction
from typing import List, NamedTuple, Optional

from .lattices import d_lattice, theta
from .series import JacobiSeries, eisenstein_e2, eta_power

# dual Coxeter numbers as tabulated; families carry a closed form in the rank
DUAL_COXETER_TABLE = {
    "A": "n+1",
    "B": "2n-1",
    "C": "n+1",
    "D": "2n-2",
    "E6": 12,
    "E7": 18,
    "E8": 30,
    "F4": 9,
    "G2": 4,
}

FAMILY_ORDER = "ABCDEFG"
# smallest rank of each classical family not isomorphic to an earlier one
# (B1 = C1 = A1, C2 = B2, D3 = A3; D1 and D2 are not simple)
_MIN_RANK = {"A": 1, "B": 2, "C": 3, "D": 4}


class ClassifyError(ValueError):
    pass


class SimpleType(NamedTuple):
    family: str  # A, B, C, D, E, F or G
    rank: int
    dual_coxeter: int

    @property
    def name(self) -> str:
        return f"{self.family}{self.rank}"

    def __str__(self):
        return self.name


def dual_coxeter(family: str, rank: int) -> int:
    """Closed-form dual Coxeter number."""
    if family == "A":
        return rank + 1
    if family == "B":
        return 2 * rank - 1
    if family == "C":
        return rank + 1
    if family == "D":
        return 2 * rank - 2
    key = f"{family}{rank}"
    if key in DUAL_COXETER_TABLE:
        return DUAL_COXETER_TABLE[key]
    raise ClassifyError(f"no simple algebra {key}")


def simple_types(max_rank: int) -> List[SimpleType]:
    """All simple types of rank <= max_rank, each isomorphism class once."""
    out = []
    for fam in "ABCD":
        for n in range(_MIN_RANK[fam], max_rank + 1):
            out.append(SimpleType(fam, n, dual_coxeter(fam, n)))
    for key, h in DUAL_COXETER_TABLE.items():
        if len(key) == 2 and int(key[1]) <= max_rank:
            out.append(SimpleType(key[0], int(key[1]), h))
    return sorted(out, key=lambda t: (FAMILY_ORDER.index(t.family), t.rank))


# the NS-NS partition function -------------------------------------------------------

def znsns_c12(d: int, trunc=3) -> JacobiSeries:
    """q^(-1/2) prod (1 + q^(k-1/2))^24 + (d - 24)."""
    if not 0 <= d <= 24:
        raise ClassifyError("d must lie in 0..24")
    trunc = Fraction(trunc)
    lead = Fraction(-1, 2)
    body = JacobiSeries.constant(1, trunc - lead)
    k = 1
    while Fraction(2 * k - 1, 2) < trunc - lead:
        f = JacobiSeries({(Fraction(0), 0): 1, (Fraction(2 * k - 1, 2), 0): 1}, trunc - lead)
        body = body * f**24
        k += 1
    return body.shift(lead).with_trunc_at_most(trunc) + (d - 24)


def znsns_c12_eta(d: int, trunc=3) -> JacobiSeries:
    """The same series as eta(tau)^48 / (eta(tau/2)^24 eta(2 tau)^24) + d - 24."""
    if not 0 <= d <= 24:
        raise ClassifyError("d must lie in 0..24")
    trunc = Fraction(trunc)
    # numerator leads at q^2, the inverted denominator at q^(-5/2)
    num = eta_power(48, trunc + Fraction(5, 2))
    den = eta_power(-24, trunc, Fraction(1, 2)) * eta_power(-24, trunc - Fraction(3, 2), 2)
    return (num * den).with_trunc_at_most(trunc) + (d - 24)


def znsns_c12_printed(d: int, trunc=3) -> JacobiSeries:
    """The literal quotient eta(tau)^24 / eta(2 tau)^24 + 24 + d, for comparison."""
    trunc = Fraction(trunc)
    q = eta_power(24, trunc + 2) * eta_power(-24, trunc - 1, 2)
    return q.with_trunc_at_most(trunc) + (24 + d)


def signed_d4_theta(trunc=3) -> JacobiSeries:
    """theta_{D4}((tau + 1)/2) = 1 - 24 q^(1/2) + 24 q - ..."""
    trunc = Fraction(trunc)
    th = theta(d_lattice(4).coset(), trunc=2 * trunc)
    return th.q_rescale(Fraction(1, 2)).tau_shift(1).with_trunc_at_most(trunc)


# the weight-2 matching --------------------------------------------------------------

def _solve(rows: List[List[Fraction]], rhs: List[Fraction]) -> Optional[List[Fraction]]:
    """Exact least-structure solve: unique solution of a consistent system or None."""
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    nvar = len(rows[0])
    piv_row = 0
    pivots = []
    for col in range(nvar):
        p = next((i for i in range(piv_row, len(m)) if m[i][col] != 0), None)
        if p is None:
            continue
        m[piv_row], m[p] = m[p], m[piv_row]
        pv = m[piv_row][col]
        m[piv_row] = [x / pv for x in m[piv_row]]
        for i in range(len(m)):
            if i != piv_row and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[piv_row])]
        pivots.append(col)
        piv_row += 1
    for i in range(piv_row, len(m)):
        if m[i][-1] != 0:
            return None
    if len(pivots) < nvar:
        return None
    sol = [Fraction(0)] * nvar
    for i, col in enumerate(pivots):
        sol[col] = m[i][-1]
    return sol


def weight2_match(d: int, trunc=Fraction(3, 2)) -> dict:
    """Solve for C, D and kappa (per unit of the invariant form <u,u'>).

    One side is X = -2C q dZ/dq + D theta_{D4}((tau+1)/2); the other is
    kappa q^(1/2) - (1/12) <u,u'> E_2 Z with the trace of o(u)o(u') known
    through q^(1/2).  Coefficients of q^(-1/2), q^0 and q^(1/2) are matched.
    """
    if not 0 <= d < 24:
        raise ClassifyError("d must lie in 0..23")
    trunc = Fraction(trunc)
    if trunc <= Fraction(1, 2):
        raise ClassifyError("trunc must exceed 1/2")
    z = znsns_c12(d, trunc)
    dz = z.qderiv()
    th = signed_d4_theta(trunc)
    e2z = (eisenstein_e2(trunc + 1) * z).with_trunc_at_most(trunc)
    exps = [Fraction(-1, 2), Fraction(0), Fraction(1, 2)]
    rows, rhs = [], []
    for e in exps:
        # unknowns (C, D, kappa); <u,u'> = 1
        a = -2 * dz.coeff(e).to_fraction()
        b = th.coeff(e).to_fraction()
        k = Fraction(1) if e == Fraction(1, 2) else Fraction(0)
        rows.append([a, b, -k])
        rhs.append(-Fraction(1, 12) * e2z.coeff(e).to_fraction())
    sol = _solve(rows, rhs)
    if sol is None:
        raise ClassifyError("matching failed")
    C, D, kappa = sol
    return {"d": d, "C": C, "D": D, "kappa": kappa, "kappa_formula": 44 + 2 * d,
            "pass": kappa == 44 + 2 * d and C == Fraction(-1, 12) and D == Fraction(-d, 12)}


# the scan --------------------------------------------------------------------------

def enumerate_solutions(d_range=range(24)) -> List[tuple]:
    """All (d, type, level) with h = (22 + d) k and rank <= 12 - d/2."""
    hits = []
    for d in d_range:
        budget = Fraction(24 - d, 2)
        max_rank = int(budget)
        if max_rank < 1:
            continue
        for t in simple_types(max_rank):
            h = t.dual_coxeter
            if h % (22 + d) == 0:
                hits.append((d, t, h // (22 + d)))
    return hits


def hits_json(hits) -> list:
    return [{"d": d, "type": t.name, "level": k} for d, t, k in hits]
