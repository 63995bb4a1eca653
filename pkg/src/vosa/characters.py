"""NS/R characters of lattice VOSAs and free fermions, N=2 blocks, spectral flow."""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Union

from .lattices import Coset, Marking, SignCharacter, a1_power, sqrt3_z, theta_union, z_lattice
from .series import CycNum, JacobiSeries, SeriesError, eta_power

CosetLike = Union[Coset, Sequence[Coset]]


class SectorLabel(NamedTuple):
    twist: str  # "NS" or "R"
    sign: str  # "+" or "-"

    def __str__(self):
        return f"{self.twist}{self.sign}"


NS_PLUS = SectorLabel("NS", "+")
NS_MINUS = SectorLabel("NS", "-")
R_PLUS = SectorLabel("R", "+")
R_MINUS = SectorLabel("R", "-")


def parse_sector(s) -> SectorLabel:
    if isinstance(s, SectorLabel):
        return s
    s = str(s).upper()
    for lab in (NS_PLUS, NS_MINUS, R_PLUS, R_MINUS):
        if s == str(lab):
            return lab
    raise ValueError(f"unknown sector {s!r}")


def _cosets(c: CosetLike):
    return [c] if isinstance(c, Coset) else list(c)


def lattice_vosa_character(c: CosetLike, sector=NS_PLUS, parity: Optional[SignCharacter] = None,
                           marking: Optional[Marking] = None, trunc=6) -> JacobiSeries:
    """ch^+ or ch^- of V_{L+gamma} (or a union of cosets): theta / eta^rank.

    The parity character is only used for the minus sign; NS sectors default
    to norm parity, R sectors must pass one explicitly.
    """
    sector = parse_sector(sector)
    cs = _cosets(c)
    rank = cs[0].rank
    trunc = Fraction(trunc)
    sign = None
    if sector.sign == "-":
        if parity is None:
            if sector.twist == "R":
                raise ValueError("R-sector parity must be given explicitly")
            parity = SignCharacter.norm_parity()
        sign = parity
    # theta needs trunc + rank/24 so the quotient is exact through trunc
    th = theta_union(cs, marking, sign, trunc + Fraction(rank, 24))
    return (th * eta_power(-rank, trunc + Fraction(rank, 24))).with_trunc_at_most(trunc)


def _half_odd_product(n: int, sign: int, trunc) -> JacobiSeries:
    """prod_{k>=1} (1 + sign q^(k-1/2))^n through trunc."""
    trunc = Fraction(trunc)
    out = JacobiSeries.constant(1, trunc)
    k = 1
    while Fraction(2 * k - 1, 2) < trunc:
        f = JacobiSeries({(Fraction(0), 0): 1, (Fraction(2 * k - 1, 2), 0): sign}, trunc)
        out = out * f**n
        k += 1
    return out.with_trunc_at_most(trunc)


def _int_product(n: int, trunc) -> JacobiSeries:
    trunc = Fraction(trunc)
    out = JacobiSeries.constant(1, trunc)
    k = 1
    while k < trunc:
        f = JacobiSeries({(Fraction(0), 0): 1, (Fraction(k), 0): 1}, trunc)
        out = out * f**n
        k += 1
    return out.with_trunc_at_most(trunc)


def fermion_character(n: int, sector=NS_PLUS, trunc=6) -> JacobiSeries:
    """ch^{+/-} of n free fermions F(n) in the NS or R sector.

    NS: q^(-n/48) prod (1 +- q^(k-1/2))^n.  R (n even): 2^(n/2) q^(n/24)
    prod (1 + q^k)^n for the trace, and 0 for the supertrace.
    """
    sector = parse_sector(sector)
    trunc = Fraction(trunc)
    if n < 1:
        raise ValueError("n must be positive")
    if sector.twist == "NS":
        lead = Fraction(-n, 48)
        if (lead * 24).denominator != 1:
            raise SeriesError("denominator overflow")
        prod = _half_odd_product(n, 1 if sector.sign == "+" else -1, trunc - lead)
        return prod.shift(lead)
    if n % 2:
        raise ValueError("unsupported")
    if sector.sign == "-":
        return JacobiSeries({}, trunc)
    lead = Fraction(n, 24)
    return _int_product(n, trunc - lead).scale(2 ** (n // 2)).shift(lead)


def fermion_character_lattice(n: int, sector=NS_PLUS, trunc=6) -> JacobiSeries:
    """The same characters through V_{Z^(n/2)} and its twisted coset."""
    sector = parse_sector(sector)
    if n % 2:
        raise ValueError("unsupported")
    m = n // 2
    lat = z_lattice(m)
    if sector.twist == "NS":
        return lattice_vosa_character(lat.coset(), sector, SignCharacter.norm_parity(), None, trunc)
    half = (Fraction(1, 2),) * m
    # parity on Z^m + half: (-1)^(sum(x - half))
    parity = SignCharacter.linear_ambient(lat, half, ref=Fraction(m, 4))
    return lattice_vosa_character(lat.coset(half), sector, parity, None, trunc)


def n2_f(s: int, trunc=6) -> JacobiSeries:
    """f_s = eta^-1 sum_k (e^(pi i) z)^(k+s/6) q^((3/2)(k+s/6)^2).

    z-exponents are scaled by 6, so the term for k carries z^(6k+s) and
    q^((6k+s)^2/24) with phase exp(pi i (6k+s)/6).
    """
    s = s % 6
    trunc = Fraction(trunc)
    big = trunc + Fraction(1, 24)
    terms = {}
    # include every k with (6k+s)^2/24 < big
    lo = -int((24 * big) ** 0.5) // 6 - 2
    hi = int((24 * big) ** 0.5) // 6 + 2
    for k in range(lo, hi + 1):
        m = 6 * k + s
        e = Fraction(m * m, 24)
        if e < big:
            terms[(e, m)] = CycNum.exp_pi_i(Fraction(m, 6))
    th = JacobiSeries(terms, big)
    return (th * eta_power(-1, big)).with_trunc_at_most(trunc)


def n2_f_lattice(s: int, trunc=6) -> JacobiSeries:
    """f_s through the sqrt(3)Z coset with J = lambda/sqrt(3) and phase e^(pi i J)."""
    s = s % 6
    k = sqrt3_z(1)
    c = Coset(k, (Fraction(s, 6),))
    marking = Marking((Fraction(1),))
    # exp(2 pi i lambda.w) with lambda.w = J/2
    parity = SignCharacter.linear((Fraction(1, 2),))
    return lattice_vosa_character(c, R_MINUS, parity, marking, trunc)


# level-1 A1 and spectral flow ------------------------------------------------

def a1_level1_character(j: int, trunc=6) -> JacobiSeries:
    """Character of the level-1 A1 module of highest weight j in {0, 1}.

    Realized on A1 + j/2 with J_0 = 2x for lambda = x sqrt(2); z-exponents
    carry 6 J_0.
    """
    if j not in (0, 1):
        raise ValueError("highest weight must be 0 or 1")
    lat = a1_power(1)
    c = Coset(lat, (Fraction(j, 2),))
    return lattice_vosa_character(c, NS_PLUS, None, Marking((Fraction(2),)), trunc)


def _flow_source_trunc(trunc: Fraction, ell: int) -> Fraction:
    # unknown source terms sit at n >= T_src with |J_0| <= 2 sqrt(n + 1/24);
    # after flow they sit at >= n - |ell| sqrt(n + 1/24) + ell^2/4, increasing
    # in n, so pick T_src with (T_src + ell^2/4 - T)^2 >= ell^2 (T_src + 1/24)
    a = abs(ell)
    t = Fraction(trunc)
    src = t
    while True:
        gap = src + Fraction(a * a, 4) - t
        if gap >= 0 and gap * gap >= a * a * (src + Fraction(1, 24)) and src * 4 >= a * a:
            return src
        src += Fraction(1, 2)


def flow_character(ch: JacobiSeries, ell: int, k: int, trunc) -> JacobiSeries:
    """ch(y z^ell q^(ell^2/4), z q^(ell/2), q) with y^k dropped on both sides.

    ``ch`` carries 6 J_0 as z-exponent; ``trunc`` is the target truncation and
    ``ch`` must be exact through the source truncation of _flow_source_trunc.
    """
    pre = Fraction(ell * ell * k, 4)
    moved = ch.z_flow(1, Fraction(ell, 12), Fraction(trunc) - pre)
    return moved.shift(pre, 6 * ell * k).with_trunc_at_most(trunc)


def spectral_flow_character_check(j: int, ell: int, trunc=6, k: int = 1) -> dict:
    """Check ch[sigma_ell^* M_j] = ch[M_{j+ell mod 2}] for level-1 A1."""
    if k != 1:
        raise ValueError("only level 1 is realized")
    trunc = Fraction(trunc)
    src = _flow_source_trunc(trunc, ell)
    flowed = flow_character(a1_level1_character(j, src), ell, k, trunc)
    target_j = (j + ell) % 2
    target = a1_level1_character(target_j, trunc)
    mm = flowed.first_mismatch(target)
    return {
        "check": "spectral_flow_character",
        "j": j,
        "ell": ell,
        "target": target_j,
        "pass": mm is None and flowed.trunc == target.trunc,
        "first_mismatch": None if mm is None else [str(mm[0]), mm[1], repr(mm[2]), repr(mm[3])],
    }


def character_json(ch: JacobiSeries, sector, parity: Optional[SignCharacter] = None) -> dict:
    d = ch.to_json()
    d["metadata"] = {"sector": str(parse_sector(sector)), "parity": repr(parity) if parity else "none", "zscale": 6}
    return d
