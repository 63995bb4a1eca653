import cmath
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vosa.series import (
    CycNum,
    EvalPoint,
    JacobiSeries,
    SeriesError,
    eisenstein_e2,
    eta_power,
    eta_scaled,
    euler_product,
    eval_numeric,
    geometric,
)


def product_oracle(factors, order):
    """Expand prod (1 + s q^e) over (s, e) pairs, exponents in Fractions, by brute force."""
    poly = {Fraction(0): 1}
    for s, e in factors:
        new = dict(poly)
        for k, v in poly.items():
            if k + e < order:
                new[k + e] = new.get(k + e, 0) + s * v
        poly = new
    return {k: v for k, v in poly.items() if v}


def coeffs(s: JacobiSeries):
    return {n: c.to_fraction() for n, _, c in s.items()}


# cyclotomic numbers

def test_roots_of_unity_have_order_24():
    for k in range(24):
        z = CycNum.root_of_unity(k)
        assert z**24 == CycNum.rational(1)
    assert CycNum.root_of_unity(1) ** 12 == CycNum.rational(-1)


def test_named_constants_square_correctly():
    assert CycNum.i() ** 2 == CycNum.rational(-1)
    assert CycNum.sqrt2() ** 2 == CycNum.rational(2)
    assert CycNum.sqrt3() ** 2 == CycNum.rational(3)
    assert CycNum.exp_pi_i(Fraction(1, 6)) ** 12 == CycNum.rational(1)
    assert abs(complex(CycNum.exp_pi_i(Fraction(1, 6))) - cmath.exp(1j * math.pi / 6)) < 1e-12


def test_exp_pi_i_rejects_off_grid():
    with pytest.raises(SeriesError, match="denominator overflow"):
        CycNum.exp_pi_i(Fraction(1, 5))


small = st.lists(st.integers(-4, 4), min_size=8, max_size=8)


@settings(max_examples=40, deadline=None)
@given(small, small, small)
def test_cycnum_field_laws(a, b, c):
    x, y, z = CycNum(a), CycNum(b), CycNum(c)
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()
    assert abs(complex(x * y) - complex(x) * complex(y)) < 1e-9
    if not x.is_zero():
        assert x * x.inverse() == CycNum.rational(1)


# series arithmetic

def test_geometric_inverse():
    one_minus_q = JacobiSeries({(0, 0): 1, (1, 0): -1}, 8)
    assert one_minus_q * geometric(8) == JacobiSeries.constant(1, 8)
    assert one_minus_q.inverse() == geometric(8)


def test_qderiv_example():
    s = JacobiSeries({(Fraction(-1, 2), 0): 1, (0, 0): 24, (Fraction(1, 2), 0): 276}, 1)
    want = JacobiSeries({(Fraction(-1, 2), 0): Fraction(-1, 2), (Fraction(1, 2), 0): 138}, 1)
    assert s.qderiv() == want


def test_fermion_product_power():
    order = Fraction(2)
    base = product_oracle([(1, Fraction(2 * n - 1, 2)) for n in range(1, 4)], order)
    s = JacobiSeries({(k, 0): v for k, v in base.items()}, order)
    oracle = product_oracle([(1, Fraction(2 * n - 1, 2)) for n in range(1, 4) for _ in range(24)], order)
    assert coeffs(s**24) == oracle
    assert oracle[Fraction(1)] == 276


def test_non_invertible():
    with pytest.raises(SeriesError, match="non-invertible"):
        JacobiSeries({(0, 0): 1, (0, 6): 1}, 3).inverse()


def pentagonal_oracle(order):
    out = {}
    k = 0
    while True:
        done = True
        for kk in ((k, -k) if k else (0,)):
            e = kk * (3 * kk - 1) // 2
            if e < order:
                out[Fraction(e)] = (-1) ** abs(kk)
                done = False
        if done and k:
            break
        k += 1
    return out


def test_eta_pentagonal():
    e = eta_scaled(1, 30)
    got = {n - Fraction(1, 24): c for n, c in coeffs(e).items()}
    want = {k: v for k, v in pentagonal_oracle(30 - Fraction(1, 24)).items() if k < 30 - Fraction(1, 24)}
    assert got == want
    assert e.valuation() == Fraction(1, 24)


def test_eta_scaled_two_and_guard():
    assert eta_scaled(2, 3).valuation() == Fraction(1, 12)
    with pytest.raises(SeriesError, match="unsupported eta scale"):
        eta_scaled(5, 3)


def test_eta_24_against_product():
    order = 4
    oracle = product_oracle([(-1, Fraction(n)) for n in range(1, order) for _ in range(24)], order - 1)
    got = coeffs(eta_power(24, order))
    assert got == {k + 1: v for k, v in oracle.items()}
    assert got[Fraction(2)] == -24 and got[Fraction(3)] == 252


def test_eta_over_product_is_monomial():
    s = eta_scaled(1, 6) * euler_product(1, 6).inverse()
    assert s == JacobiSeries.monomial(Fraction(1, 24), 0, 1, s.trunc)


def test_e2():
    e2 = eisenstein_e2(8)
    assert coeffs(e2)[Fraction(0)] == 1
    for n in range(1, 8):
        assert coeffs(e2)[Fraction(n)] == -24 * sum(d for d in range(1, n + 1) if n % d == 0)
    assert coeffs(e2)[Fraction(2)] == -72


series_terms = st.dictionaries(
    st.tuples(st.integers(0, 3).map(lambda k: Fraction(k, 2)), st.integers(-2, 2)),
    st.integers(-3, 3), max_size=5)


@settings(max_examples=40, deadline=None)
@given(series_terms, series_terms, series_terms)
def test_ring_laws(a, b, c):
    x, y, z = (JacobiSeries(t, 3) for t in (a, b, c))
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z


@settings(max_examples=30, deadline=None)
@given(series_terms, series_terms)
def test_truncation_soundness(a, b):
    lo = JacobiSeries(a, 2) * JacobiSeries(b, 2)
    hi = JacobiSeries(a, 4) * JacobiSeries(b, 4)
    assert lo.first_mismatch(hi) is None


def test_json_round_trip():
    s = eta_power(3, 3) * JacobiSeries.monomial(0, 6, CycNum.exp_pi_i(Fraction(1, 6)), 3)
    d = s.to_json()
    assert JacobiSeries.from_json(d) == s
    keys = [(Fraction(*t["q"]), t["z"]) for t in d["terms"]]
    assert keys == sorted(keys)
    assert all(len(t["c"]) == 8 for t in d["terms"])


# substitutions

def test_tau_shift_phases():
    s = JacobiSeries({(Fraction(1, 2), 0): 1, (Fraction(1, 3), 0): 1}, 2)
    t = s.tau_shift(1)
    assert t.coeff(Fraction(1, 2)) == CycNum.rational(-1)
    assert t.coeff(Fraction(1, 3)) == CycNum.root_of_unity(8)


def test_z_flow_exponents():
    s = JacobiSeries({(Fraction(1), 6): 1, (Fraction(1), -6): 2}, 3)
    f = s.z_flow(1, Fraction(1, 12), 2)
    assert f.coeff(Fraction(3, 2), 6) == CycNum.rational(1)
    assert f.coeff(Fraction(1, 2), -6) == CycNum.rational(2)


# numerics

def test_eval_constant_and_monomial():
    v, b = eval_numeric(JacobiSeries.constant(1, 6), EvalPoint(0, 1j))
    assert v == 1 and b < 1e-12
    v, _ = eval_numeric(JacobiSeries.monomial(Fraction(1, 2), 0, 1, 6), EvalPoint(0, 1j))
    assert abs(v - math.exp(-math.pi)) < 1e-15


def test_eta_at_i_matches_gamma():
    v, b = eval_numeric(eta_scaled(1, 8), EvalPoint(0, 1j))
    want = float(mpmath.gamma(0.25) / (2 * mpmath.pi ** 0.75))
    assert abs(v - want) < 1e-6
    assert b < 1e-6


def test_eval_bound_certifies(seed_points=((0.1, 0.8), (-0.3, 1.0), (0.45, 0.9), (0.0, 1.3), (0.2, 0.85))):
    for re, im in seed_points:
        p = EvalPoint(0, complex(re, im))
        lo, bound = eval_numeric(eta_power(24, 6), p, tol=math.inf)
        hi, _ = eval_numeric(eta_power(24, 12), p, tol=math.inf)
        assert abs(lo - hi) < bound


def test_insufficient_truncation():
    with pytest.raises(SeriesError, match="insufficient truncation"):
        eval_numeric(eta_power(-24, 2), EvalPoint(0, 0.6j), tol=1e-12)


def test_eval_point_guard():
    with pytest.raises(SeriesError):
        EvalPoint(0, -1j)
