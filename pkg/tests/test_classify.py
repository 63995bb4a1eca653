import itertools
from fractions import Fraction

import pytest

from vosa.classify import (
    ClassifyError,
    dual_coxeter,
    enumerate_solutions,
    signed_d4_theta,
    simple_types,
    weight2_match,
    znsns_c12,
    znsns_c12_eta,
    znsns_c12_printed,
)

H = Fraction(1, 2)

# dimensions of the simply-laced algebras; h = dim/rank - 1 for these
SIMPLY_LACED_DIM = {"A": lambda n: n * (n + 2), "D": lambda n: n * (2 * n - 1)}
EXCEPTIONAL_DIM = {"E6": 78, "E7": 133, "E8": 248}


def test_znsns_leading_terms():
    z = znsns_c12(24, 1)
    assert [z.coeff(e).to_fraction() for e in (-H, 0, H)] == [1, 24, 276]
    assert znsns_c12(0, 1).coeff(0).to_fraction() == 0


def test_znsns_against_product_oracle():
    # q^(-1/2) prod (1+q^(k-1/2))^24 through q^2 by expanding 24 copies of each factor
    poly = {Fraction(0): 1}
    for k in range(1, 4):
        for _ in range(24):
            new = dict(poly)
            for e, c in poly.items():
                if e + Fraction(2 * k - 1, 2) < Fraction(5, 2):
                    new[e + Fraction(2 * k - 1, 2)] = new.get(e + Fraction(2 * k - 1, 2), 0) + c
            poly = new
    z = znsns_c12(24, 2)
    assert {n: c.to_fraction() for n, _, c in z.items()} == {e - H: c for e, c in poly.items()}


@pytest.mark.parametrize("d", [0, 5, 12, 24])
def test_znsns_eta_quotient_route(d):
    assert znsns_c12(d, 3) == znsns_c12_eta(d, 3)


def test_printed_quotient_differs():
    assert znsns_c12_printed(24, 1).first_mismatch(znsns_c12(24, 1)) is not None


def test_znsns_guard():
    with pytest.raises(ClassifyError):
        znsns_c12(25)


def test_signed_d4_theta_against_box():
    out = {}
    for x in itertools.product(range(-3, 4), repeat=4):
        if sum(x) % 2:
            continue
        n = sum(v * v for v in x)
        if Fraction(n, 4) < 3:
            out[Fraction(n, 4)] = out.get(Fraction(n, 4), 0) + (-1) ** (n // 2)
    th = signed_d4_theta(3)
    assert {n: c.to_fraction() for n, _, c in th.items()} == {k: v for k, v in out.items() if v}
    assert [th.coeff(e).to_fraction() for e in (0, H, 1)] == [1, -24, 24]


@pytest.mark.parametrize("d", range(24))
def test_weight2_kappa(d):
    r = weight2_match(d)
    assert r["kappa"] == 44 + 2 * d and r["pass"]


def test_weight2_guards():
    with pytest.raises(ClassifyError):
        weight2_match(24)
    with pytest.raises(ClassifyError):
        weight2_match(1, trunc=H)


def oracle_h(t):
    if t.family in SIMPLY_LACED_DIM:
        return SIMPLY_LACED_DIM[t.family](t.rank) // t.rank - 1
    if t.name in EXCEPTIONAL_DIM:
        return EXCEPTIONAL_DIM[t.name] // t.rank - 1
    return None


def test_dual_coxeter_simply_laced_oracle():
    for t in simple_types(12):
        h = oracle_h(t)
        if h is not None:
            assert t.dual_coxeter == h


def test_dual_coxeter_non_simply_laced():
    assert [dual_coxeter("B", 3), dual_coxeter("C", 3), dual_coxeter("F", 4), dual_coxeter("G", 2)] == [5, 4, 9, 4]
    with pytest.raises(ClassifyError):
        dual_coxeter("E", 9)


def test_simple_types_have_no_isomorphic_repeats():
    names = [t.name for t in simple_types(4)]
    assert len(names) == len(set(names))
    assert "B1" not in names and "C2" not in names and "D3" not in names and "D2" not in names
    assert names[:4] == ["A1", "A2", "A3", "A4"]


def test_classification_scan():
    got = sorted((d, t.name, k) for d, t, k in enumerate_solutions())
    assert got == [(0, "D12", 1), (8, "E8", 1)]


def test_scan_brute_force():
    # independent scan over the full (d, type, level) grid with levels up to 30
    hits = set()
    for d in range(24):
        for t in simple_types(12):
            if t.rank > Fraction(24 - d, 2):
                continue
            for k in range(1, 31):
                if t.dual_coxeter == (22 + d) * k:
                    hits.add((d, t.name, k))
    assert hits == {(0, "D12", 1), (8, "E8", 1)}
