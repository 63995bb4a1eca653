import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vosa.codes import d_code_family, golay12, golay_lambda_basis
from vosa.lattices import (
    Coset,
    Lattice,
    LatticeError,
    Marking,
    SignCharacter,
    a1_embedding,
    d_coset,
    d_glue_vector,
    d_lattice,
    d_plus,
    discriminant_group,
    dn_class,
    e8_gram,
    glue_image,
    labels_to_words,
    make_lattice,
    orthogonal_sum,
    short_vectors,
    sqrt3_z,
    theta,
    z_lattice,
)

H = Fraction(1, 2)


def box_oracle(n, shift, even_sum, trunc, marking=None, signed=False, box=4):
    """Brute-force sum over x = shift + y, y in Z^n (even coordinate sum if requested)."""
    y = np.array(list(itertools.product(range(-box, box + 1), repeat=n)), dtype=np.int64)
    if even_sum:
        y = y[y.sum(axis=1) % 2 == 0]
    x2 = 2 * y + np.array([int(2 * Fraction(s)) for s in shift], dtype=np.int64)
    n4 = (x2 * x2).sum(axis=1)
    keep = n4 < 8 * trunc
    x2, n4 = x2[keep], n4[keep]
    z = 3 * x2 @ np.array(marking, dtype=np.int64) if marking else np.zeros(len(n4), dtype=np.int64)
    sgn = np.where((n4 // 4) % 2 == 1, -1, 1) if signed else np.ones(len(n4), dtype=np.int64)
    out = Counter()
    for a, b, c in zip(n4.tolist(), z.tolist(), sgn.tolist()):
        out[(Fraction(a, 8), b)] += c
    return {k: v for k, v in out.items() if v}


def as_dict(s):
    return {(n, l): c.to_fraction() for n, l, c in s.items()}


@pytest.mark.parametrize("route", ["auto", "enumerate"])
def test_theta_z(route):
    t = theta(z_lattice(1).coset(), trunc=5, route=route)
    assert as_dict(t) == {(Fraction(0), 0): 1, (H, 0): 2, (Fraction(2), 0): 2, (Fraction(9, 2), 0): 2}


@pytest.mark.parametrize("n,i", [(n, i) for n in (1, 2, 3, 4) for i in range(4)])
def test_d_coset_theta_against_box(n, i):
    c = d_coset(n, i)
    oracle = box_oracle(n, d_glue_vector(n, i), True, 3)
    assert as_dict(theta(c, trunc=3)) == oracle
    assert as_dict(theta(c, trunc=3, route="enumerate")) == oracle


def test_e8_two_constructions():
    a = theta(d_plus(8).coset(), trunc=3)
    b = theta(e8_gram().coset(), trunc=3, route="enumerate")
    assert a == b.with_trunc_at_most(a.trunc)
    union = box_oracle(8, (0,) * 8, True, 3, box=2)
    for k, v in box_oracle(8, (H,) * 8, True, 3, box=2).items():
        union[k] = union.get(k, 0) + v
    assert as_dict(a) == union
    assert union[(Fraction(1), 0)] == 240 and union[(Fraction(2), 0)] == 2160


def test_d4_plus_theta_equals_z4():
    assert theta(d_plus(4).coset(), trunc=4) == theta(z_lattice(4).coset(), trunc=4)


def test_d12_plus_minimum_norm_two():
    t = theta(d_plus(12).coset(), trunc=2)
    assert t.coeff(H).is_zero()
    oracle = box_oracle(12, (0,) * 12, True, 2, box=1)
    assert t.coeff(Fraction(1)).to_fraction() == oracle[(Fraction(1), 0)] == 264


def test_marked_and_signed_theta():
    lat = z_lattice(3)
    v = (1, 1, 0)
    m = Marking.from_ambient(lat, v)
    got = theta(lat.coset(), marking=m, sign=SignCharacter.norm_parity(), trunc=3)
    assert as_dict(got) == box_oracle(3, (0, 0, 0), False, 3, marking=v, signed=True)
    got_enum = theta(lat.coset(), marking=m, sign=SignCharacter.norm_parity(), trunc=3, route="enumerate")
    assert got == got_enum


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4), st.integers(0, 3), st.lists(st.integers(-2, 2), min_size=4, max_size=4))
def test_theta_routes_agree(n, i, v):
    c = d_coset(n, i)
    m = Marking.from_ambient(c.lattice, v[:n])
    assert theta(c, m, trunc=2) == theta(c, m, trunc=2, route="enumerate")


def test_product_theta_of_orthogonal_sum():
    a, b = d_lattice(3), z_lattice(2)
    s = orthogonal_sum(a, b)
    assert theta(s.coset(), trunc=3, route="enumerate") == theta(a.coset(), trunc=3) * theta(b.coset(), trunc=3)


def test_short_vectors_d4():
    vs = short_vectors(d_lattice(4).coset(), 2)
    nonzero = [v for v in vs if any(v)]
    assert len(nonzero) == 24
    assert d_lattice(4).coset().min_norm() == 0
    assert d_coset(4, 1).min_norm() == 1


def test_discriminant_groups():
    assert len(discriminant_group(d_lattice(4))) == 4
    assert len(discriminant_group(d_lattice(5))) == 4
    assert len(discriminant_group(sqrt3_z(2))) == 9
    assert d_lattice(6).determinant() == 4


def test_dn_class_of_glue_vectors():
    for i in range(4):
        assert dn_class(d_glue_vector(6, i)) == i


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("i", range(4))
def test_glue_d_over_a1(n, i):
    words = labels_to_words(glue_image(d_coset(2 * n, i), a1_embedding(n)), 2)
    code, reps = d_code_family(n)
    want = {tuple((a + b) % 2 for a, b in zip(w, reps[i])) for w in code.words}
    assert {tuple(int(x) % 2 for x in w) for w in words} == want


def test_glue_golay_index():
    lam = golay_lambda_basis(golay12())
    words = labels_to_words(glue_image(d_plus(12), Lattice.from_basis(lam)), 3)
    assert len(set(words)) == 729


def test_make_lattice_names():
    assert make_lattice("D4").name == "D4"
    assert isinstance(make_lattice("D6+[2]"), Coset)
    assert make_lattice("E8").name == "E8"
    assert make_lattice("A1^3").gram[0][0] == 2
    assert make_lattice("sqrt3Z^2").gram[1][1] == 3
    with pytest.raises(LatticeError):
        make_lattice("D6+")
    with pytest.raises(LatticeError):
        make_lattice("Q7")


def test_lattice_guards():
    with pytest.raises(LatticeError):
        Lattice([[1, 0], [1, 1]])
    with pytest.raises(LatticeError):
        Lattice([[1, 0], [0, -1]])


def test_integrality_flags():
    assert d_lattice(4).is_even() and d_plus(8).is_even()
    assert not d_plus(12).is_even() and d_plus(12).is_integral()
    assert not z_lattice(2).is_even()
    assert np.isclose(float(d_plus(12).determinant()), 1.0)
