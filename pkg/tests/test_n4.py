from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vosa import n4
from vosa.n4 import G, J, L, ModeTerm, N4Error, Poly, bracket_modes

H = Fraction(1, 2)


def mode_strategy(window=2):
    return st.sampled_from(n4.basis_modes(window))


def test_virasoro_central_term():
    r = bracket_modes(L(2), L(-2))
    assert r.coeff(L(0)) == Poly.const(4)
    assert r.scalar_part() == Poly.c(Fraction(1, 2))


def test_g_anticommutator_has_no_central_term_at_half():
    r = bracket_modes(G(0, H), G(0, -H))
    assert r == ModeTerm.of(L(0), 2)


def test_g_central_term():
    r = bracket_modes(G(1, Fraction(3, 2)), G(1, Fraction(-3, 2)))
    assert r.scalar_part() == Poly.c(Fraction(2, 3))


def test_affine_level():
    r = bracket_modes(J(1, 1), J(1, -1))
    assert r.scalar_part() == Poly.k(Fraction(-1, 2))
    assert bracket_modes(J(1, 0), J(2, 0)) == ModeTerm.of(J(3, 0))


@settings(max_examples=200, deadline=None)
@given(mode_strategy(), mode_strategy())
def test_graded_antisymmetry(x, y):
    s = 1 if x.parity() and y.parity() else -1
    assert bracket_modes(x, y) == bracket_modes(y, x).scale(s)


@settings(max_examples=150, deadline=None)
@given(mode_strategy(), mode_strategy())
def test_bracket_preserves_mode_number(x, y):
    for m in bracket_modes(x, y).modes():
        if m != n4.IDENTITY:
            assert m.n == x.n + y.n


def test_jacobi_window_one_with_c_equal_6k():
    r = n4.jacobi_check(1)
    assert r["pass"] and r["residual"] == 0
    assert r["triples"] == len(n4.basis_modes(1)) ** 3


def test_jacobi_needs_c_equal_6k():
    r = n4.jacobi_residual(G(0, Fraction(-3, 2)), G(1, -H), J(1, 2))
    assert r.modes() == []
    assert r.scalar_part() == Poly.k(2) - Poly.c(Fraction(1, 3))
    assert r.at_c6k().is_zero()


def test_jacobi_fails_with_ope_coefficient_four():
    assert not n4.jacobi_check(1, jg=Fraction(4))["pass"]


def test_jacobi_guard():
    with pytest.raises(N4Error):
        n4.jacobi_check(0)


def test_alpha_guard_and_values():
    assert n4.alpha(1, 1, 0) == H and n4.alpha(1, 0, 1) == -H and n4.alpha(1, 2, 3) == H
    with pytest.raises(N4Error):
        n4.alpha(0, 1, 1)


def test_poly_specialization():
    p = Poly.c(2) + Poly.k(3)
    assert p.specialize(c=1, k=1) == Poly.const(5)
    assert (Poly.c(1) - Poly.k(6)).at_c6k().is_zero()


def test_primed_relations():
    assert n4.primed_relations_check(1)["pass"]


@pytest.mark.parametrize("ell", [-1, 1, 2])
def test_flow_preserves_brackets(ell):
    assert n4.flow_bracket_check(ell, 1)["pass"]


def test_printed_flow_convention_breaks_brackets():
    assert not n4.flow_bracket_check(1, 1, convention="printed")["pass"]


def test_flow_inverse():
    for x in n4.flowed_basis(1):
        assert n4.spectral_flow(-1, n4.spectral_flow(1, x)) == x


def test_lemma_g0_square_report():
    r = n4.lemma_g0_square()
    assert r["supported_on_L0_J0"]
    # the formal bracket gives -2 (2 L_0 - J_0)
    assert r["ratio_to_2L0_minus_J0"] == -2
    assert r["magnitudes"] == (4, 2)
    assert r["realized_sign"] == "-"
    assert not r["matches_printed_minus_2L0_plus_J0"]
