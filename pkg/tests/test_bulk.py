import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from vosa import bulk
from vosa.lattices import a1_power, d_lattice, scaled_z, sqrt3_z
from vosa.series import CycNum

_CACHE = {}


def built(example, n=None):
    key = (example, n)
    if key not in _CACHE:
        _CACHE[key] = bulk.build_bulk(example, n)
    return _CACHE[key]


def weight(w):
    return sum(1 for x in w if x)


# construction ------------------------------------------------------------------

@pytest.mark.parametrize("example,n,counts", [
    ("diagD", 1, {"NS-NS": 4, "R-R": 0}),
    ("diagA1", 2, {"NS-NS": 16, "R-R": 0}),
    ("diagF", 2, {"NS-NS": 4, "R-R": 4}),
    ("torusD", 1, {"NS-NS": 4, "R-R": 4}),
    ("tetrahedralK3", None, {"NS-NS": 16, "R-R": 16}),
    ("golayD12", None, {"NS-NS": 729, "R-R": 729}),
    ("gepner16", None, {"NS-NS": 729, "R-R": 729}),
])
def test_summand_counts(example, n, counts):
    b = built(example, n)
    assert {s: len(b.sector(s)) for s in counts} == counts
    assert not b.sector("NS-R") and not b.sector("R-NS")


def test_central_charges():
    assert built("diagD", 2).c == 4 and built("torusD", 1).c == 3
    assert built("golayD12").c == 6 and built("tetrahedralK3").c == 6


def test_golay_and_gepner_joint_codes_differ():
    g = [weight(w) for w in built("golayD12").joint_words() if any(w)]
    p = [weight(w) for w in built("gepner16").joint_words() if any(w)]
    assert len(g) == len(p) == 728
    assert min(g) == 6 and min(p) < 6


def test_unknown_example_and_missing_n():
    with pytest.raises(bulk.BulkError):
        bulk.build_bulk("nope")
    with pytest.raises(bulk.BulkError):
        bulk.build_bulk("diagD")
    with pytest.raises(bulk.BulkError):
        bulk.build_bulk("diagVL", 3)


def test_vacuum_must_appear_once():
    b = built("diagD", 1)
    with pytest.raises(bulk.BulkError):
        bulk.BulkDecomposition("x", 1, "a", "b", b.summands + b.summands[:1], b.c)


def test_json_summary():
    d = built("diagF", 1).to_json()
    assert d["example"] == "diagF" and len(d["summands"]) == len(built("diagF", 1).summands)


# decomposition -------------------------------------------------------------------

@pytest.mark.parametrize("example,n", [("diagD", 1), ("diagD", 2), ("diagA1", 1), ("diagF", 1),
                                       ("torusD", 1), ("diagVL", 2), ("tetrahedralK3", None)])
def test_decomposition_small(example, n):
    b = built(example, n)
    for sector in sorted(b.targets):
        r = bulk.verify_decomposition(b, trunc=(2, 2), sector=sector)
        assert r["pass"], r["first_mismatch"]


def test_decomposition_enumerate_route():
    b = built("diagD", 2)
    r = bulk.verify_decomposition(b, trunc=(2, 2), route="enumerate")
    assert r["pass"]


def test_golay_decomposition_low_order():
    b = built("golayD12")
    for sector in ("NS-NS", "R-R"):
        assert bulk.verify_decomposition(b, trunc=(Fraction(3, 2), Fraction(3, 2)), sector=sector)["pass"]


def test_dropped_summand_fails():
    b = built("diagD", 1)
    for i in range(len(b.summands)):
        r = bulk.verify_decomposition(b.dropped(i), trunc=(2, 2))
        assert not r["pass"] and r["first_mismatch"] is not None


def test_swapped_decomposition():
    b = built("torusD", 1).swapped()
    for sector in sorted(b.targets):
        assert bulk.verify_decomposition(b, trunc=(2, 2), sector=sector)["pass"]


def test_missing_target():
    with pytest.raises(bulk.BulkError):
        bulk.verify_decomposition(built("gepner16"))


# modular properties ---------------------------------------------------------------

def test_bold_matrices():
    assert bulk.s_squared_identity()
    t = bulk.BOLD_T
    assert np.array_equal(t @ t, np.eye(4, dtype=np.int64))


@pytest.mark.parametrize("example,n", [("diagD", 1), ("diagF", 1), ("torusD", 1)])
def test_partition_vector_positive(example, n):
    pv = bulk.PartitionVector(built(example, n))
    rng = np.random.default_rng(7)
    for _ in range(5):
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 1.5))
        z, bound = pv.evaluate(tau, 0, 6)
        assert abs(z[0].imag) < 1e-9 and z[0].real > 0 and bound < 1e-6


@pytest.mark.parametrize("example,n", [("diagD", 1), ("diagD", 2), ("diagF", 1), ("torusD", 1)])
def test_modular_invariance(example, n):
    r = bulk.modular_check(built(example, n))
    assert r["pass"], r["first_mismatch"]
    assert r["tail_bound"] < 1e-6


def test_modular_with_elliptic_variable():
    r = bulk.modular_check(built("torusD", 1), u=0.1, check_t=False)
    assert r["pass"]
    printed = bulk.modular_check(built("torusD", 1), u=0.1, check_t=False, multiplier="printed")
    assert not printed["pass"]


def test_unknown_multiplier():
    with pytest.raises(bulk.BulkError):
        bulk.modular_check(built("diagD", 1), multiplier="x")


@pytest.mark.parametrize("example,n,i", [("diagD", 1, 1), ("diagF", 2, 0)])
def test_flipped_parity_breaks_modularity(example, n, i):
    b = built(example, n).with_flipped_parity(i)
    r = bulk.modular_check(b, check_t=False)
    assert r["residual"] > 0.1


def test_golay_t_order_three():
    b = built("golayD12")
    r1 = bulk.modular_check(b, check_s=False, t_power=1)
    r3 = bulk.modular_check(b, check_s=False, t_power=3)
    assert r1["t_residual"] > 0
    assert r3["t_residual"] == 0


# S-matrices --------------------------------------------------------------------------

@pytest.mark.parametrize("lat,real", [
    (a1_power(1), True), (d_lattice(2), True), (d_lattice(4), True), (d_lattice(6), True),
    (sqrt3_z(1), False),
])
def test_lattice_smatrix_reality(lat, real):
    s = bulk.lattice_smatrix(lat)
    assert s.real is real and s.unitary
    assert s.real == bulk.weil_real_criterion(lat)


def test_smatrix_d4_entries():
    s = bulk.lattice_smatrix(d_lattice(4))
    assert len(s.labels) == 4
    m = s.numeric()
    assert np.allclose(m @ m.conj().T, np.eye(4))
    assert np.allclose(np.abs(m), 0.5)


def test_smatrix_sqrt3_phases():
    m = bulk.lattice_smatrix(sqrt3_z(1)).numeric()
    w = cmath.exp(-2j * math.pi / 3)
    want = np.array([[1, 1, 1], [1, w, w * w], [1, w * w, w]]) / math.sqrt(3)
    assert sorted(np.round(m.flatten(), 9), key=lambda x: (x.real, x.imag)) == \
        sorted(np.round(want.flatten(), 9), key=lambda x: (x.real, x.imag))


def test_smatrix_guards():
    with pytest.raises(bulk.BulkError):
        bulk.lattice_smatrix(scaled_z(1, Fraction(1, 2)))


def test_inv_sqrt():
    assert bulk._inv_sqrt(12) * bulk._inv_sqrt(12) == CycNum.rational(Fraction(1, 12))
    with pytest.raises(bulk.BulkError):
        bulk._inv_sqrt(5)


# hypotheses ------------------------------------------------------------------------------

@pytest.mark.parametrize("example,n,verdict,t_order", [
    ("diagD", 1, "potential", 1),
    ("diagF", 2, "potential", 1),
    ("torusD", 1, "potential", 1),
    ("tetrahedralK3", None, "potential", 1),
    ("golayD12", None, "quasi-potential", 3),
    ("gepner16", None, "quasi-potential", 2),
])
def test_hypothesis_verdicts(example, n, verdict, t_order):
    r = bulk.hypothesis_check(built(example, n))
    assert r["classification"] == verdict
    assert r["t_order"] == t_order


def test_odd_fermion_count_has_non_real_s():
    # the even part of F(2) is V_{D1}, whose discriminant Z/4 gives a non-real S
    r = bulk.hypothesis_check(built("diagF", 1))
    assert r["congruence"] and not r["right_s_real"]
    assert r["classification"] == "fails hypotheses"


# spectral flow and elliptic genus -----------------------------------------------------------

@pytest.mark.parametrize("example,n", [("torusD", 1), ("tetrahedralK3", None)])
def test_spectral_flow_symmetry(example, n):
    assert bulk.spectral_flow_symmetry_check(built(example, n), trunc=3)["pass"]


def test_spectral_flow_needs_n2():
    with pytest.raises(bulk.BulkError):
        bulk.spectral_flow_symmetry_check(built("diagD", 1))


def test_phi01_low_coefficients():
    p = bulk.phi01(2)
    got0 = {l // 6: p.coeff(0, l).to_fraction() for l in (-6, 0, 6)}
    got1 = {l // 6: p.coeff(1, l).to_fraction() for l in (-12, -6, 0, 6, 12)}
    assert got0 == {-1: 1, 0: 10, 1: 1}
    assert got1 == {-2: 10, -1: -64, 0: 108, 1: -64, 2: 10}


def test_phi01_depends_on_discriminant():
    p = bulk.phi01(3)
    by_disc = {}
    for n, l, c in p.items():
        r = Fraction(l, 6)
        d = 4 * n - r * r
        assert by_disc.setdefault(d, c) == c


def test_theta_jacobi_odd_vanishes_at_zero():
    assert bulk.theta_jacobi(1, 3).specialize_z(1).is_zero()


def test_tetrahedral_genus():
    r = bulk.genus_report(built("tetrahedralK3"), trunc=3, phi_trunc=3)
    assert r["pass"] and r["E0"] == "24" and r["phi01_multiple"] == "2"


def test_torus_genus_vanishes():
    assert bulk.elliptic_genus(built("torusD", 1), 3).is_zero()


def test_genus_needs_rr_sector():
    with pytest.raises(bulk.BulkError):
        bulk.elliptic_genus(built("diagD", 1))


def test_shift_identity_detects_damage():
    e = bulk.phi01(3)
    assert bulk.jacobi_shift_check(e)["pass"]
    bad = e + bulk.JacobiSeries.monomial(1, 0, 1, e.trunc)
    assert not bulk.jacobi_shift_check(bad)["pass"]
