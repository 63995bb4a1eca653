import itertools
from fractions import Fraction

import pytest

from vosa import freefields as ff

H = Fraction(1, 2)


def subset_count(cutoff, nferm=12):
    """Count sets of distinct fermion modes (nferm species, r = 1/2, 3/2, ...) of total level <= cutoff."""
    modes = [Fraction(2 * j + 1, 2) for j in range(int(cutoff) + 1) for _ in range(nferm)
             if Fraction(2 * j + 1, 2) <= cutoff]
    total = 0
    for k in range(len(modes) + 1):
        if k * H > cutoff:
            break
        total += sum(1 for c in itertools.combinations(modes, k) if sum(c) <= cutoff)
    return total


@pytest.fixture(scope="module")
def space():
    return ff.build_fock(Fraction(3, 2))


@pytest.mark.parametrize("cutoff", [H, Fraction(1), Fraction(3, 2)])
def test_fock_dimension_oracle(cutoff):
    assert ff.fock_dimension(cutoff) == subset_count(cutoff) == ff.build_fock(cutoff).dim


def test_fock_dimension_small_values():
    assert [ff.fock_dimension(c) for c in (0, H, 1)] == [1, 13, 1 + 12 + 66]


def test_states_have_consistent_levels(space):
    levels = sorted(space.level(s) for s in space.basis)
    assert levels[0] == 0 and levels[-1] == Fraction(3, 2)
    assert sum(1 for l in levels if l == H) == 12


def test_clifford_relations(space):
    assert ff.clifford_check(space)["pass"]


def test_sl2_level_one(space):
    r = ff.verify_relations(Fraction(3, 2), "sl2-level-1", space=space)
    assert r["pass"], r["first_failure"]
    assert r["k"] == 1 and r["checked"] > 0


def test_n4_realization_central_charge_and_failures():
    r = ff.verify_relations(2, "n4-c6")
    assert r["c"] == 6 and r["k"] == 1
    # the bosonic and single-G families close; mixed G^1 G^2 families do not
    assert all("G" not in fam or ("1" not in fam or "2" not in fam) for fam in r["families_passed"])
    assert r["families_failed"] and all("1" in f and "2" in f for f in r["families_failed"])
    assert not r["pass"]


def test_guards(space):
    with pytest.raises(ff.FreeFieldError):
        ff.verify_relations(1, "sl2-level-1")
    with pytest.raises(ff.FreeFieldError):
        ff.verify_relations(Fraction(3, 2), "e8", space=space)
    with pytest.raises(ff.FreeFieldError):
        ff.composite_mode(space, "nope", 0)
