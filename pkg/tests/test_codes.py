import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vosa.codes import (
    CodeError,
    TernaryCode,
    apply_monomial,
    d_code_family,
    find_split_permutation,
    golay12,
    golay_lambda_basis,
    golay_special_words,
    monomial_equivalence,
    ternary_dot,
    weight_enumerator,
)

# classical systematic generator [I6 | A] of the extended ternary Golay code
CLASSIC_A = np.array([
    [0, 1, 1, 1, 1, 1],
    [1, 0, 1, 2, 2, 1],
    [1, 1, 0, 1, 2, 2],
    [1, 2, 1, 0, 1, 2],
    [1, 2, 2, 1, 0, 1],
    [1, 1, 2, 2, 1, 0],
])


def all_vectors(n):
    return np.array(list(itertools.product(range(3), repeat=n)), dtype=np.int64)


def dual_oracle(gens):
    """All of F_3^n orthogonal to every generator, by exhaustion."""
    v = all_vectors(gens.shape[1])
    keep = np.all((v @ (gens % 3).T) % 3 == 0, axis=1)
    return {tuple(w) for w in v[keep]}


def span_oracle(gens):
    c = all_vectors(gens.shape[0])
    return {tuple(w) for w in (c @ gens) % 3}


@pytest.fixture(scope="module")
def g():
    return golay12()


def test_golay_invariants(g):
    assert g.dimension == 6 and g.length == 12 and len(g) == 729
    assert g.is_self_orthogonal()
    assert g.minimum_weight() == 6
    assert g.weight_distribution() == {0: 1, 6: 264, 9: 440, 12: 24}


def test_golay_against_exhaustive_oracle(g):
    words = {tuple(int(x) % 3 for x in w) for w in g.words}
    assert len(words) == 729
    assert words == dual_oracle(g.generators)
    dist = Counter(sum(1 for x in w if x) for w in words)
    assert dict(dist) == {0: 1, 6: 264, 9: 440, 12: 24}


def test_golay_equivalent_to_classic_generator(g):
    classic_gens = np.hstack([np.eye(6, dtype=np.int64), CLASSIC_A])
    classic = TernaryCode(classic_gens)
    assert span_oracle(classic_gens) == dual_oracle(classic_gens)
    perm, signs = monomial_equivalence(g, classic, transitive=5)
    mapped = apply_monomial(g.words, perm, signs)
    assert all(tuple(w) in classic for w in mapped)


def test_all_plus_word_and_special_words(g):
    assert (1,) * 12 in g
    sp = golay_special_words(g)
    assert len(sp) == 11
    assert all(w[0] == 1 and (w == 1).sum() == 6 and (w == -1).sum() == 6 for w in sp)


def test_lambda_basis_gram(g):
    lam = np.array(golay_lambda_basis(g), dtype=object)
    gram = lam.dot(lam.T)
    assert (gram == 3 * np.eye(12, dtype=int)).all()
    assert all(abs(x) * 2 == 1 for row in lam for x in row)


def test_split_permutation(g):
    perm = find_split_permutation(g)
    assert sorted(perm) == list(range(12))
    assert (1,) * 6 + (-1,) * 6 in g.permuted(perm)


def test_marked_enumerator_against_direct_count(g):
    split = g.permuted(find_split_permutation(g))
    e = weight_enumerator(split, marking=6)
    oracle = Counter()
    for w in split.words.tolist():
        a, b = w[:6], w[6:]
        oracle[(a.count(0), a.count(1), a.count(-1), b.count(0), b.count(1), b.count(-1))] += 1
    assert e.coeffs == dict(oracle)
    assert e.total() == 729
    assert e[(6, 0, 0, 6, 0, 0)] == 1
    assert e[(0, 6, 0, 0, 0, 6)] == 1 and e[(0, 0, 6, 0, 6, 0)] == 1
    assert e.evaluate([1] * 6) == 729


def test_unmarked_enumerator_matches_weights(g):
    e = weight_enumerator(g)
    by_weight = Counter()
    for (x, y, z), c in e.unmarked().items():
        by_weight[y + z] += c
    assert dict(by_weight) == g.weight_distribution()


def test_marking_must_halve(g):
    with pytest.raises(CodeError):
        weight_enumerator(g, marking=5)


def test_d_code_family_examples():
    code, reps = d_code_family(2)
    assert code.words == [(0, 0, 0, 0), (1, 1, 1, 1)]
    assert reps[1] == (1, 1, 0, 0) and reps[2] == (0, 1, 0, 1) and reps[3] == (1, 0, 0, 1)


@pytest.mark.parametrize("n", range(1, 9))
def test_d_code_family_structure(n):
    code, reps = d_code_family(n)
    assert code.is_linear()
    assert all(w[:n] == w[n:] and sum(w) % 4 == 0 for w in code.words)
    # oracle: half-words of even weight
    want = sum(1 for h in itertools.product((0, 1), repeat=n) if sum(h) % 2 == 0)
    assert len(code) == want == 2 ** (n - 1)
    cosets = [{tuple((a + b) % 2 for a, b in zip(w, reps[i])) for w in code.words} for i in range(4)]
    assert all(not (cosets[i] & cosets[j]) for i in range(4) for j in range(i))


def test_d_code_family_guard():
    with pytest.raises(CodeError):
        d_code_family(0)


def test_binary_code_generators_span():
    code, _ = d_code_family(4)
    gens = code.generators()
    span = {tuple(int(x) for x in (np.array(c) @ np.array(gens)) % 2)
            for c in itertools.product((0, 1), repeat=len(gens))}
    assert span == set(code.words)


@settings(max_examples=25, deadline=None)
@given(st.permutations(list(range(12))), st.lists(st.sampled_from([1, -1]), min_size=12, max_size=12))
def test_monomial_images_stay_golay(perm, signs):
    g = golay12()
    h = g.permuted(perm).sign_flipped(signs)
    assert h.weight_distribution() == g.weight_distribution()
    assert h.is_self_orthogonal()
    p, s = monomial_equivalence(h, g, transitive=5)
    assert all(tuple(w) in g for w in apply_monomial(h.words, p, s))


def test_ternary_dot_self_orthogonality(g):
    for a in g.generators:
        for b in g.generators:
            assert ternary_dot(a, b) == 0


def test_non_equivalent_codes_rejected(g):
    rep = TernaryCode(np.array([[1] * 6 + [0] * 6, [0] * 6 + [1] * 6]))
    other = TernaryCode(np.array([[1, 1, 1] + [0] * 9, [0] * 3 + [1] * 9]))
    with pytest.raises(CodeError):
        monomial_equivalence(rep, other)


def test_marked_enumerator_closed_form(g):
    # (X'^6+Y'^6+Z'^6)(X''^6+...) + 90 (X'^4Y'Z' + ...) X''^2Y''^2Z''^2
    # + 20 (X'^3Y'^3 + ...)(X''^3Y''^3 + ...) + 90 X'^2Y'^2Z'^2 (X''^4Y''Z'' + ...)
    sixes = [(6, 0, 0), (0, 6, 0), (0, 0, 6)]
    fours = [(4, 1, 1), (1, 4, 1), (1, 1, 4)]
    threes = [(3, 3, 0), (3, 0, 3), (0, 3, 3)]
    want = Counter()
    for a in sixes:
        for b in sixes:
            want[a + b] += 1
    for a in fours:
        want[a + (2, 2, 2)] += 90
        want[(2, 2, 2) + a] += 90
    for a in threes:
        for b in threes:
            want[a + b] += 20
    e = weight_enumerator(g.permuted(find_split_permutation(g)), marking=6)
    assert e.coeffs == dict(want)
