"""The fifteen acceptance criteria, each printing one PASS/FAIL line."""

import cmath
import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from vosa import bulk, characters, classify, codes, freefields, lattices, n4
from vosa.series import EvalPoint, eval_numeric

POINTS = (1j, cmath.exp(1j * math.pi / 3), 0.3 + 0.9j)
H = Fraction(1, 2)


def test_criterion_01_golay(report_line):
    g = codes.golay12()
    vecs = np.array(list(itertools.product(range(3), repeat=12)), dtype=np.int64)
    # oracle: the code is self-dual, so it is everything orthogonal to its generators
    oracle = vecs[np.all((vecs @ g.generators.T) % 3 == 0, axis=1)]
    words = {tuple(int(x) % 3 for x in w) for w in g.words}
    dist = dict(sorted(Counter(int(k) for k in np.count_nonzero(oracle, axis=1)).items()))
    ok = (g.dimension == 6 and len(words) == 729 and words == {tuple(w) for w in oracle}
          and g.is_self_orthogonal() and g.minimum_weight() == 6
          and dist == {0: 1, 6: 264, 9: 440, 12: 24} == g.weight_distribution())
    assert report_line(1, ok, f"ternary Golay code dim={g.dimension} min_wt={g.minimum_weight()} dist={dist}")


def test_criterion_02_d_glue(report_line):
    bad = []
    for n in (2, 3):
        code, reps = codes.d_code_family(n)
        for i in range(4):
            img = lattices.glue_image(lattices.d_coset(2 * n, i), lattices.a1_embedding(n))
            got = {tuple(int(x) % 2 for x in w) for w in lattices.labels_to_words(img, 2)}
            want = {tuple((a + b) % 2 for a, b in zip(w, reps[i])) for w in code.words}
            if got != want:
                bad.append((n, i))
    assert report_line(2, not bad, f"glue(D2n+[i], A1^2n) = D-code+[i] for n in (2,3), i in 0..3; mismatches={bad}")


def test_criterion_03_golay_glue(report_line):
    g = codes.golay12()
    lam = codes.golay_lambda_basis(g)
    words = lattices.labels_to_words(lattices.glue_image(lattices.d_plus(12), lattices.Lattice.from_basis(lam)), 3)
    glue = codes.TernaryCode(np.array(words) % 3)
    perm, signs = codes.monomial_equivalence(glue, g, transitive=5)
    mapped = codes.apply_monomial(np.array(words), perm, signs)
    image = {tuple(int(x) % 3 for x in w) for w in mapped}
    ok = len(set(words)) == 729 and image == {tuple(int(x) % 3 for x in w) for w in g.words}
    assert report_line(3, ok, f"glue(D12+, lambda span) is a Golay code; coordinate map perm={perm} signs={signs}")


DECOMPOSITIONS = [("diagD", n) for n in (1, 2, 3)] + [("diagA1", n) for n in (1, 2, 3)] + \
    [("diagF", n) for n in (1, 2, 3)] + [("torusD", n) for n in (1, 2, 3)] + \
    [("diagVL", 2), ("tetrahedralK3", None), ("golayD12", None)]


def test_criterion_04_decompositions(report_line):
    bad = []
    for ex, n in DECOMPOSITIONS:
        b = bulk.build_bulk(ex, n)
        for sector in sorted(b.targets):
            r = bulk.verify_decomposition(b, trunc=(3, 3), sector=sector)
            if not r["pass"]:
                bad.append((ex, n, sector, r["first_mismatch"]))
    control = bulk.verify_decomposition(bulk.build_bulk("diagD", 1).dropped(1), trunc=(3, 3))
    ok = not bad and not control["pass"]
    assert report_line(4, ok, f"verify_decomposition at (3,3) on {len(DECOMPOSITIONS)} cases, failures={bad}; "
                              f"dropped-summand control mismatch at {control['first_mismatch']}")


def test_criterion_05_znsns(report_line):
    z = classify.znsns_c12(24, 1)
    got = [z.coeff(e).to_fraction() for e in (-H, 0, H)]
    ok = got == [1, 24, 276]
    assert report_line(5, ok, f"Z_NSNS(d=24) = q^-1/2 ({got[0]}) + {got[1]} + {got[2]} q^1/2 + ...")


def test_criterion_06_scan(report_line):
    got = sorted((d, t.name, k) for d, t, k in classify.enumerate_solutions())
    ok = got == [(0, "D12", 1), (8, "E8", 1)]
    assert report_line(6, ok, f"classification scan hits {got}")


def test_criterion_07_weight2(report_line):
    bad = [d for d in range(24) if classify.weight2_match(d)["kappa"] != 44 + 2 * d]
    assert report_line(7, not bad, f"weight-2 matching kappa = 44 + 2d for d in 0..23; failures={bad}")


def test_criterion_08_jacobi(report_line):
    r = n4.jacobi_check(2)
    ok = r["pass"] and r["residual"] == 0
    assert report_line(8, ok, f"N=4 graded Jacobi identity on {r['triples']} triples (window 2, c = 6k): "
                              f"residual {r['residual']}")


def test_criterion_09_lemma(report_line):
    r = n4.lemma_g0_square()
    ok = r["supported_on_L0_J0"] and r["magnitudes"] == (2, 1)
    assert report_line(9, ok, f"G-square supported on L0,J0={r['supported_on_L0_J0']} with magnitudes "
                              f"{tuple(str(m) for m in r['magnitudes'])} (required (2, 1)); "
                              f"realized sign {r['realized_sign']}")


def test_criterion_10_free_fields(report_line):
    space = freefields.build_fock(Fraction(7, 2))
    sl2 = freefields.verify_relations(Fraction(7, 2), "sl2-level-1", space=space)
    nf = freefields.verify_relations(Fraction(7, 2), "n4-c6", space=space, fail_fast=True)
    ok = sl2["pass"] and sl2["k"] == 1 and nf["pass"] and nf["c"] == 6 and nf["k"] == 1
    assert report_line(10, ok, f"free fields at 7/2: sl2-level-1 pass={sl2['pass']} (k={sl2['k']}); "
                               f"n4-c6 pass={nf['pass']} (c={nf['c']}, k={nf['k']}) "
                               f"first failure {nf['first_failure'] and nf['first_failure']['relation']}")


MODULAR = [("diagD", 1), ("diagD", 2), ("diagD", 3), ("diagF", 1), ("diagF", 2), ("torusD", 1)]


def test_criterion_11_modular(report_line):
    worst, bound, bad = 0.0, 0.0, []
    for ex, n in MODULAR:
        r = bulk.modular_check(bulk.build_bulk(ex, n), points=POINTS, tol=1e-6)
        worst, bound = max(worst, r["residual"]), max(bound, r["tail_bound"])
        if not r["pass"]:
            bad.append((ex, n))
    ok = not bad and worst < 1e-6 and bound < 1e-6
    assert report_line(11, ok, f"S,T invariance on {len(MODULAR)} examples: max residual {worst:.2e}, "
                               f"max tail bound {bound:.2e}")


def test_criterion_12_smatrix(report_line):
    real = {name: bulk.lattice_smatrix(lat).real for name, lat in
            [("A1", lattices.a1_power(1)), ("D2", lattices.d_lattice(2)), ("D4", lattices.d_lattice(4)),
             ("D6", lattices.d_lattice(6)), ("D8", lattices.d_lattice(8)), ("sqrt3Z", lattices.sqrt3_z(1))]}
    ok = all(real[k] for k in ("A1", "D2", "D4", "D6", "D8")) and not real["sqrt3Z"]
    assert report_line(12, ok, f"S-matrix reality {real}")


def test_criterion_13_genus(report_line):
    golay = bulk.elliptic_genus(bulk.build_bulk("golayD12"), 5)
    e0 = golay.specialize_z(1)
    const = all(k[0] == 0 for k in e0._t) and e0.coeff(0).to_fraction() == 24
    phi = bulk.phi01(4).scale(2)
    matches = golay.with_trunc_at_most(4).first_mismatch(phi) is None
    shift = bulk.jacobi_shift_check(golay)["pass"]
    torus = bulk.elliptic_genus(bulk.build_bulk("torusD", 1), 5).is_zero()
    tetra = bulk.elliptic_genus(bulk.build_bulk("tetrahedralK3"), 5).first_mismatch(golay) is None
    ok = const and matches and shift and torus and tetra
    assert report_line(13, ok, f"golay genus E(0)=24 through q^4: {const}; = 2 phi01 through q^3: {matches}; "
                               f"shift identity: {shift}; torusD genus 0: {torus}; tetrahedral = golay: {tetra}")


def test_criterion_14_flow(report_line):
    a1 = [characters.spectral_flow_character_check(j, ell, 6) for j in (0, 1) for ell in range(-2, 3)]
    a1_ok = all(r["pass"] for r in a1)
    bulk_ok = {ex: bulk.spectral_flow_symmetry_check(bulk.build_bulk(ex), trunc=3)["pass"]
               for ex in ("tetrahedralK3", "golayD12")}
    ok = a1_ok and all(bulk_ok.values())
    assert report_line(14, ok, f"A1 level-1 flow for l in -2..2: {a1_ok}; NS/R interchange {bulk_ok}")


def test_criterion_15_f_identities(report_line):
    f3 = characters.n2_f(3, 6).specialize_z(1).is_zero()
    worst = 0.0
    for s in (1, -1):
        for tau in POINTS:
            v, bnd = eval_numeric(characters.n2_f(s, 6), EvalPoint(0, tau))
            worst = max(worst, abs(v - cmath.exp(1j * math.pi * s / 6)) + bnd)
    ok = f3 and worst < 1e-6
    assert report_line(15, ok, f"f3(0) = 0 through q^6: {f3}; max |f_pm1(0) - e^(pm i pi/6)| + tail {worst:.2e}")
