"""The c = 12 scan: which d and simple types give a consistent NS-NS character."""

from fractions import Fraction

from vosa import classify

z = classify.znsns_c12(24, 1)
print("Z_NSNS(d=24):", [str(z.coeff(e).to_fraction()) for e in (Fraction(-1, 2), 0, Fraction(1, 2))])
for d, t, k in classify.enumerate_solutions():
    print(f"hit: d={d} type={t.name} level={k}")
print("kappa(d) for d=0..5:", [str(classify.weight2_match(d)["kappa"]) for d in range(6)])
