"""Build bulk decompositions and check S and T invariance of their partition vectors."""

from vosa import bulk

for example, n in [("diagD", 1), ("diagF", 2), ("torusD", 1)]:
    b = bulk.build_bulk(example, n)
    r = bulk.modular_check(b)
    h = bulk.hypothesis_check(b)
    print(f"{example} n={n}: c={b.c} summands={len(b.summands)} "
          f"S/T pass={r['pass']} residual={r['residual']:.1e} tail={r['tail_bound']:.1e} "
          f"-> {h['classification']}")

g = bulk.build_bulk("golayD12")
print("golayD12:", bulk.hypothesis_check(g)["classification"],
      "T residual", bulk.modular_check(g, check_s=False, t_power=1)["t_residual"],
      "T^3 residual", bulk.modular_check(g, check_s=False, t_power=3)["t_residual"])
