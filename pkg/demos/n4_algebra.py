"""The small N=4 mode algebra: Jacobi identity and the G_0 square."""

from vosa import n4

r = n4.jacobi_check(1)
print("Jacobi at window 1:", r["pass"], "on", r["triples"], "triples")
lem = n4.lemma_g0_square()
print("G_0 square magnitudes", [str(m) for m in lem["magnitudes"]], "sign", lem["realized_sign"])
