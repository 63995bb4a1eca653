"""Elliptic genus of the tetrahedral and Golay theories against 2 phi_{0,1}."""

from vosa import bulk

for example in ("tetrahedralK3", "golayD12"):
    r = bulk.genus_report(bulk.build_bulk(example), trunc=3, phi_trunc=3)
    print(example, {k: r[k] for k in ("pass", "E0", "phi01_multiple")})

p = bulk.phi01(1)
print("phi01 q^0 row:", {l // 6: str(p.coeff(0, l).to_fraction()) for l in (-6, 0, 6)})
