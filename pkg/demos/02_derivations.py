"""Derivations given by sparse systems: the z / y_k ladder and local inner solving.

Run: python demos/02_derivations.py
"""

from locmat import (
    Element,
    QQ,
    SiteShape,
    SparseSum,
    build_yk,
    build_z,
    derivation_commutator,
    equal_on_truncation,
    expand_basis,
    inner_solve_local,
)
from locmat.tensor import commutator

sh = SiteShape(2)


def e(i, p, q):
    return Element.unit(QQ, sh, i, p, q)


z, y1 = build_z(QQ, sh), build_yk(1, QQ, sh)
print("z   sums ad(e11(i) e12(i+1)) over every window i, i+1")
print("y_1 sums ad(e12(i)) over every site i")
print("Neither is inner, yet each acts on any finitely supported element:")
print("  z(e12(2))   =", z(e(2, 1, 2)))
print("  y_1(e21(2)) =", y1(e(2, 2, 1)))

print("\nBracketing with z lengthens the window by one each time:")
d = y1
for k in range(1, 6):
    d = derivation_commutator(z, d)
    same = d == build_yk(k + 1, QQ, sh)
    print(f"  [z, y_{k}] = y_{k + 1}: {same}   (template {d.families[0].template})")
print("  agreement on A_[1..8] generators for the last one:", equal_on_truncation(d, build_yk(6, QQ, sh), 8))

print("\nOn any finite block of sites, a derivation agrees with an inner one:")
for sites in ([1], [1, 2], [1, 2, 3]):
    b = inner_solve_local(y1, sites)
    print(f"  y_1 = ad(b) on A_{sites}: b = {b}")
x = e(1, 2, 1) * e(3, 1, 2)
b = inner_solve_local(y1, [1, 2, 3])
print("  check on e21(1) e12(3):", y1(x) == commutator(b, x))

print("\nCoefficients against ad of canonical monomials: for y_1 - 2 y_3 the count")
print("keeps growing as more sites are admitted, so no finite inner part absorbs it:")
combo = SparseSum.from_parts(QQ, sh) + y1 + build_yk(3, QQ, sh).scale(-2)
for N in (4, 8, 12):
    print(f"  nonzero coefficients on A_[1..{N}]: {len(expand_basis(combo).truncated(N))}")
