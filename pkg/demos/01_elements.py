"""Elements of a tensor product of 2x2 matrix algebras, one site at a time.

Run: python demos/01_elements.py
"""

from locmat import Element, QQ, GF, SiteShape, commutator, conjugate, dense_expand, invert

sh = SiteShape(2)


def e(i, p, q, F=QQ):
    return Element.unit(F, sh, i, p, q)


one = Element.one(QQ, sh)

print("A matrix unit at site 1 and its canonical form:")
print("  e11(1) =", e(1, 1, 1))
print("  (e11 is stored through 1 - e22, so every element has one spelling)")

x = e(1, 1, 2) * e(2, 1, 1)
print("\nProducts across sites commute and are recorded together:")
print("  e12(1) e11(2) =", x)
print("  e11(2) e12(1) =", e(2, 1, 1) * e(1, 1, 2))

print("\nWithin one site the matrix-unit rules apply:")
print("  e12(1) e21(1) =", e(1, 1, 2) * e(1, 2, 1))
print("  [e12(1), e21(1)] =", commutator(e(1, 1, 2), e(1, 2, 1)))

print("\nThe dense Kronecker picture on sites 1, 2 (first site most significant):")
for row in dense_expand(x, [1, 2]):
    print("  ", row)

u = one + e(1, 1, 1) * e(2, 1, 2)
print("\nu = 1 + e11(1) e12(2) is invertible:")
print("  u^-1 =", invert(u))
print("  u^-1 e12(1) u =", conjugate(u, e(1, 1, 2)))

F = GF(3)
print("\nThe same arithmetic over GF(3):")
print("  4 e12(1) =", e(1, 1, 2, F).scale(4))
print("  [e12(1), e21(1)] =", commutator(e(1, 1, 2, F), e(1, 2, 1, F)))
