"""Endomorphisms given by generator images: conjugators, factorization, growth.

Run: python demos/03_conjugations.py
"""

import random

from locmat import (
    ConjugatorSeq,
    Element,
    QQ,
    SiteShape,
    UnitalEndo,
    apply_endo,
    example1_sequence,
    example2_sequence,
    factorize,
    integrability_profile,
    recompose,
    skolem_noether,
)
from locmat.sampling import random_embedding_m2_m4, random_site_unit
from locmat.tensor import conjugate, invert

sh = SiteShape(2)


def e(i, p, q):
    return Element.unit(QQ, sh, i, p, q)


one = Element.one(QQ, sh)

# The swap of sites 1 and 2, presented only through where it sends generators.
swap_images = {(1, p, q): e(2, p, q) for p, q in [(1, 2), (2, 1), (2, 2)]}
swap_images.update({(2, p, q): e(1, p, q) for p, q in [(1, 2), (2, 1), (2, 2)]})
phi = UnitalEndo(swap_images, 2, QQ, sh)
print("phi swaps sites 1 and 2. phi(e12(1)) =", phi(e(1, 1, 2)))

a = skolem_noether(phi, [1, 2], [1, 2])
print("\nA conjugator found from the images alone (leading coefficient 1):")
print("  a =", a)
print("  a^-1 e21(1) a =", conjugate(a, e(1, 2, 1)))

print("\nAn embedding of A_1 into A_[1,2] that is not conjugation inside A_1:")
psi = random_embedding_m2_m4(random.Random(4), QQ, sh)
b = skolem_noether(psi, [1], [1, 2], seed=4)
print("  psi(e12(1)) =", psi(e(1, 1, 2)))
print("  conjugator b =", b)
print("  b^-1 e12(1) b == psi(e12(1)):", conjugate(b, e(1, 1, 2)) == psi(e(1, 1, 2)))

print("\nFactorizing phi into conjugations, each centralizing the earlier sites:")
seq = factorize(phi)
for k, ak in enumerate(seq, start=1):
    print(f"  a_{k} = {ak}")
print("  recomposes to phi:", recompose(seq, 2) == phi)

print("\nTwo kinds of conjugator sequences, measured by how fast")
print("dim span{x, psi_1 x, psi_2 psi_1 x, ...} grows:")
rng = random.Random(1)
local = example1_sequence([random_site_unit(rng, QQ, sh, k) for k in range(1, 11)])
x = e(1, 1, 2) * e(2, 2, 1)
print("  site-local units:           ", integrability_profile(local, x, 10))
print("  (1 - e11(k) e12(k+1)) chain:", integrability_profile(example2_sequence(10, QQ, sh), e(1, 1, 2), 10))
print("The first settles after two steps; the second grows by one at every step.")

chain = example2_sequence(4, QQ, sh)
print("\nThe chain's iterates of e12(1):")
y = e(1, 1, 2)
for i in range(1, 5):
    y = conjugate(chain[i - 1], y)
    print(f"  after {i}: {y}")

inv = ConjugatorSeq(tuple(invert(c) for c in chain))
print("\nInverse conjugators are 1 + e11(k) e12(k+1):", inv[0] == one + e(1, 1, 1) * e(2, 1, 2))
print("phi applied to e12(1) e21(2):", apply_endo(phi, e(1, 1, 2) * e(2, 2, 1)))
