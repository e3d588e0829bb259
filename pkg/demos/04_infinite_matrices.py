"""Infinite matrices indexed by affine patterns: exact products without truncation.

Run: python demos/04_infinite_matrices.py
"""

from locmat import QQ, GF, FinitaryMatrix, ad_apply, build_af, build_df, build_yk_minf, build_z_minf
from locmat.minf import af_inverse, conjugate_by_af, format_pattern, pattern_commutator, pattern_mul, to_dense_window

z = build_z_minf(QQ)
print("z   =", format_pattern(z), "  i.e. sum of e(2i, 2i+2)")
print("y_1 =", format_pattern(build_yk_minf(1, QQ)), "  i.e. sum of e(2i, 2i+1)")
print("\nTop-left 8x8 block of z:")
for row in to_dense_window(z, 8):
    print("  ", " ".join(str(v) for v in row))

print("\nProducts match indices by solving a linear equation, so no window is needed:")
print("  z * z =", format_pattern(pattern_mul(z, z)))
for k in range(1, 5):
    c = pattern_commutator(z, build_yk_minf(k, QQ))
    print(f"  [z, y_{k}] = {format_pattern(c)}   equals y_{k + 1}: {c == build_yk_minf(k + 1, QQ)}")

f = [2, -1, 3]
df = build_df(f, QQ)
print("\nd_f = diag(0, f(1), f(2), ...) with f =", f)
x = FinitaryMatrix(QQ, {(1, 2): 1, (3, 4): 5, (2, 2): 7})
print("  x       =", x)
print("  [d_f, x] =", ad_apply(df, x), " (still finitely many entries)")

F = GF(5)
g = [1, 4, 2]
af = build_af(g, F)
print("\na_f = Id + sum f(i) e(2i-1, 2i) over GF(5), f =", g)
print("  a_f * a_f^-1 is the identity:", pattern_mul(af, af_inverse(g, F)) == pattern_mul(af_inverse(g, F), af))
for i in (1, 2, 3):
    xi = FinitaryMatrix.unit(F, 1, 2 * i - 1)
    print(f"  a_f^-1 e(1,{2 * i - 1}) a_f = {conjugate_by_af(g, xi, F)}")
