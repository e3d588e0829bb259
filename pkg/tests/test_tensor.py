from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from locmat import linalg
from locmat.errors import (
    CharacteristicDividesSize,
    FieldMismatch,
    IndexOutOfRange,
    NotIdempotent,
    NotInCentralizer,
    NotInvertible,
    ShapeMismatchAtShiftedSite,
    ShiftOutOfRange,
    SupportError,
)
from locmat.field import GF, QQ, FieldSpec
from locmat.tensor import (
    Element,
    SiteShape,
    canonicalize,
    centralizer_check,
    commutator,
    conjugate,
    dense_expand,
    factor_site,
    from_dense,
    invert,
    normalized_trace,
    peirce_project,
    shift,
    solve_kernel,
)
from strategies import FIELDS, SHAPE2, SHAPE_MIXED, elements, raw_terms, scalars

SH = SHAPE2


def E(i, p, q, F=QQ, sh=SH):
    return Element.unit(F, sh, i, p, q)


def one(F=QQ, sh=SH):
    return Element.one(F, sh)


A1 = E(1, 1, 1) * E(2, 1, 2)  # e11(1) e12(2)


class TestFieldAndShape:
    def test_field_parse_and_print(self):
        assert str(FieldSpec.parse("q")) == "q"
        assert str(FieldSpec.parse("gf:7")) == "gf:7"
        with pytest.raises(ValueError):
            FieldSpec(4)

    def test_field_coercion(self):
        assert QQ("1/2") == Fraction(1, 2)
        assert QQ(Fraction(4, 2)) == 2 and type(QQ(Fraction(4, 2))) is int
        assert GF(5)(Fraction(1, 2)) == 3
        with pytest.raises(TypeError):
            QQ(0.5)
        with pytest.raises(ZeroDivisionError):
            GF(5)(Fraction(1, 5))

    def test_shape(self):
        sh = SiteShape.parse("default=2,3=4")
        assert sh.size(1) == 2 and sh.size(3) == 4
        assert str(sh) == "default=2,3=4"
        assert SiteShape(2, {5: 2}) == SiteShape(2)
        with pytest.raises(ValueError):
            SiteShape(1)
        with pytest.raises(ValueError):
            SiteShape(2, {3: 1})


class TestCanonicalize:
    def test_e11_rewrites(self):
        assert str(E(1, 1, 1)) == "1 - e[1](2,2)"

    def test_canonical_unit_passes_through(self):
        assert E(1, 1, 2).items() == [(((1, 1, 2),), 1)]

    def test_two_site_e11_expansion_against_kronecker(self):
        x = canonicalize(QQ, SH, [({1: (1, 1), 2: (1, 1)}, 1)])
        want = one() - E(1, 2, 2) - E(2, 2, 2) + E(1, 2, 2) * E(2, 2, 2)
        assert x == want
        assert oracles.dense_of(x, [1, 2]) == oracles.monomial_matrix(((1, 1, 1), (2, 1, 1)), [1, 2], SH)

    def test_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            E(1, 3, 1)
        with pytest.raises(IndexOutOfRange):
            canonicalize(QQ, SH, [({1: (1, 3)}, 1)])

    def test_zero_coefficients_dropped(self):
        assert canonicalize(QQ, SH, [({1: (1, 2)}, 2), ({1: (1, 2)}, -2)]).is_zero()
        assert canonicalize(GF(3), SH, [({1: (1, 2)}, 3)]).is_zero()

    @settings(max_examples=500)
    @given(st.sampled_from(FIELDS).flatmap(lambda F: st.tuples(st.just(F), raw_terms(F, SHAPE_MIXED, (1, 2, 3)))))
    def test_canonical_form_matches_kronecker_oracle(self, data):
        F, raw = data
        x = canonicalize(F, SHAPE_MIXED, raw)
        assert oracles.dense_of(x, [1, 2, 3]) == oracles.dense_of_terms(
            [(tuple((s, p, q) for s, (p, q) in sorted(m.items())), c) for m, c in raw], [1, 2, 3], SHAPE_MIXED, F
        )
        assert all(c != 0 for _, c in x.items())
        assert all((p, q) != (1, 1) for m, _ in x.items() for _, p, q in m)

    @settings(max_examples=500)
    @given(st.sampled_from([GF(2), GF(3)]).flatmap(
        lambda F: st.tuples(st.just(F), raw_terms(F, SH, (1, 2), 2), raw_terms(F, SH, (1, 2), 2))))
    def test_canonical_uniqueness_iff_dense_equal(self, data):
        F, r1, r2 = data
        x, y = canonicalize(F, SH, r1), canonicalize(F, SH, r2)
        d = lambda raw: oracles.dense_of_terms(  # noqa: E731
            [(tuple((s, p, q) for s, (p, q) in sorted(m.items())), c) for m, c in raw], [1, 2], SH, F)
        assert (x == y) == (d(r1) == d(r2))


class TestMul:
    def test_matrix_unit_relation(self):
        assert E(1, 1, 2) * E(1, 2, 1) == one() - E(1, 2, 2)

    def test_disjoint_sites_tensor(self):
        x = E(1, 1, 2) * E(2, 1, 2)
        assert x.items() == [(((1, 1, 2), (2, 1, 2)), 1)]

    def test_example2_inverse_pair(self):
        assert (one() + A1) * (one() - A1) == one()

    def test_field_mismatch(self):
        with pytest.raises(FieldMismatch):
            E(1, 1, 2) * E(1, 1, 2, F=GF(5))

    @settings(max_examples=500)
    @given(st.sampled_from(FIELDS).flatmap(
        lambda F: st.tuples(st.just(F), elements(F, SHAPE_MIXED, (1, 2, 3), 3),
                            elements(F, SHAPE_MIXED, (1, 2, 3), 3), elements(F, SHAPE_MIXED, (1, 2, 3), 3))))
    def test_ring_axioms_and_dense_homomorphism(self, data):
        F, x, y, z = data
        u = Element.one(F, SHAPE_MIXED)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert (x + y) * z == x * z + y * z
        assert u * x == x == x * u
        sites = [1, 2, 3]
        assert oracles.dense_of(x * y, sites) == oracles.mat_mul(
            oracles.dense_of(x, sites), oracles.dense_of(y, sites), F)
        assert dense_expand(x, sites) == oracles.dense_of(x, sites)


class TestCommutator:
    def test_examples(self):
        assert commutator(E(1, 1, 1), E(1, 1, 2)) == E(1, 1, 2)
        assert commutator(E(1, 1, 2), E(2, 1, 2)).is_zero()

    def test_example2_step(self):
        # e12(1) [e11(2), e12(2)] e12(3) = e12(1) e12(2) e12(3)
        x = E(1, 1, 2) * commutator(E(2, 1, 1), E(2, 1, 2)) * E(3, 1, 2)
        assert x == E(1, 1, 2) * E(2, 1, 2) * E(3, 1, 2)

    @settings(max_examples=300)
    @given(st.sampled_from(FIELDS).flatmap(
        lambda F: st.tuples(st.just(F), scalars(F), elements(F), elements(F), elements(F))))
    def test_lie_identities(self, data):
        F, c, x, y, z = data
        assert commutator(x, y) == -commutator(y, x)
        assert commutator(x.scale(c) + y, z) == commutator(x, z).scale(c) + commutator(y, z)
        jac = commutator(x, commutator(y, z)) + commutator(y, commutator(z, x)) + commutator(z, commutator(x, y))
        assert jac.is_zero()


class TestDense:
    def test_identity(self):
        assert dense_expand(one(), [1]) == [[1, 0], [0, 1]]

    def test_unit(self):
        assert dense_expand(E(1, 1, 2), [1]) == [[0, 1], [0, 0]]

    def test_kronecker_corner(self):
        m = dense_expand(E(1, 2, 2) * E(2, 2, 2), [1, 2])
        assert m[3][3] == 1 and sum(map(sum, m)) == 1

    def test_support_error(self):
        with pytest.raises(SupportError):
            dense_expand(E(2, 1, 2), [1])

    @settings(max_examples=200)
    @given(st.sampled_from(FIELDS).flatmap(lambda F: elements(F, SHAPE_MIXED, (1, 2, 3))))
    def test_from_dense_roundtrip(self, x):
        assert from_dense(dense_expand(x, [1, 2, 3]), [1, 2, 3], x.field, x.shape) == x


class TestInvert:
    def test_example2(self):
        assert invert(one() + A1) == one() - A1

    def test_one(self):
        assert invert(one()) == one()

    def test_nilpotent(self):
        with pytest.raises(NotInvertible):
            invert(E(1, 1, 2))

    def test_zero_and_scalars(self):
        with pytest.raises(NotInvertible):
            invert(Element.zero(QQ, SH))
        assert invert(Element.scalar(QQ, SH, 4)) == Element.scalar(QQ, SH, Fraction(1, 4))

    @settings(max_examples=300)
    @given(st.sampled_from(FIELDS).flatmap(lambda F: elements(F, SH, (1, 2), 5)))
    def test_invert_iff_nonzero_determinant(self, x):
        F = x.field
        sites = sorted(x.support) or [1]
        nonsingular = oracles.det(oracles.dense_of(x, sites), F) != 0
        try:
            y = invert(x)
        except NotInvertible:
            assert not nonsingular
            return
        assert nonsingular
        assert x * y == Element.one(F, SH) == y * x


class TestConjugate:
    def test_by_one(self):
        assert conjugate(one(), E(1, 1, 2)) == E(1, 1, 2)

    def test_example2_base_step(self):
        # a^{-1} x a with a = 1 + a1, i.e. (1 - a1) e12(1) (1 + a1)
        got = conjugate(one() + A1, E(1, 1, 2))
        assert got == E(1, 1, 2) - E(1, 1, 2) * E(2, 1, 2)
        assert oracles.dense_of(got, [1, 2]) == oracles.mat_mul(
            oracles.mat_mul(oracles.dense_of(one() - A1, [1, 2]), oracles.dense_of(E(1, 1, 2), [1, 2]), QQ),
            oracles.dense_of(one() + A1, [1, 2]), QQ)
        # the opposite order gives the closed-form iterate
        assert (one() + A1) * E(1, 1, 2) * (one() - A1) == E(1, 1, 2) + E(1, 1, 2) * E(2, 1, 2)

    def test_self(self):
        u = one() + E(1, 1, 2) + E(2, 2, 2)
        assert conjugate(u, u) == u


class TestCentralizer:
    def test_examples(self):
        assert centralizer_check(E(2, 1, 2), 1)
        assert not centralizer_check(E(1, 1, 2), 1)
        assert not centralizer_check(one() + E(1, 2, 2) * E(2, 1, 2), 2)

    def test_factor_site(self):
        assert factor_site(E(2, 1, 2), 1) == E(2, 1, 2)
        assert factor_site(one(), 1) == one()
        x = E(2, 1, 2) + E(3, 2, 2).scale(3)
        assert factor_site(x, 1) == x
        with pytest.raises(NotInCentralizer):
            factor_site(E(1, 1, 2), 1)

    @settings(max_examples=200)
    @given(st.sampled_from(FIELDS).flatmap(
        lambda F: st.tuples(elements(F, SH, (2, 3), 3), elements(F, SH, (1, 2), 2), st.booleans())))
    def test_centralizer_three_ways(self, data):
        base, noise, add_noise = data
        x = base + noise if add_noise else base
        F = x.field
        sites = [1, 2, 3]
        dense_ok = all(
            oracles.is_zero(oracles.mat_sub(
                oracles.mat_mul(oracles.dense_of(E(1, p, q, F), sites), oracles.dense_of(x, sites), F),
                oracles.mat_mul(oracles.dense_of(x, sites), oracles.dense_of(E(1, p, q, F), sites), F), F))
            for p in (1, 2) for q in (1, 2))
        try:
            factor_site(x, 1)
            factored = True
        except NotInCentralizer:
            factored = False
        assert centralizer_check(x, 1) == dense_ok == factored
        assert dense_ok == (1 not in x.support)


class TestPeirce:
    def test_examples(self):
        u = E(1, 1, 2) + E(2, 2, 1)
        assert peirce_project(u, one()) == u
        assert peirce_project(E(1, 1, 2), E(1, 1, 1)).is_zero()
        with pytest.raises(NotIdempotent):
            peirce_project(u, E(1, 1, 2))

    @settings(max_examples=200)
    @given(st.sampled_from(FIELDS).flatmap(
        lambda F: st.tuples(elements(F, SH, (1, 2), 3), elements(F, SH, (1, 2), 3),
                            elements(F, SH, (1, 2), 3), st.booleans())))
    def test_peirce_identity(self, data):
        a, b, r, block = data
        F = a.field
        e = E(1, 1, 1, F)
        f = Element.one(F, SH) - e
        u = e * a * e + f * b * f if block else a + b
        x = e * r * e
        c = commutator(u, x)
        if e * c * e == c:
            assert c == commutator(peirce_project(u, e), x)


class TestTrace:
    def test_examples(self):
        assert normalized_trace(one()) == 1
        assert normalized_trace(E(1, 1, 2)) == 0
        assert normalized_trace(E(1, 2, 2)) == Fraction(1, 2)
        with pytest.raises(CharacteristicDividesSize):
            normalized_trace(E(1, 2, 2, F=GF(2)))

    @settings(max_examples=200)
    @given(st.sampled_from([QQ, GF(5), GF(7)]).flatmap(
        lambda F: st.tuples(elements(F, SHAPE_MIXED, (1, 2)), elements(F, SHAPE_MIXED, (1, 2)))))
    def test_trace_of_commutator_and_dense(self, data):
        x, y = data
        F = x.field
        assert normalized_trace(commutator(x, y)) == 0
        d = oracles.dense_of(x, [1, 2, 3])
        tr = sum(d[i][i] for i in range(len(d)))
        want = F.normalize(F(tr) * F.inv(F(len(d)))) if F.characteristic else Fraction(tr) / len(d)
        assert normalized_trace(x) == want


class TestShift:
    def test_examples(self):
        x = E(1, 1, 2) * E(2, 1, 1)
        assert shift(x, 3) == E(4, 1, 2) * E(5, 1, 1)
        assert shift(x, 0) == x
        y = E(3, 1, 2) + E(4, 2, 1)
        assert shift(shift(y, 2), -2) == y

    def test_errors(self):
        with pytest.raises(ShiftOutOfRange):
            shift(E(1, 1, 2), -1)
        sh = SiteShape(2, {3: 3})
        with pytest.raises(ShapeMismatchAtShiftedSite):
            shift(Element.unit(QQ, sh, 1, 1, 2), 2)


class TestSolveKernel:
    def test_identity(self):
        assert solve_kernel([[1, 0], [0, 1]], QQ) == []

    def test_zero(self):
        assert len(solve_kernel([[0, 0], [0, 0]], QQ)) == 2

    def test_rank_one(self):
        (v,) = solve_kernel([[1, 1], [2, 2]], QQ)
        assert v == [-1, 1]

    @settings(max_examples=200)
    @given(st.sampled_from([QQ, GF(5)]).flatmap(lambda F: st.tuples(
        st.just(F), st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=4))))
    def test_kernel_vectors_and_rank(self, data):
        F, rows = data
        rows = [[F(v) for v in r] for r in rows]
        ker = solve_kernel(rows, F)
        for v in ker:
            assert all(F.normalize(sum(a * b for a, b in zip(r, v))) == 0 for r in rows)
        assert len(ker) + linalg.rank(rows, F) == 4
