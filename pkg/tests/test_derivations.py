import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from locmat.derivations import (
    GeneratorDerivation,
    Inner,
    ShiftFamily,
    SparseSum,
    apply,
    build_yk,
    build_z,
    derivation_commutator,
    equal_on_truncation,
    expand_basis,
    generators,
    inner_solve_local,
    leibniz_check,
    members_intersecting,
    peel_derivation,
)
from locmat.errors import NotADerivation, SupportError
from locmat.field import GF, QQ
from locmat.sampling import random_element, random_sparse_sum
from locmat.tensor import Element, SiteShape, centralizer_check, commutator
from strategies import elements

SH = SiteShape(2)


def E(i, p, q, F=QQ):
    return Element.unit(F, SH, i, p, q)


def one(F=QQ):
    return Element.one(F, SH)


Z = build_z(QQ, SH)
Y = {k: build_yk(k, QQ, SH) for k in range(1, 8)}


class TestMembers:
    def test_y1_window_one(self):
        ms = members_intersecting(Y[1].system, {3})
        assert ms == [(frozenset({3}), E(3, 1, 2))]

    def test_z_meets_site_two_twice(self):
        ms = members_intersecting(Z.system, {2})
        assert [sorted(S) for S, _ in ms] == [[1, 2], [2, 3]]

    def test_z_meets_site_one_once(self):
        assert len(members_intersecting(Z.system, {1})) == 1

    def test_disjoint_finite(self):
        d = SparseSum.from_parts(QQ, SH, [({5}, E(5, 1, 2))])
        assert members_intersecting(d.system, {1}) == []

    def test_support_must_fit(self):
        with pytest.raises(SupportError):
            SparseSum.from_parts(QQ, SH, [({1}, E(2, 1, 2))])


class TestApply:
    def test_kills_unit(self):
        for d in (Z, Y[2], Inner(E(1, 1, 2))):
            assert apply(d, one()).is_zero()

    def test_z_on_e12_2(self):
        got = Z(E(2, 1, 2))
        assert got == E(1, 1, 2) * E(2, 1, 2)
        # dense check on sites 1..3 using the two meeting members explicitly
        members = [E(1, 1, 2) * E(2, 1, 1), E(2, 1, 2) * E(3, 1, 1)]
        want = sum((commutator(a, E(2, 1, 2)) for a in members), Element.zero(QQ, SH))
        assert oracles.dense_of(got, [1, 2, 3]) == oracles.dense_of(want, [1, 2, 3])

    def test_inner_example(self):
        assert Inner(E(1, 1, 2))(E(1, 2, 1)) == one() - E(1, 2, 2).scale(2)
        assert Inner(E(1, 1, 2, GF(2)))(E(1, 2, 1, GF(2))) == one(GF(2))

    def test_y1_on_e21_2(self):
        assert Y[1](E(2, 2, 1)) == one() - E(2, 2, 2).scale(2)


class TestLeibniz:
    def test_inner(self):
        assert leibniz_check(Inner(E(1, 1, 2) + E(2, 2, 1)), E(1, 2, 1), E(2, 1, 2))

    def test_z(self):
        assert leibniz_check(Z, E(2, 1, 2), E(2, 2, 1))

    def test_non_derivation_shim(self):
        left = lambda x: E(1, 1, 2) * x  # noqa: E731
        pairs = [(E(1, p, q), E(1, r, s)) for p, q, r, s in itertools.product((1, 2), repeat=4)]
        assert not all(leibniz_check(left, x, y) for x, y in pairs)

    @settings(max_examples=500)
    @given(st.integers(0, 10**6), st.sampled_from([QQ, GF(5), GF(2)]))
    def test_leibniz_fuzz(self, seed, F):
        rng = random.Random(seed)
        kind = rng.randrange(4)
        if kind == 0:
            d = Inner(random_element(rng, F, SH, [1, 2, 3]))
        elif kind == 1:
            d = build_z(F, SH)
        elif kind == 2:
            d = build_yk(rng.randint(1, 3), F, SH)
        else:
            d = random_sparse_sum(rng, F, SH)
        x = random_element(rng, F, SH, [1, 2, 3, 4])
        y = random_element(rng, F, SH, [1, 2, 3, 4])
        assert leibniz_check(d, x, y)


class TestInnerSolve:
    def test_inner_reproduced(self):
        assert inner_solve_local(Inner(E(1, 1, 2)), [1]) == E(1, 1, 2)

    def test_zero(self):
        assert inner_solve_local(SparseSum.from_parts(QQ, SH), [1, 2]).is_zero()

    def test_y1_on_two_sites(self):
        b = inner_solve_local(Y[1], [1, 2])
        for _, g in generators(QQ, SH, [1, 2]):
            assert commutator(b, g) == commutator(E(1, 1, 2) + E(2, 1, 2), g)

    def test_rejects_non_derivation(self):
        bad = GeneratorDerivation({(1, 1, 2): E(1, 1, 2), (1, 2, 1): E(1, 2, 1)}, 1, QQ, SH)
        with pytest.raises(NotADerivation):
            inner_solve_local(bad, [1])

    @settings(max_examples=60)
    @given(st.integers(0, 10**6), st.sampled_from([QQ, GF(5)]))
    def test_solver_on_random_elements(self, seed, F):
        rng = random.Random(seed)
        d = random_sparse_sum(rng, F, SH)
        for r in range(1, 4):
            for S in itertools.combinations([1, 2, 3], r):
                b = inner_solve_local(d, S)
                for _ in range(5):
                    x = random_element(rng, F, SH, S)
                    assert d(x) == commutator(b, x)


class TestExpandBasis:
    def test_unit_member(self):
        assert expand_basis(SparseSum.from_parts(QQ, SH, [({1}, one())])).is_empty()

    def test_single_unit(self):
        assert expand_basis(Inner(E(1, 1, 2))).finite == {((1, 1, 2),): 1}

    def test_rewrite_example(self):
        got = expand_basis(Inner(E(1, 1, 1) * E(2, 1, 2))).finite
        assert got == {((2, 1, 2),): 1, ((1, 2, 2), (2, 1, 2)): -1}

    @settings(max_examples=200)
    @given(st.sampled_from([QQ, GF(5)]).flatmap(lambda F: elements(F, SH, (1, 2, 3))), st.integers(-3, 3))
    def test_reconstruction_and_scalar_invariance(self, a, c):
        F = a.field
        exp = expand_basis(SparseSum.from_parts(F, SH, [({1, 2, 3}, a)]))
        rebuilt = Element.scalar(F, SH, sum(exp.unit_components))
        for m, coef in exp.finite.items():
            term = Element.scalar(F, SH, coef)
            for s, p, q in m:
                term = term * Element.unit(F, SH, s, p, q)
            rebuilt = rebuilt + term
        assert rebuilt == a
        shifted = a + Element.scalar(F, SH, c)
        assert expand_basis(SparseSum.from_parts(F, SH, [({1, 2, 3}, shifted)])).finite == exp.finite

    def test_family_truncation(self):
        exp = expand_basis(Y[2])
        assert exp.truncated(4) == {((i, 1, 2), (i + 1, 1, 2)): 1 for i in (1, 2, 3)}

    def test_truncation_of_mixed_width_families(self):
        combo = SparseSum.from_parts(QQ, SH) + Y[1] + Y[3].scale(-2)
        for N in (1, 3, 4, 9):
            want = dict(expand_basis(Y[1]).truncated(N))
            for m, c in expand_basis(Y[3]).truncated(N).items():
                want[m] = want.get(m, 0) - 2 * c
            assert expand_basis(combo).truncated(N) == want
            assert len(want) == N + max(0, N - 2)

    def test_truncation_reduces_mod_p(self):
        F = GF(5)
        d = SparseSum.from_parts(F, SH, [({1}, E(1, 1, 2, F).scale(2)), ({1}, E(1, 1, 2, F).scale(3))])
        assert d.normalized().is_zero()
        assert expand_basis(d).truncated(3) == {}


class TestCommutator:
    def test_z_y1_is_y2(self):
        c = derivation_commutator(Z, Y[1])
        assert c == Y[2]
        assert c.families[0].template == E(1, 1, 2) * E(2, 1, 2)

    def test_inner_pair(self):
        a, b = E(1, 1, 2) + E(2, 2, 2), E(1, 2, 1) * E(2, 1, 2)
        assert derivation_commutator(Inner(a), Inner(b)) == Inner(commutator(a, b))

    def test_antisymmetry_y1(self):
        assert derivation_commutator(Y[1], Y[1]).is_zero()

    def test_ladder(self):
        d = Y[1]
        for k in range(1, 6):
            d = derivation_commutator(Z, d)
            assert d == Y[k + 1]
            assert equal_on_truncation(d, Y[k + 1], 8)

    @pytest.mark.parametrize("k", range(1, 6))
    def test_coherence_zyk(self, k):
        c = derivation_commutator(Z, Y[k])
        for _, g in generators(QQ, SH, range(1, 9)):
            assert c(g) == Z(Y[k](g)) - Y[k](Z(g))

    @settings(max_examples=40)
    @given(st.integers(0, 10**6), st.sampled_from([QQ, GF(3)]))
    def test_coherence_random(self, seed, F):
        rng = random.Random(seed)
        d1, d2 = random_sparse_sum(rng, F, SH), random_sparse_sum(rng, F, SH)
        c = derivation_commutator(d1, d2)
        for _, g in generators(F, SH, range(1, 9)):
            assert c(g) == d1(d2(g)) - d2(d1(g))


class TestTruncationEquality:
    def test_reflexive(self):
        assert equal_on_truncation(Z, Z, 5)

    def test_y1_vs_y2(self):
        assert not equal_on_truncation(Y[1], Y[2], 2)
        assert Y[1](E(1, 2, 1)) != Y[2](E(1, 2, 1))


class TestBuilders:
    def test_y1_value(self):
        assert Y[1](E(2, 2, 1)) == commutator(E(2, 1, 2), E(2, 2, 1))

    def test_z_first_site(self):
        assert len(members_intersecting(Z.system, {1})) == 1

    def test_y3_support(self):
        assert Y[3].families[0].template.support == {1, 2, 3}

    def test_family_validation(self):
        with pytest.raises(ValueError):
            ShiftFamily(E(1, 1, 2), 0)


class TestPeel:
    def _images(self, d, N, F=QQ):
        return {key: d(g) for key, g in generators(F, SH, range(1, N + 1))}

    def test_inner_single_site(self):
        (S, a), = peel_derivation(self._images(Inner(E(1, 1, 2)), 1), 1)
        for _, g in generators(QQ, SH, [1]):
            assert commutator(a, g) == commutator(E(1, 1, 2), g)

    def test_zero(self):
        assert peel_derivation(self._images(SparseSum.from_parts(QQ, SH), 2), 2) == []

    def test_y1_three_sites(self):
        pieces = peel_derivation(self._images(Y[1], 3), 3)
        assert [a for _, a in pieces] == [E(1, 1, 2), E(2, 1, 2), E(3, 1, 2)]

    def test_rejects_non_derivation(self):
        with pytest.raises(NotADerivation):
            peel_derivation({(1, 1, 2): E(1, 1, 2), (1, 2, 1): E(1, 2, 1)}, 1, QQ, SH)

    @settings(max_examples=40)
    @given(st.integers(0, 10**6), st.sampled_from([QQ, GF(5)]))
    def test_postcondition(self, seed, F):
        rng = random.Random(seed)
        d = random_sparse_sum(rng, F, SH)
        N = 3
        pieces = peel_derivation(self._images(d, N, F), N, F, SH)
        for k, (S, a) in enumerate(pieces):
            lo = min(S)
            for j in range(1, lo):
                assert centralizer_check(a, j)
        for _, g in generators(F, SH, range(1, N + 1)):
            total = d(g)
            for _, a in pieces:
                total = total - commutator(a, g)
            assert total.is_zero()
