"""Unital endomorphisms of truncations, Skolem-Noether conjugators and factorization.

Conventions: ``conj(a)`` is the map ``x -> a^{-1} x a``, and composition of
conjugations reads ``conj(a_1) ∘ conj(a_2) = conj(a_2 a_1)``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import linalg
from .errors import (
    InvalidEndomorphism,
    InvalidRestriction,
    NoConjugatorFound,
    NotInCentralizer,
    NotInvertible,
    SupportError,
    SupportExceedsSource,
    WrongSupport,
)
from .field import FieldSpec
from .tensor import (
    Element,
    SiteShape,
    centralizer_check,
    commutator,
    conjugate,
    dense_expand,
    from_dense,
    invert,
    matrix_unit_flat,
)

SEARCH_BUDGET = 10_000


class UnitalEndo:
    """A unital homomorphism ``A_{1..N} -> A_{1..M}`` given by generator images.

    ``images`` maps ``(site, p, q)`` to the image of ``e_pq(site)``. Images of
    ``e_11(i)`` may be omitted; they are derived as ``1 - sum_{p>=2} φ(e_pp(i))``.
    """

    def __init__(self, images: Mapping, N: int, field: FieldSpec, shape: SiteShape, M: int | None = None):
        self.field = field
        self.shape = shape
        self.N = N
        imgs = {}
        for (i, p, q), v in dict(images).items():
            if not 1 <= i <= N:
                raise SupportExceedsSource(f"generator site {i} outside source 1..{N}")
            imgs[(i, p, q)] = v
        one = Element.one(field, shape)
        for i in range(1, N + 1):
            n = shape.size(i)
            for p in range(1, n + 1):
                for q in range(1, n + 1):
                    if (p, q) != (1, 1) and (i, p, q) not in imgs:
                        raise InvalidEndomorphism(f"missing image of e{p}{q}({i})")
            if (i, 1, 1) not in imgs:
                acc = one
                for p in range(2, n + 1):
                    acc = acc - imgs[(i, p, p)]
                imgs[(i, 1, 1)] = acc
        self.images = imgs
        top = max((max(v.support) for v in imgs.values() if v.support), default=0)
        self.M = max(N, top) if M is None else M
        if self.M < max(N, top):
            raise SupportError(f"images reach site {top} beyond target level {self.M}")

    @classmethod
    def identity(cls, N: int, field: FieldSpec, shape: SiteShape) -> UnitalEndo:
        imgs = {}
        for i in range(1, N + 1):
            n = shape.size(i)
            for p in range(1, n + 1):
                for q in range(1, n + 1):
                    imgs[(i, p, q)] = Element.unit(field, shape, i, p, q)
        return cls(imgs, N, field, shape)

    @classmethod
    def conjugation(cls, u: Element, N: int) -> UnitalEndo:
        """``x -> u^{-1} x u`` on ``A_{1..N}``."""
        field, shape = u.field, u.shape
        u_inv = invert(u)
        imgs = {}
        for i in range(1, N + 1):
            n = shape.size(i)
            for p in range(1, n + 1):
                for q in range(1, n + 1):
                    imgs[(i, p, q)] = u_inv * Element.unit(field, shape, i, p, q) * u
        return cls(imgs, N, field, shape)

    def image(self, site: int, p: int, q: int) -> Element:
        return self.images[(site, p, q)]

    def __call__(self, x: Element) -> Element:
        return apply_endo(self, x)

    def restricted(self, sites: Iterable[int]) -> dict:
        sites = set(sites)
        return {k: v for k, v in self.images.items() if k[0] in sites}

    def __eq__(self, other):
        if not isinstance(other, UnitalEndo):
            return NotImplemented
        return self.N == other.N and self.images == other.images

    def __repr__(self):
        return f"UnitalEndo(N={self.N}, M={self.M})"


def _relation_violations(images: Mapping, sites, field: FieldSpec, shape: SiteShape):
    zero = Element.zero(field, shape)
    one = Element.one(field, shape)
    for i in sites:
        n = shape.size(i)
        total = zero
        for p in range(1, n + 1):
            total = total + images[(i, p, p)]
        if total != one:
            yield f"sum of images of e_pp({i}) is {total}, expected 1"
        for p, q, r, s in itertools.product(range(1, n + 1), repeat=4):
            lhs = images[(i, p, q)] * images[(i, r, s)]
            rhs = images[(i, p, s)] if q == r else zero
            if lhs != rhs:
                yield f"φ(e{p}{q}({i})) φ(e{r}{s}({i})) != {'φ(e%d%d(%d))' % (p, s, i) if q == r else '0'}"
    # e_1q and e_q1 generate each site algebra, so commuting them suffices
    def gens(i):
        n = shape.size(i)
        return [(1, q) for q in range(2, n + 1)] + [(q, 1) for q in range(2, n + 1)]

    for i, j in itertools.combinations(sorted(sites), 2):
        for pi, qi in gens(i):
            for pj, qj in gens(j):
                if not commutator(images[(i, pi, qi)], images[(j, pj, qj)]).is_zero():
                    yield f"images of e{pi}{qi}({i}) and e{pj}{qj}({j}) do not commute"


def endo_violations(phi: UnitalEndo):
    """Yield a description of every violated matrix-unit relation."""
    yield from _relation_violations(phi.images, range(1, phi.N + 1), phi.field, phi.shape)


def validate_endo(phi: UnitalEndo, raise_on_failure: bool = False) -> bool:
    """Check all matrix-unit relations exactly."""
    bad = next(endo_violations(phi), None)
    if bad is not None and raise_on_failure:
        raise InvalidEndomorphism(bad)
    return bad is None


def apply_endo(phi: UnitalEndo, x: Element) -> Element:
    """Multiplicative-linear extension of the generator images."""
    supp = x.support
    if supp and max(supp) > phi.N:
        raise SupportExceedsSource(f"element reaches site {max(supp)} beyond source level {phi.N}")
    out = Element.zero(phi.field, phi.shape)
    for mono, c in x.items():
        term = Element.scalar(phi.field, phi.shape, c)
        for s, p, q in mono:
            term = term * phi.images[(s, p, q)]
        out = out + term
    return out


def compose(phi: UnitalEndo, psi: UnitalEndo) -> UnitalEndo:
    """``phi ∘ psi``; requires ``psi``'s images to live in ``phi``'s source."""
    imgs = {k: apply_endo(phi, v) for k, v in psi.images.items()}
    return UnitalEndo(imgs, psi.N, psi.field, psi.shape)


# Skolem-Noether


@dataclass
class _Intertwiners:
    sites_T: list
    m: int
    r: int
    basis: list  # r*r dense matrices, index i*r + j


def _intertwiner_basis(images: Mapping, S, T, field: FieldSpec, shape: SiteShape) -> _Intertwiners:
    """Basis of ``{a in A_T : x a = a φ(x) for x in A_S}`` as dense matrices.

    Every solution satisfies ``a = sum_k E_k1 (E_11 a φ(E_11)) φ(E_1k)`` and the
    map ``c -> sum_k E_k1 c φ(E_1k)`` is injective on ``E_11 A_T φ(E_11)``,
    so rank-one ``c = e_{q_i} R_j`` (``q_i`` spanning the image of ``E_11``,
    ``R_j`` the nonzero rows of ``rref(φ(E_11))``) give a basis.
    """
    dims_S = shape.dims(S)
    n_S = 1
    for n in dims_S:
        n_S *= n
    digits = list(itertools.product(*(range(n) for n in dims_S)))
    first = digits[0]

    def image_of_flat(k, l):
        out = Element.one(field, shape)
        for s, a, b in zip(S, k, l):
            out = out * images[(s, a + 1, b + 1)]
        return out

    Q = dense_expand(matrix_unit_flat(field, shape, S, first, first), T)
    P = dense_expand(image_of_flat(first, first), T)
    m = len(P)
    R, pivots = linalg.rref(P, field)
    r = len(pivots)
    if r * n_S != m:
        raise InvalidRestriction(f"image of E_11 has rank {r}, expected {m // n_S}")
    R = R[:r]
    q_idx = [t for t in range(m) if Q[t][t]]
    # E_k1 e_{q_i} is a single standard basis vector: find its index
    col_targets = []
    for k in digits:
        Ek1 = dense_expand(matrix_unit_flat(field, shape, S, k, first), T)
        col_targets.append([next(t for t in range(m) if Ek1[t][qi]) for qi in q_idx])
    rows = []  # rows[k][j] = R_j · φ(E_1k)
    for k in digits:
        Phi = dense_expand(image_of_flat(first, k), T)
        rows.append(linalg.matmul(R, Phi, field))
    basis = []
    for i in range(r):
        for j in range(r):
            a = linalg.zeros(m, m)
            for k in range(n_S):
                a[col_targets[k][i]] = [x + y for x, y in zip(a[col_targets[k][i]], rows[k][j])]
            basis.append([[field.normalize(v) for v in row] for row in a])
    return _Intertwiners(list(T), m, r, basis)


def intertwiner_basis(phi: UnitalEndo, S: Iterable[int], T: Iterable[int]) -> list[Element]:
    """The solution space of ``x a = a φ(x)`` (``x`` in ``A_S``, ``a`` in ``A_T``) as elements."""
    S, T = sorted(set(S)), sorted(set(T))
    tw = _intertwiner_basis(phi.images, S, T, phi.field, phi.shape)
    return [from_dense(b, T, phi.field, phi.shape) for b in tw.basis]


def _combine(tw: _Intertwiners, coeffs, field: FieldSpec):
    m = tw.m
    out = linalg.zeros(m, m)
    for c, b in zip(coeffs, tw.basis):
        if not c:
            continue
        for row_o, row_b in zip(out, b):
            for t, v in enumerate(row_b):
                if v:
                    row_o[t] += c * v
    return [[field.normalize(v) for v in row] for row in out]


def _candidates(tw: _Intertwiners, rng: random.Random, method: str):
    """Deterministic candidate stream for an invertible intertwiner."""
    rr = tw.r * tw.r
    if method == "sweep":
        # each basis vector has rank <= n_S, hence is singular unless r == 1
        if tw.r == 1:
            yield [1]
        yield [1 if idx // tw.r == idx % tw.r else 0 for idx in range(rr)]
    while True:
        yield [rng.randint(-2, 2) for _ in range(rr)]


def normalize_conjugator(a: Element) -> Element:
    """Scale ``a`` so that its first canonical coefficient is 1."""
    items = a.items()
    if not items:
        return a
    return a.scale(a.field.inv(items[0][1]))


def skolem_noether(phi: UnitalEndo, S: Iterable[int], T: Iterable[int], *, seed: int = 0,
                   method: str = "sweep", budget: int = SEARCH_BUDGET) -> Element:
    """Invertible ``a`` in ``A_T`` with ``φ(x) = a^{-1} x a`` for all ``x`` in ``A_S``.

    ``method="sweep"`` tries the lone basis vector of a one-dimensional
    solution space, then the diagonal combination (always invertible), then
    seeded random combinations with
    coefficients in ``{-2, ..., 2}``. ``method="random"`` skips straight to the
    random draws, which yields a different valid conjugator.
    """
    field, shape = phi.field, phi.shape
    S, T = sorted(set(S)), sorted(set(T))
    if not set(S) <= set(T):
        raise InvalidRestriction(f"sites {S} not contained in ambient {T}")
    images = phi.images
    for (i, p, q), v in images.items():
        if i in S and not v.support <= set(T):
            raise InvalidRestriction(f"image of e{p}{q}({i}) not supported in {T}")
    bad = next(_relation_violations(images, S, field, shape), None)
    if bad is not None:
        raise InvalidRestriction(bad)
    tw = _intertwiner_basis(images, S, T, field, shape)
    rng = random.Random(seed)
    for n_tried, coeffs in enumerate(_candidates(tw, rng, method)):
        if n_tried >= budget:
            break
        dense = _combine(tw, coeffs, field)
        if not linalg.is_invertible(dense, field):
            continue
        a = normalize_conjugator(from_dense(dense, T, field, shape))
        _verify_conjugator(a, images, S, field, shape)
        return a
    raise NoConjugatorFound(
        f"no invertible conjugator among {budget} candidates over {field}; try a larger field"
    )


def _verify_conjugator(a: Element, images: Mapping, S, field, shape):
    invert(a)
    for (i, p, q), v in images.items():
        if i in S:
            g = Element.unit(field, shape, i, p, q)
            if a * v != g * a:
                raise InvalidRestriction(f"conjugator check failed at e{p}{q}({i})")


# factorization into conjugations


@dataclass(frozen=True)
class ConjugatorSeq:
    """Conjugators ``a_1, ..., a_N``.

    ``direction="forward"`` means the factors of ``φ = conj(a_1) conj(a_2) ...``;
    ``"inverse"`` marks the sequence of inverses used by the integrability test.
    """

    elements: tuple
    direction: str = "forward"

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if self.direction not in ("forward", "inverse"):
            raise ValueError("direction must be 'forward' or 'inverse'")

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, k):
        return self.elements[k]

    def __iter__(self):
        return iter(self.elements)

    def inverse(self) -> ConjugatorSeq:
        flipped = "inverse" if self.direction == "forward" else "forward"
        return ConjugatorSeq(tuple(invert(a) for a in self.elements), flipped)

    def check(self):
        """Each ``a_k`` invertible and centralizing ``A_1 .. A_{k-1}``."""
        for k, a in enumerate(self.elements, start=1):
            invert(a)
            for j in range(1, k):
                if not centralizer_check(a, j):
                    raise NotInCentralizer(f"a_{k} does not centralize site {j}")
        return True


def recompose(seq: ConjugatorSeq, N: int) -> UnitalEndo:
    """``conj(a_1) ∘ ... ∘ conj(a_K)`` restricted to ``A_{1..N}``."""
    a0 = seq.elements[0]
    u = Element.one(a0.field, a0.shape)
    for a in seq.elements:
        u = a * u
    return UnitalEndo.conjugation(u, N)


def factorize_steps(phi: UnitalEndo, *, method: str = "sweep", seed: int = 0):
    """Yield ``(k, a_k, residual)`` where ``residual = conj(a_k)^{-1} ∘ ... ∘ φ``.

    The residual after step ``k`` fixes ``A_1 .. A_k`` pointwise and maps the
    remaining sites into the centralizer of ``A_{1..k}``.
    """
    validate_endo(phi, raise_on_failure=True)
    field, shape = phi.field, phi.shape
    residual = dict(phi.images)
    for k in range(1, phi.N + 1):
        T = {k}
        for (i, _, _), v in residual.items():
            if i == k:
                T |= v.support
        psi = UnitalEndo(residual, phi.N, field, shape)
        a = skolem_noether(psi, [k], sorted(T), method=method, seed=seed + k)
        a_inv = invert(a)
        residual = {key: a * v * a_inv for key, v in residual.items()}
        yield k, a, UnitalEndo(residual, phi.N, field, shape)


def factorize(phi: UnitalEndo, *, method: str = "sweep", seed: int = 0) -> ConjugatorSeq:
    """Conjugators ``a_1 .. a_N`` with ``φ = conj(a_1) ∘ ... ∘ conj(a_N)`` on ``A_{1..N}``."""
    return ConjugatorSeq(tuple(a for _, a, _ in factorize_steps(phi, method=method, seed=seed)))


# integrability


def integrability_profile(seq: ConjugatorSeq, a: Element, n_max: int) -> list[int]:
    """``dim span{a, ψ_1(a), ψ_2ψ_1(a), ..., ψ_n...ψ_1(a)}`` for ``n = 1..n_max``.

    ``ψ_k = conj(seq[k])``. Ranks are exact over canonical monomial coordinates.
    """
    if len(seq) < n_max:
        raise ValueError(f"sequence has {len(seq)} members, need {n_max}")
    field = a.field
    basis: dict = {}

    def absorb(vec: dict) -> None:
        v = {k: c for k, c in vec.items() if c}
        while v:
            lead = min(v)
            b = basis.get(lead)
            if b is None:
                inv = field.inv(v[lead])
                basis[lead] = {k: field.normalize(c * inv) for k, c in v.items()}
                return
            f = v[lead]
            for k, c in b.items():
                nv = field.normalize(v.get(k, 0) - f * c)
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)

    x = a
    absorb(dict(x.terms))
    profile = []
    for k in range(n_max):
        x = conjugate(seq.elements[k], x)
        absorb(dict(x.terms))
        profile.append(len(basis))
    return profile


def example1_sequence(units) -> ConjugatorSeq:
    """Conjugators by site-local invertible elements ``a_k`` in ``A_k``."""
    units = list(units)
    for k, u in enumerate(units, start=1):
        if not u.support <= {k}:
            raise WrongSupport(f"unit #{k} must be supported on site {k}, got {sorted(u.support)}")
        try:
            invert(u)
        except NotInvertible:
            raise NotInvertible(f"unit #{k} is not invertible: {u}") from None
    return ConjugatorSeq(tuple(units))


def example2_element(k: int, field: FieldSpec, shape: SiteShape) -> Element:
    """``a_k = e_11(k) e_12(k+1)``."""
    return Element.unit(field, shape, k, 1, 1) * Element.unit(field, shape, k + 1, 1, 2)


def example2_sequence(n_max: int, field: FieldSpec, shape: SiteShape) -> ConjugatorSeq:
    """Forward conjugators ``(1 + a_k)^{-1} = 1 - a_k``, ``k = 1..n_max``."""
    one = Element.one(field, shape)
    return ConjugatorSeq(tuple(one - example2_element(k, field, shape) for k in range(1, n_max + 1)))


def example2_closed_form(i: int, field: FieldSpec, shape: SiteShape) -> Element:
    """``sum_{k=1}^{i+1} e_12(1) ... e_12(k)``."""
    out = Element.zero(field, shape)
    prod = Element.one(field, shape)
    for k in range(1, i + 2):
        prod = prod * Element.unit(field, shape, k, 1, 2)
        out = out + prod
    return out
