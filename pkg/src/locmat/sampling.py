"""Seeded random inputs for property tests, verification suites and demos.

Every function takes an explicit ``random.Random`` so results depend only on
the seed.
"""

from __future__ import annotations

import random

from .derivations import ShiftFamily, SparseSum
from .endomorphisms import UnitalEndo
from .errors import NotInvertible
from .field import FieldSpec
from .minf import AffineFamily, FinitaryMatrix, PatternMatrix
from .tensor import Element, SiteShape, canonicalize, invert


def random_scalar(rng: random.Random, field: FieldSpec, bound: int = 3, nonzero: bool = False):
    while True:
        num = rng.randint(-bound, bound)
        den = rng.choice((1, 1, 1, 2, 3)) if field.characteristic == 0 else 1
        if field.characteristic and den % field.characteristic == 0:
            den = 1
        c = field(num) if den == 1 else field.div(num, den)
        if c or not nonzero:
            return c


def random_monomial(rng: random.Random, shape: SiteShape, sites, max_sites: int | None = None):
    sites = sorted(sites)
    k = rng.randint(0, len(sites) if max_sites is None else min(max_sites, len(sites)))
    chosen = sorted(rng.sample(sites, k))
    return tuple((s, rng.randint(1, shape.size(s)), rng.randint(1, shape.size(s))) for s in chosen)


def random_element(rng: random.Random, field: FieldSpec, shape: SiteShape, sites,
                   n_terms: int = 4, bound: int = 3) -> Element:
    """Sum of up to ``n_terms`` random matrix-unit monomials on ``sites``.

    Monomials may contain ``e_11`` labels, so canonicalization is exercised.
    """
    raw = []
    for _ in range(rng.randint(1, n_terms)):
        c = random_scalar(rng, field, bound, nonzero=True)
        raw.append((random_monomial(rng, shape, sites), c))
    return canonicalize(field, shape, raw)


def random_invertible(rng: random.Random, field: FieldSpec, shape: SiteShape, sites,
                      n_terms: int = 3, attempts: int = 200) -> Element:
    """A random invertible element ``1 + x`` (retried until invertible)."""
    one = Element.one(field, shape)
    for _ in range(attempts):
        u = one + random_element(rng, field, shape, sites, n_terms)
        try:
            invert(u)
        except NotInvertible:
            continue
        return u
    raise NotInvertible(f"no invertible sample found in {attempts} attempts")


def random_site_unit(rng: random.Random, field: FieldSpec, shape: SiteShape, site: int,
                     attempts: int = 200) -> Element:
    """A random invertible element of ``A_site`` with every matrix unit drawn."""
    n = shape.size(site)
    for _ in range(attempts):
        u = Element.zero(field, shape)
        for p in range(1, n + 1):
            for q in range(1, n + 1):
                u = u + Element.unit(field, shape, site, p, q).scale(random_scalar(rng, field))
        try:
            invert(u)
        except NotInvertible:
            continue
        return u
    raise NotInvertible(f"no invertible sample found in {attempts} attempts")


def random_sparse_sum(rng: random.Random, field: FieldSpec, shape: SiteShape,
                      max_site: int = 4, max_members: int = 3, with_family: bool | None = None) -> SparseSum:
    """Random finite members on ``[1, max_site]`` plus an optional shift family."""
    finite = []
    for _ in range(rng.randint(0, max_members)):
        lo = rng.randint(1, max_site)
        hi = min(max_site, lo + rng.randint(0, 2))
        sites = list(range(lo, hi + 1))
        a = random_element(rng, field, shape, sites, n_terms=3)
        finite.append((frozenset(sites), a))
    families = []
    if with_family is None:
        with_family = rng.random() < 0.6
    if with_family:
        w = rng.randint(1, 2)
        while True:
            t = random_element(rng, field, shape, range(1, w + 1), n_terms=2)
            if any(m for m in t.terms):
                break
        families.append(ShiftFamily(t, rng.randint(1, 3)))
    return SparseSum.from_parts(field, shape, finite, families)


def random_conjugation_endo(rng: random.Random, field: FieldSpec, shape: SiteShape, N: int,
                            max_factors: int = 5, spread: int = 1) -> tuple[UnitalEndo, list]:
    """``conj(u_1) ∘ ... ∘ conj(u_r)`` on ``A_{1..N}`` with ``r <= max_factors``.

    Each ``u_j`` is supported on at most three consecutive sites of ``[1, N + spread]``.
    """
    us = []
    for _ in range(rng.randint(1, max_factors)):
        lo = rng.randint(1, N + spread - 1)
        sites = list(range(lo, min(N + spread, lo + 2) + 1))
        us.append(random_invertible(rng, field, shape, sites, n_terms=2))
    u = Element.one(field, shape)
    for a in us:
        u = a * u
    return UnitalEndo.conjugation(u, N), us


def random_embedding_m2_m4(rng: random.Random, field: FieldSpec, shape: SiteShape) -> UnitalEndo:
    """A unital embedding ``A_1 -> A_{1,2}`` presented by explicit images.

    The images are ``g^{-1} ι(e_pq) g`` where ``ι`` places ``e_pq`` at site 1 or
    site 2 (the latter is not a conjugation of ``e_pq(1)`` by anything in ``A_1``)
    and ``g`` is a random invertible of ``A_{1,2}``.
    """
    g = random_invertible(rng, field, shape, [1, 2], n_terms=3)
    g_inv = invert(g)
    target = rng.choice((1, 2))
    n = shape.size(1)
    if shape.size(target) != n:
        target = 1
    images = {}
    for p in range(1, n + 1):
        for q in range(1, n + 1):
            images[(1, p, q)] = g_inv * Element.unit(field, shape, target, p, q) * g
    return UnitalEndo(images, 1, field, shape, M=2)


def random_finitary(rng: random.Random, field: FieldSpec, size: int = 8, n_entries: int = 4) -> FinitaryMatrix:
    return FinitaryMatrix(field, {(rng.randint(1, size), rng.randint(1, size)): random_scalar(rng, field)
                                  for _ in range(n_entries)})


def random_pattern(rng: random.Random, field: FieldSpec, max_families: int = 2) -> PatternMatrix:
    fin = random_finitary(rng, field).entries
    fams = []
    for _ in range(rng.randint(0, max_families)):
        a, g, s = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3)
        b, d = rng.randint(1 - a * s, 3), rng.randint(1 - g * s, 3)
        prefix = tuple(random_scalar(rng, field) for _ in range(rng.randint(0, 2)))
        fams.append(AffineFamily(a, b, g, d, s, random_scalar(rng, field), prefix))
    return PatternMatrix(field, fin, fams)
