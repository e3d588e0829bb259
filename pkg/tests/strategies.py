"""Hypothesis strategies producing kernel values."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from locmat.field import FieldSpec
from locmat.tensor import Element, SiteShape, canonicalize

FIELDS = [FieldSpec(0), FieldSpec(5), FieldSpec(2), FieldSpec(3)]
SHAPE2 = SiteShape(2)
SHAPE_MIXED = SiteShape(2, {2: 3})


def scalars(field: FieldSpec):
    if field.characteristic:
        return st.integers(0, field.characteristic - 1)
    return st.builds(Fraction, st.integers(-4, 4), st.sampled_from([1, 1, 2, 3]))


@st.composite
def raw_terms(draw, field, shape, sites, max_terms=4):
    """Raw ``(monomial-map, coeff)`` pairs, one label per site, ``e11`` allowed."""
    out = []
    for _ in range(draw(st.integers(0, max_terms))):
        chosen = draw(st.lists(st.sampled_from(sorted(sites)), unique=True, max_size=len(sites)))
        mono = {}
        for s in chosen:
            n = shape.size(s)
            mono[s] = (draw(st.integers(1, n)), draw(st.integers(1, n)))
        out.append((mono, draw(scalars(field))))
    return out


@st.composite
def elements(draw, field, shape=SHAPE2, sites=(1, 2), max_terms=4):
    return canonicalize(field, shape, draw(raw_terms(field, shape, sites, max_terms)))


def field_and(strategy_factory, fields=FIELDS, **kw):
    return st.sampled_from(fields).flatmap(lambda F: strategy_factory(F, **kw).map(lambda x: (F, x)))


def unit(field, shape, s, p, q):
    return Element.unit(field, shape, s, p, q)
