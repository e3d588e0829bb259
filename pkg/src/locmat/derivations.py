"""Derivations of the tensor product presented by sparse systems.

A :class:`SparseSystem` is a finite list of members ``(S, a_S)`` together
with finitely many shift families. A family with template ``t`` (supported in
``[1, w]``) and start ``s`` stands for the members ``shift(t, i - 1)``,
``i >= s``; every site meets at most ``w`` of them, so the system is sparse
and ``sum ad(a_S)`` converges pointwise.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterable, Mapping

from .errors import NotADerivation, ShapeMismatchAtShiftedSite, SupportError
from .field import FieldSpec
from .tensor import (
    UNIT_MONOMIAL,
    Element,
    SiteShape,
    commutator,
    matrix_unit_flat,
    shift,
    site_generators,
)


def _drop_unit(a: Element) -> Element:
    c = a.unit_component()
    return a - c if c else a


@dataclass(frozen=True)
class ShiftFamily:
    """Members ``shift(template, i - 1)`` for every ``i >= start``."""

    template: Element
    start: int = 1

    def __post_init__(self):
        if self.start < 1:
            raise ValueError("family start must be >= 1")
        supp = self.template.support
        if not supp:
            raise ValueError("family template must have nonempty support")
        if min(supp) < 1:
            raise ValueError("family template must be supported in sites >= 1")
        shape = self.template.shape
        for site in range(1, self.window + 1):
            if shape.size(site) != shape.default:
                raise ShapeMismatchAtShiftedSite(f"template window meets non-default site {site}")
        for site, n in shape.exceptions:
            if site >= self.start:
                raise ShapeMismatchAtShiftedSite(
                    f"site {site} has size {n}; shift families need uniform sizes from site {self.start} on"
                )

    @property
    def window(self) -> int:
        return max(self.template.support)

    def member(self, i: int) -> Element:
        return shift(self.template, i - 1)

    def shifts_meeting(self, sites: Iterable[int]) -> list[int]:
        """Shifts ``i >= start`` whose window ``[i, i + w - 1]`` meets ``sites``."""
        w = self.window
        out = set()
        for t in sites:
            for i in range(max(self.start, t - w + 1), t + 1):
                out.add(i)
        return sorted(out)

    def normalized(self) -> ShiftFamily | None:
        """Drop the unit component and move the template's lowest site to 1."""
        t = _drop_unit(self.template)
        if t.is_zero():
            return None
        lo = min(t.support)
        if lo == 1:
            return ShiftFamily(t, self.start)
        return ShiftFamily(shift(t, -(lo - 1)), self.start + lo - 1)


@dataclass(frozen=True)
class SparseSystem:
    """Finite members ``(S, a_S)`` plus shift families."""

    field: FieldSpec
    shape: SiteShape
    finite: tuple = ()
    families: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "finite", tuple((frozenset(S), a) for S, a in self.finite))
        object.__setattr__(self, "families", tuple(self.families))
        for S, a in self.finite:
            if not a.support <= S:
                raise SupportError(f"member {a} not supported in {sorted(S)}")
            self._check_element(a)
        for fam in self.families:
            self._check_element(fam.template)

    def _check_element(self, a: Element):
        a._check(Element.zero(self.field, self.shape))

    def members_intersecting(self, sites: Iterable[int]) -> list[tuple[frozenset, Element]]:
        """All members whose support meets ``sites``, finite members first."""
        sites = frozenset(sites)
        out = []
        for S, a in self.finite:
            if a.support & sites:
                out.append((S, a))
        for fam in self.families:
            for i in fam.shifts_meeting(sites):
                m = fam.member(i)
                supp = m.support
                if supp & sites:
                    out.append((frozenset(supp), m))
        return out

    def normalized(self) -> SparseSystem:
        """Canonical presentation used for syntactic comparison.

        Finite members are keyed by their actual support with unit components
        dropped; families are normalized and merged when their starts agree.
        """
        finite: dict = {}
        for _, a in self.finite:
            a = _drop_unit(a)
            if a.is_zero():
                continue
            key = frozenset(a.support)
            finite[key] = finite[key] + a if key in finite else a
        fams = sorted(filter(None, (f.normalized() for f in self.families)), key=_fam_key)
        while True:
            by_start: dict = {}
            for f in fams:
                by_start[f.start] = by_start[f.start] + f.template if f.start in by_start else f.template
            merged = sorted(filter(None, (_make_family(t, s) for s, t in by_start.items())), key=_fam_key)
            if merged == fams:
                break
            fams = merged
        fin = tuple(sorted(((S, a) for S, a in finite.items() if not a.is_zero()), key=lambda m: (sorted(m[0]), m[1].items())))
        return SparseSystem(self.field, self.shape, fin, tuple(fams))


def _make_family(template: Element, start: int) -> ShiftFamily | None:
    t = _drop_unit(template)
    if t.is_zero():
        return None
    return ShiftFamily(t, start).normalized()


def _fam_key(f: ShiftFamily):
    return (f.start, f.template.items())


class Derivation:
    """Base class; derivations are callable on elements."""

    field: FieldSpec
    shape: SiteShape

    def __call__(self, x: Element) -> Element:
        return apply(self, x)


@dataclass(frozen=True, eq=False)
class Inner(Derivation):
    """``ad(a): x -> [a, x]``."""

    a: Element

    @property
    def field(self):
        return self.a.field

    @property
    def shape(self):
        return self.a.shape

    def as_sparse(self) -> SparseSum:
        a = self.a
        finite = ((a.support, a),) if not a.is_zero() else ()
        return SparseSum(SparseSystem(self.field, self.shape, finite))

    def __eq__(self, other):
        if isinstance(other, Inner):
            return _drop_unit(self.a) == _drop_unit(other.a)
        if isinstance(other, SparseSum):
            return self.as_sparse() == other
        return NotImplemented

    def __hash__(self):
        return hash(_drop_unit(self.a))

    def __repr__(self):
        return f"Inner({self.a})"


@dataclass(frozen=True, eq=False)
class SparseSum(Derivation):
    """``sum_{S} ad(a_S)`` over a sparse system."""

    system: SparseSystem = dc_field(default=None)

    @classmethod
    def from_parts(cls, field: FieldSpec, shape: SiteShape, finite=(), families=()) -> SparseSum:
        return cls(SparseSystem(field, shape, tuple(finite), tuple(families)))

    @classmethod
    def family(cls, template: Element, start: int = 1) -> SparseSum:
        return cls.from_parts(template.field, template.shape, families=(ShiftFamily(template, start),))

    @property
    def field(self):
        return self.system.field

    @property
    def shape(self):
        return self.system.shape

    @property
    def finite(self):
        return self.system.finite

    @property
    def families(self):
        return self.system.families

    def normalized(self) -> SparseSum:
        return SparseSum(self.system.normalized())

    def is_zero(self) -> bool:
        n = self.system.normalized()
        return not n.finite and not n.families

    def __add__(self, other):
        other = _as_sparse(other)
        s, o = self.system, other.system
        return SparseSum(
            SparseSystem(s.field, s.shape, s.finite + o.finite, s.families + o.families)
        ).normalized()

    def scale(self, c) -> SparseSum:
        s = self.system
        fin = tuple((S, a.scale(c)) for S, a in s.finite)
        fams = tuple(ShiftFamily(f.template.scale(c), f.start) for f in s.families)
        return SparseSum(SparseSystem(s.field, s.shape, fin, fams)).normalized()

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-_as_sparse(other))

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        if isinstance(other, Inner):
            other = other.as_sparse()
        if not isinstance(other, SparseSum):
            return NotImplemented
        a, b = self.system.normalized(), other.system.normalized()
        return a.finite == b.finite and a.families == b.families

    def __hash__(self):
        n = self.system.normalized()
        return hash((n.finite, n.families))

    def __repr__(self):
        n = self.system.normalized()
        parts = [f"member {sorted(S)} {a}" for S, a in n.finite]
        parts += [f"family {f.template} start={f.start}" for f in n.families]
        return "SparseSum(" + "; ".join(parts) + ")"


def _as_sparse(d) -> SparseSum:
    if isinstance(d, Inner):
        return d.as_sparse()
    if isinstance(d, SparseSum):
        return d
    raise TypeError(f"expected a derivation, got {type(d).__name__}")


def members_intersecting(system: SparseSystem, sites: Iterable[int]):
    return system.members_intersecting(sites)


def apply(d, x: Element) -> Element:
    """Evaluate a derivation; only the finitely many members meeting ``support(x)`` contribute."""
    if isinstance(d, Inner):
        return commutator(d.a, x)
    if isinstance(d, SparseSum):
        out = Element.zero(x.field, x.shape)
        supp = x.support
        if not supp:
            return out
        for _, a in d.system.members_intersecting(supp):
            out = out + commutator(a, x)
        return out
    return d(x)


def leibniz_check(d: Callable[[Element], Element], x: Element, y: Element) -> bool:
    """``d(xy) == d(x) y + x d(y)``; ``d`` may be any linear map on elements."""
    return d(x * y) == d(x) * y + x * d(y)


def generators(field: FieldSpec, shape: SiteShape, sites: Iterable[int]):
    """``((site, p, q), e_pq(site))`` for all matrix units of the given sites."""
    for s in sorted(sites):
        for (p, q), g in site_generators(field, shape, s):
            yield (s, p, q), g


def equal_on_truncation(d1, d2, N: int) -> bool:
    """True iff ``d1`` and ``d2`` agree on every matrix unit of sites ``1..N``."""
    return all(d1(g) == d2(g) for _, g in generators(d1.field, d1.shape, range(1, N + 1)))


def inner_solve_local(d, sites: Iterable[int]) -> Element:
    """An element ``b`` with ``d(x) = [b, x]`` for every ``x`` in ``A_S``.

    Uses ``b = sum_k d(E_k1) E_1k`` over the matrix units of the flattened
    algebra ``A_S``; the result is checked on all generators of ``A_S``.
    """
    sites = sorted(set(sites))
    if not sites:
        raise ValueError("site set must be nonempty")
    field, shape = d.field, d.shape
    dims = shape.dims(sites)
    first = tuple(0 for _ in sites)
    b = Element.zero(field, shape)
    for k in itertools.product(*(range(n) for n in dims)):
        dk = d(matrix_unit_flat(field, shape, sites, k, first))
        if dk.is_zero():
            continue
        b = b + dk * matrix_unit_flat(field, shape, sites, first, k)
    for key, g in generators(field, shape, sites):
        if d(g) != commutator(b, g):
            raise NotADerivation(f"map is not a derivation on A_{sites}: mismatch at e{key}")
    return b


@dataclass(frozen=True)
class BasisExpansion:
    """Coefficients against the topological basis ``{ad(e)}``.

    ``finite`` maps canonical monomials to coefficients; each entry of
    ``families`` is ``(coefficients of the template, start)`` and stands for
    the same coefficients on every shifted copy ``i >= start``.
    """

    finite: Mapping
    families: tuple = ()
    unit_components: tuple = ()
    field: FieldSpec = FieldSpec(0)

    def truncated(self, N: int) -> dict:
        """Aggregate coefficients of basis elements supported in ``[1, N]``."""
        out: dict = defaultdict(int)
        for m, c in self.finite.items():
            if max(s for s, _, _ in m) <= N:
                out[m] += c
        for coeffs, start in self.families:
            # monomials of different widths share a shift index, so every shift
            # up to N is visited and each monomial is bounded on its own
            for i in range(start, N + 1):
                for m, c in coeffs.items():
                    sm = tuple((s + i - 1, p, q) for s, p, q in m)
                    if max(s for s, _, _ in sm) <= N:
                        out[sm] += c
        norm = self.field.normalize
        return {m: norm(c) for m, c in out.items() if norm(c)}

    def is_empty(self) -> bool:
        return not self.finite and not self.families


def expand_basis(d) -> BasisExpansion:
    """Expand a sparse sum against ``ad(E_S)``, ``E_i = {e_pq : (p, q) != (1, 1)}``.

    The ``F·1`` component of every member is dropped (``ad(1) = 0``) and is
    reported separately in ``unit_components`` for reconstruction.
    """
    d = _as_sparse(d)
    field = d.field
    finite: dict = defaultdict(int)
    units = []
    for _, a in d.system.finite:
        units.append(a.unit_component())
        for m, c in a.items():
            if m != UNIT_MONOMIAL:
                finite[m] += c
    finite = {m: field.normalize(c) for m, c in finite.items() if field.normalize(c)}
    fams = []
    for fam in d.system.families:
        coeffs = {m: c for m, c in fam.template.items() if m != UNIT_MONOMIAL}
        if coeffs:
            fams.append((coeffs, fam.start))
    return BasisExpansion(finite, tuple(fams), tuple(units), field)


def derivation_commutator(d1, d2):
    """``[d1, d2]`` as a sparse sum of ``ad([a_S, b_T])`` over meeting member pairs.

    For two shift families only finitely many relative offsets give meeting
    supports; each offset becomes a new shift family.
    """
    if isinstance(d1, Inner) and isinstance(d2, Inner):
        return Inner(commutator(d1.a, d2.a))
    s1, s2 = _as_sparse(d1).system, _as_sparse(d2).system
    field, shape = s1.field, s1.shape
    finite = []
    families = []
    for S, a in s1.finite:
        for T, b in s2.finite:
            if a.support & b.support:
                finite.append((S | T, commutator(a, b)))
        for fam in s2.families:
            for i in fam.shifts_meeting(a.support):
                b = fam.member(i)
                if a.support & b.support:
                    finite.append((S | b.support, commutator(a, b)))
    for fam in s1.families:
        for T, b in s2.finite:
            for i in fam.shifts_meeting(b.support):
                a = fam.member(i)
                if a.support & b.support:
                    finite.append((a.support | T, commutator(a, b)))
    for f1 in s1.families:
        for f2 in s2.families:
            for delta in range(-(f2.window - 1), f1.window):
                i0 = max(f1.start, f2.start - delta)
                j0 = i0 + delta
                br = commutator(f1.member(i0), f2.member(j0))
                if br.is_zero() or not br.support:
                    continue
                base = min(i0, j0)
                families.append(ShiftFamily(shift(br, -(base - 1)), base))
    finite = [(frozenset(S), a) for S, a in finite if not a.is_zero()]
    return SparseSum(SparseSystem(field, shape, tuple(finite), tuple(families))).normalized()


def build_z(field: FieldSpec, shape: SiteShape) -> SparseSum:
    """``z = sum_i ad(e_12(i) e_11(i+1))``."""
    t = Element.unit(field, shape, 1, 1, 2) * Element.unit(field, shape, 2, 1, 1)
    return SparseSum.family(t, 1)


def interval_product(field: FieldSpec, shape: SiteShape, start: int, k: int) -> Element:
    """``e_12(start) e_12(start+1) ... e_12(start+k-1)``."""
    out = Element.one(field, shape)
    for s in range(start, start + k):
        out = out * Element.unit(field, shape, s, 1, 2)
    return out


def build_yk(k: int, field: FieldSpec, shape: SiteShape) -> SparseSum:
    """``y_k = sum_j ad(e_12(j) ... e_12(j+k-1))``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return SparseSum.family(interval_product(field, shape, 1, k), 1)


class GeneratorDerivation(Derivation):
    """A linear map on ``A_{1..N}`` given by images of the matrix units.

    Extended to monomials by the product rule. Images of ``e_11(i)`` may be
    omitted; they are filled in from ``e_11 = 1 - sum_{p>=2} e_pp``.
    """

    def __init__(self, images: Mapping, N: int, field: FieldSpec, shape: SiteShape):
        self.field = field
        self.shape = shape
        self.N = N
        imgs = {}
        for key, v in dict(images).items():
            i, p, q = key
            if not 1 <= i <= N:
                raise ValueError(f"generator site {i} outside 1..{N}")
            imgs[(i, p, q)] = v
        zero = Element.zero(field, shape)
        for i in range(1, N + 1):
            n = shape.size(i)
            for p in range(1, n + 1):
                for q in range(1, n + 1):
                    if (p, q) != (1, 1):
                        imgs.setdefault((i, p, q), zero)
            if (i, 1, 1) not in imgs:
                acc = zero
                for p in range(2, n + 1):
                    acc = acc - imgs[(i, p, p)]
                imgs[(i, 1, 1)] = acc
        self.images = imgs

    def __call__(self, x: Element) -> Element:
        out = Element.zero(self.field, self.shape)
        one = Element.one(self.field, self.shape)
        for mono, c in x.items():
            if any(s > self.N for s, _, _ in mono):
                raise SupportError(f"element not supported in 1..{self.N}")
            factors = [Element.unit(self.field, self.shape, s, p, q) for s, p, q in mono]
            for j, (s, p, q) in enumerate(mono):
                left = one
                for f in factors[:j]:
                    left = left * f
                right = one
                for f in factors[j + 1:]:
                    right = right * f
                out = out + (left * self.images[(s, p, q)] * right).scale(c)
        return out

    def violations(self):
        """Yield descriptions of violated Leibniz relations on generators."""
        F, sh = self.field, self.shape
        gens = {key: g for key, g in generators(F, sh, range(1, self.N + 1))}
        img = self.images
        for i in range(1, self.N + 1):
            n = sh.size(i)
            total = Element.zero(F, sh)
            for p in range(1, n + 1):
                total = total + img[(i, p, p)]
            if not total.is_zero():
                yield f"sum of d(e_pp({i})) is {total}, expected 0"
            for p, q, r, s in itertools.product(range(1, n + 1), repeat=4):
                lhs = img[(i, p, q)] * gens[(i, r, s)] + gens[(i, p, q)] * img[(i, r, s)]
                rhs = img[(i, p, s)] if q == r else Element.zero(F, sh)
                if lhs != rhs:
                    yield f"d(e{p}{q}({i}) e{r}{s}({i})) violates the product rule"
        for i, j in itertools.combinations(range(1, self.N + 1), 2):
            for (pi, qi), g in site_generators(F, sh, i):
                for (pj, qj), h in site_generators(F, sh, j):
                    dg, dh = img[(i, pi, qi)], img[(j, pj, qj)]
                    if commutator(dg, h) + commutator(g, dh) != 0:
                        yield f"images of e{pi}{qi}({i}) and e{pj}{qj}({j}) break commutation"

    def is_consistent(self) -> bool:
        return next(self.violations(), None) is None


def peel_derivation(images, N: int, field: FieldSpec | None = None, shape: SiteShape | None = None):
    """Peel a derivation of ``A_{1..N}`` into inner pieces site by site.

    Returns ``[(S_k, a_k)]`` (zero pieces omitted) such that
    ``d - sum_k ad(a_k)`` kills ``A_{1..N}`` and ``a_k`` centralizes
    ``A_{1..k-1}``. At step ``k`` the residual kills ``A_1 .. A_{k-1}``, so it
    maps ``A_k`` into their centralizer and the local inner solution lands
    there too.
    """
    if isinstance(images, GeneratorDerivation):
        d = images
    else:
        images = dict(images)
        if field is None or shape is None:
            sample = next(iter(images.values()))
            field, shape = sample.field, sample.shape
        d = GeneratorDerivation(images, N, field, shape)
    bad = next(d.violations(), None)
    if bad is not None:
        raise NotADerivation(bad)
    F, sh = d.field, d.shape
    gens = list(generators(F, sh, range(1, N + 1)))
    residual = {key: d.images[key] for key, _ in gens}
    pieces = []
    for k in range(1, N + 1):
        n = sh.size(k)
        a = Element.zero(F, sh)
        for p in range(1, n + 1):
            a = a + residual[(k, p, 1)] * Element.unit(F, sh, k, 1, p)
        if a.is_zero():
            continue
        pieces.append((frozenset(a.support), a))
        for key, g in gens:
            residual[key] = residual[key] - commutator(a, g)
    for key, v in residual.items():
        if not v.is_zero():
            raise NotADerivation(f"residual does not vanish at e{key}")
    return pieces
