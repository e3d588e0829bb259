"""Finitely supported elements of the infinite tensor product of matrix algebras.

Sites are the positive integers; site ``i`` carries a full matrix algebra of
size ``shape.size(i)``. An element is stored in a canonical monomial basis:
at every site the complement of the scalars is spanned by the matrix units
``e_pq`` with ``(p, q) != (1, 1)``, and ``e_11`` is rewritten as
``1 - sum_{p >= 2} e_pp``. Monomials are tuples of ``(site, p, q)`` triples in
ascending site order; a missing site stands for the identity factor and the
empty tuple is the unit.

Because the basis is a genuine basis, two elements are equal exactly when
their term dictionaries are equal.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

from . import linalg
from .errors import (
    CharacteristicDividesSize,
    IndexOutOfRange,
    NotIdempotent,
    NotInCentralizer,
    NotInvertible,
    ShapeMismatch,
    ShapeMismatchAtShiftedSite,
    ShiftOutOfRange,
    SupportError,
)
from .field import FieldSpec

Monomial = tuple  # tuple[tuple[int, int, int], ...]
UNIT_MONOMIAL: Monomial = ()


@dataclass(frozen=True)
class SiteShape:
    """Sizes ``n_i >= 2`` of the site algebras: a default plus finitely many exceptions."""

    default: int = 2
    exceptions: tuple = ()

    def __post_init__(self):
        exc = self.exceptions
        if isinstance(exc, Mapping):
            exc = exc.items()
        exc = tuple(sorted((int(i), int(n)) for i, n in exc if int(n) != self.default))
        object.__setattr__(self, "exceptions", exc)
        if self.default < 2:
            raise ValueError("site sizes must be at least 2")
        for i, n in exc:
            if i < 1:
                raise ValueError(f"site index {i} must be positive")
            if n < 2:
                raise ValueError(f"site {i}: size {n} must be at least 2")

    @classmethod
    def uniform(cls, n: int = 2) -> SiteShape:
        return cls(n)

    @classmethod
    def parse(cls, text: str) -> SiteShape:
        """Parse ``default=<n>[,i=n_i...]``."""
        default = 2
        exceptions = {}
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            key, _, value = part.partition("=")
            if not value:
                raise ValueError(f"bad shape component {part!r}")
            if key.strip() == "default":
                default = int(value)
            else:
                exceptions[int(key)] = int(value)
        return cls(default, exceptions)

    def size(self, site: int) -> int:
        for i, n in self.exceptions:
            if i == site:
                return n
        return self.default

    def dims(self, sites: Iterable[int]) -> list[int]:
        return [self.size(i) for i in sites]

    def __str__(self):
        parts = [f"default={self.default}"] + [f"{i}={n}" for i, n in self.exceptions]
        return ",".join(parts)


# monomial-level helpers


def _raw_mono_mul(m1: Monomial, m2: Monomial):
    """Product of two matrix-unit monomials, or ``None`` when it vanishes.

    The result may contain ``(site, 1, 1)`` entries; see :func:`_rewrite`.
    """
    if not m1:
        return m2
    if not m2:
        return m1
    if m1[-1][0] < m2[0][0]:
        return m1 + m2
    if m2[-1][0] < m1[0][0]:
        return m2 + m1
    out = []
    i = j = 0
    n1, n2 = len(m1), len(m2)
    while i < n1 and j < n2:
        a = m1[i]
        b = m2[j]
        if a[0] < b[0]:
            out.append(a)
            i += 1
        elif a[0] > b[0]:
            out.append(b)
            j += 1
        else:
            if a[2] != b[1]:
                return None
            out.append((a[0], a[1], b[2]))
            i += 1
            j += 1
    if i < n1:
        out.extend(m1[i:])
    if j < n2:
        out.extend(m2[j:])
    return tuple(out)


def _has_e11(mono: Monomial) -> bool:
    for _, p, q in mono:
        if p == 1 and q == 1:
            return True
    return False


def _rewrite(raw: dict, shape: SiteShape, field: FieldSpec) -> dict:
    """Eliminate ``e_11`` labels via ``e_11 = 1 - sum_{p>=2} e_pp`` and normalize."""
    done: dict = defaultdict(int)
    work = raw
    while work:
        nxt: dict = defaultdict(int)
        for key, c in work.items():
            if not c:
                continue
            for j, (site, p, q) in enumerate(key):
                if p == 1 and q == 1:
                    head, tail = key[:j], key[j + 1:]
                    nxt[head + tail] += c
                    for r in range(2, shape.size(site) + 1):
                        nxt[head + ((site, r, r),) + tail] -= c
                    break
            else:
                done[key] += c
        work = nxt
    out = {}
    for key, c in done.items():
        c = field.normalize(c)
        if c:
            out[key] = c
    return out


class Element:
    """Immutable element of the tensor product, stored in canonical form.

    Supports ``+``, ``-``, ``*`` (algebra product, or scaling by a scalar)
    and equality. Build elements with :meth:`unit`, :meth:`one`,
    :meth:`scalar` or :func:`canonicalize`.
    """

    __slots__ = ("field", "shape", "_terms", "_hash")

    def __init__(self, field: FieldSpec, shape: SiteShape, terms: Mapping | None = None):
        # trusted constructor: ``terms`` must already be canonical with nonzero values
        self.field = field
        self.shape = shape
        self._terms = dict(terms) if terms else {}
        self._hash = None

    # constructors

    @classmethod
    def zero(cls, field: FieldSpec, shape: SiteShape) -> Element:
        return cls(field, shape)

    @classmethod
    def scalar(cls, field: FieldSpec, shape: SiteShape, value) -> Element:
        c = field(value)
        return cls(field, shape, {UNIT_MONOMIAL: c} if c else None)

    @classmethod
    def one(cls, field: FieldSpec, shape: SiteShape) -> Element:
        return cls.scalar(field, shape, 1)

    @classmethod
    def unit(cls, field: FieldSpec, shape: SiteShape, site: int, p: int, q: int) -> Element:
        """The matrix unit ``e_pq(site)``."""
        return canonicalize(field, shape, [({site: (p, q)}, 1)])

    # inspection

    @property
    def terms(self) -> Mapping:
        return MappingProxyType(self._terms)

    def items(self):
        """Terms in canonical order: ascending site, then ``(p, q)``."""
        return sorted(self._terms.items())

    @property
    def support(self) -> frozenset:
        return frozenset(s for mono in self._terms for s, _, _ in mono)

    def coefficient(self, mono: Monomial):
        return self._terms.get(tuple(mono), 0)

    def unit_component(self):
        return self._terms.get(UNIT_MONOMIAL, 0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_scalar(self) -> bool:
        return all(not m for m in self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    # arithmetic

    def _check(self, other: Element):
        if self.field != other.field:
            self.field.check_same(other.field)
        if self.shape != other.shape:
            raise ShapeMismatch(f"shape mismatch: {self.shape} vs {other.shape}")

    def _lift(self, other) -> Element:
        if isinstance(other, Element):
            self._check(other)
            return other
        return Element.scalar(self.field, self.shape, other)

    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self._terms)
        normalize = self.field.normalize
        for m, c in other._terms.items():
            v = normalize(terms.get(m, 0) + c)
            if v:
                terms[m] = v
            else:
                terms.pop(m, None)
        return Element(self.field, self.shape, terms)

    __radd__ = __add__

    def __neg__(self):
        neg = self.field.neg
        return Element(self.field, self.shape, {m: neg(c) for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c) -> Element:
        c = self.field(c)
        if not c:
            return Element(self.field, self.shape)
        normalize = self.field.normalize
        return Element(self.field, self.shape, {m: normalize(c * v) for m, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Element):
            return self.scale(other)
        self._check(other)
        raw: dict = defaultdict(int)
        dirty = False
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _raw_mono_mul(m1, m2)
                if m is None:
                    continue
                raw[m] += c1 * c2
                if not dirty and _has_e11(m):
                    dirty = True
        if dirty:
            return Element(self.field, self.shape, _rewrite(raw, self.shape, self.field))
        normalize = self.field.normalize
        out = {}
        for m, c in raw.items():
            c = normalize(c)
            if c:
                out[m] = c
        return Element(self.field, self.shape, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if k < 0:
            return invert(self) ** (-k)
        out = Element.one(self.field, self.shape)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.field == other.field and self.shape == other.shape and self._terms == other._terms
        if isinstance(other, int) and other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.shape, frozenset(self._terms.items())))
        return self._hash

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"Element({format_element(self)!r}, field={self.field})"


# printing


def format_scalar(c) -> str:
    return str(c)


def format_monomial(mono: Monomial) -> str:
    return "*".join(f"e[{s}]({p},{q})" for s, p, q in mono)


def format_element(x: Element) -> str:
    """Canonical text in the input grammar; coefficient 1 is suppressed."""
    items = x.items()
    if not items:
        return "0"
    parts = []
    for idx, (mono, c) in enumerate(items):
        neg = c < 0
        mag = -c if neg else c
        body = format_monomial(mono)
        if not body:
            text = format_scalar(mag)
        elif mag == 1:
            text = body if (idx or not neg) else f"1*{body}"
        else:
            text = f"{format_scalar(mag)}*{body}"
        if idx == 0:
            parts.append(f"-{text}" if neg else text)
        else:
            parts.append(f" - {text}" if neg else f" + {text}")
    return "".join(parts)


# operations


def canonicalize(field: FieldSpec, shape: SiteShape, raw: Iterable) -> Element:
    """Build the canonical element from ``(site -> (p, q) map, scalar)`` pairs.

    Labels ``(1, 1)`` are allowed on input and rewritten away; zero
    coefficients are dropped.
    """
    acc: dict = defaultdict(int)
    for entries, coeff in raw:
        if isinstance(entries, Mapping):
            entries = entries.items()
        else:
            entries = [(s, (p, q)) for s, p, q in entries]
        key = []
        for site, (p, q) in sorted(entries):
            n = shape.size(site)
            if site < 1 or not (1 <= p <= n and 1 <= q <= n):
                raise IndexOutOfRange(f"e[{site}]({p},{q}) out of range for site size {n}")
            key.append((site, p, q))
        if len({s for s, _, _ in key}) != len(key):
            raise ValueError("a raw monomial mentions the same site twice")
        acc[tuple(key)] += field(coeff)
    return Element(field, shape, _rewrite(acc, shape, field))


def mul(x: Element, y: Element) -> Element:
    return x * y


def add(x: Element, y: Element) -> Element:
    return x + y


def scale(c, x: Element) -> Element:
    return x.scale(c)


def commutator(x: Element, y: Element) -> Element:
    """``[x, y] = xy - yx``."""
    return x * y - y * x


def _flat_index_iter(dims):
    return itertools.product(*(range(n) for n in dims))


def dense_expand(x: Element, sites: Iterable[int]) -> list[list]:
    """Kronecker matrix of ``x`` on ``⊗_{i in sites} M_{n_i}``, sites ascending.

    The first site is the most significant factor of the row/column index.
    """
    sites = sorted(set(sites))
    if not x.support <= set(sites):
        raise SupportError(f"support {sorted(x.support)} not contained in {sites}")
    dims = x.shape.dims(sites)
    dim = 1
    for n in dims:
        dim *= n
    strides = []
    s = 1
    for n in reversed(dims):
        strides.append(s)
        s *= n
    strides.reverse()
    pos = {site: k for k, site in enumerate(sites)}
    out = linalg.zeros(dim, dim)
    for mono, c in x._terms.items():
        fixed = {pos[site]: (p - 1, q - 1) for site, p, q in mono}
        choices = []
        for k, n in enumerate(dims):
            if k in fixed:
                choices.append((fixed[k],))
            else:
                choices.append(tuple((t, t) for t in range(n)))
        for combo in itertools.product(*choices):
            r = cidx = 0
            for (a, b), st in zip(combo, strides):
                r += a * st
                cidx += b * st
            out[r][cidx] += c
    normalize = x.field.normalize
    return [[normalize(v) for v in row] for row in out]


def from_dense(matrix: list[list], sites: Iterable[int], field: FieldSpec, shape: SiteShape) -> Element:
    """Inverse of :func:`dense_expand`: re-canonicalize a Kronecker matrix."""
    sites = sorted(set(sites))
    dims = shape.dims(sites)
    dim = 1
    for n in dims:
        dim *= n
    if len(matrix) != dim:
        raise ShapeMismatch(f"matrix of size {len(matrix)} does not match sites {sites} (dim {dim})")
    digits = list(_flat_index_iter(dims))
    raw: dict = defaultdict(int)
    for r, row in enumerate(matrix):
        dr = digits[r]
        for c, v in enumerate(row):
            if v:
                dc = digits[c]
                key = tuple((site, a + 1, b + 1) for site, a, b in zip(sites, dr, dc))
                raw[key] += v
    return Element(field, shape, _rewrite(raw, shape, field))


def matrix_unit_flat(field: FieldSpec, shape: SiteShape, sites, k: tuple, l: tuple) -> Element:
    """Matrix unit ``E_{kl}`` of the flattened algebra ``A_S``; ``k``, ``l`` are 0-based digit tuples."""
    return canonicalize(field, shape, [({s: (a + 1, b + 1) for s, a, b in zip(sites, k, l)}, 1)])


def invert(x: Element) -> Element:
    """Inverse computed densely over ``support(x)`` only."""
    sites = sorted(x.support)
    if not sites:
        c = x.unit_component()
        if not c:
            raise NotInvertible("zero is not invertible")
        return Element.scalar(x.field, x.shape, x.field.inv(c))
    dense = dense_expand(x, sites)
    try:
        inv = linalg.inverse(dense, x.field)
    except NotInvertible:
        raise NotInvertible(f"element is not invertible: {x}") from None
    return from_dense(inv, sites, x.field, x.shape)


def conjugate(a: Element, x: Element) -> Element:
    """``a^{-1} x a``."""
    return invert(a) * x * a


def site_generators(field: FieldSpec, shape: SiteShape, site: int):
    """All matrix units ``e_pq(site)`` as ``((p, q), Element)`` pairs."""
    n = shape.size(site)
    return [((p, q), Element.unit(field, shape, site, p, q)) for p in range(1, n + 1) for q in range(1, n + 1)]


def centralizer_check(x: Element, site: int) -> bool:
    """True iff ``x`` commutes with every matrix unit of the site algebra ``A_site``."""
    return all(commutator(g, x).is_zero() for _, g in site_generators(x.field, x.shape, site))


def factor_site(x: Element, site: int) -> Element:
    """The tensor complement of ``x`` with respect to ``A_site``.

    Canonical terms carry no entry at ``site`` exactly when ``x`` centralizes
    ``A_site``, so the result is ``x`` itself, viewed in ``⊗_{j != site} A_j``.
    """
    if not centralizer_check(x, site):
        raise NotInCentralizer(f"element does not centralize site {site}")
    assert site not in x.support
    return x


def peirce_project(u: Element, e: Element) -> Element:
    """``e u e`` for an idempotent ``e``."""
    if e * e != e:
        raise NotIdempotent("projection element is not idempotent")
    return e * u * e


def normalized_trace(x: Element):
    """Trace normalized so that ``tau(1) = 1``; independent of the ambient support."""
    field = x.field
    for site in x.support:
        if field.divides_size(x.shape.size(site)):
            raise CharacteristicDividesSize(
                f"characteristic {field.characteristic} divides size of site {site}"
            )
    total = 0
    for mono, c in x._terms.items():
        t = c
        for site, p, q in mono:
            if p != q:
                t = 0
                break
            t = t * field.inv(field(x.shape.size(site)))
        total += t
    return field.normalize(total) if total else 0


def shift(x: Element, k: int) -> Element:
    """Translate every site index by ``k``."""
    if k == 0:
        return x
    shape = x.shape
    terms = {}
    for mono, c in x._terms.items():
        new = []
        for site, p, q in mono:
            t = site + k
            if t < 1:
                raise ShiftOutOfRange(f"site {site} shifted by {k} leaves the index set")
            if shape.size(t) != shape.size(site):
                raise ShapeMismatchAtShiftedSite(
                    f"site {site} (size {shape.size(site)}) shifted to {t} (size {shape.size(t)})"
                )
            new.append((t, p, q))
        terms[tuple(new)] = c
    return Element(x.field, shape, terms)


solve_kernel = linalg.solve_kernel


def coordinates(x: Element) -> dict:
    """Coefficients on the canonical monomial basis (a fresh dict)."""
    return dict(x._terms)
