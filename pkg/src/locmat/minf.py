"""Finitary and affine-pattern infinite matrices.

A :class:`PatternMatrix` is a finitary matrix plus finitely many affine
families ``sum_{i>=s} c e_{αi+β, γi+δ}`` with ``α, γ >= 1``. Families whose
index maps grow in both coordinates keep products closed: matching the
column of one family against the row of another is a linear Diophantine
equation whose solutions form an arithmetic progression.

Normal form: for every geometric line carrying families, the valid lattice
points are ``P* + m (a, b)`` (``m >= 0``, ``(a, b)`` primitive). The eventual
coefficient along the line is a periodic function of ``m``; it is reduced to
its minimal period ``d`` and emitted as one step-``d`` family per nonzero
residue, each starting at the first valid point. Everything else is finitary.
Two pattern matrices are equal iff their normal forms coincide.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, lcm
from typing import Iterable, Mapping

from .errors import FieldMismatch, NotFinitaryResult
from .field import FieldSpec


def _clean(entries: Mapping, field: FieldSpec) -> dict:
    out = {}
    for (r, c), v in entries.items():
        if r < 1 or c < 1:
            raise IndexError(f"matrix position ({r},{c}) must be positive")
        v = field(v)
        if v:
            out[(int(r), int(c))] = v
    return out


class FinitaryMatrix:
    """A matrix over ``N+ x N+`` with finitely many nonzero entries."""

    __slots__ = ("field", "_entries")

    def __init__(self, field: FieldSpec, entries: Mapping | None = None):
        self.field = field
        self._entries = _clean(entries or {}, field)

    @classmethod
    def unit(cls, field: FieldSpec, r: int, c: int, coeff=1) -> FinitaryMatrix:
        return cls(field, {(r, c): coeff})

    @property
    def entries(self) -> dict:
        return dict(self._entries)

    def items(self):
        return sorted(self._entries.items())

    def is_zero(self) -> bool:
        return not self._entries

    def as_pattern(self) -> PatternMatrix:
        return PatternMatrix(self.field, self._entries)

    def __eq__(self, other):
        if isinstance(other, FinitaryMatrix):
            return self.field == other.field and self._entries == other._entries
        if isinstance(other, PatternMatrix):
            return self.as_pattern() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.field, frozenset(self._entries.items())))

    def __add__(self, other):
        return _finitary_or_pattern(self.as_pattern() + _as_pattern(other))

    def __sub__(self, other):
        return _finitary_or_pattern(self.as_pattern() - _as_pattern(other))

    def __mul__(self, other):
        if isinstance(other, (FinitaryMatrix, PatternMatrix)):
            return _finitary_or_pattern(pattern_mul(self.as_pattern(), _as_pattern(other)))
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def scale(self, c) -> FinitaryMatrix:
        c = self.field(c)
        return FinitaryMatrix(self.field, {k: v * c for k, v in self._entries.items()})

    def __str__(self):
        return str(self.as_pattern())

    def __repr__(self):
        return f"FinitaryMatrix({str(self)!r})"


@dataclass(frozen=True)
class AffineFamily:
    """``sum_{i >= start} coeff(i) e_{alpha i + beta, gamma i + delta}``.

    ``coeff(i)`` is ``prefix[i - start]`` on the first ``len(prefix)`` indices
    and ``tail`` afterwards, so a finite list ``f`` is ``prefix=f, tail=0``.
    """

    alpha: int
    beta: int
    gamma: int
    delta: int
    start: int = 1
    tail: object = 1
    prefix: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        if self.alpha < 1 or self.gamma < 1:
            raise ValueError("affine families need alpha >= 1 and gamma >= 1")
        if self.start < 1:
            raise ValueError("family start must be >= 1")
        if self.alpha * self.start + self.beta < 1 or self.gamma * self.start + self.delta < 1:
            raise ValueError("family positions must stay >= 1")

    def position(self, i: int) -> tuple[int, int]:
        return self.alpha * i + self.beta, self.gamma * i + self.delta

    def coefficient(self, i: int):
        k = i - self.start
        if k < 0:
            return 0
        return self.prefix[k] if k < len(self.prefix) else self.tail


def _line_data(alpha, beta, gamma, delta, first_index):
    """Line key, primitive step, step multiple and index of the first point."""
    g = gcd(alpha, gamma)
    a, b = alpha // g, gamma // g
    r, c = alpha * first_index + beta, gamma * first_index + delta
    back = min((r - 1) // a, (c - 1) // b)
    base = (r - back * a, c - back * b)
    return (a, b, base), g, back


class PatternMatrix:
    """Finitary part plus affine families, kept in normal form."""

    __slots__ = ("field", "finitary", "families")

    def __init__(self, field: FieldSpec, finitary: Mapping | None = None,
                 families: Iterable[AffineFamily] = ()):
        fin = dict(_clean(finitary or {}, field))
        self.field = field
        self.finitary, self.families = _normalize(field, fin, list(families))

    @classmethod
    def zero(cls, field: FieldSpec) -> PatternMatrix:
        return cls(field)

    def is_finitary(self) -> bool:
        return not self.families

    def to_finitary(self) -> FinitaryMatrix:
        if self.families:
            raise NotFinitaryResult(f"matrix has {len(self.families)} infinite families: {self}")
        return FinitaryMatrix(self.field, self.finitary)

    def entry(self, r: int, c: int):
        v = self.finitary.get((r, c), 0)
        for fam in self.families:
            if (r - fam.beta) % fam.alpha == 0:
                i = (r - fam.beta) // fam.alpha
                if i >= fam.start and fam.gamma * i + fam.delta == c:
                    v = v + fam.coefficient(i)
        return self.field.normalize(v)

    def _check(self, other: PatternMatrix):
        if self.field != other.field:
            raise FieldMismatch(f"field mismatch: {self.field} vs {other.field}")

    def __add__(self, other):
        other = _as_pattern(other)
        self._check(other)
        fin = dict(self.finitary)
        for k, v in other.finitary.items():
            fin[k] = self.field.normalize(fin.get(k, 0) + v)
        return PatternMatrix(self.field, fin, self.families + other.families)

    def scale(self, c) -> PatternMatrix:
        c = self.field(c)
        F = self.field
        fin = {k: F.normalize(v * c) for k, v in self.finitary.items()}
        fams = [_with_tail(f, F.normalize(f.tail * c)) for f in self.families]
        return PatternMatrix(F, fin, fams)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-_as_pattern(other))

    def __mul__(self, other):
        if isinstance(other, (PatternMatrix, FinitaryMatrix)):
            return pattern_mul(self, _as_pattern(other))
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def _key(self):
        return (self.field, tuple(sorted(self.finitary.items())), self.families)

    def __eq__(self, other):
        if isinstance(other, FinitaryMatrix):
            other = other.as_pattern()
        if not isinstance(other, PatternMatrix):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __str__(self):
        return format_pattern(self)

    def __repr__(self):
        return f"PatternMatrix({format_pattern(self)!r})"


def _with_tail(f: AffineFamily, tail) -> AffineFamily:
    return AffineFamily(f.alpha, f.beta, f.gamma, f.delta, f.start, tail, f.prefix)


def _as_pattern(x) -> PatternMatrix:
    if isinstance(x, PatternMatrix):
        return x
    if isinstance(x, FinitaryMatrix):
        return x.as_pattern()
    raise TypeError(f"expected a pattern or finitary matrix, got {type(x).__name__}")


def _finitary_or_pattern(p: PatternMatrix):
    return p.to_finitary() if p.is_finitary() else p


def _normalize(field: FieldSpec, fin: dict, families: list):
    F = field

    def bump(pos, v):
        nv = F.normalize(fin.get(pos, 0) + v)
        if nv:
            fin[pos] = nv
        else:
            fin.pop(pos, None)

    # line key -> list of (step multiple g, first point index m, coefficient)
    lines: dict = {}
    for fam in families:
        for k, v in enumerate(fam.prefix):
            v = F(v)
            if v:
                bump(fam.position(fam.start + k), v)
        tail = F(fam.tail)
        if not tail:
            continue
        first = fam.start + len(fam.prefix)
        key, g, m = _line_data(fam.alpha, fam.beta, fam.gamma, fam.delta, first)
        lines.setdefault(key, []).append((g, m, tail))

    out = []
    for (a, b, base), parts in lines.items():
        L = 1
        for g, _, _ in parts:
            L = lcm(L, g)

        def actual(m):
            return F.normalize(sum(c for g, m0, c in parts if m >= m0 and (m - m0) % g == 0))

        horizon = max(m0 for _, m0, _ in parts)
        # eventual coefficient on residues mod L, sampled past every start
        h = [actual(horizon + ((r - horizon) % L)) for r in range(L)]
        d = next(d for d in range(1, L + 1) if L % d == 0 and all(h[r] == h[r % d] for r in range(L)))
        for m in range(horizon):
            diff = actual(m) - h[m % d]
            if diff:
                bump((base[0] + m * a, base[1] + m * b), F.normalize(diff))
        for rho in range(d):
            if h[rho]:
                alpha, gamma = d * a, d * b
                r0, c0 = base[0] + rho * a, base[1] + rho * b
                out.append(AffineFamily(alpha, r0 - alpha, gamma, c0 - gamma, 1, h[rho]))
    out.sort(key=lambda f: (f.alpha, f.gamma, f.beta, f.delta, str(f.tail)))
    return fin, tuple(out)


def _solve_first(f1: AffineFamily, f2: AffineFamily):
    """Smallest ``(i, j)`` with ``col1(i) == row2(j)``, ``i, j >= start``, plus the steps."""
    # gamma1 i - alpha2 j = beta2 - delta1
    A, B, C = f1.gamma, f2.alpha, f2.beta - f1.delta
    g = gcd(A, B)
    if C % g:
        return None
    # particular solution via extended Euclid on A x + B y = g
    x, y = _ext_gcd(A, B)
    i0, j0 = x * (C // g), -y * (C // g)
    di, dj = B // g, A // g
    t = max(-((i0 - f1.start) // di), -((j0 - f2.start) // dj))
    return i0 + di * t, j0 + dj * t, di, dj


def _ext_gcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_s, old_t


def pattern_mul(x: PatternMatrix, y: PatternMatrix) -> PatternMatrix:
    """Exact product of two pattern matrices."""
    x._check(y)
    F = x.field
    fin: dict = {}

    def bump(pos, v):
        fin[pos] = F.normalize(fin.get(pos, 0) + v)

    rows_y: dict = {}
    for (r, c), v in y.finitary.items():
        rows_y.setdefault(r, []).append((c, v))
    for (r, k), v in x.finitary.items():
        for c, w in rows_y.get(k, ()):
            bump((r, c), v * w)
        for fam in y.families:
            if (k - fam.beta) % fam.alpha == 0:
                j = (k - fam.beta) // fam.alpha
                if j >= fam.start:
                    bump((r, fam.gamma * j + fam.delta), v * fam.tail)
    for fam in x.families:
        for (k, c), w in y.finitary.items():
            i_num = k - fam.delta
            if i_num % fam.gamma == 0 and i_num // fam.gamma >= fam.start:
                i = i_num // fam.gamma
                bump((fam.alpha * i + fam.beta, c), fam.tail * w)
    fams = []
    for f1 in x.families:
        for f2 in y.families:
            sol = _solve_first(f1, f2)
            if sol is None:
                continue
            i, j, di, dj = sol
            # entries (alpha1 (i + di t) + beta1, gamma2 (j + dj t) + delta2), t >= 0
            alpha, gamma = f1.alpha * di, f2.gamma * dj
            beta = f1.alpha * i + f1.beta - alpha
            delta = f2.gamma * j + f2.delta - gamma
            fams.append(AffineFamily(alpha, beta, gamma, delta, 1, F.normalize(f1.tail * f2.tail)))
    return PatternMatrix(F, fin, fams)


def pattern_commutator(x: PatternMatrix, y: PatternMatrix) -> PatternMatrix:
    return pattern_mul(x, y) - pattern_mul(y, x)


def pattern_equal(x: PatternMatrix, y: PatternMatrix) -> bool:
    return _as_pattern(x) == _as_pattern(y)


def ad_apply(m, x) -> FinitaryMatrix:
    """``[m, x]`` for finitary ``x``; raises if the result is not finitary."""
    return pattern_commutator(_as_pattern(m), _as_pattern(x)).to_finitary()


def to_dense_window(x, n: int) -> list[list]:
    """Top-left ``n x n`` block as a dense list of rows."""
    x = _as_pattern(x)
    out = [[0] * n for _ in range(n)]
    for (r, c), v in x.finitary.items():
        if r <= n and c <= n:
            out[r - 1][c - 1] = v
    for fam in x.families:
        i = fam.start
        while True:
            r, c = fam.position(i)
            if r > n or c > n:
                break
            out[r - 1][c - 1] = x.field.normalize(out[r - 1][c - 1] + fam.coefficient(i))
            i += 1
    return out


# constructions


def identity(field: FieldSpec) -> PatternMatrix:
    return PatternMatrix(field, families=[AffineFamily(1, 0, 1, 0)])


def build_z_minf(field: FieldSpec) -> PatternMatrix:
    """``sum_i e_{2i, 2i+2}``."""
    return PatternMatrix(field, families=[AffineFamily(2, 0, 2, 2)])


def build_yk_minf(k: int, field: FieldSpec) -> PatternMatrix:
    """``sum_i e_{2i, 2i+2k-1}``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return PatternMatrix(field, families=[AffineFamily(2, 0, 2, 2 * k - 1)])


def build_df(f, field: FieldSpec, tail=0) -> PatternMatrix:
    """``diag(0, f(1), f(2), ...)``; ``f`` is a finite list continued by ``tail``."""
    return PatternMatrix(field, families=[AffineFamily(1, 1, 1, 1, 1, tail, tuple(f))])


def nilpotent_part(f, field: FieldSpec, tail=0) -> PatternMatrix:
    """``sum_i f(i) e_{2i-1, 2i}``."""
    return PatternMatrix(field, families=[AffineFamily(2, -1, 2, 0, 1, tail, tuple(f))])


def build_af(f, field: FieldSpec, tail=0) -> PatternMatrix:
    """``Id + sum_i f(i) e_{2i-1, 2i}``."""
    return identity(field) + nilpotent_part(f, field, tail)


def af_inverse(f, field: FieldSpec, tail=0) -> PatternMatrix:
    """``Id - sum_i f(i) e_{2i-1, 2i}``; the nilpotent part squares to zero."""
    return identity(field) - nilpotent_part(f, field, tail)


def conjugate_by_af(f, x, field: FieldSpec | None = None, tail=0) -> FinitaryMatrix:
    """``a_f^{-1} x a_f`` for finitary ``x``."""
    x = _as_pattern(x)
    F = field or x.field
    out = pattern_mul(pattern_mul(af_inverse(f, F, tail), x), build_af(f, F, tail))
    return out.to_finitary()


# text form


def _fmt_scalar(c) -> str:
    return str(c)


def _signed_terms(terms):
    """Join ``(coeff, atom)`` pairs with the element printer's sign rules."""
    if not terms:
        return "0"
    parts = []
    for idx, (c, atom) in enumerate(terms):
        neg = c < 0
        mag = -c if neg else c
        body = atom if mag == 1 else f"{_fmt_scalar(mag)}*{atom}"
        if idx == 0:
            parts.append(f"-1*{atom}" if neg and mag == 1 else (f"-{body}" if neg else body))
        else:
            parts.append(f" - {body}" if neg else f" + {body}")
    return "".join(parts)


def format_family(f: AffineFamily) -> str:
    base = f"sum({f.alpha},{f.beta},{f.gamma},{f.delta}"
    return base + (f",{f.start})" if f.start != 1 else ")")


def format_pattern(x: PatternMatrix) -> str:
    """Text form, parseable by :func:`locmat.parser.parse_pattern`.

    ``e(r,c)`` is a single entry and ``sum(α,β,γ,δ)`` is
    ``sum_{i>=1} e_{αi+β, γi+δ}``. Over GF(p) residues are printed as is.
    """
    terms = [(v, f"e({r},{c})") for (r, c), v in sorted(x.finitary.items())]
    terms += [(f.tail, format_family(f)) for f in x.families]
    return _signed_terms(terms)
