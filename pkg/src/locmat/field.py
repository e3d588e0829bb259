"""Exact ground fields: the rationals and prime fields GF(p).

Scalars are plain Python numbers. Over the rationals a scalar is an ``int``
when it is integral and a :class:`fractions.Fraction` otherwise; keeping the
integral case as ``int`` is roughly two orders of magnitude faster. Over
GF(p) a scalar is an ``int`` in ``range(p)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import FieldMismatch


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The ground field: ``characteristic == 0`` for Q, a prime p for GF(p)."""

    characteristic: int = 0

    def __post_init__(self):
        c = self.characteristic
        if c != 0 and not _is_prime(c):
            raise ValueError(f"characteristic must be 0 or prime, got {c}")

    @classmethod
    def rationals(cls) -> FieldSpec:
        return cls(0)

    @classmethod
    def prime(cls, p: int) -> FieldSpec:
        return cls(p)

    @classmethod
    def parse(cls, text: str) -> FieldSpec:
        """Parse ``q`` / ``Q`` or ``gf:p``."""
        t = text.strip().lower()
        if t in ("q", "qq", "rationals"):
            return cls(0)
        if t.startswith("gf:"):
            return cls(int(t[3:]))
        raise ValueError(f"unknown field {text!r}; expected 'q' or 'gf:p'")

    @property
    def kind(self) -> str:
        return "rationals" if self.characteristic == 0 else "prime"

    def __str__(self):
        return "q" if self.characteristic == 0 else f"gf:{self.characteristic}"

    # scalar arithmetic

    def __call__(self, value) -> int | Fraction:
        """Coerce an int, Fraction or ``"a/b"`` string into this field."""
        if isinstance(value, str):
            value = Fraction(value.replace(" ", ""))
        p = self.characteristic
        if p:
            if isinstance(value, int):
                return value % p
            if isinstance(value, Rational):
                num, den = value.numerator, value.denominator
                if den % p == 0:
                    raise ZeroDivisionError(f"{value} has no image in GF({p})")
                return num * pow(den, -1, p) % p
            raise TypeError(f"cannot coerce {value!r} into GF({p})")
        if isinstance(value, int):
            return value
        if isinstance(value, Rational):
            if value.denominator == 1:
                return int(value.numerator)
            return Fraction(value.numerator, value.denominator)
        raise TypeError(f"cannot coerce {value!r} into Q; floats are not exact")

    def normalize(self, c):
        """Bring the result of raw ``+ - *`` on scalars back to canonical form."""
        if self.characteristic:
            return c % self.characteristic
        if type(c) is Fraction and c.denominator == 1:
            return c.numerator
        return c

    def inv(self, c):
        if c == 0:
            raise ZeroDivisionError("inverse of zero")
        p = self.characteristic
        if p:
            return pow(c, -1, p)
        return self.normalize(Fraction(1) / c)

    def div(self, a, b):
        return self.normalize(a * self.inv(b))

    def neg(self, c):
        return self.normalize(-c)

    def divides_size(self, n: int) -> bool:
        """True when ``n`` is zero in this field."""
        return self.characteristic != 0 and n % self.characteristic == 0

    def check_same(self, other: FieldSpec):
        if self != other:
            raise FieldMismatch(f"field mismatch: {self} vs {other}")


QQ = FieldSpec(0)


def GF(p: int) -> FieldSpec:
    return FieldSpec(p)
