"""Surface syntax: element expressions, pattern expressions and input files.

Element grammar (whitespace insignificant)::

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := scalar | 'id' | 'e[' nat '](' nat ',' nat ')' | scalar '*' factor | '(' expr ')'
    scalar := ['-'] nat ['/' nat]

Pattern expressions reuse the same skeleton with different atoms:
``e(r,c)``, ``sum(α,β,γ,δ[,start])``, ``id``, ``z``, ``y<k>``,
``d[f1,...]`` and ``a[f1,...]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import ParseError
from .field import FieldSpec
from .tensor import Element, SiteShape

_TOKEN = re.compile(r"\s+|(?P<num>\d+)|(?P<name>[A-Za-z_]+)|(?P<op>[-+*/()\[\],=])")


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    line: int
    column: int


def tokenize(text: str, line_offset: int = 0) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1 + line_offset, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        if m.lastgroup:
            tokens.append(Token(m.lastgroup, m.group(), line, pos - line_start + 1))
        else:
            chunk = m.group()
            nl = chunk.count("\n")
            if nl:
                line += nl
                line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("end", "", line, pos - line_start + 1))
    return tokens


# AST


@dataclass(frozen=True)
class ScalarLit:
    value: Fraction


@dataclass(frozen=True)
class IdLit:
    pass


@dataclass(frozen=True)
class UnitLit:
    site: int
    p: int
    q: int


@dataclass(frozen=True)
class ScalarMul:
    scalar: ScalarLit
    factor: "ExprAst"


@dataclass(frozen=True)
class Product:
    factors: tuple


@dataclass(frozen=True)
class Sum:
    terms: tuple  # of (sign +1/-1, node)


@dataclass(frozen=True)
class Group:
    inner: "ExprAst"


ExprAst = Union[ScalarLit, IdLit, UnitLit, ScalarMul, Product, Sum, Group]


class _Cursor:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k=1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        return ParseError(f"{msg}, found {found!r}", tok.line, tok.column)

    def accept(self, text) -> bool:
        if self.tok.text == text and self.tok.kind != "end":
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            raise self.error(f"expected {text!r}")

    def nat(self) -> int:
        if self.tok.kind != "num":
            raise self.error("expected a natural number")
        v = int(self.tok.text)
        self.i += 1
        return v

    def integer(self) -> int:
        sign = -1 if self.accept("-") else 1
        return sign * self.nat()

    def at_scalar(self) -> bool:
        return self.tok.kind == "num" or (self.tok.text == "-" and self.peek().kind == "num")

    def scalar(self) -> ScalarLit:
        neg = self.accept("-")
        num = self.nat()
        den = 1
        if self.accept("/"):
            tok = self.tok
            den = self.nat()
            if den == 0:
                raise self.error("zero denominator", tok)
        v = Fraction(num, den)
        return ScalarLit(-v if neg else v)


class _ElementParser:
    def __init__(self, cur: _Cursor):
        self.cur = cur

    def expr(self):
        terms = [(1, self.term())]
        while self.cur.tok.text in ("+", "-"):
            sign = 1 if self.cur.tok.text == "+" else -1
            self.cur.i += 1
            terms.append((sign, self.term()))
        return terms[0][1] if len(terms) == 1 and terms[0][0] == 1 else Sum(tuple(terms))

    def term(self):
        factors = [self.factor()]
        while self.cur.accept("*"):
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def factor(self):
        cur = self.cur
        if cur.at_scalar():
            s = cur.scalar()
            if cur.tok.text == "*" and self._factor_follows():
                cur.i += 1
                return ScalarMul(s, self.factor())
            return s
        if cur.accept("("):
            inner = self.expr()
            cur.expect(")")
            return Group(inner)
        tok = cur.tok
        if tok.kind == "name":
            return self.atom(tok)
        raise cur.error("expected a scalar, 'id', 'e[' or '('")

    def _factor_follows(self) -> bool:
        nxt = self.cur.peek()
        return nxt.kind in ("num", "name") or nxt.text in ("(", "-")

    def atom(self, tok):
        cur = self.cur
        if tok.text == "id":
            cur.i += 1
            return IdLit()
        if tok.text == "e":
            cur.i += 1
            cur.expect("[")
            site = cur.nat()
            cur.expect("]")
            cur.expect("(")
            p = cur.nat()
            cur.expect(",")
            q = cur.nat()
            cur.expect(")")
            if site < 1 or p < 1 or q < 1:
                raise ParseError("site and matrix indices start at 1", tok.line, tok.column)
            return UnitLit(site, p, q)
        raise cur.error("expected a scalar, 'id', 'e[' or '('")


def parse_element(text: str, line_offset: int = 0) -> ExprAst:
    """Parse an element expression into an AST; errors carry line and column."""
    cur = _Cursor(tokenize(text, line_offset))
    node = _ElementParser(cur).expr()
    if cur.tok.kind != "end":
        raise cur.error("unexpected trailing input")
    return node


@dataclass(frozen=True)
class SessionConfig:
    field: FieldSpec = FieldSpec(0)
    shape: SiteShape = SiteShape(2)
    seed: int = 0


def eval_ast(node: ExprAst, config: SessionConfig) -> Element:
    F, sh = config.field, config.shape
    if isinstance(node, ScalarLit):
        return Element.scalar(F, sh, F(node.value))
    if isinstance(node, IdLit):
        return Element.one(F, sh)
    if isinstance(node, UnitLit):
        return Element.unit(F, sh, node.site, node.p, node.q)
    if isinstance(node, ScalarMul):
        return eval_ast(node.factor, config).scale(F(node.scalar.value))
    if isinstance(node, Group):
        return eval_ast(node.inner, config)
    if isinstance(node, Product):
        out = eval_ast(node.factors[0], config)
        for f in node.factors[1:]:
            out = out * eval_ast(f, config)
        return out
    if isinstance(node, Sum):
        out = Element.zero(F, sh)
        for sign, t in node.terms:
            v = eval_ast(t, config)
            out = out + v if sign > 0 else out - v
        return out
    raise TypeError(f"not an expression node: {node!r}")


def parse_and_eval(text: str, config: SessionConfig, line_offset: int = 0) -> Element:
    return eval_ast(parse_element(text, line_offset), config)


# pattern expressions


class _PatternEval(_ElementParser):
    """Evaluates while parsing; pattern expressions have no separate AST."""

    def __init__(self, cur, field):
        super().__init__(cur)
        self.field = field

    def scalar_list(self):
        cur = self.cur
        cur.expect("[")
        vals = []
        if not cur.accept("]"):
            vals.append(cur.scalar().value)
            while cur.accept(","):
                vals.append(cur.scalar().value)
            cur.expect("]")
        return vals

    def atom(self, tok):
        from . import minf

        cur, F = self.cur, self.field
        name = tok.text
        cur.i += 1
        if name == "id":
            return minf.identity(F)
        if name == "z":
            return minf.build_z_minf(F)
        if name == "y":
            return minf.build_yk_minf(cur.nat(), F)
        if name == "e":
            cur.expect("(")
            r = cur.nat()
            cur.expect(",")
            c = cur.nat()
            cur.expect(")")
            try:
                return minf.FinitaryMatrix.unit(F, r, c).as_pattern()
            except IndexError as exc:
                raise ParseError(str(exc), tok.line, tok.column) from None
        if name == "sum":
            cur.expect("(")
            args = [cur.integer()]
            while cur.accept(","):
                args.append(cur.integer())
            cur.expect(")")
            if len(args) not in (4, 5):
                raise ParseError("sum takes 4 or 5 integers", tok.line, tok.column)
            try:
                return minf.PatternMatrix(F, families=[minf.AffineFamily(*args)])
            except ValueError as exc:
                raise ParseError(str(exc), tok.line, tok.column) from None
        if name == "d":
            return minf.build_df([F(v) for v in self.scalar_list()], F)
        if name == "a":
            return minf.build_af([F(v) for v in self.scalar_list()], F)
        raise ParseError(f"unknown pattern atom {name!r}", tok.line, tok.column)

    def expr(self):
        cur = self.cur
        out = self.term()
        while cur.tok.text in ("+", "-"):
            sign = cur.tok.text
            cur.i += 1
            t = self.term()
            out = out + t if sign == "+" else out - t
        return out

    def term(self):
        out = self.factor()
        while self.cur.accept("*"):
            out = out * self.factor()
        return out

    def factor(self):
        cur = self.cur
        if cur.at_scalar():
            s = cur.scalar()
            c = self.field(s.value)
            if cur.tok.text == "*" and self._factor_follows():
                cur.i += 1
                return self.factor().scale(c)
            from . import minf

            return minf.identity(self.field).scale(c)
        if cur.accept("("):
            inner = self.expr()
            cur.expect(")")
            return inner
        tok = cur.tok
        if tok.kind == "name":
            return self.atom(tok)
        raise cur.error("expected a scalar, pattern atom or '('")


def parse_pattern(text: str, field: FieldSpec):
    """Parse and evaluate a pattern-matrix expression.

    A bare scalar ``c`` denotes ``c * id``.
    """
    cur = _Cursor(tokenize(text))
    value = _PatternEval(cur, field).expr()
    if cur.tok.kind != "end":
        raise cur.error("unexpected trailing input")
    return value


# input files


def _logical_lines(text: str):
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, raw, line


def _rest_offset(raw: str, rest: str) -> int:
    return raw.find(rest)


def _parse_expr_at(raw: str, rest: str, lineno: int, config: SessionConfig) -> Element:
    try:
        return parse_and_eval(rest, config)
    except ParseError as exc:
        col = exc.column + _rest_offset(raw, rest)
        raise ParseError(str(exc).rsplit(" (line", 1)[0], lineno, col) from None


def _siteset(text: str, lineno: int, raw: str) -> frozenset:
    body = text.strip()
    if body.startswith("{") and body.endswith("}"):
        body = body[1:-1]
    try:
        sites = frozenset(int(s) for s in body.split(",") if s.strip())
    except ValueError:
        raise ParseError(f"bad site set {text!r}", lineno, raw.find(text) + 1) from None
    if not sites or min(sites) < 1:
        raise ParseError(f"site set {text!r} must be nonempty and positive", lineno, raw.find(text) + 1)
    return sites


def parse_derivation_file(text: str, config: SessionConfig):
    """Read ``member``/``family``/``inner``/``builtin`` lines into a derivation.

    ``member <siteset> <expr>`` adds a finite member, ``family <expr> start=<n>``
    a shift family, ``inner <expr>`` an inner derivation and
    ``builtin z`` / ``builtin y<k>`` the standard families. A file holding only
    ``inner`` lines yields an :class:`~locmat.derivations.Inner`.
    """
    from .derivations import Inner, ShiftFamily, SparseSum, build_yk, build_z

    F, sh = config.field, config.shape
    finite, families, builtins = [], [], []
    inner = Element.zero(F, sh)
    for lineno, raw, line in _logical_lines(text):
        kw, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if kw == "member":
                m = re.match(r"(\{[^}]*\}|\S+)\s+(.*)$", rest)
                if not m:
                    raise ParseError("expected 'member <siteset> <expr>'", lineno, 1)
                sites = _siteset(m.group(1), lineno, raw)
                x = _parse_expr_at(raw, m.group(2), lineno, config)
                if not x.support <= sites:
                    raise ParseError(f"member expression leaves site set {sorted(sites)}", lineno, 1)
                finite.append((sites, x))
            elif kw == "family":
                m = re.match(r"(.*?)\s+start\s*=\s*(\d+)\s*$", rest)
                if not m:
                    raise ParseError("expected 'family <expr> start=<n>'", lineno, 1)
                x = _parse_expr_at(raw, m.group(1), lineno, config)
                families.append(ShiftFamily(x, int(m.group(2))))
            elif kw == "inner":
                inner = inner + _parse_expr_at(raw, rest, lineno, config)
            elif kw == "builtin":
                if rest == "z":
                    builtins.append(build_z(F, sh))
                elif re.fullmatch(r"y\d+", rest) and int(rest[1:]) >= 1:
                    builtins.append(build_yk(int(rest[1:]), F, sh))
                else:
                    raise ParseError(f"unknown builtin {rest!r}", lineno, raw.find(rest) + 1)
            else:
                raise ParseError(f"unknown directive {kw!r}", lineno, raw.find(kw) + 1)
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(str(exc), lineno, 1) from None
    if not (finite or families or builtins):
        return Inner(inner)
    if inner.support:
        finite.append((inner.support, inner))
    total = SparseSum.from_parts(F, sh, finite, families)
    for d in builtins:
        total = total + d
    return total


def parse_image_file(text: str, config: SessionConfig) -> tuple[dict, int]:
    """Read ``image <i> <p> <q> <expr>`` lines; returns ``(images, N)``."""
    images = {}
    for lineno, raw, line in _logical_lines(text):
        m = re.match(r"image\s+(\d+)\s+(\d+)\s+(\d+)\s+(.*)$", line)
        if not m:
            raise ParseError("expected 'image <i> <p> <q> <expr>'", lineno, 1)
        i, p, q = (int(m.group(k)) for k in (1, 2, 3))
        n = config.shape.size(i) if i >= 1 else 0
        if i < 1 or not (1 <= p <= n and 1 <= q <= n):
            raise ParseError(f"generator e{p}{q}({i}) out of range", lineno, raw.find(m.group(1)) + 1)
        if (i, p, q) in images:
            raise ParseError(f"duplicate image for e{p}{q}({i})", lineno, 1)
        images[(i, p, q)] = _parse_expr_at(raw, m.group(4), lineno, config)
    N = max((k[0] for k in images), default=0)
    return images, N
