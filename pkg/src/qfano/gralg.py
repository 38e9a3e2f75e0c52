"""Exact coefficient arithmetic and sparse weighted-graded multivariate polynomials.

Coefficients live either in Q (``fractions.Fraction``) or in a prime field
GF(p) with p <= 2**31.  No floating point anywhere.  Polynomials are sparse
term maps keyed by exponent tuples and are immutable after construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod
from typing import Iterable, Iterator, Mapping, Sequence, Union


class GralgError(Exception):
    pass


class ParseError(GralgError):
    pass


# ---------------------------------------------------------------------------
# coefficient fields
# ---------------------------------------------------------------------------

class PrimeFieldElem:
    """Residue in GF(p), always stored in [0, p)."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.value = value % p
        self.p = p

    def _coerce(self, other) -> "PrimeFieldElem":
        if isinstance(other, PrimeFieldElem):
            if other.p != self.p:
                raise GralgError("mixed prime fields GF(%d) and GF(%d)" % (self.p, other.p))
            return other
        if isinstance(other, int):
            return PrimeFieldElem(other, self.p)
        if isinstance(other, Fraction):
            if other.denominator % self.p == 0:
                raise GralgError("denominator divisible by %d" % self.p)
            return PrimeFieldElem(other.numerator, self.p) / PrimeFieldElem(other.denominator, self.p)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return PrimeFieldElem(self.value + other.value, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return PrimeFieldElem(self.value - other.value, self.p)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return PrimeFieldElem(self.value * other.value, self.p)

    __rmul__ = __mul__

    def inverse(self) -> "PrimeFieldElem":
        if self.value == 0:
            raise ZeroDivisionError("inversion of 0 in GF(%d)" % self.p)
        return PrimeFieldElem(pow(self.value, self.p - 2, self.p), self.p)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __neg__(self):
        return PrimeFieldElem(-self.value, self.p)

    def __eq__(self, other):
        if isinstance(other, PrimeFieldElem):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return str(self.value)


class RationalField:
    """The field Q; elements are ``fractions.Fraction``."""

    name = "QQ"

    def __call__(self, x) -> Fraction:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)
        if isinstance(x, PrimeFieldElem):
            raise GralgError("cannot lift GF(p) element to Q")
        raise GralgError("cannot coerce %r into Q" % (x,))

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


class PrimeField:
    """GF(p) for a prime p <= 2**31."""

    def __init__(self, p: int):
        if p < 2 or p > 2**31 or not _is_prime(p):
            raise GralgError("modulus %r is not a prime <= 2^31" % (p,))
        self.p = p
        self.name = "GF(%d)" % p

    def __call__(self, x) -> PrimeFieldElem:
        if isinstance(x, PrimeFieldElem):
            if x.p != self.p:
                raise GralgError("element of GF(%d) in GF(%d)" % (x.p, self.p))
            return x
        if isinstance(x, int):
            return PrimeFieldElem(x, self.p)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise GralgError("denominator divisible by %d" % self.p)
            return PrimeFieldElem(x.numerator, self.p) / PrimeFieldElem(x.denominator, self.p)
        raise GralgError("cannot coerce %r into GF(%d)" % (x, self.p))

    @property
    def zero(self):
        return PrimeFieldElem(0, self.p)

    @property
    def one(self):
        return PrimeFieldElem(1, self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return self.name


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


QQ = RationalField()

Coefficient = Union[Fraction, PrimeFieldElem]


# ---------------------------------------------------------------------------
# polynomial rings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyRing:
    """Ring descriptor: coordinate names, one weight per coordinate, base field."""

    names: tuple
    weights: tuple
    field: object = QQ

    def __post_init__(self):
        if len(self.names) != len(self.weights):
            raise GralgError("names/weights length mismatch")
        if len(set(self.names)) != len(self.names):
            raise GralgError("duplicate coordinate names")
        if any(w <= 0 for w in self.weights):
            raise GralgError("weights must be positive")

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise GralgError("no coordinate %r in ring %r" % (name, self.names))

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.constant(1)

    def constant(self, c) -> "Poly":
        c = self.field(c)
        if not c:
            return Poly(self, {})
        return Poly(self, {(0,) * self.nvars: c})

    def gen(self, name: str) -> "Poly":
        i = self.index(name)
        exp = [0] * self.nvars
        exp[i] = 1
        return Poly(self, {tuple(exp): self.field.one})

    def gens(self) -> list:
        return [self.gen(n) for n in self.names]

    def monomial(self, exps: Sequence[int], coeff=1) -> "Poly":
        if len(exps) != self.nvars:
            raise GralgError("exponent vector of wrong length")
        c = self.field(coeff)
        if not c:
            return Poly(self, {})
        return Poly(self, {tuple(int(e) for e in exps): c})

    def monomial_basis(self, degree: int, allowed: Sequence[int] | None = None) -> list:
        """All exponent tuples of weighted degree ``degree``.

        ``allowed`` restricts the support to a subset of coordinate indices.
        """
        if allowed is None:
            allowed = list(range(self.nvars))
        out = []

        def rec(pos: int, remaining: int, acc: list):
            if pos == len(allowed):
                if remaining == 0:
                    exp = [0] * self.nvars
                    for idx, e in zip(allowed, acc):
                        exp[idx] = e
                    out.append(tuple(exp))
                return
            w = self.weights[allowed[pos]]
            for e in range(remaining // w + 1):
                rec(pos + 1, remaining - e * w, acc + [e])

        rec(0, degree, [])
        return sorted(out, reverse=True)

    def poly(self, source) -> "Poly":
        """Build a polynomial from a string or a {exps: coeff} mapping."""
        if isinstance(source, str):
            return parse_poly(self, source)
        if isinstance(source, Poly):
            if source.ring != self:
                raise GralgError("polynomial from a different ring")
            return source
        terms = {}
        for exps, c in source.items():
            c = self.field(c)
            if c:
                terms[tuple(int(e) for e in exps)] = c
        return Poly(self, terms)

    def change_field(self, field) -> "PolyRing":
        return PolyRing(self.names, self.weights, field)

    def extend(self, names: Sequence[str], weights: Sequence[int]) -> "PolyRing":
        return PolyRing(self.names + tuple(names), self.weights + tuple(weights), self.field)


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class Poly:
    """Sparse weighted-graded polynomial; no zero coefficients are stored."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: Mapping):
        self.ring = ring
        self.terms = dict(terms)

    # -- basics ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.ring.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def _check_same_ring(self, other: "Poly"):
        if self.ring != other.ring:
            raise GralgError("polynomials from different rings")

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        if not isinstance(other, Poly):
            return NotImplemented
        self._check_same_ring(other)
        terms = dict(self.terms)
        for exps, c in other.terms.items():
            s = terms.get(exps)
            if s is None:
                terms[exps] = c
            else:
                s = s + c
                if s:
                    terms[exps] = s
                else:
                    del terms[exps]
        return Poly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PrimeFieldElem)):
            c = self.ring.field(other)
            if not c:
                return self.ring.zero()
            return Poly(self.ring, {e: v * c for e, v in self.terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        self._check_same_ring(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                s = terms.get(e)
                if s is None:
                    terms[e] = c
                else:
                    s = s + c
                    if s:
                        terms[e] = s
                    else:
                        del terms[e]
        return Poly(self.ring, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise GralgError("negative power of a polynomial")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base_needed = k >> 1
            if base_needed:
                base = base * base
            k >>= 1
        return result

    # -- grading ------------------------------------------------------------

    def monomial_degree(self, exps: Sequence[int]) -> int:
        return sum(w * e for w, e in zip(self.ring.weights, exps))

    def weighted_degree(self):
        """Common weighted degree of all terms, or None if inhomogeneous or zero."""
        deg = None
        for exps in self.terms:
            d = self.monomial_degree(exps)
            if deg is None:
                deg = d
            elif d != deg:
                return None
        return deg

    def is_homogeneous(self, degree: int | None = None) -> bool:
        d = self.weighted_degree()
        if not self.terms:
            return True
        if d is None:
            return False
        return degree is None or d == degree

    def graded_parts(self) -> dict:
        parts: dict = {}
        for exps, c in self.terms.items():
            parts.setdefault(self.monomial_degree(exps), {})[exps] = c
        return {d: Poly(self.ring, t) for d, t in sorted(parts.items())}

    def graded_part(self, degree: int) -> "Poly":
        return Poly(self.ring, {e: c for e, c in self.terms.items()
                                if self.monomial_degree(e) == degree})

    # -- calculus and structure ----------------------------------------------

    def partial(self, name: str) -> "Poly":
        i = self.ring.index(name)
        terms = {}
        for exps, c in self.terms.items():
            e = exps[i]
            if e == 0:
                continue
            new = list(exps)
            new[i] = e - 1
            coeff = c * e
            if coeff:
                terms[tuple(new)] = coeff
        return Poly(self.ring, terms)

    def coefficient_of(self, name: str, power: int) -> "Poly":
        """Coefficient of name**power (a polynomial in the other coordinates)."""
        i = self.ring.index(name)
        terms = {}
        for exps, c in self.terms.items():
            if exps[i] == power:
                new = list(exps)
                new[i] = 0
                terms[tuple(new)] = c
        return Poly(self.ring, terms)

    def degree_in(self, name: str) -> int:
        i = self.ring.index(name)
        return max((e[i] for e in self.terms), default=0)

    def substitute(self, assignment: Mapping[str, "Poly"]) -> "Poly":
        """Exact composition; every coordinate appearing in self must be covered
        by ``assignment`` or left alone (identity)."""
        imgs = {}
        for name, val in assignment.items():
            i = self.ring.index(name)
            if isinstance(val, (int, Fraction)):
                val = self.ring.constant(val)
            self._check_same_ring(val)
            imgs[i] = val
        cache: dict = {}

        def power(i: int, e: int) -> Poly:
            key = (i, e)
            if key not in cache:
                cache[key] = imgs[i] ** e
            return cache[key]

        result = self.ring.zero()
        for exps, c in self.terms.items():
            fixed = [0] * self.ring.nvars
            factor = None
            for i, e in enumerate(exps):
                if e == 0:
                    continue
                if i in imgs:
                    pw = power(i, e)
                    factor = pw if factor is None else factor * pw
                else:
                    fixed[i] = e
            term = Poly(self.ring, {tuple(fixed): c})
            result = result + (term if factor is None else term * factor)
        return result

    def set_zero(self, names: Iterable[str]) -> "Poly":
        """Set the named coordinates to zero (fast restriction)."""
        idx = [self.ring.index(n) for n in names]
        terms = {}
        for exps, c in self.terms.items():
            if all(exps[i] == 0 for i in idx):
                terms[exps] = c
        return Poly(self.ring, terms)

    def rename(self, ring: PolyRing, mapping: Mapping[str, str]) -> "Poly":
        """Move to another ring, sending coordinate ``k`` to ``mapping[k]``.

        Every coordinate with a nonzero exponent must be mapped.
        """
        pos = {self.ring.index(k): ring.index(v) for k, v in mapping.items()}
        terms = {}
        for exps, c in self.terms.items():
            new = [0] * ring.nvars
            for i, e in enumerate(exps):
                if e == 0:
                    continue
                if i not in pos:
                    raise GralgError("coordinate %r not mapped" % self.ring.names[i])
                new[pos[i]] = e
            terms[tuple(new)] = ring.field(c)
        return Poly(ring, terms)

    def evaluate(self, point: Mapping[str, object]):
        vals = {self.ring.index(k): self.ring.field(v) for k, v in point.items()}
        if len(vals) != self.ring.nvars:
            raise GralgError("evaluation point must cover all coordinates")
        total = self.ring.field.zero
        for exps, c in self.terms.items():
            v = c
            for i, e in enumerate(exps):
                if e:
                    v = v * vals[i] ** e if isinstance(vals[i], Fraction) else v * _pfe_pow(vals[i], e)
            total = total + v
        return total

    def reduce_mod(self, p: int) -> "Poly":
        """Reduce a Q-polynomial modulo p; fails if p divides any denominator."""
        gf = PrimeField(p)
        ring = self.ring.change_field(gf)
        terms = {}
        for exps, c in self.terms.items():
            r = gf(c)
            if r:
                terms[exps] = r
        return Poly(ring, terms)

    def divide_exact(self, divisor: "Poly"):
        """Return self/divisor if divisor divides exactly, else None.

        Division by a single polynomial with the graded-lex leading term; for a
        principal ideal this decides membership.
        """
        self._check_same_ring(divisor)
        if divisor.is_zero():
            raise GralgError("division by zero polynomial")
        lead = max(divisor.terms, key=lambda e: (self.monomial_degree(e), e))
        lead_c = divisor.terms[lead]
        rest = Poly(self.ring, {e: c for e, c in divisor.terms.items() if e != lead})
        quo_terms: dict = {}
        rem = self
        guard = 0
        while rem.terms:
            guard += 1
            if guard > 200000:
                raise GralgError("division did not terminate")
            cand = max(rem.terms, key=lambda e: (self.monomial_degree(e), e))
            diff = tuple(a - b for a, b in zip(cand, lead))
            if any(d < 0 for d in diff):
                return None
            c = rem.terms[cand] / lead_c if isinstance(rem.terms[cand], PrimeFieldElem) \
                else rem.terms[cand] / lead_c
            quo_terms[diff] = c
            mono = Poly(self.ring, {diff: c})
            rem = rem - mono * divisor
        return Poly(self.ring, quo_terms)

    # -- printing -----------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(),
                      key=lambda item: (self.monomial_degree(item[0]), item[0]),
                      reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        chunks = []
        for exps, c in self.sorted_terms():
            factors = []
            for name, e in zip(self.ring.names, exps):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append("%s^%d" % (name, e))
            if isinstance(c, PrimeFieldElem):
                sign, mag = "+", str(c.value)
            else:
                sign = "-" if c < 0 else "+"
                mag = str(abs(c))
            if factors and mag == "1":
                body = "*".join(factors)
            elif factors:
                body = mag + "*" + "*".join(factors)
            else:
                body = mag
            chunks.append((sign, body))
        first_sign, first_body = chunks[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in chunks[1:]:
            out += " %s %s" % (sign, body)
        return out

    def __repr__(self):
        return "Poly(%s)" % self


def _pfe_pow(x: PrimeFieldElem, e: int) -> PrimeFieldElem:
    return PrimeFieldElem(pow(x.value, e, x.p), x.p)


# ---------------------------------------------------------------------------
# derived operations
# ---------------------------------------------------------------------------

def weighted_degree(p: Poly):
    return p.weighted_degree()


def substitute(p: Poly, assignment: Mapping[str, Poly]) -> Poly:
    return p.substitute(assignment)


def jacobian(polys: Sequence[Poly], coords: Sequence[str]) -> list:
    """k x n matrix of exact partial derivatives."""
    rings = {p.ring for p in polys}
    if len(rings) > 1:
        raise GralgError("jacobian of polynomials in different rings")
    return [[p.partial(c) for c in coords] for p in polys]


def euler_pairing(p: Poly) -> Poly:
    """Sum of a_i * x_i * dp/dx_i; equals deg(p) * p for homogeneous p."""
    total = p.ring.zero()
    for name, w in zip(p.ring.names, p.ring.weights):
        total = total + p.ring.gen(name) * p.partial(name) * w
    return total


# ---------------------------------------------------------------------------
# parser (round-trips with the canonical printer)
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<int>\d+)|(?P<op>[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == m.start():
            if text[pos:].strip():
                raise ParseError("cannot tokenize %r" % text[pos:pos + 12])
            break
        tokens.append((m.lastgroup, m.group(m.lastgroup)))
        pos = m.end()
    return tokens


class _Parser:
    """Terms joined by +/-, ^ for powers, * optional; parentheses allowed."""

    def __init__(self, ring: PolyRing, tokens):
        self.ring = ring
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self) -> Poly:
        p = self.expr()
        if self.peek()[0] is not None:
            raise ParseError("unexpected %r" % (self.peek()[1],))
        return p

    def expr(self) -> Poly:
        kind, val = self.peek()
        negate = False
        if kind == "op" and val in "+-":
            self.next()
            negate = val == "-"
        p = self.term()
        if negate:
            p = -p
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                q = self.term()
                p = p - q if val == "-" else p + q
            else:
                return p

    def term(self) -> Poly:
        p = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.next()
                p = p * self.factor()
            elif kind == "op" and val == "/":
                self.next()
                q = self.factor()
                c = _constant_value(q)
                if c is None or not c:
                    raise ParseError("'/' only divides by nonzero constants")
                if isinstance(c, PrimeFieldElem):
                    p = p * c.inverse()
                else:
                    p = p * Fraction(1, 1) * Fraction(c.denominator, c.numerator)
            elif kind in ("name", "int") or (kind == "op" and val == "("):
                p = p * self.factor()
            else:
                return p

    def factor(self) -> Poly:
        p = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.next()
            kind, val = self.next()
            if kind != "int":
                raise ParseError("expected integer exponent")
            p = p ** int(val)
        return p

    def atom(self) -> Poly:
        kind, val = self.next()
        if kind == "name":
            return self.ring.gen(val)
        if kind == "int":
            return self.ring.constant(int(val))
        if kind == "op" and val == "(":
            p = self.expr()
            kind, val = self.next()
            if not (kind == "op" and val == ")"):
                raise ParseError("expected ')'")
            return p
        if kind == "op" and val == "-":
            return -self.atom()
        raise ParseError("unexpected token %r" % (val,))


def _constant_value(p: Poly):
    if p.is_zero():
        return p.ring.field.zero
    if len(p.terms) == 1:
        exps, c = next(iter(p.terms.items()))
        if all(e == 0 for e in exps):
            return c
    return None


def parse_poly(ring: PolyRing, text: str) -> Poly:
    return _Parser(ring, _tokenize(text)).parse()
