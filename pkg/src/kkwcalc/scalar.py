"""Exact coefficient ring.

Everything the engine computes lives in :class:`ExactScalar`: sparse
polynomials in a closed set of formal generators (``pi``, ``h'(0)``, vector
field components, opaque curvature quantities) with Gaussian-rational
coefficients.  ``i`` is part of the coefficient field, ``pi`` is a generator,
so residue results such as ``13*pi/24`` are exact monomials.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

__all__ = [
    "GaussQ",
    "Gen",
    "ExactScalar",
    "MissingAssignment",
    "PI",
    "HP0",
    "X",
    "Y",
    "DY",
    "RIC_XY",
    "SCALAR_S",
    "G_XY",
    "G_XTYT",
    "ZERO",
    "ONE",
    "I",
    "es_eval",
]


class MissingAssignment(KeyError):
    """A generator occurring in an expression has no numeric value."""


RationalLike = Union[int, Fraction]


class GaussQ:
    """Gaussian rational ``re + im*i`` with :class:`fractions.Fraction` parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: RationalLike = 0, im: RationalLike = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, value) -> "GaussQ":
        if isinstance(value, GaussQ):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        return cls(Fraction(value))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GaussQ):
            try:
                other = GaussQ.coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __add__(self, other) -> "GaussQ":
        other = GaussQ.coerce(other)
        return GaussQ(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussQ":
        return GaussQ(-self.re, -self.im)

    def __sub__(self, other) -> "GaussQ":
        return self + (-GaussQ.coerce(other))

    def __rsub__(self, other) -> "GaussQ":
        return GaussQ.coerce(other) - self

    def __mul__(self, other) -> "GaussQ":
        other = GaussQ.coerce(other)
        return GaussQ(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "GaussQ":
        return GaussQ(self.re, -self.im)

    def inverse(self) -> "GaussQ":
        norm = self.re * self.re + self.im * self.im
        if not norm:
            raise ZeroDivisionError("GaussQ division by zero")
        return GaussQ(self.re / norm, -self.im / norm)

    def __truediv__(self, other) -> "GaussQ":
        return self * GaussQ.coerce(other).inverse()

    def __rtruediv__(self, other) -> "GaussQ":
        return GaussQ.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "GaussQ":
        if k < 0:
            return self.inverse() ** (-k)
        out, base = GaussQ(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"GaussQ({self.re}, {self.im})"

    def to_text(self) -> str:
        if not self.im:
            return _frac_text(self.re)
        if not self.re:
            return _imag_text(self.im)
        im = _imag_text(abs(self.im))
        sign = "+" if self.im > 0 else "-"
        return f"({_frac_text(self.re)} {sign} {im})"


def _frac_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _imag_text(q: Fraction) -> str:
    if q == 1:
        return "I"
    if q == -1:
        return "-I"
    head = {1: "I", -1: "-I"}.get(q.numerator, f"{q.numerator}*I")
    if q.denominator == 1:
        return head
    return f"{head}/{q.denominator}"


# Closed generator set.  Order here fixes the canonical sort order.
_TAGS = ("pi", "hp0", "X", "Y", "DY", "Ric", "s", "gXY", "gXTYT")
_TAG_RANK = {t: k for k, t in enumerate(_TAGS)}
_INDEXED = {"X": 1, "Y": 1, "DY": 2}


@dataclass(frozen=True, order=False)
class Gen:
    """Formal generator.  ``idx`` is empty except for ``X``, ``Y`` and ``DY``.

    ``DY(j, l)`` stands for the jet ``dY_l/dx_j`` at the boundary point.
    """

    tag: str
    idx: tuple = ()

    def __post_init__(self):
        if self.tag not in _TAG_RANK:
            raise ValueError(f"unknown generator tag {self.tag!r}")
        if len(self.idx) != _INDEXED.get(self.tag, 0):
            raise ValueError(f"generator {self.tag} takes {_INDEXED.get(self.tag, 0)} indices")
        if any((not isinstance(k, int)) or k < 1 for k in self.idx):
            raise ValueError(f"generator indices must be positive integers: {self.idx}")

    def sort_key(self):
        return (_TAG_RANK[self.tag], self.idx)

    def __lt__(self, other: "Gen") -> bool:
        return self.sort_key() < other.sort_key()

    @property
    def name(self) -> str:
        if self.tag == "DY":
            return f"DY{self.idx[0]}_{self.idx[1]}"
        if self.idx:
            return f"{self.tag}{self.idx[0]}"
        return self.tag

    def __repr__(self) -> str:
        return self.name

    @classmethod
    def from_name(cls, name: str) -> "Gen":
        m = re.fullmatch(r"DY(\d+)_(\d+)", name)
        if m:
            return cls("DY", (int(m.group(1)), int(m.group(2))))
        m = re.fullmatch(r"([XY])(\d+)", name)
        if m:
            return cls(m.group(1), (int(m.group(2)),))
        return cls(name)


# A monomial is a sorted tuple of (Gen, positive power).
Monomial = tuple


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    powers: dict = dict(a)
    for g, p in b:
        powers[g] = powers.get(g, 0) + p
    return tuple(sorted(powers.items(), key=lambda gp: gp[0].sort_key()))


def _mono_key(m: Monomial):
    # Total degree first, then lexicographic on generator order.
    return (sum(p for _, p in m), tuple((g.sort_key(), p) for g, p in m))


class ExactScalar:
    """Sparse polynomial over Gaussian rationals in formal generators.

    Zero is the empty term dict; zero coefficients are never stored, so two
    equal polynomials always have identical term dicts.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, GaussQ] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                c = GaussQ.coerce(c)
                if c:
                    clean[m] = c
        self.terms = clean
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def const(cls, value) -> "ExactScalar":
        return cls({(): GaussQ.coerce(value)})

    @classmethod
    def gen(cls, g: Gen, power: int = 1) -> "ExactScalar":
        if power < 0:
            raise ValueError("generator powers are non-negative")
        if power == 0:
            return cls.const(1)
        return cls({((g, power),): GaussQ(1)})

    @classmethod
    def coerce(cls, value) -> "ExactScalar":
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, Gen):
            return cls.gen(value)
        return cls.const(value)

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_value(self) -> GaussQ:
        if not self.is_constant():
            raise ValueError(f"{self.to_text()} is not a constant")
        return self.terms.get((), GaussQ(0))

    def generators(self) -> set:
        return {g for m in self.terms for g, _ in m}

    # arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "ExactScalar":
        other = ExactScalar.coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            s = c if s is None else s + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return ExactScalar._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "ExactScalar":
        return ExactScalar._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "ExactScalar":
        return self + (-ExactScalar.coerce(other))

    def __rsub__(self, other) -> "ExactScalar":
        return ExactScalar.coerce(other) - self

    def __mul__(self, other) -> "ExactScalar":
        if isinstance(other, (int, Fraction, GaussQ, complex)):
            c = GaussQ.coerce(other)
            if not c:
                return ZERO
            return ExactScalar._raw({m: v * c for m, v in self.terms.items()})
        other = ExactScalar.coerce(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m)
                out[m] = c1 * c2 if s is None else s + c1 * c2
        return ExactScalar(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExactScalar":
        """Division by a nonzero constant only."""
        if isinstance(other, ExactScalar):
            other = other.constant_value()
        return self * GaussQ.coerce(other).inverse()

    def __pow__(self, k: int) -> "ExactScalar":
        if k < 0:
            raise ValueError("negative powers are not in the ring")
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    @classmethod
    def _raw(cls, terms: dict) -> "ExactScalar":
        obj = cls.__new__(cls)
        obj.terms = terms
        obj._hash = None
        return obj

    # comparison ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactScalar):
            try:
                other = ExactScalar.coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # substitution / evaluation -------------------------------------------
    def subs(self, mapping: Mapping[Gen, "ExactScalar"]) -> "ExactScalar":
        """Replace generators by exact scalars (unlisted generators stay)."""
        out = ZERO
        for m, c in self.terms.items():
            term = ExactScalar.const(c)
            for g, p in m:
                if g in mapping:
                    term = term * ExactScalar.coerce(mapping[g]) ** p
                else:
                    term = term * ExactScalar.gen(g, p)
            out = out + term
        return out

    def evaluate(self, assignment: Mapping[Gen, complex]) -> complex:
        total = 0j
        for m, c in self.terms.items():
            val = complex(c)
            for g, p in m:
                try:
                    val *= complex(assignment[g]) ** p
                except KeyError:
                    raise MissingAssignment(g) from None
            total += val
        return total

    def degree_in(self, gens: Iterable[Gen]) -> set:
        """Set of total degrees, over all terms, in the given generators."""
        gens = set(gens)
        return {sum(p for g, p in m if g in gens) for m in self.terms}

    def coefficient(self, g: Gen, power: int = 1) -> "ExactScalar":
        """Coefficient of ``g**power`` (terms with exactly that power of g)."""
        out = {}
        for m, c in self.terms.items():
            pw = dict(m).get(g, 0)
            if pw == power:
                out[tuple(gp for gp in m if gp[0] != g)] = c
        return ExactScalar(out)

    # text ---------------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: _mono_key(mc[0]))

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = [f"{g.name}^{p}" if p > 1 else g.name for g, p in m]
            if not factors:
                parts.append(c.to_text())
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(c.to_text() + "*" + "*".join(factors))
        text = parts[0]
        for p in parts[1:]:
            text += " - " + p[1:] if p.startswith("-") else " + " + p
        return text

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"ExactScalar({self.to_text()!r})"

    @classmethod
    def parse(cls, text: str) -> "ExactScalar":
        """Parse the text form produced by :meth:`to_text` (and similar input)."""
        return _Parser(text).parse()


ZERO = ExactScalar()
ONE = ExactScalar.const(1)
I = ExactScalar.const(GaussQ(0, 1))

PI = Gen("pi")
HP0 = Gen("hp0")
RIC_XY = Gen("Ric")
SCALAR_S = Gen("s")
G_XY = Gen("gXY")
G_XTYT = Gen("gXTYT")


def X(j: int) -> Gen:
    return Gen("X", (j,))


def Y(l: int) -> Gen:
    return Gen("Y", (l,))


def DY(j: int, l: int) -> Gen:
    """``dY_l/dx_j`` at the boundary point."""
    return Gen("DY", (j, l))


def es_eval(a: ExactScalar, assignment: Mapping[Gen, complex]) -> complex:
    return ExactScalar.coerce(a).evaluate(assignment)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


class _Parser:
    def __init__(self, text: str):
        self.tokens = []
        for num, name, op in _TOKEN.findall(text):
            if num:
                self.tokens.append(("num", int(num)))
            elif name:
                self.tokens.append(("name", name))
            elif op.strip():
                self.tokens.append(("op", op))
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self) -> ExactScalar:
        value = self.expr()
        if self.pos != len(self.tokens):
            raise ValueError(f"trailing input at token {self.peek()}")
        return value

    def expr(self) -> ExactScalar:
        value = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> ExactScalar:
        value = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            value = value * rhs if op == "*" else value / rhs
        return value

    def unary(self) -> ExactScalar:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        return self.power()

    def power(self) -> ExactScalar:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, k = self.take()
            if kind != "num":
                raise ValueError("exponent must be a non-negative integer")
            base = base ** k
        return base

    def atom(self) -> ExactScalar:
        kind, val = self.take()
        if kind == "num":
            return ExactScalar.const(val)
        if kind == "name":
            if val == "I":
                return I
            return ExactScalar.gen(Gen.from_name(val))
        if (kind, val) == ("op", "("):
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise ValueError("unbalanced parenthesis")
            return inner
        raise ValueError(f"unexpected token {val!r}")
