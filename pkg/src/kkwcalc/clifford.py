"""Clifford algebra of an orthonormal frame, with the spinor trace.

Generators satisfy ``c(e_i) c(e_j) + c(e_j) c(e_i) = -2 delta_ij``.  Words are
stored as bitmasks (bit ``i-1`` set when ``c(e_i)`` occurs), which makes the
canonical strictly-increasing form implicit.
"""

from __future__ import annotations

from typing import Mapping

from .scalar import ExactScalar, ONE, ZERO

__all__ = [
    "DimensionMismatch",
    "CliffordElement",
    "word_indices",
    "word_from_indices",
    "cl_mul",
    "cl_trace",
    "c",
]


class DimensionMismatch(ValueError):
    pass


def word_indices(mask: int) -> tuple:
    out, i = [], 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def word_from_indices(indices) -> tuple[int, int]:
    """Reduce an arbitrary index sequence to ``(sign, mask)``."""
    sign, mask = 1, 0
    for i in indices:
        s, mask = _word_mul(mask, 1 << (i - 1))
        sign *= s
    return sign, mask


def _word_mul(a: int, b: int) -> tuple[int, int]:
    """Product of two canonical words: ``(sign, mask)``.

    Moving each generator of ``b`` leftwards past the higher generators of
    ``a`` costs one sign flip per transposition; every shared generator
    then squares to -1.
    """
    swaps = 0
    t = a >> 1
    while t:
        swaps += bin(t & b).count("1")
        t >>= 1
    swaps += bin(a & b).count("1")
    return (-1 if swaps & 1 else 1), a ^ b


class CliffordElement:
    """Finite sum of canonical words with :class:`ExactScalar` weights."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[int, ExactScalar] | None = None):
        self.n = n
        clean = {}
        if terms:
            limit = 1 << n
            for w, coef in terms.items():
                if w >= limit:
                    raise DimensionMismatch(f"word {word_indices(w)} exceeds dimension {n}")
                coef = ExactScalar.coerce(coef)
                if coef:
                    clean[w] = coef
        self.terms = clean

    @classmethod
    def scalar(cls, n: int, value) -> "CliffordElement":
        return cls(n, {0: ExactScalar.coerce(value)})

    @classmethod
    def word(cls, n: int, indices, coef=ONE) -> "CliffordElement":
        sign, mask = word_from_indices(indices)
        return cls(n, {mask: ExactScalar.coerce(coef) * sign})

    @classmethod
    def _raw(cls, n: int, terms: dict) -> "CliffordElement":
        obj = cls.__new__(cls)
        obj.n = n
        obj.terms = terms
        return obj

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_scalar(self) -> bool:
        return all(w == 0 for w in self.terms)

    def scalar_part(self) -> ExactScalar:
        return self.terms.get(0, ZERO)

    def _check(self, other: "CliffordElement"):
        if self.n != other.n:
            raise DimensionMismatch(f"dimensions {self.n} and {other.n} differ")

    def __add__(self, other: "CliffordElement") -> "CliffordElement":
        self._check(other)
        out = dict(self.terms)
        for w, coef in other.terms.items():
            s = out.get(w)
            s = coef if s is None else s + coef
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return CliffordElement._raw(self.n, out)

    def __neg__(self) -> "CliffordElement":
        return CliffordElement._raw(self.n, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "CliffordElement") -> "CliffordElement":
        return self + (-other)

    def scale(self, s) -> "CliffordElement":
        s = ExactScalar.coerce(s)
        if not s:
            return CliffordElement(self.n)
        return CliffordElement(self.n, {w: c * s for w, c in self.terms.items()})

    def __mul__(self, other) -> "CliffordElement":
        if not isinstance(other, CliffordElement):
            return self.scale(other)
        return cl_mul(self, other)

    def __rmul__(self, other) -> "CliffordElement":
        return self.scale(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CliffordElement):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    def map_coefficients(self, fn) -> "CliffordElement":
        return CliffordElement(self.n, {w: fn(c) for w, c in self.terms.items()})

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms, key=lambda m: (bin(m).count("1"), word_indices(m))):
            coef = self.terms[w].to_text()
            if w == 0:
                parts.append(coef)
            else:
                word = "".join(f"c(e_{i})" for i in word_indices(w))
                parts.append(word if coef == "1" else f"({coef})*{word}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"CliffordElement(n={self.n}, {self.to_text()})"


def c(n: int, i: int) -> CliffordElement:
    """The generator ``c(e_i)``."""
    if not 1 <= i <= n:
        raise DimensionMismatch(f"index {i} outside 1..{n}")
    return CliffordElement(n, {1 << (i - 1): ONE})


def cl_mul(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    a._check(b)
    out: dict = {}
    for wa, ca in a.terms.items():
        for wb, cb in b.terms.items():
            sign, w = _word_mul(wa, wb)
            prod = ca * cb
            if sign < 0:
                prod = -prod
            s = out.get(w)
            out[w] = prod if s is None else s + prod
    return CliffordElement(a.n, out)


def rep_dim(n: int) -> int:
    return 2 ** (n // 2)


def cl_trace(a: CliffordElement, rep_dimension: int | None = None) -> ExactScalar:
    """Spinor trace: ``rep_dim`` times the identity-word coefficient.

    Every nonempty canonical word is traceless.  At odd ``n`` the top word is
    central and this no longer holds in an irreducible representation; only
    even ``n`` is supported.
    """
    if a.n % 2:
        raise DimensionMismatch("the spinor trace is only defined here for even n")
    d = rep_dim(a.n) if rep_dimension is None else rep_dimension
    return a.scalar_part() * d
