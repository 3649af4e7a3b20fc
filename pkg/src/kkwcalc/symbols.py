"""Graded pseudodifferential symbols at a boundary point.

A symbol component is ``N(xi) / |xi|^(2k)`` where ``N`` is a polynomial in
``xi_1..xi_n`` with Clifford-valued exact coefficients and ``|xi|^2`` is the
squared norm at the boundary point (``h(0) = 1``).  Dependence on the normal
coordinate ``x_n`` is carried as a first-order jet: the value at ``x_n = 0``
and the first ``x_n``-derivative there.  Asking for more raises
:class:`JetExhausted`.

Restricting to ``|xi'| = 1`` produces a :class:`LineSymbol`, a rational
function of ``xi_n`` whose only poles are ``xi_n = +i`` and ``xi_n = -i``.
"""

from __future__ import annotations

import itertools
from math import comb, factorial
from typing import Iterable, Mapping

from .clifford import CliffordElement, _word_mul, word_indices
from .scalar import ExactScalar, GaussQ, ONE, ZERO

__all__ = [
    "JetExhausted",
    "CutoffTooDeep",
    "NotInvertible",
    "CPoly",
    "Rat",
    "FullSymbol",
    "GradedSymbol",
    "LineSymbol",
    "TangentialPoly",
    "sym_deriv_xi",
    "sym_deriv_xn",
    "sym_deriv_x",
    "sym_compose",
    "sym_invert",
    "sym_restrict",
]

IMAG = GaussQ(0, 1)


class JetExhausted(ValueError):
    """A second (or otherwise unavailable) x-derivative was requested."""


class CutoffTooDeep(ValueError):
    pass


class NotInvertible(ValueError):
    pass


def _add_into(out: dict, key, value: ExactScalar):
    s = out.get(key)
    s = value if s is None else s + value
    if s:
        out[key] = s
    else:
        out.pop(key, None)


# ---------------------------------------------------------------------------
# Clifford-valued polynomials in xi
# ---------------------------------------------------------------------------


class CPoly:
    """Polynomial in ``xi_1..xi_n``; terms keyed by ``(exponents, word)``."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping | None = None):
        self.n = n
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def _raw(cls, n, terms):
        obj = cls.__new__(cls)
        obj.n = n
        obj.terms = terms
        return obj

    @classmethod
    def zero(cls, n: int) -> "CPoly":
        return cls._raw(n, {})

    @classmethod
    def const(cls, n: int, value, word: int = 0) -> "CPoly":
        return cls(n, {((0,) * n, word): ExactScalar.coerce(value)})

    @classmethod
    def xi(cls, n: int, axis: int) -> "CPoly":
        e = [0] * n
        e[axis - 1] = 1
        return cls._raw(n, {(tuple(e), 0): ONE})

    @classmethod
    def from_clifford(cls, el: CliffordElement) -> "CPoly":
        z = (0,) * el.n
        return cls._raw(el.n, {(z, w): c for w, c in el.terms.items()})

    @classmethod
    def norm2(cls, n: int) -> "CPoly":
        """``|xi|^2`` at the boundary point."""
        out = {}
        for a in range(n):
            e = [0] * n
            e[a] = 2
            out[(tuple(e), 0)] = ONE
        return cls._raw(n, out)

    @classmethod
    def tangential_norm2(cls, n: int) -> "CPoly":
        out = {}
        for a in range(n - 1):
            e = [0] * n
            e[a] = 2
            out[(tuple(e), 0)] = ONE
        return cls._raw(n, out)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, CPoly) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __add__(self, other: "CPoly") -> "CPoly":
        if not other.terms:
            return self
        out = dict(self.terms)
        for k, v in other.terms.items():
            _add_into(out, k, v)
        return CPoly._raw(self.n, out)

    def __neg__(self) -> "CPoly":
        return CPoly._raw(self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "CPoly") -> "CPoly":
        return self + (-other)

    def scale(self, s) -> "CPoly":
        s = ExactScalar.coerce(s)
        if not s:
            return CPoly.zero(self.n)
        return CPoly(self.n, {k: v * s for k, v in self.terms.items()})

    def __mul__(self, other) -> "CPoly":
        if not isinstance(other, CPoly):
            return self.scale(other)
        out: dict = {}
        for (e1, w1), c1 in self.terms.items():
            for (e2, w2), c2 in other.terms.items():
                sign, w = _word_mul(w1, w2)
                prod = c1 * c2
                if sign < 0:
                    prod = -prod
                e = tuple(a + b for a, b in zip(e1, e2))
                _add_into(out, (e, w), prod)
        return CPoly._raw(self.n, out)

    def __pow__(self, k: int) -> "CPoly":
        out = CPoly.const(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def deriv(self, axis: int) -> "CPoly":
        a = axis - 1
        out = {}
        for (e, w), c in self.terms.items():
            if e[a]:
                e2 = list(e)
                e2[a] -= 1
                out[(tuple(e2), w)] = c * e[a]
        return CPoly._raw(self.n, out)

    def map_coefficients(self, fn) -> "CPoly":
        return CPoly(self.n, {k: fn(v) for k, v in self.terms.items()})

    def degrees(self) -> set:
        return {sum(e) for e, _ in self.terms}

    def div_norm2(self) -> "CPoly | None":
        """Exact quotient by ``|xi|^2``, or ``None`` if it does not divide."""
        n = self.n
        work = dict(self.terms)
        quotient: dict = {}
        r = [(tuple(2 if b == a else 0 for b in range(n)), ONE) for a in range(n - 1)]
        while True:
            top = max((e[-1] for e, _ in work), default=-1)
            if top < 2:
                break
            for (e, w), c in [(k, v) for k, v in work.items() if k[0][-1] == top]:
                del work[(e, w)]
                eq = e[:-1] + (e[-1] - 2,)
                _add_into(quotient, (eq, w), c)
                for er, _ in r:
                    enew = tuple(x + y for x, y in zip(eq, er))
                    _add_into(work, (enew, w), -c)
        if work:
            return None
        return CPoly._raw(n, quotient)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (e, w), c in sorted(self.terms.items(), key=lambda kv: (sum(kv[0][0]), kv[0])):
            factors = []
            for a, p in enumerate(e, start=1):
                if p == 1:
                    factors.append(f"xi_{a}")
                elif p > 1:
                    factors.append(f"xi_{a}^{p}")
            factors += [f"c(e_{i})" for i in word_indices(w)]
            coef = c.to_text()
            body = "*".join(factors)
            parts.append(f"({coef})*{body}" if body else f"({coef})")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# N / |xi|^(2k)
# ---------------------------------------------------------------------------


class Rat:
    """``num / |xi|^(2k)`` with every removable ``|xi|^2`` factor cancelled."""

    __slots__ = ("num", "k")

    def __init__(self, num: CPoly, k: int = 0, *, reduce: bool = True):
        if k < 0:
            num = num * CPoly.norm2(num.n) ** (-k)
            k = 0
        if reduce:
            while k > 0 and num.terms:
                q = num.div_norm2()
                if q is None:
                    break
                num, k = q, k - 1
        if not num.terms:
            k = 0
        self.num = num
        self.k = k

    @property
    def n(self) -> int:
        return self.num.n

    @classmethod
    def zero(cls, n: int) -> "Rat":
        return cls(CPoly.zero(n), 0)

    def is_zero(self) -> bool:
        return not self.num.terms

    def __eq__(self, other):
        return isinstance(other, Rat) and self.k == other.k and self.num == other.num

    def __hash__(self):
        return hash((self.k, self.num))

    def _lift(self, k: int) -> CPoly:
        if k == self.k:
            return self.num
        return self.num * CPoly.norm2(self.n) ** (k - self.k)

    def __add__(self, other: "Rat") -> "Rat":
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        k = max(self.k, other.k)
        return Rat(self._lift(k) + other._lift(k), k)

    def __neg__(self) -> "Rat":
        return Rat(-self.num, self.k, reduce=False)

    def __sub__(self, other: "Rat") -> "Rat":
        return self + (-other)

    def __mul__(self, other) -> "Rat":
        if isinstance(other, Rat):
            return Rat(self.num * other.num, self.k + other.k)
        return Rat(self.num.scale(other), self.k, reduce=False)

    def deriv(self, axis: int) -> "Rat":
        # d(N |xi|^-2k) = (|xi|^2 dN - 2k xi_a N) |xi|^-(2k+2)
        dn = self.num.deriv(axis)
        if self.k == 0:
            return Rat(dn, 0, reduce=False)
        top = CPoly.norm2(self.n) * dn - (CPoly.xi(self.n, axis) * self.num).scale(2 * self.k)
        return Rat(top, self.k + 1)

    def order(self) -> int | None:
        degs = self.num.degrees()
        if not degs:
            return None
        if len(degs) != 1:
            raise ValueError(f"inhomogeneous numerator, degrees {sorted(degs)}")
        return degs.pop() - 2 * self.k

    def euler(self) -> "Rat":
        """``sum_a xi_a d/dxi_a`` applied to this rational function."""
        out = Rat.zero(self.n)
        for a in range(1, self.n + 1):
            out = out + Rat(CPoly.xi(self.n, a), 0) * self.deriv(a)
        return out

    def to_text(self) -> str:
        body = self.num.to_text()
        if self.k == 0:
            return body
        return f"[{body}]*|xi|^(-{2 * self.k})"


# ---------------------------------------------------------------------------
# Full symbols with x_n jets
# ---------------------------------------------------------------------------


class FullSymbol:
    """A symbol component at the boundary point with its first ``x_n`` jet.

    Parameters
    ----------
    value : Rat
        The component at ``x_n = 0``.
    dxn : Rat or None
        Its first ``x_n``-derivative at ``x_n = 0``; ``None`` when the jet is
        not available from first-order collar data.
    xprime_flat : bool
        True when the tangential ``x'``-derivatives vanish at the boundary
        point (boundary normal coordinates, metric-only dependence).
    """

    __slots__ = ("value", "dxn", "xprime_flat")

    def __init__(self, value: Rat, dxn: Rat | None = None, xprime_flat: bool = True):
        self.value = value
        self.dxn = dxn
        self.xprime_flat = xprime_flat

    @property
    def n(self) -> int:
        return self.value.n

    @classmethod
    def zero(cls, n: int) -> "FullSymbol":
        return cls(Rat.zero(n), Rat.zero(n), True)

    @classmethod
    def constant(cls, n: int, value) -> "FullSymbol":
        if isinstance(value, CliffordElement):
            poly = CPoly.from_clifford(value)
        else:
            poly = CPoly.const(n, value)
        return cls(Rat(poly, 0), Rat.zero(n), True)

    def is_zero(self) -> bool:
        """Zero value with a known zero jet."""
        return self.value.is_zero() and self.dxn is not None and self.dxn.is_zero()

    def __eq__(self, other):
        return (
            isinstance(other, FullSymbol)
            and self.value == other.value
            and self.dxn == other.dxn
        )

    def __hash__(self):
        return hash((self.value, self.dxn))

    def __add__(self, other: "FullSymbol") -> "FullSymbol":
        dxn = None if self.dxn is None or other.dxn is None else self.dxn + other.dxn
        return FullSymbol(self.value + other.value, dxn, self.xprime_flat and other.xprime_flat)

    def __neg__(self) -> "FullSymbol":
        return FullSymbol(-self.value, None if self.dxn is None else -self.dxn, self.xprime_flat)

    def __sub__(self, other: "FullSymbol") -> "FullSymbol":
        return self + (-other)

    def scale(self, s) -> "FullSymbol":
        return FullSymbol(
            self.value * s, None if self.dxn is None else self.dxn * s, self.xprime_flat
        )

    def __mul__(self, other) -> "FullSymbol":
        if not isinstance(other, FullSymbol):
            return self.scale(other)
        value = self.value * other.value
        if self.dxn is None or other.dxn is None:
            # A vanishing factor needs no jet from its partner.
            if self.value.is_zero() and self.dxn is not None and self.dxn.is_zero():
                dxn = Rat.zero(self.n)
            elif other.value.is_zero() and other.dxn is not None and other.dxn.is_zero():
                dxn = Rat.zero(self.n)
            else:
                dxn = None
        else:
            dxn = self.dxn * other.value + self.value * other.dxn
        return FullSymbol(value, dxn, self.xprime_flat and other.xprime_flat)

    def order(self) -> int | None:
        return self.value.order()

    def to_text(self) -> str:
        return self.value.to_text()

    def __repr__(self) -> str:
        return f"FullSymbol({self.value.to_text()})"


def sym_deriv_xi(s: FullSymbol, axis: int) -> FullSymbol:
    return FullSymbol(
        s.value.deriv(axis),
        None if s.dxn is None else s.dxn.deriv(axis),
        s.xprime_flat,
    )


def sym_deriv_xn(s: FullSymbol) -> FullSymbol:
    """``d/dx_n`` at the boundary point.  The result carries no further jet."""
    if s.dxn is None:
        raise JetExhausted("x_n-derivative not available at first jet order")
    if s.dxn.is_zero() and s.value.is_zero():
        return FullSymbol.zero(s.n)
    return FullSymbol(s.dxn, None, s.xprime_flat)


def sym_deriv_x(s: FullSymbol, axis: int) -> FullSymbol:
    """``d/dx_axis``; tangential axes vanish for ``xprime_flat`` symbols."""
    if axis == s.n:
        return sym_deriv_xn(s)
    if s.xprime_flat:
        if s.value.is_zero() and s.dxn is not None and s.dxn.is_zero():
            return FullSymbol.zero(s.n)
        return FullSymbol(Rat.zero(s.n), None, True)
    raise JetExhausted(f"tangential x_{axis}-derivative of a non-flat symbol")


# ---------------------------------------------------------------------------
# Graded symbols
# ---------------------------------------------------------------------------


class GradedSymbol:
    """Homogeneous components keyed by order.

    ``partial`` lists orders whose component is known to be incomplete (a
    term needing higher jets was left out); composition refuses to let such
    a component reach the requested cutoff.
    """

    def __init__(self, n: int, components: Mapping[int, FullSymbol], partial: Iterable[int] = ()):
        self.n = n
        self.components = {m: s for m, s in components.items() if not s.is_zero()}
        self.partial = frozenset(partial)
        for m, s in self.components.items():
            got = s.order()
            if got is not None and got != m:
                raise ValueError(f"component stored at order {m} has order {got}")

    def __getitem__(self, m: int) -> FullSymbol:
        return self.components.get(m, FullSymbol.zero(self.n))

    def orders(self) -> list:
        return sorted(self.components, reverse=True)

    def leading_order(self) -> int:
        if not self.components:
            raise ValueError("zero symbol has no leading order")
        return max(self.components)

    def scale(self, s) -> "GradedSymbol":
        return GradedSymbol(self.n, {m: c.scale(s) for m, c in self.components.items()}, self.partial)

    def __eq__(self, other):
        if not isinstance(other, GradedSymbol):
            return NotImplemented
        keys = set(self.components) | set(other.components)
        return all(self[m] == other[m] for m in keys)

    def to_text(self) -> str:
        return "\n".join(f"sigma_{m}: {self[m].to_text()}" for m in self.orders())


def _multi_indices(n: int, size: int):
    for combo in itertools.combinations_with_replacement(range(1, n + 1), size):
        yield combo


def _alpha_factorial(combo) -> int:
    out = 1
    for a in set(combo):
        out *= factorial(combo.count(a))
    return out


def _apply_dx(b: FullSymbol, combo) -> FullSymbol:
    """``D_x^alpha b`` with ``D = -i d``."""
    out = b
    for axis in combo:
        out = sym_deriv_x(out, axis)
    return out.scale(GaussQ(0, -1) ** len(combo))


MAX_ALPHA = 2


def sym_compose(A: GradedSymbol, B: GradedSymbol, cutoff: int) -> GradedSymbol:
    """``sigma(A o B)`` down to order ``cutoff``.

    ``sum_alpha 1/alpha! d_xi^alpha a_r * D_x^alpha b_l`` with ``|alpha| <= 2``;
    raises :class:`CutoffTooDeep` if a dropped term could reach the cutoff
    or if the needed jets are unavailable.
    """
    if A.n != B.n:
        raise ValueError("dimension mismatch")
    n = A.n
    if not A.components or not B.components:
        return GradedSymbol(n, {})
    top = max(A.components) + max(B.components)
    if top - (MAX_ALPHA + 1) >= cutoff:
        raise CutoffTooDeep(f"terms with |alpha| > {MAX_ALPHA} reach order {top - MAX_ALPHA - 1}")
    for m in A.partial | B.partial:
        partner = max(B.components) if m in A.partial else max(A.components)
        if m + partner >= cutoff:
            raise CutoffTooDeep(f"incomplete component of order {m} would reach order {m + partner}")
    out: dict = {}
    for r, a in A.components.items():
        for l, b in B.components.items():
            for size in range(MAX_ALPHA + 1):
                order = r + l - size
                if order < cutoff:
                    continue
                for combo in _multi_indices(n, size):
                    da = a
                    for axis in combo:
                        da = sym_deriv_xi(da, axis)
                    if da.is_zero():
                        continue
                    try:
                        db = _apply_dx(b, combo)
                    except JetExhausted as exc:
                        raise CutoffTooDeep(str(exc)) from exc
                    if db.is_zero():
                        continue
                    term = (da * db).scale(GaussQ(1, 0) / _alpha_factorial(combo))
                    out[order] = out[order] + term if order in out else term
    return GradedSymbol(n, out)


def _invert_rat(p: Rat) -> Rat:
    """Inverse of ``N / |xi|^2k`` when ``N^2 = c |xi|^2j`` for a constant ``c``."""
    sq = Rat(p.num * p.num, 0)
    # pull |xi|^2 factors out of N^2
    j, rest = 0, sq.num
    while rest.terms:
        q = rest.div_norm2()
        if q is None:
            break
        rest, j = q, j + 1
    if len(rest.terms) != 1:
        raise NotInvertible(f"N^2 is not a scalar multiple of |xi|^2j: {rest.to_text()}")
    (e, w), coef = next(iter(rest.terms.items()))
    if w != 0 or any(e) or not coef.is_constant():
        raise NotInvertible(f"N^2 reduces to {rest.to_text()}")
    inv_c = coef.constant_value().inverse()
    # p^-1 = N |xi|^2k / (c |xi|^2j)
    return Rat(p.num.scale(ExactScalar.const(inv_c)), j - p.k)


def _invert_full(p: FullSymbol) -> FullSymbol:
    inv = _invert_rat(p.value)
    if p.dxn is None:
        dxn = None
    else:
        dxn = -(inv * p.dxn * inv)
    return FullSymbol(inv, dxn, p.xprime_flat)


def sym_invert(p: GradedSymbol, cutoff: int) -> GradedSymbol:
    """Parametrix symbol ``q`` with ``sigma(p o q) = 1`` down to order ``cutoff``.

    ``q_{-m} = p_m^{-1}`` and each lower ``q`` solves the order-by-order
    identity; for a first-order ``p`` the first two steps are
    ``q_{-1} = p_1^{-1}`` and
    ``q_{-2} = -p_1^{-1} [p_0 p_1^{-1} + sum_j d_xi_j p_1 D_x_j p_1^{-1}]``.
    """
    n = p.n
    m = p.leading_order()
    lead_inv = _invert_full(p[m])
    q = GradedSymbol(n, {-m: lead_inv})
    for order in range(-m - 1, cutoff - 1, -1):
        # order-(order+m) part of p o q, q's unknown component still zero
        partial = sym_compose(p, q, order + m)
        rhs = partial.components.get(order + m)
        if rhs is None:
            continue
        step = -(lead_inv * rhs)
        if not step.is_zero():
            comps = dict(q.components)
            comps[order] = step
            q = GradedSymbol(n, comps)
    return q


# ---------------------------------------------------------------------------
# Restriction to |xi'| = 1
# ---------------------------------------------------------------------------


def _shift_mul(num: dict, root: GaussQ, power: int) -> dict:
    """Multiply a line numerator by ``(xi_n - root)^power``."""
    for _ in range(power):
        out: dict = {}
        for (d, t, w), c in num.items():
            _add_into(out, (d + 1, t, w), c)
            _add_into(out, (d, t, w), c * (-root))
        num = out
    return num


def _blocks(num: dict) -> dict:
    out: dict = {}
    for (d, t, w), c in num.items():
        out.setdefault((t, w), {})[d] = c
    return out


def _eval_block(block: Mapping[int, ExactScalar], point: GaussQ) -> ExactScalar:
    total = ZERO
    for d, c in block.items():
        total = total + c * point ** d
    return total


def _divide_linear(num: dict, root: GaussQ) -> dict:
    """Exact quotient by ``(xi_n - root)`` (caller checked the root)."""
    out: dict = {}
    for (t, w), block in _blocks(num).items():
        top = max(block)
        carry = ZERO
        for d in range(top, 0, -1):
            carry = block.get(d, ZERO) + carry * root
            if carry:
                out[(d - 1, t, w)] = carry
    return out


class LineSymbol:
    """``N(xi_n) / ((xi_n - i)^a (xi_n + i)^b)`` on ``|xi'| = 1``.

    ``num`` maps ``(power of xi_n, tangential exponents, Clifford word)`` to
    exact coefficients; tangential monomials are kept for the sphere
    integral.  Common factors with the denominator are always cancelled.
    """

    __slots__ = ("n", "num", "a", "b")

    def __init__(self, n: int, num: Mapping, a: int = 0, b: int = 0, *, reduce: bool = True):
        if a < 0 or b < 0:
            raise ValueError("pole orders must be non-negative")
        num = {k: v for k, v in num.items() if v}
        if reduce:
            num, a, b = _cancel(num, a, b)
        if not num:
            a = b = 0
        self.n = n
        self.num = num
        self.a = a
        self.b = b

    @classmethod
    def zero(cls, n: int) -> "LineSymbol":
        return cls(n, {}, 0, 0)

    @classmethod
    def constant(cls, n: int, value, word: int = 0) -> "LineSymbol":
        return cls(n, {(0, (0,) * (n - 1), word): ExactScalar.coerce(value)})

    @classmethod
    def from_scalar_poly(cls, n: int, coeffs: Iterable, a: int = 0, b: int = 0) -> "LineSymbol":
        """Scalar numerator from a coefficient list (lowest power first)."""
        t0 = (0,) * (n - 1)
        num = {(d, t0, 0): ExactScalar.coerce(c) for d, c in enumerate(coeffs)}
        return cls(n, num, a, b)

    def is_zero(self) -> bool:
        return not self.num

    def __eq__(self, other):
        return (
            isinstance(other, LineSymbol)
            and self.n == other.n
            and (self.a, self.b) == (other.a, other.b)
            and self.num == other.num
        )

    def __hash__(self):
        return hash((self.n, self.a, self.b, frozenset(self.num.items())))

    @property
    def poles(self) -> tuple[int, int]:
        return self.a, self.b

    def numerator_degree(self) -> int:
        return max((d for d, _, _ in self.num), default=-1)

    def _lift(self, a: int, b: int) -> dict:
        """Numerator over ``(xi_n - i)^a (xi_n + i)^b``; always a fresh dict."""
        num = _shift_mul(self.num, IMAG, a - self.a)
        return dict(_shift_mul(num, -IMAG, b - self.b))

    def __add__(self, other: "LineSymbol") -> "LineSymbol":
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        a, b = max(self.a, other.a), max(self.b, other.b)
        num = self._lift(a, b)
        for k, v in other._lift(a, b).items():
            _add_into(num, k, v)
        return LineSymbol(self.n, num, a, b)

    def __neg__(self) -> "LineSymbol":
        return LineSymbol(self.n, {k: -v for k, v in self.num.items()}, self.a, self.b, reduce=False)

    def __sub__(self, other: "LineSymbol") -> "LineSymbol":
        return self + (-other)

    def scale(self, s) -> "LineSymbol":
        s = ExactScalar.coerce(s)
        return LineSymbol(self.n, {k: v * s for k, v in self.num.items()}, self.a, self.b)

    def __mul__(self, other) -> "LineSymbol":
        if not isinstance(other, LineSymbol):
            return self.scale(other)
        out: dict = {}
        for (d1, t1, w1), c1 in self.num.items():
            for (d2, t2, w2), c2 in other.num.items():
                sign, w = _word_mul(w1, w2)
                prod = c1 * c2
                if sign < 0:
                    prod = -prod
                _add_into(out, (d1 + d2, tuple(x + y for x, y in zip(t1, t2)), w), prod)
        return LineSymbol(self.n, out, self.a + other.a, self.b + other.b)

    def deriv(self) -> "LineSymbol":
        """``d/dxi_n``."""
        # (N/((x-i)^a (x+i)^b))' = [N'(x^2+1) - a N (x+i) - b N (x-i)] / ((x-i)^(a+1) (x+i)^(b+1))
        dn: dict = {}
        for (d, t, w), c in self.num.items():
            if d:
                _add_into(dn, (d - 1, t, w), c * d)
        top = _shift_mul(_shift_mul(dn, IMAG, 1), -IMAG, 1)
        if self.a:
            for k, v in _shift_mul(self.num, -IMAG, 1).items():
                _add_into(top, k, v * (-self.a))
        if self.b:
            for k, v in _shift_mul(self.num, IMAG, 1).items():
                _add_into(top, k, v * (-self.b))
        return LineSymbol(self.n, top, self.a + 1, self.b + 1)

    def deriv_n(self, k: int) -> "LineSymbol":
        out = self
        for _ in range(k):
            out = out.deriv()
        return out

    def trace(self, rep_dimension: int) -> "LineSymbol":
        """Spinor trace: identity-word blocks times ``rep_dimension``."""
        num = {k: v * rep_dimension for k, v in self.num.items() if k[2] == 0}
        return LineSymbol(self.n, num, self.a, self.b)

    def is_scalar(self) -> bool:
        return all(w == 0 for _, _, w in self.num)

    def value_at(self, point: GaussQ) -> dict:
        """Exact value at a point away from the poles, per (tangential, word)."""
        if (point == IMAG and self.a) or (point == -IMAG and self.b):
            raise ZeroDivisionError("evaluation at a pole")
        den = (point - IMAG) ** self.a * (point + IMAG) ** self.b
        inv = den.inverse()
        out = {}
        for key, block in _blocks(self.num).items():
            v = _eval_block(block, point) * inv
            if v:
                out[key] = v
        return out

    def to_text(self) -> str:
        if not self.num:
            return "0"
        parts = []
        for (d, t, w), c in sorted(self.num.items(), key=lambda kv: kv[0]):
            factors = []
            if d == 1:
                factors.append(f"xi_{self.n}")
            elif d > 1:
                factors.append(f"xi_{self.n}^{d}")
            for a, p in enumerate(t, start=1):
                if p == 1:
                    factors.append(f"xi_{a}")
                elif p > 1:
                    factors.append(f"xi_{a}^{p}")
            factors += [f"c(e_{i})" for i in word_indices(w)]
            body = "*".join(factors)
            parts.append(f"({c.to_text()})*{body}" if body else f"({c.to_text()})")
        den = []
        if self.a:
            den.append(f"(xi_{self.n}-i)^{self.a}")
        if self.b:
            den.append(f"(xi_{self.n}+i)^{self.b}")
        top = " + ".join(parts)
        return f"[{top}]/[{'*'.join(den)}]" if den else top

    def __repr__(self):
        return f"LineSymbol({self.to_text()})"


def _cancel(num: dict, a: int, b: int):
    for root, attr in ((IMAG, "a"), (-IMAG, "b")):
        while (a if attr == "a" else b) > 0 and num:
            if any(_eval_block(block, root) for block in _blocks(num).values()):
                break
            num = _divide_linear(num, root)
            if attr == "a":
                a -= 1
            else:
                b -= 1
    return num, a, b


def sym_restrict(s: FullSymbol | Rat) -> LineSymbol:
    """Evaluate at ``|xi'| = 1``: ``|xi|^2k -> (xi_n - i)^k (xi_n + i)^k``."""
    rat = s.value if isinstance(s, FullSymbol) else s
    num: dict = {}
    for (e, w), c in rat.num.terms.items():
        _add_into(num, (e[-1], e[:-1], w), c)
    return LineSymbol(rat.n, num, rat.k, rat.k)


class TangentialPoly:
    """Polynomial in ``xi_1..xi_{n-1}`` with Clifford-word keys over exact scalars."""

    def __init__(self, n: int, terms: Mapping | None = None):
        self.n = n
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    def __eq__(self, other):
        return isinstance(other, TangentialPoly) and self.n == other.n and self.terms == other.terms

    def __add__(self, other: "TangentialPoly") -> "TangentialPoly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            _add_into(out, k, v)
        return TangentialPoly(self.n, out)

    def scale(self, s) -> "TangentialPoly":
        s = ExactScalar.coerce(s)
        return TangentialPoly(self.n, {k: v * s for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (t, w), c in sorted(self.terms.items(), key=lambda kv: kv[0]):
            factors = [f"xi_{a}^{p}" if p > 1 else f"xi_{a}" for a, p in enumerate(t, 1) if p]
            factors += [f"c(e_{i})" for i in word_indices(w)]
            body = "*".join(factors)
            parts.append(f"({c.to_text()})*{body}" if body else f"({c.to_text()})")
        return " + ".join(parts)


def binomial_shift(block: Mapping[int, ExactScalar], root: GaussQ) -> dict:
    """Coefficients of ``N(root + t)`` in powers of ``t``."""
    out: dict = {}
    for d, c in block.items():
        for k in range(d + 1):
            v = c * (comb(d, k) * root ** (d - k))
            s = out.get(k)
            out[k] = v if s is None else s + v
    return {k: v for k, v in out.items() if v}
