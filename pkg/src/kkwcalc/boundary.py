"""Boundary calculus on the line ``|xi'| = 1``.

Partial fractions at ``xi_n = +-i``, the plus-projection (principal part at
the upper pole), contour integrals over a positively oriented loop around
``+i`` and exact monomial moments of the unit sphere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .scalar import PI, ExactScalar, GaussQ, ZERO
from .symbols import (
    IMAG,
    LineSymbol,
    TangentialPoly,
    _add_into,
    _blocks,
    binomial_shift,
)

__all__ = [
    "NonDecaying",
    "BadDimension",
    "PrincipalPartDecomposition",
    "pf_decompose",
    "pi_plus",
    "contour_gamma_plus",
    "sphere_volume",
    "sphere_moment",
    "sphere_integrate",
]


class NonDecaying(ValueError):
    pass


class BadDimension(ValueError):
    pass


def _laurent_at(f: LineSymbol, root: GaussQ, count: int) -> dict:
    """First ``count`` Taylor coefficients of ``(xi_n - root)^order * f`` at ``root``.

    Returns ``{(t, w): [g_0, g_1, ...]}``.
    """
    other = -root
    other_pow = f.b if root == IMAG else f.a
    base = root - other  # value of (xi_n - other) at root
    # (base + t)^(-p) = sum_k binom(-p, k) base^(-p-k) t^k
    series = []
    for k in range(count):
        coef = Fraction(1)
        for j in range(k):
            coef *= Fraction(-other_pow - j, j + 1)
        series.append(GaussQ(coef) * base ** (-other_pow - k))
    out = {}
    for key, block in _blocks(f.num).items():
        shifted = binomial_shift(block, root)
        coeffs = []
        for k in range(count):
            acc = ZERO
            for j in range(k + 1):
                c = shifted.get(j)
                if c is not None:
                    acc = acc + c * series[k - j]
            coeffs.append(acc)
        out[key] = coeffs
    return out


def _principal_part(f: LineSymbol, root: GaussQ) -> dict:
    order = f.a if root == IMAG else f.b
    if order == 0:
        return {}
    taylor = _laurent_at(f, root, order)
    # coefficient of (xi_n - root)^(-m) is g_{order - m}
    return {key: [g[order - m] for m in range(1, order + 1)] for key, g in taylor.items()}


def _principal_symbol(n: int, parts: dict, root: GaussQ) -> LineSymbol:
    """Reassemble ``sum_m c_m (xi_n - root)^-m`` as a LineSymbol."""
    order = max((len(v) for v in parts.values()), default=0)
    num: dict = {}
    for (t, w), coeffs in parts.items():
        for m, c in enumerate(coeffs, start=1):
            if not c:
                continue
            # c_m (xi_n - root)^(order - m)
            p = order - m
            shifted = {}
            for k in range(p + 1):
                shifted[k] = GaussQ(comb(p, k)) * (-root) ** (p - k)
            for k, v in shifted.items():
                _add_into(num, (k, t, w), c * v)
    if root == IMAG:
        return LineSymbol(n, num, order, 0)
    return LineSymbol(n, num, 0, order)


def _poly_divide(f: LineSymbol) -> dict:
    """Quotient of the numerator by ``(xi_n - i)^a (xi_n + i)^b``, per block."""
    den = {0: GaussQ(1)}
    for root, power in ((IMAG, f.a), (-IMAG, f.b)):
        for _ in range(power):
            nxt: dict = {}
            for d, c in den.items():
                nxt[d + 1] = nxt.get(d + 1, GaussQ(0)) + c
                nxt[d] = nxt.get(d, GaussQ(0)) + c * (-root)
            den = nxt
    dd = f.a + f.b
    out: dict = {}
    for (t, w), block in _blocks(f.num).items():
        rem = dict(block)
        top = max(rem, default=-1)
        for d in range(top, dd - 1, -1):
            c = rem.pop(d, None)
            if c is None or not c:
                continue
            q = d - dd
            out[(q, t, w)] = c
            for e, dc in den.items():
                if e == dd:
                    continue
                key = q + e
                rem[key] = rem.get(key, ZERO) - c * dc
    return out


@dataclass(frozen=True)
class PrincipalPartDecomposition:
    """``f = sum c+_m (xi_n-i)^-m + sum c-_m (xi_n+i)^-m + polynomial``.

    Coefficient lists are keyed by ``(tangential exponents, Clifford word)``.
    """

    n: int
    at_plus_i: dict
    at_minus_i: dict
    polynomial_part: LineSymbol

    def plus_part(self) -> LineSymbol:
        return _principal_symbol(self.n, self.at_plus_i, IMAG)

    def minus_part(self) -> LineSymbol:
        return _principal_symbol(self.n, self.at_minus_i, -IMAG)

    def reassemble(self) -> LineSymbol:
        return self.plus_part() + self.minus_part() + self.polynomial_part


def pf_decompose(f: LineSymbol) -> PrincipalPartDecomposition:
    plus = {k: v for k, v in _principal_part(f, IMAG).items() if any(v)}
    minus = {k: v for k, v in _principal_part(f, -IMAG).items() if any(v)}
    poly = LineSymbol(f.n, _poly_divide(f), 0, 0)
    return PrincipalPartDecomposition(f.n, plus, minus, poly)


def pi_plus(f: LineSymbol) -> LineSymbol:
    """Principal part at the upper-half-plane pole ``xi_n = i``."""
    if f.a == 0:
        return LineSymbol.zero(f.n)
    return _principal_symbol(f.n, _principal_part(f, IMAG), IMAG)


def contour_gamma_plus(f: LineSymbol, pole_order: int | None = None) -> TangentialPoly:
    """``int_{Gamma+} f dxi_n = 2 pi i Res_{xi_n = i} f``.

    The residue is the derivative formula
    ``1/(m-1)! d^(m-1)/dxi_n^(m-1) [(xi_n - i)^m f]`` at ``xi_n = i``;
    ``pole_order`` may overestimate ``m``.
    """
    if f.is_zero():
        return TangentialPoly(f.n)
    if f.numerator_degree() >= f.a + f.b:
        raise NonDecaying(
            f"numerator degree {f.numerator_degree()} >= pole order {f.a + f.b}"
        )
    m = f.a if pole_order is None else pole_order
    if m < f.a:
        raise ValueError(f"pole order {m} below the actual order {f.a}")
    if m == 0:
        return TangentialPoly(f.n)
    # g = (xi_n - i)^m f = (xi_n - i)^(m-a) N / (xi_n + i)^b
    g = LineSymbol(f.n, f._lift(m, f.b), 0, f.b, reduce=False)
    g = g.deriv_n(m - 1)
    values = g.value_at(IMAG)
    factor = ExactScalar.const(GaussQ(0, 2) / factorial(m - 1)) * ExactScalar.gen(PI)
    return TangentialPoly(f.n, {key: v * factor for key, v in values.items()})


def sphere_volume(m: int) -> ExactScalar:
    """Volume of the unit sphere ``S^(m-1)`` in ``R^m`` as rational * pi^p."""
    if m < 1:
        raise BadDimension(f"no unit sphere in R^{m}")
    if m % 2 == 0:
        q = m // 2
        return ExactScalar.gen(PI, q) * Fraction(2, factorial(q - 1))
    # 2^((m+1)/2) pi^((m-1)/2) / (m-2)!!
    dfact = 1
    for k in range(m - 2, 0, -2):
        dfact *= k
    return ExactScalar.gen(PI, (m - 1) // 2) * Fraction(2 ** ((m + 1) // 2), dfact)


def sphere_moment(mono, m: int) -> ExactScalar:
    """``int_{S^(m-1)} xi^mono dsigma`` for the unnormalized sphere measure."""
    if m < 2:
        raise BadDimension(f"sphere moments need m >= 2, got {m}")
    mono = tuple(mono)
    if len(mono) != m:
        raise BadDimension(f"monomial has {len(mono)} exponents, expected {m}")
    if any(p % 2 for p in mono):
        return ZERO
    num = 1
    for p in mono:
        for k in range(p - 1, 0, -2):
            num *= k
    big = sum(mono) // 2
    den = 1
    for k in range(big):
        den *= m + 2 * k
    return sphere_volume(m) * Fraction(num, den)


def sphere_integrate(poly: TangentialPoly) -> dict:
    """Integrate a tangential polynomial over ``|xi'| = 1``, per Clifford word."""
    m = poly.n - 1
    out: dict = {}
    for (t, w), c in poly.terms.items():
        mom = sphere_moment(t, m)
        if mom:
            _add_into(out, w, c * mom)
    return out
