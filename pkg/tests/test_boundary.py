import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kkwcalc.boundary import (
    BadDimension,
    NonDecaying,
    contour_gamma_plus,
    pf_decompose,
    pi_plus,
    sphere_integrate,
    sphere_moment,
    sphere_volume,
)
from kkwcalc.oracle import oracle_contour, oracle_sphere
from kkwcalc.scalar import PI, ExactScalar, GaussQ
from kkwcalc.symbols import LineSymbol, TangentialPoly

N = 4
T0 = (0, 0, 0)
KEY = (T0, 0)


def q(re, im=0):
    return ExactScalar.const(GaussQ(re, im))


def half(re, im):
    from fractions import Fraction

    return ExactScalar.const(GaussQ(Fraction(re, 2), Fraction(im, 2)))


def line(coeffs, a, b):
    return LineSymbol.from_scalar_poly(N, coeffs, a, b)


def contour_value(f) -> ExactScalar:
    return contour_gamma_plus(f).terms.get(KEY, ExactScalar())


# -- partial fractions ------------------------------------------------------


def test_pf_inverse_quadratic():
    d = pf_decompose(line([1], 1, 1))
    assert d.at_plus_i == {KEY: [half(0, -1)]}
    assert d.at_minus_i == {KEY: [half(0, 1)]}
    assert d.polynomial_part.is_zero()


def test_pf_after_long_division():
    d = pf_decompose(line([0, 0, 1], 1, 1))
    assert d.polynomial_part == LineSymbol.constant(N, 1)
    assert d.at_plus_i == {KEY: [half(0, 1)]}
    assert d.at_minus_i == {KEY: [half(0, -1)]}


def test_pf_simple_pole():
    d = pf_decompose(line([1], 1, 0))
    assert d.at_plus_i == {KEY: [q(1)]}
    assert d.at_minus_i == {}
    assert d.polynomial_part.is_zero()


# -- plus projection ----------------------------------------------------------


def test_pi_plus_inverse_quadratic():
    assert pi_plus(line([1], 1, 1)) == line([half(0, -1)], 1, 0)


def test_pi_plus_odd_numerator():
    assert pi_plus(line([0, 1], 1, 1)) == line([half(1, 0)], 1, 0)


def test_pi_plus_tangential_block():
    num = {(0, (1, 1, 0), 0): q(-1)}
    f = LineSymbol(N, num, 1, 1)
    assert pi_plus(f) == LineSymbol(N, {(0, (1, 1, 0), 0): half(0, 1)}, 1, 0)


def test_pi_plus_normal_normal_block():
    # -xi_n^2 / (1 + xi_n^2) keeps -i/2 at the upper pole
    assert pi_plus(line([0, 0, -1], 1, 1)) == line([half(0, -1)], 1, 0)


def test_pi_plus_kills_lower_and_polynomial_parts():
    assert pi_plus(line([1, 2, 3], 0, 2)).is_zero()
    assert pi_plus(line([5], 0, 0)).is_zero()


# -- contour ----------------------------------------------------------------


def test_contour_simple_pole():
    assert contour_value(line([1], 1, 0)) == q(0, 2) * ExactScalar.gen(PI)


def test_contour_lower_pole():
    assert contour_gamma_plus(line([1], 0, 1)).is_zero()


def test_contour_fifth_order_pole():
    from fractions import Fraction

    expected = ExactScalar.const(GaussQ(0, Fraction(-5, 32))) * ExactScalar.gen(PI)
    assert contour_value(line([1], 5, 2)) == expected
    assert oracle_contour(line([1], 5, 2)) == pytest.approx(-5j * math.pi / 32, abs=1e-10)


def test_contour_non_decaying():
    with pytest.raises(NonDecaying):
        contour_gamma_plus(line([0, 1], 1, 0))


def test_contour_keeps_tangential_monomials():
    f = LineSymbol(N, {(0, (2, 0, 0), 0): q(1), (0, (0, 1, 1), 0): q(3)}, 1, 1)
    out = contour_gamma_plus(f)
    assert isinstance(out, TangentialPoly)
    assert set(k for k, _ in out.terms) == {(2, 0, 0), (0, 1, 1)}


# -- sphere -----------------------------------------------------------------


def test_sphere_moment_square():
    from fractions import Fraction

    assert sphere_moment((2, 0, 0), 3) == ExactScalar.gen(PI) * Fraction(4, 3)
    assert oracle_sphere((2, 0, 0))[0] == pytest.approx(4 * math.pi / 3, abs=1e-8)


def test_sphere_moment_odd():
    assert sphere_moment((1, 1, 0), 3).is_zero()


def test_sphere_moment_constant():
    assert sphere_moment((0, 0, 0), 3) == ExactScalar.gen(PI) * 4


def test_sphere_volumes():
    assert sphere_volume(2) == ExactScalar.gen(PI) * 2
    assert sphere_volume(4) == ExactScalar.gen(PI, 2) * 2
    assert sphere_volume(5) == ExactScalar.gen(PI, 2) * ExactScalar.const(GaussQ(8, 0)) / 3


def test_bad_dimension():
    with pytest.raises(BadDimension):
        sphere_moment((2,), 1)
    with pytest.raises(BadDimension):
        sphere_moment((2, 0), 3)


def test_sphere_integrate_sums_per_word():
    p = TangentialPoly(N, {((2, 0, 0), 0): q(3), ((0, 0, 2), 0): q(3), ((1, 0, 0), 3): q(1)})
    assert sphere_integrate(p) == {0: ExactScalar.gen(PI) * 8}


@pytest.mark.parametrize("mono", [m for m in itertools.product(range(5), repeat=3) if sum(m) <= 4])
def test_sphere_moments_against_quadrature(mono):
    exact = complex(sphere_moment(mono, 3).evaluate({PI: math.pi}))
    quad, _ = oracle_sphere(mono, 3)
    assert abs(exact - quad) <= 1e-8


@pytest.mark.parametrize("mono", [(2, 0, 0), (2, 2, 0), (0, 0, 4), (1, 1, 0)])
def test_sphere_moments_against_monte_carlo(mono):
    # compared as sphere averages: the standard error of the mean is ~3e-4
    exact = complex(sphere_moment(mono, 3).evaluate({PI: math.pi})).real
    _, mc = oracle_sphere(mono, 3, samples=10**6, seed=11)
    vol = 4 * math.pi
    assert abs(exact - mc) / vol <= 1e-3


def test_sphere_moments_in_other_dimensions():
    for mono in [(2, 0), (2, 2), (4, 0, 0, 0), (2, 2, 0, 0)]:
        exact = complex(sphere_moment(mono, len(mono)).evaluate({PI: math.pi}))
        assert abs(exact - oracle_sphere(mono, len(mono))[0]) <= 1e-8


# -- properties ---------------------------------------------------------------

gauss_int = st.builds(lambda a, b: ExactScalar.const(GaussQ(a, b)), st.integers(-4, 4), st.integers(-4, 4))


@st.composite
def line_symbols(draw, decaying=False):
    a = draw(st.integers(0, 4))
    b = draw(st.integers(0, 4))
    top = a + b - 1 if decaying else a + b + 2
    if top < 0:
        a, top = 1, 0
    coeffs = draw(st.lists(gauss_int, min_size=1, max_size=top + 1))
    return line(coeffs, a, b)


@given(line_symbols())
def test_pi_plus_idempotent(f):
    p = pi_plus(f)
    assert pi_plus(p) == p


@given(line_symbols())
def test_decomposition_reassembles(f):
    d = pf_decompose(f)
    assert d.reassemble() == f
    assert d.plus_part() == pi_plus(f)


@given(line_symbols(decaying=True))
def test_contour_localizes_to_plus_part(f):
    assert contour_gamma_plus(f) == contour_gamma_plus(pi_plus(f))


@given(line_symbols(decaying=True), st.integers(0, 3))
def test_residue_order_stability(f, extra):
    assert contour_gamma_plus(f, f.a + extra) == contour_gamma_plus(f)


@given(line_symbols(decaying=True), line_symbols(decaying=True), gauss_int)
def test_contour_linear(f, g, k):
    lhs = contour_gamma_plus(f + g.scale(k))
    rhs = contour_gamma_plus(f) + contour_gamma_plus(g).scale(k)
    assert lhs == rhs


@given(line_symbols(decaying=True))
def test_contour_matches_quadrature(f):
    exact = complex(contour_value(f).evaluate({PI: math.pi}))
    assert abs(oracle_contour(f) - exact) <= 1e-9 * max(1.0, abs(exact))
