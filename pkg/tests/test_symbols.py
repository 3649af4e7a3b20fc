import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kkwcalc.clifford import CliffordElement, c, word_indices
from kkwcalc.geometry import (
    VectorFieldJet,
    build_dirac_symbols,
    build_dsq_inverse_symbols,
    build_einstein_symbol,
    build_nabla_symbols,
    collar_jets,
)
from kkwcalc.scalar import HP0, I, PI, ExactScalar, GaussQ, ONE, X, Y
from kkwcalc.symbols import (
    CPoly,
    CutoffTooDeep,
    FullSymbol,
    GradedSymbol,
    JetExhausted,
    LineSymbol,
    NotInvertible,
    Rat,
    sym_compose,
    sym_deriv_xi,
    sym_deriv_xn,
    sym_invert,
    sym_restrict,
)

N = 4
hp = ExactScalar.gen(HP0)
norm2 = CPoly.norm2(N)


def xi(a):
    return CPoly.xi(N, a)


def one_over_norm2():
    return Rat(CPoly.const(N, 1), 1)


def clifford_xi():
    out = CPoly.zero(N)
    for a in range(1, N + 1):
        out = out + CPoly.from_clifford(c(N, a)) * xi(a)
    return out


def eval_rat(r, point, vals=None):
    """Numeric value per Clifford word of ``N / |xi|^2k`` at a real point."""
    vals = vals or {}
    out = {}
    for (e, w), coef in r.num.terms.items():
        v = complex(coef.evaluate(vals)) * np.prod([p**k for p, k in zip(point, e)])
        out[w] = out.get(w, 0) + v
    den = float(np.dot(point, point)) ** r.k
    return {w: v / den for w, v in out.items()}


def eval_line(f, xi_t, z, vals=None):
    vals = vals or {}
    out = {}
    for (d, t, w), coef in f.num.items():
        v = complex(coef.evaluate(vals)) * np.prod([p**k for p, k in zip(xi_t, t)]) * z**d
        out[w] = out.get(w, 0) + v
    den = (z - 1j) ** f.a * (z + 1j) ** f.b
    return {w: v / den for w, v in out.items()}


UNIT_TANGENTS = [np.array(v) / np.linalg.norm(v) for v in ([1, 0, 0], [1, 2, 2], [-0.3, 0.5, 0.8])]


def same_on_unit_sphere(f, g, vals=None):
    for t in UNIT_TANGENTS:
        for z in (0.3, -1.7, 0.5 + 2j):
            a, b = eval_line(f, t, z, vals), eval_line(g, t, z, vals)
            for w in set(a) | set(b):
                if abs(a.get(w, 0) - b.get(w, 0)) > 1e-12:
                    return False
    return True


# -- derivatives ------------------------------------------------------------


def test_dxin_inverse_norm_restricted():
    d = sym_restrict(one_over_norm2().deriv(N))
    expected = LineSymbol.from_scalar_poly(N, [0, -2], 2, 2)
    assert same_on_unit_sphere(d, expected)
    assert d.poles == (2, 2)


def test_dxi1_of_mixed_quotient():
    r = Rat(xi(1) * xi(2), 1)
    expected = Rat(xi(2), 1) - Rat((xi(1) * xi(1) * xi(2)).scale(2), 2)
    assert r.deriv(1) == expected


def test_dxin_of_constant():
    s = FullSymbol.constant(N, 3)
    assert sym_deriv_xi(s, N).is_zero()


def test_dxn_of_inverse_square_symbol():
    s2 = build_dsq_inverse_symbols(collar_jets())[-2]
    line = sym_restrict(sym_deriv_xn(s2))
    expected = LineSymbol.from_scalar_poly(N, [-hp], 2, 2)
    assert same_on_unit_sphere(line, expected, {HP0: 0.7})


def test_dxn_of_einstein_leading_symbol():
    Xf, Yf = VectorFieldJet.formal("X"), VectorFieldJet.formal("Y")
    s0 = build_einstein_symbol(Xf, Yf, collar_jets())[0]
    tnorm = CPoly.tangential_norm2(N)
    expected = Rat((Xf.xi_pairing() * Yf.xi_pairing() * tnorm).scale(hp), 2)
    assert sym_deriv_xn(s0).value == expected


def test_dxn_of_constant_symbol_is_zero():
    assert sym_deriv_xn(FullSymbol.constant(N, PI)).value.is_zero()


def test_second_xn_derivative_is_rejected():
    s2 = build_dsq_inverse_symbols(collar_jets())[-2]
    with pytest.raises(JetExhausted):
        sym_deriv_xn(sym_deriv_xn(s2))


# -- composition ------------------------------------------------------------


def test_compose_dirac_with_parametrix():
    p = build_dirac_symbols(collar_jets())
    q = sym_invert(p, -2)
    prod = sym_compose(p, q, -1)
    assert prod[0] == FullSymbol.constant(N, 1)
    assert prod[-1].value.is_zero()


def test_compose_with_constant():
    B = build_dsq_inverse_symbols(collar_jets())
    k = ExactScalar.gen(PI) * 3
    A = GradedSymbol(N, {0: FullSymbol.constant(N, k)})
    out = sym_compose(A, B, -3)
    assert out == B.scale(k)


def test_einstein_order_minus_one_by_hand():
    jets = collar_jets()
    Xf, Yf = VectorFieldJet.formal("X"), VectorFieldJet.formal("Y")
    A = build_nabla_symbols(Xf, Yf, jets)
    B = build_dsq_inverse_symbols(jets)
    got = sym_compose(A, B, -1)[-1].value
    # sigma_1 sigma_-2 + sigma_2 sigma_-3 - i d_xi_n sigma_2 d_x_n sigma_-2
    by_hand = A[1].value * B[-2].value + A[2].value * B[-3].value
    by_hand = by_hand + (A[2].value.deriv(N) * B[-2].dxn) * GaussQ(0, -1)
    assert got == by_hand
    assert any(w for (_, w) in got.num.terms)


def test_cutoff_too_deep():
    jets = collar_jets()
    Xf, Yf = VectorFieldJet.formal("X"), VectorFieldJet.formal("Y")
    with pytest.raises(CutoffTooDeep):
        sym_compose(build_nabla_symbols(Xf, Yf, jets), build_dsq_inverse_symbols(jets), -2)
    p = build_dirac_symbols(jets)
    with pytest.raises(CutoffTooDeep):
        sym_compose(p, sym_invert(p, -2), -3)


# -- inversion --------------------------------------------------------------


def test_invert_clifford_xi():
    p = GradedSymbol(N, {1: FullSymbol(Rat(clifford_xi(), 0), Rat.zero(N))})
    q = sym_invert(p, -1)
    assert q[-1].value == Rat(-clifford_xi(), 1)


def test_invert_norm_square():
    p = GradedSymbol(N, {2: FullSymbol(Rat(norm2, 0), Rat.zero(N))})
    assert sym_invert(p, -2)[-2].value == one_over_norm2()


def test_invert_identity():
    p = GradedSymbol(N, {0: FullSymbol.constant(N, 1)})
    assert sym_invert(p, 0) == p


def test_not_invertible():
    p = GradedSymbol(N, {1: FullSymbol(Rat(xi(1) + xi(2), 0), Rat.zero(N))})
    with pytest.raises(NotInvertible):
        sym_invert(p, -1)


def test_dirac_parametrix_leading_term():
    q = sym_invert(build_dirac_symbols(collar_jets()), -2)
    assert q[-1].value == Rat(clifford_xi().scale(I), 1)


def test_dsq_parametrix_matches_inverse_square():
    p = build_dirac_symbols(collar_jets())
    dsq = sym_compose(p, p, 1)
    assert dsq[2].value == Rat(norm2, 0)
    q = sym_invert(dsq, -2)
    assert q[-2] == build_dsq_inverse_symbols(collar_jets())[-2]


# -- restriction ------------------------------------------------------------


def test_restrict_inverse_norm():
    assert sym_restrict(one_over_norm2()) == LineSymbol.from_scalar_poly(N, [1], 1, 1)


def test_restrict_second_xin_derivative():
    line = sym_restrict(one_over_norm2().deriv(N).deriv(N))
    assert same_on_unit_sphere(line, LineSymbol.from_scalar_poly(N, [-2, 0, 6], 3, 3))


def test_restrict_polynomial():
    r = Rat(xi(1) * xi(N) + CPoly.const(N, 2), 0)
    line = sym_restrict(r)
    assert line.poles == (0, 0)
    assert line.num == {(1, (1, 0, 0), 0): ONE, (0, (0, 0, 0), 0): ExactScalar.const(2)}


# -- properties -------------------------------------------------------------


def _components():
    jets = collar_jets()
    Xf, Yf = VectorFieldJet.formal("X"), VectorFieldJet.formal("Y")
    for g in (
        build_nabla_symbols(Xf, Yf, jets),
        build_dsq_inverse_symbols(jets),
        build_dirac_symbols(jets),
        build_einstein_symbol(Xf, Yf, jets),
    ):
        for m in g.orders():
            yield m, g[m].value


def test_euler_homogeneity():
    for m, r in _components():
        assert r.euler() == r * ExactScalar.const(m)


monos = st.lists(st.integers(1, N), max_size=3)
powers = st.integers(0, 3)


@st.composite
def rats(draw):
    num = CPoly.zero(N)
    for _ in range(draw(st.integers(1, 3))):
        term = CPoly.const(N, draw(st.integers(-3, 3)), draw(st.integers(0, 15)))
        for a in draw(monos):
            term = term * xi(a)
        num = num + term
    return Rat(num, draw(powers))


@given(rats(), rats(), st.integers(1, N))
def test_leibniz(a, b, axis):
    assert (a * b).deriv(axis) == a.deriv(axis) * b + a * b.deriv(axis)


@given(rats(), st.integers(1, N), st.integers(1, N))
def test_derivatives_commute(r, j, k):
    assert r.deriv(j).deriv(k) == r.deriv(k).deriv(j)


def test_xi_derivatives_match_finite_differences():
    rng = np.random.default_rng(5)
    vals = {HP0: 0.8, PI: np.pi, **{X(j): rng.uniform(-1, 1) for j in range(1, 5)}}
    vals.update({Y(j): rng.uniform(-1, 1) for j in range(1, 5)})
    step = 1e-5
    for _, r in _components():
        for axis in range(1, N + 1):
            point = rng.uniform(0.4, 1.2, N)
            exact = eval_rat(r.deriv(axis), point, vals)
            hi, lo = point.copy(), point.copy()
            hi[axis - 1] += step
            lo[axis - 1] -= step
            fh, fl = eval_rat(r, hi, vals), eval_rat(r, lo, vals)
            for w in set(exact) | set(fh):
                fd = (fh.get(w, 0) - fl.get(w, 0)) / (2 * step)
                assert abs(exact.get(w, 0) - fd) <= 1e-6 * max(1.0, abs(fd))


def test_graded_components_checked_on_construction():
    with pytest.raises(ValueError):
        GradedSymbol(N, {1: FullSymbol(Rat(norm2, 0), Rat.zero(N))})


def test_clifford_square_of_xi():
    sq = clifford_xi() * clifford_xi()
    assert sq == -norm2
    assert all(word_indices(w) == () for (_, w) in sq.terms)
    assert CliffordElement.scalar(N, 1) == CliffordElement.scalar(N, ONE)
