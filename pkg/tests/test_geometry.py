from fractions import Fraction

import pytest

from kkwcalc.clifford import CliffordElement, c, cl_mul, word_from_indices
from kkwcalc.geometry import (
    VectorFieldJet,
    build_dsq_inverse_symbols,
    build_einstein_symbol,
    build_nabla_symbols,
    collar_jets,
)
from kkwcalc.scalar import HP0, ExactScalar, ONE, ZERO
from kkwcalc.symbols import CPoly, Rat, sym_restrict

N = 4
hp = ExactScalar.gen(HP0)
XF, YF = VectorFieldJet.formal("X"), VectorFieldJet.formal("Y")


def flatten(table):
    if isinstance(table, (tuple, list)):
        for t in table:
            yield from flatten(t)
    else:
        yield table


def test_metric_is_identity_at_x0():
    j = collar_jets()
    for a in range(N):
        for b in range(N):
            assert j.g[a][b] == (ONE if a == b else ZERO)


def test_normal_derivative_of_inverse_metric():
    j = collar_jets()
    for a in range(N - 1):
        assert j.dginv[N - 1][a][a] == hp
    assert j.dginv[N - 1][N - 1][N - 1] == ZERO
    for axis in range(N - 1):
        assert all(not x for x in flatten(j.dginv[axis]))


def test_product_metric_has_no_jets():
    j = collar_jets(hp0=0)
    for table in (j.dg, j.dginv, j.christoffel, j.dframe, j.omega, j.gamma_up):
        assert all(not x for x in flatten(table))
    assert all(s.is_zero() for s in j.sigma + j.sigma_up)
    assert j.is_flat()


def test_christoffel_symmetric_and_omega_antisymmetric():
    j = collar_jets()
    for k in range(N):
        for a in range(N):
            for b in range(N):
                assert j.christoffel[k][a][b] == j.christoffel[k][b][a]
                assert j.omega[k][a][b] == -j.omega[a][k][b]


def test_contracted_christoffel():
    j = collar_jets()
    assert j.gamma_up[:3] == (ZERO, ZERO, ZERO)
    assert j.gamma_up[3] == hp * Fraction(3, 2)


def test_spin_connection_terms():
    j = collar_jets()
    for i in range(N - 1):
        expected = CliffordElement.word(N, (i + 1, N), hp * Fraction(1, 4))
        assert j.sigma[i] == expected
    assert j.sigma[N - 1].is_zero()


def test_spin_connection_along_normal_vanishes():
    j = collar_jets()
    assert j.spin_connection((ZERO, ZERO, ZERO, ONE)).is_zero()
    a1 = j.spin_connection((ONE, ZERO, ZERO, ZERO))
    assert a1 == j.sigma[0]


def test_collar_needs_three_dimensions():
    with pytest.raises(ValueError):
        collar_jets(2)


def test_generic_dimension():
    j = collar_jets(6)
    assert j.gamma_up[5] == hp * Fraction(5, 2)


# -- symbols of nabla_X nabla_Y -----------------------------------------------


def test_nabla_leading_symbol():
    s = build_nabla_symbols(XF, YF, collar_jets())
    assert s[2].value == Rat(-(XF.xi_pairing() * YF.xi_pairing()), 0)
    assert s.orders() == [2, 1, 0]


def test_nabla_zero_fields():
    s = build_nabla_symbols(VectorFieldJet.zero(), VectorFieldJet.zero(), collar_jets())
    assert all(s[m].value.is_zero() for m in (2, 1, 0))


def test_nabla_flat_lower_orders_vanish():
    s = build_nabla_symbols(XF, YF, collar_jets(hp0=0))
    assert s[1].value.is_zero()
    assert s[0].value.is_zero()


def test_nabla_first_order_block():
    j = collar_jets()
    s = build_nabla_symbols(XF, YF, j)
    ax, ay = j.spin_connection(XF.components), j.spin_connection(YF.components)
    expected = CPoly.from_clifford(ay) * XF.xi_pairing() + CPoly.from_clifford(ax) * YF.xi_pairing()
    assert s[1].value == Rat(expected.scale(ExactScalar.const(1j)), 0)


def test_reading_is_validated():
    with pytest.raises(ValueError):
        build_nabla_symbols(XF, YF, collar_jets(), reading="other")


def test_derivative_jets_for_y_only():
    with pytest.raises(ValueError):
        VectorFieldJet.formal("X", tangential_derivatives=True)
    y = VectorFieldJet.formal("Y", tangential_derivatives=True)
    assert y.derivatives[N - 1] == (ZERO,) * N


# -- D^-2 ---------------------------------------------------------------------


def test_inverse_square_leading_symbol():
    s = build_dsq_inverse_symbols(collar_jets())
    assert s[-2].value == Rat(CPoly.const(N, 1), 1)


def test_inverse_square_flat_subleading_vanishes():
    s = build_dsq_inverse_symbols(collar_jets(hp0=0))
    assert s[-3].value.is_zero()


def test_inverse_square_subleading_structure():
    line = sym_restrict(build_dsq_inverse_symbols(collar_jets())[-3])
    allowed = {0} | {word_from_indices((k, N))[1] for k in range(1, N)}
    words = {w for (_, _, w) in line.num}
    assert words <= allowed and 0 in words and len(words) > 1
    for coef in line.num.values():
        assert coef.degree_in([HP0]) == {1}


# -- nabla nabla D^-2 ---------------------------------------------------------


def test_einstein_leading_symbol():
    s = build_einstein_symbol(XF, YF, collar_jets())
    assert s[0].value == Rat(-(XF.xi_pairing() * YF.xi_pairing()), 1)


def test_einstein_constant_fields_flat():
    x = VectorFieldJet.constant([1, 2, 0, -1])
    y = VectorFieldJet.constant([0, 1, 3, 2])
    s = build_einstein_symbol(x, y, collar_jets(hp0=0))
    assert s[-1].value.is_zero()
    assert not s[0].value.is_zero()


def test_clifford_generators_match_words():
    assert cl_mul(c(N, 1), c(N, 4)) == CliffordElement.word(N, (1, 4))
