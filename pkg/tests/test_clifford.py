import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kkwcalc.clifford import (
    CliffordElement,
    DimensionMismatch,
    c,
    cl_mul,
    cl_trace,
    rep_dim,
    word_from_indices,
    word_indices,
)
from kkwcalc.oracle import gamma_rep, oracle_trace
from kkwcalc.scalar import ExactScalar, GaussQ, ONE

N = 4


def test_square_is_minus_one():
    assert cl_mul(c(N, 1), c(N, 1)) == CliffordElement.scalar(N, -1)


def test_anticommute():
    assert cl_mul(c(N, 2), c(N, 1)) == -cl_mul(c(N, 1), c(N, 2))
    assert cl_mul(c(N, 2), c(N, 1)) == CliffordElement.word(N, (1, 2), -1)


def test_bivector_times_reverse_is_identity():
    e12 = CliffordElement.word(N, (1, 2))
    e21 = CliffordElement.word(N, (2, 1))
    assert cl_mul(e12, e21) == CliffordElement.scalar(N, 1)


def test_trace_examples():
    assert cl_trace(CliffordElement.scalar(N, 1)) == ExactScalar.const(4)
    assert cl_trace(CliffordElement.word(N, (1, 2))) == ExactScalar()
    assert cl_trace(CliffordElement.word(N, (1, 2, 1, 2))) == ExactScalar.const(-4)


def test_rep_dim_default():
    assert rep_dim(4) == 4
    assert rep_dim(6) == 8


def test_anticommutator_table():
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            anti = cl_mul(c(N, i), c(N, j)) + cl_mul(c(N, j), c(N, i))
            expected = CliffordElement.scalar(N, -2 if i == j else 0)
            assert anti == expected


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        cl_mul(c(3, 1), c(4, 1))
    with pytest.raises(DimensionMismatch):
        c(4, 5)


def test_word_encoding():
    sign, mask = word_from_indices((3, 1))
    assert sign == -1 and word_indices(mask) == (1, 3)
    assert word_from_indices((2, 2)) == (-1, 0)


def test_text_rendering():
    assert CliffordElement.word(N, (1, 4)).to_text() == "c(e_1)c(e_4)"


words = st.lists(st.integers(1, N), max_size=6)
coefs = st.builds(GaussQ, st.integers(-3, 3), st.integers(-3, 3))


@st.composite
def elements(draw):
    out = CliffordElement(N)
    for _ in range(draw(st.integers(0, 3))):
        out = out + CliffordElement.word(N, draw(words), ExactScalar.const(draw(coefs)))
    return out


@given(elements(), elements())
def test_trace_cyclic(a, b):
    assert cl_trace(cl_mul(a, b)) == cl_trace(cl_mul(b, a))


@given(elements(), elements(), elements())
def test_product_associative(a, b, d):
    assert cl_mul(cl_mul(a, b), d) == cl_mul(a, cl_mul(b, d))


@given(words)
def test_trace_matches_gamma_matrices(w):
    el = CliffordElement.word(N, w)
    exact = complex(cl_trace(el).constant_value())
    assert exact.imag == 0 and exact.real == int(exact.real)
    assert oracle_trace(el) == pytest.approx(exact, abs=1e-12)


def test_gamma_product_matches_symbolic_word():
    rep = gamma_rep()
    rng = np.random.default_rng(3)
    for _ in range(50):
        w = list(rng.integers(1, N + 1, size=rng.integers(0, 7)))
        el = CliffordElement.word(N, w)
        mat = np.eye(4, dtype=complex)
        for i in w:
            mat = mat @ rep.gammas[i - 1]
        recon = np.zeros((4, 4), dtype=complex)
        for mask, coef in el.terms.items():
            sub = np.eye(4, dtype=complex)
            for i in word_indices(mask):
                sub = sub @ rep.gammas[i - 1]
            recon += complex(coef.constant_value()) * sub
        assert np.allclose(mat, recon, atol=1e-14)


def test_scale_by_zero():
    assert c(N, 1).scale(0).is_zero()
    assert c(N, 2).scale(ONE) == c(N, 2)
