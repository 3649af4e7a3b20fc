from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from kkwcalc.scalar import HP0, PI, ExactScalar, GaussQ, X, Y

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

small_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=7)
gauss = st.builds(GaussQ, small_fracs, small_fracs)
GENS = [PI, HP0, X(1), X(4), Y(2), Y(4)]


@st.composite
def scalars(draw, max_terms=4):
    out = ExactScalar()
    for _ in range(draw(st.integers(0, max_terms))):
        coef = draw(gauss)
        term = ExactScalar.const(coef)
        for g in draw(st.lists(st.sampled_from(GENS), max_size=3)):
            term = term * ExactScalar.gen(g)
        out = out + term
    return out


@pytest.fixture(scope="session")
def phi_results():
    from kkwcalc.pipeline import compute_all_phi

    return compute_all_phi()


def frac(a, b=1):
    return Fraction(a, b)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS):
            terminalreporter.write_line(line)
