from fractions import Fraction

import pytest

from cantor_uniform.sequence import OMEGA0, constant_spec, validate_spec


def decay_doc(num=1, slope=1, offset=1, prefix=()):
    return {"prefix": list(prefix),
            "tail": {"pattern": [{"kind": "decay", "num": num, "den_slope": slope,
                                  "den_offset": offset}]}}


@pytest.fixture
def omega0():
    return OMEGA0


@pytest.fixture
def half():
    return constant_spec(Fraction(1, 2))


@pytest.fixture
def all_decay():
    """q_n = 1/(n+1)."""
    return validate_spec(decay_doc())


@pytest.fixture
def interleave():
    """(1/3, 1/2, 1/3, 1/4, 1/3, 1/6, ...)."""
    return validate_spec({"prefix": [], "tail": {"pattern": [
        {"kind": "fixed", "q": "1/3"},
        {"kind": "decay", "num": 1, "den_slope": 1, "den_offset": 0}]}})


# random specs for property tests -------------------------------------------
from hypothesis import strategies as st  # noqa: E402

from cantor_uniform.sequence import Decay, Fixed, SequenceSpec  # noqa: E402

rationals01 = st.builds(lambda num, extra: Fraction(num, num + extra),
                        st.integers(1, 9), st.integers(1, 9))


@st.composite
def slots(draw):
    if draw(st.booleans()):
        return Fixed(draw(rationals01))
    num = draw(st.integers(1, 3))
    slope = draw(st.integers(1, 3))
    offset = draw(st.integers(num, num + 6))
    return Decay(num, slope, offset)


@st.composite
def specs(draw, max_prefix=3, max_period=3):
    prefix = tuple(draw(st.lists(rationals01, max_size=max_prefix)))
    pattern = tuple(draw(st.lists(slots(), min_size=1, max_size=max_period)))
    return SequenceSpec(prefix, pattern)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
