import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from potent_split import CompanionSpec, FieldSpec, Matrix

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

F3 = FieldSpec(3)
F5 = FieldSpec(5)
F7 = FieldSpec(7)
F9 = FieldSpec(3, 2)
F25 = FieldSpec(5, 2)

FIELDS = [F3, F5, F7, F9, F25]
fields = st.sampled_from(FIELDS)


def elements(spec):
    return st.integers(0, spec.q - 1)


@st.composite
def matrices(draw, spec=None, n=None, max_n=4):
    spec = spec or draw(fields)
    n = n or draw(st.integers(1, max_n))
    codes = draw(st.lists(elements(spec), min_size=n * n, max_size=n * n))
    return Matrix._raw(spec, tuple(tuple(codes[i * n:(i + 1) * n]) for i in range(n)))


@st.composite
def companions(draw, spec=None, n=None, min_n=1, max_n=5):
    spec = spec or draw(fields)
    n = n or draw(st.integers(min_n, max_n))
    return CompanionSpec(spec, tuple(draw(st.lists(elements(spec), min_size=n, max_size=n))))


def companion(spec, *coeffs):
    return CompanionSpec.of(spec, coeffs)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None:
        return
    if mod.HISTOGRAM:
        terminalreporter.section("route histogram")
        for line in mod.HISTOGRAM:
            terminalreporter.write_line(line)
    if mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
