import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much, HealthCheck.data_too_large,
                            HealthCheck.large_base_example],
)
settings.register_profile("thorough", parent=settings.get_profile("default"), max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def binary_form(draw, deg, coeffs=st.integers(-3, 3), nonzero=True):
    """Random homogeneous polynomial text in x0, x1 of the given degree."""
    while True:
        cs = [draw(coeffs) for _ in range(deg + 1)]
        if any(cs) or not nonzero:
            break
    terms = [f"({c})*x0^{deg - k}*x1^{k}" for k, c in enumerate(cs) if c]
    return " + ".join(terms) if terms else "0"


@st.composite
def bundles_over_p1(draw, max_h=3, max_weight=2, max_c=3, off_diagonal=True):
    """Raw JSON of a random splitting bundle over P^1 (may be degenerate)."""
    h = draw(st.integers(1, max_h))
    weights = sorted((draw(st.integers(0, max_weight)) for _ in range(h + 2)), reverse=True)
    c = draw(st.integers(0, max_c))
    sigma = {}
    for i in range(h + 2):
        for j in range(i, h + 2):
            deg = c + weights[i] + weights[j]
            if i == j:
                sigma[f"{i},{i}"] = binary_form(draw, deg)
            elif off_diagonal and draw(st.booleans()):
                sigma[f"{i},{j}"] = binary_form(draw, deg, nonzero=False)
    sigma = {k: v for k, v in sigma.items() if v != "0"}
    return {"base_dim": 1, "fiber_dim": h, "field": "Q", "weights": weights, "sigma": sigma}


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_ac" in report.nodeid and report.when == "call":
        _ACCEPTANCE[report.nodeid] = report.passed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    import test_acceptance

    terminalreporter.section("acceptance criteria")
    for nodeid, passed in sorted(_ACCEPTANCE.items()):
        name = nodeid.split("::")[-1]
        doc = (getattr(test_acceptance, name).__doc__ or name).strip()
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {doc}")
