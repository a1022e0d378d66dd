import numpy as np
import pytest

from quadsys.coefficients import CoefficientSet, check_admissibility

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record(criterion: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS.append((criterion, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


def random_complex(rng, scale=2.0):
    return complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))


def random_admissible(rng, tcondition=None, real=False):
    """Random admissible coefficients; tcondition in {None, 'T1=T2', 'T2=0', 'a=b'}."""
    draw = (lambda: rng.uniform(-2, 2)) if real else (lambda: random_complex(rng))
    while True:
        a, b, alpha, beta, gamma, C = (draw() for _ in range(6))
        if tcondition == "a=b":
            b = a
            gamma = beta
        elif tcondition == "T1=T2":
            gamma = beta * (alpha + b) / (alpha + a)
        elif tcondition == "T2=0":
            gamma = alpha * beta / a
        cs = CoefficientSet(a=a, b=b, C=C, alpha=alpha, beta=beta, gamma=gamma)
        rep = check_admissibility(cs, 1e-3)
        if rep.admissible and abs(cs.Dq) > 1e-2 and abs((a - b) ** 2 + 4 * alpha**2) > 1e-2:
            return cs


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
