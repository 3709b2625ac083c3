import numpy as np
import pytest

from htd import make_example, make_frechet, make_logcauchy, make_lomax, make_pareto, make_piecewise_eta

ETA_1 = ((0, 0), (1, 0.5), (2, 0.5), (4, 1))
ETA_2 = ((0, 0), (1, 0.5), (3, 0.5), (4, 1))


def family_zoo():
    """A spread of laws: closed forms, piecewise eta laws and constructed examples."""
    return {
        "pareto(0.5)": make_pareto(0.5),
        "pareto(2)": make_pareto(2),
        "frechet(0.8)": make_frechet(0.8),
        "lomax(1)": make_lomax(1),
        "logcauchy": make_logcauchy(),
        "eta1": make_piecewise_eta(ETA_1),
        "eta2": make_piecewise_eta(ETA_2),
        "trunc_frechet": make_example("TRUNC_FRECHET"),
        "sqrt_lambda": make_example("SQRT_LAMBDA"),
        "v_not_h": make_example("EX_V_NOT_H"),
    }


@pytest.fixture(scope="session")
def zoo():
    return family_zoo()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
