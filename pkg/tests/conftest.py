import pytest

from spbdiv.fqm import DiscriminantForm

# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def record(number: int, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {status}  {detail}".rstrip()
    print(ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])


def divisor_pairs(limit):
    return [(N, Np) for N in range(1, limit + 1) for Np in range(1, N + 1) if N % Np == 0]


@pytest.fixture(params=[(1, 1), (2, 1), (2, 2), (3, 1), (3, 3), (4, 1), (4, 2), (6, 1), (6, 2)],
                ids=lambda p: f"N{p[0]}_{p[1]}")
def small_form(request):
    return DiscriminantForm(*request.param)
