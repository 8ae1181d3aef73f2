import pytest

from dfo_kit import _kernels

# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    def record(number, title, passed, detail=""):
        ACCEPTANCE[number] = f"criterion {number:>2} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
        print(ACCEPTANCE[number])

    return record


@pytest.fixture(params=_kernels.available_backends())
def backend(request):
    prev = _kernels.BACKEND
    _kernels.set_backend(request.param)
    yield request.param
    _kernels.set_backend(prev)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
