import numpy as np
import pytest


def naive_matmul(A, B):
    """Scalar triple loop over uint8 arrays, mod 2."""
    A = np.asarray(A, dtype=np.uint8)
    B = np.asarray(B, dtype=np.uint8)
    if B.ndim == 1:
        return np.array([sum(int(A[i, j]) * int(B[j]) for j in range(A.shape[1])) % 2
                         for i in range(A.shape[0])], dtype=np.uint8)
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.uint8)
    for i in range(A.shape[0]):
        for j in range(B.shape[1]):
            out[i, j] = sum(int(A[i, t]) * int(B[t, j]) for t in range(A.shape[1])) % 2
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20161016)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
