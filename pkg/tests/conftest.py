import numpy as np
import pytest


def random_orthogonal(rng, d):
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    return Q * np.sign(np.diag(R))


def random_conditioned(rng, d, max_cond=10.0):
    """Random invertible matrix with condition number at most ``max_cond``."""
    U, V = random_orthogonal(rng, d), random_orthogonal(rng, d)
    s = np.exp(rng.uniform(0.0, np.log(max_cond), d))
    s[0], s[-1] = 1.0, min(s[-1], max_cond)
    return U @ np.diag(s) @ V.T


def taylor_exp(A, order=30):
    """Plain truncated power series, accurate for small ||A||."""
    out = np.eye(A.shape[0])
    term = np.eye(A.shape[0])
    for k in range(1, order + 1):
        term = term @ A / k
        out = out + term
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES = []


def record_criterion(number, title, ok, detail=""):
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}"
    if detail:
        line += f" :: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
