import numpy as np
import pytest

from qer.channel import KrausChannel


def random_density(rng, dim, rank=None):
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_matrix(rng, rows, cols):
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_cptp(rng, d_in, d_out=None, n_kraus=3):
    d_out = d_out or d_in
    n_kraus = max(n_kraus, -(-d_in // d_out))
    v, _ = np.linalg.qr(random_matrix(rng, d_out * n_kraus, d_in))
    return KrausChannel([v[k * d_out:(k + 1) * d_out] for k in range(n_kraus)])


@pytest.fixture
def rng():
    return np.random.default_rng(20060605)


_ACCEPTANCE = []


def record_criterion(number, ok, detail):
    _ACCEPTANCE.append((number, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_ACCEPTANCE, key=lambda t: t[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {detail}")
