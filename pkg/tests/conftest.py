import numpy as np
import pytest
from scipy.linalg import expm

from vqc_transfer import _kernels

# Independent reference: Pauli matrices written out again and gates built by
# a general matrix exponential, not by the package's closed form.
PAULI = {
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}


def oracle_gate(k, angle):
    return expm(-0.5j * angle * PAULI[k])


def oracle_forward(enc, var, x_hat, theta, h=PAULI[3], psi0=(1, 0)):
    psi = np.array(psi0, dtype=complex)
    for k, a in zip(enc, x_hat):
        psi = oracle_gate(k, a) @ psi
    for k, a in zip(var, theta):
        psi = oracle_gate(k, a) @ psi
    return float(np.real(np.conj(psi) @ h @ psi))


def central_difference(fn, point, h=1e-5):
    point = np.asarray(point, dtype=float)
    grad = np.empty(point.size)
    for i in range(point.size):
        e = np.zeros(point.size)
        e[i] = h
        grad[i] = (fn(point + e) - fn(point - e)) / (2 * h)
    return grad


def random_config(rng, max_d=6, max_l=6):
    d = int(rng.integers(1, max_d + 1))
    n_var = int(rng.integers(1, max_l + 1))
    enc = tuple(int(k) for k in rng.integers(1, 4, d))
    var = tuple(int(k) for k in rng.integers(1, 4, n_var))
    return enc, var, rng.uniform(-np.pi, np.pi, n_var), rng.uniform(-np.pi, np.pi, d)


@pytest.fixture(params=sorted(_kernels.BACKENDS))
def backend(request, monkeypatch):
    """Run a test once per available kernel backend."""
    monkeypatch.setattr(_kernels, "BACKEND", request.param)
    return request.param


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
