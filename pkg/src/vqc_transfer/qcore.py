"""Exact 2x2 complex linear algebra for single-qubit circuits.

Operators are ``(2, 2)`` complex128 arrays and states are ``(2,)`` complex128
arrays. Pauli matrices follow the standard convention::

    sigma_1 = [[0, 1], [1, 0]]
    sigma_2 = [[0, -i], [i, 0]]
    sigma_3 = [[1, 0], [0, -1]]
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, PreconditionError, ShapeError

#: Tolerance used when checking operator preconditions.
CHECK_TOL = 1e-10

IDENTITY = np.eye(2, dtype=np.complex128)

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)
for _m in _PAULI:
    _m.setflags(write=False)
IDENTITY.setflags(write=False)


def check_axis(k) -> int:
    """Return ``k`` as an int after checking it names a Pauli axis (1, 2 or 3)."""
    if isinstance(k, (bool, np.bool_)) or int(k) != k or int(k) not in (1, 2, 3):
        raise DomainError(f"Pauli axis must be 1, 2 or 3, got {k!r}")
    return int(k)


def _as_operator(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.shape != (2, 2):
        raise ShapeError(f"expected a 2x2 operator, got shape {a.shape}")
    return a


def _as_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (2,):
        raise ShapeError(f"expected a 2-component state, got shape {psi.shape}")
    return psi


def dagger(a) -> np.ndarray:
    return np.conj(np.asarray(a, dtype=np.complex128)).T


def pauli(k) -> np.ndarray:
    """Pauli matrix ``sigma_k`` (a fresh, writable copy)."""
    return _PAULI[check_axis(k) - 1].copy()


def rotation_gate(k, angle: float) -> np.ndarray:
    """``exp(-i angle sigma_k / 2) = cos(angle/2) I - i sin(angle/2) sigma_k``."""
    k = check_axis(k)
    angle = float(angle)
    if not math.isfinite(angle):
        raise DomainError(f"rotation angle must be finite, got {angle}")
    c = math.cos(angle / 2.0)
    s = math.sin(angle / 2.0)
    return c * IDENTITY - 1j * s * _PAULI[k - 1]


def commutator(a, b) -> np.ndarray:
    a = _as_operator(a)
    b = _as_operator(b)
    return a @ b - b @ a


def frobenius(a) -> float:
    return float(np.linalg.norm(np.asarray(a), "fro"))


def is_unitary(u, tol: float = CHECK_TOL) -> bool:
    u = _as_operator(u)
    return frobenius(u @ dagger(u) - IDENTITY) <= tol


def is_hermitian(h, tol: float = CHECK_TOL) -> bool:
    h = _as_operator(h)
    return frobenius(h - dagger(h)) <= tol


def conjugate(u, b) -> np.ndarray:
    """Adjoint action ``u b u^dagger``.

    Raises
    ------
    PreconditionError
        If ``u`` is not unitary within ``CHECK_TOL``.
    """
    u = _as_operator(u)
    b = _as_operator(b)
    if not is_unitary(u):
        raise PreconditionError("conjugate() requires a unitary operator")
    return u @ b @ dagger(u)


def adjoint_linearization(k, t: float, b) -> np.ndarray:
    """First-order approximant ``B + i t [sigma_k, B]`` of ``e^{it sigma_k} B e^{-it sigma_k}``.

    The remainder is second order in ``t``.
    """
    b = _as_operator(b)
    t = float(t)
    if not math.isfinite(t):
        raise DomainError(f"step must be finite, got {t}")
    return b + 1j * t * commutator(pauli(k), b)


def exp_i_pauli(k, t: float) -> np.ndarray:
    """``exp(+i t sigma_k)``; equals ``rotation_gate(k, -2 t)``."""
    return rotation_gate(k, -2.0 * float(t))


def basis_state(bit: int) -> np.ndarray:
    if bit not in (0, 1):
        raise DomainError(f"basis index must be 0 or 1, got {bit!r}")
    psi = np.zeros(2, dtype=np.complex128)
    psi[bit] = 1.0
    return psi


def check_state(psi, tol: float = 1e-12) -> np.ndarray:
    psi = _as_state(psi)
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1.0) > tol:
        raise PreconditionError(f"state is not normalized (<psi|psi> = {norm2!r})")
    return psi


def expectation(state, h) -> float:
    """Real expectation value ``<psi|H|psi>`` of a Hermitian observable."""
    psi = _as_state(state)
    h = _as_operator(h)
    if not is_hermitian(h):
        raise PreconditionError("expectation() requires a Hermitian observable")
    check_state(psi, tol=CHECK_TOL)
    value = np.vdot(psi, h @ psi)
    # Imaginary part of a Hermitian bilinear form is rounding noise only.
    assert abs(value.imag) <= 1e-12 * max(1.0, abs(value.real)), value
    return float(value.real)
