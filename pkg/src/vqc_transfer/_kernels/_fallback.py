"""Vectorized numpy kernels, used when the compiled extension is unavailable.

Every kernel works on a batch of ``N`` samples at once. Arguments:

enc, var
    Pauli axes (1, 2, 3) of the encoding and variational gates, in the order
    they act on the state.
theta
    Variational angles, shape ``(L,)``.
xs
    Scaled feature angles, shape ``(N, d)``.
h, psi0
    Observable ``(2, 2)`` and initial state ``(2,)``, complex128.
"""
import numpy as np

_PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)
_I2 = np.eye(2, dtype=np.complex128)


def _rot(k, angle):
    # angle scalar -> (2, 2); angle (N,) -> (N, 2, 2)
    a = np.asarray(angle, dtype=np.float64)[..., None, None] / 2.0
    return np.cos(a) * _I2 - 1j * np.sin(a) * _PAULI[k - 1]


def _dag(m):
    return np.conj(np.swapaxes(m, -1, -2))


def _apply(m, psi):
    # (N, 2, 2) or (2, 2) applied to (N, 2)
    if m.ndim == 2:
        return psi @ m.T
    return np.einsum("nab,nb->na", m, psi)


def _sandwich(psi, op):
    # Re <psi|op|psi> for a batch of states and one or N operators
    return np.real(np.sum(np.conj(psi) * _apply(op, psi), axis=-1))


def _encode(enc, xs, psi0):
    psi = np.broadcast_to(psi0, (xs.shape[0], 2)).copy()
    for j, k in enumerate(enc):
        psi = _apply(_rot(k, xs[:, j]), psi)
    return psi


def _variational(var, theta):
    u = _I2.copy()
    for k, t in zip(var, theta):
        u = _rot(k, t) @ u
    return u


def forward_batch(enc, var, theta, xs, h, psi0):
    psi = _encode(enc, xs, psi0)
    psi = _apply(_variational(var, theta), psi)
    return _sandwich(psi, h)


def grad_theta_batch(enc, var, theta, xs, h, psi0):
    n_var = len(var)
    # Heisenberg-picture observables H_l = ad_{U_l^dag} ... ad_{U_L^dag}(H)
    brackets = [None] * n_var
    op = np.asarray(h)
    for ell in range(n_var - 1, -1, -1):
        u = _rot(var[ell], theta[ell])
        op = _dag(u) @ op @ u
        s = _PAULI[var[ell] - 1]
        brackets[ell] = 0.5j * (s @ op - op @ s)
    psi = _encode(enc, xs, psi0)
    out = np.empty((xs.shape[0], n_var))
    for ell in range(n_var):
        out[:, ell] = _sandwich(psi, brackets[ell])
        psi = _apply(_rot(var[ell], theta[ell]), psi)
    return out


def grad_x_batch(enc, var, theta, xs_left, xs_right, h, psi0):
    """Mixed-argument input sensitivities.

    Gates left of the bracket use ``xs_left``; the bracket interior uses
    ``xs_right``. With ``xs_left == xs_right`` this is the input gradient.
    """
    n, d = xs_left.shape
    u = _variational(var, theta)
    op = np.broadcast_to(_dag(u) @ h @ u, (n, 2, 2))
    brackets = [None] * d
    for j in range(d - 1, -1, -1):
        v = _rot(enc[j], xs_right[:, j])
        op = _dag(v) @ op @ v
        s = _PAULI[enc[j] - 1]
        brackets[j] = 0.5j * (s @ op - op @ s)
    psi = np.broadcast_to(psi0, (n, 2)).copy()
    out = np.empty((n, d))
    for j in range(d):
        out[:, j] = _sandwich(psi, brackets[j])
        psi = _apply(_rot(enc[j], xs_left[:, j]), psi)
    return out
