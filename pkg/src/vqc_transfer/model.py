"""Single-qubit variational circuit ``f = M o U o V``.

A model maps raw features ``x`` to angles ``x_hat = (x - mean) * scale``,
encodes them with Pauli rotations ``V_d(x_hat_d) ... V_1(x_hat_1)`` acting on
``|psi0>``, applies the trainable rotations ``U_L(theta_L) ... U_1(theta_1)``
and reports ``<H>``. The first listed gate acts first.

Three independent gradient paths are provided: the nested-conjugation
formula (``grad_theta_analytic``), the parameter-shift rule
(``grad_theta_shift``), and central finite differences (in the tests).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import DomainError, PreconditionError, ShapeError
from .qcore import basis_state, check_axis, check_state, is_hermitian, pauli


@dataclass(frozen=True)
class CircuitSpec:
    encoding_axes: tuple[int, ...]
    variational_axes: tuple[int, ...]

    def __post_init__(self):
        enc = tuple(check_axis(k) for k in self.encoding_axes)
        var = tuple(check_axis(k) for k in self.variational_axes)
        if not enc or not var:
            raise DomainError("a circuit needs at least one encoding and one variational gate")
        object.__setattr__(self, "encoding_axes", enc)
        object.__setattr__(self, "variational_axes", var)

    @property
    def d(self) -> int:
        return len(self.encoding_axes)

    @property
    def L(self) -> int:
        return len(self.variational_axes)


#: R_x then R_y angle embedding followed by a Z-Y-Z Euler rotation.
DEFAULT_CIRCUIT = CircuitSpec(encoding_axes=(1, 2), variational_axes=(3, 2, 3))

#: Angle span assigned to one standard deviation of a feature.
DEFAULT_ANGLE_SPAN = np.pi / 4


@dataclass(frozen=True)
class FeatureScaler:
    """Affine map from feature units to rotation angles (radians)."""

    mean: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=np.float64).reshape(-1)
        scale = np.array(self.scale, dtype=np.float64).reshape(-1)
        if mean.shape != scale.shape:
            raise ShapeError("scaler mean and scale must have the same length")
        if not np.all(np.isfinite(mean)) or not np.all(np.isfinite(scale)):
            raise DomainError("scaler entries must be finite")
        if np.any(scale <= 0):
            raise DomainError("scaler scale entries must be strictly positive")
        mean.setflags(write=False)
        scale.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "scale", scale)

    @classmethod
    def identity(cls, d: int) -> "FeatureScaler":
        return cls(np.zeros(d), np.ones(d))

    @classmethod
    def fit(cls, x, angle_span: float = DEFAULT_ANGLE_SPAN) -> "FeatureScaler":
        """Standardize each column of ``x`` and stretch one std to ``angle_span`` radians."""
        x = np.asarray(x, dtype=np.float64)
        std = x.std(axis=0)
        std = np.where(std > 0, std, 1.0)
        return cls(x.mean(axis=0), angle_span / std)

    def __call__(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=np.float64) - self.mean) * self.scale


@dataclass(frozen=True)
class VqcModel:
    spec: CircuitSpec
    theta: np.ndarray
    scaler: FeatureScaler
    observable: np.ndarray = field(default_factory=lambda: pauli(3))
    initial_state: np.ndarray = field(default_factory=lambda: basis_state(0))
    seed: int | None = None

    def __post_init__(self):
        theta = np.array(self.theta, dtype=np.float64).reshape(-1)
        if theta.shape != (self.spec.L,):
            raise ShapeError(f"theta has {theta.size} entries, circuit has {self.spec.L} gates")
        if len(self.scaler.mean) != self.spec.d:
            raise ShapeError(f"scaler has {len(self.scaler.mean)} features, circuit encodes {self.spec.d}")
        h = np.array(self.observable, dtype=np.complex128)
        if h.shape != (2, 2) or not is_hermitian(h, tol=1e-12):
            raise PreconditionError("observable must be a Hermitian 2x2 operator")
        psi0 = check_state(np.array(self.initial_state, dtype=np.complex128))
        for a in (theta, h, psi0):
            a.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "observable", h)
        object.__setattr__(self, "initial_state", psi0)

    @property
    def d(self) -> int:
        return self.spec.d

    @property
    def L(self) -> int:
        return self.spec.L

    def with_theta(self, theta) -> "VqcModel":
        return replace(self, theta=theta)

    def scaled(self, x) -> np.ndarray:
        """Validated scaled angles, always 2-D ``(N, d)``."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x[None, :]
        if x.ndim != 2 or x.shape[1] != self.d:
            raise ShapeError(f"expected features of dimension {self.d}, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise DomainError("features must be finite")
        return self.scaler(x)

    def _args(self, theta=None):
        return (
            self.spec.encoding_axes,
            self.spec.variational_axes,
            self.theta if theta is None else theta,
        )


def random_init(spec: CircuitSpec, scaler: FeatureScaler, rng: np.random.Generator, **kwargs) -> VqcModel:
    """Model with angles drawn i.i.d. uniform on ``[-pi, pi]``."""
    return VqcModel(spec=spec, theta=rng.uniform(-np.pi, np.pi, spec.L), scaler=scaler, **kwargs)


def _single(x, fn):
    x = np.asarray(x, dtype=np.float64)
    out = fn(x)
    return out[0] if x.ndim == 1 else out


def forward_batch(model: VqcModel, x, theta=None) -> np.ndarray:
    """Outputs for each row of ``x``; ``theta`` overrides the model angles."""
    xs = model.scaled(x)
    return _kernels.forward_batch(*model._args(theta), xs, model.observable, model.initial_state)


def forward(model: VqcModel, x) -> float | np.ndarray:
    """``<psi0| V^dag(x_hat) U^dag(theta) H U(theta) V(x_hat) |psi0>``.

    ``x`` may be one sample ``(d,)`` (returns a float) or a batch ``(N, d)``.
    """
    out = _single(x, lambda a: forward_batch(model, a))
    return float(out) if np.ndim(out) == 0 else out


def predict(model: VqcModel, x):
    """Sign of the output as a +/-1 label; an output of exactly 0 maps to +1."""
    f = np.asarray(forward(model, x))
    labels = np.where(f >= 0, 1.0, -1.0)
    return float(labels) if labels.ndim == 0 else labels


def grad_theta_analytic(model: VqcModel, x) -> np.ndarray:
    """Parameter sensitivities by nested conjugation.

    ``z_l = (i/2) <ad_{V^dag} ad_{U_1^dag} ... ad_{U_{l-1}^dag} [sigma_{k_l}, ad_{U_l^dag} ... ad_{U_L^dag}(H)]>``
    which equals ``d<H>/d theta_l``. Returns ``(L,)`` for one sample or ``(N, L)``.
    """

    def run(a):
        xs = model.scaled(a)
        return _kernels.grad_theta_batch(*model._args(), xs, model.observable, model.initial_state)

    return _single(x, run)


def grad_theta_shift(model: VqcModel, x) -> np.ndarray:
    """Parameter-shift gradient ``(f(theta_l + pi/2) - f(theta_l - pi/2)) / 2``."""

    def run(a):
        out = np.empty((model.scaled(a).shape[0], model.L))
        for ell in range(model.L):
            shift = np.zeros(model.L)
            shift[ell] = np.pi / 2
            plus = forward_batch(model, a, model.theta + shift)
            minus = forward_batch(model, a, model.theta - shift)
            out[:, ell] = (plus - minus) / 2.0
        return out

    return _single(x, run)


def grad_x_mixed(model: VqcModel, x_left, x_right) -> np.ndarray:
    """Input sensitivities in raw feature units with mixed arguments.

    Encoding gates to the left of the commutator take ``x_left``; gates inside
    it take ``x_right``. The result is chain-rule scaled by the feature scaler.
    """
    left = model.scaled(x_left)
    right = model.scaled(x_right)
    if left.shape != right.shape:
        raise ShapeError("left and right feature batches differ in shape")
    r = _kernels.grad_x_batch(*model._args(), left, right, model.observable, model.initial_state)
    r = r * model.scaler.scale
    return r[0] if np.ndim(x_left) == 1 else r


def grad_x(model: VqcModel, x) -> np.ndarray:
    """Gradient of the output with respect to raw features."""
    return grad_x_mixed(model, x, x)


# --- persistence -----------------------------------------------------------

def _complex_pairs(a):
    a = np.asarray(a)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _from_pairs(obj):
    a = np.asarray(obj, dtype=np.float64)
    return a[..., 0] + 1j * a[..., 1]


def model_to_dict(model: VqcModel) -> dict:
    h = model.observable
    psi = model.initial_state
    return {
        "encoding_axes": list(model.spec.encoding_axes),
        "variational_axes": list(model.spec.variational_axes),
        "theta": [float(t) for t in model.theta],
        "observable": "pauli_z" if np.array_equal(h, pauli(3)) else _complex_pairs(h),
        "initial_state": "zero" if np.array_equal(psi, basis_state(0)) else _complex_pairs(psi),
        "scaler": {
            "mean": [float(v) for v in model.scaler.mean],
            "scale": [float(v) for v in model.scaler.scale],
        },
        "seed": model.seed,
    }


def model_from_dict(doc: dict) -> VqcModel:
    try:
        spec = CircuitSpec(tuple(doc["encoding_axes"]), tuple(doc["variational_axes"]))
        obs = doc.get("observable", "pauli_z")
        h = pauli(3) if obs == "pauli_z" else _from_pairs(obs)
        st = doc.get("initial_state", "zero")
        psi = basis_state(0) if st == "zero" else _from_pairs(st)
        scaler = FeatureScaler(doc["scaler"]["mean"], doc["scaler"]["scale"])
        return VqcModel(spec=spec, theta=doc["theta"], scaler=scaler, observable=h,
                        initial_state=psi, seed=doc.get("seed"))
    except KeyError as exc:
        raise DomainError(f"model document is missing field {exc}") from None


def dumps_model(model: VqcModel) -> str:
    return json.dumps(model_to_dict(model), indent=2) + "\n"


def save_model(model: VqcModel, path) -> None:
    Path(path).write_text(dumps_model(model))


def load_model(path) -> VqcModel:
    return model_from_dict(json.loads(Path(path).read_text()))


def circuit_from_dict(doc: dict) -> CircuitSpec:
    return CircuitSpec(tuple(doc["encoding_axes"]), tuple(doc["variational_axes"]))


def model_for_axes(encoding_axes: Sequence[int], variational_axes: Sequence[int], theta,
                   scaler: FeatureScaler | None = None, **kwargs) -> VqcModel:
    """Convenience constructor, mostly for tests and notebooks."""
    spec = CircuitSpec(tuple(encoding_axes), tuple(variational_axes))
    return VqcModel(spec=spec, theta=theta, scaler=scaler or FeatureScaler.identity(spec.d), **kwargs)
