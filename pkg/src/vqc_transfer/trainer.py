"""Gradient-descent training against the summed squared error."""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np

from .dataset import Dataset
from .errors import DomainError, ShapeError, TrainingError
from .model import VqcModel, forward_batch, grad_theta_analytic, grad_theta_shift
from .rng import substream

log = logging.getLogger(__name__)

_GRADIENTS = {"shift": grad_theta_shift, "analytic": grad_theta_analytic}


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 100
    batch_size: int | Literal["full"] = 32
    seed: int = 0
    shuffle: bool = True
    gradient: Literal["shift", "analytic"] = "shift"

    def __post_init__(self):
        if not (math.isfinite(self.learning_rate) and self.learning_rate >= 0):
            raise DomainError(f"learning_rate must be finite and >= 0, got {self.learning_rate!r}")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise DomainError(f"epochs must be an integer >= 1, got {self.epochs!r}")
        if self.batch_size != "full" and (int(self.batch_size) != self.batch_size or self.batch_size < 1):
            raise DomainError(f"batch_size must be 'full' or an integer >= 1, got {self.batch_size!r}")
        if self.gradient not in _GRADIENTS:
            raise DomainError(f"unknown gradient method {self.gradient!r}")


#: Pretraining defaults.
PRETRAIN = TrainConfig(learning_rate=0.1, epochs=100, batch_size=32)
#: Fine-tuning defaults (full-batch steps, one per epoch).
FINETUNE = TrainConfig(learning_rate=0.05, epochs=30, batch_size="full")


@dataclass(frozen=True)
class TrainCurvePoint:
    epoch: int
    loss: float
    accuracy: float


@dataclass(frozen=True)
class Metrics:
    loss: float
    accuracy: float
    n: int

    @property
    def error_rate(self) -> float:
        return 1.0 - self.accuracy


def _check(model: VqcModel, data: Dataset):
    if len(data) == 0:
        raise DomainError("dataset is empty")
    if data.d != model.d:
        raise ShapeError(f"dataset has {data.d} features, model encodes {model.d}")


def loss(model: VqcModel, data: Dataset) -> float:
    """``sum_i (f(x_i) - y_i)^2``."""
    _check(model, data)
    resid = forward_batch(model, data.x) - data.y
    return float(resid @ resid)


def evaluate(model: VqcModel, data: Dataset) -> Metrics:
    _check(model, data)
    f = forward_batch(model, data.x)
    resid = f - data.y
    labels = np.where(f >= 0, 1.0, -1.0)
    correct = int(np.count_nonzero(labels == data.y))
    return Metrics(loss=float(resid @ resid), accuracy=correct / len(data), n=len(data))


def batch_gradient(model: VqcModel, x, y, method: str = "shift") -> np.ndarray:
    """Gradient of the mean squared error over one batch."""
    resid = forward_batch(model, x) - y
    g = _GRADIENTS[method](model, x)
    return (2.0 / len(y)) * (resid @ g)


def fit_gd(model: VqcModel, data: Dataset, config: TrainConfig) -> tuple[VqcModel, list[TrainCurvePoint]]:
    """Plain mini-batch gradient descent.

    Each step applies ``theta <- theta - lr * grad`` where ``grad`` is the
    gradient of the batch mean squared error. One curve point (summed loss
    and accuracy over all of ``data``) is recorded after every epoch.

    Raises
    ------
    TrainingError
        When the loss or the parameters stop being finite. The error carries
        the last finite model and the curve so far.
    """
    _check(model, data)
    n = len(data)
    batch = n if config.batch_size == "full" else min(int(config.batch_size), n)
    rng = substream(config.seed, "shuffle")
    curve: list[TrainCurvePoint] = []
    current = model
    for epoch in range(1, config.epochs + 1):
        epoch_start = current
        order = rng.permutation(n) if config.shuffle else np.arange(n)
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            step = config.learning_rate * batch_gradient(current, data.x[idx], data.y[idx], config.gradient)
            theta = current.theta - step
            if not np.all(np.isfinite(theta)):
                raise TrainingError(f"parameters diverged in epoch {epoch}", current, curve)
            current = current.with_theta(theta)
        m = evaluate(current, data)
        if not math.isfinite(m.loss):
            raise TrainingError(f"loss diverged in epoch {epoch}", epoch_start, curve)
        curve.append(TrainCurvePoint(epoch, m.loss, m.accuracy))
        log.debug("epoch %d loss %.6g accuracy %.4f", epoch, m.loss, m.accuracy)
    return current, curve


def dumps_curve(curve: list[TrainCurvePoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["epoch", "loss", "accuracy"])
    for p in curve:
        writer.writerow([p.epoch, repr(p.loss), repr(p.accuracy)])
    return buf.getvalue()


def write_curve(path, curve: list[TrainCurvePoint]) -> None:
    Path(path).write_text(dumps_curve(curve))
