"""One-shot transfer of a pretrained circuit to a nearby domain.

Source and target samples are first aligned into pairs ``(x, y) -> (x~, y~)``.
Linearizing the target loss around the pretrained angles turns it into

    sum_i ( <z_i, delta_theta> - q_i )^2,
    q_i = delta_y_i - <r_i, delta_x_i> + y_i - f(x_i; theta),

where ``z_i`` are the parameter sensitivities at the source input and ``r_i``
the mixed-argument input sensitivities across the pair. The minimum-norm
least-squares solution gives the adapted angles ``theta + delta_theta``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterator, Literal

import numpy as np

from .dataset import Dataset, LabeledSample
from .errors import DomainError, ShapeError
from .model import VqcModel, forward_batch, grad_theta_analytic, grad_x_mixed
from .trainer import evaluate

#: Relative singular-value cutoff of the least-squares solve.
RCOND = 1e-12
#: Default tolerance of the transition classifier.
TRANSITION_TOL = 1e-9


@dataclass(frozen=True)
class AlignmentConfig:
    label_weight: float = 1.0
    mode: Literal["nearest", "one_to_one_greedy"] = "nearest"

    def __post_init__(self):
        if not (math.isfinite(self.label_weight) and self.label_weight >= 0):
            raise DomainError(f"label_weight must be finite and >= 0, got {self.label_weight!r}")
        if self.mode not in ("nearest", "one_to_one_greedy"):
            raise DomainError(f"unknown alignment mode {self.mode!r}")


@dataclass(frozen=True)
class AlignedPair:
    source: LabeledSample
    target: LabeledSample

    @property
    def delta_x(self) -> np.ndarray:
        return self.target.x - self.source.x

    @property
    def delta_y(self) -> float:
        return self.target.y - self.source.y


@dataclass(frozen=True)
class Alignment:
    """Pairs stored column-wise: row ``i`` matches ``source[i]`` with ``target[i]``.

    ``source_index`` records which original source sample each row came from.
    """

    source: Dataset
    target: Dataset
    source_index: np.ndarray

    def __post_init__(self):
        if len(self.source) != len(self.target):
            raise ShapeError("aligned source and target must have the same length")
        if self.source.d != self.target.d:
            raise ShapeError("aligned source and target differ in feature dimension")

    @classmethod
    def identity(cls, source: Dataset, target: Dataset) -> "Alignment":
        """Pair ``source[i]`` with ``target[i]`` without searching."""
        return cls(source, target, np.arange(len(source)))

    def __len__(self) -> int:
        return len(self.target)

    def __iter__(self) -> Iterator[AlignedPair]:
        for s, t in zip(self.source, self.target):
            yield AlignedPair(s, t)

    def __getitem__(self, i: int) -> AlignedPair:
        return AlignedPair(
            LabeledSample(self.source.x[i].copy(), float(self.source.y[i])),
            LabeledSample(self.target.x[i].copy(), float(self.target.y[i])),
        )

    @property
    def delta_x(self) -> np.ndarray:
        return self.target.x - self.source.x

    @property
    def delta_y(self) -> np.ndarray:
        return self.target.y - self.source.y


def _pair_costs(source: Dataset, tx: np.ndarray, ty: np.ndarray, w: float) -> np.ndarray:
    diff = tx[:, None, :] - source.x[None, :, :]
    cost = np.einsum("tsd,tsd->ts", diff, diff)
    if w:
        cost += w * (ty[:, None] - source.y[None, :]) ** 2
    return cost


def _nearest(source: Dataset, target: Dataset, w: float, chunk: int = 512) -> np.ndarray:
    out = np.empty(len(target), dtype=np.intp)
    best = np.empty(len(target))
    for lo in range(0, len(target), chunk):
        cost = _pair_costs(source, target.x[lo:lo + chunk], target.y[lo:lo + chunk], w)
        # argmin returns the first minimum, i.e. the lowest source index on ties
        out[lo:lo + chunk] = np.argmin(cost, axis=1)
        best[lo:lo + chunk] = cost[np.arange(cost.shape[0]), out[lo:lo + chunk]]
    return out, best


def align(source: Dataset, target: Dataset, cfg: AlignmentConfig = AlignmentConfig()) -> Alignment:
    """Pair every target sample with a source sample.

    The matching cost is ``|x~ - x|^2 + label_weight * (y~ - y)^2``. In
    ``nearest`` mode each target takes its cheapest source (lowest index on
    ties), so sources may repeat. In ``one_to_one_greedy`` mode targets are
    visited by ascending best-match cost and each takes the cheapest source
    not yet used.
    """
    if len(source) == 0 or len(target) == 0:
        raise DomainError("alignment needs nonempty source and target")
    if source.d != target.d:
        raise ShapeError(f"source has {source.d} features, target has {target.d}")
    idx, best = _nearest(source, target, cfg.label_weight)
    if cfg.mode == "one_to_one_greedy":
        if len(source) < len(target):
            raise DomainError("one_to_one_greedy needs at least as many source as target samples")
        used = np.zeros(len(source), dtype=bool)
        for t in np.argsort(best, kind="stable"):
            cost = _pair_costs(source, target.x[t:t + 1], target.y[t:t + 1], cfg.label_weight)[0]
            cost[used] = np.inf
            idx[t] = int(np.argmin(cost))
            used[idx[t]] = True
    return Alignment(source[idx], target, idx)


def compute_r(model: VqcModel, pairs: Alignment) -> np.ndarray:
    """Mixed-argument input sensitivities, one row per pair, in raw feature units.

    Encoding gates left of the commutator use the source features, gates
    inside it use the target features; the variational block keeps the
    pretrained angles.
    """
    return grad_x_mixed(model, pairs.source.x, pairs.target.x)


def compute_z(model: VqcModel, x) -> np.ndarray:
    """Parameter sensitivities at the source inputs (pretrained angles)."""
    return grad_theta_analytic(model, x)


@dataclass(frozen=True)
class TransferSystem:
    Z: np.ndarray
    R: np.ndarray
    q: np.ndarray
    pairs: Alignment
    pretrain_error: np.ndarray
    #: Bound on |z| entries (spectral norm of H); sets the absolute rank floor.
    output_bound: float = 0.0

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @property
    def domain_mismatch(self) -> np.ndarray:
        """``delta_y - <r, delta_x>`` per pair."""
        return self.q - self.pretrain_error


def compute_residue(model: VqcModel, pairs: Alignment) -> TransferSystem:
    """Assemble ``Z``, ``R`` and the transfer residue ``q``."""
    if len(pairs) == 0:
        raise DomainError("no aligned pairs")
    if pairs.source.d != model.d:
        raise ShapeError(f"pairs have {pairs.source.d} features, model encodes {model.d}")
    Z = compute_z(model, pairs.source.x)
    R = compute_r(model, pairs)
    self_correction = np.einsum("nd,nd->n", R, pairs.delta_x)
    pretrain_error = pairs.source.y - forward_batch(model, pairs.source.x)
    q = pairs.delta_y - self_correction + pretrain_error
    for name, a in (("Z", Z), ("R", R), ("q", q)):
        if not np.all(np.isfinite(a)):
            raise DomainError(f"transfer system has non-finite entries in {name}")
    bound = float(np.max(np.abs(np.linalg.eigvalsh(model.observable))))
    return TransferSystem(Z=Z, R=R, q=q, pairs=pairs, pretrain_error=pretrain_error, output_bound=bound)


@dataclass(frozen=True)
class QvaSolution:
    delta_theta: np.ndarray
    residual_norm: float
    rank: int
    singular_value_cutoff: float
    singular_values: np.ndarray

    @property
    def degenerate(self) -> bool:
        """True when no direction of ``Z`` survived the cutoff."""
        return self.rank == 0


def lstsq_min_norm(Z, q, rcond: float = RCOND, scale: float = 0.0) -> tuple[np.ndarray, int, float, np.ndarray]:
    """Minimum-norm least-squares solution through a thin SVD.

    Singular values at or below ``rcond * max(s_max, scale)`` are dropped.
    ``scale`` is a reference size for ``Z``; it keeps a matrix made only of
    rounding noise from being treated as full rank.
    """
    Z = np.asarray(Z, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    u, s, vt = np.linalg.svd(Z, full_matrices=False)
    cutoff = rcond * max(s[0] if s.size else 0.0, scale)
    keep = s > cutoff
    coeff = (u[:, keep].T @ q) / s[keep]
    return vt[keep].T @ coeff, int(keep.sum()), float(cutoff), s


def qva_solve(system: TransferSystem) -> QvaSolution:
    """``delta_theta* = pinv(Z) q``.

    Directions of ``Z`` whose singular value is negligible, relative to the
    largest one or to ``sqrt(N) * output_bound``, receive no update.
    """
    Z, q = system.Z, system.q
    if Z.ndim != 2 or Z.shape[0] < 1 or Z.shape[1] < 1:
        raise ShapeError(f"Z must be a nonempty matrix, got shape {Z.shape}")
    delta, rank, cutoff, s = lstsq_min_norm(Z, q, scale=np.sqrt(Z.shape[0]) * system.output_bound)
    resid = float(np.linalg.norm(Z @ delta - q))
    return QvaSolution(delta, resid, rank, cutoff, s)


class TransitionType(str, Enum):
    TYPE1 = "Type1"  # same inputs, same labels
    TYPE2 = "Type2"  # new inputs, same labels
    TYPE3 = "Type3"  # same inputs, new labels
    TYPE4 = "Type4"  # both change


def classify_pair(delta_x, delta_y: float, tol: float = TRANSITION_TOL) -> TransitionType:
    moved = float(np.max(np.abs(delta_x), initial=0.0)) > tol
    relabeled = abs(float(delta_y)) > tol
    if moved:
        return TransitionType.TYPE4 if relabeled else TransitionType.TYPE2
    return TransitionType.TYPE3 if relabeled else TransitionType.TYPE1


def classify_transitions(pairs: Alignment, tol: float = TRANSITION_TOL) -> dict[str, int]:
    """Count pairs per transition type."""
    if not tol > 0:
        raise DomainError(f"tol must be > 0, got {tol!r}")
    hist = {t.value: 0 for t in TransitionType}
    for dx, dy in zip(pairs.delta_x, pairs.delta_y):
        hist[classify_pair(dx, dy, tol).value] += 1
    return hist


@dataclass(frozen=True)
class AdaptResult:
    model: VqcModel
    solution: QvaSolution
    system: TransferSystem


def adapt(model: VqcModel, source: Dataset, target: Dataset,
          cfg: AlignmentConfig = AlignmentConfig()) -> AdaptResult:
    """Align, linearize, solve, and return the model with ``theta + delta_theta*``."""
    pairs = align(source, target, cfg)
    system = compute_residue(model, pairs)
    solution = qva_solve(system)
    return AdaptResult(model.with_theta(model.theta + solution.delta_theta), solution, system)


def qva_report(before: VqcModel, result: AdaptResult, target: Dataset,
               tol: float = TRANSITION_TOL) -> dict:
    return {
        "delta_theta": [float(v) for v in result.solution.delta_theta],
        "residual_norm": result.solution.residual_norm,
        "rank": result.solution.rank,
        "q_norm": float(np.linalg.norm(result.system.q)),
        "transition_histogram": classify_transitions(result.system.pairs, tol),
        "accuracy_before": evaluate(before, target).accuracy,
        "accuracy_after": evaluate(result.model, target).accuracy,
    }


def write_report(path, report: dict) -> None:
    Path(path).write_text(json.dumps(report, indent=2) + "\n")
