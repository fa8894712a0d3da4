"""Labelled samples and the array-backed dataset container."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import DomainError, ShapeError


@dataclass(frozen=True)
class LabeledSample:
    x: np.ndarray
    y: float

    def __post_init__(self):
        if self.y not in (-1.0, 1.0):
            raise DomainError(f"labels must be -1 or +1, got {self.y!r}")


@dataclass(frozen=True)
class Dataset:
    """``N`` samples stored as a feature matrix ``x`` (N, d) and labels ``y`` (N,)."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=np.float64)
        y = np.array(self.y, dtype=np.float64).reshape(-1)
        if x.ndim == 1 and x.size == 0:
            x = x.reshape(0, 0)
        if x.ndim != 2:
            raise ShapeError(f"features must be a 2-D array, got shape {x.shape}")
        if x.shape[0] != y.shape[0]:
            raise ShapeError(f"{x.shape[0]} feature rows but {y.shape[0]} labels")
        if not np.all(np.isfinite(x)):
            raise DomainError("features must be finite")
        if not np.all((y == 1.0) | (y == -1.0)):
            raise DomainError("labels must be -1 or +1")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_samples(cls, samples: Iterable[LabeledSample], d: int | None = None) -> "Dataset":
        samples = list(samples)
        if not samples:
            return cls(np.empty((0, d or 0)), np.empty(0))
        return cls(np.array([s.x for s in samples]), np.array([s.y for s in samples]))

    def __len__(self) -> int:
        return self.x.shape[0]

    def __iter__(self) -> Iterator[LabeledSample]:
        for xi, yi in zip(self.x, self.y):
            yield LabeledSample(xi.copy(), float(yi))

    def __getitem__(self, idx) -> "Dataset":
        idx = np.atleast_1d(np.asarray(idx)) if np.isscalar(idx) else idx
        return Dataset(self.x[idx], self.y[idx])

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def equals(self, other: "Dataset") -> bool:
        return np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y)
