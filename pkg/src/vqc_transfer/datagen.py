"""Two-moons data, target-domain transforms and CSV persistence."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import Dataset
from .errors import CsvParseError, DomainError, ShapeError
from .rng import box_muller, substream

CSV_HEADER = ("x1", "x2", "y")


@dataclass(frozen=True)
class MoonsConfig:
    n: int = 2000
    noise_sigma: float = 0.15
    seed: int = 42

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2 or self.n % 2:
            raise DomainError(f"n must be an even integer >= 2, got {self.n!r}")
        if not (self.noise_sigma >= 0 and math.isfinite(self.noise_sigma)):
            raise DomainError(f"noise_sigma must be finite and >= 0, got {self.noise_sigma!r}")


@dataclass(frozen=True)
class DomainTransform:
    """Rotation about the data centroid, then translation, then Gaussian noise."""

    rotation_deg: float = 0.0
    translation: tuple[float, float] = (0.0, 0.0)
    extra_noise: float = 0.0

    def __post_init__(self):
        if len(self.translation) != 2:
            raise ShapeError("translation must have two components")
        if not (self.extra_noise >= 0 and math.isfinite(self.extra_noise)):
            raise DomainError(f"extra_noise must be finite and >= 0, got {self.extra_noise!r}")
        object.__setattr__(self, "translation", tuple(float(t) for t in self.translation))


#: Target-domain shift used by the benchmark.
DEFAULT_TRANSFORM = DomainTransform(rotation_deg=75.0)


def make_moons(cfg: MoonsConfig) -> Dataset:
    """Two interleaved half circles.

    The first ``n/2`` samples lie on the upper arc ``(cos t, sin t)`` with
    label -1, the rest on the lower arc ``(1 - cos t, 0.5 - sin t)`` with label
    +1, ``t`` uniform on ``[0, pi]``. Each sample consumes three uniforms from
    the ``"data"`` substream in the order ``t, u1, u2``; ``(u1, u2)`` become the
    two noise components through Box-Muller.
    """
    rng = substream(cfg.seed, "data")
    u = rng.random((cfg.n, 3))
    t = np.pi * u[:, 0]
    half = cfg.n // 2
    x = np.empty((cfg.n, 2))
    x[:half, 0] = np.cos(t[:half])
    x[:half, 1] = np.sin(t[:half])
    x[half:, 0] = 1.0 - np.cos(t[half:])
    x[half:, 1] = 0.5 - np.sin(t[half:])
    if cfg.noise_sigma > 0:
        n1, n2 = box_muller(u[:, 1], u[:, 2])
        x[:, 0] += cfg.noise_sigma * n1
        x[:, 1] += cfg.noise_sigma * n2
    y = np.where(np.arange(cfg.n) < half, -1.0, 1.0)
    return Dataset(x, y)


def transform_domain(data: Dataset, t: DomainTransform, seed: int = 0) -> Dataset:
    """Apply ``t`` to the features of ``data``; labels are kept."""
    if data.d != 2:
        raise ShapeError(f"domain transforms need 2-D features, got d={data.d}")
    x = data.x
    if len(data) and t.rotation_deg != 0.0:
        centroid = x.mean(axis=0)
        a = math.radians(t.rotation_deg)
        rot = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
        x = (x - centroid) @ rot.T + centroid
    if t.translation != (0.0, 0.0):
        x = x + np.asarray(t.translation)
    if t.extra_noise > 0:
        u = substream(seed, "noise").random((len(data), 2))
        n1, n2 = box_muller(u[:, 0], u[:, 1])
        x = x + t.extra_noise * np.column_stack([n1, n2])
    return Dataset(x, data.y)


def benchmark_domains(seed: int = 42, n: int = 2000, noise_sigma: float = 0.15,
                      transform: DomainTransform = DEFAULT_TRANSFORM) -> tuple[Dataset, Dataset]:
    """Source and target datasets of the default transfer benchmark."""
    source = make_moons(MoonsConfig(n=n, noise_sigma=noise_sigma, seed=seed))
    return source, transform_domain(source, transform, seed=seed)


def dumps_csv(data: Dataset) -> str:
    if data.d not in (0, 2):
        raise ShapeError(f"CSV format stores 2 features, dataset has {data.d}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for (a, b), label in zip(data.x.tolist(), data.y.tolist()):
        writer.writerow([repr(a), repr(b), str(int(label))])
    return buf.getvalue()


def write_csv(path, data: Dataset) -> None:
    Path(path).write_text(dumps_csv(data))


def read_csv(path) -> Dataset:
    with open(path, newline="") as fh:
        return parse_csv(fh)


def parse_csv(lines) -> Dataset:
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise CsvParseError("missing header", 1) from None
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise CsvParseError(f"expected header {','.join(CSV_HEADER)}, got {','.join(header)}", 1)
    xs, ys = [], []
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != 3:
            raise CsvParseError(f"expected 3 fields, got {len(row)}", line)
        try:
            a, b, label = (float(v) for v in row)
        except ValueError as exc:
            raise CsvParseError(str(exc), line) from None
        if not (math.isfinite(a) and math.isfinite(b)):
            raise CsvParseError("features must be finite", line)
        if label not in (-1.0, 1.0):
            raise CsvParseError(f"label must be -1 or +1, got {row[2]}", line)
        xs.append((a, b))
        ys.append(label)
    return Dataset(np.array(xs).reshape(-1, 2), np.array(ys))
