"""The two-moons transfer benchmark: pretrain, then adapt by QVA and by GD."""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

from .datagen import DEFAULT_TRANSFORM, DomainTransform, MoonsConfig, make_moons, transform_domain
from .dataset import Dataset
from .model import DEFAULT_ANGLE_SPAN, DEFAULT_CIRCUIT, CircuitSpec, FeatureScaler, VqcModel, random_init
from .rng import substream
from .trainer import FINETUNE, PRETRAIN, TrainConfig, TrainCurvePoint, evaluate, fit_gd
from .transfer import AdaptResult, AlignmentConfig, adapt, qva_report


@dataclass(frozen=True)
class BenchmarkConfig:
    seed: int = 42
    n: int = 2000
    noise_sigma: float = 0.15
    transform: DomainTransform = DEFAULT_TRANSFORM
    circuit: CircuitSpec = DEFAULT_CIRCUIT
    angle_span: float = DEFAULT_ANGLE_SPAN
    pretrain: TrainConfig = PRETRAIN
    finetune: TrainConfig = FINETUNE
    alignment: AlignmentConfig = field(default_factory=AlignmentConfig)


@dataclass
class BenchmarkResult:
    source: Dataset
    target: Dataset
    pretrained: VqcModel
    pretrain_curve: list[TrainCurvePoint]
    qva: AdaptResult
    qva_report: dict
    gd_model: VqcModel
    gd_curve: list[TrainCurvePoint]
    timings: dict

    @property
    def pretrain_acc(self) -> float:
        return evaluate(self.pretrained, self.source).accuracy

    @property
    def unadapted_target_acc(self) -> float:
        return self.qva_report["accuracy_before"]

    @property
    def qva_target_acc(self) -> float:
        return self.qva_report["accuracy_after"]


def benchmark_data(cfg: BenchmarkConfig) -> tuple[Dataset, Dataset]:
    source = make_moons(MoonsConfig(n=cfg.n, noise_sigma=cfg.noise_sigma, seed=cfg.seed))
    return source, transform_domain(source, cfg.transform, seed=cfg.seed)


def pretrain(source: Dataset, cfg: BenchmarkConfig) -> tuple[VqcModel, list[TrainCurvePoint]]:
    scaler = FeatureScaler.fit(source.x, cfg.angle_span)
    model = random_init(cfg.circuit, scaler, substream(cfg.seed, "init"), seed=cfg.seed)
    return fit_gd(model, source, replace(cfg.pretrain, seed=cfg.seed))


def run_benchmark(cfg: BenchmarkConfig = BenchmarkConfig(), source: Dataset | None = None,
                  target: Dataset | None = None) -> BenchmarkResult:
    timings = {}

    def lap(name, start):
        timings[name] = round((time.perf_counter() - start) * 1000.0, 3)

    t = time.perf_counter()
    if source is None or target is None:
        source, target = benchmark_data(cfg)
    lap("data", t)

    t = time.perf_counter()
    model, curve = pretrain(source, cfg)
    lap("pretrain", t)

    t = time.perf_counter()
    result = adapt(model, source, target, cfg.alignment)
    report = qva_report(model, result, target)
    lap("qva", t)

    t = time.perf_counter()
    gd_model, gd_curve = fit_gd(model, target, replace(cfg.finetune, seed=cfg.seed))
    lap("gd", t)
    return BenchmarkResult(source, target, model, curve, result, report, gd_model, gd_curve, timings)


def crossover_epoch(gd_accuracy, qva_accuracy):
    """First epoch (1-based) where GD accuracy reaches the QVA accuracy, else None."""
    for epoch, acc in enumerate(gd_accuracy, start=1):
        if acc >= qva_accuracy:
            return epoch
    return None
