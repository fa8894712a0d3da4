"""Single-qubit variational circuits and one-shot domain adaptation."""
from ._kernels import BACKEND
from .dataset import Dataset, LabeledSample
from .datagen import DomainTransform, MoonsConfig, make_moons, read_csv, transform_domain, write_csv
from .errors import CsvParseError, DomainError, PreconditionError, ShapeError, TrainingError
from .model import (CircuitSpec, FeatureScaler, VqcModel, forward, grad_theta_analytic,
                    grad_theta_shift, grad_x, predict)
from .trainer import TrainConfig, evaluate, fit_gd, loss
from .transfer import AlignmentConfig, adapt, align, classify_transitions, compute_residue, qva_solve

__version__ = "0.1.0"
