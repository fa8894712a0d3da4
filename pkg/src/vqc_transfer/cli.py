"""Command-line driver for the two-moons transfer benchmark.

Machine-readable JSON goes to stdout, logs go to stderr. Exit codes: 0
success, 2 data or I/O error, 3 numeric failure, 64 bad flags.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path


from . import _kernels
from .datagen import (DEFAULT_TRANSFORM, DomainTransform, MoonsConfig, make_moons, read_csv,
                      transform_domain, write_csv)
from .errors import CsvParseError, DomainError, PreconditionError, ShapeError, TrainingError
from .model import DEFAULT_ANGLE_SPAN, DEFAULT_CIRCUIT, circuit_from_dict, load_model, save_model
from .experiment import BenchmarkConfig, crossover_epoch, pretrain, run_benchmark
from .trainer import FINETUNE, PRETRAIN, TrainConfig, evaluate, fit_gd, write_curve
from .transfer import AlignmentConfig, adapt, qva_report, write_report

log = logging.getLogger("vqc_transfer")

EXIT_DATA = 2
EXIT_NUMERIC = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _batch(text):
    return "full" if text == "full" else _positive_int(text)


def _emit(doc):
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _train_config(args, prefix=""):
    return TrainConfig(
        learning_rate=getattr(args, prefix + "lr"),
        epochs=getattr(args, prefix + "epochs"),
        batch_size=getattr(args, prefix + "batch"),
        seed=args.seed,
    )


def _check_dims(model, *datasets):
    for data in datasets:
        if data.d != model.d:
            raise ShapeError(f"dataset has {data.d} features, model encodes {model.d}")


def cmd_gen_data(args):
    if args.base:
        data = read_csv(args.base)
        source_cfg = {"base": args.base}
    else:
        cfg = MoonsConfig(n=args.n, noise_sigma=args.noise, seed=args.seed)
        data = make_moons(cfg)
        source_cfg = dataclasses.asdict(cfg)
    rotate = args.rotate_deg
    if rotate is None:
        rotate = DEFAULT_TRANSFORM.rotation_deg if args.target_out else 0.0
    transform = DomainTransform(rotate, tuple(args.translate), args.extra_noise)
    shifted = transform_domain(data, transform, seed=args.seed)
    if args.target_out:
        write_csv(args.out, data)
        write_csv(args.target_out, shifted)
    else:
        write_csv(args.out, shifted)
    _emit({
        "source": source_cfg,
        "transform": dataclasses.asdict(transform),
        "seed": args.seed,
        "out": args.out,
        "target_out": args.target_out,
        "rows": len(data),
    })


def _pretrain(data, args):
    spec = DEFAULT_CIRCUIT
    if args.circuit:
        spec = circuit_from_dict(json.loads(Path(args.circuit).read_text()))
    cfg = BenchmarkConfig(seed=args.seed, circuit=spec, angle_span=args.angle_span,
                          pretrain=_train_config(args))
    return pretrain(data, cfg)


def cmd_pretrain(args):
    data = read_csv(args.data)
    try:
        model, curve = _pretrain(data, args)
    except TrainingError as exc:
        save_model(exc.model, args.out)
        raise
    save_model(model, args.out)
    write_curve(args.curve or str(Path(args.out).with_suffix(".curve.csv")), curve)
    m = evaluate(model, data)
    _emit({"accuracy": m.accuracy, "loss": m.loss, "n": m.n, "epochs": len(curve), "seed": args.seed})


def cmd_eval(args):
    model = load_model(args.model)
    data = read_csv(args.data)
    _check_dims(model, data)
    m = evaluate(model, data)
    _emit({"accuracy": m.accuracy, "error_rate": m.error_rate, "loss": m.loss, "n": m.n})


def cmd_adapt(args):
    model = load_model(args.model)
    target = read_csv(args.target)
    _check_dims(model, target)
    before = evaluate(model, target).accuracy
    if args.mode == "qva":
        if not args.source:
            raise DomainError("qva mode needs --source")
        source = read_csv(args.source)
        _check_dims(model, source)
        result = adapt(model, source, target, AlignmentConfig(args.label_weight, args.align_mode))
        report = qva_report(model, result, target)
        save_model(result.model, args.out)
        if args.report:
            write_report(args.report, report)
        after = report["accuracy_after"]
    else:
        try:
            adapted, curve = fit_gd(model, target, _train_config(args))
        except TrainingError as exc:
            save_model(exc.model, args.out)
            raise
        save_model(adapted, args.out)
        write_curve(args.curve or str(Path(args.out).with_suffix(".curve.csv")), curve)
        after = curve[-1].accuracy
        if args.report:
            write_report(args.report, {"accuracy_before": before, "accuracy_after": after,
                                       "epochs": len(curve)})
    _emit({"mode": args.mode, "accuracy_before": before, "accuracy_after": after})


def _benchmark_config(args):
    spec = DEFAULT_CIRCUIT
    if args.circuit:
        spec = circuit_from_dict(json.loads(Path(args.circuit).read_text()))
    return BenchmarkConfig(
        seed=args.seed,
        n=args.n,
        noise_sigma=args.noise,
        transform=DomainTransform(args.rotate_deg),
        circuit=spec,
        angle_span=args.angle_span,
        pretrain=TrainConfig(learning_rate=args.lr, epochs=args.epochs, batch_size=args.batch),
        finetune=TrainConfig(learning_rate=args.ft_lr, epochs=args.ft_epochs, batch_size=args.ft_batch),
        alignment=AlignmentConfig(args.label_weight, args.align_mode),
    )


def cmd_compare(args):
    if bool(args.source) != bool(args.target):
        raise DomainError("give both --source and --target, or neither")
    source = read_csv(args.source) if args.source else None
    target = read_csv(args.target) if args.target else None
    res = run_benchmark(_benchmark_config(args), source, target)
    qva_acc = res.qva_target_acc
    crossover = crossover_epoch([p.accuracy for p in res.gd_curve], qva_acc)
    summary = {
        "pretrain_acc": res.pretrain_acc,
        "unadapted_target_acc": res.unadapted_target_acc,
        "qva_target_acc": qva_acc,
        "gd_final_acc": res.gd_curve[-1].accuracy,
        "crossover_epoch": crossover or "none",
        "qva": res.qva_report,
        "seed": args.seed,
    }
    model, timings = res.pretrained, res.timings
    lines = ["epoch,gd_loss,gd_accuracy,qva_accuracy"]
    lines += [f"{p.epoch},{p.loss!r},{p.accuracy!r},{qva_acc!r}" for p in res.gd_curve]
    Path(args.out_csv).write_text("\n".join(lines) + "\n")
    Path(args.summary).write_text(json.dumps(summary, indent=2) + "\n")
    if args.model_out:
        save_model(model, args.model_out)
    config = {k: v for k, v in vars(args).items() if k != "func"}
    _emit({
        "config_echo": config,
        "metrics": {
            "pretrain_acc": summary["pretrain_acc"],
            "unadapted_target_acc": summary["unadapted_target_acc"],
            "qva_target_acc": qva_acc,
            "gd_curve": args.out_csv,
            "crossover_epoch": summary["crossover_epoch"],
        },
        "timings": timings,
        "seed": args.seed,
        "backend": _kernels.BACKEND,
    })


def _add_pretrain_flags(p):
    p.add_argument("--epochs", type=_positive_int, default=PRETRAIN.epochs)
    p.add_argument("--lr", type=float, default=PRETRAIN.learning_rate)
    p.add_argument("--batch", type=_batch, default=PRETRAIN.batch_size)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--circuit", help="JSON file with encoding_axes and variational_axes")
    p.add_argument("--angle-span", type=float, default=DEFAULT_ANGLE_SPAN,
                   help="radians assigned to one feature standard deviation")


def _add_align_flags(p):
    p.add_argument("--label-weight", type=float, default=1.0)
    p.add_argument("--align-mode", choices=["nearest", "one_to_one_greedy"], default="nearest")


def build_parser():
    parser = _Parser(prog="vqc-transfer", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-data", help="write two-moons CSV data")
    p.add_argument("--n", type=_positive_int, default=2000)
    p.add_argument("--noise", type=float, default=0.15)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.add_argument("--target-out", help="also write a transformed copy here")
    p.add_argument("--base", help="transform an existing CSV instead of sampling")
    p.add_argument("--rotate-deg", type=float)
    p.add_argument("--translate", type=float, nargs=2, default=(0.0, 0.0), metavar=("DX", "DY"))
    p.add_argument("--extra-noise", type=float, default=0.0)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("pretrain", help="train a model from random angles")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--curve", help="curve CSV path (default: <out>.curve.csv)")
    _add_pretrain_flags(p)
    p.set_defaults(func=cmd_pretrain)

    p = sub.add_parser("eval", help="loss and accuracy of a model on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("adapt", help="adapt a model to a target domain")
    p.add_argument("mode", choices=["qva", "gd"])
    p.add_argument("--model", required=True)
    p.add_argument("--source")
    p.add_argument("--target", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.add_argument("--curve")
    p.add_argument("--epochs", type=_positive_int, default=FINETUNE.epochs)
    p.add_argument("--lr", type=float, default=FINETUNE.learning_rate)
    p.add_argument("--batch", type=_batch, default=FINETUNE.batch_size)
    p.add_argument("--seed", type=int, default=42)
    _add_align_flags(p)
    p.set_defaults(func=cmd_adapt)

    p = sub.add_parser("compare", help="pretrain, then adapt with QVA and with GD")
    p.add_argument("--source")
    p.add_argument("--target")
    p.add_argument("--n", type=_positive_int, default=2000)
    p.add_argument("--noise", type=float, default=0.15)
    p.add_argument("--rotate-deg", type=float, default=DEFAULT_TRANSFORM.rotation_deg)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--summary", required=True)
    p.add_argument("--model-out")
    _add_pretrain_flags(p)
    p.add_argument("--ft-epochs", type=_positive_int, default=FINETUNE.epochs)
    p.add_argument("--ft-lr", type=float, default=FINETUNE.learning_rate)
    p.add_argument("--ft-batch", type=_batch, default=FINETUNE.batch_size)
    _add_align_flags(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except TrainingError as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    except (OSError, CsvParseError, DomainError, ShapeError, PreconditionError, KeyError,
            json.JSONDecodeError) as exc:
        log.error("%s", exc)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
