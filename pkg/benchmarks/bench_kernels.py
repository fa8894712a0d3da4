"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--rows 2000] [--repeat 20]

Also times one full pretraining run per backend, which is dominated by
mini-batch forward calls of 32 rows.
"""
import argparse
import timeit
from dataclasses import replace

import numpy as np

from vqc_transfer import _kernels
from vqc_transfer.experiment import BenchmarkConfig, benchmark_data, pretrain
from vqc_transfer.qcore import basis_state, pauli


def time_kernels(rows, repeat):
    rng = np.random.default_rng(0)
    enc, var = (1, 2), (3, 2, 3)
    theta = rng.normal(size=3)
    xs = rng.normal(size=(rows, 2))
    xt = xs + 0.05 * rng.normal(size=xs.shape)
    h, psi = pauli(3), basis_state(0)
    calls = {
        "forward_batch": lambda b: _kernels.forward_batch(enc, var, theta, xs, h, psi, backend=b),
        "grad_theta_batch": lambda b: _kernels.grad_theta_batch(enc, var, theta, xs, h, psi, backend=b),
        "grad_x_batch": lambda b: _kernels.grad_x_batch(enc, var, theta, xs, xt, h, psi, backend=b),
        "forward_batch[32 rows]": lambda b: _kernels.forward_batch(enc, var, theta, xs[:32], h, psi, backend=b),
    }
    print(f"{'kernel':<24}" + "".join(f"{b:>14}" for b in _kernels.BACKENDS) + "   (ms per call)")
    for name, fn in calls.items():
        cells = []
        for backend in _kernels.BACKENDS:
            t = min(timeit.repeat(lambda: fn(backend), number=1, repeat=repeat))
            cells.append(f"{t * 1e3:14.4f}")
        print(f"{name:<24}" + "".join(cells))


def time_pretrain():
    cfg = BenchmarkConfig()
    source, _ = benchmark_data(cfg)
    for backend in _kernels.BACKENDS:
        _kernels.BACKEND = backend
        t = timeit.default_timer()
        model, curve = pretrain(source, replace(cfg))
        print(f"pretrain [{backend}]: {timeit.default_timer() - t:.2f}s, final accuracy {curve[-1].accuracy:.4f}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=2000)
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()
    time_kernels(args.rows, args.repeat)
    time_pretrain()


if __name__ == "__main__":
    main()
