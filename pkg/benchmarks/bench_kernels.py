#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the fusion forward/backward kernel at production-like sizes
(768-dim embeddings, 1024/256/32 heads) and the logistic-regression
gradient kernel, and reports the max cross-backend deviation. The first
numba call pays JIT compilation; kernels are cached on disk afterwards.

Usage: python benchmarks/bench_kernels.py [--batch 64] [--iters 30]
"""

import argparse
import time

import numpy as np

from jguard.kernels import kernels_for


def _net(batch, d=768, n=13, h1=1024, l=256, h2=32, seed=0):
    rng = np.random.Generator(np.random.PCG64(seed))
    x = np.ascontiguousarray(rng.normal(size=(batch, d + n)))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    y = np.ascontiguousarray(rng.integers(0, 2, batch))
    params = []
    for fan_in, fan_out in ((d + n, h1), (h1, l), (l, h2), (h2, 2)):
        params.append(np.ascontiguousarray(rng.normal(size=(fan_in, fan_out)) / np.sqrt(fan_in)))
        params.append(np.zeros(fan_out))
    m1 = np.ascontiguousarray((rng.random((batch, h1)) >= 0.2) / 0.8)
    m2 = np.ascontiguousarray((rng.random((batch, h2)) >= 0.2) / 0.8)
    return x, y, params, m1, m2


def _time(fn, iters):
    fn()  # warm-up (JIT compile on the numba path)
    start = time.perf_counter()
    for _ in range(iters):
        fn()
    return (time.perf_counter() - start) / iters


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--batch", type=int, default=64)
    parser.add_argument("--iters", type=int, default=30)
    args = parser.parse_args()

    backends = {"numpy": kernels_for("numpy")}
    try:
        backends["numba"] = kernels_for("numba")
    except RuntimeError:
        print("numba unavailable; timing the numpy fallback only")

    x, y, params, m1, m2 = _net(args.batch)
    rng = np.random.Generator(np.random.PCG64(1))
    lr_x = np.ascontiguousarray(rng.normal(size=(4096, 13)))
    lr_y = np.ascontiguousarray(rng.integers(0, 2, 4096).astype(np.float64))
    lr_w = rng.normal(size=13)

    results = {}
    for name, k in backends.items():
        results[name] = {
            "fusion_loss_grads": _time(lambda: k.fusion_loss_grads(x, y, *params, m1, m2),
                                       args.iters),
            "fusion_forward": _time(lambda: k.fusion_forward(x, *params), args.iters),
            "lr_loss_grad": _time(lambda: k.lr_loss_grad(lr_x, lr_y, lr_w, 0.1, 0.01),
                                  args.iters),
        }

    print(f"batch={args.batch} d=768 h1=1024 l=256 h2=32, {args.iters} iters each")
    print(f"{'kernel':<20} " + " ".join(f"{n:>12}" for n in results))
    for kernel in ("fusion_loss_grads", "fusion_forward", "lr_loss_grad"):
        row = " ".join(f"{results[n][kernel] * 1e3:>10.3f}ms" for n in results)
        print(f"{kernel:<20} {row}")

    if len(backends) == 2:
        a = backends["numpy"].fusion_loss_grads(x, y, *params, m1, m2)
        b = backends["numba"].fusion_loss_grads(x, y, *params, m1, m2)
        worst = max(float(np.max(np.abs(np.asarray(u) - np.asarray(v))))
                    for u, v in zip(a[1:], b[1:]))
        print(f"cross-backend: |loss diff|={abs(a[0] - b[0]):.2e}, "
              f"max grad deviation={worst:.2e}")
        assert np.allclose(a[0], b[0], rtol=1e-9)


if __name__ == "__main__":
    main()
