"""
Time each kernel under the numba and the pure-numpy backend on identical
inputs, plus one end-to-end simulation per model kind.

    python benchmarks/bench_kernels.py [--repeat N]

The first numba call (compilation, or loading the on-disk cache) is done
before timing starts. Output is a plain table; the max-abs column checks that
both paths return the same numbers.
"""
import argparse
import time

import numpy as np

from perarfima import (build_companion, kernels, pi_coeffs, psi_coeffs, reference_spec,
                       simulate)


def _cases(rng):
    n, m = 12_000, 10_001
    x = rng.standard_normal(n)
    w = psi_coeffs(0.4, m - 1).coeffs
    c = build_companion(reference_spec("B"))
    lead, lags = np.linalg.inv(c.Phi0), c.monic_lags()
    u = rng.standard_normal((12_000, 4))
    y = rng.standard_normal(20_000)
    pi = np.stack([pi_coeffs(d, 400).coeffs for d in (0.1, 0.2, 0.3, 0.4)])
    return {
        "causal_filter n=12000 M=10000": lambda: kernels.causal_filter(x, w, 2000),
        "var_recursion 12000x4": lambda: kernels.var_recursion(lead, lags, u),
        "season_lag_products T=20000 J=100": lambda: kernels.season_lag_products(y, 4, 100),
        "periodic_ma S=4 J=400": lambda: kernels.periodic_ma(pi),
        "simulate model B T=5000": lambda: simulate(reference_spec("B"), 5000, seed=1).values,
        "simulate model C T=5000": lambda: simulate(reference_spec("C"), 5000, seed=1).values,
    }


def _best_of(func, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = func()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    cases = _cases(np.random.default_rng(0))
    backends = ["numpy"] + (["numba"] if kernels.HAS_NUMBA else [])
    timings = {}
    outputs = {}
    for backend in backends:
        previous = kernels.set_backend(backend)
        try:
            for name, func in cases.items():
                func()  # warm-up / JIT
                timings[name, backend], outputs[name, backend] = _best_of(func, args.repeat)
        finally:
            kernels.set_backend(previous)

    print(f"{'kernel':38s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s} {'max abs diff':>13s}")
    for name in cases:
        t_np = timings[name, "numpy"] * 1e3
        if "numba" in backends:
            t_nb = timings[name, "numba"] * 1e3
            a, b = outputs[name, "numpy"], outputs[name, "numba"]
            if isinstance(a, tuple):
                a, b = np.concatenate([np.ravel(v) for v in a]), np.concatenate([np.ravel(v) for v in b])
            diff = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
            print(f"{name:38s} {t_np:11.2f} {t_nb:11.2f} {t_np / t_nb:8.1f} {diff:13.2e}")
        else:
            print(f"{name:38s} {t_np:11.2f} {'n/a':>11s}")


if __name__ == "__main__":
    main()
