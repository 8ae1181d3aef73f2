"""Compare the compiled and pure-Python kernel backends.

Times each kernel on small dense inputs (the sizes the drivers use) and
geometry-correcting runs end to end. Rounding differs slightly between the
backends, so their trajectories (and iteration counts) diverge; the end to
end row therefore reports time per iteration over a few seeds. Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--n 16]
"""
import argparse
import timeit

import numpy as np

from dfo_kit import TRConfig, make_problem, run
from dfo_kit import _kernels


def kernel_cases(n, rng):
    g = rng.standard_normal(n)
    A = rng.standard_normal((n, n))
    H = A @ A.T / n
    Y = np.eye(n) + 0.1 * rng.standard_normal((n, n))
    x = rng.standard_normal(n)
    return {
        "noise_unit": lambda: _kernels.noise_unit(12345, x),
        "cauchy_step": lambda: _kernels.cauchy_step(g, H, 0.5),
        "steihaug_cg": lambda: _kernels.steihaug_cg(g, H, 0.5, 2 * n, 1e-10),
        "inv_transpose": lambda: _kernels.inv_transpose(Y),
        "column_norms": lambda: _kernels.column_norms(Y),
    }


def per_iteration(n, seeds=3):
    """Wall time per iteration of ``alg2`` on ``seeds`` rotated quadratics."""
    total, iters = 0.0, 0
    for s in range(seeds):
        p = make_problem({"family": "quadratic", "n": n, "eigenvalues": [1, 10], "rotate_seed": s})
        t0 = timeit.default_timer()
        res = run("alg2", p, TRConfig(budget=200_000), 1e-3)
        total += timeit.default_timer() - t0
        iters += res.K
    return total / iters


def best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=16)
    args = ap.parse_args()
    backends = _kernels.available_backends()
    prev = _kernels.BACKEND
    timings = {}
    for b in backends:
        _kernels.set_backend(b)
        rng = np.random.default_rng(0)
        for name, fn in kernel_cases(args.n, rng).items():
            timings[(name, b)] = best(fn, args.repeat, 2000)
        timings[("alg2 per iteration", b)] = per_iteration(args.n)
    _kernels.set_backend(prev)
    names = list(dict.fromkeys(k[0] for k in timings))
    print(f"{'kernel':<20}" + "".join(f"{b:>14}" for b in backends) + ("   speedup" if len(backends) > 1 else ""))
    for name in names:
        row = [timings[(name, b)] for b in backends]
        line = f"{name:<20}" + "".join(f"{t * 1e6:>11.2f} us" for t in row)
        if len(backends) > 1:
            line += f"{row[1] / row[0]:>9.2f}x"
        print(line)
    if len(backends) == 1:
        print("compiled kernels not available; only the pure-Python backend was timed")


if __name__ == "__main__":
    main()
