"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--pairs N] [--nodes N] [--repeat R]
"""

from __future__ import annotations

import argparse
import math
import timeit

import numpy as np

from lhvlab.kernels import available_backends


def bench_tally(mod, pairs: int, repeat: int, family: int, exponent: float) -> float:
    rng = np.random.default_rng(0)
    theta = rng.random(pairs) * 2 * math.pi
    ua, ub = rng.random((2, pairs))
    run = lambda: mod.tally_builtin(theta, ua, ub, 1.0, family, exponent, 1)
    return min(timeit.repeat(run, number=1, repeat=repeat))


def bench_dft(mod, nodes: int, repeat: int) -> float:
    x = np.random.default_rng(1).normal(size=nodes).astype(np.complex128)
    return min(timeit.repeat(lambda: mod.dft_direct(x, False), number=1, repeat=repeat))


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=1_000_000)
    ap.add_argument("--nodes", type=int, default=1024)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = available_backends()
    cases = [
        (f"tally proj, {args.pairs} pairs", lambda m: bench_tally(m, args.pairs, args.repeat, 1, 1.0)),
        (f"tally pow, {args.pairs} pairs", lambda m: bench_tally(m, args.pairs, args.repeat, 2, math.exp(-1))),
        (f"dft, N={args.nodes}", lambda m: bench_dft(m, args.nodes, args.repeat)),
    ]
    names = sorted(backends)
    print(f"{'kernel':<30}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}")
    for label, fn in cases:
        times = {n: fn(backends[n]) for n in names}
        row = f"{label:<30}" + "".join(f"{times[n] * 1e3:>10.2f}ms" for n in names)
        if "compiled" in times:
            row += f"{times['python'] / times['compiled']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
