"""Time the compiled pairwise kernel sum against the numpy fallback.

Both paths compute the same Gram-matrix mean, so the script doubles as an
agreement check: it refuses to print timings if the results drift apart.

    python3 benchmarks/compare_backends.py --points 4096 --dims 3
"""

import argparse
import math
import sys
import time

import numpy as np

from tentqmc import _kernels
from tentqmc.sobolev import _cross_sign, _poly2a, bernoulli_values


def build_inputs(n_points, dims, alpha, seed):
    rng = np.random.default_rng(seed)
    x = rng.random((n_points, dims))
    bern = np.empty((n_points, dims, alpha))
    for tau in range(1, alpha + 1):
        bern[:, :, tau - 1] = bernoulli_values(tau, x) / math.factorial(tau)
    gammas = np.full(dims, 1.0)
    return x, bern, _poly2a(alpha), gammas, _cross_sign(alpha)


def clock(fn, args, repeats):
    best = math.inf
    value = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        value = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return value, best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=4096)
    ap.add_argument("--dims", type=int, default=3)
    ap.add_argument("--alpha", type=int, default=2)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    x, bern, poly2a, gammas, sign = build_inputs(
        args.points, args.dims, args.alpha, args.seed
    )
    call = (x, bern, poly2a, gammas, sign, 1.0)

    ref, t_numpy = clock(_kernels.gram_mean_product_numpy, call, args.repeats)
    print(f"numpy     {t_numpy * 1e3:10.2f} ms   value {ref!r}")

    if _kernels._speedups is None:
        print("compiled  unavailable (extension not built)")
        return 0

    got, t_ext = clock(_kernels._speedups.gram_mean_product, call, args.repeats)
    rel = abs(got - ref) / max(abs(ref), 1e-300)
    if rel > 1e-12:
        print(f"backends disagree: {got!r} vs {ref!r} (rel {rel:.2e})")
        return 1
    print(f"compiled  {t_ext * 1e3:10.2f} ms   value {got!r}")
    print(f"speedup   {t_numpy / t_ext:10.2f} x   (agreement {rel:.1e})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
