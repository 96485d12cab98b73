"""Backend selection for the pairwise kernel sums.

The compiled extension is preferred when importable; a numpy fallback with
identical semantics is always available.  TENTQMC_BACKEND=python forces the
fallback, TENTQMC_BACKEND=compiled insists on the extension.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from . import _speedups
except ImportError:  # pure-Python install
    _speedups = None

_CHUNK = 1024  # row block size keeps the numpy path under ~100 MB


def gram_mean_product_numpy(x, bern, poly2a, gamma, sign, gamma_empty):
    """Mean of the product-weight kernel Gram matrix plus (gamma_empty - 1)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    N, s = x.shape
    acc = 0.0
    for lo in range(0, N, _CHUNK):
        hi = min(lo + _CHUNK, N)
        block = np.ones((hi - lo, N))
        for j in range(s):
            d = np.abs(x[lo:hi, j, None] - x[None, :, j])
            k1 = sign * np.polyval(poly2a, d)
            k1 += bern[lo:hi, j, :] @ bern[:, j, :].T
            block *= 1.0 + gamma[j] * k1
        acc += block.sum()
    return acc / (N * N) + (gamma_empty - 1.0)


def backend_name() -> str:
    forced = os.environ.get("TENTQMC_BACKEND")
    if forced == "python":
        return "numpy"
    if forced == "compiled":
        if _speedups is None:
            raise RuntimeError("compiled backend requested but not built")
        return "compiled"
    return "compiled" if _speedups is not None else "numpy"


def gram_mean_product(x, bern, poly2a, gamma, sign, gamma_empty):
    if backend_name() == "compiled":
        return _speedups.gram_mean_product(
            np.ascontiguousarray(x, dtype=np.float64),
            np.ascontiguousarray(bern, dtype=np.float64),
            np.ascontiguousarray(poly2a, dtype=np.float64),
            np.ascontiguousarray(gamma, dtype=np.float64),
            float(sign),
            float(gamma_empty),
        )
    return gram_mean_product_numpy(x, bern, poly2a, gamma, sign, gamma_empty)
