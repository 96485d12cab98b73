"""Base-b Walsh functions and digit statistics of integer indices.

wal_k(x) = omega^e with omega = exp(2 pi i / b) and exponent
e = kappa_0 xi_1 + ... + kappa_{a-1} xi_a mod b, where kappa_i are the
base-b digits of k (least significant first) and xi_i the digits of x.
Exponents are carried exactly as integers mod b; complex values are only
produced on demand.
"""

from __future__ import annotations

import cmath
from collections.abc import Sequence

import numpy as np

from .base_arith import BAdicReal, _check_base, int_digits_lsb


def delta_b(k: int, b: int) -> int:
    """Digit sum of k in base b."""
    _check_base(b)
    if k < 0:
        raise ValueError("k must be >= 0")
    s = 0
    while k:
        k, r = divmod(k, b)
        s += r
    return s


def floor_div_b(k: int, b: int) -> int:
    """floor(k / b), the index with the last digit dropped."""
    _check_base(b)
    if k < 0:
        raise ValueError("k must be >= 0")
    return k // b


def in_Eb(k: int, b: int) -> bool:
    """Membership of k >= 1 in the set of indices with digit sum = 0 mod b."""
    return k >= 1 and delta_b(k, b) % b == 0


def mu_alpha(k: int, alpha: int, b: int) -> int:
    """Sum of the min(v, alpha) largest digit positions of k; mu_alpha(0) = 0.

    Positions are 1-based: k = sum kappa_i b^(a_i - 1) with a_1 > a_2 > ...
    and all kappa_i nonzero.
    """
    _check_base(b)
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    positions = []
    a = 1
    while k:
        k, r = divmod(k, b)
        if r:
            positions.append(a)
        a += 1
    positions.reverse()
    return sum(positions[:alpha])


def index_add(k: int, l: int, b: int) -> int:
    """Digitwise sum of integer indices mod b, no carry."""
    _check_base(b)
    if k < 0 or l < 0:
        raise ValueError("indices must be >= 0")
    out, place = 0, 1
    while k or l:
        k, dk = divmod(k, b)
        l, dl = divmod(l, b)
        out += ((dk + dl) % b) * place
        place *= b
    return out


def index_sub(k: int, l: int, b: int) -> int:
    """Digitwise difference of integer indices mod b, no carry."""
    _check_base(b)
    if k < 0 or l < 0:
        raise ValueError("indices must be >= 0")
    out, place = 0, 1
    while k or l:
        k, dk = divmod(k, b)
        l, dl = divmod(l, b)
        out += ((dk - dl) % b) * place
        place *= b
    return out


def walsh_exponent(k: int, x: BAdicReal) -> int:
    """Exponent of wal_k(x) in Z_b: sum kappa_{i-1} xi_i mod b."""
    b = x.base
    if k < 0:
        raise ValueError("k must be >= 0")
    e, i = 0, 1
    while k:
        k, kd = divmod(k, b)
        e += kd * x.digit(i)
        i += 1
    return e % b


def walsh_1d(k: int, x: BAdicReal) -> complex:
    """wal_k(x) as a complex number on the unit circle."""
    return omega_power(walsh_exponent(k, x), x.base)


def walsh_exponent_nd(kvec: Sequence[int], xvec: Sequence[BAdicReal]) -> int:
    """Exponent of the product wal_k1(x_1) ... wal_ks(x_s) mod b."""
    if len(kvec) != len(xvec):
        raise ValueError("kvec and xvec must have equal length")
    if not xvec:
        raise ValueError("dimension must be >= 1")
    b = xvec[0].base
    if any(x.base != b for x in xvec):
        raise ValueError("all coordinates must share a base")
    return sum(walsh_exponent(k, x) for k, x in zip(kvec, xvec)) % b


def walsh_nd(kvec: Sequence[int], xvec: Sequence[BAdicReal]) -> complex:
    b = xvec[0].base
    return omega_power(walsh_exponent_nd(kvec, xvec), b)


def omega_power(e: int, b: int) -> complex:
    """exp(2 pi i e / b); exact +-1 for b = 2."""
    _check_base(b)
    e %= b
    if b == 2:
        return complex(1.0 if e == 0 else -1.0)
    return cmath.exp(2j * cmath.pi * e / b)


def grid_exponents(k: int, b: int, t: int) -> np.ndarray:
    """Exponents of wal_k at x = i / b^t for i = 0..b^t - 1, as uint8 mod b.

    The first t digits of i / b^t are the base-b digits of i, most
    significant first, so the exponent is a dot product of digit vectors.
    Requires k < b^t so that no digit of k reaches past position t.
    """
    _check_base(b)
    if not (0 <= k < b**t):
        raise ValueError("need 0 <= k < b^t")
    kd = np.array(int_digits_lsb(k, b, t), dtype=np.int64)
    i = np.arange(b**t, dtype=np.int64)
    e = np.zeros(b**t, dtype=np.int64)
    for pos in range(1, t + 1):
        # digit xi_pos of i / b^t is (i // b^(t - pos)) % b
        e += kd[pos - 1] * ((i // b ** (t - pos)) % b)
    return (e % b).astype(np.uint8)
