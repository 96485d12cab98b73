"""Random digital shifts and the base-b digit folding map.

The fold phi_b sends x with digits xi_1 xi_2 ... to the number with digits
eta_i = (xi_(i+1) - xi_1) mod b.  On digit-prefix inputs this is exact: a
prefix of length p folds to a prefix of length p - 1 whose repeating tail
digit is (t - xi_1) mod b.  phi_b decomposes as sigma_b minus tau_b
digitwise, where sigma_b drops the first digit (b x mod 1 plus tail) and
tau_b is the constant-digit number xi_1 / (b - 1).  For b = 2 the map is
the classic tent 1 - |2x - 1|.

A random shift adds iid uniform digits position by position mod b.  Shift
digits are drawn from numpy Generators, whose bounded-integer sampling is
rejection based, so digits are unbiased for every base.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base_arith import BAdicReal, digitwise_add, digitwise_sub
from .nets import DigitalNet


@dataclass(frozen=True)
class RngSpec:
    """Deterministic stream id: (seed, stream) -> independent generator."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        )


@dataclass(frozen=True, eq=False)
class ShiftVector:
    """s shift coordinates, each a digit prefix of length p_sigma, tail 0."""

    base: int
    digits: np.ndarray  # (s, p_sigma) uint8

    def __post_init__(self):
        d = np.asarray(self.digits, dtype=np.uint8)
        if d.ndim != 2:
            raise ValueError("digits must have shape (s, p_sigma)")
        if d.size and d.max() >= self.base:
            raise ValueError(f"digits must lie in [0, {self.base})")
        object.__setattr__(self, "digits", d)

    @property
    def s(self) -> int:
        return self.digits.shape[0]

    @property
    def precision(self) -> int:
        return self.digits.shape[1]

    @property
    def coords(self) -> tuple[BAdicReal, ...]:
        return tuple(
            BAdicReal(self.base, tuple(int(v) for v in row), 0)
            for row in self.digits
        )


def sample_shift(rng: RngSpec | np.random.Generator, s: int, base: int,
                 p_sigma: int) -> ShiftVector:
    """Draw s coordinates of p_sigma iid uniform digits."""
    if s < 1 or p_sigma < 0:
        raise ValueError("need s >= 1 and p_sigma >= 0")
    gen = rng.generator() if isinstance(rng, RngSpec) else rng
    digits = gen.integers(0, base, size=(s, p_sigma), dtype=np.uint8)
    return ShiftVector(base, digits)


def shift_digit_array(digits: np.ndarray, shift: ShiftVector,
                      base: int) -> np.ndarray:
    """Digitwise add a shift to an (N, s, n) digit array; pads to p_sigma."""
    N, s, n = digits.shape
    if shift.s != s:
        raise ValueError("shift dimension mismatch")
    P = max(n, shift.precision)
    out = np.zeros((N, s, P), dtype=np.int16)
    out[:, :, :n] = digits
    out[:, :, : shift.precision] += shift.digits[None, :, :]
    return (out % base).astype(np.uint8)


def digital_shift(net: DigitalNet, shift: ShiftVector) -> DigitalNet:
    """The net with shift digits added position by position mod b."""
    if shift.base != net.base:
        raise ValueError("shift base mismatch")
    return DigitalNet(net.base, shift_digit_array(net.digits, shift, net.base))


def sigma_shift(x: BAdicReal) -> BAdicReal:
    """Digit left shift: drops xi_1, keeps the tail; equals b x mod 1 + tail."""
    if not x.prefix:
        return x  # constant digit stream shifts to itself
    return BAdicReal(x.base, x.prefix[1:], x.tail)


def tau_const(x: BAdicReal) -> BAdicReal:
    """Constant-digit number with every digit xi_1, value xi_1 / (b - 1)."""
    return BAdicReal(x.base, (), x.digit(1))


def tent_fold(x: BAdicReal) -> BAdicReal:
    """Digit fold: eta_i = (xi_(i+1) - xi_1) mod b, tail (t - xi_1) mod b.

    Equals digitwise_sub(sigma_shift(x), tau_const(x)).  Both endpoints
    fold to 0 and for b = 2 the value is 1 - |2x - 1|.
    """
    b, first = x.base, x.digit(1)
    prefix = tuple((x.prefix[i] - first) % b for i in range(1, len(x.prefix)))
    return BAdicReal(b, prefix, (x.tail - first) % b)


def tent_fold_truncated(x: BAdicReal, n: int) -> BAdicReal:
    """First n digits of the fold, tail 0."""
    if n < 0:
        raise ValueError("n must be >= 0")
    folded = tent_fold(x)
    return BAdicReal(x.base, folded.digits(n), 0)


def fold_digit_array(shifted: np.ndarray, base: int) -> tuple[np.ndarray, np.ndarray]:
    """Fold an (N, s, P) digit array: returns (prefix (N, s, P-1), tail (N, s))."""
    if shifted.shape[2] < 1:
        raise ValueError("need at least one digit to fold")
    first = shifted[:, :, 0].astype(np.int16)
    prefix = (shifted[:, :, 1:].astype(np.int16) - first[:, :, None]) % base
    tail = (-first) % base
    return prefix.astype(np.uint8), tail.astype(np.uint8)


def folded_values(shifted: np.ndarray, base: int) -> np.ndarray:
    """Float values of the folded digit array, tail summed in closed form."""
    prefix, tail = fold_digit_array(shifted, base)
    P = shifted.shape[2]
    w = base ** -np.arange(1, P, dtype=np.float64)
    vals = prefix.astype(np.float64) @ w
    vals += tail.astype(np.float64) * base ** -(P - 1) / (base - 1)
    return vals


def fold_shifted_net(net: DigitalNet, shift: ShiftVector | None = None
                     ) -> list[tuple[BAdicReal, ...]]:
    """Exact folded (optionally shifted) points, one digit-vector tuple each.

    The output is a multiset: folding can map distinct points together, and
    order follows the net's point order.
    """
    if shift is None:
        shifted = net.digits
    else:
        if shift.base != net.base:
            raise ValueError("shift base mismatch")
        shifted = shift_digit_array(net.digits, shift, net.base)
    prefix, tail = fold_digit_array(shifted, net.base)
    out = []
    for i in range(shifted.shape[0]):
        out.append(
            tuple(
                BAdicReal(net.base, tuple(int(v) for v in prefix[i, j]),
                          int(tail[i, j]))
                for j in range(shifted.shape[1])
            )
        )
    return out
