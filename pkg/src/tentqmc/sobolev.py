"""Weighted Sobolev kernel of smoothness alpha and worst-case error tools.

The one-dimensional kernel is

    k1(x, y) = sum_{tau=1..alpha} B_tau(x) B_tau(y) / (tau!)^2
               + (-1)^(alpha+1) B_2alpha(|x - y|) / (2alpha)!

with Bernoulli polynomials B_tau, and the s-dimensional kernel is the
subset-weighted sum K(x, y) = sum_u gamma_u prod_{j in u} k1(x_j, y_j),
gamma_emptyset for u empty.  Because every marginal integral of k1
vanishes, int K(x, .) = int int K = gamma_emptyset, and the squared
worst-case error of an equal-weight rule collapses to

    wce^2 = (1/N^2) sum_i sum_l K(x_i, x_l) - gamma_emptyset.

For a digitally shifted then folded net, the expectation of wce^2 over
the shift equals a sum of nonnegative kernel coefficients over the dual
indices whose digit sums vanish mod b; ``dual_net_wce`` evaluates that
sum truncated to k_j < b^T and ``bound_B`` the closed-form dominating
sum C^|u| b^(-2 mu_alpha), whose truncation-free value is controlled by
the A1/A2 constants of ``A_constants``.

The coefficient magnitude constant C is not pinned analytically; it is
calibrated empirically by ``calibrate_c_walsh`` (scan of diagonal kernel
coefficients against b^(-2 mu_alpha(k)), plus ten percent headroom) and
always reported next to any figure that used it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .base_arith import BAdicReal
from .nets import (
    CapacityError,
    DigitalNet,
    GeneratingMatrices,
    PolyLatticeSpec,
    digit_cap,
    matrices_from_poly,
    net_from_matrices,
)
from .transforms import RngSpec, folded_values, sample_shift, shift_digit_array
from .walsh import delta_b, grid_exponents, mu_alpha

# ---------------------------------------------------------------------------
# Bernoulli polynomials, exact

@lru_cache(maxsize=None)
def _bernoulli_number(n: int) -> Fraction:
    # B_0 = 1 and sum_{j<=n} C(n+1, j) B_j = 0; B_1 = -1/2 in this convention
    if n == 0:
        return Fraction(1)
    acc = Fraction(0)
    for j in range(n):
        acc += math.comb(n + 1, j) * _bernoulli_number(j)
    return -acc / (n + 1)


@lru_cache(maxsize=None)
def bernoulli_coefficients(tau: int) -> tuple[Fraction, ...]:
    """Coefficients of B_tau(x), descending powers, exact rationals."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    return tuple(
        math.comb(tau, k) * _bernoulli_number(k) for k in range(tau + 1)
    )


def bernoulli_polynomial(tau: int, x):
    """B_tau at x; exact for Fraction input, float otherwise."""
    coeffs = bernoulli_coefficients(tau)
    if isinstance(x, Fraction) or isinstance(x, int):
        acc = Fraction(0)
        for c in coeffs:
            acc = acc * x + c
        return acc
    acc = 0.0
    for c in coeffs:
        acc = acc * x + float(c)
    return acc


def bernoulli_values(tau: int, x: np.ndarray) -> np.ndarray:
    """Vectorized B_tau by Horner with float coefficients."""
    return np.polyval([float(c) for c in bernoulli_coefficients(tau)], x)


# ---------------------------------------------------------------------------
# Weights over coordinate subsets

class Weights:
    """Subset weights gamma_u; subclasses fix the storage scheme."""

    s: int
    gamma_empty: float

    def gamma_of_mask(self, mask: int) -> float:
        raise NotImplementedError

    def gamma_of(self, subset: Iterable[int]) -> float:
        """Weight of a subset given as 1-based coordinate indices."""
        mask = 0
        for j in subset:
            if not (1 <= j <= self.s):
                raise ValueError(f"coordinate {j} out of range")
            mask |= 1 << (j - 1)
        return self.gamma_of_mask(mask)

    def restrict(self, s: int) -> "Weights":
        raise NotImplementedError


@dataclass(frozen=True)
class ProductWeights(Weights):
    """gamma_u = prod_{j in u} gamma_j."""

    gammas: tuple[float, ...]
    gamma_empty: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        if not self.gammas:
            raise ValueError("need at least one coordinate weight")
        if any(g < 0 for g in self.gammas) or self.gamma_empty < 0:
            raise ValueError("weights must be >= 0")

    @property
    def s(self) -> int:
        return len(self.gammas)

    def gamma_of_mask(self, mask: int) -> float:
        if mask == 0:
            return self.gamma_empty
        out = 1.0
        for j, g in enumerate(self.gammas):
            if mask >> j & 1:
                out *= g
        return out

    def restrict(self, s: int) -> "ProductWeights":
        if not (1 <= s <= self.s):
            raise ValueError("restriction dimension out of range")
        return ProductWeights(self.gammas[:s], self.gamma_empty)


@dataclass(frozen=True)
class TableWeights(Weights):
    """Explicit gamma_u per subset mask; s <= 16 keeps tables enumerable."""

    s: int
    table: tuple[float, ...]  # indexed by mask, length 2^s
    gamma_empty: float = 1.0

    def __post_init__(self):
        if not (1 <= self.s <= 16):
            raise ValueError("table weights support 1 <= s <= 16")
        t = tuple(float(v) for v in self.table)
        if len(t) != 2**self.s:
            raise ValueError(f"table must have 2^{self.s} entries")
        if any(v < 0 for v in t) or self.gamma_empty < 0:
            raise ValueError("weights must be >= 0")
        object.__setattr__(self, "table", t)

    @classmethod
    def from_entries(cls, s: int, entries: dict[frozenset, float],
                     gamma_empty: float = 1.0) -> "TableWeights":
        """Build from {subset of 1-based coords: weight}; absent subsets get 0."""
        table = [0.0] * (2**s)
        for subset, val in entries.items():
            mask = 0
            for j in subset:
                if not (1 <= j <= s):
                    raise ValueError(f"coordinate {j} out of range")
                mask |= 1 << (j - 1)
            if mask == 0:
                raise ValueError("use gamma_empty for the empty subset")
            table[mask] = float(val)
        return cls(s, tuple(table), gamma_empty)

    def gamma_of_mask(self, mask: int) -> float:
        if mask == 0:
            return self.gamma_empty
        return self.table[mask]

    def restrict(self, s: int) -> "TableWeights":
        if not (1 <= s <= self.s):
            raise ValueError("restriction dimension out of range")
        table = [0.0] * (2**s)
        for mask in range(2**s):
            table[mask] = self.table[mask]
        return TableWeights(s, tuple(table), self.gamma_empty)


def weights_to_string(w: Weights) -> str:
    lines = [f"s={w.s}", f"gamma_empty={w.gamma_empty!r}"]
    if isinstance(w, ProductWeights):
        lines.append("product:" + ",".join(repr(g) for g in w.gammas))
    elif isinstance(w, TableWeights):
        for mask in range(1, 2**w.s):
            if w.table[mask]:
                subset = ",".join(str(j + 1) for j in range(w.s) if mask >> j & 1)
                lines.append(f"table:{subset}:{w.table[mask]!r}")
    else:
        raise TypeError(f"unknown weights type {type(w)!r}")
    return "\n".join(lines) + "\n"


def weights_from_string(text: str) -> Weights:
    s = None
    gamma_empty = 1.0
    product: tuple[float, ...] | None = None
    entries: dict[frozenset, float] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("s="):
            s = int(line[2:])
        elif line.startswith("gamma_empty="):
            gamma_empty = float(line.split("=", 1)[1])
        elif line.startswith("product:"):
            product = tuple(float(v) for v in line[len("product:"):].split(","))
        elif line.startswith("table:"):
            _, subset, val = line.split(":", 2)
            coords = frozenset(int(v) for v in subset.split(","))
            entries[coords] = float(val)
        else:
            raise ValueError(f"malformed weights line {line!r}")
    if s is None:
        raise ValueError("weights text must set s=")
    if product is not None and entries:
        raise ValueError("weights text mixes product: and table: lines")
    if product is not None:
        if len(product) != s:
            raise ValueError(f"product line has {len(product)} weights, s={s}")
        return ProductWeights(product, gamma_empty)
    if entries:
        return TableWeights.from_entries(s, entries, gamma_empty)
    raise ValueError("weights text needs a product: or table: line")


def load_weights_file(path: str) -> Weights:
    with open(path) as fh:
        return weights_from_string(fh.read())


def save_weights_file(w: Weights, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(weights_to_string(w))


# ---------------------------------------------------------------------------
# Kernel evaluation

@dataclass(frozen=True)
class KernelParams:
    """Smoothness alpha >= 1 (>= 2 for the decay bounds), base, constant C."""

    alpha: int
    base: int
    c_walsh: float | None = None

    def __post_init__(self):
        if self.alpha < 1:
            raise ValueError("alpha must be >= 1")
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if self.c_walsh is not None and self.c_walsh <= 0:
            raise ValueError("c_walsh must be positive when given")

    def require_c(self) -> float:
        if self.c_walsh is None:
            raise ValueError(
                "this figure needs c_walsh; calibrate it or set it explicitly"
            )
        return self.c_walsh


def _cross_sign(alpha: int) -> float:
    return 1.0 if alpha % 2 == 1 else -1.0


def _poly2a(alpha: int) -> np.ndarray:
    f = float(math.factorial(2 * alpha))
    return np.array(
        [float(c) / f for c in bernoulli_coefficients(2 * alpha)], dtype=np.float64
    )


def kernel_1d(params: KernelParams, x: float, y: float) -> float:
    """One-dimensional kernel value."""
    a = params.alpha
    acc = 0.0
    for tau in range(1, a + 1):
        ft = math.factorial(tau)
        acc += bernoulli_polynomial(tau, float(x)) * bernoulli_polynomial(
            tau, float(y)
        ) / (ft * ft)
    acc += _cross_sign(a) * bernoulli_polynomial(2 * a, abs(float(x) - float(y))) / (
        math.factorial(2 * a)
    )
    return acc


def kernel_1d_matrix(params: KernelParams, xs: np.ndarray, ys: np.ndarray
                     ) -> np.ndarray:
    """k1 on the grid xs x ys, vectorized."""
    a = params.alpha
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    acc = np.zeros((xs.size, ys.size))
    for tau in range(1, a + 1):
        ft = math.factorial(tau)
        acc += np.outer(bernoulli_values(tau, xs), bernoulli_values(tau, ys)) / (
            ft * ft
        )
    d = np.abs(xs[:, None] - ys[None, :])
    acc += _cross_sign(a) * np.polyval(_poly2a(a), d)
    return acc


def _coord_floats(x) -> tuple[float, ...]:
    return tuple(c.to_float() if isinstance(c, BAdicReal) else float(c) for c in x)


def kernel(params: KernelParams, weights: Weights, x: Sequence, y: Sequence
           ) -> float:
    """Subset-weighted kernel K(x, y) in s dimensions."""
    xv, yv = _coord_floats(x), _coord_floats(y)
    if len(xv) != weights.s or len(yv) != weights.s:
        raise ValueError("point dimension must match the weights")
    k1 = [kernel_1d(params, xv[j], yv[j]) for j in range(weights.s)]
    if isinstance(weights, ProductWeights):
        out = 1.0
        for g, v in zip(weights.gammas, k1):
            out *= 1.0 + g * v
        # the empty-subset term of the product is 1; re-anchor it at gamma_empty
        return out - 1.0 + weights.gamma_empty
    acc = weights.gamma_empty
    for mask in range(1, 2**weights.s):
        g = weights.gamma_of_mask(mask)
        if g == 0.0:
            continue
        term = g
        for j in range(weights.s):
            if mask >> j & 1:
                term *= k1[j]
        acc += term
    return acc


def points_as_array(points) -> np.ndarray:
    """(N, s) float array from an array, a DigitalNet, or digit-vector tuples."""
    if isinstance(points, DigitalNet):
        return points.points
    if isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=np.float64)
    else:
        points = list(points)
        if not points:
            return np.empty((0, 0))
        arr = np.array([_coord_floats(p) for p in points], dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("points must form an (N, s) array")
    return arr


def wce_squared(points, params: KernelParams, weights: Weights) -> float:
    """(1/N^2) sum_il K(x_i, x_l) - gamma_empty for an equal-weight rule.

    The two integral terms of the full error expression both equal
    gamma_empty because every marginal integral of k1 vanishes.
    """
    x = points_as_array(points)
    if x.shape[0] == 0:
        raise ValueError("empty point set has no quadrature rule")
    if x.shape[1] != weights.s:
        raise ValueError("point dimension must match the weights")
    N, s = x.shape
    a = params.alpha
    if isinstance(weights, ProductWeights):
        bern = np.empty((N, s, a))
        for tau in range(1, a + 1):
            bern[:, :, tau - 1] = bernoulli_values(tau, x) / math.factorial(tau)
        gram_mean = _kernels.gram_mean_product(
            x, bern, _poly2a(a), np.array(weights.gammas), _cross_sign(a),
            weights.gamma_empty,
        )
        return float(gram_mean - weights.gamma_empty)
    # gamma_empty cancels: summing the nonempty-subset terms is the difference
    k1 = [kernel_1d_matrix(params, x[:, j], x[:, j]) for j in range(s)]
    acc = np.zeros((N, N))
    for mask in range(1, 2**s):
        g = weights.gamma_of_mask(mask)
        if g == 0.0:
            continue
        term = np.full((N, N), g)
        for j in range(s):
            if mask >> j & 1:
                term *= k1[j]
        acc += term
    return float(acc.mean())


def mean_wce_estimate(net: DigitalNet, params: KernelParams, weights: Weights,
                      replicates: int, rng: RngSpec,
                      p_sigma: int | None = None) -> tuple[float, float]:
    """Monte Carlo mean of wce^2 over random shifts of the folded net.

    Returns (mean, standard error).  Shift digits reach p_sigma positions,
    by default n + alpha + 2; past that depth the change in the estimate is
    far below the statistical error.
    """
    if replicates < 2:
        raise ValueError("need at least 2 replicates for a standard error")
    if p_sigma is None:
        p_sigma = net.n + params.alpha + 2
    gen = rng.generator()
    vals = np.empty(replicates)
    for r in range(replicates):
        shift = sample_shift(gen, net.s, net.base, p_sigma)
        shifted = shift_digit_array(net.digits, shift, net.base)
        pts = folded_values(shifted, net.base)
        vals[r] = wce_squared(pts, params, weights)
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(replicates))
    return mean, stderr


# ---------------------------------------------------------------------------
# Kernel coefficients by quadrature

@lru_cache(maxsize=None)
def _midpoint_tables(b: int, res_digits: int):
    M = b**res_digits
    xs = (np.arange(M) + 0.5) / M
    return M, xs


@lru_cache(maxsize=200_000)
def kernel_walsh_coefficient_1d(j: int, alpha: int, b: int,
                                res_digits: int) -> float:
    """Diagonal kernel coefficient against the index-j character, quadrature.

    Composite midpoint rule with b^res_digits cells per axis; the character
    is evaluated exactly at the midpoints since their leading digits agree
    with the cell index.  Cached per index.
    """
    if j < 0:
        raise ValueError("index must be >= 0")
    M, xs = _midpoint_tables(b, res_digits)
    if j >= M:
        raise ValueError("index needs more digits than the resolution")
    e = grid_exponents(j, b, res_digits)
    w = np.exp(2j * np.pi * e.astype(np.float64) / b)
    acc = 0.0
    for tau in range(1, alpha + 1):
        u = np.mean(bernoulli_values(tau, xs) * np.conj(w))
        acc += (abs(u) / math.factorial(tau)) ** 2
    # cross term sum_{i,i'} B_2a(|i-i'|/M) conj(w_i) w_i' via autocorrelation
    t = bernoulli_values(2 * alpha, np.arange(M) / M)
    f = np.fft.fft(w, 2 * M)
    corr = np.fft.ifft(f * np.conj(f))[:M].real  # corr[d] = sum_i w_{i+d} conj(w_i)
    cross = (t[0] * corr[0] + 2.0 * np.dot(t[1:], corr[1:])) / (M * M)
    acc += _cross_sign(alpha) * cross / math.factorial(2 * alpha)
    return float(acc)


def calibrate_c_walsh(alpha: int, b: int, scan_digits: int = 8,
                      margin: float = 1.1,
                      res_digits: int | None = None) -> float:
    """Empirical coefficient-decay constant.

    Scans every index k < b^scan_digits, takes the smallest C with
    |coeff(k, k)| <= C b^(-2 mu_alpha(k)), and adds ``margin`` headroom.
    """
    if alpha < 1 or scan_digits < 1:
        raise ValueError("need alpha >= 1 and scan_digits >= 1")
    if res_digits is None:
        res_digits = scan_digits + alpha + 1
    worst = 0.0
    for k in range(1, b**scan_digits):
        coeff = kernel_walsh_coefficient_1d(k, alpha, b, res_digits)
        worst = max(worst, abs(coeff) * float(b) ** (2 * mu_alpha(k, alpha, b)))
    return margin * worst


# ---------------------------------------------------------------------------
# Truncated dual sums

def _admissible_indices(b: int, T: int) -> np.ndarray:
    """0 together with every k < b^T whose digit sum is 0 mod b."""
    ks = [0] + [k for k in range(1, b**T) if delta_b(k, b) % b == 0]
    return np.array(ks, dtype=np.int64)


def _as_matrices(net) -> GeneratingMatrices:
    if isinstance(net, GeneratingMatrices):
        return net
    if isinstance(net, PolyLatticeSpec):
        return matrices_from_poly(net)
    if isinstance(net, DigitalNet) and net.gen is not None:
        return net.gen
    raise TypeError("need generating matrices (or a spec that yields them)")


def _dual_box_sum(gen: GeneratingMatrices, T: int, coeff: np.ndarray,
                  weights: Weights, c_factor: float,
                  cap: int | None) -> float:
    """Sum of gamma_u c^|u| prod_j coeff[k_j] over truncated dual vectors.

    coeff is indexed like the admissible list; entry 0 (k = 0) is unused.
    """
    b, n, m, s = gen.base, gen.n, gen.m, gen.s
    if weights.s != s:
        raise ValueError("weights dimension must match the net")
    A = _admissible_indices(b, T)
    L = A.shape[0]
    limit = digit_cap() if cap is None else cap
    if L**s > limit:
        raise CapacityError(f"dual box of {L}^{s} index vectors exceeds cap {limit}")
    kd = np.empty((L, n), dtype=np.int64)
    for i in range(n):
        kd[:, i] = (A // b**i) % b
    residues = [kd @ gen.mats[j].astype(np.int64) % b for j in range(s)]
    if isinstance(weights, ProductWeights):
        factors = [
            np.concatenate(([1.0], c_factor * weights.gammas[j] * coeff[1:]))
            for j in range(s)
        ]
        gamma_mask = None
    else:
        factors = [
            np.concatenate(([1.0], c_factor * coeff[1:])) for _ in range(s)
        ]
        gamma_mask = np.array(
            [weights.gamma_of_mask(mask) for mask in range(2**s)]
        )
    res = np.zeros((1, m), dtype=np.int64)
    prod = np.ones(1)
    mask = np.zeros(1, dtype=np.int64)
    for j in range(s):
        res = (res[:, None, :] + residues[j][None, :, :]).reshape(-1, m) % b
        prod = (prod[:, None] * factors[j][None, :]).reshape(-1)
        bit = np.where(A > 0, 1 << j, 0)
        mask = (mask[:, None] + bit[None, :]).reshape(-1)
    member = np.all(res == 0, axis=1)
    member[0] = False  # k = 0 is excluded from the sum
    if gamma_mask is not None:
        prod = prod * gamma_mask[mask]
    return float(np.sum(prod[member]))


def dual_net_wce(net, params: KernelParams, weights: Weights,
                 T: int | None = None, cap: int | None = None) -> float:
    """Truncated mean square worst-case error of the shifted-folded net.

    Sums the diagonal kernel coefficients at index floor(k_j / b) over all
    nonzero dual vectors whose components are 0 or have digit sum 0 mod b,
    each component below b^T.  Coefficients come from quadrature at digit
    resolution T + alpha.
    """
    gen = _as_matrices(net)
    b = gen.base
    if params.base != b:
        raise ValueError("params base must match the net")
    if T is None:
        T = gen.n + params.alpha + 2
    A = _admissible_indices(b, T)
    res_digits = T + params.alpha
    coeff = np.array(
        [0.0]
        + [
            kernel_walsh_coefficient_1d(int(k) // b, params.alpha, b, res_digits)
            for k in A[1:]
        ]
    )
    return _dual_box_sum(gen, T, coeff, weights, 1.0, cap)


@dataclass(frozen=True)
class FigureOfMerit:
    """A truncated dominating sum with its budget and a tail estimate."""

    value: float
    truncation: int
    tail_note: str

    def __float__(self) -> float:
        return self.value


def bound_B(net, params: KernelParams, weights: Weights,
            T: int | None = None, cap: int | None = None) -> FigureOfMerit:
    """Dominating sum sum_u gamma_u C^|u| sum b^(-2 mu_alpha(floor(k/b))).

    Runs over the same truncated dual vectors as ``dual_net_wce`` with the
    kernel coefficients replaced by their decay bound; requires c_walsh.
    """
    gen = _as_matrices(net)
    b = gen.base
    if params.base != b:
        raise ValueError("params base must match the net")
    c = params.require_c()
    if T is None:
        T = gen.n + params.alpha + 2
    A = _admissible_indices(b, T)
    coeff = np.array(
        [0.0]
        + [
            float(b) ** (-2 * mu_alpha(int(k) // b, params.alpha, b))
            for k in A[1:]
        ]
    )
    value = _dual_box_sum(gen, T, coeff, weights, c, cap)
    if params.alpha >= 2:
        _, a2 = A_constants(params.alpha, b, 1.0)
        tail_1d = a2 * float(b) ** (-4.0 * T)
        note = (
            f"omitted multiples of b^{T} contribute <= {tail_1d:.3e} "
            "per coordinate (lambda=1)"
        )
    else:
        note = "tail estimate needs alpha >= 2"
    return FigureOfMerit(value, T, note)


# ---------------------------------------------------------------------------
# Closed-form constants and truncated digit sums

def _check_lambda(alpha: int, lam: float) -> None:
    if alpha < 2:
        raise ValueError("decay constants need alpha >= 2")
    if not (1.0 / (2 * alpha) < lam <= 1.0):
        raise ValueError(f"lambda must lie in (1/(2 alpha), 1], got {lam}")


def A_constants(alpha: int, b: int, lam: float) -> tuple[float, float]:
    """Closed forms dominating the full and the b^n-multiples index sums."""
    _check_lambda(alpha, lam)
    if b < 2:
        raise ValueError("base must be >= 2")
    B = float(b)

    def prod1(v: int) -> float:
        out = 1.0
        for i in range(1, v + 1):
            out *= (B - 1) / (B ** (2 * lam * i) - 1)
        return out

    def prod2(v: int) -> float:
        out = 1.0
        for i in range(1, v + 1):
            out *= B ** (2 * lam) * (B - 1) / (B ** (2 * lam * i) - 1)
        return out

    a1 = (B / (B - 1)) * (
        sum(prod1(v) for v in range(1, alpha))
        + (B ** (2 * lam * alpha) - 1) / (B ** (2 * lam * alpha) - B) * prod1(alpha)
    )
    a2 = (1 / (B - 1)) * sum(prod2(v) for v in range(2, alpha)) + (
        B ** (2 * lam) / (B ** (2 * lam * alpha) - B)
    ) * prod2(alpha - 1)
    return a1, a2


def N_b_count(b: int, v: int) -> int:
    """Count of (Z_b \\ 0)^v digit tuples with zero digit sum mod b."""
    if b < 2 or v < 1:
        raise ValueError("need b >= 2 and v >= 1")
    acc = 0
    for i in range(2, v + 1):
        acc = (b - 1) ** (i - 1) - acc
    return acc


def _mask_weight_sum(b: int, alpha: int, lam: float, width: int,
                     shift: int) -> float:
    """sum over nonempty digit-position subsets of {1..width} of
    N_b(v) b^(-2 lam mu), mu = top-alpha of the shifted positions."""
    if width <= 0:
        return 0.0
    if width > 24:
        raise CapacityError("digit-position enumeration beyond 24 positions")
    masks = np.arange(1, 2**width, dtype=np.int64)
    v = np.zeros(masks.shape, dtype=np.int64)
    mu = np.zeros(masks.shape, dtype=np.int64)
    taken = np.zeros(masks.shape, dtype=np.int64)
    for i in range(width - 1, -1, -1):
        bit = (masks >> i) & 1
        v += bit
        pos = i + shift  # bit i is digit position i + 1, worth i + shift after /b
        use = bit * (taken < alpha) * (pos > 0)
        mu += use * pos
        taken += use
    nb = np.zeros(width + 1, dtype=np.float64)
    for cnt in range(1, width + 1):
        nb[cnt] = N_b_count(b, cnt)
    return float(np.sum(nb[v] * float(b) ** (-2.0 * lam * mu)))


def eb_weight_sum_truncated(b: int, alpha: int, lam: float, T: int) -> float:
    """sum of b^(-2 lam mu_alpha(floor(k/b))) over k in E_b with k < b^T.

    Indices are grouped by the set of nonzero digit positions: the shifted
    position multiset determines mu and N_b counts the digit choices, so the
    enumeration is over 2^T position subsets rather than b^T integers.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    if alpha < 1 or lam <= 0:
        raise ValueError("need alpha >= 1 and lam > 0")
    return _mask_weight_sum(b, alpha, lam, T, 0)


def eb_weight_sum_multiples_truncated(b: int, alpha: int, lam: float, n: int,
                                      T: int) -> float:
    """Same sum restricted to multiples of b^n (n = 0 gives the full sum)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if T < 1:
        raise ValueError("T must be >= 1")
    return _mask_weight_sum(b, alpha, lam, T - n, n)


# ---------------------------------------------------------------------------
# Existence bounds and information complexity

def _existence_subset_sum(params: KernelParams, weights: Weights,
                          lam: float) -> float:
    c = params.require_c()
    a1, a2 = A_constants(params.alpha, params.base, lam)
    if isinstance(weights, ProductWeights):
        p1 = p2 = 1.0
        for g in weights.gammas:
            p1 *= 1.0 + g**lam * c**lam * a1
            p2 *= 1.0 + g**lam * c**lam * a2
        return (p1 - 1.0) + (p2 - 1.0)
    acc = 0.0
    for mask in range(1, 2**weights.s):
        g = weights.gamma_of_mask(mask)
        if g == 0.0:
            continue
        u = mask.bit_count()
        acc += g**lam * c ** (lam * u) * (a1**u + a2**u)
    return acc


def existence_bound(params: KernelParams, weights: Weights, m: int, n: int,
                    lam: float) -> float:
    """Averaging bound: some generating vector achieves a mean square error
    at most b^(-min(m/lam, 4n)) [subset sum]^(1/lam)."""
    _check_lambda(params.alpha, lam)
    if m < 1 or n < m:
        raise ValueError("need 1 <= m <= n")
    s = _existence_subset_sum(params, weights, lam)
    return float(params.base) ** (-min(m / lam, 4.0 * n)) * s ** (1.0 / lam)


def lambda_grid(alpha: int, size: int = 64) -> np.ndarray:
    """size points in (1/(2 alpha), 1], right endpoint included."""
    lo = 1.0 / (2 * alpha)
    return lo + (np.arange(1, size + 1) / size) * (1.0 - lo)


def existence_bound_opt(params: KernelParams, weights: Weights, m: int, n: int,
                        grid: int = 64) -> tuple[float, float]:
    """Minimum of ``existence_bound`` over a lambda grid: (bound, lambda)."""
    best, best_lam = math.inf, math.nan
    for lam in lambda_grid(params.alpha, grid):
        val = existence_bound(params, weights, m, n, float(lam))
        if val < best:
            best, best_lam = val, float(lam)
    return best, best_lam


def info_complexity_bound(eps: float, params: KernelParams, weights: Weights,
                          m_max: int = 60, grid: int = 64) -> int | None:
    """Smallest b^m whose optimized existence bound is <= eps^2 gamma_empty.

    Uses the regime n >= ceil(alpha m / 2), where the exponent is m / lam.
    None when no m <= m_max suffices.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    target = eps * eps * weights.gamma_empty
    for m in range(1, m_max + 1):
        n = (params.alpha * m + 1) // 2
        bound, _ = existence_bound_opt(params, weights, m, max(n, m), grid)
        if bound <= target:
            return params.base**m
    return None


__all__ = [
    "A_constants",
    "FigureOfMerit",
    "KernelParams",
    "N_b_count",
    "ProductWeights",
    "TableWeights",
    "Weights",
    "bernoulli_coefficients",
    "bernoulli_polynomial",
    "bernoulli_values",
    "bound_B",
    "calibrate_c_walsh",
    "dual_net_wce",
    "eb_weight_sum_multiples_truncated",
    "eb_weight_sum_truncated",
    "existence_bound",
    "existence_bound_opt",
    "info_complexity_bound",
    "kernel",
    "kernel_1d",
    "kernel_1d_matrix",
    "kernel_walsh_coefficient_1d",
    "lambda_grid",
    "load_weights_file",
    "mean_wce_estimate",
    "points_as_array",
    "save_weights_file",
    "wce_squared",
    "weights_from_string",
    "weights_to_string",
]
