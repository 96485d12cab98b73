"""Exact base-b arithmetic primitives.

Three small value types are shared by the rest of the package:

* ``BAdicReal`` -- a number in [0, 1] stored as an explicit digit prefix
  plus one repeating tail digit, so x = sum_i xi_i b^-i + t b^-p / (b - 1).
  Digit positions are 1-based; the expansion with all digits b - 1 encodes
  x = 1.  Equality compares values, not representations.
* ``PolyZb`` -- a polynomial over Z_b (b prime) with coefficients stored
  ascending by degree and no trailing zeros; the zero polynomial has an
  empty coefficient tuple and degree() == -1 (deg 0 < 0 by convention).
* ``LaurentPrefix`` -- the first L coefficients t_1..t_L of a formal
  expansion q(x)/p(x) = sum_{l >= 1} t_l x^-l.

Digitwise addition and subtraction act position by position mod b with no
carry, tails included.  Composite bases are accepted by the digit types;
polynomial arithmetic requires a prime base.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction


def is_prime_base(b: int) -> bool:
    """True when b is a prime integer >= 2."""
    if b < 2:
        return False
    d = 2
    while d * d <= b:
        if b % d == 0:
            return False
        d += 1
    return True


def _check_base(b: int) -> None:
    if not isinstance(b, int) or b < 2:
        raise ValueError(f"base must be an integer >= 2, got {b!r}")


def int_digits_lsb(k: int, b: int, count: int | None = None) -> tuple[int, ...]:
    """Base-b digits of k >= 0, least significant first.

    With ``count`` the tuple is zero-padded or an error is raised if k needs
    more than ``count`` digits.
    """
    _check_base(b)
    if k < 0:
        raise ValueError("k must be >= 0")
    digits = []
    while k:
        k, r = divmod(k, b)
        digits.append(r)
    if count is not None:
        if len(digits) > count:
            raise ValueError(f"{len(digits)} digits needed, only {count} allowed")
        digits.extend([0] * (count - len(digits)))
    return tuple(digits)


@dataclass(frozen=True)
class BAdicReal:
    """A number in [0, 1] as digit prefix (xi_1, ..., xi_p) plus tail digit t."""

    base: int
    prefix: tuple[int, ...]
    tail: int = 0

    def __post_init__(self):
        _check_base(self.base)
        object.__setattr__(self, "prefix", tuple(int(d) for d in self.prefix))
        if any(not (0 <= d < self.base) for d in self.prefix):
            raise ValueError(f"prefix digits must lie in [0, {self.base})")
        if not (0 <= self.tail < self.base):
            raise ValueError(f"tail digit must lie in [0, {self.base})")

    @property
    def precision(self) -> int:
        return len(self.prefix)

    def digit(self, i: int) -> int:
        """Digit xi_i (1-based); positions beyond the prefix repeat the tail."""
        if i < 1:
            raise ValueError("digit positions are 1-based")
        return self.prefix[i - 1] if i <= len(self.prefix) else self.tail

    def digits(self, count: int) -> tuple[int, ...]:
        return tuple(self.digit(i) for i in range(1, count + 1))

    @property
    def value(self) -> Fraction:
        b, p = self.base, len(self.prefix)
        head = sum(d * b ** (p - i - 1) for i, d in enumerate(self.prefix))
        # tail contributes t * b^-p * sum_{j>=1} b^-j = t b^-p / (b - 1)
        return Fraction(head, b**p) + Fraction(self.tail, b**p * (b - 1))

    def to_float(self) -> float:
        return float(self.value)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BAdicReal):
            return NotImplemented
        return self.base == other.base and self.value == other.value

    def __hash__(self):
        return hash((self.base, self.value))

    @classmethod
    def zero(cls, base: int) -> "BAdicReal":
        return cls(base, (), 0)

    @classmethod
    def one(cls, base: int) -> "BAdicReal":
        return cls(base, (), base - 1)

    def digit_string(self) -> str:
        """Compact text form ``d1d2...dp(t)``, digits as single characters."""
        if self.base > 10:
            raise ValueError("digit strings support bases up to 10")
        return "".join(str(d) for d in self.prefix) + f"({self.tail})"

    @classmethod
    def from_digit_string(cls, text: str, base: int) -> "BAdicReal":
        m = re.fullmatch(r"(\d*)\((\d)\)", text.strip())
        if m is None:
            raise ValueError(f"malformed digit string {text!r}, want e.g. '012(1)'")
        return cls(base, tuple(int(c) for c in m.group(1)), int(m.group(2)))


def badic_to_real(x: BAdicReal) -> Fraction:
    """Exact value of x; the denominator divides b^p (b - 1)."""
    return x.value


def real_to_badic(x: float | Fraction, base: int, precision: int) -> BAdicReal:
    """First ``precision`` digits of the expansion of x in [0, 1], tail 0.

    Uses the expansion in which only x = 1 has all digits equal to b - 1;
    x = 1 is returned exactly as the empty prefix with tail b - 1.
    """
    _check_base(base)
    if precision < 0:
        raise ValueError("precision must be >= 0")
    r = Fraction(x)
    if not (0 <= r <= 1):
        raise ValueError(f"x must lie in [0, 1], got {x!r}")
    if r == 1:
        return BAdicReal.one(base)
    digits = []
    for _ in range(precision):
        r *= base
        d = int(r)
        digits.append(d)
        r -= d
    return BAdicReal(base, tuple(digits), 0)


def digitwise_add(x: BAdicReal, y: BAdicReal) -> BAdicReal:
    """Position-by-position sum of digits mod b, no carry, tails included."""
    if x.base != y.base:
        raise ValueError("operands must share a base")
    b = x.base
    p = max(len(x.prefix), len(y.prefix))
    prefix = tuple((x.digit(i) + y.digit(i)) % b for i in range(1, p + 1))
    return BAdicReal(b, prefix, (x.tail + y.tail) % b)


def digitwise_sub(x: BAdicReal, y: BAdicReal) -> BAdicReal:
    """Position-by-position difference of digits mod b, no carry."""
    if x.base != y.base:
        raise ValueError("operands must share a base")
    b = x.base
    p = max(len(x.prefix), len(y.prefix))
    prefix = tuple((x.digit(i) - y.digit(i)) % b for i in range(1, p + 1))
    return BAdicReal(b, prefix, (x.tail - y.tail) % b)


def _inv_mod(a: int, b: int) -> int:
    # b prime, a not divisible by b
    return pow(a, b - 2, b) if b > 2 else a % b


@dataclass(frozen=True)
class PolyZb:
    """Polynomial over Z_b, b prime; coeffs ascending, no trailing zeros."""

    base: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not is_prime_base(self.base):
            raise ValueError(f"polynomial base must be prime, got {self.base}")
        c = tuple(int(a) % self.base for a in self.coeffs)
        while c and c[-1] == 0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)

    def degree(self) -> int:
        """Degree; -1 for the zero polynomial (deg 0 < 0 by convention)."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __add__(self, other: "PolyZb") -> "PolyZb":
        return poly_add(self, other)

    def __sub__(self, other: "PolyZb") -> "PolyZb":
        return poly_sub(self, other)

    def __mul__(self, other: "PolyZb") -> "PolyZb":
        return poly_mul(self, other)

    def __mod__(self, other: "PolyZb") -> "PolyZb":
        return poly_divrem(self, other)[1]

    @classmethod
    def zero(cls, base: int) -> "PolyZb":
        return cls(base, ())

    @classmethod
    def from_integer(cls, h: int, base: int) -> "PolyZb":
        """Polynomial whose coefficient vector is the base-b digits of h."""
        return cls(base, int_digits_lsb(h, base))

    def to_integer(self) -> int:
        return sum(c * self.base**i for i, c in enumerate(self.coeffs))


def _match_bases(p: PolyZb, q: PolyZb) -> int:
    if p.base != q.base:
        raise ValueError("operands must share a base")
    return p.base


def poly_add(p: PolyZb, q: PolyZb) -> PolyZb:
    b = _match_bases(p, q)
    n = max(len(p.coeffs), len(q.coeffs))
    return PolyZb(b, tuple((p.coeff(i) + q.coeff(i)) % b for i in range(n)))


def poly_sub(p: PolyZb, q: PolyZb) -> PolyZb:
    b = _match_bases(p, q)
    n = max(len(p.coeffs), len(q.coeffs))
    return PolyZb(b, tuple((p.coeff(i) - q.coeff(i)) % b for i in range(n)))


def poly_mul(p: PolyZb, q: PolyZb) -> PolyZb:
    b = _match_bases(p, q)
    if p.is_zero or q.is_zero:
        return PolyZb.zero(b)
    out = [0] * (len(p.coeffs) + len(q.coeffs) - 1)
    for i, a in enumerate(p.coeffs):
        if a:
            for j, c in enumerate(q.coeffs):
                out[i + j] = (out[i + j] + a * c) % b
    return PolyZb(b, tuple(out))


def poly_divrem(p: PolyZb, d: PolyZb) -> tuple[PolyZb, PolyZb]:
    """Quotient and remainder with deg(rem) < deg(d)."""
    b = _match_bases(p, d)
    if d.is_zero:
        raise ZeroDivisionError("polynomial division by zero")
    nd = d.degree()
    inv_lead = _inv_mod(d.coeffs[-1], b)
    rem = list(p.coeffs)
    quot = [0] * max(len(rem) - nd, 0)
    for i in range(len(rem) - 1, nd - 1, -1):
        if rem[i]:
            f = (rem[i] * inv_lead) % b
            quot[i - nd] = f
            for j, c in enumerate(d.coeffs):
                rem[i - nd + j] = (rem[i - nd + j] - f * c) % b
    return PolyZb(b, tuple(quot)), PolyZb(b, tuple(rem[:nd]))


def poly_mod(p: PolyZb, d: PolyZb) -> PolyZb:
    return poly_divrem(p, d)[1]


def _monic_polys(base: int, degree: int):
    # all monic polynomials of the given degree, lexicographic in low coeffs
    for h in range(base**degree):
        yield PolyZb(base, int_digits_lsb(h, base, degree) + (1,))


def poly_is_irreducible(p: PolyZb) -> bool:
    """Trial division by every monic polynomial of degree 1..deg(p)//2."""
    n = p.degree()
    if n < 1:
        return False
    for d in range(1, n // 2 + 1):
        for divisor in _monic_polys(p.base, d):
            if poly_mod(p, divisor).is_zero:
                return False
    return True


@dataclass(frozen=True)
class LaurentPrefix:
    """Coefficients t_1..t_L of an expansion sum_{l>=1} t_l x^-l over Z_b."""

    base: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        _check_base(self.base)
        if any(not (0 <= c < self.base) for c in self.coeffs):
            raise ValueError("coefficients must lie in [0, base)")

    def coeff(self, l: int) -> int:
        """t_l, 1-based; zero beyond the stored prefix is an error."""
        if not (1 <= l <= len(self.coeffs)):
            raise IndexError(f"coefficient t_{l} not computed")
        return self.coeffs[l - 1]


def laurent_expand(q: PolyZb, p: PolyZb, length: int) -> LaurentPrefix:
    """First ``length`` coefficients of q/p = sum_{l>=1} t_l x^-l.

    Requires deg(q) < deg(p).  The recurrence matches coefficients of
    x^(deg p - l) in p(x) * sum t_l x^-l against q, so
    t_l = inv(p_n) (q_{n-l} - sum_{j<l} t_j p_{n-l+j}).
    """
    b = _match_bases(q, p)
    if p.is_zero:
        raise ZeroDivisionError("expansion of q/0")
    if not q.is_zero and q.degree() >= p.degree():
        raise ValueError("laurent_expand requires deg(q) < deg(p)")
    n = p.degree()
    inv_lead = _inv_mod(p.coeffs[-1], b)
    t = []
    for l in range(1, length + 1):
        acc = q.coeff(n - l)
        for j in range(1, l):
            acc -= t[j - 1] * p.coeff(n - l + j)
        t.append((acc * inv_lead) % b)
    return LaurentPrefix(b, tuple(t))


def vn_map(e: LaurentPrefix, n: int) -> float:
    """Truncation v_n: sum of the first n coefficients as digits of a real."""
    return vn_badic(e, n).to_float()


def vn_badic(e: LaurentPrefix, n: int) -> BAdicReal:
    """v_n as an exact digit vector: prefix (t_1, ..., t_n), tail 0."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > len(e.coeffs):
        raise ValueError(f"prefix holds {len(e.coeffs)} coefficients, need {n}")
    return BAdicReal(e.base, e.coeffs[:n], 0)


def poly_to_string(p: PolyZb) -> str:
    """Ascending comma-separated coefficients, e.g. 1 + x + x^2 -> '1,1,1'."""
    if p.is_zero:
        return "0"
    return ",".join(str(c) for c in p.coeffs)


def poly_from_string(text: str, base: int) -> PolyZb:
    parts = [s.strip() for s in text.split(",")]
    if not parts or any(not re.fullmatch(r"\d+", s) for s in parts):
        raise ValueError(f"malformed polynomial string {text!r}")
    coeffs = tuple(int(s) for s in parts)
    if any(c >= base for c in coeffs):
        raise ValueError(f"coefficient out of range for base {base}: {text!r}")
    return PolyZb(base, coeffs)
