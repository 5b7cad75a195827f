"""Circle rotations and the torus skew products, in W-bit fixed point.

A circle coordinate is an unsigned ``W``-bit integer ``v`` standing for
``v / 2**W``.  Addition and integer multiples wrap modulo ``2**W``, which is
addition modulo 1, so the skew map and its closed form are exact and can be
compared bit for bit.  Irrational rotation numbers are represented by their
``W``-bit truncation; every statement here is about the truncated system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .. import kernels
from ..errors import UsageError

DEFAULT_BITS = 64
MAX_DEGREE = 8
# above this row index the O(n k) recurrence is replaced by exact big-integer
# binomials (division in Z, then reduction), which agree with it
PASCAL_LIMIT = 1 << 22


@dataclass(frozen=True)
class CircleCoord:
    value: int
    bits: int = DEFAULT_BITS

    def __post_init__(self):
        if self.bits < 1:
            raise UsageError("precision must be at least one bit")
        if not 0 <= self.value < (1 << self.bits):
            raise UsageError(f"value {self.value} does not fit in {self.bits} bits")

    @classmethod
    def wrap(cls, value: int, bits: int = DEFAULT_BITS) -> "CircleCoord":
        return cls(value & ((1 << bits) - 1), bits)

    @classmethod
    def from_fraction(cls, q, bits: int = DEFAULT_BITS) -> "CircleCoord":
        """Truncate ``q mod 1`` to ``bits`` bits (exact for dyadic ``q``)."""
        q = Fraction(q)
        return cls.wrap(math.floor(q * (1 << bits)), bits)

    @classmethod
    def sqrt2_minus_1(cls, bits: int = DEFAULT_BITS) -> "CircleCoord":
        return cls(math.isqrt(2 << (2 * bits)) - (1 << bits), bits)

    @classmethod
    def golden(cls, bits: int = DEFAULT_BITS) -> "CircleCoord":
        # (sqrt 5 - 1) / 2
        return cls((math.isqrt(5 << (2 * bits)) - (1 << bits)) >> 1, bits)

    @property
    def modulus(self) -> int:
        return 1 << self.bits

    def fraction(self) -> Fraction:
        return Fraction(self.value, self.modulus)

    def hex(self) -> str:
        return f"0x{self.value:0{(self.bits + 3) // 4}x}"

    def __add__(self, other: "CircleCoord") -> "CircleCoord":
        _same_bits(self, other)
        return CircleCoord.wrap(self.value + other.value, self.bits)

    def __sub__(self, other: "CircleCoord") -> "CircleCoord":
        _same_bits(self, other)
        return CircleCoord.wrap(self.value - other.value, self.bits)

    def __neg__(self) -> "CircleCoord":
        return CircleCoord.wrap(-self.value, self.bits)

    def times(self, n: int) -> "CircleCoord":
        return CircleCoord.wrap(self.value * n, self.bits)

    def magnitude(self) -> Fraction:
        """Distance to 0 on the circle."""
        return Fraction(distance_units(self.value, 0, self.bits), self.modulus)


def _same_bits(a, b):
    if a.bits != b.bits:
        raise UsageError(f"precision mismatch: {a.bits} vs {b.bits} bits")


def distance_units(a: int, b: int, bits: int) -> int:
    """Circle distance in units of ``2**-bits``."""
    m = (1 << bits) - 1
    u = (a - b) & m
    return min(u, (b - a) & m)


@dataclass(frozen=True)
class TorusPoint:
    values: tuple[int, ...]
    bits: int = DEFAULT_BITS

    def __post_init__(self):
        if not self.values:
            raise UsageError("torus dimension must be at least 1")
        top = 1 << self.bits
        if any(not 0 <= v < top for v in self.values):
            raise UsageError(f"coordinate does not fit in {self.bits} bits")

    @classmethod
    def of(cls, coords: Iterable, bits: int = DEFAULT_BITS) -> "TorusPoint":
        vals = []
        for c in coords:
            if isinstance(c, CircleCoord):
                _same_bits(c, CircleCoord(0, bits))
                vals.append(c.value)
            else:
                vals.append(CircleCoord.from_fraction(c, bits).value)
        return cls(tuple(vals), bits)

    @classmethod
    def zero(cls, d: int, bits: int = DEFAULT_BITS) -> "TorusPoint":
        return cls((0,) * d, bits)

    @property
    def dim(self) -> int:
        return len(self.values)

    @property
    def coords(self) -> tuple[CircleCoord, ...]:
        return tuple(CircleCoord(v, self.bits) for v in self.values)

    def fractions(self) -> tuple[Fraction, ...]:
        return tuple(c.fraction() for c in self.coords)

    def __str__(self) -> str:
        return "/".join(c.hex() for c in self.coords)

    def __sub__(self, other: "TorusPoint") -> "TorusPoint":
        _check_compatible(self, other)
        m = (1 << self.bits) - 1
        return TorusPoint(tuple((a - b) & m for a, b in zip(self.values, other.values)), self.bits)

    def words(self) -> np.ndarray:
        return kernels.as_words(list(self.values), self.bits)


def _check_compatible(x: TorusPoint, y: TorusPoint):
    if x.dim != y.dim:
        raise UsageError(f"dimension mismatch: {x.dim} vs {y.dim}")
    _same_bits(x, y)


# ---------------------------------------------------------------- rotations


def rotation_iterate(x: CircleCoord, alpha: CircleCoord, n: int) -> CircleCoord:
    """``x + n * alpha`` modulo 1; ``n`` may be negative."""
    _same_bits(x, alpha)
    return CircleCoord.wrap(x.value + n * alpha.value, x.bits)


def circle_metric(a: CircleCoord, b: CircleCoord) -> Fraction:
    _same_bits(a, b)
    return Fraction(distance_units(a.value, b.value, a.bits), a.modulus)


def torus_metric(x: TorusPoint, y: TorusPoint) -> Fraction:
    """Sup over coordinates of the circle distance."""
    _check_compatible(x, y)
    units = max(distance_units(a, b, x.bits) for a, b in zip(x.values, y.values))
    return Fraction(units, 1 << x.bits)


def torus_distance_units(x: TorusPoint, y: TorusPoint) -> int:
    _check_compatible(x, y)
    return max(distance_units(a, b, x.bits) for a, b in zip(x.values, y.values))


# ---------------------------------------------------------------- skew maps


def skew_step(theta: TorusPoint, alpha: CircleCoord) -> TorusPoint:
    """One application of ``(t1, ..., td) -> (t1 + a, t2 + t1, ..., td + t(d-1))``."""
    _same_bits(theta, alpha)
    m = (1 << theta.bits) - 1
    v = theta.values
    out = [(v[0] + alpha.value) & m]
    out += [(v[j] + v[j - 1]) & m for j in range(1, len(v))]
    return TorusPoint(tuple(out), theta.bits)


def skew_step_inverse(theta: TorusPoint, alpha: CircleCoord) -> TorusPoint:
    _same_bits(theta, alpha)
    m = (1 << theta.bits) - 1
    out = [(theta.values[0] - alpha.value) & m]
    for j in range(1, theta.dim):
        out.append((theta.values[j] - out[j - 1]) & m)
    return TorusPoint(tuple(out), theta.bits)


def skew_steps(theta: TorusPoint, alpha: CircleCoord, n: int) -> TorusPoint:
    """``n`` explicit skew steps (the iteration oracle for the closed form)."""
    if n < 0:
        raise UsageError("skew_steps needs n >= 0")
    row = kernels.skew_step_batch(theta.words()[None, :], kernels.as_words([alpha.value], alpha.bits), n, theta.bits)
    return TorusPoint(tuple(int(v) for v in row[0]), theta.bits)


def binomial_wrap(n: int, k: int, bits: int = DEFAULT_BITS, max_degree: int = MAX_DEGREE) -> int:
    """``C(n, k) mod 2**bits`` by the additive Pascal recurrence (no division)."""
    if n < 0 or k < 0:
        raise UsageError("binomial_wrap needs n, k >= 0")
    if k > max_degree:
        raise UsageError(f"degree {k} exceeds configured maximum {max_degree}")
    if n > PASCAL_LIMIT:
        return math.comb(n, k) & ((1 << bits) - 1)
    return int(kernels.pascal_row(n, k, bits)[k])


def binomial_row(n: int, kmax: int, bits: int = DEFAULT_BITS) -> list[int]:
    """``[C(n, 0), ..., C(n, kmax)] mod 2**bits``; ``n`` may be negative.

    Negative ``n`` uses the polynomial ``n (n-1) ... (n-k+1) / k!``, exact in
    big integers before reduction.
    """
    if n > PASCAL_LIMIT:
        return [math.comb(n, k) & ((1 << bits) - 1) for k in range(kmax + 1)]
    if n >= 0:
        return [int(c) for c in kernels.pascal_row(n, kmax, bits)]
    m = (1 << bits) - 1
    row, falling = [], 1
    for k in range(kmax + 1):
        row.append((falling // math.factorial(k)) & m)
        falling *= n - k
    return row


def skew_iterate_closed(theta: TorusPoint, alpha: CircleCoord, n: int) -> TorusPoint:
    """``T^n theta`` from the binomial closed form.

    Coordinate ``j`` is ``sum_{i=0}^{j} C(n, j-i) theta_i`` with
    ``theta_0 = alpha``, computed with wrapping integer arithmetic.
    """
    _same_bits(theta, alpha)
    d = theta.dim
    if d > MAX_DEGREE:
        raise UsageError(f"dimension {d} exceeds configured maximum degree {MAX_DEGREE}")
    m = (1 << theta.bits) - 1
    row = binomial_row(n, d, theta.bits)
    ext = (alpha.value,) + theta.values
    out = []
    for j in range(1, d + 1):
        acc = 0
        for i in range(j + 1):
            acc += row[j - i] * ext[i]
        out.append(acc & m)
    return TorusPoint(tuple(out), theta.bits)


def skew_iterate_many(thetas: np.ndarray, alpha: CircleCoord, n: int, bits: int) -> np.ndarray:
    """Closed-form ``T^n`` applied to every row of a word array ``(k, d)``."""
    thetas = np.asarray(thetas)
    d = thetas.shape[1]
    mask = kernels.word_mask(bits)
    coeff = kernels.as_words(binomial_row(n, d, bits), bits)
    m = (1 << bits) - 1
    out = np.empty_like(thetas)
    for j in range(d):
        # coordinate j (0-based) = C(n, j+1) alpha + sum_i C(n, j-i) theta_i
        lead = (int(coeff[j + 1]) * alpha.value) & m
        acc = kernels.as_words([lead] * thetas.shape[0], bits)
        for i in range(j + 1):
            acc = (acc + coeff[j - i] * thetas[:, i]) & mask
        out[:, j] = acc
    return out


def skew_orbit(theta: TorusPoint, alpha: CircleCoord, count: int) -> np.ndarray:
    """Word array of ``T^0 theta, ..., T^{count-1} theta``."""
    _same_bits(theta, alpha)
    return kernels.skew_orbit(theta.words(), alpha.value, count, theta.bits)


def skew_orbit_closed(theta: TorusPoint, alpha: CircleCoord, count: int) -> np.ndarray:
    """Same rows as :func:`skew_orbit`, from the closed form with Pascal columns."""
    _same_bits(theta, alpha)
    bits, d = theta.bits, theta.dim
    mask = kernels.word_mask(bits)
    cols = kernels.pascal_columns(count, d, bits)
    ext = kernels.as_words([alpha.value, *theta.values], bits)
    out = np.empty((count, d), dtype=kernels.word_dtype(bits))
    for j in range(1, d + 1):
        acc = np.zeros(count, dtype=out.dtype)
        for i in range(j + 1):
            acc = (acc + cols[j - i] * ext[i]) & mask
        out[:, j - 1] = acc
    return out


def magnitudes_units(words: np.ndarray, bits: int) -> np.ndarray:
    """Circle distance of each word to 0, in ``2**-bits`` units."""
    mask = kernels.word_mask(bits)
    return np.minimum(words & mask, (-words if words.dtype == object else (~words + kernels.U64(1))) & mask)


def parse_torus_point(text: str, bits: int = DEFAULT_BITS) -> TorusPoint:
    """Slash-separated coordinates: hex words (``0x...``) or decimal fractions."""
    from ..dyadic import parse_fraction

    vals = []
    pos = 0
    for chunk in text.split("/"):
        tok = chunk.strip()
        try:
            if tok.lower().startswith("0x"):
                v = int(tok, 16)
                if v >> bits:
                    raise UsageError(f"hex coordinate wider than {bits} bits", pos, text)
                vals.append(v)
            else:
                vals.append(CircleCoord.from_fraction(parse_fraction(tok), bits).value)
        except UsageError as exc:
            if exc.position is not None:
                raise
            raise UsageError(f"bad coordinate {tok!r}", pos, text) from None
        except ValueError:
            raise UsageError(f"bad coordinate {tok!r}", pos, text) from None
        pos += len(chunk) + 1
    return TorusPoint(tuple(vals), bits)


def parse_circle_coord(text: str, bits: int = DEFAULT_BITS) -> CircleCoord:
    """Rotation numbers: named constants, hex words, decimals or fractions."""
    from ..dyadic import parse_fraction

    tok = text.strip().lower()
    named = {"sqrt2-1": CircleCoord.sqrt2_minus_1, "golden": CircleCoord.golden}
    if tok in named:
        return named[tok](bits)
    if tok.startswith("0x"):
        try:
            v = int(tok, 16)
        except ValueError:
            raise UsageError(f"bad hex literal {text!r}", 0, text) from None
        if v >> bits:
            raise UsageError(f"hex literal wider than {bits} bits", 0, text)
        return CircleCoord(v, bits)
    return CircleCoord.from_fraction(parse_fraction(text), bits)


def random_torus_points(rng: np.random.Generator, count: int, d: int, bits: int) -> list[TorusPoint]:
    out = []
    for _ in range(count):
        out.append(TorusPoint(tuple(random_word(rng, bits) for _ in range(d)), bits))
    return out


def random_word(rng: np.random.Generator, bits: int) -> int:
    v = 0
    for _ in range((bits + 31) // 32):
        v = (v << 32) | int(rng.integers(0, 1 << 32))
    return v & ((1 << bits) - 1)

