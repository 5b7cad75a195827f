"""Rule-defined points of the two-sided Morse subshift.

Points are small expression trees evaluated lazily at any integer
coordinate::

    omega                  the two-sided Morse sequence
    eta                    omega on n >= 0, flipped omega on n < 0
    flip(p)                symbolwise complement
    shift(k, p)            sigma^k p, i.e. i -> p(i + k)
    periodic(0110)         periodic word, index 0 at the word start

The metric is ``2**-m`` where ``m`` is the smallest ``|i|`` with a
disagreement.  Two rule points can only be told apart by a finite scan, so
:func:`symbolic_metric` returns an interval-valued :class:`MetricValue`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .. import kernels
from ..dyadic import format_dyadic
from ..errors import ResourceLimitError, UnsupportedPointError, UsageError

MAX_DEPTH = 64
MAX_INDEX = 1 << 62


@dataclass(frozen=True)
class MorseOmega:
    def __str__(self) -> str:
        return "omega"


@dataclass(frozen=True)
class Eta:
    def __str__(self) -> str:
        return "eta"


@dataclass(frozen=True)
class Periodic:
    word: str

    def __post_init__(self):
        if not self.word or set(self.word) - {"0", "1"}:
            raise UsageError(f"periodic word must be a nonempty 0/1 string: {self.word!r}")

    def __str__(self) -> str:
        return f"periodic({self.word})"


@dataclass(frozen=True)
class Flip:
    inner: "SymbolicPoint"

    def __str__(self) -> str:
        return f"flip({self.inner})"


@dataclass(frozen=True)
class Shift:
    inner: "SymbolicPoint"
    offset: int

    def __str__(self) -> str:
        return f"shift({self.offset}, {self.inner})"


SymbolicPoint = Union[MorseOmega, Eta, Periodic, Flip, Shift]

OMEGA = MorseOmega()
ETA = Eta()
OMEGA_BAR = Flip(OMEGA)
ETA_BAR = Flip(ETA)


def shift(p: SymbolicPoint, k: int) -> SymbolicPoint:
    """``sigma^k p`` with nested shifts merged."""
    if isinstance(p, Shift):
        k, p = k + p.offset, p.inner
    return p if k == 0 else Shift(p, k)


def flip(p: SymbolicPoint) -> SymbolicPoint:
    return Flip(p)


# ------------------------------------------------------------- evaluation


def morse_symbol(n: int) -> int:
    """Two-sided Morse sequence: bit-count parity on ``n >= 0``, ``w(-m) = w(m-1)`` below."""
    if abs(n) > MAX_INDEX:
        raise UsageError(f"|n| exceeds 2^62: {n}")
    if n < 0:
        n = -n - 1
    return bin(n).count("1") & 1


def morse_symbol_recursive(n: int) -> int:
    """Same sequence from the defining recurrences (slow; used as an oracle)."""
    if n < 0:
        return morse_symbol_recursive(-n - 1)
    if n == 0:
        return 0
    half = morse_symbol_recursive(n >> 1)
    return half if n % 2 == 0 else 1 - half


def morse_window(idx: np.ndarray) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size and np.abs(idx).max() > MAX_INDEX:
        raise UsageError("index exceeds 2^62")
    m = np.where(idx < 0, -idx - 1, idx).astype(np.uint64)
    return (np.bitwise_count(m) & 1).astype(np.uint8)


def symbolic_eval(p: SymbolicPoint, i: int, max_depth: int = MAX_DEPTH) -> int:
    flipped = 0
    for _ in range(max_depth + 1):
        if isinstance(p, Shift):
            i += p.offset
            p = p.inner
        elif isinstance(p, Flip):
            flipped ^= 1
            p = p.inner
        elif isinstance(p, MorseOmega):
            return morse_symbol(i) ^ flipped
        elif isinstance(p, Eta):
            return morse_symbol(i) ^ (1 if i < 0 else 0) ^ flipped
        elif isinstance(p, Periodic):
            return int(p.word[i % len(p.word)]) ^ flipped
        else:
            raise UsageError(f"not a symbolic point: {p!r}")
    raise ResourceLimitError(f"rule depth exceeds {max_depth}")


def symbolic_window(p: SymbolicPoint, start: int, length: int, max_depth: int = MAX_DEPTH) -> np.ndarray:
    """Symbols ``p(start), ..., p(start + length - 1)`` as a uint8 array."""
    idx = np.arange(start, start + length, dtype=np.int64)
    flipped = 0
    for _ in range(max_depth + 1):
        if isinstance(p, Shift):
            idx = idx + p.offset
            p = p.inner
        elif isinstance(p, Flip):
            flipped ^= 1
            p = p.inner
        elif isinstance(p, MorseOmega):
            return morse_window(idx) ^ np.uint8(flipped)
        elif isinstance(p, Eta):
            return morse_window(idx) ^ (idx < 0).astype(np.uint8) ^ np.uint8(flipped)
        elif isinstance(p, Periodic):
            word = np.frombuffer(p.word.encode(), dtype=np.uint8) - ord("0")
            return word[idx % len(word)] ^ np.uint8(flipped)
        else:
            raise UsageError(f"not a symbolic point: {p!r}")
    raise ResourceLimitError(f"rule depth exceeds {max_depth}")


# ----------------------------------------------------------------- metric


@dataclass(frozen=True)
class MetricValue:
    """``exact`` distance, or an upper bound ``at_most`` when no difference was seen."""

    kind: str
    value: Fraction

    @classmethod
    def exact(cls, q) -> "MetricValue":
        return cls("exact", Fraction(q))

    @classmethod
    def at_most(cls, q) -> "MetricValue":
        return cls("at_most", Fraction(q))

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"

    def exceeds(self, delta) -> bool:
        """Certified ``d > delta``."""
        return self.is_exact and self.value > delta

    def certainly_not_exceeds(self, delta) -> bool:
        return self.value <= delta

    def __str__(self) -> str:
        return f"{self.kind}:{format_dyadic(self.value)}"


def disagreement_radius(p: SymbolicPoint, q: SymbolicPoint, radius: int) -> int:
    """Smallest ``|i| <= radius`` with ``p(i) != q(i)``, or -1."""
    if radius < 0:
        raise UsageError("radius must be nonnegative")
    a = symbolic_window(p, -radius, 2 * radius + 1)
    b = symbolic_window(q, -radius, 2 * radius + 1)
    out = kernels.nearest_flag_distance(a != b, np.array([radius]), radius)
    return int(out[0])


def symbolic_metric(p: SymbolicPoint, q: SymbolicPoint, radius: int) -> MetricValue:
    m = disagreement_radius(p, q, radius)
    if m < 0:
        return MetricValue.at_most(Fraction(1, 1 << (radius + 1)))
    return MetricValue.exact(Fraction(1, 1 << m))


def metric_from_radius(m: int, radius: int) -> MetricValue:
    if m < 0:
        return MetricValue.at_most(Fraction(1, 1 << (radius + 1)))
    return MetricValue.exact(Fraction(1, 1 << m))


def orbit_disagreements(p: SymbolicPoint, q: SymbolicPoint, start: int, count: int, radius: int) -> np.ndarray:
    """For ``n`` in ``[start, start + count)``: smallest disagreement radius of ``sigma^n p, sigma^n q``.

    Entries are -1 where no disagreement lies within ``radius``.
    """
    lo = start - radius
    size = count + 2 * radius
    a = symbolic_window(p, lo, size)
    b = symbolic_window(q, lo, size)
    centers = np.arange(count, dtype=np.int64) + radius
    return kernels.nearest_flag_distance(a != b, centers, radius)


# --------------------------------------------------------------- odometer

_ODOMETER_BASES = (OMEGA, OMEGA_BAR, ETA, ETA_BAR)


def odometer_coordinate(p: SymbolicPoint, n_levels: int) -> list[int]:
    """Dyadic odometer coordinates ``a_m = k mod 2^m`` of ``sigma^k`` of a base point.

    Base points (``omega``, ``eta`` and their flips) sit over the odometer's
    zero; shifting by one adds one.  Other points raise
    :class:`UnsupportedPointError`.
    """
    k = 0
    base = p
    if isinstance(p, Shift):
        merged = shift(p.inner, p.offset)
        k, base = (merged.offset, merged.inner) if isinstance(merged, Shift) else (0, merged)
    if base not in _ODOMETER_BASES:
        raise UnsupportedPointError(f"odometer coordinate needs a shift of omega/eta (or flips): {p}")
    return [k % (1 << m) for m in range(1, n_levels + 1)]


# ---------------------------------------------------------------- parsing


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, msg: str):
        raise UsageError(msg, self.pos, self.text)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, ch: str):
        self.skip()
        if not self.text.startswith(ch, self.pos):
            self.fail(f"expected {ch!r}")
        self.pos += len(ch)

    def word(self) -> str:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] in "_-"):
            self.pos += 1
        return self.text[start:self.pos]

    def expr(self, depth: int = 0) -> SymbolicPoint:
        if depth > MAX_DEPTH:
            self.fail(f"expression nested deeper than {MAX_DEPTH}")
        self.skip()
        start = self.pos
        name = self.word()
        if name == "omega":
            return OMEGA
        if name == "eta":
            return ETA
        if name == "flip":
            self.expect("(")
            inner = self.expr(depth + 1)
            self.expect(")")
            return Flip(inner)
        if name == "shift":
            self.expect("(")
            self.skip()
            at = self.pos
            tok = self.word()
            try:
                k = int(tok)
            except ValueError:
                self.pos = at
                self.fail("expected an integer shift")
            self.expect(",")
            inner = self.expr(depth + 1)
            self.expect(")")
            return Shift(inner, k)
        if name == "periodic":
            self.expect("(")
            self.skip()
            at = self.pos
            w = self.word()
            if not w or set(w) - {"0", "1"}:
                self.pos = at
                self.fail("expected a 0/1 word")
            self.expect(")")
            return Periodic(w)
        self.pos = start
        self.fail("expected omega, eta, flip(...), shift(k, ...) or periodic(...)")

    def parse(self) -> SymbolicPoint:
        p = self.expr()
        self.skip()
        if self.pos != len(self.text):
            self.fail("trailing characters")
        return p


def parse_symbolic(text: str) -> SymbolicPoint:
    return _Parser(text).parse()
