"""Neighborhoods and their finite sample sets."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from ..dyadic import below_threshold, to_units
from ..kernels import word_mask
from ..errors import ResourceLimitError, UsageError
from ..systems import CATALOG, MorseSystem, TorusSystem
from ..systems.symbolic import SymbolicPoint, shift, symbolic_window
from ..systems.torus import TorusPoint, magnitudes_units


@dataclass(frozen=True)
class Ball:
    """Open sup-metric ball on the torus."""

    center: TorusPoint
    radius: Fraction

    def __post_init__(self):
        if Fraction(self.radius) <= 0:
            raise UsageError("ball radius must be positive")

    @property
    def limit_units(self) -> int:
        # dist < radius  <=>  dist_units < limit_units
        return below_threshold(self.radius, self.center.bits)

    def contains(self, x: TorusPoint) -> bool:
        return bool(self.contains_words(x.words()[None, :])[0])

    def contains_words(self, words: np.ndarray) -> np.ndarray:
        c = self.center.words()
        bits = self.center.bits
        units = magnitudes_units((words - c) & word_mask(bits), bits)
        return units.max(axis=1) < self.limit_units


@dataclass(frozen=True)
class Cylinder:
    """Points whose symbols on the listed coordinates match ``pattern``."""

    pattern: tuple[tuple[int, int], ...]

    @classmethod
    def around(cls, p: SymbolicPoint, r: int) -> "Cylinder":
        if r < 0:
            raise UsageError("cylinder radius must be nonnegative")
        syms = symbolic_window(p, -r, 2 * r + 1)
        return cls(tuple((i - r, int(s)) for i, s in enumerate(syms)))

    @property
    def radius(self) -> int:
        return max((abs(i) for i, _ in self.pattern), default=0)

    def contains(self, p: SymbolicPoint) -> bool:
        return all(int(symbolic_window(p, i, 1)[0]) == s for i, s in self.pattern)


Neighborhood = Union[Ball, Cylinder]


def check_pair(system, U):
    if isinstance(system, TorusSystem) and not isinstance(U, Ball):
        raise UsageError("torus systems take Ball neighborhoods")
    if isinstance(system, MorseSystem) and not isinstance(U, Cylinder):
        raise UsageError("the Morse system takes Cylinder neighborhoods")


def ball_samples(U: Ball, g: int, max_samples: int = 1 << 16) -> list[TorusPoint]:
    """Center, then a ``g``-per-dimension lattice strictly inside the ball.

    Offsets along each axis are ``(2k - g + 1) r / g`` for ``k < g``, rounded
    toward zero in ``W``-bit units, so every sample lies in the open ball.
    """
    if g < 1:
        raise UsageError("grid resolution must be positive")
    d, bits = U.center.dim, U.center.bits
    if g ** d + 1 > max_samples:
        raise ResourceLimitError(f"{g}^{d} grid samples exceed budget {max_samples}")
    r = to_units(U.radius, bits)
    offs = []
    for k in range(g):
        v = Fraction(2 * k - g + 1, g) * r
        offs.append(int(v))  # int() truncates toward zero
    m = (1 << bits) - 1
    out = [U.center]
    seen = {U.center.values}
    for combo in itertools.product(offs, repeat=d):
        vals = tuple((c + o) & m for c, o in zip(U.center.values, combo))
        if vals not in seen:
            seen.add(vals)
            out.append(TorusPoint(vals, bits))
    return out


def cylinder_samples(U: Cylinder, g: int, span: int = 4096) -> list[SymbolicPoint]:
    """Up to ``g`` members of ``U`` among shifts of the catalog points.

    Shifts are tried in the order 0, 1, -1, 2, -2, ... up to ``span``; all
    catalog points lie in the Morse subshift, so every sample does too.
    """
    if g < 1:
        raise UsageError("sample count must be positive")
    lo = -span - U.radius
    size = 2 * span + 2 * U.radius + 1
    wins = [symbolic_window(c, lo, size) for c in CATALOG]
    idx = np.array([i for i, _ in U.pattern], dtype=np.int64)
    want = np.array([s for _, s in U.pattern], dtype=np.uint8)
    out = []
    for k in _zigzag(span):
        for c, w in zip(CATALOG, wins):
            if np.array_equal(w[idx + k - lo], want):
                out.append(shift(c, k))
                if len(out) == g:
                    return out
    return out


def _zigzag(span: int):
    yield 0
    for k in range(1, span + 1):
        yield k
        yield -k


def samples(system, U, g: int) -> list:
    check_pair(system, U)
    if isinstance(U, Ball):
        return ball_samples(U, g)
    return cylinder_samples(U, g)
