"""Concrete minimal systems: circle rotations, torus skew products, the Morse subshift."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .. import kernels
from ..errors import UsageError
from .symbolic import (
    ETA,
    ETA_BAR,
    OMEGA,
    OMEGA_BAR,
    MetricValue,
    SymbolicPoint,
    parse_symbolic,
    shift,
    symbolic_metric,
)
from .torus import (
    DEFAULT_BITS,
    CircleCoord,
    TorusPoint,
    parse_circle_coord,
    parse_torus_point,
    skew_iterate_closed,
    torus_metric,
)

DEFAULT_RADIUS = 64


@dataclass(frozen=True)
class TorusSystem:
    """``T_{alpha,d}`` on the ``d``-torus; ``d = 1`` is the rotation by ``alpha``."""

    d: int
    alpha: CircleCoord

    def __post_init__(self):
        if self.d < 1:
            raise UsageError("torus dimension must be at least 1")

    @property
    def bits(self) -> int:
        return self.alpha.bits

    @property
    def literal(self) -> str:
        if self.d == 1:
            return f"rotation:{self.alpha.hex()}"
        return f"skew:{self.d}:{self.alpha.hex()}"

    def point(self, x) -> TorusPoint:
        if isinstance(x, str):
            return self.parse_point(x)
        if isinstance(x, CircleCoord):
            x = TorusPoint((x.value,), x.bits)
        if not isinstance(x, TorusPoint) or x.dim != self.d or x.bits != self.bits:
            raise UsageError(f"expected a {self.d}-dimensional {self.bits}-bit torus point, got {x}")
        return x

    def iterate(self, x, n: int) -> TorusPoint:
        return skew_iterate_closed(self.point(x), self.alpha, n)

    def orbit(self, x, count: int, start: int = 0) -> np.ndarray:
        """Word array (``count`` x ``d``) of ``T^start x, ..., T^{start+count-1} x``."""
        x = self.point(x)
        if start:
            x = self.iterate(x, start)
        return kernels.skew_orbit(x.words(), self.alpha.value, count, self.bits)

    def distance(self, x, y) -> Fraction:
        return torus_metric(self.point(x), self.point(y))

    def parse_point(self, text: str) -> TorusPoint:
        p = parse_torus_point(text, self.bits)
        if p.dim != self.d:
            raise UsageError(f"point has {p.dim} coordinates, system needs {self.d}", 0, text)
        return p

    def format_point(self, x) -> str:
        return str(self.point(x))


def rotation(alpha: CircleCoord) -> TorusSystem:
    return TorusSystem(1, alpha)


def skew(d: int, alpha: CircleCoord) -> TorusSystem:
    return TorusSystem(d, alpha)


@dataclass(frozen=True)
class MorseSystem:
    """Shift on the two-sided Morse subshift, metric scanned out to ``radius``."""

    radius: int = DEFAULT_RADIUS

    literal = "morse"

    def point(self, x) -> SymbolicPoint:
        if isinstance(x, str):
            return parse_symbolic(x)
        return x

    def iterate(self, x, n: int) -> SymbolicPoint:
        return shift(self.point(x), n)

    def distance(self, x, y) -> MetricValue:
        return symbolic_metric(self.point(x), self.point(y), self.radius)

    def parse_point(self, text: str) -> SymbolicPoint:
        return parse_symbolic(text)

    def format_point(self, x) -> str:
        return str(self.point(x))


CATALOG = (OMEGA, OMEGA_BAR, ETA, ETA_BAR)


def parse_system(text: str, bits: int = DEFAULT_BITS, radius: int = DEFAULT_RADIUS):
    """``rotation:<alpha>``, ``skew:<d>:<alpha>`` or ``morse``."""
    parts = text.strip().split(":")
    kind = parts[0].lower()
    if kind == "morse" and len(parts) == 1:
        return MorseSystem(radius)
    if kind == "rotation" and len(parts) == 2:
        return rotation(_alpha(parts[1], bits, text))
    if kind == "skew" and len(parts) == 3:
        try:
            d = int(parts[1])
        except ValueError:
            raise UsageError("skew dimension must be an integer", len("skew:"), text) from None
        if d < 1:
            raise UsageError("skew dimension must be positive", len("skew:"), text)
        return skew(d, _alpha(parts[2], bits, text))
    raise UsageError("system must be rotation:<alpha>, skew:<d>:<alpha> or morse", 0, text)


def _alpha(tok: str, bits: int, text: str) -> CircleCoord:
    try:
        return parse_circle_coord(tok, bits)
    except UsageError as exc:
        raise UsageError(f"bad rotation number: {exc.args[0].splitlines()[0]}", text.rfind(tok), text) from None


__all__ = [
    "CATALOG",
    "CircleCoord",
    "MorseSystem",
    "TorusPoint",
    "TorusSystem",
    "parse_system",
    "rotation",
    "skew",
]
