"""Return-time, hitting-time, divergence and sensitivity sets over a window.

Everything here is exact on torus systems (integer distances against
integer thresholds).  On the Morse system distances come from finite
scans; a pair that agrees on the whole scan only has an upper bound, and
windows count such cases as ambiguous instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from ..dyadic import exceed_threshold, format_dyadic
from ..errors import ResourceLimitError, UsageError
from ..families import WindowSet
from ..kernels import sample_diameters, word_mask
from ..systems import MorseSystem, TorusSystem
from ..systems.symbolic import (
    MetricValue,
    metric_from_radius,
    orbit_disagreements,
    shift,
    symbolic_window,
)
from ..systems.torus import magnitudes_units
from .neighborhoods import Ball, Cylinder, check_pair, samples


@dataclass(frozen=True)
class Budget:
    orbit: int = 10_000_000
    samples: int = 4096
    rp_evaluations: int = 50_000_000


DEFAULT_BUDGET = Budget()


def _check_window(n: int, budget: Budget, what: str = "window"):
    if n < 0:
        raise UsageError(f"{what} must be nonnegative")
    if n > budget.orbit:
        raise ResourceLimitError(f"{what} {n} exceeds orbit budget {budget.orbit}")


def _check_delta(delta) -> Fraction:
    delta = Fraction(delta)
    if delta <= 0:
        raise UsageError("delta must be positive")
    return delta


# ------------------------------------------------------------ return times


def _return_mask(system, x, U, start: int, count: int) -> np.ndarray:
    if isinstance(U, Ball):
        words = system.orbit(x, count, start)
        return U.contains_words(words)
    lo = min(i for i, _ in U.pattern) if U.pattern else 0
    hi = max(i for i, _ in U.pattern) if U.pattern else 0
    win = symbolic_window(system.point(x), start + lo, count + hi - lo)
    ok = np.ones(count, dtype=bool)
    for i, s in U.pattern:
        ok &= win[i - lo:i - lo + count] == s
    return ok


def return_times(system, x, U, n: int, budget: Budget = DEFAULT_BUDGET) -> WindowSet:
    """``{t in [0, n) : T^t x in U}``."""
    check_pair(system, U)
    _check_window(n, budget)
    return WindowSet.from_mask(_return_mask(system, x, U, 0, n))


def hitting_times(system, U, V, n: int, g: int, budget: Budget = DEFAULT_BUDGET) -> WindowSet:
    """Times at which some sample of ``U`` lands in ``V`` (a sound under-approximation)."""
    check_pair(system, U)
    check_pair(system, V)
    pts = samples(system, U, g)
    if len(pts) > budget.samples:
        raise ResourceLimitError(f"{len(pts)} samples exceed budget {budget.samples}")
    _check_window(n * len(pts), budget, "samples x window")
    hit = np.zeros(n, dtype=bool)
    for p in pts:
        hit |= _return_mask(system, p, V, 0, n)
    return WindowSet.from_mask(hit)


# ------------------------------------------------------------- divergence


@dataclass(frozen=True)
class DivergenceProfile:
    """Distances ``d(T^t x, T^t y)`` for ``t`` in ``[start, start + count)``.

    ``exceed`` holds the re-indexed times ``t - start`` certified to exceed
    ``delta``; ``ambiguous`` those that could not be decided.
    """

    start: int
    count: int
    delta: Fraction
    distances: tuple
    exceed: WindowSet
    ambiguous: WindowSet = field(default_factory=lambda: WindowSet(0))

    @property
    def ambiguity_count(self) -> int:
        return len(self.ambiguous)

    @property
    def non_exceed_count(self) -> int:
        return self.count - len(self.exceed) - len(self.ambiguous)

    def times(self) -> list[int]:
        """Exceedance times in the original (signed) indexing."""
        return [e + self.start for e in self.exceed]

    def to_json(self) -> dict:
        return {
            "start": self.start,
            "count": self.count,
            "delta": format_dyadic(self.delta),
            "distances": [_fmt(v) for v in self.distances],
            "exceed": str(self.exceed),
            "ambiguity_count": self.ambiguity_count,
        }


def _fmt(v) -> str:
    return str(v) if isinstance(v, MetricValue) else format_dyadic(v)


def torus_distance_series(system: TorusSystem, x, y, start: int, count: int) -> np.ndarray:
    """Raw ``W``-bit sup distances between the two orbits."""
    a = system.orbit(x, count, start)
    b = system.orbit(y, count, start)
    diff = (a - b) & word_mask(system.bits)
    return magnitudes_units(diff, system.bits).max(axis=1)


def divergence_profile(
    system, x, y, delta, n: int, back: int = 0, budget: Budget = DEFAULT_BUDGET
) -> DivergenceProfile:
    """Divergence profile over the signed window ``[-back, n)``."""
    delta = _check_delta(delta)
    if back < 0:
        raise UsageError("back must be nonnegative")
    count = n + back
    _check_window(count, budget)
    start = -back
    if isinstance(system, TorusSystem):
        units = torus_distance_series(system, x, y, start, count)
        scale = 1 << system.bits
        dists = tuple(Fraction(int(u), scale) for u in units)
        exceed = units > exceed_threshold(delta, system.bits)
        return DivergenceProfile(start, count, delta, dists, WindowSet.from_mask(exceed), WindowSet(count))
    if isinstance(system, MorseSystem):
        radii = orbit_disagreements(system.point(x), system.point(y), start, count, system.radius)
        dists = tuple(metric_from_radius(int(m), system.radius) for m in radii)
        exceed = np.array([v.exceeds(delta) for v in dists], dtype=bool)
        unsure = np.array([not v.is_exact and not v.certainly_not_exceeds(delta) for v in dists], dtype=bool)
        return DivergenceProfile(
            start, count, delta, dists, WindowSet.from_mask(exceed), WindowSet.from_mask(unsure)
        )
    raise UsageError(f"unsupported system {system!r}")


# ------------------------------------------------------------ sensitivity


def sensitivity_set(system, U, delta, n: int, g: int, budget: Budget = DEFAULT_BUDGET) -> WindowSet:
    """Times where the sampled image of ``U`` has diameter above ``delta``.

    The sample diameter never exceeds the true diameter, so every reported
    time is a genuine member of the sensitivity set.
    """
    delta = _check_delta(delta)
    check_pair(system, U)
    _check_window(n, budget)
    pts = samples(system, U, g)
    if len(pts) > budget.samples:
        raise ResourceLimitError(f"{len(pts)} samples exceed budget {budget.samples}")
    if isinstance(system, TorusSystem):
        starts = np.stack([p.words() for p in pts])
        diam = sample_diameters(starts, system.alpha.value, n, system.bits)
        return WindowSet.from_mask(diam > exceed_threshold(delta, system.bits))
    hit = np.zeros(n, dtype=bool)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            radii = orbit_disagreements(pts[i], pts[j], 0, n, system.radius)
            vals = [metric_from_radius(int(m), system.radius) for m in radii]
            hit |= np.array([v.exceeds(delta) for v in vals], dtype=bool)
    return WindowSet.from_mask(hit)


# ------------------------------------------------------------ proximality


@dataclass(frozen=True)
class Proximality:
    value: object
    argmin: int


def proximality_inf(system, x, y, n: int, direction: int = 1, budget: Budget = DEFAULT_BUDGET) -> Proximality:
    """Smallest recorded ``d(T^t x, T^t y)`` over ``t = 0, ..., n`` (``t <= 0`` if ``direction`` is -1)."""
    if direction not in (1, -1):
        raise UsageError("direction must be 1 or -1")
    _check_window(n + 1, budget)
    start = 0 if direction == 1 else -n
    count = n + 1
    if isinstance(system, TorusSystem):
        units = torus_distance_series(system, x, y, start, count)
        seq = units if direction == 1 else units[::-1]
        k = int(np.argmin(seq))
        return Proximality(Fraction(int(seq[k]), 1 << system.bits), k)
    if isinstance(system, MorseSystem):
        radii = orbit_disagreements(system.point(x), system.point(y), start, count, system.radius)
        seq = radii if direction == 1 else radii[::-1]
        # an unresolved pair (-1) is possibly closer than any located difference
        key = np.where(seq < 0, system.radius + 1, seq)
        k = int(np.argmax(key))
        return Proximality(metric_from_radius(int(seq[k]), system.radius), k)
    raise UsageError(f"unsupported system {system!r}")


def shifted_pair(system, x, y, k: int):
    """``(T^k x, T^k y)``; negative ``k`` uses the inverse map."""
    if isinstance(system, MorseSystem):
        return shift(system.point(x), k), shift(system.point(y), k)
    return system.iterate(x, k), system.iterate(y, k)


__all__ = [
    "Ball",
    "Budget",
    "Cylinder",
    "DivergenceProfile",
    "Proximality",
    "divergence_profile",
    "hitting_times",
    "proximality_inf",
    "return_times",
    "sensitivity_set",
]
