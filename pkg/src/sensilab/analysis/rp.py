"""Witness search for regional proximality of order d on torus systems."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from ..dyadic import below_threshold
from ..errors import ResourceLimitError, UsageError
from ..kernels import rp_scan
from ..systems import TorusSystem
from ..systems.torus import TorusPoint, torus_distance_units
from .neighborhoods import Ball, ball_samples
from .orbits import DEFAULT_BUDGET, Budget, torus_distance_series

MAX_ORDER = 4


@dataclass(frozen=True)
class RPWitness:
    x: TorusPoint
    y: TorusPoint
    n: tuple[int, ...]
    combos: tuple[tuple[tuple[int, ...], int], ...]  # (epsilon, n . epsilon)


@dataclass(frozen=True)
class RPResult:
    status: str  # "found" or "absent-budget"
    witness: Optional[RPWitness] = None
    pairs_scanned: int = 0


def _combos(d: int):
    return [tuple((e >> i) & 1 for i in range(d)) for e in range(1, 1 << d)]


def verify_rp_witness(system: TorusSystem, x, y, w: RPWitness, delta) -> bool:
    """Recompute every combination from scratch with the closed form."""
    delta = Fraction(delta)
    lim = below_threshold(delta, system.bits)
    if torus_distance_units(system.point(x), w.x) >= lim or torus_distance_units(system.point(y), w.y) >= lim:
        return False
    for eps in _combos(len(w.n)):
        m = sum(a * b for a, b in zip(w.n, eps))
        if torus_distance_units(system.iterate(w.x, m), system.iterate(w.y, m)) >= lim:
            return False
    return True


def rp_witness_search(
    system: TorusSystem,
    x,
    y,
    d: int,
    delta,
    bound: int,
    g: int,
    budget: Budget = DEFAULT_BUDGET,
) -> RPResult:
    """First witness in scan order, or ``absent-budget``.

    Scan order: ``x'`` over the grid of ``Ball(x, delta)``, then ``y'`` over
    the grid of ``Ball(y, delta)``, then ``n`` lexicographically over
    ``[-bound, bound]^d`` with all entries nonzero.  A witness needs every
    nonzero ``epsilon`` in ``{0,1}^d`` to give ``d(T^{n.eps} x', T^{n.eps} y') < delta``.
    Absence only means none was found within the budget.
    """
    if not isinstance(system, TorusSystem):
        raise UsageError("rp_witness_search supports torus systems only")
    if not 1 <= d <= MAX_ORDER:
        raise UsageError(f"order d must be in [1, {MAX_ORDER}]")
    if bound < 1:
        raise UsageError("bound must be at least 1")
    delta = Fraction(delta)
    if delta <= 0:
        raise UsageError("delta must be positive")
    x, y = system.point(x), system.point(y)

    if x == y:
        n = (1,) * d
        w = RPWitness(x, y, n, tuple((e, sum(e)) for e in _combos(d)))
        return RPResult("found", w, 0)

    xs = ball_samples(Ball(x, delta), g)
    ys = ball_samples(Ball(y, delta), g)
    span = d * bound
    per_pair = 2 * span + 1 + (2 * bound) ** d
    if len(xs) * len(ys) * per_pair > budget.rp_evaluations:
        raise ResourceLimitError(
            f"{len(xs)}x{len(ys)} pairs x {per_pair} evaluations exceed budget {budget.rp_evaluations}"
        )
    lim = below_threshold(delta, system.bits)
    scanned = 0
    for xp, yp in itertools.product(xs, ys):
        scanned += 1
        units = torus_distance_series(system, xp, yp, -span, 2 * span + 1)
        close = (units < lim).astype(np.uint8)
        n = rp_scan(close, span, d, bound)
        if len(n):
            n = tuple(int(v) for v in n)
            combos = tuple((e, sum(a * b for a, b in zip(n, e))) for e in _combos(d))
            return RPResult("found", RPWitness(xp, yp, n, combos), scanned)
    return RPResult("absent-budget", None, scanned)
