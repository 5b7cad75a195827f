"""Constructive recurrence: pigeonhole returns, measure selection, IP overlaps."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from ..dyadic import below_threshold, to_units
from ..errors import InternalConsistencyError, ResourceLimitError, UsageError
from ..families import fs_closure
from ..systems import TorusSystem
from ..systems.torus import CircleCoord, distance_units, rotation_iterate, skew_iterate_many
from .neighborhoods import Ball

# ------------------------------------------------------------ pigeonhole


@dataclass(frozen=True)
class PigeonholeResult:
    k: int
    pair: Optional[tuple[int, int]]  # (S_u, S_v) with S_u > S_v

    @property
    def difference(self) -> Optional[int]:
        return None if self.pair is None else self.pair[0] - self.pair[1]


def covering_count(eps) -> int:
    """Number of arcs of width ``eps / 2`` needed to cover the circle."""
    tau = Fraction(eps) / 2
    return math.ceil(1 / tau)


def pigeonhole_recurrence(alpha: CircleCoord, x0: CircleCoord, eps, S: Sequence[int]) -> PigeonholeResult:
    """Find ``S_u > S_v`` in ``S`` with ``x0 + (S_u - S_v) alpha`` within ``eps`` of ``x0``.

    The points ``x0 + S_i alpha`` are dropped into ``k`` arcs of width
    ``eps / 2``; once ``len(S) > k`` two of them must share an arc.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise UsageError("eps must be positive")
    if len(set(S)) != len(S):
        raise UsageError("S must not repeat values")
    bits = alpha.bits
    k = covering_count(eps)
    tau_units = to_units(eps / 2, bits)
    seen: dict[int, int] = {}
    for s in S:
        p = rotation_iterate(x0, alpha, s).value
        arc = math.floor(p / tau_units)
        if arc in seen:
            u, v = max(s, seen[arc]), min(s, seen[arc])
            back = rotation_iterate(x0, alpha, u - v)
            if distance_units(back.value, x0.value, bits) >= below_threshold(eps, bits):
                raise InternalConsistencyError(f"pair ({u}, {v}) does not return within eps")
            return PigeonholeResult(k, (u, v))
        seen[arc] = s
    if len(S) > k:
        raise InternalConsistencyError(f"{len(S)} points in {k} arcs without a collision")
    return PigeonholeResult(k, None)


# ---------------------------------------------------------------- cells


@dataclass(frozen=True)
class CellSpace:
    """Finite probability space: cell ``i`` has weight ``weights[i]``."""

    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if any(Fraction(w) < 0 for w in self.weights):
            raise UsageError("cell weights must be nonnegative")
        if sum(Fraction(w) for w in self.weights) != 1:
            raise UsageError("cell weights must sum to 1")

    @classmethod
    def uniform(cls, m: int) -> "CellSpace":
        return cls((Fraction(1, m),) * m)

    @property
    def size(self) -> int:
        return len(self.weights)

    def measure(self, cells) -> Fraction:
        return sum((Fraction(self.weights[i]) for i in set(cells)), Fraction(0))

    def _integer_weights(self) -> tuple[np.ndarray, int]:
        den = math.lcm(*(Fraction(w).denominator for w in self.weights))
        nums = [int(Fraction(w) * den) for w in self.weights]
        dt = np.int64 if den < (1 << 62) // max(1, len(nums)) else object
        return np.array(nums, dtype=dt), den


@dataclass(frozen=True)
class GillisResult:
    indices: Optional[tuple[int, ...]]  # 0-based, increasing
    measure: Optional[Fraction]
    strategy: str  # "exhaustive" or "beam"

    @property
    def absent_exhaustive(self) -> bool:
        return self.indices is None and self.strategy == "exhaustive"


def gillis_select(
    space: CellSpace,
    sets: Sequence,
    a,
    k: int,
    eps,
    exhaustive_limit: int = 1_000_000,
    beam_width: int = 64,
) -> GillisResult:
    """Indices ``t_1 < ... < t_k`` with ``mu(E_{t_1} & ... & E_{t_k}) >= a^k - eps``.

    Exhaustive (lexicographic, first hit) when ``C(n, k)`` is within
    ``exhaustive_limit``; otherwise a beam search keeping the ``beam_width``
    heaviest partial intersections.  Bounds are checked in exact rationals.
    """
    a, eps = Fraction(a), Fraction(eps)
    n = len(sets)
    if not 1 <= k <= n:
        raise UsageError("need 1 <= k <= number of sets")
    masks = np.zeros((n, space.size), dtype=bool)
    for i, cells in enumerate(sets):
        masks[i, list(cells)] = True
    w, den = space._integer_weights()
    for i in range(n):
        if Fraction(int(w[masks[i]].sum()), den) < a:
            raise UsageError(f"set {i} has measure below a")
    target = a ** k - eps
    need = math.ceil(target * den)  # mu >= target  <=>  numerator >= need

    def mu(mask) -> int:
        return int(w[mask].sum())

    if math.comb(n, k) <= exhaustive_limit:
        found = _first_tuple(masks, mu, k, need)
        if found is None:
            return GillisResult(None, None, "exhaustive")
        return _checked(space, sets, found, target, "exhaustive")

    beam = [((), np.ones(space.size, dtype=bool))]
    for _ in range(k):
        grown = []
        for idx, m in beam:
            for j in range((idx[-1] + 1) if idx else 0, n):
                nm = m & masks[j]
                grown.append((mu(nm), idx + (j,), nm))
        grown.sort(key=lambda t: (-t[0], t[1]))
        beam = [(idx, m) for _, idx, m in grown[:beam_width]]
    for idx, m in beam:
        if len(idx) == k and mu(m) >= need:
            return _checked(space, sets, idx, target, "beam")
    return GillisResult(None, None, "beam")


def _first_tuple(masks, mu, k, need):
    n = masks.shape[0]

    def rec(start, chosen, m):
        if len(chosen) == k:
            return tuple(chosen) if mu(m) >= need else None
        for j in range(start, n - (k - len(chosen)) + 1):
            nm = m & masks[j]
            # intersections only shrink, so a light prefix cannot recover
            if mu(nm) < need:
                continue
            hit = rec(j + 1, chosen + [j], nm)
            if hit is not None:
                return hit
        return None

    return rec(0, [], np.ones(masks.shape[1], dtype=bool))


def _checked(space, sets, idx, target, strategy) -> GillisResult:
    inter = set(sets[idx[0]])
    for j in idx[1:]:
        inter &= set(sets[j])
    value = space.measure(inter)
    if value < target:
        raise InternalConsistencyError(f"selected tuple {idx} has measure {value} < {target}")
    return GillisResult(tuple(idx), value, strategy)


# ------------------------------------------------------------- IP overlap


@dataclass(frozen=True)
class OverlapResult:
    q: Optional[int]
    overlap: Optional[Fraction]
    mu_u: Fraction
    threshold: Fraction


def cell_centers(d: int, g: int, bits: int) -> np.ndarray:
    """Word array of the ``g^d`` cell centers ``(2i + 1) / (2g)``."""
    from ..kernels import as_words

    axis = [((2 * i + 1) << bits) // (2 * g) for i in range(g)]
    pts = list(itertools.product(axis, repeat=d))
    return as_words(pts, bits).reshape(len(pts), d)


def ip_overlap_search(
    system: TorusSystem, U: Ball, gens, g: int, threshold=None, max_cells: int = 1 << 22
) -> OverlapResult:
    """First ``q`` in ``FS(gens)`` (increasing) with estimated ``mu(U & T^-q U)`` at least ``threshold``.

    Measures are cell counts on a uniform ``g^d`` grid of cell centers; the
    default threshold is half the squared estimate of ``mu(U)``.
    """
    if not isinstance(system, TorusSystem):
        raise UsageError("ip_overlap_search supports torus systems only")
    if g ** system.d > max_cells:
        raise ResourceLimitError(f"{g}^{system.d} cells exceed budget {max_cells}")
    pts = cell_centers(system.d, g, system.bits)
    total = len(pts)
    in_u = U.contains_words(pts)
    mu_u = Fraction(int(in_u.sum()), total)
    thr = Fraction(threshold) if threshold is not None else mu_u ** 2 / 2
    base = pts[in_u]
    for q in fs_closure(gens):
        moved = skew_iterate_many(base, system.alpha, q, system.bits)
        overlap = Fraction(int(U.contains_words(moved).sum()), total) if len(base) else Fraction(0)
        if overlap >= thr:
            return OverlapResult(q, overlap, mu_u, thr)
    return OverlapResult(None, None, mu_u, thr)


__all__ = [
    "CellSpace",
    "GillisResult",
    "OverlapResult",
    "PigeonholeResult",
    "cell_centers",
    "gillis_select",
    "ip_overlap_search",
    "pigeonhole_recurrence",
]
