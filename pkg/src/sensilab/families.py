"""Finite-window combinatorics of subsets of the nonnegative integers.

A :class:`WindowSet` is what can be observed of a set ``F`` of nonnegative
integers inside ``[0, N)``.  Membership of ``F`` in an infinite family (thick,
syndetic, IP, difference sets) cannot be decided from a window, so this module
reports *degrees* instead: the longest block, the smallest syndetic bound, the
longest finite IP set and the longest finite difference set found inside the
window, each backed by a witness that can be re-validated on its own.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Union

import numpy as np

from . import kernels
from .errors import ResourceLimitError, UsageError


@dataclass(frozen=True)
class Caps:
    fs_gens: int = 20
    ip_length: int = 12
    diff_length: int = 10
    ramsey_fs: int = 15


DEFAULT_CAPS = Caps()


@dataclass(frozen=True)
class WindowSet:
    window_end: int
    elements: tuple[int, ...] = ()

    def __post_init__(self):
        if self.window_end < 0:
            raise UsageError("window_end must be nonnegative")
        prev = -1
        for e in self.elements:
            if e <= prev:
                raise UsageError("elements must be strictly increasing")
            prev = e
        if self.elements and (self.elements[0] < 0 or self.elements[-1] >= self.window_end):
            raise UsageError(f"elements must lie in [0, {self.window_end})")

    @classmethod
    def of(cls, elements: Iterable[int], window_end: int) -> "WindowSet":
        return cls(int(window_end), tuple(sorted({int(e) for e in elements})))

    @classmethod
    def full(cls, window_end: int) -> "WindowSet":
        return cls(window_end, tuple(range(window_end)))

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "WindowSet":
        return cls(len(mask), tuple(int(i) for i in np.flatnonzero(mask)))

    @classmethod
    def parse(cls, text: str) -> "WindowSet":
        """Parse the ``1,2,3@8`` text form."""
        if text.count("@") != 1:
            pos = text.find("@", text.find("@") + 1) if "@" in text else len(text)
            raise UsageError("expected exactly one '@N' window suffix", pos, text)
        body, _, end = text.partition("@")
        at = len(body)
        try:
            window_end = int(end)
        except ValueError:
            raise UsageError("window size after '@' is not an integer", at + 1, text) from None
        elems = []
        pos = 0
        if body.strip():
            for chunk in body.split(","):
                try:
                    elems.append(int(chunk))
                except ValueError:
                    raise UsageError(f"not an integer: {chunk.strip()!r}", pos, text) from None
                pos += len(chunk) + 1
        for e in elems:
            if not 0 <= e < window_end:
                raise UsageError(f"element {e} outside [0, {window_end})", body.find(str(e)), text)
        return cls.of(elems, window_end)

    def __str__(self) -> str:
        return ",".join(map(str, self.elements)) + f"@{self.window_end}"

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self._set

    @cached_property
    def _set(self) -> frozenset[int]:
        return frozenset(self.elements)

    def issubset(self, other: "WindowSet") -> bool:
        return self._set <= other._set

    def indicator(self, size: Optional[int] = None) -> np.ndarray:
        size = self.window_end if size is None else size
        out = np.zeros(size, dtype=np.uint8)
        el = [e for e in self.elements if e < size]
        out[el] = 1
        return out


@dataclass(frozen=True)
class GeneratorSeq:
    gens: tuple[int, ...]

    def __post_init__(self):
        if not self.gens:
            raise UsageError("generator sequence must be nonempty")
        if any(g < 1 for g in self.gens):
            raise UsageError("generators must be positive")
        if any(a > b for a, b in zip(self.gens, self.gens[1:])):
            raise UsageError("generators must be nondecreasing")

    @classmethod
    def of(cls, gens: Iterable[int]) -> "GeneratorSeq":
        return cls(tuple(sorted(int(g) for g in gens)))

    def __len__(self) -> int:
        return len(self.gens)


# ------------------------------------------------------------------ witnesses


@dataclass(frozen=True)
class Block:
    start: int
    length: int

    def validate(self, s: WindowSet) -> bool:
        return self.length >= 0 and all(i in s for i in range(self.start, self.start + self.length))

    def to_json(self):
        return {"kind": "block", "start": self.start, "length": self.length}


@dataclass(frozen=True)
class FiniteIP:
    gens: GeneratorSeq

    def validate(self, s: WindowSet) -> bool:
        return set(fs_closure(self.gens)) <= s._set

    def to_json(self):
        return {"kind": "finite_ip", "gens": list(self.gens.gens)}


@dataclass(frozen=True)
class FiniteDifference:
    base: tuple[int, ...]
    strict: bool = True

    def validate(self, s: WindowSet) -> bool:
        if not self.base or self.base[0] != 0 or list(self.base) != sorted(set(self.base)):
            return False
        return set(delta_closure(self.base, self.strict)) <= s._set

    def to_json(self):
        return {"kind": "finite_difference", "base": list(self.base)}


@dataclass(frozen=True)
class SyndeticBound:
    bound: int

    def validate(self, s: WindowSet) -> bool:
        n, b = s.window_end, self.bound
        if b < 1:
            return False
        ind = s.indicator()
        hits = np.concatenate([[0], np.cumsum(ind, dtype=np.int64)])
        if b > n:
            return True
        counts = hits[b:] - hits[: n - b + 1]
        return bool(np.all(counts > 0))

    def to_json(self):
        return {"kind": "syndetic_bound", "bound": self.bound}


FamilyWitness = Union[Block, FiniteIP, FiniteDifference, SyndeticBound]


# ----------------------------------------------------------------- closures


def _gens_tuple(gens) -> tuple[int, ...]:
    return gens.gens if isinstance(gens, GeneratorSeq) else GeneratorSeq.of(gens).gens


def fs_closure(gens, caps: Caps = DEFAULT_CAPS) -> list[int]:
    """Sorted set of all nonempty subset sums of ``gens``."""
    g = _gens_tuple(gens)
    if len(g) > caps.fs_gens:
        raise ResourceLimitError(f"{len(g)} generators exceeds cap {caps.fs_gens}")
    sums: set[int] = set()
    for x in g:
        sums |= {s + x for s in sums}
        sums.add(x)
    return sorted(sums)


def delta_closure(base: Iterable[int], strict: bool = True) -> list[int]:
    base = sorted(set(base))
    if not base:
        raise UsageError("delta_closure needs a nonempty base")
    out = {a - b for i, a in enumerate(base) for b in base[:i]}
    if not strict:
        out.add(0)
    return sorted(out)


# ------------------------------------------------------------------- degrees


def max_block_length(s: WindowSet) -> int:
    return longest_block(s).length


def longest_block(s: WindowSet) -> Block:
    """Leftmost longest run of consecutive integers in ``s``."""
    best, best_start = 0, 0
    run, start = 0, 0
    prev = None
    for e in s.elements:
        if prev is not None and e == prev + 1:
            run += 1
        else:
            run, start = 1, e
        if run > best:
            best, best_start = run, start
        prev = e
    return Block(best_start, best)


def min_syndetic_bound(s: WindowSet) -> Optional[int]:
    """Smallest ``b`` such that every ``[k, k+b)`` inside the window meets ``s``."""
    if not s.elements:
        return None
    el = s.elements
    b = max(el[0] + 1, s.window_end - el[-1])
    for a, c in zip(el, el[1:]):
        b = max(b, c - a)
    return b


def _member(s: WindowSet) -> np.ndarray:
    return s.indicator(s.elements[-1] + 1)


def find_finite_ip(s: WindowSet, length: int, caps: Caps = DEFAULT_CAPS) -> Optional[GeneratorSeq]:
    """Lexicographically smallest nondecreasing ``g`` of given length with ``FS(g)`` inside ``s``."""
    if length < 1:
        raise UsageError("length must be positive")
    if length > caps.ip_length:
        raise ResourceLimitError(f"IP length {length} exceeds cap {caps.ip_length}")
    if not s.elements:
        return None
    g = kernels.find_ip_kernel(_member(s), length)
    if len(g) == 0:
        return None
    return GeneratorSeq(tuple(int(x) for x in g))


def find_finite_difference(
    s: WindowSet, length: int, caps: Caps = DEFAULT_CAPS, strict: bool = True
) -> Optional[tuple[int, ...]]:
    """Lexicographically smallest ``E`` with ``min(E) = 0``, ``|E| = length`` and ``Delta(E)`` inside ``s``."""
    if length < 1:
        raise UsageError("length must be positive")
    if length > caps.diff_length:
        raise ResourceLimitError(f"difference length {length} exceeds cap {caps.diff_length}")
    if not strict and 0 not in s:
        return None
    if length == 1:
        return (0,)
    if not s.elements:
        return None
    e = kernels.find_diff_kernel(_member(s), length)
    if len(e) == 0:
        return None
    return tuple(int(x) for x in e)


# ------------------------------------------------------------------- profile


@dataclass(frozen=True)
class FamilyProfile:
    window: WindowSet
    cardinality: int
    max_block_length: int
    syndetic_bound: Optional[int]
    max_ip_length: int
    max_diff_length: int
    caps: Caps
    witnesses: dict = field(default_factory=dict)

    def validate(self) -> bool:
        w = self.witnesses
        checks = [
            self.cardinality == len(self.window),
            w["block"].validate(self.window) and w["block"].length == self.max_block_length,
        ]
        if self.syndetic_bound is not None:
            checks.append(w["syndetic"].validate(self.window))
        if self.max_ip_length:
            checks.append(w["ip"].validate(self.window) and len(w["ip"].gens) == self.max_ip_length)
        if self.max_diff_length:
            checks.append(w["diff"].validate(self.window) and len(w["diff"].base) == self.max_diff_length)
        return all(checks)

    def to_json(self) -> dict:
        return {
            "window": str(self.window),
            "cardinality": self.cardinality,
            "max_block_length": self.max_block_length,
            "syndetic_bound": self.syndetic_bound,
            "max_ip_length": self.max_ip_length,
            "max_diff_length": self.max_diff_length,
            "caps": {"ip_length": self.caps.ip_length, "diff_length": self.caps.diff_length},
            "witnesses": {k: v.to_json() for k, v in sorted(self.witnesses.items())},
        }


def classify_window(s: WindowSet, caps: Caps = DEFAULT_CAPS) -> FamilyProfile:
    """Window-scale degree statistics of ``s``, each backed by a witness."""
    witnesses: dict = {"block": longest_block(s)}
    bound = min_syndetic_bound(s)
    if bound is not None:
        witnesses["syndetic"] = SyndeticBound(bound)

    # both degrees are monotone in the length (prefixes / subsets of a witness
    # are witnesses), so a linear scan stops at the first failure
    ip_len = 0
    if s.elements:
        for length in range(1, caps.ip_length + 1):
            g = find_finite_ip(s, length, caps)
            if g is None:
                break
            ip_len, witnesses["ip"] = length, FiniteIP(g)

    diff_len = 0
    if s.elements:
        for length in range(1, caps.diff_length + 1):
            e = find_finite_difference(s, length, caps)
            if e is None:
                break
            diff_len, witnesses["diff"] = length, FiniteDifference(e)

    return FamilyProfile(
        window=s,
        cardinality=len(s),
        max_block_length=witnesses["block"].length,
        syndetic_bound=bound,
        max_ip_length=ip_len,
        max_diff_length=diff_len,
        caps=caps,
        witnesses=witnesses,
    )


# -------------------------------------------------------------------- ramsey


@dataclass(frozen=True)
class RamseyVerdict:
    holds: bool
    coloring: Optional[tuple[tuple[int, ...], tuple[int, ...]]] = None


def ramsey_split_check(gens, l_target: int, caps: Caps = DEFAULT_CAPS) -> RamseyVerdict:
    """Does every 2-coloring of ``FS(gens)`` keep a monochromatic finite IP set of length ``l_target``?

    On failure the violating coloring is returned as its two color classes.
    Colorings are enumerated with the largest sum fixed to class 0, which
    loses nothing because swapping colors preserves the property.
    """
    if l_target < 1:
        raise UsageError("l_target must be positive")
    if l_target > caps.ip_length:
        raise ResourceLimitError(f"l_target {l_target} exceeds cap {caps.ip_length}")
    fs = fs_closure(gens, caps)
    if len(fs) > caps.ramsey_fs:
        raise ResourceLimitError(f"|FS| = {len(fs)} exceeds coloring cap {caps.ramsey_fs}")
    code = int(kernels.ramsey_scan_kernel(np.array(fs, dtype=np.int64), l_target))
    if code < 0:
        return RamseyVerdict(True)
    zero = tuple(x for i, x in enumerate(fs) if not (code >> i) & 1)
    one = tuple(x for i, x in enumerate(fs) if (code >> i) & 1)
    return RamseyVerdict(False, (zero, one))
