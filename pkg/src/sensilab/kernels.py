"""Hot integer kernels.

Every kernel exists twice: a loop version compiled by numba (``*_nb``) and a
numpy version (``*_np``).  The public wrappers pick one according to
:mod:`sensilab._accel` and the array dtype.  Torus arithmetic is carried in
``uint64`` words masked to ``W`` bits; for ``W > 64`` the numpy versions run on
``object`` arrays of Python ints, which numba cannot compile.

All arithmetic is modular, so both paths must agree bit for bit.
"""

from __future__ import annotations

import numpy as np

from ._accel import HAVE_NUMBA, njit

U64 = np.uint64


def word_dtype(bits: int):
    return np.dtype(np.uint64) if bits <= 64 else np.dtype(object)


def word_mask(bits: int):
    m = (1 << bits) - 1
    return U64(m) if bits <= 64 else m


def as_words(values, bits: int) -> np.ndarray:
    """Python ints -> word array (uint64 or object) reduced mod 2**bits."""
    m = (1 << bits) - 1
    flat = [int(v) & m for v in np.asarray(values, dtype=object).ravel()]
    arr = np.array(flat, dtype=word_dtype(bits))
    return arr.reshape(np.shape(values))


def _use_nb(*arrays) -> bool:
    return HAVE_NUMBA and all(a.dtype == np.uint64 for a in arrays)


# ---------------------------------------------------------------- skew steps


@njit
def _skew_step_batch_nb(theta, alpha, n, mask):
    k, d = theta.shape
    for _ in range(n):
        for r in range(k):
            for j in range(d - 1, 0, -1):
                theta[r, j] = (theta[r, j] + theta[r, j - 1]) & mask
            theta[r, 0] = (theta[r, 0] + alpha[r]) & mask
    return theta


def _skew_step_batch_np(theta, alpha, n, mask):
    d = theta.shape[1]
    cols = [np.ascontiguousarray(theta[:, j]) for j in range(d)]
    # uint64 adds wrap on their own; narrower words and big ints need the mask
    wrap = theta.dtype != np.uint64 or int(mask) != (1 << 64) - 1
    for _ in range(n):
        for j in range(d - 1, 0, -1):
            np.add(cols[j], cols[j - 1], out=cols[j])
            if wrap:
                np.bitwise_and(cols[j], mask, out=cols[j])
        np.add(cols[0], alpha, out=cols[0])
        if wrap:
            np.bitwise_and(cols[0], mask, out=cols[0])
    for j in range(d):
        theta[:, j] = cols[j]
    return theta


def skew_step_batch(theta: np.ndarray, alpha: np.ndarray, n: int, bits: int) -> np.ndarray:
    """Apply ``n`` skew steps to each row of ``theta`` (shape ``(k, d)``)."""
    theta = np.array(theta, copy=True)
    mask = word_mask(bits)
    if _use_nb(theta, alpha):
        return _skew_step_batch_nb(theta, alpha, n, mask)
    return _skew_step_batch_np(theta, alpha, n, mask)


# ------------------------------------------------------------- pascal rows


@njit
def _pascal_row_nb(n, kmax, mask):
    row = np.zeros(kmax + 1, dtype=np.uint64)
    row[0] = np.uint64(1)
    for _ in range(n):
        for k in range(kmax, 0, -1):
            row[k] = (row[k] + row[k - 1]) & mask
    return row


def _pascal_row_np(n, kmax, bits):
    # column k of Pascal's triangle is the exclusive running sum of column k-1
    dt = word_dtype(bits)
    mask = word_mask(bits)
    col = np.ones(n + 1, dtype=dt)
    row = [col[n]]
    for _ in range(kmax):
        nxt = np.zeros(n + 1, dtype=dt)
        if n > 0:
            nxt[1:] = np.cumsum(col[:-1]) & mask
        col = nxt
        row.append(col[n])
    out = np.array(row, dtype=dt)
    return out & mask if dt == object else out


def pascal_columns(count: int, kmax: int, bits: int) -> np.ndarray:
    """Array ``C[k, n] = C(n, k) mod 2**bits`` for ``n < count``, ``k <= kmax``."""
    dt = word_dtype(bits)
    mask = word_mask(bits)
    out = np.zeros((kmax + 1, count), dtype=dt)
    out[0] = 1
    for k in range(1, kmax + 1):
        if count > 1:
            out[k, 1:] = np.cumsum(out[k - 1, :-1]) & mask
    return out


def pascal_row(n: int, kmax: int, bits: int) -> np.ndarray:
    """``[C(n, 0), ..., C(n, kmax)]`` modulo ``2**bits`` by additive recurrence."""
    if n < 0:
        raise ValueError("pascal_row needs n >= 0")
    if HAVE_NUMBA and bits <= 64:
        return _pascal_row_nb(n, kmax, word_mask(bits))
    return _pascal_row_np(n, kmax, bits)


# ------------------------------------------------------------------ orbits


@njit
def _skew_orbit_nb(theta, alpha, count, mask):
    d = theta.shape[0]
    out = np.empty((count, d), dtype=np.uint64)
    cur = theta.copy()
    for n in range(count):
        for j in range(d):
            out[n, j] = cur[j]
        for j in range(d - 1, 0, -1):
            cur[j] = (cur[j] + cur[j - 1]) & mask
        cur[0] = (cur[0] + alpha) & mask
    return out


def _skew_orbit_np(theta, alpha, count, bits):
    # coordinate j at time n is theta_j plus the sum of coordinate j-1 over
    # times 0..n-1, so the orbit is a chain of exclusive running sums
    dt = word_dtype(bits)
    mask = word_mask(bits)
    d = theta.shape[0]
    out = np.empty((count, d), dtype=dt)
    if count == 0:
        return out
    steps = np.arange(count, dtype=np.uint64).astype(dt)
    prev = (theta[0] + steps * alpha) & mask
    out[:, 0] = prev
    for j in range(1, d):
        acc = np.zeros(count, dtype=dt)
        acc[1:] = np.cumsum(prev[:-1]) & mask
        prev = (acc + theta[j]) & mask
        out[:, j] = prev
    return out


def skew_orbit(theta: np.ndarray, alpha, count: int, bits: int) -> np.ndarray:
    """Rows ``T^0 theta, ..., T^{count-1} theta`` of the skew map."""
    theta = np.asarray(theta)
    if _use_nb(theta) and bits <= 64:
        return _skew_orbit_nb(theta, U64(alpha), count, word_mask(bits))
    alpha = U64(alpha) if bits <= 64 else int(alpha)
    return _skew_orbit_np(theta, alpha, count, bits)


# ---------------------------------------------------- sample set diameters


@njit
def _sample_diameters_nb(starts, alpha, count, mask):
    k, d = starts.shape
    cur = starts.copy()
    out = np.zeros(count, dtype=np.uint64)
    for n in range(count):
        best = np.uint64(0)
        for a in range(k):
            for b in range(a + 1, k):
                for j in range(d):
                    u = (cur[a, j] - cur[b, j]) & mask
                    v = (cur[b, j] - cur[a, j]) & mask
                    dist = u if u < v else v
                    if dist > best:
                        best = dist
        out[n] = best
        for a in range(k):
            for j in range(d - 1, 0, -1):
                cur[a, j] = (cur[a, j] + cur[a, j - 1]) & mask
            cur[a, 0] = (cur[a, 0] + alpha) & mask
    return out


def _sample_diameters_np(starts, alpha, count, bits, block=512):
    mask = word_mask(bits)
    k, d = starts.shape
    out = np.zeros(count, dtype=word_dtype(bits))
    cur = starts.copy()
    iu, ju = np.triu_indices(k, 1)
    for lo in range(0, count, block):
        m = min(block, count - lo)
        orb = np.stack([_skew_orbit_np(cur[r], alpha, m + 1, bits) for r in range(k)])
        cur = orb[:, m, :].copy()
        orb = orb[:, :m, :]
        if len(iu) == 0:
            continue
        u = (orb[iu] - orb[ju]) & mask
        v = (orb[ju] - orb[iu]) & mask
        dist = np.minimum(u, v)
        out[lo:lo + m] = dist.max(axis=(0, 2))
    return out


def sample_diameters(starts: np.ndarray, alpha, count: int, bits: int) -> np.ndarray:
    """Max pairwise sup-circle distance among skew images of ``starts``.

    Entry ``n`` is a raw ``W``-bit integer distance at time ``n``.
    """
    starts = np.asarray(starts)
    if _use_nb(starts) and bits <= 64:
        return _sample_diameters_nb(starts, U64(alpha), count, word_mask(bits))
    alpha = U64(alpha) if bits <= 64 else int(alpha)
    return _sample_diameters_np(starts, alpha, count, bits)


# ------------------------------------------- nearest disagreement distance


@njit
def _nearest_flag_nb(flags, centers, radius):
    size = flags.shape[0]
    prev = np.empty(size, dtype=np.int64)
    nxt = np.empty(size, dtype=np.int64)
    last = -1
    for i in range(size):
        if flags[i]:
            last = i
        prev[i] = last
    last = -1
    for i in range(size - 1, -1, -1):
        if flags[i]:
            last = i
        nxt[i] = last
    out = np.empty(centers.shape[0], dtype=np.int64)
    for t in range(centers.shape[0]):
        c = centers[t]
        best = -1
        if prev[c] >= 0:
            best = c - prev[c]
        if nxt[c] >= 0:
            gap = nxt[c] - c
            if best < 0 or gap < best:
                best = gap
        if best > radius:
            best = -1
        out[t] = best
    return out


def _nearest_flag_np(flags, centers, radius):
    where = np.flatnonzero(flags)
    out = np.full(len(centers), -1, dtype=np.int64)
    if len(where) == 0:
        return out
    pos = np.searchsorted(where, centers)
    right = np.where(pos < len(where), where[np.minimum(pos, len(where) - 1)] - centers, -1)
    left = np.where(pos > 0, centers - where[np.maximum(pos - 1, 0)], -1)
    big = np.iinfo(np.int64).max
    best = np.minimum(np.where(right >= 0, right, big), np.where(left >= 0, left, big))
    ok = best <= radius
    out[ok] = best[ok]
    return out


def nearest_flag_distance(flags: np.ndarray, centers: np.ndarray, radius: int) -> np.ndarray:
    """For each center index, distance to the nearest set flag, or -1 if beyond ``radius``."""
    flags = np.ascontiguousarray(flags, dtype=np.uint8)
    centers = np.ascontiguousarray(centers, dtype=np.int64)
    if HAVE_NUMBA:
        return _nearest_flag_nb(flags, centers, radius)
    return _nearest_flag_np(flags, centers, radius)


# ------------------------------------------------------- finite IP search


@njit
def _find_ip_nb(member, length):
    top = member.shape[0] - 1
    gens = np.zeros(length, dtype=np.int64)
    if top < 1:
        return gens[:0]
    sums = np.zeros(1 << length, dtype=np.int64)
    nxt = np.zeros(length, dtype=np.int64)
    j = 0
    nxt[0] = 1
    while j >= 0:
        g = nxt[j]
        base = 1 << j
        prev_total = sums[base - 1]
        if prev_total + g * (length - j) > top:
            j -= 1
            continue
        nxt[j] = g + 1
        ok = True
        for m in range(base):
            if member[sums[m] + g] == 0:
                ok = False
                break
        if not ok:
            continue
        gens[j] = g
        for m in range(base):
            sums[base + m] = sums[m] + g
        if j == length - 1:
            return gens
        j += 1
        nxt[j] = g
    return gens[:0]


@njit
def _find_diff_nb(member, length):
    top = member.shape[0] - 1
    elems = np.zeros(length, dtype=np.int64)
    if length == 1:
        return elems
    nxt = np.zeros(length, dtype=np.int64)
    j = 1
    nxt[1] = 1
    while j >= 1:
        e = nxt[j]
        if e > top:
            j -= 1
            continue
        nxt[j] = e + 1
        ok = True
        for i in range(j):
            if member[e - elems[i]] == 0:
                ok = False
                break
        if not ok:
            continue
        elems[j] = e
        if j == length - 1:
            return elems
        j += 1
        nxt[j] = e + 1
    return elems[:0]


find_ip_kernel = _find_ip_nb
find_diff_kernel = _find_diff_nb


@njit
def _ramsey_scan_nb(fs, target):
    # first coloring (as a bitmask over fs indices) with no monochromatic
    # finite IP set of length target, or -1
    size = fs.shape[0]
    top = fs[size - 1]
    for coloring in range(1 << (size - 1)):
        good = False
        for color in range(2):
            member = np.zeros(top + 1, dtype=np.uint8)
            for i in range(size):
                if ((coloring >> i) & 1) == color:
                    member[fs[i]] = 1
            if _find_ip_nb(member, target).shape[0] > 0:
                good = True
                break
        if not good:
            return coloring
    return -1


ramsey_scan_kernel = _ramsey_scan_nb


# --------------------------------------------------------- RP combo search


@njit
def _rp_scan_nb(close, offset, d, bound):
    # odometer over n in [-bound, bound]^d without zero entries, lexicographic
    n = np.full(d, -bound, dtype=np.int64)
    ncombo = (1 << d) - 1
    while True:
        ok = True
        for eps in range(1, ncombo + 1):
            s = 0
            for i in range(d):
                if (eps >> i) & 1:
                    s += n[i]
            if close[s + offset] == 0:
                ok = False
                break
        if ok:
            return n
        i = d - 1
        while i >= 0:
            n[i] += 1
            if n[i] == 0:
                n[i] = 1
            if n[i] <= bound:
                break
            n[i] = -bound
            i -= 1
        if i < 0:
            return n[:0]


def _rp_scan_np(close, offset, d, bound):
    axis = np.concatenate([np.arange(-bound, 0), np.arange(1, bound + 1)]).astype(np.int64)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    vecs = np.stack([g.ravel() for g in grids], axis=1)
    combos = np.array([[(e >> i) & 1 for i in range(d)] for e in range(1, 1 << d)], dtype=np.int64)
    sums = vecs @ combos.T + offset
    good = np.all(close[sums] != 0, axis=1)
    hit = np.flatnonzero(good)
    if len(hit) == 0:
        return np.zeros(0, dtype=np.int64)
    return vecs[hit[0]]


def rp_scan(close: np.ndarray, offset: int, d: int, bound: int) -> np.ndarray:
    """First ``n`` (lexicographic, nonzero entries) whose combination sums all land on ``close``."""
    close = np.ascontiguousarray(close, dtype=np.uint8)
    if HAVE_NUMBA:
        return _rp_scan_nb(close, offset, d, bound)
    return _rp_scan_np(close, offset, d, bound)
