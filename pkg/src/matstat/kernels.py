"""Hot counting loops: numba-jitted kernels with a pure-numpy fallback.

Backend selection: the environment variable MATSTAT_BACKEND ("numba" or
"numpy") picks the implementation at import time; tests and benchmarks can
switch at runtime with use_backend()/set_backend().  Both backends compute
identical integer results; float accumulations (census norm sums) are
deterministic per backend.

All kernels work on int64.  Callers are responsible for keeping inputs in
the documented ranges (H <= 2048 for the pair tables, U <= 10^4 for the
census) so intermediates stay far from overflow.
"""

from __future__ import annotations

import os
from contextlib import contextmanager

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dep, but stay usable
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap


_VALID = ("numba", "numpy")
_backend = os.environ.get("MATSTAT_BACKEND", "numba" if HAVE_NUMBA else "numpy")
if _backend not in _VALID:
    raise ValueError(f"MATSTAT_BACKEND must be one of {_VALID}")
if _backend == "numba" and not HAVE_NUMBA:
    _backend = "numpy"


def current_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in _VALID:
        raise ValueError(f"backend must be one of {_VALID}")
    if name == "numba" and not HAVE_NUMBA:
        raise ValueError("numba backend requested but numba is not importable")
    _backend = name


@contextmanager
def use_backend(name: str):
    old = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(old)


def run_parts(fn, total_range: int, parts: int, threads: int) -> list:
    """Apply fn(lo, hi) over `parts` contiguous ranges of [0, total_range).

    Part boundaries depend only on `parts`, and results come back in part
    order, so the merged output is independent of the thread count.
    """
    from concurrent.futures import ThreadPoolExecutor

    parts = max(1, min(parts, total_range)) if total_range else 1
    bounds = [
        (i * total_range // parts, (i + 1) * total_range // parts)
        for i in range(parts)
    ]
    if threads <= 1 or parts == 1:
        return [fn(lo, hi) for lo, hi in bounds]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(lambda b: fn(b[0], b[1]), bounds))


# ---------------------------------------------------------------------------
# shared small helpers (pure numpy, cheap enough not to need a backend)


def pair_count_table(h: int) -> np.ndarray:
    """table[p] = #{1 <= x, y <= h : x*y = p} for 0 <= p <= h*h."""
    if h < 0:
        raise ValueError("h must be >= 0")
    table = np.zeros(h * h + 1, dtype=np.int64)
    for x in range(1, h + 1):
        prods = np.arange(x, x * h + 1, x, dtype=np.int64)
        np.add.at(table, prods, 1)
    return table


def full_pair_count_array(h: int, halo: int) -> np.ndarray:
    """counts of {(x,y) in [-h,h]^2 : x*y = D} indexed by D + halo.

    Covers D in [-halo, halo]; zero outside the feasible band |D| <= h*h.
    """
    pos = pair_count_table(h)
    out = np.zeros(2 * halo + 1, dtype=np.int64)
    out[halo] = 4 * h + 1
    top = min(h * h, halo)
    if top >= 1:
        out[halo + 1 : halo + top + 1] = 2 * pos[1 : top + 1]
        out[halo - top : halo] = (2 * pos[1 : top + 1])[::-1]
    return out


# ---------------------------------------------------------------------------
# numba device helpers


@njit(cache=True, nogil=True)
def _gcd2(a, b):
    a = abs(a)
    b = abs(b)
    while b:
        a, b = b, a % b
    return a


@njit(cache=True, nogil=True)
def _xgcd(a, b):
    """(g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        return -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@njit(cache=True, nogil=True)
def _interval(x0, step, h):
    """Integer m-range with |x0 + m*step| <= h, step != 0."""
    flip = step < 0
    if flip:
        step = -step
    lo = -((h + x0) // step)
    hi = (h - x0) // step
    if flip:
        return -hi, -lo
    return lo, hi


@njit(cache=True, nogil=True)
def _count_line(alpha, beta, g, h):
    """#{(x, y) in [-h,h]^2 : alpha*x + beta*y = g}."""
    if alpha == 0 and beta == 0:
        if g == 0:
            return (2 * h + 1) * (2 * h + 1)
        return 0
    gg, x, y = _xgcd(alpha, beta)
    if g % gg != 0:
        return 0
    cc = g // gg
    x0 = x * cc
    y0 = y * cc
    bstep = beta // gg
    astep = alpha // gg
    lo = -(1 << 62)
    hi = 1 << 62
    if bstep == 0:
        if abs(x0) > h:
            return 0
    else:
        l1, h1 = _interval(x0, bstep, h)
        if l1 > lo:
            lo = l1
        if h1 < hi:
            hi = h1
    if astep == 0:
        if abs(y0) > h:
            return 0
    else:
        l2, h2 = _interval(y0, -astep, h)
        if l2 > lo:
            lo = l2
        if h2 < hi:
            hi = h2
    if hi < lo:
        return 0
    return hi - lo + 1


# ---------------------------------------------------------------------------
# n = 2 naive enumeration count (det, optionally trace)


@njit(cache=True, nogil=True)
def _n2_count_numba(h, d, t, use_trace, lo, hi):
    count = 0
    for i in range(lo, hi):
        a = i - h
        for e in range(-h, h + 1):
            if use_trace and a + e != t:
                continue
            target = a * e - d
            for b in range(-h, h + 1):
                if b == 0:
                    if target == 0:
                        count += 2 * h + 1
                    continue
                if target % b == 0 and abs(target // b) <= h:
                    count += 1
    return count


def _n2_count_numpy(h, d, t, use_trace, lo, hi):
    rng = np.arange(-h, h + 1, dtype=np.int64)
    prod = rng[:, None] * rng[None, :]  # b * c grid
    count = 0
    for i in range(lo, hi):
        a = i - h
        diag = a * rng - d  # over a22
        if use_trace:
            e = t - a
            if abs(e) > h:
                continue
            count += int(np.count_nonzero(prod == a * e - d))
        else:
            count += int(np.count_nonzero(diag[:, None, None] == prod[None, :, :]))
    return count


def n2_count(h: int, d: int, t: int = 0, use_trace: bool = False,
             lo: int = 0, hi: int | None = None) -> int:
    """Enumeration count of 2x2 matrices with det = d (and trace = t).

    The outer index runs over a11 in [-h, h]; lo/hi give a subrange for
    sharding.  Counts a12*a21 pairs by divisor walk, which keeps this route
    independent of the pair-table route in charpoly2_*.
    """
    if hi is None:
        hi = 2 * h + 1
    if _backend == "numba":
        return int(_n2_count_numba(h, d, t, use_trace, lo, hi))
    return int(_n2_count_numpy(h, d, t, use_trace, lo, hi))


# ---------------------------------------------------------------------------
# n = 2 charpoly aggregation over the pair table


@njit(cache=True, nogil=True)
def _charpoly2_scan_numba(h, full_counts, halo, lo_t, hi_t):
    total = 0
    best_c = -1
    best_t = 0
    best_d = 0
    hh2 = 2 * h * h
    for tv in range(lo_t, hi_t):
        a_lo = max(-h, tv - h)
        a_hi = min(h, tv + h)
        for dv in range(-hh2, hh2 + 1):
            cnt = 0
            for a in range(a_lo, a_hi + 1):
                cnt += full_counts[a * (tv - a) - dv + halo]
            total += cnt
            if cnt > best_c:
                best_c = cnt
                best_t = tv
                best_d = dv
    return total, best_t, best_d, best_c


def _charpoly2_scan_numpy(h, full_counts, halo, lo_t, hi_t):
    total = 0
    best_c = -1
    best_t = 0
    best_d = 0
    hh2 = 2 * h * h
    d_vals = np.arange(-hh2, hh2 + 1, dtype=np.int64)
    for tv in range(lo_t, hi_t):
        a = np.arange(max(-h, tv - h), min(h, tv + h) + 1, dtype=np.int64)
        prods = a * (tv - a)
        idx = prods[:, None] - d_vals[None, :] + halo
        cnt = full_counts[idx].sum(axis=0)
        total += int(cnt.sum())
        j = int(np.argmax(cnt))
        if int(cnt[j]) > best_c:
            best_c = int(cnt[j])
            best_t = tv
            best_d = int(d_vals[j])
    return total, best_t, best_d, best_c


def charpoly2_scan(h: int, lo_t: int | None = None, hi_t: int | None = None):
    """Aggregate the fast 2x2 charpoly counter over every feasible (t, d).

    Returns (total, best_t, best_d, best_count) on the t-range
    [lo_t, hi_t) (defaults to [-2h, 2h]).  The total over the full range is
    (2h+1)^4; ties for the max resolve to the smallest (t, d) in scan
    order, identically in both backends.
    """
    if h > 2048:
        raise ValueError("pair table limited to h <= 2048")
    if lo_t is None:
        lo_t = -2 * h
    if hi_t is None:
        hi_t = 2 * h + 1
    halo = 3 * h * h + 1
    full_counts = full_pair_count_array(h, halo)
    if _backend == "numba":
        total, bt, bd, bc = _charpoly2_scan_numba(h, full_counts, halo, lo_t, hi_t)
    else:
        total, bt, bd, bc = _charpoly2_scan_numpy(h, full_counts, halo, lo_t, hi_t)
    return int(total), int(bt), int(bd), int(bc)


def charpoly2_count(h: int, t: int, d: int) -> int:
    """Fast exact R_2(h; X^2 - tX + d) via the divisor pair table."""
    if h > 2048:
        raise ValueError("pair table limited to h <= 2048")
    halo = 3 * h * h + 1
    full_counts = full_pair_count_array(h, halo)
    a = np.arange(max(-h, t - h), min(h, t + h) + 1, dtype=np.int64)
    if a.size == 0:
        return 0
    return int(full_counts[a * (t - a) - d + halo].sum())


def det2_count(h: int, d: int) -> int:
    """#{A in M_2(Z; h) : det A = d} via pair-count convolution."""
    if h > 2048:
        raise ValueError("pair table limited to h <= 2048")
    hh = h * h
    if abs(d) > 2 * hh:
        return 0
    full = full_pair_count_array(h, hh)  # indexed by p + hh, p in [-hh, hh]
    # det = p - q with p = a11*a22, q = a12*a21: sum_p full(p) * full(p - d)
    p = np.arange(-hh, hh + 1, dtype=np.int64)
    q = p - d
    ok = (q >= -hh) & (q <= hh)
    return int((full[p[ok] + hh] * full[q[ok] + hh]).sum())


# ---------------------------------------------------------------------------
# n = 3 naive decode of matrix stats from enumeration ranks


@njit(cache=True, nogil=True)
def _n3_stats_numba(h, lo, hi, tr, mid, dt):
    b = 2 * h + 1
    for r in range(lo, hi):
        rem = r
        a22 = rem % b - h
        rem //= b
        a21 = rem % b - h
        rem //= b
        a20 = rem % b - h
        rem //= b
        a12 = rem % b - h
        rem //= b
        a11 = rem % b - h
        rem //= b
        a10 = rem % b - h
        rem //= b
        a02 = rem % b - h
        rem //= b
        a01 = rem % b - h
        rem //= b
        a00 = rem % b - h
        i = r - lo
        tr[i] = a00 + a11 + a22
        mid[i] = (
            a00 * a11 - a01 * a10 + a00 * a22 - a02 * a20 + a11 * a22 - a12 * a21
        )
        dt[i] = (
            a00 * (a11 * a22 - a12 * a21)
            - a01 * (a10 * a22 - a12 * a20)
            + a02 * (a10 * a21 - a11 * a20)
        )


def _n3_stats_numpy(h, lo, hi, tr, mid, dt):
    b = 2 * h + 1
    r = np.arange(lo, hi, dtype=np.int64)
    digits = []
    rem = r
    for _ in range(9):
        digits.append(rem % b - h)
        rem = rem // b
    a22, a21, a20, a12, a11, a10, a02, a01, a00 = digits
    tr[:] = a00 + a11 + a22
    mid[:] = a00 * a11 - a01 * a10 + a00 * a22 - a02 * a20 + a11 * a22 - a12 * a21
    dt[:] = (
        a00 * (a11 * a22 - a12 * a21)
        - a01 * (a10 * a22 - a12 * a20)
        + a02 * (a10 * a21 - a11 * a20)
    )


def n3_stats(h: int, lo: int, hi: int):
    """(trace, second-coefficient, det) arrays for enumeration ranks
    [lo, hi) of M_3(Z; h) in row-major odometer order (a11 most
    significant).  charpoly = X^3 - trace*X^2 + mid*X - det."""
    n = hi - lo
    tr = np.empty(n, dtype=np.int64)
    mid = np.empty(n, dtype=np.int64)
    dt = np.empty(n, dtype=np.int64)
    if n == 0:
        return tr, mid, dt
    if _backend == "numba":
        _n3_stats_numba(h, lo, hi, tr, mid, dt)
    else:
        _n3_stats_numpy(h, lo, hi, tr, mid, dt)
    return tr, mid, dt


# ---------------------------------------------------------------------------
# n = 3 det/trace optimized counters (bordered decomposition)


@njit(cache=True, nogil=True)
def _det_trace3_numba(h, d, t, lo, hi):
    b = 2 * h + 1
    total = 0
    for rank in range(lo, hi):
        rem = rank
        r11 = rem % b - h
        rem //= b
        r12 = rem % b - h
        rem //= b
        r21 = rem % b - h
        rem //= b
        r22 = rem % b - h
        c = t - (r11 + r22)
        if c < -h or c > h:
            continue
        det_r = r11 * r22 - r12 * r21
        g0 = d - c * det_r
        for b1 in range(-h, h + 1):
            for b2 in range(-h, h + 1):
                alpha = r21 * b2 - r22 * b1
                beta = r12 * b1 - r11 * b2
                total += _count_line(alpha, beta, g0, h)
    return total


def _det_trace3_numpy(h, d, t, lo, hi):
    b = 2 * h + 1
    rng = np.arange(-h, h + 1, dtype=np.int64)
    b1g = np.repeat(rng, b)
    b2g = np.tile(rng, b)
    a1g = np.repeat(rng, b)
    a2g = np.tile(rng, b)
    total = 0
    for rank in range(lo, hi):
        rem = rank
        r11 = rem % b - h
        rem //= b
        r12 = rem % b - h
        rem //= b
        r21 = rem % b - h
        rem //= b
        r22 = rem % b - h
        c = t - (r11 + r22)
        if c < -h or c > h:
            continue
        det_r = r11 * r22 - r12 * r21
        g0 = d - c * det_r
        alpha = r21 * b2g - r22 * b1g
        beta = r12 * b1g - r11 * b2g
        lhs = alpha[:, None] * a1g[None, :] + beta[:, None] * a2g[None, :]
        total += int(np.count_nonzero(lhs == g0))
    return total


def det_trace3(h: int, d: int, t: int, lo: int = 0, hi: int | None = None) -> int:
    """#{A in M_3(Z; h) : det A = d, tr A = t}.

    Iterates the top-left 2x2 block (outer rank range [lo, hi) over
    (2h+1)^4 for sharding), forces a33 from the trace, and counts the
    remaining off-diagonal pair by exact line counts.
    """
    if hi is None:
        hi = (2 * h + 1) ** 4
    if _backend == "numba":
        return int(_det_trace3_numba(h, d, t, lo, hi))
    return int(_det_trace3_numpy(h, d, t, lo, hi))


@njit(cache=True, nogil=True)
def _det_trace3_t2_numba(h, d, t1, t2, lo, hi):
    b = 2 * h + 1
    total = 0
    for rank in range(lo, hi):
        rem = rank
        r11 = rem % b - h
        rem //= b
        r12 = rem % b - h
        rem //= b
        r21 = rem % b - h
        rem //= b
        r22 = rem % b - h
        c = t1 - (r11 + r22)
        if c < -h or c > h:
            continue
        det_r = r11 * r22 - r12 * r21
        g0 = d - c * det_r
        tr_r2 = r11 * r11 + 2 * r12 * r21 + r22 * r22
        h2 = t2 - tr_r2 - c * c
        if h2 % 2 != 0:
            continue
        hdot = h2 // 2
        for b1 in range(-h, h + 1):
            for b2 in range(-h, h + 1):
                alpha = r21 * b2 - r22 * b1
                beta = r12 * b1 - r11 * b2
                det2 = alpha * b2 - beta * b1
                if det2 != 0:
                    n1 = g0 * b2 - beta * hdot
                    n2 = alpha * hdot - g0 * b1
                    if n1 % det2 == 0 and n2 % det2 == 0:
                        a1 = n1 // det2
                        a2 = n2 // det2
                        if abs(a1) <= h and abs(a2) <= h:
                            total += 1
                else:
                    if alpha * hdot - g0 * b1 != 0 or beta * hdot - g0 * b2 != 0:
                        continue
                    if alpha != 0 or beta != 0:
                        total += _count_line(alpha, beta, g0, h)
                    elif b1 != 0 or b2 != 0:
                        total += _count_line(b1, b2, hdot, h)
                    elif g0 == 0 and hdot == 0:
                        total += (2 * h + 1) * (2 * h + 1)
    return total


def _det_trace3_t2_numpy(h, d, t1, t2, lo, hi):
    b = 2 * h + 1
    rng = np.arange(-h, h + 1, dtype=np.int64)
    b1g = np.repeat(rng, b)
    b2g = np.tile(rng, b)
    a1g = np.repeat(rng, b)
    a2g = np.tile(rng, b)
    total = 0
    for rank in range(lo, hi):
        rem = rank
        r11 = rem % b - h
        rem //= b
        r12 = rem % b - h
        rem //= b
        r21 = rem % b - h
        rem //= b
        r22 = rem % b - h
        c = t1 - (r11 + r22)
        if c < -h or c > h:
            continue
        det_r = r11 * r22 - r12 * r21
        g0 = d - c * det_r
        h2 = t2 - (r11 * r11 + 2 * r12 * r21 + r22 * r22) - c * c
        if h2 % 2 != 0:
            continue
        hdot = h2 // 2
        alpha = r21 * b2g - r22 * b1g
        beta = r12 * b1g - r11 * b2g
        lhs1 = alpha[:, None] * a1g[None, :] + beta[:, None] * a2g[None, :]
        lhs2 = b1g[:, None] * a1g[None, :] + b2g[:, None] * a2g[None, :]
        total += int(np.count_nonzero((lhs1 == g0) & (lhs2 == hdot)))
    return total


def det_trace3_t2(h: int, d: int, t1: int, t2: int,
                  lo: int = 0, hi: int | None = None) -> int:
    """#{A in M_3(Z; h) : det A = d, tr A = t1, tr A^2 = t2}."""
    if hi is None:
        hi = (2 * h + 1) ** 4
    if _backend == "numba":
        return int(_det_trace3_t2_numba(h, d, t1, t2, lo, hi))
    return int(_det_trace3_t2_numpy(h, d, t1, t2, lo, hi))


# ---------------------------------------------------------------------------
# n = 3 singular bordered sets


@njit(cache=True, nogil=True)
def _bordered3_numba(k, lo, hi):
    b = 2 * k + 1
    u_total = 0
    v_total = 0
    for rank in range(lo, hi):
        rem = rank
        r11 = rem % b - k
        rem //= b
        r12 = rem % b - k
        rem //= b
        r21 = rem % b - k
        rem //= b
        r22 = rem % b - k
        for b1 in range(-k, k + 1):
            for b2 in range(-k, k + 1):
                alpha = r21 * b2 - r22 * b1
                beta = r12 * b1 - r11 * b2
                u_total += _count_line(alpha, beta, 0, k) - 1
                det2 = alpha * b2 - beta * b1
                if det2 == 0:
                    if alpha != 0 or beta != 0:
                        v_total += _count_line(alpha, beta, 0, k) - 1
                    elif b1 != 0 or b2 != 0:
                        v_total += _count_line(b1, b2, 0, k) - 1
                    else:
                        v_total += (2 * k + 1) * (2 * k + 1) - 1
    return u_total, v_total


def _bordered3_numpy(k, lo, hi):
    b = 2 * k + 1
    rng = np.arange(-k, k + 1, dtype=np.int64)
    b1g = np.repeat(rng, b)
    b2g = np.tile(rng, b)
    a1g = np.repeat(rng, b)
    a2g = np.tile(rng, b)
    u_total = 0
    v_total = 0
    for rank in range(lo, hi):
        rem = rank
        r11 = rem % b - k
        rem //= b
        r12 = rem % b - k
        rem //= b
        r21 = rem % b - k
        rem //= b
        r22 = rem % b - k
        alpha = r21 * b2g - r22 * b1g
        beta = r12 * b1g - r11 * b2g
        nonzero_a = (a1g != 0) | (a2g != 0)
        lhs1 = alpha[:, None] * a1g[None, :] + beta[:, None] * a2g[None, :]
        sol = (lhs1 == 0) & nonzero_a[None, :]
        u_total += int(np.count_nonzero(sol))
        lhs2 = b1g[:, None] * a1g[None, :] + b2g[:, None] * a2g[None, :]
        v_total += int(np.count_nonzero(sol & (lhs2 == 0)))
    return u_total, v_total


def bordered3(k: int, lo: int = 0, hi: int | None = None):
    """(#U_3(k), #V_3(k)): singular bordered matrices with a33 = 0 and
    nonzero last column block; V additionally has b.a = 0."""
    if hi is None:
        hi = (2 * k + 1) ** 4
    if _backend == "numba":
        u, v = _bordered3_numba(k, lo, hi)
    else:
        u, v = _bordered3_numpy(k, lo, hi)
    return int(u), int(v)


# ---------------------------------------------------------------------------
# census of K-bad vectors, t = 3


@njit(cache=True, nogil=True)
def _census3_numba(uf, usq, ksq, lo, hi):
    count = 0
    inv_sum = 0.0
    for i1 in range(lo, hi):
        u1 = i1 - uf
        for u2 in range(-uf, uf + 1):
            for u3 in range(-uf, uf + 1):
                nsq = u1 * u1 + u2 * u2 + u3 * u3
                if nsq == 0 or nsq > usq:
                    continue
                if _gcd2(_gcd2(u1, u2), u3) != 1:
                    continue
                g1 = _gcd2(u1, u2)
                if g1 == 0:
                    m2sq = 1  # u = (0, 0, +-1): dual is Z^2
                else:
                    v1a = u2 // g1
                    v1b = -u1 // g1
                    v1c = 0
                    gg, x, y = _xgcd(u1, u2)
                    v2a = -x * u3
                    v2b = -y * u3
                    v2c = g1
                    n1 = v1a * v1a + v1b * v1b
                    n2 = v2a * v2a + v2b * v2b + v2c * v2c
                    while True:
                        if n2 < n1:
                            v1a, v2a = v2a, v1a
                            v1b, v2b = v2b, v1b
                            v1c, v2c = v2c, v1c
                            n1, n2 = n2, n1
                        d12 = v1a * v2a + v1b * v2b + v1c * v2c
                        q = (2 * d12 + n1) // (2 * n1)
                        if q == 0:
                            break
                        v2a -= q * v1a
                        v2b -= q * v1b
                        v2c -= q * v1c
                        n2 = v2a * v2a + v2b * v2b + v2c * v2c
                    m2sq = n2
                if m2sq > ksq:
                    count += 1
                    inv_sum += float(nsq) ** -1.5
    return count, inv_sum


def _xgcd_vec(a, b):
    old_r = a.astype(np.int64).copy()
    r = b.astype(np.int64).copy()
    old_s = np.ones_like(old_r)
    s = np.zeros_like(old_r)
    active = r != 0
    while np.any(active):
        q = np.zeros_like(old_r)
        np.floor_divide(old_r, r, out=q, where=active)
        new_r = old_r - q * r
        old_r = np.where(active, r, old_r)
        r = np.where(active, new_r, r)
        new_s = old_s - q * s
        old_s = np.where(active, s, old_s)
        s = np.where(active, new_s, s)
        active = r != 0
    neg = old_r < 0
    g = np.where(neg, -old_r, old_r)
    x = np.where(neg, -old_s, old_s)
    # recover y from a*x + b*y = g (avoids tracking the second coefficient)
    y = np.zeros_like(g)
    nz = b != 0
    y[nz] = (g[nz] - a[nz] * x[nz]) // b[nz]
    return g, x, y


def _census3_numpy(uf, usq, ksq, lo, hi):
    rng = np.arange(-uf, uf + 1, dtype=np.int64)
    u2g = np.repeat(rng, rng.size)
    u3g = np.tile(rng, rng.size)
    count = 0
    inv_sum = 0.0
    for i1 in range(lo, hi):
        u1 = int(i1 - uf)
        nsq = u1 * u1 + u2g * u2g + u3g * u3g
        prim = np.gcd(np.gcd(abs(u1), np.abs(u2g)), np.abs(u3g)) == 1
        keep = (nsq > 0) & (nsq <= usq) & prim
        if not np.any(keep):
            continue
        u2 = u2g[keep]
        u3 = u3g[keep]
        n = nsq[keep]
        u1v = np.full_like(u2, u1)
        g1 = np.gcd(np.abs(u1v), np.abs(u2))
        deg = g1 == 0  # u = (0, 0, +-1)
        g1s = np.where(deg, 1, g1)
        v1 = np.stack([u2 // g1s, -u1v // g1s, np.zeros_like(u2)], axis=1)
        _, x, y = _xgcd_vec(u1v, u2)
        v2 = np.stack([-x * u3, -y * u3, g1s], axis=1)
        # degenerate rows get the trivial Z^2 basis
        v1[deg] = np.array([1, 0, 0], dtype=np.int64)
        v2[deg] = np.array([0, 1, 0], dtype=np.int64)
        n1 = (v1 * v1).sum(axis=1)
        n2 = (v2 * v2).sum(axis=1)
        for _ in range(128):
            swap = n2 < n1
            if np.any(swap):
                v1[swap], v2[swap] = v2[swap].copy(), v1[swap].copy()
                n1[swap], n2[swap] = n2[swap].copy(), n1[swap].copy()
            d12 = (v1 * v2).sum(axis=1)
            q = (2 * d12 + n1) // (2 * n1)
            if not np.any(q):
                break
            v2 -= q[:, None] * v1
            n2 = (v2 * v2).sum(axis=1)
        else:  # pragma: no cover - reduction always converges long before
            raise RuntimeError("rank-2 reduction failed to converge")
        bad = n2 > ksq
        count += int(np.count_nonzero(bad))
        inv_sum += float((n[bad].astype(np.float64) ** -1.5).sum())
    return count, inv_sum


def census3(uf: int, usq: int, ksq: int, lo: int = 0, hi: int | None = None):
    """Count primitive u in Z^3 with |u|^2 <= usq whose dual second minimum
    squared exceeds ksq; also the sum of |u|^-3 over them.

    uf = floor(U) bounds the coordinate box; [lo, hi) shards the u1 axis
    (full range is [0, 2*uf + 1)).
    """
    if hi is None:
        hi = 2 * uf + 1
    if _backend == "numba":
        count, inv_sum = _census3_numba(uf, usq, ksq, lo, hi)
    else:
        count, inv_sum = _census3_numpy(uf, usq, ksq, lo, hi)
    return int(count), float(inv_sum)
