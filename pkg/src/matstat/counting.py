"""Exact counts of bounded integer matrices under spectral constraints.

M_n(Z; H) is the set of n x n integer matrices with entries of absolute
value at most floor(H).  Every counter here is exact; the production paths
(divisor tables, bordered decomposition) are cross-checked against plain
enumeration in the test suite at overlapping scales.

Counters accept `parts`/`threads` for deterministic sharding: the work
range splits into `parts` fixed pieces merged in order, so results do not
depend on the thread count.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Dict, Iterator, Optional, Sequence, Tuple

import numpy as np

from . import kernels, lattices
from .errors import BudgetExceededError
from .exact import IntMatrix, MonicIntPoly, charpoly, det, trace

__all__ = [
    "CountRecord",
    "DEFAULT_BUDGET",
    "universe_size",
    "enumerate_matrices",
    "count_with_det",
    "count_charpoly",
    "count_charpoly_fast2",
    "count_det_trace",
    "count_det_trace2",
    "count_singular_bordered",
    "centralizer_count",
    "max_charpoly_count",
]

DEFAULT_BUDGET = 2_000_000_000
_CHUNK = 1 << 20


@dataclass(frozen=True)
class CountRecord:
    """One counting result, ready for CSV/JSON serialization."""

    n: int
    h: float
    kind: str
    params: str
    count: int
    elapsed_ms: float


def _floor_h(h) -> int:
    hf = math.floor(h)
    if hf < 1:
        raise ValueError("H must be >= 1")
    return hf


def universe_size(n: int, h) -> int:
    """|M_n(Z; H)| = (2*floor(H) + 1)^(n^2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (2 * _floor_h(h) + 1) ** (n * n)


def _decode(n: int, hf: int, rank: int) -> IntMatrix:
    b = 2 * hf + 1
    flat = [0] * (n * n)
    for pos in range(n * n - 1, -1, -1):
        flat[pos] = rank % b - hf
        rank //= b
    return IntMatrix.from_flat(n, flat)


def enumerate_matrices(
    n: int,
    h,
    shard: Tuple[int, int] = (1, 1),
    budget: int = DEFAULT_BUDGET,
) -> Iterator[IntMatrix]:
    """Stream M_n(Z; H) in row-major odometer order (a11 most significant).

    `shard = (index, total)` with 1 <= index <= total yields the index-th of
    `total` contiguous rank ranges; the shards partition the universe.
    """
    index, total = shard
    if not (1 <= index <= total):
        raise ValueError("shard index out of range")
    hf = _floor_h(h)
    size = universe_size(n, hf)
    lo = (index - 1) * size // total
    hi = index * size // total
    if hi - lo > budget:
        raise BudgetExceededError(hi - lo, budget, "matrix enumeration")
    for rank in range(lo, hi):
        yield _decode(n, hf, rank)


_run_parts = kernels.run_parts


def _check_budget(cost: int, budget: int, what: str):
    if cost > budget:
        raise BudgetExceededError(cost, budget, what)


# ---------------------------------------------------------------------------
# determinant counts


def count_with_det(
    n: int,
    h,
    d: int,
    method: str = "auto",
    budget: int = DEFAULT_BUDGET,
    parts: int = 1,
    threads: int = 1,
) -> int:
    """#{A in M_n(Z; H) : det A = d}, exact."""
    hf = _floor_h(h)
    if method not in ("auto", "fast", "naive"):
        raise ValueError("method must be auto|fast|naive")
    if n == 1:
        return 1 if abs(d) <= hf else 0
    if n == 2:
        if method in ("auto", "fast"):
            return kernels.det2_count(hf, d)
        pieces = _run_parts(
            lambda lo, hi: kernels.n2_count(hf, d, 0, False, lo, hi),
            2 * hf + 1, parts, threads,
        )
        return sum(pieces)
    if n == 3:
        size = universe_size(3, hf)
        _check_budget(size, budget, "3x3 determinant scan")
        return _n3_scan_count(hf, lambda tr, mid, dt: dt == d, parts, threads)
    size = universe_size(n, hf)
    _check_budget(size, budget, "naive determinant scan")
    return sum(1 for a in enumerate_matrices(n, hf, budget=budget) if det(a) == d)


def _n3_scan_count(hf: int, predicate, parts: int, threads: int) -> int:
    size = universe_size(3, hf)

    def work(lo, hi):
        cnt = 0
        for start in range(lo, hi, _CHUNK):
            stop = min(start + _CHUNK, hi)
            tr, mid, dt = kernels.n3_stats(hf, start, stop)
            cnt += int(np.count_nonzero(predicate(tr, mid, dt)))
        return cnt

    return sum(_run_parts(work, size, parts, threads))


# ---------------------------------------------------------------------------
# characteristic polynomial counts


def _validate_charpoly_target(n: int, f: MonicIntPoly):
    if f.degree != n:
        raise ValueError(f"polynomial degree {f.degree} does not match n={n}")


def count_charpoly(
    n: int,
    h,
    f: MonicIntPoly,
    budget: int = DEFAULT_BUDGET,
    parts: int = 1,
    threads: int = 1,
) -> int:
    """R_n(H; f): matrices in M_n(Z; H) with charpoly det(XI - A) = f.

    Enumeration-based (the reference route): every matrix in the universe
    is visited and its invariants compared against f.
    """
    hf = _floor_h(h)
    _validate_charpoly_target(n, f)
    if n == 1:
        a = -f.coeffs[0]
        return 1 if abs(a) <= hf else 0
    if n == 2:
        d, c1 = f.coeffs
        t = -c1
        if abs(t) > 2 * hf or abs(d) > 2 * hf * hf:
            return 0
        _check_budget(universe_size(2, hf), budget, "2x2 charpoly scan")
        pieces = _run_parts(
            lambda lo, hi: kernels.n2_count(hf, d, t, True, lo, hi),
            2 * hf + 1, parts, threads,
        )
        return sum(pieces)
    if n == 3:
        c0, c1, c2 = f.coeffs
        t, m, dv = -c2, c1, -c0
        size = universe_size(3, hf)
        _check_budget(size, budget, "3x3 charpoly scan")
        return _n3_scan_count(
            hf, lambda tr, mid, dt: (tr == t) & (mid == m) & (dt == dv),
            parts, threads,
        )
    size = universe_size(n, hf)
    _check_budget(size, budget, "naive charpoly scan")
    return sum(1 for a in enumerate_matrices(n, hf, budget=budget) if charpoly(a) == f)


def count_charpoly_fast2(h, f: MonicIntPoly) -> int:
    """R_2(H; f) by the divisor route: for each diagonal, count off-diagonal
    pairs with the forced product.  O(H) table lookups after an O(H^2)
    shared table build."""
    hf = _floor_h(h)
    _validate_charpoly_target(2, f)
    d, c1 = f.coeffs
    t = -c1
    if abs(t) > 2 * hf or abs(d) > 2 * hf * hf:
        return 0
    return kernels.charpoly2_count(hf, t, d)


def max_charpoly_count(
    n: int,
    h,
    budget: int = DEFAULT_BUDGET,
    parts: int = 1,
    threads: int = 1,
) -> Tuple[MonicIntPoly, int]:
    """(f*, R_n(H; f*)) where f* maximizes the charpoly count.

    Ties resolve to the smallest coefficient vector in (trace, middle,
    det) scan order, so the result is deterministic.  n = 2 aggregates the
    divisor-table counter; n = 3 tallies a full enumeration within budget.
    """
    hf = _floor_h(h)
    if n == 2:
        _check_budget((4 * hf + 1) * (4 * hf * hf + 1), budget, "charpoly aggregation")
        pieces = _run_parts(
            lambda lo, hi: kernels.charpoly2_scan(hf, lo - 2 * hf, hi - 2 * hf),
            4 * hf + 1, parts, threads,
        )
        total = sum(p[0] for p in pieces)
        best = max(pieces, key=lambda p: (p[3], -p[1], -p[2]))
        if total != universe_size(2, hf):
            raise AssertionError("charpoly aggregation failed the partition check")
        _, bt, bd, bc = best
        return MonicIntPoly((bd, -bt)), bc
    if n == 3:
        size = universe_size(3, hf)
        _check_budget(size, budget, "3x3 charpoly tally")
        tally: Dict[int, int] = {}
        km = 12 * hf * hf + 1
        kd = 12 * hf**3 + 1
        off_t, off_m, off_d = 3 * hf, 6 * hf * hf, 6 * hf**3

        def work(lo, hi):
            local: Dict[int, int] = {}
            for start in range(lo, hi, _CHUNK):
                stop = min(start + _CHUNK, hi)
                tr, mid, dt = kernels.n3_stats(hf, start, stop)
                keys = ((tr + off_t) * km + (mid + off_m)) * kd + (dt + off_d)
                uniq, cnt = np.unique(keys, return_counts=True)
                for k, c in zip(uniq.tolist(), cnt.tolist()):
                    local[k] = local.get(k, 0) + c
            return local

        for local in _run_parts(work, size, parts, threads):
            for k, c in local.items():
                tally[k] = tally.get(k, 0) + c
        if sum(tally.values()) != size:
            raise AssertionError("charpoly tally failed the partition check")
        best_key = min(
            tally, key=lambda k: (-tally[k], k)
        )
        rest, dv = divmod(best_key, kd)
        tv, mv = divmod(rest, km)
        f = MonicIntPoly((-(dv - off_d), mv - off_m, -(tv - off_t)))
        return f, tally[best_key]
    raise ValueError("max charpoly scan implemented for n in {2, 3}")


# ---------------------------------------------------------------------------
# determinant + trace counts


def count_det_trace(
    n: int,
    h,
    d: int,
    t: int,
    method: str = "auto",
    budget: int = DEFAULT_BUDGET,
    parts: int = 1,
    threads: int = 1,
) -> int:
    """S_n(H; d, t) = #{A in M_n(Z; H) : det A = d, tr A = t}."""
    hf = _floor_h(h)
    if method not in ("auto", "fast", "naive"):
        raise ValueError("method must be auto|fast|naive")
    if abs(t) > n * hf:
        return 0
    if n == 1:
        return 1 if (d == t and abs(d) <= hf) else 0
    if n == 2:
        # det+trace pins the charpoly, so this is the 2x2 charpoly count
        if method in ("auto", "fast"):
            return kernels.charpoly2_count(hf, t, d) if abs(d) <= 2 * hf * hf else 0
        pieces = _run_parts(
            lambda lo, hi: kernels.n2_count(hf, d, t, True, lo, hi),
            2 * hf + 1, parts, threads,
        )
        return sum(pieces)
    if n == 3:
        if method == "naive":
            size = universe_size(3, hf)
            _check_budget(size, budget, "3x3 det/trace scan")
            return _n3_scan_count(
                hf, lambda tr, mid, dt: (tr == t) & (dt == d), parts, threads
            )
        cost = (2 * hf + 1) ** 6
        _check_budget(cost, budget, "bordered det/trace count")
        pieces = _run_parts(
            lambda lo, hi: kernels.det_trace3(hf, d, t, lo, hi),
            (2 * hf + 1) ** 4, parts, threads,
        )
        return sum(pieces)
    size = universe_size(n, hf)
    _check_budget(size, budget, "naive det/trace scan")
    return sum(
        1
        for a in enumerate_matrices(n, hf, budget=budget)
        if trace(a) == t and det(a) == d
    )


def count_det_trace2(
    n: int,
    h,
    d: int,
    t1: int,
    t2: int,
    method: str = "auto",
    budget: int = DEFAULT_BUDGET,
    parts: int = 1,
    threads: int = 1,
) -> int:
    """S_n(H; d, t1, t2): additionally fixes tr A^2 = t2."""
    hf = _floor_h(h)
    if method not in ("auto", "fast", "naive"):
        raise ValueError("method must be auto|fast|naive")
    if n == 1:
        return 1 if (d == t1 and t2 == t1 * t1 and abs(d) <= hf) else 0
    if n == 2:
        # Cayley-Hamilton forces tr A^2 = t1^2 - 2d
        if t2 != t1 * t1 - 2 * d:
            return 0
        return count_det_trace(2, hf, d, t1, method, budget, parts, threads)
    if n == 3:
        if method == "naive":
            size = universe_size(3, hf)
            _check_budget(size, budget, "3x3 det/trace/trace2 scan")
            # tr A^2 = tr^2 - 2*mid for the 3x3 charpoly coefficients
            return _n3_scan_count(
                hf,
                lambda tr, mid, dt: (tr == t1) & (dt == d) & (tr * tr - 2 * mid == t2),
                parts, threads,
            )
        cost = (2 * hf + 1) ** 6
        _check_budget(cost, budget, "bordered det/trace/trace2 count")
        pieces = _run_parts(
            lambda lo, hi: kernels.det_trace3_t2(hf, d, t1, t2, lo, hi),
            (2 * hf + 1) ** 4, parts, threads,
        )
        return sum(pieces)
    size = universe_size(n, hf)
    _check_budget(size, budget, "naive det/trace/trace2 scan")
    cnt = 0
    for a in enumerate_matrices(n, hf, budget=budget):
        if trace(a) == t1 and det(a) == d:
            sq = a @ a
            if trace(sq) == t2:
                cnt += 1
    return cnt


# ---------------------------------------------------------------------------
# singular bordered sets


def count_singular_bordered(
    n: int,
    k: int,
    method: str = "auto",
    budget: int = DEFAULT_BUDGET,
    parts: int = 1,
    threads: int = 1,
) -> Tuple[int, int]:
    """(#U_n(K), #V_n(K)).

    U_n(K): matrices in M_n(Z; K) with det = 0, last diagonal entry 0, and
    nonzero last column above the diagonal.  V_n(K) additionally requires
    the bordering row-column dot product to vanish.
    """
    if n < 2:
        raise ValueError("bordered sets need n >= 2")
    if k < 1:
        raise ValueError("K must be >= 1")
    if method not in ("auto", "fast", "naive"):
        raise ValueError("method must be auto|fast|naive")
    if n == 2:
        # det = -a*b with a != 0 forces b = 0; r is free
        u = (2 * k + 1) * (2 * k)
        return u, u
    if n == 3 and method in ("auto", "fast"):
        cost = (2 * k + 1) ** 6
        _check_budget(cost, budget, "bordered singular count")
        pieces = _run_parts(
            lambda lo, hi: kernels.bordered3(k, lo, hi),
            (2 * k + 1) ** 4, parts, threads,
        )
        return sum(p[0] for p in pieces), sum(p[1] for p in pieces)
    # plain scan over the free entries (everything but a_nn)
    free = n * n - 1
    size = (2 * k + 1) ** free
    _check_budget(size, budget, "bordered naive scan")
    u_cnt = 0
    v_cnt = 0
    b = 2 * k + 1
    for rank in range(size):
        flat = [0] * free
        rem = rank
        for pos in range(free - 1, -1, -1):
            flat[pos] = rem % b - k
            rem //= b
        rows = [flat[i * n : (i + 1) * n] for i in range(n - 1)]
        last = flat[(n - 1) * n :] + [0]
        a_star = [rows[i][n - 1] for i in range(n - 1)]
        if all(x == 0 for x in a_star):
            continue
        mat = IntMatrix(rows + [last])
        if det(mat) != 0:
            continue
        u_cnt += 1
        if sum(last[i] * a_star[i] for i in range(n - 1)) == 0:
            v_cnt += 1
    return u_cnt, v_cnt


# ---------------------------------------------------------------------------
# centralizer counts


def centralizer_count(a: IntMatrix, h, node_cap: int = lattices.DEFAULT_NODE_CAP) -> int:
    """#{B in M_n(Z; H) : AB = BA}: box points of the commutant lattice."""
    n = a.n
    hf = _floor_h(h)
    rows = []
    for i in range(n):
        for j in range(n):
            coeff = [0] * (n * n)
            for p in range(n):
                for q in range(n):
                    c = 0
                    if q == j:
                        c += a.rows[i][p]
                    if p == i:
                        c -= a.rows[q][j]
                    coeff[p * n + q] = c
            rows.append(coeff)
    kernel = lattices.integer_kernel(rows, n * n)
    lat = lattices.Lattice(n * n, kernel)
    return lattices.points_in_box(lat, hf, node_cap)
