"""Integer lattices: duals, reduced bases, box counts, bad-vector census.

All verdicts are exact: Gram determinants are computed by integer
elimination, basis reduction runs LLL over Fractions (delta = 0.99), and
for rank <= 6 the reported lengths are refined to the true successive
minima by Fincke-Pohst enumeration.  Square roots are never compared in
floating point; every comparison happens on squared lengths.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import product as iter_product
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import BudgetExceededError
from .exact import IntMatrix, det

__all__ = [
    "Lattice",
    "GoodnessVerdict",
    "CensusResult",
    "norm_sq",
    "linf",
    "is_primitive",
    "hnf_with_transform",
    "integer_kernel",
    "orthogonal_lattice",
    "lattice_det",
    "dual_volume_check",
    "reduced_basis",
    "successive_minima",
    "is_k_good",
    "points_in_box",
    "lattice_points_in_box",
    "slab_contains",
    "slab_count_in_box",
    "kbad_census",
    "kbad_inverse_norm_sum",
    "classify_perfect_mediocre",
]

DEFAULT_NODE_CAP = 20_000_000

IntVector = Tuple[int, ...]


def norm_sq(v: Sequence[int]) -> int:
    return sum(x * x for x in v)


def linf(v: Sequence[int]) -> int:
    return max(abs(x) for x in v)


def dot(v: Sequence[int], w: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(v, w))


def is_primitive(v: Sequence[int]) -> bool:
    """True when gcd of the entries is 1 (in particular v != 0)."""
    return reduce(math.gcd, (abs(x) for x in v), 0) == 1


class Lattice:
    """A sublattice of Z^t given by an independent integer basis.

    Rank 0 (empty basis) is allowed and represents the zero lattice.
    """

    __slots__ = ("ambient_dim", "basis", "_gram_det")

    def __init__(self, ambient_dim: int, basis: Iterable[Sequence[int]]):
        basis = tuple(tuple(int(x) for x in v) for v in basis)
        if ambient_dim < 1:
            raise ValueError("ambient dimension must be >= 1")
        if any(len(v) != ambient_dim for v in basis):
            raise ValueError("basis vector has wrong length")
        if len(basis) > ambient_dim:
            raise ValueError("more basis vectors than ambient dimension")
        if basis and _rational_rank(basis) != len(basis):
            raise ValueError("basis vectors must be linearly independent")
        self.ambient_dim = ambient_dim
        self.basis = basis
        self._gram_det = None

    @property
    def rank(self) -> int:
        return len(self.basis)

    def gram_det(self) -> int:
        """det of the Gram matrix of the basis; 1 for the zero lattice."""
        if self._gram_det is None:
            if self.rank == 0:
                self._gram_det = 1
            else:
                g = [[dot(v, w) for w in self.basis] for v in self.basis]
                self._gram_det = det(IntMatrix(g))
        return self._gram_det

    def coordinates_of(self, v: Sequence[int]) -> Optional[tuple]:
        """Rational coordinates of v in this basis, or None if outside span."""
        v = tuple(int(x) for x in v)
        if len(v) != self.ambient_dim:
            raise ValueError("vector has wrong length")
        if self.rank == 0:
            return () if all(x == 0 for x in v) else None
        # solve G c = B v via Cramer-free Fraction elimination
        g = [[Fraction(dot(b, w)) for w in self.basis] for b in self.basis]
        rhs = [Fraction(dot(b, v)) for b in self.basis]
        coeffs = _solve_fraction_system(g, rhs)
        if coeffs is None:
            return None
        # confirm v really equals sum c_i b_i (v may lie off the span)
        for k in range(self.ambient_dim):
            if sum(c * b[k] for c, b in zip(coeffs, self.basis)) != v[k]:
                return None
        return tuple(coeffs)

    def contains(self, v: Sequence[int]) -> bool:
        coords = self.coordinates_of(v)
        return coords is not None and all(c.denominator == 1 for c in coords)

    def __repr__(self) -> str:
        return f"Lattice(dim={self.ambient_dim}, basis={[list(v) for v in self.basis]})"


def _solve_fraction_system(g: List[List[Fraction]], rhs: List[Fraction]):
    n = len(g)
    m = [row[:] + [rhs[i]] for i, row in enumerate(g)]
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for i in range(n):
            if i != col and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return [m[i][n] for i in range(n)]


def _rational_rank(vectors: Sequence[Sequence[int]]) -> int:
    rows = [[Fraction(x) for x in v] for v in vectors]
    rank = 0
    cols = len(rows[0]) if rows else 0
    for col in range(cols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [x * inv for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def hnf_with_transform(rows: Sequence[Sequence[int]]):
    """Row Hermite normal form H = U A with U unimodular.

    Returns (H, U) as lists of lists.  Zero rows of H sink to the bottom;
    pivots are positive and entries above a pivot are reduced mod it.
    """
    a = [list(map(int, r)) for r in rows]
    m = len(a)
    ncols = len(a[0]) if m else 0
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for col in range(ncols):
        if r == m:
            break
        # clear the column below row r with gcd row operations
        piv = None
        for i in range(r, m):
            if a[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        u[r], u[piv] = u[piv], u[r]
        for i in range(r + 1, m):
            while a[i][col] != 0:
                q = a[r][col] // a[i][col]
                a[r] = [x - q * y for x, y in zip(a[r], a[i])]
                u[r] = [x - q * y for x, y in zip(u[r], u[i])]
                a[r], a[i] = a[i], a[r]
                u[r], u[i] = u[i], u[r]
        if a[r][col] < 0:
            a[r] = [-x for x in a[r]]
            u[r] = [-x for x in u[r]]
        for i in range(r):
            q = a[i][col] // a[r][col]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
    return a, u


def integer_kernel(rows: Sequence[Sequence[int]], ambient_dim: int) -> List[IntVector]:
    """Basis of {x in Z^ambient : M x = 0} for M given by `rows`.

    Computed from the HNF transform of M^T; the result is saturated (it is
    the full solution lattice, not a finite-index sublattice).
    """
    if not rows:
        return [tuple(int(i == j) for j in range(ambient_dim)) for i in range(ambient_dim)]
    mt = [[rows[i][j] for i in range(len(rows))] for j in range(ambient_dim)]
    h, u = hnf_with_transform(mt)
    out = []
    for i in range(ambient_dim):
        if all(x == 0 for x in h[i]):
            out.append(tuple(u[i]))
    return out


def orthogonal_lattice(vectors: Sequence[Sequence[int]]) -> Lattice:
    """The lattice of integer vectors orthogonal to all the given vectors."""
    vectors = [tuple(int(x) for x in v) for v in vectors]
    if not vectors:
        raise ValueError("at least one vector required")
    t = len(vectors[0])
    if any(len(v) != t for v in vectors):
        raise ValueError("vectors must share a common length")
    if all(all(x == 0 for x in v) for v in vectors):
        raise ValueError("at least one vector must be nonzero")
    return Lattice(t, integer_kernel(vectors, t))


def lattice_det(lat: Lattice) -> Tuple[int, Optional[int]]:
    """(Gram determinant, exact integer sqrt when it exists, else None)."""
    g = lat.gram_det()
    r = math.isqrt(g)
    return g, (r if r * r == g else None)


def dual_volume_check(v: Sequence[int]) -> bool:
    """Exact check that det(v^perp)^2 equals |v|^2 for primitive v."""
    v = tuple(int(x) for x in v)
    if not is_primitive(v):
        raise ValueError("vector must be primitive")
    return orthogonal_lattice([v]).gram_det() == norm_sq(v)


# ---------------------------------------------------------------------------
# reduction and enumeration


def _gram_schmidt(basis: Sequence[Sequence[int]]):
    s = len(basis)
    t = len(basis[0])
    bstar: List[List[Fraction]] = []
    mu = [[Fraction(0)] * s for _ in range(s)]
    bsq: List[Fraction] = []
    for i in range(s):
        v = [Fraction(x) for x in basis[i]]
        for j in range(i):
            mu_ij = sum(Fraction(basis[i][k]) * bstar[j][k] for k in range(t)) / bsq[j]
            mu[i][j] = mu_ij
            v = [x - mu_ij * y for x, y in zip(v, bstar[j])]
        bstar.append(v)
        bsq.append(sum(x * x for x in v))
    return mu, bsq, bstar


def _lll(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(99, 100)):
    """Exact LLL over Fractions; returns a reduced basis (list of tuples)."""
    b = [list(map(int, v)) for v in basis]
    s = len(b)
    if s <= 1:
        return [tuple(v) for v in b]
    mu, bsq, _ = _gram_schmidt(b)
    k = 1
    while k < s:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                mu, bsq, _ = _gram_schmidt(b)
        if bsq[k] >= (delta - mu[k][k - 1] ** 2) * bsq[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            mu, bsq, _ = _gram_schmidt(b)
            k = max(k - 1, 1)
    return [tuple(v) for v in b]


def _floor_sqrt_frac(fr: Fraction) -> int:
    """floor(sqrt(p/q)) for a non-negative Fraction, exactly."""
    if fr < 0:
        raise ValueError("negative radicand")
    return math.isqrt(fr.numerator * fr.denominator) // fr.denominator


class _NodeBudget:
    __slots__ = ("left", "cap")

    def __init__(self, cap: int):
        self.cap = cap
        self.left = cap

    def spend(self, k: int = 1):
        self.left -= k
        if self.left < 0:
            raise BudgetExceededError(self.cap - self.left, self.cap, "lattice enumeration")


def _enumerate_ball(basis, bound_sq: Fraction, budget: _NodeBudget):
    """All nonzero lattice vectors v with |v|^2 <= bound_sq, exactly.

    Fincke-Pohst on the exact rational Gram-Schmidt data; yields
    (coeffs, vector, normsq) for every solution including sign pairs.
    """
    s = len(basis)
    t = len(basis[0])
    mu, bsq, _ = _gram_schmidt(basis)
    coeffs = [0] * s

    def rec(i: int, remaining: Fraction, centers_cache):
        if i < 0:
            if any(coeffs):
                vec = tuple(
                    sum(coeffs[j] * basis[j][k] for j in range(s)) for k in range(t)
                )
                yield tuple(coeffs), vec, norm_sq(vec)
            return
        center = -sum(coeffs[j] * mu[j][i] for j in range(i + 1, s))
        if bsq[i] == 0:
            raise ValueError("degenerate basis in enumeration")
        radius_sq = remaining / bsq[i]
        r_floor = _floor_sqrt_frac(radius_sq)
        lo = math.ceil(center) - r_floor - 1
        hi = math.floor(center) + r_floor + 1
        for x in range(lo, hi + 1):
            budget.spend()
            used = (x - center) ** 2 * bsq[i]
            if used > remaining:
                continue
            coeffs[i] = x
            yield from rec(i - 1, remaining - used, None)
        coeffs[i] = 0

    yield from rec(s - 1, Fraction(bound_sq), None)


def successive_minima(lat: Lattice, node_cap: int = DEFAULT_NODE_CAP):
    """Exact successive minima (squared) of the lattice, with witnesses.

    Returns (minima_sq, vectors), both of length rank.  Uses LLL to get a
    search radius, then full enumeration; intended for rank <= 6.
    """
    if lat.rank == 0:
        return (), ()
    red = _lll(lat.basis)
    bound = max(norm_sq(v) for v in red)
    budget = _NodeBudget(node_cap)
    candidates = sorted(
        _enumerate_ball(red, Fraction(bound), budget),
        key=lambda item: (item[2], item[1]),
    )
    chosen: List[IntVector] = []
    minima: List[int] = []
    echelon: List[List[Fraction]] = []
    for _, vec, nsq in candidates:
        if _extends_rank(echelon, vec):
            chosen.append(vec)
            minima.append(nsq)
            if len(chosen) == lat.rank:
                break
    return tuple(minima), tuple(chosen)


def _extends_rank(echelon: List[List[Fraction]], vec: Sequence[int]) -> bool:
    row = [Fraction(x) for x in vec]
    for er in echelon:
        piv = next(i for i, x in enumerate(er) if x != 0)
        if row[piv] != 0:
            f = row[piv] / er[piv]
            row = [x - f * y for x, y in zip(row, er)]
    if all(x == 0 for x in row):
        return False
    echelon.append(row)
    return True


def reduced_basis(lat: Lattice, node_cap: int = DEFAULT_NODE_CAP) -> Tuple[IntVector, ...]:
    """A shortest-possible basis, sorted by length.

    LLL (delta = 0.99) first; for rank <= 6 the result is upgraded to
    vectors attaining the successive minima whenever those still generate
    the lattice (they always do for rank <= 4).
    """
    if lat.rank == 0:
        return ()
    red = sorted(_lll(lat.basis), key=lambda v: (norm_sq(v), v))
    if lat.rank > 6:
        return tuple(red)
    minima, vectors = successive_minima(lat, node_cap)
    if not vectors or len(vectors) < lat.rank:
        return tuple(red)
    g = [[dot(v, w) for w in vectors] for v in vectors]
    if det(IntMatrix(g)) == lat.gram_det():
        return tuple(vectors)
    return tuple(red)


@dataclass(frozen=True)
class GoodnessVerdict:
    """Outcome of the K-goodness test with its exact certificate."""

    vector: IntVector
    bound: float
    good: bool
    minima_sq: tuple
    basis: tuple

    @property
    def verdict(self) -> str:
        return "good" if self.good else "bad"


def _bound_sq_floor(k) -> int:
    """floor(K^2) computed exactly from an int/float/Fraction bound."""
    return math.floor(Fraction(k) ** 2)


def is_k_good(u: Sequence[int], k_bound, node_cap: int = DEFAULT_NODE_CAP) -> GoodnessVerdict:
    """Is every reduced-basis vector of u^perp of length <= K?

    Judged on the exact successive minima of the dual, so the verdict does
    not depend on a basis choice.  Requires primitive u and K >= 1.
    """
    u = tuple(int(x) for x in u)
    if not is_primitive(u):
        raise ValueError("vector must be primitive")
    if len(u) < 2:
        raise ValueError("ambient dimension must be >= 2")
    if Fraction(k_bound) < 1:
        raise ValueError("K must be >= 1")
    dual = orthogonal_lattice([u])
    minima, _ = successive_minima(dual, node_cap)
    basis = reduced_basis(dual, node_cap)
    ksq = _bound_sq_floor(k_bound)
    good = all(m <= ksq for m in minima)
    return GoodnessVerdict(u, float(k_bound), good, minima, basis)


# ---------------------------------------------------------------------------
# box counting


def _support_components(basis: Sequence[IntVector]):
    """Group basis vectors by connected coordinate support."""
    supports = [frozenset(i for i, x in enumerate(v) if x != 0) for v in basis]
    groups: List[Tuple[set, List[int]]] = []
    for idx, sup in enumerate(supports):
        merged = set(sup)
        members = [idx]
        rest = []
        for coords, vecs in groups:
            if coords & merged:
                merged |= coords
                members += vecs
            else:
                rest.append((coords, vecs))
        rest.append((merged, members))
        groups = rest
    out = []
    for coords, vecs in groups:
        cl = sorted(coords)
        out.append((cl, [tuple(basis[i][c] for c in cl) for i in sorted(vecs)]))
    return out


def points_in_box(lat: Lattice, box_bound, node_cap: int = DEFAULT_NODE_CAP) -> int:
    """Exact number of lattice points v with |v|_inf <= box_bound.

    The count includes the origin.  Basis vectors with disjoint coordinate
    support are counted independently and the per-component counts
    multiplied; components of rank >= 2 are enumerated exactly inside the
    covering L2 ball.
    """
    if Fraction(box_bound) < 0:
        raise ValueError("box bound must be >= 0")
    if lat.rank == 0:
        return 1
    hf = math.floor(Fraction(box_bound))
    total = 1
    budget = _NodeBudget(node_cap)
    for coords, vecs in _support_components(_lll(lat.basis)):
        if len(vecs) == 1:
            reach = linf(vecs[0])
            total *= 2 * (hf // reach) + 1
            continue
        bound_sq = Fraction(len(coords)) * hf * hf
        cnt = 1  # origin
        for _, vec, _ in _enumerate_ball(vecs, bound_sq, budget):
            if linf(vec) <= hf:
                cnt += 1
        total *= cnt
    return total


def lattice_points_in_box(
    lat: Lattice, box_bound, node_cap: int = DEFAULT_NODE_CAP
) -> List[IntVector]:
    """All lattice points with |v|_inf <= box_bound, origin included."""
    if lat.rank == 0:
        return [tuple([0] * lat.ambient_dim)]
    hf = math.floor(Fraction(box_bound))
    red = _lll(lat.basis)
    budget = _NodeBudget(node_cap)
    bound_sq = Fraction(lat.ambient_dim) * hf * hf
    out = [tuple([0] * lat.ambient_dim)]
    for _, vec, _ in _enumerate_ball(red, bound_sq, budget):
        if linf(vec) <= hf:
            out.append(vec)
    return out


def slab_contains(v: Sequence[int], w: Sequence[int]) -> bool:
    """Membership in the slab of width |v| around the hyperplane normal
    to v: |<w, v>| <= |v|^2, checked on integers only."""
    v = tuple(int(x) for x in v)
    w = tuple(int(x) for x in w)
    if len(v) != len(w):
        raise ValueError("dimension mismatch")
    if all(x == 0 for x in v):
        raise ValueError("v must be nonzero")
    return abs(dot(v, w)) <= norm_sq(v)


def slab_count_in_box(v: Sequence[int], box_bound, node_cap: int = DEFAULT_NODE_CAP) -> int:
    """#{w integer, |w|_inf <= T, w in slab(v)} by exact scan."""
    v = tuple(int(x) for x in v)
    if all(x == 0 for x in v):
        raise ValueError("v must be nonzero")
    tf = math.floor(Fraction(box_bound))
    t = len(v)
    size = (2 * tf + 1) ** t
    if size > node_cap:
        raise BudgetExceededError(size, node_cap, "slab box scan")
    nsq = norm_sq(v)
    cnt = 0
    for w in iter_product(range(-tf, tf + 1), repeat=t):
        if abs(dot(v, w)) <= nsq:
            cnt += 1
    return cnt


# ---------------------------------------------------------------------------
# census of K-bad vectors


@dataclass(frozen=True)
class CensusResult:
    """Census of primitive u with |u| <= U whose dual is not K-good."""

    t: int
    u_bound: float
    k_bound: float
    count: int
    inv_norm_sum: float
    sum_error_bound: float
    bad_vectors: Optional[tuple]
    method: str
    elapsed_ms: float


def kbad_census(
    t: int,
    u_bound,
    k_bound,
    collect: bool = False,
    method: str = "auto",
    node_cap: int = DEFAULT_NODE_CAP,
    parts: int = 1,
    threads: int = 1,
) -> CensusResult:
    """Count primitive vectors u in Z^t, |u| <= U, that are K-bad.

    For t = 3 a specialized integer kernel (rank-2 dual reduction) is used;
    other t run the generic exact path.  Both count each signed vector, so
    u and -u contribute separately.  parts/threads shard the kernel path;
    the float norm sum is merged in fixed part order.
    """
    if t < 3:
        raise ValueError("t must be >= 3")
    if Fraction(k_bound) < 1:
        raise ValueError("K must be >= 1")
    if Fraction(u_bound) < 1:
        raise ValueError("U must be >= 1")
    start = time.perf_counter()
    if method not in ("auto", "kernel", "generic"):
        raise ValueError("method must be auto|kernel|generic")
    use_kernel = t == 3 and method in ("auto", "kernel") and not collect
    uf = math.floor(Fraction(u_bound))
    usq = math.floor(Fraction(u_bound) ** 2)
    ksq = _bound_sq_floor(k_bound)
    if use_kernel:
        if uf > 10_000:
            raise BudgetExceededError((2 * uf + 1) ** 3, node_cap, "census kernel")
        from . import kernels

        pieces = kernels.run_parts(
            lambda lo, hi: kernels.census3(uf, usq, ksq, lo, hi),
            2 * uf + 1,
            parts,
            threads,
        )
        count = sum(p[0] for p in pieces)
        inv_sum = math.fsum(p[1] for p in pieces)
        bad = None
        method_used = f"kernel-{kernels.current_backend()}"
    else:
        size = (2 * uf + 1) ** t
        if size > node_cap:
            raise BudgetExceededError(size, node_cap, "census scan")
        count = 0
        terms = []
        bad_list = []
        for u in iter_product(range(-uf, uf + 1), repeat=t):
            if not is_primitive(u):
                continue
            nsq = norm_sq(u)
            if nsq > usq:
                continue
            minima, _ = successive_minima(orthogonal_lattice([u]), node_cap)
            if any(m > ksq for m in minima):
                count += 1
                terms.append(nsq ** (-t / 2.0))
                if collect:
                    bad_list.append(u)
        inv_sum = math.fsum(terms)
        bad = tuple(bad_list) if collect else None
        method_used = "generic"
    err = abs(inv_sum) * 2.3e-16 * max(count, 1)
    elapsed = (time.perf_counter() - start) * 1000.0
    return CensusResult(
        t, float(u_bound), float(k_bound), count, inv_sum, err, bad, method_used, elapsed
    )


def kbad_inverse_norm_sum(t: int, u_bound, k_bound, **kw) -> float:
    """Sum of |u|^-t over the K-bad census (float64 with recorded error
    bound on the CensusResult; the counts themselves are exact)."""
    return kbad_census(t, u_bound, k_bound, **kw).inv_norm_sum


# ---------------------------------------------------------------------------
# perfect / mediocre classification


def classify_perfect_mediocre(lam: Sequence[int], h_bound, k_bound) -> str:
    """Classify a primitive vector by the goodness of itself and of the
    reduced leading block lambda* (last coordinate dropped, gcd removed).

    Verdicts: 'perfect', 'mediocre', 'not-H-good', or 'degenerate' when
    lambda* = 0 (the classification needs a nonzero leading block).
    """
    lam = tuple(int(x) for x in lam)
    if len(lam) < 3:
        raise ValueError("need dimension >= 3")
    if not is_primitive(lam):
        raise ValueError("vector must be primitive")
    if lam == tuple([0] * (len(lam) - 1)) + (1,):
        raise ValueError("the reserved unit vector is excluded")
    star = lam[:-1]
    if all(x == 0 for x in star):
        return "degenerate"
    if not is_k_good(lam, h_bound).good:
        return "not-H-good"
    ell = reduce(math.gcd, (abs(x) for x in star))
    mu = tuple(x // ell for x in star)
    return "perfect" if is_k_good(mu, k_bound).good else "mediocre"
