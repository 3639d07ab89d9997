"""Multiplicative dependence of tuples of integer matrices.

A tuple (A_1, ..., A_s) of nonsingular integer matrices is multiplicatively
dependent if A_1^{k_1} ... A_s^{k_s} = I for some nonzero integer vector k
(ordered product, A^0 = I).  The determinant obstruction confines every
such k to an explicit relation lattice, which drives the search.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import BudgetExceededError, SingularMatrixError
from .exact import (
    IntMatrix,
    RationalMatrix,
    block_diag,
    charpoly,
    companion,
    det,
    integer_roots,
    inverse_rational,
    mat_pow,
)
from .lattices import Lattice, integer_kernel, lattice_points_in_box, linf, norm_sq
from .numtheory import cyclotomic, factorize

__all__ = [
    "Word",
    "det_relation_lattice",
    "check_relation",
    "find_dependence",
    "tuple_rank",
    "is_maximal_rank_dependent",
    "find_kernel_word",
    "construct_even",
    "construct_odd",
    "construct_torsion_block",
    "alternating_relation_vector",
    "unipotent_shear_pair",
]

DEFAULT_WORD_STATE_CAP = 2_000_000


def _validate_tuple(mats: Sequence[IntMatrix], require_nonsingular: bool = True):
    if not mats:
        raise ValueError("tuple must be non-empty")
    n = mats[0].n
    if any(m.n != n for m in mats):
        raise ValueError("matrices must share a common dimension")
    dets = [det(m) for m in mats]
    if require_nonsingular and any(dv == 0 for dv in dets):
        raise SingularMatrixError("tuple contains a singular matrix")
    return dets


def det_relation_lattice(mats: Sequence[IntMatrix]) -> Lattice:
    """The lattice of k in Z^s with prod_i det(A_i)^{k_i} = 1.

    Exponents of the prime factorizations give linear conditions; the sign
    is an extra order-2 generator, handled by passing to the even-parity
    sublattice (doubling one odd basis vector).
    """
    dets = _validate_tuple(mats)
    s = len(mats)
    facs = [factorize(dv) for dv in dets]
    primes = sorted({p for f in facs for p in f.primes})
    rows = [[f.as_dict().get(p, 0) for f in facs] for p in primes]
    basis = integer_kernel(rows, s)
    parity = [1 if dv < 0 else 0 for dv in dets]

    def par(v):
        return sum(p * x for p, x in zip(parity, v)) % 2

    odd = [v for v in basis if par(v) == 1]
    even = [v for v in basis if par(v) == 0]
    if odd:
        v0 = odd[0]
        fixed = [tuple(2 * x for x in v0)]
        fixed += [tuple(x - y for x, y in zip(v, v0)) for v in odd[1:]]
        basis = even + fixed
    return Lattice(s, basis)


def check_relation(mats: Sequence[IntMatrix], k: Sequence[int]) -> bool:
    """Exact test of A_1^{k_1} ... A_s^{k_s} = I (ordered product over Q).

    Negative exponents require the corresponding matrix to be nonsingular.
    """
    if len(k) != len(mats):
        raise ValueError("exponent vector length mismatch")
    _validate_tuple(mats, require_nonsingular=False)
    prod = RationalMatrix.identity(mats[0].n)
    for a, e in zip(mats, k):
        if e == 0:
            continue
        prod = prod @ mat_pow(a, int(e))
    return prod.is_identity()


class _PowerCache:
    """Memoized exact powers A^e (e any integer) as RationalMatrix."""

    def __init__(self, a: IntMatrix):
        self.a = a
        self.inv = None
        self.cache: Dict[int, RationalMatrix] = {0: RationalMatrix.identity(a.n)}

    def power(self, e: int) -> RationalMatrix:
        if e in self.cache:
            return self.cache[e]
        if e > 0:
            base = self.power(e - 1) @ RationalMatrix.from_int(self.a)
        else:
            if self.inv is None:
                self.inv = inverse_rational(self.a)
            base = self.power(e + 1) @ self.inv
        self.cache[e] = base
        return base


def _eigenvalue_filter(roots: List[Optional[list]], k: Sequence[int]) -> bool:
    """Cheap necessary test on rational eigenvalues; True = keep candidate.

    Only sound for s <= 2 (single powers / a two-sided power identity);
    larger tuples skip the filter because eigenvalues of non-commuting
    products obey no such relation.
    """
    s = len(k)
    if s == 1:
        r = roots[0]
        if r is None:
            return True
        return all(Fraction(x) ** k[0] == 1 for x in r)
    if s == 2:
        ra, rb = roots
        if ra is None or rb is None:
            return True
        left = sorted(Fraction(x) ** k[0] for x in ra)
        right = sorted(Fraction(x) ** (-k[1]) for x in rb)
        return left == right
    return True


def find_dependence(
    mats: Sequence[IntMatrix],
    bound: Optional[int] = None,
    node_cap: int = 20_000_000,
) -> Optional[Tuple[int, ...]]:
    """Smallest witness k != 0 with A_1^{k_1}...A_s^{k_s} = I and
    |k|_inf <= bound, or None when no such witness exists.

    Candidates are the relation-lattice points in the box, ordered by
    (|k|_inf, |k|_2^2, lexicographic); each candidate is verified by exact
    rational evaluation, so the determinant and eigenvalue pruning can only
    speed things up, never change the answer.
    """
    _validate_tuple(mats)
    s = len(mats)
    if bound is None:
        bound = max(64, 2 * max(m.max_abs_entry() for m in mats))
    if bound < 1:
        raise ValueError("bound must be >= 1")
    lat = det_relation_lattice(mats)
    if lat.rank == 0:
        return None
    candidates = [
        k for k in lattice_points_in_box(lat, bound, node_cap) if any(k)
    ]
    candidates.sort(key=lambda k: (linf(k), norm_sq(k), k))
    roots = [integer_roots(charpoly(m)) for m in mats] if s <= 2 else [None] * s
    caches = [_PowerCache(m) for m in mats]
    for k in candidates:
        if not _eigenvalue_filter(roots, k):
            continue
        prod = RationalMatrix.identity(mats[0].n)
        for cache, e in zip(caches, k):
            if e:
                prod = prod @ cache.power(int(e))
        if prod.is_identity():
            assert check_relation(mats, k)
            return tuple(int(x) for x in k)
    return None


def tuple_rank(mats: Sequence[IntMatrix], bound: int) -> int:
    """Largest r such that some r-subtuple has no relation within bound.

    Rank 0 means every single matrix is torsion within the bound; rank s
    means the whole tuple is independent at this search radius.
    """
    _validate_tuple(mats)
    s = len(mats)
    for r in range(s, 0, -1):
        for idx in combinations(range(s), r):
            sub = [mats[i] for i in idx]
            if find_dependence(sub, bound) is None:
                return r
    return 0


def is_maximal_rank_dependent(mats: Sequence[IntMatrix], bound: int) -> bool:
    """Dependent within bound, with every proper subtuple independent.

    Checking the s subtuples of size s-1 suffices: a relation on a smaller
    subtuple extends by zero exponents without leaving the box.
    """
    _validate_tuple(mats)
    s = len(mats)
    if find_dependence(mats, bound) is None:
        return False
    if s == 1:
        return True
    for idx in combinations(range(s), s - 1):
        if find_dependence([mats[i] for i in idx], bound) is not None:
            return False
    return True


@dataclass(frozen=True)
class Word:
    """A reduced word in the generators and their inverses.

    letters: tuple of (index, sign) with sign +-1; exponent_sums: per-index
    signed letter totals (the image in the free abelianization).
    """

    letters: Tuple[Tuple[int, int], ...]
    exponent_sums: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.letters)


def find_kernel_word(
    mats: Sequence[IntMatrix],
    max_len: int,
    state_cap: int = DEFAULT_WORD_STATE_CAP,
) -> Optional[Word]:
    """Shortest word A_{i_1}^{e_1}...A_{i_L}^{e_L} = I (L <= max_len) whose
    exponent sums are not all zero, or None.

    Breadth-first over reduced words with exact rational states; states are
    deduplicated on (matrix, exponent sums), which preserves completeness
    because extensions depend only on that pair.
    """
    _validate_tuple(mats)
    s = len(mats)
    if max_len < 1:
        raise ValueError("word length must be >= 1")
    if det_relation_lattice(mats).rank == 0:
        return None  # determinant obstruction kills every kernel word
    caches = [_PowerCache(m) for m in mats]
    letters = [(i, sgn) for i in range(s) for sgn in (1, -1)]
    start = RationalMatrix.identity(mats[0].n)
    frontier: List[Tuple[RationalMatrix, Tuple[int, ...], tuple]] = [
        (start, tuple([0] * s), ())
    ]
    seen = {(start.rows, tuple([0] * s))}
    states = 1
    for _ in range(max_len):
        nxt = []
        for matx, sums, word in frontier:
            for i, sgn in letters:
                if word and word[-1] == (i, -sgn):
                    continue  # not reduced
                new_mat = matx @ caches[i].power(sgn)
                new_sums = tuple(
                    x + (sgn if j == i else 0) for j, x in enumerate(sums)
                )
                new_word = word + ((i, sgn),)
                if new_mat.is_identity() and any(new_sums):
                    return Word(new_word, new_sums)
                key = (new_mat.rows, new_sums)
                if key in seen:
                    continue
                seen.add(key)
                states += 1
                if states > state_cap:
                    raise BudgetExceededError(states, state_cap, "word search")
                nxt.append((new_mat, new_sums, new_word))
        frontier = nxt
    return None


def alternating_relation_vector(s: int) -> Tuple[int, ...]:
    """(1, -1, 1, -1, ...) of length s; the relation the constructions obey."""
    return tuple(1 if i % 2 == 0 else -1 for i in range(s))


def construct_even(blocks: Sequence[IntMatrix]) -> Tuple[IntMatrix, ...]:
    """Tuple (A_1..A_s), s = len(blocks) even, with
    A_1 A_2^{-1} A_3 A_4^{-1} ... A_{s-1} A_s^{-1} = I.

    A_{2i-1} = B_{2i-1} B_{2i} and A_{2i} = B_{2i+1} B_{2i}, indices mod s;
    the product telescopes.
    """
    s = len(blocks)
    if s < 2 or s % 2 != 0:
        raise ValueError("need an even number (>= 2) of blocks")
    _validate_tuple(blocks, require_nonsingular=False)
    out = []
    for i in range(1, s // 2 + 1):
        b_odd = blocks[2 * i - 2]
        b_even = blocks[2 * i - 1]
        b_next = blocks[(2 * i) % s]
        out.append(b_odd @ b_even)
        out.append(b_next @ b_even)
    return tuple(out)


def construct_odd(blocks: Sequence[IntMatrix]) -> Tuple[IntMatrix, ...]:
    """Tuple (A_1..A_s), s = len(blocks)+1 odd, with
    A_1 A_2^{-1} ... A_{s-2} A_{s-1}^{-1} A_s = I.

    A_{2i-1} = B_{2i-2} B_{2i-1} (B_0 = I), A_{2i} = B_{2i} B_{2i-1}, and
    the last entry is B_{s-1} itself.
    """
    m = len(blocks)
    if m < 2 or m % 2 != 0:
        raise ValueError("need an even number (>= 2) of blocks")
    _validate_tuple(blocks, require_nonsingular=False)
    n = blocks[0].n
    out = []
    r = m // 2
    for i in range(1, r + 1):
        b_prev = blocks[2 * i - 3] if i > 1 else IntMatrix.identity(n)
        b_odd = blocks[2 * i - 2]
        b_even = blocks[2 * i - 1]
        out.append(b_prev @ b_odd)
        out.append(b_even @ b_odd)
    out.append(blocks[m - 1])
    return tuple(out)


def construct_torsion_block(orders: Sequence[int]) -> Tuple[IntMatrix, int]:
    """Block-diagonal matrix of cyclotomic companions with A^m = I.

    Block i is the companion of the k_i-th cyclotomic polynomial (dimension
    phi(k_i)); m is the product of the orders.  The exact multiplicative
    order of A is lcm(k_i), which divides m.
    """
    if not orders:
        raise ValueError("at least one order required")
    if any(k < 1 for k in orders):
        raise ValueError("orders must be >= 1")
    blocks = [companion(cyclotomic(int(k))) for k in orders]
    m = 1
    for k in orders:
        m *= int(k)
    return block_diag(blocks), m


def unipotent_shear_pair(h: int) -> Tuple[IntMatrix, IntMatrix]:
    """The pair ([[1, h-1],[0,1]], [[1, h],[0,1]]): multiplicatively
    dependent, but the smallest witness has |k|_inf = h."""
    if h < 2:
        raise ValueError("h must be >= 2")
    return (
        IntMatrix([[1, h - 1], [0, 1]]),
        IntMatrix([[1, h], [0, 1]]),
    )
