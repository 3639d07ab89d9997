"""Exact linear algebra over the integers and rationals.

Everything here is arbitrary-precision and division-free where it can be:
determinants use Bareiss elimination, characteristic polynomials use the
Berkowitz algorithm, and inverses are computed over ``fractions.Fraction``.
No floating point enters this module.

Characteristic polynomials follow the convention f(X) = det(X*I - A), so f
is monic of degree n and the constant term is (-1)^n det(A).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import NegativePowerOfSingularError, SingularMatrixError

__all__ = [
    "IntMatrix",
    "RationalMatrix",
    "MonicIntPoly",
    "mat_mul",
    "mat_pow",
    "det",
    "trace",
    "trace_power",
    "charpoly",
    "newton_check",
    "companion",
    "block_diag",
    "inverse_rational",
    "integer_roots",
]


class IntMatrix:
    """Immutable square matrix with arbitrary-precision integer entries."""

    __slots__ = ("n", "rows")

    def __init__(self, rows: Iterable[Iterable[int]]):
        rows = tuple(tuple(self._as_int(x) for x in row) for row in rows)
        n = len(rows)
        if n == 0:
            raise ValueError("matrix must be non-empty")
        if any(len(row) != n for row in rows):
            raise ValueError("matrix must be square")
        self.n = n
        self.rows = rows

    @staticmethod
    def _as_int(x) -> int:
        if isinstance(x, bool) or not isinstance(x, int):
            raise TypeError(f"integer entry required, got {x!r}")
        return x

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_flat(cls, n: int, flat: Sequence[int]) -> "IntMatrix":
        if len(flat) != n * n:
            raise ValueError("flat entry list has wrong length")
        return cls([flat[i * n : (i + 1) * n] for i in range(n)])

    def entry(self, i: int, j: int) -> int:
        return self.rows[i][j]

    def max_abs_entry(self) -> int:
        return max(abs(x) for row in self.rows for x in row)

    def in_box(self, bound) -> bool:
        """True when every entry has absolute value at most `bound`."""
        return all(abs(x) <= bound for row in self.rows for x in row)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(list(zip(*self.rows)))

    def is_identity(self) -> bool:
        return all(
            x == (1 if i == j else 0)
            for i, row in enumerate(self.rows)
            for j, x in enumerate(row)
        )

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        return mat_mul(self, other)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-x for x in row] for row in self.rows])

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self.rows]})"


class RationalMatrix:
    """Immutable square matrix with Fraction entries (exact rationals)."""

    __slots__ = ("n", "rows")

    def __init__(self, rows: Iterable[Iterable[Fraction]]):
        rows = tuple(tuple(Fraction(x) for x in row) for row in rows)
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise ValueError("matrix must be square and non-empty")
        self.n = n
        self.rows = rows

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_int(cls, a: IntMatrix) -> "RationalMatrix":
        return cls(a.rows)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        br = other.rows
        return RationalMatrix(
            [
                [sum(self.rows[i][k] * br[k][j] for k in range(self.n)) for j in range(self.n)]
                for i in range(self.n)
            ]
        )

    def is_identity(self) -> bool:
        return all(
            x == (1 if i == j else 0)
            for i, row in enumerate(self.rows)
            for j, x in enumerate(row)
        )

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.rows for x in row)

    def to_int_matrix(self) -> IntMatrix:
        if not self.is_integral():
            raise ValueError("matrix has non-integer entries")
        return IntMatrix([[int(x) for x in row] for row in self.rows])

    def __eq__(self, other) -> bool:
        if isinstance(other, IntMatrix):
            other = RationalMatrix.from_int(other)
        return isinstance(other, RationalMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"RationalMatrix({[list(r) for r in self.rows]})"


class MonicIntPoly:
    """Monic polynomial with integer coefficients.

    `coeffs` stores (c_0, ..., c_{d-1}) from the constant term up; the
    leading coefficient 1 is implicit.  Degree 0 is the constant poly 1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int]):
        self.coeffs = tuple(int(c) for c in coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def all_coeffs(self) -> tuple:
        """Coefficients (c_0, ..., c_{d-1}, 1) including the leading 1."""
        return self.coeffs + (1,)

    def __call__(self, x):
        acc = 1
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other) -> bool:
        return isinstance(other, MonicIntPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if self.degree == 0:
            return "MonicIntPoly<1>"
        terms = []
        for e in range(self.degree, -1, -1):
            c = 1 if e == self.degree else self.coeffs[e]
            if c == 0:
                continue
            if e == 0:
                terms.append(f"{c:+d}")
            else:
                xe = "X" if e == 1 else f"X^{e}"
                if c == 1:
                    terms.append(f"+{xe}")
                elif c == -1:
                    terms.append(f"-{xe}")
                else:
                    terms.append(f"{c:+d}{xe}")
        s = "".join(terms).lstrip("+")
        return f"MonicIntPoly<{s}>"


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    """Exact product of two integer matrices of equal dimension."""
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    n = a.n
    ar, br = a.rows, b.rows
    bcols = list(zip(*br))
    return IntMatrix(
        [[sum(ar[i][k] * bcols[j][k] for k in range(n)) for j in range(n)] for i in range(n)]
    )


def det(a: IntMatrix) -> int:
    """Determinant by fraction-free Bareiss elimination (exact integer)."""
    n = a.n
    if n == 1:
        return a.rows[0][0]
    m = [list(row) for row in a.rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            row_i = m[i]
            row_k = m[k]
            lead = row_i[k]
            for j in range(k + 1, n):
                # Bareiss update: every division here is exact
                row_i[j] = (row_i[j] * pivot - lead * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def trace(a: IntMatrix) -> int:
    return sum(a.rows[i][i] for i in range(a.n))


def _int_pow_nonneg(a: IntMatrix, k: int) -> IntMatrix:
    result = IntMatrix.identity(a.n)
    base = a
    while k:
        if k & 1:
            result = mat_mul(result, base)
        k >>= 1
        if k:
            base = mat_mul(base, base)
    return result


def trace_power(a: IntMatrix, j: int) -> int:
    """Tr(A^j) for j >= 0, computed exactly."""
    if j < 0:
        raise ValueError("power must be non-negative")
    return trace(_int_pow_nonneg(a, j))


def mat_pow(a: IntMatrix, k: int) -> RationalMatrix:
    """A^k as an exact rational matrix; A^0 = I by convention.

    Negative powers require det(A) != 0 and raise
    NegativePowerOfSingularError otherwise.
    """
    if k >= 0:
        return RationalMatrix.from_int(_int_pow_nonneg(a, k))
    if det(a) == 0:
        raise NegativePowerOfSingularError(
            f"negative power {k} of a singular matrix"
        )
    inv = inverse_rational(a)
    result = RationalMatrix.identity(a.n)
    base = inv
    k = -k
    while k:
        if k & 1:
            result = result @ base
        k >>= 1
        if k:
            base = base @ base
    return result


def inverse_rational(a: IntMatrix) -> RationalMatrix:
    """Exact inverse over Q by Gauss-Jordan elimination on Fractions."""
    n = a.n
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a.rows)]
    for col in range(n):
        piv = None
        for i in range(col, n):
            if m[i][col] != 0:
                piv = i
                break
        if piv is None:
            raise SingularMatrixError("matrix is singular over Q")
        m[col], m[piv] = m[piv], m[col]
        inv_p = 1 / m[col][col]
        m[col] = [x * inv_p for x in m[col]]
        for i in range(n):
            if i != col and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return RationalMatrix([row[n:] for row in m])


def charpoly(a: IntMatrix) -> MonicIntPoly:
    """Characteristic polynomial det(X*I - A) via the Berkowitz algorithm.

    Division-free: all intermediate values are integers.
    """
    n = a.n
    rows = a.rows
    # p holds the coefficients of det(X*I - A_r) for the leading principal
    # r x r block, leading coefficient first.
    p = [1, -rows[0][0]]
    for r in range(2, n + 1):
        arr = rows[r - 1][r - 1]
        col = [rows[i][r - 1] for i in range(r - 1)]
        rowv = [rows[r - 1][j] for j in range(r - 1)]
        # First column of the Berkowitz Toeplitz matrix:
        # 1, -a_rr, -rowv.col, -rowv.M.col, -rowv.M^2.col, ...
        t = [1, -arr]
        v = col
        while len(t) <= r:
            t.append(-sum(rowv[i] * v[i] for i in range(r - 1)))
            if len(t) <= r:
                v = [
                    sum(rows[i][j] * v[j] for j in range(r - 1))
                    for i in range(r - 1)
                ]
        new = []
        for i in range(r + 1):
            acc = 0
            for j in range(min(i, r - 1) + 1):
                acc += t[i - j] * p[j]
            new.append(acc)
        p = new
    return MonicIntPoly(tuple(reversed(p))[:-1])


def newton_check(f: MonicIntPoly, a: IntMatrix) -> bool:
    """Verify charpoly(A) = f through Newton's identities on power traces.

    Compares Tr(A^j) for j = 1..n against the power sums forced by the
    coefficients of f.  Independent of the Berkowitz route.
    """
    n = a.n
    if f.degree != n:
        return False
    # Elementary symmetric functions from f: c_{n-j} = (-1)^j e_j.
    full = f.all_coeffs()
    e = [1] + [0] * n
    for j in range(1, n + 1):
        e[j] = (-1) ** j * full[n - j]
    p = [0] * (n + 1)
    for k in range(1, n + 1):
        acc = 0
        for i in range(1, k):
            acc += (-1) ** (i - 1) * e[i] * p[k - i]
        p[k] = acc + (-1) ** (k - 1) * k * e[k]
    return all(trace_power(a, k) == p[k] for k in range(1, n + 1))


def companion(f: MonicIntPoly) -> IntMatrix:
    """Companion matrix of a monic polynomial; charpoly(companion(f)) = f."""
    d = f.degree
    if d < 1:
        raise ValueError("degree must be at least 1")
    rows = [[0] * d for _ in range(d)]
    for i in range(1, d):
        rows[i][i - 1] = 1
    for i in range(d):
        rows[i][d - 1] = -f.coeffs[i]
    return IntMatrix(rows)


def block_diag(blocks: Sequence[IntMatrix]) -> IntMatrix:
    """Block-diagonal assembly of square integer matrices."""
    if not blocks:
        raise ValueError("at least one block required")
    n = sum(b.n for b in blocks)
    rows = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i in range(b.n):
            for j in range(b.n):
                rows[off + i][off + j] = b.rows[i][j]
        off += b.n
    return IntMatrix(rows)


def integer_roots(f: MonicIntPoly) -> Optional[list]:
    """All roots (with multiplicity) when f splits over Z, else None.

    A monic integer polynomial has only integer rational roots, so this
    decides whether every eigenvalue is rational.
    """
    coeffs = list(f.all_coeffs())
    roots = []
    while len(coeffs) > 1:
        c0 = coeffs[0]
        if c0 == 0:
            roots.append(0)
            coeffs = coeffs[1:]
            continue
        found = None
        for cand in _divisor_candidates(abs(c0)):
            for r in (cand, -cand):
                acc = 0
                for c in reversed(coeffs):
                    acc = acc * r + c
                if acc == 0:
                    found = r
                    break
            if found is not None:
                break
        if found is None:
            return None
        # synthetic division by (X - found)
        new = []
        carry = coeffs[-1]
        for c in reversed(coeffs[:-1]):
            new.append(carry)
            carry = c + found * carry
        # carry is the remainder, must be 0 here
        coeffs = list(reversed(new))
        roots.append(found)
    return sorted(roots)


def _divisor_candidates(m: int):
    """Positive divisors of m > 0 in increasing order (trial division)."""
    small = []
    large = []
    i = 1
    while i * i <= m:
        if m % i == 0:
            small.append(i)
            if i != m // i:
                large.append(m // i)
        i += 1
    return small + large[::-1]
