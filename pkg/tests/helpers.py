"""Independent oracles and random generators for the test suite."""

from fractions import Fraction
from itertools import product

from matstat.exact import IntMatrix, MonicIntPoly


def det_oracle(rows):
    """Cofactor-expansion determinant; exponential but obviously correct."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        if rows[0][j] == 0:
            continue
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        sign = 1 if j % 2 == 0 else -1
        total += sign * rows[0][j] * det_oracle(minor)
    return total


def _poly_add(a, b):
    out = [0] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] += c
    return out


def _poly_scale(a, s):
    return [c * s for c in a]


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def charpoly_oracle(rows):
    """det(X*I - A) by polynomial cofactor expansion; returns MonicIntPoly."""
    n = len(rows)
    entries = [
        [[-rows[i][j]] if i != j else [-rows[i][j], 1] for j in range(n)]
        for i in range(n)
    ]

    def pdet(m):
        k = len(m)
        if k == 1:
            return m[0][0]
        acc = [0]
        for j in range(k):
            minor = [r[:j] + r[j + 1 :] for r in m[1:]]
            term = _poly_mul(m[0][j], pdet(minor))
            acc = _poly_add(acc, _poly_scale(term, 1 if j % 2 == 0 else -1))
        return acc

    coeffs = pdet(entries)
    coeffs = coeffs + [0] * (n + 1 - len(coeffs))
    assert coeffs[n] == 1
    return MonicIntPoly(tuple(coeffs[:n]))


def random_matrix(rng, n, h):
    return IntMatrix([[rng.randint(-h, h) for _ in range(n)] for _ in range(n)])


def random_nonsingular(rng, n, h):
    while True:
        m = random_matrix(rng, n, h)
        if det_oracle([list(r) for r in m.rows]) != 0:
            return m


def random_unimodular(rng, n, steps=6, cap=3):
    """Product of elementary row shears; always determinant +-1."""
    if n == 1:
        return IntMatrix([[rng.choice([-1, 1])]])
    rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-cap, cap)
        for col in range(n):
            rows[i][col] += c * rows[j][col]
    if rng.random() < 0.5:
        rows[0] = [-x for x in rows[0]]
    return IntMatrix(rows)


def all_matrices(n, h):
    for flat in product(range(-h, h + 1), repeat=n * n):
        yield IntMatrix([list(flat[i * n : (i + 1) * n]) for i in range(n)])


def minima_oracle(basis, coeff_box=6):
    """Successive minima by scanning all small integer combinations."""
    rank = len(basis)
    t = len(basis[0])
    best = []
    vecs = []
    for coeffs in product(range(-coeff_box, coeff_box + 1), repeat=rank):
        if all(c == 0 for c in coeffs):
            continue
        v = tuple(
            sum(c * b[i] for c, b in zip(coeffs, basis)) for i in range(t)
        )
        vecs.append((sum(x * x for x in v), coeffs))
    vecs.sort()
    chosen = []
    import numpy as np

    for nsq, coeffs in vecs:
        trial = chosen + [coeffs]
        if np.linalg.matrix_rank(np.array(trial, dtype=float)) == len(trial):
            chosen.append(coeffs)
            best.append(nsq)
            if len(best) == rank:
                break
    return best
