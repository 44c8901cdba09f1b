"""Exact rational linear algebra on tuples of fractions.Fraction.

Vectors are tuples of Fraction, matrices are tuples of row tuples. All
routines here are exact; conversion to floats happens at geometry
boundaries, never inside invariant checks.
"""

from __future__ import annotations

import math
from fractions import Fraction

Vec = tuple[Fraction, ...]
Mat = tuple[Vec, ...]


def as_vec(xs) -> Vec:
    return tuple(Fraction(x) for x in xs)


def as_mat(rows) -> Mat:
    m = tuple(as_vec(r) for r in rows)
    if m and any(len(r) != len(m[0]) for r in m):
        raise ValueError("ragged matrix")
    return m


def vec_add(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vec_sub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vec_scale(u: Vec, s: Fraction) -> Vec:
    return tuple(a * s for a in u)


def vec_dot(u: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(u, v, strict=True)), Fraction(0))


def norm_sq(u: Vec) -> Fraction:
    return vec_dot(u, u)


def identity(d: int) -> Mat:
    one, zero = Fraction(1), Fraction(0)
    return tuple(
        tuple(one if i == j else zero for j in range(d)) for i in range(d)
    )


def transpose(m: Mat) -> Mat:
    return tuple(zip(*m))


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = transpose(b)
    return tuple(tuple(vec_dot(row, col) for col in bt) for row in a)


def mat_vec(a: Mat, v: Vec) -> Vec:
    return tuple(vec_dot(row, v) for row in a)


def det(m: Mat) -> Fraction:
    """Determinant by exact Gaussian elimination with partial pivoting."""
    d = len(m)
    rows = [list(r) for r in m]
    result = Fraction(1)
    for j in range(d):
        pivot = next((i for i in range(j, d) if rows[i][j] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != j:
            rows[j], rows[pivot] = rows[pivot], rows[j]
            result = -result
        result *= rows[j][j]
        inv = 1 / rows[j][j]
        for i in range(j + 1, d):
            if rows[i][j] != 0:
                f = rows[i][j] * inv
                for k in range(j, d):
                    rows[i][k] -= f * rows[j][k]
    return result


def inverse(m: Mat) -> Mat:
    """Exact inverse via Gauss-Jordan. Raises ValueError on singular input."""
    d = len(m)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(d)] for i, r in enumerate(m)]
    for j in range(d):
        pivot = next((i for i in range(j, d) if aug[i][j] != 0), None)
        if pivot is None:
            raise ValueError("singular matrix")
        aug[j], aug[pivot] = aug[pivot], aug[j]
        inv = 1 / aug[j][j]
        aug[j] = [x * inv for x in aug[j]]
        for i in range(d):
            if i != j and aug[i][j] != 0:
                f = aug[i][j]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[j])]
    return tuple(tuple(row[d:]) for row in aug)


def is_integer_mat(m: Mat) -> bool:
    return all(x.denominator == 1 for row in m for x in row)


def common_denominator(m: Mat) -> int:
    den = 1
    for row in m:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    return den


def hermite_normal_form(rows: list[list[int]]) -> tuple[tuple[int, ...], ...]:
    """Row-style HNF of an integer matrix with full column rank.

    Returns the canonical n x n upper-triangular form with positive
    diagonal and entries above each pivot reduced into [0, pivot).
    Zero rows produced by the elimination are dropped.
    """
    h = [list(r) for r in rows]
    m = len(h)
    if m == 0:
        return ()
    n = len(h[0])
    row = 0
    for col in range(n):
        while True:
            nz = [i for i in range(row, m) if h[i][col] != 0]
            if not nz:
                raise ValueError("matrix does not have full column rank")
            piv = min(nz, key=lambda i: abs(h[i][col]))
            h[row], h[piv] = h[piv], h[row]
            done = True
            for i in range(row + 1, m):
                if h[i][col] != 0:
                    q = h[i][col] // h[row][col]
                    h[i] = [a - q * b for a, b in zip(h[i], h[row])]
                    if h[i][col] != 0:
                        done = False
            if done:
                break
        if h[row][col] < 0:
            h[row] = [-a for a in h[row]]
        for i in range(row):
            q = h[i][col] // h[row][col]
            if q:
                h[i] = [a - q * b for a, b in zip(h[i], h[row])]
        row += 1
        if row == n:
            break
    if row < n:
        raise ValueError("matrix does not have full column rank")
    return tuple(tuple(r) for r in h[:n])


def rational_hnf(m: Mat) -> tuple[int, tuple[tuple[int, ...], ...]]:
    """Scale a rational matrix to integers and return (denominator, HNF)."""
    den = common_denominator(m)
    scaled = [[int(x * den) for x in row] for row in m]
    return den, hermite_normal_form(scaled)


def lattices_equal(a: Mat, b: Mat) -> bool:
    """Whether two rational bases generate the same lattice (exact)."""
    den = 1
    for m in (a, b):
        c = common_denominator(m)
        den = den * c // math.gcd(den, c)
    ha = hermite_normal_form([[int(x * den) for x in row] for row in a])
    hb = hermite_normal_form([[int(x * den) for x in row] for row in b])
    return ha == hb


def frac_sqrt_upper(x: Fraction, digits: int = 18) -> Fraction:
    """A rational upper bound on sqrt(x), tight to ~10^-digits relative."""
    if x < 0:
        raise ValueError("negative argument")
    if x == 0:
        return Fraction(0)
    scale = 10**digits
    num = x.numerator * scale * scale
    den = x.denominator
    # ceil(sqrt(num/den)) / scale >= sqrt(x)
    root = math.isqrt(num // den)
    while root * root * den < num:
        root += 1
    return Fraction(root, scale)


def frac_sqrt_lower(x: Fraction, digits: int = 18) -> Fraction:
    """A rational lower bound on sqrt(x)."""
    if x < 0:
        raise ValueError("negative argument")
    if x == 0:
        return Fraction(0)
    scale = 10**digits
    num = x.numerator * scale * scale
    den = x.denominator
    root = math.isqrt(num // den)
    while root * root * den > num:
        root -= 1
    return Fraction(root, scale)
