"""Exact rational linear algebra on tuples of Fractions.

Pivoting always takes the first nonzero entry, so results are reproducible
and never depend on a tolerance.
"""

from fractions import Fraction
from math import lcm


def to_fraction(x):
    """Convert ints, Fractions, and "p/q" strings; floats are converted exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    # numpy scalars and similar
    try:
        return Fraction(x)
    except TypeError:
        return Fraction(float(x))


def vec(xs):
    return tuple(to_fraction(x) for x in xs)


def zeros(n):
    return (Fraction(0),) * n


def add(x, y):
    return tuple(a + b for a, b in zip(x, y))


def sub(x, y):
    return tuple(a - b for a, b in zip(x, y))


def scale(s, x):
    s = to_fraction(s)
    return tuple(s * a for a in x)


def dot(x, y):
    return sum((a * b for a, b in zip(x, y)), Fraction(0))


def is_zero(x):
    return all(a == 0 for a in x)


def matvec(m, x):
    return tuple(dot(row, x) for row in m)


def transpose(m):
    return tuple(zip(*m)) if m else ()


def identity(n):
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def rref(rows):
    """Reduced row echelon form of a list of vectors.

    Returns ``(reduced_rows, pivot_columns)`` with zero rows removed.
    """
    m = [list(r) for r in rows]
    if not m:
        return (), ()
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        p = m[r][c]
        m[r] = [a / p for a in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return tuple(tuple(row) for row in m[:r]), tuple(pivots)


def rank(rows):
    return len(rref(rows)[0])


def det(m):
    """Determinant by fraction-exact elimination."""
    a = [list(r) for r in m]
    n = len(a)
    d = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if a[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            a[c], a[pivot] = a[pivot], a[c]
            d = -d
        p = a[c][c]
        d *= p
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / p
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d


def inverse(m):
    n = len(m)
    aug = [list(row) + list(e) for row, e in zip(m, identity(n))]
    red, pivots = rref(aug)
    if len(red) < n or pivots[:n] != tuple(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return tuple(tuple(row[n:]) for row in red)


def solve_coefficients(basis, v):
    """Coefficients ``a`` with ``sum(a_i * basis[i]) == v``, or None if v is outside the span.

    ``basis`` must be linearly independent.
    """
    k = len(basis)
    cols = transpose(basis)
    aug = [list(row) + [b] for row, b in zip(cols, v)]
    red, pivots = rref(aug)
    if k in pivots:
        return None
    coeffs = [Fraction(0)] * k
    for row, p in zip(red, pivots):
        coeffs[p] = row[k]
    return tuple(coeffs)


def leading_minors_positive(m):
    return all(det(tuple(row[:k] for row in m[:k])) > 0 for k in range(1, len(m) + 1))


def denominator_lcm(values):
    out = 1
    for v in values:
        out = lcm(out, to_fraction(v).denominator)
    return out
