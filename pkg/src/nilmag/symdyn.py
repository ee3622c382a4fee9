"""Subshifts of finite type, eventually periodic sequences and suspension flows.

Everything here is exact except the entropy, which is a float computed two
independent ways (power iteration and the characteristic polynomial).
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import ValidationError

CHARPOLY_MAX_N = 6
ENTROPY_AGREEMENT = 1e-10


@dataclass(frozen=True)
class TransitionMatrix:
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        if n < 2:
            raise ValidationError("a transition matrix needs at least two symbols")
        if any(len(r) != n for r in rows):
            raise ValidationError("transition matrix must be square")
        if any(x not in (0, 1) for r in rows for x in r):
            raise ValidationError("transition matrix entries must be 0 or 1")

    @classmethod
    def parse(cls, text):
        """Rows of 0/1 digits separated by commas, e.g. ``"11,10"``."""
        rows = [r.strip() for r in text.replace(";", ",").split(",") if r.strip()]
        if any(set(r) - {"0", "1"} for r in rows):
            raise ValidationError(f"matrix rows must be 0/1 digit strings: {text!r}")
        return cls(tuple(tuple(int(ch) for ch in r) for r in rows))

    @property
    def n(self):
        return len(self.entries)

    def allows(self, a, b):
        return self.entries[a][b] == 1

    def to_array(self):
        return np.array(self.entries, dtype=np.int64)

    def __str__(self):
        return ",".join("".join(str(x) for x in row) for row in self.entries)


def _int_matmul(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def matrix_power(A, p):
    """Exact integer power (Python ints, no overflow)."""
    n = A.n
    result = [[int(i == j) for j in range(n)] for i in range(n)]
    base = [list(r) for r in A.entries]
    while p:
        if p & 1:
            result = _int_matmul(result, base)
        base = _int_matmul(base, base)
        p >>= 1
    return result


@dataclass(frozen=True)
class Transitivity:
    transitive: bool
    witness: int = None  # least m with all entries of A^m positive
    bound: int = None

    def __bool__(self):
        return self.transitive


def is_transitive(A):
    """Least m <= (N-1)^2 + 1 with A^m > 0, via saturating boolean powers."""
    n = A.n
    bound = (n - 1) ** 2 + 1
    base = np.array(A.entries, dtype=bool)
    power = base.copy()
    for m in range(1, bound + 1):
        if power.all():
            return Transitivity(True, m, bound)
        power = (power.astype(np.int64) @ base.astype(np.int64)) > 0
    return Transitivity(False, None, bound)


def _fits_int64(n, p):
    # entries of A^p are at most n^p
    return p * math.log2(n) < 62


def count_periodic(A, p):
    """Number of points of period p: trace(A^p)."""
    if p < 1:
        raise ValidationError("period must be at least 1")
    if _fits_int64(A.n, p):
        return int(np.trace(np.linalg.matrix_power(A.to_array(), p)))
    P = matrix_power(A, p)
    return sum(P[i][i] for i in range(A.n))


def count_words(A, length):
    """Number of admissible words of the given length: 1^T A^(L-1) 1."""
    if length < 1:
        return 0
    if _fits_int64(A.n, length):
        return int(np.linalg.matrix_power(A.to_array(), length - 1).sum())
    P = matrix_power(A, length - 1)
    return sum(sum(r) for r in P)


def _is_nilpotent(A):
    P = matrix_power(A, A.n)
    return all(x == 0 for row in P for x in row)


def _perron_irreducible(B, tol=1e-14, max_iter=100000):
    """Perron root of an irreducible nonnegative block via Collatz-Wielandt bounds on B + I."""
    n = B.shape[0]
    M = B + np.eye(n)
    x = np.ones(n)
    lo, hi = 0.0, np.inf
    for _ in range(max_iter):
        y = M @ x
        ratios = y / x
        lo, hi = ratios.min(), ratios.max()
        if hi - lo <= tol * hi:
            break
        x = y / y.max()
    return 0.5 * (lo + hi) - 1.0


def spectral_radius_power(A):
    """Perron root by power iteration on each strongly connected component."""
    B = A.to_array().astype(float)
    ncomp, labels = connected_components(B, directed=True, connection="strong")
    best = 0.0
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        block = B[np.ix_(idx, idx)]
        if not block.any():
            continue
        best = max(best, _perron_irreducible(block))
    return best


def charpoly(A):
    """Integer coefficients of det(xI - A), leading first (Faddeev-LeVerrier, exact)."""
    n = A.n
    M = [[Fraction(x) for x in row] for row in A.entries]
    coeffs = [Fraction(1)]
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # Mk = A (M_{k-1} + c_{k-1} I)
        prev = [[Mk[i][j] + (coeffs[-1] if i == j else 0) for j in range(n)] for i in range(n)]
        Mk = [[sum(M[i][t] * prev[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        coeffs.append(-sum(Mk[i][i] for i in range(n)) / k)
    return [int(c) for c in coeffs]


def _poly_trim(p):
    while len(p) > 1 and p[0] == 0:
        p = p[1:]
    return p


def _poly_rem(a, b):
    a = list(a)
    while len(a) >= len(b) and any(a):
        f = a[0] / b[0]
        for i in range(len(b)):
            a[i] -= f * b[i]
        a = _poly_trim(a[1:]) if len(a) > 1 else [Fraction(0)]
        if len(a) < len(b):
            break
    return _poly_trim(a)


def _poly_gcd(a, b):
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while any(b):
        a, b = b, _poly_rem(a, b)
    return [x / a[0] for x in a]


def _poly_div(a, b):
    a = list(a)
    q = []
    while len(a) >= len(b):
        f = a[0] / b[0]
        q.append(f)
        for i in range(len(b)):
            a[i] -= f * b[i]
        a = a[1:]
    return q


def squarefree(coeffs):
    p = [Fraction(c) for c in coeffs]
    n = len(p) - 1
    dp = [c * (n - i) for i, c in enumerate(p[:-1])]
    g = _poly_gcd(p, dp)
    return _poly_div(p, g) if len(g) > 1 else p


def spectral_radius_charpoly(A):
    """Largest real root of the square-free part of the characteristic polynomial, Newton-polished."""
    sf = [float(c) for c in squarefree(charpoly(A))]
    if len(sf) == 1:
        return 0.0
    roots = np.roots(sf)
    real = [r.real for r in roots if abs(r.imag) <= 1e-8 * max(1.0, abs(r))]
    x = max(real) if real else 0.0
    d = np.polyder(sf)
    for _ in range(50):
        fx, dfx = np.polyval(sf, x), np.polyval(d, x)
        if dfx == 0:
            break
        step = fx / dfx
        x -= step
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return max(float(x), 0.0)


@dataclass(frozen=True)
class EntropyResult:
    entropy: float
    spectral_radius: float
    power_estimate: float
    charpoly_estimate: float = None


def sft_entropy(A):
    """log of the Perron root; ``-inf`` when A is nilpotent (empty subshift).

    For N <= 6 the power-iteration root is checked against the characteristic
    polynomial and must agree within 1e-10.
    """
    if _is_nilpotent(A):
        return EntropyResult(-math.inf, 0.0, 0.0, 0.0 if A.n <= CHARPOLY_MAX_N else None)
    power = spectral_radius_power(A)
    if A.n > CHARPOLY_MAX_N:
        return EntropyResult(math.log(power), power, power)
    check = spectral_radius_charpoly(A)
    if abs(power - check) > ENTROPY_AGREEMENT * max(1.0, power):
        raise ArithmeticError(f"spectral radius estimates disagree: {power!r} vs {check!r}")
    return EntropyResult(math.log(check), check, power, check)


# ---------------------------------------------------------------------------
# eventually periodic bi-infinite sequences


def _primitive(word):
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


@dataclass(frozen=True)
class SymbolSequence:
    """Eventually periodic sequence: ``left`` repeats below ``start``, ``right`` after the core.

    ``left`` is aligned so that index ``start`` would carry ``left[0]``;
    ``right`` is aligned so that ``start + len(core)`` carries ``right[0]``.
    Construct with :meth:`make`, which canonicalises.
    """

    left: tuple
    core: tuple
    right: tuple
    start: int

    @classmethod
    def make(cls, left, core, right, start=0):
        left, core, right = tuple(int(x) for x in left), tuple(int(x) for x in core), tuple(int(x) for x in right)
        if not left or not right:
            raise ValidationError("periodic tails must be nonempty")
        if any(x < 0 for x in left + core + right):
            raise ValidationError("symbols must be nonnegative")
        return cls(left, core, right, int(start))._canonical()

    @classmethod
    def periodic(cls, word):
        return cls.make(word, (), word, 0)

    @classmethod
    def constant(cls, symbol):
        return cls.make((symbol,), (), (symbol,), 0)

    @property
    def end(self):
        """Index of the first right-tail symbol."""
        return self.start + len(self.core)

    def left_pattern(self, i):
        return self.left[(i - self.start) % len(self.left)]

    def right_pattern(self, i):
        return self.right[(i - self.end) % len(self.right)]

    def __getitem__(self, i):
        if i < self.start:
            return self.left_pattern(i)
        if i >= self.end:
            return self.right_pattern(i)
        return self.core[i - self.start]

    def window(self, lo, hi):
        return tuple(self[i] for i in range(lo, hi + 1))

    def symbols(self):
        return set(self.left) | set(self.core) | set(self.right)

    def _canonical(self):
        left, right = _primitive(self.left), _primitive(self.right)
        seq = SymbolSequence(left, self.core, right, self.start)
        span = math.lcm(len(left), len(right))
        # a: last index up to which the sequence follows the left pattern
        a = None
        for i in range(seq.start, seq.end + span):
            if seq[i] != seq.left_pattern(i):
                a = i - 1
                break
        if a is None:
            # agrees with the left pattern everywhere: purely periodic
            shift = (0 - seq.start) % len(left)
            word = tuple(left[(shift + t) % len(left)] for t in range(len(left)))
            return SymbolSequence(word, (), word, 0)
        b = None
        for i in range(seq.end - 1, seq.start - span - 1, -1):
            if seq[i] != seq.right_pattern(i):
                b = i + 1
                break
        lo = a + 1
        hi = max(b, lo)  # exclusive end of the core
        core = tuple(seq[i] for i in range(lo, hi))
        new_left = tuple(seq.left_pattern(lo + t) for t in range(len(left)))
        new_right = tuple(seq.right_pattern(hi + t) for t in range(len(right)))
        return SymbolSequence(new_left, core, new_right, lo)


def shift_apply(w, steps=1):
    """Left shift ``steps`` times: the result carries ``w[i + steps]`` at index ``i``."""
    return SymbolSequence.make(w.left, w.core, w.right, w.start - steps)


def admissible(w, A):
    """All transitions allowed, checked over the core, one full period of each tail and the junctions."""
    syms = w.symbols()
    if max(syms) >= A.n:
        return False
    lo = w.start - len(w.left) - 1
    hi = w.end + len(w.right) + 1
    return all(A.allows(w[i], w[i + 1]) for i in range(lo, hi))


def d_lambda(w1, w2, lam, tol=1e-12):
    """sum_n |w1_n - w2_n| / lam^|n|, truncated once the geometric tail bound is below ``tol``.

    Returns ``(value, certified_error_bound)``.
    """
    if lam <= 1:
        raise ValidationError("d_lambda needs lam > 1")
    if tol <= 0:
        raise ValidationError("tolerance must be positive")
    M = max(max(w1.symbols()), max(w2.symbols()))
    # tail beyond |n| > K is at most 2 M lam^-K / (lam - 1)
    if M == 0:
        return 0.0, 0.0
    K = 0
    while 2 * M * lam ** (-K) / (lam - 1) >= tol:
        K += 1
    total = 0.0
    for n in range(-K, K + 1):
        diff = abs(w1[n] - w2[n])
        if diff:
            total += diff / lam ** abs(n)
    return total, 2 * M * lam ** (-K) / (lam - 1)


@dataclass(frozen=True)
class RoofFunction:
    """Roof value per symbol of the 0-th coordinate."""

    values: tuple

    def __post_init__(self):
        if not self.values or any(v <= 0 for v in self.values):
            raise ValidationError("roof values must be positive")

    def __call__(self, w):
        return self.values[w[0]]


@dataclass(frozen=True)
class SuspensionPoint:
    sequence: SymbolSequence
    height: object  # Fraction or float, 0 <= height < roof(sequence)


def suspension_evolve(pt, t, tau):
    """Flow for time t using (w, s + roof(w)) ~ (shift(w), s); negative t runs backwards."""
    w = pt.sequence
    s = pt.height + t
    while s >= tau(w):
        s -= tau(w)
        w = shift_apply(w, 1)
    while s < 0:
        w = shift_apply(w, -1)
        s += tau(w)
    return SuspensionPoint(w, s)


def suspension_point(sequence, height, tau):
    if not 0 <= height < tau(sequence):
        raise ValidationError("height must lie in [0, roof)")
    return SuspensionPoint(sequence, height)
