"""Finite-dimensional Lie algebras given by exact rational structure constants.

Convention: ``[e_i, e_j] = sum_k c_ij^k e_k`` is stored only for ``i < j``;
``[e_j, e_i]`` is the negative and ``[e_i, e_i] = 0``.  Every predicate here is
decided in exact arithmetic.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import exact
from .errors import DimensionError, UnsupportedStepError, ValidationError


@dataclass(frozen=True)
class LieAlgebra:
    labels: tuple
    structure: dict = field(compare=False, hash=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise ValidationError("a Lie algebra needs at least one basis vector")
        if len(set(labels)) != len(labels):
            raise ValidationError(f"duplicate basis labels in {labels}")
        n = len(labels)
        clean = {}
        for (i, j), v in dict(self.structure).items():
            if not 0 <= i < j < n:
                raise ValidationError(f"structure key {(i, j)} must satisfy 0 <= i < j < {n}")
            v = exact.vec(v)
            if len(v) != n:
                raise DimensionError(f"bracket [{labels[i]},{labels[j]}] has {len(v)} coefficients, expected {n}")
            if not exact.is_zero(v):
                clean[(i, j)] = v
        object.__setattr__(self, "structure", clean)

    @classmethod
    def from_brackets(cls, labels, brackets):
        """Build from ``(a, b, c, coeff)`` quadruples meaning ``[a, b]`` has ``coeff`` along ``c``.

        Labels or indices are accepted.  Pairs with ``a > b`` are stored negated.
        """
        labels = tuple(labels)
        n = len(labels)
        index = {name: k for k, name in enumerate(labels)}
        table = {}
        seen = set()
        for a, b, c, coeff in brackets:
            i, j, k = (index[x] if isinstance(x, str) else int(x) for x in (a, b, c))
            if i == j:
                raise ValidationError(f"[{labels[i]},{labels[i]}] is zero by antisymmetry")
            sign = 1
            if i > j:
                i, j, sign = j, i, -1
            if (i, j, k) in seen:
                raise ValidationError(f"duplicate bracket entry ({labels[i]}, {labels[j]}, {labels[k]})")
            seen.add((i, j, k))
            row = list(table.get((i, j), exact.zeros(n)))
            row[k] += sign * exact.to_fraction(coeff)
            table[(i, j)] = tuple(row)
        return cls(labels, table)

    @property
    def dim(self):
        return len(self.labels)

    def index(self, label):
        return self.labels.index(label)

    def basis_vector(self, which):
        k = self.index(which) if isinstance(which, str) else int(which)
        return tuple(Fraction(int(i == k)) for i in range(self.dim))

    def basis_bracket(self, i, j):
        if i == j:
            return exact.zeros(self.dim)
        if i < j:
            return self.structure.get((i, j), exact.zeros(self.dim))
        return tuple(-a for a in self.structure.get((j, i), exact.zeros(self.dim)))

    def entries(self):
        """Nonzero constants as ``(i, j, k, c)`` with ``i < j``, sorted."""
        return [(i, j, k, c) for (i, j), v in sorted(self.structure.items())
                for k, c in enumerate(v) if c != 0]

    def __hash__(self):
        return hash((self.labels, tuple(self.entries())))

    def __eq__(self, other):
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return self.labels == other.labels and self.structure == other.structure


@dataclass(frozen=True)
class InnerProduct:
    """Gram matrix of a metric on the algebra."""

    matrix: tuple

    def __post_init__(self):
        m = tuple(exact.vec(row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        n = len(m)
        if any(len(row) != n for row in m):
            raise DimensionError("Gram matrix must be square")
        if any(m[i][j] != m[j][i] for i in range(n) for j in range(i)):
            raise ValidationError("Gram matrix is not symmetric")
        if not exact.leading_minors_positive(m):
            raise ValidationError("Gram matrix is not positive definite")

    @classmethod
    def identity(cls, n):
        return cls(exact.identity(n))

    @property
    def dim(self):
        return len(self.matrix)

    def inverse(self):
        return exact.inverse(self.matrix)


@dataclass(frozen=True)
class TwoForm:
    """Skew bilinear form, ``matrix[i][j] = s(e_i, e_j)``."""

    matrix: tuple

    def __post_init__(self):
        m = tuple(exact.vec(row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        n = len(m)
        if any(len(row) != n for row in m):
            raise DimensionError("2-form matrix must be square")
        if any(m[i][j] != -m[j][i] for i in range(n) for j in range(i + 1)):
            raise ValidationError("2-form matrix is not skew-symmetric")

    @classmethod
    def zero(cls, n):
        return cls(tuple(exact.zeros(n) for _ in range(n)))

    @classmethod
    def from_entries(cls, labels, entries):
        """Entries ``(a, b, value)`` set ``s(a, b) = value`` and ``s(b, a) = -value``."""
        labels = tuple(labels)
        n = len(labels)
        m = [[Fraction(0)] * n for _ in range(n)]
        for a, b, value in entries:
            i = labels.index(a) if isinstance(a, str) else int(a)
            j = labels.index(b) if isinstance(b, str) else int(b)
            if i == j:
                raise ValidationError("diagonal 2-form entries must vanish")
            value = exact.to_fraction(value)
            m[i][j] = value
            m[j][i] = -value
        return cls(m)

    @property
    def dim(self):
        return len(self.matrix)

    def __call__(self, x, y):
        return exact.dot(x, exact.matvec(self.matrix, y))

    def entries(self):
        n = self.dim
        return [(i, j, self.matrix[i][j]) for i in range(n) for j in range(i + 1, n)
                if self.matrix[i][j] != 0]


@dataclass(frozen=True)
class Subspace:
    ambient_dim: int
    basis: tuple

    @classmethod
    def span(cls, ambient_dim, vectors):
        vectors = [exact.vec(v) for v in vectors]
        if not vectors:
            return cls(ambient_dim, ())
        red, _ = exact.rref(vectors)
        return cls(ambient_dim, red)

    @property
    def dim(self):
        return len(self.basis)

    def contains(self, v):
        if not self.basis:
            return exact.is_zero(v)
        return exact.rank(list(self.basis) + [exact.vec(v)]) == self.dim

    def issubspace(self, other):
        return all(other.contains(b) for b in self.basis)


@dataclass(frozen=True)
class LatticeBasis:
    vectors: tuple

    def __post_init__(self):
        vs = tuple(exact.vec(v) for v in self.vectors)
        object.__setattr__(self, "vectors", vs)
        if any(len(v) != len(vs) for v in vs):
            raise DimensionError("a lattice basis needs n vectors of length n")
        if exact.det(vs) == 0:
            raise ValidationError("lattice basis vectors are linearly dependent")

    @property
    def dim(self):
        return len(self.vectors)

    def coordinates(self, v):
        return exact.solve_coefficients(self.vectors, exact.vec(v))

    def contains(self, v):
        coeffs = self.coordinates(v)
        return coeffs is not None and all(c.denominator == 1 for c in coeffs)


@dataclass(frozen=True)
class JacobiReport:
    residual: Fraction
    passed: bool
    triple: tuple = None


@dataclass(frozen=True)
class CocycleReport:
    closed: bool
    residual: Fraction
    triple: tuple = None

    def __bool__(self):
        return self.closed


@dataclass(frozen=True)
class CentralSeries:
    dims: tuple
    step: int = None  # None when not nilpotent

    @property
    def nilpotent(self):
        return self.step is not None


def _check_dim(L, *vectors):
    for v in vectors:
        if len(v) != L.dim:
            raise DimensionError(f"vector of length {len(v)} for a {L.dim}-dimensional algebra")


def bracket(L, x, y):
    """Bilinear extension of the structure constants."""
    x, y = exact.vec(x), exact.vec(y)
    _check_dim(L, x, y)
    out = [Fraction(0)] * L.dim
    for (i, j), v in L.structure.items():
        w = x[i] * y[j] - x[j] * y[i]
        if w:
            for k, c in enumerate(v):
                if c:
                    out[k] += w * c
    return tuple(out)


def validate(L):
    """Exact Jacobi check over all basis triples i < j < k."""
    worst, where = Fraction(0), None
    for i, j, k in combinations(range(L.dim), 3):
        ei, ej, ek = (L.basis_vector(t) for t in (i, j, k))
        s = exact.add(exact.add(bracket(L, bracket(L, ei, ej), ek),
                                bracket(L, bracket(L, ej, ek), ei)),
                      bracket(L, bracket(L, ek, ei), ej))
        m = max((abs(a) for a in s), default=Fraction(0))
        if m > worst:
            worst, where = m, tuple(L.labels[t] for t in (i, j, k))
    return JacobiReport(worst, worst == 0, where)


def _require_valid(L):
    report = validate(L)
    if not report.passed:
        raise ValidationError(f"Jacobi identity fails on {report.triple} (residual {report.residual})")


def derived_algebra(L):
    return Subspace.span(L.dim, [L.basis_bracket(i, j) for i, j in combinations(range(L.dim), 2)])


def lower_central_series(L):
    """Dimensions of g, [g,g], [g,[g,g]], ... and the nilpotency step.

    The series stops at zero (nilpotent) or as soon as a term repeats.
    """
    _require_valid(L)
    term = Subspace.span(L.dim, [L.basis_vector(i) for i in range(L.dim)])
    dims = [term.dim]
    while term.dim > 0:
        nxt = Subspace.span(L.dim, [bracket(L, L.basis_vector(i), b)
                                    for i in range(L.dim) for b in term.basis])
        if nxt.dim == term.dim:
            return CentralSeries(tuple(dims), None)
        term = nxt
        dims.append(term.dim)
    return CentralSeries(tuple(dims), len(dims) - 1)


def nilpotency_step(L):
    return lower_central_series(L).step


def ad_matrix(L, x):
    """Matrix of ``y -> [x, y]``; column j holds ``[x, e_j]``."""
    x = exact.vec(x)
    _check_dim(L, x)
    cols = [bracket(L, x, L.basis_vector(j)) for j in range(L.dim)]
    return exact.transpose(cols)


def is_cocycle(L, s):
    """Check ``ds(a,b,c) = -s([a,b],c) - s([b,c],a) - s([c,a],b) = 0`` on basis triples."""
    if s.dim != L.dim:
        raise DimensionError("2-form and algebra dimensions differ")
    worst, where = Fraction(0), None
    for i, j, k in combinations(range(L.dim), 3):
        a, b, c = (L.basis_vector(t) for t in (i, j, k))
        d = -s(bracket(L, a, b), c) - s(bracket(L, b, c), a) - s(bracket(L, c, a), b)
        if abs(d) > abs(worst):
            worst, where = d, tuple(L.labels[t] for t in (i, j, k))
    return CocycleReport(worst == 0, worst, where)


def vanishes_on_derived(L, s):
    d = derived_algebra(L)
    return all(s(b, L.basis_vector(v)) == 0 for b in d.basis for v in range(L.dim))


def bch(L, x, y):
    """log(exp(x) exp(y)) for algebras of step at most 3, exactly."""
    step = nilpotency_step(L)
    if step is None or step > 3:
        raise UnsupportedStepError(f"BCH is implemented for step <= 3, got {'non-nilpotent' if step is None else step}")
    return _bch3(L, exact.vec(x), exact.vec(y))


def _bch3(L, x, y):
    xy = bracket(L, x, y)
    third = exact.sub(bracket(L, x, xy), bracket(L, y, xy))
    return exact.add(exact.add(exact.add(x, y), exact.scale(Fraction(1, 2), xy)),
                     exact.scale(Fraction(1, 12), third))
