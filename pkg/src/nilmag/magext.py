"""Magnetic systems and their one-dimensional central extensions.

The extension adds a central vector ``W`` (always the last basis vector) with
bracket ``{x, y} = [x, y] + s(x, y) W``.  A metric is extended so that ``W`` is
a unit vector orthogonal to the original algebra.  The W-coordinate of a
covector is the moment map of the circle action generated by ``W``.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact
from .errors import CocycleError, DimensionError, UnsupportedStepError, ValidationError
from .liealg import InnerProduct, LatticeBasis, LieAlgebra, TwoForm, _bch3, is_cocycle, nilpotency_step

W_LABEL = "W"


@dataclass(frozen=True)
class MagneticSystem:
    algebra: LieAlgebra
    metric: InnerProduct
    sigma: TwoForm
    lattice: LatticeBasis = None
    field_strength: float = 1.0

    def __post_init__(self):
        n = self.algebra.dim
        if self.metric.dim != n or self.sigma.dim != n:
            raise DimensionError("algebra, metric and 2-form dimensions differ")
        if self.lattice is not None and self.lattice.dim != n:
            raise DimensionError("lattice dimension does not match the algebra")
        report = is_cocycle(self.algebra, self.sigma)
        if not report.closed:
            raise CocycleError(f"2-form is not closed: d sigma{report.triple} = {report.residual}",
                               report.triple, report.residual)

    @property
    def dim(self):
        return self.algebra.dim

    @property
    def is_geodesic(self):
        return not self.sigma.entries()


@dataclass(frozen=True)
class ExtendedSystem:
    algebra: LieAlgebra
    metric: InnerProduct
    base: MagneticSystem

    @property
    def w_index(self):
        return self.algebra.dim - 1

    def as_system(self, lattice=None):
        """The extension as a geodesic (zero 2-form) system."""
        return MagneticSystem(self.algebra, self.metric, TwoForm.zero(self.algebra.dim), lattice, 0.0)


def extend(m):
    """Central extension by the 2-form; raises CocycleError for non-closed forms."""
    base = m.algebra
    n = base.dim
    if W_LABEL in base.labels:
        raise ValidationError(f"label {W_LABEL!r} is reserved for the extension direction")
    # MagneticSystem construction already guarantees closedness; recheck for hand-built objects
    report = is_cocycle(base, m.sigma)
    if not report.closed:
        raise CocycleError(f"cannot extend by a non-closed 2-form (triple {report.triple})",
                           report.triple, report.residual)
    table = {}
    for i in range(n):
        for j in range(i + 1, n):
            row = base.basis_bracket(i, j) + (m.sigma.matrix[i][j],)
            if not exact.is_zero(row):
                table[(i, j)] = row
    algebra = LieAlgebra(base.labels + (W_LABEL,), table)
    g = m.metric.matrix
    gram = tuple(tuple(g[i]) + (Fraction(0),) for i in range(n)) + ((Fraction(0),) * n + (Fraction(1),),)
    return ExtendedSystem(algebra, InnerProduct(gram), m)


def rationality_k(m):
    """Smallest k >= 1 with k * s(l_i, l_j) integral on the lattice basis."""
    if m.lattice is None:
        raise ValidationError("rationality needs a lattice")
    ls = m.lattice.vectors
    values = [m.sigma(ls[i], ls[j]) for i in range(len(ls)) for j in range(i + 1, len(ls))]
    return exact.denominator_lcm(values)


def w_step(k):
    return Fraction(1, 12 * k * k)


def extended_lattice(m, k):
    """Base lattice vectors with zero W-part, plus W / (12 k^2)."""
    expected = rationality_k(m)
    if k != expected:
        raise ValidationError(f"k = {k} does not match the rationality index {expected}")
    vs = [tuple(v) + (Fraction(0),) for v in m.lattice.vectors]
    vs.append((Fraction(0),) * m.dim + (w_step(k),))
    return LatticeBasis(vs)


@dataclass(frozen=True)
class ClosureResult:
    closed: bool
    words_checked: int
    counterexample: tuple = None  # (word as generator indices, product vector)

    def __bool__(self):
        return self.closed


def verify_lattice_closure(ext, gens, max_word_len=3):
    """Check that BCH products of generators and inverses stay in their Z-span.

    Words are sequences of signed generator indices (``+i`` for ``g_i``,
    ``-i`` for its inverse, 1-based).  This is a bounded check, not a proof.
    """
    step = nilpotency_step(ext.algebra)
    if step is None or step > 3:
        raise UnsupportedStepError(f"lattice closure check needs step <= 3, got {step}")
    L = ext.algebra
    letters = []
    for i, g in enumerate(gens.vectors, start=1):
        letters.append((i, g))
        letters.append((-i, exact.scale(-1, g)))
    checked = 0
    frontier = [((), exact.zeros(L.dim))]
    for _ in range(max_word_len):
        nxt = []
        for word, value in frontier:
            for sym, g in letters:
                prod = _bch3(L, value, g)
                checked += 1
                w = word + (sym,)
                if not gens.contains(prod):
                    return ClosureResult(False, checked, (w, prod))
                nxt.append((w, prod))
        frontier = nxt
    return ClosureResult(True, checked)


def split_moment(ext, lam):
    """Split an extension covector into its base part and the moment value p_W."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape[-1] != ext.algebra.dim:
        raise DimensionError(f"expected {ext.algebra.dim} coordinates, got {lam.shape[-1]}")
    if lam.ndim == 1:
        return lam[:-1].copy(), float(lam[-1])
    return lam[..., :-1].copy(), lam[..., -1].copy()


def join_moment(ext, base_lam, c):
    base_lam = np.asarray(base_lam, dtype=float)
    if base_lam.shape[-1] != ext.base.dim:
        raise DimensionError(f"expected {ext.base.dim} coordinates, got {base_lam.shape[-1]}")
    c = np.broadcast_to(np.asarray(c, dtype=float), base_lam.shape[:-1])
    return np.concatenate([base_lam, c[..., None]], axis=-1)

