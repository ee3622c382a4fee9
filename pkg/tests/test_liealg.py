from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilmag import exact
from nilmag.errors import DimensionError, UnsupportedStepError, ValidationError
from nilmag.liealg import (InnerProduct, LatticeBasis, LieAlgebra, Subspace, TwoForm, ad_matrix, bch,
                           bracket, derived_algebra, is_cocycle, lower_central_series, nilpotency_step,
                           validate, vanishes_on_derived)

import oracles

P5_LABELS = ("U", "V", "X", "Y", "Z")
P5_BRACKETS = [("X", "Y", "Z", 1), ("Y", "V", "U", 1)]
T4_BRACKETS = P5_BRACKETS + [("X", "U", "W", 1), ("Z", "V", "W", 1)]
T4_LABELS = P5_LABELS + ("W",)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def vectors(n):
    return st.lists(rationals, min_size=n, max_size=n).map(tuple)


def p5():
    return LieAlgebra.from_brackets(P5_LABELS, P5_BRACKETS)


def t4():
    return LieAlgebra.from_brackets(T4_LABELS, T4_BRACKETS)


def heis():
    return LieAlgebra.from_brackets(("X", "Y", "Z"), [("X", "Y", "Z", 1)])


def e(L, label):
    return L.basis_vector(L.index(label))


@st.composite
def two_step_algebras(draw):
    """[e_i, e_j] in the span of the last r basis vectors, brackets only among the first n - r."""
    n = draw(st.integers(2, 6))
    r = draw(st.integers(1, n - 1))
    labels = tuple(f"e{i}" for i in range(n))
    quads = []
    for i in range(n - r):
        for j in range(i + 1, n - r):
            for k in range(n - r, n):
                c = draw(st.sampled_from([0, 0, 1, -1, Fraction(1, 2), 3]))
                if c:
                    quads.append((labels[i], labels[j], labels[k], c))
    return labels, quads


# --- Rational arithmetic ---------------------------------------------------

@given(rationals, rationals)
def test_fractions_are_normalised(a, b):
    for q in (a + b, a * b, a - b):
        assert q.denominator > 0
        assert __import__("math").gcd(abs(q.numerator), q.denominator) == 1


def test_exact_linear_algebra():
    assert exact.det([[1, 2], [3, 4]]) == -2
    inv = exact.inverse([[2, 0], [0, 4]])
    assert inv[1][1] == Fraction(1, 4)
    assert exact.solve_coefficients([(1, 0), (0, 2)], (3, 1)) == (3, Fraction(1, 2))
    assert exact.solve_coefficients([(1, 0, 0)], (0, 1, 0)) is None


# --- bracket ---------------------------------------------------------------

def test_bracket_examples():
    L = p5()
    assert bracket(L, e(L, "X"), e(L, "Y")) == e(L, "Z")
    assert bracket(L, e(L, "Y"), e(L, "V")) == e(L, "U")
    T = t4()
    assert bracket(T, e(T, "X"), e(T, "U")) == e(T, "W")


@given(vectors(5), vectors(5), vectors(5), rationals)
def test_bracket_bilinear_antisymmetric(x, y, z, s):
    L = p5()
    assert bracket(L, x, x) == (0,) * 5
    assert bracket(L, x, y) == exact.scale(-1, bracket(L, y, x))
    lhs = bracket(L, exact.add(exact.scale(s, x), z), y)
    assert lhs == exact.add(exact.scale(s, bracket(L, x, y)), bracket(L, z, y))


@given(vectors(5), vectors(5))
def test_bracket_matches_dense_oracle(x, y):
    C = oracles.dense_structure(P5_LABELS, P5_BRACKETS)
    assert list(bracket(p5(), x, y)) == oracles.dense_bracket(C, x, y)


def test_bracket_dimension_mismatch():
    with pytest.raises(DimensionError):
        bracket(p5(), (1, 0), (0, 1, 0, 0, 0))


def test_structure_validation():
    with pytest.raises(ValidationError):
        LieAlgebra.from_brackets(("X", "Y", "Z"), [("X", "Y", "Z", 1), ("Y", "X", "Z", 2)])
    with pytest.raises(ValidationError):
        LieAlgebra.from_brackets(("X", "X"), [])
    # reversed pair stored with the opposite sign
    L = LieAlgebra.from_brackets(("X", "Y", "Z"), [("Y", "X", "Z", 1)])
    assert bracket(L, e(L, "X"), e(L, "Y")) == (0, 0, -1)


# --- validate --------------------------------------------------------------

SO3 = (("X", "Y", "Z"), [("X", "Y", "Z", 1), ("Y", "Z", "X", 1), ("Z", "X", "Y", 1)])
BAD = [("X", "Y", "Z", 1), ("Y", "Z", "X", 1), ("Z", "X", "X", 1)]


@pytest.mark.parametrize("labels,quads", [
    (("A", "B", "C", "D", "E"), []),
    (P5_LABELS, P5_BRACKETS),
    (T4_LABELS, T4_BRACKETS),
    SO3,
])
def test_validate_passes_and_matches_oracle(labels, quads):
    rep = validate(LieAlgebra.from_brackets(labels, quads))
    assert rep.passed and rep.residual == 0
    assert oracles.jacobi_max_residual(oracles.dense_structure(labels, quads)) == 0


def test_validate_detects_failure():
    # [X,Y]=Z, [Y,Z]=X, [Z,X]=X: the cyclic sum on (X,Y,Z) is Z
    quads = BAD
    rep = validate(LieAlgebra.from_brackets(("X", "Y", "Z"), quads))
    assert not rep.passed
    assert rep.residual == oracles.jacobi_max_residual(oracles.dense_structure(("X", "Y", "Z"), quads))
    assert rep.triple == ("X", "Y", "Z")


@given(two_step_algebras())
def test_validate_random_two_step(alg):
    labels, quads = alg
    L = LieAlgebra.from_brackets(labels, quads)
    assert validate(L).passed
    assert oracles.jacobi_max_residual(oracles.dense_structure(labels, quads)) == 0


# --- lower central series --------------------------------------------------

def test_series_examples():
    ab = LieAlgebra.from_brackets(tuple("ABCDE"), [])
    assert lower_central_series(ab).dims == (5, 0) and nilpotency_step(ab) == 1
    s = lower_central_series(p5())
    assert s.dims == (5, 2, 0) and s.step == 2
    s = lower_central_series(t4())
    assert s.dims == (6, 3, 1, 0) and s.step == 3
    so3 = LieAlgebra.from_brackets(*SO3)
    s = lower_central_series(so3)
    assert s.step is None and s.dims == (3,) and not s.nilpotent


@pytest.mark.parametrize("labels,quads", [(P5_LABELS, P5_BRACKETS), (T4_LABELS, T4_BRACKETS), SO3])
def test_series_matches_sympy(labels, quads):
    dims = oracles.series_dims(oracles.dense_structure(labels, quads))
    s = lower_central_series(LieAlgebra.from_brackets(labels, quads))
    if dims[-1] is None:
        assert s.step is None
    else:
        assert list(s.dims) == dims


@given(two_step_algebras())
def test_series_strictly_decreasing(alg):
    L = LieAlgebra.from_brackets(*alg)
    s = lower_central_series(L)
    assert s.nilpotent
    assert all(a > b for a, b in zip(s.dims, s.dims[1:]))
    assert s.dims[-1] == 0
    d = derived_algebra(L)
    assert len(s.dims) < 3 or d.dim == s.dims[1]


def test_series_rejects_invalid_algebra():
    L = LieAlgebra.from_brackets(("X", "Y", "Z"), BAD)
    with pytest.raises(ValidationError):
        lower_central_series(L)


# --- derived algebra, ad ---------------------------------------------------

def test_derived_examples():
    assert derived_algebra(LieAlgebra.from_brackets(tuple("AB"), [])).dim == 0
    L = p5()
    d = derived_algebra(L)
    assert d.dim == 2 and d.contains(e(L, "Z")) and d.contains(e(L, "U"))
    assert not d.contains(e(L, "X"))
    H = heis()
    assert derived_algebra(H) == Subspace.span(3, [(0, 0, 1)])


def test_subspace_canonical():
    a = Subspace.span(3, [(1, 1, 0), (0, 1, 0)])
    b = Subspace.span(3, [(2, 0, 0), (5, 3, 0)])
    assert a == b
    assert Subspace.span(3, [(0, 0, 1)]).issubspace(Subspace.span(3, [(0, 1, 1), (0, 1, 0)]))


def test_ad_matrix_examples():
    ab = LieAlgebra.from_brackets(tuple("AB"), [])
    assert ad_matrix(ab, (1, 2)) == ((0, 0), (0, 0))
    L = p5()
    M = ad_matrix(L, e(L, "Y"))
    col = lambda lab: tuple(row[L.index(lab)] for row in M)  # noqa: E731
    assert col("X") == exact.scale(-1, e(L, "Z"))
    assert col("V") == e(L, "U")
    for lab in ("U", "Y", "Z"):
        assert col(lab) == (0,) * 5


@given(vectors(6), vectors(6), rationals)
def test_ad_matrix_properties(x, y, s):
    T = t4()
    assert exact.matvec(ad_matrix(T, x), x) == (0,) * 6
    assert exact.matvec(ad_matrix(T, x), y) == bracket(T, x, y)
    assert ad_matrix(T, exact.scale(s, x)) == tuple(tuple(s * a for a in row) for row in ad_matrix(T, x))


# --- cocycles --------------------------------------------------------------

def test_cocycle_examples():
    L = p5()
    assert is_cocycle(L, TwoForm.zero(5)).closed
    good = TwoForm.from_entries(P5_LABELS, [("X", "U", 1), ("Z", "V", 1)])
    rep = is_cocycle(L, good)
    assert rep.closed and rep.residual == 0
    bad = TwoForm.from_entries(P5_LABELS, [("Z", "V", 1)])
    rep = is_cocycle(L, bad)
    assert not rep.closed
    assert rep.residual == -1 and set(rep.triple) == {"X", "Y", "V"}


def _d_sigma_oracle(C, S, a, b, c):
    n = len(C)
    br = lambda i, j: [C[i][j][k] for k in range(n)]  # noqa: E731
    s = lambda v, k: sum(v[i] * S[i][k] for i in range(n))  # noqa: E731
    return -s(br(a, b), c) - s(br(b, c), a) - s(br(c, a), b)


@given(st.lists(rationals, min_size=10, max_size=10))
def test_cocycle_matches_exhaustive_oracle(vals):
    C = oracles.dense_structure(P5_LABELS, P5_BRACKETS)
    pairs = [(i, j) for i in range(5) for j in range(i + 1, 5)]
    entries = [(P5_LABELS[i], P5_LABELS[j], v) for (i, j), v in zip(pairs, vals) if v]
    sigma = TwoForm.from_entries(P5_LABELS, entries)
    S = [list(r) for r in sigma.matrix]
    closed = all(_d_sigma_oracle(C, S, a, b, c) == 0 for a in range(5) for b in range(5) for c in range(5))
    assert is_cocycle(p5(), sigma).closed == closed


def test_vanishes_on_derived_examples():
    L = p5()
    assert vanishes_on_derived(L, TwoForm.zero(5))
    assert not vanishes_on_derived(L, TwoForm.from_entries(P5_LABELS, [("X", "U", 1), ("Z", "V", 1)]))
    assert vanishes_on_derived(heis(), TwoForm.from_entries(("X", "Y", "Z"), [("X", "Y", 1)]))


def test_two_form_and_metric_validation():
    with pytest.raises(ValidationError):
        TwoForm(((0, 1), (1, 0)))
    with pytest.raises(ValidationError):
        InnerProduct(((1, 2), (2, 1)))
    with pytest.raises(ValidationError):
        InnerProduct(((1, 0), (1, 1)))
    with pytest.raises(ValidationError):
        LatticeBasis(((1, 2), (2, 4)))
    assert LatticeBasis(((Fraction(1, 2), 0), (0, 1))).contains((Fraction(3, 2), -2))
    assert not LatticeBasis(((Fraction(1, 2), 0), (0, 1))).contains((Fraction(1, 4), 0))


# --- BCH -------------------------------------------------------------------

def test_bch_examples():
    ab = LieAlgebra.from_brackets(tuple("AB"), [])
    assert bch(ab, (1, 2), (3, 5)) == (4, 7)
    H = heis()
    assert bch(H, (1, 0, 0), (0, 1, 0)) == (1, 1, Fraction(1, 2))
    T = t4()
    assert bch(T, e(T, "X"), e(T, "U")) == exact.add(exact.add(e(T, "X"), e(T, "U")),
                                                     exact.scale(Fraction(1, 2), e(T, "W")))


def test_bch_rejects_high_step():
    # filiform algebra of step 4: [e0,ei] = e(i+1)
    labels = tuple(f"e{i}" for i in range(5))
    L = LieAlgebra.from_brackets(labels, [("e0", f"e{i}", f"e{i + 1}", 1) for i in range(1, 4)])
    assert nilpotency_step(L) == 4
    with pytest.raises(UnsupportedStepError):
        bch(L, L.basis_vector(0), L.basis_vector(1))
    with pytest.raises(UnsupportedStepError):
        bch(LieAlgebra.from_brackets(*SO3), (1, 0, 0), (0, 1, 0))


@given(vectors(6), vectors(6))
def test_bch_matches_free_algebra_series(x, y):
    T = t4()
    want = oracles.bch_free(lambda a, b: list(bracket(T, a, b)), x, y, deg=4)
    assert list(bch(T, x, y)) == want


@given(vectors(6), vectors(6), vectors(6))
def test_bch_associative(a, b, c):
    T = t4()
    assert bch(T, bch(T, a, b), c) == bch(T, a, bch(T, b, c))


@given(vectors(6), vectors(6))
def test_triple_brackets_vanish_in_step_three(x, y):
    T = t4()
    assert bracket(T, x, bracket(T, x, bracket(T, x, y))) == (0,) * 6
