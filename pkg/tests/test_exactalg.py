from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, strategies as st

from mellingamma.exactalg import (
    Polynomial,
    QMatrix,
    RationalParseError,
    SingularMatrixError,
    buchberger,
    det,
    floor_split,
    format_rational,
    inverse,
    kernel,
    normal_form,
    parse_rational,
    rank,
    rref,
    solve,
    standard_monomials,
)
from mellingamma.exactalg.poly import divides, monomials_of_degree
from mellingamma.rootdata import permutation_sign

rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 1000)


def small_matrices(max_dim=4, square=False):
    @st.composite
    def build(draw):
        m = draw(st.integers(1, max_dim))
        n = m if square else draw(st.integers(1, max_dim))
        rows = draw(st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=m, max_size=m))
        return QMatrix(rows, n)

    return build()


# ---------------------------------------------------------------- rationals


@pytest.mark.parametrize(
    "text,value",
    [("3/4", Fraction(3, 4)), ("-2", Fraction(-2)), (" 6/8 ", Fraction(3, 4)), (5, Fraction(5)), ("+1/3", Fraction(1, 3))],
)
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("bad", ["1/0", "0.5", "a/b", "", 0.5, True, None, "1/-2"])
def test_parse_rational_rejects(bad):
    with pytest.raises(RationalParseError):
        parse_rational(bad)


@given(rationals)
def test_format_parse_round_trip(q):
    assert parse_rational(format_rational(q)) == q


@given(rationals)
def test_floor_split(q):
    a, n = floor_split(q)
    assert a + n == q and 0 <= a < 1 and isinstance(n, int)


@given(rationals, rationals, rationals)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a + 0 == a and a * 1 == a
    if a:
        assert a * (1 / a) == 1


# ----------------------------------------------------------------- matrices


def _leibniz(m: QMatrix) -> Fraction:
    n = m.nrows
    total = Fraction(0)
    for p in permutations(range(n)):
        term = Fraction(permutation_sign(p))
        for i, j in enumerate(p):
            term *= m[i, j]
        total += term
    return total


@given(small_matrices(square=True))
def test_det_matches_leibniz(m):
    assert det(m) == _leibniz(m)


@given(small_matrices(square=True), small_matrices(square=True))
def test_det_multiplicative(a, b):
    if a.nrows == b.nrows:
        assert det(a @ b) == det(a) * det(b)


@given(small_matrices(square=True))
def test_inverse(m):
    if det(m) == 0:
        with pytest.raises(SingularMatrixError):
            inverse(m)
    else:
        assert m @ inverse(m) == QMatrix.identity(m.nrows)


@given(small_matrices())
def test_rank_nullity_and_kernel(m):
    ker = kernel(m)
    assert rank(m) + len(ker) == m.ncols
    for v in ker:
        assert not any(m @ v)


@given(small_matrices())
def test_rref_is_reduced(m):
    red, piv = rref(m)
    assert len(piv) == rank(m)
    for i, p in enumerate(piv):
        assert red[i, p] == 1
        assert all(red[k, p] == 0 for k in range(red.nrows) if k != i)


@given(small_matrices(), st.data())
def test_solve(m, data):
    x = data.draw(st.lists(st.integers(-3, 3), min_size=m.ncols, max_size=m.ncols))
    b = m @ x
    sol = solve(m, b)
    assert sol is not None and tuple(m @ sol) == tuple(b)


def test_solve_inconsistent():
    assert solve(QMatrix([[1, 1], [1, 1]]), [1, 2]) is None


def test_matrix_shape_errors():
    with pytest.raises(ValueError):
        QMatrix([[1, 2], [3]])
    with pytest.raises(ValueError):
        QMatrix([[1, 2]]) @ QMatrix([[1, 2]])


def test_strings_round_trip():
    m = QMatrix([[Fraction(1, 2), -3], [0, Fraction(-7, 9)]])
    assert m.to_strings() == [["1/2", "-3"], ["0", "-7/9"]]
    assert QMatrix.from_strings(m.to_strings()) == m


def test_kron_and_nilpotent():
    j = QMatrix([[0, 0], [1, 0]])
    assert j.is_nilpotent()
    assert not QMatrix.identity(2).is_nilpotent()
    assert j.kron(QMatrix.identity(2)).shape == (4, 4)
    assert (j.kron(QMatrix.identity(2))).is_nilpotent()


# ------------------------------------------------------ polynomials, Groebner


def _poly(nvars, terms):
    return Polynomial(nvars, {tuple(m): c for m, c in terms})


def test_groebner_small_examples():
    v1, v2 = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    gb = buchberger([v1 + v2, v1 * v1])
    assert set(gb.generators) == {v1 + v2, v2 * v2}
    assert standard_monomials(gb) == [(0, 0), (0, 1)]
    # not zero-dimensional: v2 never becomes nilpotent
    assert standard_monomials(buchberger([v1 * v1, v1 * v2])) is None
    assert standard_monomials(buchberger([v1 + 1])) is None
    assert standard_monomials(buchberger([v1 + 1, v2])) == [(0, 0)]
    unit = buchberger([v1 + 1, v1])
    assert unit.is_unit and standard_monomials(unit) == []


@st.composite
def homogeneous_ideals(draw):
    nvars = draw(st.integers(2, 3))
    gens = []
    for _ in range(draw(st.integers(1, 3))):
        d = draw(st.integers(1, 3))
        monos = monomials_of_degree(nvars, d)
        coeffs = draw(st.lists(st.integers(-2, 2), min_size=len(monos), max_size=len(monos)))
        p = Polynomial(nvars, dict(zip(monos, coeffs)))
        if not p.is_zero():
            gens.append(p)
    if not gens:
        gens = [Polynomial.variable(nvars, 0)]
    return nvars, gens


def _degree_span(nvars, gens, d):
    """Coordinates of the degree-d part of the ideal, by linear algebra."""
    basis = monomials_of_degree(nvars, d)
    index = {m: i for i, m in enumerate(basis)}
    rows = []
    for g in gens:
        k = d - g.degree()
        if k < 0:
            continue
        for m in monomials_of_degree(nvars, k):
            h = g.mul_monomial(m)
            row = [Fraction(0)] * len(basis)
            for mono, c in h.terms.items():
                row[index[mono]] = c
            rows.append(row)
    return basis, rows


@given(homogeneous_ideals(), st.data())
def test_groebner_membership_matches_linear_algebra(ideal, data):
    nvars, gens = ideal
    gb = buchberger(gens)
    for d in range(1, 7):
        basis, rows = _degree_span(nvars, gens, d)
        span_rank = rank(QMatrix(rows, len(basis))) if rows else 0
        # Hilbert function: standard monomials of degree d count the quotient
        lead = gb.leading_monomials
        std_count = sum(1 for m in basis if not any(divides(l, m) for l in lead))
        assert std_count == len(basis) - span_rank
        coeffs = data.draw(st.lists(st.integers(-2, 2), min_size=len(basis), max_size=len(basis)))
        p = Polynomial(nvars, dict(zip(basis, coeffs)))
        in_span = rank(QMatrix(rows + [[p.coefficient(m) for m in basis]], len(basis))) == span_rank if rows else p.is_zero()
        assert gb.contains(p) == in_span


@given(homogeneous_ideals(), st.data())
def test_normal_form_division_invariant(ideal, data):
    nvars, gens = ideal
    gb = buchberger(gens)
    d = data.draw(st.integers(1, 4))
    basis = monomials_of_degree(nvars, d)
    coeffs = data.draw(st.lists(st.integers(-3, 3), min_size=len(basis), max_size=len(basis)))
    p = Polynomial(nvars, dict(zip(basis, coeffs)))
    r = normal_form(p, gb)
    # the remainder is reduced and differs from p by an ideal element
    for mono in r.terms:
        assert not any(divides(l, mono) for l in gb.leading_monomials)
    assert gb.contains(p - r)


def test_polynomial_arithmetic():
    x, y = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    p = (x + y) ** 2
    assert p == x * x + y * y + x * y + x * y
    assert p.degree() == 2 and p.is_homogeneous()
    assert str(x * y * y) == "v1*v2^2"
    assert p.substitute_linear([y, x]) == p
