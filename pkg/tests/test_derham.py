import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mellingamma import derham
from mellingamma.derham import (
    WindowExhausted,
    gm2_koszul_check,
    gm_exp_kummer_cohomology,
    multiplier_dimension,
    multiplier_report,
)
from mellingamma.gamma import gamma_data
from mellingamma.rootdata import TorusPoint

s_values = st.builds(Fraction, st.integers(-30, 30), st.integers(1, 6))
c_values = st.builds(Fraction, st.integers(-5, 5).filter(bool), st.integers(1, 4))


@pytest.mark.parametrize(
    "c,s,expected",
    [
        (1, Fraction(1, 2), (0, 1)),
        (0, Fraction(1, 3), (0, 0)),
        (0, 0, (1, 1)),
        (0, -4, (1, 1)),
        (-1, 5, (0, 1)),
    ],
)
def test_single_variable_examples(c, s, expected):
    r = gm_exp_kummer_cohomology(c, s)
    assert (r.dim_ker, r.dim_coker) == expected and r.stabilized


@given(c_values, s_values)
def test_nonzero_c_has_no_kernel(c, s):
    r = gm_exp_kummer_cohomology(c, s, window=8)
    assert r.dim_ker == 0 and r.dim_coker == 1


@given(st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4)), s_values, st.integers(8, 14))
def test_window_monotonicity(c, s, n):
    a = gm_exp_kummer_cohomology(c, s, window=n)
    b = gm_exp_kummer_cohomology(c, s, window=n + 5)
    assert a.stabilized and (a.dim_ker, a.dim_coker) == (b.dim_ker, b.dim_coker)


def test_large_resonance_is_inside_window():
    r = gm_exp_kummer_cohomology(0, 100)
    assert (r.dim_ker, r.dim_coker) == (1, 1)


def test_window_minimum():
    with pytest.raises(ValueError):
        gm_exp_kummer_cohomology(1, 0, window=4)


def test_window_exhausted(monkeypatch):
    calls = iter(range(1000))
    monkeypatch.setattr(derham, "_gm_dims", lambda c, s, n: (0, next(calls)))
    with pytest.raises(WindowExhausted, match="window exhausted"):
        gm_exp_kummer_cohomology(1, 0)


def test_multiplier_gl2(gl2):
    for xi in ((0, 0), (Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 3), Fraction(2, 3)), (Fraction(-7, 5), 3)):
        assert multiplier_dimension(gamma_data(gl2, [(1, 0), (0, 1)]), TorusPoint(xi)) == 1
    assert multiplier_dimension(gamma_data(gl2, [(1, 0), (1, 0), (0, 1), (0, 1)]), TorusPoint((0, 0))) == 1


def test_multiplier_report_uses_inverse_exponent():
    rep = multiplier_report([(1, 0), (0, 1)], 1, TorusPoint((Fraction(1, 3), Fraction(2, 3))))
    assert [f.s for f in rep.factors] == [Fraction(-1, 3), Fraction(-2, 3)]
    assert rep.to_json()["product"] == 1


def test_multiplier_rejects_c_zero():
    with pytest.raises(ValueError):
        multiplier_report([(1, 0)], 0, TorusPoint((0, 0)))


@pytest.mark.parametrize(
    "c,s1,s2,deg0", [(1, Fraction(1, 2), Fraction(1, 3), 1), (1, 0, 0, 1), (0, Fraction(1, 2), Fraction(1, 2), 0)]
)
def test_gm2_examples(c, s1, s2, deg0):
    assert gm2_koszul_check(c, s1, s2).degree0 == deg0


def test_gm2_kunneth_for_c_zero():
    # two trivial connections: cohomology of the 2-torus
    assert gm2_koszul_check(0, 0, 0, middle=True).dims == (1, 2, 1)
    assert gm2_koszul_check(1, Fraction(1, 2), 3, middle=True).dims == (0, 0, 1)


def test_gm2_factorization_randomized():
    rng = random.Random(7)
    for _ in range(20):
        c = Fraction(rng.choice([-2, -1, 1, 2, 3]), rng.randint(1, 3))
        s1, s2 = (Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(2))
        expected = gm_exp_kummer_cohomology(c, s1).dim_coker * gm_exp_kummer_cohomology(c, s2).dim_coker
        assert gm2_koszul_check(c, s1, s2).degree0 == expected
