from fractions import Fraction

import pytest

from mellingamma.coinvariants import (
    act_on_polynomial,
    coinvariant_algebra,
    invariant_generators,
    reflection_generated,
    truncation_algebra,
)
from mellingamma.exactalg import Polynomial, QMatrix, inverse
from mellingamma.rootdata import TorusPoint, build_root_datum, stabilizer


@pytest.mark.parametrize(
    "datum,dim",
    [
        ({"preset": "GL", "rank": 2}, 2),
        ({"preset": "GL", "rank": 3}, 6),
        ({"preset": "A", "rank": 2}, 6),
        ({"preset": "B", "rank": 2}, 8),
        ({"preset": "G", "rank": 2}, 12),
    ],
)
def test_full_weyl_group_dimension(datum, dim):
    rd = build_root_datum(datum)
    alg = coinvariant_algebra(rd.weyl_group)
    assert alg.dim == dim == rd.order
    assert alg.is_reflection_group


def test_gl2_basis_and_swap(gl2):
    alg = coinvariant_algebra(gl2.weyl_group)
    assert alg.basis_strings() == ["1", "v2"]
    swap = gl2.weyl_group[1]
    # v2 -> v1 = -v2 modulo v1 + v2
    assert alg.action_of(swap) == QMatrix([[1, 0], [0, -1]])


def test_trivial_group(gl2):
    alg = coinvariant_algebra(stabilizer(gl2, TorusPoint((Fraction(1, 3), Fraction(2, 3)))))
    assert alg.dim == 1 and alg.basis_strings() == ["1"]


def test_gl3_half_stabilizer(gl3):
    group = stabilizer(gl3, TorusPoint((0, 0, Fraction(1, 2))))
    assert reflection_generated(group)
    assert coinvariant_algebra(group).dim == 2


def test_invariants_gl2(gl2):
    gens = invariant_generators(gl2.weyl_group)
    for g in gens:
        for w in gl2.weyl_group:
            assert act_on_polynomial(w, g) == g
    assert min(g.degree() for g in gens) == 1


def test_non_reflection_group_is_flagged():
    # rotation by 90 degrees: cyclic of order 4, no reflections
    rd = build_root_datum({"preset": "B", "rank": 2})
    rot = [w for w in rd.weyl_group if w.sign == 1 and len(w.word) == 2]
    group = [w for w in rd.weyl_group if w.sign == 1]
    assert rot and not reflection_generated(group)
    alg = coinvariant_algebra(group)
    assert not alg.is_reflection_group
    assert alg.dim >= len(group)


@pytest.mark.parametrize("datum", [{"preset": "GL", "rank": 3}, {"preset": "B", "rank": 2}])
def test_action_is_a_representation_compatible_with_mult(datum):
    rd = build_root_datum(datum)
    alg = coinvariant_algebra(rd.weyl_group)
    for a in rd.weyl_group:
        ua = alg.action_of(a)
        for b in rd.weyl_group:
            assert alg.action_of(rd.multiply(a, b)) == ua @ alg.action_of(b)
        for i in range(rd.rank):
            h = tuple(int(k == i) for k in range(rd.rank))
            lhs = ua @ alg.mult[i] @ inverse(ua)
            # w(v_i) = sum_j g[j][i] v_j
            assert lhs == alg.mult_form(a.act(h))


def test_truncation_algebra():
    t = truncation_algebra(1, 2)
    assert t.dim == 2 and t.mult[0] == QMatrix([[0, 0], [1, 0]])
    t2 = truncation_algebra(2, 2)
    assert t2.dim == 3 == t2.expected_dim
    n1, n2 = t2.mult
    assert n1 @ n2 == n2 @ n1 == QMatrix.zeros(3, 3)
    t3 = truncation_algebra(2, 4)
    assert t3.dim == 10
    proj = t3.projection(3)
    t_low = truncation_algebra(2, 3)
    for a, b in zip(t3.mult, t_low.mult):
        assert proj @ a == b @ proj


def test_act_on_polynomial_general_matrix(b2):
    x = Polynomial.variable(2, 0)
    for w in b2.weyl_group:
        p = act_on_polynomial(w, x * x + x)
        lin = Polynomial.linear_form([w.matrix[j][0] for j in range(2)])
        assert p == lin * lin + lin
