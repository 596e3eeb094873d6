import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mellingamma.exactalg import QMatrix
from mellingamma.mellin import (
    EquivariantStructure,
    ModuleInvariantError,
    MonodromicModule,
    direct_sum,
    e_theta_module,
    e_xi_module,
    intertwiners,
    iso_search,
    kummer_module,
    tensor,
    tor,
    unipotent_module,
    unipotent_projection,
    verify_morphism,
)
from mellingamma.rootdata import TorusPoint
from mellingamma.suite import random_module

H = Fraction(1, 2)


def test_kummer_modules():
    assert kummer_module([0]).nu == (QMatrix([[0]]),)
    assert kummer_module([H]).nu == (QMatrix([[H]]),)
    k = kummer_module(TorusPoint((Fraction(1, 3), Fraction(2, 3))))
    assert k.dim == 1 and k.nu == (QMatrix([[Fraction(1, 3)]]), QMatrix([[Fraction(2, 3)]]))


def test_unipotent_modules():
    assert unipotent_module([0], 2).nu == (QMatrix([[0, 0], [1, 0]]),)
    assert unipotent_module([H], 1) == kummer_module([H])
    u = unipotent_module([0, 0], 2)
    assert u.dim == 3
    n1, n2 = u.nu
    assert n1 @ n2 == n2 @ n1 == QMatrix.zeros(3, 3)


def test_tower_projection_commutes():
    for n in range(2, 5):
        proj = unipotent_projection(2, n)
        hi, lo = unipotent_module([H, 0], n), unipotent_module([H, 0], n - 1)
        assert verify_morphism(proj, hi, lo).passed


def test_invariants_are_enforced():
    with pytest.raises(ModuleInvariantError):
        MonodromicModule((0,), (QMatrix([[1]]),)).validate()
    bad = MonodromicModule((0, 0), (QMatrix([[0, 1], [0, 0]]), QMatrix([[0, 0], [1, 0]])))
    assert any("N_1 N_2" in f for f in bad.invariant_failures())
    with pytest.raises(ModuleInvariantError):
        kummer_module([0]).shifted_to([H])


def test_shift_is_canonical():
    m = unipotent_module([H], 2)
    s = m.shifted_to([Fraction(5, 2)])
    assert s.nu[0] == m.nu[0] + QMatrix.scalar(2, 2)
    assert s.shifted_to([H]) == m


def test_e_xi_gl2(gl2):
    m, s = e_xi_module(gl2, TorusPoint((0, 0)))
    assert m.dim == 2
    swap = gl2.weyl_group[1]
    assert s.u_of(swap) == QMatrix([[1, 0], [0, -1]])
    assert not s.contract_failures() and not s.cocycle_failures(gl2)


def test_e_xi_trivial_stabilizer(gl2):
    xi = TorusPoint((Fraction(1, 3), Fraction(2, 3)))
    m, s = e_xi_module(gl2, xi)
    assert m == kummer_module(xi)
    assert len(s.group) == 1


def test_e_xi_half_half_fixed_representative(gl2):
    m, s = e_xi_module(gl2, TorusPoint((H, H)))
    swap = gl2.weyl_group[1]
    assert swap.act_dual(m.coset_rep) == m.coset_rep
    assert m.dim == 2 and not s.contract_failures()


def test_contract_detects_wrong_structure(gl2):
    m, s = e_xi_module(gl2, TorusPoint((0, 0)))
    swap = gl2.weyl_group[1]
    fake = EquivariantStructure(m, s.group, {**s.u, swap.matrix: QMatrix.identity(2)})
    assert fake.contract_failures()


def test_contract_with_integral_shift(gl2):
    # representative (0, 1): the swap moves it by (1, -1)
    m, s = e_xi_module(gl2, TorusPoint((0, 1)))
    assert not s.contract_failures()
    assert not s.cocycle_failures(gl2)


def test_e_theta_examples(gl2, gl3):
    assert len(e_theta_module(gl2, TorusPoint((0, 0))).components) == 1
    e = e_theta_module(gl2, TorusPoint((Fraction(1, 3), Fraction(2, 3))))
    assert [c.dim for c in e.components] == [1, 1]
    swap = gl2.weyl_group[1]
    assert e.blocks[swap.matrix][0] == (1, 0)
    e3 = e_theta_module(gl3, TorusPoint((0, 0, H)))
    assert [c.dim for c in e3.components] == [2, 2, 2] and e3.dim == 6
    assert not e3.contract_failures() and not e3.cocycle_failures(gl3)


def test_tensor_examples():
    k0, kh = kummer_module([0]), kummer_module([H])
    assert tensor(kh, kh) == kh
    assert tensor(k0, kh).dim == 0
    assert tensor(unipotent_module([0], 2), k0).dim == 1


def test_tor_examples():
    assert tor(kummer_module([0]), kummer_module([0])) == (1, 1)
    assert tor(kummer_module([0, 0]), kummer_module([0, 0])) == (1, 2, 1)
    assert tor(kummer_module([0] * 3), kummer_module([0] * 3)) == (1, 3, 3, 1)
    assert tor(kummer_module([0, 0]), kummer_module([H, 0])) == (0, 0, 0)


@given(st.integers(0, 10**6), st.integers(1, 2))
def test_tor0_agrees_with_tensor(seed, n):
    rng = random.Random(seed)
    rep = tuple(rng.choice([0, H]) for _ in range(n))
    a = random_module(rng, rep, rng.randint(1, 3))
    b = random_module(rng, rep, rng.randint(1, 3))
    assert tor(a, b)[0] == tensor(a, b).dim


@given(st.integers(0, 10**6), st.lists(st.integers(-3, 3), min_size=2, max_size=2))
def test_descent_soundness(seed, lam):
    rng = random.Random(seed)
    rep = (Fraction(1, 3), 0)
    a = random_module(rng, rep, rng.randint(1, 3))
    b = random_module(rng, rep, rng.randint(1, 3))
    a2 = a.shifted_to(tuple(x + l for x, l in zip(rep, lam)))
    assert tor(a2, b) == tor(a, b)
    assert tensor(a2, b).dim == tensor(a, b).dim


@given(st.integers(0, 10**6))
def test_tor_vanishing_transfers_from_unipotent(seed):
    rng = random.Random(seed)
    n = rng.choice((1, 2))
    xi = tuple(rng.choice((0, H)) for _ in range(n))
    rep = tuple(rng.choice((0, H, Fraction(1, 3))) for _ in range(n))
    F = random_module(rng, rep, rng.randint(1, 4))
    L = unipotent_module(xi, rng.randint(1, 3))
    if not any(tor(L, F)):
        assert not any(tor(kummer_module(xi), F))


def test_verify_morphism():
    k = kummer_module([H])
    assert verify_morphism(QMatrix.identity(1), k, k).passed
    u = unipotent_module([0], 2)
    rep = verify_morphism(QMatrix([[1, 2], [3, 4]]), u, u)
    assert not rep.passed and rep.failures == ["f N_1 != N_1 f"]
    assert not verify_morphism(QMatrix([[1]]), kummer_module([0]), k).passed
    assert not verify_morphism(QMatrix.identity(2), k, k).passed


def test_verify_morphism_with_structures(gl2):
    m, s = e_xi_module(gl2, TorusPoint((0, 0)))
    swap = gl2.weyl_group[1]
    # u(swap) is a morphism from M to the pullback of M along the swap
    pulled = MonodromicModule(m.coset_rep, tuple(m.N(swap.act(h)) for h in ((1, 0), (0, 1))))
    assert verify_morphism(s.u_of(swap), m, pulled).passed
    assert not verify_morphism(s.u_of(swap), m, m).passed
    assert verify_morphism(QMatrix.identity(2), m, m, (s, s)).passed
    assert not verify_morphism(QMatrix([[1, 0], [1, 1]]), m, m, (s, s)).passed


def test_iso_search_examples():
    u = unipotent_module([0], 2)
    res = iso_search(u, u)
    assert res.status == "found"
    assert verify_morphism(res.matrix, u, u).passed
    assert iso_search(kummer_module([0]), kummer_module([H])).status == "none (certified)"
    res = iso_search(u, direct_sum(kummer_module([0]), kummer_module([0])))
    assert res.status == "no certificate" and res.intertwiner_dim == 2
    assert res.generic_determinant_zero is True


def test_iso_search_across_representatives():
    a = unipotent_module([H], 2)
    b = a.shifted_to([Fraction(-1, 2)])
    res = iso_search(a, b)
    assert res.status == "found"
    assert len(intertwiners(a, b)) == 2


def test_json_round_trip():
    m = unipotent_module([H, Fraction(1, 3)], 2)
    data = m.to_json()
    assert data["coset_rep"] == ["1/2", "1/3"] and data["dim"] == 3
    assert MonodromicModule.from_json(data) == m


def test_structure_json(gl2):
    _, s = e_xi_module(gl2, TorusPoint((0, 0)))
    data = s.to_json()
    assert set(data) == {"module", "group", "u"}
    assert data["u"][1] == [["1", "0"], ["0", "-1"]]
