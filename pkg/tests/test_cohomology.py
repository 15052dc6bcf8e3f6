import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gmalab import catalog, errors
from gmalab.cohomology import (
    LocalCondition,
    adjoint_module,
    character_module,
    deformation_from_cocycle,
    exhaustive_h1,
    h0,
    h1,
    hom_order_trivial,
    is_cocycle_values,
    module_of_rep,
    selmer,
    tamagawa_inputs,
    tangent_space,
    torsion_functoriality_check,
    trivial_module,
)
from gmalab.fuzz import characters, random_residual
from gmalab.groups import rep_from_int_matrices, sign_character
from gmalab.pseudochar import strict_conjugator

S3_RESIDUAL = [[[1, 2], [0, 1]], [[2, 1], [0, 1]]]


def sign_module(G, e):
    return module_of_rep(sign_character(G, catalog.truncated(3, e)))


@pytest.mark.parametrize("e", [1, 2, 3])
def test_s3_frozen_values(s3, e):
    sgn = h1(sign_module(s3, e))
    assert (sgn.log_order, sgn.invariants) == (1, [3])
    assert h0(sign_module(s3, e)).log_order == 0
    assert h1(trivial_module(s3, 3, e)).log_order == 0


def test_sign_oracle_counts(s3):
    assert exhaustive_h1(sign_module(s3, 1)) == {"z1": 9, "b1": 3, "h1": 3}
    assert exhaustive_h1(sign_module(s3, 3)) == {"z1": 81, "b1": 27, "h1": 3}


@pytest.mark.parametrize("name,q,expected", [("Z3", 27, 3), ("Z9", 27, 9), ("S3", 9, 1), ("Z6", 9, 3), ("D4", 5, 1)])
def test_trivial_h1_is_hom(name, q, expected):
    G = catalog.named_group(name)
    p = 3 if q % 3 == 0 else 5
    e = {3: 1, 9: 2, 27: 3, 5: 1}[q]
    assert hom_order_trivial(G, q) == expected
    assert h1(trivial_module(G, p, e)).order == expected


def test_cocycle_membership(s3):
    M = sign_module(s3, 1)
    H = h1(M)
    for c in H.cocycles():
        assert is_cocycle_values(M, c)
    bad = np.zeros((6, 1), dtype=np.int64)
    bad[s3.generators[0]] = 1
    assert not is_cocycle_values(M, bad)


def test_selmer_conditions(s3):
    M = sign_module(s3, 1)
    r, s = s3.generators
    # on A3 the sign module is trivial and the class restricts to a nonzero hom
    assert selmer(M, [LocalCondition([r], "zero")]).log_order == 0
    # the transposition has order prime to 3
    assert selmer(M, [LocalCondition([s], "zero")]).log_order == 1
    assert selmer(M, [LocalCondition([r], "full")]).log_order == 1


def test_budget_guard(s3):
    with pytest.raises(errors.BudgetExceeded):
        h1(sign_module(s3, 1), budget=1)


def test_torsion_trivial_z3_realized_identity():
    W = trivial_module(catalog.named_group("Z3"), 3, 3)
    for n in (1, 2):
        rep = torsion_functoriality_check(W, n)
        assert not rep.h0_zero
        assert rep.three_term_identity() and rep.iso
        # H^0(W) = Z/27 so the literal first term is nonzero while H^1(W_n) = Z/3
        assert rep.h1_Wn_log == 1 and rep.naive_first_term_log == n
        assert not rep.literal_identity()


@pytest.mark.parametrize("n", [1, 2])
def test_torsion_sign_z27(s3, n):
    rep = torsion_functoriality_check(sign_module(s3, 3), n)
    assert rep.h0_zero and rep.iso and rep.literal_identity() and rep.three_term_identity()
    assert rep.exact_at_h1_W and rep.exact_at_h1_Wn and rep.orders_balance


def test_torsion_selmer(s3):
    r = s3.generators[0]
    rep = torsion_functoriality_check(sign_module(s3, 3), 1, conditions=[LocalCondition([r], "zero")])
    assert rep.selmer is not None


def test_torsion_rejects_bad_level(s3):
    with pytest.raises(ValueError):
        torsion_functoriality_check(sign_module(s3, 2), 3)


def test_tangent_s3(s3):
    rho0 = rep_from_int_matrices(s3, catalog.prime_field(3), S3_RESIDUAL, blocks=(1, 1))
    t = tangent_space(rho0)
    assert t.dimension == 0 and t.basis == []
    assert t.blocks == {"11": 0, "12": 1, "21": 1, "22": 0}


def test_tangent_d5_gives_a_nontrivial_deformation():
    G = catalog.named_group("D5")
    F5 = catalog.prime_field(5)
    rho = random_residual(G, 5, random.Random(2), allow_split=False).rep(F5)
    t = tangent_space(rho)
    assert t.dimension == 1 and t.upper_triangular_log == 0
    D = catalog.dual_numbers(5)
    const = rho.base_change(D, np.array([[1, 0]]))
    lifted = deformation_from_cocycle(const, t.basis[0], [0, 1], D)
    assert strict_conjugator(lifted, const) is None


def test_tangent_needs_field(s3):
    Z9 = catalog.truncated(3, 2)
    rho = rep_from_int_matrices(s3, Z9, [[[1, -1], [3, -2]], [[-1, 1], [0, 1]]], blocks=(1, 1))
    with pytest.raises(errors.NotAField):
        tangent_space(rho)


def test_tamagawa_flags(s3):
    W = trivial_module(catalog.named_group("Z3"), 3, 3)
    assert tamagawa_inputs(W, inertia=[1]).divisible
    assert not tamagawa_inputs(W).declared
    assert tamagawa_inputs(sign_module(s3, 3), inertia=[s3.generators[1]]).divisible is False


def test_adjoint_h0_is_scalars(s3):
    rho0 = rep_from_int_matrices(s3, catalog.prime_field(3), S3_RESIDUAL, blocks=(1, 1))
    assert h0(adjoint_module(rho0)).log_order == 1


GROUPS = ["Z3", "Z6", "S3", "D4", "D5", "Z9"]


@st.composite
def modules(draw):
    G = catalog.named_group(draw(st.sampled_from(GROUPS)))
    p = draw(st.sampled_from([3, 5]))
    e = draw(st.integers(1, 3 if p == 3 else 2))
    chis = characters(G, p)
    chi = chis[draw(st.integers(0, len(chis) - 1))]
    # Teichmuller lift so the values define a character mod p^e
    q = p**e
    vals = [pow(int(v), q // p, q) for v in chi]
    return character_module(G, p, e, vals)


@given(modules())
def test_three_methods_agree(M):
    a, b = h1(M), h1(M, method="pairs")
    assert a.z1 == b.z1 and a.log_order == b.log_order
    assert M.p ** a.log_order == exhaustive_h1(M)["h1"]


@given(modules(), st.integers(1, 2))
def test_torsion_identities(M, n):
    if n > M.e:
        return
    rep = torsion_functoriality_check(M, n)
    assert rep.three_term_identity() and rep.orders_balance
    assert rep.exact_at_h1_W and rep.exact_at_h1_Wn
    if rep.h0_zero:
        assert rep.iso and rep.literal_identity()
