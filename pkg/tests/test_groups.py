import random

import numpy as np
import pytest

from gmalab import catalog, errors
from gmalab.groups import (
    assemble_extension,
    centralizer,
    check_self_dual,
    cocycle_from_generators,
    direct_sum,
    group_from_matrix_generators,
    group_from_table,
    hom_action,
    is_absolutely_irreducible,
    is_split,
    make_involution,
    rep_from_int_matrices,
    sign_character,
    square_zero_lifts,
    trivial_rep,
)
from gmalab.ring import mat_identity

F3 = catalog.prime_field(3)


def s3_rho0(G, f_r=1):
    """``[[1, f], [0, sign]]`` over F3 from the cocycle values on the generators."""
    one, sgn = trivial_rep(G, F3), sign_character(G, F3)
    act = hom_action(one, sgn)
    c = cocycle_from_generators(G, act, [[f_r], [0]])
    return assemble_extension(one, sgn, c.reshape(G.order, 1, 1, 1)), one, sgn


def test_group_from_table_z3():
    G = group_from_table([[0, 1, 2], [1, 2, 0], [2, 0, 1]])
    assert G.order == 3


def test_group_table_rejects_latin_square_violation():
    with pytest.raises(errors.NotAGroup):
        group_from_table([[0, 1], [0, 1]])


def test_permutation_matrices_give_s3():
    cyc = [[0, 0, 1], [1, 0, 0], [0, 1, 0]]
    swap = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
    assert group_from_matrix_generators(5, 3, [cyc, swap]).order == 6


def test_sl2_f3_order():
    assert catalog.named_group("SL2(F3)").order == 24


@pytest.mark.parametrize(
    "name,order", [("S3", 6), ("S4", 24), ("D4", 8), ("D5", 10), ("Q8", 8), ("Z7:Z3", 21), ("Z5:Z4", 20), ("Z3:Z4", 12)]
)
def test_named_group_orders(name, order):
    assert catalog.named_group(name).order == order


def test_characters_of_s3(s3):
    triv = trivial_rep(s3, F3)
    assert all(F3.equal(m[0, 0], F3.one) for m in triv.images)
    sgn = sign_character(s3, F3)
    r, s = s3.generators
    assert int(sgn.images[r][0, 0][0]) == 1 and int(sgn.images[s][0, 0][0]) == 2


def test_rho0_is_valid_and_nonsplit(s3):
    rho0, _, _ = s3_rho0(s3)
    assert rho0.degree == 2 and rho0.blocks == (1, 1)
    assert not is_split(rho0, 1)
    assert not is_absolutely_irreducible(rho0)


def test_zero_and_coboundary_extensions_split(s3):
    rho, one, sgn = s3_rho0(s3, f_r=0)
    assert is_split(rho, 1)
    # f_m(g) = m - chi(g) m with chi the action of Hom(sign, 1)
    act = hom_action(one, sgn)
    m = np.array([1])
    cob = np.array([(m - act[g] @ m) % 3 for g in range(s3.order)])
    assert is_split(assemble_extension(one, sgn, cob.reshape(s3.order, 1, 1, 1)), 1)


def test_non_cocycle_rejected(s3):
    one, sgn = trivial_rep(s3, F3), sign_character(s3, F3)
    bad = np.ones((s3.order, 1, 1, 1), dtype=np.int64)
    with pytest.raises(errors.NotACocycle):
        assemble_extension(one, sgn, bad)


def test_irreducibility_examples(s3):
    assert is_absolutely_irreducible(sign_character(s3, F3))
    F5 = catalog.prime_field(5)
    plane = rep_from_int_matrices(s3, F5, [[[0, -1], [1, -1]], [[0, 1], [1, 0]]])
    assert is_absolutely_irreducible(plane)


def test_centralizer_examples(s3):
    rho0, one, sgn = s3_rho0(s3)
    assert centralizer(rho0).dimension == 1
    assert centralizer(direct_sum(one, sgn)).dimension == 2
    assert centralizer(trivial_rep(s3, F3, 2)).dimension == 4


def test_involutions(s3):
    rho0, one, sgn = s3_rho0(s3)
    tau = make_involution(s3, F3, "inverse")
    assert check_self_dual(direct_sum(one, sgn).traces, tau)
    twisted = make_involution(s3, F3, "twisted", chi=sgn)
    T = rho0.traces
    expected = all(
        F3.equal(T[g], F3.mul(F3.inv(sgn.traces[g]), T[s3.inverse[g]])) for g in range(s3.order)
    )
    assert check_self_dual(T, twisted) == expected
    c = s3.generators[1]
    assert make_involution(s3, F3, "conjugate_inverse", c=c).kind.startswith("conjugate_inverse")
    with pytest.raises(errors.InvalidOrderTwoElement):
        make_involution(s3, F3, "conjugate_inverse", c=s3.generators[0])


def test_non_homomorphism_rejected(s3):
    with pytest.raises(errors.RelationViolated):
        rep_from_int_matrices(s3, F3, [[[1, 1], [0, 1]], [[1, 1], [0, 1]]])


def test_square_zero_lifts_are_representations(s3):
    D = catalog.dual_numbers(3)
    space = square_zero_lifts(s3, D, [[[1, 2], [0, 1]], [[2, 1], [0, 1]]])
    assert space.exists
    rng = random.Random(0)
    for _ in range(3):
        rho = space.random_lift(rng)
        assert rho.degree == 2  # construction re-checks the homomorphism property
        assert np.array_equal(rho.images[s3.identity], mat_identity(D, 2))


def test_lift_obstruction_detected():
    # the D5 residual [[chi, *], [0, 1]] mod 5 does not lift to Z/25
    from gmalab.fuzz import random_residual

    G = catalog.named_group("D5")
    res = random_residual(G, 5, random.Random(0), allow_split=False)
    rbar = res.rep(catalog.prime_field(5))
    space = square_zero_lifts(G, catalog.truncated(5, 2), [m[..., 0] for m in rbar.generator_images()])
    assert not space.exists
