import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gmalab import catalog, errors
from gmalab.fuzz import random_gma_instance, random_residual, residual_involution
from gmalab.groups import (
    assemble_extension,
    direct_sum,
    hom_action,
    cocycle_from_generators,
    regular_rep,
    rep_from_int_matrices,
    sign_character,
    square_zero_lifts,
    trivial_rep,
    make_involution,
)
from gmalab.pseudochar import (
    Pseudocharacter,
    analyze,
    block_triangularize,
    cayley_hamilton_quotient,
    compare_kernels,
    faithful_quotient,
    irreducible_pseudocharacter,
    kernel_of_rho,
    kernel_of_T,
    lift_idempotents,
    newton_lift,
    nonzerodivisor_check,
    principality_certificate,
    reducibility_ideal,
    residual_idempotents,
    smallest_splitting_ideal,
    splits_mod,
    trace_pseudocharacter,
    verify_minimality,
)
from gmalab.ring import all_ideals, is_principal, principal_ideal, zero_ideal
from gmalab.zmod import Span

F3, F5 = catalog.prime_field(3), catalog.prime_field(5)
S3_STANDARD = [[[1, -1], [3, -2]], [[-1, 1], [0, 1]]]
D4_PLANE = [[[0, -1], [1, 0]], [[1, 0], [0, -1]]]


def rho0(G, f_r=1):
    one, sgn = trivial_rep(G, F3), sign_character(G, F3)
    c = cocycle_from_generators(G, hom_action(one, sgn), [[f_r], [0]])
    return assemble_extension(one, sgn, c.reshape(G.order, 1, 1, 1))


def test_trace_of_rho0(s3):
    T = trace_pseudocharacter(rho0(s3))
    r, s = s3.generators
    assert [int(T(s3.identity)[0]), int(T(r)[0]), int(T(s)[0])] == [2, 2, 0]


def test_trace_of_character_is_itself(s3):
    sgn = sign_character(s3, F3)
    assert np.array_equal(trace_pseudocharacter(sgn, blocks=None).values, sgn.images[:, 0, 0])


def test_trace_of_s3_plane_mod_5(s3):
    rho = rep_from_int_matrices(s3, F5, [[[0, -1], [1, -1]], [[0, 1], [1, 0]]])
    r, s = s3.generators
    assert int(rho.traces[r][0]) == 4 and int(rho.traces[s][0]) == 0


def test_non_central_values_rejected(s3):
    vals = np.zeros((6, 1), dtype=np.int64)
    vals[s3.identity] = 2
    vals[s3.generators[0]] = 1  # r and r^2 are conjugate, so T must agree on them
    with pytest.raises(errors.AlgebraError):
        Pseudocharacter(s3, F3, vals, 2)


def test_kernel_examples():
    Z3 = catalog.named_group("Z3")
    reg = regular_rep(Z3, F5)
    assert kernel_of_T(Pseudocharacter(Z3, F5, reg.traces, 3)).ker_T.is_zero()
    assert kernel_of_rho(reg).is_zero() and compare_kernels(reg).equal
    T2 = Pseudocharacter(Z3, F3, [F3.scalar(2)] * 3, 2)
    ker = kernel_of_T(T2).ker_T
    aug = Span([[1, 2, 0], [0, 1, 2]], 3, 1)
    assert ker == aug
    assert kernel_of_rho(trivial_rep(Z3, F3)) == aug


def test_kernels_for_rho0(s3):
    rep = compare_kernels(rho0(s3))
    assert rep.ker_rho_log <= rep.ker_T_log


def test_faithful_quotients():
    Z3 = catalog.named_group("Z3")
    S = faithful_quotient(None, Span.zero(5, 1, 3), G=Z3, A=F5)
    assert S.log_order == 3
    aug = Span([[1, 4, 0], [0, 1, 4]], 5, 1)
    assert faithful_quotient(None, aug, G=Z3, A=F5).log_order == 1


def test_newton_step_in_z9():
    Z1 = catalog.named_group("Z1")
    Z9 = catalog.truncated(3, 2)
    S = faithful_quotient(None, Span.zero(3, 2, 1), G=Z1, A=Z9)
    assert newton_lift(S, np.array([4])).tolist() == [1]
    # exhaustive list of idempotents of Z/9
    assert [x for x in range(9) if x * x % 9 == x] == [0, 1]


def test_idempotent_is_fixed_by_newton(s3):
    D4 = catalog.named_group("D4")
    rho = rep_from_int_matrices(D4, F3, D4_PLANE)
    T = irreducible_pseudocharacter(rho)
    gma = analyze(T)
    assert gma.S.log_order == 4  # M2(F3)
    assert np.array_equal(newton_lift(gma.S, gma.e1), gma.e1)


def test_rho0_idempotents(s3):
    gma = analyze(trace_pseudocharacter(rho0(s3)))
    assert gma.checks["trace_e1"] and gma.checks["trace_e2"]
    assert all(gma.checks.values())
    assert gma.small_corners[(1, 2)].generators <= 1


def test_zero_residual_idempotent_rejected(s3):
    T = trace_pseudocharacter(rho0(s3))
    S = cayley_hamilton_quotient(T)
    with pytest.raises(errors.NotResidualIdempotent):
        lift_idempotents(S, S.unit, np.zeros_like(S.unit), residual=T.residual)


def test_reducibility_ideal_examples(s3):
    D4 = catalog.named_group("D4")
    T = irreducible_pseudocharacter(rep_from_int_matrices(D4, F3, D4_PLANE))
    assert reducibility_ideal(analyze(T)).is_unit_ideal()
    split = direct_sum(trivial_rep(s3, F3), sign_character(s3, F3))
    split.blocks = (1, 1)
    assert reducibility_ideal(analyze(trace_pseudocharacter(split))).is_zero()


def test_s3_f3eps_deformations_have_zero_ideal(s3):
    # ad rho0 has no H^1, so every lift to F3[eps] is trivial and I_T = 0
    D = catalog.dual_numbers(3)
    space = square_zero_lifts(s3, D, [[[1, 2], [0, 1]], [[2, 1], [0, 1]]])
    rho = space.random_lift(random.Random(3), blocks=(1, 1))
    T = trace_pseudocharacter(rho)
    I = reducibility_ideal(analyze(T))
    assert I.is_zero() and smallest_splitting_ideal(T).smallest == I


def test_d5_eps_deformation_matches_brute_force():
    G = catalog.named_group("D5")
    rng = random.Random(4)
    res = random_residual(G, 5, rng, allow_split=False)
    A = catalog.dual_numbers(5)
    rbar = res.rep(F5)
    space = square_zero_lifts(G, A, [m[..., 0] for m in rbar.generator_images()])
    seen = set()
    for _ in range(6):
        rho = space.random_lift(rng, blocks=(1, 1))
        T = trace_pseudocharacter(rho)
        I = reducibility_ideal(analyze(T))
        assert smallest_splitting_ideal(T).smallest == I
        assert verify_minimality(T, I)
        seen.add(I.log_order)
    assert 1 in seen  # some lift has I_T = (eps)


def test_minimality_examples(s3):
    split = direct_sum(trivial_rep(s3, F3), sign_character(s3, F3))
    split.blocks = (1, 1)
    T = trace_pseudocharacter(split)
    assert verify_minimality(T, zero_ideal(F3))
    D4 = catalog.named_group("D4")
    Tm = irreducible_pseudocharacter(rep_from_int_matrices(D4, F3, D4_PLANE))
    I = reducibility_ideal(analyze(Tm))
    assert verify_minimality(Tm, I)
    assert not splits_mod(Tm, zero_ideal(F3))


def test_minimality_guard():
    A = catalog.truncated_poly(3, 2, 4)  # |A| = 3^8
    G = catalog.named_group("S3")
    rho = rep_from_int_matrices(G, A, S3_STANDARD, blocks=(1, 1))
    with pytest.raises(errors.TooLargeForExhaustion):
        verify_minimality(trace_pseudocharacter(rho), zero_ideal(A))


def test_certificates(s3):
    split = direct_sum(trivial_rep(s3, F3), sign_character(s3, F3))
    split.blocks = (1, 1)
    gma = analyze(trace_pseudocharacter(split))
    assert not principality_certificate(gma).generator.any()
    Z9 = catalog.truncated(3, 2)
    rho = rep_from_int_matrices(s3, Z9, S3_STANDARD, blocks=(1, 1))
    T = trace_pseudocharacter(rho)
    tau = make_involution(s3, Z9, "inverse")
    gma = analyze(T, tau=tau)
    cert = principality_certificate(gma, T, tau)
    I = reducibility_ideal(gma)
    assert cert.route == "involution" and principal_ideal(Z9, cert.generator) == I
    assert is_principal(I)[0]


def test_not_self_dual_rejected(s3):
    Z9 = catalog.truncated(3, 2)
    rho = rep_from_int_matrices(s3, Z9, S3_STANDARD, blocks=(1, 1))
    tau = make_involution(s3, Z9, "twisted", chi=sign_character(s3, Z9))
    T = trace_pseudocharacter(rho)
    assert not T.is_self_dual(tau)
    with pytest.raises(errors.NotSelfDual):
        analyze(T, tau=tau)


def test_block_triangularize_examples(s3):
    rho = rho0(s3)
    tri = block_triangularize(rho, F3.max_ideal)
    assert tri.success and tri.conjugator is not None
    assert np.array_equal(tri.conjugator[..., 0], np.eye(2, dtype=np.int64))
    Z9 = catalog.truncated(3, 2)
    std = rep_from_int_matrices(s3, Z9, S3_STANDARD, blocks=(1, 1))
    fail = block_triangularize(std, zero_ideal(Z9))
    assert not fail.success and fail.layer == 1


def test_nonzerodivisor_examples():
    eps = catalog.dual_numbers(3)
    eis = catalog.eisenstein_square(3, 2)
    assert nonzerodivisor_check(eps, eps.one)
    assert not nonzerodivisor_check(eps, np.array([0, 1]))
    assert not nonzerodivisor_check(eis, np.array([0, 1]))


def test_trace_ignores_extension_class(s3):
    one, sgn = trivial_rep(s3, F3), sign_character(s3, F3)
    act = hom_action(one, sgn)
    traces = set()
    for f in range(3):
        c = cocycle_from_generators(s3, act, [[f], [0]])
        traces.add(assemble_extension(one, sgn, c.reshape(6, 1, 1, 1)).traces.tobytes())
    assert len(traces) == 1


@given(st.integers(0, 10_000))
def test_gma_invariants_on_random_instances(seed):
    inst = random_gma_instance(random.Random(seed))
    T = trace_pseudocharacter(inst.rho)
    tau = inst.tau if inst.tau is not None and T.is_self_dual(inst.tau) else None
    gma = analyze(T, tau=tau, rng=random.Random(seed))
    assert all(gma.checks.values())
    I = reducibility_ideal(gma)
    # independent of the idempotent lift
    assert reducibility_ideal(analyze(T, tau=tau, rng=random.Random(seed + 1))) == I
    if tau is not None:
        cert = principality_certificate(gma, T, tau)
        assert principal_ideal(T.algebra, cert.generator) == I
        assert is_principal(I)[0]
    A = T.algebra
    for J in all_ideals(A):
        assert block_triangularize(inst.rho, J).success == J.contains_ideal(I)


def test_residual_involution_fixes_blocks():
    G = catalog.named_group("D5")
    rng = random.Random(2)
    res = random_residual(G, 5, rng, allow_split=False)
    rho = res.rep(catalog.truncated(5, 1))
    tau = residual_involution(rho, res)
    assert tau is not None
    assert trace_pseudocharacter(rho, blocks=(1, 1)).is_self_dual(tau)


def test_residual_idempotents_sum_to_one(s3):
    T = trace_pseudocharacter(rho0(s3))
    S = cayley_hamilton_quotient(T)
    e1, e2 = residual_idempotents(S, T.residual)
    assert S.equal(S.add(e1, e2), S.unit)
