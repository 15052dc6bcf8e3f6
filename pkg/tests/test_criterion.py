import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gmalab import catalog, errors
from gmalab.criterion import (
    AlgebraHom,
    augmentation,
    check_cri1,
    cons1_skeleton,
    congruence_data,
    generated_subalgebra,
    identity_hom,
    is_free,
    projection_hom,
    structure_surjectivity_check,
    trace_generation_check,
    wiles_lenstra_data,
)
from gmalab.demos import CRI1_NEGATIVE, CRI1_POSITIVE, S3_STANDARD, WL_FIXTURES, _cri1_instance
from gmalab.fuzz import fuzz_criterion, random_criterion_instance
from gmalab.groups import rep_from_int_matrices
from gmalab.pseudochar import reducibility_ideal_of, trace_pseudocharacter
from gmalab.ring import ideal_from_generators, principal_ideal, zero_ideal


def elements_of(A):
    return [A.reduce(x) for x in A.elements()]


def brute_kernel_size(phi):
    S = phi.target
    return sum(1 for x in elements_of(phi.source) if not S.reduce(phi(x)).any())


def brute_quotient_size(R, gens):
    """|R / (gens)| by closing the ideal under multiplication, element by element."""
    elems = elements_of(R)
    seen = {R.reduce(np.zeros(R.rank, dtype=np.int64)).tobytes()}
    frontier = [R.reduce(R.mul(a, g)) for g in gens for a in elems]
    ideal = {x.tobytes(): x for x in frontier}
    changed = True
    while changed:
        changed = False
        for x in list(ideal.values()):
            for y in list(ideal.values()):
                s = R.reduce(x + y)
                if s.tobytes() not in ideal:
                    ideal[s.tobytes()] = s
                    changed = True
    seen |= set(ideal)
    return len(elems) // len(seen)


@pytest.mark.parametrize("label,rname,kernel,pi", CRI1_POSITIVE, ids=[c[0] for c in CRI1_POSITIVE])
def test_positive_fixtures(label, rname, kernel, pi):
    R, phi, x = _cri1_instance(rname, kernel, pi)
    rep = check_cri1(R, phi.target, phi, x)
    assert rep.implication_claimed and rep.bijective and rep.consistent
    assert rep.inequality_holds
    assert brute_kernel_size(phi) == 1


@pytest.mark.parametrize("label,rname,kernel,pi,broken", CRI1_NEGATIVE, ids=[c[0] for c in CRI1_NEGATIVE])
def test_negative_fixtures(label, rname, kernel, pi, broken):
    R, phi, x = _cri1_instance(rname, kernel, pi)
    rep = check_cri1(R, phi.target, phi, x)
    assert rep.violated == [broken]
    assert not rep.implication_claimed and rep.consistent


def test_levels_match_brute_force():
    R, phi, x = _cri1_instance("Z/9[x]/(x^2-3x)", None, [0, 1])
    rep = check_cri1(R, R, phi, x)
    for lvl in rep.levels[:3]:
        n = lvl["n"]
        xn = R.scalar(1)
        for _ in range(n):
            xn = R.mul(xn, x)
        assert R.p ** lvl["R_mod_pi_n_log"] == brute_quotient_size(R, [xn])


def test_planted_square_zero_case():
    # F3[eps] -> F3 with pi = eps: R/pi is full level but the square map fails
    F3e = catalog.dual_numbers(3)
    phi = projection_hom(F3e, ideal_from_generators(F3e, [np.array([0, 1])]))
    rep = check_cri1(F3e, phi.target, phi, np.array([0, 1]))
    assert rep.hypotheses["H2b_full_level_cyclic"] and not rep.hypotheses["H2b_square_map_iso"]
    assert not rep.implication_claimed and not rep.bijective


def test_bad_homs_rejected():
    Z9, F3 = catalog.truncated(3, 2), catalog.prime_field(3)
    with pytest.raises(errors.NotAlgebraHom):
        AlgebraHom(Z9, F3, [[1]])
    eps = catalog.dual_numbers(3)
    with pytest.raises(errors.NotAlgebraHom):
        AlgebraHom(eps, eps, [[2, 0], [0, 1]])  # not unital
    with pytest.raises(errors.NotSurjective):
        AlgebraHom(eps, eps, [[1, 0], [0, 0]])
    with pytest.raises(errors.NotAlgebraHom):
        check_cri1(eps, eps, identity_hom(Z9), np.array([1]))


def test_wl_fixtures():
    for label, rname, kernel, aug, aug_S, phi_order, eta_order, claim in WL_FIXTURES:
        R = catalog.named_algebra(rname) if rname != "Z/9[eps]" else catalog.dual_numbers(3, 2)
        phi = identity_hom(R) if kernel is None else projection_hom(R, ideal_from_generators(R, [np.array(k) for k in kernel]))
        piR = augmentation(R, aug)
        piS = piR if kernel is None else augmentation(phi.target, aug_S)
        w = wiles_lenstra_data(R, phi.target, phi, piR, piS)
        assert (R.p**w.phi_R_log, R.p**w.eta_log, w.implication_claimed) == (phi_order, eta_order, claim), label
        assert w.consistent


def test_congruence_module_brute_force():
    R = catalog.named_algebra("Z/27[x]/(x^2-3x)")
    phi_log, eta_log, I = congruence_data(augmentation(R, [1, 0]))
    # I = (x), I^2 = (x^2) = (3x), so I/I^2 = Z/3
    assert brute_quotient_size(R, [np.array([0, 1])]) == 27
    assert phi_log == 1 and eta_log == 1
    assert I == principal_ideal(R, np.array([0, 1]))


def test_diagram_must_commute():
    R = catalog.named_algebra("Z/27[x]/(x^2-3x)")
    with pytest.raises(errors.DiagramNotCommuting):
        wiles_lenstra_data(R, R, identity_hom(R), augmentation(R, [1, 0]), augmentation(R, [1, 3]))


def test_structure_checks():
    A27 = catalog.truncated(3, 3)
    rho = rep_from_int_matrices(catalog.named_group("S3"), A27, S3_STANDARD, blocks=(1, 1))
    I = reducibility_ideal_of(trace_pseudocharacter(rho))
    assert I == principal_ideal(A27, A27.scalar(3))
    st_ = structure_surjectivity_check(A27, I)
    assert st_.cyclic and st_.s == 1
    eps = catalog.dual_numbers(3)
    bad = structure_surjectivity_check(eps, zero_ideal(eps))
    assert not bad.cyclic and bad.witness == [0, 1]
    assert trace_generation_check(rho).generated


def test_generated_subalgebra():
    eps = catalog.dual_numbers(3, 2)
    assert generated_subalgebra(eps, []).log_order - eps.relations.log_order == 2
    assert generated_subalgebra(eps, [np.array([0, 1])]).log_order - eps.relations.log_order == 4


def test_freeness():
    assert is_free(catalog.dual_numbers(3, 2))
    assert is_free(catalog.named_algebra("Z/9[x]/(x^2-3x)"))
    Z9 = catalog.truncated(3, 2)
    assert not is_free(projection_hom(Z9, principal_ideal(Z9, Z9.scalar(3))).target)


def test_cons1_skeleton():
    R = catalog.truncated(3, 3)
    out = cons1_skeleton(R, R, identity_hom(R), R.scalar(3))
    assert out["structure_R"]["s"] == 1 and out["consistent"]


@given(st.integers(0, 10_000))
def test_random_instances_consistent_or_triaged(seed):
    R, S, phi, pi = random_criterion_instance(random.Random(seed), max_log=3)
    rep = check_cri1(R, S, phi, pi)
    assert rep.inequality_holds
    assert not rep.untriaged_violation
    assert rep.bijective == (brute_kernel_size(phi) == 1)
    if rep.implication_claimed:
        assert rep.hypotheses["H1_phi1_iso"]


def test_fuzz_criterion_is_deterministic():
    a, b = fuzz_criterion(15, 3), fuzz_criterion(15, 3)
    assert a == b and not a["violations"]
