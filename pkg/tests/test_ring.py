import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gmalab import catalog, errors
from gmalab.ring import (
    BaseRing,
    LocalAlgebra,
    all_ideals,
    annihilator,
    exhaustive_generator_count,
    ideal_from_generators,
    ideal_intersection,
    ideal_product,
    ideal_sum,
    is_gorenstein,
    is_nonzerodivisor,
    is_principal,
    minimal_generators,
    nilradical,
    nilradical_report,
    principal_ideal,
    quotient_algebra,
    reduced_quotient,
    unit_ideal,
    zero_ideal,
)

Z9 = catalog.truncated(3, 2)
EPS = catalog.dual_numbers(3)
EIS = catalog.eisenstein_square(3, 2)  # Z/9[x]/(x^2 - 3x)
PLANE = catalog.square_zero_plane(3)


def el(A, *xs):
    return A.reduce(np.array(xs, dtype=np.int64))


def test_base_ring_rejects_non_primes():
    with pytest.raises(errors.AlgebraError):
        BaseRing(6, 1)


def test_make_algebra_examples():
    assert Z9.max_ideal == principal_ideal(Z9, el(Z9, 3))
    assert EPS.max_ideal == principal_ideal(EPS, el(EPS, 0, 1))
    assert EIS.max_ideal == ideal_from_generators(EIS, [el(EIS, 3, 0), el(EIS, 0, 1)])
    assert EIS.order == 81


def test_locality_by_enumeration():
    # the units of Z/9[x]/(x^2-3x) are exactly the elements with unit constant term
    units = [x for x in EIS.elements() if EIS.is_unit(x)]
    assert len(units) == 81 - 27
    for u in units:
        assert EIS.equal(EIS.mul(u, EIS.inv(u)), EIS.one)


def test_non_associative_structure_rejected():
    c = np.zeros((2, 2, 2), dtype=np.int64)
    c[0, 0, 0] = 1
    c[0, 1, 1] = c[1, 0, 1] = 1
    c[1, 1, 0] = 1  # x^2 = 1 over F3: F3[x]/(x^2-1) is not local
    with pytest.raises(errors.AlgebraError):
        LocalAlgebra(BaseRing(3, 1), c, [1, 0])


def test_ideal_orders():
    assert principal_ideal(Z9, el(Z9, 3)).order == 3
    assert principal_ideal(EPS, el(EPS, 0, 1)).order == 3
    assert principal_ideal(EIS, el(EIS, 0, 1)).order == 9
    assert ideal_from_generators(EIS, []).is_zero()


def test_ideal_arithmetic_examples():
    three = principal_ideal(Z9, el(Z9, 3))
    assert ideal_product(three, three).is_zero()
    Q = quotient_algebra(EIS, principal_ideal(EIS, el(EIS, 0, 1)))
    assert Q.order == 9 and Q.log_order == 2
    e = principal_ideal(EPS, el(EPS, 0, 1))
    assert ideal_sum(e, zero_ideal(EPS)) == e


def test_minimal_generators_examples():
    assert minimal_generators(principal_ideal(Z9, el(Z9, 3))).count == 1
    assert minimal_generators(EIS.max_ideal).count == 2
    assert minimal_generators(zero_ideal(EIS)).count == 0


def test_is_principal_examples():
    ok, g = is_principal(principal_ideal(EPS, el(EPS, 0, 1)))
    assert ok and principal_ideal(EPS, g) == principal_ideal(EPS, el(EPS, 0, 1))
    assert is_principal(EIS.max_ideal) == (False, None)
    assert is_principal(EIS.max_ideal, oracle="exhaustive") == (False, None)
    ok, g = is_principal(unit_ideal(EIS))
    assert ok and EIS.is_unit(g)


def test_nilradical_examples():
    assert nilradical(EPS) == EPS.max_ideal
    assert reduced_quotient(EPS).order == 3
    assert nilradical(Z9) == principal_ideal(Z9, el(Z9, 3))
    assert reduced_quotient(Z9).order == 3
    assert nilradical_report(Z9).truncation_only
    assert not nilradical_report(EPS).truncation_only


def test_annihilator_examples():
    assert annihilator(Z9, principal_ideal(Z9, el(Z9, 3))) == principal_ideal(Z9, el(Z9, 3))
    assert annihilator(EPS, EPS.max_ideal) == EPS.max_ideal
    ann = annihilator(EIS, principal_ideal(EIS, el(EIS, 0, 1)))
    assert ann == principal_ideal(EIS, el(EIS, -3, 1)) and ann.order == 9
    # brute force: c + d x kills x iff c = -3d mod 9
    brute = [x for x in EIS.elements() if EIS.is_zero(EIS.mul(x, el(EIS, 0, 1)))]
    assert len(brute) == 9


def test_gorenstein_examples():
    assert is_gorenstein(EPS)
    assert not is_gorenstein(PLANE)
    assert is_gorenstein(catalog.prime_field(3))


def test_nonzerodivisor_examples():
    assert is_nonzerodivisor(EPS, EPS.one)
    assert not is_nonzerodivisor(EPS, el(EPS, 0, 1))
    assert not is_nonzerodivisor(EIS, el(EIS, 0, 1))


def test_all_ideals_counts():
    assert len(all_ideals(Z9)) == 3
    assert len(all_ideals(EPS)) == 3
    # F3[x,y]/(x,y)^2: 0, four lines in the socle, the socle, and the ring
    assert len(all_ideals(PLANE)) == 1 + 4 + 1 + 1


def test_mismatched_parents():
    with pytest.raises(errors.MismatchedParent):
        ideal_sum(EPS.max_ideal, Z9.max_ideal)


SMALL = [A for A in catalog.algebra_catalog(4)]


@st.composite
def ideal_pairs(draw):
    A = draw(st.sampled_from(SMALL))
    ideals = all_ideals(A)
    return A, draw(st.sampled_from(ideals)), draw(st.sampled_from(ideals))


@given(ideal_pairs())
def test_lattice_laws(data):
    A, I, J = data
    S, P, M = ideal_sum(I, J), ideal_product(I, J), ideal_intersection(I, J)
    assert S == ideal_sum(J, I) and P == ideal_product(J, I)
    assert S.contains_ideal(I) and S.contains_ideal(J)
    assert M.contains_ideal(P)
    assert I.contains_ideal(M) and J.contains_ideal(M)
    # |I + J| |I n J| = |I| |J|
    assert S.log_order + M.log_order == I.log_order + J.log_order


@given(ideal_pairs())
def test_generator_count_matches_exhaustive(data):
    _, I, _ = data
    assert minimal_generators(I).count == exhaustive_generator_count(I)
    assert is_principal(I)[0] == is_principal(I, oracle="exhaustive")[0]


@given(ideal_pairs())
def test_annihilator_property(data):
    A, I, _ = data
    ann = annihilator(A, I)
    assert ideal_product(ann, I).is_zero()
