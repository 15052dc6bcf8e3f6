import itertools

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from gmalab.zmod import Span, howell_form, kernel, quotient_invariants, smith_valuations, solve, valuation

PK = st.sampled_from([(2, 1), (2, 3), (3, 1), (3, 2), (5, 1)])


@st.composite
def matrices(draw, max_rows=3, max_cols=3):
    p, k = draw(PK)
    m = draw(st.integers(0, max_rows))
    n = draw(st.integers(1, max_cols))
    q = p**k
    rows = draw(st.lists(st.lists(st.integers(0, q - 1), min_size=n, max_size=n), min_size=m, max_size=m))
    return p, k, n, np.array(rows, dtype=np.int64).reshape(m, n)


def brute_span(rows, q, n):
    out = {tuple([0] * n)}
    for coeffs in itertools.product(range(q), repeat=len(rows)):
        v = np.zeros(n, dtype=np.int64)
        for c, r in zip(coeffs, rows):
            v = (v + c * r) % q
        out.add(tuple(int(t) for t in v))
    return out


def test_valuation_examples():
    assert valuation(0, 3, 2) == 2
    assert valuation(6, 3, 2) == 1
    assert valuation(4, 2, 3) == 2


def test_howell_form_of_multiple_of_p():
    H, piv = howell_form([[3, 6]], 3, 2)
    assert H.tolist() == [[3, 6]]
    assert piv == [(0, 3)]


def test_howell_form_empty_rows():
    H, piv = howell_form(np.zeros((0, 2), dtype=np.int64), 3, 2, 2)
    assert H.shape == (0, 2) and piv == []


def test_span_order_over_z9():
    S = Span([[3, 0], [0, 1]], 3, 2)
    assert S.order == 27


@given(matrices(max_rows=2, max_cols=2))
def test_span_matches_brute_force(data):
    p, k, n, M = data
    S = Span(M, p, k, n)
    elems = brute_span(M, p**k, n)
    assert S.order == len(elems)
    for v in itertools.product(range(p**k), repeat=n):
        assert S.contains(np.array(v)) == (tuple(v) in elems)


@given(matrices(), matrices())
def test_howell_form_canonical(a, b):
    p, k, n, M = a
    # same span from a shuffled, redundant generating set
    N = np.vstack([M[::-1], (2 * M) % p**k]) if M.size else M
    assert Span(M, p, k, n) == Span(N, p, k, n)


@given(matrices())
def test_kernel_is_exact(data):
    p, k, n, M = data
    q = p**k
    if M.shape[0] == 0:
        return
    K = kernel(M, p, k)
    for r in K.rows:
        assert not (r @ M % q).any()
    # |ker| * |image| = q^m
    image = Span(M, p, k, n)
    assert K.log_order + image.log_order == M.shape[0] * k


@given(matrices())
def test_solve_finds_preimages(data):
    p, k, n, M = data
    q = p**k
    if M.shape[0] == 0:
        return
    x = np.arange(M.shape[0]) % q
    b = x @ M % q
    y = solve(M, b, p, k)
    assert y is not None and np.array_equal(y @ M % q, b)


def test_solve_reports_no_solution():
    assert solve([[3]], [1], 3, 2) is None


def test_smith_and_invariants():
    assert sorted(smith_valuations([[3, 0], [0, 1]], 3, 2)) == [0, 1]
    big = Span.full(3, 2, 2)
    small = Span([[3, 0]], 3, 2)
    assert sorted(quotient_invariants(big, small)) == [3, 9]
