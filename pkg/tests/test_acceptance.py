"""Acceptance gate: one PASS/FAIL line per criterion.

Each test records its verdict in ``RESULTS``; the lines are printed at the
end of the pytest run (see ``conftest.py``) and when this file is run as a
script.
"""

import io
import itertools
import random
import time
from contextlib import redirect_stdout

import numpy as np
import pytest

from gmalab import catalog
from gmalab.cli import main
from gmalab.cohomology import character_module, exhaustive_h1, h1, h0, module_of_rep, torsion_functoriality_check, trivial_module
from gmalab.demos import D4_PLANE, S3_STANDARD
from gmalab.demos import cri1_suite, wl_suite
from gmalab.fuzz import GMA_FAMILIES, ResidualData, characters, extension_classes, fuzz_gma, random_gma_instance
from gmalab.groups import centralizer, is_absolutely_irreducible, rep_from_int_matrices, sign_character
from gmalab.pseudochar import (
    analyze,
    block_triangularize,
    reducibility_ideal,
    smallest_splitting_ideal,
    trace_pseudocharacter,
)
from gmalab.ring import all_ideals, exhaustive_generator_count, is_principal, minimal_generators

RESULTS = {}


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"


def summary_lines() -> list:
    return [RESULTS[k] for k in sorted(RESULTS)]


def test_criterion_1_s3_cohomology():
    G = catalog.named_group("S3")
    F3 = catalog.prime_field(3)
    start = time.perf_counter()
    sign = module_of_rep(sign_character(G, F3))
    triv = trivial_module(G, 3, 1)
    lin = (len(h1(sign).invariants), len(h1(triv).invariants))
    oracle = (exhaustive_h1(sign)["h1"], exhaustive_h1(triv)["h1"])
    elapsed = time.perf_counter() - start
    ok = lin == (1, 0) and oracle == (3, 1) and elapsed < 1.0
    record(1, ok, f"dim H1(sign) = {lin[0]}, dim H1(trivial) = {lin[1]}, oracle orders {oracle}, {elapsed:.3f}s")
    assert ok


def test_criterion_2_gma_principality():
    start = time.perf_counter()
    rep = fuzz_gma(200, seed=1)
    elapsed = time.perf_counter() - start
    equipped = rep["involution_equipped"]
    ok = not rep["violations"] and rep["principal_on_equipped"] == equipped and elapsed < 60
    record(2, ok, f"200 instances, {equipped} with a valid involution, all principal: {rep['principal_on_equipped'] == equipped}, {elapsed:.1f}s")
    assert ok


def _minimality_instances():
    rng = random.Random(2024)
    out = []
    while len(out) < 30:
        inst = random_gma_instance(rng, nonsplit_only=True)
        A = inst.rho.algebra
        if A.log_order <= 4:
            out.append((inst.label, inst.rho))
    G = catalog.named_group("S3")
    for name in ("Z/27", "Z/9[x]/(x^2-3x)"):
        A = catalog.named_algebra(name)
        out.append((f"S3 standard/{name}", rep_from_int_matrices(G, A, S3_STANDARD, blocks=(1, 1))))
    return out


def test_criterion_3_minimality():
    inst = _minimality_instances()
    bad, nonzero = [], 0
    for label, rho in inst:
        T = trace_pseudocharacter(rho)
        I = reducibility_ideal(analyze(T))
        S = smallest_splitting_ideal(T).smallest
        nonzero += not I.is_zero()
        if not (S == I and np.array_equal(S.rows, I.rows)):
            bad.append(label)
    ok = not bad and len(inst) >= 20
    record(3, ok, f"{len(inst)} instances with |A| <= p^4 ({nonzero} with I_T != 0), mismatches {len(bad)}")
    assert ok, bad


def test_criterion_4_equi2():
    rng = random.Random(77)
    instances, checks, bad = 0, 0, []
    reps = [random_gma_instance(rng).rho for _ in range(55)]
    G = catalog.named_group("S3")
    reps.append(rep_from_int_matrices(G, catalog.truncated(3, 3), S3_STANDARD, blocks=(1, 1)))
    both = [0, 0]
    for rho in reps:
        I_T = reducibility_ideal(analyze(trace_pseudocharacter(rho)))
        instances += 1
        for J in all_ideals(rho.algebra):
            contains = J.contains_ideal(I_T)
            ok = block_triangularize(rho, J).success == contains
            both[contains] += 1
            checks += 1
            if not ok:
                bad.append((rho.label, J.rows.tolist()))
    ok = not bad and instances >= 50 and all(both)
    record(4, ok, f"{instances} instances, {checks} ideals ({both[1]} containing I_T, {both[0]} not), exceptions {len(bad)}")
    assert ok


def _h0_free_modules():
    """Rank-1 character modules and rank-2 lattices over Z/p^3 with H^0 = 0."""
    out = []
    for name, p in [("S3", 3), ("Z6", 3), ("D4", 3), ("D5", 5), ("Z4", 5), ("Z10", 5), ("D5", 3), ("Z5:Z4", 5), ("Z7:Z3", 7), ("Q8", 3)]:
        G = catalog.named_group(name)
        q = p**3
        for chi in characters(G, p):
            if (chi == 1).all():
                continue
            vals = [pow(int(v), q // p, q) for v in chi]
            out.append((f"{name}/chi={list(chi[:4])}/Z{q}", character_module(G, p, 3, vals)))
    for name, gens in [("D4", D4_PLANE)]:
        G = catalog.named_group(name)
        out.append((f"{name} plane/Z27", module_of_rep(rep_from_int_matrices(G, catalog.truncated(3, 3), gens))))
    return out


def _h0_nonzero_modules():
    out = []
    for name, p in [("Z3", 3), ("S3", 3), ("Z9", 3), ("Z5", 5), ("D5", 5)]:
        out.append((f"{name} trivial/Z{p**3}", trivial_module(catalog.named_group(name), p, 3)))
    return out


def _literal_failures():
    realized, literal_fail = [], []
    for label, W in _h0_nonzero_modules():
        for n in (1, 2):
            r = torsion_functoriality_check(W, n)
            realized.append(r.three_term_identity() and r.orders_balance)
            if not r.literal_identity():
                literal_fail.append(f"{label} n={n}")
    return realized, literal_fail


def test_criterion_5_torsion_functoriality():
    mods = _h0_free_modules()
    bad = []
    for label, W in mods:
        assert h0(W).log_order == 0, label
        for n in (1, 2):
            r = torsion_functoriality_check(W, n)
            if not (r.h0_zero and r.iso and r.h1_Wn_log == r.h1_W_torsion_log and r.exact_at_h1_W and r.exact_at_h1_Wn):
                bad.append((label, n))
    realized, literal_fail = _literal_failures()
    # the H0 != 0 clause read literally, |H^1(W_n)| = |H^0(W)/p^n| |H^1(W)[p^n]|,
    # is false on truncated lattices (see the ledger), so the criterion fails
    ok = len(mods) >= 20 and not bad and all(realized) and not literal_fail
    record(
        5,
        ok,
        f"{len(mods)} modules with H0 = 0: iso for n = 1, 2 on all: {not bad}; "
        f"H0 != 0: realized three-term identity on {sum(realized)}/{len(realized)}, "
        f"literal |H0(W)/p^n| form fails on {len(literal_fail)}/{len(realized)} "
        f"(e.g. {literal_fail[0] if literal_fail else 'none'})",
    )
    assert len(mods) >= 20 and not bad and all(realized)


@pytest.mark.xfail(strict=True, reason="H0(W)/p^n first term is wrong for truncated lattices; see the ledger")
def test_criterion_5_literal_h0_clause():
    _, literal_fail = _literal_failures()
    assert not literal_fail, literal_fail


def test_criterion_6_cri1():
    pos_neg = cri1_suite()
    wl = wl_suite()
    n_pos, n_neg = len(pos_neg["positive"]), len(pos_neg["negative"])
    ref = next(r for r in wl["fixtures"] if r["label"] == "Z/27[x]/(x^2-3x), x -> 0")
    ok = pos_neg["passed"] and wl["passed"] and n_pos >= 10 and n_neg >= 5 and ref["phi_R_order"] == ref["eta_S_order"] == 3
    record(6, ok, f"{n_pos} positive, {n_neg} negative, Z/27[x]/(x^2-3x): |Phi_R| = {ref['phi_R_order']}, |O/eta_S| = {ref['eta_S_order']}")
    assert ok


def _nonsplit_residuals(per_pair: int = 8):
    """Every non-split ``[[chi1, *], [0, chi2]]`` over the fuzz families, a few classes per pair."""
    for name, p in GMA_FAMILIES:
        G = catalog.named_group(name)
        chars = characters(G, p)
        for a in chars:
            for b in chars:
                if np.array_equal(a, b):
                    continue
                classes = extension_classes(G, p, a, b)
                coeffs = [c for c in itertools.product(range(p), repeat=len(classes)) if any(c)]
                for c in coeffs[:per_pair]:
                    cocycle = sum(k * v for k, v in zip(c, classes)) % p
                    yield ResidualData(G, p, a, b, cocycle)


def test_criterion_7_scalar_centralizer():
    count, bad = 0, []
    for res in _nonsplit_residuals():
        G, Fp = res.group, catalog.prime_field(res.p)
        rho = res.rep(Fp)
        blocks_irred = all(
            is_absolutely_irreducible(rep_from_int_matrices(G, Fp, [[[int(c[s])]] for s in G.generators]))
            for c in (res.chi1, res.chi2)
        )
        count += 1
        if not blocks_irred or centralizer(rho).dimension != 1:
            bad.append(G.label)
    ok = count >= 50 and not bad
    record(7, ok, f"{count} non-split residuals with distinct characters, centralizer dimension 1 on all: {not bad}")
    assert ok


def test_criterion_8_catalog_oracles():
    algs = catalog.algebra_catalog(6)
    total, bad = 0, []
    for A in algs:
        for I in all_ideals(A):
            total += 1
            fast, _ = is_principal(I)
            slow, _ = is_principal(I, oracle="exhaustive")
            if fast != slow or minimal_generators(I).count != exhaustive_generator_count(I):
                bad.append((A.name, I.rows.tolist()))
    ok = not bad
    record(8, ok, f"{len(algs)} algebras, {total} ideals, disagreements {len(bad)}")
    assert ok


def test_criterion_9_determinism():
    outs = []
    start = time.perf_counter()
    for _ in range(2):
        buf = io.StringIO()
        with redirect_stdout(buf):
            code = main(["demo", "all"])
        outs.append((code, buf.getvalue()))
    elapsed = (time.perf_counter() - start) / 2
    ok = outs[0] == outs[1] and outs[0][0] == 0 and elapsed < 120
    record(9, ok, f"demo all exit {outs[0][0]}, byte-identical: {outs[0][1] == outs[1][1]}, {elapsed:.1f}s per run")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
