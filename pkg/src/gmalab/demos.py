"""Built-in demo suites.  Each returns a report dict with ``invariants`` and ``passed``."""

from __future__ import annotations

import random

import numpy as np

from . import catalog, errors
from .criterion import (
    AlgebraHom,
    augmentation,
    check_cri1,
    identity_hom,
    projection_hom,
    structure_surjectivity_check,
    trace_generation_check,
    wiles_lenstra_data,
)
from .groups import rep_from_int_matrices, square_zero_lifts
from .pseudochar import reducibility_ideal_of, strict_conjugator, trace_pseudocharacter
from .ring import ideal_from_generators
from .scenario import DEFAULT_MAX_ORDER, from_dict, run

# S3 = <r, s> with r = (0 1 2) -> (1 2 0) and s = (0 1); block form [[sign, *], [0, 1]]
S3_STANDARD = [[[1, -1], [3, -2]], [[-1, 1], [0, 1]]]
S3_RESIDUAL = [[[1, 2], [0, 1]], [[2, 1], [0, 1]]]
# D4 = <rotation, reflection> acting on the plane; irreducible mod every odd p
D4_PLANE = [[[0, -1], [1, 0]], [[1, 0], [0, -1]]]
# S3 on {x1 + x2 + x3 = 0} for p != 3
S3_PLANE = [[[0, -1], [1, -1]], [[0, 1], [1, 0]]]
Q8_F3 = [[[0, -1], [1, 0]], [[1, 1], [1, -1]]]


def _run(data: dict, opts: dict) -> dict:
    return run(from_dict(data), oracle=opts["oracle"], max_order=opts["max_order"])


def _collect(report: dict, parts: dict) -> dict:
    """Lift each part's ``passed`` into the suite's invariants."""
    inv = report.setdefault("invariants", {})
    for name, part in parts.items():
        inv[name] = bool(part["passed"])
    report["parts"] = parts
    report["passed"] = all(inv.values())
    return report


def _s3_gma(ring: str, expect: dict) -> dict:
    return {
        "kind": "gma",
        "label": f"S3 standard lattice over {ring}",
        "ring": {"name": ring},
        "group": {"name": "S3"},
        "rep": {"generators": S3_STANDARD, "blocks": [1, 1]},
        "involution": {"kind": "inverse"},
        "expect": expect,
    }


def s3_p3(oracle: str = "exhaustive", max_order: int = DEFAULT_MAX_ORDER) -> dict:
    """The S3, p = 3 running example end to end."""
    opts = {"oracle": oracle, "max_order": max_order}
    parts = {}
    # -- cohomology of the residual characters
    parts["h1_sign"] = _run(
        {
            "kind": "cohomology",
            "group": {"name": "S3"},
            "module": {"p": 3, "e": 1, "type": "character", "values": [1, -1], "label": "sign"},
            "expect": {"h1_dimension": 1},
        },
        opts,
    )
    parts["h1_trivial"] = _run(
        {
            "kind": "cohomology",
            "group": {"name": "S3"},
            "module": {"p": 3, "e": 1, "type": "trivial"},
            "expect": {"h1_dimension": 0},
        },
        opts,
    )
    # the transposition (1 0 2) sees the class only through its restriction
    parts["selmer_sign"] = _run(
        {
            "kind": "cohomology",
            "group": {"name": "S3"},
            "module": {"p": 3, "e": 1, "type": "character", "values": [1, -1], "label": "sign"},
            "conditions": [{"subgroup": [[1, 0, 2]], "kind": "zero", "label": "transposition"}],
            "expect": {"h1_dimension": 1, "selmer_order_log": 1},
        },
        opts,
    )
    parts["torsion_sign_Z27"] = _run(
        {
            "kind": "cohomology",
            "group": {"name": "S3"},
            "module": {"p": 3, "e": 3, "type": "character", "values": [1, -1], "label": "sign"},
            "torsion": {"n": [1, 2]},
            "expect": {"h0_order_log": 0},
        },
        opts,
    )
    parts["torsion_trivial_Z27"] = _run(
        {
            "kind": "cohomology",
            "group": {"name": "Z3"},
            "module": {"p": 3, "e": 3, "type": "trivial"},
            "torsion": {"n": [1, 2]},
            "expect": {"h0_order_log": 3},
        },
        opts,
    )
    # -- tangent space: ad rho0 has no H^1, so F3[eps] deformations are trivial
    parts["tangent"] = _run(
        {
            "kind": "tangent",
            "ring": {"name": "F3"},
            "group": {"name": "S3"},
            "rep": {"generators": S3_RESIDUAL, "blocks": [1, 1]},
            "expect": {"dimension": 0, "blocks": {"11": 0, "12": 1, "21": 1, "22": 0}},
        },
        opts,
    )
    # -- GMA on the standard lattices
    parts["gma_Z9"] = _run(_s3_gma("Z/9", {"reducibility_ideal": [[3]], "principal": True, "self_dual": True}), opts)
    parts["gma_Z27"] = _run(_s3_gma("Z/27", {"reducibility_ideal": [[3]], "principal": True, "self_dual": True}), opts)
    parts["gma_residual"] = _run(
        {
            "kind": "gma",
            "ring": {"name": "F3"},
            "group": {"name": "S3"},
            "rep": {"generators": S3_RESIDUAL, "blocks": [1, 1]},
            "involution": {"kind": "inverse"},
            "expect": {"zero": True},
        },
        opts,
    )
    extra = _s3_extras()
    report = {"demo": "s3_p3", "invariants": extra.pop("invariants"), **extra}
    return _collect(report, parts)


def _s3_extras() -> dict:
    G = catalog.named_group("S3")
    inv = {}
    out = {}
    # structure map on the Z/27 lattice: R/I_T = Z/3, i.e. s = 1
    A27 = catalog.truncated(3, 3)
    rho27 = rep_from_int_matrices(G, A27, S3_STANDARD, blocks=(1, 1))
    I = reducibility_ideal_of(trace_pseudocharacter(rho27))
    st = structure_surjectivity_check(A27, I)
    out["structure_Z27"] = st.to_dict()
    inv["structure_cyclic_s1"] = st.cyclic and st.s == 1
    out["trace_generation_Z27"] = trace_generation_check(rho27).to_dict()
    inv["traces_generate"] = out["trace_generation_Z27"]["generated"]
    # every lift to F3[eps] is strictly equivalent to the constant one
    F3 = catalog.prime_field(3)
    D = catalog.dual_numbers(3)
    rho0 = rep_from_int_matrices(G, F3, S3_RESIDUAL, blocks=(1, 1))
    const = rho0.base_change(D, np.array([[1, 0]]))
    space = square_zero_lifts(G, D, S3_RESIDUAL)
    rng = random.Random(0)
    trivial = []
    for _ in range(5):
        lift = space.random_lift(rng, blocks=(1, 1))
        trivial.append(strict_conjugator(lift, const) is not None)
    out["f3_eps_lifts_strictly_trivial"] = trivial
    inv["f3_eps_lifts_trivial"] = all(trivial)
    # consequently I_T = 0 there and A/I_T = F3[eps] is not cyclic over O
    lift = space.random_lift(random.Random(1), blocks=(1, 1))
    I_eps = reducibility_ideal_of(trace_pseudocharacter(lift))
    st_eps = structure_surjectivity_check(D, I_eps)
    out["f3_eps"] = {"reducibility_ideal": I_eps.rows.tolist(), "structure": st_eps.to_dict()}
    inv["f3_eps_not_cyclic"] = I_eps.is_zero() and not st_eps.cyclic
    out["invariants"] = inv
    return out


def m2_full(oracle: str = "exhaustive", max_order: int = DEFAULT_MAX_ORDER) -> dict:
    """Residually irreducible 2-dim traces: ``S = M_2(A)`` and ``I_T = A``."""
    opts = {"oracle": oracle, "max_order": max_order}
    cases = [
        ("D4_F3", "D4", "F3", D4_PLANE),
        ("D4_Z9", "D4", "Z/9", D4_PLANE),
        ("D4_F3eps", "D4", "F3[eps]", D4_PLANE),
        ("Q8_F3", "Q8", "F3", Q8_F3),
        ("S3_F5", "S3", "F5", S3_PLANE),
        ("S3_F7", "S3", "F7", S3_PLANE),
    ]
    parts = {}
    for name, grp, ring, gens in cases:
        A = catalog.named_algebra(ring)
        parts[name] = _run(
            {
                "kind": "gma",
                "ring": {"name": ring},
                "group": {"name": grp},
                "rep": {"generators": gens, "irreducible": True},
                "expect": {"unit": True, "S_order_log": 4 * A.log_order},
            },
            opts,
        )
    report = {"demo": "m2_full"}
    # traces of the S3 plane over F5: T(r) = -1, T(s) = 0
    G = catalog.named_group("S3")
    F5 = catalog.prime_field(5)
    t = rep_from_int_matrices(G, F5, S3_PLANE).traces
    report["S3_F5_traces"] = {"r": int(t[G.generators[0]][0]), "s": int(t[G.generators[1]][0])}
    report["invariants"] = {"S3_F5_traces": report["S3_F5_traces"] == {"r": 4, "s": 0}}
    return _collect(report, parts)


# (label, R name, kernel generators or None, pi)
CRI1_POSITIVE = [
    ("Z/9, pi = 3", "Z/9", None, 3),
    ("Z/27, pi = 3", "Z/27", None, 3),
    ("Z/27, pi = 9", "Z/27", None, 9),
    ("Z/25, pi = 5", "Z/25", None, 5),
    ("Z/9[x]/(x^2-3x), pi = x", "Z/9[x]/(x^2-3x)", None, [0, 1]),
    ("Z/9[x]/(x^2-3x), pi = x - 3", "Z/9[x]/(x^2-3x)", None, [6, 1]),
    ("Z/27[x]/(x^2-3x), pi = x", "Z/27[x]/(x^2-3x)", None, [0, 1]),
    ("Z/27[x]/(x^2-3x), pi = x + 3", "Z/27[x]/(x^2-3x)", None, [3, 1]),
    ("F3[eps], pi = eps", "F3[eps]", None, [0, 1]),
    ("Z/9[x]/(x^2-3x), pi = x + 3", "Z/9[x]/(x^2-3x)", None, [3, 1]),
    ("Z/9[x]/(x^2-3x) automorphism x -> 3 - x, pi = x", "Z/9[x]/(x^2-3x)", "swap", [0, 1]),
]

# (label, R name, kernel generators or None, pi, the one hypothesis it breaks)
CRI1_NEGATIVE = [
    ("Z/9[eps] -> Z/9, pi = 3 + eps", "Z/9[eps]", [[0, 1]], [3, 1], "H1_phi1_iso"),
    ("Z/27[x]/(x^2-3x) -> Z/27, pi = x + 3", "Z/27[x]/(x^2-3x)", [[0, 1]], [3, 1], "H1_phi1_iso"),
    ("Z/9[eps], pi = 3", "Z/9[eps]", None, [3, 0], "H2_R_mod_pi_cyclic"),
    ("F3[eps] -> F3, pi = eps", "F3[eps]", [[0, 1]], [0, 1], "H2b_square_map_iso"),
    ("Z/9[eps] -> Z/9, pi = eps", "Z/9[eps]", [[0, 1]], [0, 1], "H2b_square_map_iso"),
    ("Z/9 -> F3, pi = 3", "Z/9", [[3]], 3, "S_free"),
    ("Z/27 -> Z/9, pi = 3", "Z/27", [[9]], 3, "S_free"),
]


def _cri1_instance(rname: str, kernel, pi):
    R = catalog.named_algebra(rname) if rname != "Z/9[eps]" else catalog.dual_numbers(3, 2)
    if kernel == "swap":
        phi = AlgebraHom(R, R, np.array([[1, 0], [3, -1]]) % R.q)
    elif kernel is None:
        phi = identity_hom(R)
    else:
        phi = projection_hom(R, ideal_from_generators(R, [np.array(k) for k in kernel]))
    pi = R.scalar(pi) if isinstance(pi, int) else R.reduce(np.array(pi))
    return R, phi, pi


def cri1_suite(oracle: str = "exhaustive", max_order: int = DEFAULT_MAX_ORDER) -> dict:
    """Positive fixtures (all hypotheses hold, phi bijective) and single-violation negatives."""
    positive, negative = [], []
    inv = {}
    for label, rname, kernel, pi in CRI1_POSITIVE:
        R, phi, x = _cri1_instance(rname, kernel, pi)
        rep = check_cri1(R, phi.target, phi, x)
        positive.append({"label": label, **rep.to_dict()})
        inv[f"positive: {label}"] = rep.implication_claimed and rep.bijective
    for label, rname, kernel, pi, broken in CRI1_NEGATIVE:
        R, phi, x = _cri1_instance(rname, kernel, pi)
        rep = check_cri1(R, phi.target, phi, x)
        negative.append({"label": label, "expected_violation": broken, **rep.to_dict()})
        inv[f"negative: {label}"] = rep.violated == [broken] and not rep.implication_claimed
    return {
        "demo": "cri1_suite",
        "positive": positive,
        "negative": negative,
        "invariants": inv,
        "passed": all(inv.values()),
    }


# (label, R name, kernel of phi or None, augmentation of R, augmentation of S,
#  expected |Phi_R|, expected |O/eta_S|, implication claimed)
WL_FIXTURES = [
    ("Z/27[x]/(x^2-3x), x -> 0", "Z/27[x]/(x^2-3x)", None, [1, 0], None, 3, 3, True),
    ("Z/9[x]/(x^2-3x), x -> 0", "Z/9[x]/(x^2-3x)", None, [1, 0], None, 3, 3, True),
    ("Z/27[x]/(x^2-3x), x -> 3", "Z/27[x]/(x^2-3x)", None, [1, 3], None, 3, 3, True),
    ("Z/9[eps], eps -> 0", "Z/9[eps]", None, [1, 0], None, 9, 9, True),
    ("Z/27", "Z/27", None, [1], None, 1, 1, True),
    ("Z/27[x]/(x^2-3x) -> Z/27", "Z/27[x]/(x^2-3x)", [[0, 1]], [1, 0], [1], 3, 1, False),
]


def wl_suite(oracle: str = "exhaustive", max_order: int = DEFAULT_MAX_ORDER) -> dict:
    """Congruence data ``|Phi_R|`` and ``|O/eta_S|`` on fixtures with known values."""
    rows = []
    inv = {}
    for label, rname, kernel, aug, aug_S, phi_order, eta_order, claim in WL_FIXTURES:
        R = catalog.named_algebra(rname) if rname != "Z/9[eps]" else catalog.dual_numbers(3, 2)
        phi = identity_hom(R) if kernel is None else projection_hom(R, ideal_from_generators(R, [np.array(k) for k in kernel]))
        S = phi.target
        piR = augmentation(R, aug)
        piS = piR if kernel is None else augmentation(S, aug_S)
        w = wiles_lenstra_data(R, S, phi, piR, piS)
        rec = {"label": label, **w.to_dict(), "phi_R_order": R.p**w.phi_R_log, "eta_S_order": R.p**w.eta_log}
        rows.append(rec)
        ok = (rec["phi_R_order"], rec["eta_S_order"], w.implication_claimed) == (phi_order, eta_order, claim)
        inv[label] = ok and w.consistent
    return {"demo": "wl_suite", "fixtures": rows, "invariants": inv, "passed": all(inv.values())}


DEMOS = {"s3_p3": s3_p3, "m2_full": m2_full, "cri1_suite": cri1_suite, "wl_suite": wl_suite}


def run_demo(name: str, oracle: str = "exhaustive", max_order: int = DEFAULT_MAX_ORDER) -> dict:
    if name == "all":
        parts = {n: fn(oracle=oracle, max_order=max_order) for n, fn in sorted(DEMOS.items())}
        return _collect({"demo": "all"}, parts)
    try:
        fn = DEMOS[name]
    except KeyError:
        raise errors.UnknownDemo(f"unknown demo {name!r}; choose from {', '.join(sorted(DEMOS) + ['all'])}") from None
    return fn(oracle=oracle, max_order=max_order)
