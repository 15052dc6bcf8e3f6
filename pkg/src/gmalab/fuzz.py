"""Seeded random instances for the GMA pipeline and the criterion."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

import numpy as np

from . import catalog, errors
from .cohomology import character_module, h1
from .criterion import check_cri1, identity_hom, projection_hom
from .groups import (
    FiniteGroup,
    GroupRep,
    Involution,
    assemble_extension,
    direct_sum,
    rep_from_int_matrices,
    square_zero_lifts,
)
from .pseudochar import analyze, principality_certificate, reducibility_ideal, trace_pseudocharacter
from .ring import LocalAlgebra, all_ideals, is_principal

# (group name, p): residually non-split extensions of characters exist when p | |G|
GMA_FAMILIES = [
    ("S3", 3),
    ("D5", 5),
    ("Z5:Z4", 5),
    ("Z7:Z3", 7),
    ("D7", 7),
    ("S3", 5),
    ("S3", 7),
    ("D4", 3),
    ("D4", 5),
    ("Q8", 3),
    ("Q8", 7),
    ("D5", 3),
]


def characters(G: FiniteGroup, p: int) -> list:
    """All homomorphisms G -> F_p^x, as value arrays on every element."""
    out = []
    for vals in itertools.product(range(1, p), repeat=len(G.generators)):
        chi = np.zeros(G.order, dtype=np.int64)
        by_gen = dict(zip(G.generators, vals))
        for g, parent, s in G.spanning_tree:
            chi[g] = 1 if parent is None else chi[parent] * by_gen[s] % p
        if np.array_equal(chi[G.table], np.outer(chi, chi) % p):
            out.append(chi)
    return out


def extension_classes(G: FiniteGroup, p: int, chi1, chi2) -> list:
    """Cocycles (values on G) spanning H^1(G, Hom(chi2, chi1)) modulo coboundaries."""
    inv2 = np.array([pow(int(v), -1, p) for v in chi2])
    M = character_module(G, p, 1, chi1 * inv2 % p)
    space = h1(M)
    return [row for row in space.z1.rows if not space.b1.contains(row)]


@dataclass
class ResidualData:
    group: FiniteGroup
    p: int
    chi1: np.ndarray
    chi2: np.ndarray
    cocycle: np.ndarray | None  # None for the split residual

    @property
    def split(self) -> bool:
        return self.cocycle is None

    def rep(self, A: LocalAlgebra) -> GroupRep:
        G = self.group
        r1 = rep_from_int_matrices(G, A, [[[int(self.chi1[s])]] for s in G.generators], label="chi1")
        r2 = rep_from_int_matrices(G, A, [[[int(self.chi2[s])]] for s in G.generators], label="chi2")
        if self.cocycle is None:
            return direct_sum(r1, r2)
        return assemble_extension(r1, r2, self.cocycle.reshape(G.order, 1, 1, 1))


def random_residual(G: FiniteGroup, p: int, rng: random.Random, allow_split: bool = True):
    """A residual ``[[chi1, *], [0, chi2]]`` with distinct characters, non-split when possible."""
    chars = characters(G, p)
    pairs = [(a, b) for a in chars for b in chars if not np.array_equal(a, b)]
    rng.shuffle(pairs)
    for a, b in pairs:
        classes = extension_classes(G, p, a, b)
        if classes:
            coeffs = [rng.randrange(p) for _ in classes]
            if not any(coeffs):
                coeffs[0] = 1
            c = sum(k * v for k, v in zip(coeffs, classes)) % p
            return ResidualData(G, p, a, b, c)
    if allow_split and pairs:
        a, b = pairs[0]
        return ResidualData(G, p, a, b, None)
    return None


def teichmuller(a: int, p: int, e: int) -> int:
    """Multiplicative lift of ``a`` in F_p^x to Z/p^e."""
    return pow(int(a) % p, p ** (e - 1), p**e)


def residual_involution(rho: GroupRep, res: ResidualData) -> Involution | None:
    """``g -> psi(g) g^-1`` with ``psi`` lifting ``chi1^2 = chi2^2``, when the blocks allow it."""
    p = res.p
    sq1, sq2 = res.chi1 * res.chi1 % p, res.chi2 * res.chi2 % p
    if not np.array_equal(sq1, sq2):
        return None
    A, G = rho.algebra, rho.group
    if np.all(sq1 == 1):
        return Involution(G, A, G.inverse, [A.one] * G.order, "inverse")
    psi = [A.scalar(teichmuller(v, p, A.e)) for v in sq1]
    return Involution(G, A, G.inverse, psi, "twisted(chi1^2)")


@dataclass
class GMAInstance:
    label: str
    rho: GroupRep
    residual: ResidualData
    tau: Involution | None


def random_gma_instance(rng: random.Random, families=None, nonsplit_only: bool = False) -> GMAInstance:
    families = families or GMA_FAMILIES
    for _ in range(64):
        name, p = families[rng.randrange(len(families))]
        G = catalog.named_group(name)
        res = random_residual(G, p, rng, allow_split=not nonsplit_only)
        if res is None:
            continue
        algs = catalog.fuzz_algebras(p)
        A = algs[rng.randrange(len(algs))]
        rbar = res.rep(catalog.prime_field(p))
        space = square_zero_lifts(G, A, [m[..., 0] for m in rbar.generator_images()])
        if not space.exists:
            continue
        rho = space.random_lift(rng, label=f"lift over {A.name}", blocks=(1, 1))
        tau = residual_involution(rho, res)
        label = f"{name}/p={p}/{A.name}/{'split' if res.split else 'nonsplit'}"
        return GMAInstance(label, rho, res, tau)
    raise errors.GmaLabError("no residual found for the chosen families")


def gma_record(inst: GMAInstance, oracle: str = "fast") -> dict:
    T = trace_pseudocharacter(inst.rho)
    self_dual = inst.tau is not None and T.is_self_dual(inst.tau)
    tau = inst.tau if self_dual else None
    gma = analyze(T, tau=tau)
    I = reducibility_ideal(gma)
    principal, gen = is_principal(I, oracle=oracle)
    rec = {
        "instance": inst.label,
        "involution": tau.kind if tau else None,
        "reducibility_ideal": I.rows.tolist(),
        "principal": bool(principal),
        "checks": gma.checks,
    }
    cert_ok = True
    if tau is not None:
        try:
            rec["certificate"] = principality_certificate(gma, T, tau).to_dict()
        except errors.CornersNotCyclic as exc:
            rec["certificate"] = {"error": str(exc), "diagnostics": exc.diagnostics}
            cert_ok = False
    rec["violation"] = bool(tau is not None and not (principal and cert_ok))
    return rec


def fuzz_gma(count: int, seed: int, oracle: str = "fast") -> dict:
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = random.Random(seed)
    records = [gma_record(random_gma_instance(rng), oracle=oracle) for _ in range(count)]
    equipped = [r for r in records if r["involution"]]
    return {
        "kind": "gma",
        "count": count,
        "seed": seed,
        "involution_equipped": len(equipped),
        "principal_on_equipped": sum(r["principal"] for r in equipped),
        "violations": [r for r in records if r["violation"]],
        "instances": records,
    }


# -- criterion instances -------------------------------------------------------------


def random_criterion_instance(rng: random.Random, max_log: int = 4):
    """``(R, S, phi, pi)`` with ``S = R/J`` for a random proper ideal ``J``."""
    algs = catalog.algebra_catalog(max_log)
    R = algs[rng.randrange(len(algs))]
    ideals = [I for I in all_ideals(R) if not I.is_unit_ideal()]
    # bias towards J = 0 so that hypothesis-satisfying instances are common
    J = ideals[0] if rng.random() < 0.3 and ideals[0].is_zero() else ideals[rng.randrange(len(ideals))]
    phi = identity_hom(R) if J.is_zero() else projection_hom(R, J)
    pi = R.max_ideal.span.random_element(rng) if rng.random() < 0.8 else R.elements().__next__()
    return R, phi.target, phi, R.reduce(pi)


def fuzz_criterion(count: int, seed: int) -> dict:
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = random.Random(seed)
    records, fixtures = [], []
    for _ in range(count):
        R, S, phi, pi = random_criterion_instance(rng)
        rep = check_cri1(R, S, phi, pi)
        rec = {
            "R": R.name,
            "S_invariants": rep.standing["S_invariants"],
            "kernel": phi.kernel_ideal().rows.tolist(),
            "pi": [int(t) for t in pi],
            "claimed": rep.implication_claimed,
            "bijective": rep.bijective,
            "violated": rep.violated,
            "triage": rep.triage,
        }
        records.append(rec)
        if not rep.consistent:
            fixtures.append(rec)
    return {
        "kind": "criterion",
        "count": count,
        "seed": seed,
        "claimed": sum(r["claimed"] for r in records),
        "consistent_claims": sum(r["claimed"] and r["bijective"] for r in records),
        "violations": [r for r in fixtures if r["triage"] == "untriaged"],
        "truncation_artifacts": [r for r in fixtures if r["triage"] != "untriaged"],
        "instances": records,
    }


FUZZERS = {"gma": fuzz_gma, "criterion": fuzz_criterion}
