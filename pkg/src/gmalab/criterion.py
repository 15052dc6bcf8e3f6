"""Commutative-algebra criterion for surjections of finite local Z/p^e-algebras.

Every hypothesis is evaluated and reported; the conclusion (is ``phi``
bijective?) is computed separately from the module map itself, so a
hypothesis-satisfying instance with a non-bijective ``phi`` is visible as an
implication violation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import errors
from .groups import GroupRep
from .ring import (
    Ideal,
    LocalAlgebra,
    annihilator,
    base_algebra,
    ideal_from_generators,
    ideal_power,
    ideal_product,
    is_principal,
    principal_ideal,
    quotient_algebra,
)
from .zmod import Span, kernel, quotient_invariants

NO_CLAIM = "hypothesis failure, no implication claimed"


class AlgebraHom:
    """``x -> target.reduce(x @ matrix)`` between algebras over the same base ring."""

    def __init__(self, source: LocalAlgebra, target: LocalAlgebra, matrix, require_surjective: bool = True):
        if (source.p, source.e) != (target.p, target.e):
            raise errors.NotAlgebraHom("source and target have different base rings")
        self.source, self.target = source, target
        self.matrix = np.asarray(matrix, dtype=np.int64).reshape(source.rank, target.rank) % target.q
        self._check()
        if require_surjective and not self.surjective:
            raise errors.NotSurjective("map is not surjective")

    def __call__(self, x) -> np.ndarray:
        return self.target.reduce(np.asarray(x, dtype=np.int64) @ self.matrix)

    def _check(self):
        R, S = self.source, self.target
        if not R.relations.is_zero() and S.relations.reduce_many(R.relations.rows @ self.matrix).any():
            raise errors.NotAlgebraHom("relations of the source are not sent to zero")
        if not S.equal(self(R.unit), S.unit):
            raise errors.NotAlgebraHom("map is not unital")
        eye = np.eye(R.rank, dtype=np.int64)
        for i in range(R.rank):
            for j in range(i, R.rank):
                if not S.equal(self(R.mul(eye[i], eye[j])), S.mul(self(eye[i]), self(eye[j]))):
                    raise errors.NotAlgebraHom(f"map is not multiplicative on basis pair ({i}, {j})")

    @property
    def image(self) -> Span:
        return Span(self.matrix, self.target.p, self.target.e, self.target.rank) + self.target.relations

    @property
    def surjective(self) -> bool:
        return self.image.log_order == self.target.rank * self.target.e

    def kernel_ideal(self) -> Ideal:
        R = self.source
        return Ideal(R, kernel(self.matrix, R.p, R.e, target=self.target.relations) + R.relations)

    @property
    def injective(self) -> bool:
        return self.kernel_ideal().is_zero()

    def push(self, I: Ideal) -> Ideal:
        """``phi(I)``, an ideal when ``phi`` is surjective."""
        return ideal_from_generators(self.target, [self(x) for x in I.module_generators()])

    def compose(self, other: "AlgebraHom") -> "AlgebraHom":
        """``other after self``."""
        return AlgebraHom(self.source, other.target, self.matrix @ other.matrix, require_surjective=False)

    def to_dict(self) -> dict:
        return {"source": self.source.name, "target": self.target.name, "matrix": self.matrix.tolist()}


def identity_hom(A: LocalAlgebra) -> AlgebraHom:
    return AlgebraHom(A, A, np.eye(A.rank, dtype=np.int64))


def projection_hom(A: LocalAlgebra, I: Ideal) -> AlgebraHom:
    Q, P = quotient_algebra(A, I, with_map=True)
    return AlgebraHom(A, Q, P)


def quotient_log(I: Ideal) -> int:
    return I.algebra.log_order - I.log_order


def module_invariants(A: LocalAlgebra) -> list:
    return quotient_invariants(Span.full(A.p, A.e, A.rank), A.relations)


def is_free(A: LocalAlgebra) -> bool:
    """Free over Z/p^e: every invariant factor is p^e."""
    return all(f == A.q for f in module_invariants(A))


def cyclic_level(A: LocalAlgebra, I: Ideal):
    """``s`` with ``A/I = Z/p^s`` generated by 1, else ``None``."""
    if I.is_unit_ideal():
        return 0
    span = I.span.add_rows(A.unit[None, :])
    if span.log_order != A.rank * A.e:
        return None
    return quotient_log(I)


@dataclass
class CriterionReport:
    hypotheses: dict
    violated: list
    standing: dict
    case: str | None
    r: int | None
    levels: list
    inequality_holds: bool
    bijective: bool
    injective: bool
    implication_claimed: bool
    verdict: str
    triage: str | None = None

    @property
    def consistent(self) -> bool:
        return not self.implication_claimed or self.bijective

    @property
    def untriaged_violation(self) -> bool:
        return not self.consistent and self.triage == "untriaged"

    def to_dict(self) -> dict:
        return {
            "triage": self.triage,
            "hypotheses": self.hypotheses,
            "violated": self.violated,
            "standing": self.standing,
            "case": self.case,
            "r": self.r,
            "levels": self.levels,
            "inequality_holds": self.inequality_holds,
            "bijective": self.bijective,
            "implication_claimed": self.implication_claimed,
            "consistent": self.consistent,
            "verdict": self.verdict,
        }


def _stable_powers(I: Ideal, cap: int = 64) -> list:
    """``[I^0, I^1, ..., I^N]`` until the powers stabilize (last one repeated once)."""
    A = I.algebra
    out = [Ideal(A, Span.full(A.p, A.e, A.rank))]
    cur = I
    for _ in range(cap):
        out.append(cur)
        nxt = ideal_product(cur, I)
        if nxt == cur:
            out.append(nxt)
            return out
        cur = nxt
    raise errors.NoConvergence("powers of the ideal did not stabilize")


def check_cri1(R: LocalAlgebra, S: LocalAlgebra, phi: AlgebraHom, pi) -> CriterionReport:
    """Evaluate the criterion's hypotheses and, independently, whether ``phi`` is bijective.

    Hypotheses: ``H1`` (``phi_1`` iso); ``H2a`` (``R/piR = O/p^r`` with
    ``r < e``); ``H2b`` (``R/piR = O/p^e``, the truncation stand-in for
    ``O``, plus ``piR/pi^2R -> xS/x^2S`` iso).  ``S_free`` is the standing
    freeness assumption on ``S``.
    """
    if phi.source is not R or phi.target is not S:
        raise errors.NotAlgebraHom("phi does not go from R to S")
    if not phi.surjective:
        raise errors.NotSurjective("phi is not surjective")
    pi = R.reduce(pi)
    x = phi(pi)
    IR, IS = principal_ideal(R, pi), principal_ideal(S, x)
    powR, powS = _stable_powers(IR), _stable_powers(IS)
    depth = max(len(powR), len(powS))
    powR += [powR[-1]] * (depth - len(powR))
    powS += [powS[-1]] * (depth - len(powS))
    levels = []
    for n in range(1, depth):
        levels.append(
            {
                "n": n,
                "R_mod_pi_n_log": quotient_log(powR[n]),
                "S_mod_x_n_log": quotient_log(powS[n]),
                "phi_n_iso": quotient_log(powR[n]) == quotient_log(powS[n]),
            }
        )
    # |piR/pi^n R| <= |piR/pi^2 R|^(n-1)
    sq = powR[1].log_order - powR[2].log_order
    inequality = all(powR[1].log_order - powR[n].log_order <= sq * (n - 1) for n in range(2, depth))
    H1 = levels[0]["phi_n_iso"]
    r = cyclic_level(R, IR)
    cyclic = r is not None and r >= 1
    H2a = cyclic and r < R.e
    full = cyclic and r == R.e
    sq_iso = (powR[1].log_order - powR[2].log_order) == (powS[1].log_order - powS[2].log_order)
    H2b = full and sq_iso
    hyps = {"H1_phi1_iso": H1, "H2a_torsion_cyclic": H2a, "H2b_full_level_cyclic": full, "H2b_square_map_iso": sq_iso}
    standing = {
        "S_free": is_free(S),
        "S_invariants": module_invariants(S),
        "square_quotient_finite": True,
        "pi_in_max_ideal": R.max_ideal.contains(pi),
    }
    violated = []
    if not H1:
        violated.append("H1_phi1_iso")
    if not (H2a or H2b):
        if not cyclic:
            violated.append("H2_R_mod_pi_cyclic")
        elif full and not sq_iso:
            violated.append("H2b_square_map_iso")
    if not standing["S_free"]:
        violated.append("S_free")
    # the proof uses |xS/x^kS| = |xS/x^2S|^(k-1), which torsion-freeness of S
    # guarantees in characteristic 0 but a finite truncation cannot satisfy
    # unless xS = 0
    xsq = powS[1].log_order - powS[2].log_order
    growth = all(powS[1].log_order - powS[n].log_order == xsq * (n - 1) for n in range(2, depth))
    standing["x_growth_identity"] = growth
    case = "H2a" if H2a else ("H2b" if H2b else None)
    injective = phi.injective
    claimed = not violated
    triage = None
    if not claimed:
        verdict = NO_CLAIM
    elif injective:
        verdict = "consistent: phi is an isomorphism"
    else:
        verdict = "implication violated: hypotheses hold but phi is not injective"
        triage = "truncation artifact: x-power growth identity fails in S" if not growth else "untriaged"
    return CriterionReport(
        hyps, violated, standing, case, r, levels, inequality, injective, injective, claimed, verdict, triage
    )


# -- Wiles-Lenstra data ------------------------------------------------------------


@dataclass
class WilesLenstraReport:
    phi_R_log: int
    phi_S_log: int
    eta_log: int  # log_p |O / eta_S|
    principal: bool
    generator: list | None
    numerical_condition: bool
    bijective: bool
    implication_claimed: bool
    verdict: str

    @property
    def consistent(self) -> bool:
        return not self.implication_claimed or self.bijective

    def to_dict(self) -> dict:
        p_ = self.__dict__.copy()
        p_["consistent"] = self.consistent
        return p_


def congruence_data(pi_A: AlgebraHom):
    """``(log|Phi_A|, log|O/eta_A|, ker pi_A)``."""
    A = pi_A.source
    I = pi_A.kernel_ideal()
    phi_log = I.log_order - ideal_power(I, 2).log_order
    ann = annihilator(A, I)
    eta = pi_A.push(ann)
    return phi_log, quotient_log(eta), I


def wiles_lenstra_data(R: LocalAlgebra, S: LocalAlgebra, phi: AlgebraHom, pi_R: AlgebraHom, pi_S: AlgebraHom) -> WilesLenstraReport:
    if pi_R.source is not R or pi_S.source is not S:
        raise errors.DiagramNotCommuting("augmentations have the wrong sources")
    O = pi_R.target
    if O.rank != 1 or pi_S.target.rank != 1:
        raise errors.DiagramNotCommuting("augmentations must land in the base ring")
    comp = phi.matrix @ pi_S.matrix % O.q
    if O.relations.reduce_many(comp - pi_R.matrix).any():
        raise errors.DiagramNotCommuting("pi_S after phi differs from pi_R")
    phiR, _, IR = congruence_data(pi_R)
    phiS, etaS, _ = congruence_data(pi_S)
    principal, gen = is_principal(IR)
    numerical = phiR <= etaS
    bij = phi.injective
    claimed = bool(principal and numerical)
    if not claimed:
        verdict = NO_CLAIM
    elif bij:
        verdict = "consistent: phi is an isomorphism"
    else:
        verdict = "implication violated: hypotheses hold but phi is not injective"
    return WilesLenstraReport(
        phiR, phiS, etaS, bool(principal), None if gen is None else [int(t) for t in gen], numerical, bij, claimed, verdict
    )


# -- structure map and trace generation ------------------------------------------------


@dataclass
class StructureReport:
    cyclic: bool
    s: int | None
    witness: list | None

    def to_dict(self):
        return self.__dict__.copy()


def structure_surjectivity_check(R: LocalAlgebra, I: Ideal) -> StructureReport:
    """Is ``Z/p^e -> R/I`` surjective?  If so ``R/I = Z/p^s``."""
    s = cyclic_level(R, I)
    if s is not None:
        return StructureReport(True, s, None)
    image = I.span.add_rows(R.unit[None, :])
    eye = np.eye(R.rank, dtype=np.int64)
    for b in eye:
        if not image.contains(b):
            return StructureReport(False, None, R.reduce(b).tolist())
    raise AssertionError("unreachable")


@dataclass
class TraceGenerationReport:
    generated: bool
    subalgebra_log: int
    algebra_log: int
    witness: list | None

    def to_dict(self):
        return self.__dict__.copy()


def generated_subalgebra(A: LocalAlgebra, gens) -> Span:
    """Z/p^e-subalgebra generated by ``gens`` (as a span containing the relations)."""
    span = A.relations.add_rows(np.vstack([A.unit[None, :]] + [A.reduce(g)[None, :] for g in gens]))
    while True:
        prods = [A.mul(a, b) for a in span.rows for b in span.rows]
        new = span.add_rows(np.array(prods).reshape(-1, A.rank)) if prods else span
        if new == span:
            return span
        span = new


def trace_generation_check(rho: GroupRep) -> TraceGenerationReport:
    A = rho.algebra
    sub = generated_subalgebra(A, list(rho.traces))
    full = A.rank * A.e
    witness = None
    if sub.log_order != full:
        for b in np.eye(A.rank, dtype=np.int64):
            if not sub.contains(b):
                witness = A.reduce(b).tolist()
                break
    return TraceGenerationReport(
        sub.log_order == full, sub.log_order - A.relations.log_order, A.log_order, witness
    )


def cons1_skeleton(R: LocalAlgebra, S: LocalAlgebra, phi: AlgebraHom, pi) -> dict:
    """Structure map check on ``R/(pi)`` followed by the criterion."""
    I = principal_ideal(R, pi)
    st = structure_surjectivity_check(R, I)
    cri = check_cri1(R, S, phi, pi)
    st_S = structure_surjectivity_check(S, phi.push(I))
    return {
        "structure_R": st.to_dict(),
        "structure_S": st_S.to_dict(),
        "criterion": cri.to_dict(),
        "consistent": cri.consistent,
    }


def augmentation(A: LocalAlgebra, values) -> AlgebraHom:
    """``A -> Z/p^e`` given by the images of the basis vectors."""
    O = base_algebra(A.p, A.e)
    return AlgebraHom(A, O, np.asarray(values, dtype=np.int64).reshape(A.rank, 1))
