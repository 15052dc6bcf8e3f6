"""Pseudocharacters on group algebras and the GMA structure of their Cayley-Hamilton quotients.

Pipeline: ``T = tr rho`` -> ``ker T`` -> ``S = A[G]/ker T`` -> lifted idempotents
``e1, e2`` -> corners ``e_i S e_j`` -> reducibility ideal ``I_T = T(A12 A21)``.

Group-algebra elements are (N, d) coefficient arrays; quotients of A[G] are
kept as flat Z/q coordinate vectors on the surviving columns.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import errors
from .groups import FiniteGroup, GroupRep, Involution, check_self_dual
from .ring import (
    Ideal,
    LocalAlgebra,
    all_ideals,
    ideal_from_generators,
    ideal_power,
    is_nonzerodivisor,
    mat_equal,
    mat_identity,
    mat_inv,
    mat_mul,
    mat_reduce,
    principal_ideal,
    quotient_algebra,
)
from .zmod import Span, kernel, quotient_invariants, solve

NEWTON_CAP = 64
EXHAUSTION_CAP_LOG = 6  # |A| <= p^6 for ideal enumeration


# -- group algebra ---------------------------------------------------------------


class GroupAlgebraElement:
    def __init__(self, G: FiniteGroup, A: LocalAlgebra, coeffs):
        self.G, self.A = G, A
        c = np.asarray(coeffs, dtype=np.int64).reshape(G.order, A.rank)
        self.coeffs = A.relations.reduce_many(c)

    @classmethod
    def basis(cls, G, A, g, a=None):
        c = np.zeros((G.order, A.rank), dtype=np.int64)
        c[g] = A.one if a is None else A.elem(a)
        return cls(G, A, c)

    def __add__(self, other):
        return GroupAlgebraElement(self.G, self.A, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return GroupAlgebraElement(self.G, self.A, self.coeffs - other.coeffs)

    def __mul__(self, other):
        G, A = self.G, self.A
        out = np.zeros_like(self.coeffs)
        for g in np.flatnonzero(self.coeffs.any(axis=1)):
            for h in np.flatnonzero(other.coeffs.any(axis=1)):
                k = G.table[g, h]
                out[k] = out[k] + A._mul_raw(self.coeffs[g], other.coeffs[h])
        return GroupAlgebraElement(G, A, out)

    def __eq__(self, other):
        return np.array_equal(self.coeffs, other.coeffs)

    def flat(self) -> np.ndarray:
        return self.coeffs.reshape(-1)


def _block_relations(A: LocalAlgebra, count: int) -> Span:
    if A.relations.is_zero():
        return Span.zero(A.p, A.e, count * A.rank)
    return Span(np.kron(np.eye(count, dtype=np.int64), A.relations.rows), A.p, A.e, count * A.rank)


# -- pseudocharacters ----------------------------------------------------------------


@dataclass
class Residual:
    """Residual constituents ``tau1, tau2`` over the residue field ``F = A/m``."""

    n1: int
    n2: int
    tau1: GroupRep
    tau2: GroupRep
    field: LocalAlgebra
    proj: np.ndarray  # coordinates of A -> coordinates of F
    full: GroupRep | None = None  # residually irreducible: split along matrix units of this rep

    @property
    def irreducible(self) -> bool:
        return self.full is not None


class Pseudocharacter:
    def __init__(self, group: FiniteGroup, algebra: LocalAlgebra, values, dim: int, residual=None, rep=None):
        self.group = group
        self.algebra = algebra
        self.values = np.array([algebra.reduce(v) for v in np.asarray(values, dtype=np.int64)])
        self.dim = dim
        self.residual = residual
        self.rep = rep
        A, G = algebra, group
        if not A.equal(self.values[G.identity], A.scalar(dim)):
            raise errors.AlgebraError(f"T(1) != {dim}")
        diff = (self.values[G.table] - self.values[G.table.T]).reshape(-1, A.rank)
        if A.relations.reduce_many(diff).any():
            raise errors.AlgebraError("T is not central: T(gh) != T(hg)")

    def __call__(self, x) -> np.ndarray:
        """``T`` on a group element index or an (N, d) coefficient array."""
        A = self.algebra
        if np.isscalar(x) or np.ndim(x) == 0:
            return self.values[int(x)]
        x = np.asarray(x).reshape(self.group.order, A.rank)
        out = A.zero
        for g in np.flatnonzero(x.any(axis=1)):
            out = out + A._mul_raw(x[g], self.values[g])
        return A.reduce(out)

    @cached_property
    def coordinate_traces(self) -> np.ndarray:
        """``T(b_i g)`` for each flat coordinate ``(g, i)`` of A[G]."""
        A = self.algebra
        out = np.zeros((self.group.order * A.rank, A.rank), dtype=np.int64)
        for g in range(self.group.order):
            M = A.mult_matrix(self.values[g])
            out[g * A.rank : (g + 1) * A.rank] = A.relations.reduce_many(M)
        return out

    def is_self_dual(self, tau: Involution) -> bool:
        residual = []
        if self.residual is not None and not self.residual.irreducible:
            R = self.residual
            residual = [(R.tau1.traces, R.field, R.proj), (R.tau2.traces, R.field, R.proj)]
        return check_self_dual(self.values, tau, residual)

    def reduce_mod(self, I: Ideal):
        """Values in ``A/I`` as ``(Q, values, proj)``."""
        Q, P = quotient_algebra(self.algebra, I, with_map=True)
        return Q, np.array([Q.reduce(v @ P) for v in self.values]), P

    def to_dict(self) -> dict:
        return {"dim": self.dim, "values": self.values.tolist()}


def residual_of(rho: GroupRep, blocks=None) -> Residual:
    n1, n2 = blocks or rho.blocks
    A = rho.algebra
    F, P = quotient_algebra(A, A.max_ideal, with_map=True)
    rbar = rho.base_change(F, P)
    t1 = GroupRep(rho.group, F, rbar.images[:, :n1, :n1], label="tau1")
    t2 = GroupRep(rho.group, F, rbar.images[:, n1:, n1:], label="tau2")
    lower = rbar.images[:, n1:, :n1]
    if F.relations.reduce_many(lower.reshape(-1, F.rank)).any():
        raise errors.NotResidualIdempotent("residual representation is not block upper-triangular")
    return Residual(n1, n2, t1, t2, F, P)


def irreducible_residual(rho: GroupRep) -> Residual:
    """Residual data for a residually irreducible 2-dim rep, split along ``E11, E22``."""
    if rho.degree != 2:
        raise errors.NotResidualIdempotent("matrix-unit splitting is implemented for degree 2")
    A = rho.algebra
    F, P = quotient_algebra(A, A.max_ideal, with_map=True)
    return Residual(1, 1, None, None, F, P, full=rho.base_change(F, P))


def trace_pseudocharacter(rho: GroupRep, blocks=None) -> Pseudocharacter:
    blocks = blocks if blocks is not None else rho.blocks
    residual = residual_of(rho, blocks) if blocks is not None else None
    return Pseudocharacter(rho.group, rho.algebra, rho.traces, rho.degree, residual=residual, rep=rho)


def irreducible_pseudocharacter(rho: GroupRep) -> Pseudocharacter:
    """``tr rho`` carrying matrix-unit residual data (``rho mod m`` irreducible)."""
    return Pseudocharacter(rho.group, rho.algebra, rho.traces, rho.degree, residual=irreducible_residual(rho), rep=rho)


# -- kernels -------------------------------------------------------------------------


@dataclass
class KernelReport:
    ker_T: Span
    module_kernel: Span  # K_T = {x : T(x) = 0}

    def to_dict(self):
        return {"ker_T_order_log": self.ker_T.log_order, "K_T_order_log": self.module_kernel.log_order}


def kernel_of_T(T: Pseudocharacter) -> KernelReport:
    """``ker T = {x : T(xh) = 0 for all h in G}`` and ``K_T = {x : T(x) = 0}``."""
    A, G = T.algebra, T.group
    N, d = G.order, A.rank
    M = np.zeros((N * d, N * d), dtype=np.int64)
    for g in range(N):
        for h in range(N):
            M[g * d : (g + 1) * d, h * d : (h + 1) * d] = A.mult_matrix(T.values[G.table[g, h]])
    rel = _block_relations(A, N)
    ker = kernel(M, A.p, A.e, target=rel) + rel
    K = kernel(T.coordinate_traces, A.p, A.e, target=A.relations) + rel
    if not K.contains_span(ker):
        raise AssertionError("ker T not inside K_T")
    return KernelReport(ker, K)


def kernel_of_rho(rho: GroupRep) -> Span:
    """``{x : sum_g x_g rho(g) = 0}``."""
    A, G = rho.algebra, rho.group
    n, d = rho.degree, A.rank
    rows = []
    eye = np.eye(d, dtype=np.int64)
    for g in range(G.order):
        for b in eye:
            m = np.einsum("ijx,xz->ijz", rho.images[g], A.mult_matrix(b)) % A.q
            rows.append(mat_reduce(A, m).reshape(-1))
    M = np.array(rows)
    return kernel(M, A.p, A.e, target=_block_relations(A, n * n)) + _block_relations(A, G.order)


@dataclass
class KernelComparison:
    equal: bool
    ker_rho_log: int
    ker_T_log: int
    witness: list | None

    def to_dict(self):
        return {
            "equal": self.equal,
            "ker_rho_order_log": self.ker_rho_log,
            "ker_T_order_log": self.ker_T_log,
            "witness": self.witness,
        }


def compare_kernels(rho: GroupRep) -> KernelComparison:
    T = Pseudocharacter(rho.group, rho.algebra, rho.traces, rho.degree)
    kT = kernel_of_T(T).ker_T
    kr = kernel_of_rho(rho)
    if not kT.contains_span(kr):
        raise AssertionError("ker rho not inside ker T")
    witness = None
    for r in kT.rows:
        if not kr.contains(r):
            witness = r.reshape(rho.group.order, rho.algebra.rank).tolist()
            break
    return KernelComparison(kr == kT, kr.log_order, kT.log_order, witness)


# -- quotients of the group algebra -----------------------------------------------------


class TracedAlgebra:
    """``S = A[G]/K`` with induced product, A-structure and (when defined) trace."""

    def __init__(self, T: Pseudocharacter | None, G: FiniteGroup, A: LocalAlgebra, K: Span, tau: Involution | None = None):
        self.T, self.G, self.A, self.K = T, G, A, K
        N, d = G.order, A.rank
        self.keep = K.free_columns()
        D = self.D = len(self.keep)
        eye = np.eye(N * d, dtype=np.int64)
        self.proj = K.reduce_many(eye)[:, self.keep]
        unit_cols = {c for c, pv in K.pivots if pv == 1}
        rel = [r[self.keep] for r, (c, _) in zip(K.rows, K.pivots) if c not in unit_cols]
        self.relations = Span(np.array(rel).reshape(-1, D), A.p, A.e, D)
        self.q = A.q
        # products of kept coordinates (b_i g)(b_j h) = (b_i b_j) gh
        c = np.zeros((D, D, D), dtype=np.int64)
        coords = [divmod(k, d) for k in self.keep]
        for a, (g, i) in enumerate(coords):
            for b, (h, j) in enumerate(coords):
                v = np.zeros(N * d, dtype=np.int64)
                k = G.table[g, h]
                v[k * d : (k + 1) * d] = A.c[i, j]
                c[a, b] = K.reduce(v)[self.keep]
        self.c = c
        self.unit = self.from_flat(self._basis_flat(G.identity, A.unit))
        self.iota = np.array([self.from_flat(self._basis_flat(G.identity, b)) for b in np.eye(d, dtype=np.int64)])
        self.trace_mat = None
        if T is not None:
            kt = kernel(T.coordinate_traces, A.p, A.e, target=A.relations)
            if kt.contains_span(K):
                self.trace_mat = T.coordinate_traces[self.keep]
        self.tau = None
        self.tau_mat = None
        if tau is not None:
            self._set_involution(tau)

    def _basis_flat(self, g, a):
        d = self.A.rank
        v = np.zeros(self.G.order * d, dtype=np.int64)
        v[g * d : (g + 1) * d] = a
        return v

    def _set_involution(self, tau: Involution):
        A, G = self.A, self.G
        N, d = G.order, A.rank
        img = np.zeros((N * d, N * d), dtype=np.int64)
        for g in range(N):
            for i in range(d):
                b = np.zeros(d, dtype=np.int64)
                b[i] = 1
                img[g * d + i, tau.sigma[g] * d : (tau.sigma[g] + 1) * d] = A.mul(b, tau.twist[g])
        for r in self.K.rows:
            if not self.K.contains(r @ img % A.q):
                raise errors.NotSelfDual("kernel is not stable under the involution")
        self.tau = tau
        self.tau_mat = (img[self.keep] @ self.proj) % A.q

    # element arithmetic
    def reduce(self, x) -> np.ndarray:
        return self.relations.reduce(x)

    def from_flat(self, v) -> np.ndarray:
        return self.reduce(np.asarray(v, dtype=np.int64) @ self.proj)

    def from_group_algebra(self, x) -> np.ndarray:
        return self.from_flat(np.asarray(x).reshape(-1))

    def element(self, g) -> np.ndarray:
        return self.from_flat(self._basis_flat(g, self.A.unit))

    def mul(self, x, y) -> np.ndarray:
        return self.reduce(np.einsum("i,j,ijk->k", x, y, self.c) % self.q)

    def add(self, x, y):
        return self.reduce(np.asarray(x) + np.asarray(y))

    def sub(self, x, y):
        return self.reduce(np.asarray(x) - np.asarray(y))

    def scale(self, a, x):
        return self.mul(self.reduce(np.asarray(a) @ self.iota), x)

    def scalar(self, n: int):
        return self.reduce(n * self.unit)

    def equal(self, x, y) -> bool:
        return not self.reduce(np.asarray(x) - np.asarray(y)).any()

    def trace(self, x) -> np.ndarray:
        if self.trace_mat is None:
            raise errors.AlgebraError("trace does not descend to this quotient")
        return self.A.reduce(np.asarray(x) @ self.trace_mat)

    def involution(self, x) -> np.ndarray:
        return self.reduce(np.asarray(x) @ self.tau_mat)

    def left_matrix(self, x) -> np.ndarray:
        """Matrix of ``y -> x*y``."""
        return np.einsum("i,ijk->jk", x, self.c) % self.q

    def right_matrix(self, x) -> np.ndarray:
        """Matrix of ``y -> y*x``."""
        return np.einsum("j,ijk->ik", x, self.c) % self.q

    @property
    def log_order(self) -> int:
        return self.D * self.A.e - self.relations.log_order

    def span(self, rows) -> Span:
        return Span(np.vstack([self.relations.rows, np.asarray(rows).reshape(-1, self.D)]), self.A.p, self.A.e, self.D)

    def module_span(self, rows) -> Span:
        """A-submodule generated by ``rows``."""
        out = [self.relations.rows]
        for r in np.asarray(rows).reshape(-1, self.D):
            for b in self.iota:
                out.append(self.mul(b, r)[None, :])
        return Span(np.vstack(out), self.A.p, self.A.e, self.D)


def faithful_quotient(T: Pseudocharacter | None, K: Span, tau: Involution | None = None, G=None, A=None) -> TracedAlgebra:
    G = G if T is None else T.group
    A = A if T is None else T.algebra
    return TracedAlgebra(T, G, A, K, tau=tau)


def cayley_hamilton_quotient(T: Pseudocharacter, tau: Involution | None = None) -> TracedAlgebra:
    return TracedAlgebra(T, T.group, T.algebra, kernel_of_T(T).ker_T, tau=tau)


# -- idempotents ---------------------------------------------------------------------


def newton_lift(S: TracedAlgebra, e) -> np.ndarray:
    """Iterate ``e -> 3e^2 - 2e^3`` to an exact idempotent."""
    e = S.reduce(e)
    for _ in range(NEWTON_CAP):
        e2 = S.mul(e, e)
        if S.equal(e2, e):
            return e
        e3 = S.mul(e2, e)
        e = S.reduce(3 * e2 - 2 * e3)
    raise errors.NoConvergence("idempotent iteration did not stabilize (defect not nilpotent)")


def _residual_map(S: TracedAlgebra, R: Residual) -> tuple:
    """Matrix of ``S -> M_n1(F) x M_n2(F)``, flattened, and its target relations."""
    A, F = S.A, R.field
    d = A.rank
    rows = []
    reps = (R.full,) if R.irreducible else (R.tau1, R.tau2)
    for k in S.keep:
        g, i = divmod(k, d)
        b = np.zeros(d, dtype=np.int64)
        b[i] = 1
        bf = F.reduce(b @ R.proj)
        parts = []
        for t in reps:
            m = np.einsum("ijx,xz->ijz", t.images[g], F.mult_matrix(bf)) % F.q
            parts.append(mat_reduce(F, m).reshape(-1))
        rows.append(np.concatenate(parts))
    M = np.array(rows).reshape(S.D, -1)
    count = 4 if R.irreducible else R.n1 * R.n1 + R.n2 * R.n2
    return M, _block_relations(F, count)


def _residual_target(R: Residual, first, second):
    if R.irreducible:
        # first, second are the 1x1 blocks of a diagonal 2x2 target
        F = R.field
        out = np.zeros((2, 2, F.rank), dtype=np.int64)
        out[0, 0], out[1, 1] = np.asarray(first).reshape(-1), np.asarray(second).reshape(-1)
        return out.reshape(-1)
    return np.concatenate([np.asarray(first).reshape(-1), np.asarray(second).reshape(-1)])


def radical(S: TracedAlgebra, R: Residual) -> Span:
    """Kernel of the residual map ``S -> M_n1(F) x M_n2(F)``."""
    M, target = _residual_map(S, R)
    return kernel(M, S.A.p, S.A.e, target=target) + S.relations


def residual_idempotents(S: TracedAlgebra, R: Residual, rng: random.Random | None = None):
    """Elements of S mapping to ``(1, 0)`` and ``(0, 1)`` residually."""
    M, target = _residual_map(S, R)
    F = R.field
    I1, I2 = mat_identity(F, R.n1), mat_identity(F, R.n2)
    Z2 = np.zeros_like(I2)
    e1 = solve(M, _residual_target(R, I1, Z2), S.A.p, S.A.e, target=target)
    if e1 is None:
        raise errors.NotResidualIdempotent("no element of S maps to the first residual block")
    e1 = S.reduce(e1)
    if rng is not None:
        e1 = S.add(e1, radical(S, R).random_element(rng))
    return e1, S.sub(S.unit, e1)


@dataclass
class IdempotentPair:
    e1: np.ndarray
    e2: np.ndarray
    tau_fixed: bool


def lift_idempotents(S: TracedAlgebra, e1bar, e2bar, tau: bool = False, residual: Residual | None = None) -> IdempotentPair:
    """Lift residual orthogonal idempotents with ``e1bar + e2bar = 1``.

    With ``tau`` the residual idempotents are first averaged with their
    involution images; the cubic iteration preserves the fixed subalgebra.
    """
    e1bar, e2bar = S.reduce(e1bar), S.reduce(e2bar)
    if not S.equal(S.add(e1bar, e2bar), S.unit):
        raise errors.NotResidualIdempotent("residual idempotents do not sum to 1")
    if residual is not None:
        rad = radical(S, residual)
        for e in (e1bar, e2bar):
            if not rad.contains(S.sub(S.mul(e, e), e)):
                raise errors.NotResidualIdempotent("not idempotent modulo the radical")
        if not rad.contains(S.mul(e1bar, e2bar)):
            raise errors.NotResidualIdempotent("residual idempotents are not orthogonal")
        if rad.contains(e1bar) or rad.contains(e2bar):
            raise errors.NotResidualIdempotent("a residual idempotent is zero")
    if tau:
        if S.tau_mat is None:
            raise errors.NotSelfDual("quotient carries no involution")
        half = pow(2, -1, S.q)
        sym = S.reduce(half * (e1bar + S.involution(e1bar)))
        if residual is not None and not radical(S, residual).contains(S.sub(sym, e1bar)):
            raise errors.NotResidualIdempotent("residual idempotent is not fixed by the involution")
        e1bar = sym
    e1 = newton_lift(S, e1bar)
    one_minus = S.sub(S.unit, e1)
    e2 = newton_lift(S, S.mul(S.mul(one_minus, e2bar), one_minus))
    if not S.equal(S.add(e1, e2), S.unit):
        raise errors.NotResidualIdempotent("lifted idempotents do not sum to 1")
    fixed = bool(tau) and S.equal(S.involution(e1), e1) and S.equal(S.involution(e2), e2)
    return IdempotentPair(e1, e2, fixed)


def _rank_one_idempotent(S: TracedAlgebra, R: Residual, e, block: int) -> np.ndarray:
    """A lift of the matrix unit E_11 of block ``block`` inside ``e S e``."""
    n = R.n1 if block == 1 else R.n2
    if n == 1:
        return e
    F = R.field
    M, target = _residual_map(S, R)
    E = np.zeros((n, n, F.rank), dtype=np.int64)
    E[0, 0] = F.one
    other = np.zeros(((R.n2 if block == 1 else R.n1),) * 2 + (F.rank,), dtype=np.int64)
    rhs = _residual_target(R, E, other) if block == 1 else _residual_target(R, other, E)
    x = solve(M, rhs, S.A.p, S.A.e, target=target)
    if x is None:
        raise errors.NotResidualIdempotent("matrix unit has no preimage")
    return newton_lift(S, S.mul(S.mul(e, S.reduce(x)), e))


# -- GMA decomposition --------------------------------------------------------------


@dataclass
class Corner:
    span: Span
    generators: int  # minimal number of A-module generators
    generator: np.ndarray | None
    log_order: int
    invariants: list

    def to_dict(self):
        return {"generators": self.generators, "order_log": self.log_order, "invariants": self.invariants}


def _corner(S: TracedAlgebra, left, right) -> Corner:
    rows = [S.mul(S.mul(left, b), right) for b in np.eye(S.D, dtype=np.int64)]
    span = S.span(rows)
    A = S.A
    m_rows = [S.relations.rows]
    for a in A.max_ideal.module_generators():
        ia = S.reduce(a @ S.iota)
        for r in span.rows:
            m_rows.append(S.mul(ia, r)[None, :])
    mspan = Span(np.vstack(m_rows), A.p, A.e, S.D)
    count = (span.log_order - mspan.log_order) // A.residue_degree
    gen = None
    if count == 1:
        gen = next(S.reduce(r) for r in span.rows if not mspan.contains(r))
    elif count == 0:
        gen = np.zeros(S.D, dtype=np.int64)
    inv = quotient_invariants(span, S.relations)
    return Corner(span, count, gen, span.log_order - S.relations.log_order, inv)


@dataclass
class GMADecomposition:
    S: TracedAlgebra
    residual: Residual
    e1: np.ndarray
    e2: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    corners: dict  # (i, j) -> Corner for e_i S e_j
    small_corners: dict  # (i, j) -> Corner for E_i S E_j
    tau_stable: bool
    checks: dict = field(default_factory=dict)

    @property
    def n1(self):
        return self.residual.n1

    @property
    def n2(self):
        return self.residual.n2

    def to_dict(self) -> dict:
        return {
            "n1": self.n1,
            "n2": self.n2,
            "S_order_log": self.S.log_order,
            "e1": self.e1.tolist(),
            "e2": self.e2.tolist(),
            "corners": {f"{i}{j}": c.to_dict() for (i, j), c in sorted(self.corners.items())},
            "A12_generators": self.small_corners[(1, 2)].generators,
            "A21_generators": self.small_corners[(2, 1)].generators,
            "tau_stable": self.tau_stable,
            "checks": self.checks,
        }


def gma_decompose(S: TracedAlgebra, e1, e2, residual: Residual, tau_stable: bool = False) -> GMADecomposition:
    A = S.A
    E1 = _rank_one_idempotent(S, residual, e1, 1)
    E2 = _rank_one_idempotent(S, residual, e2, 2)
    es = {1: e1, 2: e2}
    Es = {1: E1, 2: E2}
    corners = {(i, j): _corner(S, es[i], es[j]) for i in (1, 2) for j in (1, 2)}
    small = {(i, j): _corner(S, Es[i], Es[j]) for i in (1, 2) for j in (1, 2) if i != j}
    checks = {
        "idempotent": bool(S.equal(S.mul(e1, e1), e1) and S.equal(S.mul(e2, e2), e2)),
        "orthogonal": bool(not S.mul(e1, e2).any() and not S.mul(e2, e1).any()),
        "sum_is_one": bool(S.equal(S.add(e1, e2), S.unit)),
        "direct_sum_order": sum(c.log_order for c in corners.values()) == S.log_order,
    }
    if S.trace_mat is not None:
        checks["trace_e1"] = bool(A.equal(S.trace(e1), A.scalar(residual.n1)))
        checks["trace_e2"] = bool(A.equal(S.trace(e2), A.scalar(residual.n2)))
        m = A.max_ideal
        if not residual.irreducible:
            checks["offdiagonal_traces_in_m"] = all(
                m.contains(S.trace(S.mul(x, y)))
                for x in corners[(1, 2)].span.rows
                for y in corners[(2, 1)].span.rows
            )
    if tau_stable:
        checks["tau_fixes_idempotents"] = bool(S.equal(S.involution(e1), e1) and S.equal(S.involution(e2), e2))
    return GMADecomposition(S, residual, e1, e2, E1, E2, corners, small, tau_stable, checks)


def analyze(T: Pseudocharacter, tau: Involution | None = None, rng: random.Random | None = None) -> GMADecomposition:
    """Full pipeline from a pseudocharacter with residual data to its GMA."""
    if T.residual is None:
        raise errors.NotResidualIdempotent("pseudocharacter has no residual block data")
    if tau is not None and not T.is_self_dual(tau):
        raise errors.NotSelfDual("T is not invariant under the involution")
    S = cayley_hamilton_quotient(T, tau=tau)
    e1bar, e2bar = residual_idempotents(S, T.residual, rng=rng)
    pair = lift_idempotents(S, e1bar, e2bar, tau=tau is not None, residual=T.residual)
    return gma_decompose(S, pair.e1, pair.e2, T.residual, tau_stable=pair.tau_fixed)


def reducibility_ideal(gma: GMADecomposition) -> Ideal:
    """Ideal of A generated by ``T(a b)`` for ``a`` in A12 and ``b`` in A21."""
    S = gma.S
    gens = [S.trace(S.mul(x, y)) for x in gma.small_corners[(1, 2)].span.rows for y in gma.small_corners[(2, 1)].span.rows]
    return ideal_from_generators(S.A, gens)


def reducibility_ideal_of(T: Pseudocharacter, tau=None, rng=None) -> Ideal:
    return reducibility_ideal(analyze(T, tau=tau, rng=rng))


# -- principality ---------------------------------------------------------------------


@dataclass
class PrincipalityCertificate:
    generator: np.ndarray
    g12: np.ndarray
    g21: np.ndarray
    route: str  # "involution" or "cyclic corners"
    iso_witness: dict
    agrees_with_ring_check: bool

    def to_dict(self):
        return {
            "generator": self.generator.tolist(),
            "g12": self.g12.tolist(),
            "g21": self.g21.tolist(),
            "route": self.route,
            "iso_witness": self.iso_witness,
            "agrees_with_ring_check": self.agrees_with_ring_check,
        }


def principality_certificate(gma: GMADecomposition, T: Pseudocharacter | None = None, tau: Involution | None = None) -> PrincipalityCertificate:
    """Generator ``T(g12 g21)`` of the reducibility ideal.

    With an involution, ``g21`` is the involution image of ``g12`` and the
    witness records that the involution maps A12 onto A21.  Without one, both
    corners must be cyclic.
    """
    S, A = gma.S, gma.S.A
    I_T = reducibility_ideal(gma)
    c12, c21 = gma.small_corners[(1, 2)], gma.small_corners[(2, 1)]
    diag = {"A12_generators": c12.generators, "A21_generators": c21.generators}
    witness = {}
    if tau is not None:
        if T is not None and not T.is_self_dual(tau):
            raise errors.NotSelfDual("T is not invariant under the involution")
        if S.tau_mat is None or not gma.tau_stable:
            raise errors.NotSelfDual("idempotents are not fixed by the involution")
        # tau maps e1 S e2 onto e2 S e1 since tau(e_i) = e_i
        big12, big21 = gma.corners[(1, 2)].span, gma.corners[(2, 1)].span
        image = S.span([S.involution(r) for r in big12.rows])
        witness = {"maps_onto": image == big21, "orders_equal": big12.log_order == big21.log_order}
        if not (witness["maps_onto"] and witness["orders_equal"]):
            raise errors.CornersNotCyclic("involution does not identify the off-diagonal corners", {**diag, **witness})
        route = "involution"
    else:
        route = "cyclic corners"
    if c12.generators > 1 or c21.generators > 1:
        raise errors.CornersNotCyclic("off-diagonal corner is not cyclic", diag)
    g12 = c12.generator
    if route == "involution" and gma.n1 == 1 and gma.n2 == 1:
        g21 = S.involution(g12)
    else:
        g21 = c21.generator
    t = S.trace(S.mul(g12, g21))
    agrees = principal_ideal(A, t) == I_T
    if not agrees:
        raise errors.CornersNotCyclic("T(g12 g21) does not generate the reducibility ideal", diag)
    return PrincipalityCertificate(t, g12, g21, route, witness, agrees)


def nonzerodivisor_check(A: LocalAlgebra, t) -> bool:
    return is_nonzerodivisor(A, t)


# -- brute-force splitting --------------------------------------------------------------


def _vector_mul(Q: LocalAlgebra, X, Y):
    """Elementwise product of arrays of elements (..., d) with broadcasting."""
    Z = np.einsum("...x,...y,xyz->...z", X, Y, Q.c) % Q.q
    shape = Z.shape
    return Q.relations.reduce_many(Z.reshape(-1, Q.rank)).reshape(shape)


def is_pseudocharacter(G: FiniteGroup, Q: LocalAlgebra, values, n: int) -> bool:
    """``T(1) = n`` and the alternating identity over S_{n+1} on group elements."""
    values = np.asarray(values)
    if not Q.equal(values[G.identity], Q.scalar(n)):
        return False
    N, k = G.order, n + 1
    idx = np.indices((N,) * k)
    total = np.zeros((N,) * k + (Q.rank,), dtype=np.int64)
    for perm in itertools.permutations(range(k)):
        sign, seen, term = 1, set(), None
        for start in range(k):
            if start in seen:
                continue
            cyc, j = [], start
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = perm[j]
            if len(cyc) % 2 == 0:
                sign = -sign
            prod = idx[cyc[0]]
            for j in cyc[1:]:
                prod = G.table[prod, idx[j]]
            val = values[prod]
            term = val if term is None else _vector_mul(Q, term, val)
        total = (total + sign * term) % Q.q
    return not Q.relations.reduce_many(total.reshape(-1, Q.rank)).any()


def _residue_fn(A: LocalAlgebra, Q: LocalAlgebra, PQ, R: Residual):
    """Map Q-elements to F-elements through a lift to A."""
    cache = {}

    def residue(y):
        key = y.tobytes()
        if key not in cache:
            x = solve(PQ, y, A.p, A.e, target=Q.relations)
            cache[key] = R.field.reduce(x @ R.proj)
        return cache[key]

    return residue


def _character_lifts(G: FiniteGroup, Q: LocalAlgebra, target_bar, residue):
    """All characters G -> Q^x whose residues are ``target_bar`` (any unit when None)."""
    cands = []
    elems = list(Q.elements())
    for s in G.generators:
        if target_bar is None:
            cands.append([u for u in elems if Q.is_unit(u)])
        else:
            cands.append([u for u in elems if np.array_equal(residue(u), target_bar[s])])
    for choice in itertools.product(*cands):
        by_gen = dict(zip(G.generators, choice))
        vals = np.zeros((G.order, Q.rank), dtype=np.int64)
        for g, parent, s in G.spanning_tree:
            vals[g] = Q.one if parent is None else Q.mul(vals[parent], by_gen[s])
        prods = _vector_mul(Q, vals[:, None, :], vals[None, :, :])
        if np.array_equal(prods, vals[G.table]):
            yield vals


def _class_function_lifts(G: FiniteGroup, Q: LocalAlgebra, target_bar, residue):
    elems = list(Q.elements())
    classes = G.conjugacy_classes
    cands = [[u for u in elems if np.array_equal(residue(u), target_bar[cls[0]])] for cls in classes]
    for choice in itertools.product(*cands):
        vals = np.zeros((G.order, Q.rank), dtype=np.int64)
        for cls, v in zip(classes, choice):
            vals[cls] = v
        yield vals


def splits_mod(T: Pseudocharacter, I: Ideal) -> bool:
    """Whether ``T mod I = T1 + T2`` with pseudocharacters ``T_i`` lifting ``tr tau_i``."""
    if I.is_unit_ideal():
        return True
    R = T.residual
    A, G = T.algebra, T.group
    Q, TQ, PQ = T.reduce_mod(I)
    if R.irreducible:
        # no residual constraint: any character of G into (A/I)^x
        for chi in _character_lifts(G, Q, None, None):
            if is_pseudocharacter(G, Q, Q.relations.reduce_many(TQ - chi), 1):
                return True
        return False
    residue = _residue_fn(A, Q, PQ, R)
    t1, t2 = R.tau1.traces, R.tau2.traces
    if R.n1 == 1 or R.n2 == 1:
        first_is_char = R.n1 == 1
        tbar = t1 if first_is_char else t2
        other_dim = R.n2 if first_is_char else R.n1
        for chi in _character_lifts(G, Q, tbar, residue):
            rest = Q.relations.reduce_many(TQ - chi)
            if is_pseudocharacter(G, Q, rest, other_dim):
                return True
        return False
    for T1 in _class_function_lifts(G, Q, t1, residue):
        if is_pseudocharacter(G, Q, T1, R.n1) and is_pseudocharacter(G, Q, Q.relations.reduce_many(TQ - T1), R.n2):
            return True
    return False


def _guard(A: LocalAlgebra):
    if A.log_order > EXHAUSTION_CAP_LOG:
        raise errors.TooLargeForExhaustion(f"|A| = {A.p}^{A.log_order} exceeds exhaustive cap")


@dataclass
class SplittingSearch:
    splitting: list
    minimal: list

    @property
    def smallest(self) -> Ideal | None:
        """The unique minimal splitting ideal when it is contained in all others."""
        if len(self.minimal) != 1:
            return None
        m = self.minimal[0]
        return m if all(I.contains_ideal(m) for I in self.splitting) else None


def smallest_splitting_ideal(T: Pseudocharacter) -> SplittingSearch:
    A = T.algebra
    _guard(A)
    ideals = all_ideals(A)
    split = [I for I in ideals if splits_mod(T, I)]
    minimal = [I for I in split if not any(J != I and I.contains_ideal(J) for J in split)]
    return SplittingSearch(split, minimal)


def verify_minimality(T: Pseudocharacter, I_T: Ideal) -> bool:
    """``T mod I_T`` splits and no maximal proper subideal of ``I_T`` does."""
    A = T.algebra
    _guard(A)
    if not splits_mod(T, I_T):
        return False
    subs = [J for J in all_ideals(A) if J != I_T and I_T.contains_ideal(J)]
    maximal = [J for J in subs if not any(K != J and K.contains_ideal(J) for K in subs)]
    return not any(splits_mod(T, J) for J in maximal)


# -- block triangularization --------------------------------------------------------------


@dataclass
class Triangularization:
    success: bool
    layer: int | None  # first layer without a solution
    conjugator: np.ndarray | None
    blocks: tuple | None
    algebra: LocalAlgebra | None

    def to_dict(self):
        return {
            "success": self.success,
            "obstruction_layer": self.layer,
            "conjugator": None if self.conjugator is None else self.conjugator.tolist(),
        }


def _lower_left(Q, m, X, n1):
    """Lower-left block of ``P m P^-1`` with ``P = [[1, 0], [X, 1]]``."""
    a, b = m[:n1, :n1], m[:n1, n1:]
    c, d = m[n1:, :n1], m[n1:, n1:]
    return mat_reduce(Q, c + mat_mul(Q, X, a) - mat_mul(Q, d, X) - mat_mul(Q, mat_mul(Q, X, b), X))


def _conjugator(Q, X, n1, n2):
    P = mat_identity(Q, n1 + n2)
    P[n1:, :n1] = X
    return P


def block_triangularize(rho: GroupRep, I: Ideal, n1: int | None = None) -> Triangularization:
    """Conjugate ``rho mod I`` to block upper-triangular form, layer by layer in ``m^j``.

    At layer ``j`` the correction ``Y`` in ``M(m^j)`` solves
    ``Y a - d Y = -L(X) mod m^(j+1)``; it is unique because the residual
    diagonal blocks share no homomorphisms.
    """
    n1 = n1 if n1 is not None else rho.blocks[0]
    n = rho.degree
    n2 = n - n1
    if I.is_unit_ideal():
        return Triangularization(True, None, None, None, None)
    Q, P = quotient_algebra(rho.algebra, I, with_map=True)
    rq = rho.base_change(Q, P)
    gens = [rq.images[s] for s in rq.group.generators]
    X = np.zeros((n2, n1, Q.rank), dtype=np.int64)
    m = Q.max_ideal
    size = n2 * n1 * Q.rank
    j, power = 1, m
    # invariant: the lower-left blocks lie in M(m^j)
    while True:
        low = [_lower_left(Q, g, X, n1) for g in gens]
        if not any(x.any() for x in low):
            break
        nxt = ideal_power(m, j + 1)
        basis = [r for r in power.span.rows if Q.reduce(r).any()]
        cols = []
        for pos in range(n2 * n1):
            for r in basis:
                Y = np.zeros((n2 * n1, Q.rank), dtype=np.int64)
                Y[pos] = r
                Y = Y.reshape(n2, n1, Q.rank)
                img = [mat_mul(Q, Y, g[:n1, :n1]) - mat_mul(Q, g[n1:, n1:], Y) for g in gens]
                cols.append(np.concatenate([x.reshape(-1) for x in img]) % Q.q)
        M = np.array(cols)
        target = Span(np.kron(np.eye(n2 * n1 * len(gens), dtype=np.int64), nxt.span.rows), Q.p, Q.e, size * len(gens))
        rhs = np.concatenate([(-x).reshape(-1) for x in low]) % Q.q
        u = solve(M, rhs, Q.p, Q.e, target=target)
        if u is None:
            return Triangularization(False, j, None, None, Q)
        Y = np.zeros((n2 * n1, Q.rank), dtype=np.int64)
        k = 0
        for pos in range(n2 * n1):
            for r in basis:
                Y[pos] = Y[pos] + u[k] * r
                k += 1
        X = mat_reduce(Q, X + Y.reshape(n2, n1, Q.rank))
        j, power = j + 1, nxt
    Pc = _conjugator(Q, X, n1, n2)
    Pinv = mat_inv(Q, Pc)
    conj = np.array([mat_mul(Q, mat_mul(Q, Pc, g), Pinv) for g in rq.images])
    assert not Q.relations.reduce_many(conj[:, n1:, :n1].reshape(-1, Q.rank)).any()
    return Triangularization(True, None, Pc, (conj[:, :n1, :n1], conj[:, n1:, n1:]), Q)


def exhaustive_triangularizable(rho: GroupRep, I: Ideal, n1: int | None = None) -> bool:
    """Search every ``X`` in ``M(m_Q)`` for a block upper-triangular conjugate."""
    n1 = n1 if n1 is not None else rho.blocks[0]
    if I.is_unit_ideal():
        return True
    Q, P = quotient_algebra(rho.algebra, I, with_map=True)
    rq = rho.base_change(Q, P)
    n2 = rho.degree - n1
    gens = [rq.images[s] for s in rq.group.generators]
    mel = list(Q.max_ideal.elements())
    for entries in itertools.product(mel, repeat=n2 * n1):
        X = np.array(entries).reshape(n2, n1, Q.rank)
        if not any(_lower_left(Q, g, X, n1).any() for g in gens):
            return True
    return False


def strict_conjugator(rho_a: GroupRep, rho_b: GroupRep):
    """``Z = 1 + W`` with ``W`` in ``M(m)`` and ``Z rho_a = rho_b Z``, or ``None``."""
    A = rho_a.algebra
    n = rho_a.degree
    gens = rho_a.group.generators
    m = A.max_ideal
    basis = [r for r in m.span.rows if A.reduce(r).any()]
    if not basis:
        ok = all(mat_equal(A, rho_a.images[s], rho_b.images[s]) for s in gens)
        return mat_identity(A, n) if ok else None
    cols = []
    for pos in range(n * n):
        for r in basis:
            W = np.zeros((n * n, A.rank), dtype=np.int64)
            W[pos] = r
            W = W.reshape(n, n, A.rank)
            img = [mat_mul(A, W, rho_a.images[s]) - mat_mul(A, rho_b.images[s], W) for s in gens]
            cols.append(np.concatenate([x.reshape(-1) for x in img]) % A.q)
    rhs = np.concatenate([(rho_b.images[s] - rho_a.images[s]).reshape(-1) for s in gens]) % A.q
    target = _block_relations(A, n * n * len(gens))
    u = solve(np.array(cols), rhs, A.p, A.e, target=target)
    if u is None:
        return None
    W = np.zeros((n * n, A.rank), dtype=np.int64)
    k = 0
    for pos in range(n * n):
        for r in basis:
            W[pos] = W[pos] + u[k] * r
            k += 1
    return mat_reduce(A, mat_identity(A, n) + W.reshape(n, n, A.rank))
