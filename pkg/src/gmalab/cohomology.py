"""H^0 and H^1 of finite groups with coefficients in finite Z/p^e-modules.

A :class:`GModule` is ``(Z/q)^r / rel`` with right-acting matrices:
``g.x = x @ action[g]``, so ``action[gh] = action[h] @ action[g]``.
Cocycles are stored as full value vectors on G (length ``N*r``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import errors
from .groups import FiniteGroup, GroupRep, hom_action
from .ring import LocalAlgebra, mat_mul, mat_reduce
from .zmod import Span, kernel, quotient_invariants, quotient_representatives

DEFAULT_BUDGET = 200_000  # cap on (N * r)^2 entries of a linear system


class GModule:
    def __init__(self, group: FiniteGroup, p: int, e: int, action, relations=None, label=None, check=True):
        self.group = group
        self.p, self.e, self.q = p, e, p**e
        self.action = np.asarray(action, dtype=np.int64) % self.q
        self.rank = r = self.action.shape[1]
        if relations is None:
            self.relations = Span.zero(p, e, r)
        elif isinstance(relations, Span):
            self.relations = relations
        else:
            self.relations = Span(np.asarray(relations).reshape(-1, r), p, e, r)
        self.label = label or f"module of rank {r}"
        if check:
            self._check()

    def _check(self):
        G = self.group
        M = self.action
        rel = self.relations
        r = self.rank
        if rel.reduce_many(M[G.identity] - np.eye(r, dtype=np.int64)).any():
            raise errors.RelationViolated("identity does not act trivially")
        for g in range(G.order):
            if not rel.is_zero() and rel.reduce_many(rel.rows @ M[g]).any():
                raise errors.RelationViolated("relations are not stable under the action")
            comp = np.einsum("hij,jk->hik", M, M[g]) % self.q  # action[h] @ action[g] = action[gh]
            diff = comp - M[G.table[g]]
            if rel.reduce_many(diff.reshape(-1, r)).any():
                raise errors.RelationViolated("action is not a homomorphism")

    def __repr__(self):
        return f"<GModule {self.label} over Z/{self.p}^{self.e}, rank {self.rank}>"

    @property
    def log_order(self) -> int:
        return self.rank * self.e - self.relations.log_order

    @property
    def order(self) -> int:
        return self.p**self.log_order

    def act(self, g, x) -> np.ndarray:
        return self.relations.reduce(np.asarray(x) @ self.action[g])

    def elements(self):
        return quotient_representatives(self.relations)

    def invariants(self) -> list:
        return quotient_invariants(Span.full(self.p, self.e, self.rank), self.relations)

    def restrict(self, H: FiniteGroup) -> "GModule":
        """Restriction to a subgroup built with :meth:`FiniteGroup.sub`."""
        return GModule(H, self.p, self.e, self.action[H.embedding], self.relations, label=f"res {self.label}", check=False)

    def truncate(self, k: int) -> "GModule":
        """``M / p^k M``."""
        rel = self.relations.add_rows(self.p**k * np.eye(self.rank, dtype=np.int64))
        return GModule(self.group, self.p, self.e, self.action, rel, label=f"{self.label}/p^{k}", check=False)

    def block_relations(self, count: int) -> Span:
        if self.relations.is_zero():
            return Span.zero(self.p, self.e, count * self.rank)
        return Span(np.kron(np.eye(count, dtype=np.int64), self.relations.rows), self.p, self.e, count * self.rank)

    def to_dict(self) -> dict:
        return {"label": self.label, "rank": self.rank, "invariants": self.invariants()}


def trivial_module(G: FiniteGroup, p: int, e: int, rank: int = 1) -> GModule:
    act = np.broadcast_to(np.eye(rank, dtype=np.int64), (G.order, rank, rank)).copy()
    return GModule(G, p, e, act, label="trivial")


def character_module(G: FiniteGroup, p: int, e: int, values, label="character") -> GModule:
    """Rank-1 module from integer character values on all elements."""
    act = np.asarray(values, dtype=np.int64).reshape(G.order, 1, 1)
    return GModule(G, p, e, act, label=label)


def module_of_rep(rho: GroupRep) -> GModule:
    """Underlying A^n of ``rho`` as a Z/q-module, coordinates ``(i, x)`` for ``b_x e_i``."""
    A = rho.algebra
    n, d = rho.degree, A.rank
    eye = np.eye(d, dtype=np.int64)
    act = np.zeros((rho.group.order, n * d, n * d), dtype=np.int64)
    for g in range(rho.group.order):
        for i in range(n):
            for x in range(d):
                col = np.einsum("kz,zy->ky", rho.images[g][:, i, :], A.mult_matrix(eye[x])) % A.q
                act[g, i * d + x] = A.relations.reduce_many(col).reshape(-1)
    rel = np.kron(np.eye(n, dtype=np.int64), A.relations.rows) if not A.relations.is_zero() else None
    return GModule(rho.group, A.p, A.e, act, rel, label=f"underlying {rho.label}")


def hom_module(r1: GroupRep, r2: GroupRep) -> GModule:
    """Hom(r2, r1) with ``g.m = r1(g) m r2(g)^-1``."""
    A = r1.algebra
    act = hom_action(r1, r2)
    count = r1.degree * r2.degree
    rel = np.kron(np.eye(count, dtype=np.int64), A.relations.rows) if not A.relations.is_zero() else None
    return GModule(r1.group, A.p, A.e, act, rel, label=f"Hom({r2.label},{r1.label})")


def adjoint_module(rho: GroupRep) -> GModule:
    M = hom_module(rho, rho)
    M.label = f"ad {rho.label}"
    return M


# -- H^0 and H^1 -------------------------------------------------------------------


def h0(M: GModule) -> Span:
    """Invariants, as a span containing the relations."""
    G = M.group
    eye = np.eye(M.rank, dtype=np.int64)
    blocks = np.hstack([(M.action[s] - eye) % M.q for s in G.generators])
    target = M.block_relations(len(G.generators))
    return kernel(blocks, M.p, M.e, target=target) + M.relations


@dataclass
class CocycleSpace:
    module: GModule
    z1: Span  # full value vectors, contains the relation padding
    b1: Span
    invariants: list = field(default_factory=list)

    @property
    def log_order(self) -> int:
        """log_p |H^1| (or of the Selmer group)."""
        return self.z1.log_order - self.b1.log_order

    @property
    def order(self) -> int:
        return self.module.p**self.log_order

    @property
    def dimension(self) -> int:
        """Number of invariant factors (``dim_F`` when the module is killed by p)."""
        return len(self.invariants)

    def cocycles(self) -> list:
        N, r = self.module.group.order, self.module.rank
        return [row.reshape(N, r) for row in self.z1.rows]

    def class_of(self, values) -> np.ndarray:
        return self.b1.reduce(np.asarray(values).reshape(-1))

    def contains(self, values) -> bool:
        return self.z1.contains(np.asarray(values).reshape(-1))

    def to_dict(self) -> dict:
        return {"order": self.order, "invariants": self.invariants, "dimension": self.dimension}


def _check_budget(M: GModule, budget):
    size = M.group.order * M.rank
    if budget is not None and size * size > budget:
        raise errors.BudgetExceeded(f"linear system of size {size} exceeds budget")


def tree_matrices(M: GModule) -> np.ndarray:
    """``L[g]`` with ``c(g) = u @ L[g]`` for ``u`` the stacked generator values."""
    G = M.group
    k, r = len(G.generators), M.rank
    L = np.zeros((G.order, k * r, r), dtype=np.int64)
    gpos = {s: i for i, s in enumerate(G.generators)}
    for g, parent, s in G.spanning_tree:
        if parent is None:
            continue
        E = np.zeros((k * r, r), dtype=np.int64)
        E[gpos[s] * r : (gpos[s] + 1) * r] = np.eye(r, dtype=np.int64)
        L[g] = (L[parent] + E @ M.action[parent]) % M.q
    return L


def coboundaries(M: GModule) -> Span:
    G = M.group
    eye = np.eye(M.rank, dtype=np.int64)
    rows = [np.concatenate([(m @ M.action[g] - m) % M.q for g in range(G.order)]) for m in eye]
    return Span(np.array(rows), M.p, M.e, G.order * M.rank) + M.block_relations(G.order)


def cocycles(M: GModule, method: str = "generators", budget: int | None = DEFAULT_BUDGET) -> Span:
    """Z^1 as full value vectors.

    ``method="generators"`` solves ``c(gs) = c(g) + g.c(s)`` for generators
    ``s``; ``method="pairs"`` imposes the identity on every pair of elements.
    """
    G = M.group
    N, r = G.order, M.rank
    _check_budget(M, budget)
    if method == "pairs":
        eye = np.eye(N * r, dtype=np.int64)
        cols = []
        for g in range(N):
            for h in range(N):
                C = np.zeros((N * r, r), dtype=np.int64)
                gh = G.table[g, h]
                C[gh * r : (gh + 1) * r] += np.eye(r, dtype=np.int64)
                C[g * r : (g + 1) * r] -= np.eye(r, dtype=np.int64)
                C[h * r : (h + 1) * r] -= M.action[g]
                cols.append(C % M.q)
        sysm = np.hstack(cols)
        ker = kernel(sysm, M.p, M.e, target=M.block_relations(N * N))
        del eye
        return ker + M.block_relations(N)
    if method != "generators":
        raise ValueError(f"unknown method {method!r}")
    L = tree_matrices(M)
    k = len(G.generators)
    cols = []
    for g in range(N):
        for i, s in enumerate(G.generators):
            E = np.zeros((k * r, r), dtype=np.int64)
            E[i * r : (i + 1) * r] = np.eye(r, dtype=np.int64)
            cols.append((L[G.table[g, s]] - L[g] - E @ M.action[g]) % M.q)
    sysm = np.hstack(cols)
    u = kernel(sysm, M.p, M.e, target=M.block_relations(N * k))
    full = L.transpose(1, 0, 2).reshape(k * r, N * r)
    rows = u.rows @ full % M.q
    return Span(rows, M.p, M.e, N * r) + M.block_relations(N)


def h1(M: GModule, method: str = "generators", budget: int | None = DEFAULT_BUDGET) -> CocycleSpace:
    z1 = cocycles(M, method=method, budget=budget)
    b1 = coboundaries(M)
    if not z1.contains_span(b1):
        raise AssertionError("coboundaries are not cocycles")
    return CocycleSpace(M, z1, b1, quotient_invariants(z1, b1))


def is_cocycle_values(M: GModule, values) -> bool:
    G = M.group
    V = np.asarray(values, dtype=np.int64).reshape(G.order, M.rank)
    for g in range(G.order):
        diff = V[G.table[g]] - V[g][None, :] - V @ M.action[g]
        if M.relations.reduce_many(diff).any():
            return False
    return True


def exhaustive_h1(M: GModule) -> dict:
    """Enumerate every assignment of generator values and every coboundary."""
    G = M.group
    L = tree_matrices(M)
    k = len(G.generators)
    elems = list(M.elements())
    full = L.transpose(1, 0, 2).reshape(k * M.rank, G.order * M.rank)
    rel_all = M.block_relations(G.order)
    z = 0
    for choice in itertools.product(elems, repeat=k):
        u = np.concatenate(choice)
        vals = u @ full % M.q
        if is_cocycle_values(M, vals):
            z += 1
    b = {rel_all.reduce(np.concatenate([(m @ M.action[g] - m) % M.q for g in range(G.order)])).tobytes() for m in elems}
    return {"z1": z, "b1": len(b), "h1": z // len(b)}


def hom_order_trivial(G: FiniteGroup, q: int) -> int:
    """``|Hom(G, Z/q)|`` by brute force over generator images."""
    count = 0
    for vals in itertools.product(range(q), repeat=len(G.generators)):
        f = np.zeros(G.order, dtype=np.int64)
        by_gen = dict(zip(G.generators, vals))
        for g, parent, s in G.spanning_tree:
            if parent is not None:
                f[g] = (f[parent] + by_gen[s]) % q
        if all((f[G.table[g, h]] - f[g] - f[h]) % q == 0 for g in range(G.order) for h in range(G.order)):
            count += 1
    return count


# -- local conditions and Selmer groups ----------------------------------------------


@dataclass
class LocalCondition:
    subgroup: list  # generators of H; cocycle vectors are indexed by sorted elements of H
    kind: str = "generators"  # "zero", "full" or "generators"
    generators: list = field(default_factory=list)  # cocycle value vectors on H
    label: str = ""

    def to_dict(self):
        return {"subgroup": list(self.subgroup), "kind": self.kind, "label": self.label}


def restriction_matrix(M: GModule, H: FiniteGroup) -> np.ndarray:
    N, r = M.group.order, M.rank
    R = np.zeros((N * r, H.order * r), dtype=np.int64)
    for i, g in enumerate(H.embedding):
        R[g * r : (g + 1) * r, i * r : (i + 1) * r] = np.eye(r, dtype=np.int64)
    return R


def subgroup_of(G: FiniteGroup, gens) -> FiniteGroup:
    """Subgroup generated by ``gens``; elements in increasing index order."""
    return G.sub(G.subgroup(gens), label=f"<{','.join(map(str, gens))}>")


def condition_span(M: GModule, cond: LocalCondition):
    """``(H, MH, span)`` with ``span`` the allowed cocycles on H (contains B^1(H))."""
    H = subgroup_of(M.group, cond.subgroup)
    MH = M.restrict(H)
    base = coboundaries(MH)
    if cond.kind == "zero":
        return H, MH, base
    if cond.kind == "full":
        return H, MH, cocycles(MH)
    gens = [np.asarray(v, dtype=np.int64).reshape(-1) for v in cond.generators]
    for v in gens:
        if not is_cocycle_values(MH, v):
            raise errors.NotACocycle("local condition generator is not a cocycle on the subgroup")
    return H, MH, base.add_rows(np.array(gens).reshape(-1, H.order * M.rank)) if gens else base


def _conditioned(M: GModule, z1: Span, conditions) -> Span:
    if not conditions:
        return z1
    Z = z1.rows
    cols, targets = [], []
    for cond in conditions:
        if cond.kind == "full":
            continue
        H, MH, allowed = condition_span(M, cond)
        cols.append(Z @ restriction_matrix(M, H) % M.q)
        targets.append(allowed)
    if not cols:
        return z1
    sysm = np.hstack(cols)
    width = sysm.shape[1]
    rows, off = [], 0
    for t in targets:
        block = np.zeros((t.rows.shape[0], width), dtype=np.int64)
        block[:, off : off + t.n] = t.rows
        rows.append(block)
        off += t.n
    target = Span(np.vstack(rows), M.p, M.e, width)
    coeffs = kernel(sysm, M.p, M.e, target=target)
    return Span(coeffs.rows @ Z % M.q, M.p, M.e, z1.n) + M.block_relations(M.group.order)


def selmer(M: GModule, conditions=(), method: str = "generators") -> CocycleSpace:
    """Classes whose restriction to each subgroup lies in the declared condition."""
    full = h1(M, method=method)
    sel = _conditioned(M, full.z1, list(conditions)) + full.b1
    return CocycleSpace(M, sel, full.b1, quotient_invariants(sel, full.b1))


# -- torsion functoriality -------------------------------------------------------------


def _pn_torsion(space: CocycleSpace, n: int) -> Span:
    """Cocycles whose class is killed by p^n."""
    M = space.module
    Z = space.z1.rows
    coeffs = kernel(Z * M.p**n % M.q, M.p, M.e, target=space.b1)
    return Span(coeffs.rows @ Z % M.q, M.p, M.e, space.z1.n) + space.b1


def _image_mod(span: Span, factor: int, b1: Span, q: int) -> Span:
    return Span(span.rows * factor % q, span.p, span.k, span.n) + b1


@dataclass
class FunctorialityReport:
    n: int
    h0_zero: bool
    first_term_log: int  # coker(H^0(W) -> H^0(W_{e-n}))
    naive_first_term_log: int  # H^0(W) / p^n H^0(W) on the truncated module
    h1_Wn_log: int
    h1_W_torsion_log: int  # H^1(W)[p^n] computed on the truncation
    ker_pi_log: int  # ker(H^1(W) -> H^1(W_{e-n})); equals the line above when H^0(W) = 0
    image_iota_log: int
    kernel_iota_log: int
    connecting_image_log: int
    exact_at_h1_Wn: bool
    exact_at_h1_W: bool
    orders_balance: bool
    iso: bool  # iota_* injective with image H^1(W)[p^n]
    selmer: dict | None = None

    def three_term_identity(self) -> bool:
        """``|H^1(W_n)| = |H^0 term| * |H^1(W)[p^n]|`` with both outer terms
        realized through ``W -> p^n W``: the cokernel on H^0 and ``ker pi_*``."""
        return self.h1_Wn_log == self.first_term_log + self.ker_pi_log

    def literal_identity(self) -> bool:
        """The same identity with ``H^0(W)/p^n`` and ``H^1(W)[p^n]`` taken literally on the truncation."""
        return self.h1_Wn_log == self.naive_first_term_log + self.h1_W_torsion_log

    def to_dict(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "selmer"}
        out["three_term_identity"] = self.three_term_identity()
        out["literal_identity"] = self.literal_identity()
        if self.selmer is not None:
            out["selmer"] = self.selmer
        return out


def torsion_functoriality_check(W: GModule, n: int, conditions=()) -> FunctorialityReport:
    """Compare ``H^1(W_n)`` with ``H^1(W)[p^n]`` through ``0 -> W_n -> W -> W_{e-n} -> 0``.

    ``W`` is free over Z/p^e; ``W_n = W[p^n]`` is modelled as ``W / p^n``
    with inclusion ``x -> p^(e-n) x``, and ``W -> W_{e-n}`` is reduction,
    which is multiplication by p^n onto ``p^n W``.  On a truncation
    ``H^1(p^n W) -> H^1(W)`` need not be injective, so the literal
    ``H^1(W)[p^n]`` can exceed ``ker pi_*`` once ``H^0(W) != 0``; both are
    reported.
    """
    p, e, q = W.p, W.e, W.q
    if not W.relations.is_zero():
        raise ValueError("torsion functoriality expects a free module")
    if not 1 <= n <= e:
        raise ValueError("need 1 <= n <= e")
    N = W.group.order
    Wn = W.truncate(n)
    We = W.truncate(e - n) if n < e else None
    iota = p ** (e - n)
    H1W, H1n = h1(W), h1(Wn)
    h0W = h0(W)
    h0W_log = h0W.log_order
    naive = h0W_log - Span(h0W.rows * p**n % q, p, e, W.rank).log_order
    if We is not None:
        h0e = h0(We)
        image = h0W + We.relations
        first = h0e.log_order - image.log_order
        H1e_b1 = coboundaries(We)
        # classes of H^1(W) dying in H^1(W_{e-n})
        coeffs = kernel(H1W.z1.rows, p, e, target=H1e_b1)
        ker_pi = Span(coeffs.rows @ H1W.z1.rows % q, p, e, N * W.rank) + H1W.b1
        # connecting map: x in H^0(W_{e-n}) -> (g.x - x) / p^(e-n)
        delta_rows = []
        for x in h0e.rows:
            vals = np.concatenate([(x @ W.action[g] - x) % q for g in range(N)])
            assert not (vals % iota).any()
            delta_rows.append(vals // iota)
        delta = Span(np.array(delta_rows).reshape(-1, N * W.rank), p, e, N * W.rank) + H1n.b1
    else:
        first = 0
        ker_pi = H1W.z1
        delta = H1n.b1
    img = _image_mod(H1n.z1, iota, H1W.b1, q)
    coeffs = kernel(H1n.z1.rows * iota % q, p, e, target=H1W.b1)
    ker_iota = Span(coeffs.rows @ H1n.z1.rows % q, p, e, N * W.rank) + H1n.b1
    tors = _pn_torsion(H1W, n)
    image_log = img.log_order - H1W.b1.log_order
    kernel_log = ker_iota.log_order - H1n.b1.log_order
    report = FunctorialityReport(
        n=n,
        h0_zero=h0W_log == 0,
        first_term_log=first,
        naive_first_term_log=naive,
        h1_Wn_log=H1n.log_order,
        h1_W_torsion_log=tors.log_order - H1W.b1.log_order,
        ker_pi_log=ker_pi.log_order - H1W.b1.log_order,
        image_iota_log=image_log,
        kernel_iota_log=kernel_log,
        connecting_image_log=delta.log_order - H1n.b1.log_order,
        exact_at_h1_Wn=delta == ker_iota,
        exact_at_h1_W=img == ker_pi,
        orders_balance=H1n.log_order == kernel_log + image_log and kernel_log == first,
        iso=kernel_log == 0 and img == tors,
    )
    if conditions:
        report.selmer = _selmer_functoriality(W, Wn, n, iota, conditions)
    return report


def _selmer_functoriality(W: GModule, Wn: GModule, n: int, iota: int, conditions) -> dict:
    """Selmer groups with conditions on W_n induced by pulling back along iota."""
    p, e, q = W.p, W.e, W.q
    N = W.group.order
    SW = selmer(W, conditions)
    H1n = h1(Wn)
    # induced condition: c in Z^1(W_n) with iota(c) in Sel(W) (restriction-wise)
    induced = []
    for cond in conditions:
        if cond.kind == "full":
            continue
        H, MH, allowed = condition_span(W, cond)
        R = restriction_matrix(W, H)
        Z = H1n.z1.rows
        induced.append((Z * iota % q) @ R % q)
        induced.append(allowed)
    if induced:
        mats = induced[0::2]
        targets = induced[1::2]
        sysm = np.hstack(mats)
        rows, off = [], 0
        for t in targets:
            block = np.zeros((t.rows.shape[0], sysm.shape[1]), dtype=np.int64)
            block[:, off : off + t.n] = t.rows
            rows.append(block)
            off += t.n
        coeffs = kernel(sysm, p, e, target=Span(np.vstack(rows), p, e, sysm.shape[1]))
        seln = Span(coeffs.rows @ H1n.z1.rows % q, p, e, N * W.rank) + H1n.b1
    else:
        seln = H1n.z1
    tors = _pn_torsion(SW, n)
    img = _image_mod(seln, iota, SW.b1, q)
    return {
        "selmer_Wn_log": seln.log_order - H1n.b1.log_order,
        "selmer_W_torsion_log": tors.log_order - SW.b1.log_order,
        "image_matches": img == tors,
    }


# -- deformations to dual numbers -------------------------------------------------------


@dataclass
class TangentReport:
    h1_log: int
    dimension: int
    blocks: dict
    upper_triangular_log: int
    basis: list  # cocycles on all of G, shape (N, n, n)

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "h1_order_log": self.h1_log,
            "blocks": self.blocks,
            "upper_triangular_dimension": self.upper_triangular_log,
        }


def _block_positions(n: int, n1: int) -> dict:
    out = {}
    for i in range(n):
        for j in range(n):
            key = ("1" if i < n1 else "2") + ("1" if j < n1 else "2")
            out.setdefault(key, []).append(i * n + j)
    return out


def tangent_space(rho0: GroupRep, conditions=(), n1: int | None = None) -> TangentReport:
    """Deformations of ``rho0`` to ``F[eps]`` up to strict equivalence: ``H^1(G, ad rho0)``.

    ``blocks`` reports ``H^1`` of each block of ``ad`` (``"12"`` is
    Hom(rho_2, rho_1)) and the upper-triangular family is the image of
    block-upper-triangular Selmer cocycles in ``H^1(ad)``.
    """
    A = rho0.algebra
    if not A.is_field():
        raise errors.NotAField("tangent space needs a representation over a field")
    n = rho0.degree
    n1 = n1 if n1 is not None else (rho0.blocks[0] if rho0.blocks else n)
    ad = adjoint_module(rho0)
    sel = selmer(ad, conditions)
    d = A.rank
    N = rho0.group.order
    blocks = {}
    if n1 < n:
        r1 = GroupRep(rho0.group, A, rho0.images[:, :n1, :n1], check=False, label="rho1")
        r2 = GroupRep(rho0.group, A, rho0.images[:, n1:, n1:], check=False, label="rho2")
        for key, (a, b) in {"11": (r1, r1), "12": (r1, r2), "21": (r2, r1), "22": (r2, r2)}.items():
            blocks[key] = len(h1(hom_module(a, b)).invariants) // A.residue_degree
        # block-upper-triangular cocycles: lower-left coordinates vanish everywhere
        pos = _block_positions(n, n1)["21"]
        cols = []
        for g in range(N):
            for ij in pos:
                for x in range(d):
                    col = np.zeros(N * n * n * d, dtype=np.int64)
                    col[g * n * n * d + ij * d + x] = 1
                    cols.append(col)
        sysm = np.array(cols).T
        coeffs = kernel(sel.z1.rows @ sysm % A.q, A.p, A.e)
        upper = Span(coeffs.rows @ sel.z1.rows % A.q, A.p, A.e, sel.z1.n) + sel.b1
        upper_log = (upper.log_order - sel.b1.log_order) // A.residue_degree
    else:
        upper_log = sel.log_order // A.residue_degree
    basis = []
    for row in sel.z1.rows:
        if not sel.b1.contains(row):
            basis.append(row.reshape(N, n, n, d))
    return TangentReport(sel.log_order, len(sel.invariants) // A.residue_degree, blocks, upper_log, basis)


def deformation_from_cocycle(rho: GroupRep, xi, mu, B: LocalAlgebra, lift: GroupRep | None = None) -> GroupRep:
    """``g -> (1 + mu xi(g)) rho_L(g)`` over ``B`` (needs ``mu^2 = 0``).

    ``xi`` is a cocycle for ``ad`` of the residual representation with
    integer entries; ``lift`` is a representation over ``B`` reducing to it.
    """
    G = rho.group
    n = rho.degree
    lift = lift if lift is not None else rho
    xi = np.asarray(xi, dtype=np.int64).reshape(G.order, n, n, -1)[..., 0]
    mu = B.elem(mu)
    images = []
    for g in range(G.order):
        X = np.einsum("ij,x->ijx", xi[g], mu) % B.q
        one = np.zeros((n, n, B.rank), dtype=np.int64)
        for i in range(n):
            one[i, i] = B.one
        images.append(mat_mul(B, mat_reduce(B, one + X), lift.images[g]))
    return GroupRep(G, B, np.array(images), label=f"deformation of {rho.label}", blocks=rho.blocks)


# -- Tamagawa bookkeeping -------------------------------------------------------------------


@dataclass
class TamagawaReport:
    declared: bool
    divisible: bool | None
    flag: str
    invariants: list | None = None

    def to_dict(self):
        return {"declared": self.declared, "divisible": self.divisible, "flag": self.flag, "invariants": self.invariants}


def tamagawa_inputs(W: GModule, inertia=None, invariant_span: Span | None = None) -> TamagawaReport:
    """Record whether the inertia invariants of W are divisible at the truncation level.

    ``inertia`` is a list of element indices; ``invariant_span`` may be given
    directly instead (a declared submodule).
    """
    if inertia is None and invariant_span is None:
        return TamagawaReport(False, None, "H1_Sigma vs H1_f identification unchecked")
    if invariant_span is None:
        H = subgroup_of(W.group, inertia)
        invariant_span = h0(W.restrict(H))
    inv = quotient_invariants(invariant_span + W.relations, W.relations)
    divisible = bool(inv) and all(f == W.q for f in inv)
    flag = "Tamagawa-trivial (truncation-level)" if divisible else f"not divisible at level {W.e}"
    return TamagawaReport(True, divisible, flag, inv)

