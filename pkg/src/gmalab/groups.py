"""Finite groups by multiplication table, and their representations over local algebras."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import errors
from .ring import (
    LocalAlgebra,
    Ideal,
    ideal_product,
    mat_det,
    mat_equal,
    mat_identity,
    mat_inv,
    mat_mul,
    mat_reduce,
    mat_trace,
    quotient_algebra,
)
from .zmod import Span, kernel, solve

DEFAULT_CAP = 2000


class FiniteGroup:
    def __init__(self, table, identity=None, generators=None, label=None, elements=None):
        T = np.asarray(table, dtype=np.int64)
        N = T.shape[0]
        if T.shape != (N, N):
            raise errors.NotAGroup("multiplication table must be square")
        full = np.arange(N)
        for i in range(N):
            if not (np.array_equal(np.sort(T[i]), full) and np.array_equal(np.sort(T[:, i]), full)):
                raise errors.NotAGroup(f"row/column {i} is not a permutation")
        if identity is None:
            ids = [i for i in range(N) if np.array_equal(T[i], full)]
            if not ids:
                raise errors.NotAGroup("no identity element")
            identity = ids[0]
        if not (np.array_equal(T[identity], full) and np.array_equal(T[:, identity], full)):
            raise errors.NotAGroup("declared identity is not two-sided")
        _check_associative(T)
        self.table = T
        self.order = N
        self.identity = int(identity)
        self.inverse = np.array([int(np.flatnonzero(T[g] == identity)[0]) for g in range(N)])
        if generators is None:
            generators = _greedy_generators(T, self.identity)
        self.generators = [int(g) for g in generators]
        if len(self.subgroup(self.generators)) != N:
            raise errors.NotAGroup("declared generators do not generate the group")
        self.label = label or f"group of order {N}"
        self.elements = elements

    def __repr__(self):
        return f"<FiniteGroup {self.label}>"

    def __len__(self):
        return self.order

    def mul(self, g, h) -> int:
        return int(self.table[g, h])

    def inv(self, g) -> int:
        return int(self.inverse[g])

    def power(self, g, n: int) -> int:
        out = self.identity
        for _ in range(n % self.element_order(g)):
            out = self.mul(out, g)
        return out

    def element_order(self, g) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.mul(x, g)
            k += 1
        return k

    def conj(self, g, h) -> int:
        """``h g h^-1``."""
        return self.mul(self.mul(h, g), self.inv(h))

    def subgroup(self, gens) -> list:
        seen = {self.identity}
        queue = deque([self.identity])
        gens = [int(g) for g in gens]
        while queue:
            x = queue.popleft()
            for s in gens:
                y = int(self.table[x, s])
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return sorted(seen)

    @cached_property
    def spanning_tree(self) -> list:
        """``(parent, generator)`` with ``g = parent * generator``, in BFS order."""
        order = [(self.identity, None, None)]
        seen = {self.identity}
        i = 0
        while i < len(order):
            x = order[i][0]
            for s in self.generators:
                y = int(self.table[x, s])
                if y not in seen:
                    seen.add(y)
                    order.append((y, x, s))
            i += 1
        return order

    @cached_property
    def conjugacy_classes(self) -> list:
        left = set(range(self.order))
        out = []
        while left:
            g = min(left)
            cls = sorted({self.conj(g, h) for h in range(self.order)})
            out.append(cls)
            left -= set(cls)
        return out

    @cached_property
    def derived_subgroup(self) -> list:
        comms = {
            self.mul(self.mul(g, h), self.mul(self.inv(g), self.inv(h)))
            for g in range(self.order)
            for h in range(self.order)
        }
        return self.subgroup(comms)

    @property
    def abelianization_order(self) -> int:
        return self.order // len(self.derived_subgroup)

    def sub(self, elements, label=None) -> "FiniteGroup":
        """The subgroup on ``elements`` (which must be closed), reindexed in the given order."""
        elements = [int(x) for x in elements]
        pos = {g: i for i, g in enumerate(elements)}
        try:
            table = [[pos[int(self.table[a, b])] for b in elements] for a in elements]
        except KeyError:
            raise errors.NotAGroup("element list is not closed under multiplication") from None
        H = FiniteGroup(table, identity=pos[self.identity], label=label or f"subgroup of {self.label}")
        H.embedding = elements
        return H

    def to_dict(self) -> dict:
        return {"label": self.label, "order": self.order, "generators": self.generators}


def _check_associative(T: np.ndarray, sample_above: int = 512, seed: int = 0):
    N = T.shape[0]
    if N <= sample_above:
        for a in range(N):
            left = T[T[a]]  # (ab)c
            right = T[a][T]  # a(bc)
            if not np.array_equal(left, right):
                raise errors.NotAGroup("multiplication is not associative")
        return
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, N, size=(20000, 3))
    a, b, c = idx.T
    if not np.array_equal(T[T[a, b], c], T[a, T[b, c]]):
        raise errors.NotAGroup("multiplication is not associative")


def _greedy_generators(T, identity) -> list:
    N = T.shape[0]
    gens = []
    reached = {identity}
    for g in range(N):
        if g in reached:
            continue
        gens.append(g)
        reached = {identity}
        queue = deque([identity])
        while queue:
            x = queue.popleft()
            for s in gens:
                y = int(T[x, s])
                if y not in reached:
                    reached.add(y)
                    queue.append(y)
        if len(reached) == N:
            break
    return gens


def group_from_table(table, generators=None, label=None) -> FiniteGroup:
    return FiniteGroup(table, generators=generators, label=label)


def _closure(gens, mul, key, cap):
    elems = []
    index = {}
    queue = deque()
    for g in gens:
        if key(g) not in index:
            index[key(g)] = len(elems)
            elems.append(g)
            queue.append(g)
    while queue:
        x = queue.popleft()
        for s in gens:
            y = mul(x, s)
            k = key(y)
            if k not in index:
                if len(elems) >= cap:
                    raise errors.ClosureTooLarge(f"closure exceeds cap {cap}")
                index[k] = len(elems)
                elems.append(y)
                queue.append(y)
    return elems, index


def _table_from_closure(elems, index, mul, key):
    N = len(elems)
    T = np.empty((N, N), dtype=np.int64)
    for i, x in enumerate(elems):
        for j, y in enumerate(elems):
            T[i, j] = index[key(mul(x, y))]
    return T


def group_from_permutations(gens, label=None, cap: int = DEFAULT_CAP) -> FiniteGroup:
    """Permutations as tuples of images of ``0..n-1``; composition is ``(xy)(i) = x(y(i))``."""
    gens = [tuple(int(v) for v in g) for g in gens]
    n = len(gens[0])
    ident = tuple(range(n))

    def mul(x, y):
        return tuple(x[y[i]] for i in range(n))

    elems, index = _closure([ident] + gens, mul, lambda t: t, cap)
    T = _table_from_closure(elems, index, mul, lambda t: t)
    return FiniteGroup(T, identity=index[ident], generators=[index[g] for g in gens], label=label, elements=elems)


def group_from_matrix_generators(p: int, n: int, mats, label=None, cap: int = DEFAULT_CAP) -> FiniteGroup:
    mats = [np.asarray(m, dtype=np.int64).reshape(n, n) % p for m in mats]
    for m in mats:
        if not kernel(m, p, 1).is_zero():
            raise errors.NonInvertibleImage("generator matrix is singular mod p")
    ident = np.eye(n, dtype=np.int64)

    def mul(x, y):
        return x @ y % p

    def key(x):
        return x.tobytes()

    elems, index = _closure([ident] + mats, mul, key, cap)
    T = _table_from_closure(elems, index, mul, key)
    G = FiniteGroup(
        T, identity=index[key(ident)], generators=[index[key(m)] for m in mats], label=label, elements=elems
    )
    return G


# -- named groups --------------------------------------------------------------


def cyclic_group(n: int) -> FiniteGroup:
    return group_from_permutations([tuple((i + 1) % n for i in range(n))], label=f"Z/{n}")


def symmetric_group(n: int) -> FiniteGroup:
    cycle = tuple((i + 1) % n for i in range(n))
    swap = (1, 0) + tuple(range(2, n))
    return group_from_permutations([cycle, swap], label=f"S{n}")


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n."""
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return group_from_permutations([rot, ref], label=f"D{n}")


def quaternion_group() -> FiniteGroup:
    """Q8 via its regular permutation action on {±1, ±i, ±j, ±k}."""
    # encode (sign, unit) with units 1,i,j,k = 0..3
    mult = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }
    elems = [(s, u) for s in (1, -1) for u in range(4)]
    idx = {e: i for i, e in enumerate(elems)}

    def left(a):
        s, u = a
        return tuple(
            idx[(s * t * mult[(u, v)][0], mult[(u, v)][1])] for (t, v) in elems
        )

    return group_from_permutations([left((1, 1)), left((1, 2))], label="Q8")


def semidirect_group(p: int, q: int) -> FiniteGroup:
    """Z/p ⋊ Z/q acting faithfully through a unit of order q mod p."""
    if (p - 1) % q:
        raise errors.NotAGroup(f"{q} does not divide {p}-1")
    a = next(x for x in range(2, p) if pow(x, q, p) == 1 and all(pow(x, k, p) != 1 for k in range(1, q)))
    translate = tuple((i + 1) % p for i in range(p))
    scale = tuple((a * i) % p for i in range(p))
    return group_from_permutations([translate, scale], label=f"Z/{p}:Z/{q}")


def dicyclic_group(m: int) -> FiniteGroup:
    """Z/m ⋊ Z/4 with the generator of Z/4 inverting Z/m (m odd); order 4m."""
    elems = [(a, b) for b in range(4) for a in range(m)]
    idx = {e: i for i, e in enumerate(elems)}

    def mul(x, y):
        a, b = x
        c, d = y
        return ((a + (c if b % 2 == 0 else -c)) % m, (b + d) % 4)

    def left(x):
        return tuple(idx[mul(x, y)] for y in elems)

    return group_from_permutations([left((1, 0)), left((0, 1))], label=f"Z/{m}:Z/4")


def sl2_group(p: int) -> FiniteGroup:
    return group_from_matrix_generators(p, 2, [[[1, 1], [0, 1]], [[0, p - 1], [1, 0]]], label=f"SL2(F{p})")


# -- representations -----------------------------------------------------------


class GroupRep:
    """``g -> rho(g)`` with images stored for every element as an (N, n, n, d) array."""

    def __init__(self, group: FiniteGroup, algebra: LocalAlgebra, images, label=None, check=True, blocks=None):
        self.group = group
        self.blocks = blocks  # (n1, n2) for block upper-triangular residual shape
        self.algebra = algebra
        self.images = mat_reduce(algebra, np.asarray(images, dtype=np.int64))
        self.degree = self.images.shape[1]
        self.label = label or f"rep of {group.label}"
        if check:
            self._check()

    def _check(self):
        G, A = self.group, self.algebra
        im = self.images
        if not mat_equal(A, im[G.identity], mat_identity(A, self.degree)):
            raise errors.RelationViolated("rho(1) is not the identity")
        step = np.einsum("gijx,hjky->ghikxy", im, im)
        prods = np.tensordot(step, A.c, axes=([4, 5], [0, 1])) % A.q
        prods = mat_reduce(A, prods)
        expect = im[G.table]
        bad = np.argwhere(np.any((prods - expect) % A.q != 0, axis=(2, 3, 4)))
        if bad.size:
            g, h = (int(t) for t in bad[0])
            raise errors.RelationViolated(f"rho({g}*{h}) != rho({g}) rho({h})")

    def __call__(self, g) -> np.ndarray:
        return self.images[g]

    def __repr__(self):
        return f"<GroupRep {self.label} deg {self.degree} over {self.algebra.name}>"

    @cached_property
    def traces(self) -> np.ndarray:
        return np.array([mat_trace(self.algebra, m) for m in self.images])

    def trace(self, g) -> np.ndarray:
        return self.traces[g]

    def generator_images(self) -> list:
        return [self.images[s] for s in self.group.generators]

    def conjugate(self, P) -> "GroupRep":
        """``g -> P rho(g) P^-1``."""
        A = self.algebra
        Pinv = mat_inv(A, P)
        im = np.array([mat_mul(A, mat_mul(A, P, m), Pinv) for m in self.images])
        return GroupRep(self.group, A, im, label=self.label, check=False, blocks=self.blocks)

    def base_change(self, B: LocalAlgebra, matrix) -> "GroupRep":
        """Push forward along an algebra map given as a d x d' coordinate matrix."""
        M = np.asarray(matrix, dtype=np.int64)
        im = (self.images @ M) % B.q
        return GroupRep(self.group, B, im, label=self.label, blocks=self.blocks)

    def reduce_mod(self, I) -> "GroupRep":
        Q, P = quotient_algebra(self.algebra, I, with_map=True)
        return self.base_change(Q, P)

    def residual(self) -> "GroupRep":
        return self.reduce_mod(self.algebra.max_ideal)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "generator_images": [m.tolist() for m in self.generator_images()],
        }


def representation(G: FiniteGroup, A: LocalAlgebra, generator_images, label=None, blocks=None) -> GroupRep:
    """Fill in all images from generator images and verify the homomorphism property."""
    gens = [np.asarray(m, dtype=np.int64) for m in generator_images]
    if len(gens) != len(G.generators):
        raise errors.RelationViolated(f"expected {len(G.generators)} generator images, got {len(gens)}")
    n = gens[0].shape[0]
    gens = [m.reshape(n, n, A.rank) for m in gens]
    for m in gens:
        if not A.is_unit(mat_det(A, m)):
            raise errors.NonInvertibleImage("generator image has non-unit determinant")
    by_gen = dict(zip(G.generators, gens))
    images = np.zeros((G.order, n, n, A.rank), dtype=np.int64)
    for g, parent, s in G.spanning_tree:
        images[g] = mat_identity(A, n) if parent is None else mat_mul(A, images[parent], by_gen[s])
    return GroupRep(G, A, images, label=label, blocks=blocks)


def scalar_matrices(A: LocalAlgebra, values) -> np.ndarray:
    """Lift a list of integer matrices to an (k, n, n, d) array over ``A``."""
    out = []
    for M in values:
        M = np.asarray(M, dtype=np.int64)
        out.append(np.einsum("ij,x->ijx", M, A.unit) % A.q)
    return np.array(out)


def rep_from_int_matrices(G: FiniteGroup, A: LocalAlgebra, generator_images, label=None, blocks=None) -> GroupRep:
    return representation(G, A, list(scalar_matrices(A, generator_images)), label=label, blocks=blocks)


def character(G: FiniteGroup, A: LocalAlgebra, generator_values, label=None) -> GroupRep:
    """1-dimensional representation from generator values in ``A``."""
    vals = [A.elem(v).reshape(1, 1, A.rank) for v in generator_values]
    return representation(G, A, vals, label=label)


def trivial_rep(G: FiniteGroup, A: LocalAlgebra, n: int = 1) -> GroupRep:
    im = np.broadcast_to(mat_identity(A, n), (G.order, n, n, A.rank)).copy()
    return GroupRep(G, A, im, label="trivial")


def sign_character(G: FiniteGroup, A: LocalAlgebra) -> GroupRep:
    """Sign of a permutation group's elements."""
    if G.elements is None or not isinstance(G.elements[0], tuple):
        raise errors.NotAGroup("sign needs a permutation group")

    def sign(perm):
        s, seen = 1, set()
        for i in range(len(perm)):
            if i in seen:
                continue
            j, length = i, 0
            while j not in seen:
                seen.add(j)
                j = perm[j]
                length += 1
            s *= -1 if length % 2 == 0 else 1
        return s

    return character(G, A, [A.scalar(sign(G.elements[g])) for g in G.generators], label="sign")


def direct_sum(r1: GroupRep, r2: GroupRep) -> GroupRep:
    n1, n2 = r1.degree, r2.degree
    A = r1.algebra
    im = np.zeros((r1.group.order, n1 + n2, n1 + n2, A.rank), dtype=np.int64)
    im[:, :n1, :n1] = r1.images
    im[:, n1:, n1:] = r2.images
    return GroupRep(r1.group, A, im, label=f"{r1.label}+{r2.label}", check=False, blocks=(n1, n2))


def permutation_rep(G: FiniteGroup, A: LocalAlgebra) -> GroupRep:
    """Natural permutation matrices of a permutation group."""
    mats = []
    for g in G.generators:
        perm = G.elements[g]
        M = np.zeros((len(perm), len(perm)), dtype=np.int64)
        for i, j in enumerate(perm):
            M[j, i] = 1
        mats.append(M)
    return rep_from_int_matrices(G, A, mats, label="permutation")


def regular_rep(G: FiniteGroup, A: LocalAlgebra) -> GroupRep:
    mats = []
    for s in G.generators:
        M = np.zeros((G.order, G.order), dtype=np.int64)
        for h in range(G.order):
            M[G.mul(s, h), h] = 1
        mats.append(M)
    return rep_from_int_matrices(G, A, mats, label="regular")


def _matrix_units_span(rho: GroupRep) -> Span:
    A = rho.algebra
    n, d = rho.degree, A.rank
    rows = []
    eye = np.eye(d, dtype=np.int64)
    for m in rho.images:
        for b in eye:
            rows.append(mat_reduce(A, np.einsum("ijx,xz->ijz", m, A.mult_matrix(b)) % A.q).reshape(-1))
    rel = np.kron(np.eye(n * n, dtype=np.int64), A.relations.rows) if not A.relations.is_zero() else None
    span = Span(np.array(rows), A.p, A.e, n * n * d)
    if rel is not None:
        span = span.add_rows(rel)
    return span


def is_absolutely_irreducible(rho: GroupRep) -> bool:
    """Burnside: the images span all of M_n over the field."""
    A = rho.algebra
    if A.e != 1 or not A.is_field():
        raise errors.NotAField(f"{A.name} is not a field")
    span = _matrix_units_span(rho)
    n = rho.degree
    return span.log_order - n * n * A.rank + n * n * A.log_order == n * n * A.log_order


@dataclass
class Centralizer:
    span: Span
    degree: int
    dimension: int  # minimal number of generators as an A-module

    def basis(self, A: LocalAlgebra) -> list:
        n = self.degree
        return [r.reshape(n, n, A.rank) for r in self.span.rows]


def _commutator_system(rho: GroupRep):
    """Matrix of ``X -> (X rho(s) - rho(s) X)_s`` on flattened coordinates."""
    A = rho.algebra
    n, d = rho.degree, A.rank
    eye = np.eye(n * n * d, dtype=np.int64)
    blocks = []
    for s in rho.group.generators:
        m = rho.images[s]
        cols = []
        for v in eye:
            X = v.reshape(n, n, d)
            cols.append((mat_mul(A, X, m) - mat_mul(A, m, X)).reshape(-1) % A.q)
        blocks.append(np.array(cols))
    return np.hstack(blocks)


def _entry_relations(A: LocalAlgebra, count: int) -> Span:
    if A.relations.is_zero():
        return Span.zero(A.p, A.e, count * A.rank)
    return Span(np.kron(np.eye(count, dtype=np.int64), A.relations.rows), A.p, A.e, count * A.rank)


def centralizer(rho: GroupRep) -> Centralizer:
    A = rho.algebra
    n = rho.degree
    M = _commutator_system(rho)
    target = _entry_relations(A, n * n * len(rho.group.generators))
    C = kernel(M, A.p, A.e, target=target)
    rel = _entry_relations(A, n * n)
    C = C + rel
    # A-module generator count: dim over the residue field of C / m_A C
    mC_rows = [rel.rows]
    for a in A.max_ideal.module_generators():
        for r in C.rows:
            X = r.reshape(n, n, A.rank)
            mC_rows.append(mat_reduce(A, np.einsum("ijx,xz->ijz", X, A.mult_matrix(a)) % A.q).reshape(1, -1))
    mC = Span(np.vstack(mC_rows), A.p, A.e, n * n * A.rank)
    dim = (C.log_order - mC.log_order) // A.residue_degree
    return Centralizer(C, n, dim)


# -- involutions ---------------------------------------------------------------


class Involution:
    """``tau(g) = twist(g) * sigma(g)`` extended linearly to A[G].

    ``sigma`` is an anti-automorphism of G of order dividing 2 and ``twist``
    a character with ``twist(g) twist(sigma g) = 1``.
    """

    def __init__(self, group: FiniteGroup, algebra: LocalAlgebra, sigma, twist, kind: str):
        self.group = group
        self.algebra = algebra
        self.sigma = np.asarray(sigma, dtype=np.int64)
        self.twist = np.array([algebra.reduce(t) for t in twist])
        self.kind = kind
        self._check()

    def _check(self):
        G, A = self.group, self.algebra
        s = self.sigma
        if not np.array_equal(s[s], np.arange(G.order)):
            raise errors.InvalidOrderTwoElement("sigma does not square to the identity")
        # sigma(gh) = sigma(h) sigma(g)
        lhs = s[G.table]
        rhs = G.table[s][:, s].T
        if not np.array_equal(lhs, rhs):
            raise errors.InvalidOrderTwoElement("sigma is not an anti-automorphism")
        tw = self.twist
        for g in range(G.order):
            if not A.is_unit(tw[g]):
                raise errors.InvalidOrderTwoElement("twist is not unit-valued")
            if not A.equal(A.mul(tw[g], tw[s[g]]), A.one):
                raise errors.InvalidOrderTwoElement("twist(g) twist(sigma g) != 1")
            for h in range(G.order):
                if not A.equal(tw[G.table[g, h]], A.mul(tw[g], tw[h])):
                    raise errors.InvalidOrderTwoElement("twist is not a character")

    def apply(self, x) -> np.ndarray:
        """Image of a group-algebra element given as an (N, d) coefficient array."""
        A = self.algebra
        x = np.asarray(x)
        out = np.zeros_like(x)
        for g in range(self.group.order):
            if x[g].any():
                out[self.sigma[g]] = A.add(out[self.sigma[g]], A.mul(x[g], self.twist[g]))
        return out

    def to_dict(self) -> dict:
        return {"kind": self.kind}


def make_involution(G: FiniteGroup, A: LocalAlgebra, kind: str = "inverse", c=None, chi=None) -> Involution:
    """``kind`` is ``inverse``, ``conjugate_inverse`` (needs ``c`` of order 2) or ``twisted`` (needs ``chi``)."""
    inv = G.inverse
    ones = [A.one] * G.order
    if kind == "inverse":
        return Involution(G, A, inv, ones, kind)
    if kind == "conjugate_inverse":
        if c is None or c == G.identity or G.mul(c, c) != G.identity:
            raise errors.InvalidOrderTwoElement(f"{c} is not an element of order 2")
        sigma = [G.mul(G.mul(c, int(inv[g])), c) for g in range(G.order)]
        return Involution(G, A, sigma, ones, f"conjugate_inverse({c})")
    if kind == "twisted":
        if chi is None:
            raise errors.InvalidOrderTwoElement("twisted involution needs a character")
        vals = chi.traces if isinstance(chi, GroupRep) else np.asarray(chi)
        twist = [A.inv(v) for v in vals]
        return Involution(G, A, inv, twist, f"twisted({getattr(chi, 'label', 'chi')})")
    raise errors.InvalidOrderTwoElement(f"unknown involution kind {kind!r}")


def check_self_dual(traces, tau: Involution, residual=()) -> bool:
    """``T(g) = twist(g) T(sigma g)`` for all g.

    ``residual`` holds ``(traces_bar, B, P)`` triples: traces over a quotient
    ``B`` of the algebra with projection matrix ``P``; the same identity is
    checked there with the reduced twist.
    """
    checks = [(traces, tau.algebra, tau.twist)]
    for vals, B, P in residual:
        checks.append((vals, B, [B.reduce(t @ P) for t in tau.twist]))
    for vals, B, twist in checks:
        for g in range(tau.group.order):
            if not B.equal(B.mul(twist[g], vals[tau.sigma[g]]), vals[g]):
                return False
    return True


# -- extensions ----------------------------------------------------------------


def hom_action(r1: GroupRep, r2: GroupRep) -> np.ndarray:
    """Z/q-matrices of ``m -> r1(g) m r2(g)^-1`` on Hom(r2, r1), flattened (n1, n2, d)."""
    A = r1.algebra
    n1, n2, d = r1.degree, r2.degree, A.rank
    size = n1 * n2 * d
    eye = np.eye(size, dtype=np.int64)
    out = np.zeros((r1.group.order, size, size), dtype=np.int64)
    for g in range(r1.group.order):
        r2inv = r2.images[r1.group.inv(g)]
        for i, v in enumerate(eye):
            m = v.reshape(n1, n2, d)
            out[g, i] = mat_mul(A, mat_mul(A, r1.images[g], m), r2inv).reshape(-1)
    return out


def cocycle_from_generators(G: FiniteGroup, action, gen_values, relations: Span | None = None) -> np.ndarray:
    """Extend ``c(s)`` on generators to all of G via ``c(hs) = c(h) + h.c(s)``."""
    q = relations.q if relations is not None else None
    vals = [np.asarray(v, dtype=np.int64).reshape(-1) for v in gen_values]
    size = vals[0].shape[0]
    by_gen = dict(zip(G.generators, vals))
    out = np.zeros((G.order, size), dtype=np.int64)
    for g, parent, s in G.spanning_tree:
        if parent is None:
            continue
        out[g] = out[parent] + by_gen[s] @ action[parent]
        if q is not None:
            out[g] = relations.reduce(out[g])
    return out


def is_cocycle(G: FiniteGroup, action, values, relations: Span) -> bool:
    V = np.asarray(values, dtype=np.int64).reshape(G.order, -1)
    for g in range(G.order):
        lhs = V[G.table[g]]
        rhs = V[g][None, :] + V @ action[g]
        if relations.reduce_many(lhs - rhs).any():
            return False
    return True


def assemble_extension(r1: GroupRep, r2: GroupRep, cocycle) -> GroupRep:
    """``g -> [[r1(g), c(g) r2(g)], [0, r2(g)]]`` for ``c`` in Z^1(G, Hom(r2, r1))."""
    A = r1.algebra
    G = r1.group
    n1, n2 = r1.degree, r2.degree
    c = np.asarray(cocycle, dtype=np.int64).reshape(G.order, n1, n2, A.rank)
    act = hom_action(r1, r2)
    rel = _entry_relations(A, n1 * n2)
    if not is_cocycle(G, act, c.reshape(G.order, -1), rel):
        raise errors.NotACocycle("c(gh) != c(g) + g.c(h)")
    im = np.zeros((G.order, n1 + n2, n1 + n2, A.rank), dtype=np.int64)
    im[:, :n1, :n1] = r1.images
    im[:, n1:, n1:] = r2.images
    for g in range(G.order):
        im[g, :n1, n1:] = mat_mul(A, c[g], r2.images[g])
    return GroupRep(G, A, im, label=f"[{r1.label} * ; 0 {r2.label}]", blocks=(n1, n2))


def extension_cocycle(rho: GroupRep, n1: int) -> np.ndarray:
    """Recover ``c(g) = B(g) r2(g)^-1`` from an upper block-triangular rep."""
    A = rho.algebra
    G = rho.group
    out = []
    for g in range(G.order):
        m = rho.images[g]
        r2inv = rho.images[G.inv(g)][n1:, n1:]
        out.append(mat_mul(A, m[:n1, n1:], r2inv))
    return np.array(out)


def is_split(rho: GroupRep, n1: int) -> bool:
    """Whether the extension class is a coboundary ``c(g) = m - g.m``.

    Solves on generators only; a cocycle is determined by its generator values.
    """
    A = rho.algebra
    G = rho.group
    n = rho.degree
    n2 = n - n1
    r1 = GroupRep(G, A, rho.images[:, :n1, :n1], check=False)
    r2 = GroupRep(G, A, rho.images[:, n1:, n1:], check=False)
    act = hom_action(r1, r2)
    c = extension_cocycle(rho, n1).reshape(G.order, -1)
    size = n1 * n2 * A.rank
    eye = np.eye(size, dtype=np.int64)
    M = np.hstack([(eye - act[s]) % A.q for s in G.generators])
    b = np.concatenate([c[s] for s in G.generators])
    target = _entry_relations(A, n1 * n2 * len(G.generators))
    return solve(M, b, A.p, A.e, target=target) is not None


# -- lifts through square-zero thickenings -----------------------------------------


@dataclass
class LiftSpace:
    """Corrections ``rho(s) = base[s] + sum_u x_u * basis[u][s]`` making ``rho`` a
    representation modulo ``modulus``; the admissible ``x`` form ``particular + kernel``.
    """

    group: FiniteGroup
    algebra: LocalAlgebra
    base: np.ndarray  # (k, n, n, d)
    basis: np.ndarray  # (U, k, n, n, d)
    particular: np.ndarray | None
    kernel: Span

    @property
    def exists(self) -> bool:
        return self.particular is not None

    def generator_images(self, x=None) -> np.ndarray:
        if not self.exists:
            raise errors.RelationViolated("no lift at this level")
        A = self.algebra
        x = self.particular if x is None else (self.particular + np.asarray(x)) % A.q
        return mat_reduce(A, (self.base + np.einsum("u,uksjx->ksjx", x, self.basis)) % A.q)

    def random_images(self, rng) -> np.ndarray:
        return self.generator_images(self.kernel.random_element(rng))

    def lift(self, x=None, label=None, blocks=None) -> GroupRep:
        return representation(self.group, self.algebra, list(self.generator_images(x)), label=label, blocks=blocks)

    def random_lift(self, rng, label=None, blocks=None) -> GroupRep:
        return self.lift(self.kernel.random_element(rng), label=label, blocks=blocks)


def lift_space(G: FiniteGroup, A: LocalAlgebra, gens, J, K) -> LiftSpace:
    """Corrections in ``J`` to the generator images ``gens`` (a representation
    modulo ``J``) that give a representation modulo ``K``.

    Needs ``J * J`` inside ``K`` so that the equations are affine-linear.
    """
    gens = mat_reduce(A, np.asarray(gens, dtype=np.int64))
    k, n, d = gens.shape[0], gens.shape[1], A.rank
    if not K.contains_ideal(ideal_product(J, J)):
        raise errors.AlgebraError("correction ideal does not square into the target ideal")
    jgens = J.module_generators()
    basis = []
    for s in range(k):
        for i in range(n):
            for j in range(n):
                for mu in jgens:
                    E = np.zeros((k, n, n, d), dtype=np.int64)
                    E[s, i, j] = mu
                    basis.append(E)
    U = len(basis)
    basis = np.array(basis, dtype=np.int64).reshape(U, k, n, n, d)
    gpos = {s: i for i, s in enumerate(G.generators)}

    def mm(X, Y):
        return np.einsum("...ijx,...jky,xyz->...ikz", X, Y, A.c) % A.q

    # rho(g) = C[g] + L[g](x), dropping terms quadratic in the corrections
    C = np.zeros((G.order, n, n, d), dtype=np.int64)
    L = np.zeros((G.order, U, n, n, d), dtype=np.int64)
    for g, parent, s in G.spanning_tree:
        if parent is None:
            C[g] = mat_identity(A, n)
            continue
        i = gpos[s]
        C[g] = mm(C[parent], gens[i])
        L[g] = (mm(L[parent], gens[i][None]) + mm(C[parent][None], basis[:, i])) % A.q
    const, lin = [], []
    for g in range(G.order):
        for s in G.generators:
            i = gpos[s]
            gs = G.table[g, s]
            const.append((mm(C[g], gens[i]) - C[gs]).reshape(-1))
            lin.append((mm(L[g], gens[i][None]) + mm(C[g][None], basis[:, i]) - L[gs]).reshape(U, n * n * d))
    b = np.concatenate(const) % A.q
    M = np.hstack(lin) % A.q if U else np.zeros((0, b.shape[0]), dtype=np.int64)
    count = len(const) * n * n
    target = Span(np.kron(np.eye(count, dtype=np.int64), K.span.rows), A.p, A.e, count * d)
    if U:
        part = solve(M, (-b) % A.q, A.p, A.e, target=target)
        ker = kernel(M, A.p, A.e, target=target)
    else:
        part = np.zeros(0, dtype=np.int64) if target.contains(b) else None
        ker = Span.zero(A.p, A.e, 0)
    return LiftSpace(G, A, gens, basis, part, ker)


def square_zero_lifts(G: FiniteGroup, A: LocalAlgebra, generator_images) -> LiftSpace:
    """All lifts of a residual representation (integer generator matrices) when ``m_A^2 = 0``."""
    m = A.max_ideal
    if A.residue_degree != 1:
        raise errors.NotAField("lifting needs residue field F_p")
    gens = scalar_matrices(A, [np.asarray(M) % A.p for M in generator_images])
    zero = Ideal(A, A.relations)
    return lift_space(G, A, gens, m, zero)


def random_lift(G: FiniteGroup, A: LocalAlgebra, generator_images, rng, tries: int = 8, label=None, blocks=None):
    """Lift a residual representation to ``A`` one ``m^k / m^(k+1)`` layer at a time.

    Random choices are made at each layer; returns ``None`` when every try hits
    an obstruction.
    """
    if A.residue_degree != 1:
        raise errors.NotAField("lifting needs residue field F_p")
    m = A.max_ideal
    powers = [m]
    while not powers[-1].is_zero():
        powers.append(ideal_product(powers[-1], m))
    base = scalar_matrices(A, [np.asarray(M) % A.p for M in generator_images])
    for _ in range(tries):
        gens = base
        for J, K in zip(powers, powers[1:]):
            space = lift_space(G, A, gens, J, K)
            if not space.exists:
                break
            gens = space.random_images(rng)
        else:
            return representation(G, A, list(gens), label=label, blocks=blocks)
    return None
