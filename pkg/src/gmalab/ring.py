"""Truncated base ring Z/p^e and finite commutative local algebras over it.

A :class:`LocalAlgebra` is presented by module generators ``b_0 .. b_{d-1}``,
structure constants ``b_i b_j = sum_k c[i,j,k] b_k`` and an optional
relation submodule (for generators whose additive order is below p^e).
Elements are canonical coordinate vectors (reduced modulo the relations).

Ideals are stored as their full preimage in (Z/p^e)^d, so ideal equality is
Howell-form equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import prod

import numpy as np

from . import errors
from .zmod import Span, as_matrix, kernel, quotient_invariants, quotient_representatives, solve


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


@dataclass(frozen=True)
class BaseRing:
    """O = Z/p^e with uniformizer p."""

    p: int
    e: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise errors.AlgebraError(f"p={self.p} is not prime")
        if self.e < 1:
            raise errors.AlgebraError("truncation exponent must be >= 1")

    @property
    def q(self) -> int:
        return self.p**self.e

    def __str__(self):
        return f"Z/{self.p}^{self.e}" if self.e > 1 else f"F_{self.p}"


class LocalAlgebra:
    def __init__(self, base: BaseRing, structure, unit, relations=None, name: str | None = None):
        self.base = base
        self.p, self.e, self.q = base.p, base.e, base.q
        c = np.asarray(structure, dtype=np.int64) % self.q
        if c.ndim != 3 or c.shape[0] != c.shape[1] or c.shape[1] != c.shape[2]:
            raise errors.AlgebraError(f"structure constants must be d x d x d, got {c.shape}")
        self.rank = d = c.shape[0]
        self.c = c
        rel = [] if relations is None else relations
        self.relations = Span(as_matrix(rel, d), self.p, self.e, d)
        if len(unit) != d:
            raise errors.NoUnit("unit vector has the wrong length")
        self.unit = self.reduce(unit)
        self.name = name or f"A({base},rank {d})"
        self._validate()
        self._locality()

    # -- construction checks -------------------------------------------------

    def _validate(self):
        d = self.rank
        eye = np.eye(d, dtype=np.int64)
        for r in self.relations.rows:
            for j in range(d):
                if self.reduce(self._mul_raw(r, eye[j])).any():
                    raise errors.AlgebraError("relation module is not stable under multiplication")
        diff = (self.c - self.c.transpose(1, 0, 2)).reshape(-1, d)
        if self.relations.reduce_many(diff).any():
            raise errors.NotCommutative(f"{self.name}: structure constants are not commutative")
        left = np.einsum("ijl,lkm->ijkm", self.c, self.c) % self.q
        right = np.einsum("jkl,ilm->ijkm", self.c, self.c) % self.q
        if self.relations.reduce_many((left - right).reshape(-1, d)).any():
            raise errors.NotAssociative(f"{self.name}: multiplication is not associative")
        for i in range(d):
            if not np.array_equal(self.mul(self.unit, eye[i]), self.reduce(eye[i])):
                raise errors.NoUnit(f"{self.name}: given unit does not act as identity")
        if not self.unit.any():
            raise errors.NoUnit(f"{self.name}: the zero ring is not allowed")

    def _locality(self):
        # A is local iff A/pA is; nil(A/pA) is the kernel of a high Frobenius power
        p, d = self.p, self.rank
        rel_bar = Span(self.relations.rows % p, p, 1, d)
        frob = np.array([self.power(b, p) % p for b in np.eye(d, dtype=np.int64)]) % p
        frob = rel_bar.reduce_many(frob)
        j = 1
        while p**j < d + 1:
            j += 1
        fj = np.eye(d, dtype=np.int64)
        for _ in range(j):
            fj = fj @ frob % p
        nil = kernel(fj, p, 1, target=rel_bar)
        fixed = kernel((frob - np.eye(d, dtype=np.int64)) % p, p, 1, target=nil)
        n_factors = fixed.log_order - nil.log_order
        if n_factors != 1:
            raise errors.NotLocal(
                f"{self.name}: non-units do not form an ideal "
                f"(reduced residue ring has {n_factors} field factors)"
            )
        self.residue_degree = d - nil.log_order
        rows = [nil.rows, p * np.eye(d, dtype=np.int64), self.relations.rows]
        self.max_ideal = Ideal(self, Span(np.vstack(rows), self.p, self.e, d))

    # -- element arithmetic --------------------------------------------------

    def reduce(self, v) -> np.ndarray:
        return self.relations.reduce(v)

    def elem(self, coords) -> np.ndarray:
        return self.reduce(np.asarray(coords, dtype=np.int64))

    def _mul_raw(self, x, y):
        return np.einsum("i,j,ijk->k", x, y, self.c) % self.q

    def mul(self, x, y) -> np.ndarray:
        return self.reduce(self._mul_raw(np.asarray(x), np.asarray(y)))

    def add(self, x, y) -> np.ndarray:
        return self.reduce(np.asarray(x) + np.asarray(y))

    def sub(self, x, y) -> np.ndarray:
        return self.reduce(np.asarray(x) - np.asarray(y))

    def neg(self, x) -> np.ndarray:
        return self.reduce(-np.asarray(x))

    def scalar(self, n: int) -> np.ndarray:
        return self.reduce(int(n) * self.unit)

    @property
    def zero(self) -> np.ndarray:
        return np.zeros(self.rank, dtype=np.int64)

    @property
    def one(self) -> np.ndarray:
        return self.unit.copy()

    def power(self, x, n: int) -> np.ndarray:
        result = self.one
        base = self.reduce(x)
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def mult_matrix(self, x) -> np.ndarray:
        """Matrix of ``y -> x*y`` (row-vector convention)."""
        return np.einsum("j,jik->ik", np.asarray(x, dtype=np.int64), self.c) % self.q

    def is_unit(self, x) -> bool:
        return not self.max_ideal.contains(x)

    def inv(self, x) -> np.ndarray:
        y = solve(self.mult_matrix(x), self.unit, self.p, self.e, target=self.relations)
        if y is None:
            raise ZeroDivisionError(f"{self.fmt(x)} is not a unit in {self.name}")
        return self.reduce(y)

    def equal(self, x, y) -> bool:
        return not self.reduce(np.asarray(x) - np.asarray(y)).any()

    def is_zero(self, x) -> bool:
        return not self.reduce(x).any()

    def residue(self, x) -> np.ndarray:
        """Canonical representative of ``x`` modulo the maximal ideal."""
        return self.max_ideal.span.reduce(x)

    def is_scalar_int(self, x):
        """Return ``n`` if ``x == n*1`` for some integer ``0 <= n < q``."""
        x = self.reduce(x)
        for n in range(self.q):
            if np.array_equal(self.scalar(n), x):
                return n
        return None

    # -- finite enumeration --------------------------------------------------

    @cached_property
    def log_order(self) -> int:
        return self.rank * self.e - self.relations.log_order

    @property
    def order(self) -> int:
        return self.p**self.log_order

    def elements(self):
        return quotient_representatives(self.relations)

    @cached_property
    def units(self) -> list:
        return [x for x in self.elements() if self.is_unit(x)]

    def is_field(self) -> bool:
        return self.max_ideal.is_zero()

    # -- presentation --------------------------------------------------------

    def fmt(self, x) -> str:
        x = self.reduce(x)
        if self.rank == 1:
            return str(int(x[0]))
        return "(" + ",".join(str(int(t)) for t in x) + ")"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "base": {"p": self.p, "e": self.e},
            "rank": self.rank,
            "structure": self.c.tolist(),
            "unit": self.unit.tolist(),
            "relations": self.relations.rows.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LocalAlgebra":
        base = BaseRing(int(data["base"]["p"]), int(data["base"]["e"]))
        return cls(
            base,
            data["structure"],
            data["unit"],
            relations=data.get("relations") or None,
            name=data.get("name"),
        )

    def __repr__(self):
        return f"<LocalAlgebra {self.name} |A|={self.p}^{self.log_order}>"


def base_algebra(p: int, e: int) -> LocalAlgebra:
    """The base ring Z/p^e as a rank-1 algebra."""
    return LocalAlgebra(BaseRing(p, e), [[[1]]], [1], name=str(BaseRing(p, e)))


@dataclass(frozen=True)
class ModuleInvariants:
    factors: tuple
    order: int
    generator_count: int

    @classmethod
    def from_factors(cls, factors):
        factors = tuple(sorted(int(f) for f in factors))
        return cls(factors, prod(factors), len(factors))


class Ideal:
    """An ideal of a :class:`LocalAlgebra`, stored as its preimage span."""

    def __init__(self, algebra: LocalAlgebra, span: Span):
        self.algebra = algebra
        self.span = span

    @property
    def rows(self) -> np.ndarray:
        """Canonical echelon matrix (includes the algebra's relations)."""
        return self.span.rows

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.algebra is other.algebra and self.span == other.span

    def __hash__(self):
        return hash(self.span)

    def __repr__(self):
        return f"<Ideal of {self.algebra.name}, order {self.order}>"

    @property
    def log_order(self) -> int:
        return self.span.log_order - self.algebra.relations.log_order

    @property
    def order(self) -> int:
        return self.algebra.p**self.log_order

    def is_zero(self) -> bool:
        return self.log_order == 0

    def is_unit_ideal(self) -> bool:
        return self.contains(self.algebra.unit)

    def contains(self, x) -> bool:
        return self.span.contains(x)

    def contains_ideal(self, other: "Ideal") -> bool:
        _same_parent(self, other)
        return self.span.contains_span(other.span)

    def module_generators(self) -> list:
        A = self.algebra
        out = []
        for r in self.span.rows:
            x = A.reduce(r)
            if x.any():
                out.append(x)
        return out

    def elements(self):
        A = self.algebra
        seen = set()
        for v in self.span.elements():
            x = A.reduce(v)
            key = x.tobytes()
            if key not in seen:
                seen.add(key)
                yield x

    def invariants(self) -> ModuleInvariants:
        return ModuleInvariants.from_factors(
            quotient_invariants(self.span, self.algebra.relations)
        )

    def __add__(self, other):
        return ideal_sum(self, other)

    def __mul__(self, other):
        return ideal_product(self, other)


def _same_parent(I: Ideal, J: Ideal):
    if I.algebra is not J.algebra:
        raise errors.MismatchedParent("ideals live in different algebras")


def ideal_from_generators(A: LocalAlgebra, gens) -> Ideal:
    """Smallest ideal containing ``gens``.

    The module span of ``g * b_j`` over all generators ``b_j`` is already
    closed under multiplication, so no fixed-point iteration is needed.
    """
    rows = [A.relations.rows]
    for g in gens:
        rows.append(A.mult_matrix(A.reduce(g)))
    return Ideal(A, Span(np.vstack(rows), A.p, A.e, A.rank))


def principal_ideal(A: LocalAlgebra, x) -> Ideal:
    return ideal_from_generators(A, [x])


def zero_ideal(A: LocalAlgebra) -> Ideal:
    return Ideal(A, A.relations)


def unit_ideal(A: LocalAlgebra) -> Ideal:
    return Ideal(A, Span.full(A.p, A.e, A.rank))


def ideal_sum(I: Ideal, J: Ideal) -> Ideal:
    _same_parent(I, J)
    return Ideal(I.algebra, I.span + J.span)


def ideal_product(I: Ideal, J: Ideal) -> Ideal:
    _same_parent(I, J)
    A = I.algebra
    rows = [A.relations.rows]
    for x in I.module_generators():
        for y in J.module_generators():
            rows.append(A.mul(x, y)[None, :])
    return Ideal(A, Span(np.vstack(rows), A.p, A.e, A.rank))


def ideal_intersection(I: Ideal, J: Ideal) -> Ideal:
    _same_parent(I, J)
    return Ideal(I.algebra, I.span.intersect(J.span))


def ideal_power(I: Ideal, n: int) -> Ideal:
    result = unit_ideal(I.algebra)
    for _ in range(n):
        result = ideal_product(result, I)
    return result


def quotient_algebra(A: LocalAlgebra, I: Ideal, with_map: bool = False):
    """``A / I`` presented on the coordinates that are not unit pivots of ``I``.

    With ``with_map`` also return the projection matrix ``P``; the image of
    ``x`` is ``Q.reduce(x @ P)``.
    """
    if I.algebra is not A:
        raise errors.MismatchedParent("ideal does not belong to this algebra")
    if I.is_unit_ideal():
        raise errors.NotLocal("quotient by the unit ideal is the zero ring")
    span = I.span
    keep = span.free_columns()
    eye = np.eye(A.rank, dtype=np.int64)
    proj = span.reduce_many(eye)[:, keep]
    c = np.zeros((len(keep), len(keep), len(keep)), dtype=np.int64)
    for a, i in enumerate(keep):
        for b, j in enumerate(keep):
            c[a, b] = span.reduce(A._mul_raw(eye[i], eye[j]))[keep]
    unit = span.reduce(A.unit)[keep]
    unit_cols = {col for col, pv in span.pivots if pv == 1}
    rel = [row[keep] for row, (col, _) in zip(span.rows, span.pivots) if col not in unit_cols]
    Q = LocalAlgebra(A.base, c, unit, relations=rel or None, name=f"{A.name}/I")
    if with_map:
        return Q, proj
    return Q


def cotangent(I: Ideal) -> Ideal:
    """``m_A * I``."""
    return ideal_product(I.algebra.max_ideal, I)


@dataclass
class MinimalGenerators:
    count: int
    witness: list
    cotangent: ModuleInvariants = field(repr=False)


def minimal_generators(I: Ideal) -> MinimalGenerators:
    """Nakayama count ``dim_F I / m_A I`` with a generating set of that size."""
    A = I.algebra
    mI = cotangent(I)
    inv = ModuleInvariants.from_factors(quotient_invariants(I.span, mI.span))
    witness = []
    current = mI
    for x in I.module_generators():
        if current.contains(x):
            continue
        witness.append(x)
        current = ideal_sum(current, principal_ideal(A, x))
        if current == I:
            break
    count = inv.generator_count // A.residue_degree
    assert len(witness) == count, (len(witness), count)
    assert ideal_from_generators(A, witness) == I
    return MinimalGenerators(count, witness, inv)


def is_principal(I: Ideal, oracle: str = "fast"):
    """``(True, generator)`` if ``I`` is principal, else ``(False, None)``.

    ``oracle="exhaustive"`` scans every element of ``I`` instead of using
    the Nakayama count.
    """
    A = I.algebra
    if oracle == "exhaustive":
        for x in I.elements():
            if principal_ideal(A, x) == I:
                return True, x
        return False, None
    mg = minimal_generators(I)
    if mg.count == 0:
        return True, A.zero
    if mg.count == 1:
        return True, mg.witness[0]
    return False, None


def exhaustive_generator_count(I: Ideal) -> int:
    """Smallest ``k`` such that some ``k`` elements generate ``I``.

    Subsets are scanned over distinct principal ideals, which loses nothing:
    the ideal generated by a set only depends on the principal ideals of its
    members.
    """
    A = I.algebra
    if I.is_zero():
        return 0
    principals = {}
    for x in I.elements():
        P = principal_ideal(A, x)
        principals.setdefault(P.span, P)
    pool = list(principals.values())
    for k in range(1, len(pool) + 1):
        for combo in itertools.combinations(pool, k):
            S = combo[0]
            for P in combo[1:]:
                S = ideal_sum(S, P)
            if S == I:
                return k
    raise AssertionError("ideal not generated by its own elements")


def all_ideals(A: LocalAlgebra) -> list:
    """Every ideal of ``A``, sorted by order then echelon matrix."""
    principals = {}
    for x in A.elements():
        P = principal_ideal(A, x)
        principals.setdefault(P.span, P)
    found = dict(principals)
    frontier = list(principals.values())
    while frontier:
        new = []
        for I in frontier:
            for P in principals.values():
                S = ideal_sum(I, P)
                if S.span not in found:
                    found[S.span] = S
                    new.append(S)
        frontier = new
    return sorted(found.values(), key=lambda I: (I.log_order, I.rows.tobytes()))


def nilradical(A: LocalAlgebra, oracle: str = "fast") -> Ideal:
    """Nilpotent elements of ``A``.

    For a finite local ring these are exactly ``m_A``.  The exhaustive path
    raises every element to the power ``|A|`` instead.
    """
    if oracle == "exhaustive":
        gens = [x for x in A.elements() if not A.power(x, A.order).any()]
        return ideal_from_generators(A, gens)
    return A.max_ideal


def reduced_quotient(A: LocalAlgebra) -> LocalAlgebra:
    return quotient_algebra(A, nilradical(A))


@dataclass
class NilradicalReport:
    nilradical: Ideal
    structural_rank: int  # dim_F of the nilradical of A / pA
    truncation_only: bool

    def to_dict(self):
        return {
            "order": self.nilradical.order,
            "structural_rank": self.structural_rank,
            "truncation_only": self.truncation_only,
        }


def nilradical_report(A: LocalAlgebra) -> NilradicalReport:
    """Split nilpotence into the part forced by p^e = 0 and the part visible mod p.

    Elements of ``pA`` are nilpotent only because the base is truncated; the
    nilradical of ``A/pA`` is what survives.  ``truncation_only`` is set when
    ``A/pA`` is a field.
    """
    nil = nilradical(A)
    pA = Ideal(A, A.relations.add_rows(A.p * np.eye(A.rank, dtype=np.int64)))
    structural = nil.span.log_order - pA.span.log_order
    structural //= A.residue_degree
    return NilradicalReport(nil, structural, structural == 0 and A.e > 1)


def annihilator(A: LocalAlgebra, I: Ideal) -> Ideal:
    gens = I.module_generators()
    if not gens:
        return unit_ideal(A)
    M = np.hstack([A.mult_matrix(x) for x in gens])
    target = Span.zero(A.p, A.e, M.shape[1])
    for i in range(len(gens)):
        block = np.zeros((A.relations.rows.shape[0], M.shape[1]), dtype=np.int64)
        block[:, i * A.rank : (i + 1) * A.rank] = A.relations.rows
        target = target.add_rows(block)
    return Ideal(A, kernel(M, A.p, A.e, target=target))


def socle(A: LocalAlgebra) -> Ideal:
    return annihilator(A, A.max_ideal)


def is_gorenstein(A: LocalAlgebra) -> bool:
    """Socle has dimension 1 over the residue field (zero-dimensional analogue)."""
    soc = socle(A)
    return soc.log_order == A.residue_degree


def is_nonzerodivisor(A: LocalAlgebra, t) -> bool:
    """``x -> t*x`` injective on ``A``."""
    ker = kernel(A.mult_matrix(t), A.p, A.e, target=A.relations)
    return ker == A.relations


# -- matrices over a LocalAlgebra (arrays of shape (rows, cols, d)) ------------


def mat_identity(A: LocalAlgebra, n: int) -> np.ndarray:
    out = np.zeros((n, n, A.rank), dtype=np.int64)
    for i in range(n):
        out[i, i] = A.unit
    return out


def mat_reduce(A: LocalAlgebra, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.int64)
    shape = X.shape
    return A.relations.reduce_many(X.reshape(-1, A.rank)).reshape(shape)


def mat_mul(A: LocalAlgebra, X, Y) -> np.ndarray:
    Z = np.einsum("ijx,jky,xyz->ikz", X, Y, A.c) % A.q
    return mat_reduce(A, Z)


def mat_add(A, X, Y):
    return mat_reduce(A, np.asarray(X) + np.asarray(Y))


def mat_sub(A, X, Y):
    return mat_reduce(A, np.asarray(X) - np.asarray(Y))


def mat_scale(A, a, X):
    X = np.asarray(X)
    M = A.mult_matrix(a)
    return mat_reduce(A, (X.reshape(-1, A.rank) @ M).reshape(X.shape))


def mat_trace(A: LocalAlgebra, X) -> np.ndarray:
    n = X.shape[0]
    return A.reduce(sum(X[i, i] for i in range(n)))


def mat_equal(A, X, Y) -> bool:
    return not mat_reduce(A, np.asarray(X) - np.asarray(Y)).any()


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def mat_det(A: LocalAlgebra, X) -> np.ndarray:
    n = X.shape[0]
    total = A.zero
    for perm in itertools.permutations(range(n)):
        term = A.one
        for i in range(n):
            term = A.mul(term, X[i, perm[i]])
        total = total + _perm_sign(perm) * term
    return A.reduce(total)


def mat_inv(A: LocalAlgebra, X) -> np.ndarray:
    n = X.shape[0]
    det = mat_det(A, X)
    dinv = A.inv(det)
    adj = np.zeros_like(X)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(X, i, axis=0), j, axis=1)
            cof = mat_det(A, minor) if n > 1 else A.one
            if (i + j) % 2:
                cof = A.neg(cof)
            adj[j, i] = A.mul(cof, dinv)
    return adj


def mat_from_ints(A: LocalAlgebra, M) -> np.ndarray:
    """Embed an integer matrix through ``Z -> A``."""
    M = np.asarray(M, dtype=np.int64)
    out = np.zeros(M.shape + (A.rank,), dtype=np.int64)
    for idx in np.ndindex(M.shape):
        out[idx] = A.scalar(int(M[idx]))
    return out
