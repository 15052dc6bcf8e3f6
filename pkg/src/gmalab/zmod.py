"""Exact linear algebra over Z/p^k.

Submodules of (Z/p^k)^n are kept in Howell form, which is canonical: two
spans are equal iff their row matrices are identical.  Everything else in
the package (ideals, kernels, cocycle spaces) is built on :class:`Span`.

All vectors are row vectors and all maps act on the right, ``x -> x @ M``.
"""

from __future__ import annotations

import itertools
from functools import cached_property

import numpy as np


def valuation(x: int, p: int, k: int) -> int:
    """p-adic valuation of ``x`` in Z/p^k (``k`` for zero)."""
    x %= p**k
    if x == 0:
        return k
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _valuations(col: np.ndarray, p: int, k: int) -> np.ndarray:
    v = np.zeros(col.shape, dtype=np.int64)
    x = col.copy()
    live = x != 0
    v[~live] = k
    for _ in range(k):
        hit = live & (x % p == 0)
        if not hit.any():
            break
        v[hit] += 1
        x[hit] //= p
        live = hit
    return v


def as_matrix(rows, n: int) -> np.ndarray:
    m = np.asarray(rows, dtype=np.int64)
    if m.size == 0:
        return np.zeros((0, n), dtype=np.int64)
    return m.reshape(-1, n)


def howell_form(rows, p: int, k: int, n: int | None = None):
    """Return ``(H, pivots)`` with ``H`` the Howell form of the row span.

    ``pivots`` is a list of ``(column, p**v)``; pivot entries equal ``p**v``
    and entries above a pivot are reduced into ``[0, p**v)``.
    """
    q = p**k
    if n is None:
        n = np.asarray(rows).shape[-1]
    pool = as_matrix(rows, n) % q
    pool = pool[np.any(pool != 0, axis=1)]
    out = []
    pivots = []
    for c in range(n):
        if pool.shape[0] == 0:
            break
        col = pool[:, c]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        vals = _valuations(col[nz], p, k)
        j = int(np.argmin(vals))
        i = int(nz[j])
        v = int(vals[j])
        pv = p**v
        unit = int(pool[i, c]) // pv
        row = (pool[i] * pow(unit, -1, q)) % q
        rest = np.delete(pool, i, axis=0)
        if rest.shape[0]:
            f = rest[:, c] // pv
            rest = (rest - np.outer(f, row)) % q
        # p^(k-v) * row vanishes in column c but may not vanish later
        extra = (row * (q // pv)) % q
        pool = np.vstack([rest, extra[None, :]])
        pool = pool[np.any(pool != 0, axis=1)]
        out.append(row)
        pivots.append((c, pv))
    H = np.array(out, dtype=np.int64).reshape(len(out), n)
    for i, (c, pv) in enumerate(pivots):
        for j in range(i):
            f = int(H[j, c]) // pv
            if f:
                H[j] = (H[j] - f * H[i]) % q
    return H, pivots


class Span:
    """A submodule of (Z/p^k)^n in Howell form."""

    __slots__ = ("p", "k", "n", "rows", "pivots", "__dict__")

    def __init__(self, rows, p: int, k: int, n: int | None = None):
        if n is None:
            n = np.asarray(rows).shape[-1]
        self.p, self.k, self.n = p, k, n
        self.rows, self.pivots = howell_form(rows, p, k, n)

    @classmethod
    def zero(cls, p, k, n):
        return cls(np.zeros((0, n), dtype=np.int64), p, k, n)

    @classmethod
    def full(cls, p, k, n):
        return cls(np.eye(n, dtype=np.int64), p, k, n)

    @property
    def q(self) -> int:
        return self.p**self.k

    def __eq__(self, other):
        if not isinstance(other, Span):
            return NotImplemented
        return (self.p, self.k, self.n) == (other.p, other.k, other.n) and np.array_equal(
            self.rows, other.rows
        )

    def __hash__(self):
        return hash((self.p, self.k, self.n, self.rows.tobytes()))

    def __repr__(self):
        return f"Span(Z/{self.p}^{self.k}, n={self.n}, order={self.p}^{self.log_order})"

    @cached_property
    def log_order(self) -> int:
        """log_p of the number of elements."""
        return sum(self.k - valuation(pv, self.p, self.k) for _, pv in self.pivots)

    @property
    def order(self) -> int:
        return self.p**self.log_order

    def is_zero(self) -> bool:
        return self.rows.shape[0] == 0

    def reduce(self, v) -> np.ndarray:
        """Canonical representative of ``v`` modulo this span."""
        v = np.asarray(v, dtype=np.int64) % self.q
        if v.ndim == 2:
            return self.reduce_many(v)
        v = v.copy()
        for row, (c, pv) in zip(self.rows, self.pivots):
            f = int(v[c]) // pv
            if f:
                v = (v - f * row) % self.q
        return v

    def reduce_many(self, V) -> np.ndarray:
        V = np.asarray(V, dtype=np.int64) % self.q
        V = V.copy()
        for row, (c, pv) in zip(self.rows, self.pivots):
            f = V[:, c] // pv
            if f.any():
                V = (V - np.outer(f, row)) % self.q
        return V

    def contains(self, v) -> bool:
        return not self.reduce(v).any()

    def contains_span(self, other: "Span") -> bool:
        return all(self.contains(r) for r in other.rows)

    def __add__(self, other: "Span") -> "Span":
        return Span(np.vstack([self.rows, other.rows]), self.p, self.k, self.n)

    def add_rows(self, rows) -> "Span":
        return Span(np.vstack([self.rows, as_matrix(rows, self.n)]), self.p, self.k, self.n)

    def image(self, M) -> "Span":
        M = as_matrix(M, np.asarray(M).shape[-1])
        return Span(self.rows @ M % self.q, self.p, self.k, M.shape[1])

    def intersect(self, other: "Span") -> "Span":
        coeffs = kernel(self.rows, self.p, self.k, target=other)
        return Span(coeffs.rows @ self.rows % self.q, self.p, self.k, self.n)

    def invariants(self) -> list[int]:
        """Invariant factors of the span as an abelian group."""
        vals = smith_valuations(self.rows, self.p, self.k)
        return sorted((self.p ** (self.k - v) for v in vals if v < self.k))

    def free_columns(self) -> list[int]:
        """Coordinates that are not unit pivots; they span any quotient by this span."""
        unit_cols = {c for c, pv in self.pivots if pv == 1}
        return [c for c in range(self.n) if c not in unit_cols]

    def coefficient_ranges(self) -> list[int]:
        return [self.q // pv for _, pv in self.pivots]

    def elements(self):
        """Iterate over every element exactly once."""
        ranges = [range(r) for r in self.coefficient_ranges()]
        for coeffs in itertools.product(*ranges):
            if not coeffs:
                yield np.zeros(self.n, dtype=np.int64)
                continue
            yield np.asarray(coeffs, dtype=np.int64) @ self.rows % self.q

    def random_element(self, rng) -> np.ndarray:
        if self.is_zero():
            return np.zeros(self.n, dtype=np.int64)
        coeffs = np.array([rng.randrange(r) for r in self.coefficient_ranges()], dtype=np.int64)
        return coeffs @ self.rows % self.q


def quotient_representatives(rel: Span):
    """Iterate over canonical representatives of (Z/p^k)^n / rel."""
    q = rel.q
    piv = dict(rel.pivots)
    ranges = [range(piv.get(c, q)) for c in range(rel.n)]
    for v in itertools.product(*ranges):
        yield np.asarray(v, dtype=np.int64)


def kernel(M, p: int, k: int, target: Span | None = None) -> Span:
    """``{x : x @ M in target}`` (``target`` defaults to zero)."""
    q = p**k
    M = np.asarray(M, dtype=np.int64) % q
    m, n = M.shape
    top = np.hstack([M, np.eye(m, dtype=np.int64)])
    blocks = [top]
    if target is not None and not target.is_zero():
        blocks.append(np.hstack([target.rows, np.zeros((target.rows.shape[0], m), dtype=np.int64)]))
    H, pivots = howell_form(np.vstack(blocks), p, k, n + m)
    sel = [i for i, (c, _) in enumerate(pivots) if c >= n]
    return Span(H[sel, n:], p, k, m)


def solve(M, b, p: int, k: int, target: Span | None = None):
    """Some ``x`` with ``x @ M == b`` modulo ``target``, or ``None``."""
    q = p**k
    M = np.asarray(M, dtype=np.int64) % q
    b = np.asarray(b, dtype=np.int64) % q
    m, n = M.shape
    # put the coefficient of -b first so the Howell pivot exposes solvability
    aug = np.vstack([(-b)[None, :], M]) % q
    ker = kernel(aug, p, k, target)
    if ker.is_zero():
        return None
    c, pv = ker.pivots[0]
    if c != 0 or pv != 1:
        return None
    return ker.rows[0, 1:].copy()


def smith_valuations(M, p: int, k: int) -> list[int]:
    """Valuations of the Smith diagonal of ``M`` over Z/p^k (``k`` for zeros)."""
    q = p**k
    A = np.asarray(M, dtype=np.int64) % q
    if A.size == 0:
        return []
    A = A.copy()
    r, c = A.shape
    out = []
    t = 0
    while t < min(r, c):
        sub = A[t:, t:]
        nz = np.argwhere(sub != 0)
        if nz.size == 0:
            break
        vals = _valuations(sub[nz[:, 0], nz[:, 1]], p, k)
        j = int(np.argmin(vals))
        i0, j0 = nz[j] + t
        v = int(vals[j])
        A[[t, i0]] = A[[i0, t]]
        A[:, [t, j0]] = A[:, [j0, t]]
        pv = p**v
        unit = int(A[t, t]) // pv
        A[t] = (A[t] * pow(unit, -1, q)) % q
        f = A[t + 1 :, t] // pv
        A[t + 1 :] = (A[t + 1 :] - np.outer(f, A[t])) % q
        g = A[t, t + 1 :] // pv
        A[:, t + 1 :] = (A[:, t + 1 :] - np.outer(A[:, t], g)) % q
        out.append(v)
        t += 1
    out.extend([k] * (min(r, c) - len(out)))
    return out


def quotient_invariants(big: Span, small: Span) -> list[int]:
    """Invariant factors of ``big / small`` (requires ``small`` inside ``big``)."""
    p, k = big.p, big.k
    B = big.rows
    r = B.shape[0]
    if r == 0:
        return []
    pre = kernel(B, p, k, target=small)
    vals = smith_valuations(pre.rows, p, k) if not pre.is_zero() else []
    vals = vals + [k] * (r - len(vals))
    return sorted(p**v for v in vals if v > 0)


def log_index(big: Span, small: Span) -> int:
    """log_p |big / small|."""
    return big.log_order - small.log_order
