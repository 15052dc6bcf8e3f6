"""Built-in algebras, groups and representations used by demos, fuzzers and tests."""

from __future__ import annotations

import numpy as np

from . import errors
from .groups import (
    FiniteGroup,
    cyclic_group,
    dicyclic_group,
    dihedral_group,
    quaternion_group,
    semidirect_group,
    sl2_group,
    symmetric_group,
)
from .ring import BaseRing, LocalAlgebra, base_algebra


def polynomial_quotient(p: int, e: int, f, name: str | None = None, relations=None) -> LocalAlgebra:
    """``Z/p^e[x]/(f)`` for monic ``f`` given by coefficients ``[f_0, ..., f_{d-1}]`` (leading 1 implied)."""
    q = p**e
    f = [int(a) % q for a in f]
    d = len(f)
    # x^k reduced to degree < d, for k < 2d - 1
    powers = []
    for k in range(2 * d - 1):
        v = np.zeros(d, dtype=np.int64)
        if k < d:
            v[k] = 1
        else:
            prev = powers[k - 1]
            lead = int(prev[d - 1])
            v[1:] = prev[:-1]
            v = (v - lead * np.array(f)) % q
        powers.append(v)
    c = np.zeros((d, d, d), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            c[i, j] = powers[i + j]
    unit = [1] + [0] * (d - 1)
    return LocalAlgebra(BaseRing(p, e), c, unit, relations=relations, name=name)


def prime_field(p: int) -> LocalAlgebra:
    A = base_algebra(p, 1)
    A.name = f"F{p}"
    return A


def truncated(p: int, e: int) -> LocalAlgebra:
    A = base_algebra(p, e)
    A.name = f"Z/{p**e}"
    return A


def dual_numbers(p: int, e: int = 1) -> LocalAlgebra:
    """``Z/p^e[eps]/(eps^2)``."""
    label = f"F{p}[eps]" if e == 1 else f"Z/{p**e}[eps]"
    return polynomial_quotient(p, e, [0, 0], name=label)


def ramified_square(p: int) -> LocalAlgebra:
    """``Z/p^2[d]/(d^2, p d)``."""
    return polynomial_quotient(p, 2, [0, 0], name=f"Z/{p*p}[d]/(d^2,{p}d)", relations=[[0, p]])


def truncated_poly(p: int, e: int, n: int) -> LocalAlgebra:
    """``Z/p^e[x]/(x^n)``."""
    return polynomial_quotient(p, e, [0] * n, name=f"Z/{p**e}[x]/x^{n}" if e > 1 else f"F{p}[x]/x^{n}")


def eisenstein_square(p: int, e: int) -> LocalAlgebra:
    """``Z/p^e[x]/(x^2 - p x)``."""
    return polynomial_quotient(p, e, [0, -p], name=f"Z/{p**e}[x]/(x^2-{p}x)")


def ramified_extension(p: int, e: int) -> LocalAlgebra:
    """``Z/p^e[x]/(x^2 - p)``, a truncated totally ramified quadratic extension."""
    return polynomial_quotient(p, e, [-p, 0], name=f"Z/{p**e}[sqrt{p}]")


def square_zero_plane(p: int) -> LocalAlgebra:
    """``F_p[x,y]/(x^2, xy, y^2)``, basis ``1, x, y``."""
    c = np.zeros((3, 3, 3), dtype=np.int64)
    c[0, 0, 0] = 1
    for i in (1, 2):
        c[0, i, i] = c[i, 0, i] = 1
    return LocalAlgebra(BaseRing(p, 1), c, [1, 0, 0], name=f"F{p}[x,y]/(x,y)^2")


def unramified_quadratic(p: int, e: int = 1) -> LocalAlgebra:
    """``Z/p^e[x]/(x^2 - a)`` with ``a`` a non-square mod p (p odd)."""
    if p == 2:
        return polynomial_quotient(2, e, [1, 1], name="F4" if e == 1 else f"W(F4)/{2**e}")
    squares = {(t * t) % p for t in range(p)}
    a = next(t for t in range(2, p) if t not in squares)
    return polynomial_quotient(p, e, [-a, 0], name=f"F{p*p}" if e == 1 else f"W(F{p*p})/{p**e}")


def fuzz_algebras(p: int) -> list:
    """Algebras sampled by the GMA fuzzer."""
    return [prime_field(p), truncated(p, 2), dual_numbers(p), ramified_square(p)]


def algebra_catalog(max_log: int = 6) -> list:
    """Small local algebras of order at most ``p^max_log`` for p in {2, 3, 5}."""
    out = []
    for p in (2, 3, 5):
        cands = [
            prime_field(p),
            truncated(p, 2),
            truncated(p, 3),
            dual_numbers(p),
            dual_numbers(p, 2),
            ramified_square(p),
            truncated_poly(p, 1, 3),
            truncated_poly(p, 1, 4),
            square_zero_plane(p),
            eisenstein_square(p, 2),
            eisenstein_square(p, 3),
            ramified_extension(p, 2),
            ramified_extension(p, 3),
            unramified_quadratic(p),
            unramified_quadratic(p, 2),
        ]
        out += [A for A in cands if A.log_order <= max_log and p ** A.log_order <= 3**max_log]
    return out


ALGEBRAS = {
    "F3": lambda: prime_field(3),
    "F5": lambda: prime_field(5),
    "F7": lambda: prime_field(7),
    "Z/9": lambda: truncated(3, 2),
    "Z/27": lambda: truncated(3, 3),
    "Z/25": lambda: truncated(5, 2),
    "F3[eps]": lambda: dual_numbers(3),
    "F5[eps]": lambda: dual_numbers(5),
    "Z/9[d]/(d^2,3d)": lambda: ramified_square(3),
    "F3[x,y]/(x,y)^2": lambda: square_zero_plane(3),
    "Z/9[x]/(x^2-3x)": lambda: eisenstein_square(3, 2),
    "Z/27[x]/(x^2-3x)": lambda: eisenstein_square(3, 3),
    "F9": lambda: unramified_quadratic(3),
}


GROUPS = {
    "S3": lambda: symmetric_group(3),
    "S4": lambda: symmetric_group(4),
    "D4": lambda: dihedral_group(4),
    "D5": lambda: dihedral_group(5),
    "D7": lambda: dihedral_group(7),
    "Q8": quaternion_group,
    "Z3": lambda: cyclic_group(3),
    "Z7:Z3": lambda: semidirect_group(7, 3),
    "Z5:Z4": lambda: semidirect_group(5, 4),
    "Z3:Z4": lambda: dicyclic_group(3),
    "SL2(F3)": lambda: sl2_group(3),
}


def named_algebra(name: str) -> LocalAlgebra:
    try:
        return ALGEBRAS[name]()
    except KeyError:
        raise KeyError(f"unknown algebra {name!r}; known: {', '.join(sorted(ALGEBRAS))}") from None


def named_group(name: str) -> FiniteGroup:
    if name.startswith("Z") and name[1:].isdigit():
        return cyclic_group(int(name[1:]))
    if name.startswith("D") and name[1:].isdigit():
        return dihedral_group(int(name[1:]))
    if name.startswith("S") and name[1:].isdigit():
        return symmetric_group(int(name[1:]))
    try:
        return GROUPS[name]()
    except KeyError:
        raise errors.NotAGroup(f"unknown group {name!r}") from None
