"""Finite-level laboratory for pseudocharacters, GMAs and R=T criteria.

Everything lives over ``O = Z/p^e``: finite local algebras, group
representations, Cayley-Hamilton quotients and their reducibility ideals,
group cohomology with local conditions, and the numerical criterion for
surjections of local algebras.
"""

from . import errors
from .ring import LocalAlgebra, Ideal, is_principal, minimal_generators
from .groups import FiniteGroup, GroupRep, Involution
from .pseudochar import (
    analyze,
    block_triangularize,
    principality_certificate,
    reducibility_ideal,
    trace_pseudocharacter,
)
from .cohomology import GModule, h1, selmer, torsion_functoriality_check
from .criterion import check_cri1, wiles_lenstra_data

__version__ = "0.1.0"

__all__ = [
    "errors",
    "LocalAlgebra",
    "Ideal",
    "is_principal",
    "minimal_generators",
    "FiniteGroup",
    "GroupRep",
    "Involution",
    "analyze",
    "block_triangularize",
    "principality_certificate",
    "reducibility_ideal",
    "trace_pseudocharacter",
    "GModule",
    "h1",
    "selmer",
    "torsion_functoriality_check",
    "check_cri1",
    "wiles_lenstra_data",
]
