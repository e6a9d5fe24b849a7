"""Difference-isomorphic families of r-uniform hypergraphs.

Build, verify, search and stress-test families in which every two members
have isomorphic differences.
"""

__version__ = "0.1.0"

from .constructions import (
    ConstructionSpec,
    appendix_family,
    construct,
    extremal_family,
    layer_family,
    middle_layer_family,
    perfect_matchings_family,
    star_family,
)
from .core import (
    EdgePerm,
    EdgeSpace,
    Family,
    Perm,
    RGraph,
    edge_space,
    induce_edge_perm,
    involutions,
)
from .errors import (
    CapacityError,
    ContractError,
    DegenerateConstructionError,
    DiffisoError,
    FamilyFormatError,
    LemmaViolation,
    SpaceMismatchError,
    ValidationError,
)
from .family import (
    VerifyReport,
    complement_family,
    dualize,
    find_involution_clique,
    is_difference_isomorphic,
    read_family,
    write_family,
)
from .isocanon import CanonCache, CanonForm, are_isomorphic, canon
from .relation import arrow, choosable_pairs, cycle_partition, e_psi, f_r, neighborhood
from .search import SearchResult, build_compat, duality_check, max_clique, search

__all__ = [name for name in dir() if not name.startswith("_")]
