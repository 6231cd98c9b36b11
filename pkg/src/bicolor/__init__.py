"""Exact finite combinatorics of bi-colored pregeometry expansions."""

from .exactnum import (
    Alpha,
    ApproximationPair,
    PreDimValue,
    QuadRat,
    ZERO,
    compare,
    compare_word,
    dirichlet_window,
    epsilon_bound,
    rational_pair,
)
from .pregeom import Backend, GroundElement, acl_in, dim_independent, rank, rel_rank
from .colored import (
    ColoredStructure,
    EmbeddingMap,
    delta,
    empty_structure,
    in_k_plus,
    is_lp_embedding,
    is_weak_iso,
    k_plus_violation,
)
from .closure import (
    big_cl,
    closure,
    closure_n,
    d_independent,
    d_value,
    is_closed,
    is_intrinsic,
    is_minimal_pair,
)
from .amalgam import free_amalgam, verify_free, verify_strong
from .construct import (
    delta_system_closed_root,
    free_power_patch,
    generic_basis_extension,
    minimal_pair_chain,
    rational_minimal_extension,
    rational_zero_extension,
    transcendental_patch,
)
from .workbench import (
    audit_richness,
    audit_semi_generic,
    build_generic,
    load,
    save,
    task_catalog,
)

__version__ = "0.1.0"
