"""semspace: a promise-calculus engine for semantic spacetimes.

Agents make signed, typed, discrete-alphabet promises to one another; the
library scales the resulting graph up and down (super-agents, directories,
resolution), accounts for valency and tenancy, and simulates addressing and
routing over trees, lattices and Clos fabrics.
"""

from .core import (
    WILDCARD,
    Agent,
    AdjacencyMatrix,
    Alias,
    Body,
    Promise,
    Scale,
    SemanticSpacetime,
    absorb,
    adjacency_neighbors,
    any_promise_neighbors,
    complete_information,
    emit,
    promise_adjacency_matrix,
    promise_rank,
    rank_decomposition,
    relabel_by_scalar,
    resolve_name,
)
from .dispatch import DeliveryOutcome, dispatch, effective_scope, flood, make_transparent
from .language import (
    Alphabet,
    ContinuityReport,
    TranslationMatrix,
    common_part,
    continuity_check,
    is_invertible,
    superagent_language,
    translate,
)
from .routing import (
    ClosFabric,
    FlatSpace,
    ForwardingTable,
    LatticeSpace,
    MetricAddress,
    SemanticAddress,
    TableCostReport,
    TreeSpace,
    build_clos,
    build_flat,
    build_lattice,
    build_tree,
    clos_route,
    route,
    table_cost,
)
from .scaling import (
    Directory,
    FluxReport,
    SuperAgent,
    build_directory,
    coarse_grain,
    declare_superagent,
    define_scale,
    gauss_check,
    get_superagent,
    irreducible_promises,
    resolve,
    spacetime_equivalent,
    surface,
)
from .tenancy import (
    Namespace,
    TenancyBinding,
    bind_multitenancy,
    bind_occupancy,
    bind_tenancy,
    check_binding,
    make_namespace,
    symmetrize_to_adjacency,
    tenancy_cycles,
    tenancy_direction,
    tenant_isolation_scan,
)
from .valency import ValenceReport, is_overcommitted, is_saturated, valence

__version__ = "0.1.0"
