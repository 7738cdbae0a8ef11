"""Resourceful traces: free effectful categories over effectful graphs.

The package decides equality of schedules built from typed, device-using
actions.  The classical Mazurkiewicz trace monoid is the special case of
a device graph with no objects; the general case adds resource wiring and
whiskering.  See the README for the file format and CLI.
"""

from .graphs import (
    EMPTY,
    DeviceGraph,
    DeviceGraphMorphism,
    EffectfulGraph,
    EffectfulGraphMorphism,
    GraphError,
    MonoidalGraph,
    MonoidalGraphMorphism,
    Word,
    check_device_graph_morphism,
    check_effectful_graph_morphism,
    check_monoidal_graph_morphism,
    device_free,
    orthogonal,
    validate_device_graph,
    validate_effectful_graph,
    validate_monoidal_graph,
)
from .freecat import (
    BoundaryMismatch,
    BudgetExceeded,
    CanonicalForm,
    Event,
    FreeEffectfulCategory,
    GraphMismatch,
    NotPure,
    NotSwappable,
    PremonoidalMorphism,
    bfs_equiv,
    boundaries,
    canonical_form,
    canonical_morphism,
    compose,
    devices_of,
    embed_pure,
    enumerate_morphisms,
    expr_string,
    gen_event,
    identity,
    interchange_holds,
    left_whisker,
    map_morphism,
    morphisms_equal,
    right_whisker,
    swap_adjacent,
    tensor_pure,
)
from .traces import (
    DependencyRelation,
    dep_leq,
    dependency_to_distribution,
    dist_leq,
    distribution,
    distribution_to_dependency,
    foata_nf,
    galois_check,
    trace_equal,
    trace_vs_freecat,
)
from .interference import (
    interference_graph,
    maximal_cliques,
    triangle_checks,
    underlying_device_graph_bounded,
    unit_map,
)
from .tensor import commuting_tensor, is_commuting_cospan, mediating_morphism, commuting_tensor_check
from .render import layout, render_svg, render_text

__version__ = "0.1.0"
