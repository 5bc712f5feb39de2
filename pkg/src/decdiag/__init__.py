"""Analysis of finite abstract rewrite systems with decreasing diagrams."""

__version__ = "0.1.0"

from .ars import (
    Ars,
    CommArs,
    MainRoad,
    PropertyName,
    PropertyReport,
    all_ars,
    check,
    check_commutation,
    convertible_components,
    disjoint_union,
    find_cofinal_sequence,
    normal_forms,
    reachable,
)
from .cofinality import (
    DistanceMap,
    LabelarsReport,
    WellOrder,
    compute_distances,
    dcr2_construct,
    label_two,
    verify_labelars,
)
from .decreasing import (
    JoinCertificate,
    JoinPath,
    LabelledArs,
    LabelledCommArs,
    Peak,
    SearchResult,
    dc_search,
    dcr_search,
    decreasing_join_exists,
    is_locally_decreasing,
    is_locally_decreasing_comm,
    strip_max_label,
    verify_simple_01,
)
from .dot import export_dot
from .errors import ArsError, NotConfluentError, ParseError
from .fileformat import format_system, parse_system, read_system, write_system
from .fologic import check_bounded_gfop, eval_formula, format_formula, paper_formula, parse_formula
from .modeltheory import (
    UNREACHABLE,
    RootedGraph,
    canonical_encoding,
    degree,
    gen_family,
    locally_isomorphic,
    neighbourhood,
    rooted_isomorphic,
    undirected_distance,
)
from .phi import PhiSystem, phi, phi_witness_labelling, verify_phi_properties
