"""grothkit: finite-category computations around the Grothendieck construction."""

from .report import Check, Report, ValidationError
from .fincat import (
    CatDiagram,
    DiagramMor,
    FinCat,
    FunctorData,
    IsoWitness,
    NatTransData,
    compose_diagram_mors,
    compose_functors,
    id_name,
    identity_diagram_mor,
    identity_functor,
    identity_nat_trans,
    make_category,
    pair_id,
    reindex,
    validate_category,
    validate_diagram,
    validate_diagram_mor,
    validate_functor,
    validate_nat_trans,
)
from .build import (
    arrow_diagram,
    chain,
    commuting_square_poset,
    constant_diagram,
    coslice_category,
    cyclic_table,
    delooping,
    discrete,
    iso_diagram,
    one_object_diagram,
    opposite,
    poset,
    product,
    product_projections,
    representable_diagram,
    slice_category,
    terminal,
    terminal_diagram,
    walking_arrow,
    walking_iso,
)
from .isosearch import (
    BUDGET,
    DEFAULT_BUDGET,
    FOUND,
    NONE,
    Budget,
    BudgetExceeded,
    SearchResult,
    diagram_iso_search,
    iso_search,
    nat_iso_search,
    over_base_iso_search,
)
from .opfib import (
    Cleavage,
    CleavedOpfib,
    PullbackOpfib,
    cell_transport,
    check_cleavage_preserving,
    check_discrete_opfib,
    check_split_opfib,
    cleaved_opfib,
    fibre_category,
    fibres,
    find_cartesian_lifts,
    pullback_opfib,
)
from .groth import (
    BaseChange,
    GrothTotal,
    LaxCocone,
    base_change,
    cocone_factorize,
    factorize,
    groth,
    groth_map,
    inc_cocone,
    validate_lax_cocone,
)
from .indexed import (
    DiagramModification,
    DiagramOpfib,
    DiagramOpfibMor,
    check_diagram_opfib,
    check_diagram_opfib_mor,
    diagram_opfib,
    diagram_opfib_iso_search,
    discrete_check_diagram,
    discrete_check_opfib,
    dualize_diagram,
    dualize_functor,
    dualize_opfib,
    identity_diagram_opfib,
    identity_modification,
    indexed_fibres,
    indexed_fibres_map,
    indexed_groth,
    indexed_groth_map,
    indexed_roundtrip_diagram,
    indexed_roundtrip_opfib,
    pseudonat_check,
    pullback_diagram_opfib,
    two_cell_action,
    validate_diagram_modification,
    vertical_compose_modifications,
)
from .dsl import (
    Diagnostic,
    Workspace,
    WorkspaceParseError,
    parse_files,
    parse_workspace,
    print_workspace,
    render_dot,
)
from .cli import run_command

__all__ = [n for n in dir() if not n.startswith("_")]
__version__ = "0.1.0"
