"""Truncated symmetric simplicial sets of type spaces: construction from
finite structures and builtin theories, lifting-property checkers,
bounded stability tests, and decalage cohomology with integer
coefficients."""

from .finmaps import (
    FinSetMap,
    MalformedMapError,
    adjacent_transposition,
    back_inclusion,
    canonical_factorization,
    compose,
    duplicate,
    finmap,
    front_inclusion,
    generator_decomposition,
    identity,
    pick,
    skip,
)
from .core import (
    CapExceededError,
    DecalageFunctor,
    OracleFunctor,
    Report,
    RepresentableFunctor,
    SimplicialMapHandle,
    TableFunctor,
    TruncatedSymSS,
    TruncationError,
    decalage,
    dumps,
    from_json_dict,
    head_projection,
    head_projections,
    induced_map,
    is_representable,
    loads,
    puncture,
    simplicial_map_validate,
    tabulate,
    to_json_dict,
    validate_functor,
)
from .theories import (
    BUILTIN_NAMES,
    builtin,
    classifying_space,
    punctured_dlo,
    simplex_search,
    simplicial_quotient,
)
from .structures import (
    DefinableSet,
    FinStructure,
    Permutation,
    StructureError,
    automorphisms,
    definable_closure_theory,
    definable_quotient,
    induced_substructure,
    load_structure,
    orbit_theory,
    structure,
    structure_from_json_dict,
)
from .axioms import (
    AmalgamationInstance,
    UnvalidatedMapError,
    check_beck_chevalley,
    check_model,
    check_theory,
    check_vibrant,
)
from .stability import (
    DividesReport,
    IndiscernibleWitness,
    OrderWitness,
    divides_at_level,
    indiscernible_gap,
    order_coherent,
    order_property,
    order_witness_valid,
)
from .cohomology import (
    CochainComplex,
    CoherenceClasses,
    CohomologyGroup,
    SNFResult,
    build_complex,
    coherence_classes,
    cohomology,
    complex_is_exactly_composable,
    smith_normal_form,
    snf_is_valid,
)

__version__ = "0.1.0"
