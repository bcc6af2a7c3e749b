"""Exact-arithmetic toolkit for finite groupoids.

Groupoids are explicit tables over string tokens; measures carry rational
weights.  The package builds and certifies Haar systems, averages fiber
systems over actions, moves Haar systems across equivalences, and checks the
results through the convolution algebra they generate.
"""

from .actions import (
    Action,
    Equivalence,
    imprimitivity_groupoid,
    imprimitivity_iso,
    is_free,
    left_action,
    left_translation_action,
    opposite,
    opposite_equivalence,
    orbit_space,
    right_action,
    right_translation_action,
    unit_translation_action,
    validate_action,
    validate_equivalence,
)
from .convolution import (
    EXHAUSTIVE_LIMIT,
    GroupoidFunction,
    associativity_oracle,
    convolve,
    delta,
)
from .documents import Document, SchemaError, parse, serialize
from .groupoids import (
    CompositionError,
    Groupoid,
    ValidationReport,
    Violation,
    blow_up,
    blowup_arrow,
    group_as_groupoid,
    is_principal,
    is_transitive,
    make_groupoid,
    pair_arrow,
    pair_groupoid,
    relation_arrow,
    relation_groupoid,
    stability_group,
    transformation_arrow,
    transformation_groupoid,
    unit_orbit_map,
    validate_groupoid,
)
from .systems import (
    Cutoff,
    FiberSystem,
    HaarSystem,
    Measure,
    as_fraction,
    check_haar,
    check_system,
    counting_haar,
    cutoff_function,
    fiber_system,
    full_fiber_system,
    make_haar,
    representative_cutoff,
    uniform_cutoff,
)
from .transfer import (
    PipelineError,
    average_system,
    blowup_haar,
    check_equivariant,
    default_beta,
    default_phi,
    fiber_integrate,
    imprimitivity_haar,
    invariant_measure,
    principal_haar,
    psi_phi,
    transfer_haar,
    transitive_haar,
)

__all__ = [
    "Action",
    "CompositionError",
    "Cutoff",
    "Document",
    "EXHAUSTIVE_LIMIT",
    "Equivalence",
    "FiberSystem",
    "Groupoid",
    "GroupoidFunction",
    "HaarSystem",
    "Measure",
    "PipelineError",
    "SchemaError",
    "ValidationReport",
    "Violation",
    "as_fraction",
    "associativity_oracle",
    "average_system",
    "blow_up",
    "blowup_arrow",
    "blowup_haar",
    "check_equivariant",
    "check_haar",
    "check_system",
    "convolve",
    "counting_haar",
    "cutoff_function",
    "default_beta",
    "default_phi",
    "delta",
    "fiber_integrate",
    "fiber_system",
    "full_fiber_system",
    "group_as_groupoid",
    "imprimitivity_groupoid",
    "imprimitivity_haar",
    "imprimitivity_iso",
    "invariant_measure",
    "is_free",
    "is_principal",
    "is_transitive",
    "left_action",
    "left_translation_action",
    "make_groupoid",
    "make_haar",
    "opposite",
    "opposite_equivalence",
    "orbit_space",
    "pair_arrow",
    "pair_groupoid",
    "parse",
    "principal_haar",
    "psi_phi",
    "relation_arrow",
    "relation_groupoid",
    "representative_cutoff",
    "right_action",
    "right_translation_action",
    "serialize",
    "stability_group",
    "transfer_haar",
    "transformation_arrow",
    "transformation_groupoid",
    "transitive_haar",
    "unit_orbit_map",
    "unit_translation_action",
    "uniform_cutoff",
    "validate_action",
    "validate_equivalence",
    "validate_groupoid",
]
