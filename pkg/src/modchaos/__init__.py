"""Modular domain-structured chaos.

Labeled metric-space modules, the modular similarity map, finite-range
certificates for the diameter and separation conditions, constructive chaos
witnesses, and random processes whose realizations are trajectories of the
map.
"""

from .dynamics import (
    ModularPoint,
    check_unpredictability,
    find_sensitivity_witness,
    find_transitivity_witness,
    in_km_neighborhood,
    liyorke_report,
    periodic_point_in_neighborhood,
    phi,
    phi_n,
    point_distance,
    point_value,
    validate_sensitivity,
    verify_affine_similarity,
)
from .randproc import (
    RandomProcessSpec,
    Realization,
    TimeGrid,
    emit_path_csv,
    equivalence_report,
    example1_structure,
    example2_structure,
    example3_structure,
    realization_to_point,
    sample_realization,
)
from .structure import (
    FinitePoints,
    GridFunction,
    Interval,
    ModularStructure,
    ModuleSpace,
    check_nesting,
    diameter,
    diameter_report,
    modular_certificate,
    separation_report,
    set_distance,
    strong_certificate,
)
from .symseq import (
    Alphabet,
    FiniteSeq,
    GeneratedSeq,
    MetricInterval,
    PeriodicSeq,
    agreement_prefix_length,
    contains_word,
    make_periodic,
    scrambled_pair,
    shift,
    sigma_distance,
    symbol_at,
    universal_sequence,
)

__version__ = "0.1.0"
