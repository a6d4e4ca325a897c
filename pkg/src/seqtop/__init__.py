"""Limit operators on finite spaces, separating refinements and causal completions of finitely presented models."""

from .chrono import ChronoModel, PSet, model_from_json, s_related_formula, validate_model
from .completion import (
    admissibility_report,
    build_completion,
    chron_double_star,
    chron_iterate,
    chron_limit,
    chron_star,
)
from .fixtures import FIXTURE_IDS, FixtureMismatch, generate
from .kernels import BACKEND
from .limits import (
    TailLimitOperator,
    associated_operator,
    derived_topology,
    iterate,
    order_of,
    restrict_operator,
    star_operator,
    validate_operator,
    verify_section3,
)
from .predicates import normalize, parse
from .topology import (
    FinTopology,
    GroundSet,
    all_topologies,
    generate_topology,
    separating_refinement,
    subspace,
    verify_minimality,
)
from .upset import UPSet

__all__ = [
    "BACKEND", "ChronoModel", "FIXTURE_IDS", "FinTopology", "FixtureMismatch", "GroundSet", "PSet",
    "TailLimitOperator", "UPSet", "admissibility_report", "all_topologies", "associated_operator",
    "build_completion", "chron_double_star", "chron_iterate", "chron_limit", "chron_star", "derived_topology",
    "generate", "generate_topology", "iterate", "model_from_json", "normalize", "order_of", "parse",
    "restrict_operator", "s_related_formula", "separating_refinement", "star_operator", "subspace",
    "validate_model", "validate_operator", "verify_minimality", "verify_section3",
]
