"""Delay-inverse systems over concrete categories.

Windowed verification of delay conditions with explicit witnesses, and
constructive reductions: cofinal restriction, subset reindexing, sequence
reduction, commutative extraction, morphism levelling and strict
isomorphism extraction.
"""

from .category import BACKENDS, FINSET, MATMOD, Mor, Obj, get_backend, mor_eq
from .dmorphism import (
    DelayMorphism,
    ExtractResult,
    LevelPackage,
    check_delay_morphism,
    compose,
    d_equiv,
    extract_pro_iso,
    identity_morphism,
    level_reindex,
    make_special,
    verify_iso_pair,
)
from .errors import (
    CompositionError,
    DocumentError,
    GenerationError,
    InconclusiveError,
    PreconditionError,
    ProkitError,
    UnsupportedQueryError,
)
from .fuzz import (
    PlantSpec,
    gen_adversarial_sequence,
    gen_planted_level_iso,
    gen_planted_sequence,
    gen_strict_sequence,
    oracle_min_commutation,
    run_fuzz,
    sample_morphism_delay,
    sample_profile,
)
from .indexset import (
    Counterexample,
    FinitePoset,
    IndexElem,
    IndexPoset,
    MardesicPoset,
    MissingWitness,
    NatPoset,
    NatSquarePoset,
    PairPoset,
    SubsetPoset,
    Verdict,
    WitnessTable,
    enumerate_window,
    is_cofinal,
    is_cofinite,
    is_directed,
    mardesic,
    upper_bound,
)
from .system import (
    CommutationReport,
    DelaySystem,
    check_delay,
    check_strict,
    check_wellformed,
    commutative_extract,
    mardesic_reindex,
    min_commutation_index,
    restrict,
    to_sequence,
)

__version__ = "0.1.0"
