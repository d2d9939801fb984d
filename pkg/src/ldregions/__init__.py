"""Change detection, change-region mining and budgeted monitoring for
versioned RDF datasets."""

from .aggregate import (
    BIN_HIGH,
    BIN_LOW,
    BIN_STATIC,
    DEFAULT_BOUNDARIES,
    ConceptChangeProfile,
    Region,
    RegionSet,
    TransitionRecord,
    aggregate_transitions,
    bin_concepts_into_regions,
    estimate_probabilities,
)
from .diff import (
    DEFAULT_THETA,
    ChangeSet,
    ChangeType,
    MatchCandidate,
    ResourceChange,
    apply_changeset,
    diff_versions,
    match_moved,
    similarity,
)
from .evaluate import (
    EvaluationReport,
    GoldStandard,
    ReportSet,
    evaluate_moves,
    load_gold_standard,
)
from .model import DatasetVersion, restrict_version, version_from_descriptions
from .ntriples import ParseReport, parse_ntriples, serialize_ntriples, write_ntriples
from .scheduling import (
    DEFAULT_EPSILON,
    STRATEGIES,
    FetchHistory,
    SchedulePlan,
    allocate_budget,
    baseline_plan,
    normalize_weights,
    region_plan,
    score_regions,
    select_resources,
)
from .simulate import (
    DETECTION_DIFF,
    DETECTION_ORACLE,
    SimulationResult,
    optimal_accuracy_reference,
    regions_from_truth,
    run_simulation,
)
from .synth import ConceptSpec, SyntheticConfig, generate_synthetic_corpus
from .terms import RDF_TYPE, SELF_TOKEN, UNTYPED_CONCEPT, Triple

__version__ = "0.1.0"
