"""Replay of a version history under a monitoring strategy.

Each cycle covers one version transition: the strategy plans a fetch set
from what the monitor has seen so far (never from unfetched truth), the
detection model turns the fetched descriptions into classified changes,
and the changes are scored against the true changeset of that transition.

The region strategy bootstraps by observing its first `warmup` transitions
in full; baselines run budget-limited from the first transition under
their own cold-start rules.  Scoring starts after the warmup window for
every strategy so cumulative figures compare on the same transitions.

A new-resource listing channel (the subjects appearing in the target
version) is what makes creates observable at all; it can be switched off.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .aggregate import (
    BIN_HIGH,
    BIN_STATIC,
    DEFAULT_BOUNDARIES,
    RegionSet,
    TransitionRecord,
    aggregate_transitions,
    bin_concepts_into_regions,
    estimate_probabilities,
)
from .diff import CHANGE_TYPES, ChangeSet, ChangeType, DEFAULT_THETA, diff_versions
from .errors import BadConfigError, BadWarmupError, VersionChainBrokenError
from .evaluate import ReportSet, report_from_sets
from .model import DatasetVersion, Pair, restrict_version, version_from_descriptions
from .scheduling import (
    DEFAULT_EPSILON,
    STRATEGIES,
    STRATEGY_RANDOM,
    STRATEGY_REGION,
    FetchHistory,
    baseline_plan,
    normalize_weights,
    region_plan,
    validate_budget,
)
from .terms import RDF_TYPE, UNTYPED_CONCEPT, is_iri_token, token_iri_value

DETECTION_ORACLE = "oracle"
DETECTION_DIFF = "diff"
DETECTION_MODELS = (DETECTION_ORACLE, DETECTION_DIFF)


@dataclass(frozen=True)
class CycleReport:
    transition: int
    fetched: int
    reports: ReportSet

    def to_dict(self) -> dict:
        return {
            "transition": self.transition,
            "fetched": self.fetched,
            "reports": self.reports.to_dict(),
        }


@dataclass(frozen=True)
class SimulationResult:
    strategy: str
    budget: int
    epsilon: float
    warmup: int
    detection: str
    theta: float
    seed: int
    boundaries: tuple[float, float]
    weights: dict[str, float]
    per_cycle: tuple[CycleReport, ...]
    cumulative: ReportSet
    total_fetches: int
    optimal_reference_f: float | None

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "budget": self.budget,
            "epsilon": self.epsilon,
            "warmup": self.warmup,
            "detection": self.detection,
            "theta": self.theta,
            "seed": self.seed,
            "boundaries": list(self.boundaries),
            "weights": dict(sorted(self.weights.items())),
            "per_cycle": [report.to_dict() for report in self.per_cycle],
            "cumulative": self.cumulative.to_dict(),
            "total_fetches": self.total_fetches,
            "optimal_reference_f": self.optimal_reference_f,
        }


def truth_sets(changeset: ChangeSet) -> dict[str, set]:
    """Per change type, the identifying keys: IRIs, or (old, new) pairs."""
    out: dict[str, set] = {ct.value: set() for ct in CHANGE_TYPES}
    for rc in changeset.resource_changes:
        if rc.change_type == ChangeType.CREATE:
            out["create"].add(rc.new_iri)
        elif rc.change_type in (ChangeType.MOVE, ChangeType.RENEW):
            out[rc.change_type.value].add((rc.old_iri, rc.new_iri))
        else:
            out[rc.change_type.value].add(rc.old_iri)
    return out


def _detected_sets_from_changeset(changeset: ChangeSet) -> dict[str, set]:
    return truth_sets(changeset)


def _detect_oracle(
    truth: ChangeSet, fetched: set[str], listing: bool
) -> dict[str, set]:
    """A true change is detected iff its source-side IRI was fetched."""
    truth_by_type = truth_sets(truth)
    detected: dict[str, set] = {ct.value: set() for ct in CHANGE_TYPES}
    detected["create"] = set(truth_by_type["create"]) if listing else set()
    detected["remove"] = {r for r in truth_by_type["remove"] if r in fetched}
    detected["update"] = {r for r in truth_by_type["update"] if r in fetched}
    detected["move"] = {pair for pair in truth_by_type["move"] if pair[0] in fetched}
    detected["renew"] = {pair for pair in truth_by_type["renew"] if pair[0] in fetched}
    return detected


def _detect_diff(
    v_from: DatasetVersion,
    v_to: DatasetVersion,
    fetched: set[str],
    theta: float,
    listing: bool,
) -> dict[str, set]:
    """Diff the fetched descriptions of both endpoints, plus listed newcomers."""
    new_subjects = v_to.subjects() - v_from.subjects() if listing else frozenset()
    v1 = restrict_version(v_from, fetched)
    v2 = restrict_version(v_to, (fetched & v_to.subjects()) | new_subjects)
    return _detected_sets_from_changeset(diff_versions(v1, v2, theta))


def _score(detected: Mapping[str, set], truth: Mapping[str, set]) -> ReportSet:
    return ReportSet(
        {
            ct.value: report_from_sets(detected.get(ct.value, ()), truth.get(ct.value, ()))
            for ct in CHANGE_TYPES
        }
    )


def _known_concepts(pairs: frozenset[Pair]) -> frozenset[str]:
    concepts = {
        token_iri_value(o) for p, o in pairs if p == RDF_TYPE and is_iri_token(o)
    }
    return frozenset(concepts) if concepts else frozenset({UNTYPED_CONCEPT})


class _MonitorState:
    """Everything the scheduler may legitimately see.

    Seeded with the initial dump; afterwards only fetch outcomes and the
    new-resource listing flow in.
    """

    def __init__(self, initial: DatasetVersion):
        self.known: dict[str, frozenset[Pair]] = dict(initial.subject_index)
        self.history = FetchHistory()
        self.records: list[TransitionRecord] = []
        for resource, pairs in self.known.items():
            self.history.record_size(resource, len(pairs))

    def universe(self) -> list[str]:
        return sorted(self.known)

    def concept_members(self) -> dict[str, set[str]]:
        members: dict[str, set[str]] = {}
        for resource, pairs in self.known.items():
            for concept in _known_concepts(pairs):
                members.setdefault(concept, set()).add(resource)
        return members

    def known_version(self, label: str) -> DatasetVersion:
        return version_from_descriptions(label, self.known)

    def ingest_fetches(
        self, fetched: Sequence[str], v_from: DatasetVersion, v_to: DatasetVersion, cycle: int
    ) -> None:
        to_subjects = v_to.subject_index
        from_subjects = v_from.subject_index
        for resource in fetched:
            before = from_subjects.get(resource)
            after = to_subjects.get(resource)
            changed = before != after
            size = len(after) if after is not None else 0
            self.history.record_fetch(resource, cycle, changed, size)
            if after is None:
                self.known.pop(resource, None)
            else:
                self.known[resource] = after

    def ingest_listing(self, v_from: DatasetVersion, v_to: DatasetVersion) -> None:
        for resource in v_to.subjects() - v_from.subjects():
            pairs = v_to.subject_index[resource]
            self.known[resource] = pairs
            self.history.record_size(resource, len(pairs))

    def append_record(
        self,
        transition: int,
        fetched: set[str],
        plan_members: Mapping[str, set[str]],
        detected: Mapping[str, set],
    ) -> None:
        """Observed counts/exposures mirroring the offline aggregation, but
        computed strictly from fetched data."""
        record = TransitionRecord(transition_index=transition)
        for concept, members in plan_members.items():
            exposure = len(members & fetched)
            for ct in CHANGE_TYPES:
                if ct == ChangeType.CREATE:
                    continue
                record.exposures[(concept, ct)] = exposure
        post_members = self.concept_members()
        for concept, members in post_members.items():
            record.exposures[(concept, ChangeType.CREATE)] = len(members)

        concept_of: dict[str, frozenset[str]] = {}
        for concept, members in plan_members.items():
            for resource in members:
                concept_of.setdefault(resource, frozenset())
                concept_of[resource] = concept_of[resource] | {concept}
        for ct in CHANGE_TYPES:
            for item in detected.get(ct.value, ()):
                if ct == ChangeType.CREATE:
                    pairs = self.known.get(item)
                    concepts = _known_concepts(pairs) if pairs else frozenset()
                elif ct in (ChangeType.MOVE, ChangeType.RENEW):
                    concepts = concept_of.get(item[0], frozenset())
                else:
                    concepts = concept_of.get(item, frozenset())
                for concept in concepts:
                    record.add_count(concept, ct)
        self.records.append(record)


def regions_from_truth(
    versions: Sequence[DatasetVersion],
    truth: Sequence[ChangeSet],
    boundaries: tuple[float, float] = DEFAULT_BOUNDARIES,
    no_evidence_bin: str = BIN_HIGH,
    reference: DatasetVersion | None = None,
):
    """Full-information profiles and regions, the offline aggregation path."""
    records = aggregate_transitions(truth, versions)
    profiles = estimate_probabilities(records)
    regions = bin_concepts_into_regions(
        profiles, boundaries, reference or versions[0], no_evidence_bin
    )
    return profiles, regions


def optimal_accuracy_reference(
    versions: Sequence[DatasetVersion],
    truth: Sequence[ChangeSet],
    regions: RegionSet,
    weights: Mapping | None = None,
    theta: float = DEFAULT_THETA,
    listing: bool = True,
    include_creates: bool = True,
) -> ReportSet:
    """Score diff detection fetching exactly the dynamic regions, uncapped.

    The fetch set is every resource of a non-static region of a positively
    weighted change type; this is the yardstick the budgeted strategies are
    compared against.
    """
    w = normalize_weights(weights)
    fetch_set: set[str] = set()
    for region in regions.all_regions():
        if region.bin == BIN_STATIC or w[region.change_type] <= 0:
            continue
        fetch_set.update(region.resources)

    cumulative = ReportSet.empty()
    for t, changeset in enumerate(truth):
        detected = _detect_diff(versions[t], versions[t + 1], fetch_set, theta, listing)
        expected = truth_sets(changeset)
        if not include_creates:
            detected["create"] = set()
            expected["create"] = set()
        cumulative = cumulative + _score(detected, expected)
    return cumulative


def _check_chain(versions: Sequence[DatasetVersion], truth: Sequence[ChangeSet]) -> None:
    if len(versions) != len(truth) + 1:
        raise VersionChainBrokenError(
            f"{len(truth)} changeset(s) require {len(truth) + 1} versions, got {len(versions)}"
        )
    for i, cs in enumerate(truth):
        if cs.from_version != versions[i].version_id or cs.to_version != versions[i + 1].version_id:
            raise VersionChainBrokenError(
                f"changeset {cs.from_version}->{cs.to_version} does not chain "
                f"versions {versions[i].version_id}->{versions[i + 1].version_id}"
            )


def run_simulation(
    versions: Sequence[DatasetVersion],
    truth: Sequence[ChangeSet],
    strategy: str,
    budget: int,
    epsilon: float = DEFAULT_EPSILON,
    weights: Mapping | None = None,
    boundaries: tuple[float, float] = DEFAULT_BOUNDARIES,
    warmup: int = 1,
    detection: str = DETECTION_DIFF,
    theta: float = DEFAULT_THETA,
    seed: int = 0,
    listing: bool = True,
    no_evidence_bin: str = BIN_HIGH,
    compute_optimal: bool = True,
) -> SimulationResult:
    """Replay the corpus under one strategy and score the detected changes."""
    _check_chain(versions, truth)
    validate_budget(budget)
    if strategy not in STRATEGIES:
        raise BadConfigError(f"unknown strategy {strategy!r}")
    if detection not in DETECTION_MODELS:
        raise BadConfigError(f"unknown detection model {detection!r}")
    if not 0 <= warmup < len(truth):
        raise BadWarmupError(
            f"warmup must be in [0, {len(truth) - 1}], got {warmup}"
        )
    if strategy == STRATEGY_REGION and warmup < 1:
        raise BadWarmupError("the region strategy requires warmup >= 1")
    normalized_weights = normalize_weights(weights)

    state = _MonitorState(versions[0])
    per_cycle: list[CycleReport] = []
    cumulative = ReportSet.empty()
    total_fetches = 0

    for t, truth_cs in enumerate(truth):
        v_from, v_to = versions[t], versions[t + 1]
        plan_members = state.concept_members() if strategy == STRATEGY_REGION else {}

        if strategy == STRATEGY_REGION and t < warmup:
            fetched_list = sorted(v_from.subjects())
        elif strategy == STRATEGY_REGION:
            profiles = estimate_probabilities(state.records)
            regions = bin_concepts_into_regions(
                profiles, boundaries, state.known_version(f"known-{t}"), no_evidence_bin
            )
            plan = region_plan(
                regions,
                profiles,
                normalized_weights,
                budget,
                epsilon,
                state.history,
                cycle_index=t,
            )
            fetched_list = plan.fetch_list()
        else:
            cycle_seed = seed * 1_000_003 + t if strategy == STRATEGY_RANDOM else None
            plan = baseline_plan(
                strategy, state.universe(), state.history, budget, seed=cycle_seed, cycle_index=t
            )
            fetched_list = plan.fetch_list()

        fetched = set(fetched_list)
        if detection == DETECTION_ORACLE:
            detected = _detect_oracle(truth_cs, fetched, listing)
        else:
            detected = _detect_diff(v_from, v_to, fetched, theta, listing)

        if t >= warmup:
            reports = _score(detected, truth_sets(truth_cs))
            per_cycle.append(
                CycleReport(transition=t, fetched=len(fetched), reports=reports)
            )
            cumulative = cumulative + reports
            total_fetches += len(fetched)

        state.ingest_fetches(fetched_list, v_from, v_to, t)
        if listing:
            state.ingest_listing(v_from, v_to)
        if strategy == STRATEGY_REGION:
            state.append_record(t, fetched, plan_members, detected)

    optimal_f: float | None = None
    if compute_optimal:
        _, regions = regions_from_truth(versions, truth, boundaries)
        optimal = optimal_accuracy_reference(
            versions, truth, regions, weights=normalized_weights, theta=theta, listing=listing
        )
        optimal_f = optimal.overall.f_measure

    return SimulationResult(
        strategy=strategy,
        budget=budget,
        epsilon=epsilon,
        warmup=warmup,
        detection=detection,
        theta=theta,
        seed=seed,
        boundaries=tuple(boundaries),
        weights={ct.value: normalized_weights[ct] for ct in CHANGE_TYPES},
        per_cycle=tuple(per_cycle),
        cumulative=cumulative,
        total_fetches=total_fetches,
        optimal_reference_f=optimal_f,
    )
