"""Aggregation of change history into per-concept rates and regions.

Counts are pooled per (concept, change type) over a sequence of version
transitions, smoothed into a Bernoulli rate with an add-one prior, and the
concepts are then binned into static/low/high regions per change type by
fixed rate boundaries.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .diff import CHANGE_TYPES, ChangeSet, ChangeType
from .errors import BadBoundariesError, VersionChainBrokenError
from .model import DatasetVersion

BIN_STATIC = "static"
BIN_LOW = "low"
BIN_HIGH = "high"
BINS = (BIN_STATIC, BIN_LOW, BIN_HIGH)

DEFAULT_BOUNDARIES = (0.01, 0.1)

Key = tuple[str, ChangeType]  # (concept IRI, change type)


@dataclass
class TransitionRecord:
    """Per-transition change counts and exposures by concept and type.

    Exposure is the concept's member count in the source version, except
    for creates where the target version is the only one that types the
    new resource.
    """

    transition_index: int
    counts: dict[Key, int] = field(default_factory=dict)
    exposures: dict[Key, int] = field(default_factory=dict)

    def add_count(self, concept: str, change_type: ChangeType, amount: int = 1) -> None:
        key = (concept, change_type)
        self.counts[key] = self.counts.get(key, 0) + amount


@dataclass(frozen=True)
class ChangeRate:
    """Pooled counts and the smoothed probability for one (concept, type)."""

    k: int
    n: int

    @property
    def p_hat(self) -> float:
        return (self.k + 1) / (self.n + 2)

    @property
    def no_evidence(self) -> bool:
        return self.n == 0


@dataclass(frozen=True)
class ConceptChangeProfile:
    concept: str
    rates: dict[ChangeType, ChangeRate]

    def rate(self, change_type: ChangeType) -> ChangeRate:
        return self.rates.get(change_type, ChangeRate(0, 0))


@dataclass(frozen=True)
class Region:
    """Concepts sharing one change type at a similar rate, plus their members."""

    change_type: ChangeType
    bin: str
    concepts: frozenset[str]
    resources: frozenset[str]

    @property
    def key(self) -> str:
        return f"{self.change_type.value}:{self.bin}"


@dataclass(frozen=True)
class RegionSet:
    """Per change type, a partition of the reference version's concepts."""

    reference_version: str
    boundaries: tuple[float, float]
    regions: dict[ChangeType, tuple[Region, ...]]
    concept_members: dict[str, frozenset[str]]

    def all_regions(self) -> list[Region]:
        out: list[Region] = []
        for ct in CHANGE_TYPES:
            out.extend(self.regions.get(ct, ()))
        return out

    def by_key(self) -> dict[str, Region]:
        return {region.key: region for region in self.all_regions()}


def _exposures_for(version: DatasetVersion) -> dict[str, int]:
    return {c: len(members) for c, members in version.concept_index.items()}


def aggregate_transitions(
    changesets: Sequence[ChangeSet], versions: Sequence[DatasetVersion]
) -> list[TransitionRecord]:
    """Count changed resources per concept and type for each transition.

    A changed resource counts toward every concept it is typed with: the
    source version's typing of the old IRI for removes/updates/moves/renews,
    the target version's typing of the new IRI for creates.
    """
    if not changesets or len(versions) != len(changesets) + 1:
        raise VersionChainBrokenError(
            f"{len(changesets)} changeset(s) require {len(changesets) + 1} "
            f"versions, got {len(versions)}"
        )
    for i, cs in enumerate(changesets):
        if cs.from_version != versions[i].version_id or cs.to_version != versions[i + 1].version_id:
            raise VersionChainBrokenError(
                f"changeset {cs.from_version}->{cs.to_version} does not chain "
                f"versions {versions[i].version_id}->{versions[i + 1].version_id}"
            )

    records = []
    for i, cs in enumerate(changesets):
        source, target = versions[i], versions[i + 1]
        record = TransitionRecord(transition_index=i)
        source_exposure = _exposures_for(source)
        target_exposure = _exposures_for(target)
        for ct in CHANGE_TYPES:
            exposure = target_exposure if ct == ChangeType.CREATE else source_exposure
            for concept, n in exposure.items():
                record.exposures[(concept, ct)] = n
        for rc in cs.resource_changes:
            if rc.change_type == ChangeType.CREATE:
                concepts = target.concepts_of(rc.new_iri)
            else:
                concepts = source.concepts_of(rc.old_iri)
            for concept in concepts:
                record.add_count(concept, rc.change_type)
        records.append(record)
    return records


def estimate_probabilities(records: Sequence[TransitionRecord]) -> list[ConceptChangeProfile]:
    """Pool counts over all transitions and smooth into (k+1)/(n+2) rates.

    Pooling sums counts and exposures before smoothing; concepts absent
    from a transition simply contribute nothing to either sum.
    """
    if not records:
        raise ValueError("records must be non-empty")
    k_sum: dict[Key, int] = {}
    n_sum: dict[Key, int] = {}
    concepts: set[str] = set()
    for record in records:
        for key, n in record.exposures.items():
            n_sum[key] = n_sum.get(key, 0) + n
            concepts.add(key[0])
        for key, k in record.counts.items():
            k_sum[key] = k_sum.get(key, 0) + k
            concepts.add(key[0])

    profiles = []
    for concept in sorted(concepts):
        rates = {
            ct: ChangeRate(
                k=k_sum.get((concept, ct), 0), n=n_sum.get((concept, ct), 0)
            )
            for ct in CHANGE_TYPES
        }
        profiles.append(ConceptChangeProfile(concept=concept, rates=rates))
    return profiles


def profiles_by_concept(
    profiles: Iterable[ConceptChangeProfile],
) -> dict[str, ConceptChangeProfile]:
    return {p.concept: p for p in profiles}


def bin_concepts_into_regions(
    profiles: Sequence[ConceptChangeProfile],
    boundaries: tuple[float, float],
    reference: DatasetVersion,
    no_evidence_bin: str = BIN_HIGH,
) -> RegionSet:
    """Place every reference concept into static/low/high per change type.

    Boundaries (t1, t2) split the smoothed rate as p < t1 -> static,
    t1 <= p < t2 -> low, p >= t2 -> high.  Concepts with no exposure at
    all carry a pure-prior rate of 0.5, so they are routed to the
    configurable no-evidence bin instead of being thresholded.  Note the
    smoothing floor: with zero observed changes p = 1/(n+2), which stays
    above a boundary t1 whenever n < 1/t1 - 2.
    """
    t1, t2 = boundaries
    if not 0 < t1 < t2 < 1:
        raise BadBoundariesError(f"boundaries must satisfy 0 < t1 < t2 < 1, got {boundaries}")
    if no_evidence_bin not in BINS:
        raise BadBoundariesError(f"unknown bin {no_evidence_bin!r}")

    prof_map = profiles_by_concept(profiles)
    concepts = sorted(reference.concept_index)
    regions: dict[ChangeType, tuple[Region, ...]] = {}
    for ct in CHANGE_TYPES:
        binned: dict[str, set[str]] = {b: set() for b in BINS}
        for concept in concepts:
            profile = prof_map.get(concept)
            rate = profile.rate(ct) if profile is not None else ChangeRate(0, 0)
            if rate.no_evidence:
                target = no_evidence_bin
            elif rate.p_hat < t1:
                target = BIN_STATIC
            elif rate.p_hat < t2:
                target = BIN_LOW
            else:
                target = BIN_HIGH
            binned[target].add(concept)
        built = []
        for b in BINS:
            if not binned[b]:
                continue
            members: set[str] = set()
            for concept in binned[b]:
                members.update(reference.concept_index[concept])
            built.append(
                Region(
                    change_type=ct,
                    bin=b,
                    concepts=frozenset(binned[b]),
                    resources=frozenset(members),
                )
            )
        regions[ct] = tuple(built)

    return RegionSet(
        reference_version=reference.version_id,
        boundaries=(t1, t2),
        regions=regions,
        concept_members={c: reference.concept_index[c] for c in concepts},
    )


# --- JSON interchange -------------------------------------------------------


def profiles_to_rows(profiles: Iterable[ConceptChangeProfile]) -> list[dict]:
    rows = []
    for profile in sorted(profiles, key=lambda p: p.concept):
        for ct in CHANGE_TYPES:
            rate = profile.rate(ct)
            rows.append(
                {
                    "concept": profile.concept,
                    "change_type": ct.value,
                    "k": rate.k,
                    "n": rate.n,
                    "p_hat": rate.p_hat,
                    "no_evidence": rate.no_evidence,
                }
            )
    return rows


def profiles_from_rows(rows: Iterable[Mapping]) -> list[ConceptChangeProfile]:
    by_concept: dict[str, dict[ChangeType, ChangeRate]] = {}
    for row in rows:
        by_concept.setdefault(row["concept"], {})[ChangeType(row["change_type"])] = ChangeRate(
            k=row["k"], n=row["n"]
        )
    return [
        ConceptChangeProfile(concept=c, rates=rates)
        for c, rates in sorted(by_concept.items())
    ]


def regionset_to_dict(regions: RegionSet) -> dict:
    return {
        "reference_version": regions.reference_version,
        "boundaries": list(regions.boundaries),
        "regions": [
            {
                "change_type": region.change_type.value,
                "bin": region.bin,
                "boundaries": list(regions.boundaries),
                "concepts": sorted(region.concepts),
                "resource_count": len(region.resources),
                "resources": sorted(region.resources),
            }
            for region in regions.all_regions()
        ],
        "concept_members": {
            c: sorted(members) for c, members in sorted(regions.concept_members.items())
        },
    }


def regionset_from_dict(data: dict) -> RegionSet:
    regions: dict[ChangeType, list[Region]] = {ct: [] for ct in CHANGE_TYPES}
    for row in data["regions"]:
        ct = ChangeType(row["change_type"])
        regions[ct].append(
            Region(
                change_type=ct,
                bin=row["bin"],
                concepts=frozenset(row["concepts"]),
                resources=frozenset(row["resources"]),
            )
        )
    return RegionSet(
        reference_version=data["reference_version"],
        boundaries=tuple(data["boundaries"]),
        regions={ct: tuple(rs) for ct, rs in regions.items()},
        concept_members={
            c: frozenset(members) for c, members in data.get("concept_members", {}).items()
        },
    )


def load_profiles(path: str | Path) -> list[ConceptChangeProfile]:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return profiles_from_rows(data["profiles"])


def load_regionset(path: str | Path) -> RegionSet:
    with open(path, "r", encoding="utf-8") as fh:
        return regionset_from_dict(json.load(fh))
