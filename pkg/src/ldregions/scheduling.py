"""Budget-constrained fetch planning over change regions.

A cycle plan distributes a hard budget of resource fetches across regions:
a small exploration share keeps probing every region so the rate model can
be corrected, and the rest is apportioned to region scores (expected
detected changes) by the largest-remainder method.  Baseline strategies
(age, size, change ratio, random) are provided for comparison.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from math import floor
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .aggregate import ConceptChangeProfile, RegionSet, profiles_by_concept
from .diff import CHANGE_TYPES, ChangeType
from .errors import BadConfigError

DEFAULT_EPSILON = 0.1

STRATEGY_REGION = "region"
STRATEGY_AGE = "age"
STRATEGY_SIZE = "size"
STRATEGY_CHANGE_RATIO = "change_ratio"
STRATEGY_RANDOM = "random"
BASELINE_STRATEGIES = (STRATEGY_AGE, STRATEGY_SIZE, STRATEGY_CHANGE_RATIO, STRATEGY_RANDOM)
STRATEGIES = (STRATEGY_REGION,) + BASELINE_STRATEGIES


def normalize_weights(weights: Mapping | None) -> dict[ChangeType, float]:
    """Validate and scale use-case weights to sum 1 (uniform when omitted)."""
    if weights is None:
        return {ct: 1.0 / len(CHANGE_TYPES) for ct in CHANGE_TYPES}
    cleaned: dict[ChangeType, float] = {}
    for key, value in weights.items():
        ct = ChangeType(key)
        w = float(value)
        if w < 0:
            raise BadConfigError(f"weight for {ct.value} must be non-negative")
        cleaned[ct] = w
    total = sum(cleaned.values())
    if total <= 0:
        raise BadConfigError("at least one change type weight must be positive")
    return {ct: cleaned.get(ct, 0.0) / total for ct in CHANGE_TYPES}


def validate_budget(budget: int) -> int:
    if not isinstance(budget, int) or budget < 1:
        raise BadConfigError(f"budget must be a positive integer, got {budget!r}")
    return budget


@dataclass
class ResourceHistory:
    last_fetched_cycle: int | None = None
    observed_change_count: int = 0
    observation_count: int = 0
    known_size: int = 0  # triple count of the latest fetched description


class FetchHistory:
    """Per-resource fetch bookkeeping used by baselines and within-region order."""

    def __init__(self, entries: Mapping[str, ResourceHistory] | None = None):
        self.entries: dict[str, ResourceHistory] = dict(entries or {})

    def get(self, resource: str) -> ResourceHistory:
        return self.entries.get(resource, ResourceHistory())

    def record_fetch(self, resource: str, cycle: int, changed: bool, size: int) -> None:
        entry = self.entries.setdefault(resource, ResourceHistory())
        entry.last_fetched_cycle = cycle
        entry.observation_count += 1
        if changed:
            entry.observed_change_count += 1
        entry.known_size = size

    def record_size(self, resource: str, size: int) -> None:
        self.entries.setdefault(resource, ResourceHistory()).known_size = size

    def change_ratio(self, resource: str) -> float:
        entry = self.entries.get(resource)
        if entry is None or entry.observation_count == 0:
            return 1.0  # never observed: force exploration
        return entry.observed_change_count / entry.observation_count

    def to_dict(self) -> dict:
        return {
            resource: {
                "last_fetched_cycle": entry.last_fetched_cycle,
                "observed_change_count": entry.observed_change_count,
                "observation_count": entry.observation_count,
                "known_size": entry.known_size,
            }
            for resource, entry in sorted(self.entries.items())
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "FetchHistory":
        entries = {
            resource: ResourceHistory(
                last_fetched_cycle=row.get("last_fetched_cycle"),
                observed_change_count=row.get("observed_change_count", 0),
                observation_count=row.get("observation_count", 0),
                known_size=row.get("known_size", 0),
            )
            for resource, row in data.items()
        }
        return cls(entries)


@dataclass(frozen=True)
class Allocation:
    region: str
    quota: int
    resources: tuple[str, ...]


@dataclass(frozen=True)
class SchedulePlan:
    cycle_index: int
    strategy: str
    allocations: tuple[Allocation, ...]

    def fetch_list(self) -> list[str]:
        out: list[str] = []
        for allocation in self.allocations:
            out.extend(allocation.resources)
        return out

    def total_quota(self) -> int:
        return sum(a.quota for a in self.allocations)

    def to_dict(self) -> dict:
        return {
            "cycle_index": self.cycle_index,
            "strategy": self.strategy,
            "allocations": [
                {
                    "region": a.region,
                    "quota": a.quota,
                    "resources": list(a.resources),
                }
                for a in self.allocations
            ],
        }


def score_regions(
    regions: RegionSet,
    profiles: Sequence[ConceptChangeProfile],
    weights: Mapping | None = None,
) -> dict[str, float]:
    """weight x mean rate x size per region.

    The mean rate weighs each member resource once, under the highest-rate
    concept that places it in the region.
    """
    w = normalize_weights(weights)
    prof_map = profiles_by_concept(profiles)
    scores: dict[str, float] = {}
    for region in regions.all_regions():
        best: dict[str, float] = {}
        for concept in sorted(region.concepts):
            profile = prof_map.get(concept)
            p_hat = profile.rate(region.change_type).p_hat if profile else 0.5
            for resource in regions.concept_members.get(concept, ()):
                if p_hat > best.get(resource, -1.0):
                    best[resource] = p_hat
        if best:
            mean = sum(best.values()) / len(best)
            scores[region.key] = w[region.change_type] * mean * len(best)
        else:
            scores[region.key] = 0.0
    return scores


def _largest_remainder(
    shares: Mapping[str, float], total: int, tiebreak
) -> dict[str, int]:
    """Integer quotas summing to `total`, floors first, remainders by rank."""
    quotas = {key: floor(share) for key, share in shares.items()}
    leftover = total - sum(quotas.values())
    fractions = {key: shares[key] - quotas[key] for key in shares}
    ranked = sorted(shares, key=lambda key: (-round(fractions[key], 12), *tiebreak(key)))
    for i in range(leftover):
        quotas[ranked[i % len(ranked)]] += 1
    return quotas


def allocate_budget(
    scores: Mapping[str, float],
    budget: int,
    epsilon: float,
    region_sizes: Mapping[str, int],
) -> dict[str, int]:
    """Split the budget into integer per-region quotas.

    floor(epsilon * budget) is spread as evenly as possible over all
    regions (largest remainder, ties by region key); the remainder is
    apportioned proportionally to scores (largest remainder, ties to the
    higher score then key).  Quotas are capped at region size, surplus
    flowing to the best-ranked regions with room, so the total is
    min(budget, sum of sizes).
    """
    validate_budget(budget)
    if not 0 <= epsilon < 1:
        raise BadConfigError(f"epsilon must be in [0, 1), got {epsilon}")
    keys = sorted(region_sizes)
    if not keys:
        return {}

    explore_total = floor(epsilon * budget)
    explore_shares = {key: explore_total / len(keys) for key in keys}
    explore = _largest_remainder(explore_shares, explore_total, lambda key: (key,))

    main_total = budget - explore_total
    total_score = sum(scores.get(key, 0.0) for key in keys)
    if total_score > 0:
        main_shares = {key: main_total * scores.get(key, 0.0) / total_score for key in keys}
    else:
        main_shares = {key: main_total / len(keys) for key in keys}
    main = _largest_remainder(
        main_shares, main_total, lambda key: (-scores.get(key, 0.0), key)
    )

    quotas = {key: explore[key] + main[key] for key in keys}

    # cap at size; surplus goes to the best-ranked regions that still have room
    ranking = sorted(keys, key=lambda key: (-scores.get(key, 0.0), key))
    surplus = 0
    for key in ranking:
        size = region_sizes[key]
        if quotas[key] > size:
            surplus += quotas[key] - size
            quotas[key] = size
    for key in ranking:
        if surplus == 0:
            break
        room = region_sizes[key] - quotas[key]
        if room > 0:
            take = min(room, surplus)
            quotas[key] += take
            surplus -= take
    return quotas


def select_resources(
    resources: Iterable[str], quota: int, history: FetchHistory
) -> list[str]:
    """Least-recently-fetched order: never fetched first, then oldest, then IRI."""
    def order(resource: str):
        entry = history.get(resource)
        if entry.last_fetched_cycle is None:
            return (0, 0, resource)
        return (1, entry.last_fetched_cycle, resource)

    ranked = sorted(resources, key=order)
    return ranked[:quota]


def assign_to_best_region(
    regions: RegionSet, scores: Mapping[str, float]
) -> dict[str, list[str]]:
    """Resolve multi-region membership: each resource joins its top-scoring region."""
    best: dict[str, str] = {}
    best_rank: dict[str, tuple] = {}
    for region in regions.all_regions():
        rank = (-scores.get(region.key, 0.0), region.key)
        for resource in region.resources:
            if resource not in best_rank or rank < best_rank[resource]:
                best_rank[resource] = rank
                best[resource] = region.key
    assigned: dict[str, list[str]] = {region.key: [] for region in regions.all_regions()}
    for resource, key in best.items():
        assigned[key].append(resource)
    for members in assigned.values():
        members.sort()
    return assigned


def region_plan(
    regions: RegionSet,
    profiles: Sequence[ConceptChangeProfile],
    weights: Mapping | None,
    budget: int,
    epsilon: float,
    history: FetchHistory,
    cycle_index: int = 0,
) -> SchedulePlan:
    """Score regions, deduplicate membership, apportion the budget, pick IRIs."""
    scores = score_regions(regions, profiles, weights)
    assigned = assign_to_best_region(regions, scores)
    sizes = {key: len(members) for key, members in assigned.items()}
    quotas = allocate_budget(scores, budget, epsilon, sizes)

    allocations = []
    for key in sorted(quotas, key=lambda k: (-scores.get(k, 0.0), k)):
        quota = quotas[key]
        if quota == 0:
            continue
        chosen = select_resources(assigned[key], quota, history)
        allocations.append(Allocation(region=key, quota=quota, resources=tuple(chosen)))
    return SchedulePlan(
        cycle_index=cycle_index, strategy=STRATEGY_REGION, allocations=tuple(allocations)
    )


def baseline_plan(
    strategy: str,
    all_resources: Iterable[str],
    history: FetchHistory,
    budget: int,
    seed: int | None = None,
    cycle_index: int = 0,
) -> SchedulePlan:
    """Single-allocation plan for the age/size/change-ratio/random baselines."""
    validate_budget(budget)
    resources = sorted(set(all_resources))
    if strategy == STRATEGY_AGE:
        ordered = select_resources(resources, len(resources), history)
    elif strategy == STRATEGY_SIZE:
        ordered = sorted(resources, key=lambda r: (-history.get(r).known_size, r))
    elif strategy == STRATEGY_CHANGE_RATIO:
        ordered = sorted(resources, key=lambda r: (-history.change_ratio(r), r))
    elif strategy == STRATEGY_RANDOM:
        rng = random.Random(seed)
        ordered = list(resources)
        rng.shuffle(ordered)
    else:
        raise BadConfigError(f"unknown strategy {strategy!r}")
    chosen = ordered[: min(budget, len(ordered))]
    allocation = Allocation(region=strategy, quota=len(chosen), resources=tuple(chosen))
    return SchedulePlan(cycle_index=cycle_index, strategy=strategy, allocations=(allocation,))


def load_history(path: str | Path) -> FetchHistory:
    with open(path, "r", encoding="utf-8") as fh:
        return FetchHistory.from_dict(json.load(fh))
