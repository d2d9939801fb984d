"""Seeded generator for evolving synthetic corpora with planted dynamics.

Each concept carries per-transition event rates.  Every resource draws its
events independently per transition; when several fire, one is applied
with priority remove > move > renew > update, so a resource undergoes at
most one change per transition and the recorded truth is unambiguous.
Creates spawn fresh resources at rate x concept size.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .diff import ChangeSet, ChangeType, ResourceChange
from .errors import BadConfigError
from .model import DatasetVersion, Pair
from .terms import RDF_TYPE, SELF_TOKEN, Triple, iri_token, literal_token

BASE = "http://example.org/"
LABEL_PREDICATE = f"{BASE}p/label"
SELF_PREDICATE = f"{BASE}p/self"
EXTRA_PREDICATE = f"{BASE}p/extra"
ATTR_PREDICATES = tuple(f"{BASE}p/attr{i:02d}" for i in range(12))

_EVENT_PRIORITY = (ChangeType.REMOVE, ChangeType.MOVE, ChangeType.RENEW, ChangeType.UPDATE)

TRUTH_THETA = 0.5  # descriptive only; truth classification is by construction


@dataclass(frozen=True)
class ConceptSpec:
    name: str
    resources: int
    rates: dict[ChangeType, float] = field(default_factory=dict)

    @property
    def iri(self) -> str:
        return f"{BASE}concept/{self.name}"


@dataclass(frozen=True)
class SyntheticConfig:
    seed: int
    concepts: tuple[ConceptSpec, ...]
    transitions: int
    predicates_per_resource: tuple[int, int] = (4, 8)

    @classmethod
    def from_dict(cls, data: Mapping) -> "SyntheticConfig":
        concepts = tuple(
            ConceptSpec(
                name=row["name"],
                resources=int(row["resources"]),
                rates={ChangeType(k): float(v) for k, v in row.get("rates", {}).items()},
            )
            for row in data["concepts"]
        )
        ppr = data.get("predicates_per_resource", (4, 8))
        return cls(
            seed=int(data.get("seed", 0)),
            concepts=concepts,
            transitions=int(data["transitions"]),
            predicates_per_resource=(int(ppr[0]), int(ppr[1])),
        )

    def validate(self) -> None:
        if self.transitions < 0:
            raise BadConfigError("transitions must be >= 0")
        if not self.concepts:
            raise BadConfigError("at least one concept is required")
        names = [c.name for c in self.concepts]
        if len(set(names)) != len(names):
            raise BadConfigError("concept names must be unique")
        lo, hi = self.predicates_per_resource
        if not 1 <= lo <= hi <= len(ATTR_PREDICATES):
            raise BadConfigError(
                f"predicates_per_resource must satisfy 1 <= lo <= hi <= {len(ATTR_PREDICATES)}"
            )
        for spec in self.concepts:
            if spec.resources < 1:
                raise BadConfigError(f"concept {spec.name}: resource count must be >= 1")
            for ct, rate in spec.rates.items():
                if not 0.0 <= rate <= 1.0:
                    raise BadConfigError(
                        f"concept {spec.name}: rate for {ct.value} must be in [0, 1]"
                    )


@dataclass
class _Resource:
    iri: str
    concept: ConceptSpec
    # description with SELF_TOKEN placeholders; materialized per current IRI
    pairs: set[Pair]

    def materialized(self) -> frozenset[Pair]:
        me = iri_token(self.iri)
        return frozenset((p, me if o == SELF_TOKEN else o) for p, o in self.pairs)


class _Generator:
    def __init__(self, config: SyntheticConfig):
        config.validate()
        self.config = config
        self.rng = random.Random(config.seed)
        self.uid = 0

    def fresh_uid(self) -> int:
        self.uid += 1
        return self.uid

    def new_resource(self, spec: ConceptSpec) -> _Resource:
        uid = self.fresh_uid()
        iri = f"{BASE}resource/{spec.name}/{uid:06d}"
        lo, hi = self.config.predicates_per_resource
        count = self.rng.randint(lo, hi)
        predicates = self.rng.sample(ATTR_PREDICATES, count)
        pairs: set[Pair] = {
            (RDF_TYPE, iri_token(spec.iri)),
            (LABEL_PREDICATE, literal_token(f"res-{uid}")),
        }
        for predicate in predicates:
            pairs.add((predicate, literal_token(f"v{self.rng.randrange(10**9)}")))
        if self.rng.random() < 0.2:
            pairs.add((SELF_PREDICATE, SELF_TOKEN))
        return _Resource(iri=iri, concept=spec, pairs=pairs)

    def apply_update(self, resource: _Resource) -> tuple[frozenset[Pair], frozenset[Pair]]:
        before = resource.materialized()
        data_pairs = sorted(
            (p, o) for p, o in resource.pairs if p in ATTR_PREDICATES or p == EXTRA_PREDICATE
        )
        fresh = (
            self.rng.choice(ATTR_PREDICATES),
            literal_token(f"u{self.fresh_uid()}"),
        )
        if data_pairs:
            victim = self.rng.choice(data_pairs)
            resource.pairs.discard(victim)
        resource.pairs.add(fresh)
        after = resource.materialized()
        return frozenset(after - before), frozenset(before - after)

    def apply_rename(self, resource: _Resource) -> str:
        old = resource.iri
        uid = self.fresh_uid()
        resource.iri = f"{BASE}resource/{resource.concept.name}/{uid:06d}"
        return old

    def apply_renew_extra(self, resource: _Resource) -> Pair:
        extra = (EXTRA_PREDICATE, literal_token(f"x{self.fresh_uid()}"))
        resource.pairs.add(extra)
        return extra


def _version_of(label: str, resources: Sequence[_Resource]) -> DatasetVersion:
    triples = [
        Triple(res.iri, p, o) for res in resources for p, o in res.materialized()
    ]
    return DatasetVersion(label, triples)


def generate_synthetic_corpus(
    config: SyntheticConfig,
) -> tuple[list[DatasetVersion], list[ChangeSet]]:
    """Build transitions+1 versions and the true changeset of each step."""
    gen = _Generator(config)
    live: list[_Resource] = []
    for spec in sorted(config.concepts, key=lambda s: s.name):
        for _ in range(spec.resources):
            live.append(gen.new_resource(spec))

    versions = [_version_of("000", [r for r in live])]
    truth: list[ChangeSet] = []

    for step in range(config.transitions):
        changes: list[ResourceChange] = []
        survivors: list[_Resource] = []
        for resource in sorted(live, key=lambda r: r.iri):
            rates = resource.concept.rates
            fired = [
                ct
                for ct in _EVENT_PRIORITY
                if gen.rng.random() < rates.get(ct, 0.0)
            ]
            if not fired:
                survivors.append(resource)
                continue
            event = fired[0]  # _EVENT_PRIORITY order is the precedence
            if event == ChangeType.REMOVE:
                changes.append(
                    ResourceChange(
                        ChangeType.REMOVE,
                        old_iri=resource.iri,
                        deleted_pairs=resource.materialized(),
                    )
                )
                continue
            if event == ChangeType.MOVE:
                old = gen.apply_rename(resource)
                changes.append(
                    ResourceChange(
                        ChangeType.MOVE,
                        old_iri=old,
                        new_iri=resource.iri,
                        similarity=1.0,
                    )
                )
            elif event == ChangeType.RENEW:
                before = len(resource.pairs)
                old = gen.apply_rename(resource)
                extra = gen.apply_renew_extra(resource)
                changes.append(
                    ResourceChange(
                        ChangeType.RENEW,
                        old_iri=old,
                        new_iri=resource.iri,
                        similarity=before / (before + 1),
                        added_pairs=frozenset({extra}),
                    )
                )
            else:
                added, deleted = gen.apply_update(resource)
                changes.append(
                    ResourceChange(
                        ChangeType.UPDATE,
                        old_iri=resource.iri,
                        new_iri=resource.iri,
                        added_pairs=added,
                        deleted_pairs=deleted,
                    )
                )
            survivors.append(resource)

        for spec in sorted(config.concepts, key=lambda s: s.name):
            rate = spec.rates.get(ChangeType.CREATE, 0.0)
            if rate <= 0:
                continue
            slots = sum(1 for r in live if r.concept.name == spec.name)
            for _ in range(slots):
                if gen.rng.random() < rate:
                    created = gen.new_resource(spec)
                    survivors.append(created)
                    changes.append(
                        ResourceChange(
                            ChangeType.CREATE,
                            new_iri=created.iri,
                            added_pairs=created.materialized(),
                        )
                    )

        live = survivors
        version = _version_of(f"{step + 1:03d}", live)
        previous = versions[-1]
        changes.sort(key=ResourceChange.sort_key)
        truth.append(
            ChangeSet(
                from_version=previous.version_id,
                to_version=version.version_id,
                theta=TRUTH_THETA,
                resource_changes=tuple(changes),
                triples_added=frozenset(version.triples - previous.triples),
                triples_deleted=frozenset(previous.triples - version.triples),
            )
        )
        versions.append(version)

    return versions, truth


# --- corpus files ------------------------------------------------------------
#
# A corpus directory holds numbered .nt snapshots plus one truth changeset
# JSON per transition, listed by a manifest so every strategy replays the
# exact same bytes.


def write_corpus(
    versions: Sequence[DatasetVersion], truth: Sequence[ChangeSet], out_dir: str | Path
) -> Path:
    from .diff import changeset_to_dict
    from .ntriples import write_ntriples

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    version_files = []
    for version in versions:
        name = f"{version.version_id}.nt"
        write_ntriples(version, out / name)
        version_files.append(name)
    truth_files = []
    for cs in truth:
        name = f"truth_{cs.from_version}_{cs.to_version}.json"
        payload = json.dumps(changeset_to_dict(cs), sort_keys=True, indent=2) + "\n"
        (out / name).write_text(payload, encoding="utf-8")
        truth_files.append(name)
    manifest = {"versions": version_files, "changesets": truth_files}
    (out / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return out


def read_corpus(corpus_dir: str | Path) -> tuple[list[DatasetVersion], list[ChangeSet]]:
    from .diff import load_changeset
    from .ntriples import parse_ntriples

    root = Path(corpus_dir)
    manifest_path = root / "manifest.json"
    if not manifest_path.exists():
        raise BadConfigError(f"no manifest.json in corpus directory {root}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    versions = [
        parse_ntriples(root / name, Path(name).stem) for name in manifest["versions"]
    ]
    truth = [load_changeset(root / name) for name in manifest["changesets"]]
    return versions, truth
