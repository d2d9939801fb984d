"""Change detection and classification between two dataset versions.

Resource-level changes fall into five classes: create, remove, update,
move (IRI changed, representation intact) and renew (IRI and representation
both changed).  Moves and renews are recovered by matching disappeared
against appeared resources on the Jaccard similarity of their canonical
representations.  Triple-level add/delete deltas are plain set differences
and are sufficient to replay one version into the next.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, NamedTuple

from .errors import MissingDeletedTripleError, NotPresentError
from .model import DatasetVersion, Pair
from .terms import SELF_TOKEN, Triple, iri_token, token_iri_value

DEFAULT_THETA = 0.8


class ChangeType(str, Enum):
    CREATE = "create"
    REMOVE = "remove"
    UPDATE = "update"
    MOVE = "move"
    RENEW = "renew"


CHANGE_TYPES: tuple[ChangeType, ...] = (
    ChangeType.CREATE,
    ChangeType.REMOVE,
    ChangeType.UPDATE,
    ChangeType.MOVE,
    ChangeType.RENEW,
)


class MatchCandidate(NamedTuple):
    old_iri: str
    new_iri: str
    similarity: float


@dataclass(frozen=True)
class ResourceChange:
    """One classified resource-level change with its description delta."""

    change_type: ChangeType
    old_iri: str | None = None
    new_iri: str | None = None
    similarity: float | None = None
    added_pairs: frozenset[Pair] = frozenset()
    deleted_pairs: frozenset[Pair] = frozenset()

    def sort_key(self):
        return (self.change_type.value, self.old_iri or "", self.new_iri or "")


@dataclass(frozen=True)
class ChangeSet:
    """All classified changes plus triple deltas for one version transition."""

    from_version: str
    to_version: str
    theta: float
    resource_changes: tuple[ResourceChange, ...]
    triples_added: frozenset[Triple]
    triples_deleted: frozenset[Triple]

    def changes_of_type(self, change_type: ChangeType) -> list[ResourceChange]:
        return [rc for rc in self.resource_changes if rc.change_type == change_type]

    def count_by_type(self) -> dict[str, int]:
        counts = {ct.value: 0 for ct in CHANGE_TYPES}
        for rc in self.resource_changes:
            counts[rc.change_type.value] += 1
        return counts

    def move_like_pairs(self) -> frozenset[tuple[str, str]]:
        """(old, new) pairs of moves and renews, the merged move type."""
        return frozenset(
            (rc.old_iri, rc.new_iri)
            for rc in self.resource_changes
            if rc.change_type in (ChangeType.MOVE, ChangeType.RENEW)
        )


def similarity(v1: DatasetVersion, v2: DatasetVersion, a: str, b: str) -> float:
    """Jaccard overlap of the two canonical representations, in [0, 1]."""
    x = v1.canonical_representation(a)
    y = v2.canonical_representation(b)
    union = len(x | y)
    if union == 0:
        return 1.0
    return len(x & y) / union


def _canonical_pair(pair: Pair, resource: str) -> Pair:
    p, o = pair
    return (p, SELF_TOKEN if o == iri_token(resource) else o)


def match_moved(
    removed: Iterable[str],
    created: Iterable[str],
    v1: DatasetVersion,
    v2: DatasetVersion,
    theta: float,
) -> list[MatchCandidate]:
    """Greedy one-to-one matching of disappeared to appeared resources.

    Candidate pairs must share at least one canonical pair (an inverted
    index keeps this sub-quadratic) and reach the theta threshold.  Pairs
    are taken in (similarity desc, old asc, new asc) order while both
    endpoints are free, which makes the result deterministic.
    """
    removed = sorted(removed)
    created = sorted(created)
    if not removed or not created:
        return []

    created_reps = {b: v2.canonical_representation(b) for b in created}
    by_pair: dict[Pair, list[str]] = {}
    for b in created:
        for pair in created_reps[b]:
            by_pair.setdefault(pair, []).append(b)

    candidates: list[MatchCandidate] = []
    for a in removed:
        rep_a = v1.canonical_representation(a)
        seen: set[str] = set()
        for pair in rep_a:
            seen.update(by_pair.get(pair, ()))
        for b in sorted(seen):
            rep_b = created_reps[b]
            sim = len(rep_a & rep_b) / len(rep_a | rep_b)
            if sim >= theta:
                candidates.append(MatchCandidate(a, b, sim))

    candidates.sort(key=lambda c: (-c.similarity, c.old_iri, c.new_iri))
    taken_old: set[str] = set()
    taken_new: set[str] = set()
    accepted: list[MatchCandidate] = []
    for cand in candidates:
        if cand.old_iri in taken_old or cand.new_iri in taken_new:
            continue
        taken_old.add(cand.old_iri)
        taken_new.add(cand.new_iri)
        accepted.append(cand)
    return accepted


def diff_versions(
    v1: DatasetVersion, v2: DatasetVersion, theta: float = DEFAULT_THETA
) -> ChangeSet:
    """Classify every changed resource and compute the triple deltas.

    Resources present in both versions with identical descriptions emit
    nothing.  Matched disappear/appear pairs become moves (similarity
    exactly 1 after canonicalization) or renews (theta <= s < 1); the rest
    are removes and creates.
    """
    if not 0 < theta <= 1:
        raise ValueError("theta must be in (0, 1]")
    subjects1 = v1.subjects()
    subjects2 = v2.subjects()

    changes: list[ResourceChange] = []
    for r in subjects1 & subjects2:
        old_pairs = v1.subject_index[r]
        new_pairs = v2.subject_index[r]
        if old_pairs == new_pairs:
            continue
        changes.append(
            ResourceChange(
                ChangeType.UPDATE,
                old_iri=r,
                new_iri=r,
                added_pairs=frozenset(new_pairs - old_pairs),
                deleted_pairs=frozenset(old_pairs - new_pairs),
            )
        )

    removed = subjects1 - subjects2
    created = subjects2 - subjects1
    matches = match_moved(removed, created, v1, v2, theta)

    matched_old = set()
    matched_new = set()
    for cand in matches:
        matched_old.add(cand.old_iri)
        matched_new.add(cand.new_iri)
        if cand.similarity == 1.0:
            changes.append(
                ResourceChange(
                    ChangeType.MOVE,
                    old_iri=cand.old_iri,
                    new_iri=cand.new_iri,
                    similarity=1.0,
                )
            )
        else:
            # deltas computed on canonical representations, reported as the
            # raw pairs of the respective side
            rep_old = v1.canonical_representation(cand.old_iri)
            rep_new = v2.canonical_representation(cand.new_iri)
            added = frozenset(
                pair
                for pair in v2.subject_index[cand.new_iri]
                if _canonical_pair(pair, cand.new_iri) not in rep_old
            )
            deleted = frozenset(
                pair
                for pair in v1.subject_index[cand.old_iri]
                if _canonical_pair(pair, cand.old_iri) not in rep_new
            )
            changes.append(
                ResourceChange(
                    ChangeType.RENEW,
                    old_iri=cand.old_iri,
                    new_iri=cand.new_iri,
                    similarity=cand.similarity,
                    added_pairs=added,
                    deleted_pairs=deleted,
                )
            )

    for r in removed - matched_old:
        changes.append(
            ResourceChange(
                ChangeType.REMOVE, old_iri=r, deleted_pairs=v1.subject_index[r]
            )
        )
    for r in created - matched_new:
        changes.append(
            ResourceChange(
                ChangeType.CREATE, new_iri=r, added_pairs=v2.subject_index[r]
            )
        )

    changes.sort(key=ResourceChange.sort_key)
    return ChangeSet(
        from_version=v1.version_id,
        to_version=v2.version_id,
        theta=theta,
        resource_changes=tuple(changes),
        triples_added=frozenset(v2.triples - v1.triples),
        triples_deleted=frozenset(v1.triples - v2.triples),
    )


def apply_changeset(v1: DatasetVersion, changeset: ChangeSet) -> DatasetVersion:
    """Replay the triple deltas onto v1, producing the target version."""
    missing = changeset.triples_deleted - v1.triples
    if missing:
        example = sorted(missing, key=Triple.sort_key)[0]
        raise MissingDeletedTripleError(
            f"{len(missing)} deleted triple(s) absent from {v1.version_id}, "
            f"e.g. {example.nt_line()}"
        )
    triples = (v1.triples - changeset.triples_deleted) | changeset.triples_added
    return DatasetVersion(changeset.to_version, triples)


# --- JSON interchange -------------------------------------------------------
#
# One document per transition; every term is in canonical N-Triples token
# form and every list is sorted so serialization is byte-stable.


def _pair_rows(pairs: Iterable[Pair]) -> list[list[str]]:
    return sorted([iri_token(p), o] for p, o in pairs)


def _triple_rows(triples: Iterable[Triple]) -> list[list[str]]:
    return sorted(
        [iri_token(t.subject), iri_token(t.predicate), t.object] for t in triples
    )


def changeset_to_dict(changeset: ChangeSet) -> dict:
    rows = []
    for rc in changeset.resource_changes:
        row: dict = {"change_type": rc.change_type.value}
        if rc.old_iri is not None:
            row["old_iri"] = iri_token(rc.old_iri)
        if rc.new_iri is not None:
            row["new_iri"] = iri_token(rc.new_iri)
        if rc.similarity is not None:
            row["similarity"] = rc.similarity
        row["added"] = _pair_rows(rc.added_pairs)
        row["deleted"] = _pair_rows(rc.deleted_pairs)
        rows.append(row)
    return {
        "from_version": changeset.from_version,
        "to_version": changeset.to_version,
        "theta": changeset.theta,
        "resource_changes": rows,
        "triples_added": _triple_rows(changeset.triples_added),
        "triples_deleted": _triple_rows(changeset.triples_deleted),
    }


def _pairs_from_rows(rows: Iterable[Iterable[str]]) -> frozenset[Pair]:
    return frozenset((token_iri_value(p), o) for p, o in rows)


def _triples_from_rows(rows: Iterable[Iterable[str]]) -> frozenset[Triple]:
    return frozenset(
        Triple(token_iri_value(s), token_iri_value(p), o) for s, p, o in rows
    )


def changeset_from_dict(data: dict) -> ChangeSet:
    changes = []
    for row in data["resource_changes"]:
        old = row.get("old_iri")
        new = row.get("new_iri")
        changes.append(
            ResourceChange(
                change_type=ChangeType(row["change_type"]),
                old_iri=token_iri_value(old) if old is not None else None,
                new_iri=token_iri_value(new) if new is not None else None,
                similarity=row.get("similarity"),
                added_pairs=_pairs_from_rows(row.get("added", ())),
                deleted_pairs=_pairs_from_rows(row.get("deleted", ())),
            )
        )
    changes.sort(key=ResourceChange.sort_key)
    return ChangeSet(
        from_version=data["from_version"],
        to_version=data["to_version"],
        theta=data["theta"],
        resource_changes=tuple(changes),
        triples_added=_triples_from_rows(data.get("triples_added", ())),
        triples_deleted=_triples_from_rows(data.get("triples_deleted", ())),
    )


def load_changeset(path: str | Path) -> ChangeSet:
    with open(path, "r", encoding="utf-8") as fh:
        return changeset_from_dict(json.load(fh))
