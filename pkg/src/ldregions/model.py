"""Immutable snapshot model of one dataset version.

A version is a set of triples indexed two ways: by subject (the resource
descriptions) and by concept (the objects of rdf:type statements, plus a
pseudo-concept for untyped subjects).
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .errors import NotPresentError
from .terms import (
    RDF_TYPE,
    SELF_TOKEN,
    UNTYPED_CONCEPT,
    Triple,
    iri_token,
    is_iri_token,
    token_iri_value,
)

Pair = tuple[str, str]  # (predicate IRI value, object token)


class DatasetVersion:
    """A frozen triple set with subject and concept indexes.

    Instances are safe for concurrent reads; all mutation happens during
    construction.
    """

    __slots__ = ("version_id", "triples", "subject_index", "concept_index", "parse_report")

    def __init__(self, version_id: str, triples: Iterable[Triple], parse_report=None):
        self.version_id = version_id
        self.triples: frozenset[Triple] = frozenset(triples)
        self.parse_report = parse_report

        subject_index: dict[str, set[Pair]] = {}
        typed: dict[str, set[str]] = {}
        for t in self.triples:
            subject_index.setdefault(t.subject, set()).add((t.predicate, t.object))
            if t.predicate == RDF_TYPE and is_iri_token(t.object):
                typed.setdefault(token_iri_value(t.object), set()).add(t.subject)
        self.subject_index: dict[str, frozenset[Pair]] = {
            s: frozenset(pairs) for s, pairs in subject_index.items()
        }

        untyped = set(self.subject_index)
        for members in typed.values():
            untyped -= members
        if untyped:
            typed[UNTYPED_CONCEPT] = untyped
        self.concept_index: dict[str, frozenset[str]] = {
            c: frozenset(members) for c, members in typed.items()
        }

    def subjects(self) -> frozenset[str]:
        return frozenset(self.subject_index)

    def description(self, resource: str) -> frozenset[Pair]:
        """All (predicate, object) pairs of the resource; raises if absent."""
        try:
            return self.subject_index[resource]
        except KeyError:
            raise NotPresentError(
                f"{resource} is not a subject of version {self.version_id}"
            ) from None

    def concepts_of(self, resource: str) -> frozenset[str]:
        """Concepts the resource is typed with; empty set if it is no subject."""
        if resource not in self.subject_index:
            return frozenset()
        found = {
            c for c, members in self.concept_index.items() if resource in members
        }
        return frozenset(found)

    def canonical_representation(self, resource: str) -> frozenset[Pair]:
        """Description with self-referential objects replaced by a fixed token.

        Two descriptions that differ only by a rename of the resource's own
        IRI therefore compare equal.
        """
        pairs = self.description(resource)
        self_token = iri_token(resource)
        return frozenset(
            (p, SELF_TOKEN if o == self_token else o) for p, o in pairs
        )

    def sorted_triples(self) -> list[Triple]:
        return sorted(self.triples, key=Triple.sort_key)

    def triple_count(self) -> int:
        return len(self.triples)

    def __repr__(self) -> str:
        return f"DatasetVersion({self.version_id!r}, {len(self.triples)} triples)"


def version_from_descriptions(
    version_id: str, descriptions: Mapping[str, Iterable[Pair]]
) -> DatasetVersion:
    """Assemble a version from per-subject (predicate, object-token) pairs."""
    triples = [
        Triple(subject, p, o)
        for subject, pairs in descriptions.items()
        for p, o in pairs
    ]
    return DatasetVersion(version_id, triples)


def restrict_version(
    version: DatasetVersion, subjects: Iterable[str], version_id: str | None = None
) -> DatasetVersion:
    """The sub-version holding only the descriptions of the given subjects."""
    keep = set(subjects) & set(version.subject_index)
    triples = [
        Triple(s, p, o) for s in keep for p, o in version.subject_index[s]
    ]
    return DatasetVersion(version_id or version.version_id, triples)
