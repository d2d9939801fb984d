import pytest

from ldregions.errors import NotPresentError
from ldregions.model import DatasetVersion, restrict_version, version_from_descriptions
from ldregions.terms import RDF_TYPE, SELF_TOKEN, Triple, iri_token, literal_token

A = "http://ex/a"
B = "http://ex/b"
PERSON = "http://ex/Person"
ATHLETE = "http://ex/Athlete"


def _person_version():
    return DatasetVersion(
        "v1",
        [
            Triple(A, RDF_TYPE, iri_token(PERSON)),
            Triple(A, "http://ex/name", literal_token("Ann")),
            Triple(B, "http://ex/name", literal_token("Bob")),
        ],
    )


def test_concepts_of_typed_resource():
    assert _person_version().concepts_of(A) == {PERSON}


def test_concepts_of_absent_resource():
    assert _person_version().concepts_of("http://ex/nobody") == frozenset()


def test_concepts_of_multi_typed_resource():
    d = DatasetVersion(
        "v1",
        [
            Triple(A, RDF_TYPE, iri_token(PERSON)),
            Triple(A, RDF_TYPE, iri_token(ATHLETE)),
            Triple(A, "http://ex/name", literal_token("Ann")),
        ],
    )
    assert d.concepts_of(A) == {PERSON, ATHLETE}


def test_canonical_representation_replaces_self_reference():
    d = DatasetVersion(
        "v1",
        [
            Triple(A, "http://ex/knows", iri_token(A)),
            Triple(A, "http://ex/name", literal_token("Ann")),
        ],
    )
    assert d.canonical_representation(A) == {
        ("http://ex/knows", SELF_TOKEN),
        ("http://ex/name", '"Ann"'),
    }


def test_canonical_representation_without_self_reference():
    d = DatasetVersion("v1", [Triple(A, "http://ex/name", literal_token("Ann"))])
    assert d.canonical_representation(A) == {("http://ex/name", '"Ann"')}


def test_canonical_representation_keeps_other_iris():
    d = DatasetVersion("v1", [Triple(A, "http://ex/knows", iri_token(B))])
    assert d.canonical_representation(A) == {("http://ex/knows", iri_token(B))}


def test_canonical_representation_missing_resource():
    with pytest.raises(NotPresentError):
        _person_version().canonical_representation("http://ex/nobody")


def test_rename_invariance_of_canonical_representation():
    # identical descriptions up to the resource's own IRI canonicalize equally
    def build(iri):
        return DatasetVersion(
            "v",
            [
                Triple(iri, "http://ex/knows", iri_token(iri)),
                Triple(iri, RDF_TYPE, iri_token(PERSON)),
                Triple(iri, "http://ex/name", literal_token("Ann")),
            ],
        )

    assert build(A).canonical_representation(A) == build(B).canonical_representation(B)


def test_version_from_descriptions_round_trip():
    d = _person_version()
    rebuilt = version_from_descriptions("v1", d.subject_index)
    assert rebuilt.triples == d.triples


def test_restrict_version():
    d = _person_version()
    only_a = restrict_version(d, [A, "http://ex/ghost"])
    assert only_a.subjects() == {A}
    assert only_a.subject_index[A] == d.subject_index[A]
