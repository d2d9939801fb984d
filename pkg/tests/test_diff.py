import json
import random

import pytest

from ldregions.diff import (
    ChangeType,
    MatchCandidate,
    apply_changeset,
    changeset_from_dict,
    changeset_to_dict,
    diff_versions,
    match_moved,
    similarity,
)
from ldregions.errors import MissingDeletedTripleError, NotPresentError
from ldregions.model import DatasetVersion
from ldregions.terms import RDF_TYPE, Triple, iri_token, literal_token

from _oracles import (
    exhaustive_best_matching,
    mutate_dataset,
    pairwise_similarities,
    random_dataset,
)

PERSON = iri_token("http://ex/Person")


def _v(version_id, descriptions):
    triples = [Triple(s, p, o) for s, pairs in descriptions.items() for p, o in pairs]
    return DatasetVersion(version_id, triples)


def test_similarity_identical():
    pairs = [("http://ex/name", '"Ann"'), (RDF_TYPE, PERSON)]
    v1 = _v("v1", {"http://ex/a": pairs})
    v2 = _v("v2", {"http://ex/b": pairs})
    assert similarity(v1, v2, "http://ex/a", "http://ex/b") == 1.0


def test_similarity_two_thirds():
    # intersection 2, union 3 by hand enumeration
    v1 = _v("v1", {"http://ex/a": [("http://ex/name", '"Ann"'), (RDF_TYPE, PERSON)]})
    v2 = _v(
        "v2",
        {
            "http://ex/b": [
                ("http://ex/name", '"Ann"'),
                (RDF_TYPE, PERSON),
                ("http://ex/age", '"30"'),
            ]
        },
    )
    assert similarity(v1, v2, "http://ex/a", "http://ex/b") == pytest.approx(2 / 3)


def test_similarity_disjoint():
    v1 = _v("v1", {"http://ex/a": [("http://ex/name", '"Ann"')]})
    v2 = _v("v2", {"http://ex/b": [("http://ex/city", '"Delft"')]})
    assert similarity(v1, v2, "http://ex/a", "http://ex/b") == 0.0


def test_similarity_missing_resource():
    v1 = _v("v1", {"http://ex/a": [("http://ex/name", '"Ann"')]})
    with pytest.raises(NotPresentError):
        similarity(v1, v1, "http://ex/a", "http://ex/nope")


def test_match_moved_single_pair():
    pairs = [("http://ex/name", '"Ann"'), (RDF_TYPE, PERSON)]
    v1 = _v("v1", {"http://ex/a": pairs})
    v2 = _v("v2", {"http://ex/b": pairs})
    assert match_moved({"http://ex/a"}, {"http://ex/b"}, v1, v2, 0.8) == [
        MatchCandidate("http://ex/a", "http://ex/b", 1.0)
    ]


def test_match_moved_below_threshold():
    v1 = _v("v1", {"http://ex/a": [("http://ex/p", '"1"'), ("http://ex/q", '"2"')]})
    v2 = _v("v2", {"http://ex/b": [("http://ex/p", '"1"'), ("http://ex/q", '"3"')]})
    # similarity 1/3 < 0.8
    assert match_moved({"http://ex/a"}, {"http://ex/b"}, v1, v2, 0.8) == []


def test_match_moved_competition_resolved_greedily():
    shared = [(f"http://ex/p{i}", f'"{i}"') for i in range(9)]
    v1 = _v(
        "v1",
        {
            "http://ex/a1": shared,  # sim 0.9 with b1
            "http://ex/a2": shared[:8] + [("http://ex/x", '"x"')],
        },
    )
    v2 = _v("v2", {"http://ex/b1": shared + [("http://ex/extra", '"e"')]})
    got = match_moved(
        {"http://ex/a1", "http://ex/a2"}, {"http://ex/b1"}, v1, v2, 0.5
    )
    assert [(c.old_iri, c.new_iri) for c in got] == [("http://ex/a1", "http://ex/b1")]
    best_total, best_pairs = exhaustive_best_matching(
        ["http://ex/a1", "http://ex/a2"],
        ["http://ex/b1"],
        pairwise_similarities(v1, v2, ["http://ex/a1", "http://ex/a2"], ["http://ex/b1"]),
        0.5,
    )
    assert best_pairs == {("http://ex/a1", "http://ex/b1")}
    assert sum(c.similarity for c in got) == pytest.approx(best_total)


def test_diff_identity():
    d = random_dataset(random.Random(1), "v1")
    cs = diff_versions(d, d, 0.8)
    assert cs.resource_changes == ()
    assert not cs.triples_added and not cs.triples_deleted


def test_diff_pure_move():
    pairs = [(RDF_TYPE, PERSON), ("http://ex/name", '"Ann"')]
    v1 = _v("v1", {"http://ex/a": pairs})
    v2 = _v("v2", {"http://ex/b": pairs})
    cs = diff_versions(v1, v2, 0.8)
    assert cs.count_by_type() == {"create": 0, "remove": 0, "update": 0, "move": 1, "renew": 0}
    (mv,) = cs.resource_changes
    assert (mv.old_iri, mv.new_iri, mv.similarity) == ("http://ex/a", "http://ex/b", 1.0)
    assert len(cs.triples_deleted) == 2 and len(cs.triples_added) == 2


def test_diff_same_iri_update():
    v1 = _v("v1", {"http://ex/a": [("http://ex/name", '"Ann"')]})
    v2 = _v(
        "v2", {"http://ex/a": [("http://ex/name", '"Ann"'), ("http://ex/age", '"30"')]}
    )
    cs = diff_versions(v1, v2, 0.8)
    (up,) = cs.resource_changes
    assert up.change_type == ChangeType.UPDATE
    assert up.added_pairs == {("http://ex/age", '"30"')}
    assert up.deleted_pairs == frozenset()


def test_renew_reports_raw_pair_deltas():
    v1 = _v(
        "v1",
        {
            "http://ex/a": [
                ("http://ex/knows", iri_token("http://ex/a")),
                ("http://ex/p1", '"1"'),
                ("http://ex/p2", '"2"'),
                ("http://ex/p3", '"3"'),
                ("http://ex/p4", '"4"'),
            ]
        },
    )
    v2 = _v(
        "v2",
        {
            "http://ex/b": [
                ("http://ex/knows", iri_token("http://ex/b")),
                ("http://ex/p1", '"1"'),
                ("http://ex/p2", '"2"'),
                ("http://ex/p3", '"3"'),
                ("http://ex/p4", '"4"'),
                ("http://ex/p5", '"5"'),
            ]
        },
    )
    cs = diff_versions(v1, v2, 0.8)
    (rn,) = cs.resource_changes
    assert rn.change_type == ChangeType.RENEW
    assert rn.similarity == pytest.approx(5 / 6)
    # the self-reference rename itself is not part of the delta
    assert rn.added_pairs == {("http://ex/p5", '"5"')}
    assert rn.deleted_pairs == frozenset()


def test_apply_round_trip_examples():
    v1 = _v("v1", {"http://ex/a": [("http://ex/name", '"Ann"')]})
    v2 = _v("v2", {"http://ex/a": [("http://ex/name", '"Anne"')]})
    cs = diff_versions(v1, v2, 0.8)
    assert apply_changeset(v1, cs).triples == v2.triples

    empty = diff_versions(v1, v1, 0.8)
    assert apply_changeset(v1, empty).triples == v1.triples


def test_apply_missing_deleted_triple():
    v1 = _v("v1", {"http://ex/a": [("http://ex/name", '"Ann"')]})
    v2 = _v("v2", {"http://ex/a": [("http://ex/name", '"Anne"')]})
    cs = diff_versions(v1, v2, 0.8)
    stranger = _v("v1", {"http://ex/zz": [("http://ex/name", '"Zoe"')]})
    with pytest.raises(MissingDeletedTripleError):
        apply_changeset(stranger, cs)


def _random_pairs(count):
    for seed in range(count):
        rng = random.Random(seed)
        v1 = random_dataset(rng, "v1")
        v2 = mutate_dataset(rng, v1, "v2")
        yield v1, v2


def test_round_trip_property():
    for v1, v2 in _random_pairs(40):
        for theta in (0.5, 0.8, 1.0):
            cs = diff_versions(v1, v2, theta)
            assert apply_changeset(v1, cs).triples == v2.triples


def test_partition_property():
    for v1, v2 in _random_pairs(40):
        cs = diff_versions(v1, v2, 0.8)
        counts = cs.count_by_type()
        gone = v1.subjects() - v2.subjects()
        fresh = v2.subjects() - v1.subjects()
        assert counts["remove"] + counts["move"] + counts["renew"] == len(gone)
        assert counts["create"] + counts["move"] + counts["renew"] == len(fresh)
        old_iris = [rc.old_iri for rc in cs.resource_changes if rc.old_iri]
        new_iris = [rc.new_iri for rc in cs.resource_changes if rc.new_iri]
        assert len(old_iris) == len(set(old_iris))
        assert len(new_iris) == len(set(new_iris))
        assert not (cs.triples_added & cs.triples_deleted)


def test_change_field_invariants():
    for v1, v2 in _random_pairs(30):
        cs = diff_versions(v1, v2, 0.8)
        for rc in cs.resource_changes:
            if rc.change_type == ChangeType.CREATE:
                assert rc.old_iri is None and rc.new_iri and not rc.deleted_pairs
            elif rc.change_type == ChangeType.REMOVE:
                assert rc.new_iri is None and rc.old_iri and not rc.added_pairs
            elif rc.change_type == ChangeType.UPDATE:
                assert rc.old_iri == rc.new_iri
                assert rc.added_pairs or rc.deleted_pairs
            elif rc.change_type == ChangeType.MOVE:
                assert rc.old_iri != rc.new_iri and rc.similarity == 1.0
            else:
                assert rc.old_iri != rc.new_iri
                assert cs.theta <= rc.similarity < 1.0


def test_theta_monotonicity():
    thetas = (0.2, 0.4, 0.6, 0.8, 1.0)
    for v1, v2 in _random_pairs(30):
        previous_ml = None
        previous_cr = None
        for theta in thetas:
            counts = diff_versions(v1, v2, theta).count_by_type()
            move_like = counts["move"] + counts["renew"]
            create_remove = counts["create"] + counts["remove"]
            if previous_ml is not None:
                assert move_like <= previous_ml
                assert create_remove >= previous_cr
            previous_ml, previous_cr = move_like, create_remove


def test_symmetry_on_unique_similarity_instances():
    checked = 0
    seed = 0
    while checked < 25:
        seed += 1
        rng = random.Random(seed)
        v1 = random_dataset(rng, "v1")
        v2 = mutate_dataset(rng, v1, "v2")
        removed = sorted(v1.subjects() - v2.subjects())
        created = sorted(v2.subjects() - v1.subjects())
        sims = pairwise_similarities(v1, v2, removed, created)
        positive = [s for s in sims.values() if s > 0]
        if len(positive) != len(set(positive)):
            continue
        checked += 1
        forward = diff_versions(v1, v2, 0.5)
        backward = diff_versions(v2, v1, 0.5)
        fwd = {
            (rc.change_type, rc.old_iri, rc.new_iri, rc.similarity)
            for rc in forward.resource_changes
            if rc.change_type in (ChangeType.MOVE, ChangeType.RENEW)
        }
        bwd = {
            (rc.change_type, rc.new_iri, rc.old_iri, rc.similarity)
            for rc in backward.resource_changes
            if rc.change_type in (ChangeType.MOVE, ChangeType.RENEW)
        }
        assert fwd == bwd


def test_greedy_equals_exhaustive_on_random_pairs():
    for v1, v2 in _random_pairs(25):
        removed = sorted(v1.subjects() - v2.subjects())
        created = sorted(v2.subjects() - v1.subjects())
        if len(removed) > 8 or len(created) > 8:
            continue
        sims = pairwise_similarities(v1, v2, removed, created)
        positive = [s for s in sims.values() if s > 0]
        if len(positive) != len(set(positive)):
            continue
        greedy = match_moved(removed, created, v1, v2, 0.5)
        best_total, best_pairs = exhaustive_best_matching(removed, created, sims, 0.5)
        assert frozenset((c.old_iri, c.new_iri) for c in greedy) == best_pairs
        assert sum(c.similarity for c in greedy) == pytest.approx(best_total)


def test_changeset_json_round_trip():
    for v1, v2 in _random_pairs(15):
        cs = diff_versions(v1, v2, 0.8)
        data = changeset_to_dict(cs)
        text = json.dumps(data, sort_keys=True)
        again = changeset_from_dict(json.loads(text))
        assert again == cs
        assert json.dumps(changeset_to_dict(again), sort_keys=True) == text
