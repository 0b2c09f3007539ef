import pytest

from skillgraph.errors import UnknownOccupation
from skillgraph.ingest import ClassifierStore, OccupationInfo
from skillgraph.similarity import (
    DisplayEdge,
    SimilarityLink,
    merge_undirected,
    skill_match,
    top_k_links,
)
from conftest import BUS, CHAUFFEUR, TAXI, TRAM, TROLLEY, make_random_store


def brute_force_links(store, k=3, min_ratio=0.0):
    """Independent all-pairs reference for top_k_links."""
    cutoff = max(0.0, min_ratio)
    links = []
    for a in sorted(store.occupations):
        sa = store.essential.get(a, set())
        candidates = []
        for b in sorted(store.occupations):
            if a == b:
                continue
            ratio = len(sa & store.essential.get(b, set())) / len(sa) if sa else 0.0
            if ratio > cutoff:
                candidates.append((ratio, b))
        candidates.sort(key=lambda c: (-c[0], c[1]))
        links.extend(SimilarityLink(a, b, r) for r, b in candidates[:k])
    return links


def small_store(sets: dict[str, set[str]]) -> ClassifierStore:
    skills = sorted({s for v in sets.values() for s in v})
    return ClassifierStore(
        occupations={o: OccupationInfo(label=o, isco="1234") for o in sets},
        skills={s: s for s in skills},
        essential={o: set(v) for o, v in sets.items()},
    )


def test_identity_match(table1_store):
    assert skill_match(table1_store, BUS, BUS) == 1.0


def test_table1_three_of_five_shared(table1_store):
    assert skill_match(table1_store, BUS, CHAUFFEUR) == 3 / 5
    assert skill_match(table1_store, CHAUFFEUR, BUS) == 3 / 5


def test_asymmetric_tram_variant(fixture_store):
    # tram has 4 skills, 3 shared with the 5-skill bus driver
    assert skill_match(fixture_store, BUS, TRAM) == 3 / 5
    assert skill_match(fixture_store, TRAM, BUS) == 3 / 4


def test_zero_skill_occupation_scores_zero():
    store = small_store({"empty": set(), "full": {"s1"}})
    assert skill_match(store, "empty", "full") == 0.0
    assert skill_match(store, "full", "empty") == 0.0


def test_unknown_occupation():
    store = small_store({"a": {"s1"}})
    with pytest.raises(UnknownOccupation):
        skill_match(store, "a", "ghost")
    with pytest.raises(UnknownOccupation):
        skill_match(store, "ghost", "a")


def test_top_k_keeps_three_most_similar(fixture_store):
    links = [l for l in top_k_links(fixture_store) if l.source == BUS]
    assert [(l.target, l.ratio) for l in links] == [
        (TROLLEY, 0.8),
        (TRAM, 0.6),
        (CHAUFFEUR, 0.6),
    ]


def test_rank_boundary_tie_goes_to_smaller_id(fixture_store):
    # chauffeur's candidates: taxi 0.8, then bus/trolley/tram all tied at 0.6;
    # trolley's id sorts before tram's, so tram is the one pruned.
    links = [l for l in top_k_links(fixture_store) if l.source == CHAUFFEUR]
    assert [l.target for l in links] == [TAXI, BUS, TROLLEY]


def test_fewer_candidates_than_k():
    store = small_store({
        "a": {"s1", "s2"}, "b": {"s1"}, "c": {"s2"}, "d": {"s9"},
    })
    out_degree = sum(1 for l in top_k_links(store, k=3) if l.source == "a")
    assert out_degree == 2


def test_min_ratio_is_strict(fixture_store):
    links = [l for l in top_k_links(fixture_store, min_ratio=0.5) if l.source == TAXI]
    # taxi's only candidate strictly above 0.5 is the chauffeur at 1.0
    assert [(l.target, l.ratio) for l in links] == [(CHAUFFEUR, 1.0)]


def test_k_must_be_positive():
    with pytest.raises(ValueError):
        top_k_links(ClassifierStore(), k=0)


def test_empty_store_gives_no_links():
    assert top_k_links(ClassifierStore()) == []


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 17])
def test_matches_brute_force_oracle(seed):
    store = make_random_store(seed, n_occupations=30, max_skills=12)
    assert top_k_links(store) == brute_force_links(store)


def test_out_degree_law():
    for seed in range(5):
        store = make_random_store(seed, n_occupations=40)
        links = top_k_links(store)
        by_source = {}
        for l in links:
            by_source[l.source] = by_source.get(l.source, 0) + 1
        for occ in store.occupations:
            positive = sum(
                1 for l in brute_force_links(store, k=10**9) if l.source == occ
            )
            assert by_source.get(occ, 0) == min(3, positive)
        assert len(links) <= 3 * len(store.occupations)
        assert all(0 < l.ratio <= 1 for l in links)


def test_deterministic_output(fixture_store):
    assert top_k_links(fixture_store) == top_k_links(fixture_store)


def test_merge_directed_pair_takes_max():
    edges = merge_undirected([
        SimilarityLink("A", "B", 0.6), SimilarityLink("B", "A", 0.75),
    ])
    assert edges == [DisplayEdge("A", "B", 0.75)]


def test_merge_singleton_direction():
    assert merge_undirected([SimilarityLink("A", "B", 0.6)]) == [
        DisplayEdge("A", "B", 0.6)
    ]


def test_merge_six_distinct_pairs_stay_six():
    links = [
        SimilarityLink("bus", "trolley", 0.80),
        SimilarityLink("bus", "tram", 0.77),
        SimilarityLink("bus", "chauffeur", 0.63),
        SimilarityLink("cargo", "dangerous", 0.60),
        SimilarityLink("cargo", "bus", 0.55),
        SimilarityLink("cargo", "chauffeur", 0.45),
    ]
    edges = merge_undirected(links)
    assert len(edges) == 6
    assert all(e.a < e.b for e in edges)


def test_merge_never_grows():
    for seed in range(5):
        store = make_random_store(seed, n_occupations=25)
        links = top_k_links(store)
        edges = merge_undirected(links)
        assert len(edges) <= len(links)
        best = {}
        for l in links:
            pair = tuple(sorted((l.source, l.target)))
            best[pair] = max(best.get(pair, 0.0), l.ratio)
        assert {(e.a, e.b): e.ratio for e in edges} == best
