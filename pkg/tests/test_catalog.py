import itertools
import math
import random

import pytest

from girth_triples.catalog import (DIAMOND, PASCH, Obstruction, ObstructionCatalog, automorphism_count,
                                   canonical_label, enumerate_obstructions, enumerate_obstructions_naive,
                                   is_minimal, remark_bound)


def brute_aut(nv, triples):
    target = {frozenset(t) for t in triples}
    return sum(1 for g in itertools.permutations(range(nv))
               if {frozenset(g[x] for x in t) for t in target} == target)


def relabel(triples, perm):
    return [tuple(perm[x] for x in t) for t in triples]


def test_small_ell_is_diamond_only():
    for ell in (4, 5):
        cat = enumerate_obstructions(ell)
        assert len(cat.all_members) == 1
        assert cat.all_members[0].triples == ((0, 1, 2), (0, 1, 3)) or \
            canonical_label(cat.all_members[0].triples) == canonical_label(DIAMOND)
        assert cat.large_members == ()


def test_ell6_is_diamond_and_pasch():
    cat = enumerate_obstructions(6)
    assert [F.vertex_count for F in cat.all_members] == [4, 6]
    assert cat.pasch().canonical_key == canonical_label(PASCH)
    assert [F.name for F in cat.all_members] == ["diamond", "pasch"]


def test_class_counts():
    assert [len(enumerate_obstructions(l).all_members) for l in range(4, 10)] == [1, 1, 2, 3, 5, 13]


@pytest.mark.parametrize("ell", [4, 5, 6, 7])
def test_naive_enumerator_agrees(ell):
    fast = enumerate_obstructions(ell)
    naive = enumerate_obstructions_naive(ell)
    assert [F.canonical_key for F in fast.all_members] == [F.canonical_key for F in naive.all_members]


@pytest.mark.parametrize("ell", [4, 5, 6, 7, 8])
def test_catalog_invariants(ell):
    cat = enumerate_obstructions(ell)
    keys = [F.canonical_key for F in cat.all_members]
    assert len(set(keys)) == len(keys)
    assert len(cat.all_members) <= ell ** (2 * ell)
    assert len(cat.all_members) <= remark_bound(ell)
    assert [(F.vertex_count, F.canonical_key) for F in cat.all_members] == \
        sorted((F.vertex_count, F.canonical_key) for F in cat.all_members)
    for F in cat.all_members:
        assert F.edge_count == F.vertex_count - 2
        assert 4 <= F.vertex_count <= ell
        assert F.vertex_count != 5
        assert {x for t in F.triples for x in t} == set(range(F.vertex_count))
        assert all(tuple(sorted(t)) == t for t in F.triples)
        assert list(F.triples) == sorted(F.triples)
        assert is_minimal(F.triples)
        assert math.factorial(F.vertex_count) % F.aut_count == 0
        assert F.is_connected
    assert cat.large_members == tuple(F for F in cat.all_members if F.vertex_count >= 6)
    assert all(F.is_linear for F in cat.large_members)


@pytest.mark.parametrize("ell", [4, 5, 6, 7, 8])
def test_membership_stability(ell):
    a = {F.canonical_key for F in enumerate_obstructions(ell).all_members}
    b = {F.canonical_key for F in enumerate_obstructions(ell + 1).all_members}
    assert a <= b


@pytest.mark.parametrize("ell", [6, 7, 8])
def test_aut_counts_match_permutation_brute_force(ell):
    for F in enumerate_obstructions(ell).all_members:
        assert F.aut_count == brute_aut(F.vertex_count, F.triples)


def test_aut_examples():
    assert automorphism_count(Obstruction.from_triples(DIAMOND)) == 4
    assert automorphism_count([(0, 1, 2)]) == 6
    assert brute_aut(6, PASCH) == 24
    assert Obstruction.from_triples(PASCH).aut_count == 24


def test_is_minimal_examples():
    assert is_minimal(DIAMOND)
    assert is_minimal(PASCH)
    assert not is_minimal([(0, 1, 2), (0, 1, 3), (2, 4, 5), (3, 4, 5)])
    # every proper subset of the Pasch triples fails e = v - 2
    for r in range(1, 4):
        for sub in itertools.combinations(PASCH, r):
            v = len({x for t in sub for x in t})
            assert not (v >= 4 and len(sub) == v - 2)


def test_canonical_label_invariance():
    base = canonical_label([(0, 1, 2), (0, 1, 3)])
    assert canonical_label([(0, 2, 3), (0, 1, 3)]) == base
    rng = random.Random(3)
    for F in enumerate_obstructions(8).all_members:
        for _ in range(5):
            perm = list(range(F.vertex_count))
            rng.shuffle(perm)
            assert canonical_label(relabel(F.triples, perm)) == F.canonical_key


def test_canonical_label_distinguishes():
    members = enumerate_obstructions(9).all_members
    assert len({F.canonical_key for F in members}) == len(members)
    six = [(0, 1, 2), (0, 3, 4), (1, 3, 5), (2, 4, 5)]
    other = [(0, 1, 2), (0, 3, 4), (1, 3, 5), (1, 4, 5)]
    assert canonical_label(six) != canonical_label(other)


def test_canonical_label_empty_and_guard():
    assert canonical_label([], num_vertices=4) == canonical_label([], num_vertices=4)
    assert canonical_label([], num_vertices=4) != canonical_label(DIAMOND)
    with pytest.raises(ValueError):
        canonical_label([(0, 1, 2), (3, 4, 5), (6, 7, 8), (9, 10, 11), (12, 13, 14)])


def test_rejects_bad_ell():
    with pytest.raises(ValueError):
        enumerate_obstructions(3)
    with pytest.raises(ValueError):
        enumerate_obstructions(10)


def test_json_round_trip(tmp_path):
    cat = enumerate_obstructions(8)
    path = tmp_path / "cat.json"
    cat.save(path)
    back = ObstructionCatalog.load(path)
    assert back == cat
    data = cat.to_json()
    assert data["ell"] == 8 and "schema_version" in data
    assert set(data["obstructions"][0]) == {"v", "triples", "aut", "key"}
