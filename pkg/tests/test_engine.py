import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from girth_triples import engine
from girth_triples.catalog import PASCH, enumerate_obstructions
from girth_triples.engine import (MemoryBudgetError, add_triple, available_set_bruteforce, decode_triple,
                                  encode_triple, estimate_bytes, find_closing_triples, init_process,
                                  is_available_bruteforce, run_to_completion, step)
from girth_triples.observables import girth_check_patterns, girth_check_subsets


@given(st.lists(st.integers(0, 60), min_size=3, max_size=3, unique=True))
def test_code_round_trip(t):
    t = tuple(sorted(t))
    assert decode_triple(encode_triple(*t)) == t


def test_codes_are_dense():
    n = 9
    codes = sorted(encode_triple(a, b, c) for c in range(n) for b in range(c) for a in range(b))
    assert codes == list(range(math.comb(n, 3)))


def test_init_sizes():
    s = init_process(5, 4, 0)
    assert s.q_size == 10
    for n in (4, 7, 30):
        s = init_process(n, 6, 1)
        assert s.q_size == math.comb(n, 3)
        assert s.alive_pair_count == math.comb(n, 2)
        assert len(s.alive_pairs()) == math.comb(n, 2)
        assert s.available() == set(range(math.comb(n, 3)))


def test_init_errors():
    with pytest.raises(ValueError):
        init_process(3, 4, 0)
    with pytest.raises(ValueError):
        init_process(10, 3, 0)
    with pytest.raises(ValueError):
        init_process(10, 10, 0)
    with pytest.raises(MemoryBudgetError):
        init_process(3000, 6, 0)
    with pytest.raises(MemoryBudgetError):
        init_process(100, 6, 0, max_bytes=estimate_bytes(100) - 1)
    init_process(100, 6, 0, max_bytes=estimate_bytes(100))


def test_one_step_counts():
    s = init_process(5, 4, 0)
    step(s)
    assert s.q_size == 3
    for n in (10, 25):
        s = init_process(n, 6, 2)
        step(s)
        assert s.q_size == math.comb(n, 3) - 1 - 3 * (n - 3)
        assert s.available() == available_set_bruteforce(s)


def test_pasch_closing_by_hand():
    s = init_process(6, 6, 0)
    add_triple(s, (0, 1, 2))
    add_triple(s, (0, 3, 4))
    assert s.is_available((2, 4, 5)) and s.is_available((1, 3, 5))
    # add the third Pasch triple without the closing pass, then ask
    engine._add(s, encode_triple(1, 3, 5))
    assert find_closing_triples(s, (1, 3, 5)) == {encode_triple(2, 4, 5)}

    s = init_process(6, 6, 0)
    for t in PASCH[:3]:
        add_triple(s, t)
    assert not s.is_available((2, 4, 5))
    assert not is_available_bruteforce(s, (2, 4, 5))
    assert s.available() == available_set_bruteforce(s)


def test_pasch_closing_at_ell5_is_absent():
    s = init_process(6, 5, 0)
    for t in PASCH[:3]:
        add_triple(s, t)
    assert s.is_available((2, 4, 5))


def test_closing_is_empty_for_ell4_and_disjoint_triple():
    s = init_process(20, 4, 5)
    for _ in range(15):
        code = step(s)
        assert find_closing_triples(s, code) == set()
    s = init_process(12, 6, 0)
    add_triple(s, (0, 1, 2))
    add_triple(s, (0, 3, 4))
    add_triple(s, (7, 8, 9))
    assert find_closing_triples(s, (7, 8, 9)) == set()


def test_find_closing_rejects_unchosen():
    s = init_process(8, 6, 0)
    with pytest.raises(ValueError):
        find_closing_triples(s, (0, 1, 2))


def test_add_triple_rejects_unavailable():
    s = init_process(8, 6, 0)
    add_triple(s, (0, 1, 2))
    with pytest.raises(ValueError):
        add_triple(s, (0, 1, 3))


def test_bruteforce_examples():
    s = init_process(9, 6, 0)
    assert all(is_available_bruteforce(s, t) for t in [(0, 1, 2), (3, 5, 8)])
    add_triple(s, (0, 1, 2))
    assert not is_available_bruteforce(s, (0, 1, 2))
    assert not is_available_bruteforce(s, (0, 1, 5))
    assert not is_available_bruteforce(s, (0, 1, 5), family="all")


@pytest.mark.parametrize("ell", [4, 6, 7])
def test_oracle_equivalence_small(ell):
    s = init_process(14, ell, 11)

    def check(state, code):
        assert state.available() == available_set_bruteforce(state)

    run_to_completion(s, on_step=check)


@pytest.mark.parametrize("ell", [6, 7])
def test_large_and_all_family_agree(ell):
    s = init_process(12, ell, 4)
    rng = np.random.default_rng(0)
    while step(s) is not None:
        cands = [decode_triple(int(c)) for c in rng.integers(0, math.comb(12, 3), 15)]
        for t in cands:
            assert is_available_bruteforce(s, t, "large") == is_available_bruteforce(s, t, "all")
        if s.i >= 10:
            break


def test_pair_count_and_monotonicity():
    s = init_process(30, 6, 3)
    prev = s.available()

    def check(state, code):
        nonlocal prev
        assert state.alive_pair_count == math.comb(30, 2) - 3 * state.i
        assert len(state.alive_pairs()) == state.alive_pair_count
        cur = state.available()
        assert cur < prev and code not in cur
        prev = cur

    run_to_completion(s, on_step=check)
    assert s.q_size == 0 and step(s) is None


@pytest.mark.parametrize("seed", range(6))
def test_n6_ell4_small_case(seed):
    res = run_to_completion(init_process(6, 4, seed))
    assert res.m <= 4


@pytest.mark.parametrize("ell", [4, 5, 6, 7])
def test_final_system_valid(ell):
    res = run_to_completion(init_process(24, ell, 9))
    assert 3 * res.m <= math.comb(24, 2)
    assert girth_check_subsets(res.triples, ell)
    assert girth_check_patterns(res.triples, enumerate_obstructions(ell))


def test_partial_runs_resume():
    a = init_process(40, 6, 8)
    run_to_completion(a, max_steps=50)
    assert a.i == 50
    rest = run_to_completion(a)
    b = run_to_completion(init_process(40, 6, 8))
    assert rest.triples == b.triples


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_determinism(seed):
    a = run_to_completion(init_process(25, 6, seed))
    b = run_to_completion(init_process(25, 6, seed))
    assert a.triples == b.triples


def test_snapshot_schedule():
    s = init_process(30, 6, 0)
    res = run_to_completion(s, snapshot_every=20, snapshot_times=(0.05,), snapshot_fn=lambda st: st.i)
    assert res.snapshots[:3] == [0, 20, 40]
    assert 45 in res.snapshots
    assert res.snapshots == sorted(res.snapshots)
