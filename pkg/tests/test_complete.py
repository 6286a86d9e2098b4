import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfcolor.complete import (
    _base_case,
    cf_color_complete,
    choose_partition,
    color_complete_partial,
    complete_edge_id,
    extend_matching,
    h,
    h_tilde,
    h_tilde_cases,
    log_bound,
)
from cfcolor.graph import complete_graph
from cfcolor.verify import UNCOLORED, satisfied_mask, verify


def ceil_log2_by_doubling(x: int) -> int:
    k = 0
    while (1 << k) < x:
        k += 1
    return k


def test_h_examples():
    assert (h(7), h_tilde(7)) == (4, 4)
    assert (h(10), h_tilde(10)) == (6, 6)
    assert h(4) == 2


def test_h_tilde_closed_form():
    for n in range(3, 5000):
        assert h_tilde(n) == h_tilde_cases(n)


def test_log_bound_matches_doubling():
    for n in range(2, 5000):
        assert log_bound(n) == ceil_log2_by_doubling(n - 1)
    with pytest.raises(ValueError):
        log_bound(1)


def test_recursion_inequality_spot_checks():
    for n in (3, 6, 7, 10, 17, 18, 1026, 999_999, 1_000_000):
        assert 1 + log_bound(h_tilde(n)) <= log_bound(n)


@pytest.mark.parametrize("n,sizes", [(7, (4, 3)), (10, (4, 6)), (9, (4, 5))])
def test_partition_sizes(n, sizes):
    V = list(range(n))
    part = choose_partition(V, extend_matching(V, []))
    assert (len(part.V1), len(part.V2)) == sizes


@settings(max_examples=300, deadline=None)
@given(n=st.integers(7, 80), seed=st.integers(0, 2**32 - 1), k=st.integers(0, 40))
def test_partition_invariants_with_blocked(n, seed, k):
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n).tolist()
    blocked = [tuple(sorted(perm[2 * i: 2 * i + 2])) for i in range(min(k, n // 2))]
    pairs = extend_matching(list(range(n)), blocked)
    part = choose_partition(list(range(n)), pairs)
    part.validate(list(range(n)), pairs)
    assert not any(set(p) <= set(part.V1) for p in blocked)
    assert sum(set(p) <= set(part.V2) for p in blocked) <= 1


def test_choose_partition_preconditions():
    with pytest.raises(ValueError):
        choose_partition(list(range(6)), extend_matching(list(range(6)), []))
    with pytest.raises(ValueError):
        choose_partition(list(range(9)), [(0, 1)])


def test_base_case_examples():
    c = color_complete_partial(3, [(0, 1)])
    assert c.colors[complete_edge_id(3, 0, 1)] == UNCOLORED
    assert len(c.palette) == 1 and len(c.colored) == 1
    assert satisfied_mask(complete_graph(3), c).all()
    c6 = color_complete_partial(6)
    assert len(c6.palette) <= 3
    assert satisfied_mask(complete_graph(6), c6).all()


def test_base_case_repairs_stranded_blocked_pair():
    # greedy alone picks 01 and strands the blocked pair 23
    mm = _base_case([0, 1, 2, 3], [(2, 3)])
    covered = {v for e in mm for v in e}
    assert covered == {0, 1, 2, 3}
    assert (2, 3) not in mm


def test_nine_vertices_without_blocked_edges():
    c = color_complete_partial(9)
    assert len(c.palette) <= 3
    assert satisfied_mask(complete_graph(9), c).all()


@pytest.mark.parametrize("n,bound", [(2, 1), (9, 4), (1024, 11)])
def test_total_coloring_examples(n, bound):
    c = cf_color_complete(n)
    assert c.total
    assert len(c.palette) <= bound
    assert verify(complete_graph(n), c).conflict_free


def test_partial_never_colors_blocked_edges(rng):
    for n in (7, 12, 33, 64):
        for _ in range(10):
            perm = rng.permutation(n)
            k = int(rng.integers(0, n // 2 + 1))
            blocked = [(int(perm[2 * i]), int(perm[2 * i + 1])) for i in range(k)]
            c = color_complete_partial(n, blocked)
            for a, b in blocked:
                assert c.colors[complete_edge_id(n, a, b)] == UNCOLORED
            assert len(c.palette) <= log_bound(n)
            assert satisfied_mask(complete_graph(n), c).all()


def test_custom_palette():
    c = color_complete_partial(17, palette=[10, 20, 30, 40])
    assert c.palette <= {10, 20, 30, 40}
    with pytest.raises(ValueError):
        color_complete_partial(17, palette=[1, 2, 3])


@pytest.mark.parametrize("blocked", [[(0, 0)], [(0, 1), (1, 2)], [(0, 9)]])
def test_invalid_blocked(blocked):
    with pytest.raises(ValueError):
        color_complete_partial(5, blocked)


def test_edge_id_agrees_with_graph():
    G = complete_graph(13)
    for e, (u, v) in enumerate(G.edges.tolist()):
        assert complete_edge_id(13, u, v) == e == complete_edge_id(13, v, u)


def test_open_mode_is_only_reported():
    # the closed construction can fail the open requirement; just make sure it reports
    rep = verify(complete_graph(5), cf_color_complete(5), "open")
    assert rep.mode == "open"
    assert isinstance(rep.conflict_free, bool)
    assert math.isfinite(rep.colors_used)
