import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfcolor.matching import (
    Bipartition,
    HallViolator,
    Matching,
    augment_preserving,
    find_augmenting_path,
    maximum_matching,
    saturating_matching,
)


def random_bipartition(rng, nx, ny, p):
    X = list(range(nx))
    Y = list(range(nx, nx + ny))
    edges = [(x, y) for x in X for y in Y if rng.random() < p]
    return Bipartition(X, Y, edges)


def brute_force_max(H: Bipartition) -> int:
    edges = list(H.edges())
    for k in range(min(len(H.left), len(H.right)), 0, -1):
        for combo in itertools.combinations(edges, k):
            ends = [v for e in combo for v in e]
            if len(set(ends)) == 2 * k:
                return k
    return 0


def hall_holds(H: Bipartition) -> bool:
    X = H.left
    for r in range(1, len(X) + 1):
        for S in itertools.combinations(X, r):
            if len({y for x in S for y in H.adj[x]}) < r:
                return False
    return True


def test_named_instances():
    K33 = Bipartition("abc", "xyz", [(a, b) for a in "abc" for b in "xyz"])
    assert len(maximum_matching(K33)) == 3
    star = Bipartition([0], [1, 2, 3, 4, 5], [(0, y) for y in range(1, 6)])
    assert len(maximum_matching(star)) == 1
    perfect = Bipartition([0, 1, 2], [3, 4, 5], [(0, 3), (1, 4), (2, 5)])
    M = saturating_matching(perfect)
    assert isinstance(M, Matching) and M.saturates([0, 1, 2])


def test_pigeonhole_violator():
    H = Bipartition(["a", "b"], ["y"], [("a", "y"), ("b", "y")])
    v = saturating_matching(H)
    assert isinstance(v, HallViolator)
    assert v.S == {"a", "b"} and v.neighborhood == {"y"}
    assert v.deficiency == 1


def test_right_side_saturation():
    H = Bipartition([0, 1, 2], [3], [(0, 3), (1, 3)])
    M = saturating_matching(H, "right")
    assert isinstance(M, Matching) and 3 in M
    with pytest.raises(ValueError):
        saturating_matching(H, "middle")


def test_maximum_against_brute_force(rng):
    for _ in range(200):
        nx, ny = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        H = random_bipartition(rng, nx, ny, float(rng.uniform(0.1, 0.9)))
        M = maximum_matching(H)
        assert M.is_valid(H)
        assert len(M) == brute_force_max(H)


def test_violator_iff_hall_fails(rng):
    for _ in range(200):
        nx, ny = int(rng.integers(1, 11)), int(rng.integers(1, 11))
        H = random_bipartition(rng, nx, ny, float(rng.uniform(0.05, 0.6)))
        out = saturating_matching(H)
        if isinstance(out, HallViolator):
            assert not hall_holds(H)
            assert out.S <= set(H.left)
            assert out.neighborhood == {y for x in out.S for y in H.adj[x]}
            assert len(out.neighborhood) < len(out.S)
        else:
            assert hall_holds(H)
            assert out.saturates(H.left) and out.is_valid(H)


def test_degree_gap_implies_saturation(rng):
    # every left degree above every right degree forces Hall's condition
    made = 0
    while made < 100:
        H = random_bipartition(rng, int(rng.integers(2, 15)), int(rng.integers(2, 25)), 0.5)
        ldeg = [len(H.adj[x]) for x in H.left]
        rdeg = [len(H.radj[y]) for y in H.right]
        if min(ldeg) <= max(rdeg):
            continue
        made += 1
        out = saturating_matching(H)
        assert isinstance(out, Matching) and out.saturates(H.left)


def test_augment_path_example():
    # path a-b-c-d with M = {bc}; a, c on the left
    H = Bipartition(["a", "c"], ["b", "d"], [("a", "b"), ("c", "b"), ("c", "d")])
    M = Matching.from_edges([("c", "b")])
    for strategy in ("single", "phases"):
        out = augment_preserving(H, M, strategy)
        assert len(out) == 2
        assert "b" in out and "c" in out


def test_augment_on_maximum_is_identity():
    H = Bipartition([0, 1], [2, 3], [(0, 2), (1, 3), (0, 3)])
    M = maximum_matching(H)
    assert augment_preserving(H, M).edges() == M.edges()
    assert find_augmenting_path(H, M) is None


def test_augment_rejects_foreign_matching():
    H = Bipartition([0], [1, 2], [(0, 1)])
    with pytest.raises(ValueError):
        augment_preserving(H, Matching.from_edges([(0, 2)]))
    with pytest.raises(ValueError):
        augment_preserving(H, Matching(), "bogus")


def test_matching_from_edges_rejects_overlap():
    with pytest.raises(ValueError):
        Matching.from_edges([(0, 1), (1, 2)])


def test_bipartition_validation():
    with pytest.raises(ValueError):
        Bipartition([0, 1], [1, 2], [])
    with pytest.raises(ValueError):
        Bipartition([0], [1], [(0, 5)])


@settings(max_examples=500, deadline=None)
@given(
    nx=st.integers(1, 12),
    ny=st.integers(1, 12),
    p=st.floats(0.05, 1.0),
    seed=st.integers(0, 2**32 - 1),
    strategy=st.sampled_from(["single", "phases"]),
)
def test_augmentation_preserves_saturation(nx, ny, p, seed, strategy):
    rng = np.random.default_rng(seed)
    H = random_bipartition(rng, nx, ny, p)
    # random (not necessarily maximal) starting matching
    used, start = set(), []
    for x, y in H.edges():
        if x not in used and y not in used and rng.random() < 0.5:
            used.update((x, y))
            start.append((x, y))
    M = Matching.from_edges(start)
    out = augment_preserving(H, M, strategy)
    assert M.saturated <= out.saturated
    assert out.is_valid(H)
    assert len(out) == len(maximum_matching(H))
