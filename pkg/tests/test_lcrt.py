import math

import numpy as np
import pytest

from _oracles import greedy_cover, hop_levels, min_cover_size
from aerocast.errors import InvalidScenario, Unreachable
from aerocast.geometry import euclidean_distance
from aerocast.lcrt import DroneNode, build_lcrt_tree, compute_levels
from aerocast.scenarios import random_drones


def chain(n, spacing):
    return [DroneNode(i, (i * spacing, 0, 0), is_source=(i == 0)) for i in range(n)]


def test_single_source():
    t = build_lcrt_tree([DroneNode(0, (0, 0, 0), True)], 10)
    assert t.level == {0: 0} and t.parent == {} and t.forwarders == frozenset()
    assert t.transmitters == [0]


def test_chain_levels_and_forwarders():
    t = build_lcrt_tree(chain(5, 9), 10)
    assert t.level == {i: i for i in range(5)}
    assert t.parent == {1: 0, 2: 1, 3: 2, 4: 3}
    assert t.forwarders == {1, 2, 3}
    assert t.transmitters == [0, 1, 2, 3]


def test_star_has_no_forwarders():
    drones = [DroneNode(0, (0, 0, 0), True)] + [
        DroneNode(i, (5 * math.cos(i), 5 * math.sin(i), 0)) for i in range(1, 7)
    ]
    t = build_lcrt_tree(drones, 10)
    assert t.forwarders == frozenset()
    assert all(t.parent[i] == 0 for i in range(1, 7))


def test_greedy_prefers_wider_cover_then_lower_id():
    drones = [
        DroneNode(0, (0, 0, 0), True),
        DroneNode(1, (8, 5, 0)),
        DroneNode(2, (8, -5, 0)),
        DroneNode(3, (16, -9, 0)),
        DroneNode(4, (16, -1, 0)),
        DroneNode(5, (13, 3, 0)),
    ]
    t = build_lcrt_tree(drones, 10)
    # 2 reaches {3, 4, 5}; 1 reaches {4, 5}
    assert t.forwarders == {2}
    assert {t.parent[i] for i in (3, 4, 5)} == {2}


def test_equal_cover_tie_goes_to_lower_id():
    drones = [
        DroneNode(0, (0, 0, 0), True),
        DroneNode(2, (8, 1, 0)),
        DroneNode(1, (8, -1, 0)),
        DroneNode(3, (16, 0, 0)),
    ]
    assert build_lcrt_tree(drones, 10).forwarders == {1}


def test_unreachable_names_drones():
    drones = chain(3, 9) + [DroneNode(7, (100, 0, 0))]
    with pytest.raises(Unreachable) as exc:
        compute_levels(drones, 10)
    assert 7 in exc.value.ids


def test_requires_single_source():
    with pytest.raises(InvalidScenario):
        compute_levels([DroneNode(0, (0, 0, 0)), DroneNode(1, (1, 0, 0))], 10)
    with pytest.raises(InvalidScenario):
        compute_levels([DroneNode(0, (0, 0, 0), True), DroneNode(0, (1, 0, 0))], 10)


def test_non_relaying_drone_is_not_expanded():
    drones = chain(4, 9)
    with pytest.raises(Unreachable):
        compute_levels(drones, 10, non_relaying={2})
    t = build_lcrt_tree(chain(3, 9), 10, non_relaying={2})
    assert 2 not in t.forwarders and t.level[2] == 2


def test_levels_match_matrix_oracle(rng):
    for _ in range(100):
        n = int(rng.integers(2, 15))
        drones = random_drones(rng, n, 10.0)
        pts = [d.position for d in drones]
        assert compute_levels(drones, 10.0) == hop_levels(pts, 0, 10.0)


def test_tree_invariants_and_greedy_reference(rng):
    r = 10.0
    for _ in range(60):
        drones = random_drones(rng, int(rng.integers(3, 14)), r)
        pos = {d.id: d.position for d in drones}
        t = build_lcrt_tree(drones, r)
        assert set(t.level) == set(pos)
        assert t.source not in t.parent
        for child, par in t.parent.items():
            assert t.level[par] == t.level[child] - 1
            assert euclidean_distance(pos[child], pos[par]) <= r
            assert par == t.source or par in t.forwarders
        top = max(t.level.values())
        for lv in range(1, top):
            cands = [i for i, v in t.level.items() if v == lv]
            targets = [i for i, v in t.level.items() if v == lv + 1]

            def covers(c):
                return {x for x in targets if euclidean_distance(pos[c], pos[x]) <= r}

            ref = greedy_cover(cands, targets, covers)
            got = {i for i in t.forwarders if t.level[i] == lv}
            assert got == set(ref)
            if len(cands) <= 10:
                opt = min_cover_size(cands, targets, covers)
                assert len(got) <= opt * (math.log(len(targets)) + 1)


def test_deterministic(rng):
    drones = random_drones(rng, 12, 10.0)
    a = build_lcrt_tree(drones, 10.0)
    b = build_lcrt_tree(list(reversed(drones)), 10.0)
    assert a == b
