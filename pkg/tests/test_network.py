import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnarx.errors import LookupFailure, ValidationError
from gnarx.network import (
    Network,
    build_fully_connected,
    build_nearest_neighbour,
    five_net,
    from_edges,
    load_edges_csv,
    load_exports_csv,
    normalize_weights,
    renormalize_for_missing,
    save_edges_csv,
)
from oracles import bfs_layers, random_digraph


def _path_net(n=5):
    nodes = [str(k) for k in range(1, n + 1)]
    return from_edges(nodes, [(nodes[k], nodes[k + 1]) for k in range(n - 1)])


def test_path_graph_second_stage():
    net = _path_net()
    assert net.neighbourhood_names("1", 2) == {"3"}
    assert net.neighbourhood_names("1", 4) == {"5"}
    assert net.neighbourhood_names("5", 1) == set()


def test_fully_connected_thirteen_nodes():
    nodes = [f"c{k}" for k in range(13)]
    exports = np.ones((13, 13)) - np.eye(13)
    net = build_fully_connected(exports, nodes)
    for i in range(13):
        assert net.neighbourhood(i, 1) == frozenset(set(range(13)) - {i})
        assert net.neighbourhood(i, 2) == frozenset()
    assert net.max_stage == 1
    np.testing.assert_allclose(net.weights[0, 1:], 1 / 12)


def test_unknown_node_lookup():
    with pytest.raises(LookupFailure):
        _path_net().neighbourhood("nope", 1)


@settings(max_examples=40)
@given(st.integers(2, 10), st.floats(0.05, 0.6), st.integers(0, 2 ** 32 - 1))
def test_stages_match_bfs(n, density, seed):
    a = random_digraph(np.random.default_rng(seed), n, density)
    net = Network(tuple(str(k) for k in range(n)), a)
    for i in range(n):
        layers = bfs_layers(a, i)
        assert len(net.stages[i]) == len(layers)
        for r, members in layers.items():
            assert net.neighbourhood(i, r) == frozenset(members)


@given(st.integers(2, 9), st.integers(0, 2 ** 32 - 1))
def test_stages_partition_reachable_set(n, seed):
    a = random_digraph(np.random.default_rng(seed), n, 0.3)
    net = Network(tuple(str(k) for k in range(n)), a)
    for i in range(n):
        stages = net.stages[i]
        union = set().union(*stages) if stages else set()
        assert sum(len(s) for s in stages) == len(union)
        assert i not in union
        assert union == set().union(*bfs_layers(a, i).values())


def test_normalize_examples():
    net = normalize_weights(Network(("a", "b", "c", "d"), np.array(
        [[0, 2, 2, 4], [0, 0, 3, 0], [0, 0, 0, 0], [1, 0, 0, 0]], dtype=float)))
    np.testing.assert_allclose(net.weights[0], [0, 0.25, 0.25, 0.5])
    assert net.weights[1, 2] == 1.0
    assert not net.weights[2].any()


def test_negative_weight_rejected():
    with pytest.raises(ValidationError):
        Network(("a", "b"), np.array([[0, -1.0], [1, 0]]))


def test_self_loop_rejected():
    with pytest.raises(ValidationError):
        Network(("a", "b"), np.array([[1.0, 1], [1, 0]]))


def test_export_rows_sum_to_one():
    rng = np.random.default_rng(0)
    e = rng.gamma(1.0, 1e9, (13, 13))
    np.fill_diagonal(e, 0.0)
    net = build_fully_connected(e)
    np.testing.assert_allclose(net.weights.sum(axis=1), 1.0, atol=1e-12)


def test_fully_connected_small_cases():
    two = build_fully_connected(np.array([[0, 5.0], [3.0, 0]]), ["a", "b"])
    np.testing.assert_array_equal(two.weights, [[0, 1], [1, 0]])
    e = np.array([[0, 1.0, 3.0], [2.0, 0, 2.0], [1.0, 4.0, 0]])
    net = build_fully_connected(e, ["a", "b", "c"])
    np.testing.assert_allclose(net.weights, [[0, 0.25, 0.75], [0.5, 0, 0.5], [0.2, 0.8, 0]])
    uniform = build_fully_connected(np.ones((4, 4)) - np.eye(4))
    np.testing.assert_allclose(uniform.weights[~np.eye(4, dtype=bool)], 1 / 3)


def test_fully_connected_needs_zero_diagonal():
    with pytest.raises(ValidationError):
        build_fully_connected(np.ones((2, 2)))


def test_nearest_neighbour():
    e = np.array([[0, 1.0, 5.0], [2.0, 0, 1.0], [3.0, 3.0, 0]])
    with pytest.raises(ValidationError, match="c"):
        build_nearest_neighbour(e, ["a", "b", "c"])
    net = build_nearest_neighbour(e, ["a", "b", "c"], allow_ties=True)
    assert (net.raw > 0).sum(axis=1).tolist() == [1, 1, 1]
    assert net.weights[0, 2] == 1.0 and net.weights[1, 0] == 1.0 and net.weights[2, 0] == 1.0


def test_nearest_neighbour_zero_row_names_node():
    e = np.array([[0, 1.0], [0.0, 0]])
    with pytest.raises(ValidationError, match="'b'"):
        build_nearest_neighbour(e, ["a", "b"])


@given(st.integers(2, 8), st.integers(0, 2 ** 32 - 1))
def test_nearest_neighbour_out_degree_one(n, seed):
    e = np.random.default_rng(seed).uniform(1, 2, (n, n))
    np.fill_diagonal(e, 0.0)
    net = build_nearest_neighbour(e)
    assert ((net.raw > 0).sum(axis=1) == 1).all()


def test_renormalize_example():
    raw = np.array([[0, 0.5, 0.3, 0.2], [1, 0, 0, 0], [1, 0, 0, 0], [1, 0, 0, 0]])
    net = Network(("a", "b", "c", "d"), raw)
    out = renormalize_for_missing(net, {"a", "b", "c"})
    np.testing.assert_allclose(out.weights[0], [0, 0.625, 0.375, 0])
    same = renormalize_for_missing(net, {"a", "b", "c", "d"})
    np.testing.assert_allclose(same.weights, net.weights)
    empty = renormalize_for_missing(net, {"b", "c", "d"})
    assert not empty.weights[1].any()


@given(st.integers(3, 8), st.integers(0, 2 ** 32 - 1))
def test_renormalize_preserves_ratios(n, seed):
    rng = np.random.default_rng(seed)
    a = random_digraph(rng, n, 0.7)
    net = Network(tuple(str(k) for k in range(n)), a)
    keep = {str(k) for k in range(n) if rng.random() < 0.6}
    out = renormalize_for_missing(net, keep)
    idx = [int(k) for k in keep]
    for i in range(n):
        row = out.weights[i]
        if row.any():
            assert abs(row.sum() - 1) < 1e-12
            np.testing.assert_allclose(row[idx] * net.weights[i, idx].sum(), net.weights[i, idx], atol=1e-12)


def test_five_net_structure():
    net = five_net()
    assert net.N == 5
    np.testing.assert_array_equal(net.raw > 0, (net.raw > 0).T)
    assert net.max_stage == 3
    assert net.neighbourhood_names("3", 1) == {"2"}


def test_edge_and_export_files(tmp_path):
    net = five_net()
    save_edges_csv(net, tmp_path / "e.csv")
    back = load_edges_csv(tmp_path / "e.csv", net.nodes)
    np.testing.assert_array_equal(back.weights, net.weights)
    (tmp_path / "x.csv").write_text(",a,b\na,0,2\nb,3,0\n")
    mat, names = load_exports_csv(tmp_path / "x.csv", ["b", "a"])
    assert names == ("b", "a")
    np.testing.assert_array_equal(mat, [[0, 3], [2, 0]])
