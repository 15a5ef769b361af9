import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netcalib.graph import (EdgeListParseError, Graph, GraphError, largest_connected_component,
                            parse_edge_list, simplify, write_edge_list, read_edge_list)

import oracles
from helpers import complete, cycle


def test_parse_two_edge_path():
    g = parse_edge_list("0 1\n1 2")
    assert g.n == 3
    assert g.edge_set() == {(0, 1), (1, 2)}


def test_parse_drops_loops_and_duplicates():
    g = parse_edge_list("a b\nb a\na a")
    assert g.n == 2
    assert g.edge_set() == {(0, 1)}
    assert g.labels == ["a", "b"]


def test_parse_ignores_trailing_columns():
    g = parse_edge_list("0 1 5.2 99")
    assert (g.n, g.edge_set()) == (2, {(0, 1)})


def test_parse_comments_and_first_appearance_order():
    g = parse_edge_list("% header\n# another\n\n7 3\n3 9\n")
    assert g.labels == ["7", "3", "9"]
    assert g.edge_set() == {(0, 1), (1, 2)}


def test_parse_errors():
    with pytest.raises(EdgeListParseError, match="line 2"):
        parse_edge_list("0 1\n5\n")
    with pytest.raises(EdgeListParseError, match="no edges"):
        parse_edge_list("# nothing here\n")


@pytest.mark.parametrize("edges, expected", [
    ([(0, 1), (1, 0), (2, 2)], {(0, 1)}),
    ([(0, 1), (0, 1), (1, 2)], {(0, 1), (1, 2)}),
    ([(0, 1), (1, 2), (2, 0)], {(0, 1), (1, 2), (0, 2)}),
])
def test_simplify(edges, expected):
    assert simplify(edges).edge_set() == expected


edge_lists = st.lists(st.tuples(st.integers(0, 15), st.integers(0, 15)), max_size=60)


@given(edge_lists)
def test_simplify_idempotent_and_degree_sum(edges):
    g = simplify(edges, n=16)
    again = simplify([tuple(e) for e in g.edges()], n=16)
    assert again == g
    assert g.degrees.sum() == 2 * g.m
    for u, v in g.edges():
        assert u != v
        assert g.has_edge(v, u) and g.has_edge(u, v)


def test_lcc_picks_largest():
    tri = [(0, 1), (1, 2), (0, 2)]
    tri2 = [(3, 4), (4, 5), (3, 5)]
    k4 = [(6 + u, 6 + v) for u, v in complete(4).edges()]
    lcc = largest_connected_component(Graph.from_edges(10, tri + tri2 + k4))
    assert (lcc.n, lcc.m) == (4, 6)


def test_lcc_of_connected_graph_is_itself():
    g = cycle(7)
    lcc = largest_connected_component(g)
    assert (lcc.n, lcc.m) == (7, 7)


def test_lcc_tie_goes_to_component_with_node_zero():
    g = Graph.from_edges(6, [(3, 4), (4, 5), (3, 5), (0, 1), (1, 2), (0, 2)])
    g2 = Graph.from_edges(6, [(1, 2), (2, 5), (1, 5), (0, 3), (3, 4), (0, 4)])
    assert largest_connected_component(g) == g.subgraph([0, 1, 2])
    assert largest_connected_component(g2) == g2.subgraph([0, 3, 4])


def test_lcc_empty_graph():
    with pytest.raises(GraphError):
        largest_connected_component(Graph.from_edges(0, []))


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 40), st.lists(st.tuples(st.integers(0, 39), st.integers(0, 39)), max_size=50))
def test_lcc_size_matches_flood_fill(n, edges):
    edges = [(u % n, v % n) for u, v in edges]
    g = Graph.from_edges(n, edges)
    comps = oracles.flood_components(n, [tuple(e) for e in g.edges()])
    assert largest_connected_component(g).n == max(len(c) for c in comps)


def test_edge_list_round_trip(tmp_path):
    g = cycle(6)
    write_edge_list(g, tmp_path / "c.edges", header="cycle")
    back = read_edge_list(tmp_path / "c.edges")
    assert back.n == 6 and back.m == 6
    assert np.array_equal(np.sort(back.degrees), np.sort(g.degrees))
