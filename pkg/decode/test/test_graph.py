import io

import networkx as nx
import numpy as np
import pytest

from decode import statistics
from decode.graph import (DuplicateEdge, Graph, GraphFormatError, NegativeWeight, NodeSetMismatch,
                          SelfLoop, UndefinedStatistic, ZeroWeight,
                          load_edge_list, load_node_labels, parse_edge_lines, write_edge_list,
                         )
from decode.multiplex import EmptyLayer, LayerStack, normalize_layer, overlay
from decode.union_find import MaskLengthMismatch, UnionFind, connected_components, giant_component

def graph_from_text(text, weighted=False):
    return parse_edge_lines(text.splitlines(), weighted=weighted)

def test_parse_edge_list():
    g = graph_from_text('a b\nb c\n')
    assert (g.n, g.m) == (3, 2)
    assert g.names == ['a', 'b', 'c']
    assert g.w.tolist() == [1.0, 1.0]
    assert g.neighbors[1] == [0, 2]

def test_separators_comments_and_blank_lines():
    g = graph_from_text('# comment\n\na,b,2.5\nb\tc  0.5\n', weighted=True)
    assert (g.n, g.m) == (3, 2)
    assert g.edge_weight(0, 1) == 2.5
    assert g.edge_weight(2, 1) == 0.5
    assert g.edge_weight(0, 2) is None

def test_weights_are_ignored_unless_weighted():
    g = graph_from_text('a b 3\nb c 4\n')
    assert g.is_binary

def test_malformed_lines():
    for text, weighted, error, line_number in [
        ('a b\nb c -1\n', False, NegativeWeight, 2),
        ('a b -1\n', True, NegativeWeight, 1),
        ('a b 0\n', True, ZeroWeight, 1),
        ('a b\na a\n', False, SelfLoop, 2),
        ('a b\nb c\nb a\n', False, DuplicateEdge, 3),
        ('a b\n', True, GraphFormatError, 1),
        ('a b c d\n', False, GraphFormatError, 1),
        ('a b x\n', True, GraphFormatError, 1),
        ('a b nan\n', True, GraphFormatError, 1),
    ]:
        with pytest.raises(error) as excinfo:
            graph_from_text(text, weighted=weighted)

        assert excinfo.value.line_number == line_number

def test_empty_edge_list():
    with pytest.raises(GraphFormatError):
        graph_from_text('# nothing here\n')

def test_graph_constructor_checks():
    with pytest.raises(SelfLoop):
        Graph(2, [(1, 1, 1.0)])

    with pytest.raises(DuplicateEdge):
        Graph(2, [(0, 1, 1.0), (1, 0, 2.0)])

    with pytest.raises(GraphFormatError):
        Graph(2, [(0, 2, 1.0)])

    with pytest.raises(NegativeWeight):
        Graph(2, [(0, 1, -2.0)])

def test_karate_loads_with_expected_size(karate, karate_weighted, karate_files):
    g = load_edge_list(karate_files['edges'])
    assert (g.n, g.m) == (34, 78)
    assert (karate.n, karate.m) == (34, 78)

    g_weighted = load_edge_list(karate_files['edges_weighted'], weighted=True)
    assert g_weighted.reindexed(karate_weighted.names) == karate_weighted

def test_degrees_and_strengths(karate, karate_weighted):
    assert karate.degrees.sum() == 2 * karate.m
    assert karate_weighted.strengths.sum() == pytest.approx(2 * karate_weighted.total_weight)

    A = karate.adjacency_matrix
    assert (A != A.T).nnz == 0
    assert np.array_equal(np.asarray(A.sum(axis=1)).ravel(), karate.degrees)

    binary = karate_weighted.binarized()
    assert binary.is_binary
    assert binary == karate
    assert np.array_equal(binary.strengths, karate_weighted.degrees)

def test_edge_list_written_and_reloaded(karate_weighted, tmp_path):
    fn = tmp_path / 'edges.txt'
    write_edge_list(karate_weighted, fn)

    reloaded = load_edge_list(fn, weighted=True)
    assert reloaded.reindexed(karate_weighted.names) == karate_weighted

    buffer = io.StringIO()
    write_edge_list(karate_weighted, buffer)
    assert buffer.getvalue() == fn.read_text()

def test_reindexed():
    g = graph_from_text('a b\nb c\n')
    reordered = g.reindexed(['c', 'b', 'a'])

    assert reordered.names == ['c', 'b', 'a']
    assert reordered.i.tolist() == [0, 1]
    assert reordered.j.tolist() == [1, 2]

    with pytest.raises(NodeSetMismatch):
        g.reindexed(['a', 'b', 'd'])

def test_subgraph():
    g = graph_from_text('a b\nb c\nc d\n')
    sub = g.subgraph([1, 2, 3])
    assert sub.names == ['b', 'c', 'd']
    assert sub.m == 2

def test_load_node_labels(tmp_path):
    g = graph_from_text('a b\nb c\n')

    fn = tmp_path / 'labels.csv'
    fn.write_text('node,label\nc,x\na,y\n')
    assert load_node_labels(fn, g) == ['y', None, 'x']

    fn.write_text('node,label\nz,x\n')
    with pytest.raises(GraphFormatError):
        load_node_labels(fn, g)

    fn.write_text('node,label\na,x\nb,y\na,z\n')
    with pytest.raises(GraphFormatError) as excinfo:
        load_node_labels(fn, g)
    assert excinfo.value.line_number == 4

def test_union_find():
    uf = UnionFind(5)
    assert uf.union(0, 1)
    assert uf.union(3, 4)
    assert not uf.union(1, 0)
    assert uf.connected(0, 1)
    assert not uf.connected(1, 3)
    assert uf.count == 3

def test_connected_components():
    g = graph_from_text('a b\nb c\n')

    assert connected_components(g).labels.tolist() == [0, 0, 0]

    without_b = connected_components(g, node_mask=[True, False, True])
    assert without_b.labels.tolist() == [0, -1, 1]

    without_edge = connected_components(g, edge_mask=[True, False])
    assert without_edge.labels.tolist() == [0, 0, 1]

    with pytest.raises(MaskLengthMismatch):
        connected_components(g, node_mask=[True, True])

def test_components_match_networkx():
    G = nx.gnm_random_graph(60, 50, seed=1)
    G.add_nodes_from(range(60))
    edges = [(u, v, 1.0) for u, v in G.edges]
    g = Graph(60, edges)

    components = connected_components(g)
    assert components.num_clusters == nx.number_connected_components(G)
    assert components.member_sets() == {frozenset(c) for c in nx.connected_components(G)}

    giant = giant_component(g)
    assert giant.n == len(max(nx.connected_components(G), key=len))

def test_graph_density():
    for G, expected in [
        (nx.complete_graph(5), 1.0),
        (nx.path_graph(5), 0.4),
    ]:
        g = Graph(G.number_of_nodes(), [(u, v, 1) for u, v in G.edges])
        assert statistics.graph_density(g) == pytest.approx(expected)

def test_statistics_on_karate(karate, karate_nx):
    G, _ = karate_nx

    assert statistics.graph_density(karate) == pytest.approx(78 / 561)
    assert statistics.global_transitivity(karate) == pytest.approx(nx.transitivity(G))
    assert statistics.triangle_count(karate) == sum(nx.triangles(G).values()) // 3

    degrees = karate.degrees
    expected_centralization = np.sum(degrees.max() - degrees) / (33 * 32)
    assert statistics.degree_centralization(karate) == pytest.approx(expected_centralization)

def test_transitivity_and_centralization_extremes():
    triangle = Graph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
    path = Graph(3, [(0, 1, 1), (1, 2, 1)])
    star = Graph(5, [(0, k, 1) for k in range(1, 5)])
    cycle = Graph(5, [(k, (k + 1) % 5, 1) for k in range(5)])

    assert statistics.global_transitivity(triangle) == 1.0
    assert statistics.global_transitivity(path) == 0.0
    assert statistics.degree_centralization(star) == 1.0
    assert statistics.degree_centralization(cycle) == 0.0

def test_undefined_statistics():
    single_edge = Graph(2, [(0, 1, 1)])

    with pytest.raises(UndefinedStatistic):
        statistics.global_transitivity(single_edge)

    with pytest.raises(UndefinedStatistic):
        statistics.degree_centralization(single_edge)

    with pytest.raises(UndefinedStatistic):
        statistics.graph_density(Graph(1, []))

    row = statistics.describe(single_edge)
    assert row['nodes'] == 2
    assert row['components'] == 1
    assert np.isnan(row['global transitivity'])

def test_normalize_layer():
    g = Graph(3, [(0, 1, 2), (1, 2, 3), (0, 2, 5)])
    assert normalize_layer(g).w.tolist() == pytest.approx([0.2, 0.5, 0.3])

    with pytest.raises(EmptyLayer):
        normalize_layer(Graph(3, []))

def test_overlay():
    first = Graph(3, [(0, 1, 0.2)])
    second = Graph(3, [(0, 1, 0.3), (1, 2, 1.0)])

    g = overlay(LayerStack([first, second]))
    assert g.edge_weight(0, 1) == 0.5
    assert g.edge_weight(1, 2) == 1.0

    disjoint = overlay(LayerStack([Graph(3, [(0, 1, 1)]), Graph(3, [(1, 2, 1)])]))
    assert disjoint.m == 2

    normalized = overlay(LayerStack([first, second]), prenormalize=True)
    assert normalized.edge_weight(0, 1) == pytest.approx(1 + 0.3 / 1.3)

def test_overlay_matches_named_layers():
    first = graph_from_text('a b 1\nb c 1\n', weighted=True)
    second = graph_from_text('c b 2\nb a 3\n', weighted=True)

    g = overlay(LayerStack([first, second]))
    assert g.names == ['a', 'b', 'c']
    assert g.edge_weight(0, 1) == 4.0
    assert g.edge_weight(1, 2) == 3.0

def test_layer_node_sets_must_match():
    with pytest.raises(NodeSetMismatch):
        LayerStack([Graph(3, [(0, 1, 1)]), Graph(4, [(0, 1, 1)])])

    with pytest.raises(NodeSetMismatch):
        LayerStack([graph_from_text('a b\n'), graph_from_text('a c\n')])
