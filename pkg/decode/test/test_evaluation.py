import logging
import math

import networkx as nx
import numpy as np
import pytest
import sklearn.metrics

from decode import evaluation
from decode.graph import Graph
from decode.partition import Partition, UNALLOCATED

def test_contingency_table():
    table = evaluation.ContingencyTable([0, 0, 0, 1], [0, 0, 1, 1])

    assert table.N == 4
    assert table.counts.tolist() == [[2, 1], [0, 1]]
    assert table.row_sums.tolist() == [3, 1]
    assert table.column_sums.tolist() == [2, 2]
    assert table.to_frame().loc[0, 1] == 1

def test_nmi_hand_computed():
    pred = Partition([0, 0, 0, 1])
    truth = Partition([0, 0, 1, 1])

    I = 0.5 * math.log(4 / 3) + 0.25 * math.log(2 / 3) + 0.25 * math.log(2)
    H_pred = -(0.75 * math.log(0.75) + 0.25 * math.log(0.25))
    H_true = math.log(2)

    assert evaluation.nmi(pred, truth) == pytest.approx(2 * I / (H_pred + H_true))

    independent = Partition([0, 0, 1, 1])
    assert evaluation.nmi(Partition([0, 1, 0, 1]), independent) == pytest.approx(0, abs=1e-12)

def test_nmi_identity_symmetry_and_relabeling():
    a = Partition([0, 0, 1, 1, 2, 2, 2])
    b = Partition([1, 1, 0, 0, 0, 2, 2])
    relabeled = Partition([2, 2, 0, 0, 1, 1, 1])

    assert evaluation.nmi(a, a) == pytest.approx(1)
    assert evaluation.nmi(a, relabeled) == pytest.approx(1)
    assert evaluation.nmi(a, b) == evaluation.nmi(b, a)

def test_nmi_single_cluster_conventions():
    one = Partition([0, 0, 0, 0])
    two = Partition([0, 0, 1, 1])

    assert evaluation.nmi(one, one) == 1.0
    assert evaluation.nmi(one, two) == 0.0
    assert evaluation.nmi(two, one) == 0.0

def test_nmi_matches_sklearn():
    rng = np.random.default_rng(0)

    for _ in range(20):
        pred = rng.integers(0, 5, size=50)
        truth = rng.integers(0, 3, size=50)

        expected = sklearn.metrics.normalized_mutual_info_score(truth, pred, average_method='arithmetic')
        assert evaluation.nmi(Partition(pred), Partition(truth)) == pytest.approx(expected, abs=1e-10)

def test_unallocated_policies():
    pred = Partition([0, 0, UNALLOCATED, 1, 1, UNALLOCATED])
    truth = Partition([0, 0, 0, 1, 1, 1])

    assert evaluation.nmi(pred, truth, unallocated_policy='exclude') == pytest.approx(1)

    own_cluster = evaluation.nmi(pred, truth, unallocated_policy='own_cluster')
    expected = sklearn.metrics.normalized_mutual_info_score([0, 0, 0, 1, 1, 1], [0, 0, 2, 1, 1, 3])
    assert own_cluster == pytest.approx(expected)
    assert own_cluster < 1

    with pytest.raises(ValueError):
        evaluation.nmi(pred, truth, unallocated_policy='ignore')

def test_nodes_without_truth_are_dropped():
    pred = Partition([0, 0, 1, 1, 0])
    truth = Partition([0, 0, 1, 1, UNALLOCATED])
    assert evaluation.nmi(pred, truth) == pytest.approx(1)

def two_triangles():
    edges = [(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1)]
    return Graph(6, edges)

def test_modularity():
    g = two_triangles()

    assert evaluation.modularity(g, Partition([0, 0, 0, 1, 1, 1])) == pytest.approx(0.5)
    assert evaluation.modularity(g, Partition([0] * 6)) == pytest.approx(0)

    singletons = Partition(list(range(6)))
    expected = -sum((s / 12)**2 for s in g.strengths)
    assert evaluation.modularity(g, singletons) == pytest.approx(expected)

    with pytest.raises(evaluation.UnallocatedNodes):
        evaluation.modularity(g, Partition([0, 0, 0, 1, 1, UNALLOCATED]))

def test_modularity_matches_networkx(karate_nx, karate_weighted, karate_truth):
    G, _ = karate_nx

    communities = [{int(karate_weighted.names[v]) for v in members} for members in karate_truth.clusters]
    expected = nx.algorithms.community.modularity(G, communities, weight='weight')

    assert evaluation.modularity(karate_weighted, karate_truth) == pytest.approx(expected)

    scaled = karate_weighted.with_weights(karate_weighted.w * 3.7)
    assert evaluation.modularity(scaled, karate_truth) == pytest.approx(expected)

def test_gini_homogeneity(caplog):
    p = Partition([0, 0, 0, 0, 1, 1, 2, 2, 2, 2])
    attribute = ['a', 'a', 'a', 'a', 'a', 'b', 'a', 'a', 'b', 'c']

    homogeneity = evaluation.gini_homogeneity(p, attribute)
    assert homogeneity == pytest.approx({0: 1.0, 1: 0.5, 2: 0.375})

    with_empty = Partition([0, 0, 2, 2], num_clusters=3)
    with caplog.at_level(logging.WARNING):
        homogeneity = evaluation.gini_homogeneity(with_empty, ['a', 'a', 'a', 'b'])

    assert set(homogeneity) == {0, 2}
    assert 'cluster 1 is empty' in caplog.text

def test_cluster_summary():
    summary = evaluation.cluster_summary(Partition([0, 0, 0, 1, 2, 2, UNALLOCATED]))

    assert summary['clusters'] == 3
    assert summary['unallocated'] == 1
    assert summary['mean size'] == pytest.approx(2)
    assert summary['std size'] == pytest.approx(np.std([3, 1, 2]))
    assert summary['largest'] == 3
    assert summary['singletons'] == 1

def test_within_cluster_tie_share():
    g = two_triangles()
    assert evaluation.within_cluster_tie_share(g, Partition([0, 0, 0, 1, 1, 1])) == {0: 1.0, 1: 1.0}

    bridged = Graph(6, list(g.edges()) + [(2, 3, 1)])
    shares = evaluation.within_cluster_tie_share(bridged, Partition([0, 0, 0, 1, 1, 1]))
    assert shares[0] == pytest.approx((1 + 1 + 2 / 3) / 3)

def test_evaluation_table(karate, karate_truth):
    row = evaluation.evaluation_table(karate, karate_truth, truth=karate_truth)

    assert row['nmi'] == pytest.approx(1)
    assert row['clusters'] == 2
    assert row['modularity'] > 0
