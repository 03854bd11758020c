import pytest

from decode import datasets
from decode.modal import ClusterTree
from decode.partition import Partition

def pytest_assertrepr_compare(op, left, right):
    if isinstance(left, ClusterTree) and isinstance(right, ClusterTree) and op == "==":
        return [
            f'Comparing ClusterTree instances:',
            f'   levels: {left.levels} {right.levels}',
            f'   leaves: {[node.members for node in left.leaves]} {[node.members for node in right.leaves]}',
        ] + [f'   {l!r} {r!r}' for l, r in zip(left.nodes, right.nodes) if l != r]

    if isinstance(left, Partition) and isinstance(right, Partition) and op == "==":
        return [
            f'Comparing Partition instances:',
            f'   labels: {left.labels.tolist()} {right.labels.tolist()}',
            f'   num_clusters: {left.num_clusters} {right.num_clusters}',
        ]

@pytest.fixture(scope='session')
def karate_nx():
    G, labels = datasets.karate()
    return G, labels

@pytest.fixture(scope='session')
def karate(karate_nx):
    ''' Binary karate club with nodes named and numbered 1..34. '''
    G, _ = karate_nx
    return datasets.graph_from_networkx(G)

@pytest.fixture(scope='session')
def karate_weighted(karate_nx):
    G, _ = karate_nx
    return datasets.graph_from_networkx(G, weight='weight')

@pytest.fixture(scope='session')
def karate_truth(karate_nx, karate):
    _, labels = karate_nx
    return Partition.from_labels([labels[int(name)] for name in karate.names])

@pytest.fixture
def karate_files(tmp_path, karate_nx):
    ''' Karate written to disk the way `decode fetch-data karate` lays it out. '''
    G, labels = karate_nx
    datasets.write_dataset('karate', G, labels, weighted=True, data_dir=tmp_path)
    return datasets.dataset_fns('karate', tmp_path)
