import numpy as np

from decode.partition import Partition, UNALLOCATED

class MaskLengthMismatch(ValueError):
    pass

class UnionFind:
    ''' Disjoint sets over 0..n-1 with union by size and path halving. '''

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def __len__(self):
        return len(self.parent)

    def find(self, v):
        parent = self.parent
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def union(self, u, v):
        ''' Returns True if u and v were in different sets. '''
        root_u = self.find(u)
        root_v = self.find(v)

        if root_u == root_v:
            return False

        if self.size[root_u] < self.size[root_v]:
            root_u, root_v = root_v, root_u

        self.parent[root_v] = root_u
        self.size[root_u] += self.size[root_v]
        self.count -= 1

        return True

    def connected(self, u, v):
        return self.find(u) == self.find(v)

def connected_components(g, node_mask=None, edge_mask=None):
    ''' Components of g restricted to admitted nodes and edges.

    Nodes outside node_mask are UNALLOCATED. An edge is used only if it is in
    edge_mask and both of its endpoints are admitted. Component ids are
    numbered in order of each component's smallest node id.
    '''
    if node_mask is None:
        node_mask = np.ones(g.n, dtype=bool)
    else:
        node_mask = np.asarray(node_mask, dtype=bool)
        if len(node_mask) != g.n:
            raise MaskLengthMismatch(f'node mask has length {len(node_mask)}, graph has {g.n} nodes')

    if edge_mask is None:
        edge_mask = np.ones(g.m, dtype=bool)
    else:
        edge_mask = np.asarray(edge_mask, dtype=bool)
        if len(edge_mask) != g.m:
            raise MaskLengthMismatch(f'edge mask has length {len(edge_mask)}, graph has {g.m} edges')

    uf = UnionFind(g.n)

    for e, (i, j, _) in enumerate(g.edges()):
        if edge_mask[e] and node_mask[i] and node_mask[j]:
            uf.union(i, j)

    root_to_label = {}
    labels = []
    for v in range(g.n):
        if not node_mask[v]:
            labels.append(UNALLOCATED)
        else:
            root = uf.find(v)
            if root not in root_to_label:
                root_to_label[root] = len(root_to_label)
            labels.append(root_to_label[root])

    return Partition(labels)

def giant_component(g):
    ''' Induced subgraph on the largest connected component (ties: smallest node id). '''
    components = connected_components(g)
    largest = int(np.argmax(components.sizes))
    return g.subgraph(components.clusters[largest])
