''' Whole-graph descriptive statistics, computed on the unweighted structure. '''

import numpy as np

from decode.graph import UndefinedStatistic
from decode.union_find import connected_components

def graph_density(g):
    ''' Observed fraction of the n(n-1)/2 possible edges. '''
    if g.n < 2:
        raise UndefinedStatistic(f'density is undefined for {g.n} node(s)')

    return g.m / (g.n * (g.n - 1) / 2)

def triangle_count(g):
    A = g.adjacency_matrix
    # Each triangle contributes 6 to trace(A^3).
    closed_walks = (A @ A).multiply(A).sum()
    return int(round(closed_walks)) // 6

def connected_triples(g):
    d = g.degrees.astype(np.int64)
    return int(np.sum(d * (d - 1) // 2))

def global_transitivity(g):
    ''' 3 x triangles / connected triples. '''
    triples = connected_triples(g)

    if triples == 0:
        raise UndefinedStatistic('transitivity is undefined without a connected triple')

    return 3 * triangle_count(g) / triples

def degree_centralization(g):
    ''' Freeman degree centralization: sum(d_max - d_v) / ((n - 1)(n - 2)). '''
    if g.n < 3:
        raise UndefinedStatistic(f'degree centralization is undefined for {g.n} node(s)')

    d = g.degrees
    return float(np.sum(d.max() - d)) / ((g.n - 1) * (g.n - 2))

def number_of_isolates(g):
    return int(np.sum(g.degrees == 0))

def number_of_components(g):
    return connected_components(g).num_clusters

def describe(g):
    ''' Summary row of descriptive statistics; undefined values are NaN. '''
    def or_nan(func):
        try:
            return func(g)
        except UndefinedStatistic:
            return np.nan

    row = {
        'nodes': g.n,
        'edges': g.m,
        'isolated nodes': number_of_isolates(g),
        'components': number_of_components(g),
        'network density': or_nan(graph_density),
        'global transitivity': or_nan(global_transitivity),
        'degree centralization': or_nan(degree_centralization),
    }

    return row
