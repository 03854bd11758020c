import logging
import math
from collections import Counter, defaultdict

import numpy as np
import pandas as pd

import hits.utilities

from decode.partition import UNALLOCATED

memoized_property = hits.utilities.memoized_property

UNALLOCATED_POLICIES = ('exclude', 'own_cluster')

class UnallocatedNodes(ValueError):
    pass

class ContingencyTable:
    ''' Co-occurrence counts of predicted (rows) and true (columns) clusters. '''

    def __init__(self, pred_labels, true_labels):
        pred_labels = np.asarray(pred_labels, dtype=int)
        true_labels = np.asarray(true_labels, dtype=int)

        if len(pred_labels) != len(true_labels):
            raise ValueError(f'{len(pred_labels)} predicted labels vs {len(true_labels)} true labels')

        pred_ids, pred_index = np.unique(pred_labels, return_inverse=True)
        true_ids, true_index = np.unique(true_labels, return_inverse=True)

        self.pred_ids = pred_ids
        self.true_ids = true_ids

        self.counts = np.zeros((len(pred_ids), len(true_ids)), dtype=int)
        np.add.at(self.counts, (pred_index, true_index), 1)

    @property
    def N(self):
        return int(self.counts.sum())

    @memoized_property
    def row_sums(self):
        return self.counts.sum(axis=1)

    @memoized_property
    def column_sums(self):
        return self.counts.sum(axis=0)

    def to_frame(self):
        return pd.DataFrame(self.counts, index=pd.Index(self.pred_ids, name='predicted'), columns=pd.Index(self.true_ids, name='true'))

def entropy(marginal, N):
    return -math.fsum(count / N * math.log(count / N) for count in marginal.tolist() if count > 0)

def mutual_information(table):
    N = table.N
    terms = []
    for (i, j), count in np.ndenumerate(table.counts):
        if count > 0:
            terms.append(count / N * math.log(count * N / (table.row_sums[i] * table.column_sums[j])))

    return math.fsum(terms)

def nmi_from_table(table):
    if table.N == 0:
        raise ValueError('no nodes to compare')

    H_pred = entropy(table.row_sums, table.N)
    H_true = entropy(table.column_sums, table.N)

    if H_pred == 0 and H_true == 0:
        return 1.0
    elif H_pred == 0 or H_true == 0:
        return 0.0

    value = 2 * mutual_information(table) / (H_pred + H_true)

    return min(max(value, 0.0), 1.0)

def comparable_labels(pred, truth, unallocated_policy):
    ''' Aligned label arrays for nodes that can be compared. '''
    if pred.n != truth.n:
        raise ValueError(f'partitions cover {pred.n} and {truth.n} nodes')

    if unallocated_policy not in UNALLOCATED_POLICIES:
        raise ValueError(f'unknown unallocated policy {unallocated_policy!r}')

    pred_labels = np.array(pred.labels)
    true_labels = np.array(truth.labels)

    # Nodes without a ground-truth label are never compared.
    keep = true_labels != UNALLOCATED

    if unallocated_policy == 'exclude':
        keep &= pred_labels != UNALLOCATED
    else:
        unallocated = np.flatnonzero(pred_labels == UNALLOCATED)
        pred_labels[unallocated] = pred.num_clusters + np.arange(len(unallocated))

    return pred_labels[keep], true_labels[keep]

def nmi(pred, truth, unallocated_policy='exclude'):
    ''' Normalized mutual information 2 I(pred; truth) / (H(pred) + H(truth)).

    Natural logarithms. If both sides put every node in one cluster the value
    is 1; if only one side does, it is 0.
    '''
    pred_labels, true_labels = comparable_labels(pred, truth, unallocated_policy)
    return nmi_from_table(ContingencyTable(pred_labels, true_labels))

def modularity(g, p):
    ''' Newman-Girvan modularity, weighted. '''
    if p.n != g.n:
        raise ValueError(f'partition covers {p.n} nodes, graph has {g.n}')

    if p.num_unallocated > 0:
        raise UnallocatedNodes(f'{p.num_unallocated} node(s) are unallocated; allocate them before computing modularity')

    W = g.total_weight
    if W == 0:
        raise ValueError('modularity is undefined for a graph without edges')

    labels = p.labels

    inside = np.zeros(p.num_clusters)
    same = labels[g.i] == labels[g.j]
    np.add.at(inside, labels[g.i][same], g.w[same])

    cluster_strength = np.zeros(p.num_clusters)
    np.add.at(cluster_strength, labels, g.strengths)

    return float(np.sum(inside / W - (cluster_strength / (2 * W))**2))

def gini_homogeneity(p, attribute):
    ''' Per cluster, one minus the Gini index of the attribute: sum of squared frequencies. '''
    if len(attribute) != p.n:
        raise ValueError(f'{len(attribute)} attribute values for {p.n} nodes')

    homogeneity = {}

    for c, members in enumerate(p.clusters):
        if len(members) == 0:
            logging.warning(f'cluster {c} is empty; skipping homogeneity')
            continue

        values = [attribute[v] for v in members]
        if any(value is None for value in values):
            raise ValueError(f'cluster {c} has members without an attribute value')

        counts = Counter(values)
        homogeneity[c] = math.fsum((count / len(values))**2 for count in counts.values())

    return homogeneity

def cluster_summary(p):
    ''' Number of clusters and the mean and standard deviation of their sizes. '''
    sizes = p.sizes[p.sizes > 0]

    return {
        'clusters': len(sizes),
        'unallocated': p.num_unallocated,
        'mean size': float(np.mean(sizes)) if len(sizes) > 0 else np.nan,
        'std size': float(np.std(sizes)) if len(sizes) > 0 else np.nan,
        'largest': int(sizes.max()) if len(sizes) > 0 else 0,
        'singletons': int(np.sum(sizes == 1)),
    }

def within_cluster_tie_share(g, p):
    ''' Per cluster, the mean over members of the share of their strength that stays inside the cluster.

    Members without edges are left out of the mean.
    '''
    if p.n != g.n:
        raise ValueError(f'partition covers {p.n} nodes, graph has {g.n}')

    inside = np.zeros(g.n)
    for i, j, w in g.edges():
        if p.labels[i] != UNALLOCATED and p.labels[i] == p.labels[j]:
            inside[i] += w
            inside[j] += w

    shares = defaultdict(list)
    for v in range(g.n):
        c = int(p.labels[v])
        if c != UNALLOCATED and g.strengths[v] > 0:
            shares[c].append(inside[v] / g.strengths[v])

    return {c: float(np.mean(shares[c])) for c in range(p.num_clusters) if len(shares[c]) > 0}

def evaluation_table(g, p, truth=None, attribute=None, unallocated_policy='exclude'):
    ''' One-row summary of a partition as a pandas Series. '''
    row = cluster_summary(p)

    if truth is not None:
        row['nmi'] = nmi(p, truth, unallocated_policy=unallocated_policy)

    if p.is_complete and g.total_weight > 0:
        row['modularity'] = modularity(g, p)
    else:
        row['modularity'] = np.nan

    if attribute is not None:
        homogeneity = gini_homogeneity(p, attribute)
        row['mean homogeneity'] = float(np.mean(list(homogeneity.values()))) if homogeneity else np.nan

    return pd.Series(row)
