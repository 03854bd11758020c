from collections import Counter

import numpy as np

import hits.utilities

memoized_property = hits.utilities.memoized_property

UNALLOCATED = -1

PROVENANCES = ('core', 'allocated', 'singleton')

class Partition:
    ''' Assignment of each node to a cluster id in 0..K-1, or UNALLOCATED.

    provenance records, per node, how the label was obtained
    ('core', 'allocated', 'singleton') or None when unallocated or unknown.
    '''

    def __init__(self, labels, provenance=None, num_clusters=None):
        labels = np.array(labels, dtype=int)

        if labels.ndim != 1:
            raise ValueError('labels must be one-dimensional')

        if np.any(labels < UNALLOCATED):
            raise ValueError('negative cluster ids other than UNALLOCATED')

        allocated = labels[labels != UNALLOCATED]

        if num_clusters is None:
            num_clusters = int(allocated.max()) + 1 if len(allocated) > 0 else 0
        elif len(allocated) > 0 and allocated.max() >= num_clusters:
            raise ValueError(f'cluster id {allocated.max()} out of range for {num_clusters} clusters')

        self.labels = labels
        self.labels.setflags(write=False)
        self.num_clusters = num_clusters

        if provenance is None:
            provenance = [None for _ in labels]
        else:
            provenance = list(provenance)
            if len(provenance) != len(labels):
                raise ValueError('provenance length differs from labels length')

            for v, (label, source) in enumerate(zip(labels, provenance)):
                if label == UNALLOCATED and source is not None:
                    raise ValueError(f'node {v} is unallocated but has provenance {source}')
                if source is not None and source not in PROVENANCES:
                    raise ValueError(f'unknown provenance {source!r}')

        self.provenance = provenance

    @classmethod
    def from_labels(cls, values):
        ''' Dense ids assigned in order of first appearance; None means unallocated. '''
        ids = {}
        labels = []
        for value in values:
            if value is None:
                labels.append(UNALLOCATED)
            else:
                if value not in ids:
                    ids[value] = len(ids)
                labels.append(ids[value])

        return cls(labels)

    @classmethod
    def unallocated(cls, n):
        return cls([UNALLOCATED] * n)

    def __len__(self):
        return len(self.labels)

    @property
    def n(self):
        return len(self.labels)

    def __repr__(self):
        return f'{type(self).__name__}(n={self.n}, clusters={self.num_clusters}, unallocated={self.num_unallocated})'

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented

        return (np.array_equal(self.labels, other.labels)
                and self.num_clusters == other.num_clusters
                and self.provenance == other.provenance
               )

    @memoized_property
    def clusters(self):
        ''' List of sorted member arrays, indexed by cluster id. '''
        order = np.argsort(self.labels, kind='stable')
        sorted_labels = self.labels[order]
        clusters = []
        for c in range(self.num_clusters):
            start, end = np.searchsorted(sorted_labels, [c, c + 1])
            clusters.append(np.sort(order[start:end]))
        return clusters

    @memoized_property
    def sizes(self):
        return np.array([len(members) for members in self.clusters], dtype=int)

    @memoized_property
    def unallocated_nodes(self):
        return np.flatnonzero(self.labels == UNALLOCATED)

    @property
    def num_unallocated(self):
        return len(self.unallocated_nodes)

    @property
    def is_complete(self):
        return self.num_unallocated == 0

    def provenance_counts(self):
        return Counter(source for source in self.provenance if source is not None)

    def canonical(self):
        ''' Labels renumbered by order of first appearance (provenance dropped). '''
        return Partition.from_labels([None if label == UNALLOCATED else int(label) for label in self.labels])

    def same_grouping(self, other):
        return np.array_equal(self.canonical().labels, other.canonical().labels)

    def member_sets(self, g=None):
        ''' Set of frozensets of members, by name if g is given. '''
        if g is None:
            label = int
        else:
            label = g.node_label

        return {frozenset(label(v) for v in members) for members in self.clusters}
