import math
import re
from collections import defaultdict
from pathlib import Path

import numpy as np
import pandas as pd
import scipy.sparse

import hits.utilities

memoized_property = hits.utilities.memoized_property

class GraphFormatError(ValueError):
    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f'line {line_number}: {message}'

        super().__init__(message)

        self.line_number = line_number

class NegativeWeight(GraphFormatError):
    pass

class ZeroWeight(GraphFormatError):
    pass

class SelfLoop(GraphFormatError):
    pass

class DuplicateEdge(GraphFormatError):
    pass

class NodeSetMismatch(ValueError):
    pass

class UndefinedStatistic(ValueError):
    pass

def check_weight(w, line_number=None):
    if not math.isfinite(w):
        raise GraphFormatError(f'non-finite weight {w}', line_number)
    elif w < 0:
        raise NegativeWeight(f'negative weight {w}', line_number)
    elif w == 0:
        raise ZeroWeight('zero weight (absent links must be omitted)', line_number)

class Graph:
    ''' Immutable undirected weighted graph on nodes 0..n-1.

    Each edge is stored once as (i, j, w) with i < j, in sorted order.
    Binary graphs are the special case where every w is 1.
    '''

    def __init__(self, n, edges, names=None):
        self.n = int(n)

        if names is not None:
            names = [str(name) for name in names]
            if len(names) != self.n:
                raise ValueError(f'{len(names)} names given for {self.n} nodes')
            if len(set(names)) != self.n:
                raise ValueError('node names are not unique')

        self.names = names

        canonical = {}

        for i, j, w in edges:
            i = int(i)
            j = int(j)
            w = float(w)

            if not (0 <= i < self.n and 0 <= j < self.n):
                raise GraphFormatError(f'edge ({i}, {j}) refers to a node outside 0..{self.n - 1}')

            if i == j:
                raise SelfLoop(f'self-loop on node {self.node_label(i)}')

            check_weight(w)

            key = (min(i, j), max(i, j))
            if key in canonical:
                raise DuplicateEdge(f'duplicate edge {self.node_label(key[0])} - {self.node_label(key[1])}')

            canonical[key] = w

        keys = sorted(canonical)

        self.i = np.array([i for i, j in keys], dtype=int)
        self.j = np.array([j for i, j in keys], dtype=int)
        self.w = np.array([canonical[key] for key in keys], dtype=float)

        for array in [self.i, self.j, self.w]:
            array.setflags(write=False)

    def __repr__(self):
        return f'{type(self).__name__}(n={self.n}, m={self.m})'

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented

        return (self.n == other.n
                and self.names == other.names
                and np.array_equal(self.i, other.i)
                and np.array_equal(self.j, other.j)
                and np.array_equal(self.w, other.w)
               )

    @property
    def m(self):
        return len(self.w)

    def edges(self):
        return zip(self.i.tolist(), self.j.tolist(), self.w.tolist())

    def node_label(self, v):
        if self.names is None:
            return str(v)
        else:
            return self.names[v]

    @memoized_property
    def name_to_id(self):
        if self.names is None:
            return {str(v): v for v in range(self.n)}
        else:
            return {name: v for v, name in enumerate(self.names)}

    @memoized_property
    def adjacency(self):
        ''' Per node, a list of (neighbor, weight, edge index). '''
        adjacency = [[] for _ in range(self.n)]

        for e, (i, j, w) in enumerate(self.edges()):
            adjacency[i].append((j, w, e))
            adjacency[j].append((i, w, e))

        return adjacency

    @memoized_property
    def neighbors(self):
        return [[v for v, _, _ in incident] for incident in self.adjacency]

    @memoized_property
    def degrees(self):
        return np.bincount(np.concatenate([self.i, self.j]), minlength=self.n)

    @memoized_property
    def strengths(self):
        return np.bincount(np.concatenate([self.i, self.j]),
                           weights=np.concatenate([self.w, self.w]),
                           minlength=self.n,
                          )

    @memoized_property
    def total_weight(self):
        return math.fsum(self.w.tolist())

    @memoized_property
    def is_binary(self):
        return bool(np.all(self.w == 1))

    @memoized_property
    def weight_matrix(self):
        ''' Symmetric sparse matrix of edge weights. '''
        rows = np.concatenate([self.i, self.j])
        cols = np.concatenate([self.j, self.i])
        data = np.concatenate([self.w, self.w])
        return scipy.sparse.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    @memoized_property
    def adjacency_matrix(self):
        ''' Symmetric sparse 0/1 matrix. '''
        binary = self.weight_matrix.copy()
        binary.data[:] = 1
        return binary

    def edge_weight(self, u, v):
        for neighbor, w, _ in self.adjacency[u]:
            if neighbor == v:
                return w

        return None

    def with_weights(self, weights):
        weights = np.asarray(weights, dtype=float)
        if len(weights) != self.m:
            raise ValueError(f'{len(weights)} weights given for {self.m} edges')

        edges = zip(self.i.tolist(), self.j.tolist(), weights.tolist())
        return Graph(self.n, edges, names=self.names)

    def binarized(self):
        return self.with_weights(np.ones(self.m))

    def subgraph(self, node_ids):
        ''' Induced subgraph on node_ids, keeping their relative order and names. '''
        node_ids = sorted(set(int(v) for v in node_ids))
        new_id = {v: k for k, v in enumerate(node_ids)}

        edges = [(new_id[i], new_id[j], w) for i, j, w in self.edges() if i in new_id and j in new_id]

        if self.names is None:
            names = [str(v) for v in node_ids]
        else:
            names = [self.names[v] for v in node_ids]

        return Graph(len(node_ids), edges, names=names)

    def reindexed(self, names):
        ''' The same graph with node ids reassigned to follow the order of names. '''
        names = [str(name) for name in names]

        if sorted(names) != sorted(self.name_to_id):
            raise NodeSetMismatch('node names differ')

        new_id = {self.name_to_id[name]: k for k, name in enumerate(names)}
        edges = [(new_id[i], new_id[j], w) for i, j, w in self.edges()]

        return Graph(self.n, edges, names=names)

def split_fields(line):
    return [field for field in re.split(r'[,\s]+', line.strip()) if field != '']

def parse_edge_lines(lines, weighted=False):
    names = []
    name_to_id = {}
    edges = []
    seen = set()

    def get_id(name):
        if name not in name_to_id:
            name_to_id[name] = len(names)
            names.append(name)
        return name_to_id[name]

    for line_number, line in enumerate(lines, 1):
        if line.strip() == '' or line.lstrip().startswith('#'):
            continue

        fields = split_fields(line)

        if len(fields) not in (2, 3):
            raise GraphFormatError(f'expected "src dst [weight]", got {line.strip()!r}', line_number)

        if weighted and len(fields) != 3:
            raise GraphFormatError('missing weight column', line_number)

        w = 1.0

        if len(fields) == 3:
            try:
                given = float(fields[2])
            except ValueError:
                raise GraphFormatError(f'unparseable weight {fields[2]!r}', line_number)

            # Checked even when weights are ignored.
            check_weight(given, line_number)

            if weighted:
                w = given

        src, dst = fields[:2]

        if src == dst:
            raise SelfLoop(f'self-loop on node {src}', line_number)

        i = get_id(src)
        j = get_id(dst)

        key = (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateEdge(f'duplicate edge {src} - {dst}', line_number)
        seen.add(key)

        edges.append((i, j, w))

    if len(edges) == 0:
        raise GraphFormatError('no edges found')

    return Graph(len(names), edges, names=names)

def load_edge_list(path, weighted=False):
    ''' Load a whitespace- or comma-separated edge list of `src dst [weight]` lines.

    Nodes are numbered in order of first appearance and keep their tokens as names.
    Blank lines and lines starting with '#' are skipped.
    '''
    with Path(path).open() as fh:
        return parse_edge_lines(fh, weighted=weighted)

def format_weight(w):
    # repr round-trips float64 exactly.
    return repr(float(w))

def edge_list_lines(g, weighted=True):
    for i, j, w in g.edges():
        fields = [g.node_label(i), g.node_label(j)]
        if weighted:
            fields.append(format_weight(w))
        yield '\t'.join(fields) + '\n'

def write_edge_list(g, path_or_fh, weighted=True):
    ''' Write g as a canonical edge list sorted by (i, j) node id. '''
    if hasattr(path_or_fh, 'write'):
        path_or_fh.writelines(edge_list_lines(g, weighted=weighted))
    else:
        with Path(path_or_fh).open('w') as fh:
            fh.writelines(edge_list_lines(g, weighted=weighted))

def load_node_labels(path, g):
    ''' Read a `node,label` CSV into a per-node list of labels (None where absent). '''
    df = pd.read_csv(path, dtype=str, keep_default_na=False)

    missing_columns = {'node', 'label'} - set(df.columns)
    if missing_columns:
        raise GraphFormatError(f'{path} is missing column(s): {", ".join(sorted(missing_columns))}')

    labels = [None for _ in range(g.n)]
    seen = set()

    for row_number, (node, label) in enumerate(zip(df['node'], df['label']), 2):
        if node not in g.name_to_id:
            raise GraphFormatError(f'unknown node {node!r} in {path}', row_number)

        if node in seen:
            raise GraphFormatError(f'node {node!r} is labelled more than once in {path}', row_number)

        seen.add(node)

        labels[g.name_to_id[node]] = label if label != '' else None

    return labels

def edges_by_key(graphs):
    ''' {(i, j): [weight in each graph that has the edge]} '''
    by_key = defaultdict(list)
    for g in graphs:
        for i, j, w in g.edges():
            by_key[i, j].append(w)
    return by_key
