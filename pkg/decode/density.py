''' Node-wise density measures used as the height function of the modal scan. '''

import heapq
import logging
import math
from collections import deque

import numpy as np

from decode import parallel

# Sources per betweenness work unit. Partial sums are combined in chunk order,
# so the result does not depend on how many processes run the chunks.
BETWEENNESS_CHUNK_SIZE = 32

# Length of a weighted edge in shortest paths: 1/w makes strong ties short,
# w treats weights as distances.
BETWEENNESS_LENGTHS = ('inverse', 'weight')

def ignore_kwargs(x, **kwargs):
    return x

class DensityVector:
    def __init__(self, values, measure, weighted=False, normalized=False):
        values = np.array(values, dtype=float)

        if values.ndim != 1:
            raise ValueError('density values must be one-dimensional')

        if not np.all(np.isfinite(values)):
            raise ValueError('density values must be finite')

        if np.any(values < 0):
            raise ValueError('density values must be nonnegative')

        self.values = values
        self.values.setflags(write=False)
        self.measure = measure
        self.weighted = weighted
        self.normalized = normalized

    def __len__(self):
        return len(self.values)

    def __getitem__(self, v):
        return self.values[v]

    def __repr__(self):
        return f'{type(self).__name__}(measure={self.measure!r}, weighted={self.weighted}, normalized={self.normalized}, n={len(self)})'

    def __eq__(self, other):
        if not isinstance(other, DensityVector):
            return NotImplemented

        return (np.array_equal(self.values, other.values)
                and self.measure == other.measure
                and self.weighted == other.weighted
                and self.normalized == other.normalized
               )

    def transformed(self, func):
        ''' Apply func elementwise, e.g. a monotone rescaling. '''
        return DensityVector([func(value) for value in self.values.tolist()],
                             self.measure,
                             weighted=self.weighted,
                             normalized=False,
                            )

    def check_matches(self, g):
        if len(self) != g.n:
            raise ValueError(f'density has {len(self)} values, graph has {g.n} nodes')

def degree_density(g, weighted=False):
    ''' Neighbor count, or strength (sum of incident weights) if weighted. '''
    if weighted:
        values = g.strengths
    else:
        values = g.degrees

    return DensityVector(values, 'degree', weighted=weighted)

def local_density(g, weighted=False):
    ''' Edge density (or weight mass per possible edge) of each closed neighborhood.

    For v with closed neighborhood of k nodes, the edges (or weights) inside it
    are divided by k(k-1)/2. Nodes without neighbors get 0.
    '''
    B = g.adjacency_matrix

    if weighted:
        X = g.weight_matrix
        to_neighbors = g.strengths
    else:
        X = B
        to_neighbors = g.degrees.astype(float)

    among_neighbors = np.asarray((B @ X).multiply(B).sum(axis=1)).ravel() / 2

    inside = to_neighbors + among_neighbors

    k = g.degrees + 1
    possible = k * (k - 1) / 2

    values = np.zeros(g.n)
    has_neighbors = possible > 0
    values[has_neighbors] = inside[has_neighbors] / possible[has_neighbors]

    return DensityVector(values, 'local_density', weighted=weighted)

def shortest_path_dag_unweighted(adjacency, s):
    ''' BFS from s: (nodes in nondecreasing distance, predecessor lists, path counts). '''
    n = len(adjacency)
    order = []
    predecessors = [[] for _ in range(n)]
    sigma = [0.0] * n
    distance = [-1] * n

    sigma[s] = 1.0
    distance[s] = 0

    queue = deque([s])

    while queue:
        v = queue.popleft()
        order.append(v)

        for w, _, _ in adjacency[v]:
            if distance[w] < 0:
                distance[w] = distance[v] + 1
                queue.append(w)

            if distance[w] == distance[v] + 1:
                sigma[w] += sigma[v]
                predecessors[w].append(v)

    return order, predecessors, sigma

def shortest_path_dag_weighted(adjacency, s, length='inverse'):
    ''' Dijkstra from s with edge length 1/w, or w itself if length is 'weight'.

    Heap entries are (distance, node, predecessor), so equal tentative
    distances are settled in node id order.
    '''
    n = len(adjacency)
    order = []
    predecessors = [[] for _ in range(n)]
    sigma = [0.0] * n
    settled = [False] * n
    tentative = {}

    sigma[s] = 1.0
    tentative[s] = 0.0

    heap = [(0.0, s, s)]

    while heap:
        distance, v, predecessor = heapq.heappop(heap)

        if settled[v]:
            continue

        if v != s:
            sigma[v] += sigma[predecessor]

        settled[v] = True
        order.append(v)

        for w, weight, _ in adjacency[v]:
            if length == 'inverse':
                vw_distance = distance + 1 / weight
            else:
                vw_distance = distance + weight

            if not settled[w] and (w not in tentative or vw_distance < tentative[w]):
                tentative[w] = vw_distance
                heapq.heappush(heap, (vw_distance, w, v))
                sigma[w] = 0.0
                predecessors[w] = [v]
            elif vw_distance == tentative[w]:
                sigma[w] += sigma[v]
                predecessors[w].append(v)

    return order, predecessors, sigma

def betweenness_partial(g, sources, weighted, length='inverse'):
    ''' Brandes dependency accumulation summed over sources (ordered pairs). '''
    adjacency = g.adjacency

    if weighted:
        def shortest_path_dag(adjacency, s):
            return shortest_path_dag_weighted(adjacency, s, length=length)
    else:
        shortest_path_dag = shortest_path_dag_unweighted

    totals = [0.0] * g.n

    for s in sources:
        order, predecessors, sigma = shortest_path_dag(adjacency, s)

        dependency = [0.0] * g.n

        while order:
            w = order.pop()
            coefficient = (1 + dependency[w]) / sigma[w]
            for v in predecessors[w]:
                dependency[v] += sigma[v] * coefficient

            if w != s:
                totals[w] += dependency[w]

    return np.array(totals)

def betweenness_density(g, weighted=False, processes=1, progress=None, length='inverse'):
    ''' Raw shortest-path betweenness, counting each unordered pair once.

    Weighted graphs use edge length 1/w, so strong ties are short, or w if
    length is 'weight'.
    '''
    if length not in BETWEENNESS_LENGTHS:
        raise ValueError(f'unknown betweenness length {length!r}; choose from {", ".join(BETWEENNESS_LENGTHS)}')

    if progress is None or getattr(progress, '_silent', False):
        progress = ignore_kwargs

    chunks = [list(range(start, min(start + BETWEENNESS_CHUNK_SIZE, g.n)))
              for start in range(0, g.n, BETWEENNESS_CHUNK_SIZE)
             ]

    if processes is not None and processes > 1:
        logging.info(f'Computing betweenness over {g.n} sources with {processes} processes')
        partials = parallel.starmap(betweenness_partial, [(g, chunk, weighted, length) for chunk in chunks], processes=processes)
    else:
        partials = [betweenness_partial(g, chunk, weighted, length) for chunk in progress(chunks, desc='Betweenness')]

    totals = np.zeros(g.n)
    for partial in partials:
        totals += partial

    # Undirected: every pair was counted from both of its ends.
    return DensityVector(totals / 2, 'betweenness', weighted=weighted)

def normalize(d):
    ''' Values divided by their sum. An all-zero vector is returned unchanged. '''
    total = math.fsum(d.values.tolist())

    if total == 0:
        return DensityVector(d.values, d.measure, weighted=d.weighted, normalized=False)

    return DensityVector(d.values / total, d.measure, weighted=d.weighted, normalized=True)

MEASURES = {
    'degree': degree_density,
    'local_density': local_density,
    'betweenness': betweenness_density,
}

PARALLEL_MEASURES = {'betweenness'}

def compute_density(g, measure, weighted=False, normalized=False, processes=1, progress=None, betweenness_length='inverse'):
    if measure not in MEASURES:
        raise ValueError(f'unknown measure {measure!r}; choose from {", ".join(MEASURES)}')

    kwargs = {}
    if measure in PARALLEL_MEASURES:
        kwargs = dict(processes=processes, progress=progress, length=betweenness_length)

    d = MEASURES[measure](g, weighted=weighted, **kwargs)

    if normalized:
        d = normalize(d)

    return d
