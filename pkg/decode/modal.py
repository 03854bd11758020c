''' Modal clustering on networks.

Nodes are admitted in descending order of their density. At each level the
connected components of the admitted subgraph are recorded in a ClusterTree:
a component born without any previously admitted node is a new leaf, and
components that join form an internal node. Leaves are the cluster cores.
Nodes admitted at the level where components join stay with the internal node
unless the higher_birth merge rule hands them to one of the joining components.

In the weighted scan an edge is admitted only when it is currently the
strongest unexamined edge of both endpoints (AND) or of at least one (OR).
'''

import json
import logging
from collections import defaultdict

import numpy as np

from decode.partition import Partition, UNALLOCATED
from decode.union_find import UnionFind

OPTIONS = ('and', 'or')

ALLOCATION_RULES = ('connection', 'mode')

# Where nodes admitted exactly at a merge level go: the new internal node, or
# the merging component whose root was born highest (ties: lower tree node id).
MERGE_RULES = ('parent', 'higher_birth')

TIE_RULES = ('neighbor', 'size')

class DegenerateDensity(ValueError):
    pass

class TreeNode:
    def __init__(self, id, birth_level, members, merge_level=None, parent=None, children=None):
        self.id = id
        self.birth_level = birth_level
        self.merge_level = merge_level
        self.parent = parent
        self.children = [] if children is None else list(children)
        self.members = sorted(members)

    @property
    def kind(self):
        if len(self.children) == 0:
            return 'leaf'
        elif self.parent is None:
            return 'root'
        else:
            return 'internal'

    @property
    def is_leaf(self):
        return len(self.children) == 0

    def to_dict(self):
        return {
            'id': self.id,
            'kind': self.kind,
            'birth_level': self.birth_level,
            'merge_level': self.merge_level,
            'parent': self.parent,
            'children': list(self.children),
            'members': list(self.members),
        }

    @classmethod
    def from_dict(cls, d):
        node = cls(d['id'], d['birth_level'], d['members'],
                   merge_level=d['merge_level'],
                   parent=d['parent'],
                   children=d['children'],
                  )

        if node.kind != d['kind']:
            raise ValueError(f'tree node {node.id} is recorded as {d["kind"]} but has the shape of a {node.kind}')

        return node

    def __eq__(self, other):
        if not isinstance(other, TreeNode):
            return NotImplemented

        return self.to_dict() == other.to_dict()

    def __repr__(self):
        return f'TreeNode({self.id}, {self.kind}, birth={self.birth_level}, merge={self.merge_level}, members={self.members})'

class ClusterTree:
    ''' Hierarchy of components over descending density levels.

    Tree nodes are numbered in order of creation. A tree node's members are the
    graph nodes absorbed while it was a separate component; under the
    higher_birth merge rule, nodes admitted at a merge level are absorbed by one
    of the merging components instead of the new internal node. Without a merge at
    the bottom, the tree is a forest with one root per final component.
    levels holds (level, number of components) for each scanned level.
    '''

    def __init__(self, n, nodes, levels):
        self.n = n
        self.nodes = list(nodes)
        self.levels = [(float(level), int(count)) for level, count in levels]

    def __eq__(self, other):
        if not isinstance(other, ClusterTree):
            return NotImplemented

        return self.n == other.n and self.nodes == other.nodes and self.levels == other.levels

    def __repr__(self):
        return f'ClusterTree(n={self.n}, leaves={len(self.leaves)}, tree nodes={len(self.nodes)}, levels={len(self.levels)})'

    def __len__(self):
        return len(self.nodes)

    @property
    def leaves(self):
        return [node for node in self.nodes if node.is_leaf]

    @property
    def roots(self):
        return [node for node in self.nodes if node.parent is None]

    @property
    def num_leaves(self):
        return len(self.leaves)

    def subtree_members(self, tree_node_id):
        ''' All graph nodes in the component represented by a tree node. '''
        members = []
        to_visit = [tree_node_id]
        while to_visit:
            node = self.nodes[to_visit.pop()]
            members.extend(node.members)
            to_visit.extend(node.children)

        return sorted(members)

    def admitted_nodes(self):
        return sorted(v for node in self.nodes for v in node.members)

    def components_at(self, level):
        ''' Number of components once every node with density >= level is admitted. '''
        return sum(1 for node in self.nodes
                   if node.birth_level >= level and (node.merge_level is None or node.merge_level < level)
                  )

    def validate(self):
        seen = set()

        for node in self.nodes:
            overlap = seen & set(node.members)
            if overlap:
                raise ValueError(f'graph node(s) {sorted(overlap)} belong to more than one tree node')
            seen.update(node.members)

            if node.parent is not None:
                parent = self.nodes[node.parent]

                if node.id not in parent.children:
                    raise ValueError(f'tree node {node.id} is not listed as a child of {parent.id}')

                if node.merge_level is None or node.merge_level > node.birth_level:
                    raise ValueError(f'tree node {node.id} merges at {node.merge_level} after birth at {node.birth_level}')

                if node.merge_level != parent.birth_level:
                    raise ValueError(f'tree node {node.id} merges at {node.merge_level} but its parent is born at {parent.birth_level}')

        for level, count in self.levels:
            if self.components_at(level) != count:
                raise ValueError(f'{count} components recorded at level {level}, tree gives {self.components_at(level)}')

class TreeBuilder:
    ''' Incremental construction of a ClusterTree from a union-find over graph nodes. '''

    def __init__(self, n, merge_rule='parent'):
        if merge_rule not in MERGE_RULES:
            raise ValueError(f'unknown merge rule {merge_rule!r}; choose from {", ".join(MERGE_RULES)}')

        self.uf = UnionFind(n)
        self.n = n
        self.merge_rule = merge_rule
        self.nodes = []
        self.levels = []
        # tree node id -> any graph node in its component
        self.active = {}
        self.min_node = {}

    def new_tree_node(self, level, members, children=()):
        node = TreeNode(len(self.nodes), level, members, children=children)
        self.nodes.append(node)

        for child in children:
            self.nodes[child].parent = node.id
            self.nodes[child].merge_level = level

        return node

    def close_level(self, level, new_nodes):
        ''' Record the components after nodes in new_nodes (and any new unions) at level. '''
        olds_by_root = defaultdict(list)
        news_by_root = defaultdict(list)

        for tree_node_id, representative in self.active.items():
            olds_by_root[self.uf.find(representative)].append(tree_node_id)

        for v in new_nodes:
            news_by_root[self.uf.find(v)].append(v)

        def group_min(root):
            candidates = [self.min_node[t] for t in olds_by_root[root]] + news_by_root[root]
            return min(candidates)

        roots = sorted(set(olds_by_root) | set(news_by_root), key=group_min)

        active = {}

        for root in roots:
            olds = sorted(olds_by_root[root], key=lambda t: self.min_node[t])
            news = news_by_root[root]

            if len(olds) == 0:
                node = self.new_tree_node(level, news)
                active[node.id] = news[0]
            elif len(olds) == 1:
                node = self.nodes[olds[0]]
                node.members = sorted(node.members + news)
                active[node.id] = self.active[olds[0]]
            else:
                if self.merge_rule == 'higher_birth':
                    heir = min(olds, key=lambda t: (-self.nodes[t].birth_level, t))
                    self.nodes[heir].members = sorted(self.nodes[heir].members + news)
                    news = []

                node = self.new_tree_node(level, news, children=olds)
                active[node.id] = self.active[olds[0]]

            self.min_node[node.id] = group_min(root)

        self.active = active
        self.levels.append((level, len(active)))

    def tree(self):
        return ClusterTree(self.n, self.nodes, self.levels)

def level_grid(d):
    ''' Distinct positive density values, descending. '''
    values = np.unique(d.values)
    values = values[values > 0][::-1]

    if len(values) == 0:
        raise DegenerateDensity(f'all {d.measure} densities are zero')

    return [float(value) for value in values]

def nodes_by_level(d, levels):
    by_level = defaultdict(list)
    for v, value in enumerate(d.values.tolist()):
        if value > 0:
            by_level[value].append(v)

    return [(level, by_level[level]) for level in levels]

def cluster_unweighted(g, d, merge_rule='parent'):
    ''' Level-set scan admitting every edge between admitted nodes. Returns (tree, cores). '''
    d.check_matches(g)

    levels = level_grid(d)

    builder = TreeBuilder(g.n, merge_rule=merge_rule)
    admitted = np.zeros(g.n, dtype=bool)

    for level, new_nodes in nodes_by_level(d, levels):
        admitted[new_nodes] = True

        for v in new_nodes:
            for neighbor in g.neighbors[v]:
                if admitted[neighbor]:
                    builder.uf.union(v, neighbor)

        builder.close_level(level, new_nodes)

    tree = builder.tree()

    logging.info(f'{d.measure} scan: {len(levels)} levels, {tree.num_leaves} leaves')

    return tree, extract_cores(tree)

class MaxEdgePointer:
    ''' Per node, the strongest incident edge not yet examined.

    Incident edges are kept sorted by descending weight (then neighbor id); each
    node's position only moves forward past examined edges.
    '''

    def __init__(self, g):
        self.incident = [sorted(incident, key=lambda nbr_w_e: (-nbr_w_e[1], nbr_w_e[0]))
                         for incident in g.adjacency
                        ]
        self.position = [0] * g.n
        self.examined = np.zeros(g.m, dtype=bool)

    def advance(self, v):
        incident = self.incident[v]
        position = self.position[v]
        while position < len(incident) and self.examined[incident[position][2]]:
            position += 1
        self.position[v] = position
        return position

    def current(self, v):
        ''' Weight of v's strongest unexamined edge, or None if every edge is examined. '''
        position = self.advance(v)
        if position == len(self.incident[v]):
            return None
        else:
            return self.incident[v][position][1]

    def tied_edges(self, v):
        ''' (neighbor, edge index) for every unexamined edge of v at the current maximum. '''
        current = self.current(v)
        if current is None:
            return []

        tied = []
        for neighbor, w, e in self.incident[v][self.position[v]:]:
            if w != current:
                break
            if not self.examined[e]:
                tied.append((neighbor, e))

        return tied

    def examine(self, e):
        self.examined[e] = True

def admissible_edges(g, pointer, dirty, admitted, option):
    candidates = set()

    for u in sorted(dirty):
        if not admitted[u]:
            continue

        for v, e in pointer.tied_edges(u):
            if not admitted[v]:
                continue

            if option == 'or' or pointer.current(v) == g.w[e]:
                candidates.add(e)

    return sorted(candidates)

def cluster_weighted(g, d, option='and', single_pass=False, final_pass=True, merge_rule='parent'):
    ''' Level-set scan admitting only edges that are strongest for their endpoints.

    With single_pass, each level gets one admission pass and nodes whose edges
    changed are carried to the next level. Otherwise admission repeats until no
    edge qualifies. With final_pass, edges still unexamined among admitted nodes
    are joined after the last level regardless of weight; any resulting merges
    are recorded at level 0.
    '''
    option = option.lower()
    if option not in OPTIONS:
        raise ValueError(f'unknown option {option!r}; choose from {", ".join(OPTIONS)}')

    d.check_matches(g)

    levels = level_grid(d)

    builder = TreeBuilder(g.n, merge_rule=merge_rule)
    pointer = MaxEdgePointer(g)
    admitted = np.zeros(g.n, dtype=bool)
    carried = set()

    for level, new_nodes in nodes_by_level(d, levels):
        admitted[new_nodes] = True

        dirty = set(carried)
        for v in new_nodes:
            dirty.add(v)
            dirty.update(neighbor for neighbor in g.neighbors[v] if admitted[neighbor])

        carried = set()

        while dirty:
            candidates = admissible_edges(g, pointer, dirty, admitted, option)

            dirty = set()
            for e in candidates:
                pointer.examine(e)
                i, j = int(g.i[e]), int(g.j[e])
                builder.uf.union(i, j)
                dirty.update((i, j))

            if single_pass:
                carried = dirty
                break

        builder.close_level(level, new_nodes)

    if final_pass:
        merged = False
        for e, (i, j, _) in enumerate(g.edges()):
            if admitted[i] and admitted[j] and not pointer.examined[e]:
                merged |= builder.uf.union(i, j)

        if merged:
            builder.close_level(0.0, [])

    tree = builder.tree()

    logging.info(f'{d.measure} {option.upper()} scan: {len(levels)} levels, {tree.num_leaves} leaves')

    return tree, extract_cores(tree)

def extract_cores(t):
    ''' Partition whose clusters are the leaves' members.

    A core holds the nodes its leaf absorbed before merging. Nodes admitted at
    the merge level itself belong to the internal node (and are left for
    allocation) unless the tree was built with the higher_birth merge rule.
    Cluster ids follow descending birth level, then smallest member.
    '''
    leaves = sorted(t.leaves, key=lambda node: (-node.birth_level, node.members[0]))

    labels = [UNALLOCATED] * t.n
    provenance = [None] * t.n

    for cluster_id, leaf in enumerate(leaves):
        for v in leaf.members:
            labels[v] = cluster_id
            provenance[v] = 'core'

    return Partition(labels, provenance=provenance, num_clusters=len(leaves))

def cluster_modes(d, p):
    ''' Highest density among each cluster's members. '''
    modes = np.zeros(p.num_clusters)
    for c, members in enumerate(p.clusters):
        if len(members) > 0:
            modes[c] = d.values[members].max()

    return modes

def add_singletons(labels, provenance, nodes, num_clusters):
    for v in sorted(nodes):
        labels[v] = num_clusters
        provenance[v] = 'singleton'
        num_clusters += 1

    return num_clusters

def allocate_isolates_only(g, p):
    ''' Each node without edges that is still unallocated becomes a singleton cluster. '''
    labels = [int(label) for label in p.labels]
    provenance = list(p.provenance)

    isolates = [v for v in range(g.n) if labels[v] == UNALLOCATED and g.degrees[v] == 0]
    num_clusters = add_singletons(labels, provenance, isolates, p.num_clusters)
    return Partition(labels, provenance=provenance, num_clusters=num_clusters)

def allocate(g, d, p, rule='connection', allocate_isolates=False, tie_rule='neighbor'):
    ''' Assign unallocated nodes to existing clusters.

    Nodes are visited in descending density (ties: lower id) and passes repeat
    until nothing changes, so chains of peripheral nodes are absorbed inward.
    Under the 'connection' rule a node joins the cluster it has the most edge
    weight to; under 'mode' it joins the adjacent cluster with the densest mode.

    A node whose best clusters tie waits for a later pass. If a whole pass
    assigns nothing, the first waiting node is placed by tie_rule: 'neighbor'
    prefers the tied cluster holding its densest labelled neighbour, then the
    larger cluster; 'size' goes straight to the larger cluster. Remaining ties
    go to the lower cluster id.

    Nodes that never reach a labelled neighbour become singleton clusters;
    nodes without edges do so only if allocate_isolates.
    '''
    if rule not in ALLOCATION_RULES:
        raise ValueError(f'unknown allocation rule {rule!r}; choose from {", ".join(ALLOCATION_RULES)}')

    if tie_rule not in TIE_RULES:
        raise ValueError(f'unknown tie rule {tie_rule!r}; choose from {", ".join(TIE_RULES)}')

    d.check_matches(g)

    if p.num_clusters == 0:
        raise ValueError('no cluster cores to allocate to')

    values = d.values.tolist()
    labels = [int(label) for label in p.labels]
    provenance = list(p.provenance)
    sizes = [int(size) for size in p.sizes]
    modes = cluster_modes(d, p).tolist()

    def scores(v):
        totals = defaultdict(float)
        for neighbor, w, _ in g.adjacency[v]:
            c = labels[neighbor]
            if c == UNALLOCATED:
                continue

            if rule == 'connection':
                totals[c] += w
            else:
                totals[c] = modes[c]

        return totals

    def winners(v):
        totals = scores(v)
        if len(totals) == 0:
            return []

        best = max(totals.values())
        return sorted(c for c, total in totals.items() if total == best)

    def assign(v, c):
        labels[v] = c
        provenance[v] = 'allocated'
        sizes[c] += 1

    def break_tie(v, tied):
        if tie_rule == 'size':
            return max(tied, key=lambda c: (sizes[c], -c))

        neighbor_density = defaultdict(float)
        for neighbor in g.neighbors[v]:
            c = labels[neighbor]
            if c in tied:
                neighbor_density[c] = max(neighbor_density[c], values[neighbor])

        return max(tied, key=lambda c: (neighbor_density[c], sizes[c], -c))

    pending = sorted((v for v in range(g.n) if labels[v] == UNALLOCATED and g.degrees[v] > 0),
                     key=lambda v: (-values[v], v),
                    )

    while pending:
        waiting = []
        progress = False

        for v in pending:
            best = winners(v)
            if len(best) == 1:
                assign(v, best[0])
                progress = True
            else:
                waiting.append(v)

        if not progress:
            for v in waiting:
                best = winners(v)
                if len(best) > 1:
                    assign(v, break_tie(v, best))
                    waiting.remove(v)
                    progress = True
                    break

        pending = waiting

        if not progress:
            break

    unreachable = pending
    if len(unreachable) > 0:
        logging.info(f'{len(unreachable)} node(s) have no path to a cluster core and become singletons')

    num_clusters = add_singletons(labels, provenance, unreachable, p.num_clusters)

    if allocate_isolates:
        isolates = [v for v in range(g.n) if labels[v] == UNALLOCATED]
        num_clusters = add_singletons(labels, provenance, isolates, num_clusters)

    return Partition(labels, provenance=provenance, num_clusters=num_clusters)

def tree_to_json(t):
    ''' Deterministic JSON text; tree_from_json inverts it exactly. '''
    data = {
        'n': t.n,
        'levels': [[level, count] for level, count in t.levels],
        'nodes': [node.to_dict() for node in t.nodes],
    }

    return json.dumps(data, sort_keys=True, indent=1) + '\n'

def tree_from_json(text):
    data = json.loads(text)

    nodes = [TreeNode.from_dict(d) for d in data['nodes']]

    for k, node in enumerate(nodes):
        if node.id != k:
            raise ValueError(f'tree node at position {k} has id {node.id}')

    return ClusterTree(data['n'], nodes, data['levels'])

def tree_to_dot(t, g=None):
    ''' Graphviz DOT text, parents above children. '''
    def format_level(level):
        return f'{level:.6g}'

    lines = ['digraph cluster_tree {', '    node [shape=box];']

    cluster_of_leaf = {}
    leaves = sorted(t.leaves, key=lambda node: (-node.birth_level, node.members[0]))
    for cluster_id, leaf in enumerate(leaves):
        cluster_of_leaf[leaf.id] = cluster_id

    for node in t.nodes:
        if node.is_leaf:
            label = f'cluster {cluster_of_leaf[node.id]}\\nborn {format_level(node.birth_level)}\\ncore size {len(node.members)}'
            if g is not None:
                label += f'\\ncontains {g.node_label(node.members[0])}'
            lines.append(f'    t{node.id} [label="{label}", style=filled, fillcolor=lightgrey];')
        else:
            label = f'{node.kind} {node.id}\\nborn {format_level(node.birth_level)}\\nadded {len(node.members)}'
            lines.append(f'    t{node.id} [label="{label}"];')

    for node in t.nodes:
        for child in node.children:
            lines.append(f'    t{node.id} -> t{child};')

    lines.append('}')

    return '\n'.join(lines) + '\n'
