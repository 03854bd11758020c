import json
import logging

import pandas as pd

import hits.utilities

from decode import density, evaluation, modal, records
from decode.graph import GraphFormatError, load_edge_list
from decode.multiplex import LayerStack, overlay
from decode.partition import UNALLOCATED

memoized_property = hits.utilities.memoized_property

def read_node_order(path):
    df = pd.read_csv(path, dtype=str, keep_default_na=False)

    if 'node' not in df.columns:
        raise GraphFormatError(f'{path} has no node column')

    return df['node'].tolist()

def load_graph(paths, weighted=False, normalize_layers=False, node_order=None):
    ''' A single edge list, or the overlay of several layers over the same nodes.

    If node_order is given, node ids follow the node column of that CSV.
    '''
    paths = list(paths)

    if len(paths) == 1:
        g = load_edge_list(paths[0], weighted=weighted)
    else:
        layers = [load_edge_list(path, weighted=weighted) for path in paths]
        stack = LayerStack(layers, layer_names=[str(path) for path in paths])
        g = overlay(stack, prenormalize=normalize_layers)

        logging.info(f'Overlaid {len(layers)} layers into {g.m} edges over {g.n} nodes')

        if not weighted:
            g = g.binarized()

    if node_order is not None:
        g = g.reindexed(read_node_order(node_order))

    return g

class ClusteringRun:
    ''' One density computation, scan and (optional) allocation for a RunConfig. '''

    def __init__(self, config, graph=None, progress=None):
        self.config = config

        if progress is None or getattr(progress, '_silent', False):
            def ignore_kwargs(x, **kwargs):
                return x
            progress = ignore_kwargs

        self.progress = progress

        if graph is not None:
            self._memoized_graph = graph

        self.fns = {
            'membership': config.membership_out,
            'tree': config.tree_out,
            'dot': config.dot_out,
        }

    @memoized_property
    def graph(self):
        g = load_graph(self.config.inputs,
                       weighted=self.config.weighted,
                       normalize_layers=self.config.normalize_layers,
                       node_order=self.config.node_order,
                      )
        logging.info(f'Loaded graph with {g.n} nodes and {g.m} edges')
        return g

    @memoized_property
    def density(self):
        return density.compute_density(self.graph,
                                       self.config.measure,
                                       weighted=self.config.weighted,
                                       normalized=self.config.normalize_density,
                                       processes=self.config.processes,
                                       progress=self.progress,
                                       betweenness_length=self.config.betweenness_length,
                                      )

    @memoized_property
    def tree_and_cores(self):
        if self.config.combine is None:
            return modal.cluster_unweighted(self.graph, self.density, merge_rule=self.config.merge_rule)
        else:
            return modal.cluster_weighted(self.graph,
                                          self.density,
                                          option=self.config.combine,
                                          single_pass=self.config.single_pass,
                                          final_pass=self.config.final_pass,
                                          merge_rule=self.config.merge_rule,
                                         )

    @property
    def tree(self):
        return self.tree_and_cores[0]

    @property
    def cores(self):
        return self.tree_and_cores[1]

    @memoized_property
    def partition(self):
        if self.config.allocate:
            return modal.allocate(self.graph,
                                  self.density,
                                  self.cores,
                                  rule=self.config.allocation_rule,
                                  allocate_isolates=self.config.allocate_isolates,
                                  tie_rule=self.config.tie_rule,
                                 )
        elif self.config.allocate_isolates:
            return modal.allocate_isolates_only(self.graph, self.cores)
        else:
            return self.cores

    def component_table(self):
        return pd.DataFrame(self.tree.levels, columns=['level', 'components'])

    def membership_json(self):
        rows = []
        for v in range(self.graph.n):
            label = int(self.partition.labels[v])
            rows.append({
                'node': self.graph.node_label(v),
                'cluster': None if label == UNALLOCATED else label,
                'provenance': self.partition.provenance[v],
            })

        return json.dumps(rows, indent=1) + '\n'

    def write_outputs(self):
        if self.fns['membership'] is not None:
            if self.config.format == 'csv':
                records.write_membership(self.graph, self.partition, self.fns['membership'])
            else:
                with records.open_output(self.fns['membership']) as fh:
                    fh.write(self.membership_json())

        if self.fns['tree'] is not None:
            with records.open_output(self.fns['tree']) as fh:
                fh.write(modal.tree_to_json(self.tree))

        if self.fns['dot'] is not None:
            with records.open_output(self.fns['dot']) as fh:
                fh.write(modal.tree_to_dot(self.tree, self.graph))

    def summary_lines(self):
        summary = evaluation.cluster_summary(self.partition)

        lines = [
            f'measure: {self.config.measure}{" (weighted)" if self.config.weighted else ""}',
            f'scan: {"unweighted" if self.config.combine is None else self.config.combine.upper()}',
            f'cores: {self.cores.num_clusters}',
            f'clusters: {summary["clusters"]} (mean size {summary["mean size"]:.2f})',
            f'unallocated: {self.partition.num_unallocated}',
            '',
            self.component_table().to_string(index=False),
        ]

        provenance_counts = self.partition.provenance_counts()
        if provenance_counts:
            lines.insert(4, 'provenance: ' + ', '.join(f'{source} {count}' for source, count in sorted(provenance_counts.items())))

        return lines
