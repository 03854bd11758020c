#!/usr/bin/env python3

import argparse
import json
import logging
import subprocess
import sys
from pathlib import Path

import pandas as pd
import tqdm

import decode
from decode import benchmark, datasets, density, evaluation, modal, records, statistics
from decode.graph import load_edge_list, load_node_labels, write_edge_list
from decode.multiplex import LayerStack, overlay
from decode.partition import Partition
from decode.run import ClusteringRun, load_graph
from decode.run_config import FORMATS, RunConfig

EXIT_INVALID = 1
EXIT_DEGENERATE = 2
EXIT_IO = 3

def print_table(df, output_format, index=False):
    if output_format == 'json':
        print(df.to_json(orient='records', indent=1))
    else:
        print(df.to_csv(index=index), end='')

def cmd_density(args):
    g = load_graph(args.inputs, weighted=args.weighted, normalize_layers=args.normalize, node_order=args.node_order)

    d = density.compute_density(g,
                                args.measure,
                                weighted=args.weighted,
                                normalized=args.normalize_density,
                                processes=args.processes,
                                progress=args.progress,
                                betweenness_length=args.betweenness_length,
                               )

    records.write_density(g, d, args.out)

def cluster_config(args):
    overrides = {
        'inputs': args.inputs if args.inputs else None,
        'node_order': args.node_order,
        'measure': args.measure,
        'betweenness_length': args.betweenness_length,
        'weighted': args.weighted,
        'combine': args.combine,
        'allocate': args.allocate,
        'allocate_isolates': args.allocate_isolates,
        'allocation_rule': args.allocation_rule,
        'tie_rule': args.tie_rule,
        'merge_rule': args.merge_rule,
        'normalize_layers': args.normalize,
        'normalize_density': args.normalize_density,
        'single_pass': args.single_pass,
        'final_pass': args.final_pass,
        'processes': args.processes,
        'tree_out': args.tree_out,
        'membership_out': args.membership_out,
        'dot_out': args.dot_out,
        'format': args.format,
    }

    if args.config is not None:
        return RunConfig.from_yaml(args.config, **overrides)
    else:
        return RunConfig(**{key: value for key, value in overrides.items() if value is not None})

def cmd_cluster(args):
    config = cluster_config(args)

    clustering = ClusteringRun(config, progress=args.progress)
    clustering.write_outputs()

    # Keep stdout clean when it carries the membership table.
    summary_fh = sys.stderr if config.membership_out in ('-', None) else sys.stdout
    for line in clustering.summary_lines():
        print(line, file=summary_fh)

def cmd_eval(args):
    g = load_edge_list(args.graph, weighted=args.weighted)
    pred = records.read_membership(args.pred, g)

    truth_labels = None
    if args.truth is not None:
        truth_labels = load_node_labels(args.truth, g)

    for metric in args.metric:
        if metric in ('nmi', 'homogeneity') and truth_labels is None:
            raise ValueError(f'--metric {metric} requires --truth')

        if metric == 'nmi':
            value = evaluation.nmi(pred, Partition.from_labels(truth_labels), unallocated_policy=args.unallocated)
            print(f'nmi\t{value!r}')

        elif metric == 'modularity':
            value = evaluation.modularity(g, pred)
            print(f'modularity\t{value!r}')

        elif metric == 'homogeneity':
            homogeneity = evaluation.gini_homogeneity(pred, truth_labels)
            for cluster, value in sorted(homogeneity.items()):
                print(f'homogeneity\t{cluster}\t{value!r}')

        elif metric == 'tie-share':
            shares = evaluation.within_cluster_tie_share(g, pred)
            for cluster, value in sorted(shares.items()):
                print(f'tie-share\t{cluster}\t{value!r}')

        elif metric == 'summary':
            for key, value in evaluation.cluster_summary(pred).items():
                print(f'{key}\t{value}')

        elif metric == 'table':
            truth = Partition.from_labels(truth_labels) if truth_labels is not None else None
            row = evaluation.evaluation_table(g, pred, truth=truth, attribute=truth_labels, unallocated_policy=args.unallocated)
            print_table(row.to_frame().T, 'csv')

def cmd_stats(args):
    rows = []
    for path in args.inputs:
        g = load_edge_list(path, weighted=args.weighted)
        row = {'network': str(path)}
        row.update(statistics.describe(g))
        rows.append(row)

    print_table(pd.DataFrame(rows), args.format)

def cmd_overlay(args):
    layers = [load_edge_list(path, weighted=args.weighted) for path in args.inputs]
    stack = LayerStack(layers, layer_names=[str(path) for path in args.inputs])
    g = overlay(stack, prenormalize=args.normalize)

    logging.info(f'Overlaid {len(layers)} layers: {g.n} nodes, {g.m} edges')

    with records.open_output(args.out) as fh:
        write_edge_list(g, fh, weighted=True)

def cmd_bench(args):
    suite = benchmark.BenchmarkSuite(names=args.suite if args.suite else None,
                                     data_dir=args.data_dir,
                                     results_dir=args.results_dir,
                                     processes=args.processes,
                                    )

    results = suite.run()

    if len(results) == 0:
        print('No benchmark datasets available; run `decode fetch-data` first.')
        return

    print(suite.nmi_table().to_string())

    failures = suite.failures
    if len(failures) > 0:
        print()
        print(f'{len(failures)} gating run(s) outside tolerance:')
        for _, row in failures.iterrows():
            print(f'\t{row["dataset"]} {row["setting"]} {row["measure"]}: NMI {row["nmi"]:.3f}, expected {row["reference"]:.2f} +/- {row["tolerance"]:.2f}')
        sys.exit(EXIT_INVALID)

def cmd_fetch(args):
    names = args.names if args.names else list(datasets.load_registry())

    for name in names:
        fns = datasets.fetch(name, args.data_dir)
        logging.info(f'{name} ready in {fns["dir"]}')

def cmd_tree(args):
    with Path(args.tree).open() as fh:
        tree = modal.tree_from_json(fh.read())

    tree.validate()

    if args.dot:
        print(modal.tree_to_dot(tree), end='')
    else:
        rows = [node.to_dict() for node in tree.nodes]
        for row in rows:
            row['members'] = len(row['members'])
        print(json.dumps(rows, indent=1))

def main(argv=None):
    logging.basicConfig(format='%(asctime)s: %(message)s',
                        datefmt='%y-%m-%d %H:%M:%S',
                        level=logging.INFO,
                       )

    parser = argparse.ArgumentParser(prog='decode', description='modal density-based community detection')

    parser.add_argument('--version', action='version', version=decode.__version__)

    subparsers = parser.add_subparsers(dest='subcommand', title='subcommands')
    subparsers.required = True

    def add_graph_args(parser, nargs='+'):
        parser.add_argument('inputs', type=Path, nargs=nargs, help='edge list(s) of "src dst [weight]" lines; several files are overlaid as layers')
        parser.add_argument('--weighted', action='store_true', default=None, help='read and use edge weights')
        parser.add_argument('--normalize', action='store_true', default=None, help='divide each layer\'s weights by their sum before overlaying')
        parser.add_argument('--node-order', type=Path, help='CSV whose node column fixes the order of node ids')

    def add_density_args(parser):
        parser.add_argument('--measure', choices=sorted(density.MEASURES), help='node-wise density (default: degree)')
        parser.add_argument('--normalize-density', action='store_true', default=None, help='divide densities by their sum')
        parser.add_argument('--betweenness-length', choices=density.BETWEENNESS_LENGTHS, help='length of a weighted edge for betweenness: 1/w (inverse, default) or w (weight)')
        parser.add_argument('--processes', type=int, help='processes for betweenness')
        parser.add_argument('--progress', const=tqdm.tqdm, action='store_const', help='show progress bars')

    parser_density = subparsers.add_parser('density', help='compute node-wise density')
    add_graph_args(parser_density)
    add_density_args(parser_density)
    parser_density.add_argument('--out', default='-', help='output CSV (default: stdout)')
    parser_density.set_defaults(func=cmd_density, measure='degree', betweenness_length='inverse', processes=1, weighted=False, normalize=False, normalize_density=False)

    parser_cluster = subparsers.add_parser('cluster', help='build the cluster tree and cluster cores')
    add_graph_args(parser_cluster, nargs='*')
    add_density_args(parser_cluster)
    parser_cluster.add_argument('--config', type=Path, help='YAML file of run settings; flags given here take precedence')
    parser_cluster.add_argument('--combine', choices=modal.OPTIONS, help='weighted scan: admit edges strongest for both (and) or either (or) endpoint')
    parser_cluster.add_argument('--allocate', action='store_true', default=None, help='assign nodes outside the cores to clusters')
    parser_cluster.add_argument('--allocate-isolates', action='store_true', default=None, help='make nodes without edges singleton clusters')
    parser_cluster.add_argument('--allocation-rule', choices=modal.ALLOCATION_RULES, help='strongest connection (default) or densest adjacent mode')
    parser_cluster.add_argument('--tie-rule', choices=modal.TIE_RULES, help='how a stalled allocation tie is broken: densest labelled neighbour (default) or larger cluster')
    parser_cluster.add_argument('--merge-rule', choices=modal.MERGE_RULES, help='where nodes admitted at a merge level go: the new internal node (default) or the highest-born joining component')
    parser_cluster.add_argument('--single-pass-compat', dest='single_pass', action='store_true', default=None, help='one admission pass per level in the weighted scan')
    parser_cluster.add_argument('--no-final-pass', dest='final_pass', action='store_false', default=None, help='skip joining the remaining edges after the weighted scan')
    parser_cluster.add_argument('--tree-out', help='cluster tree JSON')
    parser_cluster.add_argument('--membership-out', help='membership table (default: stdout)')
    parser_cluster.add_argument('--dot-out', help='cluster tree as Graphviz DOT')
    parser_cluster.add_argument('--format', choices=FORMATS, help='membership format (default: csv)')
    parser_cluster.set_defaults(func=cmd_cluster)

    parser_eval = subparsers.add_parser('eval', help='score a membership table')
    parser_eval.add_argument('--graph', type=Path, required=True, help='edge list the membership refers to')
    parser_eval.add_argument('--weighted', action='store_true', help='read and use edge weights')
    parser_eval.add_argument('--pred', type=Path, required=True, help='membership CSV from decode cluster')
    parser_eval.add_argument('--truth', type=Path, help='node,label CSV of ground truth or attribute values')
    parser_eval.add_argument('--metric', nargs='+', default=['nmi'], choices=['nmi', 'modularity', 'homogeneity', 'tie-share', 'summary', 'table'])
    parser_eval.add_argument('--unallocated', choices=evaluation.UNALLOCATED_POLICIES, default='exclude', help='how NMI treats unallocated nodes')
    parser_eval.set_defaults(func=cmd_eval)

    parser_stats = subparsers.add_parser('stats', help='descriptive statistics of networks')
    parser_stats.add_argument('inputs', type=Path, nargs='+')
    parser_stats.add_argument('--weighted', action='store_true')
    parser_stats.add_argument('--format', choices=FORMATS, default='csv')
    parser_stats.set_defaults(func=cmd_stats)

    parser_overlay = subparsers.add_parser('overlay', help='sum layers over the same nodes into one weighted network')
    parser_overlay.add_argument('inputs', type=Path, nargs='+')
    parser_overlay.add_argument('--weighted', action='store_true', help='read layer weights (otherwise every edge weighs 1)')
    parser_overlay.add_argument('--normalize', action='store_true', help='divide each layer\'s weights by their sum first')
    parser_overlay.add_argument('--out', default='-', help='output edge list (default: stdout)')
    parser_overlay.set_defaults(func=cmd_overlay)

    parser_tree = subparsers.add_parser('tree', help='check a cluster tree JSON and print it as a table or DOT')
    parser_tree.add_argument('tree', type=Path)
    parser_tree.add_argument('--dot', action='store_true')
    parser_tree.set_defaults(func=cmd_tree)

    parser_bench = subparsers.add_parser('bench', help='NMI against ground truth on public benchmark networks')
    parser_bench.add_argument('suite', nargs='*', help='datasets to run (default: all)')
    parser_bench.add_argument('--data-dir', type=Path, help='dataset directory (default: $DECODE_DATA_DIR or ./data)')
    parser_bench.add_argument('--results-dir', type=Path, default=Path('bench_results'))
    parser_bench.add_argument('--processes', type=int, default=1, help='datasets to run at once')
    parser_bench.set_defaults(func=cmd_bench)

    parser_fetch = subparsers.add_parser('fetch-data', help='download benchmark networks')
    parser_fetch.add_argument('names', nargs='*', help='datasets to fetch (default: all)')
    parser_fetch.add_argument('--data-dir', type=Path, help='dataset directory (default: $DECODE_DATA_DIR or ./data)')
    parser_fetch.set_defaults(func=cmd_fetch)

    args = parser.parse_args(argv)

    try:
        args.func(args)
    except modal.DegenerateDensity as e:
        print(f'Error: {e}', file=sys.stderr)
        sys.exit(EXIT_DEGENERATE)
    except ValueError as e:
        print(f'Error: {e}', file=sys.stderr)
        sys.exit(EXIT_INVALID)
    except (OSError, subprocess.CalledProcessError) as e:
        print(f'Error: {e}', file=sys.stderr)
        sys.exit(EXIT_IO)

if __name__ == '__main__':
    main()
