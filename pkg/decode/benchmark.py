import datetime
import logging
import time
from pathlib import Path

import numpy as np
import pandas as pd
import yaml

from decode import datasets, parallel
from decode.evaluation import nmi
from decode.graph import load_node_labels
from decode.partition import Partition
from decode.run import ClusteringRun
from decode.run_config import RunConfig

SETTINGS = {
    'binary': dict(weighted=False, combine=None),
    'or': dict(weighted=True, combine='or'),
    'and': dict(weighted=True, combine='and'),
}

# Per-run RunConfig settings a benchmarks.yaml row may add to its setting.
RUN_OPTIONS = ('betweenness_length', 'tie_rule', 'merge_rule')

def load_benchmarks():
    with (Path(__file__).parent / 'benchmarks.yaml').open() as fh:
        return yaml.safe_load(fh)

def benchmark_run(name, run, data_dir, results_dir):
    ''' Cluster one dataset under one setting and measure and score it against the labels. '''
    fns = datasets.dataset_fns(name, data_dir)

    setting = SETTINGS[run['setting']]
    options = {key: run[key] for key in RUN_OPTIONS if key in run}

    edges_fn = fns['edges_weighted'] if setting['weighted'] else fns['edges']

    row = {
        'dataset': name,
        'setting': run['setting'],
        'measure': run['measure'],
        'options': ' '.join(f'{key}={value}' for key, value in options.items()),
        'reference': run['reference'],
        'tolerance': run['tolerance'],
        'gating': run['gating'],
    }

    if not edges_fn.exists():
        logging.warning(f'{edges_fn} not found; skipping {name} {run["setting"]} {run["measure"]}')
        row.update({'nmi': np.nan, 'clusters': np.nan, 'seconds': np.nan, 'passed': np.nan})
        return row

    membership_fn = Path(results_dir) / f'{name}_{run["setting"]}_{run["measure"]}.csv'

    config = RunConfig(inputs=[edges_fn],
                       node_order=fns['labels'],
                       measure=run['measure'],
                       allocate=True,
                       membership_out=membership_fn,
                       **setting,
                       **options,
                      )

    start = time.perf_counter()

    clustering = ClusteringRun(config)
    partition = clustering.partition

    seconds = time.perf_counter() - start

    clustering.write_outputs()

    truth = Partition.from_labels(load_node_labels(fns['labels'], clustering.graph))
    value = nmi(partition, truth, unallocated_policy='exclude')

    passed = bool(abs(value - run['reference']) <= run['tolerance'])

    logging.info(f'{name} {run["setting"]} {run["measure"]}: NMI {value:.3f} (reference {run["reference"]:.2f}), {partition.num_clusters} clusters, {seconds:.2f}s')

    row.update({'nmi': value, 'clusters': partition.num_clusters, 'seconds': seconds, 'passed': passed})

    return row

def benchmark_dataset(name, runs, data_dir, results_dir):
    return [benchmark_run(name, run, data_dir, results_dir) for run in runs]

class BenchmarkSuite:
    ''' NMI of every configured (setting, measure) run on each available dataset. '''

    def __init__(self, names=None, data_dir=None, results_dir=None, processes=1):
        self.benchmarks = load_benchmarks()

        if names is None:
            names = list(self.benchmarks)

        unknown = [name for name in names if name not in self.benchmarks]
        if unknown:
            raise ValueError(f'unknown benchmark(s): {", ".join(unknown)}; choose from {", ".join(self.benchmarks)}')

        self.names = names
        self.data_dir = datasets.get_data_dir(data_dir)

        if results_dir is None:
            results_dir = Path('bench_results')

        self.results_dir = Path(results_dir)
        self.processes = processes

        self.fns = {
            'results': self.results_dir / 'nmi.csv',
        }

        self.results = None

    @property
    def available(self):
        available = []
        for name in self.names:
            if datasets.is_fetched(name, self.data_dir):
                available.append(name)
            else:
                logging.warning(f'{name} is not in {self.data_dir}; run `decode fetch-data {name}` to include it')

        return available

    def run(self):
        self.results_dir.mkdir(exist_ok=True, parents=True)
        log_fn = self.results_dir / f'log_{datetime.datetime.now():%y%m%d-%H%M%S}.out'

        logger = logging.getLogger(__name__)
        logger.propagate = False
        logger.setLevel(logging.INFO)
        file_handler = logging.FileHandler(log_fn)
        formatter = logging.Formatter(fmt='%(asctime)s: %(message)s',
                                      datefmt='%y-%m-%d %H:%M:%S',
                                     )
        file_handler.setFormatter(formatter)
        file_handler.setLevel(logging.INFO)
        logger.addHandler(file_handler)

        logging.info(f'Logging in {log_fn}')

        available = self.available

        arg_tuples = [(name, self.benchmarks[name], self.data_dir, self.results_dir) for name in available]

        logger.info(f'Benchmarking {", ".join(available)}')

        if self.processes > 1 and len(arg_tuples) > 1:
            with parallel.PoolWithLoggerThread(self.processes, logger) as pool:
                per_dataset = pool.starmap(benchmark_dataset, arg_tuples)
        else:
            per_dataset = [benchmark_dataset(*args) for args in arg_tuples]

        rows = [row for dataset_rows in per_dataset for row in dataset_rows]

        columns = ['dataset', 'setting', 'measure', 'options', 'nmi', 'reference', 'tolerance', 'gating', 'passed', 'clusters', 'seconds']
        self.results = pd.DataFrame(rows, columns=columns)
        self.results.to_csv(self.fns['results'], index=False)

        for _, row in self.results.iterrows():
            logger.info(f'{row["dataset"]} {row["setting"]} {row["measure"]}: NMI {row["nmi"]:.3f}, reference {row["reference"]:.2f}, passed {row["passed"]}')

        logger.info('Done!')

        logger.removeHandler(file_handler)
        file_handler.close()

        return self.results

    def nmi_table(self):
        ''' NMI (reference) per dataset and measure, one column per setting. '''
        df = self.results.copy()
        df['cell'] = [f'{value:.2f} ({reference:.2f})' if not np.isnan(value) else f'- ({reference:.2f})'
                      for value, reference in zip(df['nmi'], df['reference'])
                     ]

        table = df.pivot_table(index=['dataset', 'measure'], columns='setting', values='cell', aggfunc='first', sort=False)
        return table.fillna('')

    @property
    def failures(self):
        ran = self.results['passed'].notna()
        gating = self.results['gating'].astype(bool)
        failed = ~self.results['passed'].fillna(False).astype(bool)
        return self.results[ran & gating & failed]
