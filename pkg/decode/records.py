''' Delimited per-node output records (membership and density tables). '''

import sys
from contextlib import contextmanager
from pathlib import Path

from decode.graph import GraphFormatError, format_weight
from decode.partition import Partition, UNALLOCATED

UNALLOCATED_TOKEN = 'NA'

def Record_factory(columns_arg, converters_arg, formatters_arg=None, delimiter=','):
    if formatters_arg is None:
        formatters_arg = {}

    field_index_to_converter = {}
    for i, c in enumerate(columns_arg):
        if c in converters_arg:
            field_index_to_converter[i] = converters_arg[c]

    class Record():
        columns = columns_arg

        def __init__(self, *args):
            for name, arg in zip(columns_arg, args):
                setattr(self, name, arg)

        @classmethod
        def header(cls):
            return delimiter.join(columns_arg)

        @classmethod
        def from_line(cls, line):
            fields = line.strip('\n').split(delimiter)

            if len(fields) != len(columns_arg):
                raise ValueError(f'expected {len(columns_arg)} fields, got {len(fields)}')

            for i, converter in field_index_to_converter.items():
                fields[i] = converter(fields[i])

            return cls(*fields)

        def __str__(self):
            row = [formatters_arg.get(k, str)(getattr(self, k)) for k in columns_arg]
            return delimiter.join(row)

        def __repr__(self):
            return str(self)

    return Record

def cluster_from_token(token):
    return UNALLOCATED if token == UNALLOCATED_TOKEN else int(token)

def cluster_to_token(cluster):
    return UNALLOCATED_TOKEN if cluster == UNALLOCATED else str(cluster)

def provenance_from_token(token):
    return None if token == UNALLOCATED_TOKEN else token

def provenance_to_token(provenance):
    return UNALLOCATED_TOKEN if provenance is None else provenance

MembershipRecord = Record_factory(
    columns_arg=[
        'node',
        'cluster',
        'provenance',
    ],
    converters_arg={
        'cluster': cluster_from_token,
        'provenance': provenance_from_token,
    },
    formatters_arg={
        'cluster': cluster_to_token,
        'provenance': provenance_to_token,
    },
)

DensityRecord = Record_factory(
    columns_arg=[
        'node',
        'value',
    ],
    converters_arg={'value': float},
    formatters_arg={'value': format_weight},
)

@contextmanager
def open_output(path_or_fh):
    ''' '-' or None means stdout; objects with a write method are used as is. '''
    if path_or_fh is None or path_or_fh == '-':
        yield sys.stdout
    elif hasattr(path_or_fh, 'write'):
        yield path_or_fh
    else:
        with Path(path_or_fh).open('w') as fh:
            yield fh

def membership_lines(g, p):
    yield MembershipRecord.header() + '\n'
    for v in range(g.n):
        record = MembershipRecord(g.node_label(v), int(p.labels[v]), p.provenance[v])
        yield f'{record}\n'

def write_membership(g, p, path_or_fh):
    with open_output(path_or_fh) as fh:
        fh.writelines(membership_lines(g, p))

def read_membership(path, g):
    ''' Partition read from a membership CSV, matching rows to nodes of g by name. '''
    labels = [UNALLOCATED for _ in range(g.n)]
    provenance = [None for _ in range(g.n)]
    seen = set()

    with Path(path).open() as fh:
        header = fh.readline().strip()
        if header != MembershipRecord.header():
            raise GraphFormatError(f'{path}: expected header {MembershipRecord.header()!r}, got {header!r}', 1)

        for line_number, line in enumerate(fh, 2):
            if line.strip() == '':
                continue

            try:
                record = MembershipRecord.from_line(line)
            except ValueError as e:
                raise GraphFormatError(f'{path}: {e}', line_number)

            if record.node not in g.name_to_id:
                raise GraphFormatError(f'{path}: unknown node {record.node!r}', line_number)

            if record.node in seen:
                raise GraphFormatError(f'{path}: node {record.node!r} listed twice', line_number)
            seen.add(record.node)

            v = g.name_to_id[record.node]
            labels[v] = record.cluster
            provenance[v] = record.provenance if record.cluster != UNALLOCATED else None

    return Partition(labels, provenance=provenance)

def density_lines(g, d):
    yield DensityRecord.header() + '\n'
    for v, value in enumerate(d.values.tolist()):
        yield f'{DensityRecord(g.node_label(v), value)}\n'

def write_density(g, d, path_or_fh):
    with open_output(path_or_fh) as fh:
        fh.writelines(density_lines(g, d))
