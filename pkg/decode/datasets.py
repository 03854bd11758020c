''' Download public benchmark networks and convert them to edge lists and label files. '''

import gzip
import hashlib
import logging
import os
import subprocess
import tarfile
import zipfile
from collections import Counter
from itertools import combinations
from pathlib import Path
from urllib.parse import urlparse

import networkx as nx
import pandas as pd
import yaml

from decode.graph import Graph, write_edge_list

DEFAULT_DATA_DIR = 'data'

def get_data_dir(data_dir=None):
    if data_dir is None:
        data_dir = os.environ.get('DECODE_DATA_DIR', DEFAULT_DATA_DIR)
    return Path(data_dir)

def load_registry():
    with (Path(__file__).parent / 'datasets.yaml').open() as fh:
        return yaml.safe_load(fh)

def dataset_fns(name, data_dir=None):
    dataset_dir = get_data_dir(data_dir) / name
    return {
        'dir': dataset_dir,
        'download_dir': dataset_dir / 'download',
        'edges': dataset_dir / 'edges.txt',
        'edges_weighted': dataset_dir / 'edges_weighted.txt',
        'labels': dataset_dir / 'labels.csv',
    }

def is_fetched(name, data_dir=None):
    fns = dataset_fns(name, data_dir)
    return fns['edges'].exists() and fns['labels'].exists()

def sha256_of(path):
    digest = hashlib.sha256()
    with Path(path).open('rb') as fh:
        for block in iter(lambda: fh.read(1 << 20), b''):
            digest.update(block)
    return digest.hexdigest()

def download(url, dest_dir, expected_sha256=None):
    dest_dir = Path(dest_dir)
    dest_dir.mkdir(parents=True, exist_ok=True)

    file_name = Path(urlparse(url).path).name
    dest = dest_dir / file_name

    logging.info(f'Downloading {url}...')

    wget_command = [
        'wget',
        '--quiet',
        '--no-clobber',
        url,
        '-P', str(dest_dir),
    ]
    subprocess.run(wget_command, check=True)

    checksum = sha256_of(dest)

    if expected_sha256 is None:
        logging.warning(f'No checksum recorded for {file_name}; sha256 is {checksum}')
    elif checksum != expected_sha256:
        raise ValueError(f'checksum mismatch for {file_name}: expected {expected_sha256}, got {checksum}')
    else:
        logging.info(f'Verified checksum of {file_name}')

    return dest

def graph_from_networkx(G, weight=None):
    ''' Graph with nodes in G's node order, named by str(node). '''
    nodes = list(G.nodes)
    node_to_id = {node: k for k, node in enumerate(nodes)}

    edges = []
    for u, v, data in G.edges(data=True):
        w = 1.0 if weight is None else float(data.get(weight, 1))
        edges.append((node_to_id[u], node_to_id[v], w))

    return Graph(len(nodes), edges, names=[str(node) for node in nodes])

def karate():
    ''' networkx's bundled Zachary network with interaction-count weights.

    Faction labels follow the club attribute except member 9, who sided with
    the officer in the split.
    '''
    G = nx.karate_club_graph()
    G = nx.relabel_nodes(G, {v: v + 1 for v in G.nodes})

    labels = {v: data['club'] for v, data in G.nodes(data=True)}
    labels[9] = 'Officer'

    return G, labels

def parse_jean(lines):
    ''' Co-appearance network from Knuth's jean.dat.

    Weights count the chapters in which two characters appear in a common
    scene. Each character is labelled by the volume and book of its first
    appearance. Characters who never share a scene are dropped.
    '''
    lines = iter(lines)

    # Character definitions come before the first blank line.
    for line in lines:
        line = line.rstrip('\n')
        if line.startswith('*'):
            continue
        if line.strip() == '':
            break

    chapters = []
    pending = ''
    for line in lines:
        line = line.rstrip('\n')
        if line.startswith('*') or line.strip() == '':
            continue

        if line.endswith('&'):
            pending += line[:-1]
            continue

        chapters.append(pending + line)
        pending = ''

    weights = Counter()
    first_appearance = {}
    G = nx.Graph()

    for chapter in chapters:
        chapter_id, _, scenes = chapter.partition(':')
        volume_book = '.'.join(chapter_id.strip().split('.')[:2])

        pairs = set()
        for scene in scenes.split(';'):
            characters = [c.strip() for c in scene.split(',') if c.strip() != '']

            for character in characters:
                first_appearance.setdefault(character, volume_book)

            for u, v in combinations(sorted(set(characters)), 2):
                pairs.add((u, v))

        weights.update(pairs)

    for (u, v), count in sorted(weights.items()):
        G.add_edge(u, v, weight=count)

    labels = {character: first_appearance[character] for character in G.nodes}

    return G, labels

def lesmis(tarball, member):
    with tarfile.open(tarball) as tar:
        fh = tar.extractfile(member)
        if fh is None:
            raise ValueError(f'{member} not found in {tarball}')
        text = fh.read().decode('latin-1')

    return parse_jean(text.splitlines())

def gml_from_zip(zip_path, member, label_attribute):
    ''' Newman's GML archives; repeated edges are collapsed and self-loops dropped. '''
    with zipfile.ZipFile(zip_path) as archive:
        text = archive.read(member).decode()

    # Some archives list an edge twice, which the GML parser only accepts for multigraphs.
    lines = text.splitlines()
    graph_line = next(k for k, line in enumerate(lines) if line.strip().startswith('graph'))
    opens_on_same_line = '[' in lines[graph_line]
    lines.insert(graph_line + (1 if opens_on_same_line else 2), '  multigraph 1')

    M = nx.parse_gml(lines, label='id')

    G = nx.Graph(M)
    G.remove_edges_from(list(nx.selfloop_edges(G)))

    labels = {v: M.nodes[v][label_attribute] for v in G.nodes}

    return G, labels

def email(edges_gz, labels_gz):
    with gzip.open(edges_gz, 'rt') as fh:
        edges = pd.read_csv(fh, sep=' ', header=None, names=['src', 'dst'])

    with gzip.open(labels_gz, 'rt') as fh:
        departments = pd.read_csv(fh, sep=' ', header=None, names=['node', 'department'])

    G = nx.Graph()
    G.add_edges_from(zip(edges['src'], edges['dst']))
    G.remove_edges_from(list(nx.selfloop_edges(G)))

    giant = max(nx.connected_components(G), key=len)
    G = G.subgraph(sorted(giant)).copy()

    logging.info(f'email giant component: {G.number_of_nodes()} nodes, {G.number_of_edges()} undirected edges')

    department = dict(zip(departments['node'], departments['department']))
    labels = {v: department[v] for v in G.nodes}

    return G, labels

def write_labels(g, labels, fn):
    df = pd.DataFrame({
        'node': [g.node_label(v) for v in range(g.n)],
        'label': [str(labels[name]) for name in g.names],
    })
    df.to_csv(fn, index=False)

def write_dataset(name, G, labels, weighted, data_dir=None):
    fns = dataset_fns(name, data_dir)
    fns['dir'].mkdir(parents=True, exist_ok=True)

    labels = {str(node): label for node, label in labels.items()}

    g = graph_from_networkx(G)
    write_edge_list(g, fns['edges'], weighted=False)

    if weighted:
        g_weighted = graph_from_networkx(G, weight='weight')
        write_edge_list(g_weighted, fns['edges_weighted'], weighted=True)

    write_labels(g, labels, fns['labels'])

    logging.info(f'Wrote {name}: {g.n} nodes, {g.m} edges, {len(set(labels.values()))} labels')

def fetch(name, data_dir=None):
    registry = load_registry()

    if name not in registry:
        raise ValueError(f'unknown dataset {name!r}; choose from {", ".join(registry)}')

    info = registry[name]
    fns = dataset_fns(name, data_dir)
    source = info['source']

    if source == 'networkx':
        G, labels = karate()
    elif source == 'sgb':
        tarball = download(info['url'], fns['download_dir'], info.get('sha256'))
        G, labels = lesmis(tarball, info['member'])
    elif source == 'gml_zip':
        archive = download(info['url'], fns['download_dir'], info.get('sha256'))
        G, labels = gml_from_zip(archive, info['member'], info['label_attribute'])
    elif source == 'snap':
        edges_gz = download(info['url'], fns['download_dir'], info.get('sha256'))
        labels_gz = download(info['labels_url'], fns['download_dir'], info.get('labels_sha256'))
        G, labels = email(edges_gz, labels_gz)
    else:
        raise ValueError(f'unknown source {source!r} for {name}')

    write_dataset(name, G, labels, info['weighted'], data_dir)

    return fns
