import gzip
import hashlib
import textwrap
import zipfile

import pandas as pd

from decode import datasets
from decode.graph import load_edge_list

def test_registry_lists_benchmarks():
    registry = datasets.load_registry()
    assert set(registry) == {'karate', 'lesmis', 'polbooks', 'football', 'email'}

def test_fetch_karate(tmp_path):
    fns = datasets.fetch('karate', tmp_path)

    assert datasets.is_fetched('karate', tmp_path)

    labels = pd.read_csv(fns['labels'], dtype=str)
    assert labels['node'].tolist() == [str(v) for v in range(1, 35)]
    assert labels.set_index('node').loc['9', 'label'] == 'Officer'
    assert labels['label'].nunique() == 2

    g = load_edge_list(fns['edges_weighted'], weighted=True)
    assert g.m == 78
    assert not g.is_binary

def test_parse_jean():
    lines = textwrap.dedent('''\
        * characters
        MY Myriel
        NP Napoleon
        JV Jean Valjean

        * chapters
        1.1.1:MY,NP;MY
        1.1.2:MY&
        ,NP
        2.3.1:JV,MY
    ''').splitlines()

    G, labels = datasets.parse_jean(lines)

    assert G['MY']['NP']['weight'] == 2
    assert G['JV']['MY']['weight'] == 1
    assert not G.has_edge('JV', 'NP')
    assert labels == {'MY': '1.1', 'NP': '1.1', 'JV': '2.3'}

def test_gml_from_zip(tmp_path):
    gml = textwrap.dedent('''\
        graph
        [
          directed 0
          node
          [
            id 0
            label "A"
            value "l"
          ]
          node
          [
            id 1
            label "B"
            value "l"
          ]
          node
          [
            id 2
            label "C"
            value "c"
          ]
          edge
          [
            source 0
            target 1
          ]
          edge
          [
            source 1
            target 0
          ]
          edge
          [
            source 1
            target 2
          ]
          edge
          [
            source 2
            target 2
          ]
        ]
    ''')

    zip_fn = tmp_path / 'books.zip'
    with zipfile.ZipFile(zip_fn, 'w') as archive:
        archive.writestr('books.gml', gml)

    G, labels = datasets.gml_from_zip(zip_fn, 'books.gml', 'value')

    assert sorted(G.edges) == [(0, 1), (1, 2)]
    assert labels == {0: 'l', 1: 'l', 2: 'c'}

def test_email_keeps_giant_component(tmp_path):
    edges_fn = tmp_path / 'edges.txt.gz'
    with gzip.open(edges_fn, 'wt') as fh:
        fh.write('0 1\n1 2\n3 4\n2 2\n')

    labels_fn = tmp_path / 'labels.txt.gz'
    with gzip.open(labels_fn, 'wt') as fh:
        fh.write('0 1\n1 1\n2 2\n3 3\n4 3\n')

    G, labels = datasets.email(edges_fn, labels_fn)

    assert sorted(G.nodes) == [0, 1, 2]
    assert G.number_of_edges() == 2
    assert labels == {0: 1, 1: 1, 2: 2}

def test_sha256_of(tmp_path):
    fn = tmp_path / 'file.bin'
    fn.write_bytes(b'network')
    assert datasets.sha256_of(fn) == hashlib.sha256(b'network').hexdigest()
