''' Aggregation of same-node-set layers into a single overlapping network. '''

import math

from decode.graph import Graph, NodeSetMismatch, edges_by_key

class EmptyLayer(ValueError):
    pass

class LayerStack:
    ''' Ordered layers over an identical node set.

    Nodes are matched across layers by name when the layers are named, otherwise
    by integer id. Named layers are reindexed to the first layer's node order.
    '''

    def __init__(self, layers, layer_names=None):
        layers = list(layers)

        if len(layers) == 0:
            raise ValueError('a layer stack needs at least one layer')

        if layer_names is None:
            layer_names = [f'layer_{k}' for k in range(len(layers))]
        else:
            layer_names = [str(name) for name in layer_names]

        if len(layer_names) != len(layers):
            raise ValueError(f'{len(layer_names)} layer names given for {len(layers)} layers')

        if len(set(layer_names)) != len(layer_names):
            raise ValueError('layer names are not unique')

        first = layers[0]

        aligned = [first]

        for name, layer in zip(layer_names[1:], layers[1:]):
            if layer.n != first.n:
                raise NodeSetMismatch(f'layer {name} has {layer.n} nodes, {layer_names[0]} has {first.n}')

            if (layer.names is None) != (first.names is None):
                raise NodeSetMismatch(f'layer {name} and {layer_names[0]} do not both have node names')

            if first.names is not None and layer.names != first.names:
                if set(layer.names) != set(first.names):
                    extra = sorted(set(layer.names) - set(first.names))
                    missing = sorted(set(first.names) - set(layer.names))
                    raise NodeSetMismatch(f'layer {name} differs from {layer_names[0]}: extra {extra[:5]}, missing {missing[:5]}')

                layer = layer.reindexed(first.names)

            aligned.append(layer)

        self.layers = aligned
        self.layer_names = layer_names

    def __len__(self):
        return len(self.layers)

    def __iter__(self):
        return iter(self.layers)

    @property
    def n(self):
        return self.layers[0].n

    @property
    def names(self):
        return self.layers[0].names

def normalize_layer(g):
    ''' Divide every weight by the total weight of the layer. '''
    total = g.total_weight

    if total == 0:
        raise EmptyLayer('cannot normalize a layer with no edges')

    return g.with_weights(g.w / total)

def overlay(stack, prenormalize=False):
    ''' Union of the layers' edges; overlapping edges get the sum of their weights.

    Sums are exactly rounded (math.fsum), so the result does not depend on layer order.
    '''
    layers = list(stack)

    if prenormalize:
        layers = [normalize_layer(layer) for layer in layers]

    by_key = edges_by_key(layers)
    edges = [(i, j, math.fsum(weights)) for (i, j), weights in by_key.items()]

    return Graph(stack.n, edges, names=stack.names)
