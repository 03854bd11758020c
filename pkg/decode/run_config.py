from pathlib import Path

import yaml

from decode.density import BETWEENNESS_LENGTHS, MEASURES
from decode.modal import ALLOCATION_RULES, MERGE_RULES, OPTIONS, TIE_RULES

FORMATS = ('csv', 'json')

class InvalidConfig(ValueError):
    pass

class RunConfig:
    ''' Settings for one clustering run.

    Several inputs are treated as layers over the same nodes and overlaid
    (each layer divided by its total weight first if normalize_layers).
    node_order names a CSV whose node column fixes the order of node ids;
    otherwise nodes are numbered by first appearance.
    '''

    defaults = {
        'inputs': [],
        'node_order': None,
        'measure': 'degree',
        'betweenness_length': 'inverse',
        'weighted': False,
        'combine': None,
        'allocate': False,
        'allocate_isolates': False,
        'allocation_rule': 'connection',
        'tie_rule': 'neighbor',
        'merge_rule': 'parent',
        'normalize_layers': False,
        'normalize_density': False,
        'single_pass': False,
        'final_pass': True,
        'processes': 1,
        'tree_out': None,
        'membership_out': '-',
        'dot_out': None,
        'format': 'csv',
    }

    def __init__(self, **kwargs):
        unknown = set(kwargs) - set(self.defaults)
        if unknown:
            raise InvalidConfig(f'unknown setting(s): {", ".join(sorted(unknown))}')

        for key, default in self.defaults.items():
            setattr(self, key, kwargs.get(key, default))

        if isinstance(self.inputs, (str, Path)):
            self.inputs = [self.inputs]

        self.inputs = [Path(path) for path in self.inputs]

        if self.node_order is not None:
            self.node_order = Path(self.node_order)

        if self.combine is not None:
            self.combine = str(self.combine).lower()

        self.validate()

    @classmethod
    def from_yaml(cls, path, **overrides):
        ''' Settings from a YAML mapping; overrides that are not None take precedence. '''
        with Path(path).open() as fh:
            settings = yaml.safe_load(fh)

        if settings is None:
            settings = {}

        if not isinstance(settings, dict):
            raise InvalidConfig(f'{path} does not contain a mapping of settings')

        settings.update({key: value for key, value in overrides.items() if value is not None})

        return cls(**settings)

    def validate(self):
        if len(self.inputs) == 0:
            raise InvalidConfig('at least one input edge list is required')

        if self.measure not in MEASURES:
            raise InvalidConfig(f'unknown measure {self.measure!r}; choose from {", ".join(MEASURES)}')

        if self.betweenness_length not in BETWEENNESS_LENGTHS:
            raise InvalidConfig(f'unknown betweenness length {self.betweenness_length!r}; choose from {", ".join(BETWEENNESS_LENGTHS)}')

        if self.combine is not None:
            if self.combine not in OPTIONS:
                raise InvalidConfig(f'unknown combine option {self.combine!r}; choose from {", ".join(OPTIONS)}')

            if not self.weighted:
                raise InvalidConfig('--combine requires --weighted')

        if self.single_pass and self.combine is None:
            raise InvalidConfig('--single-pass-compat only applies with --combine')

        if self.allocation_rule not in ALLOCATION_RULES:
            raise InvalidConfig(f'unknown allocation rule {self.allocation_rule!r}; choose from {", ".join(ALLOCATION_RULES)}')

        if self.tie_rule not in TIE_RULES:
            raise InvalidConfig(f'unknown tie rule {self.tie_rule!r}; choose from {", ".join(TIE_RULES)}')

        if self.merge_rule not in MERGE_RULES:
            raise InvalidConfig(f'unknown merge rule {self.merge_rule!r}; choose from {", ".join(MERGE_RULES)}')

        if self.format not in FORMATS:
            raise InvalidConfig(f'unknown format {self.format!r}; choose from {", ".join(FORMATS)}')

        if self.membership_out is None and self.tree_out is None and self.dot_out is None:
            raise InvalidConfig('no output requested')

        if self.processes is None or int(self.processes) < 1:
            raise InvalidConfig('processes must be at least 1')

        self.processes = int(self.processes)

    def as_dict(self):
        d = {key: getattr(self, key) for key in self.defaults}
        d['inputs'] = [str(path) for path in self.inputs]
        for key in ['node_order', 'tree_out', 'membership_out', 'dot_out']:
            if d[key] is not None:
                d[key] = str(d[key])
        return d

    def __repr__(self):
        return f'RunConfig({self.as_dict()})'

    def __eq__(self, other):
        if not isinstance(other, RunConfig):
            return NotImplemented
        return self.as_dict() == other.as_dict()
