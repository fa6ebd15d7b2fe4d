"""
Python API for loading scenario documents: presets, dotted-path overrides,
sweep expansion and validation.
"""
import copy
import itertools
import logging
import os
import re

import yaml
from django.conf import settings
from django.utils.text import slugify

from .constants import PRESET_SUFFIX, WorkloadMode
from .exceptions import ScenarioConfigError
from .serializers import ScenarioSerializer, flatten_errors

logger = logging.getLogger(__name__)

SWEEP_KEY = 'sweep'
DURATION = re.compile(r'^\s*([0-9]*\.?[0-9]+)\s*(ns|us|ms|s)?\s*$')
MS_PER_UNIT = {'ns': 1e-6, 'us': 1e-3, 'ms': 1.0, 's': 1e3}


def preset_dir():
    return settings.JBOF_HARVEST['PRESET_DIR']


def list_presets():
    """
    Names of the preset scenarios shipped in the preset directory.
    """
    if not os.path.isdir(preset_dir()):
        return []
    return sorted(
        name[:-len(PRESET_SUFFIX)] for name in os.listdir(preset_dir()) if name.endswith(PRESET_SUFFIX)
    )


def resolve_config_path(config):
    """
    ``config`` is either a path to a YAML file or the name of a preset.
    """
    if os.path.isfile(config):
        return config
    preset = os.path.join(preset_dir(), config + PRESET_SUFFIX)
    if os.path.isfile(preset):
        return preset
    raise ScenarioConfigError({'config': f'no scenario file or preset named {config!r}'})


def read_document(config):
    path = resolve_config_path(config)
    with open(path, encoding='utf-8') as stream:
        try:
            document = yaml.safe_load(stream)
        except yaml.YAMLError as exc:
            raise ScenarioConfigError({'config': f'{path} is not valid YAML: {exc}'}) from exc
    if document is None:
        document = {}
    if not isinstance(document, dict):
        raise ScenarioConfigError({'config': f'{path} must hold a mapping'})
    logger.debug('[scenario] read %s', path)
    return document


def parse_assignment(text):
    """
    Split ``dotted.path=value``; the value is read as YAML, so numbers, booleans
    and lists keep their type.
    """
    path, separator, raw = text.partition('=')
    path = path.strip()
    if not separator or not path:
        raise ScenarioConfigError({'set': f'expected dotted.path=value, got {text!r}'})
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ScenarioConfigError({path: f'unreadable value {raw!r}: {exc}'}) from exc
    return path, value


def set_path(document, path, value):
    """
    Assign ``value`` at ``path`` inside ``document``, creating mappings on the
    way. Numeric segments index lists.
    """
    keys = path.split('.')
    node = document
    for position, key in enumerate(keys):
        last = position == len(keys) - 1
        if isinstance(node, list):
            try:
                index = int(key)
                node[index]
            except (ValueError, IndexError) as exc:
                raise ScenarioConfigError({path: f'no list entry {key!r}'}) from exc
            if last:
                node[index] = value
            else:
                node = node[index]
        elif isinstance(node, dict):
            if last:
                node[key] = value
            else:
                if not isinstance(node.get(key), (dict, list)):
                    node[key] = {}
                node = node[key]
        else:
            raise ScenarioConfigError({path: f'{".".join(keys[:position])} is not a mapping'})
    return document


def apply_overrides(document, assignments=()):
    """
    A copy of ``document`` with every ``dotted.path=value`` assignment applied.
    """
    document = copy.deepcopy(document)
    for assignment in assignments:
        set_path(document, *parse_assignment(assignment))
    return document


def parse_duration_ms(text):
    """
    Milliseconds in ``text``: a bare number of milliseconds, or a number with
    one of the units ns, us, ms or s.
    """
    match = DURATION.match(str(text))
    if not match:
        raise ScenarioConfigError({'duration_ms': f'unreadable duration {text!r}'})
    return float(match.group(1)) * MS_PER_UNIT[match.group(2) or 'ms']


def apply_run_options(document, variant=None, seed=None, out=None, trace=None, duration=None, event_trace=None):
    """
    Fold command-line run options into a copy of ``document``.
    """
    document = copy.deepcopy(document)
    if variant is not None:
        document['variant'] = variant
    if seed is not None:
        document['seed'] = seed
    if out is not None:
        document['output'] = out
    if duration is not None:
        document['duration_ms'] = parse_duration_ms(duration)
    if event_trace:
        document['event_trace'] = True
    if trace is not None:
        workloads = document.setdefault('workloads', [])
        replays = [entry for entry in workloads if isinstance(entry, dict) and entry.get('mode') == WorkloadMode.TRACE]
        for entry in replays:
            entry['path'] = trace
        if not replays:
            workloads.append({'name': 'trace', 'mode': WorkloadMode.TRACE, 'path': trace})
    return document


def validate_document(document):
    """
    The validated scenario, every default resolved; raises ``ScenarioConfigError``
    naming each offending field.
    """
    serializer = ScenarioSerializer(data=document)
    if not serializer.is_valid():
        raise ScenarioConfigError(dict(flatten_errors(serializer.errors)))
    return serializer.validated_data


def effective_config(scenario):
    """
    The validated scenario rendered back to plain data, output location left out.
    """
    data = ScenarioSerializer(scenario).data
    return {key: value for key, value in data.items() if key != 'output'}


def expand_sweep(document):
    """
    One document per point of the grid under ``sweep`` (dotted path to a list of
    values), in grid order. A document without a grid is its own only point.
    """
    grid = document.get(SWEEP_KEY)
    base = {key: value for key, value in document.items() if key != SWEEP_KEY}
    if not grid:
        return [base]
    if not isinstance(grid, dict):
        raise ScenarioConfigError({SWEEP_KEY: 'must map dotted paths to lists of values'})
    axes = []
    for path, values in grid.items():
        if not isinstance(values, list) or not values:
            raise ScenarioConfigError({f'{SWEEP_KEY}.{path}': 'must be a non-empty list'})
        axes.append([(path, value) for value in values])
    points = []
    for combination in itertools.product(*axes):
        point = copy.deepcopy(base)
        for path, value in combination:
            set_path(point, path, copy.deepcopy(value))
        label = ','.join(f'{path}={_label(value)}' for path, value in combination)
        point['name'] = f'{base.get("name", "")}[{label}]'
        if base.get('output'):
            point['output'] = os.path.join(base['output'], _slug(label))
        points.append(point)
    return points


def _slug(text):
    return slugify(re.sub(r'[.,=\[\]]+', '-', text))


def _label(value):
    if isinstance(value, list):
        return f'{value[0]}..{value[-1]}' if value else 'none'
    return str(value)


def default_output_dir(scenario):
    name = _slug(scenario['name']) or 'scenario'
    return os.path.join(settings.JBOF_HARVEST['OUTPUT_ROOT'], f'{name}-{scenario["variant"]}-seed{scenario["seed"]}')


def load_scenario(config, assignments=(), **options):
    """
    Read, override and validate one scenario document.
    """
    document = apply_run_options(apply_overrides(read_document(config), assignments), **options)
    if document.get(SWEEP_KEY):
        raise ScenarioConfigError({SWEEP_KEY: f'{config} is a sweep; run it with sweep_scenarios'})
    return validate_document(document)
