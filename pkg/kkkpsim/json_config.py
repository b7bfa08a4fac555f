"""JSON-based configuration I/O."""

import json
import json.decoder
import logging
import pathlib
import typing as t

from boilerplates.config import CONFIGS_PATH, normalize_path

from ._version import VERSION

JSON_INDENT = 2

JSON_ENSURE_ASCII = False

CONFIG_DIRECTORY = CONFIGS_PATH.joinpath('kkkpsim')
RUN_CONFIG_PATH = CONFIG_DIRECTORY.joinpath('kkkpsim_config.json')

_LOG = logging.getLogger(__name__)


def json_to_str(data: t.Union[dict, list]) -> str:
    assert isinstance(data, (dict, list)), type(data)
    return json.dumps(data, indent=JSON_INDENT, ensure_ascii=JSON_ENSURE_ASCII)


def str_to_json(text: str) -> dict:
    """Convert JSON string into an object."""
    try:
        return json.loads(text)
    except json.decoder.JSONDecodeError as err:
        lines = text.splitlines(keepends=True)
        raise ValueError(
            f'\n{"".join(lines[max(0, err.lineno - 10):err.lineno])}{"-" * err.colno}'
            f'\n{"".join(lines[err.lineno:min(err.lineno + 10, len(lines))])}') from err


def file_to_json(path: pathlib.Path) -> dict:
    """Create JSON object from a file."""
    assert isinstance(path, pathlib.Path), type(path)
    with normalize_path(path).open('r', encoding='utf-8') as json_file:
        text = json_file.read()
    try:
        data = str_to_json(text)
    except ValueError as err:
        raise ValueError(f'in file "{path}"') from err
    if not isinstance(data, dict):
        raise ValueError(f'in file "{path}": top-level JSON value must be an object')
    return data


def default_run_options() -> t.Dict[str, t.Any]:
    return {
        'variant': 'modified',
        'attack': 'none',
        'eve_shuffle': '00',
        'eve_pulse': 'first',
        'rounds': 100000,
        'seed': 0,
        'output': 'json'}


def default_configuration() -> t.Dict[str, t.Any]:
    return {
        'description': 'kkkpsim configuration file',
        'kkkpsim-version': VERSION,
        'run': default_run_options()}


def acquire_configuration(path: pathlib.Path) -> t.Dict[str, t.Any]:
    """Read kkkpsim configuration, falling back to the defaults if the file does not exist.

    Options missing from the "run" section of the file take their default values.
    """
    path = normalize_path(path)
    config = default_configuration()
    try:
        data = file_to_json(path)
    except FileNotFoundError:
        _LOG.info('configuration file "%s" does not exist, using defaults', path)
        return config
    run_options = data.get('run', {})
    if not isinstance(run_options, dict):
        raise ValueError(f'in file "{path}": "run" must be an object')
    unknown = set(run_options) - set(config['run'])
    if unknown:
        raise ValueError(f'in file "{path}": unknown run options {sorted(unknown)}')
    config.update({key: value for key, value in data.items() if key != 'run'})
    config['run'].update(run_options)
    return config
