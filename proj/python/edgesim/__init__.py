"""Base-station activation and computation-offload control simulator."""

import json as _json

from ._edgesim import *  # noqa: F401,F403
from ._edgesim import (
    default_config,
    resolve_config,
    run_from_json,
    batch_from_json,
    sweep_from_json,
    verify_bounds_from_json,
    min_cover_from_json,
)

__version__ = "0.1.0"


def _as_text(config):
    if isinstance(config, dict):
        return _json.dumps(config)
    return config


def run(config="{}", seed=None):
    """Simulate one policy; `config` is a JSON string or dict."""
    return run_from_json(_as_text(config), seed)


def run_batch(config="{}", seeds=(1,)):
    return batch_from_json(_as_text(config), list(seeds))


def run_sweep(config, parameter, values, seeds=None):
    return sweep_from_json(_as_text(config), parameter, list(values), seeds)


def verify_bounds(config="{}", seeds=range(1, 21)):
    return verify_bounds_from_json(_as_text(config), list(seeds))


def min_cover(config="{}"):
    return min_cover_from_json(_as_text(config))
