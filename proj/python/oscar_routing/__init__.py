"""Entanglement routing simulator: long-term budgeted route selection and
channel allocation over a quantum network, with myopic baselines."""

import json

from ._core import (
    ConfigError,
    DomainError,
    InfeasibleSelectionError,
    channel_success_prob,
    check_assumption1,
    delta_gap,
    drift_constant,
    edge_success_prob,
    gibbs_accept_prob,
    queue_update,
    theorem1_rhs,
    theorem2_gap,
)
from . import _core

__all__ = [
    "ConfigError",
    "DomainError",
    "InfeasibleSelectionError",
    "candidate_routes",
    "channel_success_prob",
    "check_assumption1",
    "default_config",
    "delta_gap",
    "drift_constant",
    "edge_success_prob",
    "gibbs_accept_prob",
    "queue_update",
    "run_experiment",
    "theorem1_rhs",
    "theorem2_gap",
    "trial_graph",
]


def default_config():
    """Default experiment configuration as a dict."""
    return json.loads(_core.default_config_json())


def trial_graph(config=None, trial=0):
    """Graph used by `trial` under `config`, as a dict."""
    config = default_config() if config is None else config
    return json.loads(_core.trial_graph_json(json.dumps(config), trial))


def candidate_routes(graph, source, destination, max_routes=3, max_hops=5):
    """Up to `max_routes` loopless routes as node lists, shortest first."""
    return _core.candidate_routes_json(
        json.dumps(graph), source, destination, max_routes, max_hops
    )


def run_experiment(config=None, **overrides):
    """Run every configured policy over all trials.

    Keyword overrides replace top-level config keys, for example
    ``run_experiment(trials=1)``. Returns ``{"mean": {...}, "runs": [...]}``.
    """
    config = dict(default_config() if config is None else config)
    config.update(overrides)
    return _core.run_experiment_json(json.dumps(config))
