"""UAV wireless-charging and data-offloading scheduler."""

import json

from . import _core
from ._core import (
    ValidationError,
    apply_charge,
    charge_amount,
    cruise_power,
    hover_power,
    tower_data_reward,
)

__all__ = [
    "ValidationError",
    "apply_charge",
    "charge_amount",
    "compare",
    "cruise_power",
    "default_scenario",
    "hover_power",
    "initial_assignment_count",
    "load_scenario",
    "run_episode",
    "scenario_digest",
    "solve_mdp",
    "tower_data_reward",
]


def _text(scenario):
    # None means the built-in default scenario
    if scenario is None:
        return ""
    return scenario if isinstance(scenario, str) else json.dumps(scenario)


def default_scenario():
    return json.loads(_core.default_scenario())


def load_scenario(path):
    return json.loads(_core.load_scenario(str(path)))


def scenario_digest(scenario=None):
    return _core.scenario_digest(_text(scenario))


def run_episode(scenario=None, policy="proposed", epsilon=0.5, seed=0, check_invariants=False):
    return json.loads(_core.run_episode(_text(scenario), policy, epsilon, seed, check_invariants))


def compare(scenario=None, policies=("proposed", "comp1", "comp2", "comp3"), epsilon=0.5,
            seeds=range(20), threads=0):
    return json.loads(_core.compare(_text(scenario), list(policies), epsilon, list(seeds), threads))


def initial_assignment_count(scenario=None, seed=0):
    return _core.initial_assignment_count(_text(scenario), seed)


def solve_mdp(instance):
    return json.loads(_core.solve_mdp(instance if isinstance(instance, str) else json.dumps(instance)))
