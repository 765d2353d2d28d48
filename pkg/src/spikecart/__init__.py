"""Spiking-column reinforcement learning on the cart-pole task.

A clustering column compresses discretized, m-hot-encoded state
variables into one-hot cluster ids; a reinforcement column maps cluster
ids to push-left/push-right actions with reward-gated three-factor
updates.  The package also provides the cart-pole environment, a tabular
Q-learning baseline, fixed reference policies, and a deterministic
experiment harness with CSV and figure output.
"""

__version__ = "0.1.0"

from .cartpole import CartPoleParams, CartPoleState, dynamics, step_env
from .config import ExperimentConfig, load_config
from .ctnn import ClusteringColumn, CTNNParams
from .encoder import EncoderConfig, IntervalSpec, StateEncoder, discretize
from .harness import (
    detect_convergence,
    run_episode,
    run_experiment,
    run_trial,
)
from .qlearn import QParams, QTable, state_index
from .rtnn import ReinforcementColumn, RTNNParams
from .spike import INF, Volley, evaluate_neuron, rif_response, wta_1

__all__ = [
    "CartPoleParams",
    "CartPoleState",
    "ClusteringColumn",
    "CTNNParams",
    "EncoderConfig",
    "ExperimentConfig",
    "INF",
    "IntervalSpec",
    "QParams",
    "QTable",
    "ReinforcementColumn",
    "RTNNParams",
    "StateEncoder",
    "Volley",
    "detect_convergence",
    "discretize",
    "dynamics",
    "evaluate_neuron",
    "load_config",
    "rif_response",
    "run_episode",
    "run_experiment",
    "run_trial",
    "state_index",
    "step_env",
    "wta_1",
]
