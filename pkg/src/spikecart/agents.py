"""Agents: the two-column learner, baselines and fixed reference policies.

Action indices are 0 (push left, -F) and 1 (push right, +F) everywhere;
``FORCE_SIGNS`` maps an index to the sign of the applied force.

The fixed reference policies encode hand-set crossbar weights, one row
per interval tuple with a (push-left, push-right) weight pair; the
action is the argmax of the pair.  Tuples with no row (states believed
unreachable) fall back to a consistent pseudo-random pick.
"""

from __future__ import annotations

import math

import numpy as np

from .cartpole import CartPoleState
from .ctnn import ClusteringColumn
from .encoder import StateEncoder, discretize
from .qlearn import QTable, state_index
from .rtnn import ReinforcementColumn
from .spike import ConsistentChoice

FORCE_SIGNS = (-1.0, 1.0)

WARMUP, TEST = "warmup", "test"

#: state.<attr> per state-variable name; the angle crosses the boundary
#: in degrees, cart quantities stay metric.
STATE_GETTERS = {
    "angle": lambda s: s.angle_deg,
    "displacement": lambda s: s.pos,
    "cart_velocity": lambda s: s.vel,
    "angular_velocity": lambda s: math.degrees(s.ang_vel),
}

SV_NAMES = tuple(STATE_GETTERS)


# ---------------------------------------------------------------------------
# Fixed reference weight tables (push-left weight, push-right weight)

FIXED_WEIGHTS_1SV = {
    (1,): (8, 0),
    (2,): (8, 0),
    (3,): (8, 0),
    (4,): (0, 8),
    (5,): (0, 8),
    (6,): (0, 8),
}

FIXED_WEIGHTS_2SV = {
    (1, 1): (0, 8), (1, 2): (8, 0), (1, 3): (8, 0),
    (2, 1): (0, 8), (2, 2): (8, 0), (2, 3): (8, 0),
    (3, 1): (8, 0), (3, 2): (0, 8), (3, 3): (8, 0),
    (4, 1): (0, 8), (4, 2): (8, 0), (4, 3): (0, 8),
    (5, 1): (0, 8), (5, 2): (0, 8), (5, 3): (8, 0),
    (6, 1): (0, 8), (6, 2): (0, 8), (6, 3): (8, 0),
}

FIXED_WEIGHTS_3SV = {
    (1, 1, 1): (8, 0), (1, 1, 2): (0, 8), (1, 1, 3): (8, 0),
    (1, 2, 1): (8, 0), (1, 2, 2): (8, 0), (1, 2, 3): (8, 0),
    (2, 1, 1): (8, 0), (2, 1, 2): (0, 8), (2, 1, 3): (8, 0),
    (2, 2, 1): (8, 0), (2, 2, 2): (8, 0), (2, 2, 3): (8, 0),
    (2, 3, 1): (0, 8), (2, 3, 2): (8, 0), (2, 3, 3): (8, 0),
    (3, 1, 1): (0, 8), (3, 1, 2): (0, 8), (3, 1, 3): (8, 0),
    (3, 2, 1): (8, 0), (3, 2, 2): (0, 8), (3, 2, 3): (8, 0),
    (3, 3, 1): (8, 0), (3, 3, 2): (0, 8), (3, 3, 3): (8, 0),
    (4, 1, 1): (0, 8), (4, 1, 2): (8, 0), (4, 1, 3): (0, 8),
    (4, 2, 1): (0, 8), (4, 2, 2): (8, 0), (4, 2, 3): (0, 8),
    (4, 3, 1): (0, 8), (4, 3, 2): (8, 0), (4, 3, 3): (8, 0),
    (5, 1, 1): (0, 8), (5, 1, 2): (0, 8), (5, 1, 3): (8, 0),
    (5, 2, 1): (0, 8), (5, 2, 2): (0, 8), (5, 2, 3): (0, 8),
    (5, 3, 1): (0, 8), (5, 3, 2): (8, 0), (5, 3, 3): (0, 8),
    (6, 2, 1): (0, 8), (6, 2, 2): (0, 8), (6, 2, 3): (0, 8),
    (6, 3, 1): (0, 8), (6, 3, 2): (8, 0), (6, 3, 3): (0, 8),
}

FIXED_AGENTS = {
    "fixed_optimal_1sv": (FIXED_WEIGHTS_1SV, ("angle",)),
    "fixed_optimal_2sv": (FIXED_WEIGHTS_2SV, ("angle", "cart_velocity")),
    "fixed_optimal_3sv": (
        FIXED_WEIGHTS_3SV,
        ("angle", "displacement", "cart_velocity"),
    ),
}

AGENT_KINDS = ("tlearn", "qlearn_baseline", "naive") + tuple(FIXED_AGENTS)


def fixed_agent_lookup(kind: str, intervals: tuple[int, ...],
                       chooser: ConsistentChoice | None = None) -> int:
    """Action for one interval tuple of a fixed reference policy."""
    table, _ = FIXED_AGENTS[kind]
    pair = table.get(tuple(intervals))
    if pair is None:
        if chooser is None:
            return 0
        return chooser.pick(("missing", tuple(intervals)), [0, 1])
    if chooser is not None:
        chooser.note_decisive()
    return 0 if pair[0] > pair[1] else 1


# ---------------------------------------------------------------------------
# Agent classes


class Agent:
    """Common episode-loop surface; subclasses override what they need."""

    kind = "agent"
    last_cid: int | None = None

    def begin_episode(self):
        pass

    def act(self, state: CartPoleState, phase: str) -> int:
        raise NotImplementedError

    def learn(self, reward: int, next_state: CartPoleState, phase: str):
        pass


class NaiveAgent(Agent):
    """Push toward the lean: the only sensible angle-only policy."""

    kind = "naive"

    def __init__(self, mirror: bool = False):
        self.mirror = mirror

    def act(self, state, phase):
        lean_right = state.angle >= 0
        if self.mirror:
            lean_right = not lean_right
        return 1 if lean_right else 0


class FixedPolicyAgent(Agent):
    """Interval-tuple lookup into a hand-set weight table."""

    def __init__(self, kind: str, specs: dict, tie_rng=None):
        table, sv_names = FIXED_AGENTS[kind]
        self.kind = kind
        self.table = table
        self._getters = [STATE_GETTERS[name] for name in sv_names]
        try:
            self._specs = [specs[name] for name in sv_names]
        except KeyError as missing:
            raise ValueError(
                f"{kind} needs an interval spec for {missing.args[0]}"
            ) from None
        self.chooser = ConsistentChoice(tie_rng) if tie_rng is not None else None

    def begin_episode(self):
        if self.chooser is not None:
            self.chooser.clear()

    def act(self, state, phase):
        intervals = tuple(
            discretize(get(state), spec)
            for get, spec in zip(self._getters, self._specs)
        )
        return fixed_agent_lookup(self.kind, intervals, self.chooser)


class TLearningAgent(Agent):
    """Clustering column cascaded into a reinforcement column.

    Per step: encode, cluster (which also assimilates the volley), pick
    the action for the cluster id and record it; after the environment
    advances, apply any reward and advance the credit counters.
    """

    kind = "tlearn"

    def __init__(self, encoder: StateEncoder, ctnn: ClusteringColumn,
                 rtnn: ReinforcementColumn, sv_set):
        self.encoder = encoder
        self.ctnn = ctnn
        self.rtnn = rtnn
        self._getters = [STATE_GETTERS[name] for name in sv_set]
        self._prepared: dict = {}
        self.last_cid = None

    def begin_episode(self):
        self.rtnn.reset_transients()

    def act(self, state, phase):
        values = [get(state) for get in self._getters]
        key, volley = self.encoder.encode(values)
        idx = self._prepared.get(key)
        if idx is None:
            idx = np.array(volley.finite_lines(), dtype=np.intp)
            self._prepared[key] = idx
        winner, _ = self.ctnn.step_prepared(idx, None)
        action = self.rtnn.infer_row(winner)
        self.rtnn.record(winner, action)
        self.last_cid = winner
        return action

    def learn(self, reward, next_state, phase):
        self.rtnn.apply_reward(reward)
        self.rtnn.tick()


class QBaselineAgent(Agent):
    """Q-table that explores through an embedded two-column learner.

    During warm-up the embedded learner chooses actions (and learns), so
    the Q-table observes exactly the state sequence the learner would
    see on its own; during test the greedy table policy takes over while
    Bellman updates continue.
    """

    kind = "qlearn_baseline"

    def __init__(self, explorer: TLearningAgent, qtable: QTable, sv_set):
        self.explorer = explorer
        self.qtable = qtable
        self._getters = [STATE_GETTERS[name] for name in sv_set]
        self._pending: tuple[int, int] | None = None

    def _state_index(self, state) -> int:
        values = [get(state) for get in self._getters]
        return state_index(
            self.explorer.encoder.intervals(values), self.qtable.counts
        )

    def begin_episode(self):
        self.explorer.begin_episode()
        self._pending = None

    def act(self, state, phase):
        s = self._state_index(state)
        if phase == WARMUP:
            action = self.explorer.act(state, phase)
        else:
            action = self.qtable.policy(s)
        self._pending = (s, action)
        self.last_cid = self.explorer.last_cid if phase == WARMUP else None
        return action

    def learn(self, reward, next_state, phase):
        s_prev, a_prev = self._pending
        self.qtable.update(s_prev, a_prev, self._state_index(next_state), reward)
        if phase == WARMUP:
            self.explorer.learn(reward, next_state, phase)
