"""Tabular Q-learning baseline.

One row per discretized state (mixed-radix index over the per-variable
interval indices), one column per action.  The table is updated with the
standard one-step Bellman rule at every step, whatever policy chose the
action, so it can shadow-learn while another agent explores.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class QParams:
    alpha: float = 0.9
    gamma: float = 0.95

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if not 0 <= self.gamma < 1:
            raise ValueError("gamma must lie in [0, 1)")


def state_index(indices: Sequence[int], counts: Sequence[int]) -> int:
    """Mixed-radix row index of a 1-based interval tuple (first variable
    most significant); bijective onto ``range(prod(counts))``."""
    if len(indices) != len(counts):
        raise ValueError("indices and counts must have equal length")
    row = 0
    for i, n in zip(indices, counts):
        if not 1 <= i <= n:
            raise ValueError(f"interval index {i} outside 1..{n}")
        row = row * n + (i - 1)
    return row


class QTable:
    """Zero-initialized S x A value table with Bellman updates."""

    def __init__(self, counts: Sequence[int], params: QParams, actions: int = 2):
        self.counts = tuple(counts)
        self.params = params
        states = 1
        for n in self.counts:
            states *= n
        self.values = np.zeros((states, actions), dtype=np.float64)

    def update(self, s_prev: int, a_prev: int, s_cur: int, reward: float):
        """One Bellman backup; touches exactly one entry."""
        alpha, gamma = self.params.alpha, self.params.gamma
        best_next = self.values[s_cur].max()
        self.values[s_prev, a_prev] = self.values[s_prev, a_prev] * (
            1.0 - alpha
        ) + alpha * (reward + gamma * best_next)

    def policy(self, s: int) -> int:
        """Greedy action; exact ties go to the lowest action index."""
        return int(np.argmax(self.values[s]))

    def dump_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["state"] + [f"q_action_{a}" for a in range(self.values.shape[1])]
            )
            for s, row in enumerate(self.values):
                writer.writerow([s] + [repr(float(v)) for v in row])
