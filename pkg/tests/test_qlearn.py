"""Tabular Q-learning against an independently coded Bellman oracle."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spikecart.qlearn import QParams, QTable, state_index
from spikecart.rng import SplitMix64


class TestStateIndex:
    def test_single_variable(self):
        assert state_index((5,), (16,)) == 4

    def test_first_tuple_is_row_zero(self):
        assert state_index((1, 1, 1), (6, 3, 3)) == 0

    def test_last_tuple_is_final_row(self):
        assert state_index((6, 3, 3), (6, 3, 3)) == 53

    def test_bijection(self):
        counts = (6, 3, 3)
        seen = {
            state_index((i, j, k), counts)
            for i in range(1, 7)
            for j in range(1, 4)
            for k in range(1, 4)
        }
        assert seen == set(range(54))

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            state_index((0,), (16,))
        with pytest.raises(ValueError):
            state_index((17,), (16,))
        with pytest.raises(ValueError):
            state_index((1, 1), (16,))


def bellman_oracle(q, s_prev, a_prev, s_cur, r, alpha, gamma):
    """Plain-Python reference for one backup."""
    best = max(q[s_cur])
    return q[s_prev][a_prev] + alpha * (r + gamma * best - q[s_prev][a_prev])


class TestBellmanUpdate:
    def test_worked_example(self):
        table = QTable((4,), QParams(alpha=0.9, gamma=0.95), actions=4)
        table.values[0] = [0.24, 0.01, 0.04, 0.05]
        table.values[2] = [0.07, 0.41, 0.08, 0.06]
        table.update(0, 0, 2, 0.0)
        assert table.values[0, 0] == pytest.approx(0.37455, abs=1e-12)

    def test_alpha_zero_is_identity(self):
        with pytest.raises(ValueError):
            QParams(alpha=0.0)

    def test_locality(self):
        table = QTable((5,), QParams())
        table.values[:] = 1.0
        table.update(2, 1, 3, -1.0)
        changed = np.argwhere(table.values != 1.0)
        assert changed.tolist() == [[2, 1]]

    def test_oracle_equivalence_on_random_tables(self):
        rng = SplitMix64(13, "bellman")
        for _ in range(1000):
            alpha = 0.05 + 0.95 * rng.random()
            gamma = 0.99 * rng.random()
            table = QTable((5,), QParams(alpha=alpha, gamma=gamma))
            table.values[:] = np.array(
                [[rng.uniform(-2, 2) for _ in range(2)] for _ in range(5)]
            )
            s_prev, a_prev = rng.randrange(5), rng.randrange(2)
            s_cur = rng.randrange(5)
            r = float(rng.randrange(3) - 1)
            expected = bellman_oracle(
                table.values.tolist(), s_prev, a_prev, s_cur, r, alpha, gamma
            )
            table.update(s_prev, a_prev, s_cur, r)
            assert table.values[s_prev, a_prev] == pytest.approx(
                expected, abs=1e-12
            )

    def test_zero_rewards_keep_zero_table(self):
        table = QTable((16,), QParams())
        rng = SplitMix64(8, "walk")
        for _ in range(500):
            table.update(rng.randrange(16), rng.randrange(2),
                         rng.randrange(16), 0.0)
        assert not table.values.any()


class TestPolicy:
    def test_highest_value_wins(self):
        table = QTable((4,), QParams(), actions=4)
        table.values[2] = [0.07, 0.41, 0.08, 0.06]
        assert table.policy(2) == 1

    def test_tie_goes_to_lowest_action(self):
        table = QTable((2,), QParams())
        assert table.policy(0) == 0

    def test_strict_comparison(self):
        table = QTable((1,), QParams())
        table.values[0] = [0.1, 0.1 + 1e-15]
        assert table.policy(0) == 1

    @given(st.integers(1, 8), st.integers(0, 2**32 - 1))
    def test_policy_in_range(self, actions, seed):
        table = QTable((3,), QParams(), actions=actions)
        rng = SplitMix64(seed, "policy")
        table.values[:] = np.array(
            [[rng.uniform(-1, 1) for _ in range(actions)] for _ in range(3)]
        )
        for s in range(3):
            assert 0 <= table.policy(s) < actions


class TestDump:
    def test_csv_roundtrip(self, tmp_path):
        table = QTable((3,), QParams())
        table.values[1, 0] = 0.5
        path = tmp_path / "q.csv"
        table.dump_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "state,q_action_0,q_action_1"
        assert lines[2].startswith("1,0.5,")
