"""Agents: naive sign policy, fixed reference tables, Q-table wrapper."""

import math

import pytest

from spikecart.agents import (
    FIXED_WEIGHTS_1SV,
    FIXED_WEIGHTS_2SV,
    FIXED_WEIGHTS_3SV,
    FORCE_SIGNS,
    FixedPolicyAgent,
    NaiveAgent,
    fixed_agent_lookup,
)
from spikecart.cartpole import CartPoleState
from spikecart.encoder import IntervalSpec
from spikecart.rng import SplitMix64

SPECS = {
    "angle": IntervalSpec((-12.0, -6.0, -1.0, 0.0, 1.0, 6.0, 12.0)),
    "displacement": IntervalSpec((-2.4, -0.8, 0.8, 2.4)),
    "cart_velocity": IntervalSpec((-math.inf, -5.0, 5.0, math.inf)),
}


class TestNaive:
    def test_pushes_toward_lean(self):
        agent = NaiveAgent()
        assert agent.act(CartPoleState(angle=0.05), "test") == 1
        assert agent.act(CartPoleState(angle=-0.05), "test") == 0
        assert agent.act(CartPoleState(angle=0.0), "test") == 1

    def test_mirror_convention(self):
        agent = NaiveAgent(mirror=True)
        assert agent.act(CartPoleState(angle=0.05), "test") == 0

    def test_force_signs(self):
        assert FORCE_SIGNS == (-1.0, 1.0)


class TestFixedTables:
    def test_row_counts(self):
        assert len(FIXED_WEIGHTS_1SV) == 6
        assert len(FIXED_WEIGHTS_2SV) == 18
        assert len(FIXED_WEIGHTS_3SV) == 48

    def test_missing_rows_are_the_unreachable_corners(self):
        missing = {
            (a, d, v)
            for a in range(1, 7)
            for d in range(1, 4)
            for v in range(1, 4)
        } - set(FIXED_WEIGHTS_3SV)
        assert missing == {(1, 3, v) for v in (1, 2, 3)} | {
            (6, 1, v) for v in (1, 2, 3)
        }

    def test_spot_checks(self):
        assert FIXED_WEIGHTS_1SV[(2,)] == (8, 0)
        assert FIXED_WEIGHTS_2SV[(1, 1)] == (0, 8)
        assert FIXED_WEIGHTS_3SV[(3, 1, 2)] == (0, 8)

    def test_one_sv_is_the_sign_policy(self):
        for interval in range(1, 7):
            action = fixed_agent_lookup("fixed_optimal_1sv", (interval,))
            assert action == (0 if interval <= 3 else 1)

    def test_mirror_antisymmetry(self):
        # the hand-set tables are symmetric around the pole angle: the
        # mirrored interval tuple always takes the opposite action
        for (a,), pair in FIXED_WEIGHTS_1SV.items():
            assert FIXED_WEIGHTS_1SV[(7 - a,)] == pair[::-1]
        for (a, v), pair in FIXED_WEIGHTS_2SV.items():
            assert FIXED_WEIGHTS_2SV[(7 - a, 4 - v)] == pair[::-1]
        for (a, d, v), pair in FIXED_WEIGHTS_3SV.items():
            assert FIXED_WEIGHTS_3SV[(7 - a, 4 - d, 4 - v)] == pair[::-1]

    def test_weight_pairs_are_decisive(self):
        for table in (FIXED_WEIGHTS_1SV, FIXED_WEIGHTS_2SV, FIXED_WEIGHTS_3SV):
            assert set(table.values()) <= {(8, 0), (0, 8)}


class TestFixedAgent:
    def test_lookup_through_state(self):
        agent = FixedPolicyAgent("fixed_optimal_2sv", SPECS)
        state = CartPoleState(angle=math.radians(-8.0), vel=0.0)
        # angle interval 1, velocity interval 2 -> push left
        assert agent.act(state, "test") == 0

    def test_three_sv_uses_displacement(self):
        agent = FixedPolicyAgent("fixed_optimal_3sv", SPECS)
        state = CartPoleState(angle=math.radians(-0.5), pos=-1.0, vel=0.0)
        # row (3, 1, 2) -> push right
        assert agent.act(state, "test") == 1

    def test_missing_row_fallback_is_consistent(self):
        agent = FixedPolicyAgent(
            "fixed_optimal_3sv", SPECS, tie_rng=SplitMix64(4, "ties")
        )
        state = CartPoleState(angle=math.radians(10.0), pos=-2.0, vel=0.0)
        picks = {agent.act(state, "test") for _ in range(10)}
        assert len(picks) == 1

    def test_missing_row_without_rng_defaults(self):
        assert fixed_agent_lookup("fixed_optimal_3sv", (6, 1, 1)) == 0

    def test_requires_specs(self):
        with pytest.raises(ValueError, match="cart_velocity"):
            FixedPolicyAgent("fixed_optimal_2sv", {"angle": SPECS["angle"]})
