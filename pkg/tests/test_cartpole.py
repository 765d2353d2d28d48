"""Cart-pole physics against an independent closed-form oracle."""

import math

import pytest
from hypothesis import given, strategies as st

from spikecart.cartpole import (
    MAX_STEPS_REACHED,
    OK,
    POLE_FAILURE,
    TRACK_FAILURE,
    CartPoleParams,
    CartPoleState,
    check_and_reward,
    dynamics,
    init_episode,
    mirror,
    step_env,
)
from spikecart.rng import SplitMix64

PARAMS = CartPoleParams()

# Frozen outputs of the standalone oracle script (exact rational
# evaluation of the closed-form accelerations at the upright rest state
# with a +10 N push): -15000000/497639 rad/s^2 and 40000/3053 m/s^2.
ANG_ACC_REST_PUSH = -30.142332092139082
LIN_ACC_REST_PUSH = 13.101867016049788

# Frozen per-component divergence bounds between the 0.02 s Euler
# trajectory and a 100x finer reference over 1 s from a 1 degree lean
# with alternating force (oracle-measured, rounded up at the last digit).
DIVERGENCE_BOUNDS = (0.5423932712, 1.5472859910, 0.0425443713, 0.3653455041)


def oracle_acc(angle, ang_vel, force):
    """Independent evaluation of the accelerations (different op order)."""
    cart, pole, grav, half = 0.711, 0.209, 9.8, 0.326
    s, c = math.sin(angle), math.cos(angle)
    top = (cart + pole) * grav * s - c * (force + pole * half * ang_vel**2 * s)
    bottom = (4.0 / 3.0) * (cart + pole) * half - pole * half * c * c
    a = top / bottom
    d = (force + pole * half * (ang_vel**2 * s - a * c)) / (cart + pole)
    return a, d


class TestDynamics:
    def test_frozen_rest_push_constants(self):
        ang, lin = dynamics(CartPoleState(), 10.0, PARAMS)
        assert ang == pytest.approx(ANG_ACC_REST_PUSH, abs=1e-12)
        assert lin == pytest.approx(LIN_ACC_REST_PUSH, abs=1e-12)

    def test_equilibrium(self):
        assert dynamics(CartPoleState(), 0.0, PARAMS) == (0.0, 0.0)

    def test_oracle_equivalence_on_random_states(self):
        rng = SplitMix64(42, "dynamics")
        for _ in range(1000):
            state = CartPoleState(
                angle=rng.uniform(-0.3, 0.3),
                ang_vel=rng.uniform(-3, 3),
                pos=rng.uniform(-2.4, 2.4),
                vel=rng.uniform(-3, 3),
            )
            force = rng.uniform(-10, 10)
            got = dynamics(state, force, PARAMS)
            want = oracle_acc(state.angle, state.ang_vel, force)
            assert got[0] == pytest.approx(want[0], abs=1e-12)
            assert got[1] == pytest.approx(want[1], abs=1e-12)

    @given(
        angle=st.floats(-0.2, 0.2),
        ang_vel=st.floats(-2, 2),
        force=st.floats(-10, 10),
    )
    def test_odd_symmetry(self, angle, ang_vel, force):
        state = CartPoleState(angle=angle, ang_vel=ang_vel)
        neg = CartPoleState(angle=-angle, ang_vel=-ang_vel)
        a1, d1 = dynamics(state, force, PARAMS)
        a2, d2 = dynamics(neg, -force, PARAMS)
        assert a2 == pytest.approx(-a1, abs=1e-12)
        assert d2 == pytest.approx(-d1, abs=1e-12)


class TestStepEnv:
    def test_euler_from_rest_keeps_old_positions(self):
        new = step_env(CartPoleState(), 10.0, PARAMS)
        assert new.pos == 0.0 and new.angle == 0.0
        assert new.vel == pytest.approx(0.02 * LIN_ACC_REST_PUSH)
        assert new.ang_vel == pytest.approx(0.02 * ANG_ACC_REST_PUSH)

    def test_semi_implicit_moves_positions_immediately(self):
        params = CartPoleParams(integrator="semi_implicit")
        new = step_env(CartPoleState(), 10.0, params)
        assert new.pos == pytest.approx(0.02 * new.vel)

    def test_fifty_steps_are_one_second(self):
        assert 50 * PARAMS.tau == pytest.approx(1.0)

    def test_divergence_from_fine_reference_within_bounds(self):
        # coarse trajectory via the package, fine one via the oracle
        state = CartPoleState(angle=math.radians(1.0))
        coarse = []
        for k in range(50):
            force = 10.0 if k % 2 == 0 else -10.0
            state = step_env(state, force, PARAMS)
            coarse.append((state.angle, state.ang_vel, state.pos, state.vel))

        fine = []
        y = (math.radians(1.0), 0.0, 0.0, 0.0)
        dt = 0.0002
        for k in range(5000):
            force = 10.0 if (k // 100) % 2 == 0 else -10.0
            a, d = oracle_acc(y[0], y[1], force)
            y = (y[0] + dt * y[1], y[1] + dt * a, y[2] + dt * y[3], y[3] + dt * d)
            fine.append(y)

        for i in range(50):
            ref = fine[(i + 1) * 100 - 1]
            for j, bound in enumerate(DIVERGENCE_BOUNDS):
                assert abs(coarse[i][j] - ref[j]) <= bound

    def test_mirror_symmetry_bit_exact(self):
        rng = SplitMix64(3, "mirror")
        state = CartPoleState(angle=0.02, ang_vel=0.1, pos=0.5, vel=-0.2)
        twin = mirror(state)
        for _ in range(200):
            force = 10.0 if rng.randrange(2) else -10.0
            state = step_env(state, force, PARAMS)
            twin = step_env(twin, -force, PARAMS)
            assert twin.angle == -state.angle
            assert twin.ang_vel == -state.ang_vel
            assert twin.pos == -state.pos
            assert twin.vel == -state.vel

    def test_unknown_integrator_rejected(self):
        with pytest.raises(ValueError):
            CartPoleParams(integrator="rk4")


class TestCheckAndReward:
    def in_range(self, **kw):
        return CartPoleState(**kw)

    def test_reward_every_500th_step(self):
        assert check_and_reward(self.in_range(), 500) == (OK, 1)
        assert check_and_reward(self.in_range(), 501) == (OK, 0)
        assert check_and_reward(self.in_range(), 1000) == (OK, 1)
        assert check_and_reward(self.in_range(), 499) == (OK, 0)

    def test_pole_failure_is_punished(self):
        state = CartPoleState(angle=math.radians(12.3))
        assert check_and_reward(state, 7) == (POLE_FAILURE, -1)
        state = CartPoleState(angle=math.radians(-12.3))
        assert check_and_reward(state, 7) == (POLE_FAILURE, -1)

    def test_track_failure_has_zero_reward(self):
        state = CartPoleState(pos=2.5)
        assert check_and_reward(state, 500) == (TRACK_FAILURE, 0)

    def test_pole_takes_precedence_over_track(self):
        state = CartPoleState(angle=math.radians(13), pos=3.0)
        assert check_and_reward(state, 1) == (POLE_FAILURE, -1)

    def test_max_steps_keeps_final_reward(self):
        assert check_and_reward(self.in_range(), 10_000) == (
            MAX_STEPS_REACHED,
            1,
        )
        assert check_and_reward(self.in_range(), 1, max_steps=1) == (
            MAX_STEPS_REACHED,
            0,
        )

    def test_full_episode_earns_twenty_rewards(self):
        total = sum(
            check_and_reward(self.in_range(), step)[1]
            for step in range(1, 10_001)
        )
        assert total == 20

    def test_boundary_values_are_in_range(self):
        # the limits themselves do not fail; only strictly beyond does
        assert check_and_reward(CartPoleState(pos=2.4), 1)[0] == OK
        just_inside = math.radians(11.9999)
        assert check_and_reward(CartPoleState(angle=just_inside), 1)[0] == OK


class TestInitEpisode:
    def test_uniform_range(self):
        rng = SplitMix64(1, "angles")
        angles = [
            init_episode(rng, 2.0).angle_deg for _ in range(2000)
        ]
        assert all(-2.0 <= a < 2.0 for a in angles)
        assert min(angles) < -1.5 and max(angles) > 1.5

    def test_everything_else_at_rest(self):
        state = init_episode(SplitMix64(5, "angles"), 1.5)
        assert state.ang_vel == 0.0 and state.pos == 0.0 and state.vel == 0.0

    def test_zero_stub_gives_upright(self):
        class Zero:
            def uniform(self, lo, hi):
                return 0.0

        assert init_episode(Zero(), 2.0) == CartPoleState()

    def test_range_must_be_positive(self):
        with pytest.raises(ValueError):
            init_episode(SplitMix64(1, "angles"), 0.0)
