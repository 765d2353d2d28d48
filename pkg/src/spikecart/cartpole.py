"""Cart-pole physics, episode initialization and the reward schedule.

State is kept in physical units (radians internally for the angle;
degrees only at the encoder/failure boundary) and advanced by explicit
Euler at a fixed 0.02 s step.  An episode ends when the pole leaves
+/-12 degrees (punishment), the cart leaves +/-2.4 m (no reward), or
10,000 steps complete; surviving each 500th step earns a reward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

POLE_LIMIT_DEG = 12.0
TRACK_LIMIT_M = 2.4
REWARD_PERIOD = 500
MAX_STEPS = 10_000

OK = "ok"
POLE_FAILURE = "pole_failure"
TRACK_FAILURE = "track_failure"
MAX_STEPS_REACHED = "max_steps"


@dataclass(frozen=True)
class CartPoleParams:
    cart_mass: float = 0.711  # kg
    pole_mass: float = 0.209  # kg
    gravity: float = 9.8      # m/s^2
    force: float = 10.0       # N, magnitude of each push
    half_length: float = 0.326  # m, pivot to pole center of mass
    tau: float = 0.02         # s, integration step
    integrator: str = "euler"  # or "semi_implicit"

    def __post_init__(self):
        if self.integrator not in ("euler", "semi_implicit"):
            raise ValueError(f"unknown integrator {self.integrator!r}")


@dataclass(frozen=True)
class CartPoleState:
    angle: float = 0.0    # rad, positive = pole leaning right
    ang_vel: float = 0.0  # rad/s
    pos: float = 0.0      # m, cart displacement
    vel: float = 0.0      # m/s

    @property
    def angle_deg(self) -> float:
        return math.degrees(self.angle)


def dynamics(
    state: CartPoleState, applied_force: float, params: CartPoleParams
) -> tuple[float, float]:
    """Closed-form angular and linear accelerations (rad/s^2, m/s^2).

    Positive force pushes the cart right; a push tips the pole the
    other way, so the system is odd-symmetric under mirroring.
    """
    total = params.cart_mass + params.pole_mass
    ml = params.pole_mass * params.half_length
    sin_a = math.sin(state.angle)
    cos_a = math.cos(state.angle)
    ang_acc = (
        total * params.gravity * sin_a
        - cos_a * (applied_force + ml * state.ang_vel**2 * sin_a)
    ) / ((4.0 / 3.0) * total * params.half_length - ml * cos_a**2)
    lin_acc = (
        applied_force + ml * (state.ang_vel**2 * sin_a - ang_acc * cos_a)
    ) / total
    return ang_acc, lin_acc


def step_env(
    state: CartPoleState, applied_force: float, params: CartPoleParams
) -> CartPoleState:
    """One fixed-step integration of the equations of motion.

    The default explicit Euler updates positions with the old
    velocities; the semi-implicit variant uses the freshly updated ones.
    """
    ang_acc, lin_acc = dynamics(state, applied_force, params)
    tau = params.tau
    new_ang_vel = state.ang_vel + tau * ang_acc
    new_vel = state.vel + tau * lin_acc
    if params.integrator == "euler":
        return CartPoleState(
            angle=state.angle + tau * state.ang_vel,
            ang_vel=new_ang_vel,
            pos=state.pos + tau * state.vel,
            vel=new_vel,
        )
    return CartPoleState(
        angle=state.angle + tau * new_ang_vel,
        ang_vel=new_ang_vel,
        pos=state.pos + tau * new_vel,
        vel=new_vel,
    )


def check_and_reward(
    state: CartPoleState, step_count: int, max_steps: int = MAX_STEPS
) -> tuple[str, int]:
    """Episode status and reward after completing step ``step_count``.

    Pole failure is punished; a track failure ends the episode without
    reward; every 500th surviving step earns +1 (including the last step
    of a maximum-length episode).
    """
    if abs(state.angle_deg) > POLE_LIMIT_DEG:
        return POLE_FAILURE, -1
    if abs(state.pos) > TRACK_LIMIT_M:
        return TRACK_FAILURE, 0
    reward = 1 if step_count % REWARD_PERIOD == 0 else 0
    if step_count >= max_steps:
        return MAX_STEPS_REACHED, reward
    return OK, reward


def init_episode(rng, angle_range_deg: float) -> CartPoleState:
    """Fresh state: uniform random initial lean, everything else at rest."""
    if angle_range_deg <= 0:
        raise ValueError("angle range must be positive")
    angle = math.radians(rng.uniform(-angle_range_deg, angle_range_deg))
    return CartPoleState(angle=angle)


def mirror(state: CartPoleState) -> CartPoleState:
    return replace(
        state,
        angle=-state.angle,
        ang_vel=-state.ang_vel,
        pos=-state.pos,
        vel=-state.vel,
    )
