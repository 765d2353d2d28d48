"""Reinforcement column: one-hot input to one-hot action, reward-gated.

Inference picks the highest-weighted action wired to the active input
line, provided its ceiled weight reaches the threshold; ties and
sub-threshold rows fall back to a consistent pseudo-random choice that
repeats while the same situation recurs on consecutive steps.

Learning is three-factor: each synapse keeps a step counter ``c`` (steps
since its input line last spiked, saturating) and a flag ``e`` (did its
neuron fire the last time the line spiked).  A broadcast reward updates
every synapse still inside the relevant window, by an amount that decays
linearly from the full increment at ``c = 0`` to zero at the window
edge; on-path synapses (``e = 1``) and off-path synapses of the same row
always move in opposite directions.

Because input and output are one-hot, ``c`` is constant across each row
and is stored per row; likewise ``e`` reduces to "which action fired for
this row last" and is stored as one action index per row.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .spike import ConsistentChoice, Volley, WEIGHT_SCALE, quantize


@dataclass(frozen=True)
class RTNNParams:
    theta: int = 2
    rho_plus: Fraction = Fraction(3, 2)
    rho_minus: Fraction = Fraction(3, 2)
    omega_rho: int = 2
    pi_plus: Fraction = Fraction(3, 2)
    pi_minus: Fraction = Fraction(3, 2)
    omega_pi: int = 16
    w_max: int = 8
    w_init: Fraction = Fraction(5)

    def __post_init__(self):
        if self.omega_rho < 1 or self.omega_pi < 1:
            raise ValueError("update windows must be >= 1")
        for name in ("rho_plus", "rho_minus", "pi_plus", "pi_minus"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not 0 <= self.w_init <= self.w_max:
            raise ValueError("w_init must lie in [0, w_max]")


class ReinforcementColumn:
    def __init__(
        self,
        width: int,
        actions: int,
        params: RTNNParams,
        tie_rng=None,
        weight_rng=None,
    ):
        if width < 1 or actions < 1:
            raise ValueError("column needs >= 1 input line and action")
        self.width = width
        self.actions = actions
        self.params = params
        # A scale of 128 * lcm(windows) keeps the linearly decayed
        # increments exactly representable for every counter value.
        self.scale = WEIGHT_SCALE * lcm(params.omega_rho, params.omega_pi)
        self._max_units = params.w_max * self.scale
        # Increments sit on the 1/128 grid; the finer column scale then
        # makes every linearly decayed amount an exact integer.
        step = self.scale // WEIGHT_SCALE
        self._rho_plus = quantize(params.rho_plus, WEIGHT_SCALE) * step
        self._rho_minus = quantize(params.rho_minus, WEIGHT_SCALE) * step
        self._pi_plus = quantize(params.pi_plus, WEIGHT_SCALE) * step
        self._pi_minus = quantize(params.pi_minus, WEIGHT_SCALE) * step
        self._c_sat = max(params.omega_rho, params.omega_pi)
        if weight_rng is None:
            init = quantize(params.w_init, self.scale)
            self.weights = np.full((width, actions), init, dtype=np.int64)
        else:
            step = self.scale // WEIGHT_SCALE
            self.weights = np.array(
                [
                    [weight_rng.randrange(params.w_max * WEIGHT_SCALE + 1) * step
                     for _ in range(actions)]
                    for _ in range(width)
                ],
                dtype=np.int64,
            )
        # Per-row counter and last-action flag; rows start saturated with
        # no recorded action so rewards never touch never-visited rows.
        self.c = np.full(width, self._c_sat, dtype=np.int64)
        self.e = np.full(width, -1, dtype=np.int64)
        self.chooser = ConsistentChoice(tie_rng) if tie_rng is not None else None
        self._all_actions = list(range(actions))

    # -- inference ------------------------------------------------------------

    def infer_row(self, row: int | None) -> int:
        """Action for the active input line (or the no-input fallback)."""
        if row is None:
            return self._fallback(("noinput",))
        w = self.weights[row]
        ceil_w = -(-w // self.scale)
        top = int(ceil_w.max())
        if top < self.params.theta:
            return self._fallback(("none", row))
        tied = np.flatnonzero(ceil_w == top)
        if tied.size == 1:
            if self.chooser is not None:
                self.chooser.note_decisive()
            return int(tied[0])
        if self.chooser is None:
            return int(tied[0])
        key = ("tie", row, tuple(int(j) for j in tied))
        return self.chooser.pick(key, [int(j) for j in tied])

    def _fallback(self, key) -> int:
        if self.chooser is None:
            return 0
        return self.chooser.pick(key, self._all_actions)

    def infer(self, cid: Volley) -> int:
        if cid.width != self.width:
            raise ValueError(
                f"cid width {cid.width} != column width {self.width}"
            )
        finite = cid.finite_lines()
        if len(finite) > 1:
            raise ValueError("cid must be one-hot")
        return self.infer_row(finite[0] if finite else None)

    # -- per-step state -------------------------------------------------------

    def record(self, row: int | None, action: int):
        """Clear the active row's counter and remember its action."""
        if row is None:
            return
        self.c[row] = 0
        self.e[row] = action

    def tick(self):
        """Advance every counter one step, saturating."""
        np.minimum(self.c + 1, self._c_sat, out=self.c)

    def reset_transients(self):
        """Forget counters, flags and tie memory (weights persist).

        Called between episodes: credit windows and tie consecutiveness
        are meaningful only within one run of consecutive steps.
        """
        self.c.fill(self._c_sat)
        self.e.fill(-1)
        if self.chooser is not None:
            self.chooser.clear()

    # -- learning ---------------------------------------------------------------

    def decay_units(self, base_units: int, window: int, c: int) -> int:
        """Linearly decayed increment: full at c = 0, zero at c = window."""
        return base_units * (window - c) // window

    def apply_reward(self, reward: int):
        """Three-factor update of every synapse inside the window."""
        if reward == 0:
            return
        if reward == 1:
            window = self.params.omega_rho
            on_units, off_units = self._rho_plus, -self._rho_minus
        elif reward == -1:
            window = self.params.omega_pi
            on_units, off_units = -self._pi_minus, self._pi_plus
        else:
            raise ValueError(f"reward must be -1, 0 or +1, got {reward}")
        rows = np.flatnonzero(self.c < window)
        if rows.size == 0:
            return
        frac = window - self.c[rows]
        on = on_units * frac // window
        off = off_units * frac // window
        block = self.weights[rows]
        block += off[:, None]
        eact = self.e[rows]
        has = eact >= 0
        block[np.flatnonzero(has), eact[has]] += (on - off)[has]
        np.clip(block, 0, self._max_units, out=block)
        self.weights[rows] = block

    # -- persistence ------------------------------------------------------------

    def dump(self, path):
        from .ctnn import write_weights

        write_weights(path, self.weights, self.params.w_max, self.scale)

    def load(self, path):
        from .ctnn import read_weights

        self.weights = read_weights(
            path, self.width, self.actions, self.params.w_max, self.scale
        )

    def dump_state(self, path):
        """Debug dump of per-row counters and last-action flags."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("row c e_action\n")
            for i in range(self.width):
                fh.write(f"{i} {int(self.c[i])} {int(self.e[i])}\n")
