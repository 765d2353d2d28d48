"""Clustering column: concurrent one-hot inference and two-case STDP.

A column is a synaptic crossbar (one weight per input line and neuron)
feeding parallel ramp-response neurons, with 1-WTA inhibition over the
outputs.  Every presented volley is both classified (the winner's index
is the cluster id) and assimilated: the winner's spiking synapses are
potentiated (capture), its silent ones depressed (backoff), and when no
neuron fires at all, every spiking synapse drifts up by the search
increment so dormant neurons can eventually claim shifted inputs.

Weight counters are integers over a fixed scale of 128, updated with
saturating adds; only their ceilings are used for inference.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .spike import (
    INF,
    Volley,
    WEIGHT_SCALE,
    make_response,
    quantize,
)


@dataclass(frozen=True)
class CTNNParams:
    theta: int
    mu_c: Fraction = Fraction(1, 16)
    mu_b: Fraction = Fraction(1, 16)
    mu_s: Fraction = Fraction(0)
    zcnt: int = 16
    w_max: int = 8
    w_init: Fraction = Fraction(5)
    t_max: int = 4
    offset_low_weights: bool = True

    def __post_init__(self):
        if self.theta < 1 or self.w_max < 1 or self.t_max < 1:
            raise ValueError("theta, w_max and t_max must be >= 1")
        if self.zcnt < 0:  # 0 defers to the experiment config's resolution
            raise ValueError("zcnt must be >= 0")
        for name in ("mu_c", "mu_b", "mu_s"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not 0 <= self.w_init <= self.w_max:
            raise ValueError("w_init must lie in [0, w_max]")


class ClusteringColumn:
    """Mutable column state: weights plus the learning parameters."""

    def __init__(self, width: int, params: CTNNParams, weight_rng=None):
        if width < 1:
            raise ValueError("column needs at least one input line")
        if params.zcnt < 1:
            raise ValueError("column needs a concrete neuron count")
        self.width = width
        self.params = params
        self.scale = WEIGHT_SCALE
        self._max_units = params.w_max * self.scale
        self._mu_c = quantize(params.mu_c, self.scale)
        self._mu_b = quantize(params.mu_b, self.scale)
        self._mu_s = quantize(params.mu_s, self.scale)
        if weight_rng is None:
            init = quantize(params.w_init, self.scale)
            self.weights = np.full((width, params.zcnt), init, dtype=np.int64)
        else:
            self.weights = np.array(
                [
                    [weight_rng.randrange(self._max_units + 1)
                     for _ in range(params.zcnt)]
                    for _ in range(width)
                ],
                dtype=np.int64,
            )
        response = make_response(params.w_max, params.offset_low_weights)
        self._resp = np.array(
            [
                [response(w, t) for t in range(params.t_max + 1)]
                for w in range(params.w_max + 1)
            ],
            dtype=np.int64,
        )

    # -- inference ----------------------------------------------------------

    def _prepare(self, volley: Volley):
        if volley.width != self.width:
            raise ValueError(
                f"volley width {volley.width} != column width {self.width}"
            )
        idx = np.array(volley.finite_lines(), dtype=np.intp)
        if idx.size == 0:
            return idx, None
        times = np.array([int(volley.times[i]) for i in idx], dtype=np.int64)
        if times.any():
            return idx, times
        return idx, None  # binarized: all spikes at time 0

    def infer_prepared(self, idx, times):
        """Winner index/time plus per-neuron spike times and potentials.

        ``idx`` holds active line indices; ``times`` their spike times,
        or None when all are 0.  Weights are not modified.
        """
        params = self.params
        zcnt = params.zcnt
        spike_t = np.full(zcnt, -1, dtype=np.int64)  # -1 encodes "no spike"
        potentials = np.zeros(zcnt, dtype=np.int64)
        if idx.size:
            ceil_w = -(-self.weights[idx] // self.scale)
            pending = np.ones(zcnt, dtype=bool)
            for t in range(params.t_max + 1):
                if times is None:
                    pot = self._resp[ceil_w, t].sum(axis=0)
                else:
                    dt = t - times
                    contrib = self._resp[ceil_w, np.maximum(dt, 0)[:, None]]
                    contrib[dt < 0] = 0
                    pot = contrib.sum(axis=0)
                crossed = pending & (pot >= params.theta)
                if crossed.any():
                    spike_t[crossed] = t
                    potentials[crossed] = pot[crossed]
                    pending &= ~crossed
                    if not pending.any():
                        break
        winner = self._wta(spike_t, potentials)
        time = int(spike_t[winner]) if winner is not None else INF
        return winner, time, spike_t, potentials

    @staticmethod
    def _wta(spike_t, potentials):
        """Earliest spike, ties by potential then lowest index."""
        fired = spike_t >= 0
        if not fired.any():
            return None
        best_t = spike_t[fired].min()
        tied = np.flatnonzero(fired & (spike_t == best_t))
        top = potentials[tied].max()
        return int(tied[potentials[tied] == top][0])

    def infer(self, volley: Volley):
        """Cluster-id volley plus per-neuron diagnostics, no mutation."""
        winner, time, spike_t, potentials = self.infer_prepared(
            *self._prepare(volley)
        )
        if winner is None:
            cid = Volley.empty(self.params.zcnt)
        else:
            cid = Volley.onehot(self.params.zcnt, winner, time)
        diag = [
            (int(t) if t >= 0 else INF, int(p))
            for t, p in zip(spike_t, potentials)
        ]
        return cid, diag

    # -- learning -----------------------------------------------------------

    def learn_prepared(self, idx, times, winner, winner_time):
        """Apply the weight-update table for one (input, output) pair."""
        if winner is None:
            if self._mu_s and idx.size:
                w = self.weights[idx]
                np.minimum(w + self._mu_s, self._max_units, out=w)
                self.weights[idx] = w
            return
        col = self.weights[:, winner]
        delta = np.full(self.width, -self._mu_b, dtype=np.int64)
        if idx.size:
            if times is None:
                delta[idx] = self._mu_c  # binarized inputs always precede
            else:
                capture = times <= winner_time
                delta[idx[capture]] = self._mu_c
                delta[idx[~capture]] = -self._mu_b
        np.clip(col + delta, 0, self._max_units, out=col)
        if self._mu_s and idx.size:
            rest = self.weights[idx]
            np.minimum(rest + self._mu_s, self._max_units, out=rest)
            rest[:, winner] = col[idx]
            self.weights[idx] = rest

    def learn(self, volley: Volley, output: Volley):
        """Two-factor update from an input volley and a one-hot output."""
        if output.width != self.params.zcnt:
            raise ValueError("output width does not match neuron count")
        finite = output.finite_lines()
        if len(finite) > 1:
            raise ValueError("output volley must be one-hot")
        idx, times = self._prepare(volley)
        if finite:
            self.learn_prepared(idx, times, finite[0], output.times[finite[0]])
        else:
            self.learn_prepared(idx, times, None, INF)

    def step(self, volley: Volley):
        """Infer with current weights, then learn; returns (winner, time)."""
        idx, times = self._prepare(volley)
        winner, time, _, _ = self.infer_prepared(idx, times)
        self.learn_prepared(idx, times, winner, time)
        return winner, time

    def step_prepared(self, idx, times):
        winner, time, _, _ = self.infer_prepared(idx, times)
        self.learn_prepared(idx, times, winner, time)
        return winner, time

    # -- persistence ----------------------------------------------------------

    def dump(self, path):
        write_weights(path, self.weights, self.params.w_max, self.scale)

    def load(self, path):
        self.weights = read_weights(
            path, self.width, self.params.zcnt, self.params.w_max, self.scale
        )


def write_weights(path, units, w_max: int, scale: int):
    """Plain-text crossbar dump: header then integer fixed-point rows."""
    rows, cols = units.shape
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{rows} {cols} {w_max} {scale}\n")
        for row in units:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


def read_weights(path, rows: int, cols: int, w_max: int, scale: int):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 4:
            raise ValueError(f"{path}: malformed weight header")
        hr, hc, hw, hs = (int(x) for x in header)
        if (hr, hc) != (rows, cols):
            raise ValueError(
                f"{path}: dump is {hr}x{hc}, column is {rows}x{cols}"
            )
        if hs != scale or hw != w_max:
            raise ValueError(f"{path}: scale/w_max mismatch")
        units = np.array(
            [[int(v) for v in fh.readline().split()] for _ in range(rows)],
            dtype=np.int64,
        )
    if units.min() < 0 or units.max() > w_max * scale:
        raise ValueError(f"{path}: weight outside [0, w_max]")
    return units
