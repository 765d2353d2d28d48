"""Episodes, trials and experiments with reproducible CSV output.

A trial is one agent running warm-up then test episodes under a single
seed, weights carried across episodes and learning always on.  An
experiment runs one trial per seed (optionally in parallel; trials are
independent) and reports both the raw per-episode results and the
per-seed means sorted worst to best.

All randomness comes from the trial seed's named streams, and the
columns use exact fixed-point arithmetic, so rerunning a config with the
same seed reproduces every output file byte for byte.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .agents import (
    FORCE_SIGNS,
    TEST,
    WARMUP,
    Agent,
    FixedPolicyAgent,
    NaiveAgent,
    QBaselineAgent,
    TLearningAgent,
)
from .cartpole import OK, check_and_reward, init_episode, step_env
from .config import ExperimentConfig
from .ctnn import ClusteringColumn
from .encoder import StateEncoder
from .qlearn import QTable
from .rng import SplitMix64, trial_streams
from .rtnn import ReinforcementColumn

TRACE_HEADER = (
    "step",
    "angle_deg",
    "ang_vel",
    "displacement_m",
    "cart_vel",
    "cid_index",
    "action",
    "reward",
)


@dataclass(frozen=True)
class EpisodeResult:
    episode: int
    phase: str
    steps: int
    cause: str


@dataclass
class TrialSummary:
    seed: int
    mean_test_steps: float
    episodes: list[EpisodeResult] = field(default_factory=list)
    convergence_episode: int | None = None
    attempts: int | None = None
    achieved: bool | None = None  # restart trials only


# ---------------------------------------------------------------------------
# Agent construction


def build_agent(config: ExperimentConfig, kind: str, streams) -> Agent:
    """One fresh agent wired to the trial's named random streams."""
    if kind == "naive":
        return NaiveAgent(mirror=config.naive_mirror)
    if kind in ("fixed_optimal_1sv", "fixed_optimal_2sv", "fixed_optimal_3sv"):
        return FixedPolicyAgent(kind, config.specs, tie_rng=streams["ties"])
    if kind == "tlearn":
        return _build_tlearn(config, streams)
    if kind == "qlearn_baseline":
        explorer = _build_tlearn(config, streams)
        qtable = QTable(config.interval_counts(), config.qparams)
        return QBaselineAgent(explorer, qtable, config.sv_set)
    raise ValueError(f"unknown agent kind {kind!r}")


def _build_tlearn(config: ExperimentConfig, streams) -> TLearningAgent:
    encoder = StateEncoder(config.encoder_config())
    ctnn_params = replace(config.ctnn, zcnt=config.resolved_zcnt())
    weight_rng = streams["weights"] if config.weight_init == "random" else None
    ctnn = ClusteringColumn(
        encoder.config.width, ctnn_params, weight_rng=weight_rng
    )
    rtnn = ReinforcementColumn(
        ctnn_params.zcnt,
        2,
        config.rtnn,
        tie_rng=streams["ties"],
        weight_rng=weight_rng,
    )
    return TLearningAgent(encoder, ctnn, rtnn, config.sv_set)


# ---------------------------------------------------------------------------
# Episode and trial loops


def run_episode(
    agent: Agent,
    config: ExperimentConfig,
    angle_rng: SplitMix64,
    phase: str,
    episode_index: int,
    trace_rows: list | None = None,
) -> EpisodeResult:
    """One episode to failure or the step cap; learning stays on."""
    state = init_episode(angle_rng, config.init_angle_deg)
    agent.begin_episode()
    params = config.env
    force = params.force
    max_steps = config.max_steps
    for step in range(1, max_steps + 1):
        action = agent.act(state, phase)
        state = step_env(state, FORCE_SIGNS[action] * force, params)
        status, reward = check_and_reward(state, step, max_steps)
        agent.learn(reward, state, phase)
        if trace_rows is not None:
            cid = agent.last_cid
            trace_rows.append(
                (
                    step,
                    repr(state.angle_deg),
                    repr(math.degrees(state.ang_vel)),
                    repr(state.pos),
                    repr(state.vel),
                    -1 if cid is None else cid,
                    int(FORCE_SIGNS[action]),
                    reward,
                )
            )
        if status != OK:
            return EpisodeResult(episode_index, phase, step, status)
    raise AssertionError("episode loop must terminate via status")


def detect_convergence(
    steps: list[int], window: int = 30, target: float = 6000.0
) -> int | None:
    """Smallest episode count whose trailing window meets the mean target.

    The reported count includes the measurement window itself.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    bar = target * window
    running = 0.0
    for e, value in enumerate(steps, start=1):
        running += value
        if e > window:
            running -= steps[e - window - 1]
        if e >= window and running >= bar:
            return e
    return None


def run_trial(
    config: ExperimentConfig, kind: str, seed: int, dump_dir=None
) -> TrialSummary:
    """Warm-up plus test episodes for one seed (or a variant protocol)."""
    if config.restart.enabled:
        return _run_restart_trial(config, kind, seed)
    if config.convergence.enabled:
        return _run_convergence_trial(config, kind, seed)
    streams = trial_streams(seed)
    agent = build_agent(config, kind, streams)
    episodes: list[EpisodeResult] = []
    test_total = 0
    for e in range(1, config.warmup_episodes + config.test_episodes + 1):
        phase = WARMUP if e <= config.warmup_episodes else TEST
        result = run_episode(agent, config, streams["angles"], phase, e)
        episodes.append(result)
        if phase == TEST:
            test_total += result.steps
    mean = test_total / config.test_episodes if config.test_episodes else 0.0
    if dump_dir is not None:
        dump_agent_weights(agent, kind, seed, dump_dir)
    return TrialSummary(seed=seed, mean_test_steps=mean, episodes=episodes)


def dump_agent_weights(agent, kind: str, seed: int, dump_dir):
    """Snapshot any columns or tables the agent carries."""
    import os

    learner = agent.explorer if isinstance(agent, QBaselineAgent) else agent
    if not isinstance(agent, QBaselineAgent) and not isinstance(
        learner, TLearningAgent
    ):
        return  # nothing learnable to snapshot
    os.makedirs(dump_dir, exist_ok=True)
    if isinstance(agent, QBaselineAgent):
        agent.qtable.dump_csv(
            os.path.join(dump_dir, f"{kind}_seed{seed}_qtable.csv")
        )
    if isinstance(learner, TLearningAgent):
        learner.ctnn.dump(
            os.path.join(dump_dir, f"{kind}_seed{seed}_ctnn.txt")
        )
        learner.rtnn.dump(
            os.path.join(dump_dir, f"{kind}_seed{seed}_rtnn.txt")
        )


def _run_convergence_trial(
    config: ExperimentConfig, kind: str, seed: int
) -> TrialSummary:
    """Run until the sliding-window criterion fires or the budget is spent.

    All episodes count as training; the summary mean covers the final
    window (the measured episodes are part of the totals).
    """
    conv = config.convergence
    streams = trial_streams(seed)
    agent = build_agent(config, kind, streams)
    episodes: list[EpisodeResult] = []
    steps: list[int] = []
    converged_at = None
    for e in range(1, conv.budget + 1):
        result = run_episode(agent, config, streams["angles"], WARMUP, e)
        episodes.append(result)
        steps.append(result.steps)
        if e >= conv.window:
            tail = steps[-conv.window:]
            if sum(tail) >= conv.target * conv.window:
                converged_at = e
                break
    window = steps[-conv.window:] if steps else [0]
    return TrialSummary(
        seed=seed,
        mean_test_steps=sum(window) / len(window),
        episodes=episodes,
        convergence_episode=converged_at,
    )


def _run_restart_trial(
    config: ExperimentConfig, kind: str, seed: int
) -> TrialSummary:
    """Re-randomize weights and retry until the target window is reached.

    Each attempt rebuilds the agent with fresh pseudo-random weights
    (the weight stream keeps advancing) and runs its episode budget; the
    attempt succeeds as soon as any run of consecutive episodes meets
    the target mean.  Episodes from all attempts are recorded in order.
    """
    policy = config.restart
    streams = trial_streams(seed)
    episodes: list[EpisodeResult] = []
    attempts_used = 0
    achieved = False
    episode_counter = 0
    last_window: list[int] = []
    for _attempt in range(policy.attempts):
        attempts_used += 1
        agent = build_agent(config, kind, streams)
        steps: list[int] = []
        for _e in range(policy.episodes):
            episode_counter += 1
            result = run_episode(
                agent, config, streams["angles"], WARMUP, episode_counter
            )
            episodes.append(result)
            steps.append(result.steps)
            if len(steps) >= policy.window:
                tail = steps[-policy.window:]
                if sum(tail) >= policy.target * policy.window:
                    achieved = True
                    break
        last_window = steps[-policy.window:] if steps else []
        if achieved:
            break
    mean = sum(last_window) / len(last_window) if last_window else 0.0
    return TrialSummary(
        seed=seed,
        mean_test_steps=mean,
        episodes=episodes,
        attempts=attempts_used,
        achieved=achieved,
    )


def _trial_task(args):
    config, kind, seed, dump_dir = args
    return run_trial(config, kind, seed, dump_dir)


def run_experiment(
    config: ExperimentConfig, kind: str, jobs: int = 1, dump_dir=None
) -> list[TrialSummary]:
    """One trial per seed, merged in seed order regardless of jobs."""
    tasks = [(config, kind, seed, dump_dir) for seed in config.seeds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_trial_task, tasks))
    return [_trial_task(task) for task in tasks]


# ---------------------------------------------------------------------------
# CSV emission


def write_results_csv(path, trials: list[TrialSummary]):
    """Per-episode outcomes: seed, episode, phase, steps, cause."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["seed", "episode", "phase", "steps", "cause"])
        for trial in trials:
            for ep in trial.episodes:
                writer.writerow(
                    [trial.seed, ep.episode, ep.phase, ep.steps, ep.cause]
                )


def write_sorted_csv(path, trials: list[TrialSummary]):
    """Per-seed test means sorted worst to best: rank, mean, seed."""
    order = sorted(trials, key=lambda t: (t.mean_test_steps, t.seed))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rank", "mean_test_steps", "seed"])
        for rank, trial in enumerate(order, start=1):
            writer.writerow([rank, repr(trial.mean_test_steps), trial.seed])


def write_trace_csv(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        writer.writerows(rows)


def run_trace(
    config: ExperimentConfig, kind: str, seed: int, episode: int
) -> list:
    """Replay one trial and capture the per-step trace of one episode."""
    total = config.warmup_episodes + config.test_episodes
    if not 1 <= episode <= total:
        raise ValueError(
            f"episode {episode} outside 1..{total} for this config"
        )
    streams = trial_streams(seed)
    agent = build_agent(config, kind, streams)
    for e in range(1, total + 1):
        phase = WARMUP if e <= config.warmup_episodes else TEST
        rows: list | None = [] if e == episode else None
        run_episode(agent, config, streams["angles"], phase, e, rows)
        if rows is not None:
            return rows
    raise AssertionError("unreachable")
