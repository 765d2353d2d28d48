"""Flat key = value experiment configuration.

A config file is plain text, one ``dotted.key = value`` per line, with
``#`` comments.  Unknown keys are rejected with their line number, and
every resolved value is echoed into the run metadata so a run can be
replayed from its output directory alone.

Six presets named after the bundled experiment recipes ship with the
package (fig17, fig18, fig19, fig21, fig22, fig23).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources

from .agents import AGENT_KINDS
from .cartpole import CartPoleParams, MAX_STEPS
from .ctnn import CTNNParams
from .encoder import EncoderConfig, IntervalSpec
from .qlearn import QParams
from .rtnn import RTNNParams

SV_CHOICES = ("angle", "displacement", "cart_velocity")

#: Physical-unit breakpoints used by the multi-variable experiments;
#: velocities are deg/s (angular) and m/s (cart).
STANDARD_BREAKPOINTS = {
    "angle": (-12.0, -6.0, -1.0, 0.0, 1.0, 6.0, 12.0),
    "displacement": (-2.4, -0.8, 0.8, 2.4),
    "angular_velocity": (-math.inf, -50.0, 50.0, math.inf),
    "cart_velocity": (-math.inf, -5.0, 5.0, math.inf),
}


class ConfigError(ValueError):
    """Config parse or validation failure, annotated with key and line."""


@dataclass(frozen=True)
class ConvergenceSettings:
    enabled: bool = False
    window: int = 30
    target: float = 6000.0
    budget: int = 1000


@dataclass(frozen=True)
class RestartSettings:
    enabled: bool = False
    window: int = 30
    target: float = 9000.0
    attempts: int = 5
    episodes: int = 200


@dataclass(frozen=True)
class ExperimentConfig:
    agents: tuple[str, ...] = ("tlearn",)
    sv_set: tuple[str, ...] = ("angle",)
    seeds: tuple[int, ...] = (1,)
    warmup_episodes: int = 30
    test_episodes: int = 50
    max_steps: int = MAX_STEPS
    init_angle_deg: float = 2.0
    trace: bool = False
    weight_init: str = "fixed"
    naive_mirror: bool = False
    specs: dict = field(default_factory=dict)
    encoder_m: int = 3
    encoder_mode: str = "binarized"
    ctnn: CTNNParams = CTNNParams(theta=6, zcnt=0)
    rtnn: RTNNParams = RTNNParams()
    qparams: QParams = QParams()
    env: CartPoleParams = CartPoleParams()
    convergence: ConvergenceSettings = ConvergenceSettings()
    restart: RestartSettings = RestartSettings()

    def encoder_config(self) -> EncoderConfig:
        return EncoderConfig(
            specs=tuple(self.specs[name] for name in self.sv_set),
            m=self.encoder_m,
            mode=self.encoder_mode,
        )

    def interval_counts(self) -> tuple[int, ...]:
        return tuple(self.specs[name].n for name in self.sv_set)

    def resolved_zcnt(self) -> int:
        """Explicit neuron count, or one neuron per joint interval tuple."""
        if self.ctnn.zcnt > 0:
            return self.ctnn.zcnt
        n = 1
        for count in self.interval_counts():
            n *= count
        return n

    def for_agent(self, kind: str) -> "ExperimentConfig":
        return replace(self, agents=(kind,))


# ---------------------------------------------------------------------------
# Value parsers


def _parse_bool(raw: str) -> bool:
    low = raw.lower()
    if low in ("on", "true", "yes", "1"):
        return True
    if low in ("off", "false", "no", "0"):
        return False
    raise ValueError(f"expected on/off, got {raw!r}")


def _parse_float(raw: str) -> float:
    low = raw.lower()
    if low in ("inf", "+inf"):
        return math.inf
    if low == "-inf":
        return -math.inf
    return float(raw)


def _parse_fraction(raw: str) -> Fraction:
    return Fraction(raw)


def _parse_seeds(raw: str) -> tuple[int, ...]:
    seeds: list[int] = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            cut = part.index("-", 1)
            lo, hi = int(part[:cut]), int(part[cut + 1:])
            if hi < lo:
                raise ValueError(f"empty seed range {part!r}")
            seeds.extend(range(lo, hi + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise ValueError("seed list is empty")
    return tuple(seeds)


def _parse_names(raw: str) -> tuple[str, ...]:
    names = tuple(p.strip() for p in raw.split(",") if p.strip())
    if not names:
        raise ValueError("empty list")
    return names


def _parse_breakpoints(raw: str) -> IntervalSpec:
    return IntervalSpec(tuple(_parse_float(p) for p in raw.split(",")))


# ---------------------------------------------------------------------------
# Key table: config key -> (target, parser). Targets are attribute paths
# on the mutable builder dict used while assembling the config.

_TOP_KEYS = {
    "agents": _parse_names,
    "sv_set": _parse_names,
    "seeds": _parse_seeds,
    "warmup_episodes": int,
    "test_episodes": int,
    "max_steps": int,
    "init_angle_deg": _parse_float,
    "trace": _parse_bool,
    "weight_init": str,
    "encoder.m": int,
    "encoder.mode": str,
    "naive.mirror": _parse_bool,
}

_CTNN_KEYS = {
    "theta": int,
    "mu_c": _parse_fraction,
    "mu_b": _parse_fraction,
    "mu_s": _parse_fraction,
    "zcnt": int,
    "w_max": int,
    "w_init": _parse_fraction,
    "t_max": int,
    "offset_low_weights": _parse_bool,
}

_RTNN_KEYS = {
    "theta": int,
    "rho_plus": _parse_fraction,
    "rho_minus": _parse_fraction,
    "omega_rho": int,
    "pi_plus": _parse_fraction,
    "pi_minus": _parse_fraction,
    "omega_pi": int,
    "w_max": int,
    "w_init": _parse_fraction,
}

_Q_KEYS = {"alpha": _parse_float, "gamma": _parse_float}

_ENV_KEYS = {
    "cart_mass": _parse_float,
    "pole_mass": _parse_float,
    "gravity": _parse_float,
    "force": _parse_float,
    "half_length": _parse_float,
    "tau": _parse_float,
    "integrator": str,
}

_CONVERGENCE_KEYS = {
    "enabled": _parse_bool,
    "window": int,
    "target": _parse_float,
    "budget": int,
}

_RESTART_KEYS = {
    "enabled": _parse_bool,
    "window": int,
    "target": _parse_float,
    "attempts": int,
    "episodes": int,
}

_GROUPS = {
    "ctnn": _CTNN_KEYS,
    "rtnn": _RTNN_KEYS,
    "qlearn": _Q_KEYS,
    "env": _ENV_KEYS,
    "convergence": _CONVERGENCE_KEYS,
    "restart": _RESTART_KEYS,
}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Raw key -> string value mapping; rejects malformed/duplicate lines."""
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: missing key")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        raw[key] = (value, lineno)
    return raw


def _classify(key: str):
    if key in _TOP_KEYS:
        return "top", key, _TOP_KEYS[key]
    if key.startswith("encoder.") and key.endswith(".breakpoints"):
        sv = key[len("encoder."):-len(".breakpoints")]
        return "spec", sv, _parse_breakpoints
    head, _, tail = key.partition(".")
    group = _GROUPS.get(head)
    if group and tail in group:
        return head, tail, group[tail]
    return None


def build_config(raw: dict, source: str = "<config>") -> ExperimentConfig:
    """Typed, validated config from raw key/value pairs."""
    top: dict = {}
    groups: dict[str, dict] = {name: {} for name in _GROUPS}
    specs: dict[str, IntervalSpec] = {}
    for key, (value, lineno) in raw.items():
        where = _classify(key)
        if where is None:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        kind, name, parser = where
        try:
            parsed = parser(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(
                f"{source}:{lineno}: bad value for {key!r}: {exc}"
            ) from exc
        if kind == "top":
            top[name] = parsed
        elif kind == "spec":
            if name not in STANDARD_BREAKPOINTS:
                raise ConfigError(
                    f"{source}:{lineno}: unknown state variable {name!r}"
                )
            specs[name] = parsed
        else:
            groups[kind][name] = parsed

    base = ExperimentConfig()
    fields = {
        "agents": top.get("agents", base.agents),
        "sv_set": top.get("sv_set", base.sv_set),
        "seeds": top.get("seeds", base.seeds),
        "warmup_episodes": top.get("warmup_episodes", base.warmup_episodes),
        "test_episodes": top.get("test_episodes", base.test_episodes),
        "max_steps": top.get("max_steps", base.max_steps),
        "init_angle_deg": top.get("init_angle_deg", base.init_angle_deg),
        "trace": top.get("trace", base.trace),
        "weight_init": top.get("weight_init", base.weight_init),
        "encoder.m": top.get("encoder.m", base.encoder_m),
        "encoder.mode": top.get("encoder.mode", base.encoder_mode),
        "naive.mirror": top.get("naive.mirror", base.naive_mirror),
    }
    try:
        ctnn = replace(CTNNParams(theta=6, zcnt=0), **groups["ctnn"])
        rtnn = replace(RTNNParams(), **groups["rtnn"])
        qparams = replace(QParams(), **groups["qlearn"])
        env = replace(CartPoleParams(), **groups["env"])
        convergence = replace(ConvergenceSettings(), **groups["convergence"])
        restart = replace(RestartSettings(), **groups["restart"])
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc

    for sv in STANDARD_BREAKPOINTS:
        specs.setdefault(sv, IntervalSpec(STANDARD_BREAKPOINTS[sv]))

    config = ExperimentConfig(
        agents=fields["agents"],
        sv_set=fields["sv_set"],
        seeds=fields["seeds"],
        warmup_episodes=fields["warmup_episodes"],
        test_episodes=fields["test_episodes"],
        max_steps=fields["max_steps"],
        init_angle_deg=fields["init_angle_deg"],
        trace=fields["trace"],
        weight_init=fields["weight_init"],
        naive_mirror=fields["naive.mirror"],
        specs=specs,
        encoder_m=fields["encoder.m"],
        encoder_mode=fields["encoder.mode"],
        ctnn=ctnn,
        rtnn=rtnn,
        qparams=qparams,
        env=env,
        convergence=convergence,
        restart=restart,
    )
    _validate(config, source)
    return config


def _validate(config: ExperimentConfig, source: str):
    for kind in config.agents:
        if kind not in AGENT_KINDS:
            raise ConfigError(
                f"{source}: unknown agent {kind!r}; choose from {AGENT_KINDS}"
            )
    for sv in config.sv_set:
        if sv not in SV_CHOICES:
            raise ConfigError(
                f"{source}: unknown state variable {sv!r}; "
                f"choose from {SV_CHOICES}"
            )
    if len(set(config.sv_set)) != len(config.sv_set):
        raise ConfigError(f"{source}: duplicate state variable in sv_set")
    if config.warmup_episodes < 0 or config.test_episodes < 0:
        raise ConfigError(f"{source}: episode counts must be >= 0")
    if config.max_steps < 1:
        raise ConfigError(f"{source}: max_steps must be >= 1")
    if config.init_angle_deg <= 0:
        raise ConfigError(f"{source}: init_angle_deg must be positive")
    if config.weight_init not in ("fixed", "random"):
        raise ConfigError(
            f"{source}: weight_init must be 'fixed' or 'random'"
        )
    if not config.seeds:
        raise ConfigError(f"{source}: seed list is empty")


def apply_overrides(raw: dict, overrides: list[str]) -> dict:
    """Merge ``key=value`` strings from the command line over file values."""
    merged = dict(raw)
    for n, item in enumerate(overrides, start=1):
        if "=" not in item:
            raise ConfigError(f"<override {n}>: expected key=value, got {item!r}")
        key, value = (part.strip() for part in item.split("=", 1))
        merged[key] = (value, 0)
    return merged


def load_config(path_or_preset, overrides: list[str] | None = None) -> ExperimentConfig:
    """Load a config file or bundled preset name, with optional overrides."""
    import os

    if os.path.exists(path_or_preset):
        source = str(path_or_preset)
        with open(path_or_preset, encoding="utf-8") as fh:
            text = fh.read()
    else:
        name = str(path_or_preset)
        if name.endswith(".cfg"):
            name = name[:-4]
        try:
            text = preset_text(name)
        except FileNotFoundError:
            raise ConfigError(
                f"no such config file or preset: {path_or_preset}"
            ) from None
        source = f"<preset {name}>"
    raw = parse_config_text(text, source)
    if overrides:
        raw = apply_overrides(raw, overrides)
    return build_config(raw, source)


def preset_text(name: str) -> str:
    ref = resources.files("spikecart").joinpath(f"presets/{name}.cfg")
    if not ref.is_file():
        raise FileNotFoundError(name)
    return ref.read_text(encoding="utf-8")


def preset_names() -> list[str]:
    folder = resources.files("spikecart").joinpath("presets")
    return sorted(
        p.name[:-4] for p in folder.iterdir() if p.name.endswith(".cfg")
    )


def resolved_items(config: ExperimentConfig) -> list[tuple[str, str]]:
    """Every config key with its resolved value, for run metadata."""

    def fmt(value) -> str:
        if isinstance(value, bool):
            return "on" if value else "off"
        if isinstance(value, (tuple, list)):
            return ",".join(str(v) for v in value)
        return str(value)

    items = [
        ("agents", fmt(config.agents)),
        ("sv_set", fmt(config.sv_set)),
        ("seeds", fmt(config.seeds)),
        ("warmup_episodes", fmt(config.warmup_episodes)),
        ("test_episodes", fmt(config.test_episodes)),
        ("max_steps", fmt(config.max_steps)),
        ("init_angle_deg", fmt(config.init_angle_deg)),
        ("trace", fmt(config.trace)),
        ("weight_init", fmt(config.weight_init)),
        ("naive.mirror", fmt(config.naive_mirror)),
        ("encoder.m", fmt(config.encoder_m)),
        ("encoder.mode", fmt(config.encoder_mode)),
    ]
    for sv in sorted(config.specs):
        items.append(
            (f"encoder.{sv}.breakpoints", fmt(config.specs[sv].breakpoints))
        )
    for group, obj in (
        ("ctnn", config.ctnn),
        ("rtnn", config.rtnn),
        ("qlearn", config.qparams),
        ("env", config.env),
        ("convergence", config.convergence),
        ("restart", config.restart),
    ):
        for name in obj.__dataclass_fields__:
            items.append((f"{group}.{name}", fmt(getattr(obj, name))))
    return items
