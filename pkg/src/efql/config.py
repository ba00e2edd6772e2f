"""Experiment configuration: flat JSON files merged over documented defaults."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .agents import AGENT_NAMES, AgentConfig
from .errors import ConfigParseError, ParameterOutOfRange, UnknownKey

ENV_NAMES = ("cartpole", "chain")

DEFAULT_SEEDS = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class ExperimentConfig:
    agent: str = "enhanced-fql"
    episodes: int = 500
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    env: str = "cartpole"
    max_steps: int = 500
    output_dir: str = "runs"
    emit_svg: bool = False
    agent_config: AgentConfig = field(default_factory=AgentConfig)


# flat config key -> (target, field name); "lambda" is a reserved word in
# Python, hence the lam field
_EXPERIMENT_KEYS = {
    "agent": "agent",
    "episodes": "episodes",
    "seeds": "seeds",
    "env": "env",
    "max_steps": "max_steps",
    "output_dir": "output_dir",
    "emit_svg": "emit_svg",
}
_AGENT_KEYS = {
    "alpha": "alpha",
    "gamma": "gamma",
    "lambda": "lam",
    "beta": "beta",
    "epsilon_start": "epsilon_start",
    "epsilon_end": "epsilon_end",
    "epsilon_decay_episodes": "epsilon_decay_episodes",
    "segment_length": "segment_length",
    "batch_size": "batch_size",
    "buffer_capacity": "buffer_capacity",
    "replay_interval": "replay_interval",
    "n_step": "n_step",
    "q_init": "q_init",
}

CONFIG_KEYS = tuple(_EXPERIMENT_KEYS) + tuple(_AGENT_KEYS)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigParseError(message)


def validate_experiment(cfg: ExperimentConfig) -> ExperimentConfig:
    if cfg.agent not in AGENT_NAMES:
        raise UnknownKey(
            f"unknown agent {cfg.agent!r}; valid agents: {', '.join(AGENT_NAMES)}")
    if cfg.env not in ENV_NAMES:
        raise UnknownKey(f"unknown env {cfg.env!r}; valid envs: {', '.join(ENV_NAMES)}")
    _require(cfg.episodes >= 1, f"episodes must be >= 1, got {cfg.episodes}")
    _require(cfg.max_steps >= 0, f"max_steps must be >= 0, got {cfg.max_steps}")
    _require(len(cfg.seeds) >= 1, "at least one seed is required")
    _require(all(isinstance(s, int) for s in cfg.seeds), "seeds must be integers")
    try:
        cfg.agent_config.validate()
    except ParameterOutOfRange as exc:
        raise ConfigParseError(str(exc)) from exc
    return cfg


def from_dict(raw: dict) -> ExperimentConfig:
    """Build a validated config from a flat mapping; unknown keys are errors."""
    exp_kwargs = {}
    agent_kwargs = {}
    for key, value in raw.items():
        if key in _EXPERIMENT_KEYS:
            exp_kwargs[_EXPERIMENT_KEYS[key]] = value
        elif key in _AGENT_KEYS:
            agent_kwargs[_AGENT_KEYS[key]] = value
        else:
            raise UnknownKey(
                f"unknown config key {key!r}; valid keys: {', '.join(CONFIG_KEYS)}")
    if "seeds" in exp_kwargs:
        seeds = exp_kwargs["seeds"]
        _require(isinstance(seeds, (list, tuple)), f"seeds must be a list, got {seeds!r}")
        exp_kwargs["seeds"] = tuple(seeds)
    try:
        cfg = ExperimentConfig(agent_config=AgentConfig(**agent_kwargs), **exp_kwargs)
    except TypeError as exc:
        raise ConfigParseError(f"bad config value: {exc}") from exc
    return validate_experiment(cfg)


def load_config(path) -> ExperimentConfig:
    """Parse a flat key-value JSON config file."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigParseError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigParseError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise ConfigParseError(f"{path}: top level must be a JSON object")
    return from_dict(raw)


def with_overrides(cfg: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Config with non-None overrides applied (CLI flags beat file values)."""
    fields = {k: v for k, v in overrides.items() if v is not None}
    if "seeds" in fields:
        fields["seeds"] = tuple(fields["seeds"])
    return validate_experiment(replace(cfg, **fields))
