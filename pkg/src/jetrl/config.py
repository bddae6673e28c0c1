"""Run configuration: `section.key = value` text files over typed defaults."""

from __future__ import annotations

from dataclasses import dataclass, field, fields

from .env import EnvConfig
from .trainer import TrainConfig


class ConfigError(ValueError):
    pass


@dataclass
class EvalSection:
    episodes: int = 1000
    base_seed: int = 0


@dataclass
class ExplainSection:
    episodes: int = 1000
    base_seed: int = 0


@dataclass
class IoSection:
    out_dir: str = "out"
    checkpoint_interval: int = 100_000


@dataclass
class RunConfig:
    world: EnvConfig = field(default_factory=EnvConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    eval: EvalSection = field(default_factory=EvalSection)
    explain: ExplainSection = field(default_factory=ExplainSection)
    io: IoSection = field(default_factory=IoSection)

    def validate(self) -> None:
        try:
            self.world.validate()
        except ValueError as e:
            raise ConfigError(f"world: {e}") from e
        try:
            self.train.validate()
        except ValueError as e:
            raise ConfigError(f"train: {e}") from e
        if self.eval.episodes <= 0:
            raise ConfigError("eval.episodes must be positive")
        if self.explain.episodes <= 0:
            raise ConfigError("explain.episodes must be positive")


def _coerce(key: str, raw: str, target_type) -> object:
    raw = raw.strip()
    try:
        if target_type is bool:
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        if target_type is int:
            return int(raw)
        if target_type is float:
            return float(raw)
        if target_type is str:
            return raw
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r} (expected {target_type.__name__})")
    raise ConfigError(f"unsupported type for {key}")


_OPTIONAL_INTS = {"train.learn_start"}


def apply_setting(cfg: RunConfig, dotted_key: str, raw_value: str) -> None:
    """Set one `section.key` on the config, with type checking."""
    if "." not in dotted_key:
        raise ConfigError(f"key {dotted_key!r} must be section.key")
    section_name, key = dotted_key.split(".", 1)
    section = getattr(cfg, section_name, None)
    if section is None or not hasattr(section, "__dataclass_fields__"):
        raise ConfigError(f"unknown section {section_name!r} in {dotted_key!r}")
    for f in fields(section):
        if f.name == key:
            if dotted_key in _OPTIONAL_INTS:
                ftype = int
            else:
                ftype = type(getattr(section, f.name))
            setattr(section, key, _coerce(dotted_key, raw_value, ftype))
            return
    raise ConfigError(f"unknown key {dotted_key!r}")


def load_config(path: str) -> RunConfig:
    """Parse a config file; blank lines and `#` comments are ignored."""
    cfg = RunConfig()
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    for lineno, line in enumerate(lines, start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected `section.key = value`")
        key, value = stripped.split("=", 1)
        apply_setting(cfg, key.strip(), value)
    cfg.validate()
    return cfg
