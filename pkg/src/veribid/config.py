"""World configuration: flat key=value files plus command-line overrides."""

from dataclasses import dataclass, fields

from .errors import ConfigurationError

ASSIGNMENTS = ("round_robin", "random")
FETCH_MODES = ("ot", "direct")


@dataclass
class WorldConfig:
    l: int = 10            # number of bidders
    w: int = 2             # number of ad networks
    z_min_cents: int = 1
    z_max_cents: int = 10000
    z_step_cents: int = 1
    t: int = 32            # bit bound on mapped bids
    key_bits: int = 512
    group_bits: int = 48
    seed: int = 0
    assignment: str = "round_robin"
    fetch_mode: str = "ot"

    @property
    def z(self) -> int:
        return (self.z_max_cents - self.z_min_cents) // self.z_step_cents + 1

    def validate(self) -> None:
        if self.l < 1:
            raise ConfigurationError(f"need at least one bidder, got l={self.l}")
        if self.w < 1:
            raise ConfigurationError(f"need at least one ad network, got w={self.w}")
        if self.t < 1:
            raise ConfigurationError(f"bit bound must be positive, got t={self.t}")
        if self.key_bits < 16:
            raise ConfigurationError(f"key_bits must be >= 16, got {self.key_bits}")
        if self.group_bits < 4:
            raise ConfigurationError(f"group_bits must be >= 4, got {self.group_bits}")
        if self.assignment not in ASSIGNMENTS:
            raise ConfigurationError(f"assignment must be one of {ASSIGNMENTS}")
        if self.fetch_mode not in FETCH_MODES:
            raise ConfigurationError(f"fetch_mode must be one of {FETCH_MODES}")

    def apply_overrides(self, pairs: list[str]) -> None:
        for pair in pairs:
            key, sep, value = pair.partition("=")
            if not sep:
                raise ConfigurationError(f"override {pair!r} is not key=value")
            _assign(self, key, value)


def _assign(config: WorldConfig, key: str, value: str) -> None:
    for f in fields(WorldConfig):
        if f.name == key:
            if f.type in (int, "int"):
                try:
                    setattr(config, key, int(value))
                except ValueError:
                    raise ConfigurationError(f"{key} expects an integer, got {value!r}")
            else:
                setattr(config, key, value)
            return
    raise ConfigurationError(f"unknown config key {key!r}")


def load_config(path: str, overrides: list[str] | None = None) -> WorldConfig:
    config = WorldConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}")
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        key, sep, value = text.partition("=")
        if not sep:
            raise ConfigurationError(f"{path}:{lineno}: not a key=value line")
        _assign(config, key.strip(), value.strip())
    if overrides:
        config.apply_overrides(overrides)
    config.validate()
    return config
