"""Run configuration and its flat text serialization."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class SimConfig:
    """All parameters of one simulation study.

    Defaults match the reference operating point of the symmetric
    sensor-actuator network: 16 flows, channel reliability 0.8, unit
    weight/exponents/constants, actuation durations drawn from [1, 25]
    slots and relative deadlines from [1, 20] slots.
    """

    flows: int = 16                 # M sensor-actuator pairs
    horizon: int = 1000             # T slots
    channel_on_prob: float = 0.8    # p, Bernoulli ON probability per slot
    weight: float = 1.0             # alpha, common flow weight
    beta: float = 1.0               # freshness exponent
    gamma: float = 1.0              # laxity-indicator exponent
    k_freshness: float = 1.0        # k_F
    k_laxity: float = 1.0           # k_X
    actuation_lo: int = 1           # c draws in {actuation_lo..actuation_hi}
    actuation_hi: int = 25
    rel_deadline_lo: int = 1        # d draws in {rel_deadline_lo..rel_deadline_hi}
    rel_deadline_hi: int = 20
    seed: int = 12345
    replications: int = 200

    def __post_init__(self):
        if self.flows < 1:
            raise ValueError(f"flows must be >= 1, got {self.flows}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if not 0.0 <= self.channel_on_prob <= 1.0:
            raise ValueError(f"channel_on_prob must lie in [0, 1], got {self.channel_on_prob}")
        for name in ("weight", "beta", "gamma", "k_freshness", "k_laxity"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if not 1 <= self.actuation_lo <= self.actuation_hi:
            raise ValueError(
                f"actuation range must satisfy 1 <= lo <= hi, got [{self.actuation_lo}, {self.actuation_hi}]"
            )
        if not 1 <= self.rel_deadline_lo <= self.rel_deadline_hi:
            raise ValueError(
                f"deadline range must satisfy 1 <= lo <= hi, got [{self.rel_deadline_lo}, {self.rel_deadline_hi}]"
            )
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")

    @property
    def k_const(self) -> float:
        """Combined utility constant k = k_F * k_X."""
        return self.k_freshness * self.k_laxity

    def with_(self, **kwargs) -> "SimConfig":
        return replace(self, **kwargs)


_INT_FIELDS = {
    "flows", "horizon", "actuation_lo", "actuation_hi",
    "rel_deadline_lo", "rel_deadline_hi", "seed", "replications",
}


def emit_config(cfg: SimConfig) -> str:
    """Render a config as flat ``key = value`` lines."""
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if isinstance(value, float):
            value = repr(value)
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> SimConfig:
    """Parse the flat ``key = value`` format back into a SimConfig.

    Unknown keys and malformed lines raise ValueError with the offending
    line number.
    """
    known = {f.name for f in fields(SimConfig)}
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in known:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        try:
            kwargs[key] = int(value) if key in _INT_FIELDS else float(value)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key!r}: {value!r}") from exc
    return SimConfig(**kwargs)
