"""Run configuration: defaults, ``key=value`` files and flag overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

__all__ = ["RunConfig", "ConfigError", "load_config", "parse_config"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    pi_bits: int = 96
    max_depth: int = 12
    cap_bits: int = 192
    fem_levels: tuple[int, ...] = (5, 6)
    grid: int = 20
    outdir: str = "out"
    jobs: int = 1

    def __post_init__(self):
        for k in ("pi_bits", "max_depth", "cap_bits", "grid", "jobs"):
            if getattr(self, k) <= 0:
                raise ConfigError(f"{k} must be positive")
        if not self.fem_levels or any(l <= 0 for l in self.fem_levels):
            raise ConfigError("fem_levels must be positive integers")
        if list(self.fem_levels) != sorted(set(self.fem_levels)):
            raise ConfigError("fem_levels must be strictly increasing")
        if self.pi_bits < 8:
            raise ConfigError("pi_bits must be at least 8")
        if not self.outdir:
            raise ConfigError("outdir must not be empty")

    def override(self, **kw) -> "RunConfig":
        """Return a copy with the non-None entries of ``kw`` applied."""
        kw = {k: v for k, v in kw.items() if v is not None}
        unknown = set(kw) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigError(f"unknown keys: {sorted(unknown)}")
        return replace(self, **{k: _convert(k, v) for k, v in kw.items()})

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _convert(key: str, v):
    try:
        if key == "fem_levels":
            if isinstance(v, str):
                return tuple(int(x) for x in v.replace(",", " ").split())
            return tuple(int(x) for x in v)
        if key == "outdir":
            return str(v)
        if isinstance(v, bool):
            raise ConfigError(f"{key} must be an integer")
        return int(v)
    except (TypeError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"bad value for {key}: {v!r}") from e


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse ``key=value`` lines (``#`` starts a comment)."""
    base = base or RunConfig()
    known = {f.name for f in fields(RunConfig)}
    vals = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        k = k.replace("-", "_")
        if k not in known:
            raise ConfigError(f"line {n}: unknown key {k!r}")
        vals[k] = v
    return base.override(**vals)


def load_config(path: str | Path | None, **flags) -> RunConfig:
    """Defaults, then the file (if any), then non-None ``flags``."""
    cfg = RunConfig()
    if path:
        cfg = parse_config(Path(path).read_text(), cfg)
    return cfg.override(**flags)
