"""Run configuration and its flat ``key = value`` file format."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import InvalidSpec

DEFAULT_CACHE = Path.home() / ".cache" / "qcurv"


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by every subcommand.

    ``error_budget`` bounds the certified heat-trace tail; ``fit_window``
    overrides the default small-time window (as (lo, hi) for l = 1).
    """

    N: int = 256
    error_budget: float = 1e-12
    j_max: int | None = None
    fit_window: tuple | None = None
    tol: float = 1e-12
    seed: int = 42
    format: str = "csv"
    cache_dir: str | None = None
    ensemble_size: int = 50
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise InvalidSpec(f"format must be csv or json, got {self.format!r}")
        if self.N < 8:
            raise InvalidSpec("grid size N must be at least 8")
        if not (self.error_budget > 0 and self.tol > 0):
            raise InvalidSpec("tolerances must be positive")
        for k, v in self.tolerances.items():
            if not v > 0:
                raise InvalidSpec(f"tolerance {k} must be positive")
        if self.fit_window is not None:
            lo, hi = self.fit_window
            if not 0 < lo < hi:
                raise InvalidSpec("fit window needs 0 < lo < hi")

    def cache_path(self):
        """Cache directory; QCURV_CACHE_DIR wins over the config value."""
        env = os.environ.get("QCURV_CACHE_DIR")
        if env:
            return Path(env)
        return Path(self.cache_dir) if self.cache_dir else None

    def tolerance(self, name, default):
        return self.tolerances.get(name, default)


_INT = {"N", "seed", "ensemble_size", "j_max"}
_FLOAT = {"error_budget", "tol"}


def _parse_value(key, raw):
    if key in _INT:
        return None if raw.lower() == "none" else int(raw)
    if key in _FLOAT:
        return float(raw)
    if key == "fit_window":
        lo, hi = (float(p) for p in raw.replace(",", " ").split())
        return (lo, hi)
    return raw


def parse_config(text):
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Keys of the form ``tol.<name>`` go into ``tolerances``.
    """
    known = {f.name for f in fields(RunConfig)}
    kw, tols = {}, {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidSpec(f"line {lineno}: expected key = value")
        key, raw = (p.strip() for p in line.split("=", 1))
        if key.startswith("tol."):
            tols[key[4:]] = float(raw)
            continue
        if key not in known or key == "tolerances":
            raise InvalidSpec(f"line {lineno}: unknown key {key!r}")
        try:
            kw[key] = _parse_value(key, raw)
        except ValueError as exc:
            raise InvalidSpec(f"line {lineno}: bad value for {key}: {raw!r}") from exc
    if tols:
        kw["tolerances"] = tols
    return RunConfig(**kw)


def load_config(path=None, **overrides):
    cfg = RunConfig() if path is None else parse_config(Path(path).read_text())
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **overrides) if overrides else cfg


__all__ = ["RunConfig", "load_config", "parse_config"]
