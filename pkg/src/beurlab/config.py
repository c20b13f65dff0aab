"""Experiment configuration: line-oriented `key = value` with [section] headers.

Zeros are listed as repeated `zero = beta,gamma,mult` lines inside [system].
The format round-trips losslessly (floats serialized with repr) and is the
hashing basis for run manifests.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from .density import TargetDensity, ZeroSpec, m_min
from .errors import ConfigError


@dataclass
class SineConfig:
    epsilon: float = 0.25
    strategy: str = "smooth"
    seed: int = 0
    budget: int = 10**6


@dataclass
class InterferenceConfig:
    v: float | None = None
    epsilon: float = 0.2
    x_lo: float = 1e3
    x_hi: float = 1e7


@dataclass
class ExperimentConfig:
    r: float = 0.6
    zeros: list = field(default_factory=list)  # (beta, gamma, mult) triples
    M: int | None = None
    allow_small_m: bool = False
    sampler: str = "quantile"
    seed: int = 1
    x_max: float = 1e7
    X_cut: float = 1e6
    grid_ratio: float = 1.05
    sine: SineConfig | None = None
    interference: InterferenceConfig | None = None
    output_dir: str = "out"

    def validate(self) -> None:
        if self.sampler not in ("quantile", "dmv-random"):
            raise ConfigError(f"sampler must be quantile or dmv-random, got {self.sampler!r}")
        if not (0.5 <= self.r < 1.0):
            raise ConfigError(f"r={self.r} outside [1/2, 1)")
        if self.grid_ratio <= 1.0:
            raise ConfigError("grid_ratio must exceed 1")
        if self.X_cut > self.x_max**2:
            raise ConfigError("X_cut cannot exceed x_max^2")
        if self.sine is not None:
            if not (0.0 < self.sine.epsilon < 0.5):
                raise ConfigError("sine.epsilon must lie in (0, 0.5)")
            if self.sine.strategy not in ("smooth", "anneal"):
                raise ConfigError(f"unknown sine strategy {self.sine.strategy!r}")
        for triple in self.zeros:
            if len(triple) != 3:
                raise ConfigError(f"zero must be beta,gamma,mult -- got {triple}")

    def density(self) -> TargetDensity:
        spec = ZeroSpec(tuple(self.zeros))
        return TargetDensity(
            r=self.r, zeros=spec, M=self.M, unsafe_allow_small_m=self.allow_small_m
        )

    def effective_M(self) -> int:
        return self.M if self.M is not None else m_min(ZeroSpec(tuple(self.zeros)))

    # -- serialization ------------------------------------------------------

    def serialize(self) -> str:
        lines = ["[system]"]
        lines.append(f"r = {self.r!r}")
        for b, g, m in self.zeros:
            lines.append(f"zero = {float(b)!r},{float(g)!r},{int(m)}")
        if self.M is not None:
            lines.append(f"M = {self.M}")
        if self.allow_small_m:
            lines.append("allow_small_m = true")
        lines.append(f"sampler = {self.sampler}")
        lines.append(f"seed = {self.seed}")
        lines.append(f"x_max = {self.x_max!r}")
        lines.append(f"X_cut = {self.X_cut!r}")
        lines.append(f"grid_ratio = {self.grid_ratio!r}")
        if self.sine is not None:
            lines += [
                "",
                "[sine]",
                f"epsilon = {self.sine.epsilon!r}",
                f"strategy = {self.sine.strategy}",
                f"seed = {self.sine.seed}",
                f"budget = {self.sine.budget}",
            ]
        if self.interference is not None:
            lines += ["", "[interference]"]
            if self.interference.v is not None:
                lines.append(f"v = {self.interference.v!r}")
            lines += [
                f"epsilon = {self.interference.epsilon!r}",
                f"x_lo = {self.interference.x_lo!r}",
                f"x_hi = {self.interference.x_hi!r}",
            ]
        lines += ["", "[output]", f"dir = {self.output_dir}", ""]
        return "\n".join(lines)

    def config_hash(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()

    @staticmethod
    def parse(text: str) -> "ExperimentConfig":
        cfg = ExperimentConfig()
        cfg.zeros = []
        section = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip().lower()
                if section == "sine" and cfg.sine is None:
                    cfg.sine = SineConfig()
                if section == "interference" and cfg.interference is None:
                    cfg.interference = InterferenceConfig()
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
            key, _, val = line.partition("=")
            key = key.strip().lower()
            val = val.strip()
            try:
                _assign(cfg, section, key, val)
            except (ValueError, KeyError) as exc:
                raise ConfigError(f"line {lineno}: field {key!r}: {exc}") from exc
        cfg.validate()
        return cfg

    @staticmethod
    def load(path: str | Path) -> "ExperimentConfig":
        return ExperimentConfig.parse(Path(path).read_text())


def _assign(cfg: ExperimentConfig, section: str | None, key: str, val: str) -> None:
    if section in (None, "system"):
        if key == "r":
            cfg.r = float(val)
        elif key == "zero":
            parts = val.split(",")
            if len(parts) != 3:
                raise ValueError("zero needs beta,gamma,mult")
            cfg.zeros.append((float(parts[0]), float(parts[1]), int(parts[2])))
        elif key == "m":
            cfg.M = int(val)
        elif key == "allow_small_m":
            cfg.allow_small_m = val.lower() in ("1", "true", "yes")
        elif key == "sampler":
            cfg.sampler = val
        elif key == "seed":
            cfg.seed = int(val)
        elif key == "x_max":
            cfg.x_max = float(val)
        elif key == "x_cut":
            cfg.X_cut = float(val)
        elif key == "grid_ratio":
            cfg.grid_ratio = float(val)
        else:
            raise KeyError(f"unknown [system] field {key!r}")
    elif section == "sine":
        if key == "epsilon":
            cfg.sine.epsilon = float(val)
        elif key == "strategy":
            cfg.sine.strategy = val
        elif key == "seed":
            cfg.sine.seed = int(val)
        elif key == "budget":
            cfg.sine.budget = int(val)
        else:
            raise KeyError(f"unknown [sine] field {key!r}")
    elif section == "interference":
        if key == "v":
            cfg.interference.v = float(val)
        elif key == "epsilon":
            cfg.interference.epsilon = float(val)
        elif key == "x_lo":
            cfg.interference.x_lo = float(val)
        elif key == "x_hi":
            cfg.interference.x_hi = float(val)
        else:
            raise KeyError(f"unknown [interference] field {key!r}")
    elif section == "output":
        if key == "dir":
            cfg.output_dir = val
        else:
            raise KeyError(f"unknown [output] field {key!r}")
    else:
        raise KeyError(f"unknown section {section!r}")
