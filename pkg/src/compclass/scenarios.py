"""Built-in experiment scenarios and their flat config schema.

Each scenario specifies the mixture classes by eigenvalue lists plus an
optional rotation seed (covariance = U diag(eigs) U^T with U a seeded
random orthogonal matrix; the configured mean is rotated by the same U),
a default measurement kernel, an SNR grid, and trial/seed defaults.
An embedded YAML copy of every built-in ships under configs/ for
provenance; the catalog in this module is the source of truth.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
import yaml

from .linalg import random_orthogonal
from .measurement import (
    MeasurementKernel,
    design_multi_nonzero_mean,
    random_gaussian_kernel,
)
from .source import ClassModel, GmmSource


@dataclass(frozen=True)
class ClassSpec:
    prior: float
    mean: tuple[float, ...]
    eigenvalues: tuple[float, ...]
    rotation_seed: int | None = None


@dataclass(frozen=True)
class KernelSpec:
    kind: str  # "random" | "designed"
    m: int
    seed: int = 0
    normalized: bool = True

    def __post_init__(self):
        if self.kind not in ("random", "designed"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.m < 1:
            raise ValueError("kernel measurement count must be at least 1")


@dataclass(frozen=True)
class SnrGrid:
    start_db: float
    stop_db: float
    step_db: float

    def __post_init__(self):
        if self.step_db <= 0:
            raise ValueError("SNR grid step must be positive")
        if self.stop_db < self.start_db:
            raise ValueError("SNR grid stop must be at least its start")

    def values(self) -> list[float]:
        n = int(np.floor((self.stop_db - self.start_db) / self.step_db + 1e-9)) + 1
        return [self.start_db + k * self.step_db for k in range(n)]


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    dim: int
    classes: tuple[ClassSpec, ...]
    kernel: KernelSpec
    snr: SnrGrid
    trials: int
    seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trial count must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        for spec in self.classes:
            if len(spec.mean) != self.dim or len(spec.eigenvalues) != self.dim:
                raise ValueError(
                    f"class vectors in {self.name!r} must have length {self.dim}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["classes"] = [
            {k: (list(v) if isinstance(v, tuple) else v) for k, v in c.items()}
            for c in d["classes"]
        ]
        return d

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        classes = tuple(
            ClassSpec(prior=float(c["prior"]),
                      mean=tuple(float(x) for x in c["mean"]),
                      eigenvalues=tuple(float(x) for x in c["eigenvalues"]),
                      rotation_seed=(None if c.get("rotation_seed") is None
                                     else int(c["rotation_seed"])))
            for c in d["classes"]
        )
        k = d["kernel"]
        kernel = KernelSpec(kind=str(k["kind"]), m=int(k["m"]),
                            seed=int(k.get("seed", 0)),
                            normalized=bool(k.get("normalized", True)))
        s = d["snr"]
        snr = SnrGrid(start_db=float(s["start_db"]), stop_db=float(s["stop_db"]),
                      step_db=float(s["step_db"]))
        return cls(name=str(d["name"]), dim=int(d["dim"]), classes=classes,
                   kernel=kernel, snr=snr, trials=int(d["trials"]),
                   seed=int(d["seed"]))

    @classmethod
    def from_yaml(cls, text: str) -> "ScenarioConfig":
        return cls.from_dict(yaml.safe_load(text))


def build_source(config: ScenarioConfig) -> GmmSource:
    """Materialize the mixture: rotate eigen-frame covariances and means."""
    classes = []
    for spec in config.classes:
        eigs = np.asarray(spec.eigenvalues, dtype=float)
        mean = np.asarray(spec.mean, dtype=float)
        if spec.rotation_seed is None:
            cov = np.diag(eigs)
        else:
            u = random_orthogonal(config.dim, spec.rotation_seed)
            cov = u @ np.diag(eigs) @ u.T
            mean = u @ mean
        classes.append(ClassModel(prior=spec.prior, mean=mean, covariance=cov))
    return GmmSource(tuple(classes))


def build_kernel(config: ScenarioConfig, src: GmmSource,
                 m: int | None = None, kind: str | None = None) -> MeasurementKernel:
    """Kernel for a run: the scenario default with optional overrides."""
    kind = kind or config.kernel.kind
    m = m if m is not None else config.kernel.m
    if m < 1:
        raise ValueError("measurement count must be at least 1")
    if kind == "random":
        return random_gaussian_kernel(m, config.dim, config.kernel.seed,
                                      config.kernel.normalized)
    if kind == "designed":
        return design_multi_nonzero_mean(src, m)
    raise ValueError(f"unknown kernel kind {kind!r}")


def _zeros(n: int) -> tuple[float, ...]:
    return tuple(0.0 for _ in range(n))


_DEFAULT_SNR = SnrGrid(start_db=0.0, stop_db=60.0, step_db=2.0)
_DEFAULT_TRIALS = 10_000

_ROT_FIG1A = 11
_ROT_FIG1B = 13
_ROT_FIG1C = 17


def built_in_scenarios() -> dict[str, ScenarioConfig]:
    """The seven built-in scenarios, keyed by name."""
    catalog: dict[str, ScenarioConfig] = {}

    def add(cfg: ScenarioConfig) -> None:
        catalog[cfg.name] = cfg

    add(ScenarioConfig(
        name="fig1a-zero-mean-2class", dim=6,
        classes=(
            ClassSpec(prior=0.5, mean=_zeros(6),
                      eigenvalues=(1, 1, 0, 0, 0, 0), rotation_seed=_ROT_FIG1A),
            ClassSpec(prior=0.5, mean=_zeros(6),
                      eigenvalues=(0, 1, 1, 1, 0, 0), rotation_seed=_ROT_FIG1A),
        ),
        kernel=KernelSpec(kind="random", m=4, seed=7, normalized=True),
        snr=_DEFAULT_SNR, trials=_DEFAULT_TRIALS, seed=1))

    add(ScenarioConfig(
        name="fig1b-nonzero-mean-2class", dim=6,
        classes=(
            ClassSpec(prior=0.5, mean=_zeros(6),
                      eigenvalues=(1, 1, 0, 0, 0, 0), rotation_seed=_ROT_FIG1B),
            ClassSpec(prior=0.5, mean=(0.3, 0.3, 0.3, 0, 0, 0),
                      eigenvalues=(1, 1, 0, 0, 0, 0), rotation_seed=_ROT_FIG1B),
        ),
        kernel=KernelSpec(kind="random", m=3, seed=7, normalized=True),
        snr=_DEFAULT_SNR, trials=_DEFAULT_TRIALS, seed=1))

    add(ScenarioConfig(
        name="fig1c-4class", dim=6,
        classes=(
            ClassSpec(prior=0.25, mean=_zeros(6),
                      eigenvalues=(1, 1, 0, 0, 0, 0), rotation_seed=_ROT_FIG1C),
            ClassSpec(prior=0.25, mean=_zeros(6),
                      eigenvalues=(0, 1, 1, 1, 0, 0), rotation_seed=_ROT_FIG1C),
            ClassSpec(prior=0.25, mean=_zeros(6),
                      eigenvalues=(0, 0, 1, 1, 1, 0), rotation_seed=_ROT_FIG1C),
            ClassSpec(prior=0.25, mean=_zeros(6),
                      eigenvalues=(0, 0, 0, 0, 1, 1), rotation_seed=_ROT_FIG1C),
        ),
        kernel=KernelSpec(kind="random", m=4, seed=7, normalized=True),
        snr=_DEFAULT_SNR, trials=_DEFAULT_TRIALS, seed=1))

    add(ScenarioConfig(
        name="fig5-designed-2class-zero", dim=3,
        classes=(
            ClassSpec(prior=0.5, mean=_zeros(3), eigenvalues=(1, 1, 0)),
            ClassSpec(prior=0.5, mean=_zeros(3), eigenvalues=(0, 1, 1)),
        ),
        kernel=KernelSpec(kind="designed", m=2),
        snr=_DEFAULT_SNR, trials=_DEFAULT_TRIALS, seed=1))

    add(ScenarioConfig(
        name="fig6-designed-2class-nonzero", dim=3,
        classes=(
            ClassSpec(prior=0.5, mean=(0.328, 0.264, 0.114), eigenvalues=(1, 1, 0)),
            ClassSpec(prior=0.5, mean=(1.0, 1.0, 1.0), eigenvalues=(1, 1, 0)),
        ),
        kernel=KernelSpec(kind="designed", m=1),
        snr=_DEFAULT_SNR, trials=_DEFAULT_TRIALS, seed=1))

    add(ScenarioConfig(
        name="fig7-designed-3class", dim=3,
        classes=(
            ClassSpec(prior=1 / 3, mean=_zeros(3), eigenvalues=(1, 0, 0)),
            ClassSpec(prior=1 / 3, mean=_zeros(3), eigenvalues=(1, 1, 0)),
            ClassSpec(prior=1 / 3, mean=_zeros(3), eigenvalues=(0, 1, 1)),
        ),
        kernel=KernelSpec(kind="designed", m=2),
        snr=_DEFAULT_SNR, trials=_DEFAULT_TRIALS, seed=1))

    add(ScenarioConfig(
        name="scalar-sanity", dim=1,
        classes=(
            ClassSpec(prior=0.5, mean=(0.0,), eigenvalues=(1.0,)),
            ClassSpec(prior=0.5, mean=(0.0,), eigenvalues=(3.0,)),
        ),
        kernel=KernelSpec(kind="random", m=1, seed=7, normalized=True),
        snr=_DEFAULT_SNR, trials=_DEFAULT_TRIALS, seed=1))

    return catalog


def list_scenarios() -> dict[str, ScenarioConfig]:
    """Catalog accessor used by the CLI."""
    return built_in_scenarios()
