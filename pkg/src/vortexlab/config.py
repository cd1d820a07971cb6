"""Run configuration: sectioned TOML in, canonical TOML out."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np
import tomli
import tomli_w

from .bundle import HermitianMetric
from .solver import SolverOptions
from .surface import Surface


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SurfaceConfig:
    Lx: float = 2 * math.pi
    Ly: float = 2 * math.pi
    nx: int = 128
    ny: int = 128
    h_profile: str = "constant"
    h_amplitude: float = 0.0


@dataclass(frozen=True)
class BundleConfig:
    N: int = 1
    positions: list = field(default_factory=lambda: [[math.pi, math.pi]])


@dataclass(frozen=True)
class MetricConfig:
    H_profile: str = "constant"
    H_scale: float = 1.0
    H_amplitude: float = 0.0


@dataclass(frozen=True)
class Psi0Config:
    choice: str = "solved"
    zeros: list = field(default_factory=list)


@dataclass(frozen=True)
class SolverConfig:
    max_iter: int = 60
    tol: float = 1e-10
    continuation: bool = True


@dataclass(frozen=True)
class VerifyConfig:
    seed: int = 0
    count: int = 32
    gauge_count: int = 8
    hamiltonian_count: int = 16
    eps: list = field(default_factory=lambda: [1e-4, 2e-4])
    tangent_eps: float = 1e-3


@dataclass(frozen=True)
class SweepConfig:
    n: int = 4
    points: list = field(default_factory=list)


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "vlab-out"


_SECTIONS = {
    "surface": SurfaceConfig,
    "bundle": BundleConfig,
    "metric": MetricConfig,
    "psi0": Psi0Config,
    "solver": SolverConfig,
    "verify": VerifyConfig,
    "sweep": SweepConfig,
    "output": OutputConfig,
}

_PROFILES = ("constant", "cosine")
_PSI0 = ("unit", "solved", "theta")


def _coerce(section, key, value, default):
    where = f"[{section}] {key}"
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected a boolean, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    if not isinstance(value, list):
        raise ConfigError(f"{where}: expected an array, got {value!r}")
    return value


def _points(section, key, value):
    out = []
    for p in value:
        if (not isinstance(p, list) or len(p) != 2
                or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in p)):
            raise ConfigError(f"[{section}] {key}: expected [x, y] pairs, got {p!r}")
        out.append([float(p[0]), float(p[1])])
    return out


@dataclass(frozen=True)
class RunConfig:
    surface: SurfaceConfig = field(default_factory=SurfaceConfig)
    bundle: BundleConfig = field(default_factory=BundleConfig)
    metric: MetricConfig = field(default_factory=MetricConfig)
    psi0: Psi0Config = field(default_factory=Psi0Config)
    solver: SolverConfig = field(default_factory=SolverConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def __post_init__(self):
        self.validate()

    # -- parsing -----------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        unknown = set(data) - set(_SECTIONS)
        if unknown:
            raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
        parts = {}
        for name, kind in _SECTIONS.items():
            raw = data.get(name, {})
            if not isinstance(raw, dict):
                raise ConfigError(f"[{name}] must be a table")
            default = kind()
            known = {f.name for f in fields(kind)}
            extra = set(raw) - known
            if extra:
                raise ConfigError(f"[{name}]: unknown key(s): {', '.join(sorted(extra))}")
            vals = {}
            for key, value in raw.items():
                vals[key] = _coerce(name, key, value, getattr(default, key))
            parts[name] = replace(default, **vals)
        b = parts["bundle"]
        parts["bundle"] = replace(b, positions=_points("bundle", "positions", b.positions))
        p = parts["psi0"]
        parts["psi0"] = replace(p, zeros=_points("psi0", "zeros", p.zeros))
        sw = parts["sweep"]
        parts["sweep"] = replace(sw, points=_points("sweep", "points", sw.points))
        v = parts["verify"]
        eps = v.eps
        if not all(isinstance(e, (int, float)) and not isinstance(e, bool) for e in eps):
            raise ConfigError(f"[verify] eps: expected numbers, got {eps!r}")
        parts["verify"] = replace(v, eps=[float(e) for e in eps])
        return cls(**parts)

    @classmethod
    def loads(cls, text: str) -> RunConfig:
        try:
            data = tomli.loads(text)
        except tomli.TOMLDecodeError as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> RunConfig:
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())

    def to_dict(self) -> dict:
        return {name: asdict(getattr(self, name)) for name in _SECTIONS}

    def dumps(self) -> str:
        return tomli_w.dumps(self.to_dict())

    # -- checks ------------------------------------------------------------

    def validate(self):
        s, b, v = self.surface, self.bundle, self.verify

        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(s.Lx > 0 and s.Ly > 0, "[surface] Lx and Ly must be positive")
        need(s.nx >= 4 and s.ny >= 4, "[surface] nx and ny must be at least 4")
        need(s.h_profile in _PROFILES, f"[surface] h_profile must be one of {_PROFILES}")
        need(0.0 <= s.h_amplitude < 1.0, "[surface] h_amplitude must lie in [0, 1)")
        need(b.N >= 1, "[bundle] N must be a positive integer")
        need(len(b.positions) == b.N, f"[bundle] expected {b.N} positions, got {len(b.positions)}")
        need(self.metric.H_profile in _PROFILES, f"[metric] H_profile must be one of {_PROFILES}")
        need(self.metric.H_scale > 0, "[metric] H_scale must be positive")
        need(0.0 <= self.metric.H_amplitude < 1.0, "[metric] H_amplitude must lie in [0, 1)")
        need(self.psi0.choice in _PSI0, f"[psi0] choice must be one of {_PSI0}")
        need(not self.psi0.zeros or len(self.psi0.zeros) == b.N,
             f"[psi0] zeros must be empty or list {b.N} points")
        need(self.solver.max_iter > 0, "[solver] max_iter must be positive")
        need(self.solver.tol > 0, "[solver] tol must be positive")
        need(v.seed >= 0, "[verify] seed must be nonnegative")
        need(min(v.count, v.gauge_count, v.hamiltonian_count) > 0, "[verify] counts must be positive")
        need(len(v.eps) == 2 and all(e > 0 for e in v.eps) and v.eps[0] != v.eps[1],
             "[verify] eps must hold two distinct positive steps")
        need(v.tangent_eps > 0, "[verify] tangent_eps must be positive")
        need(self.sweep.n > 0, "[sweep] n must be positive")

    # -- builders ----------------------------------------------------------

    def with_overrides(self, seed=None, grid=None, out=None) -> RunConfig:
        cfg = self
        if seed is not None:
            cfg = replace(cfg, verify=replace(cfg.verify, seed=seed))
        if grid is not None:
            cfg = replace(cfg, surface=replace(cfg.surface, nx=grid[0], ny=grid[1]))
        if out is not None:
            cfg = replace(cfg, output=replace(cfg.output, directory=str(out)))
        return cfg

    def build_surface(self) -> Surface:
        s = self.surface
        if s.h_profile == "constant" or s.h_amplitude == 0.0:
            h = 1.0
        else:
            a, Lx = s.h_amplitude, s.Lx
            h = lambda x, y: 1.0 + a * np.cos(2 * np.pi * x / Lx)  # noqa: E731
        return Surface.flat(s.Lx, s.Ly, s.nx, s.ny, h)

    def build_metric(self, surf: Surface) -> HermitianMetric:
        m = self.metric
        vals = np.full(surf.shape, m.H_scale)
        if m.H_profile == "cosine":
            vals = vals * (1.0 + m.H_amplitude * np.cos(2 * np.pi * surf.Y / surf.Ly))
        return HermitianMetric(vals)

    def solver_options(self) -> SolverOptions:
        return SolverOptions(max_iter=self.solver.max_iter, tol=self.solver.tol,
                             continuation=self.solver.continuation)

    def sweep_points(self):
        if self.sweep.points:
            return [tuple(p) for p in self.sweep.points]
        n, s = self.sweep.n, self.surface
        return [((i + 0.5) * s.Lx / n, (j + 0.5) * s.Ly / n) for i in range(n) for j in range(n)]


def parse_grid(text: str):
    try:
        nx, ny = (int(v) for v in text.lower().split("x"))
    except ValueError as exc:
        raise ConfigError(f"--grid expects <nx>x<ny>, got {text!r}") from exc
    if nx < 4 or ny < 4:
        raise ConfigError("--grid sizes must be at least 4")
    return nx, ny
