"""Problem setups, run driver and plain-text output formats."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .integrate import DEFAULT_EPSILON, StageError, StepPlan, strang_advance
from .moments import InadmissibleStateError
from .spatial import BoundaryCondition, Field, GridSpec

KN_PRIME_FACTOR = 8.0 / 5.0 * math.sqrt(2.0 / math.pi)

SCENARIOS = ("periodic", "shock_tube", "custom")

# (rho, u, theta) left and right of x = 0.5
SHOCK_TUBE_LEFT = (0.445, (0.698 * math.sqrt(2.0), 0.0, 0.0), 13.21)
SHOCK_TUBE_RIGHT = (0.5, (0.0, 0.0, 0.0), 1.9)
SHOCK_TUBE_T_END = 0.1314 / math.sqrt(2.0)


def knudsen_convert(kn_prime: float) -> float:
    """Global Knudsen number from the hard-sphere style ``Kn'``."""
    if not kn_prime > 0:
        raise ValueError("Kn' must be positive")
    return kn_prime / KN_PRIME_FACTOR


def knudsen_prime(kn: float) -> float:
    return kn * KN_PRIME_FACTOR


class ConfigError(ValueError):
    pass


class SolverBreakdown(RuntimeError):
    """A run hit an inadmissible state; the message names the cell and step."""

    def __init__(self, message: str, step: int, t: float):
        super().__init__(message)
        self.step = step
        self.t = t


def _parse_bool(text: str) -> bool:
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _parse_vector(text: str) -> tuple:
    parts = [float(p) for p in text.replace(";", ",").split(",") if p.strip()]
    if len(parts) == 1:
        parts += [0.0, 0.0]
    if len(parts) != 3:
        raise ConfigError(f"expected 1 or 3 velocity components, got {text!r}")
    return tuple(parts)


def _parse_grids(text: str) -> tuple:
    return tuple(int(p) for p in text.replace(";", ",").split(",") if p.strip())


@dataclass
class ScenarioConfig:
    scenario: str = "periodic"
    M: int = 3
    N: int = 200
    kn: Optional[float] = None
    kn_prime: Optional[float] = None
    cfl: float = 0.95
    t_end: Optional[float] = None
    reconstruction: bool = True
    integrator: str = "rkc"
    epsilon: float = DEFAULT_EPSILON
    out: Optional[str] = None
    ref_N: Optional[int] = None
    grids: tuple = ()
    write_coeffs: bool = False
    # custom Riemann problem
    x_min: float = 0.0
    x_max: float = 1.0
    x_split: float = 0.5
    bc: str = "copy"
    rho_l: float = 1.0
    u_l: tuple = (0.0, 0.0, 0.0)
    theta_l: float = 1.0
    rho_r: float = 1.0
    u_r: tuple = (0.0, 0.0, 0.0)
    theta_r: float = 1.0

    _PARSERS = {
        "scenario": str, "M": int, "N": int, "kn": float, "kn_prime": float, "cfl": float,
        "t_end": float, "reconstruction": _parse_bool, "integrator": str, "epsilon": float,
        "out": str, "ref_N": int, "grids": _parse_grids, "write_coeffs": _parse_bool,
        "x_min": float, "x_max": float, "x_split": float, "bc": str,
        "rho_l": float, "u_l": _parse_vector, "theta_l": float,
        "rho_r": float, "u_r": _parse_vector, "theta_r": float,
    }

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {SCENARIOS}")
        if self.kn is not None and self.kn_prime is not None:
            raise ConfigError("give either kn or kn_prime, not both")
        if self.integrator not in ("rkc", "euler"):
            raise ConfigError(f"unknown integrator {self.integrator!r}")
        if self.M < 1 or self.N < 3:
            raise ConfigError("need M >= 1 and N >= 3")
        for name in ("kn", "kn_prime", "cfl", "epsilon"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ConfigError(f"{name} must be positive")
        if not 0 < self.cfl <= 1:
            raise ConfigError("cfl must lie in (0, 1]")
        if self.t_end is not None and self.t_end < 0:
            raise ConfigError("t_end must be non-negative")
        BoundaryCondition(self.bc)

    @classmethod
    def keys(cls):
        return tuple(cls._PARSERS)

    @classmethod
    def parse_pairs(cls, pairs: dict) -> dict:
        out = {}
        for key, text in pairs.items():
            key = key.strip().replace("-", "_")
            if key == "Kn":
                key = "kn"
            if key not in cls._PARSERS:
                raise ConfigError(f"unknown config key {key!r}")
            out[key] = cls._PARSERS[key](text.strip()) if isinstance(text, str) else text
        return out

    @classmethod
    def from_file(cls, path, **overrides) -> "ScenarioConfig":
        """Read a flat ``key = value`` file; ``#`` starts a comment."""
        pairs = {}
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = line.split("=", 1)
            pairs[key] = value
        values = cls.parse_pairs(pairs)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @property
    def knudsen(self) -> float:
        if self.kn is not None:
            return self.kn
        if self.kn_prime is not None:
            return knudsen_convert(self.kn_prime)
        return 0.5 if self.scenario == "periodic" else knudsen_convert(0.001)

    @property
    def end_time(self) -> float:
        if self.t_end is not None:
            return self.t_end
        return 0.4 if self.scenario == "periodic" else SHOCK_TUBE_T_END

    def replace(self, **changes) -> "ScenarioConfig":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return ScenarioConfig(**values)


def periodic_initial(N: int, M: int, kn: float) -> Field:
    grid = GridSpec(N, -1.0, 1.0)
    x = grid.centers
    rho = 2.0 + 0.5 * np.cos(np.pi * x)
    u = np.stack([1.0 + 0.5 * np.sin(np.pi * x), 0.5 * np.sin(np.pi * x), np.zeros_like(x)], axis=1)
    # p0 = 1 with p = rho theta
    return Field.from_macro(grid, BoundaryCondition.PERIODIC, kn, M, rho, u, 1.0 / rho)


def riemann_initial(N, M, kn, left, right, x_min=0.0, x_max=1.0, x_split=0.5, bc="copy") -> Field:
    grid = GridSpec(N, x_min, x_max)
    on_left = grid.centers < x_split
    rho = np.where(on_left, left[0], right[0])
    u = np.where(on_left[:, None], np.asarray(left[1], float), np.asarray(right[1], float))
    theta = np.where(on_left, left[2], right[2])
    return Field.from_macro(grid, bc, kn, M, rho, u, theta)


def initial_field(cfg: ScenarioConfig) -> Field:
    kn = cfg.knudsen
    if cfg.scenario == "periodic":
        return periodic_initial(cfg.N, cfg.M, kn)
    if cfg.scenario == "shock_tube":
        return riemann_initial(cfg.N, cfg.M, kn, SHOCK_TUBE_LEFT, SHOCK_TUBE_RIGHT)
    return riemann_initial(
        cfg.N, cfg.M, kn, (cfg.rho_l, cfg.u_l, cfg.theta_l), (cfg.rho_r, cfg.u_r, cfg.theta_r),
        cfg.x_min, cfg.x_max, cfg.x_split, cfg.bc,
    )


@dataclass
class SolutionRecord:
    x: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    coeffs: dict = field(default_factory=dict)

    @classmethod
    def from_field(cls, f: Field, with_coeffs: bool = False) -> "SolutionRecord":
        coeffs = {}
        if with_coeffs:
            t = f.table
            for k in np.flatnonzero(t.degree <= min(f.M, 3)):
                name = "f_" + "".join(str(int(a)) for a in t.alpha[k])
                coeffs[name] = f.coeffs[:, k].copy()
        return cls(f.grid.centers, f.rho.copy(), f.u.copy(), f.theta.copy(), coeffs)

    @property
    def header(self) -> list:
        return ["x", "rho", "u1", "u2", "u3", "theta", *self.coeffs]

    def rows(self):
        cols = [self.x, self.rho, self.u[:, 0], self.u[:, 1], self.u[:, 2], self.theta, *self.coeffs.values()]
        return zip(*cols)

    def to_csv(self, path) -> None:
        lines = [",".join(self.header)]
        lines += [",".join(f"{v:.17g}" for v in row) for row in self.rows()]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def read_csv(cls, path) -> "SolutionRecord":
        text = Path(path).read_text().splitlines()
        header = text[0].split(",")
        data = np.array([[float(v) for v in line.split(",")] for line in text[1:]]).reshape(-1, len(header))
        cols = dict(zip(header, data.T))
        coeffs = {k: v for k, v in cols.items() if k.startswith("f_")}
        u = np.stack([cols["u1"], cols["u2"], cols["u3"]], axis=1)
        return cls(cols["x"], cols["rho"], u, cols["theta"], coeffs)


def write_metadata(path, meta: dict) -> None:
    lines = [f"{k}={_fmt(v)}" for k, v in meta.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_metadata(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        if "=" in line:
            k, v = line.split("=", 1)
            out[k] = v
    return out


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def metadata_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_suffix(p.suffix + ".meta")


@dataclass
class RunResult:
    field: Field
    record: SolutionRecord
    meta: dict
    plans: list


def _clock_sum(dts) -> float:
    # summed in step order, like the driver's clock, so a clipped run lands on t_end exactly
    t = 0.0
    for dt in dts:
        t += float(dt)
    return t


def run_scenario(cfg: ScenarioConfig, t_end: Optional[float] = None, **advance_options) -> RunResult:
    """Initialize, advance to the end time and (if ``cfg.out``) write CSV + sidecar."""
    f0 = initial_field(cfg)
    t_end = cfg.end_time if t_end is None else t_end
    plans: list[StepPlan] = []
    start = time.perf_counter()
    try:
        f = strang_advance(
            f0, t_end, cfg.cfl, epsilon=cfg.epsilon, reconstruction=cfg.reconstruction,
            integrator=cfg.integrator, callback=lambda plan, _: plans.append(plan), **advance_options,
        )
    except (StageError, InadmissibleStateError) as exc:
        step = len(plans) + 1
        t_fail = _clock_sum(p.dt for p in plans)
        raise SolverBreakdown(f"breakdown in step {step} (t = {t_fail:.6g}): {exc}", step, t_fail) from exc
    wall = time.perf_counter() - start
    dts = np.array([p.dt for p in plans])
    stages = np.array([p.s for p in plans])
    meta = {
        "scenario": cfg.scenario,
        "M": cfg.M,
        "N": cfg.N,
        "kn": cfg.knudsen,
        "cfl": cfg.cfl,
        "t_end": t_end,
        "reconstruction": cfg.reconstruction,
        "integrator": cfg.integrator,
        "epsilon": cfg.epsilon,
        "steps": len(plans),
        "sum_dt": _clock_sum(dts),
        "avg_dt": float(dts.mean()) if len(plans) else 0.0,
        "avg_s": float(stages.mean()) if len(plans) else 0.0,
        "avg_dt_over_s": float((dts / stages).mean()) if len(plans) else 0.0,
        "wall_time": wall,
    }
    record = SolutionRecord.from_field(f, cfg.write_coeffs)
    if cfg.out:
        record.to_csv(cfg.out)
        write_metadata(metadata_path(cfg.out), meta)
    return RunResult(f, record, meta, plans)

