"""Run configuration: JSON schema with fail-fast key checking.

Every section maps onto a dataclass; unknown keys raise ConfigError naming
the offending key path.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .bspline import SplineConfig, SplineConfigError
from .matching import AugLagState
from .metric import MetricParams
from .optim import OptimSettings
from .varifold import VarifoldKernel


class ConfigError(ValueError):
    pass


@dataclass
class SplineSection:
    n_theta: int = 3
    N_theta: int = 100
    n_t: int = 2
    N_t: int = 10
    closed: bool = True
    quad_theta: int = 6
    quad_t: int = 3

    def build(self) -> SplineConfig:
        return SplineConfig(**asdict(self))


@dataclass
class MetricSection:
    a0: float = 1.0
    a1: float = 1.0
    b1: float = 1.0
    a2: float = 1.0
    length_weighted: bool = False

    def build(self) -> MetricParams:
        return MetricParams(**asdict(self))


@dataclass
class KernelSection:
    radial: str = "gaussian"
    radial_scale: float = 0.1
    zonal: str = "gaussian_oriented"
    zonal_scale: float = 0.3
    n_pts: int | None = None

    def build(self) -> VarifoldKernel:
        return VarifoldKernel(self.radial, self.radial_scale, self.zonal, self.zonal_scale)


@dataclass
class AugLagSection:
    lam: float = 0.0
    mu: float = 1.0
    tau: float = 1.0
    eps: float = 0.01
    rho: float = 10.0
    tau_final: float = 1e-3
    k_max: int = 20

    def build(self) -> AugLagState:
        return AugLagState(**asdict(self))


@dataclass
class OptimSection:
    memory: int = 20
    max_iters: int = 1500
    grad_tol: float = 1e-3
    norm: str = "l2"

    def build(self) -> OptimSettings:
        return OptimSettings(**asdict(self))


@dataclass
class OptionsSection:
    mode: str = "auglag"
    lambda_weight: float = 1e3
    opt_translation: bool = False
    opt_rotation: bool = False
    opt_scale: bool = False
    auglag: AugLagSection = field(default_factory=AugLagSection)
    optim: OptimSection = field(default_factory=OptimSection)


@dataclass
class IOSection:
    frames: int = 5
    out: str = "out"


@dataclass
class RunConfig:
    spline: SplineSection = field(default_factory=SplineSection)
    metric: MetricSection = field(default_factory=MetricSection)
    kernel: KernelSection = field(default_factory=KernelSection)
    options: OptionsSection = field(default_factory=OptionsSection)
    io: IOSection = field(default_factory=IOSection)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    @property
    def solver_mode(self) -> str:
        return "penalty" if self.options.mode == "penalty" else "augmented_lagrangian"

    def validate(self) -> "RunConfig":
        """Build every component once so bad values surface as ConfigError."""
        try:
            self.spline.build()
            self.metric.build()
            self.kernel.build()
            self.options.auglag.build()
            self.options.optim.build()
        except (SplineConfigError, ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
        if self.options.mode not in ("penalty", "auglag"):
            raise ConfigError(f"options.mode must be 'penalty' or 'auglag', got {self.options.mode!r}")
        if self.io.frames < 2:
            raise ConfigError("io.frames must be >= 2")
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return _load(cls, data, "").validate()

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        text = Path(path).read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
        return cls.from_dict(data)


_SCALARS = {"int": int, "float": (int, float), "bool": bool, "str": str}


def _load(cls, data, prefix):
    if not isinstance(data, dict):
        raise ConfigError(f"{prefix or 'config'}: expected an object")
    known = {f.name: f for f in fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown configuration key {prefix + key!r}")
    kwargs = {}
    for name, value in data.items():
        f = known[name]
        path = prefix + name
        default = f.default_factory() if callable(f.default_factory) else None
        if default is not None and hasattr(default, "__dataclass_fields__"):
            kwargs[name] = _load(type(default), value, path + ".")
            continue
        kwargs[name] = _check_type(f.type, value, path)
    return cls(**kwargs)


def _check_type(type_name, value, path):
    type_name = str(type_name)
    optional = "None" in type_name
    if value is None:
        if optional:
            return None
        raise ConfigError(f"configuration key {path!r} may not be null")
    base = type_name.split("|")[0].strip()
    expected = _SCALARS.get(base)
    ok = isinstance(value, expected) if expected else True
    if base in ("int", "float") and isinstance(value, bool):
        ok = False
    if base == "int" and isinstance(value, float) and value.is_integer():
        value, ok = int(value), True
    if not ok:
        raise ConfigError(f"configuration key {path!r} must be {base}, got {type(value).__name__}")
    return float(value) if base == "float" else value
