"""Experiment configuration: a flat TOML file that round-trips exactly.

Schema (all keys required unless noted):

    n_values = [1000, 3000]        # node counts to sweep
    trials = 400                   # Monte Carlo trials per n
    alpha = 1.0                    # edge-weight exponent
    a_param = 1.0                  # target box parameter A
    master_seed = 20260810
    workers = 2                    # process parallelism; <=1 runs serial
    output_dir = "out"
    process = "binomial"           # or "poisson"
    delta_rule = "section1"        # optional; or "section3"

    [radius]
    kind = "power"                 # r = coeff * n^(-exponent)
    coeff = 1.0
    exponent = 0.3333333333333333
    # kind = "const"  with  value = 0.2
    # kind = "theorem" with  m = 1700.0   (r = sqrt(m * ln(n) / n))

    [density]
    kind = "uniform"               # or "grid" with values = [[...], ...]
    eps1 = 1.0
    eps2 = 1.0

    [xi]
    kind = "constant"              # or "grid" with table = [[...], ...]
    value = 1.0
"""

from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .bounds import BoundParams
from .errors import ConfigurationError
from .rgg import WeightSpec, radius_for
from .sampling import DensitySpec


@dataclass(frozen=True)
class RadiusRule:
    kind: str = "power"
    coeff: float = 1.0
    exponent: float = 1.0 / 3.0
    value: float = 0.1
    m: float = 1700.0

    def __post_init__(self):
        if self.kind not in ("power", "const", "theorem"):
            raise ConfigurationError(f"unknown radius rule {self.kind!r}")

    def radius(self, n: int, eps1: float = 1.0) -> float:
        if self.kind == "power":
            return radius_for(n, custom=lambda m: self.coeff * m ** -self.exponent).value
        if self.kind == "const":
            return radius_for(n, custom=self.value).value
        return radius_for(n, M=self.m, eps1=eps1).value


@dataclass(frozen=True)
class DensityConfig:
    kind: str = "uniform"
    eps1: float = 1.0
    eps2: float = 1.0
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in ("uniform", "grid"):
            raise ConfigurationError(f"unknown density kind {self.kind!r}")
        object.__setattr__(self, "values",
                           tuple(tuple(row) for row in self.values))

    def spec(self) -> DensitySpec:
        if self.kind == "uniform":
            return DensitySpec.uniform(eps1=self.eps1, eps2=self.eps2)
        return DensitySpec.from_grid(list(map(list, self.values)),
                                     eps1=self.eps1, eps2=self.eps2)


@dataclass(frozen=True)
class XiConfig:
    kind: str = "constant"
    value: float = 1.0
    table: tuple = ()

    def __post_init__(self):
        if self.kind not in ("constant", "grid"):
            raise ConfigurationError(f"unknown xi kind {self.kind!r}")
        object.__setattr__(self, "table",
                           tuple(tuple(row) for row in self.table))

    def spec(self, alpha: float) -> WeightSpec:
        if self.kind == "constant":
            return WeightSpec.constant(alpha, xi=self.value)
        return WeightSpec.tabulated(alpha, list(map(list, self.table)))


@dataclass(frozen=True)
class ExperimentConfig:
    n_values: tuple = (1000,)
    trials: int = 100
    alpha: float = 1.0
    a_param: float = 1.0
    master_seed: int = 0
    workers: int = 1
    output_dir: str = "out"
    process: str = "binomial"
    delta_rule: str = "section1"
    radius: RadiusRule = field(default_factory=RadiusRule)
    density: DensityConfig = field(default_factory=DensityConfig)
    xi: XiConfig = field(default_factory=XiConfig)

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        if self.trials < 1:
            raise ConfigurationError("need trials >= 1")
        if any(n < 2 for n in self.n_values):
            raise ConfigurationError("need every n >= 2")
        if self.process not in ("binomial", "poisson"):
            raise ConfigurationError(f"unknown process {self.process!r}")

    def density_spec(self) -> DensitySpec:
        return self.density.spec()

    def weight_spec(self) -> WeightSpec:
        return self.xi.spec(self.alpha)

    def bound_params(self) -> BoundParams:
        w = self.weight_spec()
        return BoundParams(eps1=self.density.eps1, eps2=self.density.eps2,
                           xi_min=w.xi_min, xi_max=w.xi_max, alpha=self.alpha,
                           delta_rule=self.delta_rule)

    def radius_for_n(self, n: int) -> float:
        return self.radius.radius(n, eps1=self.density.eps1)

    def replace(self, **kw) -> "ExperimentConfig":
        data = asdict(self)
        data.update(kw)
        return _from_dict(data)


def _from_dict(data: dict) -> ExperimentConfig:
    data = dict(data)
    radius = data.pop("radius", {})
    density = data.pop("density", {})
    xi = data.pop("xi", {})
    try:
        return ExperimentConfig(
            radius=radius if isinstance(radius, RadiusRule) else RadiusRule(**radius),
            density=density if isinstance(density, DensityConfig) else DensityConfig(**density),
            xi=xi if isinstance(xi, XiConfig) else XiConfig(**xi),
            **data)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from None


def load_config(path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        return _from_dict(tomllib.load(fh))


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise ConfigurationError(f"cannot serialize {type(v)} to TOML")


def dump_config(config: ExperimentConfig, path) -> None:
    """Write the config as TOML; load_config(dump_config(c)) == c."""
    data = asdict(config)
    tables = {k: data.pop(k) for k in ("radius", "density", "xi")}
    lines = [f"{k} = {_toml_value(v)}" for k, v in data.items()]
    for name, table in tables.items():
        lines.append("")
        lines.append(f"[{name}]")
        lines.extend(f"{k} = {_toml_value(v)}" for k, v in table.items())
    Path(path).write_text("\n".join(lines) + "\n")
