"""Experiment configuration: flat "key = value" files with dotted keys.

Example::

    # torus and resolution
    grid.n = 128
    grid.length = 50.26548245743669
    params.alpha = 0.5
    params.qbar = 0.5
    sweep.epsilon_list = 0.1, 0.05, 0.025, 0.0125
    run.t_end = 1.0
    stepper.dt = 2e-3
    ic.family = moist-blob
    output.dir = out

Lines starting with '#' (or blank) are ignored; inline '#' comments are
stripped.  Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .errors import ConfigError
from .initial import FAMILIES, InitialSpec
from .model import ModelParams, validate_params
from .spectral import Grid
from .stepper import StepperConfig

ENV_OUT_DIR = "BAROMOIST_OUT"

_KNOWN_KEYS = {
    "grid.n", "grid.length",
    "params.alpha", "params.qbar", "params.epsilon", "params.qhat",
    "params.mu", "params.eta",
    "sweep.epsilon_list",
    "run.t_end",
    "stepper.dt", "stepper.cfl", "stepper.min_dt", "stepper.max_dt",
    "stepper.adaptive",
    "ic.family", "ic.amplitude", "ic.baroclinic_amplitude",
    "ic.temperature_amplitude", "ic.moisture_amplitude", "ic.width", "ic.seed",
    "probe.deltas",
    "output.dir", "output.record_stride",
}


def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _get(d, key, cast, default):
    if key not in d:
        return default
    try:
        if cast is bool:
            v = d[key].lower()
            if v in ("true", "1", "yes"):
                return True
            if v in ("false", "0", "no"):
                return False
            raise ValueError(v)
        return cast(d[key])
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {d[key]!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad float list: {text!r}") from exc


@dataclass
class ExperimentConfig:
    grid_n: int = 128
    grid_length: float = 16.0 * 3.141592653589793
    alpha: float = 0.5
    qbar: float = 0.5
    qhat: float = 1.0
    mu: float = 1.0
    eta: float = 0.0
    epsilon: float = 0.05                    # single-run relaxation time
    epsilon_list: list[float] = field(
        default_factory=lambda: [0.1, 0.05, 0.025, 0.0125])
    t_end: float = 1.0
    stepper: StepperConfig = field(default_factory=StepperConfig)
    ic: InitialSpec = field(default_factory=InitialSpec)
    probe_deltas: list[float] = field(
        default_factory=lambda: [1e-2, 1e-3, 1e-4])
    out_dir: str = "out"
    record_stride: int = 10

    def grid(self) -> Grid:
        return Grid(self.grid_n, self.grid_length)

    def params(self, epsilon: float | None = None) -> ModelParams:
        eps = self.epsilon if epsilon is None else epsilon
        return validate_params(ModelParams(
            alpha=self.alpha, qbar=self.qbar, epsilon=eps,
            qhat=self.qhat, mu=self.mu, eta=self.eta))

    def validate(self) -> "ExperimentConfig":
        if self.t_end <= 0:
            raise ConfigError(f"run.t_end must be positive, got {self.t_end}")
        if self.record_stride < 1:
            raise ConfigError("output.record_stride must be >= 1")
        eps = self.epsilon_list
        if any(e <= 0 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
            raise ConfigError(
                f"sweep.epsilon_list must be strictly decreasing and positive: {eps}")
        if self.ic.family not in FAMILIES:
            raise ConfigError(f"unknown ic.family {self.ic.family!r}")
        try:
            self.params()
        except Exception as exc:
            raise ConfigError(str(exc)) from exc
        return self


def config_from_dict(d: dict[str, str]) -> ExperimentConfig:
    base = ExperimentConfig()
    stepper = StepperConfig(
        dt=_get(d, "stepper.dt", float, 1e-3),
        cfl=_get(d, "stepper.cfl", float, 0.5),
        min_dt=_get(d, "stepper.min_dt", float, 1e-8),
        max_dt=_get(d, "stepper.max_dt", float, 1.0),
        adaptive=_get(d, "stepper.adaptive", bool, True),
    )
    ic = InitialSpec(
        family=_get(d, "ic.family", str, base.ic.family),
        amplitude=_get(d, "ic.amplitude", float, base.ic.amplitude),
        baroclinic_amplitude=_get(d, "ic.baroclinic_amplitude", float,
                                  base.ic.baroclinic_amplitude),
        temperature_amplitude=_get(d, "ic.temperature_amplitude", float,
                                   base.ic.temperature_amplitude),
        moisture_amplitude=_get(d, "ic.moisture_amplitude", float,
                                base.ic.moisture_amplitude),
        width=_get(d, "ic.width", float, None),
        seed=_get(d, "ic.seed", int, 0),
    )
    out_dir = os.environ.get(ENV_OUT_DIR) or _get(d, "output.dir", str, "out")
    cfg = ExperimentConfig(
        grid_n=_get(d, "grid.n", int, base.grid_n),
        grid_length=_get(d, "grid.length", float, base.grid_length),
        alpha=_get(d, "params.alpha", float, base.alpha),
        qbar=_get(d, "params.qbar", float, base.qbar),
        qhat=_get(d, "params.qhat", float, base.qhat),
        mu=_get(d, "params.mu", float, base.mu),
        eta=_get(d, "params.eta", float, base.eta),
        epsilon=_get(d, "params.epsilon", float, base.epsilon),
        epsilon_list=(_float_list(d["sweep.epsilon_list"])
                      if "sweep.epsilon_list" in d else base.epsilon_list),
        t_end=_get(d, "run.t_end", float, base.t_end),
        stepper=stepper,
        ic=ic,
        probe_deltas=(_float_list(d["probe.deltas"])
                      if "probe.deltas" in d else base.probe_deltas),
        out_dir=out_dir,
        record_stride=_get(d, "output.record_stride", int, base.record_stride),
    )
    return cfg.validate()


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(parse_config_text(text))
