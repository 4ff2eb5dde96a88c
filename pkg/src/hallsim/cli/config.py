"""Flat ``key = value`` configuration files."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..params import NATURAL, SI, ParameterError, PhysicalParams, UnitSystem
from ..transport import Thresholds

COMMANDS = ("sweep", "staircase", "simulate", "edge", "quantize")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    pass


def _positive(v):
    return v > 0


def _nonneg(v):
    return v >= 0


# key -> (type, default, check, message)
KEYS = {
    # physical parameters
    "e": (float, 1.0, _positive, "e must be positive"),
    "hbar": (float, 1.0, _positive, "hbar must be positive"),
    "mass": (float, 1.0, _positive, "mass must be positive"),
    "tau": (float, 1.0, _positive, "tau must be positive"),
    "density": (float, 1.0, _nonneg, "density must be non-negative"),
    "B": (float, 1.0, _nonneg, "B must be non-negative"),
    "units": (str, NATURAL, lambda v: v in (NATURAL, SI), "units must be natural or si"),
    "length_scale": (float, 1e-9, _positive, "length_scale must be positive"),
    # sweeps
    "B_sweep": (str, "", None, None),
    "tau_sweep": (str, "", None, None),
    "s_cs": (float, 1.0, _positive, "s_cs must be positive"),
    "threshold_classical": (float, 0.1, _positive, "threshold_classical must be positive"),
    "threshold_quantum": (float, 10.0, _positive, "threshold_quantum must be positive"),
    # simulation
    "nx": (int, 64, lambda v: v >= 8, "nx must be at least 8"),
    "ny": (int, 64, lambda v: v >= 8, "ny must be at least 8"),
    "a": (float, None, _positive, "a must be positive"),
    "dt": (float, None, _positive, "dt must be positive"),
    "steps": (int, 100, _nonneg, "steps must be non-negative"),
    "regime": (str, "auto", lambda v: v in ("auto", "classical", "quantum", "crossover"),
               "regime must be auto, classical, quantum or crossover"),
    "psi": (str, "box_mode", lambda v: v in ("plane_wave", "gaussian", "box_mode"),
            "psi must be plane_wave, gaussian or box_mode"),
    "psi_kx": (float, 0.0, None, None),
    "psi_ky": (float, 0.0, None, None),
    "psi_x0": (float, 0.5, None, None),
    "psi_y0": (float, 0.5, None, None),
    "psi_width": (float, 0.1, _positive, "psi_width must be positive"),
    "psi_mx": (int, 1, _positive, "psi_mx must be positive"),
    "psi_my": (int, 1, _positive, "psi_my must be positive"),
    "gauge": (str, "zero", lambda v: v in ("zero", "uniform_e", "pure_gauge"),
              "gauge must be zero, uniform_e or pure_gauge"),
    "E1": (float, 0.0, None, None),
    "E2": (float, 0.0, None, None),
    "tau_gauge": (float, None, _positive, "tau_gauge must be positive"),
    "lambda": (str, "linear", lambda v: v in ("linear", "saddle", "random"),
               "lambda must be linear, saddle or random"),
    "lambda_amplitude": (float, 1.0, None, None),
    "gauge_band": (float, None, _nonneg, "gauge_band must be non-negative"),
    "sigma_H_mode": (str, "quantized", lambda v: v in ("quantized", "continuous"),
                     "sigma_H_mode must be quantized or continuous"),
    "psi_stepper": (str, "cn", lambda v: v in ("cn", "rk4"), "psi_stepper must be cn or rk4"),
    "gauge_stepper": (str, "euler", lambda v: v in ("euler", "heun"),
                      "gauge_stepper must be euler or heun"),
    "stability_factor": (float, 0.5, _positive, "stability_factor must be positive"),
    "sign": (int, 1, lambda v: v in (1, -1), "sign must be 1 or -1"),
    "seed": (int, 0, None, None),
    # edge
    "breakdown_threshold": (float, 0.1, _positive, "breakdown_threshold must be positive"),
    # quantize
    "sigma": (float, 1.0, math.isfinite, "sigma must be finite"),
    "n_phi": (int, 256, lambda v: v >= 16, "n_phi must be at least 16"),
    "h": (float, 1e-3, _positive, "h must be positive"),
}


@dataclass
class RunConfig:
    command: str | None = None
    params_file: str | None = None
    output: str | None = None
    format: str = "csv"
    seed: int = 0
    overrides: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    lines: dict = field(default_factory=dict)  # key -> source line label

    def get(self, key):
        if key in self.values:
            return self.values[key]
        return KEYS[key][1]


def _convert(key, raw, where):
    typ = KEYS[key][0]
    try:
        if typ is int:
            f = float(raw)
            if not f.is_integer():
                raise ValueError
            return int(f)
        if typ is float:
            v = float(raw)
            if math.isnan(v):
                raise ValueError
            return v
        return raw
    except ValueError:
        raise ConfigError(f"{where}: {key} expects {typ.__name__}, got {raw!r}") from None


def _assign(cfg: RunConfig, key: str, raw: str, where: str):
    if key not in KEYS:
        raise ConfigError(f"{where}: unknown key {key!r}")
    value = _convert(key, raw, where)
    check, message = KEYS[key][2], KEYS[key][3]
    if check is not None and not check(value):
        raise ConfigError(f"{where}: {message}")
    cfg.values[key] = value
    cfg.lines[key] = where


def _split(line: str, where: str):
    body = line.split("#", 1)[0].strip()
    if not body:
        return None
    if "=" not in body:
        raise ConfigError(f"{where}: expected 'key = value', got {body!r}")
    key, _, raw = body.partition("=")
    key, raw = key.strip(), raw.strip()
    if not key:
        raise ConfigError(f"{where}: missing key")
    return key, raw


def parse_config(text: str, overrides=(), command: str | None = None) -> RunConfig:
    """Parse and validate a config; ``overrides`` are ``key=value`` strings applied last."""
    cfg = RunConfig(command=command)
    for lineno, line in enumerate(text.splitlines(), 1):
        kv = _split(line, f"line {lineno}")
        if kv:
            _assign(cfg, *kv, f"line {lineno}")
    for item in overrides:
        kv = _split(item, f"--set {item!r}")
        if kv is None:
            continue
        _assign(cfg, *kv, f"--set {item!r}")
        cfg.overrides[kv[0]] = cfg.values[kv[0]]
    cfg.seed = cfg.get("seed")
    physical_params(cfg)
    thresholds(cfg)
    return cfg


def physical_params(cfg: RunConfig) -> PhysicalParams:
    try:
        return PhysicalParams(cfg.get("e"), cfg.get("hbar"), cfg.get("mass"), cfg.get("tau"),
                              cfg.get("density"), cfg.get("B"), cfg.get("units"))
    except ParameterError as exc:
        where = [cfg.lines[k] for k in ("e", "hbar", "mass", "units") if k in cfg.lines]
        raise ConfigError(f"{', '.join(where) or 'config'}: {exc}") from None


def natural_params(cfg: RunConfig) -> PhysicalParams:
    """Parameters in natural units; SI sets are rescaled with ``length_scale``."""
    p = physical_params(cfg)
    if p.units == SI:
        return UnitSystem.for_params(p, cfg.get("length_scale")).to_natural(p)
    return p


def thresholds(cfg: RunConfig) -> Thresholds:
    try:
        return Thresholds(cfg.get("threshold_classical"), cfg.get("threshold_quantum"))
    except ParameterError as exc:
        raise ConfigError(str(exc)) from None


def sim_config(cfg: RunConfig):
    from ..dynamics.runs import GaugeSpec, PsiSpec, SimConfig

    regime = cfg.get("regime")
    psi = PsiSpec(cfg.get("psi"), cfg.get("psi_kx"), cfg.get("psi_ky"), cfg.get("psi_x0"),
                  cfg.get("psi_y0"), cfg.get("psi_width"), cfg.get("psi_mx"), cfg.get("psi_my"))
    gauge = GaugeSpec(cfg.get("gauge"), cfg.get("E1"), cfg.get("E2"), cfg.get("tau_gauge"),
                      cfg.get("lambda"), cfg.get("lambda_amplitude"))
    try:
        return SimConfig(params=natural_params(cfg), nx=cfg.get("nx"), ny=cfg.get("ny"),
                         a=cfg.get("a"), dt=cfg.get("dt"), steps=cfg.get("steps"),
                         regime_override=None if regime == "auto" else regime,
                         initial_psi=psi, initial_A=gauge,
                         sigma_H_mode=cfg.get("sigma_H_mode"),
                         psi_stepper=cfg.get("psi_stepper"),
                         gauge_stepper=cfg.get("gauge_stepper"),
                         stability_factor=cfg.get("stability_factor"), sign=cfg.get("sign"),
                         seed=cfg.get("seed"), s_cs=cfg.get("s_cs"),
                         thresholds=thresholds(cfg), gauge_band=cfg.get("gauge_band"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
