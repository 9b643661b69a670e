"""Configuration files for the command-line tools.

Configs are YAML documents (conventionally ``.cfg``).  Every key is
checked against a schema; unknown keys are rejected with their dotted
path, so typos fail loudly instead of silently using defaults.

Frequencies may be given per mode as either ``f`` (cycles per unit time)
or ``omega`` (radians per unit time), whichever matches the source of
the numbers.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import List, Optional, Tuple

import yaml

from .bench import (
    MethodSpec,
    NonuniformSampling,
    ReconstructionSettings,
    SamplingSpec,
    Scenario,
    UniformSampling,
)
from .exceptions import ConfigError
from .signals import NoiseModel, Pole, SignalSpec

_TWO_PI = 2.0 * math.pi

_SCHEMA = {
    "signal": {"conjugate_pairs", "modes"},
    "sampling": {"kind", "count", "step", "schedule_seed", "min_gap", "max_gap"},
    "noise": {"kind", "rho"},
    "snr_db": None,
    "snr_convention": None,
    "seed": None,
    "reconstruction": {
        "grid_step", "order", "order_min", "order_max",
        "grid_len", "allow_extrapolation",
    },
    "methods": None,
    "bench": {"n_trials"},
    "output": {"directory"},
}

_MODE_KEYS = {"beta", "alpha", "f", "omega"}
_METHOD_KEYS = {
    "method", "J", "M", "I", "weighting", "direct", "svd_correction", "label",
}


@dataclass
class Config:
    """Validated configuration, ready to drive the subcommands."""

    signal: Optional[SignalSpec] = None
    sampling: Optional[SamplingSpec] = None
    noise: NoiseModel = field(default_factory=NoiseModel)
    snr_db: float = math.inf
    snr_convention: str = "average"
    seed: int = 0
    reconstruction: ReconstructionSettings = field(
        default_factory=ReconstructionSettings
    )
    methods: Tuple[MethodSpec, ...] = ()
    n_trials: int = 100
    output_dir: str = "out"

    def to_scenario(self) -> Scenario:
        if self.signal is None:
            raise ConfigError("benchmarking needs a 'signal' section")
        if self.sampling is None:
            raise ConfigError("benchmarking needs a 'sampling' section")
        if not self.methods:
            raise ConfigError("benchmarking needs a 'methods' list")
        return Scenario(
            signal=self.signal,
            sampling=self.sampling,
            noise=self.noise,
            snr_db=self.snr_db,
            methods=self.methods,
            n_trials=self.n_trials,
            base_seed=self.seed,
            snr_convention=self.snr_convention,
            reconstruction=self.reconstruction,
        )


def _fail(path: str, message: str) -> ConfigError:
    return ConfigError(f"{path}: {message}")


def _require_mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise _fail(path, "expected a mapping")
    return value


def _check_keys(mapping: dict, allowed: set, path: str) -> None:
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"unknown key '{path}.{key}'" if path
                              else f"unknown key '{key}'")


def _as_float(value, path: str, allow_inf: bool = False) -> float:
    if isinstance(value, str):
        if allow_inf and value.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf
        raise _fail(path, f"expected a number, got {value!r}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(path, f"expected a number, got {value!r}")
    out = float(value)
    if math.isinf(out) and allow_inf:
        return math.inf
    if not math.isfinite(out):
        raise _fail(path, "must be finite")
    return out


def _as_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _fail(path, f"expected an integer, got {value!r}")
    return int(value)


def _as_bool(value, path: str) -> bool:
    if not isinstance(value, bool):
        raise _fail(path, f"expected true/false, got {value!r}")
    return value


def _as_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise _fail(path, f"expected a string, got {value!r}")
    return value


def _parse_signal(raw, path: str) -> SignalSpec:
    raw = _require_mapping(raw, path)
    _check_keys(raw, _SCHEMA["signal"], path)
    if "modes" not in raw:
        raise _fail(path, "missing 'modes'")
    modes_raw = raw["modes"]
    if not isinstance(modes_raw, list) or not modes_raw:
        raise _fail(f"{path}.modes", "expected a nonempty list")
    modes = []
    for idx, item in enumerate(modes_raw):
        mpath = f"{path}.modes[{idx}]"
        item = _require_mapping(item, mpath)
        _check_keys(item, _MODE_KEYS, mpath)
        if "beta" not in item or "alpha" not in item:
            raise _fail(mpath, "each mode needs 'beta' and 'alpha'")
        has_f = "f" in item
        has_w = "omega" in item
        if has_f == has_w:
            raise _fail(mpath, "give exactly one of 'f' or 'omega'")
        beta = _as_float(item["beta"], f"{mpath}.beta")
        alpha = _as_float(item["alpha"], f"{mpath}.alpha")
        if has_f:
            f = _as_float(item["f"], f"{mpath}.f")
        else:
            f = _as_float(item["omega"], f"{mpath}.omega") / _TWO_PI
        modes.append((beta, Pole(alpha=alpha, f=f)))
    conj = raw.get("conjugate_pairs", True)
    return SignalSpec(
        modes=tuple(modes),
        conjugate_pairs=_as_bool(conj, f"{path}.conjugate_pairs"),
    )


def _parse_sampling(raw, path: str) -> SamplingSpec:
    raw = _require_mapping(raw, path)
    _check_keys(raw, _SCHEMA["sampling"], path)
    kind = _as_str(raw.get("kind", ""), f"{path}.kind")
    if "count" not in raw:
        raise _fail(path, "missing 'count'")
    count = _as_int(raw["count"], f"{path}.count")
    if kind == "uniform":
        if "step" not in raw:
            raise _fail(path, "uniform sampling needs 'step'")
        for key in ("schedule_seed", "min_gap", "max_gap"):
            if key in raw:
                raise _fail(f"{path}.{key}", "only valid for nonuniform sampling")
        return UniformSampling(
            step=_as_float(raw["step"], f"{path}.step"), count=count
        )
    if kind == "nonuniform":
        if "schedule_seed" not in raw:
            raise _fail(path, "nonuniform sampling needs 'schedule_seed'")
        if "step" in raw:
            raise _fail(f"{path}.step", "only valid for uniform sampling")
        return NonuniformSampling(
            seed=_as_int(raw["schedule_seed"], f"{path}.schedule_seed"),
            count=count,
            min_gap=_as_float(raw.get("min_gap", 0.1), f"{path}.min_gap"),
            max_gap=_as_float(raw.get("max_gap", 1.1), f"{path}.max_gap"),
        )
    raise _fail(f"{path}.kind", "expected 'uniform' or 'nonuniform'")


def _parse_noise(raw, path: str) -> NoiseModel:
    raw = _require_mapping(raw, path)
    _check_keys(raw, _SCHEMA["noise"], path)
    kind = _as_str(raw.get("kind", "white-gaussian"), f"{path}.kind")
    rho = _as_float(raw.get("rho", 0.0), f"{path}.rho")
    try:
        return NoiseModel(kind=kind, rho=rho)
    except Exception as exc:
        raise _fail(path, str(exc))


def _parse_reconstruction(raw, path: str) -> ReconstructionSettings:
    raw = _require_mapping(raw, path)
    _check_keys(raw, _SCHEMA["reconstruction"], path)
    order = raw.get("order", "auto")
    if order != "auto":
        order = _as_int(order, f"{path}.order")
    grid_step = raw.get("grid_step")
    if grid_step is not None:
        grid_step = _as_float(grid_step, f"{path}.grid_step")
    grid_len = raw.get("grid_len")
    if grid_len is not None:
        grid_len = _as_int(grid_len, f"{path}.grid_len")
    order_max = raw.get("order_max")
    if order_max is not None:
        order_max = _as_int(order_max, f"{path}.order_max")
    return ReconstructionSettings(
        grid_step=grid_step,
        order=order,
        order_min=_as_int(raw.get("order_min", 1), f"{path}.order_min"),
        order_max=order_max,
        grid_len=grid_len,
        allow_extrapolation=_as_bool(
            raw.get("allow_extrapolation", False),
            f"{path}.allow_extrapolation",
        ),
    )


def _parse_methods(raw, path: str) -> Tuple[MethodSpec, ...]:
    if not isinstance(raw, list) or not raw:
        raise _fail(path, "expected a nonempty list")
    specs: List[MethodSpec] = []
    for idx, item in enumerate(raw):
        mpath = f"{path}[{idx}]"
        item = _require_mapping(item, mpath)
        _check_keys(item, _METHOD_KEYS, mpath)
        if "method" not in item:
            raise _fail(mpath, "missing 'method'")
        method = _as_str(item["method"], f"{mpath}.method")
        kwargs = {}
        if "M" in item:
            kwargs["n_modes"] = _as_int(item["M"], f"{mpath}.M")
        if "J" in item:
            kwargs["extended_order"] = _as_int(item["J"], f"{mpath}.J")
        if "I" in item:
            kwargs["n_lag_rows"] = _as_int(item["I"], f"{mpath}.I")
        if "weighting" in item:
            w = _as_str(item["weighting"], f"{mpath}.weighting")
            if w not in ("error-autocorr", "identity"):
                raise _fail(f"{mpath}.weighting",
                            "expected 'error-autocorr' or 'identity'")
            kwargs["weighting"] = w
        if "direct" in item:
            kwargs["preprocess"] = not _as_bool(
                item["direct"], f"{mpath}.direct"
            )
        if "svd_correction" in item:
            kwargs["svd_correction"] = _as_bool(
                item["svd_correction"], f"{mpath}.svd_correction"
            )
        if "label" in item:
            kwargs["label"] = _as_str(item["label"], f"{mpath}.label")
        try:
            specs.append(MethodSpec(method=method, **kwargs))
        except Exception as exc:
            raise _fail(mpath, str(exc))
    return tuple(specs)


def parse_config(raw: dict, source: str = "<config>") -> Config:
    """Validate a parsed YAML mapping into a :class:`Config`."""
    if raw is None:
        raw = {}
    raw = _require_mapping(raw, source)
    _check_keys(raw, set(_SCHEMA), "")
    cfg = Config()
    if "signal" in raw:
        cfg.signal = _parse_signal(raw["signal"], "signal")
    if "sampling" in raw:
        cfg.sampling = _parse_sampling(raw["sampling"], "sampling")
    if "noise" in raw:
        cfg.noise = _parse_noise(raw["noise"], "noise")
    if "snr_db" in raw:
        cfg.snr_db = _as_float(raw["snr_db"], "snr_db", allow_inf=True)
    if "snr_convention" in raw:
        conv = _as_str(raw["snr_convention"], "snr_convention")
        if conv not in ("average", "peak", "unit"):
            raise _fail("snr_convention", "expected 'average', 'peak' or 'unit'")
        cfg.snr_convention = conv
    if "seed" in raw:
        cfg.seed = _as_int(raw["seed"], "seed")
    if "reconstruction" in raw:
        cfg.reconstruction = _parse_reconstruction(
            raw["reconstruction"], "reconstruction"
        )
    if "methods" in raw:
        cfg.methods = _parse_methods(raw["methods"], "methods")
    if "bench" in raw:
        b = _require_mapping(raw["bench"], "bench")
        _check_keys(b, _SCHEMA["bench"], "bench")
        if "n_trials" in b:
            cfg.n_trials = _as_int(b["n_trials"], "bench.n_trials")
            if cfg.n_trials < 1:
                raise _fail("bench.n_trials", "must be positive")
    if "output" in raw:
        o = _require_mapping(raw["output"], "output")
        _check_keys(o, _SCHEMA["output"], "output")
        if "directory" in o:
            cfg.output_dir = _as_str(o["directory"], "output.directory")
    return cfg


def load_config(path: str) -> Config:
    """Read and validate a config file.

    Raises
    ------
    ConfigError
        On missing files, YAML syntax errors, unknown keys, or invalid
        values.
    """
    try:
        with open(path, "r") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: YAML parse error: {exc}")
    return parse_config(raw, source=path)


def bundled_config_path(name: str) -> Optional[str]:
    """Filesystem path of a config shipped with the package, if any."""
    if not name.endswith(".cfg"):
        name = name + ".cfg"
    ref = resources.files("polyident") / "configs" / name
    try:
        if ref.is_file():
            return str(ref)
    except (OSError, AttributeError):
        return None
    return None


def resolve_config_path(path: str) -> str:
    """Resolve a --config argument: an existing file wins, otherwise a
    bundled config of that name is used."""
    if os.path.exists(path):
        return path
    bundled = bundled_config_path(os.path.basename(path))
    if bundled is not None:
        return bundled
    raise ConfigError(f"config file not found: {path}")
