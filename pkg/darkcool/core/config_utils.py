# core/config_utils.py
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

from darkcool import __version__
from darkcool.core import defaults as cfg
from darkcool.core.errors import ConfigError
from darkcool.core.model import GridSpec, SimulationConfig, TrapSpec, TsepPolicy, validate

logger = logging.getLogger(__name__)

_FLOAT_FIELDS = ("lamb_dicke", "thermal_quanta", "doughnut_width", "peak_pulse_area")
_INT_FIELDS = ("doughnut_order", "num_pulses", "basis_size", "quadrature_order", "rng_seed")
CONFIG_KEYS = frozenset(
    _FLOAT_FIELDS
    + _INT_FIELDS
    + ("tsep_policy", "trap", "grid", "angular_distribution", "length_unit")
)


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{where}: expected a finite number, got {value!r}")
    return float(value)


def _integer(value, where):
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    if not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    return value


def _section(value, where, allowed):
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: expected an object, got {value!r}")
    unknown = sorted(set(value) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    return value


def _tsep_policy(raw):
    kind = _section(raw, "tsep_policy", ("kind", "lo", "hi", "value")).get("kind")
    if kind == "random-uniform":
        _section(raw, "tsep_policy", ("kind", "lo", "hi"))
        lo = _number(raw.get("lo", cfg.TSEP_RANGE[0]), "tsep_policy.lo")
        hi = _number(raw.get("hi", cfg.TSEP_RANGE[1]), "tsep_policy.hi")
        return TsepPolicy.random_uniform(lo, hi)
    if kind == "fixed":
        _section(raw, "tsep_policy", ("kind", "value"))
        if "value" not in raw:
            raise ConfigError("tsep_policy: fixed policy needs a value")
        return TsepPolicy.fixed(_number(raw["value"], "tsep_policy.value"))
    raise ConfigError(f"tsep_policy.kind: expected one of {cfg.TSEP_KINDS}, got {kind!r}")


def _trap(raw):
    kind = _section(raw, "trap", ("kind", "epsilon", "g")).get("kind")
    if kind == "harmonic":
        _section(raw, "trap", ("kind",))
        return TrapSpec.harmonic()
    if kind == "perturbed":
        return TrapSpec.perturbed(
            _number(raw.get("epsilon", cfg.PERTURBED_EPSILON), "trap.epsilon"),
            _number(raw.get("g", cfg.PERTURBED_G), "trap.g"),
        )
    raise ConfigError(f"trap.kind: expected one of {cfg.TRAP_KINDS}, got {kind!r}")


def _grid(raw):
    _section(raw, "grid", ("half_width", "points"))
    half_width = raw.get("half_width")
    points = raw.get("points")
    return GridSpec(
        half_width=None if half_width is None else _number(half_width, "grid.half_width"),
        points=None if points is None else _integer(points, "grid.points"),
    )


def config_from_dict(data) -> SimulationConfig:
    """Build a config from a JSON document; keys must match field names verbatim."""
    if not isinstance(data, dict):
        raise ConfigError(f"config: expected a JSON object, got {type(data).__name__}")
    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"config: unknown keys {unknown}")

    kwargs = {}
    for name in _FLOAT_FIELDS:
        if name in data:
            kwargs[name] = _number(data[name], name)
    for name in _INT_FIELDS:
        if name in data:
            kwargs[name] = _integer(data[name], name)
    if "tsep_policy" in data:
        kwargs["tsep_policy"] = _tsep_policy(data["tsep_policy"])
    if "trap" in data:
        kwargs["trap"] = _trap(data["trap"])
    if "grid" in data:
        kwargs["grid"] = _grid(data["grid"])
    if "angular_distribution" in data:
        value = data["angular_distribution"]
        if not isinstance(value, str):
            raise ConfigError(f"angular_distribution: expected a string, got {value!r}")
        kwargs["angular_distribution"] = value
    if "length_unit" in data:
        value = data["length_unit"]
        if not isinstance(value, str):
            raise ConfigError(f"length_unit: expected a string, got {value!r}")
        kwargs["length_unit"] = value
    return SimulationConfig(**kwargs)


def config_to_dict(config: SimulationConfig, resolve_grid=True):
    """Inverse of config_from_dict. With resolve_grid the derived (L, M) are written out."""
    policy = config.tsep_policy
    if policy.is_random:
        tsep = {"kind": policy.kind, "lo": policy.lo, "hi": policy.hi}
    else:
        tsep = {"kind": policy.kind, "value": policy.value}
    if config.trap.is_harmonic:
        trap = {"kind": "harmonic"}
    else:
        trap = {"kind": "perturbed", "epsilon": config.trap.epsilon, "g": config.trap.g}
    if resolve_grid:
        half_width, points = config.resolved_grid()
        grid = {"half_width": half_width, "points": points}
    else:
        grid = {
            key: value
            for key, value in (("half_width", config.grid.half_width), ("points", config.grid.points))
            if value is not None
        }
    return {
        "lamb_dicke": config.lamb_dicke,
        "thermal_quanta": config.thermal_quanta,
        "doughnut_order": config.doughnut_order,
        "doughnut_width": config.doughnut_width,
        "peak_pulse_area": config.peak_pulse_area,
        "tsep_policy": tsep,
        "num_pulses": config.num_pulses,
        "trap": trap,
        "basis_size": config.basis_size,
        "grid": grid,
        "angular_distribution": config.angular_distribution,
        "quadrature_order": config.quadrature_order,
        "rng_seed": config.rng_seed,
        "length_unit": config.length_unit,
    }


def _read_json(path, what):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {what} {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what} {path} is not valid JSON: {exc}") from exc


def load_config(path, seed=None) -> SimulationConfig:
    """Read, parse and validate a config file; seed overrides rng_seed."""
    config = config_from_dict(_read_json(path, "config"))
    if seed is not None:
        config = config.with_changes(rng_seed=seed)
    report = validate(config)
    if not report.valid:
        raise ConfigError(f"invalid config {path}: {report}")
    logger.info("loaded config %s (trap=%s, n_max=%d)", path, config.trap.kind, config.basis_size)
    return config


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: Tuple[float, ...] = ()
    pairs: Tuple[Tuple[int, float], ...] = ()
    checkpoints: Tuple[int, ...] = cfg.CHECKPOINTS


def _checkpoints(raw):
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"sweep.checkpoints: expected a non-empty list, got {raw!r}")
    points = tuple(_integer(value, "sweep.checkpoints") for value in raw)
    if points[0] < 0 or any(b <= a for a, b in zip(points, points[1:])):
        raise ConfigError(f"sweep.checkpoints: must be non-negative and strictly ascending, got {list(points)}")
    return points


def sweep_from_dict(data) -> SweepSpec:
    if not isinstance(data, dict):
        raise ConfigError("sweep: expected a JSON object")
    parameter = data.get("parameter")
    checkpoints = _checkpoints(data["checkpoints"]) if "checkpoints" in data else cfg.CHECKPOINTS
    if parameter == "width":
        _section(data, "sweep", ("parameter", "values", "checkpoints"))
        values = data.get("values")
        if not isinstance(values, list):
            raise ConfigError("sweep.values: expected a list of widths")
        widths = tuple(_number(v, "sweep.values") for v in values)
        return SweepSpec(parameter="width", values=widths, checkpoints=checkpoints)
    if parameter == "order":
        _section(data, "sweep", ("parameter", "pairs", "checkpoints"))
        raw_pairs = data.get("pairs")
        if not isinstance(raw_pairs, list):
            raise ConfigError("sweep.pairs: expected a list of [exponent, width] pairs")
        pairs = []
        for item in raw_pairs:
            if not isinstance(item, list) or len(item) != 2:
                raise ConfigError(f"sweep.pairs: expected [exponent, width], got {item!r}")
            exponent = _integer(item[0], "sweep.pairs exponent")
            if exponent < 0 or exponent % 2:
                raise ConfigError(f"sweep.pairs: exponent 2n must be even and >= 0, got {exponent}")
            pairs.append((exponent, _number(item[1], "sweep.pairs width")))
        return SweepSpec(parameter="order", pairs=tuple(pairs), checkpoints=checkpoints)
    raise ConfigError(f"sweep.parameter: expected 'width' or 'order', got {parameter!r}")


def load_sweep_spec(path) -> SweepSpec:
    return sweep_from_dict(_read_json(path, "sweep spec"))


def run_metadata(command, config: SimulationConfig, **extra):
    """Metadata block of an output bundle; the config round-trips through config_from_dict."""
    metadata = {
        "version": __version__,
        "command": command,
        "seed": config.rng_seed,
        "config": config_to_dict(config),
    }
    metadata.update(extra)
    return metadata
