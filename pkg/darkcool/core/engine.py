# core/engine.py
"""Cooling sequences, parameter sweeps and the T_sep commensurability experiment."""
import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from tqdm import tqdm

from darkcool.core import defaults as cfg
from darkcool.core.basis import TrapBasis, build_basis, spatial_density
from darkcool.core.errors import ConfigError, DimensionError, NumericalGuardError
from darkcool.core.model import (
    DensityMatrix,
    GridSpec,
    SimulationConfig,
    Trajectory,
    TrapSpec,
    TsepPolicy,
    validate,
)
from darkcool.core.pulsemap import apply_cycle, build_cycle_operators, feeding_matrix, thermal_state
from darkcool.core.runner import JobRunner

logger = logging.getLogger(__name__)


class TsepSampler:
    """Per-pulse nu*T_sep draws; a fixed seed reproduces the sequence bit for bit."""

    def __init__(self, policy: TsepPolicy, seed):
        self.policy = policy
        self._rng = np.random.Generator(np.random.PCG64(seed))

    def draw(self):
        if not self.policy.is_random:
            return self.policy.value
        lo, hi = self.policy.lo, self.policy.hi
        return lo + (hi - lo) * self._rng.random()


def derive_seed(seed, index):
    """Child seed for sweep point index, hashed from (seed, index)."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1, np.uint64)[0])


def _require_valid(config):
    report = validate(config)
    if not report.valid:
        raise ConfigError(f"invalid config: {report}")


def shared_feeding(config: SimulationConfig, basis: TrapBasis):
    thermal = thermal_state(config.thermal_quanta, basis.size)
    return feeding_matrix(
        thermal, config.internal_lamb_dicke(), basis, config.angular_distribution, config.quadrature_order
    )


def run_sequence(config: SimulationConfig, basis=None, feeding=None,
                 keep_final_state=False, progress=False) -> Trajectory:
    """Start from the thermal state and apply num_pulses cycles.

    Record 0 is the initial state (zeta = 0). A prebuilt basis and feeding
    matrix may be shared between runs that agree on trap, grid, eta, N and
    emission pattern.
    """
    _require_valid(config)
    if basis is None:
        basis = build_basis(config)
    elif basis.size != config.basis_size:
        raise DimensionError(f"basis has {basis.size} states, config asks for {config.basis_size}")
    ops = build_cycle_operators(config, basis, feeding)

    rho = DensityMatrix.diagonal(ops.thermal)
    trajectory = Trajectory()
    trajectory.append(0, rho, 0.0)
    sampler = TsepSampler(config.tsep_policy, config.rng_seed)

    pulses = tqdm(
        range(1, config.num_pulses + 1),
        desc="Pulse cycles",
        unit="pulse",
        disable=not progress,
        leave=False,
    )
    for pulse in pulses:
        rho, zeta = apply_cycle(rho, ops, sampler.draw())
        trajectory.append(pulse, rho, zeta)

    problems = rho.violations()
    if problems:
        raise NumericalGuardError(f"final density matrix is corrupted: {'; '.join(problems)}")
    if keep_final_state:
        trajectory.final_state = rho
        trajectory.final_density = spatial_density(rho, basis)
    logger.info(
        "sequence done: %d pulses, P_g0 %.4f -> %.4f",
        config.num_pulses, trajectory.records[0].ground_population, trajectory.final_ground_population(),
    )
    return trajectory


@dataclass(frozen=True)
class SweepPoint:
    exponent: int
    width: float
    seed: int
    ground_populations: Tuple[float, ...]


@dataclass
class SweepResult:
    parameter: str
    checkpoints: Tuple[int, ...]
    points: List[SweepPoint] = field(default_factory=list)

    def rows(self):
        """(param_name, param_value, checkpoint, Pg0) in sweep order."""
        for point in self.points:
            value = point.width if self.parameter == "width" else point.exponent
            for checkpoint, population in zip(self.checkpoints, point.ground_populations):
                yield self.parameter, value, checkpoint, population

    def best(self, checkpoint=None):
        index = -1 if checkpoint is None else self.checkpoints.index(checkpoint)
        return max(self.points, key=lambda point: point.ground_populations[index])


def _check_checkpoints(checkpoints):
    checkpoints = tuple(int(c) for c in checkpoints)
    if not checkpoints:
        raise ConfigError("at least one checkpoint is required")
    if checkpoints[0] < 0 or any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ConfigError(f"checkpoints must be non-negative and strictly ascending, got {list(checkpoints)}")
    return checkpoints


def sweep_point_config(config: SimulationConfig, index, exponent, width, checkpoints):
    """Config of the index-th sweep point: beam (2n, alpha), derived seed, enough pulses."""
    if exponent < 0 or exponent % 2:
        raise ConfigError(f"doughnut exponent 2n must be even and >= 0, got {exponent}")
    return config.with_changes(
        doughnut_order=exponent // 2,
        doughnut_width=float(width),
        num_pulses=max(checkpoints),
        rng_seed=derive_seed(config.rng_seed, index),
    )


def _sweep(config, parameter, beams, checkpoints, jobs, progress):
    checkpoints = _check_checkpoints(checkpoints)
    result = SweepResult(parameter, checkpoints)
    if not beams:
        return result
    variants = [
        sweep_point_config(config, index, exponent, width, checkpoints)
        for index, (exponent, width) in enumerate(beams)
    ]
    for variant in variants:
        _require_valid(variant)
    basis = build_basis(variants[0])
    feeding = shared_feeding(variants[0], basis)

    def run_point(variant):
        trajectory = run_sequence(variant, basis=basis, feeding=feeding, progress=progress and jobs == 1)
        populations = tuple(trajectory.ground_population_at(c) for c in checkpoints)
        for checkpoint, population in zip(checkpoints, populations):
            logger.debug("seed %d checkpoint %d: P_g0 %.6f", variant.rng_seed, checkpoint, population)
        logger.info(
            "sweep point 2n=%d alpha=%g: P_g0 %s",
            2 * variant.doughnut_order, variant.doughnut_width,
            ", ".join(f"{p:.4f}" for p in populations),
        )
        return SweepPoint(2 * variant.doughnut_order, variant.doughnut_width, variant.rng_seed, populations)

    result.points = JobRunner(jobs).run_all(run_point, variants)
    return result


def sweep_width(config: SimulationConfig, widths, checkpoints=cfg.CHECKPOINTS,
                jobs=1, progress=False) -> SweepResult:
    """P_g0 at the checkpoints as a function of the doughnut width alpha."""
    exponent = 2 * config.doughnut_order
    return _sweep(config, "width", [(exponent, w) for w in widths], checkpoints, jobs, progress)


def sweep_order(config: SimulationConfig, pairs, checkpoints=cfg.CHECKPOINTS,
                jobs=1, progress=False) -> SweepResult:
    """P_g0 at the checkpoints for jointly varied (2n, alpha) pairs."""
    return _sweep(config, "exponent", [(int(e), w) for e, w in pairs], checkpoints, jobs, progress)


@dataclass(frozen=True)
class CommensurabilityRow:
    label: str
    policy: TsepPolicy
    final_ground_population: float


def commensurability_experiment(config: SimulationConfig, fixed_values,
                                jobs=1, progress=False) -> List[CommensurabilityRow]:
    """Final P_g0 for each fixed nu*T_sep, followed by the random-T_sep baseline.

    The baseline uses the config's policy when it is random, otherwise the
    default flat distribution.
    """
    _require_valid(config)
    baseline = config.tsep_policy
    if not baseline.is_random:
        baseline = TsepPolicy.random_uniform(*cfg.TSEP_RANGE)
    policies = [TsepPolicy.fixed(v) for v in fixed_values] + [baseline]
    variants = [config.with_changes(tsep_policy=p) for p in policies]
    for variant in variants:
        _require_valid(variant)
    basis = build_basis(config)
    feeding = shared_feeding(config, basis)

    def run_variant(variant):
        trajectory = run_sequence(variant, basis=basis, feeding=feeding, progress=progress and jobs == 1)
        policy = variant.tsep_policy
        label = f"random[{policy.lo:g},{policy.hi:g}]" if policy.is_random else f"fixed {policy.value:g}"
        return CommensurabilityRow(label, policy, trajectory.final_ground_population())

    return JobRunner(jobs).run_all(run_variant, variants)


def perturbed_trap_run(config: SimulationConfig, epsilon=cfg.PERTURBED_EPSILON, g=cfg.PERTURBED_G,
                       order=1, width=8.0, **kwargs) -> Trajectory:
    """Cooling in the localizing trap with a low-order doughnut (2n = 2, alpha = 8)."""
    variant = config.with_changes(
        trap=TrapSpec.perturbed(epsilon, g), doughnut_order=order, doughnut_width=width
    )
    return run_sequence(variant, **kwargs)


def reference_config(config: SimulationConfig) -> SimulationConfig:
    """Harmonic companion of the localizing-trap run: eta = 1, N = 4, 2n = 2, alpha = 10."""
    return config.with_changes(
        trap=TrapSpec.harmonic(),
        lamb_dicke=1.0,
        thermal_quanta=4.0,
        doughnut_order=1,
        doughnut_width=10.0,
        basis_size=80,
        grid=GridSpec(),
    )
