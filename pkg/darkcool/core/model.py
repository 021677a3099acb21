# core/model.py
"""Configuration and state types shared by every other module.

Units: hbar = m = nu = 1, so lengths are in oscillator units sqrt(hbar/m nu),
energies in units of hbar*nu and times (nu*T_sep) in radians. The inputs eta,
alpha and g are quoted against a length a0 chosen by ``length_unit``: the
oscillator length itself, or the ground-state rms width sqrt(hbar/2m nu).
Only dimensionless combinations (eta, nu*T_sep, Omega(x)*dt/2) ever enter the
cycle map, so wavelength, pulse duration, mass and pumping rate never need
independent values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from darkcool.core import defaults as cfg
from darkcool.core.errors import DimensionError


@dataclass(frozen=True)
class TsepPolicy:
    """Distribution of nu*T_sep (radians) drawn once per pulse cycle."""

    kind: str = "random-uniform"
    lo: float = cfg.TSEP_RANGE[0]
    hi: float = cfg.TSEP_RANGE[1]
    value: float = 0.0

    @classmethod
    def random_uniform(cls, lo, hi):
        return cls(kind="random-uniform", lo=float(lo), hi=float(hi))

    @classmethod
    def fixed(cls, value):
        return cls(kind="fixed", value=float(value))

    @property
    def is_random(self):
        return self.kind == "random-uniform"

    def midpoint(self):
        if self.is_random:
            return 0.5 * (self.lo + self.hi)
        return self.value


@dataclass(frozen=True)
class TrapSpec:
    """Harmonic trap, or the localizing potential
    V(x) = 1/2 [x^2 + epsilon x^2 / (1 + g x^2)]."""

    kind: str = "harmonic"
    epsilon: float = 0.0
    g: float = 0.0

    @classmethod
    def harmonic(cls):
        return cls()

    @classmethod
    def perturbed(cls, epsilon=cfg.PERTURBED_EPSILON, g=cfg.PERTURBED_G):
        return cls(kind="perturbed", epsilon=float(epsilon), g=float(g))

    @property
    def is_harmonic(self):
        return self.kind == "harmonic"


@dataclass(frozen=True)
class GridSpec:
    """Half-width L (oscillator units) and point count M; None means derive a default."""

    half_width: Optional[float] = None
    points: Optional[int] = None


@dataclass(frozen=True)
class SimulationConfig:
    lamb_dicke: float = cfg.LAMB_DICKE
    thermal_quanta: float = cfg.THERMAL_QUANTA
    doughnut_order: int = cfg.DOUGHNUT_ORDER
    doughnut_width: float = cfg.DOUGHNUT_WIDTH
    peak_pulse_area: float = cfg.PEAK_PULSE_AREA
    tsep_policy: TsepPolicy = field(default_factory=TsepPolicy)
    num_pulses: int = cfg.NUM_PULSES
    trap: TrapSpec = field(default_factory=TrapSpec)
    basis_size: int = cfg.BASIS_SIZE
    grid: GridSpec = field(default_factory=GridSpec)
    angular_distribution: str = "flat"
    quadrature_order: int = cfg.QUADRATURE_ORDER
    rng_seed: int = cfg.RNG_SEED
    length_unit: str = "oscillator"

    @property
    def length_scale(self) -> float:
        """Size of a0 in oscillator units."""
        return cfg.LENGTH_UNITS.get(self.length_unit, 1.0)

    def internal_lamb_dicke(self) -> float:
        return self.lamb_dicke / self.length_scale

    def internal_width(self) -> float:
        return self.doughnut_width * self.length_scale

    def internal_trap(self) -> TrapSpec:
        """The trap with g converted from 1/a0^2 to oscillator units."""
        if self.trap.is_harmonic:
            return self.trap
        return TrapSpec.perturbed(self.trap.epsilon, self.trap.g / self.length_scale**2)

    def resolved_grid(self) -> Tuple[float, int]:
        """(L, M) with defaults filled in.

        L defaults to the classical turning point of the highest retained
        harmonic level plus a 25% margin, but never closer than a fixed
        padding of a0 (small bases). M defaults to 2048, refined for the
        perturbed trap so the narrow well spans several grid spacings.
        """
        turning = math.sqrt(2 * max(self.basis_size, 0) + 1)
        half_width = self.grid.half_width
        if half_width is None:
            half_width = max(cfg.GRID_MARGIN * turning, turning + cfg.GRID_MIN_PADDING)
        points = self.grid.points
        if points is None:
            points = cfg.GRID_POINTS
            trap = self.internal_trap()
            if not trap.is_harmonic and trap.g > 0 and half_width > 0:
                spacing = cfg.WELL_SAMPLING / math.sqrt(trap.g)
                points = max(points, int(math.ceil(2 * half_width / spacing)) + 1)
        return float(half_width), int(points)

    def with_changes(self, **changes) -> "SimulationConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[str, ...] = ()

    @property
    def valid(self):
        return not self.violations

    def __str__(self):
        if self.valid:
            return "valid"
        return "; ".join(self.violations)


def _is_int(value):
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def validate(config: SimulationConfig) -> ValidationReport:
    """Check every range invariant of a configuration; never raises."""
    problems: List[str] = []

    def need(ok, message):
        if not ok:
            problems.append(message)

    need(config.lamb_dicke > 0, f"lamb_dicke: must be > 0 (got {config.lamb_dicke})")
    need(config.thermal_quanta >= 0, f"thermal_quanta: must be >= 0 (got {config.thermal_quanta})")
    need(
        _is_int(config.doughnut_order) and config.doughnut_order >= 0,
        f"doughnut_order: must be an integer >= 0 (got {config.doughnut_order})",
    )
    need(config.doughnut_width > 0, f"doughnut_width: must be > 0 (got {config.doughnut_width})")
    need(config.peak_pulse_area >= 0, f"peak_pulse_area: must be >= 0 (got {config.peak_pulse_area})")
    need(
        _is_int(config.num_pulses) and config.num_pulses >= 0,
        f"num_pulses: must be an integer >= 0 (got {config.num_pulses})",
    )

    policy = config.tsep_policy
    if policy.kind == "random-uniform":
        need(
            0 < policy.lo < policy.hi,
            f"tsep_policy: random-uniform requires 0 < lo < hi (got lo={policy.lo}, hi={policy.hi})",
        )
    elif policy.kind == "fixed":
        need(math.isfinite(policy.value), f"tsep_policy: fixed value must be finite (got {policy.value})")
    else:
        problems.append(f"tsep_policy: unknown kind {policy.kind!r}")

    trap = config.trap
    if trap.kind == "perturbed":
        need(trap.epsilon >= 0, f"trap.epsilon: must be >= 0 (got {trap.epsilon})")
        need(trap.g >= 0, f"trap.g: must be >= 0 (got {trap.g})")
    elif trap.kind != "harmonic":
        problems.append(f"trap: unknown kind {trap.kind!r}")

    need(
        _is_int(config.basis_size) and config.basis_size >= 2,
        f"basis_size: must be an integer >= 2 (got {config.basis_size})",
    )
    half_width, points = config.resolved_grid()
    need(half_width > 0, f"grid.half_width: must be > 0 (got {half_width})")
    need(
        _is_int(points) and points >= cfg.MIN_GRID_POINTS,
        f"grid.points: must be an integer >= {cfg.MIN_GRID_POINTS} (got {points})",
    )
    if _is_int(config.basis_size):
        need(
            points >= cfg.POINTS_PER_BASIS_STATE * config.basis_size,
            f"grid.points: resolution rule requires points >= "
            f"{cfg.POINTS_PER_BASIS_STATE}*basis_size "
            f"(got {points} < {cfg.POINTS_PER_BASIS_STATE * config.basis_size})",
        )

    need(
        config.length_unit in cfg.LENGTH_UNITS,
        f"length_unit: must be one of {tuple(cfg.LENGTH_UNITS)} (got {config.length_unit!r})",
    )
    need(
        config.angular_distribution in cfg.ANGULAR_DISTRIBUTIONS,
        f"angular_distribution: must be one of {cfg.ANGULAR_DISTRIBUTIONS} "
        f"(got {config.angular_distribution!r})",
    )
    need(
        _is_int(config.quadrature_order) and config.quadrature_order >= 2,
        f"quadrature_order: must be an integer >= 2 (got {config.quadrature_order})",
    )
    need(
        _is_int(config.rng_seed) and 0 <= config.rng_seed < 2**64,
        f"rng_seed: must be an integer in [0, 2**64) (got {config.rng_seed})",
    )
    return ValidationReport(tuple(problems))


class DensityMatrix:
    """rho_g in the trap eigenbasis. Immutable by convention: operations
    return new instances."""

    def __init__(self, data):
        data = np.asarray(data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {data.shape}")
        self.data = data

    @classmethod
    def diagonal(cls, weights):
        return cls(np.diag(np.asarray(weights, dtype=complex)))

    @property
    def size(self):
        return self.data.shape[0]

    def trace(self):
        return complex(np.trace(self.data))

    def populations(self):
        return self.data.diagonal().real.copy()

    def ground_population(self):
        return float(self.data[0, 0].real)

    def purity(self):
        # trace(rho^2) = sum |rho_mn|^2 for Hermitian rho
        return float(np.vdot(self.data, self.data).real)

    def mean_quanta(self):
        pops = self.populations()
        return float(np.dot(np.arange(pops.size), pops))

    def off_diagonal_norm(self):
        off = self.data - np.diag(self.data.diagonal())
        return float(np.abs(off).max()) if off.size else 0.0

    def violations(self, check_positivity=True):
        problems = []
        asym = np.abs(self.data - self.data.conj().T).max()
        if asym >= cfg.HERMITICITY:
            problems.append(f"not Hermitian (max deviation {asym:.3e})")
        drift = abs(self.trace() - 1.0)
        if drift >= cfg.UNIT_TRACE:
            problems.append(f"trace deviates from 1 by {drift:.3e}")
        if check_positivity:
            lowest = float(np.linalg.eigvalsh(0.5 * (self.data + self.data.conj().T))[0])
            if lowest < -cfg.POSITIVITY:
                problems.append(f"not positive semidefinite (lowest eigenvalue {lowest:.3e})")
        return problems


@dataclass(frozen=True)
class PulseRecord:
    pulse: int
    ground_population: float
    populations: np.ndarray
    zeta: float
    purity: float
    mean_quanta: float


@dataclass
class Trajectory:
    records: List[PulseRecord] = field(default_factory=list)
    final_state: Optional[DensityMatrix] = None
    final_density: Optional[np.ndarray] = None

    def append(self, pulse, rho: DensityMatrix, zeta):
        pops = rho.populations()
        self.records.append(
            PulseRecord(
                pulse=pulse,
                ground_population=float(pops[0]),
                populations=pops,
                zeta=float(zeta),
                purity=rho.purity(),
                mean_quanta=float(np.dot(np.arange(pops.size), pops)),
            )
        )

    def __len__(self):
        return len(self.records)

    def ground_populations(self):
        return np.array([r.ground_population for r in self.records])

    def zetas(self):
        return np.array([r.zeta for r in self.records])

    def final_ground_population(self):
        return self.records[-1].ground_population

    def ground_population_at(self, pulse):
        return self.records[pulse].ground_population
