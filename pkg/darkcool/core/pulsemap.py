# core/pulsemap.py
"""Ingredients of the three-pulse cycle map and the map itself.

One cycle acting on the ground-state density matrix rho (trap eigenbasis):

    sigma  = C rho C                      C = cos(theta(x)) in the eigenbasis
    zeta   = 1 - trace(sigma)             probability of transfer to |e>
    rho'   = U sigma U^dagger + zeta F    U = exp(-i E nu*T_sep)

F is the repumped thermal state averaged over recoil kicks
exp(i eta (1 + u) x), u in [-1, 1] weighted by the emission pattern N(u).
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from darkcool.core import defaults as cfg
from darkcool.core.basis import Grid, TrapBasis
from darkcool.core.errors import (
    ConfigError,
    DimensionError,
    ExcitationRangeError,
    ProfileError,
    RangeError,
    TruncationError,
)
from darkcool.core.model import DensityMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PulseProfile:
    """Pulse area theta(x_j) = Omega(x_j) dt / 2 on the grid."""

    grid: Grid
    areas: np.ndarray

    @property
    def peak(self):
        return float(self.areas.max())

    def cosine(self):
        return np.cos(self.areas)


def doughnut_profile(grid: Grid, order, width, peak) -> PulseProfile:
    """theta(x) = peak * f(x) / max_j f(x_j), f(x) = x^(2n) exp(-(x/alpha)^2 / 2).

    order = 0 gives a Gaussian beam.
    """
    if not width > 0:
        raise ConfigError(f"doughnut width must be > 0, got {width}")
    if not peak >= 0:
        raise ConfigError(f"peak pulse area must be >= 0, got {peak}")
    x = grid.points
    shape = x ** (2 * int(order)) * np.exp(-0.5 * (x / width) ** 2)
    top = shape.max()
    if not top > 0:
        raise ProfileError(
            f"doughnut profile (2n={2 * order}, alpha={width}) vanishes on the whole grid"
        )
    return PulseProfile(grid, peak * shape / top)


def uniform_profile(grid: Grid, area) -> PulseProfile:
    return PulseProfile(grid, np.full(grid.size, float(area)))


def _same_grid(profile, basis):
    if not profile.grid.matches(basis.grid):
        raise DimensionError("pulse profile and basis are defined on different grids")


def cosine_operator(profile: PulseProfile, basis: TrapBasis):
    """C_mn = h sum_j psi_m(x_j) cos(theta(x_j)) psi_n(x_j)."""
    _same_grid(profile, basis)
    matrix = basis.multiplication_operator(profile.cosine())
    return 0.5 * (matrix + matrix.T)


def thermal_state(quanta, n_max):
    """Weights p_n = exp(-n/N) / sum_{m < n_max} exp(-m/N); N = 0 is the ground state."""
    if quanta < 0:
        raise ConfigError(f"thermal quanta must be >= 0, got {quanta}")
    if quanta == 0:
        weights = np.zeros(n_max)
        weights[0] = 1.0
        return weights
    weights = np.exp(-np.arange(n_max) / quanta)
    return weights / weights.sum()


def angular_distribution(name, u):
    """Normalized emission pattern N(u) on [-1, 1]."""
    if name == "flat":
        return np.full_like(u, 0.5)
    if name == "dipole":
        return 0.375 * (1.0 + u * u)
    raise ConfigError(f"angular distribution must be one of {cfg.ANGULAR_DISTRIBUTIONS}, got {name!r}")


def feeding_matrix(thermal, lamb_dicke, basis: TrapBasis, distribution="flat",
                   quadrature_order=cfg.QUADRATURE_ORDER):
    """F = int du N(u) exp(i q x) rho_th exp(-i q x), q = eta (1 + u).

    Gauss-Legendre in u. The matrix is Hermitized and renormalized; a trace
    deficit beyond the truncation tolerance means kicked population left the
    retained basis and is rejected.
    """
    if int(quadrature_order) != quadrature_order or quadrature_order < 2:
        raise ConfigError(f"quadrature order must be an integer >= 2, got {quadrature_order}")
    thermal = np.asarray(thermal, dtype=float)
    if thermal.shape != (basis.size,):
        raise DimensionError(f"thermal weights have shape {thermal.shape}, basis has {basis.size} states")

    nodes, node_weights = np.polynomial.legendre.leggauss(int(quadrature_order))
    node_weights = node_weights * angular_distribution(distribution, nodes)

    occupied = np.flatnonzero(thermal > 0)
    psi = basis.wavefunctions
    psi_occupied = psi[:, occupied] * np.sqrt(thermal[occupied])
    x = basis.grid.points
    h = basis.grid.spacing

    feeding = np.zeros((basis.size, basis.size), dtype=complex)
    for u, weight in zip(nodes, node_weights):
        kick = lamb_dicke * (1.0 + u)
        # D[:, occupied] sqrt(p), split into real and imaginary parts of exp(i q x)
        real = psi.T @ (psi_occupied * (h * np.cos(kick * x))[:, None])
        imag = psi.T @ (psi_occupied * (h * np.sin(kick * x))[:, None])
        kicked = real + 1j * imag
        feeding += weight * (kicked @ kicked.conj().T)

    trace = float(np.trace(feeding).real)
    if abs(trace - 1.0) > cfg.TRUNCATION:
        raise TruncationError(
            f"feeding matrix trace {trace:.6f} deviates from 1 by {abs(trace - 1.0):.2e} "
            f"(> {cfg.TRUNCATION:g}); recoil kicks leak past n_max={basis.size}, "
            f"increase basis_size"
        )
    logger.info("feeding matrix: order=%d, trace deficit %.2e", quadrature_order, 1.0 - trace)
    logger.debug("truncation margin %.2e of %g", cfg.TRUNCATION - abs(trace - 1.0), cfg.TRUNCATION)
    feeding = 0.5 * (feeding + feeding.conj().T)
    return feeding / np.trace(feeding).real


@dataclass(frozen=True)
class CycleOperators:
    cosine: np.ndarray
    energies: np.ndarray
    feeding: Optional[np.ndarray] = None
    thermal: Optional[np.ndarray] = None

    @classmethod
    def for_profile(cls, profile: PulseProfile, basis: TrapBasis):
        """Pulse-only operators (no repumping), enough for excitation rates."""
        return cls(cosine_operator(profile, basis), basis.energies)

    @property
    def size(self):
        return self.energies.size

    def free_evolution(self, tsep):
        return np.exp(-1j * self.energies * tsep)


def beam_profile(config, grid):
    """Pulse-area profile of the configured doughnut, width converted from a0."""
    return doughnut_profile(grid, config.doughnut_order, config.internal_width(), config.peak_pulse_area)


def build_cycle_operators(config, basis: TrapBasis, feeding=None) -> CycleOperators:
    """Precompute C, F and the thermal weights for a validated config.

    A feeding matrix computed for the same basis, eta, N and N(u) can be
    passed in to share it between sweep points.
    """
    profile = beam_profile(config, basis.grid)
    thermal = thermal_state(config.thermal_quanta, basis.size)
    if feeding is None:
        feeding = feeding_matrix(
            thermal, config.internal_lamb_dicke(), basis, config.angular_distribution, config.quadrature_order
        )
    return CycleOperators(cosine_operator(profile, basis), basis.energies, feeding, thermal)


def apply_cycle(rho: DensityMatrix, ops: CycleOperators, tsep):
    """One Raman / thermalize / repump sequence. Returns (rho', zeta)."""
    if rho.size != ops.size:
        raise DimensionError(f"state has {rho.size} levels, operators have {ops.size}")
    if ops.feeding is None:
        raise DimensionError("cycle operators were built without a feeding matrix")
    sigma = ops.cosine @ rho.data @ ops.cosine
    # re-symmetrize so product rounding cannot accumulate over thousands of pulses
    sigma = 0.5 * (sigma + sigma.conj().T)
    zeta = 1.0 - float(np.trace(sigma).real)
    if not -cfg.EXCITATION_RANGE <= zeta <= 1.0 + cfg.EXCITATION_RANGE:
        raise ExcitationRangeError(f"excitation probability {zeta:.3e} outside [0, 1]")
    phases = ops.free_evolution(tsep)
    evolved = phases[:, None] * sigma * phases.conj()[None, :]
    return DensityMatrix(evolved + zeta * ops.feeding), zeta


def dark_state_residual(state, profile: PulseProfile, basis: TrapBasis, tsep):
    """min over phi of || e^{i phi} <x|e^{i H0 T}|f> - cos(theta(x)) <x|f> ||.

    Zero exactly when |f> is a dark state of the cycle for this T_sep.
    """
    _same_grid(profile, basis)
    state = np.asarray(state, dtype=complex)
    if state.shape != (basis.size,):
        raise DimensionError(f"state has shape {state.shape}, basis has {basis.size} states")
    norm = float(np.linalg.norm(state))
    if abs(norm - 1.0) > cfg.NORMALIZATION:
        raise RangeError(f"state must be normalized, got norm {norm:.12f}")

    h = basis.grid.spacing
    evolved = basis.to_position(np.exp(1j * basis.energies * tsep) * state)
    masked = profile.cosine() * basis.to_position(state)
    # the optimal phase aligns evolved with masked
    overlap = np.vdot(evolved, masked)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    difference = phase * evolved - masked
    return float(np.sqrt(h * np.vdot(difference, difference).real))


def reexcitation_rates(ops: CycleOperators, count):
    """zeta_n = 1 - (C^2)_nn, single-cycle excitation of eigenstate n."""
    if int(count) != count or not 0 <= count <= ops.size:
        raise RangeError(f"count must lie in [0, {ops.size}], got {count}")
    count = int(count)
    return 1.0 - np.sum(ops.cosine[:count] ** 2, axis=1)
