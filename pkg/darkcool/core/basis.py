# core/basis.py
"""Position grid and trap eigenbases.

The harmonic basis uses normalized Hermite functions from the three-term
recurrence; the localizing potential is diagonalized with a second-order
finite-difference Laplacian (Dirichlet ends) and a tridiagonal eigensolver.
Wavefunctions are stored column-wise, psi[j, n] = psi_n(x_j), and are
normalized under the grid quadrature h * sum_j.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from darkcool.core import defaults as cfg
from darkcool.core.errors import (
    BoundaryDecayError,
    ConfigError,
    DiagonalizationError,
    DimensionError,
    NumericalGuardError,
    RangeError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Grid:
    points: np.ndarray

    @property
    def size(self):
        return self.points.size

    @property
    def spacing(self):
        return float(self.points[1] - self.points[0])

    @property
    def half_width(self):
        return float(self.points[-1])

    def matches(self, other):
        return self is other or (
            self.size == other.size and np.array_equal(self.points, other.points)
        )


@dataclass(frozen=True)
class TrapBasis:
    grid: Grid
    energies: np.ndarray
    wavefunctions: np.ndarray
    kind: str = "harmonic"

    @property
    def size(self):
        return self.energies.size

    def to_position(self, coefficients):
        """Eigenbasis vector -> values on the grid."""
        return self.wavefunctions @ np.asarray(coefficients)

    def density(self, rho):
        """Spatial density <x_j|rho|x_j> of an eigenbasis density matrix."""
        rho = np.asarray(rho)
        if rho.shape != (self.size, self.size):
            raise DimensionError(f"expected a {self.size}x{self.size} matrix, got shape {rho.shape}")
        return np.einsum("jm,mn,jn->j", self.wavefunctions, rho, self.wavefunctions, optimize=True).real

    def multiplication_operator(self, values):
        """Matrix of multiplication by values(x_j) in the eigenbasis:
        h * sum_j psi_m(x_j) values_j psi_n(x_j)."""
        values = np.asarray(values)
        if values.shape != (self.grid.size,):
            raise DimensionError(
                f"expected {self.grid.size} grid values, got shape {values.shape}"
            )
        weighted = self.wavefunctions * (self.grid.spacing * values)[:, None]
        return self.wavefunctions.T @ weighted


def build_grid(half_width, points) -> Grid:
    if not half_width > 0 or not math.isfinite(half_width):
        raise ConfigError(f"grid half-width must be > 0, got {half_width}")
    if int(points) != points or points < cfg.MIN_GRID_POINTS:
        raise ConfigError(f"grid needs an integer number of points >= {cfg.MIN_GRID_POINTS}, got {points}")
    return Grid(np.linspace(-half_width, half_width, int(points)))


def _fix_signs(wavefunctions):
    """Make psi_n positive at the first grid point where |psi_n| exceeds half its maximum."""
    magnitude = np.abs(wavefunctions)
    first = np.argmax(magnitude > 0.5 * magnitude.max(axis=0), axis=0)
    signs = np.sign(wavefunctions[first, np.arange(wavefunctions.shape[1])])
    signs[signs == 0] = 1.0
    return wavefunctions * signs


def _check_basis(grid, wavefunctions):
    peak = np.abs(wavefunctions).max(axis=0)
    edge = np.maximum(np.abs(wavefunctions[0]), np.abs(wavefunctions[-1]))
    leaking = np.flatnonzero(edge >= cfg.BOUNDARY_DECAY * peak)
    if leaking.size:
        raise BoundaryDecayError(
            f"eigenfunction {leaking[0]} does not decay at x = +/-{grid.half_width:.4g} "
            f"(edge/peak = {edge[leaking[0]] / peak[leaking[0]]:.2e}); enlarge the grid "
            f"or reduce basis_size"
        )
    overlap = grid.spacing * (wavefunctions.T @ wavefunctions)
    error = np.abs(overlap - np.eye(overlap.shape[0])).max()
    logger.debug(
        "basis guards: edge/peak %.2e (limit %g), orthonormality %.2e (limit %g)",
        float((edge / peak).max()), cfg.BOUNDARY_DECAY, error, cfg.ORTHONORMALITY,
    )
    if error >= cfg.ORTHONORMALITY:
        raise NumericalGuardError(
            f"basis is not orthonormal under the grid quadrature (max error {error:.2e}); "
            f"refine the grid"
        )


def _check_request(grid, n_max):
    if int(n_max) != n_max or n_max < 1:
        raise RangeError(f"basis size must be a positive integer, got {n_max}")
    if n_max > grid.size:
        raise RangeError(f"basis size {n_max} exceeds the {grid.size} grid points")


def hermite_functions(x, n_max):
    """psi_0..psi_{n_max-1} of the unit oscillator at points x, shape (len(x), n_max).

    psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1}
    """
    x = np.asarray(x, dtype=float)
    psi = np.empty((x.size, n_max))
    psi[:, 0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max > 1:
        psi[:, 1] = math.sqrt(2.0) * x * psi[:, 0]
    for n in range(1, n_max - 1):
        psi[:, n + 1] = math.sqrt(2.0 / (n + 1)) * x * psi[:, n] - math.sqrt(n / (n + 1)) * psi[:, n - 1]
    return psi


def harmonic_eigenbasis(grid: Grid, n_max) -> TrapBasis:
    """Analytic basis of H0 = a^dagger a: E_n = n (zero-point offset dropped)."""
    _check_request(grid, n_max)
    psi = _fix_signs(hermite_functions(grid.points, n_max))
    _check_basis(grid, psi)
    logger.info("harmonic basis: n_max=%d, L=%.4g, M=%d", n_max, grid.half_width, grid.size)
    return TrapBasis(grid, np.arange(n_max, dtype=float), psi, kind="harmonic")


def potential_curve(grid: Grid, epsilon=0.0, g=0.0):
    """V(x) = 1/2 [x^2 + epsilon x^2 / (1 + g x^2)] in units of hbar*nu."""
    x2 = grid.points ** 2
    return 0.5 * (x2 + epsilon * x2 / (1.0 + g * x2))


def solver_refinement(grid: Grid, epsilon, g, n_max):
    """Oversampling factor r for the finite-difference eigenproblem.

    The stencil runs on r(M-1)+1 points, which contain the working grid,
    so the spacing resolves both the central well and the top retained level.
    """
    target = cfg.SOLVER_LEVEL_RESOLUTION / max(int(n_max), 1)
    if epsilon > 0 and g > 0:
        target = min(target, cfg.SOLVER_WELL_RESOLUTION / math.sqrt(g))
    return max(1, int(math.ceil(grid.spacing / target - 1e-9)))


def _tridiagonal_eigenpairs(diagonal, off_diagonal, n_max, stride):
    """Lowest n_max eigenpairs, vectors kept only on every stride-th point."""
    energies, columns = [], []
    for first in range(0, n_max, cfg.SOLVER_BATCH):
        last = min(first + cfg.SOLVER_BATCH, n_max) - 1
        try:
            values, vectors = eigh_tridiagonal(
                diagonal, off_diagonal, select="i", select_range=(first, last)
            )
        except (LinAlgError, ValueError) as exc:
            raise DiagonalizationError(f"tridiagonal eigensolver failed: {exc}") from exc
        energies.append(values)
        columns.append(vectors[::stride])
    return np.concatenate(energies), np.hstack(columns)


def solve_potential_eigenbasis(grid: Grid, epsilon, g, n_max, refinement=None) -> TrapBasis:
    """Lowest n_max eigenpairs of -1/2 d^2/dx^2 + V(x).

    refinement=None picks the oversampling from solver_refinement; 1 solves
    directly on the working grid.
    """
    if epsilon < 0 or g < 0:
        raise ConfigError(f"potential needs epsilon >= 0 and g >= 0, got epsilon={epsilon}, g={g}")
    _check_request(grid, n_max)
    if refinement is None:
        refinement = solver_refinement(grid, epsilon, g, n_max)
    if int(refinement) != refinement or refinement < 1:
        raise ConfigError(f"solver refinement must be a positive integer, got {refinement}")
    refinement = int(refinement)
    fine = grid if refinement == 1 else build_grid(grid.half_width, refinement * (grid.size - 1) + 1)
    h = fine.spacing
    diagonal = 1.0 / h ** 2 + potential_curve(fine, epsilon, g)
    off_diagonal = np.full(fine.size - 1, -0.5 / h ** 2)
    energies, vectors = _tridiagonal_eigenpairs(diagonal, off_diagonal, int(n_max), refinement)
    if energies.size != n_max or not np.all(np.isfinite(energies)):
        raise DiagonalizationError(f"eigensolver returned {energies.size} of {n_max} eigenpairs")

    order = np.argsort(energies, kind="stable")
    energies, vectors = energies[order], vectors[:, order]
    vectors = vectors / np.sqrt(grid.spacing * np.sum(vectors ** 2, axis=0))
    psi = _fix_signs(vectors)
    _check_basis(grid, psi)
    logger.info(
        "potential basis: epsilon=%g, g=%g, n_max=%d, M=%d (solver %d), E_0=%.6g",
        epsilon, g, n_max, grid.size, fine.size, energies[0],
    )
    return TrapBasis(grid, energies, psi, kind="perturbed")


def spatial_density(rho, basis: TrapBasis):
    """<x|rho|x> on the basis grid; rho may be a DensityMatrix or a plain matrix."""
    return basis.density(getattr(rho, "data", rho))


def build_basis(config) -> TrapBasis:
    """Grid plus eigenbasis for a validated SimulationConfig.

    A perturbed trap with epsilon = 0 is the harmonic trap and gets the
    analytic basis.
    """
    grid = build_grid(*config.resolved_grid())
    trap = config.internal_trap()
    if trap.is_harmonic or trap.epsilon == 0:
        return harmonic_eigenbasis(grid, config.basis_size)
    return solve_potential_eigenbasis(grid, trap.epsilon, trap.g, config.basis_size)


def _check_count(basis, count):
    if int(count) != count or not 0 <= count <= basis.size:
        raise RangeError(f"count must lie in [0, {basis.size}], got {count}")
    return int(count)


def eigenstate_widths(basis: TrapBasis, count):
    """rms widths sqrt(<x^2>_n - <x>_n^2) of the first count eigenstates."""
    count = _check_count(basis, count)
    x = basis.grid.points
    density = basis.grid.spacing * basis.wavefunctions[:, :count] ** 2
    mean = x @ density
    second = (x * x) @ density
    return np.sqrt(np.maximum(second - mean ** 2, 0.0))


def effective_lamb_dicke(basis: TrapBasis, lamb_dicke, count):
    """eta scaled by each eigenstate's width relative to the harmonic ground state."""
    return lamb_dicke * eigenstate_widths(basis, count) / math.sqrt(0.5)
