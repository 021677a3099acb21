import math

import numpy as np
import pytest

from darkcool.core.basis import (
    build_basis,
    build_grid,
    effective_lamb_dicke,
    eigenstate_widths,
    harmonic_eigenbasis,
    hermite_functions,
    potential_curve,
    solve_potential_eigenbasis,
    solver_refinement,
    spatial_density,
)
from darkcool.core import defaults as cfg
from darkcool.core.errors import BoundaryDecayError, ConfigError, DimensionError, RangeError
from darkcool.core.model import DensityMatrix, GridSpec, SimulationConfig, TrapSpec


def test_grid_is_symmetric_and_uniform():
    grid = build_grid(10.0, 4001)
    assert grid.size == 4001
    assert grid.points[0] == -10.0 and grid.points[-1] == 10.0
    assert grid.spacing == pytest.approx(0.005)
    assert grid.points[2000] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("half_width, points", [(0.0, 100), (-1.0, 100), (10.0, 8), (10.0, 100.5)])
def test_bad_grids(half_width, points):
    with pytest.raises(ConfigError):
        build_grid(half_width, points)


def test_hermite_recurrence_matches_closed_forms():
    x = np.linspace(-3, 3, 13)
    psi = hermite_functions(x, 3)
    gauss = math.pi ** -0.25 * np.exp(-0.5 * x ** 2)
    np.testing.assert_allclose(psi[:, 0], gauss, atol=1e-14)
    np.testing.assert_allclose(psi[:, 1], math.sqrt(2) * x * gauss, atol=1e-14)
    np.testing.assert_allclose(psi[:, 2], (2 * x ** 2 - 1) / math.sqrt(2) * gauss, atol=1e-14)


def test_harmonic_basis_spectrum_and_widths():
    basis = harmonic_eigenbasis(build_grid(12.0, 2048), 40)
    np.testing.assert_array_equal(basis.energies, np.arange(40.0))
    widths = eigenstate_widths(basis, 40)
    assert widths[0] ** 2 == pytest.approx(0.5, abs=1e-10)
    np.testing.assert_allclose(widths, np.sqrt(np.arange(40) + 0.5), atol=1e-3)


def test_harmonic_basis_is_orthonormal(small_basis):
    overlap = small_basis.grid.spacing * small_basis.wavefunctions.T @ small_basis.wavefunctions
    np.testing.assert_allclose(overlap, np.eye(small_basis.size), atol=1e-10)


def test_ground_state_is_positive(small_basis):
    assert np.all(small_basis.wavefunctions[:, 0] > 0)


def test_small_grid_fails_boundary_decay():
    with pytest.raises(BoundaryDecayError):
        harmonic_eigenbasis(build_grid(5.0, 512), 30)


def test_basis_request_range(small_basis):
    with pytest.raises(RangeError):
        harmonic_eigenbasis(small_basis.grid, 0)
    with pytest.raises(RangeError):
        harmonic_eigenbasis(build_grid(10.0, 16), 17)


def test_finite_difference_solver_reproduces_oscillator():
    grid = build_grid(10.0, 4001)
    numeric = solve_potential_eigenbasis(grid, 0.0, 0.0, 16)
    analytic = harmonic_eigenbasis(grid, 16)
    np.testing.assert_allclose(numeric.energies - numeric.energies[0], np.arange(16.0), atol=1e-3)
    assert numeric.energies[0] == pytest.approx(0.5, abs=1e-3)
    assert np.abs(numeric.wavefunctions - analytic.wavefunctions).max() < 1e-3
    np.testing.assert_allclose(
        eigenstate_widths(numeric, 16), eigenstate_widths(analytic, 16), atol=1e-3
    )


def test_finite_difference_error_shrinks_with_refinement():
    errors = []
    for points in (801, 1601, 3201):
        basis = solve_potential_eigenbasis(build_grid(10.0, points), 0.0, 0.0, 8, refinement=1)
        errors.append(np.abs(basis.energies - (np.arange(8) + 0.5)).max())
    assert errors[0] > errors[1] > errors[2]
    # second order: halving h roughly quarters the error
    assert errors[1] / errors[2] == pytest.approx(4.0, rel=0.2)


def test_solver_rejects_negative_parameters(small_basis):
    with pytest.raises(ConfigError):
        solve_potential_eigenbasis(small_basis.grid, -1.0, 0.0, 4)


def test_potential_curve():
    grid = build_grid(2.0, 17)
    np.testing.assert_allclose(potential_curve(grid), 0.5 * grid.points ** 2)
    bumped = potential_curve(grid, epsilon=3.0, g=1.0)
    x2 = grid.points ** 2
    np.testing.assert_allclose(bumped, 0.5 * (x2 + 3.0 * x2 / (1 + x2)))
    assert bumped[grid.size // 2] == 0.0


def test_zero_epsilon_uses_the_analytic_basis():
    config = SimulationConfig(trap=TrapSpec.perturbed(0.0, 2000.0), basis_size=20, grid=GridSpec(points=256))
    basis = build_basis(config)
    assert basis.kind == "harmonic"
    np.testing.assert_array_equal(basis.energies, np.arange(20.0))


def test_ground_rms_trap_matches_the_rescaled_oscillator_trap():
    rms = SimulationConfig(trap=TrapSpec.perturbed(1.9e6, 1000.0), basis_size=12, length_unit="ground-rms")
    plain = SimulationConfig(trap=TrapSpec.perturbed(1.9e6, 2000.0), basis_size=12)
    assert rms.resolved_grid() == pytest.approx(plain.resolved_grid())
    np.testing.assert_allclose(build_basis(rms).energies, build_basis(plain).energies, rtol=1e-9)


def test_width_count_range(small_basis):
    assert eigenstate_widths(small_basis, 0).size == 0
    with pytest.raises(RangeError):
        eigenstate_widths(small_basis, small_basis.size + 1)
    with pytest.raises(RangeError):
        eigenstate_widths(small_basis, -1)


def test_effective_lamb_dicke_of_harmonic_ground_state(small_basis):
    eta_eff = effective_lamb_dicke(small_basis, 5.0, 3)
    assert eta_eff[0] == pytest.approx(5.0, abs=1e-9)
    assert eta_eff[1] == pytest.approx(5.0 * math.sqrt(3.0), abs=1e-6)


def test_spatial_density_of_ground_state(small_basis):
    rho = np.zeros((small_basis.size, small_basis.size))
    rho[0, 0] = 1.0
    density = spatial_density(DensityMatrix(rho), small_basis)
    np.testing.assert_allclose(density, small_basis.wavefunctions[:, 0] ** 2, atol=1e-14)
    assert small_basis.grid.spacing * density.sum() == pytest.approx(1.0, abs=1e-10)


def test_density_shape_check(small_basis):
    with pytest.raises(DimensionError):
        small_basis.density(np.eye(3))
    with pytest.raises(DimensionError):
        small_basis.multiplication_operator(np.ones(7))


def test_localizing_trap_ground_state_is_narrow():
    config = SimulationConfig(trap=TrapSpec.perturbed(), basis_size=12)
    trap = build_basis(config)
    harmonic = harmonic_eigenbasis(trap.grid, 12)
    widths = eigenstate_widths(trap, 12)
    reference = eigenstate_widths(harmonic, 12)
    ratio = widths / reference
    assert ratio[0] == pytest.approx(0.067, abs=0.004)
    assert trap.energies[0] > 0.5
    # the two lowest levels above the well sit on its plateau and are squeezed alike
    np.testing.assert_allclose(ratio[1:3], 0.72, atol=0.01)
    assert np.all((ratio[3:] > 0.85) & (ratio[3:] < 1.0))
    assert np.all(np.diff(ratio[1::2]) > 0) and np.all(np.diff(ratio[2::2]) > 0)
    assert ratio[11] > 0.97


def test_grid_refinement_is_stable():
    config = SimulationConfig(trap=TrapSpec.perturbed(), basis_size=12)
    half_width, points = config.resolved_grid()
    coarse = build_basis(config)
    doubled = build_basis(config.with_changes(grid=GridSpec(half_width, 2 * points - 1)))
    assert np.abs(doubled.energies - coarse.energies).max() < 1e-4
    widths = eigenstate_widths(coarse, 12)
    assert np.abs(eigenstate_widths(doubled, 12) / widths - 1.0).max() < 1e-4

    # halving the stencil spacing itself moves no level by more than 1e-4
    epsilon, g = cfg.PERTURBED_EPSILON, cfg.PERTURBED_G
    stride = solver_refinement(coarse.grid, epsilon, g, 12)
    assert stride > 1
    finer = solve_potential_eigenbasis(coarse.grid, epsilon, g, 12, refinement=2 * stride)
    assert np.abs(finer.energies - coarse.energies).max() < 1e-4
    assert np.abs(eigenstate_widths(finer, 12) / widths - 1.0).max() < 1e-4


def test_solver_refinement_rule():
    grid = build_grid(10.0, 2001)
    assert solver_refinement(grid, 0.0, 0.0, 4) == 1
    assert solver_refinement(grid, 0.0, 0.0, 40) == 10
    well = cfg.SOLVER_WELL_RESOLUTION / math.sqrt(cfg.PERTURBED_G)
    stride = solver_refinement(grid, cfg.PERTURBED_EPSILON, cfg.PERTURBED_G, 10)
    assert grid.spacing / stride <= well < grid.spacing / (stride - 1)
    with pytest.raises(ConfigError):
        solve_potential_eigenbasis(grid, 0.0, 0.0, 4, refinement=0)
